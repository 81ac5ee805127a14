//! Acceptance criteria for the semiwigner library live in `tests/acceptance.rs`.
