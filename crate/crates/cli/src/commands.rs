//! Argument definitions and subcommand implementations.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use semiwigner::airy_eigen::airy_wigner_offdiag;
use semiwigner::coefficients::{
    coeff_cubic_phase, coeff_gaussian, coeff_matrix_numeric, coeff_offdiag_airy, coeff_quadratic_phase, default_grid, CoeffEntry, CoeffMatrix,
    CubicConstant, Provenance,
};
use semiwigner::io::{write_coeff_rows, write_field, write_table, Metadata, COEFF_COLUMNS};
use semiwigner::schrodinger::{bohr_sommerfeld, exact_eigenfunction, wkb_eigenfunction, Amplitude, EigenState, InitialData, Phase};
use semiwigner::series::{SeriesSolution, DEFAULT_BAND};
use semiwigner::validation::{run_suite, SUITES};
use semiwigner::wigner::{exact_wigner_eigen, wigner_transform_eigen, WignerEigenIndex};
use semiwigner::{Field2D, Grid2D};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Numeric(#[from] semiwigner::Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) | CliError::Io(_) => 1,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "semiwigner", version, about = "Semiclassical Wigner functions of the harmonic oscillator")]
pub struct Cli {
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the timestamp from the metadata header.
    #[arg(long, global = true)]
    pub no_timestamp: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WignerBackend {
    Exact,
    Airy,
    Quadrature,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SeriesBackend {
    Exact,
    Airy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataKind {
    #[value(name = "quad+unit")]
    QuadUnit,
    #[value(name = "quad+gauss")]
    QuadGauss,
    #[value(name = "cubic+bump")]
    CubicBump,
    #[value(name = "gauss")]
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Route {
    Numeric,
    Closed,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DensityMode {
    Coherent,
    #[value(name = "incoherent-x0")]
    IncoherentX0,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues and eigenfunction samples.
    Eigens {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        /// Add the WKB eigenfunction column.
        #[arg(long)]
        wkb: bool,
        /// Sample points as MIN:MAX:COUNT.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Wigner eigenfunction W_nm on a grid.
    Wigner {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: u32,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long, value_enum, default_value = "exact")]
        backend: WignerBackend,
        /// XMIN:XMAX:NX,PMIN:PMAX:NP.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Expansion coefficient matrix.
    Coeffs {
        #[arg(long, value_enum)]
        data: DataKind,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long)]
        nmax: u32,
        #[arg(long, value_enum, default_value = "numeric")]
        route: Route,
    },
    /// Series solution W(x, p, t) on a grid.
    Evolve {
        #[arg(long, value_enum)]
        data: DataKind,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value = "exact")]
        backend: SeriesBackend,
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Energy density profiles of the Airy series.
    Density {
        #[arg(long, value_enum)]
        mode: DensityMode,
        #[arg(long, value_enum)]
        data: DataKind,
        #[arg(long, allow_hyphen_values = true)]
        eps: f64,
        /// MIN:MAX:COUNT in x (coherent) or t (incoherent-x0).
        #[arg(long, allow_hyphen_values = true)]
        range: String,
    },
    /// Acceptance suites; exit status 0 iff all selected suites pass.
    Validate {
        #[arg(long)]
        suite: Option<String>,
    },
}

/// Applies WIGNER_THREADS to the global worker pool.
pub fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("WIGNER_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("WIGNER_THREADS must be a positive integer, got '{v}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot configure threads: {e}")))
}

/// Parses MIN:MAX:COUNT.
pub fn parse_range(s: &str) -> CliResult<(f64, f64, usize)> {
    let bad = || CliError::Usage(format!("expected MIN:MAX:COUNT, got '{s}'"));
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !(a.is_finite() && b.is_finite()) || (n > 1 && b <= a) {
        return Err(bad());
    }
    Ok((a, b, n))
}

fn label<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

fn samples(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Parses XMIN:XMAX:NX,PMIN:PMAX:NP.
pub fn parse_grid(s: &str) -> CliResult<Grid2D> {
    let (xs, ps) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("expected XMIN:XMAX:NX,PMIN:PMAX:NP, got '{s}'")))?;
    let (x0, x1, nx) = parse_range(xs)?;
    let (p0, p1, np) = parse_range(ps)?;
    Ok(Grid2D::new(x0, x1, nx, p0, p1, np)?)
}

fn initial_data(kind: DataKind, eps: f64) -> CliResult<InitialData> {
    let (a, p) = match kind {
        DataKind::QuadUnit => (Amplitude::Unit, Phase::Quadratic { sign: 1.0 }),
        DataKind::QuadGauss | DataKind::Gauss => (Amplitude::Gaussian, Phase::Quadratic { sign: 1.0 }),
        DataKind::CubicBump => (Amplitude::CompactBump { center: 0.0, width: 1.0 }, Phase::Cubic),
    };
    Ok(InitialData::new(a, p, eps)?)
}

fn output(cli: &Cli) -> CliResult<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn metadata(cli: &Cli, invocation: &str) -> Metadata {
    let m = Metadata::new(invocation);
    if cli.no_timestamp {
        m
    } else {
        m.stamped()
    }
}

/// Runs the selected subcommand; Ok(false) means a validation suite failed.
pub fn run(cli: &Cli, invocation: &str) -> CliResult<bool> {
    let meta = metadata(cli, invocation);
    match &cli.command {
        Command::Eigens { n, eps, wkb, x } => eigens(cli, meta, *n, *eps, *wkb, x.as_deref()),
        Command::Wigner { n, m, eps, backend, grid } => wigner(cli, meta, *n, *m, *eps, *backend, grid),
        Command::Coeffs { data, eps, nmax, route } => coeffs(cli, meta, *data, *eps, *nmax, *route),
        Command::Evolve { data, eps, t, backend, grid } => evolve(cli, meta, *data, *eps, *t, *backend, grid),
        Command::Density { mode, data, eps, range } => density(cli, meta, *mode, *data, *eps, range),
        Command::Validate { suite } => validate(suite.as_deref()),
    }
}

fn eigens(cli: &Cli, meta: Metadata, n: u32, eps: f64, wkb: bool, x: Option<&str>) -> CliResult<bool> {
    let state = EigenState::harmonic(n, eps)?;
    let bs = bohr_sommerfeld(|x| 0.5 * x * x, n, eps, (0.0, 10.0 + 2.0 * state.energy))?;
    let (a, b, count) = match x {
        Some(s) => parse_range(s)?,
        None => {
            let reach = state.turning_point() + 4.0 * eps.sqrt();
            (-reach, reach, 201)
        }
    };
    let mut meta = meta.param("n", n).param("eps", eps).param("energy", state.energy).param("bohr_sommerfeld_energy", bs);
    for k in 0..=n {
        meta = meta.param(format!("E_{k}"), EigenState::harmonic(k, eps)?.energy);
    }
    let rows = samples(a, b, count)
        .into_iter()
        .map(|x| {
            let mut row = vec![x, exact_eigenfunction(&state, x)?];
            if wkb {
                row.push(wkb_eigenfunction(&state, x)?);
            }
            Ok(row)
        })
        .collect::<semiwigner::Result<Vec<_>>>()?;
    let cols: &[&str] = if wkb { &["x", "exact", "wkb"] } else { &["x", "exact"] };
    let mut w = output(cli)?;
    write_table(&mut w, &meta, cols, &rows)?;
    w.flush()?;
    Ok(true)
}

fn wigner(cli: &Cli, meta: Metadata, n: u32, m: u32, eps: f64, backend: WignerBackend, grid: &str) -> CliResult<bool> {
    let grid = parse_grid(grid)?;
    let idx = WignerEigenIndex::new(n, m, eps)?;
    let field = match backend {
        WignerBackend::Exact => Field2D::try_from_fn(grid, |x, p| exact_wigner_eigen(&idx, x, p))?,
        WignerBackend::Airy => Field2D::from_fn(grid, |x, p| airy_wigner_offdiag(&idx, x, p).value),
        WignerBackend::Quadrature => Field2D::try_from_fn(grid, |x, p| wigner_transform_eigen(&idx, x, p, 1e-12))?,
    };
    let backend = label(backend);
    let meta = meta.param("n", n).param("m", m).param("eps", eps).param("backend", backend);
    let mut w = output(cli)?;
    write_field(&mut w, &meta, &field)?;
    w.flush()?;
    Ok(true)
}

fn closed_matrix(kind: DataKind, data: &InitialData, n_max: u32, grid: Grid2D) -> CliResult<CoeffMatrix> {
    let eps = data.epsilon;
    let k = n_max as usize + 1;
    let mut entries = Vec::with_capacity(k * k);
    for q in 0..k * k {
        let (n, m) = ((q / k) as u32, (q % k) as u32);
        let e = if n > m {
            let t: &CoeffEntry = &entries[m as usize * k + n as usize];
            CoeffEntry::approximate(t.value.conj(), t.provenance)
        } else if n == m {
            match kind {
                DataKind::QuadUnit => coeff_quadratic_phase(n, eps, Amplitude::Unit)?,
                DataKind::QuadGauss => coeff_quadratic_phase(n, eps, Amplitude::Gaussian)?,
                DataKind::Gauss => coeff_gaussian(n, eps)?,
                DataKind::CubicBump => {
                    let amp = data.amplitude;
                    let c = coeff_cubic_phase(n, eps, |x| amp.value(x), (-1.0, 1.0), CubicConstant::Verbatim)?;
                    CoeffEntry::approximate(Complex64::new(c.value, 0.0), Provenance::SemiClosed)
                }
            }
        } else {
            coeff_offdiag_airy(&WignerEigenIndex::new(n, m, eps)?, data, grid)?
        };
        entries.push(e);
    }
    Ok(CoeffMatrix::new(n_max, n_max, eps, entries)?)
}

fn coeffs(cli: &Cli, meta: Metadata, kind: DataKind, eps: f64, n_max: u32, route: Route) -> CliResult<bool> {
    let data = initial_data(kind, eps)?;
    let meta = meta
        .param("data", label(kind))
        .param("eps", eps)
        .param("nmax", n_max)
        .param("route", label(route));
    let mut tables = Vec::new();
    if route != Route::Closed {
        if kind == DataKind::QuadUnit {
            return Err(CliError::Usage("numeric projections need square-integrable data; use --route closed".into()));
        }
        let grid = default_grid(&data, n_max)?;
        tables.push(coeff_matrix_numeric(&data, n_max, grid)?);
    }
    if route != Route::Numeric {
        let grid = match kind {
            DataKind::QuadUnit => Grid2D::square(1.0, 0.5)?,
            _ => default_grid(&data, n_max)?,
        };
        tables.push(closed_matrix(kind, &data, n_max, grid)?);
    }
    let mut w = output(cli)?;
    meta.write(&mut w)?;
    writeln!(w, "{COEFF_COLUMNS}")?;
    for t in &tables {
        write_coeff_rows(&mut w, t)?;
    }
    w.flush()?;
    Ok(true)
}

fn series(kind: DataKind, eps: f64, backend: SeriesBackend, grid: Grid2D) -> CliResult<SeriesSolution> {
    let data = initial_data(kind, eps)?;
    if kind == DataKind::QuadUnit {
        return Err(CliError::Usage("the series needs square-integrable data".into()));
    }
    Ok(match backend {
        SeriesBackend::Exact => SeriesSolution::exact_from_data(&data)?,
        SeriesBackend::Airy => SeriesSolution::airy_from_data(&data, DEFAULT_BAND, grid)?,
    })
}

fn evolve(cli: &Cli, meta: Metadata, kind: DataKind, eps: f64, t: f64, backend: SeriesBackend, grid: &str) -> CliResult<bool> {
    let grid = parse_grid(grid)?;
    let sol = series(kind, eps, backend, grid)?;
    let field = sol.field(grid, t);
    let meta = meta
        .param("data", label(kind))
        .param("eps", eps)
        .param("t", t)
        .param("backend", sol.backend.as_str())
        .param("n_max", sol.n_max())
        .param("band", sol.band);
    let mut w = output(cli)?;
    write_field(&mut w, &meta, &field)?;
    w.flush()?;
    Ok(true)
}

fn density(cli: &Cli, meta: Metadata, mode: DensityMode, kind: DataKind, eps: f64, range: &str) -> CliResult<bool> {
    let (a, b, count) = parse_range(range)?;
    let data = initial_data(kind, eps)?;
    let grid = default_grid(&data, 0).unwrap_or(Grid2D::square(4.0, 0.1)?);
    let sol = series(kind, eps, SeriesBackend::Airy, grid)?;
    let meta = meta.param("data", label(kind)).param("eps", eps).param("n_max", sol.n_max()).param("band", sol.band);
    let mut w = output(cli)?;
    match mode {
        DensityMode::Coherent => {
            let rows = samples(a, b, count)
                .into_iter()
                .map(|x| Ok(vec![x, sol.energy_density_coherent(x)?]))
                .collect::<semiwigner::Result<Vec<_>>>()?;
            write_table(&mut w, &meta.param("mode", "coherent"), &["x", "value"], &rows)?;
        }
        DensityMode::IncoherentX0 => {
            let rows = samples(a, b, count)
                .into_iter()
                .map(|t| sol.energy_density_incoherent_x0(t).map(|v| vec![t, v.re, v.im]))
                .collect::<semiwigner::Result<Vec<_>>>()?;
            write_table(&mut w, &meta.param("mode", "incoherent-x0"), &["t", "re", "im"], &rows)?;
        }
    }
    w.flush()?;
    Ok(true)
}

fn validate(suite: Option<&str>) -> CliResult<bool> {
    let names: Vec<&str> = match suite {
        Some(s) if SUITES.contains(&s) => vec![s],
        Some(s) => return Err(CliError::Usage(format!("unknown suite '{s}'; expected one of {}", SUITES.join(", ")))),
        None => SUITES.to_vec(),
    };
    let mut all = true;
    let stdout = io::stdout();
    for name in names {
        let r = run_suite(name)?;
        all &= r.passed();
        let mut out = stdout.lock();
        writeln!(out, "{}", r.detail())?;
        out.flush()?;
    }
    Ok(all)
}
