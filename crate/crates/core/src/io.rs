//! CSV output with a `#` metadata header; numbers carry 17 significant digits.

use std::io::{self, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use crate::coefficients::CoeffMatrix;
use crate::quadrature::Field2D;

/// Header block written before every table.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub invocation: String,
    pub params: Vec<(String, String)>,
    /// Seconds since the Unix epoch; None for reproducible output.
    pub timestamp: Option<u64>,
}

impl Metadata {
    pub fn new(invocation: impl Into<String>) -> Self {
        Self {
            invocation: invocation.into(),
            params: Vec::new(),
            timestamp: None,
        }
    }

    pub fn param(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    pub fn stamped(mut self) -> Self {
        self.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).ok().map(|d| d.as_secs());
        self
    }

    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# invocation: {}", self.invocation)?;
        for (k, v) in &self.params {
            writeln!(w, "# {k} = {v}")?;
        }
        if let Some(t) = self.timestamp {
            writeln!(w, "# timestamp = {t}")?;
        }
        Ok(())
    }
}

/// Shortest round-trip-safe rendering with 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Columns x,p,re,im in row-major order (x outer).
pub fn write_field<W: Write>(w: &mut W, meta: &Metadata, field: &Field2D) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "x,p,re,im")?;
    let g = field.grid;
    for i in 0..g.nx {
        for j in 0..g.np {
            let v = field.get(i, j);
            writeln!(w, "{},{},{},{}", num(g.x(i)), num(g.p(j)), num(v.re), num(v.im))?;
        }
    }
    Ok(())
}

/// Columns n,m,re,im,provenance.
pub fn write_coeffs<W: Write>(w: &mut W, meta: &Metadata, coeffs: &CoeffMatrix) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "{COEFF_COLUMNS}")?;
    write_coeff_rows(w, coeffs)
}

pub const COEFF_COLUMNS: &str = "n,m,re,im,provenance";

/// Data rows of [`write_coeffs`] without metadata or column header.
pub fn write_coeff_rows<W: Write>(w: &mut W, coeffs: &CoeffMatrix) -> io::Result<()> {
    for (n, m, e) in coeffs.iter() {
        writeln!(w, "{n},{m},{},{},{}", num(e.value.re), num(e.value.im), e.provenance.as_str())?;
    }
    Ok(())
}

/// Generic numeric table with the given column names.
pub fn write_table<W: Write>(w: &mut W, meta: &Metadata, columns: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    meta.write(w)?;
    writeln!(w, "{}", columns.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| num(v)).collect();
        writeln!(w, "{}", cells.join(","))?;
    }
    Ok(())
}

/// Data rows of a CSV document, skipping `#` lines and the column header.
pub fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .skip(1)
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}
