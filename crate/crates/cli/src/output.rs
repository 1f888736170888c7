use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::args::Format;
use crate::CliError;

/// One evaluated density point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    pub t: f64,
    pub x: f64,
    pub rho: f64,
    pub method: String,
    pub value: f64,
    pub atom: f64,
    pub err_est: f64,
    pub regime: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Record {
    pub rho: f64,
    pub x: f64,
    pub u: f64,
    pub v: f64,
    pub r_star: f64,
    pub u_table: Option<f64>,
    pub v_table: Option<f64>,
    pub abs_err: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub suite: String,
    pub check: String,
    pub observed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn write_records<T: Serialize>(
    out: &mut dyn Write,
    rows: &[T],
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(&mut *out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Parse CSV produced by [`write_records`].
pub fn read_records<T: for<'de> Deserialize<'de>>(data: &str) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_reader(data.as_bytes());
    Ok(r.deserialize().collect::<Result<Vec<T>, _>>()?)
}

/// `start:stop:count`, both ends included.
pub fn parse_grid(text: &str) -> Result<Vec<f64>, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "grid must look like start:stop:count, got '{text}'"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}
