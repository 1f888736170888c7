//! Embedded copy of the dominant-singularity table.

use std::f64::consts::PI;

const DATA: &str = include_str!("../data/table1.txt");

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub rho: f64,
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

/// Parse `rho x u v` lines; `pi` stands for v = π and `#` starts a comment.
pub fn parse(text: &str) -> Result<Vec<Cell>, String> {
    let mut cells = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 4 {
            return Err(format!(
                "line {}: expected 4 fields, got {}",
                i + 1,
                f.len()
            ));
        }
        let num = |s: &str| -> Result<f64, String> {
            if s == "pi" {
                Ok(PI)
            } else {
                s.parse()
                    .map_err(|_| format!("line {}: bad number '{s}'", i + 1))
            }
        };
        cells.push(Cell {
            rho: num(f[0])?,
            x: num(f[1])?,
            u: num(f[2])?,
            v: num(f[3])?,
        });
    }
    Ok(cells)
}

pub fn cells() -> Vec<Cell> {
    parse(DATA).expect("embedded table parses")
}

/// Table entry for (ρ, x), matched to 1e-12.
pub fn lookup(rho: f64, x: f64) -> Option<Cell> {
    cells()
        .into_iter()
        .find(|c| (c.rho - rho).abs() < 1e-12 && (c.x - x).abs() < 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_table_has_ninety_cells() {
        let c = cells();
        assert_eq!(c.len(), 90);
        let cell = lookup(0.3, 1.0).unwrap();
        assert_eq!((cell.u, cell.v), (0.0, 1.6111));
        assert_eq!(lookup(0.1, 0.01).unwrap().v, PI);
    }

    #[test]
    fn rejects_short_lines() {
        assert!(parse("0.1 0.2 0.3").is_err());
        assert!(parse("0.1 0.2 x 0.3").is_err());
    }
}
