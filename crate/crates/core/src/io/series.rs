//! CSV emitters for force histories and point-driver curves.

use std::io::Write;
use std::path::Path;

use super::fmt::sci9;
use crate::constitutive::DriveSample;
use crate::error::{Error, Result};

/// One accepted-step row of the force history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub time: f64,
    pub displacement: f64,
    pub force: f64,
}

/// Writes `time_s,displacement_mm,force_N` with one row per accepted step.
pub fn write_series_csv(rows: &[SeriesRow], path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "time_s,displacement_mm,force_N")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            sci9(r.time),
            sci9(r.displacement),
            sci9(r.force)
        )?;
    }
    Ok(())
}

/// Reads a force-history CSV back.
pub fn read_series_csv(path: impl AsRef<Path>) -> Result<Vec<SeriesRow>> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "time_s,displacement_mm,force_N")) => {}
        other => {
            return Err(Error::Parse {
                path: display,
                line: 1,
                message: format!("unexpected header {other:?}"),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 3 {
            return Err(Error::Parse {
                path: display,
                line: idx + 1,
                message: format!("expected 3 columns, got {}", cols.len()),
            });
        }
        let mut vals = [0.0; 3];
        for (k, c) in cols.iter().enumerate() {
            vals[k] = c.trim().parse().map_err(|e| Error::Parse {
                path: display.clone(),
                line: idx + 1,
                message: format!("bad number '{c}': {e}"),
            })?;
        }
        rows.push(SeriesRow {
            time: vals[0],
            displacement: vals[1],
            force: vals[2],
        });
    }
    Ok(rows)
}

/// Writes a point-driver curve as `time_s,stretch,stress_MPa`.
pub fn write_point_csv(samples: &[DriveSample], path: impl AsRef<Path>) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "time_s,stretch,stress_MPa")?;
    for s in samples {
        writeln!(out, "{},{},{}", sci9(s.t), sci9(s.control), sci9(s.stress))?;
    }
    Ok(())
}
