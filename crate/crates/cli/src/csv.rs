//! Curve CSV: one row per accepted point, full double precision so that a
//! run is byte-for-byte reproducible and re-verification loses nothing.

use std::path::Path;

use perioscope_core::continuation::SolutionCurve;

use crate::CliError;

pub const HEADER: &str = "xi,mu,u0,du0,min_u,max_u,residual,newton_iters_used";

/// A parsed CSV row; carries exactly what re-verification needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub xi: f64,
    pub mu: f64,
    pub u0: f64,
    pub du0: f64,
    pub min_u: f64,
    pub max_u: f64,
    pub residual: f64,
    pub newton_iters_used: usize,
}

pub fn render(curve: &SolutionCurve) -> String {
    let mut out = String::with_capacity(64 * (curve.len() + 1));
    out.push_str(HEADER);
    out.push('\n');
    for point in &curve.points {
        let (min_u, max_u) = point.u_extrema();
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}\n",
            point.xi,
            point.mu,
            point.u0(),
            point.du0(),
            min_u,
            max_u,
            point.residual,
            point.newton_iters_used
        ));
    }
    out
}

pub fn write(path: &Path, curve: &SolutionCurve) -> Result<(), CliError> {
    std::fs::write(path, render(curve))
        .map_err(|err| CliError::Config(format!("cannot write {}: {err}", path.display())))
}

pub fn read(path: &Path) -> Result<Vec<Row>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|err| CliError::Config(format!("cannot read {}: {err}", path.display())))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header.trim() == HEADER => {}
        other => {
            return Err(CliError::Config(format!(
                "{}: expected header `{HEADER}`, found {:?}",
                path.display(),
                other.unwrap_or_default()
            )))
        }
    }
    let mut rows = Vec::new();
    for (index, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(CliError::Config(format!(
                "{} line {}: expected 8 fields, found {}",
                path.display(),
                index + 2,
                fields.len()
            )));
        }
        let number = |i: usize| -> Result<f64, CliError> {
            fields[i].trim().parse::<f64>().map_err(|err| {
                CliError::Config(format!(
                    "{} line {} field {}: {err}",
                    path.display(),
                    index + 2,
                    i + 1
                ))
            })
        };
        rows.push(Row {
            xi: number(0)?,
            mu: number(1)?,
            u0: number(2)?,
            du0: number(3)?,
            min_u: number(4)?,
            max_u: number(5)?,
            residual: number(6)?,
            newton_iters_used: fields[7].trim().parse().map_err(|err| {
                CliError::Config(format!("{} line {}: {err}", path.display(), index + 2))
            })?,
        });
    }
    Ok(rows)
}
