//! CSV tables for likelihood surfaces and consistency sweeps.
//!
//! Both tables start with a `# schema=<name> version=1` line. Numbers use the
//! shortest round-trip representation, so reading a table back gives the
//! exact values that were written.

use std::fmt::Write as _;

use crate::error::{invalid, Result};
use crate::inference::{LogLikelihoodSurface, SurfacePoint, SweepRow};
use crate::systems::ParameterPoint;

pub const SCHEMA_VERSION: u32 = 1;

fn schema_line(name: &str) -> String {
    format!("# schema={name} version={SCHEMA_VERSION}\n")
}

fn theta_columns(prefix: &str, d: usize) -> String {
    (0..d).map(|i| format!("{prefix}_{i}")).collect::<Vec<_>>().join(",")
}

fn parse_f64(field: &str, line: usize) -> Result<f64> {
    field
        .parse()
        .map_err(|_| invalid(format!("line {line}: `{field}` is not a number")))
}

fn data_lines<'a>(text: &'a str, schema: &str) -> Result<(Vec<&'a str>, impl Iterator<Item = (usize, &'a str)>)> {
    let mut lines = text.lines().enumerate();
    let expected = schema_line(schema);
    match lines.next() {
        Some((_, l)) if l == expected.trim_end() => {}
        _ => return Err(invalid(format!("missing `{}` line", expected.trim_end()))),
    }
    let header = lines
        .next()
        .map(|(_, h)| h.split(',').collect())
        .ok_or_else(|| invalid("missing column header"))?;
    Ok((header, lines.map(|(i, l)| (i + 1, l))))
}

pub fn surface_csv(surface: &LogLikelihoodSurface) -> String {
    let d = surface.parameter_box.dim();
    let mut out = schema_line("surface");
    let _ = writeln!(out, "{},value", theta_columns("theta", d));
    for p in &surface.grid {
        for v in p.theta.coords() {
            let _ = write!(out, "{v},");
        }
        let _ = writeln!(out, "{}", p.value);
    }
    out
}

pub fn read_surface_csv(text: &str) -> Result<Vec<SurfacePoint>> {
    let (header, rows) = data_lines(text, "surface")?;
    let d = header.len().saturating_sub(1);
    rows.map(|(line, row)| {
        let fields: Vec<&str> = row.split(',').collect();
        if fields.len() != d + 1 {
            return Err(invalid(format!("line {line}: expected {} fields", d + 1)));
        }
        let theta = fields[..d].iter().map(|f| parse_f64(f, line)).collect::<Result<Vec<_>>>()?;
        Ok(SurfacePoint {
            theta: ParameterPoint::new(theta),
            value: parse_f64(fields[d], line)?,
        })
    })
    .collect()
}

/// Sweep table. Failed cells have empty `theta_hat` fields and the error
/// message (commas replaced by semicolons) in the last column.
pub fn sweep_csv(rows: &[SweepRow], d: usize) -> String {
    let mut out = schema_line("sweep");
    let _ = writeln!(out, "n,replication,{},distance,loglik,wall_ms,error", theta_columns("theta_hat", d));
    for r in rows {
        let _ = write!(out, "{},{},", r.n, r.replication);
        match &r.theta_hat {
            Some(t) => t.coords().iter().for_each(|v| {
                let _ = write!(out, "{v},");
            }),
            None => out.push_str(&",".repeat(d)),
        }
        let err = r.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
        let _ = writeln!(out, "{},{},{},{err}", r.distance, r.loglik, r.wall_ms);
    }
    out
}

pub fn read_sweep_csv(text: &str) -> Result<Vec<SweepRow>> {
    let (header, rows) = data_lines(text, "sweep")?;
    let d = header.len().saturating_sub(6);
    rows.map(|(line, row)| {
        let f: Vec<&str> = row.split(',').collect();
        if f.len() != d + 6 {
            return Err(invalid(format!("line {line}: expected {} fields", d + 6)));
        }
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| invalid(format!("line {line}: bad integer `{s}`")));
        let theta_hat = if f[2..2 + d].iter().all(|s| s.is_empty()) {
            None
        } else {
            Some(ParameterPoint::new(
                f[2..2 + d].iter().map(|s| parse_f64(s, line)).collect::<Result<Vec<_>>>()?,
            ))
        };
        let error = f[d + 5];
        Ok(SweepRow {
            n: parse_usize(f[0])?,
            replication: parse_usize(f[1])?,
            theta_hat,
            distance: parse_f64(f[d + 2], line)?,
            loglik: parse_f64(f[d + 3], line)?,
            wall_ms: parse_f64(f[d + 4], line)?,
            error: (!error.is_empty()).then(|| error.to_string()),
        })
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::ParameterBox;

    #[test]
    fn surface_round_trip() {
        let grid = vec![
            SurfacePoint {
                theta: ParameterPoint::new(vec![0.1, 0.2]),
                value: -1.0 / 3.0,
            },
            SurfacePoint {
                theta: ParameterPoint::new(vec![0.1, 0.7]),
                value: f64::NEG_INFINITY,
            },
        ];
        let s = LogLikelihoodSurface {
            resolution: vec![1, 2],
            parameter_box: ParameterBox::new(vec![(0.1, 0.1), (0.2, 0.7)]).unwrap(),
            argmax_point: grid[0].theta.clone(),
            argmax_value: grid[0].value,
            grid,
            argmax_index: 0,
            slack: 0.0,
            n: 3,
        };
        let text = surface_csv(&s);
        assert!(text.starts_with("# schema=surface version=1\ntheta_0,theta_1,value\n"));
        assert_eq!(read_surface_csv(&text).unwrap(), s.grid);
    }

    #[test]
    fn sweep_round_trip() {
        let rows = vec![
            SweepRow {
                n: 100,
                replication: 0,
                theta_hat: Some(ParameterPoint::scalar(0.30000000000000004)),
                distance: 4e-17,
                loglik: -1.25,
                wall_ms: 0.0,
                error: None,
            },
            SweepRow {
                n: 100,
                replication: 1,
                theta_hat: None,
                distance: f64::NAN,
                loglik: f64::NAN,
                wall_ms: 0.0,
                error: Some("every grid point has zero likelihood".into()),
            },
        ];
        let text = sweep_csv(&rows, 1);
        let back = read_sweep_csv(&text).unwrap();
        assert_eq!(back[0], rows[0]);
        assert!(back[1].distance.is_nan() && back[1].theta_hat.is_none());
        assert_eq!(back[1].error, rows[1].error);
        assert_eq!(sweep_csv(&back, 1), text);
    }

    #[test]
    fn rejects_wrong_schema() {
        assert!(read_sweep_csv("n,replication\n").is_err());
        assert!(read_surface_csv("# schema=sweep version=1\ntheta_0,value\n").is_err());
    }
}
