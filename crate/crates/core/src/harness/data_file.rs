//! Observation files: a metadata header line, then one observation per line.
//!
//! ```text
//! # model=flip2/gaussian theta0=0.3 seed=42 n=2
//! 0.1375
//! 1.02
//! -0.4
//! ```
//!
//! `theta0` is comma separated, or `none` for real data. Discrete
//! observations are written as integers.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::observation::ObservationModel;
use crate::simulate::{ObservationSequence, SequenceMetadata};

/// Serialize a sequence. Values use the shortest representation that
/// parses back to the same `f64`.
pub fn write_observations(seq: &ObservationSequence) -> String {
    let meta = &seq.metadata;
    let theta0 = match &meta.theta0 {
        Some(t) => t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
        None => "none".into(),
    };
    let seed = meta.seed.map_or("none".into(), |s| s.to_string());
    let mut out = format!("# model={} theta0={theta0} seed={seed} n={}\n", meta.model, seq.n());
    for v in &seq.values {
        let _ = writeln!(out, "{v}");
    }
    out
}

fn header_error(message: impl Into<String>) -> Error {
    Error::DataFile {
        line: 1,
        message: message.into(),
    }
}

/// Parse a file produced by [`write_observations`]. When `model` is given,
/// every value must be a valid observation of it.
pub fn read_observations(text: &str, model: Option<&ObservationModel>) -> Result<ObservationSequence> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| header_error("empty file"))?;
    let fields = header
        .strip_prefix('#')
        .ok_or_else(|| header_error("missing `# model=... theta0=... seed=... n=...` header"))?;
    let mut name = None;
    let mut theta0 = None;
    let mut seed = None;
    let mut n = None;
    for field in fields.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| header_error(format!("header field `{field}` is not key=value")))?;
        match key {
            "model" => name = Some(value.to_string()),
            "theta0" if value == "none" => theta0 = Some(None),
            "theta0" => {
                let t = value
                    .split(',')
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| header_error(format!("bad theta0 `{value}`")))?;
                theta0 = Some(Some(t));
            }
            "seed" if value == "none" => seed = Some(None),
            "seed" => seed = Some(Some(value.parse::<u64>().map_err(|_| header_error(format!("bad seed `{value}`")))?)),
            "n" => n = Some(value.parse::<usize>().map_err(|_| header_error(format!("bad n `{value}`")))?),
            other => return Err(header_error(format!("unknown header field `{other}`"))),
        }
    }
    let (Some(name), Some(theta0), Some(seed), Some(n)) = (name, theta0, seed, n) else {
        return Err(header_error("header needs model, theta0, seed and n"));
    };

    let mut values = Vec::with_capacity(n + 1);
    for (i, line) in lines.enumerate() {
        let line_no = i + 2;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        let v: f64 = t.parse().map_err(|_| Error::DataFile {
            line: line_no,
            message: format!("`{t}` is not a number"),
        })?;
        if !v.is_finite() {
            return Err(Error::DataFile {
                line: line_no,
                message: format!("`{t}` is not finite"),
            });
        }
        if let Some(m) = model {
            if !m.is_valid_observation(v) {
                return Err(Error::DataFile {
                    line: line_no,
                    message: format!("`{t}` is not a valid {} observation", m.name()),
                });
            }
        }
        values.push(v);
    }
    if values.len() != n + 1 {
        return Err(header_error(format!("header says n={n} ({} values) but the file has {}", n + 1, values.len())));
    }
    Ok(ObservationSequence {
        values,
        metadata: SequenceMetadata {
            model: name,
            theta0,
            seed,
        },
    })
}
