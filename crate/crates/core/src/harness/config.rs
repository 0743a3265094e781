//! TOML experiment configuration.
//!
//! ```toml
//! seed = 7
//! theta0 = [0.3]
//! n_list = [100, 1000, 10000]
//! replications = 20
//! resolution = 101
//!
//! [system]
//! family = "flip2"
//! box = [[0.01, 0.99]]
//!
//! [observation]
//! kind = "gaussian"
//! means = [0.0, 1.0]
//! std = 0.5
//! ```
//!
//! See the README for every key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::family::{ConfiguredFamily, HiddenSpec, ModelFamily, ObservationSpec, Scalar};
use crate::inference::{EquivalenceClass, Symmetry, DEFAULT_REFINE_ITERATIONS, DEFAULT_RESOLUTION};
use crate::likelihood::DEFAULT_MC_SAMPLES;
use crate::systems::{ParameterBox, ParameterPoint, TabulatedPotential, TransitionStructure};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(usize),
    Many(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: u64,
    theta0: Vec<f64>,
    n_list: Vec<usize>,
    #[serde(default = "one")]
    replications: usize,
    resolution: Option<OneOrMany>,
    refine_iterations: Option<usize>,
    mc_samples: Option<usize>,
    output: Option<PathBuf>,
    system: RawSystem,
    observation: RawObservation,
    equivalence: Option<RawEquivalence>,
    verify: Option<VerifySettings>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    family: String,
    #[serde(rename = "box")]
    bounds: Vec<[f64; 2]>,
    allowed: Option<Vec<Vec<u8>>>,
    table: Option<Vec<Vec<f64>>>,
    thetas: Option<Vec<f64>>,
    tables: Option<Vec<Vec<Vec<f64>>>>,
    matrix: Option<Vec<Vec<f64>>>,
    coding_depth: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObservation {
    kind: String,
    means: Option<Vec<f64>>,
    std: Option<f64>,
    std_param: Option<usize>,
    scale: Option<f64>,
    scale_param: Option<usize>,
    mean_scale_param: Option<usize>,
    matrix: Option<Vec<Vec<f64>>>,
    crossover: Option<f64>,
    crossover_param: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawReflect {
    coord: usize,
    center: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEquivalence {
    representatives: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    reflect: Vec<RawReflect>,
    #[serde(default)]
    swap: Vec<[usize; 2]>,
}

/// Settings of the `verify-conditions` checks. Every key is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySettings {
    /// Alternative parameter for the identifiability test; omitted means
    /// the S6 entry is not applicable.
    pub theta: Option<Vec<f64>>,
    /// Half-width of the neighbourhood `U` around `theta0`, per coordinate.
    pub neighbourhood_radius: f64,
    /// Points of `U` along each coordinate axis.
    pub neighbourhood_points: usize,
    pub m: usize,
    pub ell: usize,
    pub block_n: usize,
    pub block_reps: usize,
    pub lags: Vec<usize>,
    pub ergodicity_n: usize,
    pub integrability_reps: usize,
    pub identifiability_n: usize,
    pub identifiability_reps: usize,
    pub continuity_resolution: usize,
    pub continuity_n: usize,
    pub s5_instances: usize,
    pub s5_m: usize,
    pub s5_blocks: usize,
    pub ld_delta: f64,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            theta: None,
            neighbourhood_radius: 0.02,
            neighbourhood_points: 5,
            m: 20,
            ell: 1,
            block_n: 10_000,
            block_reps: 30,
            lags: vec![1, 2, 5, 10, 20],
            ergodicity_n: 20_000,
            integrability_reps: 2_000,
            identifiability_n: 1_000,
            identifiability_reps: 200,
            continuity_resolution: 21,
            continuity_n: 1_000,
            s5_instances: 100,
            s5_m: 2,
            s5_blocks: 3,
            ld_delta: 0.1,
        }
    }
}

/// A validated experiment. Defaults are filled in, so serializing it gives
/// the canonical form that the config hash is computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub theta0: ParameterPoint,
    pub n_list: Vec<usize>,
    pub replications: usize,
    pub resolution: Vec<usize>,
    pub refine_iterations: usize,
    pub mc_samples: usize,
    pub family: ConfiguredFamily,
    pub equivalence: EquivalenceClass,
    pub verify: VerifySettings,
    /// Default output directory; not part of the hash.
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

struct Source<'a> {
    text: &'a str,
}

impl Source<'_> {
    /// Line number of `key` inside `[section]` (top level when empty).
    fn line_of(&self, section: &str, key: &str) -> Option<usize> {
        let mut current = String::new();
        for (i, line) in self.text.lines().enumerate() {
            let t = line.trim();
            if let Some(h) = t.strip_prefix('[').and_then(|h| h.strip_suffix(']')) {
                current = h.trim().to_string();
                continue;
            }
            if current == section {
                if let Some(rest) = t.strip_prefix(key) {
                    if rest.trim_start().starts_with('=') {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    fn error(&self, section: &str, key: &str, message: impl std::fmt::Display) -> Error {
        let field = if section.is_empty() {
            key.to_string()
        } else {
            format!("{section}.{key}")
        };
        match self.line_of(section, key) {
            Some(line) => Error::Config(format!("line {line}, field `{field}`: {message}")),
            None => Error::Config(format!("field `{field}`: {message}")),
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
        let src = Source { text };

        let bounds: Vec<(f64, f64)> = raw.system.bounds.iter().map(|b| (b[0], b[1])).collect();
        let parameter_box = ParameterBox::new(bounds).map_err(|e| src.error("system", "box", e))?;
        let d = parameter_box.dim();
        if d > 3 {
            return Err(src.error("system", "box", "at most 3 parameter dimensions are supported"));
        }
        let theta0 = ParameterPoint::new(raw.theta0);
        if theta0.dim() != d {
            return Err(src.error("", "theta0", format!("has {} coordinates, the box has {d}", theta0.dim())));
        }
        if !parameter_box.contains(&theta0) {
            return Err(src.error("", "theta0", "lies outside the parameter box"));
        }
        if raw.n_list.is_empty() || raw.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err(src.error("", "n_list", "must be non-empty and strictly increasing"));
        }
        if raw.replications == 0 {
            return Err(src.error("", "replications", "must be >= 1"));
        }
        let resolution = match raw.resolution {
            None => vec![DEFAULT_RESOLUTION; d],
            Some(OneOrMany::One(r)) => vec![r; d],
            Some(OneOrMany::Many(v)) => v,
        };
        if resolution.len() != d || resolution.iter().any(|&r| r < 2) {
            return Err(src.error("", "resolution", format!("needs {d} entries, each >= 2")));
        }
        let mc_samples = raw.mc_samples.unwrap_or(DEFAULT_MC_SAMPLES);
        if mc_samples < 2 {
            return Err(src.error("", "mc_samples", "must be >= 2"));
        }

        let hidden = hidden_spec(&raw.system, &src)?;
        let observation = observation_spec(&raw.observation, &src)?;
        let family =
            ConfiguredFamily::new(hidden, observation, parameter_box).map_err(|e| src.error("system", "family", e))?;
        family.hidden(&theta0).map_err(|e| src.error("", "theta0", e))?;
        family.observation(&theta0).map_err(|e| src.error("", "theta0", e))?;

        let equivalence = match raw.equivalence {
            None => EquivalenceClass::singleton(theta0.clone()),
            Some(eq) => {
                let reps = eq
                    .representatives
                    .map(|r| r.into_iter().map(ParameterPoint::new).collect())
                    .unwrap_or_else(|| vec![theta0.clone()]);
                if reps.iter().any(|r: &ParameterPoint| r.dim() != d) {
                    return Err(src.error("equivalence", "representatives", format!("points must have {d} coordinates")));
                }
                let mut symmetries: Vec<Symmetry> = eq
                    .reflect
                    .iter()
                    .map(|r| Symmetry::Reflect {
                        coord: r.coord,
                        center: r.center,
                    })
                    .collect();
                symmetries.extend(eq.swap.iter().map(|s| Symmetry::Swap { i: s[0], j: s[1] }));
                EquivalenceClass::new(reps, symmetries).map_err(|e| src.error("equivalence", "reflect", e))?
            }
        };

        let verify = raw.verify.unwrap_or_default();
        if let Some(t) = &verify.theta {
            if t.len() != d || !family.parameter_box.contains(&ParameterPoint::new(t.clone())) {
                return Err(src.error("verify", "theta", "must be a point of the parameter box"));
            }
        }
        if verify.lags.is_empty() || verify.lags.contains(&0) || verify.lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(src.error("verify", "lags", "must be positive and strictly increasing"));
        }
        if verify.m == 0 || verify.neighbourhood_points == 0 || !(verify.neighbourhood_radius >= 0.0) {
            return Err(src.error("verify", "m", "m and neighbourhood_points must be >= 1, the radius >= 0"));
        }
        if verify.block_reps < 2 || verify.identifiability_reps == 0 || verify.integrability_reps < 100 {
            return Err(src.error(
                "verify",
                "block_reps",
                "need block_reps >= 2, identifiability_reps >= 1, integrability_reps >= 100",
            ));
        }

        Ok(Self {
            seed: raw.seed,
            theta0,
            n_list: raw.n_list,
            replications: raw.replications,
            resolution,
            refine_iterations: raw.refine_iterations.unwrap_or(DEFAULT_REFINE_ITERATIONS),
            mc_samples,
            family,
            equivalence,
            verify,
            output: raw.output,
        })
    }

    /// Canonical JSON: object keys sorted, defaults filled in.
    pub fn canonical_json(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        serde_json::to_string(&value).expect("value serializes")
    }

    /// Hex SHA-256 of [`Self::canonical_json`].
    pub fn hash(&self) -> String {
        sha256_hex(self.canonical_json().as_bytes())
    }

    /// Neighbourhood `U` of `theta0`: points along each axis within the
    /// verify radius, clipped to the box, `theta0` first.
    pub fn neighbourhood(&self) -> Vec<ParameterPoint> {
        let v = &self.verify;
        let mut points = vec![self.theta0.clone()];
        for i in 0..self.theta0.dim() {
            for k in 0..v.neighbourhood_points {
                let offset = if v.neighbourhood_points == 1 {
                    0.0
                } else {
                    -v.neighbourhood_radius + 2.0 * v.neighbourhood_radius * k as f64 / (v.neighbourhood_points - 1) as f64
                };
                let mut p = self.theta0.clone();
                p.0[i] += offset;
                let p = self.family.parameter_box.project(&p);
                if !points.iter().any(|q| q.distance(&p) <= 1e-12) {
                    points.push(p);
                }
            }
        }
        points
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn require<'a, T>(value: &'a Option<T>, src: &Source<'_>, section: &str, key: &str, why: &str) -> Result<&'a T> {
    value.as_ref().ok_or_else(|| src.error(section, key, format!("is required {why}")))
}

fn hidden_spec(raw: &RawSystem, src: &Source<'_>) -> Result<HiddenSpec> {
    let structure = |why: &str| -> Result<TransitionStructure> {
        let rows = require(&raw.allowed, src, "system", "allowed", why)?;
        TransitionStructure::from_integers(rows).map_err(|e| src.error("system", "allowed", e))
    };
    Ok(match raw.family.as_str() {
        "flip2" => HiddenSpec::Flip2,
        "bernoulli" => HiddenSpec::Bernoulli,
        "potential-linear" => {
            let why = "for family potential-linear";
            let structure = structure(why)?;
            let table = require(&raw.table, src, "system", "table", why)?.clone();
            check_square(&table, structure.size()).map_err(|e| src.error("system", "table", e))?;
            HiddenSpec::PotentialLinear { structure, table }
        }
        "potential-table" => {
            let why = "for family potential-table";
            let structure = structure(why)?;
            let thetas = require(&raw.thetas, src, "system", "thetas", why)?.clone();
            let tables = require(&raw.tables, src, "system", "tables", why)?.clone();
            for t in &tables {
                check_square(t, structure.size()).map_err(|e| src.error("system", "tables", e))?;
            }
            HiddenSpec::PotentialTable {
                structure,
                potential: TabulatedPotential { thetas, tables },
            }
        }
        "markov" => HiddenSpec::Markov {
            matrix: require(&raw.matrix, src, "system", "matrix", "for family markov")?.clone(),
        },
        "doubling" => HiddenSpec::Doubling {
            coding_depth: raw.coding_depth.unwrap_or(crate::systems::F64_ORBIT_DIGITS),
        },
        other => {
            return Err(src.error(
                "system",
                "family",
                format!("unknown family `{other}` (expected flip2, bernoulli, potential-linear, potential-table, markov or doubling)"),
            ))
        }
    })
}

fn check_square(table: &[Vec<f64>], size: usize) -> std::result::Result<(), String> {
    if table.len() != size || table.iter().any(|r| r.len() != size) {
        return Err(format!("must be a {size} x {size} table"));
    }
    Ok(())
}

fn scalar(fixed: Option<f64>, param: Option<usize>, src: &Source<'_>, key: &str) -> Result<Scalar> {
    match (fixed, param) {
        (Some(v), None) => Ok(Scalar::Fixed(v)),
        (None, Some(i)) => Ok(Scalar::Theta(i)),
        (Some(_), Some(_)) => Err(src.error("observation", key, format!("give either {key} or {key}_param, not both"))),
        (None, None) => Err(src.error("observation", key, format!("{key} or {key}_param is required"))),
    }
}

fn observation_spec(raw: &RawObservation, src: &Source<'_>) -> Result<ObservationSpec> {
    let means = || require(&raw.means, src, "observation", "means", "for continuous noise").cloned();
    let mean_scale = raw.mean_scale_param.map(Scalar::Theta);
    Ok(match raw.kind.as_str() {
        "gaussian" => ObservationSpec::Gaussian {
            means: means()?,
            mean_scale,
            std: scalar(raw.std, raw.std_param, src, "std")?,
        },
        "laplace" => ObservationSpec::Laplace {
            means: means()?,
            mean_scale,
            b: scalar(raw.scale, raw.scale_param, src, "scale")?,
        },
        "channel" => ObservationSpec::Channel {
            matrix: require(&raw.matrix, src, "observation", "matrix", "for a channel")?.clone(),
        },
        "bsc" => ObservationSpec::Bsc {
            crossover: scalar(raw.crossover, raw.crossover_param, src, "crossover")?,
        },
        other => {
            return Err(src.error(
                "observation",
                "kind",
                format!("unknown kind `{other}` (expected gaussian, laplace, channel or bsc)"),
            ))
        }
    })
}
