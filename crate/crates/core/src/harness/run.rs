//! The five CLI commands as library functions. Each produces named output
//! files in memory; [`write_run`] persists them with a manifest.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use super::config::ExperimentConfig;
use super::data_file::{read_observations, write_observations};
use super::manifest::RunManifest;
use super::tables::{surface_csv, sweep_csv};
use super::verify::verify_conditions;
use crate::error::{Error, Result};
use crate::family::ModelFamily;
use crate::inference::{
    consistency_sweep, grid_mle, refine_mle, summarize_sweep, cell_seed, GridOptions, LikelihoodEvaluator,
    LogLikelihoodSurface, SweepOptions,
};
use crate::likelihood::McOptions;
use crate::rng::child_seed;
use crate::simulate::{simulate, ObservationSequence, SequenceMetadata};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Mle,
    LikelihoodSurface,
    Consistency,
    VerifyConditions,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Mle => "mle",
            Command::LikelihoodSurface => "likelihood-surface",
            Command::Consistency => "consistency",
            Command::VerifyConditions => "verify-conditions",
        }
    }
}

/// Files produced by a command, and whether any check failed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    pub check_failures: Vec<String>,
}

impl RunOutput {
    fn new() -> Self {
        Self {
            files: Vec::new(),
            check_failures: Vec::new(),
        }
    }

    fn add(&mut self, name: &str, bytes: impl Into<Vec<u8>>) {
        self.files.push((name.to_string(), bytes.into()));
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text);
        Ok(())
    }
}

fn model_name(config: &ExperimentConfig) -> Result<String> {
    let obs = config.family.observation(&config.theta0)?;
    Ok(format!("{}/{}", config.family.name(), obs.name()))
}

fn grid_options(config: &ExperimentConfig) -> GridOptions {
    GridOptions {
        mc: McOptions {
            samples: config.mc_samples,
            seed: child_seed(config.seed, u64::MAX),
        },
    }
}

/// Data simulated for sweep cell `(n, 0)`; this is what `simulate` writes.
fn simulated_sequence(config: &ExperimentConfig, n: usize) -> Result<ObservationSequence> {
    let seed = cell_seed(config.seed, n, 0);
    let values = simulate(
        &config.family.hidden(&config.theta0)?,
        &config.family.observation(&config.theta0)?,
        n,
        seed,
    );
    Ok(ObservationSequence {
        values,
        metadata: SequenceMetadata {
            model: model_name(config)?,
            theta0: Some(config.theta0.coords().to_vec()),
            seed: Some(seed),
        },
    })
}

pub fn load_data(config: &ExperimentConfig, path: &Path) -> Result<ObservationSequence> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::DataFile {
        line: 0,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    let model = config.family.observation(&config.theta0)?;
    read_observations(&text, Some(&model))
}

pub fn simulate_command(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut out = RunOutput::new();
    for &n in &config.n_list {
        out.add(&format!("observations_n{n}.txt"), write_observations(&simulated_sequence(config, n)?));
    }
    Ok(out)
}

fn surface_for(config: &ExperimentConfig, y: &[f64]) -> Result<LogLikelihoodSurface> {
    grid_mle(&config.family, y, &config.resolution, grid_options(config))
}

fn surface_summary(surface: &LogLikelihoodSurface) -> serde_json::Value {
    json!({
        "n": surface.n,
        "resolution": surface.resolution,
        "points": surface.grid.len(),
        "argmax_index": surface.argmax_index,
        "argmax_point": surface.argmax_point,
        "argmax_value": surface.argmax_value,
        "slack": surface.slack,
    })
}

pub fn mle_command(config: &ExperimentConfig, data: &ObservationSequence) -> Result<RunOutput> {
    let mut out = RunOutput::new();
    let y = &data.values;
    let surface = match surface_for(config, y) {
        Ok(s) => s,
        Err(Error::AllDegenerate) => {
            out.check_failures.push(Error::AllDegenerate.to_string());
            out.add_json("estimate.json", &json!({ "error": Error::AllDegenerate.to_string() }))?;
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let evaluator = LikelihoodEvaluator {
        family: &config.family,
        y,
        mc: grid_options(config).mc,
    };
    let est = refine_mle(
        &surface,
        |p| evaluator.evaluate(p).unwrap_or(f64::NEG_INFINITY),
        config.refine_iterations,
    );
    out.add("surface.csv", surface_csv(&surface));
    out.add_json(
        "estimate.json",
        &json!({
            "theta_hat": est.theta,
            "loglik": est.value,
            "grid": surface_summary(&surface),
            "boundary_hit": est.boundary_hit,
            "slack": est.slack,
            "distance_to_class": crate::inference::equivalence_distance(&est.theta, &config.equivalence),
        }),
    )?;
    Ok(out)
}

pub fn surface_command(config: &ExperimentConfig, data: Option<&ObservationSequence>) -> Result<RunOutput> {
    let simulated;
    let seq = match data {
        Some(d) => d,
        None => {
            simulated = simulated_sequence(config, *config.n_list.last().expect("n_list is non-empty"))?;
            &simulated
        }
    };
    let mut out = RunOutput::new();
    match surface_for(config, &seq.values) {
        Ok(surface) => {
            out.add("surface.csv", surface_csv(&surface));
            out.add_json("surface_summary.json", &surface_summary(&surface))?;
        }
        Err(Error::AllDegenerate) => {
            out.check_failures.push(Error::AllDegenerate.to_string());
            out.add_json("surface_summary.json", &json!({ "error": Error::AllDegenerate.to_string() }))?;
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

pub fn consistency_command(config: &ExperimentConfig) -> Result<RunOutput> {
    let options = SweepOptions {
        resolution: config.resolution.clone(),
        refine_iterations: config.refine_iterations,
        grid: grid_options(config),
        record_timing: false,
    };
    let rows = consistency_sweep(
        &config.family,
        &config.theta0,
        &config.equivalence,
        &config.n_list,
        config.replications,
        config.seed,
        &options,
    )?;
    let summary = summarize_sweep(&rows);
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    let medians_decreasing = summary.windows(2).all(|w| w[1].median < w[0].median);
    let mut out = RunOutput::new();
    if failures == rows.len() {
        out.check_failures.push("every sweep cell failed".into());
    }
    out.add("sweep.csv", sweep_csv(&rows, config.theta0.dim()));
    out.add_json(
        "summary.json",
        &json!({
            "theta0": config.theta0,
            "equivalence_class": config.equivalence.orbit(),
            "per_n": summary,
            "failed_cells": failures,
            "medians_strictly_decreasing": medians_decreasing,
        }),
    )?;
    Ok(out)
}

pub fn verify_command(config: &ExperimentConfig) -> Result<RunOutput> {
    let report = verify_conditions(config)?;
    let mut out = RunOutput::new();
    for e in &report.entries {
        if e.status == super::verify::Status::Fail {
            out.check_failures.push(format!("{} ({}): {}", e.id, e.name, e.summary));
        }
    }
    out.add_json("conditions.json", &report)?;
    Ok(out)
}

pub fn run_command(config: &ExperimentConfig, command: Command, data: Option<&Path>) -> Result<RunOutput> {
    let data = data.map(|p| load_data(config, p)).transpose()?;
    match command {
        Command::Simulate => simulate_command(config),
        Command::Mle => {
            let data = data.ok_or_else(|| Error::Invalid("mle needs --data PATH".into()))?;
            mle_command(config, &data)
        }
        Command::LikelihoodSurface => surface_command(config, data.as_ref()),
        Command::Consistency => consistency_command(config),
        Command::VerifyConditions => verify_command(config),
    }
}

/// Write the output files, `config.json` and `manifest.json` into a fresh
/// subdirectory of `out`, named after the command, time and config hash.
pub fn write_run(out: &Path, command: Command, config: &ExperimentConfig, output: &RunOutput) -> Result<PathBuf> {
    let hash = config.hash();
    let manifest_probe = RunManifest::new(command.name(), &hash, config.seed, &[]);
    let stem = format!("{}-{}-{}", command.name(), manifest_probe.timestamp_unix, &hash[..12]);
    std::fs::create_dir_all(out)?;
    let mut dir = out.join(&stem);
    let mut k = 1;
    while dir.exists() {
        k += 1;
        dir = out.join(format!("{stem}-{k}"));
    }
    std::fs::create_dir(&dir)?;

    let mut files = output.files.clone();
    let mut canonical = config.canonical_json();
    canonical.push('\n');
    files.push(("config.json".into(), canonical.into_bytes()));
    for (name, bytes) in &files {
        std::fs::write(dir.join(name), bytes)?;
    }
    let manifest = RunManifest::new(command.name(), &hash, config.seed, &files);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(dir.join("manifest.json"), text)?;
    Ok(dir)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
seed = 11
theta0 = [0.3]
n_list = [50, 100]
replications = 2
resolution = 9

[system]
family = "flip2"
box = [[0.05, 0.95]]

[observation]
kind = "gaussian"
means = [0.0, 1.0]
std = 0.5
"#,
        )
        .unwrap()
    }

    #[test]
    fn simulate_writes_one_file_per_n() {
        let out = simulate_command(&config()).unwrap();
        let names: Vec<&str> = out.files.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["observations_n50.txt", "observations_n100.txt"]);
        let text = String::from_utf8(out.files[0].1.clone()).unwrap();
        assert_eq!(text.lines().count(), 52);
        assert!(text.starts_with("# model=flip2/gaussian theta0=0.3 seed="));
    }

    #[test]
    fn surface_rows_match_grid() {
        let c = config();
        let out = surface_command(&c, None).unwrap();
        let csv = String::from_utf8(out.files[0].1.clone()).unwrap();
        assert_eq!(csv.lines().count(), 2 + 9);
    }

    #[test]
    fn write_run_checksums() {
        let c = config();
        let dir = tempfile::tempdir().unwrap();
        let out = simulate_command(&c).unwrap();
        let run = write_run(dir.path(), Command::Simulate, &c, &out).unwrap();
        let manifest: RunManifest =
            serde_json::from_str(&std::fs::read_to_string(run.join("manifest.json")).unwrap()).unwrap();
        assert!(manifest.verify(&run).unwrap().is_empty());
        assert_eq!(manifest.files.len(), 3);
        let stored: ExperimentConfig =
            serde_json::from_str(&std::fs::read_to_string(run.join("config.json")).unwrap()).unwrap();
        assert_eq!(stored.hash(), manifest.config_hash);
        let again = write_run(dir.path(), Command::Simulate, &c, &out).unwrap();
        assert_ne!(run, again);
    }
}
