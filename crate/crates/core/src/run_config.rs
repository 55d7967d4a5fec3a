//! Run configuration and experiment dispatch for the command-line front end.
//!
//! A configuration is a flat list of `key = value` pairs. Files use one
//! pair per line with `#` comments; command-line flags are appended after
//! the file so they override it. Every key is validated before any
//! computation starts and unknown keys are rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::excitation::CouplingConfig;
use crate::experiments::{self, output, ExperimentSpec};
use crate::optimizer::{Objective, OptimizerBudget, SearchMode};

/// Keys accepted in configuration files and as `--key` flags.
pub const KEYS: [&str; 20] = [
    "experiment",
    "preset",
    "g",
    "T",
    "N",
    "objective",
    "n-min",
    "n-max",
    "restarts",
    "max-evals",
    "tol",
    "seed",
    "out",
    "theta-steps",
    "phi",
    "k",
    "warm-start",
    "mode",
    "grid-theta",
    "grid-phi",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    QuantityVsN,
    UniformSweep,
    Distinguishability,
    DeltaD,
    Table,
    ContinuousLimit,
}

impl Experiment {
    pub const ALL: [Experiment; 6] = [
        Experiment::QuantityVsN,
        Experiment::UniformSweep,
        Experiment::Distinguishability,
        Experiment::DeltaD,
        Experiment::Table,
        Experiment::ContinuousLimit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::QuantityVsN => "quantity-vs-n",
            Experiment::UniformSweep => "uniform-sweep",
            Experiment::Distinguishability => "distinguishability",
            Experiment::DeltaD => "delta-d",
            Experiment::Table => "table",
            Experiment::ContinuousLimit => "continuous-limit",
        }
    }

    fn needs_objective(self) -> bool {
        matches!(self, Experiment::QuantityVsN | Experiment::DeltaD)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Experiment::ALL.iter().map(|e| e.as_str()).collect();
                format!(
                    "unknown experiment '{s}', expected one of {}",
                    names.join(", ")
                )
            })
    }
}

/// Failure of a run, mapped onto the process exit code.
#[derive(Debug)]
pub enum RunError {
    /// Invalid or incomplete configuration.
    Config { field: String, message: String },
    /// Parameters outside the model's numeric domain.
    Numeric {
        field: Option<String>,
        source: Error,
    },
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl RunError {
    fn config(field: &str, message: impl Into<String>) -> Self {
        RunError::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    fn numeric(field: Option<&str>, source: Error) -> Self {
        RunError::Numeric {
            field: field.map(str::to_string),
            source,
        }
    }

    fn io(path: &Path, source: impl Into<std::io::Error>) -> Self {
        RunError::Io {
            path: path.to_path_buf(),
            source: source.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config { .. } => 2,
            RunError::Numeric { .. } => 3,
            RunError::Io { .. } => 1,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config { field, message } => {
                write!(f, "invalid config field '{field}': {message}")
            }
            RunError::Numeric {
                field: Some(field),
                source,
            } => write!(f, "field '{field}': {source}"),
            RunError::Numeric {
                field: None,
                source,
            } => write!(f, "{source}"),
            RunError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for RunError {}

/// A validated run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    /// `strong`, `weak`, or `custom` once any of `g`, `T`, `N` is overridden.
    pub preset: String,
    pub coupling: CouplingConfig,
    pub objective: Option<Objective>,
    pub n_min: usize,
    pub n_max: usize,
    pub budget: OptimizerBudget,
    pub out: PathBuf,
    pub theta_steps: usize,
    pub phi: f64,
    /// Rate constant; `g^2 T / N` for curves and 3 for the limit study when unset.
    pub k: Option<f64>,
    pub warm_start: bool,
    /// Time used by the limit study: `T` when given explicitly, else 1.
    pub limit_time: f64,
    pairs: BTreeMap<String, String>,
}

/// Splits `key = value` lines, skipping blanks and `#` comments.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>, RunError> {
    let mut pairs = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            RunError::config(
                &format!("line {}", lineno + 1),
                format!("expected key = value, got '{line}'"),
            )
        })?;
        pairs.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(pairs)
}

fn canonical_key(key: &str) -> Result<&'static str, RunError> {
    let key = key.trim_start_matches("--").replace('_', "-");
    let found = match key.as_str() {
        "t" => Some("T"),
        "n" => Some("N"),
        k => KEYS.iter().copied().find(|known| *known == k),
    };
    found.ok_or_else(|| {
        RunError::config(
            &key,
            format!("unknown key, expected one of {}", KEYS.join(", ")),
        )
    })
}

fn parse_field<T: FromStr>(
    pairs: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, RunError>
where
    T::Err: fmt::Display,
{
    pairs
        .get(key)
        .map(|v| {
            v.parse::<T>()
                .map_err(|e| RunError::config(key, format!("cannot parse '{v}': {e}")))
        })
        .transpose()
}

fn parse_bool(pairs: &BTreeMap<String, String>, key: &str) -> Result<bool, RunError> {
    match pairs.get(key).map(String::as_str) {
        None => Ok(false),
        Some("true" | "yes" | "1" | "on") => Ok(true),
        Some("false" | "no" | "0" | "off") => Ok(false),
        Some(v) => Err(RunError::config(
            key,
            format!("expected a boolean, got '{v}'"),
        )),
    }
}

impl RunConfig {
    /// Builds a configuration from ordered pairs; later pairs win.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(
        pairs: impl IntoIterator<Item = (K, V)>,
    ) -> Result<Self, RunError> {
        let mut map = BTreeMap::new();
        for (k, v) in pairs {
            map.insert(
                canonical_key(k.as_ref())?.to_string(),
                v.as_ref().trim().to_string(),
            );
        }
        Self::from_map(map)
    }

    /// Reads a configuration file and applies `overrides` on top.
    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self, RunError> {
        let text = fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        let mut pairs = parse_pairs(&text)?;
        pairs.extend(overrides.iter().cloned());
        Self::from_pairs(pairs)
    }

    fn from_map(map: BTreeMap<String, String>) -> Result<Self, RunError> {
        let experiment: Experiment = parse_field(&map, "experiment")?
            .ok_or_else(|| RunError::config("experiment", "missing"))?;

        let preset = map.get("preset").map(String::as_str).unwrap_or("strong");
        let base = match preset {
            "strong" => CouplingConfig::strong(),
            "weak" => CouplingConfig::weak(),
            other => {
                return Err(RunError::config(
                    "preset",
                    format!("unknown preset '{other}', expected strong or weak"),
                ))
            }
        };
        let g: Option<f64> = parse_field(&map, "g")?;
        let t: Option<f64> = parse_field(&map, "T")?;
        let n_total: Option<usize> = parse_field(&map, "N")?;
        let custom = g.is_some() || t.is_some() || n_total.is_some();
        let coupling = if custom {
            let field = ["g", "T", "N"].into_iter().find(|k| map.contains_key(*k));
            CouplingConfig::new(
                g.unwrap_or(base.g()),
                t.unwrap_or(base.total_time()),
                n_total.unwrap_or(base.n_total()),
            )
            .map_err(|e| RunError::numeric(field, e))?
        } else {
            base
        };
        let preset = if custom {
            "custom".to_string()
        } else {
            preset.to_string()
        };

        let objective: Option<Objective> = parse_field(&map, "objective")?;
        if experiment.needs_objective() && objective.is_none() {
            return Err(RunError::config(
                "objective",
                format!("required by experiment '{experiment}'"),
            ));
        }

        let limit = experiment == Experiment::ContinuousLimit;
        let n_min: usize = parse_field(&map, "n-min")?.unwrap_or(if limit { 64 } else { 0 });
        let n_max: usize =
            parse_field(&map, "n-max")?.unwrap_or(if limit { 4096 } else { coupling.n_total() });
        if n_min > n_max {
            return Err(RunError::config(
                "n-min",
                format!("{n_min} exceeds n-max {n_max}"),
            ));
        }
        if !limit && n_max > coupling.n_total() {
            return Err(RunError::config(
                "n-max",
                format!(
                    "{n_max} exceeds the ancilla count N = {}",
                    coupling.n_total()
                ),
            ));
        }
        if limit && n_min == 0 {
            return Err(RunError::config("n-min", "limit study needs N >= 1"));
        }

        let defaults = OptimizerBudget::default();
        let mode = match map.get("mode").map(String::as_str) {
            None | Some("joint") => SearchMode::Joint,
            Some("greedy") => SearchMode::Greedy,
            Some(other) => {
                return Err(RunError::config(
                    "mode",
                    format!("expected joint or greedy, got '{other}'"),
                ))
            }
        };
        let budget = OptimizerBudget {
            restarts: parse_field(&map, "restarts")?.unwrap_or(defaults.restarts),
            max_evals: parse_field(&map, "max-evals")?.unwrap_or(defaults.max_evals),
            tol: parse_field(&map, "tol")?.unwrap_or(defaults.tol),
            seed: parse_field(&map, "seed")?.unwrap_or(defaults.seed),
            grid_theta: parse_field(&map, "grid-theta")?.unwrap_or(defaults.grid_theta),
            grid_phi: parse_field(&map, "grid-phi")?.unwrap_or(defaults.grid_phi),
            mode,
        };
        budget
            .validate()
            .map_err(|e| RunError::config("restarts/max-evals/tol/grid", e.to_string()))?;

        let theta_steps: usize = parse_field(&map, "theta-steps")?.unwrap_or(180);
        if theta_steps == 0 {
            return Err(RunError::config("theta-steps", "must be at least 1"));
        }
        let phi: f64 = parse_field(&map, "phi")?.unwrap_or(0.0);
        if !phi.is_finite() {
            return Err(RunError::config("phi", "must be finite"));
        }
        let k: Option<f64> = parse_field(&map, "k")?;
        if let Some(k) = k {
            if !(k >= 0.0 && k.is_finite()) {
                return Err(RunError::config(
                    "k",
                    format!("must be finite and >= 0, got {k}"),
                ));
            }
        }

        Ok(Self {
            experiment,
            preset,
            coupling,
            objective,
            n_min,
            n_max,
            budget,
            out: parse_field(&map, "out")?.unwrap_or_else(|| PathBuf::from("results")),
            theta_steps,
            phi,
            k,
            warm_start: parse_bool(&map, "warm-start")?,
            limit_time: t.unwrap_or(1.0),
            pairs: map,
        })
    }

    /// The configuration as a replayable `key = value` file.
    pub fn to_config_text(&self) -> String {
        self.pairs
            .iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Path of the CSV file this run writes.
    pub fn output_path(&self) -> PathBuf {
        let dir = self.out.join(self.experiment.as_str());
        let stem = match self.experiment {
            Experiment::Table => "states".to_string(),
            Experiment::ContinuousLimit => "gap".to_string(),
            _ => match self.objective {
                Some(o) => format!("{}-{}", self.preset, o.as_str()),
                None => self.preset.clone(),
            },
        };
        dir.join(format!("{stem}.csv"))
    }
}

/// Runs the configured experiment, writes its CSV file and records the run
/// in `manifest.json` next to it. Returns the CSV path.
pub fn execute(config: &RunConfig) -> Result<PathBuf, RunError> {
    let started = Instant::now();
    let path = config.output_path();
    let dir = path.parent().expect("output path has a directory");
    fs::create_dir_all(dir).map_err(|e| RunError::io(dir, e))?;

    let cfg = &config.coupling;
    let tmp = path.with_extension("csv.partial");
    let file = File::create(&tmp).map_err(|e| RunError::io(&tmp, e))?;
    let out = BufWriter::new(file);
    let numeric = |e: Error| RunError::numeric(None, e);
    let written = match config.experiment {
        Experiment::QuantityVsN => {
            let mut spec = ExperimentSpec::new(
                config.experiment.as_str(),
                *cfg,
                config.objective.expect("validated"),
            );
            spec.n_range = config.n_min..=config.n_max;
            spec.budget = config.budget;
            spec.k = config.k;
            spec.warm_start = config.warm_start;
            output::write_curve(
                out,
                &experiments::run_quantity_vs_n(&spec).map_err(numeric)?,
            )
        }
        Experiment::UniformSweep => {
            let cells =
                experiments::run_uniform_sweep(cfg, config.n_max, config.theta_steps, config.phi)
                    .map_err(numeric)?;
            output::write_sweep(out, &cells)
        }
        Experiment::Distinguishability => output::write_profile(
            out,
            &experiments::run_distinguishability_profile(cfg).map_err(numeric)?,
        ),
        Experiment::DeltaD => {
            let mut spec = ExperimentSpec::new(
                config.experiment.as_str(),
                *cfg,
                config.objective.expect("validated"),
            );
            spec.n_range = config.n_min.max(1)..=config.n_max;
            spec.budget = config.budget;
            spec.warm_start = config.warm_start;
            let results = experiments::optimize_curve(&spec).map_err(numeric)?;
            output::write_delta_d(
                out,
                &experiments::delta_d_rows(cfg, &results).map_err(numeric)?,
            )
        }
        Experiment::Table => output::write_table(
            out,
            &experiments::run_table_states(&config.budget).map_err(numeric)?,
        ),
        Experiment::ContinuousLimit => {
            let ns = experiments::doubling_sequence(config.n_min, config.n_max);
            let rows = experiments::run_continuous_limit_convergence(
                config.k.unwrap_or(3.0),
                config.limit_time,
                &ns,
            )
            .map_err(|e| RunError::numeric(Some("k/T/n-min"), e))?;
            output::write_limit(out, &rows)
        }
    };
    written.map_err(|e| RunError::io(&tmp, e))?;
    fs::rename(&tmp, &path).map_err(|e| RunError::io(&path, e))?;

    write_manifest(config, &path, started.elapsed().as_secs_f64())?;
    Ok(path)
}

fn write_manifest(config: &RunConfig, csv_path: &Path, wall_seconds: f64) -> Result<(), RunError> {
    let manifest_path = csv_path.with_file_name("manifest.json");
    let mut manifest: Value = match fs::read_to_string(&manifest_path) {
        Ok(text) => serde_json::from_str(&text).unwrap_or_else(|_| json!({})),
        Err(_) => json!({}),
    };
    let cfg = &config.coupling;
    let entry = json!({
        "experiment": config.experiment,
        "preset": config.preset,
        "coupling": {
            "g": cfg.g(),
            "T": cfg.total_time(),
            "N": cfg.n_total(),
            "dt": cfg.dt(),
            "a": cfg.a(),
            "k": cfg.k(),
        },
        "objective": config.objective,
        "n_min": config.n_min,
        "n_max": config.n_max,
        "budget": config.budget,
        "seed": config.budget.seed,
        "theta_steps": config.theta_steps,
        "phi": config.phi,
        "k": config.k,
        "warm_start": config.warm_start,
        "config": config.to_config_text(),
        "version": env!("CARGO_PKG_VERSION"),
        "wall_seconds": wall_seconds,
        "threads": rayon::current_num_threads(),
    });
    let name = csv_path
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or_default()
        .to_string();
    if !manifest.is_object() {
        manifest = json!({});
    }
    let root = manifest.as_object_mut().expect("object");
    root.insert("package".into(), json!(env!("CARGO_PKG_NAME")));
    let runs = root.entry("runs").or_insert_with(|| json!({}));
    if !runs.is_object() {
        *runs = json!({});
    }
    runs.as_object_mut().expect("object").insert(name, entry);

    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&manifest_path, text + "\n").map_err(|e| RunError::io(&manifest_path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pairs: &[(&str, &str)]) -> Result<RunConfig, RunError> {
        RunConfig::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn parses_file_format() {
        let pairs = parse_pairs("# comment\nexperiment = table\n\n seed=7 # trailing\n").unwrap();
        assert_eq!(
            pairs,
            vec![
                ("experiment".into(), "table".into()),
                ("seed".into(), "7".into())
            ]
        );
        assert!(parse_pairs("experiment table").is_err());
    }

    #[test]
    fn later_pairs_override() {
        let c = cfg(&[("experiment", "table"), ("seed", "1"), ("--seed", "9")]).unwrap();
        assert_eq!(c.budget.seed, 9);
    }

    #[test]
    fn unknown_key_is_a_config_error() {
        let e = cfg(&[("experiment", "table"), ("colour", "red")]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("colour"));
    }

    #[test]
    fn objective_required_for_curves() {
        let e = cfg(&[("experiment", "quantity-vs-n")]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("objective"));
    }

    #[test]
    fn coupling_overrides_make_custom() {
        let c = cfg(&[
            ("experiment", "quantity-vs-n"),
            ("objective", "c"),
            ("g", "0"),
            ("N", "5"),
        ])
        .unwrap();
        assert_eq!(c.preset, "custom");
        assert_eq!(c.coupling.n_total(), 5);
        assert_eq!(c.n_max, 5);
        assert!(c
            .output_path()
            .ends_with("quantity-vs-n/custom-concurrence.csv"));
    }

    #[test]
    fn out_of_domain_coupling_is_numeric() {
        let e = cfg(&[("experiment", "distinguishability"), ("g", "100")]).unwrap_err();
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("'g'"));
    }

    #[test]
    fn n_max_bounded_by_ancillas() {
        let e = cfg(&[("experiment", "uniform-sweep"), ("n-max", "21")]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("n-max"));
    }

    #[test]
    fn limit_defaults() {
        let c = cfg(&[("experiment", "continuous-limit")]).unwrap();
        assert_eq!((c.n_min, c.n_max), (64, 4096));
        assert_eq!(c.limit_time, 1.0);
        assert!(c.output_path().ends_with("continuous-limit/gap.csv"));
    }

    #[test]
    fn config_text_round_trips() {
        let c = cfg(&[
            ("experiment", "delta-d"),
            ("objective", "visibility"),
            ("preset", "weak"),
            ("restarts", "3"),
        ])
        .unwrap();
        let again = RunConfig::from_pairs(parse_pairs(&c.to_config_text()).unwrap()).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn bad_values_name_the_field() {
        for (key, value) in [
            ("seed", "x"),
            ("tol", "-1"),
            ("mode", "random"),
            ("preset", "medium"),
            ("warm-start", "maybe"),
        ] {
            let e = cfg(&[("experiment", "table"), (key, value)]).unwrap_err();
            assert_eq!(e.exit_code(), 2, "{key}");
        }
    }
}
