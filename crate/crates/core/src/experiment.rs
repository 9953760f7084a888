//! Experiment configuration and the commands behind the `pspo` binary.
//!
//! Every command builds its outputs in memory, rejects any non-finite
//! value, and only then writes files. Relative paths in a config file are
//! resolved against the directory holding that file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chain_env::{self, OracleConfig};
use crate::error::{Error, Result};
use crate::policy_opt::{self, AblationReport, AblationSettings, Accumulation, Estimator, Objective, Shaping, StepSettings};
use crate::prm::{self, ClassifierParams, ModelFile, StepScorer};
use crate::reward_math::{weibull_shape, StepScore, WeibullShaping};

pub const MODEL_FILE: &str = "prm_model.json";
pub const PRM_METRICS_FILE: &str = "prm_metrics.csv";
pub const SHAPE_CURVE_FILE: &str = "shape_curve.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PER_SEED_FILE: &str = "per_seed.csv";
pub const COMPARISON_FILE: &str = "comparison.csv";
pub const REPORT_FILE: &str = "report.json";
pub const SCORES_FILE: &str = "scores.csv";
pub const CHAIN_REWARD_FILE: &str = "chain_reward.csv";
pub const EFFECTIVE_CONFIG_FILE: &str = "effective_config.toml";

pub const BUNDLED_DATASET_POINTS: usize = 300;
pub const BUNDLED_DATASET_DIM: usize = 3;
pub const BUNDLED_DATASET_SEED: u64 = 20240917;

// ---------------------------------------------------------------------------
// Config
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PrmSection {
    /// Labeled step file used by `train-prm`.
    pub dataset: PathBuf,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Neutral/negative replication applied before training; 1 disables it.
    pub replication_factor: usize,
    /// Trained model read by `score`.
    pub model: PathBuf,
}

impl Default for PrmSection {
    fn default() -> Self {
        Self {
            dataset: PathBuf::from("data/synthetic_steps.jsonl"),
            epochs: 500,
            learning_rate: prm::DEFAULT_LEARNING_RATE,
            seed: 7,
            replication_factor: 1,
            model: PathBuf::from(MODEL_FILE),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreSection {
    /// Step feature file scored by `score`; labels are optional.
    pub features: PathBuf,
}

impl Default for ScoreSection {
    fn default() -> Self {
        Self {
            features: PathBuf::from("data/synthetic_steps.jsonl"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvironmentSection {
    pub t_max: usize,
    /// Initial quality logit; `q = sigmoid(initial_quality_param)`.
    pub initial_quality_param: f64,
    pub noise_scale: f64,
    pub difficulty_per_step: f64,
    pub oracle_seed: u64,
}

impl Default for EnvironmentSection {
    fn default() -> Self {
        Self {
            t_max: chain_env::DEFAULT_T_MAX,
            initial_quality_param: policy_opt::DEFAULT_INITIAL_QUALITY_PARAM,
            noise_scale: chain_env::DEFAULT_NOISE_SCALE,
            difficulty_per_step: chain_env::DEFAULT_DIFFICULTY,
            oracle_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapingKind {
    None,
    Weibull,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ObjectiveSection {
    pub accumulation: Accumulation,
    pub shaping: ShapingKind,
    pub c: f64,
    pub k: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl Default for ObjectiveSection {
    fn default() -> Self {
        Self {
            accumulation: Accumulation::Geomean,
            shaping: ShapingKind::Weibull,
            c: WeibullShaping::PAPER_C,
            k: WeibullShaping::PAPER_K,
            lambda: WeibullShaping::PAPER_LAMBDA,
            beta: policy_opt::DEFAULT_BETA,
        }
    }
}

impl ObjectiveSection {
    pub fn weibull(&self) -> Result<WeibullShaping> {
        WeibullShaping::new(self.c, self.k, self.lambda)
    }

    pub fn objective(&self) -> Result<Objective> {
        let shaping = match self.shaping {
            ShapingKind::None => Shaping::None,
            ShapingKind::Weibull => Shaping::Weibull(self.weibull()?),
        };
        let objective = Objective {
            accumulation: self.accumulation,
            shaping,
            beta: self.beta,
        };
        objective.validate()?;
        Ok(objective)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Reinforce,
    ClippedSurrogate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerSection {
    pub estimator: EstimatorKind,
    pub clip_epsilon: f64,
    pub ppo_epochs: usize,
    pub rollouts_per_step: usize,
    pub steps: usize,
    pub learning_rate: f64,
    pub seeds: Vec<u64>,
    pub eval_rollouts: usize,
    pub parallel: bool,
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            estimator: EstimatorKind::Reinforce,
            clip_epsilon: policy_opt::DEFAULT_CLIP_EPSILON,
            ppo_epochs: 4,
            rollouts_per_step: policy_opt::DEFAULT_ROLLOUTS,
            steps: policy_opt::DEFAULT_EPOCHS,
            learning_rate: policy_opt::DEFAULT_POLICY_LEARNING_RATE,
            seeds: vec![1, 2, 3, 4, 5],
            eval_rollouts: policy_opt::DEFAULT_EVAL_ROLLOUTS,
            parallel: true,
        }
    }
}

impl OptimizerSection {
    pub fn estimator(&self) -> Estimator {
        match self.estimator {
            EstimatorKind::Reinforce => Estimator::Reinforce,
            EstimatorKind::ClippedSurrogate => Estimator::ClippedSurrogate {
                clip_epsilon: self.clip_epsilon,
                epochs: self.ppo_epochs,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub directory: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![OutputFormat::Csv, OutputFormat::Json],
        }
    }
}

impl OutputSection {
    pub fn wants(&self, format: OutputFormat) -> bool {
        self.formats.contains(&format)
    }
}

/// Full experiment configuration. Defaults carry the paper shaping preset
/// `C = 10.735, k = 1.5, lambda = 8.0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub prm: PrmSection,
    pub score: ScoreSection,
    pub environment: EnvironmentSection,
    pub objective: ObjectiveSection,
    pub optimizer: OptimizerSection,
    pub output: OutputSection,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            reason: e.to_string().trim_end().to_string(),
        })?;
        config.validate().map_err(|e| Error::Config {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Ok(config)
    }

    /// Reads a config and resolves its relative paths against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text, path)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.prm.dataset,
            &mut config.prm.model,
            &mut config.score.features,
            &mut config.output.directory,
        ] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let prm = &self.prm;
        if prm.epochs == 0 {
            return Err(Error::invalid("prm.epochs", "must be at least 1"));
        }
        if !(prm.learning_rate.is_finite() && prm.learning_rate > 0.0) {
            return Err(Error::invalid("prm.learning_rate", "must be > 0"));
        }
        if prm.replication_factor == 0 {
            return Err(Error::invalid("prm.replication_factor", "must be at least 1"));
        }
        if self.environment.t_max == 0 {
            return Err(Error::invalid("environment.t_max", "must be at least 1"));
        }
        if !self.environment.initial_quality_param.is_finite() {
            return Err(Error::invalid("environment.initial_quality_param", "must be finite"));
        }
        self.oracle().validate()?;
        self.objective.objective()?;
        let opt = &self.optimizer;
        if opt.rollouts_per_step == 0 || opt.eval_rollouts == 0 {
            return Err(Error::invalid("optimizer", "rollout counts must be at least 1"));
        }
        if opt.steps == 0 {
            return Err(Error::invalid("optimizer.steps", "must be at least 1"));
        }
        if !(opt.learning_rate.is_finite() && opt.learning_rate > 0.0) {
            return Err(Error::invalid("optimizer.learning_rate", "must be > 0"));
        }
        if !(opt.clip_epsilon > 0.0 && opt.clip_epsilon < 1.0) {
            return Err(Error::invalid("optimizer.clip_epsilon", "must lie in (0, 1)"));
        }
        if opt.ppo_epochs == 0 {
            return Err(Error::invalid("optimizer.ppo_epochs", "must be at least 1"));
        }
        Ok(())
    }

    pub fn oracle(&self) -> OracleConfig {
        OracleConfig {
            noise_scale: self.environment.noise_scale,
            difficulty_per_step: self.environment.difficulty_per_step,
            seed: self.environment.oracle_seed,
        }
    }

    pub fn ablation_settings(&self) -> Result<AblationSettings> {
        Ok(AblationSettings {
            t_max: self.environment.t_max,
            initial_quality_param: self.environment.initial_quality_param,
            oracle: self.oracle(),
            shaping: self.objective.weibull()?,
            beta: self.objective.beta,
            epochs: self.optimizer.steps,
            step: StepSettings {
                n_rollouts: self.optimizer.rollouts_per_step,
                learning_rate: self.optimizer.learning_rate,
                estimator: self.optimizer.estimator(),
            },
            eval_rollouts: self.optimizer.eval_rollouts,
            parallel: self.optimizer.parallel,
        })
    }

    /// Applies a `--seed` override: the PRM seed becomes `seed` and the
    /// ablation seeds become `seed, seed + 1, ...` keeping their count.
    pub fn override_seed(&mut self, seed: u64) {
        self.prm.seed = seed;
        let n = self.optimizer.seeds.len() as u64;
        self.optimizer.seeds = (0..n).map(|i| seed.wrapping_add(i)).collect();
    }
}

// ---------------------------------------------------------------------------
// Output assembly
// ---------------------------------------------------------------------------

/// Files a command produced, keyed by file name. Written in one pass by
/// [`OutputSet::write_to`].
#[derive(Debug, Default, Clone, PartialEq)]
pub struct OutputSet {
    pub files: Vec<(String, String)>,
}

impl OutputSet {
    fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn names(&self) -> Vec<&str> {
        self.files.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

/// Formats a CSV from a header and rows, refusing non-finite numbers.
struct Csv {
    name: String,
    text: String,
}

enum Cell<'a> {
    Text(&'a str),
    Int(u64),
    Real(f64),
}

impl Csv {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            text: header.join(",") + "\n",
        }
    }

    fn row(&mut self, cells: &[Cell<'_>]) -> Result<()> {
        let mut line = String::new();
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                line.push(',');
            }
            match cell {
                Cell::Text(s) => line.push_str(s),
                Cell::Int(v) => write!(line, "{v}").unwrap(),
                Cell::Real(v) => {
                    if !v.is_finite() {
                        return Err(Error::NonFinite(format!("{} (row {})", self.name, self.text.lines().count())));
                    }
                    write!(line, "{v}").unwrap()
                }
            }
        }
        self.text.push_str(&line);
        self.text.push('\n');
        Ok(())
    }

    fn finish(self) -> String {
        self.text
    }
}

fn json<T: Serialize>(value: &T, what: &str) -> Result<String> {
    // serde_json writes non-finite floats as null; treat that as a failure
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::NonFinite(format!("{what}: {e}")))?;
    if s.contains("null") {
        return Err(Error::NonFinite(what.to_string()));
    }
    s.push('\n');
    Ok(s)
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

/// Trains the step classifier on the configured dataset.
pub fn train_prm(config: &ExperimentConfig) -> Result<OutputSet> {
    let dataset = prm::read_dataset(&config.prm.dataset)?;
    let dataset = prm::balance_dataset(&dataset, config.prm.replication_factor);
    let (params, history) =
        prm::train_with_history(&dataset, config.prm.epochs, config.prm.learning_rate, config.prm.seed)?;

    let mut metrics = Csv::new(PRM_METRICS_FILE, &["epoch", "loss", "accuracy"]);
    for m in &history {
        metrics.row(&[Cell::Int(m.epoch as u64), Cell::Real(m.loss), Cell::Real(m.accuracy)])?;
    }
    let mut out = OutputSet::default();
    out.add(MODEL_FILE, json(&ModelFile::new(&params, config.prm.seed), "model file")?);
    out.add(PRM_METRICS_FILE, metrics.finish());
    out.add(EFFECTIVE_CONFIG_FILE, config.to_toml());
    Ok(out)
}

/// Shaping value at every integer step count `0..=T_max`.
pub fn shape_curve(config: &ExperimentConfig) -> Result<OutputSet> {
    let params = config.objective.weibull()?;
    let mut csv = Csv::new(SHAPE_CURVE_FILE, &["t", "shape"]);
    for t in 0..=config.environment.t_max as u32 {
        csv.row(&[Cell::Int(t.into()), Cell::Real(weibull_shape(&params, t))])?;
    }
    let mut out = OutputSet::default();
    out.add(SHAPE_CURVE_FILE, csv.finish());
    out.add(EFFECTIVE_CONFIG_FILE, config.to_toml());
    Ok(out)
}

pub fn hist_file(arm: &str) -> String {
    format!("hist_{arm}.csv")
}

pub fn reward_by_steps_file(arm: &str) -> String {
    format!("reward_by_steps_{arm}.csv")
}

fn accumulation_name(a: Accumulation) -> &'static str {
    match a {
        Accumulation::Product => "product",
        Accumulation::Geomean => "geomean",
    }
}

fn shaping_name(s: &Shaping) -> &'static str {
    match s {
        Shaping::None => "none",
        Shaping::Weibull(_) => "weibull",
    }
}

/// Renders an ablation report into its CSV (and optionally JSON) files.
pub fn ablation_outputs(report: &AblationReport, config: &ExperimentConfig) -> Result<OutputSet> {
    let mut out = OutputSet::default();
    let csv_wanted = config.output.wants(OutputFormat::Csv);

    let mut summary = Csv::new(
        SUMMARY_FILE,
        &[
            "config",
            "accumulation",
            "shaping",
            "n_seeds",
            "epochs",
            "mean_step_count",
            "std_step_count",
            "mean_reward",
        ],
    );
    let mut per_seed = Csv::new(PER_SEED_FILE, &["config", "seed", "mean_step_count", "mean_reward", "final_quality"]);
    for arm in &report.arms {
        let name = arm.arm.name();
        summary.row(&[
            Cell::Text(name),
            Cell::Text(accumulation_name(arm.objective.accumulation)),
            Cell::Text(shaping_name(&arm.objective.shaping)),
            Cell::Int(arm.seeds.len() as u64),
            Cell::Int(report.epochs as u64),
            Cell::Real(arm.mean_step_count),
            Cell::Real(arm.std_step_count),
            Cell::Real(arm.mean_reward),
        ])?;
        for s in &arm.seeds {
            per_seed.row(&[
                Cell::Text(name),
                Cell::Int(s.seed),
                Cell::Real(s.mean_step_count),
                Cell::Real(s.mean_reward),
                Cell::Real(s.final_quality),
            ])?;
        }

        let mut hist = Csv::new(&hist_file(name), &["t", "count", "probability"]);
        for (i, (count, p)) in arm.histogram.iter().zip(&arm.length_probs).enumerate() {
            hist.row(&[Cell::Int(i as u64 + 1), Cell::Int(*count as u64), Cell::Real(*p)])?;
        }
        let mut rbs = Csv::new(&reward_by_steps_file(name), &["t", "mean_reward"]);
        for (i, r) in arm.reward_by_steps.iter().enumerate() {
            rbs.row(&[Cell::Int(i as u64 + 1), Cell::Real(*r)])?;
        }
        if csv_wanted {
            out.add(hist_file(name), hist.finish());
            out.add(reward_by_steps_file(name), rbs.finish());
        }
    }
    let c = &report.step_count_comparison;
    let mut comparison = Csv::new(COMPARISON_FILE, &["metric", "mean_difference", "t_statistic", "p_value"]);
    comparison.row(&[
        Cell::Text("mean_step_count"),
        Cell::Real(c.mean_difference),
        Cell::Real(c.t_statistic),
        Cell::Real(c.p_value),
    ])?;
    if csv_wanted {
        out.add(SUMMARY_FILE, summary.finish());
        out.add(PER_SEED_FILE, per_seed.finish());
        out.add(COMPARISON_FILE, comparison.finish());
    }
    if config.output.wants(OutputFormat::Json) {
        out.add(REPORT_FILE, json(report, "ablation report")?);
    }
    out.add(EFFECTIVE_CONFIG_FILE, config.to_toml());
    Ok(out)
}

/// Trains both ablation arms on every configured seed.
pub fn ablation(config: &ExperimentConfig) -> Result<(AblationReport, OutputSet)> {
    let report = policy_opt::ablation_run(&config.ablation_settings()?, &config.optimizer.seeds)?;
    let out = ablation_outputs(&report, config)?;
    Ok((report, out))
}

/// Scores every step of the configured feature file with a trained model,
/// and the whole file as one chain under the configured objective.
pub fn score(config: &ExperimentConfig) -> Result<OutputSet> {
    let model = ModelFile::read(&config.prm.model)?;
    let params: ClassifierParams = model.params()?;
    let steps = prm::read_step_file(&config.score.features)?;
    if steps.dim != params.dim() {
        return Err(Error::Parse {
            path: config.score.features.clone(),
            line: 1,
            reason: format!("file declares d = {}, model expects {}", steps.dim, params.dim()),
        });
    }
    let mut csv = Csv::new(SCORES_FILE, &["step", "p_negative", "p_neutral", "p_positive", "step_reward"]);
    let mut step_scores: Vec<StepScore> = Vec::with_capacity(steps.features.len());
    for (i, features) in steps.features.iter().enumerate() {
        let probs = params.class_probabilities(features)?;
        let reward = params.step_reward(features)?;
        csv.row(&[
            Cell::Int(i as u64 + 1),
            Cell::Real(probs.p_negative),
            Cell::Real(probs.p_neutral),
            Cell::Real(probs.p_positive),
            Cell::Real(reward.value()),
        ])?;
        step_scores.push(reward);
    }
    let mut out = OutputSet::default();
    out.add(SCORES_FILE, csv.finish());
    if !step_scores.is_empty() {
        let objective = config.objective.objective()?;
        let mut chain = Csv::new(CHAIN_REWARD_FILE, &["steps", "accumulation", "shaping", "reward"]);
        chain.row(&[
            Cell::Int(step_scores.len() as u64),
            Cell::Text(accumulation_name(objective.accumulation)),
            Cell::Text(shaping_name(&objective.shaping)),
            Cell::Real(policy_opt::chain_reward(&objective, &step_scores)?),
        ])?;
        out.add(CHAIN_REWARD_FILE, chain.finish());
    }
    out.add(EFFECTIVE_CONFIG_FILE, config.to_toml());
    Ok(out)
}

/// The synthetic labeled-step dataset shipped with the repository.
pub fn bundled_dataset() -> Vec<prm::LabeledStep> {
    prm::synthetic_separable_dataset(BUNDLED_DATASET_POINTS, BUNDLED_DATASET_DIM, BUNDLED_DATASET_SEED)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let config = ExperimentConfig::default();
        let text = config.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text, Path::new("x.toml")).unwrap(), config);
    }

    #[test]
    fn empty_config_is_default() {
        assert_eq!(ExperimentConfig::from_toml("", Path::new("x.toml")).unwrap(), ExperimentConfig::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentConfig::from_toml("[objective]\ngamma = 1.0\n", Path::new("x.toml")).unwrap_err();
        assert!(err.to_string().contains("gamma"), "{err}");
        assert!(ExperimentConfig::from_toml("[nope]\n", Path::new("x.toml")).is_err());
    }

    #[test]
    fn invalid_values_rejected() {
        for bad in [
            "[objective]\nk = 0.0\n",
            "[objective]\nbeta = -1.0\n",
            "[environment]\nt_max = 0\n",
            "[environment]\ndifficulty_per_step = 2.0\n",
            "[optimizer]\nrollouts_per_step = 0\n",
            "[prm]\nepochs = 0\n",
        ] {
            assert!(ExperimentConfig::from_toml(bad, Path::new("x.toml")).is_err(), "{bad}");
        }
    }

    #[test]
    fn paper_preset_is_default() {
        let w = ExperimentConfig::default().objective.weibull().unwrap();
        assert_eq!(w, WeibullShaping::paper());
    }

    #[test]
    fn seed_override_keeps_count() {
        let mut c = ExperimentConfig::default();
        c.override_seed(100);
        assert_eq!(c.prm.seed, 100);
        assert_eq!(c.optimizer.seeds, vec![100, 101, 102, 103, 104]);
    }

    #[test]
    fn csv_rejects_non_finite() {
        let mut csv = Csv::new("x.csv", &["a"]);
        assert!(csv.row(&[Cell::Real(f64::NAN)]).is_err());
        assert!(matches!(csv.row(&[Cell::Real(f64::INFINITY)]), Err(Error::NonFinite(_))));
    }

    #[test]
    fn shape_curve_rows() {
        let out = shape_curve(&ExperimentConfig::default()).unwrap();
        let text = out.get(SHAPE_CURVE_FILE).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,shape");
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[1], "0,0");
    }
}
