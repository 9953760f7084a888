//! Process-supervised reward model at desk scale.
//!
//! A linear three-class softmax classifier over step feature vectors. The
//! reward of a step is the probability mass the classifier puts on the
//! positive class. Also home to the pairwise (Bradley-Terry) contrast used by
//! outcome reward models, the step-label balancing used before training, and
//! the line-delimited dataset / model file formats.

use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reward_math::StepScore;

pub const NUM_CLASSES: usize = 3;

/// Fixed output ordering shared by training and inference.
pub const CLASS_ORDER: [&str; NUM_CLASSES] = ["negative", "neutral", "positive"];

/// Per-step annotation: -1 wrong, 0 neutral, 1 correct and useful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum StepLabel {
    Negative,
    Neutral,
    Positive,
}

impl StepLabel {
    pub const ALL: [StepLabel; NUM_CLASSES] = [StepLabel::Negative, StepLabel::Neutral, StepLabel::Positive];

    /// Position in [`CLASS_ORDER`].
    pub fn class_index(self) -> usize {
        match self {
            StepLabel::Negative => 0,
            StepLabel::Neutral => 1,
            StepLabel::Positive => 2,
        }
    }

    pub fn from_class_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn value(self) -> i64 {
        self.class_index() as i64 - 1
    }
}

impl TryFrom<i64> for StepLabel {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        match v {
            -1 => Ok(StepLabel::Negative),
            0 => Ok(StepLabel::Neutral),
            1 => Ok(StepLabel::Positive),
            other => Err(Error::InvalidLabel(other)),
        }
    }
}

impl From<StepLabel> for i64 {
    fn from(l: StepLabel) -> i64 {
        l.value()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledStep {
    pub features: Vec<f64>,
    pub label: StepLabel,
}

impl LabeledStep {
    pub fn new(features: Vec<f64>, label: StepLabel) -> Self {
        Self { features, label }
    }
}

/// Output of the softmax head, in [`CLASS_ORDER`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassProbabilities {
    pub p_negative: f64,
    pub p_neutral: f64,
    pub p_positive: f64,
}

impl ClassProbabilities {
    pub fn from_array(p: [f64; NUM_CLASSES]) -> Self {
        Self {
            p_negative: p[0],
            p_neutral: p[1],
            p_positive: p[2],
        }
    }

    pub fn as_array(&self) -> [f64; NUM_CLASSES] {
        [self.p_negative, self.p_neutral, self.p_positive]
    }

    pub fn of(&self, label: StepLabel) -> f64 {
        self.as_array()[label.class_index()]
    }

    pub fn predicted(&self) -> StepLabel {
        let p = self.as_array();
        let mut best = 0;
        for i in 1..NUM_CLASSES {
            if p[i] > p[best] {
                best = i;
            }
        }
        StepLabel::ALL[best]
    }
}

/// Anything that can turn a step feature vector into class probabilities.
///
/// The linear [`ClassifierParams`] is the only implementation here; a
/// heavier encoder can be dropped in behind the same interface.
pub trait StepScorer {
    fn class_probabilities(&self, features: &[f64]) -> Result<ClassProbabilities>;

    fn step_reward(&self, features: &[f64]) -> Result<StepScore> {
        let p = self.class_probabilities(features)?;
        Ok(StepScore::saturating(p.p_positive))
    }
}

/// Weights (3 x d) and biases of the linear classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierParams {
    weights: [Vec<f64>; NUM_CLASSES],
    biases: [f64; NUM_CLASSES],
}

impl ClassifierParams {
    pub fn new(weights: [Vec<f64>; NUM_CLASSES], biases: [f64; NUM_CLASSES]) -> Result<Self> {
        let d = weights[0].len();
        for row in &weights[1..] {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: row.len(),
                });
            }
        }
        if weights.iter().flatten().chain(biases.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("classifier parameters".into()));
        }
        Ok(Self { weights, biases })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: std::array::from_fn(|_| vec![0.0; dim]),
            biases: [0.0; NUM_CLASSES],
        }
    }

    pub fn dim(&self) -> usize {
        self.weights[0].len()
    }

    pub fn weights(&self) -> &[Vec<f64>; NUM_CLASSES] {
        &self.weights
    }

    pub fn biases(&self) -> &[f64; NUM_CLASSES] {
        &self.biases
    }

    /// Flattened view: weights row-major, then biases.
    pub fn to_flat(&self) -> Vec<f64> {
        self.weights.iter().flatten().chain(self.biases.iter()).copied().collect()
    }

    pub fn from_flat(dim: usize, flat: &[f64]) -> Result<Self> {
        let expected = NUM_CLASSES * dim + NUM_CLASSES;
        if flat.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: flat.len(),
            });
        }
        let weights = std::array::from_fn(|c| flat[c * dim..(c + 1) * dim].to_vec());
        let biases = std::array::from_fn(|c| flat[NUM_CLASSES * dim + c]);
        Self::new(weights, biases)
    }
}

impl StepScorer for ClassifierParams {
    fn class_probabilities(&self, features: &[f64]) -> Result<ClassProbabilities> {
        let logits = score_logits(self, features)?;
        let p = softmax(&logits);
        Ok(ClassProbabilities::from_array([p[0], p[1], p[2]]))
    }
}

/// `weights * features + biases`.
pub fn score_logits(params: &ClassifierParams, features: &[f64]) -> Result<[f64; NUM_CLASSES]> {
    if features.len() != params.dim() {
        return Err(Error::DimensionMismatch {
            expected: params.dim(),
            actual: features.len(),
        });
    }
    Ok(std::array::from_fn(|c| {
        params.weights[c].iter().zip(features).map(|(w, x)| w * x).sum::<f64>() + params.biases[c]
    }))
}

/// Max-shifted softmax. Returns an empty vector for empty input.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// `-ln p(true class)`.
pub fn cross_entropy_loss(probs: &ClassProbabilities, label: StepLabel) -> f64 {
    -probs.of(label).ln()
}

/// Positive-class probability for one step.
pub fn step_reward(params: &ClassifierParams, features: &[f64]) -> Result<StepScore> {
    params.step_reward(features)
}

/// Logistic sigmoid, evaluated without overflow for large `|x|`.
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `sigma(reward_w - reward_l)`: probability the first response is preferred.
pub fn bradley_terry_preference(reward_w: f64, reward_l: f64) -> f64 {
    sigmoid(reward_w - reward_l)
}

/// `-ln sigma(reward_w - reward_l)`, computed as a softplus of the negated margin.
pub fn pairwise_logistic_loss(reward_w: f64, reward_l: f64) -> f64 {
    let margin = reward_w - reward_l;
    // softplus(-m) = max(-m, 0) + ln(1 + e^{-|m|})
    (-margin).max(0.0) + (-margin.abs()).exp().ln_1p()
}

/// Replicates every neutral and negative example `replication_factor` times
/// in place, leaving positives as they are.
pub fn balance_dataset(dataset: &[LabeledStep], replication_factor: usize) -> Vec<LabeledStep> {
    let factor = replication_factor.max(1);
    let mut out = Vec::with_capacity(dataset.len() * factor);
    for step in dataset {
        let copies = if step.label == StepLabel::Positive { 1 } else { factor };
        out.extend(std::iter::repeat_n(step, copies).cloned());
    }
    out
}

/// Shared dimension of every feature vector.
pub fn dataset_dim(dataset: &[LabeledStep]) -> Result<usize> {
    let first = dataset.first().ok_or(Error::EmptyDataset)?;
    let d = first.features.len();
    for step in dataset {
        if step.features.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: step.features.len(),
            });
        }
    }
    Ok(d)
}

/// Mean cross-entropy over the dataset and its gradient, laid out like
/// [`ClassifierParams::to_flat`].
pub fn loss_and_gradient(params: &ClassifierParams, dataset: &[LabeledStep]) -> Result<(f64, ClassifierParams)> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let d = params.dim();
    let mut grad = ClassifierParams::zeros(d);
    let mut loss = 0.0;
    for step in dataset {
        let probs = params.class_probabilities(&step.features)?;
        loss += cross_entropy_loss(&probs, step.label);
        let p = probs.as_array();
        for c in 0..NUM_CLASSES {
            let delta = p[c] - if c == step.label.class_index() { 1.0 } else { 0.0 };
            for (g, x) in grad.weights[c].iter_mut().zip(&step.features) {
                *g += delta * x;
            }
            grad.biases[c] += delta;
        }
    }
    let n = dataset.len() as f64;
    grad.weights.iter_mut().flatten().for_each(|g| *g /= n);
    grad.biases.iter_mut().for_each(|g| *g /= n);
    Ok((loss / n, grad))
}

pub fn mean_loss(params: &ClassifierParams, dataset: &[LabeledStep]) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut total = 0.0;
    for step in dataset {
        total += cross_entropy_loss(&params.class_probabilities(&step.features)?, step.label);
    }
    Ok(total / dataset.len() as f64)
}

pub fn accuracy(params: &ClassifierParams, dataset: &[LabeledStep]) -> Result<f64> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut correct = 0usize;
    for step in dataset {
        if params.class_probabilities(&step.features)?.predicted() == step.label {
            correct += 1;
        }
    }
    Ok(correct as f64 / dataset.len() as f64)
}

/// Metrics recorded after each full-batch step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub loss: f64,
    pub accuracy: f64,
}

pub const DEFAULT_LEARNING_RATE: f64 = 0.1;
const INIT_SCALE: f64 = 0.01;

/// Full-batch gradient descent on mean cross-entropy.
pub fn train(dataset: &[LabeledStep], epochs: usize, learning_rate: f64, seed: u64) -> Result<ClassifierParams> {
    train_with_history(dataset, epochs, learning_rate, seed).map(|(params, _)| params)
}

/// Like [`train`], also returning metrics for the initial parameters (epoch 0)
/// and after every epoch.
pub fn train_with_history(
    dataset: &[LabeledStep],
    epochs: usize,
    learning_rate: f64,
    seed: u64,
) -> Result<(ClassifierParams, Vec<EpochMetrics>)> {
    let dim = dataset_dim(dataset)?;
    if epochs == 0 {
        return Err(Error::invalid("epochs", "must be at least 1"));
    }
    if !(learning_rate.is_finite() && learning_rate > 0.0) {
        return Err(Error::invalid("learning_rate", format!("must be > 0, got {learning_rate}")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let flat: Vec<f64> = (0..NUM_CLASSES * dim + NUM_CLASSES)
        .map(|_| rng.random_range(-INIT_SCALE..INIT_SCALE))
        .collect();
    let mut params = ClassifierParams::from_flat(dim, &flat)?;

    let mut history = Vec::with_capacity(epochs + 1);
    for epoch in 0..epochs {
        let (loss, grad) = loss_and_gradient(&params, dataset)?;
        if !loss.is_finite() {
            return Err(Error::NonFinite(format!("training loss at epoch {epoch}")));
        }
        history.push(EpochMetrics {
            epoch,
            loss,
            accuracy: accuracy(&params, dataset)?,
        });
        for (w, g) in params.weights.iter_mut().flatten().zip(grad.weights.iter().flatten()) {
            *w -= learning_rate * g;
        }
        for (b, g) in params.biases.iter_mut().zip(grad.biases.iter()) {
            *b -= learning_rate * g;
        }
    }
    let loss = mean_loss(&params, dataset)?;
    if !loss.is_finite() {
        return Err(Error::NonFinite("final training loss".into()));
    }
    history.push(EpochMetrics {
        epoch: epochs,
        loss,
        accuracy: accuracy(&params, dataset)?,
    });
    Ok((params, history))
}

/// Three well-separated Gaussian clusters, one per label, balanced by count.
pub fn synthetic_separable_dataset(n: usize, dim: usize, seed: u64) -> Vec<LabeledStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.5).expect("valid std");
    let centers: [Vec<f64>; NUM_CLASSES] = std::array::from_fn(|c| {
        (0..dim)
            .map(|j| match (c, j % NUM_CLASSES) {
                (a, b) if a == b => 2.5,
                _ => -1.0,
            })
            .collect()
    });
    (0..n)
        .map(|i| {
            let label = StepLabel::ALL[i % NUM_CLASSES];
            let features = centers[label.class_index()]
                .iter()
                .map(|m| m + noise.sample(&mut rng))
                .collect();
            LabeledStep { features, label }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// File formats
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetHeader {
    d: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRecord {
    features: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<i64>,
}

/// A parsed step file: the declared dimension plus one record per line.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFile {
    pub dim: usize,
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Option<StepLabel>>,
}

impl StepFile {
    /// Requires every record to carry a label.
    pub fn into_labeled(self, path: &Path) -> Result<Vec<LabeledStep>> {
        self.features
            .into_iter()
            .zip(self.labels)
            .enumerate()
            .map(|(i, (features, label))| match label {
                Some(label) => Ok(LabeledStep { features, label }),
                None => Err(Error::Parse {
                    path: path.to_path_buf(),
                    line: i + 2,
                    reason: "missing `label`".into(),
                }),
            })
            .collect()
    }
}

/// Reads a line-delimited step file: a `{"d": n}` header, then one
/// `{"features": [...], "label": -1|0|1}` record per line. Blank lines are
/// skipped; anything malformed fails with its 1-based line number.
pub fn read_step_file(path: &Path) -> Result<StepFile> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };

    let mut dim = None;
    let mut out = StepFile {
        dim: 0,
        features: Vec::new(),
        labels: Vec::new(),
    };
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        let Some(d) = dim else {
            let header: DatasetHeader =
                serde_json::from_str(text).map_err(|e| parse_err(lineno, format!("bad header: {e}")))?;
            if header.d == 0 {
                return Err(parse_err(lineno, "declared dimension `d` must be positive".into()));
            }
            dim = Some(header.d);
            continue;
        };
        let record: StepRecord = serde_json::from_str(text).map_err(|e| parse_err(lineno, e.to_string()))?;
        if record.features.len() != d {
            return Err(parse_err(
                lineno,
                format!("expected {d} features, found {}", record.features.len()),
            ));
        }
        if record.features.iter().any(|v| !v.is_finite()) {
            return Err(parse_err(lineno, "non-finite feature".into()));
        }
        let label = record
            .label
            .map(StepLabel::try_from)
            .transpose()
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        out.features.push(record.features);
        out.labels.push(label);
    }
    out.dim = dim.ok_or_else(|| parse_err(1, "missing header record".into()))?;
    Ok(out)
}

pub fn read_dataset(path: &Path) -> Result<Vec<LabeledStep>> {
    let file = read_step_file(path)?;
    if file.features.is_empty() {
        return Err(Error::EmptyDataset);
    }
    file.into_labeled(path)
}

/// Serializes steps in the format read by [`read_step_file`].
pub fn dataset_to_string(dataset: &[LabeledStep]) -> Result<String> {
    let d = dataset_dim(dataset)?;
    let mut out = serde_json::to_string(&DatasetHeader { d }).expect("header serializes");
    out.push('\n');
    for step in dataset {
        let rec = StepRecord {
            features: step.features.clone(),
            label: Some(step.label.value()),
        };
        out.push_str(&serde_json::to_string(&rec).map_err(|e| Error::NonFinite(e.to_string()))?);
        out.push('\n');
    }
    Ok(out)
}

/// On-disk form of a trained classifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<f64>,
    pub class_order: Vec<String>,
    pub seed: u64,
}

impl ModelFile {
    pub fn new(params: &ClassifierParams, seed: u64) -> Self {
        Self {
            weights: params.weights.to_vec(),
            biases: params.biases.to_vec(),
            class_order: CLASS_ORDER.iter().map(|s| s.to_string()).collect(),
            seed,
        }
    }

    pub fn params(&self) -> Result<ClassifierParams> {
        if self.class_order != CLASS_ORDER {
            return Err(Error::invalid(
                "class_order",
                format!("expected {CLASS_ORDER:?}, found {:?}", self.class_order),
            ));
        }
        let weights: [Vec<f64>; NUM_CLASSES] = self.weights.clone().try_into().map_err(|w: Vec<Vec<f64>>| {
            Error::DimensionMismatch {
                expected: NUM_CLASSES,
                actual: w.len(),
            }
        })?;
        let biases: [f64; NUM_CLASSES] =
            self.biases
                .clone()
                .try_into()
                .map_err(|b: Vec<f64>| Error::DimensionMismatch {
                    expected: NUM_CLASSES,
                    actual: b.len(),
                })?;
        ClassifierParams::new(weights, biases)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            reason: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }
}
