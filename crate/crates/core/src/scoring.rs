//! Originality scoring for translation candidates.
//!
//! The built-in scorer is a logistic regression over hashed character
//! n-gram counts, trained by mini-batch gradient descent on log-loss. It is
//! a desk-scale stand-in for a neural original-text classifier: the pipeline
//! contract only needs a probability per sentence, and externally computed
//! probabilities can be injected through [`load_scores`] instead.
//!
//! Feature hashing is FNV-1a 64-bit over the n-gram order byte followed by
//! the n-gram's UTF-8 bytes, masked to the (power-of-two) feature dimension;
//! the count vector is L2-normalized. Both choices are part of the model
//! format: the same text and config produce the same features on every
//! platform.

use std::collections::BTreeMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus;
use crate::error::{Error, Result};

pub const MODEL_FORMAT_VERSION: u32 = 1;

const FNV_OFFSET_BASIS: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash = FNV_OFFSET_BASIS;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Training configuration; the defaults match the documented model format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub ngram_orders: Vec<usize>,
    /// Hashed feature dimension; must be a power of two.
    pub dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            ngram_orders: vec![1, 2, 3],
            dim: 1 << 18,
            epochs: 10,
            learning_rate: 2.0,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.ngram_orders.is_empty() || self.ngram_orders.iter().any(|&n| n == 0) {
            return Err(Error::InvalidArgument(
                "ngram orders must be non-empty and positive".to_string(),
            ));
        }
        if self.dim == 0 || !self.dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "feature dimension must be a power of two, got {}",
                self.dim
            )));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidArgument("batch size must be positive".to_string()));
        }
        Ok(())
    }
}

/// Trained logistic model over hashed character n-grams.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerModel {
    pub format_version: u32,
    pub ngram_orders: Vec<usize>,
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub seed: u64,
}

/// Sparse, L2-normalized feature vector for one sentence.
fn features(text: &str, orders: &[usize], dim: usize) -> Vec<(u32, f64)> {
    let chars: Vec<char> = text.chars().collect();
    let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
    let mut bytes = Vec::with_capacity(16);
    for &order in orders {
        if chars.len() < order {
            continue;
        }
        for window in chars.windows(order) {
            bytes.clear();
            bytes.push(order as u8);
            for &c in window {
                let mut utf8 = [0u8; 4];
                bytes.extend_from_slice(c.encode_utf8(&mut utf8).as_bytes());
            }
            let idx = (fnv1a(bytes.iter().copied()) & (dim as u64 - 1)) as u32;
            *counts.entry(idx).or_insert(0.0) += 1.0;
        }
    }
    let norm: f64 = counts.values().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in counts.values_mut() {
            *v /= norm;
        }
    }
    counts.into_iter().collect()
}

fn sigmoid(z: f64) -> f64 {
    let z = z.clamp(-30.0, 30.0);
    1.0 / (1.0 + (-z).exp())
}

impl ScorerModel {
    /// Train on two sentence streams: positives are original target-language
    /// text, negatives machine-translated text. Deterministic given the
    /// config seed.
    pub fn train<S: AsRef<str>>(
        positives: &[S],
        negatives: &[S],
        config: &TrainConfig,
    ) -> Result<ScorerModel> {
        config.validate()?;
        if positives.is_empty() {
            return Err(Error::EmptyInput("positive training stream"));
        }
        if negatives.is_empty() {
            return Err(Error::EmptyInput("negative training stream"));
        }

        let examples: Vec<(Vec<(u32, f64)>, f64)> = positives
            .iter()
            .map(|s| (features(s.as_ref(), &config.ngram_orders, config.dim), 1.0))
            .chain(
                negatives
                    .iter()
                    .map(|s| (features(s.as_ref(), &config.ngram_orders, config.dim), 0.0)),
            )
            .collect();

        let mut model = ScorerModel {
            format_version: MODEL_FORMAT_VERSION,
            ngram_orders: config.ngram_orders.clone(),
            dim: config.dim,
            weights: vec![0.0; config.dim],
            bias: 0.0,
            epochs: config.epochs,
            learning_rate: config.learning_rate,
            batch_size: config.batch_size,
            seed: config.seed,
        };

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut order: Vec<usize> = (0..examples.len()).collect();
        let mut grad: BTreeMap<u32, f64> = BTreeMap::new();
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(config.batch_size) {
                grad.clear();
                let mut grad_bias = 0.0;
                for &i in batch {
                    let (x, y) = &examples[i];
                    let z: f64 = model.bias
                        + x.iter().map(|&(j, v)| model.weights[j as usize] * v).sum::<f64>();
                    let err = sigmoid(z) - y;
                    for &(j, v) in x {
                        *grad.entry(j).or_insert(0.0) += err * v;
                    }
                    grad_bias += err;
                }
                let scale = config.learning_rate / batch.len() as f64;
                for (&j, &g) in grad.iter() {
                    model.weights[j as usize] -= scale * g;
                }
                model.bias -= scale * grad_bias;
            }
            let loss = model.mean_log_loss_features(&examples);
            if !loss.is_finite() {
                return Err(Error::TrainingDiverged { epoch, loss });
            }
        }
        Ok(model)
    }

    /// Probability that `text` is original target-language text; always in
    /// (0, 1) and monotone in the linear score.
    pub fn predict_proba(&self, text: &str) -> f64 {
        let x = features(text, &self.ngram_orders, self.dim);
        let z: f64 = self.bias
            + x.iter()
                .map(|&(j, v)| self.weights[j as usize] * v)
                .sum::<f64>();
        sigmoid(z)
    }

    fn mean_log_loss_features(&self, examples: &[(Vec<(u32, f64)>, f64)]) -> f64 {
        let eps = 1e-12;
        let sum: f64 = examples
            .iter()
            .map(|(x, y)| {
                let z: f64 = self.bias
                    + x.iter()
                        .map(|&(j, v)| self.weights[j as usize] * v)
                        .sum::<f64>();
                let p = sigmoid(z).clamp(eps, 1.0 - eps);
                -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
            })
            .sum();
        sum / examples.len() as f64
    }

    /// Mean log-loss over a labeled stream.
    pub fn mean_log_loss<S: AsRef<str>>(&self, labeled: &[(S, bool)]) -> Result<f64> {
        if labeled.is_empty() {
            return Err(Error::EmptyInput("log-loss stream"));
        }
        let examples: Vec<(Vec<(u32, f64)>, f64)> = labeled
            .iter()
            .map(|(s, y)| {
                (
                    features(s.as_ref(), &self.ngram_orders, self.dim),
                    if *y { 1.0 } else { 0.0 },
                )
            })
            .collect();
        Ok(self.mean_log_loss_features(&examples))
    }

    /// Classify a labeled stream at threshold 0.5 (p ≥ 0.5 is positive).
    pub fn evaluate<S: AsRef<str>>(&self, labeled: &[(S, bool)]) -> Result<EvalReport> {
        if labeled.is_empty() {
            return Err(Error::EmptyInput("evaluation stream"));
        }
        let mut report = EvalReport::default();
        for (text, label) in labeled {
            let predicted = self.predict_proba(text.as_ref()) >= 0.5;
            match (predicted, *label) {
                (true, true) => report.true_positives += 1,
                (true, false) => report.false_positives += 1,
                (false, true) => report.false_negatives += 1,
                (false, false) => report.true_negatives += 1,
            }
        }
        report.derive_metrics();
        Ok(report)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let json = serde_json::to_string(self).expect("model serializes");
        std::fs::write(path, json).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<ScorerModel> {
        let text = corpus::read_text(path)?;
        let model: ScorerModel = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: e.to_string(),
        })?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported model format version {}",
                model.format_version
            )));
        }
        if !model.dim.is_power_of_two() || model.weights.len() != model.dim {
            return Err(Error::InvalidArgument(
                "model dimension and weight vector are inconsistent".to_string(),
            ));
        }
        if model.weights.iter().any(|w| !w.is_finite()) || !model.bias.is_finite() {
            return Err(Error::InvalidArgument("model weights are not finite".to_string()));
        }
        Ok(model)
    }
}

/// Binary classification quality at threshold 0.5.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: u64,
    pub false_positives: u64,
    pub false_negatives: u64,
    pub true_negatives: u64,
}

impl EvalReport {
    /// Recompute the derived metrics from the confusion counts. Ratios with
    /// a zero denominator are reported as 0.
    pub fn derive_metrics(&mut self) {
        let tp = self.true_positives as f64;
        let fp = self.false_positives as f64;
        let fn_ = self.false_negatives as f64;
        let tn = self.true_negatives as f64;
        let total = tp + fp + fn_ + tn;
        self.accuracy = if total > 0.0 { (tp + tn) / total } else { 0.0 };
        self.precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
        self.recall = if tp + fn_ > 0.0 { tp / (tp + fn_) } else { 0.0 };
        self.f1 = if self.precision + self.recall > 0.0 {
            2.0 * self.precision * self.recall / (self.precision + self.recall)
        } else {
            0.0
        };
    }
}

/// Key of one externally scored candidate.
pub type ScoreKey = (String, u64, usize);

pub const SCORES_HEADER: &str = "book_id\tsent_id\tcand_idx\tp_original";

/// Load externally computed scores: TSV `book_id	sent_id	cand_idx	p_original`.
/// A leading header line matching the column names is skipped.
pub fn load_scores(path: &Path) -> Result<BTreeMap<ScoreKey, f64>> {
    let text = corpus::read_text(path)?;
    let mut scores = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() || (idx == 0 && line == SCORES_HEADER) {
            continue;
        }
        let lineno = idx + 1;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(parse_err(format!(
                "expected 4 tab-separated columns, got {}",
                cols.len()
            )));
        }
        let sent_id: u64 = cols[1]
            .parse()
            .map_err(|_| parse_err(format!("invalid sent_id `{}`", cols[1])))?;
        let cand_idx: usize = cols[2]
            .parse()
            .map_err(|_| parse_err(format!("invalid cand_idx `{}`", cols[2])))?;
        let p: f64 = cols[3]
            .parse()
            .map_err(|_| parse_err(format!("invalid probability `{}`", cols[3])))?;
        if !(0.0..=1.0).contains(&p) || p.is_nan() {
            return Err(parse_err(format!("p_original = {p} outside [0,1]")));
        }
        let key = (cols[0].to_string(), sent_id, cand_idx);
        if scores.insert(key, p).is_some() {
            return Err(parse_err(format!(
                "duplicate key ({}, {sent_id}, {cand_idx})",
                cols[0]
            )));
        }
    }
    Ok(scores)
}
