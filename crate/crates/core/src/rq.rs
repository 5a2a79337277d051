//! Rhetorical-question classifier: hand-crafted features plus optional mean
//! word embeddings, fed to an L2-regularized logistic model.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{fallback_tokenize, is_punctuation, normalize_word};
use crate::error::{Error, Result};
use crate::lexicons::NegationMarkerList;

pub const MODALS: [&str; 9] = ["can", "could", "may", "might", "must", "shall", "should", "will", "would"];
pub const INTERROGATIVES: [&str; 9] = ["who", "what", "when", "where", "why", "which", "whose", "whom", "how"];
pub const PRONOUNS: [&str; 34] = [
    "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "yourselves", "he", "him", "his", "himself",
    "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our", "ours", "ourselves", "they", "them",
    "their", "theirs", "themselves", "u", "ur", "ya",
];

const HAND_FEATURES: [&str; 6] = [
    "modal_count",
    "pronoun_count",
    "interrogative_count",
    "negation_count",
    "question_position",
    "token_count",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RqLabel {
    #[serde(rename = "RQ")]
    Rq,
    #[serde(rename = "INFO")]
    InfoSeeking,
}

impl RqLabel {
    fn sign(self) -> f64 {
        match self {
            RqLabel::Rq => 1.0,
            RqLabel::InfoSeeking => -1.0,
        }
    }
}

impl fmt::Display for RqLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RqLabel::Rq => "RQ",
            RqLabel::InfoSeeking => "INFO",
        })
    }
}

impl FromStr for RqLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "RQ" => Ok(RqLabel::Rq),
            "INFO" | "INFOSEEKING" => Ok(RqLabel::InfoSeeking),
            other => Err(format!("unknown RQ label `{other}` (expected RQ or INFO)")),
        }
    }
}

/// Word vectors from a plain-text `word v1 ... vd` file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Embeddings {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl Embeddings {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut emb = Embeddings::default();
        for (n, line) in text.lines().enumerate() {
            let mut parts = line.split_whitespace();
            let Some(word) = parts.next() else { continue };
            let vec: Vec<f64> = parts
                .map(|x| x.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::malformed(origin, n + 1, "non-numeric embedding value"))?;
            if emb.vectors.is_empty() {
                emb.dim = vec.len();
            }
            if vec.len() != emb.dim || vec.is_empty() {
                return Err(Error::malformed(
                    origin,
                    n + 1,
                    format!("expected {} dimensions, found {}", emb.dim, vec.len()),
                ));
            }
            emb.vectors.insert(normalize_word(word), vec);
        }
        Ok(emb)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.vectors.get(word).map(Vec::as_slice)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RqFeatureVector {
    pub modal_count: usize,
    pub pronoun_count: usize,
    pub interrogative_count: usize,
    pub negation_count: usize,
    /// Index of the first token containing `?` divided by (tokens − 1).
    pub question_position: f64,
    /// Word tokens, punctuation excluded.
    pub token_count: usize,
    /// Mean over words found in the lookup; empty without embeddings.
    pub embedding: Vec<f64>,
}

impl RqFeatureVector {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![
            self.modal_count as f64,
            self.pronoun_count as f64,
            self.interrogative_count as f64,
            self.negation_count as f64,
            self.question_position,
            self.token_count as f64,
        ];
        v.extend_from_slice(&self.embedding);
        v
    }
}

fn modal_stem(word: &str) -> &str {
    let stem = word.strip_suffix("n't").unwrap_or(word);
    match stem {
        "ca" | "cannot" => "can",
        "wo" => "will",
        "sha" => "shall",
        s => s,
    }
}

pub fn extract_rq_features(
    text: &str,
    negation: &NegationMarkerList,
    embeddings: Option<&Embeddings>,
) -> Result<RqFeatureVector> {
    let tokens: Vec<String> = fallback_tokenize(text).iter().map(|t| normalize_word(t)).collect();
    let Some(q) = tokens.iter().position(|t| t.contains('?')) else {
        return Err(Error::NoQuestionMark(text.to_string()));
    };
    let question_position = if tokens.len() <= 1 {
        1.0
    } else {
        q as f64 / (tokens.len() - 1) as f64
    };
    let words: Vec<&String> = tokens.iter().filter(|t| !is_punctuation(t)).collect();
    let count = |pred: &dyn Fn(&str) -> bool| words.iter().filter(|w| pred(w)).count();
    let embedding = match embeddings {
        Some(emb) => {
            let mut sum = vec![0.0; emb.dim()];
            let mut found = 0usize;
            for w in &words {
                if let Some(v) = emb.get(w) {
                    sum.iter_mut().zip(v).for_each(|(a, b)| *a += b);
                    found += 1;
                }
            }
            if found > 0 {
                sum.iter_mut().for_each(|x| *x /= found as f64);
            }
            sum
        }
        None => Vec::new(),
    };
    Ok(RqFeatureVector {
        modal_count: count(&|w| MODALS.contains(&modal_stem(w))),
        pronoun_count: count(&|w| PRONOUNS.contains(&w)),
        interrogative_count: count(&|w| INTERROGATIVES.contains(&w)),
        negation_count: count(&|w| negation.contains(w)),
        question_position,
        token_count: words.len(),
        embedding,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RqConfig {
    pub lambda: f64,
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the loss decreases by less than this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for RqConfig {
    fn default() -> Self {
        RqConfig {
            lambda: 1e-3,
            learning_rate: 0.5,
            max_epochs: 5000,
            tolerance: 1e-6,
            seed: 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub loss: f64,
    pub epochs: usize,
    pub converged: bool,
    pub training_accuracy: f64,
    pub examples: usize,
    pub config: RqConfig,
}

/// Self-contained linear model: feature scaling is stored with the weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RqModel {
    pub schema: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub embedding_dim: usize,
    pub seed: u64,
    pub metadata: TrainingMetadata,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RqPrediction {
    pub label: RqLabel,
    pub score: f64,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^x) without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Mean logistic loss plus (λ/2)·‖w‖², with its gradient in w and b.
/// `ys` holds ±1.
pub fn loss_and_gradient(weights: &[f64], bias: f64, xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> (f64, Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut loss = 0.0;
    let mut gw = vec![0.0; weights.len()];
    let mut gb = 0.0;
    for (x, &y) in xs.iter().zip(ys) {
        let margin = y * (dot(weights, x) + bias);
        loss += softplus(-margin);
        let coef = -y * sigmoid(-margin);
        gw.iter_mut().zip(x).for_each(|(g, xi)| *g += coef * xi);
        gb += coef;
    }
    loss /= n;
    gw.iter_mut().zip(weights).for_each(|(g, w)| *g = *g / n + lambda * w);
    loss += 0.5 * lambda * weights.iter().map(|w| w * w).sum::<f64>();
    (loss, gw, gb / n)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Trains on precomputed raw feature vectors.
pub fn train_on_features(xs: &[Vec<f64>], labels: &[RqLabel], schema: Vec<String>, config: &RqConfig) -> Result<RqModel> {
    if xs.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: labels.len(),
        });
    }
    let has = |l: RqLabel| labels.contains(&l);
    match (has(RqLabel::Rq), has(RqLabel::InfoSeeking)) {
        (true, true) => {}
        (false, false) => return Err(Error::EmptyInput("RQ training data".into())),
        (true, false) => return Err(Error::SingleClass("RQ".into())),
        (false, true) => return Err(Error::SingleClass("INFO".into())),
    }
    let d = schema.len();
    if let Some(bad) = xs.iter().find(|x| x.len() != d) {
        return Err(Error::LengthMismatch {
            left: bad.len(),
            right: d,
        });
    }
    let n = xs.len() as f64;
    let means: Vec<f64> = (0..d).map(|k| xs.iter().map(|x| x[k]).sum::<f64>() / n).collect();
    let stds: Vec<f64> = (0..d)
        .map(|k| {
            let var = xs.iter().map(|x| (x[k] - means[k]).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    let scaled: Vec<Vec<f64>> = xs
        .iter()
        .map(|x| (0..d).map(|k| (x[k] - means[k]) / stds[k]).collect())
        .collect();
    let ys: Vec<f64> = labels.iter().map(|l| l.sign()).collect();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut weights: Vec<f64> = (0..d).map(|_| rng.gen_range(-1e-4..1e-4)).collect();
    let mut bias = 0.0;
    let (mut loss, mut gw, mut gb) = loss_and_gradient(&weights, bias, &scaled, &ys, config.lambda);
    let mut epochs = 0;
    let mut converged = false;
    while epochs < config.max_epochs {
        weights.iter_mut().zip(&gw).for_each(|(w, g)| *w -= config.learning_rate * g);
        bias -= config.learning_rate * gb;
        epochs += 1;
        let (next, ngw, ngb) = loss_and_gradient(&weights, bias, &scaled, &ys, config.lambda);
        let decrease = loss - next;
        loss = next;
        gw = ngw;
        gb = ngb;
        if decrease.abs() < config.tolerance {
            converged = true;
            break;
        }
    }
    let correct = scaled
        .iter()
        .zip(&ys)
        .filter(|(x, &y)| (dot(&weights, x) + bias >= 0.0) == (y > 0.0))
        .count();
    let embedding_dim = schema.iter().filter(|s| s.starts_with("emb_")).count();
    Ok(RqModel {
        schema,
        weights,
        bias,
        means,
        stds,
        embedding_dim,
        seed: config.seed,
        metadata: TrainingMetadata {
            loss,
            epochs,
            converged,
            training_accuracy: correct as f64 / n,
            examples: xs.len(),
            config: *config,
        },
    })
}

fn schema(embedding_dim: usize) -> Vec<String> {
    HAND_FEATURES
        .iter()
        .map(|s| s.to_string())
        .chain((0..embedding_dim).map(|k| format!("emb_{k}")))
        .collect()
}

pub fn train_rq_classifier(
    labeled: &[(RqLabel, String)],
    config: &RqConfig,
    negation: &NegationMarkerList,
    embeddings: Option<&Embeddings>,
) -> Result<RqModel> {
    let xs = labeled
        .iter()
        .map(|(_, text)| extract_rq_features(text, negation, embeddings).map(|f| f.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<RqLabel> = labeled.iter().map(|(l, _)| *l).collect();
    train_on_features(&xs, &labels, schema(embeddings.map_or(0, Embeddings::dim)), config)
}

impl RqModel {
    /// Raw margin for an unscaled feature vector.
    pub fn margin(&self, raw: &[f64]) -> f64 {
        let scaled = raw
            .iter()
            .zip(self.means.iter().zip(&self.stds))
            .map(|(x, (m, s))| (x - m) / s);
        self.weights.iter().zip(scaled).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    pub fn predict_features(&self, raw: &[f64]) -> RqPrediction {
        let score = sigmoid(self.margin(raw));
        let label = if score >= 0.5 { RqLabel::Rq } else { RqLabel::InfoSeeking };
        RqPrediction { label, score }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let model: RqModel = serde_json::from_str(&text)?;
        let d = model.schema.len();
        if model.weights.len() != d || model.means.len() != d || model.stds.len() != d {
            return Err(Error::Config(format!("{}: model vectors do not match its schema", path.display())));
        }
        Ok(model)
    }
}

pub fn predict_rq(
    model: &RqModel,
    text: &str,
    negation: &NegationMarkerList,
    embeddings: Option<&Embeddings>,
) -> Result<RqPrediction> {
    let features = extract_rq_features(text, negation, embeddings)?;
    if features.embedding.len() != model.embedding_dim {
        return Err(Error::Config(format!(
            "model expects {} embedding dimensions, got {}",
            model.embedding_dim,
            features.embedding.len()
        )));
    }
    Ok(model.predict_features(&features.to_vec()))
}

/// Reads `label<TAB>text` lines (label RQ or INFO).
pub fn load_training_data(path: impl AsRef<Path>) -> Result<Vec<(RqLabel, String)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_training_data(&text, &path.display().to_string())
}

pub fn parse_training_data(text: &str, origin: &str) -> Result<Vec<(RqLabel, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (label, body) = line
            .split_once('\t')
            .ok_or_else(|| Error::malformed(origin, n + 1, "expected `label<TAB>text`"))?;
        if n == 0 && label.trim().eq_ignore_ascii_case("label") {
            continue;
        }
        let label: RqLabel = label.parse().map_err(|e: String| Error::malformed(origin, n + 1, e))?;
        out.push((label, body.trim().to_string()));
    }
    Ok(out)
}
