//! Stochastic gradient-boosted regression trees.

mod tree;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use tree::{BinnedRows, Binning, Node};

pub const FORMAT: &str = "mutsel-gbdt";
pub const VERSION: u32 = 1;
const PROB_CLIP: f64 = 1e-15;
pub const HESSIAN_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Loss {
    BinaryLogistic,
    SquaredOnRatio,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GbdtConfig {
    pub trees: usize,
    pub depth: usize,
    pub eta: f64,
    pub subsample: f64,
    pub max_thresholds: usize,
    pub seed: u64,
    pub loss: Loss,
}

impl Default for GbdtConfig {
    fn default() -> Self {
        GbdtConfig {
            trees: 1000,
            depth: 5,
            eta: 0.1,
            subsample: 0.5,
            max_thresholds: 64,
            seed: 0,
            loss: Loss::BinaryLogistic,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("unsupported model version {found} (expected {VERSION})")]
    Version { found: u32 },
    #[error("corrupt model payload: {0}")]
    Corrupt(String),
    #[error("feature schema mismatch: model {expected}, input {found}")]
    SchemaMismatch { expected: String, found: String },
    #[error("vector has {found} features, model expects {expected}")]
    Length { expected: usize, found: usize },
    #[error("{0}")]
    Dataset(String),
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn logit(p: f64) -> f64 {
    let p = p.clamp(PROB_CLIP, 1.0 - PROB_CLIP);
    (p / (1.0 - p)).ln()
}

/// Logistic loss of raw score `f` for label `y`.
pub fn logistic_loss(y: f64, f: f64) -> f64 {
    // log(1 + e^f) - y f, computed stably.
    let softplus = if f > 0.0 { f + (-f).exp().ln_1p() } else { f.exp().ln_1p() };
    softplus - y * f
}

/// Negative gradient of the logistic loss with respect to the raw score.
pub fn logistic_gradient(y: f64, f: f64) -> f64 {
    y - sigmoid(f)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoostedModel {
    pub format: String,
    pub version: u32,
    pub initial_score: f64,
    pub eta: f64,
    pub loss: Loss,
    pub schema_hash: String,
    pub n_features: usize,
    pub trees: Vec<Node>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Mean training loss on the full set, before the first tree and after
    /// each one.
    pub loss_history: Vec<f64>,
    pub warnings: Vec<String>,
}

impl BoostedModel {
    pub fn constant(initial_score: f64, loss: Loss, schema_hash: &str, n_features: usize) -> Self {
        BoostedModel {
            format: FORMAT.to_string(),
            version: VERSION,
            initial_score,
            eta: 0.0,
            loss,
            schema_hash: schema_hash.to_string(),
            n_features,
            trees: Vec::new(),
        }
    }

    pub fn raw_score(&self, x: &[f64]) -> f64 {
        self.initial_score + self.eta * self.trees.iter().map(|t| t.eval(x)).sum::<f64>()
    }

    fn link(&self, f: f64) -> f64 {
        match self.loss {
            Loss::BinaryLogistic => sigmoid(f),
            Loss::SquaredOnRatio => f.clamp(0.0, 1.0),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64, ModelError> {
        if x.len() != self.n_features {
            return Err(ModelError::Length {
                expected: self.n_features,
                found: x.len(),
            });
        }
        Ok(self.link(self.raw_score(x)))
    }

    /// As `predict`, also verifying the vector's schema.
    pub fn predict_checked(&self, schema_hash: &str, x: &[f64]) -> Result<f64, ModelError> {
        if schema_hash != self.schema_hash {
            return Err(ModelError::SchemaMismatch {
                expected: self.schema_hash.clone(),
                found: schema_hash.to_string(),
            });
        }
        self.predict(x)
    }

    pub fn max_depth(&self) -> usize {
        self.trees.iter().map(Node::depth).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        #[derive(Deserialize)]
        struct Head {
            format: String,
            version: u32,
        }
        let head: Head = serde_json::from_str(text).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        if head.format != FORMAT {
            return Err(ModelError::Corrupt(format!("unknown format {:?}", head.format)));
        }
        if head.version != VERSION {
            return Err(ModelError::Version { found: head.version });
        }
        let m: BoostedModel = serde_json::from_str(text).map_err(|e| ModelError::Corrupt(e.to_string()))?;
        if let Some(bad) = m.trees.iter().find_map(|t| t.max_feature().filter(|&f| f >= m.n_features)) {
            return Err(ModelError::Corrupt(format!("split on feature {bad} out of range")));
        }
        Ok(m)
    }
}

/// Row order independent of input order: lexicographic on features, then
/// label.
fn canonical_order(x: &[Vec<f64>], y: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| {
        x[a].iter()
            .zip(&x[b])
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(y[a].total_cmp(&y[b]))
    });
    idx
}

fn mean_loss(loss: Loss, y: &[f64], f: &[f64]) -> f64 {
    let total: f64 = y
        .iter()
        .zip(f)
        .map(|(&y, &f)| match loss {
            Loss::BinaryLogistic => logistic_loss(y, f),
            Loss::SquaredOnRatio => 0.5 * (y - f) * (y - f),
        })
        .sum();
    total / y.len().max(1) as f64
}

/// Fit a model on rows `x` with targets `y` (0/1 labels, or ratios in
/// squared mode).
pub fn train(
    x: &[Vec<f64>],
    y: &[f64],
    cfg: &GbdtConfig,
    schema_hash: &str,
) -> Result<(BoostedModel, TrainReport), ModelError> {
    if x.len() != y.len() {
        return Err(ModelError::Dataset("row and label counts differ".into()));
    }
    if x.is_empty() {
        return Err(ModelError::Dataset("empty training set".into()));
    }
    let n_features = x[0].len();
    if let Some(r) = x.iter().find(|r| r.len() != n_features) {
        return Err(ModelError::Length {
            expected: n_features,
            found: r.len(),
        });
    }
    if y.iter().any(|v| !(0.0..=1.0).contains(v)) {
        return Err(ModelError::Dataset("targets must lie in [0, 1]".into()));
    }

    let order = canonical_order(x, y);
    let x: Vec<&[f64]> = order.iter().map(|&i| x[i].as_slice()).collect();
    let y: Vec<f64> = order.iter().map(|&i| y[i]).collect();
    let n = y.len();
    let mean = y.iter().sum::<f64>() / n as f64;
    let initial_score = match cfg.loss {
        Loss::BinaryLogistic => logit(mean),
        Loss::SquaredOnRatio => mean,
    };
    let mut report = TrainReport::default();
    let mut model = BoostedModel::constant(initial_score, cfg.loss, schema_hash, n_features);
    model.eta = cfg.eta;

    let degenerate = y.iter().all(|&v| v == y[0]);
    if degenerate && cfg.loss == Loss::BinaryLogistic {
        let msg = format!("all {n} labels equal {}; using a constant model", y[0]);
        log::warn!("{msg}");
        report.warnings.push(msg);
        model.eta = 0.0;
        return Ok((model, report));
    }

    let binning = Binning::fit(&x, cfg.max_thresholds);
    let data = BinnedRows::new(&binning, &x);
    let mut f = vec![initial_score; n];
    report.loss_history.push(mean_loss(cfg.loss, &y, &f));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let take = ((cfg.subsample.clamp(0.0, 1.0) * n as f64).floor() as usize).clamp(1, n);
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];

    for _ in 0..cfg.trees {
        for i in 0..n {
            let (g, h) = match cfg.loss {
                Loss::BinaryLogistic => {
                    let p = sigmoid(f[i]);
                    (y[i] - p, p * (1.0 - p))
                }
                Loss::SquaredOnRatio => (y[i] - f[i], 1.0),
            };
            grad[i] = g;
            hess[i] = h;
        }
        let mut rows: Vec<usize> = if take == n {
            (0..n).collect()
        } else {
            sample(&mut rng, n, take).into_vec()
        };
        rows.sort_unstable();
        let t = tree::grow(&data, &binning, &grad, &hess, rows, cfg.depth);
        for i in 0..n {
            f[i] += cfg.eta * t.eval(x[i]);
        }
        model.trees.push(t);
        report.loss_history.push(mean_loss(cfg.loss, &y, &f));
    }
    Ok((model, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn separable_pair_is_fit() {
        let x = vec![vec![0.0], vec![1.0]];
        let y = vec![0.0, 1.0];
        let cfg = GbdtConfig {
            trees: 50,
            depth: 1,
            subsample: 1.0,
            ..GbdtConfig::default()
        };
        let (m, _) = train(&x, &y, &cfg, "s").unwrap();
        assert!(m.predict(&[0.0]).unwrap() < 0.05);
        assert!(m.predict(&[1.0]).unwrap() > 0.95);
    }

    #[test]
    fn all_zero_labels_give_a_constant_model() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0]];
        let (m, rep) = train(&x, &[0.0; 3], &GbdtConfig::default(), "s").unwrap();
        assert!(m.trees.is_empty());
        assert_eq!(rep.warnings.len(), 1);
        for v in [0.0, 5.0] {
            assert!(m.predict(&[v]).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn balanced_labels_without_trees_predict_half() {
        let x = vec![vec![0.0], vec![1.0]];
        let cfg = GbdtConfig {
            trees: 0,
            ..GbdtConfig::default()
        };
        let (m, _) = train(&x, &[0.0, 1.0], &cfg, "s").unwrap();
        assert_eq!(m.predict(&[0.3]).unwrap(), 0.5);
    }

    #[test]
    fn single_stump_prediction_by_hand() {
        let m = BoostedModel {
            trees: vec![Node::Split {
                feature: 0,
                threshold: 0.5,
                left: Box::new(Node::Leaf(-2.0)),
                right: Box::new(Node::Leaf(3.0)),
            }],
            eta: 0.1,
            ..BoostedModel::constant(0.25, Loss::BinaryLogistic, "s", 1)
        };
        let expect = 1.0 / (1.0 + (-(0.25 + 0.1 * 3.0f64)).exp());
        assert_eq!(m.predict(&[0.9]).unwrap(), expect);
        assert_eq!(m.predict(&[0.5]).unwrap(), sigmoid(0.25 - 0.2));
    }

    #[test]
    fn serialization_errors() {
        let m = BoostedModel::constant(0.0, Loss::BinaryLogistic, "abc", 2);
        let text = m.to_json();
        assert_eq!(BoostedModel::from_json(&text).unwrap(), m);
        assert!(matches!(
            BoostedModel::from_json(&text[..text.len() / 2]),
            Err(ModelError::Corrupt(_))
        ));
        let bumped = text.replace("\"version\": 1", "\"version\": 9");
        assert_eq!(BoostedModel::from_json(&bumped), Err(ModelError::Version { found: 9 }));
        assert!(matches!(m.predict_checked("xyz", &[0.0, 0.0]), Err(ModelError::SchemaMismatch { .. })));
        assert!(matches!(m.predict(&[0.0]), Err(ModelError::Length { .. })));
    }

    #[test]
    fn squared_mode_clips_to_unit_interval() {
        let x: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..20).map(|i| if i < 10 { 0.0 } else { 1.0 }).collect();
        let cfg = GbdtConfig {
            trees: 30,
            loss: Loss::SquaredOnRatio,
            subsample: 1.0,
            eta: 0.5,
            ..GbdtConfig::default()
        };
        let (m, rep) = train(&x, &y, &cfg, "s").unwrap();
        for r in &x {
            let p = m.predict(r).unwrap();
            assert!((0.0..=1.0).contains(&p));
        }
        assert!(rep.loss_history.last().unwrap() < &0.01);
    }

    #[test]
    fn tiny_learning_rate_stays_at_base_rate() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| f64::from(u8::from(i % 3 == 0))).collect();
        let cfg = GbdtConfig {
            trees: 1,
            eta: 1e-9,
            ..GbdtConfig::default()
        };
        let (m, _) = train(&x, &y, &cfg, "s").unwrap();
        for r in &x {
            assert!((m.predict(r).unwrap() - 0.4).abs() < 1e-6);
        }
    }

    fn dataset() -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
        prop::collection::vec((prop::collection::vec(0.0f64..1.0, 3), prop::bool::ANY), 4..40)
            .prop_map(|rows| rows.into_iter().map(|(x, b)| (x, f64::from(u8::from(b)))).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn row_permutation_does_not_change_predictions(rows in dataset(), seed in 0u64..1000) {
            let cfg = GbdtConfig { trees: 10, depth: 3, seed, ..GbdtConfig::default() };
            let (x, y): (Vec<_>, Vec<_>) = rows.iter().cloned().unzip();
            let (xr, yr): (Vec<_>, Vec<_>) = rows.iter().rev().cloned().unzip();
            let (a, _) = train(&x, &y, &cfg, "s").unwrap();
            let (b, _) = train(&xr, &yr, &cfg, "s").unwrap();
            for r in &x {
                prop_assert_eq!(a.predict(r).unwrap(), b.predict(r).unwrap());
            }
        }

        #[test]
        fn depth_is_bounded(rows in dataset(), depth in 1usize..5) {
            let cfg = GbdtConfig { trees: 5, depth, ..GbdtConfig::default() };
            let (x, y): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
            let (m, _) = train(&x, &y, &cfg, "s").unwrap();
            prop_assert!(m.max_depth() <= depth);
        }

        #[test]
        fn json_round_trip_is_exact(rows in dataset()) {
            let cfg = GbdtConfig { trees: 8, depth: 3, ..GbdtConfig::default() };
            let (x, y): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
            let (m, _) = train(&x, &y, &cfg, "s").unwrap();
            let back = BoostedModel::from_json(&m.to_json()).unwrap();
            for r in &x {
                prop_assert_eq!(m.predict(r).unwrap().to_bits(), back.predict(r).unwrap().to_bits());
            }
        }
    }
}
