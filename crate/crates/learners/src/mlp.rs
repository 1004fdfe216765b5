//! Fully connected ReLU network with a two-way softmax head, trained with Adam
//! on mean cross-entropy.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repostlab_core::FeatureTable;
use serde::{Deserialize, Serialize};

use crate::error::{LearnError, Result};
use crate::matrix::{check_labels, Matrix};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MlpConfig {
    pub hidden: Vec<usize>,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    /// Epochs without improvement of the monitored loss before stopping.
    pub patience: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: vec![128, 128, 64],
            learning_rate: 0.001,
            batch_size: 40,
            max_epochs: 200,
            patience: 10,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-7,
            seed: 0,
        }
    }
}

mod b64 {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let bytes: Vec<u8> = v.iter().flat_map(|x| x.to_le_bytes()).collect();
        s.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let text = String::deserialize(d)?;
        let bytes = STANDARD.decode(text).map_err(serde::de::Error::custom)?;
        if bytes.len() % 8 != 0 {
            return Err(serde::de::Error::custom("tensor byte length is not a multiple of 8"));
        }
        Ok(bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }
}

/// Mean imputation, z-scoring, and missingness indicators for columns that had
/// NaN during fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
    pub missing: Vec<usize>,
}

impl Standardizer {
    pub fn fit(x: &Matrix) -> Self {
        let mut means = Vec::with_capacity(x.cols());
        let mut scales = Vec::with_capacity(x.cols());
        let mut missing = Vec::new();
        for j in 0..x.cols() {
            let col = x.column(j);
            let present: Vec<f64> = col.iter().copied().filter(|v| !v.is_nan()).collect();
            if present.len() < col.len() {
                missing.push(j);
            }
            let mean = if present.is_empty() { 0.0 } else { present.iter().sum::<f64>() / present.len() as f64 };
            let var = if present.is_empty() {
                0.0
            } else {
                present.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / present.len() as f64
            };
            means.push(mean);
            scales.push(if var > 0.0 { var.sqrt() } else { 1.0 });
        }
        Standardizer { means, scales, missing }
    }

    pub fn width(&self) -> usize {
        self.means.len() + self.missing.len()
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = row
            .iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(&v, (&m, &s))| if v.is_nan() { 0.0 } else { (v - m) / s })
            .collect();
        out.extend(self.missing.iter().map(|&j| if row[j].is_nan() { 1.0 } else { 0.0 }));
        out
    }

    pub fn transform(&self, x: &Matrix) -> Vec<Vec<f64>> {
        (0..x.rows()).map(|i| self.transform_row(x.row(i))).collect()
    }
}

/// `weights` is row-major `outputs × inputs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    #[serde(with = "b64")]
    pub weights: Vec<f64>,
    #[serde(with = "b64")]
    pub bias: Vec<f64>,
}

impl Dense {
    fn zeros(inputs: usize, outputs: usize) -> Self {
        Dense {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    fn he_uniform(inputs: usize, outputs: usize, rng: &mut ChaCha8Rng) -> Self {
        let limit = (6.0 / inputs.max(1) as f64).sqrt();
        Dense {
            inputs,
            outputs,
            weights: (0..inputs * outputs).map(|_| rng.random_range(-limit..limit)).collect(),
            bias: vec![0.0; outputs],
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        (0..self.outputs)
            .map(|o| {
                let w = &self.weights[o * self.inputs..(o + 1) * self.inputs];
                self.bias[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>()
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNetwork {
    pub layers: Vec<Dense>,
}

fn log_softmax(z: &[f64]) -> Vec<f64> {
    let m = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + z.iter().map(|v| (v - m).exp()).sum::<f64>().ln();
    z.iter().map(|v| v - lse).collect()
}

impl MlpNetwork {
    /// He-uniform hidden layers and a zero output layer.
    pub fn new(inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut net = MlpNetwork::random(inputs, hidden, seed);
        let last = net.layers.last_mut().expect("output layer");
        *last = Dense::zeros(last.inputs, 2);
        net
    }

    /// He-uniform everywhere, including the output layer.
    pub fn random(inputs: usize, hidden: &[usize], seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::with_capacity(hidden.len() + 1);
        let mut prev = inputs;
        for &w in hidden.iter().chain(std::iter::once(&2)) {
            layers.push(Dense::he_uniform(prev, w, &mut rng));
            prev = w;
        }
        MlpNetwork { layers }
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs
    }

    /// Layer inputs followed by the output logits.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut z = layer.apply(acts.last().expect("input"));
            if l < last {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            acts.push(z);
        }
        acts
    }

    /// Which hidden units are active (pre-activation > 0) for input `x`.
    pub fn relu_pattern(&self, x: &[f64]) -> Vec<bool> {
        let acts = self.activations(x);
        acts[1..acts.len() - 1].iter().flatten().map(|&a| a > 0.0).collect()
    }

    /// Softmax probabilities `(p0, p1)`.
    pub fn predict_pair(&self, x: &[f64]) -> [f64; 2] {
        let ls = log_softmax(self.activations(x).last().expect("logits"));
        let p1 = ls[1].exp();
        [1.0 - p1, p1]
    }

    /// Mean cross-entropy.
    pub fn loss(&self, xs: &[Vec<f64>], ys: &[u8]) -> f64 {
        let total: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| -log_softmax(self.activations(x).last().expect("logits"))[y as usize])
            .sum();
        total / xs.len().max(1) as f64
    }

    /// Mean cross-entropy and its gradient, laid out like the layers.
    pub fn loss_and_gradient(&self, xs: &[Vec<f64>], ys: &[u8]) -> (f64, Vec<Dense>) {
        let mut grads: Vec<Dense> = self.layers.iter().map(|l| Dense::zeros(l.inputs, l.outputs)).collect();
        let scale = 1.0 / xs.len().max(1) as f64;
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let acts = self.activations(x);
            let ls = log_softmax(acts.last().expect("logits"));
            loss -= ls[y as usize];
            let mut delta: Vec<f64> = ls.iter().enumerate().map(|(k, v)| (v.exp() - f64::from(u8::from(k == y as usize))) * scale).collect();
            for l in (0..self.layers.len()).rev() {
                let layer = &self.layers[l];
                let input = &acts[l];
                let g = &mut grads[l];
                for o in 0..layer.outputs {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    g.bias[o] += d;
                    let row = &mut g.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (w, a) in row.iter_mut().zip(input) {
                        *w += d * a;
                    }
                }
                if l == 0 {
                    break;
                }
                let mut prev = vec![0.0; layer.inputs];
                for o in 0..layer.outputs {
                    let d = delta[o];
                    if d == 0.0 {
                        continue;
                    }
                    let w = &layer.weights[o * layer.inputs..(o + 1) * layer.inputs];
                    for (p, wi) in prev.iter_mut().zip(w) {
                        *p += d * wi;
                    }
                }
                for (p, a) in prev.iter_mut().zip(input) {
                    if *a <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
        (loss * scale, grads)
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    fn locate(&self, mut k: usize) -> (usize, bool, usize) {
        for (l, layer) in self.layers.iter().enumerate() {
            if k < layer.weights.len() {
                return (l, true, k);
            }
            k -= layer.weights.len();
            if k < layer.bias.len() {
                return (l, false, k);
            }
            k -= layer.bias.len();
        }
        panic!("parameter index out of range");
    }

    /// Flat parameter `k`: each layer's weights, then its bias, layer by layer.
    pub fn param(&self, k: usize) -> f64 {
        let (l, w, i) = self.locate(k);
        if w {
            self.layers[l].weights[i]
        } else {
            self.layers[l].bias[i]
        }
    }

    pub fn set_param(&mut self, k: usize, v: f64) {
        let (l, w, i) = self.locate(k);
        if w {
            self.layers[l].weights[i] = v;
        } else {
            self.layers[l].bias[i] = v;
        }
    }

    /// Flattens a gradient in [`MlpNetwork::param`] order.
    pub fn flatten(grads: &[Dense]) -> Vec<f64> {
        grads.iter().flat_map(|g| g.weights.iter().chain(&g.bias).copied()).collect()
    }

    fn apply_flat(&mut self, update: &[f64]) {
        let mut k = 0;
        for layer in &mut self.layers {
            for p in layer.weights.iter_mut().chain(layer.bias.iter_mut()) {
                *p += update[k];
                k += 1;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub feature_names: Vec<String>,
    pub config: MlpConfig,
    pub standardizer: Standardizer,
    pub network: MlpNetwork,
    pub epochs: usize,
    pub best_loss: f64,
}

impl MlpModel {
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        if x.cols() != self.feature_names.len() {
            return Err(LearnError::SchemaMismatch {
                expected: format!("{} features", self.feature_names.len()),
                found: format!("{} columns", x.cols()),
            });
        }
        Ok((0..x.rows())
            .map(|i| self.network.predict_pair(&self.standardizer.transform_row(x.row(i)))[1])
            .collect())
    }

    pub fn predict_labels(&self, x: &Matrix) -> Result<Vec<u8>> {
        Ok(self.predict_proba(x)?.into_iter().map(|p| u8::from(p >= 0.5)).collect())
    }

    pub fn predict_table(&self, table: &FeatureTable) -> Result<Vec<f64>> {
        let t = table.select_columns(&self.feature_names)?;
        self.predict_proba(&Matrix::from_table(&t))
    }
}

/// Trains with early stopping on validation loss (training loss without a
/// validation set) and restores the best epoch's weights.
pub fn mlp_train(x: &Matrix, y: &[u8], cfg: &MlpConfig, val: Option<(&Matrix, &[u8])>, feature_names: Vec<String>) -> Result<MlpModel> {
    check_labels(y, x.rows())?;
    if feature_names.len() != x.cols() {
        return Err(LearnError::Shape(format!("{} feature names for {} columns", feature_names.len(), x.cols())));
    }
    if x.rows() == 0 {
        return Err(LearnError::Shape("no training rows".into()));
    }
    if cfg.batch_size == 0 || cfg.max_epochs == 0 || !(cfg.learning_rate > 0.0) {
        return Err(LearnError::Params("batch_size, max_epochs and learning_rate must be positive".into()));
    }
    let standardizer = Standardizer::fit(x);
    let xs = standardizer.transform(x);
    let val_set = match val {
        Some((vx, vy)) => {
            check_labels(vy, vx.rows())?;
            if vx.cols() != x.cols() {
                return Err(LearnError::Shape(format!("validation has {} columns, training {}", vx.cols(), x.cols())));
            }
            Some((standardizer.transform(vx), vy.to_vec()))
        }
        None => None,
    };
    let mut net = MlpNetwork::new(standardizer.width(), &cfg.hidden, cfg.seed);
    let np = net.param_count();
    let (mut m, mut v) = (vec![0.0; np], vec![0.0; np]);
    let mut step = 0i32;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut best = (f64::INFINITY, net.clone(), 0usize);
    let mut stale = 0;
    let mut epochs = 0;
    for epoch in 0..cfg.max_epochs {
        order.shuffle(&mut rng);
        for (b, chunk) in order.chunks(cfg.batch_size).enumerate() {
            let bx: Vec<Vec<f64>> = chunk.iter().map(|&i| xs[i].clone()).collect();
            let by: Vec<u8> = chunk.iter().map(|&i| y[i]).collect();
            let (loss, grads) = net.loss_and_gradient(&bx, &by);
            if !loss.is_finite() {
                return Err(LearnError::NonFiniteLoss {
                    epoch,
                    batch: b,
                    detail: format!("loss {loss} on {} rows", chunk.len()),
                });
            }
            step += 1;
            let g = MlpNetwork::flatten(&grads);
            let c1 = 1.0 - cfg.beta1.powi(step);
            let c2 = 1.0 - cfg.beta2.powi(step);
            let update: Vec<f64> = (0..np)
                .map(|k| {
                    m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
                    v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
                    -cfg.learning_rate * (m[k] / c1) / ((v[k] / c2).sqrt() + cfg.epsilon)
                })
                .collect();
            net.apply_flat(&update);
        }
        epochs = epoch + 1;
        let monitored = match &val_set {
            Some((vx, vy)) => net.loss(vx, vy),
            None => net.loss(&xs, y),
        };
        if !monitored.is_finite() {
            return Err(LearnError::NonFiniteLoss {
                epoch,
                batch: usize::MAX,
                detail: format!("monitored loss {monitored}"),
            });
        }
        if monitored < best.0 {
            best = (monitored, net.clone(), epochs);
            stale = 0;
        } else {
            stale += 1;
            if stale >= cfg.patience {
                break;
            }
        }
    }
    log::debug!("mlp: {epochs} epochs, best loss {:.5} at epoch {}", best.0, best.2);
    Ok(MlpModel {
        feature_names,
        config: cfg.clone(),
        standardizer,
        network: best.1,
        epochs,
        best_loss: best.0,
    })
}
