//! A from-scratch feed-forward predictor with residual blocks.
//!
//! Architecture: an input affine projection to `hidden_size`, then
//! `n_hidden_layers` residual blocks — each `h + dropout(relu(affine(h)))` —
//! then an affine head with one output per class (classification) or a single
//! output (regression).
//!
//! Training is plain minibatch gradient descent on cross-entropy or mean
//! squared error, with the global gradient 2-norm clipped per step and early
//! stopping on validation loss: training halts at `max_epochs` or after
//! `early_stop_patience` epochs without improvement, and the parameters from
//! the best-validation epoch are returned. Weights initialize from a
//! fan-in-scaled uniform distribution; biases start at zero. Regression
//! targets are standardized with training-split statistics internally and
//! un-standardized at prediction, so learning rates transfer across target
//! scales.
//!
//! Everything is deterministic for a fixed `(config, data, seed)`: one
//! ChaCha8 stream drives initialization, epoch shuffles, and dropout masks in
//! a fixed draw order, and all reductions run in a fixed order.

use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::ModelConfig;
use crate::dataset::{Dataset, Labels};
use crate::error::{Error, Result};
use crate::linalg::{gemm_nn, gemm_nt, gemm_tn_acc};
use crate::prediction::Prediction;

/// What the head predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Classification { n_classes: usize },
    Regression,
}

/// A dense affine map `x -> x @ w + b`, `w` stored row-major `n_in x n_out`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    w: Vec<f64>,
    b: Vec<f64>,
    n_in: usize,
    n_out: usize,
}

impl Affine {
    pub fn new(n_in: usize, n_out: usize, w: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if w.len() != n_in * n_out || b.len() != n_out {
            return Err(Error::LengthMismatch {
                left: w.len(),
                right: n_in * n_out,
            });
        }
        if w.iter().chain(b.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "non-finite parameter in affine layer".into(),
            ));
        }
        Ok(Affine { w, b, n_in, n_out })
    }

    pub fn zeros(n_in: usize, n_out: usize) -> Self {
        Affine {
            w: alloc::vec![0.0; n_in * n_out],
            b: alloc::vec![0.0; n_out],
            n_in,
            n_out,
        }
    }

    /// Fan-in-scaled uniform initialization: `U[-1/sqrt(n_in), 1/sqrt(n_in)]`
    /// weights, zero biases.
    fn init<R: Rng>(n_in: usize, n_out: usize, rng: &mut R) -> Self {
        let bound = 1.0 / libm::sqrt(n_in as f64);
        let w = (0..n_in * n_out)
            .map(|_| rng.gen_range(-bound..=bound))
            .collect();
        Affine {
            w,
            b: alloc::vec![0.0; n_out],
            n_in,
            n_out,
        }
    }

    /// `out = x @ w + b` for `n` rows.
    fn apply(&self, x: &[f64], n: usize, out: &mut Vec<f64>) {
        out.resize(n * self.n_out, 0.0);
        gemm_nn(x, &self.w, n, self.n_in, self.n_out, out);
        for row in out.chunks_exact_mut(self.n_out) {
            for (o, &b) in row.iter_mut().zip(&self.b) {
                *o += b;
            }
        }
    }
}

/// All trainable parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Params {
    input: Affine,
    blocks: Vec<Affine>,
    head: Affine,
}

/// Gradients, shaped like [`Params`].
struct Grads {
    input: Affine,
    blocks: Vec<Affine>,
    head: Affine,
}

impl Grads {
    fn zeros_like(p: &Params) -> Self {
        Grads {
            input: Affine::zeros(p.input.n_in, p.input.n_out),
            blocks: p
                .blocks
                .iter()
                .map(|b| Affine::zeros(b.n_in, b.n_out))
                .collect(),
            head: Affine::zeros(p.head.n_in, p.head.n_out),
        }
    }

    fn layers_mut(&mut self) -> impl Iterator<Item = &mut Affine> {
        core::iter::once(&mut self.input)
            .chain(self.blocks.iter_mut())
            .chain(core::iter::once(&mut self.head))
    }
}

/// A trained predictor (or a hand-assembled one, via [`Model::from_parts`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    params: Params,
    task: Task,
    dropout: f64,
    /// Training-split target statistics (regression); identity for
    /// classification.
    target_mean: f64,
    target_std: f64,
    /// Epochs actually executed before `max_epochs` or early stopping ended
    /// training.
    epochs_run: usize,
    /// Best validation loss seen (the returned parameters achieve it).
    best_val_loss: f64,
    /// Validation loss at the final executed epoch (>= `best_val_loss`).
    final_val_loss: f64,
}

impl Model {
    /// Assembles a model from explicit layers, bypassing training. Blocks may
    /// be empty; shapes must chain (input.out == block.in == block.out ==
    /// head.in).
    pub fn from_parts(
        input: Affine,
        blocks: Vec<Affine>,
        head: Affine,
        task: Task,
        target_mean: f64,
        target_std: f64,
    ) -> Result<Self> {
        let h = input.n_out;
        if blocks.iter().any(|b| b.n_in != h || b.n_out != h) || head.n_in != h {
            return Err(Error::DimensionMismatch {
                got: head.n_in,
                expected: h,
            });
        }
        let n_out = match task {
            Task::Classification { n_classes } => {
                if n_classes < 2 {
                    return Err(Error::InvalidArgument(
                        "classification needs at least 2 classes".into(),
                    ));
                }
                n_classes
            }
            Task::Regression => 1,
        };
        if head.n_out != n_out {
            return Err(Error::DimensionMismatch {
                got: head.n_out,
                expected: n_out,
            });
        }
        if !(target_std.is_finite() && target_std > 0.0 && target_mean.is_finite()) {
            return Err(Error::InvalidArgument("bad target statistics".into()));
        }
        Ok(Model {
            params: Params {
                input,
                blocks,
                head,
            },
            task,
            dropout: 0.0,
            target_mean,
            target_std,
            epochs_run: 0,
            best_val_loss: f64::INFINITY,
            final_val_loss: f64::INFINITY,
        })
    }

    pub fn n_features(&self) -> usize {
        self.params.input.n_in
    }

    pub fn task(&self) -> Task {
        self.task
    }

    pub fn is_classification(&self) -> bool {
        matches!(self.task, Task::Classification { .. })
    }

    pub fn n_classes(&self) -> Option<usize> {
        match self.task {
            Task::Classification { n_classes } => Some(n_classes),
            Task::Regression => None,
        }
    }

    pub fn epochs_run(&self) -> usize {
        self.epochs_run
    }

    pub fn best_val_loss(&self) -> f64 {
        self.best_val_loss
    }

    pub fn final_val_loss(&self) -> f64 {
        self.final_val_loss
    }

    /// Raw head outputs for `n = features.len() / n_features` rows, dropout
    /// disabled.
    fn forward_logits(&self, features: &[f64]) -> Result<(Vec<f64>, usize)> {
        let f = self.params.input.n_in;
        if f == 0 || !features.len().is_multiple_of(f) || features.is_empty() {
            return Err(Error::DimensionMismatch {
                got: features.len(),
                expected: f,
            });
        }
        let n = features.len() / f;
        let mut h = Vec::new();
        self.params.input.apply(features, n, &mut h);
        let mut z = Vec::new();
        for block in &self.params.blocks {
            block.apply(&h, n, &mut z);
            for (hv, &zv) in h.iter_mut().zip(&z) {
                if zv > 0.0 {
                    *hv += zv;
                }
            }
        }
        let mut logits = Vec::new();
        self.params.head.apply(&h, n, &mut logits);
        Ok((logits, n))
    }

    /// The loss this model trains on — cross-entropy for classification, MSE
    /// on standardized targets for regression — averaged over `ds`.
    pub fn val_loss(&self, ds: &Dataset) -> Result<f64> {
        let (logits, n) = self.forward_logits(ds.features())?;
        match (self.task, ds.labels()) {
            (Task::Classification { n_classes }, Labels::Classes { values, .. }) => {
                let mut loss = 0.0;
                for (id, (row, &y)) in logits.chunks_exact(n_classes).zip(values).enumerate() {
                    if y >= n_classes {
                        return Err(Error::LabelOutOfRange {
                            id,
                            label: y,
                            n_classes,
                        });
                    }
                    let probs = softmax_row(row);
                    loss += -libm::log(probs[y].max(1e-300));
                }
                Ok(loss / n as f64)
            }
            (Task::Regression, Labels::Values(values)) => {
                let mut loss = 0.0;
                for (out, &y) in logits.iter().zip(values) {
                    let target = (y - self.target_mean) / self.target_std;
                    loss += (out - target) * (out - target);
                }
                Ok(loss / n as f64)
            }
            _ => Err(Error::PolicyMismatch {
                expected: "matching task and labels",
                got: "mismatched dataset",
            }),
        }
    }
}

fn softmax_row(row: &[f64]) -> Vec<f64> {
    let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = row.iter().map(|&v| libm::exp(v - max)).collect();
    let sum: f64 = out.iter().sum();
    for v in &mut out {
        *v /= sum;
    }
    out
}

/// Class-probability predictions for a feature matrix (row-major, width =
/// model input width). Dropout is disabled; rows softmax to 1 within 1e-6.
pub fn predict_proba(model: &Model, features: &[f64]) -> Result<Vec<Prediction>> {
    let n_classes = match model.task {
        Task::Classification { n_classes } => n_classes,
        Task::Regression => {
            return Err(Error::PolicyMismatch {
                expected: "classification model",
                got: "regression model",
            })
        }
    };
    let (logits, _) = model.forward_logits(features)?;
    Ok(logits
        .chunks_exact(n_classes)
        .map(|row| Prediction::Classification {
            probs: softmax_row(row),
        })
        .collect())
}

/// Per-sample ensemble mean and population variance for regression models.
/// Variance is exactly 0 for a single member.
pub fn predict_regression(ensemble: &[Model], features: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if ensemble.is_empty() {
        return Err(Error::InvalidArgument("empty ensemble".into()));
    }
    let mut member_outputs: Vec<Vec<f64>> = Vec::with_capacity(ensemble.len());
    for model in ensemble {
        if model.task != Task::Regression {
            return Err(Error::PolicyMismatch {
                expected: "regression model",
                got: "classification model",
            });
        }
        let (logits, _) = model.forward_logits(features)?;
        member_outputs.push(
            logits
                .iter()
                .map(|o| o * model.target_std + model.target_mean)
                .collect(),
        );
    }
    let n = member_outputs[0].len();
    let m = ensemble.len() as f64;
    let mut means = Vec::with_capacity(n);
    let mut variances = Vec::with_capacity(n);
    for i in 0..n {
        let mean = member_outputs.iter().map(|o| o[i]).sum::<f64>() / m;
        let var = member_outputs
            .iter()
            .map(|o| (o[i] - mean) * (o[i] - mean))
            .sum::<f64>()
            / m;
        means.push(mean);
        variances.push(var);
    }
    Ok((means, variances))
}

/// Targets for one minibatch, borrowed from the training split.
enum BatchTargets<'a> {
    Classes(&'a [usize]),
    /// Standardized regression targets.
    Values(&'a [f64]),
}

/// Forward/backward state for one training minibatch.
struct TrainStep {
    /// Hidden states: index 0 is the input projection output, index `l+1`
    /// the output of block `l`.
    hidden: Vec<Vec<f64>>,
    /// Post-relu activations per block (pre-dropout).
    acts: Vec<Vec<f64>>,
    /// Dropout scale per element per block: 0 (dropped) or 1/(1-p);
    /// empty when dropout is off.
    masks: Vec<Vec<f64>>,
    logits: Vec<f64>,
}

fn forward_train<R: Rng>(
    params: &Params,
    x: &[f64],
    n: usize,
    dropout: f64,
    rng: &mut Option<&mut R>,
) -> TrainStep {
    let mut hidden = Vec::with_capacity(params.blocks.len() + 1);
    let mut acts = Vec::with_capacity(params.blocks.len());
    let mut masks = Vec::with_capacity(params.blocks.len());
    let mut h = Vec::new();
    params.input.apply(x, n, &mut h);
    hidden.push(h.clone());
    for block in &params.blocks {
        let mut z = Vec::new();
        block.apply(&h, n, &mut z);
        for v in &mut z {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let act = z.clone();
        let mask = if dropout > 0.0 {
            let rng = rng.as_mut().expect("dropout requires an RNG");
            let keep_scale = 1.0 / (1.0 - dropout);
            let mask: Vec<f64> = (0..z.len())
                .map(|_| {
                    if rng.gen::<f64>() < dropout {
                        0.0
                    } else {
                        keep_scale
                    }
                })
                .collect();
            for (zv, &mv) in z.iter_mut().zip(&mask) {
                *zv *= mv;
            }
            mask
        } else {
            Vec::new()
        };
        for (hv, &zv) in h.iter_mut().zip(&z) {
            *hv += zv;
        }
        hidden.push(h.clone());
        acts.push(act);
        masks.push(mask);
    }
    let mut logits = Vec::new();
    params.head.apply(&h, n, &mut logits);
    TrainStep {
        hidden,
        acts,
        masks,
        logits,
    }
}

/// Mean loss over the minibatch and its gradient with respect to the logits.
fn loss_and_dlogits(logits: &[f64], n: usize, targets: &BatchTargets) -> (f64, Vec<f64>) {
    match targets {
        BatchTargets::Classes(ys) => {
            let n_classes = logits.len() / n;
            let mut loss = 0.0;
            let mut dlogits = Vec::with_capacity(logits.len());
            for (row, &y) in logits.chunks_exact(n_classes).zip(*ys) {
                let probs = softmax_row(row);
                loss += -libm::log(probs[y].max(1e-300));
                for (k, &p) in probs.iter().enumerate() {
                    let indicator = if k == y { 1.0 } else { 0.0 };
                    dlogits.push((p - indicator) / n as f64);
                }
            }
            (loss / n as f64, dlogits)
        }
        BatchTargets::Values(ys) => {
            let mut loss = 0.0;
            let mut dlogits = Vec::with_capacity(logits.len());
            for (&o, &y) in logits.iter().zip(*ys) {
                loss += (o - y) * (o - y);
                dlogits.push(2.0 * (o - y) / n as f64);
            }
            (loss / n as f64, dlogits)
        }
    }
}

/// Backpropagates `dlogits` through the cached step, returning parameter
/// gradients.
fn backward(params: &Params, x: &[f64], n: usize, step: &TrainStep, dlogits: &[f64]) -> Grads {
    let mut grads = Grads::zeros_like(params);
    let h = params.input.n_out;
    let last = step.hidden.len() - 1;

    gemm_tn_acc(
        &step.hidden[last],
        dlogits,
        n,
        h,
        params.head.n_out,
        &mut grads.head.w,
    );
    accumulate_bias(dlogits, params.head.n_out, &mut grads.head.b);
    let mut dh = alloc::vec![0.0; n * h];
    gemm_nt(dlogits, &params.head.w, n, params.head.n_out, h, &mut dh);

    for l in (0..params.blocks.len()).rev() {
        // Block: h_out = h_in + mask .* relu(z), z = h_in @ w + b.
        let mut dz: Vec<f64> = dh.clone();
        if !step.masks[l].is_empty() {
            for (d, &m) in dz.iter_mut().zip(&step.masks[l]) {
                *d *= m;
            }
        }
        for (d, &a) in dz.iter_mut().zip(&step.acts[l]) {
            if a <= 0.0 {
                *d = 0.0;
            }
        }
        gemm_tn_acc(&step.hidden[l], &dz, n, h, h, &mut grads.blocks[l].w);
        accumulate_bias(&dz, h, &mut grads.blocks[l].b);
        // dh_in = dh_out (identity path) + dz @ w^T (affine path).
        let mut dh_affine = alloc::vec![0.0; n * h];
        gemm_nt(&dz, &params.blocks[l].w, n, h, h, &mut dh_affine);
        for (d, &a) in dh.iter_mut().zip(&dh_affine) {
            *d += a;
        }
    }

    gemm_tn_acc(x, &dh, n, params.input.n_in, h, &mut grads.input.w);
    accumulate_bias(&dh, h, &mut grads.input.b);
    grads
}

fn accumulate_bias(d: &[f64], width: usize, out: &mut [f64]) {
    for row in d.chunks_exact(width) {
        for (o, &v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
}

/// Scales all gradients so their global 2-norm is at most `clip`.
fn clip_global_norm(grads: &mut Grads, clip: f64) {
    let mut sq = 0.0;
    for layer in grads.layers_mut() {
        sq += layer.w.iter().map(|v| v * v).sum::<f64>();
        sq += layer.b.iter().map(|v| v * v).sum::<f64>();
    }
    let norm = libm::sqrt(sq);
    if norm > clip {
        let scale = clip / norm;
        for layer in grads.layers_mut() {
            for v in layer.w.iter_mut().chain(layer.b.iter_mut()) {
                *v *= scale;
            }
        }
    }
}

fn sgd_update(params: &mut Params, grads: &Grads, lr: f64) {
    let pairs = [
        (&mut params.input, &grads.input),
        (&mut params.head, &grads.head),
    ];
    for (p, g) in pairs {
        for (pv, gv) in p.w.iter_mut().zip(&g.w) {
            *pv -= lr * gv;
        }
        for (pv, gv) in p.b.iter_mut().zip(&g.b) {
            *pv -= lr * gv;
        }
    }
    for (p, g) in params.blocks.iter_mut().zip(&grads.blocks) {
        for (pv, gv) in p.w.iter_mut().zip(&g.w) {
            *pv -= lr * gv;
        }
        for (pv, gv) in p.b.iter_mut().zip(&g.b) {
            *pv -= lr * gv;
        }
    }
}

/// Trains one model from scratch. Deterministic for fixed inputs and seed.
///
/// Classification requires at least two declared classes; the validation set
/// must share the training set's task and feature width.
pub fn train(config: &ModelConfig, train: &Dataset, val: &Dataset, seed: u64) -> Result<Model> {
    config.validate()?;
    if val.n_features() != train.n_features() {
        return Err(Error::DimensionMismatch {
            got: val.n_features(),
            expected: train.n_features(),
        });
    }
    let task = match train.labels() {
        Labels::Classes { n_classes, .. } => {
            if *n_classes < 2 {
                return Err(Error::InvalidArgument(
                    "classification needs at least 2 classes".into(),
                ));
            }
            if val.n_classes() != Some(*n_classes) {
                return Err(Error::PolicyMismatch {
                    expected: "validation labels matching the training task",
                    got: "mismatched validation labels",
                });
            }
            Task::Classification {
                n_classes: *n_classes,
            }
        }
        Labels::Values(_) => {
            if val.is_classification() {
                return Err(Error::PolicyMismatch {
                    expected: "validation labels matching the training task",
                    got: "mismatched validation labels",
                });
            }
            Task::Regression
        }
    };

    // Regression targets are standardized with training-split statistics.
    let (target_mean, target_std) = match train.labels() {
        Labels::Values(values) => {
            let n = values.len() as f64;
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
            let std = libm::sqrt(var);
            (mean, if std > 0.0 { std } else { 1.0 })
        }
        _ => (0.0, 1.0),
    };
    let standardized: Vec<f64> = match train.labels() {
        Labels::Values(values) => values
            .iter()
            .map(|v| (v - target_mean) / target_std)
            .collect(),
        _ => Vec::new(),
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = config.hidden_size;
    let n_out = match task {
        Task::Classification { n_classes } => n_classes,
        Task::Regression => 1,
    };
    let mut params = Params {
        input: Affine::init(train.n_features(), h, &mut rng),
        blocks: (0..config.n_hidden_layers)
            .map(|_| Affine::init(h, h, &mut rng))
            .collect(),
        head: Affine::init(h, n_out, &mut rng),
    };

    let mut model = Model {
        params: params.clone(),
        task,
        dropout: config.dropout,
        target_mean,
        target_std,
        epochs_run: 0,
        best_val_loss: f64::INFINITY,
        final_val_loss: f64::INFINITY,
    };

    let n_train = train.n_samples();
    let mut order: Vec<usize> = (0..n_train).collect();
    let mut best_params = params.clone();
    let mut best_loss = f64::INFINITY;
    let mut final_loss = f64::INFINITY;
    let mut epochs_without_improvement = 0;
    let mut epochs_run = 0;

    let mut x_batch: Vec<f64> = Vec::new();
    let mut y_classes: Vec<usize> = Vec::new();
    let mut y_values: Vec<f64> = Vec::new();

    for _epoch in 0..config.max_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(config.train_batch_size) {
            let n = chunk.len();
            x_batch.clear();
            for &i in chunk {
                x_batch.extend_from_slice(train.feature_row(i));
            }
            let targets = match train.labels() {
                Labels::Classes { values, .. } => {
                    y_classes.clear();
                    y_classes.extend(chunk.iter().map(|&i| values[i]));
                    BatchTargets::Classes(&y_classes)
                }
                Labels::Values(_) => {
                    y_values.clear();
                    y_values.extend(chunk.iter().map(|&i| standardized[i]));
                    BatchTargets::Values(&y_values)
                }
            };
            let mut rng_opt = Some(&mut rng);
            let step = forward_train(&params, &x_batch, n, config.dropout, &mut rng_opt);
            let (_, dlogits) = loss_and_dlogits(&step.logits, n, &targets);
            let mut grads = backward(&params, &x_batch, n, &step, &dlogits);
            clip_global_norm(&mut grads, config.grad_norm_clip);
            sgd_update(&mut params, &grads, config.learning_rate);
        }
        epochs_run += 1;

        model.params = params.clone();
        let vloss = model.val_loss(val)?;
        final_loss = vloss;
        if vloss < best_loss {
            best_loss = vloss;
            best_params = params.clone();
            epochs_without_improvement = 0;
        } else {
            epochs_without_improvement += 1;
            if epochs_without_improvement >= config.early_stop_patience {
                break;
            }
        }
    }

    model.params = best_params;
    model.epochs_run = epochs_run;
    model.best_val_loss = best_loss;
    model.final_val_loss = final_loss;
    Ok(model)
}

/// Trains `config.n_ensemble_members` models independently on identical data,
/// member `m` seeded with `base_seed + m`.
pub fn train_ensemble(
    config: &ModelConfig,
    train_set: &Dataset,
    val: &Dataset,
    base_seed: u64,
) -> Result<Vec<Model>> {
    if config.n_ensemble_members == 0 {
        return Err(Error::InvalidConfig(
            "n_ensemble_members must be >= 1".into(),
        ));
    }
    (0..config.n_ensemble_members as u64)
        .map(|m| train(config, train_set, val, base_seed.wrapping_add(m)))
        .collect()
}
