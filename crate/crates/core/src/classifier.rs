//! The full classification pipeline: normalization, functional expansion,
//! a frozen autoencoder encoder and a trainable sigmoid output layer.
//!
//! The output layer learns with the per-instance delta rule
//!
//! ```text
//! Y′ = φ(A·W + b)      E = Y − Y′      δ = Y′(1 − Y′)·E
//! W ← W + μ·aᵀδ        b ← b + μ·δ
//! ```
//!
//! which is stochastic gradient descent on `½‖Y − Y′‖²` for a sigmoid `φ`.
//! Dropping the encoder gives the plain functional-link (MLFLANN) baseline.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::autoencoder::{encode, train_autoencoder_observed, AeTrainConfig, AutoencoderParams, TrainedAutoencoder};
use crate::dataset::{apply_normalizer, fit_normalizer, MultiLabelDataset, NormalizationParams, SingleLabelDataset};
use crate::error::{Error, Result};
use crate::expansion::{expand, ExpansionConfig};
use crate::kernel::matrix::affine_row;
use crate::kernel::{derive_seed, uniform_init, ActivationKind, DenseMatrix, SeededRng};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    MultiLabel,
    SingleLabel,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::MultiLabel => "multi_label",
            Mode::SingleLabel => "single_label",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "multi_label" | "multi-label" | "multilabel" => Ok(Mode::MultiLabel),
            "single_label" | "single-label" | "singlelabel" => Ok(Mode::SingleLabel),
            other => Err(Error::Config(format!("unknown mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    /// Output-layer learning rate μ.
    pub mu: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Output weights and biases start uniform in `[-init_scale, init_scale]`.
    pub init_scale: f64,
    pub ae: AeTrainConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            mu: 0.1,
            epochs: 500,
            seed: 0,
            init_scale: 0.5,
            ae: AeTrainConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return Err(Error::Config(format!("mu must be > 0, got {}", self.mu)));
        }
        if self.epochs == 0 {
            return Err(Error::Config("epochs must be at least 1".into()));
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return Err(Error::Config(format!(
                "init scale must be > 0, got {}",
                self.init_scale
            )));
        }
        self.ae.validate()
    }

    /// Same hyperparameters with the output-layer and autoencoder seeds
    /// derived from a single run seed.
    pub fn with_run_seed(&self, seed: u64) -> Self {
        let mut cfg = *self;
        cfg.seed = derive_seed(seed, 1);
        cfg.ae.seed = derive_seed(seed, 2);
        cfg
    }

    /// Same hyperparameters with every seed derived from `stream`.
    pub fn reseeded(&self, stream: u64) -> Self {
        let mut cfg = *self;
        cfg.seed = derive_seed(self.seed, stream);
        cfg.ae.seed = derive_seed(self.ae.seed, stream);
        cfg
    }
}

/// A trained pipeline. Everything needed for prediction is stored here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AeMlFlannModel {
    /// Training-set column means used to fill missing inputs.
    pub fill: Vec<f64>,
    pub norm: NormalizationParams,
    pub expansion: ExpansionConfig,
    /// Frozen autoencoder; `None` for the plain functional-link ablation.
    pub encoder: Option<AutoencoderParams>,
    /// `hidden × C` output weights.
    pub out_w: DenseMatrix,
    pub out_b: Vec<f64>,
    pub out_act: ActivationKind,
    pub mode: Mode,
    pub threshold: f64,
    pub feature_names: Vec<String>,
    pub label_names: Vec<String>,
}

impl AeMlFlannModel {
    pub fn num_features(&self) -> usize {
        self.norm.len()
    }

    pub fn num_labels(&self) -> usize {
        self.out_w.cols()
    }

    /// Width of the representation feeding the output layer.
    pub fn hidden_width(&self) -> usize {
        match &self.encoder {
            Some(ae) => ae.hidden_width(),
            None => self.expansion.output_width(self.num_features()),
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        check_threshold(threshold)?;
        self.threshold = threshold;
        Ok(self)
    }

    /// Structural consistency of all stored parts.
    pub fn validate(&self) -> Result<()> {
        let d = self.num_features();
        if self.norm.max.len() != d || self.fill.len() != d {
            return Err(Error::Format("normalization vectors disagree in length".into()));
        }
        self.expansion.validate()?;
        if let Some(ae) = &self.encoder {
            ae.check()?;
            if ae.input_width() != self.expansion.output_width(d) {
                return Err(Error::Format(format!(
                    "encoder expects {} inputs, expansion produces {}",
                    ae.input_width(),
                    self.expansion.output_width(d)
                )));
            }
        }
        if self.out_w.rows() != self.hidden_width() || self.out_b.len() != self.out_w.cols() {
            return Err(Error::Format(format!(
                "output layer {:?} with {} biases does not fit hidden width {}",
                self.out_w.shape(),
                self.out_b.len(),
                self.hidden_width()
            )));
        }
        if self.out_w.cols() == 0 {
            return Err(Error::Format("model has no outputs".into()));
        }
        check_threshold(self.threshold)
    }

    /// Normalize, expand and (if present) encode raw features.
    pub fn transform(&self, features: &DenseMatrix) -> Result<DenseMatrix> {
        if features.cols() != self.num_features() {
            return Err(Error::Shape {
                op: "predict",
                left: features.shape(),
                right: (1, self.num_features()),
            });
        }
        let x = apply_normalizer(features, &self.norm)?;
        let xe = expand(&x, &self.expansion)?;
        match &self.encoder {
            Some(ae) => encode(&xe, ae),
            None => Ok(xe),
        }
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t < 1.0 {
        Ok(())
    } else {
        Err(Error::Config(format!("threshold must lie in (0, 1), got {t}")))
    }
}

/// Which training step read an instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Stage {
    Normalizer,
    Autoencoder,
    OutputLayer,
}

/// Receives the original row id of every instance a training step consumes.
pub trait TrainObserver {
    fn on_read(&mut self, stage: Stage, row_id: usize);
}

impl TrainObserver for () {
    fn on_read(&mut self, _: Stage, _: usize) {}
}

impl<F: FnMut(Stage, usize)> TrainObserver for F {
    fn on_read(&mut self, stage: Stage, row_id: usize) {
        self(stage, row_id)
    }
}

/// One delta-rule step on a single instance. `scratch` receives `Y′` (the
/// pre-update scores) and must have `w.cols()` entries.
pub fn delta_rule_step(
    w: &mut DenseMatrix,
    b: &mut [f64],
    act: ActivationKind,
    a: &[f64],
    target: &[f64],
    mu: f64,
    scratch: &mut [f64],
) {
    affine_row(a, w, b, scratch);
    act.apply_in_place(scratch);
    // scratch becomes μ·δ in place; Y′ is restored below
    for ((s, &t), bj) in scratch.iter_mut().zip(target).zip(b.iter_mut()) {
        let y = *s;
        let delta = act.derivative_from_output(y) * (t - y);
        *bj += mu * delta;
        *s = delta;
    }
    for (k, &ak) in a.iter().enumerate() {
        if ak == 0.0 {
            continue;
        }
        let step = mu * ak;
        for (wkj, &d) in w.row_mut(k).iter_mut().zip(scratch.iter()) {
            *wkj += step * d;
        }
    }
}

/// Result of training, including the autoencoder history when one was trained.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: AeMlFlannModel,
    pub ae_history: Option<Vec<f64>>,
}

pub fn train(
    data: &MultiLabelDataset,
    expansion: &ExpansionConfig,
    cfg: &TrainConfig,
    use_autoencoder: bool,
) -> Result<AeMlFlannModel> {
    train_observed(data, expansion, cfg, use_autoencoder, Mode::MultiLabel, &mut ()).map(|o| o.model)
}

pub fn train_single_label(
    data: &SingleLabelDataset,
    expansion: &ExpansionConfig,
    cfg: &TrainConfig,
    use_autoencoder: bool,
) -> Result<AeMlFlannModel> {
    train_observed(
        &data.to_multi_label(),
        expansion,
        cfg,
        use_autoencoder,
        Mode::SingleLabel,
        &mut (),
    )
    .map(|o| o.model)
}

/// Full training pipeline with an explicit mode and read instrumentation.
pub fn train_observed(
    data: &MultiLabelDataset,
    expansion: &ExpansionConfig,
    cfg: &TrainConfig,
    use_autoencoder: bool,
    mode: Mode,
    observer: &mut dyn TrainObserver,
) -> Result<TrainOutcome> {
    cfg.validate()?;
    expansion.validate()?;
    if data.is_empty() {
        return Err(Error::Data("training set is empty".into()));
    }
    if data.num_labels() == 0 {
        return Err(Error::Data("training set has no labels".into()));
    }
    if mode == Mode::SingleLabel && !data.is_single_label() {
        return Err(Error::Data(
            "single-label mode requires exactly one relevant label per instance".into(),
        ));
    }

    for &id in &data.row_ids {
        observer.on_read(Stage::Normalizer, id);
    }
    let fill = data.observed_column_means();
    let mut features = data.features.clone();
    for &(r, c) in &data.missing {
        features.set(r, c, fill[c]);
    }
    let norm = fit_normalizer(&features)?;
    let expanded = expand(&apply_normalizer(&features, &norm)?, expansion)?;

    let (encoder, hidden, ae_history) = if use_autoencoder {
        let TrainedAutoencoder { params, history } =
            train_autoencoder_observed(&expanded, &cfg.ae, &mut |i| {
                observer.on_read(Stage::Autoencoder, data.row_ids[i])
            })?;
        let hidden = encode(&expanded, &params)?;
        (Some(params), hidden, Some(history))
    } else {
        (None, expanded, None)
    };

    let c = data.num_labels();
    let mut init_rng = SeededRng::new(cfg.seed);
    let mut out_w = uniform_init(hidden.cols(), c, cfg.init_scale, &mut init_rng)?;
    let mut out_b: Vec<f64> = (0..c)
        .map(|_| init_rng.uniform(-cfg.init_scale, cfg.init_scale))
        .collect();
    let out_act = ActivationKind::Sigmoid;

    let mut order_rng = SeededRng::new(derive_seed(cfg.seed, 1));
    let mut scores = vec![0.0; c];
    for epoch in 1..=cfg.epochs {
        for i in order_rng.permutation(data.len()) {
            observer.on_read(Stage::OutputLayer, data.row_ids[i]);
            delta_rule_step(
                &mut out_w,
                &mut out_b,
                out_act,
                hidden.row(i),
                data.labels.row(i),
                cfg.mu,
                &mut scores,
            );
            if scores.iter().any(|v| !v.is_finite()) {
                return Err(Error::Divergence {
                    epoch,
                    what: format!("non-finite output score for instance {}", data.row_ids[i]),
                });
            }
        }
        if out_w.as_slice().iter().chain(&out_b).any(|v| !v.is_finite()) {
            return Err(Error::Divergence {
                epoch,
                what: "non-finite output weights".into(),
            });
        }
    }

    let model = AeMlFlannModel {
        fill,
        norm,
        expansion: *expansion,
        encoder,
        out_w,
        out_b,
        out_act,
        mode,
        threshold: DEFAULT_THRESHOLD,
        feature_names: data.feature_names.clone(),
        label_names: data.label_names.clone(),
    };
    Ok(TrainOutcome { model, ae_history })
}

/// `N × C` classification scores.
pub fn predict_scores(model: &AeMlFlannModel, features: &DenseMatrix) -> Result<DenseMatrix> {
    let hidden = model.transform(features)?;
    let mut out = DenseMatrix::zeros(hidden.rows(), model.num_labels());
    for (r, h) in hidden.iter_rows().enumerate() {
        let row = out.row_mut(r);
        affine_row(h, &model.out_w, &model.out_b, row);
        model.out_act.apply_in_place(row);
    }
    Ok(out)
}

/// Thresholds scores into a binary matrix (`score ≥ threshold` is relevant).
pub fn threshold_scores(scores: &DenseMatrix, threshold: f64) -> DenseMatrix {
    scores.map(|s| if s >= threshold { 1.0 } else { 0.0 })
}

pub fn predict_labels(model: &AeMlFlannModel, features: &DenseMatrix) -> Result<DenseMatrix> {
    if model.mode != Mode::MultiLabel {
        return Err(Error::Mode(
            "predict_labels requires a multi-label model; use predict_class".into(),
        ));
    }
    Ok(threshold_scores(&predict_scores(model, features)?, model.threshold))
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = j;
        }
    }
    best
}

pub fn predict_class(model: &AeMlFlannModel, features: &DenseMatrix) -> Result<Vec<usize>> {
    if model.mode != Mode::SingleLabel {
        return Err(Error::Mode(
            "predict_class requires a single-label model; use predict_labels".into(),
        ));
    }
    Ok(predict_scores(model, features)?.iter_rows().map(argmax).collect())
}

pub const MODEL_FORMAT: &str = "aeflann-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize)]
struct ModelFileRef<'a> {
    format: &'a str,
    version: u32,
    model: &'a AeMlFlannModel,
}

#[derive(Deserialize)]
struct ModelHeader {
    format: String,
    version: u32,
}

#[derive(Deserialize)]
struct ModelFile {
    model: AeMlFlannModel,
}

/// Serializes a model as pretty JSON with a format tag and version.
pub fn model_to_json(model: &AeMlFlannModel) -> Result<String> {
    let file = ModelFileRef {
        format: MODEL_FORMAT,
        version: MODEL_VERSION,
        model,
    };
    serde_json::to_string_pretty(&file).map_err(|e| Error::Format(e.to_string()))
}

pub fn model_from_json(text: &str) -> Result<AeMlFlannModel> {
    let header: ModelHeader =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("unreadable model file: {e}")))?;
    if header.format != MODEL_FORMAT {
        return Err(Error::Format(format!("not a model file (format '{}')", header.format)));
    }
    if header.version != MODEL_VERSION {
        return Err(Error::Format(format!(
            "unsupported model version {} (expected {MODEL_VERSION})",
            header.version
        )));
    }
    let file: ModelFile =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("corrupt model file: {e}")))?;
    file.model.validate().map_err(|e| match e {
        Error::Format(_) => e,
        other => Error::Format(other.to_string()),
    })?;
    Ok(file.model)
}

pub fn save_model(model: &AeMlFlannModel, path: &Path) -> Result<()> {
    let mut text = model_to_json(model)?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<AeMlFlannModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_dataset(n: usize, seed: u64) -> MultiLabelDataset {
        let mut rng = SeededRng::new(seed);
        let mut f = DenseMatrix::zeros(n, 3);
        let mut l = DenseMatrix::zeros(n, 2);
        for r in 0..n {
            let x0 = rng.uniform(0.0, 1.0);
            let x1 = rng.uniform(0.0, 1.0);
            f.set(r, 0, x0);
            f.set(r, 1, x1);
            f.set(r, 2, rng.uniform(-5.0, 5.0));
            l.set(r, 0, if x0 > 0.5 { 1.0 } else { 0.0 });
            l.set(r, 1, if x0 + x1 > 1.0 { 1.0 } else { 0.0 });
        }
        MultiLabelDataset::unnamed(f, l).unwrap()
    }

    fn quick_cfg() -> TrainConfig {
        TrainConfig {
            epochs: 20,
            ae: AeTrainConfig {
                epochs: 10,
                hidden_fraction: 0.4,
                ..AeTrainConfig::default()
            },
            ..TrainConfig::default()
        }
    }

    #[test]
    fn single_unit_delta_example() {
        // a = 1, y′ = 0.5 (zero weights), target 1, μ = 0.1
        let mut w = DenseMatrix::zeros(1, 1);
        let mut b = vec![0.0];
        let mut s = vec![0.0];
        delta_rule_step(&mut w, &mut b, ActivationKind::Sigmoid, &[1.0], &[1.0], 0.1, &mut s);
        assert_eq!(w.get(0, 0), 0.0125);
        assert_eq!(b[0], 0.0125);
    }

    #[test]
    fn ablation_shape() {
        let ds = toy_dataset(30, 1);
        let model = train(&ds, &ExpansionConfig::default(), &quick_cfg(), false).unwrap();
        assert!(model.encoder.is_none());
        assert_eq!(model.out_w.shape(), (15, 2));

        let model = train(&ds, &ExpansionConfig::default(), &quick_cfg(), true).unwrap();
        assert_eq!(model.out_w.shape(), (6, 2));
        model.validate().unwrap();
    }

    #[test]
    fn training_is_deterministic() {
        let ds = toy_dataset(30, 2);
        let a = train(&ds, &ExpansionConfig::default(), &quick_cfg(), true).unwrap();
        let b = train(&ds, &ExpansionConfig::default(), &quick_cfg(), true).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_output_layer_scores_half() {
        let ds = toy_dataset(10, 3);
        let mut model = train(&ds, &ExpansionConfig::default(), &quick_cfg(), false).unwrap();
        model.out_w = DenseMatrix::zeros(model.out_w.rows(), model.out_w.cols());
        model.out_b = vec![0.0; 2];
        let s = predict_scores(&model, &ds.features).unwrap();
        assert_eq!(s.shape(), (10, 2));
        assert!(s.as_slice().iter().all(|&v| v == 0.5));
        let l = predict_labels(&model, &ds.features).unwrap();
        assert!(l.as_slice().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn thresholding_rule() {
        let s = DenseMatrix::from_rows(&[[0.7, 0.3, 0.5], [0.49, 0.49, 0.49]]).unwrap();
        let l = threshold_scores(&s, 0.5);
        assert_eq!(l.row(0), &[1.0, 0.0, 1.0]);
        assert_eq!(l.row(1), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn argmax_tie_break() {
        assert_eq!(argmax(&[0.2, 0.9, 0.1]), 1);
        assert_eq!(argmax(&[0.5, 0.5]), 0);
        assert_eq!(argmax(&[0.3]), 0);
    }

    #[test]
    fn mode_guards() {
        let ds = toy_dataset(20, 4);
        let ml = train(&ds, &ExpansionConfig::default(), &quick_cfg(), false).unwrap();
        assert!(matches!(predict_class(&ml, &ds.features), Err(Error::Mode(_))));

        let err = train_observed(&ds, &ExpansionConfig::default(), &quick_cfg(), false, Mode::SingleLabel, &mut ());
        assert!(matches!(err, Err(Error::Data(_))));

        let sl = SingleLabelDataset::new(
            ds.features.clone(),
            (0..20).map(|i| i % 3).collect(),
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let model = train_single_label(&sl, &ExpansionConfig::default(), &quick_cfg(), true).unwrap();
        assert_eq!(model.mode, Mode::SingleLabel);
        assert!(matches!(predict_labels(&model, &sl.features), Err(Error::Mode(_))));
        let classes = predict_class(&model, &sl.features).unwrap();
        assert_eq!(classes.len(), 20);
        assert!(classes.iter().all(|&c| c < 3));
    }

    #[test]
    fn single_class_always_zero() {
        let sl = SingleLabelDataset::new(DenseMatrix::filled(4, 2, 1.0), vec![0; 4], vec!["only".into()]).unwrap();
        let model = train_single_label(&sl, &ExpansionConfig::default(), &quick_cfg(), false).unwrap();
        assert_eq!(predict_class(&model, &sl.features).unwrap(), vec![0; 4]);
    }

    #[test]
    fn encoder_and_expansion_stay_frozen() {
        let ds = toy_dataset(25, 5);
        let cfg = quick_cfg();
        let out = train_observed(&ds, &ExpansionConfig::default(), &cfg, true, Mode::MultiLabel, &mut ()).unwrap();
        // retraining the autoencoder alone reproduces the stored encoder bit-for-bit
        let x = apply_normalizer(&ds.features, &out.model.norm).unwrap();
        let xe = expand(&x, &ExpansionConfig::default()).unwrap();
        let ae = crate::autoencoder::train_autoencoder(&xe, &cfg.ae).unwrap();
        assert_eq!(Some(ae.params), out.model.encoder);
        assert_eq!(out.model.expansion, ExpansionConfig::default());
        assert_eq!(out.ae_history.unwrap().len(), cfg.ae.epochs + 1);
    }

    #[test]
    fn observer_records_every_stage() {
        let ds = toy_dataset(12, 6).select_rows(&[11, 3, 5, 7, 0, 2]);
        let mut seen: std::collections::BTreeMap<Stage, Vec<usize>> = Default::default();
        let mut obs = |s: Stage, id: usize| seen.entry(s).or_default().push(id);
        train_observed(&ds, &ExpansionConfig::default(), &quick_cfg(), true, Mode::MultiLabel, &mut obs).unwrap();
        for stage in [Stage::Normalizer, Stage::Autoencoder, Stage::OutputLayer] {
            let mut ids = seen[&stage].clone();
            ids.sort_unstable();
            ids.dedup();
            assert_eq!(ids, vec![0, 2, 3, 5, 7, 11], "{stage:?}");
        }
    }

    #[test]
    fn shape_mismatch_on_predict() {
        let ds = toy_dataset(10, 7);
        let model = train(&ds, &ExpansionConfig::default(), &quick_cfg(), false).unwrap();
        assert!(matches!(
            predict_scores(&model, &DenseMatrix::zeros(2, 4)),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig { mu: 0.0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig { epochs: 0, ..Default::default() }.validate().is_err());
        assert!(TrainConfig::default().validate().is_ok());
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let ds = toy_dataset(15, 8);
        for use_ae in [true, false] {
            let model = train(&ds, &ExpansionConfig::default(), &quick_cfg(), use_ae).unwrap();
            let path = dir.path().join(format!("m{use_ae}.json"));
            save_model(&model, &path).unwrap();
            let back = load_model(&path).unwrap();
            assert_eq!(back, model);
            assert_eq!(back.encoder.is_some(), use_ae);
            let a = predict_scores(&model, &ds.features).unwrap();
            let b = predict_scores(&back, &ds.features).unwrap();
            assert!(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn corrupt_model_files() {
        let ds = toy_dataset(10, 9);
        let model = train(&ds, &ExpansionConfig::default(), &quick_cfg(), true).unwrap();
        let text = model_to_json(&model).unwrap();
        assert!(matches!(model_from_json(&text[..text.len() / 2]), Err(Error::Format(_))));
        let bumped = text.replacen("\"version\": 1", "\"version\": 2", 1);
        assert!(matches!(model_from_json(&bumped), Err(Error::Format(_))));
        assert!(matches!(model_from_json("{}"), Err(Error::Format(_))));

        let mut bad = model.clone();
        bad.out_b.push(0.0);
        let text = model_to_json(&bad).unwrap();
        assert!(matches!(model_from_json(&text), Err(Error::Format(_))));
    }
}
