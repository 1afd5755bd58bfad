//! Under-complete single-hidden-layer autoencoder.
//!
//! Encoder `A = σ₁(X·W₁ + b₁)`, decoder `X″ = σ₂(A·W₂ + b₂)`. Training runs
//! online backpropagation over a seeded shuffle of the rows each epoch; the
//! per-sample objective is `½‖x − x″‖²`, whose gradient is the per-sample
//! share of the mean squared reconstruction error up to a constant factor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::matrix::affine_row;
use crate::kernel::{apply_activation, matmul, uniform_init, ActivationKind, DenseMatrix, SeededRng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AutoencoderParams {
    /// `d_in × d′` encoder weights.
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    /// `d′ × d_in` decoder weights.
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
    pub act_encode: ActivationKind,
    pub act_decode: ActivationKind,
}

impl AutoencoderParams {
    pub fn new(
        w1: DenseMatrix,
        b1: Vec<f64>,
        w2: DenseMatrix,
        b2: Vec<f64>,
        act_encode: ActivationKind,
        act_decode: ActivationKind,
    ) -> Result<Self> {
        let (d_in, hidden) = w1.shape();
        if hidden >= d_in {
            return Err(Error::Config(format!(
                "autoencoder must be under-complete: hidden width {hidden} >= input width {d_in}"
            )));
        }
        if w2.shape() != (hidden, d_in) || b1.len() != hidden || b2.len() != d_in {
            return Err(Error::Shape {
                op: "autoencoder params",
                left: w1.shape(),
                right: w2.shape(),
            });
        }
        Ok(Self {
            w1,
            b1,
            w2,
            b2,
            act_encode,
            act_decode,
        })
    }

    pub fn input_width(&self) -> usize {
        self.w1.rows()
    }

    pub fn hidden_width(&self) -> usize {
        self.w1.cols()
    }

    /// Validates shapes after deserialization.
    pub(crate) fn check(&self) -> Result<()> {
        Self::new(
            self.w1.clone(),
            self.b1.clone(),
            self.w2.clone(),
            self.b2.clone(),
            self.act_encode,
            self.act_decode,
        )
        .map(|_| ())
    }
}

pub fn encode(x: &DenseMatrix, params: &AutoencoderParams) -> Result<DenseMatrix> {
    if x.cols() != params.input_width() {
        return Err(Error::Shape {
            op: "encode",
            left: x.shape(),
            right: params.w1.shape(),
        });
    }
    let z = matmul(x, &params.w1)?.add_row_vector(&params.b1)?;
    Ok(apply_activation(&z, params.act_encode))
}

pub fn decode(a: &DenseMatrix, params: &AutoencoderParams) -> Result<DenseMatrix> {
    if a.cols() != params.hidden_width() {
        return Err(Error::Shape {
            op: "decode",
            left: a.shape(),
            right: params.w2.shape(),
        });
    }
    let z = matmul(a, &params.w2)?.add_row_vector(&params.b2)?;
    Ok(apply_activation(&z, params.act_decode))
}

/// Mean over all `N·d_in` entries of `(x − decode(encode(x)))²`.
pub fn reconstruction_mse(x: &DenseMatrix, params: &AutoencoderParams) -> Result<f64> {
    let recon = decode(&encode(x, params)?, params)?;
    let n = x.as_slice().len();
    if n == 0 {
        return Ok(0.0);
    }
    let sse: f64 = x
        .as_slice()
        .iter()
        .zip(recon.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sse / n as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AeTrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    /// Hidden width is `max(1, ⌈hidden_fraction · d_in⌉)`.
    pub hidden_fraction: f64,
    pub init_scale: f64,
    pub seed: u64,
    pub act_encode: ActivationKind,
    pub act_decode: ActivationKind,
}

impl Default for AeTrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 300,
            hidden_fraction: 0.2,
            init_scale: 0.5,
            seed: 0,
            act_encode: ActivationKind::Sigmoid,
            act_decode: ActivationKind::Sigmoid,
        }
    }
}

impl AeTrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Config(format!(
                "autoencoder learning rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(self.hidden_fraction > 0.0 && self.hidden_fraction < 1.0) {
            return Err(Error::Config(format!(
                "hidden fraction must lie in (0, 1), got {}",
                self.hidden_fraction
            )));
        }
        if !(self.init_scale.is_finite() && self.init_scale > 0.0) {
            return Err(Error::Config(format!(
                "autoencoder init scale must be > 0, got {}",
                self.init_scale
            )));
        }
        Ok(())
    }

    pub fn hidden_width(&self, d_in: usize) -> usize {
        ((self.hidden_fraction * d_in as f64).ceil() as usize).max(1)
    }
}

/// Gradients of a scalar loss with respect to every autoencoder parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AutoencoderGradients {
    pub w1: DenseMatrix,
    pub b1: Vec<f64>,
    pub w2: DenseMatrix,
    pub b2: Vec<f64>,
}

impl AutoencoderGradients {
    fn zeros_like(p: &AutoencoderParams) -> Self {
        Self {
            w1: DenseMatrix::zeros(p.w1.rows(), p.w1.cols()),
            b1: vec![0.0; p.b1.len()],
            w2: DenseMatrix::zeros(p.w2.rows(), p.w2.cols()),
            b2: vec![0.0; p.b2.len()],
        }
    }
}

/// Per-sample forward/backward buffers.
struct Scratch {
    hidden: Vec<f64>,
    recon: Vec<f64>,
    delta_out: Vec<f64>,
    delta_hidden: Vec<f64>,
}

impl Scratch {
    fn new(p: &AutoencoderParams) -> Self {
        Self {
            hidden: vec![0.0; p.hidden_width()],
            recon: vec![0.0; p.input_width()],
            delta_out: vec![0.0; p.input_width()],
            delta_hidden: vec![0.0; p.hidden_width()],
        }
    }

    fn forward(&mut self, x: &[f64], p: &AutoencoderParams) {
        affine_row(x, &p.w1, &p.b1, &mut self.hidden);
        p.act_encode.apply_in_place(&mut self.hidden);
        affine_row(&self.hidden, &p.w2, &p.b2, &mut self.recon);
        p.act_decode.apply_in_place(&mut self.recon);
    }

    /// Fills the deltas for the loss `½‖x − x″‖²` after `forward`. Returns
    /// the sample's squared error `‖x − x″‖²`.
    fn backward(&mut self, x: &[f64], p: &AutoencoderParams) -> f64 {
        let mut sse = 0.0;
        for ((d, &r), &t) in self.delta_out.iter_mut().zip(&self.recon).zip(x) {
            let err = r - t;
            sse += err * err;
            *d = err * p.act_decode.derivative_from_output(r);
        }
        for (j, dh) in self.delta_hidden.iter_mut().enumerate() {
            let back: f64 = p
                .w2
                .row(j)
                .iter()
                .zip(&self.delta_out)
                .map(|(w, d)| w * d)
                .sum();
            *dh = back * p.act_encode.derivative_from_output(self.hidden[j]);
        }
        sse
    }
}

/// Exact gradient of [`reconstruction_mse`] over all rows of `x`.
pub fn mse_gradients(x: &DenseMatrix, params: &AutoencoderParams) -> Result<AutoencoderGradients> {
    if x.cols() != params.input_width() {
        return Err(Error::Shape {
            op: "mse_gradients",
            left: x.shape(),
            right: params.w1.shape(),
        });
    }
    let mut g = AutoencoderGradients::zeros_like(params);
    let mut s = Scratch::new(params);
    for row in x.iter_rows() {
        s.forward(row, params);
        s.backward(row, params);
        for (j, &a) in s.hidden.iter().enumerate() {
            for (gw, &d) in g.w2.row_mut(j).iter_mut().zip(&s.delta_out) {
                *gw += a * d;
            }
        }
        for (gb, &d) in g.b2.iter_mut().zip(&s.delta_out) {
            *gb += d;
        }
        for (k, &xk) in row.iter().enumerate() {
            for (gw, &d) in g.w1.row_mut(k).iter_mut().zip(&s.delta_hidden) {
                *gw += xk * d;
            }
        }
        for (gb, &d) in g.b1.iter_mut().zip(&s.delta_hidden) {
            *gb += d;
        }
    }
    // d/dθ of (1/(N·d)) Σ (x − x″)² is (2/(N·d)) Σ of the ½-loss gradients.
    let scale = 2.0 / (x.as_slice().len().max(1) as f64);
    for v in g.w1.as_mut_slice().iter_mut().chain(g.w2.as_mut_slice()) {
        *v *= scale;
    }
    for v in g.b1.iter_mut().chain(g.b2.iter_mut()) {
        *v *= scale;
    }
    Ok(g)
}

/// Trained parameters plus the reconstruction MSE history: entry 0 is the
/// MSE at initialization and entry `e` the MSE after epoch `e`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedAutoencoder {
    pub params: AutoencoderParams,
    pub history: Vec<f64>,
}

impl TrainedAutoencoder {
    /// `epoch,mse` CSV of the training history.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("epoch,mse\n");
        for (e, m) in self.history.iter().enumerate() {
            out.push_str(&format!("{e},{m:.10}\n"));
        }
        out
    }
}

pub fn init_autoencoder(d_in: usize, config: &AeTrainConfig) -> Result<AutoencoderParams> {
    config.validate()?;
    let hidden = config.hidden_width(d_in);
    let mut rng = SeededRng::new(config.seed);
    let w1 = uniform_init(d_in, hidden, config.init_scale, &mut rng)?;
    let w2 = uniform_init(hidden, d_in, config.init_scale, &mut rng)?;
    AutoencoderParams::new(
        w1,
        vec![0.0; hidden],
        w2,
        vec![0.0; d_in],
        config.act_encode,
        config.act_decode,
    )
}

pub fn train_autoencoder(x: &DenseMatrix, config: &AeTrainConfig) -> Result<TrainedAutoencoder> {
    train_autoencoder_observed(x, config, &mut |_| {})
}

/// As [`train_autoencoder`], calling `on_row(i)` each time row `i` of `x`
/// is consumed by a training step.
pub fn train_autoencoder_observed(
    x: &DenseMatrix,
    config: &AeTrainConfig,
    on_row: &mut dyn FnMut(usize),
) -> Result<TrainedAutoencoder> {
    if x.rows() == 0 {
        return Err(Error::Data("cannot train an autoencoder on zero rows".into()));
    }
    let mut params = init_autoencoder(x.cols(), config)?;
    // weights and shuffle order draw from separate streams
    let mut order_rng = SeededRng::new(crate::kernel::derive_seed(config.seed, 1));
    let lr = config.learning_rate;

    let mut history = Vec::with_capacity(config.epochs + 1);
    history.push(reconstruction_mse(x, &params)?);
    let mut s = Scratch::new(&params);

    for epoch in 1..=config.epochs {
        let order = order_rng.permutation(x.rows());
        for &i in &order {
            on_row(i);
            let row = x.row(i);
            s.forward(row, &params);
            s.backward(row, &params);

            // decoder first: the hidden deltas were computed with the old W₂
            for (j, &a) in s.hidden.iter().enumerate() {
                let step = lr * a;
                for (w, &d) in params.w2.row_mut(j).iter_mut().zip(&s.delta_out) {
                    *w -= step * d;
                }
            }
            for (b, &d) in params.b2.iter_mut().zip(&s.delta_out) {
                *b -= lr * d;
            }
            for (k, &xk) in row.iter().enumerate() {
                if xk == 0.0 {
                    continue;
                }
                let step = lr * xk;
                for (w, &d) in params.w1.row_mut(k).iter_mut().zip(&s.delta_hidden) {
                    *w -= step * d;
                }
            }
            for (b, &d) in params.b1.iter_mut().zip(&s.delta_hidden) {
                *b -= lr * d;
            }
        }
        let mse = reconstruction_mse(x, &params)?;
        if !mse.is_finite() || !params_finite(&params) {
            return Err(Error::Divergence {
                epoch,
                what: format!("autoencoder reconstruction error is {mse}"),
            });
        }
        history.push(mse);
    }
    Ok(TrainedAutoencoder { params, history })
}

fn params_finite(p: &AutoencoderParams) -> bool {
    p.w1.as_slice()
        .iter()
        .chain(p.w2.as_slice())
        .chain(&p.b1)
        .chain(&p.b2)
        .all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero_params(d_in: usize, hidden: usize, act: ActivationKind) -> AutoencoderParams {
        AutoencoderParams::new(
            DenseMatrix::zeros(d_in, hidden),
            vec![0.0; hidden],
            DenseMatrix::zeros(hidden, d_in),
            vec![0.0; d_in],
            act,
            act,
        )
        .unwrap()
    }

    fn random_unit(n: usize, d: usize, seed: u64) -> DenseMatrix {
        uniform_init(n, d, 0.5, &mut SeededRng::new(seed))
            .unwrap()
            .map(|v| v + 0.5)
    }

    #[test]
    fn zero_weight_sigmoid_outputs_half() {
        let p = zero_params(4, 2, ActivationKind::Sigmoid);
        let x = random_unit(3, 4, 1);
        let a = encode(&x, &p).unwrap();
        assert_eq!(a.shape(), (3, 2));
        assert!(a.as_slice().iter().all(|&v| v == 0.5));
        let r = decode(&a, &p).unwrap();
        assert_eq!(r.shape(), (3, 4));
        assert!(r.as_slice().iter().all(|&v| v == 0.5));
    }

    #[test]
    fn identity_activation_is_plain_matmul() {
        let mut rng = SeededRng::new(4);
        let w1 = uniform_init(4, 2, 1.0, &mut rng).unwrap();
        let w2 = uniform_init(2, 4, 1.0, &mut rng).unwrap();
        let p = AutoencoderParams::new(
            w1.clone(),
            vec![0.0; 2],
            w2.clone(),
            vec![0.0; 4],
            ActivationKind::Identity,
            ActivationKind::Identity,
        )
        .unwrap();
        let x = random_unit(3, 4, 2);
        let a = encode(&x, &p).unwrap();
        assert!(a.max_abs_diff(&matmul(&x, &w1).unwrap()) < 1e-15);
        let r = decode(&a, &p).unwrap();
        assert!(r.max_abs_diff(&matmul(&a, &w2).unwrap()) < 1e-15);
    }

    #[test]
    fn shape_errors() {
        let p = zero_params(4, 2, ActivationKind::Sigmoid);
        assert!(matches!(encode(&DenseMatrix::zeros(1, 3), &p), Err(Error::Shape { .. })));
        assert!(matches!(decode(&DenseMatrix::zeros(1, 3), &p), Err(Error::Shape { .. })));
    }

    #[test]
    fn under_complete_enforced() {
        let r = AutoencoderParams::new(
            DenseMatrix::zeros(2, 2),
            vec![0.0; 2],
            DenseMatrix::zeros(2, 2),
            vec![0.0; 2],
            ActivationKind::Sigmoid,
            ActivationKind::Sigmoid,
        );
        assert!(matches!(r, Err(Error::Config(_))));
        let cfg = AeTrainConfig {
            hidden_fraction: 0.5,
            ..AeTrainConfig::default()
        };
        assert!(train_autoencoder(&DenseMatrix::filled(3, 1, 0.5), &cfg).is_err());
    }

    #[test]
    fn reconstruction_mse_examples() {
        let p = zero_params(4, 2, ActivationKind::Sigmoid);
        assert_eq!(reconstruction_mse(&DenseMatrix::filled(3, 4, 0.5), &p).unwrap(), 0.0);
        assert_eq!(reconstruction_mse(&DenseMatrix::filled(3, 4, 1.0), &p).unwrap(), 0.25);

        // identity AE whose weights project onto the first two coordinates
        let mut w1 = DenseMatrix::zeros(3, 2);
        w1.set(0, 0, 1.0);
        w1.set(1, 1, 1.0);
        let p = AutoencoderParams::new(
            w1.clone(),
            vec![0.0; 2],
            w1.transpose(),
            vec![0.0; 3],
            ActivationKind::Identity,
            ActivationKind::Identity,
        )
        .unwrap();
        let x = DenseMatrix::from_rows(&[[0.3, 0.7, 0.0], [0.1, 0.2, 0.0]]).unwrap();
        assert_eq!(reconstruction_mse(&x, &p).unwrap(), 0.0);
    }

    #[test]
    fn hidden_width_rule() {
        let cfg = AeTrainConfig::default();
        assert_eq!(cfg.hidden_width(360), 72);
        assert_eq!(cfg.hidden_width(8), 2);
        assert_eq!(cfg.hidden_width(3), 1);
    }

    #[test]
    fn zero_epochs_returns_initialization() {
        let cfg = AeTrainConfig {
            epochs: 0,
            seed: 3,
            ..AeTrainConfig::default()
        };
        let x = random_unit(10, 8, 5);
        let trained = train_autoencoder(&x, &cfg).unwrap();
        assert_eq!(trained.params, init_autoencoder(8, &cfg).unwrap());
        assert_eq!(trained.history.len(), 1);
    }

    #[test]
    fn deterministic_and_learns() {
        let cfg = AeTrainConfig {
            epochs: 50,
            seed: 11,
            ..AeTrainConfig::default()
        };
        let x = random_unit(50, 8, 6);
        let a = train_autoencoder(&x, &cfg).unwrap();
        let b = train_autoencoder(&x, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.history.len(), 51);
        assert!(a.history[50] < a.history[0]);
        assert!(a.history_csv().starts_with("epoch,mse\n0,"));
    }

    #[test]
    fn divergence_is_reported_with_epoch() {
        let cfg = AeTrainConfig {
            epochs: 5,
            learning_rate: 1e300,
            act_encode: ActivationKind::Identity,
            act_decode: ActivationKind::Identity,
            ..AeTrainConfig::default()
        };
        let x = random_unit(20, 8, 7);
        match train_autoencoder(&x, &cfg) {
            Err(Error::Divergence { epoch, .. }) => assert!(epoch >= 1),
            Err(Error::Domain(_)) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn observer_sees_every_row_each_epoch() {
        let cfg = AeTrainConfig {
            epochs: 3,
            ..AeTrainConfig::default()
        };
        let x = random_unit(6, 5, 8);
        let mut counts = vec![0; 6];
        train_autoencoder_observed(&x, &cfg, &mut |i| counts[i] += 1).unwrap();
        assert_eq!(counts, vec![3; 6]);
    }

    #[test]
    fn config_validation() {
        for bad in [
            AeTrainConfig { learning_rate: 0.0, ..Default::default() },
            AeTrainConfig { hidden_fraction: 1.0, ..Default::default() },
            AeTrainConfig { hidden_fraction: 0.0, ..Default::default() },
            AeTrainConfig { init_scale: -1.0, ..Default::default() },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
    }
}
