use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::matrix::DenseMatrix;

/// Pre-activations are clamped to this magnitude before `exp` in the sigmoid.
pub const SIGMOID_CLAMP: f64 = 500.0;

/// Largest `f64` strictly below one; sigmoid outputs saturate here instead of at 1.0.
const BELOW_ONE: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActivationKind {
    Sigmoid,
    Tanh,
    Relu,
    Identity,
}

impl ActivationKind {
    #[inline]
    pub fn apply(self, x: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => sigmoid(x),
            ActivationKind::Tanh => x.tanh(),
            ActivationKind::Relu => x.max(0.0),
            ActivationKind::Identity => x,
        }
    }

    /// Derivative expressed through the activation's own output `y = f(x)`.
    #[inline]
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            ActivationKind::Sigmoid => y * (1.0 - y),
            ActivationKind::Tanh => 1.0 - y * y,
            ActivationKind::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            ActivationKind::Identity => 1.0,
        }
    }

    #[inline]
    pub(crate) fn apply_in_place(self, values: &mut [f64]) {
        if self != ActivationKind::Identity {
            for v in values {
                *v = self.apply(*v);
            }
        }
    }
}

impl fmt::Display for ActivationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ActivationKind::Sigmoid => "sigmoid",
            ActivationKind::Tanh => "tanh",
            ActivationKind::Relu => "relu",
            ActivationKind::Identity => "identity",
        })
    }
}

impl FromStr for ActivationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sigmoid" => Ok(ActivationKind::Sigmoid),
            "tanh" => Ok(ActivationKind::Tanh),
            "relu" => Ok(ActivationKind::Relu),
            "identity" | "linear" => Ok(ActivationKind::Identity),
            other => Err(Error::Config(format!("unknown activation '{other}'"))),
        }
    }
}

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    let x = x.clamp(-SIGMOID_CLAMP, SIGMOID_CLAMP);
    let y = 1.0 / (1.0 + (-x).exp());
    // NaN falls through unchanged so divergence stays visible
    if y >= 1.0 {
        BELOW_ONE
    } else {
        y
    }
}

pub fn apply_activation(m: &DenseMatrix, kind: ActivationKind) -> DenseMatrix {
    m.map(|v| kind.apply(v))
}

/// Elementwise `y·(1−y)`, the sigmoid derivative written in terms of its output.
pub fn sigmoid_prime_from_output(y: &DenseMatrix) -> Result<DenseMatrix> {
    if let Some(bad) = y.as_slice().iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!(
            "sigmoid output must lie in [0, 1], got {bad}"
        )));
    }
    Ok(y.map(|v| v * (1.0 - v)))
}
