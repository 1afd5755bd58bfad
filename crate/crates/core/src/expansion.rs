//! Trigonometric functional expansion.
//!
//! Each normalized feature `x ∈ [0, 1]` becomes the block
//! `[x, sin(πx), cos(πx), sin(2πx), cos(2πx), …]` of `p` terms, and the
//! blocks are concatenated in feature order, so `d` features expand to `d·p`
//! columns.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

pub const DEFAULT_BASIS_COUNT: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum Basis {
    Trigonometric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Basis functions per feature; odd and at least 1.
    pub p: usize,
    pub basis: Basis,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            p: DEFAULT_BASIS_COUNT,
            basis: Basis::Trigonometric,
        }
    }
}

impl ExpansionConfig {
    pub fn trigonometric(p: usize) -> Result<Self> {
        let cfg = Self {
            p,
            basis: Basis::Trigonometric,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.p == 0 || self.p.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "basis count p must be odd and at least 1, got {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn output_width(&self, d: usize) -> usize {
        d * self.p
    }

    /// Writes the `p` basis values of one scalar into `out`.
    #[inline]
    fn expand_scalar(&self, x: f64, out: &mut [f64]) {
        match self.basis {
            Basis::Trigonometric => {
                out[0] = x;
                for k in 1..=(self.p - 1) / 2 {
                    let (s, c) = (k as f64 * PI * x).sin_cos();
                    out[2 * k - 1] = s;
                    out[2 * k] = c;
                }
            }
        }
    }
}

/// Expands an `N × d` matrix with entries in `[0, 1]` to `N × (d·p)`.
pub fn expand(features: &DenseMatrix, config: &ExpansionConfig) -> Result<DenseMatrix> {
    config.validate()?;
    if let Some(bad) = features
        .as_slice()
        .iter()
        .find(|v| !(0.0..=1.0).contains(*v))
    {
        return Err(Error::Domain(format!(
            "expansion input {bad} outside [0, 1]; features must be normalized first"
        )));
    }
    let (n, d) = features.shape();
    let p = config.p;
    let width = config.output_width(d);
    let mut out = DenseMatrix::zeros(n, width);
    if width == 0 {
        return Ok(out);
    }
    out.as_mut_slice()
        .par_chunks_mut(width)
        .zip(features.as_slice().par_chunks(d))
        .for_each(|(dst, src)| {
            for (j, &x) in src.iter().enumerate() {
                config.expand_scalar(x, &mut dst[j * p..(j + 1) * p]);
            }
        });
    Ok(out)
}
