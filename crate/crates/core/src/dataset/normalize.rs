use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

/// Per-feature min/max fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl NormalizationParams {
    pub fn len(&self) -> usize {
        self.min.len()
    }

    pub fn is_empty(&self) -> bool {
        self.min.is_empty()
    }

    pub fn is_constant(&self, column: usize) -> bool {
        self.max[column] == self.min[column]
    }

    /// Indices of features whose training range is a single value.
    pub fn constant_columns(&self) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.is_constant(c)).collect()
    }
}

pub fn fit_normalizer(train_features: &DenseMatrix) -> Result<NormalizationParams> {
    if train_features.rows() == 0 {
        return Err(Error::Data("cannot fit a normalizer on zero rows".into()));
    }
    let mut min = train_features.row(0).to_vec();
    let mut max = min.clone();
    for row in train_features.iter_rows().skip(1) {
        for (c, &v) in row.iter().enumerate() {
            min[c] = min[c].min(v);
            max[c] = max[c].max(v);
        }
    }
    Ok(NormalizationParams { min, max })
}

/// Min-max scales each column to `[0, 1]`, clamping values outside the fitted
/// range. Constant columns map to 0.5.
pub fn apply_normalizer(features: &DenseMatrix, params: &NormalizationParams) -> Result<DenseMatrix> {
    if features.cols() != params.len() {
        return Err(Error::Shape {
            op: "apply_normalizer",
            left: features.shape(),
            right: (1, params.len()),
        });
    }
    let mut out = features.clone();
    let d = params.len();
    if d == 0 {
        return Ok(out);
    }
    for row in out.as_mut_slice().chunks_exact_mut(d) {
        for (c, v) in row.iter_mut().enumerate() {
            let (lo, hi) = (params.min[c], params.max[c]);
            *v = if hi == lo {
                0.5
            } else {
                ((*v - lo) / (hi - lo)).clamp(0.0, 1.0)
            };
        }
    }
    Ok(out)
}
