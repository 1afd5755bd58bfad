//! Dataset types, loaders, normalization and fold assignment.

mod arff;
mod csv_single;
mod folds;
mod normalize;

pub use arff::{load_mulan, parse_arff, parse_label_xml, write_mulan, ArffAttribute, ArffData};
pub use csv_single::{load_csv_features, load_csv_single_label};
pub use folds::{make_folds, train_test_split, FoldPlan};
pub use normalize::{apply_normalizer, fit_normalizer, NormalizationParams};

use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

/// `N × d` features paired with an `N × C` binary label matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiLabelDataset {
    pub features: DenseMatrix,
    pub labels: DenseMatrix,
    pub feature_names: Vec<String>,
    pub label_names: Vec<String>,
    /// Cells (row, column) that were `?` in the source file. Their feature
    /// value is a placeholder until [`MultiLabelDataset::impute_missing`] runs.
    pub missing: Vec<(usize, usize)>,
    /// Index of each row in the originally loaded dataset; preserved by
    /// [`MultiLabelDataset::select_rows`].
    pub row_ids: Vec<usize>,
}

impl MultiLabelDataset {
    pub fn new(
        features: DenseMatrix,
        labels: DenseMatrix,
        feature_names: Vec<String>,
        label_names: Vec<String>,
    ) -> Result<Self> {
        if features.rows() != labels.rows() {
            return Err(Error::Shape {
                op: "dataset rows",
                left: features.shape(),
                right: labels.shape(),
            });
        }
        if feature_names.len() != features.cols() || label_names.len() != labels.cols() {
            return Err(Error::Schema(format!(
                "{} feature names for {} columns, {} label names for {} columns",
                feature_names.len(),
                features.cols(),
                label_names.len(),
                labels.cols()
            )));
        }
        check_binary(&labels)?;
        let row_ids = (0..features.rows()).collect();
        Ok(Self {
            features,
            labels,
            feature_names,
            label_names,
            missing: Vec::new(),
            row_ids,
        })
    }

    /// Builds a dataset with generated names `f0..` and `l0..`.
    pub fn unnamed(features: DenseMatrix, labels: DenseMatrix) -> Result<Self> {
        let f = (0..features.cols()).map(|i| format!("f{i}")).collect();
        let l = (0..labels.cols()).map(|i| format!("l{i}")).collect();
        Self::new(features, labels, f, l)
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn num_features(&self) -> usize {
        self.features.cols()
    }

    pub fn num_labels(&self) -> usize {
        self.labels.cols()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut local = vec![usize::MAX; self.len()];
        for (new, &old) in indices.iter().enumerate() {
            local[old] = new;
        }
        let missing = self
            .missing
            .iter()
            .filter(|(r, _)| local[*r] != usize::MAX)
            .map(|&(r, c)| (local[r], c))
            .collect();
        Self {
            features: self.features.select_rows(indices),
            labels: self.labels.select_rows(indices),
            feature_names: self.feature_names.clone(),
            label_names: self.label_names.clone(),
            missing,
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }

    /// Per-column means over the non-missing cells. Columns with no observed
    /// value get 0.
    pub fn observed_column_means(&self) -> Vec<f64> {
        let d = self.num_features();
        let mut is_missing = vec![false; self.len() * d];
        for &(r, c) in &self.missing {
            is_missing[r * d + c] = true;
        }
        let mut sums = vec![0.0; d];
        let mut counts = vec![0usize; d];
        for (r, row) in self.features.iter_rows().enumerate() {
            for (c, &v) in row.iter().enumerate() {
                if !is_missing[r * d + c] {
                    sums[c] += v;
                    counts[c] += 1;
                }
            }
        }
        sums.iter()
            .zip(&counts)
            .map(|(s, &n)| if n == 0 { 0.0 } else { s / n as f64 })
            .collect()
    }

    /// Fills every missing cell with `fill[column]` and clears the mask.
    pub fn impute_missing(&mut self, fill: &[f64]) -> Result<()> {
        if fill.len() != self.num_features() {
            return Err(Error::Shape {
                op: "impute_missing",
                left: self.features.shape(),
                right: (1, fill.len()),
            });
        }
        for &(r, c) in &self.missing {
            self.features.set(r, c, fill[c]);
        }
        self.missing.clear();
        Ok(())
    }

    /// True when every row has exactly one relevant label.
    pub fn is_single_label(&self) -> bool {
        self.labels
            .iter_rows()
            .all(|r| r.iter().filter(|&&v| v == 1.0).count() == 1)
    }
}

pub(crate) fn check_binary(labels: &DenseMatrix) -> Result<()> {
    for (r, row) in labels.iter_rows().enumerate() {
        if let Some((c, v)) = row
            .iter()
            .enumerate()
            .find(|(_, &v)| v != 0.0 && v != 1.0)
        {
            return Err(Error::Data(format!(
                "label cell ({r}, {c}) is {v}, expected 0 or 1"
            )));
        }
    }
    Ok(())
}

/// Features with exactly one class per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleLabelDataset {
    pub features: DenseMatrix,
    pub class_index: Vec<usize>,
    /// Original label text for each class index, in first-appearance order.
    pub class_names: Vec<String>,
}

impl SingleLabelDataset {
    pub fn new(
        features: DenseMatrix,
        class_index: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        if class_index.len() != features.rows() {
            return Err(Error::Shape {
                op: "single-label dataset",
                left: features.shape(),
                right: (class_index.len(), 1),
            });
        }
        if let Some(&bad) = class_index.iter().find(|&&c| c >= class_names.len()) {
            return Err(Error::Data(format!(
                "class index {bad} out of range for {} classes",
                class_names.len()
            )));
        }
        Ok(Self {
            features,
            class_index,
            class_names,
        })
    }

    pub fn len(&self) -> usize {
        self.class_index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_index.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn select_rows(&self, indices: &[usize]) -> Self {
        Self {
            features: self.features.select_rows(indices),
            class_index: indices.iter().map(|&i| self.class_index[i]).collect(),
            class_names: self.class_names.clone(),
        }
    }

    /// One-hot encodes the classes as an `N × C` label matrix.
    pub fn to_multi_label(&self) -> MultiLabelDataset {
        let c = self.num_classes();
        let mut labels = DenseMatrix::zeros(self.len(), c);
        for (r, &k) in self.class_index.iter().enumerate() {
            labels.set(r, k, 1.0);
        }
        let feature_names = (0..self.features.cols()).map(|i| format!("f{i}")).collect();
        MultiLabelDataset::new(
            self.features.clone(),
            labels,
            feature_names,
            self.class_names.clone(),
        )
        .expect("one-hot labels are binary and shapes agree")
    }
}
