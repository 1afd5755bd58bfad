//! Multi-label evaluation metrics and single-label accuracy.
//!
//! Conventions: ranks are 1-based by descending score with ties going to the
//! lower label index; tied relevant/irrelevant pairs count as misordered in
//! ranking loss; F1 treats 0/0 as 0. Rows without relevant labels are skipped
//! by one-error and average precision and contribute 0 to coverage; ranking
//! loss also skips rows without irrelevant labels.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct MetricsReport {
    pub avg_precision: f64,
    pub hamming_loss: f64,
    pub one_error: f64,
    pub coverage: f64,
    pub ranking_loss: f64,
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub subset_accuracy: f64,
}

impl MetricsReport {
    pub const FIELD_NAMES: [&'static str; 8] = [
        "avg_precision",
        "hamming_loss",
        "one_error",
        "coverage",
        "ranking_loss",
        "micro_f1",
        "macro_f1",
        "subset_accuracy",
    ];

    pub fn values(&self) -> [f64; 8] {
        [
            self.avg_precision,
            self.hamming_loss,
            self.one_error,
            self.coverage,
            self.ranking_loss,
            self.micro_f1,
            self.macro_f1,
            self.subset_accuracy,
        ]
    }

    pub fn from_values(v: [f64; 8]) -> Self {
        Self {
            avg_precision: v[0],
            hamming_loss: v[1],
            one_error: v[2],
            coverage: v[3],
            ranking_loss: v[4],
            micro_f1: v[5],
            macro_f1: v[6],
            subset_accuracy: v[7],
        }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        Self::FIELD_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values()[i])
    }

    /// Field-wise arithmetic mean.
    pub fn mean(reports: &[MetricsReport]) -> Result<Self> {
        if reports.is_empty() {
            return Err(Error::Data("cannot average zero reports".into()));
        }
        let mut sum = [0.0; 8];
        for r in reports {
            for (s, v) in sum.iter_mut().zip(r.values()) {
                *s += v;
            }
        }
        Ok(Self::from_values(sum.map(|s| s / reports.len() as f64)))
    }
}

/// All eight metrics from labels, scores and thresholded predictions.
pub fn evaluate(y: &DenseMatrix, scores: &DenseMatrix, pred: &DenseMatrix) -> Result<MetricsReport> {
    Ok(MetricsReport {
        avg_precision: average_precision(y, scores)?,
        hamming_loss: hamming_loss(y, pred)?,
        one_error: one_error(y, scores)?,
        coverage: coverage(y, scores)?,
        ranking_loss: ranking_loss(y, scores)?,
        micro_f1: micro_f1(y, pred)?,
        macro_f1: macro_f1(y, pred)?,
        subset_accuracy: subset_accuracy(y, pred)?,
    })
}

fn same_shape(op: &'static str, a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::Shape {
            op,
            left: a.shape(),
            right: b.shape(),
        });
    }
    Ok(())
}

fn non_empty(op: &str, y: &DenseMatrix) -> Result<()> {
    if y.rows() == 0 || y.cols() == 0 {
        return Err(Error::Data(format!("{op} needs a non-empty label matrix")));
    }
    Ok(())
}

#[inline]
fn relevant(v: f64) -> bool {
    v > 0.5
}

/// Label indices ordered by rank: descending score, ties to the lower index.
fn ranking(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// 1-based rank of every label.
fn ranks(scores: &[f64]) -> Vec<usize> {
    let mut r = vec![0; scores.len()];
    for (pos, j) in ranking(scores).into_iter().enumerate() {
        r[j] = pos + 1;
    }
    r
}

fn mean_or_zero(sum: f64, count: usize) -> f64 {
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

pub fn hamming_loss(y: &DenseMatrix, pred: &DenseMatrix) -> Result<f64> {
    same_shape("hamming_loss", y, pred)?;
    non_empty("hamming_loss", y)?;
    let wrong = y
        .as_slice()
        .iter()
        .zip(pred.as_slice())
        .filter(|(a, b)| relevant(**a) != relevant(**b))
        .count();
    Ok(wrong as f64 / y.as_slice().len() as f64)
}

pub fn subset_accuracy(y: &DenseMatrix, pred: &DenseMatrix) -> Result<f64> {
    same_shape("subset_accuracy", y, pred)?;
    non_empty("subset_accuracy", y)?;
    let exact = y
        .iter_rows()
        .zip(pred.iter_rows())
        .filter(|(a, b)| a.iter().zip(b.iter()).all(|(u, v)| relevant(*u) == relevant(*v)))
        .count();
    Ok(exact as f64 / y.rows() as f64)
}

pub fn one_error(y: &DenseMatrix, scores: &DenseMatrix) -> Result<f64> {
    same_shape("one_error", y, scores)?;
    non_empty("one_error", y)?;
    let (mut misses, mut counted) = (0usize, 0usize);
    for (yr, sr) in y.iter_rows().zip(scores.iter_rows()) {
        if !yr.iter().any(|&v| relevant(v)) {
            continue;
        }
        counted += 1;
        if !relevant(yr[ranking(sr)[0]]) {
            misses += 1;
        }
    }
    Ok(mean_or_zero(misses as f64, counted))
}

pub fn coverage(y: &DenseMatrix, scores: &DenseMatrix) -> Result<f64> {
    same_shape("coverage", y, scores)?;
    non_empty("coverage", y)?;
    let mut total = 0.0;
    for (yr, sr) in y.iter_rows().zip(scores.iter_rows()) {
        let r = ranks(sr);
        if let Some(worst) = (0..yr.len()).filter(|&j| relevant(yr[j])).map(|j| r[j]).max() {
            total += (worst - 1) as f64;
        }
    }
    Ok(total / y.rows() as f64)
}

pub fn ranking_loss(y: &DenseMatrix, scores: &DenseMatrix) -> Result<f64> {
    same_shape("ranking_loss", y, scores)?;
    non_empty("ranking_loss", y)?;
    let (mut total, mut counted) = (0.0, 0usize);
    for (yr, sr) in y.iter_rows().zip(scores.iter_rows()) {
        let (rel, irr): (Vec<usize>, Vec<usize>) = (0..yr.len()).partition(|&j| relevant(yr[j]));
        if rel.is_empty() || irr.is_empty() {
            continue;
        }
        let reversed = rel
            .iter()
            .map(|&a| irr.iter().filter(|&&b| sr[a] <= sr[b]).count())
            .sum::<usize>();
        total += reversed as f64 / (rel.len() * irr.len()) as f64;
        counted += 1;
    }
    Ok(mean_or_zero(total, counted))
}

pub fn average_precision(y: &DenseMatrix, scores: &DenseMatrix) -> Result<f64> {
    same_shape("average_precision", y, scores)?;
    non_empty("average_precision", y)?;
    let (mut total, mut counted) = (0.0, 0usize);
    for (yr, sr) in y.iter_rows().zip(scores.iter_rows()) {
        // walking the ranking, the k-th relevant label found at rank r adds k/r
        let (mut hits, mut row) = (0usize, 0.0);
        for (pos, j) in ranking(sr).into_iter().enumerate() {
            if relevant(yr[j]) {
                hits += 1;
                row += hits as f64 / (pos + 1) as f64;
            }
        }
        if hits > 0 {
            total += row / hits as f64;
            counted += 1;
        }
    }
    Ok(mean_or_zero(total, counted))
}

/// `(tp, fp, fn)` for column `j`, or pooled over all columns when `None`.
fn confusion(y: &DenseMatrix, pred: &DenseMatrix, col: Option<usize>) -> (usize, usize, usize) {
    let (mut tp, mut fp, mut fneg) = (0, 0, 0);
    for (yr, pr) in y.iter_rows().zip(pred.iter_rows()) {
        let cols = match col {
            Some(j) => j..j + 1,
            None => 0..yr.len(),
        };
        for j in cols {
            match (relevant(yr[j]), relevant(pr[j])) {
                (true, true) => tp += 1,
                (false, true) => fp += 1,
                (true, false) => fneg += 1,
                (false, false) => {}
            }
        }
    }
    (tp, fp, fneg)
}

fn f1(tp: usize, fp: usize, fneg: usize) -> f64 {
    let denom = 2 * tp + fp + fneg;
    if denom == 0 {
        0.0
    } else {
        (2 * tp) as f64 / denom as f64
    }
}

pub fn micro_f1(y: &DenseMatrix, pred: &DenseMatrix) -> Result<f64> {
    same_shape("micro_f1", y, pred)?;
    non_empty("micro_f1", y)?;
    let (tp, fp, fneg) = confusion(y, pred, None);
    Ok(f1(tp, fp, fneg))
}

pub fn macro_f1(y: &DenseMatrix, pred: &DenseMatrix) -> Result<f64> {
    same_shape("macro_f1", y, pred)?;
    non_empty("macro_f1", y)?;
    let sum: f64 = (0..y.cols())
        .map(|j| {
            let (tp, fp, fneg) = confusion(y, pred, Some(j));
            f1(tp, fp, fneg)
        })
        .sum();
    Ok(sum / y.cols() as f64)
}

pub fn accuracy(truth: &[usize], predicted: &[usize]) -> Result<f64> {
    if truth.len() != predicted.len() {
        return Err(Error::Shape {
            op: "accuracy",
            left: (truth.len(), 1),
            right: (predicted.len(), 1),
        });
    }
    if truth.is_empty() {
        return Err(Error::Data("accuracy needs at least one instance".into()));
    }
    let hits = truth.iter().zip(predicted).filter(|(a, b)| a == b).count();
    Ok(hits as f64 / truth.len() as f64)
}
