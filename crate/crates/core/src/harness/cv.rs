use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::classifier::{argmax, predict_scores, threshold_scores, train_observed, Mode, Stage, TrainConfig};
use crate::dataset::{make_folds, MultiLabelDataset};
use crate::error::{Error, Result};
use crate::expansion::ExpansionConfig;
use crate::kernel::DenseMatrix;
use crate::metrics::{evaluate, MetricsReport};

/// Everything that determines a cross-validation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfigSnapshot {
    pub k: usize,
    pub seed: u64,
    pub mode: Mode,
    pub use_autoencoder: bool,
    pub expansion: ExpansionConfig,
    pub train: TrainConfig,
}

/// Short stable digest of a configuration, used in result file names.
pub fn config_hash(snapshot: &ConfigSnapshot) -> String {
    let json = serde_json::to_string(snapshot).expect("config snapshot serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest.iter().take(6).map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub k: usize,
    pub fold_reports: Vec<MetricsReport>,
    pub fold_sizes: Vec<usize>,
    pub mean_report: MetricsReport,
    pub seed: u64,
    pub config_snapshot: ConfigSnapshot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvOptions {
    pub mode: Mode,
    /// Folds trained concurrently; 1 runs them in order on the calling thread.
    pub jobs: usize,
    /// Record which instances each training stage read.
    pub audit: bool,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self {
            mode: Mode::MultiLabel,
            jobs: 1,
            audit: false,
        }
    }
}

/// Instances read by each training stage of one fold, by original row id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FoldAudit {
    pub fold: usize,
    pub test_ids: BTreeSet<usize>,
    pub reads: BTreeMap<Stage, BTreeSet<usize>>,
}

impl FoldAudit {
    /// Test-fold ids that some training stage touched.
    pub fn leaked(&self, stage: Stage) -> Vec<usize> {
        self.reads
            .get(&stage)
            .map(|r| r.intersection(&self.test_ids).copied().collect())
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub result: CvResult,
    pub audits: Vec<FoldAudit>,
}

/// Multi-label k-fold cross-validation with folds run in order.
pub fn cross_validate(
    data: &MultiLabelDataset,
    k: usize,
    expansion: &ExpansionConfig,
    cfg: &TrainConfig,
    use_autoencoder: bool,
    seed: u64,
) -> Result<CvResult> {
    cross_validate_with(data, k, expansion, cfg, use_autoencoder, seed, &CvOptions::default()).map(|o| o.result)
}

/// k-fold cross-validation. Fold `f` trains with `cfg.reseeded(f)`; `seed`
/// fixes the fold assignment. Results do not depend on `jobs`.
pub fn cross_validate_with(
    data: &MultiLabelDataset,
    k: usize,
    expansion: &ExpansionConfig,
    cfg: &TrainConfig,
    use_autoencoder: bool,
    seed: u64,
    opts: &CvOptions,
) -> Result<CvOutcome> {
    cfg.validate()?;
    expansion.validate()?;
    if opts.jobs == 0 {
        return Err(Error::Config("jobs must be at least 1".into()));
    }
    let plan = make_folds(data.len(), k, seed)?;
    let run = |fold: usize| -> Result<(MetricsReport, usize, FoldAudit)> {
        run_fold(data, &plan.train_indices(fold), &plan.test_indices(fold), fold, expansion, cfg, use_autoencoder, opts)
            .map_err(|e| Error::Fold {
                fold,
                source: Box::new(e),
            })
    };

    let outcomes: Vec<Result<_>> = if opts.jobs == 1 {
        (0..k).map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", opts.jobs)))?;
        pool.install(|| (0..k).into_par_iter().map(run).collect())
    };

    let mut fold_reports = Vec::with_capacity(k);
    let mut fold_sizes = Vec::with_capacity(k);
    let mut audits = Vec::new();
    for outcome in outcomes {
        let (report, size, audit) = outcome?;
        fold_reports.push(report);
        fold_sizes.push(size);
        if opts.audit {
            audits.push(audit);
        }
    }
    let mean_report = MetricsReport::mean(&fold_reports)?;
    Ok(CvOutcome {
        result: CvResult {
            k,
            fold_reports,
            fold_sizes,
            mean_report,
            seed,
            config_snapshot: ConfigSnapshot {
                k,
                seed,
                mode: opts.mode,
                use_autoencoder,
                expansion: *expansion,
                train: *cfg,
            },
        },
        audits,
    })
}

#[allow(clippy::too_many_arguments)]
fn run_fold(
    data: &MultiLabelDataset,
    train_idx: &[usize],
    test_idx: &[usize],
    fold: usize,
    expansion: &ExpansionConfig,
    cfg: &TrainConfig,
    use_autoencoder: bool,
    opts: &CvOptions,
) -> Result<(MetricsReport, usize, FoldAudit)> {
    let train = data.select_rows(train_idx);
    let test = data.select_rows(test_idx);
    let mut audit = FoldAudit {
        fold,
        ..Default::default()
    };
    let fold_cfg = cfg.reseeded(fold as u64);
    let model = if opts.audit {
        audit.test_ids = test.row_ids.iter().copied().collect();
        let reads = &mut audit.reads;
        let mut observer = |stage: Stage, id: usize| {
            reads.entry(stage).or_default().insert(id);
        };
        train_observed(&train, expansion, &fold_cfg, use_autoencoder, opts.mode, &mut observer)?.model
    } else {
        train_observed(&train, expansion, &fold_cfg, use_autoencoder, opts.mode, &mut ())?.model
    };

    // test-fold gaps are filled with the training means stored in the model
    let mut features = test.features.clone();
    for &(r, c) in &test.missing {
        features.set(r, c, model.fill[c]);
    }
    let scores = predict_scores(&model, &features)?;
    let pred = match opts.mode {
        Mode::MultiLabel => threshold_scores(&scores, model.threshold),
        Mode::SingleLabel => one_hot_argmax(&scores),
    };
    Ok((evaluate(&test.labels, &scores, &pred)?, test.len(), audit))
}

fn one_hot_argmax(scores: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(scores.rows(), scores.cols());
    for (r, row) in scores.iter_rows().enumerate() {
        out.set(r, argmax(row), 1.0);
    }
    out
}
