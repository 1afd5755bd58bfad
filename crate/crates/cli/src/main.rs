mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use aeflann::classifier::{
    load_model, predict_class, predict_scores, save_model, threshold_scores, train_observed, AeMlFlannModel, Mode,
};
use aeflann::dataset::{
    apply_normalizer, fit_normalizer, load_csv_features, load_csv_single_label, load_mulan, MultiLabelDataset,
};
use aeflann::expansion::{expand, ExpansionConfig};
use aeflann::harness::{
    cross_validate_with, paired_t_test, read_metric_column, render_report, write_cv_artifacts, CvOptions,
    ReportEntry, ReportFormat, DEFAULT_CRITICAL,
};
use aeflann::kernel::DenseMatrix;
use aeflann::{Error, Result};

use crate::config::RunConfig;

#[derive(Parser)]
#[command(name = "aeflann", version, about = "Autoencoder functional-link multi-label classifier")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// k-fold cross-validation; writes per-fold CSV and a run manifest
    Cv(CvArgs),
    /// Train on the full dataset and save the model
    Train(TrainArgs),
    /// Score a dataset with a saved model
    Predict(PredictArgs),
    /// Paired t-test between one metric column of two result CSVs
    Ttest(TtestArgs),
    /// Print the normalized, functionally expanded features of a CSV
    Expand(ExpandArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config output directory
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(out) = &self.out {
            cfg.out_dir = out.clone();
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct CvArgs {
    #[command(flatten)]
    run: RunArgs,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Model path; defaults to `<out>/<dataset>.model.json`
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, conflicts_with = "csv", requires = "xml")]
    arff: Option<PathBuf>,
    #[arg(long)]
    xml: Option<PathBuf>,
    #[arg(long, required_unless_present = "arff")]
    csv: Option<PathBuf>,
    /// CSV column to drop before scoring (e.g. the class column)
    #[arg(long)]
    label_column: Option<usize>,
    /// Output CSV; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TtestArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "avg_precision")]
    column: String,
    #[arg(long, default_value_t = DEFAULT_CRITICAL)]
    critical: f64,
}

#[derive(Args)]
struct ExpandArgs {
    #[arg(long)]
    csv: PathBuf,
    #[arg(long)]
    label_column: Option<usize>,
    #[arg(long, default_value_t = 5)]
    p: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cv(a) => cmd_cv(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Predict(a) => cmd_predict(&a),
        Command::Ttest(a) => cmd_ttest(&a),
        Command::Expand(a) => cmd_expand(&a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_divergence() { 3 } else { 2 })
        }
    }
}

fn csv_width(path: &Path) -> Result<usize> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Data(format!("{}: {e}", path.display())))?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| Error::Data(format!("{}: file is empty", path.display())))?;
    Ok(first.split(',').count())
}

fn load_dataset(cfg: &RunConfig) -> Result<MultiLabelDataset> {
    match (&cfg.arff, &cfg.csv) {
        (Some(arff), None) => {
            let xml = cfg
                .xml
                .as_ref()
                .ok_or_else(|| Error::Config("'arff' needs a matching 'xml' label file".into()))?;
            load_mulan(arff, xml)
        }
        (None, Some(csv)) => {
            if cfg.mode != Mode::SingleLabel {
                return Err(Error::Config("CSV input is single-label; set mode = single_label".into()));
            }
            let col = match cfg.label_column {
                Some(c) => c,
                None => csv_width(csv)? - 1,
            };
            Ok(load_csv_single_label(csv, col)?.to_multi_label())
        }
        (Some(_), Some(_)) => Err(Error::Config("set either 'arff' or 'csv', not both".into())),
        (None, None) => Err(Error::Config("no dataset: set 'arff' and 'xml', or 'csv'".into())),
    }
}

fn method_name(cfg: &RunConfig) -> &'static str {
    match (cfg.mode, cfg.use_autoencoder) {
        (Mode::MultiLabel, true) => "AE-MLFLANN",
        (Mode::MultiLabel, false) => "MLFLANN",
        (Mode::SingleLabel, true) => "AE-SLFLANN",
        (Mode::SingleLabel, false) => "SLFLANN",
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Data(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_cv(args: &CvArgs) -> Result<()> {
    let format: ReportFormat = args.format.parse()?;
    let cfg = args.run.load()?;
    let expansion = cfg.expansion()?;
    let train = cfg.train_config()?;
    let data = load_dataset(&cfg)?;
    let opts = CvOptions {
        mode: cfg.mode,
        jobs: args.jobs,
        audit: false,
    };
    let outcome = cross_validate_with(&data, cfg.k, &expansion, &train, cfg.use_autoencoder, cfg.seed, &opts)?;
    let name = cfg.dataset_name();
    let (csv, manifest) = write_cv_artifacts(&cfg.out_dir, &name, &outcome.result, &cfg.input_lines())?;
    print!(
        "{}",
        render_report(&[ReportEntry::from_cv(&name, method_name(&cfg), &outcome.result)], format)
    );
    if cfg.mode == Mode::SingleLabel {
        // with one-hot targets and argmax predictions exact match is accuracy
        println!("accuracy = {:.4}", outcome.result.mean_report.subset_accuracy);
    }
    eprintln!("wrote {}", csv.display());
    eprintln!("wrote {}", manifest.display());
    Ok(())
}

fn cmd_train(args: &TrainArgs) -> Result<()> {
    let cfg = args.run.load()?;
    let expansion = cfg.expansion()?;
    let train = cfg.train_config()?;
    let data = load_dataset(&cfg)?;
    let model = train_observed(&data, &expansion, &train, cfg.use_autoencoder, cfg.mode, &mut ())?.model;
    let path = match &args.model {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(&cfg.out_dir).map_err(|e| Error::Data(format!("{}: {e}", cfg.out_dir.display())))?;
            cfg.out_dir.join(format!("{}.model.json", cfg.dataset_name()))
        }
    };
    save_model(&model, &path)?;
    println!(
        "trained {} on {} instances ({} features, {} outputs, hidden width {})",
        method_name(&cfg),
        data.len(),
        data.num_features(),
        model.num_labels(),
        model.hidden_width()
    );
    eprintln!("wrote {}", path.display());
    Ok(())
}

/// Features for prediction with missing cells filled from the training means.
fn prediction_features(args: &PredictArgs, model: &AeMlFlannModel) -> Result<DenseMatrix> {
    if let Some(arff) = &args.arff {
        let xml = args.xml.as_ref().expect("clap enforces --xml with --arff");
        let ds = load_mulan(arff, xml)?;
        if ds.feature_names != model.feature_names {
            return Err(Error::Shape {
                op: "predict",
                left: (ds.len(), ds.num_features()),
                right: (1, model.num_features()),
            });
        }
        let mut f = ds.features;
        for &(r, c) in &ds.missing {
            f.set(r, c, model.fill[c]);
        }
        Ok(f)
    } else {
        let csv = args.csv.as_ref().expect("clap requires --csv without --arff");
        load_csv_features(csv, args.label_column)
    }
}

fn cmd_predict(args: &PredictArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let features = prediction_features(args, &model)?;
    let mut out = String::new();
    match model.mode {
        Mode::MultiLabel => {
            let scores = predict_scores(&model, &features)?;
            let labels = threshold_scores(&scores, model.threshold);
            let header: Vec<String> = model
                .label_names
                .iter()
                .map(|n| format!("score_{n}"))
                .chain(model.label_names.iter().map(|n| format!("label_{n}")))
                .collect();
            writeln!(out, "{}", header.join(",")).unwrap();
            for (s, l) in scores.iter_rows().zip(labels.iter_rows()) {
                let cells: Vec<String> = s
                    .iter()
                    .map(|v| format!("{v:.4}"))
                    .chain(l.iter().map(|v| format!("{}", *v as u8)))
                    .collect();
                writeln!(out, "{}", cells.join(",")).unwrap();
            }
        }
        Mode::SingleLabel => {
            writeln!(out, "class").unwrap();
            for c in predict_class(&model, &features)? {
                writeln!(out, "{c}").unwrap();
            }
        }
    }
    write_output(args.out.as_deref(), &out)
}

fn cmd_ttest(args: &TtestArgs) -> Result<()> {
    let a = read_metric_column(&args.a, &args.column)?;
    let b = read_metric_column(&args.b, &args.column)?;
    if a.len() != b.len() {
        return Err(Error::Data(format!(
            "row counts differ: {} has {}, {} has {}",
            args.a.display(),
            a.len(),
            args.b.display(),
            b.len()
        )));
    }
    let r = paired_t_test(&a, &b, args.critical)?;
    println!("column = {}", args.column);
    println!("t = {:.4}", r.t_value);
    println!("df = {}", r.degrees_of_freedom);
    println!("critical = {:.4}", r.critical_value);
    println!("significant = {}", if r.significant { "yes" } else { "no" });
    Ok(())
}

fn cmd_expand(args: &ExpandArgs) -> Result<()> {
    let cfg = ExpansionConfig::trigonometric(args.p)?;
    let features = load_csv_features(&args.csv, args.label_column)?;
    let norm = fit_normalizer(&features)?;
    let expanded = expand(&apply_normalizer(&features, &norm)?, &cfg)?;
    let mut out = String::new();
    for row in expanded.iter_rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.4}")).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    write_output(args.out.as_deref(), &out)
}
