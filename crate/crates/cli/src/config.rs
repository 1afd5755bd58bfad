//! Flat `key = value` run configuration.
//!
//! Blank lines and lines starting with `#` are ignored. Relative paths are
//! resolved against the directory holding the config file.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use aeflann::autoencoder::AeTrainConfig;
use aeflann::classifier::{Mode, TrainConfig};
use aeflann::expansion::ExpansionConfig;
use aeflann::kernel::ActivationKind;
use aeflann::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub name: Option<String>,
    pub arff: Option<PathBuf>,
    pub xml: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    /// Class column of a CSV; `None` means the last column.
    pub label_column: Option<usize>,
    pub mode: Mode,
    pub p: usize,
    pub use_autoencoder: bool,
    pub ae_learning_rate: f64,
    pub ae_epochs: usize,
    pub ae_hidden_fraction: f64,
    pub ae_init_scale: f64,
    pub ae_act_encode: ActivationKind,
    pub ae_act_decode: ActivationKind,
    pub mu: f64,
    pub epochs: usize,
    pub init_scale: f64,
    pub k: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ae = AeTrainConfig::default();
        let train = TrainConfig::default();
        Self {
            name: None,
            arff: None,
            xml: None,
            csv: None,
            label_column: None,
            mode: Mode::MultiLabel,
            p: ExpansionConfig::default().p,
            use_autoencoder: true,
            ae_learning_rate: ae.learning_rate,
            ae_epochs: ae.epochs,
            ae_hidden_fraction: ae.hidden_fraction,
            ae_init_scale: ae.init_scale,
            ae_act_encode: ae.act_encode,
            ae_act_decode: ae.act_decode,
            mu: train.mu,
            epochs: train.epochs,
            init_scale: train.init_scale,
            k: 5,
            seed: 0,
            out_dir: PathBuf::from("results"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("line {line}: invalid value '{value}' for '{key}'")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("line {line}: '{key}' expects true or false, got '{value}'"))),
    }
}

impl RunConfig {
    pub fn parse_str(text: &str, base: &Path) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let path = |v: &str| {
            let p = PathBuf::from(v);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value', got '{trimmed}'")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => cfg.name = Some(value.to_string()),
                "arff" => cfg.arff = Some(path(value)),
                "xml" => cfg.xml = Some(path(value)),
                "csv" => cfg.csv = Some(path(value)),
                "label_column" => {
                    cfg.label_column = if value == "last" {
                        None
                    } else {
                        Some(parse(key, value, line)?)
                    }
                }
                "mode" => cfg.mode = value.parse().map_err(|e| Error::Config(format!("line {line}: {e}")))?,
                "p" => cfg.p = parse(key, value, line)?,
                "use_autoencoder" => cfg.use_autoencoder = parse_bool(key, value, line)?,
                "ae_learning_rate" => cfg.ae_learning_rate = parse(key, value, line)?,
                "ae_epochs" => cfg.ae_epochs = parse(key, value, line)?,
                "ae_hidden_fraction" => cfg.ae_hidden_fraction = parse(key, value, line)?,
                "ae_init_scale" => cfg.ae_init_scale = parse(key, value, line)?,
                "ae_act_encode" => cfg.ae_act_encode = parse(key, value, line)?,
                "ae_act_decode" => cfg.ae_act_decode = parse(key, value, line)?,
                "mu" => cfg.mu = parse(key, value, line)?,
                "epochs" => cfg.epochs = parse(key, value, line)?,
                "init_scale" => cfg.init_scale = parse(key, value, line)?,
                "k" => cfg.k = parse(key, value, line)?,
                "seed" => cfg.seed = parse(key, value, line)?,
                "out_dir" => cfg.out_dir = path(value),
                other => return Err(Error::Config(format!("line {line}: unknown key '{other}'"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse_str(&text, base)
    }

    pub fn expansion(&self) -> Result<ExpansionConfig> {
        ExpansionConfig::trigonometric(self.p)
    }

    pub fn train_config(&self) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            mu: self.mu,
            epochs: self.epochs,
            seed: 0,
            init_scale: self.init_scale,
            ae: AeTrainConfig {
                learning_rate: self.ae_learning_rate,
                epochs: self.ae_epochs,
                hidden_fraction: self.ae_hidden_fraction,
                init_scale: self.ae_init_scale,
                seed: 0,
                act_encode: self.ae_act_encode,
                act_decode: self.ae_act_decode,
            },
        }
        .with_run_seed(self.seed);
        cfg.validate()?;
        Ok(cfg)
    }

    /// Dataset name used in output file names.
    pub fn dataset_name(&self) -> String {
        if let Some(n) = &self.name {
            return n.clone();
        }
        self.arff
            .as_ref()
            .or(self.csv.as_ref())
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".into())
    }

    /// `(key, value)` pairs describing the inputs, for run manifests.
    pub fn input_lines(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        for (key, p) in [("arff", &self.arff), ("xml", &self.xml), ("csv", &self.csv)] {
            if let Some(p) = p {
                out.push((key, p.display().to_string()));
            }
        }
        if self.csv.is_some() {
            let col = self.label_column.map_or("last".to_string(), |c| c.to_string());
            out.push(("label_column", col));
        }
        out.push(("run_seed", self.seed.to_string()));
        out
    }
}
