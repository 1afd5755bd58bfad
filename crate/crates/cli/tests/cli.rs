use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn aeflann(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aeflann"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// 10 instances, 3 numeric features, 6 labels, plus the label file.
fn write_fixture(dir: &Path) -> (PathBuf, PathBuf) {
    let mut arff = String::from("@relation toy\n@attribute a numeric\n@attribute b numeric\n@attribute c numeric\n");
    for j in 0..6 {
        arff.push_str(&format!("@attribute l{j} {{0,1}}\n"));
    }
    arff.push_str("@data\n");
    for i in 0..10 {
        let (a, b, c) = (i as f64 / 9.0, ((i * 7) % 10) as f64, (i % 3) as f64 - 1.0);
        let labels: Vec<String> = (0..6).map(|j| (((i + j) % 3 == 0) as u8).to_string()).collect();
        arff.push_str(&format!("{a},{b},{c},{}\n", labels.join(",")));
    }
    let mut xml = String::from("<?xml version=\"1.0\"?>\n<labels xmlns=\"http://mulan.sourceforge.net/labels\">\n");
    for j in 0..6 {
        xml.push_str(&format!("  <label name=\"l{j}\"></label>\n"));
    }
    xml.push_str("</labels>\n");
    let (a, x) = (dir.join("toy.arff"), dir.join("toy.xml"));
    fs::write(&a, arff).unwrap();
    fs::write(&x, xml).unwrap();
    (a, x)
}

fn write_single_label_csv(dir: &Path) -> PathBuf {
    let mut text = String::new();
    for i in 0..30 {
        let x = i as f64 / 29.0;
        let y = ((i * 13) % 30) as f64 / 29.0;
        text.push_str(&format!("{x},{y},{}\n", if x > 0.5 { "pos" } else { "neg" }));
    }
    let p = dir.join("single.csv");
    fs::write(&p, text).unwrap();
    p
}

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    let quick = "epochs = 20\nae_epochs = 10\nae_hidden_fraction = 0.4\n";
    fs::write(&p, format!("{quick}{body}")).unwrap();
    p
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .map(|rd| rd.map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "csv")).collect())
        .unwrap_or_default();
    v.sort();
    v
}

#[test]
fn cv_writes_fold_rows_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let cfg = write_config(dir.path(), "run.cfg", "arff = toy.arff\nxml = toy.xml\nk = 5\nseed = 3\n");

    let mut contents = Vec::new();
    for run in ["a", "b"] {
        let out = dir.path().join(run);
        let o = aeflann(&["cv", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("AE-MLFLANN"));
        let files = csv_files(&out);
        assert_eq!(files.len(), 1);
        let name = files[0].file_name().unwrap().to_str().unwrap().to_string();
        assert!(name.starts_with("toy_5fold_"), "{name}");
        let text = fs::read_to_string(&files[0]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 7);
        assert!(lines[6].starts_with("mean,"));
        assert!(out.join(name.replace(".csv", ".manifest.txt")).exists());
        contents.push((name, text));
    }
    assert_eq!(contents[0], contents[1]);
}

#[test]
fn cv_markdown_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let cfg = write_config(dir.path(), "run.cfg", "arff = toy.arff\nxml = toy.xml\nk = 2\n");
    let out = dir.path().join("out");
    let o = aeflann(&[
        "cv",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "2",
        "--format",
        "markdown",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let header = stdout(&o).lines().next().unwrap().to_string();
    assert_eq!(header.matches('|').count(), 11);
}

#[test]
fn missing_dataset_exits_2_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", "arff = nope.arff\nxml = nope.xml\n");
    let out = dir.path().join("out");
    let o = aeflann(&["cv", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(csv_files(&out).is_empty());
}

#[test]
fn bad_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.cfg", "colour = blue\n");
    let o = aeflann(&["cv", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown key"));
}

#[test]
fn divergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let cfg = write_config(
        dir.path(),
        "run.cfg",
        "arff = toy.arff\nxml = toy.xml\nk = 2\nae_learning_rate = 1e300\nae_act_encode = identity\nae_act_decode = identity\n",
    );
    let out = dir.path().join("out");
    let o = aeflann(&["cv", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn train_then_predict_multi_label() {
    let dir = tempfile::tempdir().unwrap();
    let (arff, xml) = write_fixture(dir.path());
    let cfg = write_config(dir.path(), "run.cfg", "arff = toy.arff\nxml = toy.xml\n");
    let model = dir.path().join("m.json");
    let o = aeflann(&["train", "--config", cfg.to_str().unwrap(), "--model", model.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let scores = dir.path().join("scores.csv");
    let o = aeflann(&[
        "predict",
        "--model",
        model.to_str().unwrap(),
        "--arff",
        arff.to_str().unwrap(),
        "--xml",
        xml.to_str().unwrap(),
        "--out",
        scores.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&scores).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines[0].starts_with("score_l0,"));
    assert!(lines.iter().all(|l| l.split(',').count() == 12));
}

#[test]
fn ablation_model_has_no_encoder() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let cfg = write_config(dir.path(), "run.cfg", "arff = toy.arff\nxml = toy.xml\nuse_autoencoder = false\n");
    let model = dir.path().join("m.json");
    let o = aeflann(&["train", "--config", cfg.to_str().unwrap(), "--model", model.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(fs::read_to_string(&model).unwrap().contains("\"encoder\": null"));
}

#[test]
fn single_label_mode_on_multi_hot_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    write_fixture(dir.path());
    let cfg = write_config(dir.path(), "run.cfg", "arff = toy.arff\nxml = toy.xml\nmode = single_label\n");
    let o = aeflann(&["train", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("data error"), "{}", stderr(&o));
}

#[test]
fn single_label_predict_and_failures() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_single_label_csv(dir.path());
    let cfg = write_config(dir.path(), "run.cfg", "csv = single.csv\nmode = single_label\n");
    let model = dir.path().join("m.json");
    let o = aeflann(&["train", "--config", cfg.to_str().unwrap(), "--model", model.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));

    let o = aeflann(&["predict", "--model", model.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--label-column", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("class"));
    assert_eq!(text.lines().count(), 31);

    // width mismatch: the class column is not dropped and is not numeric
    let o = aeflann(&["predict", "--model", model.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--label-column", "0"]);
    assert_eq!(o.status.code(), Some(2));

    let wide = dir.path().join("wide.csv");
    fs::write(&wide, "0.1,0.2,0.3\n0.4,0.5,0.6\n").unwrap();
    let o = aeflann(&["predict", "--model", model.to_str().unwrap(), "--csv", wide.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("shape"), "{}", stderr(&o));

    let text = fs::read_to_string(&model).unwrap();
    fs::write(&model, &text[..text.len() / 3]).unwrap();
    let o = aeflann(&["predict", "--model", model.to_str().unwrap(), "--csv", csv.to_str().unwrap(), "--label-column", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("model format error"), "{}", stderr(&o));
}

fn write_column(dir: &Path, name: &str, values: &[f64]) -> PathBuf {
    let mut text = String::from("fold,avg_precision\n");
    for (i, v) in values.iter().enumerate() {
        text.push_str(&format!("{i},{v}\n"));
    }
    text.push_str("mean,0.5\n");
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn ttest_command() {
    let dir = tempfile::tempdir().unwrap();
    let a = write_column(dir.path(), "a.csv", &[1.0, 1.0, 1.0, 2.0]);
    let b = write_column(dir.path(), "b.csv", &[0.0; 4]);
    let o = aeflann(&["ttest", a.to_str().unwrap(), b.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("t = 5.0000"), "{text}");
    assert!(text.contains("df = 3"));
    assert!(text.contains("significant = yes"));

    let five_a = write_column(dir.path(), "fa.csv", &[0.8217, 0.8235, 0.8752, 0.4996, 0.7542]);
    let five_b = write_column(dir.path(), "fb.csv", &[0.7619, 0.7696, 0.8451, 0.3391, 0.6454]);
    let o = aeflann(&["ttest", five_a.to_str().unwrap(), five_b.to_str().unwrap()]);
    assert!(stdout(&o).contains("df = 4"));

    let o = aeflann(&["ttest", a.to_str().unwrap(), a.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("degenerate"));

    let o = aeflann(&["ttest", a.to_str().unwrap(), five_b.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn expand_prints_d_times_p_columns() {
    let dir = tempfile::tempdir().unwrap();
    let csv = write_single_label_csv(dir.path());
    let o = aeflann(&["expand", "--csv", csv.to_str().unwrap(), "--label-column", "2", "--p", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 30);
    assert!(text.lines().all(|l| l.split(',').count() == 6));
    assert!(text.lines().next().unwrap().starts_with("0.0000,0.0000,1.0000"));
}
