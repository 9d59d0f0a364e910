use std::path::Path;
use std::process::{Command, Output};

const WBC: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/breast-cancer-wisconsin.data");

fn cadx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cadx")).args(args).output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn exit_codes() {
    assert_eq!(cadx(&["--help"]).status.code(), Some(0));
    assert_eq!(cadx(&["--version"]).status.code(), Some(0));
    assert_eq!(cadx(&["train", "--bogus"]).status.code(), Some(1));
    assert_eq!(cadx(&["evaluate", "--model", "/nonexistent", "--input", WBC]).status.code(), Some(2));
    let o = cadx(&["train", "--input", WBC, "--model", "svm", "--out", "/dev/null"]);
    assert_eq!(o.status.code(), Some(1), "breast is not paired with svm by default");
}

#[test]
fn extract_lung_index() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("lung");
    assert!(cadx(&["synth", "--pipeline", "lung", "--count", "10", "--seed", "1", "--out", p(&data)]).status.success());
    let csv = dir.path().join("f.csv");
    let o = cadx(&["extract", "--pipeline", "lung", "--input", p(&data.join("index.csv")), "--out", p(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11);
    assert!(lines.iter().all(|l| l.split(',').count() == 10));
    assert!(lines[0].ends_with(",label"));

    // explicit image paths: no labels
    let o = cadx(&["extract", "--pipeline", "lung", p(&data.join("lung_0000.pgm")), p(&data.join("lung_0001.pgm"))]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 3);
    assert!(!out.lines().next().unwrap().contains("label"));
}

#[test]
fn extract_empty_index_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let index = dir.path().join("index.csv");
    std::fs::write(&index, "path,label\n").unwrap();
    let o = cadx(&["extract", "--pipeline", "melanoma", "--input", p(&index)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "asymmetry_major,asymmetry_minor,border_irregularity,color_variation,diameter,entropy\n"
    );
}

#[test]
fn extract_unreadable_file() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("lung");
    assert!(cadx(&["synth", "--pipeline", "lung", "--count", "4", "--out", p(&data)]).status.success());
    let index = data.join("index.csv");
    let mut text = std::fs::read_to_string(&index).unwrap();
    text.push_str("missing.pgm,0\n");
    std::fs::write(&index, text).unwrap();

    let out = dir.path().join("strict.csv");
    let o = cadx(&["extract", "--pipeline", "lung", "--input", p(&index), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.pgm"));
    assert!(!out.exists());

    let o = cadx(&["extract", "--pipeline", "lung", "--input", p(&index), "--keep-going", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing.pgm"));
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 5);
}

#[test]
fn train_reports_split() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("m");
    let o = cadx(&["train", "--input", WBC, "--model", "gd", "--split", "0.55", "--seed", "7", "--out", p(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("split 55:45"), "{out}");
    assert!(out.contains("683 complete"));
    assert!(std::fs::read_to_string(&model).unwrap().starts_with("# cadx model"));

    let data = dir.path().join("lung");
    assert!(cadx(&["synth", "--pipeline", "lung", "--count", "30", "--out", p(&data)]).status.success());
    let csv = dir.path().join("f.csv");
    assert!(cadx(&["extract", "--pipeline", "lung", "--input", p(&data.join("index.csv")), "--out", p(&csv)]).status.success());
    let o = cadx(&["train", "--input", p(&csv), "--split", "0.7", "--out", p(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("split 70:30"));
    assert!(stdout(&o).contains("model svm"));
}

#[test]
fn train_single_class_fails() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one.csv");
    std::fs::write(&csv, "x,label\n1,0\n2,0\n3,0\n").unwrap();
    let o = cadx(&["train", "--input", p(&csv), "--pipeline", "breast", "--model", "gd", "--out", p(&dir.path().join("m"))]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("both classes"));
}

#[test]
fn evaluate_and_predict() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("toy.csv");
    let mut text = String::from("x,label\n");
    for i in 0..10 {
        text.push_str(&format!("{i},{}\n", u8::from(i >= 5)));
    }
    std::fs::write(&csv, &text).unwrap();
    let model = dir.path().join("m");
    let o = cadx(&["train", "--input", p(&csv), "--pipeline", "breast", "--model", "gd", "--out", p(&model)]);
    assert!(o.status.success(), "{}", stderr(&o));

    let report = dir.path().join("r.csv");
    let o = cadx(&["evaluate", "--model", p(&model), "--input", p(&csv), "--out", p(&report)]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("TP 5  FP 0  TN 5  FN 0  inconclusive 0"), "{out}");
    for key in ["sensitivity", "specificity", "PPV", "NPV", "MCC", "accuracy"] {
        let line = out.lines().find(|l| l.trim_start().starts_with(key)).unwrap();
        assert!(line.ends_with("1.0000"), "{line}");
    }
    assert_eq!(std::fs::read_to_string(&report).unwrap().lines().count(), 2);

    let o = cadx(&["predict", "--model", p(&model), "--row", "9"]);
    assert!(stdout(&o).starts_with("malignant "));
    assert!(stdout(&o).trim_end().ends_with(" false"));
    let o = cadx(&["predict", "--model", p(&model), "--row", "0"]);
    assert!(stdout(&o).starts_with("benign "));
    let o = cadx(&["predict", "--model", p(&model), "--row", "1,2"]);
    assert_eq!(o.status.code(), Some(2));

    let wrong = dir.path().join("wrong.csv");
    std::fs::write(&wrong, "y,label\n1,0\n").unwrap();
    let o = cadx(&["evaluate", "--model", p(&model), "--input", p(&wrong)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`y`"), "{}", stderr(&o));

    let empty = dir.path().join("empty.csv");
    std::fs::write(&empty, "x,label\n").unwrap();
    let o = cadx(&["evaluate", "--model", p(&model), "--input", p(&empty)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).is_empty());
}

#[test]
fn curve_csv() {
    let o = cadx(&["curve", "--input", WBC, "--model", "gd", "--sizes", "10,100", "--epochs", "200"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("10,"));
    let o = cadx(&["curve", "--input", WBC, "--model", "gd", "--sizes", "100000"]);
    assert_eq!(o.status.code(), Some(2));
}
