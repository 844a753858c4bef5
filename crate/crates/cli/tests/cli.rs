use std::path::Path;
use std::process::{Command, Output};

fn lclrr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lclrr"))
        .args(args)
        .env("LCLRR_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &[&str] = &["--repetitions", "2", "--max-iter", "150"];

#[test]
fn bench_synth_csv_is_byte_identical_across_runs() {
    let args: Vec<&str> =
        ["bench-synth", "--format", "csv", "--seed", "3"].iter().chain(SMALL).copied().collect();
    let a = lclrr(&args);
    let b = lclrr(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "method,condition,accuracy_pct,train_seconds,repetition,nn_accuracy_pct,iterations,converged"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[3].contains(",mean,"));
}

#[test]
fn json_report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mut args = vec!["bench-synth", "--format", "json", "--out", out.to_str().unwrap()];
    args.extend(SMALL);
    let o = lclrr(&args);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("\"mean_accuracy_pct\""));
    assert!(!text.contains("train_seconds"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"repetitions": 1, "solver": {"max_iter": 120}}"#).unwrap();
    let o = lclrr(&["bench-synth", "--config", cfg.to_str().unwrap(), "--format", "csv", "--alpha", "0.2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 3);

    std::fs::write(&cfg, r#"{"no_such_field": 1}"#).unwrap();
    let o = lclrr(&["bench-synth", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn exit_codes() {
    assert_eq!(lclrr(&["bench-synth", "--lambda", "-1"]).status.code(), Some(1));
    assert_eq!(lclrr(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(lclrr(&["bench-dir", "/definitely/not/here"]).status.code(), Some(2));
    assert_eq!(lclrr(&["inspect", "/definitely/not/here.lrmx"]).status.code(), Some(2));
    let o = lclrr(&["bench-synth", "--gamma", "0", "--repetitions", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("gamma > 0"));
    assert_eq!(lclrr(&["--help"]).status.code(), Some(0));
}

fn write_training_set(dir: &Path) -> (String, String) {
    // two classes on the two coordinate axes of R^4, with small offsets
    let mut rows = vec![String::new(); 4];
    let mut labels = String::new();
    for j in 0..12 {
        let class = j % 2;
        let t = 1.0 + j as f64 * 0.05;
        let col = if class == 0 { [t, 0.1, 0.0, 0.02 * j as f64] } else { [0.0, 0.1, t, 0.01 * j as f64] };
        for (r, v) in col.iter().enumerate() {
            if !rows[r].is_empty() {
                rows[r].push(',');
            }
            rows[r].push_str(&format!("{v:?}"));
        }
        labels.push_str(if class == 0 { "left\n" } else { "right\n" });
    }
    let data = dir.join("x.csv");
    std::fs::write(&data, format!("4,12\n{}\n", rows.join("\n"))).unwrap();
    let lab = dir.join("labels.txt");
    std::fs::write(&lab, labels).unwrap();
    (data.to_str().unwrap().to_string(), lab.to_str().unwrap().to_string())
}

#[test]
fn fit_predict_inspect_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (data, labels) = write_training_set(dir.path());
    let model = dir.path().join("model");
    let m = model.to_str().unwrap();
    let o = lclrr(&["fit", "--data", &data, "--labels", &labels, "--model", m, "--max-iter", "200"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["model.json", "dictionary.lrmx", "classifier.lrmx", "residuals.csv"] {
        assert!(model.join(f).exists(), "{f}");
    }

    let probe = dir.path().join("probe.csv");
    std::fs::write(&probe, "4,2\n2.0,0.0\n0.1,0.1\n0.0,2.0\n0.0,0.0\n").unwrap();
    let o = lclrr(&["predict", "--model", m, "--data", probe.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "left\nright\n");

    let o = lclrr(&["inspect", m]);
    let text = stdout(&o);
    assert!(text.contains("2 classes (left, right)"));
    assert!(text.contains("iteration,feasibility,z_j_gap,z_l_gap,mu\n1,"));
    let o = lclrr(&["inspect", &data]);
    assert!(stdout(&o).starts_with("shape: 4x12\n"));

    let wrong = dir.path().join("wrong.csv");
    std::fs::write(&wrong, "3,1\n1\n2\n3\n").unwrap();
    let o = lclrr(&["predict", "--model", m, "--data", wrong.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn rpca_bench_reports_both_methods() {
    let mut args = vec!["rpca-bench", "--format", "csv"];
    args.extend(SMALL);
    let o = lclrr(&args);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("\nlclrrdl,"));
    assert!(text.contains("\nrpca+lrr,"));
}
