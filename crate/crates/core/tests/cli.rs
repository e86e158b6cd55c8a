use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_censtail"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn estimate_golden_row() {
    let input = fixture("tiny5.csv");
    let o = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "3",
        "--estimator",
        "new",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "estimator,k,value,p_hat,std_err,ci_lo,ci_hi\nnew,3,0.274653,1,0.158571,NA,NA\n"
    );
}

#[test]
fn estimate_with_interval_and_several_estimators() {
    let input = fixture("tiny5.csv");
    let o = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "3",
        "--estimator",
        "new,ww1",
        "--ci",
        "0.95",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1], "new,3,0.274653,1,0.158571,0,0.585447");
    assert!(rows[2].starts_with("ww1,3,") && rows[2].ends_with(",NA,NA,NA"));
}

#[test]
fn estimate_all_k_and_auto() {
    let input = fixture("tiny5.csv");
    let o = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--all-k",
        "--estimator",
        "hill,new",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let ks: Vec<String> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(2).collect::<Vec<_>>().join(","))
        .collect();
    assert_eq!(
        ks,
        ["hill,1", "hill,2", "hill,3", "hill,4", "new,2", "new,3", "new,4"]
    );

    let o = run(&[
        "estimate",
        "--input",
        input.to_str().unwrap(),
        "--k",
        "auto",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let row = text.lines().nth(1).unwrap();
    assert!(
        row.starts_with("new,3,") || row.starts_with("new,4,"),
        "{row}"
    );
}

#[test]
fn simulate_is_byte_identical_across_runs_and_workers() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for (i, workers) in ["1", "1", "3", "8"].iter().enumerate() {
        let sub = dir.path().join(format!("run{i}"));
        fs::create_dir(&sub).unwrap();
        let out = sub.join("r.csv");
        let o = run(&[
            "simulate",
            "--model",
            "pareto:1",
            "--censor",
            "pareto:1",
            "--n",
            "200",
            "--reps",
            "10",
            "--seed",
            "7",
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        let meta = fs::read_to_string(sub.join("run.meta")).unwrap();
        assert!(meta.contains("seed=7\n") && meta.contains("model_y=pareto:1\n"));
        outputs.push((fs::read(&out).unwrap(), meta));
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
    let csv = String::from_utf8(outputs[0].0.clone()).unwrap();
    assert!(csv.starts_with("estimator,k,bias,rmse,undefined_count\n"));
}

#[test]
fn simulate_complete_data_to_stdout() {
    let o = run(&[
        "simulate",
        "--model",
        "frechet:0.5",
        "--complete-data",
        "--n",
        "50",
        "--reps",
        "3",
        "--k-grid",
        "5,10",
        "--estimators",
        "hill",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 3);
}

#[test]
fn select_k_prints_choice_and_curve() {
    let input = fixture("tiny5.csv");
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("crit.csv");
    let o = run(&[
        "select-k",
        "--input",
        input.to_str().unwrap(),
        "--estimator",
        "hill",
        "--k-min",
        "2",
        "--k-max",
        "4",
        "--criterion-out",
        curve.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.starts_with("k_star,theta,estimator\n"));
    assert!(text.ends_with(",0.3,hill\n"));
    let crit = fs::read_to_string(curve).unwrap();
    assert_eq!(crit.lines().next(), Some("k,criterion"));
    assert_eq!(crit.lines().count(), 4);
}

#[test]
fn gof_row() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let mut text = String::from("z,delta\n");
    for i in 1..=200 {
        let u = (i as f64 - 0.5) / 200.0;
        text.push_str(&format!("{},{}\n", 1.0 / (1.0 - u), u8::from(i % 4 != 0)));
    }
    fs::write(&data, text).unwrap();
    let args = [
        "gof",
        "--input",
        data.to_str().unwrap(),
        "--k",
        "40",
        "--reps",
        "199",
        "--seed",
        "3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(
        a.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&a.stderr)
    );
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("ks,cvm,p_ks,p_cvm,k,n,reps,seed"));
    assert!(lines.next().unwrap().ends_with(",40,200,199,3"));
}

#[test]
fn convert_records() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z.csv");
    let o = run(&[
        "convert",
        "--input",
        fixture("records.csv").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        fs::read_to_string(out).unwrap(),
        "z,delta\n1,1\n11,0\n62,1\n"
    );
}

#[test]
fn exit_codes_and_messages() {
    let input = fixture("tiny5.csv");
    let input = input.to_str().unwrap();

    let o = run(&["estimate", "--input", input, "--k", "3", "--frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--frobnicate"));

    let o = run(&["simulate", "--model", "weibull:1", "--censor", "pareto:1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weibull:1"));

    let o = run(&["estimate", "--input", "/nonexistent/x.csv", "--k", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("/nonexistent/x.csv"));

    let o = run(&["estimate", "--input", input, "--k", "9"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["estimate", "--input", input, "--k", "three"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
}
