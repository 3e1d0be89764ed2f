use std::path::Path;
use std::process::{Command, Output};

fn obsaudit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obsaudit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SMALL: &[&str] = &["--n", "20000", "--k", "2", "--eps_list", "2", "--repetitions", "3", "--guess_fractions", "0.01"];

fn audit(extra: &[&str]) -> Output {
    let mut args = vec!["audit-rr"];
    args.extend_from_slice(SMALL);
    args.extend_from_slice(extra);
    obsaudit(&args)
}

#[test]
fn audit_writes_csv_to_stdout() {
    let out = audit(&["--seed", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "k,theoretical_eps,proxy_kind,tau,guess_fraction,repetition,c_prime,c,empirical_eps,saturated"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("2,2,ground_truth,0,0.01,0,200,"));
}

#[test]
fn same_seed_same_report() {
    let a = stdout(&audit(&["--seed", "9"]));
    let b = stdout(&audit(&["--seed", "9"]));
    let c = stdout(&audit(&["--seed", "10"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn seed_is_mandatory() {
    let out = audit(&[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_values_are_config_errors() {
    for extra in [["--gamma", "1.5"], ["--proxy_kind", "oracle"], ["--n", "lots"], ["--format", "xml"]] {
        let mut args = vec!["--seed", "1"];
        args.extend_from_slice(&extra);
        let out = audit(&args);
        assert_eq!(out.status.code(), Some(2), "{extra:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# small run\nn = 20000\nk = 2\neps_list = [1, 3]\nrepetitions = 2\nguess_fractions = 0.01, 0.05\n",
    )
    .unwrap();
    let report = dir.path().join("r.json");
    let out = obsaudit(&[
        "audit-rr",
        "--seed",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--eps-list",
        "1",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&report).unwrap();
    assert!(text.contains("\"schema_version\": 1"));
    let parsed = obsaudit::experiment::read_report_json(&report).unwrap();
    assert_eq!(parsed.config.eps_list, vec![1.0]);
    assert_eq!(parsed.config.base_seed, 3);
    assert_eq!(parsed.rows.len(), 4);
}

#[test]
fn strict_mode_flags_saturation() {
    let sat = ["--seed", "2", "--mu_max", "0.05"];
    let relaxed = audit(&sat);
    assert_eq!(relaxed.status.code(), Some(0));
    let mut strict = sat.to_vec();
    strict.push("--strict");
    assert_eq!(audit(&strict).status.code(), Some(3));
}

#[test]
fn synth_then_train_proxy() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.csv");
    let model = dir.path().join("m.txt");
    let out = obsaudit(&["synth", "--n", "3000", "--k", "3", "--seed", "5", "--out", data.to_str().unwrap()]);
    assert!(out.status.success());
    let loaded = obsaudit::LabeledDataset::read_csv(&data).unwrap();
    assert_eq!((loaded.len(), loaded.k(), loaded.d()), (3000, 3, 5));

    let out = obsaudit(&[
        "train-proxy",
        "--data",
        data.to_str().unwrap(),
        "--iterations",
        "50",
        "--out",
        model.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let m = obsaudit::proxy::LogisticModel::load(&model).unwrap();
    assert_eq!((m.k(), m.d()), (3, 5));

    let bad = obsaudit(&["synth", "--n", "10", "--k", "6", "--d", "5", "--seed", "1", "--out", data.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn epsilon_of_a_tally() {
    let out = obsaudit(&["epsilon", "--m", "1000000", "--c-prime", "1000", "--c", "1000"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let eps: f64 = text.lines().next().unwrap().split('\t').nth(1).unwrap().parse().unwrap();
    assert!(eps > 5.0 && eps < 7.0, "{text}");
    assert_eq!(obsaudit(&["epsilon", "--m", "10", "--c-prime", "3", "--c", "4"]).status.code(), Some(2));
}

#[test]
fn check_runs_selected_criteria() {
    let out = obsaudit(&["check", "--only", "6"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("PASS criterion 6"));
    assert!(!obsaudit(&["check", "--only", "9"]).status.success());
    assert!(Path::new(env!("CARGO_BIN_EXE_obsaudit")).exists());
}
