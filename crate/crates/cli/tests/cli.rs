use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracdyn"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn mlf_eval_prints_value_and_method() {
    let o = run(&["mlf", "eval", "--alpha", "0.5", "--re", "-1"]);
    assert!(o.status.success());
    let out = String::from_utf8(o.stdout).unwrap();
    let fields: Vec<&str> = out.split_whitespace().collect();
    let v: f64 = fields[0].parse().unwrap();
    // e * erfc(1)
    assert!((v - 0.427_583_576_155_807).abs() < 1e-13);
    assert_eq!(fields[2], "half_order_identity");
}

#[test]
fn every_checked_in_scenario_runs() {
    let cases = [
        (vec!["evolve", "spectral", "--config"], "box_spectral.cfg", "trace.csv"),
        (vec!["evolve", "caputo", "--config"], "box_caputo.cfg", "trace.csv"),
        (vec!["evolve", "operator-form", "--config"], "box_operator_form.cfg", "trace.csv"),
        (vec!["evolve", "comb", "--config"], "comb_box.cfg", "comb_0000.csv"),
        (vec!["poles", "--hamiltonian"], "poles_box.cfg", "poles.csv"),
        (vec!["mlf", "--config"], "mlf_points.cfg", "mlf.csv"),
        (vec!["hyperbolic", "--config"], "hyperbolic_gaussian.cfg", "moments.csv"),
    ];
    for (args, file, expect) in cases {
        let dir = tempfile::tempdir().unwrap();
        let cfg = scenario(file);
        let mut all: Vec<&str> = args.clone();
        all.push(cfg.to_str().unwrap());
        all.extend(["--out", dir.path().to_str().unwrap(), "--quiet"]);
        let o = run(&all);
        assert!(o.status.success(), "{file}: {}", stderr(&o));
        assert!(o.stdout.is_empty(), "--quiet still printed for {file}");
        assert!(dir.path().join(expect).exists(), "{file}");
        assert!(dir.path().join("manifest.json").exists(), "{file}");
    }
}

#[test]
fn evolve_reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        let o = run(&[
            "evolve",
            "spectral",
            "--config",
            scenario("box_spectral.cfg").to_str().unwrap(),
            "--out",
            d.path().to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 7);
    for n in names {
        assert_eq!(fs::read(a.path().join(&n)).unwrap(), fs::read(b.path().join(&n)).unwrap(), "{n:?}");
    }
}

#[test]
fn config_errors_exit_two_with_one_line_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    fs::write(&bad, "name = x\nmodule = mlf\nalpha = 1.5\ntimes = 0\n").unwrap();
    let o = run(&["mlf", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    let first = err.lines().next().unwrap();
    assert!(first.starts_with("error kind=validation_error exit=2 message="), "{first}");
    assert!(first.contains("alpha"));

    fs::write(&bad, "name = x\nmodule = fse_spectral\nalpha = 0.5\n[grid]\nx_min = 0\nx_max = 1\nn = 20\n").unwrap();
    let o = run(&["evolve", "spectral", "--config", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("times"));

    let o = run(&["evolve", "spectral", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn numerical_failures_exit_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.cfg");
    let text = fs::read_to_string(scenario("box_caputo.cfg")).unwrap().replace("n = 33", "n = 129");
    fs::write(&cfg, text).unwrap();
    let o = run(&["evolve", "caputo", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error kind=stability_guard_tripped exit=3"));
}

#[test]
fn hyperbolic_flags_emit_moment_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "hyperbolic",
        "--mode",
        "semiclassical",
        "--profile",
        "gaussian",
        "--hbar",
        "1",
        "--t-grid",
        "0:1:11",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(text.starts_with("t,x2_re,x2_im,diverged\n"));
    let diverged = text.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(diverged, 3);

    let o = run(&["hyperbolic", "--mode", "standard", "--t-grid", "0, 1, 2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("moments.csv")).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn verify_reports_each_criterion_and_is_reproducible() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let oa = run(&["verify", "--out", a.path().to_str().unwrap()]);
    let out = String::from_utf8(oa.stdout.clone()).unwrap();
    assert_eq!(out.lines().count(), 9, "{out}");
    for (k, line) in out.lines().enumerate() {
        assert!(line.starts_with("[PASS]") || line.starts_with("[FAIL]"));
        assert!(line.contains(&format!("] {} ", k + 1)));
    }
    // the divergence-ratio check is expected to stay red, so verify exits 3
    assert_eq!(oa.status.code(), Some(3));
    assert!(stderr(&oa).starts_with("error kind=acceptance_failed exit=3"));
    run(&["verify", "--quiet", "--out", b.path().to_str().unwrap()]);
    let csv = fs::read(a.path().join("acceptance.csv")).unwrap();
    assert_eq!(csv, fs::read(b.path().join("acceptance.csv")).unwrap());
}
