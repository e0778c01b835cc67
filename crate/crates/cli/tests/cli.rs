use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn symqite(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symqite"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

/// Element lines of each `# term` block.
fn blocks(listing: &str) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = Vec::new();
    for line in listing.lines() {
        if line.starts_with('#') {
            out.push(Vec::new());
        } else {
            out.last_mut().unwrap().push(line.to_string());
        }
    }
    out
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn reduce_lists_relevant_strings() {
    let dir = tempfile::tempdir().unwrap();
    for (kind, q, want) in [("ising", 2, 2), ("potts", 4, 24), ("gauge", 2, 8)] {
        let cfg = write_config(dir.path(), &format!("model.kind = {kind}\nmodel.q = {q}\n"));
        let o = symqite(&["reduce", "--config", &cfg]);
        assert!(o.status.success(), "{o:?}");
        let b = blocks(&stdout(&o));
        assert_eq!(b.len(), 4);
        assert!(b.iter().all(|lines| lines.len() == want), "{kind}: {b:?}");
        if kind == "ising" {
            assert_eq!(b[0], ["YZ", "ZY"]);
        }
    }
}

#[test]
fn counts_report_both_modes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "model.kind = clock\n");
    let o = symqite(&["counts", "--config", &cfg]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0][..5], ["clock", "tr_only", "strings", "1", "480"]);
    assert_eq!(rows[1][..5], ["clock", "internal_plus_tr", "strings", "1", "224"]);
    assert_eq!(rows[1][5], "960");
}

#[test]
fn evolve_writes_trace_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = write_config(dir.path(), "evolution.tau_max = 0.2\nevolution.observables = z0: ZIII\n");
    let o = symqite(&["evolve", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(csv.starts_with("tau,beta,energy,residual,rank,z0,theta_0,"));
    let beta = column(&csv, "beta");
    assert_eq!(beta.len(), 21);
    assert!((beta[20] - 0.4).abs() < 1e-12);
    let energy = column(&csv, "energy");
    assert!(energy.windows(2).all(|w| w[1] <= w[0] + 1e-6));

    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["model.kind"], "ising");
    assert_eq!(manifest["content_hash"].as_str().unwrap().len(), 64);
    assert_eq!(manifest["complete"], true);
    assert_eq!(manifest["n_params"], 8);
}

#[test]
fn seeded_noisy_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "evolution.tau_max = 0.1\nevolution.noise_sigma = 0.001\n");
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["evolve", "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        let o = symqite(&args);
        assert!(o.status.success(), "{o:?}");
        fs::read(out.join("trace.csv")).unwrap()
    };
    let a = run("a", &["--config", &cfg, "--seed", "11"]);
    let b = run("b", &["--config", &cfg, "--seed", "11"]);
    let c = run("c", &["--config", &cfg, "--seed", "12"]);
    assert_eq!(a, b);
    assert_ne!(a, c);
    // the manifest alone reproduces the run
    let manifest = dir.path().join("a").join("manifest.json");
    let d = run("d", &["--config", manifest.to_str().unwrap()]);
    assert_eq!(a, d);
}

#[test]
fn oracle_shares_the_beta_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let cfg = write_config(dir.path(), "evolution.tau_max = 0.3\n");
    for cmd in ["evolve", "oracle"] {
        let o = symqite(&[cmd, "--config", &cfg, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{o:?}");
    }
    let trace = fs::read_to_string(out.join("trace.csv")).unwrap();
    let oracle = fs::read_to_string(out.join("oracle.csv")).unwrap();
    assert_eq!(column(&trace, "beta"), column(&oracle, "beta"));
    let band = 0.05 * 4.0;
    for (e, g) in column(&trace, "energy").iter().zip(column(&oracle, "energy")) {
        assert!((e - g).abs() <= band, "{e} vs {g}");
    }
}

#[test]
fn validate_passes_and_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let o = symqite(&["validate", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["passed"], true);
    let u1 = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "u1_counts")
        .unwrap();
    assert_eq!(u1["detail"], "19/6/69/27");
    assert!(dir.path().join("validation.json").exists());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "model.kind = heisenberg\n");
    for args in [
        vec!["reduce", "--config", bad.as_str()],
        vec!["counts", "--config", "/nonexistent/run.cfg"],
        vec!["bogus"],
    ] {
        let o = symqite(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {o:?}");
    }
    let cfg = write_config(dir.path(), "evolution.delta_tau = 0\n");
    assert_eq!(symqite(&["evolve", "--config", &cfg]).status.code(), Some(2));
}
