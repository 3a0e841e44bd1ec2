use std::path::Path;
use std::process::{Command, Output};

use kahler_core::geometry::ModelMetric;
use kahler_core::ma::{eps_sweep, read_grid_dump, EpsSweepRecord};
use kahler_verify::config::RunConfig;
use kahler_verify::output::{emit_sweep_plotdata, sweep_plot_data};
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kahler-verify"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn reports(dir: &Path) -> Vec<Value> {
    std::fs::read_to_string(dir.join("report.jsonl"))
        .expect("report written")
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn royden_rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = bin(&["--seed", "7", "--out", out.to_str().unwrap(), "royden", "--trials", "200"]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read(out.join("report.jsonl")).unwrap()
    };
    let (a, b) = (run("a"), run("b"));
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn other_seed_changes_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        let out = tmp.path().join(seed);
        bin(&["--seed", seed, "--out", out.to_str().unwrap(), "royden", "--trials", "50"]);
        std::fs::read(out.join("report.jsonl")).unwrap()
    };
    assert_ne!(run("1"), run("2"));
}

#[test]
fn parallel_and_sequential_agree() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("small.toml");
    std::fs::write(
        &cfg,
        "[royden]\ntrials = 50\n[averages]\ntensors = 5\nmc_samples = 10000\n[schwarz]\npoints_per_pair = 3\n\
         trace_lemma_samples = 1000\n[ma]\ngrid = 32\ncoarse_grid = 16\nsweep_grid = 16\nsweep_grid_2d = 0\n",
    )
    .unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = tmp.path().join(name);
        let mut args = vec!["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
        args.extend_from_slice(extra);
        args.push("verify-all");
        let o = bin(&args);
        assert!(matches!(o.status.code(), Some(0 | 1)));
        std::fs::read(out.join("report.jsonl")).unwrap()
    };
    assert_eq!(run("seq", &[]), run("par", &["--parallel"]));
}

#[test]
fn reports_are_sorted_by_claim_id() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = bin(&["--out", out.to_str().unwrap(), "run", "--suite", "hyperbolicity"]);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<String> = reports(&out).iter().map(|r| r["claim_id"].as_str().unwrap().to_string()).collect();
    let mut sorted = ids.clone();
    sorted.sort();
    assert_eq!(ids, sorted);
    assert!(out.join("timing.json").exists());
}

#[test]
fn unknown_config_key_exits_nonzero_without_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "[royden]\ntrails = 10\n").unwrap();
    let out = tmp.path().join("o");
    let o = bin(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "verify-all"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
    assert!(!out.exists());
}

#[test]
fn empty_config_is_the_default() {
    assert_eq!(RunConfig::from_toml("").unwrap(), RunConfig::default());
    assert!(RunConfig::from_toml("tol_scale = -1.0").is_err());
    assert!(RunConfig::from_toml("suite = \"everything\"").is_err());
}

#[test]
fn shrunk_tolerance_turns_failures_into_exit_one() {
    // a tolerance factor of 1e-30 leaves only exact checks passing
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let o = bin(&["--tol-scale", "1e-30", "--out", out.to_str().unwrap(), "run", "--suite", "averages"]);
    assert_eq!(o.status.code(), Some(1));
    let any_fail = reports(&out).iter().any(|r| r["status"] == "fail");
    assert!(any_fail);
}

#[test]
fn ma_flat_reports_n_log_eps() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let dump = tmp.path().join("u.grid");
    let o = bin(&[
        "--out",
        out.to_str().unwrap(),
        "ma",
        "--background",
        "flat",
        "--eps",
        "0.1",
        "--grid",
        "16",
        "--dump",
        dump.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rs = reports(&out);
    let sol = rs.iter().find(|r| r["claim_id"] == "ma.solution").expect("solution record");
    let sup = sol["details"]
        .as_array()
        .unwrap()
        .iter()
        .find(|d| d[0] == "sup_u")
        .unwrap()[1]
        .as_f64()
        .unwrap();
    assert!((sup - 0.1f64.ln()).abs() < 1e-12, "sup u = {sup}");
    let g = read_grid_dump(&dump).unwrap();
    assert_eq!((g.n, g.grid, g.eps), (1, 16, 0.1));
    assert!(g.values.iter().all(|v| (v - 0.1f64.ln()).abs() < 1e-12));
    assert!(out.join("iterations.jsonl").exists());
}

#[test]
fn bad_background_is_an_error() {
    let o = bin(&["ma", "--background", "klein-bottle", "--eps", "0.1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn claims_lists_the_registry() {
    let o = bin(&["claims"]);
    assert_eq!(o.status.code(), Some(0));
    let n = String::from_utf8_lossy(&o.stdout).lines().count();
    assert_eq!(n, kahler_core::claims::REGISTRY.len());
}

fn columns(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn flat_plot_integral_is_eps_times_volume() {
    let rec = eps_sweep(&ModelMetric::flat(1), 16, &[0.4, 0.2, 0.1], 1e-12, 20).unwrap();
    let text = sweep_plot_data(&rec).unwrap();
    assert!(text.starts_with("# eps integral sup_u slope"));
    let rows = columns(&text);
    assert_eq!(rows.len(), 3);
    // det H = 1 on a cell of unit measure, so ∫ω = 1
    for r in &rows {
        assert_eq!(r.len(), 4);
        assert!((r[1] - r[0]).abs() <= 1e-14);
        assert!((r[2] - r[0].ln()).abs() < 1e-12);
    }
    assert!(rows[0][3].is_nan());
    assert!((rows[2][3] - 1.0).abs() < 1e-12);
}

#[test]
fn perturbed_plot_integrals_decrease() {
    let rec = eps_sweep(&ModelMetric::perturbed_torus(1, 0.1), 16, &[0.4, 0.2, 0.1], 1e-10, 30).unwrap();
    let rows = columns(&sweep_plot_data(&rec).unwrap());
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
}

#[test]
fn empty_sweep_writes_no_file() {
    let rec = EpsSweepRecord {
        background: "flat".into(),
        n: 1,
        grid: 16,
        eps: vec![],
        integrals: vec![],
        cohomological: vec![],
        sup_u: vec![],
        residuals: vec![],
        slope: None,
        elementary_min_slack: f64::INFINITY,
        sup_bound: None,
        aborted: Some("nothing solved".into()),
    };
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("plot.dat");
    assert!(emit_sweep_plotdata(&rec, &path).is_err());
    assert!(!path.exists());
}

#[test]
fn sweep_subcommand_writes_plot() {
    let tmp = tempfile::tempdir().unwrap();
    let plot = tmp.path().join("p.dat");
    let o = bin(&[
        "sweep",
        "--background",
        "flat",
        "--eps",
        "0.4,0.2,0.1",
        "--grid",
        "16",
        "--plot",
        plot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(columns(&std::fs::read_to_string(plot).unwrap()).len(), 3);
    // no --out: the report stream goes to stdout
    let line = String::from_utf8_lossy(&o.stdout);
    let v: Value = serde_json::from_str(line.lines().next().unwrap()).unwrap();
    assert_eq!(v["claim_id"], "ma.eps-sweep");
}
