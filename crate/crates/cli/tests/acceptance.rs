//! End-to-end acceptance: one `verify-all` run with default configuration,
//! then one PASS/FAIL line per criterion read off the report stream.

use std::io::Write;
use std::process::Command;

use serde_json::Value;

struct Run {
    reports: Vec<Value>,
    timing: Value,
    exit: Option<i32>,
}

impl Run {
    fn with_id(&self, id: &str) -> Vec<&Value> {
        let mut out = Vec::new();
        for r in &self.reports {
            collect(r, id, &mut out);
        }
        out
    }

    fn seconds(&self, suite: &str) -> f64 {
        self.timing["suites"][suite].as_f64().unwrap_or(f64::INFINITY)
    }
}

fn collect<'a>(r: &'a Value, id: &str, out: &mut Vec<&'a Value>) {
    if r["claim_id"] == id {
        out.push(r);
    }
    if let Some(children) = r["children"].as_array() {
        for c in children {
            collect(c, id, out);
        }
    }
}

fn all_ids(r: &Value, out: &mut Vec<String>) {
    out.push(r["claim_id"].as_str().unwrap_or_default().to_string());
    if let Some(children) = r["children"].as_array() {
        for c in children {
            all_ids(c, out);
        }
    }
}

fn passed(r: &Value) -> bool {
    r["status"] == "pass"
}

// serde_json writes non-finite floats as null
fn num(r: &Value, key: &str) -> f64 {
    r[key].as_f64().unwrap_or(f64::NAN)
}

fn detail(r: &Value, name: &str) -> Option<f64> {
    r["details"].as_array()?.iter().find(|d| d[0] == name)?[1].as_f64()
}

fn desc(r: &Value) -> &str {
    r["witness"]["description"].as_str().unwrap_or_default()
}

/// Witness description followed by the notes, which carry the sampling
/// context of aggregated records.
fn context(r: &Value) -> String {
    let mut s = desc(r).to_string();
    for n in r["notes"].as_array().into_iter().flatten() {
        s.push_str("; ");
        s.push_str(n.as_str().unwrap_or_default());
    }
    s
}

fn verify_all() -> Run {
    let dir = tempfile::tempdir().expect("tempdir");
    let out = dir.path().join("run");
    let status = Command::new(env!("CARGO_BIN_EXE_kahler-verify"))
        .arg("--out")
        .arg(&out)
        .arg("verify-all")
        .output()
        .expect("binary runs");
    let text = std::fs::read_to_string(out.join("report.jsonl")).expect("report.jsonl written");
    let reports = text.lines().map(|l| serde_json::from_str(l).expect("valid json line")).collect();
    let timing = serde_json::from_str(&std::fs::read_to_string(out.join("timing.json")).expect("timing.json"))
        .expect("valid timing json");
    Run {
        reports,
        timing,
        exit: status.status.code(),
    }
}

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn sphere_moments(run: &Run) -> Check {
    let table = run.with_id("averages.moment-table");
    ensure(table.len() == 6, format!("{} moment-table records, expected 6", table.len()))?;
    for r in &table {
        let second = detail(r, "second").unwrap_or(f64::NAN);
        ensure(passed(r) && -num(r, "slack") <= 1e-15, format!("moment table {}: slack {}", desc(r), num(r, "slack")))?;
        ensure(second.is_finite(), "missing second moment")?;
    }
    let mc = run.with_id("averages.moment-monte-carlo");
    ensure(mc.len() == 6 && mc.iter().all(|r| passed(r)), "Monte Carlo moments outside 4 standard errors")?;
    ensure(
        mc.iter().all(|r| desc(r).contains("1000000 samples")),
        "Monte Carlo sample size is not 10^6",
    )?;
    let t = run.seconds("averages");
    ensure(t < 30.0, format!("averages took {t:.1}s"))?;
    Ok(format!("6 exact moments, 6 Monte Carlo within 4 sigma, {t:.2}s"))
}

fn averaging_identities(run: &Run) -> Check {
    let mut worst = 0.0f64;
    let mut dims = Vec::new();
    for id in ["averages.hbc-ricci", "averages.hsc-scalar"] {
        for r in run.with_id(id).into_iter().filter(|r| context(r).contains("exact mode")) {
            let ctx = context(r);
            ensure(ctx.contains("100 random"), format!("{id}: {ctx}"))?;
            ensure(passed(r), format!("{id} failed: {ctx}"))?;
            worst = worst.max(-num(r, "slack"));
            let n = ctx.split("): ").nth(1).and_then(|t| t.split(',').next()).unwrap_or_default();
            dims.push(n.to_string());
        }
    }
    for n in ["n=1", "n=2", "n=3"] {
        ensure(dims.iter().filter(|d| *d == n).count() == 2, format!("missing exact records for {n}"))?;
    }
    ensure(worst <= 1e-10, format!("worst defect {worst:.3e}"))?;
    let t = run.seconds("averages");
    ensure(t < 60.0, format!("averages took {t:.1}s"))?;
    Ok(format!("worst defect {worst:.2e} over n=1,2,3"))
}

fn royden(run: &Run) -> Check {
    let sweep = run.with_id("royden.sweep");
    let r = sweep.first().ok_or("no royden.sweep record")?;
    ensure(passed(r), "royden.sweep failed")?;
    ensure(num(r, "lhs") == 0.0, format!("{} violations", num(r, "lhs")))?;
    ensure(detail(r, "trials") == Some(1000.0), "trial count is not 1000")?;
    let pol = detail(r, "max_polarization_defect").unwrap_or(f64::INFINITY);
    ensure(pol <= 1e-9, format!("polarization defect {pol:.3e}"))?;
    ensure(desc(r).contains("nu <= 4"), "nu range is not 4")?;
    let single = run.with_id("royden.single-vector");
    ensure(!single.is_empty() && single.iter().all(|r| passed(r)), "single-vector reduction failed")?;
    let t = run.seconds("royden");
    ensure(t < 300.0, format!("royden took {t:.1}s"))?;
    Ok(format!("0 violations in 1000 trials, polarization {pol:.2e}, {t:.2}s"))
}

fn laplacian(run: &Run) -> Check {
    let recs = run.with_id("schwarz.laplacian-equality");
    ensure(recs.len() >= 3, format!("{} model pairs", recs.len()))?;
    let mut two_dim = false;
    for r in &recs {
        let rel = detail(r, "relative_defect").unwrap_or(f64::INFINITY);
        let ratio = detail(r, "convergence_ratio").unwrap_or(f64::NAN);
        ensure(detail(r, "h") == Some(1e-3), "step is not 1e-3")?;
        ensure(passed(r) && rel <= 1e-4, format!("{}: relative defect {rel:.3e}", desc(r)))?;
        ensure((3.5..=4.5).contains(&ratio), format!("{}: convergence ratio {ratio}", desc(r)))?;
        two_dim |= r["witness"]["point"].as_array().is_some_and(|p| p.len() == 2);
    }
    ensure(two_dim, "no n=2 pair")?;
    let t = run.seconds("schwarz");
    ensure(t < 120.0, format!("schwarz took {t:.1}s"))?;
    Ok(format!("{} pairs, ratios in [3.5, 4.5]", recs.len()))
}

fn lemmas(run: &Run) -> Check {
    let matrix = run.with_id("schwarz.lemma-matrix");
    let points: usize = matrix.iter().map(|r| r["children"].as_array().map_or(0, Vec::len)).sum();
    ensure(points >= 200, format!("{points} points"))?;
    let names: String = matrix.iter().map(|r| desc(r)).collect::<Vec<_>>().join(";");
    for model in ["poincare-disc", "complex-ball", "perturbed-torus"] {
        ensure(names.contains(model), format!("matrix lacks {model}"))?;
    }
    let mut checked = 0;
    for id in ["schwarz.term1", "schwarz.term2", "schwarz.term3", "schwarz.estimate-lemmas"] {
        for r in run.with_id(id) {
            if r["status"] == "skipped-hypothesis" {
                continue;
            }
            checked += 1;
            ensure(passed(r) && num(r, "slack") >= -1e-9, format!("{id} at {}: slack {}", desc(r), num(r, "slack")))?;
        }
    }
    let chain = run.with_id("schwarz.lemma-chain");
    ensure(chain.iter().all(|r| r["status"] != "fail"), "lemma-chain consistency failed")?;
    ensure(matrix.iter().all(|r| passed(r)), "lemma matrix failed")?;
    Ok(format!("{points} points, {checked} lemma records, no violations"))
}

fn trace_lemma(run: &Run) -> Check {
    let sweep = run.with_id("schwarz.trace-lemma-sweep");
    let r = sweep.first().ok_or("no trace-lemma-sweep record")?;
    ensure(passed(r) && detail(r, "violations") == Some(0.0), "strict violations found")?;
    ensure(desc(r).starts_with("100000 "), "sample count is not 10^5")?;
    let boundary = run
        .with_id("schwarz.trace-lemma")
        .into_iter()
        .find(|r| desc(r).starts_with("1 "))
        .ok_or("no n=1 record")?;
    ensure(num(boundary, "slack") == 0.0, format!("n=1 slack {}", num(boundary, "slack")))?;
    Ok("0 violations in 10^5 vectors, n=1 slack 0".into())
}

fn ma_solver(run: &Run) -> Check {
    let flat = run.with_id("ma.flat-constant");
    ensure(flat.len() == 3, format!("{} flat records", flat.len()))?;
    for r in &flat {
        let res = detail(r, "residual").unwrap_or(f64::INFINITY);
        ensure(passed(r) && num(r, "lhs") <= 1e-10 && res <= 1e-12, format!("{}: error {} residual {res}", desc(r), num(r, "lhs")))?;
    }
    for eps in ["eps=0.4", "eps=0.2", "eps=0.1"] {
        ensure(flat.iter().any(|r| desc(r).ends_with(eps)), format!("no flat record with {eps}"))?;
    }
    let torus = run.with_id("ma.torus-solve");
    let t = torus.first().ok_or("no torus-solve record")?;
    ensure(desc(t).contains("grid=128"), "torus solve not at grid 128")?;
    ensure(passed(t) && num(t, "lhs") <= 1e-10, format!("torus residual {}", num(t, "lhs")))?;
    let two = run.with_id("ma.two-start");
    ensure(two.len() == 1 && passed(two[0]) && num(two[0], "lhs") <= 1e-9, "two-start disagreement")?;
    let ke = run.with_id("ma.ke-relation");
    ensure(!ke.is_empty() && ke.iter().all(|r| passed(r) && num(r, "lhs") <= 1e-6), "ke-relation defect")?;
    let mut sup = run.with_id("ma.sup-bound");
    sup.extend(run.with_id("ma.sweep-sup-bound"));
    ensure(sup.len() >= 4 && sup.iter().all(|r| passed(r) && num(r, "slack") > 0.0), "sup bound without positive slack")?;
    let secs = run.seconds("ma");
    ensure(secs < 180.0, format!("ma took {secs:.1}s"))?;
    Ok(format!("torus residual {:.2e}, two-start {:.2e}, {secs:.2}s", num(t, "lhs"), num(two[0], "lhs")))
}

fn slopes(run: &Run) -> Check {
    let mut seen = Vec::new();
    for r in run.with_id("ma.integral-slope") {
        let n = num(r, "rhs");
        let rel = (num(r, "lhs") - n).abs() / n;
        ensure(rel <= 0.02, format!("{}: slope {}", desc(r), num(r, "lhs")))?;
        seen.push(desc(r).to_string());
    }
    for bg in ["flat n=1", "perturbed-torus n=1"] {
        ensure(seen.iter().any(|d| d.starts_with(bg)), format!("no slope for {bg}"))?;
    }
    Ok(format!("{} sweeps, slope = n within 2%", seen.len()))
}

fn chain(run: &Run) -> Check {
    let formula = run.with_id("ma.sup-lower-bound-formula");
    let poincare = formula
        .iter()
        .find(|r| desc(r) == "n=1 kappa=2")
        .ok_or("no bound for the Poincaré oracle kappa")?;
    let expected = -std::f64::consts::PI.ln();
    ensure(passed(poincare) && (num(poincare, "lhs") - expected).abs() <= 1e-14, "bound differs from -log pi")?;
    ensure(formula.iter().all(|r| passed(r)), "sup lower bound formula mismatch")?;
    let chains = run.with_id("ma.integral-chain");
    ensure(chains.len() >= 2 && chains.iter().all(|r| passed(r)), "integral chain failed")?;
    let measured = run
        .with_id("ma.integral-inequality")
        .into_iter()
        .filter(|r| desc(r).starts_with("poincare-disc"))
        .count();
    ensure(measured > 0, "no measured C_eps on the Poincaré model")?;
    let lower = run.with_id("ma.sup-lower-bound");
    ensure(lower.iter().all(|r| passed(r)), "measured sup u below the bound")?;
    Ok(format!("{} chain records, {measured} Poincaré solves", chains.len()))
}

fn hyperbolicity(run: &Run) -> Check {
    let obstructed = run.with_id("hyperbolicity.expected-obstruction");
    for g in ["g=0", "g=1"] {
        let with_kappa = obstructed
            .iter()
            .filter(|r| desc(r).starts_with(g) && !desc(r).ends_with("kappa=0"))
            .collect::<Vec<_>>();
        ensure(!with_kappa.is_empty(), format!("no {g} curve with kappa > 0"))?;
        ensure(with_kappa.iter().all(|r| passed(r)), format!("{g} curve not obstructed"))?;
    }
    let example = run
        .with_id("hyperbolicity.surface-example")
        .into_iter()
        .find(|r| desc(r) == "g=2 a=4 b=5 d=4")
        .ok_or("no (2,4,5,4) example")?;
    ensure(passed(example), "(2,4,5,4) rejected")?;
    let rejections = run.with_id("hyperbolicity.surface-rejection");
    ensure(rejections.len() == 6 && rejections.iter().all(|r| passed(r)), "a single-constraint violation was accepted")?;
    let d4 = run
        .with_id("hyperbolicity.pluecker")
        .into_iter()
        .find(|r| desc(r) == "d=4")
        .ok_or("no d=4 record")?;
    ensure(num(d4, "lhs") == 3.0, "pluecker_genus(4) != 3")?;
    let t = run.seconds("hyperbolicity");
    ensure(t < 1.0, format!("hyperbolicity took {t:.2}s"))?;
    Ok(format!("obstructions, example and 6 rejections as expected, {t:.3}s"))
}

fn subharmonicity(run: &Run) -> Check {
    let main = run.with_id("hyperbolicity.subharmonicity");
    ensure(!main.is_empty(), "no subharmonicity records")?;
    for r in &main {
        // harmonic cases evaluate to zero up to rounding
        let floor = -num(r, "tolerance");
        ensure(passed(r) && num(r, "lhs") >= floor, format!("{}: laplacian {}", desc(r), num(r, "lhs")))?;
        let (lhs, rhs) = (num(r, "lhs"), num(r, "rhs"));
        let gap = (lhs - rhs) / rhs.abs().max(1.0);
        ensure(gap >= -1e-6, format!("{}: relative gap {gap:.3e}", desc(r)))?;
    }
    let strict = run.with_id("hyperbolicity.subharmonicity-strict");
    ensure(!strict.is_empty() && strict.iter().all(|r| passed(r) && num(r, "lhs") > 0.0), "not strictly positive")?;
    Ok(format!("{} disc maps, {} strict", main.len(), strict.len()))
}

fn end_to_end(run: &Run) -> Check {
    ensure(run.exit == Some(0), format!("exit status {:?}", run.exit))?;
    let total = run.timing["total_seconds"].as_f64().unwrap_or(f64::INFINITY);
    ensure(total < 900.0, format!("verify-all took {total:.0}s"))?;
    let mut ids = Vec::new();
    for r in &run.reports {
        all_ids(r, &mut ids);
    }
    ids.sort();
    ids.dedup();
    let missing: Vec<&String> = ids.iter().filter(|id| kahler_core::claims::lookup(id).is_none()).collect();
    ensure(missing.is_empty(), format!("unregistered ids: {missing:?}"))?;
    let failing = run.reports.iter().filter(|r| r["status"] == "fail").count();
    ensure(failing == 0, format!("{failing} failing records"))?;
    Ok(format!("exit 0 in {total:.1}s, {} claim ids registered", ids.len()))
}

#[test]
fn acceptance() {
    let run = verify_all();
    let criteria: [(&str, fn(&Run) -> Check); 12] = [
        ("sphere moments", sphere_moments),
        ("averaging identities", averaging_identities),
        ("royden", royden),
        ("laplacian equality", laplacian),
        ("estimate lemmas", lemmas),
        ("trace lemma", trace_lemma),
        ("ma solver", ma_solver),
        ("integral slope", slopes),
        ("integral chain", chain),
        ("hyperbolicity arithmetic", hyperbolicity),
        ("subharmonicity", subharmonicity),
        ("end to end", end_to_end),
    ];
    // written to the stderr handle directly so the lines survive output capture
    let mut err = std::io::stderr().lock();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let line = match check(&run) {
            Ok(msg) => format!("criterion {:>2} PASS {name}: {msg}", i + 1),
            Err(msg) => {
                failures += 1;
                format!("criterion {:>2} FAIL {name}: {msg}", i + 1)
            }
        };
        let _ = writeln!(err, "{line}");
    }
    assert_eq!(failures, 0, "{failures} acceptance criteria failed");
}
