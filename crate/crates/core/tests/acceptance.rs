//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Each criterion runs the bundled default suite, then re-checks the
//! reported values against tolerances pinned here, independently of the
//! suite's own verdict. Bounds are recomputed from the instance sizes
//! printed in each assertion.
//!
//! Run with `cargo test --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use hamgadget::cli::suites::{default_config, run_suite, Assertion, Report, SuiteContext};
use hamgadget::queryham::fixtures::named_machine;
use hamgadget::queryham::Validity;
use hamgadget::spectra::SolverConfig;
use serde_json::Value;

const NULLSPACE_ANGLE: f64 = 1e-7;
const GAP_SLACK: f64 = 1e-9;
const SEPARATION_SLACK: f64 = 1e-10;
const OVERLAP_SLACK: f64 = 1e-9;
const APX_SIM_SLACK: f64 = 1e-8;
const ACCEPTING_GAP: f64 = 1e-9;
const REJECTING_SLACK: f64 = 1e-9;
const MC_SIGMA: f64 = 3.0;

fn ctx() -> SuiteContext {
    SuiteContext { solver: SolverConfig::default(), seed: 0 }
}

fn run(suite: &str) -> (Report, Value, Duration) {
    let text = default_config(suite).expect("bundled config");
    let t = Instant::now();
    let report = run_suite(suite, text, &ctx()).expect("suite runs");
    let elapsed = t.elapsed();
    let config: Value = serde_json::from_str(text).unwrap();
    (report, config, elapsed)
}

/// Integer following `key=` in `detail`.
fn field(detail: &str, key: &str) -> Option<usize> {
    let pat = format!("{key}=");
    let start = detail.find(&pat)? + pat.len();
    let digits: String = detail[start..].chars().take_while(char::is_ascii_digit).collect();
    digits.parse().ok()
}

/// Collects violated conditions; an empty list is a pass.
#[derive(Default)]
struct Checks(Vec<String>);

impl Checks {
    fn require(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.0.push(msg());
        }
    }

    fn suite_passed(&mut self, r: &Report) {
        for a in r.failures() {
            self.0.push(format!("{} failed: measured {:.6e}, bound {:.6e}", a.id, a.measured, a.bound));
        }
    }

    fn within(&mut self, elapsed: Duration, budget_s: u64) {
        self.require(elapsed <= Duration::from_secs(budget_s), || format!("runtime {elapsed:?} over {budget_s} s"));
    }
}

fn assertions<'a>(r: &'a Report, suffix: &'a str) -> impl Iterator<Item = &'a Assertion> + 'a {
    r.assertions.iter().filter(move |a| a.id.ends_with(suffix))
}

fn report_line(n: u32, title: &str, elapsed: Duration, checks: &Checks) -> bool {
    let ok = checks.0.is_empty();
    println!("{} criterion {n}: {title} ({:.2} s)", if ok { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    for c in &checks.0 {
        println!("    {c}");
    }
    ok
}

fn criterion1() -> bool {
    let (r, cfg, t) = run("nullspace");
    let mut c = Checks::default();
    c.suite_passed(&r);
    let rand = &cfg["random"];
    c.require(rand["count"].as_u64().unwrap_or(0) >= 10, || "fewer than 10 circuits".into());
    c.require(rand["max_gates"].as_u64().unwrap_or(99) <= 6, || "circuits longer than 6 gates".into());
    c.require(rand["max_qubits"].as_u64().unwrap_or(99) <= 4, || "circuits wider than 4 qubits".into());
    c.require(cfg["angle_tol"].as_f64() == Some(NULLSPACE_ANGLE), || "angle tolerance is not 1e-7".into());
    let encs: BTreeSet<String> =
        r.assertions.iter().filter_map(|a| a.id.rsplit('/').next().map(String::from)).collect();
    c.require(encs.contains("abstract") && encs.contains("unary"), || format!("encodings covered: {encs:?}"));
    for a in &r.assertions {
        c.require(a.measured < NULLSPACE_ANGLE, || format!("{}: principal angle {:.3e}", a.id, a.measured));
        c.require(field(&a.detail, "L").is_some_and(|l| l <= 6), || format!("{}: {}", a.id, a.detail));
        c.require(field(&a.detail, "qubits").is_some_and(|q| q <= 4), || format!("{}: {}", a.id, a.detail));
    }
    c.within(t, 60);
    report_line(1, "history-state null space", t, &c)
}

fn criterion2() -> bool {
    let (r, _, t) = run("lemma1");
    let mut c = Checks::default();
    c.suite_passed(&r);
    let mut deltas = BTreeSet::new();
    for a in &r.assertions {
        let delta: f64 = a.id.rsplit("delta=").next().and_then(|s| s.parse().ok()).unwrap_or(f64::NAN);
        deltas.insert(delta.to_bits());
        let l = field(&a.detail, "L").unwrap_or(0) as f64;
        let bound = PI * PI * delta / (64.0 * l * l * l);
        c.require((a.bound - bound).abs() <= 1e-15 * bound.max(1.0), || {
            format!("{}: bound {} vs {bound}", a.id, a.bound)
        });
        c.require(a.measured >= bound - GAP_SLACK, || format!("{}: gap {:.6e} < {bound:.6e}", a.id, a.measured));
    }
    c.require(deltas == [1.0f64, 10.0].iter().map(|d| d.to_bits()).collect(), || "Δ sweep is not {1, 10}".into());
    c.within(t, 60);
    report_line(2, "clock gap lower bound", t, &c)
}

fn criterion3() -> bool {
    let t0 = Instant::now();
    let (r4, cfg4, _) = run("lemma4");
    let (r5, cfg5, _) = run("lemma5");
    let t = t0.elapsed();
    let mut c = Checks::default();
    c.suite_passed(&r4);
    c.suite_passed(&r5);

    let mut ms = BTreeSet::new();
    let (mut valid, mut invalid) = (false, false);
    for spec in cfg4["machines"].as_array().unwrap().iter().chain(cfg5["machines"].as_array().unwrap()) {
        let Some(name) = spec["fixture"].as_str() else { continue };
        let m = named_machine(name, cfg4["epsilon"].as_f64().unwrap()).unwrap();
        ms.insert(m.m());
        for (prefix, _) in m.nodes() {
            match m.validity(prefix) {
                Validity::Invalid => invalid = true,
                _ => valid = true,
            }
        }
        let width = m.register_sizes().into_iter().max().unwrap_or(0);
        c.require((1..=2).contains(&width), || format!("{name}: query Hamiltonian on {width} qubits"));
    }
    c.require(ms == BTreeSet::from([1, 2, 3]), || format!("m values covered: {ms:?}"));
    c.require(valid && invalid, || "machines do not mix valid and invalid queries".into());

    let encs = cfg4["encodings"].as_array().unwrap();
    c.require(encs.len() == 2, || "lemma4 does not run both encodings".into());
    for a in r4.assertions.iter().chain(assertions(&r5, "/separation")).chain(assertions(&r5, "/invalid-patterns")) {
        c.require(a.measured >= a.bound - SEPARATION_SLACK, || {
            format!("{}: {:.6e} < {:.6e}", a.id, a.measured, a.bound)
        });
    }
    c.require(assertions(&r5, "/invalid-patterns").count() > 0, || "no invalid unary patterns checked".into());
    c.within(t, 120);
    report_line(3, "query block separation", t, &c)
}

/// `1 − α²` where `α` is the positive root of `(J−2K)α² − 2Kα − δ`,
/// located by bisection.
fn overlap_bound(k: f64, j: f64, delta: f64) -> f64 {
    let q = |x: f64| (j - 2.0 * k) * x * x - 2.0 * k * x - delta;
    let (mut lo, mut hi) = (0.0, 1.0);
    while q(hi) < 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    1.0 - hi * hi
}

fn criterion4() -> bool {
    let (r, cfg, t) = run("corollary1");
    let mut c = Checks::default();
    c.suite_passed(&r);
    c.require(cfg["instances"].as_u64() == Some(50), || "instance count is not 50".into());
    for a in &r.assertions {
        c.require(a.measured >= a.bound - OVERLAP_SLACK, || format!("{}: {:.6e} < {:.6e}", a.id, a.measured, a.bound));
        let num = |key: &str| -> f64 {
            let s = a.detail.split(&format!("{key}=")).nth(1).unwrap_or("");
            s.split([' ', ';']).next().unwrap_or("").parse().unwrap_or(f64::NAN)
        };
        let (j, k) = (num("J"), num("K"));
        c.require(j > 2.0 * k, || format!("{}: J={j} ≤ 2K={}", a.id, 2.0 * k));
        let oracle = overlap_bound(k, j, num("δ"));
        // J, K and δ are printed to 4-5 significant digits.
        c.require((oracle - a.bound).abs() < 5e-3, || format!("{}: bound {} vs recomputed {oracle}", a.id, a.bound));
    }
    c.within(t, 30);
    report_line(4, "projection overlap bound", t, &c)
}

fn criterion5() -> bool {
    let (r, cfg, t) = run("theorem1");
    let mut c = Checks::default();
    c.suite_passed(&r);
    let steps = cfg["steps"].as_u64().unwrap() as f64;
    let (a_thr, b_thr) = (1.0 - 1.0 / (steps + 1.0), 1.0 - 1.0 / (2.0 * steps));
    let mut expected = 0;
    for case in cfg["machines"].as_array().unwrap() {
        let name = case["machine"]["fixture"].as_str().unwrap();
        let m = named_machine(name, cfg["epsilon"].as_f64().unwrap()).unwrap();
        c.require(m.m() == 1, || format!("{name} has m={}", m.m()));
        expected += 1;
    }
    let verdicts: Vec<_> = assertions(&r, "/verdict").collect();
    c.require(verdicts.len() == expected, || format!("{} verdicts for {expected} machines", verdicts.len()));
    for a in verdicts {
        let yes = a.detail.starts_with("expected YES");
        let thr = if yes { a_thr } else { b_thr };
        c.require((a.bound - thr).abs() < 1e-15, || format!("{}: threshold {} vs {thr}", a.id, a.bound));
        let ok = if yes { a.measured <= thr + APX_SIM_SLACK } else { a.measured >= thr - APX_SIM_SLACK };
        c.require(ok, || format!("{}: measured {:.10} against {thr}", a.id, a.measured));
    }
    let resolutions = assertions(&r, "").filter(|a| a.id.contains("/resolutions/")).count();
    c.require(resolutions > 0, || "no invalid-only machine checked under both resolutions".into());
    c.within(t, 300);
    report_line(5, "APX-SIM end to end", t, &c)
}

fn criterion6() -> bool {
    let (r, cfg, t) = run("apx2corr");
    let mut c = Checks::default();
    c.suite_passed(&r);
    let n = cfg["steps"].as_f64().unwrap() + 13.0;
    let yes_bound = (4.0 - 49.0 / n) / n;
    let no_bound = (1.0 - 1.0 / (4.0 * n)) / n;
    c.require(cfg["samples"].as_u64().unwrap_or(0) >= 100_000, || "fewer than 1e5 samples".into());
    for a in assertions(&r, "/ground-f").filter(|a| a.id.contains("/yes")) {
        c.require(a.measured >= yes_bound, || format!("{}: f={} < {yes_bound}", a.id, a.measured));
    }
    let no_checks: Vec<_> = assertions(&r, "/eigenstates-f").chain(assertions(&r, "/sampled-f")).collect();
    c.require(!no_checks.is_empty(), || "no NO-instance correlation checks".into());
    for a in no_checks {
        c.require(a.measured <= no_bound, || format!("{}: f={} > {no_bound}", a.id, a.measured));
    }
    c.require(assertions(&r, "/ground-f").any(|a| a.id.contains("/yes")), || "no YES fixture".into());
    c.within(t, 300);
    report_line(6, "two-point correlation bounds (NO side sampled)", t, &c)
}

fn criterion7() -> bool {
    let (r, cfg, t) = run("voting");
    let mut c = Checks::default();
    c.suite_passed(&r);
    c.require(cfg["trials"].as_u64() == Some(1_000_000), || "trial count is not 1e6".into());
    c.require(cfg["k_sigma"].as_f64() == Some(MC_SIGMA), || "Monte-Carlo band is not 3σ".into());
    for case in cfg["machines"].as_array().unwrap() {
        let name = case["machine"]["fixture"].as_str().unwrap();
        let m = named_machine(name, cfg["epsilon"].as_f64().unwrap()).unwrap();
        c.require(m.m() <= 3, || format!("{name} has m={}", m.m()));
    }
    for a in assertions(&r, "/delta-positive") {
        c.require(a.measured > 0.0, || format!("{}: Δ = {}", a.id, a.measured));
    }
    c.require(assertions(&r, "/delta-positive").any(|a| a.id.starts_with("voting/invalid/")), || {
        "no invalid-query machine".into()
    });
    c.require(assertions(&r, "/accept").count() > 0, || "no acceptance check".into());
    c.require(assertions(&r, "/strongly-incorrect-mass").count() > 0, || "no C-mass check".into());
    for a in assertions(&r, "/monte-carlo") {
        c.require(a.measured <= MC_SIGMA, || format!("{}: {:.2}σ", a.id, a.measured));
    }
    c.within(t, 120);
    report_line(7, "hierarchical voting", t, &c)
}

fn criterion8() -> bool {
    let (r, cfg, t) = run("spectralgap");
    let mut c = Checks::default();
    c.suite_passed(&r);
    let eps = cfg["epsilon"].as_f64().unwrap();
    let delta = cfg["delta"].as_f64().unwrap();
    for a in assertions(&r, "/accepting") {
        c.require(a.measured <= ACCEPTING_GAP, || format!("{}: gap {:.3e}", a.id, a.measured));
    }
    for a in assertions(&r, "/rejecting") {
        let label = a.id.split('/').nth(1).unwrap();
        let m = match named_machine(label, eps) {
            Ok(m) => m.m(),
            Err(_) => 1,
        };
        let bound = (eps - delta) / 4f64.powi(m as i32);
        c.require(a.measured >= bound - REJECTING_SLACK, || format!("{}: gap {:.6e} < {bound:.6e}", a.id, a.measured));
    }
    c.require(assertions(&r, "/accepting").count() > 0, || "no accepting machine".into());
    c.require(assertions(&r, "/rejecting").count() > 0, || "no rejecting machine".into());
    let planted = cfg["planted"].as_array().map_or(0, Vec::len);
    c.require(planted > 0 && assertions(&r, "/replacement-log").count() == planted, || {
        "planted machines lack a replacement-log check".into()
    });
    c.within(t, 300);
    report_line(8, "spectral-gap dichotomy", t, &c)
}

fn fixtures_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/suites")
}

fn criterion9() -> bool {
    let t0 = Instant::now();
    let mut c = Checks::default();
    for suite in hamgadget::cli::suites::SUITES {
        let path = fixtures_dir().join(format!("{suite}_corrupted.json"));
        let out = Command::new(env!("CARGO_BIN_EXE_hamgadget")).arg("verify").arg(suite).arg(&path).output().unwrap();
        let stderr = String::from_utf8_lossy(&out.stderr);
        c.require(out.status.code() == Some(1), || format!("{suite}: exit {:?}", out.status.code()));
        c.require(stderr.contains("FAIL "), || format!("{suite}: no FAIL line on stderr"));
    }
    let t = t0.elapsed();
    c.within(t, 60);
    report_line(9, "negative controls", t, &c)
}

#[test]
fn acceptance() {
    let results = [
        criterion1(),
        criterion2(),
        criterion3(),
        criterion4(),
        criterion5(),
        criterion6(),
        criterion7(),
        criterion8(),
        criterion9(),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, ok)| !**ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
