//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//!
//! Runs at the shipped defaults (10^5 trials per cell) with the default master seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use raqm::chain::{chain_analytics, chain_slopes};
use raqm::config::{ScenarioConfig, ScenarioId};
use raqm::harness::{self, RunOutput, Runner};
use raqm::node::MarkovParams;
use raqm::physics::{
    cavity_coupling, memory_efficiency, node_capacity, read_efficiency, scattering_prob, write_efficiency,
    AddressingParams, CavityParams, DetuningModel, EfficiencyCalib, MHZ, UM,
};
use raqm::qubit::{NamedPolarization, PolarizationQubit};
use raqm::tomography::{measure, proportion_estimate, Basis};

struct Report {
    failed: Vec<&'static str>,
}

impl Report {
    fn check(&mut self, name: &'static str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed.push(name);
        }
    }
}

fn run(runner: &Runner, scenario: ScenarioId) -> RunOutput {
    harness::run(&ScenarioConfig::new(scenario), runner).expect("scenario runs")
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or(f64::NAN)
}

fn table1(runner: &Runner, rep: &mut Report) -> RunOutput {
    let out = run(runner, ScenarioId::Table1);
    let r = &out.summary["results"];
    let rows = r["rows"].as_array().unwrap();
    let mut ok = rows.len() == 16 && out.table.rows.len() == 16;
    let (mut circ, mut lin) = ((1.0f64, 0.0f64), (1.0f64, 0.0f64));
    for row in rows {
        let fid = f(&row["fidelity"]);
        let target = NamedPolarization::parse(row["target"].as_str().unwrap()).unwrap();
        let (lo, hi, range) = if target.is_circular() { (0.96, 0.985, &mut circ) } else { (0.92, 0.96, &mut lin) };
        ok &= (lo..=hi).contains(&fid);
        range.0 = range.0.min(fid);
        range.1 = range.1.max(fid);
    }
    let zs: Vec<f64> = r["input_consistency"].as_array().unwrap().iter().map(|c| f(&c["z"]).abs()).collect();
    let zmax = zs.iter().cloned().fold(0.0, f64::max);
    ok &= zs.len() == 8 && zmax < 3.0;
    rep.check(
        "table1",
        ok,
        format!(
            "circular [{:.4}, {:.4}] in [0.96, 0.985], linear [{:.4}, {:.4}] in [0.92, 0.96], max |identical - orthogonal| = {zmax:.2} SE < 3",
            circ.0, circ.1, lin.0, lin.1
        ),
    );
    out
}

fn coherence(runner: &Runner, rep: &mut Report) {
    let out = run(runner, ScenarioId::Coherence);
    let fits = out.summary["results"]["fits"].as_array().unwrap();
    let mut ok = true;
    let mut detail = Vec::new();
    for fit in fits {
        if fit["kind"] == "gaussian" {
            let tau = f(&fit["tau_ms"]);
            ok &= (0.7..=1.2).contains(&tau);
            detail.push(format!("{} tau = {tau:.3} ms in [0.7, 1.2]", fit["input"].as_str().unwrap()));
        } else {
            let (s, se) = (f(&fit["slope_per_ms"]), f(&fit["slope_se_per_ms"]));
            ok &= s.abs() < 3.0 * se;
            detail.push(format!("{} slope = {s:.4} +- {se:.4} /ms (|z| < 3)", fit["input"].as_str().unwrap()));
        }
    }
    ok &= detail.len() == 2;
    rep.check("coherence", ok, detail.join(", "));
}

fn reuse(runner: &Runner, rep: &mut Report) {
    let pure = chain_slopes(&chain_analytics(10, &MarkovParams::default(), NamedPolarization::R).unwrap()).unwrap();
    let mut ok = (pure.efficiency_pp - -0.29).abs() <= 0.10 && (pure.fidelity_pp - -0.44).abs() <= 0.10;
    let out = run(runner, ScenarioId::Reuse);
    let points = out.summary["results"]["points"].as_array().unwrap();
    let zmax = points
        .iter()
        .flat_map(|p| [f(&p["efficiency_z"]).abs(), f(&p["fidelity_z"]).abs()])
        .fold(0.0, f64::max);
    ok &= points.len() == 10 && zmax < 3.0;
    rep.check(
        "reuse",
        ok,
        format!(
            "chain slopes {:.3} pp (eff, -0.29 +- 0.10) / {:.3} pp (fid, -0.44 +- 0.10); Monte-Carlo vs chain max |z| = {zmax:.2} < 3 over 10 trial indices",
            pure.efficiency_pp, pure.fidelity_pp
        ),
    );
}

fn detuning(runner: &Runner, rep: &mut Report) {
    let anchor = scattering_prob(-100.0 * MHZ, &DetuningModel::default()).unwrap();
    let mut ok = (anchor - 0.0015).abs() < 1e-15;
    let out = run(runner, ScenarioId::DetuningSweep);
    let r = &out.summary["results"];
    let slope = f(&r["scattering_loglog_slope"]);
    ok &= (slope + 2.0).abs() < 1e-6;
    let mut worst = 0.0f64;
    for p in r["points"].as_array().unwrap() {
        if f(&p["detuning_mhz"]).abs() >= 100.0 {
            worst = worst.max(f(&p["infidelity_contribution_pp"]));
        }
    }
    ok &= worst < 0.2;
    rep.check(
        "detuning",
        ok,
        format!("p_sc(-100 MHz) = {anchor}, log-log slope {slope:.9}, max contribution at |D| >= 100 MHz = {worst:.3} pp < 0.2"),
    );
}

fn distance(runner: &Runner, rep: &mut Report) {
    let out = run(runner, ScenarioId::DistanceSweep);
    let t = &out.table;
    let a_fid = |d: f64| {
        (0..t.rows.len())
            .find(|&i| t.number(i, "value") == Some(d) && t.rows[i][t.column("atom").unwrap()] == "A")
            .and_then(|i| t.number(i, "fidelity"))
            .unwrap_or(f64::NAN)
    };
    let far: Vec<f64> = [6.0, 8.0, 10.0].iter().map(|&d| a_fid(d)).collect();
    let (f2, f25, f3) = (a_fid(2.0), a_fid(2.5), a_fid(3.0));
    let ok = far.iter().all(|&x| x >= 0.96) && f2 < f25 && f25 < f3 && f2 <= 0.85;
    rep.check(
        "distance",
        ok,
        format!(
            "atom A fidelity at 6/8/10 um = {:.4}/{:.4}/{:.4} (>= 0.96); 2/2.5/3 um = {f2:.4}/{f25:.4}/{f3:.4} (rising, 2 um <= 0.85)",
            far[0], far[1], far[2]
        ),
    );
}

fn efficiency(table1: &RunOutput, rep: &mut Report) {
    let c = CavityParams::default();
    let p = AddressingParams::default();
    let calib = EfficiencyCalib::default_for(&c, &p);
    // midpoint rule over |x| uniform on half the acceptance range
    let (lo, hi) = (3.0 * UM, 10.0 * UM);
    let n = 20_000;
    let mean = (0..n)
        .map(|i| {
            let x = lo + (hi - lo) * (i as f64 + 0.5) / n as f64;
            memory_efficiency(cavity_coupling(x, &c), &c, &calib).unwrap()
        })
        .sum::<f64>()
        / n as f64;
    let write = write_efficiency(c.g0, &c, &calib).unwrap();
    let read = read_efficiency(c.g0, &c, &calib).unwrap();
    let rows = table1.summary["results"]["rows"].as_array().unwrap();
    let mc = rows.iter().map(|r| f(&r["efficiency"])).sum::<f64>() / rows.len() as f64;
    let ok = (mean - 0.26).abs() <= 0.03 && (mc - 0.26).abs() <= 0.03 && (write - 0.38).abs() < 1e-12 && read > 0.60;
    rep.check(
        "efficiency-calibration",
        ok,
        format!("acceptance mean {mean:.4} (Monte-Carlo {mc:.4}), 0.26 +- 0.03; center write {write:.4}; read {read:.4} > 0.60"),
    );
}

fn capacity(rep: &mut Report) {
    let c = CavityParams::default();
    let p = AddressingParams::default();
    let n = node_capacity(0.20, &c, &p, &EfficiencyCalib::default_for(&c, &p)).unwrap();
    rep.check("capacity", n.abs_diff(5) <= 1, format!("node_capacity(0.20) = {n} (5 +- 1)"));
}

fn retry(runner: &Runner, rep: &mut Report) {
    let out = run(runner, ScenarioId::Retry);
    let u = f(&out.summary["results"]["uplift_pp"]);
    rep.check("retry-uplift", (u - 0.6).abs() <= 0.3, format!("uplift {u:.3} pp (0.6 +- 0.3)"));
}

fn random_state(rng: &mut ChaCha8Rng) -> PolarizationQubit {
    let v: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let r: f64 = rng.random::<f64>().cbrt();
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt().max(1e-12);
    PolarizationQubit::from_bloch(v.map(|c| r * c / n)).unwrap()
}

fn channel_invariants() -> (usize, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let mut bad = 0;
    let n = 10_000;
    for _ in 0..n {
        let q = random_state(&mut rng);
        let (p1, p2, a): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
        let (t1, t2) = (rng.random_range(0.0..1e-3), rng.random_range(0.0..1e-3));
        let w = 2.0 * std::f64::consts::PI * 30e3;
        let out = q.depolarize(p1).unwrap().dephase_amplitude(a).unwrap().apply_larmor(t1, w).unwrap();
        let ok_state = out.validate().is_ok() && (out.trace() - 1.0).abs() < 1e-12 && out.eigenvalues().iter().all(|e| *e >= -1e-12);
        let twice = q.depolarize(p1).unwrap().depolarize(p2).unwrap();
        let once = q.depolarize(1.0 - (1.0 - p1) * (1.0 - p2)).unwrap();
        let lar = q.apply_larmor(t1, w).unwrap().apply_larmor(t2, w).unwrap();
        let lar_once = q.apply_larmor(t1 + t2, w).unwrap();
        if !(ok_state && twice.trace_distance(&once) < 1e-12 && lar.trace_distance(&lar_once) < 1e-9) {
            bad += 1;
        }
    }
    (bad, n)
}

fn coverage(fid: f64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64((fid * 1000.0) as u64);
    let truth = PolarizationQubit::from_bloch([0.0, 0.0, 2.0 * fid - 1.0]).unwrap();
    let reps = 2000;
    let hits = (0..reps)
        .filter(|_| {
            let (k, m) = measure(&truth, Basis::RL, 1000, &mut rng);
            let e = proportion_estimate(k, k + m).unwrap();
            e.ci95.0 <= fid && fid <= e.ci95.1
        })
        .count();
    hits as f64 / reps as f64
}

fn determinism() -> bool {
    let mut cfg = ScenarioConfig::new(ScenarioId::Table1);
    cfg.run.trials = 10_000;
    let a = harness::run(&cfg, &Runner::new(1).unwrap()).unwrap();
    let b = harness::run(&cfg, &Runner::new(3).unwrap()).unwrap();
    a.table.to_csv() == b.table.to_csv() && harness::pretty(&a.summary) == harness::pretty(&b.summary)
}

fn properties(rep: &mut Report) {
    let (bad, n) = channel_invariants();
    let cov: Vec<f64> = [0.5, 0.9, 0.97].iter().map(|&x| coverage(x)).collect();
    let det = determinism();
    let ok = bad == 0 && cov.iter().all(|c| (0.93..=0.97).contains(c)) && det;
    rep.check(
        "property-suites",
        ok,
        format!(
            "channel invariants {}/{n} states ok; 95% CI coverage {:.3}/{:.3}/{:.3} at F = 0.5/0.9/0.97 (0.93-0.97); byte-identical across 1 and 3 workers: {det}",
            n - bad,
            cov[0],
            cov[1],
            cov[2]
        ),
    );
}

fn main() {
    let runner = Runner::new(0).expect("thread pool");
    let mut rep = Report { failed: Vec::new() };
    let t1 = table1(&runner, &mut rep);
    coherence(&runner, &mut rep);
    reuse(&runner, &mut rep);
    detuning(&runner, &mut rep);
    distance(&runner, &mut rep);
    efficiency(&t1, &mut rep);
    capacity(&mut rep);
    retry(&runner, &mut rep);
    properties(&mut rep);
    if rep.failed.is_empty() {
        println!("acceptance: all criteria pass");
    } else {
        println!("acceptance: {} failing: {}", rep.failed.len(), rep.failed.join(", "));
        std::process::exit(1);
    }
}
