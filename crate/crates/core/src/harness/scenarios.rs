use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};

use super::engine::{read_slots, simulate_cell, CellSpec, CellStats, Runner, Spacing};
use super::report::{estimate, fmt6, tomography_cells, Table, TOMOGRAPHY_COLUMNS};
use crate::chain::{chain_analytics, chain_slopes, extended_initial, ReuseChain};
use crate::config::{parse_input_pair, ScenarioConfig};
use crate::error::{Error, Result};
use crate::fit::{fit_gaussian_decay, fit_line};
use crate::node::NodeModel;
use crate::physics::{
    coherence_vs_acceptance, efficient_half_width, fit_envelope_time, node_capacity, scattering_prob, Ellipticity, MHZ, UM,
};
use crate::protocol::{make_pattern_with, AccessEvent, EventKind, Pattern, RetryPolicy};
use crate::qubit::NamedPolarization;
use crate::rng::cell_seed;

pub(super) type Out = (Table, Value, Option<String>);

#[derive(Debug, Clone, Serialize)]
struct RowSummary {
    pattern: String,
    atom: String,
    input_pol: String,
    target: String,
    storage_us: f64,
    trials: u64,
    emitted: u64,
    efficiency: f64,
    fidelity: Option<f64>,
    fidelity_se: Option<f64>,
    model_fidelity: f64,
    model_fidelity_se: f64,
}

struct Cell<'a> {
    scenario: &'a str,
    pattern: String,
    input_pol: String,
    timeline: Vec<AccessEvent>,
    spacing: Spacing,
    retry: RetryPolicy,
    seed: u64,
    trials: u64,
}

fn acceptance_spacing(model: &NodeModel) -> Spacing {
    let (lo, hi) = model.addressing.acceptance_distance_range;
    Spacing::Uniform(lo, hi)
}

fn wants_trace(cfg: &ScenarioConfig, trials: u64) -> bool {
    cfg.run.trace || trials == 1
}

fn pair_inputs(label: &str) -> Result<BTreeMap<String, NamedPolarization>> {
    let (a, b) = parse_input_pair(label).ok_or_else(|| Error::Config(format!("bad input pair `{label}`")))?;
    Ok(BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)]))
}

fn pattern(s: &str) -> Result<Pattern> {
    Pattern::parse(s).ok_or_else(|| Error::Config(format!("unknown pattern `{s}`")))
}

/// Simulates one cell and appends one row per read slot.
fn run_cell(
    cfg: &ScenarioConfig,
    runner: &Runner,
    model: &NodeModel,
    cell: &Cell<'_>,
    table: &mut Table,
    rows: &mut Vec<RowSummary>,
    trace: &mut Option<String>,
) -> Result<CellStats> {
    let spec = CellSpec {
        model,
        timeline: &cell.timeline,
        spacing: cell.spacing,
        retry: cell.retry,
        seed: cell.seed,
        trials: cell.trials,
    };
    let (stats, log) = simulate_cell(runner, &spec, wants_trace(cfg, cell.trials))?;
    if let Some(log) = log {
        let t = trace.get_or_insert_with(String::new);
        t.push_str(&format!("# cell {} {} {} seed={}\n", cell.scenario, cell.pattern, cell.input_pol, cell.seed));
        t.push_str(&log);
    }
    for (slot, s) in read_slots(&cell.timeline).iter().zip(&stats.slots) {
        let est = estimate(&s.counts, slot.target, cfg.run.estimator);
        let storage_us = slot.storage * 1e6;
        let mut row = vec![
            cell.scenario.to_string(),
            cell.pattern.clone(),
            slot.atom.clone(),
            cell.input_pol.clone(),
            format!("{storage_us:.3}"),
        ];
        row.extend(tomography_cells(stats.trials, s.emitted, est, cell.seed));
        table.push(row);
        rows.push(RowSummary {
            pattern: cell.pattern.clone(),
            atom: slot.atom.clone(),
            input_pol: cell.input_pol.clone(),
            target: slot.target.to_string(),
            storage_us,
            trials: stats.trials,
            emitted: s.emitted,
            efficiency: s.emitted as f64 / stats.trials.max(1) as f64,
            fidelity: est.map(|e| e.value),
            fidelity_se: est.map(|e| (e.value * (1.0 - e.value) / e.n_effective as f64).sqrt()),
            model_fidelity: s.model_fidelity(),
            model_fidelity_se: s.model_fidelity_se(),
        });
    }
    Ok(stats)
}

struct Grid {
    table: Table,
    rows: Vec<RowSummary>,
    trace: Option<String>,
    attempts: u64,
    accepted: u64,
    trials: u64,
}

/// Every pattern x input-pair cell of the access table.
fn pattern_grid(cfg: &ScenarioConfig, runner: &Runner, model: &NodeModel, scenario: &str, trials: u64, retry: RetryPolicy) -> Result<Grid> {
    let rules = cfg.node.timing();
    let timing = cfg.node.pattern_timing();
    let mut g = Grid { table: Table::new(&TOMOGRAPHY_COLUMNS), rows: Vec::new(), trace: None, attempts: 0, accepted: 0, trials: 0 };
    let mut index = 0;
    for p in &cfg.scenario.patterns {
        let pat = pattern(p)?;
        for inp in &cfg.scenario.inputs {
            let cell = Cell {
                scenario,
                pattern: pat.to_string(),
                input_pol: inp.clone(),
                timeline: make_pattern_with(pat, &pair_inputs(inp)?, &rules, &timing)?,
                spacing: acceptance_spacing(model),
                retry,
                seed: cell_seed(cfg.run.seed, index),
                trials,
            };
            let s = run_cell(cfg, runner, model, &cell, &mut g.table, &mut g.rows, &mut g.trace)?;
            g.attempts += s.attempts;
            g.accepted += s.accepted;
            g.trials += s.trials;
            index += 1;
        }
    }
    Ok(g)
}

/// Identical-versus-orthogonal input comparisons (R/R vs R/L, H/H vs H/V) per pattern and atom.
fn input_consistency(rows: &[RowSummary]) -> Vec<Value> {
    let find = |p: &str, a: &str, i: &str| rows.iter().find(|r| r.pattern == p && r.atom == a && r.input_pol == i);
    let mut out = Vec::new();
    for r in rows {
        for (same, orth) in [("R/R", "R/L"), ("H/H", "H/V")] {
            if r.input_pol != same {
                continue;
            }
            let Some(o) = find(&r.pattern, &r.atom, orth) else { continue };
            let (Some(f1), Some(s1), Some(f2), Some(s2)) = (r.fidelity, r.fidelity_se, o.fidelity, o.fidelity_se) else {
                continue;
            };
            let se = (s1 * s1 + s2 * s2).sqrt();
            let diff = f1 - f2;
            out.push(json!({
                "pattern": r.pattern, "atom": r.atom, "identical": same, "orthogonal": orth,
                "difference": diff, "se": se, "z": if se > 0.0 { diff / se } else { 0.0 },
            }));
        }
    }
    out
}

fn family_ranges(rows: &[RowSummary]) -> Value {
    let mut v = serde_json::Map::new();
    for (name, circ) in [("circular", true), ("linear", false)] {
        let sel: Vec<&RowSummary> = rows
            .iter()
            .filter(|r| NamedPolarization::parse(&r.target).map(|p| p.is_circular()) == Some(circ))
            .collect();
        let fids: Vec<f64> = sel.iter().filter_map(|r| r.fidelity).collect();
        let effs: Vec<f64> = sel.iter().map(|r| r.efficiency).collect();
        let range = |x: &[f64]| json!([x.iter().cloned().fold(f64::INFINITY, f64::min), x.iter().cloned().fold(f64::NEG_INFINITY, f64::max)]);
        if !sel.is_empty() {
            v.insert(name.into(), json!({ "fidelity": range(&fids), "efficiency": range(&effs) }));
        }
    }
    Value::Object(v)
}

pub(super) fn table1(cfg: &ScenarioConfig, runner: &Runner) -> Result<Out> {
    let model = cfg.node.model()?;
    let g = pattern_grid(cfg, runner, &model, "table1", cfg.run.trials, RetryPolicy::None)?;
    let results = json!({
        "rows": g.rows,
        "ranges": family_ranges(&g.rows),
        "input_consistency": input_consistency(&g.rows),
    });
    Ok((g.table, results, g.trace))
}

fn mean_model_fidelity(rows: &[RowSummary]) -> f64 {
    rows.iter().map(|r| r.model_fidelity).sum::<f64>() / rows.len().max(1) as f64
}

fn mean_measured_fidelity(rows: &[RowSummary]) -> f64 {
    let f: Vec<f64> = rows.iter().filter_map(|r| r.fidelity).collect();
    f.iter().sum::<f64>() / f.len().max(1) as f64
}

pub(super) fn retry(cfg: &ScenarioConfig, runner: &Runner) -> Result<Out> {
    let model = cfg.node.model()?;
    let n = cfg.scenario.retry_trials;
    let plain = pattern_grid(cfg, runner, &model, "retry-none", n, RetryPolicy::None)?;
    let policy = RetryPolicy::UntilBothEmit { max_attempts: cfg.scenario.retry_max_attempts };
    let retried = pattern_grid(cfg, runner, &model, "retry-until-both-emit", n, policy)?;
    let (f0, f1) = (mean_model_fidelity(&plain.rows), mean_model_fidelity(&retried.rows));
    let (m0, m1) = (mean_measured_fidelity(&plain.rows), mean_measured_fidelity(&retried.rows));
    let mut table = plain.table;
    table.append(retried.table)?;
    let trace = match (plain.trace, retried.trace) {
        (Some(a), Some(b)) => Some(a + &b),
        (a, b) => a.or(b),
    };
    let results = json!({
        "mean_model_fidelity_none": f0,
        "mean_model_fidelity_retry": f1,
        "uplift_pp": 100.0 * (f1 - f0),
        "mean_measured_fidelity_none": m0,
        "mean_measured_fidelity_retry": m1,
        "measured_uplift_pp": 100.0 * (m1 - m0),
        "mean_attempts": retried.attempts as f64 / retried.trials.max(1) as f64,
        "accepted_fraction": retried.accepted as f64 / retried.trials.max(1) as f64,
        "rows_none": plain.rows,
        "rows_retry": retried.rows,
    });
    Ok((table, results, trace))
}

pub(super) fn coherence(cfg: &ScenarioConfig, runner: &Runner) -> Result<Out> {
    let model = cfg.node.model()?;
    let rules = cfg.node.timing();
    let mut table = Table::new(&TOMOGRAPHY_COLUMNS);
    let mut rows = Vec::new();
    let mut trace = None;
    let mut fits = Vec::new();
    let n_t = cfg.scenario.storage_us.len() as u64;
    for (i, name) in cfg.scenario.coherence_inputs.iter().enumerate() {
        let pol = NamedPolarization::parse(name).ok_or_else(|| Error::Config(format!("unknown polarization `{name}`")))?;
        let first = rows.len();
        for (j, &t_us) in cfg.scenario.storage_us.iter().enumerate() {
            // the read cannot start before the write pulse has ended
            let t = (t_us * 1e-6).max(rules.write_duration);
            let cell = Cell {
                scenario: "coherence",
                pattern: "AW-AR".into(),
                input_pol: pol.to_string(),
                timeline: vec![
                    AccessEvent { time: 0.0, kind: EventKind::Write(pol), target: "A".into() },
                    AccessEvent { time: t, kind: EventKind::Read, target: "A".into() },
                ],
                spacing: acceptance_spacing(&model),
                retry: RetryPolicy::None,
                seed: cell_seed(cfg.run.seed, i as u64 * n_t + j as u64),
                trials: cfg.run.trials,
            };
            run_cell(cfg, runner, &model, &cell, &mut table, &mut rows, &mut trace)?;
        }
        // fits use the values as written to the results file
        let idx: Vec<usize> = (first..rows.len()).collect();
        let t_ms: Vec<f64> = idx.iter().map(|&r| table.number(r, "storage_us").unwrap_or(f64::NAN) * 1e-3).collect();
        let f: Vec<f64> = idx.iter().map(|&r| table.number(r, "fidelity").unwrap_or(f64::NAN)).collect();
        let sig: Vec<f64> = idx
            .iter()
            .map(|&r| {
                let (lo, hi) = (table.number(r, "ci68_lo").unwrap_or(0.0), table.number(r, "ci68_hi").unwrap_or(1.0));
                (0.5 * (hi - lo)).max(1e-6)
            })
            .collect();
        let model_f: Vec<f64> = idx.iter().map(|&r| rows[r].model_fidelity).collect();
        let ok: Vec<usize> = (0..f.len()).filter(|&k| f[k].is_finite()).collect();
        let pick = |v: &[f64]| ok.iter().map(|&k| v[k]).collect::<Vec<f64>>();
        let (t_ok, f_ok, s_ok) = (pick(&t_ms), pick(&f), pick(&sig));
        if pol.is_circular() {
            let fit = fit_line(&t_ok, &f_ok, Some(&s_ok));
            fits.push(json!({
                "input": pol.to_string(),
                "kind": "linear",
                "slope_per_ms": fit.map(|l| l.slope),
                "slope_se_per_ms": fit.map(|l| l.slope_se),
                "intercept": fit.map(|l| l.intercept),
            }));
        } else {
            let fit = fit_gaussian_decay(&t_ok, &f_ok, 0.5, None);
            let model_fit = fit_gaussian_decay(&t_ms, &model_f, 0.5, None);
            fits.push(json!({
                "input": pol.to_string(),
                "kind": "gaussian",
                "offset": 0.5,
                "amplitude": fit.map(|g| g.amplitude),
                "tau_ms": fit.map(|g| g.tau),
                "model_tau_ms": model_fit.map(|g| g.tau),
            }));
        }
    }
    let envelope_ms = fit_envelope_time(&model.addressing.acceptance_positions(), &model.dephasing)? * 1e3;
    let results = json!({ "fits": fits, "envelope_tau_ms": envelope_ms, "rows": rows });
    Ok((table, results, trace))
}

pub const REUSE_COLUMNS: [&str; 16] = [
    "scenario", "trial_index", "trials", "emitted", "efficiency", "efficiency_se", "fidelity", "ci68_lo", "ci68_hi",
    "ci95_lo", "ci95_hi", "model_fidelity", "model_fidelity_se", "chain_efficiency", "chain_fidelity", "seed",
];

pub(super) fn reuse(cfg: &ScenarioConfig, runner: &Runner) -> Result<Out> {
    let model = cfg.node.model()?;
    let k = cfg.scenario.reuse_cycles;
    if k == 0 {
        return Err(Error::Config("scenario.reuse_cycles must be at least 1".into()));
    }
    let inputs = pair_inputs(&cfg.scenario.reuse_inputs)?;
    let b_input = inputs["B"];
    let timeline = make_pattern_with(Pattern::Extended(k), &inputs, &cfg.node.timing(), &cfg.node.pattern_timing())?;
    let seed = cell_seed(cfg.run.seed, 0);
    let spec = CellSpec {
        model: &model,
        timeline: &timeline,
        spacing: acceptance_spacing(&model),
        retry: RetryPolicy::None,
        seed,
        trials: cfg.run.trials,
    };
    let (stats, trace) = simulate_cell(runner, &spec, wants_trace(cfg, cfg.run.trials))?;
    let chain = ReuseChain::for_model(&model, b_input, &model.addressing.acceptance_positions(), |kk| extended_initial(&model, kk))?
        .run(k)?;
    let slots = read_slots(&timeline);
    let mut table = Table::new(&REUSE_COLUMNS);
    let mut points = Vec::new();
    let n = stats.trials as f64;
    let mut b_index = 0;
    let mut a_result = Value::Null;
    for (slot, s) in slots.iter().zip(&stats.slots) {
        let est = estimate(&s.counts, slot.target, cfg.run.estimator);
        let eff = s.emitted as f64 / n.max(1.0);
        if slot.atom != "B" {
            a_result = json!({
                "storage_us": slot.storage * 1e6,
                "efficiency": eff,
                "fidelity": est.map(|e| e.value),
                "model_fidelity": s.model_fidelity(),
                "model_fidelity_se": s.model_fidelity_se(),
            });
            continue;
        }
        let c = &chain[b_index];
        b_index += 1;
        let eff_se = (eff * (1.0 - eff) / n.max(1.0)).sqrt();
        let cells = tomography_cells(stats.trials, s.emitted, est, seed);
        let mut row = vec!["reuse".to_string(), b_index.to_string()];
        row.extend(cells[..2].iter().cloned());
        row.push(cells[2].clone());
        row.push(fmt6(eff_se));
        row.extend(cells[3..8].iter().cloned());
        row.push(fmt6(s.model_fidelity()));
        row.push(fmt6(s.model_fidelity_se()));
        row.push(fmt6(c.efficiency));
        row.push(fmt6(c.fidelity));
        row.push(seed.to_string());
        table.push(row);
        points.push(json!({
            "trial_index": b_index,
            "efficiency": eff,
            "efficiency_se": eff_se,
            "model_fidelity": s.model_fidelity(),
            "model_fidelity_se": s.model_fidelity_se(),
            "chain_efficiency": c.efficiency,
            "chain_fidelity": c.fidelity,
            "efficiency_z": if eff_se > 0.0 { (eff - c.efficiency) / eff_se } else { 0.0 },
            "fidelity_z": if s.model_fidelity_se() > 0.0 { (s.model_fidelity() - c.fidelity) / s.model_fidelity_se() } else { 0.0 },
        }));
    }
    let x: Vec<f64> = (1..=b_index).map(|i| i as f64).collect();
    let col = |name: &str| (0..table.rows.len()).map(|r| 100.0 * table.number(r, name).unwrap_or(f64::NAN)).collect::<Vec<f64>>();
    let slope = |y: Vec<f64>| fit_line(&x, &y, None).map(|l| json!({ "slope_pp": l.slope, "slope_se_pp": l.slope_se }));
    let pure = chain_slopes(&chain_analytics(k, &model.markov, b_input)?);
    let results = json!({
        "cycles": k,
        "inputs": cfg.scenario.reuse_inputs,
        "points": points,
        "efficiency_slope": slope(col("efficiency")),
        "fidelity_slope": slope(col("fidelity")),
        "model_fidelity_slope": slope(col("model_fidelity")),
        "chain_slopes": chain_slopes(&chain),
        "pure_chain_slopes": pure,
        "atom_a": a_result,
    });
    Ok((table, results, trace))
}

fn sweep_columns() -> Vec<&'static str> {
    let mut c = vec!["parameter", "value"];
    c.extend(TOMOGRAPHY_COLUMNS);
    c
}

/// One standard-pattern cell per sweep point, all points sharing the cell seed.
fn point_cell<'a>(cfg: &ScenarioConfig, scenario: &'a str, spacing: Spacing) -> Result<Cell<'a>> {
    let pat = cfg.scenario.patterns.first().map(|p| pattern(p)).transpose()?.unwrap_or(Pattern::AWBWARBR);
    let inp = "R/L".to_string();
    Ok(Cell {
        scenario,
        pattern: pat.to_string(),
        timeline: make_pattern_with(pat, &pair_inputs(&inp)?, &cfg.node.timing(), &cfg.node.pattern_timing())?,
        input_pol: inp,
        spacing,
        retry: RetryPolicy::None,
        seed: cell_seed(cfg.run.seed, 0),
        trials: cfg.run.trials,
    })
}

pub(super) fn detuning_sweep(cfg: &ScenarioConfig, runner: &Runner) -> Result<Out> {
    let base = cfg.node.model()?;
    let mut table = Table::new(&sweep_columns());
    let mut trace = None;
    let mut reference_rows = Vec::new();
    let mut tmp = Table::new(&TOMOGRAPHY_COLUMNS);
    let cell = point_cell(cfg, "detuning-sweep", acceptance_spacing(&base))?;
    let reference = base.with_detuning(cfg.scenario.reference_detuning_mhz * MHZ)?;
    run_cell(cfg, runner, &reference, &cell, &mut tmp, &mut reference_rows, &mut None)?;
    let f_ref = mean_model_fidelity(&reference_rows);
    let mut points = Vec::new();
    let (mut lx, mut lp) = (Vec::new(), Vec::new());
    for &d in &cfg.scenario.detunings_mhz {
        let model = base.with_detuning(d * MHZ)?;
        let mut t = Table::new(&TOMOGRAPHY_COLUMNS);
        let mut rows = Vec::new();
        run_cell(cfg, runner, &model, &cell, &mut t, &mut rows, &mut trace)?;
        table.append(t.prefixed(&["parameter", "value"], &["detuning_mhz".into(), format!("{d}")]))?;
        let p = scattering_prob(d * MHZ, &base.detuning_model)?;
        lx.push(d.abs().ln());
        lp.push(p.ln());
        let f = mean_model_fidelity(&rows);
        points.push(json!({
            "detuning_mhz": d,
            "scattering_prob": p,
            "mean_model_fidelity": f,
            "infidelity_contribution_pp": 100.0 * (f_ref - f),
            "rows": rows,
        }));
    }
    let results = json!({
        "reference_detuning_mhz": cfg.scenario.reference_detuning_mhz,
        "reference_mean_model_fidelity": f_ref,
        "scattering_loglog_slope": fit_line(&lx, &lp, None).map(|l| l.slope),
        "points": points,
    });
    Ok((table, results, trace))
}

pub(super) fn distance_sweep(cfg: &ScenarioConfig, runner: &Runner) -> Result<Out> {
    let model = cfg.node.model()?;
    let mut table = Table::new(&sweep_columns());
    let mut trace = None;
    let mut points = Vec::new();
    for &d in &cfg.scenario.distances_um {
        if !(d > 0.0) {
            return Err(Error::Config(format!("distance {d} um must be positive")));
        }
        let cell = point_cell(cfg, "distance-sweep", Spacing::Fixed(d * UM))?;
        let mut t = Table::new(&TOMOGRAPHY_COLUMNS);
        let mut rows = Vec::new();
        run_cell(cfg, runner, &model, &cell, &mut t, &mut rows, &mut trace)?;
        table.append(t.prefixed(&["parameter", "value"], &["distance_um".into(), format!("{d}")]))?;
        points.push(json!({ "distance_um": d, "rows": rows }));
    }
    Ok((table, json!({ "points": points }), trace))
}

pub(super) fn acceptance_sweep(cfg: &ScenarioConfig) -> Result<Out> {
    let model = cfg.node.model()?;
    let mut table = Table::new(&["range_width_um", "coherence_small_ms", "coherence_large_ms", "ratio"]);
    let mut points = Vec::new();
    let mut small = model.dephasing;
    small.ellipticity = Ellipticity::Small;
    let mut large = model.dephasing;
    large.ellipticity = Ellipticity::Large;
    let dmin = model.addressing.min_distance;
    for &w in &cfg.scenario.acceptance_widths_um {
        let s = coherence_vs_acceptance(w * UM, dmin, &small)? * 1e3;
        let l = coherence_vs_acceptance(w * UM, dmin, &large)? * 1e3;
        table.push(vec![format!("{w}"), fmt6(s), fmt6(l), fmt6(s / l)]);
        points.push(json!({ "range_width_um": w, "coherence_small_ms": s, "coherence_large_ms": l }));
    }
    Ok((table, json!({ "points": points, "coherence_cap_ms": model.dephasing.coherence_cap * 1e3 }), None))
}

pub(super) fn capacity(cfg: &ScenarioConfig) -> Result<Out> {
    let model = cfg.node.model()?;
    let e = cfg.scenario.min_efficiency;
    let n = node_capacity(e, &model.cavity, &model.addressing, &model.calib)?;
    let half = efficient_half_width(e, &model.cavity, &model.calib)?;
    let mut table = Table::new(&["min_efficiency", "capacity", "half_width_um", "spacing_um"]);
    table.push(vec![format!("{e}"), n.to_string(), fmt6(half / UM), fmt6(model.addressing.min_distance / UM)]);
    let results = json!({
        "min_efficiency": e,
        "capacity": n,
        "half_width_um": half / UM,
        "spacing_um": model.addressing.min_distance / UM,
    });
    Ok((table, results, None))
}
