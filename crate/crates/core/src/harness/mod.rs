//! Scenario runner: turns a [`ScenarioConfig`] into result tables and a summary.

mod engine;
mod report;
mod scenarios;

pub use engine::{read_slots, simulate_cell, CellSpec, CellStats, ReadSlot, Runner, SlotStats, Spacing, CHUNK};
pub use report::{estimate, pretty, RunOutput, Table, TOMOGRAPHY_COLUMNS};

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::config::{ScenarioConfig, ScenarioId};
use crate::error::{Error, Result};
use crate::physics::{memory_efficiency, write_efficiency};
use crate::protocol::{make_pattern_with, validate, Pattern};
use crate::qubit::NamedPolarization;

/// Checks the configuration and runs its scenario.
pub fn run(cfg: &ScenarioConfig, runner: &Runner) -> Result<RunOutput> {
    check(cfg)?;
    let (table, results, trace) = match cfg.run.scenario {
        ScenarioId::Table1 => scenarios::table1(cfg, runner)?,
        ScenarioId::Retry => scenarios::retry(cfg, runner)?,
        ScenarioId::Coherence => scenarios::coherence(cfg, runner)?,
        ScenarioId::Reuse => scenarios::reuse(cfg, runner)?,
        ScenarioId::DetuningSweep => scenarios::detuning_sweep(cfg, runner)?,
        ScenarioId::DistanceSweep => scenarios::distance_sweep(cfg, runner)?,
        ScenarioId::AcceptanceSweep => scenarios::acceptance_sweep(cfg)?,
        ScenarioId::Capacity => scenarios::capacity(cfg)?,
    };
    Ok(RunOutput { table, summary: summary(cfg, results), trace })
}

/// Runs the scenario once per value of `[sweep]`, all points sharing the master seed.
pub fn sweep(cfg: &ScenarioConfig, runner: &Runner) -> Result<RunOutput> {
    check(cfg)?;
    let sw = cfg.sweep.as_ref().ok_or_else(|| Error::Config("sweep needs a [sweep] section".into()))?;
    let mut table = Table::default();
    let mut points = Vec::new();
    let mut trace = None;
    for v in sw.points()? {
        let mut c = cfg.with_parameter(&sw.parameter, v)?;
        c.sweep = None;
        if let Some(n) = sw.trials {
            c.run.trials = n;
        }
        let out = run(&c, runner)?;
        table.append(out.table.prefixed(&["parameter", "value"], &[sw.parameter.clone(), format!("{v}")]))?;
        points.push(json!({ "value": v, "results": out.summary["results"] }));
        if let Some(t) = out.trace {
            trace.get_or_insert_with(String::new).push_str(&format!("# {} = {v}\n{t}", sw.parameter));
        }
    }
    let flags = monotonic_flags(&table);
    let results = json!({ "parameter": sw.parameter, "points": points, "non_monotonic": flags });
    Ok(RunOutput { table, summary: summary(cfg, results), trace })
}

/// Everything `validate` reports: configuration problems, calibration anchors and the timing
/// rules applied to every timeline the configuration would run.
pub fn validate_config(cfg: &ScenarioConfig) -> Vec<String> {
    let mut v = cfg.problems();
    if !v.is_empty() {
        return v;
    }
    let node = &cfg.node;
    let (c, calib) = (node.cavity(), node.calib());
    match (memory_efficiency(c.g0, &c, &calib), write_efficiency(c.g0, &c, &calib)) {
        (Ok(m), Ok(w)) if m > w + 1e-12 => v.push(format!(
            "efficiency: center combined efficiency {m:.4} exceeds the write anchor {w:.4} (read efficiency above 1)"
        )),
        (Err(e), _) | (_, Err(e)) => v.push(e.to_string()),
        _ => {}
    }
    let rules = node.timing();
    let inputs = BTreeMap::from([("A".to_string(), NamedPolarization::R), ("B".to_string(), NamedPolarization::R)]);
    let mut patterns: Vec<Pattern> = cfg.scenario.patterns.iter().filter_map(|p| Pattern::parse(p)).collect();
    patterns.push(Pattern::Extended(cfg.scenario.reuse_cycles));
    for p in patterns {
        let report = make_pattern_with(p, &inputs, &rules, &node.pattern_timing()).and_then(|tl| validate(&tl, &rules));
        match report {
            Ok(r) => v.extend(r.violations.iter().map(|x| format!("timeline {p}: {x}"))),
            Err(e) => v.push(format!("timeline {p}: {e}")),
        }
    }
    v
}

fn check(cfg: &ScenarioConfig) -> Result<()> {
    let p = cfg.problems();
    if p.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(p.join("; ")))
    }
}

fn summary(cfg: &ScenarioConfig, results: Value) -> Value {
    // execution-only settings are left out so the summary depends only on what was simulated
    let mut echo = serde_json::to_value(cfg).unwrap_or(Value::Null);
    if let Some(run) = echo.get_mut("run").and_then(Value::as_object_mut) {
        run.remove("workers");
        run.remove("out_dir");
    }
    json!({
        "scenario": cfg.run.scenario.name(),
        "seed": cfg.run.seed,
        "trials": cfg.run.trials,
        "rng_scheme": crate::rng::SCHEME,
        "chunk_size": CHUNK,
        "results": results,
        "config": echo,
    })
}

/// Series (rows sharing every label column) whose fidelity both rises and falls by more than the
/// combined 95 % half-widths between neighbouring sweep values.
fn monotonic_flags(table: &Table) -> Vec<String> {
    let (Some(fi), Some(lo), Some(hi)) = (table.column("fidelity"), table.column("ci95_lo"), table.column("ci95_hi")) else {
        return Vec::new();
    };
    let labels: Vec<usize> = ["scenario", "pattern", "atom", "input_pol", "storage_us"]
        .iter()
        .filter_map(|c| table.column(c))
        .collect();
    let mut series: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    for r in &table.rows {
        let key = labels.iter().map(|&i| r[i].as_str()).collect::<Vec<_>>().join("|");
        let (Ok(f), Ok(l), Ok(h)) = (r[fi].parse::<f64>(), r[lo].parse::<f64>(), r[hi].parse::<f64>()) else {
            continue;
        };
        match series.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push((f, 0.5 * (h - l))),
            None => series.push((key, vec![(f, 0.5 * (h - l))])),
        }
    }
    series
        .into_iter()
        .filter(|(_, v)| {
            let steps: Vec<f64> = v
                .windows(2)
                .filter_map(|w| {
                    let d = w[1].0 - w[0].0;
                    (d.abs() > (w[0].1 * w[0].1 + w[1].1 * w[1].1).sqrt()).then_some(d)
                })
                .collect();
            steps.iter().any(|d| *d > 0.0) && steps.iter().any(|d| *d < 0.0)
        })
        .map(|(k, _)| k)
        .collect()
}
