//! Sweeping a configuration parameter: probe detuning against per-atom fidelity.

use raqm::config::{ScenarioConfig, ScenarioId, SweepSection};
use raqm::harness::{self, Runner};

fn main() -> raqm::Result<()> {
    let mut cfg = ScenarioConfig::new(ScenarioId::Table1);
    cfg.run.trials = 10_000;
    cfg.scenario.patterns = vec!["AWBWARBR".into()];
    cfg.scenario.inputs = vec!["R/L".into()];
    cfg.sweep = Some(SweepSection {
        parameter: "node.detuning.detuning_mhz".into(),
        values: vec![-20.0, -40.0, -100.0, -200.0],
        start: None,
        stop: None,
        steps: None,
        trials: None,
    });
    let out = harness::sweep(&cfg, &Runner::new(0)?)?;
    let t = &out.table;
    for i in 0..t.rows.len() {
        println!(
            "detuning {:>6} MHz  atom {}  fidelity {:.4}",
            t.rows[i][1],
            t.rows[i][t.column("atom").unwrap()],
            t.number(i, "fidelity").unwrap()
        );
    }
    println!("flagged series: {}", out.summary["results"]["non_monotonic"]);
    Ok(())
}
