//! The two-atom access table: every pattern and input pair, as written to results.csv.

use raqm::config::{ScenarioConfig, ScenarioId};
use raqm::harness::{self, Runner};

fn main() -> raqm::Result<()> {
    let mut cfg = ScenarioConfig::new(ScenarioId::Table1);
    cfg.run.trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20_000);
    let out = harness::run(&cfg, &Runner::new(0)?)?;
    print!("{}", out.table.to_csv());
    println!("ranges: {}", out.summary["results"]["ranges"]);
    Ok(())
}
