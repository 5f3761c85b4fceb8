//! Access patterns as event timelines, checked against the timing rules.

use std::collections::BTreeMap;

use raqm::protocol::{format_timeline, make_pattern, parse_timeline, validate, Pattern, TimingRules};
use raqm::qubit::NamedPolarization;

fn main() -> raqm::Result<()> {
    let rules = TimingRules::default();
    let inputs = BTreeMap::from([("A".to_string(), NamedPolarization::H), ("B".to_string(), NamedPolarization::R)]);
    for p in [Pattern::AWBWARBR, Pattern::AWBWBRAR, Pattern::Extended(3)] {
        let tl = make_pattern(p, &inputs, &rules)?;
        let report = validate(&tl, &rules)?;
        println!("{p}: {} events, valid = {}", tl.len(), report.is_ok());
        print!("{}", format_timeline(&tl));
    }

    let hand = "0 WRITE A R\n20 WRITE B L   # too soon after A\n150 READ A\n200 READ B\n";
    let report = validate(&parse_timeline(hand)?, &rules)?;
    for v in &report.violations {
        println!("violation: {v}");
    }
    Ok(())
}
