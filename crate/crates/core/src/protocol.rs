//! Timestamped write/read programs: validation, standard patterns and execution against a register.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::node::{ReadOutcome, Register, WriteOutcome, READ_DRAWS};
use crate::physics::stirap_crossillumination_prob;
use crate::qubit::{NamedPolarization, PolarizationQubit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EventKind {
    Write(NamedPolarization),
    Read,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccessEvent {
    /// Seconds from the start of the sequence.
    pub time: f64,
    pub kind: EventKind,
    pub target: String,
}

impl AccessEvent {
    pub fn write(time_us: f64, target: &str, pol: NamedPolarization) -> Self {
        Self { time: time_us * 1e-6, kind: EventKind::Write(pol), target: target.to_string() }
    }

    pub fn read(time_us: f64, target: &str) -> Self {
        Self { time: time_us * 1e-6, kind: EventKind::Read, target: target.to_string() }
    }

    fn duration(&self, rules: &TimingRules) -> f64 {
        match self.kind {
            EventKind::Write(_) => rules.write_duration,
            EventKind::Read => rules.read_duration,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingRules {
    pub switch_delay: f64,
    pub min_storage: f64,
    pub rephase_period: f64,
    pub write_duration: f64,
    pub read_duration: f64,
}

impl Default for TimingRules {
    fn default() -> Self {
        Self {
            switch_delay: 40e-6,
            min_storage: 100e-6,
            rephase_period: 1.0 / 30e3,
            write_duration: 8e-6,
            read_duration: 8e-6,
        }
    }
}

impl TimingRules {
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        for (name, x) in [
            ("switch_delay", self.switch_delay),
            ("min_storage", self.min_storage),
            ("rephase_period", self.rephase_period),
            ("write_duration", self.write_duration),
            ("read_duration", self.read_duration),
        ] {
            if !(x > 0.0 && x.is_finite()) {
                v.push(format!("timing.{name} must be positive"));
            }
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Violation {
    SwitchDelay { index: usize, gap_us: f64 },
    MinStorage { atom: String, write_us: f64, read_us: f64 },
    Overlap { index: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SwitchDelay { index, gap_us } => {
                write!(f, "event {index}: target switch after {gap_us:.3} us, below the switch delay")
            }
            Self::MinStorage { atom, write_us, read_us } => write!(
                f,
                "atom {atom}: storage {write_us:.3}->{read_us:.3} us encloses another atom's event but is below the minimum storage time"
            ),
            Self::Overlap { index } => write!(f, "event {index}: pulse overlaps the previous pulse"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a timeline against the timing rules. Unsorted input is an error; rule breaches are reported.
pub fn validate(timeline: &[AccessEvent], rules: &TimingRules) -> Result<ValidationReport> {
    for (i, e) in timeline.iter().enumerate() {
        if !(e.time >= 0.0 && e.time.is_finite()) {
            return Err(Error::Ordering { index: i, time_us: e.time * 1e6 });
        }
        if i > 0 && e.time <= timeline[i - 1].time {
            return Err(Error::Ordering { index: i, time_us: e.time * 1e6 });
        }
    }
    let mut report = ValidationReport::default();
    let eps = 1e-12;
    for i in 1..timeline.len() {
        let (prev, cur) = (&timeline[i - 1], &timeline[i]);
        let gap = cur.time - prev.time;
        if prev.target != cur.target && gap + eps < rules.switch_delay {
            report.violations.push(Violation::SwitchDelay { index: i, gap_us: gap * 1e6 });
        }
        if gap + eps < prev.duration(rules) {
            report.violations.push(Violation::Overlap { index: i });
        }
    }
    let mut open: BTreeMap<&str, usize> = BTreeMap::new();
    for (i, e) in timeline.iter().enumerate() {
        match e.kind {
            EventKind::Write(_) => {
                open.insert(&e.target, i);
            }
            EventKind::Read => match open.remove(e.target.as_str()) {
                Some(w) => {
                    let enclosed = timeline[w + 1..i].iter().any(|o| o.target != e.target);
                    let storage = e.time - timeline[w].time;
                    if enclosed && storage + eps < rules.min_storage {
                        report.violations.push(Violation::MinStorage {
                            atom: e.target.clone(),
                            write_us: timeline[w].time * 1e6,
                            read_us: e.time * 1e6,
                        });
                    }
                }
                None => report.warnings.push(format!("event {i}: read on {} without a prior write", e.target)),
            },
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pattern {
    AWBWARBR,
    AWBWBRAR,
    /// A write, k write-read cycles on B, then the A read.
    Extended(usize),
}

impl Pattern {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "AWBWARBR" => Some(Self::AWBWARBR),
            "AWBWBRAR" => Some(Self::AWBWBRAR),
            _ => {
                let k = s.strip_prefix("extended(")?.strip_suffix(')')?;
                k.trim().parse().ok().map(Self::Extended)
            }
        }
    }

    pub fn atoms(&self) -> &'static [&'static str] {
        match self {
            Self::Extended(0) => &["A"],
            _ => &["A", "B"],
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AWBWARBR => f.write_str("AWBWARBR"),
            Self::AWBWBRAR => f.write_str("AWBWBRAR"),
            Self::Extended(k) => write!(f, "extended({k})"),
        }
    }
}

/// Event placement inside the standard patterns, in units of the rephasing period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PatternTiming {
    pub second_write: f64,
    pub first_read: f64,
    pub second_read: f64,
    /// Spacing of B writes in the extended pattern.
    pub cycle_period: f64,
    /// B storage in the extended pattern.
    pub cycle_storage: f64,
}

impl Default for PatternTiming {
    fn default() -> Self {
        Self { second_write: 1.5, first_read: 4.0, second_read: 5.5, cycle_period: 3.0, cycle_storage: 2.0 }
    }
}

/// Builds the event list of a standard pattern.
pub fn make_pattern(pattern: Pattern, inputs: &BTreeMap<String, NamedPolarization>, rules: &TimingRules) -> Result<Vec<AccessEvent>> {
    make_pattern_with(pattern, inputs, rules, &PatternTiming::default())
}

pub fn make_pattern_with(
    pattern: Pattern,
    inputs: &BTreeMap<String, NamedPolarization>,
    rules: &TimingRules,
    timing: &PatternTiming,
) -> Result<Vec<AccessEvent>> {
    let input = |label: &str| {
        inputs
            .get(label)
            .copied()
            .ok_or_else(|| Error::Config(format!("pattern {pattern} needs an input polarization for atom {label}")))
    };
    let t = rules.rephase_period;
    let ev = |time: f64, kind: EventKind, target: &str| AccessEvent { time, kind, target: target.to_string() };
    let a = input("A")?;
    let events = match pattern {
        Pattern::AWBWARBR | Pattern::AWBWBRAR => {
            let b = input("B")?;
            let (first, second) = if pattern == Pattern::AWBWARBR { ("A", "B") } else { ("B", "A") };
            vec![
                ev(0.0, EventKind::Write(a), "A"),
                ev(timing.second_write * t, EventKind::Write(b), "B"),
                ev(timing.first_read * t, EventKind::Read, first),
                ev(timing.second_read * t, EventKind::Read, second),
            ]
        }
        Pattern::Extended(k) => {
            let mut v = vec![ev(0.0, EventKind::Write(a), "A")];
            let mut last = 0.0;
            if k > 0 {
                let b = input("B")?;
                for i in 0..k {
                    let w = (timing.second_write + timing.cycle_period * i as f64) * t;
                    let r = w + timing.cycle_storage * t;
                    v.push(ev(w, EventKind::Write(b), "B"));
                    v.push(ev(r, EventKind::Read, "B"));
                    last = r + rules.switch_delay;
                }
            }
            let earliest = last.max(rules.min_storage);
            let read = (earliest / t - 1e-9).ceil() * t;
            v.push(ev(read, EventKind::Read, "A"));
            v
        }
    };
    Ok(events)
}

/// What happened at one event of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EventRecord {
    pub time: f64,
    pub target: String,
    pub kind: EventKind,
    pub write_outcome: Option<WriteOutcome>,
    /// Photon detected in this event's window, if any.
    pub photon: Option<PolarizationQubit>,
    /// Atom the detected photon came from.
    pub source: Option<String>,
    /// Read time minus the write time of the payload that was read (target atom only).
    pub storage: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub events: Vec<EventRecord>,
    pub prepared: bool,
    pub attempts: usize,
    /// False only when a retry policy ran out of attempts.
    pub accepted: bool,
}

impl TrialRecord {
    /// Read events that yielded a photon, keyed by target.
    pub fn read_event(&self, target: &str, nth: usize) -> Option<&EventRecord> {
        self.events.iter().filter(|e| e.kind == EventKind::Read && e.target == target).nth(nth)
    }

    pub fn all_reads_emitted(&self) -> bool {
        self.events.iter().filter(|e| e.kind == EventKind::Read).all(|e| e.photon.is_some())
    }
}

/// Extra uniforms consumed per event for each atom other than the target.
pub const SIDE_DRAWS: usize = READ_DRAWS + 2;

/// Prepares the register and executes the timeline. Cross-illumination and unaddressed
/// scattering are the only ways an event touches atoms other than its target.
pub fn run<R: Rng + ?Sized>(timeline: &[AccessEvent], register: &mut Register, rng: &mut R) -> Result<TrialRecord> {
    let prepared = register.prepare(rng);
    let mut written_at: BTreeMap<String, f64> = BTreeMap::new();
    let mut events = Vec::with_capacity(timeline.len());
    for ev in timeline {
        let ti = register.index_of(&ev.target)?;
        let xt = register.atoms()[ti].position_x;
        let others: Vec<(String, f64)> = register
            .atoms()
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != ti)
            .map(|(_, a)| {
                let p = if register.model().crossillumination {
                    stirap_crossillumination_prob((a.position_x - xt).abs(), &register.model().addressing)
                } else {
                    0.0
                };
                (a.id.clone(), p)
            })
            .collect();
        let mut rec = EventRecord {
            time: ev.time,
            target: ev.target.clone(),
            kind: ev.kind,
            write_outcome: None,
            photon: None,
            source: None,
            storage: None,
        };
        match ev.kind {
            EventKind::Write(pol) => {
                let outcome = register.write(&ev.target, pol, ev.time, rng)?;
                if outcome == WriteOutcome::Stored {
                    written_at.insert(ev.target.clone(), ev.time);
                }
                for (label, p_ci) in &others {
                    let u = side_draws(rng);
                    if register.state(label)?.is_holding() {
                        register.read_scaled(label, ev.time, [u[0], u[1], u[2]], *p_ci, "stray-read")?;
                    } else if outcome == WriteOutcome::Reflected {
                        let w = {
                            let s = register.slot(label)?;
                            register.model().store_prob(&s.state, s.coupling_scale)
                        };
                        if u[3] < p_ci * w && register.capture(label, pol, ev.time)? {
                            written_at.insert(label.clone(), ev.time);
                        }
                    }
                }
                rec.write_outcome = Some(outcome);
            }
            EventKind::Read => {
                let holding = register.state(&ev.target)?.is_holding();
                let own = register.read(&ev.target, ev.time, rng)?;
                if holding {
                    rec.storage = written_at.remove(&ev.target).map(|w| ev.time - w);
                }
                if let ReadOutcome::Photon(q) = own {
                    rec.photon = Some(q);
                    rec.source = Some(ev.target.clone());
                }
                for (label, p_ci) in &others {
                    let u = side_draws(rng);
                    if !register.state(label)?.is_holding() {
                        continue;
                    }
                    if let ReadOutcome::Photon(q) = register.read_scaled(label, ev.time, [u[0], u[1], u[2]], *p_ci, "stray-read")? {
                        written_at.remove(label);
                        if rec.photon.is_none() || u[4] < 0.5 {
                            rec.photon = Some(q);
                            rec.source = Some(label.clone());
                        }
                    }
                }
            }
        }
        events.push(rec);
    }
    Ok(TrialRecord { events, prepared, attempts: 1, accepted: true })
}

fn side_draws<R: Rng + ?Sized>(rng: &mut R) -> [f64; SIDE_DRAWS] {
    let mut u = [0.0; SIDE_DRAWS];
    for x in &mut u {
        *x = rng.random();
    }
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RetryPolicy {
    None,
    UntilBothEmit { max_attempts: usize },
}

/// Runs the timeline, repeating the whole sequence until every read emits (or attempts run out).
pub fn run_with_retry<R: Rng + ?Sized>(
    timeline: &[AccessEvent],
    register: &mut Register,
    rng: &mut R,
    policy: RetryPolicy,
) -> Result<TrialRecord> {
    match policy {
        RetryPolicy::None => run(timeline, register, rng),
        RetryPolicy::UntilBothEmit { max_attempts } => {
            if max_attempts == 0 {
                return Err(Error::InvalidArgument("max_attempts must be at least 1".into()));
            }
            let mut last = None;
            for attempt in 1..=max_attempts {
                let mut rec = run(timeline, register, rng)?;
                rec.attempts = attempt;
                if rec.all_reads_emitted() {
                    return Ok(rec);
                }
                rec.accepted = false;
                last = Some(rec);
            }
            Ok(last.expect("at least one attempt"))
        }
    }
}

/// Parses the timeline text format: `<time_us> <WRITE|READ> <label> [pol]`, `#` starts a comment.
pub fn parse_timeline(text: &str) -> Result<Vec<AccessEvent>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse { line: n + 1, message };
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() < 3 {
            return Err(err(format!("expected `<time_us> <WRITE|READ> <label> [pol]`, got `{line}`")));
        }
        let t: f64 = f[0].parse().map_err(|_| err(format!("bad time `{}`", f[0])))?;
        let label = f[2];
        let ev = match f[1].to_ascii_uppercase().as_str() {
            "WRITE" => {
                let pol = f.get(3).ok_or_else(|| err("WRITE needs a polarization".into()))?;
                let pol = NamedPolarization::parse(pol).ok_or_else(|| err(format!("unknown polarization `{pol}`")))?;
                if f.len() > 4 {
                    return Err(err("trailing fields".into()));
                }
                AccessEvent::write(t, label, pol)
            }
            "READ" => {
                if f.len() > 3 {
                    return Err(err("READ takes no polarization".into()));
                }
                AccessEvent::read(t, label)
            }
            other => return Err(err(format!("unknown operation `{other}`"))),
        };
        out.push(ev);
    }
    Ok(out)
}

pub fn format_timeline(timeline: &[AccessEvent]) -> String {
    let mut s = String::from("# time_us op atom [pol]\n");
    for e in timeline {
        match e.kind {
            EventKind::Write(p) => s.push_str(&format!("{:.3} WRITE {} {}\n", e.time * 1e6, e.target, p)),
            EventKind::Read => s.push_str(&format!("{:.3} READ {}\n", e.time * 1e6, e.target)),
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::node::{MarkovParams, NodeModel, PayloadNoise};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn inputs(a: NamedPolarization, b: NamedPolarization) -> BTreeMap<String, NamedPolarization> {
        BTreeMap::from([("A".to_string(), a), ("B".to_string(), b)])
    }

    fn ideal_model() -> NodeModel {
        let mut m = NodeModel::reference();
        m.markov = MarkovParams {
            p_no_interaction: 0.0,
            p_scatter_write: 0.0,
            store_share: 1.0,
            eff_from_center: 1.0,
            ..Default::default()
        };
        m.noise = PayloadNoise::IDEAL;
        m.p_prepare_fail = 0.0;
        m.uniform_coupling = true;
        m.dephasing.virtual_field_small = 0.0;
        m.detuning_model.ref_scatter_prob = 1e-300;
        m.crossillumination = false;
        m.rebuilt().unwrap()
    }

    #[test]
    fn validate_examples() {
        let r = TimingRules::default();
        let bad = vec![AccessEvent::write(0.0, "A", NamedPolarization::R), AccessEvent::write(20.0, "B", NamedPolarization::L)];
        assert!(matches!(validate(&bad, &r).unwrap().violations[0], Violation::SwitchDelay { .. }));
        let good = vec![
            AccessEvent::write(0.0, "A", NamedPolarization::R),
            AccessEvent::write(50.0, "B", NamedPolarization::L),
            AccessEvent::read(133.0, "A"),
            AccessEvent::read(183.0, "B"),
        ];
        assert!(validate(&good, &r).unwrap().is_ok());
        assert!(validate(&[], &r).unwrap().is_ok());
        let unsorted = vec![AccessEvent::read(10.0, "A"), AccessEvent::read(5.0, "A")];
        assert!(matches!(validate(&unsorted, &r), Err(Error::Ordering { index: 1, .. })));
        let rr = validate(&[AccessEvent::read(0.0, "A")], &r).unwrap();
        assert!(rr.is_ok() && rr.warnings.len() == 1);
    }

    #[test]
    fn min_storage_only_with_enclosed_event() {
        let r = TimingRules::default();
        let short = vec![
            AccessEvent::write(0.0, "A", NamedPolarization::R),
            AccessEvent::write(50.0, "B", NamedPolarization::L),
            AccessEvent::read(95.0, "A"),
        ];
        assert!(matches!(validate(&short, &r).unwrap().violations[0], Violation::MinStorage { .. }));
        let alone = vec![AccessEvent::write(0.0, "A", NamedPolarization::R), AccessEvent::read(30.0, "A")];
        assert!(validate(&alone, &r).unwrap().is_ok());
    }

    #[test]
    fn overlap_is_flagged() {
        let r = TimingRules::default();
        let t = vec![AccessEvent::write(0.0, "A", NamedPolarization::R), AccessEvent::read(5.0, "A")];
        assert!(matches!(validate(&t, &r).unwrap().violations[0], Violation::Overlap { .. }));
    }

    #[test]
    fn pattern_storage_times() {
        let r = TimingRules::default();
        let inp = inputs(NamedPolarization::R, NamedPolarization::L);
        let p = make_pattern(Pattern::AWBWARBR, &inp, &r).unwrap();
        assert!((p[2].time - p[0].time - 133.333e-6).abs() < 1e-9);
        assert!((p[3].time - p[1].time - 133.333e-6).abs() < 1e-9);
        assert!(validate(&p, &r).unwrap().is_ok());
        let q = make_pattern(Pattern::AWBWBRAR, &inp, &r).unwrap();
        assert!((q[2].time - q[1].time - 83.333e-6).abs() < 1e-9);
        assert!((q[3].time - q[0].time - 183.333e-6).abs() < 1e-9);
        assert!(validate(&q, &r).unwrap().is_ok());
        let e0 = make_pattern(Pattern::Extended(0), &BTreeMap::from([("A".to_string(), NamedPolarization::H)]), &r).unwrap();
        assert_eq!(e0.len(), 2);
        assert_eq!(e0[1].kind, EventKind::Read);
        let e10 = make_pattern(Pattern::Extended(10), &inp, &r).unwrap();
        assert_eq!(e10.len(), 22);
        assert!(validate(&e10, &r).unwrap().is_ok());
        let a_storage = e10[21].time;
        let cycles = a_storage / r.rephase_period;
        assert!((cycles - cycles.round()).abs() < 1e-9);
        assert!(make_pattern(Pattern::AWBWARBR, &BTreeMap::new(), &r).is_err());
    }

    #[test]
    fn noiseless_limit_returns_inputs() {
        let m = ideal_model();
        let r = TimingRules::default();
        let tl = make_pattern(Pattern::AWBWARBR, &inputs(NamedPolarization::R, NamedPolarization::L), &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let mut reg = Register::pair(&m, 8e-6).unwrap();
            let rec = run(&tl, &mut reg, &mut rng).unwrap();
            let a = rec.read_event("A", 0).unwrap().photon.as_ref().unwrap();
            let b = rec.read_event("B", 0).unwrap().photon.as_ref().unwrap();
            assert!((a.fidelity(NamedPolarization::R).unwrap() - 1.0).abs() < 1e-12);
            assert!((b.fidelity(NamedPolarization::L).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn swapping_read_order_keeps_payloads_in_noiseless_limit() {
        let m = ideal_model();
        let r = TimingRules::default();
        let inp = inputs(NamedPolarization::H, NamedPolarization::D);
        for (pat, seed) in [(Pattern::AWBWARBR, 9), (Pattern::AWBWBRAR, 9)] {
            let tl = make_pattern(pat, &inp, &r).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut reg = Register::pair(&m, 8e-6).unwrap();
            let rec = run(&tl, &mut reg, &mut rng).unwrap();
            let a = rec.read_event("A", 0).unwrap();
            assert!((a.photon.as_ref().unwrap().fidelity(NamedPolarization::H).unwrap() - 1.0).abs() < 1e-12);
            let b = rec.read_event("B", 0).unwrap();
            assert!((b.photon.as_ref().unwrap().fidelity(NamedPolarization::D).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn no_side_channels_means_no_foreign_mutation() {
        let mut m = NodeModel::reference();
        m.detuning_model.ref_scatter_prob = 1e-300;
        m.markov.p_scatter_write = 0.0;
        m.crossillumination = false;
        let m = m.rebuilt().unwrap();
        let r = TimingRules::default();
        let tl = make_pattern(Pattern::Extended(10), &inputs(NamedPolarization::R, NamedPolarization::L), &r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let mut reg = Register::pair(&m, 8e-6).unwrap().with_audit();
            let rec = run(&tl, &mut reg, &mut rng).unwrap();
            for (ev, entry) in tl.iter().zip(reg.audit().iter().skip(1)) {
                assert_eq!(ev.target, entry.atom);
            }
            assert_eq!(reg.audit().len(), tl.len() + 1);
            assert_eq!(rec.events.len(), tl.len());
        }
    }

    #[test]
    fn retry_policies() {
        let m = ideal_model();
        let r = TimingRules::default();
        let tl = make_pattern(Pattern::AWBWARBR, &inputs(NamedPolarization::R, NamedPolarization::L), &r).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(2);
        let mut b = ChaCha8Rng::seed_from_u64(2);
        let mut reg = Register::pair(&m, 8e-6).unwrap();
        let x = run_with_retry(&tl, &mut reg, &mut a, RetryPolicy::UntilBothEmit { max_attempts: 5 }).unwrap();
        let y = run(&tl, &mut reg, &mut b).unwrap();
        assert_eq!(x.attempts, 1);
        assert_eq!(x, y);
        assert!(run_with_retry(&tl, &mut reg, &mut a, RetryPolicy::UntilBothEmit { max_attempts: 0 }).is_err());
    }

    #[test]
    fn timeline_text_round_trip() {
        let r = TimingRules::default();
        let tl = make_pattern(Pattern::AWBWBRAR, &inputs(NamedPolarization::V, NamedPolarization::A), &r).unwrap();
        let text = format_timeline(&tl);
        let back = parse_timeline(&text).unwrap();
        assert_eq!(back.len(), tl.len());
        for (x, y) in tl.iter().zip(&back) {
            assert_eq!(x.kind, y.kind);
            assert!((x.time - y.time).abs() < 1e-9);
        }
        assert!(matches!(parse_timeline("0 WRITE A\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_timeline("# c\n\n5 JUMP A"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn pattern_names_parse() {
        for p in [Pattern::AWBWARBR, Pattern::AWBWBRAR, Pattern::Extended(10)] {
            assert_eq!(Pattern::parse(&p.to_string()), Some(p));
        }
        assert_eq!(Pattern::parse("zig"), None);
    }
}
