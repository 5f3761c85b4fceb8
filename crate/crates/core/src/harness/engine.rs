//! Parallel trial execution with worker-count-independent results.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::node::{NodeModel, Register};
use crate::protocol::{run_with_retry, AccessEvent, EventKind, RetryPolicy};
use crate::qubit::NamedPolarization;
use crate::rng::trial_rng;
use crate::tomography::{measure_once, Basis, TomographyCounts};

/// Trials per work unit. Fixed so chunk boundaries never depend on the worker count.
pub const CHUNK: u64 = 2048;

pub struct Runner {
    pool: rayon::ThreadPool,
    workers: usize,
}

impl Runner {
    /// `workers = 0` uses every available core.
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Io(format!("thread pool: {e}")))?;
        let workers = pool.current_num_threads();
        Ok(Self { pool, workers })
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    /// Runs `f` on consecutive trial ranges and folds the chunk results in index order.
    pub fn fold<A, F, M>(&self, trials: u64, f: F, mut merge: M) -> Result<Option<A>>
    where
        A: Send,
        F: Fn(std::ops::Range<u64>) -> Result<A> + Sync,
        M: FnMut(&mut A, A),
    {
        let n_chunks = trials.div_ceil(CHUNK);
        let parts: Vec<Result<A>> = self.pool.install(|| {
            (0..n_chunks)
                .into_par_iter()
                .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(trials)))
                .collect()
        });
        let mut acc: Option<A> = None;
        for p in parts {
            let p = p?;
            match acc.as_mut() {
                None => acc = Some(p),
                Some(a) => merge(a, p),
            }
        }
        Ok(acc)
    }
}

/// How the interatomic distance of each trial is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Spacing {
    Fixed(f64),
    Uniform(f64, f64),
}

impl Spacing {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        match *self {
            Self::Fixed(d) => d,
            Self::Uniform(lo, hi) => lo + (hi - lo) * u,
        }
    }
}

/// One read event of the timeline whose photons are analysed.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadSlot {
    pub event_index: usize,
    pub atom: String,
    pub target: NamedPolarization,
    /// Nominal storage time: read time minus the atom's preceding write time.
    pub storage: f64,
}

/// Read slots of a timeline, each with the input of the preceding write on the same atom.
pub fn read_slots(timeline: &[AccessEvent]) -> Vec<ReadSlot> {
    let mut out = Vec::new();
    for (i, e) in timeline.iter().enumerate() {
        if e.kind != EventKind::Read {
            continue;
        }
        let prev = timeline[..i].iter().rev().find_map(|w| match w.kind {
            EventKind::Write(p) if w.target == e.target => Some((p, w.time)),
            _ => None,
        });
        if let Some((p, t)) = prev {
            out.push(ReadSlot { event_index: i, atom: e.target.clone(), target: p, storage: e.time - t });
        }
    }
    out
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SlotStats {
    pub counts: TomographyCounts,
    pub emitted: u64,
    /// Sum and sum of squares of <psi|rho|psi> over emitted photons.
    pub fid_sum: f64,
    pub fid_sq: f64,
}

impl SlotStats {
    fn merge(&mut self, o: &Self) {
        self.counts.merge(&o.counts);
        self.emitted += o.emitted;
        self.fid_sum += o.fid_sum;
        self.fid_sq += o.fid_sq;
    }

    pub fn model_fidelity(&self) -> f64 {
        if self.emitted == 0 {
            0.0
        } else {
            self.fid_sum / self.emitted as f64
        }
    }

    pub fn model_fidelity_se(&self) -> f64 {
        let n = self.emitted as f64;
        if n < 2.0 {
            return 0.0;
        }
        let mean = self.fid_sum / n;
        let var = ((self.fid_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CellStats {
    pub trials: u64,
    pub attempts: u64,
    pub accepted: u64,
    pub slots: Vec<SlotStats>,
}

impl CellStats {
    fn merge(&mut self, o: Self) {
        self.trials += o.trials;
        self.attempts += o.attempts;
        self.accepted += o.accepted;
        for (a, b) in self.slots.iter_mut().zip(&o.slots) {
            a.merge(b);
        }
    }
}

/// Everything needed to simulate one table cell.
pub struct CellSpec<'a> {
    pub model: &'a NodeModel,
    pub timeline: &'a [AccessEvent],
    pub spacing: Spacing,
    pub retry: RetryPolicy,
    pub seed: u64,
    pub trials: u64,
}

/// Runs the cell. Photons from trial i are measured in basis i mod 3. Also returns the audit log
/// of trial 0 when `trace` is set.
pub fn simulate_cell(runner: &Runner, spec: &CellSpec<'_>, trace: bool) -> Result<(CellStats, Option<String>)> {
    let slots = read_slots(spec.timeline);
    let one = |i: u64, audit: bool| -> Result<(CellStats, Option<String>)> {
        let mut rng = trial_rng(spec.seed, i);
        let d = spec.spacing.sample(&mut rng);
        let mut reg = Register::pair(spec.model, d)?;
        if audit {
            reg = reg.with_audit();
        }
        let rec = run_with_retry(spec.timeline, &mut reg, &mut rng, spec.retry)?;
        let basis = Basis::ALL[(i % 3) as usize];
        let mut st = CellStats {
            trials: 1,
            attempts: rec.attempts as u64,
            accepted: rec.accepted as u64,
            slots: vec![SlotStats::default(); slots.len()],
        };
        for (s, slot) in st.slots.iter_mut().zip(&slots) {
            let u: f64 = rng.random();
            s.counts.total_attempts = 1;
            if !rec.accepted {
                continue;
            }
            if let Some(q) = &rec.events[slot.event_index].photon {
                s.emitted = 1;
                let f = q.fidelity(slot.target)?;
                s.fid_sum = f;
                s.fid_sq = f * f;
                s.counts.add(basis, measure_once(q, basis, u));
            }
        }
        let log = audit.then(|| reg.audit_text());
        Ok((st, log))
    };
    let trace_text = if trace && spec.trials > 0 { one(0, true)?.1 } else { None };
    let stats = runner
        .fold(
            spec.trials,
            |range| {
                let mut acc = CellStats { slots: vec![SlotStats::default(); slots.len()], ..Default::default() };
                for i in range {
                    acc.merge(one(i, false)?.0);
                }
                Ok(acc)
            },
            |a, b| a.merge(b),
        )?
        .unwrap_or_else(|| CellStats { slots: vec![SlotStats::default(); slots.len()], ..Default::default() });
    Ok((stats, trace_text))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{make_pattern, Pattern, TimingRules};
    use std::collections::BTreeMap;

    #[test]
    fn results_do_not_depend_on_workers() {
        let model = NodeModel::reference();
        let inputs = BTreeMap::from([("A".to_string(), NamedPolarization::H), ("B".to_string(), NamedPolarization::V)]);
        let tl = make_pattern(Pattern::AWBWARBR, &inputs, &TimingRules::default()).unwrap();
        let spec = CellSpec { model: &model, timeline: &tl, spacing: Spacing::Uniform(6e-6, 20e-6), retry: RetryPolicy::None, seed: 3, trials: 5000 };
        let (a, _) = simulate_cell(&Runner::new(1).unwrap(), &spec, false).unwrap();
        let (b, _) = simulate_cell(&Runner::new(4).unwrap(), &spec, false).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 5000);
        assert_eq!(a.slots.len(), 2);
    }

    #[test]
    fn slots_pair_reads_with_writes() {
        let inputs = BTreeMap::from([("A".to_string(), NamedPolarization::R), ("B".to_string(), NamedPolarization::L)]);
        let tl = make_pattern(Pattern::AWBWBRAR, &inputs, &TimingRules::default()).unwrap();
        let s = read_slots(&tl);
        assert_eq!(s[0].atom, "B");
        assert_eq!(s[0].target, NamedPolarization::L);
        assert!((s[1].storage - 183.333e-6).abs() < 1e-9);
    }
}
