//! Tabular results and their CSV / JSON serialization.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{Estimator, OutputFormat};
use crate::error::{Error, Result};
use crate::qubit::NamedPolarization;
use crate::tomography::{fidelity_estimate, reconstruct, FidelityEstimate, TomographyCounts};

/// Column layout shared by table1, retry, coherence and the tomography sweeps.
pub const TOMOGRAPHY_COLUMNS: [&str; 14] = [
    "scenario", "pattern", "atom", "input_pol", "storage_us", "trials", "emitted", "efficiency", "fidelity", "ci68_lo",
    "ci68_hi", "ci95_lo", "ci95_hi", "seed",
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric value of a cell, as a reader of the written file would parse it.
    pub fn number(&self, row: usize, name: &str) -> Option<f64> {
        self.rows.get(row)?.get(self.column(name)?)?.parse().ok()
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    /// Array of objects; cells that parse as numbers become JSON numbers.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    let mut m = Map::new();
                    for (k, v) in self.columns.iter().zip(r) {
                        m.insert(k.clone(), json_cell(v));
                    }
                    Value::Object(m)
                })
                .collect(),
        )
    }

    /// Prepends constant columns, used by sweeps.
    pub fn prefixed(&self, names: &[&str], values: &[String]) -> Self {
        let mut columns: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        columns.extend(self.columns.iter().cloned());
        let rows = self
            .rows
            .iter()
            .map(|r| values.iter().cloned().chain(r.iter().cloned()).collect())
            .collect();
        Self { columns, rows }
    }

    pub fn append(&mut self, other: Table) -> Result<()> {
        if self.columns.is_empty() {
            *self = other;
            return Ok(());
        }
        if self.columns != other.columns {
            return Err(Error::InvalidArgument("cannot append tables with different columns".into()));
        }
        self.rows.extend(other.rows);
        Ok(())
    }
}

fn json_cell(v: &str) -> Value {
    if let Ok(i) = v.parse::<u64>() {
        return Value::from(i);
    }
    match v.parse::<f64>() {
        Ok(f) if f.is_finite() => Value::from(f),
        _ => Value::from(v),
    }
}

pub fn fmt6(x: f64) -> String {
    format!("{x:.6}")
}

/// Row estimate from tomography counts.
///
/// `Basis` uses the target basis only. `Reconstruction` reports <psi|rho|psi> of the linear-inversion
/// state and carries the target-basis Wilson interval over with the same shrink toward 1/2.
pub fn estimate(counts: &TomographyCounts, target: NamedPolarization, estimator: Estimator) -> Option<FidelityEstimate> {
    let basis = fidelity_estimate(counts, target).ok()?;
    match estimator {
        Estimator::Basis => Some(basis),
        Estimator::Reconstruction => {
            let value = reconstruct(counts).ok()?.fidelity(target).ok()?;
            let dev = basis.value - 0.5;
            let scale = if dev.abs() > 1e-12 { (value - 0.5) / dev } else { 1.0 };
            let map = |(lo, hi): (f64, f64)| {
                let (a, b) = (0.5 + scale * (lo - 0.5), 0.5 + scale * (hi - 0.5));
                (a.min(b).max(0.0), a.max(b).min(1.0))
            };
            Some(FidelityEstimate { value, ci68: map(basis.ci68), ci95: map(basis.ci95), n_effective: basis.n_effective })
        }
    }
}

/// The eight trailing columns of a tomography row: trials .. seed.
pub fn tomography_cells(
    trials: u64,
    emitted: u64,
    est: Option<FidelityEstimate>,
    seed: u64,
) -> Vec<String> {
    let eff = if trials == 0 { 0.0 } else { emitted as f64 / trials as f64 };
    let (f, c68, c95) = match est {
        Some(e) => (fmt6(e.value), e.ci68, e.ci95),
        None => ("nan".to_string(), (f64::NAN, f64::NAN), (f64::NAN, f64::NAN)),
    };
    vec![
        trials.to_string(),
        emitted.to_string(),
        fmt6(eff),
        f,
        fmt6(c68.0),
        fmt6(c68.1),
        fmt6(c95.0),
        fmt6(c95.1),
        seed.to_string(),
    ]
}

/// Files produced by one run.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub table: Table,
    pub summary: Value,
    pub trace: Option<String>,
}

impl RunOutput {
    /// Writes `results.{csv,json}`, `summary.json` and, if present, `trace.txt`.
    pub fn write(&self, dir: &Path, format: OutputFormat) -> Result<Vec<std::path::PathBuf>> {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let mut written = Vec::new();
        let mut put = |name: &str, text: String| -> Result<()> {
            let p = dir.join(name);
            fs::write(&p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            written.push(p);
            Ok(())
        };
        match format {
            OutputFormat::Csv => put("results.csv", self.table.to_csv())?,
            OutputFormat::Json => put("results.json", pretty(&self.table.to_json()))?,
        }
        put("summary.json", pretty(&self.summary))?;
        if let Some(t) = &self.trace {
            put("trace.txt", t.clone())?;
        }
        Ok(written)
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json value serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tomography::Basis;

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["x".into(), "0.500000".into()]);
        assert_eq!(t.to_csv(), "a,b\nx,0.500000\n");
        assert_eq!(t.to_json()[0]["b"], Value::from(0.5));
        assert_eq!(t.number(0, "b"), Some(0.5));
        let p = t.prefixed(&["parameter", "value"], &["d".into(), "3".into()]);
        assert_eq!(p.columns[0], "parameter");
        assert_eq!(p.rows[0][3], "0.500000");
    }

    #[test]
    fn reconstruction_interval_follows_shrink() {
        let mut c = TomographyCounts::default();
        c.set(Basis::HV, 900, 100);
        c.set(Basis::DA, 500, 500);
        c.set(Basis::RL, 500, 500);
        let b = estimate(&c, NamedPolarization::H, Estimator::Basis).unwrap();
        let r = estimate(&c, NamedPolarization::H, Estimator::Reconstruction).unwrap();
        assert!((r.value - b.value).abs() < 1e-12);
        assert!((r.ci95.0 - b.ci95.0).abs() < 1e-12);
        c.set(Basis::DA, 1000, 0);
        c.set(Basis::RL, 1000, 0);
        let r = estimate(&c, NamedPolarization::H, Estimator::Reconstruction).unwrap();
        assert!(r.value < b.value);
        assert!(r.ci68.0 <= r.value && r.value <= r.ci68.1);
    }
}
