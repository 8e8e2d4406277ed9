//! Run reports: per-trial metric tables, aggregates, and asserted bounds.
//!
//! Reports are serialized without wall-clock time so that equal seeds give
//! byte-identical output; timing goes to stderr in the human summary.

use std::collections::BTreeMap;

use serde::Serialize;

/// One asserted bound with its measured value.
#[derive(Debug, Clone, Serialize)]
pub struct Assertion {
    pub name: String,
    /// The bound the value is compared against (after tolerance).
    pub bound: f64,
    /// The measured value.
    pub value: f64,
    pub pass: bool,
}

impl Assertion {
    /// `value >= bound - tol`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Assertion {
            name: name.into(),
            bound,
            value,
            pass: value >= bound - tol,
        }
    }

    /// `value <= bound + tol`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64, tol: f64) -> Self {
        Assertion {
            name: name.into(),
            bound,
            value,
            pass: value <= bound + tol,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Aggregate {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// A full run: metric rows per trial, aggregates, and assertions.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub trials: Vec<BTreeMap<String, f64>>,
    pub aggregates: BTreeMap<String, Aggregate>,
    pub assertions: Vec<Assertion>,
    pub oracle_calls_total: u64,
    #[serde(skip)]
    pub wall_clock_ms: f64,
}

impl RunReport {
    pub fn new(command: impl Into<String>, seed: Option<u64>) -> Self {
        RunReport {
            command: command.into(),
            seed,
            trials: Vec::new(),
            aggregates: BTreeMap::new(),
            assertions: Vec::new(),
            oracle_calls_total: 0,
            wall_clock_ms: 0.0,
        }
    }

    pub fn push_trial(&mut self, row: BTreeMap<String, f64>) {
        self.trials.push(row);
    }

    /// Computes min/median/max for every metric key present in the trials.
    pub fn aggregate(&mut self) {
        let mut columns: BTreeMap<String, Vec<f64>> = BTreeMap::new();
        for row in &self.trials {
            for (k, &v) in row {
                columns.entry(k.clone()).or_default().push(v);
            }
        }
        self.aggregates = columns
            .into_iter()
            .map(|(k, mut vals)| {
                vals.sort_by(|a, b| a.partial_cmp(b).expect("finite metrics"));
                let median = vals[vals.len() / 2];
                (
                    k,
                    Aggregate {
                        min: vals[0],
                        median,
                        max: *vals.last().expect("non-empty column"),
                    },
                )
            })
            .collect();
    }

    pub fn all_passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plot-friendly CSV: one row per trial, columns sorted by name.
    pub fn to_csv(&self) -> String {
        let mut keys: Vec<&String> = self
            .trials
            .iter()
            .flat_map(|row| row.keys())
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        keys.sort();
        let mut out = String::from("trial");
        for k in &keys {
            out.push(',');
            out.push_str(k);
        }
        out.push('\n');
        for (i, row) in self.trials.iter().enumerate() {
            out.push_str(&i.to_string());
            for k in &keys {
                out.push(',');
                if let Some(v) = row.get(*k) {
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }

    /// One pass/fail line per assertion plus a summary, for stderr.
    pub fn human_summary(&self) -> String {
        let mut out = String::new();
        for a in &self.assertions {
            out.push_str(&format!(
                "[{}] {}: value {:.6e} vs bound {:.6e}\n",
                if a.pass { "PASS" } else { "FAIL" },
                a.name,
                a.value,
                a.bound
            ));
        }
        out.push_str(&format!(
            "{}: {} trials, {} assertions, oracle calls {}, {:.1} ms\n",
            self.command,
            self.trials.len(),
            self.assertions.len(),
            self.oracle_calls_total,
            self.wall_clock_ms
        ));
        out
    }
}
