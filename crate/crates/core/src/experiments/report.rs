use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::config::Kind;
use crate::error::Result;
use crate::index::IndexResult;
use crate::output::{fmt_f64, to_json};

/// `|kitaev - index|` allowed for a quantization record.
pub const KITAEV_TOL: f64 = 0.1;
/// Stacked versus layered spectrum.
pub const SPECTRUM_TOL: f64 = 1e-9;
/// Kernel-level versus operator-level stacking.
pub const STACK_KERNEL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordStatus {
    Ok,
    Unreliable,
    GapClosed,
    Error,
}

/// One row of an experiment: a realization, a trial, a base point or a check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub label: String,
    pub seed: Option<u64>,
    pub status: RecordStatus,
    pub index: Option<i64>,
    /// Smallest localizer margin over the evaluated `κ`.
    pub margin: Option<f64>,
    /// Bulk gap width around `μ`.
    pub gap: Option<f64>,
    pub sites: usize,
    pub plateau: Option<bool>,
    #[serde(default)]
    pub oracles: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<IndexResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn new(trial: usize, label: &str) -> Self {
        TrialRecord {
            trial,
            label: label.to_string(),
            seed: None,
            status: RecordStatus::Ok,
            index: None,
            margin: None,
            gap: None,
            sites: 0,
            plateau: None,
            oracles: BTreeMap::new(),
            sweep: Vec::new(),
            error: None,
        }
    }

    pub fn failed(trial: usize, label: &str, status: RecordStatus, err: &crate::Error) -> Self {
        TrialRecord { status, error: Some(err.to_string()), ..Self::new(trial, label) }
    }

    fn oracle(&self, key: &str) -> Option<f64> {
        self.oracles.get(key).copied()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Kind,
    /// The resolved configuration, defaults included.
    pub inputs: Value,
    pub records: Vec<TrialRecord>,
    pub summary: BTreeMap<String, Value>,
    pub verdict: Verdict,
}

impl ExperimentReport {
    pub fn new(experiment: Kind, inputs: Value, records: Vec<TrialRecord>, summary: BTreeMap<String, Value>) -> Self {
        let verdict = judge(experiment, &records);
        ExperimentReport { experiment, inputs, records, summary, verdict }
    }

    /// The verdict implied by the records alone.
    pub fn recompute_verdict(&self) -> Verdict {
        judge(self.experiment, &self.records)
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> Result<String> {
        to_json(self)
    }

    /// `trial,seed,index,margin,gap`, empty cells for missing values.
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("trial,seed,index,margin,gap\n");
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.trial,
                r.seed.map(|s| s.to_string()).unwrap_or_default(),
                r.index.map(|s| s.to_string()).unwrap_or_default(),
                r.margin.map(fmt_f64).unwrap_or_default(),
                r.gap.map(fmt_f64).unwrap_or_default(),
            );
        }
        out
    }
}

fn valid(r: &TrialRecord) -> bool {
    r.status == RecordStatus::Ok && r.index.is_some()
}

pub fn judge(kind: Kind, records: &[TrialRecord]) -> Verdict {
    let pass = !records.is_empty()
        && match kind {
            Kind::Generate | Kind::Spectrum => records.iter().all(|r| r.status == RecordStatus::Ok),
            Kind::Index => records.iter().all(|r| valid(r) && r.plateau == Some(true)),
            Kind::Quantization => {
                let first = records[0].index;
                records.iter().all(|r| {
                    valid(r)
                        && r.plateau == Some(true)
                        && r.index == first
                        && r.oracle("kitaev").is_none_or(|k| (k - r.index.unwrap_or(0) as f64).abs() <= KITAEV_TOL)
                        && r.oracle("fhs").is_none_or(|c| c == r.index.unwrap_or(0) as f64)
                        && r.oracle("bloch_winding").is_none_or(|c| c == r.index.unwrap_or(0) as f64)
                })
            }
            Kind::Robustness => {
                let base = records.iter().find(|r| r.label == "base");
                let trials: Vec<&TrialRecord> =
                    records.iter().filter(|r| r.label == "trial" && r.status != RecordStatus::GapClosed).collect();
                match base {
                    Some(b) if valid(b) => {
                        !trials.is_empty() && trials.iter().all(|t| valid(t) && t.index == b.index)
                    }
                    _ => false,
                }
            }
            Kind::Stacking => records.iter().all(|r| match r.label.as_str() {
                "chain" => {
                    valid(r)
                        && r.index != Some(0)
                        && r.oracle("bloch_winding").is_some_and(|w| Some(w as i64) == r.index)
                }
                "stacked" => {
                    valid(r)
                        && r.plateau == Some(true)
                        && r.index == Some(0)
                        && r.oracle("kernel_stack_deviation").is_none_or(|d| d <= STACK_KERNEL_TOL)
                }
                "stacked_spectrum" => r.oracle("max_deviation").is_some_and(|d| d <= SPECTRUM_TOL),
                "control" => {
                    valid(r) && r.index != Some(0) && r.oracle("fhs").is_some_and(|c| Some(c as i64) == r.index)
                }
                _ => false,
            }),
            Kind::Omega => {
                let first = records[0].index;
                records.iter().all(|r| valid(r) && r.index == first)
            }
        };
    if pass {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(label: &str, status: RecordStatus, index: Option<i64>) -> TrialRecord {
        TrialRecord { status, index, plateau: Some(true), ..TrialRecord::new(0, label) }
    }

    #[test]
    fn robustness_ignores_closed_trials() {
        let mut records = vec![rec("base", RecordStatus::Ok, Some(1)), rec("trial", RecordStatus::Ok, Some(1))];
        records.push(rec("trial", RecordStatus::GapClosed, None));
        assert_eq!(judge(Kind::Robustness, &records), Verdict::Pass);
        records.push(rec("trial", RecordStatus::Ok, Some(0)));
        assert_eq!(judge(Kind::Robustness, &records), Verdict::Fail);
    }

    #[test]
    fn quantization_checks_oracles() {
        let mut r = rec("realization", RecordStatus::Ok, Some(1));
        r.oracles.insert("kitaev".into(), 0.95);
        assert_eq!(judge(Kind::Quantization, std::slice::from_ref(&r)), Verdict::Pass);
        r.oracles.insert("kitaev".into(), 0.85);
        assert_eq!(judge(Kind::Quantization, &[r]), Verdict::Fail);
        assert_eq!(judge(Kind::Quantization, &[]), Verdict::Fail);
    }

    #[test]
    fn csv_leaves_missing_cells_empty() {
        let report = ExperimentReport::new(
            Kind::Omega,
            Value::Null,
            vec![rec("base_point", RecordStatus::Ok, Some(-1))],
            BTreeMap::new(),
        );
        assert_eq!(report.summary_csv(), "trial,seed,index,margin,gap\n0,,-1,,\n");
        assert!(report.passed());
    }
}
