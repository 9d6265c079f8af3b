//! Verification suites: pointwise inequality certificates on oracles with
//! exact analytic constants, and consistency checks between lower-bound
//! estimates where the witness transforms make the comparison valid.
//!
//! Reports are deterministic functions of (config, seed): instance streams
//! are derived per (check, oracle, trial), reductions use total orders, and
//! wall-clock data never enters the serialized output.

mod estimates;
mod pointwise;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::coeff::{CoeffVector, IndexSet};
use crate::error::{Error, Result};
use crate::norms::NormOracle;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckConfig {
    /// Ambient dimension for exhaustive-support runs.
    pub dim: u32,
    /// Ambient dimension for sampled runs (estimate mode).
    pub dim_sampled: u32,
    pub m_grid: Vec<u32>,
    pub tau_grid: Vec<f64>,
    /// Pointwise instances per (check, oracle).
    pub trials: usize,
    /// Random family size for estimate-mode runs.
    pub estimate_trials: usize,
    /// Sampled (A, B) pairs per vector in estimate mode.
    pub pair_samples: usize,
    pub seed: u64,
    pub enum_cap: usize,
    /// Tolerance for closed-form evaluations.
    pub tol_closed: f64,
    /// Tolerance where the coefficient solver participates.
    pub tol_solver: f64,
    /// Violations stored per check (the total count is always reported).
    pub max_violations: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            dim: 6,
            dim_sampled: 12,
            m_grid: vec![1, 2, 3],
            tau_grid: vec![0.25, 0.5, 0.75, 1.0],
            trials: 10_000,
            estimate_trials: 400,
            pair_samples: 32,
            seed: 7,
            enum_cap: 1_000_000,
            tol_closed: 1e-9,
            tol_solver: 1e-6,
            max_violations: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skipped { reason: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViolationWitness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<CoeffVector>,
    /// Second vector when the inequality involves one (signed indicators,
    /// transformed candidates).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub aux: Option<CoeffVector>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub sets: Vec<IndexSet>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Violation {
    pub m: u32,
    pub tau: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// Which inequality failed, e.g. `upper`, `cert1`, `pl2`.
    pub part: String,
    pub trial: u64,
    pub witness: ViolationWitness,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellStat {
    pub m: u32,
    pub tau: f64,
    pub part: String,
    /// Extremal observed ratio (lhs over benchmark).
    pub extremal: f64,
    /// The bound the ratio is held against, when one applies.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    pub instances: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_id: String,
    pub oracle: String,
    #[serde(flatten)]
    pub status: Status,
    pub cells: Vec<CellStat>,
    pub violations_total: u64,
    pub violations: Vec<Violation>,
    /// Wall-clock only; excluded from serialization so reports are
    /// byte-identical across runs.
    #[serde(skip)]
    pub runtime_ms: u128,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub config: CheckConfig,
    pub oracles: Vec<String>,
    pub reports: Vec<CheckReport>,
}

impl RunReport {
    pub fn any_failed(&self) -> bool {
        self.reports.iter().any(|r| r.status == Status::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    M1,
    M2,
    M3,
    M4,
    P4,
    S4,
    S5,
    S6,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::M1,
        Suite::M2,
        Suite::M3,
        Suite::M4,
        Suite::P4,
        Suite::S4,
        Suite::S5,
        Suite::S6,
    ];

    pub fn parse_list(s: &str) -> Result<Vec<Suite>> {
        let mut out = Vec::new();
        for part in s.split(',') {
            match part.trim() {
                "all" => return Ok(Self::ALL.to_vec()),
                "m1" => out.push(Suite::M1),
                "m2" => out.push(Suite::M2),
                "m3" => out.push(Suite::M3),
                "m4" => out.push(Suite::M4),
                "p4" => out.push(Suite::P4),
                "s4" => out.push(Suite::S4),
                "s5" => out.push(Suite::S5),
                "s6" => out.push(Suite::S6),
                other => {
                    return Err(Error::domain(format!(
                        "unknown suite `{other}` (expected all|m1|m2|m3|m4|p4|s4|s5|s6)"
                    )))
                }
            }
        }
        Ok(out)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Suite::M1 => "m1",
            Suite::M2 => "m2",
            Suite::M3 => "m3",
            Suite::M4 => "m4",
            Suite::P4 => "p4",
            Suite::S4 => "s4",
            Suite::S5 => "s5",
            Suite::S6 => "s6",
        }
    }
}

/// Run one suite against one oracle.
pub fn run_check(suite: Suite, oracle: &NormOracle, cfg: &CheckConfig) -> CheckReport {
    let started = Instant::now();
    let exact = oracle.metadata().exact;
    let mut report = match suite {
        Suite::M1 => {
            if exact {
                pointwise::check_m1_exact(oracle, cfg, 1.0)
            } else {
                estimates::check_m1_estimate(oracle, cfg)
            }
        }
        Suite::M2 => {
            if exact {
                pointwise::check_m2_exact(oracle, cfg)
            } else {
                estimates::check_m2_estimate(oracle, cfg)
            }
        }
        Suite::M3 => {
            if exact {
                pointwise::check_m3_exact(oracle, cfg)
            } else {
                estimates::check_m3_estimate(oracle, cfg)
            }
        }
        Suite::M4 => {
            if exact && oracle.metadata().basis_constant.is_some() {
                pointwise::check_m4_exact(oracle, cfg)
            } else {
                skipped(
                    "m4",
                    oracle,
                    "per-instance certificates need an exact basis constant",
                )
            }
        }
        Suite::P4 => estimates::check_p4(oracle, cfg),
        Suite::S4 => estimates::check_s4(oracle, cfg),
        Suite::S5 => estimates::check_s5(oracle, cfg),
        Suite::S6 => {
            if exact && oracle.metadata().quasi_greedy_weak.is_some() {
                pointwise::check_s6_exact(oracle, cfg)
            } else {
                skipped("s6", oracle, "needs an exact quasi-greedy constant")
            }
        }
    };
    report.runtime_ms = started.elapsed().as_millis();
    report
}

/// Run every requested suite over every oracle. Individual check errors are
/// recorded as skipped reports; the run continues.
pub fn run_all(cfg: &CheckConfig, oracles: &[NormOracle], suites: &[Suite]) -> RunReport {
    let mut reports = Vec::new();
    for oracle in oracles {
        for suite in suites {
            reports.push(run_check(*suite, oracle, cfg));
        }
    }
    RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        oracles: oracles.iter().map(|o| o.spec_string().to_string()).collect(),
        reports,
    }
}

pub(crate) fn skipped(id: &str, oracle: &NormOracle, reason: &str) -> CheckReport {
    CheckReport {
        check_id: id.to_string(),
        oracle: oracle.spec_string().to_string(),
        status: Status::Skipped {
            reason: reason.to_string(),
        },
        cells: Vec::new(),
        violations_total: 0,
        violations: Vec::new(),
        runtime_ms: 0,
    }
}

/// Shared accumulator turning per-instance observations into a report.
pub(crate) struct Accum {
    pub check_id: String,
    pub oracle: String,
    pub cells: Vec<CellStat>,
    pub violations: Vec<Violation>,
    pub violations_total: u64,
    max_violations: usize,
}

impl Accum {
    pub fn new(check_id: &str, oracle: &NormOracle, cfg: &CheckConfig) -> Self {
        Accum {
            check_id: check_id.to_string(),
            oracle: oracle.spec_string().to_string(),
            cells: Vec::new(),
            violations: Vec::new(),
            violations_total: 0,
            max_violations: cfg.max_violations,
        }
    }

    pub fn cell(
        &mut self,
        m: u32,
        tau: f64,
        part: &str,
        extremal: f64,
        bound: Option<f64>,
        instances: u64,
    ) {
        self.cells.push(CellStat {
            m,
            tau,
            part: part.to_string(),
            extremal,
            bound,
            instances,
        });
    }

    pub fn violation(&mut self, v: Violation) {
        self.violations_total += 1;
        if self.violations.len() < self.max_violations {
            self.violations.push(v);
        }
    }

    pub fn finish(self) -> CheckReport {
        let status = if self.violations_total == 0 {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckReport {
            check_id: self.check_id,
            oracle: self.oracle,
            status,
            cells: self.cells,
            violations_total: self.violations_total,
            violations: self.violations,
            runtime_ms: 0,
        }
    }
}

/// Re-derive both sides of a stored pointwise violation from its witness.
/// Returns `(lhs, rhs)`.
pub fn replay_violation(
    report: &CheckReport,
    v: &Violation,
    oracle: &NormOracle,
    cfg: &CheckConfig,
) -> Result<(f64, f64)> {
    pointwise::replay(&report.check_id, v, oracle, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::make_lp_norm;

    fn tiny_cfg() -> CheckConfig {
        CheckConfig {
            trials: 150,
            estimate_trials: 60,
            m_grid: vec![1, 2],
            tau_grid: vec![0.5, 1.0],
            ..CheckConfig::default()
        }
    }

    #[test]
    fn empty_oracle_list_is_empty_pass() {
        let run = run_all(&CheckConfig::default(), &[], &Suite::ALL);
        assert!(run.reports.is_empty());
        assert!(!run.any_failed());
    }

    #[test]
    fn wrong_constant_fixture_fails_with_witness() {
        let l1 = make_lp_norm(1.0).unwrap();
        let report = pointwise::check_m1_exact(&l1, &tiny_cfg(), 0.4);
        assert_eq!(report.status, Status::Fail);
        assert!(report.violations_total > 0);
        let v = &report.violations[0];
        assert!(v.witness.x.is_some());
        // replay reproduces the stored sides exactly
        let (lhs, rhs) = replay_violation(&report, v, &l1, &tiny_cfg()).unwrap();
        assert_eq!(lhs, v.lhs);
        assert_eq!(rhs, v.rhs);
    }

    #[test]
    fn suite_parsing() {
        assert_eq!(Suite::parse_list("all").unwrap().len(), 8);
        assert_eq!(
            Suite::parse_list("m1,s6").unwrap(),
            vec![Suite::M1, Suite::S6]
        );
        assert!(Suite::parse_list("bogus").is_err());
    }
}
