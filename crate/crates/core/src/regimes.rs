//! Weight-regime classification.
//!
//! Three nested regimes are recognised: equal weights `1/n`, the positive
//! simplex (`t_i > 0`, `Σ t_i = 1`) and Jensen–Steffensen weights
//! (`0 <= P_j <= P_n`, `P_n > 0`, possibly signed). Validators never reorder
//! weights; every verdict is relative to the given index order.

use serde::{Deserialize, Serialize};

use crate::sample::Tolerances;

/// Weight regime a bound was computed under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Equal,
    Simplex,
    Steffensen,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Equal => "equal",
            Regime::Simplex => "simplex",
            Regime::Steffensen => "steffensen",
        }
    }
}

impl std::str::FromStr for Regime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "equal" => Ok(Regime::Equal),
            "simplex" => Ok(Regime::Simplex),
            "steffensen" => Ok(Regime::Steffensen),
            other => Err(format!(
                "unknown regime `{other}` (expected equal, simplex or steffensen)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightCondition {
    /// `t_i > 0`
    Positive,
    /// `|Σ t_i − 1| <= eps_sum`
    SumToOne,
    /// `P_j >= 0`
    PrefixNonneg,
    /// `P_j <= P_n`
    PrefixBelowTotal,
    /// `P_n > 0`
    TotalPositive,
}

/// One failed condition. `index` is 1-based; `slack` is negative by how much it failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: WeightCondition,
    pub index: usize,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    /// `P_j = Σ_{i<=j} t_i`
    pub prefix_sums: Vec<f64>,
    /// `P̄_j = Σ_{i>=j} t_i`
    pub tail_sums: Vec<f64>,
    pub is_positive_simplex: bool,
    pub is_steffensen: bool,
    /// Failures of the condition family the report was requested for.
    pub violations: Vec<Violation>,
}

/// Conditions required of a split index `k` before the prefix bound applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitCondition {
    /// `0 <= P_j <= 1` for every `j`.
    PrefixNonneg,
    /// `P_j <= P_k` for every `j <= k`.
    PrefixDominatedByPk,
    /// `t_{k+1} > 0`, strict.
    TKplus1Positive,
    /// `0 <= Σ_{i=k+1}^{l} t_i <= Σ_{i=k+1}^{n} t_i` for `l = k+1..=n`.
    TailPartialInRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitAdmissibility {
    pub k: usize,
    pub holds: bool,
    pub failed_condition: Option<SplitCondition>,
}

/// Running prefix sums with Neumaier compensation.
pub fn prefix_sums(weights: &[f64]) -> Vec<f64> {
    running_sums(weights.iter().copied())
}

/// `P̄_j = Σ_{i=j}^{n} t_i` for `j = 1..=n`.
pub fn tail_sums(weights: &[f64]) -> Vec<f64> {
    let mut tails = running_sums(weights.iter().rev().copied());
    tails.reverse();
    tails
}

fn running_sums(terms: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    terms
        .map(|term| {
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            sum + comp
        })
        .collect()
}

fn base_report(weights: &[f64], tol: &Tolerances) -> RegimeReport {
    let prefix = prefix_sums(weights);
    let tails = tail_sums(weights);
    let positive_simplex = simplex_violations(weights, &prefix, tol).is_empty();
    let steffensen = steffensen_violations(&prefix, tol).is_empty();
    RegimeReport {
        prefix_sums: prefix,
        tail_sums: tails,
        is_positive_simplex: positive_simplex,
        is_steffensen: steffensen,
        violations: Vec::new(),
    }
}

fn simplex_violations(weights: &[f64], prefix: &[f64], tol: &Tolerances) -> Vec<Violation> {
    let mut out: Vec<Violation> = weights
        .iter()
        .enumerate()
        .filter(|(_, &t)| t <= 0.0)
        .map(|(i, &t)| Violation {
            condition: WeightCondition::Positive,
            index: i + 1,
            slack: t,
        })
        .collect();
    let total = prefix.last().copied().unwrap_or(0.0);
    let miss = (total - 1.0).abs();
    if miss > tol.eps_sum {
        out.push(Violation {
            condition: WeightCondition::SumToOne,
            index: prefix.len(),
            slack: -miss,
        });
    }
    out
}

fn steffensen_violations(prefix: &[f64], tol: &Tolerances) -> Vec<Violation> {
    let total = prefix.last().copied().unwrap_or(0.0);
    let mut out = Vec::new();
    for (i, &p) in prefix.iter().enumerate() {
        if p < -tol.eps_sum {
            out.push(Violation {
                condition: WeightCondition::PrefixNonneg,
                index: i + 1,
                slack: p,
            });
        }
        if p > total + tol.eps_sum {
            out.push(Violation {
                condition: WeightCondition::PrefixBelowTotal,
                index: i + 1,
                slack: total - p,
            });
        }
    }
    if !(total > 0.0) {
        out.push(Violation {
            condition: WeightCondition::TotalPositive,
            index: prefix.len(),
            slack: total,
        });
    }
    out
}

/// Every `t_i > 0` and `Σ t_i = 1` within `eps_sum`.
pub fn validate_positive_simplex(weights: &[f64], tol: &Tolerances) -> RegimeReport {
    let mut report = base_report(weights, tol);
    report.violations = simplex_violations(weights, &report.prefix_sums, tol);
    report
}

/// `0 <= P_j <= P_n` for all `j` and `P_n > 0`.
pub fn validate_steffensen(weights: &[f64], tol: &Tolerances) -> RegimeReport {
    let mut report = base_report(weights, tol);
    report.violations = steffensen_violations(&report.prefix_sums, tol);
    report
}

/// All weights equal to `1/n` within `eps_sum`.
pub fn is_equal_weights(weights: &[f64], tol: &Tolerances) -> bool {
    let target = 1.0 / weights.len().max(1) as f64;
    weights.iter().all(|t| (t - target).abs() <= tol.eps_sum)
}

/// Narrowest regime the weights belong to, if any.
pub fn detect_regime(weights: &[f64], tol: &Tolerances) -> Option<Regime> {
    let report = base_report(weights, tol);
    if report.is_positive_simplex {
        if is_equal_weights(weights, tol) {
            Some(Regime::Equal)
        } else {
            Some(Regime::Simplex)
        }
    } else if report.is_steffensen {
        Some(Regime::Steffensen)
    } else {
        None
    }
}

/// Evaluates every split `k = 1..n-1` against the admissibility conditions,
/// reporting the first failing condition for each.
pub fn admissible_split_indices(weights: &[f64], tol: &Tolerances) -> Vec<SplitAdmissibility> {
    let n = weights.len();
    let prefix = prefix_sums(weights);
    let eps = tol.eps_sum;
    let globally_bounded = prefix.iter().all(|&p| p >= -eps && p <= 1.0 + eps);

    (1..n)
        .map(|k| {
            let pk = prefix[k - 1];
            let tail_total = 1.0 - pk;
            let failed = if !globally_bounded {
                Some(SplitCondition::PrefixNonneg)
            } else if prefix[..k].iter().any(|&p| p > pk + eps) {
                Some(SplitCondition::PrefixDominatedByPk)
            } else if !(weights[k] > 0.0) {
                Some(SplitCondition::TKplus1Positive)
            } else if prefix[k..].iter().any(|&pl| {
                let partial = pl - pk;
                partial < -eps || partial > tail_total + eps
            }) {
                Some(SplitCondition::TailPartialInRange)
            } else {
                None
            };
            SplitAdmissibility {
                k,
                holds: failed.is_none(),
                failed_condition: failed,
            }
        })
        .collect()
}

/// Indices `k` for which every split condition holds.
pub fn admissible_ks(weights: &[f64], tol: &Tolerances) -> Vec<usize> {
    admissible_split_indices(weights, tol)
        .into_iter()
        .filter(|s| s.holds)
        .map(|s| s.k)
        .collect()
}
