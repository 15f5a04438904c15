//! Brute-force verification of every applicable bound on a dataset, and a
//! seeded fuzzer that hunts for near-equality cases.
//!
//! Left-hand sides are computed here by direct scans over the data and never
//! through the bound code under test; right-hand sides come from
//! [`crate::bounds`].

use rand::distributions::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{LogNormal, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, Chain};
use crate::classes::{make_power_function, ModulusSpec};
use crate::error::{Error, Result};
use crate::regimes::{self, Regime};
use crate::sample::{Tolerances, WeightedSample, Window};

pub const SCHEMA_VERSION: u32 = 1;

/// Which inequality a check row exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `max |x_k − a| <= sqrt((n−1)(b − a²))`
    Samuelson,
    /// `max |x_k − a| <= T (c − a^p)^{1/p}`
    WeightedPower,
    /// `max |x_k − a| <= T (Σ α |x − a|^p)^{1/p}`
    UniformConvexMoment,
    /// `max |x_k − a| <= T m^{−1/p} (c − f(a))^{1/p}` with `f = x^p`
    UniformConvexGap,
    /// `max Φ(|x_k − a|) <= factor · (d − f(a))` with `f = Φ = x^{2r}`
    ModulusGap,
    /// `max |x_k − a| <= Φ^{-1}(factor · (d − f(a)))`
    ModulusInverted,
    /// `|x_{k,j} − x̄| <=` window bound, positive weights.
    Window,
    /// `|x_{1,k} − x̄| <=` prefix bound at an admissible split.
    PrefixSplit,
    /// `Σ t |x − x̄|^{2r} <= Σ t x^{2r} − x̄^{2r}`, positive weights.
    SuperquadraticJensen,
    /// The same numerator ordering under Jensen–Steffensen weights and monotone data.
    SuperquadraticJensenSteffensen,
}

impl Inequality {
    /// Rows that compare a deviation against its bound, as opposed to rows
    /// comparing two numerators. Only these feed the tightness ratio.
    pub fn is_deviation(&self) -> bool {
        !matches!(
            self,
            Inequality::SuperquadraticJensen | Inequality::SuperquadraticJensenSteffensen
        )
    }

    /// Point bounds are parametrised by `p = 2r` rather than `r`.
    pub fn takes_p(&self) -> bool {
        matches!(
            self,
            Inequality::Samuelson
                | Inequality::WeightedPower
                | Inequality::UniformConvexMoment
                | Inequality::UniformConvexGap
        )
    }
}

/// One labelled inequality instance on a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub inequality: Inequality,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    /// `r` for window, prefix and Jensen rows; `p` for point bounds.
    pub r_or_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckRow {
    pub inequality: Inequality,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub r_or_p: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub pass: bool,
}

impl CheckRow {
    fn spec(&self) -> CheckSpec {
        CheckSpec {
            inequality: self.inequality,
            window: self.window,
            k: self.k,
            r_or_p: self.r_or_p,
        }
    }

    /// `lhs / rhs`, or `None` when the right side is too small to be informative.
    pub fn tightness(&self, tol: &Tolerances) -> Option<f64> {
        (self.rhs > tol.eps_ineq_abs).then(|| self.lhs / self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub n: usize,
    pub regime: Option<Regime>,
    pub r_set: Vec<f64>,
    pub checks: Vec<CheckRow>,
    pub all_pass: bool,
    pub worst_slack: Option<f64>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Serialized counterexample or tightest case; readable back by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub window: Option<Window>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    pub r: f64,
    pub inequality: Inequality,
    pub lhs: f64,
    pub rhs: f64,
}

impl Witness {
    fn new(sample: &WeightedSample, row: &CheckRow) -> Self {
        Self {
            values: sample.values().to_vec(),
            weights: sample.weights().to_vec(),
            window: row.window,
            k: row.k,
            r: if row.inequality.takes_p() {
                row.r_or_p / 2.0
            } else {
                row.r_or_p
            },
            inequality: row.inequality,
            lhs: row.lhs,
            rhs: row.rhs,
        }
    }

    pub fn sample(&self, eps_sum: f64) -> Result<WeightedSample> {
        WeightedSample::with_tolerance(self.values.clone(), self.weights.clone(), eps_sum)
    }
}

/// `(max_k |x_k − x̄|, argmax)` with a 1-based index; ties go to the first index.
pub fn exact_max_deviation(sample: &WeightedSample) -> (f64, usize) {
    let mean = sample.weighted_mean();
    let mut best = (f64::NEG_INFINITY, 0);
    for (i, x) in sample.values().iter().enumerate() {
        let d = (x - mean).abs();
        if d > best.0 {
            best = (d, i + 1);
        }
    }
    best
}

/// Facts about the data that decide which checks apply.
struct DataFacts {
    nonneg: bool,
    positive: bool,
    sorted_up: bool,
    monotone: bool,
}

impl DataFacts {
    fn of(sample: &WeightedSample, tol: &Tolerances) -> Self {
        let xs = sample.values();
        let mean = sample.weighted_mean();
        let ys: Vec<f64> = xs.iter().map(|x| x - mean).collect();
        let sorted_up = ys.windows(2).all(|w| w[1] >= w[0] - tol.eps_ineq_abs);
        let sorted_down = xs.windows(2).all(|w| w[1] <= w[0]);
        Self {
            nonneg: xs.iter().all(|&x| x >= 0.0),
            positive: xs.iter().all(|&x| x > 0.0),
            sorted_up,
            monotone: sorted_up || sorted_down,
        }
    }
}

fn check_r_set(r_set: &[f64]) -> Result<()> {
    if r_set.is_empty() {
        return Err(Error::Config("r set is empty".into()));
    }
    match r_set.iter().find(|r| !(**r >= 1.0 && r.is_finite())) {
        Some(r) => Err(Error::Config(format!(
            "every r must be at least 1, got {r}"
        ))),
        None => Ok(()),
    }
}

/// Enumerates every check whose hypotheses hold for this dataset.
pub fn applicable_checks(
    sample: &WeightedSample,
    r_set: &[f64],
    tol: &Tolerances,
) -> Vec<CheckSpec> {
    let weights = sample.weights();
    let regime = regimes::detect_regime(weights, tol);
    let facts = DataFacts::of(sample, tol);
    let n = sample.len();
    let mut specs = Vec::new();
    let point = |inequality, r_or_p| CheckSpec {
        inequality,
        window: None,
        k: None,
        r_or_p,
    };

    let simplex = matches!(regime, Some(Regime::Equal | Regime::Simplex));
    if regime == Some(Regime::Equal) {
        specs.push(point(Inequality::Samuelson, 2.0));
    }
    for &r in r_set {
        let p = 2.0 * r;
        if simplex {
            if facts.positive {
                specs.push(point(Inequality::WeightedPower, p));
            }
            specs.push(point(Inequality::UniformConvexMoment, p));
            if facts.nonneg {
                specs.push(point(Inequality::UniformConvexGap, p));
                specs.push(point(Inequality::SuperquadraticJensen, r));
            }
            if regime == Some(Regime::Equal) && facts.nonneg {
                specs.push(point(Inequality::ModulusGap, r));
                specs.push(point(Inequality::ModulusInverted, r));
            }
            for w in Window::all(n) {
                let mass: f64 = weights[w.range()].iter().sum();
                if mass > tol.eps_sum {
                    specs.push(CheckSpec {
                        inequality: Inequality::Window,
                        window: Some(w),
                        k: None,
                        r_or_p: r,
                    });
                }
            }
        } else if regime == Some(Regime::Steffensen) && facts.nonneg && facts.monotone {
            specs.push(point(Inequality::SuperquadraticJensenSteffensen, r));
        }
    }
    if regime.is_some() && facts.sorted_up {
        let ks = regimes::admissible_ks(weights, tol);
        for &r in r_set {
            for &k in &ks {
                let head: f64 = weights[..k].iter().sum();
                if head > tol.eps_sum {
                    specs.push(CheckSpec {
                        inequality: Inequality::PrefixSplit,
                        window: Some(Window { k: 1, j: k }),
                        k: Some(k),
                        r_or_p: r,
                    });
                }
            }
        }
    }
    specs
}

fn plain_mean(sample: &WeightedSample) -> f64 {
    sample
        .values()
        .iter()
        .zip(sample.weights())
        .map(|(x, t)| t * x)
        .sum()
}

/// `|Σ_{window} t_i (x_i − x̄) / Σ_{window} t_i|` by direct summation.
fn window_deviation(sample: &WeightedSample, w: Window) -> f64 {
    let mean = plain_mean(sample);
    let xs = &sample.values()[w.range()];
    let ts = &sample.weights()[w.range()];
    let mass: f64 = ts.iter().sum();
    let moment: f64 = xs.iter().zip(ts).map(|(x, t)| t * (x - mean)).sum();
    (moment / mass).abs()
}

/// Evaluates one check. Returns `None` when a value-dependent hypothesis
/// (sign or order of the data) no longer holds; weight hypotheses are taken
/// as established by [`applicable_checks`].
pub fn evaluate_check(
    sample: &WeightedSample,
    spec: &CheckSpec,
    tol: &Tolerances,
) -> Option<CheckRow> {
    let facts = DataFacts::of(sample, tol);
    let param = spec.r_or_p;
    let (lhs, rhs) = match spec.inequality {
        Inequality::Samuelson => (
            exact_max_deviation(sample).0,
            bounds::samuelson_bound(sample, tol).ok()?.bound,
        ),
        Inequality::WeightedPower => {
            if !facts.positive {
                return None;
            }
            (
                exact_max_deviation(sample).0,
                bounds::weighted_power_bound(sample, param, tol).ok()?.bound,
            )
        }
        Inequality::UniformConvexMoment | Inequality::UniformConvexGap => {
            let rhs = if spec.inequality == Inequality::UniformConvexGap {
                if !facts.nonneg {
                    return None;
                }
                let f = make_power_function(param, 1.0).ok()?;
                bounds::uniform_convex_pair_unchecked(sample, &f, 1.0, param, tol)
                    .ok()?
                    .gap
                    .bound
            } else {
                bounds::uniform_convex_moment_bound(sample, param, tol)
                    .ok()?
                    .bound
            };
            (exact_max_deviation(sample).0, rhs)
        }
        Inequality::ModulusGap | Inequality::ModulusInverted => {
            if !facts.nonneg {
                return None;
            }
            let two_r = 2.0 * param;
            let f = make_power_function(two_r, 1.0).ok()?;
            let phi = ModulusSpec::power(1.0, two_r).ok()?;
            let report = bounds::modulus_gap_bound(sample, &f, &phi, tol).ok()?;
            let (dev, _) = exact_max_deviation(sample);
            if spec.inequality == Inequality::ModulusGap {
                (phi.eval(dev), report.report.bound)
            } else {
                (dev, report.inverted_bound?)
            }
        }
        Inequality::Window => {
            let w = spec.window?;
            let report =
                bounds::window_bound(sample, w, param, Chain::RawMoment, None, tol).ok()?;
            (window_deviation(sample, w), report.bound)
        }
        Inequality::PrefixSplit => {
            if !facts.sorted_up {
                return None;
            }
            let k = spec.k?;
            let report = bounds::js_prefix_bound(sample, k, param, tol).ok()?;
            (
                window_deviation(sample, Window { k: 1, j: k }),
                report.bound,
            )
        }
        Inequality::SuperquadraticJensen | Inequality::SuperquadraticJensenSteffensen => {
            if !facts.nonneg
                || (spec.inequality == Inequality::SuperquadraticJensenSteffensen
                    && !facts.monotone)
            {
                return None;
            }
            let two_r = 2.0 * param;
            let mean = plain_mean(sample);
            let pairs = sample.values().iter().zip(sample.weights());
            let lhs: f64 = pairs
                .clone()
                .map(|(x, t)| t * (x - mean).abs().powf(two_r))
                .sum();
            let rhs: f64 = pairs.map(|(x, t)| t * x.powf(two_r)).sum::<f64>() - mean.powf(two_r);
            (lhs, rhs)
        }
    };
    let slack = rhs - lhs;
    Some(CheckRow {
        inequality: spec.inequality,
        window: spec.window,
        k: spec.k,
        r_or_p: param,
        lhs,
        rhs,
        slack,
        pass: slack >= -tol.slack_allowance(rhs),
    })
}

/// Runs every applicable check for every `r` in `r_set`.
pub fn verify_dataset(
    sample: &WeightedSample,
    r_set: &[f64],
    tol: &Tolerances,
) -> Result<VerificationReport> {
    check_r_set(r_set)?;
    let specs = applicable_checks(sample, r_set, tol);
    let checks: Vec<CheckRow> = specs
        .iter()
        .filter_map(|spec| evaluate_check(sample, spec, tol))
        .collect();
    let worst_slack = checks.iter().map(|c| c.slack).reduce(f64::min);
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        n: sample.len(),
        regime: regimes::detect_regime(sample.weights(), tol),
        r_set: r_set.to_vec(),
        all_pass: checks.iter().all(|c| c.pass),
        checks,
        worst_slack,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueDistribution {
    /// `U[0, 10)`
    Uniform,
    /// Log-normal with `σ = 1.5`.
    HeavyTail,
    /// Two or three tight clusters in `[1, 10)`.
    Clustered,
}

impl std::str::FromStr for ValueDistribution {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "heavy_tail" => Ok(Self::HeavyTail),
            "clustered" => Ok(Self::Clustered),
            other => Err(format!(
                "unknown distribution `{other}` (expected uniform, heavy_tail or clustered)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub master_seed: u64,
    pub trials: usize,
    pub n_range: (usize, usize),
    pub r_set: Vec<f64>,
    pub regime: Regime,
    pub value_distribution: ValueDistribution,
    pub hill_climb_steps: usize,
    pub tolerances: Tolerances,
}

impl Default for FuzzConfig {
    fn default() -> Self {
        Self {
            master_seed: 0,
            trials: 100,
            n_range: (2, 12),
            r_set: vec![1.0, 2.0],
            regime: Regime::Simplex,
            value_distribution: ValueDistribution::Uniform,
            hill_climb_steps: 20,
            tolerances: Tolerances::default(),
        }
    }
}

impl FuzzConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        let (lo, hi) = self.n_range;
        if lo < 2 || hi > 64 || lo > hi {
            return Err(Error::Config(format!(
                "n range must satisfy 2 <= min <= max <= 64, got ({lo}, {hi})"
            )));
        }
        check_r_set(&self.r_set)?;
        self.tolerances.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialWitness {
    pub trial: usize,
    pub witness: Witness,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzReport {
    pub schema_version: u32,
    pub config: FuzzConfig,
    /// Max of `lhs / rhs` over deviation rows with `rhs > eps_ineq_abs`.
    pub best_tightness: f64,
    pub tightest_trial: Option<usize>,
    pub tightest_witness: Option<Witness>,
    pub violations: Vec<TrialWitness>,
}

/// Weight vector of length `n` for the regime.
///
/// Jensen–Steffensen weights come from prefix sums drawn in `[0, 1]` with
/// `P_n = 1`, differenced; every prefix stays in `[0, 1]` by construction.
pub fn generate_weights(
    rng: &mut impl Rng,
    n: usize,
    regime: Regime,
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    match regime {
        Regime::Equal => Ok(vec![1.0 / n as f64; n]),
        Regime::Simplex => {
            let raw: Vec<f64> = (0..n)
                .map(|_| -(1.0 - rng.gen::<f64>()).ln() + 1e-6)
                .collect();
            let total: f64 = raw.iter().sum();
            Ok(raw.iter().map(|w| w / total).collect())
        }
        Regime::Steffensen => {
            for _ in 0..100 {
                let prefix: Vec<f64> = (0..n - 1).map(|_| rng.gen::<f64>()).chain([1.0]).collect();
                let weights: Vec<f64> = prefix
                    .iter()
                    .scan(0.0, |prev, &p| {
                        let t = p - *prev;
                        *prev = p;
                        Some(t)
                    })
                    .collect();
                let total: f64 = weights.iter().sum();
                if (total - 1.0).abs() <= tol.eps_sum
                    && regimes::validate_steffensen(&weights, tol).is_steffensen
                {
                    return Ok(weights);
                }
            }
            Err(Error::Config(
                "could not draw Jensen–Steffensen weights".into(),
            ))
        }
    }
}

pub fn generate_values(rng: &mut impl Rng, n: usize, dist: ValueDistribution) -> Vec<f64> {
    match dist {
        ValueDistribution::Uniform => (0..n).map(|_| rng.gen_range(0.0..10.0)).collect(),
        ValueDistribution::HeavyTail => {
            let d = LogNormal::new(0.0, 1.5).expect("valid parameters");
            (0..n).map(|_| d.sample(rng)).collect()
        }
        ValueDistribution::Clustered => {
            let count = rng.gen_range(2..=3);
            let centers: Vec<f64> = (0..count).map(|_| rng.gen_range(1.0..10.0)).collect();
            let noise = Normal::new(0.0, 0.05).expect("valid parameters");
            (0..n)
                .map(|_| (centers[rng.gen_range(0..count)] + noise.sample(rng)).abs())
                .collect()
        }
    }
}

struct TrialOutcome {
    best: Option<(f64, Witness)>,
    violations: Vec<Witness>,
}

fn trial_rng(master_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial as u64);
    rng
}

fn run_trial(config: &FuzzConfig, trial: usize) -> Result<TrialOutcome> {
    let tol = &config.tolerances;
    let mut rng = trial_rng(config.master_seed, trial);
    let n = rng.gen_range(config.n_range.0..=config.n_range.1);
    let weights = generate_weights(&mut rng, n, config.regime, tol)?;
    let mut values = generate_values(&mut rng, n, config.value_distribution);
    let sorted = config.regime == Regime::Steffensen;
    if sorted {
        values.sort_by(f64::total_cmp);
    }
    let sample = WeightedSample::with_tolerance(values, weights, tol.eps_sum)?;

    let report = verify_dataset(&sample, &config.r_set, tol)?;
    let mut violations: Vec<Witness> = report
        .failures()
        .map(|row| Witness::new(&sample, row))
        .collect();

    let tightest = report
        .checks
        .iter()
        .filter(|c| c.inequality.is_deviation())
        .filter_map(|c| c.tightness(tol).map(|t| (t, c)))
        .fold(None, |acc: Option<(f64, &CheckRow)>, (t, c)| match acc {
            Some((best, _)) if best >= t => acc,
            _ => Some((t, c)),
        });

    let best = match tightest {
        None => None,
        Some((ratio, row)) => {
            let (ratio, sample, row) = hill_climb(
                &sample,
                row.spec(),
                ratio,
                *row,
                sorted,
                config,
                &mut violations,
            );
            Some((ratio, Witness::new(&sample, &row)))
        }
    };
    Ok(TrialOutcome { best, violations })
}

/// Coordinate hill-climbing on the values toward `lhs / rhs = 1` for one check.
/// Step size starts at a quarter of the data range and halves every round.
fn hill_climb(
    start: &WeightedSample,
    spec: CheckSpec,
    start_ratio: f64,
    start_row: CheckRow,
    keep_sorted: bool,
    config: &FuzzConfig,
    violations: &mut Vec<Witness>,
) -> (f64, WeightedSample, CheckRow) {
    let tol = &config.tolerances;
    let mut current = start.clone();
    let mut best = (start_ratio, start_row);
    let xs = start.values();
    let range = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - xs.iter().copied().fold(f64::INFINITY, f64::min);
    let mut step = if range > 0.0 { 0.25 * range } else { 0.25 };

    for _ in 0..config.hill_climb_steps {
        for i in 0..current.len() {
            for sign in [1.0, -1.0] {
                let mut values = current.values().to_vec();
                values[i] += sign * step;
                if keep_sorted && !values.windows(2).all(|w| w[0] <= w[1]) {
                    continue;
                }
                let Ok(candidate) = current.with_values(values) else {
                    continue;
                };
                let Some(row) = evaluate_check(&candidate, &spec, tol) else {
                    continue;
                };
                if !row.pass {
                    violations.push(Witness::new(&candidate, &row));
                }
                if let Some(ratio) = row.tightness(tol) {
                    if ratio > best.0 {
                        best = (ratio, row);
                        current = candidate;
                    }
                }
            }
        }
        step *= 0.5;
    }
    (best.0, current, best.1)
}

/// Seeded tightness search. Trials run in parallel; each has its own
/// ChaCha stream derived from the master seed and the trial index, and the
/// reduction is done in trial order, so reports do not depend on scheduling.
pub fn fuzz_tightness(config: &FuzzConfig) -> Result<FuzzReport> {
    config.validate()?;
    let outcomes: Vec<Result<TrialOutcome>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| run_trial(config, trial))
        .collect();

    let mut best_tightness = 0.0_f64;
    let mut tightest: Option<(usize, Witness)> = None;
    let mut violations = Vec::new();
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let outcome = outcome?;
        if let Some((ratio, witness)) = outcome.best {
            if tightest.is_none() || ratio > best_tightness {
                best_tightness = ratio;
                tightest = Some((trial, witness));
            }
        }
        violations.extend(
            outcome
                .violations
                .into_iter()
                .map(|witness| TrialWitness { trial, witness }),
        );
    }

    Ok(FuzzReport {
        schema_version: SCHEMA_VERSION,
        config: config.clone(),
        best_tightness,
        tightest_trial: tightest.as_ref().map(|(t, _)| *t),
        tightest_witness: tightest.map(|(_, w)| w),
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn signed_fixture() -> WeightedSample {
        WeightedSample::new(
            vec![-6.5, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![0.5, -0.5, 0.5, 0.25, -0.25, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn max_deviation_examples() {
        let s = WeightedSample::equal_weights(vec![0.0, 0.0, 3.0]).unwrap();
        let (d, i) = exact_max_deviation(&s);
        assert!((d - 2.0).abs() < 1e-15);
        assert_eq!(i, 3);
        assert_eq!(
            exact_max_deviation(&WeightedSample::equal_weights(vec![5.0; 4]).unwrap()),
            (0.0, 1)
        );
        let (d, i) =
            exact_max_deviation(&WeightedSample::equal_weights(vec![1.0, 2.0, 3.0]).unwrap());
        assert_eq!((d, i), (1.0, 1));
    }

    #[test]
    fn verify_signed_fixture() {
        let report = verify_dataset(&signed_fixture(), &[1.0, 2.0], &tol()).unwrap();
        assert!(report.all_pass);
        assert_eq!(report.regime, Some(Regime::Steffensen));
        let row = report
            .checks
            .iter()
            .find(|c| c.inequality == Inequality::PrefixSplit && c.k == Some(3) && c.r_or_p == 1.0)
            .unwrap();
        assert!((row.lhs - 5.5).abs() < 1e-12);
        assert!((row.rhs - 39.375f64.sqrt()).abs() < 1e-12);
        // The signed fixture has negative data, so no Jensen-gap rows
        assert!(report
            .checks
            .iter()
            .all(|c| c.inequality == Inequality::PrefixSplit));
    }

    #[test]
    fn verify_random_simplex_sample() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let weights = generate_weights(&mut rng, 8, Regime::Simplex, &tol()).unwrap();
        let values = generate_values(&mut rng, 8, ValueDistribution::Uniform);
        let s = WeightedSample::new(values, weights).unwrap();
        let report = verify_dataset(&s, &[1.0, 2.0], &tol()).unwrap();
        assert!(report.all_pass);
        let windows = report
            .checks
            .iter()
            .filter(|c| c.inequality == Inequality::Window)
            .count();
        assert_eq!(windows, 2 * 36);
    }

    #[test]
    fn verify_constant_sample() {
        let s = WeightedSample::equal_weights(vec![3.0; 5]).unwrap();
        let report = verify_dataset(&s, &[1.0, 2.0, 3.0], &tol()).unwrap();
        assert!(report.all_pass);
        assert!(!report.checks.is_empty());
        for c in &report.checks {
            assert!(c.lhs.abs() < 1e-12, "{c:?}");
            assert!(c.rhs >= -1e-12, "{c:?}");
        }
    }

    #[test]
    fn equal_weights_cover_point_bounds() {
        let s = WeightedSample::equal_weights(vec![1.0, 4.0, 2.0, 8.0]).unwrap();
        let report = verify_dataset(&s, &[1.0, 2.0], &tol()).unwrap();
        assert!(report.all_pass);
        for ineq in [
            Inequality::Samuelson,
            Inequality::WeightedPower,
            Inequality::UniformConvexMoment,
            Inequality::UniformConvexGap,
            Inequality::ModulusGap,
            Inequality::ModulusInverted,
            Inequality::SuperquadraticJensen,
        ] {
            assert!(
                report.checks.iter().any(|c| c.inequality == ineq),
                "{ineq:?}"
            );
        }
    }

    #[test]
    fn verify_is_deterministic() {
        let s = signed_fixture();
        let a = serde_json::to_string(&verify_dataset(&s, &[1.0, 1.5], &tol()).unwrap()).unwrap();
        let b = serde_json::to_string(&verify_dataset(&s, &[1.0, 1.5], &tol()).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn failing_rows_are_flagged() {
        let s = WeightedSample::equal_weights(vec![0.0, 0.0, 3.0]).unwrap();
        let spec = CheckSpec {
            inequality: Inequality::Samuelson,
            window: None,
            k: None,
            r_or_p: 2.0,
        };
        let row = evaluate_check(&s, &spec, &tol()).unwrap();
        assert!(row.pass);
        assert!(row.slack.abs() < 1e-12);
        let strict = Tolerances::new(1e-9, 1e-300, 1e-300).unwrap();
        let shifted = s.map_values(|x| x * (1.0 + 1e-9));
        assert!(evaluate_check(&shifted, &spec, &strict).is_some());
    }

    #[test]
    fn witness_round_trips_through_json() {
        let report = verify_dataset(&signed_fixture(), &[1.0], &tol()).unwrap();
        let w = Witness::new(&signed_fixture(), &report.checks[0]);
        let text = serde_json::to_string(&w).unwrap();
        let back: Witness = serde_json::from_str(&text).unwrap();
        assert_eq!(back, w);
        assert_eq!(back.sample(1e-9).unwrap(), signed_fixture());
    }

    #[test]
    fn steffensen_generator_self_check() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 2..40 {
            for _ in 0..50 {
                let w = generate_weights(&mut rng, n, Regime::Steffensen, &tol()).unwrap();
                assert!(regimes::validate_steffensen(&w, &tol()).is_steffensen);
            }
        }
    }

    #[test]
    fn fuzz_config_validation() {
        let bad = FuzzConfig {
            trials: 0,
            ..FuzzConfig::default()
        };
        assert!(matches!(fuzz_tightness(&bad), Err(Error::Config(_))));
        let bad = FuzzConfig {
            n_range: (1, 5),
            ..FuzzConfig::default()
        };
        assert!(matches!(fuzz_tightness(&bad), Err(Error::Config(_))));
        let bad = FuzzConfig {
            r_set: vec![0.5],
            ..FuzzConfig::default()
        };
        assert!(matches!(fuzz_tightness(&bad), Err(Error::Config(_))));
    }

    #[test]
    fn fuzz_small_simplex_reaches_equality() {
        let config = FuzzConfig {
            master_seed: 7,
            trials: 50,
            n_range: (2, 3),
            r_set: vec![1.0],
            ..FuzzConfig::default()
        };
        let report = fuzz_tightness(&config).unwrap();
        assert!(report.violations.is_empty());
        assert!(report.best_tightness >= 0.999);
        assert!(report.best_tightness <= 1.0 + config.tolerances.eps_ineq_rel);
    }

    #[test]
    fn fuzz_is_reproducible() {
        let config = FuzzConfig {
            master_seed: 42,
            trials: 40,
            regime: Regime::Steffensen,
            value_distribution: ValueDistribution::HeavyTail,
            ..FuzzConfig::default()
        };
        let a = serde_json::to_string(&fuzz_tightness(&config).unwrap()).unwrap();
        let b = serde_json::to_string(&fuzz_tightness(&config).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn fuzz_regimes_find_no_violations() {
        for regime in [Regime::Equal, Regime::Simplex, Regime::Steffensen] {
            for dist in [
                ValueDistribution::Uniform,
                ValueDistribution::HeavyTail,
                ValueDistribution::Clustered,
            ] {
                let config = FuzzConfig {
                    master_seed: 5,
                    trials: 30,
                    regime,
                    value_distribution: dist,
                    r_set: vec![1.0, 1.5, 3.0],
                    ..FuzzConfig::default()
                };
                let report = fuzz_tightness(&config).unwrap();
                assert!(
                    report.violations.is_empty(),
                    "{regime:?} {dist:?}: {:?}",
                    report.violations.first()
                );
            }
        }
    }
}
