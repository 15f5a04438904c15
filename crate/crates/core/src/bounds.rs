//! Certified deviation bounds.
//!
//! Point bounds control `max_k |x_k − a|`: the Samuelson bound for equal
//! weights, the weighted `p`-th moment bound with constant `T`, the
//! uniformly-convex gap bound and the submultiplicative-modulus bound.
//! Window bounds control `|x_{k,j} − x̄|` for contiguous blocks, either under
//! positive weights (any window) or under Jensen–Steffensen weights (prefix
//! windows at admissible split indices).
//!
//! Every window bound has the shape `(N / D)^{1/2r}` with
//! `D = S + S^{2r} (1 − S)^{1−2r}`, `S` the window mass; the numerator `N` is
//! the central moment or one of the Jensen gaps that dominate it.

use serde::{Serialize, Serializer};

use crate::classes::{FunctionSpec, ModulusSpec};
use crate::error::{Error, Result};
use crate::regimes::{self, Regime};
use crate::sample::{
    self, center, function_mean, jensen_gap, power_jensen_gap, scaled_abs_moment, weighted_mean,
    weighted_power_sum, window_mass, Tolerances, WeightedSample, Window,
};
use crate::summation::compensated_sum;

/// Numerator source for a window bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Chain {
    /// `Σ t_i |x_i − x̄|^{2r}`
    RawMoment,
    /// `Σ t_i x_i^{2r} − x̄^{2r}`, nonnegative data only.
    PowerJensenGap,
    /// `Σ t_i f(x_i) − f(x̄)`
    FunctionGap,
}

impl std::str::FromStr for Chain {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "raw_moment" => Ok(Chain::RawMoment),
            "power_jensen_gap" => Ok(Chain::PowerJensenGap),
            "function_gap" => Ok(Chain::FunctionGap),
            other => Err(format!(
                "unknown chain `{other}` (expected raw_moment, power_jensen_gap or function_gap)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Samuelson,
    WeightedPower,
    UniformConvexMoment,
    UniformConvexGap,
    ModulusGap,
    Window,
    PrefixSplit,
}

fn serialize_extended<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v > 0.0 {
        s.serialize_str("+inf")
    } else if *v < 0.0 {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("nan")
    }
}

/// A computed bound and the pieces it was assembled from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub bound: f64,
    pub numerator: f64,
    /// `+inf` when the full-window rule short-circuited the bound to 0.
    #[serde(serialize_with = "serialize_extended")]
    pub denominator: f64,
    pub regime: Regime,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
    pub r_or_p: f64,
    pub window_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha0: Option<f64>,
    pub chain: Chain,
}

/// Both sides of the uniformly-convex bound: `moment <= gap`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapBoundPair {
    pub moment: BoundReport,
    pub gap: BoundReport,
}

/// Bound on `max_k Φ(|x_k − a|)` plus the derived bound on `max_k |x_k − a|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusGapReport {
    pub report: BoundReport,
    pub factor: f64,
    /// `factor · (1/n) Σ Φ(|x_i − a|)`, sits between the deviation and the bound.
    pub mid_bound: f64,
    /// `Φ^{-1}(bound)`, when the modulus can be inverted.
    pub inverted_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub j: usize,
    pub prefix_mean: f64,
    pub bound: f64,
}

const INVERSION_ITERATIONS: u32 = 60;

fn require_equal_weights(sample: &WeightedSample, tol: &Tolerances, what: &str) -> Result<()> {
    if regimes::is_equal_weights(sample.weights(), tol) {
        Ok(())
    } else {
        Err(Error::Regime(format!("{what} requires equal weights 1/n")))
    }
}

fn require_positive_simplex(sample: &WeightedSample, tol: &Tolerances, what: &str) -> Result<()> {
    let report = regimes::validate_positive_simplex(sample.weights(), tol);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(Error::Regime(format!(
            "{what} requires t_i > 0 summing to 1: row {} ({:?}, {})",
            v.index, v.condition, v.slack
        ))),
    }
}

/// Clamps a difference that should be nonnegative: tiny negatives become 0,
/// larger ones mean the hypothesis behind it is false.
fn clamp_gap(gap: f64, scale: f64, tol: &Tolerances, what: &str) -> Result<f64> {
    if gap >= 0.0 {
        Ok(gap)
    } else if gap >= -(tol.eps_ineq_abs + tol.eps_ineq_rel * scale.abs()) {
        Ok(0.0)
    } else {
        Err(Error::Domain(format!("{what} is negative ({gap})")))
    }
}

/// `T = (1−α)^{1−1/p} / (α^{1/p} (α^{p−1} + (1−α)^{p−1})^{1/p})`.
pub fn t_constant(alpha0: f64, p: f64) -> Result<f64> {
    if !(alpha0 > 0.0 && alpha0 < 1.0) {
        return Err(Error::Domain(format!(
            "alpha0 must lie in (0, 1), got {alpha0}"
        )));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("p must be at least 1, got {p}")));
    }
    let rest = 1.0 - alpha0;
    Ok(rest.powf(1.0 - 1.0 / p)
        / (alpha0.powf(1.0 / p) * (alpha0.powf(p - 1.0) + rest.powf(p - 1.0)).powf(1.0 / p)))
}

fn min_weight(sample: &WeightedSample) -> f64 {
    sample
        .weights()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `sqrt((n−1)(b − a²))` for equal weights.
pub fn samuelson_bound(sample: &WeightedSample, tol: &Tolerances) -> Result<BoundReport> {
    require_equal_weights(sample, tol, "samuelson bound")?;
    let n = sample.len() as f64;
    // b − a² evaluated as the mean squared deviation
    let spread = compensated_sum(center(sample).deviations().iter().map(|y| y * y)) / n;
    Ok(BoundReport {
        kind: BoundKind::Samuelson,
        bound: ((n - 1.0) * spread).sqrt(),
        numerator: spread,
        denominator: 1.0,
        regime: Regime::Equal,
        window: None,
        r_or_p: 2.0,
        window_mass: 1.0 / n,
        t_constant: Some((n - 1.0).sqrt()),
        alpha0: Some(1.0 / n),
        chain: Chain::PowerJensenGap,
    })
}

/// `T (c − a^p)^{1/p}` with `c = Σ α_i x_i^p`; positive weights and values, `p >= 2`.
pub fn weighted_power_bound(
    sample: &WeightedSample,
    p: f64,
    tol: &Tolerances,
) -> Result<BoundReport> {
    if !(p >= 2.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "weighted power bound needs p >= 2, got {p}"
        )));
    }
    require_positive_simplex(sample, tol, "weighted power bound")?;
    if let Some(i) = sample.values().iter().position(|&x| !(x > 0.0)) {
        return Err(Error::Domain(format!(
            "weighted power bound requires positive values: row {}",
            i + 1
        )));
    }
    let alpha0 = min_weight(sample);
    let t = t_constant(alpha0, p)?;
    let c = weighted_power_sum(sample, p)?;
    let gap = clamp_gap(power_jensen_gap(sample, p)?, c, tol, "c - a^p")?;
    Ok(BoundReport {
        kind: BoundKind::WeightedPower,
        bound: t * gap.powf(1.0 / p),
        numerator: gap,
        denominator: 1.0,
        regime: if regimes::is_equal_weights(sample.weights(), tol) {
            Regime::Equal
        } else {
            Regime::Simplex
        },
        window: None,
        r_or_p: p,
        window_mass: alpha0,
        t_constant: Some(t),
        alpha0: Some(alpha0),
        chain: Chain::PowerJensenGap,
    })
}

fn require_in_domain(sample: &WeightedSample, f: &FunctionSpec) -> Result<()> {
    match sample.values().iter().position(|&x| !f.contains(x)) {
        None => Ok(()),
        Some(i) => Err(Error::Domain(format!(
            "value at row {} lies outside the domain of {}",
            i + 1,
            f.label()
        ))),
    }
}

/// `T (Σ α_i |x_i − a|^p)^{1/p}`, the moment form of the uniformly convex bound.
/// Needs only positive weights; the data may have any sign.
pub fn uniform_convex_moment_bound(
    sample: &WeightedSample,
    p: f64,
    tol: &Tolerances,
) -> Result<BoundReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!("moment bound needs p >= 1, got {p}")));
    }
    require_positive_simplex(sample, tol, "uniformly convex moment bound")?;
    let alpha0 = min_weight(sample);
    let t = t_constant(alpha0, p)?;
    let regime = if regimes::is_equal_weights(sample.weights(), tol) {
        Regime::Equal
    } else {
        Regime::Simplex
    };
    let moment = scaled_abs_moment(&center(sample).sample, p);
    Ok(BoundReport {
        kind: BoundKind::UniformConvexMoment,
        bound: t * moment.root_over(1.0),
        numerator: moment.value(),
        denominator: 1.0,
        regime,
        window: None,
        r_or_p: p,
        window_mass: alpha0,
        t_constant: Some(t),
        alpha0: Some(alpha0),
        chain: Chain::RawMoment,
    })
}

/// Both forms without checking that the moment form stays below the gap form.
pub(crate) fn uniform_convex_pair_unchecked(
    sample: &WeightedSample,
    f: &FunctionSpec,
    m: f64,
    p: f64,
    tol: &Tolerances,
) -> Result<GapBoundPair> {
    if !(m > 0.0 && m.is_finite()) || !(p >= 1.0 && p.is_finite()) {
        return Err(Error::Domain(format!(
            "modulus m·x^p needs m > 0, p >= 1, got m = {m}, p = {p}"
        )));
    }
    let moment = uniform_convex_moment_bound(sample, p, tol)?;
    require_in_domain(sample, f)?;
    let mean = weighted_mean(sample);
    if !f.contains(mean) {
        return Err(Error::Domain(format!(
            "mean {mean} outside the domain of {}",
            f.label()
        )));
    }
    let c = function_mean(sample, f)?;
    let gap = clamp_gap(
        jensen_gap(sample, f)?,
        c.abs().max(f.eval(mean).abs()),
        tol,
        "c - f(a)",
    )?;
    let t = moment.t_constant.unwrap_or(f64::NAN);
    let gap_bound = t * m.powf(-1.0 / p) * gap.powf(1.0 / p);
    Ok(GapBoundPair {
        gap: BoundReport {
            kind: BoundKind::UniformConvexGap,
            bound: gap_bound,
            numerator: gap,
            denominator: m,
            chain: Chain::FunctionGap,
            ..moment.clone()
        },
        moment,
    })
}

/// For `f` uniformly convex with modulus `m·x^p`: the moment form
/// `T (Σ α_i |x_i − a|^p)^{1/p}` and the gap form `T m^{−1/p} (c − f(a))^{1/p}`.
///
/// Fails with a domain error when the moment form exceeds the gap form, which
/// means `f` is not uniformly convex with that modulus on the data.
pub fn uniform_convex_gap_bound(
    sample: &WeightedSample,
    f: &FunctionSpec,
    m: f64,
    p: f64,
    tol: &Tolerances,
) -> Result<GapBoundPair> {
    let pair = uniform_convex_pair_unchecked(sample, f, m, p, tol)?;
    if !tol.holds(pair.moment.bound, pair.gap.bound) {
        return Err(Error::Domain(format!(
            "{} is not uniformly convex with modulus {m}·x^{p} on this data: moment bound {} > gap bound {}",
            f.label(),
            pair.moment.bound,
            pair.gap.bound
        )));
    }
    Ok(pair)
}

/// `Φ(n−1) n / (n − 1 + Φ(n−1)) · (d − f(a))` bounding `max_k Φ(|x_k − a|)`
/// for equal weights and a convex, increasing, submultiplicative `Φ` with `Φ(0) = 0`.
pub fn modulus_gap_bound(
    sample: &WeightedSample,
    f: &FunctionSpec,
    phi: &ModulusSpec,
    tol: &Tolerances,
) -> Result<ModulusGapReport> {
    require_equal_weights(sample, tol, "modulus gap bound")?;
    if let Some(prop) = phi.flags.first_false() {
        return Err(Error::Domain(format!(
            "modulus {} is not {prop}",
            phi.label()
        )));
    }
    require_in_domain(sample, f)?;
    let n = sample.len();
    let nm1 = (n - 1) as f64;
    let phi_nm1 = phi.eval(nm1);
    let factor = phi_nm1 * n as f64 / (nm1 + phi_nm1);

    let mean = weighted_mean(sample);
    let d = function_mean(sample, f)?;
    let gap = clamp_gap(
        jensen_gap(sample, f)?,
        d.abs().max(f.eval(mean).abs()),
        tol,
        "d - f(a)",
    )?;
    let bound = factor * gap;

    let deviations = center(sample);
    let mid = compensated_sum(
        deviations
            .deviations()
            .iter()
            .map(|y| phi.eval(y.abs()) / n as f64),
    );

    let span = sample
        .values()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
        - sample
            .values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
    let inverted = if phi.flags.increasing == crate::classes::PropertyFlag::CheckedTrue {
        phi.invert(bound, span, INVERSION_ITERATIONS)
    } else {
        None
    };

    Ok(ModulusGapReport {
        report: BoundReport {
            kind: BoundKind::ModulusGap,
            bound,
            numerator: gap,
            denominator: (nm1 + phi_nm1) / (phi_nm1 * n as f64),
            regime: Regime::Equal,
            window: None,
            r_or_p: nm1,
            window_mass: 1.0 / n as f64,
            t_constant: None,
            alpha0: None,
            chain: Chain::FunctionGap,
        },
        factor,
        mid_bound: factor * mid,
        inverted_bound: inverted,
    })
}

fn check_r(r: f64) -> Result<()> {
    if r >= 1.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("r must be at least 1, got {r}")))
    }
}

/// `S + S^{2r}(1−S)^{1−2r}` written as `S (1 + (S/(1−S))^{2r−1})` with the
/// complementary mass supplied separately so it can be summed directly.
pub(crate) fn window_denominator(mass: f64, rest: f64, r: f64) -> f64 {
    mass * (1.0 + (mass / rest).powf(2.0 * r - 1.0))
}

/// Numerator of a window bound, as `(scale, reduced)` so that the
/// `1/2r`-th root can be taken without overflow.
fn chain_numerator(
    sample: &WeightedSample,
    r: f64,
    chain: Chain,
    f: Option<&FunctionSpec>,
    tol: &Tolerances,
) -> Result<(f64, f64, f64)> {
    let two_r = 2.0 * r;
    match chain {
        Chain::RawMoment => {
            let m = scaled_abs_moment(&center(sample).sample, two_r);
            let reduced = clamp_gap(m.reduced, 1.0, tol, "central moment")?;
            Ok((m.scale, reduced, m.scale.powf(two_r) * reduced))
        }
        Chain::PowerJensenGap => {
            if let Some(i) = sample.values().iter().position(|&x| x < 0.0) {
                return Err(Error::Domain(format!(
                    "power Jensen gap needs nonnegative values: row {}",
                    i + 1
                )));
            }
            let scale = sample.values().iter().copied().fold(0.0, f64::max);
            if scale == 0.0 {
                return Ok((0.0, 0.0, 0.0));
            }
            let scaled = sample.map_values(|x| x / scale);
            let moment = weighted_power_sum(&scaled, two_r)?;
            let reduced = clamp_gap(
                power_jensen_gap(&scaled, two_r)?,
                moment,
                tol,
                "power Jensen gap",
            )?;
            Ok((scale, reduced, scale.powf(two_r) * reduced))
        }
        Chain::FunctionGap => {
            let f = f.ok_or_else(|| Error::Config("function_gap chain needs a function".into()))?;
            require_in_domain(sample, f)?;
            let avg = function_mean(sample, f)?;
            let fm = f.eval(weighted_mean(sample));
            let gap = clamp_gap(
                jensen_gap(sample, f)?,
                avg.abs().max(fm.abs()),
                tol,
                "function Jensen gap",
            )?;
            Ok((1.0, gap, gap))
        }
    }
}

fn root_bound(scale: f64, reduced: f64, denominator: f64, r: f64) -> f64 {
    if scale == 0.0 || reduced <= 0.0 {
        0.0
    } else {
        scale * (reduced / denominator).powf(1.0 / (2.0 * r))
    }
}

/// Bound on `|x_{k,j} − x̄|` for positive weights.
///
/// When `1 − S <= eps_sum` the window is the whole sample, whose mean is `x̄`;
/// the bound is reported as 0 with an infinite denominator.
pub fn window_bound(
    sample: &WeightedSample,
    w: Window,
    r: f64,
    chain: Chain,
    f: Option<&FunctionSpec>,
    tol: &Tolerances,
) -> Result<BoundReport> {
    check_r(r)?;
    require_positive_simplex(sample, tol, "window bound")?;
    let mass = window_mass(sample, w)?;
    if mass <= tol.eps_sum {
        return Err(Error::DegenerateWindow {
            k: w.k,
            j: w.j,
            mass,
        });
    }
    let (scale, reduced, numerator) = chain_numerator(sample, r, chain, f, tol)?;
    let regime = if regimes::is_equal_weights(sample.weights(), tol) {
        Regime::Equal
    } else {
        Regime::Simplex
    };
    let report = BoundReport {
        kind: BoundKind::Window,
        bound: 0.0,
        numerator,
        denominator: f64::INFINITY,
        regime,
        window: Some(w),
        r_or_p: r,
        window_mass: mass,
        t_constant: None,
        alpha0: None,
        chain,
    };
    if 1.0 - mass <= tol.eps_sum {
        return Ok(report);
    }
    let rest = outside_mass(sample, w);
    let denominator = window_denominator(mass, rest, r);
    Ok(BoundReport {
        bound: root_bound(scale, reduced, denominator, r),
        denominator,
        ..report
    })
}

/// `Σ` of the weights outside the window.
fn outside_mass(sample: &WeightedSample, w: Window) -> f64 {
    let t = sample.weights();
    compensated_sum(t[..w.k - 1].iter().chain(&t[w.j..]).copied())
}

/// Prefix means `x_{1,j}` of equal-weight data sorted nonincreasing, with the
/// upper bound `x̄ + window_bound(1..j)` for each.
pub fn prefix_means_profile(
    sample: &WeightedSample,
    r: f64,
    tol: &Tolerances,
) -> Result<Vec<ProfilePoint>> {
    check_r(r)?;
    require_equal_weights(sample, tol, "prefix means profile")?;
    let xs = sample.values();
    if let Some(i) = (1..xs.len()).find(|&i| xs[i] > xs[i - 1] + tol.eps_ineq_abs) {
        return Err(Error::Order(format!(
            "values must be sorted nonincreasing: row {} exceeds row {}",
            i + 1,
            i
        )));
    }
    let mean = weighted_mean(sample);
    let n = xs.len();
    let mut out = Vec::with_capacity(n);
    for j in 1..=n {
        let w = Window { k: 1, j };
        let prefix_mean = sample::window_mean(sample, w, tol.eps_sum)?;
        let offset = window_bound(sample, w, r, Chain::RawMoment, None, tol)?.bound;
        if let Some(prev) = out.last().map(|p: &ProfilePoint| p.prefix_mean) {
            if prefix_mean > prev + tol.eps_ineq_abs * (1.0 + prev.abs()) {
                return Err(Error::Order(format!(
                    "prefix mean increased at j = {j}: {prev} -> {prefix_mean}"
                )));
            }
        }
        out.push(ProfilePoint {
            j,
            prefix_mean,
            bound: mean + offset,
        });
    }
    Ok(out)
}

/// Bound on `|Σ_{i<=k} t_i y_i / P_k|` for Jensen–Steffensen weights at an
/// admissible split `k`, with `y = x − x̄` sorted nondecreasing.
pub fn js_prefix_bound(
    sample: &WeightedSample,
    k: usize,
    r: f64,
    tol: &Tolerances,
) -> Result<BoundReport> {
    check_r(r)?;
    let n = sample.len();
    if k < 1 || k >= n {
        return Err(Error::Domain(format!(
            "split index must satisfy 1 <= k < {n}, got {k}"
        )));
    }
    let centered = center(sample);
    let ys = centered.deviations();
    if let Some(i) = (1..n).find(|&i| ys[i] < ys[i - 1] - tol.eps_ineq_abs) {
        return Err(Error::Order(format!(
            "centered values must be sorted nondecreasing: row {} is below row {}",
            i + 1,
            i
        )));
    }
    let splits = regimes::admissible_split_indices(sample.weights(), tol);
    let split = splits[k - 1];
    if let Some(cond) = split.failed_condition {
        return Err(Error::Regime(format!(
            "split k = {k} is not admissible: {cond:?} fails"
        )));
    }
    let weights = sample.weights();
    let head = compensated_sum(weights[..k].iter().copied());
    if head <= tol.eps_sum {
        return Err(Error::DegenerateWindow {
            k: 1,
            j: k,
            mass: head,
        });
    }
    let tail = compensated_sum(weights[k..].iter().copied());

    let moment = scaled_abs_moment(&centered.sample, 2.0 * r);
    let reduced = clamp_gap(moment.reduced, 1.0, tol, "signed central moment")?;
    let denominator = window_denominator(head, tail, r);
    Ok(BoundReport {
        kind: BoundKind::PrefixSplit,
        bound: root_bound(moment.scale, reduced, denominator, r),
        numerator: moment.scale.powf(2.0 * r) * reduced,
        denominator,
        regime: if regimes::validate_positive_simplex(weights, tol).is_positive_simplex {
            Regime::Simplex
        } else {
            Regime::Steffensen
        },
        window: Some(Window { k: 1, j: k }),
        r_or_p: r,
        window_mass: head,
        t_constant: None,
        alpha0: None,
        chain: Chain::RawMoment,
    })
}

/// `|Σ_{i<=k} t_i y_i / P_k|` for the centered sample: the quantity the
/// prefix bound controls.
pub fn prefix_deviation(sample: &WeightedSample, k: usize) -> f64 {
    let centered = center(sample);
    let ys = centered.deviations();
    let t = sample.weights();
    let head = compensated_sum(t[..k].iter().copied());
    let num = compensated_sum(ys[..k].iter().zip(&t[..k]).map(|(y, w)| y * w));
    (num / head).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{exp_function, make_example1, make_power_function};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn eq(values: &[f64]) -> WeightedSample {
        WeightedSample::equal_weights(values.to_vec()).unwrap()
    }

    fn signed_fixture() -> WeightedSample {
        WeightedSample::new(
            vec![-6.5, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![0.5, -0.5, 0.5, 0.25, -0.25, 0.5],
        )
        .unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn samuelson_examples() {
        let r = samuelson_bound(&eq(&[0.0, 0.0, 3.0]), &tol()).unwrap();
        assert!(close(r.bound, 2.0, 1e-12));
        assert_eq!(samuelson_bound(&eq(&[5.0; 4]), &tol()).unwrap().bound, 0.0);
        let r = samuelson_bound(&eq(&[1.0, 2.0, 3.0]), &tol()).unwrap();
        assert!(close(r.bound, (4.0f64 / 3.0).sqrt(), 1e-12));
        assert!(r.bound >= 1.0);
        let unequal = WeightedSample::new(vec![1.0, 2.0], vec![0.3, 0.7]).unwrap();
        assert!(matches!(
            samuelson_bound(&unequal, &tol()),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn t_constant_examples() {
        for n in 2..20 {
            let t = t_constant(1.0 / n as f64, 2.0).unwrap();
            assert!(close(t, ((n - 1) as f64).sqrt(), 1e-14));
        }
        assert!(close(
            t_constant(1.0 / 3.0, 2.0).unwrap(),
            2f64.sqrt(),
            1e-15
        ));
        assert!(close(t_constant(0.5, 2.0).unwrap(), 1.0, 1e-15));
        assert!(t_constant(0.0, 2.0).is_err());
        assert!(t_constant(1.0, 2.0).is_err());
        assert!(t_constant(0.5, 0.5).is_err());
    }

    #[test]
    fn t_constant_strictly_decreasing() {
        for p in [2.0, 3.0, 5.0] {
            let ts: Vec<f64> = (1..=99)
                .map(|i| t_constant(i as f64 / 100.0, p).unwrap())
                .collect();
            assert!(ts.windows(2).all(|w| w[1] < w[0]), "p = {p}");
        }
    }

    #[test]
    fn weighted_power_examples() {
        let r = weighted_power_bound(&eq(&[1.0, 1.0, 4.0]), 2.0, &tol()).unwrap();
        assert!(close(r.bound, 2.0, 1e-12));
        assert!(close(r.t_constant.unwrap(), 2f64.sqrt(), 1e-15));
        // spread shrinking to zero
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-3, 1e-6] {
            let b = weighted_power_bound(&eq(&[2.0, 2.0, 2.0 + 0.5 * eps]), 3.0, &tol())
                .unwrap()
                .bound;
            assert!(b < last);
            last = b;
        }
        assert!(last < 1e-4);
        assert!(matches!(
            weighted_power_bound(&eq(&[0.0, 1.0, 2.0]), 2.0, &tol()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            weighted_power_bound(&eq(&[1.0, 2.0]), 1.5, &tol()),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            weighted_power_bound(&signed_fixture(), 2.0, &tol()),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn uniform_convex_examples() {
        let square = make_power_function(2.0, 1.0).unwrap();
        let pair =
            uniform_convex_gap_bound(&eq(&[0.0, 0.0, 3.0]), &square, 1.0, 2.0, &tol()).unwrap();
        assert!(close(pair.gap.bound, 2.0, 1e-12));
        assert!(close(pair.moment.bound, 2.0, 1e-12));

        let pair = uniform_convex_gap_bound(&eq(&[3.0; 3]), &square, 1.0, 2.0, &tol()).unwrap();
        assert_eq!(pair.gap.bound, 0.0);
        assert_eq!(pair.moment.bound, 0.0);

        let g = make_example1(&exp_function()).unwrap();
        let pair =
            uniform_convex_gap_bound(&eq(&[0.0, 1.0, 2.0]), &g.function, g.constant, 2.0, &tol())
                .unwrap();
        assert!(pair.moment.bound <= pair.gap.bound);
        let e = std::f64::consts::E;
        let expected_gap = (2.0 * e * e - 2.0 * e) / 3.0;
        assert!(close(pair.gap.numerator, expected_gap, 1e-12));

        // overstated modulus gets caught
        assert!(matches!(
            uniform_convex_gap_bound(&eq(&[0.0, 0.0, 3.0]), &square, 4.0, 2.0, &tol()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn modulus_gap_examples() {
        let square = make_power_function(2.0, 1.0).unwrap();
        let phi = ModulusSpec::power(1.0, 2.0).unwrap();
        let r = modulus_gap_bound(&eq(&[0.0, 0.0, 3.0]), &square, &phi, &tol()).unwrap();
        assert!(close(r.factor, 2.0, 1e-15));
        assert!(close(r.report.numerator, 2.0, 1e-14));
        assert!(close(r.report.bound, 4.0, 1e-12));
        assert!(close(r.mid_bound, 4.0, 1e-12));
        assert!(close(r.inverted_bound.unwrap(), 2.0, 1e-12));

        let r = modulus_gap_bound(&eq(&[1.5; 3]), &square, &phi, &tol()).unwrap();
        assert_eq!(r.report.bound, 0.0);
        assert_eq!(r.inverted_bound, Some(0.0));

        let half = ModulusSpec::power(0.5, 2.0).unwrap();
        assert!(matches!(
            modulus_gap_bound(&eq(&[0.0, 0.0, 3.0]), &square, &half, &tol()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn window_bound_examples() {
        let s = eq(&[4.0, 2.0, 2.0, 0.0]);
        let r = window_bound(
            &s,
            Window { k: 1, j: 1 },
            1.0,
            Chain::RawMoment,
            None,
            &tol(),
        )
        .unwrap();
        assert!(close(r.bound, 6f64.sqrt(), 1e-12));
        assert!(r.bound >= 2.0);

        let r = window_bound(&s, Window::full(4), 2.0, Chain::RawMoment, None, &tol()).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(r.denominator, f64::INFINITY);
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"denominator\":\"+inf\""));

        let raw = window_bound(
            &s,
            Window { k: 2, j: 3 },
            2.0,
            Chain::RawMoment,
            None,
            &tol(),
        )
        .unwrap();
        let pjg = window_bound(
            &s,
            Window { k: 2, j: 3 },
            2.0,
            Chain::PowerJensenGap,
            None,
            &tol(),
        )
        .unwrap();
        assert!(raw.bound <= pjg.bound);
    }

    #[test]
    fn window_bound_errors() {
        let s = eq(&[-1.0, 2.0, 3.0]);
        assert!(matches!(
            window_bound(
                &s,
                Window { k: 1, j: 1 },
                1.0,
                Chain::PowerJensenGap,
                None,
                &tol()
            ),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            window_bound(
                &s,
                Window { k: 1, j: 1 },
                0.5,
                Chain::RawMoment,
                None,
                &tol()
            ),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            window_bound(
                &s,
                Window { k: 1, j: 1 },
                1.0,
                Chain::FunctionGap,
                None,
                &tol()
            ),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            window_bound(
                &signed_fixture(),
                Window { k: 1, j: 1 },
                1.0,
                Chain::RawMoment,
                None,
                &tol()
            ),
            Err(Error::Regime(_))
        ));
        let tiny = WeightedSample::new(vec![1.0, 2.0, 3.0], vec![1e-12, 0.5, 0.5 - 1e-12]).unwrap();
        assert!(matches!(
            window_bound(
                &tiny,
                Window { k: 1, j: 1 },
                1.0,
                Chain::RawMoment,
                None,
                &tol()
            ),
            Err(Error::DegenerateWindow { .. })
        ));
    }

    #[test]
    fn prefix_closed_form_small_case() {
        // n = 4, j = 1, r = 1 on (4,2,2,0): n(n−j) g / (j² + j(n−j)) = 4·3·2/(1+3) = 6
        let s = eq(&[4.0, 2.0, 2.0, 0.0]);
        let r = window_bound(
            &s,
            Window { k: 1, j: 1 },
            1.0,
            Chain::RawMoment,
            None,
            &tol(),
        )
        .unwrap();
        assert!(close(r.bound * r.bound, 6.0, 1e-12));
    }

    #[test]
    fn prefix_profile_examples() {
        let p = prefix_means_profile(&eq(&[3.0, 0.0, 0.0]), 1.0, &tol()).unwrap();
        let means: Vec<f64> = p.iter().map(|q| q.prefix_mean).collect();
        assert_eq!(means, vec![3.0, 1.5, 1.0]);

        let p = prefix_means_profile(&eq(&[2.0; 5]), 2.0, &tol()).unwrap();
        assert!(p
            .iter()
            .all(|q| (q.prefix_mean - 2.0).abs() < 1e-15 && q.bound >= q.prefix_mean - 1e-15));

        let p = prefix_means_profile(&eq(&[4.0, 2.0, 2.0, 0.0]), 1.0, &tol()).unwrap();
        assert!(close(p[0].bound, 2.0 + 6f64.sqrt(), 1e-12));
        assert!(p[0].bound >= 4.0);

        assert!(matches!(
            prefix_means_profile(&eq(&[0.0, 1.0, 2.0]), 1.0, &tol()),
            Err(Error::Order(_))
        ));
    }

    #[test]
    fn js_prefix_signed_fixture() {
        let s = signed_fixture();
        let r = js_prefix_bound(&s, 3, 1.0, &tol()).unwrap();
        assert!(close(r.numerator, 39.375, 1e-14));
        assert!(close(r.denominator, 1.0, 1e-15));
        assert!(close(r.bound, 39.375f64.sqrt(), 1e-12));
        assert_eq!(r.regime, Regime::Steffensen);
        let lhs = prefix_deviation(&s, 3);
        assert!(close(lhs, 5.5, 1e-12));
        assert!(lhs <= r.bound);

        assert!(matches!(
            js_prefix_bound(&s, 2, 1.0, &tol()),
            Err(Error::Regime(_))
        ));
        let unsorted = s.with_values(vec![2.0, -6.5, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert!(matches!(
            js_prefix_bound(&unsorted, 3, 1.0, &tol()),
            Err(Error::Order(_))
        ));
    }

    #[test]
    fn js_prefix_matches_window_bound_for_positive_weights() {
        let s = WeightedSample::new(
            vec![-2.0, -1.0, 0.5, 3.0, 4.0],
            vec![0.1, 0.3, 0.2, 0.15, 0.25],
        )
        .unwrap();
        for k in 1..5 {
            for r in [1.0, 1.5, 3.0] {
                let a = js_prefix_bound(&s, k, r, &tol()).unwrap().bound;
                let b = window_bound(&s, Window { k: 1, j: k }, r, Chain::RawMoment, None, &tol())
                    .unwrap()
                    .bound;
                assert!(close(a, b, 1e-12), "k = {k}, r = {r}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn js_prefix_zero_data() {
        let s = WeightedSample::new(vec![0.0; 6], vec![0.5, -0.5, 0.5, 0.25, -0.25, 0.5]).unwrap();
        let r = js_prefix_bound(&s, 3, 1.0, &tol()).unwrap();
        assert_eq!(r.bound, 0.0);
        assert_eq!(prefix_deviation(&s, 3), 0.0);
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn simplex_sample(min: f64, max: f64) -> impl Strategy<Value = WeightedSample> {
        (3usize..10)
            .prop_flat_map(move |n| {
                (
                    prop::collection::vec(min..max, n),
                    prop::collection::vec(0.05f64..1.0, n),
                )
            })
            .prop_map(|(values, raw)| {
                let total: f64 = raw.iter().sum();
                WeightedSample::new(values, raw.iter().map(|w| w / total).collect()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn window_bound_scale_equivariant(
            s in simplex_sample(-10.0, 10.0),
            lambda in 1e-3f64..1e3,
            r in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]),
        ) {
            let tol = Tolerances::default();
            let scaled = s.map_values(|x| lambda * x);
            for w in Window::all(s.len()) {
                let a = window_bound(&s, w, r, Chain::RawMoment, None, &tol).unwrap().bound;
                let b = window_bound(&scaled, w, r, Chain::RawMoment, None, &tol).unwrap().bound;
                prop_assert!((b - lambda * a).abs() <= 1e-9 * (lambda * a).max(1e-300));
            }
        }

        #[test]
        fn window_bound_translation_invariant(
            s in simplex_sample(-10.0, 10.0),
            shift in -1e3f64..1e3,
            r in prop::sample::select(vec![1.0, 2.0, 3.0]),
        ) {
            let tol = Tolerances::default();
            let moved = s.map_values(|x| x + shift);
            for w in Window::all(s.len()) {
                let a = window_bound(&s, w, r, Chain::RawMoment, None, &tol).unwrap().bound;
                let b = window_bound(&moved, w, r, Chain::RawMoment, None, &tol).unwrap().bound;
                prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300), "{a} vs {b}");
            }
        }

        #[test]
        fn raw_moment_chain_dominated_by_power_gap(
            s in simplex_sample(0.0, 10.0),
            r in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0]),
        ) {
            let tol = Tolerances::default();
            for w in Window::all(s.len()) {
                let a = window_bound(&s, w, r, Chain::RawMoment, None, &tol).unwrap().bound;
                let b = window_bound(&s, w, r, Chain::PowerJensenGap, None, &tol).unwrap().bound;
                prop_assert!(tol.holds(a, b), "{a} > {b}");
            }
        }
    }
}
