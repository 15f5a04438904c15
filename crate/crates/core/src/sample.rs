//! Weighted samples and the scalar statistics every bound is built from.

use serde::{Deserialize, Serialize};

use crate::classes::FunctionSpec;
use crate::error::{Error, Result};
use crate::summation::compensated_sum;

/// Numerical slack used by validators and inequality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Allowed deviation of the weight sum from one.
    pub eps_sum: f64,
    /// Relative slack on inequality right-hand sides.
    pub eps_ineq_rel: f64,
    /// Absolute slack on inequality right-hand sides.
    pub eps_ineq_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eps_sum: 1e-9,
            eps_ineq_rel: 1e-9,
            eps_ineq_abs: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn new(eps_sum: f64, eps_ineq_rel: f64, eps_ineq_abs: f64) -> Result<Self> {
        let tol = Self {
            eps_sum,
            eps_ineq_rel,
            eps_ineq_abs,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps_sum", self.eps_sum),
            ("eps_ineq_rel", self.eps_ineq_rel),
            ("eps_ineq_abs", self.eps_ineq_abs),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!(
                    "{name} must be a positive finite number, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Allowed shortfall of a right-hand side `rhs` before an inequality counts as violated.
    pub fn slack_allowance(&self, rhs: f64) -> f64 {
        self.eps_ineq_rel * rhs.abs() + self.eps_ineq_abs
    }

    /// `lhs <= rhs` up to the inequality slack.
    pub fn holds(&self, lhs: f64, rhs: f64) -> bool {
        rhs - lhs >= -self.slack_allowance(rhs)
    }
}

/// Ordered values with signed weights summing to one.
///
/// Weight signs are not restricted here; the regime a bound needs is checked
/// by [`crate::regimes`] at the call site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedSample {
    values: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(values, weights, Tolerances::default().eps_sum)
    }

    pub fn with_tolerance(values: Vec<f64>, weights: Vec<f64>, eps_sum: f64) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} values but {} weights",
                values.len(),
                weights.len()
            )));
        }
        if values.len() < 2 {
            return Err(Error::InvalidSample(format!(
                "need at least 2 points, got {}",
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "value at row {} is not finite",
                i + 1
            )));
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::InvalidSample(format!(
                "weight at row {} is not finite",
                i + 1
            )));
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > eps_sum {
            return Err(Error::InvalidSample(format!(
                "weights sum to {total}, expected 1 within {eps_sum}"
            )));
        }
        Ok(Self { values, weights })
    }

    /// Sample with every weight equal to `1/n`.
    pub fn equal_weights(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        let w = 1.0 / n.max(1) as f64;
        Self::new(values, vec![w; n])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same weights with every value mapped through `f`.
    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&x| f(x)).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Replaces the values, keeping the weights. Lengths must match.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.weights.len() {
            return Err(Error::InvalidSample("value count changed".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSample("non-finite value".into()));
        }
        Ok(Self {
            values,
            weights: self.weights.clone(),
        })
    }

    pub fn weighted_mean(&self) -> f64 {
        weighted_mean(self)
    }
}

/// A sample shifted by its weighted mean, so that `Σ t_i y_i ≈ 0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenteredSample {
    pub sample: WeightedSample,
    pub origin_mean: f64,
}

impl CenteredSample {
    pub fn deviations(&self) -> &[f64] {
        self.sample.values()
    }
}

/// Contiguous index block `k..=j`, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Window {
    pub k: usize,
    pub j: usize,
}

impl Window {
    pub fn new(k: usize, j: usize, n: usize) -> Result<Self> {
        if k < 1 || k > j || j > n {
            return Err(Error::Domain(format!(
                "window {k}:{j} must satisfy 1 <= k <= j <= {n}"
            )));
        }
        Ok(Self { k, j })
    }

    pub fn full(n: usize) -> Self {
        Self { k: 1, j: n }
    }

    pub fn len(&self) -> usize {
        self.j - self.k + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Zero-based range covered by the window.
    pub fn range(&self) -> std::ops::Range<usize> {
        self.k - 1..self.j
    }

    /// All `n(n+1)/2` windows in `(k, j)` lexicographic order.
    pub fn all(n: usize) -> impl Iterator<Item = Window> {
        (1..=n).flat_map(move |k| (k..=n).map(move |j| Window { k, j }))
    }

    fn check(&self, n: usize) -> Result<()> {
        Window::new(self.k, self.j, n).map(|_| ())
    }
}

/// Scalar statistics of a sample: mean `a`, square moment `b`,
/// power moment `c`, central moment `g_{2r}` and optionally `d = Σ t_i f(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub square_moment: f64,
    pub power: f64,
    pub power_moment: f64,
    pub two_r: f64,
    pub central_moment: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub function_mean: Option<(String, f64)>,
}

impl MomentSummary {
    pub fn compute(
        sample: &WeightedSample,
        power: f64,
        two_r: f64,
        f: Option<&FunctionSpec>,
    ) -> Result<Self> {
        let power_moment = weighted_power_sum(sample, power)?;
        let function_mean = match f {
            Some(f) => Some((f.label().to_string(), function_mean(sample, f)?)),
            None => None,
        };
        Ok(Self {
            mean: weighted_mean(sample),
            square_moment: weighted_power_sum(sample, 2.0)?,
            power,
            power_moment,
            two_r,
            central_moment: central_power_moment(sample, two_r)?,
            function_mean,
        })
    }
}

/// `Σ t_i x_i` with compensated summation in index order.
pub fn weighted_mean(sample: &WeightedSample) -> f64 {
    compensated_sum(
        sample
            .values
            .iter()
            .zip(&sample.weights)
            .map(|(x, t)| t * x),
    )
}

/// Subtracts the weighted mean from every value.
pub fn center(sample: &WeightedSample) -> CenteredSample {
    let mean = weighted_mean(sample);
    CenteredSample {
        sample: sample.map_values(|x| x - mean),
        origin_mean: mean,
    }
}

/// `Σ t_i |x_i − x̄|^{2r}`, requires `2r >= 2`.
pub fn central_power_moment(sample: &WeightedSample, two_r: f64) -> Result<f64> {
    if !(two_r >= 2.0) || !two_r.is_finite() {
        return Err(Error::Domain(format!("2r must be at least 2, got {two_r}")));
    }
    let centered = center(sample);
    Ok(scaled_abs_moment(&centered.sample, two_r).value())
}

/// `Σ t_i |v_i|^q` stored as `scale^q · reduced` with `scale = max |v_i|`,
/// so that large exponents can be carried without overflow.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledMoment {
    pub scale: f64,
    pub reduced: f64,
    pub exponent: f64,
}

impl ScaledMoment {
    pub fn value(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            self.scale.powf(self.exponent) * self.reduced
        }
    }

    /// `(value / denominator)^{1/exponent}` without forming `value`.
    pub fn root_over(&self, denominator: f64) -> f64 {
        if self.scale == 0.0 || self.reduced <= 0.0 {
            return 0.0;
        }
        self.scale * (self.reduced / denominator).powf(1.0 / self.exponent)
    }
}

/// Absolute moment of the given values (no centering is applied).
pub(crate) fn scaled_abs_moment(sample: &WeightedSample, exponent: f64) -> ScaledMoment {
    let scale = sample.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let reduced = if scale == 0.0 {
        0.0
    } else {
        compensated_sum(
            sample
                .values
                .iter()
                .zip(&sample.weights)
                .map(|(v, t)| t * (v.abs() / scale).powf(exponent)),
        )
    };
    ScaledMoment {
        scale,
        reduced,
        exponent,
    }
}

/// `Σ t_i x_i^p`; fractional `p` needs nonnegative values.
pub(crate) fn weighted_power_sum(sample: &WeightedSample, p: f64) -> Result<f64> {
    let integral = p.fract() == 0.0;
    if !integral && sample.values.iter().any(|&x| x < 0.0) {
        return Err(Error::Domain(format!(
            "non-integer power {p} needs nonnegative values"
        )));
    }
    Ok(compensated_sum(
        sample
            .values
            .iter()
            .zip(&sample.weights)
            .map(|(x, t)| t * x.powf(p)),
    ))
}

/// `Σ t_i f(x_i)`, every value must lie in `f`'s domain.
pub(crate) fn function_mean(sample: &WeightedSample, f: &FunctionSpec) -> Result<f64> {
    for (i, &x) in sample.values.iter().enumerate() {
        if !f.contains(x) {
            return Err(Error::Domain(format!(
                "value {x} at row {} outside the domain of {}",
                i + 1,
                f.label()
            )));
        }
    }
    let total = compensated_sum(
        sample
            .values
            .iter()
            .zip(&sample.weights)
            .map(|(&x, t)| t * f.eval(x)),
    );
    if !total.is_finite() {
        return Err(Error::Domain(format!(
            "{} is not finite on the data",
            f.label()
        )));
    }
    Ok(total)
}

/// `x^p − a^p − p a^{p−1} (x − a)` for `x, a >= 0`, with the binomial series
/// near `x = a` so the second-order result does not cancel.
fn power_remainder(x: f64, a: f64, p: f64) -> f64 {
    if a == 0.0 {
        return x.powf(p);
    }
    let u = (x - a) / a;
    if u.abs() >= 0.5 {
        return x.powf(p) - a.powf(p) - p * a.powf(p - 1.0) * (x - a);
    }
    let mut coeff = p * (p - 1.0) / 2.0;
    let mut power = u * u;
    let mut sum = coeff * power;
    for m in 3..400 {
        coeff *= (p - (m - 1) as f64) / m as f64;
        power *= u;
        let term = coeff * power;
        sum += term;
        if coeff == 0.0 || term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    a.powf(p) * sum
}

/// Jensen gap `Σ t_i x_i^p − x̄^p` for nonnegative data, evaluated as
/// `Σ t_i (x_i^p − x̄^p − p x̄^{p−1}(x_i − x̄))`, equal because `Σ t_i (x_i − x̄) = 0`.
pub(crate) fn power_jensen_gap(sample: &WeightedSample, p: f64) -> Result<f64> {
    if let Some(i) = sample.values.iter().position(|&x| x < 0.0) {
        return Err(Error::Domain(format!(
            "power Jensen gap needs nonnegative values: row {}",
            i + 1
        )));
    }
    let mean = weighted_mean(sample).max(0.0);
    Ok(compensated_sum(
        sample
            .values
            .iter()
            .zip(&sample.weights)
            .map(|(&x, t)| t * power_remainder(x, mean, p)),
    ))
}

/// Jensen gap `Σ t_i f(x_i) − f(x̄)`. Power functions go through
/// [`power_jensen_gap`]; otherwise the tangent at `x̄` is subtracted term by
/// term when a derivative is known.
pub(crate) fn jensen_gap(sample: &WeightedSample, f: &FunctionSpec) -> Result<f64> {
    let avg = function_mean(sample, f)?;
    let mean = weighted_mean(sample);
    if !f.contains(mean) {
        return Err(Error::Domain(format!(
            "mean {mean} outside the domain of {}",
            f.label()
        )));
    }
    if let Some((scale, exponent)) = f.power_form() {
        return Ok(scale * power_jensen_gap(sample, exponent)?);
    }
    let fm = f.eval(mean);
    let gap = match f.derivative(mean) {
        Some(slope) if slope.is_finite() => compensated_sum(
            sample
                .values
                .iter()
                .zip(&sample.weights)
                .map(|(&x, t)| t * (f.eval(x) - fm - slope * (x - mean))),
        ),
        _ => avg - fm,
    };
    Ok(gap)
}

/// Window mass `S = Σ_{i=k}^{j} t_i`.
pub fn window_mass(sample: &WeightedSample, w: Window) -> Result<f64> {
    w.check(sample.len())?;
    Ok(compensated_sum(sample.weights[w.range()].iter().copied()))
}

/// Weight-normalised window mean `Σ_{i=k}^{j} t_i x_i / Σ_{i=k}^{j} t_i`.
pub fn window_mean(sample: &WeightedSample, w: Window, eps_sum: f64) -> Result<f64> {
    let mass = window_mass(sample, w)?;
    if mass.abs() <= eps_sum {
        return Err(Error::DegenerateWindow {
            k: w.k,
            j: w.j,
            mass,
        });
    }
    let range = w.range();
    let num = compensated_sum(
        sample.values[range.clone()]
            .iter()
            .zip(&sample.weights[range])
            .map(|(x, t)| t * x),
    );
    Ok(num / mass)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn third() -> Vec<f64> {
        vec![1.0 / 3.0; 3]
    }

    pub(crate) fn signed_fixture() -> WeightedSample {
        WeightedSample::new(
            vec![-6.5, 2.0, 3.0, 4.0, 5.0, 6.0],
            vec![0.5, -0.5, 0.5, 0.25, -0.25, 0.5],
        )
        .unwrap()
    }

    #[test]
    fn rejects_bad_construction() {
        assert!(WeightedSample::new(vec![1.0], vec![1.0]).is_err());
        assert!(WeightedSample::new(vec![1.0, 2.0], vec![0.6, 0.6]).is_err());
        assert!(WeightedSample::new(vec![1.0, 2.0], vec![0.5]).is_err());
        assert!(WeightedSample::new(vec![f64::NAN, 2.0], vec![0.5, 0.5]).is_err());
        assert!(WeightedSample::new(vec![1.0, 2.0], vec![1.5, -0.5]).is_ok());
    }

    #[test]
    fn weighted_mean_examples() {
        let s = WeightedSample::new(vec![1.0, 2.0, 3.0], third()).unwrap();
        assert!((weighted_mean(&s) - 2.0).abs() < 1e-15);
        assert_eq!(weighted_mean(&signed_fixture()), 0.0);
        let s = WeightedSample::new(vec![0.0, 0.0, 3.0], third()).unwrap();
        assert!((weighted_mean(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn center_examples() {
        let s = WeightedSample::new(vec![0.0, 0.0, 3.0], third()).unwrap();
        let c = center(&s);
        assert!((c.origin_mean - 1.0).abs() < 1e-15);
        for (y, e) in c.deviations().iter().zip([-1.0, -1.0, 2.0]) {
            assert!((y - e).abs() < 1e-15);
        }

        let c = center(&signed_fixture());
        assert_eq!(c.origin_mean, 0.0);
        assert_eq!(c.deviations(), signed_fixture().values());

        let s = WeightedSample::new(vec![4.2; 3], third()).unwrap();
        assert!(center(&s).deviations().iter().all(|&y| y.abs() < 1e-14));
    }

    #[test]
    fn power_gap_survives_clustered_data() {
        let s = WeightedSample::new(vec![1.0, 1.0 + 1e-6], vec![0.5, 0.5]).unwrap();
        // variance of two points 1e-6 apart
        let gap = power_jensen_gap(&s, 2.0).unwrap();
        assert!((gap - 2.5e-13).abs() < 2.5e-13 * 1e-9, "{gap}");
        // x^4: Σ t x^4 − a^4 = 6a²v + m4 with a = 1 + 5e-7, v = 2.5e-13, m4 = v²
        let a: f64 = 1.0 + 5e-7;
        let expected = 6.0 * a * a * 2.5e-13 + 2.5e-13 * 2.5e-13;
        let gap = power_jensen_gap(&s, 4.0).unwrap();
        assert!(
            (gap - expected).abs() < expected * 1e-8,
            "{gap} vs {expected}"
        );
    }

    #[test]
    fn power_gap_matches_direct_form_on_spread_data() {
        let s = WeightedSample::new(vec![0.0, 2.0, 7.0, 3.5], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        for p in [2.0, 2.5, 3.0, 6.0] {
            let direct = weighted_power_sum(&s, p).unwrap() - weighted_mean(&s).powf(p);
            let gap = power_jensen_gap(&s, p).unwrap();
            assert!(
                (gap - direct).abs() < 1e-12 * direct,
                "p = {p}: {gap} vs {direct}"
            );
        }
    }

    #[test]
    fn central_moment_examples() {
        let s = WeightedSample::new(vec![0.0, 0.0, 3.0], third()).unwrap();
        assert!((central_power_moment(&s, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!(
            (central_power_moment(&signed_fixture(), 2.0).unwrap() - 39.375).abs() < 39.375 * 1e-14
        );
        let s = WeightedSample::new(vec![7.0; 4], vec![0.25; 4]).unwrap();
        assert_eq!(central_power_moment(&s, 6.0).unwrap(), 0.0);
        assert!(matches!(
            central_power_moment(&s, 1.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn central_moment_survives_large_exponents() {
        let s = WeightedSample::equal_weights(vec![0.0, 1e30, 2e30]).unwrap();
        let m = scaled_abs_moment(&center(&s).sample, 400.0);
        assert!(m.reduced.is_finite() && m.reduced > 0.0);
        assert!(m.root_over(1.0).is_finite());
    }

    #[test]
    fn window_mass_examples() {
        let s = WeightedSample::equal_weights(vec![4.0, 2.0, 2.0, 0.0]).unwrap();
        assert_eq!(
            window_mass(&s, Window::new(1, 1, 4).unwrap()).unwrap(),
            0.25
        );
        assert_eq!(
            window_mass(&signed_fixture(), Window::new(1, 3, 6).unwrap()).unwrap(),
            0.5
        );
        let full = window_mass(&signed_fixture(), Window::full(6)).unwrap();
        assert!((full - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn window_mean_examples() {
        let eps = Tolerances::default().eps_sum;
        let s = WeightedSample::equal_weights(vec![4.0, 2.0, 2.0, 0.0]).unwrap();
        assert!((window_mean(&s, Window::full(4), eps).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(
            window_mean(&s, Window::new(1, 1, 4).unwrap(), eps).unwrap(),
            4.0
        );
        assert_eq!(
            window_mean(&signed_fixture(), Window::new(1, 3, 6).unwrap(), eps).unwrap(),
            -5.5
        );
        // t_1 + t_2 = 0 in the signed example
        assert!(matches!(
            window_mean(&signed_fixture(), Window::new(1, 2, 6).unwrap(), eps),
            Err(Error::DegenerateWindow { k: 1, j: 2, .. })
        ));
    }

    #[test]
    fn window_validation() {
        assert!(Window::new(0, 1, 3).is_err());
        assert!(Window::new(2, 1, 3).is_err());
        assert!(Window::new(1, 4, 3).is_err());
        assert_eq!(Window::all(5).count(), 15);
    }

    #[test]
    fn moment_summary_fields() {
        let s = WeightedSample::new(vec![0.0, 0.0, 3.0], third()).unwrap();
        let m = MomentSummary::compute(&s, 3.0, 2.0, None).unwrap();
        assert!((m.mean - 1.0).abs() < 1e-15);
        assert!((m.square_moment - 3.0).abs() < 1e-15);
        assert!((m.power_moment - 9.0).abs() < 1e-14);
        assert!((m.central_moment - 2.0).abs() < 1e-14);
        assert!(m.square_moment >= m.mean * m.mean);
    }
}
