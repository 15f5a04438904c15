//! Function classes: superquadratic functions, uniformly convex functions and
//! their moduli.
//!
//! The checkers here are semi-decisions on finite grids. A `Violated` verdict
//! comes with a concrete witness; `NoViolationFound` only means the grid did
//! not contain one.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A real function on `[domain_low, domain_high)` with an optional derivative.
/// `domain_high` may be `f64::INFINITY`.
#[derive(Clone)]
pub struct FunctionSpec {
    label: String,
    domain_low: f64,
    domain_high: f64,
    evaluate: ScalarFn,
    derivative: Option<ScalarFn>,
    /// `(scale, exponent)` when the function is `scale · x^exponent`.
    power: Option<(f64, f64)>,
}

impl fmt::Debug for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSpec")
            .field("label", &self.label)
            .field("domain_low", &self.domain_low)
            .field("domain_high", &self.domain_high)
            .field("has_derivative", &self.derivative.is_some())
            .finish()
    }
}

impl FunctionSpec {
    pub fn new(
        label: impl Into<String>,
        domain_low: f64,
        domain_high: f64,
        evaluate: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        if !domain_low.is_finite() || !(domain_high > domain_low) {
            return Err(Error::Domain(format!(
                "domain [{domain_low}, {domain_high}) is empty or unbounded below"
            )));
        }
        Ok(Self {
            label: label.into(),
            domain_low,
            domain_high,
            evaluate: Arc::new(evaluate),
            derivative: None,
            power: None,
        })
    }

    pub fn with_derivative(
        mut self,
        derivative: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Restricts the domain to `[low, high)`, which must sit inside the current one.
    pub fn restricted(&self, low: f64, high: f64) -> Result<Self> {
        if low < self.domain_low || high > self.domain_high || !(high > low) {
            return Err(Error::Domain(format!(
                "[{low}, {high}) is not inside the domain of {}",
                self.label
            )));
        }
        let mut out = self.clone();
        out.domain_low = low;
        out.domain_high = high;
        Ok(out)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.domain_low, self.domain_high)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.domain_low && x < self.domain_high
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.evaluate)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x))
    }

    /// `(scale, exponent)` for functions built by [`make_power_function`].
    pub fn power_form(&self) -> Option<(f64, f64)> {
        self.power
    }

    pub fn has_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    /// Grid of `size` points in the domain, with `[low, low + span]` standing in
    /// for an unbounded domain.
    fn grid(&self, size: usize, span: f64) -> Vec<f64> {
        if self.domain_high.is_finite() {
            let step = (self.domain_high - self.domain_low) / size as f64;
            (0..size)
                .map(|i| self.domain_low + i as f64 * step)
                .collect()
        } else {
            let step = span / (size - 1) as f64;
            (0..size)
                .map(|i| self.domain_low + i as f64 * step)
                .collect()
        }
    }
}

/// Outcome of a grid property check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyFlag {
    CheckedTrue,
    CheckedFalse,
    Unchecked,
}

impl PropertyFlag {
    fn from_bool(b: bool) -> Self {
        if b {
            PropertyFlag::CheckedTrue
        } else {
            PropertyFlag::CheckedFalse
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModulusFlags {
    pub increasing: PropertyFlag,
    pub zero_at_zero: PropertyFlag,
    pub convex: PropertyFlag,
    pub submultiplicative: PropertyFlag,
}

impl ModulusFlags {
    pub fn unchecked() -> Self {
        Self {
            increasing: PropertyFlag::Unchecked,
            zero_at_zero: PropertyFlag::Unchecked,
            convex: PropertyFlag::Unchecked,
            submultiplicative: PropertyFlag::Unchecked,
        }
    }

    pub fn all_true(&self) -> bool {
        [
            self.increasing,
            self.zero_at_zero,
            self.convex,
            self.submultiplicative,
        ]
        .iter()
        .all(|f| *f == PropertyFlag::CheckedTrue)
    }

    /// First property known to fail, by name.
    pub fn first_false(&self) -> Option<&'static str> {
        [
            ("increasing", self.increasing),
            ("zero_at_zero", self.zero_at_zero),
            ("convex", self.convex),
            ("submultiplicative", self.submultiplicative),
        ]
        .into_iter()
        .find(|(_, f)| *f == PropertyFlag::CheckedFalse)
        .map(|(name, _)| name)
    }
}

#[derive(Debug, Clone)]
pub enum ModulusForm {
    /// `Φ(x) = m·x^p`
    Power {
        m: f64,
        p: f64,
    },
    Generic(FunctionSpec),
}

/// A modulus `Φ` on `[0, span)` together with its property flags.
#[derive(Debug, Clone)]
pub struct ModulusSpec {
    pub form: ModulusForm,
    pub flags: ModulusFlags,
}

impl ModulusSpec {
    /// `m·x^p`, with flags derived analytically: submultiplicativity
    /// `m(AB)^p <= m²A^pB^p` holds exactly when `m >= 1`.
    pub fn power(m: f64, p: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) || !(p >= 1.0 && p.is_finite()) {
            return Err(Error::Domain(format!(
                "power modulus needs m > 0 and p >= 1, got m = {m}, p = {p}"
            )));
        }
        Ok(Self {
            form: ModulusForm::Power { m, p },
            flags: ModulusFlags {
                increasing: PropertyFlag::CheckedTrue,
                zero_at_zero: PropertyFlag::CheckedTrue,
                convex: PropertyFlag::CheckedTrue,
                submultiplicative: PropertyFlag::from_bool(m >= 1.0),
            },
        })
    }

    pub fn generic(f: FunctionSpec) -> Result<Self> {
        if f.domain_low != 0.0 {
            return Err(Error::Domain(format!(
                "modulus {} must be defined from 0, starts at {}",
                f.label, f.domain_low
            )));
        }
        Ok(Self {
            form: ModulusForm::Generic(f),
            flags: ModulusFlags::unchecked(),
        })
    }

    pub fn with_flags(mut self, flags: ModulusFlags) -> Self {
        self.flags = flags;
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.form {
            ModulusForm::Power { m, p } => m * x.powf(*p),
            ModulusForm::Generic(f) => f.eval(x),
        }
    }

    pub fn label(&self) -> String {
        match &self.form {
            ModulusForm::Power { m, p } if *m == 1.0 => format!("power:{p}"),
            ModulusForm::Power { m, p } => format!("scaled_power:{m}:{p}"),
            ModulusForm::Generic(f) => f.label.clone(),
        }
    }

    /// Upper end of the region where the modulus may be evaluated.
    pub fn domain_high(&self) -> f64 {
        match &self.form {
            ModulusForm::Power { .. } => f64::INFINITY,
            ModulusForm::Generic(f) => f.domain_high,
        }
    }

    /// Smallest `x >= 0` with `Φ(x) >= target`, by bisection.
    ///
    /// The bracket starts at `[0, initial_high]` and doubles while `Φ(high)`
    /// is still below the target. Returns `None` if no bracket exists inside
    /// the modulus domain.
    pub fn invert(&self, target: f64, initial_high: f64, iterations: u32) -> Option<f64> {
        if target <= self.eval(0.0) {
            return Some(0.0);
        }
        let limit = self.domain_high();
        let mut hi = if initial_high > 0.0 {
            initial_high
        } else {
            1.0
        };
        let mut doublings = 0;
        while self.eval(hi) < target {
            hi *= 2.0;
            doublings += 1;
            if doublings > 1100 || hi >= limit {
                return None;
            }
        }
        let mut lo = 0.0_f64;
        for _ in 0..iterations {
            let mid = 0.5 * (lo + hi);
            if self.eval(mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(hi)
    }
}

/// Grid layout shared by the checkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub grid_size: usize,
    /// Extent used when a domain is unbounded above.
    pub span: f64,
    /// Absolute violation tolerance, scaled by `1 + |value|` at each test.
    pub tolerance: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            grid_size: 64,
            span: 10.0,
            tolerance: 1e-8,
        }
    }
}

impl GridConfig {
    pub fn with_size(grid_size: usize) -> Self {
        Self {
            grid_size,
            ..Self::default()
        }
    }

    fn validate(&self, min_size: usize) -> Result<()> {
        if self.grid_size < min_size {
            return Err(Error::Config(format!(
                "grid_size must be at least {min_size}, got {}",
                self.grid_size
            )));
        }
        if !(self.span > 0.0 && self.span.is_finite()) {
            return Err(Error::Config(format!(
                "span must be positive, got {}",
                self.span
            )));
        }
        if !(self.tolerance > 0.0) {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }

    fn allowance(&self, scale: f64) -> f64 {
        self.tolerance * (1.0 + scale.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    NoViolationFound,
    Violated,
}

/// Interval of admissible supporting constants `C_x` at one grid point.
/// `None` stands for an unbounded side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstantInterval {
    pub x: f64,
    pub c_lo: Option<f64>,
    pub c_hi: Option<f64>,
}

/// Grid points where no single `C_x` fits: the quotient at `y_below < x`
/// exceeds the quotient at `y_above > x` by `-slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperquadraticWitness {
    pub x: f64,
    pub y_below: f64,
    pub y_above: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperquadraticCertificate {
    pub function: String,
    pub grid: Vec<f64>,
    pub c_intervals: Vec<ConstantInterval>,
    pub verdict: Verdict,
    pub witness: Option<SuperquadraticWitness>,
}

/// Counterexample point for a two-point inequality: `slack = rhs − lhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformConvexityReport {
    pub function: String,
    pub modulus: String,
    pub verdict: Verdict,
    pub evaluations: usize,
    pub min_slack: f64,
    pub max_slack: f64,
    /// Worst violation, ties broken by smallest grid index.
    pub witness: Option<Witness>,
}

/// Decides, per grid point, whether some `C_x` satisfies
/// `f(y) >= f(x) + C_x (y − x) + f(|y − x|)` for every grid `y`.
///
/// For `y > x` the inequality caps `C_x` by the quotient
/// `q(x, y) = [f(y) − f(x) − f(|y−x|)] / (y − x)`; for `y < x` the same quotient
/// is a floor. The point fails when the floor exceeds the cap.
pub fn check_superquadratic(
    f: &FunctionSpec,
    cfg: &GridConfig,
) -> Result<SuperquadraticCertificate> {
    cfg.validate(16)?;
    if f.domain_low != 0.0 {
        return Err(Error::Domain(format!(
            "superquadratic check needs a domain starting at 0, {} starts at {}",
            f.label, f.domain_low
        )));
    }
    let grid = f.grid(cfg.grid_size, cfg.span);
    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let quotient = |i: usize, j: usize| {
        let d = grid[j] - grid[i];
        (values[j] - values[i] - f.eval(d.abs())) / d
    };

    let mut intervals = Vec::with_capacity(grid.len());
    let mut worst: Option<(f64, SuperquadraticWitness)> = None;
    for i in 0..grid.len() {
        let below =
            (0..i)
                .map(|j| (quotient(i, j), j))
                .fold(None, |acc: Option<(f64, usize)>, (q, j)| match acc {
                    Some((best, _)) if best >= q => acc,
                    _ => Some((q, j)),
                });
        let above = (i + 1..grid.len()).map(|j| (quotient(i, j), j)).fold(
            None,
            |acc: Option<(f64, usize)>, (q, j)| match acc {
                Some((best, _)) if best <= q => acc,
                _ => Some((q, j)),
            },
        );
        intervals.push(ConstantInterval {
            x: grid[i],
            c_lo: below.map(|b| b.0),
            c_hi: above.map(|a| a.0),
        });
        if let (Some((lo, jb)), Some((hi, ja))) = (below, above) {
            let gap = lo - hi;
            if gap > cfg.allowance(lo.abs().max(hi.abs())) && worst.is_none_or(|(w, _)| gap > w) {
                worst = Some((
                    gap,
                    SuperquadraticWitness {
                        x: grid[i],
                        y_below: grid[jb],
                        y_above: grid[ja],
                        slack: hi - lo,
                    },
                ));
            }
        }
    }

    Ok(SuperquadraticCertificate {
        function: f.label.clone(),
        grid,
        c_intervals: intervals,
        verdict: if worst.is_some() {
            Verdict::Violated
        } else {
            Verdict::NoViolationFound
        },
        witness: worst.map(|(_, w)| w),
    })
}

/// Grid check of `t f(x) + (1−t) f(y) >= f(tx + (1−t)y) + t(1−t) Φ(|x − y|)`.
pub fn check_uniform_convexity(
    f: &FunctionSpec,
    phi: &ModulusSpec,
    cfg: &GridConfig,
) -> Result<UniformConvexityReport> {
    cfg.validate(2)?;
    let grid = f.grid(cfg.grid_size, cfg.span);
    let spread = grid.last().unwrap() - grid[0];
    if spread >= phi.domain_high() {
        return Err(Error::Domain(format!(
            "modulus {} is not defined on the full spread {spread}",
            phi.label()
        )));
    }
    let values: Vec<f64> = grid.iter().map(|&x| f.eval(x)).collect();
    let ts: Vec<f64> = (1..=cfg.grid_size)
        .map(|i| i as f64 / (cfg.grid_size + 1) as f64)
        .collect();

    let mut evaluations = 0;
    let mut min_slack = f64::INFINITY;
    let mut max_slack = f64::NEG_INFINITY;
    let mut witness: Option<Witness> = None;
    for a in 0..grid.len() {
        for b in a + 1..grid.len() {
            let (x, y) = (grid[a], grid[b]);
            let modulus = phi.eval((x - y).abs());
            for &t in &ts {
                let rhs = t * values[a] + (1.0 - t) * values[b];
                let lhs = f.eval(t * x + (1.0 - t) * y) + t * (1.0 - t) * modulus;
                let slack = rhs - lhs;
                evaluations += 1;
                min_slack = min_slack.min(slack);
                max_slack = max_slack.max(slack);
                if slack < -cfg.allowance(rhs) && witness.is_none_or(|w| slack < w.slack) {
                    witness = Some(Witness {
                        x,
                        y,
                        t,
                        lhs,
                        rhs,
                        slack,
                    });
                }
            }
        }
    }

    Ok(UniformConvexityReport {
        function: f.label.clone(),
        modulus: phi.label(),
        verdict: if witness.is_some() {
            Verdict::Violated
        } else {
            Verdict::NoViolationFound
        },
        evaluations,
        min_slack,
        max_slack,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyWitness {
    pub property: String,
    pub points: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusPropertyReport {
    pub modulus: String,
    pub flags: ModulusFlags,
    pub witnesses: Vec<PropertyWitness>,
}

/// Grid checks for monotonicity, `Φ(0) = 0`, midpoint convexity and
/// submultiplicativity `Φ(AB) <= Φ(A)Φ(B)` over `[0, span]`.
pub fn check_modulus_properties(
    phi: &ModulusSpec,
    cfg: &GridConfig,
) -> Result<ModulusPropertyReport> {
    cfg.validate(2)?;
    let span = match phi.domain_high() {
        h if h.is_finite() => h * (1.0 - 1e-12),
        _ => cfg.span,
    };
    let step = span / (cfg.grid_size - 1) as f64;
    let grid: Vec<f64> = (0..cfg.grid_size).map(|i| i as f64 * step).collect();
    let values: Vec<f64> = grid.iter().map(|&x| phi.eval(x)).collect();
    let mut witnesses = Vec::new();

    let increasing =
        match (0..grid.len() - 1).find(|&i| values[i + 1] < values[i] - cfg.allowance(values[i])) {
            Some(i) => {
                witnesses.push(PropertyWitness {
                    property: "increasing".into(),
                    points: vec![grid[i], grid[i + 1]],
                    lhs: values[i],
                    rhs: values[i + 1],
                });
                false
            }
            None => true,
        };

    let zero_at_zero = values[0].abs() <= cfg.tolerance;
    if !zero_at_zero {
        witnesses.push(PropertyWitness {
            property: "zero_at_zero".into(),
            points: vec![0.0],
            lhs: values[0],
            rhs: 0.0,
        });
    }

    let mut convex = true;
    'outer: for a in 0..grid.len() {
        for b in a + 2..grid.len() {
            let lhs = phi.eval(0.5 * (grid[a] + grid[b]));
            let rhs = 0.5 * (values[a] + values[b]);
            if lhs > rhs + cfg.allowance(rhs) {
                witnesses.push(PropertyWitness {
                    property: "convex".into(),
                    points: vec![grid[a], grid[b]],
                    lhs,
                    rhs,
                });
                convex = false;
                break 'outer;
            }
        }
    }

    let mut submultiplicative = true;
    'outer: for a in 1..grid.len() {
        for b in a..grid.len() {
            let product = grid[a] * grid[b];
            if product > span {
                break;
            }
            let lhs = phi.eval(product);
            let rhs = values[a] * values[b];
            if lhs > rhs + cfg.allowance(rhs) {
                witnesses.push(PropertyWitness {
                    property: "submultiplicative".into(),
                    points: vec![grid[a], grid[b]],
                    lhs,
                    rhs,
                });
                submultiplicative = false;
                break 'outer;
            }
        }
    }

    Ok(ModulusPropertyReport {
        modulus: phi.label(),
        flags: ModulusFlags {
            increasing: PropertyFlag::from_bool(increasing),
            zero_at_zero: PropertyFlag::from_bool(zero_at_zero),
            convex: PropertyFlag::from_bool(convex),
            submultiplicative: PropertyFlag::from_bool(submultiplicative),
        },
        witnesses,
    })
}

/// `scale · x^exponent` on `[0, ∞)`.
pub fn make_power_function(exponent: f64, scale: f64) -> Result<FunctionSpec> {
    if !(exponent >= 1.0 && exponent.is_finite()) || !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!(
            "power function needs exponent >= 1 and scale > 0, got {exponent}, {scale}"
        )));
    }
    let label = if scale == 1.0 {
        format!("power:{exponent}")
    } else {
        format!("scaled_power:{scale}:{exponent}")
    };
    let mut f = FunctionSpec::new(label, 0.0, f64::INFINITY, move |x| scale * x.powf(exponent))?
        .with_derivative(move |x| scale * exponent * x.powf(exponent - 1.0));
    f.power = Some((scale, exponent));
    Ok(f)
}

/// A function with a declared strong-convexity constant: the gap
/// `Σα g(x) − g(Σαx)` dominates `constant · Σα (x − Σαx)²`.
#[derive(Debug, Clone)]
pub struct StronglyConvexFunction {
    pub function: FunctionSpec,
    pub constant: f64,
}

impl StronglyConvexFunction {
    pub fn modulus(&self) -> ModulusSpec {
        ModulusSpec::power(self.constant, 2.0).expect("constant is positive")
    }
}

const DERIVATIVE_STEP: f64 = 1e-6;

/// `g(x) = x φ(x)` for convex `φ` on `[0, b)` with `φ′(0) > 0`, which is
/// strongly convex with constant `φ′(0)`.
pub fn make_example1(phi: &FunctionSpec) -> Result<StronglyConvexFunction> {
    if phi.domain_low != 0.0 {
        return Err(Error::Domain(format!(
            "{} must be defined on [0, b), starts at {}",
            phi.label, phi.domain_low
        )));
    }
    let slope = phi
        .derivative(0.0)
        .unwrap_or_else(|| (phi.eval(DERIVATIVE_STEP) - phi.eval(0.0)) / DERIVATIVE_STEP);
    if !(slope > 0.0) {
        return Err(Error::Domain(format!(
            "{} has derivative {slope} at 0, needs a positive one",
            phi.label
        )));
    }
    let inner = phi.clone();
    let mut g = FunctionSpec::new(format!("x*{}", phi.label), 0.0, phi.domain_high, move |x| {
        x * inner.eval(x)
    })?;
    if phi.has_derivative() {
        let inner = phi.clone();
        g = g.with_derivative(move |x| inner.eval(x) + x * inner.derivative(x).unwrap());
    }
    Ok(StronglyConvexFunction {
        function: g,
        constant: slope,
    })
}

pub fn exp_function() -> FunctionSpec {
    FunctionSpec::new("exp", 0.0, f64::INFINITY, f64::exp)
        .expect("valid domain")
        .with_derivative(f64::exp)
}

/// `φ(x) = 1 + c·x`.
pub fn affine_function(c: f64) -> FunctionSpec {
    FunctionSpec::new(format!("affine:{c}"), 0.0, f64::INFINITY, move |x| {
        1.0 + c * x
    })
    .expect("valid domain")
    .with_derivative(move |_| c)
}

/// A registry entry: the function and, where known analytically, a modulus
/// it is uniformly convex with.
#[derive(Debug, Clone)]
pub struct RegisteredFunction {
    pub function: FunctionSpec,
    pub declared_modulus: Option<ModulusSpec>,
}

fn parse_number(name: &str, text: &str) -> Result<f64> {
    text.parse::<f64>()
        .map_err(|_| Error::Config(format!("`{name}`: `{text}` is not a number")))
}

/// Looks up `power:<p>`, `scaled_power:<m>:<p>`, `example1_exp` or
/// `example1_affine:<c>`.
///
/// Powers `x^p` with `p >= 2` are superquadratic on `[0, ∞)` and carry the
/// declared modulus `m·x^p`; the `example1_*` functions carry `φ′(0)·x²`.
pub fn function_from_name(name: &str) -> Result<RegisteredFunction> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["power", p] => {
            let p = parse_number(name, p)?;
            let function = make_power_function(p, 1.0)?;
            let declared_modulus = if p >= 2.0 { Some(ModulusSpec::power(1.0, p)?) } else { None };
            Ok(RegisteredFunction {
                function,
                declared_modulus,
            })
        }
        ["scaled_power", m, p] => {
            let (m, p) = (parse_number(name, m)?, parse_number(name, p)?);
            let function = make_power_function(p, m)?;
            let declared_modulus = if p >= 2.0 { Some(ModulusSpec::power(m, p)?) } else { None };
            Ok(RegisteredFunction {
                function,
                declared_modulus,
            })
        }
        ["example1_exp"] => {
            let g = make_example1(&exp_function())?;
            Ok(RegisteredFunction {
                declared_modulus: Some(g.modulus()),
                function: g.function,
            })
        }
        ["example1_affine", c] => {
            let g = make_example1(&affine_function(parse_number(name, c)?))?;
            Ok(RegisteredFunction {
                declared_modulus: Some(g.modulus()),
                function: g.function,
            })
        }
        _ => Err(Error::Config(format!(
            "unknown function `{name}` (expected power:<p>, scaled_power:<m>:<p>, example1_exp or example1_affine:<c>)"
        ))),
    }
}

/// Moduli by name: the power forms become [`ModulusForm::Power`], anything
/// else in the registry is wrapped as a generic modulus with unchecked flags.
pub fn modulus_from_name(name: &str) -> Result<ModulusSpec> {
    let parts: Vec<&str> = name.split(':').collect();
    match parts.as_slice() {
        ["power", p] => ModulusSpec::power(1.0, parse_number(name, p)?),
        ["scaled_power", m, p] => {
            ModulusSpec::power(parse_number(name, m)?, parse_number(name, p)?)
        }
        _ => ModulusSpec::generic(function_from_name(name)?.function),
    }
}
