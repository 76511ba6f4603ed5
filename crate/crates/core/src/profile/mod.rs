//! Proportionality factors `α(y)` and the generating function they induce.
//!
//! For `α = α(y) > 0` the equation `div(α⁻¹∇u) + αu = 0` has the explicit
//! particular solution `u0 = √α f0` with
//!
//! ```text
//! f0(y) = (c1 sin 𝒜(y) + c2 cos 𝒜(y)) / √α(y),    𝒜' = α,
//! ```
//!
//! which solves `f0'' − r f0 = 0` for the potential
//! `r = −½ α''/α + ¾ (α'/α)² − α²`. The pair `(f0, i/f0)` generates the
//! Vekua equation `W_z̄ = (i f0'/(2 f0)) W̄`.

pub mod expr;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, AntiderivativeTable, Interval};
use crate::spline::CubicSpline;
pub use expr::Expr;

/// Number of points in the validity scan performed on every profile.
pub const DOMAIN_SCAN_POINTS: usize = 1025;

/// Fraction of the positivity window trimmed at ends where `f0` vanishes.
pub const ROOT_MARGIN_FRACTION: f64 = 0.02;

#[derive(Debug, Clone)]
enum AlphaKind {
    InvSqrt,
    Constant(f64),
    Expression { expr: Expr, first: Expr, second: Expr },
    Tabulated(CubicSpline),
}

/// An evaluable proportionality factor `α(y)` on a closed domain, with its
/// first two derivatives.
#[derive(Debug, Clone)]
pub struct AlphaProfile {
    name: String,
    domain: Interval,
    kind: AlphaKind,
}

impl AlphaProfile {
    /// `α(y) = 1/√(1 − y²)`; the domain must lie inside `(−1, 1)`.
    pub fn example(domain: Interval) -> Result<Self> {
        Self::validated("1/sqrt(1-y^2)".into(), domain, AlphaKind::InvSqrt)
    }

    pub fn constant(k: f64, domain: Interval) -> Result<Self> {
        Self::validated(format!("{k}"), domain, AlphaKind::Constant(k))
    }

    /// Parses `src` (see [`expr`] for the grammar) and differentiates it
    /// symbolically.
    pub fn parse(src: &str, domain: Interval) -> Result<Self> {
        let expr = Expr::parse(src)?;
        let first = expr.derivative();
        let second = first.derivative();
        Self::validated(src.to_string(), domain, AlphaKind::Expression { expr, first, second })
    }

    /// Natural cubic spline through `(y, α)` samples. The domain must lie
    /// within the sampled range.
    pub fn tabulated(y: &[f64], alpha: &[f64], domain: Interval) -> Result<Self> {
        let spline = CubicSpline::natural(y, alpha)?;
        if domain.lo() < spline.lo() || domain.hi() > spline.hi() {
            return Err(Error::InvalidInput(format!(
                "domain [{}, {}] exceeds tabulated range [{}, {}]",
                domain.lo(),
                domain.hi(),
                spline.lo(),
                spline.hi()
            )));
        }
        Self::validated("tabulated".into(), domain, AlphaKind::Tabulated(spline))
    }

    fn validated(name: String, domain: Interval, kind: AlphaKind) -> Result<Self> {
        let profile = Self { name, domain, kind };
        for y in domain.linspace(DOMAIN_SCAN_POINTS) {
            let (a, d, dd) = profile.eval_all(y);
            if !a.is_finite() {
                return Err(Error::Domain { at: y, reason: format!("is not finite ({a})") });
            }
            if a == 0.0 {
                return Err(Error::Domain { at: y, reason: "vanishes".into() });
            }
            if !(d.is_finite() && dd.is_finite()) {
                return Err(Error::Domain { at: y, reason: "has a non-finite derivative".into() });
            }
        }
        // A sign change between scan points is a zero crossing.
        let samples: Vec<f64> = domain.linspace(DOMAIN_SCAN_POINTS);
        for w in samples.windows(2) {
            if profile.value(w[0]).signum() != profile.value(w[1]).signum() {
                return Err(Error::Domain { at: w[1], reason: "changes sign".into() });
            }
        }
        Ok(profile)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn is_constant(&self) -> Option<f64> {
        match self.kind {
            AlphaKind::Constant(k) => Some(k),
            _ => None,
        }
    }

    fn eval_all(&self, y: f64) -> (f64, f64, f64) {
        match &self.kind {
            AlphaKind::InvSqrt => {
                let s = 1.0 - y * y;
                let a = 1.0 / s.sqrt();
                let a3 = a * a * a;
                (a, y * a3, (1.0 + 2.0 * y * y) * a3 * a * a)
            }
            AlphaKind::Constant(k) => (*k, 0.0, 0.0),
            AlphaKind::Expression { expr, first, second } => (expr.eval(y), first.eval(y), second.eval(y)),
            AlphaKind::Tabulated(s) => s.eval_all(y),
        }
    }

    pub fn value(&self, y: f64) -> f64 {
        self.eval_all(y).0
    }

    pub fn deriv(&self, y: f64) -> f64 {
        self.eval_all(y).1
    }

    pub fn second_deriv(&self, y: f64) -> f64 {
        self.eval_all(y).2
    }

    /// Schrödinger potential `r(y) = −½ α''/α + ¾ (α'/α)² − α²`.
    pub fn potential(&self, y: f64) -> Result<f64> {
        if !self.domain.contains(y) {
            return Err(Error::Domain { at: y, reason: "is evaluated outside its domain".into() });
        }
        let (a, d, dd) = self.eval_all(y);
        let l = d / a;
        Ok(-0.5 * dd / a + 0.75 * l * l - a * a)
    }

    /// `𝒜` with `𝒜(y_ref) = 0`, tabulated at the default node count.
    pub fn antiderivative(&self, y_ref: f64) -> Result<AntiderivativeTable> {
        self.antiderivative_with(y_ref, quadrature::DEFAULT_TOL, quadrature::DEFAULT_NODES)
    }

    pub fn antiderivative_with(&self, y_ref: f64, tol: f64, nodes: usize) -> Result<AntiderivativeTable> {
        self.domain.check(y_ref)?;
        quadrature::cumulative_smooth(|y| self.value(y), |y| self.deriv(y), y_ref, self.domain, tol, nodes)
    }
}

impl fmt::Display for AlphaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "α(y) = {} on [{}, {}]", self.name, self.domain.lo(), self.domain.hi())
    }
}

#[derive(Debug, Clone)]
enum Source {
    Alpha {
        alpha: AlphaProfile,
        phase: AntiderivativeTable,
        c1: f64,
        c2: f64,
        // +1 or −1 so that f0 > 0 on the window
        sign: f64,
        y_ref: f64,
    },
    Unit,
}

/// The positive particular solution `f0` and its positivity window.
#[derive(Debug, Clone)]
pub struct GeneratingFunction {
    source: Source,
    positivity: Interval,
    working: Interval,
}

/// Numerical settings used when building a [`GeneratingFunction`].
#[derive(Debug, Clone, Copy)]
pub struct GeneratorOptions {
    pub tol: f64,
    pub nodes: usize,
    /// Point the positivity window must contain; defaults to `y_ref`.
    pub anchor: Option<f64>,
}

impl Default for GeneratorOptions {
    fn default() -> Self {
        Self { tol: quadrature::DEFAULT_TOL, nodes: quadrature::DEFAULT_NODES, anchor: None }
    }
}

impl GeneratingFunction {
    pub fn new(alpha: AlphaProfile, c1: f64, c2: f64, y_ref: f64) -> Result<Self> {
        Self::with_options(alpha, c1, c2, y_ref, GeneratorOptions::default())
    }

    pub fn with_options(alpha: AlphaProfile, c1: f64, c2: f64, y_ref: f64, opts: GeneratorOptions) -> Result<Self> {
        if c1 == 0.0 && c2 == 0.0 {
            return Err(Error::DegenerateConstants);
        }
        if !(c1.is_finite() && c2.is_finite()) {
            return Err(Error::InvalidInput("c1 and c2 must be finite".into()));
        }
        let domain = alpha.domain();
        if let Some(y) = domain.linspace(DOMAIN_SCAN_POINTS).into_iter().find(|&y| alpha.value(y) <= 0.0) {
            return Err(Error::Domain { at: y, reason: "must be positive to define √α".into() });
        }
        let phase = alpha.antiderivative_with(y_ref, opts.tol, opts.nodes)?;
        let anchor = opts.anchor.unwrap_or(y_ref);
        domain.check(anchor)?;
        let s = |y: f64| {
            let a = phase.value_unchecked(y);
            c1 * a.sin() + c2 * a.cos()
        };
        let at_anchor = s(anchor);
        if at_anchor == 0.0 || at_anchor.abs() < 1e-14 * c1.hypot(c2) {
            return Err(Error::NoPositivityWindow { at: anchor });
        }
        let sign = at_anchor.signum();
        let signed = |y: f64| sign * s(y);
        let scan = domain.linspace(4 * quadrature::DEFAULT_NODES + 1);
        let (hi, hi_root) = window_edge(&signed, anchor, scan.iter().copied().filter(|&y| y > anchor));
        let (lo, lo_root) = window_edge(&signed, anchor, scan.iter().rev().copied().filter(|&y| y < anchor));
        let positivity = Interval::new(lo.min(anchor), hi.max(anchor))
            .map_err(|_| Error::NoPositivityWindow { at: anchor })?;
        let margin = ROOT_MARGIN_FRACTION * positivity.len();
        let working = Interval::new(
            if lo_root { lo + margin } else { lo },
            if hi_root { hi - margin } else { hi },
        )
        .map_err(|_| Error::NoPositivityWindow { at: anchor })?;
        Ok(Self { source: Source::Alpha { alpha, phase, c1, c2, sign, y_ref }, positivity, working })
    }

    /// The trivial generator `f0 ≡ 1` on `domain`, for which formal powers
    /// reduce to `a (z − z0)ⁿ`.
    pub fn unit(domain: Interval) -> Self {
        Self { source: Source::Unit, positivity: domain, working: domain }
    }

    pub fn alpha(&self) -> Option<&AlphaProfile> {
        match &self.source {
            Source::Alpha { alpha, .. } => Some(alpha),
            Source::Unit => None,
        }
    }

    /// `(c1, c2)` after the global sign flip that makes `f0` positive.
    pub fn constants(&self) -> Option<(f64, f64)> {
        match &self.source {
            Source::Alpha { c1, c2, sign, .. } => Some((sign * c1, sign * c2)),
            Source::Unit => None,
        }
    }

    pub fn y_ref(&self) -> Option<f64> {
        match &self.source {
            Source::Alpha { y_ref, .. } => Some(*y_ref),
            Source::Unit => None,
        }
    }

    pub fn phase(&self) -> Option<&AntiderivativeTable> {
        match &self.source {
            Source::Alpha { phase, .. } => Some(phase),
            Source::Unit => None,
        }
    }

    /// Maximal interval around the anchor on which `f0 > 0` (closed; `f0`
    /// may vanish at an endpoint that is not a domain boundary).
    pub fn positivity(&self) -> Interval {
        self.positivity
    }

    /// The positivity window trimmed away from zeros of `f0`; recursion
    /// tables and evaluation domains live here.
    pub fn working_interval(&self) -> Interval {
        self.working
    }

    /// `√α f0 = ±(c1 sin 𝒜 + c2 cos 𝒜)` and its `y`-derivative.
    pub fn amplitude(&self, y: f64) -> (f64, f64) {
        match &self.source {
            Source::Alpha { alpha, phase, c1, c2, sign, .. } => {
                let a = phase.value_unchecked(y);
                let (sa, ca) = a.sin_cos();
                let s = sign * (c1 * sa + c2 * ca);
                let ds = sign * alpha.value(y) * (c1 * ca - c2 * sa);
                (s, ds)
            }
            Source::Unit => (1.0, 0.0),
        }
    }

    /// `f0(y)` and `f0'(y)`.
    pub fn f0_with_deriv(&self, y: f64) -> (f64, f64) {
        match &self.source {
            Source::Alpha { alpha, .. } => {
                let (s, ds) = self.amplitude(y);
                let a = alpha.value(y);
                let da = alpha.deriv(y);
                let root = a.sqrt();
                (s / root, ds / root - 0.5 * s * da / (a * root))
            }
            Source::Unit => (1.0, 0.0),
        }
    }

    pub fn f0(&self, y: f64) -> f64 {
        self.f0_with_deriv(y).0
    }

    pub fn f0_deriv(&self, y: f64) -> f64 {
        self.f0_with_deriv(y).1
    }

    /// Coefficient `f0_z̄/f0 = i f0'/(2 f0)` of the Vekua equation.
    pub fn vekua_coefficient(&self, y: f64) -> Result<Complex64> {
        self.positivity.check(y)?;
        let (f, d) = self.f0_with_deriv(y);
        Ok(Complex64::new(0.0, 0.5 * d / f))
    }
}

// Walks the scan points away from the anchor and returns the window edge
// and whether it is a zero of `s` (rather than a domain boundary).
fn window_edge<S, I>(s: &S, anchor: f64, scan: I) -> (f64, bool)
where
    S: Fn(f64) -> f64,
    I: Iterator<Item = f64>,
{
    let mut inside = anchor;
    for y in scan {
        if s(y) <= 0.0 {
            let (mut a, mut b) = (inside, y);
            while (b - a).abs() > 1e-12 {
                let m = 0.5 * (a + b);
                if s(m) > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            return (a, true);
        }
        inside = y;
    }
    (inside, false)
}

/// Profile configuration as it appears in JSON run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub alpha: AlphaSpec,
    pub domain: [f64; 2],
    pub c1: f64,
    pub c2: f64,
    /// Normalization point of `𝒜`; defaults to the domain midpoint.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_ref: Option<f64>,
    /// Point the positivity window must contain; defaults to `y_ref`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaSpec {
    Preset {
        preset: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        k: Option<f64>,
    },
    Expression {
        expression: String,
    },
    Tabulated {
        tabulated: TabulatedAlpha,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedAlpha {
    pub y: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl ProfileConfig {
    pub fn domain(&self) -> Result<Interval> {
        Interval::new(self.domain[0], self.domain[1])
    }

    pub fn y_ref(&self) -> Result<f64> {
        Ok(self.y_ref.unwrap_or(self.domain()?.midpoint()))
    }

    pub fn alpha(&self) -> Result<AlphaProfile> {
        let domain = self.domain()?;
        match &self.alpha {
            AlphaSpec::Preset { preset, k } => match preset.as_str() {
                "example_inv_sqrt" => AlphaProfile::example(domain),
                "constant" => {
                    let k = k.ok_or_else(|| Error::InvalidInput("preset 'constant' needs a value for k".into()))?;
                    AlphaProfile::constant(k, domain)
                }
                other => Err(Error::InvalidInput(format!("unknown alpha preset '{other}'"))),
            },
            AlphaSpec::Expression { expression } => AlphaProfile::parse(expression, domain),
            AlphaSpec::Tabulated { tabulated } => AlphaProfile::tabulated(&tabulated.y, &tabulated.alpha, domain),
        }
    }

    pub fn generating_function(&self, tol: f64, nodes: usize) -> Result<GeneratingFunction> {
        let opts = GeneratorOptions { tol, nodes, anchor: self.anchor };
        GeneratingFunction::with_options(self.alpha()?, self.c1, self.c2, self.y_ref()?, opts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn example_domain() -> Interval {
        Interval::new(-0.95, 0.95).unwrap()
    }

    fn example() -> GeneratingFunction {
        GeneratingFunction::new(AlphaProfile::example(example_domain()).unwrap(), 0.0, 1.0, 0.0).unwrap()
    }

    #[test]
    fn parsed_example_profile() {
        let a = AlphaProfile::parse("1/sqrt(1-y^2)", example_domain()).unwrap();
        assert!((a.value(0.5) - 1.1547005).abs() < 5e-8);
        let preset = AlphaProfile::example(example_domain()).unwrap();
        for &y in &[-0.9, -0.2, 0.0, 0.5, 0.93] {
            assert!((a.value(y) - preset.value(y)).abs() < 1e-14);
            assert!((a.deriv(y) - preset.deriv(y)).abs() < 1e-12 * preset.deriv(y).abs().max(1.0));
            assert!((a.second_deriv(y) - preset.second_deriv(y)).abs() < 1e-11 * preset.second_deriv(y).abs());
        }
    }

    #[test]
    fn constant_and_vanishing_profiles() {
        let c = AlphaProfile::parse("2", Interval::new(-1.0, 1.0).unwrap()).unwrap();
        assert_eq!(c.deriv(0.3), 0.0);
        assert_eq!(c.second_deriv(0.3), 0.0);
        assert!(AlphaProfile::parse("y", Interval::new(0.5, 2.0).unwrap()).is_ok());
        match AlphaProfile::parse("y", Interval::new(-1.0, 1.0).unwrap()) {
            Err(Error::Domain { at, .. }) => assert_eq!(at, 0.0),
            other => panic!("{other:?}"),
        }
        // zero crossing between scan points
        assert!(matches!(
            AlphaProfile::parse("y - 0.0001", Interval::new(-1.0, 1.0).unwrap()),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(
            AlphaProfile::parse("1/sqrt(1-y^2)", Interval::new(-1.0, 1.0).unwrap()),
            Err(Error::Domain { .. })
        ));
        assert!(matches!(AlphaProfile::parse("1 +", example_domain()), Err(Error::Parse { .. })));
    }

    #[test]
    fn antiderivative_matches_arcsin() {
        let a = AlphaProfile::example(example_domain()).unwrap();
        let t = a.antiderivative(0.0).unwrap();
        assert_eq!(t.eval(0.0).unwrap(), 0.0);
        assert!((t.eval(0.5).unwrap() - std::f64::consts::FRAC_PI_6).abs() < 1e-12);
        for k in 0..41 {
            let y = -0.95 + 1.9 * k as f64 / 40.0;
            assert!((t.eval(y).unwrap() - y.asin()).abs() < 1e-11, "y = {y}");
        }
        for &n in t.nodes().iter().skip(1).take(t.nodes().len() - 2) {
            assert!((t.deriv(n).unwrap() - a.value(n)).abs() <= 1e-8 * a.value(n));
        }
        let k = AlphaProfile::constant(1.5, example_domain()).unwrap();
        let tk = k.antiderivative(0.25).unwrap();
        assert_eq!(tk.eval(0.25).unwrap(), 0.0);
        for &y in &[-0.9, 0.0, 0.7] {
            assert!((tk.eval(y).unwrap() - 1.5 * (y - 0.25)).abs() < 1e-13);
        }
    }

    #[test]
    fn example_generating_function() {
        let g = example();
        assert!((g.f0(0.5) - 0.8059274).abs() < 5e-8);
        assert_eq!(g.positivity(), example_domain());
        assert_eq!(g.working_interval(), example_domain());
        for k in 0..39 {
            let y = -0.95 + 0.05 * k as f64;
            let exact = (1.0 - y * y).powf(0.75);
            assert!((g.f0(y) - exact).abs() < 1e-10, "y = {y}");
            let d = -1.5 * y * (1.0 - y * y).powf(-0.25);
            assert!((g.f0_deriv(y) - d).abs() < 1e-9, "y = {y}");
        }
    }

    #[test]
    fn algebraic_identity_and_fd_derivative() {
        let alpha = AlphaProfile::parse("1 + 0.3*sin(2*y)", Interval::new(-1.0, 1.0).unwrap()).unwrap();
        let g = GeneratingFunction::new(alpha.clone(), 0.4, 1.0, 0.0).unwrap();
        let (c1, c2) = g.constants().unwrap();
        let phase = g.phase().unwrap();
        let w = g.positivity();
        for y in w.linspace(57).into_iter().skip(2).take(53) {
            let a = phase.eval(y).unwrap();
            let s = c1 * a.sin() + c2 * a.cos();
            let lhs = alpha.value(y) * g.f0(y).powi(2);
            assert!((lhs - s * s).abs() < 1e-12 * s * s + 1e-15);
            let h = 1e-4;
            let fd = (g.f0(y - 2.0 * h) - 8.0 * g.f0(y - h) + 8.0 * g.f0(y + h) - g.f0(y + 2.0 * h)) / (12.0 * h);
            assert!((fd - g.f0_deriv(y)).abs() <= 1e-6 * g.f0_deriv(y).abs().max(1.0));
        }
    }

    #[test]
    fn constant_alpha_generator_with_anchor() {
        let k = 1.3;
        let domain = Interval::new(0.0, 2.0).unwrap();
        let alpha = AlphaProfile::constant(k, domain).unwrap();
        assert!(matches!(
            GeneratingFunction::new(alpha.clone(), 1.0, 0.0, 0.0),
            Err(Error::NoPositivityWindow { .. })
        ));
        let opts = GeneratorOptions { anchor: Some(0.8), ..Default::default() };
        let g = GeneratingFunction::with_options(alpha, 1.0, 0.0, 0.0, opts).unwrap();
        let w = g.positivity();
        assert!(w.lo().abs() < 1e-11);
        assert_eq!(w.hi(), 2.0);
        let t = g.working_interval();
        assert!(t.lo() > 0.03 && t.hi() == 2.0);
        for &y in &[0.2, 1.0, 1.9] {
            assert!((g.f0(y) - (k * y).sin() / k.sqrt()).abs() < 1e-12);
        }
        // the window closes at the next zero of sin(k y)
        let alpha = AlphaProfile::constant(2.0, Interval::new(0.0, 3.0).unwrap()).unwrap();
        let opts = GeneratorOptions { anchor: Some(0.5), ..Default::default() };
        let g = GeneratingFunction::with_options(alpha, 1.0, 0.0, 0.0, opts).unwrap();
        assert!((g.positivity().hi() - FRAC_PI_2).abs() < 1e-11);
    }

    #[test]
    fn degenerate_constants_rejected() {
        let alpha = AlphaProfile::example(example_domain()).unwrap();
        assert!(matches!(GeneratingFunction::new(alpha, 0.0, 0.0, 0.0), Err(Error::DegenerateConstants)));
    }

    #[test]
    fn sign_flip_makes_f0_positive() {
        let alpha = AlphaProfile::example(example_domain()).unwrap();
        let g = GeneratingFunction::new(alpha, 0.0, -2.0, 0.0).unwrap();
        assert!((g.f0(0.3) - 2.0 * (1.0 - 0.09f64).powf(0.75)).abs() < 1e-10);
        assert_eq!(g.constants(), Some((0.0, 2.0)));
    }

    #[test]
    fn negative_alpha_rejected() {
        let alpha = AlphaProfile::constant(-1.0, example_domain()).unwrap();
        assert!(matches!(GeneratingFunction::new(alpha, 0.0, 1.0, 0.0), Err(Error::Domain { .. })));
    }

    #[test]
    fn schrodinger_potential() {
        let k = AlphaProfile::constant(3.0, example_domain()).unwrap();
        assert_eq!(k.potential(0.1).unwrap(), -9.0);
        let a = AlphaProfile::example(example_domain()).unwrap();
        assert!((a.potential(0.0).unwrap() + 1.5).abs() < 1e-15);
        assert!(matches!(a.potential(0.97), Err(Error::Domain { .. })));
        // f0'' = r f0 on the positivity window
        let g = example();
        let h = 1e-3;
        for k in 0..37 {
            let y = -0.9 + 0.05 * k as f64;
            let f = |t: f64| g.f0(t);
            let d2 = (-f(y + 2.0 * h) + 16.0 * f(y + h) - 30.0 * f(y) + 16.0 * f(y - h) - f(y - 2.0 * h)) / (12.0 * h * h);
            let r = a.potential(y).unwrap();
            assert!((d2 - r * f(y)).abs() < 1e-6 * (r * f(y)).abs().max(1.0), "y = {y}");
        }
    }

    #[test]
    fn vekua_coefficients() {
        let g = example();
        assert_eq!(g.vekua_coefficient(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let c = g.vekua_coefficient(0.5).unwrap();
        assert_eq!(c.re, 0.0);
        assert!((c.im + 0.5).abs() < 1e-10);
        let alpha = AlphaProfile::constant(1.0, Interval::new(0.0, 3.0).unwrap()).unwrap();
        let opts = GeneratorOptions { anchor: Some(1.0), ..Default::default() };
        let g1 = GeneratingFunction::with_options(alpha, 1.0, 0.0, 0.0, opts).unwrap();
        let c = g1.vekua_coefficient(FRAC_PI_4).unwrap();
        assert!((c - Complex64::new(0.0, 0.5)).norm() < 1e-12);
        assert!(matches!(g1.vekua_coefficient(3.5), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn tabulated_profile_tracks_the_sampled_function() {
        let ys: Vec<f64> = (0..401).map(|i| -1.0 + i as f64 * 0.005).collect();
        let al: Vec<f64> = ys.iter().map(|y| 2.0 + y.sin()).collect();
        let p = AlphaProfile::tabulated(&ys, &al, Interval::new(-0.9, 0.9).unwrap()).unwrap();
        assert!((p.value(0.3) - (2.0 + 0.3f64.sin())).abs() < 1e-9);
        assert!((p.deriv(0.3) - 0.3f64.cos()).abs() < 1e-6);
        assert!((p.potential(0.3).unwrap() - {
            let (a, d, dd) = (2.0 + 0.3f64.sin(), 0.3f64.cos(), -(0.3f64.sin()));
            -0.5 * dd / a + 0.75 * (d / a).powi(2) - a * a
        }).abs() < 1e-3);
        assert!(AlphaProfile::tabulated(&ys, &al, Interval::new(-1.5, 0.9).unwrap()).is_err());
    }

    #[test]
    fn config_roundtrip_and_presets() {
        let json = r#"{"alpha": {"preset": "example_inv_sqrt"}, "domain": [-0.95, 0.95], "c1": 0, "c2": 1, "y_ref": 0}"#;
        let cfg: ProfileConfig = serde_json::from_str(json).unwrap();
        let g = cfg.generating_function(1e-10, 2049).unwrap();
        assert!((g.f0(0.5) - 0.8059274).abs() < 5e-8);
        let json = r#"{"alpha": {"expression": "1/sqrt(1-y^2)"}, "domain": [-0.95, 0.95], "c1": 0, "c2": 1}"#;
        let cfg: ProfileConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.y_ref().unwrap(), 0.0);
        let json = r#"{"alpha": {"preset": "constant", "k": 2}, "domain": [0, 1.5], "c1": 1, "c2": 0, "y_ref": 0, "anchor": 0.7}"#;
        let cfg: ProfileConfig = serde_json::from_str(json).unwrap();
        assert_eq!(cfg.alpha().unwrap().is_constant(), Some(2.0));
        let json = r#"{"alpha": {"tabulated": {"y": [0, 1, 2, 3], "alpha": [1, 1.1, 1.2, 1.3]}}, "domain": [0, 3], "c1": 0, "c2": 1}"#;
        let cfg: ProfileConfig = serde_json::from_str(json).unwrap();
        assert!((cfg.alpha().unwrap().value(1.5) - 1.15).abs() < 1e-12);
        let bad = r#"{"alpha": {"preset": "nope"}, "domain": [0, 1], "c1": 0, "c2": 1}"#;
        let cfg: ProfileConfig = serde_json::from_str(bad).unwrap();
        assert!(cfg.alpha().is_err());
    }
}
