//! Formal powers for the separable generating function `f0(y)`.
//!
//! With `Y(0) = Ỹ(0) = 1` and, for `n ≥ 1`,
//!
//! ```text
//! Y(n)(y) = n ∫_{y0}^{y} Y(n-1)(η) f0²(η) dη      n odd
//! Y(n)(y) = n ∫_{y0}^{y} Y(n-1)(η) / f0²(η) dη    n even
//! ```
//!
//! (and `Ỹ` with the two weights swapped), the formal power is
//!
//! ```text
//! *Z(n)(a, z0; z) = a1 Σ C(n,k) (x − x0)^(n−k) i^k Y(k)
//!                + i a2 Σ C(n,k) (x − x0)^(n−k) i^k Ỹ(k),     a = a1 + i a2.
//! ```
//!
//! These are solutions of the second-kind equation
//! `ω_z̄ = ((1 − f0²)/(1 + f0²)) ∂_z̄ ω̄`; the matching solution of the Vekua
//! equation `W_z̄ = (f0_z̄/f0) W̄` is `W = f0 Re ω + i Im ω / f0`.
//!
//! Each `Y(n)` is a quintic Hermite table of the previous level's
//! interpolant, so building `n_max` levels costs `O(n_max · nodes)`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{diff_x, diff_y, nan_max, ComplexField, Grid, ScalarField};
use crate::profile::GeneratingFunction;
use crate::quadrature::{self, AntiderivativeTable, Interval};

#[derive(Debug, Clone)]
enum Level {
    One,
    Table(AntiderivativeTable),
}

impl Level {
    fn value(&self, y: f64) -> f64 {
        match self {
            Level::One => 1.0,
            Level::Table(t) => t.value_unchecked(y),
        }
    }

    fn deriv(&self, y: f64) -> f64 {
        match self {
            Level::One => 0.0,
            Level::Table(t) => t.deriv_unchecked(y),
        }
    }
}

/// Which recursive family: `Y` starts with the weight `f0²`, `Ỹ` with `1/f0²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Plain,
    Tilde,
}

/// Numerical settings for [`RecursionTable::build_with`].
#[derive(Debug, Clone, Copy)]
pub struct RecursionOptions {
    pub tol: f64,
    pub nodes: usize,
}

impl Default for RecursionOptions {
    fn default() -> Self {
        Self { tol: quadrature::DEFAULT_TOL, nodes: quadrature::DEFAULT_NODES }
    }
}

/// Tabulated `Y(n)` and `Ỹ(n)` for `n = 0..=n_max`.
#[derive(Debug, Clone)]
pub struct RecursionTable {
    g: GeneratingFunction,
    y0: f64,
    n_max: usize,
    interval: Interval,
    plain: Vec<Level>,
    tilde: Vec<Level>,
}

// `f0²` when `squared` is true, `1/f0²` otherwise, with its derivative.
fn weight(g: &GeneratingFunction, squared: bool, y: f64) -> (f64, f64) {
    let (f, d) = g.f0_with_deriv(y);
    if squared {
        (f * f, 2.0 * f * d)
    } else {
        let inv = 1.0 / (f * f);
        (inv, -2.0 * d * inv / f)
    }
}

fn uses_square(family: Family, n: usize) -> bool {
    (n % 2 == 1) == (family == Family::Plain)
}

fn build_family(
    g: &GeneratingFunction,
    family: Family,
    y0: f64,
    n_max: usize,
    interval: Interval,
    opts: RecursionOptions,
) -> Result<Vec<Level>> {
    let mut levels = vec![Level::One];
    for n in 1..=n_max {
        let squared = uses_square(family, n);
        let prev = &levels[n - 1];
        let scale = n as f64;
        let f = |y: f64| scale * prev.value(y) * weight(g, squared, y).0;
        let df = |y: f64| {
            let (w, dw) = weight(g, squared, y);
            scale * (prev.deriv(y) * w + prev.value(y) * dw)
        };
        let table = quadrature::cumulative_smooth(f, df, y0, interval, opts.tol, opts.nodes)?;
        levels.push(Level::Table(table));
    }
    Ok(levels)
}

impl RecursionTable {
    pub fn build(g: GeneratingFunction, y0: f64, n_max: usize) -> Result<Self> {
        Self::build_with(g, y0, n_max, RecursionOptions::default())
    }

    /// Tables live on `g.working_interval()`, which must contain `y0`.
    pub fn build_with(g: GeneratingFunction, y0: f64, n_max: usize, opts: RecursionOptions) -> Result<Self> {
        let interval = g.working_interval();
        interval.check(y0)?;
        let (plain, tilde) = std::thread::scope(|s| {
            let plain = s.spawn(|| build_family(&g, Family::Plain, y0, n_max, interval, opts));
            let tilde = build_family(&g, Family::Tilde, y0, n_max, interval, opts);
            (plain.join().expect("recursion worker panicked"), tilde)
        });
        Ok(Self { plain: plain?, tilde: tilde?, g, y0, n_max, interval })
    }

    pub fn generator(&self) -> &GeneratingFunction {
        &self.g
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    fn levels(&self, family: Family) -> &[Level] {
        match family {
            Family::Plain => &self.plain,
            Family::Tilde => &self.tilde,
        }
    }

    fn check(&self, n: usize, y: f64) -> Result<()> {
        if n > self.n_max {
            return Err(Error::NOrderExceeded { requested: n, available: self.n_max });
        }
        self.interval.check(y)
    }

    /// `Y(n)(y)` or `Ỹ(n)(y)`.
    pub fn value(&self, family: Family, n: usize, y: f64) -> Result<f64> {
        self.check(n, y)?;
        Ok(self.levels(family)[n].value(y))
    }

    /// `d/dy` of level `n` from the recursion identity
    /// `Y(n)' = n Y(n−1) w(y)`.
    pub fn derivative(&self, family: Family, n: usize, y: f64) -> Result<f64> {
        self.check(n, y)?;
        Ok(self.derivative_unchecked(family, n, y))
    }

    fn derivative_unchecked(&self, family: Family, n: usize, y: f64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        let w = weight(&self.g, uses_square(family, n), y).0;
        n as f64 * self.levels(family)[n - 1].value(y) * w
    }

    /// Derivative of the stored interpolant (not the recursion identity).
    pub fn table_derivative(&self, family: Family, n: usize, y: f64) -> Result<f64> {
        self.check(n, y)?;
        Ok(self.levels(family)[n].deriv(y))
    }
}

fn binomials(n: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(n + 1);
    let mut v = 1.0;
    c.push(v);
    for k in 1..=n {
        v = v * (n + 1 - k) as f64 / k as f64;
        c.push(v.round());
    }
    c
}

// (Re, Im) of i^k.
fn i_pow(k: usize) -> (f64, f64) {
    match k % 4 {
        0 => (1.0, 0.0),
        1 => (0.0, 1.0),
        2 => (-1.0, 0.0),
        _ => (0.0, -1.0),
    }
}

/// Evaluator for `*Z(n)(a, z0; ·)` on `{(x, y) : y ∈ working interval}`.
#[derive(Debug, Clone)]
pub struct FormalPowerBasis {
    table: RecursionTable,
    z0: Complex64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Sums {
    // Σ C X^{n−k} i^k L(k) split into real and imaginary parts
    re: f64,
    im: f64,
}

impl FormalPowerBasis {
    pub fn build(g: GeneratingFunction, z0: Complex64, n_max: usize) -> Result<Self> {
        Self::build_with(g, z0, n_max, RecursionOptions::default())
    }

    pub fn build_with(g: GeneratingFunction, z0: Complex64, n_max: usize, opts: RecursionOptions) -> Result<Self> {
        let table = RecursionTable::build_with(g, z0.im, n_max, opts)?;
        Ok(Self { table, z0 })
    }

    pub fn from_table(table: RecursionTable, x0: f64) -> Self {
        let z0 = Complex64::new(x0, table.y0());
        Self { table, z0 }
    }

    pub fn table(&self) -> &RecursionTable {
        &self.table
    }

    pub fn generator(&self) -> &GeneratingFunction {
        self.table.generator()
    }

    pub fn z0(&self) -> Complex64 {
        self.z0
    }

    pub fn n_max(&self) -> usize {
        self.table.n_max()
    }

    /// `y`-range on which the basis can be evaluated.
    pub fn y_interval(&self) -> Interval {
        self.table.interval()
    }

    fn sums(&self, family: Family, n: usize, x: f64, y: f64, with_grad: bool) -> (Sums, Sums, Sums) {
        let levels = self.table.levels(family);
        let dx = x - self.z0.re;
        let c = binomials(n);
        let mut xp = vec![1.0; n + 1];
        for j in 1..=n {
            xp[j] = xp[j - 1] * dx;
        }
        let (mut v, mut gx, mut gy) = (Sums::default(), Sums::default(), Sums::default());
        for k in 0..=n {
            let (ir, ii) = i_pow(k);
            let lk = levels[k].value(y);
            let t = c[k] * xp[n - k] * lk;
            v.re += ir * t;
            v.im += ii * t;
            if with_grad {
                if k < n {
                    let tx = c[k] * (n - k) as f64 * xp[n - k - 1] * lk;
                    gx.re += ir * tx;
                    gx.im += ii * tx;
                }
                if k > 0 {
                    let ty = c[k] * xp[n - k] * self.table.derivative_unchecked(family, k, y);
                    gy.re += ir * ty;
                    gy.im += ii * ty;
                }
            }
        }
        (v, gx, gy)
    }

    fn combine(a: Complex64, plain: Sums, tilde: Sums) -> Complex64 {
        // a1 (P + iQ) + i a2 (P̃ + iQ̃)
        Complex64::new(a.re * plain.re - a.im * tilde.im, a.re * plain.im + a.im * tilde.re)
    }

    fn check(&self, n: usize, z: Complex64) -> Result<()> {
        if !z.re.is_finite() {
            return Err(Error::InvalidInput(format!("non-finite evaluation point {z}")));
        }
        self.table.check(n, z.im)
    }

    /// `*Z(n)(a, z0; z)`.
    pub fn formal_power(&self, a: Complex64, n: usize, z: Complex64) -> Result<Complex64> {
        self.check(n, z)?;
        let (p, _, _) = self.sums(Family::Plain, n, z.re, z.im, false);
        let (t, _, _) = self.sums(Family::Tilde, n, z.re, z.im, false);
        Ok(Self::combine(a, p, t))
    }

    /// `(∂x, ∂y)` of `*Z(n)(a, z0; ·)` at `z`, analytic in both directions.
    pub fn formal_power_grad(&self, a: Complex64, n: usize, z: Complex64) -> Result<(Complex64, Complex64)> {
        self.check(n, z)?;
        let (_, px, py) = self.sums(Family::Plain, n, z.re, z.im, true);
        let (_, tx, ty) = self.sums(Family::Tilde, n, z.re, z.im, true);
        Ok((Self::combine(a, px, tx), Self::combine(a, py, ty)))
    }

    /// Value and gradient together.
    pub fn formal_power_with_grad(
        &self,
        a: Complex64,
        n: usize,
        z: Complex64,
    ) -> Result<(Complex64, Complex64, Complex64)> {
        self.check(n, z)?;
        let (p, px, py) = self.sums(Family::Plain, n, z.re, z.im, true);
        let (t, tx, ty) = self.sums(Family::Tilde, n, z.re, z.im, true);
        Ok((Self::combine(a, p, t), Self::combine(a, px, tx), Self::combine(a, py, ty)))
    }

    /// The Vekua solution `W = f0 Re ω + i Im ω / f0` for `ω = *Z(n)(a, z0; ·)`.
    pub fn first_kind(&self, a: Complex64, n: usize, z: Complex64) -> Result<Complex64> {
        let w = self.formal_power(a, n, z)?;
        let f = self.generator().f0(z.im);
        Ok(Complex64::new(f * w.re, w.im / f))
    }

    /// `φ = Re *Z(n)(a, z0; ·)` and `ψ = Im *Z(n)(a, z0; ·)` with analytic
    /// gradients. Points outside the basis domain evaluate to NaN.
    pub fn second_kind_pair(self: &Arc<Self>, a: Complex64, n: usize) -> Result<(ScalarField, ScalarField)> {
        self.check(n, self.z0)?;
        let (b1, b2, b3, b4) = (self.clone(), self.clone(), self.clone(), self.clone());
        let nan = Complex64::new(f64::NAN, f64::NAN);
        let grad = move |b: &Self, x: f64, y: f64| {
            b.formal_power_grad(a, n, Complex64::new(x, y)).unwrap_or((nan, nan))
        };
        let phi = ScalarField::with_grad(
            move |x, y| b1.formal_power(a, n, Complex64::new(x, y)).map_or(f64::NAN, |w| w.re),
            move |x, y| {
                let (gx, gy) = grad(&b2, x, y);
                (gx.re, gy.re)
            },
        );
        let psi = ScalarField::with_grad(
            move |x, y| b3.formal_power(a, n, Complex64::new(x, y)).map_or(f64::NAN, |w| w.im),
            move |x, y| {
                let (gx, gy) = grad(&b4, x, y);
                (gx.im, gy.im)
            },
        );
        Ok((phi, psi))
    }

    /// `ω = *Z(n)(a, z0; ·)` as a complex field with analytic partials.
    pub fn omega_field(self: &Arc<Self>, a: Complex64, n: usize, grid: Grid) -> Result<ComplexField> {
        self.check(n, self.z0)?;
        let (b1, b2) = (self.clone(), self.clone());
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Ok(ComplexField::with_partials(
            move |x, y| b1.formal_power(a, n, Complex64::new(x, y)).unwrap_or(nan),
            move |x, y| b2.formal_power_grad(a, n, Complex64::new(x, y)).unwrap_or((nan, nan)),
            grid,
        ))
    }

    /// The first-kind solution `W = f0 Re ω + i Im ω / f0` as a complex
    /// field with analytic partials.
    pub fn first_kind_field(self: &Arc<Self>, a: Complex64, n: usize, grid: Grid) -> Result<ComplexField> {
        self.check(n, self.z0)?;
        let (b1, b2) = (self.clone(), self.clone());
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Ok(ComplexField::with_partials(
            move |x, y| b1.first_kind(a, n, Complex64::new(x, y)).unwrap_or(nan),
            move |x, y| {
                let Ok((w, wx, wy)) = b2.formal_power_with_grad(a, n, Complex64::new(x, y)) else {
                    return (nan, nan);
                };
                let (f, df) = b2.generator().f0_with_deriv(y);
                let px = Complex64::new(f * wx.re, wx.im / f);
                let py = Complex64::new(df * w.re + f * wy.re, wy.im / f - df * w.im / (f * f));
                (px, py)
            },
            grid,
        ))
    }

    /// Sup over the grid interior of the residuals of
    /// `φx = ψy / f0²`, `φy = −ψx / f0²` for `φ + iψ = *Z(n)(a, z0; ·)`,
    /// with derivatives by central differences.
    pub fn second_kind_residual(&self, a: Complex64, n: usize, grid: &Grid) -> Result<f64> {
        for (x, y) in grid.points() {
            self.check(n, Complex64::new(x, y))?;
        }
        let h = grid.fd_step();
        let omega = |x: f64, y: f64| {
            let (p, _, _) = self.sums(Family::Plain, n, x, y, false);
            let (t, _, _) = self.sums(Family::Tilde, n, x, y, false);
            Self::combine(a, p, t)
        };
        Ok(grid.sup_interior(|x, y| {
            let wx = diff_x(omega, x, y, h);
            let wy = diff_y(omega, x, y, h);
            let f2 = self.generator().f0(y).powi(2);
            let r1 = wx.re - wy.im / f2;
            let r2 = wy.re + wx.im / f2;
            r1.abs().max(r2.abs())
        }))
    }

    /// Largest relative deviation of `*Z(n)(a, z0; z)` from `a (z − z0)ⁿ`
    /// over eight points on the circle `|z − z0| = radius`. Exactly zero for
    /// `f0 ≡ 1`; informative only otherwise.
    pub fn normalization_deviation(&self, a: Complex64, n: usize, radius: f64) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for j in 0..8 {
            let d = Complex64::from_polar(radius, j as f64 * std::f64::consts::FRAC_PI_4);
            let z = self.z0 + d;
            let reference = a * d.powu(n as u32);
            let v = self.formal_power(a, n, z)?;
            worst = nan_max(worst, (v - reference).norm() / reference.norm());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rect;
    use crate::profile::AlphaProfile;

    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn example(n_max: usize) -> FormalPowerBasis {
        let alpha = AlphaProfile::example(Interval::new(-0.95, 0.95).unwrap()).unwrap();
        let g = GeneratingFunction::new(alpha, 0.0, 1.0, 0.0).unwrap();
        FormalPowerBasis::build(g, Complex64::new(0.0, 0.0), n_max).unwrap()
    }

    fn y1_closed(y: f64) -> f64 {
        let s = 1.0 - y * y;
        y * s.powf(1.5) / 4.0 + 3.0 * y * s.sqrt() / 8.0 + 0.375 * y.asin()
    }

    #[test]
    fn first_levels_match_closed_forms() {
        let b = example(2);
        let t = b.table();
        assert!((t.value(Family::Plain, 1, 0.5).unwrap() - 0.4399192).abs() < 5e-8);
        assert!((t.value(Family::Tilde, 1, 0.5).unwrap() - 0.5773503).abs() < 5e-8);
        for k in 0..37 {
            let y = -0.9 + 0.05 * k as f64;
            assert_eq!(t.value(Family::Plain, 0, y).unwrap(), 1.0);
            assert_eq!(t.value(Family::Tilde, 0, y).unwrap(), 1.0);
            assert!((t.value(Family::Plain, 1, y).unwrap() - y1_closed(y)).abs() < 1e-11);
            assert!((t.value(Family::Tilde, 1, y).unwrap() - y / (1.0 - y * y).sqrt()).abs() < 1e-10);
            assert!((t.value(Family::Tilde, 2, y).unwrap() - (y * y - 0.5 * y.powi(4))).abs() < 1e-10);
        }
    }

    #[test]
    fn levels_vanish_at_base_point() {
        let b = example(6);
        for n in 1..=6 {
            assert_eq!(b.table().value(Family::Plain, n, 0.0).unwrap(), 0.0);
            assert_eq!(b.table().value(Family::Tilde, n, 0.0).unwrap(), 0.0);
            assert_eq!(b.formal_power(ONE, n, b.z0()).unwrap(), Complex64::new(0.0, 0.0));
            assert_eq!(b.formal_power(I, n, b.z0()).unwrap(), Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn formal_power_spot_values() {
        let b = example(3);
        let z = Complex64::new(0.3, 0.5);
        let v = b.formal_power(I, 1, z).unwrap();
        assert!((v - Complex64::new(-0.5773503, 0.3)).norm() < 5e-8);
        let v = b.formal_power(I, 2, z).unwrap();
        assert!((v - Complex64::new(-0.3464102, -0.12875)).norm() < 5e-8);
        for a in [ONE, I, Complex64::new(-0.7, 2.5)] {
            assert_eq!(b.formal_power(a, 0, z).unwrap(), a);
            assert_eq!(b.formal_power_grad(a, 0, z).unwrap(), (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn gradient_of_first_power() {
        let b = example(1);
        for &(x, y) in &[(0.3, 0.5), (-0.6, -0.2), (0.1, 0.85)] {
            let (gx, gy) = b.formal_power_grad(I, 1, Complex64::new(x, y)).unwrap();
            assert!((gx - I).norm() < 1e-14);
            assert!((gy - Complex64::new(-(1.0 - y * y).powf(-1.5), 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn errors_for_order_and_domain() {
        let b = example(2);
        assert!(matches!(
            b.formal_power(ONE, 3, Complex64::new(0.0, 0.1)),
            Err(Error::NOrderExceeded { requested: 3, available: 2 })
        ));
        assert!(matches!(b.formal_power(ONE, 1, Complex64::new(0.0, 0.96)), Err(Error::OutOfDomain { .. })));
        let alpha = AlphaProfile::example(Interval::new(-0.95, 0.95).unwrap()).unwrap();
        let g = GeneratingFunction::new(alpha, 0.0, 1.0, 0.0).unwrap();
        assert!(matches!(RecursionTable::build(g, 0.99, 2), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn parity_of_levels_for_even_weight() {
        let b = example(4);
        let t = b.table();
        for &y in &[0.1, 0.45, 0.8] {
            for n in 1..=4 {
                let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
                for fam in [Family::Plain, Family::Tilde] {
                    let (p, m) = (t.value(fam, n, y).unwrap(), t.value(fam, n, -y).unwrap());
                    assert!((m - sign * p).abs() < 1e-12 * p.abs().max(1.0), "n={n} y={y}");
                }
            }
        }
    }

    #[test]
    fn recursion_identity_matches_table_derivative() {
        let b = example(5);
        let t = b.table();
        for k in 0..50 {
            let y = -0.9 + 1.8 * k as f64 / 49.0;
            for n in 1..=5 {
                for fam in [Family::Plain, Family::Tilde] {
                    let exact = t.derivative(fam, n, y).unwrap();
                    let table = t.table_derivative(fam, n, y).unwrap();
                    assert!((exact - table).abs() < 1e-9 * exact.abs().max(1.0), "n={n} y={y}");
                }
            }
        }
    }

    #[test]
    fn unit_generator_gives_complex_powers() {
        let g = GeneratingFunction::unit(Interval::new(-1.0, 1.0).unwrap());
        let z0 = Complex64::new(0.2, -0.1);
        let b = FormalPowerBasis::build(g, z0, 6).unwrap();
        for n in 0..=6 {
            for &(x, y) in &[(0.5, 0.3), (-0.7, 0.8), (0.1, -0.9)] {
                let z = Complex64::new(x, y);
                for a in [ONE, I, Complex64::new(0.3, -1.2)] {
                    let exact = a * (z - z0).powu(n as u32);
                    assert!((b.formal_power(a, n, z).unwrap() - exact).norm() < 1e-12);
                }
            }
            assert!(b.normalization_deviation(ONE, n, 0.1).unwrap() < 1e-12);
        }
    }

    #[test]
    fn second_kind_system_holds() {
        let b = example(4);
        let grid = Grid::new(Rect::new(-0.6, 0.6, -0.8, 0.8).unwrap(), 9, 11).unwrap();
        for n in 0..=4 {
            for a in [ONE, I] {
                let r = b.second_kind_residual(a, n, &grid).unwrap();
                assert!(r < 1e-6, "n={n} a={a} residual {r}");
            }
        }
    }

    #[test]
    fn second_kind_pair_of_first_power() {
        let b = Arc::new(example(1));
        let (phi, psi) = b.second_kind_pair(ONE, 1).unwrap();
        for &(x, y) in &[(0.3, 0.5), (-0.4, -0.7)] {
            assert!((phi.at(x, y) - x).abs() < 1e-15);
            assert!((psi.at(x, y) - y1_closed(y)).abs() < 1e-11);
            let (px, _) = phi.grad(x, y);
            let (_, qy) = psi.grad(x, y);
            let f2 = b.generator().f0(y).powi(2);
            assert!((px - qy / f2).abs() < 1e-12);
        }
        assert!(phi.at(0.0, 0.97).is_nan());
        assert!(matches!(b.second_kind_pair(ONE, 2), Err(Error::NOrderExceeded { .. })));
    }

    #[test]
    fn field_partials_match_differences() {
        let b = Arc::new(example(5));
        let grid = Grid::new(Rect::new(-0.5, 0.5, -0.7, 0.7).unwrap(), 5, 5).unwrap();
        for n in 0..=5 {
            for a in [ONE, I] {
                for field in [b.omega_field(a, n, grid.clone()).unwrap(), b.first_kind_field(a, n, grid.clone()).unwrap()] {
                    for (x, y) in grid.interior() {
                        let (ax, ay) = field.partials(x, y);
                        let (fx, fy) = field.fd_partials(x, y);
                        assert!((ax - fx).norm() < 1e-8 && (ay - fy).norm() < 1e-8, "n={n} ({x},{y})");
                    }
                }
            }
        }
    }

    #[test]
    fn binomials_are_exact_up_to_forty() {
        let c = binomials(40);
        assert_eq!(c[20], 137846528820.0);
        assert_eq!(c[1], 40.0);
        assert_eq!(c[40], 1.0);
        let c = binomials(6);
        assert_eq!(c, vec![1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0]);
    }
}
