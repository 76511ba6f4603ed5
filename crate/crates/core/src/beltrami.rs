//! Complete systems of Beltrami fields for `α = α(y)`.
//!
//! The scalar elements are `B3 = √α f0 Re *Z(n)(a, z0; z)` for `a ∈ {1, i}`;
//! each solves `div(α⁻¹ ∇B3) + α B3 = 0`, and
//!
//! ```text
//! B1 = −∂y B3 / α      B2 = ∂x B3 / α
//! ```
//!
//! completes a field with `rot B + α B = 0`. Elements are ordered
//! `B3[0,u], B3[1,u], B3[1,v], B3[2,u], B3[2,v], …`; the `a = i` element of
//! order zero vanishes identically and is left out.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{diff_x, diff_y, Grid, ScalarField};
use crate::formal_powers::{FormalPowerBasis, RecursionOptions};
use crate::profile::{AlphaProfile, GeneratingFunction};
use crate::vekua::{second_order_residual, ConductivityPair};

/// Which coefficient `a` the element is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    /// `a = 1`
    U,
    /// `a = i`
    V,
}

impl Flavor {
    pub fn coefficient(self) -> Complex64 {
        match self {
            Flavor::U => Complex64::new(1.0, 0.0),
            Flavor::V => Complex64::new(0.0, 1.0),
        }
    }

    fn tag(self) -> &'static str {
        match self {
            Flavor::U => "u",
            Flavor::V => "v",
        }
    }
}

/// Position of element `(n, flavor)` in the emitted order, if it exists.
pub fn element_index(n: usize, flavor: Flavor) -> Option<usize> {
    match (n, flavor) {
        (0, Flavor::U) => Some(0),
        (0, Flavor::V) => None,
        (n, Flavor::U) => Some(2 * n - 1),
        (n, Flavor::V) => Some(2 * n),
    }
}

/// Number of elements for orders `0..=n_max`.
pub fn element_count(n_max: usize) -> usize {
    2 * n_max + 1
}

/// A real field `(B1, B2, B3)` in the plane.
pub trait VectorField: Send + Sync {
    fn components(&self, x: f64, y: f64) -> [f64; 3];

    /// `(∂x B3, ∂y B3)` when known in closed form.
    fn b3_gradient(&self, _x: f64, _y: f64) -> Option<(f64, f64)> {
        None
    }
}

/// `B3 = √α f0 Re *Z(n)(a, z0; ·)` with its analytic gradient.
#[derive(Clone)]
pub struct ScalarBasisElement {
    basis: Arc<FormalPowerBasis>,
    alpha: AlphaProfile,
    n: usize,
    flavor: Flavor,
}

impl fmt::Debug for ScalarBasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarBasisElement").field("n", &self.n).field("flavor", &self.flavor).finish()
    }
}

impl ScalarBasisElement {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn name(&self) -> String {
        format!("B3[{},{}]", self.n, self.flavor.tag())
    }

    pub fn alpha(&self) -> &AlphaProfile {
        &self.alpha
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64> {
        let w = self.basis.formal_power(self.flavor.coefficient(), self.n, Complex64::new(x, y))?;
        Ok(self.basis.generator().amplitude(y).0 * w.re)
    }

    /// `(∂x B3, ∂y B3)`.
    pub fn grad(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        let (w, wx, wy) = self.basis.formal_power_with_grad(self.flavor.coefficient(), self.n, Complex64::new(x, y))?;
        let (s, ds) = self.basis.generator().amplitude(y);
        Ok((s * wx.re, ds * w.re + s * wy.re))
    }

    /// Value and gradient; NaN outside the domain.
    fn eval_with_grad(&self, x: f64, y: f64) -> (f64, f64, f64) {
        match self.basis.formal_power_with_grad(self.flavor.coefficient(), self.n, Complex64::new(x, y)) {
            Ok((w, wx, wy)) => {
                let (s, ds) = self.basis.generator().amplitude(y);
                (s * w.re, s * wx.re, ds * w.re + s * wy.re)
            }
            Err(_) => (f64::NAN, f64::NAN, f64::NAN),
        }
    }

    pub fn to_scalar_field(&self) -> ScalarField {
        let (a, b) = (self.clone(), self.clone());
        ScalarField::with_grad(
            move |x, y| a.eval(x, y).unwrap_or(f64::NAN),
            move |x, y| b.grad(x, y).unwrap_or((f64::NAN, f64::NAN)),
        )
    }

    pub fn field(&self) -> BeltramiFieldElement {
        BeltramiFieldElement { source: self.clone() }
    }
}

/// The Beltrami field generated by one scalar element.
#[derive(Debug, Clone)]
pub struct BeltramiFieldElement {
    source: ScalarBasisElement,
}

impl BeltramiFieldElement {
    pub fn source(&self) -> &ScalarBasisElement {
        &self.source
    }
}

impl VectorField for BeltramiFieldElement {
    fn components(&self, x: f64, y: f64) -> [f64; 3] {
        let (b3, gx, gy) = self.source.eval_with_grad(x, y);
        let a = self.source.alpha.value(y);
        [-gy / a, gx / a, b3]
    }

    fn b3_gradient(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        let (_, gx, gy) = self.source.eval_with_grad(x, y);
        Some((gx, gy))
    }
}

/// The scalar elements for orders `0..=n_max` sharing one set of tables.
#[derive(Debug, Clone)]
pub struct BeltramiBasis {
    basis: Arc<FormalPowerBasis>,
    elements: Vec<ScalarBasisElement>,
}

impl BeltramiBasis {
    pub fn build(g: GeneratingFunction, z0: Complex64, n_max: usize) -> Result<Self> {
        Self::build_with(g, z0, n_max, RecursionOptions::default())
    }

    /// Requires a generator built from a profile `α`.
    pub fn build_with(g: GeneratingFunction, z0: Complex64, n_max: usize, opts: RecursionOptions) -> Result<Self> {
        let alpha = g
            .alpha()
            .cloned()
            .ok_or_else(|| Error::InvalidInput("a Beltrami basis needs a generator built from a profile".into()))?;
        let basis = Arc::new(FormalPowerBasis::build_with(g, z0, n_max, opts)?);
        let mut elements = Vec::with_capacity(element_count(n_max));
        for n in 0..=n_max {
            for flavor in [Flavor::U, Flavor::V] {
                if element_index(n, flavor).is_some() {
                    elements.push(ScalarBasisElement { basis: basis.clone(), alpha: alpha.clone(), n, flavor });
                }
            }
        }
        Ok(Self { basis, elements })
    }

    pub fn elements(&self) -> &[ScalarBasisElement] {
        &self.elements
    }

    pub fn element(&self, n: usize, flavor: Flavor) -> Result<&ScalarBasisElement> {
        if n > self.n_max() {
            return Err(Error::NOrderExceeded { requested: n, available: self.n_max() });
        }
        element_index(n, flavor)
            .map(|i| &self.elements[i])
            .ok_or_else(|| Error::InvalidInput("the order-zero element with a = i vanishes identically".into()))
    }

    pub fn formal_powers(&self) -> &Arc<FormalPowerBasis> {
        &self.basis
    }

    pub fn generator(&self) -> &GeneratingFunction {
        self.basis.generator()
    }

    pub fn alpha(&self) -> &AlphaProfile {
        self.elements[0].alpha()
    }

    pub fn n_max(&self) -> usize {
        self.basis.n_max()
    }

    pub fn z0(&self) -> Complex64 {
        self.basis.z0()
    }
}

/// Sup-norms of `∂yB3 + αB1`, `−∂xB3 + αB2` and `∂xB2 − ∂yB1 + αB3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub first: f64,
    pub second: f64,
    pub third: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        crate::field::nan_max(crate::field::nan_max(self.first, self.second), self.third)
    }
}

/// The three scalar Beltrami residuals over the grid interior. `∇B3` is
/// analytic when the field provides it; all other derivatives are central
/// differences.
pub fn beltrami_residual(field: &dyn VectorField, alpha: &AlphaProfile, grid: &Grid) -> Residuals {
    let h = grid.fd_step();
    let comp = |i: usize| move |x: f64, y: f64| field.components(x, y)[i];
    let b3_grad = |x, y| {
        field.b3_gradient(x, y).unwrap_or_else(|| (diff_x(comp(2), x, y, h), diff_y(comp(2), x, y, h)))
    };
    let first = grid.sup_interior(|x, y| {
        let b = field.components(x, y);
        (b3_grad(x, y).1 + alpha.value(y) * b[0]).abs()
    });
    let second = grid.sup_interior(|x, y| {
        let b = field.components(x, y);
        (-b3_grad(x, y).0 + alpha.value(y) * b[1]).abs()
    });
    let third = grid.sup_interior(|x, y| {
        let b = field.components(x, y);
        (diff_x(comp(1), x, y, h) - diff_y(comp(0), x, y, h) + alpha.value(y) * b[2]).abs()
    });
    Residuals { first, second, third }
}

/// `sup |∂x(αB1) + ∂y(αB2)|` over the grid interior.
pub fn div_alpha_residual(field: &dyn VectorField, alpha: &AlphaProfile, grid: &Grid) -> f64 {
    let h = grid.fd_step();
    grid.sup_interior(|x, y| {
        let ab1 = |x: f64, y: f64| alpha.value(y) * field.components(x, y)[0];
        let ab2 = |x: f64, y: f64| alpha.value(y) * field.components(x, y)[1];
        (diff_x(ab1, x, y, h) + diff_y(ab2, x, y, h)).abs()
    })
}

/// `sup |(div α⁻¹ grad + α) u|` over the grid interior.
pub fn maineq_residual(u: &ScalarField, alpha: &AlphaProfile, grid: &Grid) -> f64 {
    second_order_residual(u, &alpha_pair(alpha).p, &alpha_pair(alpha).q, grid)
}

/// `p = 1/α`, `q = α` with analytic gradients.
pub fn alpha_pair(alpha: &AlphaProfile) -> ConductivityPair {
    let (a1, a2, a3, a4) = (alpha.clone(), alpha.clone(), alpha.clone(), alpha.clone());
    ConductivityPair::new(
        ScalarField::with_grad(move |_, y| 1.0 / a1.value(y), move |_, y| (0.0, -a2.deriv(y) / a2.value(y).powi(2))),
        ScalarField::with_grad(move |_, y| a3.value(y), move |_, y| (0.0, a4.deriv(y))),
    )
}

/// `sup |αB3|` over all grid points, the natural scale for the third
/// residual.
pub fn alpha_b3_scale(field: &dyn VectorField, alpha: &AlphaProfile, grid: &Grid) -> f64 {
    grid.sup(|x, y| (alpha.value(y) * field.components(x, y)[2]).abs())
}

/// A truncated series `Σ aₙ B3[n,u] + bₙ B3[n,v]`. `b0` multiplies the
/// vanishing order-zero element and has no effect.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    basis: BeltramiBasis,
    coefficients: Vec<(f64, f64)>,
}

impl SeriesSolution {
    pub fn new(basis: BeltramiBasis, coefficients: Vec<(f64, f64)>) -> Result<Self> {
        if coefficients.len() > basis.n_max() + 1 {
            return Err(Error::NOrderExceeded { requested: coefficients.len() - 1, available: basis.n_max() });
        }
        Ok(Self { basis, coefficients })
    }

    /// Coefficients in element order `[B3[0,u], B3[1,u], B3[1,v], …]`.
    pub fn from_element_vector(basis: BeltramiBasis, c: &[f64]) -> Result<Self> {
        if c.is_empty() || c.len() % 2 == 0 {
            return Err(Error::DimensionMismatch(format!("{} coefficients do not fill orders 0..=n", c.len())));
        }
        let mut pairs = vec![(c[0], 0.0)];
        pairs.extend(c[1..].chunks(2).map(|p| (p[0], p[1])));
        Self::new(basis, pairs)
    }

    pub fn coefficients(&self) -> &[(f64, f64)] {
        &self.coefficients
    }

    pub fn element_vector(&self) -> Vec<f64> {
        let mut out = vec![self.coefficients.first().map_or(0.0, |c| c.0)];
        for &(a, b) in self.coefficients.iter().skip(1) {
            out.push(a);
            out.push(b);
        }
        out
    }

    pub fn basis(&self) -> &BeltramiBasis {
        &self.basis
    }

    /// `n` of the highest retained order.
    pub fn order(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    fn terms(&self) -> impl Iterator<Item = (f64, &ScalarBasisElement)> + '_ {
        self.coefficients.iter().enumerate().flat_map(move |(n, &(a, b))| {
            let u = self.basis.element(n, Flavor::U).ok().map(|e| (a, e));
            let v = if n == 0 { None } else { self.basis.element(n, Flavor::V).ok().map(|e| (b, e)) };
            u.into_iter().chain(v)
        })
    }

    /// `B3` and its gradient at `(x, y)`.
    pub fn eval_with_grad(&self, x: f64, y: f64) -> Result<(f64, f64, f64)> {
        let mut acc = (0.0, 0.0, 0.0);
        for (c, e) in self.terms() {
            if c == 0.0 {
                e.eval(x, y)?;
                continue;
            }
            let v = e.eval(x, y)?;
            let (gx, gy) = e.grad(x, y)?;
            acc = (acc.0 + c * v, acc.1 + c * gx, acc.2 + c * gy);
        }
        if self.coefficients.is_empty() {
            self.basis.formal_powers().table().interval().check(y)?;
        }
        Ok(acc)
    }

    pub fn series_eval(&self, z: Complex64) -> Result<f64> {
        Ok(self.eval_with_grad(z.re, z.im)?.0)
    }

    pub fn series_field(&self, z: Complex64) -> Result<[f64; 3]> {
        let (b3, gx, gy) = self.eval_with_grad(z.re, z.im)?;
        let a = self.basis.alpha().value(z.im);
        Ok([-gy / a, gx / a, b3])
    }
}

impl VectorField for SeriesSolution {
    fn components(&self, x: f64, y: f64) -> [f64; 3] {
        self.series_field(Complex64::new(x, y)).unwrap_or([f64::NAN; 3])
    }

    fn b3_gradient(&self, x: f64, y: f64) -> Option<(f64, f64)> {
        Some(self.eval_with_grad(x, y).map_or((f64::NAN, f64::NAN), |(_, gx, gy)| (gx, gy)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rect;
    use crate::quadrature::Interval;

    fn example(n_max: usize) -> BeltramiBasis {
        let alpha = AlphaProfile::example(Interval::new(-0.95, 0.95).unwrap()).unwrap();
        let g = GeneratingFunction::new(alpha, 0.0, 1.0, 0.0).unwrap();
        BeltramiBasis::build(g, Complex64::new(0.0, 0.0), n_max).unwrap()
    }

    fn probe() -> Grid {
        Grid::new(Rect::square(0.9).unwrap(), 13, 13).unwrap()
    }

    struct Closed(fn(f64, f64) -> [f64; 3]);

    impl VectorField for Closed {
        fn components(&self, x: f64, y: f64) -> [f64; 3] {
            (self.0)(x, y)
        }
    }

    fn b0(_: f64, y: f64) -> [f64; 3] {
        [y, 0.0, (1.0 - y * y).sqrt()]
    }

    fn b1(x: f64, y: f64) -> [f64; 3] {
        [x * y, 1.0 - y * y, x * (1.0 - y * y).sqrt()]
    }

    fn b2(_: f64, y: f64) -> [f64; 3] {
        [(1.0 - y * y).sqrt(), 0.0, -y]
    }

    #[test]
    fn ordering_and_names() {
        let b = example(3);
        let names: Vec<String> = b.elements().iter().map(|e| e.name()).collect();
        assert_eq!(names, ["B3[0,u]", "B3[1,u]", "B3[1,v]", "B3[2,u]", "B3[2,v]", "B3[3,u]", "B3[3,v]"]);
        assert_eq!(element_count(0), 1);
        assert_eq!(element_index(2, Flavor::V), Some(4));
        assert!(b.element(0, Flavor::V).is_err());
        assert!(matches!(b.element(4, Flavor::U), Err(Error::NOrderExceeded { .. })));
    }

    #[test]
    fn first_fields_match_closed_forms() {
        let b = example(2);
        for &(x, y) in &[(0.3, 0.5), (-0.7, 0.2), (0.1, -0.85)] {
            for (e, f) in b.elements().iter().zip([b0 as fn(f64, f64) -> [f64; 3], b1, b2]) {
                let (got, want) = (e.field().components(x, y), f(x, y));
                for k in 0..3 {
                    assert!((got[k] - want[k]).abs() < 1e-9, "{} at ({x},{y}): {got:?} vs {want:?}", e.name());
                }
            }
            assert!((b.elements()[4].eval(x, y).unwrap() + 2.0 * x * y).abs() < 1e-9);
        }
    }

    #[test]
    fn residuals_vanish_for_generated_fields() {
        let b = example(5);
        let g = probe();
        for e in b.elements() {
            let r = beltrami_residual(&e.field(), b.alpha(), &g);
            assert!(r.first < 1e-12 && r.second < 1e-12, "{}: {r:?}", e.name());
            assert!(r.third < 1e-5, "{}: {r:?}", e.name());
            let d = div_alpha_residual(&e.field(), b.alpha(), &g);
            assert!(d < 1e-8, "{}: div {d}", e.name());
            let m = maineq_residual(&e.to_scalar_field(), b.alpha(), &g);
            assert!(m < 1e-5, "{}: maineq {m}", e.name());
        }
    }

    #[test]
    fn closed_form_field_residuals() {
        let b = example(0);
        let g = probe();
        let r = beltrami_residual(&Closed(b0), b.alpha(), &g);
        assert!(r.max() < 1e-9, "{r:?}");
        assert!(div_alpha_residual(&Closed(b0), b.alpha(), &g) < 1e-12);
    }

    #[test]
    fn corrupted_field_is_detected() {
        let b = example(0);
        let g = probe();
        let corrupt = Closed(|x, y| {
            let v = b0(x, y);
            [v[0], v[1], 1.1 * v[2]]
        });
        let r = beltrami_residual(&corrupt, b.alpha(), &g);
        let scale = alpha_b3_scale(&Closed(b0), b.alpha(), &g);
        assert!((r.third - 0.1 * scale).abs() < 1e-6 * scale, "{r:?} scale {scale}");
        let corrupt_b1 = Closed(|x, y| {
            let v = b1(x, y);
            [v[0] + x, v[1], v[2]]
        });
        assert!(div_alpha_residual(&corrupt_b1, b.alpha(), &g) > 0.5);
    }

    #[test]
    fn series_is_linear() {
        let b = example(2);
        let zero = SeriesSolution::new(b.clone(), vec![(0.0, 0.0); 3]).unwrap();
        assert_eq!(zero.series_field(Complex64::new(0.3, 0.5)).unwrap(), [0.0; 3]);
        let s = SeriesSolution::new(b.clone(), vec![(2.0, 0.0), (0.0, -1.0)]).unwrap();
        let got = s.series_field(Complex64::new(0.3, 0.5)).unwrap();
        let (p, q) = (b0(0.3, 0.5), b2(0.3, 0.5));
        for k in 0..3 {
            assert!((got[k] - (2.0 * p[k] - q[k])).abs() < 1e-9);
        }
        assert_eq!(s.element_vector(), vec![2.0, 0.0, -1.0]);
        let back = SeriesSolution::from_element_vector(b.clone(), &s.element_vector()).unwrap();
        assert_eq!(back.coefficients(), s.coefficients());
        assert!(SeriesSolution::new(b.clone(), vec![(1.0, 0.0); 4]).is_err());
        assert!(s.series_eval(Complex64::new(0.0, 0.99)).is_err());
    }

    #[test]
    fn basis_needs_a_profile() {
        let g = GeneratingFunction::unit(Interval::new(-1.0, 1.0).unwrap());
        assert!(matches!(BeltramiBasis::build(g, Complex64::new(0.0, 0.0), 1), Err(Error::InvalidInput(_))));
    }
}
