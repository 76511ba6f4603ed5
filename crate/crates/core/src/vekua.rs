//! The antiderivative operator `Ā`, the transfer between solutions of
//! `(div p grad + q) u = 0` and the main Vekua equation `W_z̄ = (f_z̄/f) W̄`,
//! and residual operators for both.
//!
//! For real `Φ = Φ1 + iΦ2` with `∂yΦ1 − ∂xΦ2 = 0` on a rectangle,
//!
//! ```text
//! Ā[Φ](x, y) = 2 ( ∫_{x0}^{x} Φ1(η, y) dη + ∫_{y0}^{y} Φ2(x0, ξ) dξ ) + c
//! ```
//!
//! is real and satisfies `∂_z̄ Ā[Φ] = Φ`. Given a positive solution `u0` of
//! the second-order equation and `f = √p u0`,
//!
//! ```text
//! v = u0⁻¹ Ā(i p u0² ∂_z̄(u/u0))        u = −u0 Ā(i p⁻¹ u0⁻² ∂_z̄(u0 v))
//! ```
//!
//! and `W = √p u + i v/√p` solves the Vekua equation. The function `v` solves
//! `(div p⁻¹ grad + q1) v = 0` with `q1` from [`compute_q1`].

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{diff_x, diff_xx, diff_y, diff_yy, ComplexField, Grid, ScalarField};
use crate::profile::GeneratingFunction;
use crate::quadrature::integrate_with;

/// Tolerance on `sup |∂yΦ1 − ∂xΦ2|` accepted by [`abar`].
pub const COMPATIBILITY_TOL: f64 = 1e-6;

/// Tolerance on the second-order residual of inputs to the transfer maps.
pub const RESIDUAL_TOL: f64 = 1e-5;

/// Quadrature tolerance used inside `Ā`.
pub const ABAR_QUAD_TOL: f64 = 1e-12;

/// Coefficients of `(div p grad + q) u = 0`.
#[derive(Debug, Clone)]
pub struct ConductivityPair {
    pub p: ScalarField,
    pub q: ScalarField,
}

impl ConductivityPair {
    pub fn new(p: ScalarField, q: ScalarField) -> Self {
        Self { p, q }
    }

    /// `p ≡ 1`, `q ≡ 0`.
    pub fn laplace() -> Self {
        Self { p: ScalarField::constant(1.0), q: ScalarField::constant(0.0) }
    }
}

/// Data shared by the transfer maps: the pair `(p, q)`, a positive solution
/// `u0`, the base point and constant of `Ā`, and a probe grid for the
/// compatibility and residual checks.
#[derive(Debug, Clone)]
pub struct TransferContext {
    pub pair: ConductivityPair,
    pub u0: ScalarField,
    pub base: (f64, f64),
    pub c: f64,
    pub grid: Grid,
}

impl TransferContext {
    pub fn new(pair: ConductivityPair, u0: ScalarField, base: (f64, f64), grid: Grid) -> Self {
        Self { pair, u0, base, c: 0.0, grid }
    }

    /// `p ≡ 1`, `q ≡ 0`, `u0 ≡ 1`: the transfer maps become harmonic
    /// conjugation.
    pub fn harmonic(base: (f64, f64), grid: Grid) -> Self {
        Self::new(ConductivityPair::laplace(), ScalarField::constant(1.0), base, grid)
    }

    /// `p = 1/α`, `q = α`, `u0 = √α f0`, so that `f = √p u0 = f0`. The unit
    /// generator gives the harmonic context.
    pub fn from_generator(g: &GeneratingFunction, base: (f64, f64), grid: Grid) -> Self {
        let Some(alpha) = g.alpha() else {
            return Self::harmonic(base, grid);
        };
        let (a1, a2, a3) = (alpha.clone(), alpha.clone(), alpha.clone());
        let p = ScalarField::with_grad(
            move |_, y| 1.0 / a1.value(y),
            move |_, y| (0.0, -a2.deriv(y) / a2.value(y).powi(2)),
        );
        let q = ScalarField::with_grad(move |_, y| a3.value(y), {
            let a = alpha.clone();
            move |_, y| (0.0, a.deriv(y))
        });
        let g = Arc::new(g.clone());
        let g2 = g.clone();
        let u0 = ScalarField::with_grad(move |_, y| g.amplitude(y).0, move |_, y| (0.0, g2.amplitude(y).1));
        Self::new(ConductivityPair::new(p, q), u0, base, grid)
    }

    pub fn with_constant(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    /// `f = √p u0`.
    pub fn f(&self) -> ScalarField {
        let (p, u0) = (self.pair.p.clone(), self.u0.clone());
        let (p2, u2) = (p.clone(), u0.clone());
        ScalarField::with_grad(
            move |x, y| p.at(x, y).sqrt() * u0.at(x, y),
            move |x, y| {
                let (pv, uv) = (p2.at(x, y), u2.at(x, y));
                let (px, py) = p2.grad(x, y);
                let (ux, uy) = u2.grad(x, y);
                let s = pv.sqrt();
                (0.5 * px / s * uv + s * ux, 0.5 * py / s * uv + s * uy)
            },
        )
    }
}

/// `sup |∂yΦ1 − ∂xΦ2|` over the interior of the field's grid.
pub fn casirot_residual(phi: &ComplexField) -> f64 {
    let grid = phi.grid();
    let h = grid.fd_step();
    grid.sup_interior(|x, y| {
        let d1 = diff_y(|x, y| phi.at(x, y).re, x, y, h);
        let d2 = diff_x(|x, y| phi.at(x, y).im, x, y, h);
        (d1 - d2).abs()
    })
}

/// `Ā[Φ]` with base point `base` and constant `c`. The gradient of the
/// result is `(2Φ1, 2Φ2)`. Evaluations whose quadrature fails return NaN.
pub fn abar(phi: &ComplexField, base: (f64, f64), c: f64) -> Result<ScalarField> {
    let residual = casirot_residual(phi);
    if !(residual <= COMPATIBILITY_TOL) {
        return Err(Error::Compatibility { residual, tolerance: COMPATIBILITY_TOL });
    }
    let (x0, y0) = base;
    let (f, g) = (phi.clone(), phi.clone());
    Ok(ScalarField::with_grad(
        move |x, y| {
            let along_x = integrate_with(|eta| f.at(eta, y).re, x0, x, ABAR_QUAD_TOL, ABAR_QUAD_TOL);
            let along_y = integrate_with(|xi| f.at(x0, xi).im, y0, y, ABAR_QUAD_TOL, ABAR_QUAD_TOL);
            match (along_x, along_y) {
                (Ok(a), Ok(b)) => 2.0 * (a + b) + c,
                _ => f64::NAN,
            }
        },
        move |x, y| {
            let v = g.at(x, y);
            (2.0 * v.re, 2.0 * v.im)
        },
    ))
}

/// `q1 = −(1/p)(q/p + 2⟨∇p/p, ∇u0/u0⟩ + 2|∇u0/u0|²)`.
pub fn compute_q1(ctx: &TransferContext) -> ScalarField {
    let (p, q, u0) = (ctx.pair.p.clone(), ctx.pair.q.clone(), ctx.u0.clone());
    ScalarField::new(move |x, y| {
        let (pv, qv, uv) = (p.at(x, y), q.at(x, y), u0.at(x, y));
        let (px, py) = p.grad(x, y);
        let (ux, uy) = u0.grad(x, y);
        let (lx, ly) = (ux / uv, uy / uv);
        -(qv / pv + 2.0 * (px / pv * lx + py / pv * ly) + 2.0 * (lx * lx + ly * ly)) / pv
    })
}

/// `sup |(div p grad + q) u|` over the grid interior. First derivatives of
/// `u` and `p` are analytic where available; second derivatives of `u` use
/// central differences.
pub fn second_order_residual(u: &ScalarField, p: &ScalarField, q: &ScalarField, grid: &Grid) -> f64 {
    let h = grid.fd_step();
    grid.sup_interior(|x, y| {
        let uf = |x, y| u.at(x, y);
        let lap = diff_xx(uf, x, y, h) + diff_yy(uf, x, y, h);
        let (ux, uy) = u.grad(x, y);
        let (px, py) = p.grad(x, y);
        (p.at(x, y) * lap + px * ux + py * uy + q.at(x, y) * u.at(x, y)).abs()
    })
}

// i p u0² ∂_z̄(u/u0), written with first derivatives only
fn darboux_potential(ctx: &TransferContext, u: &ScalarField) -> ComplexField {
    let (p, u0, u) = (ctx.pair.p.clone(), ctx.u0.clone(), u.clone());
    ComplexField::new(
        move |x, y| {
            let (uv, wv) = (u.at(x, y), u0.at(x, y));
            let (ux, uy) = u.grad(x, y);
            let (wx, wy) = u0.grad(x, y);
            let a = ux * wv - uv * wx;
            let b = uy * wv - uv * wy;
            0.5 * p.at(x, y) * Complex64::new(-b, a)
        },
        ctx.grid.clone(),
    )
}

// i p⁻¹ u0⁻² ∂_z̄(u0 v)
fn inverse_potential(ctx: &TransferContext, v: &ScalarField) -> ComplexField {
    let (p, u0, v) = (ctx.pair.p.clone(), ctx.u0.clone(), v.clone());
    ComplexField::new(
        move |x, y| {
            let (vv, wv) = (v.at(x, y), u0.at(x, y));
            let (vx, vy) = v.grad(x, y);
            let (wx, wy) = u0.grad(x, y);
            let dx = wx * vv + wv * vx;
            let dy = wy * vv + wv * vy;
            Complex64::new(-dy, dx) / (2.0 * p.at(x, y) * wv * wv)
        },
        ctx.grid.clone(),
    )
}

/// `v = u0⁻¹ Ā(i p u0² ∂_z̄(u/u0))`. The gradient of `v` is analytic
/// whenever those of `u`, `u0` and `p` are.
pub fn transfer_u_to_v(ctx: &TransferContext, u: &ScalarField) -> Result<ScalarField> {
    let residual = second_order_residual(u, &ctx.pair.p, &ctx.pair.q, &ctx.grid);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Residual { residual, tolerance: RESIDUAL_TOL });
    }
    let potential = darboux_potential(ctx, u);
    let phi = abar(&potential, ctx.base, ctx.c)?;
    let (u0, u0g, phig) = (ctx.u0.clone(), ctx.u0.clone(), phi.clone());
    Ok(ScalarField::with_grad(
        move |x, y| phi.at(x, y) / u0.at(x, y),
        move |x, y| {
            let (w, fv) = (u0g.at(x, y), phig.at(x, y));
            let (wx, wy) = u0g.grad(x, y);
            let (fx, fy) = phig.grad(x, y);
            let v = fv / w;
            ((fx - v * wx) / w, (fy - v * wy) / w)
        },
    ))
}

/// `u = −u0 Ā(i p⁻¹ u0⁻² ∂_z̄(u0 v))`.
pub fn transfer_v_to_u(ctx: &TransferContext, v: &ScalarField) -> Result<ScalarField> {
    let p_inv = {
        let (p, pg) = (ctx.pair.p.clone(), ctx.pair.p.clone());
        ScalarField::with_grad(
            move |x, y| 1.0 / p.at(x, y),
            move |x, y| {
                let pv = pg.at(x, y);
                let (px, py) = pg.grad(x, y);
                (-px / (pv * pv), -py / (pv * pv))
            },
        )
    };
    let residual = second_order_residual(v, &p_inv, &compute_q1(ctx), &ctx.grid);
    if !(residual <= RESIDUAL_TOL) {
        return Err(Error::Residual { residual, tolerance: RESIDUAL_TOL });
    }
    let potential = inverse_potential(ctx, v);
    let psi = abar(&potential, ctx.base, ctx.c)?;
    let (u0, u0g, psig) = (ctx.u0.clone(), ctx.u0.clone(), psi.clone());
    Ok(ScalarField::with_grad(
        move |x, y| -u0.at(x, y) * psi.at(x, y),
        move |x, y| {
            let (w, s) = (u0g.at(x, y), psig.at(x, y));
            let (wx, wy) = u0g.grad(x, y);
            let (sx, sy) = psig.grad(x, y);
            (-(wx * s + w * sx), -(wy * s + w * sy))
        },
    ))
}

/// Least-squares `κ` with `actual ≈ expected + κ·u0` on the grid, and the
/// sup of the remaining deviation.
pub fn kappa_fit(actual: &ScalarField, expected: &ScalarField, u0: &ScalarField, grid: &Grid) -> (f64, f64) {
    let samples: Vec<(f64, f64)> =
        grid.points().map(|(x, y)| (actual.at(x, y) - expected.at(x, y), u0.at(x, y))).collect();
    let num: f64 = samples.iter().map(|(d, w)| d * w).sum();
    let den: f64 = samples.iter().map(|(_, w)| w * w).sum();
    let kappa = num / den;
    let residual = samples.iter().map(|(d, w)| (d - kappa * w).abs()).fold(0.0, crate::field::nan_max);
    (kappa, residual)
}

/// `sup |∂_z̄W − (f_z̄/f) W̄|` over the interior of `W`'s grid.
pub fn vekua_residual(w: &ComplexField, f: &ScalarField) -> f64 {
    w.grid().sup_interior(|x, y| {
        let (fx, fy) = f.grad(x, y);
        let coefficient = 0.5 * Complex64::new(fx, fy) / f.at(x, y);
        (w.dzbar(x, y) - coefficient * w.at(x, y).conj()).norm()
    })
}

/// `sup |ω_z̄ − ((1 − f0²)/(1 + f0²)) ∂_z̄ ω̄|` over the interior of `ω`'s grid.
pub fn second_kind_residual(omega: &ComplexField, g: &GeneratingFunction) -> f64 {
    omega.grid().sup_interior(|x, y| {
        let (wx, wy) = omega.partials(x, y);
        let dz = 0.5 * (wx + Complex64::i() * wy);
        let dz_conj = 0.5 * (wx.conj() + Complex64::i() * wy.conj());
        let f2 = g.f0(y).powi(2);
        (dz - (1.0 - f2) / (1.0 + f2) * dz_conj).norm()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Rect;
    use crate::formal_powers::FormalPowerBasis;
    use crate::profile::AlphaProfile;
    use crate::quadrature::Interval;

    fn grid() -> Grid {
        Grid::new(Rect::new(-0.5, 0.5, -0.6, 0.6).unwrap(), 7, 7).unwrap()
    }

    fn example_generator() -> GeneratingFunction {
        let alpha = AlphaProfile::example(Interval::new(-0.95, 0.95).unwrap()).unwrap();
        GeneratingFunction::new(alpha, 0.0, 1.0, 0.0).unwrap()
    }

    fn sup_diff(a: &ScalarField, b: impl Fn(f64, f64) -> f64, g: &Grid) -> f64 {
        g.sup(|x, y| (a.at(x, y) - b(x, y)).abs())
    }

    #[test]
    fn abar_trivial_potentials() {
        let g = grid();
        let zbar = ComplexField::new(|x, y| Complex64::new(x, -y), g.clone());
        let phi = abar(&zbar, (0.0, 0.0), 0.0).unwrap();
        assert!(sup_diff(&phi, |x, y| x * x - y * y, &g) < 1e-13);
        let one = ComplexField::new(|_, _| Complex64::new(1.0, 0.0), g.clone());
        let phi = abar(&one, (0.0, 0.0), 0.0).unwrap();
        assert!(sup_diff(&phi, |x, _| 2.0 * x, &g) < 1e-14);
        let rot = ComplexField::new(|x, y| Complex64::new(y, x), g.clone());
        let phi = abar(&rot, (0.0, 0.0), 0.5).unwrap();
        assert!(sup_diff(&phi, |x, y| 2.0 * x * y + 0.5, &g) < 1e-13);
    }

    #[test]
    fn abar_rejects_incompatible_potential() {
        let g = grid();
        let bad = ComplexField::new(|x, _| Complex64::new(0.0, x), g.clone());
        assert!((casirot_residual(&bad) - 1.0).abs() < 1e-10);
        assert!(matches!(abar(&bad, (0.0, 0.0), 0.0), Err(Error::Compatibility { .. })));
        assert_eq!(casirot_residual(&ComplexField::new(|x, y| Complex64::new(x, -y), g)), 0.0);
    }

    #[test]
    fn abar_inverts_dzbar_and_is_path_independent() {
        let g = grid();
        // Φ = ∂_z̄(x³y − sin(x) e^y) computed by hand
        let phi = ComplexField::new(
            |x: f64, y: f64| {
                let fx = 3.0 * x * x * y - x.cos() * y.exp();
                let fy = x.powi(3) - x.sin() * y.exp();
                0.5 * Complex64::new(fx, fy)
            },
            g.clone(),
        );
        let a = abar(&phi, (0.0, 0.0), 0.0).unwrap().without_grad();
        let h = g.fd_step();
        let worst = g.sup_interior(|x, y| {
            let (ax, ay) = a.fd_grad(x, y, h);
            (0.5 * Complex64::new(ax, ay) - phi.at(x, y)).norm()
        });
        assert!(worst < 1e-6, "{worst}");
        let b = abar(&phi, (0.3, -0.2), 0.0).unwrap();
        let diffs: Vec<f64> = g.points().map(|(x, y)| a.at(x, y) - b.at(x, y)).collect();
        let mean = diffs.iter().sum::<f64>() / diffs.len() as f64;
        assert!(diffs.iter().all(|d| (d - mean).abs() < 1e-8));
    }

    #[test]
    fn q1_hand_values() {
        let ctx = TransferContext::harmonic((0.0, 0.0), grid());
        assert_eq!(compute_q1(&ctx).at(0.2, 0.3), 0.0);
        let u0 = ScalarField::with_grad(|_, y: f64| y.exp(), |_, y: f64| (0.0, y.exp()));
        let pair = ConductivityPair::new(ScalarField::constant(1.0), ScalarField::constant(-1.0));
        let ctx = TransferContext::new(pair, u0, (0.0, 0.0), grid());
        assert!((compute_q1(&ctx).at(0.1, -0.4) + 1.0).abs() < 1e-14);
    }

    #[test]
    fn harmonic_conjugates() {
        let g = grid();
        let ctx = TransferContext::harmonic((0.0, 0.0), g.clone());
        let u = ScalarField::with_grad(|x, y| x * x - y * y, |x, y| (2.0 * x, -2.0 * y));
        let v = transfer_u_to_v(&ctx, &u).unwrap();
        assert!(sup_diff(&v, |x, y| 2.0 * x * y, &g) < 1e-13);
        let u = ScalarField::with_grad(|x, _| x, |_, _| (1.0, 0.0));
        let v = transfer_u_to_v(&ctx, &u).unwrap();
        assert!(sup_diff(&v, |_, y| y, &g) < 1e-14);
        let v = ScalarField::with_grad(|x, y| 2.0 * x * y, |x, y| (2.0 * y, 2.0 * x));
        let u = transfer_v_to_u(&ctx, &v).unwrap();
        let expected = ScalarField::new(|x, y| x * x - y * y);
        let (_, res) = kappa_fit(&u, &expected, &ctx.u0, &g);
        assert!(res < 1e-13);
        let u = transfer_v_to_u(&ctx, &ScalarField::constant(0.0)).unwrap();
        assert!(sup_diff(&u, |_, _| 0.0, &g) == 0.0);
    }

    #[test]
    fn transfer_rejects_non_solutions() {
        let ctx = TransferContext::harmonic((0.0, 0.0), grid());
        let u = ScalarField::new(|x, y| x * x + y * y);
        assert!(matches!(transfer_u_to_v(&ctx, &u), Err(Error::Residual { .. })));
        assert!(matches!(transfer_v_to_u(&ctx, &u), Err(Error::Residual { .. })));
    }

    #[test]
    fn residual_operators_on_trivial_fields() {
        let g = grid();
        let one = ScalarField::constant(1.0);
        let z3 = ComplexField::new(|x, y| Complex64::new(x, y).powu(3), g.clone());
        assert!(vekua_residual(&z3, &one) < 1e-10);
        let zbar = ComplexField::new(|x, y| Complex64::new(x, -y), g.clone());
        assert!((vekua_residual(&zbar, &one) - 1.0).abs() < 1e-10);
        let unit = GeneratingFunction::unit(Interval::new(-1.0, 1.0).unwrap());
        let z = ComplexField::new(|x, y| Complex64::new(x, y), g.clone());
        assert!(second_kind_residual(&z, &unit) < 1e-12);
        assert!((second_kind_residual(&zbar, &unit) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn example_first_power_transfers() {
        let gen = example_generator();
        let g = grid();
        let basis = Arc::new(FormalPowerBasis::build(gen.clone(), Complex64::new(0.0, 0.0), 2).unwrap());
        let ctx = TransferContext::from_generator(&gen, (0.0, 0.0), g.clone());
        let w = basis.first_kind_field(Complex64::new(1.0, 0.0), 1, g.clone()).unwrap();
        assert!(vekua_residual(&w, &ctx.f()) < 1e-6);
        let omega = basis.omega_field(Complex64::new(1.0, 0.0), 1, g.clone()).unwrap();
        assert!(second_kind_residual(&omega, &gen) < 1e-6);
        let (phi, _) = basis.second_kind_pair(Complex64::new(1.0, 0.0), 1).unwrap();
        let (u0, u0g) = (ctx.u0.clone(), ctx.u0.clone());
        let (p1, p2) = (phi.clone(), phi.clone());
        let u = ScalarField::with_grad(
            move |x, y| u0.at(x, y) * p1.at(x, y),
            move |x, y| {
                let (a, (ax, ay)) = (u0g.at(x, y), u0g.grad(x, y));
                let (b, (bx, by)) = (p2.at(x, y), p2.grad(x, y));
                (ax * b + a * bx, ay * b + a * by)
            },
        );
        let v = transfer_u_to_v(&ctx, &u).unwrap();
        let (pp, p_g, uu) = (ctx.pair.p.clone(), ctx.pair.p.clone(), u.clone());
        let (vv, vg) = (v.clone(), v.clone());
        let built = ComplexField::with_partials(
            move |x, y| {
                let s = pp.at(x, y).sqrt();
                Complex64::new(s * uu.at(x, y), vv.at(x, y) / s)
            },
            {
                let u = u.clone();
                move |x, y| {
                    let (pv, (px, py)) = (p_g.at(x, y), p_g.grad(x, y));
                    let s = pv.sqrt();
                    let (uv, (ux, uy)) = (u.at(x, y), u.grad(x, y));
                    let (v, (vx, vy)) = (vg.at(x, y), vg.grad(x, y));
                    let ds = |d: f64| 0.5 * d / s;
                    (
                        Complex64::new(ds(px) * uv + s * ux, vx / s - ds(px) * v / pv),
                        Complex64::new(ds(py) * uv + s * uy, vy / s - ds(py) * v / pv),
                    )
                }
            },
            g.clone(),
        );
        assert!(vekua_residual(&built, &ctx.f()) < 1e-5);
    }
}
