//! Dirichlet boundary collocation with the `B3` basis.
//!
//! Given boundary points `pᵢ` and data `dᵢ`, [`fit`] minimizes
//! `Σ |Σ cₖ φₖ(pᵢ) − dᵢ|² + reg ‖c‖²` over the first `2 n_max + 1` basis
//! elements through a singular value decomposition of the collocation
//! matrix.

use nalgebra::{DMatrix, DVector};

use crate::beltrami::{beltrami_residual, element_count, BeltramiBasis, Residuals, SeriesSolution, VectorField};
use crate::error::{Error, Result};
use crate::field::{Grid, Rect};

/// Largest condition number accepted without regularization.
pub const MAX_CONDITION: f64 = 1e14;

/// `count` points on the circle of radius `r` around `center`, uniform in
/// angle starting on the positive `x` axis.
pub fn circle(center: (f64, f64), r: f64, count: usize) -> Vec<(f64, f64)> {
    (0..count)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
            (center.0 + r * t.cos(), center.1 + r * t.sin())
        })
        .collect()
}

/// `count` points on the boundary of `rect`, uniform in arc length,
/// counter-clockwise from the lower-left corner.
pub fn rectangle(rect: Rect, count: usize) -> Vec<(f64, f64)> {
    let (w, h) = (rect.x.len(), rect.y.len());
    let perimeter = 2.0 * (w + h);
    (0..count)
        .map(|k| {
            let mut s = perimeter * k as f64 / count as f64;
            if s < w {
                return (rect.x.lo() + s, rect.y.lo());
            }
            s -= w;
            if s < h {
                return (rect.x.hi(), rect.y.lo() + s);
            }
            s -= h;
            if s < w {
                return (rect.x.hi() - s, rect.y.hi());
            }
            s -= w;
            (rect.x.lo(), rect.y.hi() - s)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct CollocationProblem {
    pub boundary: Vec<(f64, f64)>,
    pub data: Vec<f64>,
    pub n_max: usize,
    pub regularization: f64,
}

impl CollocationProblem {
    pub fn new(boundary: Vec<(f64, f64)>, data: Vec<f64>, n_max: usize) -> Self {
        Self { boundary, data, n_max, regularization: 0.0 }
    }

    /// Samples `trace` at the boundary points.
    pub fn from_trace(boundary: Vec<(f64, f64)>, trace: impl Fn(f64, f64) -> f64, n_max: usize) -> Self {
        let data = boundary.iter().map(|&(x, y)| trace(x, y)).collect();
        Self::new(boundary, data, n_max)
    }

    pub fn with_regularization(mut self, reg: f64) -> Self {
        self.regularization = reg;
        self
    }

    fn validate(&self, basis: &BeltramiBasis) -> Result<()> {
        if self.boundary.len() != self.data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} boundary points but {} data values",
                self.boundary.len(),
                self.data.len()
            )));
        }
        let unknowns = element_count(self.n_max);
        if self.boundary.len() < 2 * unknowns {
            return Err(Error::DimensionMismatch(format!(
                "{} boundary points for {unknowns} unknowns; at least {} are needed",
                self.boundary.len(),
                2 * unknowns
            )));
        }
        if self.n_max > basis.n_max() {
            return Err(Error::NOrderExceeded { requested: self.n_max, available: basis.n_max() });
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::InvalidInput(format!("regularization must be nonnegative, got {}", self.regularization)));
        }
        if let Some(d) = self.data.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidInput(format!("boundary data contains {d}")));
        }
        let window = basis.formal_powers().y_interval();
        for &(x, y) in &self.boundary {
            if !x.is_finite() {
                return Err(Error::InvalidInput(format!("boundary point ({x}, {y}) is not finite")));
            }
            window.check(y)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Fit {
    pub solution: SeriesSolution,
    /// `‖Ac − d‖ / ‖d‖`, or `‖Ac‖` when the data vanish.
    pub residual_norm: f64,
    /// `σmax / σmin` of the collocation matrix.
    pub condition: f64,
}

/// Least-squares fit of `problem` by the first `2 n_max + 1` elements of
/// `basis`.
pub fn fit(problem: &CollocationProblem, basis: &BeltramiBasis) -> Result<Fit> {
    problem.validate(basis)?;
    let m = problem.boundary.len();
    let k = element_count(problem.n_max);
    let elements = &basis.elements()[..k];
    let mut a = DMatrix::<f64>::zeros(m, k);
    for (i, &(x, y)) in problem.boundary.iter().enumerate() {
        for (j, e) in elements.iter().enumerate() {
            a[(i, j)] = e.eval(x, y)?;
        }
    }
    let d = DVector::from_column_slice(&problem.data);
    let svd = a.clone().svd(true, true);
    let sigma = &svd.singular_values;
    let s_max = sigma.max();
    let s_min = sigma.min();
    let condition = if s_min > 0.0 { s_max / s_min } else { f64::INFINITY };
    let reg = problem.regularization;
    if reg == 0.0 && !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned { condition });
    }
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let projected = u.transpose() * &d;
    let scaled = DVector::from_iterator(
        k,
        sigma.iter().zip(projected.iter()).map(|(&s, &b)| if s > 0.0 { s * b / (s * s + reg) } else { 0.0 }),
    );
    let c = v_t.transpose() * scaled;
    let misfit = (&a * &c - &d).norm();
    let d_norm = d.norm();
    let residual_norm = if d_norm > 0.0 { misfit / d_norm } else { misfit };
    let solution = SeriesSolution::from_element_vector(basis.clone(), c.as_slice())?;
    Ok(Fit { solution, residual_norm, condition })
}

/// Field samples `[x, y, B1, B2, B3]` on a grid with the residuals of the
/// assembled field.
#[derive(Debug, Clone)]
pub struct InteriorReport {
    pub samples: Vec<[f64; 5]>,
    pub residuals: Residuals,
}

pub fn evaluate_interior(solution: &SeriesSolution, grid: &Grid) -> InteriorReport {
    let samples = grid
        .points()
        .map(|(x, y)| {
            let b = solution.components(x, y);
            [x, y, b[0], b[1], b[2]]
        })
        .collect();
    let residuals = beltrami_residual(solution, solution.basis().alpha(), grid);
    InteriorReport { samples, residuals }
}
