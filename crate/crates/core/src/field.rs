//! Scalar and complex fields on the plane, probe grids, and the
//! fourth-order central differences used by every residual operator.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::Interval;

/// Default finite-difference step.
pub const FD_STEP: f64 = 2.5e-4;

pub trait FdValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl FdValue for f64 {}
impl FdValue for Complex64 {}

pub fn diff_x<T: FdValue, F: Fn(f64, f64) -> T>(f: F, x: f64, y: f64, h: f64) -> T {
    (f(x - 2.0 * h, y) - f(x + 2.0 * h, y) + (f(x + h, y) - f(x - h, y)) * 8.0) * (1.0 / (12.0 * h))
}

pub fn diff_y<T: FdValue, F: Fn(f64, f64) -> T>(f: F, x: f64, y: f64, h: f64) -> T {
    (f(x, y - 2.0 * h) - f(x, y + 2.0 * h) + (f(x, y + h) - f(x, y - h)) * 8.0) * (1.0 / (12.0 * h))
}

pub fn diff_xx<T: FdValue, F: Fn(f64, f64) -> T>(f: F, x: f64, y: f64, h: f64) -> T {
    ((f(x + h, y) + f(x - h, y)) * 16.0 - f(x + 2.0 * h, y) - f(x - 2.0 * h, y) - f(x, y) * 30.0)
        * (1.0 / (12.0 * h * h))
}

pub fn diff_yy<T: FdValue, F: Fn(f64, f64) -> T>(f: F, x: f64, y: f64, h: f64) -> T {
    ((f(x, y + h) + f(x, y - h)) * 16.0 - f(x, y + 2.0 * h) - f(x, y - 2.0 * h) - f(x, y) * 30.0)
        * (1.0 / (12.0 * h * h))
}

/// `∂_z̄ F = ½(∂x F + i ∂y F)` by central differences.
pub fn dzbar<F: Fn(f64, f64) -> Complex64>(f: F, x: f64, y: f64, h: f64) -> Complex64 {
    let fx = diff_x(&f, x, y, h);
    let fy = diff_y(&f, x, y, h);
    0.5 * (fx + Complex64::i() * fy)
}

/// An axis-aligned rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x: Interval,
    pub y: Interval,
}

impl Rect {
    pub fn new(x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> Result<Self> {
        Ok(Self { x: Interval::new(x_lo, x_hi)?, y: Interval::new(y_lo, y_hi)? })
    }

    pub fn square(half_width: f64) -> Result<Self> {
        Self::new(-half_width, half_width, -half_width, half_width)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x.contains(x) && self.y.contains(y)
    }
}

/// A tensor-product probe grid over a rectangle.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rect: Rect,
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl Grid {
    pub fn new(rect: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return Err(Error::InvalidInput(format!("probe grids need at least 3x3 points, got {nx}x{ny}")));
        }
        Ok(Self { rect, xs: rect.x.linspace(nx), ys: rect.y.linspace(ny) })
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// All points, row by row (`y` outer, `x` inner).
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.ys.iter().flat_map(move |&y| self.xs.iter().map(move |&x| (x, y)))
    }

    /// Points not on the outer ring.
    pub fn interior(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let (nx, ny) = (self.xs.len(), self.ys.len());
        self.ys[1..ny - 1].iter().flat_map(move |&y| self.xs[1..nx - 1].iter().map(move |&x| (x, y)))
    }

    /// Largest finite-difference step whose 5-point stencil stays inside the
    /// rectangle from every interior point, capped at [`FD_STEP`].
    pub fn fd_step(&self) -> f64 {
        let dx = self.xs[1] - self.xs[0];
        let dy = self.ys[1] - self.ys[0];
        FD_STEP.min(0.5 * dx.min(dy))
    }

    /// `sup |f|` over the interior points.
    pub fn sup_interior<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.interior().map(|(x, y)| f(x, y)).fold(0.0, nan_max)
    }

    pub fn sup<F: Fn(f64, f64) -> f64>(&self, f: F) -> f64 {
        self.points().map(|(x, y)| f(x, y)).fold(0.0, nan_max)
    }
}

// max that lets NaN win, so a broken field never reports a small residual
pub(crate) fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

type RealFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>;
type ComplexFn = Arc<dyn Fn(f64, f64) -> Complex64 + Send + Sync>;
type ComplexGradFn = Arc<dyn Fn(f64, f64) -> (Complex64, Complex64) + Send + Sync>;

/// A real field `u(x, y)` with an optional analytic gradient.
#[derive(Clone)]
pub struct ScalarField {
    value: RealFn,
    grad: Option<GradFn>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField").field("analytic_grad", &self.grad.is_some()).finish()
    }
}

impl ScalarField {
    pub fn new<F>(value: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Self { value: Arc::new(value), grad: None }
    }

    pub fn with_grad<F, G>(value: F, grad: G) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        Self { value: Arc::new(value), grad: Some(Arc::new(grad)) }
    }

    pub fn constant(c: f64) -> Self {
        Self::with_grad(move |_, _| c, |_, _| (0.0, 0.0))
    }

    pub fn has_analytic_grad(&self) -> bool {
        self.grad.is_some()
    }

    /// Drops the analytic gradient so that [`ScalarField::grad`] falls back
    /// to finite differences.
    pub fn without_grad(&self) -> Self {
        Self { value: self.value.clone(), grad: None }
    }

    pub fn at(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    /// Analytic gradient when available, otherwise central differences.
    pub fn grad(&self, x: f64, y: f64) -> (f64, f64) {
        match &self.grad {
            Some(g) => g(x, y),
            None => self.fd_grad(x, y, FD_STEP),
        }
    }

    pub fn fd_grad(&self, x: f64, y: f64, h: f64) -> (f64, f64) {
        let f = |x, y| self.at(x, y);
        (diff_x(f, x, y, h), diff_y(f, x, y, h))
    }

    pub fn scale(&self, c: f64) -> Self {
        let s = self.clone();
        let t = self.clone();
        match self.grad {
            Some(_) => Self::with_grad(move |x, y| c * s.at(x, y), move |x, y| {
                let (gx, gy) = t.grad(x, y);
                (c * gx, c * gy)
            }),
            None => Self::new(move |x, y| c * s.at(x, y)),
        }
    }

    /// `Σ cᵢ uᵢ`; the gradient is analytic when every term's is.
    pub fn linear_combination(terms: &[(f64, ScalarField)]) -> Self {
        let terms: Vec<(f64, ScalarField)> = terms.to_vec();
        let analytic = terms.iter().all(|(_, f)| f.has_analytic_grad());
        let values = terms.clone();
        let value = move |x, y| values.iter().map(|(c, f)| c * f.at(x, y)).sum();
        if analytic {
            Self::with_grad(value, move |x, y| {
                terms.iter().fold((0.0, 0.0), |(ax, ay), (c, f)| {
                    let (gx, gy) = f.grad(x, y);
                    (ax + c * gx, ay + c * gy)
                })
            })
        } else {
            Self::new(value)
        }
    }
}

/// A complex field over a rectangle, optionally with analytic partials
/// `(∂x F, ∂y F)`.
#[derive(Clone)]
pub struct ComplexField {
    value: ComplexFn,
    partials: Option<ComplexGradFn>,
    grid: Grid,
}

impl fmt::Debug for ComplexField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexField")
            .field("grid", &self.grid)
            .field("analytic_partials", &self.partials.is_some())
            .finish()
    }
}

impl ComplexField {
    pub fn new<F>(value: F, grid: Grid) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
    {
        Self { value: Arc::new(value), partials: None, grid }
    }

    pub fn with_partials<F, G>(value: F, partials: G, grid: Grid) -> Self
    where
        F: Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        G: Fn(f64, f64) -> (Complex64, Complex64) + Send + Sync + 'static,
    {
        Self { value: Arc::new(value), partials: Some(Arc::new(partials)), grid }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn at(&self, x: f64, y: f64) -> Complex64 {
        (self.value)(x, y)
    }

    pub fn partials(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        match &self.partials {
            Some(p) => p(x, y),
            None => {
                let f = |x, y| self.at(x, y);
                let h = self.grid.fd_step();
                (diff_x(f, x, y, h), diff_y(f, x, y, h))
            }
        }
    }

    /// Partials by finite differences regardless of analytic availability.
    pub fn fd_partials(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        let f = |x, y| self.at(x, y);
        let h = self.grid.fd_step();
        (diff_x(f, x, y, h), diff_y(f, x, y, h))
    }

    pub fn dzbar(&self, x: f64, y: f64) -> Complex64 {
        let (fx, fy) = self.partials(x, y);
        0.5 * (fx + Complex64::i() * fy)
    }
}
