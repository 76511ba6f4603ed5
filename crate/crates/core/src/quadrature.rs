//! One-dimensional adaptive quadrature and cumulative antiderivative tables.
//!
//! Integration uses the 10-point Gauss / 21-point Kronrod pair with global
//! adaptive bisection. [`cumulative`] accumulates panel integrals over a
//! node layout that always contains the base point, so the resulting
//! [`AntiderivativeTable`] is exactly zero there.

use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_NODES: usize = 2049;
const MAX_PANELS: usize = 4000;

// Kronrod abscissae, positive half, descending; index 10 is the centre.
const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600525505580,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// A closed, finite interval with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn len(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, y: f64) -> bool {
        y >= self.lo && y <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.contains(other.lo) && self.contains(other.hi)
    }

    /// Fails with [`Error::OutOfDomain`] when `y` is not in the interval.
    pub fn check(&self, y: f64) -> Result<()> {
        if self.contains(y) {
            Ok(())
        } else {
            Err(Error::OutOfDomain { value: y, lo: self.lo, hi: self.hi })
        }
    }

    /// `count` equally spaced points including both endpoints.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![self.midpoint()],
            _ => {
                let h = self.len() / (count - 1) as f64;
                let mut v: Vec<f64> = (0..count).map(|i| self.lo + i as f64 * h).collect();
                v[count - 1] = self.hi;
                v
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    abs_value: f64,
}

fn sample<F: Fn(f64) -> f64>(f: &F, y: f64) -> Result<f64> {
    let v = f(y);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample { at: y, value: v })
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Panel> {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = sample(f, centre)?;
    let mut kronrod = WGK[10] * fc;
    let mut gauss = 0.0;
    let mut abs_value = WGK[10] * fc.abs();
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = sample(f, centre - dx)?;
        let f2 = sample(f, centre + dx)?;
        kronrod += WGK[j] * (f1 + f2);
        abs_value += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    Ok(Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
        abs_value: abs_value * half.abs(),
    })
}

/// Adaptive integral over `[a, b]` (either orientation) with error target
/// `max(abs_tol, rel_tol·|I|)`, floored at the round-off level of `∫|f|`.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate_with(f, b, a, abs_tol, rel_tol).map(|v| -v);
    }
    let mut panels = vec![gauss_kronrod(&f, a, b)?];
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let resabs: f64 = panels.iter().map(|p| p.abs_value).sum();
        let target = abs_tol.max(rel_tol * total.abs()).max(100.0 * f64::EPSILON * resabs);
        if error <= target {
            return Ok(total);
        }
        if panels.len() >= MAX_PANELS {
            return Err(Error::NonConvergence { lo: a, hi: b, estimate: error });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| if p.error > acc.1 { (i, p.error) } else { acc });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if !(mid > p.a && mid < p.b) {
            return Err(Error::NonConvergence { lo: a, hi: b, estimate: error });
        }
        panels.push(gauss_kronrod(&f, p.a, mid)?);
        panels.push(gauss_kronrod(&f, mid, p.b)?);
    }
}

/// Integral of `f` over `interval` with estimated error `≤ tol·max(1, |I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, interval: Interval, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    integrate_with(f, interval.lo, interval.hi, tol, tol)
}

/// Piecewise Hermite table of an antiderivative `T` with `T(base_point) = 0`.
///
/// Node slopes are the integrand values themselves, so the interpolant is
/// C¹ and reproduces the integrand exactly at every node. When integrand
/// derivatives are also supplied (see [`cumulative_smooth`]) the pieces are
/// quintic and C².
#[derive(Debug, Clone)]
pub struct AntiderivativeTable {
    base_point: f64,
    interval: Interval,
    nodes: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    curvatures: Option<Vec<f64>>,
}

impl AntiderivativeTable {
    /// The identically zero table over `interval`.
    pub fn zero(base_point: f64, interval: Interval) -> Result<Self> {
        cumulative(|_| 0.0, base_point, interval, DEFAULT_TOL, 32)
    }

    pub fn base_point(&self) -> f64 {
        self.base_point
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Integrand samples at the nodes.
    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn is_quintic(&self) -> bool {
        self.curvatures.is_some()
    }

    fn locate(&self, y: f64) -> usize {
        let k = self.nodes.partition_point(|&n| n <= y);
        k.clamp(1, self.nodes.len() - 1) - 1
    }

    pub fn eval(&self, y: f64) -> Result<f64> {
        self.interval.check(y)?;
        Ok(self.value_unchecked(y))
    }

    pub fn deriv(&self, y: f64) -> Result<f64> {
        self.interval.check(y)?;
        Ok(self.deriv_unchecked(y))
    }

    /// Value without the domain check; callers must have validated `y`.
    pub fn value_unchecked(&self, y: f64) -> f64 {
        self.hermite(y).0
    }

    pub fn deriv_unchecked(&self, y: f64) -> f64 {
        self.hermite(y).1
    }

    fn hermite(&self, y: f64) -> (f64, f64) {
        let i = self.locate(y);
        let (y0, y1) = (self.nodes[i], self.nodes[i + 1]);
        let h = y1 - y0;
        let t = (y - y0) / h;
        let (p0, p1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        match &self.curvatures {
            None => {
                let value = (2.0 * t3 - 3.0 * t2 + 1.0) * p0
                    + (t3 - 2.0 * t2 + t) * m0
                    + (-2.0 * t3 + 3.0 * t2) * p1
                    + (t3 - t2) * m1;
                let d = (6.0 * t2 - 6.0 * t) * p0
                    + (3.0 * t2 - 4.0 * t + 1.0) * m0
                    + (-6.0 * t2 + 6.0 * t) * p1
                    + (3.0 * t2 - 2.0 * t) * m1;
                (value, d / h)
            }
            Some(c) => {
                let (c0, c1) = (c[i] * h * h, c[i + 1] * h * h);
                let t4 = t3 * t;
                let t5 = t4 * t;
                let h0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
                let h1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
                let h2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
                let h3 = 0.5 * (t3 - 2.0 * t4 + t5);
                let h4 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
                let h5 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
                let value = h0 * p0 + h1 * m0 + h2 * c0 + h3 * c1 + h4 * m1 + h5 * p1;
                let d0 = -30.0 * t2 + 60.0 * t3 - 30.0 * t4;
                let d1 = 1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4;
                let d2 = t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4;
                let d3 = 1.5 * t2 - 4.0 * t3 + 2.5 * t4;
                let d4 = -12.0 * t2 + 28.0 * t3 - 15.0 * t4;
                let d = d0 * (p0 - p1) + d1 * m0 + d2 * c0 + d3 * c1 + d4 * m1;
                (value, d / h)
            }
        }
    }
}

/// Node layout with spacing `len/(n_nodes-1)` anchored so that `base` is a node.
/// End panels absorb the remainder and are between a quarter and one and a
/// quarter spacings wide.
fn anchored_nodes(base: f64, interval: Interval, n_nodes: usize) -> (Vec<f64>, usize) {
    let h = interval.len() / (n_nodes - 1) as f64;
    let below = ((base - interval.lo) / h).floor() as usize;
    let above = ((interval.hi - base) / h).floor() as usize;
    let mut nodes = Vec::with_capacity(below + above + 3);
    nodes.push(interval.lo);
    for k in (1..=below).rev() {
        let n = base - k as f64 * h;
        if n - interval.lo > 0.25 * h {
            nodes.push(n);
        }
    }
    if base > interval.lo {
        nodes.push(base);
    }
    let base_index = nodes.len() - 1;
    for k in 1..=above {
        let n = base + k as f64 * h;
        if interval.hi - n > 0.25 * h {
            nodes.push(n);
        }
    }
    if base < interval.hi {
        nodes.push(interval.hi);
    }
    (nodes, base_index)
}

fn accumulate<F: Fn(f64) -> f64>(
    f: &F,
    base: f64,
    interval: Interval,
    tol: f64,
    n_nodes: usize,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if n_nodes < 32 {
        return Err(Error::InvalidInput(format!("antiderivative tables need at least 32 nodes, got {n_nodes}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    interval.check(base)?;
    let (nodes, base_index) = anchored_nodes(base, interval, n_nodes);
    let mut values = vec![0.0; nodes.len()];
    for k in base_index..nodes.len() - 1 {
        let (a, b) = (nodes[k], nodes[k + 1]);
        let panel_tol = tol * (b - a) / interval.len();
        values[k + 1] = values[k] + integrate_with(f, a, b, panel_tol, 0.0)?;
    }
    for k in (1..=base_index).rev() {
        let (a, b) = (nodes[k - 1], nodes[k]);
        let panel_tol = tol * (b - a) / interval.len();
        values[k - 1] = values[k] - integrate_with(f, a, b, panel_tol, 0.0)?;
    }
    let slopes = nodes.iter().map(|&y| sample(f, y)).collect::<Result<Vec<_>>>()?;
    Ok((nodes, values, slopes))
}

/// Tabulates `T(y) = ∫_{base}^{y} f` on `interval` with cubic Hermite pieces.
pub fn cumulative<F: Fn(f64) -> f64>(
    f: F,
    base_point: f64,
    interval: Interval,
    tol: f64,
    n_nodes: usize,
) -> Result<AntiderivativeTable> {
    let (nodes, values, slopes) = accumulate(&f, base_point, interval, tol, n_nodes)?;
    Ok(AntiderivativeTable { base_point, interval, nodes, values, slopes, curvatures: None })
}

/// Like [`cumulative`], but with the integrand derivative `df` available the
/// table uses quintic Hermite pieces.
pub fn cumulative_smooth<F, D>(
    f: F,
    df: D,
    base_point: f64,
    interval: Interval,
    tol: f64,
    n_nodes: usize,
) -> Result<AntiderivativeTable>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (nodes, values, slopes) = accumulate(&f, base_point, interval, tol, n_nodes)?;
    let curvatures = nodes.iter().map(|&y| sample(&df, y)).collect::<Result<Vec<_>>>()?;
    Ok(AntiderivativeTable { base_point, interval, nodes, values, slopes, curvatures: Some(curvatures) })
}
