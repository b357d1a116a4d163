//! Adaptive composite Gauss–Legendre quadrature.
//!
//! Each panel is integrated with a 15-point Gauss–Legendre rule and compared
//! against the same rule applied to its two halves; panels whose difference
//! exceeds their share of the absolute tolerance are bisected. Mandatory
//! breakpoints split the interval before refinement starts, and oscillatory
//! integrands get an initial uniform split sized to their frequency.

use crate::error::{Error, Result};
use crate::scalar::Real;
use nalgebra::{Complex, Matrix2};
use std::sync::OnceLock;

const GL_POINTS: usize = 15;

/// Nodes and weights on [-1, 1], computed once by Newton iteration on P_15.
fn gauss_legendre_f64() -> &'static [(f64, f64); GL_POINTS] {
    static RULE: OnceLock<[(f64, f64); GL_POINTS]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_POINTS;
        let mut rule = [(0.0, 0.0); GL_POINTS];
        for (i, slot) in rule.iter_mut().enumerate() {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        rule
    })
}

/// Values that can be accumulated by the quadrature engine.
pub trait QuadValue<T: Real>: Clone + Send {
    fn zero() -> Self;
    /// `self += w * x`
    fn axpy(&mut self, w: T, x: &Self);
    /// Max-abs distance used as the error estimate.
    fn dist(&self, other: &Self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn axpy(&mut self, w: T, x: &Self) {
        *self += w * *x;
    }
    fn dist(&self, other: &Self) -> T {
        (*self - *other).abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn axpy(&mut self, w: T, x: &Self) {
        self.re += w * x.re;
        self.im += w * x.im;
    }
    fn dist(&self, other: &Self) -> T {
        let d = *self - *other;
        d.re.abs().max(d.im.abs())
    }
}

impl<T: Real> QuadValue<T> for Matrix2<Complex<T>> {
    fn zero() -> Self {
        Matrix2::from_element(Complex::new(T::zero(), T::zero()))
    }
    fn axpy(&mut self, w: T, x: &Self) {
        for (a, b) in self.iter_mut().zip(x.iter()) {
            a.re += w * b.re;
            a.im += w * b.im;
        }
    }
    fn dist(&self, other: &Self) -> T {
        self.iter().zip(other.iter()).fold(T::zero(), |acc, (a, b)| {
            let d = *a - *b;
            acc.max(d.re.abs()).max(d.im.abs())
        })
    }
}

/// Tolerance, depth cap and mandatory breakpoints for one integral.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec<T> {
    pub abs_tol: T,
    pub max_depth: u32,
    pub breakpoints: Vec<T>,
    /// Integrand evaluations after which refinement stops.
    pub max_evaluations: usize,
}

/// Default cap on integrand evaluations per integral.
pub const DEFAULT_MAX_EVALUATIONS: usize = 2_000_000;

impl<T: Real> Default for QuadratureSpec<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            max_depth: 24,
            breakpoints: Vec::new(),
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

impl<T: Real> QuadratureSpec<T> {
    pub fn new(abs_tol: T, max_depth: u32) -> Result<Self> {
        if !(abs_tol > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "quadrature tolerance must be positive, got {abs_tol}"
            )));
        }
        Ok(Self {
            abs_tol,
            max_depth,
            breakpoints: Vec::new(),
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        })
    }

    pub fn with_tolerance(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    /// Returns a copy with extra breakpoints merged in.
    pub fn with_breakpoints(&self, extra: impl IntoIterator<Item = T>) -> Self {
        let mut out = self.clone();
        out.breakpoints.extend(extra);
        out
    }
}

/// Integral estimate plus bookkeeping.
#[derive(Debug, Clone)]
pub struct QuadResult<T, V> {
    pub value: V,
    pub error: T,
    pub evaluations: usize,
}

fn gl_panel<T, V, F>(f: &F, a: T, b: T, rule: &[(T, T)]) -> V
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    let half = (b - a) * T::lit(0.5);
    let mid = (a + b) * T::lit(0.5);
    let mut acc = V::zero();
    for &(x, w) in rule {
        acc.axpy(w * half, &f(mid + half * x));
    }
    acc
}

/// Integrates `f` over `[a, b]`.
///
/// `frequency` is an upper bound on the angular frequency of oscillatory
/// factors (e.g. `|m|` for `e^{ikm}`); it sets the initial panel count and
/// raises the depth cap by `log2(1 + frequency)`.
pub fn integrate<T, V, F>(
    f: F,
    a: T,
    b: T,
    spec: &QuadratureSpec<T>,
    frequency: T,
) -> Result<QuadResult<T, V>>
where
    T: Real,
    V: QuadValue<T>,
    F: Fn(T) -> V,
{
    if !(spec.abs_tol > T::zero()) {
        return Err(Error::InvalidParameter("quadrature tolerance must be positive".into()));
    }
    let rule: Vec<(T, T)> = gauss_legendre_f64()
        .iter()
        .map(|&(x, w)| (T::lit(x), T::lit(w)))
        .collect();
    if a == b {
        return Ok(QuadResult {
            value: V::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, T::one()) } else { (b, a, -T::one()) };
    let length = hi - lo;

    let mut cuts: Vec<T> = spec
        .breakpoints
        .iter()
        .copied()
        .filter(|&p| p > lo && p < hi)
        .collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).expect("finite breakpoints"));
    cuts.dedup();

    let freq = frequency.abs();
    let two_pi = T::two_pi();
    let depth_cap = spec.max_depth
        + (T::one() + freq).log2().ceil().to_u32().unwrap_or(0);

    let mut edges = Vec::with_capacity(cuts.len() + 2);
    edges.push(lo);
    edges.extend(cuts);
    edges.push(hi);

    // (a, b, depth, single-panel estimate)
    let mut stack: Vec<(T, T, u32, V)> = Vec::new();
    for w in edges.windows(2) {
        let (s, e) = (w[0], w[1]);
        let pieces = (freq * (e - s) / two_pi).ceil().to_usize().unwrap_or(1).max(1);
        let step = (e - s) / T::from_usize(pieces).expect("panel count");
        for p in 0..pieces {
            let pa = s + step * T::from_usize(p).expect("panel index");
            let pb = if p + 1 == pieces { e } else { pa + step };
            stack.push((pa, pb, 0, gl_panel(&f, pa, pb, &rule)));
        }
    }
    let mut evaluations = stack.len() * GL_POINTS;

    let mut total = V::zero();
    let mut err_total = T::zero();
    let mut failed = false;
    while let Some((pa, pb, depth, whole)) = stack.pop() {
        let mid = (pa + pb) * T::lit(0.5);
        let left: V = gl_panel(&f, pa, mid, &rule);
        let right: V = gl_panel(&f, mid, pb, &rule);
        evaluations += 2 * GL_POINTS;
        let mut halves = left.clone();
        halves.axpy(T::one(), &right);
        let est = halves.dist(&whole);
        let budget = spec.abs_tol * (pb - pa) / length;
        if est <= budget {
            total.axpy(T::one(), &halves);
            err_total += est;
        } else if depth >= depth_cap || evaluations >= spec.max_evaluations {
            total.axpy(T::one(), &halves);
            err_total += est;
            failed = true;
        } else {
            stack.push((pa, mid, depth + 1, left));
            stack.push((mid, pb, depth + 1, right));
        }
    }

    if failed && err_total > spec.abs_tol {
        return Err(Error::QuadratureNotConverged {
            achieved: err_total.as_f64(),
            requested: spec.abs_tol.as_f64(),
        });
    }
    let mut value = V::zero();
    value.axpy(sign, &total);
    Ok(QuadResult {
        value,
        error: err_total,
        evaluations,
    })
}
