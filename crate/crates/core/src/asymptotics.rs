//! Leading-order (volume-law) asymptotics of the measures, evaluated by
//! one-dimensional momentum quadrature.

use crate::correlation::SteadyState;
use crate::error::{Error, Result};
use crate::measures::MeasureKind;
use crate::physics::SubsystemPair;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::scalar::{cpowi, csqrt, re, Real};
use nalgebra::Complex;

/// Steady state plus the quadrature settings used for every momentum integral.
#[derive(Debug, Clone)]
pub struct BiasContext<T: Real> {
    pub state: SteadyState<T>,
    pub quad: QuadratureSpec<T>,
}

/// A leading-order value: `total = density × length`.
///
/// For the geometry-dependent expressions (combined entropy, Rényi
/// negativity) `density` is the coefficient of `ℓ_mirror` and `total`
/// contains every term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticValue<T> {
    pub density: T,
    pub total: T,
    pub kind: MeasureKind,
    pub n: Option<T>,
}

/// Side of the impurity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Momentum-resolved inputs of every integrand on `k ∈ (0, π)`.
///
/// Hole occupations `1 − f` are stored separately: deep in the Fermi sea
/// `1 − f` underflows far below the spacing of doubles near 1, and
/// fractional powers of it would otherwise amplify that rounding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Channel<T> {
    pub f_left: T,
    pub f_right: T,
    pub hole_left: T,
    pub hole_right: T,
    pub transmission: T,
}

impl<T: Real> Channel<T> {
    /// Channel with holes taken as `1 − f`.
    pub fn new(f_left: T, f_right: T, transmission: T) -> Self {
        Self {
            f_left,
            f_right,
            hole_left: T::one() - f_left,
            hole_right: T::one() - f_right,
            transmission,
        }
    }

    pub fn reflection(&self) -> T {
        T::one() - self.transmission
    }

    /// `T f_L + R f_R`: occupation of right-moving outgoing states.
    pub fn mixed_right(&self) -> T {
        self.transmission * self.f_left + self.reflection() * self.f_right
    }

    /// `1 − T f_L − R f_R`
    pub fn mixed_right_hole(&self) -> T {
        self.transmission * self.hole_left + self.reflection() * self.hole_right
    }

    /// `R f_L + T f_R`: occupation of left-moving outgoing states.
    pub fn mixed_left(&self) -> T {
        self.reflection() * self.f_left + self.transmission * self.f_right
    }

    /// `1 − R f_L − T f_R`
    pub fn mixed_left_hole(&self) -> T {
        self.reflection() * self.hole_left + self.transmission * self.hole_right
    }

    /// Occupation/hole pairs `(f_L, f_R, T f_L + R f_R, R f_L + T f_R)`.
    fn pairs(&self) -> [(T, T); 4] {
        [
            (self.f_left, self.hole_left),
            (self.f_right, self.hole_right),
            (self.mixed_right(), self.mixed_right_hole()),
            (self.mixed_left(), self.mixed_left_hole()),
        ]
    }
}

/// `(1/(1−n)) ln[x^n + x̄^n]` for an occupation `x` with hole `x̄ = 1 − x`,
/// or the binary entropy when `n` is `None`.
pub fn entropy_of<T: Real>(pair: (T, T), n: Option<T>) -> T {
    let (x, y) = (pair.0.max(T::zero()), pair.1.max(T::zero()));
    match n {
        None => -(xlnx(x) + xlnx(y)),
        Some(n) => (pow(x, n) + pow(y, n)).ln() / (T::one() - n),
    }
}

/// `(1/(1−n)) ln[x^n + (1−x)^n]`, or the binary entropy when `n` is `None`.
pub fn entropy_function<T: Real>(x: T, n: Option<T>) -> T {
    let x = x.max(T::zero()).min(T::one());
    entropy_of((x, T::one() - x), n)
}

fn xlnx<T: Real>(x: T) -> T {
    if x > T::zero() {
        x * x.ln()
    } else {
        T::zero()
    }
}

fn pow<T: Real>(x: T, p: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x.powf(p)
    }
}

fn check_index<T: Real>(n: T) -> Result<()> {
    if !(n > T::zero()) || n == T::one() {
        return Err(Error::InvalidParameter(format!("replica index must be positive and ≠ 1, got {n}")));
    }
    Ok(())
}

/// Rényi mutual information formulas stay finite for any real index other
/// than 0 and 1, since `x^n` is summed over the support only; negative
/// indices appear in the zero-temperature relations between measures.
fn check_rmi_index<T: Real>(n: T) -> Result<()> {
    if !n.is_finite() || n == T::zero() || n == T::one() {
        return Err(Error::InvalidParameter(format!("replica index must be finite, nonzero and ≠ 1, got {n}")));
    }
    Ok(())
}

fn even_index<T: Real>(n: T) -> Result<u32> {
    let x = n.as_f64();
    if x.fract() != 0.0 || x < 2.0 || (x as u64) % 2 != 0 {
        return Err(Error::InvalidParameter(format!("Rényi negativity needs an even integer n ≥ 2, got {n}")));
    }
    Ok(x as u32)
}

fn length<T: Real>(ell: i64) -> Result<T> {
    if ell < 0 {
        return Err(Error::InvalidParameter(format!("length must be non-negative, got {ell}")));
    }
    Ok(T::from_int(ell))
}

/// PRMI integrand at one momentum.
pub fn prmi_integrand<T: Real>(ch: &Channel<T>, n: T) -> T {
    let floor = T::lit(1e-300);
    let one = T::one();
    let m = one - n;
    // f^n / x^{n-1}, with x clipped away from zero
    let ratio = |f: T, x: T| pow(f, n) * x.max(floor).powf(m);
    let [(fl, hl), (fr, hr), (xr, hxr), (xl, hxl)] = ch.pairs();
    let a1 = ratio(fl, xr) + ratio(hl, hxr);
    let b1 = ratio(fr, xl) + ratio(hr, hxl);
    let a2 = ratio(fl, xl) + ratio(hl, hxl);
    let b2 = ratio(fr, xr) + ratio(hr, hxr);
    (ch.transmission * a1 * b1 + ch.reflection() * a2 * b2).ln() / (n - one)
}

/// Negativity integrand at one momentum.
pub fn negativity_integrand<T: Real>(ch: &Channel<T>) -> T {
    let [(fl, hl), (fr, hr), _, _] = ch.pairs();
    // 1 − f_L − f_R + 2 f_L f_R and f_L + f_R − 2 f_L f_R, free of cancellation
    let a = hl * hr + fl * fr;
    let b = fl * hr + fr * hl;
    let d = fl - fr;
    let root = (a * a + T::lit(4.0) * ch.transmission * ch.reflection() * d * d).sqrt();
    (b + root).ln()
}

/// `Y_n` evaluated at a possibly complex transmission probability.
///
/// `Y_n` is even in the square root it contains, so the branch of the
/// root does not matter.
pub fn y_n_complex<T: Real>(f_left: T, f_right: T, transmission: Complex<T>, n: u32) -> Complex<T> {
    let one = re(T::one());
    let (fl, fr) = (re(f_left), re(f_right));
    let tt = transmission;
    let rr = one - tt;
    let p = fl * fr;
    let half = re(T::lit(0.5));
    let a = (one - fl - fr + p * re(T::lit(2.0))) * half;
    let b = (one - fl - fr) * half;
    let d = fl - fr;
    let s = csqrt(a * a + tt * rr * d * d);
    cpowi(tt * fl + rr * fr - p, n) + cpowi(rr * fl + tt * fr - p, n) + cpowi(s + b, n) + cpowi(s - b, n)
}

/// `Y_n` at a physical (real) transmission probability.
///
/// Written in terms of holes: `T f_L + R f_R − f_L f_R = T f_L h_R + R f_R h_L`,
/// and `s ∓ b` with `s² − b² = f_L f_R h_L h_R + TR (f_L − f_R)²`.
pub fn y_n<T: Real>(ch: &Channel<T>, n: u32) -> T {
    let [(fl, hl), (fr, hr), _, _] = ch.pairs();
    let (tt, rr) = (ch.transmission, ch.reflection());
    let half = T::lit(0.5);
    let b = (hl * hr - fl * fr) * half;
    let d = fl - fr;
    let gap = fl * fr * hl * hr + tt * rr * d * d;
    let s = (b * b + gap).sqrt();
    let (big, small) = if b >= T::zero() {
        let big = s + b;
        (big, if big > T::zero() { gap / big } else { T::zero() })
    } else {
        let big = s - b;
        (big, if big > T::zero() { gap / big } else { T::zero() })
    };
    let p = |x: T| x.powi(n as i32);
    p(tt * fl * hr + rr * fr * hl) + p(rr * fl * hr + tt * fr * hl) + p(big) + p(small)
}

/// `X_n = Π_γ [1 − (1−e^{2πiγ/n})(R f_L + T f_R) − (1+e^{−2πiγ/n})(T f_L + R f_R)
///             + (1−e^{2πiγ/n})(1+e^{−2πiγ/n}) f_L f_R]`, γ = −(n−1)/2, …, (n−1)/2.
pub fn x_n_complex<T: Real>(f_left: T, f_right: T, transmission: Complex<T>, n: u32) -> Complex<T> {
    let one = re(T::one());
    let tt = transmission;
    let rr = one - tt;
    let (fl, fr) = (re(f_left), re(f_right));
    let nt = T::from_u32(n).unwrap();
    let mut prod = one;
    for j in 0..n {
        let gamma = T::from_u32(j).unwrap() - (nt - T::one()) * T::lit(0.5);
        let e = T::cis(T::two_pi() * gamma / nt);
        let a = one - e;
        let b = one + e.conj();
        prod *= one - a * (rr * fl + tt * fr) - b * (tt * fl + rr * fr) + a * b * fl * fr;
    }
    prod
}

/// Finite roots `T_γ` of `X_n` viewed as a polynomial in the transmission
/// probability.
///
/// A factor whose `γ` satisfies `cos(2πγ/n) = 0` does not depend on `T`; for
/// `n ≡ 2 (mod 4)` the two factors `γ = ±n/4` drop the degree by two and
/// contribute no root.
pub fn x_n_roots<T: Real>(f_left: T, f_right: T, n: u32) -> Result<Vec<Complex<T>>> {
    if f_left == f_right {
        return Err(Error::InvalidParameter("roots undefined without bias (f_L = f_R)".into()));
    }
    let one = re(T::one());
    let nt = T::from_u32(n).unwrap();
    let d = re(f_left - f_right);
    Ok((0..n)
        .filter_map(|j| {
            let gamma = T::from_u32(j).unwrap() - (nt - T::one()) * T::lit(0.5);
            let e = T::cis(T::two_pi() * gamma / nt);
            let slope = e + e.conj();
            if slope.re.abs() < T::lit(1e3) * T::default_epsilon() {
                return None;
            }
            let num = (one - (one - e) * re(f_left)) * (one - (one + e.conj()) * re(f_right));
            Some(num / (slope * d))
        })
        .collect())
}

impl<T: Real> BiasContext<T> {
    pub fn new(state: SteadyState<T>, quad: QuadratureSpec<T>) -> Self {
        Self { state, quad }
    }

    /// Integrand inputs at `k ∈ (0, π)`.
    pub fn channel(&self, k: T) -> Channel<T> {
        let (f_left, f_right) = self.state.occupations(k);
        let (hole_left, hole_right) = self.state.holes(k);
        Channel {
            f_left,
            f_right,
            hole_left,
            hole_right,
            transmission: self.state.model.transmission(k),
        }
    }

    /// `∫_0^π dk/2π g(channel(k))`
    pub fn integrate_channel(&self, g: impl Fn(&Channel<T>) -> T) -> Result<T> {
        let spec = self.quad.with_breakpoints(self.state.half_breakpoints());
        let res = integrate(|k: T| g(&self.channel(k)), T::zero(), T::pi(), &spec, T::zero())?;
        let value = res.value / T::two_pi();
        if !value.is_finite() {
            return Err(Error::InvalidParameter("asymptotic integrand is not finite".into()));
        }
        Ok(value)
    }

    fn value(&self, density: T, ell: T, kind: MeasureKind, n: Option<T>) -> AsymptoticValue<T> {
        AsymptoticValue {
            density,
            total: density * ell,
            kind,
            n,
        }
    }

    fn entropic_mi_density(&self, n: Option<T>) -> Result<T> {
        self.integrate_channel(|ch| {
            let [l, r, mr, ml] = ch.pairs();
            entropy_of(mr, n) + entropy_of(ml, n) - entropy_of(l, n) - entropy_of(r, n)
        })
    }

    /// Rényi mutual information between `A_L` and `A_R`.
    pub fn rmi_asymptotic(&self, n: T, ell_mirror: i64) -> Result<AsymptoticValue<T>> {
        check_rmi_index(n)?;
        let d = self.entropic_mi_density(Some(n))?;
        Ok(self.value(d, length(ell_mirror)?, MeasureKind::RenyiMutualInformation, Some(n)))
    }

    /// Mutual information between `A_L` and `A_R`.
    pub fn mi_asymptotic(&self, ell_mirror: i64) -> Result<AsymptoticValue<T>> {
        let d = self.entropic_mi_density(None)?;
        Ok(self.value(d, length(ell_mirror)?, MeasureKind::MutualInformation, None))
    }

    /// Petz Rényi mutual information between `A_L` and `A_R`.
    pub fn prmi_asymptotic(&self, n: T, ell_mirror: i64) -> Result<AsymptoticValue<T>> {
        check_index(n)?;
        let d = self.integrate_channel(|ch| prmi_integrand(ch, n))?;
        Ok(self.value(d, length(ell_mirror)?, MeasureKind::PetzRenyiMutualInformation, Some(n)))
    }

    /// Fermionic negativity between `A_L` and `A_R`.
    pub fn negativity_asymptotic(&self, ell_mirror: i64) -> Result<AsymptoticValue<T>> {
        let d = self.integrate_channel(negativity_integrand)?;
        Ok(self.value(d, length(ell_mirror)?, MeasureKind::Negativity, None))
    }

    /// Entropy of a single interval of length `ell` on one side.
    pub fn interval_entropy_asymptotic(&self, side: Side, n: Option<T>, ell: i64) -> Result<AsymptoticValue<T>> {
        if let Some(n) = n {
            check_index(n)?;
        }
        let d = self.integrate_channel(|ch| {
            let [l, r, mr, ml] = ch.pairs();
            match side {
                Side::Left => entropy_of(l, n) + entropy_of(ml, n),
                Side::Right => entropy_of(r, n) + entropy_of(mr, n),
            }
        })?;
        Ok(self.value(d, length(ell)?, entropy_kind(n), n))
    }

    /// Entropy of the two mirror intervals together.
    pub fn mirror_entropy_asymptotic(&self, n: Option<T>, ell_mirror: i64) -> Result<AsymptoticValue<T>> {
        if let Some(n) = n {
            check_index(n)?;
        }
        // ∫_{-π}^{π} dk/π h(f̃) = 2 ∫_0^π dk/2π [h(f_L) + h(f_R)]
        let d = self.integrate_channel(|ch| {
            let [l, r, _, _] = ch.pairs();
            entropy_of(l, n) + entropy_of(r, n)
        })?;
        let d = d + d;
        Ok(self.value(d, length(ell_mirror)?, entropy_kind(n), n))
    }

    /// Entropy of `A_L ∪ A_R`.
    pub fn combined_entropy_asymptotic(&self, geom: &SubsystemPair, n: Option<T>) -> Result<AsymptoticValue<T>> {
        if let Some(n) = n {
            check_index(n)?;
        }
        let lm = T::from_int(geom.mirror_overlap_length());
        let hl = self.integrate_channel(|ch| entropy_of(ch.pairs()[0], n))?;
        let hr = self.integrate_channel(|ch| entropy_of(ch.pairs()[1], n))?;
        let hmr = self.integrate_channel(|ch| entropy_of(ch.pairs()[2], n))?;
        let hml = self.integrate_channel(|ch| entropy_of(ch.pairs()[3], n))?;
        let total = (T::from_int(geom.ell_left) + lm) * hl
            + (T::from_int(geom.ell_right) + lm) * hr
            + T::from_int(geom.delta_ell_left()) * hml
            + T::from_int(geom.delta_ell_right()) * hmr;
        Ok(AsymptoticValue {
            density: (hl + hr) * T::lit(2.0),
            total,
            kind: entropy_kind(n),
            n,
        })
    }

    /// Rényi negativity of even order `n` between `A_L` and `A_R`.
    pub fn renyi_negativity_asymptotic(&self, geom: &SubsystemPair, n: T) -> Result<AsymptoticValue<T>> {
        let ni = even_index(n)?;
        let lm = T::from_int(geom.mirror_overlap_length());
        let log_h = |p: (T, T)| (pow(p.0, n) + pow(p.1, n)).ln();
        let dy = self.integrate_channel(|ch| y_n(ch, ni).ln())?;
        let hl = self.integrate_channel(|ch| log_h(ch.pairs()[0]))?;
        let hr = self.integrate_channel(|ch| log_h(ch.pairs()[1]))?;
        let hmr = self.integrate_channel(|ch| log_h(ch.pairs()[2]))?;
        let hml = self.integrate_channel(|ch| log_h(ch.pairs()[3]))?;
        let total = lm * dy
            + T::from_int(geom.ell_left) * hl
            + T::from_int(geom.ell_right) * hr
            + T::from_int(geom.delta_ell_left()) * hml
            + T::from_int(geom.delta_ell_right()) * hmr;
        Ok(AsymptoticValue {
            density: dy,
            total,
            kind: MeasureKind::RenyiNegativity,
            n: Some(n),
        })
    }

    /// Leading-order value of a bipartite measure between `A_L` and `A_R`.
    pub fn bipartite(&self, kind: MeasureKind, n: Option<T>, geom: &SubsystemPair) -> Result<AsymptoticValue<T>> {
        let lm = geom.mirror_overlap_length();
        let need = |n: Option<T>| n.ok_or_else(|| Error::InvalidParameter(format!("{kind} requires a replica index")));
        match kind {
            MeasureKind::MutualInformation => self.mi_asymptotic(lm),
            MeasureKind::RenyiMutualInformation => self.rmi_asymptotic(need(n)?, lm),
            MeasureKind::PetzRenyiMutualInformation => self.prmi_asymptotic(need(n)?, lm),
            MeasureKind::Negativity => self.negativity_asymptotic(lm),
            MeasureKind::RenyiNegativity => self.renyi_negativity_asymptotic(geom, need(n)?),
            MeasureKind::VonNeumannEntropy | MeasureKind::RenyiEntropy => self.combined_entropy_asymptotic(geom, n),
        }
    }
}

fn entropy_kind<T>(n: Option<T>) -> MeasureKind {
    if n.is_some() {
        MeasureKind::RenyiEntropy
    } else {
        MeasureKind::VonNeumannEntropy
    }
}
