//! Independent checks of the asymptotic machinery: correlation-matrix
//! moments, their decomposition over subsystems, Toeplitz determinant
//! asymptotics and the negativity polynomial identity.

use crate::asymptotics::{x_n_complex, x_n_roots, y_n_complex, BiasContext, Side};
use crate::correlation::{BlockSymbol, BuildMode, CorrelationMatrix, SteadyState};
use crate::error::{Error, Result};
use crate::physics::SubsystemPair;
use crate::quadrature::{integrate, QuadratureSpec};
use crate::scalar::{cabs, cln, cpowi, re, Real};
use nalgebra::{Complex, DMatrix, Matrix2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub mod many_body;

/// Numeric moment against its leading-order prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport<T> {
    pub p: u32,
    pub numeric: T,
    pub asymptotic: T,
    pub relative_error: T,
    /// Interval lengths involved, in the order the check documents.
    pub lengths: Vec<i64>,
}

/// Outcome of sampling `|X_n − Y_n|`.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport<T> {
    pub n: u32,
    pub samples: usize,
    pub max_difference: T,
    /// Largest `|Y_n(T_γ)|` relative to the size of its four terms.
    pub max_root_residual: T,
    /// Largest `|Im Y_n|` at real transmission.
    pub max_imag_residue: T,
}

/// Finite-size log-determinants per length next to `ℓ × density`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeterminantReport<T> {
    pub lengths: Vec<usize>,
    /// `ln det / ℓ` for each length.
    pub per_site: Vec<Complex<T>>,
    pub density: Complex<T>,
    /// `|ln det / ℓ − density| / |density|`, imaginary parts compared modulo `2π/ℓ`.
    pub relative_errors: Vec<T>,
}

impl<T: Real> DeterminantReport<T> {
    /// Whether the error shrinks at every step of the length ladder.
    pub fn is_decreasing(&self) -> bool {
        self.relative_errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn final_error(&self) -> T {
        self.relative_errors.last().copied().unwrap_or(T::lit(f64::NAN))
    }
}

/// `Tr[C^p]` from the spectrum.
pub fn moment_trace<T: Real>(c: &CorrelationMatrix<T>, p: u32) -> Result<T> {
    if p == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let spec = c.spectrum()?;
    Ok(spec.iter().map(|&v| v.powi(p as i32)).fold(T::zero(), |a, b| a + b))
}

/// Leading-order `Tr[(C_{A_side})^p]` for an interval of `ell` sites.
pub fn single_interval_moment_asymptotic<T: Real>(ctx: &BiasContext<T>, side: Side, p: u32, ell: i64) -> Result<T> {
    if p == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let e = p as i32;
    let density = ctx.integrate_channel(|ch| match side {
        Side::Left => ch.f_left.powi(e) + ch.mixed_left().powi(e),
        Side::Right => ch.f_right.powi(e) + ch.mixed_right().powi(e),
    })?;
    Ok(density * T::from_int(ell))
}

fn interval_sites(side: Side, d: i64, ell: i64, m0: i64) -> Vec<i64> {
    match side {
        Side::Left => (-m0 - d - ell..=-m0 - d - 1).collect(),
        Side::Right => (m0 + d + 1..=m0 + d + ell).collect(),
    }
}

/// Finite-difference slope `(Tr[C^p](ℓ₂) − Tr[C^p](ℓ₁)) / (ℓ₂ − ℓ₁)` of an
/// interval at distance `d` against the predicted density.
pub fn moment_slope_check<T: Real>(
    ctx: &BiasContext<T>,
    side: Side,
    p: u32,
    lengths: (i64, i64),
    d: i64,
    mode: BuildMode,
) -> Result<MomentReport<T>> {
    let (l1, l2) = lengths;
    if l1 < 1 || l2 <= l1 {
        return Err(Error::InvalidParameter("slope needs 1 <= ℓ₁ < ℓ₂".into()));
    }
    let m0 = ctx.state.params.impurity_halfwidth;
    let trace = |ell: i64| -> Result<T> {
        let c = ctx.state.build_restricted_matrix(&interval_sites(side, d, ell, m0), mode, &ctx.quad)?;
        moment_trace(&c, p)
    };
    let numeric = (trace(l2)? - trace(l1)?) / T::from_int(l2 - l1);
    let asymptotic = single_interval_moment_asymptotic(ctx, side, p, 1)?;
    Ok(MomentReport {
        p,
        numeric,
        asymptotic,
        relative_error: relative(numeric, asymptotic),
        lengths: vec![l1, l2],
    })
}

/// `Tr[C_A^p]` against `(Δℓ_L/ℓ_L) Tr[C_{A_L}^p] + (Δℓ_R/ℓ_R) Tr[C_{A_R}^p] + Tr[C_mirror^p]`,
/// every trace computed numerically.
pub fn moment_decomposition_check<T: Real>(
    state: &SteadyState<T>,
    geom: &SubsystemPair,
    p: u32,
    mode: BuildMode,
    quad: &QuadratureSpec<T>,
) -> Result<MomentReport<T>> {
    let union = state.build_subsystems(geom, mode, quad)?;
    let left = union.restrict(&geom.sites_left())?;
    let right = union.restrict(&geom.sites_right())?;
    let lm = geom.mirror_overlap_length();
    let mirror = if lm > 0 {
        moment_trace(&union.restrict(&geom.mirror_pair_sites())?, p)?
    } else {
        T::zero()
    };
    let numeric = moment_trace(&union, p)?;
    let wl = T::from_int(geom.delta_ell_left()) / T::from_int(geom.ell_left);
    let wr = T::from_int(geom.delta_ell_right()) / T::from_int(geom.ell_right);
    let asymptotic = wl * moment_trace(&left, p)? + wr * moment_trace(&right, p)? + mirror;
    Ok(MomentReport {
        p,
        numeric,
        asymptotic,
        relative_error: relative(numeric, asymptotic),
        lengths: vec![geom.ell_left, geom.ell_right, lm],
    })
}

fn relative<T: Real>(numeric: T, reference: T) -> T {
    let scale = reference.abs().max(T::default_epsilon());
    (numeric - reference).abs() / scale
}

fn cdet<T: Real>(m: &Matrix2<Complex<T>>) -> Complex<T> {
    m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
}

/// `∫_{-π}^{π} dk/2π ln det[transform(Ψ(k))]` on the principal branch.
///
/// Fails with a winding error if the determinant comes close to zero on a
/// scan of the circle, where the logarithm has no continuous branch.
pub fn szego_widom_density<T: Real>(
    symbol: &BlockSymbol<T>,
    transform: impl Fn(Matrix2<Complex<T>>) -> Matrix2<Complex<T>> + Send + Sync + 'static,
    quad: &QuadratureSpec<T>,
) -> Result<Complex<T>> {
    let psi = symbol.map(transform);
    let scan = 4096;
    let pi = T::pi();
    // |det| over the Hadamard bound ‖col₁‖‖col₂‖ measures closeness to singular
    let mut smallest = (T::lit(f64::INFINITY), T::zero());
    for j in 0..scan {
        let k = -pi + T::two_pi() * (T::from_usize(j).unwrap() + T::lit(0.5)) / T::from_usize(scan).unwrap();
        let m = psi.eval(k);
        let bound = m.column(0).norm() * m.column(1).norm();
        let ratio = if bound > T::zero() { cabs(cdet(&m)) / bound } else { T::zero() };
        if ratio < smallest.0 {
            smallest = (ratio, k);
        }
    }
    if !(smallest.0 > T::lit(1e-12)) {
        return Err(Error::Winding { k: smallest.1.as_f64() });
    }
    let spec = quad.with_breakpoints(psi.breakpoints().iter().copied().chain([T::zero()]));
    let res = integrate(|k: T| cln(cdet(&psi.eval(k))), -pi, pi, &spec, T::zero())?;
    Ok(res.value / re(T::two_pi()))
}

/// Compares `ln det[I + (e^{2πiγ/n} − 1) C_mirror] / ℓ` for long-range mirror
/// matrices of increasing size against the symbol density.
pub fn mirror_szego_widom_check<T: Real>(
    state: &SteadyState<T>,
    gamma: T,
    n: u32,
    lengths: &[usize],
    quad: &QuadratureSpec<T>,
) -> Result<DeterminantReport<T>> {
    crate::correlation::gamma_prefactors(gamma, n)?;
    let z = T::cis(T::two_pi() * gamma / T::from_u32(n).unwrap()) - re(T::one());
    let density = szego_widom_density(&state.symbol(), move |m| Matrix2::identity() + m * z, quad)?;
    let m0 = state.params.impurity_halfwidth;
    let mut per_site = Vec::with_capacity(lengths.len());
    for &ell in lengths {
        let geom = SubsystemPair::new(0, ell as i64, 0, ell as i64, m0)?;
        let c = state.build_mirror(&geom, BuildMode::LongRange, quad)?;
        let spectrum = c.spectrum()?;
        let logdet = spectrum
            .iter()
            .map(|&v| cln(re(T::one()) + z * v))
            .fold(re(T::zero()), |a, b| a + b);
        per_site.push(logdet / re(T::from_usize(ell).unwrap()));
    }
    Ok(report(lengths, per_site, density))
}

fn report<T: Real>(lengths: &[usize], per_site: Vec<Complex<T>>, density: Complex<T>) -> DeterminantReport<T> {
    let scale = cabs(density).max(T::default_epsilon());
    let relative_errors = lengths
        .iter()
        .zip(&per_site)
        .map(|(&ell, v)| {
            let l = T::from_usize(ell).unwrap();
            let mut d = *v - density;
            // ln det is defined up to 2πi; per site that is 2π/ℓ
            let period = T::two_pi() / l;
            d.im = d.im - (d.im / period).round() * period;
            cabs(d) / scale
        })
        .collect();
    DeterminantReport {
        lengths: lengths.to_vec(),
        per_site,
        density,
        relative_errors,
    }
}

/// Condition number above which a Toeplitz inverse is refused.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Symbol pairs `(Ψ_j, Υ_j)` whose product `∏ Ψ_j Υ_j^{-1}` equals
/// `(I − Φ_×)^{n−1} (I − Φ)^{−n} Φ^n Φ_×^{1−n}`, so that
/// `det[Φ^n Φ_×^{1−n} + (I−Φ)^n (I−Φ_×)^{1−n}]` factors as
/// `det[(I−Φ)^n (I−Φ_×)^{1−n}] · det[I + ∏ Ψ_j Υ_j^{-1}]`.
pub fn prmi_symbol_pairs<T: Real>(phi: &BlockSymbol<T>, n: u32) -> Result<Vec<(BlockSymbol<T>, BlockSymbol<T>)>> {
    if n < 2 {
        return Err(Error::InvalidParameter("the factorized Petz form needs an integer index n >= 2".into()));
    }
    let id = BlockSymbol::identity();
    let cross = phi.diagonal_part();
    let hole = phi.complement();
    let cross_hole = cross.complement();
    let mut pairs = Vec::new();
    for _ in 0..n - 2 {
        pairs.push((cross_hole.clone(), id.clone()));
    }
    pairs.push((cross_hole, hole.clone()));
    for _ in 0..n - 1 {
        pairs.push((phi.clone(), hole.clone()));
    }
    pairs.push((phi.clone(), cross.clone()));
    for _ in 0..n - 2 {
        pairs.push((id.clone(), cross.clone()));
    }
    Ok(pairs)
}

/// `ln det[I + ∏_j T_ℓ[Ψ_j] T_ℓ[Υ_j]^{-1}] / ℓ` for each length against
/// `∫ dk/2π ln det[I + ∏_j Ψ_j Υ_j^{-1}]`.
pub fn generalized_sw_check<T: Real>(
    pairs: &[(BlockSymbol<T>, BlockSymbol<T>)],
    lengths: &[usize],
    quad: &QuadratureSpec<T>,
) -> Result<DeterminantReport<T>> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("at least one symbol pair is required".into()));
    }
    let owned: Vec<(BlockSymbol<T>, BlockSymbol<T>)> = pairs.to_vec();
    let product = BlockSymbol::from_fn(
        move |k| {
            let mut acc = Matrix2::identity();
            for (psi, ups) in &owned {
                let inv = ups.eval(k).try_inverse().unwrap_or_else(|| Matrix2::from_element(re(T::lit(f64::NAN))));
                acc = acc * psi.eval(k) * inv;
            }
            acc
        },
        pairs.iter().flat_map(|(a, b)| a.breakpoints().iter().chain(b.breakpoints()).copied()).collect(),
    );
    let density = szego_widom_density(&product, |m| Matrix2::identity() + m, quad)?;
    let mut per_site = Vec::with_capacity(lengths.len());
    for &ell in lengths {
        let dim = 2 * ell;
        let mut acc = DMatrix::<Complex<T>>::identity(dim, dim);
        for (psi, ups) in pairs {
            let tp = psi.toeplitz(ell, quad)?;
            let tu = ups.toeplitz(ell, quad)?;
            let cond = condition_number(&tu)?;
            if !(cond <= T::lit(CONDITION_LIMIT)) {
                return Err(Error::IllConditioned {
                    cond: cond.as_f64(),
                    limit: CONDITION_LIMIT,
                });
            }
            let inv = tu
                .lu()
                .try_inverse().ok_or_else(|| Error::Singular(format!("Toeplitz matrix at ℓ = {ell}")))?;
            acc = acc * tp * inv;
        }
        let m = DMatrix::identity(dim, dim) + acc;
        per_site.push(lu_log_det(m)? / re(T::from_usize(ell).unwrap()));
    }
    Ok(report(lengths, per_site, density))
}

fn condition_number<T: Real>(m: &DMatrix<Complex<T>>) -> Result<T> {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(T::zero(), |a, b| a.max(b));
    let min = sv.iter().copied().fold(T::lit(f64::INFINITY), |a, b| a.min(b));
    if !(min > T::zero()) {
        return Ok(T::lit(f64::INFINITY));
    }
    Ok(max / min)
}

fn lu_log_det<T: Real>(m: DMatrix<Complex<T>>) -> Result<Complex<T>> {
    let lu = m.lu();
    let u = lu.u();
    let mut acc = re(T::zero());
    for i in 0..u.nrows() {
        let d = u[(i, i)];
        if cabs(d) == T::zero() {
            return Err(Error::Singular("zero pivot in log-determinant".into()));
        }
        acc += cln(d);
    }
    // a row swap contributes a factor −1
    let swaps = lu.p().determinant::<T>();
    if swaps < T::zero() {
        acc += Complex::new(T::zero(), T::pi());
    }
    Ok(acc)
}

/// `|X_n − Y_n|` at one real point.
pub fn xn_yn_difference<T: Real>(n: u32, f_left: T, f_right: T, transmission: T) -> Result<T> {
    check_even(n)?;
    let t = re(transmission);
    Ok(cabs(x_n_complex(f_left, f_right, t, n) - y_n_complex(f_left, f_right, t, n)))
}

/// `|Y_n(T_γ)|` relative to the magnitude of its terms, maximized over the
/// finite roots.
pub fn yn_root_residual<T: Real>(n: u32, f_left: T, f_right: T) -> Result<T> {
    check_even(n)?;
    let roots = x_n_roots(f_left, f_right, n)?;
    let mut worst = T::zero();
    for t in roots {
        let y = y_n_complex(f_left, f_right, t, n);
        let scale = y_term_scale(f_left, f_right, t, n).max(T::one());
        worst = worst.max(cabs(y) / scale);
    }
    Ok(worst)
}

/// Sum of the magnitudes of the four terms of `Y_n`, the natural size of
/// its cancellation error.
fn y_term_scale<T: Real>(f_left: T, f_right: T, tt: Complex<T>, n: u32) -> T {
    let one = re(T::one());
    let (fl, fr) = (re(f_left), re(f_right));
    let rr = one - tt;
    let p = fl * fr;
    let a = (one - fl - fr + p * re(T::lit(2.0))) * re(T::lit(0.5));
    let b = (one - fl - fr) * re(T::lit(0.5));
    let d = fl - fr;
    let s = crate::scalar::csqrt(a * a + tt * rr * d * d);
    [tt * fl + rr * fr - p, rr * fl + tt * fr - p, s + b, s - b]
        .iter()
        .map(|z| cabs(cpowi(*z, n)))
        .fold(T::zero(), |acc, x| acc + x)
}

fn check_even(n: u32) -> Result<()> {
    if n == 0 || n % 2 == 1 {
        return Err(Error::InvalidParameter(format!("the identity holds for even n, got {n}")));
    }
    Ok(())
}

/// Samples `(f_L, f_R, T)` uniformly in the open unit cube from a fixed seed
/// and records the worst deviations.
pub fn xn_yn_identity<T: Real>(n: u32, samples: usize, seed: u64) -> Result<IdentityReport<T>> {
    check_even(n)?;
    if samples == 0 {
        return Err(Error::InvalidParameter("at least one sample is required".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut open = || -> f64 {
        loop {
            let x: f64 = rng.gen();
            if x > 0.0 {
                return x;
            }
        }
    };
    let points: Vec<(T, T, T)> = (0..samples).map(|_| (T::lit(open()), T::lit(open()), T::lit(open()))).collect();
    let rows: Vec<(T, T, T)> = points
        .par_iter()
        .map(|&(fl, fr, t)| -> Result<(T, T, T)> {
            let x = x_n_complex(fl, fr, re(t), n);
            let y = y_n_complex(fl, fr, re(t), n);
            let root = if fl != fr { yn_root_residual(n, fl, fr)? } else { T::zero() };
            Ok((cabs(x - y), y.im.abs(), root))
        })
        .collect::<Result<_>>()?;
    let max = |f: fn(&(T, T, T)) -> T| rows.iter().map(f).fold(T::zero(), |a, b| a.max(b));
    Ok(IdentityReport {
        n,
        samples,
        max_difference: max(|r| r.0),
        max_imag_residue: max(|r| r.1),
        max_root_residual: max(|r| r.2),
    })
}

/// `Tr[C^p]` by repeated multiplication, for cross-checking [`moment_trace`].
pub fn moment_trace_by_power<T: Real>(c: &CorrelationMatrix<T>, p: u32) -> Result<T> {
    if p == 0 {
        return Err(Error::InvalidParameter("moment order must be at least 1".into()));
    }
    let mut acc = c.entries.clone();
    for _ in 1..p {
        acc = &acc * &c.entries;
    }
    Ok(acc.trace().re)
}
