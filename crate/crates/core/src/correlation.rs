//! Two-point correlation matrices of the current-carrying steady state and
//! the 2×2 block symbols of mirror-pair subsystems.

use crate::error::{Error, Result};
use crate::physics::{Amplitudes, LatticeParams, ReservoirPair, ScatteringModel, SubsystemPair};
use crate::quadrature::{integrate, QuadratureSpec};
use crate::scalar::{re, Real};
use nalgebra::{Complex, DMatrix, DVector, Matrix2};
use rayon::prelude::*;
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// How matrix entries are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BuildMode {
    /// Full scattering-state integral at finite distances.
    Exact,
    /// Distances to the impurity sent to infinity; entries become Toeplitz /
    /// Hankel in the site indices.
    LongRange,
}

/// Impurity model coupled to two reservoirs: everything needed to evaluate
/// the steady-state correlations.
#[derive(Debug, Clone)]
pub struct SteadyState<T: Real> {
    pub params: LatticeParams<T>,
    pub reservoirs: ReservoirPair<T>,
    pub model: ScatteringModel<T>,
}

/// Side of the impurity a site lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Side {
    Left,
    Right,
}

/// Long-range entries depend on the site pair only through these keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum LongRangeKey {
    /// both sites in `A_R`, `j - m`
    RightRight(i64),
    /// both sites in `A_L`, `j - m`
    LeftLeft(i64),
    /// `m ∈ A_L`, `j ∈ A_R`, `j + m`
    RightLeft(i64),
    /// `j ∈ A_L`, `m ∈ A_R`, `j + m`
    LeftRight(i64),
}

impl LongRangeKey {
    fn frequency(&self) -> i64 {
        match *self {
            Self::RightRight(o) | Self::LeftLeft(o) | Self::RightLeft(o) | Self::LeftRight(o) => o.abs(),
        }
    }
}

impl<T: Real> SteadyState<T> {
    pub fn new(params: LatticeParams<T>, reservoirs: ReservoirPair<T>, model: ScatteringModel<T>) -> Self {
        Self {
            params,
            reservoirs,
            model,
        }
    }

    /// Resonant-level impurity with on-site energy `eps0`.
    pub fn resonant_level(params: LatticeParams<T>, reservoirs: ReservoirPair<T>, eps0: T) -> Result<Self> {
        let model = ScatteringModel::resonant_level(eps0, &params)?;
        Ok(Self::new(params, reservoirs, model))
    }

    /// `(f_L(ε(k)), f_R(ε(k)))`
    pub fn occupations(&self, k: T) -> (T, T) {
        (
            self.reservoirs.f_left(k, &self.params),
            self.reservoirs.f_right(k, &self.params),
        )
    }

    /// `(1 − f_L(ε(k)), 1 − f_R(ε(k)))`, computed without cancellation.
    pub fn holes(&self, k: T) -> (T, T) {
        (
            self.reservoirs.hole_left(k, &self.params),
            self.reservoirs.hole_right(k, &self.params),
        )
    }

    /// Non-smooth points of every integrand on `(0, π)`.
    pub fn half_breakpoints(&self) -> Vec<T> {
        let mut b = self.reservoirs.fermi_breakpoints(&self.params);
        b.extend(self.model.breakpoints());
        b
    }

    /// Non-smooth points on `[-π, π]`, including `k = 0`.
    pub fn full_breakpoints(&self) -> Vec<T> {
        let mut b = vec![T::zero()];
        for k in self.half_breakpoints() {
            b.push(k);
            b.push(-k);
        }
        b
    }

    fn side(&self, m: i64) -> Result<Side> {
        let m0 = self.params.impurity_halfwidth;
        if m < -m0 {
            Ok(Side::Left)
        } else if m > m0 {
            Ok(Side::Right)
        } else {
            Err(Error::InsideImpurity { site: m, halfwidth: m0 })
        }
    }

    /// `⟨m|k⟩` for a site outside the impurity.
    pub fn scattering_wavefunction(&self, m: i64, k: T) -> Result<Complex<T>> {
        let side = self.side(m)?;
        if k == T::zero() {
            return Err(Error::UndefinedSide);
        }
        if k.abs() >= T::pi() {
            return Err(Error::InvalidParameter(format!("momentum {k} outside (-π, π)")));
        }
        let amp = self.model.amplitudes(k);
        Ok(wavefunction_from(&amp, side, m, k))
    }

    /// `⟨c_j† c_m⟩` at finite distances from the impurity.
    pub fn correlation_entry_exact(&self, j: i64, m: i64, quad: &QuadratureSpec<T>) -> Result<Complex<T>> {
        let sj = self.side(j)?;
        let sm = self.side(m)?;
        let integrand = |k: T| {
            let amp = self.model.amplitudes(k);
            let (fl, fr) = self.occupations(k);
            let plus = wavefunction_from(&amp, sj, j, k).conj() * wavefunction_from(&amp, sm, m, k);
            let minus = wavefunction_from(&amp, sj, j, -k).conj() * wavefunction_from(&amp, sm, m, -k);
            plus * fl + minus * fr
        };
        let spec = quad.with_breakpoints(self.half_breakpoints());
        let freq = T::from_int(j.abs() + m.abs());
        let res = integrate(integrand, T::zero(), T::pi(), &spec, freq)?;
        Ok(res.value / T::two_pi())
    }

    /// `⟨c_j† c_m⟩` in the limit of large distances to the impurity.
    pub fn correlation_entry_longrange(&self, j: i64, m: i64, quad: &QuadratureSpec<T>) -> Result<Complex<T>> {
        let key = self.longrange_key(j, m)?;
        self.longrange_value(key, quad)
    }

    fn longrange_key(&self, j: i64, m: i64) -> Result<LongRangeKey> {
        Ok(match (self.side(j)?, self.side(m)?) {
            (Side::Right, Side::Right) => LongRangeKey::RightRight(j - m),
            (Side::Left, Side::Left) => LongRangeKey::LeftLeft(j - m),
            (Side::Right, Side::Left) => LongRangeKey::RightLeft(j + m),
            (Side::Left, Side::Right) => LongRangeKey::LeftRight(j + m),
        })
    }

    fn longrange_value(&self, key: LongRangeKey, quad: &QuadratureSpec<T>) -> Result<Complex<T>> {
        // every case folded onto k ∈ (0, π), where f̃(k) = f_L and f̃(-k) = f_R
        let integrand = |k: T| -> Complex<T> {
            let amp = self.model.amplitudes(k);
            let (fl, fr) = self.occupations(k);
            let tt = amp.transmission();
            let rr = amp.reflection();
            match key {
                LongRangeKey::RightRight(o) => {
                    let ph = T::cis(T::from_int(o) * k);
                    ph * fr + ph.conj() * (fl * tt + fr * rr)
                }
                LongRangeKey::LeftLeft(o) => {
                    let ph = T::cis(T::from_int(o) * k);
                    ph.conj() * fl + ph * (fr * tt + fl * rr)
                }
                LongRangeKey::RightLeft(s) => {
                    let w = amp.t_left.conj() * amp.r_left * fl + amp.t_right * amp.r_right.conj() * fr;
                    w * T::cis(-T::from_int(s) * k)
                }
                LongRangeKey::LeftRight(s) => {
                    let w = amp.t_left * amp.r_left.conj() * fl + amp.t_right.conj() * amp.r_right * fr;
                    w * T::cis(T::from_int(s) * k)
                }
            }
        };
        let spec = quad.with_breakpoints(self.half_breakpoints());
        let freq = T::from_int(key.frequency());
        let res = integrate(integrand, T::zero(), T::pi(), &spec, freq)?;
        Ok(res.value / T::two_pi())
    }

    /// Correlation matrix restricted to `sites`, in the given order.
    pub fn build_restricted_matrix(
        &self,
        sites: &[i64],
        mode: BuildMode,
        quad: &QuadratureSpec<T>,
    ) -> Result<CorrelationMatrix<T>> {
        let n = sites.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty site set".into()));
        }
        for &s in sites {
            self.side(s)?;
        }
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a..n).map(move |b| (a, b))).collect();
        let values: Vec<Complex<T>> = match mode {
            BuildMode::Exact => {
                // exact entries split into the long-range part plus a remainder
                // that depends on the complementary site combination
                let long = self.cached(&pairs, sites, quad, Self::longrange_key, Self::longrange_value)?;
                let rest = self.cached(&pairs, sites, quad, Self::remainder_key, Self::remainder_value)?;
                long.into_iter().zip(rest).map(|(a, b)| a + b).collect()
            }
            BuildMode::LongRange => self.cached(&pairs, sites, quad, Self::longrange_key, Self::longrange_value)?,
        };
        let mut entries = DMatrix::zeros(n, n);
        for (&(a, b), v) in pairs.iter().zip(values) {
            if a == b {
                entries[(a, a)] = re(v.re);
            } else {
                entries[(a, b)] = v;
                entries[(b, a)] = v.conj();
            }
        }
        Ok(CorrelationMatrix {
            sites: sites.to_vec(),
            entries,
            mode,
        })
    }

    /// Evaluates `value` once per distinct key over the site pairs.
    fn cached(
        &self,
        pairs: &[(usize, usize)],
        sites: &[i64],
        quad: &QuadratureSpec<T>,
        key_of: fn(&Self, i64, i64) -> Result<LongRangeKey>,
        value: fn(&Self, LongRangeKey, &QuadratureSpec<T>) -> Result<Complex<T>>,
    ) -> Result<Vec<Complex<T>>> {
        let keys: Vec<LongRangeKey> = pairs
            .iter()
            .map(|&(a, b)| key_of(self, sites[a], sites[b]))
            .collect::<Result<_>>()?;
        let unique: Vec<LongRangeKey> = keys.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
        let computed: Vec<Complex<T>> = unique
            .par_iter()
            .map(|&key| value(self, key, quad))
            .collect::<Result<_>>()?;
        let cache: HashMap<LongRangeKey, Complex<T>> = unique.into_iter().zip(computed).collect();
        Ok(keys.iter().map(|k| cache[k]).collect())
    }

    /// Key of the part of an exact entry that vanishes at long range: `j + m`
    /// on one side, `j − m` across the impurity.
    fn remainder_key(&self, j: i64, m: i64) -> Result<LongRangeKey> {
        Ok(match (self.side(j)?, self.side(m)?) {
            (Side::Right, Side::Right) => LongRangeKey::RightRight(j + m),
            (Side::Left, Side::Left) => LongRangeKey::LeftLeft(j + m),
            (Side::Right, Side::Left) => LongRangeKey::RightLeft(j - m),
            (Side::Left, Side::Right) => LongRangeKey::LeftRight(j - m),
        })
    }

    fn remainder_value(&self, key: LongRangeKey, quad: &QuadratureSpec<T>) -> Result<Complex<T>> {
        let two = T::lit(2.0);
        let integrand = |k: T| -> Complex<T> {
            let amp = self.model.amplitudes(k);
            let (fl, fr) = self.occupations(k);
            match key {
                LongRangeKey::RightRight(h) => re((amp.r_right * T::cis(T::from_int(h) * k)).re * two * fr),
                LongRangeKey::LeftLeft(h) => re((amp.r_left * T::cis(-T::from_int(h) * k)).re * two * fl),
                LongRangeKey::LeftRight(o) => {
                    let ph = T::cis(T::from_int(o) * k);
                    amp.t_left * ph.conj() * fl + amp.t_right.conj() * ph * fr
                }
                LongRangeKey::RightLeft(o) => {
                    let ph = T::cis(T::from_int(o) * k);
                    amp.t_left.conj() * ph.conj() * fl + amp.t_right * ph * fr
                }
            }
        };
        let spec = quad.with_breakpoints(self.half_breakpoints());
        let res = integrate(integrand, T::zero(), T::pi(), &spec, T::from_int(key.frequency()))?;
        Ok(res.value / T::two_pi())
    }

    /// Matrix on `A_L ∪ A_R`, left sites first.
    pub fn build_subsystems(&self, geom: &SubsystemPair, mode: BuildMode, quad: &QuadratureSpec<T>) -> Result<CorrelationMatrix<T>> {
        self.check_geometry(geom)?;
        self.build_restricted_matrix(&geom.sites_union(), mode, quad)
    }

    /// Matrix on the mirror pairs, ordered by distance with `(left, right)` in each pair.
    pub fn build_mirror(&self, geom: &SubsystemPair, mode: BuildMode, quad: &QuadratureSpec<T>) -> Result<CorrelationMatrix<T>> {
        self.check_geometry(geom)?;
        let sites = geom.mirror_pair_sites();
        if sites.is_empty() {
            return Err(Error::DimensionMismatch("subsystems have no mirror overlap".into()));
        }
        self.build_restricted_matrix(&sites, mode, quad)
    }

    fn check_geometry(&self, geom: &SubsystemPair) -> Result<()> {
        if geom.impurity_halfwidth != self.params.impurity_halfwidth {
            return Err(Error::DimensionMismatch(format!(
                "geometry built for impurity half-width {}, lattice has {}",
                geom.impurity_halfwidth, self.params.impurity_halfwidth
            )));
        }
        Ok(())
    }

    /// `Φ(k)` on `0 < |k| < π`.
    pub fn block_symbol_phi(&self, k: T) -> Result<Matrix2<Complex<T>>> {
        if k == T::zero() {
            return Err(Error::UndefinedSide);
        }
        Ok(phi_at(self, k))
    }

    /// `Φ_γ(k) = diag(1 − e^{2πiγ/n}, 1 + e^{−2πiγ/n}) Φ(k)`.
    pub fn block_symbol_phi_gamma(&self, k: T, gamma: T, n: u32) -> Result<Matrix2<Complex<T>>> {
        let (a, b) = gamma_prefactors(gamma, n)?;
        let phi = self.block_symbol_phi(k)?;
        Ok(scale_rows(&phi, a, b))
    }

    /// `Φ` as a reusable symbol.
    pub fn symbol(&self) -> BlockSymbol<T> {
        let state = self.clone();
        BlockSymbol::from_fn(move |k| phi_at(&state, k), self.full_breakpoints())
    }
}

fn wavefunction_from<T: Real>(amp: &Amplitudes<T>, side: Side, m: i64, k: T) -> Complex<T> {
    let mt = T::from_int(m);
    let plane = T::cis(k * mt);
    match (k > T::zero(), side) {
        (true, Side::Left) => plane + amp.r_left * plane.conj(),
        (true, Side::Right) => amp.t_left * plane,
        (false, Side::Left) => amp.t_right * plane,
        (false, Side::Right) => plane + amp.r_right * plane.conj(),
    }
}

fn phi_at<T: Real>(state: &SteadyState<T>, k: T) -> Matrix2<Complex<T>> {
    let (fl, fr) = state.occupations(k);
    let zero = re(T::zero());
    if k < T::zero() {
        // f̃(k) = f_R, f̃(-k) = f_L
        return Matrix2::new(re(fl), zero, zero, re(fr));
    }
    let amp = state.model.amplitudes(k);
    let tt = amp.transmission();
    let rr = amp.reflection();
    let p12 = amp.t_left * amp.r_left.conj() * fl + amp.t_right.conj() * amp.r_right * fr;
    Matrix2::new(re(fr * tt + fl * rr), p12, p12.conj(), re(fl * tt + fr * rr))
}

/// Row factors `(1 − e^{2πiγ/n}, 1 + e^{−2πiγ/n})`.
pub fn gamma_prefactors<T: Real>(gamma: T, n: u32) -> Result<(Complex<T>, Complex<T>)> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("replica index must be a positive even integer, got {n}")));
    }
    let twice = (gamma + gamma).as_f64();
    let odd = twice.fract() == 0.0 && (twice as i64) % 2 != 0;
    if !odd || twice.abs() > f64::from(n - 1) {
        return Err(Error::InvalidParameter(format!(
            "γ must be a half-integer in [-(n-1)/2, (n-1)/2], got {gamma}"
        )));
    }
    let nt = T::from_u32(n).unwrap();
    let e = T::cis(T::two_pi() * gamma / nt);
    let one = re(T::one());
    Ok((one - e, one + e.conj()))
}

fn scale_rows<T: Real>(m: &Matrix2<Complex<T>>, a: Complex<T>, b: Complex<T>) -> Matrix2<Complex<T>> {
    Matrix2::new(m[(0, 0)] * a, m[(0, 1)] * a, m[(1, 0)] * b, m[(1, 1)] * b)
}

type SymbolFn<T> = dyn Fn(T) -> Matrix2<Complex<T>> + Send + Sync;

/// A 2×2 matrix-valued function on `[-π, π]` with known discontinuities.
#[derive(Clone)]
pub struct BlockSymbol<T: Real> {
    eval: Arc<SymbolFn<T>>,
    breakpoints: Vec<T>,
}

impl<T: Real> std::fmt::Debug for BlockSymbol<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BlockSymbol").field("breakpoints", &self.breakpoints).finish()
    }
}

impl<T: Real> BlockSymbol<T> {
    pub fn from_fn(f: impl Fn(T) -> Matrix2<Complex<T>> + Send + Sync + 'static, breakpoints: Vec<T>) -> Self {
        Self {
            eval: Arc::new(f),
            breakpoints,
        }
    }

    pub fn identity() -> Self {
        Self::from_fn(|_| Matrix2::identity(), Vec::new())
    }

    pub fn eval(&self, k: T) -> Matrix2<Complex<T>> {
        (self.eval)(k)
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Pointwise combination of two symbols.
    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(Matrix2<Complex<T>>, Matrix2<Complex<T>>) -> Matrix2<Complex<T>> + Send + Sync + 'static,
    ) -> Self {
        let a = self.eval.clone();
        let b = other.eval.clone();
        let mut bp = self.breakpoints.clone();
        bp.extend(other.breakpoints.iter().copied());
        Self::from_fn(move |k| f(a(k), b(k)), bp)
    }

    /// Pointwise transformation.
    pub fn map(&self, f: impl Fn(Matrix2<Complex<T>>) -> Matrix2<Complex<T>> + Send + Sync + 'static) -> Self {
        let a = self.eval.clone();
        Self::from_fn(move |k| f(a(k)), self.breakpoints.clone())
    }

    /// `I − Φ`
    pub fn complement(&self) -> Self {
        self.map(|m| Matrix2::identity() - m)
    }

    /// Diagonal part, `Φ_×`.
    pub fn diagonal_part(&self) -> Self {
        self.map(|m| Matrix2::new(m[(0, 0)], re(T::zero()), re(T::zero()), m[(1, 1)]))
    }

    /// `diag(1 − e^{2πiγ/n}, 1 + e^{−2πiγ/n}) Φ`
    pub fn gamma_twisted(&self, gamma: T, n: u32) -> Result<Self> {
        let (a, b) = gamma_prefactors(gamma, n)?;
        Ok(self.map(move |m| scale_rows(&m, a, b)))
    }

    /// Pointwise product `self · other`.
    pub fn product(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    /// Fourier block `∫ dk/2π Φ(k) e^{−i·offset·k}` over `[-π, π]`.
    pub fn fourier_block(&self, offset: i64, quad: &QuadratureSpec<T>) -> Result<Matrix2<Complex<T>>> {
        let spec = quad.with_breakpoints(self.breakpoints.iter().copied().chain([T::zero()]));
        let o = T::from_int(offset);
        let f = |k: T| self.eval(k) * T::cis(-o * k);
        let res = integrate(f, -T::pi(), T::pi(), &spec, T::from_int(offset.abs()))?;
        Ok(res.value / re(T::two_pi()))
    }

    /// `2ℓ × 2ℓ` block-Toeplitz matrix with block `(a, b)` given by the
    /// Fourier block at offset `a − b`.
    pub fn toeplitz(&self, ell: usize, quad: &QuadratureSpec<T>) -> Result<DMatrix<Complex<T>>> {
        if ell == 0 {
            return Err(Error::DimensionMismatch("block-Toeplitz size must be positive".into()));
        }
        let l = ell as i64;
        let offsets: Vec<i64> = (-(l - 1)..l).collect();
        let blocks: Vec<Matrix2<Complex<T>>> = offsets
            .par_iter()
            .map(|&o| self.fourier_block(o, quad))
            .collect::<Result<_>>()?;
        let mut out = DMatrix::zeros(2 * ell, 2 * ell);
        for a in 0..ell {
            for b in 0..ell {
                let blk = &blocks[(a as i64 - b as i64 + l - 1) as usize];
                out.fixed_view_mut::<2, 2>(2 * a, 2 * b).copy_from(blk);
            }
        }
        Ok(out)
    }
}

/// Hermitian correlation matrix on an ordered site list.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix<T: Real> {
    pub sites: Vec<i64>,
    pub entries: DMatrix<Complex<T>>,
    pub mode: BuildMode,
}

impl<T: Real> CorrelationMatrix<T> {
    pub fn dim(&self) -> usize {
        self.sites.len()
    }

    /// Submatrix on `subset`, preserving the order given.
    pub fn restrict(&self, subset: &[i64]) -> Result<Self> {
        let idx: Vec<usize> = subset
            .iter()
            .map(|s| {
                self.sites
                    .iter()
                    .position(|x| x == s)
                    .ok_or_else(|| Error::DimensionMismatch(format!("site {s} not in matrix")))
            })
            .collect::<Result<_>>()?;
        let n = idx.len();
        let entries = DMatrix::from_fn(n, n, |a, b| self.entries[(idx[a], idx[b])]);
        Ok(Self {
            sites: subset.to_vec(),
            entries,
            mode: self.mode,
        })
    }

    /// `max |C − C†|`
    pub fn hermiticity_defect(&self) -> T {
        let d = &self.entries - self.entries.adjoint();
        d.iter().map(|z| crate::scalar::cabs(*z)).fold(T::zero(), |a, b| a.max(b))
    }

    /// Ascending eigenvalues.
    pub fn spectrum(&self) -> Result<DVector<T>> {
        hermitian_spectrum(&self.entries)
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_spectrum<T: Real>(m: &DMatrix<Complex<T>>) -> Result<DVector<T>> {
    let eig = nalgebra::linalg::SymmetricEigen::try_new(m.clone(), T::default_epsilon(), 0)
        .ok_or_else(|| Error::Eigensolver("Hermitian eigensolver did not converge".into()))?;
    let mut v: Vec<T> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(DVector::from_vec(v))
}
