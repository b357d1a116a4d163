//! Lattice dispersion, reservoir occupations, impurity scattering models and
//! subsystem geometry.

use crate::error::{Error, Result};
use crate::scalar::{cabs, Real};
use nalgebra::{Complex, Matrix2};
use std::fmt;
use std::io::Read;
use std::sync::Arc;

/// Hopping amplitude and impurity half-width; sites `-m0..=m0` form the impurity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeParams<T> {
    pub hopping: T,
    pub impurity_halfwidth: i64,
}

impl<T: Real> LatticeParams<T> {
    pub fn new(hopping: T, impurity_halfwidth: i64) -> Result<Self> {
        if !(hopping > T::zero()) {
            return Err(Error::InvalidParameter(format!("hopping must be positive, got {hopping}")));
        }
        if impurity_halfwidth < 0 {
            return Err(Error::InvalidParameter(format!(
                "impurity half-width must be non-negative, got {impurity_halfwidth}"
            )));
        }
        Ok(Self {
            hopping,
            impurity_halfwidth,
        })
    }
}

impl<T: Real> Default for LatticeParams<T> {
    fn default() -> Self {
        Self {
            hopping: T::one(),
            impurity_halfwidth: 0,
        }
    }
}

/// Chemical potentials and temperatures of the two edge reservoirs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReservoirPair<T> {
    pub mu_left: T,
    pub temp_left: T,
    pub mu_right: T,
    pub temp_right: T,
}

impl<T: Real> ReservoirPair<T> {
    pub fn new(mu_left: T, temp_left: T, mu_right: T, temp_right: T) -> Result<Self> {
        if temp_left < T::zero() || temp_right < T::zero() {
            return Err(Error::InvalidParameter(format!(
                "temperatures must be non-negative, got T_L = {temp_left}, T_R = {temp_right}"
            )));
        }
        Ok(Self {
            mu_left,
            temp_left,
            mu_right,
            temp_right,
        })
    }

    /// Both reservoirs share one chemical potential and temperature.
    pub fn equilibrium(mu: T, temp: T) -> Result<Self> {
        Self::new(mu, temp, mu, temp)
    }

    pub fn is_unbiased(&self) -> bool {
        self.mu_left == self.mu_right && self.temp_left == self.temp_right
    }

    /// `f_L(ε(k))`
    pub fn f_left(&self, k: T, params: &LatticeParams<T>) -> T {
        fermi_dirac(dispersion(k, params), self.mu_left, self.temp_left)
    }

    /// `f_R(ε(k))`
    pub fn f_right(&self, k: T, params: &LatticeParams<T>) -> T {
        fermi_dirac(dispersion(k, params), self.mu_right, self.temp_right)
    }

    /// `1 − f_L(ε(k))` without cancellation.
    pub fn hole_left(&self, k: T, params: &LatticeParams<T>) -> T {
        fermi_dirac_hole(dispersion(k, params), self.mu_left, self.temp_left)
    }

    /// `1 − f_R(ε(k))` without cancellation.
    pub fn hole_right(&self, k: T, params: &LatticeParams<T>) -> T {
        fermi_dirac_hole(dispersion(k, params), self.mu_right, self.temp_right)
    }

    /// Fermi momenta in `(0, π)` of zero-temperature reservoirs whose
    /// chemical potential lies inside the band. These are the only
    /// discontinuities of the occupation functions.
    pub fn fermi_breakpoints(&self, params: &LatticeParams<T>) -> Vec<T> {
        let mut out = Vec::new();
        for (mu, temp) in [(self.mu_left, self.temp_left), (self.mu_right, self.temp_right)] {
            if temp == T::zero() {
                if let Ok(kf) = fermi_momentum(mu, params) {
                    out.push(kf);
                }
            }
        }
        out
    }

    /// Breakpoints on `[-π, π]`: `0` and `±k_F` for each zero-temperature side.
    pub fn symmetric_breakpoints(&self, params: &LatticeParams<T>) -> Vec<T> {
        let mut out = vec![T::zero()];
        for kf in self.fermi_breakpoints(params) {
            out.push(kf);
            out.push(-kf);
        }
        out
    }
}

/// `ε(k) = -2η cos k`
pub fn dispersion<T: Real>(k: T, params: &LatticeParams<T>) -> T {
    -(params.hopping + params.hopping) * k.cos()
}

/// Fermi–Dirac occupation; at zero temperature a step with value 1/2 at `ε = μ`.
pub fn fermi_dirac<T: Real>(energy: T, mu: T, temp: T) -> T {
    if temp == T::zero() {
        return if energy < mu {
            T::one()
        } else if energy > mu {
            T::zero()
        } else {
            T::lit(0.5)
        };
    }
    let x = (energy - mu) / temp;
    // 1/(e^x + 1) evaluated without overflow on either tail
    if x > T::zero() {
        let e = (-x).exp();
        e / (T::one() + e)
    } else {
        T::one() / ((x).exp() + T::one())
    }
}

/// `1 − f(ε)`, evaluated as the occupation at the reflected energy `2μ − ε`.
pub fn fermi_dirac_hole<T: Real>(energy: T, mu: T, temp: T) -> T {
    fermi_dirac(mu + mu - energy, mu, temp)
}

/// Occupation `f̃(k)` of the scattering state `|k⟩`: right reservoir for
/// `k < 0`, left reservoir for `k > 0`.
pub fn occupation_tilde<T: Real>(k: T, res: &ReservoirPair<T>, params: &LatticeParams<T>) -> Result<T> {
    if k > T::zero() {
        Ok(res.f_left(k, params))
    } else if k < T::zero() {
        Ok(res.f_right(k, params))
    } else {
        Err(Error::UndefinedSide)
    }
}

/// Momentum `k_F ∈ (0, π)` with `ε(k_F) = μ`.
pub fn fermi_momentum<T: Real>(mu: T, params: &LatticeParams<T>) -> Result<T> {
    let band = params.hopping + params.hopping;
    if !(mu.abs() < band) {
        return Err(Error::OutOfBand {
            mu: mu.as_f64(),
            hopping: params.hopping.as_f64(),
        });
    }
    Ok((-mu / band).acos())
}

/// Reflection and transmission amplitudes at one momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes<T> {
    pub r_left: Complex<T>,
    pub t_left: Complex<T>,
    pub r_right: Complex<T>,
    pub t_right: Complex<T>,
}

impl<T: Real> Amplitudes<T> {
    /// `T(k) = |t_L|²`
    pub fn transmission(&self) -> T {
        self.t_left.norm_sqr()
    }

    /// `R(k) = |r_L|²`
    pub fn reflection(&self) -> T {
        self.r_left.norm_sqr()
    }

    /// `t_L r_L*`, the combination carried by the cross-side correlations.
    pub fn coherence(&self) -> Complex<T> {
        self.t_left * self.r_left.conj()
    }

    fn as_matrix(&self) -> Matrix2<Complex<T>> {
        Matrix2::new(self.r_left, self.t_right, self.t_left, self.r_right)
    }

    fn from_matrix(s: &Matrix2<Complex<T>>) -> Self {
        Self {
            r_left: s[(0, 0)],
            t_right: s[(0, 1)],
            t_left: s[(1, 0)],
            r_right: s[(1, 1)],
        }
    }

    /// Largest violation among the unitarity relations.
    pub fn unitarity_defect(&self) -> T {
        let one = T::one();
        let d1 = (self.r_left.norm_sqr() + self.t_left.norm_sqr() - one).abs();
        let d2 = (self.r_right.norm_sqr() + self.t_right.norm_sqr() - one).abs();
        let d3 = (cabs(self.r_left) - cabs(self.r_right)).abs();
        let d4 = (cabs(self.t_left) - cabs(self.t_right)).abs();
        let d5 = cabs(self.t_right.conj() * self.r_right + self.t_left * self.r_left.conj());
        d1.max(d2).max(d3).max(d4).max(d5)
    }
}

/// A charge-conserving impurity, described by its scattering matrix on `(0, π)`.
pub trait Scatterer<T: Real>: Send + Sync {
    /// Amplitudes at `k ∈ (0, π)`.
    fn amplitudes(&self, k: T) -> Amplitudes<T>;

    /// Momenta in `(0, π)` where the amplitudes are not smooth.
    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }

    fn describe(&self) -> String;
}

/// Validated scattering model shared between threads.
#[derive(Clone)]
pub struct ScatteringModel<T: Real> {
    inner: Arc<dyn Scatterer<T>>,
}

impl<T: Real> fmt::Debug for ScatteringModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ScatteringModel({})", self.inner.describe())
    }
}

/// Number of uniformly spaced momenta checked at construction.
pub const VALIDATION_SAMPLES: usize = 1000;

impl<T: Real> ScatteringModel<T> {
    /// Wraps a scatterer after checking unitarity on a uniform grid.
    pub fn new(scatterer: impl Scatterer<T> + 'static) -> Result<Self> {
        let model = Self {
            inner: Arc::new(scatterer),
        };
        model.validate(VALIDATION_SAMPLES)?;
        Ok(model)
    }

    /// Unitarity tolerance: 1e-12 in double precision, a few ulps otherwise.
    pub fn tolerance() -> T {
        T::lit(1e-12).max(T::default_epsilon() * T::lit(64.0))
    }

    pub fn validate(&self, samples: usize) -> Result<()> {
        let tol = Self::tolerance();
        let pi = T::pi();
        for i in 0..samples {
            let k = pi * (T::from_usize(i).unwrap() + T::lit(0.5)) / T::from_usize(samples).unwrap();
            let amp = self.inner.amplitudes(k);
            let defect = amp.unitarity_defect();
            if !(defect <= tol) {
                return Err(Error::ScatteringInvariant {
                    k: k.as_f64(),
                    detail: format!("unitarity defect {:e} exceeds {:e}", defect.as_f64(), tol.as_f64()),
                });
            }
        }
        Ok(())
    }

    /// Amplitudes at `|k|`.
    pub fn amplitudes(&self, k: T) -> Amplitudes<T> {
        self.inner.amplitudes(k.abs())
    }

    pub fn transmission(&self, k: T) -> T {
        self.amplitudes(k).transmission()
    }

    pub fn reflection(&self, k: T) -> T {
        self.amplitudes(k).reflection()
    }

    pub fn breakpoints(&self) -> Vec<T> {
        self.inner.breakpoints()
    }

    pub fn describe(&self) -> String {
        self.inner.describe()
    }

    /// Single-site impurity with on-site energy `ε₀`.
    pub fn resonant_level(eps0: T, params: &LatticeParams<T>) -> Result<Self> {
        Self::new(ResonantLevel {
            eps0,
            hopping: params.hopping,
        })
    }

    /// Constant transmission probability with the resonant-level phase gauge.
    pub fn constant_transmission(transmission: T) -> Result<Self> {
        if transmission < T::zero() || transmission > T::one() {
            return Err(Error::InvalidParameter(format!(
                "transmission probability must lie in [0, 1], got {transmission}"
            )));
        }
        Self::new(ConstantTransmission { transmission })
    }
}

/// Resonant level: `t = sin k / (sin k + i ε₀/2η)`, `r = t - 1`.
#[derive(Debug, Clone, Copy)]
pub struct ResonantLevel<T> {
    pub eps0: T,
    pub hopping: T,
}

impl<T: Real> Scatterer<T> for ResonantLevel<T> {
    fn amplitudes(&self, k: T) -> Amplitudes<T> {
        let s = k.sin();
        let a = self.eps0 / (self.hopping + self.hopping);
        // t = s (s - i a) / (s² + a²)
        let den = s * s + a * a;
        let t = if den > T::zero() {
            Complex::new(s * s / den, -s * a / den)
        } else {
            Complex::new(T::one(), T::zero())
        };
        let r = t - Complex::new(T::one(), T::zero());
        Amplitudes {
            r_left: r,
            t_left: t,
            r_right: r,
            t_right: t,
        }
    }

    fn describe(&self) -> String {
        format!("resonant level, eps0 = {}", self.eps0)
    }
}

/// Energy-independent transmission `T`, with `t = √T · e^{iθ}` chosen so
/// that `r = t − 1` has modulus `√(1 − T)`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantTransmission<T> {
    pub transmission: T,
}

impl<T: Real> Scatterer<T> for ConstantTransmission<T> {
    fn amplitudes(&self, _k: T) -> Amplitudes<T> {
        // |t|² = T and |t - 1|² = 1 - T  ⇒  Re t = T, Im t = -√(T(1 - T))
        let tr = self.transmission;
        let t = Complex::new(tr, -(tr * (T::one() - tr)).max(T::zero()).sqrt());
        let r = t - Complex::new(T::one(), T::zero());
        Amplitudes {
            r_left: r,
            t_left: t,
            r_right: r,
            t_right: t,
        }
    }

    fn describe(&self) -> String {
        format!("constant transmission {}", self.transmission)
    }
}

/// Scattering matrix tabulated on a momentum grid, linearly interpolated and
/// projected back onto the unitary group.
#[derive(Debug, Clone)]
pub struct TabulatedScatterer<T> {
    momenta: Vec<T>,
    table: Vec<Amplitudes<T>>,
}

impl<T: Real> TabulatedScatterer<T> {
    pub fn new(momenta: Vec<T>, table: Vec<Amplitudes<T>>) -> Result<Self> {
        if momenta.len() != table.len() || momenta.len() < 2 {
            return Err(Error::InvalidParameter(
                "tabulated scattering matrix needs at least two rows".into(),
            ));
        }
        if momenta.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("tabulated momenta must be strictly increasing".into()));
        }
        let tol = T::lit(1e-8).max(T::default_epsilon() * T::lit(64.0));
        for (k, amp) in momenta.iter().zip(&table) {
            if !(*k > T::zero() && *k < T::pi()) {
                return Err(Error::InvalidParameter(format!("tabulated momentum {k} outside (0, π)")));
            }
            let d = amp.unitarity_defect();
            if !(d <= tol) {
                return Err(Error::ScatteringInvariant {
                    k: k.as_f64(),
                    detail: format!("tabulated row not unitary (defect {:e})", d.as_f64()),
                });
            }
        }
        Ok(Self { momenta, table })
    }

    /// Reads rows `k, Re t_L, Im t_L, Re r_L, Im r_L, Re t_R, Im t_R, Re r_R, Im r_R`.
    /// A header row is skipped when its first field is not numeric.
    pub fn from_csv(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_reader(reader);
        let mut momenta = Vec::new();
        let mut table = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let fields: Vec<&str> = rec.iter().collect();
            if line == 0 && fields.first().map_or(false, |f| f.parse::<f64>().is_err()) {
                continue;
            }
            if fields.len() != 9 {
                return Err(Error::Config(format!(
                    "scattering table row {} has {} columns, expected 9",
                    line + 1,
                    fields.len()
                )));
            }
            let v: Vec<f64> = fields
                .iter()
                .map(|f| f.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Config(format!("scattering table row {}: {e}", line + 1)))?;
            let c = |re: f64, im: f64| Complex::new(T::lit(re), T::lit(im));
            momenta.push(T::lit(v[0]));
            table.push(Amplitudes {
                t_left: c(v[1], v[2]),
                r_left: c(v[3], v[4]),
                t_right: c(v[5], v[6]),
                r_right: c(v[7], v[8]),
            });
        }
        Self::new(momenta, table)
    }
}

/// Nearest unitary matrix, `S (S†S)^{-1/2}`.
fn unitary_projection<T: Real>(s: &Matrix2<Complex<T>>) -> Matrix2<Complex<T>> {
    let gram = s.adjoint() * s;
    let eig = gram.symmetric_eigen();
    let inv_sqrt = Matrix2::from_diagonal(&eig.eigenvalues.map(|l| {
        let l = l.max(T::default_epsilon());
        Complex::new(T::one() / l.sqrt(), T::zero())
    }));
    s * (eig.eigenvectors * inv_sqrt * eig.eigenvectors.adjoint())
}

impl<T: Real> Scatterer<T> for TabulatedScatterer<T> {
    fn amplitudes(&self, k: T) -> Amplitudes<T> {
        let n = self.momenta.len();
        if k <= self.momenta[0] {
            return self.table[0];
        }
        if k >= self.momenta[n - 1] {
            return self.table[n - 1];
        }
        let hi = self.momenta.partition_point(|&x| x <= k).min(n - 1);
        let lo = hi - 1;
        let w = (k - self.momenta[lo]) / (self.momenta[hi] - self.momenta[lo]);
        let a = self.table[lo].as_matrix();
        let b = self.table[hi].as_matrix();
        let wc = Complex::new(w, T::zero());
        let mixed = a * (Complex::new(T::one(), T::zero()) - wc) + b * wc;
        Amplitudes::from_matrix(&unitary_projection(&mixed))
    }

    fn breakpoints(&self) -> Vec<T> {
        self.momenta.clone()
    }

    fn describe(&self) -> String {
        format!("tabulated scattering matrix ({} rows)", self.momenta.len())
    }
}

/// Two intervals on opposite sides of the impurity.
///
/// `A_L` spans `-m0 - d_L - ℓ_L ..= -m0 - d_L - 1` and `A_R` spans
/// `m0 + d_R + 1 ..= m0 + d_R + ℓ_R`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubsystemPair {
    pub d_left: i64,
    pub ell_left: i64,
    pub d_right: i64,
    pub ell_right: i64,
    pub impurity_halfwidth: i64,
}

impl SubsystemPair {
    pub fn new(d_left: i64, ell_left: i64, d_right: i64, ell_right: i64, impurity_halfwidth: i64) -> Result<Self> {
        if d_left < 0 || d_right < 0 || impurity_halfwidth < 0 {
            return Err(Error::InvalidParameter("distances and impurity half-width must be non-negative".into()));
        }
        if ell_left < 1 || ell_right < 1 {
            return Err(Error::InvalidParameter("interval lengths must be at least 1".into()));
        }
        Ok(Self {
            d_left,
            ell_left,
            d_right,
            ell_right,
            impurity_halfwidth,
        })
    }

    /// Geometry with a prescribed `d_L - d_R`, the nearer interval placed
    /// `d_min` sites from the impurity.
    pub fn with_offset(delta_d: i64, d_min: i64, ell_left: i64, ell_right: i64, m0: i64) -> Result<Self> {
        let (d_left, d_right) = if delta_d >= 0 {
            (d_min + delta_d, d_min)
        } else {
            (d_min, d_min - delta_d)
        };
        Self::new(d_left, ell_left, d_right, ell_right, m0)
    }

    pub fn delta_d(&self) -> i64 {
        self.d_left - self.d_right
    }

    /// `A_L` in ascending order.
    pub fn sites_left(&self) -> Vec<i64> {
        let hi = -self.impurity_halfwidth - self.d_left - 1;
        (hi - self.ell_left + 1..=hi).collect()
    }

    /// `A_R` in ascending order.
    pub fn sites_right(&self) -> Vec<i64> {
        let lo = self.impurity_halfwidth + self.d_right + 1;
        (lo..lo + self.ell_right).collect()
    }

    /// `A_L` followed by `A_R`.
    pub fn sites_union(&self) -> Vec<i64> {
        let mut s = self.sites_left();
        s.extend(self.sites_right());
        s
    }

    pub fn mirror_overlap_length(&self) -> i64 {
        mirror_overlap_length(self)
    }

    /// Positive sites `m ∈ A_R` whose mirror image `-m` lies in `A_L`,
    /// ordered by distance from the impurity.
    pub fn mirror_sites(&self) -> Vec<i64> {
        let m0 = self.impurity_halfwidth;
        let lo = m0 + self.d_left.max(self.d_right) + 1;
        let hi = m0 + (self.d_left + self.ell_left).min(self.d_right + self.ell_right);
        (lo..=hi).collect()
    }

    /// Interleaved mirror pairs `(-m, m)` ordered by distance from the impurity.
    pub fn mirror_pair_sites(&self) -> Vec<i64> {
        self.mirror_sites().into_iter().flat_map(|m| [-m, m]).collect()
    }

    /// `Δℓ_L = ℓ_L - ℓ_mirror`
    pub fn delta_ell_left(&self) -> i64 {
        self.ell_left - self.mirror_overlap_length()
    }

    /// `Δℓ_R = ℓ_R - ℓ_mirror`
    pub fn delta_ell_right(&self) -> i64 {
        self.ell_right - self.mirror_overlap_length()
    }

    /// Moves both intervals `s` sites further from the impurity.
    pub fn shifted(&self, s: i64) -> Result<Self> {
        Self::new(self.d_left + s, self.ell_left, self.d_right + s, self.ell_right, self.impurity_halfwidth)
    }

    /// Left/right relabeling: the reflected geometry.
    pub fn mirrored(&self) -> Self {
        Self {
            d_left: self.d_right,
            ell_left: self.ell_right,
            d_right: self.d_left,
            ell_right: self.ell_left,
            impurity_halfwidth: self.impurity_halfwidth,
        }
    }
}

/// `ℓ_mirror = max{min{d_L + ℓ_L, d_R + ℓ_R} - max{d_L, d_R}, 0}`
pub fn mirror_overlap_length(geom: &SubsystemPair) -> i64 {
    ((geom.d_left + geom.ell_left).min(geom.d_right + geom.ell_right) - geom.d_left.max(geom.d_right)).max(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn p() -> LatticeParams<f64> {
        LatticeParams::default()
    }

    #[test]
    fn dispersion_values() {
        assert!(dispersion(PI / 2.0, &p()).abs() < 1e-15);
        assert_eq!(dispersion(0.0, &p()), -2.0);
        assert!((dispersion(PI, &p()) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn fermi_dirac_values() {
        assert_eq!(fermi_dirac(0.3, 0.3, 0.5), 0.5);
        let t = 0.7;
        let v = fermi_dirac(-10.0 * t, 0.0, t);
        assert!((v - 1.0 / ((-10.0f64).exp() + 1.0)).abs() < 1e-15);
        assert!((v - 0.9999546).abs() < 1e-7);
        assert_eq!(fermi_dirac(1.0, 0.0, 0.0), 0.0);
        assert_eq!(fermi_dirac(-1.0, 0.0, 0.0), 1.0);
        assert_eq!(fermi_dirac(0.0, 0.0, 0.0), 0.5);
        assert_eq!(fermi_dirac(1e6, 0.0, 1.0), 0.0);
        assert_eq!(fermi_dirac(-1e6, 0.0, 1.0), 1.0);
        assert!((fermi_dirac_hole(-3.0, 0.5, 0.05) - 1.0 / ((70.0f64).exp() + 1.0)).abs() < 1e-40);
        assert!(fermi_dirac_hole(-3.0, 0.5, 0.05) > 0.0);
        assert_eq!(fermi_dirac_hole(0.0, 0.0, 0.0), 0.5);
        assert_eq!(fermi_dirac_hole(1.0, 0.0, 0.0), 1.0);
    }

    #[test]
    fn occupation_tilde_sides() {
        let res = ReservoirPair::new(0.0, 1.0, 0.3, 0.0).unwrap();
        assert!((occupation_tilde(PI / 2.0, &res, &p()).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(occupation_tilde(-PI / 2.0, &res, &p()).unwrap(), 1.0);
        assert_eq!(occupation_tilde(0.0, &res, &p()), Err(Error::UndefinedSide));
    }

    #[test]
    fn negative_temperature_rejected() {
        assert!(ReservoirPair::new(0.0, -1.0, 0.0, 1.0).is_err());
        assert!(LatticeParams::new(0.0, 0).is_err());
        assert!(LatticeParams::new(1.0, -1).is_err());
    }

    #[test]
    fn resonant_level_transmission() {
        let m = ScatteringModel::resonant_level(0.0, &p()).unwrap();
        for k in [0.1, 1.0, 2.0, 3.0] {
            assert!((m.transmission(k) - 1.0).abs() < 1e-15);
        }
        let m = ScatteringModel::resonant_level(2.0, &p()).unwrap();
        assert!((m.transmission(PI / 2.0) - 0.5).abs() < 1e-15);
        let m = ScatteringModel::resonant_level(1.0, &p()).unwrap();
        assert!((m.transmission(PI / 2.0) - 0.8).abs() < 1e-15);
        // closed form at a generic momentum
        let k: f64 = 0.77;
        let expected = k.sin().powi(2) / (k.sin().powi(2) + 0.25);
        assert!((m.transmission(k) - expected).abs() < 1e-15);
    }

    #[test]
    fn fermi_momentum_values() {
        assert!((fermi_momentum(0.0, &p()).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((fermi_momentum(2f64.sqrt(), &p()).unwrap() - 3.0 * PI / 4.0).abs() < 1e-12);
        assert!(fermi_momentum(-2.0 + 1e-10, &p()).unwrap() < 1e-4);
        assert!(matches!(fermi_momentum(2.0, &p()), Err(Error::OutOfBand { .. })));
        assert!(matches!(fermi_momentum(-3.0, &p()), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn mirror_overlap_examples() {
        let g = SubsystemPair::new(5, 100, 5, 200, 0).unwrap();
        assert_eq!(g.mirror_overlap_length(), 100);
        let g = SubsystemPair::new(0, 10, 20, 10, 0).unwrap();
        assert_eq!(g.mirror_overlap_length(), 0);
        let g = SubsystemPair::new(10, 50, 30, 100, 0).unwrap();
        assert_eq!(g.mirror_overlap_length(), 30);
        assert_eq!(g.mirror_sites().len(), 30);
    }

    #[test]
    fn site_sets_avoid_impurity() {
        let g = SubsystemPair::new(3, 4, 1, 5, 2).unwrap();
        let l = g.sites_left();
        let r = g.sites_right();
        assert_eq!(l, vec![-9, -8, -7, -6]);
        assert_eq!(r, vec![4, 5, 6, 7, 8]);
        assert!(l.iter().chain(&r).all(|m| m.abs() > 2));
        // mirrors: m ∈ A_R with -m ∈ A_L
        assert_eq!(g.mirror_sites(), vec![6, 7, 8]);
        assert_eq!(g.mirror_pair_sites(), vec![-6, 6, -7, 7, -8, 8]);
    }

    #[test]
    fn tabulated_matches_source_and_stays_unitary() {
        let rl = ResonantLevel { eps0: 1.0, hopping: 1.0 };
        let mut csv_text = String::from("k,ReTL,ImTL,ReRL,ImRL,ReTR,ImTR,ReRR,ImRR\n");
        let n = 400;
        for i in 0..n {
            let k = PI * (i as f64 + 0.5) / n as f64;
            let a = rl.amplitudes(k);
            csv_text.push_str(&format!(
                "{k},{},{},{},{},{},{},{},{}\n",
                a.t_left.re, a.t_left.im, a.r_left.re, a.r_left.im, a.t_right.re, a.t_right.im, a.r_right.re, a.r_right.im
            ));
        }
        let tab = TabulatedScatterer::<f64>::from_csv(csv_text.as_bytes()).unwrap();
        let model = ScatteringModel::new(tab).unwrap();
        for k in [0.3, 1.1, 2.9] {
            assert!((model.transmission(k) - rl.amplitudes(k).transmission()).abs() < 1e-4);
            assert!(model.amplitudes(k).unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn tabulated_rejects_bad_rows() {
        let bad = "0.5,1,0,1,0,1,0,1,0\n1.0,1,0,0,0,1,0,0,0\n";
        assert!(TabulatedScatterer::<f64>::from_csv(bad.as_bytes()).is_err());
        let short = "0.5,1,0\n";
        assert!(TabulatedScatterer::<f64>::from_csv(short.as_bytes()).is_err());
    }

    struct Leaky;
    impl Scatterer<f64> for Leaky {
        fn amplitudes(&self, _k: f64) -> Amplitudes<f64> {
            let c = Complex::new(0.7, 0.0);
            Amplitudes {
                r_left: c,
                t_left: c,
                r_right: c,
                t_right: c,
            }
        }
        fn describe(&self) -> String {
            "leaky".into()
        }
    }

    #[test]
    fn non_unitary_scatterer_rejected() {
        assert!(matches!(ScatteringModel::new(Leaky), Err(Error::ScatteringInvariant { .. })));
    }

    #[test]
    fn f32_resonant_level() {
        let params = LatticeParams::<f32>::default();
        let m = ScatteringModel::resonant_level(1.0f32, &params).unwrap();
        assert!((m.transmission(std::f32::consts::FRAC_PI_2) - 0.8).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn unitarity_holds_for_resonant_levels(eps0 in -6.0f64..6.0, k in 1e-6f64..(PI - 1e-6)) {
            let a = ResonantLevel { eps0, hopping: 1.0 }.amplitudes(k);
            prop_assert!((a.transmission() + a.reflection() - 1.0).abs() < 1e-12);
            prop_assert!((a.t_right.conj() * a.r_right + a.t_left * a.r_left.conj()).norm() < 1e-12);
        }

        #[test]
        fn constant_transmission_is_unitary(t in 0.0f64..=1.0, k in 0.01f64..3.1) {
            let a = ConstantTransmission { transmission: t }.amplitudes(k);
            prop_assert!(a.unitarity_defect() < 1e-12);
            prop_assert!((a.transmission() - t).abs() < 1e-12);
        }

        #[test]
        fn mirror_overlap_shift_invariant(dl in 0i64..200, dr in 0i64..200, ll in 1i64..150, lr in 1i64..150, s in 0i64..500) {
            let g = SubsystemPair::new(dl, ll, dr, lr, 0).unwrap();
            prop_assert_eq!(g.mirror_overlap_length(), g.shifted(s).unwrap().mirror_overlap_length());
            prop_assert_eq!(g.mirror_overlap_length() as usize, g.mirror_sites().len());
            prop_assert_eq!(g.mirror_overlap_length(), g.mirrored().mirror_overlap_length());
        }

        #[test]
        fn unbiased_occupation_is_global(mu in -1.9f64..1.9, t in 0.0f64..3.0, k in 0.01f64..3.1) {
            let res = ReservoirPair::equilibrium(mu, t).unwrap();
            let params = LatticeParams::default();
            let plus = occupation_tilde(k, &res, &params).unwrap();
            let minus = occupation_tilde(-k, &res, &params).unwrap();
            prop_assert_eq!(plus, minus);
            prop_assert_eq!(plus, fermi_dirac(dispersion(k, &params), mu, t));
        }
    }
}
