//! Entropies, mutual informations and negativities of Gaussian fermionic
//! states, evaluated from restricted correlation matrices.

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cabs, cln, csqrt, re, Real};
use nalgebra::{Complex, DMatrix, DVector};
use std::fmt;

/// Eigenvalues further than this outside `[0, 1]` are rejected as unphysical.
pub const SPECTRUM_ERROR_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasureKind {
    VonNeumannEntropy,
    RenyiEntropy,
    MutualInformation,
    RenyiMutualInformation,
    PetzRenyiMutualInformation,
    Negativity,
    RenyiNegativity,
}

impl MeasureKind {
    /// Whether the measure is defined through a replica index `n`.
    pub fn needs_index(&self) -> bool {
        matches!(
            self,
            Self::RenyiEntropy | Self::RenyiMutualInformation | Self::PetzRenyiMutualInformation | Self::RenyiNegativity
        )
    }

    /// Whether the measure compares two subsystems.
    pub fn is_bipartite(&self) -> bool {
        !matches!(self, Self::VonNeumannEntropy | Self::RenyiEntropy)
    }

    /// Short identifier used in CSV headers and configuration files.
    pub fn slug(&self) -> &'static str {
        match self {
            Self::VonNeumannEntropy => "entropy",
            Self::RenyiEntropy => "renyi_entropy",
            Self::MutualInformation => "mi",
            Self::RenyiMutualInformation => "rmi",
            Self::PetzRenyiMutualInformation => "prmi",
            Self::Negativity => "negativity",
            Self::RenyiNegativity => "renyi_negativity",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        [
            Self::VonNeumannEntropy,
            Self::RenyiEntropy,
            Self::MutualInformation,
            Self::RenyiMutualInformation,
            Self::PetzRenyiMutualInformation,
            Self::Negativity,
            Self::RenyiNegativity,
        ]
        .into_iter()
        .find(|k| k.slug() == s)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Which evaluation route produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pipeline {
    Numeric,
    Analytic,
}

/// A measure to evaluate and its numerical settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureSpec<T> {
    pub kind: MeasureKind,
    pub n: Option<T>,
    pub clip: T,
    pub imag_tol: T,
}

impl<T: Real> MeasureSpec<T> {
    pub fn new(kind: MeasureKind, n: Option<T>) -> Result<Self> {
        let spec = Self {
            kind,
            n,
            clip: T::lit(1e-12),
            imag_tol: T::lit(1e-8),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (self.kind.needs_index(), self.n) {
            (false, None) => {}
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!("{} takes no replica index", self.kind)));
            }
            (true, None) => {
                return Err(Error::InvalidParameter(format!("{} requires a replica index n", self.kind)));
            }
            (true, Some(n)) => {
                if !(n > T::zero()) || n == T::one() {
                    return Err(Error::InvalidParameter(format!("replica index must be positive and ≠ 1, got {n}")));
                }
                if self.kind == MeasureKind::RenyiNegativity {
                    even_index(n)?;
                }
            }
        }
        if !(self.clip >= T::zero() && self.clip < T::lit(0.5)) {
            return Err(Error::InvalidParameter(format!("spectral clip must lie in [0, 1/2), got {}", self.clip)));
        }
        if !(self.imag_tol > T::zero()) {
            return Err(Error::InvalidParameter("imaginary tolerance must be positive".into()));
        }
        Ok(())
    }

    /// Display label, e.g. `prmi_n2`.
    pub fn label(&self) -> String {
        match self.n {
            Some(n) => format!("{}_n{}", self.kind.slug(), n.as_f64()),
            None => self.kind.slug().to_string(),
        }
    }
}

fn even_index<T: Real>(n: T) -> Result<u32> {
    let x = n.as_f64();
    if x.fract() != 0.0 || x < 2.0 || (x as u64) % 2 != 0 {
        return Err(Error::InvalidParameter(format!("Rényi negativity needs an even integer n ≥ 2, got {n}")));
    }
    Ok(x as u32)
}

/// Numerical health of one evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Diagnostics<T> {
    /// Largest distance of any correlation-matrix eigenvalue outside `[0, 1]`.
    pub spectrum_excursion: T,
    /// Relative imaginary part discarded from the final value.
    pub imag_residue: T,
}

impl<T: Real> Diagnostics<T> {
    fn merge(self, other: Self) -> Self {
        Self {
            spectrum_excursion: self.spectrum_excursion.max(other.spectrum_excursion),
            imag_residue: self.imag_residue.max(other.imag_residue),
        }
    }

    fn clean() -> Self {
        Self {
            spectrum_excursion: T::zero(),
            imag_residue: T::zero(),
        }
    }
}

/// A value with its diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: T,
    pub diagnostics: Diagnostics<T>,
}

/// A named measure value tagged with the pipeline that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureValue<T> {
    pub value: T,
    pub kind: MeasureKind,
    pub n: Option<T>,
    pub pipeline: Pipeline,
    pub diagnostics: Diagnostics<T>,
}

/// Ascending eigenvalues of a Hermitian matrix plus their excursion outside `[0, 1]`.
fn checked_spectrum<T: Real>(c: &DMatrix<Complex<T>>) -> Result<(DVector<T>, T)> {
    if !c.is_square() {
        return Err(Error::DimensionMismatch(format!("correlation matrix is {}×{}", c.nrows(), c.ncols())));
    }
    let spec = crate::correlation::hermitian_spectrum(c)?;
    let mut excursion = T::zero();
    for &v in spec.iter() {
        if !v.is_finite() {
            return Err(Error::Eigensolver("non-finite eigenvalue".into()));
        }
        excursion = excursion.max(-v).max(v - T::one());
    }
    if excursion > T::lit(SPECTRUM_ERROR_THRESHOLD) {
        return Err(Error::SpectrumOutOfRange {
            excursion: excursion.as_f64(),
        });
    }
    Ok((spec, excursion))
}

fn clip_to<T: Real>(v: T, clip: T) -> T {
    v.max(clip).min(T::one() - clip)
}

/// `x^p` with `0^p = 0` for `p > 0`.
fn pow<T: Real>(x: T, p: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else {
        x.powf(p)
    }
}

fn xlnx<T: Real>(x: T) -> T {
    if x > T::zero() {
        x * x.ln()
    } else {
        T::zero()
    }
}

fn binary_entropy<T: Real>(v: T) -> T {
    -(xlnx(v) + xlnx(T::one() - v))
}

/// `(1/(1−n)) Σ ln(ν^n + (1−ν)^n)` over the clipped spectrum.
pub fn renyi_entropy<T: Real>(c: &DMatrix<Complex<T>>, n: T, clip: T) -> Result<Evaluation<T>> {
    if !(n > T::zero()) || n == T::one() {
        return Err(Error::InvalidParameter(format!("Rényi index must be positive and ≠ 1, got {n}")));
    }
    let (spec, excursion) = checked_spectrum(c)?;
    let sum = spec.iter().fold(T::zero(), |acc, &v| {
        let v = clip_to(v, clip);
        acc + (pow(v, n) + pow(T::one() - v, n)).ln()
    });
    Ok(Evaluation {
        value: sum / (T::one() - n),
        diagnostics: Diagnostics {
            spectrum_excursion: excursion,
            imag_residue: T::zero(),
        },
    })
}

/// `Σ [−ν ln ν − (1−ν) ln(1−ν)]` over the clipped spectrum.
pub fn von_neumann_entropy<T: Real>(c: &DMatrix<Complex<T>>, clip: T) -> Result<Evaluation<T>> {
    let (spec, excursion) = checked_spectrum(c)?;
    let sum = spec.iter().fold(T::zero(), |acc, &v| acc + binary_entropy(clip_to(v, clip)));
    Ok(Evaluation {
        value: sum,
        diagnostics: Diagnostics {
            spectrum_excursion: excursion,
            imag_residue: T::zero(),
        },
    })
}

fn entropy<T: Real>(c: &DMatrix<Complex<T>>, n: Option<T>, clip: T) -> Result<Evaluation<T>> {
    match n {
        Some(n) => renyi_entropy(c, n, clip),
        None => von_neumann_entropy(c, clip),
    }
}

fn check_blocks<T: Real>(c1: &DMatrix<Complex<T>>, c2: &DMatrix<Complex<T>>, c12: &DMatrix<Complex<T>>) -> Result<()> {
    if c12.nrows() != c1.nrows() + c2.nrows() || !c12.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "joint matrix is {}×{}, subsystems have {} and {} sites",
            c12.nrows(),
            c12.ncols(),
            c1.nrows(),
            c2.nrows()
        )));
    }
    Ok(())
}

fn entropic_mi<T: Real>(
    c1: &DMatrix<Complex<T>>,
    c2: &DMatrix<Complex<T>>,
    c12: &DMatrix<Complex<T>>,
    n: Option<T>,
    clip: T,
) -> Result<Evaluation<T>> {
    check_blocks(c1, c2, c12)?;
    let s1 = entropy(c1, n, clip)?;
    let s2 = entropy(c2, n, clip)?;
    let s12 = entropy(c12, n, clip)?;
    Ok(Evaluation {
        value: s1.value + s2.value - s12.value,
        diagnostics: s1.diagnostics.merge(s2.diagnostics).merge(s12.diagnostics),
    })
}

/// `I = S_1 + S_2 − S_12`
pub fn mutual_information<T: Real>(
    c1: &DMatrix<Complex<T>>,
    c2: &DMatrix<Complex<T>>,
    c12: &DMatrix<Complex<T>>,
    clip: T,
) -> Result<Evaluation<T>> {
    entropic_mi(c1, c2, c12, None, clip)
}

/// `I^(n) = S^(n)_1 + S^(n)_2 − S^(n)_12`
pub fn renyi_mutual_information<T: Real>(
    c1: &DMatrix<Complex<T>>,
    c2: &DMatrix<Complex<T>>,
    c12: &DMatrix<Complex<T>>,
    n: T,
    clip: T,
) -> Result<Evaluation<T>> {
    if !(n > T::zero()) || n == T::one() {
        return Err(Error::InvalidParameter(format!("Rényi index must be positive and ≠ 1, got {n}")));
    }
    entropic_mi(c1, c2, c12, Some(n), clip)
}

/// Covariance matrices `Γ₊`, `Γ₋ = Γ₊†` with the first `n1` rows and columns
/// multiplied by `±i`.
fn twisted_covariances<T: Real>(c12: &DMatrix<Complex<T>>, n1: usize) -> Result<(DMatrix<Complex<T>>, DMatrix<Complex<T>>)> {
    let n = c12.nrows();
    if !c12.is_square() || n1 > n {
        return Err(Error::DimensionMismatch(format!("block size {n1} does not fit a {n}×{} matrix", c12.ncols())));
    }
    let gamma = DMatrix::<Complex<T>>::identity(n, n) - c12 * re(T::lit(2.0));
    let i = Complex::new(T::zero(), T::one());
    let phase = |a: usize, sign: Complex<T>| if a < n1 { sign } else { re(T::one()) };
    let plus = DMatrix::from_fn(n, n, |a, b| phase(a, i) * gamma[(a, b)] * phase(b, i));
    let minus = DMatrix::from_fn(n, n, |a, b| phase(a, -i) * gamma[(a, b)] * phase(b, -i));
    Ok((plus, minus))
}

/// Correlation matrix `C_Ξ` of the partially transposed state, with the
/// first `n1` indices belonging to the transposed subsystem.
pub fn negativity_transform<T: Real>(c12: &DMatrix<Complex<T>>, n1: usize) -> Result<DMatrix<Complex<T>>> {
    let (plus, minus) = twisted_covariances(c12, n1)?;
    let n = c12.nrows();
    let lhs = DMatrix::identity(n, n) + &plus * &minus;
    let solved = lhs
        .lu()
        .solve(&(&plus + &minus))
        .ok_or_else(|| Error::Singular("I + Γ₊Γ₋ is singular".into()))?;
    if solved.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Singular("I + Γ₊Γ₋ is numerically singular".into()));
    }
    Ok((DMatrix::identity(n, n) - solved) * re(T::lit(0.5)))
}

/// Spectrum of `C_Ξ`, ascending.
///
/// `Γ₊Γ₋ = Γ₊Γ₊†` is positive and `Γ₊ + Γ₋` is Hermitian, so
/// `(I + Γ₊Γ₋)^{-1}(Γ₊ + Γ₋)` is similar to the Hermitian matrix
/// `(I + Γ₊Γ₋)^{-1/2}(Γ₊ + Γ₋)(I + Γ₊Γ₋)^{-1/2}`, which is diagonalized instead.
pub fn negativity_spectrum<T: Real>(c12: &DMatrix<Complex<T>>, n1: usize) -> Result<DVector<T>> {
    let (plus, minus) = twisted_covariances(c12, n1)?;
    let n = c12.nrows();
    let a = DMatrix::identity(n, n) + &plus * &minus;
    let a = (&a + a.adjoint()) * re(T::lit(0.5));
    let inv_sqrt = hermitian_function(&a, |x| {
        if x > T::zero() {
            T::one() / x.sqrt()
        } else {
            T::zero()
        }
    })?;
    let b = &plus + &minus;
    let h = &inv_sqrt * b * &inv_sqrt;
    let h = (&h + h.adjoint()) * re(T::lit(0.5));
    let mu = crate::correlation::hermitian_spectrum(&h)?;
    let half = T::lit(0.5);
    let mut xi: Vec<T> = mu.iter().map(|&m| half * (T::one() - m)).collect();
    xi.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    Ok(DVector::from_vec(xi))
}

const SCHUR_SWEEPS_PER_ROW: usize = 60;

/// Eigenvalues of a general complex matrix via the Schur form.
pub fn general_eigenvalues<T: Real>(m: &DMatrix<Complex<T>>) -> Result<Vec<Complex<T>>> {
    let n = m.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let schur = nalgebra::linalg::Schur::try_new(m.clone(), T::default_epsilon(), SCHUR_SWEEPS_PER_ROW * n.max(4))
        .ok_or_else(|| Error::Eigensolver("Schur decomposition did not converge".into()))?;
    let (_, t) = schur.unpack();
    let scale = t.iter().map(|z| cabs(*z)).fold(T::zero(), |a, b| a.max(b)).max(T::one());
    let small = T::default_epsilon() * scale * T::lit(16.0);
    let mut out = Vec::with_capacity(n);
    let mut a = 0;
    while a < n {
        if a + 1 < n && cabs(t[(a + 1, a)]) > small {
            // leftover 2×2 block
            let (p, q, r, s) = (t[(a, a)], t[(a, a + 1)], t[(a + 1, a)], t[(a + 1, a + 1)]);
            let half = re(T::lit(0.5));
            let mean = (p + s) * half;
            let disc = csqrt((p - s) * (p - s) * re(T::lit(0.25)) + q * r);
            out.push(mean + disc);
            out.push(mean - disc);
            a += 2;
        } else {
            out.push(t[(a, a)]);
            a += 1;
        }
    }
    Ok(out)
}

fn relative_residue<T: Real>(total: Complex<T>) -> T {
    total.im.abs() / total.re.abs().max(T::one())
}

fn check_residue<T: Real>(total: Complex<T>, tol: T) -> Result<T> {
    let r = relative_residue(total);
    if !(r <= tol) {
        return Err(Error::ImaginaryResidue {
            residue: r.as_f64(),
            tolerance: tol.as_f64(),
        });
    }
    Ok(r)
}

/// `Σ ln(ν² + (1−ν)²)` over the spectrum of `c12`, shared by both negativities.
fn purity_term<T: Real>(c12: &DMatrix<Complex<T>>, clip: T) -> Result<(T, T)> {
    let (spec, excursion) = checked_spectrum(c12)?;
    let sum = spec.iter().fold(T::zero(), |acc, &v| {
        let v = clip_to(v, clip);
        acc + (v * v + (T::one() - v) * (T::one() - v)).ln()
    });
    Ok((sum, excursion))
}

fn negativity_generic<T: Real>(
    c12: &DMatrix<Complex<T>>,
    n1: usize,
    half_power: Option<u32>,
    clip: T,
) -> Result<Evaluation<T>> {
    let (purity, excursion) = purity_term(c12, clip)?;
    let xi = negativity_spectrum(c12, n1)?;
    let mut total = T::zero();
    for &z in xi.iter() {
        let z = clip_to(z, clip);
        let w = T::one() - z;
        total += match half_power {
            None => (z.sqrt() + w.sqrt()).ln(),
            Some(h) => (z.powi(h as i32) + w.powi(h as i32)).ln(),
        };
    }
    let weight = match half_power {
        None => T::lit(0.5),
        Some(h) => T::from_u32(h).unwrap(),
    };
    Ok(Evaluation {
        value: total + weight * purity,
        diagnostics: Diagnostics {
            spectrum_excursion: excursion,
            imag_residue: T::zero(),
        },
    })
}

/// Fermionic logarithmic negativity between the first `n1` modes and the rest.
pub fn fermionic_negativity<T: Real>(c12: &DMatrix<Complex<T>>, n1: usize, clip: T) -> Result<Evaluation<T>> {
    negativity_generic(c12, n1, None, clip)
}

/// Rényi negativity of even order `n`.
pub fn renyi_negativity<T: Real>(c12: &DMatrix<Complex<T>>, n1: usize, n: T, clip: T) -> Result<Evaluation<T>> {
    let n = even_index(n)?;
    negativity_generic(c12, n1, Some(n / 2), clip)
}

/// `ln det M` from the LU factors, with the phase reduced to `(-π, π]`.
///
/// Its real part equals `Re Σ ln λ`; used when the Schur iteration stalls
/// (typically on matrices close to a multiple of the identity).
fn log_det<T: Real>(m: DMatrix<Complex<T>>) -> Result<Complex<T>> {
    let lu = m.lu();
    let u = lu.u();
    let mut modulus = T::zero();
    let mut phase = re(T::one());
    for a in 0..u.nrows() {
        let d = u[(a, a)];
        let r = cabs(d);
        if !(r > T::zero()) {
            return Err(Error::Singular("Petz product matrix is singular".into()));
        }
        modulus += r.ln();
        phase *= d / re(r);
    }
    let sign_flip = lu.p().determinant::<T>();
    let phase = phase * re(sign_flip);
    Ok(Complex::new(modulus, phase.im.atan2(phase.re)))
}

/// `f(H)` for Hermitian `H` via its eigendecomposition.
pub fn hermitian_function<T: Real>(h: &DMatrix<Complex<T>>, f: impl Fn(T) -> T) -> Result<DMatrix<Complex<T>>> {
    let eig = nalgebra::linalg::SymmetricEigen::try_new(h.clone(), T::default_epsilon(), 0)
        .ok_or_else(|| Error::Eigensolver("Hermitian eigensolver did not converge".into()))?;
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let fl = re(f(lam));
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= fl;
        }
    }
    Ok(scaled * v.adjoint())
}

/// Petz Rényi mutual information
/// `(1/(n−1)) Tr ln[C^n D^{1−n} + (I−C)^n (I−D)^{1−n}]` with `D = C_1 ⊕ C_2`.
pub fn petz_renyi_mi<T: Real>(
    c1: &DMatrix<Complex<T>>,
    c2: &DMatrix<Complex<T>>,
    c12: &DMatrix<Complex<T>>,
    n: T,
    clip: T,
    imag_tol: T,
) -> Result<Evaluation<T>> {
    check_blocks(c1, c2, c12)?;
    if !(n > T::zero()) || n == T::one() {
        return Err(Error::InvalidParameter(format!("Rényi index must be positive and ≠ 1, got {n}")));
    }
    let (_, ex1) = checked_spectrum(c1)?;
    let (_, ex2) = checked_spectrum(c2)?;
    let (_, ex12) = checked_spectrum(c12)?;
    let n1 = c1.nrows();
    let dim = c12.nrows();
    let mut d = DMatrix::zeros(dim, dim);
    d.view_mut((0, 0), (n1, n1)).copy_from(c1);
    d.view_mut((n1, n1), (dim - n1, dim - n1)).copy_from(c2);

    let one = T::one();
    let m = one - n;
    let c_n = hermitian_function(c12, |v| pow(clip_to(v, clip), n))?;
    let cc_n = hermitian_function(c12, |v| pow(one - clip_to(v, clip), n))?;
    let d_m = hermitian_function(&d, |v| clip_to(v, clip).powf(m))?;
    let dd_m = hermitian_function(&d, |v| (one - clip_to(v, clip)).powf(m))?;
    let product = c_n * d_m + cc_n * dd_m;

    let total = match general_eigenvalues(&product) {
        Ok(eigs) => {
            let mut total = re(T::zero());
            for lam in eigs {
                if lam.re <= T::zero() && lam.im.abs() <= T::default_epsilon() * T::lit(1e3) {
                    return Err(Error::NegativeEigenvalue {
                        re: lam.re.as_f64(),
                        im: lam.im.as_f64(),
                    });
                }
                total += cln(lam);
            }
            total
        }
        Err(Error::Eigensolver(_)) => log_det(product)?,
        Err(e) => return Err(e),
    };
    let residue = check_residue(total, imag_tol)?;
    Ok(Evaluation {
        value: total.re / (n - one),
        diagnostics: Diagnostics {
            spectrum_excursion: ex1.max(ex2).max(ex12),
            imag_residue: residue,
        },
    })
}

/// Evaluates `spec` on a joint matrix whose first `n1` sites form subsystem 1.
/// Single-subsystem measures use the whole matrix.
pub fn evaluate<T: Real>(spec: &MeasureSpec<T>, c12: &CorrelationMatrix<T>, n1: usize) -> Result<MeasureValue<T>> {
    spec.validate()?;
    let c = &c12.entries;
    let dim = c.nrows();
    if spec.kind.is_bipartite() && (n1 == 0 || n1 >= dim) {
        return Err(Error::DimensionMismatch(format!("subsystem split {n1} invalid for {dim} sites")));
    }
    let blocks = || {
        (
            c.view((0, 0), (n1, n1)).into_owned(),
            c.view((n1, n1), (dim - n1, dim - n1)).into_owned(),
        )
    };
    let n = spec.n;
    let eval = match spec.kind {
        MeasureKind::VonNeumannEntropy => von_neumann_entropy(c, spec.clip)?,
        MeasureKind::RenyiEntropy => renyi_entropy(c, n.unwrap(), spec.clip)?,
        MeasureKind::MutualInformation => {
            let (c1, c2) = blocks();
            mutual_information(&c1, &c2, c, spec.clip)?
        }
        MeasureKind::RenyiMutualInformation => {
            let (c1, c2) = blocks();
            renyi_mutual_information(&c1, &c2, c, n.unwrap(), spec.clip)?
        }
        MeasureKind::PetzRenyiMutualInformation => {
            let (c1, c2) = blocks();
            petz_renyi_mi(&c1, &c2, c, n.unwrap(), spec.clip, spec.imag_tol)?
        }
        MeasureKind::Negativity => fermionic_negativity(c, n1, spec.clip)?,
        MeasureKind::RenyiNegativity => renyi_negativity(c, n1, n.unwrap(), spec.clip)?,
    };
    Ok(MeasureValue {
        value: eval.value,
        kind: spec.kind,
        n,
        pipeline: Pipeline::Numeric,
        diagnostics: eval.diagnostics,
    })
}

impl<T: Real> Evaluation<T> {
    pub fn exact(value: T) -> Self {
        Self {
            value,
            diagnostics: Diagnostics::clean(),
        }
    }
}
