//! Many-body reference for a handful of modes: Gaussian density matrices
//! built explicitly from Jordan–Wigner operators on `2^N` states, so that
//! entropies, Petz divergences and the partially transposed state can be
//! computed without any single-particle formula.

use crate::error::{Error, Result};
use crate::measures::{fermionic_negativity, mutual_information, petz_renyi_mi, renyi_mutual_information, renyi_negativity};
use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;
type M = DMatrix<C>;

/// Largest mode count the dense oracle accepts.
pub const MAX_MODES: usize = 10;

/// Haar-ish random unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> M {
    let g = M::from_fn(dim, dim, |_, _| C::new(gauss(rng), gauss(rng)));
    g.qr().q()
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box–Muller
    let u: f64 = rng.gen_range(1e-12..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

/// Random valid correlation matrix with eigenvalues in `[lo, hi]`.
pub fn random_correlation(seed: u64, dim: usize, lo: f64, hi: f64) -> M {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u = random_unitary(&mut rng, dim);
    let d = M::from_diagonal(&DVector::from_fn(dim, |_, _| C::new(rng.gen_range(lo..=hi), 0.0)));
    let c = &u * d * u.adjoint();
    (&c + c.adjoint()) * C::new(0.5, 0.0)
}

pub fn annihilator(modes: usize, j: usize) -> M {
    let dim = 1 << modes;
    let mut out = M::zeros(dim, dim);
    for s in 0..dim {
        if (s >> j) & 1 == 1 {
            let parity = (0..j).filter(|&i| (s >> i) & 1 == 1).count();
            let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
            out[(s ^ (1 << j), s)] = C::new(sign, 0.0);
        }
    }
    out
}

fn hermitian_map(h: &M, f: impl Fn(f64) -> f64) -> M {
    let eig = h.clone().symmetric_eigen();
    let d = M::from_diagonal(&eig.eigenvalues.map(|x| C::new(f(x), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Gaussian density matrix with `⟨c_j† c_m⟩ = C_jm`; the spectrum of `C`
/// must lie strictly inside `(0, 1)`.
pub fn density_matrix(c: &M) -> Result<M> {
    let modes = c.nrows();
    if modes == 0 || modes > MAX_MODES {
        return Err(Error::DimensionMismatch(format!("{modes} modes outside 1..={MAX_MODES}")));
    }
    let ct = c.transpose();
    let k = hermitian_map(&ct, |x| (x / (1.0 - x)).ln());
    if k.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SpectrumOutOfRange { excursion: 0.0 });
    }
    let ops: Vec<M> = (0..modes).map(|j| annihilator(modes, j)).collect();
    let dim = 1 << modes;
    let mut h = M::zeros(dim, dim);
    for j in 0..modes {
        for m in 0..modes {
            h += ops[j].adjoint() * &ops[m] * k[(j, m)];
        }
    }
    let h = (&h + h.adjoint()) * C::new(0.5, 0.0);
    let rho = hermitian_map(&h, f64::exp);
    let z = rho.trace();
    Ok(rho / z)
}

/// `⟨c_j† c_m⟩` read back from a density matrix.
pub fn correlation(rho: &M, modes: usize) -> M {
    let ops: Vec<M> = (0..modes).map(|j| annihilator(modes, j)).collect();
    M::from_fn(modes, modes, |j, m| (rho * ops[j].adjoint() * &ops[m]).trace())
}

/// Trace over the modes `keep..modes` (the highest bits).
pub fn keep_low(rho: &M, modes: usize, keep: usize) -> M {
    let dk = 1 << keep;
    let rest = 1 << (modes - keep);
    M::from_fn(dk, dk, |a, b| (0..rest).map(|r| rho[(a + (r << keep), b + (r << keep))]).sum())
}

/// Trace over the modes `0..drop` (the lowest bits).
pub fn keep_high(rho: &M, modes: usize, drop: usize) -> M {
    let dk = 1 << (modes - drop);
    let rest = 1 << drop;
    M::from_fn(dk, dk, |a, b| (0..rest).map(|r| rho[((a << drop) + r, (b << drop) + r)]).sum())
}

/// `ρ_low ⊗ ρ_high` in the same bit layout as the full state.
pub fn kron_low_high(low: &M, high: &M, low_modes: usize) -> M {
    let dl = 1 << low_modes;
    let dim = dl * high.nrows();
    M::from_fn(dim, dim, |a, b| low[(a % dl, b % dl)] * high[(a / dl, b / dl)])
}

/// Von Neumann (`n = None`) or Rényi entropy.
pub fn entropy(rho: &M, n: Option<f64>) -> f64 {
    let ev = rho.clone().symmetric_eigenvalues();
    match n {
        None => -ev.iter().filter(|&&p| p > 1e-300).map(|&p| p * p.ln()).sum::<f64>(),
        Some(n) => ev.iter().map(|&p| p.max(0.0).powf(n)).sum::<f64>().ln() / (1.0 - n),
    }
}

/// Petz–Rényi divergence `ln Tr[ρ^n σ^{1−n}] / (n − 1)`.
pub fn petz(rho: &M, sigma: &M, n: f64) -> f64 {
    let a = hermitian_map(rho, |x| x.max(0.0).powf(n));
    let b = hermitian_map(sigma, |x| x.max(1e-300).powf(1.0 - n));
    (a * b).trace().re.ln() / (n - 1.0)
}

/// Fermionic partial transpose on the lowest `a_modes` modes.
pub fn partial_transpose(rho: &M, a_modes: usize) -> M {
    let dim = rho.nrows();
    let amask = (1usize << a_modes) - 1;
    let pop = |x: usize| x.count_ones() as i64;
    let mut out = M::zeros(dim, dim);
    for s in 0..dim {
        for t in 0..dim {
            let (na, nb) = (s & amask, s & !amask);
            let (ma, mb) = (t & amask, t & !amask);
            let ta = pop(na) + pop(ma);
            let tb = pop(nb) + pop(mb);
            let phase = ((ta % 2) as f64) / 2.0 + (ta * tb) as f64;
            let factor = C::from_polar(1.0, std::f64::consts::PI * phase);
            out[(ma | nb, na | mb)] = factor * rho[(s, t)];
        }
    }
    out
}

/// `ln Tr|ρ^{T_A}|` (`n = None`) or `ln Tr|ρ^{T_A}|^n`.
pub fn renyi_negativity_of(rho: &M, a_modes: usize, n: Option<u32>) -> f64 {
    let pt = partial_transpose(rho, a_modes);
    let sv = pt.singular_values();
    match n {
        None => sv.iter().sum::<f64>().ln(),
        Some(n) => sv.iter().map(|s| s.powi(n as i32)).sum::<f64>().ln(),
    }
}

/// Worst deviations between spectral formulas and the many-body reference.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BruteForceReport {
    pub samples: usize,
    pub entropy: f64,
    pub mutual_information: f64,
    pub negativity: f64,
    pub petz: f64,
}

impl BruteForceReport {
    pub fn max(&self) -> f64 {
        self.entropy.max(self.mutual_information).max(self.negativity).max(self.petz)
    }
}

/// Random three-mode states split one mode against two, drawn from `seed`.
pub fn brute_force_check(seed: u64, samples: usize) -> Result<BruteForceReport> {
    let clip = 1e-12;
    let modes = 3;
    let mut rep = BruteForceReport {
        samples,
        ..Default::default()
    };
    for s in 0..samples as u64 {
        let c = random_correlation(seed.wrapping_add(s), modes, 0.03, 0.97);
        let rho = density_matrix(&c)?;
        let c1 = c.view((0, 0), (1, 1)).into_owned();
        let c2 = c.view((1, 1), (2, 2)).into_owned();
        let rho1 = keep_low(&rho, modes, 1);
        let rho2 = keep_high(&rho, modes, 1);
        let product = kron_low_high(&rho1, &rho2, 1);

        let whole = crate::measures::von_neumann_entropy(&c, clip)?.value;
        rep.entropy = rep.entropy.max((whole - entropy(&rho, None)).abs());
        for n in [0.5, 2.0, 3.0] {
            let sn = crate::measures::renyi_entropy(&c, n, clip)?.value;
            rep.entropy = rep.entropy.max((sn - entropy(&rho, Some(n))).abs());
        }

        let mi = mutual_information(&c1, &c2, &c, clip)?.value;
        let mi_b = entropy(&rho1, None) + entropy(&rho2, None) - entropy(&rho, None);
        rep.mutual_information = rep.mutual_information.max((mi - mi_b).abs());
        for n in [0.5, 2.0, 3.0] {
            let rmi = renyi_mutual_information(&c1, &c2, &c, n, clip)?.value;
            let rmi_b = entropy(&rho1, Some(n)) + entropy(&rho2, Some(n)) - entropy(&rho, Some(n));
            rep.mutual_information = rep.mutual_information.max((rmi - rmi_b).abs());
            let prmi = petz_renyi_mi(&c1, &c2, &c, n, clip, 1e-8)?.value;
            rep.petz = rep.petz.max((prmi - petz(&rho, &product, n)).abs());
        }

        let e = fermionic_negativity(&c, 1, clip)?.value;
        rep.negativity = rep.negativity.max((e - renyi_negativity_of(&rho, 1, None)).abs());
        for n in [2u32, 4] {
            let en = renyi_negativity(&c, 1, n as f64, clip)?.value;
            rep.negativity = rep.negativity.max((en - renyi_negativity_of(&rho, 1, Some(n))).abs());
        }
    }
    Ok(rep)
}
