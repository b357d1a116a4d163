use nalgebra::Complex;
use ness_core::correlation::{gamma_prefactors, BuildMode, SteadyState};
use ness_core::physics::{LatticeParams, ReservoirPair, ScatteringModel, SubsystemPair};
use ness_core::quadrature::QuadratureSpec;
use proptest::prelude::*;
use std::f64::consts::PI;

type C = Complex<f64>;

fn rlm(eps0: f64, mu_l: f64, t_l: f64, mu_r: f64, t_r: f64) -> SteadyState<f64> {
    let params = LatticeParams::default();
    let res = ReservoirPair::new(mu_l, t_l, mu_r, t_r).unwrap();
    SteadyState::resonant_level(params, res, eps0).unwrap()
}

fn quad() -> QuadratureSpec<f64> {
    QuadratureSpec::default().with_tolerance(1e-12)
}

#[test]
fn plane_waves_without_scattering() {
    let s = rlm(0.0, 0.0, 1.0, 0.0, 1.0);
    for &m in &[-7i64, -1, 1, 4] {
        for &k in &[-2.5, -0.3, 0.4, 2.9] {
            let psi = s.scattering_wavefunction(m, k).unwrap();
            let expected = C::new((k * m as f64).cos(), (k * m as f64).sin());
            assert!((psi - expected).norm() < 1e-14, "m={m} k={k}");
        }
    }
}

#[test]
fn transmitted_and_reflected_components() {
    let s = rlm(2.0, 0.0, 1.0, 0.0, 1.0);
    let t = C::new(1.0, 0.0) / C::new(1.0, 1.0);
    assert!((t.norm_sqr() - 0.5).abs() < 1e-15);
    let k = PI / 2.0;
    let psi = s.scattering_wavefunction(3, k).unwrap();
    assert!((psi - t * C::new(0.0, 3.0 * k).exp()).norm() < 1e-14);
    let r = t - 1.0;
    let psi = s.scattering_wavefunction(-1, k).unwrap();
    let expected = C::new(0.0, -k).exp() + r * C::new(0.0, k).exp();
    assert!((psi - expected).norm() < 1e-14);
    assert!(s.scattering_wavefunction(0, k).is_err());
    assert!(s.scattering_wavefunction(2, 0.0).is_err());
}

#[test]
fn wavefunction_inside_wide_impurity_rejected() {
    let params = LatticeParams::new(1.0, 2).unwrap();
    let res = ReservoirPair::equilibrium(0.0, 1.0).unwrap();
    let s = SteadyState::resonant_level(params, res, 1.0).unwrap();
    assert!(s.scattering_wavefunction(-2, 0.5).is_err());
    assert!(s.scattering_wavefunction(3, 0.5).is_ok());
    assert!(s.correlation_entry_exact(1, 5, &quad()).is_err());
}

#[test]
fn half_filling_diagonal() {
    for temp in [0.0, 0.7, 3.0] {
        let s = rlm(0.0, 0.0, temp, 0.0, temp);
        let q = quad();
        for m in [-9i64, -1, 1, 12] {
            let e = s.correlation_entry_exact(m, m, &q).unwrap();
            assert!((e - C::new(0.5, 0.0)).norm() < 1e-10, "T={temp}, m={m}: {e}");
            let l = s.correlation_entry_longrange(m, m, &q).unwrap();
            assert!((l - C::new(0.5, 0.0)).norm() < 1e-10);
        }
    }
}

#[test]
fn empty_state_has_no_correlations() {
    let s = rlm(1.0, -10.0, 0.0, -10.0, 0.0);
    let q = quad();
    for (j, m) in [(1, 1), (-3, 5), (4, 9), (-2, -8)] {
        assert!(s.correlation_entry_exact(j, m, &q).unwrap().norm() < 1e-14);
        assert!(s.correlation_entry_longrange(j, m, &q).unwrap().norm() < 1e-14);
    }
}

/// Midpoint Riemann sum over [-π, π] of f̃(k) conj(ψ_j) ψ_m, written out
/// directly from the scattering-state definition.
fn riemann_entry(eps0: f64, mu: f64, t_l: f64, t_r: f64, j: i64, m: i64, points: usize) -> C {
    let fd = |e: f64, t: f64| 1.0 / (((e - mu) / t).exp() + 1.0);
    let psi = |site: i64, k: f64| -> C {
        let q = k.abs();
        let t = C::new(q.sin(), 0.0) / C::new(q.sin(), eps0 / 2.0);
        let r = t - 1.0;
        let plane = C::new(0.0, k * site as f64).exp();
        if k > 0.0 {
            if site < 0 {
                plane + r * plane.conj()
            } else {
                t * plane
            }
        } else if site < 0 {
            t * plane
        } else {
            plane + r * plane.conj()
        }
    };
    let h = 2.0 * PI / points as f64;
    let mut acc = C::new(0.0, 0.0);
    for i in 0..points {
        let k = -PI + (i as f64 + 0.5) * h;
        let f = if k > 0.0 { fd(-2.0 * k.cos(), t_l) } else { fd(-2.0 * k.cos(), t_r) };
        acc += psi(j, k).conj() * psi(m, k) * f;
    }
    acc * h / (2.0 * PI)
}

#[test]
fn exact_entry_matches_dense_riemann_sum() {
    let s = rlm(1.0, 0.0, 2.0, 0.0, 1.0);
    let q = quad();
    for (j, m) in [(3, 3), (-3, 3), (-5, -2), (2, 7)] {
        let value = s.correlation_entry_exact(j, m, &q).unwrap();
        let oracle = riemann_entry(1.0, 0.0, 2.0, 1.0, j, m, 1_000_000);
        assert!((value - oracle).norm() < 1e-9, "({j},{m}): {value} vs {oracle}");
    }
}

#[test]
fn longrange_cross_entries_vanish_without_reflection_or_bias() {
    let q = quad();
    let clean = rlm(0.0, 1.0, 0.5, -1.0, 0.2);
    let unbiased = rlm(1.3, 0.4, 0.8, 0.4, 0.8);
    for (j, m) in [(-4, 6), (7, -3), (-20, 20)] {
        assert!(clean.correlation_entry_longrange(j, m, &q).unwrap().norm() < 1e-12);
        assert!(unbiased.correlation_entry_longrange(j, m, &q).unwrap().norm() < 1e-12);
    }
    // a biased, reflecting impurity does correlate the two sides
    let biased = rlm(1.0, 1.5, 1.0, -1.5, 1.0);
    assert!(biased.correlation_entry_longrange(-5, 5, &q).unwrap().norm() > 1e-3);
}

#[test]
fn longrange_entries_are_toeplitz_and_hankel() {
    let s = rlm(1.0, 1.0, 0.5, -0.5, 0.0);
    let q = quad();
    let a = s.correlation_entry_longrange(5, 2, &q).unwrap();
    let b = s.correlation_entry_longrange(13, 10, &q).unwrap();
    assert!((a - b).norm() < 1e-13);
    let a = s.correlation_entry_longrange(-8, -3, &q).unwrap();
    let b = s.correlation_entry_longrange(-18, -13, &q).unwrap();
    assert!((a - b).norm() < 1e-13);
    let a = s.correlation_entry_longrange(-4, 9, &q).unwrap();
    let b = s.correlation_entry_longrange(-10, 15, &q).unwrap();
    assert!((a - b).norm() < 1e-13);
    let a = s.correlation_entry_longrange(9, -4, &q).unwrap();
    let b = s.correlation_entry_longrange(15, -10, &q).unwrap();
    assert!((a - b).norm() < 1e-13);
}

#[test]
fn hermitian_in_both_modes() {
    let s = rlm(0.8, 0.6, 0.4, -0.3, 1.1);
    let q = quad();
    for (j, m) in [(-6, 4), (3, 8), (-2, -9), (11, -1)] {
        let a = s.correlation_entry_exact(j, m, &q).unwrap();
        let b = s.correlation_entry_exact(m, j, &q).unwrap();
        assert!((a - b.conj()).norm() < 1e-11);
        let a = s.correlation_entry_longrange(j, m, &q).unwrap();
        let b = s.correlation_entry_longrange(m, j, &q).unwrap();
        assert!((a - b.conj()).norm() < 1e-11);
    }
}

#[test]
fn exact_entries_approach_longrange_limit() {
    let s = rlm(1.0, 0.5, 1.0, -0.5, 0.6);
    let q = quad();
    let mut previous = f64::INFINITY;
    for d_min in [20, 80, 320] {
        let geom = SubsystemPair::with_offset(-2, d_min, 3, 4, 0).unwrap();
        let exact = s.build_subsystems(&geom, BuildMode::Exact, &q).unwrap();
        let long = s.build_subsystems(&geom, BuildMode::LongRange, &q).unwrap();
        let diff = (&exact.entries - &long.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < previous, "d_min={d_min}: {diff} !< {previous}");
        previous = diff;
    }
    assert!(previous < 1e-3);
}

#[test]
fn assembled_matrix_matches_entries() {
    let s = rlm(1.0, 0.0, 2.0, 0.0, 1.0);
    let q = quad();
    let one = s.build_restricted_matrix(&[4], BuildMode::Exact, &q).unwrap();
    assert_eq!(one.dim(), 1);
    assert!((one.entries[(0, 0)] - s.correlation_entry_exact(4, 4, &q).unwrap()).norm() < 1e-12);

    let geom = SubsystemPair::new(1, 2, 3, 2, 0).unwrap();
    for mode in [BuildMode::Exact, BuildMode::LongRange] {
        let c = s.build_subsystems(&geom, mode, &q).unwrap();
        assert_eq!(c.sites, vec![-3, -2, 4, 5]);
        for (a, &j) in c.sites.iter().enumerate() {
            for (b, &m) in c.sites.iter().enumerate() {
                let e = match mode {
                    BuildMode::Exact => s.correlation_entry_exact(j, m, &q).unwrap(),
                    BuildMode::LongRange => s.correlation_entry_longrange(j, m, &q).unwrap(),
                };
                assert!((c.entries[(a, b)] - e).norm() < 1e-12);
            }
        }
        assert!(c.hermiticity_defect() < 1e-12);
        let sub = c.restrict(&[4, -3]).unwrap();
        assert_eq!(sub.entries[(0, 1)], c.entries[(2, 0)]);
        assert!(c.restrict(&[100]).is_err());
    }
}

#[test]
fn keyed_exact_assembly_matches_direct_integrals() {
    let res = ReservoirPair::new(0.4, 0.3, -0.7, 0.1).unwrap();
    let s = SteadyState::resonant_level(LatticeParams::new(1.3, 2).unwrap(), res, 0.8).unwrap();
    let q = quad();
    let geom = SubsystemPair::new(3, 9, 0, 7, 2).unwrap();
    let c = s.build_subsystems(&geom, BuildMode::Exact, &q).unwrap();
    for (a, &j) in c.sites.iter().enumerate() {
        for (b, &m) in c.sites.iter().enumerate() {
            let e = s.correlation_entry_exact(j, m, &q).unwrap();
            assert!((c.entries[(a, b)] - e).norm() < 1e-11, "({j}, {m})");
        }
    }
}

#[test]
fn large_subsystem_spectrum_is_physical() {
    let s = rlm(1.0, 0.0, 2.0, 0.0, 1.0);
    let geom = SubsystemPair::new(50, 100, 0, 200, 0).unwrap();
    let c = s.build_subsystems(&geom, BuildMode::LongRange, &QuadratureSpec::default()).unwrap();
    assert_eq!(c.dim(), 300);
    assert!(c.hermiticity_defect() < 1e-12);
    let spec = c.spectrum().unwrap();
    assert!(spec[0] > -1e-9 && spec[spec.len() - 1] < 1.0 + 1e-9);
}

#[test]
fn mirror_matrix_is_block_toeplitz_in_phi() {
    for s in [rlm(1.0, 1.5, 1.0, -1.5, 1.0), rlm(0.7, 0.5, 0.0, -0.8, 0.0)] {
        let q = quad();
        let geom = SubsystemPair::new(3, 12, 7, 10, 0).unwrap();
        let ell = geom.mirror_overlap_length() as usize;
        assert_eq!(ell, 8);
        let mirror = s.build_mirror(&geom, BuildMode::LongRange, &q).unwrap();
        let toeplitz = s.symbol().toeplitz(ell, &q).unwrap();
        let diff = (&mirror.entries - &toeplitz).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff < 1e-10, "max deviation {diff}");
    }
}

#[test]
fn phi_examples() {
    let s = rlm(1.0, 1.0, 0.3, -0.5, 0.8);
    let k = -0.9;
    let phi = s.block_symbol_phi(k).unwrap();
    let (fl, fr) = s.occupations(k);
    assert!((phi[(0, 0)].re - fl).abs() < 1e-15 && (phi[(1, 1)].re - fr).abs() < 1e-15);
    assert_eq!(phi[(0, 1)], C::new(0.0, 0.0));
    assert!(s.block_symbol_phi(0.0).is_err());

    let clean = rlm(0.0, 1.0, 0.3, -0.5, 0.8);
    let phi = clean.block_symbol_phi(0.9).unwrap();
    let (fl, fr) = clean.occupations(0.9);
    assert!((phi[(0, 0)].re - fr).abs() < 1e-15 && (phi[(1, 1)].re - fl).abs() < 1e-15);
    assert!(phi[(0, 1)].norm() < 1e-15);

    let flat = rlm(1.2, 0.4, 0.5, 0.4, 0.5);
    let phi = flat.block_symbol_phi(1.7).unwrap();
    let (f, _) = flat.occupations(1.7);
    assert!(phi[(0, 1)].norm() < 1e-15);
    assert!((phi[(0, 0)].re - f).abs() < 1e-14 && (phi[(1, 1)].re - f).abs() < 1e-14);
}

#[test]
fn phi_gamma_prefactors() {
    let (a, b) = gamma_prefactors(0.5f64, 2).unwrap();
    assert!((a - C::new(1.0, -1.0)).norm() < 1e-15);
    // 1 + e^{-iπ/2} = 1 - i: both rows carry the same factor at n = 2
    assert!((b - C::new(1.0, -1.0)).norm() < 1e-15);
    for n in [2u32, 4, 6, 8] {
        let half = (n as i64 - 1) as f64 / 2.0;
        let mut g = -half;
        while g <= half {
            let (a, _) = gamma_prefactors(g, n).unwrap();
            assert!(a.norm() > 1e-3);
            g += 1.0;
        }
    }
    assert!(gamma_prefactors(1.0f64, 2).is_err());
    assert!(gamma_prefactors(0.5f64, 3).is_err());
    assert!(gamma_prefactors(1.5f64, 2).is_err());

    let s = rlm(1.0, 1.0, 0.3, -0.5, 0.8);
    let phi = s.block_symbol_phi(0.6).unwrap();
    let pg = s.block_symbol_phi_gamma(0.6, 0.5, 2).unwrap();
    for c in 0..2 {
        assert!((pg[(0, c)] - phi[(0, c)] * a).norm() < 1e-15);
        assert!((pg[(1, c)] - phi[(1, c)] * b).norm() < 1e-15);
    }
    let empty = rlm(1.0, -10.0, 0.0, -10.0, 0.0);
    assert!(empty.block_symbol_phi_gamma(0.6, 0.5, 2).unwrap().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn constant_transmission_model_builds() {
    let params = LatticeParams::default();
    let res = ReservoirPair::new(1.0, 0.0, -1.0, 0.0).unwrap();
    let model = ScatteringModel::constant_transmission(0.5).unwrap();
    let s = SteadyState::new(params, res, model);
    let geom = SubsystemPair::new(0, 6, 0, 6, 0).unwrap();
    let c = s.build_subsystems(&geom, BuildMode::LongRange, &quad()).unwrap();
    let spec = c.spectrum().unwrap();
    assert!(spec[0] > -1e-9 && spec[11] < 1.0 + 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_hermitian_with_reservoir_eigenvalues(
        eps0 in -3.0f64..3.0, mu_l in -1.9f64..1.9, mu_r in -1.9f64..1.9,
        t_l in 0.05f64..3.0, t_r in 0.05f64..3.0, k in 0.01f64..3.13,
    ) {
        let s = rlm(eps0, mu_l, t_l, mu_r, t_r);
        let phi = s.block_symbol_phi(k).unwrap();
        prop_assert!((phi[(0, 1)] - phi[(1, 0)].conj()).norm() < 1e-15);
        let (fl, fr) = s.occupations(k);
        let tr = phi[(0, 0)] + phi[(1, 1)];
        let det = phi[(0, 0)] * phi[(1, 1)] - phi[(0, 1)] * phi[(1, 0)];
        prop_assert!((tr.re - fl - fr).abs() < 1e-13);
        prop_assert!((det.re - fl * fr).abs() < 1e-13);
    }
}
