use nalgebra::Complex;
use ness_core::asymptotics::*;
use ness_core::correlation::SteadyState;
use ness_core::physics::{LatticeParams, ReservoirPair, ScatteringModel, SubsystemPair};
use ness_core::quadrature::QuadratureSpec;
use proptest::prelude::*;
use std::f64::consts::{LN_2, PI};

fn ctx(eps0: f64, mu_l: f64, t_l: f64, mu_r: f64, t_r: f64) -> BiasContext<f64> {
    let res = ReservoirPair::new(mu_l, t_l, mu_r, t_r).unwrap();
    let state = SteadyState::resonant_level(LatticeParams::default(), res, eps0).unwrap();
    BiasContext::new(state, QuadratureSpec::default().with_tolerance(1e-13))
}

fn ctx_constant(transmission: f64, mu_l: f64, t_l: f64, mu_r: f64, t_r: f64) -> BiasContext<f64> {
    let res = ReservoirPair::new(mu_l, t_l, mu_r, t_r).unwrap();
    let model = ScatteringModel::constant_transmission(transmission).unwrap();
    BiasContext::new(SteadyState::new(LatticeParams::default(), res, model), QuadratureSpec::default())
}

/// Composite Simpson rule on `[a, b]` with `n` (even) panels.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        acc += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

fn rlm_transmission(k: f64, eps0: f64) -> f64 {
    k.sin().powi(2) / (k.sin().powi(2) + (eps0 / 2.0).powi(2))
}

fn densities(c: &BiasContext<f64>) -> [f64; 5] {
    [
        c.mi_asymptotic(1).unwrap().density,
        c.rmi_asymptotic(2.0, 1).unwrap().density,
        c.rmi_asymptotic(0.5, 1).unwrap().density,
        c.prmi_asymptotic(2.0, 1).unwrap().density,
        c.negativity_asymptotic(1).unwrap().density,
    ]
}

#[test]
fn no_bias_no_volume_law() {
    for c in [ctx(1.0, 0.3, 0.7, 0.3, 0.7), ctx(2.5, -1.0, 0.0, -1.0, 0.0)] {
        for d in densities(&c) {
            assert!(d.abs() < 1e-12, "{d}");
        }
    }
}

#[test]
fn trivial_transmission_no_volume_law() {
    for c in [ctx(0.0, 1.0, 0.5, -1.0, 0.2), ctx_constant(0.0, 1.0, 0.5, -1.0, 0.2), ctx_constant(1.0, 1.0, 0.0, -1.0, 0.0)] {
        for d in densities(&c) {
            assert!(d.abs() < 1e-12, "{d}");
        }
    }
}

#[test]
fn zero_temperature_rmi_and_negativity_closed_forms() {
    let eps0 = 1.0;
    let c = ctx(eps0, 1.0, 0.0, -0.6, 0.0);
    let k_minus = (0.6f64 / 2.0).acos();
    let k_plus = (-1.0f64 / 2.0).acos();
    for n in [0.5, 2.0, 3.0] {
        let oracle = simpson(
            |k| {
                let t = rlm_transmission(k, eps0);
                (t.powf(n) + (1.0 - t).powf(n)).ln()
            },
            k_minus,
            k_plus,
            20_000,
        ) / PI
            / (1.0 - n);
        let d = c.rmi_asymptotic(n, 1).unwrap().density;
        assert!((d - oracle).abs() < 1e-10, "n={n}: {d} vs {oracle}");
    }
    let oracle = simpson(
        |k| {
            let t = rlm_transmission(k, eps0);
            (1.0 + 2.0 * (t * (1.0 - t)).sqrt()).ln()
        },
        k_minus,
        k_plus,
        20_000,
    ) / (2.0 * PI);
    let e = c.negativity_asymptotic(1).unwrap().density;
    assert!((e - oracle).abs() < 1e-10, "{e} vs {oracle}");
}

#[test]
fn zero_temperature_proportionalities() {
    let c = ctx(1.0, 1.5, 0.0, -1.5, 0.0);
    let e = c.negativity_asymptotic(1).unwrap().density;
    let i_half = c.rmi_asymptotic(0.5, 1).unwrap().density;
    assert!((e - 0.5 * i_half).abs() < 1e-9);
    let d54 = c.prmi_asymptotic(1.25, 1).unwrap().density;
    assert!((e - 0.5 * d54).abs() < 1e-9);
    // n = 2 pairs with the negative index −1
    for n in [0.5, 0.75, 1.25, 2.0] {
        let d = c.prmi_asymptotic(n, 1).unwrap().density;
        let i = c.rmi_asymptotic(3.0 - 2.0 * n, 1).unwrap().density;
        assert!((d - i).abs() < 1e-9, "n={n}: {d} vs {i}");
    }
}

#[test]
fn replica_limits_reach_mutual_information() {
    // 1/(1−n) magnifies rounding in the integrand by 1e5 near n = 1
    let mut c = ctx(1.0, 0.0, 2.0, 0.0, 1.0);
    c.quad = c.quad.with_tolerance(1e-10);
    let mi = c.mi_asymptotic(1).unwrap().density;
    let d = 1e-5;
    let rmi = 0.5 * (c.rmi_asymptotic(1.0 - d, 1).unwrap().density + c.rmi_asymptotic(1.0 + d, 1).unwrap().density);
    assert!((rmi - mi).abs() < 1e-8);
    let prmi = 0.5 * (c.prmi_asymptotic(1.0 - d, 1).unwrap().density + c.prmi_asymptotic(1.0 + d, 1).unwrap().density);
    assert!((prmi - mi).abs() < 1e-8);
    assert!(c.rmi_asymptotic(1.0, 1).is_err());
    assert!(c.prmi_asymptotic(-1.0, 1).is_err());
    assert!(c.rmi_asymptotic(0.0, 1).is_err());
    assert!(c.rmi_asymptotic(-1.0, 1).is_ok());
}

#[test]
fn interval_entropy_without_scattering_doubles() {
    let c = ctx(0.0, 0.4, 0.9, 0.4, 0.9);
    let single = c.integrate_channel(|ch| entropy_function(ch.f_left, Some(2.0))).unwrap();
    let d = c.interval_entropy_asymptotic(Side::Left, Some(2.0), 10).unwrap();
    assert!((d.density - 2.0 * single).abs() < 1e-13);
    assert!((d.total - 10.0 * d.density).abs() < 1e-12);
    let cold = ctx(1.0, 5.0, 0.0, 5.0, 0.0);
    assert!(cold.interval_entropy_asymptotic(Side::Right, Some(2.0), 10).unwrap().density.abs() < 1e-14);
}

#[test]
fn entropies_recombine_into_mutual_information() {
    let c = ctx(1.0, 1.0, 0.5, -0.5, 1.5);
    for (geom, n) in [
        (SubsystemPair::new(10, 50, 30, 100, 0).unwrap(), Some(2.0)),
        (SubsystemPair::new(0, 70, 0, 40, 0).unwrap(), Some(0.5)),
        (SubsystemPair::new(5, 30, 5, 30, 0).unwrap(), None),
    ] {
        let sl = c.interval_entropy_asymptotic(Side::Left, n, geom.ell_left).unwrap().total;
        let sr = c.interval_entropy_asymptotic(Side::Right, n, geom.ell_right).unwrap().total;
        let sa = c.combined_entropy_asymptotic(&geom, n).unwrap().total;
        let lm = geom.mirror_overlap_length();
        let mi = match n {
            Some(n) => c.rmi_asymptotic(n, lm).unwrap().total,
            None => c.mi_asymptotic(lm).unwrap().total,
        };
        assert!((sl + sr - sa - mi).abs() < 1e-9);

        let mirror = c.mirror_entropy_asymptotic(n, lm).unwrap().total;
        let dl = geom.delta_ell_left() as f64 / geom.ell_left as f64;
        let dr = geom.delta_ell_right() as f64 / geom.ell_right as f64;
        assert!((sa - (dl * sl + dr * sr + mirror)).abs() < 1e-9);
    }
}

#[test]
fn disjoint_mirror_images_add() {
    let c = ctx(1.0, 1.0, 0.5, -0.5, 1.5);
    let geom = SubsystemPair::new(0, 10, 20, 10, 0).unwrap();
    assert_eq!(geom.mirror_overlap_length(), 0);
    let sl = c.interval_entropy_asymptotic(Side::Left, Some(3.0), 10).unwrap().total;
    let sr = c.interval_entropy_asymptotic(Side::Right, Some(3.0), 10).unwrap().total;
    let sa = c.combined_entropy_asymptotic(&geom, Some(3.0)).unwrap().total;
    assert!((sl + sr - sa).abs() < 1e-10);
}

#[test]
fn mirror_entropy_at_infinite_temperature() {
    let c = ctx(1.0, 0.0, 1e12, 0.0, 1e12);
    for n in [0.5, 2.0, 4.0] {
        let d = c.mirror_entropy_asymptotic(Some(n), 1).unwrap().density;
        assert!((d - 2.0 * LN_2).abs() < 1e-9, "n={n}: {d}");
    }
    let cold = ctx(1.0, 3.0, 0.0, 3.0, 0.0);
    assert!(cold.mirror_entropy_asymptotic(Some(2.0), 5).unwrap().total.abs() < 1e-14);
}

#[test]
fn renyi_negativity_without_bias_is_renyi_entropy() {
    let c = ctx(1.3, 0.4, 0.6, 0.4, 0.6);
    let geom = SubsystemPair::new(10, 50, 30, 100, 0).unwrap();
    for n in [2.0, 4.0, 6.0] {
        let e = c.renyi_negativity_asymptotic(&geom, n).unwrap().total;
        let s = c.combined_entropy_asymptotic(&geom, Some(n)).unwrap().total;
        assert!((e - (1.0 - n) * s).abs() < 1e-9, "n={n}");
    }
    assert!(c.renyi_negativity_asymptotic(&geom, 3.0).is_err());
}

#[test]
fn y_one_is_the_negativity_integrand() {
    for (fl, fr, t) in [(0.9f64, 0.2f64, 0.3f64), (0.5, 0.0, 0.7), (1.0, 0.0, 0.5), (0.33, 0.61, 0.05)] {
        let ch = Channel::new(fl, fr, t);
        assert!((y_n(&ch, 1).ln() - negativity_integrand(&ch)).abs() < 1e-14);
    }
}

#[test]
fn x_n_equals_y_n() {
    for (fl, fr, t) in [(0.9f64, 0.2f64, 0.3f64), (0.5, 0.0, 0.7), (0.33, 0.61, 0.05), (0.7, 0.7, 0.4)] {
        for n in [2u32, 4, 6, 8] {
            let x = x_n_complex(fl, fr, Complex::new(t, 0.0), n);
            let y = y_n_complex(fl, fr, Complex::new(t, 0.0), n);
            assert!((x - y).norm() < 1e-13 * y.norm().max(1.0), "n={n}: {x} vs {y}");
            assert!((y_n(&Channel::new(fl, fr, t), n) - y.re).abs() < 1e-14);
        }
    }
}

#[test]
fn swapping_reservoirs_preserves_densities() {
    let a = densities(&ctx(1.0, 1.0, 0.3, -0.4, 1.2));
    let b = densities(&ctx(1.0, -0.4, 1.2, 1.0, 0.3));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-11);
    }
}

#[test]
fn particle_hole_mirror_preserves_densities() {
    let a = densities(&ctx(1.0, 1.0, 0.3, -0.4, 1.2));
    let b = densities(&ctx(-1.0, -1.0, 0.3, 0.4, 1.2));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() < 1e-11);
    }
}

#[test]
fn totals_depend_on_geometry_through_overlap() {
    let c = ctx(1.0, 1.0, 0.5, -0.5, 1.5);
    let g1 = SubsystemPair::new(10, 50, 30, 100, 0).unwrap();
    let g2 = g1.shifted(200).unwrap();
    let kinds = [
        (ness_core::measures::MeasureKind::MutualInformation, None),
        (ness_core::measures::MeasureKind::PetzRenyiMutualInformation, Some(2.0)),
        (ness_core::measures::MeasureKind::Negativity, None),
    ];
    for (kind, n) in kinds {
        let a = c.bipartite(kind, n, &g1).unwrap();
        let b = c.bipartite(kind, n, &g2).unwrap();
        assert_eq!(a.total, b.total);
        assert!((a.total - 30.0 * a.density).abs() < 1e-12);
    }
}

#[test]
fn single_precision_densities() {
    let res = ReservoirPair::<f32>::new(1.5, 1.0, -1.5, 1.0).unwrap();
    let state = SteadyState::resonant_level(LatticeParams::default(), res, 1.0f32).unwrap();
    let c32 = BiasContext::new(state, QuadratureSpec::default().with_tolerance(1e-5));
    let c64 = ctx(1.0, 1.5, 1.0, -1.5, 1.0);
    let a = c32.mi_asymptotic(1).unwrap().density as f64;
    let b = c64.mi_asymptotic(1).unwrap().density;
    assert!((a - b).abs() < 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn biased_reflecting_impurity_gives_positive_densities(
        eps0 in 0.3f64..3.0, mu_l in -1.5f64..1.5, dmu in 0.3f64..1.5, t in 0.05f64..1.0,
    ) {
        let c = ctx(eps0, mu_l, t, mu_l - dmu, t);
        for d in densities(&c) {
            prop_assert!(d > 0.0, "{:?}", densities(&c));
        }
    }
}
