use adiabatic_dicke::eigensolver::{solve_ground_auto, QuarticConstants};
use adiabatic_dicke::model::{
    adiabatic_amplitudes, effective_potential, theta, thermo_limit, DimensionlessParams,
    EffectivePotential, Potential, QuarticPotential,
};
use adiabatic_dicke::observables::full_observables;
use adiabatic_dicke::scaling::{finite_size_prediction, shifted_energy_via_scaling, Observable};
use proptest::prelude::*;

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn potential_is_even(alpha in 0.0..3.0f64, d in 0.1..100.0f64, n in 1u64..100_000, q in -1e3..1e3f64) {
        let p = DimensionlessParams::from_alpha(alpha, d, n).unwrap();
        prop_assert_eq!(effective_potential(q, &p, n), effective_potential(-q, &p, n));
        let v = EffectivePotential::new(&p);
        prop_assert_eq!(v.shifted(q), v.shifted(-q));
    }

    #[test]
    fn level_spacing_bounded_below(alpha in 0.0..3.0f64, d in 0.1..100.0f64, n in 1u64..100_000, q in -1e3..1e3f64) {
        let p = DimensionlessParams::from_alpha(alpha, d, n).unwrap();
        prop_assert!(theta(q, &p, n) >= d);
    }

    #[test]
    fn amplitudes_normalised(alpha in 0.0..3.0f64, d in 0.1..100.0f64, n in 1u64..100_000, q in -1e4..1e4f64) {
        let p = DimensionlessParams::from_alpha(alpha, d, n).unwrap();
        let (plus, minus) = adiabatic_amplitudes(q, &p, n);
        prop_assert!(close(plus * plus + minus * minus, 2.0, 1e-14));
        prop_assert!(plus >= 0.0 && minus >= 0.0);
    }

    #[test]
    fn shifted_potential_matches_direct_form(alpha in 0.0..3.0f64, d in 0.5..50.0f64, n in 1u64..1000, q in -30.0..30.0f64) {
        let p = DimensionlessParams::from_alpha(alpha, d, n).unwrap();
        let v = EffectivePotential::new(&p);
        let direct = effective_potential(q, &p, n);
        prop_assert!((v.value(q) - direct).abs() <= 1e-12 * (p.nd + q * q));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn observables_depend_on_alpha_and_nd_only(alpha in 0.0..2.0f64, k in 1u32..12) {
        // ND = 2^k·20 split two ways, both exact in binary
        let nd = 20.0 * f64::from(1u32 << k);
        let (n1, n2) = (4u64, 64u64);
        let a = full_observables(&DimensionlessParams::from_alpha(alpha, nd / n1 as f64, n1).unwrap(), n1, TOL).unwrap();
        let b = full_observables(&DimensionlessParams::from_alpha(alpha, nd / n2 as f64, n2).unwrap(), n2, TOL).unwrap();
        for (x, y) in [
            (a.e0_shifted, b.e0_shifted),
            (a.e0_reduced, b.e0_reduced),
            (a.sx_per_n, b.sx_per_n),
            (a.q2, b.q2),
            (a.q4, b.q4),
            (a.p2, b.p2),
            (a.phi.minus_one, b.phi.minus_one),
            (a.phi.plus_half, b.phi.plus_half),
        ] {
            prop_assert!(close(x, y, 1e-12), "{} vs {}", x, y);
        }
    }

    #[test]
    fn symanzik_map_reproduces_quartic_problem(alpha in 0.3..1.7f64, log_nd in 2.0..6.0f64) {
        let nd = 10f64.powf(log_nd);
        let p = DimensionlessParams::from_alpha(alpha, nd, 1).unwrap();
        let direct = solve_ground_auto(&QuarticPotential::new(&p), TOL).unwrap();
        let scaled = shifted_energy_via_scaling(alpha, nd, TOL).unwrap();
        prop_assert!(close(direct.shifted_energy, scaled, 1e-7), "{} vs {}", direct.shifted_energy, scaled);
    }

    #[test]
    fn spin_identities_hold(alpha in 0.0..2.5f64, n in 1u64..5000) {
        let p = DimensionlessParams::from_alpha(alpha, 10.0, n).unwrap();
        let o = full_observables(&p, n, TOL).unwrap();
        let inv = 1.0 / n as f64;
        prop_assert!(close(o.sx2_per_n2 + o.sy2_per_n2 + o.sz2_per_n2, 1.0 + 2.0 * inv, 1e-12));
        prop_assert!(close(o.sy2_per_n2, inv, 1e-15));
        prop_assert!(o.sx_per_n <= 0.0 && o.sx_per_n >= -1.0);
        prop_assert!(o.sx_per_n * o.sx_per_n <= o.sx2_per_n2 + 1e-12);
    }

    #[test]
    fn large_n_approaches_thermodynamic_limit(alpha in prop_oneof![0.0..0.8f64, 1.3..3.0f64]) {
        let n = 1u64 << 16;
        let p = DimensionlessParams::from_alpha(alpha, 10.0, n).unwrap();
        let o = full_observables(&p, n, TOL).unwrap();
        let th = thermo_limit(alpha, 10.0);
        prop_assert!((o.sx_per_n - th.sx_per_n).abs() < 1e-3, "{} vs {}", o.sx_per_n, th.sx_per_n);
        prop_assert!(close(o.e0_reduced / n as f64, th.e0_per_n, 1e-4));
    }
}

#[test]
fn critical_predictions_converge() {
    let c = QuarticConstants {
        beta0: 1.0603620904841828,
        beta1: 0.362022648788677,
        k_const: 0.45905150070646955,
        beta0_error: 0.0,
        beta1_error: 0.0,
        k_error: 0.0,
    };
    let n = 1u64 << 18;
    let p = DimensionlessParams::from_alpha(1.0, 10.0, n).unwrap();
    let o = full_observables(&p, n, TOL).unwrap();
    let q2 = finite_size_prediction(Observable::Q2, n, 10.0, &c);
    let sx = finite_size_prediction(Observable::SxPerN, n, 10.0, &c);
    assert!(close(o.q2, q2, 5e-3), "{} vs {q2}", o.q2);
    assert!((1.0 + o.sx_per_n) / (1.0 + sx) - 1.0 < 5e-3);
}
