use proptest::prelude::*;

use fracsys::constants::{
    coercivity_lhs, convexity_radius, ratio_formula, sobolev_quotient, vector_quotient, verify_strictness,
};
use fracsys::energy::{energy, EnergyVariant};
use fracsys::field::{coupling_integral, read_field, write_field, Field, FieldFormat};
use fracsys::forcing::{gaussian, make_forcing};
use fracsys::spectral::{hs_seminorm, regime_energy};
use fracsys::{make_grid, QuotientSpec, Regime, SystemParams};

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_files_round_trip(v in values(16), l in 0.1..100.0f64) {
        let grid = make_grid(1, 16, l).unwrap();
        let u = Field::new(grid, v).unwrap();
        for format in [FieldFormat::Csv, FieldFormat::Binary] {
            let mut buf = Vec::new();
            write_field(&u, format, &mut buf).unwrap();
            let back = read_field(format, buf.as_slice()).unwrap();
            prop_assert_eq!(back.values(), u.values());
            prop_assert_eq!(back.grid().box_length(), l);
        }
    }

    #[test]
    fn quotient_is_scale_invariant(v in values(32), t in prop_oneof![-50.0..-0.01f64, 0.01..50.0f64]) {
        let grid = make_grid(1, 32, 10.0).unwrap();
        let u = Field::new(grid, v).unwrap();
        prop_assume!(!u.is_zero());
        let spec = QuotientSpec::new(1, 0.25, 1.5, 1.5, Regime::Subcritical).unwrap();
        let q = sobolev_quotient(&u, spec).unwrap();
        let qt = sobolev_quotient(&u.scaled(t), spec).unwrap();
        prop_assert!((qt / q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vector_quotient_is_scale_invariant(a in values(32), b in values(32), t in 0.01..50.0f64) {
        let grid = make_grid(1, 32, 10.0).unwrap();
        let u = Field::new(grid.clone(), a).unwrap();
        let v = Field::new(grid, b).unwrap();
        let spec = QuotientSpec::new(1, 0.25, 2.5, 1.5, Regime::Subcritical).unwrap();
        prop_assume!(coupling_integral(&u, &v, 2.5, 1.5, false).unwrap() > 0.0);
        let q = vector_quotient(&u, &v, spec).unwrap();
        let qt = vector_quotient(&u.scaled(t), &v.scaled(t), spec).unwrap();
        prop_assert!((qt / q - 1.0).abs() < 1e-12);
    }

    #[test]
    fn closed_forms_are_swap_symmetric(alpha in 1.01..5.0f64, beta in 1.01..5.0f64) {
        prop_assert!((ratio_formula(alpha, beta) - ratio_formula(beta, alpha)).abs() < 1e-13);
        prop_assert!(verify_strictness(alpha, beta) > 0.0);
        let p = alpha + beta;
        let a = coercivity_lhs(alpha, beta, p, 1.0, ratio_formula(alpha, beta)).unwrap();
        let b = coercivity_lhs(beta, alpha, p, 1.0, ratio_formula(beta, alpha)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a);
        prop_assert!(a > 2.0);
    }

    #[test]
    fn radius_is_swap_symmetric(alpha in 1.05..2.9f64, s_scalar in 0.1..10.0f64) {
        let beta = 4.0 - alpha;
        let p = SystemParams::new(1, 0.25, alpha, beta, Regime::Critical).unwrap();
        let r = convexity_radius(&p, s_scalar);
        let rs = convexity_radius(&p.swapped(), s_scalar);
        prop_assert!((r - rs).abs() <= 1e-13 * r);
    }

    #[test]
    fn coupling_is_symmetric_under_exchange(a in values(16), b in values(16), alpha in 1.0..3.0f64, beta in 1.0..3.0f64) {
        let grid = make_grid(1, 16, 4.0).unwrap();
        let u = Field::new(grid.clone(), a).unwrap();
        let v = Field::new(grid, b).unwrap();
        for pos in [false, true] {
            let x = coupling_integral(&u, &v, alpha, beta, pos).unwrap();
            let y = coupling_integral(&v, &u, beta, alpha, pos).unwrap();
            prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            prop_assert!(x >= 0.0);
        }
    }

    #[test]
    fn seminorm_is_shift_invariant_and_homogeneous(v in values(32), shift in 0usize..32, t in -10.0..10.0f64) {
        let grid = make_grid(1, 32, 7.0).unwrap();
        let u = Field::new(grid.clone(), v.clone()).unwrap();
        let mut rolled = v;
        rolled.rotate_left(shift);
        let r = Field::new(grid, rolled).unwrap();
        let a = hs_seminorm(&u, 0.35).unwrap();
        prop_assert!((hs_seminorm(&r, 0.35).unwrap() - a).abs() <= 1e-10 * a.max(1.0));
        prop_assert!((hs_seminorm(&u.scaled(t), 0.35).unwrap() - t.abs() * a).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn energy_total_is_the_sum_of_terms(a in values(32), b in values(32), amp in 0.01..2.0f64) {
        let grid = make_grid(1, 32, 10.0).unwrap();
        let u = Field::new(grid.clone(), a).unwrap().scaled(1e-3);
        let v = Field::new(grid.clone(), b).unwrap().scaled(1e-3);
        let params = SystemParams::new(1, 0.25, 2.0, 1.5, Regime::Subcritical).unwrap();
        let f = make_forcing(gaussian(&grid, &[0.0], 1.0, amp).unwrap(), 0.25).unwrap();
        for variant in [EnergyVariant::Absolute, EnergyVariant::PositivePart] {
            let e = energy(&u, &v, &f, &f, &params, variant).unwrap();
            prop_assert!((e.total - (e.quadratic - e.coupling - e.forcing)).abs() <= 1e-12);
            let q = 0.5 * (regime_energy(&u, 0.25, Regime::Subcritical).unwrap()
                + regime_energy(&v, 0.25, Regime::Subcritical).unwrap());
            prop_assert!((e.quadratic - q).abs() <= 1e-12 * q.max(1.0));
        }
    }
}
