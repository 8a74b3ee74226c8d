use bhp_core::hp::HpSmoother;
use bhp_core::theory::{
    empirical_shrinkage_error, exponential_shrinkage_check, polynomial_annihilation_error,
    polynomial_residual, residual_power, BasisKind, KlBasis, DEFAULT_INTERIOR,
};
use std::f64::consts::SQRT_2;

const MU: f64 = 1.6e-5;

#[test]
fn basis_sampling() {
    let b = KlBasis {
        k: 1,
        n: 4,
        kind: BasisKind::Cosine,
    }
    .sample();
    let w = std::f64::consts::PI / 2.0;
    for (t, v) in b.iter().enumerate() {
        let r = (t + 1) as f64 / 4.0;
        assert!((v - SQRT_2 * (w * r).cos()).abs() < 1e-15);
    }
}

#[test]
fn shrinkage_grid_below_threshold() {
    let threshold = 0.05 * SQRT_2;
    for kind in [BasisKind::Sine, BasisKind::Cosine] {
        for k in 1..=3 {
            for m in [1, 2, 5] {
                let c = empirical_shrinkage_error(k, 400, MU, m, kind, DEFAULT_INTERIOR).unwrap();
                assert!(
                    c.empirical_sup_error < threshold,
                    "{kind:?} k={k} m={m}: {}",
                    c.empirical_sup_error
                );
                assert!(c.predicted_factor < 1.0 && c.predicted_factor >= 0.0);
            }
        }
    }
}

#[test]
fn shrinkage_error_settles_as_n_doubles() {
    // With λ = μn⁴ the boundary layer occupies a fixed share of the sample,
    // so the interior error approaches a nonzero limit instead of vanishing.
    for k in 1..=3 {
        let a =
            empirical_shrinkage_error(k, 400, MU, 1, BasisKind::Sine, DEFAULT_INTERIOR).unwrap();
        let b =
            empirical_shrinkage_error(k, 800, MU, 1, BasisKind::Sine, DEFAULT_INTERIOR).unwrap();
        let change = (b.empirical_sup_error - a.empirical_sup_error).abs();
        assert!(change < 0.02 * a.empirical_sup_error, "k={k}: {a:?} {b:?}");
    }
}

#[test]
fn constants_are_annihilated_everywhere() {
    let s = HpSmoother::new(200, MU * 200f64.powi(4)).unwrap();
    for m in [1, 2, 5] {
        let r = residual_power(&s, &vec![3.0; 200], m).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
    }
    let c = exponential_shrinkage_check(0.0, 200, MU, 1, 1.0).unwrap();
    assert_eq!(c.predicted_factor, 1.0);
    assert!(c.empirical_sup_error < 1e-12);
}

#[test]
fn exponential_gain_matches_limit() {
    let up = exponential_shrinkage_check(3.0, 400, MU, 1, DEFAULT_INTERIOR).unwrap();
    let down = exponential_shrinkage_check(-3.0, 400, MU, 1, DEFAULT_INTERIOR).unwrap();
    assert_eq!(up.predicted_factor, down.predicted_factor);
    assert!((up.predicted_factor - 1.0 / (MU * 81.0 + 1.0)).abs() < 1e-15);
    assert!(up.empirical_sup_error < 0.05, "{up:?}");
    assert!(down.empirical_sup_error < 0.05, "{down:?}");
}

#[test]
fn low_degree_polynomials_vanish_exactly() {
    for d in [0u32, 1] {
        for m in [1, 3] {
            let r = polynomial_residual(d, 300, 1600.0 * 3f64.powi(4), m).unwrap();
            assert!(r.iter().all(|v| v.abs() < 1e-12), "d={d} m={m}");
        }
    }
}

#[test]
fn cubic_is_removed_in_the_interior() {
    let lambda = 1600.0 * 4f64.powi(4);
    let e = polynomial_annihilation_error(3, 400, lambda, 1, DEFAULT_INTERIOR).unwrap();
    assert!(e < 0.01, "{e}");
}

#[test]
fn second_iteration_removes_higher_degrees() {
    let lambda = 1600.0 * 4f64.powi(4);
    let one = polynomial_annihilation_error(7, 400, lambda, 1, DEFAULT_INTERIOR).unwrap();
    let two = polynomial_annihilation_error(7, 400, lambda, 2, DEFAULT_INTERIOR).unwrap();
    assert!(two < one, "{two} vs {one}");
}

#[test]
fn rejects_bad_interior() {
    assert!(empirical_shrinkage_error(1, 50, MU, 1, BasisKind::Sine, 0.0).is_err());
    assert!(polynomial_annihilation_error(2, 50, 10.0, 1, 1.5).is_err());
}
