//! Banded and spectral computations against dense nalgebra reconstructions.

use bhp_core::ar::{ar_fit, ar_trend_cycle, ArSpec};
use bhp_core::boosting::{boosted_hp, boosted_hp_bic, ic_path, BoostConfig, Stopping};
use bhp_core::hp::{hp_smooth, HpSmoother};
use bhp_core::penalty::build_penalty_operator;
use bhp_core::rng::SimRng;
use bhp_core::spectrum::{smoother_traces, PenaltySpectrum};
use bhp_core::theory::residual_power;
use nalgebra::{DMatrix, DVector};

fn second_difference_map(n: usize) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(n - 2, n);
    for i in 0..n - 2 {
        d[(i, i)] = 1.0;
        d[(i, i + 1)] = -2.0;
        d[(i, i + 2)] = 1.0;
    }
    d
}

fn dense_penalty(n: usize) -> DMatrix<f64> {
    let d = second_difference_map(n);
    d.transpose() * d
}

fn dense_smoother(n: usize, lambda: f64) -> DMatrix<f64> {
    let a = DMatrix::identity(n, n) + dense_penalty(n) * lambda;
    a.try_inverse().unwrap()
}

fn dense_residual_power(n: usize, lambda: f64, m: usize) -> DMatrix<f64> {
    let r = DMatrix::identity(n, n) - dense_smoother(n, lambda);
    let mut p = DMatrix::identity(n, n);
    for _ in 0..m {
        p = &r * p;
    }
    p
}

fn dense_ic(y: &[f64], lambda: f64, m: usize) -> f64 {
    let n = y.len();
    let yv = DVector::from_column_slice(y);
    let c1 = dense_residual_power(n, lambda, 1) * &yv;
    let cm = dense_residual_power(n, lambda, m) * &yv;
    let s = dense_smoother(n, lambda);
    let tr_res = n as f64 - s.trace();
    let tr_b = n as f64 - dense_residual_power(n, lambda, m).trace();
    cm.norm_squared() / c1.norm_squared() + (n as f64).ln() * tr_b / tr_res
}

fn rel_close(a: &[f64], b: &[f64], tol: f64) {
    let scale = b.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
    for (i, (x, y)) in a.iter().zip(b).enumerate() {
        assert!(
            (x - y).abs() <= tol * scale,
            "index {i}: {x} vs {y} (scale {scale})"
        );
    }
}

fn normal_draws(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = SimRng::new(seed);
    (0..n).map(|_| rng.standard_normal()).collect()
}

fn random_walk(n: usize, seed: u64) -> Vec<f64> {
    let mut acc = 0.0;
    normal_draws(n, seed)
        .into_iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

#[test]
fn penalty_rows_match_dense_product() {
    for n in [5, 6, 11, 30] {
        let op = build_penalty_operator(n).unwrap();
        let dense = dense_penalty(n);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(op.get(i, j), dense[(i, j)], "n={n} ({i},{j})");
            }
        }
        assert_eq!(op.trace(), dense.trace());
    }
}

#[test]
fn five_point_example_matches_dense_inverse() {
    let y = [1.0, -1.0, 2.0, -2.0, 3.0];
    let want = dense_smoother(5, 1.0) * DVector::from_column_slice(&y);
    let got = hp_smooth(&y, 1.0).unwrap();
    rel_close(&got.trend, want.as_slice(), 1e-12);
}

#[test]
fn smoother_application_matches_dense_solve() {
    let v = normal_draws(6, 17);
    let s = HpSmoother::new(6, 2.0).unwrap();
    let want = dense_smoother(6, 2.0) * DVector::from_column_slice(&v);
    rel_close(&s.apply(&v).unwrap(), want.as_slice(), 1e-12);
}

#[test]
fn banded_solution_matches_dense_for_random_inputs() {
    for n in [5, 10, 30, 60] {
        for (k, lambda) in [0.5, 1600.0, 129600.0].into_iter().enumerate() {
            let y = random_walk(n, 100 + n as u64 + k as u64);
            let want = dense_smoother(n, lambda) * DVector::from_column_slice(&y);
            let got = hp_smooth(&y, lambda).unwrap();
            rel_close(&got.trend, want.as_slice(), 1e-9);
        }
    }
}

#[test]
fn residual_powers_match_dense() {
    for n in [5, 10, 30, 60] {
        let y = random_walk(n, 7 * n as u64);
        let yv = DVector::from_column_slice(&y);
        for m in [1, 2, 3, 7, 20] {
            let want = dense_residual_power(n, 1600.0, m) * &yv;
            let got = boosted_hp(&y, 1600.0, m).unwrap();
            rel_close(&got.cycle, want.as_slice(), 1e-9);
            let composed = residual_power(&HpSmoother::new(n, 1600.0).unwrap(), &y, m).unwrap();
            rel_close(&composed, want.as_slice(), 1e-9);
        }
    }
}

#[test]
fn seven_iterations_at_length_thirty() {
    let y = normal_draws(30, 2024);
    let yv = DVector::from_column_slice(&y);
    let b7 = DMatrix::identity(30, 30) - dense_residual_power(30, 1600.0, 7);
    let want = b7 * yv;
    rel_close(
        &boosted_hp(&y, 1600.0, 7).unwrap().trend,
        want.as_slice(),
        1e-9,
    );
}

#[test]
fn ic_path_matches_dense_for_small_lengths() {
    for n in [5, 10, 30, 60] {
        let y = random_walk(n, 31 + n as u64);
        let path = ic_path(&y, 1600.0, 12).unwrap();
        for m in 1..=12 {
            let want = dense_ic(&y, 1600.0, m);
            assert!(
                (path.value(m) - want).abs() <= 1e-9 * want.abs(),
                "n={n} m={m}: {} vs {want}",
                path.value(m)
            );
        }
    }
}

#[test]
fn ic_path_matches_dense_on_random_walk_fifty() {
    let y = random_walk(50, 50);
    let path = ic_path(&y, 1600.0, 20).unwrap();
    for m in 1..=20 {
        let want = dense_ic(&y, 1600.0, m);
        assert!((path.value(m) - want).abs() <= 1e-8 * want.abs(), "m={m}");
    }
}

#[test]
fn bic_stopping_matches_dense_argmin() {
    let y = random_walk(100, 100);
    let m_max = 60;
    let dense: Vec<f64> = (1..=m_max).map(|m| dense_ic(&y, 1600.0, m)).collect();
    let mut want = 1;
    for m in 2..=m_max {
        if dense[m - 1] < dense[want - 1] {
            want = m;
        }
    }
    let cfg = BoostConfig::custom(1600.0)
        .with_m_max(m_max)
        .with_stopping(Stopping::Bic);
    let r = boosted_hp_bic(&y, &cfg).unwrap();
    assert_eq!(r.iterations, want);
    let b = DMatrix::identity(100, 100) - dense_residual_power(100, 1600.0, want);
    let trend = b * DVector::from_column_slice(&y);
    rel_close(&r.trend, trend.as_slice(), 1e-9);
}

#[test]
fn spectrum_matches_dense_eigenvalues() {
    for n in [5, 12, 40] {
        let spectrum = PenaltySpectrum::new(n).unwrap();
        let mut dense: Vec<f64> = dense_penalty(n)
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        dense.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in spectrum.eigenvalues().iter().zip(&dense) {
            assert!((a - b).abs() < 1e-9 * dense[n - 1], "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn smoother_trace_matches_dense_diagonal() {
    let spectrum = PenaltySpectrum::new(30).unwrap();
    for lambda in [1.0, 1600.0] {
        let want = dense_smoother(30, lambda).trace();
        assert!((spectrum.trace_smoother(lambda) - want).abs() < 1e-8);
    }
}

#[test]
fn boosted_traces_match_dense_matrix_power() {
    let spectrum = PenaltySpectrum::new(20).unwrap();
    let traces = smoother_traces(&spectrum, 1600.0, 5).unwrap();
    let want = 20.0 - dense_residual_power(20, 1600.0, 5).trace();
    assert!((traces[4].tr_boosted - want).abs() < 1e-8);
    let res = 20.0 - dense_smoother(20, 1600.0).trace();
    assert!((traces[4].tr_residual - res).abs() < 1e-8);
}

#[test]
fn dense_smoother_is_symmetric_with_unit_bounded_spectrum() {
    for n in [5, 20, 50] {
        let s = dense_smoother(n, 1600.0);
        assert!((&s - s.transpose()).amax() < 1e-12);
        let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!(ev.iter().all(|&e| e > 0.0 && e <= 1.0 + 1e-12));
        assert!((ev[0] - 1.0).abs() < 1e-10 && (ev[1] - 1.0).abs() < 1e-10);
        assert!(ev[2] < 1.0 - 1e-6);
    }
}

#[test]
fn huge_lambda_converges_to_ols_line() {
    let y = random_walk(40, 4);
    let t: Vec<f64> = (1..=40).map(|t| t as f64).collect();
    let x = DMatrix::from_fn(40, 2, |i, j| if j == 0 { 1.0 } else { t[i] });
    let beta = (x.transpose() * &x).try_inverse().unwrap()
        * x.transpose()
        * DVector::from_column_slice(&y);
    let line: Vec<f64> = t.iter().map(|t| beta[0] + beta[1] * t).collect();
    let trend = hp_smooth(&y, 1e12).unwrap().trend;
    rel_close(&trend, &line, 1e-4);
}

fn dense_ols(y: &[f64], p: usize) -> (Vec<f64>, DMatrix<f64>) {
    let rows = y.len() - p;
    let x = DMatrix::from_fn(rows, p + 1, |i, j| if j == 0 { 1.0 } else { y[p + i - j] });
    let target = DVector::from_fn(rows, |i, _| y[p + i]);
    let beta = (x.transpose() * &x).try_inverse().unwrap() * x.transpose() * target;
    (beta.iter().copied().collect(), x)
}

#[test]
fn ar_coefficients_match_normal_equations() {
    let y = [
        0.3, 1.1, 0.4, -0.7, 0.9, 1.8, 0.2, -0.5, 0.6, 1.4, -0.2, 0.8,
    ];
    let (beta, _) = dense_ols(&y, 2);
    let fit = ar_fit(&y, &ArSpec::one_step(2)).unwrap();
    assert!((fit.intercept - beta[0]).abs() < 1e-10);
    for j in 0..2 {
        assert!((fit.slopes[j] - beta[j + 1]).abs() < 1e-10);
    }
}

#[test]
fn ar_trend_matches_dense_ols_on_random_walk() {
    let y = random_walk(100, 9);
    let truth: Vec<f64> = y.iter().map(|v| v * 0.9).collect();
    let (beta, x) = dense_ols(&y, 4);
    let fitted = &x * DVector::from_column_slice(&beta);
    let r = ar_trend_cycle(&y, &ArSpec::one_step(4)).unwrap();
    assert!(r.trend[..4].iter().all(|v| v.is_nan()));
    rel_close(&r.trend[4..], fitted.as_slice(), 1e-9);
    let mse = |f: &[f64]| -> f64 { (4..96).map(|i| (f[i] - truth[i]).powi(2)).sum::<f64>() / 92.0 };
    let mut dense_trend = vec![f64::NAN; 4];
    dense_trend.extend_from_slice(fitted.as_slice());
    let got = bhp_core::metrics::trend_mse(&r.trend, &truth).unwrap();
    assert!((got - mse(&dense_trend)).abs() < 1e-9 * got);
}

#[test]
fn ar_residuals_are_orthogonal_to_regressors() {
    let y = random_walk(80, 12);
    let r = ar_trend_cycle(&y, &ArSpec::one_step(4)).unwrap();
    let e = &r.cycle[4..];
    assert!(e.iter().sum::<f64>().abs() < 1e-8 * y.iter().map(|v| v.abs()).sum::<f64>());
    for lag in 1..=4 {
        let dot: f64 = e.iter().enumerate().map(|(i, v)| v * y[4 + i - lag]).sum();
        let scale: f64 = e.iter().map(|v| v * v).sum::<f64>().sqrt()
            * (0..e.len())
                .map(|i| y[4 + i - lag].powi(2))
                .sum::<f64>()
                .sqrt();
        assert!(dot.abs() < 1e-8 * scale, "lag {lag}");
    }
}
