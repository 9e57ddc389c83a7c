//! Kernel-level checks against independent dense matrix-function oracles.

use lejastep::jacobian::spectrum_to_leja;
use lejastep::leja::{
    default_leja_nodes, real_leja_exp, real_leja_phi, real_leja_phi_nl, InterpConfig,
};
use lejastep::vecops;
use lejastep::{rhs_from_fn, FnRhs};
use lejastep_testkit::{expm, phi_action, random_sym_neg_def};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::atomic::{AtomicUsize, Ordering};

fn dense_rhs(a: DMatrix<f64>) -> FnRhs<impl Fn(&[f64], &mut [f64])> {
    let n = a.nrows();
    rhs_from_fn(n, move |x, out| {
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    })
}

fn rel_diff_scaled(got: &[f64], want: &[f64]) -> f64 {
    let mut diff = got.to_vec();
    vecops::axpby(-1.0, want, 1.0, &mut diff).unwrap();
    vecops::l2norm_scaled(&diff).unwrap() / vecops::l2norm_scaled(want).unwrap().max(1e-300)
}

#[test]
fn phi_matches_oracle_deep_into_the_stiff_range() {
    for l in 0..=4usize {
        for &z in &[-50.0, -200.0, -35.0] {
            let got = lejastep::phi::phi(l, z).unwrap();
            let want = lejastep_testkit::phi_oracle(l, z);
            assert!(
                (got - want).abs() <= 1e-13 * want.abs(),
                "phi({l}, {z}): {got} vs {want}"
            );
        }
    }
}

#[test]
fn exp_matches_dense_oracle_on_symmetric_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let n = 64;
    let (a, dominant) = random_sym_neg_def(&mut rng, n, 40.0);
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dt = 0.05;

    let spectrum = spectrum_to_leja(dominant).unwrap();
    let cfg = InterpConfig::new(&spectrum, dt, 1e-12, 1e-16);
    let rhs = dense_rhs(a.clone());
    let res = real_leja_exp(&rhs, &u, &cfg, default_leja_nodes()).unwrap();

    let want = expm(&(a * dt)) * DVector::from_column_slice(&u);
    assert!(res.iters > 0);
    let rel = rel_diff_scaled(&res.polynomial, want.as_slice());
    assert!(rel <= 1e-9, "relative error {rel}");
}

#[test]
fn phi_nl_matches_augmented_matrix_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let n = 48;
    let (a, dominant) = random_sym_neg_def(&mut rng, n, 25.0);
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let dt = 0.08;

    let spectrum = spectrum_to_leja(dominant).unwrap();
    let cfg = InterpConfig::new(&spectrum, dt, 1e-12, 1e-16);
    let rhs = dense_rhs(a.clone());
    for l in [1usize, 2, 3] {
        let res = real_leja_phi_nl(&rhs, &v, l, &cfg, default_leja_nodes()).unwrap();
        let want = phi_action(&(a.clone() * dt), &DVector::from_column_slice(&v), l);
        let rel = rel_diff_scaled(&res.polynomial, want.as_slice());
        assert!(rel <= 1e-8, "l={l}: relative error {rel}");
    }
}

#[test]
fn vertical_phi_matches_oracle_through_fd_jacobian() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let n = 32;
    let (a, dominant) = random_sym_neg_def(&mut rng, n, 20.0);
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dt = 0.1;

    let spectrum = spectrum_to_leja(dominant).unwrap();
    let cfg = InterpConfig::new(&spectrum, dt, 1e-12, 1e-16);
    let rhs = dense_rhs(a.clone());
    let coeffs = [0.5, 1.0];
    let (polys, _) = real_leja_phi(&rhs, &u, &v, &coeffs, 1, &cfg, default_leja_nodes()).unwrap();
    for (k, &ck) in coeffs.iter().enumerate() {
        let want = phi_action(&(a.clone() * (ck * dt)), &DVector::from_column_slice(&v), 1);
        let rel = rel_diff_scaled(&polys[k], want.as_slice());
        assert!(rel <= 1e-8, "coeff {ck}: relative error {rel}");
    }
}

#[test]
fn vertical_equals_separate_single_coefficient_calls() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 32;
    let (a, dominant) = random_sym_neg_def(&mut rng, n, 15.0);
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let dt = 0.07;
    let spectrum = spectrum_to_leja(dominant).unwrap();
    let cfg = InterpConfig::new(&spectrum, dt, 1e-11, 1e-15);
    let rhs = dense_rhs(a);
    let coeffs = [0.25, 0.5, 1.0];

    let (vertical, shared_iters) =
        real_leja_phi(&rhs, &u, &v, &coeffs, 2, &cfg, default_leja_nodes()).unwrap();

    let mut separate_iters = 0;
    for (k, &ck) in coeffs.iter().enumerate() {
        let (single, iters) =
            real_leja_phi(&rhs, &u, &v, &[ck], 2, &cfg, default_leja_nodes()).unwrap();
        separate_iters += iters;
        let rel = rel_diff_scaled(&vertical[k], &single[0]);
        assert!(rel <= 1e-11, "coeff {ck}: relative gap {rel}");
    }
    // the shared recurrence runs to the slowest coefficient, never longer
    // than the sum of the separate runs
    assert!(
        shared_iters <= separate_iters,
        "{shared_iters} vs {separate_iters}"
    );
}

#[test]
fn phi_with_dt_zero_returns_scaled_input_quickly() {
    let n = 16;
    let rhs = rhs_from_fn(n, |x, out| {
        for i in 0..n {
            out[i] = -2.0 * x[i];
        }
    });
    let u = vec![1.0; n];
    let v: Vec<f64> = (0..n).map(|i| i as f64 - 8.0).collect();
    let spectrum = spectrum_to_leja(2.0).unwrap();
    let cfg = InterpConfig::new(&spectrum, 0.0, 1e-12, 1e-16);
    for l in 0..=4usize {
        let (polys, iters) =
            real_leja_phi(&rhs, &u, &v, &[1.0], l, &cfg, default_leja_nodes()).unwrap();
        let fact: f64 = (1..=l).product::<usize>() as f64;
        assert!(iters <= 2, "l={l}: {iters}");
        for i in 0..n {
            assert!((polys[0][i] - v[i] / fact).abs() <= 1e-15 * v[i].abs().max(1.0));
        }
    }
}

#[test]
fn accepted_polynomial_is_stable_beyond_the_stopping_point() {
    // tightening rtol by 16x must not move the accepted polynomial by more
    // than ~10 rtol relative: the residual genuinely bounds the tail
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let n = 40;
    let (a, dominant) = random_sym_neg_def(&mut rng, n, 30.0);
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let rhs = dense_rhs(a);
    let spectrum = spectrum_to_leja(dominant).unwrap();
    let rtol = 1e-8;
    let loose = InterpConfig::new(&spectrum, 0.15, rtol, 0.0);
    let tight = InterpConfig::new(&spectrum, 0.15, rtol / 16.0, 0.0);
    let p_loose = real_leja_exp(&rhs, &u, &loose, default_leja_nodes()).unwrap();
    let p_tight = real_leja_exp(&rhs, &u, &tight, default_leja_nodes()).unwrap();
    let rel = rel_diff_scaled(&p_loose.polynomial, &p_tight.polynomial);
    assert!(rel <= 10.0 * rtol, "tail {rel}");
    assert!(p_tight.iters >= p_loose.iters);
}

#[test]
fn iters_counts_operator_applications() {
    let n = 24;
    let calls = AtomicUsize::new(0);
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let (a, dominant) = random_sym_neg_def(&mut rng, n, 12.0);
    let u: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let counting = rhs_from_fn(n, |x, out: &mut [f64]| {
        calls.fetch_add(1, Ordering::Relaxed);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                acc += a[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    });
    let spectrum = spectrum_to_leja(dominant).unwrap();
    let cfg = InterpConfig::new(&spectrum, 0.1, 1e-10, 1e-14);

    // direct linear kernel: exactly one rhs call per recurrence step
    let res = real_leja_exp(&counting, &u, &cfg, default_leja_nodes()).unwrap();
    assert_eq!(calls.load(Ordering::Relaxed), res.iters);

    // jacobian kernel: one per step plus the single f(u) base evaluation
    calls.store(0, Ordering::Relaxed);
    let (_, iters) =
        real_leja_phi(&counting, &u, &u, &[1.0], 1, &cfg, default_leja_nodes()).unwrap();
    assert_eq!(calls.load(Ordering::Relaxed), iters + 1);
}
