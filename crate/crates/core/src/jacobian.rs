//! Matrix-free Jacobian action, nonlinear remainders, and power-iteration
//! spectrum estimation.
//!
//! The Jacobian of `f` at `u` is never formed; its action on `v` is the
//! forward difference `(f(u + eps v) - f(u)) / eps` with
//! `eps = sqrt(machine eps) * max(||u||, 1) / max(||v||, tiny)` (scaled l2
//! norms). The dominant eigenvalue magnitude of `J(u)` feeds the
//! shift/scale recipe that places the spectrum inside the Leja
//! interpolation interval.

use crate::error::{Error, Result};
use crate::vecops;
use crate::RhsOperator;

const TINY: f64 = f64::MIN_POSITIVE;

/// Iteration cap for the power method.
const POWER_MAX_ITERS: usize = 1000;

/// Relative-change stopping threshold for the power method. Tight enough
/// that the clustered top of a discrete-Laplacian spectrum (where the
/// estimate crawls upward like `L - c/k`) still lands within 2% of the true
/// dominant magnitude.
const POWER_REL_CHANGE: f64 = 2e-4;

/// Shift and scale derived from the dominant eigenvalue: the scaled
/// interval `[c - 2 gamma, c + 2 gamma]` maps onto `[eigenvalue, 0]`,
/// enclosing a negative-real spectrum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEstimate {
    /// Most dominant eigenvalue, made negative real (includes the 1.05
    /// safety factor).
    pub eigenvalue: f64,
    /// Shift: `eigenvalue / 2`.
    pub c: f64,
    /// Scale: `-eigenvalue / 4`.
    pub gamma: f64,
}

/// Applies the safety factor and the shift/scale recipe to a dominant
/// eigenvalue magnitude: `eigenvalue = -1.05 * magnitude`, `c = eigenvalue/2`,
/// `gamma = -eigenvalue/4`.
pub fn spectrum_to_leja(dominant_magnitude: f64) -> Result<SpectrumEstimate> {
    if dominant_magnitude.is_nan() || dominant_magnitude < 0.0 {
        return Err(Error::NegativeMagnitude(dominant_magnitude));
    }
    let eigenvalue = -1.05 * dominant_magnitude;
    Ok(SpectrumEstimate {
        eigenvalue,
        c: eigenvalue / 2.0,
        gamma: -eigenvalue / 4.0,
    })
}

/// Outcome of the power method. `converged == false` means the iteration
/// cap was hit and `magnitude` carries the best estimate; the caller's
/// 1.05 safety factor absorbs the slack, so this is a warning, not an
/// error.
#[derive(Clone, Copy, Debug)]
pub struct PowerIterationResult {
    pub magnitude: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// shared forward-difference increment rule
fn fd_eps(unorm: f64, vnorm: f64) -> f64 {
    f64::EPSILON.sqrt() * unorm.max(1.0) / vnorm.max(TINY)
}

/// `out = J(u) v` given the precomputed `f0 = f(u)` and `||u||`; `w` is the
/// perturbed-state buffer. `out` also serves as the rhs output.
pub(crate) fn jac_vec_with(
    rhs: &impl RhsOperator,
    u: &[f64],
    v: &[f64],
    f0: &[f64],
    unorm: f64,
    w: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    let vnorm = vecops::l2norm_scaled(v)?;
    if vnorm == 0.0 {
        out.fill(0.0);
        return Ok(());
    }
    let eps = fd_eps(unorm, vnorm);
    vecops::axpby_into(eps, v, 1.0, u, w)?;
    rhs.apply(w, out);
    vecops::axpby(-1.0 / eps, f0, 1.0 / eps, out)?;
    Ok(())
}

/// `out = F(k) = f(k) - J(u) k`, the nonlinear remainder. `w` and `rw` are
/// scratch; `f0 = f(u)` precomputed.
#[allow(clippy::too_many_arguments)]
pub(crate) fn remainder_with(
    rhs: &impl RhsOperator,
    u: &[f64],
    k: &[f64],
    f0: &[f64],
    unorm: f64,
    w: &mut [f64],
    rw: &mut [f64],
    out: &mut [f64],
) -> Result<()> {
    rhs.apply(k, out);
    jac_vec_with(rhs, u, k, f0, unorm, w, rw)?;
    vecops::axpby(-1.0, rw, 1.0, out)?;
    Ok(())
}

/// `J(u) v` by forward differences; exact to roundoff for linear `rhs`.
pub fn jac_vec(rhs: &impl RhsOperator, u: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: v.len(),
        });
    }
    let mut f0 = vec![0.0; u.len()];
    let mut w = vec![0.0; u.len()];
    let mut out = vec![0.0; u.len()];
    rhs.apply(u, &mut f0);
    let unorm = vecops::l2norm_scaled(u)?;
    jac_vec_with(rhs, u, v, &f0, unorm, &mut w, &mut out)?;
    vecops::ensure_finite(&out, "jacobian action")?;
    Ok(out)
}

/// `F(k) = f(k) - J(u) k`; vanishes (to finite-difference noise) for
/// linear `rhs`.
pub fn nonlinear_remainder(rhs: &impl RhsOperator, u: &[f64], k: &[f64]) -> Result<Vec<f64>> {
    if u.len() != k.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            got: k.len(),
        });
    }
    let mut f0 = vec![0.0; u.len()];
    let mut w = vec![0.0; u.len()];
    let mut rw = vec![0.0; u.len()];
    let mut out = vec![0.0; u.len()];
    rhs.apply(u, &mut f0);
    let unorm = vecops::l2norm_scaled(u)?;
    remainder_with(rhs, u, k, &f0, unorm, &mut w, &mut rw, &mut out)?;
    vecops::ensure_finite(&out, "nonlinear remainder")?;
    Ok(out)
}

/// Power method on `J(u)` with the four caller-provided scratch vectors
/// (iterate, perturbed state, rhs output, base rhs value).
pub(crate) fn power_iterations_with(
    rhs: &impl RhsOperator,
    u: &[f64],
    v: &mut [f64],
    w: &mut [f64],
    rw: &mut [f64],
    f0: &mut [f64],
) -> Result<PowerIterationResult> {
    rhs.apply(u, f0);
    let unorm = vecops::l2norm_scaled(u)?;

    // deterministic start: all ones, perturbed at the first entry so the
    // iterate is not a pure null mode of periodic stencils
    v.fill(1.0);
    v[0] = 2.0;
    let norm0 = vecops::l2norm_scaled(v)?;
    vecops::scale(1.0 / norm0, v);

    let mut estimate = 0.0_f64;
    for it in 1..=POWER_MAX_ITERS {
        jac_vec_with(rhs, u, v, f0, unorm, w, rw)?;
        // v has scaled norm 1, so the norm ratio is just ||J v||
        let mag = vecops::l2norm_scaled(rw)?;
        if !mag.is_finite() {
            return Err(Error::NonFinite("power iteration"));
        }
        if mag == 0.0 {
            return Ok(PowerIterationResult {
                magnitude: 0.0,
                iterations: it,
                converged: true,
            });
        }
        vecops::scale_into(1.0 / mag, rw, v)?;
        if (mag - estimate).abs() < POWER_REL_CHANGE * mag {
            return Ok(PowerIterationResult {
                magnitude: mag,
                iterations: it,
                converged: true,
            });
        }
        estimate = mag;
    }
    Ok(PowerIterationResult {
        magnitude: estimate,
        iterations: POWER_MAX_ITERS,
        converged: false,
    })
}

/// Magnitude of the dominant eigenvalue of `J(u)` by power iteration.
pub fn power_iterations(rhs: &impl RhsOperator, u: &[f64]) -> Result<PowerIterationResult> {
    let n = u.len();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut rw = vec![0.0; n];
    let mut f0 = vec![0.0; n];
    power_iterations_with(rhs, u, &mut v, &mut w, &mut rw, &mut f0)
}

/// Power iteration plus the shift/scale recipe in one call.
pub fn estimate_spectrum(rhs: &impl RhsOperator, u: &[f64]) -> Result<SpectrumEstimate> {
    spectrum_to_leja(power_iterations(rhs, u)?.magnitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rhs_from_fn;

    #[test]
    fn spectrum_recipe_reference_values() {
        let s = spectrum_to_leja(100.0).unwrap();
        assert_eq!(s.eigenvalue, -105.0);
        assert_eq!(s.c, -52.5);
        assert_eq!(s.gamma, 26.25);
    }

    #[test]
    fn spectrum_recipe_zero_and_negative() {
        let s = spectrum_to_leja(0.0).unwrap();
        assert_eq!((s.eigenvalue, s.c, s.gamma), (0.0, 0.0, 0.0));
        assert!(matches!(
            spectrum_to_leja(-1.0),
            Err(Error::NegativeMagnitude(_))
        ));
        assert!(spectrum_to_leja(f64::NAN).is_err());
    }

    #[test]
    fn spectrum_interval_endpoints_exact() {
        for mag in [1.0, 3.7, 68393.142857, 4.0 / (2.0 / 256.0f64).powi(2)] {
            let s = spectrum_to_leja(mag).unwrap();
            assert_eq!(s.c - 2.0 * s.gamma, s.eigenvalue);
            assert_eq!(s.c + 2.0 * s.gamma, 0.0);
        }
    }

    #[test]
    fn spectrum_recipe_on_laplacian_dominant_magnitude() {
        // 4/dx^2 for dx = 2/256
        let dx = 2.0 / 256.0;
        let s = spectrum_to_leja(4.0 / (dx * dx)).unwrap();
        assert!((s.eigenvalue - -68812.8).abs() < 1e-9);
        assert!((s.c - -34406.4).abs() < 1e-9);
        assert!((s.gamma - 17203.2).abs() < 1e-9);
    }

    #[test]
    fn jac_vec_zero_direction() {
        let rhs = rhs_from_fn(3, |x, out| {
            for i in 0..3 {
                out[i] = x[i] * x[i];
            }
        });
        let out = jac_vec(&rhs, &[1.0, 2.0, 3.0], &[0.0; 3]).unwrap();
        assert_eq!(out, vec![0.0; 3]);
    }

    #[test]
    fn jac_vec_linear_map_is_exact_to_fd_noise() {
        let a = [[-2.0, 1.0], [0.5, -3.0]];
        let rhs = rhs_from_fn(2, move |x, out| {
            out[0] = a[0][0] * x[0] + a[0][1] * x[1];
            out[1] = a[1][0] * x[0] + a[1][1] * x[1];
        });
        let v = [1.0, -2.0];
        let expect = [
            a[0][0] * v[0] + a[0][1] * v[1],
            a[1][0] * v[0] + a[1][1] * v[1],
        ];
        for u in [[0.0, 0.0], [5.0, -1.0], [100.0, 3.0]] {
            let out = jac_vec(&rhs, &u, &v).unwrap();
            for i in 0..2 {
                assert!(
                    (out[i] - expect[i]).abs() < 1e-7 * expect[i].abs().max(1.0),
                    "u={u:?} i={i}: {} vs {}",
                    out[i],
                    expect[i]
                );
            }
        }
    }

    #[test]
    fn jac_vec_quadratic_matches_analytic() {
        // f(x) = x .* x, J(u) v = 2 u .* v
        let rhs = rhs_from_fn(2, |x, out| {
            out[0] = x[0] * x[0];
            out[1] = x[1] * x[1];
        });
        let out = jac_vec(&rhs, &[1.0, 2.0], &[1.0, 1.0]).unwrap();
        assert!((out[0] - 2.0).abs() < 1e-6);
        assert!((out[1] - 4.0).abs() < 1e-6);
    }

    #[test]
    fn remainder_vanishes_for_linear_rhs() {
        let rhs = rhs_from_fn(3, |x, out| {
            out[0] = -x[0] + 0.5 * x[1];
            out[1] = -2.0 * x[1];
            out[2] = x[0] - x[2];
        });
        let u = [1.0, 2.0, -1.0];
        let k = [0.3, -0.7, 2.0];
        let f_k_norm = {
            let mut fk = vec![0.0; 3];
            rhs.apply(&k, &mut fk);
            crate::vecops::l2norm_scaled(&fk).unwrap()
        };
        let out = nonlinear_remainder(&rhs, &u, &k).unwrap();
        let rnorm = crate::vecops::l2norm_scaled(&out).unwrap();
        assert!(rnorm <= 1e-7 * f_k_norm.max(1.0), "remainder {rnorm}");
    }

    #[test]
    fn remainder_of_quadratic_at_u() {
        // f(x) = x .* x, k = u: F(u) = u^2 - 2u^2 = -u^2
        let rhs = rhs_from_fn(2, |x, out| {
            out[0] = x[0] * x[0];
            out[1] = x[1] * x[1];
        });
        let u = [1.0, 2.0];
        let out = nonlinear_remainder(&rhs, &u, &u).unwrap();
        assert!((out[0] - -1.0).abs() < 1e-6);
        assert!((out[1] - -4.0).abs() < 1e-6);
    }

    #[test]
    fn remainder_zero_state() {
        let rhs = rhs_from_fn(2, |x, out| {
            out[0] = x[0] * x[0];
            out[1] = x[1] * x[1];
        });
        let out = nonlinear_remainder(&rhs, &[1.0, 2.0], &[0.0, 0.0]).unwrap();
        assert_eq!(out, vec![0.0, 0.0]);
    }

    #[test]
    fn power_iteration_diagonal_dominant() {
        let rhs = rhs_from_fn(3, |x, out| {
            out[0] = -x[0];
            out[1] = -5.0 * x[1];
            out[2] = -3.0 * x[2];
        });
        let res = power_iterations(&rhs, &[1.0, 1.0, 1.0]).unwrap();
        assert!(res.converged);
        assert!(
            (res.magnitude - 5.0).abs() <= 0.02 * 5.0,
            "{}",
            res.magnitude
        );
    }

    #[test]
    fn power_iteration_periodic_second_difference() {
        // 1D periodic Laplacian, n points, dx spacing: dominant 4/dx^2
        let n = 128;
        let dx = 2.0 / n as f64;
        let rhs = rhs_from_fn(n, move |x, out| {
            for i in 0..n {
                let ip = (i + 1) % n;
                let im = (i + n - 1) % n;
                out[i] = (x[ip] - 2.0 * x[i] + x[im]) / (dx * dx);
            }
        });
        let u = vec![0.0; n];
        let res = power_iterations(&rhs, &u).unwrap();
        let expect = 4.0 / (dx * dx);
        assert!(
            (res.magnitude - expect).abs() <= 0.02 * expect,
            "{} vs {expect} ({} iters, converged={})",
            res.magnitude,
            res.iterations,
            res.converged
        );
    }

    #[test]
    fn power_iteration_zero_operator() {
        let rhs = rhs_from_fn(4, |_x, out| out.fill(0.0));
        let res = power_iterations(&rhs, &[1.0; 4]).unwrap();
        assert_eq!(res.magnitude, 0.0);
        assert!(res.converged);
    }
}
