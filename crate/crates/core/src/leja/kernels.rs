//! The interpolation recurrences behind the three public kernels.
//!
//! All three build the Newton-form polynomial
//!
//! ```text
//! p_{m+1} = p_m + d_{m+1} y_{m+1},
//! y_{m+1} = ((A - c)/gamma - xi_m) y_m,
//! ```
//!
//! matrix-free: one operator application per `y` update. With eigenvalues of
//! `A` inside `[c - 2 gamma, c + 2 gamma]`, the variable `x = (A - c)/gamma`
//! lives in `[-2, 2]` where the Leja nodes sit, and the divided differences
//! of `h(xi) = phi_l(dt (c + gamma xi))` turn the polynomial into
//! `phi_l(A dt)` applied to the start vector. Iteration stops when
//! `||d_{m+1} y_{m+1}|| < rtol * ||p_{m+1}|| + atol` (scaled l2 norms),
//! checked every iteration.

use crate::error::{Error, Result};
use crate::phi::{phi, DividedDiffs};
use crate::vecops;
use crate::RhsOperator;

use super::InterpConfig;

/// Smallest allowed norm in the finite-difference increment denominator.
const TINY: f64 = f64::MIN_POSITIVE;

/// Scratch for the linear kernels: the recurrence vector and the operator
/// output. One extra N-vector beyond input/output would suffice if the
/// input buffer were consumed as workspace; keeping the input borrowed
/// immutably costs the second slot, drawn from the same shared pool.
pub(crate) struct LinearScratch<'a> {
    pub y: &'a mut [f64],
    pub t: &'a mut [f64],
}

/// Scratch for the Jacobian-action kernel and power iterations: recurrence
/// vector, perturbed state, rhs output, and the base rhs value f(u).
pub(crate) struct JacScratch<'a> {
    pub y: &'a mut [f64],
    pub w: &'a mut [f64],
    pub rw: &'a mut [f64],
    pub f0: &'a mut [f64],
}

struct StepCheck {
    residual: f64,
    converged: bool,
}

/// Shared epilogue of one recurrence step for one accumulator:
/// `out += d * y`, stopping-rule check, divergence check.
fn accumulate_and_check(
    d: f64,
    y: &[f64],
    ynorm: f64,
    out: &mut [f64],
    cfg: &InterpConfig,
    iteration: usize,
) -> Result<StepCheck> {
    vecops::axpby(d, y, 1.0, out)?;
    let pnorm = vecops::l2norm_scaled(out)?;
    let residual = d.abs() * ynorm;
    if !residual.is_finite() || !pnorm.is_finite() {
        return Err(Error::Divergence { iteration });
    }
    let converged = residual == 0.0 || residual < cfg.rtol * pnorm + cfg.atol;
    Ok(StepCheck {
        residual,
        converged,
    })
}

/// `out = phi_l(A dt) input` for a linear operator applied directly through
/// `rhs`. `l = 0` is the matrix exponential. Returns the number of operator
/// applications (Leja iterations).
pub(crate) fn leja_linear(
    rhs: &impl RhsOperator,
    input: &[f64],
    l: usize,
    cfg: &InterpConfig,
    nodes: &[f64],
    out: &mut [f64],
    scratch: LinearScratch<'_>,
) -> Result<usize> {
    cfg.validate()?;
    let LinearScratch { y, t } = scratch;

    if cfg.gamma == 0.0 {
        // degenerate spectrum: A dt reduces to the scalar c dt
        vecops::scale_into(phi(l, cfg.dt * cfg.c)?, input, out)?;
        return Ok(0);
    }

    let mut table = DividedDiffs::new(l, cfg.dt, cfg.c, cfg.gamma)?;
    let d0 = table.extend(nodes[0])?;
    vecops::copy(input, y)?;
    vecops::scale_into(d0, y, out)?;

    let mut residual = f64::INFINITY;
    for m in 1..nodes.len() {
        rhs.apply(y, t);
        // y <- (A y - c y)/gamma - xi_{m-1} y
        vecops::axpby(1.0 / cfg.gamma, t, -cfg.c / cfg.gamma - nodes[m - 1], y)?;
        let d = table.extend(nodes[m])?;
        let ynorm = vecops::l2norm_scaled(y)?;
        let check = accumulate_and_check(d, y, ynorm, out, cfg, m)?;
        residual = check.residual;
        if check.converged {
            return Ok(m);
        }
    }
    Err(Error::NonConvergence {
        max_nodes: nodes.len(),
        residual,
    })
}

/// Vertical interpolation: `outs[k] = phi_l(coeffs[k] J(u) dt) v` for every
/// stage fraction in one pass, where `v` is the vector already loaded into
/// `scratch.y`. The `y` recurrence depends only on `J(u)` and is shared;
/// each fraction keeps its own divided-difference stream and accumulator,
/// frozen once converged. The Jacobian action is a forward difference
/// around `u`, one rhs call per iteration.
#[allow(clippy::too_many_arguments)]
fn leja_phi_from_y(
    rhs: &impl RhsOperator,
    u: &[f64],
    coeffs: &[f64],
    l: usize,
    cfg: &InterpConfig,
    nodes: &[f64],
    outs: &mut [&mut [f64]],
    scratch: JacScratch<'_>,
) -> Result<usize> {
    let JacScratch { y, w, rw, f0 } = scratch;

    let mut tables = Vec::with_capacity(coeffs.len());
    for &a in coeffs {
        tables.push(DividedDiffs::new(l, a * cfg.dt, cfg.c, cfg.gamma)?);
    }
    let mut frozen = vec![false; coeffs.len()];
    for (table, out) in tables.iter_mut().zip(outs.iter_mut()) {
        let d0 = table.extend(nodes[0])?;
        vecops::scale_into(d0, y, out)?;
    }

    // base point of the forward difference, reused every iteration
    rhs.apply(u, f0);
    let unorm = vecops::l2norm_scaled(u)?;
    let sqrt_eps = f64::EPSILON.sqrt();

    let mut residual = f64::INFINITY;
    for m in 1..nodes.len() {
        // J(u) y by forward difference: (f(u + eps y) - f(u)) / eps
        let ynorm_pre = vecops::l2norm_scaled(y)?;
        if !ynorm_pre.is_finite() {
            return Err(Error::Divergence { iteration: m });
        }
        let eps = sqrt_eps * unorm.max(1.0) / ynorm_pre.max(TINY);
        vecops::axpby_into(eps, y, 1.0, u, w)?;
        rhs.apply(w, rw);
        // rw <- (rw - f0)/eps = J y
        vecops::axpby(-1.0 / eps, f0, 1.0 / eps, rw)?;
        // y <- (J y - c y)/gamma - xi_{m-1} y
        vecops::axpby(1.0 / cfg.gamma, rw, -cfg.c / cfg.gamma - nodes[m - 1], y)?;

        let ynorm = vecops::l2norm_scaled(y)?;
        let mut all_frozen = true;
        for k in 0..coeffs.len() {
            if frozen[k] {
                continue;
            }
            let d = tables[k].extend(nodes[m])?;
            let check = accumulate_and_check(d, y, ynorm, outs[k], cfg, m)?;
            residual = check.residual;
            if check.converged {
                frozen[k] = true;
            } else {
                all_frozen = false;
            }
        }
        if all_frozen {
            return Ok(m);
        }
    }
    Err(Error::NonConvergence {
        max_nodes: nodes.len(),
        residual,
    })
}

/// `outs[k] = phi_l(coeffs[k] J(u) dt) interp`; see [`leja_phi_from_y`].
#[allow(clippy::too_many_arguments)]
pub(crate) fn leja_phi_vertical(
    rhs: &impl RhsOperator,
    u: &[f64],
    interp: &[f64],
    coeffs: &[f64],
    l: usize,
    cfg: &InterpConfig,
    nodes: &[f64],
    outs: &mut [&mut [f64]],
    scratch: JacScratch<'_>,
) -> Result<usize> {
    cfg.validate()?;
    validate_coeffs(coeffs)?;
    debug_assert_eq!(coeffs.len(), outs.len());

    if cfg.gamma == 0.0 {
        for (out, &a) in outs.iter_mut().zip(coeffs) {
            vecops::scale_into(phi(l, a * cfg.dt * cfg.c)?, interp, out)?;
        }
        return Ok(0);
    }

    vecops::copy(interp, &mut *scratch.y)?;
    leja_phi_from_y(rhs, u, coeffs, l, cfg, nodes, outs, scratch)
}

/// Single-fraction variant of [`leja_phi_vertical`] where the result
/// overwrites the interpolated vector itself; the recurrence copies it into
/// scratch before the accumulator is touched.
#[allow(clippy::too_many_arguments)]
pub(crate) fn leja_phi_single_inplace(
    rhs: &impl RhsOperator,
    u: &[f64],
    buf: &mut [f64],
    a: f64,
    l: usize,
    cfg: &InterpConfig,
    nodes: &[f64],
    scratch: JacScratch<'_>,
) -> Result<usize> {
    cfg.validate()?;
    validate_coeffs(&[a])?;

    if cfg.gamma == 0.0 {
        vecops::scale(phi(l, a * cfg.dt * cfg.c)?, buf);
        return Ok(0);
    }

    vecops::copy(buf, &mut *scratch.y)?;
    leja_phi_from_y(rhs, u, &[a], l, cfg, nodes, &mut [buf], scratch)
}

fn validate_coeffs(coeffs: &[f64]) -> Result<()> {
    if coeffs.is_empty() {
        return Err(Error::InvalidCoeffs("stage fractions must be non-empty"));
    }
    let mut prev = 0.0;
    for &a in coeffs {
        if !a.is_finite() || a <= prev {
            return Err(Error::InvalidCoeffs(
                "stage fractions must be finite, positive, strictly increasing",
            ));
        }
        if a > 1.0 {
            return Err(Error::InvalidCoeffs("stage fractions must not exceed 1"));
        }
        prev = a;
    }
    Ok(())
}
