//! Leja node generation and the three interpolation kernels that apply
//! `exp` / `phi_l` of an operator to a vector.
//!
//! - [`real_leja_exp`] — matrix exponential times a vector, for homogeneous
//!   linear equations (the operator is applied directly through `rhs`).
//! - [`real_leja_phi_nl`] — `phi_l` of a linear operator times a vector,
//!   for nonhomogeneous linear equations (the source is folded into the
//!   interpolated vector by the caller).
//! - [`real_leja_phi`] — `phi_l(a_k J(u) dt)` times a stage vector for a
//!   list of stage fractions `a_k`, sharing one recurrence across all
//!   fractions ("vertical" interpolation); the Jacobian action is a
//!   forward finite difference.
//!
//! These free functions allocate their own scratch; the integrators go
//! through [`integrators::SolverContext`](crate::integrators::SolverContext),
//! which owns all buffers and never allocates inside a step.

mod kernels;
mod nodes;

pub use nodes::{default_leja_nodes, generate_leja_nodes, DEFAULT_GRID_RESOLUTION};

pub(crate) use kernels::{
    leja_linear, leja_phi_single_inplace, leja_phi_vertical, JacScratch, LinearScratch,
};

use crate::error::{Error, Result};
use crate::jacobian::SpectrumEstimate;
use crate::RhsOperator;

/// Shift, scale, step size, and stopping tolerances of one interpolation.
///
/// `c` and `gamma` place the operator spectrum inside
/// `[c - 2 gamma, c + 2 gamma]`; they come from
/// [`spectrum_to_leja`](crate::jacobian::spectrum_to_leja). `gamma == 0`
/// is the degenerate (zero-width) spectrum and short-circuits to a scalar
/// multiple.
#[derive(Clone, Copy, Debug)]
pub struct InterpConfig {
    pub c: f64,
    pub gamma: f64,
    pub dt: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl InterpConfig {
    pub fn new(spectrum: &SpectrumEstimate, dt: f64, rtol: f64, atol: f64) -> Self {
        InterpConfig {
            c: spectrum.c,
            gamma: spectrum.gamma,
            dt,
            rtol,
            atol,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.gamma.is_finite() && self.dt.is_finite()) {
            return Err(Error::InvalidConfig("c, gamma, dt must be finite"));
        }
        if !(self.rtol > 0.0 || self.atol > 0.0) {
            return Err(Error::InvalidConfig("need rtol > 0 or atol > 0"));
        }
        if self.rtol < 0.0 || self.atol < 0.0 {
            return Err(Error::InvalidConfig("tolerances must be nonnegative"));
        }
        Ok(())
    }
}

/// Interpolation output: the polynomial and the number of Leja iterations
/// (= operator applications), the cost proxy of the scheme.
#[derive(Clone, Debug)]
pub struct LejaResult {
    pub polynomial: Vec<f64>,
    pub iters: usize,
}

/// `exp(A dt) u` for the linear homogeneous operator applied by `rhs`.
pub fn real_leja_exp(
    rhs: &impl RhsOperator,
    u: &[f64],
    cfg: &InterpConfig,
    nodes: &[f64],
) -> Result<LejaResult> {
    let mut out = vec![0.0; u.len()];
    let (mut y, mut t) = (vec![0.0; u.len()], vec![0.0; u.len()]);
    let iters = leja_linear(
        rhs,
        u,
        0,
        cfg,
        nodes,
        &mut out,
        LinearScratch {
            y: &mut y,
            t: &mut t,
        },
    )?;
    Ok(LejaResult {
        polynomial: out,
        iters,
    })
}

/// `phi_l(A dt) v` for the linear operator applied by `rhs`; `v` carries
/// any nonhomogeneous source folded in by the caller.
pub fn real_leja_phi_nl(
    rhs: &impl RhsOperator,
    interp_vector: &[f64],
    l: usize,
    cfg: &InterpConfig,
    nodes: &[f64],
) -> Result<LejaResult> {
    let mut out = vec![0.0; interp_vector.len()];
    let (mut y, mut t) = (
        vec![0.0; interp_vector.len()],
        vec![0.0; interp_vector.len()],
    );
    let iters = leja_linear(
        rhs,
        interp_vector,
        l,
        cfg,
        nodes,
        &mut out,
        LinearScratch {
            y: &mut y,
            t: &mut t,
        },
    )?;
    Ok(LejaResult {
        polynomial: out,
        iters,
    })
}

/// `phi_l(a_k J(u) dt) interp_vector` for each stage fraction `a_k` in
/// `coeffs` (non-empty, strictly increasing, each in (0, 1]), computed in
/// one shared recurrence. Returns one polynomial per fraction plus the
/// total iteration count.
pub fn real_leja_phi(
    rhs: &impl RhsOperator,
    u: &[f64],
    interp_vector: &[f64],
    coeffs: &[f64],
    l: usize,
    cfg: &InterpConfig,
    nodes: &[f64],
) -> Result<(Vec<Vec<f64>>, usize)> {
    let n = interp_vector.len();
    let mut outs: Vec<Vec<f64>> = (0..coeffs.len()).map(|_| vec![0.0; n]).collect();
    let mut scratch = [vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    let [y, w, rw, f0] = &mut scratch;
    let mut out_refs: Vec<&mut [f64]> = outs.iter_mut().map(|o| o.as_mut_slice()).collect();
    let iters = leja_phi_vertical(
        rhs,
        u,
        interp_vector,
        coeffs,
        l,
        cfg,
        nodes,
        &mut out_refs,
        JacScratch { y, w, rw, f0 },
    )?;
    Ok((outs, iters))
}
