//! Matrix-free exponential time integrators.
//!
//! The action of the matrix exponential and of the related phi functions on a
//! vector is approximated by Newton interpolation at Leja points on `[-2, 2]`.
//! The operator only ever enters through a user-supplied right-hand-side
//! callable, so no matrix is formed: linear operators are applied directly
//! and Jacobians of nonlinear operators are applied via finite differences.
//!
//! The crate is organised around the pieces of that scheme:
//!
//! - [`vecops`] — contiguous-vector kernels (`axpby`, scaled l2 norm, copy)
//!   shared by all solvers; data-parallel with `rayon` under the default
//!   `parallel` feature, with a bitwise-identical sequential fallback.
//! - [`phi`] — scalar phi functions and Newton divided differences of
//!   `phi_l(dt (c + gamma xi))` over Leja nodes, accumulated in compensated
//!   double-double arithmetic.
//! - [`leja`] — Leja node generation and the three interpolation kernels
//!   (`real_leja_exp`, `real_leja_phi_nl`, `real_leja_phi`).
//! - [`jacobian`] — finite-difference Jacobian action, nonlinear remainders,
//!   and power-iteration spectrum estimation with the shift/scale recipe.
//! - [`integrators`] — exponential time steppers (Rosenbrock–Euler, EXPRB32,
//!   and an extensible registry of higher-order methods) with a strict
//!   auxiliary-buffer budget.
//! - [`problems`] — three periodic 2D finite-difference benchmark problems
//!   (diffusion–advection, diffusion–advection with source, viscous Burgers).
//!
//! A typical nonlinear time loop:
//!
//! ```
//! use lejastep::integrators::SolverContext;
//! use lejastep::problems::{Burgers, Grid2D};
//! use lejastep::RhsOperator;
//!
//! let grid = Grid2D::new(32, 32);
//! let problem = Burgers::new(grid, 10.0);
//! let mut u = problem.initial_condition();
//! let dt = 10.0 * problem.cfl_dt();
//!
//! let mut ctx = SolverContext::new("exprb32", u.len()).unwrap();
//! let spectrum = ctx.estimate_spectrum(&problem, &u).unwrap();
//! for _ in 0..5 {
//!     let step = ctx.step(&problem, &u, dt, &spectrum, 1e-10, 1e-14).unwrap();
//!     u.copy_from_slice(step.u_high);
//! }
//! ```

pub mod error;
pub mod integrators;
pub mod jacobian;
pub mod leja;
pub mod phi;
pub mod problems;
pub mod vecops;

pub use error::Error;

/// Right-hand side `f(u)` of the differential equation, applied matrix-free.
///
/// Input and output are contiguous slices of the same length `N`; `apply`
/// must be deterministic and reentrant, and must not retain references to
/// its arguments. This is the only coupling between problems and solvers.
pub trait RhsOperator {
    /// Evaluates `output = f(input)`.
    fn apply(&self, input: &[f64], output: &mut [f64]);

    /// Number of unknowns `N` this operator acts on.
    fn len(&self) -> usize;

    /// True if the operator acts on zero unknowns.
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Wraps a closure as an [`RhsOperator`] over vectors of length `n`.
pub fn rhs_from_fn<F>(n: usize, f: F) -> FnRhs<F>
where
    F: Fn(&[f64], &mut [f64]),
{
    FnRhs { n, f }
}

/// Closure-backed [`RhsOperator`]; see [`rhs_from_fn`].
pub struct FnRhs<F> {
    n: usize,
    f: F,
}

impl<F: Fn(&[f64], &mut [f64])> RhsOperator for FnRhs<F> {
    fn apply(&self, input: &[f64], output: &mut [f64]) {
        (self.f)(input, output)
    }

    fn len(&self) -> usize {
        self.n
    }
}

impl<R: RhsOperator + ?Sized> RhsOperator for &R {
    fn apply(&self, input: &[f64], output: &mut [f64]) {
        (**self).apply(input, output)
    }

    fn len(&self) -> usize {
        (**self).len()
    }
}
