//! Periodic 2D finite-difference benchmark problems on
//! `[-1, 1] x [-1, 1]`.
//!
//! Three right-hand sides over the same grid machinery:
//!
//! - diffusion–advection `u_t = lap(u) + nu (u_x + u_y)` (linear,
//!   homogeneous),
//! - the same with a time-independent source `S(x, y)` (linear,
//!   nonhomogeneous),
//! - viscous Burgers `u_t = lap(u) + nu/2 ((u^2)_x + (u^2)_y)` (nonlinear).
//!
//! The Laplacian uses the second-order centred 5-point stencil; first
//! derivatives use a third-order upwind stencil whose bias follows the sign
//! of the advection coefficient, so the semi-discrete operator keeps its
//! spectrum in the closed left half-plane. Grid ordering is row-major,
//! `index = i * ny + j` with `x_i = -1 + i dx`, `y_j = -1 + j dy`
//! (endpoint `+1` excluded, periodic wrap).

use crate::RhsOperator;

/// Uniform periodic grid; `dx = 2/nx`, `dy = 2/ny`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize) -> Self {
        assert!(nx >= 8 && ny >= 8, "grid must be at least 8x8");
        Grid2D { nx, ny }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 / self.ny as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.dx()
    }

    pub fn y(&self, j: usize) -> f64 {
        -1.0 + j as f64 * self.dy()
    }

    /// Evaluates `f(x, y)` at every node, row-major.
    pub fn sample(&self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        for i in 0..self.nx {
            let x = self.x(i);
            for j in 0..self.ny {
                out.push(f(x, self.y(j)));
            }
        }
        out
    }

    /// Reference step size: `min(min(dx,dy)/|nu|, min(dx,dy)^2/4)`;
    /// with `nu == 0` only the diffusive bound applies.
    pub fn cfl_dt(&self, nu: f64) -> f64 {
        let h = self.dx().min(self.dy());
        let diffusive = h * h / 4.0;
        if nu == 0.0 {
            diffusive
        } else {
            (h / nu.abs()).min(diffusive)
        }
    }
}

/// Gaussian bump initial condition shared by the two linear problems:
/// `1 + exp(-((x + 0.5)^2 + (y + 0.5)^2) / 0.01)`.
pub fn gaussian_initial_condition(grid: &Grid2D) -> Vec<f64> {
    grid.sample(|x, y| 1.0 + (-((x + 0.5).powi(2) + (y + 0.5).powi(2)) / 0.01).exp())
}

/// Smooth multi-mode initial condition of the Burgers problem:
/// `2 + 1e-2 [sin(2 pi x) + sin(2 pi y) + sin(8 pi x + 0.3) + sin(8 pi y + 0.3)]`.
pub fn burgers_initial_condition(grid: &Grid2D) -> Vec<f64> {
    use std::f64::consts::PI;
    grid.sample(|x, y| {
        2.0 + 1e-2
            * ((2.0 * PI * x).sin()
                + (2.0 * PI * y).sin()
                + (8.0 * PI * x + 0.3).sin()
                + (8.0 * PI * y + 0.3).sin())
    })
}

/// Time-independent source of the nonhomogeneous problem:
/// `exp(-((x+0.4)^2 + (y-0.6)^2)/0.05) + exp(-((x-0.25)^2 + (y+0.1)^2)/0.04)`.
pub fn source_field(grid: &Grid2D) -> Vec<f64> {
    grid.sample(|x, y| {
        (-((x + 0.4).powi(2) + (y - 0.6).powi(2)) / 0.05).exp()
            + (-((x - 0.25).powi(2) + (y + 0.1).powi(2)) / 0.04).exp()
    })
}

/// Finite-difference stencils, split into serial and parallel row loops so
/// both can be benchmarked against each other. Both paths run the same
/// per-row kernel and give bitwise-identical output.
pub mod stencil {
    use super::Grid2D;

    #[cfg(feature = "parallel")]
    use rayon::prelude::*;

    /// Below this many unknowns the row loop stays sequential even in
    /// parallel builds.
    #[cfg(feature = "parallel")]
    const PAR_MIN_LEN: usize = 1 << 14;

    /// One output row of `lap(u) + nu (u_x + u_y)`.
    ///
    /// Diffusion: centred second order. Advection: third-order upwind; for
    /// `nu > 0` the bias takes two points downwind in the periodic sense
    /// (`-u_{i+2} + 6 u_{i+1} - 3 u_i - 2 u_{i-1}) / (6 dx)`), mirrored for
    /// `nu < 0`, which keeps `Re(nu * symbol) <= 0`.
    fn diff_adv_row(grid: &Grid2D, nu: f64, u: &[f64], i: usize, row: &mut [f64]) {
        let (nx, ny) = (grid.nx(), grid.ny());
        let (dx, dy) = (grid.dx(), grid.dy());
        let idx2 = 1.0 / (dx * dx);
        let idy2 = 1.0 / (dy * dy);
        let i6dx = 1.0 / (6.0 * dx);
        let i6dy = 1.0 / (6.0 * dy);
        let row_at = |ii: usize| &u[ii * ny..(ii + 1) * ny];
        let r0 = row_at(i);
        let rm1 = row_at((i + nx - 1) % nx);
        let rm2 = row_at((i + nx - 2) % nx);
        let rp1 = row_at((i + 1) % nx);
        let rp2 = row_at((i + 2) % nx);
        for j in 0..ny {
            let jm1 = (j + ny - 1) % ny;
            let jm2 = (j + ny - 2) % ny;
            let jp1 = (j + 1) % ny;
            let jp2 = (j + 2) % ny;
            let lap =
                (rp1[j] - 2.0 * r0[j] + rm1[j]) * idx2 + (r0[jp1] - 2.0 * r0[j] + r0[jm1]) * idy2;
            let (ux, uy) = if nu >= 0.0 {
                (
                    (-rp2[j] + 6.0 * rp1[j] - 3.0 * r0[j] - 2.0 * rm1[j]) * i6dx,
                    (-r0[jp2] + 6.0 * r0[jp1] - 3.0 * r0[j] - 2.0 * r0[jm1]) * i6dy,
                )
            } else {
                (
                    (rm2[j] - 6.0 * rm1[j] + 3.0 * r0[j] + 2.0 * rp1[j]) * i6dx,
                    (r0[jm2] - 6.0 * r0[jm1] + 3.0 * r0[j] + 2.0 * r0[jp1]) * i6dy,
                )
            };
            row[j] = lap + nu * (ux + uy);
        }
    }

    /// One output row of `lap(u) + nu/2 ((u^2)_x + (u^2)_y)`; the squared
    /// field goes through the same upwind stencil as the linear advection.
    fn burgers_row(grid: &Grid2D, nu: f64, u: &[f64], i: usize, row: &mut [f64]) {
        let (nx, ny) = (grid.nx(), grid.ny());
        let (dx, dy) = (grid.dx(), grid.dy());
        let idx2 = 1.0 / (dx * dx);
        let idy2 = 1.0 / (dy * dy);
        let i6dx = 1.0 / (6.0 * dx);
        let i6dy = 1.0 / (6.0 * dy);
        let row_at = |ii: usize| &u[ii * ny..(ii + 1) * ny];
        let r0 = row_at(i);
        let rm1 = row_at((i + nx - 1) % nx);
        let rm2 = row_at((i + nx - 2) % nx);
        let rp1 = row_at((i + 1) % nx);
        let rp2 = row_at((i + 2) % nx);
        let sq = |v: f64| v * v;
        for j in 0..ny {
            let jm1 = (j + ny - 1) % ny;
            let jm2 = (j + ny - 2) % ny;
            let jp1 = (j + 1) % ny;
            let jp2 = (j + 2) % ny;
            let lap =
                (rp1[j] - 2.0 * r0[j] + rm1[j]) * idx2 + (r0[jp1] - 2.0 * r0[j] + r0[jm1]) * idy2;
            let (wx, wy) = if nu >= 0.0 {
                (
                    (-sq(rp2[j]) + 6.0 * sq(rp1[j]) - 3.0 * sq(r0[j]) - 2.0 * sq(rm1[j])) * i6dx,
                    (-sq(r0[jp2]) + 6.0 * sq(r0[jp1]) - 3.0 * sq(r0[j]) - 2.0 * sq(r0[jm1])) * i6dy,
                )
            } else {
                (
                    (sq(rm2[j]) - 6.0 * sq(rm1[j]) + 3.0 * sq(r0[j]) + 2.0 * sq(rp1[j])) * i6dx,
                    (sq(r0[jm2]) - 6.0 * sq(r0[jm1]) + 3.0 * sq(r0[j]) + 2.0 * sq(r0[jp1])) * i6dy,
                )
            };
            row[j] = lap + 0.5 * nu * (wx + wy);
        }
    }

    pub mod serial {
        use super::Grid2D;

        pub fn diffusion_advection(grid: &Grid2D, nu: f64, u: &[f64], out: &mut [f64]) {
            for (i, row) in out.chunks_mut(grid.ny()).enumerate() {
                super::diff_adv_row(grid, nu, u, i, row);
            }
        }

        pub fn burgers(grid: &Grid2D, nu: f64, u: &[f64], out: &mut [f64]) {
            for (i, row) in out.chunks_mut(grid.ny()).enumerate() {
                super::burgers_row(grid, nu, u, i, row);
            }
        }
    }

    #[cfg(feature = "parallel")]
    pub mod parallel {
        use super::*;

        pub fn diffusion_advection(grid: &Grid2D, nu: f64, u: &[f64], out: &mut [f64]) {
            out.par_chunks_mut(grid.ny())
                .enumerate()
                .for_each(|(i, row)| diff_adv_row(grid, nu, u, i, row));
        }

        pub fn burgers(grid: &Grid2D, nu: f64, u: &[f64], out: &mut [f64]) {
            out.par_chunks_mut(grid.ny())
                .enumerate()
                .for_each(|(i, row)| burgers_row(grid, nu, u, i, row));
        }
    }

    pub(super) fn diffusion_advection(grid: &Grid2D, nu: f64, u: &[f64], out: &mut [f64]) {
        #[cfg(feature = "parallel")]
        if grid.len() >= PAR_MIN_LEN {
            return parallel::diffusion_advection(grid, nu, u, out);
        }
        serial::diffusion_advection(grid, nu, u, out);
    }

    pub(super) fn burgers(grid: &Grid2D, nu: f64, u: &[f64], out: &mut [f64]) {
        #[cfg(feature = "parallel")]
        if grid.len() >= PAR_MIN_LEN {
            return parallel::burgers(grid, nu, u, out);
        }
        serial::burgers(grid, nu, u, out);
    }
}

/// Homogeneous linear diffusion–advection operator (Problem I style).
#[derive(Clone, Debug)]
pub struct DiffusionAdvection {
    grid: Grid2D,
    nu: f64,
}

impl DiffusionAdvection {
    pub fn new(grid: Grid2D, nu: f64) -> Self {
        DiffusionAdvection { grid, nu }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn initial_condition(&self) -> Vec<f64> {
        gaussian_initial_condition(&self.grid)
    }

    pub fn cfl_dt(&self) -> f64 {
        self.grid.cfl_dt(self.nu)
    }
}

impl RhsOperator for DiffusionAdvection {
    fn apply(&self, input: &[f64], output: &mut [f64]) {
        stencil::diffusion_advection(&self.grid, self.nu, input, output);
    }

    fn len(&self) -> usize {
        self.grid.len()
    }
}

/// Diffusion–advection with a time-independent source (Problem II style):
/// the rhs is affine, `f(u) = A u + S`. The linear part and the vector
/// `A u + S` are exposed separately so the caller can drive the
/// nonhomogeneous-exact update `u + phi_1(A dt)(A u + S) dt`.
#[derive(Clone, Debug)]
pub struct DiffusionAdvectionSource {
    linear: DiffusionAdvection,
    source: Vec<f64>,
}

impl DiffusionAdvectionSource {
    pub fn new(grid: Grid2D, nu: f64) -> Self {
        DiffusionAdvectionSource {
            linear: DiffusionAdvection::new(grid, nu),
            source: source_field(&grid),
        }
    }

    pub fn grid(&self) -> &Grid2D {
        self.linear.grid()
    }

    pub fn initial_condition(&self) -> Vec<f64> {
        self.linear.initial_condition()
    }

    pub fn cfl_dt(&self) -> f64 {
        self.linear.cfl_dt()
    }

    /// The linear operator `A` alone.
    pub fn linear_part(&self) -> &DiffusionAdvection {
        &self.linear
    }

    /// The sampled source `S(x, y)`.
    pub fn source(&self) -> &[f64] {
        &self.source
    }

    /// `A u + S`, the vector handed to `real_leja_phi_nl`.
    pub fn interp_vector(&self, u: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; u.len()];
        self.linear.apply(u, &mut out);
        for (o, s) in out.iter_mut().zip(&self.source) {
            *o += s;
        }
        out
    }
}

impl RhsOperator for DiffusionAdvectionSource {
    fn apply(&self, input: &[f64], output: &mut [f64]) {
        self.linear.apply(input, output);
        for (o, s) in output.iter_mut().zip(&self.source) {
            *o += s;
        }
    }

    fn len(&self) -> usize {
        self.linear.len()
    }
}

/// Viscous Burgers operator (Problem III style).
#[derive(Clone, Debug)]
pub struct Burgers {
    grid: Grid2D,
    nu: f64,
}

impl Burgers {
    pub fn new(grid: Grid2D, nu: f64) -> Self {
        Burgers { grid, nu }
    }

    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn initial_condition(&self) -> Vec<f64> {
        burgers_initial_condition(&self.grid)
    }

    pub fn cfl_dt(&self) -> f64 {
        self.grid.cfl_dt(self.nu)
    }
}

impl RhsOperator for Burgers {
    fn apply(&self, input: &[f64], output: &mut [f64]) {
        stencil::burgers(&self.grid, self.nu, input, output);
    }

    fn len(&self) -> usize {
        self.grid.len()
    }
}
