//! Independent numerical oracles used by the test suites.
//!
//! Nothing here calls into the library under test: the scalar phi oracle
//! carries its own compensated-pair arithmetic (exponential by repeated
//! squaring rather than ln-2 reduction), the dense matrix exponential is
//! Pade-13 scaling-and-squaring over `nalgebra`, phi actions come from the
//! augmented-matrix construction, and the periodic stencil problems are
//! propagated exactly in Fourier space.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

// ---------------------------------------------------------------------------
// extended-precision scalar phi oracle

/// Unevaluated sum hi + lo, ~32 significant digits.
#[derive(Clone, Copy)]
struct P(f64, f64);

fn psum(a: f64, b: f64) -> P {
    let s = a + b;
    let bb = s - a;
    P(s, (a - (s - bb)) + (b - bb))
}

fn pprod(a: f64, b: f64) -> P {
    let p = a * b;
    P(p, a.mul_add(b, -p))
}

impl P {
    const ONE: P = P(1.0, 0.0);

    fn of(x: f64) -> P {
        P(x, 0.0)
    }

    fn add(self, o: P) -> P {
        let s = psum(self.0, o.0);
        let t = psum(self.1, o.1);
        let r = psum(s.0, s.1 + t.0);
        psum(r.0, r.1 + t.1)
    }

    fn mul(self, o: P) -> P {
        let p = pprod(self.0, o.0);
        psum(p.0, p.1 + self.0 * o.1 + self.1 * o.0)
    }

    fn div_int(self, k: f64) -> P {
        let q1 = self.0 / k;
        let r = self.add(pprod(q1, k).neg_p());
        let q2 = (r.0 + r.1) / k;
        psum(q1, q2)
    }

    fn neg_p(self) -> P {
        P(-self.0, -self.1)
    }

    fn value(self) -> f64 {
        self.0 + self.1
    }
}

/// exp in pair precision: Taylor on z / 2^k with |z|/2^k <= 1/4, then k
/// repeated squarings.
fn exp_pair(z: f64) -> P {
    if z < -800.0 {
        return P(0.0, 0.0);
    }
    let k = ((z.abs() * 4.0).log2().ceil().max(0.0)) as u32;
    let scale = 2f64.powi(k as i32);
    let zr = P::of(z / scale);
    let mut term = P::ONE;
    let mut sum = P::ONE;
    for n in 1..60 {
        term = term.mul(zr).div_int(n as f64);
        sum = sum.add(term);
        if term.0.abs() < 1e-40 * sum.0.abs() {
            break;
        }
    }
    for _ in 0..k {
        sum = sum.mul(sum);
    }
    sum
}

fn factorial_pair(n: usize) -> P {
    let mut f = P::ONE;
    for i in 2..=n {
        f = f.mul(P::of(i as f64));
    }
    f
}

/// Oracle value of `phi_l(z)`: pair-precision Taylor series near zero,
/// upward recursion from the pair-precision exponential elsewhere.
pub fn phi_oracle(l: usize, z: f64) -> f64 {
    if z.abs() < 1.0 {
        let mut term = P::ONE.div_int(factorial_pair(l).value());
        let mut sum = term;
        for k in 1..80 {
            term = term.mul(P::of(z)).div_int((k + l) as f64);
            sum = sum.add(term);
            if term.0.abs() < 1e-40 * sum.0.abs() {
                break;
            }
        }
        sum.value()
    } else {
        let mut p = exp_pair(z);
        for j in 0..l {
            let num = p.add(P::ONE.div_int(factorial_pair(j).value()).neg_p());
            p = P(num.0 / z, 0.0).add(P::of(((num.0 - (num.0 / z) * z) + num.1) / z));
        }
        p.value()
    }
}

// ---------------------------------------------------------------------------
// dense matrix-function oracles

/// Pade-13 scaling-and-squaring matrix exponential (Higham 2005).
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    const THETA13: f64 = 5.371920351148152;

    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let norm1 = a
        .column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let s = if norm1 > THETA13 {
        (norm1 / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a / 2f64.powi(s);

    let eye = DMatrix::<f64>::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let u_inner = &a6 * (B[13] * &a6 + B[11] * &a4 + B[9] * &a2)
        + B[7] * &a6
        + B[5] * &a4
        + B[3] * &a2
        + B[1] * &eye;
    let u = &a * u_inner;
    let v = &a6 * (B[12] * &a6 + B[10] * &a4 + B[8] * &a2)
        + B[6] * &a6
        + B[4] * &a4
        + B[2] * &a2
        + B[0] * &eye;

    let denom = &v - &u;
    let numer = &v + &u;
    let mut r = denom
        .lu()
        .solve(&numer)
        .expect("Pade denominator is singular");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// `phi_l(A) v` by the augmented-matrix construction:
/// `exp([[A, v e_1^T-ish block], [0, shift]])` carries `phi_k(A) v` in its
/// last column block.
pub fn phi_action(a: &DMatrix<f64>, v: &DVector<f64>, l: usize) -> DVector<f64> {
    let n = a.nrows();
    if l == 0 {
        return expm(a) * v;
    }
    let m = n + l;
    let mut aug = DMatrix::<f64>::zeros(m, m);
    aug.view_mut((0, 0), (n, n)).copy_from(a);
    aug.view_mut((0, n), (n, 1)).copy_from(v);
    for i in 0..l - 1 {
        aug[(n + i, n + i + 1)] = 1.0;
    }
    expm(&aug).column(n + l - 1).rows(0, n).into_owned()
}

/// Random symmetric negative-definite matrix with dominant eigenvalue
/// magnitude scaled to `target_dominant`; returns the matrix and the exact
/// dominant magnitude (= `target_dominant` by construction).
pub fn random_sym_neg_def(
    rng: &mut impl Rng,
    n: usize,
    target_dominant: f64,
) -> (DMatrix<f64>, f64) {
    let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let a = -(&m * m.transpose()) / n as f64 - DMatrix::identity(n, n) * 0.05;
    let eig = a.clone().symmetric_eigen();
    let dominant = eig.eigenvalues.iter().map(|v| v.abs()).fold(0.0, f64::max);
    (a * (target_dominant / dominant), target_dominant)
}

// ---------------------------------------------------------------------------
// exact propagator of the discrete diffusion-advection operator

/// Symbols of the centred-diffusion and third-order-upwind stencils for one
/// Fourier mode at angle `theta = 2 pi m / n` (grid spacing `h`). The
/// upwind bias follows the sign of the advection coefficient.
fn stencil_symbol(theta: f64, h: f64, nu: f64) -> Complex<f64> {
    let e = |k: f64| Complex::from_polar(1.0, k * theta);
    let diff = (2.0 * theta.cos() - 2.0) / (h * h);
    let adv = if nu >= 0.0 {
        (-e(2.0) + 6.0 * e(1.0) - 3.0 - 2.0 * e(-1.0)) / (6.0 * h)
    } else {
        (e(-2.0) - 6.0 * e(-1.0) + 3.0 + 2.0 * e(1.0)) / (6.0 * h)
    };
    Complex::new(diff, 0.0) + nu * adv
}

/// Exact solution at time `t` of the semi-discrete problem
/// `u' = lap_h(u) + nu (Dx u + Dy u)` (periodic `n x n` grid over
/// `[-1,1]^2`, row-major), for the same stencils the library discretises
/// with. One complex 2D FFT each way.
pub fn spectral_diff_adv_solution(n: usize, nu: f64, u0: &[f64], t: f64) -> Vec<f64> {
    assert_eq!(u0.len(), n * n);
    let h = 2.0 / n as f64;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut data: Vec<Complex<f64>> = u0.iter().map(|&v| Complex::new(v, 0.0)).collect();

    // rows (y direction, contiguous)
    for row in data.chunks_mut(n) {
        fwd.process(row);
    }
    // columns (x direction)
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        fwd.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }

    for mi in 0..n {
        let tx = 2.0 * std::f64::consts::PI * mi as f64 / n as f64;
        let lx = stencil_symbol(tx, h, nu);
        for mj in 0..n {
            let ty = 2.0 * std::f64::consts::PI * mj as f64 / n as f64;
            let lambda = lx + stencil_symbol(ty, h, nu);
            data[mi * n + mj] *= (lambda * t).exp();
        }
    }

    for j in 0..n {
        for i in 0..n {
            col[i] = data[i * n + j];
        }
        inv.process(&mut col);
        for i in 0..n {
            data[i * n + j] = col[i];
        }
    }
    for row in data.chunks_mut(n) {
        inv.process(row);
    }

    let scale = 1.0 / (n * n) as f64;
    data.iter().map(|c| c.re * scale).collect()
}
