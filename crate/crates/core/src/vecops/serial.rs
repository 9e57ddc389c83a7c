//! Sequential kernels. These are the reference implementations; the
//! `parallel` module reproduces them chunk-for-chunk so both paths give
//! bitwise-identical results.

use super::NORM_CHUNK;

pub fn scale(a: f64, x: &mut [f64]) {
    for xi in x {
        *xi *= a;
    }
}

pub fn scale_into(a: f64, x: &[f64], out: &mut [f64]) {
    for (o, &xi) in out.iter_mut().zip(x) {
        *o = a * xi;
    }
}

/// `y <- a*x + b*y`
pub fn axpby(a: f64, x: &[f64], b: f64, y: &mut [f64]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = a * xi + b * *yi;
    }
}

/// `out <- a*x + b*y`
pub fn axpby_into(a: f64, x: &[f64], b: f64, y: &[f64], out: &mut [f64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = a * xi + b * yi;
    }
}

/// `z <- a*x + b*y + c*z`
pub fn axpbypcz(a: f64, x: &[f64], b: f64, y: &[f64], c: f64, z: &mut [f64]) {
    for ((zi, &xi), &yi) in z.iter_mut().zip(x).zip(y) {
        *zi = a * xi + b * yi + c * *zi;
    }
}

/// `out <- a*x + b*y + c*z`
pub fn axpbypcz_into(a: f64, x: &[f64], b: f64, y: &[f64], c: f64, z: &[f64], out: &mut [f64]) {
    for (((o, &xi), &yi), &zi) in out.iter_mut().zip(x).zip(y).zip(z) {
        *o = a * xi + b * yi + c * zi;
    }
}

pub fn copy(x: &[f64], out: &mut [f64]) {
    out.copy_from_slice(x);
}

/// Neumaier-compensated sum of squares of one chunk.
pub(super) fn sum_sq_chunk(chunk: &[f64]) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in chunk {
        let sq = x * x;
        let t = sum + sq;
        if sum.abs() >= sq.abs() {
            comp += (sum - t) + sq;
        } else {
            comp += (sq - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Neumaier-compensated sum of the per-chunk partials, in chunk order.
pub(super) fn combine_partials(partials: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for p in partials {
        let t = sum + p;
        if sum.abs() >= p.abs() {
            comp += (sum - t) + p;
        } else {
            comp += (p - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// l2 norm normalised to sqrt(N). The sum of squares is accumulated per
/// fixed-size chunk and the chunk partials are combined in order, so the
/// reduction tree does not depend on how work is scheduled.
pub fn l2norm_scaled(x: &[f64]) -> f64 {
    let total = combine_partials(x.chunks(NORM_CHUNK).map(sum_sq_chunk));
    (total / x.len() as f64).sqrt()
}
