//! Rayon kernels. Elementwise ops are chunked identically to the serial
//! path; the norm reduces fixed-size chunk partials in chunk order, so
//! results are bitwise equal to `serial` for identical inputs regardless
//! of the thread count.

use rayon::prelude::*;

use super::serial::{combine_partials, sum_sq_chunk};
use super::{NORM_CHUNK, PAR_CHUNK};

pub fn scale(a: f64, x: &mut [f64]) {
    x.par_chunks_mut(PAR_CHUNK).for_each(|xs| {
        for xi in xs {
            *xi *= a;
        }
    });
}

pub fn scale_into(a: f64, x: &[f64], out: &mut [f64]) {
    out.par_chunks_mut(PAR_CHUNK)
        .zip(x.par_chunks(PAR_CHUNK))
        .for_each(|(os, xs)| {
            for (o, &xi) in os.iter_mut().zip(xs) {
                *o = a * xi;
            }
        });
}

/// `y <- a*x + b*y`
pub fn axpby(a: f64, x: &[f64], b: f64, y: &mut [f64]) {
    y.par_chunks_mut(PAR_CHUNK)
        .zip(x.par_chunks(PAR_CHUNK))
        .for_each(|(ys, xs)| {
            for (yi, &xi) in ys.iter_mut().zip(xs) {
                *yi = a * xi + b * *yi;
            }
        });
}

/// `out <- a*x + b*y`
pub fn axpby_into(a: f64, x: &[f64], b: f64, y: &[f64], out: &mut [f64]) {
    out.par_chunks_mut(PAR_CHUNK)
        .zip(x.par_chunks(PAR_CHUNK))
        .zip(y.par_chunks(PAR_CHUNK))
        .for_each(|((os, xs), ys)| {
            for ((o, &xi), &yi) in os.iter_mut().zip(xs).zip(ys) {
                *o = a * xi + b * yi;
            }
        });
}

/// `z <- a*x + b*y + c*z`
pub fn axpbypcz(a: f64, x: &[f64], b: f64, y: &[f64], c: f64, z: &mut [f64]) {
    z.par_chunks_mut(PAR_CHUNK)
        .zip(x.par_chunks(PAR_CHUNK))
        .zip(y.par_chunks(PAR_CHUNK))
        .for_each(|((zs, xs), ys)| {
            for ((zi, &xi), &yi) in zs.iter_mut().zip(xs).zip(ys) {
                *zi = a * xi + b * yi + c * *zi;
            }
        });
}

/// `out <- a*x + b*y + c*z`
pub fn axpbypcz_into(a: f64, x: &[f64], b: f64, y: &[f64], c: f64, z: &[f64], out: &mut [f64]) {
    out.par_chunks_mut(PAR_CHUNK)
        .zip(x.par_chunks(PAR_CHUNK))
        .zip(y.par_chunks(PAR_CHUNK))
        .zip(z.par_chunks(PAR_CHUNK))
        .for_each(|(((os, xs), ys), zs)| {
            for (((o, &xi), &yi), &zi) in os.iter_mut().zip(xs).zip(ys).zip(zs) {
                *o = a * xi + b * yi + c * zi;
            }
        });
}

pub fn copy(x: &[f64], out: &mut [f64]) {
    out.par_chunks_mut(PAR_CHUNK)
        .zip(x.par_chunks(PAR_CHUNK))
        .for_each(|(os, xs)| os.copy_from_slice(xs));
}

/// l2 norm normalised to sqrt(N); chunk partials are computed in parallel
/// and combined sequentially in chunk order.
pub fn l2norm_scaled(x: &[f64]) -> f64 {
    let partials: Vec<f64> = x.par_chunks(NORM_CHUNK).map(sum_sq_chunk).collect();
    let total = combine_partials(partials.into_iter());
    (total / x.len() as f64).sqrt()
}
