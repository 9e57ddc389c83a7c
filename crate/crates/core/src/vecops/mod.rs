//! Elementary contiguous-vector kernels shared by all solvers.
//!
//! State vectors are plain `&[f64]` / `Vec<f64>` slices of a fixed length
//! `N`; every vector passed to one solver context must share that length.
//! The checked functions here validate dimensions, tally vector traffic
//! for the bandwidth metric (see [`tally`]), and dispatch to either the
//! [`serial`] or [`parallel`] kernels. Output aliasing an input is
//! expressed through the dedicated in-place entry points ([`axpby`],
//! [`axpbypcz`], [`scale`]), which the solvers use to overwrite buffers at
//! disjoint lifetimes.
//!
//! All kernels are deterministic: the norm reduction uses fixed-size
//! chunks combined in chunk order with Neumaier compensation, so serial
//! and parallel builds produce bitwise-identical values.

pub mod serial;

#[cfg(feature = "parallel")]
pub mod parallel;

use crate::error::{Error, Result};

/// Chunk length of the norm reduction; fixed so the summation tree is
/// independent of scheduling.
pub(crate) const NORM_CHUNK: usize = 4096;

/// Chunk length handed to rayon for elementwise kernels.
#[cfg(feature = "parallel")]
pub(crate) const PAR_CHUNK: usize = 8192;

/// Below this length the elementwise kernels stay on the calling thread
/// even in parallel builds; fork/join overhead dominates otherwise.
#[cfg(feature = "parallel")]
const PAR_MIN_LEN: usize = 1 << 14;

macro_rules! dispatch {
    ($len:expr, $func:ident ( $($arg:expr),* )) => {{
        #[cfg(feature = "parallel")]
        {
            if $len >= PAR_MIN_LEN {
                parallel::$func($($arg),*)
            } else {
                serial::$func($($arg),*)
            }
        }
        #[cfg(not(feature = "parallel"))]
        {
            serial::$func($($arg),*)
        }
    }};
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// `x <- a*x`
pub fn scale(a: f64, x: &mut [f64]) {
    tally::add(2);
    dispatch!(x.len(), scale(a, x));
}

/// `out <- a*x`
pub fn scale_into(a: f64, x: &[f64], out: &mut [f64]) -> Result<()> {
    check_len(x.len(), out.len())?;
    tally::add(2);
    dispatch!(x.len(), scale_into(a, x, out));
    Ok(())
}

/// `y <- a*x + b*y`
pub fn axpby(a: f64, x: &[f64], b: f64, y: &mut [f64]) -> Result<()> {
    check_len(x.len(), y.len())?;
    tally::add(3);
    dispatch!(x.len(), axpby(a, x, b, y));
    Ok(())
}

/// `out <- a*x + b*y`
pub fn axpby_into(a: f64, x: &[f64], b: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
    check_len(x.len(), y.len())?;
    check_len(x.len(), out.len())?;
    tally::add(3);
    dispatch!(x.len(), axpby_into(a, x, b, y, out));
    Ok(())
}

/// `z <- a*x + b*y + c*z`
pub fn axpbypcz(a: f64, x: &[f64], b: f64, y: &[f64], c: f64, z: &mut [f64]) -> Result<()> {
    check_len(x.len(), y.len())?;
    check_len(x.len(), z.len())?;
    tally::add(4);
    dispatch!(x.len(), axpbypcz(a, x, b, y, c, z));
    Ok(())
}

/// `out <- a*x + b*y + c*z`
pub fn axpbypcz_into(
    a: f64,
    x: &[f64],
    b: f64,
    y: &[f64],
    c: f64,
    z: &[f64],
    out: &mut [f64],
) -> Result<()> {
    check_len(x.len(), y.len())?;
    check_len(x.len(), z.len())?;
    check_len(x.len(), out.len())?;
    tally::add(4);
    dispatch!(x.len(), axpbypcz_into(a, x, b, y, c, z, out));
    Ok(())
}

/// `out <- x`, bitwise.
pub fn copy(x: &[f64], out: &mut [f64]) -> Result<()> {
    check_len(x.len(), out.len())?;
    tally::add(2);
    dispatch!(x.len(), copy(x, out));
    Ok(())
}

/// l2 norm normalised to sqrt(N): `sqrt(sum x_i^2) / sqrt(N)`.
pub fn l2norm_scaled(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::EmptyVector);
    }
    tally::add(1);
    Ok(dispatch!(x.len(), l2norm_scaled(x)))
}

/// Returns an error if any entry of `x` is NaN or infinite.
pub fn ensure_finite(x: &[f64], what: &'static str) -> Result<()> {
    if x.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

/// Running tally of logical vector reads and writes, the `N_rw` count of
/// the bandwidth metric. Counting rules (units of one N-length vector):
///
/// | operation              | count            |
/// |------------------------|------------------|
/// | `scale`, `scale_into`  | 2 (1 in + 1 out) |
/// | `axpby`, `axpby_into`  | 3 (2 in + 1 out) |
/// | `axpbypcz*`            | 4 (3 in + 1 out) |
/// | `copy`                 | 2                |
/// | `l2norm_scaled`        | 1                |
/// | rhs application        | 2 (caller adds)  |
pub mod tally {
    use std::sync::atomic::{AtomicU64, Ordering};

    static TALLY: AtomicU64 = AtomicU64::new(0);

    /// Adds `n` vector read/write units.
    pub fn add(n: u64) {
        TALLY.fetch_add(n, Ordering::Relaxed);
    }

    /// Resets the tally to zero (start of a benchmark run).
    pub fn reset() {
        TALLY.store(0, Ordering::Relaxed);
    }

    /// Current total.
    pub fn total() -> u64 {
        TALLY.load(Ordering::Relaxed)
    }
}
