//! Leja node generation on [-2, 2].
//!
//! Nodes are computed greedily over a uniform candidate grid: each new node
//! maximises the product of distances to all previous nodes. The sequence is
//! generated at startup rather than shipped as a data file; the grid is
//! mirror-symmetric and ties in the argmax break toward the positive
//! candidate, so the result is deterministic across platforms.

use std::sync::OnceLock;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::phi::MAX_LEJA_NODES;

/// Candidate grid resolution used for the precomputed default nodes.
pub const DEFAULT_GRID_RESOLUTION: usize = 1_000_001;

/// The precomputed node sequence shared by all solver contexts
/// ([`MAX_LEJA_NODES`] nodes over a million-point grid), generated on first
/// use and cached for the lifetime of the process.
pub fn default_leja_nodes() -> &'static [f64] {
    static NODES: OnceLock<Vec<f64>> = OnceLock::new();
    NODES.get_or_init(|| generate_leja_nodes(MAX_LEJA_NODES, DEFAULT_GRID_RESOLUTION))
}

/// Generates `count` Leja points on [-2, 2] by greedy maximisation of
/// `prod_k |z - xi_k|` over a uniform grid of `grid_resolution` candidates
/// (rounded up to an odd count so the grid contains 0 and is exactly
/// mirror-symmetric).
///
/// The first node is the positive endpoint `+2` (largest modulus, positive
/// tie-break); running products are renormalised by powers of two to avoid
/// over/underflow, which preserves both ordering and the exact symmetry the
/// tie-break relies on.
pub fn generate_leja_nodes(count: usize, grid_resolution: usize) -> Vec<f64> {
    assert!(count >= 1, "need at least one node");
    assert!(count <= 10_000, "node count beyond supported range");
    assert!(grid_resolution >= 11, "grid too coarse");

    let half = grid_resolution / 2;
    let m = 2 * half + 1;
    // z_i = 2 * (i - half) / half: exact endpoints, exact zero, and
    // fl(-x) = -fl(x) makes the grid bitwise mirror-symmetric.
    let cand: Vec<f64> = (0..m)
        .map(|i| 2.0 * (i as f64 - half as f64) / half as f64)
        .collect();

    let mut nodes = Vec::with_capacity(count);
    nodes.push(2.0);

    let mut prod = vec![1.0_f64; m];
    while nodes.len() < count {
        let last = *nodes.last().unwrap();
        let (best_val, best_cand) = update_and_argmax(&cand, &mut prod, last);
        debug_assert!(best_val > 0.0, "all candidates exhausted");
        renormalize(&mut prod, best_val);
        nodes.push(best_cand);
    }
    nodes
}

/// Multiplies every candidate product by |z - last| and returns the best
/// (value, candidate) pair under the total order "larger value first, then
/// larger (more positive) candidate".
fn update_and_argmax(cand: &[f64], prod: &mut [f64], last: f64) -> (f64, f64) {
    #[cfg(feature = "parallel")]
    {
        cand.par_chunks(16_384)
            .zip(prod.par_chunks_mut(16_384))
            .map(|(cs, ps)| chunk_update(cs, ps, last))
            .reduce(|| (f64::NEG_INFINITY, f64::NEG_INFINITY), better)
    }
    #[cfg(not(feature = "parallel"))]
    {
        chunk_update(cand, prod, last)
    }
}

fn chunk_update(cs: &[f64], ps: &mut [f64], last: f64) -> (f64, f64) {
    let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for (&z, p) in cs.iter().zip(ps.iter_mut()) {
        *p *= (z - last).abs();
        best = better(best, (*p, z));
    }
    best
}

#[inline]
fn better(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    // lexicographic max on (value, candidate); no NaNs can appear
    if b.0 > a.0 || (b.0 == a.0 && b.1 > a.1) {
        b
    } else {
        a
    }
}

/// Rescales all products by a power of two when the current maximum drifts
/// far from 1; exact, so ordering and symmetry are untouched.
fn renormalize(prod: &mut [f64], max: f64) {
    if !(1e-64..=1e64).contains(&max) {
        let scale = 2f64.powi(-max.log2().round() as i32);
        #[cfg(feature = "parallel")]
        prod.par_chunks_mut(16_384).for_each(|ps| {
            for p in ps {
                *p *= scale;
            }
        });
        #[cfg(not(feature = "parallel"))]
        for p in prod.iter_mut() {
            *p *= scale;
        }
    }
}
