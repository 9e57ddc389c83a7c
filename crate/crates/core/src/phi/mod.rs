//! Scalar phi functions and Newton divided differences over Leja nodes.
//!
//! `phi_0 = exp` and `phi_{l+1}(z) = (phi_l(z) - 1/l!) / z`. The divided
//! differences of `h(xi) = phi_l(dt * (c + gamma * xi))` are the
//! coefficients `d_m` of the interpolation polynomial built by the Leja
//! kernels. The triangular recurrence is carried out in compensated
//! double-double arithmetic: it loses digits rapidly in plain f64 once the
//! node count grows, and the extended precision keeps it usable up to the
//! node cap.

mod dd;

use crate::error::{Error, Result};
use dd::{dd_prod, dd_sum, phi_dd, Dd};

/// Highest supported phi order; covers every integrator in the registry.
pub const MAX_PHI_ORDER: usize = 4;

/// Cap on interpolation nodes per Leja expansion. Past a few hundred nodes
/// the scalar function values over- or underflow for stiff spectra, so the
/// kernels give up and report non-convergence instead.
pub const MAX_LEJA_NODES: usize = 300;

fn check_order(l: usize) -> Result<()> {
    if l > MAX_PHI_ORDER {
        return Err(Error::UnsupportedPhiOrder(l));
    }
    Ok(())
}

/// phi_l(0) = 1/l!
pub fn phi_at_zero(l: usize) -> Result<f64> {
    check_order(l)?;
    Ok(1.0 / factorial(l))
}

fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

/// Scalar `phi_l(z)` for `l <= 4`.
///
/// Evaluated by a truncated Taylor series for `|z| < 0.5` (the recursion
/// cancels catastrophically near zero) and the upward recursion from
/// `exp(z)` otherwise. Relative accuracy is ~1e-13 for `|z| <= 100`.
pub fn phi(l: usize, z: f64) -> Result<f64> {
    check_order(l)?;
    if !z.is_finite() {
        return Err(Error::NonFinite("phi argument"));
    }
    if z.abs() < 0.5 {
        // phi_l(z) = sum_k z^k / (k + l)!
        let mut term = 1.0 / factorial(l);
        let mut sum = term;
        for k in 1..64 {
            term *= z / (k + l) as f64;
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        Ok(sum)
    } else {
        let mut p = z.exp();
        for j in 0..l {
            p = (p - 1.0 / factorial(j)) / z;
        }
        Ok(p)
    }
}

/// Newton divided differences of `h(xi) = phi_l(dt * (c + gamma * xi))`,
/// extensible one node at a time.
///
/// After `m+1` nodes, `coefficients()[m]` is `h[xi_0, ..., xi_m]`. Adding a
/// node costs O(m): the recursive-node property that makes Leja points
/// preferable to Chebyshev points in the first place. Extending an existing
/// table and building one from scratch over the same nodes follow the same
/// arithmetic path and agree bitwise.
#[derive(Debug)]
pub struct DividedDiffs {
    l: usize,
    dt: f64,
    c: f64,
    gamma: f64,
    /// col[j] = h[xi_j, ..., xi_m] over the nodes seen so far (double-double)
    col: Vec<Dd>,
    nodes: Vec<f64>,
    d: Vec<f64>,
}

impl DividedDiffs {
    pub fn new(l: usize, dt: f64, c: f64, gamma: f64) -> Result<Self> {
        check_order(l)?;
        if !(dt.is_finite() && c.is_finite() && gamma.is_finite()) {
            return Err(Error::NonFinite("divided-difference parameters"));
        }
        Ok(DividedDiffs {
            l,
            dt,
            c,
            gamma,
            col: Vec::new(),
            nodes: Vec::new(),
            d: Vec::new(),
        })
    }

    /// `h(xi) = phi_l(dt * (c + gamma * xi))` in double-double.
    fn eval(&self, xi: f64) -> Dd {
        let arg = dd_prod(self.gamma, xi)
            .add(Dd::from_f64(self.c))
            .mul_f64(self.dt);
        phi_dd(self.l, arg)
    }

    /// Appends node `xi` and returns the new highest coefficient `d_m`.
    pub fn extend(&mut self, xi: f64) -> Result<f64> {
        let h = self.eval(xi);
        if !h.is_finite() {
            return Err(Error::Overflow {
                node: self.nodes.len(),
            });
        }
        let m = self.col.len();
        self.col.push(h);
        for j in (0..m).rev() {
            let denom = dd_sum(xi, -self.nodes[j]);
            if denom.hi == 0.0 {
                return Err(Error::InvalidConfig("duplicate interpolation nodes"));
            }
            let num = self.col[j + 1].sub(self.col[j]);
            self.col[j] = num.div(denom);
        }
        let d = self.col[0].value();
        if !d.is_finite() {
            return Err(Error::Overflow {
                node: self.nodes.len(),
            });
        }
        self.nodes.push(xi);
        self.d.push(d);
        Ok(d)
    }

    /// Newton coefficients `d_0..d_m` accumulated so far.
    pub fn coefficients(&self) -> &[f64] {
        &self.d
    }

    /// Number of nodes consumed.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Divided differences of `phi_l(dt * (c + gamma * xi))` over a node prefix
/// in one call; see [`DividedDiffs`] for the incremental form.
pub fn divided_differences(
    l: usize,
    nodes: &[f64],
    dt: f64,
    c: f64,
    gamma: f64,
) -> Result<DividedDiffs> {
    let mut table = DividedDiffs::new(l, dt, c, gamma)?;
    for &xi in nodes {
        table.extend(xi)?;
    }
    Ok(table)
}

/// Evaluates the Newton-form polynomial with coefficients `d` over `nodes`
/// at the point `x` (Horner form). Test helper and reference evaluator.
pub fn newton_eval(d: &[f64], nodes: &[f64], x: f64) -> f64 {
    let mut p = 0.0;
    for k in (0..d.len()).rev() {
        p = p * (x - nodes[k]) + d[k];
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn phi_at_zero_is_inverse_factorial() {
        let expect = [1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0];
        for (l, &e) in expect.iter().enumerate() {
            assert_eq!(phi(l, 0.0).unwrap(), e);
            assert_eq!(phi_at_zero(l).unwrap(), e);
        }
    }

    #[test]
    fn phi_one_at_one_is_e_minus_one() {
        let v = phi(1, 1.0).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn phi_two_at_minus_two() {
        // (e^-2 + 1) / 4
        let v = phi(2, -2.0).unwrap();
        let expect = ((-2.0f64).exp() + 1.0) / 4.0;
        assert!((v - expect).abs() < 1e-15 * expect);
        assert!((v - 0.283833821).abs() < 1e-9);
    }

    #[test]
    fn phi_rejects_unsupported_order() {
        assert!(matches!(phi(5, 1.0), Err(Error::UnsupportedPhiOrder(5))));
    }

    #[test]
    fn phi_rejects_non_finite() {
        assert!(phi(1, f64::NAN).is_err());
        assert!(phi(0, f64::INFINITY).is_err());
    }

    #[test]
    fn divided_differences_of_constant() {
        // dt = 0 makes h identically phi_l(0) = 1/l!
        for l in 0..=MAX_PHI_ORDER {
            let table = divided_differences(l, &[2.0, -2.0, 0.0, 1.0], 0.0, -3.0, 1.5).unwrap();
            let d = table.coefficients();
            assert_eq!(d[0], 1.0 / factorial(l));
            assert!(d[1..].iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn zeroth_coefficient_is_function_value() {
        let table = divided_differences(2, &[2.0], 0.7, -1.0, 0.25).unwrap();
        let expect = phi(2, 0.7 * (-1.0 + 0.25 * 2.0)).unwrap();
        assert!((table.coefficients()[0] - expect).abs() <= 1e-15 * expect.abs());
    }

    #[test]
    fn two_node_exponential_difference() {
        // l=0, nodes {2, -2}, dt=1, c=0, gamma=0.1:
        // d_1 = (e^0.2 - e^-0.2) / 4
        let table = divided_differences(0, &[2.0, -2.0], 1.0, 0.0, 0.1).unwrap();
        let expect = (0.2f64.exp() - (-0.2f64).exp()) / 4.0;
        let d1 = table.coefficients()[1];
        assert!((d1 - expect).abs() < 1e-15, "{d1} vs {expect}");
    }

    #[test]
    fn incremental_extension_matches_from_scratch() {
        let nodes = crate::leja::generate_leja_nodes(24, 40_001);
        let full = divided_differences(1, &nodes, 0.05, -40.0, 20.0).unwrap();
        let mut incremental = DividedDiffs::new(1, 0.05, -40.0, 20.0).unwrap();
        for (m, &xi) in nodes.iter().enumerate() {
            incremental.extend(xi).unwrap();
            assert_eq!(
                incremental.coefficients(),
                &full.coefficients()[..=m.min(incremental.len() - 1)].to_vec()[..],
            );
        }
        assert_eq!(full.coefficients(), incremental.coefficients());
    }

    #[test]
    fn overflow_is_reported() {
        // dt*(c + gamma*xi) reaches +1000 at xi = 2 -> exp overflows
        let err = divided_differences(0, &[2.0], 1.0, 0.0, 500.0).unwrap_err();
        assert!(matches!(err, Error::Overflow { node: 0 }));
    }

    #[test]
    fn duplicate_nodes_rejected() {
        let err = divided_differences(0, &[1.0, 1.0], 1.0, 0.0, 0.5).unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
    }

    proptest! {
        // z*phi_{l+1}(z) + 1/l! = phi_l(z) across the supported range,
        // to relative 1e-12.
        #[test]
        fn recursion_consistency(
            l in 0usize..MAX_PHI_ORDER,
            // log-uniform |z| in [1e-8, 100] on the negative side, [1e-8, 10] positive
            mag in -8.0f64..2.0,
            negative in proptest::bool::ANY,
        ) {
            let mut z = 10f64.powf(mag);
            if negative { z = -10.0 * z.min(10.0); }
            if z > 10.0 { z = 10.0; }
            let term = z * phi(l + 1, z).unwrap();
            let lhs = term + 1.0 / factorial(l);
            let rhs = phi(l, z).unwrap();
            // residual measured against the terms that cancel: for large
            // negative z the sum itself underflows any pointwise-relative
            // scale long before 1e-12
            let denom = term.abs().max(1.0 / factorial(l));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * denom,
                "l={l} z={z}: {lhs} vs {rhs}");
        }

        // Newton form reproduces h at every node.
        #[test]
        fn newton_reconstruction(
            l in 0usize..=MAX_PHI_ORDER,
            c in -10.0f64..0.0,
            gamma_frac in 0.05f64..1.0,
            dt in 0.01f64..1.5,
            m in 1usize..40,
        ) {
            // keep |dt*(c + gamma*xi)| <= 30 with gamma <= |c|/2
            let gamma = gamma_frac * c.abs() / 2.0;
            prop_assume!(dt * (c.abs() + 2.0 * gamma) <= 30.0);
            let nodes = crate::leja::generate_leja_nodes(m + 1, 20_001);
            let table = divided_differences(l, &nodes, dt, c, gamma).unwrap();
            // reproduction is relative to the scale of h over the node set:
            // the f64 Newton coefficients cannot resolve values dozens of
            // orders below the largest one pointwise
            let scale = nodes
                .iter()
                .map(|&xi| phi(l, dt * (c + gamma * xi)).unwrap().abs())
                .fold(0.0_f64, f64::max);
            for &xi in &nodes {
                let h = phi(l, dt * (c + gamma * xi)).unwrap();
                let p = newton_eval(table.coefficients(), &nodes, xi);
                prop_assert!((p - h).abs() <= 1e-10 * scale,
                    "l={l} dt={dt} c={c} gamma={gamma} xi={xi}: {p} vs {h}");
            }
        }
    }
}
