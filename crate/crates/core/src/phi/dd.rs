//! Minimal double-double arithmetic for the divided-difference recurrence.
//!
//! A value is an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, giving
//! roughly 32 significant digits. Only the handful of operations the phi
//! module needs are implemented. Products use `mul_add`, which is exact
//! (single rounding) whether it lowers to an fma instruction or to the
//! libm fallback.

#[derive(Clone, Copy, Debug)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// ln(2) to double-double precision.
#[allow(clippy::approx_constant)]
const LN2: Dd = Dd {
    hi: 0.693_147_180_559_945_3,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

/// Requires |a| >= |b| (or a == 0).
#[inline]
fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let err = b - (s - a);
    Dd { hi: s, lo: err }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    let err = a.mul_add(b, -p);
    Dd { hi: p, lo: err }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, rhs: Dd) -> Dd {
        let s = two_sum(self.hi, rhs.hi);
        let t = two_sum(self.lo, rhs.lo);
        let mid = quick_two_sum(s.hi, s.lo + t.hi);
        quick_two_sum(mid.hi, mid.lo + t.lo)
    }

    #[inline]
    pub fn sub(self, rhs: Dd) -> Dd {
        self.add(rhs.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn mul(self, rhs: Dd) -> Dd {
        let p = two_prod(self.hi, rhs.hi);
        let lo = p.lo + self.hi * rhs.lo + self.lo * rhs.hi;
        quick_two_sum(p.hi, lo)
    }

    #[inline]
    pub fn mul_f64(self, rhs: f64) -> Dd {
        let p = two_prod(self.hi, rhs);
        quick_two_sum(p.hi, p.lo + self.lo * rhs)
    }

    pub fn div(self, rhs: Dd) -> Dd {
        let q1 = self.hi / rhs.hi;
        let r = self.sub(rhs.mul_f64(q1));
        let q2 = r.hi / rhs.hi;
        let r = r.sub(rhs.mul_f64(q2));
        let q3 = r.hi / rhs.hi;
        quick_two_sum(q1, q2).add(Dd::from_f64(q3))
    }

    #[inline]
    pub fn div_f64(self, rhs: f64) -> Dd {
        self.div(Dd::from_f64(rhs))
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite()
    }
}

/// dd product of two plain doubles.
#[inline]
pub(crate) fn dd_prod(a: f64, b: f64) -> Dd {
    two_prod(a, b)
}

/// dd sum of two plain doubles.
#[inline]
pub(crate) fn dd_sum(a: f64, b: f64) -> Dd {
    two_sum(a, b)
}

/// exp(x) in double-double precision via argument reduction
/// `x = k ln2 + r`, `|r| <= ln2/2`, and a Taylor series for exp(r).
pub(crate) fn exp_dd(x: Dd) -> Dd {
    if x.hi < -746.0 {
        return Dd::ZERO; // underflows to zero in f64 range
    }
    if x.hi > 709.0 {
        return Dd::from_f64(f64::INFINITY);
    }
    let k = (x.hi / LN2.hi).round();
    let r = x.sub(LN2.mul_f64(k));

    // exp(r) = sum r^n / n!
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for n in 1..64 {
        term = term.mul(r).div_f64(n as f64);
        sum = sum.add(term);
        if term.hi.abs() < 1e-35 * sum.hi.abs() {
            break;
        }
    }

    // scale by 2^k; exact while in range, splitting the exponent keeps the
    // extremes (k near +-1000) representable
    let half_k = (k / 2.0).trunc();
    let s1 = pow2(half_k as i32);
    let s2 = pow2((k - half_k) as i32);
    Dd {
        hi: sum.hi * s1 * s2,
        lo: sum.lo * s1 * s2,
    }
}

fn pow2(k: i32) -> f64 {
    f64::powi(2.0, k)
}

/// factorial as double-double (exact well beyond the l <= 4 range used here)
pub(crate) fn factorial_dd(n: usize) -> Dd {
    let mut f = Dd::ONE;
    for i in 2..=n {
        f = f.mul_f64(i as f64);
    }
    f
}

/// phi_l(z) in double-double precision: Taylor series near zero, upward
/// recursion from exp(z) elsewhere.
pub(crate) fn phi_dd(l: usize, z: Dd) -> Dd {
    if z.hi.abs() < 0.5 {
        // phi_l(z) = sum_k z^k / (k + l)!
        let mut term = Dd::ONE.div(factorial_dd(l));
        let mut sum = term;
        for k in 1..64 {
            term = term.mul(z).div_f64((k + l) as f64);
            sum = sum.add(term);
            if term.hi.abs() < 1e-35 * sum.hi.abs() {
                break;
            }
        }
        sum
    } else {
        let mut p = exp_dd(z);
        for j in 0..l {
            p = p.sub(Dd::ONE.div(factorial_dd(j))).div(z);
        }
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_dd_matches_f64_exp() {
        for &x in &[0.0, 1.0, -1.0, 0.3, -35.0, 100.0, -300.0] {
            let e = exp_dd(Dd::from_f64(x)).value();
            let rel = (e - x.exp()).abs() / x.exp();
            assert!(rel < 1e-15, "x={x}: {e} vs {}", x.exp());
        }
    }

    #[test]
    fn exp_dd_beats_f64_on_a_sum() {
        // e * e^-1 = 1 to dd accuracy
        let p = exp_dd(Dd::ONE).mul(exp_dd(Dd::from_f64(-1.0)));
        assert!((p.value() - 1.0).abs() < 1e-30);
        assert!((p.sub(Dd::ONE).hi).abs() < 1e-30);
    }

    #[test]
    fn dd_mul_recovers_low_part() {
        let a = Dd::from_f64(1.0 + 2f64.powi(-30));
        let sq = a.mul(a);
        // (1 + eps)^2 = 1 + 2 eps + eps^2; eps^2 = 2^-60 lives in the low word
        let exact = 1.0 + 2f64.powi(-29) + 2f64.powi(-60);
        assert!((sq.value() - exact).abs() < 1e-25);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial_dd(0).value(), 1.0);
        assert_eq!(factorial_dd(4).value(), 24.0);
        assert_eq!(factorial_dd(10).value(), 3628800.0);
    }
}
