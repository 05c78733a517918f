//! Double-double arithmetic (~106-bit mantissa) for critical-orbit iteration.
//!
//! Forward orbits of expanding interval maps lose roughly one bit per
//! iteration, so plain `f64` symbols become unreliable past depth ~45.
//! Compensated arithmetic keeps itinerary symbols trustworthy to the
//! comparison depths used by the kneading routines (~depth 100).

/// A double-double value `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    // mul_add is a single-rounded FMA, so this is the exact product error.
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn add(self, other: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, other.hi);
        let (t1, t2) = two_sum(self.lo, other.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    #[inline]
    pub fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    #[inline]
    pub fn mul(self, other: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, other.hi);
        let p2 = p2 + self.hi * other.lo + self.lo * other.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, k: f64) -> Dd {
        self.mul(Dd::from_f64(k))
    }

    /// `1 - self`, exact in the high part when `self ∈ [0, 1]`.
    #[inline]
    pub fn one_minus(self) -> Dd {
        Dd::ONE.sub(self)
    }

    #[inline]
    pub fn cmp_f64(self, rhs: f64) -> std::cmp::Ordering {
        let d = self.sub(Dd::from_f64(rhs));
        if d.hi > 0.0 || (d.hi == 0.0 && d.lo > 0.0) {
            std::cmp::Ordering::Greater
        } else if d.hi < 0.0 || (d.hi == 0.0 && d.lo < 0.0) {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Equal
        }
    }

    /// |self - rhs| as f64, for tie tests against small tolerances.
    #[inline]
    pub fn abs_diff_f64(self, rhs: f64) -> f64 {
        let d = self.sub(Dd::from_f64(rhs));
        (d.hi + d.lo).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_tracks_small_residuals() {
        let a = Dd::from_f64(1.0);
        let b = Dd::from_f64(1e-20);
        let s = a.add(b);
        assert_eq!(s.hi, 1.0);
        assert_eq!(s.lo, 1e-20);
    }

    #[test]
    fn mul_is_exact_on_representable_products() {
        let a = Dd::from_f64(3.84);
        let x = Dd::from_f64(0.25);
        let p = a.mul(x);
        assert_eq!(p.to_f64(), 0.96);
        // residual is the true rounding error of 3.84 * 0.25
        assert!(p.lo.abs() < 1e-16);
    }

    #[test]
    fn golden_slope_period_three_closes_up() {
        // s^2 = s + 1 for the golden slope; the critical orbit of the tent
        // map closes up after three steps: c -> s/2 -> (s-1)/2 -> 1/2.
        let s = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let sd = Dd::from_f64(s);
        let c1 = sd.mul_f64(0.5);
        let c2 = sd.mul(c1.one_minus());
        let c3 = sd.mul(c2); // c2 < 1/2, left branch
        // only limited by how well f64 represents the golden slope itself
        assert!(c3.abs_diff_f64(0.5) < 1e-15);
    }
}
