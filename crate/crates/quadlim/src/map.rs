//! Unimodal interval maps: the quadratic family `a x (1-x)` on [0,1] and the
//! tent family `min(s x, s(1-x))`, both with critical point 1/2.

use crate::dd::Dd;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Critical point shared by both families.
pub const CRIT: f64 = 0.5;

/// Tie tolerance: an orbit value within this distance of the critical point
/// is treated as an exact critical hit.
pub const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Quadratic,
    Tent,
}

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("parameter {0} outside the family range")]
    ParamOutOfRange(f64),
    #[error("argument {0} outside [0,1]")]
    DomainError(f64),
    #[error("value {0} has no preimage under the requested branch")]
    NoPreimage(f64),
}

/// A map from one of the two families, identified by family tag and parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnimodalMap {
    pub family: Family,
    pub param: f64,
}

impl UnimodalMap {
    pub fn quadratic(a: f64) -> Result<Self, MapError> {
        if !(1.0..=4.0).contains(&a) {
            return Err(MapError::ParamOutOfRange(a));
        }
        Ok(UnimodalMap {
            family: Family::Quadratic,
            param: a,
        })
    }

    pub fn tent(s: f64) -> Result<Self, MapError> {
        if !(1.0..=2.0).contains(&s) {
            return Err(MapError::ParamOutOfRange(s));
        }
        Ok(UnimodalMap {
            family: Family::Tent,
            param: s,
        })
    }

    /// Map evaluation with domain check.
    pub fn eval_checked(&self, x: f64) -> Result<f64, MapError> {
        if !(0.0..=1.0).contains(&x) {
            return Err(MapError::DomainError(x));
        }
        Ok(self.eval(x))
    }

    /// Map evaluation (caller guarantees `x ∈ [0,1]`).
    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        match self.family {
            Family::Quadratic => self.param * x * (1.0 - x),
            Family::Tent => (self.param * x).min(self.param * (1.0 - x)),
        }
    }

    /// One map step in double-double precision.
    #[inline]
    pub fn eval_dd(&self, x: Dd) -> Dd {
        let p = Dd::from_f64(self.param);
        match self.family {
            Family::Quadratic => p.mul(x).mul(x.one_minus()),
            Family::Tent => {
                if x.cmp_f64(CRIT) == std::cmp::Ordering::Greater {
                    p.mul(x.one_minus())
                } else {
                    p.mul(x)
                }
            }
        }
    }

    /// n-fold iterate in plain f64.
    pub fn iter_n(&self, x: f64, n: usize) -> f64 {
        let mut y = x;
        for _ in 0..n {
            y = self.eval(y);
        }
        y
    }

    /// Critical value `c1 = f(c)`.
    #[inline]
    pub fn c1(&self) -> f64 {
        self.eval(CRIT)
    }

    /// Core interval `[c2, c1] = [f^2(c), f(c)]`.
    pub fn core(&self) -> (f64, f64) {
        let c1 = self.c1();
        (self.eval(c1), c1)
    }

    /// The forward critical orbit `c, c1, c2, ...` to length `n + 1`,
    /// iterated in double-double precision.
    pub fn crit_orbit(&self, n: usize) -> Vec<f64> {
        let mut out = Vec::with_capacity(n + 1);
        let mut x = Dd::from_f64(CRIT);
        out.push(CRIT);
        for _ in 0..n {
            x = self.eval_dd(x);
            out.push(x.to_f64());
        }
        out
    }

    /// Left inverse branch (preimage below the critical point).
    pub fn inv_left(&self, y: f64) -> Result<f64, MapError> {
        match self.family {
            Family::Tent => {
                let x = y / self.param;
                if x > CRIT + 1e-12 {
                    return Err(MapError::NoPreimage(y));
                }
                Ok(x.min(CRIT))
            }
            Family::Quadratic => {
                let disc = 0.25 - y / self.param;
                if disc < -1e-14 {
                    return Err(MapError::NoPreimage(y));
                }
                Ok(CRIT - disc.max(0.0).sqrt())
            }
        }
    }

    /// Right inverse branch (preimage above the critical point).
    pub fn inv_right(&self, y: f64) -> Result<f64, MapError> {
        match self.family {
            Family::Tent => {
                let x = 1.0 - y / self.param;
                if x < CRIT - 1e-12 {
                    return Err(MapError::NoPreimage(y));
                }
                Ok(x.max(CRIT))
            }
            Family::Quadratic => {
                let disc = 0.25 - y / self.param;
                if disc < -1e-14 {
                    return Err(MapError::NoPreimage(y));
                }
                Ok(CRIT + disc.max(0.0).sqrt())
            }
        }
    }

    /// Inverse branch selected by a side symbol (0 = left, 1 = right).
    pub fn inv_branch(&self, y: f64, side: u8) -> Result<f64, MapError> {
        match side {
            0 => self.inv_left(y),
            _ => self.inv_right(y),
        }
    }

    /// A Lipschitz bound for the map (`a` for quadratic, `s` for tent).
    #[inline]
    pub fn lipschitz(&self) -> f64 {
        self.param
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_matches_defining_formulas() {
        let q4 = UnimodalMap::quadratic(4.0).unwrap();
        assert_eq!(q4.eval_checked(0.5).unwrap(), 1.0);
        let t2 = UnimodalMap::tent(2.0).unwrap();
        assert_eq!(t2.eval_checked(0.5).unwrap(), 1.0);
        assert!(q4.eval_checked(1.5).is_err());
        assert!(q4.eval_checked(-0.1).is_err());
    }

    #[test]
    fn golden_tent_hits_half() {
        // s * x = 1/2 at x = (s-1)/2 = 0.3090169..., and c3 = c.
        let s = (1.0 + 5.0_f64.sqrt()) / 2.0;
        let t = UnimodalMap::tent(s).unwrap();
        let x = (s - 1.0) / 2.0;
        assert!((x - 0.3090169).abs() < 1e-6);
        assert!((t.eval(x) - 0.5).abs() < 1e-12);
        // forward iteration from c returns to c after 3 steps
        assert!((t.iter_n(CRIT, 3) - CRIT).abs() < 1e-12);
    }

    #[test]
    fn inverse_branches_invert() {
        let q = UnimodalMap::quadratic(3.84).unwrap();
        for &y in &[0.1, 0.3, 0.5, 0.9] {
            let l = q.inv_left(y).unwrap();
            let r = q.inv_right(y).unwrap();
            assert!((q.eval(l) - y).abs() < 1e-12);
            assert!((q.eval(r) - y).abs() < 1e-12);
            assert!(l <= CRIT && r >= CRIT);
        }
        assert!(q.inv_left(0.97).is_err()); // above the critical value
    }

    #[test]
    fn crit_orbit_uses_extended_precision() {
        let q = UnimodalMap::quadratic(3.84).unwrap();
        let orb = q.crit_orbit(6);
        assert_eq!(orb[0], 0.5);
        assert!((orb[1] - 0.96).abs() < 1e-15);
        assert!((orb[2] - 0.147456).abs() < 1e-15);
    }
}
