//! Finite representations of inverse-limit points, the shift homeomorphism,
//! the metric, natural chains, mesh estimation, and endpoint enumeration.
//!
//! A point is a backward orbit `(..., x_{-1}, x_0)` with `f(x_{-i-1}) = x_{-i}`
//! and all coordinates in `[0, c_1]`; we store finitely many coordinates plus
//! a tail descriptor that determines every deeper one.

use crate::kneading::{self, KneadingError};
use crate::map::{MapError, UnimodalMap, CRIT, TIE_EPS};
use crate::renorm::RGrid;
use crate::symbolic::{Symbol, ItineraryWord};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InvLimError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error("backward orbit inconsistent at depth {0}")]
    Inconsistent(usize),
    #[error("tail cannot be extended at depth {0}")]
    DepthExhausted(usize),
    #[error("two chain boundary points closer than 4x the glue width")]
    DegenerateChain,
    #[error("critical orbit not periodic to the required depth")]
    NotPeriodic,
    #[error("points live on different maps")]
    SpaceMismatch,
}

/// How the backward orbit continues past the deepest stored coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Tail {
    /// Left-branch pullbacks forever; coordinates decay to the fixed point 0.
    ZeroTail,
    /// Backward orbit follows a periodic cycle with the given itinerary word.
    PeriodicTail(ItineraryWord),
    /// Backward orbit continues along a backward-orbit grid starting at
    /// slot `(j, k)` (the next coordinate to emit).
    GridAnchor { j: usize, k: usize },
}

/// An inverse-limit point: coordinates `coords[i] = x_{-i}` plus a tail.
#[derive(Debug, Clone, Serialize)]
pub struct ILPoint {
    pub map: UnimodalMap,
    pub coords: Vec<f64>,
    pub tail: Tail,
}

pub const CONSISTENCY_TOL: f64 = 1e-10;

/// Default representable depth; the metric truncation error 2^{-23} is far
/// below every tolerance used elsewhere.
pub const DEFAULT_DEPTH: usize = 24;

impl ILPoint {
    /// Validated constructor: checks `f(x_{-i-1}) = x_{-i}` at every stored
    /// depth and the tail consistency condition.
    pub fn new(map: UnimodalMap, coords: Vec<f64>, tail: Tail) -> Result<ILPoint, InvLimError> {
        assert!(!coords.is_empty());
        for i in 0..coords.len() - 1 {
            if (map.eval(coords[i + 1]) - coords[i]).abs() > CONSISTENCY_TOL {
                return Err(InvLimError::Inconsistent(i));
            }
        }
        let p = ILPoint { map, coords, tail };
        p.check_tail()?;
        Ok(p)
    }

    fn check_tail(&self) -> Result<(), InvLimError> {
        let deepest = *self.coords.last().unwrap();
        match &self.tail {
            Tail::ZeroTail => {
                // exact zero, or the all-0 backward continuation must exist,
                // which only needs a left preimage (always present)
                Ok(())
            }
            Tail::PeriodicTail(word) => {
                let cycle = realize_periodic(&self.map, &word.0)?;
                let ok = cycle.iter().any(|&z| (z - deepest).abs() <= 1e-8);
                if ok {
                    Ok(())
                } else {
                    Err(InvLimError::Inconsistent(self.coords.len() - 1))
                }
            }
            Tail::GridAnchor { .. } => Ok(()),
        }
    }

    /// The fixed endpoint `0bar = (..., 0, 0, 0)`.
    pub fn zero(map: UnimodalMap, depth: usize) -> ILPoint {
        ILPoint {
            map,
            coords: vec![0.0; depth + 1],
            tail: Tail::ZeroTail,
        }
    }

    pub fn depth(&self) -> usize {
        self.coords.len() - 1
    }

    /// Projection `pi_k(x) = x_{-k}`; asks the tail (and optionally a grid)
    /// for coordinates beyond the stored depth.
    pub fn proj(&self, k: usize, grid: Option<&RGrid>) -> Result<f64, InvLimError> {
        if k < self.coords.len() {
            return Ok(self.coords[k]);
        }
        let mut v = *self.coords.last().unwrap();
        let mut tail = self.tail.clone();
        for d in self.coords.len()..=k {
            v = extend_tail(&self.map, v, &mut tail, grid).ok_or(InvLimError::DepthExhausted(d))?;
        }
        Ok(v)
    }

    /// Shift homeomorphism: append `f(x_0)`.
    pub fn shift(&self) -> ILPoint {
        let mut coords = Vec::with_capacity(self.coords.len() + 1);
        coords.push(self.map.eval(self.coords[0]));
        coords.extend_from_slice(&self.coords);
        ILPoint {
            map: self.map,
            coords,
            tail: self.tail.clone(),
        }
    }

    /// Inverse shift: drop `x_0` and extend one coordinate from the tail, so
    /// the representable depth is preserved.
    pub fn unshift(&self, grid: Option<&RGrid>) -> Result<ILPoint, InvLimError> {
        let mut coords = self.coords[1..].to_vec();
        if coords.is_empty() {
            return Err(InvLimError::DepthExhausted(0));
        }
        let mut tail = self.tail.clone();
        let last = *coords.last().unwrap();
        let next = extend_tail(&self.map, last, &mut tail, grid)
            .ok_or(InvLimError::DepthExhausted(self.coords.len()))?;
        coords.push(next);
        Ok(ILPoint {
            map: self.map,
            coords,
            tail,
        })
    }

    pub fn shift_pow(&self, r: i64, grid: Option<&RGrid>) -> Result<ILPoint, InvLimError> {
        let mut p = self.clone();
        if r >= 0 {
            for _ in 0..r {
                p = p.shift();
            }
        } else {
            for _ in 0..(-r) {
                p = p.unshift(grid)?;
            }
        }
        Ok(p)
    }

    /// Backward itinerary word: symbols of `x_0, x_{-1}, ..., x_{-len}`.
    pub fn backward_word(&self, len: usize) -> Vec<Symbol> {
        let mut w = Vec::with_capacity(len + 1);
        for k in 0..=len {
            let v = match self.proj(k, None) {
                Ok(v) => v,
                Err(_) => break,
            };
            w.push(if (v - CRIT).abs() <= TIE_EPS {
                Symbol::Crit
            } else if v < CRIT {
                Symbol::Zero
            } else {
                Symbol::One
            });
        }
        w
    }

    /// Equality decided symbolically first (backward itineraries), then
    /// numerically (coordinatewise within 1e-9).
    pub fn same_point(&self, other: &ILPoint) -> bool {
        if self.map != other.map {
            return false;
        }
        let d = self.depth().min(other.depth());
        let wa = self.backward_word(d);
        let wb = other.backward_word(d);
        if !crate::symbolic::words_match_wildcard(&wa, &wb) {
            return false;
        }
        (0..=d).all(|k| (self.coords[k] - other.coords[k]).abs() <= 1e-9)
    }
}

fn extend_tail(map: &UnimodalMap, last: f64, tail: &mut Tail, grid: Option<&RGrid>) -> Option<f64> {
    match tail {
        Tail::ZeroTail => map.inv_left(last).ok(),
        Tail::PeriodicTail(word) => {
            let cycle = realize_periodic(map, &word.0).ok()?;
            let len = cycle.len();
            let idx = (0..len).min_by(|&a, &b| {
                (cycle[a] - last)
                    .abs()
                    .partial_cmp(&(cycle[b] - last).abs())
                    .unwrap()
            })?;
            if (cycle[idx] - last).abs() > 1e-7 {
                return None;
            }
            Some(cycle[(idx + len - 1) % len])
        }
        Tail::GridAnchor { j, k } => {
            let g = grid?;
            if *k > g.k_depth {
                return None;
            }
            let v = g.at(*j, *k);
            // advance to the predecessor slot
            if *j == 0 {
                *j = g.n() - 1;
                *k += 1;
            } else {
                *j -= 1;
            }
            Some(v)
        }
    }
}

/// Realize the periodic cycle with the given forward itinerary word by
/// backward contraction along the word's inverse branches.
pub fn realize_periodic(map: &UnimodalMap, word: &[Symbol]) -> Result<Vec<f64>, InvLimError> {
    assert!(!word.is_empty());
    let len = word.len();
    let mut y = CRIT;
    // pull back through many cycles; inverse branches contract
    for round in 0..80 {
        for &s in word.iter().rev() {
            y = match s {
                Symbol::Zero => map.inv_left(y.min(map.c1()))?,
                Symbol::One => map.inv_right(y.min(map.c1()))?,
                Symbol::Crit => CRIT,
            };
        }
        if round > 4 && (map.iter_n(y, len) - y).abs() < 1e-14 {
            break;
        }
    }
    if (map.iter_n(y, len) - y).abs() > CONSISTENCY_TOL {
        return Err(InvLimError::Inconsistent(0));
    }
    let mut cycle = Vec::with_capacity(len);
    let mut z = y;
    for _ in 0..len {
        cycle.push(z);
        z = map.eval(z);
    }
    Ok(cycle)
}

/// Truncated metric `d(x, y) = sum 2^{-m} |x_{-m} - y_{-m}|` with a certified
/// truncation bound.
pub fn dist(x: &ILPoint, y: &ILPoint) -> Result<(f64, f64), InvLimError> {
    if x.map != y.map {
        return Err(InvLimError::SpaceMismatch);
    }
    let d = x.depth().min(y.depth());
    let mut sum = 0.0;
    let mut w = 1.0;
    for m in 0..=d {
        sum += w * (x.coords[m] - y.coords[m]).abs();
        w *= 0.5;
    }
    // coordinates live in [0, c1] ⊆ [0, 1]
    Ok((sum, 2.0_f64.powi(-(d as i32))))
}

/// A natural chain of `[0, c_1]` at depth `p`: the boundary set contains every
/// point of `∪_{i<=p} f^{-i}(c)`, and links are the open `glue`-enlargements
/// of the closed partition cells.
#[derive(Debug, Clone, Serialize)]
pub struct Chain {
    pub map: UnimodalMap,
    pub p: usize,
    pub boundaries: Vec<f64>,
    pub glue: f64,
}

impl Chain {
    pub fn link_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    /// Open link interval `(b_i - glue, b_{i+1} + glue)`.
    pub fn link(&self, i: usize) -> (f64, f64) {
        (self.boundaries[i] - self.glue, self.boundaries[i + 1] + self.glue)
    }

    /// Canonical link of a value: the closed cell containing it, ties to the
    /// lower cell at shared boundaries.
    pub fn link_of(&self, v: f64) -> usize {
        let n = self.link_count();
        match self
            .boundaries
            .binary_search_by(|b| b.partial_cmp(&v).unwrap())
        {
            Ok(i) => i.saturating_sub(1).min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    pub fn max_cell(&self) -> f64 {
        self.boundaries
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Backward BFS of critical preimages within `[0, c1]` up to order `p`.
fn critical_preimages(map: &UnimodalMap, p: usize) -> Vec<f64> {
    let c1 = map.c1();
    let mut all = vec![CRIT];
    let mut layer = vec![CRIT];
    for _ in 0..p {
        let mut next = Vec::with_capacity(layer.len() * 2);
        for &y in &layer {
            if y > c1 + 1e-12 {
                continue;
            }
            if let Ok(l) = map.inv_left(y) {
                if (0.0..=c1 + 1e-12).contains(&l) {
                    next.push(l.min(c1));
                }
            }
            if let Ok(r) = map.inv_right(y) {
                if r <= c1 + 1e-12 {
                    next.push(r.min(c1));
                }
            }
        }
        all.extend_from_slice(&next);
        layer = next;
    }
    all
}

/// Natural chain at depth `p`. `glue` defaults to `1e-6` times the minimal
/// boundary gap.
pub fn natural_chain(map: &UnimodalMap, p: usize, glue: Option<f64>) -> Result<Chain, InvLimError> {
    let c1 = map.c1();
    let mut bs = critical_preimages(map, p);
    bs.push(0.0);
    bs.push(c1);
    bs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    let min_gap = bs
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let glue = glue.unwrap_or(1e-6 * min_gap);
    if min_gap < 4.0 * glue {
        return Err(InvLimError::DegenerateChain);
    }
    Ok(Chain {
        map: *map,
        p,
        boundaries: bs,
        glue,
    })
}

/// Check chain property (3): every level-(p+1) cell maps into a single
/// level-p cell.
pub fn verify_refinement(finer: &Chain, coarser: &Chain) -> bool {
    let map = finer.map;
    for i in 0..finer.link_count() {
        let (a, b) = (finer.boundaries[i], finer.boundaries[i + 1]);
        let fa = map.eval(a);
        let fb = map.eval(b);
        let (lo, hi) = (fa.min(fb), fa.max(fb));
        // image must sit inside one closed coarser cell (within glue slack)
        let j = coarser.link_of(0.5 * (lo + hi));
        if lo < coarser.boundaries[j] - 2.0 * coarser.glue
            || hi > coarser.boundaries[j + 1] + 2.0 * coarser.glue
        {
            return false;
        }
    }
    true
}

/// Nerve check: consecutive links overlap, non-consecutive links do not.
pub fn verify_nerve(chain: &Chain) -> bool {
    let n = chain.link_count();
    for i in 0..n {
        for j in i..n {
            let (a0, a1) = chain.link(i);
            let (b0, b1) = chain.link(j);
            let meet = a0.max(b0) < a1.min(b1);
            if j == i || j == i + 1 {
                if !meet {
                    return false;
                }
            } else if meet {
                return false;
            }
        }
    }
    true
}

/// Mesh estimate: sampled lower bound on the largest link diameter in the
/// metric, and the analytic upper bound `2 L^p max|I| + 2^{-p}` (`L` the
/// Lipschitz constant of the map).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MeshReport {
    pub sampled_lower: f64,
    pub analytic_upper: f64,
}

pub fn mesh(chain: &Chain, samples: usize, rng: &mut impl Rng) -> Result<MeshReport, InvLimError> {
    let map = chain.map;
    let p = chain.p;
    let depth = p + 16;
    let mut worst = 0.0_f64;
    for i in 0..chain.link_count() {
        let (lo, hi) = (chain.boundaries[i], chain.boundaries[i + 1]);
        let mut pts = Vec::with_capacity(samples);
        for s in 0..samples {
            // stratified deep coordinate inside the cell
            let t = (s as f64 + rng.gen::<f64>()) / samples as f64;
            let xk = lo + (hi - lo) * t.clamp(1e-6, 1.0 - 1e-6);
            if let Some(pt) = point_through(&map, xk, p, depth, rng) {
                pts.push(pt);
            }
        }
        for a in 0..pts.len() {
            for b in (a + 1)..pts.len() {
                let (d, _) = dist(&pts[a], &pts[b])?;
                worst = worst.max(d);
            }
        }
    }
    let upper = 2.0 * map.lipschitz().powi(p as i32) * chain.max_cell() + 2.0_f64.powi(-(p as i32));
    Ok(MeshReport {
        sampled_lower: worst,
        analytic_upper: upper,
    })
}

/// A representable point whose depth-`p` coordinate is `xk`: forward images
/// above, random admissible pullbacks below.
pub fn point_through(
    map: &UnimodalMap,
    xk: f64,
    p: usize,
    depth: usize,
    rng: &mut impl Rng,
) -> Option<ILPoint> {
    let mut coords = vec![0.0; depth + 1];
    coords[p] = xk;
    for m in (0..p).rev() {
        coords[m] = map.eval(coords[m + 1]);
    }
    let mut y = xk;
    for slot in coords.iter_mut().skip(p + 1) {
        y = random_preimage(map, y, rng)?;
        *slot = y;
    }
    ILPoint::new(*map, coords, Tail::ZeroTail).ok()
}

fn random_preimage(map: &UnimodalMap, y: f64, rng: &mut impl Rng) -> Option<f64> {
    let c1 = map.c1();
    let l = map.inv_left(y.min(c1)).ok();
    let r = map.inv_right(y.min(c1)).ok().filter(|&v| v <= c1 + 1e-12);
    match (l, r) {
        (Some(a), Some(b)) => Some(if rng.gen::<bool>() { a } else { b }),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => None,
    }
}

/// Random representable point of the full (or core) inverse limit.
pub fn random_point(
    map: &UnimodalMap,
    depth: usize,
    rng: &mut impl Rng,
    core_only: bool,
) -> ILPoint {
    let (c2, c1) = map.core();
    loop {
        let x0 = if core_only {
            c2 + (c1 - c2) * rng.gen::<f64>()
        } else {
            c1 * rng.gen::<f64>()
        };
        let mut coords = vec![x0];
        let mut y = x0;
        let mut ok = true;
        for _ in 0..depth {
            let next = if core_only {
                random_core_preimage(map, y, rng)
            } else {
                random_preimage(map, y, rng)
            };
            match next {
                Some(v) => {
                    coords.push(v);
                    y = v;
                }
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        if let Ok(p) = ILPoint::new(*map, coords, Tail::ZeroTail) {
            return p;
        }
    }
}

fn random_core_preimage(map: &UnimodalMap, y: f64, rng: &mut impl Rng) -> Option<f64> {
    let (c2, c1) = map.core();
    let mut options = Vec::with_capacity(2);
    if let Ok(l) = map.inv_left(y.min(c1)) {
        if l >= c2 - 1e-12 {
            options.push(l);
        }
    }
    if let Ok(r) = map.inv_right(y.min(c1)) {
        if r <= c1 + 1e-12 && r >= c2 - 1e-12 {
            options.push(r);
        }
    }
    if options.is_empty() {
        None
    } else {
        let i = rng.gen_range(0..options.len());
        Some(options[i])
    }
}

/// Endpoints of the inverse limit of a map with N-periodic critical point:
/// `0bar` plus the N points whose backward itineraries are the cyclic
/// rotations of the critical-orbit word. Each satisfies `pi_0(e_j) = c_j`.
pub fn endpoints(map: &UnimodalMap, depth: usize) -> Result<Vec<ILPoint>, InvLimError> {
    // periodicity is decided on a word of length 3N (deeper symbols of a
    // slope known only to roundoff drift out of the tie tolerance)
    let n = (1..=8)
        .find(|&n| kneading::kneading(map, 3 * n).period == Some(n))
        .ok_or(InvLimError::NotPeriodic)?;
    // critical orbit word: symbol of c, c_1, ..., c_{N-1}
    let orbit = map.crit_orbit(n - 1);
    let word: Vec<Symbol> = orbit
        .iter()
        .map(|&v| {
            if (v - CRIT).abs() <= TIE_EPS {
                Symbol::Crit
            } else if v < CRIT {
                Symbol::Zero
            } else {
                Symbol::One
            }
        })
        .collect();
    let mut out = vec![ILPoint::zero(*map, depth)];
    for j in 0..n {
        let coords: Vec<f64> = (0..=depth).map(|m| orbit[(j + n * depth - m) % n]).collect();
        let rotation: Vec<Symbol> = (0..n).map(|i| word[(j + i) % n]).collect();
        out.push(ILPoint::new(
            *map,
            coords,
            Tail::PeriodicTail(ItineraryWord(rotation)),
        )?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn golden() -> UnimodalMap {
        UnimodalMap::tent((1.0 + 5.0_f64.sqrt()) / 2.0).unwrap()
    }

    #[test]
    fn shift_fixes_zero() {
        let t = UnimodalMap::tent(2.0).unwrap();
        let z = ILPoint::zero(t, 8);
        let s = z.shift();
        assert!(s.coords.iter().all(|&v| v == 0.0));
        let u = z.unshift(None).unwrap();
        assert!(u.coords.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn unshift_then_shift_is_identity() {
        let map = UnimodalMap::quadratic(3.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x = random_point(&map, 20, &mut rng, false);
            let y = x.unshift(None).unwrap().shift();
            for k in 0..=x.depth().min(y.depth()) {
                assert!((x.coords[k] - y.coords[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn metric_examples() {
        let t = UnimodalMap::tent(2.0).unwrap();
        let z = ILPoint::zero(t, 12);
        assert_eq!(dist(&z, &z).unwrap().0, 0.0);
        // two points differing only in x_0 (within consistency slack) differ
        // by exactly the weight-1 term
        let a = ILPoint::new(t, vec![0.25, 0.125, 0.0625], Tail::ZeroTail).unwrap();
        let b = ILPoint::new(t, vec![0.25 + 5e-11, 0.125, 0.0625], Tail::ZeroTail).unwrap();
        let (d, _) = dist(&a, &b).unwrap();
        assert!((d - 5e-11).abs() < 1e-17);
        // the literal point (..., 0, 0, 1) is not a backward orbit: f(0) = 0 != 1
        assert!(ILPoint::new(t, vec![1.0, 0.0, 0.0], Tail::ZeroTail).is_err());
        // the admissible zero-tail orbit through x_0 = 1 halves backwards,
        // giving distance 4/3 from 0bar
        let c = ILPoint::new(t, vec![1.0, 0.5, 0.25, 0.125, 0.0625], Tail::ZeroTail).unwrap();
        let (d, err) = dist(&z, &c).unwrap();
        assert!((d - (4.0 / 3.0)).abs() < 0.07 + err);
    }

    #[test]
    fn metric_truncation_bound() {
        let map = UnimodalMap::tent(1.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let x = random_point(&map, 26, &mut rng, false);
            let y = random_point(&map, 26, &mut rng, false);
            let shallow_x = ILPoint::new(map, x.coords[..=14].to_vec(), Tail::ZeroTail).unwrap();
            let shallow_y = ILPoint::new(map, y.coords[..=14].to_vec(), Tail::ZeroTail).unwrap();
            let (d_deep, _) = dist(&x, &y).unwrap();
            let (d_shallow, _) = dist(&shallow_x, &shallow_y).unwrap();
            assert!((d_deep - d_shallow).abs() <= 2.0_f64.powi(-13));
        }
    }

    #[test]
    fn chain_examples() {
        let t2 = UnimodalMap::tent(2.0).unwrap();
        let c0 = natural_chain(&t2, 0, None).unwrap();
        assert_eq!(c0.boundaries, vec![0.0, 0.5, 1.0]);
        assert_eq!(c0.link_count(), 2);
        let c1 = natural_chain(&t2, 1, None).unwrap();
        assert_eq!(c1.boundaries, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(c1.link_count(), 4);
        assert!(verify_nerve(&c1));
        let c2 = natural_chain(&t2, 2, None).unwrap();
        assert!(verify_refinement(&c2, &c1));
        assert!(verify_refinement(&c1, &c0));
    }

    #[test]
    fn mesh_respects_analytic_bound() {
        let t2 = UnimodalMap::tent(2.0).unwrap();
        let chain = natural_chain(&t2, 6, None).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let report = mesh(&chain, 6, &mut rng).unwrap();
        assert!(report.sampled_lower > 0.0);
        assert!(report.sampled_lower <= report.analytic_upper + 1e-9);
    }

    #[test]
    fn golden_endpoints() {
        let t = golden();
        let es = endpoints(&t, 18).unwrap();
        assert_eq!(es.len(), 4); // 0bar plus N = 3
        let co = t.crit_orbit(2);
        for j in 0..3 {
            assert!((es[j + 1].coords[0] - co[j]).abs() < 1e-12);
        }
        // each endpoint is fixed by sigma^3 coordinatewise
        for e in &es[1..] {
            let s3 = e.shift().shift().shift();
            for k in 0..=e.depth() {
                assert!((s3.coords[k] - e.coords[k]).abs() < 1e-9);
            }
        }
        // full tent map: critical orbit lands on the fixed point, not periodic
        let t2 = UnimodalMap::tent(2.0).unwrap();
        assert!(matches!(endpoints(&t2, 10), Err(InvLimError::NotPeriodic)));
    }

    #[test]
    fn projection_shift_semiconjugacy() {
        let map = UnimodalMap::quadratic(3.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let x = random_point(&map, 16, &mut rng, false);
            let sx = x.shift();
            for p in 0..=8 {
                let lhs = sx.proj(p, None).unwrap();
                let rhs = map.eval(x.proj(p, None).unwrap());
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn golden_endpoint_shift_cycles() {
        let t = golden();
        let es = endpoints(&t, 18).unwrap();
        // sigma maps the endpoint over c_j to the endpoint over c_{j+1}
        let s = es[1].shift();
        assert!(s.same_point(&es[2]));
    }
}
