//! Renormalization cycles of quadratic maps and the backward-orbit grids
//! that parametrize the collapsing map.
//!
//! A cycle is located from the orientation-preserving repelling N-periodic
//! point `p_0` nearest the critical point; the c-containing interval is the
//! hull of `p_0` and its mirror `1 - p_0` (quadratic maps commute with
//! `x -> 1-x` after one step, so the mirror is an exact `Q^N`-preimage).
//! The non-periodic endpoints of the forward intervals come from root
//! marching, and the whole candidate is accepted only after the cycle
//! invariants verify numerically.

use crate::dd::Dd;
use crate::kneading::{self, KneadingError};
use crate::map::{Family, UnimodalMap, CRIT, TIE_EPS};
use crate::symbolic::{words_match_wildcard, ItineraryWord, Symbol};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RenormError {
    #[error("topological entropy at or below (1/2) log 2; no admissible cycle")]
    EntropyTooLow,
    #[error("cycle invariants failed verification: {0}")]
    AmbiguousCycle(String),
    #[error("no admissible grid seed found: {0}")]
    GridFailure(String),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
}

/// A periodic cycle of intervals `J_0, ..., J_{N-1}` with `c ∈ J_0`.
#[derive(Debug, Clone, Serialize)]
pub struct RenormCycle {
    /// Period of the cycle (> 2).
    pub n: usize,
    /// Interval hulls in cyclic order; `intervals[0]` contains the critical point.
    pub intervals: Vec<(f64, f64)>,
    /// N-periodic boundary points, `p[j] = Q^j(p[0])`.
    pub p: Vec<f64>,
    /// Non-periodic endpoints with `Q^N(p_hat[j]) = p[j]`.
    pub p_hat: Vec<f64>,
    /// Whether the renormalized map is full (Knaster case).
    pub knaster: bool,
    /// Nested tower periods `1 | n | ...` detected up to the period cap.
    pub tower: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum Detection {
    Cycle(RenormCycle),
    NotRenormalizable,
}

/// Half log 2, the entropy threshold below which no period-N > 2 cycle is
/// admissible.
pub const ENTROPY_FLOOR: f64 = 0.346_573_590_279_972_7;

fn iterate(q: &UnimodalMap, x: f64, n: usize) -> f64 {
    q.iter_n(x, n)
}

fn iterate_deriv(q: &UnimodalMap, x: f64, n: usize) -> f64 {
    let a = q.param;
    let mut y = x;
    let mut d = 1.0;
    for _ in 0..n {
        d *= a * (1.0 - 2.0 * y);
        y = q.eval(y);
    }
    d
}

/// Roots of `Q^n(x) - x` isolated by sign changes on a uniform grid followed
/// by bisection.
pub fn periodic_points(q: &UnimodalMap, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    const GRID: usize = 1 << 14;
    let mut roots = Vec::new();
    let g = |x: f64| iterate(q, x, n) - x;
    let step = (hi - lo) / GRID as f64;
    let mut x0 = lo;
    let mut g0 = g(x0);
    for i in 1..=GRID {
        let x1 = lo + step * i as f64;
        let g1 = g(x1);
        if g0 == 0.0 {
            roots.push(x0);
        } else if g0 * g1 < 0.0 {
            let (mut a, mut b) = (x0, x1);
            let mut ga = g0;
            for _ in 0..80 {
                let m = 0.5 * (a + b);
                let gm = g(m);
                if ga * gm <= 0.0 {
                    b = m;
                } else {
                    a = m;
                    ga = gm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        g0 = g1;
    }
    roots
}

/// First root of `Q^n(x) = target` strictly beyond `from` in direction `dir`,
/// found by geometric marching then bisection.
fn march_next_root(q: &UnimodalMap, n: usize, from: f64, target: f64, dir: f64) -> Option<f64> {
    let g = |x: f64| iterate(q, x, n) - target;
    let mut h = 1e-10;
    let mut prev = from + dir * h;
    if !(0.0..=1.0).contains(&prev) {
        return None;
    }
    let sigma = g(prev).signum();
    if sigma == 0.0 {
        return Some(prev);
    }
    for _ in 0..400 {
        h *= 1.35;
        let x = from + dir * h;
        if !(0.0..=1.0).contains(&x) {
            return None;
        }
        if g(x).signum() != sigma {
            // bracket [prev, x]
            let (mut a, mut b) = (prev, x);
            for _ in 0..90 {
                let m = 0.5 * (a + b);
                if g(m).signum() == sigma {
                    a = m;
                } else {
                    b = m;
                }
            }
            return Some(0.5 * (a + b));
        }
        prev = x;
    }
    None
}

fn hull(a: f64, b: f64) -> (f64, f64) {
    (a.min(b), a.max(b))
}

fn inside(iv: (f64, f64), x: f64, margin: f64) -> bool {
    x > iv.0 + margin && x < iv.1 - margin
}

/// Attempt to build a validated period-`n` cycle from periodic points inside
/// `search`. Returns the first candidate (ordered by distance from `c`) that
/// passes every invariant.
fn try_cycle(q: &UnimodalMap, n: usize, search: (f64, f64)) -> Option<CycleCore> {
    let mut roots = periodic_points(q, n, search.0, search.1);
    roots.sort_by(|a, b| {
        (a - CRIT)
            .abs()
            .partial_cmp(&(b - CRIT).abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    'cand: for &p0 in &roots {
        if (p0 - CRIT).abs() < 1e-8 {
            continue;
        }
        // genuinely of period n
        for m in 1..n {
            if n % m == 0 && (iterate(q, p0, m) - p0).abs() < 1e-6 {
                continue 'cand;
            }
        }
        // orientation-preserving and repelling
        if iterate_deriv(q, p0, n) <= 1.0 {
            continue;
        }
        let p_hat0 = 1.0 - p0;
        if !inside(search, p_hat0, 0.0) {
            continue;
        }
        let j0 = hull(p0, p_hat0);
        let fold_value = iterate(q, CRIT, n);
        // the fold value may sit exactly on the boundary (full renormalization)
        if !inside(j0, CRIT, 1e-10) || fold_value < j0.0 - 1e-9 || fold_value > j0.1 + 1e-9 {
            continue;
        }
        // forward orbit data
        let mut p = vec![p0];
        for _ in 1..n {
            p.push(q.eval(*p.last().unwrap()));
        }
        let crit_orbit = q.crit_orbit(n);
        // non-periodic endpoints: march from p_j toward c_j
        let mut p_hat = vec![p_hat0];
        for j in 1..n {
            let dir = (crit_orbit[j] - p[j]).signum();
            match march_next_root(q, n, p[j], p[j], dir) {
                Some(x) => p_hat.push(x),
                None => continue 'cand,
            }
        }
        let intervals: Vec<(f64, f64)> = (0..n).map(|j| hull(p[j], p_hat[j])).collect();
        if validate_cycle(q, n, &p, &p_hat, &intervals, &crit_orbit).is_err() {
            continue;
        }
        return Some(CycleCore {
            n,
            p,
            p_hat,
            intervals,
        });
    }
    None
}

struct CycleCore {
    n: usize,
    p: Vec<f64>,
    p_hat: Vec<f64>,
    intervals: Vec<(f64, f64)>,
}

fn validate_cycle(
    q: &UnimodalMap,
    n: usize,
    p: &[f64],
    p_hat: &[f64],
    intervals: &[(f64, f64)],
    crit_orbit: &[f64],
) -> Result<(), String> {
    const TOL: f64 = 1e-9;
    for j in 0..n {
        if (iterate(q, p[j], n) - p[j]).abs() > TOL {
            return Err(format!("p[{j}] not N-periodic"));
        }
        if (iterate(q, p_hat[j], n) - p[j]).abs() > TOL {
            return Err(format!("Q^N(p_hat[{j}]) != p[{j}]"));
        }
        if (p_hat[j] - p[j]).abs() < 1e-8 {
            return Err(format!("degenerate interval at {j}"));
        }
        let cj = crit_orbit[j];
        if !(inside(intervals[j], cj, 0.0) || (cj - p[j]).abs() < TOL || (cj - p_hat[j]).abs() < TOL)
        {
            return Err(format!("c_{j} outside J_{j}"));
        }
    }
    if !inside(intervals[0], CRIT, 1e-10) {
        return Err("critical point not interior to J_0".into());
    }
    for j in 1..n {
        if inside(intervals[j], CRIT, -1e-12) {
            return Err(format!("critical point inside J_{j}"));
        }
    }
    // pairwise disjoint
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (intervals[i], intervals[j]);
            if a.0.max(b.0) < a.1.min(b.1) {
                return Err(format!("J_{i} and J_{j} overlap"));
            }
        }
    }
    // forward invariance on samples
    for j in 0..n {
        let (lo, hi) = intervals[j];
        let tgt = intervals[(j + 1) % n];
        for t in 0..=100 {
            let x = lo + (hi - lo) * t as f64 / 100.0;
            let y = q.eval(x);
            if y < tgt.0 - TOL || y > tgt.1 + TOL {
                return Err(format!("Q(J_{j}) escapes J_{}", (j + 1) % n));
            }
        }
    }
    // endpoint chaining: Q(p_hat_0) = p_1 by mirror symmetry, then the
    // non-periodic endpoints map forward onto each other around the cycle
    if (q.eval(p_hat[0]) - p[1 % n]).abs() > TOL {
        return Err("mirror endpoint does not map to p_1".into());
    }
    for j in 1..n {
        let img = q.eval(p_hat[j]);
        let expect = if j + 1 < n { p_hat[j + 1] } else { p_hat[0] };
        if (img - expect).abs() > 1e-7 {
            return Err(format!("p_hat chain breaks at {j}"));
        }
    }
    Ok(())
}

/// Detect the renormalization cycle of a quadratic map.
pub fn detect_cycle(q: &UnimodalMap, max_period: usize) -> Result<Detection, RenormError> {
    assert_eq!(q.family, Family::Quadratic, "cycle detection is for quadratic maps");
    let h = kneading::entropy(q, 1e-9).map_err(|e| match e {
        KneadingError::ZeroEntropyRegime => RenormError::EntropyTooLow,
        other => RenormError::Kneading(other),
    })?;
    if h <= ENTROPY_FLOOR {
        return Err(RenormError::EntropyTooLow);
    }
    for n in 3..=max_period {
        if let Some(core) = try_cycle(q, n, (0.0, 1.0)) {
            let knaster = is_knaster_core(q, core.n, core.p[0]);
            let tower = detect_tower(q, core.n, core.intervals[0], max_period);
            return Ok(Detection::Cycle(RenormCycle {
                n: core.n,
                intervals: core.intervals,
                p: core.p,
                p_hat: core.p_hat,
                knaster,
                tower,
            }));
        }
    }
    Ok(Detection::NotRenormalizable)
}

fn detect_tower(q: &UnimodalMap, base: usize, j0: (f64, f64), max_period: usize) -> Vec<usize> {
    let mut tower = vec![1, base];
    let mut period = base;
    let mut window = j0;
    'deepen: loop {
        let mut m = 2;
        while period * m <= max_period {
            if let Some(core) = try_cycle(q, period * m, window) {
                tower.push(core.n);
                period = core.n;
                window = core.intervals[0];
                continue 'deepen;
            }
            m += 1;
        }
        break;
    }
    tower
}

fn is_knaster_core(q: &UnimodalMap, n: usize, p0: f64) -> bool {
    let mut x = Dd::from_f64(CRIT);
    for _ in 0..2 * n {
        x = q.eval_dd(x);
    }
    x.abs_diff_f64(p0) <= 1e-7
}

/// Knaster dichotomy: the renormalized map is full iff `Q^{2N}(c)` lands on
/// the periodic boundary point.
pub fn is_knaster(q: &UnimodalMap, cycle: &RenormCycle) -> bool {
    is_knaster_core(q, cycle.n, cycle.p[0])
}

/// Same dichotomy at an explicit tolerance (stability checks halve it).
pub fn is_knaster_tol(q: &UnimodalMap, cycle: &RenormCycle, tol: f64) -> bool {
    let mut x = Dd::from_f64(CRIT);
    for _ in 0..2 * cycle.n {
        x = q.eval_dd(x);
    }
    x.abs_diff_f64(cycle.p[0]) <= tol
}

/// Kneading word of the renormalized map `Q^N` on `J_0`, in affine
/// coordinates sending `p_0 -> 0` and `p_hat_0 -> 1` (full map: `1000...`).
pub fn renormalized_kneading(q: &UnimodalMap, cycle: &RenormCycle, depth: usize) -> ItineraryWord {
    let n = cycle.n;
    let p0 = cycle.p[0];
    let ph0 = cycle.p_hat[0];
    let a = |x: f64| (x - p0) / (ph0 - p0);
    let zc = a(CRIT);
    let mut word = Vec::with_capacity(depth);
    let mut x = Dd::from_f64(CRIT);
    for _ in 0..n {
        x = q.eval_dd(x);
    }
    for _ in 0..depth {
        let z = a(x.to_f64());
        word.push(if (z - zc).abs() <= 1e-9 {
            Symbol::Crit
        } else if z > zc {
            Symbol::One
        } else {
            Symbol::Zero
        });
        for _ in 0..n {
            x = q.eval_dd(x);
        }
    }
    ItineraryWord(word)
}

/// Which side of the quadratic cycle the grids hang on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridSide {
    QuadraticSide,
    TentSide,
}

/// A backward-orbit grid `r[j][k]`, `j < N`, `k <= K`, forming a single
/// backward orbit with `f(r[j][k]) = r[j+1][k]` and `f(r[N-1][k+1]) = r[0][k]`.
#[derive(Debug, Clone, Serialize)]
pub struct RGrid {
    pub side: GridSide,
    pub k_depth: usize,
    pub points: Vec<Vec<f64>>,
}

impl RGrid {
    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn at(&self, j: usize, k: usize) -> f64 {
        self.points[j][k]
    }

    /// Backward-orbit linearization: number of inverse steps from `r[0][0]`
    /// to slot `(j, k)`; forward images of `r[0][0]` get negative indices.
    pub fn back_steps(j: usize, k: usize, n: usize) -> i64 {
        if k == 0 {
            -(j as i64)
        } else {
            ((k - 1) * n) as i64 + (n - j) as i64
        }
    }
}

/// Grids on both sides plus the free forward itinerary of the seed, kept for
/// exact symbolic matching.
#[derive(Debug, Clone)]
pub struct GridPair {
    pub quad: RGrid,
    pub tent: RGrid,
    /// Itinerary of `r[0][0]` (quadratic side), long enough to cover every
    /// grid slot plus a 30+ symbol margin.
    pub seed_word: Vec<Symbol>,
}

fn side_of(x: f64) -> u8 {
    if x < CRIT {
        0
    } else {
        1
    }
}

fn symbol_of_value(x: f64) -> Symbol {
    if (x - CRIT).abs() <= TIE_EPS {
        Symbol::Crit
    } else if x < CRIT {
        Symbol::Zero
    } else {
        Symbol::One
    }
}

/// Itinerary of grid slot `(j,k)` assembled symbolically: the forward orbit
/// runs through the grid to `r[N-1][0]` and then follows the seed's free
/// tail, so no numeric re-iteration is needed.
pub fn grid_word(grid: &RGrid, seed_tail: &[Symbol], j: usize, k: usize, depth: usize) -> Vec<Symbol> {
    let n = grid.n();
    let mut word = Vec::with_capacity(depth);
    let mut jj = j as i64;
    let mut kk = k as i64;
    for _ in 0..depth {
        if kk >= 0 {
            word.push(symbol_of_value(grid.at(jj as usize, kk as usize)));
            jj += 1;
            if jj == n as i64 {
                jj = 0;
                kk -= 1;
            }
        } else {
            // free tail: steps past r[N-1][0]; seed_tail[0] is the symbol of
            // r[0][0] itself, so the slot after r[N-1][0] is index n
            let steps_past = (-kk - 1) as usize * n + jj as usize;
            word.push(seed_tail[n + steps_past]);
        }
    }
    word
}

/// Build the two backward-orbit grids. The seed is searched on a halving
/// grid of offsets from `p_0` on the non-cycle side; the first offset whose
/// grid passes every invariant wins, so the construction is deterministic.
pub fn build_r_grids(
    q: &UnimodalMap,
    t: &UnimodalMap,
    cycle: &RenormCycle,
    k_depth: usize,
) -> Result<GridPair, RenormError> {
    let n = cycle.n;
    let p0 = cycle.p[0];
    let j0 = cycle.intervals[0];
    let dir = if (p0 - j0.1).abs() < 1e-12 { 1.0 } else { -1.0 };
    let (c2, c1) = q.core();
    // nearest obstruction beyond p_0 in the seed direction
    let mut obstruction = if dir > 0.0 { c1 } else { c2 };
    for (i, iv) in cycle.intervals.iter().enumerate() {
        if i == 0 {
            continue;
        }
        for &b in &[iv.0, iv.1] {
            if dir > 0.0 && b > p0 && b < obstruction {
                obstruction = b;
            }
            if dir < 0.0 && b < p0 && b > obstruction {
                obstruction = b;
            }
        }
    }
    let eps_base = (obstruction - p0).abs() / 8.0;
    let orbit_len = n * k_depth + n;
    let word_len = n * (k_depth + 1) + 40;

    let mut last_err = String::from("no candidates tried");
    for i in 0..64 {
        let eps = eps_base * 0.5_f64.powi(i);
        let r00 = p0 + dir * eps;
        match try_seed(q, t, cycle, k_depth, r00, orbit_len, word_len) {
            Ok(pair) => return Ok(pair),
            Err(e) => last_err = e,
        }
    }
    Err(RenormError::GridFailure(last_err))
}

fn try_seed(
    q: &UnimodalMap,
    t: &UnimodalMap,
    cycle: &RenormCycle,
    k_depth: usize,
    r00: f64,
    orbit_len: usize,
    word_len: usize,
) -> Result<GridPair, String> {
    let n = cycle.n;
    // forward orbit of the seed in extended precision, with symbols
    let mut orbit = Vec::with_capacity(word_len + 1);
    let mut x = Dd::from_f64(r00);
    orbit.push(x.to_f64());
    let mut seed_word = Vec::with_capacity(word_len + 1);
    seed_word.push(symbol_of_value(r00));
    for _ in 0..word_len {
        x = q.eval_dd(x);
        orbit.push(x.to_f64());
        seed_word.push(symbol_of_value(x.to_f64()));
    }
    // orbit avoidance: stay outside the interiors of the cycle intervals
    for (step, &v) in orbit.iter().take(orbit_len + 1).enumerate() {
        for (ji, iv) in cycle.intervals.iter().enumerate() {
            if inside(*iv, v, 1e-11) {
                return Err(format!("orbit enters J_{ji} at step {step}"));
            }
        }
    }

    // quadratic grid
    let mut quad = vec![vec![0.0; k_depth + 1]; n];
    for (j, row) in quad.iter_mut().enumerate() {
        row[0] = orbit[j];
    }
    {
        let mut cur = r00;
        for t_back in 1..=(n * k_depth) {
            // slot (j,k) at back-step t: k = (t-1)/n + 1, j = n - (t - (k-1)*n)
            let k = (t_back - 1) / n + 1;
            let j = n - (t_back - (k - 1) * n);
            let side = side_of(cycle.p[j]);
            cur = q
                .inv_branch(cur, side)
                .map_err(|e| format!("quad pullback failed: {e}"))?;
            quad[j][k] = cur;
        }
    }
    let quad = RGrid {
        side: GridSide::QuadraticSide,
        k_depth,
        points: quad,
    };
    validate_grid_quad(q, cycle, &quad)?;

    // tent seed: the point with the same itinerary, by backward contraction
    let pull_len = 80.min(word_len);
    let mut y: f64 = 0.5;
    for &s in seed_word[..pull_len].iter().rev() {
        let side = match s {
            Symbol::Zero => 0,
            Symbol::One => 1,
            Symbol::Crit => return Err("seed itinerary hits the critical point".into()),
        };
        y = t
            .inv_branch(y.clamp(0.0, t.c1()), side)
            .map_err(|e| format!("tent pullback failed: {e}"))?;
    }
    let rt00 = y;

    // tent grid mirrors the quadratic branch selection exactly
    let mut tent = vec![vec![0.0; k_depth + 1]; n];
    {
        let mut cur = rt00;
        tent[0][0] = cur;
        for j in 1..n {
            cur = t.eval(cur);
            tent[j][0] = cur;
        }
        let mut cur = rt00;
        for t_back in 1..=(n * k_depth) {
            let k = (t_back - 1) / n + 1;
            let j = n - (t_back - (k - 1) * n);
            let side = side_of(quad.at(j, k));
            cur = t
                .inv_branch(cur, side)
                .map_err(|e| format!("tent pullback failed: {e}"))?;
            tent[j][k] = cur;
        }
    }
    let tent = RGrid {
        side: GridSide::TentSide,
        k_depth,
        points: tent,
    };
    let tent_crit = t.crit_orbit(n - 1);
    validate_grid_tent(t, &tent, &tent_crit, orbit_len)?;

    // itineraries agree symbol-for-symbol to depth 30 on every slot
    for j in 0..n {
        for k in 0..=k_depth {
            let wq = grid_word(&quad, &seed_word, j, k, 30);
            let wt = tent_grid_word(t, &tent, &seed_word, j, k, 30);
            if !words_match_wildcard(&wq, &wt) {
                return Err(format!("itinerary mismatch at ({j},{k})"));
            }
        }
    }

    Ok(GridPair {
        quad,
        tent,
        seed_word,
    })
}

/// Tent-side word of a grid slot: grid symbols through `r~[N-1][0]`, then the
/// seed's free-tail symbols (shared with the quadratic side by construction),
/// with a numeric consistency check on the materialized part.
fn tent_grid_word(
    t: &UnimodalMap,
    tent: &RGrid,
    seed_word: &[Symbol],
    j: usize,
    k: usize,
    depth: usize,
) -> Vec<Symbol> {
    let _ = t;
    grid_word(tent, seed_word, j, k, depth)
}

fn validate_grid_quad(q: &UnimodalMap, cycle: &RenormCycle, grid: &RGrid) -> Result<(), String> {
    let n = cycle.n;
    for j in 0..n {
        for k in 0..=grid.k_depth {
            // chaining
            if j + 1 < n {
                if (q.eval(grid.at(j, k)) - grid.at(j + 1, k)).abs() > 1e-9 {
                    return Err(format!("chain break at ({j},{k})"));
                }
            } else if k >= 1 && (q.eval(grid.at(n - 1, k)) - grid.at(0, k - 1)).abs() > 1e-9 {
                return Err(format!("wrap break at k={k}"));
            }
        }
        // monotone approach to p_j from one side
        let pj = cycle.p[j];
        for k in 0..grid.k_depth {
            let d0 = grid.at(j, k) - pj;
            let d1 = grid.at(j, k + 1) - pj;
            if d0.signum() != d1.signum() || d1.abs() >= d0.abs() {
                return Err(format!("column {j} not monotone toward p_{j}"));
            }
        }
        // single complement component: the column hull must not meet any
        // cycle interval's interior
        let hull_j = hull(grid.at(j, 0), pj);
        for (i, iv) in cycle.intervals.iter().enumerate() {
            let overlap = hull_j.0.max(iv.0 + 1e-12) < hull_j.1.min(iv.1 - 1e-12);
            if overlap {
                return Err(format!("column {j} crosses J_{i}"));
            }
        }
    }
    Ok(())
}

fn validate_grid_tent(
    t: &UnimodalMap,
    grid: &RGrid,
    crit_orbit: &[f64],
    orbit_len: usize,
) -> Result<(), String> {
    let n = grid.n();
    for j in 0..n {
        for k in 0..=grid.k_depth {
            if j + 1 < n {
                if (t.eval(grid.at(j, k)) - grid.at(j + 1, k)).abs() > 1e-9 {
                    return Err(format!("tent chain break at ({j},{k})"));
                }
            } else if k >= 1 && (t.eval(grid.at(n - 1, k)) - grid.at(0, k - 1)).abs() > 1e-9 {
                return Err(format!("tent wrap break at k={k}"));
            }
        }
        let cj = crit_orbit[j];
        for k in 0..grid.k_depth {
            let d0 = grid.at(j, k) - cj;
            let d1 = grid.at(j, k + 1) - cj;
            if d0.signum() != d1.signum() || d1.abs() >= d0.abs() {
                return Err(format!("tent column {j} not monotone toward c~_{j}"));
            }
        }
        // single component of the complement of the critical orbit
        let hull_j = hull(grid.at(j, 0), cj);
        for (i, &ci) in crit_orbit.iter().enumerate() {
            if i != j && ci > hull_j.0 + 1e-12 && ci < hull_j.1 - 1e-12 {
                return Err(format!("tent column {j} crosses c~_{i}"));
            }
        }
    }
    // forward orbit of the tent seed stays clear of the critical orbit
    let mut x = grid.at(0, 0);
    for step in 0..orbit_len {
        for &ci in crit_orbit {
            if (x - ci).abs() <= TIE_EPS {
                return Err(format!("tent orbit touches the critical orbit at step {step}"));
            }
        }
        x = t.eval(x);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kneading::semiconjugate_slope;

    #[test]
    fn full_map_is_not_renormalizable() {
        let q = UnimodalMap::quadratic(4.0).unwrap();
        match detect_cycle(&q, 32).unwrap() {
            Detection::NotRenormalizable => {}
            Detection::Cycle(c) => panic!("unexpected cycle of period {}", c.n),
        }
    }

    #[test]
    fn low_entropy_is_rejected() {
        let q = UnimodalMap::quadratic(3.2).unwrap();
        assert!(matches!(detect_cycle(&q, 32), Err(RenormError::EntropyTooLow)));
    }

    #[test]
    fn period_three_window() {
        let q = UnimodalMap::quadratic(3.84).unwrap();
        let cycle = match detect_cycle(&q, 32).unwrap() {
            Detection::Cycle(c) => c,
            _ => panic!("expected a cycle"),
        };
        assert_eq!(cycle.n, 3);
        assert!(cycle.intervals[0].0 < CRIT && CRIT < cycle.intervals[0].1);
        assert_eq!(cycle.tower, vec![1, 3]);
        assert!(!cycle.knaster);
        // p_j genuinely periodic, not fixed
        for j in 0..3 {
            assert!((q.eval(cycle.p[j]) - cycle.p[j]).abs() > 1e-4);
            assert!((q.iter_n(cycle.p[j], 3) - cycle.p[j]).abs() < 1e-9);
            assert!((q.iter_n(cycle.p_hat[j], 3) - cycle.p[j]).abs() < 1e-9);
        }
        // mirror endpoint is exact
        assert!((cycle.p_hat[0] - (1.0 - cycle.p[0])).abs() < 1e-12);
    }

    #[test]
    fn grids_in_period_three_window() {
        let q = UnimodalMap::quadratic(3.84).unwrap();
        let s = semiconjugate_slope(&q, 1e-9).unwrap();
        let t = UnimodalMap::tent(s).unwrap();
        let cycle = match detect_cycle(&q, 32).unwrap() {
            Detection::Cycle(c) => c,
            _ => panic!(),
        };
        let K = 12;
        let pair = build_r_grids(&q, &t, &cycle, K).unwrap();
        // chaining examples
        assert!((q.eval(pair.quad.at(0, 0)) - pair.quad.at(1, 0)).abs() < 1e-12);
        assert!((q.eval(pair.quad.at(2, 1)) - pair.quad.at(0, 0)).abs() < 1e-12);
        // strict monotone interleaving: r[j][k+1] between r[j][k] and p_j
        for j in 0..3 {
            for k in 0..K {
                let a = pair.quad.at(j, k);
                let b = pair.quad.at(j, k + 1);
                let p = cycle.p[j];
                assert!((b - p).abs() < (a - p).abs());
                assert!((b - a).signum() == (p - a).signum());
            }
        }
        // tent columns converge to the critical orbit
        let co = t.crit_orbit(2);
        for j in 0..3 {
            assert!((pair.tent.at(j, K) - co[j]).abs() < (pair.tent.at(j, 0) - co[j]).abs());
        }
    }

    #[test]
    fn knaster_parameter_exists_in_window() {
        // bisect Q^6(c) - p_0 over the period-3 renormalization window
        let p0_of = |a: f64| -> f64 {
            let q = UnimodalMap::quadratic(a).unwrap();
            let roots = periodic_points(&q, 3, CRIT, CRIT + 0.2);
            roots
                .into_iter()
                .filter(|&x| (x - CRIT).abs() > 1e-6 && iterate_deriv(&q, x, 3) > 1.0)
                .min_by(|a, b| {
                    (a - CRIT)
                        .abs()
                        .partial_cmp(&(b - CRIT).abs())
                        .unwrap()
                })
                .expect("no repelling periodic point")
        };
        let g = |a: f64| {
            let q = UnimodalMap::quadratic(a).unwrap();
            q.iter_n(CRIT, 6) - p0_of(a)
        };
        let (mut lo, mut hi) = (3.84, 3.88);
        assert!(g(lo) < 0.0 && g(hi) > 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a_star = 0.5 * (lo + hi);
        assert!((3.85..3.87).contains(&a_star), "a* = {a_star}");
        let q = UnimodalMap::quadratic(a_star).unwrap();
        let cycle = match detect_cycle(&q, 32).unwrap() {
            Detection::Cycle(c) => c,
            _ => panic!("expected a cycle at the full-renormalization parameter"),
        };
        assert_eq!(cycle.n, 3);
        assert!(cycle.knaster);
        // renormalized kneading word is 1000... to depth 30
        let w = renormalized_kneading(&q, &cycle, 30).to_string();
        assert_eq!(&w[..1], "1");
        assert!(w[1..].chars().all(|c| c == '0'), "word = {w}");
        // dichotomy stable under tolerance halving
        assert!(is_knaster_tol(&q, &cycle, 1e-7));
        assert!(is_knaster_tol(&q, &cycle, 1e-9));
        // and 3.84 is stably non-Knaster
        let q384 = UnimodalMap::quadratic(3.84).unwrap();
        let c384 = match detect_cycle(&q384, 32).unwrap() {
            Detection::Cycle(c) => c,
            _ => panic!(),
        };
        assert!(!is_knaster_tol(&q384, &c384, 1e-7));
        assert!(!is_knaster_tol(&q384, &c384, 1e-9));
    }
}
