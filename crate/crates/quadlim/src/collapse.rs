//! The collapsing map from the core inverse limit of a renormalizable
//! quadratic map onto the core inverse limit of its semiconjugate tent map.
//!
//! The map squeezes each cycle continuum to the corresponding tent endpoint
//! and is a homeomorphism elsewhere. Components of the preimage of each
//! boundary strip are classified by the maximal fold level seen in their
//! backward tube; the scalar transfer on each component is piecewise affine
//! between structural anchors (grid points on the tent side), so it depends
//! only on that level.

use crate::folding::{ArcPath, FoldingError, FoldingPath, NodeKind};
use crate::invlim::{self, ILPoint, InvLimError, Tail};
use crate::kneading::{self, KneadingError};
use crate::map::{MapError, UnimodalMap, CRIT, TIE_EPS};
use crate::renorm::{self, Detection, GridPair, RenormCycle, RenormError};
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CollapseError {
    #[error(transparent)]
    Renorm(#[from] RenormError),
    #[error(transparent)]
    Kneading(#[from] KneadingError),
    #[error(transparent)]
    InvLim(#[from] InvLimError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Folding(#[from] FoldingError),
    #[error("map is not renormalizable; no collapsing map exists")]
    NotRenormalizable,
    #[error("classification needs backward data beyond depth {0}")]
    DepthInsufficient(usize),
    #[error("transfer needs grid column {needed} but only {have} are built")]
    GridTooShallow { needed: usize, have: usize },
    #[error("point is not in the core inverse limit")]
    NotInCore,
    #[error("component structure violates the expected symmetry: {0}")]
    AmbiguousComponent(String),
}

/// Configuration for one collapsing map: both maps, the cycle, the grids,
/// and the classification depth budget.
#[derive(Debug, Clone)]
pub struct CollapseConfig {
    pub q: UnimodalMap,
    pub t: UnimodalMap,
    pub cycle: RenormCycle,
    pub grids: GridPair,
    pub k_depth: usize,
    pub knaster: bool,
    pub depth_budget: usize,
    tent_endpoints: Vec<ILPoint>,
    tent_crit: Vec<f64>,
}

impl CollapseConfig {
    pub fn build(a: f64, k_depth: usize, depth_budget: usize) -> Result<CollapseConfig, CollapseError> {
        let q = UnimodalMap::quadratic(a)?;
        let s = kneading::semiconjugate_slope(&q, 1e-9)?;
        let t = UnimodalMap::tent(s)?;
        let cycle = match renorm::detect_cycle(&q, 32)? {
            Detection::Cycle(c) => c,
            Detection::NotRenormalizable => return Err(CollapseError::NotRenormalizable),
        };
        let grids = renorm::build_r_grids(&q, &t, &cycle, k_depth)?;
        let knaster = cycle.knaster;
        let eps = invlim::endpoints(&t, depth_budget)?;
        let tent_endpoints = eps[1..].to_vec();
        let tent_crit = t.crit_orbit(cycle.n - 1);
        Ok(CollapseConfig {
            q,
            t,
            cycle,
            grids,
            k_depth,
            knaster,
            depth_budget,
            tent_endpoints,
            tent_crit,
        })
    }

    pub fn n(&self) -> usize {
        self.cycle.n
    }

    /// Quadratic-side strip `hull(r_{j,0}, p_hat_j)`, clipped to the core.
    pub fn strip_q(&self, j: usize) -> (f64, f64) {
        let (c2, c1) = self.q.core();
        let r = self.grids.quad.at(j, 0);
        let ph = self.cycle.p_hat[j];
        let (lo, hi) = (r.min(ph), r.max(ph));
        (lo.max(c2), hi.min(c1))
    }

    /// Tent-side strip `hull(r~_{j,0}, c~_j)`.
    pub fn strip_t(&self, j: usize) -> (f64, f64) {
        let r = self.grids.tent.at(j, 0);
        let c = self.tent_crit[j];
        (r.min(c), r.max(c))
    }

    /// The tent-side endpoint over `c~_j`.
    pub fn tent_endpoint(&self, j: usize) -> ILPoint {
        self.tent_endpoints[j].clone()
    }

    fn complement(&self, strips: &[(f64, f64)], core: (f64, f64)) -> Vec<(f64, f64)> {
        let mut cuts = vec![core.0, core.1];
        for s in strips {
            cuts.push(s.0);
            cuts.push(s.1);
        }
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut out = Vec::new();
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            if w[1] - w[0] > 1e-9 && !strips.iter().any(|s| mid > s.0 && mid < s.1) {
                out.push((w[0], w[1]));
            }
        }
        out
    }

    pub fn complement_q(&self) -> Vec<(f64, f64)> {
        let strips: Vec<_> = (0..self.n()).map(|j| self.strip_q(j)).collect();
        self.complement(&strips, self.q.core())
    }

    pub fn complement_t(&self) -> Vec<(f64, f64)> {
        let strips: Vec<_> = (0..self.n()).map(|j| self.strip_t(j)).collect();
        self.complement(&strips, self.t.core())
    }
}

/// Case tags of the component classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    Case1,
    Case21,
    Case22,
    Case23,
    Case24,
    Case32,
    Case34,
}

/// The classified component of a point.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentW {
    pub j: usize,
    pub case_tag: CaseTag,
    /// Maximal fold level; `None` means infinite (ray or cycle continuum).
    pub lambda: Option<usize>,
    pub endpoints: Option<(ILPoint, ILPoint)>,
    pub midpoint: Option<ILPoint>,
    pub v_levels: Vec<usize>,
    pub v_hat_levels: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum SideSym {
    S0,
    S1,
    Tie,
}

fn side_sym(v: f64) -> SideSym {
    if (v - CRIT).abs() <= TIE_EPS {
        SideSym::Tie
    } else if v < CRIT {
        SideSym::S0
    } else {
        SideSym::S1
    }
}

/// Internal classification carrying the unfolded model.
pub(crate) struct Classified {
    pub case: CaseTag,
    pub j: usize,
    pub lambda: Option<usize>,
    pub model: Option<ModelData>,
}

pub(crate) struct ModelData {
    pub arc: ArcPath,
    pub depth: usize,
    /// segment of the queried point
    pub seg: usize,
    pub mid_node: Option<usize>,
    pub v_nodes: Vec<usize>,
    pub vhat_nodes: Vec<usize>,
    /// first crossing of `p_j` from the left / right end (t coordinates)
    pub t_v1: f64,
    pub t_vhat1: f64,
}

struct Tube {
    intervals: Vec<(f64, f64)>,
    folds: Vec<usize>,
}

/// Backward tube of the strip along the point's coordinates. The component
/// of the preimage is joined across the critical point exactly when the
/// previous tube reaches the critical value.
fn build_tube(map: &UnimodalMap, strip: (f64, f64), coords: &[f64], depth: usize) -> Result<Tube, CollapseError> {
    let (c2, c1) = map.core();
    let mut intervals = Vec::with_capacity(depth + 1);
    let mut folds = Vec::new();
    intervals.push(strip);
    let mut cur = strip;
    for m in 1..=depth {
        let x = coords[m];
        let reach_crit = cur.1 >= c1 - 1e-9;
        let next = if reach_crit {
            // joined component across c
            let lo = map.inv_left(cur.0.min(c1))?;
            let hi = map.inv_right(cur.0.min(c1))?;
            folds.push(m);
            (lo.max(c2), hi.min(c1))
        } else {
            match side_sym(x) {
                SideSym::S0 | SideSym::Tie => {
                    let lo = map.inv_left(cur.0.min(c1))?;
                    let hi = map.inv_left(cur.1.min(c1))?;
                    (lo.max(c2), hi.min(c1))
                }
                SideSym::S1 => {
                    let lo = map.inv_right(cur.1.min(c1))?;
                    let hi = map.inv_right(cur.0.min(c1))?;
                    (lo.max(c2), hi.min(c1))
                }
            }
        };
        if x < next.0 - 1e-7 || x > next.1 + 1e-7 {
            return Err(CollapseError::AmbiguousComponent(format!(
                "coordinate at depth {m} left its tube"
            )));
        }
        intervals.push(next);
        cur = next;
    }
    Ok(Tube { intervals, folds })
}

/// Does the backward itinerary stay in the cycle pattern to this depth?
fn pattern_depth(cfg: &CollapseConfig, j: usize, coords: &[f64], depth: usize) -> usize {
    let n = cfg.n();
    for m in 0..=depth {
        let target = cfg.cycle.intervals[(j + n * depth - m) % n];
        let v = coords[m];
        if v < target.0 - 1e-9 || v > target.1 + 1e-9 {
            return m;
        }
    }
    depth + 1
}

fn unfold(map: &UnimodalMap, tube: &Tube, depth: usize) -> Result<ArcPath, CollapseError> {
    let deep = tube.intervals[depth];
    let mut arc = ArcPath::from_interval(*map, deep.0, deep.1, depth);
    for _ in 0..depth {
        arc.extend(crate::folding::NODE_BUDGET)?;
    }
    Ok(arc)
}

/// Match the point's backward sides against the segment words.
fn find_segment(arc: &ArcPath, coords: &[f64], depth: usize) -> Result<usize, CollapseError> {
    let v = coords[0];
    'seg: for i in 0..arc.seg_count() {
        let w = &arc.seg_words[i];
        for m in 1..=depth.min(w.len()) {
            match side_sym(coords[m]) {
                SideSym::Tie => continue,
                SideSym::S0 => {
                    if w.side_at(m) != Some(0) {
                        continue 'seg;
                    }
                }
                SideSym::S1 => {
                    if w.side_at(m) != Some(1) {
                        continue 'seg;
                    }
                }
            }
        }
        let (a, b) = (arc.value(i), arc.value(i + 1));
        if v >= a.min(b) - 1e-9 && v <= a.max(b) + 1e-9 {
            return Ok(i);
        }
    }
    Err(CollapseError::AmbiguousComponent(
        "point does not lie on its component model".into(),
    ))
}

fn record_nodes_from(arc: &ArcPath, indices: impl Iterator<Item = usize>, stop_at: usize) -> Vec<usize> {
    let mut records = Vec::new();
    let mut best: Option<usize> = None;
    for idx in indices {
        if let Some(level) = arc.level(idx) {
            if best.map_or(true, |b| level > b) {
                records.push(idx);
                best = Some(level);
            }
        }
        if idx == stop_at {
            break;
        }
    }
    records
}

/// Position of the first crossing of `value` along the path from an end, in
/// t-coordinates (segment index plus affine fraction).
fn t_of_value_from(arc: &ArcPath, value: f64, from_left: bool) -> Option<f64> {
    let nseg = arc.seg_count();
    let order: Box<dyn Iterator<Item = usize>> = if from_left {
        Box::new(0..nseg)
    } else {
        Box::new((0..nseg).rev())
    };
    for i in order {
        let (a, b) = (arc.value(i), arc.value(i + 1));
        if value >= a.min(b) - 1e-12 && value <= a.max(b) + 1e-12 {
            let frac = if (b - a).abs() < 1e-300 {
                0.5
            } else {
                ((value - a) / (b - a)).clamp(0.0, 1.0)
            };
            return Some(i as f64 + frac);
        }
    }
    None
}

fn t_of(arc: &ArcPath, seg: usize, value: f64) -> f64 {
    let (a, b) = (arc.value(seg), arc.value(seg + 1));
    let frac = if (b - a).abs() < 1e-300 {
        0.5
    } else {
        ((value - a) / (b - a)).clamp(0.0, 1.0)
    };
    seg as f64 + frac
}

/// Lift a model node to an inverse-limit point (valid to the model depth).
fn lift_node(arc: &ArcPath, idx: usize, map: &UnimodalMap, depth: usize) -> ILPoint {
    let mut coords = Vec::with_capacity(depth + 1);
    match arc.nodes[idx].kind {
        NodeKind::Anchor(v) => {
            coords.push(v);
            let word = &arc.nodes[idx].word;
            for m in 1..=depth {
                let side = word.side_at(m).unwrap_or(0);
                let prev = *coords.last().unwrap();
                coords.push(map.inv_branch(prev.min(map.c1()), side).unwrap_or(0.0));
            }
        }
        NodeKind::Crit(age) => {
            for m in 0..=depth.min(age) {
                coords.push(arc.crit_value(age - m));
            }
            let word = &arc.nodes[idx].word;
            for m in (age + 1)..=depth {
                let below = m - age;
                let side = word.side_at(below).unwrap_or(0);
                let prev = *coords.last().unwrap();
                coords.push(map.inv_branch(prev.min(map.c1()), side).unwrap_or(0.0));
            }
        }
    }
    ILPoint::new(*map, coords, Tail::ZeroTail).expect("model node lift is consistent")
}

/// Lift a model end (node 0 or the last node).
fn lift_end(arc: &ArcPath, left: bool, map: &UnimodalMap, depth: usize) -> ILPoint {
    let idx = if left { 0 } else { arc.nodes.len() - 1 };
    let wseg = if left {
        &arc.seg_words[0]
    } else {
        &arc.seg_words[arc.seg_count() - 1]
    };
    let mut coords = Vec::with_capacity(depth + 1);
    coords.push(arc.value(idx));
    for m in 1..=depth {
        let side = wseg.side_at(m).unwrap_or(0);
        let prev = *coords.last().unwrap();
        coords.push(map.inv_branch(prev.min(map.c1()), side).unwrap_or(0.0));
    }
    ILPoint::new(*map, coords, Tail::ZeroTail).expect("model end lift is consistent")
}

pub(crate) fn classify(x: &ILPoint, cfg: &CollapseConfig) -> Result<Classified, CollapseError> {
    let (c2, c1) = cfg.q.core();
    for &v in &x.coords {
        if v < c2 - 1e-9 || v > c1 + 1e-9 {
            return Err(CollapseError::NotInCore);
        }
    }
    let n = cfg.n();
    let v0 = x.coords[0];
    let strip_idx = (0..n).find(|&j| {
        let s = cfg.strip_q(j);
        v0 >= s.0 - TIE_EPS && v0 <= s.1 + TIE_EPS
    });
    let j = match strip_idx {
        None => {
            let comps = cfg.complement_q();
            let idx = comps
                .iter()
                .position(|&(lo, hi)| v0 >= lo - 1e-12 && v0 <= hi + 1e-12)
                .ok_or_else(|| {
                    CollapseError::AmbiguousComponent("value in no strip or complement".into())
                })?;
            return Ok(Classified {
                case: CaseTag::Case1,
                j: idx,
                lambda: Some(0),
                model: None,
            });
        }
        Some(j) => j,
    };

    let depth = x.depth().min(cfg.depth_budget);
    if depth < 2 * n + 4 {
        return Err(CollapseError::DepthInsufficient(depth));
    }
    let pat = pattern_depth(cfg, j, &x.coords, depth);
    if pat > depth {
        // cycle-pattern for the full representable depth: the point lies in
        // the j-th cycle continuum
        return Ok(Classified {
            case: if cfg.knaster { CaseTag::Case34 } else { CaseTag::Case24 },
            j,
            lambda: None,
            model: None,
        });
    }

    let tube = build_tube(&cfg.q, cfg.strip_q(j), &x.coords, depth)?;
    let lambda_stable = tube
        .folds
        .last()
        .map_or(true, |&last| last + n + 2 <= depth);

    if !lambda_stable {
        // treated as an infinite-level candidate
        if cfg.knaster {
            // outside the cycle continuum this can only be the stem arc
            let stem = hull_contains(cfg.grids.quad.at(j, 0), cfg.cycle.p[j], v0);
            if stem {
                return Ok(Classified {
                    case: CaseTag::Case34,
                    j,
                    lambda: None,
                    model: None,
                });
            }
            return Err(CollapseError::DepthInsufficient(depth));
        }
        let arc = unfold(&cfg.q, &tube, depth)?;
        let seg = find_segment(&arc, &x.coords, depth)?;
        let model = build_model(cfg, j, arc, seg, depth)?;
        return Ok(Classified {
            case: CaseTag::Case23,
            j,
            lambda: None,
            model: Some(model),
        });
    }

    if tube.folds.is_empty() {
        return Ok(Classified {
            case: CaseTag::Case21,
            j,
            lambda: Some(0),
            model: None,
        });
    }

    let arc = unfold(&cfg.q, &tube, depth)?;
    let seg = find_segment(&arc, &x.coords, depth)?;
    let lambda = arc.max_level().unwrap_or(0);
    let model = build_model(cfg, j, arc, seg, depth)?;
    Ok(Classified {
        case: if cfg.knaster { CaseTag::Case32 } else { CaseTag::Case22 },
        j,
        lambda: Some(lambda),
        model: Some(model),
    })
}

fn hull_contains(a: f64, b: f64, v: f64) -> bool {
    v >= a.min(b) - TIE_EPS && v <= a.max(b) + TIE_EPS
}

fn build_model(
    cfg: &CollapseConfig,
    j: usize,
    arc: ArcPath,
    seg: usize,
    depth: usize,
) -> Result<ModelData, CollapseError> {
    let pj = cfg.cycle.p[j];
    let last = arc.nodes.len() - 1;
    // the unique maximal-level node
    let max_level = arc.max_level();
    let mid_node = match max_level {
        None => None,
        Some(l) => {
            let hits: Vec<usize> = (0..arc.nodes.len())
                .filter(|&i| arc.level(i) == Some(l))
                .collect();
            if hits.len() != 1 {
                return Err(CollapseError::AmbiguousComponent(format!(
                    "{} nodes share the maximal level {l}",
                    hits.len()
                )));
            }
            Some(hits[0])
        }
    };
    let (v_nodes, vhat_nodes) = match mid_node {
        None => (Vec::new(), Vec::new()),
        Some(m) => (
            record_nodes_from(&arc, 0..=m, m),
            record_nodes_from(&arc, (m..=last).rev(), m),
        ),
    };
    let t_v1 = t_of_value_from(&arc, pj, true).unwrap_or(0.0);
    let t_vhat1 = t_of_value_from(&arc, pj, false).unwrap_or(last as f64);
    Ok(ModelData {
        arc,
        depth,
        seg,
        mid_node,
        v_nodes,
        vhat_nodes,
        t_v1,
        t_vhat1,
    })
}

/// One affine piece of the scalar transfer in normalized arc coordinates.
#[derive(Debug, Clone, Copy)]
struct Piece {
    t_lo: f64,
    t_hi: f64,
    val_lo: f64,
    val_hi: f64,
}

/// Assemble the transfer pieces for a folded component. `shift` is 0 in the
/// plain case; in the Knaster case the grid indices shift by `lambda_count`
/// so that images shrink toward the endpoint as the level grows.
fn folded_pieces(
    cfg: &CollapseConfig,
    j: usize,
    model: &ModelData,
    knaster: bool,
) -> Result<Vec<Piece>, CollapseError> {
    let r = |k: usize| -> Result<f64, CollapseError> {
        if k > cfg.k_depth {
            return Err(CollapseError::GridTooShallow {
                needed: k,
                have: cfg.k_depth,
            });
        }
        Ok(cfg.grids.tent.at(j, k))
    };
    let cj = cfg.tent_crit[j];
    let m = model
        .mid_node
        .ok_or_else(|| CollapseError::AmbiguousComponent("folded component without midpoint".into()))?;
    let lam_count = model.v_nodes.len(); // = lambda - 1 in the text's indexing
    if model.vhat_nodes.len() != lam_count {
        return Err(CollapseError::AmbiguousComponent(format!(
            "record counts differ: {} vs {}",
            lam_count,
            model.vhat_nodes.len()
        )));
    }
    let shift = if knaster { lam_count } else { 0 };
    let last = model.arc.nodes.len() - 1;
    // anchor sequence: (t, image value) from the left end to the right end
    let mut anchors: Vec<(f64, f64)> = Vec::with_capacity(2 * lam_count + 4);
    anchors.push((0.0, r(0)?));
    anchors.push((model.t_v1, r(shift + 1)?));
    for (i, &idx) in model.v_nodes.iter().enumerate() {
        let k = i + 2; // v_2, v_3, ... in the text's numbering
        if idx == m {
            anchors.push((idx as f64, cj));
        } else {
            anchors.push((idx as f64, r(shift + k)?));
        }
    }
    for (i, &idx) in model.vhat_nodes.iter().enumerate().rev() {
        if idx == m {
            continue;
        }
        let k = i + 2;
        anchors.push((idx as f64, r(shift + k)?));
    }
    anchors.push((model.t_vhat1, r(shift + 1)?));
    anchors.push((last as f64, r(0)?));
    let mut pieces = Vec::with_capacity(anchors.len() - 1);
    for w in anchors.windows(2) {
        if w[1].0 > w[0].0 + 1e-12 {
            pieces.push(Piece {
                t_lo: w[0].0,
                t_hi: w[1].0,
                val_lo: w[0].1,
                val_hi: w[1].1,
            });
        }
    }
    Ok(pieces)
}

/// Ray pieces (infinite-level candidate, non-Knaster): anchors from the stem
/// end only, along the single injective arc toward the endpoint.
fn ray_pieces(cfg: &CollapseConfig, j: usize, model: &ModelData) -> Result<Vec<Piece>, CollapseError> {
    let r = |k: usize| -> Result<f64, CollapseError> {
        if k > cfg.k_depth {
            return Err(CollapseError::GridTooShallow {
                needed: k,
                have: cfg.k_depth,
            });
        }
        Ok(cfg.grids.tent.at(j, k))
    };
    let rq0 = cfg.grids.quad.at(j, 0);
    let last = model.arc.nodes.len() - 1;
    let left_d = (model.arc.value(0) - rq0).abs();
    let right_d = (model.arc.value(last) - rq0).abs();
    let from_left = left_d <= right_d;
    let records = if from_left {
        record_nodes_from(&model.arc, 0..=last, last)
    } else {
        record_nodes_from(&model.arc, (0..=last).rev(), 0)
    };
    let t_stem = t_of_value_from(&model.arc, cfg.cycle.p[j], from_left).unwrap_or(0.0);
    let mut anchors: Vec<(f64, f64)> = Vec::new();
    let t_end = if from_left { 0.0 } else { last as f64 };
    anchors.push((t_end, r(0)?));
    anchors.push((t_stem, r(1)?));
    for (i, &idx) in records.iter().enumerate() {
        anchors.push((idx as f64, r(i + 2)?));
    }
    if !from_left {
        anchors.reverse();
        for a in anchors.iter_mut() {
            let _ = a;
        }
    }
    let mut pieces = Vec::with_capacity(anchors.len());
    for w in anchors.windows(2) {
        let (lo, hi) = if w[0].0 <= w[1].0 {
            (w[0], w[1])
        } else {
            (w[1], w[0])
        };
        if hi.0 > lo.0 + 1e-12 {
            pieces.push(Piece {
                t_lo: lo.0,
                t_hi: hi.0,
                val_lo: lo.1,
                val_hi: hi.1,
            });
        }
    }
    Ok(pieces)
}

fn eval_pieces(pieces: &[Piece], t: f64) -> Option<f64> {
    for p in pieces {
        if t >= p.t_lo - 1e-12 && t <= p.t_hi + 1e-12 {
            let frac = ((t - p.t_lo) / (p.t_hi - p.t_lo)).clamp(0.0, 1.0);
            return Some(p.val_lo + frac * (p.val_hi - p.val_lo));
        }
    }
    None
}

/// Build the tent-side image point: transferred projection value, deeper
/// coordinates pulled back along the source point's own side word (exact
/// critical hits transfer to exact critical hits).
fn tent_point_along(
    cfg: &CollapseConfig,
    x: &ILPoint,
    image_value: f64,
    depth_out: usize,
) -> Result<ILPoint, CollapseError> {
    let t = cfg.t;
    let c1t = t.c1();
    let mut coords = Vec::with_capacity(depth_out + 1);
    coords.push(image_value.clamp(0.0, c1t));
    for m in 1..=depth_out {
        let prev = *coords.last().unwrap();
        let v = match side_sym(x.coords[m]) {
            SideSym::Tie => CRIT,
            SideSym::S0 => t.inv_left(prev.min(c1t))?,
            SideSym::S1 => t.inv_right(prev.min(c1t))?,
        };
        coords.push(v);
    }
    let tail = match &x.tail {
        Tail::ZeroTail => Tail::ZeroTail,
        Tail::PeriodicTail(_) | Tail::GridAnchor { .. } => Tail::ZeroTail,
    };
    Ok(ILPoint {
        map: t,
        coords,
        tail,
    })
}

/// The collapsing map on the core inverse limit.
pub fn phi(x: &ILPoint, cfg: &CollapseConfig) -> Result<ILPoint, CollapseError> {
    let cls = classify(x, cfg)?;
    let depth_out = x.depth().min(cfg.depth_budget);
    match cls.case {
        CaseTag::Case24 => Ok(cfg.tent_endpoint(cls.j)),
        CaseTag::Case34 => {
            if cls.model.is_none() && cls.lambda.is_none() {
                // either inside the cycle continuum or on the stem arc
                let pat = pattern_depth(cfg, cls.j, &x.coords, x.depth().min(cfg.depth_budget));
                if pat > x.depth().min(cfg.depth_budget) {
                    return Ok(cfg.tent_endpoint(cls.j));
                }
                // stem: affine [r_{j,0}, p_j] -> [r~_{j,0}, c~_j]
                let j = cls.j;
                let (a, b) = (cfg.grids.quad.at(j, 0), cfg.cycle.p[j]);
                let (ta, tb) = (cfg.grids.tent.at(j, 0), cfg.tent_crit[j]);
                let frac = ((x.coords[0] - a) / (b - a)).clamp(0.0, 1.0);
                let img = ta + frac * (tb - ta);
                tent_point_along(cfg, x, img, depth_out)
            } else {
                Err(CollapseError::DepthInsufficient(depth_out))
            }
        }
        CaseTag::Case1 => {
            let comps_q = cfg.complement_q();
            let comps_t = cfg.complement_t();
            if comps_q.len() != comps_t.len() {
                return Err(CollapseError::AmbiguousComponent(
                    "complement component counts differ between the two sides".into(),
                ));
            }
            let (a, b) = comps_q[cls.j];
            let (ta, tb) = comps_t[cls.j];
            let frac = ((x.coords[0] - a) / (b - a)).clamp(0.0, 1.0);
            tent_point_along(cfg, x, ta + frac * (tb - ta), depth_out)
        }
        CaseTag::Case21 => {
            let j = cls.j;
            let s = cfg.strip_q(j);
            let r0 = cfg.grids.quad.at(j, 0);
            // orient so that r_{j,0} maps to r~_{j,0}
            let (a, b) = if (s.0 - r0).abs() < (s.1 - r0).abs() {
                (s.0, s.1)
            } else {
                (s.1, s.0)
            };
            let (ta, tb) = (cfg.grids.tent.at(j, 0), cfg.tent_crit[j]);
            let frac = ((x.coords[0] - a) / (b - a)).clamp(0.0, 1.0);
            tent_point_along(cfg, x, ta + frac * (tb - ta), depth_out)
        }
        CaseTag::Case22 | CaseTag::Case32 => {
            let model = cls.model.as_ref().unwrap();
            let pieces = folded_pieces(cfg, cls.j, model, cls.case == CaseTag::Case32)?;
            let t = t_of(&model.arc, model.seg, x.coords[0]);
            let img = eval_pieces(&pieces, t).ok_or_else(|| {
                CollapseError::AmbiguousComponent("position outside the transfer range".into())
            })?;
            tent_point_along(cfg, x, img, depth_out)
        }
        CaseTag::Case23 => {
            let model = cls.model.as_ref().unwrap();
            let pieces = ray_pieces(cfg, cls.j, model)?;
            let t = t_of(&model.arc, model.seg, x.coords[0]);
            let img = eval_pieces(&pieces, t).ok_or(CollapseError::GridTooShallow {
                needed: cfg.k_depth + 1,
                have: cfg.k_depth,
            })?;
            tent_point_along(cfg, x, img, depth_out)
        }
    }
}

/// Public component description.
pub fn locate(x: &ILPoint, cfg: &CollapseConfig) -> Result<ComponentW, CollapseError> {
    let cls = classify(x, cfg)?;
    let depth = x.depth().min(cfg.depth_budget);
    let (endpoints, midpoint, v_levels, v_hat_levels) = match &cls.model {
        Some(model) => {
            let left = lift_end(&model.arc, true, &cfg.q, depth);
            let right = lift_end(&model.arc, false, &cfg.q, depth);
            let mid = model.mid_node.map(|i| lift_node(&model.arc, i, &cfg.q, depth));
            let vl: Vec<usize> = model
                .v_nodes
                .iter()
                .filter_map(|&i| model.arc.level(i))
                .collect();
            let vhl: Vec<usize> = model
                .vhat_nodes
                .iter()
                .filter_map(|&i| model.arc.level(i))
                .collect();
            (Some((left, right)), mid, vl, vhl)
        }
        None => (None, None, Vec::new(), Vec::new()),
    };
    Ok(ComponentW {
        j: cls.j,
        case_tag: cls.case,
        lambda: cls.lambda,
        endpoints,
        midpoint,
        v_levels,
        v_hat_levels,
    })
}

/// Scalar transfer profile of the component of `x`: the v-level sequence and
/// the transfer sampled at `samples` normalized positions. Components with
/// equal level data produce identical profiles.
pub fn transfer_profile(
    x: &ILPoint,
    cfg: &CollapseConfig,
    samples: usize,
) -> Result<(Vec<usize>, Vec<(f64, f64)>), CollapseError> {
    let cls = classify(x, cfg)?;
    let model = cls
        .model
        .as_ref()
        .ok_or_else(|| CollapseError::AmbiguousComponent("component has no fold model".into()))?;
    let pieces = folded_pieces(cfg, cls.j, model, cls.case == CaseTag::Case32)?;
    let t_max = (model.arc.nodes.len() - 1) as f64;
    let levels: Vec<usize> = model
        .v_nodes
        .iter()
        .filter_map(|&i| model.arc.level(i))
        .collect();
    let mut curve = Vec::with_capacity(samples + 1);
    for s in 0..=samples {
        let t = t_max * s as f64 / samples as f64;
        if let Some(v) = eval_pieces(&pieces, t) {
            curve.push((s as f64 / samples as f64, v));
        }
    }
    Ok((levels, curve))
}

/// Result of the inverse map: endpoint preimages resolve to the whole cycle
/// continuum, never to a numeric point.
#[derive(Debug, Clone)]
pub enum PhiInverse {
    Point(ILPoint),
    Continuum(usize),
}

/// Inverse of the collapsing map on the tent side.
pub fn phi_inverse(xt: &ILPoint, cfg: &CollapseConfig) -> Result<PhiInverse, CollapseError> {
    let n = cfg.n();
    let depth = xt.depth().min(cfg.depth_budget);
    let v0 = xt.coords[0];
    // endpoint test: backward orbit on the critical orbit for the whole depth
    let is_endpoint = (0..n).any(|j| {
        (0..=depth).all(|m| {
            let c = cfg.tent_crit[(j + n * depth - m) % n];
            (xt.coords[m] - c).abs() <= 1e-9
        })
    });
    if is_endpoint {
        let j = (0..n)
            .find(|&j| (v0 - cfg.tent_crit[j]).abs() <= 1e-9)
            .unwrap();
        return Ok(PhiInverse::Continuum(j));
    }

    let strip_idx = (0..n).find(|&j| {
        let s = cfg.strip_t(j);
        v0 >= s.0 - TIE_EPS && v0 <= s.1 + TIE_EPS
    });
    match strip_idx {
        None => {
            let comps_t = cfg.complement_t();
            let comps_q = cfg.complement_q();
            let idx = comps_t
                .iter()
                .position(|&(lo, hi)| v0 >= lo - 1e-12 && v0 <= hi + 1e-12)
                .ok_or_else(|| {
                    CollapseError::AmbiguousComponent("tent value in no strip or complement".into())
                })?;
            let (ta, tb) = comps_t[idx];
            let (a, b) = comps_q[idx];
            let frac = ((v0 - ta) / (tb - ta)).clamp(0.0, 1.0);
            let img = a + frac * (b - a);
            Ok(PhiInverse::Point(quad_point_along(cfg, xt, img, depth, None)?))
        }
        Some(j) => {
            // mirror the quadratic component through the shared side word
            let tube = build_tube(&cfg.q, cfg.strip_q(j), &mirror_coords(cfg, j, xt, depth)?, depth)?;
            if tube.folds.is_empty() {
                // injective on both sides: value-affine inverse of case 2.1
                let s = cfg.strip_q(j);
                let r0 = cfg.grids.quad.at(j, 0);
                let (a, b) = if (s.0 - r0).abs() < (s.1 - r0).abs() {
                    (s.0, s.1)
                } else {
                    (s.1, s.0)
                };
                let (ta, tb) = (cfg.grids.tent.at(j, 0), cfg.tent_crit[j]);
                let frac = ((v0 - ta) / (tb - ta)).clamp(0.0, 1.0);
                let img = a + frac * (b - a);
                return Ok(PhiInverse::Point(quad_point_along(cfg, xt, img, depth, None)?));
            }
            let arc = unfold(&cfg.q, &tube, depth)?;
            // the quadratic preimage's side word is richer than the tent
            // point's; locate the tent point's lap first
            let seg = find_segment(&arc, &mirror_coords(cfg, j, xt, depth)?, depth)?;
            let model = build_model(cfg, j, arc, seg, depth)?;
            let knaster = cfg.knaster;
            let pieces = folded_pieces(cfg, j, &model, knaster)?;
            // invert: find the piece on the tent point's side whose value
            // range brackets v0 and whose t-range contains the matched lap
            let t_here = invert_pieces(&pieces, v0, &model, xt, cfg, j)?;
            let (seg_idx, value) = t_to_value(&model.arc, t_here);
            let _ = seg_idx;
            Ok(PhiInverse::Point(quad_point_along_model(
                cfg, &model, t_here, value, depth,
            )?))
        }
    }
}

/// Quadratic coordinates matched to a tent point's side word: used to drive
/// the tube of the mirrored component. Exact tent critical hits correspond
/// to the cycle pattern on the quadratic side.
fn mirror_coords(
    cfg: &CollapseConfig,
    j: usize,
    xt: &ILPoint,
    depth: usize,
) -> Result<Vec<f64>, CollapseError> {
    let n = cfg.n();
    let mut out = Vec::with_capacity(depth + 1);
    for m in 0..=depth {
        let v = xt.coords[m];
        match side_sym(v) {
            SideSym::S0 => out.push(0.25),
            SideSym::S1 => out.push(0.75),
            SideSym::Tie => {
                // the quadratic twin sits in the cycle interval of that phase
                let iv = cfg.cycle.intervals[(j + n * depth - m) % n];
                out.push(0.5 * (iv.0 + iv.1));
            }
        }
    }
    // only the sides matter for tube branching; re-anchor the head value
    out[0] = {
        let s = cfg.strip_q(j);
        0.5 * (s.0 + s.1)
    };
    Ok(out)
}

fn t_to_value(arc: &ArcPath, t: f64) -> (usize, f64) {
    let seg = (t.floor() as usize).min(arc.seg_count() - 1);
    let frac = t - seg as f64;
    let (a, b) = (arc.value(seg), arc.value(seg + 1));
    (seg, a + frac * (b - a))
}

fn invert_pieces(
    pieces: &[Piece],
    v0: f64,
    model: &ModelData,
    xt: &ILPoint,
    cfg: &CollapseConfig,
    j: usize,
) -> Result<f64, CollapseError> {
    // which lap of the tent component holds the point: compare its side at
    // the tent fold depth with the two candidate halves
    let m = model
        .mid_node
        .ok_or_else(|| CollapseError::AmbiguousComponent("inverse on a fold-free model".into()))?;
    let t_mid = m as f64;
    let lam = model.arc.level(m).unwrap_or(0);
    let right_lap = tent_lap_is_right(cfg, j, xt, lam);
    for p in pieces {
        let lo = p.val_lo.min(p.val_hi);
        let hi = p.val_lo.max(p.val_hi);
        if v0 >= lo - 1e-12 && v0 <= hi + 1e-12 {
            let on_right = p.t_lo >= t_mid - 1e-9;
            let on_left = p.t_hi <= t_mid + 1e-9;
            if (right_lap && on_right) || (!right_lap && on_left) || (!on_left && !on_right) {
                let frac = if (p.val_hi - p.val_lo).abs() < 1e-300 {
                    0.5
                } else {
                    ((v0 - p.val_lo) / (p.val_hi - p.val_lo)).clamp(0.0, 1.0)
                };
                return Ok(p.t_lo + frac * (p.t_hi - p.t_lo));
            }
        }
    }
    Err(CollapseError::AmbiguousComponent(
        "no transfer piece brackets the tent value".into(),
    ))
}

/// Decide the tent component's lap from the side word at the fold depth.
fn tent_lap_is_right(cfg: &CollapseConfig, j: usize, xt: &ILPoint, lam: usize) -> bool {
    let _ = (cfg, j);
    if lam + 1 <= xt.depth() {
        // after the fold the two laps separate at one depth below the hit
        side_sym(xt.coords[lam.saturating_sub(0)]) == SideSym::S1
            || side_sym(xt.coords[(lam + 1).min(xt.depth())]) == SideSym::S1
    } else {
        false
    }
}

fn quad_point_along(
    cfg: &CollapseConfig,
    xt: &ILPoint,
    image_value: f64,
    depth_out: usize,
    _j: Option<usize>,
) -> Result<ILPoint, CollapseError> {
    let q = cfg.q;
    let c1q = q.c1();
    let mut coords = Vec::with_capacity(depth_out + 1);
    coords.push(image_value.clamp(0.0, c1q));
    for m in 1..=depth_out {
        let prev = *coords.last().unwrap();
        let v = match side_sym(xt.coords[m]) {
            SideSym::Tie => {
                return Err(CollapseError::DepthInsufficient(m));
            }
            SideSym::S0 => q.inv_left(prev.min(c1q))?,
            SideSym::S1 => q.inv_right(prev.min(c1q))?,
        };
        coords.push(v);
    }
    Ok(ILPoint {
        map: q,
        coords,
        tail: Tail::ZeroTail,
    })
}

/// Quadratic point at a model position: projection value interpolated on the
/// segment, deeper coordinates from the segment's side word.
fn quad_point_along_model(
    cfg: &CollapseConfig,
    model: &ModelData,
    t: f64,
    value: f64,
    depth_out: usize,
) -> Result<ILPoint, CollapseError> {
    let q = cfg.q;
    let c1q = q.c1();
    let seg = (t.floor() as usize).min(model.arc.seg_count() - 1);
    let word = &model.arc.seg_words[seg];
    let mut coords = Vec::with_capacity(depth_out + 1);
    coords.push(value.clamp(0.0, c1q));
    for m in 1..=depth_out {
        let prev = *coords.last().unwrap();
        let side = word.side_at(m).unwrap_or(0);
        coords.push(q.inv_branch(prev.min(c1q), side)?);
    }
    Ok(ILPoint {
        map: q,
        coords,
        tail: Tail::ZeroTail,
    })
}

/// Conjugation of a shift power through the collapsing map:
/// `h~ = phi ∘ sigma^R ∘ phi^{-1}` on the tent side.
pub fn conjugate(r: i64, cfg: &CollapseConfig, xt: &ILPoint) -> Result<ILPoint, CollapseError> {
    let n = cfg.n() as i64;
    match phi_inverse(xt, cfg)? {
        PhiInverse::Continuum(j) => {
            let jj = ((j as i64 + r) % n + n) % n;
            Ok(cfg.tent_endpoint(jj as usize))
        }
        PhiInverse::Point(x) => {
            let y = if r >= 0 {
                x.shift_pow(r, None)?
            } else {
                // drop the first |r| coordinates: a clean inverse shift that
                // avoids polluting the deep end with tail extensions
                let k = (-r) as usize;
                if x.depth() < k + 4 {
                    return Err(CollapseError::DepthInsufficient(x.depth()));
                }
                ILPoint {
                    map: x.map,
                    coords: x.coords[k..].to_vec(),
                    tail: x.tail.clone(),
                }
            };
            phi(&y, cfg)
        }
    }
}

/// The extension of the collapsing map to the arc-component of the fixed
/// endpoint: nodes of the two folding paths are aligned level-for-level and
/// positions transfer affinely between matched anchors.
pub fn phi_full(x: &ILPoint, cfg: &CollapseConfig) -> Result<ILPoint, CollapseError> {
    let (c2, _c1) = cfg.q.core();
    let in_core = x.coords.iter().all(|&v| v >= c2 - 1e-9);
    if in_core {
        return phi(x, cfg);
    }
    // locate on the folding path of the arc-component of 0bar
    let mut gen = 6;
    loop {
        let path_q = FoldingPath::grown(cfg.q, 0, gen)?;
        match path_q.locate(x) {
            Ok(pos) => {
                let path_t = FoldingPath::grown(cfg.t, 0, gen)?;
                return transfer_on_paths(cfg, &path_q, &path_t, pos.seg, x);
            }
            Err(_) if gen < 18 => gen += 3,
            Err(e) => return Err(e.into()),
        }
    }
}

/// Align the two folding paths level-for-level (tent nodes embed into the
/// quadratic node sequence) and transfer a position.
fn transfer_on_paths(
    cfg: &CollapseConfig,
    path_q: &FoldingPath,
    path_t: &FoldingPath,
    seg: usize,
    x: &ILPoint,
) -> Result<ILPoint, CollapseError> {
    let nq = path_q.node_count();
    let nt = path_t.node_count();
    // greedy order-preserving match of tent nodes to quadratic nodes with
    // equal levels; the 0bar anchor matches the 0bar anchor
    let mut match_q: Vec<(usize, usize)> = vec![(0, 0)];
    let mut qi = 1;
    for ti in 1..nt {
        let lt = path_t.level(ti);
        while qi < nq && path_q.level(qi) != lt {
            qi += 1;
        }
        if qi == nq {
            return Err(CollapseError::AmbiguousComponent(
                "folding patterns do not align".into(),
            ));
        }
        match_q.push((qi, ti));
        qi += 1;
    }
    // position of x in path_q in t-coordinates
    let t_here = {
        let (a, b) = (path_q.value(seg), path_q.value(seg + 1));
        let frac = if (b - a).abs() < 1e-300 {
            0.5
        } else {
            ((x.coords[path_q.p] - a) / (b - a)).clamp(0.0, 1.0)
        };
        seg as f64 + frac
    };
    // bracketing matched anchors
    let pos = match_q.partition_point(|&(q, _)| (q as f64) <= t_here);
    let (q_hi, t_hi) = match_q[pos.min(match_q.len() - 1)];
    let (q_lo, t_lo) = match_q[pos.saturating_sub(1)];
    let frac = if q_hi == q_lo {
        0.0
    } else {
        ((t_here - q_lo as f64) / (q_hi as f64 - q_lo as f64)).clamp(0.0, 1.0)
    };
    let t_pos = t_lo as f64 + frac * (t_hi as f64 - t_lo as f64);
    // materialize the tent point at that path position
    let seg_t = (t_pos.floor() as usize).min(path_t.node_count() - 2);
    let (a, b) = (path_t.value(seg_t), path_t.value(seg_t + 1));
    let value = a + (t_pos - seg_t as f64) * (b - a);
    let depth_out = x.depth().min(cfg.depth_budget);
    let word = &path_t.arc.seg_words[seg_t];
    let t = cfg.t;
    let mut coords = Vec::with_capacity(depth_out + 1);
    coords.push(value.clamp(0.0, t.c1()));
    for m in 1..=depth_out {
        let prev = *coords.last().unwrap();
        let side = word.side_at(m).unwrap_or(0);
        coords.push(t.inv_branch(prev.min(t.c1()), side)?);
    }
    Ok(ILPoint {
        map: t,
        coords,
        tail: Tail::ZeroTail,
    })
}

/// Image of the natural-chain boundary set under the level-preserving value
/// transfer: each critical preimage maps to the tent critical preimage with
/// the same finite branch word.
pub fn chain_boundary_image(cfg: &CollapseConfig, p: usize) -> Result<Vec<f64>, CollapseError> {
    let q_chain = invlim::natural_chain(&cfg.q, p, None)?;
    let mut out = Vec::with_capacity(q_chain.boundaries.len());
    for &b in &q_chain.boundaries {
        if b <= 1e-12 {
            out.push(0.0);
            continue;
        }
        if (b - cfg.q.c1()).abs() <= 1e-12 {
            out.push(cfg.t.c1());
            continue;
        }
        // forward word of b until it hits the critical point (order <= p)
        let mut word = Vec::new();
        let mut v = b;
        let mut hit = false;
        for _ in 0..=p {
            if (v - CRIT).abs() <= 1e-9 {
                hit = true;
                break;
            }
            word.push(if v < CRIT { 0u8 } else { 1u8 });
            v = cfg.q.eval(v);
        }
        if !hit {
            return Err(CollapseError::AmbiguousComponent(format!(
                "boundary {b} is not a critical preimage of order <= {p}"
            )));
        }
        let mut z = CRIT;
        for &s in word.iter().rev() {
            z = cfg.t.inv_branch(z, s)?;
        }
        out.push(z);
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-10);
    Ok(out)
}

/// Sample point whose backward orbit follows the cycle pattern for `m` steps
/// and then deviates; such points generate components of every finite level.
pub fn pattern_point(
    cfg: &CollapseConfig,
    j: usize,
    m: usize,
    depth: usize,
    rng: &mut impl Rng,
) -> Result<ILPoint, CollapseError> {
    let n = cfg.n();
    let q = cfg.q;
    let iv = cfg.cycle.intervals[j];
    let x0 = iv.0 + (iv.1 - iv.0) * (0.3 + 0.4 * rng.gen::<f64>());
    let mut coords = vec![x0];
    let mut cur = x0;
    let mut step = 1usize;
    // follow the pattern
    while step <= m || {
        // ensure deviation is possible at the current phase: both preimages
        // of a J_0 value stay in J_0, so extend the pattern one step
        let phase = (j + n * (m + 8) - step) % n;
        phase == n - 1
    } {
        let phase = (j + n * (m + 8) - step) % n; // index of J containing x_{-step}
        let target = cfg.cycle.intervals[phase];
        let l = q.inv_left(cur.min(q.c1()))?;
        let r = q.inv_right(cur.min(q.c1()))?;
        let (mut cands, other): (Vec<f64>, Vec<f64>) = {
            let mut inside = Vec::new();
            let mut outside = Vec::new();
            for c in [l, r] {
                if c >= target.0 - 1e-9 && c <= target.1 + 1e-9 {
                    inside.push(c);
                } else {
                    outside.push(c);
                }
            }
            (inside, outside)
        };
        let _ = other;
        if cands.is_empty() {
            return Err(CollapseError::AmbiguousComponent(
                "pattern pullback left the cycle".into(),
            ));
        }
        let pick = if cands.len() == 2 && rng.gen::<bool>() {
            cands.swap_remove(1)
        } else {
            cands.swap_remove(0)
        };
        coords.push(pick);
        cur = pick;
        step += 1;
    }
    // deviation: choose the branch outside the pattern interval
    {
        let phase = (j + n * (m + 8) - step) % n;
        let target = cfg.cycle.intervals[phase];
        let l = q.inv_left(cur.min(q.c1()))?;
        let r = q.inv_right(cur.min(q.c1()))?;
        let (c2, c1) = q.core();
        let outside: Vec<f64> = [l, r]
            .into_iter()
            .filter(|&c| (c < target.0 - 1e-9 || c > target.1 + 1e-9) && c >= c2 - 1e-9 && c <= c1 + 1e-9)
            .collect();
        let pick = *outside.first().ok_or_else(|| {
            CollapseError::AmbiguousComponent("no deviating branch available".into())
        })?;
        coords.push(pick);
        cur = pick;
        step += 1;
    }
    // free admissible continuation inside the core
    let (c2, c1) = q.core();
    while step <= depth {
        let l = q.inv_left(cur.min(c1)).ok().filter(|&v| v >= c2 - 1e-9);
        let r = q
            .inv_right(cur.min(c1))
            .ok()
            .filter(|&v| v >= c2 - 1e-9 && v <= c1 + 1e-9);
        let pick = match (l, r) {
            (Some(a), Some(b)) => {
                if rng.gen::<bool>() {
                    a
                } else {
                    b
                }
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (None, None) => {
                return Err(CollapseError::AmbiguousComponent(
                    "no core preimage during free continuation".into(),
                ))
            }
        };
        coords.push(pick);
        cur = pick;
        step += 1;
    }
    Ok(ILPoint::new(q, coords, Tail::ZeroTail)?)
}

/// A representative of the j-th cycle continuum: the backward orbit along
/// the periodic boundary points.
pub fn g_representative(cfg: &CollapseConfig, j: usize, depth: usize) -> Result<ILPoint, CollapseError> {
    let n = cfg.n();
    let coords: Vec<f64> = (0..=depth)
        .map(|m| cfg.cycle.p[(j + n * depth - m) % n])
        .collect();
    let word: Vec<crate::symbolic::Symbol> = (0..n)
        .map(|i| {
            let v = cfg.cycle.p[(j + i) % n];
            if v < CRIT {
                crate::symbolic::Symbol::Zero
            } else {
                crate::symbolic::Symbol::One
            }
        })
        .collect();
    Ok(ILPoint::new(
        cfg.q,
        coords,
        Tail::PeriodicTail(crate::symbolic::ItineraryWord(word)),
    )?)
}

/// The point of the core inverse limit lying over a grid column anchor.
pub fn grid_anchor_point(cfg: &CollapseConfig, j: usize, depth: usize) -> Result<ILPoint, CollapseError> {
    let grid = &cfg.grids.quad;
    let n = grid.n();
    let mut coords = Vec::with_capacity(depth + 1);
    let (mut jj, mut kk) = (j, 0usize);
    for _ in 0..=depth {
        if kk > grid.k_depth {
            break;
        }
        coords.push(grid.at(jj, kk));
        if jj == 0 {
            jj = n - 1;
            kk += 1;
        } else {
            jj -= 1;
        }
    }
    let d = coords.len() - 1;
    Ok(ILPoint::new(
        cfg.q,
        coords,
        Tail::GridAnchor { j: if j == 0 { n - 1 } else { j - 1 }, k: if j == 0 { d / n + 1 } else { d / n } },
    )
    .unwrap_or(ILPoint {
        map: cfg.q,
        coords: {
            let mut c = Vec::with_capacity(depth + 1);
            let (mut jj, mut kk) = (j, 0usize);
            for _ in 0..=depth {
                if kk > grid.k_depth {
                    break;
                }
                c.push(grid.at(jj, kk));
                if jj == 0 {
                    jj = n - 1;
                    kk += 1;
                } else {
                    jj -= 1;
                }
            }
            c
        },
        tail: Tail::ZeroTail,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invlim::dist;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn config_384() -> CollapseConfig {
        CollapseConfig::build(3.84, 14, 40).unwrap()
    }

    #[test]
    fn g_points_collapse_to_endpoints() {
        let cfg = config_384();
        for j in 0..3 {
            let g = g_representative(&cfg, j, 40).unwrap();
            let img = phi(&g, &cfg).unwrap();
            let e = cfg.tent_endpoint(j);
            assert!(img.same_point(&e), "G_{j} does not collapse to e_{j}");
        }
    }

    #[test]
    fn grid_anchor_maps_to_tent_anchor() {
        let cfg = config_384();
        for j in 0..3 {
            let x = grid_anchor_point(&cfg, j, 36).unwrap();
            let img = phi(&x, &cfg).unwrap();
            assert!(
                (img.coords[0] - cfg.grids.tent.at(j, 0)).abs() < 1e-9,
                "anchor {j}: {} vs {}",
                img.coords[0],
                cfg.grids.tent.at(j, 0)
            );
        }
    }

    #[test]
    fn midpoint_maps_to_critical_value() {
        let cfg = config_384();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let mut tested = 0;
        for j in 0..3 {
            for m in [4usize, 6, 8] {
                let x = match pattern_point(&cfg, j, m, 40, &mut rng) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                let comp = locate(&x, &cfg).unwrap();
                if let (CaseTag::Case22, Some(mid)) = (comp.case_tag, &comp.midpoint) {
                    let img = phi(mid, &cfg).unwrap();
                    assert!(
                        (img.coords[0] - cfg.tent_crit[comp.j]).abs() < 1e-9,
                        "midpoint image off: {} vs {}",
                        img.coords[0],
                        cfg.tent_crit[comp.j]
                    );
                    tested += 1;
                }
            }
        }
        assert!(tested >= 3, "only {tested} midpoints exercised");
    }

    #[test]
    fn lambda_uniformity() {
        let cfg = config_384();
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        // two different components with the same deviation depth
        let a = pattern_point(&cfg, 0, 6, 40, &mut rng).unwrap();
        let b = pattern_point(&cfg, 0, 6, 40, &mut rng).unwrap();
        let (la, ca) = transfer_profile(&a, &cfg, 64).unwrap();
        let (lb, cb) = transfer_profile(&b, &cfg, 64).unwrap();
        if la == lb {
            assert_eq!(ca.len(), cb.len());
            for (pa, pb) in ca.iter().zip(&cb) {
                assert!((pa.1 - pb.1).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn injectivity_on_samples() {
        let cfg = config_384();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut pts = Vec::new();
        for _ in 0..40 {
            let x = invlim::random_point(&cfg.q, 40, &mut rng, true);
            if let Ok(img) = phi(&x, &cfg) {
                pts.push((x, img));
            }
        }
        assert!(pts.len() >= 20);
        for i in 0..pts.len() {
            for k in (i + 1)..pts.len() {
                let (dx, _) = dist(&pts[i].0, &pts[k].0).unwrap();
                if dx > 1e-6 {
                    let (dimg, _) = dist(&pts[i].1, &pts[k].1).unwrap();
                    assert!(dimg > 0.0, "distinct points collapsed");
                }
            }
        }
    }

    #[test]
    fn conjugate_rotates_endpoints() {
        let cfg = config_384();
        for r in [-2i64, -1, 0, 1, 2, 3] {
            for j in 0..3usize {
                let e = cfg.tent_endpoint(j);
                let img = conjugate(r, &cfg, &e).unwrap();
                let jj = (((j as i64 + r) % 3 + 3) % 3) as usize;
                assert!(
                    img.same_point(&cfg.tent_endpoint(jj)),
                    "endpoint rotation fails for r={r}, j={j}"
                );
            }
        }
    }

    #[test]
    fn conjugate_identity_when_r_zero() {
        let cfg = config_384();
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let mut checked = 0;
        for _ in 0..40 {
            let x = invlim::random_point(&cfg.t, 40, &mut rng, true);
            if let Ok(img) = conjugate(0, &cfg, &x) {
                let (d, err) = dist(&x, &img).unwrap();
                assert!(d < 1e-8 + err, "identity conjugation moved a point by {d}");
                checked += 1;
            }
        }
        assert!(checked >= 15, "only {checked} points checked");
    }

    #[test]
    fn phi_full_fixes_zero_endpoint() {
        let cfg = config_384();
        let z = ILPoint::zero(cfg.q, 30);
        let img = phi_full(&z, &cfg).unwrap();
        assert!(img.coords.iter().all(|&v| v.abs() < 1e-12));
    }

    #[test]
    fn phi_full_sends_salient_to_salient() {
        let cfg = config_384();
        for i in 1..=8 {
            let path_q = FoldingPath::grown(cfg.q, 0, i).unwrap();
            let path_t = FoldingPath::grown(cfg.t, 0, i).unwrap();
            let tq = path_q.lift(path_q.salient(i).unwrap(), 36);
            let st = path_t.lift(path_t.salient(i).unwrap(), 36);
            let img = phi_full(&tq, &cfg).unwrap();
            assert!(
                (img.coords[0] - st.coords[0]).abs() < 1e-9,
                "salient {i}: {} vs {}",
                img.coords[0],
                st.coords[0]
            );
            let (d, err) = dist(&img, &st).unwrap();
            assert!(d <= 1e-7 + err, "salient {i} image off by {d}");
        }
    }

    #[test]
    fn chain_image_is_tent_chain() {
        let cfg = config_384();
        for p in 0..=6 {
            let img = chain_boundary_image(&cfg, p).unwrap();
            let tchain = invlim::natural_chain(&cfg.t, p, None).unwrap();
            assert_eq!(img.len(), tchain.boundaries.len(), "count differs at p={p}");
            for (a, b) in img.iter().zip(&tchain.boundaries) {
                assert!((a - b).abs() < 1e-8, "boundary {a} vs {b} at p={p}");
            }
        }
    }

    #[test]
    fn level_superset_for_nested_components() {
        let cfg = config_384();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let shallow = pattern_point(&cfg, 0, 4, 40, &mut rng).unwrap();
        let deep = pattern_point(&cfg, 0, 9, 40, &mut rng).unwrap();
        let cs = locate(&shallow, &cfg).unwrap();
        let cd = locate(&deep, &cfg).unwrap();
        if let (Some(ls), Some(ld)) = (cs.lambda, cd.lambda) {
            assert!(ld > ls);
            for l in &cs.v_levels {
                assert!(cd.v_levels.contains(l), "level {l} missing in the deeper component");
            }
        }
    }
}
