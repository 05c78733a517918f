//! Folding structure of arcs under projection: ordered turning-point models,
//! the arc-component of the fixed endpoint with its salient points, and
//! link-symmetric arcs inside natural chains.
//!
//! An arc is modelled by its projection as an ordered node list. Critical
//! nodes carry an age: a node born at a crossing has age 0 and value `c`;
//! after `k` extensions it has age `k` and value `c_k`, which is exactly its
//! p-level. Node values are always read from the critical-orbit table, so
//! they carry no accumulated drift.

use crate::invlim::{ILPoint, Tail};
use crate::map::{UnimodalMap, CRIT, TIE_EPS};
use crate::invlim::Chain;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FoldingError {
    #[error("no salient point of level {0} in the computed path")]
    OutOfRange(usize),
    #[error("node budget of {0} exceeded")]
    NodeBudget(usize),
    #[error("point not on the computed path")]
    NotOnPath,
}

/// Default node budget for path growth.
pub const NODE_BUDGET: usize = 200_000;

/// Sides at successive depths, stored deepest-last so that prepending a new
/// shallowest side is a push.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SideWord(Vec<u8>);

impl SideWord {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Side at depth `m` (1-based); `None` beyond the recorded depth.
    pub fn side_at(&self, m: usize) -> Option<u8> {
        if m == 0 || m > self.0.len() {
            None
        } else {
            Some(self.0[self.0.len() - m])
        }
    }

    fn prepend(&mut self, side: u8) {
        self.0.push(side);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    /// An arc end or tube wall; the value is mapped forward numerically.
    Anchor(f64),
    /// A critical node of the given age; its value is `c_age`.
    Crit(usize),
}

#[derive(Debug, Clone)]
pub struct PathNode {
    pub kind: NodeKind,
    /// Sides of the coordinates below this node's critical hit (for anchors,
    /// below the arc's model depth).
    pub word: SideWord,
}

/// Ordered projection model of an arc: nodes joined by monotone segments.
#[derive(Debug, Clone)]
pub struct ArcPath {
    pub map: UnimodalMap,
    pub nodes: Vec<PathNode>,
    /// Per-segment side words (depth 1 = one pullback below the current
    /// projection level).
    pub seg_words: Vec<SideWord>,
    /// Forward critical orbit table `c_0 = c, c_1, c_2, ...`.
    crit: Vec<f64>,
    /// Number of extensions applied.
    pub age: usize,
}

impl ArcPath {
    pub fn from_interval(map: UnimodalMap, lo: f64, hi: f64, max_age: usize) -> ArcPath {
        ArcPath {
            map,
            nodes: vec![
                PathNode {
                    kind: NodeKind::Anchor(lo),
                    word: SideWord::default(),
                },
                PathNode {
                    kind: NodeKind::Anchor(hi),
                    word: SideWord::default(),
                },
            ],
            seg_words: vec![SideWord::default()],
            crit: map.crit_orbit(max_age + 4),
            age: 0,
        }
    }

    pub fn value(&self, idx: usize) -> f64 {
        match self.nodes[idx].kind {
            NodeKind::Anchor(v) => v,
            NodeKind::Crit(age) => self.crit[age],
        }
    }

    pub fn level(&self, idx: usize) -> Option<usize> {
        match self.nodes[idx].kind {
            NodeKind::Crit(age) => Some(age),
            NodeKind::Anchor(_) => None,
        }
    }

    pub fn seg_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn crit_value(&self, k: usize) -> f64 {
        self.crit[k]
    }

    fn ensure_crit(&mut self, upto: usize) {
        if self.crit.len() <= upto {
            self.crit = self.map.crit_orbit(upto + 8);
        }
    }

    /// Side of segment `i` relative to the critical point, decided by the
    /// endpoint farther from `c`.
    pub fn seg_side(&self, i: usize) -> u8 {
        let a = self.value(i);
        let b = self.value(i + 1);
        let v = if (a - CRIT).abs() >= (b - CRIT).abs() {
            a
        } else {
            b
        };
        if v < CRIT {
            0
        } else {
            1
        }
    }

    /// One forward extension: record segment sides, map node values forward
    /// (ages increment), and insert age-0 critical nodes where a segment's
    /// image crosses the critical point.
    pub fn extend(&mut self, budget: usize) -> Result<(), FoldingError> {
        self.ensure_crit(self.age + 4);
        let nseg = self.seg_count();
        let mut insertions: Vec<Option<SideWord>> = vec![None; nseg];
        for i in 0..nseg {
            let side = self.seg_side(i);
            self.seg_words[i].prepend(side);
            // the image crosses c iff the branch preimage of c lies strictly
            // inside the segment (a tied endpoint is a node, not a crossing)
            if let Ok(z) = self.map.inv_branch(CRIT, side) {
                let (a, b) = (self.value(i), self.value(i + 1));
                let (lo, hi) = (a.min(b), a.max(b));
                if z > lo + TIE_EPS && z < hi - TIE_EPS {
                    insertions[i] = Some(self.seg_words[i].clone());
                }
            }
        }
        // map node values forward
        for node in &mut self.nodes {
            match node.kind {
                NodeKind::Crit(age) => node.kind = NodeKind::Crit(age + 1),
                NodeKind::Anchor(v) => node.kind = NodeKind::Anchor(self.map.eval(v)),
            }
        }
        // splice in the new markers
        let mut nodes = Vec::with_capacity(self.nodes.len() + nseg);
        let mut seg_words = Vec::with_capacity(self.seg_words.len() + nseg);
        for i in 0..nseg {
            nodes.push(self.nodes[i].clone());
            if let Some(word) = insertions[i].take() {
                nodes.push(PathNode {
                    kind: NodeKind::Crit(0),
                    word: word.clone(),
                });
                seg_words.push(word.clone());
                seg_words.push(word);
            } else {
                seg_words.push(self.seg_words[i].clone());
            }
        }
        nodes.push(self.nodes[nseg].clone());
        if nodes.len() > budget {
            return Err(FoldingError::NodeBudget(budget));
        }
        self.nodes = nodes;
        self.seg_words = seg_words;
        self.age += 1;
        Ok(())
    }

    /// Maximal critical-node age on the path.
    pub fn max_level(&self) -> Option<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n.kind {
                NodeKind::Crit(a) => Some(a),
                _ => None,
            })
            .max()
    }
}

/// Position on a path: a segment index and a value inside that segment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPos {
    pub seg: usize,
    pub value: f64,
}

/// The folding path: the projection of the initial arc of the arc-component
/// of the fixed endpoint, from `0bar` to the salient point of level `gen`.
#[derive(Debug, Clone)]
pub struct FoldingPath {
    pub p: usize,
    pub arc: ArcPath,
    pub gen: usize,
}

impl FoldingPath {
    /// Seed path of generation 1: `0 -> c (level 0) -> c_1 (level 1)`, with
    /// all-left words below.
    pub fn seed(map: UnimodalMap, p: usize) -> FoldingPath {
        let mut arc = ArcPath::from_interval(map, 0.0, 0.0, 8);
        arc.nodes = vec![
            PathNode {
                kind: NodeKind::Anchor(0.0),
                word: SideWord::default(),
            },
            PathNode {
                kind: NodeKind::Crit(0),
                word: SideWord::default(),
            },
            PathNode {
                kind: NodeKind::Crit(1),
                word: SideWord::default(),
            },
        ];
        arc.seg_words = vec![SideWord::default(), SideWord::default()];
        arc.age = 1;
        FoldingPath { p, arc, gen: 1 }
    }

    pub fn grown(map: UnimodalMap, p: usize, gen: usize) -> Result<FoldingPath, FoldingError> {
        let mut path = FoldingPath::seed(map, p);
        while path.gen < gen {
            path.extend()?;
        }
        Ok(path)
    }

    /// One generation of growth.
    pub fn extend(&mut self) -> Result<(), FoldingError> {
        self.arc.extend(NODE_BUDGET)?;
        self.gen += 1;
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.arc.nodes.len()
    }

    pub fn value(&self, idx: usize) -> f64 {
        self.arc.value(idx)
    }

    pub fn level(&self, idx: usize) -> Option<usize> {
        self.arc.level(idx)
    }

    /// Index of the salient point of level `i`: the first node of that level
    /// from the `0bar` end. Verifies that the levels seen before it form a
    /// strictly increasing record.
    pub fn salient(&self, i: usize) -> Result<usize, FoldingError> {
        if i == 0 || i > self.gen {
            return Err(FoldingError::OutOfRange(i));
        }
        let mut record = 0usize;
        for (idx, node) in self.arc.nodes.iter().enumerate() {
            if let NodeKind::Crit(age) = node.kind {
                if age == i {
                    return Ok(idx);
                }
                if age > record {
                    if age > i {
                        break;
                    }
                    record = age;
                }
            }
        }
        Err(FoldingError::OutOfRange(i))
    }

    /// Lift a node to an inverse-limit point at representable depth `depth`.
    ///
    /// Coordinates above the critical hit are forward images of `c` (read
    /// from the orbit table), below it the node's side word applies, and the
    /// all-left tail takes over past the recorded word.
    pub fn lift(&self, idx: usize, depth: usize) -> ILPoint {
        let map = self.arc.map;
        let p = self.p;
        let mut coords = Vec::with_capacity(depth + 1);
        match self.arc.nodes[idx].kind {
            NodeKind::Anchor(_) => {
                // only the 0bar end is an anchor on a folding path
                return ILPoint::zero(map, depth);
            }
            NodeKind::Crit(age) => {
                for m in 0..=depth {
                    if m <= p + age {
                        let k = age + p - m; // c_k, with k = 0 at the hit
                        coords.push(self.arc.crit_value(k));
                    } else {
                        let below = m - (p + age);
                        let side = self.arc.nodes[idx].word.side_at(below).unwrap_or(0);
                        let prev = *coords.last().unwrap();
                        let v = map.inv_branch(prev, side).unwrap_or(0.0);
                        coords.push(v);
                    }
                }
            }
        }
        ILPoint::new(map, coords, Tail::ZeroTail).expect("lifted node is a valid backward orbit")
    }

    /// Locate an inverse-limit point on the path by matching its backward
    /// side word against the segment words, then its projection value.
    pub fn locate(&self, x: &ILPoint) -> Result<PathPos, FoldingError> {
        let depth_avail = x.depth().saturating_sub(self.p);
        let v = x.coords[self.p];
        let word_len = self.arc.age.min(depth_avail);
        let sides: Vec<Option<u8>> = (1..=word_len)
            .map(|m| {
                let val = x.coords[self.p + m];
                if (val - CRIT).abs() <= TIE_EPS {
                    None
                } else if val < CRIT {
                    Some(0)
                } else {
                    Some(1)
                }
            })
            .collect();
        'seg: for i in 0..self.arc.seg_count() {
            let w = &self.arc.seg_words[i];
            for (m, s) in sides.iter().enumerate() {
                if let (Some(s), Some(ws)) = (s, w.side_at(m + 1)) {
                    if *s != ws {
                        continue 'seg;
                    }
                }
            }
            let (a, b) = (self.value(i), self.value(i + 1));
            if v >= a.min(b) - 1e-9 && v <= a.max(b) + 1e-9 {
                return Ok(PathPos { seg: i, value: v });
            }
        }
        Err(FoldingError::NotOnPath)
    }
}

/// A link-symmetric arc: the visited link sequence with its central index.
#[derive(Debug, Clone, Serialize)]
pub struct SymArc {
    pub links: Vec<usize>,
    pub center_index: usize,
}

impl SymArc {
    pub fn half_width(&self) -> usize {
        self.center_index
    }

    pub fn is_symmetric(&self) -> bool {
        let k = self.links.len() - 1;
        if k % 2 != 0 || self.center_index * 2 != k {
            return false;
        }
        (0..=k).all(|i| self.links[i] == self.links[k - i])
    }
}

/// Walks link visits along a path, one direction at a time.
struct LinkWalker<'a> {
    path: &'a ArcPath,
    chain: &'a Chain,
    seg: i64,
    cell: usize,
    dir: i64,
    /// target cell at the end of the current segment
    target: usize,
}

impl<'a> LinkWalker<'a> {
    fn new(path: &'a ArcPath, chain: &'a Chain, start_node: usize, dir: i64) -> Option<LinkWalker<'a>> {
        let seg = if dir > 0 {
            start_node as i64
        } else {
            start_node as i64 - 1
        };
        if seg < 0 || seg >= path.seg_count() as i64 {
            return None;
        }
        let start_cell = chain.link_of(path.value(start_node));
        let mut w = LinkWalker {
            path,
            chain,
            seg,
            cell: start_cell,
            dir,
            target: start_cell,
        };
        w.target = w.segment_target();
        Some(w)
    }

    /// Cell reached at the far end of the current segment, honoring the
    /// boundary-touch convention: a turn exactly on a boundary pokes into
    /// the neighboring link's glue overlap.
    fn segment_target(&self) -> usize {
        let far_node = if self.dir > 0 {
            self.seg as usize + 1
        } else {
            self.seg as usize
        };
        let v = self.path.value(far_node);
        let near_node = if self.dir > 0 {
            self.seg as usize
        } else {
            self.seg as usize + 1
        };
        let going_up = v > self.path.value(near_node);
        let mut cell = self.chain.link_of(v);
        // on-boundary adjustment
        let bs = &self.chain.boundaries;
        if let Some(i) = bs.iter().position(|&b| (b - v).abs() <= 1e-9) {
            if going_up {
                cell = i.min(self.chain.link_count() - 1);
            } else {
                cell = i.saturating_sub(1);
            }
        }
        cell
    }

    /// Emit the next link visit, or `None` at the end of the path.
    fn next_visit(&mut self) -> Option<usize> {
        loop {
            if self.cell != self.target {
                self.cell = if self.target > self.cell {
                    self.cell + 1
                } else {
                    self.cell - 1
                };
                return Some(self.cell);
            }
            // advance to the next segment
            let next_seg = self.seg + self.dir;
            if next_seg < 0 || next_seg >= self.path.seg_count() as i64 {
                return None;
            }
            self.seg = next_seg;
            self.target = self.segment_target();
        }
    }
}

/// The maximal link-symmetric arc of the path centered at `center_node`:
/// grown greedily in both directions while the visited link sequences agree.
pub fn max_link_symmetric_arc(
    path: &FoldingPath,
    chain: &Chain,
    center_node: usize,
) -> SymArc {
    let center_cell = chain.link_of(path.value(center_node));
    let mut left = LinkWalker::new(&path.arc, chain, center_node, -1);
    let mut right = LinkWalker::new(&path.arc, chain, center_node, 1);
    let mut lseq = Vec::new();
    let mut rseq = Vec::new();
    loop {
        let lv = left.as_mut().and_then(|w| w.next_visit());
        let rv = right.as_mut().and_then(|w| w.next_visit());
        match (lv, rv) {
            (Some(a), Some(b)) if a == b => {
                lseq.push(a);
                rseq.push(b);
            }
            _ => break,
        }
    }
    let mut links = Vec::with_capacity(2 * lseq.len() + 1);
    links.extend(lseq.iter().rev());
    links.push(center_cell);
    links.extend(rseq.iter());
    SymArc {
        center_index: lseq.len(),
        links,
    }
}

/// Link visit sequence starting at a node, in one direction, up to `limit`
/// visits (for image comparisons).
pub fn link_visits(path: &FoldingPath, chain: &Chain, start_node: usize, dir: i64, limit: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(limit);
    if let Some(mut w) = LinkWalker::new(&path.arc, chain, start_node, dir) {
        while out.len() < limit {
            match w.next_visit() {
                Some(v) => out.push(v),
                None => break,
            }
        }
    }
    out
}

/// Nodes whose values lie in the given link, grouped into maximal runs of
/// consecutive nodes (the arc-components of the path inside the link).
pub fn p_points_in_link(path: &FoldingPath, chain: &Chain, link_idx: usize) -> Vec<Vec<usize>> {
    let (lo, hi) = chain.link(link_idx);
    let mut groups = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    for idx in 0..path.node_count() {
        let v = path.value(idx);
        if v > lo && v < hi {
            current.push(idx);
        } else if !current.is_empty() {
            groups.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invlim::natural_chain;

    fn t2() -> UnimodalMap {
        UnimodalMap::tent(2.0).unwrap()
    }

    #[test]
    fn seed_and_first_extension() {
        let mut path = FoldingPath::seed(t2(), 3);
        assert_eq!(path.gen, 1);
        assert_eq!(path.node_count(), 3);
        assert_eq!(path.value(1), 0.5);
        assert_eq!(path.level(1), Some(0));
        assert_eq!(path.level(2), Some(1));
        path.extend().unwrap();
        // 0 -> c -> c1 -> c -> c2; for the full tent map c1 = 1, c2 = 0
        assert_eq!(path.gen, 2);
        assert_eq!(path.arc.max_level(), Some(2));
    }

    #[test]
    fn max_level_equals_generation() {
        for g in 2..=10 {
            let path = FoldingPath::grown(t2(), 4, g).unwrap();
            assert_eq!(path.arc.max_level(), Some(g));
        }
    }

    #[test]
    fn node_count_doubles_for_full_tent() {
        // crossing count tracks the lap counts of the full map: 2^g + 1 nodes
        let mut path = FoldingPath::seed(t2(), 4);
        for g in 1..=9 {
            assert_eq!(path.node_count(), (1 << g) + 1);
            path.extend().unwrap();
        }
    }

    #[test]
    fn salient_levels_are_their_index() {
        let q = UnimodalMap::quadratic(3.84).unwrap();
        for p in [2usize, 5, 8] {
            let path = FoldingPath::grown(q, p, 12).unwrap();
            for i in 1..=12 {
                let s = path.salient(i).unwrap();
                assert_eq!(path.level(s), Some(i));
            }
        }
    }

    #[test]
    fn salient_recurrence_under_extension() {
        // the image of the i-th salient is the (i+1)-st
        let map = UnimodalMap::tent(1.8).unwrap();
        let path = FoldingPath::grown(map, 3, 9).unwrap();
        let mut next = path.clone();
        next.extend().unwrap();
        for i in 1..=9 {
            let a = path.salient(i).unwrap();
            let b = next.salient(i + 1).unwrap();
            // same point of the arc-component: the lift of b is the shift of
            // the lift of a
            let la = path.lift(a, 20).shift();
            let lb = next.lift(b, 20);
            assert!(la.same_point(&lb), "salient recurrence fails at i={i}");
        }
    }

    #[test]
    fn cross_depth_identity() {
        // the salient p-point of level i equals the salient q-point of level
        // i + p - q as a point of the arc-component
        let map = UnimodalMap::tent(2.0).unwrap();
        let (p, q) = (6usize, 4usize);
        for i in 1..=6 {
            let path_p = FoldingPath::grown(map, p, i).unwrap();
            let path_q = FoldingPath::grown(map, q, i + p - q).unwrap();
            let sp = path_p.lift(path_p.salient(i).unwrap(), 24);
            let sq = path_q.lift(path_q.salient(i + p - q).unwrap(), 24);
            assert!(sp.same_point(&sq), "cross-depth identity fails at i={i}");
        }
    }

    #[test]
    fn extension_commutes_with_shift() {
        let map = UnimodalMap::quadratic(3.9).unwrap();
        let path = FoldingPath::grown(map, 4, 7).unwrap();
        let mut next = path.clone();
        next.extend().unwrap();
        // every level >= 1 node of the extended path of level l+1 matches the
        // shift of a node of the base path of level l, node-for-node in order
        let base: Vec<usize> = (0..path.node_count())
            .filter(|&i| path.level(i).is_some())
            .collect();
        let image: Vec<usize> = (0..next.node_count())
            .filter(|&i| next.level(i).map_or(false, |l| l >= 1))
            .collect();
        assert_eq!(base.len(), image.len());
        for (&a, &b) in base.iter().zip(&image) {
            assert_eq!(path.level(a).unwrap() + 1, next.level(b).unwrap());
            let va = map.eval(path.value(a));
            let vb = next.value(b);
            assert!((va - vb).abs() < 1e-9);
        }
    }

    #[test]
    fn level_nodes_hit_orbit_values() {
        let map = UnimodalMap::quadratic(3.7).unwrap();
        let path = FoldingPath::grown(map, 3, 9).unwrap();
        let orbit = map.crit_orbit(10);
        for idx in 0..path.node_count() {
            if let Some(l) = path.level(idx) {
                assert!((path.value(idx) - orbit[l]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn links_of_equal_level_share_salient() {
        let map = t2();
        let p = 4;
        let path = FoldingPath::grown(map, p, 8).unwrap();
        let chain = natural_chain(&map, p, None).unwrap();
        for k in 1..=8 {
            let sal = path.salient(k).unwrap();
            let link = chain.link_of(path.value(sal));
            for idx in 0..path.node_count() {
                if path.level(idx) == Some(k) {
                    assert_eq!(chain.link_of(path.value(idx)), link);
                }
            }
        }
    }

    #[test]
    fn symmetric_arc_at_salient() {
        let map = t2();
        let p = 5;
        let path = FoldingPath::grown(map, p, 9).unwrap();
        let chain = natural_chain(&map, p, None).unwrap();
        for i in 2..=6 {
            let sal = path.salient(i).unwrap();
            let arc = max_link_symmetric_arc(&path, &chain, sal);
            assert!(arc.is_symmetric());
            assert!(arc.links.len() >= 3, "salient {i} has a trivial arc");
            // the central link contains the value c_i
            let center = arc.links[arc.center_index];
            let (lo, hi) = chain.link(center);
            let ci = map.crit_orbit(i)[i];
            assert!(ci > lo && ci < hi);
        }
    }

    #[test]
    fn empty_link_has_no_p_points() {
        let map = UnimodalMap::tent(1.7).unwrap();
        let p = 3;
        let path = FoldingPath::grown(map, p, 6).unwrap();
        let chain = natural_chain(&map, p, None).unwrap();
        // the cell adjacent to 0 is never revisited by critical values
        let groups = p_points_in_link(&path, &chain, 0);
        for g in &groups {
            for &idx in g {
                assert!(path.level(idx).is_none() || path.value(idx) > 0.0);
            }
        }
    }
}
