//! Interference avoidance: the link conflict graph, jointly schedulable
//! receiver sets (hyperedges) and the fractional covering LP over them.
//!
//! Two independent routes reach the same number. [`fractional_cover`]
//! covers receivers with maximal hyperedges built from private transmitters.
//! [`selective_chromatic`] starts from the links instead: every maximal
//! independent set of the conflict graph serves the receivers it touches in
//! one slot, and those receiver sets are covered fractionally.

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lp::fractional_set_cover;
use crate::rational::Rational;
use crate::topology::{mask_indices, mask_labels, Topology};

pub const HYPEREDGE_MAX_K: usize = 16;
pub const CHROMATIC_MAX_K: usize = 12;
pub const BRUTE_COVER_MAX_K: usize = 6;
pub const BRUTE_COVER_MAX_N: usize = 8;

/// Links of a topology with their pairwise conflicts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    /// `(transmitter, receiver)` 1-based, sorted by receiver then transmitter.
    pub links: Vec<(usize, usize)>,
    /// Symmetric adjacency between link indices; the diagonal is false.
    pub adjacency: Vec<Vec<bool>>,
    /// `clusters[j]`: indices of the links ending at receiver `j + 1`.
    pub clusters: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn vertex_count(&self) -> usize {
        self.links.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }
}

/// Builds the conflict graph: links sharing an endpoint conflict, and links
/// `(i1, j1)`, `(i2, j2)` conflict when `i1` reaches `j2` or `i2` reaches `j1`.
pub fn build_conflict_graph(topo: &Topology) -> ConflictGraph {
    let k = topo.k();
    let mut links = Vec::new();
    let mut clusters = vec![Vec::new(); k];
    for (j, cluster) in clusters.iter_mut().enumerate() {
        for i in mask_indices(topo.t_mask(j)) {
            cluster.push(links.len());
            links.push((i + 1, j + 1));
        }
    }
    let n = links.len();
    let mut adjacency = vec![vec![false; n]; n];
    for a in 0..n {
        for b in (a + 1)..n {
            let (i1, j1) = (links[a].0 - 1, links[a].1 - 1);
            let (i2, j2) = (links[b].0 - 1, links[b].1 - 1);
            let conflict = i1 == i2 || j1 == j2 || topo.link(j2, i1) || topo.link(j1, i2);
            adjacency[a][b] = conflict;
            adjacency[b][a] = conflict;
        }
    }
    ConflictGraph { links, adjacency, clusters }
}

/// A receiver set that can be served in one slot, with a private transmitter
/// per receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hyperedge {
    /// 1-based receivers, ascending.
    pub receivers: Vec<usize>,
    /// `(receiver, transmitter)` 1-based: the smallest transmitter heard by
    /// the receiver and by no other member.
    pub witnesses: Vec<(usize, usize)>,
}

impl Hyperedge {
    pub fn mask(&self) -> u64 {
        crate::topology::labels_mask(&self.receivers)
    }
}

/// For receiver set `x`, the transmitters heard by exactly one member.
pub(crate) fn private_transmitters(topo: &Topology, x: u64) -> u64 {
    let mut seen = 0u64;
    let mut multi = 0u64;
    for j in mask_indices(x) {
        multi |= seen & topo.t_mask(j);
        seen |= topo.t_mask(j);
    }
    seen & !multi
}

/// Whether every receiver in `x` hears a transmitter that no other member hears.
pub fn is_feasible_hyperedge(topo: &Topology, x: u64) -> bool {
    if x == 0 {
        return false;
    }
    let private = private_transmitters(topo, x);
    mask_indices(x).into_iter().all(|j| topo.t_mask(j) & private != 0)
}

/// Builds the hyperedge record for a feasible receiver set.
pub fn hyperedge_from_mask(topo: &Topology, x: u64) -> Option<Hyperedge> {
    if !is_feasible_hyperedge(topo, x) {
        return None;
    }
    let private = private_transmitters(topo, x);
    let witnesses = mask_indices(x)
        .into_iter()
        .map(|j| (j + 1, (topo.t_mask(j) & private).trailing_zeros() as usize + 1))
        .collect();
    Some(Hyperedge { receivers: mask_labels(x), witnesses })
}

/// Inclusion-maximal feasible receiver sets, ordered by receiver bitmask.
pub fn enumerate_maximal_hyperedges(topo: &Topology) -> Result<Vec<Hyperedge>> {
    let k = topo.k();
    if k > HYPEREDGE_MAX_K {
        return Err(Error::GuardExceeded { method: "hyperedges", k, max: HYPEREDGE_MAX_K });
    }
    enumerate_maximal_hyperedges_unchecked(topo)
}

pub(crate) fn enumerate_maximal_hyperedges_unchecked(topo: &Topology) -> Result<Vec<Hyperedge>> {
    Ok(maximal_hyperedge_masks(topo)
        .into_iter()
        .map(|x| hyperedge_from_mask(topo, x).expect("maximal sets are feasible"))
        .collect())
}

/// Feasibility is closed under taking subsets, so a feasible set is maximal
/// iff no single receiver can be added.
fn maximal_hyperedge_masks(topo: &Topology) -> Vec<u64> {
    let k = topo.k();
    let all = topo.all();
    (1..=all)
        .filter(|&x| {
            is_feasible_hyperedge(topo, x)
                && (0..k).all(|j| x >> j & 1 == 1 || !is_feasible_hyperedge(topo, x | 1 << j))
        })
        .collect()
}

/// Optimal fractional cover of the receivers by maximal hyperedges.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FractionalCover {
    /// Hyperedges with positive weight (at most 1).
    pub entries: Vec<(Hyperedge, Rational)>,
    pub value: Rational,
}

impl FractionalCover {
    /// Achievable symmetric DoF, the reciprocal of the cover value.
    pub fn dof(&self) -> Rational {
        self.value.recip()
    }
}

fn to_rational(x: &BigRational) -> Result<Rational> {
    Rational::from_big(x).ok_or_else(|| Error::InvariantViolation(format!("LP value {x} overflows i64")))
}

/// Solves the covering LP over maximal hyperedges in exact arithmetic.
pub fn fractional_cover(topo: &Topology) -> Result<FractionalCover> {
    let k = topo.k();
    if k > HYPEREDGE_MAX_K {
        return Err(Error::GuardExceeded { method: "hyperedges", k, max: HYPEREDGE_MAX_K });
    }
    fractional_cover_unchecked(topo)
}

pub(crate) fn fractional_cover_unchecked(topo: &Topology) -> Result<FractionalCover> {
    let edges = enumerate_maximal_hyperedges_unchecked(topo)?;
    let masks: Vec<u64> = edges.iter().map(Hyperedge::mask).collect();
    let sol = fractional_set_cover(topo.k(), &masks)?;
    let mut entries = Vec::new();
    for (edge, w) in edges.into_iter().zip(&sol.weights) {
        if !w.is_zero() {
            entries.push((edge, to_rational(w)?));
        }
    }
    let value = to_rational(&sol.value)?;
    Ok(FractionalCover { entries, value })
}

/// Fractional selective coloring: receiver clusters served by each weighted
/// independent set of links.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectiveColoring {
    /// 1-based receiver clusters with positive weight.
    pub classes: Vec<(Vec<usize>, Rational)>,
    /// Fractional selective chromatic number.
    pub value: Rational,
}

/// Fractional selective chromatic number of the conflict graph with
/// receiver clusters, computed from maximal independent sets of links.
pub fn selective_chromatic(topo: &Topology) -> Result<Rational> {
    selective_coloring(topo).map(|c| c.value)
}

/// Optimal fractional selective coloring with its weighted classes.
pub fn selective_coloring(topo: &Topology) -> Result<SelectiveColoring> {
    let k = topo.k();
    if k > CHROMATIC_MAX_K {
        return Err(Error::GuardExceeded { method: "selective_chromatic", k, max: CHROMATIC_MAX_K });
    }
    selective_coloring_unchecked(topo)
}

pub(crate) fn selective_coloring_unchecked(topo: &Topology) -> Result<SelectiveColoring> {
    let k = topo.k();
    let graph = build_conflict_graph(topo);
    let mut cluster_sets: Vec<u64> = maximal_independent_sets(&graph)
        .into_iter()
        .map(|set| set.iter().fold(0u64, |m, &v| m | 1 << (graph.links[v].1 - 1)))
        .collect();
    cluster_sets.sort_unstable();
    cluster_sets.dedup();
    let sol = fractional_set_cover(k, &cluster_sets)?;
    let mut classes = Vec::new();
    for (&set, w) in cluster_sets.iter().zip(&sol.weights) {
        if !w.is_zero() {
            classes.push((mask_labels(set), to_rational(w)?));
        }
    }
    Ok(SelectiveColoring { classes, value: to_rational(&sol.value)? })
}

/// Small dense bitset over vertex indices.
#[derive(Clone, PartialEq, Eq)]
struct VertexSet(Vec<u64>);

impl VertexSet {
    fn empty(n: usize) -> Self {
        VertexSet(vec![0; n.div_ceil(64).max(1)])
    }
    fn full(n: usize) -> Self {
        let mut s = Self::empty(n);
        for v in 0..n {
            s.insert(v);
        }
        s
    }
    fn insert(&mut self, v: usize) {
        self.0[v / 64] |= 1 << (v % 64);
    }
    fn remove(&mut self, v: usize) {
        self.0[v / 64] &= !(1 << (v % 64));
    }
    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }
    fn and(&self, o: &Self) -> Self {
        VertexSet(self.0.iter().zip(&o.0).map(|(a, b)| a & b).collect())
    }
    fn or(&self, o: &Self) -> Self {
        VertexSet(self.0.iter().zip(&o.0).map(|(a, b)| a | b).collect())
    }
    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }
    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(wi, &w)| mask_indices(w).into_iter().map(move |b| wi * 64 + b))
    }
}

/// Maximal independent sets (maximal cliques of the complement), found by
/// Bron-Kerbosch with pivoting.
pub fn maximal_independent_sets(graph: &ConflictGraph) -> Vec<Vec<usize>> {
    let n = graph.vertex_count();
    let compat: Vec<VertexSet> = (0..n)
        .map(|a| {
            let mut s = VertexSet::empty(n);
            for b in 0..n {
                if a != b && !graph.adjacent(a, b) {
                    s.insert(b);
                }
            }
            s
        })
        .collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    bron_kerbosch(&compat, &mut current, VertexSet::full(n), VertexSet::empty(n), &mut out);
    out
}

fn bron_kerbosch(
    compat: &[VertexSet],
    current: &mut Vec<usize>,
    mut p: VertexSet,
    mut x: VertexSet,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() {
        if x.is_empty() {
            out.push(current.clone());
        }
        return;
    }
    let pivot = p.or(&x).iter().max_by_key(|&u| p.and(&compat[u]).count()).expect("p is nonempty");
    let candidates: Vec<usize> = p.iter().filter(|&v| !compat[pivot].0[v / 64] >> (v % 64) & 1 == 1).collect();
    for v in candidates {
        current.push(v);
        bron_kerbosch(compat, current, p.and(&compat[v]), x.and(&compat[v]), out);
        current.pop();
        p.remove(v);
        x.insert(v);
    }
}

/// Whether some multiset of `n` feasible receiver sets covers every receiver
/// at least `t` times. Exhaustive search, used to cross-check the LP.
pub fn brute_force_t_fold_cover(topo: &Topology, t: usize, n: usize) -> Result<bool> {
    let k = topo.k();
    if k > BRUTE_COVER_MAX_K {
        return Err(Error::GuardExceeded { method: "brute_force_t_fold_cover", k, max: BRUTE_COVER_MAX_K });
    }
    if n > BRUTE_COVER_MAX_N {
        return Err(Error::InvalidArgument(format!("n={n} exceeds {BRUTE_COVER_MAX_N}")));
    }
    if t == 0 {
        return Ok(true);
    }
    // Feasibility straight from the definition, independent of the bitmask
    // shortcut used by the enumerator.
    let sets: Vec<Vec<usize>> = (0..k).map(|j| mask_indices(topo.t_mask(j))).collect();
    let feasible = |x: &[usize]| {
        x.iter().all(|&kk| sets[kk].iter().any(|z| x.iter().filter(|&&o| o != kk).all(|&o| !sets[o].contains(z))))
    };
    let mut candidates: Vec<Vec<usize>> = Vec::new();
    for bits in 1u32..(1 << k) {
        let x: Vec<usize> = (0..k).filter(|&j| bits >> j & 1 == 1).collect();
        if feasible(&x) {
            candidates.push(x);
        }
    }
    let maximal: Vec<&Vec<usize>> = candidates
        .iter()
        .filter(|x| !candidates.iter().any(|y| y.len() > x.len() && x.iter().all(|e| y.contains(e))))
        .collect();
    let mut need = vec![t; k];
    Ok(cover_search(&maximal, 0, n, &mut need))
}

fn cover_search(sets: &[&Vec<usize>], start: usize, remaining: usize, need: &mut [usize]) -> bool {
    let deficit = need.iter().copied().max().unwrap_or(0);
    if deficit == 0 {
        return true;
    }
    if deficit > remaining {
        return false;
    }
    for s in start..sets.len() {
        let touched: Vec<usize> = sets[s].iter().copied().filter(|&e| need[e] > 0).collect();
        for &e in &touched {
            need[e] -= 1;
        }
        let ok = cover_search(sets, s, remaining - 1, need);
        for &e in &touched {
            need[e] += 1;
        }
        if ok {
            return true;
        }
    }
    false
}
