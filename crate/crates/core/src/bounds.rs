//! Converse bounds: generator sequences, compound settings, and the
//! TDMA-optimality test through the side-information (demand) graph.

use serde::{Deserialize, Serialize};

use crate::alignment::build_afg;
use crate::error::{Error, Result};
use crate::linalg::RowSpace;
use crate::rational::Rational;
use crate::topology::{labels_mask, mask_indices, mask_labels, Topology};

pub const GENERATOR_MAX_K: usize = 8;
pub const COMPOUND_MAX_K: usize = 16;

/// Sign pattern `D` (one entry per coordinate, `+1` off the support) such
/// that `row * D` lies in the rational row span of `basis`.
///
/// Patterns are tried over the support of `row` in binary counting order,
/// starting from all positive. Since the span is closed under negation, the
/// first support coordinate is kept positive.
pub fn spans_with_sign(row: &[i64], basis: &[Vec<i64>]) -> Option<Vec<i8>> {
    let width = row.len();
    let to_q = |v: &[i64]| v.iter().map(|&x| Rational::from_integer(x)).collect::<Vec<_>>();
    let space = RowSpace::new(width, &basis.iter().map(|b| to_q(b)).collect::<Vec<_>>());
    signed_member(&space, row)
}

fn signed_member(space: &RowSpace, row: &[i64]) -> Option<Vec<i8>> {
    let width = row.len();
    let support: Vec<usize> = (0..width).filter(|&i| row[i] != 0).collect();
    if support.is_empty() {
        return Some(vec![1; width]);
    }
    // residual(row * D) = sum_i d_i * row_i * residual(e_i)
    let parts: Vec<Vec<Rational>> = support
        .iter()
        .map(|&i| {
            let mut e = vec![Rational::zero(); width];
            e[i] = Rational::from_integer(row[i]);
            space.residual(&e)
        })
        .collect();
    let free = support.len() - 1;
    for flips in 0u64..(1u64 << free) {
        let mut total = parts[0].clone();
        for (s, part) in parts.iter().enumerate().skip(1) {
            let negative = flips >> (s - 1) & 1 == 1;
            for (x, &y) in total.iter_mut().zip(part) {
                *x = if negative { *x - y } else { *x + y };
            }
        }
        if total.iter().all(Rational::is_zero) {
            let mut signs = vec![1i8; width];
            for (s, &i) in support.iter().enumerate().skip(1) {
                if flips >> (s - 1) & 1 == 1 {
                    signs[i] = -1;
                }
            }
            return Some(signs);
        }
    }
    None
}

/// One generation step of the closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationStep {
    /// 1-based receiver generated at this step.
    pub receiver: usize,
    /// 1-based transmitters whose signals are resolvable at this step.
    pub resolvable: Vec<usize>,
    /// Sign pattern applied to the receiver's row, one entry per transmitter.
    pub signs: Vec<i8>,
}

/// Result of running the closure from `I_0` inside `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTrace {
    pub generated: u64,
    pub steps: Vec<GenerationStep>,
}

fn matrix_row(topo: &Topology, j: usize) -> Vec<i64> {
    (0..topo.k()).map(|i| i64::from(topo.link(j, i))).collect()
}

/// Runs rounds until nothing new is generated. In each round the
/// resolvable transmitters are `A = {i : R_i ∩ S ⊆ G}`, and every receiver
/// of `S \ G` whose signed row lies in the span of `B_{I_0}` and the unit
/// rows of `A` joins `G` (ascending order within a round).
pub(crate) fn closure_trace(topo: &Topology, s: u64, i0: u64) -> ClosureTrace {
    let k = topo.k();
    let base: Vec<Vec<Rational>> = mask_indices(i0)
        .into_iter()
        .map(|j| matrix_row(topo, j).into_iter().map(Rational::from_integer).collect())
        .collect();
    let mut g = i0;
    let mut steps = Vec::new();
    loop {
        let a: u64 = (0..k).filter(|&i| topo.r_mask(i) & s & !g == 0).fold(0, |m, i| m | 1 << i);
        let mut gens = base.clone();
        for i in mask_indices(a) {
            let mut e = vec![Rational::zero(); k];
            e[i] = Rational::one();
            gens.push(e);
        }
        let space = RowSpace::new(k, &gens);
        let mut added = 0u64;
        for j in mask_indices(s & !g) {
            if let Some(signs) = signed_member(&space, &matrix_row(topo, j)) {
                added |= 1 << j;
                steps.push(GenerationStep { receiver: j + 1, resolvable: mask_labels(a), signs });
            }
        }
        if added == 0 {
            return ClosureTrace { generated: g, steps };
        }
        g |= added;
    }
}

/// Receivers generated from `i0` inside `s` (1-based), `i0` first and then
/// in generation order.
pub fn generator_closure(topo: &Topology, s: &[usize], i0: &[usize]) -> Result<Vec<usize>> {
    let k = topo.k();
    if s.iter().chain(i0).any(|&l| l == 0 || l > k) {
        return Err(Error::InvalidArgument("receiver label out of range".into()));
    }
    let (sm, im) = (labels_mask(s), labels_mask(i0));
    if im & !sm != 0 {
        return Err(Error::InvalidArgument("I_0 must be a subset of S".into()));
    }
    let trace = closure_trace(topo, sm, im);
    let mut out = mask_labels(im);
    out.extend(trace.steps.iter().map(|st| st.receiver));
    Ok(out)
}

/// Witness for the bound `|I_0| / |S|`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorCertificate {
    /// 1-based receiver set.
    pub s: Vec<usize>,
    /// 1-based initial generator, a subset of `s`.
    pub i0: Vec<usize>,
    /// Generated receivers, one per step, in order.
    pub sequence: Vec<GenerationStep>,
    pub bound: Rational,
}

impl GeneratorCertificate {
    /// Re-runs the closure and checks that it reproduces this certificate.
    pub fn check(&self, topo: &Topology) -> bool {
        let (s, i0) = (labels_mask(&self.s), labels_mask(&self.i0));
        let trace = closure_trace(topo, s, i0);
        trace.generated == s
            && trace.steps == self.sequence
            && self.bound == Rational::new(self.i0.len() as i64, self.s.len() as i64)
    }
}

fn certificate_for(topo: &Topology, s: u64, i0: u64) -> GeneratorCertificate {
    let trace = closure_trace(topo, s, i0);
    GeneratorCertificate {
        s: mask_labels(s),
        i0: mask_labels(i0),
        sequence: trace.steps,
        bound: Rational::new(i0.count_ones() as i64, s.count_ones() as i64),
    }
}

/// Subsets of `s` with exactly `size` elements, as bitmasks.
fn subsets_of_size(s: u64, size: usize) -> Vec<u64> {
    let items = mask_indices(s);
    let mut out = Vec::new();
    let mut pick: Vec<usize> = (0..size).collect();
    if size > items.len() {
        return out;
    }
    loop {
        out.push(pick.iter().fold(0u64, |m, &p| m | 1 << items[p]));
        let mut pos = size;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            if pick[pos] < items.len() - size + pos {
                pick[pos] += 1;
                for q in pos + 1..size {
                    pick[q] = pick[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Every `(S, I_0)` pair attaining the smallest ratio `|I_0|/|S|` whose
/// closure is all of `S`, ordered by `(I_0, S)` as sorted label lists.
pub fn optimal_generator_certificates(topo: &Topology) -> Result<Vec<GeneratorCertificate>> {
    let k = topo.k();
    if k > GENERATOR_MAX_K {
        return Err(Error::GuardExceeded { method: "generator", k, max: GENERATOR_MAX_K });
    }
    optimal_generator_certificates_unchecked(topo)
}

pub(crate) fn optimal_generator_certificates_unchecked(topo: &Topology) -> Result<Vec<GeneratorCertificate>> {
    Ok(optimal_generator_pairs(topo).into_iter().map(|(s, i0)| certificate_for(topo, s, i0)).collect())
}

fn optimal_generator_pairs(topo: &Topology) -> Vec<(u64, u64)> {
    let all = topo.all();
    // pass 1: the optimal ratio, pruning pairs that cannot beat the incumbent
    let mut best = Rational::one();
    for s in 1..=all {
        let n = s.count_ones() as i64;
        for size in 1..=n {
            if Rational::new(size, n) >= best {
                break;
            }
            if subsets_of_size(s, size as usize).into_iter().any(|i0| closure_trace(topo, s, i0).generated == s) {
                best = Rational::new(size, n);
                break;
            }
        }
    }
    // pass 2: every pair attaining it
    let mut pairs = Vec::new();
    for s in 1..=all {
        let n = s.count_ones() as i64;
        let size = best * Rational::from_integer(n);
        if size.denom() != 1 || size.numer() < 1 {
            continue;
        }
        for i0 in subsets_of_size(s, size.numer() as usize) {
            if closure_trace(topo, s, i0).generated == s {
                pairs.push((s, i0));
            }
        }
    }
    pairs.sort_by_key(|&(s, i0)| (mask_labels(i0), mask_labels(s)));
    pairs
}

/// Smallest `|I_0| / |S|` over receiver sets `S` and initial generators
/// `I_0 ⊆ S` whose closure covers `S`. Ties go to the smallest `(I_0, S)`
/// compared as sorted label lists.
pub fn generator_bound(topo: &Topology) -> Result<(Rational, GeneratorCertificate)> {
    let certs = optimal_generator_certificates(topo)?;
    let cert = certs.into_iter().next().expect("S = I_0 = {1..K} always closes");
    Ok((cert.bound, cert))
}

/// Witness for the compound-settings bound.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompoundCertificate {
    /// 1-based receiver set whose transmit sets cover every transmitter.
    pub s: Vec<usize>,
    /// 1-based transmitters reaching only receivers in `s`.
    pub s_prime: Vec<usize>,
    pub bound: Rational,
}

/// Minimum of `(K - |S'|) / (2K - |S'| - |S|)` over receiver sets `S` whose
/// transmit sets cover all transmitters, with `S' = {i : R_i ⊆ S}`.
///
/// `S = {1..K}` makes the ratio 0/0 and is skipped; none is returned when
/// no other set qualifies. Ties go to the smallest `S` as a sorted label list.
pub fn compound_bound(topo: &Topology) -> Result<Option<(Rational, CompoundCertificate)>> {
    let k = topo.k();
    if k > COMPOUND_MAX_K {
        return Err(Error::GuardExceeded { method: "compound", k, max: COMPOUND_MAX_K });
    }
    compound_bound_unchecked(topo)
}

pub(crate) fn compound_bound_unchecked(topo: &Topology) -> Result<Option<(Rational, CompoundCertificate)>> {
    let k = topo.k();
    let all = topo.all();
    let mut best: Option<(Rational, Vec<usize>, u64, u64)> = None;
    for s in 1..all {
        let cover = mask_indices(s).into_iter().fold(0u64, |m, j| m | topo.t_mask(j));
        if cover != all {
            continue;
        }
        let sp = (0..k).filter(|&i| topo.r_mask(i) & !s == 0).fold(0u64, |m, i| m | 1 << i);
        let (ns, nsp) = (s.count_ones() as i64, sp.count_ones() as i64);
        let value = Rational::new(k as i64 - nsp, 2 * k as i64 - nsp - ns).min(Rational::one());
        let labels = mask_labels(s);
        if best.as_ref().is_none_or(|(v, l, _, _)| (value, &labels) < (*v, l)) {
            best = Some((value, labels, s, sp));
        }
    }
    Ok(best.map(|(value, _, s, sp)| {
        (value, CompoundCertificate { s: mask_labels(s), s_prime: mask_labels(sp), bound: value })
    }))
}

/// Side information of each receiver: `S_k = ∪_{j ∉ T_k} R_j`, 1-based.
pub fn side_info_sets(topo: &Topology) -> Vec<Vec<usize>> {
    side_info_masks(topo).into_iter().map(mask_labels).collect()
}

fn side_info_masks(topo: &Topology) -> Vec<u64> {
    let k = topo.k();
    (0..k)
        .map(|r| mask_indices(topo.all() & !topo.t_mask(r)).into_iter().fold(0u64, |m, j| m | topo.r_mask(j)))
        .collect()
}

/// Directed bipartite graph: message `W_j` points to receiver `j`, and
/// receiver `j` points to every message in its side information.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandGraph {
    pub k: usize,
    /// 1-based side-information sets.
    pub side_info: Vec<Vec<usize>>,
}

impl DemandGraph {
    pub fn new(topo: &Topology) -> Self {
        DemandGraph { k: topo.k(), side_info: side_info_sets(topo) }
    }

    /// Directed edges as `(from, to)` node names (`"W3"`, `"Rx3"`).
    pub fn edges(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        for j in 1..=self.k {
            out.push((format!("W{j}"), format!("Rx{j}")));
        }
        for (j, side) in self.side_info.iter().enumerate() {
            for &m in side {
                out.push((format!("Rx{}", j + 1), format!("W{m}")));
            }
        }
        out
    }

    /// Whether the graph has a directed cycle. Every cycle alternates
    /// message and receiver nodes, so it suffices to look for a cycle in the
    /// message graph `j -> m` for `m` in the side information of receiver `j`.
    pub fn has_cycle(&self) -> bool {
        let k = self.k;
        let mut indegree = vec![0usize; k];
        for side in &self.side_info {
            for &m in side {
                indegree[m - 1] += 1;
            }
        }
        let mut ready: Vec<usize> = (0..k).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = ready.pop() {
            removed += 1;
            for &m in &self.side_info[v] {
                indegree[m - 1] -= 1;
                if indegree[m - 1] == 0 {
                    ready.push(m - 1);
                }
            }
        }
        removed < k
    }
}

/// TDMA (`1/K`) is optimal iff the demand graph is acyclic. The
/// alignment-feasible graph being empty is an equivalent condition; both
/// are computed and a disagreement is reported as an internal error.
pub fn tdma_optimal(topo: &Topology) -> Result<bool> {
    let acyclic = !DemandGraph::new(topo).has_cycle();
    let afg_empty = build_afg(topo).is_empty();
    if acyclic != afg_empty {
        return Err(Error::InvariantViolation(format!(
            "demand graph acyclic = {acyclic} but alignment-feasible graph empty = {afg_empty}"
        )));
    }
    Ok(acyclic)
}
