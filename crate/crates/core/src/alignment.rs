//! Interference alignment: which messages may share a signal subspace, how
//! many dimensions a receiver can ignore (non-conflict matrices), the search
//! over Hamiltonian cycles, perfect matchings and proper partitions, the
//! closed form for regular networks, and synthesis of explicit schemes.
//!
//! Cycles, portions and schemes use 1-based labels; computations use 0-based
//! bitmasks.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scheduling::{is_feasible_hyperedge, private_transmitters};
use crate::scheme::{Genericity, SchemeDescriptor, Transmission};
use crate::topology::{classify, find_similarity, labels_mask, mask_indices, mask_labels, Topology};

pub const HAMILTONIAN_MAX_K: usize = 9;
pub const PARTITION_MAX_K: usize = 8;

fn subset(a: u64, b: u64) -> bool {
    a & !b == 0
}

/// Messages `i`, `j` are joined when neither transmit set contains the other.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentFeasibleGraph {
    pub k: usize,
    /// Edges `(i, j)` with `i < j`, 1-based, sorted.
    pub edges: Vec<(usize, usize)>,
    #[serde(skip)]
    adj: Vec<u64>,
}

impl AlignmentFeasibleGraph {
    /// Whether 0-based vertices `i` and `j` are adjacent.
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adj[i] >> j & 1 == 1
    }

    /// Neighbors of 0-based vertex `i` as a bitmask.
    pub fn neighbors(&self, i: usize) -> u64 {
        self.adj[i]
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

pub fn build_afg(topo: &Topology) -> AlignmentFeasibleGraph {
    let k = topo.k();
    let mut adj = vec![0u64; k];
    let mut edges = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let (ti, tj) = (topo.t_mask(i), topo.t_mask(j));
            if !subset(ti, tj) && !subset(tj, ti) {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
                edges.push((i + 1, j + 1));
            }
        }
    }
    AlignmentFeasibleGraph { k, edges, adj }
}

/// Binary matrix marking, per row, the aligned subspaces a receiver can
/// ignore; `q` is the smallest row sum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonConflictMatrix {
    /// Final entries after column resets.
    pub entries: Vec<Vec<u8>>,
    /// Entries after the set phase, before any reset.
    pub set_phase: Vec<Vec<u8>>,
    /// 1-based indices of the columns zeroed by the reset test.
    pub reset_columns: Vec<usize>,
    pub q: usize,
}

impl NonConflictMatrix {
    fn finish(set_phase: Vec<Vec<u8>>, reset: Vec<bool>) -> Self {
        let mut entries = set_phase.clone();
        for row in entries.iter_mut() {
            for (c, x) in row.iter_mut().enumerate() {
                if reset[c] {
                    *x = 0;
                }
            }
        }
        let q = entries.iter().map(|r| r.iter().map(|&x| x as usize).sum()).min().unwrap_or(0);
        let reset_columns = reset.iter().enumerate().filter(|(_, &r)| r).map(|(c, _)| c + 1).collect();
        NonConflictMatrix { entries, set_phase, reset_columns, q }
    }

    /// Rows (0-based) carrying a 1 in column `c` (0-based).
    fn rows_with_one(&self, c: usize) -> Vec<usize> {
        (0..self.entries.len()).filter(|&r| self.entries[r][c] == 1).collect()
    }
}

fn validate_cycle(topo: &Topology, afg: &AlignmentFeasibleGraph, cycle: &[usize]) -> Result<Vec<usize>> {
    let k = topo.k();
    let bad = || Error::NotHamiltonian(cycle.to_vec());
    if k < 3 || cycle.len() != k {
        return Err(bad());
    }
    let mut seen = 0u64;
    let mut c = Vec::with_capacity(k);
    for &label in cycle {
        if label == 0 || label > k || seen >> (label - 1) & 1 == 1 {
            return Err(bad());
        }
        seen |= 1 << (label - 1);
        c.push(label - 1);
    }
    if (0..k).any(|j| !afg.adjacent(c[j], c[(j + 1) % k])) {
        return Err(bad());
    }
    Ok(c)
}

/// Cycle-form matrix: row `k` is cycle position `k` (receiver `i_k`), column
/// `j` is the edge `(i_j, i_{j+1})`.
///
/// Set phase: `a[k][j] = 1` iff neither private part of the edge
/// (`T_{i_j} \ T_{i_{j+1}}` and `T_{i_{j+1}} \ T_{i_j}`) lies inside
/// `T_{i_k}`. Reset: a column is zeroed when removing the transmit sets of
/// its 1-rows empties either private part. One pass over the columns.
pub fn non_conflict_matrix_cycle(topo: &Topology, cycle: &[usize]) -> Result<NonConflictMatrix> {
    let afg = build_afg(topo);
    let c = validate_cycle(topo, &afg, cycle)?;
    Ok(cycle_matrix(topo, &c))
}

fn edge_private_parts(topo: &Topology, c: &[usize], j: usize) -> (u64, u64) {
    let k = c.len();
    let a = topo.t_mask(c[j]);
    let b = topo.t_mask(c[(j + 1) % k]);
    (a & !b, b & !a)
}

fn cycle_matrix(topo: &Topology, c: &[usize]) -> NonConflictMatrix {
    let k = c.len();
    let mut set_phase = vec![vec![0u8; k]; k];
    let parts: Vec<(u64, u64)> = (0..k).map(|j| edge_private_parts(topo, c, j)).collect();
    for (row, &ck) in set_phase.iter_mut().zip(c) {
        let tk = topo.t_mask(ck);
        for (cell, &(p1, p2)) in row.iter_mut().zip(&parts) {
            if !subset(p1, tk) && !subset(p2, tk) {
                *cell = 1;
            }
        }
    }
    let reset = (0..k)
        .map(|j| {
            let (p1, p2) = edge_private_parts(topo, c, j);
            let covered = (0..k).filter(|&row| set_phase[row][j] == 1).fold(0u64, |m, row| m | topo.t_mask(c[row]));
            p1 & !covered == 0 || p2 & !covered == 0
        })
        .collect();
    NonConflictMatrix::finish(set_phase, reset)
}

/// Alignment along a Hamiltonian cycle of the alignment-feasible graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HamiltonianCertificate {
    /// 1-based message order `i_1..i_K`.
    pub cycle: Vec<usize>,
    pub matrix: NonConflictMatrix,
    /// `2 / (K - q)`.
    pub dof: Rational,
    /// `K - q`.
    pub coherence_required: usize,
}

/// Hamiltonian cycle maximizing `q`, ties going to the lexicographically
/// smallest cycle. Cycles start at message 1 and list the smaller neighbor
/// of 1 second, so each undirected cycle appears once.
pub fn best_hamiltonian(topo: &Topology) -> Result<Option<HamiltonianCertificate>> {
    let k = topo.k();
    if k > HAMILTONIAN_MAX_K {
        return Err(Error::GuardExceeded { method: "hamiltonian", k, max: HAMILTONIAN_MAX_K });
    }
    best_hamiltonian_unchecked(topo)
}

pub(crate) fn best_hamiltonian_unchecked(topo: &Topology) -> Result<Option<HamiltonianCertificate>> {
    let k = topo.k();
    if k < 3 {
        return Ok(None);
    }
    let afg = build_afg(topo);
    let mut best: Option<(usize, Vec<usize>, NonConflictMatrix)> = None;
    let mut path = vec![0usize];
    for_each_hamiltonian_cycle(&afg, &mut path, 1, &mut |cycle| {
        let m = cycle_matrix(topo, cycle);
        if best.as_ref().is_none_or(|(q, _, _)| m.q > *q) {
            best = Some((m.q, cycle.to_vec(), m));
        }
    });
    Ok(best.map(|(q, c, matrix)| HamiltonianCertificate {
        cycle: c.iter().map(|&x| x + 1).collect(),
        matrix,
        dof: Rational::new(2, (k - q) as i64),
        coherence_required: k - q,
    }))
}

/// Visits Hamiltonian cycles through vertex 0 in lexicographic order.
fn for_each_hamiltonian_cycle(
    afg: &AlignmentFeasibleGraph,
    path: &mut Vec<usize>,
    used: u64,
    visit: &mut dyn FnMut(&[usize]),
) {
    let k = afg.k;
    let last = *path.last().expect("path starts at vertex 0");
    if path.len() == k {
        if afg.adjacent(last, 0) && path[1] < path[k - 1] {
            visit(path);
        }
        return;
    }
    for next in mask_indices(afg.neighbors(last) & !used) {
        path.push(next);
        for_each_hamiltonian_cycle(afg, path, used | 1 << next, visit);
        path.pop();
    }
}

/// Maximum matching of a general graph by Edmonds' blossom algorithm.
/// Returns `mate[v]` for each vertex.
pub fn maximum_matching(afg: &AlignmentFeasibleGraph) -> Vec<Option<usize>> {
    let n = afg.k;
    let none = usize::MAX;
    let adj: Vec<Vec<usize>> = (0..n).map(|v| mask_indices(afg.neighbors(v))).collect();
    let mut mate = vec![none; n];
    for root in 0..n {
        if mate[root] != none {
            continue;
        }
        let mut parent = vec![none; n];
        let mut base: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        let mut queue = std::collections::VecDeque::new();
        used[root] = true;
        queue.push_back(root);
        let mut found = none;
        'search: while let Some(v) = queue.pop_front() {
            for &to in &adj[v] {
                if base[v] == base[to] || mate[v] == to {
                    continue;
                }
                if to == root || (mate[to] != none && parent[mate[to]] != none) {
                    let cur = lca(&mate, &base, &parent, v, to);
                    let mut blossom = vec![false; n];
                    mark_path(&mate, &base, &mut parent, &mut blossom, v, cur, to);
                    mark_path(&mate, &base, &mut parent, &mut blossom, to, cur, v);
                    for i in 0..n {
                        if blossom[base[i]] {
                            base[i] = cur;
                            if !used[i] {
                                used[i] = true;
                                queue.push_back(i);
                            }
                        }
                    }
                } else if parent[to] == none {
                    parent[to] = v;
                    if mate[to] == none {
                        found = to;
                        break 'search;
                    }
                    used[mate[to]] = true;
                    queue.push_back(mate[to]);
                }
            }
        }
        let mut v = found;
        while v != none {
            let pv = parent[v];
            let next = mate[pv];
            mate[v] = pv;
            mate[pv] = v;
            v = next;
        }
    }
    mate.into_iter().map(|m| (m != none).then_some(m)).collect()
}

fn lca(mate: &[usize], base: &[usize], parent: &[usize], mut a: usize, mut b: usize) -> usize {
    let none = usize::MAX;
    let mut seen = vec![false; mate.len()];
    loop {
        a = base[a];
        seen[a] = true;
        if mate[a] == none {
            break;
        }
        a = parent[mate[a]];
    }
    loop {
        b = base[b];
        if seen[b] {
            return b;
        }
        b = parent[mate[b]];
    }
}

fn mark_path(
    mate: &[usize],
    base: &[usize],
    parent: &mut [usize],
    blossom: &mut [bool],
    mut v: usize,
    b: usize,
    mut child: usize,
) {
    while base[v] != b {
        blossom[base[v]] = true;
        blossom[base[mate[v]]] = true;
        parent[v] = child;
        child = mate[v];
        v = parent[mate[v]];
    }
}

/// Perfect matching of the alignment-feasible graph as 1-based pairs, if one exists.
pub fn perfect_matching(topo: &Topology) -> Option<Vec<(usize, usize)>> {
    let afg = build_afg(topo);
    let mate = maximum_matching(&afg);
    if mate.iter().any(Option::is_none) {
        return None;
    }
    Some(mate.iter().enumerate().filter_map(|(v, m)| m.filter(|&u| v < u).map(|u| (v + 1, u + 1))).collect())
}

/// `2/K` when the alignment-feasible graph has a perfect matching.
pub fn perfect_matching_dof(topo: &Topology) -> Option<Rational> {
    perfect_matching(topo).map(|_| Rational::new(2, topo.k() as i64))
}

/// Alignment over a proper partition of the messages.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCertificate {
    /// Portions as ascending 1-based message lists.
    pub portions: Vec<Vec<usize>>,
    /// `K x kappa` matrix; row `i` is receiver `i`, column `m` is portion `m`.
    pub matrix: NonConflictMatrix,
    /// `1 / (kappa - q)`.
    pub dof: Rational,
    /// `kappa - q`.
    pub coherence_required: usize,
}

impl PartitionCertificate {
    pub fn kappa(&self) -> usize {
        self.portions.len()
    }
}

/// Private transmitter sets of each member of a portion.
fn portion_privates(topo: &Topology, portion: u64) -> Vec<(usize, u64)> {
    let private = private_transmitters(topo, portion);
    mask_indices(portion).into_iter().map(|t| (t, topo.t_mask(t) & private)).collect()
}

/// Partition-form matrix. Set phase: `a[i][m] = 1` iff no member's private
/// set lies inside `T_i`. Reset: a column is zeroed when removing the
/// transmit sets of its 1-rows empties some member's private set.
pub fn non_conflict_matrix_partition(topo: &Topology, portions: &[Vec<usize>]) -> Result<NonConflictMatrix> {
    let masks = validate_partition(topo, portions)?;
    Ok(partition_matrix(topo, &masks))
}

fn validate_partition(topo: &Topology, portions: &[Vec<usize>]) -> Result<Vec<u64>> {
    let k = topo.k();
    let mut union = 0u64;
    let mut masks = Vec::with_capacity(portions.len());
    for p in portions {
        if p.is_empty() || p.iter().any(|&l| l == 0 || l > k) {
            return Err(Error::InvalidArgument(format!("bad portion {p:?}")));
        }
        let m = labels_mask(p);
        if m & union != 0 || m.count_ones() as usize != p.len() {
            return Err(Error::InvalidArgument("portions overlap".into()));
        }
        if !is_feasible_hyperedge(topo, m) {
            return Err(Error::InvalidArgument(format!("portion {p:?} is not proper")));
        }
        union |= m;
        masks.push(m);
    }
    if union != topo.all() {
        return Err(Error::InvalidArgument("portions do not cover every message".into()));
    }
    Ok(masks)
}

fn partition_matrix(topo: &Topology, portions: &[u64]) -> NonConflictMatrix {
    let k = topo.k();
    let kappa = portions.len();
    let privates: Vec<Vec<(usize, u64)>> = portions.iter().map(|&p| portion_privates(topo, p)).collect();
    let mut set_phase = vec![vec![0u8; kappa]; k];
    for (m, privs) in privates.iter().enumerate() {
        for (i, row) in set_phase.iter_mut().enumerate() {
            let ti = topo.t_mask(i);
            if privs.iter().all(|&(_, p)| !subset(p, ti)) {
                row[m] = 1;
            }
        }
    }
    let reset = privates
        .iter()
        .enumerate()
        .map(|(m, privs)| {
            let covered = (0..k).filter(|&i| set_phase[i][m] == 1).fold(0u64, |acc, i| acc | topo.t_mask(i));
            privs.iter().any(|&(_, p)| p & !covered == 0)
        })
        .collect();
    NonConflictMatrix::finish(set_phase, reset)
}

/// Ordering key among partitions of equal DoF and size: the portion
/// bitmasks sorted in descending order, compared lexicographically.
fn partition_key(portions: &[u64]) -> Vec<u64> {
    let mut v = portions.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// Proper partition maximizing `1/(kappa - q)`; ties go to smaller `kappa`,
/// then to the smaller [`partition_key`].
pub fn best_partition(topo: &Topology) -> Result<Option<PartitionCertificate>> {
    let k = topo.k();
    if k > PARTITION_MAX_K {
        return Err(Error::GuardExceeded { method: "partition", k, max: PARTITION_MAX_K });
    }
    best_partition_unchecked(topo)
}

pub(crate) fn best_partition_unchecked(topo: &Topology) -> Result<Option<PartitionCertificate>> {
    let mut best: Option<(Rational, Vec<u64>, NonConflictMatrix)> = None;
    let mut blocks = Vec::new();
    for_each_proper_partition(topo, 0, &mut blocks, &mut |portions| {
        let m = partition_matrix(topo, portions);
        let dof = Rational::new(1, (portions.len() - m.q) as i64);
        let better = match &best {
            None => true,
            Some((bd, bp, _)) => match dof.cmp(bd) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => (portions.len(), partition_key(portions)) < (bp.len(), partition_key(bp)),
            },
        };
        if better {
            best = Some((dof, portions.to_vec(), m));
        }
    });
    Ok(best.map(|(dof, portions, matrix)| {
        let mut labeled: Vec<Vec<usize>> = portions.iter().map(|&p| mask_labels(p)).collect();
        let order: Vec<usize> = {
            let mut idx: Vec<usize> = (0..labeled.len()).collect();
            idx.sort_by_key(|&i| labeled[i][0]);
            idx
        };
        labeled = order.iter().map(|&i| labeled[i].clone()).collect();
        let matrix = reorder_columns(&matrix, &order);
        let kappa = labeled.len();
        PartitionCertificate { portions: labeled, coherence_required: kappa - matrix.q, matrix, dof }
    }))
}

fn reorder_columns(m: &NonConflictMatrix, order: &[usize]) -> NonConflictMatrix {
    let pick =
        |rows: &Vec<Vec<u8>>| -> Vec<Vec<u8>> { rows.iter().map(|r| order.iter().map(|&c| r[c]).collect()).collect() };
    let mut reset_columns: Vec<usize> = order
        .iter()
        .enumerate()
        .filter(|(_, &old)| m.reset_columns.contains(&(old + 1)))
        .map(|(new, _)| new + 1)
        .collect();
    reset_columns.sort_unstable();
    NonConflictMatrix { entries: pick(&m.entries), set_phase: pick(&m.set_phase), reset_columns, q: m.q }
}

/// Visits every partition of `0..K` into proper portions. Portions are
/// grown message by message; since sub-portions of proper portions are
/// proper, an improper partial portion is abandoned at once.
fn for_each_proper_partition(topo: &Topology, next: usize, blocks: &mut Vec<u64>, visit: &mut dyn FnMut(&[u64])) {
    if next == topo.k() {
        visit(blocks);
        return;
    }
    let bit = 1u64 << next;
    for b in 0..blocks.len() {
        let grown = blocks[b] | bit;
        if is_feasible_hyperedge(topo, grown) {
            let old = std::mem::replace(&mut blocks[b], grown);
            for_each_proper_partition(topo, next + 1, blocks, visit);
            blocks[b] = old;
        }
    }
    blocks.push(bit);
    for_each_proper_partition(topo, next + 1, blocks, visit);
    blocks.pop();
}

/// Closed-form DoF of a `(K, d)`-regular topology: `2/(d+1)` for `d < K`,
/// `1/K` for `d = K`; none for other topologies.
pub fn regular_dof(topo: &Topology) -> Option<Rational> {
    classify(topo).regular.map(|(k, d)| regular_value(k, d))
}

pub(crate) fn regular_value(k: usize, d: usize) -> Rational {
    if d < k {
        Rational::new(2, (d + 1) as i64)
    } else {
        Rational::new(1, k as i64)
    }
}

/// What to turn into a scheme.
#[derive(Clone, Copy, Debug)]
pub enum SchemeSource<'a> {
    Hamiltonian(&'a HamiltonianCertificate),
    Partition(&'a PartitionCertificate),
    /// A `(K, d)`-regular topology, realized in its own labeling.
    Regular {
        k: usize,
        d: usize,
    },
}

/// Builds the explicit scheme for a certificate. Where several transmitters
/// qualify, the smallest index is used.
pub fn synthesize_scheme(topo: &Topology, source: SchemeSource<'_>) -> Result<SchemeDescriptor> {
    match source {
        SchemeSource::Hamiltonian(cert) => synthesize_hamiltonian(topo, cert),
        SchemeSource::Partition(cert) => synthesize_partition(topo, cert),
        SchemeSource::Regular { k, d } => synthesize_regular(topo, k, d),
    }
}

fn lowest(mask: u64) -> usize {
    mask.trailing_zeros() as usize
}

fn synthesize_hamiltonian(topo: &Topology, cert: &HamiltonianCertificate) -> Result<SchemeDescriptor> {
    let k = topo.k();
    let matrix = non_conflict_matrix_cycle(topo, &cert.cycle).map_err(|e| Error::CertificateMismatch(e.to_string()))?;
    if matrix != cert.matrix {
        return Err(Error::CertificateMismatch("non-conflict matrix differs from the topology's".into()));
    }
    let c: Vec<usize> = cert.cycle.iter().map(|&l| l - 1).collect();
    let n = k - matrix.q;
    let mut transmissions = Vec::with_capacity(2 * k);
    for j in 0..k {
        let (p1, p2) = edge_private_parts(topo, &c, j);
        let blocked = matrix.rows_with_one(j).into_iter().fold(0u64, |m, row| m | topo.t_mask(c[row]));
        let (z1, z2) = (p1 & !blocked, p2 & !blocked);
        if z1 == 0 || z2 == 0 {
            return Err(Error::InvariantViolation(format!("column {} has no admissible transmitter", j + 1)));
        }
        transmissions.push(Transmission::new(lowest(z1) + 1, c[j] + 1, 1, j + 1));
        transmissions.push(Transmission::new(lowest(z2) + 1, c[(j + 1) % k] + 1, 2, j + 1));
    }
    transmissions.sort();
    Ok(SchemeDescriptor {
        n,
        coherence: n,
        claimed_dof: Rational::new(2, n as i64),
        genericity: Genericity::Generic,
        transmissions,
    })
}

fn synthesize_partition(topo: &Topology, cert: &PartitionCertificate) -> Result<SchemeDescriptor> {
    let k = topo.k();
    let masks = validate_partition(topo, &cert.portions).map_err(|e| Error::CertificateMismatch(e.to_string()))?;
    let matrix = partition_matrix(topo, &masks);
    if matrix != cert.matrix {
        return Err(Error::CertificateMismatch("non-conflict matrix differs from the topology's".into()));
    }
    let n = masks.len() - matrix.q;
    let mut transmissions = Vec::with_capacity(k);
    for (m, &portion) in masks.iter().enumerate() {
        let blocked = matrix.rows_with_one(m).into_iter().fold(0u64, |acc, i| acc | topo.t_mask(i));
        for (t, private) in portion_privates(topo, portion) {
            let z = private & !blocked;
            if z == 0 {
                return Err(Error::InvariantViolation(format!("message {} has no admissible transmitter", t + 1)));
            }
            transmissions.push(Transmission::new(lowest(z) + 1, t + 1, 1, m + 1));
        }
    }
    transmissions.sort();
    Ok(SchemeDescriptor {
        n,
        coherence: n,
        claimed_dof: Rational::new(1, n as i64),
        genericity: Genericity::Generic,
        transmissions,
    })
}

/// In the band labeling (receiver `j` hears `j..j+d-1`), transmitter `i`
/// sends instance 1 of message `i` on `V_{i+1}` and instance 2 of message
/// `i-d+1` on `V_{i+2}`, indices mod K. Receiver `j` then sees exactly the
/// `d+1` vectors `V_{j+1}..V_{j+d+1}`, and its two desired vectors are used
/// by no other transmitter it hears.
fn synthesize_regular(topo: &Topology, k: usize, d: usize) -> Result<SchemeDescriptor> {
    if topo.k() != k || classify(topo).regular != Some((k, d)) {
        return Err(Error::CertificateMismatch(format!("topology is not ({k},{d})-regular")));
    }
    if d == k {
        // full connectivity: one message per slot
        let transmissions = (0..k).map(|j| Transmission::new(lowest(topo.t_mask(j)) + 1, j + 1, 1, j + 1)).collect();
        return Ok(SchemeDescriptor {
            n: k,
            coherence: 1,
            claimed_dof: Rational::new(1, k as i64),
            genericity: Genericity::StandardBasis,
            transmissions,
        });
    }
    let band = Topology::circulant(k, d)?;
    let (rx_map, tx_map) = find_similarity(&band, topo)
        .ok_or_else(|| Error::InvariantViolation("regular topology not similar to its band".into()))?;
    let mut transmissions = Vec::with_capacity(2 * k);
    for i in 0..k {
        let tx = tx_map[i] + 1;
        transmissions.push(Transmission::new(tx, rx_map[i] + 1, 1, (i + 1) % k + 1));
        let second = (i + k + 1 - d) % k;
        transmissions.push(Transmission::new(tx, rx_map[second] + 1, 2, (i + 2) % k + 1));
    }
    transmissions.sort();
    Ok(SchemeDescriptor {
        n: d + 1,
        coherence: d + 1,
        claimed_dof: Rational::new(2, (d + 1) as i64),
        genericity: Genericity::Generic,
        transmissions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_topology;

    fn fig5() -> Topology {
        parse_topology("6\n100100\n111100\n101000\n001110\n001010\n001001\n").unwrap()
    }

    fn reg53() -> Topology {
        Topology::from_transmit_sets(&[vec![1, 3, 4], vec![2, 4, 5], vec![1, 3, 5], vec![1, 2, 4], vec![2, 3, 5]])
            .unwrap()
    }

    fn ex7() -> Topology {
        Topology::from_transmit_sets(&[vec![1, 4], vec![2, 3], vec![2, 3], vec![1, 2, 4], vec![3, 5, 6], vec![4, 5, 6]])
            .unwrap()
    }

    fn ex9() -> Topology {
        Topology::from_transmit_sets(&[vec![1, 2], vec![1, 2], vec![1, 2, 3, 4], vec![1, 2, 3, 4]]).unwrap()
    }

    #[test]
    fn afg_examples() {
        let g = build_afg(&fig5());
        let cyc = [1, 3, 5, 2, 6, 4];
        for j in 0..6 {
            assert!(g.adjacent(cyc[j] - 1, cyc[(j + 1) % 6] - 1));
        }
        assert!(build_afg(&ex9()).is_empty());
        assert_eq!(build_afg(&reg53()).edges.len(), 10);
    }

    #[test]
    fn afg_is_symmetric() {
        let g = build_afg(&fig5());
        for i in 0..6 {
            for j in 0..6 {
                assert_eq!(g.adjacent(i, j), g.adjacent(j, i));
            }
            assert!(!g.adjacent(i, i));
        }
    }

    #[test]
    fn regular_cycle_matrix() {
        let m = non_conflict_matrix_cycle(&reg53(), &[1, 2, 3, 4, 5]).unwrap();
        // row 1: T_1 = {1,3,4} contains neither {3,5} nor {2,4}, the private
        // parts of edge 3-4 (column 3), and contains a private part of every other edge
        let expected: Vec<Vec<u8>> = vec![
            vec![0, 0, 1, 0, 0],
            vec![0, 0, 0, 1, 0],
            vec![0, 0, 0, 0, 1],
            vec![1, 0, 0, 0, 0],
            vec![0, 1, 0, 0, 0],
        ];
        assert_eq!(m.entries, expected);
        assert_eq!(m.q, 1);
    }

    #[test]
    fn cycle_matrix_structural_zeros() {
        // a receiver never ignores the two subspaces carrying its own message
        let topo = fig5();
        let m = non_conflict_matrix_cycle(&topo, &[1, 3, 5, 2, 6, 4]).unwrap();
        for k in 0..6 {
            assert_eq!(m.set_phase[k][k], 0);
            assert_eq!(m.set_phase[k][(k + 5) % 6], 0);
        }
    }

    #[test]
    fn cycle_errors() {
        let full = Topology::fully_connected(4).unwrap();
        assert!(matches!(non_conflict_matrix_cycle(&full, &[1, 2, 3, 4]), Err(Error::NotHamiltonian(_))));
        assert!(non_conflict_matrix_cycle(&fig5(), &[1, 2, 3, 4, 5, 6]).is_err());
        assert!(non_conflict_matrix_cycle(&fig5(), &[1, 3, 5, 2, 6]).is_err());
    }

    #[test]
    fn best_hamiltonian_examples() {
        let f = best_hamiltonian(&fig5()).unwrap().unwrap();
        assert_eq!((f.matrix.q, f.dof, f.coherence_required), (1, Rational::new(2, 5), 5));
        let r = best_hamiltonian(&reg53()).unwrap().unwrap();
        assert_eq!((r.dof, r.coherence_required), (Rational::new(1, 2), 4));
        assert!(best_hamiltonian(&ex9()).unwrap().is_none());
        assert!(best_hamiltonian(&Topology::diagonal(10).unwrap()).is_err());
    }

    fn brute_perfect_matching(g: &AlignmentFeasibleGraph) -> bool {
        fn go(g: &AlignmentFeasibleGraph, left: u64) -> bool {
            if left == 0 {
                return true;
            }
            let v = left.trailing_zeros() as usize;
            mask_indices(g.neighbors(v) & left).into_iter().any(|u| go(g, left & !(1 << v) & !(1 << u)))
        }
        go(g, crate::topology::full_mask(g.k))
    }

    #[test]
    fn blossom_matches_brute_force() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..400 {
            let k = rng.gen_range(2..=10);
            let t: Vec<u64> = (0..k).map(|_| rng.gen::<u64>() & crate::topology::full_mask(k)).collect();
            let Ok(topo) = Topology::from_masks(t) else { continue };
            let g = build_afg(&topo);
            let mate = maximum_matching(&g);
            for (v, m) in mate.iter().enumerate() {
                if let Some(u) = m {
                    assert!(g.adjacent(v, *u));
                    assert_eq!(mate[*u], Some(v));
                }
            }
            assert_eq!(perfect_matching(&topo).is_some(), brute_perfect_matching(&g), "{topo:?}");
        }
    }

    #[test]
    fn blossom_on_odd_cycle_with_tail() {
        // 5-cycle plus a pendant forces a blossom contraction
        let k = 6;
        let mut adj = vec![0u64; k];
        let mut edges = Vec::new();
        for (a, b) in [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (3, 5)] {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
            edges.push((a.min(b) + 1, a.max(b) + 1));
        }
        let g = AlignmentFeasibleGraph { k, edges, adj };
        assert!(maximum_matching(&g).iter().all(Option::is_some));
    }

    #[test]
    fn matching_examples() {
        assert_eq!(perfect_matching_dof(&fig5()), Some(Rational::new(1, 3)));
        assert_eq!(perfect_matching_dof(&ex9()), None);
        assert_eq!(perfect_matching_dof(&Topology::fully_connected(2).unwrap()), None);
        assert_eq!(perfect_matching_dof(&Topology::diagonal(3).unwrap()), None);
    }

    #[test]
    fn partition_examples() {
        let p = best_partition(&ex7()).unwrap().unwrap();
        assert_eq!(p.portions, vec![vec![1, 3, 5], vec![2, 4, 6]]);
        assert_eq!((p.kappa(), p.matrix.q, p.dof), (2, 0, Rational::new(1, 2)));
        let f = best_partition(&Topology::fully_connected(3).unwrap()).unwrap().unwrap();
        assert_eq!(f.portions, vec![vec![1], vec![2], vec![3]]);
        assert_eq!(f.dof, Rational::new(1, 3));
        let d = best_partition(&Topology::diagonal(4).unwrap()).unwrap().unwrap();
        assert_eq!(d.portions, vec![vec![1, 2, 3, 4]]);
        assert_eq!(d.dof, Rational::one());
    }

    #[test]
    fn partition_count_is_bell_for_diagonal() {
        let topo = Topology::diagonal(5).unwrap();
        let mut count = 0;
        for_each_proper_partition(&topo, 0, &mut Vec::new(), &mut |_| count += 1);
        assert_eq!(count, 52);
    }

    #[test]
    fn regular_dof_examples() {
        assert_eq!(regular_dof(&reg53()), Some(Rational::new(1, 2)));
        assert_eq!(regular_dof(&Topology::circulant(6, 2).unwrap()), Some(Rational::new(2, 3)));
        assert_eq!(regular_dof(&Topology::fully_connected(4).unwrap()), Some(Rational::new(1, 4)));
        assert_eq!(regular_dof(&fig5()), None);
    }

    #[test]
    fn synthesized_shapes() {
        let r = reg53();
        let cert = best_hamiltonian(&r).unwrap().unwrap();
        let s = synthesize_scheme(&r, SchemeSource::Hamiltonian(&cert)).unwrap();
        assert_eq!((s.n, s.transmissions.len()), (4, 10));
        let s = synthesize_scheme(&r, SchemeSource::Regular { k: 5, d: 3 }).unwrap();
        assert_eq!((s.n, s.transmissions.len(), s.claimed_dof), (4, 10, Rational::new(1, 2)));
        let e = ex7();
        let p = best_partition(&e).unwrap().unwrap();
        let s = synthesize_scheme(&e, SchemeSource::Partition(&p)).unwrap();
        assert_eq!((s.n, s.transmissions.len()), (2, 6));
        for t in &s.transmissions {
            let portion = if [1, 3, 5].contains(&t.msg) { 1 } else { 2 };
            assert_eq!(t.vec, portion);
        }
        let d = Topology::diagonal(3).unwrap();
        let p = best_partition(&d).unwrap().unwrap();
        let s = synthesize_scheme(&d, SchemeSource::Partition(&p)).unwrap();
        assert_eq!(s.n, 1);
        assert!(s.transmissions.iter().all(|t| t.vec == 1));
        assert_eq!(s.transmissions.len(), 3);
    }

    #[test]
    fn synthesis_rejects_mismatch() {
        let cert = best_hamiltonian(&reg53()).unwrap().unwrap();
        assert!(synthesize_scheme(&fig5(), SchemeSource::Hamiltonian(&cert)).is_err());
        assert!(synthesize_scheme(&fig5(), SchemeSource::Regular { k: 6, d: 2 }).is_err());
    }
}
