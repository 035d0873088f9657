//! Network topologies: parsing, rendering, permutation, canonical forms and
//! classification into regular and triangular families.
//!
//! Internally receivers and transmitters are 0-based and sets are `u64`
//! bitmasks (bit `i` stands for index `i`). Text I/O and error messages are
//! 1-based.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest cell count a [`Topology`] can hold (sets are `u64` bitmasks).
pub const MAX_K: usize = 64;

/// Largest K for which [`enumerate_topologies`] runs.
pub const ENUMERATE_MAX_K: usize = 5;

/// A K-cell topology. `B[j][i] = 1` iff transmitter `i` reaches receiver `j`.
///
/// Invariant: every row and every column of `B` is nonempty.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Topology {
    k: usize,
    /// `t[j]`: transmitters heard by receiver `j`.
    t: Vec<u64>,
    /// `r[i]`: receivers reached by transmitter `i`.
    r: Vec<u64>,
}

/// Result of [`classify`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyClass {
    /// `(K, d)` when the topology is similar to the circulant band with `d` ones per row.
    pub regular: Option<(usize, usize)>,
    pub triangular: bool,
    pub fully_connected: bool,
    /// Lexicographically smallest row-major encoding over row and column permutations.
    pub canonical_key: Vec<u8>,
}

/// Bitmask with the low `k` bits set.
pub fn full_mask(k: usize) -> u64 {
    if k >= 64 {
        u64::MAX
    } else {
        (1u64 << k) - 1
    }
}

/// Indices of the set bits of `mask`, ascending.
pub fn mask_indices(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

/// 1-based labels of the set bits of `mask`, ascending.
pub fn mask_labels(mask: u64) -> Vec<usize> {
    mask_indices(mask).into_iter().map(|i| i + 1).collect()
}

/// Bitmask from 1-based labels.
pub fn labels_mask(labels: &[usize]) -> u64 {
    labels.iter().fold(0, |m, &l| m | (1u64 << (l - 1)))
}

impl Topology {
    /// Builds a topology from a 0/1 row matrix (`rows[j][i]`), validating shape and supports.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let k = rows.len();
        if k == 0 {
            return Err(Error::BadMatrix);
        }
        if k > MAX_K {
            return Err(Error::CellCountTooLarge { found: k, max: MAX_K });
        }
        let mut t = vec![0u64; k];
        for (j, row) in rows.iter().enumerate() {
            if row.len() != k {
                return Err(Error::LineLength { row: j + 1, expected: k, found: row.len() });
            }
            for (i, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => t[j] |= 1 << i,
                    _ => {
                        return Err(Error::NonBinary {
                            row: j + 1,
                            col: i + 1,
                            ch: char::from_digit(u32::from(b) % 36, 36).unwrap_or('?'),
                        })
                    }
                }
            }
        }
        Self::from_masks(t)
    }

    /// Builds a topology from 1-based transmit sets `T_1..T_K`.
    pub fn from_transmit_sets(sets: &[Vec<usize>]) -> Result<Self> {
        let k = sets.len();
        if k == 0 || k > MAX_K {
            return Err(Error::CellCountTooLarge { found: k, max: MAX_K });
        }
        let mut t = vec![0u64; k];
        for (j, set) in sets.iter().enumerate() {
            for &label in set {
                if label == 0 || label > k {
                    return Err(Error::BadMatrix);
                }
                t[j] |= 1 << (label - 1);
            }
        }
        Self::from_masks(t)
    }

    /// Builds a topology from receiver masks `t[j]`.
    pub fn from_masks(t: Vec<u64>) -> Result<Self> {
        let k = t.len();
        if k == 0 {
            return Err(Error::BadMatrix);
        }
        if k > MAX_K {
            return Err(Error::CellCountTooLarge { found: k, max: MAX_K });
        }
        let all = full_mask(k);
        if t.iter().any(|&m| m & !all != 0) {
            return Err(Error::BadMatrix);
        }
        if let Some(j) = t.iter().position(|&m| m == 0) {
            return Err(Error::EmptyRow { row: j + 1 });
        }
        let mut r = vec![0u64; k];
        for (j, &m) in t.iter().enumerate() {
            for i in mask_indices(m) {
                r[i] |= 1 << j;
            }
        }
        if let Some(i) = r.iter().position(|&m| m == 0) {
            return Err(Error::EmptyColumn { col: i + 1 });
        }
        Ok(Topology { k, t, r })
    }

    /// Cyclic band: receiver `j` hears transmitters `j, j+1, .., j+d-1` (mod K).
    pub fn circulant(k: usize, d: usize) -> Result<Self> {
        if d == 0 || d > k {
            return Err(Error::InvalidArgument(format!("band width d={d} must lie in 1..={k}")));
        }
        let t = (0..k).map(|j| (0..d).fold(0u64, |m, s| m | (1 << ((j + s) % k)))).collect();
        Self::from_masks(t)
    }

    /// Lower-triangular all-ones: receiver `j` hears transmitters `1..=j`.
    pub fn triangular(k: usize) -> Result<Self> {
        Self::from_masks((0..k).map(|j| full_mask(j + 1)).collect())
    }

    /// Identity topology: each receiver hears only its own transmitter.
    pub fn diagonal(k: usize) -> Result<Self> {
        Self::from_masks((0..k).map(|j| 1u64 << j).collect())
    }

    /// All-ones topology.
    pub fn fully_connected(k: usize) -> Result<Self> {
        Self::from_masks(vec![full_mask(k); k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Bitmask of all K indices.
    pub fn all(&self) -> u64 {
        full_mask(self.k)
    }

    /// Transmit set of receiver `j` (0-based) as a bitmask.
    pub fn t_mask(&self, j: usize) -> u64 {
        self.t[j]
    }

    /// Receive set of transmitter `i` (0-based) as a bitmask.
    pub fn r_mask(&self, i: usize) -> u64 {
        self.r[i]
    }

    pub fn t_masks(&self) -> &[u64] {
        &self.t
    }

    pub fn r_masks(&self) -> &[u64] {
        &self.r
    }

    /// Whether transmitter `i` reaches receiver `j` (both 0-based).
    pub fn link(&self, j: usize, i: usize) -> bool {
        self.t[j] >> i & 1 == 1
    }

    /// 1-based transmit set `T_j` for 1-based receiver label `j`.
    pub fn transmit_set(&self, j: usize) -> Vec<usize> {
        mask_labels(self.t[j - 1])
    }

    /// 1-based receive set `R_i` for 1-based transmitter label `i`.
    pub fn receive_set(&self, i: usize) -> Vec<usize> {
        mask_labels(self.r[i - 1])
    }

    /// Matrix rows `B[j][i]`.
    pub fn rows(&self) -> Vec<Vec<u8>> {
        (0..self.k).map(|j| (0..self.k).map(|i| u8::from(self.link(j, i))).collect()).collect()
    }

    /// Rows as strings of `0`/`1`.
    pub fn row_strings(&self) -> Vec<String> {
        self.rows().iter().map(|r| r.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()).collect()
    }

    /// Renders in the text format accepted by [`parse_topology`].
    pub fn render(&self) -> String {
        let mut s = format!("{}\n", self.k);
        for row in self.row_strings() {
            s.push_str(&row);
            s.push('\n');
        }
        s
    }

    /// Relabels receivers and transmitters: the result has
    /// `B'[j][i] = B[row_perm[j]][col_perm[i]]`.
    pub fn permute(&self, row_perm: &[usize], col_perm: &[usize]) -> Result<Self> {
        if !is_permutation(row_perm, self.k) || !is_permutation(col_perm, self.k) {
            return Err(Error::InvalidArgument("not a permutation of 0..K".into()));
        }
        let t = row_perm
            .iter()
            .map(|&src| {
                col_perm
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (dst, &c)| if self.t[src] >> c & 1 == 1 { m | 1 << dst } else { m })
            })
            .collect();
        Self::from_masks(t)
    }
}

fn is_permutation(p: &[usize], k: usize) -> bool {
    if p.len() != k {
        return false;
    }
    let mut seen = vec![false; k];
    p.iter().all(|&x| x < k && !std::mem::replace(&mut seen[x], true))
}

impl fmt::Debug for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Topology(K={}; {})", self.k, self.row_strings().join(" "))
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Parses the text format: first line K, then K rows of K characters in `{0,1}`.
///
/// Lines starting with `#` and blank lines are ignored; trailing whitespace is ignored.
pub fn parse_topology(text: &str) -> Result<Topology> {
    let mut lines =
        text.lines().map(str::trim_end).filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let first = lines.next().ok_or(Error::EmptyInput)?;
    let k: usize =
        first.trim().parse().ok().filter(|&k| k > 0).ok_or_else(|| Error::BadCellCount(first.to_string()))?;
    if k > MAX_K {
        return Err(Error::CellCountTooLarge { found: k, max: MAX_K });
    }
    let body: Vec<&str> = lines.collect();
    if body.len() != k {
        return Err(Error::RowCount { expected: k, found: body.len() });
    }
    let mut rows = Vec::with_capacity(k);
    for (j, line) in body.iter().enumerate() {
        let line = line.trim_start();
        let chars: Vec<char> = line.chars().collect();
        if chars.len() != k {
            return Err(Error::LineLength { row: j + 1, expected: k, found: chars.len() });
        }
        let mut row = Vec::with_capacity(k);
        for (i, &c) in chars.iter().enumerate() {
            match c {
                '0' => row.push(0),
                '1' => row.push(1),
                _ => return Err(Error::NonBinary { row: j + 1, col: i + 1, ch: c }),
            }
        }
        rows.push(row);
    }
    Topology::from_rows(&rows)
}

/// Canonical form together with the relabeling that produces it.
///
/// `rows[s]` is the `s`-th row of the canonical matrix with column 0 in the
/// most significant of the low K bits, so integer order is string order.
/// The canonical matrix is `B[row_order[s]][col_order[c]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub rows: Vec<u64>,
    pub row_order: Vec<usize>,
    pub col_order: Vec<usize>,
}

impl CanonicalForm {
    /// Byte encoding: K followed by the matrix entries row by row.
    pub fn key(&self) -> Vec<u8> {
        let k = self.rows.len();
        let mut key = Vec::with_capacity(1 + k * k);
        key.push(k as u8);
        for &row in &self.rows {
            for c in 0..k {
                key.push((row >> (k - 1 - c) & 1) as u8);
            }
        }
        key
    }
}

/// Orders columns by their vectors over the chosen rows (first row most
/// significant, ascending) and returns the resulting row encodings.
fn sorted_prefix(topo: &Topology, chosen: &[usize]) -> (Vec<u64>, Vec<usize>) {
    let k = topo.k;
    let d = chosen.len();
    let mut cols: Vec<(u64, usize)> = (0..k)
        .map(|i| {
            let code = chosen.iter().fold(0u64, |acc, &row| (acc << 1) | u64::from(topo.link(row, i)));
            (code, i)
        })
        .collect();
    cols.sort();
    let rows = (0..d)
        .map(|s| {
            cols.iter().enumerate().fold(0u64, |m, (c, &(code, _))| m | ((code >> (d - 1 - s) & 1) << (k - 1 - c)))
        })
        .collect();
    (rows, cols.into_iter().map(|(_, i)| i).collect())
}

/// Lexicographically smallest row-major form of `B` over all row and column
/// permutations.
///
/// For a fixed row order the best column order sorts columns by their
/// vectors, so the search runs over row orders only. At each depth only the
/// candidate rows producing the smallest next canonical row are explored,
/// and identical rows are tried once.
pub fn canonical_form(topo: &Topology) -> CanonicalForm {
    let k = topo.k;
    let mut best: Option<(Vec<u64>, Vec<usize>)> = None;
    let mut chosen = Vec::with_capacity(k);
    let mut used = vec![false; k];
    canon_search(topo, &mut chosen, &mut used, &mut best);
    let (rows, row_order) = best.expect("search visits at least one leaf");
    let (_, col_order) = sorted_prefix(topo, &row_order);
    CanonicalForm { rows, row_order, col_order }
}

fn canon_search(
    topo: &Topology,
    chosen: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<(Vec<u64>, Vec<usize>)>,
) {
    let k = topo.k;
    let d = chosen.len();
    if d == k {
        let (rows, _) = sorted_prefix(topo, chosen);
        if best.as_ref().is_none_or(|(b, _)| rows < *b) {
            *best = Some((rows, chosen.clone()));
        }
        return;
    }
    let mut options: Vec<(Vec<u64>, usize)> = Vec::new();
    let mut tried_rows: Vec<u64> = Vec::new();
    for (j, &taken) in used.iter().enumerate() {
        if taken || tried_rows.contains(&topo.t[j]) {
            continue;
        }
        tried_rows.push(topo.t[j]);
        chosen.push(j);
        let (prefix, _) = sorted_prefix(topo, chosen);
        chosen.pop();
        options.push((prefix, j));
    }
    let min_prefix = options.iter().map(|(p, _)| p).min().cloned().expect("a row remains");
    if let Some((b, _)) = best.as_ref() {
        if min_prefix.as_slice() > &b[..=d] {
            return;
        }
    }
    for (prefix, j) in options {
        if prefix != min_prefix {
            continue;
        }
        used[j] = true;
        chosen.push(j);
        canon_search(topo, chosen, used, best);
        chosen.pop();
        used[j] = false;
    }
}

/// Canonical key of a topology; equal keys mean equal up to relabeling.
pub fn canonical_key(topo: &Topology) -> Vec<u8> {
    canonical_form(topo).key()
}

/// Relabeling that maps `a` onto `b`, if they are similar.
///
/// Returns `(rx_map, tx_map)` with `a.link(j, i) == b.link(rx_map[j], tx_map[i])`.
pub fn find_similarity(a: &Topology, b: &Topology) -> Option<(Vec<usize>, Vec<usize>)> {
    if a.k != b.k {
        return None;
    }
    let ca = canonical_form(a);
    let cb = canonical_form(b);
    if ca.rows != cb.rows {
        return None;
    }
    let k = a.k;
    let mut rx_map = vec![0; k];
    let mut tx_map = vec![0; k];
    for s in 0..k {
        rx_map[ca.row_order[s]] = cb.row_order[s];
        tx_map[ca.col_order[s]] = cb.col_order[s];
    }
    Some((rx_map, tx_map))
}

/// Classifies a topology into the regular, triangular and fully connected families.
pub fn classify(topo: &Topology) -> TopologyClass {
    let k = topo.k;
    let canon = canonical_form(topo);
    let key = canon.key();
    let fully_connected = topo.t.iter().all(|&m| m == topo.all());

    let d = topo.t[0].count_ones() as usize;
    let uniform =
        topo.t.iter().all(|m| m.count_ones() as usize == d) && topo.r.iter().all(|m| m.count_ones() as usize == d);
    let regular = if uniform {
        let band = Topology::circulant(k, d).expect("1 <= d <= K");
        (canonical_form(&band).rows == canon.rows).then_some((k, d))
    } else {
        None
    };

    let tri = Topology::triangular(k).expect("valid K");
    let triangular = canonical_form(&tri).rows == canon.rows;

    TopologyClass { regular, triangular, fully_connected, canonical_key: key }
}

/// One representative per similarity class of valid K-cell topologies,
/// ordered by canonical key. Each representative is the canonical matrix.
pub fn enumerate_topologies(k: usize) -> Result<Vec<Topology>> {
    if k == 0 || k > ENUMERATE_MAX_K {
        return Err(Error::GuardExceeded { method: "enumerate", k, max: ENUMERATE_MAX_K });
    }
    // Every class has a representative whose columns are sorted, so it is
    // enough to walk nondecreasing sequences of nonzero column codes.
    let codes: Vec<u64> = (1..=full_mask(k)).collect();
    let mut seen: BTreeMap<Vec<u8>, Topology> = BTreeMap::new();
    let mut pick = vec![0usize; k];
    loop {
        let mut t = vec![0u64; k];
        for (i, &ci) in pick.iter().enumerate() {
            for j in mask_indices(codes[ci]) {
                t[j] |= 1 << i;
            }
        }
        if t.iter().all(|&m| m != 0) {
            let topo = Topology::from_masks(t).expect("rows and columns nonempty");
            let canon = canonical_form(&topo);
            seen.entry(canon.key())
                .or_insert_with(|| from_canonical_rows(&canon.rows, k).expect("canonical rows stay valid"));
        }
        // next nondecreasing sequence
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(seen.into_values().collect());
            }
            pos -= 1;
            if pick[pos] + 1 < codes.len() {
                pick[pos] += 1;
                let v = pick[pos];
                for p in pick.iter_mut().skip(pos + 1) {
                    *p = v;
                }
                break;
            }
        }
    }
}

fn from_canonical_rows(rows: &[u64], k: usize) -> Result<Topology> {
    let t = rows.iter().map(|&row| (0..k).fold(0u64, |m, c| m | ((row >> (k - 1 - c) & 1) << c))).collect();
    Topology::from_masks(t)
}
