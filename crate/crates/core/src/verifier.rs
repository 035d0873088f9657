//! Decodability checks for transmission schemes: a combinatorial pass on
//! vector indices and a numeric pass on random channels with exact ranks.
//! Both decode with successive cancellation.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::rank;
use crate::rational::Rational;
use crate::scheme::{Genericity, SchemeDescriptor, Transmission};
use crate::topology::Topology;

/// Seed used by [`verify_claim`].
pub const DEFAULT_SEED: u64 = 0;
/// Trials used by [`verify_claim`].
pub const DEFAULT_TRIALS: usize = 32;
/// Largest vector count for which generic draws are checked subset by subset.
pub const SUBSET_CHECK_MAX_M: usize = 12;

/// Outcome of decoding at one receiver.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReceiverDecode {
    /// 1-based receiver (and message) index.
    pub receiver: usize,
    /// Recovered `(message, instance)` pairs, all with `message == receiver`.
    pub recovered: Vec<(usize, usize)>,
    /// Successive-cancellation passes used (at least 1).
    pub rounds: usize,
    /// Every instance of the receiver's message in the scheme was recovered.
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeResult {
    pub receivers: Vec<ReceiverDecode>,
    /// Largest per-receiver round count.
    pub rounds: usize,
    /// All receivers decode everything and recover `n * claimed_dof` instances.
    pub ok: bool,
}

type Instance = (usize, usize);

/// Instances visible at receiver `rx` (0-based), each with the transmissions
/// that reach it.
fn visible_instances<'a>(
    topo: &Topology,
    scheme: &'a SchemeDescriptor,
    rx: usize,
) -> BTreeMap<Instance, Vec<&'a Transmission>> {
    let mut out: BTreeMap<Instance, Vec<&Transmission>> = BTreeMap::new();
    for t in &scheme.transmissions {
        if topo.link(rx, t.tx - 1) {
            out.entry((t.msg, t.instance)).or_default().push(t);
        }
    }
    out
}

/// Runs successive cancellation at one receiver. `decodable` sees the
/// remaining instances and returns those decodable in this pass.
fn cancel_loop(
    rx: usize,
    mut remaining: BTreeSet<Instance>,
    desired: &BTreeSet<Instance>,
    mut decodable: impl FnMut(&BTreeSet<Instance>) -> Vec<Instance>,
) -> ReceiverDecode {
    let mut recovered = BTreeSet::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let now = decodable(&remaining);
        for x in &now {
            remaining.remove(x);
            if x.0 == rx + 1 {
                recovered.insert(*x);
            }
        }
        if now.is_empty() || desired.is_subset(&recovered) {
            break;
        }
    }
    ReceiverDecode {
        receiver: rx + 1,
        ok: desired.is_subset(&recovered),
        recovered: recovered.into_iter().collect(),
        rounds,
    }
}

fn desired_instances(scheme: &SchemeDescriptor, msg: usize) -> BTreeSet<Instance> {
    scheme.instances_of(msg).into_iter().map(|i| (msg, i)).collect()
}

/// Whether `n * claimed_dof` instances per message is met by every receiver.
fn meets_claim(scheme: &SchemeDescriptor, receivers: &[ReceiverDecode]) -> bool {
    let need = scheme.claimed_dof * Rational::from_integer(scheme.n as i64);
    receivers.iter().all(|r| Rational::from_integer(r.recovered.len() as i64) >= need)
}

/// Combinatorial decoding. In each pass an instance visible at the receiver
/// decodes when one of its vector indices is used by no other remaining
/// visible instance and the remaining visible instances use at most `n`
/// distinct vectors. Decoded instances are cancelled and the pass repeats.
pub fn check_combinatorial(topo: &Topology, scheme: &SchemeDescriptor) -> Result<DecodeResult> {
    scheme.validate(topo)?;
    let mut receivers = Vec::with_capacity(topo.k());
    for rx in 0..topo.k() {
        let visible = visible_instances(topo, scheme, rx);
        let vectors: BTreeMap<Instance, BTreeSet<usize>> =
            visible.iter().map(|(x, ts)| (*x, ts.iter().map(|t| t.vec).collect())).collect();
        let remaining: BTreeSet<Instance> = visible.keys().copied().collect();
        let desired = desired_instances(scheme, rx + 1);
        receivers.push(cancel_loop(rx, remaining, &desired, |rem| {
            let mut users: BTreeMap<usize, usize> = BTreeMap::new();
            for x in rem {
                for &v in &vectors[x] {
                    *users.entry(v).or_default() += 1;
                }
            }
            if users.len() > scheme.n {
                return Vec::new();
            }
            rem.iter().filter(|x| vectors[*x].iter().any(|v| users[v] == 1)).copied().collect()
        }));
    }
    let rounds = receivers.iter().map(|r| r.rounds).max().unwrap_or(1);
    let ok = receivers.iter().all(|r| r.ok) && meets_claim(scheme, &receivers);
    Ok(DecodeResult { receivers, rounds, ok })
}

/// Precoding vectors `V_1..V_M` as integer columns of length `n`.
fn draw_vectors(scheme: &SchemeDescriptor, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let (n, m) = (scheme.n, scheme.vector_count());
    match scheme.genericity {
        Genericity::StandardBasis => (0..m).map(|v| (0..n).map(|s| i64::from(s == v)).collect()).collect(),
        Genericity::Generic if m <= SUBSET_CHECK_MAX_M => loop {
            let vs: Vec<Vec<i64>> = (0..m).map(|_| (0..n).map(|_| rng.gen_range(-9..=9)).collect()).collect();
            if every_subset_independent(&vs, n) {
                break vs;
            }
        },
        Genericity::Generic => vandermonde(n, m, rng),
    }
}

/// Columns `(x^0, .., x^{n-1})` at distinct nonzero nodes, so any `n` of
/// them are independent.
fn vandermonde(n: usize, m: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<i64>> {
    let mut nodes = BTreeSet::new();
    let span = (2 * m) as i64;
    while nodes.len() < m {
        let x = rng.gen_range(-span..=span);
        if x != 0 {
            nodes.insert(x);
        }
    }
    let nodes: Vec<i64> = nodes.into_iter().collect();
    // shuffle so vector indices are not tied to node order
    let mut order: Vec<usize> = (0..m).collect();
    for i in (1..m).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    order.into_iter().map(|i| (0..n as u32).map(|p| nodes[i].pow(p)).collect()).collect()
}

fn every_subset_independent(vs: &[Vec<i64>], n: usize) -> bool {
    let size = n.min(vs.len());
    let mut pick: Vec<usize> = (0..size).collect();
    loop {
        let rows: Vec<Vec<BigInt>> = pick.iter().map(|&i| vs[i].iter().map(|&x| BigInt::from(x)).collect()).collect();
        if rank(&rows) < size {
            return false;
        }
        let mut pos = size;
        loop {
            if pos == 0 {
                return true;
            }
            pos -= 1;
            if pick[pos] < vs.len() - size + pos {
                pick[pos] += 1;
                for q in pos + 1..size {
                    pick[q] = pick[q - 1] + 1;
                }
                break;
            }
        }
    }
}

/// One numeric trial: nonzero gains per link and coherence block, then
/// rank-based successive cancellation at every receiver.
fn numeric_trial(topo: &Topology, scheme: &SchemeDescriptor, rng: &mut ChaCha8Rng) -> bool {
    let k = topo.k();
    let n = scheme.n;
    let blocks = n.div_ceil(scheme.coherence);
    let mut gain = vec![vec![vec![0i64; blocks]; k]; k];
    for (rx, row) in gain.iter_mut().enumerate() {
        for (tx, g) in row.iter_mut().enumerate() {
            if topo.link(rx, tx) {
                for b in g.iter_mut() {
                    *b = loop {
                        let h = rng.gen_range(-100..=100);
                        if h != 0 {
                            break h;
                        }
                    };
                }
            }
        }
    }
    let vectors = draw_vectors(scheme, rng);
    (0..k).all(|rx| {
        let visible = visible_instances(topo, scheme, rx);
        let columns: BTreeMap<Instance, Vec<BigInt>> = visible
            .iter()
            .map(|(x, ts)| {
                let mut col = vec![BigInt::from(0); n];
                for t in ts {
                    for (s, c) in col.iter_mut().enumerate() {
                        *c += gain[rx][t.tx - 1][s / scheme.coherence] * vectors[t.vec - 1][s];
                    }
                }
                (*x, col)
            })
            .collect();
        let remaining: BTreeSet<Instance> = columns.keys().copied().collect();
        let desired = desired_instances(scheme, rx + 1);
        cancel_loop(rx, remaining, &desired, |rem| {
            let all: Vec<Vec<BigInt>> = rem.iter().map(|x| columns[x].clone()).collect();
            let full = rank(&all);
            rem.iter()
                .filter(|x| {
                    let others: Vec<Vec<BigInt>> = rem.iter().filter(|y| y != x).map(|y| columns[y].clone()).collect();
                    rank(&others) < full
                })
                .copied()
                .collect()
        })
        .ok
    })
}

/// Numeric decoding over `trials` seeded channel and vector draws. An
/// instance decodes in a pass when its received column lies outside the
/// span of the other remaining visible columns.
pub fn check_numeric(topo: &Topology, scheme: &SchemeDescriptor, seed: u64, trials: usize) -> Result<bool> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    scheme.validate(topo)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..trials).all(|_| numeric_trial(topo, scheme, &mut rng)))
}

/// Whether every message carries exactly `n * claimed_dof` instances.
pub fn instance_counts_match(topo: &Topology, scheme: &SchemeDescriptor) -> bool {
    let need = scheme.claimed_dof * Rational::from_integer(scheme.n as i64);
    (1..=topo.k()).all(|m| Rational::from_integer(scheme.instances_of(m).len() as i64) == need)
}

/// Combinatorial check, numeric check with the default seed and trial count,
/// and instance counting against the claimed DoF.
pub fn verify_claim(topo: &Topology, scheme: &SchemeDescriptor) -> Result<bool> {
    if scheme.transmissions.is_empty() {
        log::warn!("empty scheme: claim holds only vacuously");
    }
    Ok(check_combinatorial(topo, scheme)?.ok
        && check_numeric(topo, scheme, DEFAULT_SEED, DEFAULT_TRIALS)?
        && instance_counts_match(topo, scheme))
}
