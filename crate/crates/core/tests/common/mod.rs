//! Shared topology corpora for the integration tests.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timcomp::{enumerate_topologies, Topology};

/// Every non-isomorphic topology with `1 <= K <= max_k`.
pub fn exhaustive(max_k: usize) -> Vec<Topology> {
    (1..=max_k).flat_map(|k| enumerate_topologies(k).expect("small K enumerates")).collect()
}

/// A random valid topology with the given K: each link present with
/// probability one half, redrawn until no row or column is empty.
pub fn random_topology(rng: &mut ChaCha8Rng, k: usize) -> Topology {
    loop {
        let rows: Vec<Vec<u8>> = (0..k).map(|_| (0..k).map(|_| u8::from(rng.gen_bool(0.5))).collect()).collect();
        if let Ok(t) = Topology::from_rows(&rows) {
            return t;
        }
    }
}

/// `count` seeded random topologies with `2 <= K <= max_k`.
pub fn random_corpus(seed: u64, count: usize, max_k: usize) -> Vec<Topology> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(2..=max_k);
            random_topology(&mut rng, k)
        })
        .collect()
}

/// A uniformly random permutation of `0..k`.
pub fn random_permutation(rng: &mut ChaCha8Rng, k: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        p.swap(i, rng.gen_range(0..=i));
    }
    p
}
