//! Property tests over random topologies.

use proptest::prelude::*;
use timcomp::alignment::{best_hamiltonian, best_partition, build_afg, synthesize_scheme, SchemeSource};
use timcomp::bounds::{compound_bound, generator_closure, tdma_optimal, DemandGraph};
use timcomp::scheduling::{fractional_cover, is_feasible_hyperedge};
use timcomp::scheme::SchemeDescriptor;
use timcomp::topology::{canonical_key, find_similarity, mask_labels};
use timcomp::verifier::{check_combinatorial, check_numeric, verify_claim};
use timcomp::{analyze, classify, parse_topology, Rational, Topology};

fn topology(min_k: usize, max_k: usize) -> impl Strategy<Value = Topology> {
    (min_k..=max_k)
        .prop_flat_map(|k| prop::collection::vec(prop::collection::vec(any::<bool>(), k), k))
        .prop_filter_map("a row or column is empty", |rows| {
            let rows: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|&b| u8::from(b)).collect()).collect();
            Topology::from_rows(&rows).ok()
        })
}

/// A topology with a pair of permutations of its labels.
fn permuted(max_k: usize) -> impl Strategy<Value = (Topology, Vec<usize>, Vec<usize>)> {
    topology(1, max_k).prop_flat_map(|t| {
        let ids: Vec<usize> = (0..t.k()).collect();
        (Just(t), Just(ids.clone()).prop_shuffle(), Just(ids).prop_shuffle())
    })
}

/// Synthesized schemes for whatever alignment certificates the topology has.
fn synthesized(topo: &Topology) -> Vec<SchemeDescriptor> {
    let mut out = Vec::new();
    if let Some(cert) = best_hamiltonian(topo).unwrap() {
        out.push(synthesize_scheme(topo, SchemeSource::Hamiltonian(&cert)).unwrap());
    }
    if let Some(cert) = best_partition(topo).unwrap() {
        out.push(synthesize_scheme(topo, SchemeSource::Partition(&cert)).unwrap());
    }
    if let Some((k, d)) = classify(topo).regular {
        out.push(synthesize_scheme(topo, SchemeSource::Regular { k, d }).unwrap());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn canonical_key_ignores_relabeling((t, rp, cp) in permuted(6)) {
        let moved = t.permute(&rp, &cp).unwrap();
        prop_assert_eq!(canonical_key(&t), canonical_key(&moved));
        prop_assert!(find_similarity(&t, &moved).is_some());
    }

    #[test]
    fn render_parse_round_trip(t in topology(1, 8)) {
        prop_assert_eq!(parse_topology(&t.render()).unwrap(), t);
    }

    #[test]
    fn rational_text_round_trip(p in -1000i64..1000, q in 1i64..1000) {
        let r = Rational::new(p, q);
        prop_assert_eq!(r.to_string().parse::<Rational>().unwrap(), r);
    }

    #[test]
    fn feasible_sets_are_downward_closed(t in topology(1, 7)) {
        for x in 1..=t.all() {
            if is_feasible_hyperedge(&t, x) {
                let mut sub = (x - 1) & x;
                while sub != 0 {
                    prop_assert!(is_feasible_hyperedge(&t, sub));
                    sub = (sub - 1) & x;
                }
            }
        }
    }

    #[test]
    fn cover_weights_are_feasible(t in topology(1, 7)) {
        let cover = fractional_cover(&t).unwrap();
        for j in 1..=t.k() {
            let load: Rational = cover.entries.iter().filter(|(e, _)| e.receivers.contains(&j)).map(|(_, w)| *w).sum();
            prop_assert!(load >= Rational::one());
        }
        let total: Rational = cover.entries.iter().map(|(_, w)| *w).sum();
        prop_assert_eq!(total, cover.value);
        prop_assert!(cover.value >= Rational::one() && cover.value <= Rational::from_integer(t.k() as i64));
    }

    #[test]
    fn closure_grows_with_the_initial_set(t in topology(2, 6), s_bits in 1u64..64, i_bits in 0u64..64, extra in 0usize..6) {
        let s = s_bits & t.all();
        let i0 = i_bits & s;
        prop_assume!(s != 0);
        let small = generator_closure(&t, &mask_labels(s), &mask_labels(i0)).unwrap();
        let bigger = i0 | (1u64 << (extra % t.k())) & s;
        let large = generator_closure(&t, &mask_labels(s), &mask_labels(bigger)).unwrap();
        prop_assert!(small.iter().all(|x| large.contains(x)));
    }

    #[test]
    fn acyclic_demand_graph_iff_empty_afg(t in topology(1, 8)) {
        let acyclic = !DemandGraph::new(&t).has_cycle();
        prop_assert_eq!(acyclic, build_afg(&t).is_empty());
        prop_assert_eq!(tdma_optimal(&t).unwrap(), acyclic);
    }

    #[test]
    fn report_interval_is_sound(t in topology(1, 6)) {
        let r = analyze(&t).unwrap();
        prop_assert!(r.best_achievable <= r.best_outer);
        prop_assert!(r.best_outer <= Rational::one());
        if let Some((v, _)) = compound_bound(&t).unwrap() {
            prop_assert!(v <= Rational::one() && r.best_achievable <= v);
        }
    }

    #[test]
    fn synthesized_schemes_verify(t in topology(3, 6)) {
        for s in synthesized(&t) {
            prop_assert!(verify_claim(&t, &s).unwrap(), "{:?}", s);
        }
    }

    #[test]
    fn combinatorial_success_implies_numeric_success(t in topology(3, 6), seed in 0u64..1000) {
        for s in synthesized(&t) {
            if check_combinatorial(&t, &s).unwrap().ok {
                prop_assert!(check_numeric(&t, &s, seed, 4).unwrap());
            }
        }
    }

    #[test]
    fn dropping_interference_keeps_receivers_decoding(t in topology(3, 6), pick in 0usize..64) {
        for s in synthesized(&t) {
            let before = check_combinatorial(&t, &s).unwrap();
            let mut thinner = s.clone();
            let removed = thinner.transmissions.remove(pick % thinner.transmissions.len());
            let after = check_combinatorial(&t, &thinner).unwrap();
            for (b, a) in before.receivers.iter().zip(&after.receivers) {
                if b.receiver != removed.msg && b.ok {
                    prop_assert!(a.ok, "receiver {} lost decoding", b.receiver);
                }
            }
        }
    }

    #[test]
    fn numeric_check_is_deterministic(t in topology(3, 5), seed in 0u64..100) {
        for s in synthesized(&t) {
            prop_assert_eq!(check_numeric(&t, &s, seed, 2).unwrap(), check_numeric(&t, &s, seed, 2).unwrap());
        }
    }
}
