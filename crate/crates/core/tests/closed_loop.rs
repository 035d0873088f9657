//! Every alignment certificate for the reference networks turns into a
//! scheme that the verifier accepts.

use timcomp::alignment::{best_hamiltonian, best_partition, synthesize_scheme, SchemeSource};
use timcomp::fixtures;
use timcomp::verifier::{check_combinatorial, verify_claim};
use timcomp::{classify, Rational, Topology};

fn reference_networks() -> Vec<(String, Topology)> {
    let mut out = vec![
        ("fig5".to_string(), fixtures::fig5()),
        ("reg53".to_string(), fixtures::reg53()),
        ("ex7".to_string(), fixtures::ex7()),
        ("ex9".to_string(), fixtures::ex9()),
    ];
    for k in 3..=7 {
        out.push((format!("wyner{k}"), fixtures::wyner(k).unwrap()));
    }
    for k in 3..=6 {
        out.push((format!("triangular{k}"), fixtures::triangular(k).unwrap()));
    }
    out
}

#[test]
fn every_certificate_verifies() {
    for (name, topo) in reference_networks() {
        if let Some(cert) = best_hamiltonian(&topo).unwrap() {
            let s = synthesize_scheme(&topo, SchemeSource::Hamiltonian(&cert)).unwrap();
            assert_eq!(s.claimed_dof, cert.dof);
            assert!(verify_claim(&topo, &s).unwrap(), "{name}: hamiltonian");
        }
        if let Some(cert) = best_partition(&topo).unwrap() {
            let s = synthesize_scheme(&topo, SchemeSource::Partition(&cert)).unwrap();
            assert_eq!(s.claimed_dof, cert.dof);
            assert!(verify_claim(&topo, &s).unwrap(), "{name}: partition");
        }
        if let Some((k, d)) = classify(&topo).regular {
            let s = synthesize_scheme(&topo, SchemeSource::Regular { k, d }).unwrap();
            assert!(verify_claim(&topo, &s).unwrap(), "{name}: regular");
        }
    }
}

#[test]
fn fig5_hamiltonian_scheme_uses_five_slots() {
    let topo = fixtures::fig5();
    let cert = best_hamiltonian(&topo).unwrap().unwrap();
    let s = synthesize_scheme(&topo, SchemeSource::Hamiltonian(&cert)).unwrap();
    assert_eq!((s.n, s.transmissions.len()), (5, 12));
    assert_eq!(s.claimed_dof, Rational::new(2, 5));
    let r = check_combinatorial(&topo, &s).unwrap();
    assert!(r.ok && r.receivers.iter().all(|x| x.recovered.len() == 2));
}

#[test]
fn regular_scheme_decodes_in_one_round() {
    let topo = fixtures::reg53();
    let s = synthesize_scheme(&topo, SchemeSource::Regular { k: 5, d: 3 }).unwrap();
    assert_eq!((s.n, s.transmissions.len()), (4, 10));
    let r = check_combinatorial(&topo, &s).unwrap();
    assert!(r.ok);
    assert_eq!(r.rounds, 1);
}

#[test]
fn certificates_from_a_mismatched_topology_are_rejected() {
    let cert = best_hamiltonian(&fixtures::fig5()).unwrap().unwrap();
    assert!(synthesize_scheme(&fixtures::ex7(), SchemeSource::Hamiltonian(&cert)).is_err());
    assert!(synthesize_scheme(&fixtures::fig5(), SchemeSource::Regular { k: 6, d: 2 }).is_err());
}
