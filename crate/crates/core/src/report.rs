//! Runs every bound on one topology and assembles the interval for the
//! symmetric DoF.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::alignment::{
    best_hamiltonian_unchecked, best_partition_unchecked, perfect_matching, regular_value, HamiltonianCertificate,
    PartitionCertificate, HAMILTONIAN_MAX_K, PARTITION_MAX_K,
};
use crate::bounds::{
    compound_bound_unchecked, optimal_generator_certificates_unchecked, tdma_optimal, CompoundCertificate, DemandGraph,
    GeneratorCertificate, COMPOUND_MAX_K, GENERATOR_MAX_K,
};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::scheduling::{
    fractional_cover_unchecked, selective_coloring_unchecked, FractionalCover, SelectiveColoring, CHROMATIC_MAX_K,
    HYPEREDGE_MAX_K,
};
use crate::topology::{classify, Topology};

/// Largest K for which the regular-family test is attempted.
pub const REGULAR_MAX_K: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Coloring,
    Covering,
    Hamiltonian,
    Matching,
    Partition,
    Regular,
    Generator,
    Compound,
    Tdma,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Coloring,
        Method::Covering,
        Method::Hamiltonian,
        Method::Matching,
        Method::Partition,
        Method::Regular,
        Method::Generator,
        Method::Compound,
        Method::Tdma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Coloring => "coloring",
            Method::Covering => "covering",
            Method::Hamiltonian => "hamiltonian",
            Method::Matching => "matching",
            Method::Partition => "partition",
            Method::Regular => "regular",
            Method::Generator => "generator",
            Method::Compound => "compound",
            Method::Tdma => "tdma",
        }
    }

    /// Whether the method yields an upper (converse) bound.
    pub fn is_outer(self) -> bool {
        matches!(self, Method::Generator | Method::Compound | Method::Tdma)
    }

    /// Default largest K; none when the method is polynomial.
    pub fn default_guard(self) -> Option<usize> {
        match self {
            Method::Coloring => Some(CHROMATIC_MAX_K),
            Method::Covering => Some(HYPEREDGE_MAX_K),
            Method::Hamiltonian => Some(HAMILTONIAN_MAX_K),
            Method::Partition => Some(PARTITION_MAX_K),
            Method::Regular => Some(REGULAR_MAX_K),
            Method::Generator => Some(GENERATOR_MAX_K),
            Method::Compound => Some(COMPOUND_MAX_K),
            Method::Matching | Method::Tdma => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s.trim())
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodStatus {
    Computed,
    Skipped,
}

/// Evidence for a reported value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    Coloring(SelectiveColoring),
    Covering(FractionalCover),
    Hamiltonian(HamiltonianCertificate),
    /// 1-based matched message pairs of the alignment-feasible graph.
    Matching {
        pairs: Vec<(usize, usize)>,
    },
    Partition(PartitionCertificate),
    Regular {
        k: usize,
        d: usize,
    },
    Generator(GeneratorCertificate),
    Compound(CompoundCertificate),
    /// Acyclic demand graph; also implies an empty alignment-feasible graph.
    Tdma {
        demand_graph: DemandGraph,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MethodEntry {
    pub method: Method,
    pub status: MethodStatus,
    /// None when skipped or when the method does not apply to this topology.
    pub value: Option<Rational>,
    pub certificate: Option<Certificate>,
    /// Why the method was skipped or has no value.
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub k: usize,
    pub entries: Vec<MethodEntry>,
    /// Largest achievable value (0 when no achievable method produced one).
    pub best_achievable: Rational,
    /// Smallest outer value, including the trivial bound 1.
    pub best_outer: Rational,
    pub tight: bool,
}

impl BoundReport {
    pub fn entry(&self, method: Method) -> Option<&MethodEntry> {
        self.entries.iter().find(|e| e.method == method)
    }

    pub fn value(&self, method: Method) -> Option<Rational> {
        self.entry(method).and_then(|e| e.value)
    }

    pub fn all_skipped(&self) -> bool {
        self.entries.iter().all(|e| e.status == MethodStatus::Skipped)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalyzeOptions {
    /// Methods to run, reported in this order.
    pub methods: Vec<Method>,
    /// Replaces every per-method K limit when set.
    pub max_k_override: Option<usize>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions { methods: Method::ALL.to_vec(), max_k_override: None }
    }
}

/// Runs every method with default limits.
pub fn analyze(topo: &Topology) -> Result<BoundReport> {
    analyze_with(topo, &AnalyzeOptions::default())
}

/// Runs the selected methods. Fails only when the assembled interval is
/// empty, which would mean an achievable value above an outer value.
pub fn analyze_with(topo: &Topology, options: &AnalyzeOptions) -> Result<BoundReport> {
    let k = topo.k();
    let mut entries = Vec::with_capacity(options.methods.len());
    for &method in &options.methods {
        let limit = options.max_k_override.or(method.default_guard());
        if let Some(max) = limit.filter(|&max| k > max) {
            entries.push(MethodEntry {
                method,
                status: MethodStatus::Skipped,
                value: None,
                certificate: None,
                note: Some(format!("K = {k} exceeds the limit {max}")),
            });
            continue;
        }
        let (value, certificate) = run(topo, method)?;
        let note = value.is_none().then(|| "not applicable to this topology".to_string());
        entries.push(MethodEntry { method, status: MethodStatus::Computed, value, certificate, note });
    }
    let best_achievable =
        entries.iter().filter(|e| !e.method.is_outer()).filter_map(|e| e.value).max().unwrap_or_else(Rational::zero);
    let best_outer = entries
        .iter()
        .filter(|e| e.method.is_outer())
        .filter_map(|e| e.value)
        .chain(std::iter::once(Rational::one()))
        .min()
        .expect("the trivial bound is always present");
    if best_achievable > best_outer {
        return Err(Error::InvariantViolation(format!(
            "achievable {best_achievable} exceeds outer bound {best_outer}"
        )));
    }
    Ok(BoundReport { k, entries, best_achievable, best_outer, tight: best_achievable == best_outer })
}

fn run(topo: &Topology, method: Method) -> Result<(Option<Rational>, Option<Certificate>)> {
    let k = topo.k() as i64;
    Ok(match method {
        Method::Coloring => {
            let c = selective_coloring_unchecked(topo)?;
            (Some(c.value.recip()), Some(Certificate::Coloring(c)))
        }
        Method::Covering => {
            let c = fractional_cover_unchecked(topo)?;
            (Some(c.dof()), Some(Certificate::Covering(c)))
        }
        Method::Hamiltonian => match best_hamiltonian_unchecked(topo)? {
            Some(c) => (Some(c.dof), Some(Certificate::Hamiltonian(c))),
            None => (None, None),
        },
        Method::Matching => match perfect_matching(topo) {
            Some(pairs) => (Some(Rational::new(2, k)), Some(Certificate::Matching { pairs })),
            None => (None, None),
        },
        Method::Partition => match best_partition_unchecked(topo)? {
            Some(c) => (Some(c.dof), Some(Certificate::Partition(c))),
            None => (None, None),
        },
        Method::Regular => match classify(topo).regular {
            Some((k, d)) => (Some(regular_value(k, d)), Some(Certificate::Regular { k, d })),
            None => (None, None),
        },
        Method::Generator => {
            let cert = optimal_generator_certificates_unchecked(topo)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::InvariantViolation("no generator certificate".into()))?;
            (Some(cert.bound), Some(Certificate::Generator(cert)))
        }
        Method::Compound => match compound_bound_unchecked(topo)? {
            Some((v, c)) => (Some(v), Some(Certificate::Compound(c))),
            None => (None, None),
        },
        Method::Tdma => {
            if tdma_optimal(topo)? {
                (Some(Rational::new(1, k)), Some(Certificate::Tdma { demand_graph: DemandGraph::new(topo) }))
            } else {
                (None, None)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::parse_topology;

    fn fig5() -> Topology {
        parse_topology("6\n100100\n111100\n101000\n001110\n001010\n001001\n").unwrap()
    }

    #[test]
    fn fig5_interval() {
        let r = analyze(&fig5()).unwrap();
        assert_eq!(r.best_achievable, Rational::new(2, 5));
        assert_eq!(r.best_outer, Rational::new(1, 2));
        assert!(!r.tight);
        assert_eq!(r.value(Method::Compound), Some(Rational::new(4, 7)));
        assert_eq!(r.value(Method::Covering), Some(Rational::new(2, 5)));
    }

    #[test]
    fn wyner_and_triangular_are_tight() {
        let r = analyze(&Topology::circulant(5, 2).unwrap()).unwrap();
        assert!(r.tight && r.best_outer == Rational::new(2, 3));
        let r = analyze(&Topology::triangular(4).unwrap()).unwrap();
        assert!(r.tight && r.best_outer == Rational::new(1, 4));
    }

    #[test]
    fn guards_and_overrides() {
        let topo = Topology::circulant(10, 2).unwrap();
        let r = analyze(&topo).unwrap();
        assert_eq!(r.entry(Method::Hamiltonian).unwrap().status, MethodStatus::Skipped);
        assert_eq!(r.entry(Method::Covering).unwrap().status, MethodStatus::Computed);
        let opts = AnalyzeOptions { methods: vec![Method::Covering, Method::Compound], max_k_override: Some(5) };
        let r = analyze_with(&topo, &opts).unwrap();
        assert!(r.all_skipped());
        assert_eq!((r.best_achievable, r.best_outer), (Rational::zero(), Rational::one()));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("simplex".parse::<Method>().is_err());
    }

    #[test]
    fn fully_connected_reaches_tdma() {
        let r = analyze(&Topology::fully_connected(4).unwrap()).unwrap();
        assert_eq!(r.best_outer, Rational::new(1, 4));
        assert!(r.tight);
    }
}
