//! Linear transmission schemes over an `n`-slot symbol extension.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::topology::Topology;

/// How the precoding vectors `V_1..V_M` are drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Genericity {
    /// Random vectors in dimension `n`, every `n` of them linearly independent.
    #[default]
    Generic,
    /// `V_v` is the `v`-th standard basis column of the `n x n` identity.
    StandardBasis,
}

/// One precoded symbol: transmitter `tx` sends instance `instance` of
/// message `msg` along vector `V_vec`. All indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Transmission {
    pub tx: usize,
    pub msg: usize,
    pub instance: usize,
    pub vec: usize,
}

impl Transmission {
    pub fn new(tx: usize, msg: usize, instance: usize, vec: usize) -> Self {
        Transmission { tx, msg, instance, vec }
    }
}

/// A full scheme: every transmission over `n` slots, with the DoF it claims.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeDescriptor {
    pub n: usize,
    /// Slots over which the channel must stay constant.
    pub coherence: usize,
    pub claimed_dof: Rational,
    #[serde(default)]
    pub genericity: Genericity,
    pub transmissions: Vec<Transmission>,
}

impl SchemeDescriptor {
    /// Number of distinct precoding vectors referenced (largest index used).
    pub fn vector_count(&self) -> usize {
        self.transmissions.iter().map(|t| t.vec).max().unwrap_or(0)
    }

    /// Distinct `(msg, instance)` pairs for message `msg`, ascending.
    pub fn instances_of(&self, msg: usize) -> Vec<usize> {
        let mut v: Vec<usize> = self.transmissions.iter().filter(|t| t.msg == msg).map(|t| t.instance).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Checks indices and structural rules against a topology.
    ///
    /// Rejects out-of-range indices, duplicate `(tx, vec)` pairs, standard
    /// basis indices above `n`, and transmitters sending a message they do
    /// not hold (a transmitter holds the messages of the receivers it reaches).
    pub fn validate(&self, topo: &Topology) -> Result<()> {
        let k = topo.k();
        if self.n == 0 {
            return Err(Error::MalformedScheme("n must be positive".into()));
        }
        if self.coherence == 0 {
            return Err(Error::MalformedScheme("coherence must be positive".into()));
        }
        if self.claimed_dof < Rational::zero() {
            return Err(Error::MalformedScheme("negative claimed DoF".into()));
        }
        let mut pairs = std::collections::BTreeSet::new();
        for t in &self.transmissions {
            if t.tx == 0 || t.tx > k || t.msg == 0 || t.msg > k {
                return Err(Error::MalformedScheme(format!("index out of range in {t:?}")));
            }
            if t.instance == 0 || t.vec == 0 {
                return Err(Error::MalformedScheme(format!("instance and vec are 1-based in {t:?}")));
            }
            if self.genericity == Genericity::StandardBasis && t.vec > self.n {
                return Err(Error::MalformedScheme(format!("standard basis vector {} exceeds n={}", t.vec, self.n)));
            }
            if !topo.link(t.msg - 1, t.tx - 1) {
                return Err(Error::MalformedScheme(format!(
                    "transmitter {} does not hold message {} (it does not reach receiver {})",
                    t.tx, t.msg, t.msg
                )));
            }
            if !pairs.insert((t.tx, t.vec)) {
                return Err(Error::MalformedScheme(format!("duplicate (tx, vec) = ({}, {})", t.tx, t.vec)));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SchemeDescriptor {
        SchemeDescriptor {
            n: 2,
            coherence: 2,
            claimed_dof: Rational::new(1, 2),
            genericity: Genericity::Generic,
            transmissions: vec![Transmission::new(1, 1, 1, 1), Transmission::new(2, 2, 1, 2)],
        }
    }

    #[test]
    fn json_shape_and_round_trip() {
        let s = sample();
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"claimed_dof\":\"1/2\""));
        assert!(json.contains("\"tx\":1"));
        let back: SchemeDescriptor = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        let minimal = r#"{"n":1,"coherence":1,"claimed_dof":"1","transmissions":[]}"#;
        let m: SchemeDescriptor = serde_json::from_str(minimal).unwrap();
        assert_eq!(m.genericity, Genericity::Generic);
    }

    #[test]
    fn validation_rules() {
        let topo = Topology::diagonal(2).unwrap();
        assert!(sample().validate(&topo).is_ok());
        let mut dup = sample();
        dup.transmissions.push(Transmission::new(1, 1, 2, 1));
        assert!(dup.validate(&topo).is_err());
        let mut foreign = sample();
        foreign.transmissions[0].msg = 2;
        assert!(foreign.validate(&topo).is_err());
        let mut sb = sample();
        sb.genericity = Genericity::StandardBasis;
        sb.transmissions[1].vec = 3;
        assert!(sb.validate(&topo).is_err());
    }

    #[test]
    fn counting_helpers() {
        let s = sample();
        assert_eq!(s.vector_count(), 2);
        assert_eq!(s.instances_of(1), vec![1]);
        assert!(s.instances_of(3).is_empty());
    }
}
