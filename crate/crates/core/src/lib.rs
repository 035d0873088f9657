//! Bounds on the symmetric degrees of freedom of partially connected
//! cellular networks with transmitter cooperation.
//!
//! Given a K-cell topology the crate computes achievable values
//! (interference avoidance by fractional covering, interference alignment
//! along Hamiltonian cycles, matchings and proper partitions, and the closed
//! form for regular networks) and converse values (generator sequences,
//! compound settings and a TDMA-optimality test), each with a checkable
//! certificate. Alignment certificates can be turned into explicit
//! transmission schemes, which the verifier checks both combinatorially and
//! with random integer channels in exact arithmetic.

pub mod alignment;
pub mod bounds;
pub mod error;
pub mod fixtures;
pub mod linalg;
pub mod lp;
pub mod rational;
pub mod report;
pub mod scheduling;
pub mod scheme;
pub mod topology;
pub mod verifier;

pub use error::{Error, Result};
pub use rational::Rational;
pub use report::{analyze, analyze_with, AnalyzeOptions, BoundReport, Method};
pub use scheme::SchemeDescriptor;
pub use topology::{classify, enumerate_topologies, parse_topology, Topology, TopologyClass};
