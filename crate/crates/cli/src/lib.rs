//! Command implementations behind the `timcomp` binary. Each command
//! returns the text to print and the process exit code.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use timcomp::alignment::{best_hamiltonian, best_partition, synthesize_scheme, SchemeSource};
use timcomp::report::{MethodEntry, MethodStatus};
use timcomp::topology::ENUMERATE_MAX_K;
use timcomp::verifier::{check_combinatorial, check_numeric, instance_counts_match, DecodeResult};
use timcomp::{
    analyze_with, classify, enumerate_topologies, fixtures, parse_topology, AnalyzeOptions, BoundReport, Method,
    Rational, SchemeDescriptor, Topology,
};

pub const EXIT_OK: i32 = 0;
/// A check ran to completion and reported a negative verdict.
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_ALL_SKIPPED: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

/// Largest K analyzed in full by `enumerate`; larger K up to the
/// enumeration limit only lists the topologies.
pub const ENUMERATE_ANALYZE_MAX_K: usize = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn input(error: anyhow::Error) -> Self {
        Failure { code: EXIT_INPUT, error }
    }
}

impl From<timcomp::Error> for Failure {
    fn from(e: timcomp::Error) -> Self {
        let code = match e {
            timcomp::Error::InvariantViolation(_) => EXIT_INTERNAL,
            timcomp::Error::GuardExceeded { .. } => EXIT_ALL_SKIPPED,
            _ => EXIT_INPUT,
        };
        Failure { code, error: e.into() }
    }
}

pub type CmdResult = std::result::Result<Output, Failure>;

#[derive(Debug)]
pub struct Output {
    pub text: String,
    pub code: i32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopologyEcho {
    pub k: usize,
    pub rows: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub best_achievable: Rational,
    pub best_outer: Rational,
    pub tight: bool,
}

/// Serialized analysis of one topology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    /// SHA-256 of the normalized topology text.
    pub input_hash: String,
    pub topology: TopologyEcho,
    pub methods: Vec<MethodEntry>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn new(topo: &Topology, report: BoundReport) -> Self {
        let text = topo.render();
        let hash = Sha256::digest(text.as_bytes());
        ReportDocument {
            tool: "timcomp".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            input_hash: hash.iter().map(|b| format!("{b:02x}")).collect(),
            topology: TopologyEcho { k: topo.k(), rows: topo.row_strings() },
            summary: Summary {
                best_achievable: report.best_achievable,
                best_outer: report.best_outer,
                tight: report.tight,
            },
            methods: report.entries,
        }
    }

    pub fn value(&self, method: Method) -> Option<Rational> {
        self.methods.iter().find(|e| e.method == method).and_then(|e| e.value)
    }

    pub fn all_skipped(&self) -> bool {
        self.methods.iter().all(|e| e.status == MethodStatus::Skipped)
    }

    /// `lo <= d_sym <= hi`, or `d_sym = v` when tight.
    pub fn summary_line(&self) -> String {
        let s = &self.summary;
        if s.tight {
            format!("d_sym = {} (tight)", s.best_outer)
        } else {
            format!("{} <= d_sym <= {}", s.best_achievable, s.best_outer)
        }
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "K = {}", self.topology.k);
        for row in &self.topology.rows {
            let _ = writeln!(out, "  {row}");
        }
        let _ = writeln!(out, "{:<12} {:<6} {:<9} {:<8} note", "method", "kind", "status", "value");
        for e in &self.methods {
            let kind = if e.method.is_outer() { "outer" } else { "inner" };
            let status = match e.status {
                MethodStatus::Computed => "computed",
                MethodStatus::Skipped => "skipped",
            };
            let value = e.value.map_or_else(|| "-".to_string(), |v| v.to_string());
            let note = e.note.clone().unwrap_or_default();
            let line = format!("{:<12} {:<6} {:<9} {:<8} {}", e.method.name(), kind, status, value, note);
            let _ = writeln!(out, "{}", line.trim_end());
        }
        let _ = writeln!(out, "summary: {}", self.summary_line());
        out
    }
}

fn run_analysis(topo: &Topology, options: &AnalyzeOptions) -> std::result::Result<ReportDocument, Failure> {
    let report = analyze_with(topo, options)?;
    Ok(ReportDocument::new(topo, report))
}

fn to_json<T: Serialize>(value: &T) -> std::result::Result<String, Failure> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| Failure { code: EXIT_INTERNAL, error: e.into() })
}

fn read_file(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(Failure::input)
}

fn load_topology(path: &Path) -> std::result::Result<Topology, Failure> {
    let text = read_file(path)?;
    parse_topology(&text).with_context(|| format!("cannot parse {}", path.display())).map_err(Failure::input)
}

/// Parses a comma-separated method list.
pub fn parse_methods(list: &str) -> std::result::Result<Vec<Method>, Failure> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(|s| s.parse::<Method>().map_err(Failure::from)).collect()
}

pub fn cmd_analyze(path: &Path, methods: Option<&str>, json: bool, max_k_override: Option<usize>) -> CmdResult {
    let topo = load_topology(path)?;
    let methods = match methods {
        Some(list) => parse_methods(list)?,
        None => Method::ALL.to_vec(),
    };
    let doc = run_analysis(&topo, &AnalyzeOptions { methods, max_k_override })?;
    let text = if json { to_json(&doc)? } else { doc.table() };
    let code = if doc.all_skipped() { EXIT_ALL_SKIPPED } else { EXIT_OK };
    Ok(Output { text, code })
}

/// One row of a demo's expected-versus-computed table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoCheck {
    pub quantity: String,
    pub expected: String,
    pub computed: String,
    pub matches: bool,
}

impl DemoCheck {
    fn new(quantity: &str, expected: impl ToString, computed: impl ToString) -> Self {
        let (expected, computed) = (expected.to_string(), computed.to_string());
        DemoCheck { quantity: quantity.into(), matches: expected == computed, expected, computed }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemoDocument {
    pub name: String,
    pub report: ReportDocument,
    pub checks: Vec<DemoCheck>,
    /// Decoding of the scheme fixture, when the demo has one.
    pub decode: Option<DecodeResult>,
}

fn shown(v: Option<Rational>) -> String {
    v.map_or_else(|| "-".into(), |v| v.to_string())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "verified"
    } else {
        "rejected"
    }
}

fn parse_size(name: &str, arg: &str) -> std::result::Result<usize, Failure> {
    arg.parse::<usize>().map_err(|_| Failure::input(anyhow!("demo {name} needs a cell count, got '{arg}'")))
}

/// Checks a synthesized scheme end to end.
fn scheme_checks(topo: &Topology, scheme: &SchemeDescriptor) -> std::result::Result<(bool, DecodeResult), Failure> {
    let decode = check_combinatorial(topo, scheme)?;
    let numeric = check_numeric(topo, scheme, 7, 100)?;
    Ok((decode.ok && numeric && instance_counts_match(topo, scheme), decode))
}

pub fn cmd_demo(name: &str, json: bool) -> CmdResult {
    let (base, arg) = match name.split_once(':') {
        Some((b, a)) => (b, Some(a)),
        None => (name, None),
    };
    let all = AnalyzeOptions::default();
    let mut checks = Vec::new();
    let mut decode = None;
    let doc = match (base, arg) {
        ("fig5", None) => {
            let topo = fixtures::fig5();
            let doc = run_analysis(&topo, &all)?;
            checks.push(DemoCheck::new("covering", "2/5", shown(doc.value(Method::Covering))));
            checks.push(DemoCheck::new("hamiltonian", "2/5", shown(doc.value(Method::Hamiltonian))));
            checks.push(DemoCheck::new("generator", "1/2", shown(doc.value(Method::Generator))));
            checks.push(DemoCheck::new("compound", "4/7", shown(doc.value(Method::Compound))));
            doc
        }
        ("reg53", None) => {
            let topo = fixtures::reg53();
            let doc = run_analysis(&topo, &all)?;
            checks.push(DemoCheck::new("coloring", "2/5", shown(doc.value(Method::Coloring))));
            checks.push(DemoCheck::new("hamiltonian", "1/2", shown(doc.value(Method::Hamiltonian))));
            checks.push(DemoCheck::new("regular", "1/2", shown(doc.value(Method::Regular))));
            checks.push(DemoCheck::new("compound", "5/8", shown(doc.value(Method::Compound))));
            checks.push(DemoCheck::new("generator", "4/5", shown(doc.value(Method::Generator))));
            let scheme = synthesize_scheme(&topo, SchemeSource::Regular { k: 5, d: 3 })?;
            let (ok, d) = scheme_checks(&topo, &scheme)?;
            checks.push(DemoCheck::new("regular scheme", "verified", verdict(ok)));
            if let Some(cert) = best_hamiltonian(&topo)? {
                let scheme = synthesize_scheme(&topo, SchemeSource::Hamiltonian(&cert))?;
                let (ok, _) = scheme_checks(&topo, &scheme)?;
                checks.push(DemoCheck::new("hamiltonian scheme", "verified", verdict(ok)));
            }
            decode = Some(d);
            doc
        }
        ("wyner", Some(a)) => {
            let k = parse_size(base, a)?;
            let topo = fixtures::wyner(k)?;
            let doc = run_analysis(&topo, &all)?;
            let expected = if k >= 3 { Rational::new(2, 3) } else { Rational::new(1, 2) };
            checks.push(DemoCheck::new("best achievable", expected, doc.summary.best_achievable));
            checks.push(DemoCheck::new("best outer", expected, doc.summary.best_outer));
            doc
        }
        ("triangular", Some(a)) => {
            let k = parse_size(base, a)?;
            let topo = fixtures::triangular(k)?;
            let doc = run_analysis(&topo, &all)?;
            let expected = Rational::new(1, k as i64);
            checks.push(DemoCheck::new("best achievable", expected, doc.summary.best_achievable));
            checks.push(DemoCheck::new("best outer", expected, doc.summary.best_outer));
            doc
        }
        ("ex7", None) => {
            let topo = fixtures::ex7();
            let doc = run_analysis(&topo, &all)?;
            checks.push(DemoCheck::new("partition", "1/2", shown(doc.value(Method::Partition))));
            if let Some(cert) = best_partition(&topo)? {
                checks.push(DemoCheck::new("portions", "[[1, 3, 5], [2, 4, 6]]", format!("{:?}", cert.portions)));
                let scheme = synthesize_scheme(&topo, SchemeSource::Partition(&cert))?;
                checks.push(DemoCheck::new("scheme slots", 2, scheme.n));
                let (ok, d) = scheme_checks(&topo, &scheme)?;
                checks.push(DemoCheck::new("partition scheme", "verified", verdict(ok)));
                decode = Some(d);
            }
            doc
        }
        ("ex9", None) => {
            let topo = fixtures::ex9();
            let doc = run_analysis(&topo, &all)?;
            checks.push(DemoCheck::new("tdma", "1/4", shown(doc.value(Method::Tdma))));
            checks.push(DemoCheck::new("tight", true, doc.summary.tight));
            doc
        }
        ("ex4-repetition", None) => {
            let topo = fixtures::reg53();
            let doc = run_analysis(&topo, &all)?;
            let scheme = fixtures::ex4_repetition();
            let d = check_combinatorial(&topo, &scheme)?;
            checks.push(DemoCheck::new("combinatorial decoding", "verified", verdict(d.ok)));
            checks.push(DemoCheck::new("cancellation rounds >= 2", true, d.rounds >= 2));
            checks.push(DemoCheck::new(
                "numeric (seed 7, 100 trials)",
                "verified",
                verdict(check_numeric(&topo, &scheme, 7, 100)?),
            ));
            checks.push(DemoCheck::new("claimed dof", "1/2", scheme.claimed_dof));
            checks.push(DemoCheck::new("instances per message", 5, scheme.instances_of(1).len()));
            decode = Some(d);
            doc
        }
        _ => {
            return Err(Failure::input(anyhow!(
                "unknown demo '{name}' (expected fig5, reg53, wyner:K, triangular:K, ex7, ex9, ex4-repetition)"
            )))
        }
    };
    let demo = DemoDocument { name: name.into(), report: doc, checks, decode };
    let text = if json { to_json(&demo)? } else { demo_table(&demo) };
    Ok(Output { text, code: EXIT_OK })
}

fn demo_table(demo: &DemoDocument) -> String {
    let mut out = format!("demo {}\n", demo.name);
    out.push_str(&demo.report.table());
    let _ = writeln!(out, "{:<30} {:<24} {:<24} ok", "quantity", "expected", "computed");
    for c in &demo.checks {
        let mark = if c.matches { "yes" } else { "NO" };
        let _ = writeln!(out, "{:<30} {:<24} {:<24} {}", c.quantity, c.expected, c.computed, mark);
    }
    out
}

/// One enumerated topology, analyzed or just listed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedTopology {
    pub index: usize,
    pub topology: TopologyEcho,
    pub report: Option<ReportDocument>,
    /// Coloring value differs from the best outer bound.
    pub orthogonal_violation: Option<bool>,
}

pub fn cmd_enumerate(k: usize, check_orthogonal: bool, json: bool) -> CmdResult {
    if k > ENUMERATE_MAX_K {
        return Err(Failure {
            code: EXIT_ALL_SKIPPED,
            error: anyhow!("enumeration is limited to K <= {ENUMERATE_MAX_K}"),
        });
    }
    let topologies = enumerate_topologies(k)?;
    let analyze_all = k <= ENUMERATE_ANALYZE_MAX_K;
    if check_orthogonal && !analyze_all {
        return Err(Failure {
            code: EXIT_ALL_SKIPPED,
            error: anyhow!("analysis during enumeration is limited to K <= {ENUMERATE_ANALYZE_MAX_K}"),
        });
    }
    let mut items = Vec::with_capacity(topologies.len());
    for (index, topo) in topologies.iter().enumerate() {
        let report = if analyze_all { Some(run_analysis(topo, &AnalyzeOptions::default())?) } else { None };
        let orthogonal_violation = match (&report, check_orthogonal) {
            (Some(doc), true) => Some(doc.value(Method::Coloring) != Some(doc.summary.best_outer)),
            _ => None,
        };
        items.push(EnumeratedTopology {
            index: index + 1,
            topology: TopologyEcho { k, rows: topo.row_strings() },
            report,
            orthogonal_violation,
        });
    }
    let violations = items.iter().filter(|i| i.orthogonal_violation == Some(true)).count();
    let text = if json {
        to_json(&items)?
    } else {
        let mut out = String::new();
        for item in &items {
            let rows = item.topology.rows.join(" ");
            match &item.report {
                Some(doc) => {
                    let regular = classify(&topologies[item.index - 1])
                        .regular
                        .map_or_else(String::new, |(k, d)| format!(" ({k},{d})-regular"));
                    let flag = match item.orthogonal_violation {
                        Some(true) => " coloring below best outer bound",
                        Some(false) => " coloring optimal",
                        None => "",
                    };
                    let _ = writeln!(out, "#{:<4} {rows}  {}{regular}{flag}", item.index, doc.summary_line());
                }
                None => {
                    let _ = writeln!(out, "#{:<4} {rows}", item.index);
                }
            }
        }
        let _ = writeln!(out, "{} non-isomorphic topologies with K = {k}", items.len());
        if check_orthogonal {
            let _ = writeln!(out, "{violations} violations of coloring optimality");
        }
        out
    };
    Ok(Output { text, code: if violations > 0 { EXIT_CHECK_FAILED } else { EXIT_OK } })
}

/// Result of `verify`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyDocument {
    pub combinatorial: DecodeResult,
    pub numeric: bool,
    pub seed: u64,
    pub trials: usize,
    pub instance_counts_match: bool,
    pub verified: bool,
}

pub fn cmd_verify(topology: &Path, scheme: &Path, seed: u64, trials: usize) -> CmdResult {
    let topo = load_topology(topology)?;
    let text = read_file(scheme)?;
    let scheme: SchemeDescriptor = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse scheme {}", scheme.display()))
        .map_err(Failure::input)?;
    let combinatorial = check_combinatorial(&topo, &scheme)?;
    let numeric = check_numeric(&topo, &scheme, seed, trials)?;
    let counts = instance_counts_match(&topo, &scheme);
    let verified = combinatorial.ok && numeric && counts;
    let doc = VerifyDocument { combinatorial, numeric, seed, trials, instance_counts_match: counts, verified };
    Ok(Output { text: to_json(&doc)?, code: if verified { EXIT_OK } else { EXIT_CHECK_FAILED } })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        let code = |e| Failure::from(e).code;
        assert_eq!(code(timcomp::Error::InvariantViolation("x".into())), EXIT_INTERNAL);
        assert_eq!(code(timcomp::Error::GuardExceeded { method: "m", k: 9, max: 8 }), EXIT_ALL_SKIPPED);
        assert_eq!(code(timcomp::Error::EmptyInput), EXIT_INPUT);
    }

    #[test]
    fn method_lists() {
        assert_eq!(parse_methods("tdma, generator").unwrap(), vec![Method::Tdma, Method::Generator]);
        assert_eq!(parse_methods("tdma,nope").unwrap_err().code, EXIT_INPUT);
    }

    #[test]
    fn document_hash_ignores_comments() {
        let a = parse_topology("# a comment\n2\n10\n01\n").unwrap();
        let b = parse_topology("2\n10\n01\n").unwrap();
        let doc = |t: &Topology| ReportDocument::new(t, timcomp::analyze(t).unwrap());
        assert_eq!(doc(&a).input_hash, doc(&b).input_hash);
        assert_eq!(doc(&a).input_hash.len(), 64);
    }
}
