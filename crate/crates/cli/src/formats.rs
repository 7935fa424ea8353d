//! On-disk formats: DIMACS CNF, DIMACS-like edge lists, instance JSON,
//! one-line witness files and experiment reports.

use std::fmt::Write as _;

use alignh_core::model::{Alignment, Link, Sentence, Span, Weight, WeightFn, WsaInstance};
use alignh_core::recovery::{ExperimentReport, TrialRow};
use alignh_core::reductions::{CnfFormula, Graph, SatReductionMap, VcReductionMap};
use alignh_core::witness::BitString;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

fn at(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Line { line, msg: msg.into() }
}

fn header(text: &str, kind: &str) -> Result<(usize, usize, usize), FormatError> {
    for (no, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 4 || parts[0] != "p" || parts[1] != kind {
            return Err(at(no + 1, format!("expected header \"p {kind} <n> <m>\", found {t:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| at(no + 1, format!("bad number {s:?} in header")));
        return Ok((no, num(parts[2])?, num(parts[3])?));
    }
    Err(FormatError::Invalid(format!("missing \"p {kind}\" header")))
}

/// DIMACS CNF: `c` comments, a `p cnf n m` header, zero-terminated clauses.
pub fn parse_dimacs_cnf(text: &str) -> Result<CnfFormula, FormatError> {
    let (head, n, m) = header(text, "cnf")?;
    let mut clauses: Vec<Vec<i32>> = Vec::new();
    let mut current = Vec::new();
    let mut last_line = head + 1;
    for (no, line) in text.lines().enumerate().skip(head + 1) {
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        last_line = no + 1;
        for tok in t.split_whitespace() {
            let x: i32 = tok.parse().map_err(|_| at(no + 1, format!("bad literal {tok:?}")))?;
            if x == 0 {
                if current.is_empty() {
                    return Err(at(no + 1, "empty clause"));
                }
                clauses.push(std::mem::take(&mut current));
            } else if x.unsigned_abs() as usize > n {
                return Err(at(no + 1, format!("literal {x} outside 1..={n}")));
            } else {
                current.push(x);
            }
        }
    }
    if !current.is_empty() {
        return Err(at(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(at(head + 1, format!("header declares {m} clauses, found {}", clauses.len())));
    }
    CnfFormula::from_dimacs(n, &clauses).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_dimacs_cnf(f: &CnfFormula) -> String {
    let mut s = format!("p cnf {} {}\n", f.num_vars(), f.num_clauses());
    for c in f.clauses() {
        for l in c {
            write!(s, "{} ", l.to_dimacs()).unwrap();
        }
        s.push_str("0\n");
    }
    s
}

/// Edge list: a `p edge n m` header and `e u v` lines.
pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let (head, n, m) = header(text, "edge")?;
    let mut edges = Vec::with_capacity(m);
    for (no, line) in text.lines().enumerate().skip(head + 1) {
        let t = line.trim();
        if t.is_empty() || t.starts_with('c') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        if parts.len() != 3 || parts[0] != "e" {
            return Err(at(no + 1, format!("expected \"e <u> <v>\", found {t:?}")));
        }
        let v = |s: &str| s.parse::<usize>().map_err(|_| at(no + 1, format!("bad vertex {s:?}")));
        let (a, b) = (v(parts[1])?, v(parts[2])?);
        if a == 0 || b == 0 || a > n || b > n {
            return Err(at(no + 1, format!("vertex outside 1..={n}")));
        }
        edges.push((a, b));
    }
    if edges.len() != m {
        return Err(at(head + 1, format!("header declares {m} edges, found {}", edges.len())));
    }
    Graph::new(n, edges).map_err(|e| FormatError::Invalid(e.to_string()))
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut s = format!("p edge {} {}\n", g.num_vertices(), g.num_edges());
    for (a, b) in g.edges() {
        writeln!(s, "e {a} {b}").unwrap();
    }
    s
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiEntry {
    pub ei: usize,
    pub ej: usize,
    pub fk: usize,
    pub fl: usize,
    /// Exact rational, `"num/den"` or an integer.
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ReductionSection {
    Sat(SatReductionMap),
    Vc(VcReductionMap),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub e: Vec<String>,
    pub f: Vec<String>,
    pub phi: Vec<PhiEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduction: Option<ReductionSection>,
}

impl InstanceFile {
    pub fn new(inst: &WsaInstance, reduction: Option<ReductionSection>) -> Self {
        let phi = inst
            .phi()
            .iter()
            .map(|(l, w)| PhiEntry { ei: l.e.i, ej: l.e.j, fk: l.f.i, fl: l.f.j, weight: w.to_string() })
            .collect();
        InstanceFile { e: inst.e().tokens().to_vec(), f: inst.f().tokens().to_vec(), phi, reduction }
    }

    pub fn instance(&self) -> Result<WsaInstance, FormatError> {
        let mut phi = WeightFn::new();
        for (i, p) in self.phi.iter().enumerate() {
            let span = |a: usize, b: usize| {
                if a < b {
                    Ok(Span::new(a, b))
                } else {
                    Err(FormatError::Invalid(format!("phi entry {}: empty span [{a},{b}]", i + 1)))
                }
            };
            let w: Weight = p
                .weight
                .parse()
                .map_err(|e| FormatError::Invalid(format!("phi entry {}: {e}", i + 1)))?;
            phi.insert(Link::new(span(p.ei, p.ej)?, span(p.fk, p.fl)?), w);
        }
        WsaInstance::new(Sentence::new(self.e.clone()), Sentence::new(self.f.clone()), phi)
            .map_err(|e| FormatError::Invalid(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| at(e.line(), e.to_string()))?;
        file.instance()?;
        Ok(file)
    }
}

/// Alignment files: a JSON list of `[ei, ej, fk, fl]` links.
pub fn parse_alignment(text: &str) -> Result<Alignment, FormatError> {
    let raw: Vec<[usize; 4]> = serde_json::from_str(text).map_err(|e| at(e.line(), e.to_string()))?;
    let mut links = Vec::with_capacity(raw.len());
    for [ei, ej, fk, fl] in raw {
        if ei >= ej || fk >= fl {
            return Err(FormatError::Invalid(format!("empty span in link [{ei},{ej},{fk},{fl}]")));
        }
        links.push(Link::new(Span::new(ei, ej), Span::new(fk, fl)));
    }
    Ok(Alignment::new(links))
}

pub fn write_alignment(a: &Alignment) -> String {
    let raw: Vec<[usize; 4]> = a.sorted().iter().map(|l| [l.e.i, l.e.j, l.f.i, l.f.j]).collect();
    let mut s = serde_json::to_string(&raw).expect("serializable");
    s.push('\n');
    s
}

/// Witness files hold one line of `0`/`1` and a trailing newline.
pub fn parse_witness(text: &str) -> Result<BitString, FormatError> {
    let Some(body) = text.strip_suffix('\n') else {
        return Err(at(1, "witness must end with a newline"));
    };
    if body.contains('\n') {
        return Err(at(2, "witness must be a single line"));
    }
    body.parse().map_err(|_| at(1, "witness may contain only 0 and 1"))
}

pub fn write_witness(w: &BitString) -> String {
    format!("{w}\n")
}

pub fn write_report_csv(report: &ExperimentReport) -> String {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    for row in &report.rows {
        wtr.serialize(row).expect("in-memory write");
    }
    String::from_utf8(wtr.into_inner().expect("flushed")).expect("utf-8")
}

pub fn parse_report_csv(text: &str) -> Result<Vec<TrialRow>, FormatError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| at(i + 2, e.to_string())))
        .collect()
}

pub fn write_report_markdown(report: &ExperimentReport) -> String {
    let c = &report.config;
    let successes = report.rows.iter().filter(|r| r.success).count();
    let mut s = String::from("# Recovery experiment\n\n| parameter | value |\n|---|---|\n");
    let kind = serde_json::to_value(c.kind).expect("serializable");
    let metric = serde_json::to_value(c.metric).expect("serializable");
    let strategy = serde_json::to_value(c.strategy).expect("serializable");
    for (k, v) in [
        ("kind", kind.as_str().unwrap_or_default().to_string()),
        ("amplification", c.amplification.to_string()),
        ("target", c.target.to_string()),
        ("metric", metric.as_str().unwrap_or_default().to_string()),
        ("strategy", strategy.as_str().unwrap_or_default().to_string()),
        ("c", c.c.to_string()),
        ("epsilon", c.epsilon.to_string()),
        ("witness length", report.witness_len.to_string()),
        ("budget", report.budget.to_string()),
        ("seed", c.seed.to_string()),
        ("trials", c.trials.to_string()),
    ] {
        writeln!(s, "| {k} | {v} |").unwrap();
    }
    writeln!(s, "\nSuccess rate: {successes}/{} = {:.4}", report.rows.len(), report.success_rate).unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimacs_errors_carry_line_numbers() {
        let bad = "c hello\np cnf x 2\n1 2 0\n";
        assert!(matches!(parse_dimacs_cnf(bad), Err(FormatError::Line { line: 2, .. })));
        let bad = "p cnf 2 1\n1 3 0\n";
        assert!(matches!(parse_dimacs_cnf(bad), Err(FormatError::Line { line: 2, .. })));
        let bad = "p cnf 2 2\n1 2 0\n";
        assert!(matches!(parse_dimacs_cnf(bad), Err(FormatError::Line { line: 1, .. })));
        assert!(matches!(parse_dimacs_cnf("p cnf 1 1\n1"), Err(FormatError::Line { line: 2, .. })));
        assert!(matches!(parse_dimacs_cnf(""), Err(FormatError::Invalid(_))));
    }

    #[test]
    fn dimacs_clauses_may_span_lines() {
        let f = parse_dimacs_cnf("c x\np cnf 3 2\n1 2\n 3 0 -1 -2 -3\n0\n").unwrap();
        assert_eq!(f.num_clauses(), 2);
        assert_eq!(parse_dimacs_cnf(&write_dimacs_cnf(&f)).unwrap(), f);
    }

    #[test]
    fn edge_lists() {
        let g = parse_edge_list("p edge 3 3\ne 1 2\ne 1 3\ne 2 3\n").unwrap();
        assert_eq!(g, Graph::complete(3));
        assert_eq!(parse_edge_list(&write_edge_list(&g)).unwrap(), g);
        assert!(matches!(parse_edge_list("p edge 2 1\ne 1 5\n"), Err(FormatError::Line { line: 2, .. })));
        assert!(matches!(parse_edge_list("p edge 2 1\nx 1 2\n"), Err(FormatError::Line { line: 2, .. })));
    }

    #[test]
    fn witness_lines() {
        let w = parse_witness("0110\n").unwrap();
        assert_eq!(write_witness(&w), "0110\n");
        assert!(parse_witness("0110").is_err());
        assert!(parse_witness("01\n10\n").is_err());
        assert!(parse_witness("012\n").is_err());
        assert_eq!(parse_witness("\n").unwrap().len(), 0);
    }
}
