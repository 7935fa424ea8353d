//! Gadget reductions from 3SAT and VertexCover, amplification gadgets and
//! search-to-decision drivers.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Link, Sentence, Span, WeightFn, WsaInstance};
use crate::solvers::decide_weight_one;
use crate::witness::BitString;

/// A literal in DIMACS convention: `+v` or `-v` for variable `v >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: usize) -> Self {
        Lit(var as i32)
    }

    pub fn neg(var: usize) -> Self {
        Lit(-(var as i32))
    }

    /// # Panics
    ///
    /// If `code == 0`.
    pub fn from_dimacs(code: i32) -> Self {
        assert!(code != 0, "0 is not a literal");
        Lit(code)
    }

    pub fn var(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negated(self) -> Self {
        Lit(-self.0)
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn holds(self, asg: &Assignment) -> bool {
        asg.value(self.var()) == self.is_positive()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_positive() {
            write!(f, "x{}", self.var())
        } else {
            write!(f, "~x{}", self.var())
        }
    }
}

/// Truth values for variables `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment(values)
    }

    pub fn all(n: usize, value: bool) -> Self {
        Assignment(vec![value; n])
    }

    /// Variables are 1-based.
    pub fn value(&self, var: usize) -> bool {
        self.0[var - 1]
    }

    pub fn set(&mut self, var: usize, value: bool) {
        self.0[var - 1] = value;
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    pub fn to_bits(&self) -> BitString {
        BitString::new(self.0.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<Vec<Lit>>) -> Result<Self> {
        for (c, clause) in clauses.iter().enumerate() {
            if clause.is_empty() {
                return Err(Error::InvalidFormula(format!("clause {} is empty", c + 1)));
            }
            if let Some(l) = clause.iter().find(|l| l.var() == 0 || l.var() > num_vars) {
                return Err(Error::InvalidFormula(format!(
                    "clause {} mentions variable {} outside 1..={num_vars}",
                    c + 1,
                    l.var()
                )));
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    /// Builds a formula from DIMACS-style signed integers.
    pub fn from_dimacs(num_vars: usize, clauses: &[Vec<i32>]) -> Result<Self> {
        if let Some(c) = clauses.iter().position(|c| c.contains(&0)) {
            return Err(Error::InvalidFormula(format!("clause {} contains 0", c + 1)));
        }
        CnfFormula::new(
            num_vars,
            clauses.iter().map(|c| c.iter().map(|&x| Lit::from_dimacs(x)).collect()).collect(),
        )
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    /// `(positive, negative)` occurrence counts of `var`.
    pub fn occurrences(&self, var: usize) -> (usize, usize) {
        let mut p = 0;
        let mut q = 0;
        for l in self.clauses.iter().flatten().filter(|l| l.var() == var) {
            if l.is_positive() {
                p += 1;
            } else {
                q += 1;
            }
        }
        (p, q)
    }

    pub fn is_satisfied_by(&self, asg: &Assignment) -> bool {
        asg.num_vars() == self.num_vars && self.clauses.iter().all(|c| c.iter().any(|l| l.holds(asg)))
    }

    /// Fixes `var := value`, dropping satisfied clauses and false literals.
    /// `None` signals a clause became empty.
    pub fn assign(&self, var: usize, value: bool) -> Option<CnfFormula> {
        let mut clauses = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            if c.iter().any(|l| l.var() == var && l.is_positive() == value) {
                continue;
            }
            let rest: Vec<Lit> = c.iter().copied().filter(|l| l.var() != var).collect();
            if rest.is_empty() {
                return None;
            }
            clauses.push(rest);
        }
        Some(CnfFormula { num_vars: self.num_vars, clauses })
    }

    fn with_clauses(&self, extra: impl IntoIterator<Item = Vec<Lit>>) -> CnfFormula {
        let mut clauses = self.clauses.clone();
        clauses.extend(extra);
        CnfFormula { num_vars: self.num_vars, clauses }
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| format!("({})", c.iter().map(Lit::to_string).collect::<Vec<_>>().join(" | ")))
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

/// Every satisfying assignment, in increasing binary order (x1 most significant).
pub fn satisfying_assignments(f: &CnfFormula) -> Vec<Assignment> {
    let n = f.num_vars();
    assert!(n < 32, "brute force limited to 31 variables");
    (0u32..1 << n)
        .map(|m| Assignment((0..n).map(|v| m >> (n - 1 - v) & 1 == 1).collect()))
        .filter(|a| f.is_satisfied_by(a))
        .collect()
}

pub fn brute_force_satisfiable(f: &CnfFormula) -> bool {
    let n = f.num_vars();
    assert!(n < 32, "brute force limited to 31 variables");
    (0u32..1 << n).any(|m| f.is_satisfied_by(&Assignment((0..n).map(|v| m >> v & 1 == 1).collect())))
}

/// Checks that every variable occurs in both polarities. With `repair`,
/// deficient variables receive a tautological clause `(v | ~v)` instead.
pub fn preprocess(f: &CnfFormula, repair: bool) -> Result<CnfFormula> {
    let deficient: Vec<usize> = (1..=f.num_vars())
        .filter(|&v| {
            let (p, q) = f.occurrences(v);
            p == 0 || q == 0
        })
        .collect();
    match deficient.first() {
        None => Ok(f.clone()),
        Some(&var) if !repair => Err(Error::Unpreprocessed { var }),
        Some(_) => Ok(f.with_clauses(deficient.iter().map(|&v| vec![Lit::pos(v), Lit::neg(v)]))),
    }
}

/// Where one variable's literal copies sit in `e`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarBlock {
    pub var: usize,
    pub block: Span,
    pub positives: Span,
    pub negatives: Span,
    /// The `v ~v` pair between the polarities, when present.
    pub dummy: Option<Span>,
}

impl VarBlock {
    /// Internal boundary positions of the block (endpoints excluded).
    pub fn internal_positions(&self) -> std::ops::Range<usize> {
        self.block.i + 1..self.block.j
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amplification {
    pub var: usize,
    pub copies: usize,
}

/// Provenance of a SAT-derived instance, needed to decode witnesses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatReductionMap {
    pub formula: CnfFormula,
    pub blocks: Vec<VarBlock>,
    /// 1-based f position of each clause word.
    pub clause_words: Vec<usize>,
    /// 1-based f position of each slack word.
    pub slack_words: Vec<usize>,
    pub amplification: Option<Amplification>,
}

impl SatReductionMap {
    pub fn block(&self, var: usize) -> &VarBlock {
        &self.blocks[var - 1]
    }

    pub fn has_dummy_pairs(&self) -> bool {
        self.blocks.iter().all(|b| b.dummy.is_some())
    }
}

fn require_preprocessed(f: &CnfFormula) -> Result<()> {
    for v in 1..=f.num_vars() {
        let (p, q) = f.occurrences(v);
        if p == 0 || q == 0 {
            return Err(Error::Unpreprocessed { var: v });
        }
    }
    Ok(())
}

fn sat_reduction(f: &CnfFormula, dummy_pairs: bool) -> Result<(WsaInstance, SatReductionMap)> {
    require_preprocessed(f)?;
    let (n, m) = (f.num_vars(), f.num_clauses());

    let mut e_tokens = Vec::new();
    let mut blocks = Vec::with_capacity(n);
    for v in 1..=n {
        let (p, q) = f.occurrences(v);
        let start = e_tokens.len();
        e_tokens.extend(std::iter::repeat_n(format!("x{v}"), p));
        let dummy = dummy_pairs.then(|| {
            e_tokens.push(format!("v{v}"));
            e_tokens.push(format!("~v{v}"));
            Span::new(start + p, start + p + 2)
        });
        let neg_start = e_tokens.len();
        e_tokens.extend(std::iter::repeat_n(format!("~x{v}"), q));
        blocks.push(VarBlock {
            var: v,
            block: Span::new(start, e_tokens.len()),
            positives: Span::new(start, start + p),
            negatives: Span::new(neg_start, neg_start + q),
            dummy,
        });
    }

    let mut f_tokens: Vec<String> = (1..=m).map(|c| format!("c{c}")).collect();
    f_tokens.extend((1..=n).map(|v| format!("s{v}")));
    let clause_words: Vec<usize> = (1..=m).collect();
    let slack_words: Vec<usize> = (m + 1..=m + n).collect();

    let mut phi = WeightFn::new();
    for (c, clause) in f.clauses().iter().enumerate() {
        let word = Span::single(clause_words[c]);
        for lit in clause {
            let b = &blocks[lit.var() - 1];
            let copies = if lit.is_positive() { b.positives } else { b.negatives };
            for w in copies.words() {
                phi.set_one(Link::new(Span::single(w), word));
            }
        }
    }
    for b in &blocks {
        let word = Span::single(slack_words[b.var - 1]);
        for i in b.block.i..b.block.j {
            for j in i + 1..=b.block.j {
                let span = Span::new(i, j);
                let all_pos = span.contains_span(b.positives);
                let all_neg = span.contains_span(b.negatives);
                let has_dummy = b.dummy.is_none_or(|d| span.contains_span(d));
                if has_dummy && (all_pos || all_neg) {
                    phi.set_one(Link::new(span, word));
                }
            }
        }
    }

    let inst = WsaInstance::new(Sentence::new(e_tokens), Sentence::new(f_tokens), phi)?;
    let map = SatReductionMap {
        formula: f.clone(),
        blocks,
        clause_words,
        slack_words,
        amplification: None,
    };
    Ok((inst, map))
}

/// Literal blocks in `e`, clause words then slack words in `f`.
pub fn sat_to_wsa(f: &CnfFormula) -> Result<(WsaInstance, SatReductionMap)> {
    sat_reduction(f, false)
}

/// As [`sat_to_wsa`] with a `v ~v` pair in the middle of every block; slack
/// words only link to spans containing that pair.
pub fn sat_to_pwsa_unique(f: &CnfFormula) -> Result<(WsaInstance, SatReductionMap)> {
    sat_reduction(f, true)
}

/// Appends `copies` tautological clauses `(v | ~v)`.
pub fn amplify_sat_dummy_clauses(f: &CnfFormula, var: usize, copies: usize) -> Result<CnfFormula> {
    check_var(f, var)?;
    Ok(f.with_clauses(std::iter::repeat_n(vec![Lit::pos(var), Lit::neg(var)], copies)))
}

/// Amplifies `var` with dummy clauses and reduces, recording the amplification.
pub fn sat_to_wsa_amplified(
    f: &CnfFormula,
    var: usize,
    copies: usize,
    dummy_pairs: bool,
) -> Result<(WsaInstance, SatReductionMap)> {
    let amplified = amplify_sat_dummy_clauses(f, var, copies)?;
    let (inst, mut map) = sat_reduction(&amplified, dummy_pairs)?;
    map.amplification = Some(Amplification { var, copies });
    Ok((inst, map))
}

fn check_var(f: &CnfFormula, var: usize) -> Result<()> {
    if var == 0 || var > f.num_vars() {
        return Err(Error::InvalidFormula(format!("variable {var} outside 1..={}", f.num_vars())));
    }
    Ok(())
}

/// Natural-witness layout of an equivalence-amplified formula: the copies of
/// the amplified variable come first, then the original variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivLayout {
    pub var: usize,
    pub copies: Vec<usize>,
    /// Variable at each witness position.
    pub order: Vec<usize>,
}

impl EquivLayout {
    pub fn witness(&self, asg: &Assignment) -> BitString {
        BitString::new(self.order.iter().map(|&v| asg.value(v)).collect())
    }

    pub fn copy_positions(&self) -> std::ops::Range<usize> {
        0..self.copies.len()
    }
}

/// Adds variables `y_1..y_A` with clauses `(~z | y_i) & (z | ~y_i)`.
pub fn amplify_sat_equiv_vars(f: &CnfFormula, z: usize, copies: usize) -> Result<(CnfFormula, EquivLayout)> {
    check_var(f, z)?;
    let n = f.num_vars();
    let ys: Vec<usize> = (n + 1..=n + copies).collect();
    let mut clauses = f.clauses().to_vec();
    for &y in &ys {
        clauses.push(vec![Lit::neg(z), Lit::pos(y)]);
        clauses.push(vec![Lit::pos(z), Lit::neg(y)]);
    }
    let order = ys.iter().copied().chain(1..=n).collect();
    Ok((
        CnfFormula::new(n + copies, clauses)?,
        EquivLayout { var: z, copies: ys, order },
    ))
}

/// Simple undirected graph on vertices `1..=n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(num_vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut normal = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == 0 || v == 0 || u > num_vertices || v > num_vertices {
                return Err(Error::InvalidGraph(format!("edge ({u},{v}) outside 1..={num_vertices}")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop at {u}")));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(Error::InvalidGraph(format!("duplicate edge ({u},{v})")));
            }
            normal.push(e);
        }
        Ok(Graph { num_vertices, edges: normal })
    }

    pub fn complete(n: usize) -> Self {
        let edges = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        Graph { num_vertices: n, edges }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut n: Vec<usize> = self
            .edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect();
        n.sort_unstable();
        n
    }

    /// Same vertex set, without the edges touching `removed`.
    pub fn without_vertices(&self, removed: &BTreeSet<usize>) -> Graph {
        Graph {
            num_vertices: self.num_vertices,
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|(a, b)| !removed.contains(a) && !removed.contains(b))
                .collect(),
        }
    }

    /// Drops isolated vertices; returns the relabelled graph and the original
    /// id of each new vertex.
    pub fn without_isolated(&self) -> (Graph, Vec<usize>) {
        let keep: Vec<usize> = (1..=self.num_vertices).filter(|&v| self.degree(v) > 0).collect();
        let mut new_id = vec![0; self.num_vertices + 1];
        for (i, &v) in keep.iter().enumerate() {
            new_id[v] = i + 1;
        }
        let edges = self.edges.iter().map(|&(a, b)| (new_id[a], new_id[b])).collect();
        (Graph { num_vertices: keep.len(), edges }, keep)
    }
}

/// A set of vertices; its natural witness is the characteristic bitstring.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexSet(pub BTreeSet<usize>);

impl VertexSet {
    pub fn from_bits(bits: &BitString) -> Self {
        VertexSet(bits.bits().iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect())
    }

    pub fn to_bits(&self, n: usize) -> BitString {
        BitString::new((1..=n).map(|v| self.0.contains(&v)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn covers(&self, g: &Graph) -> bool {
        g.edges().iter().all(|(a, b)| self.0.contains(a) || self.0.contains(b))
    }
}

fn subsets_of_size(g: &Graph, k: usize) -> impl Iterator<Item = VertexSet> + '_ {
    let n = g.num_vertices();
    assert!(n < 32, "brute force limited to 31 vertices");
    (0u32..1 << n)
        .filter(move |m| m.count_ones() as usize == k)
        .map(move |m| VertexSet((0..n).filter(|&i| m >> i & 1 == 1).map(|i| i + 1).collect()))
}

/// Cover of size at most `k`, by subset enumeration.
pub fn has_cover(g: &Graph, k: usize) -> bool {
    let k = k.min(g.num_vertices());
    (0..=k).any(|s| subsets_of_size(g, s).any(|c| c.covers(g)))
}

pub fn min_cover_size(g: &Graph) -> usize {
    (0..=g.num_vertices())
        .find(|&s| subsets_of_size(g, s).any(|c| c.covers(g)))
        .expect("the full vertex set is a cover")
}

pub fn minimum_covers(g: &Graph) -> Vec<VertexSet> {
    let k = min_cover_size(g);
    let mut v: Vec<VertexSet> = subsets_of_size(g, k).filter(|c| c.covers(g)).collect();
    v.sort();
    v
}

/// Where the path gadget's vertices sit after [`amplify_vc_path`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathGadget {
    /// The amplified vertex, in new numbering.
    pub vertex: usize,
    /// Its copy, adjacent to the vertex's neighbours; also the last `u`.
    pub copy: usize,
    /// Path vertices at even distance from `vertex`; in a minimum cover
    /// exactly when `vertex` is (up to a same-size swap).
    pub u: Vec<usize>,
    /// Path vertices at odd distance from `vertex`.
    pub w: Vec<usize>,
    /// Amount the minimum cover grows by.
    pub shift: usize,
}

/// Adds a copy `v'` of `v` (adjacent to `v`'s neighbours) and a path
/// `v - w1 - u1 - w2 - ... - u(L-1) - wL - v'` with `2L` edges, so `v'` acts as
/// `uL`. The minimum cover grows by exactly `L`. New numbering: `u1..uL`, then
/// the original vertices, then `w1..wL`.
pub fn amplify_vc_path(g: &Graph, v: usize, half_len: usize) -> Result<(Graph, PathGadget)> {
    let n = g.num_vertices();
    if v == 0 || v > n {
        return Err(Error::InvalidGraph(format!("vertex {v} outside 1..={n}")));
    }
    if half_len == 0 {
        return Err(Error::InvalidGraph("path half-length must be at least 1".into()));
    }
    let l = half_len;
    let orig = |x: usize| x + l;
    let u: Vec<usize> = (1..=l).collect();
    let w: Vec<usize> = (l + n + 1..=l + n + l).collect();
    let copy = u[l - 1];
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|&(a, b)| (orig(a), orig(b))).collect();
    edges.extend(g.neighbors(v).into_iter().map(|x| (copy, orig(x))));
    let mut prev = orig(v);
    for t in 0..l {
        edges.push((prev, w[t]));
        edges.push((w[t], u[t]));
        prev = u[t];
    }
    let graph = Graph::new(n + 2 * l, edges)?;
    Ok((graph, PathGadget { vertex: orig(v), copy, u, w, shift: l }))
}

/// Provenance of a VertexCover-derived instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VcReductionMap {
    pub graph: Graph,
    pub k: usize,
    /// e-span of each vertex block (`deg + 1` copies).
    pub blocks: Vec<Span>,
    pub edge_words: Vec<usize>,
    pub slack_words: Vec<usize>,
    pub t_words: Vec<usize>,
    pub gadget: Option<PathGadget>,
}

pub fn vc_to_wsa(g: &Graph, k: usize) -> Result<(WsaInstance, VcReductionMap)> {
    let (n, m) = (g.num_vertices(), g.num_edges());
    if k == 0 || k > n {
        return Err(Error::BudgetOutOfRange { k, n });
    }
    if let Some(v) = (1..=n).find(|&v| g.degree(v) == 0) {
        return Err(Error::IsolatedVertex { vertex: v });
    }

    let mut e_tokens = Vec::with_capacity(2 * m + n);
    let mut blocks = Vec::with_capacity(n);
    for v in 1..=n {
        let start = e_tokens.len();
        e_tokens.extend(std::iter::repeat_n(format!("v{v}"), g.degree(v) + 1));
        blocks.push(Span::new(start, e_tokens.len()));
    }
    let mut f_tokens: Vec<String> = (1..=m).map(|l| format!("c{l}")).collect();
    f_tokens.extend((1..=n).map(|v| format!("s{v}")));
    f_tokens.extend((1..=n - k).map(|l| format!("t{l}")));
    let edge_words: Vec<usize> = (1..=m).collect();
    let slack_words: Vec<usize> = (m + 1..=m + n).collect();
    let t_words: Vec<usize> = (m + n + 1..=m + 2 * n - k).collect();

    let mut phi = WeightFn::new();
    for (l, &(a, b)) in g.edges().iter().enumerate() {
        let word = Span::single(edge_words[l]);
        for end in [a, b] {
            for w in blocks[end - 1].words() {
                phi.set_one(Link::new(Span::single(w), word));
            }
        }
    }
    for v in 1..=n {
        let b = blocks[v - 1];
        let deg = b.len() - 1;
        // the last copy alone must reach s_i, so j runs through deg + 1
        for j in 1..=deg + 1 {
            phi.set_one(Link::new(Span::new(b.i + j - 1, b.j), Span::single(slack_words[v - 1])));
        }
        let head = Span::new(b.i, b.i + deg);
        for &t in &t_words {
            phi.set_one(Link::new(head, Span::single(t)));
        }
    }

    let inst = WsaInstance::new(Sentence::new(e_tokens), Sentence::new(f_tokens), phi)?;
    let map = VcReductionMap {
        graph: g.clone(),
        k,
        blocks,
        edge_words,
        slack_words,
        t_words,
        gadget: None,
    };
    Ok((inst, map))
}

/// Fixes variables in index order, preferring true, using `oracle` to decide
/// satisfiability of each simplified formula.
pub fn sat_search_via_decision(
    f: &CnfFormula,
    mut oracle: impl FnMut(&CnfFormula) -> bool,
) -> Result<Option<Assignment>> {
    if !oracle(f) {
        return Ok(None);
    }
    let mut current = f.clone();
    let mut asg = Assignment::all(f.num_vars(), false);
    for v in 1..=f.num_vars() {
        let take_true = current.assign(v, true).filter(|g| oracle(g));
        current = match take_true {
            Some(g) => {
                asg.set(v, true);
                g
            }
            None => current.assign(v, false).ok_or(Error::InconsistentOracle)?,
        };
    }
    if f.is_satisfied_by(&asg) {
        Ok(Some(asg))
    } else {
        Err(Error::InconsistentOracle)
    }
}

/// Builds a cover of size at most `k` vertex by vertex: a vertex in the cover
/// is deleted and the budget drops by one; a vertex outside it is deleted
/// together with its neighbours, which all join the cover.
pub fn vc_search_via_decision(
    g: &Graph,
    k: usize,
    mut oracle: impl FnMut(&Graph, usize) -> bool,
) -> Result<Option<VertexSet>> {
    if !oracle(g, k) {
        return Ok(None);
    }
    let mut removed = BTreeSet::new();
    let mut cover = VertexSet::default();
    let mut budget = k;
    let mut current = g.clone();
    for v in 1..=g.num_vertices() {
        if current.degree(v) == 0 {
            continue;
        }
        let mut without = removed.clone();
        without.insert(v);
        let rest = g.without_vertices(&without);
        if budget > 0 && oracle(&rest, budget - 1) {
            cover.0.insert(v);
            budget -= 1;
            removed = without;
        } else {
            let nbrs = current.neighbors(v);
            if nbrs.len() > budget {
                return Err(Error::InconsistentOracle);
            }
            budget -= nbrs.len();
            cover.0.extend(nbrs.iter().copied());
            removed = without;
            removed.extend(nbrs);
        }
        current = g.without_vertices(&removed);
    }
    if cover.covers(g) && cover.len() <= k {
        Ok(Some(cover))
    } else {
        Err(Error::InconsistentOracle)
    }
}

/// Satisfiability via the WSA reduction. Variables missing a polarity are
/// repaired with tautologies first.
pub fn wsa_sat_oracle(f: &CnfFormula) -> bool {
    if f.num_clauses() == 0 {
        return true;
    }
    let fixed = preprocess(f, true).expect("repair never fails");
    let (inst, _) = sat_to_wsa(&fixed).expect("preprocessed");
    decide_weight_one(&inst).expect("reduction instances are within limits")
}

/// Cover existence via the WSA reduction, after dropping isolated vertices
/// and settling the degenerate budgets directly.
pub fn wsa_cover_oracle(g: &Graph, k: usize) -> bool {
    let (h, _) = g.without_isolated();
    if h.num_edges() == 0 {
        return true;
    }
    if k == 0 {
        return false;
    }
    if k >= h.num_vertices() {
        return true;
    }
    let (inst, _) = vc_to_wsa(&h, k).expect("valid after normalisation");
    decide_weight_one(&inst).expect("reduction instances are within limits")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn f1() -> CnfFormula {
        CnfFormula::from_dimacs(3, &[vec![1, 2, 3], vec![-1, -2, -3]]).unwrap()
    }

    #[test]
    fn e1_layout() {
        let (inst, map) = sat_to_wsa(&f1()).unwrap();
        assert_eq!((inst.e().len(), inst.f().len()), (6, 5));
        assert!(inst.phi().is_one(&Link::new(Span::new(0, 1), Span::single(1))));
        assert!(inst.phi().is_one(&Link::new(Span::new(0, 2), Span::single(3))));
        assert!(!inst.phi().is_one(&Link::new(Span::new(1, 2), Span::single(1))));
        assert_eq!(map.block(2).block, Span::new(2, 4));
        assert_eq!(map.clause_words, vec![1, 2]);
        assert_eq!(map.slack_words, vec![3, 4, 5]);
    }

    #[test]
    fn slack_links_follow_the_polarity_rule() {
        // one positive and two negative occurrences
        let f = CnfFormula::from_dimacs(1, &[vec![1], vec![-1], vec![-1]]).unwrap();
        let (inst, _) = sat_to_wsa(&f).unwrap();
        let s = Span::single(4);
        let ones: Vec<Span> = inst.phi().positive_links().filter(|(l, _)| l.f == s).map(|(l, _)| l.e).collect();
        assert_eq!(ones, vec![Span::new(0, 1), Span::new(0, 2), Span::new(0, 3), Span::new(1, 3)]);
    }

    #[test]
    fn dummy_pair_layout() {
        let (inst, map) = sat_to_pwsa_unique(&f1()).unwrap();
        assert_eq!((inst.e().len(), inst.f().len()), (12, 5));
        let b = map.block(1);
        assert_eq!(b.dummy, Some(Span::new(1, 3)));
        let tokens: Vec<&str> = inst.e().tokens()[0..4].iter().map(String::as_str).collect();
        assert_eq!(tokens, ["x1", "v1", "~v1", "~x1"]);
        let s1 = Span::single(3);
        assert!(inst.phi().is_one(&Link::new(Span::new(0, 3), s1)));
        assert!(!inst.phi().is_one(&Link::new(Span::new(0, 1), s1)));
        assert!(!inst.phi().is_one(&Link::new(Span::new(1, 3), s1)));
    }

    #[test]
    fn unpreprocessed_formula_is_rejected() {
        let f = CnfFormula::from_dimacs(2, &[vec![1, 2]]).unwrap();
        assert_eq!(sat_to_wsa(&f).unwrap_err(), Error::Unpreprocessed { var: 1 });
        let fixed = preprocess(&f, true).unwrap();
        assert_eq!(fixed.num_clauses(), 3);
        assert!(sat_to_wsa(&fixed).is_ok());
    }

    #[test]
    fn unsatisfiable_pair_stays_unsatisfiable() {
        let f = CnfFormula::from_dimacs(1, &[vec![1], vec![-1]]).unwrap();
        let (inst, _) = sat_to_wsa(&f).unwrap();
        assert!(!decide_weight_one(&inst).unwrap());
        let (inst, _) = sat_to_pwsa_unique(&f).unwrap();
        assert!(!decide_weight_one(&inst).unwrap());
    }

    #[test]
    fn vc_sizes_and_decisions() {
        let k3 = Graph::complete(3);
        let (inst, map) = vc_to_wsa(&k3, 2).unwrap();
        assert_eq!((inst.e().len(), inst.f().len()), (9, 7));
        assert_eq!(map.t_words, vec![7]);
        assert!(decide_weight_one(&inst).unwrap());
        let (inst, _) = vc_to_wsa(&k3, 1).unwrap();
        assert!(!decide_weight_one(&inst).unwrap());
        assert_eq!(vc_to_wsa(&k3, 0).unwrap_err(), Error::BudgetOutOfRange { k: 0, n: 3 });
        let g = Graph::new(3, vec![(1, 2)]).unwrap();
        assert_eq!(vc_to_wsa(&g, 1).unwrap_err(), Error::IsolatedVertex { vertex: 3 });
    }

    #[test]
    fn dummy_clause_amplification() {
        let f = amplify_sat_dummy_clauses(&f1(), 1, 4).unwrap();
        assert_eq!(f.num_clauses(), 6);
        let (inst, map) = sat_to_wsa_amplified(&f1(), 1, 4, false).unwrap();
        assert_eq!(map.block(1).block.len(), 10);
        assert_eq!(map.amplification, Some(Amplification { var: 1, copies: 4 }));
        assert_eq!(inst.f().len(), 6 + 3);
        assert_eq!(brute_force_satisfiable(&f), brute_force_satisfiable(&f1()));
    }

    #[test]
    fn equivalence_amplification() {
        let (g, layout) = amplify_sat_equiv_vars(&f1(), 1, 3).unwrap();
        assert_eq!((g.num_vars(), g.num_clauses()), (6, 8));
        assert_eq!(layout.order, vec![4, 5, 6, 1, 2, 3]);
        for a in satisfying_assignments(&g) {
            assert!((4..=6).all(|y| a.value(y) == a.value(1)));
        }
        let unsat = CnfFormula::from_dimacs(1, &[vec![1], vec![-1]]).unwrap();
        assert!(!brute_force_satisfiable(&amplify_sat_equiv_vars(&unsat, 1, 2).unwrap().0));
    }

    #[test]
    fn path_gadget_on_triangle() {
        let (g, gadget) = amplify_vc_path(&Graph::complete(3), 1, 2).unwrap();
        assert_eq!(g.num_vertices(), 3 + 2 * 2);
        assert_eq!(min_cover_size(&g), 2 + 2);
        assert_eq!(gadget.vertex, 3);
        assert_eq!(gadget.u, vec![1, 2]);
        assert_eq!(gadget.w, vec![6, 7]);
        for c in minimum_covers(&g) {
            let with_u = gadget.u.iter().all(|&x| c.contains(x)) && !gadget.w.iter().any(|&x| c.contains(x));
            let with_w = gadget.w.iter().all(|&x| c.contains(x)) && !gadget.u.iter().any(|&x| c.contains(x));
            assert!(with_u ^ with_w, "{c:?}");
            if !c.contains(gadget.vertex) {
                assert!(with_w);
            }
            if c.contains(gadget.copy) {
                assert!(c.contains(gadget.vertex) && with_u);
            }
        }
    }

    #[test]
    fn search_drivers() {
        let asg = sat_search_via_decision(&f1(), brute_force_satisfiable).unwrap().unwrap();
        assert_eq!(asg.values(), &[true, true, false]);
        assert_eq!(sat_search_via_decision(&f1(), wsa_sat_oracle).unwrap(), Some(asg));

        let unsat = CnfFormula::from_dimacs(1, &[vec![1], vec![-1]]).unwrap();
        assert_eq!(sat_search_via_decision(&unsat, brute_force_satisfiable).unwrap(), None);
        let unit = CnfFormula::from_dimacs(1, &[vec![1]]).unwrap();
        assert_eq!(sat_search_via_decision(&unit, brute_force_satisfiable).unwrap().unwrap().values(), &[true]);

        let k3 = Graph::complete(3);
        let c = vc_search_via_decision(&k3, 2, has_cover).unwrap().unwrap();
        assert_eq!(c, VertexSet([1, 2].into_iter().collect()));
        assert_eq!(vc_search_via_decision(&k3, 2, wsa_cover_oracle).unwrap(), Some(c));
        assert_eq!(vc_search_via_decision(&k3, 1, has_cover).unwrap(), None);
        let empty = Graph::new(2, vec![]).unwrap();
        assert_eq!(vc_search_via_decision(&empty, 0, has_cover).unwrap(), Some(VertexSet::default()));
    }

    #[test]
    fn lying_oracle_is_detected() {
        let unsat = CnfFormula::from_dimacs(1, &[vec![1], vec![-1]]).unwrap();
        assert_eq!(sat_search_via_decision(&unsat, |_| true), Err(Error::InconsistentOracle));
        assert!(vc_search_via_decision(&Graph::complete(3), 1, |_, _| true).is_err());
    }
}
