//! Exact optimisation and decision procedures.
//!
//! [`solve_exact`] enumerates partition pairs and is bounded by the partition
//! guard. [`decide_weight_one`] and [`solve_pwsa`] instead run a memoised
//! search over (e-position, covered f-words) states, which scales to the
//! sizes produced by the reductions.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matching::{lex_smallest_perfect_matching, max_weight_perfect_matching};
use crate::model::{enumerate_partitions, Alignment, Link, Span, Weight, WsaInstance};
use crate::witness::{boundary_bits, decode_partition, BitString, DualWitness, PartitionWitness, Witness};

/// Phrase counts up to this size use exhaustive bijection search.
pub const BRUTE_FORCE_PHRASES: usize = 9;

/// Widest target sentence the coverage-mask search accepts.
pub const MASK_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    /// An alignment of positive weight was found.
    Found,
    /// Every alignment (of the searched kind) has weight 0.
    NoPositiveAlignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub best_weight: Weight,
    pub best_alignment: Option<Alignment>,
    pub canonical_witness: Option<Witness>,
    pub status: SolveStatus,
}

impl SolveResult {
    fn none() -> Self {
        SolveResult {
            best_weight: Weight::zero(),
            best_alignment: None,
            canonical_witness: None,
            status: SolveStatus::NoPositiveAlignment,
        }
    }

    fn found(inst: &WsaInstance, weight: Weight, alignment: Alignment) -> Self {
        let witness = canonical_witness(inst, &alignment);
        SolveResult {
            best_weight: weight,
            best_alignment: Some(alignment.canonical()),
            canonical_witness: Some(witness),
            status: SolveStatus::Found,
        }
    }

    fn empty() -> Self {
        SolveResult {
            best_weight: Weight::one(),
            best_alignment: Some(Alignment::default()),
            canonical_witness: None,
            status: SolveStatus::Found,
        }
    }
}

/// Partition witness when every f-phrase is one word, dual witness otherwise.
pub fn canonical_witness(inst: &WsaInstance, a: &Alignment) -> Witness {
    let e_bits = boundary_bits(inst.e().len(), &a.e_spans());
    if a.links.iter().all(|l| l.f.len() == 1) {
        Witness::Partition(PartitionWitness::new(e_bits))
    } else {
        let f_spans = a.f_spans();
        let mut by_e = a.links.clone();
        by_e.sort_by_key(|l| l.e);
        let permutation = by_e
            .iter()
            .map(|l| f_spans.binary_search(&l.f).expect("f span present") + 1)
            .collect();
        Witness::Dual(DualWitness {
            e_bits,
            f_bits: boundary_bits(inst.f().len(), &f_spans),
            permutation: Some(permutation),
        })
    }
}

fn check_empty(inst: &WsaInstance) -> Result<bool> {
    match (inst.e().is_empty(), inst.f().is_empty()) {
        (true, true) => Ok(true),
        (false, false) => Ok(false),
        _ => Err(Error::EmptyMismatch),
    }
}

/// Best bijection between fixed phrase lists. Returns the weight and links of
/// the lexicographically smallest optimal bijection (exact up to
/// [`BRUTE_FORCE_PHRASES`] phrases), or `None` when every bijection weighs 0.
fn best_bijection(inst: &WsaInstance, e: &[Span], f: &[Span]) -> Option<(Weight, Vec<Link>)> {
    let k = e.len();
    let phi = inst.phi();
    if phi.is_zero_one() {
        let adj: Vec<Vec<usize>> = e
            .iter()
            .map(|&es| (0..k).filter(|&b| phi.is_one(&Link::new(es, f[b]))).collect())
            .collect();
        let m = lex_smallest_perfect_matching(&adj, k)?;
        return Some((Weight::one(), m.iter().enumerate().map(|(a, &b)| Link::new(e[a], f[b])).collect()));
    }

    let matrix: Vec<Vec<Option<Weight>>> = e
        .iter()
        .map(|&es| {
            f.iter()
                .map(|&fs| phi.get(&Link::new(es, fs)).filter(|w| !w.is_zero()).cloned())
                .collect()
        })
        .collect();

    let perm = if k <= BRUTE_FORCE_PHRASES {
        let mut best: Option<(Weight, Vec<usize>)> = None;
        let mut cur = Vec::with_capacity(k);
        let mut used = vec![false; k];
        bijection_search(&matrix, 0, Weight::one(), &mut cur, &mut used, &mut best);
        best?.1
    } else {
        let logs: Vec<Vec<Option<f64>>> = matrix
            .iter()
            .map(|row| row.iter().map(|w| w.as_ref().map(Weight::ln)).collect())
            .collect();
        max_weight_perfect_matching(&logs)?
    };
    let weight = perm
        .iter()
        .enumerate()
        .map(|(a, &b)| matrix[a][b].clone().expect("positive edge"))
        .product();
    Some((weight, perm.iter().enumerate().map(|(a, &b)| Link::new(e[a], f[b])).collect()))
}

fn bijection_search(
    matrix: &[Vec<Option<Weight>>],
    row: usize,
    acc: Weight,
    cur: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<(Weight, Vec<usize>)>,
) {
    if row == matrix.len() {
        if best.as_ref().is_none_or(|(w, _)| acc > *w) {
            *best = Some((acc, cur.clone()));
        }
        return;
    }
    for (col, w) in matrix[row].iter().enumerate() {
        let Some(w) = w else { continue };
        if used[col] {
            continue;
        }
        used[col] = true;
        cur.push(col);
        bijection_search(matrix, row + 1, &acc * w, cur, used, best);
        cur.pop();
        used[col] = false;
    }
}

/// Maximum-weight alignment by enumeration of all partition pairs with equal
/// phrase counts. Ties go to the lexicographically smallest `e_bits ∥ f_bits`,
/// then to the smallest link set.
pub fn solve_exact(inst: &WsaInstance, guard: usize) -> Result<SolveResult> {
    if check_empty(inst)? {
        return Ok(SolveResult::empty());
    }
    let (ne, nf) = (inst.e().len(), inst.f().len());
    for len in [ne, nf] {
        if len > guard {
            return Err(Error::SizeGuard { len, guard });
        }
    }
    let zero_one = inst.phi().is_zero_one();
    let mut best: Option<(Weight, Vec<Link>)> = None;
    'outer: for ep in enumerate_partitions(ne, None, guard)? {
        if ep.len() > nf {
            continue;
        }
        for fp in enumerate_partitions(nf, Some(ep.len()), guard)? {
            if let Some((w, links)) = best_bijection(inst, &ep, &fp) {
                if best.as_ref().is_none_or(|(b, _)| w > *b) {
                    best = Some((w, links));
                    if zero_one {
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok(match best {
        Some((w, links)) => SolveResult::found(inst, w, Alignment::new(links)),
        None => SolveResult::none(),
    })
}

/// `(e_end, f_mask, weight, single f word)`.
type StartEntry = (usize, u64, Weight, Option<usize>);

/// Positive links grouped by e-start, with the pruning tables the coverage
/// search needs.
struct CoverageIndex {
    n_e: usize,
    full: u64,
    by_start: Vec<Vec<StartEntry>>,
    /// Lower-indexed interchangeable f words that must already be covered.
    prereq: Vec<u64>,
    /// f words that can no longer be covered once the search reaches position i.
    dead: Vec<u64>,
}

impl CoverageIndex {
    fn build(inst: &WsaInstance, single_word_only: bool) -> Result<Self> {
        let (ne, nf) = (inst.e().len(), inst.f().len());
        if nf > MASK_LIMIT {
            return Err(Error::SizeGuard { len: nf, guard: MASK_LIMIT });
        }
        let full = if nf == 64 { u64::MAX } else { (1u64 << nf) - 1 };
        let mut by_start = vec![Vec::new(); ne];
        let mut last_start: Vec<Option<usize>> = vec![None; nf];
        let mut multi_word = vec![false; nf];
        let mut signature: Vec<Vec<(Span, Weight)>> = vec![Vec::new(); nf];
        for (l, w) in inst.phi().positive_links() {
            if single_word_only && l.f.len() != 1 {
                continue;
            }
            let fmask = (l.f.i..l.f.j).fold(0u64, |m, k| m | 1 << k);
            let single = (l.f.len() == 1).then_some(l.f.i);
            by_start[l.e.i].push((l.e.j, fmask, w.clone(), single));
            for k in l.f.i..l.f.j {
                last_start[k] = Some(last_start[k].map_or(l.e.i, |s: usize| s.max(l.e.i)));
                if l.f.len() > 1 {
                    multi_word[k] = true;
                } else {
                    signature[k].push((l.e, w.clone()));
                }
            }
        }
        // Words with identical single-word link sets are interchangeable: the
        // search only ever covers the lowest uncovered member of a class.
        let mut prereq = vec![0u64; nf];
        let mut classes: HashMap<&[(Span, Weight)], u64> = HashMap::new();
        for k in 0..nf {
            if multi_word[k] || signature[k].is_empty() {
                continue;
            }
            let members = classes.entry(signature[k].as_slice()).or_insert(0);
            prereq[k] = *members;
            *members |= 1 << k;
        }
        let dead = (0..=ne)
            .map(|i| {
                (0..nf)
                    .filter(|&k| last_start[k].is_none_or(|s| s < i))
                    .fold(0u64, |m, k| m | 1 << k)
            })
            .collect();
        // Longer phrases first; ties by f word.
        for links in &mut by_start {
            links.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        }
        Ok(CoverageIndex { n_e: ne, full, by_start, prereq, dead })
    }

    fn allowed(&self, cover: u64, fmask: u64, single: Option<usize>) -> bool {
        fmask & cover == 0 && single.is_none_or(|k| self.prereq[k] & !cover == 0)
    }

    fn alive(&self, i: usize, cover: u64) -> bool {
        self.dead[i] & !cover == 0
    }

    fn reachable(&self, i: usize, cover: u64, memo: &mut HashMap<(usize, u64), bool>) -> bool {
        if i == self.n_e {
            return cover == self.full;
        }
        if !self.alive(i, cover) {
            return false;
        }
        if let Some(&r) = memo.get(&(i, cover)) {
            return r;
        }
        let r = self.by_start[i].iter().any(|&(j, fm, _, single)| {
            self.allowed(cover, fm, single) && self.reachable(j, cover | fm, memo)
        });
        memo.insert((i, cover), r);
        r
    }

    fn best(&self, i: usize, cover: u64, memo: &mut HashMap<(usize, u64), Option<Weight>>) -> Option<Weight> {
        if i == self.n_e {
            return (cover == self.full).then(Weight::one);
        }
        if !self.alive(i, cover) {
            return None;
        }
        if let Some(r) = memo.get(&(i, cover)) {
            return r.clone();
        }
        let mut best: Option<Weight> = None;
        for (j, fm, w, single) in &self.by_start[i] {
            if !self.allowed(cover, *fm, *single) {
                continue;
            }
            if let Some(rest) = self.best(*j, cover | fm, memo) {
                let cand = w * &rest;
                if best.as_ref().is_none_or(|b| cand > *b) {
                    best = Some(cand);
                }
            }
        }
        memo.insert((i, cover), best.clone());
        best
    }

    /// Lexicographically smallest boundary suffix for positions `i+1..n_e-1`
    /// (most significant bit first) among completions from `(i, cover)`.
    fn lexmin(&self, i: usize, cover: u64, memo: &mut HashMap<(usize, u64), Option<u64>>) -> Option<u64> {
        let n = self.n_e;
        if i == n {
            return (cover == self.full).then_some(0);
        }
        if !self.alive(i, cover) {
            return None;
        }
        if let Some(&r) = memo.get(&(i, cover)) {
            return r;
        }
        let mut result = None;
        let links = &self.by_start[i];
        let mut idx = 0;
        // by_start is sorted by descending phrase end; a longer first phrase
        // always gives a smaller string.
        while idx < links.len() && result.is_none() {
            let j = links[idx].0;
            let mut best: Option<u64> = None;
            while idx < links.len() && links[idx].0 == j {
                let (_, fm, _, single) = links[idx];
                idx += 1;
                if !self.allowed(cover, fm, single) {
                    continue;
                }
                if let Some(rest) = self.lexmin(j, cover | fm, memo) {
                    best = Some(best.map_or(rest, |b| b.min(rest)));
                }
            }
            result = best.map(|rest| if j == n { 0 } else { (1u64 << (n - 1 - j)) | rest });
        }
        memo.insert((i, cover), result);
        result
    }
}

/// True iff some alignment has weight at least 1.
pub fn decide_weight_one(inst: &WsaInstance) -> Result<bool> {
    if check_empty(inst)? {
        return Ok(true);
    }
    let index = CoverageIndex::build(inst, false)?;
    if inst.phi().is_zero_one() {
        Ok(index.reachable(0, 0, &mut HashMap::new()))
    } else {
        Ok(index.best(0, 0, &mut HashMap::new()).is_some_and(|w| w >= Weight::one()))
    }
}

/// Maximum alignment weight computed by the coverage search; agrees with
/// [`solve_exact`] but without the partition guard.
pub fn max_weight(inst: &WsaInstance) -> Result<Weight> {
    if check_empty(inst)? {
        return Ok(Weight::one());
    }
    let index = CoverageIndex::build(inst, false)?;
    Ok(index.best(0, 0, &mut HashMap::new()).unwrap_or_else(Weight::zero))
}

/// Phrase-to-word solver: f stays split into single words and the answer is
/// the lexicographically smallest e-partition admitting a weight-1 perfect
/// matching.
pub fn solve_pwsa(inst: &WsaInstance) -> Result<SolveResult> {
    if !inst.phi().is_zero_one() {
        return Err(Error::NotZeroOne);
    }
    let (ne, nf) = (inst.e().len(), inst.f().len());
    if nf > ne {
        return Err(Error::TargetLongerThanSource { e_len: ne, f_len: nf });
    }
    if check_empty(inst)? {
        return Ok(SolveResult::empty());
    }
    if ne > MASK_LIMIT {
        return Err(Error::SizeGuard { len: ne, guard: MASK_LIMIT });
    }
    let index = CoverageIndex::build(inst, true)?;
    let Some(bits) = index.lexmin(0, 0, &mut HashMap::new()) else {
        return Ok(SolveResult::none());
    };
    let witness = PartitionWitness::new(BitString::from_u64(bits, ne - 1));
    let phrases = decode_partition(&witness);
    let a = pwsa_alignment(inst, &phrases).expect("search only returns matchable partitions");
    Ok(SolveResult::found(inst, Weight::one(), a))
}

/// Lexicographically smallest weight-1 perfect matching of e-phrases to
/// single f words.
pub fn pwsa_alignment(inst: &WsaInstance, phrases: &[Span]) -> Option<Alignment> {
    let nf = inst.f().len();
    let adj: Vec<Vec<usize>> = phrases
        .iter()
        .map(|&p| (1..=nf).filter(|&k| inst.phi().is_one(&Link::new(p, Span::single(k)))).map(|k| k - 1).collect())
        .collect();
    let m = lex_smallest_perfect_matching(&adj, nf)?;
    Some(Alignment::new(
        m.iter().enumerate().map(|(a, &k)| Link::new(phrases[a], Span::single(k + 1))).collect(),
    ))
}

/// Order-preserving alignment of maximum weight by dynamic programming over
/// prefix pairs, `O(|e|^2 |f|^2)`.
pub fn solve_monotone_dp(inst: &WsaInstance) -> Result<SolveResult> {
    let (ne, nf) = (inst.e().len(), inst.f().len());
    match (ne, nf) {
        (0, 0) => return Ok(SolveResult::empty()),
        (0, _) | (_, 0) => return Ok(SolveResult::none()),
        _ => {}
    }
    // positive links by their right end points
    let mut ending: HashMap<(usize, usize), Vec<(Link, &Weight)>> = HashMap::new();
    for (l, w) in inst.phi().positive_links() {
        ending.entry((l.e.j, l.f.j)).or_default().push((*l, w));
    }
    type Cell = Option<(Weight, Option<Link>)>;
    let mut best: Vec<Vec<Cell>> = vec![vec![None; nf + 1]; ne + 1];
    best[0][0] = Some((Weight::one(), None));
    for i in 1..=ne {
        for k in 1..=nf {
            let Some(links) = ending.get(&(i, k)) else { continue };
            let mut cell: Option<(Weight, Option<Link>)> = None;
            for (l, w) in links {
                if let Some((prev, _)) = &best[l.e.i][l.f.i] {
                    let cand = prev * w;
                    if cell.as_ref().is_none_or(|(b, _)| cand > *b) {
                        cell = Some((cand, Some(*l)));
                    }
                }
            }
            best[i][k] = cell;
        }
    }
    let Some((weight, _)) = best[ne][nf].clone() else {
        return Ok(SolveResult::none());
    };
    let mut links = Vec::new();
    let (mut i, mut k) = (ne, nf);
    while let Some((_, Some(l))) = &best[i][k] {
        links.push(*l);
        (i, k) = (l.e.i, l.f.i);
    }
    links.reverse();
    Ok(SolveResult::found(inst, weight, Alignment::new(links)))
}
