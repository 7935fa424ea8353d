//! Solution encodings and the distances used to compare them.
//!
//! A partition witness of an `n`-word sentence is the `n-1` bit string whose
//! bit `p` is set when a phrase boundary sits at in-between position `p`.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{check_alignment, Alignment, Link, Span, WsaInstance};

/// A string over `{0,1}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn zeros(n: usize) -> Self {
        BitString(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        BitString(vec![true; n])
    }

    /// The low `len` bits of `value`, most significant first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        BitString((0..len).rev().map(|b| value >> b & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn bits_mut(&mut self) -> &mut Vec<bool> {
        &mut self.0
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = !self.0[i];
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BitString {
        BitString(self.0[range].to_vec())
    }

    pub fn concat(&self, other: &BitString) -> BitString {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        BitString(v)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(v: Vec<bool>) -> Self {
        BitString(v)
    }
}

impl From<BitString> for String {
    fn from(b: BitString) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BitString {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::WrongEncoding(format!("unexpected character {other:?} in bit string"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

/// Boundary bitstring of an `n`-word sentence split into `spans`.
pub fn boundary_bits(n: usize, spans: &[Span]) -> BitString {
    let mut bits = vec![false; n.saturating_sub(1)];
    for s in spans {
        if s.j < n {
            bits[s.j - 1] = true;
        }
    }
    BitString(bits)
}

/// Phrase-boundary string of the source sentence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartitionWitness {
    pub bits: BitString,
}

impl PartitionWitness {
    pub fn new(bits: BitString) -> Self {
        PartitionWitness { bits }
    }

    /// Length of the sentence the witness partitions.
    pub fn sentence_len(&self) -> usize {
        self.bits.len() + 1
    }
}

impl fmt::Display for PartitionWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.bits.fmt(f)
    }
}

/// Boundary strings of both sentences, plus an optional phrase permutation
/// giving, for each e-phrase in order, the index of its f-phrase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DualWitness {
    pub e_bits: BitString,
    pub f_bits: BitString,
    pub permutation: Option<Vec<usize>>,
}

impl DualWitness {
    /// The string distances are measured on: `e_bits ∥ f_bits`.
    pub fn concatenated(&self) -> BitString {
        self.e_bits.concat(&self.f_bits)
    }
}

/// Either witness form a solver can report.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Witness {
    Partition(PartitionWitness),
    Dual(DualWitness),
}

impl Witness {
    pub fn bits(&self) -> BitString {
        match self {
            Witness::Partition(p) => p.bits.clone(),
            Witness::Dual(d) => d.concatenated(),
        }
    }

    pub fn as_partition(&self) -> Option<&PartitionWitness> {
        match self {
            Witness::Partition(p) => Some(p),
            Witness::Dual(_) => None,
        }
    }
}

/// `|f| x |e|` boolean matrix; cell `(k, i)` is set when f-word `k` and
/// e-word `i` (both 1-based) share a link.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixWitness {
    pub rows: usize,
    pub cols: usize,
    cells: Vec<bool>,
}

impl MatrixWitness {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixWitness { rows, cols, cells: vec![false; rows * cols] }
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.cells[(row - 1) * self.cols + (col - 1)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.cells[(row - 1) * self.cols + (col - 1)] = value;
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    /// Row-major flattening.
    pub fn as_bits(&self) -> BitString {
        BitString(self.cells.clone())
    }
}

fn checked(a: &Alignment, inst: &WsaInstance) -> Result<()> {
    check_alignment(inst, a).map_err(Error::InvalidAlignment)
}

/// Encodes a phrase-to-word alignment by its e-side phrase boundaries.
pub fn encode_partition(a: &Alignment, inst: &WsaInstance) -> Result<PartitionWitness> {
    checked(a, inst)?;
    if let Some(l) = a.links.iter().find(|l| l.f.len() != 1) {
        return Err(Error::WrongEncoding(format!(
            "f-phrase {} spans {} words; partition witnesses need single-word f-phrases",
            l.f,
            l.f.len()
        )));
    }
    Ok(PartitionWitness::new(boundary_bits(inst.e().len(), &a.e_spans())))
}

/// Spans delimited by the 1-bits of `w`.
pub fn decode_partition(w: &PartitionWitness) -> Vec<Span> {
    decode_bits(&w.bits)
}

pub(crate) fn decode_bits(bits: &BitString) -> Vec<Span> {
    let n = bits.len() + 1;
    let mut spans = Vec::with_capacity(bits.count_ones() + 1);
    let mut start = 0;
    for (p, &b) in bits.bits().iter().enumerate() {
        if b {
            spans.push(Span::new(start, p + 1));
            start = p + 1;
        }
    }
    spans.push(Span::new(start, n));
    spans
}

pub fn encode_dual(a: &Alignment, inst: &WsaInstance, with_permutation: bool) -> Result<DualWitness> {
    checked(a, inst)?;
    let e_spans = a.e_spans();
    let f_spans = a.f_spans();
    let permutation = with_permutation.then(|| {
        let mut by_e: Vec<Link> = a.links.clone();
        by_e.sort_by_key(|l| l.e);
        by_e.iter()
            .map(|l| f_spans.binary_search(&l.f).expect("f span present") + 1)
            .collect()
    });
    Ok(DualWitness {
        e_bits: boundary_bits(inst.e().len(), &e_spans),
        f_bits: boundary_bits(inst.f().len(), &f_spans),
        permutation,
    })
}

pub fn encode_matrix(a: &Alignment, inst: &WsaInstance) -> Result<MatrixWitness> {
    checked(a, inst)?;
    let mut m = MatrixWitness::zeros(inst.f().len(), inst.e().len());
    for l in &a.links {
        for k in l.f.words() {
            for i in l.e.words() {
                m.set(k, i, true);
            }
        }
    }
    Ok(m)
}

/// Number of positions at which two equal-length strings differ.
pub fn hamming<T: PartialEq>(x: &[T], y: &[T]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    Ok(x.iter().zip(y).filter(|(a, b)| a != b).count())
}

/// Minimum number of insertions, deletions and replacements turning `x` into
/// `y`. With `allow_transpositions`, swapping two adjacent symbols also costs
/// one (unrestricted Damerau–Levenshtein, which remains a metric).
pub fn edit_distance<T: Eq + Hash + Clone>(x: &[T], y: &[T], allow_transpositions: bool) -> usize {
    if allow_transpositions {
        damerau(x, y)
    } else {
        levenshtein(x, y)
    }
}

fn levenshtein<T: PartialEq>(x: &[T], y: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=y.len()).collect();
    let mut cur = vec![0; y.len() + 1];
    for (i, a) in x.iter().enumerate() {
        cur[0] = i + 1;
        for (j, b) in y.iter().enumerate() {
            let sub = prev[j] + usize::from(a != b);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[y.len()]
}

// Lowrance–Wagner recurrence.
fn damerau<T: Eq + Hash + Clone>(x: &[T], y: &[T]) -> usize {
    let (n, m) = (x.len(), y.len());
    let inf = n + m;
    let mut d = vec![vec![0usize; m + 2]; n + 2];
    d[0][0] = inf;
    for i in 0..=n {
        d[i + 1][0] = inf;
        d[i + 1][1] = i;
    }
    for j in 0..=m {
        d[0][j + 1] = inf;
        d[1][j + 1] = j;
    }
    let mut last_row: HashMap<T, usize> = HashMap::new();
    for i in 1..=n {
        let mut last_col = 0;
        for j in 1..=m {
            let i1 = last_row.get(&y[j - 1]).copied().unwrap_or(0);
            let j1 = last_col;
            let cost = if x[i - 1] == y[j - 1] {
                last_col = j;
                0
            } else {
                1
            };
            d[i + 1][j + 1] = (d[i][j] + cost)
                .min(d[i + 1][j] + 1)
                .min(d[i][j + 1] + 1)
                .min(d[i1][j1] + (i - i1 - 1) + 1 + (j - j1 - 1));
        }
        last_row.insert(x[i - 1].clone(), i);
    }
    d[n + 1][m + 1]
}

/// The alignment pairing the first `|f|-1` words of e with the first `|f|-1`
/// words of f and the rest of e with the last f word, together with the
/// reported guarantee `|e||f| - 2|f|` (saturating at zero).
pub fn trivial_matrix_baseline(inst: &WsaInstance) -> Result<(MatrixWitness, usize)> {
    let (ne, nf) = (inst.e().len(), inst.f().len());
    if nf == 0 || nf > ne {
        return Err(Error::TargetLongerThanSource { e_len: ne, f_len: nf });
    }
    Ok((encode_matrix(&trivial_alignment(ne, nf), inst)?, (ne * nf).saturating_sub(2 * nf)))
}

pub fn trivial_alignment(e_len: usize, f_len: usize) -> Alignment {
    let mut links: Vec<Link> = (1..f_len).map(|k| Link::new(Span::single(k), Span::single(k))).collect();
    links.push(Link::new(Span::new(f_len - 1, e_len), Span::single(f_len)));
    Alignment::new(links)
}

/// Uniformly random `n`-bit string with exactly `ones` ones.
pub fn random_partition_baseline(n: usize, ones: usize, seed: u64) -> Result<PartitionWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_bits_with_ones(n, ones, &mut rng).map(PartitionWitness::new)
}

pub(crate) fn random_bits_with_ones<R: rand::Rng>(n: usize, ones: usize, rng: &mut R) -> Result<BitString> {
    if ones > n {
        return Err(Error::PopcountMismatch { expected: n, found: ones });
    }
    let mut bits = vec![false; n];
    for i in sample(rng, n, ones) {
        bits[i] = true;
    }
    Ok(BitString(bits))
}
