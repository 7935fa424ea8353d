//! Sentences, phrases, link weights and alignments.
//!
//! Word positions are 1-based; in-between positions are 0-based, so the span
//! `[i, j]` covers words `i+1..=j`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on sentence length for partition enumeration.
pub const DEFAULT_GUARD: usize = 20;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Sentence(Vec<String>);

impl Sentence {
    pub fn new<I, S>(tokens: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Sentence(tokens.into_iter().map(Into::into).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    /// Token at 1-based word position `pos`.
    pub fn word(&self, pos: usize) -> Option<&str> {
        pos.checked_sub(1)
            .and_then(|p| self.0.get(p))
            .map(String::as_str)
    }

    pub fn span_text(&self, span: Span) -> String {
        self.0[span.i..span.j].join(" ")
    }
}

/// A phrase `[i, j]` between in-between positions `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub i: usize,
    pub j: usize,
}

impl Span {
    /// # Panics
    ///
    /// If `i >= j`.
    pub fn new(i: usize, j: usize) -> Self {
        assert!(i < j, "empty or reversed span [{i},{j}]");
        Span { i, j }
    }

    pub fn checked(i: usize, j: usize, len: usize) -> Result<Self> {
        let span = Span { i, j };
        if span.fits(len) {
            Ok(span)
        } else {
            Err(Error::InvalidSpan { span, len })
        }
    }

    pub fn single(word: usize) -> Self {
        Span::new(word - 1, word)
    }

    pub fn fits(&self, len: usize) -> bool {
        self.i < self.j && self.j <= len
    }

    pub fn len(&self) -> usize {
        self.j - self.i
    }

    pub fn is_empty(&self) -> bool {
        self.i >= self.j
    }

    /// 1-based word positions covered by the span.
    pub fn words(&self) -> std::ops::RangeInclusive<usize> {
        self.i + 1..=self.j
    }

    pub fn contains_span(&self, other: Span) -> bool {
        self.i <= other.i && other.j <= self.j
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{}]", self.i, self.j)
    }
}

/// An aligned pair of phrases. Ordered by `(e, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Link {
    pub e: Span,
    pub f: Span,
}

impl Link {
    pub fn new(e: Span, f: Span) -> Self {
        Link { e, f }
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.e, self.f)
    }
}

/// Exact nonnegative rational link weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Ratio<BigUint>);

impl Weight {
    pub fn zero() -> Self {
        Weight(Ratio::zero())
    }

    pub fn one() -> Self {
        Weight(Ratio::one())
    }

    pub fn from_integer(n: u64) -> Self {
        Weight(Ratio::from_integer(BigUint::from(n)))
    }

    /// # Panics
    ///
    /// If `den == 0`.
    pub fn ratio(num: u64, den: u64) -> Self {
        Weight(Ratio::new(BigUint::from(num), BigUint::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn as_ratio(&self) -> &Ratio<BigUint> {
        &self.0
    }

    /// Natural logarithm, `-inf` for zero.
    pub fn ln(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let num = self.0.numer().to_f64().unwrap_or(f64::MAX);
        let den = self.0.denom().to_f64().unwrap_or(f64::MAX);
        num.ln() - den.ln()
    }
}

impl Mul for Weight {
    type Output = Weight;
    fn mul(self, rhs: Weight) -> Weight {
        Weight(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Weight> for &'a Weight {
    type Output = Weight;
    fn mul(self, rhs: &'a Weight) -> Weight {
        Weight(&self.0 * &rhs.0)
    }
}

impl std::iter::Product for Weight {
    fn product<I: Iterator<Item = Weight>>(iter: I) -> Self {
        iter.fold(Weight::one(), Mul::mul)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for Weight {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::WrongEncoding(format!("weight {s:?} is not a nonnegative rational"));
        let (num, den) = match s.trim().split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: BigUint = num.parse().map_err(|_| bad())?;
        let den: BigUint = den.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        Ok(Weight(Ratio::new(num, den)))
    }
}

/// Sparse link-weight function. Absent links weigh 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightFn {
    entries: BTreeMap<Link, Weight>,
    zero_one: bool,
}

impl WeightFn {
    pub fn new() -> Self {
        WeightFn {
            entries: BTreeMap::new(),
            zero_one: true,
        }
    }

    pub fn insert(&mut self, link: Link, weight: Weight) {
        self.entries.insert(link, weight);
        self.zero_one = self.entries.values().all(|w| w.is_zero() || w.is_one());
    }

    /// Shorthand for inserting a weight-1 link.
    pub fn set_one(&mut self, link: Link) {
        self.entries.insert(link, Weight::one());
        // inserting a one cannot break the flag unless the entry replaced was
        // the only offender
        if !self.zero_one {
            self.zero_one = self.entries.values().all(|w| w.is_zero() || w.is_one());
        }
    }

    pub fn remove(&mut self, link: &Link) -> Option<Weight> {
        let old = self.entries.remove(link);
        self.zero_one = self.entries.values().all(|w| w.is_zero() || w.is_one());
        old
    }

    pub fn get(&self, link: &Link) -> Option<&Weight> {
        self.entries.get(link)
    }

    pub fn weight(&self, link: &Link) -> Weight {
        self.entries.get(link).cloned().unwrap_or_else(Weight::zero)
    }

    pub fn is_one(&self, link: &Link) -> bool {
        self.entries.get(link).is_some_and(Weight::is_one)
    }

    pub fn is_zero_one(&self) -> bool {
        self.zero_one
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Link, &Weight)> {
        self.entries.iter()
    }

    pub fn positive_links(&self) -> impl Iterator<Item = (&Link, &Weight)> {
        self.entries.iter().filter(|(_, w)| !w.is_zero())
    }

    pub fn retain(&mut self, mut keep: impl FnMut(&Link, &Weight) -> bool) {
        self.entries.retain(|l, w| keep(l, w));
        self.zero_one = self.entries.values().all(|w| w.is_zero() || w.is_one());
    }
}

impl FromIterator<(Link, Weight)> for WeightFn {
    fn from_iter<T: IntoIterator<Item = (Link, Weight)>>(iter: T) -> Self {
        let mut phi = WeightFn::new();
        for (l, w) in iter {
            phi.entries.insert(l, w);
        }
        phi.zero_one = phi.entries.values().all(|w| w.is_zero() || w.is_one());
        phi
    }
}

/// Two sentences and a weight function over their phrase pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WsaInstance {
    e: Sentence,
    f: Sentence,
    phi: WeightFn,
}

impl WsaInstance {
    pub fn new(e: Sentence, f: Sentence, phi: WeightFn) -> Result<Self> {
        for link in phi.entries.keys() {
            if !link.e.fits(e.len()) {
                return Err(Error::InvalidSpan { span: link.e, len: e.len() });
            }
            if !link.f.fits(f.len()) {
                return Err(Error::InvalidSpan { span: link.f, len: f.len() });
            }
        }
        Ok(WsaInstance { e, f, phi })
    }

    pub fn e(&self) -> &Sentence {
        &self.e
    }

    pub fn f(&self) -> &Sentence {
        &self.f
    }

    pub fn phi(&self) -> &WeightFn {
        &self.phi
    }

    pub fn into_parts(self) -> (Sentence, Sentence, WeightFn) {
        (self.e, self.f, self.phi)
    }

    /// True when every positive link pairs an e-phrase with a single f word.
    pub fn is_phrase_to_word(&self) -> bool {
        self.phi.positive_links().all(|(l, _)| l.f.len() == 1)
    }
}

/// A set of links, validated against an instance on use.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alignment {
    pub links: Vec<Link>,
}

impl Alignment {
    pub fn new(links: Vec<Link>) -> Self {
        Alignment { links }
    }

    /// Links sorted by `(span_e, span_f)`.
    pub fn sorted(&self) -> Vec<Link> {
        let mut v = self.links.clone();
        v.sort();
        v
    }

    pub fn canonical(mut self) -> Self {
        self.links.sort();
        self
    }

    /// e-side spans in sentence order.
    pub fn e_spans(&self) -> Vec<Span> {
        let mut v: Vec<Span> = self.links.iter().map(|l| l.e).collect();
        v.sort();
        v
    }

    pub fn f_spans(&self) -> Vec<Span> {
        let mut v: Vec<Span> = self.links.iter().map(|l| l.f).collect();
        v.sort();
        v
    }

    /// True when both sides list their links in the same left-to-right order.
    pub fn is_monotone(&self) -> bool {
        let mut v = self.links.clone();
        v.sort_by_key(|l| l.e);
        v.windows(2).all(|w| w[0].f < w[1].f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    E,
    F,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::E => f.write_str("e"),
            Side::F => f.write_str("f"),
        }
    }
}

/// The first reason an alignment fails to be a phrase bijection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    SpanOutOfRange { side: Side, span: Span },
    Uncovered { side: Side, word: usize },
    DoublyCovered { side: Side, word: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SpanOutOfRange { side, span } => {
                write!(f, "span {span} is out of range for sentence {side}")
            }
            Violation::Uncovered { side, word } => write!(f, "word {word} of {side} is uncovered"),
            Violation::DoublyCovered { side, word } => {
                write!(f, "word {word} of {side} is covered more than once")
            }
        }
    }
}

fn coverage_violation(side: Side, len: usize, spans: impl Iterator<Item = Span>) -> Option<Violation> {
    let mut count = vec![0u32; len + 1];
    for s in spans {
        for w in s.words() {
            count[w] += 1;
        }
    }
    (1..=len).find_map(|w| match count[w] {
        0 => Some(Violation::Uncovered { side, word: w }),
        1 => None,
        _ => Some(Violation::DoublyCovered { side, word: w }),
    })
}

/// Checks both partition invariants and reports the first violation found,
/// scanning e before f and word positions in ascending order.
pub fn check_alignment(inst: &WsaInstance, a: &Alignment) -> std::result::Result<(), Violation> {
    for l in &a.links {
        if !l.e.fits(inst.e.len()) {
            return Err(Violation::SpanOutOfRange { side: Side::E, span: l.e });
        }
        if !l.f.fits(inst.f.len()) {
            return Err(Violation::SpanOutOfRange { side: Side::F, span: l.f });
        }
    }
    if let Some(v) = coverage_violation(Side::E, inst.e.len(), a.links.iter().map(|l| l.e)) {
        return Err(v);
    }
    if let Some(v) = coverage_violation(Side::F, inst.f.len(), a.links.iter().map(|l| l.f)) {
        return Err(v);
    }
    Ok(())
}

pub fn is_valid_alignment(inst: &WsaInstance, a: &Alignment) -> bool {
    check_alignment(inst, a).is_ok()
}

/// Product of link weights; the empty alignment weighs 1.
pub fn alignment_weight(inst: &WsaInstance, a: &Alignment) -> Result<Weight> {
    check_alignment(inst, a).map_err(Error::InvalidAlignment)?;
    Ok(a.links.iter().map(|l| inst.phi.weight(l)).product())
}

/// Token used for padding words.
pub fn null_token(k: usize) -> String {
    format!("NULL_{k}")
}

/// Appends `ceil(|e|/2)` null words to `f`. Every e-phrase may link to any
/// phrase lying wholly inside the null words with weight 1; f-spans mixing
/// null and real words stay at the default weight 0.
pub fn pad_to_bijective(e: Sentence, f: Sentence, phi: WeightFn) -> Result<WsaInstance> {
    if f.len() >= e.len() {
        return Err(Error::NoPaddingNeeded { e_len: e.len(), f_len: f.len() });
    }
    let original = f.len();
    let nulls = e.len().div_ceil(2);
    let mut tokens = f.0;
    tokens.extend((1..=nulls).map(null_token));
    let f = Sentence(tokens);

    let mut phi = phi;
    for ei in 0..e.len() {
        for ej in ei + 1..=e.len() {
            for fk in original..f.len() {
                for fl in fk + 1..=f.len() {
                    phi.entries.insert(Link::new(Span::new(ei, ej), Span::new(fk, fl)), Weight::one());
                }
            }
        }
    }
    phi.zero_one = phi.entries.values().all(|w| w.is_zero() || w.is_one());
    WsaInstance::new(e, f, phi)
}

/// Boundary mask helpers. Bit `p` (1-based position `p` in `1..n`) lives at
/// mask bit `n-1-p`, so ascending masks are ascending boundary bitstrings.
pub(crate) fn mask_to_spans(n: usize, mask: u64) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut start = 0;
    for p in 1..n {
        if mask >> (n - 1 - p) & 1 == 1 {
            spans.push(Span::new(start, p));
            start = p;
        }
    }
    if n > 0 {
        spans.push(Span::new(start, n));
    }
    spans
}

/// Iterator over the compositions of a sentence into contiguous phrases.
#[derive(Debug, Clone)]
pub struct Partitions {
    n: usize,
    next: Option<u64>,
    limit: u64,
    exactly: Option<usize>,
}

impl Iterator for Partitions {
    type Item = Vec<Span>;

    fn next(&mut self) -> Option<Vec<Span>> {
        let mask = self.next?;
        if mask >= self.limit {
            self.next = None;
            return None;
        }
        self.next = match self.exactly {
            None => Some(mask + 1),
            Some(_) if mask == 0 => None,
            // Gosper's hack: next larger integer with the same popcount.
            Some(_) => {
                let c = mask & mask.wrapping_neg();
                let r = mask + c;
                Some((((r ^ mask) >> 2) / c) | r)
            }
        };
        Some(mask_to_spans(self.n, mask))
    }
}

/// Enumerates phrase partitions of an `n`-word sentence in lexicographic order
/// of their boundary bitstrings, optionally only those with `exactly` phrases.
/// An out-of-range `exactly` yields nothing; `n = 0` yields the empty partition.
pub fn enumerate_partitions(n: usize, exactly: Option<usize>, guard: usize) -> Result<Partitions> {
    if n > guard || n > 63 {
        return Err(Error::SizeGuard { len: n, guard });
    }
    let limit = if n == 0 { 1 } else { 1u64 << (n - 1) };
    let next = match exactly {
        None => Some(0),
        Some(k) if n == 0 => (k == 0).then_some(0),
        Some(k) if k == 0 || k > n => None,
        Some(k) => Some((1u64 << (k - 1)) - 1),
    };
    Ok(Partitions { n, next, limit, exactly })
}
