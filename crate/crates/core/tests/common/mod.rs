//! Brute-force oracles shared by the integration tests. Deliberately naive
//! and independent of the library's search code.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use alignh_core::model::{Link, Sentence, Span, Weight, WeightFn, WsaInstance};
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every way to cut `0..n` into consecutive non-empty pieces.
pub fn compositions(n: usize) -> Vec<Vec<Span>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for rest in compositions(n - first) {
            let mut v = vec![Span::new(0, first)];
            v.extend(rest.into_iter().map(|s| Span::new(s.i + first, s.j + first)));
            out.push(v);
        }
    }
    out
}

/// All alignments as link lists; `monotone` keeps only order-preserving ones.
pub fn all_alignments(ne: usize, nf: usize, monotone: bool) -> Vec<Vec<Link>> {
    let mut out = Vec::new();
    for ep in compositions(ne) {
        for fp in compositions(nf).into_iter().filter(|fp| fp.len() == ep.len()) {
            if monotone {
                out.push(ep.iter().zip(&fp).map(|(&e, &f)| Link::new(e, f)).collect());
            } else {
                for perm in (0..fp.len()).permutations(fp.len()) {
                    out.push(ep.iter().zip(perm).map(|(&e, k)| Link::new(e, fp[k])).collect());
                }
            }
        }
    }
    out
}

pub fn weight_of(inst: &WsaInstance, links: &[Link]) -> Weight {
    links.iter().map(|l| inst.phi().weight(l)).product()
}

/// Best weight over all (or all monotone) alignments.
pub fn brute_best(inst: &WsaInstance, monotone: bool) -> Weight {
    all_alignments(inst.e().len(), inst.f().len(), monotone)
        .iter()
        .map(|a| weight_of(inst, a))
        .max_by(|a, b| a.as_ratio().cmp(b.as_ratio()))
        .unwrap_or_else(Weight::zero)
}

pub fn sentence(n: usize, prefix: &str) -> Sentence {
    Sentence::new((1..=n).map(|i| format!("{prefix}{i}")))
}

fn all_spans(n: usize) -> Vec<Span> {
    (0..n).flat_map(|i| (i + 1..=n).map(move |j| Span::new(i, j))).collect()
}

/// Random instance; `zero_one` restricts weights to 1, `single_f` keeps only
/// single-word f spans.
pub fn random_instance(ne: usize, nf: usize, density: f64, zero_one: bool, single_f: bool, seed: u64) -> WsaInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = [Weight::one(), Weight::ratio(1, 2), Weight::from_integer(2), Weight::ratio(3, 4), Weight::from_integer(3)];
    let mut phi = WeightFn::new();
    for e in all_spans(ne) {
        for f in all_spans(nf) {
            if single_f && f.len() != 1 {
                continue;
            }
            if rng.random_bool(density) {
                let w = if zero_one { Weight::one() } else { choices[rng.random_range(0..choices.len())].clone() };
                phi.insert(Link::new(e, f), w);
            }
        }
    }
    WsaInstance::new(sentence(ne, "e"), sentence(nf, "f"), phi).unwrap()
}

pub fn arb_instance(max: usize, zero_one: bool, single_f: bool) -> impl Strategy<Value = WsaInstance> {
    (1..=max, 1..=max, 0.05f64..0.6, any::<u64>())
        .prop_map(move |(ne, nf, d, seed)| random_instance(ne, nf, d, zero_one, single_f, seed))
}

/// Edit distance by breadth-first search over single operations, restricted
/// to strings no longer than `max(|x|, |y|) + 2`.
pub fn bfs_edit_distance(x: &[bool], y: &[bool], transpositions: bool) -> usize {
    let cap = x.len().max(y.len()) + 2;
    let mut seen: HashSet<Vec<bool>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(x.to_vec());
    queue.push_back((x.to_vec(), 0));
    while let Some((s, d)) = queue.pop_front() {
        if s == y {
            return d;
        }
        let mut next = Vec::new();
        for i in 0..s.len() {
            let mut t = s.clone();
            t.remove(i);
            next.push(t);
            let mut t = s.clone();
            t[i] = !t[i];
            next.push(t);
            if transpositions && i + 1 < s.len() {
                let mut t = s.clone();
                t.swap(i, i + 1);
                next.push(t);
            }
        }
        if s.len() < cap {
            for i in 0..=s.len() {
                for b in [false, true] {
                    let mut t = s.clone();
                    t.insert(i, b);
                    next.push(t);
                }
            }
        }
        for t in next {
            if seen.insert(t.clone()) {
                queue.push_back((t, d + 1));
            }
        }
    }
    unreachable!("y is always reachable")
}

pub fn all_bitstrings(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |m| (0..n).map(|i| m >> (n - 1 - i) & 1 == 1).collect())
}
