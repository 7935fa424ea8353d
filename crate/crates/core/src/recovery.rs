//! Decoding witnesses back to assignments and covers, corruption adversaries,
//! and the majority decoder behind the amplification experiments.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{alignment_weight, check_alignment, Alignment, Link, Span, WsaInstance};
use crate::reductions::{
    amplify_sat_equiv_vars, amplify_vc_path, minimum_covers, preprocess, sat_to_wsa_amplified, satisfying_assignments,
    vc_to_wsa, Assignment, CnfFormula, Graph, SatReductionMap, VcReductionMap, VertexSet,
};
use crate::solvers::pwsa_alignment;
use crate::witness::{decode_partition, edit_distance, encode_partition, hamming, BitString, PartitionWitness};

/// The two ideal readings of a block of witness positions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPattern {
    /// 0-based witness positions, in order.
    pub positions: Vec<usize>,
    pub true_bits: BitString,
    pub false_bits: BitString,
}

impl BlockPattern {
    pub fn new(positions: Vec<usize>, true_bits: BitString, false_bits: BitString) -> Result<Self> {
        for len in [true_bits.len(), false_bits.len()] {
            if len != positions.len() {
                return Err(Error::LengthMismatch { left: positions.len(), right: len });
            }
        }
        Ok(BlockPattern { positions, true_bits, false_bits })
    }

    /// Pattern over a contiguous range of positions.
    pub fn contiguous(start: usize, true_bits: BitString, false_bits: BitString) -> Result<Self> {
        BlockPattern::new((start..start + true_bits.len()).collect(), true_bits, false_bits)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Indices into `positions` where the two patterns disagree.
    pub fn differing(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.true_bits.get(i) != self.false_bits.get(i)).collect()
    }

    pub fn ideal(&self, value: bool) -> &BitString {
        if value {
            &self.true_bits
        } else {
            &self.false_bits
        }
    }

    fn read(&self, w: &BitString) -> Result<BitString> {
        if let Some(&p) = self.positions.iter().find(|&&p| p >= w.len()) {
            return Err(Error::LengthMismatch { left: w.len(), right: p + 1 });
        }
        Ok(BitString::new(self.positions.iter().map(|&p| w.get(p)).collect()))
    }
}

/// Block of `var` in a partition witness of a SAT-derived instance, with all
/// copies of the true polarity consumed singly as the true reading.
pub fn sat_block_pattern(map: &SatReductionMap, var: usize) -> BlockPattern {
    let b = map.block(var);
    let positions: Vec<usize> = b.internal_positions().map(|p| p - 1).collect();
    let true_bits = positions.iter().map(|&i| i < b.positives.j).collect::<Vec<_>>();
    let false_bits = positions.iter().map(|&i| i + 1 >= b.negatives.i).collect::<Vec<_>>();
    BlockPattern { positions, true_bits: true_bits.into(), false_bits: false_bits.into() }
}

/// Recovers an assignment from a partition witness: partition `e`, match
/// phrases to `f` words over weight-1 links, read each slack link.
pub fn decode_assignment(
    w: &PartitionWitness,
    map: &SatReductionMap,
    inst: &WsaInstance,
) -> Result<Option<Assignment>> {
    let expected = inst.f().len().saturating_sub(1);
    if w.bits.count_ones() != expected || w.sentence_len() != inst.e().len() {
        if w.sentence_len() != inst.e().len() {
            return Err(Error::LengthMismatch { left: w.sentence_len(), right: inst.e().len() });
        }
        return Err(Error::PopcountMismatch { expected, found: w.bits.count_ones() });
    }
    let phrases = decode_partition(w);
    let Some(a) = pwsa_alignment(inst, &phrases) else {
        return Ok(None);
    };
    let mut asg = Assignment::all(map.formula.num_vars(), true);
    for b in &map.blocks {
        let word = Span::single(map.slack_words[b.var - 1]);
        let link = a.links.iter().find(|l| l.f == word).expect("perfect matching covers every slack word");
        let all_pos = link.e.contains_span(b.positives);
        let all_neg = link.e.contains_span(b.negatives);
        // both polarities free: either value works, keep true
        asg.set(b.var, all_neg || !all_pos);
    }
    if !map.formula.is_satisfied_by(&asg) {
        return Err(Error::NotSatisfying);
    }
    Ok(Some(asg))
}

/// Reads `var` straight off its block: `1..10..0` means true, `0..01..1`
/// false, anything else is undecided. An all-zero block reads true.
pub fn direct_block_readout(w: &PartitionWitness, map: &SatReductionMap, var: usize) -> Result<Option<bool>> {
    let b = map.block(var);
    if b.dummy.is_none() && (b.positives.len() < 2 || b.negatives.len() < 2) {
        return Err(Error::TooFewOccurrences { var });
    }
    let bits: Vec<bool> = b.internal_positions().map(|p| w.bits.get(p - 1)).collect();
    let ones = bits.iter().take_while(|&&x| x).count();
    if bits[ones..].iter().all(|&x| !x) {
        return Ok(Some(true));
    }
    let zeros = bits.iter().take_while(|&&x| !x).count();
    if bits[zeros..].iter().all(|&x| x) {
        return Ok(Some(false));
    }
    Ok(None)
}

/// Canonical witness of a satisfying assignment: every clause takes its first
/// true literal, positive copies are used from the front of their run and
/// negative copies from the back, the slack word takes what is left.
pub fn witness_from_assignment(
    map: &SatReductionMap,
    asg: &Assignment,
    inst: &WsaInstance,
) -> Result<PartitionWitness> {
    if !map.formula.is_satisfied_by(asg) {
        return Err(Error::NotSatisfying);
    }
    let n = map.formula.num_vars();
    let mut used_pos = vec![0; n + 1];
    let mut used_neg = vec![0; n + 1];
    let mut links = Vec::with_capacity(inst.f().len());
    for (c, clause) in map.formula.clauses().iter().enumerate() {
        let lit = clause.iter().find(|l| l.holds(asg)).expect("clause satisfied");
        let b = map.block(lit.var());
        let copy = if lit.is_positive() {
            used_pos[lit.var()] += 1;
            b.positives.i + used_pos[lit.var()] - 1
        } else {
            used_neg[lit.var()] += 1;
            b.negatives.j - used_neg[lit.var()]
        };
        links.push(Link::new(Span::new(copy, copy + 1), Span::single(map.clause_words[c])));
    }
    for b in &map.blocks {
        let slack = if asg.value(b.var) {
            Span::new(b.positives.i + used_pos[b.var], b.block.j)
        } else {
            Span::new(b.block.i, b.negatives.j - used_neg[b.var])
        };
        links.push(Link::new(slack, Span::single(map.slack_words[b.var - 1])));
    }
    let a = Alignment::new(links);
    debug_assert!(alignment_weight(inst, &a).is_ok_and(|w| w.is_one()));
    encode_partition(&a, inst)
}

/// Vertices whose block is not linked to any `t` word.
pub fn decode_cover(a: &Alignment, map: &VcReductionMap) -> Result<VertexSet> {
    let (inst, _) = vc_to_wsa(&map.graph, map.k)?;
    check_alignment(&inst, a).map_err(Error::InvalidAlignment)?;
    let is_t = |l: &Link| l.f.len() == 1 && map.t_words.contains(&l.f.j);
    let cover = VertexSet(
        (1..=map.graph.num_vertices())
            .filter(|&v| {
                let block = map.blocks[v - 1];
                !a.links.iter().any(|l| block.contains_span(l.e) && is_t(l))
            })
            .collect(),
    );
    if alignment_weight(&inst, a)?.is_one() && !(cover.covers(&map.graph) && cover.len() <= map.k) {
        return Err(Error::NotACover);
    }
    Ok(cover)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionMode {
    /// Bit flips at distinct positions.
    Hamming,
    /// Length-preserving scripts: delete/insert pairs plus at most one
    /// replacement.
    Edit,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorruptionStrategy {
    Random { seed: u64 },
    /// Spend the budget on `target`, where the two patterns differ first.
    AdversarialBlock { target: BlockPattern, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorruptionBudget {
    pub max_ops: usize,
    pub mode: CorruptionMode,
    pub strategy: CorruptionStrategy,
}

/// Damages `w` within `budget`. Deterministic for a given seed.
pub fn corrupt(w: &BitString, budget: &CorruptionBudget) -> Result<BitString> {
    let n = w.len();
    if budget.mode == CorruptionMode::Hamming && budget.max_ops > n {
        return Err(Error::BudgetExceedsLength { budget: budget.max_ops, len: n });
    }
    if budget.max_ops == 0 {
        return Ok(w.clone());
    }
    let (seed, target) = match &budget.strategy {
        CorruptionStrategy::Random { seed } => (*seed, None),
        CorruptionStrategy::AdversarialBlock { target, seed } => (*seed, Some(target)),
    };
    if let Some(t) = target {
        t.read(w)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match budget.mode {
        CorruptionMode::Hamming => {
            let order = match target {
                None => rand::seq::index::sample(&mut rng, n, budget.max_ops).into_vec(),
                Some(t) => adversarial_order(t, n, &mut rng),
            };
            let mut out = w.clone();
            for &p in order.iter().take(budget.max_ops) {
                out.flip(p);
            }
            Ok(out)
        }
        CorruptionMode::Edit => Ok(edit_corrupt(w, budget.max_ops, target, &mut rng)),
    }
}

/// Differing pattern positions, then the rest of the block, then the rest of
/// the string; each group shuffled.
fn adversarial_order(t: &BlockPattern, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut in_block = vec![false; n];
    let mut first: Vec<usize> = t.differing().into_iter().map(|i| t.positions[i]).collect();
    let mut second: Vec<usize> = Vec::new();
    for (i, &p) in t.positions.iter().enumerate() {
        in_block[p] = true;
        if t.true_bits.get(i) == t.false_bits.get(i) {
            second.push(p);
        }
    }
    let mut third: Vec<usize> = (0..n).filter(|&p| !in_block[p]).collect();
    first.shuffle(rng);
    second.shuffle(rng);
    third.shuffle(rng);
    first.into_iter().chain(second).chain(third).collect()
}

fn edit_corrupt(w: &BitString, ops: usize, target: Option<&BlockPattern>, rng: &mut ChaCha8Rng) -> BitString {
    let mut bits = w.bits().to_vec();
    let n = bits.len();
    if n == 0 {
        return w.clone();
    }
    let pick = |rng: &mut ChaCha8Rng| match target {
        Some(t) if !t.is_empty() => t.positions[rng.random_range(0..t.len())],
        _ => rng.random_range(0..n),
    };
    for _ in 0..ops / 2 {
        let del = pick(rng);
        let removed = bits.remove(del);
        let ins = pick(rng).min(bits.len());
        let value = if target.is_some() { !removed } else { rng.random() };
        bits.insert(ins, value);
    }
    if ops % 2 == 1 {
        let p = match target {
            Some(t) => {
                let d = t.differing();
                if d.is_empty() {
                    pick(rng)
                } else {
                    t.positions[d[rng.random_range(0..d.len())]]
                }
            }
            None => pick(rng),
        };
        bits[p] = !bits[p];
    }
    BitString::new(bits)
}

/// Compares the block against both ideal patterns on the positions where
/// they differ; ties read true.
pub fn majority_decode(w: &BitString, pattern: &BlockPattern) -> Result<bool> {
    let block = pattern.read(w)?;
    let d = pattern.differing();
    let to_true = d.iter().filter(|&&i| block.get(i) != pattern.true_bits.get(i)).count();
    let to_false = d.iter().filter(|&&i| block.get(i) != pattern.false_bits.get(i)).count();
    Ok(to_true <= to_false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Partition witness of a dummy-clause amplified SAT instance.
    Pwsa,
    /// Dual (e ∥ f boundary) witness of the same instance.
    Dual,
    /// Natural assignment witness of an equivalence-amplified formula.
    SatAssignment,
    /// Characteristic string of a cover of a path-amplified graph.
    VcCover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Metric {
    Hamming,
    Edit,
    EditT,
}

impl Metric {
    pub fn mode(self) -> CorruptionMode {
        match self {
            Metric::Hamming => CorruptionMode::Hamming,
            Metric::Edit | Metric::EditT => CorruptionMode::Edit,
        }
    }

    pub fn distance(self, x: &BitString, y: &BitString) -> Result<usize> {
        match self {
            Metric::Hamming => hamming(x.bits(), y.bits()),
            Metric::Edit => Ok(edit_distance(x.bits(), y.bits(), false)),
            Metric::EditT => Ok(edit_distance(x.bits(), y.bits(), true)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyKind {
    Random,
    Adversarial,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecoveryConfig {
    pub kind: ExperimentKind,
    /// Amplification count: dummy clauses, variable copies, or path half-length.
    pub amplification: usize,
    pub metric: Metric,
    pub strategy: StrategyKind,
    pub c: f64,
    pub epsilon: f64,
    /// Overrides the `floor(c*N - N^epsilon)` budget when set.
    pub budget: Option<usize>,
    pub trials: usize,
    pub seed: u64,
    /// Amplified variable or vertex.
    pub target: usize,
    /// Source formula for the SAT kinds; the default is `(x1|x2|x3) & (~x1|~x2|~x3)`.
    pub formula: Option<CnfFormula>,
    /// Source graph for `vc-cover`; the default is the triangle.
    pub graph: Option<Graph>,
}

impl Default for RecoveryConfig {
    fn default() -> Self {
        RecoveryConfig {
            kind: ExperimentKind::Pwsa,
            amplification: 32,
            metric: Metric::Hamming,
            strategy: StrategyKind::Adversarial,
            c: 0.5,
            epsilon: 0.5,
            budget: None,
            trials: 1000,
            seed: 0,
            target: 1,
            formula: None,
            graph: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub budget_used: usize,
    pub distance: usize,
    pub decoded: bool,
    pub truth: bool,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: RecoveryConfig,
    pub witness_len: usize,
    pub budget: usize,
    pub rows: Vec<TrialRow>,
    pub success_rate: f64,
}

/// `floor(c*N - N^epsilon)`; negative results are a configuration error.
pub fn budget_formula(n: usize, c: f64, epsilon: f64) -> Result<usize> {
    let b = (c * n as f64 - (n as f64).powf(epsilon)).floor();
    if !b.is_finite() || b < 0.0 {
        return Err(Error::Config(format!("budget floor({c}*{n} - {n}^{epsilon}) = {b} is negative")));
    }
    Ok(b as usize)
}

fn default_formula() -> CnfFormula {
    CnfFormula::from_dimacs(3, &[vec![1, 2, 3], vec![-1, -2, -3]]).expect("valid")
}

/// Everything a trial needs: candidate truths with their witnesses, and the
/// pattern for the amplified element.
struct Setup {
    witnesses: Vec<(bool, BitString)>,
    pattern: BlockPattern,
}

fn setup(config: &RecoveryConfig) -> Result<Setup> {
    let a = config.amplification;
    match config.kind {
        ExperimentKind::Pwsa | ExperimentKind::Dual => {
            let f = config.formula.clone().unwrap_or_else(default_formula);
            let f = CnfFormula::new(f.num_vars(), f.clauses().to_vec())?;
            let f = preprocess(&f, true)?;
            let (inst, map) = sat_to_wsa_amplified(&f, config.target, a, false)?;
            let pattern = sat_block_pattern(&map, config.target);
            let f_bits = BitString::ones(inst.f().len().saturating_sub(1));
            let witnesses = satisfying_assignments(&map.formula)
                .into_iter()
                .map(|asg| {
                    let w = witness_from_assignment(&map, &asg, &inst)?.bits;
                    let w = if config.kind == ExperimentKind::Dual { w.concat(&f_bits) } else { w };
                    Ok((asg.value(config.target), w))
                })
                .collect::<Result<_>>()?;
            Ok(Setup { witnesses, pattern })
        }
        ExperimentKind::SatAssignment => {
            let f = config.formula.clone().unwrap_or_else(default_formula);
            let f = CnfFormula::new(f.num_vars(), f.clauses().to_vec())?;
            let (g, layout) = amplify_sat_equiv_vars(&f, config.target, a)?;
            let pattern = BlockPattern::contiguous(0, BitString::ones(a), BitString::zeros(a))?;
            // satisfying assignments of the original formula, extended to the copies
            let witnesses = satisfying_assignments(&f)
                .into_iter()
                .map(|asg| {
                    let z = asg.value(config.target);
                    let mut values = asg.values().to_vec();
                    values.extend(std::iter::repeat_n(z, a));
                    let full = Assignment::new(values);
                    debug_assert!(g.is_satisfied_by(&full));
                    (z, layout.witness(&full))
                })
                .collect();
            Ok(Setup { witnesses, pattern })
        }
        ExperimentKind::VcCover => {
            let g = config.graph.clone().unwrap_or_else(|| Graph::complete(3));
            let g = Graph::new(g.num_vertices(), g.edges().to_vec())?;
            let (h, gadget) = amplify_vc_path(&g, config.target, a)?;
            let shift = |v: usize| v + a;
            let mut positions: Vec<usize> = gadget.u.iter().chain(&gadget.w).map(|&v| v - 1).collect();
            positions.sort_unstable();
            let true_bits: Vec<bool> = positions.iter().map(|&p| gadget.u.contains(&(p + 1))).collect();
            let false_bits: Vec<bool> = true_bits.iter().map(|b| !b).collect();
            let pattern = BlockPattern::new(positions, true_bits.into(), false_bits.into())?;
            let witnesses = minimum_covers(&g)
                .into_iter()
                .map(|c| {
                    let truth = c.contains(config.target);
                    let mut big = VertexSet(c.0.iter().map(|&v| shift(v)).collect());
                    big.0.extend(if truth { &gadget.u } else { &gadget.w });
                    debug_assert!(big.covers(&h));
                    (truth, big.to_bits(h.num_vertices()))
                })
                .collect();
            Ok(Setup { witnesses, pattern })
        }
    }
}

/// Corrupts amplified witnesses and checks whether majority decoding still
/// recovers the amplified element. Trials run in parallel, each seeded from
/// `(seed, trial)`.
pub fn run_recovery_experiment(config: &RecoveryConfig) -> Result<ExperimentReport> {
    if config.amplification == 0 {
        return Err(Error::Config("amplification must be at least 1".into()));
    }
    let s = setup(config)?;
    let Some((_, first)) = s.witnesses.first() else {
        return Err(Error::Config("source instance has no solution".into()));
    };
    let n = first.len();
    let budget = match config.budget {
        Some(b) => b,
        None => budget_formula(n, config.c, config.epsilon)?,
    };
    if config.metric == Metric::Hamming && budget > n {
        return Err(Error::BudgetExceedsLength { budget, len: n });
    }
    let rows = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial as u64);
            let (truth, w) = &s.witnesses[rng.random_range(0..s.witnesses.len())];
            let seed = rng.random();
            let strategy = match config.strategy {
                StrategyKind::Random => CorruptionStrategy::Random { seed },
                StrategyKind::Adversarial => CorruptionStrategy::AdversarialBlock { target: s.pattern.clone(), seed },
            };
            let corrupted = corrupt(w, &CorruptionBudget { max_ops: budget, mode: config.metric.mode(), strategy })?;
            let decoded = majority_decode(&corrupted, &s.pattern)?;
            Ok(TrialRow {
                trial,
                budget_used: budget,
                distance: config.metric.distance(w, &corrupted)?,
                decoded,
                truth: *truth,
                success: decoded == *truth,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let successes = rows.iter().filter(|r| r.success).count();
    let success_rate = if rows.is_empty() { 0.0 } else { successes as f64 / rows.len() as f64 };
    Ok(ExperimentReport { config: config.clone(), witness_len: n, budget, rows, success_rate })
}
