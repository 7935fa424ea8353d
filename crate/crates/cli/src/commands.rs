//! Command definitions and their implementations.

use std::fs;
use std::path::{Path, PathBuf};

use alignh_core::model::{alignment_weight, DEFAULT_GUARD};
use alignh_core::recovery::{
    decode_assignment, decode_cover, run_recovery_experiment, ExperimentKind, Metric, RecoveryConfig, StrategyKind,
};
use alignh_core::reductions::{
    amplify_vc_path, brute_force_satisfiable, has_cover, preprocess, sat_to_pwsa_unique, sat_to_wsa,
    sat_to_wsa_amplified, vc_to_wsa, CnfFormula, Graph, Lit,
};
use alignh_core::solvers::{decide_weight_one, solve_exact, solve_monotone_dp, solve_pwsa, SolveResult, SolveStatus};
use alignh_core::witness::{decode_partition, encode_dual, encode_matrix, encode_partition, PartitionWitness};
use alignh_core::{Error as CoreError, WsaInstance};
use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::formats::{
    parse_alignment, parse_dimacs_cnf, parse_edge_list, parse_witness, write_alignment, write_report_csv,
    write_report_markdown, write_witness, InstanceFile, ReductionSection,
};

/// Exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const ERROR: u8 = 1;
    pub const GUARD: u8 = 2;
    pub const VERIFY_FAILED: u8 = 3;
    /// The instance admits no alignment of the requested kind (decide = false).
    pub const NEGATIVE: u8 = 10;
}

#[derive(Debug, Parser)]
#[command(name = "alignh", version, about = "Weighted sentence alignment: solvers, reductions and witness experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an alignment instance from a CNF formula or a graph.
    Reduce(ReduceArgs),
    /// Solve an instance file.
    Solve(SolveArgs),
    /// Encode, decode or compare witnesses.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Run a witness-recovery experiment.
    Experiment(ExperimentArgs),
    /// Check the reductions against brute force on small inputs.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Wsa,
    Pwsa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Amplify {
    pub var: usize,
    pub count: usize,
}

fn parse_amplify(s: &str) -> Result<Amplify, String> {
    let (v, c) = s.split_once(':').ok_or("expected VAR:COUNT")?;
    let var = v.trim().parse().map_err(|_| format!("bad variable {v:?}"))?;
    let count = c.trim().parse().map_err(|_| format!("bad count {c:?}"))?;
    Ok(Amplify { var, count })
}

#[derive(Debug, Args)]
pub struct ReduceArgs {
    /// DIMACS CNF (`p cnf`) or edge list (`p edge`) file.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "wsa")]
    pub target: Target,
    /// Cover budget, required for graphs.
    #[arg(short)]
    pub k: Option<usize>,
    /// Amplify a variable with dummy clauses, or a vertex with a path gadget.
    #[arg(long, value_parser = parse_amplify)]
    pub amplify: Option<Amplify>,
    /// Add tautologies for variables that miss a polarity instead of failing.
    #[arg(long)]
    pub repair: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Pwsa,
    Monotone,
    Decide,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: Mode,
    /// Largest sentence length the exact solver enumerates.
    #[arg(long, env = "ALIGNH_GUARD", default_value_t = DEFAULT_GUARD)]
    pub guard: usize,
    /// Write the canonical witness here.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Write the alignment (JSON link list) here.
    #[arg(long)]
    pub alignment: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Partition,
    Dual,
    Matrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricArg {
    Hamming,
    Edit,
    EditT,
}

impl From<MetricArg> for Metric {
    fn from(m: MetricArg) -> Self {
        match m {
            MetricArg::Hamming => Metric::Hamming,
            MetricArg::Edit => Metric::Edit,
            MetricArg::EditT => Metric::EditT,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum WitnessCommand {
    /// Encode an alignment file as a witness.
    Encode {
        instance: PathBuf,
        alignment: PathBuf,
        #[arg(long, value_enum, default_value = "partition")]
        form: Form,
    },
    /// Decode a partition witness; uses the reduction map when present.
    Decode { instance: PathBuf, witness: PathBuf },
    /// Distance between two witness files.
    Distance {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value = "hamming")]
        metric: MetricArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Pwsa,
    Dual,
    SatAssignment,
    VcCover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Random,
    Adversarial,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Amplified element and amplification count.
    #[arg(long, value_parser = parse_amplify)]
    pub amplify: Option<Amplify>,
    #[arg(long, value_enum)]
    pub metric: Option<MetricArg>,
    #[arg(long, value_enum)]
    pub strategy: Option<StrategyArg>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Fixed corruption budget instead of floor(c*N - N^epsilon).
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// CNF source for the SAT kinds.
    #[arg(long)]
    pub cnf: Option<PathBuf>,
    /// Edge-list source for `vc-cover`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Output prefix: writes `<prefix>.csv` and `<prefix>.md`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Largest variable count in the exhaustive CNF sweep.
    #[arg(long, default_value_t = 3)]
    pub max_vars: usize,
    /// Largest clause count in the exhaustive CNF sweep.
    #[arg(long, default_value_t = 3)]
    pub max_clauses: usize,
    /// Largest vertex count in the exhaustive graph sweep.
    #[arg(long, default_value_t = 4)]
    pub max_vertices: usize,
}

/// Runs a command and maps failures to exit codes.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Reduce(a) => reduce(a),
        Command::Solve(a) => solve(a),
        Command::Witness(w) => witness(w),
        Command::Experiment(a) => experiment(a),
        Command::Verify(a) => verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<CoreError>() {
                Some(CoreError::SizeGuard { .. }) => exit::GUARD,
                _ => exit::ERROR,
            }
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn load_instance(path: &Path) -> anyhow::Result<(InstanceFile, WsaInstance)> {
    let file = InstanceFile::from_json(&read(path)?).with_context(|| format!("parsing {}", path.display()))?;
    let inst = file.instance()?;
    Ok((file, inst))
}

fn is_graph(text: &str) -> bool {
    text.lines().map(str::trim).find(|l| l.starts_with('p')).is_some_and(|l| l.split_whitespace().nth(1) == Some("edge"))
}

fn reduce(a: ReduceArgs) -> anyhow::Result<u8> {
    let text = read(&a.input)?;
    let ctx = || format!("parsing {}", a.input.display());
    let (inst, section) = if is_graph(&text) {
        let g = parse_edge_list(&text).with_context(ctx)?;
        let k = a.k.ok_or_else(|| anyhow!("graphs need a cover budget -k"))?;
        match a.amplify {
            None => {
                let (inst, map) = vc_to_wsa(&g, k)?;
                (inst, ReductionSection::Vc(map))
            }
            Some(Amplify { var, count }) => {
                let (h, gadget) = amplify_vc_path(&g, var, count)?;
                let (inst, mut map) = vc_to_wsa(&h, k + count)?;
                map.gadget = Some(gadget);
                (inst, ReductionSection::Vc(map))
            }
        }
    } else {
        let f = parse_dimacs_cnf(&text).with_context(ctx)?;
        let f = preprocess(&f, a.repair)?;
        let (inst, map) = match (a.amplify, a.target) {
            (Some(Amplify { var, count }), t) => sat_to_wsa_amplified(&f, var, count, t == Target::Pwsa)?,
            (None, Target::Wsa) => sat_to_wsa(&f)?,
            (None, Target::Pwsa) => sat_to_pwsa_unique(&f)?,
        };
        (inst, ReductionSection::Sat(map))
    };
    let json = InstanceFile::new(&inst, Some(section)).to_json();
    match &a.output {
        Some(p) => write(p, &json)?,
        None => print!("{json}"),
    }
    eprintln!("|e|={} |f|={}", inst.e().len(), inst.f().len());
    Ok(exit::OK)
}

fn report(result: &SolveResult, a: &SolveArgs, inst: &WsaInstance) -> anyhow::Result<u8> {
    let Some(alignment) = &result.best_alignment else {
        println!("weight=0 status=no-positive-alignment");
        return Ok(exit::NEGATIVE);
    };
    let witness = result.canonical_witness.as_ref().map(|w| w.bits());
    let form = match &result.canonical_witness {
        Some(alignh_core::Witness::Partition(_)) => "partition",
        Some(alignh_core::Witness::Dual(_)) => "dual",
        None => "none",
    };
    println!(
        "weight={} witness={} form={form} links={}",
        result.best_weight,
        witness.as_ref().map(ToString::to_string).unwrap_or_default(),
        alignment.links.len()
    );
    if let (Some(p), Some(w)) = (&a.output, &witness) {
        write(p, &write_witness(w))?;
    }
    if let Some(p) = &a.alignment {
        write(p, &write_alignment(alignment))?;
    }
    debug_assert!(alignment_weight(inst, alignment).is_ok());
    Ok(if result.status == SolveStatus::Found { exit::OK } else { exit::NEGATIVE })
}

fn solve(a: SolveArgs) -> anyhow::Result<u8> {
    let (_, inst) = load_instance(&a.instance)?;
    match a.mode {
        Mode::Decide => {
            let yes = decide_weight_one(&inst)?;
            println!("decide={yes}");
            Ok(if yes { exit::OK } else { exit::NEGATIVE })
        }
        Mode::Exact => report(&solve_exact(&inst, a.guard)?, &a, &inst),
        Mode::Pwsa => report(&solve_pwsa(&inst)?, &a, &inst),
        Mode::Monotone => report(&solve_monotone_dp(&inst)?, &a, &inst),
    }
}

fn witness(cmd: WitnessCommand) -> anyhow::Result<u8> {
    match cmd {
        WitnessCommand::Encode { instance, alignment, form } => {
            let (_, inst) = load_instance(&instance)?;
            let a = parse_alignment(&read(&alignment)?)?;
            let bits = match form {
                Form::Partition => encode_partition(&a, &inst)?.bits,
                Form::Dual => encode_dual(&a, &inst, false)?.concatenated(),
                Form::Matrix => encode_matrix(&a, &inst)?.as_bits(),
            };
            print!("{}", write_witness(&bits));
        }
        WitnessCommand::Decode { instance, witness } => {
            let (file, inst) = load_instance(&instance)?;
            let w = PartitionWitness::new(parse_witness(&read(&witness)?)?);
            if w.sentence_len() != inst.e().len() {
                bail!("witness has {} bits, instance needs {}", w.bits.len(), inst.e().len().saturating_sub(1));
            }
            let phrases = decode_partition(&w);
            println!("phrases={}", phrases.iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
            match &file.reduction {
                Some(ReductionSection::Sat(map)) => match decode_assignment(&w, map, &inst)? {
                    Some(asg) => println!(
                        "assignment={}",
                        asg.values().iter().map(|&b| if b { '1' } else { '0' }).collect::<String>()
                    ),
                    None => {
                        println!("assignment=none");
                        return Ok(exit::NEGATIVE);
                    }
                },
                Some(ReductionSection::Vc(map)) => {
                    match alignh_core::solvers::pwsa_alignment(&inst, &phrases) {
                        Some(a) => {
                            let cover = decode_cover(&a, map)?;
                            println!("cover={}", cover.0.iter().map(ToString::to_string).collect::<Vec<_>>().join(","));
                        }
                        None => {
                            println!("cover=none");
                            return Ok(exit::NEGATIVE);
                        }
                    }
                }
                None => {}
            }
        }
        WitnessCommand::Distance { left, right, metric } => {
            let x = parse_witness(&read(&left)?)?;
            let y = parse_witness(&read(&right)?)?;
            println!("{}", Metric::from(metric).distance(&x, &y)?);
        }
    }
    Ok(exit::OK)
}

/// Merges the optional TOML file with command-line overrides.
pub fn experiment_config(a: &ExperimentArgs) -> anyhow::Result<RecoveryConfig> {
    let mut cfg: RecoveryConfig = match &a.config {
        Some(p) => toml::from_str(&read(p)?).with_context(|| format!("parsing {}", p.display()))?,
        None => RecoveryConfig::default(),
    };
    if let Some(k) = a.kind {
        cfg.kind = match k {
            KindArg::Pwsa => ExperimentKind::Pwsa,
            KindArg::Dual => ExperimentKind::Dual,
            KindArg::SatAssignment => ExperimentKind::SatAssignment,
            KindArg::VcCover => ExperimentKind::VcCover,
        };
        if k == KindArg::Dual && a.c.is_none() && a.config.is_none() {
            cfg.c = 2.0 / 3.0;
        }
    }
    if let Some(Amplify { var, count }) = a.amplify {
        cfg.target = var;
        cfg.amplification = count;
    }
    if let Some(m) = a.metric {
        cfg.metric = m.into();
    }
    if let Some(s) = a.strategy {
        cfg.strategy = match s {
            StrategyArg::Random => StrategyKind::Random,
            StrategyArg::Adversarial => StrategyKind::Adversarial,
        };
    }
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.budget = a.budget.or(cfg.budget);
    cfg.c = a.c.unwrap_or(cfg.c);
    cfg.epsilon = a.epsilon.unwrap_or(cfg.epsilon);
    if let Some(p) = &a.cnf {
        cfg.formula = Some(parse_dimacs_cnf(&read(p)?).with_context(|| format!("parsing {}", p.display()))?);
    }
    if let Some(p) = &a.graph {
        cfg.graph = Some(parse_edge_list(&read(p)?).with_context(|| format!("parsing {}", p.display()))?);
    }
    Ok(cfg)
}

fn experiment(a: ExperimentArgs) -> anyhow::Result<u8> {
    let cfg = experiment_config(&a)?;
    let report = run_recovery_experiment(&cfg)?;
    let csv = write_report_csv(&report);
    let md = write_report_markdown(&report);
    match &a.output {
        Some(prefix) => {
            write(&prefix.with_extension("csv"), &csv)?;
            write(&prefix.with_extension("md"), &md)?;
        }
        None => print!("{csv}"),
    }
    let successes = report.rows.iter().filter(|r| r.success).count();
    eprintln!(
        "N={} budget={} success={}/{} rate={:.4}",
        report.witness_len,
        report.budget,
        successes,
        report.rows.len(),
        report.success_rate
    );
    Ok(exit::OK)
}

fn all_clauses(n: usize) -> Vec<Vec<Lit>> {
    let mut out = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                for signs in 0..8u8 {
                    let lit = |v: usize, bit: u8| if signs >> bit & 1 == 1 { Lit::neg(v) } else { Lit::pos(v) };
                    out.push(vec![lit(a, 0), lit(b, 1), lit(c, 2)]);
                }
            }
        }
    }
    out
}

fn multisets(pool: usize, size: usize, start: usize, cur: &mut Vec<usize>, out: &mut dyn FnMut(&[usize])) {
    if cur.len() == size {
        out(cur);
        return;
    }
    for i in start..pool {
        cur.push(i);
        multisets(pool, size, i, cur, out);
        cur.pop();
    }
}

fn verify(a: VerifyArgs) -> anyhow::Result<u8> {
    let mut checked = 0usize;
    let mut failures = Vec::new();
    for n in 3..=a.max_vars {
        let pool = all_clauses(n);
        for m in 1..=a.max_clauses {
            multisets(pool.len(), m, 0, &mut Vec::new(), &mut |idx| {
                let f = CnfFormula::new(n, idx.iter().map(|&i| pool[i].clone()).collect()).expect("valid");
                let Ok(f) = preprocess(&f, false) else { return };
                let (inst, _) = sat_to_wsa(&f).expect("preprocessed");
                checked += 1;
                if decide_weight_one(&inst).ok() != Some(brute_force_satisfiable(&f)) {
                    failures.push(format!("formula {f}"));
                }
            });
        }
    }
    for n in 2..=a.max_vertices {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v))).collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
            let g = Graph::new(n, edges)?;
            if (1..=n).any(|v| g.degree(v) == 0) {
                continue;
            }
            for k in 1..=n {
                let (inst, _) = vc_to_wsa(&g, k)?;
                checked += 1;
                if decide_weight_one(&inst).ok() != Some(has_cover(&g, k)) {
                    failures.push(format!("graph {:?} k={k}", g.edges()));
                }
            }
        }
    }
    println!("checked={checked} failures={}", failures.len());
    for f in failures.iter().take(10) {
        println!("  {f}");
    }
    Ok(if failures.is_empty() { exit::OK } else { exit::VERIFY_FAILED })
}
