//! `wiretap-lab`: command-line front end for the finite-blocklength
//! wiretap-channel toolkit.
//!
//! Exit codes: 0 success, 1 usage error, 2 validation/input error,
//! 3 enumeration-budget error. All information quantities are in nats and
//! printed with 9 significant digits; exact-mode invocations are
//! byte-reproducible for a fixed configuration.

mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use output::{csv_document, fmt_sig9, round_numbers};
use wiretap_lab::hashing::{self, HashFamily, RealizationMode};
use wiretap_lab::info_measures::{self, RenyiOrder, SmoothingMethod};
use wiretap_lab::probability::DEFAULT_MATRIX_BUDGET;
use wiretap_lab::typicality::{self, TypicalityParams};
use wiretap_lab::wiretap::{self, ErrorMode, InnerSpec, KRule, RateSpec};
use wiretap_lab::{capacity, Channel, Distribution, Error as LabError, JointDistribution};

const BUDGET_ENV: &str = "WIRETAP_LAB_BUDGET";

#[derive(Parser)]
#[command(name = "wiretap-lab", version, about = "Finite-blocklength wiretap channel toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Force the output format; each subcommand has a natural one.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Enumeration budget in matrix entries (env WIRETAP_LAB_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Information measures.
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// Channel algebra and capacity.
    #[command(subcommand)]
    Channel(ChannelCmd),
    /// Method-of-types bounds and enumerations.
    #[command(subcommand)]
    Typicality(TypicalityCmd),
    /// Hash family diagnostics.
    #[command(subcommand)]
    Hash(HashCmd),
    /// Wiretap code construction and evaluation.
    #[command(subcommand)]
    Wiretap(WiretapCmd),
}

#[derive(Subcommand)]
enum MeasuresCmd {
    /// Rényi divergence of order 1+s between two distributions.
    Renyi {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        q: PathBuf,
        #[arg(long)]
        s: f64,
    },
    /// Conditional Rényi entropy H_{1+s}(A|E) of a joint distribution.
    CondRenyi {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        s: f64,
    },
    /// Mutual information I(P; W).
    Mutual {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        channel: PathBuf,
    },
    /// Max-information of a (possibly subnormalized) channel.
    Maxinfo {
        #[arg(long)]
        channel: PathBuf,
    },
    /// ε-smooth max-information with a witness set.
    SmoothMaxinfo {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
    },
    /// Order-2 divergence vs max-information inequality.
    Lemma8 {
        #[arg(long)]
        channel: PathBuf,
    },
    /// Smoothed upper bound on the uniform-input KL leakage.
    Lemma9 {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "exact")]
        method: MethodArg,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Greedy,
}

impl From<MethodArg> for SmoothingMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => SmoothingMethod::Exact,
            MethodArg::Greedy => SmoothingMethod::Greedy,
        }
    }
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Capacity in nats with a certified bracket.
    Capacity {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Cascade composition of two channels.
    Compose {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        w: PathBuf,
    },
    /// Memoryless n-fold extension.
    Extend {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Check the stochastic-matrix invariants.
    Validate {
        #[arg(long)]
        channel: PathBuf,
    },
}

#[derive(Subcommand)]
enum TypicalityCmd {
    /// Counting, cardinality, probability, and mass bounds.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        p: PathBuf,
        /// Adds the channel-dependent bounds when given.
        #[arg(long)]
        channel: Option<PathBuf>,
    },
    /// Enumerate the δ-typical set.
    Enumerate {
        #[arg(long)]
        p: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
        /// Include the sequences themselves, not just the count.
        #[arg(long)]
        list: bool,
    },
    /// Encoder max-information bound at a typicality constant.
    Theorem1 {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        delta: f64,
    },
    /// Alternative encoder bound; with --grid emits a comparison table.
    Remark1 {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, required_unless_present = "grid", conflicts_with = "grid")]
        delta: Option<f64>,
        /// Comma-separated deltas for a CSV comparison against theorem1.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
}

#[derive(Subcommand)]
enum HashCmd {
    /// Collision rate against the 1/M universality bound.
    Collision {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        m: usize,
        /// Enumerate all realizations instead of sampling (k <= 4).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hashed-leakage inequality check on a joint source.
    Lemma10 {
        #[arg(long)]
        joint: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        s: f64,
        /// Realizations to sample when k > 4.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct CodeArgs {
    #[arg(long)]
    v: PathBuf,
    #[arg(long)]
    w: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    m: usize,
    #[arg(long, value_enum, default_value = "random-iid")]
    inner: InnerArg,
    /// Explicit codebook file (JSON array of codewords, each an array of
    /// input-symbol labels); overrides --inner.
    #[arg(long)]
    codebook: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InnerArg {
    RandomIid,
    Repetition,
}

impl From<InnerArg> for InnerSpec {
    fn from(a: InnerArg) -> Self {
        match a {
            InnerArg::RandomIid => InnerSpec::RandomIid,
            InnerArg::Repetition => InnerSpec::Repetition,
        }
    }
}

#[derive(Subcommand)]
enum WiretapCmd {
    /// Construct a code and print its codebook.
    Build {
        #[command(flatten)]
        code: CodeArgs,
    },
    /// Average error probability (inner and end-to-end).
    Error {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value = "exact")]
        method: ErrorMethodArg,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
    },
    /// Exact leakage with the analytic bound chain.
    Leakage {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, value_enum, default_value = "enumerate")]
        hash_mode: HashModeArg,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
    },
    /// First/second-order rate scalars of a channel pair.
    Thresholds {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        w: PathBuf,
    },
    /// Smoothing schedule δ(n), ε_n and the decay-constraint ratio.
    Schedule {
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 2)]
        x_size: usize,
        #[arg(long, default_value_t = 2)]
        e_size: usize,
        /// Single blocklength (JSON output).
        #[arg(long, required_unless_present_all = ["n_start", "n_end"], conflicts_with_all = ["n_start", "n_end"])]
        n: Option<usize>,
        /// Range start for a CSV table.
        #[arg(long, requires = "n_end")]
        n_start: Option<usize>,
        /// Range end for a CSV table.
        #[arg(long, requires = "n_start")]
        n_end: Option<usize>,
    },
    /// Full achievability chain at one blocklength.
    Theorem2 {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        /// First-order rate R in nats (ln M = n R).
        #[arg(long, conflicts_with = "l_coeff", allow_hyphen_values = true)]
        rate: Option<f64>,
        /// Second-order coefficient L (ln M = n(C_V - C_U) + n^{(1+γ)/2} L).
        #[arg(long = "L", allow_hyphen_values = true)]
        l_coeff: Option<f64>,
    },
    /// Conditional-entropy gap probe over random codebooks (CSV).
    Conjecture {
        #[arg(long)]
        v: PathBuf,
        #[arg(long)]
        w: PathBuf,
        /// Comma-separated blocklengths.
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<usize>,
        #[arg(long, default_value_t = 32)]
        trials: u64,
        /// Fixed inner-index bits; defaults to the capacity rule.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ErrorMethodArg {
    Exact,
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HashModeArg {
    Enumerate,
    Sample,
}

enum Rendered {
    Json(Value),
    Csv(String),
}

#[derive(Debug)]
enum CliError {
    Lab(LabError),
    Io(String),
    Parse(String),
    Format(String),
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        CliError::Lab(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lab(e) => write!(f, "{e}"),
            CliError::Io(m) | CliError::Parse(m) | CliError::Format(m) => write!(f, "{m}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lab(LabError::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    let budget = cli.budget.or_else(budget_from_env).unwrap_or(DEFAULT_MATRIX_BUDGET);
    match dispatch(&cli.command, budget).and_then(|r| emit(r, &cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn budget_from_env() -> Option<u64> {
    std::env::var(BUDGET_ENV).ok()?.parse().ok()
}

fn emit(rendered: Rendered, cli: &Cli) -> Result<(), CliError> {
    let text = match (rendered, cli.format) {
        (Rendered::Json(mut v), None | Some(Format::Json)) => {
            round_numbers(&mut v);
            let mut s = serde_json::to_string_pretty(&v)
                .map_err(|e| CliError::Format(e.to_string()))?;
            s.push('\n');
            s
        }
        (Rendered::Csv(s), None | Some(Format::Csv)) => s,
        (Rendered::Json(_), Some(Format::Csv)) => {
            return Err(CliError::Format(
                "this subcommand produces JSON; --format csv does not apply".into(),
            ))
        }
        (Rendered::Csv(_), Some(Format::Json)) => {
            return Err(CliError::Format(
                "this subcommand produces CSV; --format json does not apply".into(),
            ))
        }
    };
    match &cli.out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

fn load_channel(path: &PathBuf) -> Result<Channel, CliError> {
    let ch: Channel = read_json(path)?;
    ch.validate()?;
    Ok(ch)
}

fn load_channel_subnormalized(path: &PathBuf) -> Result<Channel, CliError> {
    let ch: Channel = read_json(path)?;
    ch.validate_subnormalized()?;
    Ok(ch)
}

fn load_distribution(path: &PathBuf) -> Result<Distribution, CliError> {
    let d: Distribution = read_json(path)?;
    Ok(Distribution::new(d.alphabet, d.probs)?)
}

fn load_joint(path: &PathBuf) -> Result<JointDistribution, CliError> {
    let j: JointDistribution = read_json(path)?;
    Ok(JointDistribution::new(j.alphabet_a, j.alphabet_e, j.probs)?)
}

/// Finite numbers pass through; infinities become the string "inf".
fn finite_or_flag(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> Result<Value, CliError> {
    serde_json::to_value(t).map_err(|e| CliError::Format(e.to_string()))
}

fn dispatch(cmd: &Command, budget: u64) -> Result<Rendered, CliError> {
    match cmd {
        Command::Measures(c) => run_measures(c),
        Command::Channel(c) => run_channel(c, budget),
        Command::Typicality(c) => run_typicality(c, budget),
        Command::Hash(c) => run_hash(c),
        Command::Wiretap(c) => run_wiretap(c, budget),
    }
}

fn run_measures(cmd: &MeasuresCmd) -> Result<Rendered, CliError> {
    let v = match cmd {
        MeasuresCmd::Renyi { p, q, s } => {
            let d = info_measures::renyi_divergence(
                &load_distribution(p)?,
                &load_distribution(q)?,
                RenyiOrder::new(*s)?,
            )?;
            json!({"s": s, "renyi_divergence": finite_or_flag(d)})
        }
        MeasuresCmd::CondRenyi { joint, s } => {
            let h = info_measures::cond_renyi_entropy(&load_joint(joint)?, RenyiOrder::new(*s)?);
            json!({"s": s, "cond_renyi_entropy": h})
        }
        MeasuresCmd::Mutual { p, channel } => {
            let mi =
                info_measures::mutual_information(&load_distribution(p)?, &load_channel(channel)?)?;
            json!({"mutual_information": mi})
        }
        MeasuresCmd::Maxinfo { channel } => {
            let w = load_channel_subnormalized(channel)?;
            json!({"i_max": finite_or_flag(info_measures::max_information(&w))})
        }
        MeasuresCmd::SmoothMaxinfo {
            channel,
            epsilon,
            method,
        } => {
            let w = load_channel(channel)?;
            let (value, witness) =
                info_measures::smooth_max_information(&w, *epsilon, (*method).into())?;
            json!({
                "epsilon": epsilon,
                "method": method_name(*method),
                "i_max_smooth": finite_or_flag(value),
                "witness": witness.member,
            })
        }
        MeasuresCmd::Lemma8 { channel } => {
            let w = load_channel_subnormalized(channel)?;
            let check = info_measures::d2_vs_maxinfo_check(&w);
            json!({
                "lhs": finite_or_flag(check.lhs),
                "rhs": finite_or_flag(check.rhs),
                "holds": check.holds,
            })
        }
        MeasuresCmd::Lemma9 {
            channel,
            epsilon,
            method,
        } => {
            let w = load_channel(channel)?;
            let bound = info_measures::kl_leakage_bound(&w, *epsilon, (*method).into())?;
            let (smooth, _) =
                info_measures::smooth_max_information(&w, *epsilon, (*method).into())?;
            json!({
                "epsilon": epsilon,
                "method": method_name(*method),
                "bound": bound,
                "smooth_max": smooth,
            })
        }
    };
    Ok(Rendered::Json(v))
}

fn method_name(m: MethodArg) -> &'static str {
    match m {
        MethodArg::Exact => "exact",
        MethodArg::Greedy => "greedy",
    }
}

fn run_channel(cmd: &ChannelCmd, budget: u64) -> Result<Rendered, CliError> {
    let v = match cmd {
        ChannelCmd::Capacity { channel, tol } => {
            let w = load_channel(channel)?;
            let cap = capacity(&w, *tol)?;
            json!({
                "capacity": cap.value,
                "lower": cap.lower,
                "upper": cap.upper,
                "iterations": cap.iterations,
                "input_distribution": cap.input.probs,
            })
        }
        ChannelCmd::Compose { v, w } => {
            let composed = load_channel(v)?.compose(&load_channel(w)?)?;
            to_value(&composed)?
        }
        ChannelCmd::Extend { channel, n } => {
            let extended = load_channel(channel)?.extend(*n, budget)?;
            to_value(&extended)?
        }
        ChannelCmd::Validate { channel } => {
            let w = load_channel(channel)?;
            json!({
                "valid": true,
                "inputs": w.num_inputs(),
                "outputs": w.num_outputs(),
            })
        }
    };
    Ok(Rendered::Json(v))
}

fn run_typicality(cmd: &TypicalityCmd, budget: u64) -> Result<Rendered, CliError> {
    match cmd {
        TypicalityCmd::Bounds {
            n,
            delta,
            p,
            channel,
        } => {
            let dist = load_distribution(p)?;
            let params = TypicalityParams::new(*n, *delta)?;
            let counts = typicality::count_types(dist.len(), *n as u64)?;
            let mut v = json!({
                "n": n,
                "delta": delta,
                "count_types_exact": counts.exact.to_string(),
                "count_types_bound": counts.bound.to_string(),
                "typical_size_bound": typicality::typical_size_bound(&dist, &params),
            });
            if let Some(path) = channel {
                let w = load_channel(path)?;
                v["total_prob_bound"] =
                    json!(typicality::total_prob_bound(w.num_inputs(), w.num_outputs(), &params));
                v["cond_prob_bound"] =
                    json!(typicality::cond_prob_bound_for(&dist, &w, &params));
            }
            Ok(Rendered::Json(v))
        }
        TypicalityCmd::Enumerate { p, n, delta, list } => {
            let dist = load_distribution(p)?;
            let params = TypicalityParams::new(*n, *delta)?;
            let seqs = typicality::enumerate_typical(&dist, &params, budget)?;
            let mut v = json!({
                "n": n,
                "delta": delta,
                "size": seqs.len(),
                "ln_size": finite_or_flag((seqs.len() as f64).ln()),
            });
            if *list {
                let labels: Vec<String> = seqs
                    .iter()
                    .map(|s| s.iter().map(|&i| dist.alphabet[i].as_str()).collect())
                    .collect();
                v["sequences"] = json!(labels);
            }
            Ok(Rendered::Json(v))
        }
        TypicalityCmd::Theorem1 { channel, n, delta } => {
            let w = load_channel(channel)?;
            let b = typicality::theorem1_bound(&w, *n, *delta, 1e-10)?;
            Ok(Rendered::Json(json!({
                "bound": b.value,
                "eps_n": b.eps_n,
                "capacity": b.capacity,
                "capacity_term": b.capacity_term,
                "smoothing_term": b.smoothing_term,
                "type_count_term": b.type_count_term,
            })))
        }
        TypicalityCmd::Remark1 {
            channel,
            n,
            delta,
            grid,
        } => {
            let w = load_channel(channel)?;
            match grid {
                None => {
                    let delta = delta.expect("clap enforces delta without grid");
                    let b = typicality::remark1_bound(&w, *n, delta, 1e-10)?;
                    Ok(Rendered::Json(json!({
                        "n": n,
                        "delta": delta,
                        "bound": b,
                    })))
                }
                Some(deltas) => {
                    let rows: Vec<Vec<String>> = deltas
                        .iter()
                        .map(|&d| -> Result<Vec<String>, CliError> {
                            let t1 = typicality::theorem1_bound(&w, *n, d, 1e-10)?;
                            let r1 = typicality::remark1_bound(&w, *n, d, 1e-10)?;
                            Ok(vec![
                                fmt_sig9(d),
                                fmt_sig9(t1.value),
                                fmt_sig9(r1),
                                fmt_sig9(t1.eps_n),
                            ])
                        })
                        .collect::<Result<_, _>>()?;
                    Ok(Rendered::Csv(csv_document(
                        &["delta", "theorem1_bound", "remark1_bound", "eps_n"],
                        &rows,
                    )))
                }
            }
        }
    }
}

fn run_hash(cmd: &HashCmd) -> Result<Rendered, CliError> {
    let v = match cmd {
        HashCmd::Collision {
            k,
            m,
            exact,
            trials,
            seed,
        } => {
            let family = HashFamily::new(*k, *m)?;
            let rep = hashing::collision_test(&family, *exact, *trials, *seed)?;
            json!({
                "rate": rep.rate,
                "bound": rep.bound,
                "stderr": rep.stderr,
                "mode": if rep.exact { "exact" } else { "mc" },
                "trials": rep.trials,
            })
        }
        HashCmd::Lemma10 {
            joint,
            m,
            s,
            samples,
            seed,
        } => {
            let j = load_joint(joint)?;
            let na = j.alphabet_a.len();
            if !na.is_power_of_two() {
                return Err(CliError::Parse(format!(
                    "joint has {na} A-symbols; the hash domain needs a power of two"
                )));
            }
            let k = na.trailing_zeros() as usize;
            let family = HashFamily::new(k, *m)?;
            let mode = if k <= hashing::EXACT_REALIZATION_CAP {
                RealizationMode::Enumerate
            } else {
                RealizationMode::Sample {
                    count: *samples,
                    seed: *seed,
                }
            };
            let check = hashing::hash_lemma_check(&j, &family, *s, mode)?;
            json!({
                "lhs": check.lhs,
                "rhs": check.rhs,
                "holds": check.holds,
                "mode": match mode {
                    RealizationMode::Enumerate => "enumerate",
                    RealizationMode::Sample { .. } => "sample",
                },
                "realizations": check.realizations,
                "stderr": check.stderr,
            })
        }
    };
    Ok(Rendered::Json(v))
}

fn build_from_args(args: &CodeArgs, budget: u64) -> Result<wiretap::WiretapCode, CliError> {
    let v = load_channel(&args.v)?;
    let w = load_channel(&args.w)?;
    let inner = match &args.codebook {
        None => args.inner.into(),
        Some(path) => {
            let words: Vec<Vec<String>> = read_json(path)?;
            let codewords = words
                .iter()
                .map(|word| {
                    word.iter()
                        .map(|label| {
                            v.input_alphabet
                                .iter()
                                .position(|s| s == label)
                                .ok_or_else(|| {
                                    CliError::Parse(format!(
                                        "codeword symbol {label:?} not in the input alphabet"
                                    ))
                                })
                        })
                        .collect::<Result<Vec<usize>, CliError>>()
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            InnerSpec::Explicit(codewords)
        }
    };
    Ok(wiretap::build_code(
        &v, &w, args.n, args.k, args.m, inner, args.seed, budget,
    )?)
}

fn run_wiretap(cmd: &WiretapCmd, budget: u64) -> Result<Rendered, CliError> {
    match cmd {
        WiretapCmd::Build { code } => {
            let built = build_from_args(code, budget)?;
            let codewords: Vec<String> = built
                .encoder
                .codewords
                .iter()
                .map(|cw| {
                    cw.iter()
                        .map(|&x| built.v.input_alphabet[x].as_str())
                        .collect()
                })
                .collect();
            Ok(Rendered::Json(json!({
                "n": built.n,
                "k": built.k(),
                "m": built.m(),
                "inner": built.inner_kind,
                "seed": built.seed,
                "codewords": codewords,
            })))
        }
        WiretapCmd::Error {
            code,
            method,
            trials,
        } => {
            let built = build_from_args(code, budget)?;
            let mode = match method {
                ErrorMethodArg::Exact => ErrorMode::Exact,
                ErrorMethodArg::Mc => ErrorMode::MonteCarlo { trials: *trials },
            };
            let rep = wiretap::error_probability(&built, mode, code.seed, budget)?;
            Ok(Rendered::Json(json!({
                "mode": if rep.exact { "exact" } else { "mc" },
                "inner_error": rep.inner,
                "end_to_end_error": rep.end_to_end,
                "stderr_inner": rep.stderr_inner,
                "stderr_end_to_end": rep.stderr_end_to_end,
                "trials": rep.trials,
            })))
        }
        WiretapCmd::Leakage {
            code,
            hash_mode,
            samples,
            gamma,
        } => {
            let built = build_from_args(code, budget)?;
            let mode = match hash_mode {
                HashModeArg::Enumerate => RealizationMode::Enumerate,
                HashModeArg::Sample => RealizationMode::Sample {
                    count: *samples,
                    seed: code.seed,
                },
            };
            let rep = wiretap::leakage_exact(&built, mode, Some(*gamma), budget)?;
            Ok(Rendered::Json(to_value(&rep)?))
        }
        WiretapCmd::Thresholds { v, w } => {
            let t = wiretap::rate_thresholds(&load_channel(v)?, &load_channel(w)?)?;
            Ok(Rendered::Json(to_value(&t)?))
        }
        WiretapCmd::Schedule {
            gamma,
            x_size,
            e_size,
            n,
            n_start,
            n_end,
        } => match (n, n_start, n_end) {
            (Some(n), _, _) => {
                let row = wiretap::delta_schedule_eval(*n, *gamma, *x_size, *e_size)?;
                Ok(Rendered::Json(json!({
                    "n": row.n,
                    "gamma": gamma,
                    "delta_n": row.delta_n,
                    "eps_n": row.eps_n,
                    "constraint_ratio": row.constraint_ratio,
                })))
            }
            (None, Some(start), Some(end)) => {
                let rows = wiretap::schedule_table(*start, *end, *gamma, *x_size, *e_size)?;
                let csv_rows: Vec<Vec<String>> = rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            fmt_sig9(r.delta_n),
                            fmt_sig9(r.eps_n),
                            r.constraint_ratio.map_or("".into(), fmt_sig9),
                        ]
                    })
                    .collect();
                Ok(Rendered::Csv(csv_document(
                    &["n", "delta_n", "eps_n", "constraint_ratio"],
                    &csv_rows,
                )))
            }
            _ => unreachable!("clap enforces n xor n-start/n-end"),
        },
        WiretapCmd::Theorem2 {
            code,
            gamma,
            rate,
            l_coeff,
        } => {
            let v = load_channel(&code.v)?;
            let w = load_channel(&code.w)?;
            let spec = match (rate, l_coeff) {
                (Some(r), None) => RateSpec::FirstOrder { r: *r },
                (None, Some(l)) => RateSpec::SecondOrder { l: *l },
                (None, None) => RateSpec::SecondOrder { l: 0.0 },
                (Some(_), Some(_)) => unreachable!("clap conflicts_with"),
            };
            let summary = wiretap::theorem2_summary(
                &v, &w, code.n, *gamma, spec, code.k, code.m, code.seed, budget,
            )?;
            Ok(Rendered::Json(to_value(&summary)?))
        }
        WiretapCmd::Conjecture {
            v,
            w,
            n_list,
            trials,
            k,
            seed,
        } => {
            let rule = k.map_or(KRule::CapacityDefault, KRule::Fixed);
            let rows = wiretap::conjecture_probe(
                &load_channel(v)?,
                &load_channel(w)?,
                n_list,
                rule,
                *trials,
                *seed,
                budget,
            )?;
            let csv_rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        fmt_sig9(r.sqrt_n),
                        fmt_sig9(r.gap_mean),
                        fmt_sig9(r.gap_max),
                        fmt_sig9(r.gap_over_sqrt_n),
                        r.seed.to_string(),
                        r.trials.to_string(),
                    ]
                })
                .collect();
            Ok(Rendered::Csv(csv_document(
                &[
                    "n",
                    "sqrt_n",
                    "gap_mean",
                    "gap_max",
                    "gap_over_sqrt_n",
                    "seed",
                    "trials",
                ],
                &csv_rows,
            )))
        }
    }
}
