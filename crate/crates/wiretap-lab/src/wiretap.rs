//! Hash-based wiretap codes over a degraded cascade.
//!
//! The construction layers a c-universal₂ hash on top of an inner channel
//! code: messages are lifted by the uniform right inverse, sent through the
//! inner encoder, and recovered as `f_x(d0(y^n))`. The eavesdropper sees the
//! cascade `U = W ∘ V`. Exact evaluation enumerates output words under a
//! budget; Monte Carlo modes derive one ChaCha stream per trial so results
//! are reproducible and schedule-independent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hashing::{
    enumerate_realizations, sample, HashFamily, HashRealization, RealizationMode,
    EXACT_REALIZATION_CAP,
};
use crate::info_measures::{cond_renyi_entropy, RenyiOrder};
use crate::probability::{
    all_sequences, capacity, check_budget, product_labels, saturating_pow, Channel,
    Distribution, JointDistribution,
};
use crate::typicality::{theorem1_bound, EncoderMap};

/// Tolerance used for the capacity computations backing thresholds and
/// codebook sampling.
const CAPACITY_TOL: f64 = 1e-10;

/// Inner codebook construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum InnerSpec {
    /// Codewords drawn i.i.d. from the capacity-achieving input of V.
    RandomIid,
    /// Symbol repetition: message `a` maps to the all-`a` word (needs
    /// `2^k <= |X|`).
    Repetition,
    /// A caller-supplied codebook.
    Explicit(Vec<Vec<usize>>),
}

impl InnerSpec {
    pub fn label(&self) -> &'static str {
        match self {
            InnerSpec::RandomIid => "random-iid",
            InnerSpec::Repetition => "repetition",
            InnerSpec::Explicit(_) => "explicit-list",
        }
    }
}

/// A wiretap code: channels, blocklength, inner codebook, and hash layer.
///
/// The inner decoder is maximum likelihood under `V^n` with lowest-index
/// tie-breaking; it is computed on demand rather than stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WiretapCode {
    pub v: Channel,
    pub w: Channel,
    /// The eavesdropper cascade `W ∘ V`.
    pub u: Channel,
    pub n: usize,
    pub encoder: EncoderMap,
    pub family: HashFamily,
    pub inner_kind: String,
    pub seed: u64,
}

impl WiretapCode {
    pub fn k(&self) -> usize {
        self.family.domain_bits
    }

    pub fn m(&self) -> usize {
        self.family.range_bits
    }

    pub fn num_codewords(&self) -> usize {
        self.encoder.codewords.len()
    }

    /// ML inner decoding of an output word, lowest codeword index on ties.
    pub fn decode_inner(&self, y_seq: &[usize]) -> usize {
        let mut best = 0usize;
        let mut best_p = f64::NEG_INFINITY;
        for (a, cw) in self.encoder.codewords.iter().enumerate() {
            let p = self.v.word_prob(cw, y_seq);
            if p > best_p {
                best_p = p;
                best = a;
            }
        }
        best
    }

    /// Joint distribution of the uniform inner index A and the
    /// eavesdropper's word E^n.
    pub fn inner_joint(&self, budget: u64) -> Result<JointDistribution> {
        let na = self.num_codewords();
        let ne = saturating_pow(self.u.num_outputs(), self.n);
        check_budget(ne.saturating_mul(na as u128), budget)?;
        let e_seqs = all_sequences(self.u.num_outputs(), self.n);
        let probs = self
            .encoder
            .codewords
            .iter()
            .map(|cw| {
                e_seqs
                    .iter()
                    .map(|es| self.u.word_prob(cw, es) / na as f64)
                    .collect()
            })
            .collect();
        Ok(JointDistribution::new_unchecked(
            self.encoder.domain.clone(),
            product_labels(&self.u.output_alphabet, self.n),
            probs,
        ))
    }
}

fn message_labels(k: usize) -> Vec<String> {
    (0..1usize << k).map(|a| format!("{a:0k$b}")).collect()
}

fn sample_iid_codeword(p: &Distribution, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, &pi) in p.probs.iter().enumerate() {
                acc += pi;
                if u < acc {
                    return i;
                }
            }
            p.probs.len() - 1
        })
        .collect()
}

/// Assembles a wiretap code.
///
/// `k` inner-index bits and `m` message bits, so `M = 2^m` divides
/// `|A| = 2^k`. Random codebooks draw each codeword from its own ChaCha
/// stream, so construction is reproducible and order-independent.
#[allow(clippy::too_many_arguments)]
pub fn build_code(
    v: &Channel,
    w: &Channel,
    n: usize,
    k: usize,
    m: usize,
    inner: InnerSpec,
    seed: u64,
    budget: u64,
) -> Result<WiretapCode> {
    v.validate()?;
    w.validate()?;
    let u = v.compose(w)?;
    let family = HashFamily::new(k, m)?;
    if n == 0 {
        return Err(Error::InvalidParameter("blocklength n must be >= 1".into()));
    }
    let na = 1usize << k;
    check_budget((na as u128).saturating_mul(n as u128), budget)?;
    let codewords = match &inner {
        InnerSpec::RandomIid => {
            let cap = capacity(v, CAPACITY_TOL)?;
            (0..na)
                .map(|a| {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    rng.set_stream(a as u64);
                    sample_iid_codeword(&cap.input, n, &mut rng)
                })
                .collect()
        }
        InnerSpec::Repetition => {
            if na > v.num_inputs() {
                return Err(Error::InvalidEncoder(format!(
                    "repetition needs 2^k <= |X| but 2^{k} > {}",
                    v.num_inputs()
                )));
            }
            (0..na).map(|a| vec![a; n]).collect()
        }
        InnerSpec::Explicit(cws) => {
            if cws.len() != na {
                return Err(Error::InvalidEncoder(format!(
                    "explicit codebook has {} words, expected 2^{k}",
                    cws.len()
                )));
            }
            for cw in cws {
                if cw.len() != n {
                    return Err(Error::InvalidEncoder(format!(
                        "codeword length {} differs from n = {n}",
                        cw.len()
                    )));
                }
                if let Some(&bad) = cw.iter().find(|&&x| x >= v.num_inputs()) {
                    return Err(Error::UnknownSymbol {
                        index: bad,
                        alphabet_size: v.num_inputs(),
                    });
                }
            }
            cws.clone()
        }
    };
    let encoder = EncoderMap::new(message_labels(k), codewords)?;
    Ok(WiretapCode {
        v: v.clone(),
        w: w.clone(),
        u,
        n,
        encoder,
        family,
        inner_kind: inner.label().to_string(),
        seed,
    })
}

/// Error evaluation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ErrorMode {
    Exact,
    MonteCarlo { trials: u64 },
}

/// Average error probabilities of a wiretap code.
///
/// The end-to-end figure hashes both the decoded and true inner indices
/// through the realization sampled from `seed`; it never exceeds the inner
/// error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub inner: f64,
    pub end_to_end: f64,
    pub stderr_inner: Option<f64>,
    pub stderr_end_to_end: Option<f64>,
    pub exact: bool,
    pub trials: Option<u64>,
}

/// Average error probability, exact by output-word enumeration or by
/// Monte Carlo with per-trial streams.
pub fn error_probability(
    code: &WiretapCode,
    mode: ErrorMode,
    seed: u64,
    budget: u64,
) -> Result<ErrorReport> {
    let realization = sample(&code.family, seed);
    match mode {
        ErrorMode::Exact => {
            let na = code.num_codewords();
            let ny = saturating_pow(code.v.num_outputs(), code.n);
            check_budget(ny.saturating_mul(na as u128), budget)?;
            let mut inner_correct = 0.0;
            let mut e2e_correct = 0.0;
            for y_seq in all_sequences(code.v.num_outputs(), code.n) {
                let decoded = code.decode_inner(&y_seq);
                let hashed = realization.apply(decoded as u32);
                for (a, cw) in code.encoder.codewords.iter().enumerate() {
                    let p = code.v.word_prob(cw, &y_seq) / na as f64;
                    if decoded == a {
                        inner_correct += p;
                    }
                    if hashed == realization.apply(a as u32) {
                        e2e_correct += p;
                    }
                }
            }
            Ok(ErrorReport {
                inner: (1.0 - inner_correct).max(0.0),
                end_to_end: (1.0 - e2e_correct).max(0.0),
                stderr_inner: None,
                stderr_end_to_end: None,
                exact: true,
                trials: None,
            })
        }
        ErrorMode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::InvalidParameter("trials must be >= 1".into()));
            }
            let na = code.num_codewords();
            let mut inner_err = 0u64;
            let mut e2e_err = 0u64;
            for t in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t + 1); // stream 0 is unused; decouples from sample()
                let a = rng.random_range(0..na as u64) as usize;
                let y_seq: Vec<usize> = code.encoder.codewords[a]
                    .iter()
                    .map(|&x| {
                        let u: f64 = rng.random();
                        let row = &code.v.rows[x];
                        let mut acc = 0.0;
                        for (y, &p) in row.iter().enumerate() {
                            acc += p;
                            if u < acc {
                                return y;
                            }
                        }
                        row.len() - 1
                    })
                    .collect();
                let decoded = code.decode_inner(&y_seq);
                if decoded != a {
                    inner_err += 1;
                }
                if realization.apply(decoded as u32) != realization.apply(a as u32) {
                    e2e_err += 1;
                }
            }
            let tf = trials as f64;
            let inner = inner_err as f64 / tf;
            let e2e = e2e_err as f64 / tf;
            Ok(ErrorReport {
                inner,
                end_to_end: e2e,
                stderr_inner: Some((inner * (1.0 - inner) / tf).sqrt()),
                stderr_end_to_end: Some((e2e * (1.0 - e2e) / tf).sqrt()),
                exact: false,
                trials: Some(trials),
            })
        }
    }
}

/// Reference bounds attached to a leakage report: the encoder
/// max-information bound at the schedule's smoothing level and, when the
/// level permits, the induced bound on the pre-hash leakage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeakageBoundChain {
    pub gamma: f64,
    pub delta_n: f64,
    pub eps_n: f64,
    /// Theorem-style bound on `I_max^{eps_n}(U ∘ e0)`.
    pub imax_bound: f64,
    /// Bound on `C_1(A | E^n)`; `None` when `eps_n >= 1 - e^{-1}`.
    pub c1_inner_bound: Option<f64>,
}

/// Exact (or realization-sampled) leakage figures for a wiretap code.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageReport {
    pub n: usize,
    pub k: usize,
    pub m: usize,
    /// `ln M = m ln 2`.
    pub ln_message_space: f64,
    pub hash_mode: String,
    pub hash_realizations: u64,
    /// `C_1(f(A) | E^n X)`: average over realizations of the per-realization
    /// leakage (the hash seed is public).
    pub c1_hashed_given_x: f64,
    pub c1_hashed_stderr: Option<f64>,
    /// Leakage of the X-marginalized hashed joint (hash seed withheld).
    pub c1_hashed_marginal: f64,
    /// Pre-hash leakage `C_1(A | E^n)`.
    pub c1_inner: f64,
    /// Exact average error probabilities, present when the legitimate
    /// channel's output space fits the budget.
    pub error_inner: Option<f64>,
    pub error_end_to_end: Option<f64>,
    pub bounds: Option<LeakageBoundChain>,
}

/// Exact leakage of a wiretap code.
///
/// Builds the joint law of the uniform inner index and the eavesdropper
/// word, then averages `C_1(f_x(A) | E^n) = ln M - H(f_x(A) | E^n)` over
/// hash realizations (all of them for `Enumerate`, counter-seeded draws for
/// `Sample`). Supplying `gamma` attaches the analytic bound chain at the
/// blocklength schedule's smoothing level.
pub fn leakage_exact(
    code: &WiretapCode,
    mode: RealizationMode,
    gamma: Option<f64>,
    budget: u64,
) -> Result<LeakageReport> {
    let joint = code.inner_joint(budget)?;
    let ln_m = (code.family.range_size() as f64).ln();
    let c1_inner = (code.family.domain_size() as f64).ln() - joint.cond_entropy_a_given_e();

    let c1_for = |r: &HashRealization| -> f64 {
        let hashed = crate::hashing::pushforward_joint(&joint, r);
        ln_m - hashed.cond_entropy_a_given_e()
    };

    let ne = joint.alphabet_e.len();
    let mut marginal = vec![vec![0.0; ne]; code.family.range_size() as usize];
    let mut add_to_marginal = |r: &HashRealization, weight: f64| {
        let hashed = crate::hashing::pushforward_joint(&joint, r);
        for (mi, row) in hashed.probs.iter().enumerate() {
            for (e, &p) in row.iter().enumerate() {
                marginal[mi][e] += weight * p;
            }
        }
    };

    let (mode_label, c1_given_x, stderr, count) = match mode {
        RealizationMode::Enumerate => {
            if code.k() > EXACT_REALIZATION_CAP {
                return Err(Error::BudgetExceeded {
                    required: code.k() as u128,
                    budget: EXACT_REALIZATION_CAP as u64,
                });
            }
            let realizations = enumerate_realizations(&code.family);
            let weight = 1.0 / realizations.len() as f64;
            let mut sum = 0.0;
            for r in &realizations {
                sum += c1_for(r);
                add_to_marginal(r, weight);
            }
            (
                "enumerate",
                sum / realizations.len() as f64,
                None,
                realizations.len() as u64,
            )
        }
        RealizationMode::Sample { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidParameter("sample count must be >= 1".into()));
            }
            let weight = 1.0 / count as f64;
            let mut sum = 0.0;
            let mut sq = 0.0;
            for t in 0..count {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let r = crate::hashing::sample_with_rng(&code.family, &mut rng);
                let v = c1_for(&r);
                sum += v;
                sq += v * v;
                add_to_marginal(&r, weight);
            }
            let mean = sum / count as f64;
            let var = (sq / count as f64 - mean * mean).max(0.0);
            ("sample", mean, Some((var / count as f64).sqrt()), count)
        }
    };

    let marginal_joint = JointDistribution::new_unchecked(
        (0..marginal.len())
            .map(|mi| format!("{mi:0width$b}", width = code.m()))
            .collect(),
        joint.alphabet_e.clone(),
        marginal,
    );
    let c1_marginal = ln_m - marginal_joint.cond_entropy_a_given_e();

    let bounds = match gamma {
        None => None,
        Some(g) => {
            let schedule = delta_schedule_eval(
                code.n,
                g,
                code.u.num_inputs(),
                code.u.num_outputs(),
            )?;
            let t1 = theorem1_bound(&code.u, code.n, schedule.delta_n, CAPACITY_TOL)?;
            let limit = 1.0 - (-1.0f64).exp();
            let c1_inner_bound = (schedule.eps_n < limit).then(|| {
                let eps = schedule.eps_n;
                t1.value - (1.0 - eps) * (1.0 - eps).ln()
                    + eps * (code.family.domain_size() as f64).ln()
            });
            Some(LeakageBoundChain {
                gamma: g,
                delta_n: schedule.delta_n,
                eps_n: schedule.eps_n,
                imax_bound: t1.value,
                c1_inner_bound,
            })
        }
    };

    let (error_inner, error_end_to_end) =
        match error_probability(code, ErrorMode::Exact, code.seed, budget) {
            Ok(rep) => (Some(rep.inner), Some(rep.end_to_end)),
            Err(Error::BudgetExceeded { .. }) => (None, None),
            Err(e) => return Err(e),
        };

    Ok(LeakageReport {
        n: code.n,
        k: code.k(),
        m: code.m(),
        ln_message_space: ln_m,
        hash_mode: mode_label.to_string(),
        hash_realizations: count,
        c1_hashed_given_x: c1_given_x,
        c1_hashed_stderr: stderr,
        c1_hashed_marginal: c1_marginal,
        c1_inner,
        error_inner,
        error_end_to_end,
        bounds,
    })
}

/// The five rate scalars of the achievability analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateThresholds {
    pub c_v: f64,
    pub c_u: f64,
    /// `C_V - C_U`.
    pub first_order: f64,
    /// `-ln` of the cascade's smallest positive transition probability.
    pub u_c: f64,
    /// `-2 U_c |X| |E|`: second-order coefficients below this drive the
    /// leakage to zero.
    pub second_order_threshold: f64,
}

pub fn rate_thresholds(v: &Channel, w: &Channel) -> Result<RateThresholds> {
    let u = v.compose(w)?;
    let c_v = capacity(v, CAPACITY_TOL)?.value;
    let c_u = capacity(&u, CAPACITY_TOL)?.value;
    let u_c = u.min_log_constant().value;
    Ok(RateThresholds {
        c_v,
        c_u,
        first_order: c_v - c_u,
        u_c,
        second_order_threshold: -2.0 * u_c * (u.num_inputs() * u.num_outputs()) as f64,
    })
}

/// `ln |M_n| = n R + n^{(1+gamma)/2} L` for `gamma` in (0, 1).
pub fn message_set_size(n: usize, r: f64, l: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    let nf = n as f64;
    Ok(nf * r + nf.powf((1.0 + gamma) / 2.0) * l)
}

/// The rate bundle of a code family: first-order rate `r` (nats/symbol),
/// second-order coefficient `l` (nats per n^{(1+gamma)/2}), the schedule
/// exponent `gamma`, and the average-error budget carried as a report
/// column (it is never enforced).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateParameters {
    pub r: f64,
    pub l: f64,
    pub gamma: f64,
    pub target_error: Option<f64>,
}

impl RateParameters {
    pub fn new(r: f64, l: f64, gamma: f64, target_error: Option<f64>) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::GammaOutOfRange(gamma));
        }
        if let Some(eps) = target_error {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::InvalidParameter(format!(
                    "target error {eps} outside [0, 1]"
                )));
            }
        }
        Ok(Self {
            r,
            l,
            gamma,
            target_error,
        })
    }

    /// `ln |M_n|` at blocklength n.
    pub fn ln_message_set(&self, n: usize) -> f64 {
        let nf = n as f64;
        nf * self.r + nf.powf((1.0 + self.gamma) / 2.0) * self.l
    }

    /// The smoothing schedule at blocklength n for the given alphabet sizes.
    pub fn schedule(&self, n: usize, x_size: usize, e_size: usize) -> Result<ScheduleRow> {
        delta_schedule_eval(n, self.gamma, x_size, e_size)
    }
}

/// One row of the blocklength schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleRow {
    pub n: usize,
    /// `delta(n) = n^{(gamma - 1)/2}`.
    pub delta_n: f64,
    /// `eps_n = 2 |X| |E| e^{-2 n^gamma}`.
    pub eps_n: f64,
    /// `n e^{-2 n^gamma} / ln n`; `None` at n = 1.
    pub constraint_ratio: Option<f64>,
}

/// Evaluates the smoothing schedule at one blocklength.
pub fn delta_schedule_eval(
    n: usize,
    gamma: f64,
    x_size: usize,
    e_size: usize,
) -> Result<ScheduleRow> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    if n == 0 {
        return Err(Error::InvalidParameter("n must be >= 1".into()));
    }
    let nf = n as f64;
    let decay = (-2.0 * nf.powf(gamma)).exp();
    Ok(ScheduleRow {
        n,
        delta_n: nf.powf((gamma - 1.0) / 2.0),
        eps_n: 2.0 * (x_size * e_size) as f64 * decay,
        constraint_ratio: (n > 1).then(|| nf * decay / nf.ln()),
    })
}

/// Schedule over an inclusive n range.
pub fn schedule_table(
    n_start: usize,
    n_end: usize,
    gamma: f64,
    x_size: usize,
    e_size: usize,
) -> Result<Vec<ScheduleRow>> {
    if n_start == 0 || n_end < n_start {
        return Err(Error::InvalidParameter(format!(
            "bad schedule range {n_start}..={n_end}"
        )));
    }
    (n_start..=n_end)
        .map(|n| delta_schedule_eval(n, gamma, x_size, e_size))
        .collect()
}

/// Rule for the inner-index width in the conjecture probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KRule {
    /// `k = max(1, floor(n C_V / ln 2))`, clipped to the joint budget.
    CapacityDefault,
    Fixed(usize),
}

/// One per-blocklength row of the conjecture probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub sqrt_n: f64,
    pub gap_mean: f64,
    pub gap_max: f64,
    /// `gap_max / sqrt(n)`.
    pub gap_over_sqrt_n: f64,
    pub seed: u64,
    pub trials: u64,
}

/// Probes the gap `|H(A|E^n) - H_{1 + 1/sqrt(n)}(A|E^n)|` over random
/// capacity-ensemble codebooks. Reports statistics only; no verdict.
pub fn conjecture_probe(
    v: &Channel,
    w: &Channel,
    ns: &[usize],
    k_rule: KRule,
    trials: u64,
    seed: u64,
    budget: u64,
) -> Result<Vec<ProbeRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let u = v.compose(w)?;
    let cap = capacity(v, CAPACITY_TOL)?;
    let mut rows = Vec::with_capacity(ns.len());
    for (n_idx, &n) in ns.iter().enumerate() {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        let ne = saturating_pow(u.num_outputs(), n);
        let mut k_cap = 0usize;
        while k_cap < 24 && saturating_pow(2, k_cap + 1).saturating_mul(ne) <= budget as u128 {
            k_cap += 1;
        }
        if k_cap == 0 {
            return Err(Error::BudgetExceeded {
                required: ne.saturating_mul(2),
                budget,
            });
        }
        let k = match k_rule {
            KRule::Fixed(k) => {
                check_budget(saturating_pow(2, k).saturating_mul(ne), budget)?;
                k.max(1)
            }
            KRule::CapacityDefault => {
                let ideal = (n as f64 * cap.value / std::f64::consts::LN_2).floor() as usize;
                ideal.clamp(1, k_cap)
            }
        };
        let na = 1usize << k;
        let e_seqs = all_sequences(u.num_outputs(), n);
        let s = RenyiOrder::new(1.0 / (n as f64).sqrt())?;
        let mut gap_sum = 0.0;
        let mut gap_max = 0.0f64;
        for t in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((n_idx as u64) << 32 | t);
            let codewords: Vec<Vec<usize>> = (0..na)
                .map(|_| sample_iid_codeword(&cap.input, n, &mut rng))
                .collect();
            let probs: Vec<Vec<f64>> = codewords
                .iter()
                .map(|cw| {
                    e_seqs
                        .iter()
                        .map(|es| u.word_prob(cw, es) / na as f64)
                        .collect()
                })
                .collect();
            let joint = JointDistribution::new_unchecked(
                message_labels(k),
                product_labels(&u.output_alphabet, n),
                probs,
            );
            let gap =
                (joint.cond_entropy_a_given_e() - cond_renyi_entropy(&joint, s)).abs();
            gap_sum += gap;
            gap_max = gap_max.max(gap);
        }
        let sqrt_n = (n as f64).sqrt();
        rows.push(ProbeRow {
            n,
            sqrt_n,
            gap_mean: gap_sum / trials as f64,
            gap_max,
            gap_over_sqrt_n: gap_max / sqrt_n,
            seed,
            trials,
        });
    }
    Ok(rows)
}

/// How the target message-set size is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateSpec {
    /// `ln M_n = n R`.
    FirstOrder { r: f64 },
    /// `ln M_n = n (C_V - C_U) + n^{(1+gamma)/2} L`.
    SecondOrder { l: f64 },
}

/// The computable terms of the conditional-entropy lower bound. The true
/// bound carries an additional `+O(sqrt(n))` term whose constant is not
/// pinned down; it is reported symbolically, never numerically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CondEntropyLower {
    /// `n (C_V - C_U)`.
    pub first_order_term: f64,
    /// `-2 U_c |X| |E| n^{(1+gamma)/2}`.
    pub second_order_term: f64,
    /// Always the literal `"+O(sqrt(n))"`.
    pub remainder: String,
}

/// Exactly measured per-instance quantities, present when budgets allow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasuredLeakage {
    /// Pre-hash leakage `C_1(A | E^n)`.
    pub c1_inner: f64,
    pub h_a_given_en: f64,
    /// Conditional Rényi entropy at order `1 + 1/sqrt(n)`.
    pub h_renyi_a_given_en: f64,
    /// `1 + M^s e^{-s H_{1+s}(A|E^n)}` at `s = 1/sqrt(n)`.
    pub hash_bound_rhs: f64,
    /// `(1/s) ln` of the above: upper bound on the hashed leakage.
    pub c1_upper_from_hash_bound: f64,
    pub c1_hashed_given_x: f64,
    pub c1_hashed_stderr: Option<f64>,
    pub hash_realizations: u64,
}

/// Full bound-chain summary for one blocklength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem2Summary {
    pub n: usize,
    pub gamma: f64,
    pub k: usize,
    pub m: usize,
    pub s: f64,
    pub thresholds: RateThresholds,
    pub delta_n: f64,
    pub eps_n: f64,
    /// Target `ln M_n` from the rate specification.
    pub ln_m_target: f64,
    /// Realized `ln M = m ln 2`.
    pub ln_m_actual: f64,
    /// Encoder bound on `I_max^{eps_n}(U ∘ e0)`.
    pub imax_bound: f64,
    /// Induced bound on `C_1(A|E^n)`; `None` when `eps_n >= 1 - e^{-1}`.
    pub c1_inner_bound: Option<f64>,
    pub cond_entropy_lower: CondEntropyLower,
    pub measured: Option<MeasuredLeakage>,
}

/// Evaluates the whole achievability chain at blocklength `n` for a
/// random-iid inner code with `2^k` codewords hashed to `m` bits.
///
/// Analytic terms are always present; the measured block appears whenever
/// the exact joint fits the budget, using realization enumeration for
/// `k <= 4` and 1000 sampled realizations otherwise.
#[allow(clippy::too_many_arguments)]
pub fn theorem2_summary(
    v: &Channel,
    w: &Channel,
    n: usize,
    gamma: f64,
    rate: RateSpec,
    k: usize,
    m: usize,
    seed: u64,
    budget: u64,
) -> Result<Theorem2Summary> {
    let thresholds = rate_thresholds(v, w)?;
    let code = build_code(v, w, n, k, m, InnerSpec::RandomIid, seed, budget)?;
    let schedule =
        delta_schedule_eval(n, gamma, code.u.num_inputs(), code.u.num_outputs())?;
    let t1 = theorem1_bound(&code.u, n, schedule.delta_n, CAPACITY_TOL)?;
    let limit = 1.0 - (-1.0f64).exp();
    let c1_inner_bound = (schedule.eps_n < limit).then(|| {
        let eps = schedule.eps_n;
        t1.value - (1.0 - eps) * (1.0 - eps).ln()
            + eps * (code.family.domain_size() as f64).ln()
    });
    let nf = n as f64;
    let cond_entropy_lower = CondEntropyLower {
        first_order_term: nf * thresholds.first_order,
        second_order_term: -2.0
            * thresholds.u_c
            * (code.u.num_inputs() * code.u.num_outputs()) as f64
            * nf.powf((1.0 + gamma) / 2.0),
        remainder: "+O(sqrt(n))".to_string(),
    };
    let ln_m_target = match rate {
        RateSpec::FirstOrder { r } => message_set_size(n, r, 0.0, gamma)?,
        RateSpec::SecondOrder { l } => message_set_size(n, thresholds.first_order, l, gamma)?,
    };
    let s = 1.0 / nf.sqrt();

    let measured = match code.inner_joint(budget) {
        Err(Error::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e),
        Ok(joint) => {
            let h_shannon = joint.cond_entropy_a_given_e();
            let h_renyi = cond_renyi_entropy(&joint, RenyiOrder::new(s)?);
            let m_size = code.family.range_size() as f64;
            let rhs = 1.0 + m_size.powf(s) * (-s * h_renyi).exp();
            let mode = if k <= EXACT_REALIZATION_CAP {
                RealizationMode::Enumerate
            } else {
                RealizationMode::Sample {
                    count: 1000,
                    seed,
                }
            };
            let leak = leakage_exact(&code, mode, None, budget)?;
            Some(MeasuredLeakage {
                c1_inner: leak.c1_inner,
                h_a_given_en: h_shannon,
                h_renyi_a_given_en: h_renyi,
                hash_bound_rhs: rhs,
                c1_upper_from_hash_bound: rhs.ln() / s,
                c1_hashed_given_x: leak.c1_hashed_given_x,
                c1_hashed_stderr: leak.c1_hashed_stderr,
                hash_realizations: leak.hash_realizations,
            })
        }
    };

    Ok(Theorem2Summary {
        n,
        gamma,
        k,
        m,
        s,
        thresholds,
        delta_n: schedule.delta_n,
        eps_n: schedule.eps_n,
        ln_m_target,
        ln_m_actual: m as f64 * std::f64::consts::LN_2,
        imax_bound: t1.value,
        c1_inner_bound,
        cond_entropy_lower,
        measured,
    })
}
