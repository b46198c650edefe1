//! Method of types: sequence types, typical and conditionally typical sets,
//! and the counting/probability/mass bounds built on them.
//!
//! Sequences are index vectors over an ordered alphabet; every enumeration
//! walks lexicographic order so outputs are deterministic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::{
    all_sequences, check_budget, saturating_pow, Channel, Distribution,
};

/// The type (empirical distribution) of a sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceType {
    pub alphabet: Vec<String>,
    pub counts: Vec<u64>,
    pub n: usize,
}

impl SequenceType {
    /// The induced distribution `P(a) = counts[a] / n`.
    pub fn induced(&self) -> Distribution {
        Distribution::new_unchecked(
            self.alphabet.clone(),
            self.counts
                .iter()
                .map(|&c| c as f64 / self.n as f64)
                .collect(),
        )
    }
}

/// Blocklength and typicality constant for the set definitions and bounds.
///
/// `delta = 0` is accepted (it selects exact-type membership); the analytic
/// bounds are only informative for `delta > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalityParams {
    pub n: usize,
    pub delta: f64,
}

impl TypicalityParams {
    pub fn new(n: usize, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        if !(delta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "delta = {delta} must be nonnegative"
            )));
        }
        Ok(Self { n, delta })
    }
}

/// A deterministic encoder: one length-n codeword per domain element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncoderMap {
    pub domain: Vec<String>,
    pub codewords: Vec<Vec<usize>>,
}

impl EncoderMap {
    pub fn new(domain: Vec<String>, codewords: Vec<Vec<usize>>) -> Result<Self> {
        if domain.len() != codewords.len() {
            return Err(Error::InvalidEncoder(format!(
                "{} domain elements but {} codewords",
                domain.len(),
                codewords.len()
            )));
        }
        if codewords.is_empty() {
            return Err(Error::InvalidEncoder("empty codebook".into()));
        }
        let n = codewords[0].len();
        if n == 0 || codewords.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidEncoder(
                "codewords must share a positive length".into(),
            ));
        }
        Ok(Self { domain, codewords })
    }

    pub fn blocklength(&self) -> usize {
        self.codewords[0].len()
    }
}

/// Empirical type of `x_n` over the given alphabet.
pub fn type_of(x_n: &[usize], alphabet: &[String]) -> Result<SequenceType> {
    let mut counts = vec![0u64; alphabet.len()];
    for &sym in x_n {
        if sym >= alphabet.len() {
            return Err(Error::UnknownSymbol {
                index: sym,
                alphabet_size: alphabet.len(),
            });
        }
        counts[sym] += 1;
    }
    Ok(SequenceType {
        alphabet: alphabet.to_vec(),
        counts,
        n: x_n.len(),
    })
}

/// Exact number of types together with the `(n+1)^k` counting bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeCount {
    pub exact: u128,
    pub bound: u128,
}

/// Number of distinct types of length-`n` sequences over `k` symbols:
/// `C(n + k - 1, k - 1)`, plus the standard `(n+1)^k` upper bound.
pub fn count_types(k: usize, n: u64) -> Result<TypeCount> {
    if k == 0 || n == 0 {
        return Err(Error::InvalidParameter(
            "count_types needs k >= 1 and n >= 1".into(),
        ));
    }
    // C(n+k-1, k-1) multiplicatively, keeping intermediates exact.
    let mut exact: u128 = 1;
    for i in 1..=(k as u128 - 1) {
        exact = exact
            .checked_mul(n as u128 + i)
            .ok_or(Error::Overflow("type count"))?
            / i;
    }
    let mut bound: u128 = 1;
    for _ in 0..k {
        bound = bound
            .checked_mul(n as u128 + 1)
            .ok_or(Error::Overflow("type count bound"))?;
    }
    Ok(TypeCount { exact, bound })
}

/// Membership in the δ-typical set of `p`: every symbol frequency within
/// `delta` of its probability, and no zero-probability symbol present.
pub fn is_typical(x_n: &[usize], p: &Distribution, delta: f64) -> bool {
    let n = x_n.len() as f64;
    let mut counts = vec![0u64; p.len()];
    for &sym in x_n {
        if sym >= p.len() || p.probs[sym] == 0.0 {
            return false;
        }
        counts[sym] += 1;
    }
    counts
        .iter()
        .zip(p.probs.iter())
        .all(|(&c, &pa)| (c as f64 / n - pa).abs() <= delta + 1e-12)
}

/// Conditional typicality of `y_n` given `x_n` under channel `w`: joint
/// pair frequencies within `delta` of `N(a|x) W(b|a) / n`, and no pair with
/// a zero transition probability present.
pub fn is_cond_typical(
    y_n: &[usize],
    x_n: &[usize],
    w: &Channel,
    delta: f64,
) -> Result<bool> {
    if y_n.len() != x_n.len() {
        return Err(Error::LengthMismatch(format!(
            "y has length {} but x has length {}",
            y_n.len(),
            x_n.len()
        )));
    }
    let n = x_n.len() as f64;
    let (nx, ny) = (w.num_inputs(), w.num_outputs());
    let mut pair_counts = vec![0u64; nx * ny];
    let mut x_counts = vec![0u64; nx];
    for (&a, &b) in x_n.iter().zip(y_n.iter()) {
        if a >= nx {
            return Err(Error::UnknownSymbol {
                index: a,
                alphabet_size: nx,
            });
        }
        if b >= ny {
            return Err(Error::UnknownSymbol {
                index: b,
                alphabet_size: ny,
            });
        }
        if w.rows[a][b] == 0.0 {
            return Ok(false);
        }
        pair_counts[a * ny + b] += 1;
        x_counts[a] += 1;
    }
    for a in 0..nx {
        for b in 0..ny {
            let empirical = pair_counts[a * ny + b] as f64 / n;
            let target = x_counts[a] as f64 * w.rows[a][b] / n;
            if (empirical - target).abs() > delta + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All δ-typical sequences for `p` at blocklength `params.n`, lexicographic.
pub fn enumerate_typical(
    p: &Distribution,
    params: &TypicalityParams,
    budget: u64,
) -> Result<Vec<Vec<usize>>> {
    check_budget(saturating_pow(p.len(), params.n), budget)?;
    Ok(all_sequences(p.len(), params.n)
        .into_iter()
        .filter(|seq| is_typical(seq, p, params.delta))
        .collect())
}

/// All conditionally typical output sequences for `x_n` under `w`.
pub fn enumerate_cond_typical(
    x_n: &[usize],
    w: &Channel,
    delta: f64,
    budget: u64,
) -> Result<Vec<Vec<usize>>> {
    check_budget(saturating_pow(w.num_outputs(), x_n.len()), budget)?;
    let mut out = Vec::new();
    for seq in all_sequences(w.num_outputs(), x_n.len()) {
        if is_cond_typical(&seq, x_n, w, delta)? {
            out.push(seq);
        }
    }
    Ok(out)
}

/// Upper bound on `ln |T^n_{[P]_delta}|`:
/// `n H(P) - n delta |X| ln(min_{a in supp(P)} P(a))`.
pub fn typical_size_bound(p: &Distribution, params: &TypicalityParams) -> f64 {
    let n = params.n as f64;
    let min = p
        .min_support_prob()
        .expect("typical_size_bound needs a distribution with nonempty support");
    n * p.entropy() - n * params.delta * p.len() as f64 * min.ln()
}

/// Upper bound on `ln W^n(y^n | x^n)` for any `y^n` conditionally typical
/// given a sequence of type `x_type`:
/// `-n H(W|P) + n delta W_c |X| |Y|`.
pub fn cond_prob_bound(x_type: &SequenceType, w: &Channel, params: &TypicalityParams) -> f64 {
    cond_prob_bound_for(&x_type.induced(), w, params)
}

/// Same bound evaluated directly at a codeword-type distribution `p`.
pub fn cond_prob_bound_for(p: &Distribution, w: &Channel, params: &TypicalityParams) -> f64 {
    let n = params.n as f64;
    let cond_entropy: f64 = p
        .probs
        .iter()
        .zip(w.rows.iter())
        .map(|(&px, row)| {
            px * -row
                .iter()
                .map(|&q| crate::probability::xlnx(q))
                .sum::<f64>()
        })
        .sum();
    let wc = w.min_log_constant().value;
    -n * cond_entropy + n * params.delta * wc * (w.num_inputs() * w.num_outputs()) as f64
}

/// Lower bound on the conditional-typical mass:
/// `1 - 2 |X| |Y| e^{-2 n delta^2}`, floored at 0 for reporting.
pub fn total_prob_bound(x_size: usize, y_size: usize, params: &TypicalityParams) -> f64 {
    let raw = 1.0
        - 2.0
            * (x_size * y_size) as f64
            * (-2.0 * params.n as f64 * params.delta * params.delta).exp();
    raw.max(0.0)
}

/// Composed typicality constant `delta'' = (delta + delta') |X|` under which
/// the output projection of a conditionally typical pair stays typical.
pub fn delta_composition(delta: f64, delta_prime: f64, x_size: usize) -> f64 {
    (delta + delta_prime) * x_size as f64
}

/// The encoder smoothing bound and its smoothing level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EncoderMaxInfoBound {
    /// `n C(W) + 2 n delta W_c |X| |Z| + |X| ln(n+1)`, nats.
    pub value: f64,
    /// `eps_n = 2 |X| |Z| e^{-2 n delta^2}`.
    pub eps_n: f64,
    pub capacity_term: f64,
    pub smoothing_term: f64,
    pub type_count_term: f64,
    /// Capacity of the single-letter channel used in the first term.
    pub capacity: f64,
}

/// Upper bound on `I_max^{eps_n}(W^n ∘ e0)` valid for every encoder `e0`
/// into `X^n`, at typicality constant `delta`.
pub fn theorem1_bound(w: &Channel, n: usize, delta: f64, tol: f64) -> Result<EncoderMaxInfoBound> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} must be positive"
        )));
    }
    let cap = crate::probability::capacity(w, tol)?;
    let nf = n as f64;
    let sizes = (w.num_inputs() * w.num_outputs()) as f64;
    let capacity_term = nf * cap.value;
    let smoothing_term = 2.0 * nf * delta * w.min_log_constant().value * sizes;
    let type_count_term = w.num_inputs() as f64 * (nf + 1.0).ln();
    Ok(EncoderMaxInfoBound {
        value: capacity_term + smoothing_term + type_count_term,
        eps_n: 2.0 * sizes * (-2.0 * nf * delta * delta).exp(),
        capacity_term,
        smoothing_term,
        type_count_term,
        capacity: cap.value,
    })
}

/// Alternative encoder bound
/// `n C(W) - n |X| |Z| delta ln(delta^2 |X|) + (|X| + |Z|) ln(n+1)`,
/// valid for `0 < delta <= 1 / (2 |X| |Z|)`. Used for comparison tables only.
pub fn remark1_bound(w: &Channel, n: usize, delta: f64, tol: f64) -> Result<f64> {
    let sizes = (w.num_inputs() * w.num_outputs()) as f64;
    let limit = 1.0 / (2.0 * sizes);
    if !(delta > 0.0 && delta <= limit) {
        return Err(Error::DeltaOutOfRange { delta, limit });
    }
    let cap = crate::probability::capacity(w, tol)?;
    let nf = n as f64;
    Ok(nf * cap.value - nf * sizes * delta * (delta * delta * w.num_inputs() as f64).ln()
        + (w.num_inputs() + w.num_outputs()) as f64 * (nf + 1.0).ln())
}

/// The combined channel `W^n ∘ e0`: input alphabet is the encoder domain,
/// outputs are the length-n words of `w`'s output alphabet.
pub fn combined_channel(w: &Channel, encoder: &EncoderMap, budget: u64) -> Result<Channel> {
    let n = encoder.blocklength();
    let ny = saturating_pow(w.num_outputs(), n);
    check_budget(ny.saturating_mul(encoder.codewords.len() as u128), budget)?;
    for cw in &encoder.codewords {
        if let Some(&bad) = cw.iter().find(|&&x| x >= w.num_inputs()) {
            return Err(Error::UnknownSymbol {
                index: bad,
                alphabet_size: w.num_inputs(),
            });
        }
    }
    let out_seqs = all_sequences(w.num_outputs(), n);
    let output_alphabet = crate::probability::product_labels(&w.output_alphabet, n);
    let rows = encoder
        .codewords
        .iter()
        .map(|cw| out_seqs.iter().map(|ys| w.word_prob(cw, ys)).collect())
        .collect();
    Ok(Channel {
        input_alphabet: encoder.domain.clone(),
        output_alphabet,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::probability::DEFAULT_SEQUENCE_BUDGET;

    fn dist(probs: &[f64]) -> Distribution {
        let alphabet = (0..probs.len()).map(|i| i.to_string()).collect();
        Distribution::new(alphabet, probs.to_vec()).unwrap()
    }

    fn labels(k: usize) -> Vec<String> {
        (0..k).map(|i| i.to_string()).collect()
    }

    #[test]
    fn type_of_counts_symbols() {
        let t = type_of(&[0, 1, 1, 0], &labels(2)).unwrap();
        assert_eq!(t.counts, vec![2, 2]);
        assert_eq!(t.induced().probs, vec![0.5, 0.5]);

        let t = type_of(&[0, 0, 0, 0, 0], &labels(2)).unwrap();
        assert_eq!(t.counts, vec![5, 0]);

        let t = type_of(&[0, 1, 1, 2], &labels(3)).unwrap();
        assert_eq!(t.counts, vec![1, 2, 1]);
    }

    #[test]
    fn type_of_rejects_unknown_symbol() {
        assert!(matches!(
            type_of(&[0, 3], &labels(2)),
            Err(Error::UnknownSymbol { .. })
        ));
    }

    #[test]
    fn count_types_small_cases() {
        let c = count_types(2, 4).unwrap();
        assert_eq!(c.exact, 5);
        assert_eq!(c.bound, 25);

        let c = count_types(2, 1).unwrap();
        assert_eq!(c.exact, 2);
        assert_eq!(c.bound, 4);

        let c = count_types(3, 3).unwrap();
        assert_eq!(c.exact, 10);
        assert_eq!(c.bound, 64);
    }

    #[test]
    fn is_typical_cases() {
        let uniform = dist(&[0.5, 0.5]);
        assert!(is_typical(&[0, 1], &uniform, 0.0));
        assert!(!is_typical(&[0, 0], &uniform, 0.4));

        let point = dist(&[1.0, 0.0]);
        assert!(!is_typical(&[0, 1, 0], &point, 0.9));
        assert!(is_typical(&[0, 0, 0], &point, 0.0));
    }

    #[test]
    fn is_cond_typical_cases() {
        let id = Channel::identity(2);
        assert!(is_cond_typical(&[0, 1, 0], &[0, 1, 0], &id, 0.0).unwrap());
        // zero-transition exclusion
        assert!(!is_cond_typical(&[1, 1, 0], &[0, 1, 0], &id, 0.9).unwrap());

        let w = Channel::bsc(0.1).unwrap();
        let x = vec![0; 10];
        let mut y = vec![0; 10];
        y[3] = 1;
        assert!(is_cond_typical(&y, &x, &w, 0.01).unwrap());

        assert!(matches!(
            is_cond_typical(&[0], &[0, 1], &w, 0.1),
            Err(Error::LengthMismatch(_))
        ));
    }

    #[test]
    fn enumerate_typical_uniform_binary() {
        let uniform = dist(&[0.5, 0.5]);
        let params = TypicalityParams::new(2, 0.0).unwrap();
        let t = enumerate_typical(&uniform, &params, DEFAULT_SEQUENCE_BUDGET).unwrap();
        assert_eq!(t, vec![vec![0, 1], vec![1, 0]]);

        let params = TypicalityParams::new(10, 0.1).unwrap();
        let t = enumerate_typical(&uniform, &params, DEFAULT_SEQUENCE_BUDGET).unwrap();
        // sum of C(10, k) over k in {4, 5, 6}
        assert_eq!(t.len(), 672);
    }

    #[test]
    fn enumerate_typical_excludes_zero_prob_symbols() {
        let point = dist(&[1.0, 0.0]);
        let params = TypicalityParams::new(3, 0.2).unwrap();
        let t = enumerate_typical(&point, &params, DEFAULT_SEQUENCE_BUDGET).unwrap();
        assert_eq!(t, vec![vec![0, 0, 0]]);
    }

    #[test]
    fn enumerate_typical_respects_budget() {
        let uniform = dist(&[0.5, 0.5]);
        let params = TypicalityParams::new(20, 0.1).unwrap();
        assert!(matches!(
            enumerate_typical(&uniform, &params, 1024),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn typical_size_bound_reference_values() {
        let uniform = dist(&[0.5, 0.5]);
        let params = TypicalityParams::new(10, 0.1).unwrap();
        let b = typical_size_bound(&uniform, &params);
        assert!((b - 8.317766167).abs() < 1e-8);
        // enumeration certification at the same parameters
        assert!(672f64.ln() <= b);

        let tight = TypicalityParams::new(10, 0.0).unwrap();
        assert!((typical_size_bound(&uniform, &tight) - 10.0 * 2f64.ln().abs()).abs() < 1e-12);
    }

    #[test]
    fn cond_prob_bound_reference_values() {
        let w = Channel::bsc(0.1).unwrap();
        let x = vec![0; 10];
        let t = type_of(&x, &labels(2)).unwrap();
        let params = TypicalityParams::new(10, 0.01).unwrap();
        let b = cond_prob_bound(&t, &w, &params);
        assert!((b - (-2.329795697)).abs() < 1e-8);

        // a conditionally typical member obeys the bound
        let mut y = vec![0; 10];
        y[0] = 1;
        let lp = w.word_prob(&x, &y).ln();
        assert!((lp - (-3.250829734)).abs() < 1e-8);
        assert!(lp <= b);

        // identity channel: W_c = 0, H(W|P) = 0
        let id_t = type_of(&[0, 1, 0], &labels(2)).unwrap();
        let id_params = TypicalityParams::new(3, 0.3).unwrap();
        assert_eq!(cond_prob_bound(&id_t, &Channel::identity(2), &id_params), 0.0);
    }

    #[test]
    fn total_prob_bound_reference_values() {
        let params = TypicalityParams::new(500, 0.1).unwrap();
        let b = total_prob_bound(2, 2, &params);
        assert!((b - 0.999636800).abs() < 1e-8);

        // vacuous regime floors at zero
        let small = TypicalityParams::new(2, 0.05).unwrap();
        assert_eq!(total_prob_bound(2, 2, &small), 0.0);
    }

    #[test]
    fn delta_composition_is_arithmetic() {
        assert!((delta_composition(0.05, 0.05, 2) - 0.2).abs() < 1e-15);
        assert!((delta_composition(0.07, 0.0, 3) - 0.21).abs() < 1e-15);
    }

    #[test]
    fn theorem1_bound_reference_value() {
        let w = Channel::bsc(0.1).unwrap();
        let b = theorem1_bound(&w, 4, 0.1, 1e-10).unwrap();
        assert!((b.value - 12.059404).abs() < 1e-5, "got {}", b.value);
        assert!((b.capacity_term - 1.472256828).abs() < 1e-6);
        assert!((b.smoothing_term - 7.368272297).abs() < 1e-6);
        assert!((b.type_count_term - 3.218875825).abs() < 1e-6);
        assert!((b.eps_n - 8.0 * (-0.08f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn theorem1_bound_identity_channel_drops_middle_term() {
        let b = theorem1_bound(&Channel::identity(2), 5, 0.3, 1e-10).unwrap();
        assert!(b.smoothing_term.abs() < 1e-12);
        let expected = 5.0 * 2f64.ln() + 2.0 * 6f64.ln();
        assert!((b.value - expected).abs() < 1e-8);
    }

    #[test]
    fn remark1_bound_range_and_value() {
        let w = Channel::bsc(0.1).unwrap();
        assert!(matches!(
            remark1_bound(&w, 100, 0.2, 1e-10),
            Err(Error::DeltaOutOfRange { .. })
        ));
        // at delta = 1/8 the middle term is n * 0.5 * ln 32
        let n = 100;
        let b = remark1_bound(&w, n, 0.125, 1e-10).unwrap();
        let cap = crate::probability::capacity(&w, 1e-10).unwrap().value;
        let expected =
            n as f64 * cap + n as f64 * 1.732867951 + 4.0 * (n as f64 + 1.0).ln();
        assert!((b - expected).abs() < 1e-6);
    }

    #[test]
    fn combined_channel_rows_are_word_probs() {
        let w = Channel::bsc(0.1).unwrap();
        let enc = EncoderMap::new(
            vec!["0".into(), "1".into()],
            vec![vec![0, 0], vec![1, 1]],
        )
        .unwrap();
        let c = combined_channel(&w, &enc, 1 << 20).unwrap();
        assert_eq!(c.num_inputs(), 2);
        assert_eq!(c.num_outputs(), 4);
        // W^2(00 | 00) = 0.81
        assert!((c.rows[0][0] - 0.81).abs() < 1e-12);
        // W^2(01 | 11) = 0.1 * 0.9
        assert!((c.rows[1][1] - 0.09).abs() < 1e-12);
        assert!(c.validate().is_ok());
    }
}
