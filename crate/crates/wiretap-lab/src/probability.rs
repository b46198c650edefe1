//! Finite probability spaces and discrete memoryless channels.
//!
//! Everything downstream (information measures, typicality, wiretap codes)
//! consumes the types defined here. All quantities are in nats; the
//! convention `0 ln 0 = 0` applies throughout, and sums run over support.
//! Inputs are validated to a 1e-9 stochasticity tolerance and never
//! silently renormalized.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for "sums to one" checks.
pub const STOCHASTIC_TOL: f64 = 1e-9;

/// Default cap on the number of matrix entries an exact n-fold
/// computation may materialize.
pub const DEFAULT_MATRIX_BUDGET: u64 = 1 << 24;

/// Default cap on `|X|^n` for sequence enumerations.
pub const DEFAULT_SEQUENCE_BUDGET: u64 = 1 << 22;

/// Maximum Blahut-Arimoto iterations before giving up.
pub const CAPACITY_MAX_ITERS: usize = 100_000;

pub(crate) fn check_budget(required: u128, budget: u64) -> Result<()> {
    if required > budget as u128 {
        Err(Error::BudgetExceeded { required, budget })
    } else {
        Ok(())
    }
}

/// `base^exp` in u128, saturating on overflow (saturation always trips the
/// budget check, which is the point).
pub(crate) fn saturating_pow(base: usize, exp: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}

/// `x ln x` with the `0 ln 0 = 0` convention.
#[inline]
pub(crate) fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Shannon entropy (nats) of a bare probability slice.
pub(crate) fn entropy_slice(probs: &[f64]) -> f64 {
    -probs.iter().map(|&p| xlnx(p)).sum::<f64>()
}

/// A probability distribution over a finite, ordered alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub alphabet: Vec<String>,
    pub probs: Vec<f64>,
}

impl Distribution {
    /// Validating constructor: entries nonnegative, total mass 1 within 1e-9.
    pub fn new(alphabet: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if alphabet.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "alphabet has {} symbols but probs has {} entries",
                alphabet.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        for (i, &p) in probs.iter().enumerate() {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::InvalidDistribution(format!(
                    "entry {i} is {p}, expected a nonnegative real"
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidDistribution(format!(
                "total mass {sum} differs from 1 by more than 1e-9"
            )));
        }
        Ok(Self { alphabet, probs })
    }

    /// Constructor for values that are valid by construction (marginals,
    /// pushforwards). Debug builds still check.
    pub(crate) fn new_unchecked(alphabet: Vec<String>, probs: Vec<f64>) -> Self {
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-6);
        Self { alphabet, probs }
    }

    /// Uniform distribution over `alphabet`.
    pub fn uniform(alphabet: Vec<String>) -> Self {
        let k = alphabet.len();
        Self::new_unchecked(alphabet, vec![1.0 / k as f64; k])
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Shannon entropy H(P) in nats.
    pub fn entropy(&self) -> f64 {
        entropy_slice(&self.probs)
    }

    /// Smallest positive probability; `None` for an all-zero vector.
    pub fn min_support_prob(&self) -> Option<f64> {
        self.probs
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(None, |acc, p| Some(acc.map_or(p, |m: f64| m.min(p))))
    }
}

/// A joint distribution over the product of two finite alphabets.
///
/// `probs[i][j]` is the mass on `(alphabet_a[i], alphabet_e[j])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    pub alphabet_a: Vec<String>,
    pub alphabet_e: Vec<String>,
    pub probs: Vec<Vec<f64>>,
}

impl JointDistribution {
    pub fn new(
        alphabet_a: Vec<String>,
        alphabet_e: Vec<String>,
        probs: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if probs.len() != alphabet_a.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows for {} A-symbols",
                probs.len(),
                alphabet_a.len()
            )));
        }
        let mut total = 0.0;
        for (i, row) in probs.iter().enumerate() {
            if row.len() != alphabet_e.len() {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries for {} E-symbols",
                    row.len(),
                    alphabet_e.len()
                )));
            }
            for (j, &p) in row.iter().enumerate() {
                if p < 0.0 || !p.is_finite() {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: p,
                    });
                }
                total += p;
            }
        }
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidDistribution(format!(
                "joint mass {total} differs from 1 by more than 1e-9"
            )));
        }
        Ok(Self {
            alphabet_a,
            alphabet_e,
            probs,
        })
    }

    pub(crate) fn new_unchecked(
        alphabet_a: Vec<String>,
        alphabet_e: Vec<String>,
        probs: Vec<Vec<f64>>,
    ) -> Self {
        Self {
            alphabet_a,
            alphabet_e,
            probs,
        }
    }

    pub fn marginal_a(&self) -> Distribution {
        let probs = self
            .probs
            .iter()
            .map(|row| row.iter().sum::<f64>())
            .collect();
        Distribution::new_unchecked(self.alphabet_a.clone(), probs)
    }

    pub fn marginal_e(&self) -> Distribution {
        let ne = self.alphabet_e.len();
        let mut probs = vec![0.0; ne];
        for row in &self.probs {
            for (j, &p) in row.iter().enumerate() {
                probs[j] += p;
            }
        }
        Distribution::new_unchecked(self.alphabet_e.clone(), probs)
    }

    /// Joint Shannon entropy H(A, E) in nats.
    pub fn entropy(&self) -> f64 {
        -self
            .probs
            .iter()
            .flat_map(|row| row.iter())
            .map(|&p| xlnx(p))
            .sum::<f64>()
    }

    /// Conditional Shannon entropy H(A | E) = H(A, E) - H(E) in nats.
    pub fn cond_entropy_a_given_e(&self) -> f64 {
        self.entropy() - self.marginal_e().entropy()
    }

    /// Mutual information I(A; E) = H(A) + H(E) - H(A, E) in nats.
    pub fn mutual_information(&self) -> f64 {
        self.marginal_a().entropy() + self.marginal_e().entropy() - self.entropy()
    }
}

/// A discrete channel as a row-stochastic matrix: `rows[x][y] = W(y|x)`.
///
/// Subnormalized channels (row sums at most 1) are also represented by this
/// type; operations that require exact stochasticity validate it themselves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub input_alphabet: Vec<String>,
    pub output_alphabet: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// `-ln` of the smallest positive transition probability of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinLogConstant {
    pub value: f64,
}

impl Channel {
    /// Validating constructor for a stochastic channel.
    pub fn new(
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let ch = Self {
            input_alphabet,
            output_alphabet,
            rows,
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Validating constructor allowing row sums at most 1.
    pub fn new_subnormalized(
        input_alphabet: Vec<String>,
        output_alphabet: Vec<String>,
        rows: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let ch = Self {
            input_alphabet,
            output_alphabet,
            rows,
        };
        ch.validate_subnormalized()?;
        Ok(ch)
    }

    fn check_shape_and_signs(&self) -> Result<()> {
        if self.rows.len() != self.input_alphabet.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} rows for {} input symbols",
                self.rows.len(),
                self.input_alphabet.len()
            )));
        }
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.output_alphabet.len() {
                return Err(Error::ShapeMismatch(format!(
                    "row {i} has {} entries for {} output symbols",
                    row.len(),
                    self.output_alphabet.len()
                )));
            }
            for (j, &p) in row.iter().enumerate() {
                if p < 0.0 || !p.is_finite() {
                    return Err(Error::NegativeEntry {
                        row: i,
                        col: j,
                        value: p,
                    });
                }
            }
        }
        Ok(())
    }

    /// Confirms the stochastic invariants: nonnegative entries, every row
    /// summing to 1 within 1e-9.
    pub fn validate(&self) -> Result<()> {
        self.check_shape_and_signs()?;
        for (i, row) in self.rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::NonStochasticRow { row: i, sum });
            }
        }
        Ok(())
    }

    /// Like [`validate`](Self::validate) but rows may sum to less than 1.
    pub fn validate_subnormalized(&self) -> Result<()> {
        self.check_shape_and_signs()?;
        for (i, row) in self.rows.iter().enumerate() {
            let sum: f64 = row.iter().sum();
            if sum > 1.0 + STOCHASTIC_TOL {
                return Err(Error::NonStochasticRow { row: i, sum });
            }
        }
        Ok(())
    }

    pub fn num_inputs(&self) -> usize {
        self.input_alphabet.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.output_alphabet.len()
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "BSC crossover {p} outside [0, 1]"
            )));
        }
        Self::new(
            vec!["0".into(), "1".into()],
            vec!["0".into(), "1".into()],
            vec![vec![1.0 - p, p], vec![p, 1.0 - p]],
        )
    }

    /// Identity channel on `k` symbols labelled `"0"..` as decimal strings.
    pub fn identity(k: usize) -> Self {
        let alphabet: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let rows = (0..k)
            .map(|i| {
                let mut row = vec![0.0; k];
                row[i] = 1.0;
                row
            })
            .collect();
        Self {
            input_alphabet: alphabet.clone(),
            output_alphabet: alphabet,
            rows,
        }
    }

    /// Memoryless n-fold extension: `W^n(y^n | x^n) = prod_i W(y_i | x_i)`.
    ///
    /// Input and output alphabets become length-n label concatenations in
    /// lexicographic order (first position most significant). Fails with
    /// `BudgetExceeded` when the extended matrix would hold more than
    /// `budget` entries.
    pub fn extend(&self, n: usize, budget: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("extension power n must be >= 1".into()));
        }
        let nx = saturating_pow(self.num_inputs(), n);
        let ny = saturating_pow(self.num_outputs(), n);
        check_budget(nx.saturating_mul(ny), budget)?;
        if n == 1 {
            return Ok(self.clone());
        }
        let input_alphabet = product_labels(&self.input_alphabet, n);
        let output_alphabet = product_labels(&self.output_alphabet, n);
        let in_seqs = all_sequences(self.num_inputs(), n);
        let out_seqs = all_sequences(self.num_outputs(), n);
        let rows = in_seqs
            .iter()
            .map(|xs| {
                out_seqs
                    .iter()
                    .map(|ys| {
                        xs.iter()
                            .zip(ys.iter())
                            .map(|(&x, &y)| self.rows[x][y])
                            .product()
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            input_alphabet,
            output_alphabet,
            rows,
        })
    }

    /// Probability of the output word `y_seq` given the input word `x_seq`
    /// under the memoryless extension, without materializing the matrix.
    pub fn word_prob(&self, x_seq: &[usize], y_seq: &[usize]) -> f64 {
        debug_assert_eq!(x_seq.len(), y_seq.len());
        x_seq
            .iter()
            .zip(y_seq.iter())
            .map(|(&x, &y)| self.rows[x][y])
            .product()
    }

    /// Cascade composition: `(w ∘ v)(e | x) = sum_y w(e | y) v(y | x)`.
    ///
    /// `self` feeds into `w`; requires `self.output_alphabet == w.input_alphabet`.
    pub fn compose(&self, w: &Channel) -> Result<Self> {
        if self.output_alphabet != w.input_alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "first stage outputs {:?} but second stage expects {:?}",
                self.output_alphabet, w.input_alphabet
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|vrow| {
                (0..w.num_outputs())
                    .map(|e| {
                        vrow.iter()
                            .zip(w.rows.iter())
                            .map(|(&vy, wrow)| vy * wrow[e])
                            .sum()
                    })
                    .collect()
            })
            .collect();
        Ok(Self {
            input_alphabet: self.input_alphabet.clone(),
            output_alphabet: w.output_alphabet.clone(),
            rows,
        })
    }

    /// Collapse duplicate rows (bitwise-equal transition vectors), keeping
    /// first occurrences. Max-information and its smoothed variant are
    /// invariant under this: duplicate inputs can share a smoothing set
    /// without loss.
    pub fn dedup_rows(&self) -> Self {
        let mut seen: Vec<usize> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            if !seen.iter().any(|&j| self.rows[j] == *row) {
                seen.push(i);
            }
        }
        Self {
            input_alphabet: seen
                .iter()
                .map(|&i| self.input_alphabet[i].clone())
                .collect(),
            output_alphabet: self.output_alphabet.clone(),
            rows: seen.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// `-ln` of the smallest positive entry. Panics if the channel has no
    /// positive entry at all.
    pub fn min_log_constant(&self) -> MinLogConstant {
        let min = self
            .rows
            .iter()
            .flat_map(|row| row.iter())
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min);
        assert!(
            min.is_finite(),
            "min_log_constant requires a channel with nonempty support"
        );
        MinLogConstant { value: -min.ln() }
    }
}

/// Push a distribution through a channel: `(pW)(y) = sum_x p(x) W(y|x)`.
pub fn output_distribution(p: &Distribution, w: &Channel) -> Result<Distribution> {
    if p.alphabet != w.input_alphabet {
        return Err(Error::AlphabetMismatch(format!(
            "distribution over {:?} fed into channel expecting {:?}",
            p.alphabet, w.input_alphabet
        )));
    }
    let mut out = vec![0.0; w.num_outputs()];
    for (x, &px) in p.probs.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (y, &wyx) in w.rows[x].iter().enumerate() {
            out[y] += px * wyx;
        }
    }
    Distribution::new(w.output_alphabet.clone(), out)
}

/// All length-`n` index sequences over `{0, .., k-1}` in lexicographic order.
pub(crate) fn all_sequences(k: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(k.pow(n as u32));
    let mut seq = vec![0usize; n];
    loop {
        out.push(seq.clone());
        // odometer increment, most significant digit first
        let mut pos = n;
        while pos > 0 {
            pos -= 1;
            seq[pos] += 1;
            if seq[pos] < k {
                break;
            }
            seq[pos] = 0;
            if pos == 0 {
                return out;
            }
        }
        if n == 0 {
            return out;
        }
    }
}

pub(crate) fn product_labels(alphabet: &[String], n: usize) -> Vec<String> {
    all_sequences(alphabet.len(), n)
        .iter()
        .map(|seq| seq.iter().map(|&i| alphabet[i].as_str()).collect())
        .collect()
}

/// Result of the capacity computation, with the certified bracket and the
/// maximizing input distribution at termination.
#[derive(Debug, Clone)]
pub struct CapacityResult {
    /// Midpoint of the final bracket, in nats.
    pub value: f64,
    /// Achievable lower estimate (mutual information of `input`).
    pub lower: f64,
    /// Upper estimate; `upper - lower <= tol` at termination.
    pub upper: f64,
    pub input: Distribution,
    pub iterations: usize,
}

/// Channel capacity in nats by alternating maximization, bracketed to `tol`.
///
/// Each round computes `d_x = D(W(.|x) || pW)`; `max_x d_x` upper-bounds the
/// capacity and `ln sum_x p(x) e^{d_x}` lower-bounds it, so iteration stops
/// once the bracket closes to `tol`.
pub fn capacity(w: &Channel, tol: f64) -> Result<CapacityResult> {
    w.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "capacity tolerance {tol} must be positive"
        )));
    }
    let nx = w.num_inputs();
    let ny = w.num_outputs();
    let mut p = vec![1.0 / nx as f64; nx];
    let mut d = vec![0.0; nx];
    // Every iterate's max_x d_x upper-bounds C and every ln sum p e^d
    // lower-bounds it, so the tightest bracket seen so far is kept.
    let mut best_lower = f64::NEG_INFINITY;
    let mut best_upper = f64::INFINITY;
    let mut best_input = p.clone();
    for iter in 1..=CAPACITY_MAX_ITERS {
        let mut q = vec![0.0; ny];
        for (x, &px) in p.iter().enumerate() {
            for (y, &wyx) in w.rows[x].iter().enumerate() {
                q[y] += px * wyx;
            }
        }
        for (dx, row) in d.iter_mut().zip(w.rows.iter()) {
            *dx = row
                .iter()
                .zip(q.iter())
                .filter(|(&wyx, _)| wyx > 0.0)
                .map(|(&wyx, &qy)| wyx * (wyx / qy).ln())
                .sum();
        }
        let weights: Vec<f64> = p.iter().zip(d.iter()).map(|(&px, &dx)| px * dx.exp()).collect();
        let total: f64 = weights.iter().sum();
        let lower = total.ln();
        let upper = d.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lower > best_lower {
            best_lower = lower;
            best_input = p.clone();
        }
        best_upper = best_upper.min(upper);
        if best_upper - best_lower <= tol {
            return Ok(CapacityResult {
                value: 0.5 * (best_lower + best_upper),
                lower: best_lower,
                upper: best_upper,
                input: Distribution::new_unchecked(w.input_alphabet.clone(), best_input),
                iterations: iter,
            });
        }
        for (px, &wx) in p.iter_mut().zip(weights.iter()) {
            *px = wx / total;
        }
    }
    Err(Error::NoConvergence(CAPACITY_MAX_ITERS))
}

/// Binary entropy in nats.
pub fn binary_entropy(p: f64) -> f64 {
    -xlnx(p) - xlnx(1.0 - p)
}

/// Nats to bits.
pub fn nats_to_bits(x: f64) -> f64 {
    x / std::f64::consts::LN_2
}

/// Bits to nats.
pub fn bits_to_nats(x: f64) -> f64 {
    x * std::f64::consts::LN_2
}
