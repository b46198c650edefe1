//! c-universal₂ hashing over bit-string domains.
//!
//! The family is the ensemble of uniformly random full-rank m×k matrices
//! over GF(2). Full rank makes every realization surjective with equal
//! preimage sizes 2^{k-m}, which is what admits a uniform right inverse.
//! Bit i of a word is its i-th coordinate (LSB first); rows are stored as
//! k-bit masks in a u32, so k <= 32.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::info_measures::{cond_renyi_entropy, RenyiOrder};
use crate::probability::JointDistribution;

/// Largest k for which realization averages enumerate every full-rank
/// matrix; beyond this, Monte Carlo sampling is used.
pub const EXACT_REALIZATION_CAP: usize = 4;

/// The family of uniformly random full-rank m×k binary matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFamily {
    pub domain_bits: usize,
    pub range_bits: usize,
}

impl HashFamily {
    pub fn new(domain_bits: usize, range_bits: usize) -> Result<Self> {
        if domain_bits < 1 {
            return Err(Error::DegenerateDomain(domain_bits));
        }
        if domain_bits > 32 {
            return Err(Error::InvalidHashFamily(format!(
                "domain_bits = {domain_bits} exceeds the 32-bit word size"
            )));
        }
        if range_bits < 1 || range_bits > domain_bits {
            return Err(Error::InvalidHashFamily(format!(
                "range_bits = {range_bits} outside 1..={domain_bits}"
            )));
        }
        Ok(Self {
            domain_bits,
            range_bits,
        })
    }

    pub fn domain_size(&self) -> u64 {
        1u64 << self.domain_bits
    }

    pub fn range_size(&self) -> u64 {
        1u64 << self.range_bits
    }
}

/// One sampled matrix together with its right-inverse data.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashRealization {
    pub domain_bits: usize,
    pub range_bits: usize,
    /// m rows, each a k-bit mask.
    pub matrix: Vec<u32>,
    /// k-bit particular solutions: `right_inverse[j]` maps the j-th unit
    /// message vector into the domain, so H * right_inverse[j] = e_j.
    right_inverse: Vec<u32>,
    /// Basis of the kernel, k - m vectors.
    kernel_basis: Vec<u32>,
}

#[inline]
fn parity(word: u32) -> u32 {
    word.count_ones() & 1
}

/// Rank of a set of k-bit row masks over GF(2). Input rows are consumed by
/// elimination on a copy.
fn gf2_rank(rows: &[u32]) -> usize {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for col in 0..32 {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> col & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        for r in 0..rows.len() {
            if r != rank && rows[r] >> col & 1 == 1 {
                rows[r] ^= rows[rank];
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

impl HashRealization {
    /// Builds the right-inverse and kernel data for a full-rank matrix.
    fn from_matrix(family: &HashFamily, matrix: Vec<u32>) -> Self {
        let (k, m) = (family.domain_bits, family.range_bits);
        debug_assert_eq!(gf2_rank(&matrix), m);

        // Gauss-Jordan on [H | I_m], tracking pivot columns.
        let mut rows = matrix.clone();
        let mut aug: Vec<u32> = (0..m).map(|i| 1u32 << i).collect();
        let mut pivot_cols = Vec::with_capacity(m);
        let mut rank = 0;
        for col in 0..k {
            let Some(p) = (rank..m).find(|&r| rows[r] >> col & 1 == 1) else {
                continue;
            };
            rows.swap(rank, p);
            aug.swap(rank, p);
            for r in 0..m {
                if r != rank && rows[r] >> col & 1 == 1 {
                    rows[r] ^= rows[rank];
                    aug[r] ^= aug[rank];
                }
            }
            pivot_cols.push(col);
            rank += 1;
            if rank == m {
                break;
            }
        }

        // Right inverse: place the transformed unit vectors on pivot columns.
        // Column j of the inverse solves H x = e_j.
        let right_inverse: Vec<u32> = (0..m)
            .map(|j| {
                pivot_cols
                    .iter()
                    .enumerate()
                    .filter(|(r, _)| aug[*r] >> j & 1 == 1)
                    .fold(0u32, |x, (_, &col)| x | 1 << col)
            })
            .collect();

        // Kernel basis: one vector per free column.
        let mut kernel_basis = Vec::with_capacity(k - m);
        for col in 0..k {
            if pivot_cols.contains(&col) {
                continue;
            }
            let mut v = 1u32 << col;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                if rows[r] >> col & 1 == 1 {
                    v |= 1 << pc;
                }
            }
            kernel_basis.push(v);
        }

        Self {
            domain_bits: k,
            range_bits: m,
            matrix,
            right_inverse,
            kernel_basis,
        }
    }

    /// `f_x(a)`: matrix-vector product over GF(2).
    pub fn apply(&self, a: u32) -> u32 {
        self.matrix
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &row)| acc | parity(row & a) << i)
    }

    /// A particular solution of `f_x(a) = msg`.
    pub fn particular_solution(&self, msg: u32) -> u32 {
        self.right_inverse
            .iter()
            .enumerate()
            .filter(|(j, _)| msg >> j & 1 == 1)
            .fold(0, |acc, (_, &col)| acc ^ col)
    }

    /// Uniform right inverse: a uniformly random element of the preimage of
    /// `msg`, deterministic given `seed`. Always satisfies
    /// `apply(invert(msg, seed)) == msg`.
    pub fn invert(&self, msg: u32, seed: u64) -> u32 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = self.particular_solution(msg);
        for &kv in &self.kernel_basis {
            if rng.random::<bool>() {
                a ^= kv;
            }
        }
        a
    }

    /// The full preimage of `msg`, of size exactly 2^{k-m}.
    pub fn preimage(&self, msg: u32) -> Vec<u32> {
        let base = self.particular_solution(msg);
        let free = self.kernel_basis.len();
        (0..1u32 << free)
            .map(|combo| {
                self.kernel_basis
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| combo >> i & 1 == 1)
                    .fold(base, |acc, (_, &kv)| acc ^ kv)
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        gf2_rank(&self.matrix)
    }
}

/// Uniform sample from the full-rank ensemble by rejection, deterministic
/// given `seed`. Rejection terminates quickly: a uniform m×k matrix is full
/// rank with probability above 0.288.
pub fn sample(family: &HashFamily, seed: u64) -> HashRealization {
    let (k, m) = (family.domain_bits, family.range_bits);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mask = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    loop {
        let matrix: Vec<u32> = (0..m).map(|_| rng.random::<u32>() & mask).collect();
        if gf2_rank(&matrix) == m {
            return HashRealization::from_matrix(family, matrix);
        }
    }
}

/// Every full-rank matrix of the family, in lexicographic matrix order.
/// Only sensible for small k; callers gate on [`EXACT_REALIZATION_CAP`].
pub fn enumerate_realizations(family: &HashFamily) -> Vec<HashRealization> {
    let (k, m) = (family.domain_bits, family.range_bits);
    let cells = k * m;
    assert!(cells <= 20, "exact realization enumeration needs k*m <= 20");
    let mut out = Vec::new();
    for bits in 0..(1u64 << cells) {
        let matrix: Vec<u32> = (0..m)
            .map(|r| ((bits >> (r * k)) & ((1 << k) - 1)) as u32)
            .collect();
        if gf2_rank(&matrix) == m {
            out.push(HashRealization::from_matrix(family, matrix));
        }
    }
    out
}

/// Number of full-rank m×k binary matrices: prod_{i<m} (2^k - 2^i).
pub fn count_full_rank(k: usize, m: usize) -> u128 {
    (0..m)
        .map(|i| (1u128 << k) - (1u128 << i))
        .product()
}

/// Result of a collision experiment against the 1/M universality bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionReport {
    pub rate: f64,
    /// The universal₂ bound 1/M.
    pub bound: f64,
    /// Binomial standard error; 0 in exact mode.
    pub stderr: f64,
    pub exact: bool,
    pub trials: u64,
}

/// Collision probability of the family.
///
/// Exact mode enumerates all realizations (k <= [`EXACT_REALIZATION_CAP`])
/// and evaluates the collision rate per nonzero input difference; for this
/// ensemble the rate is the same for every difference, and the common value
/// is returned. Monte Carlo mode samples distinct pairs and fresh
/// realizations per trial with counter-derived streams.
pub fn collision_test(
    family: &HashFamily,
    exact: bool,
    trials: u64,
    seed: u64,
) -> Result<CollisionReport> {
    let k = family.domain_bits;
    if exact {
        if k > EXACT_REALIZATION_CAP {
            return Err(Error::BudgetExceeded {
                required: k as u128,
                budget: EXACT_REALIZATION_CAP as u64,
            });
        }
        let realizations = enumerate_realizations(family);
        let total = realizations.len() as f64;
        let mut worst = 0.0f64;
        for d in 1..(1u32 << k) {
            let kills = realizations.iter().filter(|r| r.apply(d) == 0).count();
            worst = worst.max(kills as f64 / total);
        }
        return Ok(CollisionReport {
            rate: worst,
            bound: 1.0 / family.range_size() as f64,
            stderr: 0.0,
            exact: true,
            trials: 0,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    let mut collisions = 0u64;
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t);
        let a1: u32 = rng.random_range(0..family.domain_size()) as u32;
        let mut a2: u32 = rng.random_range(0..family.domain_size() - 1) as u32;
        if a2 >= a1 {
            a2 += 1;
        }
        let r = sample_with_rng(family, &mut rng);
        if r.apply(a1) == r.apply(a2) {
            collisions += 1;
        }
    }
    let rate = collisions as f64 / trials as f64;
    Ok(CollisionReport {
        rate,
        bound: 1.0 / family.range_size() as f64,
        stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
        exact: false,
        trials,
    })
}

pub(crate) fn sample_with_rng(family: &HashFamily, rng: &mut ChaCha8Rng) -> HashRealization {
    let (k, m) = (family.domain_bits, family.range_bits);
    let mask = if k == 32 { u32::MAX } else { (1u32 << k) - 1 };
    loop {
        let matrix: Vec<u32> = (0..m).map(|_| rng.random::<u32>() & mask).collect();
        if gf2_rank(&matrix) == m {
            return HashRealization::from_matrix(family, matrix);
        }
    }
}

/// How realization averages are taken in the leakage-lemma check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RealizationMode {
    /// Average over every full-rank matrix (k <= 4).
    Enumerate,
    /// Monte Carlo over sampled realizations.
    Sample { count: u64, seed: u64 },
}

/// Outcome of the hashed-leakage inequality check
/// `e^{s C_{1+s}(f(A)|E X)} <= 1 + M^s e^{-s H_{1+s}(A|E)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HashLemmaCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// Standard error of the lhs realization average; `None` in exact mode.
    pub stderr: Option<f64>,
    pub realizations: u64,
}

/// Checks the hashed-leakage bound for a joint source `(A, E)` with uniform
/// A-marginal over 2^k values and a hash into m bits.
///
/// The left side conditions on the hash realization X by averaging
/// `e^{s C_{1+s}(f_x(A)|E)}` over X; in sampling mode the comparison allows
/// the estimate a 4-sigma margin.
pub fn hash_lemma_check(
    joint: &JointDistribution,
    family: &HashFamily,
    s: f64,
    mode: RealizationMode,
) -> Result<HashLemmaCheck> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "s = {s} outside (0, 1]"
        )));
    }
    let k = family.domain_bits;
    if joint.alphabet_a.len() != 1usize << k {
        return Err(Error::InvalidHashFamily(format!(
            "joint has {} A-symbols but the family domain holds {}",
            joint.alphabet_a.len(),
            1usize << k
        )));
    }
    let na = joint.alphabet_a.len() as f64;
    let target = 1.0 / na;
    if joint
        .marginal_a()
        .probs
        .iter()
        .any(|&p| (p - target).abs() > 1e-9)
    {
        return Err(Error::NonUniformMarginal);
    }

    let m_size = family.range_size() as f64;
    let order = RenyiOrder::new(s)?;
    let rhs = 1.0 + m_size.powf(s) * (-s * cond_renyi_entropy(joint, order)).exp();

    let lhs_for = |r: &HashRealization| -> f64 {
        let hashed = pushforward_joint(joint, r);
        (s * (m_size.ln() - cond_renyi_entropy(&hashed, order))).exp()
    };

    let (lhs, stderr, count) = match mode {
        RealizationMode::Enumerate => {
            if k > EXACT_REALIZATION_CAP {
                return Err(Error::BudgetExceeded {
                    required: k as u128,
                    budget: EXACT_REALIZATION_CAP as u64,
                });
            }
            let realizations = enumerate_realizations(family);
            let mean = realizations.iter().map(lhs_for).sum::<f64>()
                / realizations.len() as f64;
            (mean, None, realizations.len() as u64)
        }
        RealizationMode::Sample { count, seed } => {
            if count == 0 {
                return Err(Error::InvalidParameter("sample count must be >= 1".into()));
            }
            let mut sum = 0.0;
            let mut sq = 0.0;
            for t in 0..count {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t);
                let v = lhs_for(&sample_with_rng(family, &mut rng));
                sum += v;
                sq += v * v;
            }
            let mean = sum / count as f64;
            let var = (sq / count as f64 - mean * mean).max(0.0);
            (mean, Some((var / count as f64).sqrt()), count)
        }
    };

    let margin = stderr.map_or(0.0, |e| 4.0 * e);
    Ok(HashLemmaCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + margin + 1e-9,
        stderr,
        realizations: count,
    })
}

/// Pushes the A-coordinate of a joint through a hash realization:
/// `Q(m, e) = sum_{a : f_x(a) = m} P(a, e)`.
pub fn pushforward_joint(joint: &JointDistribution, r: &HashRealization) -> JointDistribution {
    let m_size = 1usize << r.range_bits;
    let ne = joint.alphabet_e.len();
    let mut probs = vec![vec![0.0; ne]; m_size];
    for (a, row) in joint.probs.iter().enumerate() {
        let m = r.apply(a as u32) as usize;
        for (e, &p) in row.iter().enumerate() {
            probs[m][e] += p;
        }
    }
    let alphabet_m = (0..m_size)
        .map(|m| format!("{m:0width$b}", width = r.range_bits))
        .collect();
    JointDistribution::new_unchecked(alphabet_m, joint.alphabet_e.clone(), probs)
}
