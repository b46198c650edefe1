//! Rényi and Shannon information measures, max-information, and its
//! ε-smoothed variant.
//!
//! Orders are parameterized as `1 + s` with `s` in `[0, 1]`; `s = 0` selects
//! the Shannon/KL limit. Divergences against a mismatched support return
//! `+inf` rather than erroring, matching the measure-theoretic convention.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::probability::{xlnx, Channel, Distribution, JointDistribution};

/// Hard cap on support entries for the exact smoothing search
/// (2^22 subsets at the cap).
pub const EXACT_SMOOTHING_SUPPORT_CAP: usize = 22;

/// Rényi order parameter `s`: the measure order is `1 + s`.
///
/// `s = 0` denotes the Shannon/KL limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RenyiOrder(f64);

impl RenyiOrder {
    pub fn new(s: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::InvalidParameter(format!(
                "Renyi order parameter s = {s} outside [0, 1]"
            )));
        }
        Ok(Self(s))
    }

    pub const SHANNON: Self = Self(0.0);

    pub fn s(&self) -> f64 {
        self.0
    }

    pub fn is_shannon_limit(&self) -> bool {
        self.0 == 0.0
    }
}

/// KL divergence D(p || q) in nats; `+inf` when supp(p) is not inside supp(q).
pub fn kl_divergence(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.alphabet != q.alphabet {
        return Err(Error::AlphabetMismatch(
            "KL divergence needs a common alphabet".into(),
        ));
    }
    let mut acc = 0.0;
    for (&pa, &qa) in p.probs.iter().zip(q.probs.iter()) {
        if pa > 0.0 {
            if qa == 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pa * (pa / qa).ln();
        }
    }
    Ok(acc)
}

/// Rényi divergence of order `1 + s` in nats.
///
/// For `s > 0` this is `(1/s) ln sum_a p(a)^{1+s} q(a)^{-s}`; for `s = 0` it
/// is the KL divergence. Nondecreasing in `s`.
pub fn renyi_divergence(p: &Distribution, q: &Distribution, order: RenyiOrder) -> Result<f64> {
    if order.is_shannon_limit() {
        return kl_divergence(p, q);
    }
    if p.alphabet != q.alphabet {
        return Err(Error::AlphabetMismatch(
            "Renyi divergence needs a common alphabet".into(),
        ));
    }
    let s = order.s();
    let mut acc = 0.0;
    for (&pa, &qa) in p.probs.iter().zip(q.probs.iter()) {
        if pa > 0.0 {
            if qa == 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pa.powf(1.0 + s) * qa.powf(-s);
        }
    }
    Ok(acc.ln() / s)
}

/// Conditional Rényi entropy H_{1+s}(A | E) of a joint distribution, nats.
///
/// `s = 0` gives the Shannon conditional entropy; for `s > 0` the value is
/// `-(1/s) ln sum_e P_E(e) sum_a P_{A|E}(a|e)^{1+s}`. Nonincreasing in `s`.
pub fn cond_renyi_entropy(joint: &JointDistribution, order: RenyiOrder) -> f64 {
    if order.is_shannon_limit() {
        return joint.cond_entropy_a_given_e();
    }
    let s = order.s();
    // sum_e P_E(e) sum_a P(a|e)^{1+s} = sum_e P_E(e)^{-s} sum_a P(a,e)^{1+s}
    let ne = joint.alphabet_e.len();
    let mut acc = 0.0;
    for e in 0..ne {
        let pe: f64 = joint.probs.iter().map(|row| row[e]).sum();
        if pe == 0.0 {
            continue;
        }
        let inner: f64 = joint
            .probs
            .iter()
            .map(|row| row[e])
            .filter(|&p| p > 0.0)
            .map(|p| p.powf(1.0 + s))
            .sum();
        acc += pe.powf(-s) * inner;
    }
    -acc.ln() / s
}

/// The security quantity `C_{1+s}(A | E) = ln|A| - H_{1+s}(A | E)`.
///
/// Requires the A-marginal to be uniform within 1e-9 (the identity with the
/// divergence against `P_mix × P_E` is used in that regime).
pub fn c_quantity(joint: &JointDistribution, order: RenyiOrder) -> Result<f64> {
    let na = joint.alphabet_a.len() as f64;
    let marginal = joint.marginal_a();
    let target = 1.0 / na;
    if marginal
        .probs
        .iter()
        .any(|&p| (p - target).abs() > 1e-9)
    {
        return Err(Error::NonUniformMarginal);
    }
    Ok(na.ln() - cond_renyi_entropy(joint, order))
}

/// Mutual information I(P; W) = H(PW) - H(W | P) in nats.
pub fn mutual_information(p: &Distribution, w: &Channel) -> Result<f64> {
    let out = crate::probability::output_distribution(p, w)?;
    let cond: f64 = p
        .probs
        .iter()
        .zip(w.rows.iter())
        .map(|(&px, row)| px * -row.iter().map(|&q| xlnx(q)).sum::<f64>())
        .sum();
    Ok(out.entropy() - cond)
}

/// Max-information `I_max(W) = ln sum_y max_x W(y|x)` of a possibly
/// subnormalized channel, in nats.
pub fn max_information(w: &Channel) -> f64 {
    let sum: f64 = (0..w.num_outputs())
        .map(|y| {
            w.rows
                .iter()
                .map(|row| row[y])
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    sum.ln()
}

/// A subset T of input×output pairs defining a subnormalized restriction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSet {
    pub member: Vec<Vec<bool>>,
}

impl SmoothingSet {
    pub fn full(num_inputs: usize, num_outputs: usize) -> Self {
        Self {
            member: vec![vec![true; num_outputs]; num_inputs],
        }
    }

    /// Def.-8 feasibility at level `eps`: every input keeps mass >= 1 - eps.
    pub fn is_feasible(&self, w: &Channel, eps: f64) -> bool {
        self.member.len() == w.num_inputs()
            && self
                .member
                .iter()
                .zip(w.rows.iter())
                .all(|(mask, row)| {
                    mask.len() == row.len()
                        && mask
                            .iter()
                            .zip(row.iter())
                            .filter(|(&m, _)| m)
                            .map(|(_, &p)| p)
                            .sum::<f64>()
                            >= 1.0 - eps - FEAS_TOL
                })
    }
}

/// Zero out channel entries outside `t`.
pub fn restrict(w: &Channel, t: &SmoothingSet) -> Result<Channel> {
    if t.member.len() != w.num_inputs()
        || t.member.iter().any(|row| row.len() != w.num_outputs())
    {
        return Err(Error::ShapeMismatch(
            "smoothing set shape differs from channel shape".into(),
        ));
    }
    let rows = w
        .rows
        .iter()
        .zip(t.member.iter())
        .map(|(row, mask)| {
            row.iter()
                .zip(mask.iter())
                .map(|(&p, &m)| if m { p } else { 0.0 })
                .collect()
        })
        .collect();
    Ok(Channel {
        input_alphabet: w.input_alphabet.clone(),
        output_alphabet: w.output_alphabet.clone(),
        rows,
    })
}

/// Optimization method for the ε-smooth max-information.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothingMethod {
    /// Exhaustive search over support subsets; true minimum, capped at
    /// [`EXACT_SMOOTHING_SUPPORT_CAP`] support entries.
    Exact,
    /// Per-row smallest-entry trimming; feasible upper bound.
    Greedy,
}

/// Slack for feasibility comparisons against accumulated row masses.
const FEAS_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
struct SupportEntry {
    x: usize,
    y: usize,
    p: f64,
}

fn support_entries(w: &Channel) -> Vec<SupportEntry> {
    let mut entries = Vec::new();
    for (x, row) in w.rows.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                entries.push(SupportEntry { x, y, p });
            }
        }
    }
    entries
}

fn witness_from_kept(w: &Channel, entries: &[SupportEntry], kept: u32) -> SmoothingSet {
    let mut member = vec![vec![false; w.num_outputs()]; w.num_inputs()];
    for (i, e) in entries.iter().enumerate() {
        if kept >> i & 1 == 1 {
            member[e.x][e.y] = true;
        }
    }
    SmoothingSet { member }
}

/// True iff mask `a` precedes mask `b` lexicographically when read as the
/// entry-0-first sequence of kept bits.
fn lex_less(a: u32, b: u32, len: usize) -> bool {
    for i in 0..len {
        let (ba, bb) = (a >> i & 1, b >> i & 1);
        if ba != bb {
            return ba < bb;
        }
    }
    false
}

struct ExactSearch<'a> {
    entries: &'a [SupportEntry],
    row_entries: Vec<Vec<usize>>,
    row_masks: Vec<Vec<u32>>,
    num_outputs: usize,
    best_sum: f64,
    best_mask: u32,
    found: bool,
}

impl ExactSearch<'_> {
    /// Depth-first over rows; `colmax` carries the running column maxima.
    /// Prunes only on strictly worse partial sums so that every minimizer
    /// is visited and the lexicographically smallest one wins ties.
    fn recurse(&mut self, row: usize, kept: u32, colmax: &mut Vec<f64>, partial: f64) {
        if partial > self.best_sum + FEAS_TOL * (1.0 + self.best_sum.abs()) {
            return;
        }
        if row == self.row_entries.len() {
            // Recompute the objective non-incrementally before accepting.
            let exact: f64 = colmax.iter().sum();
            if !self.found
                || exact < self.best_sum
                || (exact == self.best_sum
                    && lex_less(kept, self.best_mask, self.entries.len()))
            {
                self.best_sum = exact;
                self.best_mask = kept;
                self.found = true;
            }
            return;
        }
        let masks = std::mem::take(&mut self.row_masks[row]);
        for &mask in &masks {
            let mut delta = 0.0;
            let mut touched: Vec<(usize, f64)> = Vec::new();
            for (bit, &idx) in self.row_entries[row].iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    let e = &self.entries[idx];
                    if e.p > colmax[e.y] {
                        touched.push((e.y, colmax[e.y]));
                        delta += e.p - colmax[e.y];
                        colmax[e.y] = e.p;
                    }
                }
            }
            let mut global = kept;
            for (bit, &idx) in self.row_entries[row].iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    global |= 1 << idx;
                }
            }
            self.recurse(row + 1, global, colmax, partial + delta);
            for &(y, old) in touched.iter().rev() {
                colmax[y] = old;
            }
        }
        self.row_masks[row] = masks;
    }
}

/// ε-smooth max-information `I_max^eps(W)` with a feasible witness set.
///
/// The exact method minimizes over all support subsets whose rows each keep
/// mass `>= 1 - eps` (the minimum is attained; the witness is the
/// lexicographically smallest minimizer in row-major entry order). The
/// greedy method trims each row's smallest entries while feasible, breaking
/// probability ties toward removing the lower output index, and returns the
/// resulting upper bound.
pub fn smooth_max_information(
    w: &Channel,
    eps: f64,
    method: SmoothingMethod,
) -> Result<(f64, SmoothingSet)> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InfeasibleEps(format!(
            "eps = {eps} outside [0, 1)"
        )));
    }
    match method {
        SmoothingMethod::Greedy => smooth_max_greedy(w, eps),
        SmoothingMethod::Exact => smooth_max_exact(w, eps),
    }
}

fn smooth_max_greedy(w: &Channel, eps: f64) -> Result<(f64, SmoothingSet)> {
    let mut member = vec![vec![false; w.num_outputs()]; w.num_inputs()];
    for (x, row) in w.rows.iter().enumerate() {
        let mut order: Vec<usize> = (0..row.len()).filter(|&y| row[y] > 0.0).collect();
        // ascending probability, ties removed lower-output-index first
        order.sort_by(|&a, &b| row[a].partial_cmp(&row[b]).unwrap().then(a.cmp(&b)));
        let mut kept_mass: f64 = order.iter().map(|&y| row[y]).sum();
        if kept_mass < 1.0 - eps - FEAS_TOL {
            return Err(Error::InfeasibleEps(format!(
                "row {x} has total mass {kept_mass} < 1 - eps"
            )));
        }
        let mut removed = vec![false; row.len()];
        for &y in &order {
            if kept_mass - row[y] >= 1.0 - eps - FEAS_TOL {
                kept_mass -= row[y];
                removed[y] = true;
            }
        }
        for y in 0..row.len() {
            member[x][y] = row[y] > 0.0 && !removed[y];
        }
    }
    let witness = SmoothingSet { member };
    let value = max_information(&restrict(w, &witness)?);
    Ok((value, witness))
}

fn smooth_max_exact(w: &Channel, eps: f64) -> Result<(f64, SmoothingSet)> {
    let entries = support_entries(w);
    if entries.len() > EXACT_SMOOTHING_SUPPORT_CAP {
        return Err(Error::BudgetExceeded {
            required: entries.len() as u128,
            budget: EXACT_SMOOTHING_SUPPORT_CAP as u64,
        });
    }
    let nx = w.num_inputs();
    let mut row_entries: Vec<Vec<usize>> = vec![Vec::new(); nx];
    for (i, e) in entries.iter().enumerate() {
        row_entries[e.x].push(i);
    }
    // Per-row feasible kept-subsets, in increasing mask order.
    let mut row_masks: Vec<Vec<u32>> = Vec::with_capacity(nx);
    for (x, idxs) in row_entries.iter().enumerate() {
        let mut feasible = Vec::new();
        for mask in 0..(1u32 << idxs.len()) {
            let kept: f64 = idxs
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask >> bit & 1 == 1)
                .map(|(_, &i)| entries[i].p)
                .sum();
            if kept >= 1.0 - eps - FEAS_TOL {
                feasible.push(mask);
            }
        }
        if feasible.is_empty() {
            return Err(Error::InfeasibleEps(format!(
                "row {x} cannot keep mass 1 - eps = {}",
                1.0 - eps
            )));
        }
        row_masks.push(feasible);
    }

    // Greedy solution seeds the incumbent so pruning bites immediately.
    // Its sum is recomputed the same way leaf candidates are, so ties
    // against it resolve purely by the lexicographic rule.
    let (_, greedy_witness) = smooth_max_greedy(w, eps)?;
    let mut greedy_mask = 0u32;
    for (i, e) in entries.iter().enumerate() {
        if greedy_witness.member[e.x][e.y] {
            greedy_mask |= 1 << i;
        }
    }
    let greedy_sum: f64 = {
        let mut colmax = vec![0.0f64; w.num_outputs()];
        for (i, e) in entries.iter().enumerate() {
            if greedy_mask >> i & 1 == 1 && e.p > colmax[e.y] {
                colmax[e.y] = e.p;
            }
        }
        colmax.iter().sum()
    };

    let mut search = ExactSearch {
        entries: &entries,
        row_entries,
        row_masks,
        num_outputs: w.num_outputs(),
        best_sum: greedy_sum,
        best_mask: greedy_mask,
        found: true,
    };
    let mut colmax = vec![0.0; search.num_outputs];
    search.recurse(0, 0, &mut colmax, 0.0);

    let witness = witness_from_kept(w, &entries, search.best_mask);
    let value = max_information(&restrict(w, &witness)?);
    Ok((value, witness))
}

/// Outcome of a two-sided inequality check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `D_2(P_AE || P_A × P_E) <= I_max(W)` for A uniform on the input
/// alphabet and `P_{E|A} = W` (subnormalized W allowed).
pub fn d2_vs_maxinfo_check(w: &Channel) -> InequalityCheck {
    // D_2 reduces to ln sum_e (sum_a W(e|a)^2) / (sum_a' W(e|a')) for
    // uniform A; columns with zero mass contribute nothing.
    let mut acc = 0.0;
    for e in 0..w.num_outputs() {
        let col_mass: f64 = w.rows.iter().map(|row| row[e]).sum();
        if col_mass > 0.0 {
            let sq: f64 = w.rows.iter().map(|row| row[e] * row[e]).sum();
            acc += sq / col_mass;
        }
    }
    let lhs = acc.ln();
    let rhs = max_information(w);
    InequalityCheck {
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-9,
    }
}

/// Upper bound on `D(P_AE || P_A × P_E)` for uniform A, valid for
/// `eps < 1 - e^{-1}`:
/// `c(I_max^eps(W)) - (1-eps) ln(1-eps) + eps ln|A|`.
///
/// `c` is the identity for a nonnegative smoothed term. A minimizing
/// restriction that is mass-deficient drives `I_max^eps` negative, and
/// there the restricted mass `mu in [1-eps, 1]` only attenuates the
/// (negative) term by `1-eps` in the Jensen step, so `c(z) = (1-eps) z`
/// for `z < 0`. Without this scaling the bound can drop below the true
/// divergence at large `eps`.
pub fn kl_leakage_bound(w: &Channel, eps: f64, method: SmoothingMethod) -> Result<f64> {
    let limit = 1.0 - (-1.0f64).exp();
    if !(0.0..limit).contains(&eps) {
        return Err(Error::EpsOutOfRange { eps, limit });
    }
    let (smooth, _) = smooth_max_information(w, eps, method)?;
    let smooth_term = if smooth < 0.0 { (1.0 - eps) * smooth } else { smooth };
    let correction = if eps == 0.0 {
        0.0
    } else {
        -(1.0 - eps) * (1.0 - eps).ln() + eps * (w.num_inputs() as f64).ln()
    };
    Ok(smooth_term + correction)
}

/// Joint distribution induced by a uniform input and a stochastic channel:
/// `P(a, e) = W(e|a) / |A|`.
pub fn uniform_input_joint(w: &Channel) -> Result<JointDistribution> {
    w.validate()?;
    let na = w.num_inputs() as f64;
    let probs = w
        .rows
        .iter()
        .map(|row| row.iter().map(|&p| p / na).collect())
        .collect();
    JointDistribution::new(
        w.input_alphabet.clone(),
        w.output_alphabet.clone(),
        probs,
    )
}


#[cfg(test)]
mod mass_deficient_regression {
    use super::*;
    use crate::probability::Channel;

    // Wide sparse channel whose minimizing restriction at eps = 0.6 keeps
    // total column-maxima mass below 1 (negative smoothed max-information).
    // The unscaled bound formula would fall below the true divergence here.
    #[test]
    fn kl_bound_survives_negative_smoothed_term() {
        let w = Channel::new(
            vec!["0".into(), "1".into()],
            (0..6).map(|i| i.to_string()).collect(),
            vec![
                vec![
                    0.17444461982763226,
                    0.3306720950199472,
                    0.0,
                    0.0,
                    0.20322964912945551,
                    0.291653636022965,
                ],
                vec![
                    0.2536470898874626,
                    0.19833281149571244,
                    0.5385516818064393,
                    0.0,
                    0.0,
                    0.00946841681038568,
                ],
            ],
        )
        .unwrap();
        let eps = 0.6;
        let (smooth, _) = smooth_max_information(&w, eps, SmoothingMethod::Exact).unwrap();
        assert!(smooth < 0.0, "instance must be mass-deficient: {smooth}");

        // KL(P_AE || P_A x P_E) for uniform A by direct summation
        let na = 2.0;
        let mut pe = [0.0; 6];
        for row in &w.rows {
            for (e, &p) in row.iter().enumerate() {
                pe[e] += p / na;
            }
        }
        let mut kl = 0.0;
        for row in &w.rows {
            for (e, &p) in row.iter().enumerate() {
                let pae = p / na;
                if pae > 0.0 {
                    kl += pae * (pae / (pe[e] / na)).ln();
                }
            }
        }
        let bound = kl_leakage_bound(&w, eps, SmoothingMethod::Exact).unwrap();
        assert!(kl <= bound + 1e-9, "KL {kl} > bound {bound}");
        // and the unscaled form indeed fails, which is what the scaling fixes
        let unscaled = smooth - (1.0 - eps) * (1.0 - eps).ln() + eps * 2f64.ln();
        assert!(kl > unscaled);
    }
}
