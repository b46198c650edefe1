//! Randomized and property-based checks for the information measures:
//! order monotonicity, the divergence identities, the smoothing optimizer
//! against a brute-force oracle, and the leakage-bound inequalities.

mod common;

use common::{random_channel, random_distribution, random_sparse_channel, rng};
use proptest::prelude::*;
use wiretap_lab::info_measures::{
    c_quantity, cond_renyi_entropy, d2_vs_maxinfo_check, kl_divergence, kl_leakage_bound,
    max_information, mutual_information, renyi_divergence, restrict, smooth_max_information,
    RenyiOrder, SmoothingMethod, SmoothingSet,
};
use wiretap_lab::{capacity, Channel, Distribution, JointDistribution};

fn order(s: f64) -> RenyiOrder {
    RenyiOrder::new(s).unwrap()
}

fn random_joint(rng: &mut rand_chacha::ChaCha8Rng, na: usize, ne: usize) -> JointDistribution {
    let flat = random_distribution(rng, na * ne);
    let probs = (0..na)
        .map(|a| flat.probs[a * ne..(a + 1) * ne].to_vec())
        .collect();
    JointDistribution::new(
        (0..na).map(|i| i.to_string()).collect(),
        (0..ne).map(|i| i.to_string()).collect(),
        probs,
    )
    .unwrap()
}

/// Joint with an exactly uniform A-marginal: uniform index into random
/// conditional rows.
fn uniform_a_joint(rng: &mut rand_chacha::ChaCha8Rng, na: usize, ne: usize) -> JointDistribution {
    let probs = (0..na)
        .map(|_| {
            random_distribution(rng, ne)
                .probs
                .iter()
                .map(|p| p / na as f64)
                .collect()
        })
        .collect();
    JointDistribution::new(
        (0..na).map(|i| i.to_string()).collect(),
        (0..ne).map(|i| i.to_string()).collect(),
        probs,
    )
    .unwrap()
}

#[test]
fn renyi_divergence_monotone_in_s() {
    let mut rng = rng(0x52454e59);
    for _ in 0..100 {
        let k = rng.random_range(2..=5usize);
        let p = random_distribution(&mut rng, k);
        let q = random_distribution(&mut rng, k);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let d = renyi_divergence(&p, &q, order(s)).unwrap();
            assert!(d >= prev - 1e-9, "s={s}: {d} < {prev}");
            prev = d;
        }
    }
}

#[test]
fn cond_renyi_entropy_nonincreasing_in_s() {
    let mut rng = rng(0x434f4e44);
    for _ in 0..100 {
        let (na, ne) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let joint = random_joint(&mut rng, na, ne);
        let mut prev = f64::INFINITY;
        for i in 0..=10 {
            let s = i as f64 / 10.0;
            let h = cond_renyi_entropy(&joint, order(s));
            assert!(h <= prev + 1e-9, "s={s}");
            prev = h;
        }
    }
}

#[test]
fn c_quantity_equals_divergence_from_mix_product() {
    let mut rng = rng(0x43514d49);
    for _ in 0..50 {
        let na = rng.random_range(2..=4usize);
        let ne = rng.random_range(2..=4usize);
        let joint = uniform_a_joint(&mut rng, na, ne);
        let pe = joint.marginal_e();
        // flatten the joint and the product P_mix x P_E over the pair space
        let pair_alphabet: Vec<String> = (0..na * ne).map(|i| i.to_string()).collect();
        let joint_flat = Distribution::new(
            pair_alphabet.clone(),
            joint.probs.iter().flatten().copied().collect(),
        )
        .unwrap();
        let product_flat = Distribution::new(
            pair_alphabet,
            (0..na)
                .flat_map(|_| pe.probs.iter().map(|&q| q / na as f64).collect::<Vec<_>>())
                .collect(),
        )
        .unwrap();
        for s in [0.0, 0.25, 0.5, 1.0] {
            let c = c_quantity(&joint, order(s)).unwrap();
            let d = renyi_divergence(&joint_flat, &product_flat, order(s)).unwrap();
            assert!((c - d).abs() < 1e-9, "s={s}: {c} vs {d}");
        }
    }
}

#[test]
fn d2_dominates_kl_for_joint_vs_product() {
    let mut rng = rng(0x44324b4c);
    for _ in 0..100 {
        let (na, ne) = (rng.random_range(2..=4), rng.random_range(2..=4));
        let joint = random_joint(&mut rng, na, ne);
        let pa = joint.marginal_a();
        let pe = joint.marginal_e();
        let pair_alphabet: Vec<String> =
            (0..pa.len() * pe.len()).map(|i| i.to_string()).collect();
        let joint_flat = Distribution::new(
            pair_alphabet.clone(),
            joint.probs.iter().flatten().copied().collect(),
        )
        .unwrap();
        let product_flat = Distribution::new(
            pair_alphabet,
            pa.probs
                .iter()
                .flat_map(|&a| pe.probs.iter().map(move |&b| a * b))
                .collect(),
        )
        .unwrap();
        let kl = kl_divergence(&joint_flat, &product_flat).unwrap();
        let d2 = renyi_divergence(&joint_flat, &product_flat, order(1.0)).unwrap();
        assert!(d2 >= kl - 1e-9);
    }
}

#[test]
fn lemma8_holds_on_random_channels() {
    let mut rng = rng(0x4c454d38);
    for trial in 0..200 {
        let (nx, ny) = (rng.random_range(2..=6), rng.random_range(2..=6));
        let w = random_channel(&mut rng, nx, ny);
        let check = d2_vs_maxinfo_check(&w);
        assert!(check.holds, "trial {trial}: {check:?}");
    }
}

/// Independent oracle: KL(P_AE || P_A x P_E) for uniform A by direct sum.
fn kl_uniform_joint_oracle(w: &Channel) -> f64 {
    let na = w.num_inputs() as f64;
    let mut pe = vec![0.0; w.num_outputs()];
    for row in &w.rows {
        for (e, &p) in row.iter().enumerate() {
            pe[e] += p / na;
        }
    }
    let mut acc = 0.0;
    for row in &w.rows {
        for (e, &p) in row.iter().enumerate() {
            let pae = p / na;
            if pae > 0.0 {
                acc += pae * (pae / (1.0 / na * pe[e])).ln();
            }
        }
    }
    acc
}

#[test]
fn lemma9_bound_dominates_exact_kl() {
    let mut rng = rng(0x4c454d39);
    for trial in 0..40 {
        let w = random_sparse_channel(&mut rng);
        let kl = kl_uniform_joint_oracle(&w);
        for eps in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
            let bound = kl_leakage_bound(&w, eps, SmoothingMethod::Exact).unwrap();
            assert!(
                kl <= bound + 1e-9,
                "trial {trial} eps {eps}: KL {kl} > bound {bound}"
            );
        }
    }
}

/// Brute-force smoothing oracle: every subset of the support, per-row
/// feasibility checked directly, objective recomputed from scratch.
fn smooth_max_oracle(w: &Channel, eps: f64) -> f64 {
    let entries: Vec<(usize, usize, f64)> = w
        .rows
        .iter()
        .enumerate()
        .flat_map(|(x, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(move |(y, &p)| (x, y, p))
        })
        .collect();
    let t = entries.len();
    assert!(t <= 22);
    let mut best = f64::INFINITY;
    'subset: for mask in 0u32..(1 << t) {
        let mut kept_mass = vec![0.0; w.num_inputs()];
        let mut colmax = vec![0.0f64; w.num_outputs()];
        for (i, &(x, y, p)) in entries.iter().enumerate() {
            if mask >> i & 1 == 1 {
                kept_mass[x] += p;
                colmax[y] = colmax[y].max(p);
            }
        }
        for &mass in &kept_mass {
            if mass < 1.0 - eps - 1e-12 {
                continue 'subset;
            }
        }
        best = best.min(colmax.iter().sum());
    }
    best.ln()
}

#[test]
fn exact_smoothing_matches_subset_oracle_on_3x3() {
    let mut rng = rng(0x534d4f4f);
    for trial in 0..25 {
        let w = random_channel(&mut rng, 3, 3);
        for eps in [0.05, 0.2, 0.5] {
            let (exact, witness) =
                smooth_max_information(&w, eps, SmoothingMethod::Exact).unwrap();
            let oracle = smooth_max_oracle(&w, eps);
            assert!(
                (exact - oracle).abs() < 1e-12,
                "trial {trial} eps {eps}: {exact} vs {oracle}"
            );
            assert!(witness.is_feasible(&w, eps));
            let (greedy, gw) =
                smooth_max_information(&w, eps, SmoothingMethod::Greedy).unwrap();
            assert!(greedy >= exact - 1e-12);
            assert!(gw.is_feasible(&w, eps));
        }
    }
}

/// Oracle variant that also returns the lexicographically smallest
/// minimizing kept-set (entry-0-first bit order), for the witness contract.
fn smooth_max_oracle_with_witness(w: &Channel, eps: f64) -> (f64, Vec<bool>) {
    let entries: Vec<(usize, usize, f64)> = w
        .rows
        .iter()
        .enumerate()
        .flat_map(|(x, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &p)| p > 0.0)
                .map(move |(y, &p)| (x, y, p))
        })
        .collect();
    let t = entries.len();
    let mut best = f64::INFINITY;
    let mut best_bits: Vec<bool> = Vec::new();
    'subset: for mask in 0u32..(1 << t) {
        let mut kept_mass = vec![0.0; w.num_inputs()];
        let mut colmax = vec![0.0f64; w.num_outputs()];
        for (i, &(x, y, p)) in entries.iter().enumerate() {
            if mask >> i & 1 == 1 {
                kept_mass[x] += p;
                colmax[y] = colmax[y].max(p);
            }
        }
        for &mass in &kept_mass {
            if mass < 1.0 - eps - 1e-12 {
                continue 'subset;
            }
        }
        let sum: f64 = colmax.iter().sum();
        let bits: Vec<bool> = (0..t).map(|i| mask >> i & 1 == 1).collect();
        if sum < best || (sum == best && bits < best_bits) {
            best = sum;
            best_bits = bits;
        }
    }
    (best.ln(), best_bits)
}

#[test]
fn exact_smoothing_witness_is_lex_smallest_minimizer() {
    let mut rng = rng(0x574954);
    for trial in 0..30 {
        let w = random_sparse_channel(&mut rng);
        for eps in [0.1, 0.35, 0.6] {
            let (value, witness) =
                smooth_max_information(&w, eps, SmoothingMethod::Exact).unwrap();
            let (oracle_value, oracle_bits) = smooth_max_oracle_with_witness(&w, eps);
            assert!((value - oracle_value).abs() < 1e-12, "trial {trial} eps {eps}");
            let witness_bits: Vec<bool> = w
                .rows
                .iter()
                .enumerate()
                .flat_map(|(x, row)| {
                    row.iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(move |(y, _)| (x, y))
                })
                .map(|(x, y)| witness.member[x][y])
                .collect();
            assert_eq!(
                witness_bits, oracle_bits,
                "trial {trial} eps {eps}: witness differs from lex-smallest minimizer"
            );
        }
    }
}

#[test]
fn exact_smoothing_nonincreasing_in_eps() {
    let mut rng = rng(0x45505345);
    for _ in 0..20 {
        let w = random_sparse_channel(&mut rng);
        let mut prev = f64::INFINITY;
        for i in 0..=6 {
            let eps = i as f64 / 10.0;
            let (v, _) = smooth_max_information(&w, eps, SmoothingMethod::Exact).unwrap();
            assert!(v <= prev + 1e-12, "eps={eps}");
            prev = v;
        }
    }
}

#[test]
fn smoothing_witness_value_is_restricted_maxinfo() {
    let mut rng = rng(0x57495456);
    for _ in 0..20 {
        let w = random_channel(&mut rng, 3, 4);
        for (eps, method) in [(0.1, SmoothingMethod::Exact), (0.35, SmoothingMethod::Greedy)] {
            let (v, witness) = smooth_max_information(&w, eps, method).unwrap();
            let restricted = restrict(&w, &witness).unwrap();
            assert!((v - max_information(&restricted)).abs() < 1e-12);
        }
    }
}

#[test]
fn full_smoothing_set_feasible_only_at_any_eps() {
    let w = Channel::bsc(0.25).unwrap();
    let full = SmoothingSet::full(2, 2);
    assert!(full.is_feasible(&w, 0.0));
    assert!(full.is_feasible(&w, 0.7));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn output_distribution_has_unit_mass(
        weights in prop::collection::vec(1e-6f64..1.0, 2..6),
        rows_seed in 0u64..1000,
    ) {
        let k = weights.len();
        let total: f64 = weights.iter().sum();
        let p = Distribution::new(
            (0..k).map(|i| i.to_string()).collect(),
            weights.iter().map(|w| w / total).collect(),
        ).unwrap();
        let mut r = rng(rows_seed);
        let w = random_channel(&mut r, k, 3);
        let out = wiretap_lab::output_distribution(&p, &w).unwrap();
        prop_assert!((out.probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn compose_is_associative(seed in 0u64..500) {
        let mut r = rng(seed);
        let a = random_channel(&mut r, 3, 4);
        let b = random_channel(&mut r, 4, 2);
        let c = random_channel(&mut r, 2, 3);
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        for (x, y) in left.rows.iter().flatten().zip(right.rows.iter().flatten()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn capacity_dominates_any_mutual_information(seed in 0u64..100) {
        let mut r = rng(seed);
        let (nx, ny) = (r.random_range(2..=4), r.random_range(2..=4));
        let w = random_channel(&mut r, nx, ny);
        let tol = 1e-6;
        let cap = capacity(&w, tol).unwrap();
        for _ in 0..50 {
            let p = random_distribution(&mut r, w.num_inputs());
            let mi = mutual_information(&p, &w).unwrap();
            prop_assert!(cap.value >= mi - tol);
        }
    }

    #[test]
    fn degraded_cascade_never_gains_capacity(seed in 0u64..100) {
        let mut r = rng(seed);
        let v = random_channel(&mut r, 3, 3);
        let w = random_channel(&mut r, 3, 3);
        let u = v.compose(&w).unwrap();
        // random cascades can converge slowly; a loose bracket suffices here
        let cv = capacity(&v, 1e-6).unwrap().value;
        let cu = capacity(&u, 1e-6).unwrap().value;
        prop_assert!(cu <= cv + 2e-6);
    }
}
