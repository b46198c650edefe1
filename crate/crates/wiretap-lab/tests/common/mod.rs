//! Shared samplers for the randomized suites. Everything is ChaCha-seeded
//! so failures reproduce exactly.

// each test binary compiles its own copy and uses a subset
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wiretap_lab::{Channel, Distribution};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn labels(k: usize) -> Vec<String> {
    (0..k).map(|i| i.to_string()).collect()
}

/// Exponential weights normalized to a full-support distribution.
pub fn random_distribution(rng: &mut ChaCha8Rng, k: usize) -> Distribution {
    let weights: Vec<f64> = (0..k).map(|_| -rng.random::<f64>().max(1e-12).ln()).collect();
    let total: f64 = weights.iter().sum();
    Distribution::new(labels(k), weights.iter().map(|w| w / total).collect()).unwrap()
}

/// Full-support random stochastic channel.
pub fn random_channel(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> Channel {
    let rows = (0..nx)
        .map(|_| random_distribution(rng, ny).probs)
        .collect();
    Channel::new(labels(nx), labels(ny), rows).unwrap()
}

/// Random channel with |A|, |E| up to 6 and at most 22 support entries, so
/// exact smoothing always applies. Row supports are chosen distinct and
/// sorted; empty slots stay exactly zero.
pub fn random_sparse_channel(rng: &mut ChaCha8Rng) -> Channel {
    let nx = rng.random_range(2..=6usize);
    let ny = rng.random_range(2..=6usize);
    let per_row_cap = (22 / nx).min(ny);
    let rows = (0..nx)
        .map(|_| {
            let support = rng.random_range(1..=per_row_cap);
            let mut outputs: Vec<usize> = (0..ny).collect();
            for i in (1..outputs.len()).rev() {
                let j = rng.random_range(0..=i);
                outputs.swap(i, j);
            }
            outputs.truncate(support);
            let mass = random_distribution(rng, support).probs;
            let mut row = vec![0.0; ny];
            for (slot, &y) in outputs.iter().enumerate() {
                row[y] = mass[slot];
            }
            row
        })
        .collect();
    Channel::new(labels(nx), labels(ny), rows).unwrap()
}
