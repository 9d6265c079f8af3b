//! Candidate families for the witness-search estimators.
//!
//! Every stream is derived from an explicit seed so estimates are
//! reproducible bit for bit. The structured generators build the shapes
//! that make the known lower bounds attainable: flat parts plus unit
//! spikes, exact weakness ties, and the padded vectors used by the
//! residual-parameter arguments.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coeff::{CoeffVector, IndexSet};
use crate::greedy::EnumOptions;

/// Independent deterministic stream for (seed, stream, item).
pub fn rng_for(seed: u64, stream: u64, item: u64) -> ChaCha8Rng {
    let mut bytes = [0u8; 32];
    bytes[0..8].copy_from_slice(&seed.to_le_bytes());
    bytes[8..16].copy_from_slice(&stream.to_le_bytes());
    bytes[16..24].copy_from_slice(&item.to_le_bytes());
    bytes[24..32].copy_from_slice(&0x9e37_79b9_7f4a_7c15u64.to_le_bytes());
    ChaCha8Rng::from_seed(bytes)
}

/// Stable stream id from a label.
pub fn stream_id(label: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

#[derive(Debug, Clone)]
pub struct FamilyConfig {
    pub dim: u32,
    pub seed: u64,
    /// Seeded random vectors added to the grid family.
    pub random_trials: usize,
    /// Full sign enumeration while `|A| + |B| <= sign_budget`.
    pub sign_budget: u32,
    /// Random sign draws per set pair beyond the budget.
    pub random_sign_draws: usize,
    /// Grid supports are drawn from the first `grid_window` indices.
    pub grid_window: u32,
    /// Support size cap for random vectors.
    pub max_support: u32,
    /// When positive, sample this many (A, B) pairs per vector instead of
    /// enumerating all of them (used at larger dimensions); the zero vector
    /// is always enumerated exhaustively so indicator-only specializations
    /// stay inside the family.
    pub pair_samples: usize,
    /// Drop the magnitude grid (solver-heavy estimators rely on random and
    /// structured candidates instead).
    pub lean_grid: bool,
    /// Extra caller-supplied vectors (block vectors, transformed witnesses).
    pub extra_vectors: Vec<CoeffVector>,
    pub enum_opts: EnumOptions,
}

impl FamilyConfig {
    pub fn new(dim: u32, seed: u64) -> Self {
        FamilyConfig {
            dim,
            seed,
            random_trials: 10_000,
            sign_budget: 20,
            random_sign_draws: 32,
            grid_window: 6,
            max_support: 4,
            pair_samples: 0,
            lean_grid: false,
            extra_vectors: Vec::new(),
            enum_opts: EnumOptions::default(),
        }
    }

    pub fn descriptor(&self) -> String {
        format!(
            "dim={} trials={} sign_budget={} grid_window={} pair_samples={}",
            self.dim, self.random_trials, self.sign_budget, self.grid_window, self.pair_samples
        )
    }
}

fn grid_supports(cfg: &FamilyConfig) -> Vec<Vec<u32>> {
    let window = cfg.grid_window.min(cfg.dim);
    let mut out = Vec::new();
    for a in 1..=window {
        out.push(vec![a]);
        for b in a + 1..=window {
            out.push(vec![a, b]);
            for c in b + 1..=window {
                out.push(vec![a, b, c]);
            }
        }
    }
    out
}

fn grid_vectors(cfg: &FamilyConfig, magnitudes: &[f64]) -> Vec<CoeffVector> {
    let mut out = Vec::new();
    let options: Vec<f64> = magnitudes
        .iter()
        .flat_map(|m| [*m, -*m])
        .collect();
    for support in grid_supports(cfg) {
        let k = support.len() as u32;
        let combos = (options.len() as u64).pow(k);
        for mut code in 0..combos {
            let mut pairs = Vec::with_capacity(support.len());
            for &n in &support {
                let v = options[(code % options.len() as u64) as usize];
                code /= options.len() as u64;
                pairs.push((n, v));
            }
            out.push(CoeffVector::from_pairs(cfg.dim, &pairs).expect("grid indices in range"));
        }
    }
    out
}

fn random_vector(cfg: &FamilyConfig, rng: &mut ChaCha8Rng) -> CoeffVector {
    random_vector_with(cfg.dim, cfg.max_support, rng)
}

/// Random vector with support size up to `max_support`; values snap to a
/// dyadic grid 30% of the time so exact ties appear.
pub(crate) fn random_vector_with(dim: u32, max_support: u32, rng: &mut ChaCha8Rng) -> CoeffVector {
    let size = rng.gen_range(1..=max_support.min(dim).max(1));
    let mut pairs = Vec::with_capacity(size as usize);
    let mut used = std::collections::BTreeSet::new();
    while pairs.len() < size as usize {
        let n = rng.gen_range(1..=dim);
        if used.insert(n) {
            let mut v: f64 = rng.gen_range(-1.0..1.0);
            if v == 0.0 {
                v = 0.5;
            }
            if rng.gen_bool(0.3) {
                v = v.signum() * [1.0, 0.5, 0.25][rng.gen_range(0..3)];
            }
            pairs.push((n, v));
        }
    }
    CoeffVector::from_pairs(dim, &pairs).expect("indices drawn in range")
}

/// Family of vectors with `sup norm <= 1/tau`: the zero vector, a full
/// sign-and-magnitude grid at `{1, 1/2, 1/4}/tau` on small supports, and
/// seeded random vectors normalized to sup norm exactly `1/tau`.
pub fn sup_normalized_vectors(cfg: &FamilyConfig, tau: f64, stream: u64) -> Vec<CoeffVector> {
    let bound = 1.0 / tau;
    let mut out = vec![CoeffVector::zero(cfg.dim)];
    if !cfg.lean_grid {
        out.extend(grid_vectors(cfg, &[bound, bound / 2.0, bound / 4.0]));
    }
    for i in 0..cfg.random_trials {
        let mut rng = rng_for(cfg.seed, stream, i as u64);
        let x = random_vector(cfg, &mut rng);
        let s = x.sup_norm();
        out.push(x.scaled(bound / s));
    }
    out.extend(cfg.extra_vectors.iter().cloned());
    out
}

/// Family of unconstrained vectors (projection and greedy-operator norms,
/// Lebesgue numerators): sign-magnitude grid plus seeded random vectors.
pub fn unconstrained_vectors(cfg: &FamilyConfig, stream: u64) -> Vec<CoeffVector> {
    let mut out = if cfg.lean_grid {
        Vec::new()
    } else {
        grid_vectors(cfg, &[1.0, 0.75, 0.5, 0.25])
    };
    for i in 0..cfg.random_trials {
        let mut rng = rng_for(cfg.seed, stream, i as u64);
        out.push(random_vector(cfg, &mut rng));
    }
    out.extend(cfg.extra_vectors.iter().cloned());
    out
}

/// Proof-shaped candidates for the Lebesgue estimators at order `m`.
///
/// Includes exact and near weakness ties (a flat part at 1 with one spike at
/// `1/tau - eta`), padded spike/flat combinations with the `1/tau` block
/// placed after a unit block, and plain flat vectors.
pub fn structured_lebesgue_vectors(m: u32, tau: f64, dim: u32) -> Vec<CoeffVector> {
    let mut out = Vec::new();
    let inv = 1.0 / tau;
    // flat block of m ones plus one spike slightly below the weakness limit
    for eta in [0.0, 1e-3, 1e-2] {
        if m + 1 <= dim {
            let mut pairs: Vec<(u32, f64)> = (1..=m).map(|n| (n, 1.0)).collect();
            pairs.push((m + 1, inv - eta));
            out.push(CoeffVector::from_pairs(dim, &pairs).expect("in range"));
        }
    }
    // unit spikes on A, scaled spikes on B, filler block C of ones:
    // 1_A + (1/tau) 1_B + 1_C with |A| + |C| = m
    for a_size in 0..=m {
        for b_size in 0..=a_size.max(1) {
            let c_size = m - a_size;
            let total = a_size + b_size + c_size;
            if total == 0 || total > dim {
                continue;
            }
            let mut pairs = Vec::new();
            let mut next = 1u32;
            for _ in 0..a_size {
                pairs.push((next, 1.0));
                next += 1;
            }
            for k in 0..b_size {
                pairs.push((next, if k % 2 == 0 { inv } else { -inv }));
                next += 1;
            }
            for _ in 0..c_size {
                pairs.push((next, 1.0));
                next += 1;
            }
            out.push(CoeffVector::from_pairs(dim, &pairs).expect("in range"));
        }
    }
    // residual-parameter shape: (1/tau) spikes low, filler, units high
    for b_size in 1..=m.min(dim / 2) {
        let a_size = b_size;
        if 2 * b_size > dim {
            break;
        }
        let mut pairs = Vec::new();
        for n in 1..=b_size {
            pairs.push((n, if n % 2 == 1 { inv } else { -inv }));
        }
        for n in 1..=a_size {
            pairs.push((b_size + n, 1.0));
        }
        out.push(CoeffVector::from_pairs(dim, &pairs).expect("in range"));
    }
    // flat vectors
    for s in 1..=(2 * m + 2).min(dim) {
        out.push(CoeffVector::from_pairs(dim, &(1..=s).map(|n| (n, 1.0)).collect::<Vec<_>>()).expect("in range"));
    }
    out
}

/// Enumerate subsets of `pool` of the given size, calling `f` on each.
pub(crate) fn for_each_subset_of(pool: &[u32], size: usize, f: &mut impl FnMut(&[u32])) {
    if size == 0 {
        f(&[]);
        return;
    }
    if size > pool.len() {
        return;
    }
    let mut idx: Vec<usize> = (0..size).collect();
    let mut buf: Vec<u32> = idx.iter().map(|&i| pool[i]).collect();
    loop {
        f(&buf);
        let mut i = size;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] < pool.len() - (size - i) {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                for j in i..size {
                    buf[j] = pool[idx[j]];
                }
                break;
            }
        }
    }
}

/// Sample a `size`-subset of `pool` uniformly (Floyd's algorithm).
pub(crate) fn sample_subset(pool: &[u32], size: usize, rng: &mut ChaCha8Rng) -> IndexSet {
    let n = pool.len();
    let mut chosen = std::collections::BTreeSet::new();
    for j in n - size..n {
        let t = rng.gen_range(0..=j);
        let candidate = pool[t];
        if !chosen.insert(candidate) {
            chosen.insert(pool[j]);
        }
    }
    IndexSet::new(chosen.into_iter().collect())
}
