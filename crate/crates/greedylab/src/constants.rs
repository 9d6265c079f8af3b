//! Certified lower-bound estimators for greedy-type constants, with the
//! witness transforms linking the replacement-form and exchange-form
//! suprema.
//!
//! Every estimate stores the witness realizing it; `reevaluate` recomputes
//! the defining ratio through the same primitives the search used, so a
//! stored bound always reproduces exactly.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::coeff::{CoeffVector, IndexSet, SignPattern};
use crate::error::{Error, Result};
use crate::family::{self, FamilyConfig};
use crate::greedy;
use crate::norms::NormOracle;
use crate::par::{self, Scored};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantKind {
    /// sup of `||tau x + 1_dB|| / ||x + 1_eA||`, `|B| <= |A| <= m`, disjoint.
    PropertyA,
    /// Same with `B < A` and `|A| = |B|`.
    PropertyALeft,
    /// Same with `B` below `supp(x)` and `A`, `max B <= m`, `|B| <= |A|`.
    PropertyAPartial,
    /// sup of `||x|| / ||x - P_B(x) + t 1_eA||` (exchange form).
    Exchange,
    ExchangeLeft,
    ExchangePartial,
    /// sup of `||P_A x|| / ||x||`, `|A| <= m`.
    Projection,
    /// sup of `||x - P_A x|| / ||x||`, `|A| <= m`.
    ProjectionComplement,
    /// sup of `||P_L x|| / ||x||` over weak greedy sets of order <= m.
    GreedyProjection,
    /// sup of `||x - P_L x|| / ||x||` over weak greedy sets of order <= m.
    GreedyComplement,
    /// sup of `||1_dB|| / ||1_eA||`, `|A| = |B| <= m`.
    SuperDemocracy,
    /// Same with `B < A`.
    SuperConservancy,
    /// sup of `||1_eL||` over `|L| = n`.
    Fundamental,
}

/// Structured witness record; fields are populated as the kind requires.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Witness {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<CoeffVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_a: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub set_b: Option<IndexSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<SignPattern>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<SignPattern>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Greedy order realizing the bound (greedy-projection kinds).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order: Option<u32>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticBound {
    pub value: f64,
    pub provenance: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstantEstimate {
    pub kind: ConstantKind,
    pub m: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub lower_bound: f64,
    pub witness: Witness,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_upper: Option<AnalyticBound>,
    pub family: String,
    pub seed: u64,
    /// True when the search enumerated its whole candidate space.
    pub exhaustive: bool,
    /// True when an enumeration cap was hit somewhere inside.
    pub truncated: bool,
    /// Zero-denominator candidates skipped.
    pub skipped: u64,
}

fn validate_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must lie in (0, 1], got {tau}")))
    }
}

type Spikes = SmallVec<[(u32, f64); 8]>;

fn signed_spikes(set: &IndexSet, bits: u64, shift: u32, scale: f64) -> Spikes {
    set.iter()
        .enumerate()
        .map(|(k, n)| {
            let neg = bits >> (shift + k as u32) & 1 == 1;
            (n, if neg { -scale } else { scale })
        })
        .collect()
}

fn ratio_replacement(
    x: &CoeffVector,
    a_spikes: &[(u32, f64)],
    b_spikes: &[(u32, f64)],
    tau: f64,
    oracle: &NormOracle,
) -> Option<f64> {
    let den = oracle.eval_scaled_plus_spikes(x, 1.0, a_spikes);
    if den <= f64::MIN_POSITIVE {
        return None;
    }
    let num = oracle.eval_scaled_plus_spikes(x, tau, b_spikes);
    Some(num / den)
}

fn ratio_exchange(
    x_norm: f64,
    x: &CoeffVector,
    drop_b: &[u32],
    a_spikes: &[(u32, f64)],
    oracle: &NormOracle,
) -> Option<f64> {
    let den = oracle.eval_dropped_plus_spikes(x, drop_b, a_spikes);
    if den <= f64::MIN_POSITIVE {
        return None;
    }
    Some(x_norm / den)
}

impl ConstantEstimate {
    /// Recompute the defining ratio from the stored witness.
    pub fn reevaluate(&self, oracle: &NormOracle) -> Result<f64> {
        let w = &self.witness;
        let need = |o: &Option<CoeffVector>| {
            o.clone()
                .ok_or_else(|| Error::domain("witness lacks a vector"))
        };
        let sets = |a: &Option<IndexSet>| a.clone().unwrap_or_else(IndexSet::empty);
        let a = sets(&w.set_a);
        let b = sets(&w.set_b);
        let eps = w.eps.clone().unwrap_or_else(|| SignPattern::plus_on(&a));
        let delta = w.delta.clone().unwrap_or_else(|| SignPattern::plus_on(&b));
        match self.kind {
            ConstantKind::PropertyA | ConstantKind::PropertyALeft | ConstantKind::PropertyAPartial => {
                let x = need(&w.x)?;
                let tau = self.tau.ok_or_else(|| Error::domain("missing tau"))?;
                let asp: Spikes = eps.signed_spikes(&a, 1.0)?.into_iter().collect();
                let bsp: Spikes = delta.signed_spikes(&b, 1.0)?.into_iter().collect();
                ratio_replacement(&x, &asp, &bsp, tau, oracle)
                    .ok_or_else(|| Error::domain("witness denominator vanishes"))
            }
            ConstantKind::Exchange | ConstantKind::ExchangeLeft | ConstantKind::ExchangePartial => {
                let x = need(&w.x)?;
                let t = w.t.unwrap_or(1.0);
                let asp: Spikes = eps.signed_spikes(&a, t)?.into_iter().collect();
                let x_norm = oracle.eval(&x)?;
                ratio_exchange(x_norm, &x, b.as_slice(), &asp, oracle)
                    .ok_or_else(|| Error::domain("witness denominator vanishes"))
            }
            ConstantKind::Projection | ConstantKind::ProjectionComplement => {
                let x = need(&w.x)?;
                let den = oracle.eval(&x)?;
                if den <= f64::MIN_POSITIVE {
                    return Err(Error::domain("witness vector is zero"));
                }
                let num = if self.kind == ConstantKind::Projection {
                    oracle.eval(&greedy::project(&x, &a))?
                } else {
                    oracle.eval_dropped_plus_spikes(&x, a.as_slice(), &[])
                };
                Ok(num / den)
            }
            ConstantKind::GreedyProjection | ConstantKind::GreedyComplement => {
                let x = need(&w.x)?;
                let den = oracle.eval(&x)?;
                if den <= f64::MIN_POSITIVE {
                    return Err(Error::domain("witness vector is zero"));
                }
                let num = if self.kind == ConstantKind::GreedyProjection {
                    oracle.eval(&greedy::project(&x, &a))?
                } else {
                    oracle.eval_dropped_plus_spikes(&x, a.as_slice(), &[])
                };
                Ok(num / den)
            }
            ConstantKind::SuperDemocracy | ConstantKind::SuperConservancy => {
                let asp: Spikes = eps.signed_spikes(&a, 1.0)?.into_iter().collect();
                let bsp: Spikes = delta.signed_spikes(&b, 1.0)?.into_iter().collect();
                let zero = CoeffVector::zero(a.max_index().unwrap_or(1).max(b.max_index().unwrap_or(1)));
                let den = oracle.eval_scaled_plus_spikes(&zero, 1.0, &asp);
                if den <= f64::MIN_POSITIVE {
                    return Err(Error::domain("witness denominator vanishes"));
                }
                Ok(oracle.eval_scaled_plus_spikes(&zero, 1.0, &bsp) / den)
            }
            ConstantKind::Fundamental => {
                let asp: Spikes = eps.signed_spikes(&a, 1.0)?.into_iter().collect();
                let zero = CoeffVector::zero(a.max_index().unwrap_or(1));
                Ok(oracle.eval_scaled_plus_spikes(&zero, 1.0, &asp))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PaVariant {
    Plain,
    Left,
    Partial,
}

/// Visit (A, B) pairs satisfying the variant's positional constraints for a
/// given x. Enumerates exhaustively unless `pair_samples` is set, in which
/// case canonical low/high pairs plus sampled pairs are visited.
fn replacement_pairs(
    x: &CoeffVector,
    m: u32,
    variant: PaVariant,
    cfg: &FamilyConfig,
    stream: u64,
    x_idx: u64,
    visit: &mut impl FnMut(&IndexSet, &IndexSet),
) {
    let free: Vec<u32> = (1..=cfg.dim).filter(|n| x.coeff(*n) == 0.0).collect();
    visit(&IndexSet::empty(), &IndexSet::empty());
    if m == 0 {
        return;
    }
    let size_pairs: Vec<(usize, usize)> = match variant {
        PaVariant::Plain | PaVariant::Partial => (1..=m as usize)
            .flat_map(|a| (0..=a).map(move |b| (a, b)))
            .collect(),
        PaVariant::Left => (1..=m as usize).map(|a| (a, a)).collect(),
    };
    let min_supp = x.support().next().unwrap_or(u32::MAX);
    let admissible_b = |a: &IndexSet, b: &IndexSet| -> bool {
        match variant {
            PaVariant::Plain => b.disjoint(a),
            PaVariant::Left => b.entirely_below(a),
            PaVariant::Partial => {
                b.max_at_most(m)
                    && b.max_index().map_or(true, |mb| mb < min_supp)
                    && b.entirely_below(a)
            }
        }
    };
    // The zero vector is always enumerated in full so the indicator-only
    // specializations (super-conservancy witnesses, flat ties) are present.
    if cfg.pair_samples == 0 || x.is_zero() {
        for &(a_size, b_size) in &size_pairs {
            family::for_each_subset_of(&free, a_size, &mut |a_raw| {
                let a = IndexSet::new(a_raw.to_vec());
                let b_pool: Vec<u32> = match variant {
                    PaVariant::Plain => free.iter().copied().filter(|n| !a.contains(*n)).collect(),
                    PaVariant::Left => {
                        let lim = a.min_index().unwrap_or(0);
                        free.iter().copied().filter(|n| *n < lim).collect()
                    }
                    PaVariant::Partial => {
                        let lim = a.min_index().unwrap_or(u32::MAX).min(min_supp);
                        free.iter()
                            .copied()
                            .filter(|n| *n < lim && *n <= m)
                            .collect()
                    }
                };
                family::for_each_subset_of(&b_pool, b_size, &mut |b_raw| {
                    let b = IndexSet::new(b_raw.to_vec());
                    debug_assert!(admissible_b(&a, &b));
                    visit(&a, &b);
                });
            });
        }
        return;
    }
    // Sampled mode: canonical pairs at both ends of the free range, then
    // random pairs.
    for &(a_size, b_size) in &size_pairs {
        for high_a in [false, true] {
            let (a_raw, b_raw): (Vec<u32>, Vec<u32>) = match variant {
                PaVariant::Plain => {
                    if free.len() < a_size + b_size {
                        continue;
                    }
                    if high_a {
                        let a: Vec<u32> = free[free.len() - a_size..].to_vec();
                        (a, free[..b_size].to_vec())
                    } else {
                        (
                            free[..a_size].to_vec(),
                            free[a_size..a_size + b_size].to_vec(),
                        )
                    }
                }
                PaVariant::Left | PaVariant::Partial => {
                    if free.len() < a_size + b_size {
                        continue;
                    }
                    let b: Vec<u32> = free[..b_size].to_vec();
                    let rest: Vec<u32> = free[b_size..].to_vec();
                    let a = if high_a {
                        rest[rest.len().saturating_sub(a_size)..].to_vec()
                    } else {
                        rest[..a_size.min(rest.len())].to_vec()
                    };
                    (a, b)
                }
            };
            if a_raw.len() != a_size || b_raw.len() != b_size {
                continue;
            }
            let a = IndexSet::new(a_raw);
            let b = IndexSet::new(b_raw);
            if admissible_b(&a, &b) {
                visit(&a, &b);
            }
        }
    }
    let mut rng = family::rng_for(cfg.seed, stream ^ 0x7061, x_idx);
    let mut emitted = 0usize;
    let mut attempts = 0usize;
    while emitted < cfg.pair_samples && attempts < cfg.pair_samples * 8 {
        attempts += 1;
        let (a_size, b_size) = size_pairs[rng.gen_range(0..size_pairs.len())];
        if free.len() < a_size {
            continue;
        }
        let a = family::sample_subset(&free, a_size, &mut rng);
        let b_pool: Vec<u32> = match variant {
            PaVariant::Plain => free.iter().copied().filter(|n| !a.contains(*n)).collect(),
            PaVariant::Left => {
                let lim = a.min_index().unwrap_or(0);
                free.iter().copied().filter(|n| *n < lim).collect()
            }
            PaVariant::Partial => {
                let lim = a.min_index().unwrap_or(u32::MAX).min(min_supp);
                free.iter()
                    .copied()
                    .filter(|n| *n < lim && *n <= m)
                    .collect()
            }
        };
        if b_pool.len() < b_size {
            continue;
        }
        let b = family::sample_subset(&b_pool, b_size, &mut rng);
        visit(&a, &b);
        emitted += 1;
    }
}

struct SearchHit {
    ratio: f64,
    a: IndexSet,
    b: IndexSet,
    a_bits: u64,
    b_bits: u64,
}

/// Core replacement-form search shared by the three property-(A) variants.
fn estimate_replacement(
    kind: ConstantKind,
    variant: PaVariant,
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    validate_tau(tau)?;
    oracle.check_dim(cfg.dim)?;
    let stream = family::stream_id(&format!("replacement:{kind:?}:{m}:{tau}"));
    let vectors = family::sup_normalized_vectors(cfg, tau, stream);
    let skipped = AtomicU64::new(0);
    let exhaustive_pairs = cfg.pair_samples == 0;
    let best = par::best_over(vectors.len(), |i| {
        let x = &vectors[i];
        let mut best: Option<SearchHit> = None;
        let mut local_skipped = 0u64;
        replacement_pairs(x, m, variant, cfg, stream, i as u64, &mut |a, b| {
            let total = (a.len() + b.len()) as u32;
            let full = total <= cfg.sign_budget;
            let count = if full {
                1u64 << total
            } else {
                cfg.random_sign_draws as u64
            };
            let mut rng = family::rng_for(cfg.seed, stream ^ 0x5349, i as u64);
            for k in 0..count {
                let bits = if full { k } else { rng.gen() };
                let asp = signed_spikes(a, bits, 0, 1.0);
                let bsp = signed_spikes(b, bits, a.len() as u32, 1.0);
                match ratio_replacement(x, &asp, &bsp, tau, oracle) {
                    Some(r) => {
                        if best.as_ref().map_or(true, |h| r > h.ratio) {
                            best = Some(SearchHit {
                                ratio: r,
                                a: a.clone(),
                                b: b.clone(),
                                a_bits: bits,
                                b_bits: bits >> a.len(),
                            });
                        }
                    }
                    None => local_skipped += 1,
                }
            }
        });
        skipped.fetch_add(local_skipped, Ordering::Relaxed);
        best.map(|h| Scored {
            score: h.ratio,
            ordinal: i as u64,
            payload: (h, x.clone()),
        })
    });
    let (hit, x) = match best {
        Some(s) => s.payload,
        None => {
            return Err(Error::domain(
                "no admissible candidate (family produced only zero denominators)",
            ))
        }
    };
    let lower = reeval_ratio_replacement(&x, &hit, tau, oracle);
    let analytic_upper = oracle.metadata().property_a.map(|v| AnalyticBound {
        value: v,
        provenance: format!("property-(A) metadata bound of `{}`", oracle.name()),
    });
    Ok(ConstantEstimate {
        kind,
        m,
        tau: Some(tau),
        lower_bound: lower,
        witness: Witness {
            x: Some(x),
            eps: Some(SignPattern::from_bits(&hit.a, hit.a_bits)),
            delta: Some(SignPattern::from_bits(&hit.b, hit.b_bits)),
            set_a: Some(hit.a),
            set_b: Some(hit.b),
            t: None,
            order: None,
        },
        analytic_upper,
        family: cfg.descriptor(),
        seed: cfg.seed,
        exhaustive: exhaustive_pairs && cfg.random_trials == 0,
        truncated: false,
        skipped: skipped.load(Ordering::Relaxed),
    })
}

fn reeval_ratio_replacement(x: &CoeffVector, hit: &SearchHit, tau: f64, oracle: &NormOracle) -> f64 {
    let asp = signed_spikes(&hit.a, hit.a_bits, 0, 1.0);
    let bsp = signed_spikes(&hit.b, hit.b_bits, 0, 1.0);
    ratio_replacement(x, &asp, &bsp, tau, oracle).expect("witness had positive denominator")
}

/// Property-(A) constant at weakness `tau`, order `m`.
pub fn estimate_property_a(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_replacement(ConstantKind::PropertyA, PaVariant::Plain, m, tau, oracle, cfg)
}

/// Left variant: the replacement set sits strictly below the replaced one.
pub fn estimate_property_a_left(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_replacement(ConstantKind::PropertyALeft, PaVariant::Left, m, tau, oracle, cfg)
}

/// Partial-symmetry variant: `B` below `supp(x)` and `A`, `max B <= m`,
/// unequal cardinalities allowed.
pub fn estimate_property_a_partial(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_replacement(
        ConstantKind::PropertyAPartial,
        PaVariant::Partial,
        m,
        tau,
        oracle,
        cfg,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExchangeVariant {
    Plain,
    Left,
    Partial,
}

/// Exchange-form constant: sup of `||x|| / ||x - P_B(x) + t 1_eA||` with
/// `t = 1` inside the family (the ratio is scale-invariant in `(x, t)`).
pub fn estimate_exchange(
    variant: ExchangeVariant,
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    validate_tau(tau)?;
    oracle.check_dim(cfg.dim)?;
    let kind = match variant {
        ExchangeVariant::Plain => ConstantKind::Exchange,
        ExchangeVariant::Left => ConstantKind::ExchangeLeft,
        ExchangeVariant::Partial => ConstantKind::ExchangePartial,
    };
    let stream = family::stream_id(&format!("exchange:{kind:?}:{m}:{tau}"));
    let vectors = family::sup_normalized_vectors(cfg, tau, stream);
    let skipped = AtomicU64::new(0);
    let best = par::best_over(vectors.len(), |i| {
        let x = &vectors[i];
        let x_norm = oracle.eval(x).expect("dim checked");
        if x_norm <= f64::MIN_POSITIVE {
            return None;
        }
        let mut best: Option<SearchHit> = None;
        let mut local_skipped = 0u64;
        exchange_pairs(x, m, variant, cfg, stream, i as u64, &mut |a, b| {
            let abits_total = a.len() as u32;
            let full = abits_total <= cfg.sign_budget;
            let count = if full {
                1u64 << abits_total
            } else {
                cfg.random_sign_draws as u64
            };
            let mut rng = family::rng_for(cfg.seed, stream ^ 0x5349, i as u64);
            for k in 0..count {
                let bits = if full { k } else { rng.gen() };
                let asp = signed_spikes(a, bits, 0, 1.0);
                match ratio_exchange(x_norm, x, b.as_slice(), &asp, oracle) {
                    Some(r) => {
                        if best.as_ref().map_or(true, |h| r > h.ratio) {
                            best = Some(SearchHit {
                                ratio: r,
                                a: a.clone(),
                                b: b.clone(),
                                a_bits: bits,
                                b_bits: 0,
                            });
                        }
                    }
                    None => local_skipped += 1,
                }
            }
        });
        skipped.fetch_add(local_skipped, Ordering::Relaxed);
        best.map(|h| Scored {
            score: h.ratio,
            ordinal: i as u64,
            payload: (h, x.clone()),
        })
    });
    let (hit, x) = match best {
        Some(s) => s.payload,
        None => return Err(Error::domain("no admissible exchange candidate")),
    };
    let lower = {
        let asp = signed_spikes(&hit.a, hit.a_bits, 0, 1.0);
        let xn = oracle.eval(&x)?;
        ratio_exchange(xn, &x, hit.b.as_slice(), &asp, oracle).expect("positive denominator")
    };
    let analytic_upper = oracle.metadata().property_a.map(|v| AnalyticBound {
        value: v / tau,
        provenance: format!("property-(A) metadata bound of `{}` divided by tau", oracle.name()),
    });
    Ok(ConstantEstimate {
        kind,
        m,
        tau: Some(tau),
        lower_bound: lower,
        witness: Witness {
            x: Some(x),
            eps: Some(SignPattern::from_bits(&hit.a, hit.a_bits)),
            delta: None,
            set_a: Some(hit.a),
            set_b: Some(hit.b),
            t: Some(1.0),
            order: None,
        },
        analytic_upper,
        family: cfg.descriptor(),
        seed: cfg.seed,
        exhaustive: false,
        truncated: false,
        skipped: skipped.load(Ordering::Relaxed),
    })
}

fn exchange_pairs(
    x: &CoeffVector,
    m: u32,
    variant: ExchangeVariant,
    cfg: &FamilyConfig,
    stream: u64,
    x_idx: u64,
    visit: &mut impl FnMut(&IndexSet, &IndexSet),
) {
    let free: Vec<u32> = (1..=cfg.dim).filter(|n| x.coeff(*n) == 0.0).collect();
    let all: Vec<u32> = (1..=cfg.dim).collect();
    visit(&IndexSet::empty(), &IndexSet::empty());
    if m == 0 {
        return;
    }
    let size_pairs: Vec<(usize, usize)> = match variant {
        ExchangeVariant::Plain | ExchangeVariant::Left => {
            (1..=m as usize).map(|s| (s, s)).collect()
        }
        ExchangeVariant::Partial => (1..=m as usize)
            .flat_map(|a| (0..=a).map(move |b| (a, b)))
            .collect(),
    };
    let emit_b_pool = |a: &IndexSet| -> Vec<u32> {
        match variant {
            ExchangeVariant::Plain => all.iter().copied().filter(|n| !a.contains(*n)).collect(),
            ExchangeVariant::Left => {
                let lim = a.min_index().unwrap_or(0);
                all.iter().copied().filter(|n| *n < lim).collect()
            }
            ExchangeVariant::Partial => {
                let lim = a.min_index().unwrap_or(u32::MAX);
                all.iter().copied().filter(|n| *n < lim && *n <= m).collect()
            }
        }
    };
    // Partial: the kept support below max B must be contained in B.
    let partial_ok = |b: &IndexSet| -> bool {
        if variant != ExchangeVariant::Partial {
            return true;
        }
        let mb = b.max_index().unwrap_or(0);
        x.support().take_while(|n| *n <= mb).all(|n| b.contains(n))
    };
    if cfg.pair_samples == 0 {
        for &(a_size, b_size) in &size_pairs {
            family::for_each_subset_of(&free, a_size, &mut |a_raw| {
                let a = IndexSet::new(a_raw.to_vec());
                let pool = emit_b_pool(&a);
                family::for_each_subset_of(&pool, b_size, &mut |b_raw| {
                    let b = IndexSet::new(b_raw.to_vec());
                    if partial_ok(&b) {
                        visit(&a, &b);
                    }
                });
            });
        }
        return;
    }
    let mut rng = family::rng_for(cfg.seed, stream ^ 0x7062, x_idx);
    let mut emitted = 0usize;
    let mut attempts = 0usize;
    while emitted < cfg.pair_samples && attempts < cfg.pair_samples * 8 {
        attempts += 1;
        let (a_size, b_size) = size_pairs[rng.gen_range(0..size_pairs.len())];
        if free.len() < a_size {
            continue;
        }
        let a = family::sample_subset(&free, a_size, &mut rng);
        let pool = emit_b_pool(&a);
        if pool.len() < b_size {
            continue;
        }
        let b = family::sample_subset(&pool, b_size, &mut rng);
        if partial_ok(&b) {
            visit(&a, &b);
            emitted += 1;
        }
    }
}

/// Exchange witness built from a replacement-form witness: the flattened
/// vector `y = tau x + 1_dB` with `t = tau` and `A`, signs carried over.
/// The two ratios agree exactly.
pub fn exchange_witness_from_property_a(w: &Witness, tau: f64) -> Result<Witness> {
    validate_tau(tau)?;
    let x = w
        .x
        .as_ref()
        .ok_or_else(|| Error::domain("witness lacks a vector"))?;
    let b = w.set_b.clone().unwrap_or_else(IndexSet::empty);
    let delta = w.delta.clone().unwrap_or_else(|| SignPattern::plus_on(&b));
    let spikes = delta.signed_spikes(&b, 1.0)?;
    let y = x.scaled(tau).with_spikes(&spikes)?;
    Ok(Witness {
        x: Some(y),
        set_a: w.set_a.clone(),
        set_b: Some(b),
        eps: w.eps.clone(),
        delta: None,
        t: Some(tau),
        order: None,
    })
}

/// Both sides of the exchange/replacement identity for a transformed
/// witness: left is the exchange ratio of the transform, right is the
/// replacement ratio divided by tau.
pub fn transform_identity_sides(
    w: &Witness,
    tau: f64,
    oracle: &NormOracle,
) -> Result<(f64, f64)> {
    let x = w
        .x
        .as_ref()
        .ok_or_else(|| Error::domain("witness lacks a vector"))?;
    let a = w.set_a.clone().unwrap_or_else(IndexSet::empty);
    let b = w.set_b.clone().unwrap_or_else(IndexSet::empty);
    let eps = w.eps.clone().unwrap_or_else(|| SignPattern::plus_on(&a));
    let delta = w.delta.clone().unwrap_or_else(|| SignPattern::plus_on(&b));
    let asp: Spikes = eps.signed_spikes(&a, 1.0)?.into_iter().collect();
    let bsp: Spikes = delta.signed_spikes(&b, 1.0)?.into_iter().collect();
    let right = ratio_replacement(x, &asp, &bsp, tau, oracle)
        .ok_or_else(|| Error::domain("zero denominator"))?
        / tau;
    let yw = exchange_witness_from_property_a(w, tau)?;
    let y = yw.x.as_ref().unwrap();
    let tasp: Spikes = eps.signed_spikes(&a, tau)?.into_iter().collect();
    let y_norm = oracle.eval(y)?;
    let left = ratio_exchange(y_norm, y, b.as_slice(), &tasp, oracle)
        .ok_or_else(|| Error::domain("zero denominator"))?;
    Ok((left, right))
}

/// `sup ||P_A x|| / ||x||` over `|A| <= m` (order-m projection norm).
pub fn estimate_projection(m: u32, oracle: &NormOracle, cfg: &FamilyConfig) -> Result<ConstantEstimate> {
    estimate_projection_impl(ConstantKind::Projection, m, oracle, cfg)
}

/// `sup ||x - P_A x|| / ||x||` over `|A| <= m`.
pub fn estimate_projection_complement(
    m: u32,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_projection_impl(ConstantKind::ProjectionComplement, m, oracle, cfg)
}

fn estimate_projection_impl(
    kind: ConstantKind,
    m: u32,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    oracle.check_dim(cfg.dim)?;
    let stream = family::stream_id(&format!("projection:{kind:?}:{m}"));
    let vectors = family::unconstrained_vectors(cfg, stream);
    let all: Vec<u32> = (1..=cfg.dim).collect();
    let best = par::best_over(vectors.len(), |i| {
        let x = &vectors[i];
        let den = oracle.eval(x).expect("dim checked");
        if den <= f64::MIN_POSITIVE {
            return None;
        }
        let mut best: Option<(f64, IndexSet)> = None;
        for s in 0..=m as usize {
            family::for_each_subset_of(&all, s, &mut |raw| {
                let num = if kind == ConstantKind::Projection {
                    let mut kept: SmallVec<[(u32, f64); 16]> = SmallVec::new();
                    for (n, v) in x.iter() {
                        if raw.binary_search(&n).is_ok() {
                            kept.push((n, v));
                        }
                    }
                    oracle.eval_sorted(&kept)
                } else {
                    oracle.eval_dropped_plus_spikes(x, raw, &[])
                };
                let r = num / den;
                if best.as_ref().map_or(true, |(b, _)| r > *b) {
                    best = Some((r, IndexSet::new(raw.to_vec())));
                }
            });
        }
        best.map(|(r, a)| Scored {
            score: r,
            ordinal: i as u64,
            payload: (a, x.clone()),
        })
    });
    let (a, x) = best
        .ok_or_else(|| Error::domain("family contained only zero vectors"))?
        .payload;
    let est_kind_bound = oracle.metadata().suppression.map(|v| AnalyticBound {
        value: v,
        provenance: format!("suppression metadata of `{}`", oracle.name()),
    });
    let mut est = ConstantEstimate {
        kind,
        m,
        tau: None,
        lower_bound: 0.0,
        witness: Witness {
            x: Some(x),
            set_a: Some(a),
            ..Witness::default()
        },
        analytic_upper: est_kind_bound,
        family: cfg.descriptor(),
        seed: cfg.seed,
        exhaustive: false,
        truncated: false,
        skipped: 0,
    };
    est.lower_bound = est.reevaluate(oracle)?;
    Ok(est)
}

/// `sup ||P_L x|| / ||x||` over weak greedy sets of order at most `m`.
pub fn estimate_greedy_projection(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_greedy_impl(ConstantKind::GreedyProjection, m, tau, oracle, cfg)
}

/// `sup ||x - P_L x|| / ||x||` over weak greedy sets of order at most `m`.
pub fn estimate_greedy_complement(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_greedy_impl(ConstantKind::GreedyComplement, m, tau, oracle, cfg)
}

fn estimate_greedy_impl(
    kind: ConstantKind,
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    validate_tau(tau)?;
    oracle.check_dim(cfg.dim)?;
    let stream = family::stream_id(&format!("greedy_op:{kind:?}:{m}:{tau}"));
    let vectors = family::unconstrained_vectors(cfg, stream);
    let truncated = AtomicU64::new(0);
    let best = par::best_over(vectors.len(), |i| {
        let x = &vectors[i];
        let den = oracle.eval(x).expect("dim checked");
        if den <= f64::MIN_POSITIVE {
            return None;
        }
        let mut best: Option<(f64, IndexSet, u32)> = None;
        for k in 0..=m {
            let fam = greedy::weak_greedy_sets(x, k, tau, &cfg.enum_opts).expect("validated");
            if fam.truncated {
                truncated.fetch_add(1, Ordering::Relaxed);
            }
            for set in &fam.sets {
                let num = if kind == ConstantKind::GreedyProjection {
                    oracle.eval(&greedy::project(x, set)).expect("dim checked")
                } else {
                    oracle.eval_dropped_plus_spikes(x, set.as_slice(), &[])
                };
                let r = num / den;
                if best.as_ref().map_or(true, |(b, _, _)| r > *b) {
                    best = Some((r, set.clone(), k));
                }
            }
        }
        best.map(|(r, set, k)| Scored {
            score: r,
            ordinal: i as u64,
            payload: (set, k, x.clone()),
        })
    });
    let (set, order, x) = best
        .ok_or_else(|| Error::domain("family contained only zero vectors"))?
        .payload;
    let meta = oracle.metadata();
    let analytic = match kind {
        ConstantKind::GreedyComplement => meta.quasi_greedy,
        _ => meta.quasi_greedy_weak,
    }
    .map(|v| AnalyticBound {
        value: v,
        provenance: format!("quasi-greedy metadata of `{}`", oracle.name()),
    });
    let mut est = ConstantEstimate {
        kind,
        m,
        tau: Some(tau),
        lower_bound: 0.0,
        witness: Witness {
            x: Some(x),
            set_a: Some(set),
            order: Some(order),
            ..Witness::default()
        },
        analytic_upper: analytic,
        family: cfg.descriptor(),
        seed: cfg.seed,
        exhaustive: false,
        truncated: truncated.load(Ordering::Relaxed) > 0,
        skipped: 0,
    };
    est.lower_bound = est.reevaluate(oracle)?;
    Ok(est)
}

/// `sup ||1_dB|| / ||1_eA||` over `|A| = |B| <= m` (exhaustive in sets;
/// signs exhaustive while within the budget).
pub fn estimate_super_democracy(
    m: u32,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_indicator_ratio(ConstantKind::SuperDemocracy, m, oracle, cfg)
}

/// Same with the constraint `B < A`.
pub fn estimate_super_conservancy(
    m: u32,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    estimate_indicator_ratio(ConstantKind::SuperConservancy, m, oracle, cfg)
}

fn estimate_indicator_ratio(
    kind: ConstantKind,
    m: u32,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
) -> Result<ConstantEstimate> {
    if m == 0 {
        return Err(Error::domain("indicator-ratio constants need m >= 1"));
    }
    oracle.check_dim(cfg.dim)?;
    let stream = family::stream_id(&format!("indicator:{kind:?}:{m}"));
    let zero = CoeffVector::zero(cfg.dim);
    let all: Vec<u32> = (1..=cfg.dim).collect();
    let mut exhaustive = true;
    // Per size: norms of all signed indicators, then combine.
    let mut best: Option<(f64, IndexSet, u64, IndexSet, u64)> = None;
    for s in 1..=m.min(cfg.dim) as usize {
        let full = 2 * s as u32 <= cfg.sign_budget;
        if !full {
            exhaustive = false;
        }
        let mut sets: Vec<IndexSet> = Vec::new();
        family::for_each_subset_of(&all, s, &mut |raw| sets.push(IndexSet::new(raw.to_vec())));
        // norms of every (set, sign) pair
        let sign_count: u64 = if full {
            1 << s
        } else {
            cfg.random_sign_draws as u64
        };
        let mut evals: Vec<(f64, usize, u64)> = Vec::with_capacity(sets.len() * sign_count as usize);
        for (si, set) in sets.iter().enumerate() {
            let mut rng = family::rng_for(cfg.seed, stream, si as u64);
            for k in 0..sign_count {
                let bits = if full { k } else { rng.gen() };
                let sp = signed_spikes(set, bits, 0, 1.0);
                evals.push((oracle.eval_scaled_plus_spikes(&zero, 1.0, &sp), si, bits));
            }
        }
        for &(num, bi, bbits) in &evals {
            for &(den, ai, abits) in &evals {
                if den <= f64::MIN_POSITIVE {
                    continue;
                }
                if kind == ConstantKind::SuperConservancy
                    && !sets[bi].entirely_below(&sets[ai])
                {
                    continue;
                }
                let r = num / den;
                if best.as_ref().map_or(true, |(b, ..)| r > *b) {
                    best = Some((r, sets[ai].clone(), abits, sets[bi].clone(), bbits));
                }
            }
        }
    }
    let (_, a, abits, b, bbits) =
        best.ok_or_else(|| Error::domain("no admissible indicator pair (is m too small?)"))?;
    let analytic = if oracle.metadata().exact {
        Some(AnalyticBound {
            value: 1.0,
            provenance: format!("equal-size signed indicators are isometric in `{}`", oracle.name()),
        })
    } else {
        None
    };
    let mut est = ConstantEstimate {
        kind,
        m,
        tau: None,
        lower_bound: 0.0,
        witness: Witness {
            eps: Some(SignPattern::from_bits(&a, abits)),
            delta: Some(SignPattern::from_bits(&b, bbits)),
            set_a: Some(a),
            set_b: Some(b),
            ..Witness::default()
        },
        analytic_upper: analytic,
        family: cfg.descriptor(),
        seed: cfg.seed,
        exhaustive,
        truncated: false,
        skipped: 0,
    };
    est.lower_bound = est.reevaluate(oracle)?;
    Ok(est)
}

/// Fundamental function `f(n)`: sup of `||1_eL||` over `|L| = n`, exhaustive
/// within the ambient dimension and sign budget.
pub fn fundamental_function(n: u32, oracle: &NormOracle, cfg: &FamilyConfig) -> Result<ConstantEstimate> {
    if n == 0 || n > cfg.dim {
        return Err(Error::domain(format!(
            "fundamental function needs 1 <= n <= ambient dim, got {n}"
        )));
    }
    oracle.check_dim(cfg.dim)?;
    let stream = family::stream_id(&format!("fundamental:{n}"));
    let zero = CoeffVector::zero(cfg.dim);
    let all: Vec<u32> = (1..=cfg.dim).collect();
    let full = n <= cfg.sign_budget;
    let sign_count: u64 = if full { 1 << n } else { cfg.random_sign_draws as u64 };
    let mut best: Option<(f64, IndexSet, u64)> = None;
    let mut si = 0u64;
    family::for_each_subset_of(&all, n as usize, &mut |raw| {
        let set = IndexSet::new(raw.to_vec());
        let mut rng = family::rng_for(cfg.seed, stream, si);
        si += 1;
        for k in 0..sign_count {
            let bits = if full { k } else { rng.gen() };
            let sp = signed_spikes(&set, bits, 0, 1.0);
            let v = oracle.eval_scaled_plus_spikes(&zero, 1.0, &sp);
            if best.as_ref().map_or(true, |(b, ..)| v > *b) {
                best = Some((v, set.clone(), bits));
            }
        }
    });
    let (_, set, bits) = best.expect("at least one set");
    let mut est = ConstantEstimate {
        kind: ConstantKind::Fundamental,
        m: n,
        tau: None,
        lower_bound: 0.0,
        witness: Witness {
            eps: Some(SignPattern::from_bits(&set, bits)),
            set_a: Some(set),
            ..Witness::default()
        },
        analytic_upper: None,
        family: cfg.descriptor(),
        seed: cfg.seed,
        exhaustive: full,
        truncated: false,
        skipped: 0,
    };
    est.lower_bound = est.reevaluate(oracle)?;
    Ok(est)
}
