//! Lower-bound estimators for the Lebesgue-type parameters: worst-case weak
//! greedy error against the best m-term error, the best projection error,
//! the order-m tail, the best partial-sum tail, and the Chebyshev variant.
//!
//! Families combine unconstrained random/grid vectors with proof-shaped
//! candidates (exact weakness ties, padded spike/flat blocks), so the known
//! extremal ratios are attained deterministically.

use serde::{Deserialize, Serialize};

use crate::approx::{self, ApproxOptions};
use crate::coeff::{CoeffVector, IndexSet};
use crate::error::{Error, Result};
use crate::family::{self, FamilyConfig};
use crate::greedy;
use crate::norms::NormOracle;
use crate::par::{self, Scored};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LebesgueKind {
    /// gamma_{m,tau} / sigma_m
    WeakGreedy,
    /// gamma_{m,tau} / sigma~_m
    WeakAlmostGreedy,
    /// gamma_{m,tau} / ||x - S_m x||
    Residual,
    /// gamma_{m,tau} / sigma^_m
    StrongResidual,
    /// Chebyshev residual / sigma_m
    Chebyshev,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LebWitness {
    pub x: CoeffVector,
    pub greedy_set: IndexSet,
    pub numerator: f64,
    pub denominator: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LebesgueEstimate {
    pub kind: LebesgueKind,
    pub m: u32,
    pub tau: f64,
    pub lower_bound: f64,
    pub witness: LebWitness,
    pub family: String,
    pub seed: u64,
    pub truncated: bool,
    /// False when the coefficient solver failed to converge somewhere.
    pub all_converged: bool,
}

fn validate_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must lie in (0, 1], got {tau}")))
    }
}

struct Candidate {
    ratio: f64,
    witness: LebWitness,
    truncated: bool,
    converged: bool,
}

fn ratio_for(
    kind: LebesgueKind,
    x: &CoeffVector,
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    opts: &ApproxOptions,
) -> Result<Option<Candidate>> {
    // Exact-representation candidates have zero benchmark error; skip.
    if matches!(
        kind,
        LebesgueKind::WeakGreedy | LebesgueKind::WeakAlmostGreedy | LebesgueKind::Chebyshev
    ) && x.support_len() <= m as usize
    {
        return Ok(None);
    }
    let (num, set, num_trunc, num_conv) = match kind {
        LebesgueKind::Chebyshev => {
            let r = approx::chebyshev_residual(x, m, tau, oracle, opts)?;
            (r.value, r.witness, r.truncated, r.all_converged)
        }
        _ => {
            let r = greedy::greedy_residual(x, m, tau, oracle, &opts.enum_opts)?;
            (r.value, r.witness, r.truncated, true)
        }
    };
    let (den, den_conv) = match kind {
        LebesgueKind::WeakGreedy | LebesgueKind::Chebyshev => {
            let s = approx::sigma_m(x, m, oracle, opts)?;
            (s.value, s.all_converged)
        }
        LebesgueKind::WeakAlmostGreedy => {
            let s = approx::sigma_tilde_m(x, m, oracle, opts)?;
            (s.value, s.all_converged)
        }
        LebesgueKind::Residual => {
            let tail = x.tail_from(m + 1);
            (oracle.eval(&tail)?, true)
        }
        LebesgueKind::StrongResidual => (approx::sigma_hat_m(x, m, oracle)?, true),
    };
    if den <= f64::MIN_POSITIVE {
        return Ok(None);
    }
    Ok(Some(Candidate {
        ratio: num / den,
        witness: LebWitness {
            x: x.clone(),
            greedy_set: set,
            numerator: num,
            denominator: den,
        },
        truncated: num_trunc,
        converged: num_conv && den_conv,
    }))
}

fn estimate_impl(
    kind: LebesgueKind,
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
    opts: &ApproxOptions,
) -> Result<LebesgueEstimate> {
    validate_tau(tau)?;
    oracle.check_dim(cfg.dim)?;
    let stream = family::stream_id(&format!("lebesgue:{kind:?}:{m}:{tau}"));
    let mut vectors = family::unconstrained_vectors(cfg, stream);
    vectors.extend(family::structured_lebesgue_vectors(m, tau, cfg.dim));
    let best = par::best_over(vectors.len(), |i| {
        match ratio_for(kind, &vectors[i], m, tau, oracle, opts) {
            Ok(Some(c)) => Some(Scored {
                score: c.ratio,
                ordinal: i as u64,
                payload: c,
            }),
            _ => None,
        }
    });
    let c = best
        .ok_or_else(|| Error::domain("no candidate with a positive benchmark error"))?
        .payload;
    Ok(LebesgueEstimate {
        kind,
        m,
        tau,
        lower_bound: c.ratio,
        witness: c.witness,
        family: cfg.descriptor(),
        seed: cfg.seed,
        truncated: c.truncated,
        all_converged: c.converged,
    })
}

/// Weak greedy parameter: worst greedy error over best m-term error.
pub fn estimate_weak_greedy(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
    opts: &ApproxOptions,
) -> Result<LebesgueEstimate> {
    estimate_impl(LebesgueKind::WeakGreedy, m, tau, oracle, cfg, opts)
}

/// Weak almost greedy parameter: greedy error over best projection error.
pub fn estimate_weak_almost_greedy(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
    opts: &ApproxOptions,
) -> Result<LebesgueEstimate> {
    estimate_impl(LebesgueKind::WeakAlmostGreedy, m, tau, oracle, cfg, opts)
}

/// Residual parameter: greedy error over the order-m tail.
pub fn estimate_residual(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
    opts: &ApproxOptions,
) -> Result<LebesgueEstimate> {
    estimate_impl(LebesgueKind::Residual, m, tau, oracle, cfg, opts)
}

/// Strong residual parameter: greedy error over the best partial-sum tail.
pub fn estimate_strong_residual(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
    opts: &ApproxOptions,
) -> Result<LebesgueEstimate> {
    estimate_impl(LebesgueKind::StrongResidual, m, tau, oracle, cfg, opts)
}

/// Chebyshev parameter: coefficient-optimized greedy error over sigma_m.
pub fn estimate_chebyshev(
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    cfg: &FamilyConfig,
    opts: &ApproxOptions,
) -> Result<LebesgueEstimate> {
    estimate_impl(LebesgueKind::Chebyshev, m, tau, oracle, cfg, opts)
}

/// Re-derive the ratio of a stored witness.
pub fn reevaluate(est: &LebesgueEstimate, oracle: &NormOracle, opts: &ApproxOptions) -> Result<f64> {
    let c = ratio_for(est.kind, &est.witness.x, est.m, est.tau, oracle, opts)?
        .ok_or_else(|| Error::domain("witness benchmark error vanished"))?;
    Ok(c.ratio)
}

/// Padded candidate from a replacement-form witness: unit spikes on `A`,
/// the flat part, `1/tau` spikes on `B`, and a unit filler block of size
/// `m - |A|` on fresh indices. Returns `None` when the ambient dimension
/// lacks room.
pub fn padded_tie_candidate(
    w: &crate::constants::Witness,
    m: u32,
    tau: f64,
) -> Option<CoeffVector> {
    let x = w.x.as_ref()?;
    let a = w.set_a.clone().unwrap_or_else(IndexSet::empty);
    let b = w.set_b.clone().unwrap_or_else(IndexSet::empty);
    if a.len() as u32 > m {
        return None;
    }
    let eps = w
        .eps
        .clone()
        .unwrap_or_else(|| crate::coeff::SignPattern::plus_on(&a));
    let delta = w
        .delta
        .clone()
        .unwrap_or_else(|| crate::coeff::SignPattern::plus_on(&b));
    let mut spikes = eps.signed_spikes(&a, 1.0).ok()?;
    spikes.extend(delta.signed_spikes(&b, 1.0 / tau).ok()?);
    let z = x.with_spikes(&spikes).ok()?;
    let filler = m - a.len() as u32;
    let free = z.free_indices(filler as usize);
    if free.len() < filler as usize {
        return None;
    }
    let fill: Vec<(u32, f64)> = free.into_iter().map(|n| (n, 1.0)).collect();
    z.with_spikes(&fill).ok()
}

/// Candidate for the strong-residual parameter built from a
/// partial-symmetry witness: `(1/tau)` spikes on `B` (low), a filler block
/// below `max B`, the flat part, and unit spikes on `A`. Also returns the
/// realized order `|D u A|`.
pub fn padded_residual_candidate(
    w: &crate::constants::Witness,
    m: u32,
    tau: f64,
) -> Option<(CoeffVector, u32)> {
    let x = w.x.as_ref()?;
    let a = w.set_a.clone().unwrap_or_else(IndexSet::empty);
    let b = w.set_b.clone().unwrap_or_else(IndexSet::empty);
    if b.is_empty() {
        return None;
    }
    let m1 = b.max_index().unwrap();
    if m1 > m {
        return None;
    }
    let eps = w
        .eps
        .clone()
        .unwrap_or_else(|| crate::coeff::SignPattern::plus_on(&a));
    let delta = w
        .delta
        .clone()
        .unwrap_or_else(|| crate::coeff::SignPattern::plus_on(&b));
    // D: smallest max(0, m1 - |A|) indices of {1..m1} \ B
    let d_size = (m1 as usize).saturating_sub(a.len());
    let d_pool: Vec<u32> = (1..=m1).filter(|n| !b.contains(*n)).collect();
    if d_pool.len() < d_size {
        return None;
    }
    let mut spikes = delta.signed_spikes(&b, 1.0 / tau).ok()?;
    spikes.extend(d_pool[..d_size].iter().map(|n| (*n, 1.0)));
    spikes.extend(eps.signed_spikes(&a, 1.0).ok()?);
    let y = x.with_spikes(&spikes).ok()?;
    Some((y, (d_size + a.len()) as u32))
}
