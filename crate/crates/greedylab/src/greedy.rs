//! Weak greedy set enumeration, projections, partial sums, greedy residuals,
//! and the truncation/thresholding operators.
//!
//! Greedy-type suprema range over *all* qualifying sets, so the enumerator
//! returns every size-m set satisfying the weakness inequality, up to a cap
//! that is reported through an explicit `truncated` flag, never silently.

use crate::coeff::{CoeffVector, IndexSet};
use crate::error::{Error, Result};
use crate::norms::NormOracle;

#[derive(Debug, Clone)]
pub struct EnumOptions {
    /// Maximum number of sets materialized per enumeration.
    pub cap: usize,
    /// Slack added to the weakness comparison (`min >= tau*max - tie_tol`).
    /// The default 0 keeps the comparison exact; membership at equality
    /// boundaries changes the family, so this is a deliberate knob.
    pub tie_tol: f64,
}

impl Default for EnumOptions {
    fn default() -> Self {
        EnumOptions {
            cap: 1_000_000,
            tie_tol: 0.0,
        }
    }
}

/// All size-m tau-weak greedy sets of a vector.
#[derive(Debug, Clone)]
pub struct WeakGreedyFamily {
    pub x: CoeffVector,
    pub m: u32,
    pub tau: f64,
    /// Lexicographically ordered index sets.
    pub sets: Vec<IndexSet>,
    /// True when the enumeration cap was hit; the family is then a prefix
    /// and downstream suprema are labeled lower bounds.
    pub truncated: bool,
}

fn validate_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau <= 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("tau must lie in (0, 1], got {tau}")))
    }
}

/// Whether `min_{n in set} |x_n| >= tau * max_{n not in set} |x_n|`, with the
/// max taken over the whole ambient range (absent coefficients are 0).
pub fn is_weak_greedy_set(x: &CoeffVector, set: &IndexSet, tau: f64) -> Result<bool> {
    validate_tau(tau)?;
    if let Some(max) = set.max_index() {
        if max > x.ambient_dim() || set.min_index() == Some(0) {
            return Err(Error::domain(format!(
                "set index {} outside ambient range 1..={}",
                max,
                x.ambient_dim()
            )));
        }
    }
    let min_in = set
        .iter()
        .map(|n| x.coeff(n).abs())
        .fold(f64::INFINITY, f64::min);
    let max_out = x
        .iter()
        .filter(|(n, _)| !set.contains(*n))
        .map(|(_, v)| v.abs())
        .fold(0.0, f64::max);
    Ok(min_in >= tau * max_out)
}

/// Enumerate every size-m tau-weak greedy set with support in the ambient
/// range. `m = 0` yields the single empty set.
pub fn weak_greedy_sets(
    x: &CoeffVector,
    m: u32,
    tau: f64,
    opts: &EnumOptions,
) -> Result<WeakGreedyFamily> {
    validate_tau(tau)?;
    if m > x.ambient_dim() {
        return Err(Error::domain(format!(
            "order {m} exceeds ambient dimension {}",
            x.ambient_dim()
        )));
    }
    let mut sets = Vec::new();
    let mut truncated = false;
    if m == 0 {
        sets.push(IndexSet::empty());
    } else {
        // Indices sorted by |coefficient| descending (index ascending on
        // ties). A set is admissible iff its smallest magnitude is at least
        // tau times the magnitude at the first skipped position.
        let mut items: Vec<(u32, f64)> = (1..=x.ambient_dim())
            .map(|n| (n, x.coeff(n).abs()))
            .collect();
        items.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        let mut chosen: Vec<u32> = Vec::with_capacity(m as usize);
        dfs(
            &items,
            0,
            m as usize,
            tau,
            opts,
            None,
            &mut chosen,
            &mut sets,
            &mut truncated,
        );
        sets.sort();
    }
    Ok(WeakGreedyFamily {
        x: x.clone(),
        m,
        tau,
        sets,
        truncated,
    })
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    items: &[(u32, f64)],
    pos: usize,
    want: usize,
    tau: f64,
    opts: &EnumOptions,
    first_gap: Option<f64>,
    chosen: &mut Vec<u32>,
    out: &mut Vec<IndexSet>,
    truncated: &mut bool,
) {
    if *truncated {
        return;
    }
    if chosen.len() == want {
        // Largest unchosen magnitude is the first gap, or the next position.
        let max_out = first_gap.unwrap_or_else(|| items.get(pos).map_or(0.0, |it| it.1));
        let min_in = chosen
            .iter()
            .map(|n| {
                items
                    .iter()
                    .find(|(i, _)| i == n)
                    .map(|(_, v)| *v)
                    .unwrap_or(0.0)
            })
            .fold(f64::INFINITY, f64::min);
        if min_in >= tau * max_out - opts.tie_tol {
            if out.len() >= opts.cap {
                *truncated = true;
                return;
            }
            out.push(IndexSet::new(chosen.clone()));
        }
        return;
    }
    let remaining = items.len() - pos;
    if remaining < want - chosen.len() {
        return;
    }
    let (idx, mag) = items[pos];
    // Take this position (admissible only while above the gap threshold).
    if first_gap.map_or(true, |g| mag >= tau * g - opts.tie_tol) {
        chosen.push(idx);
        dfs(
            items,
            pos + 1,
            want,
            tau,
            opts,
            first_gap,
            chosen,
            out,
            truncated,
        );
        chosen.pop();
    } else {
        // Later magnitudes only shrink; the whole branch is dead.
        return;
    }
    // Skip it; the first skip fixes the complement maximum.
    let gap = first_gap.or(Some(mag));
    dfs(items, pos + 1, want, tau, opts, gap, chosen, out, truncated);
}

/// `P_A(x)`: coefficients restricted to `A`.
pub fn project(x: &CoeffVector, a: &IndexSet) -> CoeffVector {
    x.restricted(|n| a.contains(n))
}

/// `x - P_A(x)`.
pub fn residual(x: &CoeffVector, a: &IndexSet) -> CoeffVector {
    x.restricted(|n| !a.contains(n))
}

/// `S_m(x)`: coefficients on `{1..=m}`.
pub fn partial_sum(x: &CoeffVector, m: u32) -> CoeffVector {
    x.restricted(|n| n <= m)
}

#[derive(Debug, Clone)]
pub struct GreedyResidual {
    pub value: f64,
    /// A set realizing the supremum (lexicographically first on ties).
    pub witness: IndexSet,
    pub truncated: bool,
}

/// Worst-case weak greedy error: max of `||x - P_set(x)||` over the family.
/// Order 0 gives `||x||`.
pub fn greedy_residual(
    x: &CoeffVector,
    m: u32,
    tau: f64,
    oracle: &NormOracle,
    opts: &EnumOptions,
) -> Result<GreedyResidual> {
    oracle.check_dim(x.ambient_dim())?;
    let family = weak_greedy_sets(x, m, tau, opts)?;
    let mut best: Option<(f64, &IndexSet)> = None;
    for set in &family.sets {
        let v = oracle.eval_dropped_plus_spikes(x, set.as_slice(), &[]);
        match best {
            Some((bv, _)) if bv >= v => {}
            _ => best = Some((v, set)),
        }
    }
    let (value, witness) = best
        .map(|(v, s)| (v, s.clone()))
        .unwrap_or((0.0, IndexSet::empty()));
    Ok(GreedyResidual {
        value,
        witness,
        truncated: family.truncated,
    })
}

/// Clamp every coefficient modulus at `alpha`, preserving signs.
pub fn truncate(x: &CoeffVector, alpha: f64) -> Result<CoeffVector> {
    if !(alpha > 0.0) {
        return Err(Error::domain(format!(
            "truncation level must be positive, got {alpha}"
        )));
    }
    let pairs: Vec<(u32, f64)> = x
        .iter()
        .map(|(n, v)| (n, if v.abs() > alpha { v.signum() * alpha } else { v }))
        .collect();
    CoeffVector::from_pairs(x.ambient_dim(), &pairs)
}

/// Keep exactly the coefficients with `|value| > eps` (strict).
pub fn threshold(x: &CoeffVector, eps: f64) -> CoeffVector {
    let mut out = CoeffVector::zero(x.ambient_dim());
    for (n, v) in x.iter() {
        if v.abs() > eps {
            out.set(n, v).expect("index already validated");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::{make_lp_norm, make_weighted_tail_norm};

    fn v(vals: &[f64]) -> CoeffVector {
        CoeffVector::from_dense(vals)
    }

    fn sets_of(x: &CoeffVector, m: u32, tau: f64) -> Vec<Vec<u32>> {
        weak_greedy_sets(x, m, tau, &EnumOptions::default())
            .unwrap()
            .sets
            .iter()
            .map(|s| s.as_slice().to_vec())
            .collect()
    }

    #[test]
    fn weak_greedy_membership() {
        let x = v(&[3.0, 1.0, 2.0]);
        assert!(is_weak_greedy_set(&x, &IndexSet::new(vec![1]), 1.0).unwrap());
        assert!(!is_weak_greedy_set(&x, &IndexSet::new(vec![2]), 0.5).unwrap());
        assert!(is_weak_greedy_set(&x, &IndexSet::new(vec![3]), 0.5).unwrap());
        assert!(is_weak_greedy_set(&x, &IndexSet::empty(), 0.5).is_err() == false);
        assert!(is_weak_greedy_set(&x, &IndexSet::new(vec![4]), 0.5).is_err());
        assert!(is_weak_greedy_set(&x, &IndexSet::new(vec![1]), 0.0).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let x = v(&[3.0, 1.0, 2.0]);
        assert_eq!(sets_of(&x, 1, 1.0), vec![vec![1]]);
        assert_eq!(sets_of(&x, 1, 0.5), vec![vec![1], vec![3]]);
        assert_eq!(sets_of(&x, 0, 0.5), vec![Vec::<u32>::new()]);
        // brute force cross-check over all subsets for a few vectors
        for (vals, m, tau) in [
            (vec![3.0, 1.0, 2.0, 0.0, -2.0], 2u32, 0.6),
            (vec![1.0, -1.0, 0.5, 0.25, 0.0], 3, 0.5),
            (vec![2.0, 2.0, 2.0], 2, 1.0),
        ] {
            let x = v(&vals);
            let n = x.ambient_dim();
            let mut expect = Vec::new();
            for bits in 0u32..(1 << n) {
                if bits.count_ones() != m {
                    continue;
                }
                let set = IndexSet::new((1..=n).filter(|i| bits >> (i - 1) & 1 == 1).collect());
                if is_weak_greedy_set(&x, &set, tau).unwrap() {
                    expect.push(set.as_slice().to_vec());
                }
            }
            expect.sort();
            assert_eq!(sets_of(&x, m, tau), expect, "vals {vals:?} m {m} tau {tau}");
        }
    }

    #[test]
    fn zero_coefficient_sets_qualify_only_when_rest_is_zero() {
        let x = v(&[1.0, 0.0, 0.0]);
        // {1,2} covers the support, so the off-set max is 0.
        assert!(is_weak_greedy_set(&x, &IndexSet::new(vec![1, 2]), 1.0).unwrap());
        // {2,3} leaves coefficient 1 outside.
        assert!(!is_weak_greedy_set(&x, &IndexSet::new(vec![2, 3]), 1.0).unwrap());
        assert_eq!(sets_of(&x, 2, 1.0), vec![vec![1, 2], vec![1, 3]]);
    }

    #[test]
    fn projections_and_partial_sums() {
        let x = v(&[3.0, 1.0, 2.0]);
        let p = project(&x, &IndexSet::new(vec![1, 3]));
        assert_eq!(p, v(&[3.0, 0.0, 2.0]));
        assert_eq!(project(&x, &x.support_set()), x);
        assert!(project(&x, &IndexSet::new(vec![4])).is_zero());
        assert_eq!(partial_sum(&x, 2), v(&[3.0, 1.0, 0.0]));
        assert!(partial_sum(&x, 0).is_zero());
        assert_eq!(partial_sum(&x, 7), x);
    }

    #[test]
    fn greedy_residual_examples() {
        let l1 = make_lp_norm(1.0).unwrap();
        let l2 = make_lp_norm(2.0).unwrap();
        let opts = EnumOptions::default();
        let r = greedy_residual(&v(&[1.0, 1.9]), 1, 0.5, &l1, &opts).unwrap();
        assert_eq!(r.value, 1.9);
        let r0 = greedy_residual(&v(&[1.0, 1.9]), 0, 0.5, &l1, &opts).unwrap();
        assert_eq!(r0.value, 2.9);
        let r2 = greedy_residual(&v(&[3.0, 1.0, 2.0]), 1, 1.0, &l2, &opts).unwrap();
        assert!((r2.value - 5.0f64.sqrt()).abs() < 1e-15);
        assert_eq!(r2.witness.as_slice(), &[1]);
    }

    #[test]
    fn truncate_and_threshold() {
        let x = v(&[2.0, 0.5, -3.0]);
        assert_eq!(truncate(&x, 1.0).unwrap(), v(&[1.0, 0.5, -1.0]));
        assert_eq!(truncate(&x, 5.0).unwrap(), x);
        assert_eq!(truncate(&v(&[-2.0]), 1.0).unwrap(), v(&[-1.0]));
        assert!(truncate(&x, 0.0).is_err());

        let y = v(&[2.0, 1.0, 0.5]);
        assert_eq!(threshold(&y, 1.0), v(&[2.0, 0.0, 0.0]));
        assert_eq!(threshold(&y, 0.25), y);
        assert!(threshold(&y, 2.0).is_zero());
    }

    #[test]
    fn weakness_monotone_in_tau() {
        let mut rng = crate::family::rng_for(11, 0, 0);
        use rand::Rng;
        for _ in 0..1000 {
            let n = rng.gen_range(2..=6);
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let x = v(&vals);
            let m = rng.gen_range(0..=n as u32);
            let strong = sets_of(&x, m, 0.8);
            let weak = sets_of(&x, m, 0.4);
            for s in &strong {
                assert!(weak.contains(s));
            }
        }
    }

    #[test]
    fn truncation_nonexpansive_on_lattice_norms() {
        use rand::Rng;
        for p in [1.0, 2.0, f64::INFINITY] {
            let oracle = make_lp_norm(p).unwrap();
            let mut rng = crate::family::rng_for(12, p.to_bits() as u64, 0);
            for _ in 0..10_000 {
                let n = rng.gen_range(1..=6);
                let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let x = v(&vals);
                let alpha = rng.gen_range(0.01..2.5);
                let t = truncate(&x, alpha).unwrap();
                assert!(oracle.eval(&t).unwrap() <= oracle.eval(&x).unwrap() + 1e-12);
            }
        }
    }

    // Coefficients on a common support with |a_n| <= |b_n| and matched signs
    // never increase a lattice norm.
    #[test]
    fn shrinking_coefficients_nonexpansive_on_lattice_norms() {
        use rand::Rng;
        for p in [1.0, 2.0, f64::INFINITY] {
            let oracle = make_lp_norm(p).unwrap();
            let mut rng = crate::family::rng_for(13, p.to_bits() as u64, 0);
            for _ in 0..1000 {
                let xs: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let x = CoeffVector::from_pairs(8, &[(1, xs[0]), (2, xs[1]), (3, xs[2])]).unwrap();
                let j: Vec<u32> = vec![4, 5, 6];
                let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let a: Vec<f64> = b
                    .iter()
                    .map(|bv| bv * rng.gen_range(0.0..1.0))
                    .collect();
                let spikes_a: Vec<(u32, f64)> = j.iter().copied().zip(a).collect();
                let spikes_b: Vec<(u32, f64)> = j.iter().copied().zip(b).collect();
                let na = oracle.eval(&x.with_spikes(&spikes_a).unwrap()).unwrap();
                let nb = oracle.eval(&x.with_spikes(&spikes_b).unwrap()).unwrap();
                assert!(na <= nb + 1e-12);
            }
        }
    }

    // Flattening spike magnitudes down to a common level alpha never
    // increases a lattice norm when ||x||_inf <= alpha/tau.
    #[test]
    fn flattening_spikes_nonexpansive_on_lattice_norms() {
        use rand::Rng;
        for p in [1.0, 2.0, f64::INFINITY] {
            let oracle = make_lp_norm(p).unwrap();
            let mut rng = crate::family::rng_for(14, p.to_bits() as u64, 0);
            for _ in 0..1000 {
                let tau = rng.gen_range(0.25..=1.0);
                let alpha = rng.gen_range(0.1..2.0);
                let bound = alpha / tau;
                let xs: Vec<f64> = (0..2).map(|_| rng.gen_range(-bound..bound)).collect();
                let x = CoeffVector::from_pairs(8, &[(1, xs[0]), (2, xs[1])]).unwrap();
                let set: Vec<u32> = vec![4, 6, 7];
                let signs: Vec<f64> = (0..3).map(|_| if rng.gen() { 1.0 } else { -1.0 }).collect();
                let flat: Vec<(u32, f64)> = set
                    .iter()
                    .zip(&signs)
                    .map(|(n, s)| (*n, s * alpha))
                    .collect();
                let tall: Vec<(u32, f64)> = set
                    .iter()
                    .zip(&signs)
                    .map(|(n, s)| (*n, s * (alpha + rng.gen_range(0.0..2.0))))
                    .collect();
                let nf = oracle.eval(&x.with_spikes(&flat).unwrap()).unwrap();
                let nt = oracle.eval(&x.with_spikes(&tall).unwrap()).unwrap();
                assert!(nf <= nt + 1e-12);
            }
        }
    }

    #[test]
    fn cap_sets_truncated_flag() {
        let x = v(&[1.0; 12]);
        let opts = EnumOptions {
            cap: 5,
            tie_tol: 0.0,
        };
        let fam = weak_greedy_sets(&x, 3, 1.0, &opts).unwrap();
        assert!(fam.truncated);
        assert_eq!(fam.sets.len(), 5);
    }

    #[test]
    fn weighted_tail_residual_respects_dim() {
        let oracle = make_weighted_tail_norm(vec![1.0, 1.0]).unwrap();
        let x = v(&[1.0, 2.0, 3.0]);
        assert!(greedy_residual(&x, 1, 1.0, &oracle, &EnumOptions::default()).is_err());
    }
}
