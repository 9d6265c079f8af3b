//! The weighted-tail-norm space with a recursively built weight layout:
//! block j contributes one lead slot of weight `t_j` followed by `N_j` slots
//! carrying `t_{N_{j-1}+1} .. t_{N_{j-1}+N_j}`, so every `t_n` value appears
//! exactly twice across the layout.
//!
//! Block counts grow at least tenfold per block, so everything here works on
//! compressed `(lead, slot, count)` triples; norms are evaluated in O(blocks)
//! from per-block aggregates and cross-checked against dense evaluation where
//! expansion is feasible.

use serde::{Deserialize, Serialize};

use crate::coeff::CoeffVector;
use crate::error::{Error, Result};
use crate::family::rng_for;

/// `t_n = 1/sqrt(n)` for a 1-based index.
pub fn t_value(n: u128) -> f64 {
    1.0 / (n as f64).sqrt()
}

/// `L_j = exp((ln j)^2)`.
pub fn growth_value(j: usize) -> f64 {
    let l = (j as f64).ln();
    (l * l).exp()
}

/// `a_j = 1/(sqrt(j) ln(j+1))`.
pub fn lead_value(j: usize) -> f64 {
    1.0 / ((j as f64).sqrt() * ((j + 1) as f64).ln())
}

const DIRECT_SUM_LIMIT: u128 = 2_000_000;
const MIDPOINT_MIN_START: u128 = 1_000_000;

/// `sum_{n=lo}^{hi} 1/sqrt(n)`, exact (compensated) for short ranges and via
/// the midpoint integral with a second-order correction for long ones; the
/// correction keeps the relative error well below 1e-9.
pub fn sum_inv_sqrt(lo: u128, hi: u128) -> f64 {
    if hi < lo {
        return 0.0;
    }
    if hi - lo + 1 <= DIRECT_SUM_LIMIT {
        return direct_sum(lo, hi);
    }
    if lo <= MIDPOINT_MIN_START {
        return direct_sum(lo, MIDPOINT_MIN_START) + midpoint_sum(MIDPOINT_MIN_START + 1, hi);
    }
    midpoint_sum(lo, hi)
}

fn direct_sum(lo: u128, hi: u128) -> f64 {
    // Neumaier summation, ascending magnitudes (descending n).
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    let mut n = hi;
    loop {
        let x = t_value(n);
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
        if n == lo {
            break;
        }
        n -= 1;
    }
    sum + comp
}

fn midpoint_sum(lo: u128, hi: u128) -> f64 {
    let a = lo as f64;
    let b = hi as f64;
    let integral = 2.0 * ((b + 0.5).sqrt() - (a - 0.5).sqrt());
    let correction = -(1.0 / 48.0) * ((a - 0.5).powf(-1.5) - (b + 0.5).powf(-1.5));
    integral + correction
}

/// The recursively constructed weight layout.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightSequence {
    /// Block counts `N_1..N_J`.
    pub counts: Vec<u128>,
    /// Slot values `b_1..b_J`.
    pub slot_values: Vec<f64>,
    /// Per-block slot weight sums `S_j = sum of B_j`.
    pub slot_weight_sums: Vec<f64>,
    /// True when construction stopped early because the next block count
    /// would overflow.
    pub overflowed: bool,
}

/// Whether `candidate` is an admissible block count for block `j`, given the
/// previous count and slot value. Encodes both the growth floor and the
/// strict slot-value conditions.
pub fn candidate_feasible(j: usize, prev_count: u128, prev_slot: f64, candidate: u128) -> bool {
    if j == 1 {
        if candidate <= 10 {
            return false;
        }
        let b = lead_value(1) * t_value(1) / sum_inv_sqrt(1, candidate);
        return b < lead_value(1) / growth_value(1);
    }
    if candidate <= prev_count.saturating_mul(10) {
        return false;
    }
    let lo = prev_count + 1;
    let hi = prev_count + candidate;
    let b = lead_value(j) * t_value(j as u128) / sum_inv_sqrt(lo, hi);
    b < (lead_value(j) / growth_value(j)).min(prev_slot)
}

/// Build the first `blocks` blocks of the weight layout. Each `N_j` is the
/// smallest admissible count; if the next count would overflow, the
/// constructed prefix is returned with `overflowed = true`.
pub fn build_weights(blocks: usize) -> Result<WeightSequence> {
    if blocks == 0 {
        return Err(Error::domain("need at least one block"));
    }
    let mut counts: Vec<u128> = Vec::with_capacity(blocks);
    let mut slot_values: Vec<f64> = Vec::with_capacity(blocks);
    let mut slot_weight_sums: Vec<f64> = Vec::with_capacity(blocks);
    let mut overflowed = false;
    for j in 1..=blocks {
        let (prev_count, prev_slot) = if j == 1 {
            (0u128, f64::INFINITY)
        } else {
            (counts[j - 2], slot_values[j - 2])
        };
        let floor = if j == 1 {
            11
        } else {
            match prev_count.checked_mul(10).and_then(|v| v.checked_add(1)) {
                Some(v) => v,
                None => {
                    overflowed = true;
                    break;
                }
            }
        };
        if prev_count.checked_add(floor).is_none() {
            overflowed = true;
            break;
        }
        // Both conditions are monotone in the candidate: the growth floor
        // directly, and the slot value because the weight sum grows.
        let mut candidate = floor;
        while !candidate_feasible(j, prev_count, prev_slot, candidate) {
            candidate = match candidate.checked_add(1) {
                Some(c) => c,
                None => {
                    overflowed = true;
                    break;
                }
            };
        }
        if overflowed {
            break;
        }
        let lo = prev_count + 1;
        let hi = prev_count + candidate;
        let s = sum_inv_sqrt(lo, hi);
        counts.push(candidate);
        slot_values.push(lead_value(j) * t_value(j as u128) / s);
        slot_weight_sums.push(s);
    }
    if counts.is_empty() {
        return Err(Error::domain("could not construct any block"));
    }
    Ok(WeightSequence {
        counts,
        slot_values,
        slot_weight_sums,
        overflowed,
    })
}

impl WeightSequence {
    pub fn blocks(&self) -> usize {
        self.counts.len()
    }

    /// Global length of the laid-out prefix: `sum (1 + N_j)`.
    pub fn total_len(&self) -> u128 {
        self.counts.iter().map(|n| 1 + *n).sum()
    }

    /// 1-based global index of block j's lead slot.
    pub fn block_start(&self, j: usize) -> u128 {
        1 + self.counts[..j - 1].iter().map(|n| 1 + *n).sum::<u128>()
    }

    /// Weight at a 1-based global index inside the constructed prefix.
    pub fn weight_at(&self, g: u128) -> Result<f64> {
        if g == 0 || g > self.total_len() {
            return Err(Error::domain(format!(
                "index {g} outside constructed range 1..={}",
                self.total_len()
            )));
        }
        let mut start = 1u128;
        let mut base = 0u128; // N_{j-1} cumulative source offset
        for (j, &count) in self.counts.iter().enumerate() {
            let end = start + count; // lead at `start`, slots through `end`
            if g == start {
                return Ok(t_value((j + 1) as u128));
            }
            if g <= end {
                let p = g - start; // 1-based slot position
                return Ok(t_value(base + p));
            }
            start = end + 1;
            base += count;
        }
        unreachable!("index validated against total_len")
    }

    /// First `len` weights as a dense vector (the CSV export format).
    pub fn weights_prefix(&self, len: u32) -> Result<Vec<f64>> {
        if (len as u128) > self.total_len() {
            return Err(Error::domain(format!(
                "prefix {len} exceeds constructed length {}",
                self.total_len()
            )));
        }
        (1..=len as u128).map(|g| self.weight_at(g)).collect()
    }
}

/// Compressed vector: block j holds one lead coefficient and `count`
/// repeats of `-slot`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockVector {
    pub blocks: Vec<Block>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Block {
    pub lead: f64,
    pub slot: f64,
    pub count: u128,
}

/// The canonical vector: `(a_1, -b_1 x N_1, a_2, -b_2 x N_2, ...)` over the
/// first `k` blocks.
pub fn make_block_vector(k: usize, w: &WeightSequence) -> Result<BlockVector> {
    if k == 0 || k > w.blocks() {
        return Err(Error::domain(format!(
            "block count {k} outside 1..={}",
            w.blocks()
        )));
    }
    Ok(BlockVector {
        blocks: (0..k)
            .map(|j| Block {
                lead: lead_value(j + 1),
                slot: w.slot_values[j],
                count: w.counts[j],
            })
            .collect(),
    })
}

/// Both seminorm parts of the weighted-tail norm, from per-block aggregates.
pub fn block_norm_parts(v: &BlockVector, w: &WeightSequence) -> (f64, f64) {
    // Tail-sum sup. Candidates per block, scanned right to left with the
    // accumulated sum R of later block totals:
    //   start at the lead slot:        |Delta_j + R|
    //   start at the first b-slot:     |R - slot * S_j|
    //   start at the last b-slot:      |R - slot * t_last|
    // The within-block tails are affine in the slot-weight suffix, so the
    // extreme suffixes bound all of them.
    let mut best = 0.0f64;
    let mut r = 0.0f64;
    let mut base_after: Vec<u128> = Vec::with_capacity(v.blocks.len());
    let mut acc = 0u128;
    for b in &v.blocks {
        acc += b.count;
        base_after.push(acc);
    }
    for (j, b) in v.blocks.iter().enumerate().rev() {
        let s_j = w.slot_weight_sums[j];
        let t_last = t_value(base_after[j]);
        best = best.max((r - b.slot * s_j).abs());
        best = best.max((r - b.slot * t_last).abs());
        let delta = b.lead * t_value((j + 1) as u128) - b.slot * s_j;
        r += delta;
        best = best.max(r.abs());
    }
    // Euclidean part.
    let mut sq = 0.0f64;
    for b in &v.blocks {
        sq += b.lead * b.lead + (b.count as f64) * b.slot * b.slot;
    }
    (best, sq.sqrt())
}

/// `max(tail-sup, l2)` in O(blocks).
pub fn block_norm(v: &BlockVector, w: &WeightSequence) -> f64 {
    let (tail, l2) = block_norm_parts(v, w);
    tail.max(l2)
}

/// Materialize the first `k` blocks as a dense coefficient vector.
pub fn expand_dense(v: &BlockVector, w: &WeightSequence, budget: u128) -> Result<CoeffVector> {
    let len: u128 = v.blocks.iter().map(|b| 1 + b.count).sum();
    if len > budget {
        return Err(Error::Budget {
            needed: len,
            budget,
            hint: "expand fewer blocks".to_string(),
        });
    }
    if len > u32::MAX as u128 {
        return Err(Error::domain("expansion exceeds addressable dimension"));
    }
    let _ = w;
    let mut vals = Vec::with_capacity(len as usize);
    for b in &v.blocks {
        vals.push(b.lead);
        for _ in 0..b.count {
            vals.push(-b.slot);
        }
    }
    Ok(CoeffVector::from_dense(&vals))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QgViolation {
    pub k: usize,
    pub blocks: usize,
    pub epsilon: f64,
    /// `||T_eps x|| / ||x||` on the k-block vector.
    pub ratio: f64,
    pub thresholded_norm: f64,
    pub vector_norm: f64,
    /// Tail-sup part of the thresholded vector.
    pub thresholded_tail_sup: f64,
    /// `sum_{n=k+1}^{K} 1/(n ln(n+1))`, the surviving-lead bound.
    pub analytic_lower_bound: f64,
}

/// Threshold the K-block vector at the midpoint of `(b_{k+1}, b_k)` and
/// compare norms. Slots of blocks past `k` fall below the threshold and
/// drop; every surviving lead contributes its `a_j t_j` to the tail sums.
pub fn qg_violation_ratio(k: usize, w: &WeightSequence, blocks: usize) -> Result<QgViolation> {
    if k + 1 > blocks {
        return Err(Error::domain(format!(
            "need k + 1 <= blocks, got k={k} blocks={blocks}"
        )));
    }
    if blocks > w.blocks() {
        return Err(Error::domain(format!(
            "only {} blocks constructed, asked for {blocks}",
            w.blocks()
        )));
    }
    let x = make_block_vector(blocks, w)?;
    let epsilon = (w.slot_values[k - 1] + w.slot_values[k]) / 2.0;
    let thresholded = BlockVector {
        blocks: x
            .blocks
            .iter()
            .map(|b| Block {
                lead: if b.lead > epsilon { b.lead } else { 0.0 },
                slot: if b.slot > epsilon { b.slot } else { 0.0 },
                count: b.count,
            })
            .collect(),
    };
    let vector_norm = block_norm(&x, w);
    let (t_tail, t_l2) = block_norm_parts(&thresholded, w);
    let thresholded_norm = t_tail.max(t_l2);
    let analytic_lower_bound: f64 = (k + 1..=blocks)
        .map(|n| 1.0 / (n as f64 * ((n + 1) as f64).ln()))
        .sum();
    Ok(QgViolation {
        k,
        blocks,
        epsilon,
        ratio: thresholded_norm / vector_norm,
        thresholded_norm,
        vector_norm,
        thresholded_tail_sup: t_tail,
        analytic_lower_bound,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UniformAReport {
    /// Max of `tail_sup(1_dA) / sqrt(|A|)` observed.
    pub max_ratio: f64,
    pub worst_set: Vec<u128>,
    pub worst_signs: Vec<i8>,
    pub exhaustive_cases: u64,
    pub random_cases: u64,
}

fn signed_indicator_tail_sup(w: &WeightSequence, indices: &[u128], signs: &[i8]) -> f64 {
    // indices ascending; suffix sums of sign * weight
    let mut best = 0.0f64;
    let mut suffix = 0.0f64;
    for i in (0..indices.len()).rev() {
        suffix += signs[i] as f64 * w.weight_at(indices[i]).expect("index in range");
        best = best.max(suffix.abs());
    }
    best
}

/// Check `tail_sup(1_dA) <= 2 sqrt(|A|)`: exhaustive over all sets of size
/// <= 3 inside the first 200 indices with all sign patterns, plus `trials`
/// random signed sets of size <= `m` anywhere in the constructed range.
pub fn uniform_a_check(m: u32, w: &WeightSequence, trials: usize, seed: u64) -> UniformAReport {
    let mut max_ratio = 0.0f64;
    let mut worst: (Vec<u128>, Vec<i8>) = (Vec::new(), Vec::new());
    let mut exhaustive_cases = 0u64;
    let limit = w.total_len().min(200) as u64;
    let mut consider = |indices: &[u128], signs: &[i8], max_ratio: &mut f64| {
        let v = signed_indicator_tail_sup(w, indices, signs);
        let r = v / (indices.len() as f64).sqrt();
        if r > *max_ratio {
            *max_ratio = r;
            worst = (indices.to_vec(), signs.to_vec());
        }
    };
    // exhaustive |A| in {1, 2, 3}
    let mut signs_buf = [1i8; 3];
    for i in 1..=limit {
        for bits in 0..2u32 {
            signs_buf[0] = if bits & 1 == 1 { -1 } else { 1 };
            consider(&[i as u128], &signs_buf[..1], &mut max_ratio);
            exhaustive_cases += 1;
        }
        for j in i + 1..=limit {
            for bits in 0..4u32 {
                signs_buf[0] = if bits & 1 == 1 { -1 } else { 1 };
                signs_buf[1] = if bits >> 1 & 1 == 1 { -1 } else { 1 };
                consider(&[i as u128, j as u128], &signs_buf[..2], &mut max_ratio);
                exhaustive_cases += 1;
            }
            for l in j + 1..=limit {
                for bits in 0..8u32 {
                    signs_buf[0] = if bits & 1 == 1 { -1 } else { 1 };
                    signs_buf[1] = if bits >> 1 & 1 == 1 { -1 } else { 1 };
                    signs_buf[2] = if bits >> 2 & 1 == 1 { -1 } else { 1 };
                    consider(&[i as u128, j as u128, l as u128], &signs_buf, &mut max_ratio);
                    exhaustive_cases += 1;
                }
            }
        }
    }
    // random sets within the whole constructed range
    use rand::Rng;
    let total = w.total_len();
    for trial in 0..trials {
        let mut rng = rng_for(seed, 0x414d, trial as u64);
        let size = rng.gen_range(1..=m.max(1)) as usize;
        let mut set = std::collections::BTreeSet::new();
        while set.len() < size {
            set.insert(rng.gen_range(1..=total));
        }
        let indices: Vec<u128> = set.into_iter().collect();
        let signs: Vec<i8> = (0..size).map(|_| if rng.gen() { 1 } else { -1 }).collect();
        consider(&indices, &signs, &mut max_ratio);
    }
    UniformAReport {
        max_ratio,
        worst_set: worst.0,
        worst_signs: worst.1,
        exhaustive_cases,
        random_cases: trials as u64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::make_weighted_tail_norm;

    #[test]
    fn sum_hybrid_agrees_with_direct() {
        // straddles the midpoint switchover
        let lo = MIDPOINT_MIN_START + 1;
        let hi = MIDPOINT_MIN_START + 4_000_000;
        let direct = direct_sum(lo, MIDPOINT_MIN_START + 2_000_000)
            + direct_sum(MIDPOINT_MIN_START + 2_000_001, hi);
        let em = midpoint_sum(lo, hi);
        assert!(
            (direct - em).abs() <= 1e-9 * direct,
            "direct {direct} vs midpoint {em}"
        );
    }

    #[test]
    fn first_block_counts() {
        let w = build_weights(3).unwrap();
        assert_eq!(w.counts[0], 11);
        assert_eq!(w.counts[1], 111);
        assert_eq!(w.counts[2], 1111);
        // b_1 = a_1 t_1 / sum_{n=1}^{11} t_n with a_1 = 1/ln 2
        let expect_b1 = lead_value(1) / sum_inv_sqrt(1, 11);
        assert!((w.slot_values[0] - expect_b1).abs() < 1e-15);
        assert!(!w.overflowed);
    }

    #[test]
    fn minimality_of_every_block_count() {
        let w = build_weights(24).unwrap();
        for j in 1..=w.blocks() {
            let (prev_count, prev_slot) = if j == 1 {
                (0, f64::INFINITY)
            } else {
                (w.counts[j - 2], w.slot_values[j - 2])
            };
            assert!(candidate_feasible(j, prev_count, prev_slot, w.counts[j - 1]));
            assert!(
                !candidate_feasible(j, prev_count, prev_slot, w.counts[j - 1] - 1),
                "block {j}: count {} is not minimal",
                w.counts[j - 1]
            );
        }
    }

    #[test]
    fn slot_values_strictly_decrease_below_lead_over_growth() {
        let w = build_weights(24).unwrap();
        for j in 1..=w.blocks() {
            let b = w.slot_values[j - 1];
            assert!(b < lead_value(j) / growth_value(j));
            if j > 1 {
                assert!(b < w.slot_values[j - 2]);
                assert!(w.counts[j - 1] / w.counts[j - 2] >= 10);
                assert!(w.counts[j - 1] > 10 * w.counts[j - 2]);
            }
        }
    }

    #[test]
    fn deep_construction_reaches_at_least_twenty_blocks() {
        let w = build_weights(48).unwrap();
        assert!(w.blocks() >= 20, "constructed only {}", w.blocks());
        assert!(w.overflowed);
    }

    #[test]
    fn layout_duplicates_each_t_value_twice() {
        let w = build_weights(2).unwrap();
        // lead of block 1 and slot 1 of block 1 both carry t_1
        assert_eq!(w.weight_at(1).unwrap(), t_value(1));
        assert_eq!(w.weight_at(2).unwrap(), t_value(1));
        // slot p of block 1 carries t_p
        assert_eq!(w.weight_at(12).unwrap(), t_value(11));
        // lead of block 2 (global 13) carries t_2
        assert_eq!(w.weight_at(13).unwrap(), t_value(2));
        // slot 1 of block 2 carries t_12
        assert_eq!(w.weight_at(14).unwrap(), t_value(12));
        assert!(w.weight_at(0).is_err());
    }

    #[test]
    fn per_block_telescoping() {
        let w = build_weights(6).unwrap();
        for j in 0..w.blocks() {
            let residue = lead_value(j + 1) * t_value((j + 1) as u128)
                - w.slot_values[j] * w.slot_weight_sums[j];
            assert!(residue.abs() < 1e-10, "block {} residue {residue}", j + 1);
        }
    }

    #[test]
    fn block_norm_agrees_with_dense_evaluation() {
        let w = build_weights(3).unwrap();
        for k in 1..=3 {
            let bv = make_block_vector(k, &w).unwrap();
            let dense = expand_dense(&bv, &w, 100_000).unwrap();
            let weights = w.weights_prefix(dense.ambient_dim()).unwrap();
            let oracle = make_weighted_tail_norm(weights).unwrap();
            let fast = block_norm(&bv, &w);
            let slow = oracle.eval(&dense).unwrap();
            assert!(
                (fast - slow).abs() <= 1e-9 * slow.max(1.0),
                "k={k}: {fast} vs {slow}"
            );
        }
    }

    #[test]
    fn l2_part_is_summable() {
        let w = build_weights(12).unwrap();
        let bv = make_block_vector(12, &w).unwrap();
        let (_, l2) = block_norm_parts(&bv, &w);
        // lead part alone is bounded by sum 1/(n ln^2(n+1)) < 4
        let lead_sq: f64 = bv.blocks.iter().map(|b| b.lead * b.lead).sum();
        assert!(lead_sq < 4.0);
        assert!(l2 * l2 < lead_sq + 3.0 * 2.0);
    }

    #[test]
    fn qg_threshold_drops_exactly_late_slots() {
        let w = build_weights(6).unwrap();
        let k = 2;
        let eps = (w.slot_values[1] + w.slot_values[2]) / 2.0;
        for j in 0..w.blocks() {
            if j + 1 <= k {
                assert!(w.slot_values[j] > eps);
            } else {
                assert!(w.slot_values[j] < eps);
            }
            assert!(lead_value(j + 1) > eps, "lead {} below threshold", j + 1);
        }
    }

    #[test]
    fn qg_tail_sup_dominates_analytic_bound() {
        let w = build_weights(20).unwrap();
        for blocks in 3..=w.blocks() {
            let q = qg_violation_ratio(2, &w, blocks).unwrap();
            assert!(
                q.thresholded_tail_sup >= q.analytic_lower_bound - 1e-6,
                "K={blocks}: {} < {}",
                q.thresholded_tail_sup,
                q.analytic_lower_bound
            );
        }
    }

    #[test]
    fn qg_analytic_bound_matches_direct_partial_sum() {
        let w = build_weights(10).unwrap();
        let q = qg_violation_ratio(2, &w, 9).unwrap();
        let mut direct = 0.0;
        for n in 3..=9u32 {
            direct += t_value(n as u128) * lead_value(n as usize);
        }
        assert!((q.analytic_lower_bound - direct).abs() < 1e-12);
    }

    #[test]
    fn qg_bound_over_norm_ratio_strictly_grows() {
        // the surviving-lead mechanism: the analytic bound relative to the
        // vector norm increases with every extra block
        let w = build_weights(24).unwrap();
        let mut prev = 0.0;
        for blocks in 3..=w.blocks() {
            let q = qg_violation_ratio(2, &w, blocks).unwrap();
            let r = q.analytic_lower_bound / q.vector_norm;
            assert!(r > prev, "K={blocks}: {r} vs {prev}");
            prev = r;
        }
    }

    #[test]
    fn qg_ratio_agrees_with_dense_thresholding() {
        use crate::greedy::threshold;
        let w = build_weights(3).unwrap();
        let q = qg_violation_ratio(2, &w, 3).unwrap();
        let bv = make_block_vector(3, &w).unwrap();
        let dense = expand_dense(&bv, &w, 100_000).unwrap();
        let weights = w.weights_prefix(dense.ambient_dim()).unwrap();
        let oracle = make_weighted_tail_norm(weights).unwrap();
        let td = threshold(&dense, q.epsilon);
        let slow = oracle.eval(&td).unwrap() / oracle.eval(&dense).unwrap();
        assert!((q.ratio - slow).abs() < 1e-9, "{} vs {}", q.ratio, slow);
    }

    #[test]
    fn qg_rejects_bad_arguments() {
        let w = build_weights(4).unwrap();
        assert!(qg_violation_ratio(4, &w, 4).is_err());
        assert!(qg_violation_ratio(1, &w, 9).is_err());
    }

    #[test]
    fn uniform_a_single_index() {
        let w = build_weights(3).unwrap();
        let r = signed_indicator_tail_sup(&w, &[1], &[1]);
        assert_eq!(r, 1.0);
    }

    #[test]
    fn uniform_a_check_stays_below_two() {
        let w = build_weights(4).unwrap();
        let rep = uniform_a_check(3, &w, 2000, 5);
        assert!(rep.max_ratio <= 2.0, "ratio {}", rep.max_ratio);
        // the two copies of t_1 under aligned signs are the worst pair
        assert!(rep.max_ratio >= 2.0 / 2f64.sqrt() - 1e-12);
    }

    #[test]
    fn weights_prefix_exports() {
        let w = build_weights(2).unwrap();
        let p = w.weights_prefix(13).unwrap();
        assert_eq!(p.len(), 13);
        assert_eq!(p[0], 1.0);
        assert_eq!(p[12], t_value(2));
        assert!(w.weights_prefix(9999).is_err());
    }
}
