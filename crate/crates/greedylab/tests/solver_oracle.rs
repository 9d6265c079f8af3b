//! Independent correctness oracle for the coefficient solver: a dense grid
//! search over coefficient boxes. The grid value can only sit above the true
//! minimum, and on supports of size <= 2 a grid of step `h` finds a point
//! within Lipschitz distance of the optimum, so the solver must satisfy
//!
//!   solver <= grid + 1e-6          (never worse than the grid point)
//!   solver >= grid - sqrt(2) h - 1e-6   (cannot beat the true minimum by
//!                                        more than the grid resolution)
//!
//! The per-coordinate Lipschitz constant of the objective is at most 1 for
//! every built-in norm (unit vectors have norm at most 1 in each part).

use greedylab::approx::{best_coeffs_on_support, SolverOptions};
use greedylab::coeff::{CoeffVector, IndexSet};
use greedylab::counterexample::build_weights;
use greedylab::family::rng_for;
use greedylab::norms::{make_lp_norm, make_max_norm, make_weighted_tail_norm, NormOracle};
use rand::Rng;

fn grid_min(x: &CoeffVector, support: &[u32], oracle: &NormOracle, step: f64, half: f64) -> f64 {
    let steps = (2.0 * half / step).ceil() as i64;
    let eval = |coeffs: &[f64]| {
        let mut v = x.clone();
        for (i, &n) in support.iter().enumerate() {
            v.set(n, x.coeff(n) - coeffs[i]).unwrap();
        }
        // set() stores x_n - a_n at n; the residual norm is then ||v||
        oracle.eval(&v).unwrap()
    };
    let mut best = f64::INFINITY;
    match support.len() {
        1 => {
            for i in 0..=steps {
                let a = -half + i as f64 * step;
                best = best.min(eval(&[a]));
            }
        }
        2 => {
            for i in 0..=steps {
                let a = -half + i as f64 * step;
                for j in 0..=steps {
                    let b = -half + j as f64 * step;
                    best = best.min(eval(&[a, b]));
                }
            }
        }
        _ => unreachable!("oracle test is limited to supports of size <= 2"),
    }
    best
}

fn oracles() -> Vec<NormOracle> {
    let w = build_weights(2).unwrap();
    vec![
        make_lp_norm(1.0).unwrap(),
        make_lp_norm(2.0).unwrap(),
        make_lp_norm(1.5).unwrap(),
        make_lp_norm(f64::INFINITY).unwrap(),
        make_weighted_tail_norm(w.weights_prefix(6).unwrap()).unwrap(),
        make_max_norm(vec![make_lp_norm(1.0).unwrap(), make_lp_norm(f64::INFINITY).unwrap()])
            .unwrap(),
    ]
}

#[test]
fn solver_matches_dense_grid_search() {
    let opts = SolverOptions::default();
    for (oi, oracle) in oracles().iter().enumerate() {
        for trial in 0..40u64 {
            let mut rng = rng_for(101, oi as u64, trial);
            let n = 6u32;
            let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let x = CoeffVector::from_dense(&vals);
            let size = rng.gen_range(1..=2usize);
            let mut support = Vec::new();
            while support.len() < size {
                let c = rng.gen_range(1..=n);
                if !support.contains(&c) {
                    support.push(c);
                }
            }
            support.sort_unstable();
            let sup = x.sup_norm().max(0.1);
            let step = 0.01 * sup;
            let half = 2.0 * sup;
            let grid = grid_min(&x, &support, oracle, step, half);
            let solved =
                best_coeffs_on_support(&x, &IndexSet::new(support.clone()), oracle, &opts)
                    .unwrap();
            assert!(
                solved.value <= grid + 1e-6,
                "{} support {support:?}: solver {} above grid {}",
                oracle.name(),
                solved.value,
                grid
            );
            let resolution = 2f64.sqrt() * step * 1.01;
            assert!(
                solved.value >= grid - resolution - 1e-6,
                "{} support {support:?}: solver {} implausibly below grid {} (resolution {})",
                oracle.name(),
                solved.value,
                grid,
                resolution
            );
        }
    }
}

#[test]
fn solver_deterministic_across_runs() {
    let w = build_weights(2).unwrap();
    let oracle = make_weighted_tail_norm(w.weights_prefix(6).unwrap()).unwrap();
    let x = CoeffVector::from_dense(&[0.9, -1.4, 0.3, 0.0, 1.1, -0.2]);
    let support = IndexSet::new(vec![2, 5]);
    let a = best_coeffs_on_support(&x, &support, &oracle, &SolverOptions::default()).unwrap();
    let b = best_coeffs_on_support(&x, &support, &oracle, &SolverOptions::default()).unwrap();
    assert_eq!(a.value, b.value);
    assert_eq!(a.coeffs, b.coeffs);
    assert!(a.converged);
}
