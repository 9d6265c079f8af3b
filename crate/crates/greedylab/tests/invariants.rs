//! Property tests for the structural invariants: norm axioms, weakness
//! monotonicity, the error-functional chain, and thresholding relations.

use greedylab::approx::{sigma_m, sigma_tilde_m, ApproxOptions};
use greedylab::coeff::CoeffVector;
use greedylab::counterexample::build_weights;
use greedylab::greedy::{greedy_residual, threshold, truncate, weak_greedy_sets, EnumOptions};
use greedylab::norms::{make_lp_norm, make_weighted_tail_norm, NormOracle};
use proptest::prelude::*;

fn oracles() -> Vec<NormOracle> {
    let w = build_weights(2).unwrap();
    vec![
        make_lp_norm(1.0).unwrap(),
        make_lp_norm(2.0).unwrap(),
        make_lp_norm(f64::INFINITY).unwrap(),
        make_weighted_tail_norm(w.weights_prefix(8).unwrap()).unwrap(),
    ]
}

fn coeff_vec() -> impl Strategy<Value = CoeffVector> {
    prop::collection::vec(-2.0f64..2.0, 1..=8).prop_map(|v| CoeffVector::from_dense(&v))
}

proptest! {
    #[test]
    fn norm_axioms(x in coeff_vec(), y in coeff_vec(), lambda in -3.0f64..3.0) {
        for oracle in oracles() {
            let dim = x.ambient_dim().max(y.ambient_dim());
            let xe = CoeffVector::from_pairs(dim, &x.iter().collect::<Vec<_>>()).unwrap();
            let ye = CoeffVector::from_pairs(dim, &y.iter().collect::<Vec<_>>()).unwrap();
            let nx = oracle.eval(&xe).unwrap();
            // homogeneity
            let ns = oracle.eval(&xe.scaled(lambda)).unwrap();
            prop_assert!((ns - lambda.abs() * nx).abs() <= 1e-12 * (1.0 + nx));
            // triangle inequality
            let mut sum = xe.clone();
            for (n, v) in ye.iter() {
                sum.set(n, sum.coeff(n) + v).unwrap();
            }
            let nsum = oracle.eval(&sum).unwrap();
            prop_assert!(nsum <= nx + oracle.eval(&ye).unwrap() + 1e-12);
            // semi-normalization of the basis vectors
            for n in 1..=dim {
                let e = CoeffVector::from_pairs(dim, &[(n, 1.0)]).unwrap();
                let v = oracle.eval(&e).unwrap();
                prop_assert!(v > 0.0 && v <= 2.0);
            }
        }
    }

    #[test]
    fn weakness_families_grow_as_tau_shrinks(
        x in coeff_vec(),
        m in 0u32..4,
        t1 in 0.3f64..1.0,
        t2 in 0.3f64..1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let m = m.min(x.ambient_dim());
        let opts = EnumOptions::default();
        let strict = weak_greedy_sets(&x, m, hi, &opts).unwrap();
        let loose = weak_greedy_sets(&x, m, lo, &opts).unwrap();
        for s in &strict.sets {
            prop_assert!(loose.sets.contains(s));
        }
        // hence the weak residual grows as tau shrinks
        let l1 = make_lp_norm(1.0).unwrap();
        let ghi = greedy_residual(&x, m, hi, &l1, &opts).unwrap().value;
        let glo = greedy_residual(&x, m, lo, &l1, &opts).unwrap().value;
        prop_assert!(glo >= ghi - 1e-12);
    }

    #[test]
    fn error_functional_chain(x in coeff_vec(), m in 0u32..4) {
        let m = m.min(x.ambient_dim());
        let opts = ApproxOptions::default();
        for oracle in oracles() {
            let s = sigma_m(&x, m, &oracle, &opts).unwrap().value;
            let st = sigma_tilde_m(&x, m, &oracle, &opts).unwrap().value;
            let g = greedy_residual(&x, m, 1.0, &oracle, &opts.enum_opts).unwrap().value;
            prop_assert!(s <= st + 1e-9, "{}: sigma {} vs projection {}", oracle.name(), s, st);
            prop_assert!(st <= g + 1e-9);
            prop_assert!(s <= oracle.eval(&x).unwrap() + 1e-12);
        }
    }

    #[test]
    fn truncation_and_thresholding_relations(x in coeff_vec(), level in 0.01f64..2.0) {
        // thresholding keeps exactly the strictly-large coefficients, and
        // truncation clamps without changing signs
        let t = threshold(&x, level);
        for (n, v) in x.iter() {
            if v.abs() > level {
                assert_eq!(t.coeff(n), v);
            } else {
                assert_eq!(t.coeff(n), 0.0);
            }
        }
        let c = truncate(&x, level).unwrap();
        for (n, v) in x.iter() {
            let cv = c.coeff(n);
            prop_assert!(cv.abs() <= level + 1e-15);
            prop_assert!(cv * v >= 0.0);
            if v.abs() <= level {
                prop_assert!(cv == v);
            }
        }
    }
}
