//! Property suites over randomized states: metric axioms and orderings
//! for the purified distance, operator inequalities, and entropy
//! relations that hold for every input.

use proptest::prelude::*;

use selentropy::metrics::{fidelity, purified_distance, trace_distance};
use selentropy::operators::{
    apply_channel, maximally_mixed, random_povm, random_state, state_tensor, ComplexMatrix,
    HermitianOp, MultipartiteState, SystemLayout,
};

fn state(dim: usize, rank: usize, seed: u64) -> MultipartiteState {
    random_state(&SystemLayout::single("A", dim), rank, seed).unwrap()
}

/// sub-normalized variant: scale a random state by a factor in (0, 1]
fn sub_state(dim: usize, rank: usize, seed: u64, scale: f64) -> MultipartiteState {
    let s = state(dim, rank, seed);
    MultipartiteState::new(s.matrix().scale_re(scale), s.layout().clone()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn purified_distance_is_a_metric(
        seed in 0u64..5000,
        rank in 1usize..4,
        s1 in 0.3f64..1.0,
        s2 in 0.3f64..1.0,
        s3 in 0.3f64..1.0,
    ) {
        let rho = sub_state(3, rank, seed, s1);
        let sig = sub_state(3, 3, seed + 1, s2);
        let tau = sub_state(3, 2, seed + 2, s3);
        let ab = purified_distance(&rho, &sig).unwrap().value;
        let ba = purified_distance(&sig, &rho).unwrap().value;
        prop_assert!((ab - ba).abs() < 1e-12);
        let ac = purified_distance(&rho, &tau).unwrap().value;
        let bc = purified_distance(&sig, &tau).unwrap().value;
        prop_assert!(ac <= ab + bc + 1e-9);
        prop_assert!(purified_distance(&rho, &rho).unwrap().value < 1e-6);
    }

    #[test]
    fn distance_ordering_chain(
        seed in 0u64..5000,
        s1 in 0.3f64..1.0,
        s2 in 0.3f64..1.0,
    ) {
        let rho = sub_state(4, 3, seed, s1);
        let tau = sub_state(4, 2, seed + 7, s2);
        let d = trace_distance(&rho, &tau).unwrap().value;
        let p = purified_distance(&rho, &tau).unwrap().value;
        prop_assert!(d <= p + 1e-9);
        prop_assert!(p <= (2.0 * d - d * d).max(0.0).sqrt() + 1e-9);
        prop_assert!(p <= (2.0 * d).sqrt() + 1e-9);
    }

    #[test]
    fn purified_distance_monotone_under_channels(
        seed in 0u64..5000,
    ) {
        let rho = state(2, 2, seed);
        let tau = state(2, 1, seed + 3);
        let p0 = purified_distance(&rho, &tau).unwrap().value;
        // a trace non-increasing channel: keep one Kraus branch of a POVM
        let povm = random_povm(2, 2, seed + 11).unwrap();
        let kraus = vec![povm.elements()[0].sqrt().into_matrix()];
        let r1 = apply_channel(&rho, &kraus, "A", 2);
        let t1 = apply_channel(&tau, &kraus, "A", 2);
        if let (Ok(r1), Ok(t1)) = (r1, t1) {
            let p1 = purified_distance(&r1, &t1).unwrap().value;
            prop_assert!(p1 <= p0 + 1e-9, "{p1} vs {p0}");
        }
    }

    #[test]
    fn improved_triangle_combination(
        seed in 0u64..5000,
        mix1 in 0.02f64..0.3,
        mix2 in 0.02f64..0.3,
    ) {
        // build sigma between rho and tau by mixing, then check the
        // asin-composition bound against the direct distance
        let rho = state(3, 3, seed);
        let far = state(3, 2, seed + 5);
        let sigma = MultipartiteState::new(
            rho.matrix().scale_re(1.0 - mix1).add(&far.matrix().scale_re(mix1)),
            rho.layout().clone(),
        ).unwrap();
        let tau = MultipartiteState::new(
            sigma.matrix().scale_re(1.0 - mix2).add(&far.matrix().scale_re(mix2)),
            rho.layout().clone(),
        ).unwrap();
        let e1 = purified_distance(&rho, &sigma).unwrap().value;
        let e2 = purified_distance(&sigma, &tau).unwrap().value;
        if e1.asin() + e2.asin() <= std::f64::consts::FRAC_PI_2 {
            let bound = e1 * (1.0 - e2 * e2).sqrt() + e2 * (1.0 - e1 * e1).sqrt();
            let p = purified_distance(&rho, &tau).unwrap().value;
            prop_assert!(p <= bound + 1e-9, "{p} vs {bound}");
        }
    }

    #[test]
    fn projection_smoothing_bound(
        seed in 0u64..5000,
        keep_dim in 1usize..4,
    ) {
        // P(rho, Pi rho Pi) <= sqrt(2 tr(Pic rho) - tr(Pic rho)^2)
        let rho = state(4, 4, seed);
        let basis = random_state(&SystemLayout::single("A", 4), 4, seed + 13).unwrap();
        let (_, vecs) = basis.op().eigh();
        let mut pi = ComplexMatrix::zeros(4, 4);
        for k in 0..keep_dim {
            for i in 0..4 {
                for j in 0..4 {
                    pi[(i, j)] += vecs[(i, k)] * vecs[(j, k)].conj();
                }
            }
        }
        let projected = rho.op().conjugate_by(&pi);
        if projected.trace() <= 1e-12 {
            return Ok(());
        }
        let proj_state = MultipartiteState::new(projected.into_matrix(), rho.layout().clone()).unwrap();
        let p = purified_distance(&rho, &proj_state).unwrap().value;
        let leak = rho.trace() - proj_state.trace();
        let bound = (2.0 * leak - leak * leak).max(0.0).sqrt();
        prop_assert!(p <= bound + 1e-9, "{p} vs {bound}");
    }

    #[test]
    fn distinguishing_advantage_bound(
        seed in 0u64..5000,
    ) {
        // any two-outcome measurement distinguishes equiprobable normalized
        // states with probability at most (1 + D)/2
        let rho = state(3, 2, seed);
        let tau = state(3, 3, seed + 21);
        let povm = random_povm(3, 2, seed + 42).unwrap();
        let d = trace_distance(&rho, &tau).unwrap().value;
        let p_success = 0.5 * povm.elements()[0].inner(rho.op())
            + 0.5 * povm.elements()[1].inner(tau.op());
        prop_assert!(p_success <= 0.5 * (1.0 + d) + 1e-9);
    }

    #[test]
    fn dimension_bound_on_marginals(
        seed in 0u64..5000,
        da in 2usize..4,
        db in 2usize..4,
    ) {
        // M <= dim(H') tr_{H'}(M) (x) 1 on bipartite positive operators
        let layout = SystemLayout::new(&[("A", da), ("B", db)]).unwrap();
        let m = random_state(&layout, (da * db).min(4), seed).unwrap();
        let marginal = m.partial_trace(&["A"]).unwrap();
        let bound = marginal.op().kron(&HermitianOp::identity(db)).scale(db as f64);
        let diff = bound.sub(m.op());
        prop_assert!(diff.min_eigenvalue() >= -1e-9);
    }

    #[test]
    fn fidelity_of_product_states_multiplies(
        seed in 0u64..5000,
    ) {
        let a1 = state(2, 2, seed);
        let a2 = state(2, 1, seed + 1);
        let b1 = random_state(&SystemLayout::single("B", 2), 2, seed + 2).unwrap();
        let b2 = random_state(&SystemLayout::single("B", 2), 2, seed + 3).unwrap();
        let p1 = state_tensor(&a1, &b1).unwrap();
        let p2 = state_tensor(&a2, &b2).unwrap();
        let f = fidelity(&p1, &p2).unwrap().value;
        let fa = fidelity(&a1, &a2).unwrap().value;
        let fb = fidelity(&b1, &b2).unwrap().value;
        prop_assert!((f - fa * fb).abs() < 1e-9);
    }
}

#[test]
fn maximally_mixed_is_farthest_invariant() {
    // sanity anchor for the generators above
    let pi = maximally_mixed(2);
    assert!((pi.trace() - 1.0).abs() < 1e-12);
}
