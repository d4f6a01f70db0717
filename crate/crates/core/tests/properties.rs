use lively_core::detection::chernoff_objective;
use lively_core::evolution::Propagator;
use lively_core::linalg::{c64, unitarity_defect, C64};
use lively_core::*;
use proptest::prelude::*;

fn cycle_and_jump() -> impl Strategy<Value = (usize, usize)> {
    (2usize..40).prop_flat_map(|n| (Just(n), 0..n))
}

fn random_state(n: usize) -> impl Strategy<Value = PureState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3 * n)
        .prop_filter("nonzero", |v| v.iter().any(|(r, i)| r.abs() + i.abs() > 1e-3))
        .prop_map(move |v| {
            let norm = v.iter().map(|(r, i)| r * r + i * i).sum::<f64>().sqrt();
            let amps = v.into_iter().map(|(r, i)| c64(r / norm, i / norm)).collect();
            PureState::from_amplitudes(amps, Geometry::Cycle { n }).unwrap()
        })
}

fn distribution(len: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, len).prop_map(|w| {
        let total: f64 = w.iter().sum();
        Distribution::from_probabilities(w.into_iter().map(|x| x / total).collect()).unwrap()
    })
}

fn dist_pair() -> impl Strategy<Value = (Distribution, Distribution)> {
    (2usize..12).prop_flat_map(|len| (distribution(len), distribution(len)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shift_is_a_permutation((n, a) in cycle_and_jump()) {
        let s = build_shift(n, a).unwrap();
        let p = s.permutation();
        let inv = p.inverse();
        for i in 0..3 * n {
            prop_assert_eq!(inv.image(p.image(i)), i);
        }
        for x in 0..n {
            prop_assert_eq!(s.map(0, x), (0, (x + n - 1) % n));
            prop_assert_eq!(s.map(1, x), (1, (x + 1) % n));
            prop_assert_eq!(s.map(2, x), (2, (x + a) % n));
        }
    }

    #[test]
    fn broken_shift_differs_on_two_mappings((n, a) in cycle_and_jump(), b_seed in 0usize..1000) {
        let b = b_seed % n;
        let intact = build_shift(n, a).unwrap();
        let broken = build_broken_shift(n, a, b).unwrap();
        let differing = (0..3 * n)
            .filter(|&i| intact.permutation().image(i) != broken.permutation().image(i))
            .count();
        prop_assert_eq!(differing, 2);
        let inv = broken.permutation().inverse();
        for i in 0..3 * n {
            prop_assert_eq!(inv.image(broken.permutation().image(i)), i);
        }
        for x in 0..n {
            prop_assert_eq!(broken.map(2, x), intact.map(2, x));
        }
    }

    #[test]
    fn walk_operator_is_unitary((n, a) in (2usize..16).prop_flat_map(|n| (Just(n), 0..n)), edge in prop::option::of(0usize..16)) {
        let cfg = WalkConfig::new(n, a).unwrap().with_broken_edge(edge.map(|b| b % n));
        let u = build_walk_operator(&cfg).unwrap();
        prop_assert!(unitarity_defect(u.dense().unwrap()) < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm_and_reverses(
        (n, a, psi) in (2usize..25).prop_flat_map(|n| (Just(n), 0..n, random_state(n))),
        seed in any::<u64>(),
        steps in 1usize..30,
    ) {
        let cfg = WalkConfig::new(n, a).unwrap().with_coin(CoinSpec::seeded_schedule(seed, steps));
        let prop = Propagator::new(&cfg).unwrap();
        let mut s = psi.clone();
        for t in 0..steps {
            s = prop.step(&s, t).unwrap();
            prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
        for t in (0..steps).rev() {
            s = prop.step_back(&s, t).unwrap();
        }
        let err = s.amplitudes().iter().zip(psi.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn evolution_composes(
        (n, a, psi) in (2usize..20).prop_flat_map(|n| (Just(n), 0..n, random_state(n))),
        t1 in 0usize..15,
        t2 in 0usize..15,
    ) {
        let cfg = WalkConfig::new(n, a).unwrap();
        let direct = evolve(&psi, &cfg, t1 + t2).unwrap();
        let split = evolve(&evolve(&psi, &cfg, t1).unwrap(), &cfg, t2).unwrap();
        let err = direct.amplitudes().iter().zip(split.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
    }

    #[test]
    fn ensemble_is_linear(
        (n, a, s1, s2) in (2usize..15).prop_flat_map(|n| (Just(n), 0..n, random_state(n), random_state(n))),
        w in 0.0f64..1.0,
        t in 0usize..20,
    ) {
        let cfg = WalkConfig::new(n, a).unwrap();
        let e = EnsembleState::new(vec![(w, s1.clone()), (1.0 - w, s2.clone())]).unwrap();
        let evolved = evolve_ensemble(&e, &cfg, t).unwrap().position_distribution();
        let p1 = evolve(&s1, &cfg, t).unwrap().position_distribution();
        let p2 = evolve(&s2, &cfg, t).unwrap().position_distribution();
        for x in 0..n {
            let expect = w * p1.probabilities()[x] + (1.0 - w) * p2.probabilities()[x];
            prop_assert!((evolved.probabilities()[x] - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn global_phase_leaves_distribution((n, a, psi) in (2usize..15).prop_flat_map(|n| (Just(n), 0..n, random_state(n))), phi in 0.0f64..7.0) {
        let cfg = WalkConfig::new(n, a).unwrap();
        let p = evolve(&psi, &cfg, 5).unwrap().position_distribution();
        let q = evolve(&psi.with_global_phase(phi), &cfg, 5).unwrap().position_distribution();
        prop_assert!(p.max_abs_diff(&q) < 1e-14);
    }

    #[test]
    fn chernoff_is_symmetric((p, q) in dist_pair()) {
        let c_pq = chernoff_information(&p, &q).unwrap();
        let c_qp = chernoff_information(&q, &p).unwrap();
        prop_assert!((c_pq.value() - c_qp.value()).abs() < 1e-10);
        prop_assert!(c_pq.value() >= 0.0);
    }

    #[test]
    fn chernoff_beats_fixed_lambdas((p, q) in dist_pair()) {
        let c = chernoff_information(&p, &q).unwrap().value();
        for lambda in [0.25, 0.5, 0.75] {
            prop_assert!(-c <= chernoff_objective(&p, &q, lambda) + 1e-12);
        }
    }

    #[test]
    fn advantage_is_monotone(c in 1e-6f64..2.0, q in 1u64..10_000) {
        let lo = advantage_bound(q, c);
        let hi = advantage_bound(q + 1, c);
        prop_assert!(hi >= lo);
        prop_assert!((0.0..=1.0).contains(&lo));
    }

    #[test]
    fn limiting_distribution_sums_to_one((n, a) in (2usize..14).prop_flat_map(|n| (Just(n), 0..n)), x0_seed in 0usize..100) {
        let cfg = WalkConfig::new(n, a).unwrap();
        let pi = limiting_distribution_spectral(&cfg, &PureState::uniform_coin(n, x0_seed % n)).unwrap();
        prop_assert!((pi.total() - 1.0).abs() < 1e-10);
        prop_assert!(pi.probabilities().iter().all(|p| *p >= 0.0));
    }
}

#[test]
fn unit_eigenvalues_of_blocks_exist() {
    // Sectors with e^{ika} = 1 always carry eigenvalue 1.
    for n in 2..12 {
        for a in 0..n {
            for l in 0..n {
                let b = fourier_block(n, a, l).unwrap();
                let has_one = block_eigensystem(&b)
                    .unwrap()
                    .iter()
                    .any(|p| (p.value - C64::new(1.0, 0.0)).norm() < 1e-9);
                if (l * a) % n == 0 {
                    assert!(has_one, "n={n} a={a} l={l}");
                }
            }
        }
    }
}
