use bolab::fracops::{
    check_identity, random_band_limited, random_dipole, random_gaussian_mixture, random_mean_zero, trial_rng,
    EnsembleLaw, IdentityId, IdentityOperators, KAPPA,
};
use bolab::persistence::{classify_ladder, is_monotone, Verdict};
use bolab::solver::{conserved, run, DispersionSign, SolverConfig};
use bolab::spectral::{derivative, frac_deriv, hilbert, Field, Grid, HomogeneousSymbol, LineOperator};
use bolab::weights::TruncatedWeight;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::new(1024, 64.0).unwrap()
}

fn rel_gap(a: &Field, b: &Field) -> f64 {
    a.sub(b).l2_norm() / a.l2_norm().max(b.l2_norm()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(seed in any::<u64>()) {
        let f = random_gaussian_mixture(&grid(), &mut trial_rng(seed, 0));
        prop_assert!((f.l2_norm_sq() - f.l2_norm_sq_spectral()).abs() < 1e-12 * f.l2_norm_sq());
    }

    #[test]
    fn hilbert_squared_is_minus_identity_on_mean_zero(seed in any::<u64>()) {
        let f = random_mean_zero(&grid(), &EnsembleLaw::default(), &mut trial_rng(seed, 0));
        prop_assert!(rel_gap(&hilbert(&hilbert(&f)), &f.scale(-1.0)) < 1e-12);
    }

    #[test]
    fn d_is_hilbert_of_derivative(seed in any::<u64>()) {
        let f = random_band_limited(&grid(), &EnsembleLaw::default(), &mut trial_rng(seed, 1));
        let d = frac_deriv(&f, 1.0).unwrap();
        prop_assert!(rel_gap(&d, &hilbert(&derivative(&f, 1))) < 1e-12);
    }

    #[test]
    fn fractional_derivatives_compose(seed in any::<u64>(), s in 0.1f64..1.0, t in 0.1f64..1.0) {
        let f = random_mean_zero(&grid(), &EnsembleLaw::default(), &mut trial_rng(seed, 2));
        let two = frac_deriv(&frac_deriv(&f, s).unwrap(), t).unwrap();
        prop_assert!(rel_gap(&two, &frac_deriv(&f, s + t).unwrap()) < 1e-12);
    }

    #[test]
    fn line_operator_is_linear(seed in any::<u64>(), order in 0.1f64..2.0, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = grid();
        let op = LineOperator::new(&g, HomogeneousSymbol::frac(order));
        let f = random_gaussian_mixture(&g, &mut trial_rng(seed, 0));
        let h = random_dipole(&g, &mut trial_rng(seed, 1));
        let lhs = op.apply(&f.scale(a).add(&h.scale(b))).unwrap();
        let rhs = op.apply(&f).unwrap().scale(a).add(&op.apply(&h).unwrap().scale(b));
        prop_assert!(lhs.sub(&rhs).l2_norm() < 1e-12 * (a.abs() + b.abs() + 1.0) * op.apply(&f).unwrap().l2_norm().max(1.0));
    }

    #[test]
    fn ensembles_are_reproducible(seed in any::<u64>(), trial in 0u64..1000) {
        let g = Grid::new(256, 32.0).unwrap();
        let a = random_dipole(&g, &mut trial_rng(seed, trial));
        let b = random_dipole(&g, &mut trial_rng(seed, trial));
        prop_assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn hilbert_x_commutator_is_kappa_times_mass(seed in any::<u64>()) {
        let g = grid();
        let ops = IdentityOperators::new(&g);
        let f = random_gaussian_mixture(&g, &mut trial_rng(seed, 3));
        let c = ops.hilbert_x_commutator(&f).unwrap();
        let want = KAPPA * f.mean_mode();
        let r = 0.5 * g.half_length();
        let worst = (0..g.n()).filter(|&j| g.x(j).abs() <= r).map(|j| (c.samples()[j] - want).abs()).fold(0.0, f64::max);
        prop_assert!(worst < 1e-10, "{worst:e}");
    }

    #[test]
    fn weighted_identities_hold_on_mixtures(seed in any::<u64>()) {
        let g = grid();
        let ops = IdentityOperators::new(&g);
        let f = random_gaussian_mixture(&g, &mut trial_rng(seed, 4));
        for id in [IdentityId::Id1, IdentityId::Id2, IdentityId::Id4, IdentityId::Id1b] {
            let r = check_identity(&ops, id, &f, "mixture").unwrap();
            prop_assert!(r.pass, "{id}: {:e} vs {:e}", r.residual_l2, r.normalizer);
        }
    }

    #[test]
    fn truncated_weight_is_even_monotone_and_exact_inside(cap in 2.0f64..64.0, m in -2.0f64..4.0, x in 0.0f64..200.0) {
        let w = TruncatedWeight::new(cap, m).unwrap();
        prop_assert_eq!(w.eval(x), w.eval(-x));
        let (lo, hi) = (w.eval(x), w.eval(x + 0.5));
        if m > 0.0 {
            prop_assert!(hi >= lo * (1.0 - 1e-14));
        } else {
            prop_assert!(hi <= lo * (1.0 + 1e-14));
        }
        if x <= cap {
            let exact = (1.0 + x * x).powf(0.5 * m);
            prop_assert!((lo - exact).abs() <= 1e-12 * exact);
        }
    }

    #[test]
    fn converging_ladders_persist(c in 0.1f64..1e3, q in 0.05f64..0.85) {
        let norms: Vec<f64> = (1..=4).map(|k| c * (2.0 - q.powi(k))).collect();
        prop_assert_eq!(classify_ladder(&norms, 0.0).verdict, Verdict::Persists);
    }

    #[test]
    fn growing_ladders_diverge(c in 1e-6f64..1e3, g in 1.25f64..8.0) {
        let norms: Vec<f64> = (0..4).map(|k| c * g.powi(k)).collect();
        prop_assert_eq!(classify_ladder(&norms, 0.0).verdict, Verdict::Diverges);
    }

    #[test]
    fn classification_is_scale_invariant(norms in prop::collection::vec(0.01f64..100.0, 3..6), scale in 1e-6f64..1e6) {
        let scaled: Vec<f64> = norms.iter().map(|n| n * scale).collect();
        prop_assert_eq!(classify_ladder(&norms, 0.0).verdict, classify_ladder(&scaled, 0.0).verdict);
    }

    #[test]
    fn sorted_verdicts_are_monotone(ranks in prop::collection::vec(0usize..3, 1..8)) {
        let of = |k| [Verdict::Persists, Verdict::Inconclusive, Verdict::Diverges][k];
        let mut sorted = ranks.clone();
        sorted.sort();
        let pairs = |rs: &[usize]| rs.iter().enumerate().map(|(i, &k)| (i as f64, of(k))).collect::<Vec<_>>();
        prop_assert!(is_monotone(&pairs(&sorted)));
        prop_assert_eq!(is_monotone(&pairs(&ranks)), ranks == sorted);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solver_conserves_mass_and_l2(seed in any::<u64>(), amplitude in 0.1f64..2.0) {
        let g = Grid::new(512, 32.0).unwrap();
        let u0 = random_gaussian_mixture(&g, &mut trial_rng(seed, 5)).scale(amplitude);
        let cfg = SolverConfig::new(&g, 1e-3, 0.1, DispersionSign::Plus).unwrap();
        let out = run(&cfg, &u0).unwrap();
        let (a, b) = (conserved(&u0, DispersionSign::Plus), conserved(&out.final_state, DispersionSign::Plus));
        prop_assert!((a.mass - b.mass).abs() < 1e-12 * (1.0 + a.mass.abs()));
        prop_assert!((a.l2 - b.l2).abs() < 1e-10 * a.l2);
    }
}
