use bolab::fracops::{halfderiv_weight_bound, Cap};
use bolab::persistence::{
    run_persistence, smoothing_budget, threshold_scan, BudgetVariant, DataFamily, ExperimentSpec, LadderSpec, Verdict,
};
use bolab::solver::{run_collect, DispersionSign, SolverConfig};
use bolab::spectral::{read_field, read_field_csv, write_field, write_field_csv, Endianness, Field, Grid};
use bolab::weights::{a2_scan, expected_verdict, A2WeightKind};

#[test]
fn field_containers_round_trip() {
    let g = Grid::new(128, 8.0).unwrap();
    let f = Field::from_fn(&g, |x| (-x * x).exp() * x.sin());
    for order in [Endianness::Little, Endianness::Big] {
        let mut buf = Vec::new();
        write_field(&mut buf, &f, order).unwrap();
        assert_eq!(read_field(buf.as_slice()).unwrap().samples(), f.samples());
    }
    let mut csv = Vec::new();
    write_field_csv(&mut csv, &f).unwrap();
    assert_eq!(read_field_csv(csv.as_slice()).unwrap().samples(), f.samples());
}

#[test]
fn light_weights_persist_for_gaussian_data() {
    let mut spec = ExperimentSpec::reference(DataFamily::gaussian(), vec![0.5, 1.0]);
    spec.t_window = [0.0, 0.2];
    spec.samples = 3;
    let report = run_persistence(&spec).unwrap();
    assert!(!report.aborted());
    for r in [0.5, 1.0] {
        assert_eq!(report.verdict_for(r), Some(Verdict::Persists));
    }
    assert!(report.high_weight_only_mean_zero);
}

#[test]
fn soliton_tail_sets_the_initial_threshold() {
    let scan = threshold_scan(DataFamily::soliton(), vec![1.0, 2.0], 0.0, LadderSpec::default(), 1e-3).unwrap();
    assert_eq!(scan.verdicts, vec![(1.0, Verdict::Persists), (2.0, Verdict::Diverges)]);
    assert!(scan.monotone);
}

#[test]
fn budgets_from_a_short_run_are_finite() {
    let g = Grid::with_spacing(32.0, 0.125).unwrap();
    let u0 = bolab::persistence::make_data(&DataFamily::dipole(), &g).unwrap();
    let cfg = SolverConfig::new(&g, 1e-3, 0.2, DispersionSign::Plus).unwrap().with_snapshot_every(20);
    let (_, snaps) = run_collect(&cfg, &u0).unwrap();
    for variant in [BudgetVariant::Step1, BudgetVariant::Step3] {
        let b = smoothing_budget(&snaps, 0.3, variant, 4.0).unwrap();
        assert!(b.value.is_finite() && b.value > 0.0);
    }
}

#[test]
fn a2_sharp_range() {
    for beta in [-0.6, -0.2, 0.2, 0.6] {
        let scan = a2_scan(beta, A2WeightKind::Power, 8, 1.0).unwrap();
        assert_eq!(scan.verdict, expected_verdict(beta), "beta = {beta}");
    }
}

#[test]
fn half_derivative_bound_refuses_large_exponent() {
    assert!(halfderiv_weight_bound(0.6, Cap::Finite(16.0)).unwrap_err().is_refusal());
    assert!(halfderiv_weight_bound(0.3, Cap::Finite(16.0)).unwrap().sup.is_finite());
}
