use proptest::prelude::*;

use asyncsi::channel::{DelaySet, StateChannel};
use asyncsi::cli::fig5_rows;
use asyncsi::oracle::{certify, grid_value, CertTarget, GridSpec, DEFAULT_RESOLUTION};
use asyncsi::prob::Pmf;
use asyncsi::rates::{
    acsitr_capacity, acsitr_objective, compound_capacity, no_si_capacity, CertStatus, MaximinConfig, SearchConfig,
    StrategyPmf,
};

fn h2(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn channel_from(rows: &[f64], prior: f64) -> StateChannel {
    let w: Vec<f64> = rows.iter().flat_map(|&q| [q, 1.0 - q]).collect();
    StateChannel::new(2, 2, 2, w, Pmf::new(vec![prior, 1.0 - prior]).unwrap()).unwrap()
}

#[test]
fn no_si_on_a_bsc_certifies_against_the_closed_form() {
    let bsc = StateChannel::state_blind(2, &[vec![0.9, 0.1], vec![0.1, 0.9]], Pmf::uniform(2)).unwrap();
    let r = no_si_capacity(&bsc).unwrap();
    assert!((r.value - (1.0 - h2(0.1))).abs() < 1e-9);
    let c = certify(&CertTarget::NoSi(bsc), &r, &GridSpec::new(Vec::new(), DEFAULT_RESOLUTION));
    assert_eq!(c.status, CertStatus::Certified);
}

#[test]
fn fig5_first_rows() {
    let cfg = SearchConfig {
        starts: 8,
        certify: false,
        ..SearchConfig::default()
    };
    let rows = fig5_rows(2, 0.5, &cfg).unwrap();
    for r in &rows {
        assert!((r.report.value - r.inverse).abs() < 1e-2, "D={} {}", r.d_size, r.report.value);
    }
    assert!(fig5_rows(9, 0.5, &cfg).is_err());
}

#[test]
fn compound_family_of_one_is_the_synchronous_capacity() {
    let ch = StateChannel::noisy_xor(0.3, 0.15).unwrap();
    let single = compound_capacity(std::slice::from_ref(&ch), &MaximinConfig::default()).unwrap();
    assert!((single.value - (1.0 - h2(0.15))).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn maximin_value_dominates_any_strategy(
        rows in prop::collection::vec(0.02f64..0.98, 4),
        prior in 0.2f64..0.8,
        strat in prop::collection::vec(0.01f64..1.0, 8),
    ) {
        let ch = channel_from(&rows, prior);
        let ds = DelaySet::new(0, 1);
        let cap = acsitr_capacity(&ch, &ds, &MaximinConfig::default()).unwrap();
        let table: Vec<f64> = strat.chunks(2).flat_map(|c| [c[0] / (c[0] + c[1]), c[1] / (c[0] + c[1])]).collect();
        let s = StrategyPmf::new(4, 2, table).unwrap();
        let worst = ds.iter().map(|d| acsitr_objective(&ch, &ds, &s, d).unwrap()).fold(f64::INFINITY, f64::min);
        prop_assert!(worst <= cap.value + 1e-6);
        prop_assert!(cap.convergence_gap < 1e-6);
    }

    #[test]
    fn maximin_matches_its_grid(rows in prop::collection::vec(0.02f64..0.98, 4), prior in 0.2f64..0.8) {
        let ch = channel_from(&rows, prior);
        let ds = DelaySet::new(0, 1);
        let cap = acsitr_capacity(&ch, &ds, &MaximinConfig::default()).unwrap();
        let grid = grid_value(&CertTarget::Acsitr(ch, ds), &GridSpec::new(Vec::new(), 32)).unwrap();
        prop_assert!(grid.value <= cap.value + 1e-9);
        prop_assert!(cap.value - grid.value < 5e-3);
    }

    #[test]
    fn more_delays_never_help(rows in prop::collection::vec(0.02f64..0.98, 4), prior in 0.2f64..0.8) {
        let ch = channel_from(&rows, prior);
        let cfg = MaximinConfig::default();
        let small = acsitr_capacity(&ch, &DelaySet::new(0, 1), &cfg).unwrap().value;
        let large = acsitr_capacity(&ch, &DelaySet::new(1, 1), &cfg).unwrap().value;
        prop_assert!(large <= small + 1e-6);
    }
}
