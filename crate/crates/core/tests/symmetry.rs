mod common;

use bosonloc::disorder::{sample_realization, DisorderSpec, SeedPlan};
use bosonloc::initial::{same_site, superposition, two_site, InputEntry, InputSpec};
use bosonloc::model::{build_hamiltonian, LatticeSpec, Statistics};
use bosonloc::observables::{correlation, density, participation_ratio};
use bosonloc::propagator::{SpectralPropagator, TimeGrid};
use bosonloc::symmetry::{pi_boost, time_reverse, verify_pm_u, BoostParity};
use bosonloc::Error;
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn product_states(lat: &LatticeSpec) -> Vec<bosonloc::model::TwoBosonState> {
    vec![
        same_site(lat, 0).unwrap(),
        two_site(lat, 0, 1, Statistics::Bosonic).unwrap(),
        two_site(lat, -1, 1, Statistics::Bosonic).unwrap(),
    ]
}

fn boost_broken(lat: &LatticeSpec) -> bosonloc::model::TwoBosonState {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    superposition(
        lat,
        &InputSpec {
            entries: vec![
                InputEntry::new(0, 0, c(h, 0.0)),
                InputEntry::new(1, 2, c(0.5, 0.0)),
                InputEntry::new(2, 1, c(0.5, 0.0)),
            ],
            statistics: Statistics::Bosonic,
        },
    )
    .unwrap()
}

#[test]
fn transformations_are_involutions_and_keep_observables() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let lat = LatticeSpec::new(9).unwrap();
    for _ in 0..10 {
        let s = random_state(&lat, &mut rng);
        assert_eq!(pi_boost(&pi_boost(&s)), s);
        assert_eq!(time_reverse(&time_reverse(&s)), s);
        for t in [pi_boost(&s), time_reverse(&s)] {
            assert_eq!(density(&t), density(&s));
            assert_eq!(correlation(&t), correlation(&s));
            assert_eq!(participation_ratio(&density(&t)).unwrap(), participation_ratio(&density(&s)).unwrap());
        }
    }
}

#[test]
fn off_diagonal_disorder_gives_identical_curves_for_opposite_u() {
    let lat = LatticeSpec::new(41).unwrap();
    let spec = DisorderSpec::new(2.0, 0.0, 1.0, 1.0).unwrap();
    let seeds = SeedPlan::new(31, 2).unwrap();
    let report = verify_pm_u(&spec, &lat, &same_site(&lat, 0).unwrap(), 5.0, &TimeGrid::default(), &seeds).unwrap();
    assert_eq!(report.parity, BoostParity::Even);
    assert_eq!(report.realizations.len(), 2);
    assert!(report.passed, "{report:?}");
}

#[test]
fn diagonal_disorder_identity_needs_the_reflected_realization() {
    let lat = LatticeSpec::new(41).unwrap();
    let spec = DisorderSpec::new(2.0, 2.0, 1.0, 0.0).unwrap();
    let grid = TimeGrid::new(10.0, 21).unwrap();
    let seeds = SeedPlan::new(32, 1).unwrap();
    let s = two_site(&lat, 0, 1, Statistics::Bosonic).unwrap();
    let report = verify_pm_u(&spec, &lat, &s, 20.0, &grid, &seeds).unwrap();
    assert_eq!(report.parity, BoostParity::Odd);
    assert!(report.passed, "{report:?}");

    // without the reflection, the same realization at -U is a different system
    let plus = sample_realization(&spec, &lat, 20.0, seeds.substream(0)).unwrap();
    let minus = plus.with_interaction(-20.0);
    let pr = |p| {
        let traj = SpectralPropagator::new(&build_hamiltonian(&lat, p).unwrap()).unwrap().evolve(&s, 10.0).unwrap();
        participation_ratio(&density(&traj)).unwrap()
    };
    assert!((pr(&plus) - pr(&minus)).abs() > 1e-3);
}

#[test]
fn boost_broken_state_is_rejected() {
    let lat = LatticeSpec::new(11).unwrap();
    let spec = DisorderSpec::new(2.0, 1.0, 1.0, 0.0).unwrap();
    let err = verify_pm_u(&spec, &lat, &boost_broken(&lat), 2.0, &TimeGrid::default(), &SeedPlan::new(1, 1).unwrap());
    assert!(matches!(err, Err(Error::Symmetry(_))));

    let mut g = same_site(&lat, 0).unwrap().into_amplitudes();
    g.scale(c(0.0, 1.0));
    let imaginary = bosonloc::model::TwoBosonState::new(g, Statistics::Bosonic).unwrap();
    let err = verify_pm_u(&spec, &lat, &imaginary, 2.0, &TimeGrid::default(), &SeedPlan::new(1, 1).unwrap());
    assert!(matches!(err, Err(Error::Symmetry(_))));
}

#[test]
fn unpaired_ensembles_agree_statistically() {
    let lat = LatticeSpec::new(21).unwrap();
    let spec = DisorderSpec::new(2.0, 2.0, 1.0, 0.0).unwrap();
    let n = 200;
    let final_pr = |u: f64, seed: u64, s: &bosonloc::model::TwoBosonState| -> Vec<f64> {
        SeedPlan::new(seed, n)
            .unwrap()
            .substreams()
            .map(|ss| {
                let p = sample_realization(&spec, &lat, u, ss).unwrap();
                let st = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap()).unwrap().evolve(s, 6.0).unwrap();
                participation_ratio(&density(&st)).unwrap()
            })
            .collect()
    };
    let stats = |v: &[f64]| {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (m, (var / v.len() as f64).sqrt())
    };
    for s in product_states(&lat) {
        let (mp, ep) = stats(&final_pr(4.0, 101, &s));
        let (mm, em) = stats(&final_pr(-4.0, 202, &s));
        let combined = (ep * ep + em * em).sqrt();
        println!("PR(+4) = {mp:.3} ± {ep:.3}, PR(-4) = {mm:.3} ± {em:.3}");
        assert!((mp - mm).abs() < 3.0 * combined);
    }
}
