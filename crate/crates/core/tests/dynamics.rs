mod common;

use bosonloc::disorder::{sample_realization, DisorderSpec, SeedPlan};
use bosonloc::initial::{same_site, two_site};
use bosonloc::model::{build_hamiltonian, AmplitudeGrid, LatticeSpec, ModelParams, Statistics, TwoBosonState};
use bosonloc::propagator::{evolve_stepper, stepper_bound, SpectralPropagator, TimeGrid};
use bosonloc::symmetry::time_reverse;
use bosonloc::waveguide::{design_array, propagate_grid};
use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fig1_realization(u: f64) -> (LatticeSpec, ModelParams) {
    let lat = LatticeSpec::new(41).unwrap();
    let spec = DisorderSpec::new(2.0, 2.0, 1.0, 0.0).unwrap();
    let p = sample_realization(&spec, &lat, u, SeedPlan::new(7, 1).unwrap().substream(0)).unwrap();
    (lat, p)
}

fn max_diff(a: &[TwoBosonState], b: &[TwoBosonState]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.amplitudes().max_abs_diff(y.amplitudes()))
        .fold(0.0, f64::max)
}

#[test]
fn eigendecomposition_meets_its_contract() {
    let (lat, p) = fig1_realization(20.0);
    let h = build_hamiltonian(&lat, &p).unwrap();
    let prop = SpectralPropagator::new(&h).unwrap();
    let lam = prop.spectral_radius();
    assert!(prop.reconstruction_residual(&h) <= SpectralPropagator::RECONSTRUCTION_TOL * lam);
    assert!(prop.orthonormality_defect() <= SpectralPropagator::ORTHONORMALITY_TOL);
    assert!(prop.probe_residual(&h) <= 1e-12);
    assert!(prop.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn norm_and_energy_are_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (lat, p) = fig1_realization(-8.0);
    let h = build_hamiltonian(&lat, &p).unwrap();
    let prop = SpectralPropagator::new(&h).unwrap();
    let s = random_state(&lat, &mut rng);
    let e0 = h.expectation(&s).unwrap();
    for st in prop.evolve_many(&s, &TimeGrid::default().times()).unwrap() {
        assert!((st.norm_sq() - 1.0).abs() <= 1e-10);
        assert!((h.expectation(&st).unwrap() - e0).abs() <= 1e-9 * e0.abs());
    }
}

#[test]
fn zero_time_is_identity_and_times_compose() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let lat = LatticeSpec::new(21).unwrap();
    let p = random_params(&lat, &mut rng);
    let prop = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap()).unwrap();
    let s = random_state(&lat, &mut rng);
    assert!(prop.evolve(&s, 0.0).unwrap().amplitudes().max_abs_diff(s.amplitudes()) < 1e-15);
    let (t1, t2) = (1.3, 4.1);
    let direct = prop.evolve(&s, t1 + t2).unwrap();
    let composed = prop.evolve(&prop.evolve(&s, t1).unwrap(), t2).unwrap();
    assert!(direct.amplitudes().max_abs_diff(composed.amplitudes()) <= 1e-10);
}

#[test]
fn evolution_is_linear() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let lat = LatticeSpec::new(15).unwrap();
    let p = random_params(&lat, &mut rng);
    let prop = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap()).unwrap();
    let (a, b) = (random_state(&lat, &mut rng), random_state(&lat, &mut rng));
    let (alpha, beta) = (c(0.3, -0.8), c(1.1, 0.4));
    let mut mix = AmplitudeGrid::from_fn(15, |n, m| alpha * a.amp(n, m) + beta * b.amp(n, m));
    let norm = mix.norm_sq().sqrt();
    mix.scale(c(1.0 / norm, 0.0));
    let mix = TwoBosonState::new(mix, Statistics::Bosonic).unwrap();
    let t = 3.7;
    let (ea, eb, em) = (prop.evolve(&a, t).unwrap(), prop.evolve(&b, t).unwrap(), prop.evolve(&mix, t).unwrap());
    let expected = AmplitudeGrid::from_fn(15, |n, m| (alpha * ea.amp(n, m) + beta * eb.amp(n, m)) / norm);
    assert!(em.amplitudes().max_abs_diff(&expected) < 1e-13);
}

#[test]
fn unnormalized_input_is_rejected() {
    let lat = LatticeSpec::new(5).unwrap();
    let prop = SpectralPropagator::new(&build_hamiltonian(&lat, &ModelParams::uniform(&lat, 2.0, 1.0, 1.0).unwrap()).unwrap()).unwrap();
    let mut g = same_site(&lat, 0).unwrap().into_amplitudes();
    g.scale(c(1.001, 0.0));
    // states are validated on construction, so nothing off by more than 1e-8
    // ever reaches the propagator
    assert!(TwoBosonState::new(g, Statistics::Bosonic).is_err());
    assert!(prop.evolve(&same_site(&lat, 0).unwrap(), 1.0).is_ok());
}

#[test]
fn stepper_matches_spectral_on_two_sites() {
    let lat = LatticeSpec::new(2).unwrap();
    let p = ModelParams::new(&lat, vec![0.0, 0.0], vec![1.0], 0.0).unwrap();
    let prop = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap()).unwrap();
    let s = same_site(&lat, 0).unwrap();
    let grid = TimeGrid::new(10.0, 11).unwrap();
    let stepped = evolve_stepper(&p, &s, &grid, stepper_bound(&p) / 4.0).unwrap();
    let exact = prop.evolve_many(&s, &grid.times()).unwrap();
    assert!(max_diff(&stepped, &exact) <= 1e-8, "{}", max_diff(&stepped, &exact));
}

#[test]
fn stepper_matches_spectral_on_a_strongly_interacting_realization() {
    let (lat, p) = fig1_realization(20.0);
    let s = same_site(&lat, 0).unwrap();
    let grid = TimeGrid::default();
    let stepped = evolve_stepper(&p, &s, &grid, stepper_bound(&p) / 5.0).unwrap();
    let exact = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap())
        .unwrap()
        .evolve_many(&s, &grid.times())
        .unwrap();
    let diff = max_diff(&stepped, &exact);
    let drift = stepped.iter().map(|st| (st.norm_sq() - 1.0).abs()).fold(0.0, f64::max);
    println!("stepper vs spectral: max |dc| = {diff:.3e}, norm drift = {drift:.3e}");
    assert!(diff <= 1e-6);
    assert!(drift <= 1e-7);
}

#[test]
fn waveguide_integrator_matches_spectral() {
    let (lat, p) = fig1_realization(-12.0);
    let s = two_site(&lat, 0, 1, Statistics::Bosonic).unwrap();
    let grid = TimeGrid::new(10.0, 11).unwrap();
    let fields = propagate_grid(&design_array(&lat, &p).unwrap(), &s, &grid).unwrap();
    let exact = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap())
        .unwrap()
        .evolve_many(&s, &grid.times())
        .unwrap();
    for (f, e) in fields.iter().zip(&exact) {
        assert!(f.max_abs_diff(e.amplitudes()) <= 1e-10);
    }
}

#[test]
fn fermionic_pairs_evolve_on_the_grid() {
    let lat = LatticeSpec::new(11).unwrap();
    let spec = DisorderSpec::new(2.0, 2.0, 1.0, 0.0).unwrap();
    let p = sample_realization(&spec, &lat, 5.0, SeedPlan::new(3, 1).unwrap().substream(0)).unwrap();
    let s = two_site(&lat, 0, 1, Statistics::Fermionic).unwrap();
    let grid = TimeGrid::new(4.0, 9).unwrap();
    let stepped = evolve_stepper(&p, &s, &grid, stepper_bound(&p) / 4.0).unwrap();
    let fields = propagate_grid(&design_array(&lat, &p).unwrap(), &s, &grid).unwrap();
    // U only acts on the diagonal, which an antisymmetric state never occupies
    let free = propagate_grid(&design_array(&lat, &p.with_interaction(0.0)).unwrap(), &s, &grid).unwrap();
    for ((st, f), g) in stepped.iter().zip(&fields).zip(&free) {
        assert!(st.amplitudes().exchange_defect(-1.0) < 1e-13);
        assert!(st.amplitudes().max_abs_diff(f) < 1e-8);
        assert!(f.max_abs_diff(g) < 1e-12);
    }
    let prop = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap()).unwrap();
    assert!(prop.evolve(&s, 1.0).is_err());
}

#[test]
fn reversed_evolution_returns_to_reversed_start() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let lat = LatticeSpec::new(17).unwrap();
    let p = random_params(&lat, &mut rng);
    let prop = SpectralPropagator::new(&build_hamiltonian(&lat, &p).unwrap()).unwrap();
    let s = random_state(&lat, &mut rng);
    let t = 6.0;
    let back = prop.evolve(&time_reverse(&prop.evolve(&s, t).unwrap()), t).unwrap();
    assert!(back.amplitudes().max_abs_diff(time_reverse(&s).amplitudes()) < 1e-11);
}
