use std::time::{Duration, Instant};

use log::warn;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::disorder::{sample_realization, Substream};
use crate::error::{Error, Result};
use crate::model::{build_hamiltonian, LatticeSpec, ModelParams, TwoBosonState};
use crate::observables::{boundary_leakage, correlation, density, participation_ratio, CorrelationMatrix, LEAKAGE_THRESHOLD};
use crate::propagator::SpectralPropagator;
use crate::sweep::config::ExperimentConfig;
use crate::waveguide::check_feasibility;

/// Per-sample |Σ|c|² − 1| allowed on a spectral trajectory.
pub const NORM_TOL: f64 = 1e-10;
/// Per-sample |Σ Γ − 2| allowed.
pub const GAMMA_SUM_TOL: f64 = 1e-9;
/// Relative eigendecomposition probe residual allowed.
pub const PROBE_TOL: f64 = 1e-10;

/// Aggregates for one (initial state, U) pair.
#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub state: String,
    pub state_index: usize,
    pub u_index: usize,
    pub interaction: f64,
    pub n_realizations: usize,
    pub pr_mean: Vec<f64>,
    pub pr_stderr: Vec<f64>,
    /// PR of the ensemble-mean density, the alternative averaging order.
    pub pr_of_mean_density: Vec<f64>,
    pub density_final: Vec<f64>,
    #[serde(skip)]
    pub gamma_final: CorrelationMatrix,
    pub leakage_mean_max: f64,
    pub leakage_max: f64,
    pub leakage_exceeded: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RealizationRecord {
    pub u_index: usize,
    pub interaction: f64,
    pub realization: usize,
    pub substream: Substream,
    pub params_hash: String,
    /// PR(t) per initial state; empty when the realization failed.
    #[serde(skip)]
    pub pr: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureRecord {
    pub u_index: usize,
    pub interaction: f64,
    pub realization: usize,
    pub params_hash: String,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub config: ExperimentConfig,
    pub times: Vec<f64>,
    /// Ordered by state index, then U index.
    pub cells: Vec<CellResult>,
    /// Ordered by U index, then realization.
    pub realizations: Vec<RealizationRecord>,
    pub failures: Vec<FailureRecord>,
    pub warnings: Vec<String>,
    pub version: &'static str,
    pub wall_time: Duration,
}

impl EnsembleResult {
    pub fn cell(&self, state: &str, interaction: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.state == state && c.interaction == interaction)
    }
}

struct StateOutcome {
    pr: Vec<f64>,
    density: Vec<Vec<f64>>,
    gamma_final: CorrelationMatrix,
    max_leakage: f64,
}

struct WorkOutcome {
    record: RealizationRecord,
    result: std::result::Result<Vec<StateOutcome>, String>,
}

pub fn params_hash(params: &ModelParams) -> String {
    let mut h = Sha256::new();
    for x in params.eps.iter().chain(&params.hopping).chain(std::iter::once(&params.interaction)) {
        h.update(x.to_bits().to_le_bytes());
    }
    let digest = h.finalize();
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

fn evolve_realization(
    config: &ExperimentConfig,
    lattice: &LatticeSpec,
    params: &ModelParams,
    states: &[TwoBosonState],
    times: &[f64],
) -> std::result::Result<Vec<StateOutcome>, String> {
    let h = build_hamiltonian(lattice, params).map_err(|e| e.to_string())?;
    let asym = h.asymmetry();
    if asym != 0.0 {
        return Err(format!("Hamiltonian not symmetric: {asym:e}"));
    }
    let prop = SpectralPropagator::new(&h).map_err(|e| e.to_string())?;
    let probe = prop.probe_residual(&h);
    if !(probe <= PROBE_TOL) {
        return Err(format!("eigendecomposition probe residual {probe:e}"));
    }
    let mut outcomes = Vec::with_capacity(states.len());
    for (si, s0) in states.iter().enumerate() {
        let traj = prop.evolve_many(s0, times).map_err(|e| e.to_string())?;
        let mut pr = Vec::with_capacity(times.len());
        let mut dens = Vec::with_capacity(times.len());
        let mut max_leakage = 0.0f64;
        for (k, st) in traj.iter().enumerate() {
            let norm = st.norm_sq();
            if !((norm - 1.0).abs() <= NORM_TOL) {
                return Err(format!("state {si}: norm drift {:e} at t = {}", norm - 1.0, times[k]));
            }
            let p = density(st);
            let gsum = 2.0 * norm;
            if !((gsum - 2.0).abs() <= GAMMA_SUM_TOL) {
                return Err(format!("state {si}: Gamma sum {gsum} at t = {}", times[k]));
            }
            pr.push(participation_ratio(&p).map_err(|e| e.to_string())?);
            max_leakage = max_leakage.max(boundary_leakage(&p, config.leakage_margin).map_err(|e| e.to_string())?);
            dens.push(p.0);
        }
        let gamma_final = correlation(traj.last().expect("at least two samples"));
        outcomes.push(StateOutcome {
            pr,
            density: dens,
            gamma_final,
            max_leakage,
        });
    }
    Ok(outcomes)
}

fn mean_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Runs the full ensemble and returns the in-memory result without writing
/// anything.
///
/// Work items are (U, realization) pairs evaluated on a pool of `threads`
/// workers; every item depends only on its substream, and results are merged
/// in (U index, realization index) order, so the output is bit-identical for
/// any thread count.
pub fn compute_ensemble(config: &ExperimentConfig, threads: usize) -> Result<EnsembleResult> {
    config.validate()?;
    let started = Instant::now();
    let lattice = config.lattice()?;
    let states = config.build_states()?;
    let plan = config.seed_plan()?;
    let times = config.time.times();
    let l = lattice.sites();
    let n_states = states.len();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut warnings = Vec::new();
    if config.feasibility_warnings {
        for &u in &config.u_values {
            for w in check_feasibility(&config.disorder, u) {
                let msg = format!("U = {u}: {w}");
                warn!("{msg}");
                warnings.push(msg);
            }
        }
    }

    let mut cells: Vec<Vec<CellResult>> = (0..n_states).map(|_| Vec::new()).collect();
    let mut realizations = Vec::new();
    let mut failures = Vec::new();

    for (ui, &u) in config.u_values.iter().enumerate() {
        let outcomes: Vec<WorkOutcome> = pool.install(|| {
            (0..plan.realization_count)
                .into_par_iter()
                .map(|r| {
                    let substream = plan.substream(r);
                    let sampled = sample_realization(&config.disorder, &lattice, u, substream);
                    let (hash, result) = match sampled {
                        Ok(params) => (params_hash(&params), evolve_realization(config, &lattice, &params, &states, &times)),
                        Err(e) => (String::new(), Err(e.to_string())),
                    };
                    WorkOutcome {
                        record: RealizationRecord {
                            u_index: ui,
                            interaction: u,
                            realization: r,
                            substream,
                            params_hash: hash,
                            pr: Vec::new(),
                        },
                        result,
                    }
                })
                .collect()
        });

        let ok: Vec<&Vec<StateOutcome>> = outcomes.iter().filter_map(|o| o.result.as_ref().ok()).collect();
        for o in &outcomes {
            if let Err(reason) = &o.result {
                warn!("U = {u}, realization {}: {reason}", o.record.realization);
                failures.push(FailureRecord {
                    u_index: ui,
                    interaction: u,
                    realization: o.record.realization,
                    params_hash: o.record.params_hash.clone(),
                    reason: reason.clone(),
                });
            }
        }

        for (si, cells_for_state) in cells.iter_mut().enumerate() {
            let n = ok.len();
            let mut pr_mean = Vec::with_capacity(times.len());
            let mut pr_stderr = Vec::with_capacity(times.len());
            let mut pr_of_mean_density = Vec::with_capacity(times.len());
            for k in 0..times.len() {
                let (m, e) = mean_stderr(ok.iter().map(|o| o[si].pr[k]));
                pr_mean.push(m);
                pr_stderr.push(e);
                let mut mean_p = vec![0.0; l];
                for o in &ok {
                    for (a, b) in mean_p.iter_mut().zip(&o[si].density[k]) {
                        *a += b / n as f64;
                    }
                }
                let sum: f64 = mean_p.iter().sum();
                let sum_sq: f64 = mean_p.iter().map(|p| p * p).sum();
                pr_of_mean_density.push(if sum_sq > 0.0 { sum * sum / sum_sq } else { f64::NAN });
            }
            let mut gamma_final = CorrelationMatrix::zeros(l);
            let mut density_final = vec![0.0; l];
            for o in &ok {
                gamma_final.accumulate(&o[si].gamma_final, 1.0 / n as f64);
                for (a, b) in density_final.iter_mut().zip(o[si].density.last().expect("samples")) {
                    *a += b / n as f64;
                }
            }
            let leak = ok.iter().map(|o| o[si].max_leakage);
            let leakage_mean_max = if n > 0 { leak.clone().sum::<f64>() / n as f64 } else { f64::NAN };
            let leakage_max = leak.clone().fold(0.0f64, f64::max);
            let leakage_exceeded = leak.filter(|&x| x > LEAKAGE_THRESHOLD).count();
            if leakage_exceeded > 0 {
                let msg = format!(
                    "state '{}', U = {u}: {leakage_exceeded}/{n} realizations put more than {LEAKAGE_THRESHOLD:e} of the density on the {} edge sites (max {leakage_max:.3e})",
                    config.initial_states[si].name, config.leakage_margin
                );
                warn!("{msg}");
                warnings.push(msg);
            }
            cells_for_state.push(CellResult {
                state: config.initial_states[si].name.clone(),
                state_index: si,
                u_index: ui,
                interaction: u,
                n_realizations: n,
                pr_mean,
                pr_stderr,
                pr_of_mean_density,
                density_final,
                gamma_final,
                leakage_mean_max,
                leakage_max,
                leakage_exceeded,
            });
        }

        for o in outcomes {
            let mut record = o.record;
            if let Ok(states) = o.result {
                record.pr = states.into_iter().map(|s| s.pr).collect();
            }
            realizations.push(record);
        }
    }

    Ok(EnsembleResult {
        config: config.clone(),
        times,
        cells: cells.into_iter().flatten().collect(),
        realizations,
        failures,
        warnings,
        version: env!("CARGO_PKG_VERSION"),
        wall_time: started.elapsed(),
    })
}
