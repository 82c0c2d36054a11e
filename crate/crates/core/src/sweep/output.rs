use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;

use crate::disorder::sample_realization;
use crate::error::{Error, Result};
use crate::sweep::config::{ExperimentConfig, Observable};
use crate::sweep::run::{compute_ensemble, EnsembleResult};
use crate::waveguide::{design_array, ArrayDesign};

/// Decimal rendering with 12 significant digits, trailing zeros trimmed.
/// Fixed notation for exponents in [−5, 12), scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents)?;
    written.push(path);
    Ok(())
}

/// Creates `dir` and checks it accepts files.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let probe = dir.join(".write_probe");
    fs::write(&probe, b"")?;
    fs::remove_file(&probe)?;
    Ok(())
}

/// Design of realization 0 at every U of the grid.
pub fn designs(config: &ExperimentConfig) -> Result<Vec<(f64, ArrayDesign)>> {
    let lattice = config.lattice()?;
    let plan = config.seed_plan()?;
    config
        .u_values
        .iter()
        .map(|&u| {
            let params = sample_realization(&config.disorder, &lattice, u, plan.substream(0))?;
            Ok((u, design_array(&lattice, &params)?))
        })
        .collect()
}

pub fn write_designs(config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    let mut written = Vec::new();
    for (ui, (u, design)) in designs(config)?.into_iter().enumerate() {
        let doc = json!({
            "schema": "bosonloc.array_design/1",
            "config": config.name,
            "realization": 0,
            "base_seed": config.seeds.base_seed,
            "interaction": u,
            "design": design,
        });
        let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))? + "\n";
        write_file(dir, &format!("design_u{ui:02}.json"), &text, &mut written)?;
    }
    Ok(written)
}

/// Writes the tables selected by the config plus `summary.json`.
///
/// Every file is a pure function of the result's deterministic content; wall
/// time and thread count are deliberately left out so reruns are
/// byte-identical.
pub fn emit_outputs(result: &EnsembleResult, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    let config = &result.config;
    let lattice = config.lattice()?;
    let mut written = Vec::new();
    let t_final = *result.times.last().expect("time samples");

    if config.wants(Observable::Pr) {
        let mut s = String::from("state,U,t,mean_PR,stderr_PR,n_realizations\n");
        for c in &result.cells {
            let k = result.times.len() - 1;
            writeln!(
                s,
                "{},{},{},{},{},{}",
                c.state,
                fmt_num(c.interaction),
                fmt_num(t_final),
                fmt_num(c.pr_mean[k]),
                fmt_num(c.pr_stderr[k]),
                c.n_realizations
            )
            .unwrap();
        }
        write_file(dir, "pr_vs_u.csv", &s, &mut written)?;

        let mut s = String::from("state,U,t,mean_PR,stderr_PR,n_realizations,PR_of_mean_density\n");
        for c in &result.cells {
            for (k, &t) in result.times.iter().enumerate() {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{}",
                    c.state,
                    fmt_num(c.interaction),
                    fmt_num(t),
                    fmt_num(c.pr_mean[k]),
                    fmt_num(c.pr_stderr[k]),
                    c.n_realizations,
                    fmt_num(c.pr_of_mean_density[k])
                )
                .unwrap();
            }
        }
        write_file(dir, "pr_vs_t.csv", &s, &mut written)?;
    }

    if config.wants(Observable::Gamma) {
        let mut s = String::from("state,U,j,k,mean_Gamma\n");
        for c in &result.cells {
            for j in 0..lattice.sites() {
                for k in 0..lattice.sites() {
                    writeln!(
                        s,
                        "{},{},{},{},{}",
                        c.state,
                        fmt_num(c.interaction),
                        lattice.label_of(j),
                        lattice.label_of(k),
                        fmt_num(c.gamma_final.get(j, k))
                    )
                    .unwrap();
                }
            }
        }
        write_file(dir, "gamma_final.csv", &s, &mut written)?;
    }

    if config.wants(Observable::Density) {
        let mut s = String::from("state,U,j,mean_P\n");
        for c in &result.cells {
            for (j, p) in c.density_final.iter().enumerate() {
                writeln!(s, "{},{},{},{}", c.state, fmt_num(c.interaction), lattice.label_of(j), fmt_num(*p)).unwrap();
            }
        }
        write_file(dir, "density_final.csv", &s, &mut written)?;
    }

    if config.wants(Observable::Leakage) {
        let mut s = String::from("state,U,margin,mean_max_leakage,max_leakage,n_above_threshold,n_realizations\n");
        for c in &result.cells {
            writeln!(
                s,
                "{},{},{},{},{},{},{}",
                c.state,
                fmt_num(c.interaction),
                config.leakage_margin,
                fmt_num(c.leakage_mean_max),
                fmt_num(c.leakage_max),
                c.leakage_exceeded,
                c.n_realizations
            )
            .unwrap();
        }
        write_file(dir, "leakage.csv", &s, &mut written)?;
    }

    if config.wants(Observable::Realizations) {
        let mut s = String::from("state,U,realization,stream,params_hash,t,PR\n");
        for (si, st) in config.initial_states.iter().enumerate() {
            for r in &result.realizations {
                let Some(pr) = r.pr.get(si) else { continue };
                for (k, &t) in result.times.iter().enumerate() {
                    writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        st.name,
                        fmt_num(r.interaction),
                        r.realization,
                        r.substream.stream,
                        r.params_hash,
                        fmt_num(t),
                        fmt_num(pr[k])
                    )
                    .unwrap();
                }
            }
        }
        write_file(dir, "realizations.csv", &s, &mut written)?;
    }

    if config.export_design {
        written.extend(write_designs(config, &dir.join("design"))?);
    }

    // the echo leaves out the destination so that identical runs written to
    // different directories still match
    let echo = ExperimentConfig {
        output_dir: None,
        ..config.clone()
    };
    let summary = json!({
        "schema": "bosonloc.summary/1",
        "version": result.version,
        "config": echo,
        "base_seed": config.seeds.base_seed,
        "rng": "ChaCha8, seeded from base_seed, stream = realization index",
        "time_samples": result.times.len(),
        "t_final": t_final,
        "cells": result.cells.iter().map(|c| json!({
            "state": c.state,
            "U": c.interaction,
            "n_realizations": c.n_realizations,
            "final_mean_PR": c.pr_mean.last(),
            "final_stderr_PR": c.pr_stderr.last(),
            "final_gamma_diagonal_weight": c.gamma_final.diagonal_weight(),
        })).collect::<Vec<_>>(),
        "realizations": result.realizations,
        "failures": result.failures,
        "warnings": result.warnings,
    });
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))? + "\n";
    write_file(dir, "summary.json", &text, &mut written)?;
    Ok(written)
}

/// Validates, computes and writes; the output directory is checked before
/// any computation starts.
pub fn run_experiment(config: &ExperimentConfig, threads: usize) -> Result<EnsembleResult> {
    config.validate()?;
    let dir = config.output_dir();
    prepare_output_dir(&dir)?;
    let result = compute_ensemble(config, threads)?;
    emit_outputs(&result, &dir)?;
    Ok(result)
}
