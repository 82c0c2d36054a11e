//! The square waveguide-array picture of the two-boson problem.
//!
//! Waveguide `(n, m)` carries the classical field c_{n,m}. Its propagation
//! constant is ε_n + ε_m, shifted by U on the diagonal, and it couples to its
//! four neighbours with the chain couplings J. Propagation here integrates
//! the coupled-mode equations directly on the grid and shares no code with
//! the pair-basis eigensolver path.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::disorder::DisorderSpec;
use crate::error::{Error, Result};
use crate::model::{AmplitudeGrid, LatticeSpec, ModelParams, TwoBosonState};
use crate::propagator::TimeGrid;

/// Cited fabrication record for Δε/ε̄.
pub const MAX_DIAGONAL_DISORDER_RATIO: f64 = 3.0;
/// Cited fabrication record for ΔJ/J̄.
pub const MAX_OFF_DIAGONAL_DISORDER_RATIO: f64 = 0.91;
/// Cited fabrication record for |U|/J̄.
pub const MAX_INTERACTION_RATIO: f64 = 20.0;

/// Dimensionless design of an L×L array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayDesign {
    pub sites: usize,
    /// Label of row/column 0.
    pub first_label: i64,
    pub interaction: f64,
    /// β_{n,m}, row-major L×L.
    pub propagation: Vec<Vec<f64>>,
    /// Coupling between waveguides (n, m) and (n+1, m); (L−1)×L.
    pub row_coupling: Vec<Vec<f64>>,
    /// Coupling between waveguides (n, m) and (n, m+1); L×(L−1).
    pub column_coupling: Vec<Vec<f64>>,
    /// Whether the design is invariant under reflection about the diagonal.
    pub mirror_symmetric: bool,
}

impl ArrayDesign {
    /// Maximal violation of the diagonal reflection symmetry.
    pub fn mirror_defect(&self) -> f64 {
        let l = self.sites;
        let mut worst = 0.0f64;
        for n in 0..l {
            for m in 0..l {
                worst = worst.max((self.propagation[n][m] - self.propagation[m][n]).abs());
                if n + 1 < l {
                    worst = worst.max((self.row_coupling[n][m] - self.column_coupling[m][n]).abs());
                }
            }
        }
        worst
    }

    /// Gershgorin bound on the spectral radius of the coupled-mode operator.
    fn operator_bound(&self) -> f64 {
        let l = self.sites;
        let mut bound = 0.0f64;
        for n in 0..l {
            for m in 0..l {
                let mut row = self.propagation[n][m].abs();
                if n > 0 {
                    row += self.row_coupling[n - 1][m].abs();
                }
                if n + 1 < l {
                    row += self.row_coupling[n][m].abs();
                }
                if m > 0 {
                    row += self.column_coupling[n][m - 1].abs();
                }
                if m + 1 < l {
                    row += self.column_coupling[n][m].abs();
                }
                bound = bound.max(row);
            }
        }
        bound
    }

    /// −i times the coupled-mode operator applied to `field`.
    fn derivative(&self, field: &AmplitudeGrid, out: &mut AmplitudeGrid) {
        let l = self.sites;
        for n in 0..l {
            for m in 0..l {
                let mut acc = field.get(n, m) * self.propagation[n][m];
                if n > 0 {
                    acc -= field.get(n - 1, m) * self.row_coupling[n - 1][m];
                }
                if n + 1 < l {
                    acc -= field.get(n + 1, m) * self.row_coupling[n][m];
                }
                if m > 0 {
                    acc -= field.get(n, m - 1) * self.column_coupling[n][m - 1];
                }
                if m + 1 < l {
                    acc -= field.get(n, m + 1) * self.column_coupling[n][m];
                }
                out.set(n, m, Complex64::new(acc.im, -acc.re));
            }
        }
    }
}

/// Translates one Hamiltonian realization into waveguide parameters.
pub fn design_array(lattice: &LatticeSpec, params: &ModelParams) -> Result<ArrayDesign> {
    params.check_shape(lattice)?;
    let l = lattice.sites();
    let propagation = (0..l)
        .map(|n| {
            (0..l)
                .map(|m| params.eps[n] + params.eps[m] + if n == m { params.interaction } else { 0.0 })
                .collect()
        })
        .collect();
    let row_coupling = (0..l - 1).map(|n| vec![params.hopping[n]; l]).collect();
    let column_coupling = (0..l).map(|_| params.hopping.clone()).collect();
    let mut design = ArrayDesign {
        sites: l,
        first_label: lattice.label_of(0),
        interaction: params.interaction,
        propagation,
        row_coupling,
        column_coupling,
        mirror_symmetric: false,
    };
    design.mirror_symmetric = design.mirror_defect() == 0.0;
    Ok(design)
}

/// Stepping controls for [`propagate_grid`].
const STEP_RADIUS: f64 = 2.0;
const TAYLOR_TOL: f64 = 1e-17;

fn taylor_order(x: f64) -> usize {
    let mut term = 1.0;
    let mut k = 0usize;
    while term > TAYLOR_TOL || k < 4 {
        k += 1;
        term *= x / k as f64;
    }
    k
}

/// Propagates classical fields through the array, returning the field at
/// every sample of `grid`.
///
/// Uses truncated Taylor steps of exp(−i H h) with h chosen so that
/// ‖H‖ h ≤ 2 and the series cut once the x^k/k! bound drops below 1e−17.
pub fn propagate_grid(design: &ArrayDesign, input: &TwoBosonState, grid: &TimeGrid) -> Result<Vec<AmplitudeGrid>> {
    grid.validate()?;
    if input.sites() != design.sites {
        return Err(Error::Shape {
            what: "input sites",
            expected: design.sites,
            got: input.sites(),
        });
    }
    input.ensure_normalized()?;

    let bound = design.operator_bound();
    let spacing = grid.spacing();
    let substeps = ((bound * spacing) / STEP_RADIUS).ceil().max(1.0) as usize;
    let h = spacing / substeps as f64;
    let order = taylor_order(bound * h);

    let l = design.sites;
    let mut field = input.amplitudes().clone();
    let mut term = AmplitudeGrid::zeros(l);
    let mut next = AmplitudeGrid::zeros(l);
    let mut out = Vec::with_capacity(grid.samples);
    out.push(field.clone());
    for _ in 1..grid.samples {
        for _ in 0..substeps {
            term.as_mut_slice().copy_from_slice(field.as_slice());
            let mut acc = field.clone();
            for k in 1..=order {
                design.derivative(&term, &mut next);
                let f = h / k as f64;
                for (t, n) in term.as_mut_slice().iter_mut().zip(next.as_slice()) {
                    *t = n * f;
                }
                for (a, t) in acc.as_mut_slice().iter_mut().zip(term.as_slice()) {
                    *a += t;
                }
            }
            field = acc;
        }
        out.push(field.clone());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeasibilityKind {
    DiagonalDisorder,
    OffDiagonalDisorder,
    Interaction,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityWarning {
    pub kind: FeasibilityKind,
    pub ratio: f64,
    pub limit: f64,
}

impl fmt::Display for FeasibilityWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            FeasibilityKind::DiagonalDisorder => "diagonal disorder eps_spread/eps_mean",
            FeasibilityKind::OffDiagonalDisorder => "off-diagonal disorder hopping_spread/hopping_mean",
            FeasibilityKind::Interaction => "interaction |U|/hopping_mean",
        };
        write!(f, "{what} = {} exceeds demonstrated value {}", self.ratio, self.limit)
    }
}

/// Flags parameters beyond what has been fabricated; never rejects.
pub fn check_feasibility(spec: &DisorderSpec, interaction: f64) -> Vec<FeasibilityWarning> {
    let ratio = |num: f64, den: f64| if num == 0.0 { 0.0 } else if den == 0.0 { f64::INFINITY } else { num / den };
    let checks = [
        (FeasibilityKind::DiagonalDisorder, ratio(spec.eps_spread, spec.eps_mean), MAX_DIAGONAL_DISORDER_RATIO),
        (
            FeasibilityKind::OffDiagonalDisorder,
            ratio(spec.hopping_spread, spec.hopping_mean),
            MAX_OFF_DIAGONAL_DISORDER_RATIO,
        ),
        (FeasibilityKind::Interaction, ratio(interaction.abs(), spec.hopping_mean), MAX_INTERACTION_RATIO),
    ];
    checks
        .into_iter()
        .filter(|(_, r, limit)| r > limit)
        .map(|(kind, ratio, limit)| FeasibilityWarning { kind, ratio, limit })
        .collect()
}
