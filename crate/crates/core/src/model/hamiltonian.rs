use std::f64::consts::SQRT_2;

use faer::Mat;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{AmplitudeGrid, LatticeSpec, ModelParams, PairBasis, ReducedState, TwoBosonState};

/// Real symmetric two-boson Hamiltonian in the symmetric pair basis.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    basis: PairBasis,
    matrix: Mat<f64>,
}

impl HamiltonianMatrix {
    pub fn basis(&self) -> PairBasis {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn as_mat(&self) -> &Mat<f64> {
        &self.matrix
    }

    /// max |H_ij − H_ji|.
    pub fn asymmetry(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in (i + 1)..d {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn apply(&self, v: &ReducedState) -> ReducedState {
        let d = self.dim();
        let x = v.coeffs();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (i, o) in out.iter_mut().enumerate() {
            let row = self.matrix.row(i);
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, xj) in x.iter().enumerate() {
                let h = row[j];
                if h != 0.0 {
                    acc += xj * h;
                }
            }
            *o = acc;
        }
        ReducedState::from_coeffs(self.basis, out).expect("dimension preserved")
    }

    /// ⟨ψ|H|ψ⟩ for a bosonic state.
    pub fn expectation(&self, state: &TwoBosonState) -> Result<f64> {
        let v = ReducedState::from_state(state)?;
        let hv = self.apply(&v);
        Ok(v.coeffs()
            .iter()
            .zip(hv.coeffs())
            .map(|(a, b)| (a.conj() * b).re)
            .sum())
    }
}

/// Assembles the Bose-Hubbard Hamiltonian over pairs n ≤ m.
///
/// Diagonal: ε_n + ε_m + U δ_nm. A hop of either particle between
/// neighbouring sites couples two pairs with −J, enhanced to −√2 J when one
/// side of the hop is a doubly occupied site.
pub fn build_hamiltonian(lattice: &LatticeSpec, params: &ModelParams) -> Result<HamiltonianMatrix> {
    params.check_shape(lattice)?;
    let l = lattice.sites();
    let basis = PairBasis::new(l);
    let d = basis.dim();
    let mut h = Mat::<f64>::zeros(d, d);

    for (n, m) in basis.pairs() {
        let i = basis.index(n, m);
        h[(i, i)] = params.eps[n] + params.eps[m] + if n == m { params.interaction } else { 0.0 };

        // Only rightward hops are enumerated, so every bond of the pair
        // graph is visited exactly once.
        if m + 1 < l {
            connect(&mut h, &basis, (n, m), (n, m + 1), params.hopping[m]);
        }
        if n < m {
            connect(&mut h, &basis, (n, m), (n + 1, m), params.hopping[n]);
        }
    }
    Ok(HamiltonianMatrix { basis, matrix: h })
}

fn connect(h: &mut Mat<f64>, basis: &PairBasis, a: (usize, usize), b: (usize, usize), hop: f64) {
    let doubly = a.0 == a.1 || b.0 == b.1;
    let amp = if doubly { -SQRT_2 * hop } else { -hop };
    let i = basis.index(a.0, a.1);
    let j = basis.index(b.0, b.1);
    h[(i, j)] += amp;
    h[(j, i)] += amp;
}

/// Right-hand side of i ċ = H c evaluated directly on the L×L amplitude grid
/// with open boundaries.
pub fn apply_hamiltonian_grid(params: &ModelParams, grid: &AmplitudeGrid) -> Result<AmplitudeGrid> {
    let l = params.sites();
    if grid.sites() != l {
        return Err(Error::Shape {
            what: "grid sites",
            expected: l,
            got: grid.sites(),
        });
    }
    params.check_shape(&params.lattice())?;
    let j = &params.hopping;
    let mut out = AmplitudeGrid::zeros(l);
    for n in 0..l {
        for m in 0..l {
            let onsite = params.eps[n] + params.eps[m] + if n == m { params.interaction } else { 0.0 };
            let mut acc = grid.get(n, m) * onsite;
            if n > 0 {
                acc -= grid.get(n - 1, m) * j[n - 1];
            }
            if n + 1 < l {
                acc -= grid.get(n + 1, m) * j[n];
            }
            if m > 0 {
                acc -= grid.get(n, m - 1) * j[m - 1];
            }
            if m + 1 < l {
                acc -= grid.get(n, m + 1) * j[m];
            }
            out.set(n, m, acc);
        }
    }
    Ok(out)
}
