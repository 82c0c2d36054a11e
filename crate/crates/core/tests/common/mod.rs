//! Test-only oracles that share no code with the library's propagation or
//! observable paths.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bosonloc::model::{AmplitudeGrid, LatticeSpec, ModelParams, Statistics, TwoBosonState};
use num_complex::Complex64;
use rand::Rng;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// Sparse second-quantized state: occupation numbers → amplitude.
#[derive(Debug, Clone, Default)]
pub struct Fock {
    pub sites: usize,
    pub terms: BTreeMap<Vec<u8>, C>,
}

impl Fock {
    pub fn vacuum(sites: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0; sites], c(1.0, 0.0));
        Self { sites, terms }
    }

    fn empty(sites: usize) -> Self {
        Self {
            sites,
            terms: BTreeMap::new(),
        }
    }

    fn add(&mut self, occ: Vec<u8>, amp: C) {
        *self.terms.entry(occ).or_insert(c(0.0, 0.0)) += amp;
    }

    pub fn plus(&self, other: &Fock, scale: C) -> Fock {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add(k.clone(), v * scale);
        }
        out
    }

    pub fn scaled(&self, s: C) -> Fock {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= s;
        }
        out
    }

    /// a_j†: |..n_j..⟩ → √(n_j+1) |..n_j+1..⟩.
    pub fn create(&self, j: usize) -> Fock {
        let mut out = Fock::empty(self.sites);
        for (occ, amp) in &self.terms {
            let mut o = occ.clone();
            let n = o[j] as f64;
            o[j] += 1;
            out.add(o, amp * (n + 1.0).sqrt());
        }
        out
    }

    /// a_j: |..n_j..⟩ → √n_j |..n_j−1..⟩.
    pub fn annihilate(&self, j: usize) -> Fock {
        let mut out = Fock::empty(self.sites);
        for (occ, amp) in &self.terms {
            if occ[j] == 0 {
                continue;
            }
            let mut o = occ.clone();
            let n = o[j] as f64;
            o[j] -= 1;
            out.add(o, amp * n.sqrt());
        }
        out
    }

    pub fn norm_sq(&self) -> f64 {
        self.terms.values().map(|z| z.norm_sqr()).sum()
    }

    pub fn max_diff(&self, other: &Fock) -> f64 {
        let diff = self.plus(other, c(-1.0, 0.0));
        diff.terms.values().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// |ψ⟩ = (1/√2) Σ_{n,m} c_{n,m} a_n† a_m† |0⟩, built operator by operator.
pub fn fock_from_grid(grid: &AmplitudeGrid) -> Fock {
    let l = grid.sites();
    let vac = Fock::vacuum(l);
    let mut psi = Fock::empty(l);
    for n in 0..l {
        for m in 0..l {
            let amp = grid.get(n, m);
            if amp != c(0.0, 0.0) {
                psi = psi.plus(&vac.create(m).create(n), amp / 2f64.sqrt());
            }
        }
    }
    psi
}

/// Bose-Hubbard operator applied term by term:
/// Σ ε_j n_j − Σ J_j (a_j† a_{j+1} + a_{j+1}† a_j) + (U/2) Σ a_j† a_j† a_j a_j.
pub fn fock_apply_h(params: &ModelParams, psi: &Fock) -> Fock {
    let l = psi.sites;
    let mut out = Fock::empty(l);
    for j in 0..l {
        out = out.plus(&psi.annihilate(j).create(j), c(params.eps[j], 0.0));
        out = out.plus(
            &psi.annihilate(j).annihilate(j).create(j).create(j),
            c(params.interaction / 2.0, 0.0),
        );
    }
    for j in 0..l - 1 {
        let hop = psi.annihilate(j + 1).create(j).plus(&psi.annihilate(j).create(j + 1), c(1.0, 0.0));
        out = out.plus(&hop, c(-params.hopping[j], 0.0));
    }
    out
}

/// Γ_{j,k} = ⟨a_j† a_k† a_k a_j⟩ = ‖a_k a_j ψ‖².
pub fn fock_gamma(psi: &Fock, j: usize, k: usize) -> f64 {
    psi.annihilate(j).annihilate(k).norm_sq()
}

/// ⟨n_j⟩ / 2.
pub fn fock_half_density(psi: &Fock, j: usize) -> f64 {
    psi.annihilate(j).norm_sq() / 2.0
}

pub fn random_symmetric_grid(sites: usize, rng: &mut impl Rng) -> AmplitudeGrid {
    let mut g = AmplitudeGrid::zeros(sites);
    for n in 0..sites {
        for m in n..sites {
            let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            g.set(n, m, z);
            g.set(m, n, z);
        }
    }
    let norm = g.norm_sq().sqrt();
    g.scale(c(1.0 / norm, 0.0));
    g
}

pub fn random_state(lattice: &LatticeSpec, rng: &mut impl Rng) -> TwoBosonState {
    TwoBosonState::new(random_symmetric_grid(lattice.sites(), rng), Statistics::Bosonic).unwrap()
}

/// Random physical parameters: ε ∈ (0, 4), J ∈ (0.2, 1.8), U ∈ [−20, 20].
pub fn random_params(lattice: &LatticeSpec, rng: &mut impl Rng) -> ModelParams {
    let l = lattice.sites();
    let eps = (0..l).map(|_| rng.random_range(0.01..4.0)).collect();
    let hop = (0..l - 1).map(|_| rng.random_range(0.2..1.8)).collect();
    ModelParams::physical(lattice, eps, hop, rng.random_range(-20.0..=20.0)).unwrap()
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<C>,
}

impl Dense {
    pub fn identity(n: usize) -> Self {
        let mut a = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            a[i * n + i] = c(1.0, 0.0);
        }
        Self { n, a }
    }

    pub fn from_real(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self {
            n,
            a: (0..n * n).map(|k| c(f(k / n, k % n), 0.0)).collect(),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.a[i * self.n + j]
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let n = self.n;
        let mut a = vec![c(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                for j in 0..n {
                    a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        Dense { n, a }
    }

    pub fn scale(&self, s: C) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, o: &Dense) -> Dense {
        Dense {
            n: self.n,
            a: self.a.iter().zip(&o.a).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn apply(&self, v: &[C]) -> Vec<C> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i * self.n + j] * v[j]).sum())
            .collect()
    }

    fn max_abs_row_sum(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.a[i * self.n + j].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// exp(−i H t) by scaling and squaring a 20-term Taylor series.
pub fn expm_minus_i(h: &Dense, t: f64) -> Dense {
    let a = h.scale(c(0.0, -t));
    let norm = a.max_abs_row_sum();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let a = a.scale(c(0.5f64.powi(squarings as i32), 0.0));
    let mut sum = Dense::identity(h.n);
    let mut term = Dense::identity(h.n);
    for k in 1..=20 {
        term = term.mul(&a).scale(c(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
    }
    for _ in 0..squarings {
        sum = sum.mul(&sum);
    }
    sum
}

/// Single-particle tight-binding matrix of a chain.
pub fn single_particle_h(params: &ModelParams) -> Dense {
    let l = params.sites();
    Dense::from_real(l, |i, j| {
        if i == j {
            params.eps[i]
        } else if j == i + 1 {
            -params.hopping[i]
        } else if i == j + 1 {
            -params.hopping[j]
        } else {
            0.0
        }
    })
}

/// U = 0 evolution as two independent walkers: c(t) = u c(0) uᵀ.
pub fn product_walk(params: &ModelParams, c0: &AmplitudeGrid, t: f64) -> AmplitudeGrid {
    let u = expm_minus_i(&single_particle_h(params), t);
    let l = c0.sites();
    let mut tmp = vec![c(0.0, 0.0); l * l];
    for n in 0..l {
        for b in 0..l {
            tmp[n * l + b] = (0..l).map(|a| u.get(n, a) * c0.get(a, b)).sum();
        }
    }
    AmplitudeGrid::from_fn(l, |n, m| (0..l).map(|b| tmp[n * l + b] * u.get(m, b)).sum())
}

/// Written straight to stderr so the line survives libtest output capture.
pub fn pass_line(criterion: &str, passed: bool, detail: &str) {
    use std::io::Write;
    let tag = if passed { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stderr(), "\n[{tag}] {criterion}: {detail}");
}
