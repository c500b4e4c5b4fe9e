//! Rydberg Hamiltonian
//!
//! ```text
//! H = Σ_{j<k} U_jk n_j n_k - (δ/2) Σ_j σᶻ_j + (Ω/2) Σ_j σˣ_j      (ħ = 1)
//! ```
//!
//! with `n = (σᶻ + 1)/2`, so `σᶻ = +1` on the Rydberg state. In graph mode
//! `U_jk = U` on edges and zero elsewhere; in physical mode every pair
//! couples with `C6 / d_jk⁶`.
//!
//! Basis index bit `N - j` holds atom `j`, i.e. atom 1 is the most
//! significant bit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::AtomArray;
use crate::graph::Graph;

/// Hard cap on atoms held in a dense state vector.
pub const MAX_ATOMS: usize = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Graph,
    Physical,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Graph => "graph",
            Mode::Physical => "physical",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Interaction {
    /// Uniform `U` on graph edges.
    Graph { graph: Graph, u: f64 },
    /// Full pairwise van der Waals tails from positions.
    Physical { array: AtomArray, c6_over_hbar: f64 },
}

/// Interaction part of the Hamiltonian and the atom count it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec {
    interaction: Interaction,
}

impl HamiltonianSpec {
    pub fn graph(graph: &Graph, u: f64) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::Configuration(format!(
                "graph-mode interaction U = {u} must be positive"
            )));
        }
        check_size(graph.n_vertices())?;
        Ok(HamiltonianSpec {
            interaction: Interaction::Graph {
                graph: graph.clone(),
                u,
            },
        })
    }

    pub fn physical(array: &AtomArray, c6_over_hbar: f64) -> Result<Self> {
        if !(c6_over_hbar > 0.0 && c6_over_hbar.is_finite()) {
            return Err(Error::Configuration(format!(
                "C6/hbar = {c6_over_hbar} must be positive"
            )));
        }
        check_size(array.len())?;
        Ok(HamiltonianSpec {
            interaction: Interaction::Physical {
                array: array.clone(),
                c6_over_hbar,
            },
        })
    }

    /// Picks the interaction for `mode`, checking that the data fits.
    pub fn for_mode(
        mode: Mode,
        graph: &Graph,
        array: Option<&AtomArray>,
        u: f64,
        c6_over_hbar: f64,
    ) -> Result<Self> {
        match (mode, array) {
            (Mode::Graph, _) => HamiltonianSpec::graph(graph, u),
            (Mode::Physical, None) => Err(Error::Configuration(
                "physical mode needs atom positions".into(),
            )),
            (Mode::Physical, Some(arr)) if arr.len() != graph.n_vertices() => {
                Err(Error::Configuration(format!(
                    "array has {} atoms but the graph has {} vertices",
                    arr.len(),
                    graph.n_vertices()
                )))
            }
            (Mode::Physical, Some(arr)) => HamiltonianSpec::physical(arr, c6_over_hbar),
        }
    }

    pub fn interaction(&self) -> &Interaction {
        &self.interaction
    }

    pub fn mode(&self) -> Mode {
        match self.interaction {
            Interaction::Graph { .. } => Mode::Graph,
            Interaction::Physical { .. } => Mode::Physical,
        }
    }

    pub fn n_atoms(&self) -> usize {
        match &self.interaction {
            Interaction::Graph { graph, .. } => graph.n_vertices(),
            Interaction::Physical { array, .. } => array.len(),
        }
    }

    /// Same interaction model on displaced atoms; graph mode is unchanged.
    pub fn with_displacements(&self, delta: &[[f64; 3]]) -> Self {
        match &self.interaction {
            Interaction::Graph { .. } => self.clone(),
            Interaction::Physical {
                array,
                c6_over_hbar,
            } => HamiltonianSpec {
                interaction: Interaction::Physical {
                    array: array.displaced(delta),
                    c6_over_hbar: *c6_over_hbar,
                },
            },
        }
    }

    /// Nonzero couplings `(j, k, U_jk)` with 1-based `j < k`.
    pub fn couplings(&self) -> Vec<(usize, usize, f64)> {
        match &self.interaction {
            Interaction::Graph { graph, u } => graph.edges().map(|(j, k)| (j, k, *u)).collect(),
            Interaction::Physical {
                array,
                c6_over_hbar,
            } => {
                let n = array.len();
                (1..=n)
                    .flat_map(|j| (j + 1..=n).map(move |k| (j, k)))
                    .map(|(j, k)| (j, k, c6_over_hbar / array.distance(j, k).powi(6)))
                    .collect()
            }
        }
    }

    /// Largest single pair coupling.
    pub fn max_coupling(&self) -> f64 {
        self.couplings().iter().map(|c| c.2).fold(0.0, f64::max)
    }

    /// Graph mode needs `U > |Δ_f|` for the ground state to be the MIS.
    pub fn check_detuning(&self, delta_f: f64) -> Result<()> {
        if let Interaction::Graph { u, .. } = &self.interaction {
            if *u <= delta_f.abs() {
                return Err(Error::Configuration(format!(
                    "U = {u} must exceed |final detuning| = {}",
                    delta_f.abs()
                )));
            }
        }
        Ok(())
    }

    /// Interaction energy `Σ U_jk n_j n_k` of every basis state.
    pub fn interaction_energies(&self) -> Vec<f64> {
        let n = self.n_atoms();
        // coupling rows indexed by bit position
        let mut rows = vec![vec![0.0; n]; n];
        for (j, k, w) in self.couplings() {
            let (bj, bk) = (n - j, n - k);
            rows[bj][bk] = w;
            rows[bk][bj] = w;
        }
        let dim = 1usize << n;
        let mut v = vec![0.0; dim];
        for i in 1..dim {
            let top = usize::BITS - 1 - i.leading_zeros();
            let rest = i ^ (1 << top);
            let row = &rows[top as usize];
            let mut acc = v[rest];
            let mut r = rest;
            while r != 0 {
                let b = r.trailing_zeros() as usize;
                acc += row[b];
                r &= r - 1;
            }
            v[i] = acc;
        }
        v
    }
}

fn check_size(n: usize) -> Result<()> {
    if n > MAX_ATOMS {
        return Err(Error::Capacity {
            what: "atoms in a dense state vector",
            got: n,
            limit: MAX_ATOMS,
        });
    }
    Ok(())
}

/// Hamiltonian at fixed `(Ω, δ)`, applied matrix-free.
#[derive(Clone, Debug)]
pub struct Hamiltonian {
    n: usize,
    interaction: Vec<f64>,
    pub omega: f64,
    pub delta: f64,
}

/// Freezes the drive at `(omega, delta)`.
pub fn build_hamiltonian(spec: &HamiltonianSpec, omega: f64, delta: f64) -> Hamiltonian {
    Hamiltonian {
        n: spec.n_atoms(),
        interaction: spec.interaction_energies(),
        omega,
        delta,
    }
}

impl Hamiltonian {
    pub fn n_atoms(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    /// `⟨i|H|i⟩`.
    pub fn diagonal(&self, i: usize) -> f64 {
        let k = i.count_ones() as f64;
        self.interaction[i] - self.delta * k + 0.5 * self.delta * self.n as f64
    }

    /// `H|ψ⟩` for a complex vector.
    pub fn apply(&self, psi: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(psi.len(), self.dim());
        let half = 0.5 * self.omega;
        (0..psi.len())
            .map(|i| {
                let mut acc = psi[i] * self.diagonal(i);
                for b in 0..self.n {
                    acc += psi[i ^ (1 << b)] * half;
                }
                acc
            })
            .collect()
    }

    /// `H x` for a real vector; every matrix element is real.
    pub fn apply_real(&self, x: &[f64], out: &mut [f64]) {
        let half = 0.5 * self.omega;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = x[i] * self.diagonal(i);
            for b in 0..self.n {
                acc += x[i ^ (1 << b)] * half;
            }
            *o = acc;
        }
    }
}
