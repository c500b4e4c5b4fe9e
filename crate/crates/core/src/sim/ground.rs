//! Exact ground states for small systems.
//!
//! At Ω = 0 the Hamiltonian is diagonal and the ground manifold is read off
//! directly. Otherwise H is real symmetric: up to [`DENSE_LIMIT`] atoms it is
//! diagonalized densely, above that by Lanczos with full reorthogonalization.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::VertexSet;
use crate::sim::hamiltonian::{build_hamiltonian, Hamiltonian, HamiltonianSpec};
use crate::sim::state::StateVector;

pub const MAX_EXACT_ATOMS: usize = 14;
pub const DENSE_LIMIT: usize = 8;

/// Relative energy window treated as degenerate.
const DEGENERACY: f64 = 1e-9;

/// Lowest eigenpair. Degenerate diagonal ground manifolds return their
/// equal-weight superposition.
pub fn exact_ground_state(
    spec: &HamiltonianSpec,
    omega: f64,
    delta: f64,
) -> Result<(f64, StateVector)> {
    let n = spec.n_atoms();
    if n > MAX_EXACT_ATOMS {
        return Err(Error::Capacity {
            what: "atoms for exact diagonalization",
            got: n,
            limit: MAX_EXACT_ATOMS,
        });
    }
    let h = build_hamiltonian(spec, omega, delta);
    let (e, v) = if omega == 0.0 {
        let (e, idx) = diagonal_minimum(&h);
        let w = 1.0 / (idx.len() as f64).sqrt();
        let mut v = vec![0.0; h.dim()];
        idx.iter().for_each(|&i| v[i] = w);
        (e, v)
    } else if n <= DENSE_LIMIT {
        dense_ground(&h)
    } else {
        lanczos_ground(&h)?
    };
    let amps = v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
    Ok((e, StateVector::from_amplitudes(amps)?))
}

/// Basis configurations minimizing the diagonal energy at detuning `delta`.
pub fn ground_configurations(spec: &HamiltonianSpec, delta: f64) -> BTreeSet<VertexSet> {
    let h = build_hamiltonian(spec, 0.0, delta);
    let n = spec.n_atoms();
    diagonal_minimum(&h)
        .1
        .into_iter()
        .map(|i| VertexSet::from_index(i, n))
        .collect()
}

fn diagonal_minimum(h: &Hamiltonian) -> (f64, Vec<usize>) {
    let e: Vec<f64> = (0..h.dim()).map(|i| h.diagonal(i)).collect();
    let emin = e.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = e.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let idx = (0..e.len())
        .filter(|&i| e[i] - emin <= DEGENERACY * scale)
        .collect();
    (emin, idx)
}

fn dense_ground(h: &Hamiltonian) -> (f64, Vec<f64>) {
    let dim = h.dim();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    let mut col = vec![0.0; dim];
    let mut unit = vec![0.0; dim];
    for j in 0..dim {
        unit[j] = 1.0;
        h.apply_real(&unit, &mut col);
        unit[j] = 0.0;
        m.column_mut(j).copy_from_slice(&col);
    }
    let eig = SymmetricEigen::new(m);
    let k = eig.eigenvalues.imin();
    (
        eig.eigenvalues[k],
        eig.eigenvectors.column(k).iter().copied().collect(),
    )
}

/// Lanczos with full reorthogonalization, restarted from the current Ritz
/// vector until the residual is small.
fn lanczos_ground(h: &Hamiltonian) -> Result<(f64, Vec<f64>)> {
    let dim = h.dim();
    let krylov = 120.min(dim);
    // deterministic start with weight on every basis state
    let mut start = DVector::from_iterator(
        dim,
        (0..dim).map(|i| 1.0 + 0.1 * ((i * 7919 % 101) as f64 / 101.0)),
    );
    start /= start.norm();
    let mut w = vec![0.0; dim];
    for _restart in 0..20 {
        let mut basis: Vec<DVector<f64>> = vec![start.clone()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        for j in 0..krylov {
            h.apply_real(basis[j].as_slice(), &mut w);
            let mut r = DVector::from_column_slice(&w);
            let a = basis[j].dot(&r);
            alpha.push(a);
            for _ in 0..2 {
                for q in &basis {
                    let p = q.dot(&r);
                    r.axpy(-p, q, 1.0);
                }
            }
            let b = r.norm();
            if j + 1 == krylov || b < 1e-12 {
                break;
            }
            beta.push(b);
            basis.push(r / b);
        }
        let m = alpha.len();
        let t = DMatrix::from_fn(m, m, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let k = eig.eigenvalues.imin();
        let theta = eig.eigenvalues[k];
        let mut x = DVector::zeros(dim);
        for (i, q) in basis.iter().take(m).enumerate() {
            x.axpy(eig.eigenvectors[(i, k)], q, 1.0);
        }
        x /= x.norm();
        h.apply_real(x.as_slice(), &mut w);
        let res = DVector::from_column_slice(&w) - &x * theta;
        if res.norm() <= 1e-9 * theta.abs().max(1.0) {
            return Ok((theta, x.iter().copied().collect()));
        }
        start = x;
    }
    Err(Error::Accuracy("Lanczos did not converge".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::graph::Graph;
    use crate::sim::schedule::angular;

    fn family(sets: &[&[usize]]) -> BTreeSet<VertexSet> {
        sets.iter().map(|s| s.iter().copied().collect()).collect()
    }

    #[test]
    fn three_pan_ground_manifold() {
        let g = catalog::graph("3-pan").unwrap();
        let spec = HamiltonianSpec::graph(&g, angular(50.0)).unwrap();
        assert_eq!(
            ground_configurations(&spec, angular(3.0)),
            family(&[&[1, 3], &[1, 4]])
        );
        let (_, psi) = exact_ground_state(&spec, 0.0, angular(3.0)).unwrap();
        assert!((psi.probabilities()[0b1010] - 0.5).abs() < 1e-12);
        assert!((psi.probabilities()[0b1001] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_atom_and_star() {
        let spec = HamiltonianSpec::graph(&Graph::empty(1), 1.0).unwrap();
        let (e, psi) = exact_ground_state(&spec, 0.0, 2.0).unwrap();
        assert!((e + 1.0).abs() < 1e-15);
        assert_eq!(psi.probabilities(), vec![0.0, 1.0]);
        let s4 = HamiltonianSpec::graph(&catalog::graph("S4").unwrap(), angular(50.0)).unwrap();
        assert_eq!(
            ground_configurations(&s4, angular(3.0)),
            family(&[&[1, 2, 4]])
        );
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let g = catalog::graph("Moser spindle").unwrap().with_vertices(2);
        let spec = HamiltonianSpec::graph(&g, 7.0).unwrap();
        let h = build_hamiltonian(&spec, 2.3, 1.1);
        let (ed, vd) = dense_ground(&h);
        let (el, vl) = lanczos_ground(&h).unwrap();
        assert!((ed - el).abs() < 1e-9, "{ed} vs {el}");
        let overlap: f64 = vd.iter().zip(&vl).map(|(a, b)| a * b).sum();
        assert!((overlap.abs() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn driven_ground_state_is_eigenvector() {
        let g = catalog::graph("K5exp").unwrap();
        let spec = HamiltonianSpec::graph(&g, angular(50.0)).unwrap();
        let (e, psi) = exact_ground_state(&spec, angular(0.5), angular(3.0)).unwrap();
        let h = build_hamiltonian(&spec, angular(0.5), angular(3.0));
        let hv = h.apply(psi.amplitudes());
        let res: f64 = hv
            .iter()
            .zip(psi.amplitudes())
            .map(|(a, b)| (a - b * e).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(res < 1e-7, "residual {res}");
    }

    #[test]
    fn capacity_limit() {
        let spec = HamiltonianSpec::graph(&Graph::empty(15), 1.0).unwrap();
        assert!(matches!(
            exact_ground_state(&spec, 0.0, 1.0),
            Err(Error::Capacity { .. })
        ));
    }
}
