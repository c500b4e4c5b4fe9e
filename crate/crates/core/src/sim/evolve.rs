//! Time stepping of `i d|ψ⟩/dt = H(t)|ψ⟩`.
//!
//! Each step of length `dt` samples the drive at its midpoint and applies the
//! symmetric splitting `D(dt/2) X(dt) D(dt/2)`, where `D` is the diagonal part
//! (exact phases) and `X = ⊗_j exp(-i Ω dt σˣ_j / 2)` is a product of
//! single-atom rotations. Adjacent diagonal halves are fused, so a step costs
//! one diagonal sweep plus one pass per atom. Every factor is exactly
//! unitary.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sim::hamiltonian::HamiltonianSpec;
use crate::sim::schedule::Drive;
use crate::sim::state::StateVector;

/// Default step, μs.
pub const DEFAULT_DT: f64 = 1e-3;

/// Largest allowed phase advance per step from any single rate.
pub const MAX_PHASE_PER_STEP: f64 = std::f64::consts::PI;

/// Norm drift that triggers an accuracy error.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Work unit for parallel sweeps.
const CHUNK: usize = 1 << 14;

/// Classical perturbations applied along one run.
///
/// `delta_offsets[s]` is added to δ during step `s`; `kicks[h]` is a bitmask
/// of atoms receiving a σᶻ kick at half-step `h` (`2s` before the rotation of
/// step `s`, `2s + 1` after it). Bit `N - j` is atom `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub omega_scale: f64,
    pub delta_offsets: Vec<f64>,
    pub kicks: Vec<usize>,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation {
            omega_scale: 1.0,
            delta_offsets: Vec::new(),
            kicks: Vec::new(),
        }
    }
}

impl Perturbation {
    fn delta_offset(&self, step: usize) -> f64 {
        self.delta_offsets.get(step).copied().unwrap_or(0.0)
    }

    fn kick(&self, half: usize) -> usize {
        self.kicks.get(half).copied().unwrap_or(0)
    }
}

/// Number of steps and the step actually used so that `n · dt = duration`.
pub fn step_grid(duration: f64, dt: f64) -> Result<(usize, f64)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Accuracy(format!("time step {dt} must be positive")));
    }
    if duration <= 0.0 {
        return Ok((0, dt));
    }
    let n = (duration / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, duration / n as f64))
}

/// Precomputed propagator pieces for one Hamiltonian and drive.
pub struct Evolver<'a> {
    n: usize,
    drive: &'a dyn Drive,
    n_steps: usize,
    dt: f64,
    half: Vec<Complex64>,
    full: Vec<Complex64>,
    counts: Vec<u8>,
}

impl<'a> Evolver<'a> {
    pub fn new(spec: &HamiltonianSpec, drive: &'a dyn Drive, dt: f64) -> Result<Self> {
        let (n_steps, dt) = step_grid(drive.duration(), dt)?;
        let rate = drive.max_rate().max(spec.max_coupling());
        if rate * dt > MAX_PHASE_PER_STEP {
            return Err(Error::Accuracy(format!(
                "step {dt} μs does not resolve rate {rate:.1} rad/μs; use dt <= {:.2e}",
                MAX_PHASE_PER_STEP / rate
            )));
        }
        let v = spec.interaction_energies();
        let phase = |x: f64, tau: f64| Complex64::from_polar(1.0, -x * tau);
        Ok(Evolver {
            n: spec.n_atoms(),
            drive,
            n_steps,
            dt,
            half: v.iter().map(|&x| phase(x, 0.5 * dt)).collect(),
            full: v.iter().map(|&x| phase(x, dt)).collect(),
            counts: (0..v.len()).map(|i: usize| i.count_ones() as u8).collect(),
        })
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn run(&self, psi0: &StateVector, pert: &Perturbation) -> Result<StateVector> {
        self.run_observed(psi0, pert, &mut |_, _| {})
    }

    /// Like [`run`](Self::run), calling `observer(step, amplitudes)` after the
    /// rotation of every step. Observed amplitudes differ from the state at
    /// the step boundary by a pending diagonal phase, so norms and
    /// populations are exact.
    pub fn run_observed(
        &self,
        psi0: &StateVector,
        pert: &Perturbation,
        observer: &mut dyn FnMut(usize, &[Complex64]),
    ) -> Result<StateVector> {
        if psi0.n_atoms() != self.n {
            return Err(Error::Configuration(format!(
                "state has {} atoms, Hamiltonian has {}",
                psi0.n_atoms(),
                self.n
            )));
        }
        let mut psi = psi0.clone();
        let amps = psi.amplitudes_mut();
        let tau = 0.5 * self.dt;
        let nf = self.n as f64;
        let mut pending: Option<(f64, usize)> = None;

        for s in 0..self.n_steps {
            let mid = (s as f64 + 0.5) * self.dt;
            let (omega, delta) = self.drive.at(mid);
            let omega = omega * pert.omega_scale;
            let delta = delta + pert.delta_offset(s);

            // close the previous step's trailing half together with this one's leading half
            let (weights, phi, mask) = match pending.take() {
                None => (&self.half, delta * tau, pert.kick(2 * s)),
                Some((phi0, m0)) => (&self.full, phi0 + delta * tau, m0 ^ pert.kick(2 * s)),
            };
            let table = popcount_phases(self.n, nf, phi);
            let theta = 0.5 * omega * self.dt;
            sweep(
                amps,
                self.n,
                weights,
                &self.counts,
                &table,
                mask,
                theta.cos(),
                theta.sin(),
            );
            pending = Some((delta * tau, pert.kick(2 * s + 1)));
            observer(s, amps);
        }
        if let Some((phi, mask)) = pending {
            let table = popcount_phases(self.n, nf, phi);
            sweep(
                amps,
                self.n,
                &self.half,
                &self.counts,
                &table,
                mask,
                1.0,
                0.0,
            );
        }

        let drift = (psi.norm() - psi0.norm()).abs();
        if drift > NORM_TOLERANCE {
            return Err(Error::Accuracy(format!("norm drifted by {drift:.2e}")));
        }
        Ok(psi)
    }
}

/// `exp(i (k - N/2) φ)` for every excitation count `k`.
fn popcount_phases(n: usize, nf: f64, phi: f64) -> Vec<Complex64> {
    (0..=n)
        .map(|k| Complex64::from_polar(1.0, (k as f64 - 0.5 * nf) * phi))
        .collect()
}

/// Diagonal factor then `c I - i s σˣ` on every bit.
#[allow(clippy::too_many_arguments)]
fn sweep(
    amps: &mut [Complex64],
    n: usize,
    weights: &[Complex64],
    counts: &[u8],
    table: &[Complex64],
    mask: usize,
    c: f64,
    s: f64,
) {
    amps.par_chunks_mut(CHUNK)
        .zip(weights.par_chunks(CHUNK))
        .zip(counts.par_chunks(CHUNK))
        .enumerate()
        .for_each(|(ci, ((block, w), k))| {
            for ((a, wv), kv) in block.iter_mut().zip(w).zip(k) {
                *a *= wv * table[*kv as usize];
            }
            if mask != 0 {
                let base = ci * CHUNK;
                for (o, a) in block.iter_mut().enumerate() {
                    if ((base + o) & mask).count_ones() & 1 == 1 {
                        *a = -*a;
                    }
                }
            }
        });
    if s != 0.0 {
        for b in 0..n {
            let stride = 1usize << b;
            amps.par_chunks_mut(CHUNK.max(2 * stride))
                .for_each(|block| rotate_bit(block, stride, c, s));
        }
    }
}

/// Applies `c I - i s σˣ` to the bit with the given stride.
pub(crate) fn rotate_bit(block: &mut [Complex64], stride: usize, c: f64, s: f64) {
    for pair in block.chunks_exact_mut(2 * stride) {
        let (lo, hi) = pair.split_at_mut(stride);
        for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
            butterfly(x, y, c, s);
        }
    }
}

#[inline(always)]
fn butterfly(x: &mut Complex64, y: &mut Complex64, c: f64, s: f64) {
    let (a, b) = (*x, *y);
    *x = Complex64::new(a.re * c + b.im * s, a.im * c - b.re * s);
    *y = Complex64::new(b.re * c + a.im * s, b.im * c - a.re * s);
}

/// Noiseless evolution over the whole drive.
pub fn evolve(
    psi0: &StateVector,
    spec: &HamiltonianSpec,
    drive: &dyn Drive,
    dt: f64,
) -> Result<StateVector> {
    Evolver::new(spec, drive, dt)?.run(psi0, &Perturbation::default())
}

/// Largest change of any basis-state probability when `dt` is halved.
pub fn step_halving_deviation(
    psi0: &StateVector,
    spec: &HamiltonianSpec,
    drive: &dyn Drive,
    dt: f64,
) -> Result<f64> {
    let coarse = evolve(psi0, spec, drive, dt)?.probabilities();
    let fine = evolve(psi0, spec, drive, 0.5 * dt)?.probabilities();
    Ok(coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}
