//! Decoherence, classical control noise and readout errors.
//!
//! Dephasing uses `L_j = √(γ_m/2) σᶻ_j`, which damps every coherence
//! `ρ_ab` at rate `γ_m · hamming(a, b)`. The density-matrix integrator and
//! the trajectory unraveling apply that damping at the same half-steps as the
//! state-vector splitting, so their averages agree up to sampling error.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::sim::evolve::{rotate_bit, step_grid, Evolver, Perturbation, MAX_PHASE_PER_STEP};
use crate::sim::hamiltonian::{HamiltonianSpec, Mode};
use crate::sim::schedule::{angular, Drive};
use crate::sim::state::StateVector;

/// Largest system for the dense density-matrix integrator.
pub const MAX_DENSITY_ATOMS: usize = 7;
const TRACE_TOLERANCE: f64 = 1e-8;
const TRAJECTORY_BATCH: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NoiseParams {
    /// Dephasing rate, rad/μs.
    pub gamma_m: f64,
    /// White frequency-noise levels of the two excitation lasers, Hz²/Hz.
    pub phase_psd_780: f64,
    pub phase_psd_480: f64,
    /// Relative standard deviation of the Rabi frequency.
    pub intensity_fluct: f64,
    /// Thermal position spread, μm (radial and axial).
    pub sigma_r: f64,
    pub sigma_z: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            gamma_m: angular(0.01),
            phase_psd_780: 1e4,
            phase_psd_480: 1e3,
            intensity_fluct: 0.02,
            sigma_r: 0.1,
            sigma_z: 0.6,
        }
    }
}

impl NoiseParams {
    pub fn none() -> Self {
        NoiseParams {
            gamma_m: 0.0,
            phase_psd_780: 0.0,
            phase_psd_480: 0.0,
            intensity_fluct: 0.0,
            sigma_r: 0.0,
            sigma_z: 0.0,
        }
    }

    pub fn dephasing_only(gamma_m: f64) -> Self {
        NoiseParams {
            gamma_m,
            ..NoiseParams::none()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("gamma_m", self.gamma_m),
            ("phase_psd_780", self.phase_psd_780),
            ("phase_psd_480", self.phase_psd_480),
            ("intensity_fluct", self.intensity_fluct),
            ("sigma_r", self.sigma_r),
            ("sigma_z", self.sigma_z),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Configuration(format!(
                    "noise parameter {name} = {v} must be >= 0"
                )));
            }
        }
        Ok(())
    }

    /// Standard deviation of the laser phase increment over `dt` μs, rad.
    /// Both lasers contribute independently.
    pub fn phase_step_sd(&self, dt: f64) -> f64 {
        let psd = self.phase_psd_780 + self.phase_psd_480;
        (2.0 * std::f64::consts::PI.powi(2) * psd * dt * 1e-6).sqrt()
    }
}

/// Per-atom readout confusion.
///
/// ```text
/// M = | 1 - P(1|0)   P(0|1)   |    measured = M · true, on (|0⟩, |1⟩)
///     | P(1|0)       1 - P(0|1) |
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpamModel {
    pub p0_given_1: f64,
    pub p1_given_0: f64,
}

impl Default for SpamModel {
    fn default() -> Self {
        SpamModel {
            p0_given_1: 0.18,
            p1_given_0: 0.03,
        }
    }
}

impl SpamModel {
    pub fn new(p0_given_1: f64, p1_given_0: f64) -> Result<Self> {
        let m = SpamModel {
            p0_given_1,
            p1_given_0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn identity() -> Self {
        SpamModel {
            p0_given_1: 0.0,
            p1_given_0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for p in [self.p0_given_1, self.p1_given_0] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Configuration(format!(
                    "misread probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }

    /// `[[m00, m01], [m10, m11]]`.
    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [
            [1.0 - self.p1_given_0, self.p0_given_1],
            [self.p1_given_0, 1.0 - self.p0_given_1],
        ]
    }

    pub fn determinant(&self) -> f64 {
        1.0 - self.p0_given_1 - self.p1_given_0
    }

    pub fn inverse(&self) -> Result<[[f64; 2]; 2]> {
        let d = self.determinant();
        if d.abs() < 1e-12 {
            return Err(Error::Inversion(d));
        }
        let [[a, b], [c, e]] = self.matrix();
        Ok([[e / d, -b / d], [-c / d, a / d]])
    }
}

/// Applies the same 2×2 matrix to every bit of a probability vector.
fn apply_per_bit(p: &mut [f64], n: usize, m: [[f64; 2]; 2]) {
    for b in 0..n {
        let stride = 1usize << b;
        for pair in p.chunks_exact_mut(2 * stride) {
            let (lo, hi) = pair.split_at_mut(stride);
            for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, c) = (*x0, *x1);
                *x0 = m[0][0] * a + m[0][1] * c;
                *x1 = m[1][0] * a + m[1][1] * c;
            }
        }
    }
}

/// Simulated misreads: `M^{⊗N}` on the distribution.
pub fn spam_apply(h: &Histogram, m: &SpamModel) -> Histogram {
    let mut p = h.probs().to_vec();
    apply_per_bit(&mut p, h.n_atoms(), m.matrix());
    h.with_probs(p)
}

/// `(M⁻¹)^{⊗N}` without clamping; entries may be negative.
pub fn spam_correct_raw(h: &Histogram, m: &SpamModel) -> Result<Vec<f64>> {
    let mut p = h.probs().to_vec();
    apply_per_bit(&mut p, h.n_atoms(), m.inverse()?);
    Ok(p)
}

/// Readout correction. Negative entries are clamped to zero and the result
/// renormalized to the input total; `clamped` records whether that happened.
pub fn spam_correct(h: &Histogram, m: &SpamModel) -> Result<Histogram> {
    let raw = spam_correct_raw(h, m)?;
    let clamped = raw.iter().any(|&x| x < -1e-12);
    let mut out = if clamped {
        let mut p: Vec<f64> = raw.iter().map(|&x| x.max(0.0)).collect();
        let s: f64 = p.iter().sum();
        let target = h.total();
        if s > 0.0 {
            p.iter_mut().for_each(|x| *x *= target / s);
        }
        h.with_probs(p)
    } else {
        h.with_probs(raw)
    };
    out.spam_corrected = true;
    out.clamped = h.clamped || clamped;
    Ok(out)
}

/// Dense `2^N × 2^N` density operator; element `(a, b)` sits at `a · 2^N + b`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        check_density_size(psi.n_atoms())?;
        let a = psi.amplitudes();
        let data = a
            .iter()
            .flat_map(|x| a.iter().map(move |y| x * y.conj()))
            .collect();
        Ok(DensityMatrix {
            n: psi.n_atoms(),
            data,
        })
    }

    /// Diagonal mixture of basis states.
    pub fn from_populations(probs: &[f64]) -> Result<Self> {
        if !probs.len().is_power_of_two() {
            return Err(Error::InvalidInput(
                "population vector length must be 2^n".into(),
            ));
        }
        let n = probs.len().trailing_zeros() as usize;
        check_density_size(n)?;
        let dim = probs.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, p) in probs.iter().enumerate() {
            data[i * dim + i] = Complex64::new(*p, 0.0);
        }
        Ok(DensityMatrix { n, data })
    }

    pub fn n_atoms(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.data[a * self.dim() + b]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.get(i, i).re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i).re).collect()
    }

    /// Largest `|ρ_ab - conj(ρ_ba)|`.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .flat_map(|a| (0..d).map(move |b| (a, b)))
            .map(|(a, b)| (self.get(a, b) - self.get(b, a).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |a, b| 0.5 * (self.get(a, b) + self.get(b, a).conj()));
        m.symmetric_eigenvalues().min()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &StateVector) -> f64 {
        let a = psi.amplitudes();
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += a[i].conj() * self.get(i, j) * a[j];
            }
        }
        acc.re
    }
}

fn check_density_size(n: usize) -> Result<()> {
    if n > MAX_DENSITY_ATOMS {
        return Err(Error::Capacity {
            what: "atoms in a dense density matrix",
            got: n,
            limit: MAX_DENSITY_ATOMS,
        });
    }
    Ok(())
}

/// Master-equation evolution with σᶻ dephasing at rate `params.gamma_m`.
/// Classical noise channels are not part of this model.
pub fn lindblad_evolve(
    rho0: &DensityMatrix,
    spec: &HamiltonianSpec,
    drive: &dyn Drive,
    params: &NoiseParams,
    dt: f64,
) -> Result<DensityMatrix> {
    lindblad_evolve_observed(rho0, spec, drive, params, dt, &mut |_, _| {})
}

/// [`lindblad_evolve`] with `observer(step, ρ)` called after every full step.
pub fn lindblad_evolve_observed(
    rho0: &DensityMatrix,
    spec: &HamiltonianSpec,
    drive: &dyn Drive,
    params: &NoiseParams,
    dt: f64,
    observer: &mut dyn FnMut(usize, &DensityMatrix),
) -> Result<DensityMatrix> {
    let n = spec.n_atoms();
    check_density_size(n)?;
    if rho0.n != n {
        return Err(Error::Configuration(format!(
            "density matrix has {} atoms, Hamiltonian has {n}",
            rho0.n
        )));
    }
    params.validate()?;
    let (steps, dt) = step_grid(drive.duration(), dt)?;
    let rate = drive.max_rate().max(spec.max_coupling());
    if rate * dt > MAX_PHASE_PER_STEP {
        return Err(Error::Accuracy(format!(
            "step {dt} μs does not resolve rate {rate:.1} rad/μs"
        )));
    }
    let v = spec.interaction_energies();
    let dim = 1usize << n;
    let tau = 0.5 * dt;
    let damp: Vec<f64> = (0..=n)
        .map(|k| (-params.gamma_m * tau * k as f64).exp())
        .collect();

    let mut rho = rho0.clone();
    let half_step = |rho: &mut DensityMatrix, delta: f64| {
        let d: Vec<Complex64> = (0..dim)
            .map(|i| {
                let e = v[i] - delta * (i.count_ones() as f64 - 0.5 * n as f64);
                Complex64::from_polar(1.0, -e * tau)
            })
            .collect();
        for a in 0..dim {
            for b in 0..dim {
                let f = d[a] * d[b].conj() * damp[(a ^ b).count_ones() as usize];
                rho.data[a * dim + b] *= f;
            }
        }
    };
    for s in 0..steps {
        let (omega, delta) = drive.at((s as f64 + 0.5) * dt);
        half_step(&mut rho, delta);
        let theta = 0.5 * omega * dt;
        let (c, sn) = (theta.cos(), theta.sin());
        for b in 0..n {
            rotate_bit(&mut rho.data, 1 << b, c, -sn);
            rotate_bit(&mut rho.data, 1 << (n + b), c, sn);
        }
        half_step(&mut rho, delta);
        observer(s, &rho);
    }
    let drift = (rho.trace() - rho0.trace()).abs();
    if drift > TRACE_TOLERANCE {
        return Err(Error::Accuracy(format!("trace drifted by {drift:.2e}")));
    }
    Ok(rho)
}

/// One random realization of every enabled noise channel.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseRealization {
    pub perturbation: Perturbation,
    /// Per-atom position offsets; empty in graph mode.
    pub displacements: Vec<[f64; 3]>,
}

/// Deterministic per-trajectory generator.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws the noise for one trajectory.
pub fn sample_realization(
    rng: &mut ChaCha8Rng,
    params: &NoiseParams,
    n_atoms: usize,
    mode: Mode,
    n_steps: usize,
    dt: f64,
) -> NoiseRealization {
    let mut pert = Perturbation::default();
    if params.intensity_fluct > 0.0 {
        pert.omega_scale = Normal::new(1.0, params.intensity_fluct)
            .unwrap()
            .sample(rng);
    }
    let phase_sd = params.phase_step_sd(dt);
    if phase_sd > 0.0 {
        let normal = Normal::new(0.0, phase_sd).unwrap();
        pert.delta_offsets = (0..n_steps).map(|_| normal.sample(rng) / dt).collect();
    }
    if params.gamma_m > 0.0 {
        let p = 0.5 * (1.0 - (-params.gamma_m * 0.5 * dt).exp());
        pert.kicks = (0..2 * n_steps)
            .map(|_| {
                (0..n_atoms).fold(0usize, |m, b| {
                    if rng.random::<f64>() < p {
                        m | 1 << b
                    } else {
                        m
                    }
                })
            })
            .collect();
    }
    let mut displacements = Vec::new();
    if mode == Mode::Physical && (params.sigma_r > 0.0 || params.sigma_z > 0.0) {
        let g = |sd: f64, rng: &mut ChaCha8Rng| {
            if sd > 0.0 {
                Normal::new(0.0, sd).unwrap().sample(rng)
            } else {
                0.0
            }
        };
        displacements = (0..n_atoms)
            .map(|_| {
                [
                    g(params.sigma_r, rng),
                    g(params.sigma_r, rng),
                    g(params.sigma_z, rng),
                ]
            })
            .collect();
    }
    NoiseRealization {
        perturbation: pert,
        displacements,
    }
}

/// Average of exact output distributions over `n_traj` noise realizations.
/// Trajectory `k` draws from stream `k` of `seed`, so the result does not
/// depend on scheduling.
pub fn trajectory_sample(
    psi0: &StateVector,
    spec: &HamiltonianSpec,
    drive: &dyn Drive,
    params: &NoiseParams,
    n_traj: usize,
    seed: u64,
    dt: f64,
) -> Result<Histogram> {
    if n_traj == 0 {
        return Err(Error::InvalidInput(
            "at least one trajectory is required".into(),
        ));
    }
    params.validate()?;
    let n = spec.n_atoms();
    let shared = Evolver::new(spec, drive, dt)?;
    let (steps, dt) = (shared.n_steps(), shared.dt());
    let run_one = |k: usize| -> Result<Vec<f64>> {
        let mut rng = trajectory_rng(seed, k as u64);
        let real = sample_realization(&mut rng, params, n, spec.mode(), steps, dt);
        let psi = if real.displacements.is_empty() {
            shared.run(psi0, &real.perturbation)?
        } else {
            let moved = spec.with_displacements(&real.displacements);
            Evolver::new(&moved, drive, dt)?.run(psi0, &real.perturbation)?
        };
        Ok(psi.probabilities())
    };

    let mut acc = vec![0.0; 1 << n];
    for start in (0..n_traj).step_by(TRAJECTORY_BATCH) {
        let end = (start + TRAJECTORY_BATCH).min(n_traj);
        let batch: Vec<Vec<f64>> = (start..end)
            .into_par_iter()
            .map(run_one)
            .collect::<Result<_>>()?;
        for p in batch {
            acc.iter_mut().zip(&p).for_each(|(a, x)| *a += x);
        }
    }
    acc.iter_mut().for_each(|a| *a /= n_traj as f64);
    Ok(Histogram::exact(n, acc))
}
