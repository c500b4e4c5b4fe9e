use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::histogram::Histogram;
use crate::sim::hamiltonian::MAX_ATOMS;

/// Dense amplitudes in the bare-atom basis, atom 1 in the most significant bit.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// `|00…0⟩`.
    pub fn ground(n: usize) -> Result<Self> {
        StateVector::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n > MAX_ATOMS {
            return Err(Error::Capacity {
                what: "atoms in a dense state vector",
                got: n,
                limit: MAX_ATOMS,
            });
        }
        if index >= 1 << n {
            return Err(Error::InvalidInput(format!(
                "basis index {index} out of range"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Basis state from a bitstring such as `"1010"`.
    pub fn from_bitstring(bits: &str) -> Result<Self> {
        let index = crate::histogram::parse_bitstring(bits)?;
        StateVector::basis(bits.len(), index)
    }

    /// Wraps raw amplitudes; the length must be a power of two.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "{} amplitudes is not a power of two",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        Ok(StateVector { n, amps })
    }

    pub fn n_atoms(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Total probability on the given basis states.
    pub fn probability_of(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.amps[i].norm_sqr()).sum()
    }
}

/// Samples the state in the bare-atom basis.
///
/// `shots == 0` gives the exact `|amplitude|²` distribution; otherwise
/// `shots` independent draws seeded by `seed`.
pub fn measure(psi: &StateVector, shots: u64, seed: u64) -> Histogram {
    let probs = psi.probabilities();
    if shots == 0 {
        return Histogram::exact(psi.n_atoms(), probs);
    }
    sample_counts(psi.n_atoms(), &probs, shots, seed)
}

/// Multinomial draw from a probability vector.
pub(crate) fn sample_counts(n: usize, probs: &[f64], shots: u64, seed: u64) -> Histogram {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist =
        WeightedIndex::new(probs.iter().map(|p| p.max(0.0))).expect("probabilities sum to > 0");
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Histogram::from_counts(n, &counts)
}
