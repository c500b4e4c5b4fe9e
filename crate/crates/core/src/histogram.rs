//! Measurement distributions over bitstrings.
//!
//! Bitstrings put atom 1 first (most significant bit). Entries are
//! probabilities; for sampled histograms they are `count / shots`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::VertexSet;

/// Bit-order statement written into every artifact header.
pub const BIT_ORDER: &str =
    "atom 1 is the leftmost (most significant) bit; 1 = Rydberg, 0 = ground";

#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    n_atoms: usize,
    shots: u64,
    probs: Vec<f64>,
    /// Set once readout correction has been applied.
    pub spam_corrected: bool,
    /// Set when correction produced negative entries that were clamped.
    pub clamped: bool,
}

pub fn bitstring(index: usize, n: usize) -> String {
    (1..=n)
        .map(|j| if index >> (n - j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

pub fn parse_bitstring(bits: &str) -> Result<usize> {
    if bits.is_empty() || bits.len() > 63 {
        return Err(Error::InvalidInput(format!("bad bitstring `{bits}`")));
    }
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok(acc << 1 | 1),
        _ => Err(Error::InvalidInput(format!("bad bitstring `{bits}`"))),
    })
}

impl Histogram {
    /// Exact distribution over `2^n` outcomes.
    pub fn exact(n_atoms: usize, probs: Vec<f64>) -> Self {
        assert_eq!(probs.len(), 1 << n_atoms, "distribution length must be 2^n");
        Histogram {
            n_atoms,
            shots: 0,
            probs,
            spam_corrected: false,
            clamped: false,
        }
    }

    pub fn from_counts(n_atoms: usize, counts: &[u64]) -> Self {
        assert_eq!(counts.len(), 1 << n_atoms);
        let shots: u64 = counts.iter().sum();
        let probs = counts
            .iter()
            .map(|&c| {
                if shots == 0 {
                    0.0
                } else {
                    c as f64 / shots as f64
                }
            })
            .collect();
        Histogram {
            n_atoms,
            shots,
            probs,
            spam_corrected: false,
            clamped: false,
        }
    }

    /// Builds from sparse `(bitstring, probability)` pairs.
    pub fn from_entries<'a, I>(n_atoms: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, f64)>,
    {
        let mut probs = vec![0.0; 1 << n_atoms];
        for (bits, p) in entries {
            if bits.len() != n_atoms {
                return Err(Error::InvalidInput(format!(
                    "bitstring `{bits}` does not have {n_atoms} bits"
                )));
            }
            probs[parse_bitstring(bits)?] += p;
        }
        Ok(Histogram::exact(n_atoms, probs))
    }

    /// Uniform distribution, mostly useful as a degenerate input.
    pub fn uniform(n_atoms: usize) -> Self {
        let dim = 1usize << n_atoms;
        Histogram::exact(n_atoms, vec![1.0 / dim as f64; dim])
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub(crate) fn with_probs(&self, probs: Vec<f64>) -> Self {
        Histogram {
            n_atoms: self.n_atoms,
            shots: self.shots,
            probs,
            spam_corrected: self.spam_corrected,
            clamped: self.clamped,
        }
    }

    pub fn prob(&self, index: usize) -> f64 {
        self.probs[index]
    }

    pub fn get(&self, bits: &str) -> Result<f64> {
        if bits.len() != self.n_atoms {
            return Err(Error::InvalidInput(format!(
                "bitstring `{bits}` does not have {} bits",
                self.n_atoms
            )));
        }
        Ok(self.probs[parse_bitstring(bits)?])
    }

    /// Probability of the occupation pattern given by a vertex set.
    pub fn prob_of_set(&self, s: &VertexSet) -> f64 {
        self.probs[s.to_index(self.n_atoms)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().cloned().fold(0.0, f64::max)
    }

    /// Nonzero entries in index order.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p != 0.0)
            .map(|(i, p)| (i, *p))
    }

    /// Marginal over atoms `1..=k`, i.e. the `k` leading bits.
    pub fn project(&self, k: usize) -> Histogram {
        assert!(k <= self.n_atoms);
        let shift = self.n_atoms - k;
        let mut out = vec![0.0; 1 << k];
        for (i, p) in self.probs.iter().enumerate() {
            out[i >> shift] += p;
        }
        Histogram {
            n_atoms: k,
            shots: self.shots,
            probs: out,
            spam_corrected: self.spam_corrected,
            clamped: self.clamped,
        }
    }

    /// Total-variation distance `½ Σ |p - q|`.
    pub fn tvd(&self, other: &Histogram) -> f64 {
        assert_eq!(self.n_atoms, other.n_atoms);
        0.5 * self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
    }

    /// Sparse map of nonzero entries keyed by bitstring.
    pub fn to_map(&self) -> BTreeMap<String, f64> {
        self.nonzero()
            .map(|(i, p)| (bitstring(i, self.n_atoms), p))
            .collect()
    }

    /// `bitstring,probability` CSV preceded by `# key: value` header lines.
    pub fn to_csv(&self, meta: &[(&str, String)]) -> String {
        let mut out = String::new();
        for (k, v) in self.header(meta) {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        out.push_str("bitstring,probability\n");
        for (i, p) in self.nonzero() {
            out.push_str(&format!("{},{:e}\n", bitstring(i, self.n_atoms), p));
        }
        out
    }

    /// JSON object with metadata and the sparse probability map.
    pub fn to_json(&self, meta: &[(&str, String)]) -> String {
        #[derive(Serialize)]
        struct Doc {
            meta: BTreeMap<String, String>,
            probabilities: BTreeMap<String, f64>,
        }
        let doc = Doc {
            meta: self
                .header(meta)
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            probabilities: self.to_map(),
        };
        serde_json::to_string_pretty(&doc).expect("histogram serializes")
    }

    fn header<'a>(&self, meta: &[(&'a str, String)]) -> Vec<(&'a str, String)> {
        let mut h: Vec<(&str, String)> = meta.to_vec();
        h.push(("n_atoms", self.n_atoms.to_string()));
        h.push(("shots", self.shots.to_string()));
        h.push(("bit_order", BIT_ORDER.to_string()));
        h.push(("spam_corrected", self.spam_corrected.to_string()));
        h.push(("clamped", self.clamped.to_string()));
        h
    }
}
