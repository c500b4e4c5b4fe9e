//! Three-dimensional atom arrays and the unit-disk graphs they induce.
//!
//! Positions are in μm. Two atoms interact strongly (share an edge) when
//! their distance is strictly below the blockade radius.
//!
//! Array text format, one atom per line in label order:
//!
//! ```text
//! # role x y z
//! qubit -7.0 3.0 0.0
//! wire  -3.5 6.1 0.0
//! ```

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{parse_err, strip_comment, Graph};

/// Pairs whose distance is within this relative band of `r_b` are flagged.
pub const MARGINAL_REL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Qubit,
    Wire,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Qubit => "qubit",
            Role::Wire => "wire",
        })
    }
}

/// Atom positions with a role per atom; atom `k` is graph vertex `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomArray {
    positions: Vec<[f64; 3]>,
    roles: Vec<Role>,
}

impl AtomArray {
    pub fn new(positions: Vec<[f64; 3]>, roles: Vec<Role>) -> Result<Self> {
        if positions.len() != roles.len() {
            return Err(Error::InvalidInput(format!(
                "{} positions but {} roles",
                positions.len(),
                roles.len()
            )));
        }
        if positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        let arr = AtomArray { positions, roles };
        for j in 0..arr.len() {
            for k in j + 1..arr.len() {
                if arr.distance(j + 1, k + 1) <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "atoms {} and {} coincide",
                        j + 1,
                        k + 1
                    )));
                }
            }
        }
        Ok(arr)
    }

    /// All atoms tagged as qubits.
    pub fn qubits(positions: Vec<[f64; 3]>) -> Result<Self> {
        let roles = vec![Role::Qubit; positions.len()];
        AtomArray::new(positions, roles)
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[[f64; 3]] {
        &self.positions
    }

    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// Euclidean distance between 1-based atoms `j` and `k`.
    pub fn distance(&self, j: usize, k: usize) -> f64 {
        let (a, b) = (self.positions[j - 1], self.positions[k - 1]);
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }

    /// Full symmetric distance matrix, 0-based.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        (1..=n)
            .map(|j| {
                (1..=n)
                    .map(|k| if j == k { 0.0 } else { self.distance(j, k) })
                    .collect()
            })
            .collect()
    }

    /// Reorders atoms: `map[i]` is the vertex label given to file atom `i+1`.
    pub fn relabeled(&self, map: &[usize]) -> Result<Self> {
        let n = self.len();
        let mut sorted = map.to_vec();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(Error::InvalidInput(format!(
                "vertex map {map:?} is not a permutation of 1..={n}"
            )));
        }
        let mut positions = vec![[0.0; 3]; n];
        let mut roles = vec![Role::Qubit; n];
        for (i, &v) in map.iter().enumerate() {
            positions[v - 1] = self.positions[i];
            roles[v - 1] = self.roles[i];
        }
        Ok(AtomArray { positions, roles })
    }

    /// Returns a copy with every atom moved by `delta[k]`.
    pub fn displaced(&self, delta: &[[f64; 3]]) -> Self {
        let positions = self
            .positions
            .iter()
            .zip(delta)
            .map(|(p, d)| [p[0] + d[0], p[1] + d[1], p[2] + d[2]])
            .collect();
        AtomArray {
            positions,
            roles: self.roles.clone(),
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut positions = Vec::new();
        let mut roles = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 {
                return Err(parse_err(idx, "expected `role x y z`"));
            }
            let role = match toks[0] {
                "qubit" => Role::Qubit,
                "wire" => Role::Wire,
                other => return Err(parse_err(idx, &format!("unknown role `{other}`"))),
            };
            let mut p = [0.0; 3];
            for (slot, tok) in p.iter_mut().zip(&toks[1..]) {
                *slot = tok
                    .parse()
                    .map_err(|_| parse_err(idx, &format!("`{tok}` is not a coordinate")))?;
            }
            positions.push(p);
            roles.push(role);
        }
        AtomArray::new(positions, roles)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# role x y z (um)\n");
        for (p, r) in self.positions.iter().zip(&self.roles) {
            out.push_str(&format!("{r} {:?} {:?} {:?}\n", p[0], p[1], p[2]));
        }
        out
    }
}

/// Interaction coefficient and drive strength that fix the blockade radius.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockadeParams {
    /// `C6/ħ` in rad/μs · μm⁶.
    pub c6_over_hbar: f64,
    /// Peak Rabi frequency `Ω₀` in rad/μs.
    pub rabi_0: f64,
}

impl BlockadeParams {
    /// Coefficient that puts the blockade radius at `r_b` for drive `rabi_0`.
    pub fn from_radius(r_b: f64, rabi_0: f64) -> Result<Self> {
        if !(r_b > 0.0 && rabi_0 > 0.0) {
            return Err(Error::Domain(format!(
                "blockade radius {r_b} and Rabi frequency {rabi_0} must be positive"
            )));
        }
        Ok(BlockadeParams {
            c6_over_hbar: rabi_0 * r_b.powi(6),
            rabi_0,
        })
    }

    pub fn r_b(&self) -> Result<f64> {
        blockade_radius(self.c6_over_hbar, self.rabi_0)
    }
}

/// `r_b = (C6 / ħΩ)^(1/6)`.
pub fn blockade_radius(c6_over_hbar: f64, rabi_0: f64) -> Result<f64> {
    if !(c6_over_hbar > 0.0 && rabi_0 > 0.0) {
        return Err(Error::Domain(format!(
            "C6/hbar = {c6_over_hbar} and Omega = {rabi_0} must both be positive"
        )));
    }
    Ok((c6_over_hbar / rabi_0).powf(1.0 / 6.0))
}

/// Unit-disk graph: edge iff distance `< r_b`.
pub fn induced_graph(arr: &AtomArray, r_b: f64) -> Graph {
    let n = arr.len();
    let edges = (1..=n)
        .flat_map(|j| (j + 1..=n).map(move |k| (j, k)))
        .filter(|&(j, k)| arr.distance(j, k) < r_b);
    Graph::new(n, edges).expect("pairs are distinct and in range")
}

/// A pair of atoms with its distance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairDistance {
    pub pair: (usize, usize),
    pub distance: f64,
}

/// Comparison between an array's unit-disk graph and an intended graph.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub r_b: f64,
    pub matched: Vec<PairDistance>,
    /// Intended edges at distance `>= r_b`.
    pub missing: Vec<PairDistance>,
    /// Non-edges at distance `< r_b`.
    pub spurious: Vec<PairDistance>,
    /// Pairs within [`MARGINAL_REL`] of `r_b`, whatever their classification.
    pub marginal: Vec<PairDistance>,
    /// `min (r_b - d) / r_b` over intended edges.
    pub min_edge_margin: f64,
    /// `min (d - r_b) / r_b` over intended non-edges.
    pub min_nonedge_margin: f64,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "r_b = {} um: {} matched, {} missing, {} spurious, {} marginal",
            self.r_b,
            self.matched.len(),
            self.missing.len(),
            self.spurious.len(),
            self.marginal.len()
        )?;
        writeln!(
            f,
            "min edge margin {:+.4}, min non-edge margin {:+.4}",
            self.min_edge_margin, self.min_nonedge_margin
        )?;
        for p in &self.missing {
            writeln!(f, "  missing  {:?} at {:.4} um", p.pair, p.distance)?;
        }
        for p in &self.spurious {
            writeln!(f, "  spurious {:?} at {:.4} um", p.pair, p.distance)?;
        }
        for p in &self.marginal {
            writeln!(f, "  marginal {:?} at {:.12} um", p.pair, p.distance)?;
        }
        Ok(())
    }
}

/// Checks that `arr` realizes exactly the edges of `expected` at radius `r_b`.
pub fn validate_embedding(arr: &AtomArray, expected: &Graph, r_b: f64) -> Result<ValidationReport> {
    if arr.len() != expected.n_vertices() {
        return Err(Error::InvalidInput(format!(
            "array has {} atoms, graph has {} vertices",
            arr.len(),
            expected.n_vertices()
        )));
    }
    if r_b <= 0.0 {
        return Err(Error::Domain(format!(
            "blockade radius {r_b} must be positive"
        )));
    }
    let mut report = ValidationReport {
        r_b,
        matched: Vec::new(),
        missing: Vec::new(),
        spurious: Vec::new(),
        marginal: Vec::new(),
        min_edge_margin: f64::INFINITY,
        min_nonedge_margin: f64::INFINITY,
    };
    let n = arr.len();
    for j in 1..=n {
        for k in j + 1..=n {
            let d = arr.distance(j, k);
            let pd = PairDistance {
                pair: (j, k),
                distance: d,
            };
            if ((d - r_b) / r_b).abs() <= MARGINAL_REL {
                report.marginal.push(pd);
            }
            let close = d < r_b;
            if expected.has_edge(j, k) {
                report.min_edge_margin = report.min_edge_margin.min((r_b - d) / r_b);
                if close {
                    report.matched.push(pd);
                } else {
                    report.missing.push(pd);
                }
            } else {
                report.min_nonedge_margin = report.min_nonedge_margin.min((d - r_b) / r_b);
                if close {
                    report.spurious.push(pd);
                }
            }
        }
    }
    Ok(report)
}

/// Coordinate tables shipped with the crate, keyed by file stem.
pub const BUNDLED_ARRAYS: &[(&str, &str)] = &[
    ("p4", include_str!("../data/arrays/p4.txt")),
    ("c4", include_str!("../data/arrays/c4.txt")),
    ("c6", include_str!("../data/arrays/c6.txt")),
    ("s4", include_str!("../data/arrays/s4.txt")),
    ("3pan", include_str!("../data/arrays/3pan.txt")),
    ("5pan", include_str!("../data/arrays/5pan.txt")),
    ("k5", include_str!("../data/arrays/k5.txt")),
    ("k33", include_str!("../data/arrays/k33.txt")),
    ("s6", include_str!("../data/arrays/s6.txt")),
];

/// Parses one of the bundled coordinate tables.
pub fn bundled_array(stem: &str) -> Result<AtomArray> {
    let text = BUNDLED_ARRAYS
        .iter()
        .find(|(k, _)| *k == stem)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Lookup(stem.to_string()))?;
    AtomArray::from_text(text)
}
