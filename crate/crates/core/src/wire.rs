//! Quantum-wire graph rewriting.
//!
//! A wire is an even chain of auxiliary atoms hung between a qubit vertex `a`
//! and one or more qubit vertices `b`. On the combined graph every wire adds
//! the path `a - w1 - ... - wM - b` (the last chain atom touches every `b`
//! when the wire fans out, which is how vertex splitting is realized). The
//! target graph is the base graph plus an edge `{a, b}` per wire endpoint.
//!
//! An independent set of the combined graph gains `M/2` chain atoms per wire,
//! minus one when both ends are occupied. Projecting the maximum independent
//! sets onto the qubits and discarding those with an occupied wire on both
//! ends yields exactly the maximum independent sets of the target.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{
    is_independent, mis_brute_force, parse_err, parse_usize, strip_comment, Graph, VertexSet,
};

/// Default bound on the degree a vertex may have in a physical array.
pub const DEFAULT_MAX_PHYSICAL_DEGREE: usize = 3;

/// Chain of auxiliary atoms joining `endpoint_a` to `endpoints_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wire {
    endpoint_a: usize,
    endpoints_b: Vec<usize>,
    chain: Vec<usize>,
}

impl Wire {
    /// Point-to-point wire; `chain[0]` touches `a`, the last atom touches `b`.
    pub fn new(a: usize, b: usize, chain: Vec<usize>) -> Result<Self> {
        Wire::fan_out(a, vec![b], chain)
    }

    /// Wire whose last chain atom touches every vertex in `group`.
    pub fn fan_out(a: usize, group: Vec<usize>, chain: Vec<usize>) -> Result<Self> {
        if chain.is_empty() || chain.len() % 2 == 1 {
            return Err(Error::Parity(chain.len()));
        }
        if group.is_empty() {
            return Err(Error::InvalidInput("wire has no far endpoint".into()));
        }
        let uniq: BTreeSet<usize> = group.iter().copied().collect();
        if uniq.len() != group.len() || uniq.contains(&a) {
            return Err(Error::InvalidInput(format!(
                "wire endpoints must be distinct (a = {a}, b = {group:?})"
            )));
        }
        let chain_set: BTreeSet<usize> = chain.iter().copied().collect();
        if chain_set.len() != chain.len() {
            return Err(Error::InvalidInput("repeated atom in wire chain".into()));
        }
        Ok(Wire {
            endpoint_a: a,
            endpoints_b: uniq.into_iter().collect(),
            chain,
        })
    }

    pub fn endpoint_a(&self) -> usize {
        self.endpoint_a
    }

    pub fn endpoints_b(&self) -> &[usize] {
        &self.endpoints_b
    }

    pub fn chain(&self) -> &[usize] {
        &self.chain
    }

    /// Number of wire atoms `M`.
    pub fn len(&self) -> usize {
        self.chain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chain.is_empty()
    }

    /// `f(n_A, n_B) = n_A * n_B`, with `n_B` the OR over a fanned-out end.
    pub fn frustration(&self, s: &VertexSet) -> bool {
        s.contains(self.endpoint_a) && self.endpoints_b.iter().any(|&b| s.contains(b))
    }

    fn path_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = vec![(self.endpoint_a, self.chain[0])];
        edges.extend(self.chain.windows(2).map(|w| (w[0], w[1])));
        let last = *self.chain.last().unwrap();
        edges.extend(self.endpoints_b.iter().map(|&b| (last, b)));
        edges
    }
}

/// Base graph `G0` on the qubit vertices plus its wires, and the combined
/// graph `G0+w` that is physically realized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WiredGraph {
    base: Graph,
    wires: Vec<Wire>,
    combined: Graph,
}

impl WiredGraph {
    /// Wraps a graph with no wires.
    pub fn bare(base: Graph) -> Self {
        WiredGraph {
            combined: base.clone(),
            base,
            wires: Vec::new(),
        }
    }

    /// Builds the combined graph. Wire atoms must be labeled
    /// `N+1..=N+sum(M)` in some order, disjoint across wires.
    pub fn new(base: Graph, wires: Vec<Wire>) -> Result<Self> {
        let n = base.n_vertices();
        let total: usize = n + wires.iter().map(Wire::len).sum::<usize>();
        let mut seen = BTreeSet::new();
        let mut target_pairs = BTreeSet::new();
        for w in &wires {
            for &q in std::iter::once(&w.endpoint_a).chain(&w.endpoints_b) {
                if q == 0 || q > n {
                    return Err(Error::InvalidInput(format!(
                        "wire endpoint {q} is not a qubit vertex (1..={n})"
                    )));
                }
            }
            for &b in &w.endpoints_b {
                if base.has_edge(w.endpoint_a, b) {
                    return Err(Error::Adjacency(w.endpoint_a, b));
                }
                let pair = (w.endpoint_a.min(b), w.endpoint_a.max(b));
                if !target_pairs.insert(pair) {
                    return Err(Error::Adjacency(pair.0, pair.1));
                }
            }
            for &c in &w.chain {
                if c <= n || c > total {
                    return Err(Error::InvalidInput(format!(
                        "wire atom {c} outside {}..={total}",
                        n + 1
                    )));
                }
                if !seen.insert(c) {
                    return Err(Error::InvalidInput(format!(
                        "wire atom {c} shared between wires"
                    )));
                }
            }
        }
        let mut combined = base.with_vertices(total - n);
        for w in &wires {
            for (u, v) in w.path_edges() {
                combined = combined.with_edge(u, v)?;
            }
        }
        Ok(WiredGraph {
            base,
            wires,
            combined,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn wires(&self) -> &[Wire] {
        &self.wires
    }

    pub fn combined(&self) -> &Graph {
        &self.combined
    }

    /// Number of qubit vertices `N`; qubits are labeled `1..=N`.
    pub fn n_qubits(&self) -> usize {
        self.base.n_vertices()
    }

    pub fn n_atoms(&self) -> usize {
        self.combined.n_vertices()
    }

    /// Serializes as an edge list of the base graph plus `wire a b : chain`
    /// lines; fanned-out ends are written `b1,b2`.
    pub fn to_text(&self) -> String {
        let mut out = self.base.to_edge_list();
        for w in &self.wires {
            let b: Vec<String> = w.endpoints_b.iter().map(|b| b.to_string()).collect();
            let chain: Vec<String> = w.chain.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!(
                "wire {} {} : {}\n",
                w.endpoint_a,
                b.join(","),
                chain.join(" ")
            ));
        }
        out
    }

    /// Parses [`WiredGraph::to_text`] output; `n` counts qubit vertices only.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut plain = String::new();
        let mut wires = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            let Some(rest) = line.strip_prefix("wire") else {
                plain.push_str(line);
                plain.push('\n');
                continue;
            };
            let (ends, chain) = rest
                .split_once(':')
                .ok_or_else(|| parse_err(idx, "wire line needs `a b : w1 .. wM`"))?;
            let mut ends = ends.split_whitespace();
            let a = parse_usize(
                ends.next()
                    .ok_or_else(|| parse_err(idx, "missing endpoint a"))?,
                idx,
            )?;
            let b = ends
                .next()
                .ok_or_else(|| parse_err(idx, "missing endpoint b"))?
                .split(',')
                .map(|t| parse_usize(t, idx))
                .collect::<Result<Vec<_>>>()?;
            if ends.next().is_some() {
                return Err(parse_err(idx, "trailing tokens before `:`"));
            }
            let chain = chain
                .split_whitespace()
                .map(|t| parse_usize(t, idx))
                .collect::<Result<Vec<_>>>()?;
            wires.push(Wire::fan_out(a, b, chain).map_err(|e| parse_err(idx, &e.to_string()))?);
            // keep line numbering aligned for the edge-list parser
            plain.push('\n');
        }
        let base = Graph::from_edge_list(&plain)?;
        WiredGraph::new(base, wires)
    }
}

/// Adds a point-to-point wire of `m` fresh atoms between `a` and `b`.
pub fn wire_edge(wg: &WiredGraph, a: usize, b: usize, m: usize) -> Result<WiredGraph> {
    if m == 0 || m % 2 == 1 {
        return Err(Error::Parity(m));
    }
    if a == b {
        return Err(Error::InvalidInput(format!(
            "cannot wire vertex {a} to itself"
        )));
    }
    wg.combined.check_vertex(a)?;
    wg.combined.check_vertex(b)?;
    if wg.combined.has_edge(a, b) || target_of(wg).has_edge(a, b) {
        return Err(Error::Adjacency(a, b));
    }
    let start = wg.n_atoms() + 1;
    let mut wires = wg.wires.clone();
    wires.push(Wire::new(a, b, (start..start + m).collect())?);
    WiredGraph::new(wg.base.clone(), wires)
}

/// How the chain atoms of a split are labeled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainLabels {
    /// `m` fresh atoms per wire, numbered consecutively after the target's vertices.
    Fresh(usize),
    /// Explicit chain per group, ordered from the center outwards.
    Explicit(Vec<Vec<usize>>),
}

/// Vertex-splitting plan: each group of the center's neighbors is reached
/// through its own fanned-out wire instead of a direct edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitPlan {
    pub center: usize,
    pub groups: Vec<Vec<usize>>,
    pub chains: ChainLabels,
    pub max_physical_degree: usize,
}

impl SplitPlan {
    pub fn new(center: usize, groups: Vec<Vec<usize>>, m: usize) -> Self {
        SplitPlan {
            center,
            groups,
            chains: ChainLabels::Fresh(m),
            max_physical_degree: DEFAULT_MAX_PHYSICAL_DEGREE,
        }
    }

    pub fn with_chains(center: usize, groups: Vec<Vec<usize>>, chains: Vec<Vec<usize>>) -> Self {
        SplitPlan {
            center,
            groups,
            chains: ChainLabels::Explicit(chains),
            max_physical_degree: DEFAULT_MAX_PHYSICAL_DEGREE,
        }
    }

    /// No split at all.
    pub fn none(center: usize) -> Self {
        SplitPlan::new(center, Vec::new(), 2)
    }

    /// The wires this plan produces for a target with `n` vertices.
    pub fn wires(&self, n: usize) -> Result<Vec<Wire>> {
        let chains: Vec<Vec<usize>> = match &self.chains {
            ChainLabels::Fresh(m) => (0..self.groups.len())
                .map(|i| (n + 1 + i * m..n + 1 + (i + 1) * m).collect())
                .collect(),
            ChainLabels::Explicit(c) => {
                if c.len() != self.groups.len() {
                    return Err(Error::Plan(format!(
                        "{} chains for {} groups",
                        c.len(),
                        self.groups.len()
                    )));
                }
                c.clone()
            }
        };
        self.groups
            .iter()
            .zip(chains)
            .map(|(g, c)| Wire::fan_out(self.center, g.clone(), c))
            .collect()
    }
}

/// Rewrites a high-degree vertex of `target` into wires feeding groups of
/// its neighbors.
pub fn split_vertex(target: &Graph, plan: &SplitPlan) -> Result<WiredGraph> {
    if plan.groups.is_empty() {
        return Ok(WiredGraph::bare(target.clone()));
    }
    let c = plan.center;
    target
        .check_vertex(c)
        .map_err(|e| Error::Plan(e.to_string()))?;
    if target.degree(c) <= plan.max_physical_degree {
        return Err(Error::Plan(format!(
            "vertex {c} has degree {} <= {}, nothing to split",
            target.degree(c),
            plan.max_physical_degree
        )));
    }
    let neighbors: BTreeSet<usize> = target.neighbors(c).collect();
    let mut covered = BTreeSet::new();
    for g in &plan.groups {
        if g.is_empty() {
            return Err(Error::Plan("empty neighbor group".into()));
        }
        for &v in g {
            if !neighbors.contains(&v) {
                return Err(Error::Plan(format!("{v} is not a neighbor of {c}")));
            }
            if !covered.insert(v) {
                return Err(Error::Plan(format!("{v} appears in two groups")));
            }
        }
    }
    if covered != neighbors {
        let missing: Vec<_> = neighbors.difference(&covered).collect();
        return Err(Error::Plan(format!(
            "neighbors {missing:?} are not grouped"
        )));
    }
    let mut base = target.clone();
    for &v in &covered {
        base = base.without_edge(c, v)?;
    }
    let wires = plan.wires(target.n_vertices())?;
    let wg = WiredGraph::new(base, wires).map_err(|e| Error::Plan(e.to_string()))?;
    let touched = std::iter::once(c).chain(wg.wires.iter().flat_map(|w| w.chain.iter().copied()));
    for v in touched {
        if wg.combined.degree(v) > plan.max_physical_degree {
            return Err(Error::Plan(format!(
                "vertex {v} still has degree {} after splitting",
                wg.combined.degree(v)
            )));
        }
    }
    Ok(wg)
}

/// Target graph `G_T`: the base plus an edge per wire endpoint pair.
pub fn target_of(wg: &WiredGraph) -> Graph {
    let mut g = wg.base.clone();
    for w in &wg.wires {
        for &b in &w.endpoints_b {
            g = g
                .with_edge(w.endpoint_a, b)
                .expect("wired pairs are validated non-adjacent");
        }
    }
    g
}

/// Drops wire-atom occupations, keeping qubit vertices `1..=N`.
pub fn project_solution(s: &VertexSet, wg: &WiredGraph) -> VertexSet {
    s.restrict_to_prefix(wg.n_qubits())
}

/// True iff some wire has both of its boundary atoms occupied.
pub fn is_frustrated(s: &VertexSet, wg: &WiredGraph) -> bool {
    wg.wires.iter().any(|w| w.frustration(s))
}

/// Intermediate sets of the wire identity, kept for inspection.
#[derive(Clone, Debug)]
pub struct WireAnalysis {
    /// Maximum independent sets of the combined graph.
    pub combined_mis: BTreeSet<VertexSet>,
    /// Projected sets with the number of combined pre-images of each.
    pub projected: BTreeMap<VertexSet, usize>,
    /// Projected sets with a frustrated wire.
    pub frustrated: BTreeSet<VertexSet>,
    /// Projected minus frustrated.
    pub solutions: BTreeSet<VertexSet>,
}

/// Runs the oracle on the combined graph and applies projection and the
/// frustration filter.
pub fn analyze(wg: &WiredGraph) -> Result<WireAnalysis> {
    let combined_mis = mis_brute_force(&wg.combined)?;
    let mut projected = BTreeMap::new();
    for s in &combined_mis {
        *projected.entry(project_solution(s, wg)).or_insert(0) += 1;
    }
    let frustrated: BTreeSet<VertexSet> = projected
        .keys()
        .filter(|s| is_frustrated(s, wg))
        .cloned()
        .collect();
    let solutions = projected
        .keys()
        .filter(|s| !frustrated.contains(*s))
        .cloned()
        .collect();
    Ok(WireAnalysis {
        combined_mis,
        projected,
        frustrated,
        solutions,
    })
}

/// Maximum independent sets of the target, recovered from the combined graph.
pub fn mis_via_wires(wg: &WiredGraph) -> Result<BTreeSet<VertexSet>> {
    Ok(analyze(wg)?.solutions)
}

/// True when `s` is independent on the qubit part of the combined graph.
pub fn is_base_independent(s: &VertexSet, wg: &WiredGraph) -> bool {
    s.max().is_none_or(|m| m <= wg.n_qubits()) && is_independent(&wg.base, s).unwrap_or(false)
}
