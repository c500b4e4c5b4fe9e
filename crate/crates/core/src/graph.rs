//! Simple undirected graphs with 1-based vertex labels, vertex sets, and the
//! exhaustive maximum-independent-set oracle everything else is checked
//! against.
//!
//! Edge-list text format:
//!
//! ```text
//! # comment
//! n 4
//! 1 2
//! 2 3
//! ```

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest graph `mis_brute_force` accepts.
pub const MAX_BRUTE_FORCE: usize = 30;

/// Undirected simple graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<BTreeSet<usize>>,
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
            adj: vec![BTreeSet::new(); n + 1],
        }
    }

    /// Builds a graph, rejecting self-loops, duplicates and out-of-range labels.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    fn insert_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
        }
        if !self.edges.insert(ordered(u, v)) {
            return Err(Error::InvalidInput(format!("duplicate edge {{{u},{v}}}")));
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        Ok(())
    }

    /// Returns a copy with one more edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut g = self.clone();
        g.insert_edge(u, v)?;
        Ok(g)
    }

    /// Returns a copy with `extra` isolated vertices appended.
    pub fn with_vertices(&self, extra: usize) -> Self {
        let mut g = self.clone();
        g.n += extra;
        g.adj.resize(g.n + 1, BTreeSet::new());
        g
    }

    /// Returns a copy without the edge `{u, v}`; missing edges are an error.
    pub fn without_edge(&self, u: usize, v: usize) -> Result<Self> {
        let mut g = self.clone();
        if !g.edges.remove(&ordered(u, v)) {
            return Err(Error::InvalidInput(format!(
                "no edge {{{u},{v}}} to remove"
            )));
        }
        g.adj[u].remove(&v);
        g.adj[v].remove(&u);
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.n
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&ordered(u, v))
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v == 0 || v > self.n {
            Err(Error::InvalidInput(format!(
                "vertex {v} outside 1..={}",
                self.n
            )))
        } else {
            Ok(())
        }
    }

    /// Subgraph induced on vertices `1..=k`.
    pub fn restrict_to_prefix(&self, k: usize) -> Graph {
        let k = k.min(self.n);
        let mut g = Graph::empty(k);
        for (u, v) in self.edges() {
            if v <= k {
                g.insert_edge(u, v).expect("edge of a valid graph");
            }
        }
        g
    }

    /// Neighbor bitmasks with bit `v-1` for vertex `v`; requires `n <= 64`.
    pub(crate) fn adjacency_masks(&self) -> Vec<u64> {
        assert!(self.n <= 64, "bitmask adjacency needs n <= 64");
        let mut masks = vec![0u64; self.n];
        for (u, v) in self.edges() {
            masks[u - 1] |= 1 << (v - 1);
            masks[v - 1] |= 1 << (u - 1);
        }
        masks
    }

    /// Serializes to the edge-list text format.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("n {}\n", self.n);
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Parses the edge-list text format.
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut n = None;
        let mut pending = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let mut toks = line.split_whitespace();
            let first = toks.next().unwrap();
            if first == "n" {
                if n.is_some() {
                    return Err(parse_err(idx, "repeated `n` header"));
                }
                let val = toks
                    .next()
                    .ok_or_else(|| parse_err(idx, "missing vertex count"))?;
                n = Some(parse_usize(val, idx)?);
                continue;
            }
            let second = toks
                .next()
                .ok_or_else(|| parse_err(idx, "expected `u v`"))?;
            if toks.next().is_some() {
                return Err(parse_err(idx, "trailing tokens after edge"));
            }
            pending.push((parse_usize(first, idx)?, parse_usize(second, idx)?, idx));
        }
        let n = n.ok_or_else(|| parse_err(0, "missing `n <N>` header"))?;
        let mut g = Graph::empty(n);
        for (u, v, idx) in pending {
            g.insert_edge(u, v)
                .map_err(|e| parse_err(idx, &e.to_string()))?;
        }
        Ok(g)
    }
}

pub(crate) fn strip_comment(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

pub(crate) fn parse_err(idx: usize, msg: &str) -> Error {
    Error::Parse {
        line: idx + 1,
        msg: msg.to_string(),
    }
}

pub(crate) fn parse_usize(tok: &str, idx: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(idx, &format!("`{tok}` is not a vertex label")))
}

/// Sorted, duplicate-free set of 1-based vertex labels.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexSet(BTreeSet<usize>);

impl VertexSet {
    pub fn new() -> Self {
        VertexSet(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.contains(&v)
    }

    pub fn insert(&mut self, v: usize) -> bool {
        self.0.insert(v)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Members with label `<= k`.
    pub fn restrict_to_prefix(&self, k: usize) -> VertexSet {
        VertexSet(self.0.range(..=k).copied().collect())
    }

    /// Decodes a basis index with `n` atoms, atom 1 in the most significant bit.
    pub fn from_index(index: usize, n: usize) -> VertexSet {
        (1..=n).filter(|&v| index >> (n - v) & 1 == 1).collect()
    }

    /// Inverse of [`VertexSet::from_index`].
    pub fn to_index(&self, n: usize) -> usize {
        self.iter().fold(0, |acc, v| acc | 1 << (n - v))
    }

    pub(crate) fn from_mask(mask: u64) -> VertexSet {
        (0..64)
            .filter(|b| mask >> b & 1 == 1)
            .map(|b| b + 1)
            .collect()
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl<const K: usize> From<[usize; K]> for VertexSet {
    fn from(arr: [usize; K]) -> Self {
        arr.into_iter().collect()
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for VertexSet {
    type Err = Error;

    /// Accepts `{1,3}`, `1,3`, `1 3` or `{}`.
    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        inner
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::InvalidInput(format!("bad vertex label `{t}`")))
            })
            .collect()
    }
}

/// Formats a family of vertex sets as `{{1,3},{1,4}}`.
pub fn format_family<'a, I: IntoIterator<Item = &'a VertexSet>>(sets: I) -> String {
    let parts: Vec<String> = sets.into_iter().map(|s| s.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// True iff no edge of `g` has both endpoints in `s`.
pub fn is_independent(g: &Graph, s: &VertexSet) -> Result<bool> {
    for v in s.iter() {
        g.check_vertex(v)?;
    }
    Ok(!g.edges().any(|(u, v)| s.contains(u) && s.contains(v)))
}

/// All maximum independent sets of `g`, by exhaustive branch-and-bound.
///
/// The whole degenerate family is returned, not a single witness.
pub fn mis_brute_force(g: &Graph) -> Result<BTreeSet<VertexSet>> {
    if g.n_vertices() > MAX_BRUTE_FORCE {
        return Err(Error::Capacity {
            what: "vertex count for brute-force MIS",
            got: g.n_vertices(),
            limit: MAX_BRUTE_FORCE,
        });
    }
    let masks = g.adjacency_masks();
    let all = if g.n_vertices() == 0 {
        0
    } else {
        u64::MAX >> (64 - g.n_vertices())
    };
    let mut search = MisSearch {
        adj: &masks,
        best: 0,
        found: Vec::new(),
    };
    search.run(all, 0, 0);
    Ok(search.found.into_iter().map(VertexSet::from_mask).collect())
}

struct MisSearch<'a> {
    adj: &'a [u64],
    best: u32,
    found: Vec<u64>,
}

impl MisSearch<'_> {
    fn run(&mut self, cand: u64, chosen: u64, size: u32) {
        if cand == 0 {
            if size > self.best {
                self.best = size;
                self.found.clear();
            }
            if size == self.best {
                self.found.push(chosen);
            }
            return;
        }
        if size + cand.count_ones() < self.best {
            return;
        }
        let v = cand.trailing_zeros() as usize;
        let bit = 1u64 << v;
        self.run(cand & !bit & !self.adj[v], chosen | bit, size + 1);
        // A vertex with no remaining candidate neighbors belongs to every
        // maximum extension, so the exclude branch is dead.
        if self.adj[v] & cand != 0 {
            self.run(cand & !bit, chosen, size);
        }
    }
}
