//! Named graphs, numbered the way the demonstrations number them.
//!
//! Two labelings of the 3-pan are used: `3-pan` is the triangle `{2,3,4}`
//! with pendant 1, and `3-pan-t` is the triangle `{1,2,3}` with pendant 4 on
//! vertex 3, which is what wiring vertices 1 and 2 of `S4` produces.
//!
//! `C6`, `5-pan`, `K5exp`, `K3,3exp` and `S6exp` have wired constructions
//! available through [`wired`]; every other name resolves to a bare graph.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::wire::{split_vertex, SplitPlan, Wire, WiredGraph};

/// Canonical catalog names.
pub const NAMES: &[&str] = &[
    "P4",
    "C4",
    "C6",
    "S4",
    "3-pan",
    "3-pan-t",
    "5-pan",
    "K5",
    "K5-e",
    "K3,3",
    "A",
    "S6",
    "W7",
    "X101",
    "Moser spindle",
    "7K1",
    "K5exp",
    "K3,3exp",
    "S6exp",
];

fn canonical(name: &str) -> Option<&'static str> {
    let key: String = name
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .collect::<String>()
        .to_ascii_lowercase();
    let found = match key.as_str() {
        "p4" => "P4",
        "c4" => "C4",
        "c6" => "C6",
        "s4" => "S4",
        "3-pan" | "3pan" => "3-pan",
        "3-pan-t" | "3pant" => "3-pan-t",
        "5-pan" | "5pan" => "5-pan",
        "k5" => "K5",
        "k5-e" | "k5e" => "K5-e",
        "k3,3" | "k33" => "K3,3",
        "a" => "A",
        "s6" => "S6",
        "w7" => "W7",
        "x101" => "X101",
        "moserspindle" | "moser" => "Moser spindle",
        "7k1" => "7K1",
        "k5exp" => "K5exp",
        "k3,3exp" | "k33exp" => "K3,3exp",
        "s6exp" => "S6exp",
        _ => return None,
    };
    Some(found)
}

fn g<const K: usize>(n: usize, edges: [(usize, usize); K]) -> Graph {
    Graph::new(n, edges).expect("catalog graphs are well formed")
}

fn complete(n: usize) -> Graph {
    Graph::new(n, (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)))).unwrap()
}

fn moser_spindle() -> Graph {
    // Two unit rhombi 1-2-3-4 and 1-5-6-7 sharing vertex 1, tips 4 and 7 joined.
    g(
        7,
        [
            (1, 2),
            (1, 3),
            (2, 3),
            (2, 4),
            (3, 4),
            (1, 5),
            (1, 6),
            (5, 6),
            (5, 7),
            (6, 7),
            (4, 7),
        ],
    )
}

fn bare(name: &'static str) -> Graph {
    match name {
        "P4" => g(4, [(1, 2), (2, 3), (3, 4)]),
        "C4" => g(4, [(1, 2), (2, 3), (3, 4), (1, 4)]),
        "C6" => g(6, [(1, 2), (2, 3), (3, 4), (1, 5), (5, 6), (4, 6)]),
        "S4" => g(4, [(1, 3), (2, 3), (3, 4)]),
        "3-pan" => g(4, [(1, 2), (2, 3), (2, 4), (3, 4)]),
        "3-pan-t" => g(4, [(1, 2), (1, 3), (2, 3), (3, 4)]),
        "5-pan" => g(6, [(1, 3), (2, 3), (3, 4), (1, 5), (5, 6), (2, 6)]),
        "K5" => complete(5),
        "K5-e" => complete(5).without_edge(2, 5).unwrap(),
        "K3,3" => Graph::new(6, (1..=3).flat_map(|u| (4..=6).map(move |v| (u, v)))).unwrap(),
        "A" => g(6, [(1, 5), (2, 4), (2, 5), (2, 6), (3, 5), (3, 6)]),
        "S6" => Graph::new(7, (2..=7).map(|v| (1, v))).unwrap(),
        "W7" => {
            let rim = [(2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 2)];
            Graph::new(7, (2..=7).map(|v| (1, v)).chain(rim)).unwrap()
        }
        "X101" => moser_spindle().without_edge(4, 7).unwrap(),
        "Moser spindle" => moser_spindle(),
        "7K1" => Graph::empty(7),
        exp => wired_construction(exp)
            .expect("wired names have constructions")
            .combined()
            .clone(),
    }
}

fn wired_construction(name: &str) -> Option<WiredGraph> {
    let wg = match name {
        "C6" => WiredGraph::new(bare("P4"), vec![Wire::new(1, 4, vec![5, 6]).unwrap()]),
        "5-pan" => WiredGraph::new(bare("S4"), vec![Wire::new(1, 2, vec![5, 6]).unwrap()]),
        "K5exp" => WiredGraph::new(
            bare("K5-e"),
            vec![Wire::new(2, 5, (6..=11).collect()).unwrap()],
        ),
        "K3,3exp" => WiredGraph::new(
            bare("A"),
            vec![
                Wire::new(1, 4, vec![7, 8]).unwrap(),
                Wire::new(3, 4, (9..=14).rev().collect()).unwrap(),
                Wire::new(1, 6, (15..=20).collect()).unwrap(),
            ],
        ),
        "S6exp" => split_vertex(
            &bare("S6"),
            &SplitPlan::with_chains(
                1,
                vec![vec![2, 3], vec![4, 5], vec![6, 7]],
                vec![vec![11, 8], vec![12, 9], vec![13, 10]],
            ),
        ),
        _ => return None,
    };
    Some(wg.expect("catalog wirings are well formed"))
}

/// Looks up a catalog graph; wired names give their combined graph.
pub fn graph(name: &str) -> Result<Graph> {
    let key = canonical(name).ok_or_else(|| Error::Lookup(name.to_string()))?;
    Ok(bare(key))
}

/// Looks up a wired construction, falling back to a bare graph with no wires.
pub fn wired(name: &str) -> Result<WiredGraph> {
    let key = canonical(name).ok_or_else(|| Error::Lookup(name.to_string()))?;
    Ok(wired_construction(key).unwrap_or_else(|| WiredGraph::bare(bare(key))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{mis_brute_force, VertexSet};
    use crate::wire::target_of;

    #[test]
    fn sizes() {
        let cases = [
            ("3-pan", 4, 4),
            ("K5", 5, 10),
            ("K3,3", 6, 9),
            ("K5-e", 5, 9),
            ("Moser spindle", 7, 11),
            ("X101", 7, 10),
            ("W7", 7, 12),
            ("7K1", 7, 0),
            ("K5exp", 11, 9 + 7),
            ("K3,3exp", 20, 6 + 3 + 7 + 7),
            ("S6exp", 13, 12),
        ];
        for (name, n, m) in cases {
            let gr = graph(name).unwrap();
            assert_eq!((gr.n_vertices(), gr.n_edges()), (n, m), "{name}");
        }
    }

    #[test]
    fn aliases_and_unknown_names() {
        assert_eq!(graph("k33").unwrap(), graph("K3,3").unwrap());
        assert_eq!(graph("3pan").unwrap(), graph("3-pan").unwrap());
        assert!(matches!(graph("Petersen"), Err(Error::Lookup(_))));
        for name in NAMES {
            assert!(graph(name).is_ok(), "{name}");
        }
    }

    #[test]
    fn wired_targets() {
        assert_eq!(target_of(&wired("C6").unwrap()), graph("C4").unwrap());
        assert_eq!(
            target_of(&wired("5-pan").unwrap()),
            graph("3-pan-t").unwrap()
        );
        assert_eq!(target_of(&wired("K5exp").unwrap()), graph("K5").unwrap());
        assert_eq!(
            target_of(&wired("K3,3exp").unwrap()),
            graph("K3,3").unwrap()
        );
        assert_eq!(target_of(&wired("S6exp").unwrap()), graph("S6").unwrap());
        assert!(wired("P4").unwrap().wires().is_empty());
    }

    #[test]
    fn x101_plus_wire_is_moser_spindle() {
        let wg = crate::wire::wire_edge(&wired("X101").unwrap(), 4, 7, 6).unwrap();
        let target = target_of(&wg);
        assert_eq!(target, graph("Moser spindle").unwrap());
        assert_eq!(
            crate::wire::mis_via_wires(&wg).unwrap(),
            mis_brute_force(&target).unwrap()
        );
        assert!(mis_brute_force(&target)
            .unwrap()
            .iter()
            .all(|s: &VertexSet| s.len() == 2));
    }
}
