//! Simple undirected graphs as structures over one symmetric, irreflexive relation `E`.

use crate::logic::{FiniteStructure, Model, StructureError};

pub const EDGE: &str = "E";

/// Graph on `n` vertices with each listed edge in both directions.
pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<FiniteStructure, StructureError> {
    let mut g = FiniteStructure::new(n)?;
    g.add_relation(EDGE, 2)?;
    for &(a, b) in edges {
        g.insert_tuple(EDGE, &[a, b])?;
        g.insert_tuple(EDGE, &[b, a])?;
    }
    Ok(g)
}

fn build(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> FiniteStructure {
    let edges: Vec<_> = edges.into_iter().collect();
    from_edges(n, &edges).expect("vertex indices are in range")
}

pub fn edgeless(n: usize) -> FiniteStructure {
    build(n, [])
}

pub fn complete(n: usize) -> FiniteStructure {
    build(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))))
}

pub fn path(n: usize) -> FiniteStructure {
    build(n, (1..n).map(|b| (b - 1, b)))
}

/// The cycle `C_n`; needs `n >= 3`.
pub fn cycle(n: usize) -> FiniteStructure {
    assert!(n >= 3, "a cycle needs at least three vertices");
    build(n, (0..n).map(|a| (a, (a + 1) % n)))
}

/// Undirected edges `a < b`.
pub fn edges(g: &impl Model) -> Vec<(usize, usize)> {
    let n = g.size();
    (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .filter(|&(a, b)| g.relation(EDGE, &[a, b]).unwrap_or(false))
        .collect()
}

pub fn edge_count(g: &impl Model) -> usize {
    edges(g).len()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("structure is not a simple graph: {0}")]
    NotAGraph(String),
}

/// Checks the signature is exactly `{E/2}` and `E` is irreflexive and symmetric.
pub fn check_simple_graph(g: &FiniteStructure) -> Result<(), GraphError> {
    let sig = g.signature();
    let only_edges = sig.relations().len() == 1 && sig.constants().is_empty() && sig.functions().is_empty();
    if sig.relation_arity(EDGE) != Some(2) || !only_edges {
        return Err(GraphError::NotAGraph("signature must be a single binary relation E".into()));
    }
    for t in g.tuples_of(EDGE) {
        if t[0] == t[1] {
            return Err(GraphError::NotAGraph(format!("loop at {}", t[0])));
        }
        if !g.holds(EDGE, &[t[1], t[0]]) {
            return Err(GraphError::NotAGraph(format!("edge ({}, {}) has no reverse", t[0], t[1])));
        }
    }
    Ok(())
}

/// Same vertices, edges between exactly the distinct non-adjacent pairs.
pub fn complement_graph(g: &FiniteStructure) -> Result<FiniteStructure, GraphError> {
    check_simple_graph(g)?;
    let n = g.size();
    Ok(build(n, (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|&(a, b)| !g.holds(EDGE, &[a, b]))))
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

/// Every labelled graph on `1..=max_n` vertices, by size then edge mask.
pub fn labelled_graphs(max_n: usize) -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let ps = pairs(n);
        for mask in 0..1u64 << ps.len() {
            out.push(build(n, ps.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)));
        }
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Smallest edge mask over all relabellings.
fn canonical_mask(n: usize, mask: u64, perms: &[Vec<usize>]) -> u64 {
    let ps = pairs(n);
    let index = |a: usize, b: usize| ps.iter().position(|&e| e == (a.min(b), a.max(b))).unwrap();
    perms
        .iter()
        .map(|p| {
            ps.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(0u64, |acc, (_, &(a, b))| acc | 1 << index(p[a], p[b]))
        })
        .min()
        .unwrap_or(0)
}

/// One graph per isomorphism class on `1..=max_n` vertices.
pub fn graphs_up_to_isomorphism(max_n: usize) -> Vec<FiniteStructure> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        let ps = pairs(n);
        let perms = permutations(n);
        for mask in 0..1u64 << ps.len() {
            if canonical_mask(n, mask, &perms) == mask {
                out.push(build(n, ps.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e)));
            }
        }
    }
    out
}

/// The graph with vertex `v` renamed to `perm[v]`.
pub fn relabel(g: &FiniteStructure, perm: &[usize]) -> FiniteStructure {
    build(g.size(), edges(g).into_iter().map(|(a, b)| (perm[a], perm[b])))
}
