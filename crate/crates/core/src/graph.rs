//! Finite simple directed graphs with a declared degree bound, exact
//! cycle-matroid rank, and the elementary symmetry checks that hold for
//! every finite graph under the uniform vertex measure.
//!
//! Orientation is stored on every edge but ignored by all rank and
//! component computations; it matters only to canonical forms and rooted
//! ball comparisons elsewhere in the crate.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::quotient::EdgeColoring;
use crate::{Error, Rational, Result};

/// A finite simple directed graph with bounded degree.
///
/// Edge identifiers are the 0-based positions in the edge list and are
/// stable across all operations. Degree counts the unordered edge once
/// (in + out), and must not exceed the declared bound anywhere.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    vertex_count: usize,
    degree_bound: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertex_count: usize,
    degree_bound: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Validates and builds a graph. Rejects loops, repeated unordered
    /// pairs, out-of-range endpoints, and degree-bound violations.
    pub fn new(
        vertex_count: usize,
        degree_bound: usize,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraph("vertex count must be positive".into()));
        }
        if degree_bound == 0 {
            return Err(Error::InvalidGraph("degree bound must be positive".into()));
        }
        let mut seen = BTreeSet::new();
        let mut degree = vec![0usize; vertex_count];
        for &(tail, head) in &edges {
            if tail >= vertex_count || head >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge ({tail}, {head}) out of range for {vertex_count} vertices"
                )));
            }
            if tail == head {
                return Err(Error::InvalidGraph(format!("loop at vertex {tail}")));
            }
            let key = (tail.min(head), tail.max(head));
            if !seen.insert(key) {
                return Err(Error::InvalidGraph(format!(
                    "repeated edge between {} and {}",
                    key.0, key.1
                )));
            }
            degree[tail] += 1;
            degree[head] += 1;
        }
        if let Some((v, &d)) = degree.iter().enumerate().find(|&(_, &d)| d > degree_bound) {
            return Err(Error::InvalidGraph(format!(
                "vertex {v} has degree {d}, exceeding bound {degree_bound}"
            )));
        }
        Ok(Graph {
            vertex_count,
            degree_bound,
            edges,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn has_directed_edge(&self, tail: usize, head: usize) -> bool {
        self.edges.contains(&(tail, head))
    }

    /// Undirected adjacency: (neighbor, edge id) pairs in edge-id order.
    pub fn incidences(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (id, &(t, h)) in self.edges.iter().enumerate() {
            adj[t].push((h, id));
            adj[h].push((t, id));
        }
        adj
    }

    /// Returns the graph with edge `id` reversed. Rank computations must be
    /// invariant under this.
    pub fn with_edge_reversed(&self, id: usize) -> Result<Self> {
        if id >= self.edges.len() {
            return Err(Error::EdgeOutOfRange {
                id,
                edge_count: self.edges.len(),
            });
        }
        let mut edges = self.edges.clone();
        edges[id] = (edges[id].1, edges[id].0);
        Graph::new(self.vertex_count, self.degree_bound, edges)
    }

    /// Applies a vertex permutation: `perm[v]` is the new id of `v`. Edge
    /// order is preserved.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.vertex_count {
            return Err(Error::InvalidGraph(format!(
                "permutation has length {}, expected {}",
                perm.len(),
                self.vertex_count
            )));
        }
        let mut seen = vec![false; self.vertex_count];
        for &p in perm {
            if p >= self.vertex_count || seen[p] {
                return Err(Error::InvalidGraph("not a permutation".into()));
            }
            seen[p] = true;
        }
        let edges = self.edges.iter().map(|&(t, h)| (perm[t], perm[h])).collect();
        Graph::new(self.vertex_count, self.degree_bound, edges)
    }

    pub fn is_connected(&self) -> bool {
        let full = EdgeSubset::full(self.edge_count());
        components(self, &full).map(|c| c.len() == 1).unwrap_or(false)
    }

    /// Parses the plain-text edge list form: first line `vertex_count D`,
    /// then one `tail head` pair per line.
    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::InvalidGraph("empty edge list".into()))?;
        let mut parts = header.split_whitespace();
        let parse = |s: Option<&str>, what: &str| -> Result<usize> {
            s.ok_or_else(|| Error::InvalidGraph(format!("missing {what}")))?
                .parse()
                .map_err(|_| Error::InvalidGraph(format!("bad {what}")))
        };
        let vertex_count = parse(parts.next(), "vertex count")?;
        let degree_bound = parse(parts.next(), "degree bound")?;
        let mut edges = Vec::new();
        for line in lines {
            let mut parts = line.split_whitespace();
            let tail = parse(parts.next(), "tail")?;
            let head = parse(parts.next(), "head")?;
            edges.push((tail, head));
        }
        Graph::new(vertex_count, degree_bound, edges)
    }

    /// Writes the plain-text edge list form; `from_edge_list_text` followed
    /// by this method round-trips bit-exactly.
    pub fn to_edge_list_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertex_count, self.degree_bound);
        for &(t, h) in &self.edges {
            let _ = writeln!(out, "{t} {h}");
        }
        out
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let g: GraphJson = serde_json::from_str(json)?;
        Graph::new(g.vertex_count, g.degree_bound, g.edges)
    }

    pub fn to_json_string(&self) -> String {
        let g = GraphJson {
            vertex_count: self.vertex_count,
            degree_bound: self.degree_bound,
            edges: self.edges.clone(),
        };
        serde_json::to_string_pretty(&g).expect("graph serialization cannot fail")
    }
}

/// A subset of edge identifiers of some graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSubset {
    members: BTreeSet<usize>,
}

impl EdgeSubset {
    pub fn new<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        EdgeSubset {
            members: ids.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        EdgeSubset {
            members: BTreeSet::new(),
        }
    }

    pub fn full(edge_count: usize) -> Self {
        EdgeSubset {
            members: (0..edge_count).collect(),
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.members.contains(&id)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn union(&self, other: &EdgeSubset) -> EdgeSubset {
        EdgeSubset {
            members: self.members.union(&other.members).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &EdgeSubset) -> EdgeSubset {
        EdgeSubset {
            members: self.members.intersection(&other.members).copied().collect(),
        }
    }

    pub fn is_subset(&self, other: &EdgeSubset) -> bool {
        self.members.is_subset(&other.members)
    }

    fn validate(&self, g: &Graph) -> Result<()> {
        if let Some(&id) = self.members.iter().next_back() {
            if id >= g.edge_count() {
                return Err(Error::EdgeOutOfRange {
                    id,
                    edge_count: g.edge_count(),
                });
            }
        }
        Ok(())
    }
}

/// Union-find with path compression. Representative is the smallest vertex
/// id in the set, so output is reproducible.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn unite(&mut self, x: usize, y: usize) {
        let rx = self.find(x);
        let ry = self.find(y);
        if rx != ry {
            // smaller id wins, keeping representatives deterministic
            let (lo, hi) = (rx.min(ry), rx.max(ry));
            self.parent[hi] = lo;
        }
    }
}

/// Connected components of `(V, f)`, orientation ignored. Blocks are sorted
/// internally and ordered by their smallest vertex id.
pub fn components(g: &Graph, f: &EdgeSubset) -> Result<Vec<Vec<usize>>> {
    f.validate(g)?;
    let mut uf = UnionFind::new(g.vertex_count());
    for id in f.iter() {
        let (t, h) = g.edges()[id];
        uf.unite(t, h);
    }
    let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); g.vertex_count()];
    for v in 0..g.vertex_count() {
        let root = uf.find(v);
        blocks[root].push(v);
    }
    blocks.retain(|b| !b.is_empty());
    Ok(blocks)
}

/// Normalized cycle-matroid rank `(|V| - c(f)) / |V|` as an exact rational.
pub fn normalized_rank(g: &Graph, f: &EdgeSubset) -> Result<Rational> {
    let c = components(g, f)?.len();
    let n = g.vertex_count();
    Ok(Rational::new((n - c) as i64, n as i64))
}

/// The same rank computed the other way: the vertex-average of
/// `1 - 1/|component of x|`, summed exactly in big rationals before
/// reduction. Kept as a second route for cross-checking.
pub fn rank_by_vertex_average(g: &Graph, f: &EdgeSubset) -> Result<Rational> {
    let blocks = components(g, f)?;
    let n = g.vertex_count();
    let mut comp_size = vec![0usize; n];
    for block in &blocks {
        for &v in block {
            comp_size[v] = block.len();
        }
    }
    let mut total: BigRational = BigRational::zero();
    for &size in &comp_size {
        let share =
            BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(size as i64));
        total += share;
    }
    let avg = total / BigRational::new(BigInt::from(n as i64), BigInt::one());
    let numer = i64::try_from(avg.numer().clone())
        .map_err(|_| Error::InvalidGraph("rank numerator overflow".into()))?;
    let denom = i64::try_from(avg.denom().clone())
        .map_err(|_| Error::InvalidGraph("rank denominator overflow".into()))?;
    Ok(Ratio::new(numer, denom))
}

/// Finite involution-invariance identity: the number of edges counted from
/// `a` into `b` equals the count from `b` into `a`. True for every finite
/// graph under the uniform vertex measure; exposed as a sanity check.
pub fn involution_symmetry_check(g: &Graph, a: &[usize], b: &[usize]) -> bool {
    let in_a: BTreeSet<usize> = a.iter().copied().collect();
    let in_b: BTreeSet<usize> = b.iter().copied().collect();
    let deg_into = |from: &BTreeSet<usize>, to: &BTreeSet<usize>| -> usize {
        let mut total = 0;
        for &(t, h) in g.edges() {
            if from.contains(&t) && to.contains(&h) {
                total += 1;
            }
            if from.contains(&h) && to.contains(&t) {
                total += 1;
            }
        }
        total
    };
    deg_into(&in_a, &in_b) == deg_into(&in_b, &in_a)
}

/// Greedy proper edge coloring: edges in identifier order, smallest color
/// not used on an incident edge. Uses at most `2D - 1` colors.
pub fn greedy_proper_edge_coloring(g: &Graph) -> EdgeColoring {
    let max_colors = 2 * g.degree_bound() - 1;
    let mut colors = vec![0u8; g.edge_count()];
    let mut at_vertex: Vec<Vec<u8>> = vec![Vec::new(); g.vertex_count()];
    for (id, &(t, h)) in g.edges().iter().enumerate() {
        let mut color = 1u8;
        while at_vertex[t].contains(&color) || at_vertex[h].contains(&color) {
            color += 1;
        }
        debug_assert!(usize::from(color) <= max_colors);
        colors[id] = color;
        at_vertex[t].push(color);
        at_vertex[h].push(color);
    }
    let k = colors.iter().copied().max().unwrap_or(1) as usize;
    EdgeColoring::new(k.max(1), colors).expect("greedy coloring is always valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn cycle(n: usize) -> Graph {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::new(n, 2, edges).unwrap()
    }

    pub(crate) fn path(n: usize) -> Graph {
        let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
        Graph::new(n, 2, edges).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(Graph::new(0, 2, vec![]).is_err());
        assert!(Graph::new(2, 2, vec![(0, 0)]).is_err());
        assert!(Graph::new(2, 2, vec![(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, 2, vec![(0, 2)]).is_err());
        // degree bound enforced at construction
        assert!(Graph::new(4, 1, vec![(0, 1), (0, 2)]).is_err());
        assert!(Graph::new(4, 2, vec![(0, 1), (0, 2)]).is_ok());
    }

    #[test]
    fn components_of_triangle_and_empty_set() {
        let g = cycle(3);
        let all = EdgeSubset::full(3);
        assert_eq!(components(&g, &all).unwrap(), vec![vec![0, 1, 2]]);
        let none = EdgeSubset::empty();
        assert_eq!(
            components(&g, &none).unwrap(),
            vec![vec![0], vec![1], vec![2]]
        );
    }

    #[test]
    fn components_of_path_fragment() {
        // P_4 with only the 0-1 edge kept: {0,1}, {2}, {3}
        let g = path(4);
        let f = EdgeSubset::new([0]);
        assert_eq!(
            components(&g, &f).unwrap(),
            vec![vec![0, 1], vec![2], vec![3]]
        );
    }

    #[test]
    fn components_rejects_out_of_range() {
        let g = cycle(3);
        let f = EdgeSubset::new([7]);
        assert!(matches!(
            components(&g, &f),
            Err(Error::EdgeOutOfRange { id: 7, .. })
        ));
    }

    #[test]
    fn rank_of_cycles_and_k2() {
        for n in 3..=8 {
            let g = cycle(n);
            let r = normalized_rank(&g, &EdgeSubset::full(n)).unwrap();
            assert_eq!(r, Rational::new(n as i64 - 1, n as i64));
        }
        let k2 = Graph::new(2, 1, vec![(0, 1)]).unwrap();
        assert_eq!(
            normalized_rank(&k2, &EdgeSubset::full(1)).unwrap(),
            Rational::new(1, 2)
        );
        assert_eq!(
            normalized_rank(&k2, &EdgeSubset::empty()).unwrap(),
            Rational::new(0, 1)
        );
    }

    #[test]
    fn rank_routes_agree() {
        let g = path(4);
        for bits in 0..8u32 {
            let f = EdgeSubset::new((0..3).filter(|i| bits & (1 << i) != 0));
            assert_eq!(
                normalized_rank(&g, &f).unwrap(),
                rank_by_vertex_average(&g, &f).unwrap()
            );
        }
    }

    #[test]
    fn involution_symmetry_holds() {
        let c4 = cycle(4);
        assert!(involution_symmetry_check(&c4, &[0], &[1]));
        let k2 = Graph::new(2, 1, vec![(0, 1)]).unwrap();
        assert!(involution_symmetry_check(&k2, &[0, 1], &[0, 1]));
    }

    #[test]
    fn greedy_coloring_is_proper_and_small() {
        let single = Graph::new(2, 1, vec![(0, 1)]).unwrap();
        assert_eq!(greedy_proper_edge_coloring(&single).k(), 1);

        let p3 = path(3);
        let c = greedy_proper_edge_coloring(&p3);
        assert_ne!(c.colors()[0], c.colors()[1]);

        let c3 = cycle(3);
        let c = greedy_proper_edge_coloring(&c3);
        assert!(c.k() <= 3);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let (t1, h1) = c3.edges()[i];
                let (t2, h2) = c3.edges()[j];
                let incident = t1 == t2 || t1 == h2 || h1 == t2 || h1 == h2;
                if incident {
                    assert_ne!(c.colors()[i], c.colors()[j]);
                }
            }
        }
    }

    #[test]
    fn text_round_trip_is_bit_exact() {
        let g = cycle(5);
        let text = g.to_edge_list_text();
        let back = Graph::from_edge_list_text(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_edge_list_text(), text);
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let g = path(4);
        let json = g.to_json_string();
        let back = Graph::from_json_str(&json).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json_string(), json);
    }

    #[test]
    fn orientation_does_not_change_rank() {
        let g = cycle(5);
        let flipped = g.with_edge_reversed(2).unwrap();
        for bits in 0..32u32 {
            let f = EdgeSubset::new((0..5).filter(|i| bits & (1 << i) != 0));
            assert_eq!(
                normalized_rank(&g, &f).unwrap(),
                normalized_rank(&flipped, &f).unwrap()
            );
        }
    }
}
