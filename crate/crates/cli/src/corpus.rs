//! The fixed test corpus: small named graphs exercised by the verification
//! suite and the acceptance tests. Kept deliberately mixed — cycles, paths,
//! a star, a clique, and one disconnected graph (rank is well-defined
//! without connectivity; only the convergence experiments require it).

use rankq_core::Graph;

pub struct CorpusGraph {
    pub name: &'static str,
    pub graph: Graph,
    pub connected: bool,
}

pub fn corpus() -> Vec<CorpusGraph> {
    let g = |name, connected, n, d, edges: Vec<(usize, usize)>| CorpusGraph {
        name,
        graph: Graph::new(n, d, edges).expect("corpus graph is valid"),
        connected,
    };
    vec![
        g("k2", true, 2, 1, vec![(0, 1)]),
        g("p3", true, 3, 2, vec![(0, 1), (1, 2)]),
        g("p4", true, 4, 2, vec![(0, 1), (1, 2), (2, 3)]),
        g("c3", true, 3, 2, vec![(0, 1), (1, 2), (2, 0)]),
        g("c4", true, 4, 2, vec![(0, 1), (1, 2), (2, 3), (3, 0)]),
        g("c5", true, 5, 2, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]),
        g("c6", true, 6, 2, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]),
        g("star3", true, 4, 3, vec![(0, 1), (0, 2), (0, 3)]),
        g(
            "k4",
            true,
            4,
            3,
            vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        ),
        g(
            "triangle_pendant",
            true,
            4,
            3,
            vec![(0, 1), (1, 2), (2, 0), (2, 3)],
        ),
        g("two_edges", false, 4, 1, vec![(0, 1), (2, 3)]),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_shape() {
        let all = corpus();
        assert!(all.len() >= 10);
        for item in &all {
            assert_eq!(item.graph.is_connected(), item.connected, "{}", item.name);
            assert!(item.graph.vertex_count() <= 7);
            assert!(item.graph.edge_count() <= 8);
        }
    }
}
