//! Canonical labeling of finite directed graphs with optional vertex marks
//! and edge labels: iterative neighborhood refinement followed by full
//! backtracking over the refined classes, taking the lexicographically
//! smallest encoding over all leaves. Correct by construction; intended for
//! desk-scale graphs, not as a competitive canonical-form engine.

/// Input graph for canonical labeling. Marks distinguish vertices (e.g. a
/// root); labels distinguish edges (e.g. decoration classes). Pass zeros
/// when unused.
pub(crate) struct CanonInput<'a> {
    pub n: usize,
    pub edges: &'a [(usize, usize)],
    pub vertex_marks: &'a [u64],
    pub edge_labels: &'a [u64],
}

pub(crate) struct CanonOutput {
    /// `relabeling[v]` is the canonical id of input vertex `v`.
    pub relabeling: Vec<usize>,
    /// Self-describing byte encoding of the canonical marked labeled graph.
    /// Equal codes hold exactly for isomorphic inputs.
    pub code: Vec<u8>,
    /// Relabeled edges in canonical (sorted) order.
    pub canonical_edges: Vec<(usize, usize)>,
}

/// (direction, edge label, neighbor class) triples, sorted per vertex.
type RefinementKey = (usize, Vec<(u8, u64, usize)>);

struct Searcher<'a> {
    n: usize,
    marks: &'a [u64],
    edges: &'a [(usize, usize)],
    labels: &'a [u64],
    adj_out: Vec<Vec<(usize, u64)>>,
    adj_in: Vec<Vec<(usize, u64)>>,
    best: Option<(Vec<u8>, Vec<usize>)>,
}

impl<'a> Searcher<'a> {
    fn new(input: &'a CanonInput<'a>) -> Self {
        let mut adj_out = vec![Vec::new(); input.n];
        let mut adj_in = vec![Vec::new(); input.n];
        for (id, &(t, h)) in input.edges.iter().enumerate() {
            adj_out[t].push((h, input.edge_labels[id]));
            adj_in[h].push((t, input.edge_labels[id]));
        }
        Searcher {
            n: input.n,
            marks: input.vertex_marks,
            edges: input.edges,
            labels: input.edge_labels,
            adj_out,
            adj_in,
            best: None,
        }
    }

    fn initial_colors(&self) -> Vec<usize> {
        let keys: Vec<(u64, usize, usize)> = (0..self.n)
            .map(|v| (self.marks[v], self.adj_out[v].len(), self.adj_in[v].len()))
            .collect();
        rank_keys(&keys)
    }

    /// Splits classes by the multiset of (direction, label, neighbor class)
    /// until stable.
    fn refine(&self, colors: &mut Vec<usize>) {
        loop {
            let before = distinct(colors);
            let keys: Vec<RefinementKey> = (0..self.n)
                .map(|v| {
                    let mut sig: Vec<(u8, u64, usize)> = self.adj_out[v]
                        .iter()
                        .map(|&(u, lab)| (0u8, lab, colors[u]))
                        .chain(self.adj_in[v].iter().map(|&(u, lab)| (1u8, lab, colors[u])))
                        .collect();
                    sig.sort_unstable();
                    (colors[v], sig)
                })
                .collect();
            *colors = rank_keys(&keys);
            if distinct(colors) == before {
                return;
            }
        }
    }

    fn search(&mut self, mut colors: Vec<usize>) {
        self.refine(&mut colors);
        if distinct(&colors) == self.n {
            let code = self.encode(&colors);
            if self
                .best
                .as_ref()
                .map(|(b, _)| code < *b)
                .unwrap_or(true)
            {
                self.best = Some((code, colors));
            }
            return;
        }
        // first class of size >= 2, by class id
        let target = (0..self.n)
            .find(|&c| colors.iter().filter(|&&x| x == c).count() >= 2)
            .expect("non-discrete coloring has a class of size >= 2");
        let members: Vec<usize> = (0..self.n).filter(|&v| colors[v] == target).collect();
        for &v in &members {
            let keys: Vec<(usize, bool)> =
                (0..self.n).map(|u| (colors[u], u != v)).collect();
            self.search(rank_keys(&keys));
        }
    }

    fn encode(&self, colors: &[usize]) -> Vec<u8> {
        let mut triples: Vec<(usize, usize, u64)> = self
            .edges
            .iter()
            .zip(self.labels)
            .map(|(&(t, h), &lab)| (colors[t], colors[h], lab))
            .collect();
        triples.sort_unstable();
        let mut marks_canon = vec![0u64; self.n];
        for v in 0..self.n {
            marks_canon[colors[v]] = self.marks[v];
        }
        let mut code = Vec::with_capacity(4 + 8 * self.n + 12 * triples.len());
        code.extend((self.n as u16).to_le_bytes());
        code.extend((triples.len() as u16).to_le_bytes());
        for mark in marks_canon {
            code.extend(mark.to_le_bytes());
        }
        for (t, h, lab) in triples {
            code.extend((t as u16).to_le_bytes());
            code.extend((h as u16).to_le_bytes());
            code.extend(lab.to_le_bytes());
        }
        code
    }
}

fn distinct(colors: &[usize]) -> usize {
    let mut seen = colors.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

/// Maps each key to its rank among the sorted distinct keys.
fn rank_keys<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

pub(crate) fn canonical_labeling(input: &CanonInput) -> CanonOutput {
    assert!(input.n > 0, "canonical labeling needs at least one vertex");
    assert!(input.n <= u16::MAX as usize && input.edges.len() <= u16::MAX as usize);
    assert_eq!(input.vertex_marks.len(), input.n);
    assert_eq!(input.edge_labels.len(), input.edges.len());
    let mut searcher = Searcher::new(input);
    let colors = searcher.initial_colors();
    searcher.search(colors);
    let (code, relabeling) = searcher.best.expect("search visits at least one leaf");
    let mut canonical_edges: Vec<(usize, usize)> = input
        .edges
        .iter()
        .map(|&(t, h)| (relabeling[t], relabeling[h]))
        .collect();
    canonical_edges.sort_unstable();
    CanonOutput {
        relabeling,
        code,
        canonical_edges,
    }
}
