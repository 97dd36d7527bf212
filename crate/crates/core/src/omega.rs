//! Finite truncations of rooted decorated directed graphs: radius-r balls
//! with decorations projected to level m, rooted isomorphism, the local
//! distance evaluated over a truncation window, adjacency witnesses, and
//! exact ball-class statistics.
//!
//! The infinite space of such triples is never materialized; every
//! computation works on `(graph, root, decoration, r, m)` truncations, and
//! distances are reported as intervals so truncation never masquerades as
//! an exact value.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_labeling, CanonInput};
use crate::graph::Graph;
use crate::nets::Decoration;
use crate::quotient::DistanceInterval;
use crate::{Error, Rational, Result};

/// Vertex limit for canonical ball codes; rooted isomorphism itself has no
/// limit.
pub const BALL_CANON_LIMIT: usize = 32;

/// A rooted decorated directed ball: the induced subgraph on vertices
/// within distance `radius` of the root, vertices relabeled in BFS order
/// (root first, neighbors explored in edge-id order), decorations projected
/// to level `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootedBall {
    graph: Graph,
    root: usize,
    decoration: Decoration,
    radius: usize,
    level: usize,
    /// Ball vertex id -> original vertex id.
    original_vertices: Vec<usize>,
    /// Ball edge id -> original edge id.
    original_edges: Vec<usize>,
}

impl RootedBall {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn decoration(&self) -> &Decoration {
        &self.decoration
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn original_vertices(&self) -> &[usize] {
        &self.original_vertices
    }

    pub fn original_edges(&self) -> &[usize] {
        &self.original_edges
    }

    /// The same ball with decorations projected down to level `m`.
    pub fn at_level(&self, m: usize) -> Result<RootedBall> {
        if m > self.level {
            return Err(Error::LevelMismatch(format!(
                "cannot raise projection level {} to {m}",
                self.level
            )));
        }
        Ok(RootedBall {
            decoration: self.decoration.project(m),
            level: m,
            ..self.clone()
        })
    }
}

/// Extracts the radius-r ball of `g` at `v` with decorations projected to
/// level `m`. Vertices are relabeled deterministically by BFS order with
/// neighbor exploration in edge-id order; edges keep their relative order.
pub fn ball(g: &Graph, decoration: &Decoration, v: usize, r: usize, m: usize) -> Result<RootedBall> {
    if v >= g.vertex_count() {
        return Err(Error::VertexOutOfRange {
            id: v,
            vertex_count: g.vertex_count(),
        });
    }
    if decoration.edge_count() != g.edge_count() {
        return Err(Error::DecorationMismatch(format!(
            "decoration covers {} edges, graph has {}",
            decoration.edge_count(),
            g.edge_count()
        )));
    }
    let adjacency = g.incidences();
    let mut dist: Vec<Option<usize>> = vec![None; g.vertex_count()];
    let mut order = vec![v];
    dist[v] = Some(0);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        let d = dist[u].unwrap();
        if d == r {
            continue;
        }
        for &(w, _) in &adjacency[u] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                order.push(w);
            }
        }
    }
    let mut new_id = vec![usize::MAX; g.vertex_count()];
    for (i, &u) in order.iter().enumerate() {
        new_id[u] = i;
    }
    let mut edges = Vec::new();
    let mut original_edges = Vec::new();
    for (id, &(t, h)) in g.edges().iter().enumerate() {
        if dist[t].is_some() && dist[h].is_some() {
            edges.push((new_id[t], new_id[h]));
            original_edges.push(id);
        }
    }
    let graph = Graph::new(order.len(), g.degree_bound(), edges)?;
    let decoration = decoration.project(m).restrict(&original_edges);
    Ok(RootedBall {
        graph,
        root: 0,
        decoration,
        radius: r,
        level: m,
        original_vertices: order,
        original_edges,
    })
}

/// Interns the decoration tuples of both balls into shared label ids, so
/// isomorphism candidates can be pruned on cheap integers.
fn shared_edge_labels(b1: &RootedBall, b2: &RootedBall) -> (Vec<u64>, Vec<u64>) {
    let mut tuples: Vec<&[u8]> = (0..b1.graph.edge_count())
        .map(|e| b1.decoration.tuple(e))
        .chain((0..b2.graph.edge_count()).map(|e| b2.decoration.tuple(e)))
        .collect();
    tuples.sort_unstable();
    tuples.dedup();
    let id_of = |t: &[u8]| tuples.binary_search(&t).expect("interned") as u64;
    let l1 = (0..b1.graph.edge_count())
        .map(|e| id_of(b1.decoration.tuple(e)))
        .collect();
    let l2 = (0..b2.graph.edge_count())
        .map(|e| id_of(b2.decoration.tuple(e)))
        .collect();
    (l1, l2)
}

/// (root distance, out-degree, in-degree, sorted incident (direction,
/// decoration class) pairs): the invariant used to prune candidates.
type VertexKey = (usize, usize, usize, Vec<(u8, u64)>);

struct IsoSide {
    layer: Vec<usize>,
    key: Vec<VertexKey>,
}

fn iso_side(b: &RootedBall, labels: &[u64]) -> IsoSide {
    let g = b.graph();
    let n = g.vertex_count();
    let mut out = vec![Vec::new(); n];
    let mut inc = vec![Vec::new(); n];
    for (id, &(t, h)) in g.edges().iter().enumerate() {
        out[t].push((h, labels[id]));
        inc[h].push((t, labels[id]));
    }
    // BFS layers from the root, orientation ignored
    let mut layer = vec![usize::MAX; n];
    layer[b.root()] = 0;
    let mut queue = vec![b.root()];
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &(w, _) in out[u].iter().chain(inc[u].iter()) {
            if layer[w] == usize::MAX {
                layer[w] = layer[u] + 1;
                queue.push(w);
            }
        }
    }
    let key = (0..n)
        .map(|v| {
            let mut sig: Vec<(u8, u64)> = out[v]
                .iter()
                .map(|&(_, lab)| (0u8, lab))
                .chain(inc[v].iter().map(|&(_, lab)| (1u8, lab)))
                .collect();
            sig.sort_unstable();
            (layer[v], out[v].len(), inc[v].len(), sig)
        })
        .collect();
    IsoSide { layer, key }
}

/// Decides whether two balls are equivalent: a bijection preserving the
/// root, directed edges, and projected decorations. Backtracking with
/// decoration-refined candidate pruning.
pub fn rooted_iso(b1: &RootedBall, b2: &RootedBall) -> Result<bool> {
    if b1.radius() != b2.radius() || b1.level() != b2.level() {
        return Err(Error::LevelMismatch(format!(
            "balls at (r={}, m={}) and (r={}, m={})",
            b1.radius(),
            b1.level(),
            b2.radius(),
            b2.level()
        )));
    }
    let n = b1.graph().vertex_count();
    if n != b2.graph().vertex_count()
        || b1.graph().edge_count() != b2.graph().edge_count()
        || b1.decoration.window() != b2.decoration.window()
    {
        return Ok(false);
    }
    let (l1, l2) = shared_edge_labels(b1, b2);
    let side1 = iso_side(b1, &l1);
    let side2 = iso_side(b2, &l2);
    {
        let mut k1 = side1.key.clone();
        let mut k2 = side2.key.clone();
        k1.sort_unstable();
        k2.sort_unstable();
        if k1 != k2 {
            return Ok(false);
        }
    }
    // map vertices of b1 in BFS layer order so new vertices touch the
    // mapped region early
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by_key(|&v| (side1.layer[v], v));

    let edge1: HashMap<(usize, usize), u64> = b1
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(id, &(t, h))| ((t, h), l1[id]))
        .collect();
    let edge2: HashMap<(usize, usize), u64> = b2
        .graph()
        .edges()
        .iter()
        .enumerate()
        .map(|(id, &(t, h))| ((t, h), l2[id]))
        .collect();

    struct Search<'a> {
        order: &'a [usize],
        side1: &'a IsoSide,
        side2: &'a IsoSide,
        edge1: HashMap<(usize, usize), u64>,
        edge2: HashMap<(usize, usize), u64>,
        root2: usize,
    }

    impl Search<'_> {
        fn extend(
            &self,
            pos: usize,
            mapping: &mut Vec<Option<usize>>,
            used: &mut Vec<bool>,
        ) -> bool {
            if pos == self.order.len() {
                return true;
            }
            let u = self.order[pos];
            let candidates: Vec<usize> = if pos == 0 {
                vec![self.root2]
            } else {
                (0..mapping.len())
                    .filter(|&v| !used[v] && self.side2.key[v] == self.side1.key[u])
                    .collect()
            };
            'next: for v in candidates {
                if pos == 0 && self.side2.key[v] != self.side1.key[u] {
                    continue;
                }
                // directed edges to and from already-mapped vertices must
                // agree, in presence, direction, and label
                for w in self.order[..pos].iter().copied() {
                    let fw = mapping[w].unwrap();
                    if self.edge1.get(&(u, w)) != self.edge2.get(&(v, fw))
                        || self.edge1.get(&(w, u)) != self.edge2.get(&(fw, v))
                    {
                        continue 'next;
                    }
                }
                mapping[u] = Some(v);
                used[v] = true;
                if self.extend(pos + 1, mapping, used) {
                    return true;
                }
                mapping[u] = None;
                used[v] = false;
            }
            false
        }
    }

    let search = Search {
        order: &order,
        side1: &side1,
        side2: &side2,
        edge1,
        edge2,
        root2: b2.root(),
    };
    let mut mapping = vec![None; n];
    let mut used = vec![false; n];
    Ok(search.extend(0, &mut mapping, &mut used))
}

/// A point of the rooted-decorated-graph space at full resolution: a graph,
/// a root vertex, and a per-edge decoration. Balls and truncations are
/// derived views of this.
#[derive(Debug, Clone, Copy)]
pub struct RootedTriple<'a> {
    pub graph: &'a Graph,
    pub root: usize,
    pub decoration: &'a Decoration,
}

/// Result of a truncated local-distance evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDistanceResult {
    /// Encloses the true infimum: `[max(0, best - 2^-n_max - 2^-m_max), best]`.
    pub interval: DistanceInterval,
    /// Best achieved value of `2^-n + 2^-m` over isomorphic truncations.
    pub best: f64,
    /// The `(n, m)` pair achieving `best`.
    pub best_pair: (usize, usize),
    /// Set when every tested `(n, m)` pair was isomorphic; the triples are
    /// then indistinguishable at this truncation (true distance may be 0).
    pub indistinguishable: bool,
}

/// Evaluates the local distance between two rooted decorated triples over
/// all `n <= n_max`, `m <= m_max`: the infimum of `2^-n + 2^-m` over pairs
/// whose radius-n balls agree at projection level m.
pub fn local_distance(
    t1: RootedTriple,
    t2: RootedTriple,
    n_max: usize,
    m_max: usize,
) -> Result<LocalDistanceResult> {
    let mut best = f64::INFINITY;
    let mut best_pair = (0, 0);
    // largest m still isomorphic; non-increasing in n
    let mut m_cur = m_max as i64;
    let mut all_iso = true;
    for n in 0..=n_max {
        let b1 = ball(t1.graph, t1.decoration, t1.root, n, m_max)?;
        let b2 = ball(t2.graph, t2.decoration, t2.root, n, m_max)?;
        while m_cur >= 0 {
            let iso = rooted_iso(&b1.at_level(m_cur as usize)?, &b2.at_level(m_cur as usize)?)?;
            if iso {
                break;
            }
            all_iso = false;
            m_cur -= 1;
        }
        if m_cur < 0 {
            // underlying balls differ; larger n cannot recover
            all_iso = false;
            break;
        }
        let value = 0.5f64.powi(n as i32) + 0.5f64.powi(m_cur as i32);
        if value < best {
            best = value;
            best_pair = (n, m_cur as usize);
        }
    }
    let slack = 0.5f64.powi(n_max as i32) + 0.5f64.powi(m_max as i32);
    Ok(LocalDistanceResult {
        interval: DistanceInterval {
            lower: (best - slack).max(0.0),
            upper: best,
        },
        best,
        best_pair,
        indistinguishable: all_iso,
    })
}

/// Adjacency in the graph together with its truncation-level witness: for
/// an edge `x -> y`, the common graph is its own witness, and the edge must
/// appear in both endpoint balls with the same projected decoration tuple.
/// Only the within-one-graph case is decidable here; adjacency between
/// truncations of two different graphs is not supported.
pub fn embed_and_check_adjacency(
    g: &Graph,
    decoration: &Decoration,
    x: usize,
    y: usize,
    r: usize,
    m: usize,
) -> Result<bool> {
    for v in [x, y] {
        if v >= g.vertex_count() {
            return Err(Error::VertexOutOfRange {
                id: v,
                vertex_count: g.vertex_count(),
            });
        }
    }
    let edge_id = match g.edges().iter().position(|&e| e == (x, y)) {
        Some(id) => id,
        None => return Ok(false),
    };
    if r == 0 {
        return Ok(true);
    }
    let expected = decoration.project(m).tuple(edge_id).to_vec();
    for root in [x, y] {
        let b = ball(g, decoration, root, r, m)?;
        let position = b
            .original_edges()
            .iter()
            .position(|&e| e == edge_id)
            .ok_or_else(|| {
                Error::DecorationMismatch(format!(
                    "edge {x}->{y} missing from the radius-{r} ball at {root}"
                ))
            })?;
        if b.decoration().tuple(position) != expected.as_slice() {
            return Err(Error::DecorationMismatch(format!(
                "edge {x}->{y} carries an inconsistent decoration in the ball at {root}"
            )));
        }
    }
    Ok(true)
}

/// Canonical code of a ball: canonical labeling of the directed graph with
/// the root marked and edges labeled by their decoration class, followed by
/// the sorted distinct tuples themselves so codes stay comparable across
/// graphs.
pub fn ball_code(b: &RootedBall) -> Result<Vec<u8>> {
    let g = b.graph();
    if g.vertex_count() > BALL_CANON_LIMIT {
        return Err(Error::CanonicalSizeLimit {
            vertices: g.vertex_count(),
            limit: BALL_CANON_LIMIT,
        });
    }
    let mut tuples: Vec<&[u8]> = (0..g.edge_count()).map(|e| b.decoration.tuple(e)).collect();
    tuples.sort_unstable();
    tuples.dedup();
    let labels: Vec<u64> = (0..g.edge_count())
        .map(|e| tuples.binary_search(&b.decoration.tuple(e)).unwrap() as u64)
        .collect();
    let mut marks = vec![0u64; g.vertex_count()];
    marks[b.root()] = 1;
    let out = canonical_labeling(&CanonInput {
        n: g.vertex_count(),
        edges: g.edges(),
        vertex_marks: &marks,
        edge_labels: &labels,
    });
    let mut code = out.code;
    code.extend((b.radius() as u16).to_le_bytes());
    code.extend((b.level() as u16).to_le_bytes());
    code.extend((tuples.len() as u32).to_le_bytes());
    for t in tuples {
        code.extend((t.len() as u32).to_le_bytes());
        code.extend(t);
    }
    Ok(code)
}

/// Exact distribution of ball classes over all roots with uniform weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallDistribution {
    r: usize,
    m: usize,
    vertex_count: usize,
    histogram: BTreeMap<Vec<u8>, Rational>,
}

#[derive(Serialize, Deserialize)]
struct BallDistributionJson {
    r: usize,
    m: usize,
    vertex_count: usize,
    histogram: BTreeMap<String, String>,
}

impl BallDistribution {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn histogram(&self) -> &BTreeMap<Vec<u8>, Rational> {
        &self.histogram
    }

    pub fn class_count(&self) -> usize {
        self.histogram.len()
    }

    pub fn total_probability(&self) -> Rational {
        self.histogram.values().copied().fold(Rational::zero(), |a, b| a + b)
    }

    pub fn to_json_string(&self) -> String {
        let doc = BallDistributionJson {
            r: self.r,
            m: self.m,
            vertex_count: self.vertex_count,
            histogram: self
                .histogram
                .iter()
                .map(|(code, p)| {
                    let mut hex = String::with_capacity(code.len() * 2);
                    for byte in code {
                        let _ = write!(hex, "{byte:02x}");
                    }
                    (hex, crate::quotient::rational_to_string(p))
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("distribution serialization cannot fail")
    }
}

/// Histogram of canonical ball codes over all vertices, each weighted
/// `1/|V|`, kept as exact rationals.
pub fn ball_distribution(
    g: &Graph,
    decoration: &Decoration,
    r: usize,
    m: usize,
) -> Result<BallDistribution> {
    let weight = Rational::new(1, g.vertex_count() as i64);
    let mut histogram: BTreeMap<Vec<u8>, Rational> = BTreeMap::new();
    for v in 0..g.vertex_count() {
        let code = ball_code(&ball(g, decoration, v, r, m)?)?;
        *histogram.entry(code).or_insert_with(Rational::zero) += weight;
    }
    let dist = BallDistribution {
        r,
        m,
        vertex_count: g.vertex_count(),
        histogram,
    };
    debug_assert!(dist.total_probability() == Rational::one());
    Ok(dist)
}

/// Total-variation distance `(1/2) Σ |p1 - p2|` over ball classes, computed
/// in exact rationals and converted at the end.
pub fn distribution_distance(d1: &BallDistribution, d2: &BallDistribution) -> Result<f64> {
    if d1.r != d2.r || d1.m != d2.m {
        return Err(Error::LevelMismatch(format!(
            "distributions at (r={}, m={}) and (r={}, m={})",
            d1.r, d1.m, d2.r, d2.m
        )));
    }
    let keys: std::collections::BTreeSet<&Vec<u8>> =
        d1.histogram.keys().chain(d2.histogram.keys()).collect();
    let zero = Rational::zero();
    let mut total = Rational::zero();
    for code in keys {
        let p1 = d1.histogram.get(code).unwrap_or(&zero);
        let p2 = d2.histogram.get(code).unwrap_or(&zero);
        total += if p1 >= p2 { *p1 - *p2 } else { *p2 - *p1 };
    }
    let tv = total / Rational::new(2, 1);
    Ok(*tv.numer() as f64 / *tv.denom() as f64)
}
