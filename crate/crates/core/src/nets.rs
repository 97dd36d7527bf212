//! 2^(-n)-nets of coloring space, canonical forms for directed graphs, and
//! per-edge decorations.
//!
//! A net for `(g, k, n)` is an ordered list of k-edge-colorings such that
//! every coloring of `g` lies within quotient distance `2^(-n)` of some
//! list element. The exact construction fixes a grid net of the cube
//! `[0,1]^(2^k)` with spacing `2^(-(n+1)) / sqrt(2^k)` and picks, per grid
//! point, the lowest-index coloring whose quotient point lies within
//! `2^(-(n+1))` (falling back to coloring index 0). The grid size defines
//! `M(k, n)`, so list length is uniform across graphs and decorations stay
//! index-aligned.
//!
//! Nets are keyed by the canonical form of the graph and transported to
//! isomorphic graphs by pulling colorings back along the fixed isomorphism
//! onto the canonical representative.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canon::{canonical_labeling, CanonInput};
use crate::graph::Graph;
use crate::quotient::{coloring_count, quotient_point, ColoringEnumerator, EdgeColoring};
use crate::{Error, Result};

/// Default vertex limit for canonical labeling.
pub const CANONICAL_VERTEX_LIMIT: usize = 20;

/// Largest net list that may be materialized by [`build_net`]. `M(k, n)`
/// grows doubly exponentially in k; anything beyond this is greedy-only.
pub const MAX_MATERIALIZED_NET: u128 = 1 << 20;

const REGISTRY_FORMAT_VERSION: u32 = 1;

/// Canonical form of a directed graph: a byte code that two graphs share
/// exactly when they are isomorphic as directed graphs, plus the relabeling
/// onto the canonical representative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CanonicalForm {
    code: Vec<u8>,
    relabeling: Vec<usize>,
    canonical_edges: Vec<(usize, usize)>,
}

impl CanonicalForm {
    pub fn code(&self) -> &[u8] {
        &self.code
    }

    pub fn code_hex(&self) -> String {
        let mut s = String::with_capacity(self.code.len() * 2);
        for b in &self.code {
            let _ = write!(s, "{b:02x}");
        }
        s
    }

    /// Vertex bijection from the input graph to the canonical
    /// representative.
    pub fn relabeling(&self) -> &[usize] {
        &self.relabeling
    }

    pub fn canonical_edges(&self) -> &[(usize, usize)] {
        &self.canonical_edges
    }

    /// The fixed representative of the isomorphism class, with edges in
    /// canonical order.
    pub fn canonical_graph(&self) -> Graph {
        let n = self.relabeling.len();
        let mut degree = vec![0usize; n];
        for &(t, h) in &self.canonical_edges {
            degree[t] += 1;
            degree[h] += 1;
        }
        let bound = degree.iter().copied().max().unwrap_or(1).max(1);
        Graph::new(n, bound, self.canonical_edges.clone())
            .expect("canonical edges form a valid graph")
    }

    /// Maps an edge id of `g` (a graph with this canonical form) to the id
    /// of its image among the canonical edges.
    fn edge_image(&self, g: &Graph, edge_id: usize) -> usize {
        let (t, h) = g.edges()[edge_id];
        let target = (self.relabeling[t], self.relabeling[h]);
        self.canonical_edges
            .binary_search(&target)
            .expect("relabeled edge is canonical")
    }
}

pub fn canonical_form(g: &Graph) -> Result<CanonicalForm> {
    canonical_form_with_limit(g, CANONICAL_VERTEX_LIMIT)
}

pub fn canonical_form_with_limit(g: &Graph, limit: usize) -> Result<CanonicalForm> {
    if g.vertex_count() > limit {
        return Err(Error::CanonicalSizeLimit {
            vertices: g.vertex_count(),
            limit,
        });
    }
    let marks = vec![0u64; g.vertex_count()];
    let labels = vec![0u64; g.edge_count()];
    let out = canonical_labeling(&CanonInput {
        n: g.vertex_count(),
        edges: g.edges(),
        vertex_marks: &marks,
        edge_labels: &labels,
    });
    Ok(CanonicalForm {
        code: out.code,
        relabeling: out.relabeling,
        canonical_edges: out.canonical_edges,
    })
}

/// Points per axis of the cube grid for `(k, n)`.
pub fn grid_side(k: usize, n: usize) -> usize {
    let spacing = 0.5f64.powi(n as i32 + 1) / (2.0f64).powf(k as f64 / 2.0);
    (1.0 / spacing).ceil() as usize
}

/// `M(k, n)`: the pinned net-list length, `grid_side(k, n) ^ (2^k)`.
/// `None` when the value overflows 128 bits.
pub fn m_table(k: usize, n: usize) -> Option<u128> {
    let side = grid_side(k, n) as u128;
    let mut m: u128 = 1;
    for _ in 0..(1usize << k) {
        m = m.checked_mul(side)?;
    }
    Some(m)
}

fn grid_point(side: usize, dim: usize, index: u128) -> Vec<f64> {
    let mut coords = vec![0.0; dim];
    let mut rem = index;
    for c in coords.iter_mut().rev() {
        let digit = (rem % side as u128) as f64;
        rem /= side as u128;
        *c = (digit + 0.5) / side as f64;
    }
    coords
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn coloring_points(g: &Graph, k: usize) -> Result<Vec<(EdgeColoring, Vec<f64>)>> {
    ColoringEnumerator::new(k, g.edge_count())
        .map(|c| {
            let p = quotient_point(g, &c)?.to_f64_vec();
            Ok((c, p))
        })
        .collect()
}

/// Builds the exact-regime 2^(-n)-net of the k-colorings of `g`, following
/// the grid construction described in the module docs. Every coloring of
/// `g` ends up within `2^(-n)` of some list element; the list has length
/// `M(k, n)` exactly.
pub fn build_net(g: &Graph, k: usize, n: usize, budget: u64) -> Result<Vec<EdgeColoring>> {
    let count = coloring_count(k, g.edge_count()).unwrap_or(u128::MAX);
    if count > u128::from(budget) {
        return Err(Error::BudgetExceeded {
            required: count,
            budget: u128::from(budget),
            smallest_k: Some(k),
        });
    }
    let m = m_table(k, n)
        .filter(|&m| m <= MAX_MATERIALIZED_NET)
        .ok_or_else(|| {
            Error::Infeasible(format!(
                "net list for k={k}, n={n} has length {} > {MAX_MATERIALIZED_NET}; \
                 use greedy_net instead",
                m_table(k, n)
                    .map(|m| m.to_string())
                    .unwrap_or_else(|| "over 2^128".into()),
            ))
        })?;
    let side = grid_side(k, n);
    let dim = 1usize << k;
    let points = coloring_points(g, k)?;
    let radius = 0.5f64.powi(n as i32 + 1);
    let radius_sq = radius * radius * (1.0 + 1e-12);
    let mut net = Vec::with_capacity(m as usize);
    for index in 0..m {
        let target = grid_point(side, dim, index);
        let chosen = points
            .iter()
            .find(|(_, p)| squared_distance(p, &target) <= radius_sq)
            .map(|(c, _)| c)
            .unwrap_or(&points[0].0);
        net.push(chosen.clone());
    }
    Ok(net)
}

/// Farthest-point-first net over sampled colorings, for use when
/// enumeration is infeasible. The covering-radius guarantee then holds only
/// empirically over the sample. Deterministic given the seed; ties break
/// toward the lowest sample index.
pub fn greedy_net(
    g: &Graph,
    k: usize,
    n: usize,
    samples: usize,
    seed: u64,
) -> Result<Vec<EdgeColoring>> {
    if samples == 0 {
        return Err(Error::Infeasible("sample count must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample = Vec::with_capacity(samples);
    for _ in 0..samples {
        let colors: Vec<u8> = (0..g.edge_count())
            .map(|_| rng.gen_range(1..=k) as u8)
            .collect();
        let coloring = EdgeColoring::new(k, colors)?;
        let point = quotient_point(g, &coloring)?.to_f64_vec();
        sample.push((coloring, point));
    }
    let radius = 0.5f64.powi(n as i32);
    let radius_sq = radius * radius * (1.0 + 1e-12);
    let mut centers = vec![0usize];
    let mut dist_sq: Vec<f64> = sample
        .iter()
        .map(|(_, p)| squared_distance(p, &sample[0].1))
        .collect();
    loop {
        let (farthest, &d) = dist_sq
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
            .expect("nonempty sample");
        if d <= radius_sq {
            break;
        }
        centers.push(farthest);
        for (i, (_, p)) in sample.iter().enumerate() {
            let nd = squared_distance(p, &sample[farthest].1);
            if nd < dist_sq[i] {
                dist_sq[i] = nd;
            }
        }
    }
    Ok(centers.into_iter().map(|i| sample[i].0.clone()).collect())
}

/// Outcome of an exhaustive net-property check.
#[derive(Debug, Clone)]
pub struct NetPropertyReport {
    pub holds: bool,
    /// Largest distance from any coloring to the net.
    pub covering_radius: f64,
    /// A coloring violating the property, when one exists.
    pub witness: Option<EdgeColoring>,
}

/// Exhaustively verifies that every k-coloring of `g` lies within `2^(-n)`
/// of the net.
pub fn verify_net_property(
    g: &Graph,
    net: &[EdgeColoring],
    k: usize,
    n: usize,
    budget: u64,
) -> Result<NetPropertyReport> {
    let count = coloring_count(k, g.edge_count()).unwrap_or(u128::MAX);
    if count > u128::from(budget) {
        return Err(Error::BudgetExceeded {
            required: count,
            budget: u128::from(budget),
            smallest_k: Some(k),
        });
    }
    // distinct net points are enough for distance queries
    let mut net_points: Vec<Vec<f64>> = Vec::new();
    for coloring in net {
        let p = quotient_point(g, coloring)?.to_f64_vec();
        if !net_points.contains(&p) {
            net_points.push(p);
        }
    }
    let radius = 0.5f64.powi(n as i32);
    let threshold_sq = radius * radius * (1.0 + 1e-12);
    let mut worst = 0.0f64;
    let mut witness = None;
    for coloring in ColoringEnumerator::new(k, g.edge_count()) {
        let p = quotient_point(g, &coloring)?.to_f64_vec();
        let best = net_points
            .iter()
            .map(|q| squared_distance(&p, q))
            .fold(f64::INFINITY, f64::min);
        if best > worst {
            worst = best;
        }
        if best > threshold_sq && witness.is_none() {
            witness = Some(coloring);
        }
    }
    Ok(NetPropertyReport {
        holds: witness.is_none(),
        covering_radius: worst.sqrt(),
        witness,
    })
}

/// Reduces a net to an irredundant one: drops elements (in first-occurrence
/// order of their distinct colorings) whose removal keeps the property
/// intact. Every element of the result is necessary, which is what the
/// mutation test exercises.
pub fn minimal_subnet(
    g: &Graph,
    net: &[EdgeColoring],
    k: usize,
    n: usize,
    budget: u64,
) -> Result<Vec<EdgeColoring>> {
    let mut distinct: Vec<EdgeColoring> = Vec::new();
    for c in net {
        if !distinct.contains(c) {
            distinct.push(c.clone());
        }
    }
    let mut index = 0;
    while index < distinct.len() {
        let mut candidate = distinct.clone();
        candidate.remove(index);
        if !candidate.is_empty() && verify_net_property(g, &candidate, k, n, budget)?.holds {
            distinct = candidate;
        } else {
            index += 1;
        }
    }
    Ok(distinct)
}

/// Persisted, seed-reproducible net lists keyed by canonical graph class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetRegistry {
    seed: u64,
    entries: BTreeMap<(String, usize, usize), Vec<EdgeColoring>>,
    m_table: BTreeMap<(usize, usize), u128>,
}

#[derive(Serialize, Deserialize)]
struct RegistryEntryJson {
    code: String,
    k: usize,
    n: usize,
    colorings: Vec<Vec<u8>>,
}

#[derive(Serialize, Deserialize)]
struct MTableEntryJson {
    k: usize,
    n: usize,
    m: String,
}

#[derive(Serialize, Deserialize)]
struct RegistryJson {
    format_version: u32,
    seed: u64,
    m_table: Vec<MTableEntryJson>,
    entries: Vec<RegistryEntryJson>,
}

impl NetRegistry {
    pub fn new(seed: u64) -> Self {
        NetRegistry {
            seed,
            entries: BTreeMap::new(),
            m_table: BTreeMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, code_hex: &str, k: usize, n: usize) -> bool {
        self.entries
            .contains_key(&(code_hex.to_string(), k, n))
    }

    fn insert(
        &mut self,
        code_hex: String,
        k: usize,
        n: usize,
        colorings: Vec<EdgeColoring>,
    ) -> Result<()> {
        let expected = m_table(k, n).ok_or_else(|| {
            Error::Infeasible(format!("M({k}, {n}) overflows; cannot register"))
        })?;
        if colorings.len() as u128 != expected {
            return Err(Error::Infeasible(format!(
                "net list has length {}, expected M({k}, {n}) = {expected}",
                colorings.len()
            )));
        }
        self.m_table.insert((k, n), expected);
        self.entries.insert((code_hex, k, n), colorings);
        Ok(())
    }

    /// Builds (exactly) and registers the net for the canonical class of
    /// `g`, verifying the covering property when enumeration fits the
    /// budget. No-op if already present.
    pub fn ensure_built(&mut self, g: &Graph, k: usize, n: usize, budget: u64) -> Result<()> {
        let cf = canonical_form(g)?;
        let key = (cf.code_hex(), k, n);
        if self.entries.contains_key(&key) {
            return Ok(());
        }
        let representative = cf.canonical_graph();
        let net = build_net(&representative, k, n, budget)?;
        let report = verify_net_property(&representative, &net, k, n, budget)?;
        if !report.holds {
            return Err(Error::Infeasible(format!(
                "constructed net for k={k}, n={n} fails its covering property \
                 (radius {})",
                report.covering_radius
            )));
        }
        self.insert(key.0, k, n, net)
    }

    /// Greedy-regime registration: builds a farthest-point net over samples
    /// of the canonical representative and cycles it up to length
    /// `M(k, n)` so decoration arity stays uniform.
    pub fn ensure_built_greedy(
        &mut self,
        g: &Graph,
        k: usize,
        n: usize,
        samples: usize,
    ) -> Result<()> {
        let cf = canonical_form(g)?;
        let key = (cf.code_hex(), k, n);
        if self.entries.contains_key(&key) {
            return Ok(());
        }
        let expected = m_table(k, n)
            .filter(|&m| m <= MAX_MATERIALIZED_NET)
            .ok_or_else(|| {
                Error::Infeasible(format!(
                    "M({k}, {n}) too large to materialize; use Decoration::from_net_lists"
                ))
            })?;
        let representative = cf.canonical_graph();
        let base = greedy_net(&representative, k, n, samples, self.seed)?;
        let padded: Vec<EdgeColoring> = (0..expected as usize)
            .map(|i| base[i % base.len()].clone())
            .collect();
        self.insert(key.0, k, n, padded)
    }

    /// Pulls the canonical representative's net back along the fixed
    /// isomorphism, so isomorphic graphs receive consistent, index-aligned
    /// nets.
    pub fn transported_net(
        &self,
        h: &Graph,
        k: usize,
        n: usize,
    ) -> Result<Vec<EdgeColoring>> {
        let cf = canonical_form(h)?;
        let entry = self
            .entries
            .get(&(cf.code_hex(), k, n))
            .ok_or(Error::MissingNetEntry { k, n })?;
        let edge_images: Vec<usize> = (0..h.edge_count())
            .map(|e| cf.edge_image(h, e))
            .collect();
        entry
            .iter()
            .map(|alpha| {
                let colors = edge_images.iter().map(|&j| alpha.colors()[j]).collect();
                EdgeColoring::new(k, colors)
            })
            .collect()
    }

    pub fn to_json_string(&self) -> String {
        let doc = RegistryJson {
            format_version: REGISTRY_FORMAT_VERSION,
            seed: self.seed,
            m_table: self
                .m_table
                .iter()
                .map(|(&(k, n), &m)| MTableEntryJson {
                    k,
                    n,
                    m: m.to_string(),
                })
                .collect(),
            entries: self
                .entries
                .iter()
                .map(|(&(ref code, k, n), colorings)| RegistryEntryJson {
                    code: code.clone(),
                    k,
                    n,
                    colorings: colorings.iter().map(|c| c.colors().to_vec()).collect(),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("registry serialization cannot fail")
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let doc: RegistryJson = serde_json::from_str(json)?;
        if doc.format_version != REGISTRY_FORMAT_VERSION {
            return Err(Error::Infeasible(format!(
                "unsupported registry format version {}",
                doc.format_version
            )));
        }
        let mut registry = NetRegistry::new(doc.seed);
        for entry in doc.m_table {
            let m: u128 = entry
                .m
                .parse()
                .map_err(|_| Error::Infeasible(format!("bad M value {:?}", entry.m)))?;
            registry.m_table.insert((entry.k, entry.n), m);
        }
        for entry in doc.entries {
            let colorings: Result<Vec<EdgeColoring>> = entry
                .colorings
                .into_iter()
                .map(|colors| EdgeColoring::new(entry.k, colors))
                .collect();
            registry.insert(entry.code, entry.k, entry.n, colorings?)?;
        }
        Ok(registry)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        NetRegistry::from_json_str(&text)
    }
}

/// Truncated per-edge decoration: for each `(k, n)` in the window and each
/// net index `i`, the color the i-th net coloring gives the edge. Tuples
/// are assembled in `(k, n, i)` lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Decoration {
    /// `(k, n, arity)` sorted by `(k, n)`.
    window: Vec<(usize, usize, usize)>,
    /// One concatenated tuple per edge.
    tuples: Vec<Vec<u8>>,
}

impl Decoration {
    /// Assembles decorations from explicit net lists, one per `(k, n)`.
    /// Arity per window entry equals the list length, so this also serves
    /// the greedy regime where `M(k, n)` is too large to materialize.
    pub fn from_net_lists(
        g: &Graph,
        lists: &[(usize, usize, Vec<EdgeColoring>)],
    ) -> Result<Self> {
        let mut sorted: Vec<&(usize, usize, Vec<EdgeColoring>)> = lists.iter().collect();
        sorted.sort_by_key(|&&(k, n, _)| (k, n));
        for pair in sorted.windows(2) {
            if (pair[0].0, pair[0].1) == (pair[1].0, pair[1].1) {
                return Err(Error::DecorationMismatch(format!(
                    "duplicate window entry ({}, {})",
                    pair[0].0, pair[0].1
                )));
            }
        }
        let mut window = Vec::with_capacity(sorted.len());
        let mut tuples = vec![Vec::new(); g.edge_count()];
        for &&(k, n, ref list) in &sorted {
            for coloring in list {
                if coloring.k() != k || coloring.edge_count() != g.edge_count() {
                    return Err(Error::DecorationMismatch(format!(
                        "net coloring does not fit graph at (k={k}, n={n})"
                    )));
                }
                for (e, tuple) in tuples.iter_mut().enumerate() {
                    tuple.push(coloring.colors()[e]);
                }
            }
            window.push((k, n, list.len()));
        }
        Ok(Decoration { window, tuples })
    }

    /// The constant decoration: window `{(1, 1)}`, where the only
    /// 1-coloring forces every tuple entry to color 1. Equals
    /// [`decorate`] with window `{(1, 1)}`.
    pub fn constant(g: &Graph) -> Self {
        let arity = m_table(1, 1).expect("M(1,1) is small") as usize;
        let list = vec![
            EdgeColoring::constant(1, g.edge_count()).expect("constant coloring");
            arity
        ];
        Decoration::from_net_lists(g, &[(1, 1, list)]).expect("constant decoration is valid")
    }

    pub fn window(&self) -> &[(usize, usize, usize)] {
        &self.window
    }

    pub fn edge_count(&self) -> usize {
        self.tuples.len()
    }

    pub fn tuple(&self, edge: usize) -> &[u8] {
        &self.tuples[edge]
    }

    pub fn arity(&self) -> usize {
        self.window.iter().map(|&(_, _, a)| a).sum()
    }

    /// Projection `P_m`: keeps window entries with `k <= m` and `n <= m`.
    /// `m = 0` forgets the decoration entirely.
    pub fn project(&self, m: usize) -> Decoration {
        let mut window = Vec::new();
        let mut keep_ranges = Vec::new();
        let mut offset = 0;
        for &(k, n, arity) in &self.window {
            if k <= m && n <= m {
                window.push((k, n, arity));
                keep_ranges.push(offset..offset + arity);
            }
            offset += arity;
        }
        let tuples = self
            .tuples
            .iter()
            .map(|t| {
                keep_ranges
                    .iter()
                    .flat_map(|r| t[r.clone()].iter().copied())
                    .collect()
            })
            .collect();
        Decoration { window, tuples }
    }

    /// Restriction to a subset of edges (given by original edge ids, in the
    /// order the restricted graph lists them).
    pub fn restrict(&self, edge_ids: &[usize]) -> Decoration {
        Decoration {
            window: self.window.clone(),
            tuples: edge_ids.iter().map(|&e| self.tuples[e].clone()).collect(),
        }
    }
}

/// Assembles the truncated decoration of `g` from transported nets for
/// every `(k, n)` in the window.
pub fn decorate(
    g: &Graph,
    registry: &NetRegistry,
    window: &[(usize, usize)],
) -> Result<Decoration> {
    let mut sorted: Vec<(usize, usize)> = window.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut lists = Vec::with_capacity(sorted.len());
    for (k, n) in sorted {
        lists.push((k, n, registry.transported_net(g, k, n)?));
    }
    Decoration::from_net_lists(g, &lists)
}

/// Result of the decoration-injectivity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InjectivityCheck {
    pub injective: bool,
    /// The lowest colliding edge pair when not injective.
    pub witness: Option<(usize, usize)>,
}

/// True exactly when no two distinct edges carry equal tuples.
pub fn check_decoration_injective(g: &Graph, decoration: &Decoration) -> Result<InjectivityCheck> {
    if decoration.edge_count() != g.edge_count() {
        return Err(Error::DecorationMismatch(format!(
            "decoration covers {} edges, graph has {}",
            decoration.edge_count(),
            g.edge_count()
        )));
    }
    let mut seen: HashMap<&[u8], usize> = HashMap::new();
    for e in 0..g.edge_count() {
        if let Some(&first) = seen.get(decoration.tuple(e)) {
            return Ok(InjectivityCheck {
                injective: false,
                witness: Some((first, e)),
            });
        }
        seen.insert(decoration.tuple(e), e);
    }
    Ok(InjectivityCheck {
        injective: true,
        witness: None,
    })
}
