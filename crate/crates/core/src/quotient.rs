//! k-quotients of the normalized rank function: the pushforward of the rank
//! along an edge coloring, viewed as a point in `[0,1]^(2^k)`; quotient
//! sets over all (or sampled) colorings; Hausdorff distance between them;
//! and the truncated weighted-sum pseudometric with a certified tail bound.
//!
//! Subsets of `[k]` are indexed in binary-counter order throughout: index
//! `mask` contains color `i` iff bit `i - 1` of `mask` is set, with the
//! empty set at index 0. All serialization and distance code shares this
//! order.

use std::collections::BTreeSet;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::{normalized_rank, EdgeSubset, Graph};
use crate::seed::derive_seed;
use crate::{Error, Rational, Result};

/// Largest supported color count; keeps `2^k` coordinate vectors small.
pub const MAX_K: usize = 16;

/// A total map from edge identifiers to colors in `[k] = {1..k}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeColoring {
    k: usize,
    colors: Vec<u8>,
}

impl EdgeColoring {
    pub fn new(k: usize, colors: Vec<u8>) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidColoring(format!(
                "k must be in 1..={MAX_K}, got {k}"
            )));
        }
        if let Some(&c) = colors.iter().find(|&&c| c == 0 || usize::from(c) > k) {
            return Err(Error::InvalidColoring(format!(
                "color {c} outside [1, {k}]"
            )));
        }
        Ok(EdgeColoring { k, colors })
    }

    /// The all-ones coloring, index 0 in lexicographic enumeration order.
    pub fn constant(k: usize, edge_count: usize) -> Result<Self> {
        EdgeColoring::new(k, vec![1; edge_count])
    }

    /// Decodes enumeration index `index` (big-endian base-k digits over
    /// edge ids, so edge 0 is most significant and index 0 is all ones).
    pub fn from_index(k: usize, edge_count: usize, index: u128) -> Result<Self> {
        let mut digits = vec![1u8; edge_count];
        let mut rem = index;
        for slot in digits.iter_mut().rev() {
            *slot = (rem % k as u128) as u8 + 1;
            rem /= k as u128;
        }
        if rem != 0 {
            return Err(Error::InvalidColoring(format!(
                "index {index} out of range for k={k}, {edge_count} edges"
            )));
        }
        EdgeColoring::new(k, digits)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn colors(&self) -> &[u8] {
        &self.colors
    }

    pub fn edge_count(&self) -> usize {
        self.colors.len()
    }

    /// The preimage of a color subset given as a bitmask in binary-counter
    /// order.
    pub fn preimage(&self, mask: usize) -> EdgeSubset {
        EdgeSubset::new(
            self.colors
                .iter()
                .enumerate()
                .filter(|&(_, &c)| mask & (1usize << (c - 1)) != 0)
                .map(|(id, _)| id),
        )
    }

    fn validate_for(&self, g: &Graph) -> Result<()> {
        if self.colors.len() != g.edge_count() {
            return Err(Error::InvalidColoring(format!(
                "coloring covers {} edges, graph has {}",
                self.colors.len(),
                g.edge_count()
            )));
        }
        Ok(())
    }
}

/// Number of k-edge-colorings of a graph with `edge_count` edges.
pub fn coloring_count(k: usize, edge_count: usize) -> Option<u128> {
    let mut total: u128 = 1;
    for _ in 0..edge_count {
        total = total.checked_mul(k as u128)?;
    }
    Some(total)
}

/// Iterates all k-edge-colorings in lexicographic order over edge ids.
pub struct ColoringEnumerator {
    k: usize,
    next: Option<Vec<u8>>,
}

impl ColoringEnumerator {
    pub fn new(k: usize, edge_count: usize) -> Self {
        ColoringEnumerator {
            k,
            next: Some(vec![1; edge_count]),
        }
    }
}

impl Iterator for ColoringEnumerator {
    type Item = EdgeColoring;

    fn next(&mut self) -> Option<EdgeColoring> {
        let current = self.next.take()?;
        let mut following = current.clone();
        let mut advanced = false;
        for digit in following.iter_mut().rev() {
            if usize::from(*digit) < self.k {
                *digit += 1;
                advanced = true;
                break;
            }
            *digit = 1;
        }
        if advanced {
            self.next = Some(following);
        }
        Some(EdgeColoring {
            k: self.k,
            colors: current,
        })
    }
}

/// The embedded quotient rank function: one exact rational per subset of
/// `[k]`, in binary-counter order, `2^k` entries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuotientPoint {
    k: usize,
    coords: Vec<Rational>,
}

impl QuotientPoint {
    /// Builds a point from raw coordinates; only the length is enforced.
    /// Points produced by [`quotient_point`] additionally satisfy the
    /// lattice properties checked by [`QuotientPoint::lattice_violation`].
    pub fn from_coords(k: usize, coords: Vec<Rational>) -> Result<Self> {
        if k == 0 || k > MAX_K {
            return Err(Error::InvalidColoring(format!(
                "k must be in 1..={MAX_K}, got {k}"
            )));
        }
        if coords.len() != 1 << k {
            return Err(Error::InvalidColoring(format!(
                "expected {} coordinates, got {}",
                1usize << k,
                coords.len()
            )));
        }
        Ok(QuotientPoint { k, coords })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        self.coords
            .iter()
            .map(|r| *r.numer() as f64 / *r.denom() as f64)
            .collect()
    }

    pub fn euclidean_distance(&self, other: &QuotientPoint) -> Result<f64> {
        if self.k != other.k {
            return Err(Error::KMismatch {
                left: self.k,
                right: other.k,
            });
        }
        Ok(euclidean(&self.to_f64_vec(), &other.to_f64_vec()))
    }

    /// Returns the first violated lattice property, if any: `coords(∅) = 0`,
    /// monotonicity under subset inclusion, and submodularity. All checks
    /// are exact.
    pub fn lattice_violation(&self) -> Option<String> {
        if !self.coords[0].is_zero() {
            return Some(format!("coords(∅) = {}, expected 0", self.coords[0]));
        }
        let dim = self.coords.len();
        for mask in 0..dim {
            for bit in 0..self.k {
                if mask & (1 << bit) == 0 {
                    let bigger = mask | (1 << bit);
                    if self.coords[mask] > self.coords[bigger] {
                        return Some(format!("not monotone at {mask:b} ⊆ {bigger:b}"));
                    }
                }
            }
        }
        for a in 0..dim {
            for b in 0..dim {
                let join = self.coords[a | b] + self.coords[a & b];
                let meet = self.coords[a] + self.coords[b];
                if join > meet {
                    return Some(format!("not submodular at {a:b}, {b:b}"));
                }
            }
        }
        None
    }
}

fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// A finite, deduplicated set of quotient points for one k.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientSet {
    k: usize,
    points: Vec<QuotientPoint>,
    exact: bool,
}

impl QuotientSet {
    pub fn from_points<I>(k: usize, points: I, exact: bool) -> Self
    where
        I: IntoIterator<Item = QuotientPoint>,
    {
        let dedup: BTreeSet<QuotientPoint> = points.into_iter().collect();
        QuotientSet {
            k,
            points: dedup.into_iter().collect(),
            exact,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Points in ascending coordinate order (exact-rational comparison).
    pub fn points(&self) -> &[QuotientPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.exact
    }

    pub fn contains(&self, p: &QuotientPoint) -> bool {
        self.points.binary_search(p).is_ok()
    }

    pub fn is_subset_of(&self, other: &QuotientSet) -> bool {
        self.points.iter().all(|p| other.contains(p))
    }

    pub fn to_json_string(&self) -> String {
        let points: Vec<Vec<String>> = self
            .points
            .iter()
            .map(|p| p.coords.iter().map(rational_to_string).collect())
            .collect();
        let doc = QuotientSetJson {
            k: self.k,
            exact: self.exact,
            points,
        };
        serde_json::to_string_pretty(&doc).expect("quotient set serialization cannot fail")
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let doc: QuotientSetJson = serde_json::from_str(json)?;
        let mut points = Vec::with_capacity(doc.points.len());
        for coords in doc.points {
            let parsed: Result<Vec<Rational>> =
                coords.iter().map(|s| rational_from_string(s)).collect();
            points.push(QuotientPoint::from_coords(doc.k, parsed?)?);
        }
        Ok(QuotientSet::from_points(doc.k, points, doc.exact))
    }
}

#[derive(Serialize, Deserialize)]
struct QuotientSetJson {
    k: usize,
    exact: bool,
    points: Vec<Vec<String>>,
}

pub(crate) fn rational_to_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn rational_from_string(s: &str) -> Result<Rational> {
    let (numer, denom) = s
        .split_once('/')
        .ok_or_else(|| Error::InvalidColoring(format!("bad rational {s:?}")))?;
    let numer: i64 = numer
        .parse()
        .map_err(|_| Error::InvalidColoring(format!("bad rational {s:?}")))?;
    let denom: i64 = denom
        .parse()
        .map_err(|_| Error::InvalidColoring(format!("bad rational {s:?}")))?;
    if denom == 0 {
        return Err(Error::InvalidColoring(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(numer, denom))
}

/// The quotient rank function of `(g, α)` as a point: coordinate `A` is the
/// normalized rank of the preimage `α⁻¹(A)`.
pub fn quotient_point(g: &Graph, coloring: &EdgeColoring) -> Result<QuotientPoint> {
    coloring.validate_for(g)?;
    let dim = 1usize << coloring.k();
    let mut coords = Vec::with_capacity(dim);
    for mask in 0..dim {
        coords.push(normalized_rank(g, &coloring.preimage(mask))?);
    }
    QuotientPoint::from_coords(coloring.k(), coords)
}

/// Full enumeration of the k-quotient set. Refuses (reporting the required
/// count) when `k^|E|` exceeds the budget, signaling the caller to sample.
pub fn quotient_set_exact(g: &Graph, k: usize, budget: u64) -> Result<QuotientSet> {
    let required = coloring_count(k, g.edge_count()).unwrap_or(u128::MAX);
    if required > u128::from(budget) {
        return Err(Error::BudgetExceeded {
            required,
            budget: u128::from(budget),
            smallest_k: None,
        });
    }
    let points: Result<Vec<QuotientPoint>> = ColoringEnumerator::new(k, g.edge_count())
        .map(|c| quotient_point(g, &c))
        .collect();
    Ok(QuotientSet::from_points(k, points?, true))
}

/// Quotient points of the colorings with enumeration indices in
/// `start..end`. The index range `0..k^|E|` may be split across workers in
/// any way; merging the results by set union reproduces the full quotient
/// set regardless of the partition.
pub fn quotient_points_in_range(
    g: &Graph,
    k: usize,
    start: u128,
    end: u128,
) -> Result<Vec<QuotientPoint>> {
    let total = coloring_count(k, g.edge_count()).unwrap_or(u128::MAX);
    if start > end || end > total {
        return Err(Error::Infeasible(format!(
            "coloring index range {start}..{end} outside 0..{total}"
        )));
    }
    let mut points = Vec::with_capacity((end - start) as usize);
    if start == end {
        return Ok(points);
    }
    let mut coloring = EdgeColoring::from_index(k, g.edge_count(), start)?;
    for _ in start..end {
        points.push(quotient_point(g, &coloring)?);
        let mut advanced = false;
        for digit in coloring.colors.iter_mut().rev() {
            if usize::from(*digit) < k {
                *digit += 1;
                advanced = true;
                break;
            }
            *digit = 1;
        }
        if !advanced {
            break;
        }
    }
    Ok(points)
}

/// Inner approximation of the k-quotient set from `samples` uniform i.i.d.
/// colorings drawn from a seeded deterministic generator. Identical
/// `(g, k, samples, seed)` always yields identical output.
pub fn quotient_set_sampled(
    g: &Graph,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<QuotientSet> {
    if samples == 0 {
        return Err(Error::Infeasible("sample count must be at least 1".into()));
    }
    if k == 0 || k > MAX_K {
        return Err(Error::InvalidColoring(format!(
            "k must be in 1..={MAX_K}, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    for _ in 0..samples {
        let colors: Vec<u8> = (0..g.edge_count())
            .map(|_| rng.gen_range(1..=k) as u8)
            .collect();
        let coloring = EdgeColoring::new(k, colors)?;
        points.push(quotient_point(g, &coloring)?);
    }
    Ok(QuotientSet::from_points(k, points, false))
}

/// Hausdorff distance between two quotient sets under the Euclidean metric
/// on `R^(2^k)`. Brute-force all-pairs; sets are small at desk scale.
pub fn hausdorff(a: &QuotientSet, b: &QuotientSet) -> Result<f64> {
    if a.k() != b.k() {
        return Err(Error::KMismatch {
            left: a.k(),
            right: b.k(),
        });
    }
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let av: Vec<Vec<f64>> = a.points().iter().map(QuotientPoint::to_f64_vec).collect();
    let bv: Vec<Vec<f64>> = b.points().iter().map(QuotientPoint::to_f64_vec).collect();
    let directed = |from: &[Vec<f64>], to: &[Vec<f64>]| -> f64 {
        from.iter()
            .map(|x| {
                to.iter()
                    .map(|y| euclidean(x, y))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(&av, &bv).max(directed(&bv, &av)))
}

/// k-quotient distance between two colored graphs: Euclidean distance of
/// their quotient points. A pseudometric; distinct colorings of one graph
/// may sit at distance zero.
pub fn dk_distance(
    g1: &Graph,
    c1: &EdgeColoring,
    g2: &Graph,
    c2: &EdgeColoring,
) -> Result<f64> {
    if c1.k() != c2.k() {
        return Err(Error::KMismatch {
            left: c1.k(),
            right: c2.k(),
        });
    }
    quotient_point(g1, c1)?.euclidean_distance(&quotient_point(g2, c2)?)
}

/// A certified enclosure `[lower, upper]` of a distance value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceInterval {
    pub lower: f64,
    pub upper: f64,
}

impl DistanceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn is_well_formed(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite() && 0.0 <= self.lower
            && self.lower <= self.upper
    }
}

/// Tail of the quotient-distance series beyond truncation level `K`:
/// `Σ_{k>K} 2^{-k} · √(2^k) = 2^{-(K+1)/2} / (1 - 2^{-1/2})`, valid because
/// every quotient point lies in `[0,1]^(2^k)`, a cube of diameter `√(2^k)`.
pub fn tail_bound(truncation: usize) -> f64 {
    0.5f64.powf((truncation as f64 + 1.0) / 2.0) / (1.0 - std::f64::consts::FRAC_1_SQRT_2)
}

/// How quotient sets are produced inside [`dq_truncated`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum DqMode {
    /// Full enumeration for every k; errors on the smallest k over budget.
    Exact { budget: u64 },
    /// Seeded sampling for every k.
    Sampled { samples: usize },
    /// Enumeration where `k^|E|` fits the budget, sampling elsewhere.
    Auto { budget: u64, samples: usize },
}

impl DqMode {
    pub fn label(&self) -> &'static str {
        match self {
            DqMode::Exact { .. } => "exact",
            DqMode::Sampled { .. } => "sampled",
            DqMode::Auto { .. } => "auto",
        }
    }
}

/// Point counts and collision statistics for one side of one k-term.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SetStats {
    pub exact: bool,
    /// Colorings enumerated (exact) or drawn (sampled).
    pub colorings: u128,
    pub distinct_points: usize,
    /// Drawn colorings whose point was already present; `None` for exact.
    pub collisions: Option<u128>,
}

fn set_stats(set: &QuotientSet, colorings: u128) -> SetStats {
    SetStats {
        exact: set.is_exact(),
        colorings,
        distinct_points: set.len(),
        collisions: (!set.is_exact()).then(|| colorings - set.len() as u128),
    }
}

/// One `2^{-k} · d_Haus` term of the truncated quotient distance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DqTerm {
    pub k: usize,
    pub hausdorff: f64,
    pub weighted: f64,
    pub left: SetStats,
    pub right: SetStats,
}

/// Result of [`dq_truncated`]: the certified interval plus per-k detail.
/// Serialization carries the truncation level, mode with its budget and
/// sample parameters, and the seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DqReport {
    pub truncation: usize,
    #[serde(flatten)]
    pub mode: DqMode,
    pub seed: u64,
    /// In exact mode the interval is certified; in sampled mode it is an
    /// estimate (sampling yields inner approximations of each quotient set,
    /// so the Hausdorff terms carry no one-sided guarantee).
    pub estimate: bool,
    pub interval: DistanceInterval,
    pub terms: Vec<DqTerm>,
}

fn resolve_set(
    g: &Graph,
    k: usize,
    mode: &DqMode,
    seed: u64,
    side: &str,
) -> Result<(QuotientSet, u128)> {
    let required = coloring_count(k, g.edge_count()).unwrap_or(u128::MAX);
    match *mode {
        DqMode::Exact { budget } => {
            let set = quotient_set_exact(g, k, budget).map_err(|e| match e {
                Error::BudgetExceeded {
                    required, budget, ..
                } => Error::BudgetExceeded {
                    required,
                    budget,
                    smallest_k: Some(k),
                },
                other => other,
            })?;
            Ok((set, required))
        }
        DqMode::Sampled { samples } => {
            let sub = derive_seed(seed, &format!("dq/k{k}/{side}"));
            Ok((quotient_set_sampled(g, k, samples, sub)?, samples as u128))
        }
        DqMode::Auto { budget, samples } => {
            if required <= u128::from(budget) {
                Ok((quotient_set_exact(g, k, budget)?, required))
            } else {
                let sub = derive_seed(seed, &format!("dq/k{k}/{side}"));
                Ok((quotient_set_sampled(g, k, samples, sub)?, samples as u128))
            }
        }
    }
}

/// Truncated quotient pseudometric between the rank functions of two
/// graphs: `lower = Σ_{k=1}^{K} 2^{-k} · d_Haus(Q_k(g1), Q_k(g2))` and
/// `upper = lower + tail(K)`.
pub fn dq_truncated(
    g1: &Graph,
    g2: &Graph,
    truncation: usize,
    mode: DqMode,
    seed: u64,
) -> Result<DqReport> {
    if truncation == 0 {
        return Err(Error::Infeasible("truncation level must be at least 1".into()));
    }
    let mut lower = 0.0;
    let mut terms = Vec::with_capacity(truncation);
    let mut estimate = false;
    for k in 1..=truncation {
        let (left_set, left_count) = resolve_set(g1, k, &mode, seed, "left")?;
        let (right_set, right_count) = resolve_set(g2, k, &mode, seed, "right")?;
        estimate |= !left_set.is_exact() || !right_set.is_exact();
        let dh = hausdorff(&left_set, &right_set)?;
        let weighted = 0.5f64.powi(k as i32) * dh;
        lower += weighted;
        terms.push(DqTerm {
            k,
            hausdorff: dh,
            weighted,
            left: set_stats(&left_set, left_count),
            right: set_stats(&right_set, right_count),
        });
    }
    Ok(DqReport {
        truncation,
        mode,
        seed,
        estimate,
        interval: DistanceInterval {
            lower,
            upper: lower + tail_bound(truncation),
        },
        terms,
    })
}
