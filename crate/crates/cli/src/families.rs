//! Deterministic, seed-reproducible generators for the four graph families
//! used in convergence experiments. Every generated graph is connected and
//! respects its declared degree bound.
//!
//! Orientation policy is pinned per family so reruns are bit-identical:
//! cycles orient along the cycle (`i -> i+1 mod n`), paths along the path,
//! torus grids along the +x and +y directions, and random regular graphs
//! from the smaller to the larger endpoint.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rankq_core::{Error, Graph};

use crate::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Cycle,
    Path,
    TorusGrid,
    RandomRegular,
}

impl Family {
    pub fn label(&self) -> &'static str {
        match self {
            Family::Cycle => "cycle",
            Family::Path => "path",
            Family::TorusGrid => "torus_grid",
            Family::RandomRegular => "random_regular",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Family> {
        match s {
            "cycle" => Ok(Family::Cycle),
            "path" => Ok(Family::Path),
            "torus_grid" | "torus-grid" => Ok(Family::TorusGrid),
            "random_regular" | "random-regular" => Ok(Family::RandomRegular),
            other => Err(CliError::Config(format!("unknown family {other:?}"))),
        }
    }
}

/// Directed cycle `0 -> 1 -> ... -> n-1 -> 0`.
pub fn cycle(n: usize) -> Result<Graph> {
    if n < 3 {
        return Err(CliError::Config(format!(
            "cycle needs at least 3 vertices, got {n}"
        )));
    }
    let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Ok(Graph::new(n, 2, edges)?)
}

/// Directed path `0 -> 1 -> ... -> n-1`.
pub fn path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(CliError::Config(format!(
            "path needs at least 2 vertices, got {n}"
        )));
    }
    let edges = (0..n - 1).map(|i| (i, i + 1)).collect();
    Ok(Graph::new(n, 2, edges)?)
}

/// `side x side` torus grid, 4-regular, edges oriented +x and +y.
pub fn torus_grid(side: usize) -> Result<Graph> {
    if side < 3 {
        return Err(CliError::Config(format!(
            "torus grid needs side >= 3 to stay simple, got {side}"
        )));
    }
    let id = |i: usize, j: usize| i * side + j;
    let mut edges = Vec::with_capacity(2 * side * side);
    for i in 0..side {
        for j in 0..side {
            edges.push((id(i, j), id(i, (j + 1) % side)));
            edges.push((id(i, j), id((i + 1) % side, j)));
        }
    }
    Ok(Graph::new(side * side, 4, edges)?)
}

const PAIRING_RETRY_CAP: usize = 1000;

/// Random d-regular graph via the pairing model: shuffle stubs, pair them,
/// reject until simple and connected. Edges oriented smaller -> larger.
pub fn random_regular(n: usize, degree: usize, seed: u64) -> Result<Graph> {
    if degree == 0 || degree >= n {
        return Err(CliError::Config(format!(
            "regular degree must satisfy 1 <= d < n, got d={degree}, n={n}"
        )));
    }
    if !(n * degree).is_multiple_of(2) {
        return Err(CliError::Config(format!(
            "n * d must be even, got n={n}, d={degree}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stubs: Vec<usize> = (0..n)
        .flat_map(|v| std::iter::repeat_n(v, degree))
        .collect();
    for _ in 0..PAIRING_RETRY_CAP {
        stubs.shuffle(&mut rng);
        let mut edges = Vec::with_capacity(n * degree / 2);
        let mut ok = true;
        for pair in stubs.chunks(2) {
            let (u, v) = (pair[0], pair[1]);
            if u == v {
                ok = false;
                break;
            }
            let e = (u.min(v), u.max(v));
            if edges.contains(&e) {
                ok = false;
                break;
            }
            edges.push(e);
        }
        if !ok {
            continue;
        }
        let g = Graph::new(n, degree, edges)?;
        if g.is_connected() {
            return Ok(g);
        }
    }
    Err(CliError::Core(Error::Infeasible(format!(
        "no simple connected {degree}-regular graph on {n} vertices found in \
         {PAIRING_RETRY_CAP} pairing attempts"
    ))))
}

/// Generates a connected bounded-degree graph of the given family.
/// Deterministic given the seed; `degree` only matters for
/// `random_regular`.
pub fn generate(family: Family, size: usize, degree: usize, seed: u64) -> Result<Graph> {
    match family {
        Family::Cycle => cycle(size),
        Family::Path => path(size),
        Family::TorusGrid => torus_grid(size),
        Family::RandomRegular => random_regular(size, degree, seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_is_regular_and_connected() {
        let g = cycle(5).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 5);
        assert!(g.is_connected());
    }

    #[test]
    fn torus_grid_counts() {
        let g = torus_grid(4).unwrap();
        assert_eq!(g.vertex_count(), 16);
        assert_eq!(g.edge_count(), 32);
        assert!(g.is_connected());
        let mut degree = [0usize; 16];
        for &(t, h) in g.edges() {
            degree[t] += 1;
            degree[h] += 1;
        }
        assert!(degree.iter().all(|&d| d == 4));
    }

    #[test]
    fn torus_grid_rejects_side_two() {
        assert!(torus_grid(2).is_err());
    }

    #[test]
    fn random_regular_is_regular_connected_and_deterministic() {
        let g = random_regular(10, 3, 42).unwrap();
        assert!(g.is_connected());
        let mut degree = [0usize; 10];
        for &(t, h) in g.edges() {
            degree[t] += 1;
            degree[h] += 1;
        }
        assert!(degree.iter().all(|&d| d == 3));
        assert_eq!(g, random_regular(10, 3, 42).unwrap());
        // tail < head orientation
        assert!(g.edges().iter().all(|&(t, h)| t < h));
    }

    #[test]
    fn random_regular_rejects_odd_total() {
        assert!(random_regular(5, 3, 1).is_err());
    }
}
