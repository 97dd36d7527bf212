//! Cycle-matroid rank functions of finite bounded-degree directed graphs,
//! their k-quotient sets under edge colorings, and the machinery built on
//! top of them: Hausdorff / quotient distances, 2^(-n)-nets of coloring
//! space, per-edge decorations, and rooted decorated balls with a local
//! distance.
//!
//! Rank values and ball statistics are exact rationals throughout; floating
//! point enters only in distance computations. All operations are pure
//! functions of immutable inputs and all randomness is seeded explicitly.

mod canon;
mod error;
pub mod graph;
pub mod nets;
pub mod omega;
pub mod quotient;
pub mod seed;

pub use error::{Error, Result};
pub use graph::{
    components, greedy_proper_edge_coloring, involution_symmetry_check, normalized_rank,
    rank_by_vertex_average, EdgeSubset, Graph,
};
pub use nets::{
    build_net, canonical_form, check_decoration_injective, decorate, greedy_net, m_table,
    minimal_subnet, verify_net_property, CanonicalForm, Decoration, InjectivityCheck,
    NetRegistry,
};
pub use omega::{
    ball, ball_distribution, distribution_distance, embed_and_check_adjacency, local_distance,
    rooted_iso, BallDistribution, LocalDistanceResult, RootedBall, RootedTriple,
};
pub use quotient::{
    dk_distance, dq_truncated, hausdorff, quotient_point, quotient_points_in_range,
    quotient_set_exact, quotient_set_sampled, tail_bound, DistanceInterval, DqMode, DqReport,
    DqTerm, EdgeColoring, QuotientPoint, QuotientSet, SetStats,
};

/// Exact rational used for rank values and probabilities. Denominators stay
/// small (they divide vertex counts at desk scale), so a 64-bit ratio is
/// plenty.
pub type Rational = num_rational::Rational64;
