//! Convergence experiment orchestration and the oracle verification suite.
//!
//! A convergence run takes a strictly increasing size schedule in one graph
//! family, computes per-k quotient sets once per graph (exactly when
//! `k^|E|` fits the budget, by seeded sampling otherwise), and reports the
//! truncated quotient distance plus ball-class total-variation statistics
//! for every consecutive pair. All randomness flows from the single config
//! seed through named sub-streams, so identical configs reproduce
//! byte-identical CSV output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use rankq_core::quotient::coloring_count;
use rankq_core::seed::derive_seed;
use rankq_core::{
    ball, ball_distribution, check_decoration_injective, decorate, dk_distance, hausdorff,
    minimal_subnet, normalized_rank, quotient_point, quotient_set_exact, quotient_set_sampled,
    rank_by_vertex_average, rooted_iso, tail_bound, verify_net_property, BallDistribution,
    Decoration, DistanceInterval, DqMode, DqReport, DqTerm, EdgeColoring, EdgeSubset, Error,
    Graph, NetRegistry, QuotientPoint, QuotientSet, Rational, SetStats,
};

use crate::corpus::corpus;
use crate::families::{generate, Family};
use crate::{CliError, Result};

pub const DEFAULT_BUDGET: u64 = 10_000_000;
pub const DEFAULT_SAMPLES: usize = 100_000;

fn default_budget() -> u64 {
    DEFAULT_BUDGET
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES
}

fn default_degree() -> usize {
    3
}

fn default_ball_stats() -> Vec<(usize, usize)> {
    vec![(2, 1)]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    Exact,
    Sampled,
    Auto,
}

impl ModeChoice {
    pub fn label(&self) -> &'static str {
        match self {
            ModeChoice::Exact => "exact",
            ModeChoice::Sampled => "sampled",
            ModeChoice::Auto => "auto",
        }
    }

    fn as_dq_mode(&self, budget: u64, samples: usize) -> DqMode {
        match self {
            ModeChoice::Exact => DqMode::Exact { budget },
            ModeChoice::Sampled => DqMode::Sampled { samples },
            ModeChoice::Auto => DqMode::Auto { budget, samples },
        }
    }
}

impl std::str::FromStr for ModeChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<ModeChoice> {
        match s {
            "exact" => Ok(ModeChoice::Exact),
            "sampled" => Ok(ModeChoice::Sampled),
            "auto" => Ok(ModeChoice::Auto),
            other => Err(CliError::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub family: Family,
    pub schedule: Vec<usize>,
    #[serde(default = "default_degree")]
    pub degree: usize,
    pub k_max: usize,
    #[serde(rename = "K")]
    pub truncation: usize,
    pub mode: ModeChoice,
    #[serde(default = "default_budget")]
    pub budget: u64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    pub seed: u64,
    #[serde(default = "default_ball_stats")]
    pub ball_stats: Vec<(usize, usize)>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.schedule.len() < 2 {
            return Err(CliError::Config(
                "schedule needs at least two sizes".into(),
            ));
        }
        if !self.schedule.windows(2).all(|w| w[0] < w[1]) {
            return Err(CliError::Config(
                "schedule must be strictly increasing".into(),
            ));
        }
        if self.truncation == 0 {
            return Err(CliError::Config("K must be at least 1".into()));
        }
        if self.truncation > self.k_max {
            return Err(CliError::Config(format!(
                "K = {} exceeds k_max = {}",
                self.truncation, self.k_max
            )));
        }
        if self.mode == ModeChoice::Exact && self.k_max > 3 && self.budget == DEFAULT_BUDGET {
            return Err(CliError::Config(
                "exact mode with k_max > 3 requires an explicit --budget override".into(),
            ));
        }
        if self.samples == 0 {
            return Err(CliError::Config("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BallTv {
    pub r: usize,
    pub m: usize,
    pub tv: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairReport {
    pub pair: usize,
    pub left_size: usize,
    pub right_size: usize,
    pub dq: DqReport,
    pub ball_tv: Vec<BallTv>,
    /// Provenance only; excluded from CSV so reruns stay byte-identical.
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub config: ExperimentConfig,
    pub pairs: Vec<PairReport>,
}

impl ConvergenceReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

fn resolve_quotient_set(
    g: &Graph,
    k: usize,
    config: &ExperimentConfig,
    size: usize,
) -> Result<(QuotientSet, u128)> {
    let required = coloring_count(k, g.edge_count()).unwrap_or(u128::MAX);
    let sample_seed = derive_seed(
        config.seed,
        &format!("qset/{}/{}/k{}", config.family.label(), size, k),
    );
    match config.mode {
        ModeChoice::Exact => {
            let set = quotient_set_exact(g, k, config.budget).map_err(|e| match e {
                Error::BudgetExceeded {
                    required, budget, ..
                } => CliError::Core(Error::BudgetExceeded {
                    required,
                    budget,
                    smallest_k: Some(k),
                }),
                other => CliError::Core(other),
            })?;
            Ok((set, required))
        }
        ModeChoice::Sampled => {
            let set = quotient_set_sampled(g, k, config.samples, sample_seed)?;
            Ok((set, config.samples as u128))
        }
        ModeChoice::Auto => {
            if required <= u128::from(config.budget) {
                Ok((quotient_set_exact(g, k, config.budget)?, required))
            } else {
                let set = quotient_set_sampled(g, k, config.samples, sample_seed)?;
                Ok((set, config.samples as u128))
            }
        }
    }
}

fn stats_for(set: &QuotientSet, colorings: u128) -> SetStats {
    SetStats {
        exact: set.is_exact(),
        colorings,
        distinct_points: set.len(),
        collisions: (!set.is_exact()).then(|| colorings - set.len() as u128),
    }
}

/// Runs the convergence experiment: quotient sets once per (graph, k), then
/// per-pair quotient distances and ball-class total variation.
pub fn run_convergence(config: &ExperimentConfig) -> Result<ConvergenceReport> {
    config.validate()?;
    let mut graphs = Vec::with_capacity(config.schedule.len());
    for &size in &config.schedule {
        let seed = derive_seed(
            config.seed,
            &format!("gen/{}/{}", config.family.label(), size),
        );
        let g = generate(config.family, size, config.degree, seed)?;
        if !g.is_connected() {
            return Err(CliError::Config(format!(
                "generated {} of size {size} is not connected",
                config.family.label()
            )));
        }
        graphs.push(g);
    }

    // quotient sets once per (graph, k); pairs reuse them
    let mut sets: Vec<Vec<(QuotientSet, u128)>> = Vec::with_capacity(graphs.len());
    for (g, &size) in graphs.iter().zip(&config.schedule) {
        let mut per_k = Vec::with_capacity(config.truncation);
        for k in 1..=config.truncation {
            per_k.push(resolve_quotient_set(g, k, config, size)?);
        }
        sets.push(per_k);
    }

    // ball distributions once per (graph, r, m), constant decoration
    let mut distributions: BTreeMap<(usize, usize, usize), BallDistribution> = BTreeMap::new();
    for (i, g) in graphs.iter().enumerate() {
        let dec = Decoration::constant(g);
        for &(r, m) in &config.ball_stats {
            distributions.insert((i, r, m), ball_distribution(g, &dec, r, m)?);
        }
    }

    let mut pairs = Vec::with_capacity(graphs.len() - 1);
    for i in 0..graphs.len() - 1 {
        let started = Instant::now();
        let mut lower = 0.0;
        let mut estimate = false;
        let mut terms = Vec::with_capacity(config.truncation);
        for k in 1..=config.truncation {
            let (left, left_count) = &sets[i][k - 1];
            let (right, right_count) = &sets[i + 1][k - 1];
            estimate |= !left.is_exact() || !right.is_exact();
            let dh = hausdorff(left, right)?;
            let weighted = 0.5f64.powi(k as i32) * dh;
            lower += weighted;
            terms.push(DqTerm {
                k,
                hausdorff: dh,
                weighted,
                left: stats_for(left, *left_count),
                right: stats_for(right, *right_count),
            });
        }
        let interval = DistanceInterval {
            lower,
            upper: lower + tail_bound(config.truncation),
        };
        if !interval.is_well_formed() {
            return Err(CliError::Config(format!(
                "internal invariant violated: malformed interval for pair {i}"
            )));
        }
        let ball_tv = config
            .ball_stats
            .iter()
            .map(|&(r, m)| {
                let d1 = &distributions[&(i, r, m)];
                let d2 = &distributions[&(i + 1, r, m)];
                Ok(BallTv {
                    r,
                    m,
                    tv: rankq_core::distribution_distance(d1, d2)?,
                })
            })
            .collect::<Result<Vec<BallTv>>>()?;
        pairs.push(PairReport {
            pair: i,
            left_size: config.schedule[i],
            right_size: config.schedule[i + 1],
            dq: DqReport {
                truncation: config.truncation,
                mode: config.mode.as_dq_mode(config.budget, config.samples),
                seed: config.seed,
                estimate,
                interval,
                terms,
            },
            ball_tv,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        });
    }
    Ok(ConvergenceReport {
        config: config.clone(),
        pairs,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    pair: usize,
    left_size: usize,
    right_size: usize,
    metric: &'a str,
    param: String,
    value: f64,
}

/// One row per pair per metric. Deterministic for a fixed report; floats
/// rendered shortest-roundtrip, matching the JSON rendering exactly.
pub fn csv_string(report: &ConvergenceReport) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for pair in &report.pairs {
        let base = |metric, param, value| CsvRow {
            pair: pair.pair,
            left_size: pair.left_size,
            right_size: pair.right_size,
            metric,
            param,
            value,
        };
        let k_param = format!("K={}", pair.dq.truncation);
        writer.serialize(base("dq_lower", k_param.clone(), pair.dq.interval.lower))?;
        writer.serialize(base("dq_upper", k_param, pair.dq.interval.upper))?;
        for term in &pair.dq.terms {
            writer.serialize(base("hausdorff", format!("k={}", term.k), term.hausdorff))?;
        }
        for tv in &pair.ball_tv {
            writer.serialize(base("ball_tv", format!("r={};m={}", tv.r, tv.m), tv.tv))?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Writes `{base}.csv` and `{base}.json`, returning both paths.
pub fn write_outputs(report: &ConvergenceReport, base: &Path) -> Result<(PathBuf, PathBuf)> {
    let csv_path = base.with_extension("csv");
    let json_path = base.with_extension("json");
    std::fs::write(&csv_path, csv_string(report)?)?;
    std::fs::write(&json_path, report.to_json_string())?;
    Ok((csv_path, json_path))
}

// ---------------------------------------------------------------------------
// verification suite
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifySummary {
    pub checks: Vec<CheckResult>,
}

impl VerifySummary {
    pub fn all_skipped(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Skipped)
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }

    /// 0 = pass, 1 = fail, 2 = everything skipped.
    pub fn exit_code(&self) -> u8 {
        if self.all_skipped() {
            2
        } else if self.any_failed() {
            1
        } else {
            0
        }
    }

    pub fn table(&self) -> String {
        let width = self
            .checks
            .iter()
            .map(|c| c.name.len())
            .max()
            .unwrap_or(0)
            .max(5);
        let mut out = String::new();
        out.push_str(&format!("{:width$}  {:7}  detail\n", "check", "status"));
        for c in &self.checks {
            let status = match c.status {
                CheckStatus::Pass => "pass",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skipped => "skipped",
            };
            out.push_str(&format!("{:width$}  {:7}  {}\n", c.name, status, c.detail));
        }
        out
    }
}

const VERIFY_SEED: u64 = 0x5eed;

fn random_graph(rng: &mut ChaCha8Rng, max_vertices: usize, max_degree: usize) -> Graph {
    let n = rng.gen_range(1..=max_vertices);
    let bound = rng.gen_range(1..=max_degree);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
        .collect();
    for i in (1..pairs.len()).rev() {
        pairs.swap(i, rng.gen_range(0..=i));
    }
    let mut degree = vec![0usize; n];
    let mut edges = Vec::new();
    for (u, v) in pairs {
        if degree[u] < bound && degree[v] < bound && rng.gen_bool(0.7) {
            degree[u] += 1;
            degree[v] += 1;
            edges.push(if rng.gen_bool(0.5) { (u, v) } else { (v, u) });
        }
    }
    Graph::new(n, bound, edges).expect("construction respects the bound")
}

fn random_subset(rng: &mut ChaCha8Rng, edge_count: usize) -> EdgeSubset {
    EdgeSubset::new((0..edge_count).filter(|_| rng.gen_bool(0.5)))
}

fn random_coloring(rng: &mut ChaCha8Rng, k: usize, edge_count: usize) -> EdgeColoring {
    let colors = (0..edge_count).map(|_| rng.gen_range(1..=k) as u8).collect();
    EdgeColoring::new(k, colors).expect("colors are in range")
}

fn check_rank_identity(budget: u64) -> CheckResult {
    let name = "rank-identity".to_string();
    if budget == 0 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "zero budget".into(),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(VERIFY_SEED, "rank-identity"));
    let mut trials = 0usize;
    for _ in 0..200 {
        let g = random_graph(&mut rng, 12, 4);
        for _ in 0..50 {
            let f = random_subset(&mut rng, g.edge_count());
            let a = normalized_rank(&g, &f).expect("valid subset");
            let b = rank_by_vertex_average(&g, &f).expect("valid subset");
            if a != b {
                return CheckResult {
                    name,
                    status: CheckStatus::Fail,
                    detail: format!("routes disagree: {a} vs {b}"),
                };
            }
            trials += 1;
        }
    }
    CheckResult {
        name,
        status: CheckStatus::Pass,
        detail: format!("{trials} subset evaluations, exact equality"),
    }
}

fn check_rank_mutation(budget: u64) -> CheckResult {
    let name = "rank-mutation".to_string();
    if budget == 0 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "zero budget".into(),
        };
    }
    // an off-by-one component count must be caught by the identity check
    let g = crate::families::cycle(4).expect("c4");
    let mut detected = false;
    for bits in 0..16u32 {
        let f = EdgeSubset::new((0..4).filter(|i| bits & (1 << i) != 0));
        let c = rankq_core::components(&g, &f).expect("valid").len();
        let n = g.vertex_count() as i64;
        let mutant = Rational::new(n - (c as i64 + 1), n);
        if mutant != rank_by_vertex_average(&g, &f).expect("valid") {
            detected = true;
        }
    }
    if detected {
        CheckResult {
            name,
            status: CheckStatus::Pass,
            detail: "off-by-one c(F) detected by the identity oracle".into(),
        }
    } else {
        CheckResult {
            name,
            status: CheckStatus::Fail,
            detail: "mutated rank slipped past the identity oracle".into(),
        }
    }
}

fn check_sampled_subset_exact(budget: u64) -> CheckResult {
    let name = "sampled-subset-exact".to_string();
    if budget < 256 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "budget below 2^8 colorings".into(),
        };
    }
    let mut checked = 0usize;
    for item in corpus() {
        if item.graph.edge_count() > 8 {
            continue;
        }
        for k in 1..=2usize {
            let exact = match quotient_set_exact(&item.graph, k, budget) {
                Ok(set) => set,
                Err(_) => continue,
            };
            let seed = derive_seed(VERIFY_SEED, &format!("sampled/{}/{k}", item.name));
            let sampled = quotient_set_sampled(&item.graph, k, 10_000, seed)
                .expect("sampling is valid");
            if !sampled.is_subset_of(&exact) {
                return CheckResult {
                    name,
                    status: CheckStatus::Fail,
                    detail: format!("sampled ⊄ exact for {} at k={k}", item.name),
                };
            }
            checked += 1;
        }
    }
    CheckResult {
        name,
        status: CheckStatus::Pass,
        detail: format!("{checked} (graph, k) pairs, sampled ⊆ exact"),
    }
}

fn check_net_property(budget: u64) -> CheckResult {
    let name = "net-property".to_string();
    if budget < 16 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "budget below 2^4 colorings".into(),
        };
    }
    let graphs: Vec<(&str, Graph)> = corpus()
        .into_iter()
        .filter(|c| matches!(c.name, "c3" | "c4" | "p4"))
        .map(|c| (c.name, c.graph))
        .collect();
    let mut verified = 0usize;
    for (gname, g) in &graphs {
        for n in 1..=2usize {
            let net = match rankq_core::build_net(g, 2, n, budget) {
                Ok(net) => net,
                Err(_) => {
                    return CheckResult {
                        name,
                        status: CheckStatus::Skipped,
                        detail: format!("budget too small to build net for {gname}"),
                    }
                }
            };
            let report = verify_net_property(g, &net, 2, n, budget).expect("within budget");
            if !report.holds {
                return CheckResult {
                    name,
                    status: CheckStatus::Fail,
                    detail: format!("net property fails for {gname} at n={n}"),
                };
            }
            // every element of the minimal subnet must be necessary
            let minimal = minimal_subnet(g, &net, 2, n, budget).expect("within budget");
            for drop in 0..minimal.len() {
                if minimal.len() == 1 {
                    continue;
                }
                let mut mutated = minimal.clone();
                mutated.remove(drop);
                if verify_net_property(g, &mutated, 2, n, budget)
                    .expect("within budget")
                    .holds
                {
                    return CheckResult {
                        name,
                        status: CheckStatus::Fail,
                        detail: format!(
                            "mutation not detected: element {drop} of {gname} n={n} redundant"
                        ),
                    };
                }
            }
            verified += 1;
        }
    }
    CheckResult {
        name,
        status: CheckStatus::Pass,
        detail: format!("{verified} (graph, n) nets verified exhaustively, mutations detected"),
    }
}

fn check_submodularity(budget: u64) -> CheckResult {
    let name = "submodularity".to_string();
    if budget == 0 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "zero budget".into(),
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(VERIFY_SEED, "submodularity"));
    let graphs: Vec<Graph> = corpus().into_iter().map(|c| c.graph).collect();
    let trials = 10_000usize;
    for t in 0..trials {
        let g = &graphs[t % graphs.len()];
        let k = rng.gen_range(1..=3usize);
        let coloring = random_coloring(&mut rng, k, g.edge_count());
        let point = quotient_point(g, &coloring).expect("valid coloring");
        let dim = 1usize << k;
        let a = rng.gen_range(0..dim);
        let b = rng.gen_range(0..dim);
        let coords = point.coords();
        if coords[a | b] + coords[a & b] > coords[a] + coords[b] {
            return CheckResult {
                name,
                status: CheckStatus::Fail,
                detail: format!("submodularity violated at trial {t}"),
            };
        }
        if coords[a] > coords[a | b] {
            return CheckResult {
                name,
                status: CheckStatus::Fail,
                detail: format!("monotonicity violated at trial {t}"),
            };
        }
    }
    CheckResult {
        name,
        status: CheckStatus::Pass,
        detail: format!("{trials} exact subset-pair trials, zero violations"),
    }
}

fn check_metric_axioms(budget: u64) -> CheckResult {
    let name = "metric-axioms".to_string();
    if budget == 0 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "zero budget".into(),
        };
    }
    let tol = 1e-12;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(VERIFY_SEED, "metric-axioms"));
    let random_point = |rng: &mut ChaCha8Rng, k: usize| {
        let coords = (0..(1usize << k))
            .map(|_| Rational::new(rng.gen_range(0..=6), rng.gen_range(1..=6)))
            .collect();
        QuotientPoint::from_coords(k, coords).expect("valid point")
    };
    let random_set = |rng: &mut ChaCha8Rng, k: usize| {
        let count = rng.gen_range(1..=5usize);
        QuotientSet::from_points(k, (0..count).map(|_| random_point(rng, k)), true)
    };
    for trial in 0..1000usize {
        let k = rng.gen_range(1..=2usize);
        let a = random_set(&mut rng, k);
        let b = random_set(&mut rng, k);
        let c = random_set(&mut rng, k);
        let ab = hausdorff(&a, &b).expect("same k");
        let ba = hausdorff(&b, &a).expect("same k");
        let ac = hausdorff(&a, &c).expect("same k");
        let bc = hausdorff(&b, &c).expect("same k");
        if (ab - ba).abs() > tol
            || hausdorff(&a, &a).expect("same k") != 0.0
            || ac > ab + bc + tol
        {
            return CheckResult {
                name,
                status: CheckStatus::Fail,
                detail: format!("hausdorff axiom violated at trial {trial}"),
            };
        }
        if ab < tol && a != b {
            return CheckResult {
                name,
                status: CheckStatus::Fail,
                detail: format!("indiscernible sets differ at trial {trial}"),
            };
        }
    }
    // dk is a pseudometric over colored-graph triples
    let graphs: Vec<Graph> = corpus().into_iter().map(|c| c.graph).collect();
    for trial in 0..1000usize {
        let k = rng.gen_range(1..=3usize);
        let pick = |rng: &mut ChaCha8Rng| graphs[rng.gen_range(0..graphs.len())].clone();
        let (g1, g2, g3) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let c1 = random_coloring(&mut rng, k, g1.edge_count());
        let c2 = random_coloring(&mut rng, k, g2.edge_count());
        let c3 = random_coloring(&mut rng, k, g3.edge_count());
        let d12 = dk_distance(&g1, &c1, &g2, &c2).expect("same k");
        let d21 = dk_distance(&g2, &c2, &g1, &c1).expect("same k");
        let d13 = dk_distance(&g1, &c1, &g3, &c3).expect("same k");
        let d23 = dk_distance(&g2, &c2, &g3, &c3).expect("same k");
        let self_distance = dk_distance(&g1, &c1, &g1, &c1).expect("same k");
        if (d12 - d21).abs() > tol || self_distance != 0.0 || d13 > d12 + d23 + tol {
            return CheckResult {
                name,
                status: CheckStatus::Fail,
                detail: format!("dk axiom violated at trial {trial}"),
            };
        }
    }
    CheckResult {
        name,
        status: CheckStatus::Pass,
        detail: "2000 trials of hausdorff and dk axioms within 1e-12".into(),
    }
}

fn check_tau_injectivity(budget: u64) -> CheckResult {
    let name = "tau-injectivity".to_string();
    if budget < 65536 {
        return CheckResult {
            name,
            status: CheckStatus::Skipped,
            detail: "budget below the (2,2) net grid".into(),
        };
    }
    let window = [(2, 1), (2, 2)];
    let mut registry = NetRegistry::new(VERIFY_SEED);
    let mut injective_graphs = 0usize;
    for item in corpus() {
        if item.graph.edge_count() == 0 {
            continue;
        }
        if registry
            .ensure_built(&item.graph, 2, 1, budget)
            .and_then(|_| registry.ensure_built(&item.graph, 2, 2, budget))
            .is_err()
        {
            continue;
        }
        let dec = decorate(&item.graph, &registry, &window).expect("nets built");
        let check = check_decoration_injective(&item.graph, &dec).expect("sizes match");
        if !check.injective {
            continue;
        }
        injective_graphs += 1;
        let n = item.graph.vertex_count();
        let radius = n; // full-radius balls cover the whole graph
        let balls: Vec<_> = (0..n)
            .map(|v| ball(&item.graph, &dec, v, radius, 2).expect("valid vertex"))
            .collect();
        for i in 0..n {
            for j in (i + 1)..n {
                if rooted_iso(&balls[i], &balls[j]).expect("same truncation") {
                    return CheckResult {
                        name,
                        status: CheckStatus::Fail,
                        detail: format!(
                            "rooted triples {i} and {j} of {} coincide despite an \
                             injective decoration",
                            item.name
                        ),
                    };
                }
            }
        }
    }
    // the constant decoration on C_3 must fail with a witness
    let c3 = crate::families::cycle(3).expect("c3");
    let constant = Decoration::constant(&c3);
    let check = check_decoration_injective(&c3, &constant).expect("sizes match");
    if check.injective || check.witness.is_none() {
        return CheckResult {
            name,
            status: CheckStatus::Fail,
            detail: "constant C_3 decoration not flagged as non-injective".into(),
        };
    }
    CheckResult {
        name,
        status: CheckStatus::Pass,
        detail: format!(
            "{injective_graphs} injectively decorated graphs with pairwise distinct \
             rooted triples; constant C_3 counterexample detected"
        ),
    }
}

/// Runs every oracle cross-check. Zero budget skips everything (exit code
/// 2); failures are reported, not panicked.
pub fn verify_suite(budget: u64) -> VerifySummary {
    VerifySummary {
        checks: vec![
            check_rank_identity(budget),
            check_rank_mutation(budget),
            check_sampled_subset_exact(budget),
            check_net_property(budget),
            check_submodularity(budget),
            check_metric_axioms(budget),
            check_tau_injectivity(budget),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            family: Family::Cycle,
            schedule: vec![4, 8, 16],
            degree: 3,
            k_max: 2,
            truncation: 2,
            mode: ModeChoice::Auto,
            budget: DEFAULT_BUDGET,
            samples: 500,
            seed: 1,
            ball_stats: vec![(2, 1)],
            out: None,
        }
    }

    #[test]
    fn validation_rejects_bad_schedules() {
        let mut config = small_config();
        config.schedule = vec![8, 4];
        assert!(config.validate().is_err());
        config.schedule = vec![4];
        assert!(config.validate().is_err());
        config.schedule = vec![4, 8];
        config.truncation = 0;
        assert!(config.validate().is_err());
    }

    #[test]
    fn exact_mode_kmax_guard() {
        let mut config = small_config();
        config.mode = ModeChoice::Exact;
        config.k_max = 4;
        config.truncation = 4;
        assert!(config.validate().is_err());
        config.budget = 123_456;
        assert!(config.validate().is_ok());
    }

    #[test]
    fn convergence_run_is_deterministic() {
        let config = small_config();
        let a = run_convergence(&config).unwrap();
        let b = run_convergence(&config).unwrap();
        assert_eq!(csv_string(&a).unwrap(), csv_string(&b).unwrap());
        assert_eq!(a.pairs.len(), 2);
        for pair in &a.pairs {
            assert!(pair.dq.interval.is_well_formed());
        }
    }

    #[test]
    fn identical_schedule_entries_are_rejected() {
        let mut config = small_config();
        config.schedule = vec![4, 4];
        assert!(config.validate().is_err());
    }

    #[test]
    fn exact_mode_cycle_lower_bounds_are_non_increasing() {
        let mut config = small_config();
        config.mode = ModeChoice::Exact;
        let report = run_convergence(&config).unwrap();
        let lowers: Vec<f64> = report.pairs.iter().map(|p| p.dq.interval.lower).collect();
        assert!(lowers.windows(2).all(|w| w[0] >= w[1]), "{lowers:?}");
        assert!(!report.pairs[0].dq.estimate);
    }

    #[test]
    fn csv_has_one_row_per_pair_per_metric() {
        let config = small_config();
        let report = run_convergence(&config).unwrap();
        let csv = csv_string(&report).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        // header + 2 pairs * (dq_lower, dq_upper, hausdorff k=1, k=2, ball_tv)
        assert_eq!(lines.len(), 1 + 2 * 5);
        assert!(lines[0].starts_with("pair,left_size,right_size,metric,param,value"));
    }

    #[test]
    fn verify_suite_passes_with_default_budget() {
        let summary = verify_suite(DEFAULT_BUDGET);
        assert_eq!(summary.exit_code(), 0, "\n{}", summary.table());
    }

    #[test]
    fn verify_suite_zero_budget_skips() {
        let summary = verify_suite(0);
        assert!(summary.all_skipped());
        assert_eq!(summary.exit_code(), 2);
    }
}
