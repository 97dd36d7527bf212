//! Command-line interface: graph generation, rank and quotient-set
//! queries, quotient distances, net construction, decorations, ball
//! statistics, convergence experiments, and the verification suite.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use rankq_cli::experiment::{
    csv_string, run_convergence, verify_suite, write_outputs, ExperimentConfig, ModeChoice,
    DEFAULT_BUDGET, DEFAULT_SAMPLES,
};
use rankq_cli::families::{generate, Family};
use rankq_cli::{CliError, Result};
use rankq_core::{
    ball_distribution, check_decoration_injective, decorate, dq_truncated, normalized_rank,
    quotient_set_exact, quotient_set_sampled, Decoration, DqMode, EdgeSubset, Graph,
    NetRegistry,
};

#[derive(Parser)]
#[command(
    name = "rankq",
    about = "Cycle-matroid rank quotients of bounded-degree graphs",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Cycle,
    Path,
    TorusGrid,
    RandomRegular,
}

impl From<FamilyArg> for Family {
    fn from(value: FamilyArg) -> Family {
        match value {
            FamilyArg::Cycle => Family::Cycle,
            FamilyArg::Path => Family::Path,
            FamilyArg::TorusGrid => Family::TorusGrid,
            FamilyArg::RandomRegular => Family::RandomRegular,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Sampled,
    Auto,
}

impl From<ModeArg> for ModeChoice {
    fn from(value: ModeArg) -> ModeChoice {
        match value {
            ModeArg::Exact => ModeChoice::Exact,
            ModeArg::Sampled => ModeChoice::Sampled,
            ModeArg::Auto => ModeChoice::Auto,
        }
    }
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a connected bounded-degree graph from a named family.
    Gen {
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Vertices (cycle, path, random_regular) or grid side (torus_grid).
        #[arg(long)]
        size: usize,
        /// Degree for random_regular; ignored elsewhere.
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = GraphFormat::Text)]
        format: GraphFormat,
    },
    /// Normalized cycle-matroid rank of an edge subset (default: all edges).
    Rank {
        #[arg(long)]
        graph: PathBuf,
        /// Comma-separated edge ids; omit for the full edge set.
        #[arg(long)]
        edges: Option<String>,
    },
    /// k-quotient set of a graph, exact or sampled.
    Qset {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Truncated quotient distance between two graphs.
    Dq {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
        /// Truncation level of the weighted sum.
        #[arg(long = "K", default_value_t = 2)]
        truncation: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build and register the 2^(-n)-net for a graph's canonical class.
    Net {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n: usize,
        /// exact: grid construction with exhaustive verification;
        /// greedy: farthest-point over samples, padded to M(k, n).
        #[arg(long, default_value = "exact")]
        method: String,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[arg(long)]
        registry: PathBuf,
    },
    /// Per-edge decoration of a graph from registered nets.
    Decorate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        registry: PathBuf,
        /// Window as "k,n" pairs separated by semicolons, e.g. "2,1;2,2".
        #[arg(long, default_value = "1,1;2,1;2,2")]
        window: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact distribution of rooted decorated ball classes.
    Balls {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Decoration projection level.
        #[arg(long, default_value_t = 1)]
        m: usize,
        /// Net registry for decorated balls; omitted = constant decoration.
        #[arg(long)]
        registry: Option<PathBuf>,
        #[arg(long, default_value = "1,1")]
        window: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convergence experiment over a size schedule; emits CSV and JSON.
    Converge {
        /// JSON config file mirroring the experiment configuration.
        #[arg(long, conflicts_with_all = ["family", "schedule"])]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: Option<FamilyArg>,
        /// Comma-separated strictly increasing sizes, e.g. "4,8,16,32".
        #[arg(long)]
        schedule: Option<String>,
        #[arg(long, default_value_t = 3)]
        degree: usize,
        #[arg(long, default_value_t = 2)]
        k_max: usize,
        #[arg(long = "K", default_value_t = 2)]
        truncation: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Output base path; writes {out}.csv and {out}.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Stdout format when no --out is given.
        #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
        format: ReportFormat,
    },
    /// Run every oracle cross-check; exit 0 = pass, 1 = fail, 2 = skipped.
    Verify {
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
}

fn load_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    let graph = if text.trim_start().starts_with('{') {
        Graph::from_json_str(&text)?
    } else {
        Graph::from_edge_list_text(&text)?
    };
    Ok(graph)
}

fn parse_window(window: &str) -> Result<Vec<(usize, usize)>> {
    window
        .split(';')
        .map(|pair| {
            let (k, n) = pair
                .split_once(',')
                .ok_or_else(|| CliError::Config(format!("bad window entry {pair:?}")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| CliError::Config(format!("bad window entry {pair:?}")))
            };
            Ok((parse(k)?, parse(n)?))
        })
        .collect()
}

fn emit(text: String, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            family,
            size,
            degree,
            seed,
            out,
            format,
        } => {
            let g = generate(family.into(), size, degree, seed)?;
            let text = match format {
                GraphFormat::Text => g.to_edge_list_text(),
                GraphFormat::Json => g.to_json_string(),
            };
            emit(text, out.as_deref())?;
        }
        Command::Rank { graph, edges } => {
            let g = load_graph(&graph)?;
            let subset = match edges {
                None => EdgeSubset::full(g.edge_count()),
                Some(list) if list.trim().is_empty() => EdgeSubset::empty(),
                Some(list) => EdgeSubset::new(
                    list.split(',')
                        .map(|s| {
                            s.trim().parse::<usize>().map_err(|_| {
                                CliError::Config(format!("bad edge id {s:?}"))
                            })
                        })
                        .collect::<Result<Vec<usize>>>()?,
                ),
            };
            let rank = normalized_rank(&g, &subset)?;
            println!("{}/{}", rank.numer(), rank.denom());
        }
        Command::Qset {
            graph,
            k,
            mode,
            sampling,
            out,
        } => {
            let g = load_graph(&graph)?;
            let set = match mode {
                ModeArg::Sampled => {
                    quotient_set_sampled(&g, k, sampling.samples, sampling.seed)?
                }
                _ => quotient_set_exact(&g, k, sampling.budget)?,
            };
            emit(set.to_json_string(), out.as_deref())?;
        }
        Command::Dq {
            left,
            right,
            truncation,
            mode,
            sampling,
            out,
        } => {
            let g1 = load_graph(&left)?;
            let g2 = load_graph(&right)?;
            let dq_mode = match mode {
                ModeArg::Exact => DqMode::Exact {
                    budget: sampling.budget,
                },
                ModeArg::Sampled => DqMode::Sampled {
                    samples: sampling.samples,
                },
                ModeArg::Auto => DqMode::Auto {
                    budget: sampling.budget,
                    samples: sampling.samples,
                },
            };
            let report = dq_truncated(&g1, &g2, truncation, dq_mode, sampling.seed)?;
            emit(serde_json::to_string_pretty(&report)?, out.as_deref())?;
        }
        Command::Net {
            graph,
            k,
            n,
            method,
            sampling,
            registry,
        } => {
            let g = load_graph(&graph)?;
            let mut reg = if registry.exists() {
                NetRegistry::load(&registry)?
            } else {
                NetRegistry::new(sampling.seed)
            };
            match method.as_str() {
                "exact" => reg.ensure_built(&g, k, n, sampling.budget).map_err(|e| {
                    if matches!(e, rankq_core::Error::BudgetExceeded { .. }) {
                        CliError::Config(format!(
                            "{e}; rerun with --method greedy to build a sampled net"
                        ))
                    } else {
                        e.into()
                    }
                })?,
                "greedy" => reg.ensure_built_greedy(&g, k, n, sampling.samples)?,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown net method {other:?} (expected exact or greedy)"
                    )))
                }
            }
            reg.save(&registry)?;
            println!(
                "registry {} now holds {} entries (seed {})",
                registry.display(),
                reg.len(),
                reg.seed()
            );
        }
        Command::Decorate {
            graph,
            registry,
            window,
            out,
        } => {
            let g = load_graph(&graph)?;
            let reg = NetRegistry::load(&registry)?;
            let window = parse_window(&window)?;
            let dec = decorate(&g, &reg, &window)?;
            let check = check_decoration_injective(&g, &dec)?;

            #[derive(Serialize)]
            struct DecorationDoc {
                window: Vec<(usize, usize, usize)>,
                arity: usize,
                injective: bool,
                witness: Option<(usize, usize)>,
                edges: Vec<Vec<u8>>,
            }
            let doc = DecorationDoc {
                window: dec.window().to_vec(),
                arity: dec.arity(),
                injective: check.injective,
                witness: check.witness,
                edges: (0..g.edge_count()).map(|e| dec.tuple(e).to_vec()).collect(),
            };
            emit(serde_json::to_string_pretty(&doc)?, out.as_deref())?;
        }
        Command::Balls {
            graph,
            r,
            m,
            registry,
            window,
            out,
        } => {
            let g = load_graph(&graph)?;
            let dec = match registry {
                Some(path) => {
                    let reg = NetRegistry::load(&path)?;
                    decorate(&g, &reg, &parse_window(&window)?)?
                }
                None => Decoration::constant(&g),
            };
            let dist = ball_distribution(&g, &dec, r, m)?;
            emit(dist.to_json_string(), out.as_deref())?;
        }
        Command::Converge {
            config,
            family,
            schedule,
            degree,
            k_max,
            truncation,
            mode,
            sampling,
            out,
            format,
        } => {
            let config = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)?;
                    serde_json::from_str::<ExperimentConfig>(&text)?
                }
                None => {
                    let family = family.ok_or_else(|| {
                        CliError::Config("either --config or --family is required".into())
                    })?;
                    let schedule = schedule
                        .ok_or_else(|| {
                            CliError::Config("either --config or --schedule is required".into())
                        })?
                        .split(',')
                        .map(|s| {
                            s.trim().parse::<usize>().map_err(|_| {
                                CliError::Config(format!("bad schedule entry {s:?}"))
                            })
                        })
                        .collect::<Result<Vec<usize>>>()?;
                    ExperimentConfig {
                        family: family.into(),
                        schedule,
                        degree,
                        k_max,
                        truncation,
                        mode: mode.into(),
                        budget: sampling.budget,
                        samples: sampling.samples,
                        seed: sampling.seed,
                        ball_stats: vec![(2, 1)],
                        out: None,
                    }
                }
            };
            let report = run_convergence(&config)?;
            let base = out.or_else(|| config.out.clone());
            match base {
                Some(base) => {
                    let (csv_path, json_path) = write_outputs(&report, &base)?;
                    println!(
                        "wrote {} and {}",
                        csv_path.display(),
                        json_path.display()
                    );
                }
                None => match format {
                    ReportFormat::Csv => print!("{}", csv_string(&report)?),
                    ReportFormat::Json => println!("{}", report.to_json_string()),
                },
            }
        }
        Command::Verify { budget } => {
            let summary = verify_suite(budget);
            print!("{}", summary.table());
            return Ok(ExitCode::from(summary.exit_code()));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}
