use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use hsp_core::bench::{
    format_max_table, generate_synthetic, load_csv_dataset, load_dataset, load_fvecs,
    run_experiment, summarize_max, write_fvecs, write_labels, ExperimentConfig, GeneratorSpec,
};
use hsp_core::hsp::{check_neighborhood, empirical_stretch, out_degree_stats, verify_mst_containment};
use hsp_core::{
    build_hsp_graph, ClassifierKind, ClassifierSpec, Error, IndexParams, LabeledDataset, Result,
    SmallWorldIndex, VoteRule,
};

#[derive(Parser)]
#[command(name = "hspx", version, about = "HSP neighborhoods, classifiers and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labeled dataset
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        labels_out: PathBuf,
    },
    /// HSP graph export and property checks
    Hsp {
        #[command(subcommand)]
        command: HspCommand,
    },
    /// Classify every vector of a query file
    Classify(ClassifyArgs),
    /// Run a k-sweep experiment and write the CSV report
    Bench {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build or inspect a small-world index file
    Index {
        #[command(subcommand)]
        command: IndexCommand,
    },
}

#[derive(Subcommand)]
enum HspCommand {
    /// Write the HSP graph as `node: id,id,...` lines
    Graph {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check survivor/elimination invariants, MST containment and stretch
    Verify {
        #[arg(long)]
        data: PathBuf,
        /// Skip the all-pairs stretch check above this many points
        #[arg(long, default_value_t = 2000)]
        stretch_limit: usize,
    },
}

#[derive(Args)]
struct IndexArgs {
    #[arg(long, default_value_t = 16)]
    m: usize,
    #[arg(long, default_value_t = 200)]
    ef_construction: usize,
    #[arg(long, default_value_t = 100)]
    ef_search: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl IndexArgs {
    fn params(&self) -> IndexParams {
        IndexParams {
            max_neighbors: self.m,
            ef_construction: self.ef_construction,
            ef_search: self.ef_search,
            level_scale: None,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    queries: PathBuf,
    #[arg(long)]
    classifier: String,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value = "majority")]
    rule: String,
    /// True labels of the queries; prints accuracy to stderr
    #[arg(long)]
    query_labels: Option<PathBuf>,
    #[command(flatten)]
    index: IndexArgs,
}

#[derive(Subcommand)]
enum IndexCommand {
    /// Build an index over a vector file and save it
    Build {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        index: IndexArgs,
    },
    /// Print the header and level sizes of an index file
    Info {
        #[arg(long)]
        index: PathBuf,
        /// Check the index against this dataset
        #[arg(long)]
        data: Option<PathBuf>,
    },
}

/// Geometry only: fvecs get a dummy label, CSV keeps its labels.
fn load_points(path: &Path) -> Result<LabeledDataset> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        return load_csv_dataset(path);
    }
    let vectors = load_fvecs(path)?;
    let n = vectors.len();
    LabeledDataset::from_feature_vectors(vectors, vec![0; n], None)
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::Io {
            path: path.to_owned(),
            source: e,
        })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { spec, out, labels_out } => {
            let text = std::fs::read_to_string(&spec).map_err(|e| Error::Io {
                path: spec.clone(),
                source: e,
            })?;
            let spec: GeneratorSpec = serde_json::from_str(&text)
                .map_err(|e| Error::Config(format!("{}: {e}", spec.display())))?;
            let ds = generate_synthetic(&spec)?;
            let rows: Vec<&[f32]> = ds.points().collect();
            write_fvecs(&out, &rows)?;
            write_labels(&labels_out, ds.labels())?;
            eprintln!("wrote {} points of dimension {}", ds.len(), ds.dimension());
        }
        Command::Hsp { command: HspCommand::Graph { data, out } } => {
            let ds = load_points(&data)?;
            let graph = build_hsp_graph(&ds)?;
            let mut w = create(&out)?;
            graph
                .write_adjacency(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::Io { path: out.clone(), source: e })?;
            let stats = out_degree_stats(&graph)?;
            eprintln!(
                "{} nodes, out-degree min {} max {} mean {:.3}",
                graph.len(),
                stats.min,
                stats.max,
                stats.mean
            );
        }
        Command::Hsp { command: HspCommand::Verify { data, stretch_limit } } => {
            let ds = load_points(&data)?;
            let graph = build_hsp_graph(&ds)?;
            let bad = (0..ds.len())
                .into_par_iter()
                .filter_map(|u| {
                    let others: Vec<usize> = (0..ds.len()).filter(|&c| c != u).collect();
                    check_neighborhood(&ds, ds.point(u), &others, graph.neighbors(u))
                        .err()
                        .map(|v| (u, v))
                })
                .collect::<Vec<_>>();
            if let Some((u, v)) = bad.first() {
                return Err(Error::Invariant(format!("node {u}: {v}")));
            }
            println!("survivor/elimination invariants: ok ({} nodes)", ds.len());
            let stats = out_degree_stats(&graph)?;
            println!("out-degree: min {} max {} mean {:.3}", stats.min, stats.max, stats.mean);
            let mst = verify_mst_containment(&graph, &ds);
            println!(
                "mst containment: {} ({} of {} edges missing)",
                if mst.contained() { "ok" } else { "FAILED" },
                mst.missing.len(),
                mst.mst_edges.len()
            );
            if ds.len() <= stretch_limit {
                println!("max stretch: {:.4}", empirical_stretch(&graph, &ds)?);
            } else {
                println!("max stretch: skipped (n > {stretch_limit})");
            }
            if !mst.contained() {
                return Err(Error::Invariant(format!("MST edges missing: {:?}", mst.missing)));
            }
        }
        Command::Classify(args) => classify(args)?,
        Command::Bench { config, out } => {
            let mut cfg = ExperimentConfig::from_json_file(&config)?;
            if out.is_some() {
                cfg.out = out;
            }
            let report = run_experiment(&cfg)?;
            if cfg.out.is_none() {
                print!("{}", report.to_csv_string());
            }
            eprint!("{}", format_max_table(&summarize_max(&report)));
        }
        Command::Index { command: IndexCommand::Build { data, out, index } } => {
            let ds = load_points(&data)?;
            let idx = SmallWorldIndex::build(&ds, index.params())?;
            idx.save(&out)?;
            eprintln!("indexed {} points, {} levels", idx.len(), idx.top_level() + 1);
        }
        Command::Index { command: IndexCommand::Info { index, data } } => {
            let idx = SmallWorldIndex::load(&index)?;
            let p = idx.params();
            println!("nodes: {}", idx.len());
            println!("entry point: {}", idx.entry_point());
            println!("level sizes: {:?}", idx.level_sizes());
            println!(
                "params: m={} ef_construction={} ef_search={} level_scale={} seed={}",
                p.max_neighbors,
                p.ef_construction,
                p.ef_search,
                p.level_scale(),
                p.seed
            );
            println!("fingerprint: {:016x}", idx.fingerprint());
            println!("level-0 reachable: {}", idx.level0_reachable());
            if let Some(data) = data {
                idx.check_dataset(&load_points(&data)?)?;
                println!("dataset: matches");
            }
        }
    }
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<()> {
    let train = load_dataset(&args.data, args.labels.as_deref())?;
    let kind: ClassifierKind = args.classifier.parse()?;
    let rule: VoteRule = args.rule.parse()?;
    let spec = ClassifierSpec::new(kind, args.k, rule, Some(args.index.params()))?;
    let index = match spec.index_params() {
        Some(p) => Some(SmallWorldIndex::build(&train, *p)?),
        None => None,
    };
    let queries = load_fvecs(&args.queries)?;
    let labels = queries
        .par_iter()
        .map(|q| Ok(spec.predict(&train, index.as_ref(), q.components(), None)?.label))
        .collect::<Result<Vec<usize>>>()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for l in &labels {
        writeln!(out, "{l}").map_err(|e| Error::Io { path: "<stdout>".into(), source: e })?;
    }
    if let Some(path) = args.query_labels {
        let truth = hsp_core::bench::load_labels(&path)?;
        if truth.len() != labels.len() {
            return Err(Error::LabelCountMismatch {
                vectors: labels.len(),
                labels: truth.len(),
            });
        }
        let correct = truth.iter().zip(&labels).filter(|(a, b)| a == b).count();
        eprintln!("accuracy: {:.2}%", correct as f64 * 100.0 / labels.len().max(1) as f64);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                Error::Invariant(_) => 4,
                _ => 3,
            })
        }
    }
}
