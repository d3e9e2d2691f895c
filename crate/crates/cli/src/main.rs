use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use reviewkg::baselines::Representation;
use reviewkg::kgraph::ExportFormat;
use reviewkg::pipeline::{self, CachePolicy, EvalMode, Pipeline, PipelineKind, RunConfig, RunReport, SweepGrid};
use reviewkg::{ClassifierKind, FeatureMode, Sampling};

/// Review rating prediction over sentiment-annotated knowledge graphs.
#[derive(Debug, Parser)]
#[command(name = "reviewkg", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Run configuration (TOML, or JSON by extension).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Review JSON-lines file.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Number of valid reviews to read (0 = all).
    #[arg(long, global = true)]
    limit: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    pipeline: Option<PipelineKind>,
    #[arg(long, global = true)]
    representation: Option<Representation>,
    #[arg(long, global = true)]
    classifier: Option<ClassifierKind>,
    #[arg(long, global = true)]
    sampling: Option<Sampling>,
    /// Feature mode: n2v, n2v+avg, n2v+avg+minmax, sentiment-only.
    #[arg(long, global = true)]
    features: Option<FeatureMode>,
    /// Node embedding dimension.
    #[arg(long, global = true)]
    dims: Option<usize>,
    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Corpus statistics as JSON.
    Stats,
    /// Extract, score and filter triples.
    Extract,
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Train node embeddings over the built graph.
    Embed,
    /// Fit the model on the training split.
    Train,
    /// Evaluate the trained model on the held-out split.
    Eval,
    /// k-fold cross-validation.
    Cv {
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        stratified: bool,
    },
    /// Every stage end to end, reusing current artifacts.
    Run,
    /// Expand a grid of settings into runs and collate a CSV.
    Sweep {
        /// Grid file (TOML or JSON) with lists for dims, sampling, classifier,
        /// feature_mode and representation.
        #[arg(long)]
        grid: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GraphCommand {
    /// Build the knowledge graph from extracted triples.
    Build,
    /// Export the built graph.
    Export {
        /// json, graphml or csv
        #[arg(long, default_value = "graphml")]
        format: ExportFormat,
    },
}

fn parse_file<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    } else {
        toml::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn build_config(g: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => parse_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &g.input {
        cfg.input = v.clone();
    }
    if let Some(v) = g.limit {
        cfg.limit = v;
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = &g.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = g.pipeline {
        cfg.pipeline = v;
    }
    if let Some(v) = g.representation {
        cfg.representation = Some(v);
    }
    if let Some(v) = g.classifier {
        cfg.classifier = v;
    }
    if let Some(v) = g.sampling {
        cfg.sampling = v;
    }
    if let Some(v) = g.features {
        cfg.feature_mode = v;
    }
    if let Some(v) = g.dims {
        cfg.walk.dims = v;
    }
    Ok(cfg)
}

fn print_line(s: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{s}") {
        // a closed pipe (`| head`) is not a failure
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => r.context("writing to stdout"),
    }
}

fn print_json<T: serde::Serialize>(v: &T) -> Result<()> {
    print_line(&serde_json::to_string_pretty(v)?)
}

/// Library errors already carry their cause in the message.
fn describe(e: &anyhow::Error) -> String {
    if e.downcast_ref::<reviewkg::Error>().is_some() {
        format!("{e}")
    } else {
        format!("{e:#}")
    }
}

fn print_report(r: &RunReport) -> Result<()> {
    print_json(&serde_json::json!({
        "evaluation": r.evaluation,
        "metrics": r.metrics,
        "dummy": r.dummy,
        "config_hash": r.config_hash,
    }))
}

/// Runs one stage. Errors here are stage failures (exit code 2).
fn execute(command: Command, p: &Pipeline) -> Result<()> {
    let c = p.load_corpus()?;
    match command {
        Command::Stats => print_json(&p.stats(&c)?)?,
        Command::Extract => {
            let (_, counts) = p.triples(&c, CachePolicy::Reuse)?;
            print_json(&counts)?;
        }
        Command::Graph(GraphCommand::Build) => {
            let g = p.graph(&c, None, CachePolicy::Reuse)?;
            print_json(&serde_json::json!({ "nodes": g.node_count(), "edges": g.edge_count() }))?;
        }
        Command::Graph(GraphCommand::Export { format }) => {
            for f in p.export_graph(&c, format)? {
                print_line(&f.display().to_string())?;
            }
        }
        Command::Embed => {
            let g = p.graph(&c, None, CachePolicy::Require)?;
            let t = p.embeddings(&c, &g, CachePolicy::Reuse)?;
            print_json(&serde_json::json!({ "vectors": t.len(), "dims": t.dims }))?;
        }
        Command::Train => {
            let b = p.train(&c, CachePolicy::Require)?;
            print_json(&serde_json::json!({
                "model": b.model.kind,
                "train": b.train_ids.len(),
                "test": b.test_ids.len(),
                "features": b.feature_names.len(),
            }))?;
        }
        Command::Eval => print_report(&p.eval(&c)?)?,
        Command::Cv { .. } => print_report(&p.cv(&c, CachePolicy::Require)?)?,
        Command::Run => print_report(&p.run()?)?,
        Command::Sweep { .. } => unreachable!("handled before corpus loading"),
    }
    Ok(())
}

fn sweep(base: &RunConfig, grid_path: &Path) -> Result<ExitCode> {
    let grid: SweepGrid = parse_file(grid_path)?;
    let configs = pipeline::expand_sweep(base, &grid);
    for c in &configs {
        c.validate().with_context(|| format!("sweep run for {}", c.out_dir.display()))?;
    }
    let results = pipeline::sweep(&configs);
    let failed = results.iter().filter(|r| r.is_err()).count();
    fs::create_dir_all(&base.out_dir).with_context(|| format!("creating {}", base.out_dir.display()))?;
    let path = base.out_dir.join("sweep.csv");
    let rows: Vec<_> = configs.into_iter().zip(results).collect();
    let file = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    pipeline::write_sweep_csv(file, &rows)?;
    print_line(&path.display().to_string())?;
    if failed > 0 {
        eprintln!("error: {failed} of {} sweep runs failed; see {}", rows.len(), path.display());
        return Ok(ExitCode::from(2));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    // Configuration problems are usage errors.
    let setup = || -> Result<(RunConfig, Option<Pipeline>)> {
        let mut cfg = build_config(&cli.global)?;
        if let Command::Cv { k, stratified } = &cli.command {
            cfg.evaluation.mode = EvalMode::Cv;
            cfg.evaluation.k = *k;
            cfg.evaluation.stratified = *stratified;
        }
        if matches!(cli.command, Command::Sweep { .. }) {
            return Ok((cfg, None));
        }
        if cfg.pipeline == PipelineKind::SubsetBaseline && !matches!(cli.command, Command::Run | Command::Stats) {
            bail!("the subset-baseline pipeline only supports `run`");
        }
        let p = Pipeline::new(cfg.clone())?;
        Ok((cfg, Some(p)))
    };
    let (cfg, pipeline) = match setup() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            return ExitCode::from(1);
        }
    };

    let result = match (cli.command, pipeline) {
        (Command::Sweep { grid }, _) => sweep(&cfg, &grid),
        (command, Some(p)) => execute(command, &p).map(|_| ExitCode::SUCCESS),
        (_, None) => unreachable!("pipeline built for every non-sweep command"),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(2)
        }
    }
}
