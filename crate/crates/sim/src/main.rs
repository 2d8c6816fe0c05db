use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;

use misfit_core::network::generate_nws;
use misfit_core::{NetworkSpec, SimRng};
use misfit_sim::output::{histogram_path, write_csv, write_edge_list, write_histograms_file};
use misfit_sim::{parse_config, presets, run_sweep, SweepOptions, WORKERS_ENV};

#[derive(Parser)]
#[command(
    name = "misfit-sim",
    version,
    about = "Monte Carlo runs of the firm growth and adoption models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment plan and write aggregated statistics as CSV.
    Run(RunArgs),
    /// List the built-in plans, or print one as a config file.
    Presets {
        #[arg(long, value_name = "NAME")]
        show: Option<String>,
    },
    /// Generate one small-world graph and print its edge list.
    Graph(GraphArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Plan file (`key = value` lines).
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in plan, see `misfit-sim presets`.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, default_value = "results.csv")]
    out: PathBuf,
    /// Overrides the plan's master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the plan's run count.
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Also write a histogram of final valuations next to the results.
    #[arg(long)]
    histogram: bool,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: RunArgs) -> Result<()> {
    let mut plan = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(name)) => match presets::find(name) {
            Some(p) => p.plan()?,
            None => bail!("unknown preset `{name}` (see `misfit-sim presets`)"),
        },
        (None, None) => bail!("one of --config or --preset is required"),
    };
    if let Some(seed) = args.seed {
        plan.master_seed = seed;
    }
    if let Some(runs) = args.runs {
        if runs == 0 {
            bail!("--runs must be at least 1");
        }
        plan.n_runs = runs;
    }
    let points = plan.grid_points().len();
    eprintln!(
        "{points} grid point(s) x {} run(s), seed {}",
        plan.n_runs, plan.master_seed
    );

    let start = Instant::now();
    let options = SweepOptions {
        workers: args.workers,
        histogram: args.histogram,
    };
    let output = run_sweep(&plan, &options)?;
    let axes: Vec<_> = plan.axes.iter().map(|a| a.axis).collect();
    write_csv(&output.records, &axes, &args.out)?;
    eprintln!(
        "wrote {} record(s) to {} in {:.2?}",
        output.records.len(),
        args.out.display(),
        start.elapsed()
    );
    if let Some(hists) = &output.histograms {
        let path = histogram_path(&args.out);
        write_histograms_file(&output.points, hists, &axes, &path)?;
        eprintln!("wrote histograms to {}", path.display());
    }
    Ok(())
}

fn graph(args: GraphArgs) -> Result<()> {
    let spec = NetworkSpec {
        n: args.n,
        k: args.k,
        beta: args.beta,
    };
    let mut rng = SimRng::seed_from_u64(args.seed);
    let g = generate_nws(&spec, &mut rng)?;
    match &args.out {
        Some(path) => {
            let file =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_edge_list(&g, io::BufWriter::new(file))?;
        }
        None => write_edge_list(&g, io::stdout().lock())?,
    }
    Ok(())
}

fn list_presets(show: Option<String>) -> Result<()> {
    let mut out = io::stdout().lock();
    match show {
        Some(name) => match presets::find(&name) {
            Some(p) => write!(out, "{}", p.config)?,
            None => bail!("unknown preset `{name}`"),
        },
        None => {
            for p in presets::presets() {
                writeln!(out, "{:<24} {}", p.name, p.description)?;
            }
        }
    }
    Ok(())
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run(args) => run(args),
        Command::Presets { show } => list_presets(show),
        Command::Graph(args) => graph(args),
    }
}
