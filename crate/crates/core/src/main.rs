use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use distance_recon::geometry::Tolerance;
use distance_recon::harness::{
    emit, emit_trials, eta, eta_f64, p_star, run_trials, scan_threshold, to_json, write_file,
    Config, Format, HarnessError,
};
use distance_recon::percolation::{
    build_gadget, closure, polluted_closure, PollutionSet, SimpleGraph,
};
use distance_recon::reconstruct::{run_pipeline, PipelineOptions, RevealFile};
use distance_recon::seed::derive_seed;
use distance_recon::sim::{generate, reveal, GeneratorKind, InstanceSpec, RevealPlan};

#[derive(Parser)]
#[command(
    name = "distance-recon",
    version,
    about = "Point reconstruction from random partial distances"
)]
struct Cli {
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// JSON config file (schema 1).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Decide independence with exact rational arithmetic.
    #[arg(long, global = true)]
    exact: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// K_{d+3}-bootstrap closure of an edge list, optionally polluted.
    Closure {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        d: usize,
        /// JSON list of forbidden (d+1)-bases.
        #[arg(long)]
        pollution: Option<PathBuf>,
    },
    /// Runs the reconstruction pipeline on a reveal file.
    Reconstruct {
        #[arg(long)]
        reveal: PathBuf,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
    /// Writes the ground-truth points and reveal rounds of the configured trial instance.
    Generate {
        #[arg(long, default_value_t = 0)]
        trial: usize,
    },
    /// Runs the configured trials.
    Trials,
    /// Scans success probability over the configured (n, p) grid.
    Scan,
    /// Writes the gadget graph for dimension `d` and depth `r`.
    Gadget {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
    },
    /// Prints the percolation exponent and, given `n`, the working probability.
    Eta {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: Option<usize>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{0}")]
    Other(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Harness(HarnessError::Config(_)) => 2,
            CliError::Harness(HarnessError::Unbracketed { .. }) => 3,
            _ => 1,
        }
    }
}

fn other(e: impl std::fmt::Display) -> CliError {
    CliError::Other(e.to_string())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Other(format!("{}: {e}", path.display())))
}

struct Context {
    cli: Cli,
}

impl Context {
    fn config(&self) -> Result<Config, CliError> {
        let path = self
            .cli
            .config
            .as_ref()
            .ok_or_else(|| HarnessError::Config("this command needs --config".into()))?;
        let text = read(path).map_err(|e| HarnessError::Config(e.to_string()))?;
        let mut config = Config::from_json(&text)?;
        if let Some(seed) = self.cli.seed {
            config.seed = seed;
        }
        if self.cli.exact {
            config.tolerance.exact_mode = true;
        }
        Ok(config)
    }

    fn tolerance(&self) -> Tolerance {
        Tolerance {
            exact_mode: self.cli.exact,
            ..Tolerance::default()
        }
    }

    fn out(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.cli.out)
            .map_err(|e| other(format!("{}: {e}", self.cli.out.display())))?;
        Ok(self.cli.out.join(name))
    }

    fn write(&self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.out(name)?;
        write_file(&path, text)?;
        eprintln!("wrote {}", path.display());
        Ok(())
    }
}

fn run(ctx: &Context) -> Result<(), CliError> {
    match &ctx.cli.command {
        Command::Closure {
            graph,
            d,
            pollution,
        } => {
            let input = SimpleGraph::parse_edge_list(&read(graph)?, None).map_err(other)?;
            let g = match pollution {
                Some(path) => {
                    let p = PollutionSet::from_json(&read(path)?, *d).map_err(other)?;
                    polluted_closure(&input, *d, &p).map_err(other)?
                }
                None => closure(&input, *d + 3),
            };
            ctx.write("closure.txt", &g.to_edge_list())?;
            let summary = json!({
                "n": g.n(),
                "edges_before": input.edge_count(),
                "edges_after": g.edge_count(),
                "complete": g.is_complete(),
            });
            ctx.write("closure.json", &to_json(&summary))
        }
        Command::Reconstruct { reveal, delta } => {
            let file = RevealFile::from_json(&read(reveal)?).map_err(other)?;
            let rounds = file.to_rounds().map_err(other)?;
            let opts = PipelineOptions {
                d: file.d,
                delta: *delta,
                tol: ctx.tolerance(),
            };
            let result = run_pipeline(&rounds, &opts).map_err(other)?;
            ctx.write("reconstruction.json", &to_json(&result))
        }
        Command::Generate { trial } => {
            let config = ctx.config()?;
            let t = config
                .trials
                .as_ref()
                .ok_or_else(|| HarnessError::Config("generate needs a `trials` section".into()))?;
            let seed = derive_seed(config.seed, *trial as u64);
            let spec = match t.instance.generator {
                GeneratorKind::ExplicitPoints { .. } => t.instance.clone(),
                _ => InstanceSpec {
                    seed: derive_seed(seed, 0),
                    ..t.instance.clone()
                },
            };
            let points = generate(&spec).map_err(HarnessError::from)?;
            let mut plan = RevealPlan::new(t.p, t.rounds(), derive_seed(seed, 1));
            plan.withheld
                .extend(spec.hidden_pair().filter(|_| t.withhold_hidden_pair));
            let rounds = reveal(&points, &plan).map_err(HarnessError::from)?;
            ctx.write("points.json", &to_json(&points))?;
            ctx.write(
                "reveal.json",
                &RevealFile::from_rounds(spec.d, &rounds).to_json(),
            )
        }
        Command::Trials => {
            let config = ctx.config()?;
            let t = config
                .trials
                .as_ref()
                .ok_or_else(|| HarnessError::Config("trials needs a `trials` section".into()))?;
            let reports = run_trials(t, config.seed, &config.tolerance)?;
            emit_trials(&reports, Format::Csv, &ctx.out("trials.csv")?)?;
            emit_trials(&reports, Format::Json, &ctx.out("trials.json")?)?;
            let mean = reports
                .iter()
                .map(|r| r.reconstructible_set_fraction)
                .sum::<f64>()
                / reports.len().max(1) as f64;
            println!(
                "{} trials, mean reconstructible fraction {mean:.4}",
                reports.len()
            );
            Ok(())
        }
        Command::Scan => {
            let config = ctx.config()?;
            let s = config
                .scan
                .as_ref()
                .ok_or_else(|| HarnessError::Config("scan needs a `scan` section".into()))?;
            let result = scan_threshold(s, config.seed, &config.tolerance)?;
            for format in [Format::Csv, Format::Json, Format::Svg] {
                emit(
                    &result,
                    format,
                    &ctx.out(&format!("scan.{}", format.extension()))?,
                )?;
            }
            for c in &result.crossings {
                match c.p_c {
                    Some(p) => println!("n = {}: p_c = {p:.6}", c.n),
                    None => println!("n = {}: unbracketed", c.n),
                }
            }
            let fit = result.require_fit()?;
            println!(
                "slope {:.4} ± {:.4} (reference {:.4})",
                fit.slope,
                fit.slope_stderr,
                -1.0 / eta_f64(s.d)?
            );
            Ok(())
        }
        Command::Gadget { d, r } => {
            let gadget = build_gadget(*d, *r).map_err(other)?;
            ctx.write("gadget.json", &to_json(&gadget))
        }
        Command::Eta { d, n } => {
            let e = eta(*d)?;
            println!("eta({d}) = {e} = {:.6}", eta_f64(*d)?);
            if let Some(n) = n {
                println!("p_star({n}, {d}) = {:.6}", p_star(*n, *d)?);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let ctx = Context { cli };
    match run(&ctx) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
