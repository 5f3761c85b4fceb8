use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use raqm::config::{OutputFormat, ScenarioConfig, ScenarioId};
use raqm::harness::{self, Runner};
use raqm::protocol::{parse_timeline, validate};
use raqm::Error;

#[derive(Parser)]
#[command(name = "raqm", version, about = "Random-access cavity memory node simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario named in the configuration.
    Run(RunArgs),
    /// Run the configuration once per value of its [sweep] section.
    Sweep(RunArgs),
    /// Check a configuration (and optionally a timeline file) without running.
    Validate {
        #[arg(long)]
        config: PathBuf,
        /// Timeline file checked against the configured timing rules.
        #[arg(long)]
        timeline: Option<PathBuf>,
    },
    /// Print the number of atoms that fit in the efficient region.
    Capacity {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        min_efficiency: Option<f64>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, env = "RAQM_OUT_DIR")]
    out_dir: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("raqm: {e}");
            ExitCode::from(if e.is_config_error() { 1 } else { 2 })
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Error> {
    match cmd {
        Command::Run(a) => execute(a, false),
        Command::Sweep(a) => execute(a, true),
        Command::Validate { config, timeline } => {
            let cfg = ScenarioConfig::load(&config)?;
            let mut problems = harness::validate_config(&cfg);
            if let Some(path) = timeline {
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                let report = validate(&parse_timeline(&text)?, &cfg.node.timing()).map_err(|e| Error::Config(e.to_string()))?;
                for w in &report.warnings {
                    eprintln!("warning: {w}");
                }
                problems.extend(report.violations.iter().map(|v| v.to_string()));
            }
            if problems.is_empty() {
                println!("ok");
                Ok(())
            } else {
                for p in &problems {
                    println!("{p}");
                }
                Err(Error::Config(format!("{} problem(s)", problems.len())))
            }
        }
        Command::Capacity { config, min_efficiency } => {
            let mut cfg = match config {
                Some(p) => ScenarioConfig::load(&p)?,
                None => ScenarioConfig::new(ScenarioId::Capacity),
            };
            cfg.run.scenario = ScenarioId::Capacity;
            if let Some(e) = min_efficiency {
                cfg.scenario.min_efficiency = e;
            }
            let out = harness::run(&cfg, &Runner::new(1)?)?;
            let r = &out.summary["results"];
            println!("{}", serde_json::json!({ "min_efficiency": r["min_efficiency"], "capacity": r["capacity"] }));
            Ok(())
        }
    }
}

fn execute(a: RunArgs, sweep: bool) -> Result<(), Error> {
    let mut cfg = ScenarioConfig::load(&a.config)?;
    if let Some(s) = a.seed {
        cfg.run.seed = s;
    }
    if let Some(t) = a.trials {
        cfg.run.trials = t;
        if let Some(sw) = cfg.sweep.as_mut() {
            sw.trials = Some(t);
        }
    }
    if let Some(w) = a.workers {
        cfg.run.workers = Some(w);
    }
    if let Some(f) = a.format {
        cfg.run.format = match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        };
    }
    let out_dir = a
        .out_dir
        .or_else(|| cfg.run.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let runner = Runner::new(cfg.run.workers.unwrap_or(0))?;
    let out = if sweep { harness::sweep(&cfg, &runner)? } else { harness::run(&cfg, &runner)? };
    for p in out.write(&out_dir, cfg.run.format)? {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}
