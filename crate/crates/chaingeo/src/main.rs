use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chaingeo::{verify, Bundle, CliError, CliResult, Format, Instance, InstanceConfig, Report, Suite};
use clap::{Args, Parser, Subcommand};

/// Build and verify finite chain geometries.
#[derive(Parser)]
#[command(name = "chaingeo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the ring, embedding and projective line tables as JSON.
    Build {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run verification suites; exits with 1 if a check fails.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Check CS1 and CS2 on an incidence structure given as JSON.
    Check {
        #[arg(long)]
        structure: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Render a saved report, or verify and render.
    Report {
        #[arg(long, conflicts_with = "config", required_unless_present = "config")]
        input: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, value_enum, default_value = "all")]
    suite: Suite,
    /// Overrides the seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Include wall-clock timings (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    let io = |context: String| move |source| CliError::Io { context, source };
    match out {
        Some(path) => std::fs::write(path, text).map_err(io(format!("cannot write {}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(io("cannot write to stdout".into())),
    }
}

fn run_verify(config: &Path, suite: Suite, seed: Option<u64>, timings: bool) -> CliResult<Report> {
    let config = InstanceConfig::load(config)?;
    let inst = Instance::build(&config)?;
    verify(&inst, suite, seed.unwrap_or(config.seed), timings)
}

fn run(cli: Cli) -> CliResult<u8> {
    match cli.command {
        Command::Build { config, out } => {
            let inst = Instance::build(&InstanceConfig::load(&config)?)?;
            let mut json = serde_json::to_string(&Bundle::new(&inst)).expect("bundle serializes");
            json.push('\n');
            emit(out.as_deref(), &json)?;
            Ok(0)
        }
        Command::Verify { run, format } => {
            let report = run_verify(&run.config, run.suite, run.seed, run.timings)?;
            emit(run.out.as_deref(), &report.render(format))?;
            if !report.all_passed() {
                log::warn!("{} of {} checks failed", report.summary.failed, report.summary.total);
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
        Command::Check { structure, out } => {
            let text = std::fs::read_to_string(&structure).map_err(|source| CliError::Io {
                context: format!("cannot read {}", structure.display()),
                source,
            })?;
            let report = chaingeo::structure::check_structure(&text)?;
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            emit(out.as_deref(), &json)?;
            Ok(0)
        }
        Command::Report {
            input,
            config,
            suite,
            seed,
            format,
            out,
        } => {
            let report = match (input, config) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
                        context: format!("cannot read {}", path.display()),
                        source,
                    })?;
                    Report::from_json(&text)?
                }
                (None, Some(config)) => run_verify(&config, suite, seed, false)?,
                (None, None) => unreachable!("clap requires one of them"),
            };
            emit(out.as_deref(), &report.render(format))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
