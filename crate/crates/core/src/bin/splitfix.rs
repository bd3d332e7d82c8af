use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use splitfix::cli::{self, RunConfig, SummaryFormat};
use splitfix::Vector;

#[derive(Parser)]
#[command(name = "splitfix", version, about = "Relaxed Douglas–Rachford / Peaceman–Rachford experiments")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate a scenario and write its trace and summary (plus an SVG with --plot).
    Run {
        /// Scenario name: two_balls or line_box.
        #[arg(long)]
        scenario: String,
        /// Relaxation parameter in (0, 1]; 0.5 is Douglas–Rachford, 1 is Peaceman–Rachford.
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        /// Start point as "a,b".
        #[arg(long, value_parser = cli::parse_point, allow_hyphen_values = true)]
        x0: Option<Vector>,
        /// Iteration budget.
        #[arg(long, default_value_t = 10_000)]
        iters: usize,
        /// Shadow-step tolerance for early stopping.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Keep every n-th row in the CSV and plot.
        #[arg(long, default_value_t = 1)]
        thin: usize,
        /// Output directory (defaults to $SPLITFIX_OUT_DIR, then ./splitfix-out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Summary format: csv (key=value lines) or json.
        #[arg(long, default_value = "csv")]
        format: SummaryFormat,
        /// Also write trajectory.svg.
        #[arg(long)]
        plot: bool,
        /// Scenario parameter override, repeatable: --set beta=0.
        #[arg(long = "set", value_parser = cli::parse_override, allow_hyphen_values = true)]
        set: Vec<(String, f64)>,
    },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { cli::EXIT_CONFIG } else { cli::EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let Command::Run {
        scenario,
        lambda,
        x0,
        iters,
        tol,
        thin,
        out,
        format,
        plot,
        set,
    } = args.command;
    let mut config = RunConfig::new(scenario);
    config.lambda = lambda;
    config.x0 = x0;
    config.max_iters = iters;
    config.shadow_tol = tol;
    config.thin = thin;
    config.format = format;
    config.plot = plot;
    config.overrides = set.into_iter().collect();
    if let Some(out) = out {
        config.out_dir = out;
    }
    ExitCode::from(cli::run(&config) as u8)
}
