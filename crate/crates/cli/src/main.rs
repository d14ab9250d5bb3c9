use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gtp_cli::bench::{run_bench, write_csv, BenchConfig, OpClass};
use gtp_cli::tables::cmd_tables;
use gtp_cli::verify::{cmd_verify, Level};
use gtp_cli::{cache_dir, CliError, CliResult};

#[derive(Parser)]
#[command(name = "gtp", version, about = "Gaunt tensor products: table cache, verification and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write and validate the conversion-table cache for degrees 0..=LMAX.
    Tables {
        #[arg(long)]
        lmax: usize,
        /// Cache directory; defaults to $GTP_CACHE_DIR.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Run the property suites and report residuals.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        level: Level,
        /// Flip the sign of one conversion-table entry before running.
        #[arg(long)]
        inject_fault: bool,
    },
    /// Time fast paths against the oracles and write CSV rows.
    Bench {
        #[arg(long, value_enum)]
        op: OpClass,
        /// Comma-separated degrees.
        #[arg(long = "l", value_delimiter = ',', default_value = "2,4,8")]
        l_list: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        channels: usize,
        #[arg(long, default_value_t = 1)]
        batch: usize,
        #[arg(long, default_value_t = 3)]
        nu: usize,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        warmup: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Skip oracle paths above this degree.
        #[arg(long, default_value_t = 12)]
        oracle_max_l: usize,
        /// Add the Clebsch-Gordan oracle to feature_interaction.
        #[arg(long)]
        with_cg: bool,
        #[arg(long)]
        cache: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Tables { lmax, cache } => {
            let dir = cache_dir(cache);
            for s in cmd_tables(&dir, lmax)? {
                println!("L={:<2} {:?} {}", s.lmax, s.outcome, s.path.display());
            }
            Ok(())
        }
        Command::Verify { level, inject_fault } => {
            let report = cmd_verify(level, inject_fault)?;
            for c in &report.checks {
                println!("{c}");
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::Bench {
            op,
            l_list,
            channels,
            batch,
            nu,
            repeats,
            warmup,
            seed,
            threads,
            oracle_max_l,
            with_cg,
            cache,
            out,
        } => {
            let cfg =
                BenchConfig { op, l_list, channels, batch, nu, repeats, warmup, seed, threads, oracle_max_l, with_cg };
            let rows = run_bench(&cfg, &cache_dir(cache))?;
            write_csv(&rows, &out)?;
            tracing::info!(rows = rows.len(), out = %out.display(), "benchmark written");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let ansi = std::io::IsTerminal::is_terminal(&std::io::stderr());
    tracing_subscriber::fmt().with_writer(std::io::stderr).with_ansi(ansi).with_target(false).init();
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
