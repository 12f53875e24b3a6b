use std::io::{self, BufRead, IsTerminal, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use nda_cli::demo::Demo;
use nda_cli::session::{Reply, Session, DEFAULT_ARITH};
use nda_cli::{build_arith, CliError, CliResult, Format};
use nda_core::series::{DEFAULT_TOLERANCE, DEFAULT_WINDOW};
use nda_core::Overflow;

/// Non-Diophantine arithmetics: evaluate, audit laws, run series and demos.
#[derive(Parser, Debug)]
#[command(name = "nda", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, env = "NDA_FORMAT", default_value_t = Format::Table)]
    format: Format,

    /// What dual arithmetics do past the top element: error or saturate.
    #[arg(long, global = true, value_parser = parse_overflow)]
    overflow: Option<Overflow>,

    /// Law checks cover [0, R].
    #[arg(short = 'R', long = "range", global = true, default_value_t = 100)]
    range: usize,

    /// Term budget for practical convergence.
    #[arg(short = 'K', long = "budget", global = true, default_value_t = 100)]
    budget: usize,

    /// Number of terms for partial sums.
    #[arg(short = 'n', long = "terms", global = true, default_value_t = 50)]
    terms: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate an expression, e.g. `nda eval projective:pow:1.5@int:0:1000 "2+2"`.
    Eval { arith: String, expr: String },
    /// Check algebraic laws exhaustively on [0, R].
    Laws {
        arith: String,
        /// Comma-separated laws, or `all`.
        #[arg(long, default_value = "all")]
        check: String,
    },
    /// Series experiments.
    Series {
        #[command(subcommand)]
        command: SeriesCommand,
    },
    /// Run a narrated scenario.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
    /// Interactive evaluator reading from standard input.
    Repl { arith: Option<String> },
    /// Check a functional parameter on a carrier: `<f>@<carrier>`.
    Validate { spec: String },
}

#[derive(Subcommand, Debug)]
enum SeriesCommand {
    /// Classify a sequence by the trend of its first K terms.
    Practical {
        seq: String,
        #[arg(long, default_value_t = DEFAULT_WINDOW)]
        window: usize,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
        tol: f64,
    },
    /// Partial sums of a sequence folded in an arithmetic.
    Sum { arith: String, seq: String },
}

fn parse_overflow(s: &str) -> Result<Overflow, String> {
    s.parse().map_err(|e: nda_core::Error| e.to_string())
}

fn repl(cli: &Cli, spec: Option<&str>) -> CliResult<()> {
    let ar = build_arith(spec.unwrap_or(DEFAULT_ARITH), cli.overflow)?;
    let mut session = Session::new(ar, cli.format);
    let stdin = io::stdin();
    let interactive = stdin.is_terminal();
    let mut out = io::stdout();
    if interactive {
        println!(
            "nda repl, arithmetic {}; :help for directives",
            session.arith()
        );
    }
    loop {
        if interactive {
            print!("nda> ");
            let _ = out.flush();
        }
        let mut line = String::new();
        match stdin.lock().read_line(&mut line) {
            Ok(0) => break,
            Ok(_) => {}
            Err(e) => return Err(CliError::usage(format!("reading input: {e}"))),
        }
        match session.handle(&line) {
            Reply::Output(s) => print!("{s}"),
            Reply::Error(e) => eprintln!("error: {e}"),
            Reply::Quit => break,
        }
    }
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    let text = match &cli.command {
        Command::Eval { arith, expr } => nda_cli::cmd_eval(arith, expr, cli.overflow, cli.format)?,
        Command::Laws { arith, check } => {
            nda_cli::cmd_laws(arith, check, cli.range, cli.overflow, cli.format)?
        }
        Command::Series { command } => match command {
            SeriesCommand::Practical { seq, window, tol } => {
                nda_cli::cmd_series_practical(seq, cli.budget, *window, *tol, cli.format)?
            }
            SeriesCommand::Sum { arith, seq } => {
                nda_cli::cmd_series_sum(arith, seq, cli.terms, cli.overflow, cli.format)?
            }
        },
        Command::Demo { name } => {
            let (text, status) = nda_cli::cmd_demo(*name, cli.format);
            print!("{text}");
            return status;
        }
        Command::Repl { arith } => return repl(cli, arith.as_deref()),
        Command::Validate { spec } => nda_cli::cmd_validate(spec, cli.format)?,
    };
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap uses 2 for usage errors; 2 is reserved for validation here.
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nda: {e}");
            ExitCode::from(e.code())
        }
    }
}
