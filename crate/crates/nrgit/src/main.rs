use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nrgit_core::report::{exit_code_for, run, Command, Flags, Format, Steps};
use nrgit_core::scenario::Overrides;
use nrgit_core::Error;

#[derive(Parser)]
#[command(name = "nrgit", version, about = "Exact computations for graded unipotent GIT")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(short, long, global = true)]
    scenario: Option<PathBuf>,
    /// Named point from the scenario.
    #[arg(short, long, global = true)]
    point: Option<String>,
    /// Character as comma-separated rationals, e.g. "-2,1/3".
    #[arg(long, global = true, allow_hyphen_values = true)]
    chi: Option<String>,
    #[arg(long, global = true, env = "NRGIT_SEED")]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Multiply the linearisation by C.
    #[arg(long, global = true, value_parser = clap::value_parser!(i64).range(1..))]
    scale: Option<i64>,
    #[arg(short, long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// Weight ladder, adapted window and torus weight hull.
    Weights,
    /// Adapted and well-adapted window of the grading character.
    Window,
    /// Limits, stabiliser, sweep membership and torus verdict of a point.
    Classify,
    /// Mumford-hat stability of a point.
    HatClassify,
    /// Stabiliser dimension recursion (r_j, δ_j).
    Recursion,
    /// Kirwan indices β for the torus action.
    Strata,
    /// Blow up Δ^{≥d_max} until generic stabilisers are trivial on Z_min.
    Blowup {
        /// "auto" or a maximum number of steps.
        #[arg(long, default_value = "auto")]
        steps: String,
    },
    /// Shipped scenarios: 6.1, 6.2, ladder.
    Example {
        which: String,
        /// Run the built-in assertions.
        #[arg(long)]
        check: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let c = cli.common;
    let mut flags = Flags {
        point: c.point,
        chi: c.chi,
        overrides: Overrides {
            seed: c.seed,
            samples: c.samples,
            scale: c.scale,
        },
        ..Flags::default()
    };
    let cmd = match cli.command {
        Cmd::Weights => Command::Weights,
        Cmd::Window => Command::Window,
        Cmd::Classify => Command::Classify,
        Cmd::HatClassify => Command::HatClassify,
        Cmd::Recursion => Command::Recursion,
        Cmd::Strata => Command::Strata,
        Cmd::Blowup { steps } => {
            flags.steps = match steps.as_str() {
                "auto" => Steps::Auto,
                n => match n.parse() {
                    Ok(k) => Steps::Limit(k),
                    Err(_) => {
                        eprintln!("nrgit: --steps takes \"auto\" or a count");
                        return ExitCode::from(2);
                    }
                },
            };
            Command::Blowup
        }
        Cmd::Example { which, check } => {
            flags.check = check;
            Command::Example(which)
        }
    };
    let text = match &c.scenario {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => Some(t),
            Err(e) => return fail(&Error::Validation(format!("cannot read {}: {e}", p.display()))),
        },
        None => None,
    };
    let format = match c.output {
        Output::Json => Format::Json,
        Output::Text => Format::Text,
    };
    match run(&cmd, text.as_deref(), &flags) {
        Ok(r) => {
            print!("{}", r.emit(format));
            ExitCode::from(r.status.exit_code() as u8)
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("nrgit: {e}");
    ExitCode::from(exit_code_for(e) as u8)
}
