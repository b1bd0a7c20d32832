use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mua::format::{instance_to_json, read_instance};
use mua::mechanisms::{InnerKind, MechanismConfig, MechanismId};
use mua::report::{self, Payments};
use mua::testkit::{gen_onepoint, gen_random, gen_subadditive_hard, misreport_search, GenKind};
use mua::Error;
use mua_core::vcg::PaymentRule;

/// Truthful multi-unit auction mechanisms.
///
/// Exit codes: 0 ok, 1 verification failed or profitable misreport found,
/// 2 malformed input or invalid arguments, 3 mechanism does not support the
/// valuations or inner solver capacity exceeded, 4 instance too large for
/// brute force.
#[derive(Parser)]
#[command(name = "mua", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a mechanism and print its allocation, welfare and payments.
    Solve {
        #[command(flatten)]
        mech: MechArgs,
        /// none, clarke or zero-pivot.
        #[arg(long, default_value = "clarke")]
        payments: Payments,
        #[command(flatten)]
        io: RunIo,
    },
    /// Run a mechanism and check its welfare against the brute-force optimum.
    Verify {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long, default_value = "none")]
        payments: Payments,
        #[command(flatten)]
        io: RunIo,
    },
    /// Write an instance file.
    Gen {
        #[command(subcommand)]
        family: Family,
        #[arg(long, short, default_value = "-", global = true)]
        output: PathBuf,
    },
    /// Search for a profitable misreport by one bidder.
    Misreport {
        #[command(flatten)]
        mech: MechArgs,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        bidder: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// clarke or zero-pivot.
        #[arg(long, default_value = "clarke")]
        payments: Payments,
        #[arg(long, short, default_value = "-")]
        output: PathBuf,
    },
}

#[derive(Args)]
struct MechArgs {
    /// ptas, half, lift, brute or greedy.
    #[arg(long)]
    mechanism: MechanismId,
    /// Size of the special bidder set for ptas and lift.
    #[arg(long, default_value_t = 1)]
    t: usize,
    /// Inner solver for lift: exhaustive, single, piecewise or subadditive.
    #[arg(long, default_value = "exhaustive")]
    inner: InnerKind,
}

impl MechArgs {
    fn config(&self) -> MechanismConfig {
        MechanismConfig::new(self.mechanism, self.t, self.inner)
    }
}

#[derive(Args)]
struct RunIo {
    /// Instance file, or `-` for standard input.
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, short, default_value = "-")]
    output: PathBuf,
    /// Include wall-clock time in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Subcommand)]
enum Family {
    /// Bidder i values s_i or more items at 1.
    Onepoint {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u64>,
        #[arg(long)]
        m: u64,
    },
    /// Two subadditive bidders whose only welfare-4 split is (s1, m - s1).
    SubadditiveHard {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        s1: u64,
    },
    /// Seeded random instance.
    Random {
        /// k_minded, marginal_piecewise, table, subadditive_table or mixed.
        #[arg(long, default_value = "k_minded")]
        kind: GenKind,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Bids or tuples per bidder.
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(..=u64::from(u32::MAX)))]
        value_cap: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code(err: &Error) -> u8 {
    use mua_core::Error as Core;
    match err {
        Error::Core(
            Core::KindMismatch { .. } | Core::InnerCapacity { .. } | Core::InnerInfeasible { .. },
        ) => 3,
        Error::Core(Core::TooLarge { .. }) => 4,
        _ => 2,
    }
}

fn emit(path: &Path, text: &str) -> Result<(), Error> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())?;
        out.flush()?;
    } else {
        std::fs::write(path, text)?;
    }
    Ok(())
}

fn execute(command: Command) -> Result<u8, Error> {
    match command {
        Command::Solve { mech, payments, io } => {
            let instance = read_instance(&io.input)?;
            let report = report::run(&instance, mech.config(), payments, io.timing)?;
            emit(&io.output, &report.to_json())?;
            Ok(0)
        }
        Command::Verify { mech, payments, io } => {
            let instance = read_instance(&io.input)?;
            let report = report::verify(&instance, mech.config(), payments, io.timing)?;
            emit(&io.output, &report.to_json())?;
            Ok(if report.verification.is_some_and(|v| v.pass) {
                0
            } else {
                1
            })
        }
        Command::Gen { family, output } => {
            let instance = match family {
                Family::Onepoint { s, m } => gen_onepoint(&s, m)?,
                Family::SubadditiveHard { m, s1 } => gen_subadditive_hard(m, s1)?,
                Family::Random {
                    kind,
                    n,
                    m,
                    k,
                    value_cap,
                    seed,
                } => gen_random(kind, n as usize, m, k, value_cap, seed)?,
            };
            emit(&output, &instance_to_json(&instance))?;
            Ok(0)
        }
        Command::Misreport {
            mech,
            input,
            bidder,
            samples,
            seed,
            payments,
            output,
        } => {
            let instance = read_instance(&input)?;
            let rule: PaymentRule = payments.0.ok_or_else(|| {
                Error::InvalidArgument("misreport search needs a payment rule".into())
            })?;
            let report = misreport_search(
                mech.config().build().as_ref(),
                rule,
                &instance,
                bidder,
                samples as usize,
                seed,
            )?;
            let mut text = serde_json::to_string_pretty(&report).expect("reports always serialize");
            text.push('\n');
            emit(&output, &text)?;
            Ok(if report.best_gain > 0 { 1 } else { 0 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}
