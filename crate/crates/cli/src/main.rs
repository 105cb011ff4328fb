//! `jointeig`: deterministic reports for joint spin measurements and teleportation.
//!
//! Exit codes: 0 on success (a refused Bell measurement is a success), 1 on usage or input
//! errors, 2 when a report fails its own consistency checks.

mod commands;
mod report;
mod specs;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jointeig::teleport::InputState;
use jointeig::{BellLabel, Semantics};

use commands::{CliError, DegeneracyTarget, DistributionArgs, TeleportArgs, TeleportInputs};
use report::ReportDocument;

#[derive(Parser)]
#[command(name = "jointeig", version, about = "Joint spin measurements under two collapse rules")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemanticsArg {
    Luders,
    LocalJoint,
}

impl From<SemanticsArg> for Semantics {
    fn from(s: SemanticsArg) -> Self {
        match s {
            SemanticsArg::Luders => Semantics::Luders,
            SemanticsArg::LocalJoint => Semantics::LocalJoint,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact outcome distribution of a two-particle observable, optionally sampled.
    Distribution(DistributionCmd),
    /// Matrix commutator of σz⊗σz and σx⊗σx against the channel-order comparison.
    Commutators,
    /// The teleportation protocol, or the unitary-only path with --naive.
    Teleport(TeleportCmd),
    /// Correlation degeneracy of a product observable, or the spectrum of cx·σx⊗σx + cz·σz⊗σz.
    Degeneracy(DegeneracyCmd),
}

#[derive(Args)]
struct DistributionCmd {
    /// singlet, psi-, psi+, phi-, phi+, basis:<+/- string> or amps:<comma list>.
    #[arg(long)]
    state: String,
    /// Two axis letters, e.g. zz or xz.
    #[arg(long)]
    obs: String,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Luders)]
    semantics: SemanticsArg,
    /// Zero-based particles measured by the left and right factor.
    #[arg(long, default_value = "0,1")]
    particles: String,
    /// Number of seeded Monte Carlo draws.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TeleportCmd {
    /// Amplitude of |+⟩, e.g. 0.6 or 0.6+0.1i.
    #[arg(long, requires = "b", conflicts_with = "random", allow_hyphen_values = true)]
    a: Option<String>,
    /// Amplitude of |−⟩.
    #[arg(long, requires = "a", allow_hyphen_values = true)]
    b: Option<String>,
    /// Number of inputs drawn uniformly from the Bloch sphere.
    #[arg(long)]
    random: Option<u64>,
    #[arg(long, value_enum, default_value_t = SemanticsArg::Luders)]
    semantics: SemanticsArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Runs per fixed input.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Bell branch to project onto instead of sampling: psi-, psi+, phi-, phi+.
    #[arg(long)]
    force_branch: Option<String>,
    /// Apply the disentangling unitary without the Bell measurement.
    #[arg(long, conflicts_with = "force_branch")]
    naive: bool,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct DegeneracyCmd {
    /// Two axis letters, e.g. zz.
    #[arg(long)]
    obs: Option<String>,
    /// Coefficients cx,cz of cx·σx⊗σx + cz·σz⊗σz.
    #[arg(long, allow_hyphen_values = true)]
    bell_op: Option<String>,
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn build(command: Command) -> Result<ReportDocument, CliError> {
    match command {
        Command::Distribution(c) => commands::distribution(&DistributionArgs {
            state: specs::parse_state(&c.state).map_err(usage)?,
            obs: specs::parse_observable(&c.obs).map_err(usage)?,
            semantics: c.semantics.into(),
            particles: specs::parse_pair(&c.particles).map_err(usage)?,
            trials: c.trials,
            seed: c.seed,
        }),
        Command::Commutators => commands::commutators(),
        Command::Teleport(c) => {
            let inputs = match (c.a, c.b, c.random) {
                (Some(a), Some(b), None) => TeleportInputs::Fixed(InputState::new(
                    specs::parse_complex(&a).map_err(usage)?,
                    specs::parse_complex(&b).map_err(usage)?,
                )?),
                (None, None, Some(n)) if n > 0 => TeleportInputs::Random(n),
                (None, None, Some(_)) => return Err(usage("--random needs at least one input")),
                _ => return Err(usage("give either --a and --b, or --random N")),
            };
            if c.trials == 0 {
                return Err(usage("--trials must be at least 1"));
            }
            let force_branch = c
                .force_branch
                .map(|s| BellLabel::parse(&s).ok_or_else(|| usage(format!("unknown Bell branch '{s}'"))))
                .transpose()?;
            commands::teleport(&TeleportArgs {
                inputs,
                semantics: c.semantics.into(),
                seed: c.seed,
                trials: c.trials,
                force_branch,
                naive: c.naive,
            })
        }
        Command::Degeneracy(c) => {
            let target = match (c.obs, c.bell_op) {
                (Some(o), None) => DegeneracyTarget::Product(specs::parse_observable(&o).map_err(usage)?),
                (None, Some(b)) => {
                    let (cx, cz) = specs::parse_coefficients(&b).map_err(usage)?;
                    DegeneracyTarget::BellOperator(cx, cz)
                }
                _ => return Err(usage("give exactly one of --obs or --bell-op")),
            };
            commands::degeneracy(&target)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let doc = match build(cli.command) {
        Ok(doc) => doc,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    if let Err(msg) = doc.validate() {
        let e = CliError::Invariant(msg);
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    let rendered = match cli.format {
        Format::Text => doc.to_text(),
        Format::Json => doc.to_json(),
    };
    let mut out = std::io::stdout().lock();
    if out.write_all(rendered.as_bytes()).and_then(|_| out.flush()).is_err() {
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
