mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use nefwall::classify::{enumerate_types, TypeOrbit};
use nefwall::contfrac::convergents;
use nefwall::diophantine::gen_pell_positive_solutions;
use nefwall::moduli::{
    empty_for_every_ample, first_walls, shgh_cohomology_report, snapshot, wall_events_capped,
    DEFAULT_MAX_DEPTH,
};
use nefwall::{Divisor, Error, Rational, Surface};

#[derive(Parser)]
#[command(
    name = "nefwall",
    version,
    about = "Nef walls, divisor types and wall-crossing timelines on blowups of the plane"
)]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Markdown, global = true)]
    format: Format,

    /// Assume the SHGH conjecture (implies --assume-nagata).
    #[arg(long, global = true)]
    assume_shgh: bool,

    /// Assume the Nagata conjecture.
    #[arg(long, global = true)]
    assume_nagata: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Markdown,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Wall-crossing timeline as t decreases from n/3.
    Walls(WallsArgs),
    /// Divisor types below the nef wall.
    Classify(ClassifyArgs),
    /// Components of the moduli space at one polarization.
    Snapshot(SnapshotArgs),
    /// Convergents of the continued fraction of sqrt(n).
    Convergents(ConvergentsArgs),
    /// Positive solutions of x^2 - n y^2 = N.
    Pell(PellArgs),
    /// Cohomology of D, 2D and 2D - K for a divisor type.
    Cohomology(CohomologyArgs),
}

#[derive(Args)]
struct WallsArgs {
    #[arg(long)]
    n: usize,
    /// Euler characteristic of the sheaves (default: the maximal one).
    #[arg(long)]
    chi: Option<u64>,
    /// Show the first K walls.
    #[arg(long, conflicts_with = "t_min")]
    first: Option<usize>,
    /// Lower bound for t, as p/q, or auto:K for the first K walls.
    #[arg(long)]
    t_min: Option<String>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    chi: u64,
    /// Members listed per infinite family.
    #[arg(long, default_value_t = 4)]
    depth: usize,
}

#[derive(Args)]
struct SnapshotArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    chi: Option<u64>,
    /// Polarization parameter as an exact rational p/q.
    #[arg(long)]
    t: String,
}

#[derive(Args)]
struct ConvergentsArgs {
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 7)]
    count: usize,
}

#[derive(Args)]
struct PellArgs {
    #[arg(long)]
    n: u64,
    /// Right-hand side N.
    #[arg(long = "N", allow_hyphen_values = true)]
    rhs: BigInt,
    #[arg(long, default_value_t = 5)]
    limit: usize,
}

#[derive(Args)]
struct CohomologyArgs {
    #[arg(long)]
    n: usize,
    /// Divisor such as 57H-18E or 15H-5E_1-4E_{2..13}.
    #[arg(long, allow_hyphen_values = true)]
    divisor: String,
}

/// Failure with the process exit status it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UnsupportedN(_) => 3,
            Error::OnWall(_) => 4,
            Error::MissingAssumption(_) => 5,
            Error::Inconsistent(_) => 1,
            _ => 2,
        };
        let message = match &e {
            Error::MissingAssumption(flag) => {
                format!("this result depends on an unproven conjecture; pass --{flag}")
            }
            Error::OnWall(t) => format!("t = {t} lies on a wall; choose t inside an open chamber"),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

type CliResult = Result<String, Failure>;

fn max_depth() -> Result<usize, Failure> {
    match std::env::var("NEFWALL_MAX_DEPTH") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| {
                usage(format!(
                    "NEFWALL_MAX_DEPTH must be a positive integer, got '{v}'"
                ))
            }),
        Err(_) => Ok(DEFAULT_MAX_DEPTH),
    }
}

fn surface(cli: &Cli, n: usize) -> Result<Surface, Failure> {
    let nagata = cli.assume_nagata || cli.assume_shgh;
    Ok(Surface::with_assumptions(n, cli.assume_shgh, nagata)?)
}

fn parse_rational(s: &str) -> Result<Rational, Failure> {
    s.parse::<Rational>()
        .map_err(|e| usage(format!("'{s}' is not an exact rational p/q: {e}")))
}

fn default_chi(n: usize) -> u64 {
    if n == 25 {
        4
    } else {
        2
    }
}

/// Number of walls shown when neither --first nor --t-min is given.
fn default_first(n: usize) -> Option<usize> {
    match n {
        10..=12 => Some(4),
        13..=15 => Some(10),
        _ => None,
    }
}

fn cmd_walls(cli: &Cli, a: &WallsArgs) -> CliResult {
    let s = surface(cli, a.n)?;
    if empty_for_every_ample(a.n) {
        return Ok(output::empty_for_every_ample(a.n, cli.format));
    }
    let chi = a.chi.unwrap_or(default_chi(a.n));
    let depth = max_depth()?;
    let first = match (&a.first, &a.t_min) {
        (Some(k), _) => Some(*k),
        (None, Some(t)) => match t.strip_prefix("auto:") {
            Some(k) => Some(
                k.parse::<usize>()
                    .map_err(|_| usage(format!("'{t}' is not of the form auto:K")))?,
            ),
            None => None,
        },
        (None, None) => default_first(a.n),
    };
    let events = match (first, &a.t_min) {
        (Some(0), _) => return Err(usage("the number of walls must be positive")),
        (Some(k), _) => first_walls(&s, chi, k, depth)?,
        (None, Some(t)) => wall_events_capped(&s, chi, &parse_rational(t)?, depth)?,
        (None, None) => {
            // square n: the timeline is finite and ends at sqrt(n)
            let root = Rational::from_integer(a.n.isqrt() as u64);
            wall_events_capped(&s, chi, &root, depth)?
        }
    };
    Ok(output::walls(a.n, &events, cli.format))
}

fn needs_nagata(n: usize) -> bool {
    (10..=15).contains(&n) || n == 17
}

fn cmd_classify(cli: &Cli, a: &ClassifyArgs) -> CliResult {
    let s = surface(cli, a.n)?;
    let cap = max_depth()?;
    if a.depth > cap {
        return Err(usage(format!(
            "depth {} exceeds the cap {cap} (NEFWALL_MAX_DEPTH)",
            a.depth
        )));
    }
    let orbits: Vec<TypeOrbit> = enumerate_types(&s, a.chi, a.depth)?;
    if needs_nagata(a.n) && !s.assume_nagata() {
        return Err(Error::MissingAssumption("assume-nagata").into());
    }
    Ok(output::orbits(&orbits, cli.format))
}

fn cmd_snapshot(cli: &Cli, a: &SnapshotArgs) -> CliResult {
    let s = surface(cli, a.n)?;
    if empty_for_every_ample(a.n) {
        return Ok(output::empty_for_every_ample(a.n, cli.format));
    }
    let t = parse_rational(&a.t)?;
    let chi = a.chi.unwrap_or(default_chi(a.n));
    let comps = snapshot(&s, chi, &t)?;
    Ok(output::components(&t, &comps, cli.format))
}

fn cmd_convergents(cli: &Cli, a: &ConvergentsArgs) -> CliResult {
    let cs = convergents(a.n, a.count)?;
    Ok(output::convergents(&cs, cli.format))
}

fn cmd_pell(cli: &Cli, a: &PellArgs) -> CliResult {
    let sols = gen_pell_positive_solutions(a.n, &a.rhs, a.limit)?;
    Ok(output::pell(&sols, cli.format))
}

fn cmd_cohomology(cli: &Cli, a: &CohomologyArgs) -> CliResult {
    let s = surface(cli, a.n)?;
    let dv = Divisor::parse(&a.divisor, a.n)?;
    let report = shgh_cohomology_report(&dv, &s)?;
    Ok(output::cohomology(&report, cli.format))
}

fn run(cli: &Cli) -> CliResult {
    match &cli.command {
        Command::Walls(a) => cmd_walls(cli, a),
        Command::Classify(a) => cmd_classify(cli, a),
        Command::Snapshot(a) => cmd_snapshot(cli, a),
        Command::Convergents(a) => cmd_convergents(cli, a),
        Command::Pell(a) => cmd_pell(cli, a),
        Command::Cohomology(a) => cmd_cohomology(cli, a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
