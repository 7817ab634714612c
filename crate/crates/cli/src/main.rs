use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use powerfilt::closure::{denominator_bound, noetherian_exponent, rees_cofinality_constant, NewtonPolyhedron};
use powerfilt::epsilon::{epsilon_estimate, filtration_bound_check};
use powerfilt::filtration::cm_certificate;
use powerfilt::powers::{ass_stability, filtered_report, powers_report, Mode, PowersOptions};
use powerfilt::report::{
    AssDoc, CertificateDoc, ClosureDoc, ClosureRow, CmDoc, ColonRow, Document, EpsilonDoc, ExponentDoc, Format,
    PolyhedronDoc, PowersDoc, PowersRuns, Section, SuperficialDoc,
};
use powerfilt::superficial::{
    cofinality_check, colon_identity_at, find_superficial, verify_certificate, CyclicFilteredModule, FilteredTerms,
    SearchBounds,
};
use powerfilt::{parse_document, Error, MonomialIdeal, RingContext};

#[derive(Parser)]
#[command(name = "powerfilt", version, about = "Prime filtrations of powers of monomial ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Prime filtrations of R/I^n for n = 1..nmax
    Powers(RunArgs),
    /// Associated primes of R/I^n and their stabilization
    Ass(RunArgs),
    /// Search for a monomial superficial element of R filtered by I^n
    Superficial(RunArgs),
    /// Newton polyhedron, closures of powers and their filtrations
    Closure(RunArgs),
    /// Length of H^0_m(R/I^n) and the ε-multiplicity estimate
    Epsilon(RunArgs),
    /// A localization in which every R/I^n is Cohen–Macaulay
    Cm(RunArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum ModeArg {
    Naive,
    Theorem,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum FormatArg {
    Human,
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
struct RunArgs {
    /// Inline document, e.g. "vars: x,y ; ideal: x^2, x*y"
    #[arg(long, conflicts_with = "ideal_file", required_unless_present = "ideal_file")]
    ideal: Option<String>,
    /// File holding the same document
    #[arg(long)]
    ideal_file: Option<PathBuf>,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    nmax: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::Theorem)]
    mode: ModeArg,
    /// Trailing window for stabilization detection
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(2..))]
    window: u32,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u32).range(1..))]
    order_max: u32,
    #[arg(long, default_value_t = 6)]
    c_max: u32,
    /// Largest l tried for the closure exponent
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    l_max: u32,
    /// Range of n over which the closure exponent is verified
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    exponent_nmax: u32,
    /// Range of n for the ε filtration bound
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    bound_nmax: u32,
    /// Include every filtration step in the report
    #[arg(long)]
    with_steps: bool,
    #[arg(long, value_enum, default_value_t = FormatArg::Human)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; does not affect the output
    #[arg(long, env = "POWERFILT_JOBS", value_parser = clap::value_parser!(u32).range(1..))]
    jobs: Option<u32>,
}

/// Echoed into every report. Output path and thread count are left out so
/// that reports compare equal across them.
#[derive(Serialize)]
struct ConfigEcho<'a> {
    ideal_source: String,
    n_max: u32,
    mode: ModeArg,
    window: u32,
    order_max: u32,
    c_max: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    l_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent_nmax: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bound_nmax: Option<u32>,
    with_steps: bool,
    format: &'a FormatArg,
}

enum Failure {
    Input(anyhow::Error),
    Certificate(anyhow::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Infeasible | Error::SuperficialNotFound { .. } | Error::ExponentNotFound { .. } => {
                Failure::Certificate(e.into())
            }
            _ => Failure::Input(e.into()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn load(args: &RunArgs) -> anyhow::Result<(RingContext, MonomialIdeal, String)> {
    let (text, source) = match (&args.ideal, &args.ideal_file) {
        (Some(t), _) => (t.clone(), "inline".to_string()),
        (None, Some(p)) => {
            let t = fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            (t, format!("file:{}", p.display()))
        }
        (None, None) => anyhow::bail!("one of --ideal or --ideal-file is required"),
    };
    let (ctx, ideal) = parse_document(&text)?;
    Ok((ctx, ideal, source))
}

fn emit<S: Section>(
    name: &str,
    args: &RunArgs,
    config: &ConfigEcho,
    ctx: &RingContext,
    ideal: &MonomialIdeal,
    section: S,
) -> Result<bool, Failure> {
    let doc = Document::new(name, config, ctx, ideal, section);
    let format = match args.format {
        FormatArg::Human => Format::Human,
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    let text = doc.render(format);
    match &args.out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(doc.valid)
}

fn options(args: &RunArgs) -> PowersOptions {
    PowersOptions {
        bounds: SearchBounds { order_max: args.order_max, c_max: args.c_max, n_max: 2 * args.nmax },
        window: args.window as usize,
    }
}

fn modes(arg: ModeArg) -> Vec<Mode> {
    match arg {
        ModeArg::Naive => vec![Mode::Naive],
        ModeArg::Theorem => vec![Mode::Theorem],
        ModeArg::Both => vec![Mode::Naive, Mode::Theorem],
    }
}

fn run(name: &str, args: &RunArgs) -> Result<bool, Failure> {
    let (ctx, ideal, source) = load(args)?;
    let mut config = ConfigEcho {
        ideal_source: source,
        n_max: args.nmax,
        mode: args.mode,
        window: args.window,
        order_max: args.order_max,
        c_max: args.c_max,
        l_max: None,
        exponent_nmax: None,
        bound_nmax: None,
        with_steps: args.with_steps,
        format: &args.format,
    };
    let opts = options(args);
    match name {
        "powers" => {
            let runs = modes(args.mode)
                .into_iter()
                .map(|mode| Ok(PowersDoc::new(&ctx, &powers_report(&ideal, args.nmax, mode, &opts)?, args.with_steps)))
                .collect::<Result<Vec<_>, Error>>()?;
            emit(name, args, &config, &ctx, &ideal, PowersRuns { runs })
        }
        "ass" => {
            let s = ass_stability(&ideal, args.nmax, args.window as usize)?;
            let doc = AssDoc::new(&ctx, &s, args.nmax, args.window as usize);
            emit(name, args, &config, &ctx, &ideal, doc)
        }
        "superficial" => {
            if ideal.is_zero() || !ideal.is_proper() {
                return Err(Error::DegenerateIdeal("the ideal must be proper and nonzero").into());
            }
            let module = CyclicFilteredModule::powers_of(ideal.clone());
            let cert = match find_superficial(&module, &opts.bounds) {
                Ok(c) => Some(c),
                Err(Error::SuperficialNotFound { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let reverified = cert.as_ref().is_some_and(|c| verify_certificate(&module, c));
            let colon = cert
                .as_ref()
                .map(|c| {
                    (1..=c.verified_to)
                        .map(|n| ColonRow { n, colon_identity: colon_identity_at(&module, &c.element, c.order, n) })
                        .collect()
                })
                .unwrap_or_default();
            let doc = SuperficialDoc {
                order_max: opts.bounds.order_max,
                c_max: opts.bounds.c_max,
                n_max: opts.bounds.n_max,
                certificate: cert.as_ref().map(|c| CertificateDoc::new(&ctx, c)),
                reverified,
                colon,
                cofinality: cofinality_check(&module, args.nmax)?,
            };
            emit(name, args, &config, &ctx, &ideal, doc)
        }
        "closure" => {
            config.l_max = Some(args.l_max);
            config.exponent_nmax = Some(args.exponent_nmax);
            if ideal.is_zero() || !ideal.is_proper() {
                return Err(Error::DegenerateIdeal("the ideal must be proper and nonzero").into());
            }
            let np = NewtonPolyhedron::new(&ideal)?;
            let noetherian_exponent = match noetherian_exponent(&ideal, args.l_max, args.exponent_nmax) {
                Ok(l) => ExponentDoc::Found { l },
                Err(Error::ExponentNotFound { l_max, best_l, verified_through }) => {
                    ExponentDoc::NotFound { l_max, best_l, verified_through }
                }
                Err(e) => return Err(e.into()),
            };
            let closures = (1..=args.nmax)
                .map(|n| {
                    let cl = np.closure_power(n);
                    ClosureRow { n, equals_power: cl == ideal.power(n), closure: ctx.format_ideal(&cl) }
                })
                .collect();
            let mode = if args.mode == ModeArg::Naive { Mode::Naive } else { Mode::Theorem };
            let terms = Arc::new(FilteredTerms::integral_closure(ideal.clone())?);
            let report = filtered_report(terms, args.nmax, mode, &opts)?;
            let doc = ClosureDoc {
                polyhedron: PolyhedronDoc::new(&np),
                denominator_bound: denominator_bound(&np),
                noetherian_exponent,
                rees_constant: rees_cofinality_constant(&ideal, args.nmax)?,
                closures,
                report: PowersDoc::new(&ctx, &report, args.with_steps),
            };
            emit(name, args, &config, &ctx, &ideal, doc)
        }
        "epsilon" => {
            config.bound_nmax = Some(args.bound_nmax);
            let est = epsilon_estimate(&ideal, args.nmax)?;
            let bound_n = args.bound_nmax.min(args.nmax);
            let report = powers_report(&ideal, bound_n, Mode::Theorem, &opts)?;
            let bound = filtration_bound_check(&ideal, bound_n, &report)?;
            emit(name, args, &config, &ctx, &ideal, EpsilonDoc::new(&est, &bound))
        }
        "cm" => {
            let cert = cm_certificate(&ideal, args.nmax, &opts)?;
            emit(name, args, &config, &ctx, &ideal, CmDoc::new(&ctx, &cert))
        }
        _ => unreachable!("subcommands are fixed"),
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
    let (name, args) = match &cli.command {
        Command::Powers(a) => ("powers", a),
        Command::Ass(a) => ("ass", a),
        Command::Superficial(a) => ("superficial", a),
        Command::Closure(a) => ("closure", a),
        Command::Epsilon(a) => ("epsilon", a),
        Command::Cm(a) => ("cm", a),
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = args.jobs {
        pool = pool.num_threads(j as usize);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker threads: {e}");
            return ExitCode::from(1);
        }
    };
    match pool.install(|| run(name, args)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("error: a certificate in the report failed validation");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Certificate(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
