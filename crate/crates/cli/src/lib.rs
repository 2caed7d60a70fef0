//! Command-line front end: `validate`, `embed`, `centralize` and `prolong`.
//!
//! Exit codes: 0 on success, 1 when the mathematics rejects the input
//! (an invalid algebra, a realization that fails its checks, a supplied
//! component outside the prolongation), 2 for unreadable or malformed files.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use cartan_core::algspec::{GradedAlgebraSpec, SpecError};
use cartan_core::centralize::centralize;
use cartan_core::prolong::{reduce_defining_degree, BeginningPart, ProlongError, ProlongTable, Prolonger};
use cartan_core::realize::{realization_from_json, realize, ColumnOrder, Realization, RealizeError};
use cartan_core::Field;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod report;

#[derive(Debug, Parser)]
#[command(name = "cartan", version, about = "Exact Cartan prolongation of graded nilpotent Lie (super)algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the structure constants: grading, parity, super Jacobi, generation.
    Validate(Common),
    /// Solve for the forms ω and fields X realizing the negative part.
    Embed(Embedding),
    /// The commuting frame Y and its coframe θ.
    Centralize(Embedding),
    /// Complete prolongation, or partial prolongation of a beginning part.
    Prolong(ProlongArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Algebra description (JSON).
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Override the declared ground field: `0`, `5`, `0,i`, `7,i`.
    #[arg(long)]
    pub field: Option<String>,
}

#[derive(Debug, Args)]
pub struct Embedding {
    #[command(flatten)]
    pub common: Common,
    /// Pivot priority for the Maurer–Cartan solve (JSON).
    #[arg(long, conflicts_with = "realization")]
    pub column_order: Option<PathBuf>,
    /// Use these forms or fields instead of solving for them (JSON).
    #[arg(long)]
    pub realization: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ProlongArgs {
    #[command(flatten)]
    pub embedding: Embedding,
    #[arg(long, default_value_t = 3, allow_negative_numbers = true)]
    pub max_degree: i64,
    /// Beginning part `h_0, h_1, ...` to prolong partially (JSON).
    #[arg(long)]
    pub partial: Option<PathBuf>,
    /// Recompute every nonnegative degree by the brute-force recurrence and compare.
    #[arg(long)]
    pub check: bool,
    /// Print the dimension table only.
    #[arg(long)]
    pub dims_only: bool,
}

/// Failures sorted by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit code 1.
    Math(String),
    /// Exit code 2.
    Input(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Math(_) => 1,
            CliError::Input(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Math(m) | CliError::Input(m) => f.write_str(m),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> CliError {
        match e {
            SpecError::Schema(_) => CliError::Input(e.to_string()),
            SpecError::Invalid(_) => CliError::Math(e.to_string()),
        }
    }
}

impl From<RealizeError> for CliError {
    fn from(e: RealizeError) -> CliError {
        match e {
            RealizeError::Schema(_) | RealizeError::ColumnOrder(_) | RealizeError::Count { .. } => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl From<ProlongError> for CliError {
    fn from(e: ProlongError) -> CliError {
        match e {
            ProlongError::Schema(_) | ProlongError::Poly(_) => CliError::Input(e.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_spec(common: &Common) -> Result<Arc<GradedAlgebraSpec>, CliError> {
    let text = read(&common.spec)?;
    let spec = match &common.field {
        Some(f) => {
            let field: Field = f.parse().map_err(|e| CliError::Input(format!("--field {f}: {e}")))?;
            GradedAlgebraSpec::from_json_with_field(&text, field)?
        }
        None => GradedAlgebraSpec::from_json(&text)?,
    };
    Ok(Arc::new(spec))
}

fn load_valid_spec(common: &Common) -> Result<Arc<GradedAlgebraSpec>, CliError> {
    let spec = load_spec(common)?;
    let report = spec.validate();
    if !report.is_valid() {
        let lines: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Math(format!("invalid algebra: {}", lines.join("; "))));
    }
    Ok(spec)
}

fn load_realization(args: &Embedding) -> Result<Realization, CliError> {
    let spec = load_valid_spec(&args.common)?;
    if let Some(path) = &args.realization {
        return Ok(realization_from_json(&spec, &read(path)?)?);
    }
    let order = match &args.column_order {
        Some(path) => ColumnOrder::from_json(&read(path)?, spec.table())?,
        None => ColumnOrder::default(),
    };
    Ok(realize(&spec, &order)?)
}

/// Runs one command, writing its report to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let emit = |out: &mut dyn Write, text: String| -> Result<(), CliError> {
        out.write_all(text.as_bytes())
            .map_err(|e| CliError::Input(format!("writing output: {e}")))
    };
    match &cli.command {
        Command::Validate(common) => {
            let spec = load_spec(common)?;
            let report = spec.validate();
            emit(out, report::validation(&spec, &report, common.format))?;
            if !report.is_valid() {
                return Err(CliError::Math(format!("{} violation(s)", report.violations.len())));
            }
            Ok(())
        }
        Command::Embed(args) => {
            let real = load_realization(args)?;
            emit(out, report::realization(&real, args.common.format))
        }
        Command::Centralize(args) => {
            let real = load_realization(args)?;
            let cf = centralize(&real);
            let violations = cf.verify();
            if !violations.is_empty() {
                let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(CliError::Math(lines.join("; ")));
            }
            emit(out, report::coframe(&cf, args.common.format))
        }
        Command::Prolong(args) => {
            let real = load_realization(&args.embedding)?;
            let depth = real.spec().depth() as i64;
            if args.max_degree < -depth {
                return Err(CliError::Input(format!("--max-degree must be at least {}", -depth)));
            }
            let p = Prolonger::new(&real);
            let complete = p.complete_prolong(args.max_degree);
            let partial = match &args.partial {
                Some(path) => {
                    let beginning = BeginningPart::from_json(&read(path)?, &p)?;
                    Some(reduce_defining_degree(&p, &beginning, args.max_degree)?)
                }
                None => None,
            };
            let checks = if args.check {
                let table: &ProlongTable = partial.as_ref().map(|h| &h.table).unwrap_or(&complete);
                Some(oracle_checks(&p, table, partial.is_none()))
            } else {
                None
            };
            let r = report::Prolongation {
                prolonger: &p,
                complete: &complete,
                partial: partial.as_ref(),
                checks: checks.as_deref(),
                max_degree: args.max_degree,
                bases: !args.dims_only,
            };
            emit(out, r.render(args.embedding.common.format))?;
            if checks.is_some_and(|c| c.iter().any(|(_, ok)| !ok)) {
                return Err(CliError::Math("the recurrence disagrees with the computed components".into()));
            }
            if partial.as_ref().is_some_and(|h| !h.recurrence_agrees()) {
                return Err(CliError::Math("the recurrence disagrees with the operator solutions".into()));
            }
            Ok(())
        }
    }
}

/// For a complete table each degree is compared with the oracle built on the
/// computed component below it; for a partial table, above the supplied part.
fn oracle_checks(p: &Prolonger, table: &ProlongTable, complete: bool) -> Vec<(i64, bool)> {
    let mut out = Vec::new();
    for w in table.components.windows(2) {
        let (lower, upper) = (&w[0], &w[1]);
        if upper.degree < 0 {
            continue;
        }
        let oracle = p.oracle_component(lower, upper.degree);
        let ok = if complete {
            p.same_span(&oracle, upper)
        } else {
            upper.fields.iter().all(|x| p.contains(&oracle, x))
        };
        out.push((upper.degree, ok));
    }
    out
}
