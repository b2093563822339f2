//! `conformal` — exact computations with Lie conformal algebras of small
//! rank: axiom checking, rank-one module classification, extension-space
//! computation with canonical representatives, weight sweeps for
//! dimension jumps, and the graded (mode) algebras of the builtins.
//!
//! Exit codes: 0 success, 1 verification failure, 2 malformed input,
//! 3 well-formed but unsupported query.

pub mod expr;
pub mod report;
pub mod spec_files;

use clap::{Args, Parser, Subcommand};
use conformal_core::annihilation::{derived_series, GradedLieFamily};
use conformal_core::ext::{ext_compute, ext_special_values, ExtError, ExtProblem};
use conformal_core::modules::{check_module, rank1_solve};
use report::Outcome;
use spec_files::{classify_module_error, load_algebra, load_ext_query, load_novikov, parse_module, CliError};

#[derive(Parser)]
#[command(
    name = "conformal",
    version,
    about = "Exact Lie conformal algebra computations: axioms, rank-one modules, \
             extensions, weight sweeps, and mode algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Cmd,

    /// Emit the report as canonical JSON (schema-versioned envelope).
    #[arg(long, global = true)]
    pub json: bool,

    /// Emit the report as plain text (the default).
    #[arg(long, global = true, conflicts_with = "json")]
    pub text: bool,

    /// Skip the axiom check normally run when loading an algebra.
    #[arg(long, global = true)]
    pub no_verify: bool,
}

#[derive(Subcommand)]
pub enum Cmd {
    /// Inspect a bracket table.
    Algebra {
        #[command(subcommand)]
        cmd: AlgebraCmd,
    },
    /// Finite-dimensional Novikov algebras and their conformal algebras.
    Novikov {
        #[command(subcommand)]
        cmd: NovikovCmd,
    },
    /// Check rank-one module data against an algebra.
    Module {
        #[command(subcommand)]
        cmd: ModuleCmd,
    },
    /// Classify rank-one module structures.
    Rank1 {
        #[command(subcommand)]
        cmd: Rank1Cmd,
    },
    /// Compute the extension space between two rank-one modules.
    Ext(ExtArgs),
    /// Sweep the module weight for extension-dimension jumps.
    Special(SpecialArgs),
    /// Graded mode-algebra computations.
    Ann {
        #[command(subcommand)]
        cmd: AnnCmd,
    },
}

#[derive(Subcommand)]
pub enum AlgebraCmd {
    /// Verify skew-symmetry and the Jacobi identity for a bracket table.
    Check(AlgebraArgs),
}

#[derive(Subcommand)]
pub enum NovikovCmd {
    /// Check the Novikov identities and build the associated conformal
    /// algebra.
    Build(NovikovArgs),
}

#[derive(Subcommand)]
pub enum ModuleCmd {
    /// Verify the module identities for rank-one module data.
    Check(ModuleArgs),
}

#[derive(Subcommand)]
pub enum Rank1Cmd {
    /// Classify all free rank-one module structures up to a degree bound.
    Solve(Rank1Args),
}

#[derive(Subcommand)]
pub enum AnnCmd {
    /// Derived series of a truncated mode algebra.
    Solvable(AnnSolvableArgs),
    /// Verify the graded Lie identities for all symbolic mode indices.
    Jacobi(AnnJacobiArgs),
}

#[derive(Args)]
pub struct AlgebraArgs {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long)]
    pub algebra: String,
}

#[derive(Args)]
pub struct NovikovArgs {
    /// Novikov algebra: a spec file path or builtin:N.
    #[arg(long, default_value = "builtin:N")]
    pub novikov: String,
}

#[derive(Args)]
pub struct ModuleArgs {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long)]
    pub algebra: String,

    /// Module: V(a,D), M(a,D), C(g), or a module file path.
    #[arg(long)]
    pub module: String,
}

#[derive(Args)]
pub struct Rank1Args {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long)]
    pub algebra: String,

    /// Degree bound for the unknown action polynomials.  The
    /// classification stabilizes at degree 1; the cost of the
    /// unknown-coefficient solve grows steeply with the bound, so this
    /// command uses a smaller default than the extension commands.
    #[arg(long, default_value_t = 5)]
    pub max_degree: u32,
}

#[derive(Args)]
pub struct ExtArgs {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long)]
    pub algebra: Option<String>,

    /// Submodule: V(a,D), M(a,D), C(g), or a module file path.
    #[arg(long)]
    pub sub: Option<String>,

    /// Quotient module: V(a,D), M(a,D), C(g), or a module file path.
    #[arg(long)]
    pub quot: Option<String>,

    /// Extension query file (alternative to --sub/--quot).
    #[arg(long)]
    pub query: Option<String>,

    /// Degree bound for cocycle representatives (default 12).
    #[arg(long)]
    pub max_degree: Option<u32>,
}

#[derive(Args)]
pub struct SpecialArgs {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long)]
    pub algebra: String,

    /// Weight gap between the quotient and the submodule.
    #[arg(long, allow_negative_numbers = true)]
    pub delta_diff: i64,

    /// Degree bound for cocycle representatives.
    #[arg(long, default_value_t = 12)]
    pub max_degree: u32,

    /// Display name for the swept weight parameter.
    #[arg(long, default_value = "t")]
    pub param_sweep: String,
}

#[derive(Args)]
pub struct AnnSolvableArgs {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long, default_value = "builtin:R")]
    pub algebra: String,

    /// Truncation order: keep the modes of index 0..N.
    #[arg(long = "N")]
    pub n: usize,
}

#[derive(Args)]
pub struct AnnJacobiArgs {
    /// Algebra: a spec file path, builtin:R, or builtin:vir.
    #[arg(long, default_value = "builtin:R")]
    pub algebra: String,
}

/// Parses the process arguments, runs the command, prints the report,
/// and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let command = command_echo();
    match dispatch(&cli) {
        Ok(outcome) => {
            report::emit(&command, &outcome, cli.json);
            outcome.exit
        }
        Err(CliError::Verification(detail)) => {
            let outcome = report::verification_outcome(&detail);
            report::emit(&command, &outcome, cli.json);
            outcome.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// The invocation echoed into the report envelope.
fn command_echo() -> String {
    let mut parts = vec!["conformal".to_string()];
    parts.extend(std::env::args().skip(1));
    parts.join(" ")
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let verify = !cli.no_verify;
    match &cli.cmd {
        Cmd::Algebra { cmd: AlgebraCmd::Check(args) } => {
            // The check command reports on the axioms itself, so the
            // load-time gate is skipped regardless of --no-verify.
            let alg = load_algebra(&args.algebra, false)?;
            let axioms = alg.check_axioms();
            Ok(report::algebra_check_outcome(&alg, &axioms))
        }
        Cmd::Novikov { cmd: NovikovCmd::Build(args) } => {
            let nov = load_novikov(&args.novikov)?;
            let failures = nov.check_identities();
            if failures.is_empty() {
                let conf = nov.to_conformal();
                let axioms = conf.check_axioms();
                Ok(report::novikov_build_outcome(&nov, &failures, Some((&conf, &axioms))))
            } else {
                Ok(report::novikov_build_outcome(&nov, &failures, None))
            }
        }
        Cmd::Module { cmd: ModuleCmd::Check(args) } => {
            let alg = load_algebra(&args.algebra, verify)?;
            let module = parse_module(&alg, &args.module)?;
            let check = check_module(&alg, &module).map_err(classify_module_error)?;
            Ok(report::module_check_outcome(&alg, &args.module, &check))
        }
        Cmd::Rank1 { cmd: Rank1Cmd::Solve(args) } => {
            let alg = load_algebra(&args.algebra, verify)?;
            let class = rank1_solve(&alg, args.max_degree).map_err(classify_module_error)?;
            Ok(report::rank1_outcome(&alg, &class))
        }
        Cmd::Ext(args) => {
            let (algebra_spec, sub_str, quot_str, degree) = resolve_ext_inputs(args)?;
            let alg = load_algebra(&algebra_spec, verify)?;
            let sub = parse_module(&alg, &sub_str)?;
            let quot = parse_module(&alg, &quot_str)?;
            let problem = ExtProblem { algebra: alg.clone(), sub, quot };
            let sol = ext_compute(&problem, degree).map_err(classify_ext_error)?;
            Ok(report::ext_outcome(&alg, &sub_str, &quot_str, &sol))
        }
        Cmd::Special(args) => {
            let alg = load_algebra(&args.algebra, verify)?;
            let sweep = ext_special_values(&alg, args.delta_diff, args.max_degree)
                .map_err(classify_ext_error)?;
            Ok(report::special_outcome(&alg, &args.param_sweep, &sweep))
        }
        Cmd::Ann { cmd: AnnCmd::Solvable(args) } => {
            if args.n == 0 {
                return Err(CliError::Schema("--N must be at least 1".into()));
            }
            let alg = load_algebra(&args.algebra, verify)?;
            let family = GradedLieFamily::family_from_conformal(&alg);
            let truncation = family.build_truncation(args.n);
            let dims = derived_series(&truncation);
            Ok(report::ann_solvable_outcome(&alg, args.n, &dims))
        }
        Cmd::Ann { cmd: AnnCmd::Jacobi(args) } => {
            let alg = load_algebra(&args.algebra, verify)?;
            let family = GradedLieFamily::family_from_conformal(&alg);
            let graded = family.check_graded_jacobi();
            Ok(report::ann_jacobi_outcome(&alg, &graded))
        }
    }
}

/// Merges the inline flags with an optional query file.  Inline module
/// flags and a query file are mutually exclusive; an explicit
/// --max-degree wins over the query file's bound.
fn resolve_ext_inputs(args: &ExtArgs) -> Result<(String, String, String, u32), CliError> {
    match &args.query {
        Some(path) => {
            if args.sub.is_some() || args.quot.is_some() {
                return Err(CliError::Schema(
                    "--query cannot be combined with --sub/--quot".into(),
                ));
            }
            let query = load_ext_query(path)?;
            let algebra = args
                .algebra
                .clone()
                .or(query.algebra)
                .ok_or_else(|| {
                    CliError::Schema(
                        "no algebra given: pass --algebra or set it in the query file".into(),
                    )
                })?;
            let degree = args.max_degree.or(query.max_degree).unwrap_or(12);
            Ok((algebra, query.sub, query.quot, degree))
        }
        None => {
            let (Some(sub), Some(quot)) = (&args.sub, &args.quot) else {
                return Err(CliError::Schema(
                    "both --sub and --quot are required (or pass --query)".into(),
                ));
            };
            let algebra = args.algebra.clone().ok_or_else(|| {
                CliError::Schema("no algebra given: pass --algebra".into())
            })?;
            Ok((algebra, sub.clone(), quot.clone(), args.max_degree.unwrap_or(12)))
        }
    }
}

fn classify_ext_error(e: ExtError) -> CliError {
    match e {
        ExtError::Module(m) => classify_module_error(m),
        ExtError::InvalidModule { .. } => CliError::Verification(e.to_string()),
        ExtError::ParametricSystem => CliError::Unsupported(e.to_string()),
        ExtError::StructureAssertion(_) | ExtError::Linalg(_) => {
            CliError::Verification(e.to_string())
        }
        ExtError::Roots(_) => CliError::Unsupported(e.to_string()),
    }
}
