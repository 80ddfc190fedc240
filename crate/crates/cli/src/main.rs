//! `wfunc`: point evaluation, identity verification and table generation.
//!
//! Exit codes: 0 success, 1 usage or parameter error, 2 a series or
//! quadrature that did not converge, 3 a failed verification.

mod output;
mod parse;
mod table;
mod verify;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wfunc::doubleseries::{appell_f2, kdf_eval, AppellF2Spec, KdfSpec};
use wfunc::hyperseries::pfq;
use wfunc::integrals::IntegralSpec;
use wfunc::macrobert::{e_eval, EFunctionSpec};
use wfunc::numerics::gamma;
use wfunc::wfunction::{w_eval_path, WArgs, WPath};
use wfunc::{Complex, Error, EvalResult, ParamList, SeriesControl};

use output::{render_many, render_one, Format, Record};
use verify::SuiteName;

const EXIT_USAGE: u8 = 1;
const EXIT_NO_CONVERGENCE: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "wfunc", version, about = "Confluent hypergeometric W-function toolkit")]
struct Cli {
    /// Relative tolerance for series truncation.
    #[arg(long, global = true, default_value_t = 1e-12)]
    rel_tol: f64,
    /// Cap on the number of series terms.
    #[arg(long, global = true, default_value_t = 100_000)]
    max_terms: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for the randomized verification draws (ChaCha8).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function at one point.
    Eval {
        #[command(subcommand)]
        function: Function,
    },
    /// Check identities and closed forms on seeded random draws.
    Verify(VerifyArgs),
    /// Sweep a W-function or an integral over a grid.
    Table {
        #[command(subcommand)]
        target: Target,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteName::All)]
    suite: SuiteName,
    #[arg(long, default_value_t = 20)]
    draws: usize,
    /// Residual limit; each suite has its own default.
    #[arg(long)]
    tol: Option<f64>,
}

fn cx(s: &str) -> Result<Complex, String> {
    parse::complex(s)
}

fn plist(s: &str) -> Result<ParamList, String> {
    parse::param_list(s)
}

#[derive(Subcommand)]
enum Function {
    /// Γ(z).
    Gamma {
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        z: Complex,
    },
    /// pFq(upper; lower; x). Lists are comma separated, "v:m" repeats v m times.
    Pfq {
        #[arg(long, value_parser = plist, allow_hyphen_values = true, default_value = "")]
        upper: ParamList,
        #[arg(long, value_parser = plist, allow_hyphen_values = true, default_value = "")]
        lower: ParamList,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        x: Complex,
    },
    /// MacRobert E(upper; lower; z).
    Efun {
        #[arg(long, value_parser = plist, allow_hyphen_values = true, default_value = "")]
        upper: ParamList,
        #[arg(long, value_parser = plist, allow_hyphen_values = true, default_value = "")]
        lower: ParamList,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        z: Complex,
    },
    /// Kampé de Fériet F^{1:1;1}_{1:1;1}(a1 : b1; b2 ; c1 : d1; d2 ; z1, z2).
    Kdf {
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        a1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        b1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        b2: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        c1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        d1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        d2: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        z1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        z2: Complex,
    },
    /// Appell F2(a; b1, b2; c1, c2; x, y).
    F2 {
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        a: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        b1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        b2: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        c1: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        c2: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        x: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        y: Complex,
    },
    /// W-function f(α, β, γ, δ; z).
    W {
        #[command(flatten)]
        params: WParams,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        z: Complex,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
    },
}

#[derive(Args)]
struct WParams {
    #[arg(long, value_parser = cx, allow_hyphen_values = true)]
    alpha: Complex,
    #[arg(long, value_parser = cx, allow_hyphen_values = true)]
    beta: Complex,
    #[arg(long, value_parser = cx, allow_hyphen_values = true)]
    gamma: Complex,
    #[arg(long, value_parser = cx, allow_hyphen_values = true)]
    delta: Complex,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Auto,
    Eseries,
    Kdf,
    Transformed,
}

impl From<PathArg> for WPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Auto => WPath::Auto,
            PathArg::Eseries => WPath::ESeries,
            PathArg::Kdf => WPath::Kdf,
            PathArg::Transformed => WPath::Transformed,
        }
    }
}

#[derive(Subcommand)]
enum Target {
    /// W along z = r e^{iθ} for r from --z-start to --z-stop.
    W {
        #[command(flatten)]
        params: WParams,
        #[arg(long, allow_hyphen_values = true)]
        z_start: f64,
        #[arg(long, allow_hyphen_values = true)]
        z_stop: f64,
        /// Argument θ of z in radians.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        z_arg: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = PathArg::Auto)]
        path: PathArg,
    },
    /// The closed-form integral for ρ from --rho-start to --rho-stop.
    Integral {
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        alpha: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        beta: Complex,
        #[arg(long, value_parser = cx, allow_hyphen_values = true)]
        gamma: Complex,
        #[arg(long, default_value_t = 0)]
        l: u32,
        /// λ with |λ| = 1.
        #[arg(long, value_parser = cx, allow_hyphen_values = true, default_value = "i")]
        lambda: Complex,
        #[arg(long)]
        rho_start: f64,
        #[arg(long)]
        rho_stop: f64,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
}

/// Failure of a command, carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NoConvergence { .. } | Error::QuadratureFailure(_) => EXIT_NO_CONVERGENCE,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<String> for Failure {
    fn from(message: String) -> Self {
        Failure {
            code: EXIT_USAGE,
            message,
        }
    }
}

fn eval(function: &Function, ctl: &SeriesControl) -> Result<EvalResult, Error> {
    match function {
        Function::Gamma { z } => Ok(EvalResult::exact(gamma(*z)?)),
        Function::Pfq { upper, lower, x } => pfq(upper, lower, *x, ctl),
        Function::Efun { upper, lower, z } => e_eval(&EFunctionSpec::new(upper.clone(), lower.clone(), *z)?, ctl),
        Function::Kdf {
            a1,
            b1,
            b2,
            c1,
            d1,
            d2,
            z1,
            z2,
        } => kdf_eval(
            &KdfSpec {
                a1: *a1,
                b1: *b1,
                b2: *b2,
                c1: *c1,
                d1: *d1,
                d2: *d2,
                z1: *z1,
                z2: *z2,
            },
            ctl,
        ),
        Function::F2 {
            a,
            b1,
            b2,
            c1,
            c2,
            x,
            y,
        } => appell_f2(
            &AppellF2Spec {
                a: *a,
                b1: *b1,
                b2: *b2,
                c1: *c1,
                c2: *c2,
                x: *x,
                y: *y,
            },
            ctl,
        ),
        Function::W { params: p, z, path } => {
            w_eval_path(&WArgs::new(p.alpha, p.beta, p.gamma, p.delta, *z)?, (*path).into(), ctl)
        }
    }
}

/// Runs the command, returning stdout text and the exit code.
fn execute(cli: &Cli) -> Result<(String, u8), Failure> {
    let ctl = SeriesControl::default()
        .with_rel_tol(cli.rel_tol)
        .with_max_terms(cli.max_terms);
    ctl.validate()?;
    match &cli.command {
        Command::Eval { function } => {
            let r = eval(function, &ctl)?;
            let mut rec = Record::new();
            rec.eval_result(&r);
            let code = if r.converged { 0 } else { EXIT_NO_CONVERGENCE };
            Ok((render_one(&rec, cli.format), code))
        }
        Command::Verify(v) => {
            let checks = verify::verify(v.suite, v.draws, cli.seed, v.tol, &ctl);
            for c in checks.iter().filter(|c| !c.passed()) {
                match &c.error {
                    Some((msg, params)) => {
                        eprintln!("FAIL {}/{}: {msg} at {}", c.suite, c.name, verify::describe(params))
                    }
                    None => eprintln!(
                        "FAIL {}/{}: residual {:.3e} above {:.3e} at {}",
                        c.suite,
                        c.name,
                        c.max_residual,
                        c.limit,
                        verify::describe(&c.worst)
                    ),
                }
            }
            let records: Vec<Record> = checks.iter().map(verify::Check::to_record).collect();
            let code = if checks.iter().all(verify::Check::passed) {
                0
            } else {
                EXIT_VERIFY_FAILED
            };
            Ok((render_many(&records, cli.format), code))
        }
        Command::Table { target } => {
            let rows = match target {
                Target::W {
                    params: p,
                    z_start,
                    z_stop,
                    z_arg,
                    steps,
                    path,
                } => {
                    let radii = table::grid(*z_start, *z_stop, *steps)?;
                    if radii[0] <= 0.0 {
                        return Err(format!("--z-start {z_start} must be positive").into());
                    }
                    let base = WArgs::new(p.alpha, p.beta, p.gamma, p.delta, Complex::new(1.0, 0.0))?;
                    table::w_table(&base, &radii, *z_arg, (*path).into(), &ctl)
                }
                Target::Integral {
                    alpha,
                    beta,
                    gamma,
                    l,
                    lambda,
                    rho_start,
                    rho_stop,
                    steps,
                } => {
                    let rhos = table::grid(*rho_start, *rho_stop, *steps)?;
                    let base = IntegralSpec::new(*alpha, *beta, *gamma, *l, rhos[0])?.with_lambda(*lambda)?;
                    table::integral_table(&base, &rhos, &ctl)
                }
            };
            Ok((render_many(&rows, cli.format), 0))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match execute(&cli) {
        Ok((out, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
