//! Command-line front end.
//!
//! Exit codes: 0 when the check passes, 1 for a mathematical finding (bound
//! violated, diagnostic mismatch, campaign violations), 2 for bad invocations
//! and malformed input.

use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::complex::{CScalar, CVector};
use crate::error::Error;
use crate::extremal::{diagnose_equality_form, extremal_map, ExtremalSpec};
use crate::geometry::{disk_slice, DiskSliceJson};
use crate::harness::{fuzz_campaign, FuzzConfig};
use crate::holomap::HoloMap;
use crate::modulus::{mod_grad, sp_bound, FdParams};
use crate::spec::{emit_spec_string, parse_spec_str};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDING: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "schwarzpick",
    version,
    about = "Modulus gradients of holomorphic maps between unit balls"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gradient of |f| at a point.
    Grad {
        #[command(flatten)]
        map: MapArg,
        /// Point as "re,im;re,im;...".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Check |grad |f|| <= (1 - |f|^2)/(1 - |z|^2) at a point.
    Bound {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Disk D_{c,r} cut out of the ball by the complex line through p and q.
    Slice {
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
    },
    /// Emit a map attaining equality at p.
    Extremal {
        #[arg(long, value_enum)]
        case: CaseArg,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        /// Unit direction collinear with p.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        /// Unit vector of C^m (zero case).
        #[arg(long, allow_hyphen_values = true)]
        beta: Option<String>,
        /// Value f(p) (nonzero case).
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        /// Write the map here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a map has the equality form along the slice through p and q.
    Diagnose {
        #[command(flatten)]
        map: MapArg,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Randomized campaign over certified polynomial maps.
    Fuzz(FuzzArgs),
}

#[derive(Debug, Args)]
struct MapArg {
    /// MapSpec JSON file, or "-" for stdin.
    #[arg(long = "map")]
    path: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CaseArg {
    Zero,
    Nonzero,
}

#[derive(Debug, Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 100)]
    points_per_trial: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 3)]
    max_degree: u32,
    #[arg(long, default_value_t = 0.05)]
    margin: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Comma-separated, strictly decreasing FD step sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [1e-4, 5e-5])]
    fd_steps: Vec<f64>,
    #[arg(long, default_value_t = 64)]
    fd_dirs: usize,
    /// Do not log the classical counterexample as trial -1.
    #[arg(long)]
    no_pin: bool,
    /// JSONL log path.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl FuzzArgs {
    fn config(&self) -> FuzzConfig {
        FuzzConfig {
            trials: self.trials,
            points_per_trial: self.points_per_trial,
            n: self.n,
            m: self.m,
            max_degree: self.max_degree,
            margin: self.margin,
            seed: self.seed,
            tol: self.tol,
            fd: FdParams {
                steps: self.fd_steps.clone(),
                dirs: self.fd_dirs,
                seed: 0,
            },
            pin_counterexample: !self.no_pin,
        }
    }
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn flag_error(flag: &str, e: Error) -> Failure {
    usage(format!("--{flag}: {e}"))
}

/// Parses `"re,im;re,im;..."`.
pub fn parse_vector(s: &str) -> std::result::Result<CVector, String> {
    let entries = s
        .split(';')
        .enumerate()
        .map(|(k, part)| {
            let nums: Vec<&str> = part.split(',').map(str::trim).collect();
            if nums.len() != 2 {
                return Err(format!("component {k}: expected \"re,im\", got {part:?}"));
            }
            let parse = |t: &str| {
                t.parse::<f64>()
                    .map_err(|_| format!("component {k}: {t:?} is not a number"))
            };
            Ok(CScalar::new(parse(nums[0])?, parse(nums[1])?))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    CVector::new(entries).map_err(|e| e.to_string())
}

fn vector_flag(flag: &str, s: &str) -> std::result::Result<CVector, Failure> {
    parse_vector(s).map_err(|e| usage(format!("--{flag}: {e}")))
}

fn load_map(path: &str, stdin: &mut dyn Read) -> std::result::Result<HoloMap, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        stdin
            .read_to_string(&mut s)
            .map_err(|e| usage(format!("--map: reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| usage(format!("--map: {path}: {e}")))?
    };
    parse_spec_str(&text).map_err(|e| flag_error("map", e))
}

fn print_json<T: Serialize>(out: &mut dyn Write, value: &T) -> std::result::Result<(), Failure> {
    let s = serde_json::to_string(value).map_err(|e| usage(e.to_string()))?;
    writeln!(out, "{s}").map_err(|e| usage(e.to_string()))
}

fn dispatch(
    cli: Cli,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
) -> std::result::Result<i32, Failure> {
    match cli.command {
        Command::Grad { map, point } => {
            let f = load_map(&map.path, stdin)?;
            let z = vector_flag("point", &point)?;
            print_json(stdout, &mod_grad(&f, &z)?)?;
            Ok(EXIT_OK)
        }
        Command::Bound { map, point, tol } => {
            let f = load_map(&map.path, stdin)?;
            let z = vector_flag("point", &point)?;
            let report = sp_bound(&f, &z, tol)?;
            print_json(stdout, &report)?;
            Ok(if report.holds { EXIT_OK } else { EXIT_FINDING })
        }
        Command::Slice { p, q } => {
            let s = disk_slice(&vector_flag("p", &p)?, &vector_flag("q", &q)?)?;
            print_json(stdout, &DiskSliceJson::from(&s))?;
            Ok(EXIT_OK)
        }
        Command::Extremal {
            case,
            p,
            u,
            beta,
            a,
            theta,
            out,
        } => {
            let p = vector_flag("p", &p)?;
            let u = vector_flag("u", &u)?;
            let spec = match case {
                CaseArg::Zero => {
                    if a.is_some() || theta.is_some() {
                        return Err(usage("--a and --theta belong to --case nonzero"));
                    }
                    let beta = beta.ok_or_else(|| usage("--beta is required for --case zero"))?;
                    ExtremalSpec::zero(p, u, vector_flag("beta", &beta)?)
                }
                CaseArg::Nonzero => {
                    if beta.is_some() {
                        return Err(usage("--beta belongs to --case zero"));
                    }
                    let a = a.ok_or_else(|| usage("--a is required for --case nonzero"))?;
                    let theta =
                        theta.ok_or_else(|| usage("--theta is required for --case nonzero"))?;
                    ExtremalSpec::nonzero(p, u, vector_flag("a", &a)?, theta)
                }
            };
            let doc = emit_spec_string(&extremal_map(&spec)?);
            match out {
                Some(path) => fs::write(&path, format!("{doc}\n"))
                    .map_err(|e| usage(format!("--out: {}: {e}", path.display())))?,
                None => writeln!(stdout, "{doc}").map_err(|e| usage(e.to_string()))?,
            }
            Ok(EXIT_OK)
        }
        Command::Diagnose {
            map,
            p,
            q,
            samples,
            tol,
        } => {
            let f = load_map(&map.path, stdin)?;
            let d = diagnose_equality_form(
                &f,
                &vector_flag("p", &p)?,
                &vector_flag("q", &q)?,
                samples,
                tol,
            )?;
            print_json(stdout, &d)?;
            Ok(if d.matches { EXIT_OK } else { EXIT_FINDING })
        }
        Command::Fuzz(args) => {
            let cfg = args.config();
            let report = match &args.out {
                Some(path) => {
                    let mut file = fs::File::create(path)
                        .map_err(|e| usage(format!("--out: {}: {e}", path.display())))?;
                    fuzz_campaign(&cfg, Some(&mut file))?
                }
                None => fuzz_campaign(&cfg, None)?,
            };
            print_json(stdout, &report)?;
            Ok(if report.violations.is_empty() {
                EXIT_OK
            } else {
                EXIT_FINDING
            })
        }
    }
}

/// Runs one invocation; `args` includes the program name.
pub fn run<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli, stdin, stdout) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}
