//! The `hb` command line.
//!
//! Every subcommand prints one JSON envelope on stdout. Exit codes: 0 on
//! success, 2 for validation errors (bad flags, malformed input, invalid
//! arguments), 3 for numerical failures and for a suite with failing checks.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::isometry;
use crate::lattice;
use crate::model::{self, ExtensionParams};
use crate::poly::{Poly, C64};
use crate::rational::RationalFn;
use crate::report::{self, envelope, residual};
use crate::space::HbSpace;
use crate::spectral;
use crate::{HbError, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hb", version, about = "Computations in rational de Branges-Rovnyak spaces")]
pub struct Cli {
    /// Seed for every randomized step. HB_SEED overrides it.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

/// A rational function given inline as JSON or as a path to a JSON file.
#[derive(Debug, Args)]
pub struct BArg {
    #[arg(long)]
    pub b: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Pythagorean mate of b.
    Mate {
        #[command(flatten)]
        b: BArg,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Reproducing kernel K_λ(z).
    Kernel {
        #[command(flatten)]
        b: BArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Gram matrix of 1, z, ..., z^(N-1).
    Gram {
        #[command(flatten)]
        b: BArg,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Defect forms and strict isometry order of the shift.
    Verify {
        #[command(flatten)]
        b: BArg,
        #[arg(long, default_value_t = 12)]
        mmax: usize,
        #[arg(long, default_value_t = 10)]
        deg: usize,
    },
    /// One rank-one extension step.
    Extend {
        #[arg(long)]
        b0: String,
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
    },
    /// Iterated extensions from b = 0.
    Model {
        #[arg(long)]
        steps: String,
        #[arg(long)]
        verify: bool,
    },
    /// Invariant subspace generated by f.
    Classify {
        #[command(flatten)]
        b: BArg,
        #[arg(long)]
        f: String,
        /// Also report principal-angle distances at this K.
        #[arg(long)]
        oracle: Option<usize>,
    },
    /// Whether f is cyclic.
    Cyclic {
        #[command(flatten)]
        b: BArg,
        #[arg(long)]
        f: String,
    },
    /// All acceptance checks.
    Suite,
}

/// Inline JSON when the text starts with `{` or `[`, otherwise a file path.
fn load_json(arg: &str) -> Result<Value> {
    let t = arg.trim_start();
    let text = if t.starts_with('{') || t.starts_with('[') {
        arg.to_string()
    } else {
        std::fs::read_to_string(arg).map_err(|e| HbError::Parse(format!("{arg}: {e}")))?
    };
    Ok(serde_json::from_str(&text)?)
}

fn load_rational(arg: &str) -> Result<(Value, RationalFn)> {
    let v = load_json(arg)?;
    let f = RationalFn::deserialize(&v)?;
    Ok((v, f))
}

/// `re,im` or a bare real.
pub fn parse_complex(s: &str) -> Result<C64> {
    let bad = || HbError::Parse(format!("expected re,im, got {s:?}"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|_| bad());
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(bad()),
    }
}

#[derive(Deserialize)]
struct StepRepr {
    omega: C64,
    t: f64,
}

fn load_steps(arg: &str) -> Result<(Value, Vec<ExtensionParams>)> {
    let v = load_json(arg)?;
    let steps: Vec<StepRepr> = Vec::deserialize(&v)?;
    Ok((v, steps.into_iter().map(|s| ExtensionParams::new(s.omega, s.t)).collect()))
}

fn error_doc(code: i32, kind: &str, message: String) -> (i32, Value) {
    (code, json!({ "error": { "kind": kind, "message": message }, "exit_code": code }))
}

/// Parse `args` (including the program name) and run. `seed_env` plays
/// the role of `HB_SEED`.
pub fn run_with_env<I, T>(args: I, seed_env: Option<&str>) -> (i32, Value)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return (EXIT_OK, json!({ "help": e.to_string() }));
            }
            return error_doc(EXIT_VALIDATION, "usage", e.to_string());
        }
    };
    let mut cfg = RunConfig::default();
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(env) = seed_env {
        match env.trim().parse() {
            Ok(s) => cfg.seed = s,
            Err(_) => return error_doc(EXIT_VALIDATION, "usage", format!("HB_SEED={env:?} is not an integer")),
        }
    }
    match execute(&cli.command, &mut cfg) {
        Ok(out) => out,
        Err(e) if e.is_numerical() => error_doc(EXIT_NUMERICAL, "numerical", e.to_string()),
        Err(e) => error_doc(EXIT_VALIDATION, "validation", e.to_string()),
    }
}

/// [`run_with_env`] reading `HB_SEED` from the environment.
pub fn run<I, T>(args: I) -> (i32, Value)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var("HB_SEED").ok();
    run_with_env(args, env.as_deref())
}

fn execute(cmd: &Command, cfg: &mut RunConfig) -> Result<(i32, Value)> {
    let start = Instant::now();
    let ms = |s: Instant| s.elapsed().as_secs_f64() * 1e3;
    let ok = |doc: Value| Ok((EXIT_OK, doc));
    match cmd {
        Command::Mate { b, grid, tol } => {
            cfg.grid = *grid;
            cfg.tolerances.mate = *tol;
            let (input, b) = load_rational(&b.b)?;
            let s = cfg.settings();
            let b = b.reduce(s.tol.gcd, &s.roots)?;
            let mate = spectral::pythagorean_mate(&b, &s)?;
            if mate.residual > *tol {
                return Err(HbError::Factorization(format!(
                    "mate residual {:e} exceeds {:e}",
                    mate.residual, tol
                )));
            }
            let res = json!({ "mate": residual(mate.residual, *tol) });
            ok(envelope("mate", json!({ "b": input }), cfg, serde_json::to_value(&mate)?, res, ms(start)))
        }
        Command::Kernel { b, lambda, z } => {
            let (input, b) = load_rational(&b.b)?;
            let (l, zz) = (parse_complex(lambda)?, parse_complex(z)?);
            let space = HbSpace::new(b, cfg.settings())?;
            let value = space.kernel(l, zz)?;
            let results = json!({ "lambda": l, "z": zz, "kernel": value });
            let res = json!({ "mate": residual(space.mate().residual, cfg.tolerances.mate) });
            let input = json!({ "b": input, "lambda": l, "z": zz });
            ok(envelope("kernel", input, cfg, results, res, ms(start)))
        }
        Command::Gram { b, n, out } => {
            let (input, b) = load_rational(&b.b)?;
            let space = HbSpace::new(b, cfg.settings())?;
            let g = space.gram_matrix(*n)?;
            let rows: Vec<Vec<C64>> = (0..*n).map(|i| (0..*n).map(|j| g[(i, j)]).collect()).collect();
            let mut asym: f64 = 0.0;
            for i in 0..*n {
                for j in 0..*n {
                    asym = asym.max((g[(i, j)] - g[(j, i)].conj()).norm());
                }
            }
            let gram = json!({ "n": n, "entries": rows });
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&gram)?)
                    .map_err(|e| HbError::InvalidArgument(format!("{}: {e}", path.display())))?;
            }
            let res = json!({
                "hermitian": residual(asym, cfg.tolerances.gram),
                "mate": residual(space.mate().residual, cfg.tolerances.mate),
            });
            let input = json!({ "b": input, "n": n, "out": out });
            ok(envelope("gram", input, cfg, gram, res, ms(start)))
        }
        Command::Verify { b, mmax, deg } => {
            let (input, b) = load_rational(&b.b)?;
            let space = HbSpace::new(b, cfg.settings())?;
            let report = isometry::verify(&space, *mmax, *deg)?;
            let res = json!({
                "mate": residual(space.mate().residual, cfg.tolerances.mate),
                "tau_iso": cfg.tolerances.iso,
                "tau_strict": cfg.tolerances.strict,
            });
            let input = json!({ "b": input, "mmax": mmax, "deg": deg });
            ok(envelope("verify", input, cfg, serde_json::to_value(&report)?, res, ms(start)))
        }
        Command::Extend { b0, omega, t } => {
            let (input, b0) = load_rational(b0)?;
            let omega = parse_complex(omega)?;
            let ext = model::extend(&b0, ExtensionParams::new(omega, *t), &cfg.settings())?;
            let res = json!({ "certificate": residual(ext.certificate.deviation(), cfg.tolerances.mate) });
            let input = json!({ "b0": input, "omega": omega, "t": t });
            ok(envelope("extend", input, cfg, serde_json::to_value(&ext)?, res, ms(start)))
        }
        Command::Model { steps, verify } => {
            let (input, steps) = load_steps(steps)?;
            let m = model::build_model(&steps, *verify, &cfg.settings())?;
            let worst = m.certificates.iter().map(|c| c.deviation()).fold(0.0, f64::max);
            let res = json!({
                "certificates": residual(worst, cfg.tolerances.mate),
                "mate": residual(m.space.mate().residual, cfg.tolerances.mate),
            });
            let input = json!({ "steps": input, "verify": verify });
            ok(envelope("model", input, cfg, serde_json::to_value(&m)?, res, ms(start)))
        }
        Command::Classify { b, f, oracle } => {
            let (b_in, b) = load_rational(&b.b)?;
            let (f_in, f) = load_rational(f)?;
            let space = HbSpace::new(b, cfg.settings())?;
            let d = lattice::classify(&space, &f)?;
            let mut results = json!({ "descriptor": d, "canonical": d.canonical() });
            if let Some(k) = oracle {
                cfg.oracle_k = *k;
                let one = RationalFn::from_poly(Poly::one());
                results["oracle"] = json!({
                    "to_canonical": lattice::subspace_distance(&space, &f, &d.canonical(), *k)?,
                    "to_one": lattice::subspace_distance(&space, &f, &one, *k)?,
                });
            }
            let res = json!({ "mate": residual(space.mate().residual, cfg.tolerances.mate) });
            let input = json!({ "b": b_in, "f": f_in, "oracle": oracle });
            ok(envelope("classify", input, cfg, results, res, ms(start)))
        }
        Command::Cyclic { b, f } => {
            let (b_in, b) = load_rational(&b.b)?;
            let (f_in, f) = load_rational(f)?;
            let space = HbSpace::new(b, cfg.settings())?;
            let w = lattice::is_cyclic(&space, &f)?;
            let res = json!({ "mate": residual(space.mate().residual, cfg.tolerances.mate) });
            let input = json!({ "b": b_in, "f": f_in });
            ok(envelope("cyclic", input, cfg, serde_json::to_value(&w)?, res, ms(start)))
        }
        Command::Suite => {
            let suite = report::run_suite(cfg);
            let code = if suite.failed == 0 { EXIT_OK } else { EXIT_NUMERICAL };
            let res: Value = suite
                .checks
                .iter()
                .map(|c| (format!("criterion_{}", c.id), residual(c.value, c.tolerance)))
                .collect::<serde_json::Map<_, _>>()
                .into();
            let doc = envelope("suite", json!({}), cfg, serde_json::to_value(&suite)?, res, ms(start));
            Ok((code, doc))
        }
    }
}
