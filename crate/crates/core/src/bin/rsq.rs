use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rsq_core::error::{Result, RsqError};
use rsq_core::kernels::{zonal_kernel, FundamentalSolution, KernelMethod};
use rsq_core::ops::{apply_euclidean, apply_spherical_symbolic, OperatorKind, OperatorTag};
use rsq_core::poly::MultiPoly;
use rsq_core::scalar::Rational;
use rsq_core::spaces::{harmonic_basis, monogenic_basis, right_monogenic_basis};
use rsq_core::verify::{emit_report, run_suite, Arithmetic, ReportFormat, SuiteConfig};

#[derive(Parser)]
#[command(name = "rsq", version, about = "Clifford-valued polynomial operators and their verification suites")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Monogenic,
    MonogenicRight,
    Harmonic,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Gram,
    Formula,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite and emit its report.
    Verify {
        suite: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "exact")]
        arithmetic: String,
        /// Comma-separated quadrature orders.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long = "R", default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_3)]
        cap_angle: f64,
        /// Comma-separated base point y (or y_s on the sphere).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        base_point: Option<Vec<f64>>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        slow: bool,
    },
    /// Print a basis of homogeneous polynomials as JSON.
    Basis {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "monogenic")]
        kind: Kind,
    },
    /// Build the reproducing kernel Z_k.
    Kernel {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value = "gram")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply R_k, Q_k, Q_k (right) or Q_k^S to a polynomial read as JSON (`-` for stdin).
    Apply {
        #[arg(long)]
        op: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "-")]
        input: String,
        #[arg(long)]
        float: bool,
        /// Point on S^n at which Q_k^S is evaluated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        at: Option<Vec<f64>>,
    },
    /// Evaluate H_k(x, u, v).
    EvalHk {
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        u: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        v: Vec<f64>,
    },
}

fn write_out(out: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes)?,
        None => std::io::stdout().write_all(bytes)?,
    }
    Ok(())
}

fn pretty(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("json value serializes");
    s.push(b'\n');
    s
}

fn read_input(path: &str) -> Result<serde_json::Value> {
    let mut buf = String::new();
    if path == "-" {
        std::io::stdin().read_to_string(&mut buf)?;
    } else {
        buf = std::fs::read_to_string(path)?;
    }
    serde_json::from_str(&buf).map_err(|e| RsqError::Parse(e.to_string()))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.cmd {
        Cmd::Verify { suite, n, k, arithmetic, orders, tol, radius, cap_angle, base_point, seed, out, format, slow } => {
            let seed = match std::env::var("RSQ_SEED") {
                Ok(s) => s.trim().parse().map_err(|_| RsqError::Config(format!("RSQ_SEED `{s}` is not an integer")))?,
                Err(_) => seed,
            };
            let arithmetic: Arithmetic = arithmetic.parse()?;
            let format: ReportFormat = format.parse()?;
            let cfg = SuiteConfig { suite, n, k, arithmetic, orders, tol, seed, radius, cap_angle, base_point, slow };
            let report = run_suite(&cfg)?;
            write_out(&out, &emit_report(&report, format)?)?;
            if out.is_some() {
                for c in report.failures() {
                    eprintln!("FAIL {}/{} rel_err={:e} tol={:e}", report.suite, c.name, c.rel_err, c.tol);
                }
            }
            Ok(report.pass)
        }
        Cmd::Basis { n, k, kind } => {
            let b = match kind {
                Kind::Monogenic => monogenic_basis::<Rational>(n, k)?,
                Kind::MonogenicRight => right_monogenic_basis::<Rational>(n, k)?,
                Kind::Harmonic => harmonic_basis::<Rational>(n, k, n, "u")?,
            };
            write_out(&None, &pretty(&b.to_json()))?;
            Ok(true)
        }
        Cmd::Kernel { n, k, method, out } => {
            let m = match method {
                Method::Gram => KernelMethod::Gram,
                Method::Formula => KernelMethod::Formula,
            };
            write_out(&out, &pretty(&zonal_kernel(n, k, m)?.to_json()))?;
            Ok(true)
        }
        Cmd::Apply { op, n, k, input, float, at } => {
            let tag: OperatorTag = op.parse()?;
            let kind = OperatorKind::new(tag, n, k)?;
            let v = read_input(&input)?;
            let out = if tag == OperatorTag::QkSLeft {
                let at = at.ok_or_else(|| RsqError::Config("Q_k^S needs --at".into()))?;
                let f = if float { MultiPoly::<f64>::from_json(&v)? } else { MultiPoly::<Rational>::from_json(&v)?.to_f64() };
                apply_spherical_symbolic(&kind, &f, &at)?.to_json()
            } else if float {
                let f = MultiPoly::<f64>::from_json(&v)?;
                apply_euclidean(&kind, &f)?.to_json()
            } else {
                let f = MultiPoly::<Rational>::from_json(&v)?;
                apply_euclidean(&kind, &f)?.to_json()
            };
            write_out(&None, &pretty(&out))?;
            Ok(true)
        }
        Cmd::EvalHk { n, k, x, u, v } => {
            let h = FundamentalSolution::new(n, k)?;
            write_out(&None, &pretty(&h.eval(&x, &u, &v)?.to_json()))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
