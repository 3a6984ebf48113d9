use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use linkweyl::critlift::{hensel_lift, leading_analysis, BranchSelector, LiftConfig};
use linkweyl::harness::{nobulk_scan, render, weyl_scan, KRange, OutputFormat, ScanConfig};
use linkweyl::linkfam::{critical_data_for, ChainConfig};
use linkweyl::matrix::Matrix;
use linkweyl::spectrum::{enumerate_spectrum, ModelOrbitSet, SpectrumConfig};
use linkweyl::symprodqh::symk_idempotents;
use linkweyl::{cliffordtrace, parse_rational, Error, ErrorKind, Exponent, LaurentPotential, Rational, UnitaryPoint};

#[derive(Parser)]
#[command(
    name = "linkweyl",
    version,
    about = "Exact computations for chain links, Clifford traces, idempotents and action spectra"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Critical points of a Laurent potential.
    #[command(subcommand)]
    Crit(Crit),
    /// Clifford trace against the Hessian determinant.
    #[command(subcommand)]
    Trace(Trace),
    /// Idempotents of the symmetric product quantum cohomology.
    #[command(subcommand)]
    Qh(Qh),
    /// Action spectra of symmetric products.
    #[command(subcommand)]
    Spectrum(Spectrum),
    /// Chain links on the sphere.
    #[command(subcommand)]
    Link(Link),
    /// Scans over k.
    #[command(subcommand)]
    Scan(Scan),
}

#[derive(Subcommand)]
enum Crit {
    /// Rational leading-order solutions, each lifted and certified.
    Find {
        #[arg(long)]
        potential: PathBuf,
        /// Lift precision; defaults to twice the lowest coefficient valuation.
        #[arg(long)]
        prec: Option<String>,
    },
    /// Newton lift of a seed point.
    Lift {
        #[arg(long)]
        potential: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[arg(long)]
        prec: String,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
}

#[derive(Subcommand)]
enum Trace {
    Check {
        #[arg(long)]
        hessian: PathBuf,
    },
}

#[derive(Subcommand)]
enum Qh {
    Idempotents {
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "1")]
        omega: String,
    },
}

#[derive(Subcommand)]
enum Spectrum {
    Enum {
        /// Comma-separated orbit values.
        #[arg(long, allow_hyphen_values = true)]
        values: String,
        #[arg(long)]
        k: usize,
        /// Generator of the period group.
        #[arg(long)]
        pi: String,
        /// `lo,hi`.
        #[arg(long, allow_hyphen_values = true)]
        window: String,
    },
}

#[derive(Subcommand)]
enum Link {
    /// Lifted critical point of a chain configuration.
    Crit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        prec: Option<String>,
        #[arg(long, value_enum, default_value_t = Branch::Positive)]
        branch: Branch,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Branch {
    LexSmallest,
    LexLargest,
    Positive,
}

impl From<Branch> for BranchSelector {
    fn from(b: Branch) -> Self {
        match b {
            Branch::LexSmallest => BranchSelector::LexSmallest,
            Branch::LexLargest => BranchSelector::LexLargest,
            Branch::Positive => BranchSelector::Positive,
        }
    }
}

#[derive(Subcommand)]
enum Scan {
    Weyl {
        #[arg(long)]
        config: PathBuf,
    },
    Nobulk(NobulkArgs),
}

#[derive(Args)]
struct NobulkArgs {
    #[arg(long, default_value_t = 1)]
    kmin: usize,
    #[arg(long)]
    kmax: usize,
    #[arg(long, default_value = "1")]
    omega: String,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn rationals(list: &str) -> Result<Vec<Rational>, Error> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(parse_rational).collect()
}

fn pretty(v: &impl serde::Serialize) -> Result<String, Error> {
    serde_json::to_string_pretty(v).map(|s| s + "\n").map_err(|e| Error::Parse(e.to_string()))
}

fn default_prec(w: &LaurentPotential) -> Exponent {
    match w.min_coefficient_valuation() {
        Some(v) if v.is_positive() => v.times(2),
        _ => Exponent::from_int(1),
    }
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Crit(Crit::Find { potential, prec }) => {
            let w: LaurentPotential = read_json(&potential)?;
            let target = match prec {
                Some(p) => Exponent::parse(&p)?,
                None => default_prec(&w),
            };
            let sols = leading_analysis(&w)?;
            let cfg = LiftConfig::new(target, 64)?;
            let mut points = Vec::new();
            for p in &sols.points {
                let z0 = UnitaryPoint::from_rationals(p)?;
                let entry = match hensel_lift(&w, &z0, &cfg) {
                    Ok(cert) => serde_json::to_value(&cert).map_err(|e| Error::Parse(e.to_string()))?,
                    Err(e) if e.kind() == ErrorKind::Obstruction => {
                        json!({ "leading": z0, "morse": false, "reason": e.to_string() })
                    }
                    Err(e) => return Err(e),
                };
                points.push(entry);
            }
            pretty(&json!({ "irrational_branches": sols.irrational_branches, "solutions": points }))
        }
        Command::Crit(Crit::Lift { potential, seed, prec, max_steps }) => {
            let w: LaurentPotential = read_json(&potential)?;
            let z0: UnitaryPoint = read_json(&seed)?;
            let cert = hensel_lift(&w, &z0, &LiftConfig::new(Exponent::parse(&prec)?, max_steps)?)?;
            pretty(&cert)
        }
        Command::Trace(Trace::Check { hessian }) => {
            let h: Matrix = read_json(&hessian)?;
            let report = cliffordtrace::check_trace(h)?;
            let bound = cliffordtrace::defect_bound(&report.z)?;
            let mut v = serde_json::to_value(&report).map_err(|e| Error::Parse(e.to_string()))?;
            v["defect_bound"] = json!(bound);
            pretty(&v)
        }
        Command::Qh(Qh::Idempotents { k, omega }) => {
            let omega = Exponent::parse(&omega)?;
            let es = symk_idempotents(k, &omega)?;
            let rows: Vec<Value> = es
                .iter()
                .enumerate()
                .map(|(j, e)| {
                    let v = e.valuation();
                    json!({
                        "j": j,
                        "coeffs": e.coeffs(),
                        "valuation": v,
                        "valuation_over_k": v.map(|v| v.scale(&Rational::new(1.into(), (k as i64).into()))),
                    })
                })
                .collect();
            pretty(&json!({ "k": k, "omega": omega, "count": es.len(), "idempotents": rows }))
        }
        Command::Spectrum(Spectrum::Enum { values, k, pi, window }) => {
            let orbits = ModelOrbitSet::new(rationals(&values)?);
            let bounds = rationals(&window)?;
            let [lo, hi] =
                <[Rational; 2]>::try_from(bounds).map_err(|_| Error::InvalidConfig("window must be `lo,hi`".into()))?;
            let cfg = SpectrumConfig::new(k, parse_rational(&pi)?, lo, hi)?;
            let points: Vec<String> = enumerate_spectrum(&orbits, &cfg)?.iter().map(|x| x.to_string()).collect();
            pretty(&points)
        }
        Command::Link(Link::Crit { config, prec, branch }) => {
            let cfg: ChainConfig = read_json(&config)?;
            let w = cfg.potential()?;
            let target = match prec {
                Some(p) => Exponent::parse(&p)?,
                None => cfg.b.times(cfg.k as i64 + 1),
            };
            let cert = critical_data_for(&w, &LiftConfig::new(target, 64)?.with_branch(branch.into()))?;
            pretty(&cert)
        }
        Command::Scan(Scan::Weyl { config }) => {
            let cfg: ScanConfig = read_json(&config)?;
            render(&weyl_scan(&cfg)?, cfg.output_format)
        }
        Command::Scan(Scan::Nobulk(args)) => {
            let omega = Exponent::parse(&args.omega)?;
            if !omega.is_positive() {
                return Err(Error::NonPositiveOmega(omega));
            }
            let format = match args.format {
                Format::Csv => OutputFormat::Csv,
                Format::Json => OutputFormat::Json,
            };
            render(&nobulk_scan(KRange::new(args.kmin, args.kmax), &omega)?, format)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e.kind() {
                ErrorKind::Config => ExitCode::from(2),
                ErrorKind::Obstruction => ExitCode::from(3),
            }
        }
    }
}
