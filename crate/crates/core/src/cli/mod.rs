//! The `steering` command line.
//!
//! Commands only parse arguments, call into [`crate::scenarios`],
//! [`crate::jointmeas`] and [`crate::entropy`], and format the results.
//!
//! Exit codes: 0 on success, 2 for invalid arguments, 1 for failed checks
//! and I/O errors.

pub mod csv;
pub mod svg;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::entropy::{self, dual_order, Distribution, JointDistribution, RenyiOrder, TsallisOrder};
use crate::jointmeas;
use crate::qobj::Visibility;
use crate::scenarios::{self, ScanResult};
use crate::selftest;
use crate::Error;

#[derive(Debug, Parser)]
#[command(name = "steering", version, about = "Entropic steering criteria and joint-measurability thresholds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rényi (or Tsallis) entropy of a distribution, conditional when --rows is given
    Entropy {
        /// Probabilities, comma separated; row-major when --rows is set
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        probs: Vec<f64>,
        /// Rows of the table p(x, y); columns are the conditioning variable
        #[arg(long)]
        rows: Option<usize>,
        #[arg(long, default_value = "1", value_parser = parse_order)]
        alpha: RenyiOrder,
        /// Tsallis order q (nats) instead of a Rényi order
        #[arg(long)]
        tsallis: Option<f64>,
    },
    /// Evaluate the steering inequality for computational/Fourier bases at one visibility
    Check {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        visibility: f64,
        #[arg(long, default_value = "0.5", value_parser = parse_order)]
        alpha: RenyiOrder,
    },
    /// Symmetric detection threshold for computational/Fourier bases
    Threshold {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "0.5", value_parser = parse_order)]
        alpha: RenyiOrder,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Thresholds against dimension for several orders
    ScanFig1 {
        /// Dimensions: `2..10`, `2,3,5` or a single value
        #[arg(long, default_value = "2..10", value_parser = parse_dims)]
        d: Dims,
        #[arg(long, default_value = "0.5,0.7,1,inf", value_delimiter = ',', value_parser = parse_order)]
        alphas: Vec<RenyiOrder>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Unbiased qubit pairs against angle, or random qubit pairs with --random
    ScanQubit {
        /// Number of angles in [0, max-theta]
        #[arg(long, default_value_t = 20)]
        points: usize,
        #[arg(long, default_value_t = 0.76)]
        max_theta: f64,
        /// Random measurement pairs instead of the angle family
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Thresholds along the qutrit family t in [0, 1/2]
    ScanD3 {
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Optimise Bob's bases at every visibility
        #[arg(long)]
        refine: bool,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the criterion's boundary with exact compatibility for unequal visibilities
    Tightness {
        #[arg(long, default_value = "2..10", value_parser = parse_dims)]
        d: Dims,
        #[arg(long, default_value_t = 21)]
        chi_points: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Evaluate the criteria on sampled local-hidden-state models
    LhsTest {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        models: usize,
        /// Largest tolerated violation in bits
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Run the acceptance checks
    Selftest {
        /// Run only this check (1-8)
        #[arg(long)]
        criterion: Option<u8>,
    },
}

#[derive(Debug, Args)]
struct Output {
    /// Write CSV here instead of standard output
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Also write an SVG line chart
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Add noise (1 - visibility) columns
    #[arg(long)]
    noise: bool,
}

#[derive(Debug, Clone)]
struct Dims(Vec<usize>);

fn parse_order(s: &str) -> Result<RenyiOrder, String> {
    s.trim().parse::<RenyiOrder>().map_err(|e| e.to_string())
}

fn parse_dims(s: &str) -> Result<Dims, String> {
    let bad = |p: &str| format!("invalid dimension `{p}`");
    let one = |p: &str| p.trim().parse::<usize>().map_err(|_| bad(p));
    let dims = if let Some((a, b)) = s.split_once("..") {
        let a = one(a)?;
        let b = match b.strip_prefix('=') {
            Some(b) => one(b)?,
            None => one(b)?,
        };
        if b < a {
            return Err(format!("empty range `{s}`"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(one).collect::<Result<Vec<_>, _>>()?
    };
    if dims.iter().any(|&d| d < 2) {
        return Err("dimensions must be at least 2".into());
    }
    Ok(Dims(dims))
}

/// Failure of a command, mapped to an exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Check(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) | Error::NonMonotone | Error::NonBracketing(_) => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn linspace(n: usize, hi: f64) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|k| hi * k as f64 / (n - 1) as f64).collect(),
    }
}

fn emit(result: &ScanResult, output: &Output, out: &mut dyn Write) -> Outcome {
    match &output.csv {
        Some(path) => {
            csv::emit_csv(result, path, output.noise)?;
            writeln!(out, "wrote {} records to {}", result.records.len(), path.display())?;
        }
        None => csv::write_scan(result, &mut *out, output.noise)?,
    }
    if let Some(path) = &output.svg {
        svg::emit_svg(result, path)?;
        writeln!(out, "wrote chart to {}", path.display())?;
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Entropy {
            probs,
            rows,
            alpha,
            tsallis,
        } => {
            let q = tsallis.map(TsallisOrder::new).transpose()?;
            match rows {
                None => {
                    let p = Distribution::new(probs)?;
                    match q {
                        Some(q) => writeln!(out, "{:.12}", entropy::tsallis_entropy(&p, q))?,
                        None => writeln!(out, "{:.12}", entropy::renyi_entropy(&p, alpha))?,
                    }
                }
                Some(r) => {
                    if r == 0 || probs.len() % r != 0 {
                        return Err(Failure::Usage(format!("{} probabilities do not fill {r} rows", probs.len())));
                    }
                    let j = JointDistribution::new(r, probs.len() / r, probs)?;
                    match q {
                        Some(q) => writeln!(out, "{:.12}", entropy::conditional_tsallis(&j, q))?,
                        None => writeln!(out, "{:.12}", entropy::conditional_renyi(&j, alpha))?,
                    }
                }
            }
        }
        Command::Check { d, visibility, alpha } => {
            let v = Visibility::new(visibility)?;
            let c = scenarios::mub_certificate(d, v, alpha)?;
            writeln!(out, "alpha {}", c.alpha)?;
            writeln!(out, "beta {}", c.beta)?;
            writeln!(out, "lhs {:.9}", c.lhs)?;
            writeln!(out, "bound {:.9}", c.bound)?;
            writeln!(out, "violation {:.9}", c.violation)?;
            writeln!(out, "steering {}", if c.detects_steering() { "detected" } else { "not detected" })?;
        }
        Command::Threshold { d, alpha, tol } => {
            let v = scenarios::mub_threshold(d, alpha, tol)?;
            let exact = jointmeas::mub_jm_threshold_symmetric(d)?;
            writeln!(out, "d {d}")?;
            writeln!(out, "alpha {alpha}")?;
            writeln!(out, "beta {}", dual_order(alpha)?)?;
            writeln!(out, "visibility {:.6}", v.value())?;
            writeln!(out, "noise {:.6}", v.noise())?;
            writeln!(out, "exact_visibility {:.6}", exact.value())?;
            writeln!(out, "exact_noise {:.6}", exact.noise())?;
        }
        Command::ScanFig1 { d, alphas, tol, output } => {
            let result = scenarios::fig1_scan(&d.0, &alphas, tol)?;
            emit(&result, &output, out)?;
        }
        Command::ScanQubit {
            points,
            max_theta,
            random,
            seed,
            tol,
            output,
        } => {
            let result = match random {
                Some(n) => scenarios::qubit_random_povm_check(n, seed, tol)?,
                None => scenarios::qubit_angle_scan(&linspace(points, max_theta), tol)?,
            };
            emit(&result, &output, out)?;
        }
        Command::ScanD3 {
            points,
            refine,
            tol,
            output,
        } => {
            let result = scenarios::d3_family_scan(&linspace(points, 0.5), tol, refine)?;
            emit(&result, &output, out)?;
        }
        Command::Tightness { d, chi_points, tol, csv: path } => {
            let rows = scenarios::tightness_scan(&d.0, chi_points, tol)?;
            match path {
                Some(p) => {
                    let mut f = io::BufWriter::new(std::fs::File::create(&p)?);
                    csv::write_tightness(&rows, &mut f)?;
                    f.flush()?;
                    let worst = rows.iter().map(|r| r.difference()).fold(0.0, f64::max);
                    writeln!(out, "wrote {} rows to {}", rows.len(), p.display())?;
                    writeln!(out, "max difference {}", csv::format_sig9(worst))?;
                }
                None => csv::write_tightness(&rows, &mut *out)?,
            }
        }
        Command::LhsTest { seed, models, tol } => {
            let r = scenarios::lhs_falsification_suite(seed, models)?;
            writeln!(out, "models {}", r.n_models)?;
            writeln!(out, "seed {}", r.seed)?;
            for (a, v) in &r.per_alpha {
                writeln!(out, "alpha {a} max_violation {}", csv::format_sig9(*v))?;
            }
            writeln!(out, "max_violation {}", csv::format_sig9(r.max_violation))?;
            writeln!(out, "worst model {} (d = {}, alpha = {})", r.worst_model, r.worst_dim, r.worst_alpha)?;
            if !r.passes(tol) {
                writeln!(out, "result FAIL")?;
                return Err(Failure::Check(format!("violation {} exceeds {tol}", r.max_violation)));
            }
            writeln!(out, "result PASS")?;
        }
        Command::Selftest { criterion } => {
            let outcomes = match criterion {
                Some(id) => vec![selftest::run_criterion(id)?],
                None => selftest::run_all(),
            };
            for o in &outcomes {
                writeln!(out, "{o}")?;
            }
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            writeln!(out, "{} of {} checks passed", outcomes.len() - failed, outcomes.len())?;
            if failed > 0 {
                return Err(Failure::Check(format!("{failed} checks failed")));
            }
        }
    }
    Ok(())
}

/// Runs the CLI with explicit streams and returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "check failed: {msg}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "I/O error: {e}");
            1
        }
    }
}

/// Runs the CLI on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}
