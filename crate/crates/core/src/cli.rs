//! Command-line front end.
//!
//! Exit status is 0 on success (or a passing verification), 1 when a
//! verification check fails and 2 on malformed input.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{gap_bound, mr_hat};
use crate::entropy::EntropyFunctional;
use crate::error::{Error, Result};
use crate::gibbs::{figure_data, EpsGrid, Figure};
use crate::numfmt::g12;
use crate::oracle::{merge, CandidatePool, CandidateSet, SearchBudget, VerificationReport};
use crate::spectrum::{Spectrum, Tolerance};
use crate::textio::parse_source;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "majorbound",
    version,
    about = "Entropy bounds under partial majorization and trace-distance constraints"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bound on f(rho) - f(sigma) and the extremal state attaining it.
    Bound {
        #[command(flatten)]
        spectrum: SpectrumArg,
        /// Functional: vn, renyi:<alpha> or tsallis:<alpha>.
        #[arg(long = "f", default_value = "vn")]
        functional: String,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Upper bound on the eps-sufficient majorization rank.
    Rank {
        #[command(flatten)]
        spectrum: SpectrumArg,
        #[arg(long)]
        eps: f64,
    },
    /// CSV data for the Gibbs-state bound and rank plots.
    Figure {
        /// fig1, fig2 or fig3.
        which: String,
        /// Number of eps samples (defaults to 200).
        #[arg(long)]
        points: Option<usize>,
        /// Decades spanned by the log grid of fig3.
        #[arg(long)]
        decades: Option<f64>,
        /// Write CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Brute-force check of the bound and of extremal dominance.
    Verify {
        #[command(flatten)]
        spectrum: SpectrumArg,
        #[arg(long = "f", default_value = "vn")]
        functional: String,
        #[arg(long, default_value_t = 0)]
        m: usize,
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = SetChoice::Both)]
        set: SetChoice,
        #[arg(long, default_value_t = 100)]
        resolution: usize,
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        refine: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args)]
pub struct SpectrumArg {
    /// Inline list (0.5,0.3,0.2), `gibbs N=<x>`, `geometric q=<x>` or a file.
    #[arg(long)]
    pub spectrum: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SetChoice {
    Tset,
    Pset,
    Both,
}

impl SetChoice {
    fn sets(self) -> &'static [CandidateSet] {
        match self {
            SetChoice::Tset => &[CandidateSet::Tset],
            SetChoice::Pset => &[CandidateSet::Pset],
            SetChoice::Both => &[CandidateSet::Tset, CandidateSet::Pset],
        }
    }
}

fn load(arg: &SpectrumArg, tol: Tolerance) -> Result<Spectrum> {
    parse_source(&arg.spectrum, tol)
}

fn join_g12(values: &[f64]) -> String {
    values.iter().map(|&x| g12(x)).collect::<Vec<_>>().join(",")
}

fn io_error(e: std::io::Error) -> Error {
    Error::Parse(format!("write failed: {e}"))
}

/// Runs a parsed command, writing results to `out`.
pub fn run(command: &Command, out: &mut dyn Write) -> Result<i32> {
    let tol = Tolerance::from_env()?;
    match command {
        Command::Bound { spectrum, functional, m, eps } => {
            let s = load(spectrum, tol)?;
            let f: EntropyFunctional = functional.parse()?;
            let r = gap_bound(&f, &s, *m, *eps)?;
            writeln!(out, "{}", g12(r.value)).map_err(io_error)?;
            writeln!(out, "{}", r.case).map_err(io_error)?;
            writeln!(out, "{}", join_g12(&r.extremal.sorted_entries())).map_err(io_error)?;
            Ok(EXIT_OK)
        }
        Command::Rank { spectrum, eps } => {
            let s = load(spectrum, tol)?;
            writeln!(out, "{}", mr_hat(&s, *eps)?).map_err(io_error)?;
            Ok(EXIT_OK)
        }
        Command::Figure { which, points, decades, output } => {
            let which: Figure = which.parse()?;
            let grid = match (which.default_grid(), points, decades) {
                (EpsGrid::Linear { points: p }, n, _) => EpsGrid::Linear { points: n.unwrap_or(p) },
                (EpsGrid::Log { points: p, decades: d }, n, k) => {
                    EpsGrid::Log { points: n.unwrap_or(p), decades: k.unwrap_or(d) }
                }
            };
            let csv = figure_data(which, grid)?.to_csv();
            match output {
                Some(path) => std::fs::write(path, csv)
                    .map_err(|e| Error::Parse(format!("cannot write {}: {e}", path.display())))?,
                None => out.write_all(csv.as_bytes()).map_err(io_error)?,
            }
            Ok(EXIT_OK)
        }
        Command::Verify { spectrum, functional, m, eps, set, resolution, samples, refine, seed, json } => {
            let s = load(spectrum, tol)?;
            let f: EntropyFunctional = functional.parse()?;
            let budget =
                SearchBudget::grid(*resolution).with_samples(*samples, *seed).with_refine(*refine).with_tolerance(tol);
            let mut report: Option<VerificationReport> = None;
            for &which in set.sets() {
                let pool = CandidatePool::build(&s, *m, *eps, &budget, which)?;
                let mut r = pool.worst_gap(&f)?;
                let d = pool.dominance()?;
                r.checks.extend(d.checks);
                report = Some(match report {
                    Some(prev) => merge(prev, r),
                    None => r,
                });
            }
            let report = report.expect("at least one candidate set");
            if *json {
                let text = serde_json::to_string_pretty(&report.to_json()).map_err(|e| Error::Parse(e.to_string()))?;
                writeln!(out, "{text}").map_err(io_error)?;
            } else {
                writeln!(out, "{}", report.summary()).map_err(io_error)?;
                for c in report.failures() {
                    if let Some(ce) = &c.counterexample {
                        writeln!(out, "  {}: {ce}", c.name).map_err(io_error)?;
                    }
                }
            }
            Ok(if report.passed() { EXIT_OK } else { EXIT_FAILED })
        }
    }
}

/// Parses `args` (including the program name) and runs the command. Errors go
/// to `err` as one diagnostic line.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match run(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("majorbound").chain(args.iter().copied());
        let code = main_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn bound_prints_value_case_and_state() {
        let (code, out, _) = call(&["bound", "--spectrum", "0.5,0.3,0.2", "--f", "vn", "--m", "1", "--eps", "0.3"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        let value: f64 = lines[0].parse().unwrap();
        assert!((value - 0.33651).abs() < 5e-6);
        assert_eq!(lines[1], "CaseF1");
        assert_eq!(lines[2], "0.5,0.5");
    }

    #[test]
    fn trivial_bound_is_zero() {
        let (code, out, _) = call(&["bound", "--spectrum", "0.5,0.5", "--f", "vn", "--m", "1", "--eps", "0.7"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().next(), Some("0"));
    }

    #[test]
    fn rank_of_gibbs_state() {
        let (code, out, _) = call(&["rank", "--spectrum", "gibbs N=1", "--eps", "0.1"]);
        assert_eq!(code, 0);
        assert_eq!(out.trim(), "5");
    }

    #[test]
    fn bad_input_exits_two() {
        let (code, _, err) = call(&["bound", "--spectrum", "0.5,0.4", "--eps", "0.1"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("error:"));
        let (code, _, _) = call(&["bound", "--spectrum", "0.5,0.5"]);
        assert_eq!(code, 2);
        let (code, _, _) = call(&["rank", "--spectrum", "1", "--eps", "0.1"]);
        assert_eq!(code, 2);
    }

    #[test]
    fn verify_passes_on_small_case() {
        let (code, out, _) = call(&[
            "verify",
            "--spectrum",
            "0.5,0.3,0.2",
            "--m",
            "1",
            "--eps",
            "0.2",
            "--resolution",
            "40",
            "--samples",
            "200",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.starts_with("PASS"));
    }
}
