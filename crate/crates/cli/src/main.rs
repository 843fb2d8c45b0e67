use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zeonwalk::analysis::{analyze, identities, AnalyzeOptions};
use zeonwalk::colorings::{enumerate_colorings, EnumerationError};
use zeonwalk::observables::Report;
use zeonwalk::problem::{parse_graph, parse_spec, ProblemSpec, Validation};
use zeonwalk::rational;

const EXIT_ASSERTION: u8 = 2;
const EXIT_INPUT: u8 = 1;

#[derive(Parser)]
#[command(
    name = "zeonwalk",
    version,
    about = "Exact limit measures of random walks on coloring semigroups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline and print a summary.
    Analyze {
        spec: PathBuf,
        /// Write the full JSON report here (`-` for stdout).
        #[arg(long)]
        json: Option<PathBuf>,
        /// Highest zeon level reported (default min(n, 6)).
        #[arg(long)]
        level_cap: Option<usize>,
        /// Highest tensor level computed, 2 or 3.
        #[arg(long, default_value_t = 3)]
        tensor_cap: usize,
        /// Color weights, e.g. `1/3,2/3`.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<String>>,
        /// Report graph-hypothesis violations as warnings.
        #[arg(long)]
        warn_only: bool,
    },
    /// Enumerate the colorings of a regular digraph with their kernel ranks.
    Colorings {
        graph: PathBuf,
        #[arg(long, default_value_t = 100_000)]
        budget: u128,
        /// Stop at the first synchronizing coloring.
        #[arg(long)]
        find_sync: bool,
    },
    /// Run only the operator identity suite.
    Identities {
        spec: PathBuf,
        #[arg(long)]
        warn_only: bool,
    },
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_spec(
    path: &Path,
    weights: Option<Vec<String>>,
    level_cap: Option<usize>,
) -> Result<ProblemSpec, String> {
    let mut spec = parse_spec(&read(path)?).map_err(|e| e.to_string())?;
    if let Some(ws) = weights {
        let parsed = ws
            .iter()
            .map(|w| rational::parse(w))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        spec.weights = Some(parsed);
    }
    if level_cap.is_some() {
        spec.level_cap = level_cap;
    }
    Ok(spec)
}

fn validation(warn_only: bool) -> Validation {
    if warn_only {
        Validation::Warn
    } else {
        Validation::Strict
    }
}

fn print_checks(report: &Report) {
    for c in &report.checks {
        let status = if c.passed { "PASS" } else { "FAIL" };
        match &c.detail {
            Some(d) => println!("{status}  {}  ({d})", c.name),
            None => println!("{status}  {}", c.name),
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Analyze {
            spec,
            json,
            level_cap,
            tensor_cap,
            weights,
            warn_only,
        } => {
            let spec = load_spec(&spec, weights, level_cap)?;
            let opts = AnalyzeOptions {
                tensor_cap,
                validation: validation(warn_only),
                ..AnalyzeOptions::default()
            };
            let report = analyze(&spec, &opts).map_err(|e| e.to_string())?;
            let to_stdout = json.as_deref() == Some(Path::new("-"));
            if let Some(path) = json.as_deref().filter(|_| !to_stdout) {
                fs::write(path, report.to_json() + "\n")
                    .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
            }
            if to_stdout {
                println!("{}", report.to_json());
            } else {
                for w in &report.warnings {
                    println!("warning: {w}");
                }
                println!(
                    "n = {}, |S| = {}, |K| = {}",
                    report.n, report.semigroup_size, report.kernel_size
                );
                println!(
                    "rank {} (zeon {}), |G| = {}, {} partitions x {} ranges",
                    report.rank.semigroup,
                    report.rank.zeon,
                    report.group_order,
                    report.rees.partitions.len(),
                    report.rees.ranges.len()
                );
                let join =
                    |v: &[zeonwalk::Rational]| v.iter().map(rational::to_text).collect::<Vec<_>>().join(", ");
                println!("alpha = [{}]", join(&report.alpha));
                println!("beta = [{}]", join(&report.beta));
                println!("pi = [{}]", join(&report.observables.pi));
                println!("tau = {}", report.observables.tau);
                let failed = report.checks.failures().count();
                println!("{} checks, {failed} failed", report.checks.checks.len());
                for c in report.checks.failures() {
                    println!("FAIL  {}  ({})", c.name, c.detail.as_deref().unwrap_or(""));
                }
            }
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            })
        }
        Command::Colorings {
            graph,
            budget,
            find_sync,
        } => {
            let g = parse_graph(&read(&graph)?).map_err(|e| e.to_string())?;
            let (results, note) = match enumerate_colorings(&g, budget, find_sync) {
                Ok(r) => (r, None),
                Err(EnumerationError::Budget(b)) => {
                    let note = b.to_string();
                    (b.partial, Some(note))
                }
                Err(EnumerationError::Input(e)) => return Err(e.to_string()),
            };
            for r in &results {
                let sync = if r.synchronizing { "  synchronizing" } else { "" };
                println!("{}  {}  rank {}{sync}", r.index, r.colors.join(" "), r.rank);
            }
            if let Some(note) = note {
                eprintln!("{note}");
            }
            if find_sync && !results.iter().any(|r| r.synchronizing) {
                eprintln!("no synchronizing coloring found");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Identities { spec, warn_only } => {
            let spec = load_spec(&spec, None, None)?;
            let opts = AnalyzeOptions {
                validation: validation(warn_only),
                ..AnalyzeOptions::default()
            };
            let report = identities(&spec, &opts).map_err(|e| e.to_string())?;
            print_checks(&report);
            Ok(if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_ASSERTION)
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
