//! `defeature`: run defeaturing-error experiments from the command line.
//!
//! Exit codes: 0 success, 2 invalid input or failed check, 3 solver failure.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use defeature::check;
use defeature::dump::write_dumps;
use defeature::error::EXIT_VALIDATION;
use defeature::report::{emit_report, strip_timing, to_csv, to_json, Format};
use defeature::run::{run_points, SweepReport};
use defeature::{catalog, config, CaseSpec, HarnessError};

#[derive(Parser)]
#[command(name = "defeature", version, about = "A posteriori defeaturing error estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every case of a TOML configuration file.
    Run { config: PathBuf },
    /// Run one catalog case.
    Case {
        id: String,
        /// Run a single ε instead of the catalog sweep.
        #[arg(long)]
        eps: Option<f64>,
        /// Elements across the feature size.
        #[arg(long)]
        res: Option<usize>,
        /// Oscillation projection degree.
        #[arg(long)]
        m: Option<usize>,
        /// Write `<id>.<format>` here instead of printing to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Report runtime_s = 0 so repeated runs are byte-identical.
        #[arg(long)]
        no_timing: bool,
        /// Also write mesh and field dumps to the output directory.
        #[arg(long)]
        dump_mesh: bool,
        /// Sweep workers; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// List the catalog cases.
    List,
    /// Run the quick invariant suite.
    Check,
}

fn summary_line(r: &SweepReport) -> String {
    let s = &r.summary;
    let f = |v: Option<f64>| v.map_or(String::from("-"), |v| format!("{v:.3}"));
    format!(
        "{}: {} point(s), slope err {} est {} osc {}, eff mean {} [{}, {}]",
        r.case,
        r.cases.len(),
        f(s.slope_error),
        f(s.slope_estimator),
        f(s.slope_osc),
        f(s.effectivity_mean),
        f(s.effectivity_min),
        f(s.effectivity_max)
    )
}

fn dumps(spec: &CaseSpec, dir: &Path) -> Result<(), HarnessError> {
    for (i, &eps) in spec.eps.iter().enumerate() {
        write_dumps(spec, i, eps, dir)?;
    }
    Ok(())
}

fn failure_code(r: &SweepReport) -> Option<ExitCode> {
    r.failure.as_ref().map(|f| {
        eprintln!("{}: ε = {}: {}", r.case, f.eps, f.message);
        ExitCode::from(f.exit_code as u8)
    })
}

fn run_config(path: &Path) -> Result<ExitCode, HarnessError> {
    let cfg = config::load(path)?;
    let mut code = ExitCode::SUCCESS;
    for spec in &cfg.cases {
        let mut report = run_points(spec, cfg.output.threads)?;
        if !cfg.output.timing {
            strip_timing(&mut report);
        }
        for &format in &cfg.output.formats {
            let p = emit_report(&report, format, &cfg.output.dir)?;
            eprintln!("wrote {}", p.display());
        }
        if cfg.output.dump_mesh && report.failure.is_none() {
            dumps(spec, &cfg.output.dir)?;
        }
        println!("{}", summary_line(&report));
        if let Some(c) = failure_code(&report) {
            code = c;
        }
    }
    Ok(code)
}

#[allow(clippy::too_many_arguments)]
fn run_catalog_case(
    id: &str,
    eps: Option<f64>,
    res: Option<usize>,
    m: Option<usize>,
    out: Option<PathBuf>,
    format: Format,
    no_timing: bool,
    dump_mesh: bool,
    threads: usize,
) -> Result<ExitCode, HarnessError> {
    let mut spec = catalog::case(id)?;
    if let Some(e) = eps {
        spec.eps = vec![e];
    }
    if let Some(r) = res {
        spec.mesh.resolution = r;
    }
    if let Some(m) = m {
        spec.m = m;
    }
    let mut report = run_points(&spec, threads)?;
    if no_timing {
        strip_timing(&mut report);
    }
    match &out {
        Some(dir) => {
            let p = emit_report(&report, format, dir)?;
            eprintln!("wrote {}", p.display());
            eprintln!("{}", summary_line(&report));
        }
        None => match format {
            Format::Csv => print!("{}", to_csv(&report)),
            Format::Json => print!("{}", to_json(&report)?),
        },
    }
    if dump_mesh && report.failure.is_none() {
        dumps(&spec, out.as_deref().unwrap_or(Path::new(".")))?;
    }
    Ok(failure_code(&report).unwrap_or(ExitCode::SUCCESS))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config } => run_config(&config),
        Command::Case { id, eps, res, m, out, format, no_timing, dump_mesh, threads } => {
            run_catalog_case(&id, eps, res, m, out, format, no_timing, dump_mesh, threads)
        }
        Command::List => {
            let mut out = std::io::stdout().lock();
            for e in catalog::list() {
                // A closed pipe (e.g. `| head`) is not an error.
                if writeln!(out, "{:<24} {}", e.id, e.title).is_err() {
                    break;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check => check::run_all().map(|results| {
            let mut ok = true;
            for r in &results {
                println!("{} {}: {}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail);
                ok &= r.passed;
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VALIDATION as u8)
            }
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code() as u8)
    })
}
