//! Command-line driver for DG-IGA convergence studies on overlapping
//! multipatch domains.
//!
//! ```text
//! overlap-dgiga run   --example smooth --degree 2 --lambda 2.5 --levels 5 --out results
//! overlap-dgiga sweep --example multiface --lambdas 1,2,2.5,3 --levels 5 --out results
//! overlap-dgiga check
//! ```
//!
//! Exit codes: 0 success, 1 failed self-check, 2 configuration error,
//! 3 geometry error, 4 solver error.

use std::path::PathBuf;
use std::process::ExitCode;

use dgiga::analysis::ConvergenceTable;
use dgiga::assembly::FluxVariant;
use dgiga::error::Error;
use dgiga::harness::{self, csv_string, RunConfig};

const USAGE: &str = "overlap-dgiga: DG-IGA convergence studies on overlapping multipatch domains

USAGE:
    overlap-dgiga run   --example NAME --lambda L [OPTIONS] --out DIR
    overlap-dgiga sweep --example NAME --lambdas L1,L2,... [OPTIONS] --out DIR
    overlap-dgiga check

EXAMPLES (--example):
    smooth     2x2 patches, smooth solution, rho = 1
    jump-rho   2x2 patches, coefficient jump 3pi/2 | 2 across x = 0
    multiface  2x2 patches, overlap region bounded by four displaced faces
    box3d      two sheared 3D bands meeting at the plane x + y = 0

OPTIONS:
    --degree P          B-spline degree (default 2)
    --lambda L          overlap exponent, d_o = h^L; `inf` keeps interfaces
                        matching (run only)
    --lambdas L1,L2,..  exponents for a sweep (sweep only)
    --levels N          refinement levels, coarsest 4 elements/direction
                        (default 4)
    --eta E             penalty parameter (default 4 (P+1)^2)
    --quad Q            Gauss points per direction (default P+1)
    --variant V         symmetric | one-sided (default symmetric)
    --non-matching      refine the first patch once more than the others
    --out DIR           output directory for CSV/SVG files

`check` runs the invariant self-test suite and prints one line per check.";

struct Parsed {
    config: RunConfig,
    lambdas: Vec<f64>,
    out: Option<PathBuf>,
}

fn parse_lambda(text: &str) -> Result<f64, Error> {
    match text {
        "inf" | "matching" => Ok(f64::INFINITY),
        other => other
            .parse()
            .map_err(|_| Error::Config(format!("cannot parse lambda {:?}", other))),
    }
}

fn parse_args(args: &[String], sweep: bool) -> Result<Parsed, Error> {
    let mut config = RunConfig::new("");
    let mut lambdas = Vec::new();
    let mut out = None;
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = || {
            it.next()
                .cloned()
                .ok_or_else(|| Error::Config(format!("flag {} needs a value", flag)))
        };
        match flag.as_str() {
            "--example" => config.example = value()?,
            "--degree" => {
                config.degree = value()?
                    .parse()
                    .map_err(|e| Error::Config(format!("--degree: {}", e)))?
            }
            "--lambda" if !sweep => config.lambda = parse_lambda(&value()?)?,
            "--lambdas" if sweep => {
                for part in value()?.split(',') {
                    lambdas.push(parse_lambda(part.trim())?);
                }
            }
            "--levels" => {
                config.levels = value()?
                    .parse()
                    .map_err(|e| Error::Config(format!("--levels: {}", e)))?
            }
            "--eta" => {
                config.eta = Some(
                    value()?
                        .parse()
                        .map_err(|e| Error::Config(format!("--eta: {}", e)))?,
                )
            }
            "--quad" => {
                config.quadrature = Some(
                    value()?
                        .parse()
                        .map_err(|e| Error::Config(format!("--quad: {}", e)))?,
                )
            }
            "--variant" => {
                config.variant = match value()?.as_str() {
                    "symmetric" => FluxVariant::Symmetric,
                    "one-sided" => FluxVariant::OneSided,
                    other => {
                        return Err(Error::Config(format!(
                            "variant must be symmetric or one-sided, got {:?}",
                            other
                        )))
                    }
                }
            }
            "--non-matching" => config.non_matching = true,
            "--out" => out = Some(PathBuf::from(value()?)),
            other => return Err(Error::Config(format!("unknown flag {:?}", other))),
        }
    }
    if config.example.is_empty() {
        return Err(Error::Config("--example is required".into()));
    }
    if sweep && lambdas.is_empty() {
        return Err(Error::Config("--lambdas is required for sweep".into()));
    }
    Ok(Parsed {
        config,
        lambdas,
        out,
    })
}

fn lambda_tag(lambda: f64) -> String {
    if lambda.is_infinite() {
        "inf".to_string()
    } else {
        format!("{}", lambda)
    }
}

fn print_table(table: &ConvergenceTable) {
    println!(
        "{:>5} {:>13} {:>13} {:>8} {:>13} {:>13} {:>7}",
        "level", "h", "d_o", "dofs", "dg_error", "l2_error", "rate"
    );
    for (i, level) in table.levels.iter().enumerate() {
        let rate = table.rates[i]
            .map(|r| format!("{:7.3}", r))
            .unwrap_or_else(|| "      -".into());
        println!(
            "{:>5} {:>13.6e} {:>13.6e} {:>8} {:>13.6e} {:>13.6e} {}",
            level.level,
            level.report.h,
            level.report.overlap_width,
            level.dofs,
            level.report.dg_error,
            level.report.l2_error,
            rate
        );
    }
    if let Some(rate) = table.final_rate() {
        println!("final rate (mean of last two): {:.3}", rate);
    }
}

fn write_outputs(
    tables: &[ConvergenceTable],
    config: &RunConfig,
    out: &Option<PathBuf>,
    sweep: bool,
) -> Result<(), Error> {
    let Some(dir) = out else { return Ok(()) };
    std::fs::create_dir_all(dir)?;
    for table in tables {
        let csv = dir.join(format!(
            "{}_p{}_lambda{}.csv",
            config.example,
            config.degree,
            lambda_tag(table.lambda)
        ));
        std::fs::write(&csv, csv_string(table))?;
        println!("wrote {}", csv.display());
    }
    let svg_name = if sweep {
        format!("{}_p{}_sweep.svg", config.example, config.degree)
    } else {
        format!(
            "{}_p{}_lambda{}.svg",
            config.example,
            config.degree,
            lambda_tag(tables[0].lambda)
        )
    };
    let svg = dir.join(svg_name);
    let title = format!("{} (p = {})", config.example, config.degree);
    harness::write_svg(tables, &title, &svg)?;
    println!("wrote {}", svg.display());
    Ok(())
}

fn cmd_run(args: &[String]) -> Result<(), Error> {
    let parsed = parse_args(args, false)?;
    let table = harness::run_convergence(&parsed.config)?;
    println!(
        "example {} (lambda = {}, degree {})",
        parsed.config.example,
        lambda_tag(parsed.config.lambda),
        parsed.config.degree
    );
    print_table(&table);
    write_outputs(&[table], &parsed.config, &parsed.out, false)
}

fn cmd_sweep(args: &[String]) -> Result<(), Error> {
    let parsed = parse_args(args, true)?;
    let tables = harness::run_sweep(&parsed.config, &parsed.lambdas)?;
    for table in &tables {
        println!(
            "example {} (lambda = {}, degree {})",
            parsed.config.example,
            lambda_tag(table.lambda),
            parsed.config.degree
        );
        print_table(table);
        println!();
    }
    write_outputs(&tables, &parsed.config, &parsed.out, true)
}

fn cmd_check() -> ExitCode {
    let outcomes = dgiga::harness::self_check();
    let mut failed = 0;
    for outcome in &outcomes {
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("{} {:<28} {}", status, outcome.name, outcome.detail);
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        eprintln!("{} of {} checks failed", failed, outcomes.len());
        ExitCode::from(1)
    } else {
        println!("all {} checks passed", outcomes.len());
        ExitCode::SUCCESS
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let result = match args.first().map(String::as_str) {
        Some("run") => cmd_run(&args[1..]),
        Some("sweep") => cmd_sweep(&args[1..]),
        Some("check") => return cmd_check(),
        Some("--help") | Some("-h") | Some("help") | None => {
            println!("{}", USAGE);
            return ExitCode::SUCCESS;
        }
        Some(other) => Err(Error::Config(format!(
            "unknown subcommand {:?}; try --help",
            other
        ))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err);
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
