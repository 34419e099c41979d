//! `edpp`: verification suites, exact sampling, kernel/intensity grids, and
//! plasma/limit computations for the doubly periodic determinantal point
//! processes.
//!
//! Exit codes: 0 on success, 1 on a failed verification or I/O error,
//! 2 on usage errors.

mod output;

use elliptic_dpp::dpp::KernelContext;
use elliptic_dpp::limits::{self, LimitClass, StripParams};
use elliptic_dpp::plasma::{self, SolvableFamily};
use elliptic_dpp::root_system::{DomainGeometry, Family, RootSystemSpec};
use elliptic_dpp::sampler::{self, SamplerOptions};
use elliptic_dpp::suites::Suite;
use elliptic_dpp::Complex64;
use output::RunReport;
use serde::Serialize;
use std::collections::HashMap;
use std::process::ExitCode;
use std::time::Instant;

const USAGE: &str = "\
edpp: doubly periodic determinantal point processes

USAGE:
  edpp verify --suite <theta|macdonald|ortho|partition|dpp|plasma|identities|limits|all>
              [--seed <u64>] [--tol <f64>] [--out <report.json>]
  edpp sample --family <A|B|Bv|C|Cv|BC|D> --n <N> --length <L> --width <W>
              --count <C> --seed <u64> --out <samples.json>
  edpp kernel --family <F> --n <N> --length <L> --width <W> --grid <G>
              --out <grid.csv> [--plot <heatmap.svg>]
  edpp plasma --family <A|C|D> --n <N> --length <L> --width <W> [--out <report.json>]
  edpp limits --class <A|B|C|D> --rho <f64> --width <f64>
              --mode <kernel|scan_n|scan_w> --out <table.csv>

Exit codes: 0 success / all checks passed, 1 failure, 2 usage error.";

enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Failure(_) => ExitCode::from(1),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

fn usage_err(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

type CliResult = Result<(), CliError>;


/// Prints a line, exiting quietly if the consumer closed the pipe.
fn emit(line: impl AsRef<str>) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{}", line.as_ref()).is_err() {
        std::process::exit(0);
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            if matches!(err, CliError::Usage(_)) {
                eprintln!("\n{USAGE}");
            }
            err.code()
        }
    }
}

/// Parses `--key value` pairs after the subcommand.
fn parse_flags(args: &[String]) -> Result<HashMap<String, String>, CliError> {
    let mut flags = HashMap::new();
    let mut i = 0;
    while i < args.len() {
        let key = args[i]
            .strip_prefix("--")
            .ok_or_else(|| usage_err(format!("expected a --flag, got {:?}", args[i])))?;
        let value = args
            .get(i + 1)
            .ok_or_else(|| usage_err(format!("flag --{key} needs a value")))?;
        flags.insert(key.to_string(), value.clone());
        i += 2;
    }
    Ok(flags)
}

fn required<'a>(flags: &'a HashMap<String, String>, key: &str) -> Result<&'a str, CliError> {
    flags
        .get(key)
        .map(String::as_str)
        .ok_or_else(|| usage_err(format!("missing required flag --{key}")))
}

fn parse_num<T: std::str::FromStr>(value: &str, what: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| usage_err(format!("could not parse {what} from {value:?}")))
}

fn write_file(path: &str, contents: &str) -> CliResult {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Failure(format!("could not write {path}: {e}")))
}

fn run(args: &[String]) -> CliResult {
    let Some(command) = args.first() else {
        return Err(usage_err("missing subcommand"));
    };
    let flags = parse_flags(&args[1..])?;
    match command.as_str() {
        "verify" => cmd_verify(&flags),
        "sample" => cmd_sample(&flags),
        "kernel" => cmd_kernel(&flags),
        "plasma" => cmd_plasma(&flags),
        "limits" => cmd_limits(&flags),
        "help" | "--help" | "-h" => {
            emit(USAGE);
            Ok(())
        }
        other => Err(usage_err(format!("unknown subcommand {other:?}"))),
    }
}

fn geometry(flags: &HashMap<String, String>) -> Result<DomainGeometry, CliError> {
    let length: f64 = parse_num(required(flags, "length")?, "length")?;
    let width: f64 = parse_num(required(flags, "width")?, "width")?;
    DomainGeometry::new(length, width).map_err(|e| usage_err(e.to_string()))
}

fn cmd_verify(flags: &HashMap<String, String>) -> CliResult {
    let suite_name = required(flags, "suite")?;
    let seed: u64 = match flags.get("seed") {
        Some(v) => parse_num(v, "seed")?,
        None => 0,
    };
    let tol: Option<f64> = match flags.get("tol") {
        Some(v) => Some(parse_num(v, "tol")?),
        None => None,
    };
    let suites: Vec<Suite> = if suite_name == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![Suite::parse(suite_name).map_err(|e| usage_err(e.to_string()))?]
    };

    let mut reports = Vec::new();
    for suite in suites {
        let started = Instant::now();
        let mut report = suite.run(seed);
        if let Some(t) = tol {
            report = report.with_tolerance(t);
        }
        let wall = started.elapsed().as_secs_f64();
        for case in &report.cases {
            emit(format!(
                "{} {:<45} residual {:>12.3e}  tol {:>8.1e}",
                if case.pass { "ok  " } else { "FAIL" },
                format!("[{}] {}", report.suite, case.name),
                case.residual,
                case.tolerance
            ));
        }
        reports.push(RunReport::from_suite(&report, wall));
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let json = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .expect("report serialization");
    if let Some(path) = flags.get("out") {
        write_file(path, &json)?;
    }
    emit(if all_pass { "PASS" } else { "FAIL" });
    if all_pass {
        Ok(())
    } else {
        Err(CliError::Failure("verification failed".into()))
    }
}

fn cmd_sample(flags: &HashMap<String, String>) -> CliResult {
    let family = Family::parse(required(flags, "family")?).map_err(|e| usage_err(e.to_string()))?;
    let n: usize = parse_num(required(flags, "n")?, "n")?;
    let geom = geometry(flags)?;
    let count: usize = parse_num(required(flags, "count")?, "count")?;
    let seed: u64 = parse_num(required(flags, "seed")?, "seed")?;
    let out = required(flags, "out")?;

    let spec = RootSystemSpec::new(family, n).map_err(|e| usage_err(e.to_string()))?;
    let ctx = KernelContext::new(spec, geom);
    let opts = SamplerOptions::new(seed);
    let samples = sampler::sample_many(&ctx, &opts, count)
        .map_err(|e| CliError::Failure(e.to_string()))?;
    let json = output::sample_json(
        family.label(),
        n,
        geom.length(),
        geom.width(),
        seed,
        &samples,
    );
    write_file(out, &json)?;
    emit(format!(
        "wrote {count} configurations of {n} points ({}) to {out}",
        family.label()
    ));
    Ok(())
}

fn cmd_kernel(flags: &HashMap<String, String>) -> CliResult {
    let family = Family::parse(required(flags, "family")?).map_err(|e| usage_err(e.to_string()))?;
    let n: usize = parse_num(required(flags, "n")?, "n")?;
    let geom = geometry(flags)?;
    let grid: usize = parse_num(required(flags, "grid")?, "grid")?;
    if grid < 2 {
        return Err(usage_err("grid must be at least 2"));
    }
    let out = required(flags, "out")?;

    let spec = RootSystemSpec::new(family, n).map_err(|e| usage_err(e.to_string()))?;
    let ctx = KernelContext::new(spec, geom);
    // Inclusive (grid+1)² lattice so both period edges appear in the file.
    let mut rows = Vec::with_capacity((grid + 1) * (grid + 1));
    let mut values = Vec::with_capacity((grid + 1) * (grid + 1));
    for iy in 0..=grid {
        let y = geom.width() * iy as f64 / grid as f64;
        for ix in 0..=grid {
            let x = geom.length() * ix as f64 / grid as f64;
            let v = ctx.intensity(Complex64::new(x, y));
            rows.push((x, y, v));
            values.push(v);
        }
    }
    write_file(out, &output::csv_grid(&rows))?;
    if let Some(plot) = flags.get("plot") {
        let svg = output::svg_heatmap(
            grid + 1,
            grid + 1,
            &values,
            &format!("intensity {} N={n}", family.label()),
        );
        write_file(plot, &svg)?;
    }
    emit(format!("wrote {}x{} intensity grid to {out}", grid + 1, grid + 1));
    Ok(())
}

#[derive(Serialize)]
struct PlasmaReport {
    family: String,
    n: usize,
    length: f64,
    width: f64,
    log_partition: f64,
    partition: f64,
    f_exact: f64,
    f0: f64,
    f1: f64,
    has_log_term: bool,
    expansion_residual: f64,
    gff: GffBlock,
}

#[derive(Serialize)]
struct GffBlock {
    f_nonzero_modes: f64,
    f_full: f64,
    f1_a_residual: f64,
    modular_residual: f64,
    f1_c_minus_gff: f64,
    f1_c_minus_gff_closed: f64,
    f1_d_minus_gff: f64,
    f1_d_minus_gff_closed: f64,
}

fn cmd_plasma(flags: &HashMap<String, String>) -> CliResult {
    let family =
        SolvableFamily::parse(required(flags, "family")?).map_err(|e| usage_err(e.to_string()))?;
    let n: usize = parse_num(required(flags, "n")?, "n")?;
    let geom = geometry(flags)?;
    let log_z = plasma::log_plasma_partition(family, geom, n).map_err(|e| usage_err(e.to_string()))?;
    let expansion =
        plasma::free_energy_expansion(family, geom, n).map_err(|e| usage_err(e.to_string()))?;
    let gff = plasma::gff_comparison(geom, n).map_err(|e| usage_err(e.to_string()))?;
    let report = PlasmaReport {
        family: family.label().to_string(),
        n,
        length: geom.length(),
        width: geom.width(),
        log_partition: log_z,
        partition: log_z.exp(),
        f_exact: expansion.f_exact,
        f0: expansion.f0,
        f1: expansion.f1,
        has_log_term: expansion.has_log_term,
        expansion_residual: expansion.residual,
        gff: GffBlock {
            f_nonzero_modes: gff.f_nonzero_modes,
            f_full: gff.f_full,
            f1_a_residual: gff.f1_a_residual,
            modular_residual: gff.modular_residual,
            f1_c_minus_gff: gff.f1_c_minus_gff,
            f1_c_minus_gff_closed: gff.f1_c_minus_gff_closed,
            f1_d_minus_gff: gff.f1_d_minus_gff,
            f1_d_minus_gff_closed: gff.f1_d_minus_gff_closed,
        },
    };
    let json = serde_json::to_string_pretty(&report).expect("report serialization");
    if let Some(path) = flags.get("out") {
        write_file(path, &json)?;
    }
    emit(&json);
    Ok(())
}

fn cmd_limits(flags: &HashMap<String, String>) -> CliResult {
    let class =
        LimitClass::parse(required(flags, "class")?).map_err(|e| usage_err(e.to_string()))?;
    let rho: f64 = parse_num(required(flags, "rho")?, "rho")?;
    let width: f64 = parse_num(required(flags, "width")?, "width")?;
    let mode = required(flags, "mode")?;
    let out = required(flags, "out")?;
    let p = StripParams::new(rho, width).map_err(|e| usage_err(e.to_string()))?;

    match mode {
        "kernel" => {
            let grid = 48usize;
            let mut rows = Vec::new();
            for iy in 0..=grid {
                let y = width * iy as f64 / grid as f64;
                for ix in 0..=grid {
                    let x = ix as f64 / grid as f64;
                    let v = limits::strip_density(class, p, Complex64::new(x, y))
                        .map_err(|e| CliError::Failure(e.to_string()))?;
                    rows.push((x, y, v));
                }
            }
            write_file(out, &output::csv_grid(&rows))?;
        }
        "scan_n" => {
            let family = match class {
                LimitClass::A => Family::A,
                LimitClass::B => Family::B,
                LimitClass::C => Family::C,
                LimitClass::D => Family::D,
            };
            let n_values: Vec<usize> = [2usize, 3, 4, 6, 8, 16, 32, 64]
                .iter()
                .copied()
                .filter(|&n| n >= family.min_particles())
                .collect();
            let pairs = limits::default_test_pairs(p, 1);
            let errors = limits::finite_to_strip_scan(family, &n_values, p, &pairs)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let rows: Vec<(f64, f64)> = n_values
                .iter()
                .zip(&errors)
                .map(|(&n, &e)| (n as f64, e))
                .collect();
            write_file(out, &output::csv_scan(("n", "sup_error"), &rows))?;
        }
        "scan_w" => {
            let w_values = [1.0, 1.5, 2.0, 3.0, 4.0];
            let pairs: Vec<(Complex64, Complex64)> =
                limits::default_test_pairs(StripParams::new(rho, 1.0).unwrap(), 1)
                    .into_iter()
                    .take(8)
                    .collect();
            let errors = limits::strip_to_ginibre_scan(class, rho, &w_values, &pairs)
                .map_err(|e| CliError::Failure(e.to_string()))?;
            let rows: Vec<(f64, f64)> = w_values
                .iter()
                .zip(&errors)
                .map(|(&w, &e)| (w, e))
                .collect();
            write_file(out, &output::csv_scan(("w", "sup_error"), &rows))?;
        }
        other => return Err(usage_err(format!("unknown mode {other:?}"))),
    }
    emit(format!("wrote {mode} table to {out}"));
    Ok(())
}
