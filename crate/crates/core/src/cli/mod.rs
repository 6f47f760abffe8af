//! `plp-blindspot` command-line front end.
//!
//! Data goes to standard output, diagnostics to standard error. Exit codes:
//! 0 success, 2 usage error, 3 numerical failure, 4 I/O failure.

mod args;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Parser;

use crate::analytic;
use crate::config::ScenarioConfig;
use crate::error::{invalid, Error, Result};
use crate::report::{format_probability, rows_to_csv, sha256_hex, RunManifest};
use crate::simulator::{self, Method, SweepVariable};

pub use args::{AnalyticCommand, Cli, Command, DesignArgs, ScenarioArgs, SimulateArgs, SweepArgs, ValidateCellsArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidArgument(_) => EXIT_USAGE,
        Error::NumericalFailure(_) => EXIT_NUMERICAL,
        Error::Io(_) => EXIT_IO,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let command_line: Vec<String> = args.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let result = execute(&cli, &command_line, &mut stdout.lock(), &mut stderr.lock());
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn execute(cli: &Cli, command_line: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Analytic { quantity } => cmd_analytic(quantity, out, err),
        Command::Simulate(a) => cmd_simulate(a, out, err),
        Command::Sweep(a) => cmd_sweep(a, command_line, out, err),
        Command::Design(a) => cmd_design(a, out),
        Command::ValidateCells(a) => cmd_validate_cells(a, out, err),
    }
}

/// Loads `--config` if given, then applies explicit flags on top.
pub fn resolve_config(args: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)?;
            serde_json::from_str::<ScenarioConfig>(&text)
                .map_err(|e| invalid(format!("config file {}: {e}", path.display())))?
        }
        None => ScenarioConfig::default(),
    };
    if let Some(v) = args.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = args.lambda0 {
        cfg.lambda0 = v;
    }
    if let Some(v) = args.range {
        cfg.range = v;
    }
    if args.infinite {
        cfg.length = crate::ObstacleLength::Infinite;
    } else if let Some(l) = &args.length {
        cfg.length = l.parse()?;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.epsilon {
        cfg.epsilon = v;
    }
    if let Some(v) = args.delta {
        cfg.delta = v;
    }
    if let Some(v) = args.kmin {
        cfg.k_min = v;
    }
    if let Some(v) = args.area_draws {
        cfg.area_draws = v;
    }
    if let Some(v) = args.area_probes {
        cfg.area_probes = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match threads {
        None => job(),
        Some(0) => Err(invalid("--threads must be >= 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::NumericalFailure(format!("cannot start thread pool: {e}")))?
            .install(job),
    }
}

fn warn_containment(cfg: &ScenarioConfig, err: &mut dyn Write) -> Result<bool> {
    let escape = analytic::visibility_probability(cfg.range, cfg.lambda0)?;
    if escape >= cfg.delta {
        let needed = analytic::min_lambda0_for_delta(cfg.range, cfg.delta)?;
        writeln!(
            err,
            "warning: containment criterion not met: exp(-lambda0*pi*R^2/4) = {escape:e} >= delta = {:e} (lambda0 {} < {needed:.6})",
            cfg.delta, cfg.lambda0
        )?;
        return Ok(false);
    }
    Ok(true)
}

fn cmd_analytic(cmd: &AnalyticCommand, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cmd {
        AnalyticCommand::Asymptotic(s) => {
            let cfg = resolve_config(s)?;
            warn_containment(&cfg, err)?;
            let b = analytic::asymptotic_blindspot(cfg.lambda, cfg.lambda0, cfg.k_min)?;
            writeln!(out, "{}", format_probability(b))?;
        }
        AnalyticCommand::Independent(s) => {
            let cfg = resolve_config(s)?;
            warn_containment(&cfg, err)?;
            let b = analytic::independent_blindspot_lines(cfg.lambda, cfg.lambda0, cfg.range, cfg.k_min)?;
            writeln!(out, "{}", format_probability(b))?;
        }
        AnalyticCommand::IndependentSegments { scenario, mean_area } => {
            let cfg = resolve_config(scenario)?;
            let length = match cfg.length {
                crate::ObstacleLength::Finite(l) => l,
                crate::ObstacleLength::Infinite => {
                    return Err(invalid("independent-segments needs a finite --length"));
                }
            };
            let area = match mean_area {
                Some(a) => *a,
                None => {
                    let est = with_threads(scenario.threads, || {
                        simulator::estimate_mean_unshadowed_area(
                            cfg.lambda0,
                            cfg.length,
                            cfg.range,
                            cfg.area_draws,
                            cfg.area_probes,
                            cfg.seed,
                        )
                    })?;
                    writeln!(
                        err,
                        "estimated mean unshadowed area {} (stderr {})",
                        est.value, est.stderr
                    )?;
                    est.value
                }
            };
            let b =
                analytic::independent_blindspot_segments(cfg.lambda, cfg.lambda0, length, cfg.range, cfg.k_min, area)?;
            writeln!(out, "{}", format_probability(b))?;
        }
        AnalyticCommand::Conditional { scenario, area } => {
            let cfg = resolve_config(scenario)?;
            let b = analytic::conditional_blindspot(cfg.lambda, *area, cfg.k_min)?;
            writeln!(out, "{}", format_probability(b))?;
        }
        AnalyticCommand::Visibility { scenario, distance } => {
            let cfg = resolve_config(scenario)?;
            let r = distance.unwrap_or(cfg.range);
            writeln!(
                out,
                "{}",
                format_probability(analytic::visibility_probability(r, cfg.lambda0)?)
            )?;
        }
        AnalyticCommand::MeanArea(s) => {
            let cfg = resolve_config(s)?;
            let (area, count) = analytic::mean_visible_area_lines(cfg.lambda, cfg.lambda0, cfg.range)?;
            writeln!(out, "mean_visible_area {area:.9e}")?;
            writeln!(out, "mean_visible_anchors {count:.9e}")?;
        }
        AnalyticCommand::CheckDelta(s) => {
            let cfg = resolve_config(s)?;
            let needed = analytic::min_lambda0_for_delta(cfg.range, cfg.delta)?;
            let escape = analytic::visibility_probability(cfg.range, cfg.lambda0)?;
            let ok = warn_containment(&cfg, err)?;
            writeln!(out, "min_lambda0 {needed:.9e}")?;
            writeln!(out, "escape_probability {}", format_probability(escape))?;
            writeln!(out, "criterion_met {ok}")?;
        }
    }
    Ok(())
}

fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = resolve_config(&a.scenario)?;
    if cfg.length.is_infinite() {
        warn_containment(&cfg, err)?;
    }
    let est = with_threads(a.scenario.threads, || {
        simulator::estimate_blindspot(&cfg, cfg.trials, cfg.seed)
    })?;
    let (lo, hi) = est.ci95();
    writeln!(out, "value {}", format_probability(est.value))?;
    writeln!(out, "stderr {}", format_probability(est.stderr))?;
    writeln!(
        out,
        "ci95 {} {}",
        format_probability(lo.max(0.0)),
        format_probability(hi.min(1.0))
    )?;
    writeln!(out, "n_trials {}", est.n_trials)?;
    writeln!(out, "seed {}", est.master_seed)?;
    if let Some(path) = &a.out {
        let row = crate::report::SweepRow {
            method: Method::Mc.name().to_string(),
            lambda: cfg.lambda,
            lambda0: cfg.lambda0,
            length: cfg.length,
            range: cfg.range,
            k_min: cfg.k_min,
            value: est.value,
            stderr: Some(est.stderr),
            n_trials: Some(est.n_trials),
            seed: Some(est.master_seed),
        };
        write_output(path, rows_to_csv(&[row]).as_bytes(), out)?;
    }
    Ok(())
}

fn write_output(path: &Path, bytes: &[u8], out: &mut dyn Write) -> Result<()> {
    if path.as_os_str() == "-" {
        out.write_all(bytes)?;
    } else {
        fs::write(path, bytes)?;
    }
    Ok(())
}

fn parse_values(a: &SweepArgs) -> Result<Vec<f64>> {
    let values: Vec<f64> = match (&a.values, &a.linspace) {
        (Some(list), None) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                if s.eq_ignore_ascii_case("inf") {
                    Ok(f64::INFINITY)
                } else {
                    s.parse::<f64>()
                        .map_err(|_| invalid(format!("cannot parse sweep value {s:?}")))
                }
            })
            .collect::<Result<_>>()?,
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(invalid("--linspace expects start,stop,count"));
            }
            let start: f64 = parts[0].parse().map_err(|_| invalid("bad linspace start"))?;
            let stop: f64 = parts[1].parse().map_err(|_| invalid("bad linspace stop"))?;
            let count: usize = parts[2].parse().map_err(|_| invalid("bad linspace count"))?;
            linspace(start, stop, count)
        }
        (None, None) => return Err(invalid("sweep needs --values or --linspace")),
        (Some(_), Some(_)) => return Err(invalid("--values and --linspace are mutually exclusive")),
    };
    if values.is_empty() {
        return Err(invalid("sweep value list is empty"));
    }
    Ok(values)
}

/// Evenly spaced values rounded to 12 significant digits.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let round = |x: f64| format!("{x:.11e}").parse::<f64>().unwrap_or(x);
    match count {
        0 => Vec::new(),
        1 => vec![round(start)],
        n => (0..n)
            .map(|i| round(start + (stop - start) * i as f64 / (n - 1) as f64))
            .collect(),
    }
}

fn cmd_sweep(a: &SweepArgs, command_line: &[String], out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let started = Instant::now();
    let started_at = chrono::Utc::now().to_rfc3339();
    let cfg = resolve_config(&a.scenario)?;
    let variable: SweepVariable = a.variable.parse()?;
    let values = parse_values(a)?;
    let methods: Vec<Method> = a
        .methods
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if variable == SweepVariable::Lambda || cfg.length.is_infinite() {
        warn_containment(&cfg, err)?;
    }

    let rows = with_threads(a.scenario.threads, || {
        simulator::run_sweep(&cfg, variable, &values, &methods, cfg.trials, cfg.seed)
    })?;
    let csv = rows_to_csv(&rows);
    write_output(&a.out, csv.as_bytes(), out)?;

    if a.out.as_os_str() != "-" {
        let manifest = RunManifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command_line.to_vec(),
            resolved_config: cfg.clone(),
            sweep: serde_json::json!({
                "variable": a.variable,
                "values": values.iter().map(|v| if v.is_infinite() { serde_json::json!("inf") } else { serde_json::json!(v) }).collect::<Vec<_>>(),
                "methods": methods,
            }),
            started_at,
            duration_s: started.elapsed().as_secs_f64(),
            rows_written: rows.len(),
            output_sha256: sha256_hex(csv.as_bytes()),
        };
        let mut path = a.out.clone().into_os_string();
        path.push(".manifest.json");
        let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Io(e.into()))?;
        fs::write(PathBuf::from(path), json + "\n")?;
    }
    writeln!(err, "wrote {} rows", rows.len())?;
    Ok(())
}

fn cmd_design(a: &DesignArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = resolve_config(&a.scenario)?;
    let design = analytic::design_anchor_intensity(cfg.lambda0, cfg.epsilon, cfg.k_min)?;
    writeln!(out, "lambda_star {:.12e}", design.lambda)?;
    writeln!(out, "achieved_b_as {}", format_probability(design.achieved))?;
    writeln!(out, "abs_error {:.3e}", (design.achieved - cfg.epsilon).abs())?;
    Ok(())
}

fn cmd_validate_cells(a: &ValidateCellsArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let cfg = resolve_config(&a.scenario)?;
    if !(cfg.lambda0 > 0.0) {
        return Err(invalid("validate-cells requires lambda0 > 0"));
    }
    let n = a.samples.unwrap_or(cfg.trials);
    if n < 1 {
        return Err(invalid("--samples must be >= 1"));
    }
    let sample = with_threads(a.scenario.threads, || {
        simulator::sample_cell_areas(cfg.lambda0, n, cfg.seed)
    })?;
    let lambda0 = cfg.lambda0;
    let ks = simulator::ks_statistic(&sample.areas, |x| {
        analytic::gamma_cell_area_cdf(x, lambda0).unwrap_or(f64::NAN)
    });
    let target = 4.0 / lambda0;
    let mean = sample.mean();

    let mut summary = String::new();
    use std::fmt::Write as _;
    let _ = writeln!(summary, "n_samples {}", sample.areas.len());
    let _ = writeln!(summary, "n_discarded {}", sample.n_discarded);
    let _ = writeln!(summary, "discard_fraction {:.6e}", sample.discard_fraction());
    let _ = writeln!(summary, "mean_area {mean:.9e}");
    let _ = writeln!(summary, "target_mean_area {target:.9e}");
    let _ = writeln!(summary, "relative_error {:.6e}", (mean - target) / target);
    let _ = writeln!(summary, "ks_statistic {ks:.6e}");

    match &a.out {
        Some(path) => {
            let mut csv = String::with_capacity(24 * (sample.areas.len() + 1));
            csv.push_str("area\n");
            for area in &sample.areas {
                let _ = writeln!(csv, "{area:.12e}");
            }
            write_output(path, csv.as_bytes(), out)?;
            if path.as_os_str() == "-" {
                err.write_all(summary.as_bytes())?;
            } else {
                out.write_all(summary.as_bytes())?;
            }
        }
        None => out.write_all(summary.as_bytes())?,
    }
    Ok(())
}
