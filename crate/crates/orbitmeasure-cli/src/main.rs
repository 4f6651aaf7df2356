//! Command-line front end: evaluate joint densities on parameter grids,
//! run the verification suite, draw radial samples, and check the radial
//! integration identity. Outputs are plot-ready CSV or versioned JSON.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use orbitmeasure::ensemble::{joint_density, EnsembleSpec};
use orbitmeasure::instances::{build_instance, declared_degree, descriptor, InstanceParams};
use orbitmeasure::tol::Tolerances;
use orbitmeasure::validation::{integration_check, sample, verify_suite};

#[derive(Parser)]
#[command(
    name = "orbitmeasure",
    version,
    about = "Joint eigenvalue densities of matrix ensembles and their verification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print instance dimensions (ambient, complement, chart, degree) as JSON.
    Info(InfoArgs),
    /// Evaluate the joint density over a parameter grid.
    Density(DensityArgs),
    /// Run the verification suite and write a JSON report.
    Verify(VerifyArgs),
    /// Draw matrix samples and write their ordered radial parts.
    Sample(SampleArgs),
    /// Check the radial integration identity for an invariant function.
    Integrate(IntegrateArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Registered instance key, e.g. gaussian-beta2.
    instance: String,
    /// Matrix size (taller block for the chiral family).
    #[arg(long)]
    n: Option<usize>,
    /// Wishart degrees of freedom, or the smaller chiral block.
    #[arg(long)]
    m: Option<usize>,
    /// Cross-check: fail unless the instance has this Dyson index.
    #[arg(long)]
    beta: Option<u8>,
    /// TOML config file; command-line flags take precedence over it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (defaults to standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; defaults to csv for grids and samples, json for reports.
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Seed for every randomized step.
    #[arg(long)]
    seed: Option<u64>,
    /// Tolerance override, repeatable: --tol name=value with names matching
    /// the config file's [tolerances] keys (e.g. --tol rank_rel=1e-9).
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    tol: Vec<String>,
}

#[derive(Args)]
struct InfoArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Per-axis grid as min:max:count; give once to apply to every axis or
    /// repeat per chart parameter.
    #[arg(long, value_name = "MIN:MAX:COUNT", allow_hyphen_values = true)]
    grid: Vec<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of random regular points for the condition checks.
    #[arg(long, default_value_t = 100)]
    points: usize,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of samples to draw.
    #[arg(long = "N")]
    count: Option<usize>,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of Monte-Carlo samples.
    #[arg(long = "N")]
    count: Option<usize>,
    /// Invariant test function key: tr-x2, tr-x4 or tr-exp-neg.
    #[arg(long, default_value = "tr-x2")]
    function: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

/// Optional file-backed configuration; every field can be superseded by a
/// command-line flag.
#[derive(Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    n: Option<usize>,
    m: Option<usize>,
    beta: Option<u8>,
    seed: Option<u64>,
    #[serde(rename = "N")]
    count: Option<usize>,
    points: Option<usize>,
    function: Option<String>,
    format: Option<String>,
    out: Option<PathBuf>,
    grid: Option<Vec<String>>,
    tolerances: Option<toml::value::Table>,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<orbitmeasure::Error> for Failure {
    fn from(e: orbitmeasure::Error) -> Self {
        Failure::config(e.to_string())
    }
}

/// Everything resolved: flags over config file over defaults.
struct Resolved {
    instance: String,
    params: InstanceParams,
    seed: u64,
    count: Option<usize>,
    points: Option<usize>,
    function: Option<String>,
    format: Option<OutputFormat>,
    out: Option<PathBuf>,
    grid: Vec<String>,
    tol: Tolerances,
}

fn load_config(path: &PathBuf) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::config(format!("{}: {e}", path.display())))
}

/// Apply `name=value` overrides onto the tolerance set by round-tripping
/// through its serialized table, so every field is reachable by name.
fn apply_tolerance_patch(
    tol: Tolerances,
    patch: &toml::value::Table,
) -> Result<Tolerances, Failure> {
    let mut table = toml::value::Table::try_from(&tol)
        .map_err(|e| Failure::config(format!("tolerance serialization: {e}")))?;
    for (key, value) in patch {
        if !table.contains_key(key) {
            return Err(Failure::config(format!("unknown tolerance key: {key}")));
        }
        table.insert(key.clone(), value.clone());
    }
    toml::Value::Table(table)
        .try_into()
        .map_err(|e| Failure::config(format!("tolerance override: {e}")))
}

fn parse_tol_flag(raw: &str) -> Result<(String, toml::Value), Failure> {
    let (name, value) = raw
        .split_once('=')
        .ok_or_else(|| Failure::config(format!("--tol expects name=value, got {raw}")))?;
    let doc: toml::value::Table = toml::from_str(&format!("v = {value}"))
        .map_err(|e| Failure::config(format!("--tol {name}: {e}")))?;
    Ok((name.to_string(), doc["v"].clone()))
}

fn resolve(common: &CommonArgs, extra: ResolvedExtras) -> Result<Resolved, Failure> {
    let file = match &common.config {
        Some(path) => load_config(path)?,
        None => FileConfig::default(),
    };

    let mut tol = Tolerances::default();
    if let Some(patch) = &file.tolerances {
        tol = apply_tolerance_patch(tol, patch)?;
    }
    if !common.tol.is_empty() {
        let mut patch = toml::value::Table::new();
        for raw in &common.tol {
            let (name, value) = parse_tol_flag(raw)?;
            patch.insert(name, value);
        }
        tol = apply_tolerance_patch(tol, &patch)?;
    }

    let format = match (common.format, file.format.as_deref()) {
        (Some(f), _) => Some(f),
        (None, Some("csv")) => Some(OutputFormat::Csv),
        (None, Some("json")) => Some(OutputFormat::Json),
        (None, Some(other)) => {
            return Err(Failure::config(format!(
                "unknown format in config: {other}"
            )))
        }
        (None, None) => None,
    };

    let params = InstanceParams {
        n: common.n.or(file.n),
        m: common.m.or(file.m),
    };

    // The Dyson index is redundant with the instance key; accept it only as
    // a consistency check.
    if let Some(requested) = common.beta.or(file.beta) {
        let desc = descriptor(&common.instance)?;
        match desc.beta {
            Some(b) if b == requested => {}
            Some(b) => {
                return Err(Failure::config(format!(
                    "{} has beta={b}, not beta={requested}",
                    common.instance
                )))
            }
            None => {
                return Err(Failure::config(format!(
                    "{} has no Dyson index to match --beta",
                    common.instance
                )))
            }
        }
    }

    Ok(Resolved {
        instance: common.instance.clone(),
        params,
        seed: common.seed.or(file.seed).unwrap_or(0),
        count: extra.count.or(file.count),
        points: extra.points.or(file.points),
        function: extra.function.or(file.function),
        format,
        out: common.out.clone().or(file.out),
        grid: if extra.grid.is_empty() {
            file.grid.unwrap_or_default()
        } else {
            extra.grid
        },
        tol,
    })
}

#[derive(Default)]
struct ResolvedExtras {
    count: Option<usize>,
    points: Option<usize>,
    function: Option<String>,
    grid: Vec<String>,
}

fn build(resolved: &Resolved) -> Result<EnsembleSpec, Failure> {
    Ok(build_instance(
        &resolved.instance,
        &resolved.params,
        &resolved.tol,
    )?)
}

fn write_output(out: &Option<PathBuf>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, content)
            .map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn require_format(
    resolved: &Resolved,
    default: OutputFormat,
    allowed_csv: bool,
) -> Result<OutputFormat, Failure> {
    let format = resolved.format.unwrap_or(default);
    if format == OutputFormat::Csv && !allowed_csv {
        return Err(Failure::config(
            "this command writes JSON reports; csv is not available",
        ));
    }
    Ok(format)
}

fn parse_grid_axes(resolved: &Resolved, r: usize) -> Result<Vec<Vec<f64>>, Failure> {
    if resolved.grid.is_empty() {
        return Err(Failure::config(
            "density needs --grid min:max:count (repeat per axis or give once for all)",
        ));
    }
    let specs: Vec<&String> = if resolved.grid.len() == 1 {
        vec![&resolved.grid[0]; r]
    } else if resolved.grid.len() == r {
        resolved.grid.iter().collect()
    } else {
        return Err(Failure::config(format!(
            "{} grid axes given for {} chart parameters",
            resolved.grid.len(),
            r
        )));
    };
    let mut axes = Vec::with_capacity(r);
    for spec in specs {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(Failure::config(format!(
                "grid axis must be min:max:count, got {spec}"
            )));
        }
        let lo: f64 = parts[0]
            .parse()
            .map_err(|_| Failure::config(format!("bad grid minimum: {}", parts[0])))?;
        let hi: f64 = parts[1]
            .parse()
            .map_err(|_| Failure::config(format!("bad grid maximum: {}", parts[1])))?;
        let count: usize = parts[2]
            .parse()
            .map_err(|_| Failure::config(format!("bad grid count: {}", parts[2])))?;
        if count < 2 {
            return Err(Failure::config("grid count must be at least 2 per axis"));
        }
        if !lo.is_finite() || !hi.is_finite() || hi <= lo {
            return Err(Failure::config(format!(
                "grid maximum must exceed minimum, got {spec}"
            )));
        }
        axes.push(
            (0..count)
                .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
                .collect(),
        );
    }
    Ok(axes)
}

fn run_info(args: &InfoArgs) -> Result<u8, Failure> {
    let resolved = resolve(&args.common, ResolvedExtras::default())?;
    require_format(&resolved, OutputFormat::Json, false)?;
    let spec = build(&resolved)?;
    let degree = declared_degree(&resolved.instance, &resolved.params)?;
    #[derive(serde::Serialize)]
    struct Info {
        #[serde(rename = "dimX")]
        dim_x: usize,
        #[serde(rename = "dimL")]
        dim_l: usize,
        r: usize,
        d: usize,
    }
    let info = Info {
        dim_x: spec.dim_x(),
        dim_l: spec.split().l_dim(),
        r: spec.chart().r,
        d: degree,
    };
    let line = serde_json::to_string(&info).expect("info serialization");
    write_output(&resolved.out, &format!("{line}\n"))?;
    Ok(0)
}

fn fmt_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn run_density(args: &DensityArgs) -> Result<u8, Failure> {
    let resolved = resolve(
        &args.common,
        ResolvedExtras {
            grid: args.grid.clone(),
            ..Default::default()
        },
    )?;
    let format = require_format(&resolved, OutputFormat::Csv, true)?;
    let spec = build(&resolved)?;
    let r = spec.chart().r;
    let axes = parse_grid_axes(&resolved, r)?;

    let mut columns: Vec<String> = (1..=r).map(|i| format!("t_{i}")).collect();
    columns.extend(
        ["J", "p", "density-intrinsic", "density-chart"]
            .iter()
            .map(|s| s.to_string()),
    );

    let total: usize = axes.iter().map(|a| a.len()).product();
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(total);
    let mut idx = vec![0usize; r];
    for _ in 0..total {
        let t: Vec<f64> = idx.iter().enumerate().map(|(a, &i)| axes[a][i]).collect();
        let eval = joint_density(&spec, &t, &resolved.tol)
            .map_err(|e| Failure::config(format!("density at {t:?}: {e}")))?;
        let mut row = t;
        row.push(eval.jacobian);
        row.push(eval.weight);
        row.push(eval.density);
        row.push(eval.density_chart);
        rows.push(row);
        // Advance the lexicographic index (last axis fastest).
        for axis in (0..r).rev() {
            idx[axis] += 1;
            if idx[axis] < axes[axis].len() {
                break;
            }
            idx[axis] = 0;
        }
    }

    let content = match format {
        OutputFormat::Csv => {
            let mut text = columns.join(",");
            text.push('\n');
            for row in &rows {
                let line: Vec<String> = row.iter().map(|v| fmt_float(*v)).collect();
                text.push_str(&line.join(","));
                text.push('\n');
            }
            text
        }
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            struct Grid<'a> {
                schema: &'a str,
                instance: &'a str,
                columns: &'a [String],
                rows: &'a [Vec<f64>],
            }
            let mut text = serde_json::to_string_pretty(&Grid {
                schema: "1",
                instance: spec.name(),
                columns: &columns,
                rows: &rows,
            })
            .expect("grid serialization");
            text.push('\n');
            text
        }
    };
    write_output(&resolved.out, &content)?;
    Ok(0)
}

fn run_verify(args: &VerifyArgs) -> Result<u8, Failure> {
    let resolved = resolve(
        &args.common,
        ResolvedExtras {
            points: Some(args.points),
            ..Default::default()
        },
    )?;
    require_format(&resolved, OutputFormat::Json, false)?;
    let spec = build(&resolved)?;
    let points = resolved.points.unwrap_or(100);
    if points == 0 {
        return Err(Failure::config("verify needs at least one point"));
    }
    let report = verify_suite(&spec, points, resolved.seed, &resolved.tol)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serialization");
    text.push('\n');
    write_output(&resolved.out, &text)?;
    Ok(if report.all_pass { 0 } else { 1 })
}

fn run_sample(args: &SampleArgs) -> Result<u8, Failure> {
    let resolved = resolve(
        &args.common,
        ResolvedExtras {
            count: args.count,
            ..Default::default()
        },
    )?;
    let format = require_format(&resolved, OutputFormat::Csv, true)?;
    let spec = build(&resolved)?;
    let count = resolved.count.unwrap_or(10_000);
    let batch = sample(&spec, count, resolved.seed)?;
    let r = spec.chart().r;
    let content = match format {
        OutputFormat::Csv => {
            let mut text = (1..=r)
                .map(|i| format!("t_{i}"))
                .collect::<Vec<_>>()
                .join(",");
            text.push('\n');
            for t in &batch.samples {
                let mut line = String::new();
                for (j, v) in t.iter().enumerate() {
                    if j > 0 {
                        line.push(',');
                    }
                    let _ = write!(line, "{v:.16e}");
                }
                text.push_str(&line);
                text.push('\n');
            }
            text
        }
        OutputFormat::Json => {
            #[derive(serde::Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Samples<'a> {
                schema: &'a str,
                instance: &'a str,
                count: usize,
                seed: u64,
                samples: &'a [Vec<f64>],
            }
            let mut text = serde_json::to_string_pretty(&Samples {
                schema: "1",
                instance: &batch.instance,
                count: batch.count,
                seed: batch.seed,
                samples: &batch.samples,
            })
            .expect("sample serialization");
            text.push('\n');
            text
        }
    };
    write_output(&resolved.out, &content)?;
    Ok(0)
}

fn run_integrate(args: &IntegrateArgs) -> Result<u8, Failure> {
    let resolved = resolve(
        &args.common,
        ResolvedExtras {
            count: args.count,
            function: Some(args.function.clone()),
            ..Default::default()
        },
    )?;
    require_format(&resolved, OutputFormat::Json, false)?;
    let spec = build(&resolved)?;
    let count = resolved.count.unwrap_or(100_000);
    let function = resolved.function.as_deref().unwrap_or("tr-x2");
    let report = integration_check(&spec, function, count, resolved.seed, &resolved.tol)?;
    let mut text = serde_json::to_string_pretty(&report).expect("report serialization");
    text.push('\n');
    write_output(&resolved.out, &text)?;
    Ok(if report.pass { 0 } else { 1 })
}

fn run() -> Result<u8, Failure> {
    if let Ok(threads) = std::env::var("ORBITMEASURE_THREADS") {
        let threads: usize = threads.parse().map_err(|_| {
            Failure::config(format!("ORBITMEASURE_THREADS={threads} is not a number"))
        })?;
        if threads == 0 {
            return Err(Failure::config("ORBITMEASURE_THREADS must be at least 1"));
        }
        // Ignore the error if a pool already exists (e.g. repeated calls in
        // tests within one process).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let cli = Cli::parse();
    match &cli.command {
        Command::Info(args) => run_info(args),
        Command::Density(args) => run_density(args),
        Command::Verify(args) => run_verify(args),
        Command::Sample(args) => run_sample(args),
        Command::Integrate(args) => run_integrate(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("orbitmeasure: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
