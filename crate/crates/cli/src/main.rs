//! `hetbell`: command-line driver.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

mod config;
mod output;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use hetbell::analytic::{
    distilled_fidelity_two_rounds, purification_success_probability, werner_components, Fidelity,
};
use hetbell::codes::{build_code, CodeKind};
use hetbell::montecarlo::{run_row, run_table, RunConfig, TableSpec, TABLE_P};
use hetbell::noise::{BellDistribution, MeasurementNoise};
use hetbell::protocols::{BasisOrder, PostselectMode, SchemeKind};

use config::ConfigFile;
use output::{rows_csv, rows_json, Metadata};

/// Invalid flags or configuration; reported with exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

const SEED_ENV: &str = "HETBELL_SEED";

#[derive(Parser, Debug)]
#[command(name = "hetbell", version, about = "Monte Carlo for heterogeneously encoded Bell pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate one configuration and emit one row.
    Run(RunArgs),
    /// Regenerate the numbered sweeps as CSV files.
    Tables(TablesArgs),
    /// Inefficiency vs merged error rate series for plotting.
    Plotdata(PlotArgs),
    /// Sweep the closed-form purification formulas.
    Analytic(AnalyticArgs),
    /// Print an encoder circuit, one gate per line.
    Circuit(CodeArg),
    /// Print the derived generators and logical operators of a code.
    Code(CodeArg),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    /// F = 0.85 with weights 0.85/0.04/0.055/0.055.
    Raw,
    /// Werner state with fidelity --fidelity.
    Werner,
    /// Noise-free Φ⁺.
    Perfect,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

impl std::str::FromStr for Source {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Source as ValueEnum>::from_str(s, true)
    }
}

/// Settings shared by every simulating subcommand. Unset values fall back to
/// the config file, then to built-in defaults.
#[derive(Args, Debug, Clone)]
struct SimArgs {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    trials: Option<u64>,
    /// Master seed; falls back to the config file, then $HETBELL_SEED.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long)]
    jobs: Option<usize>,
    /// basis-compatible or oracle-all.
    #[arg(long)]
    postselect: Option<PostselectMode>,
    /// z-first or x-first.
    #[arg(long)]
    basis_order: Option<BasisOrder>,
    /// pauli or flip.
    #[arg(long)]
    measurement_noise: Option<String>,
    #[arg(long, value_enum)]
    source: Option<Source>,
    /// Fidelity for --source werner.
    #[arg(long)]
    fidelity: Option<f64>,
    #[arg(long)]
    kq_budget_steane: Option<usize>,
    #[arg(long)]
    kq_budget_surface: Option<usize>,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// baseline, before, after or strict.
    #[arg(long)]
    scheme: Option<SchemeKind>,
    /// steane7, surface3 or physical.
    #[arg(long)]
    code_a: Option<CodeKind>,
    #[arg(long)]
    code_b: Option<CodeKind>,
    #[arg(long, allow_negative_numbers = true)]
    rounds: Option<i64>,
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct TablesArgs {
    /// 1 to 6, or all.
    #[arg(long)]
    which: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct PlotArgs {
    #[arg(long)]
    code_a: Option<CodeKind>,
    #[arg(long)]
    code_b: Option<CodeKind>,
    /// Error rates to sweep; defaults to 1e-3, 1e-4 and 1e-5.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    sim: SimArgs,
}

#[derive(Args, Debug)]
struct AnalyticArgs {
    #[arg(long, default_value_t = 0.5)]
    f_min: f64,
    #[arg(long, default_value_t = 1.0)]
    f_max: f64,
    /// Number of intervals; the sweep has steps + 1 points.
    #[arg(long, default_value_t = 50)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CodeArg {
    #[arg(long)]
    code: CodeKind,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if let Some(u) = e.downcast_ref::<UsageError>() {
                eprintln!("error: {u}");
                eprintln!("run `hetbell --help` for usage");
                ExitCode::from(2)
            } else {
                eprintln!("error: {e:#}");
                ExitCode::from(1)
            }
        }
    }
}

fn dispatch(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Run(a) => cmd_run(a),
        Command::Tables(a) => cmd_tables(a),
        Command::Plotdata(a) => cmd_plotdata(a),
        Command::Analytic(a) => cmd_analytic(a),
        Command::Circuit(a) => emit(None, &build_code(a.code).encoder().to_text()),
        Command::Code(a) => emit(None, &build_code(a.code).describe()),
    }
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Resolved shared settings plus where the seed came from.
struct Resolved {
    cfg: RunConfig,
    seed_source: &'static str,
    file: ConfigFile,
}

fn resolve(sim: &SimArgs, base: RunConfig) -> anyhow::Result<Resolved> {
    let file = match &sim.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let mut cfg = base;

    let (seed, seed_source) = match file.pick(sim.seed, "seed")? {
        Some(s) if sim.seed.is_some() => (s, "flag"),
        Some(s) => (s, "config"),
        None => match std::env::var(SEED_ENV) {
            Ok(v) => (
                v.trim()
                    .parse()
                    .map_err(|_| usage(format!("${SEED_ENV} is not an unsigned integer: `{v}`")))?,
                "env",
            ),
            Err(_) => (RunConfig::DEFAULT_SEED, "default"),
        },
    };
    cfg.seed = seed;
    if let Some(t) = file.pick(sim.trials, "trials")? {
        cfg.trials = t;
    }
    if let Some(j) = file.pick(sim.jobs, "jobs")? {
        cfg.jobs = j;
    }
    if let Some(m) = file.pick(sim.postselect, "postselect")? {
        cfg.postselect = m;
    }
    if let Some(b) = file.pick(sim.basis_order, "basis-order")? {
        cfg.basis_order = b;
    }
    if let Some(m) = file.pick(sim.measurement_noise.clone(), "measurement-noise")? {
        cfg.measurement_noise = match m.to_ascii_lowercase().as_str() {
            "pauli" => MeasurementNoise::Pauli,
            "flip" => MeasurementNoise::Flip,
            other => return Err(usage(format!("unknown measurement noise `{other}` (pauli or flip)"))),
        };
    }
    if let Some(b) = file.pick(sim.kq_budget_steane, "kq-budget-steane")? {
        cfg.kq_budget_steane = b;
    }
    if let Some(b) = file.pick(sim.kq_budget_surface, "kq-budget-surface")? {
        cfg.kq_budget_surface = b;
    }
    let fidelity = file.pick(sim.fidelity, "fidelity")?;
    let source = file.pick(sim.source, "source")?.unwrap_or(if fidelity.is_some() {
        Source::Werner
    } else {
        Source::Raw
    });
    cfg.source = match source {
        Source::Raw => BellDistribution::RAW,
        Source::Perfect => BellDistribution::PERFECT,
        Source::Werner => BellDistribution::werner(
            fidelity.ok_or_else(|| usage("--source werner needs --fidelity"))?,
        )
        .map_err(|e| usage(e.to_string()))?,
    };
    Ok(Resolved { cfg, seed_source, file })
}

fn cmd_run(a: RunArgs) -> anyhow::Result<()> {
    let placeholder = RunConfig::new(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 0, 0.0);
    let Resolved { mut cfg, seed_source, file } = resolve(&a.sim, placeholder)?;

    cfg.scheme = file
        .pick(a.scheme, "scheme")?
        .ok_or_else(|| usage("--scheme is required (baseline, before, after or strict)"))?;
    let default_code = if cfg.scheme == SchemeKind::Baseline { CodeKind::Physical } else { CodeKind::Steane7 };
    cfg.code_a = file.pick(a.code_a, "code-a")?.unwrap_or(default_code);
    cfg.code_b = file.pick(a.code_b, "code-b")?.unwrap_or(if cfg.scheme == SchemeKind::Baseline {
        CodeKind::Physical
    } else {
        CodeKind::Surface3
    });
    let rounds = file.pick(a.rounds, "rounds")?.unwrap_or(0);
    if rounds < 0 {
        return Err(usage(format!("rounds must be non-negative, got {rounds}")));
    }
    cfg.rounds = rounds as usize;
    cfg.p = file.pick(a.p, "p")?.unwrap_or(1e-3);
    cfg.validate().map_err(|e| usage(e.to_string()))?;

    let format = file.pick(a.format, "format")?.unwrap_or(Format::Csv);
    let out = file.pick(a.out, "out")?;

    let row = run_row(&cfg)?;
    let mut meta = Metadata::for_config(&cfg, seed_source);
    meta.push("rounds", cfg.rounds);
    let text = match format {
        Format::Csv => rows_csv(&meta, &[row]),
        Format::Json => rows_json(&meta, &[row]),
    };
    emit(out.as_deref(), &text)
}

fn parse_which(s: &str) -> anyhow::Result<Vec<TableSpec>> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(TableSpec::all().to_vec());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .ok()
                .and_then(TableSpec::get)
                .ok_or_else(|| usage(format!("invalid table selector `{t}` (1..6 or all)")))
        })
        .collect()
}

fn cmd_tables(a: TablesArgs) -> anyhow::Result<()> {
    let placeholder = RunConfig::new(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 0, 0.0);
    let Resolved { cfg: shared, seed_source, file } = resolve(&a.sim, placeholder)?;
    let which = file
        .pick(a.which, "which")?
        .ok_or_else(|| usage("--which is required (1..6 or all)"))?;
    let specs = parse_which(&which)?;
    let dir = file.pick(a.out_dir, "out-dir")?.unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    for spec in specs {
        for (i, &p) in TABLE_P.iter().enumerate() {
            let cfg = RunConfig {
                scheme: spec.scheme,
                code_a: spec.code_a,
                code_b: spec.code_b,
                p,
                ..shared.clone()
            };
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            let rows = run_table(&cfg, TableSpec::MAX_ROUNDS)?;
            let mut meta = Metadata::for_config(&cfg, seed_source);
            meta.push("table", spec.id);
            let path = dir.join(spec.file_name(i));
            emit(Some(&path), &rows_csv(&meta, &rows))?;
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn cmd_plotdata(a: PlotArgs) -> anyhow::Result<()> {
    let placeholder = RunConfig::new(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 0, 0.0);
    let Resolved { cfg: shared, seed_source, file } = resolve(&a.sim, placeholder)?;
    let code_a = file.pick(a.code_a, "code-a")?.unwrap_or(CodeKind::Steane7);
    let code_b = file.pick(a.code_b, "code-b")?.unwrap_or(CodeKind::Surface3);
    let ps: Vec<f64> = if a.p.is_empty() { TABLE_P.to_vec() } else { a.p.clone() };
    let out = file.pick(a.out, "out")?;

    let mut meta = Metadata::for_config(&shared, seed_source);
    meta.0.retain(|(k, _)| !matches!(k.as_str(), "scheme" | "code-a" | "code-b" | "p"));
    meta.push("code-a", code_a);
    meta.push("code-b", code_b);
    let mut text: String = meta.0.iter().map(|(k, v)| format!("# {k}={v}\n")).collect();
    text.push_str("p,scheme,rounds,ineff,merged_rate,merged_ci_lo,merged_ci_hi\n");
    for &p in &ps {
        for scheme in SchemeKind::ALL {
            let (ca, cb) = if scheme == SchemeKind::Baseline {
                (CodeKind::Physical, CodeKind::Physical)
            } else {
                (code_a, code_b)
            };
            let cfg = RunConfig { scheme, code_a: ca, code_b: cb, p, ..shared.clone() };
            cfg.validate().map_err(|e| usage(e.to_string()))?;
            for r in run_table(&cfg, TableSpec::MAX_ROUNDS)? {
                text.push_str(&format!(
                    "{p},{scheme},{},{},{},{},{}\n",
                    r.rounds, r.ineff, r.merged_rate, r.merged_ci.lo, r.merged_ci.hi
                ));
            }
        }
    }
    emit(out.as_deref(), &text)
}

fn cmd_analytic(a: AnalyticArgs) -> anyhow::Result<()> {
    let (lo, hi) = (a.f_min, a.f_max);
    if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) {
        return Err(usage("fidelity bounds must lie in [0, 1]"));
    }
    if lo > hi {
        return Err(usage(format!("inverted range: --f-min {lo} > --f-max {hi}")));
    }
    if a.steps == 0 && lo != hi {
        return Err(usage("--steps must be at least 1"));
    }
    let mut text = String::from(
        "f,distilled_fidelity,success_probability,phi_plus,phi_minus,psi_plus,psi_minus\n",
    );
    for k in 0..=a.steps {
        let t = if a.steps == 0 { 0.0 } else { k as f64 / a.steps as f64 };
        let f = ((lo + (hi - lo) * t) * 1e12).round() / 1e12;
        let fid = Fidelity::new(f.clamp(0.0, 1.0)).map_err(|e| usage(e.to_string()))?;
        let w = werner_components(fid);
        text.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fid.get(),
            distilled_fidelity_two_rounds(fid),
            purification_success_probability(fid),
            w[0],
            w[1],
            w[2],
            w[3]
        ));
    }
    emit(a.out.as_deref(), &text)
}

fn emit(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).context("writing stdout")?;
            Ok(())
        }
    }
}
