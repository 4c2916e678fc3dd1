//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input/solve error, 3 the time
//! limit degraded a search-based solver's result (output is still written).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use rotlabel::core::angular::AngularSet;
use rotlabel::core::exact::build_model;
use rotlabel::core::format_sig12;
use rotlabel::core::geometry::ConflictStructure;
use rotlabel::core::metrics::compute_metrics;
use rotlabel::core::model::{
    ConflictMode, Instance, ModelConfig, RangeModel, RotationLabeling,
};
use rotlabel::gen::{generate_random, GenSpec};
use rotlabel::geo::{ingest_instance, parse_geo_csv, IngestOptions};
use rotlabel::harness::{
    aggregate_csv, conflict_mode_code, matrix_csv, range_model_code, run_matrix, run_solver,
    MatrixOptions, MatrixRow, SolverKind,
};
use rotlabel::io;
use rotlabel::svg::svg_snapshot;

#[derive(Parser)]
#[command(
    name = "rotlabel",
    version,
    about = "Consistent label schedules for rotating maps"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Summarize an instance's angular conflict structure
    Conflicts { instance: PathBuf },
    /// Compute a labeling under one model/solver configuration
    Solve(SolveArgs),
    /// Run a (model x solver) matrix and emit CSV
    Eval(EvalArgs),
    /// Generate a seeded random instance (statically valid)
    Gen(GenArgs),
    /// Build an instance from a geographic CSV (name,lat,lon,weight)
    Ingest(IngestArgs),
    /// Render the labeling at one rotation angle as SVG
    Snapshot(SnapshotArgs),
    /// Write the exact model as an LP file for external MIP solvers
    EmitLp(EmitLpArgs),
}

#[derive(Args)]
struct SolveArgs {
    instance: PathBuf,
    /// Consistency model: 01, kR:<k> (or <k>R), inf
    #[arg(long, default_value = "kR:1", value_parser = parse_model)]
    model: RangeModel,
    /// Conflict mode: soft or hard
    #[arg(long, default_value = "soft", value_parser = parse_conflicts)]
    conflicts: ConflictMode,
    /// Solver: gm, glc, gbr, qapx, qgm, qglc, qgbr, exact
    #[arg(long, default_value = "gm", value_parser = parse_solver)]
    solver: SolverKind,
    /// Per-component wall-clock limit in seconds for search-based solvers
    #[arg(long, default_value_t = 60.0, value_parser = parse_seconds)]
    time_limit: f64,
    /// Reserved for randomized solvers; every bundled solver is deterministic
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Prefer schedules with fewer ranges among equally active ones (exact/qapx)
    #[arg(long)]
    minimize_ranges: bool,
    /// Labeling destination (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(required = true)]
    instances: Vec<PathBuf>,
    /// Range models to evaluate
    #[arg(long, value_delimiter = ',', default_value = "01,kR:1,kR:2,kR:3,inf", value_parser = parse_model)]
    models: Vec<RangeModel>,
    /// Conflict modes to evaluate
    #[arg(long, value_delimiter = ',', default_value = "soft,hard", value_parser = parse_conflicts)]
    conflicts: Vec<ConflictMode>,
    /// Solvers to evaluate
    #[arg(long, value_delimiter = ',', default_value = "gm,glc,gbr,qapx,qgm,qglc,qgbr,exact", value_parser = parse_solver)]
    solvers: Vec<SolverKind>,
    /// Per-component wall-clock limit in seconds for search-based solvers
    #[arg(long, default_value_t = 60.0, value_parser = parse_seconds)]
    time_limit: f64,
    /// Also report activity relative to the exact inf-soft optimum
    #[arg(long)]
    baseline: bool,
    /// Emit mean/stddev per (model, solver) across instances
    #[arg(long)]
    aggregate: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Points to draw; overlapping static placements are dropped
    #[arg(long)]
    n: usize,
    /// Square region side
    #[arg(long, default_value_t = 10.0)]
    region: f64,
    /// Width range lo:hi (inclusive)
    #[arg(long, default_value = "0.5:1.5", value_parser = parse_dim_range)]
    width: (f64, f64),
    /// Height range lo:hi (inclusive)
    #[arg(long, default_value = "0.3:0.8", value_parser = parse_dim_range)]
    height: (f64, f64),
    /// Preset: all labels are unit squares
    #[arg(long)]
    unit_squares: bool,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    csv: PathBuf,
    /// Kilometers-to-units factor applied after projection
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Label width per name character
    #[arg(long, default_value_t = 0.6)]
    char_width: f64,
    /// Constant label width padding
    #[arg(long, default_value_t = 0.4)]
    padding: f64,
    #[arg(long, default_value_t = 1.0)]
    label_height: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SnapshotArgs {
    instance: PathBuf,
    /// Labeling file; omitted = draw every label
    #[arg(long)]
    labeling: Option<PathBuf>,
    /// Rotation angle in radians
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EmitLpArgs {
    instance: PathBuf,
    #[arg(long, default_value = "kR:1", value_parser = parse_model)]
    model: RangeModel,
    #[arg(long, default_value = "soft", value_parser = parse_conflicts)]
    conflicts: ConflictMode,
    #[arg(long)]
    minimize_ranges: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> Result<RangeModel, String> {
    if s == "01" {
        return Ok(RangeModel::ZeroOne);
    }
    if s == "inf" {
        return Ok(RangeModel::Unlimited);
    }
    let digits = s
        .strip_prefix("kR:")
        .or_else(|| s.strip_suffix('R'))
        .ok_or_else(|| format!("unknown model {s:?}; use 01, kR:<k>, or inf"))?;
    let k: u32 = digits
        .parse()
        .map_err(|_| format!("bad range budget in {s:?}"))?;
    if k == 0 {
        return Err("range budget must be at least 1".into());
    }
    Ok(RangeModel::Limited(k))
}

fn parse_conflicts(s: &str) -> Result<ConflictMode, String> {
    match s {
        "soft" => Ok(ConflictMode::Soft),
        "hard" => Ok(ConflictMode::Hard),
        _ => Err(format!("unknown conflict mode {s:?}; use soft or hard")),
    }
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    SolverKind::from_code(s).ok_or_else(|| {
        format!("unknown solver {s:?}; use gm, glc, gbr, qapx, qgm, qglc, qgbr, or exact")
    })
}

fn parse_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("bad duration {s:?}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("time limit must be a positive number of seconds".into())
    }
}

fn parse_dim_range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected lo:hi, found {s:?}"))?;
    let lo: f64 = lo.parse().map_err(|_| format!("bad number {lo:?}"))?;
    let hi: f64 = hi.parse().map_err(|_| format!("bad number {hi:?}"))?;
    if lo > 0.0 && hi >= lo && hi.is_finite() {
        Ok((lo, hi))
    } else {
        Err("need 0 < lo <= hi".into())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    match cli.cmd {
        Cmd::Conflicts { instance } => {
            let inst = read_instance(&instance)?;
            let cs = ConflictStructure::build(&inst)?;
            let stats = cs.stats();
            let soft: f64 = cs.pairs().iter().map(|p| p.soft.length()).sum();
            let hard: f64 = cs
                .pairs()
                .iter()
                .map(|p| p.hard_i_covers_j.length() + p.hard_j_covers_i.length())
                .sum();
            println!("labels: {}", stats.labels);
            println!("conflicting pairs: {}", stats.pairs);
            println!("interior events: {}", stats.interior_events);
            println!("atomic intervals: {}", cs.events().len() - 1);
            println!("max conflict ranges per label: {}", stats.max_conflict_ranges);
            println!("total soft arc length: {}", format_sig12(soft));
            println!("total hard arc length: {}", format_sig12(hard));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Solve(args) => {
            let inst = read_instance(&args.instance)?;
            let cs = ConflictStructure::build(&inst)?;
            let cfg = ModelConfig::new(args.model, args.conflicts);
            let run = run_solver(
                &inst,
                &cs,
                cfg,
                args.solver,
                args.minimize_ranges,
                Some(Duration::from_secs_f64(args.time_limit)),
            )?;
            emit(&args.out, &io::write_labeling(&run.labeling))?;
            let m = compute_metrics(&run.labeling, inst.len());
            eprintln!(
                "model={} conflicts={} solver={} seed={} labels={} total_activity={} ranges={} optimal={}",
                range_model_code(cfg.ranges),
                conflict_mode_code(cfg.conflicts),
                args.solver.code(),
                args.seed,
                m.labels,
                format_sig12(m.total_activity),
                run.labeling.total_ranges(),
                run.optimal.map_or("n/a".to_string(), |b| b.to_string()),
            );
            if run.degraded {
                eprintln!("time limit hit; the schedule may be suboptimal");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Eval(args) => {
            let time_limit = Some(Duration::from_secs_f64(args.time_limit));
            let models: Vec<ModelConfig> = args
                .models
                .iter()
                .flat_map(|&r| args.conflicts.iter().map(move |&c| ModelConfig::new(r, c)))
                .collect();
            let mut entries: Vec<(String, Vec<MatrixRow>)> = Vec::new();
            let mut degraded = false;
            for path in &args.instances {
                let inst = read_instance(path)?;
                let cs = ConflictStructure::build(&inst)?;
                let baseline = if args.baseline {
                    let cfg = ModelConfig::new(RangeModel::Unlimited, ConflictMode::Soft);
                    match run_solver(&inst, &cs, cfg, SolverKind::Exact, false, time_limit) {
                        Ok(run) => Some(run.labeling),
                        Err(e) => {
                            eprintln!("{}: baseline solve failed: {e}", path.display());
                            None
                        }
                    }
                } else {
                    None
                };
                let opts = MatrixOptions {
                    time_limit,
                    minimize_ranges: false,
                    baseline,
                };
                let rows = run_matrix(&inst, &cs, &models, &args.solvers, &opts);
                degraded |= rows.iter().any(|r| r.degraded);
                let name = path
                    .file_stem()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_else(|| path.display().to_string());
                entries.push((name, rows));
            }
            let csv = if args.aggregate {
                aggregate_csv(&entries)
            } else {
                matrix_csv(&entries)
            };
            emit(&args.out, &csv)?;
            Ok(if degraded {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Cmd::Gen(args) => {
            let (width, height) = if args.unit_squares {
                ((1.0, 1.0), (1.0, 1.0))
            } else {
                (args.width, args.height)
            };
            let spec = GenSpec {
                n: args.n,
                region: args.region,
                width,
                height,
                seed: args.seed,
            };
            let inst = generate_random(&spec)?;
            eprintln!("placed {} of {} points", inst.len(), args.n);
            emit(&args.out, &io::write_instance(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Ingest(args) => {
            let text = std::fs::read_to_string(&args.csv)
                .with_context(|| format!("reading {}", args.csv.display()))?;
            let recs = parse_geo_csv(&text)?;
            let inst = ingest_instance(
                &recs,
                &IngestOptions {
                    scale: args.scale,
                    char_width: args.char_width,
                    padding: args.padding,
                    label_height: args.label_height,
                },
            )?;
            eprintln!("placed {} of {} records", inst.len(), recs.len());
            emit(&args.out, &io::write_instance(&inst))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Snapshot(args) => {
            let inst = read_instance(&args.instance)?;
            let cfg = ModelConfig::new(RangeModel::Unlimited, ConflictMode::Soft);
            let phi = match &args.labeling {
                Some(path) => io::read_labeling(path, cfg)
                    .with_context(|| format!("reading {}", path.display()))?,
                None => {
                    let mut all = RotationLabeling::empty(&inst, cfg);
                    for l in inst.labels() {
                        all.set_active(l.id, AngularSet::full());
                    }
                    all
                }
            };
            emit(&args.out, &svg_snapshot(&inst, &phi, args.alpha))?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::EmitLp(args) => {
            let inst = read_instance(&args.instance)?;
            let cs = ConflictStructure::build(&inst)?;
            let cfg = ModelConfig::new(args.model, args.conflicts);
            let model = build_model(&inst, &cs, cfg, args.minimize_ranges)?;
            emit(&args.out, &model.emit_lp())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn read_instance(path: &Path) -> anyhow::Result<Instance> {
    io::read_instance(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}
