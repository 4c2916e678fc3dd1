//! Evaluation harness: named solver registry, wall-clock budgets, and the
//! (model x solver) comparison matrix with CSV export.

use std::time::{Duration, Instant};

use rotlabel_core::exact::{build_model, SearchBudget, Unbounded};
use rotlabel_core::format_sig12;
use rotlabel_core::geometry::ConflictStructure;
use rotlabel_core::greedy::{greedy_solve, GreedyOptions, GreedyStrategy};
use rotlabel_core::metrics::{compute_metrics, LabelingMetrics};
use rotlabel_core::model::{ConflictMode, Instance, ModelConfig, RangeModel, RotationLabeling};
use rotlabel_core::qapx::{qapx_greedy_solve, qapx_solve};
use rotlabel_core::CoreError;

/// Search budget giving each connected component `limit` of wall-clock time
/// (the deadline resets when a component's search starts). Solutions found
/// so far are kept; `time_limit_hit` reports degradation.
pub struct WallClockBudget {
    limit: Duration,
    deadline: Instant,
    hit: bool,
}

impl WallClockBudget {
    pub fn new(limit: Duration) -> Self {
        WallClockBudget {
            limit,
            deadline: Instant::now() + limit,
            hit: false,
        }
    }

    pub fn time_limit_hit(&self) -> bool {
        self.hit
    }
}

impl SearchBudget for WallClockBudget {
    fn component_started(&mut self) {
        self.deadline = Instant::now() + self.limit;
    }

    fn should_stop(&mut self, _nodes: u64) -> bool {
        let stop = Instant::now() >= self.deadline;
        self.hit |= stop;
        stop
    }
}

/// The solvers the harness and CLI can name.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverKind {
    GreedyMax,
    GreedyLowCost,
    GreedyBestRatio,
    Qapx,
    QapxGreedyMax,
    QapxGreedyLowCost,
    QapxGreedyBestRatio,
    Exact,
}

impl SolverKind {
    pub const ALL: [SolverKind; 8] = [
        SolverKind::GreedyMax,
        SolverKind::GreedyLowCost,
        SolverKind::GreedyBestRatio,
        SolverKind::Qapx,
        SolverKind::QapxGreedyMax,
        SolverKind::QapxGreedyLowCost,
        SolverKind::QapxGreedyBestRatio,
        SolverKind::Exact,
    ];

    pub fn code(self) -> &'static str {
        match self {
            SolverKind::GreedyMax => "gm",
            SolverKind::GreedyLowCost => "glc",
            SolverKind::GreedyBestRatio => "gbr",
            SolverKind::Qapx => "qapx",
            SolverKind::QapxGreedyMax => "qgm",
            SolverKind::QapxGreedyLowCost => "qglc",
            SolverKind::QapxGreedyBestRatio => "qgbr",
            SolverKind::Exact => "exact",
        }
    }

    pub fn from_code(code: &str) -> Option<Self> {
        SolverKind::ALL.iter().copied().find(|k| k.code() == code)
    }
}

/// One solver invocation's outcome.
pub struct SolveRun {
    pub labeling: RotationLabeling,
    /// `Some(true)` when the result carries a proof (exact optimality, or
    /// every decomposition cell solved exactly); `None` for heuristics.
    pub optimal: Option<bool>,
    /// The time limit cut the search short.
    pub degraded: bool,
}

/// Runs one named solver under one model configuration.
pub fn run_solver(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    kind: SolverKind,
    minimize_ranges: bool,
    time_limit: Option<Duration>,
) -> Result<SolveRun, CoreError> {
    let mut wall = time_limit.map(WallClockBudget::new);
    let mut unbounded = Unbounded;
    let budget: &mut dyn SearchBudget = match wall.as_mut() {
        Some(b) => b,
        None => &mut unbounded,
    };
    let greedy_strategy = |k: SolverKind| match k {
        SolverKind::GreedyMax | SolverKind::QapxGreedyMax => GreedyStrategy::Max,
        SolverKind::GreedyLowCost | SolverKind::QapxGreedyLowCost => GreedyStrategy::LowCost,
        _ => GreedyStrategy::BestRatio,
    };
    let run = match kind {
        SolverKind::GreedyMax | SolverKind::GreedyLowCost | SolverKind::GreedyBestRatio => {
            let opts = GreedyOptions::strategy(greedy_strategy(kind));
            SolveRun {
                labeling: greedy_solve(instance, conflicts, cfg, opts)?,
                optimal: None,
                degraded: false,
            }
        }
        SolverKind::Qapx => {
            let out = qapx_solve(instance, conflicts, cfg, minimize_ranges, budget)?;
            SolveRun {
                labeling: out.labeling,
                optimal: Some(out.all_cells_optimal),
                degraded: false,
            }
        }
        SolverKind::QapxGreedyMax | SolverKind::QapxGreedyLowCost | SolverKind::QapxGreedyBestRatio => {
            let out = qapx_greedy_solve(instance, conflicts, cfg, greedy_strategy(kind), budget)?;
            SolveRun {
                labeling: out.labeling,
                optimal: Some(out.all_cells_optimal),
                degraded: false,
            }
        }
        SolverKind::Exact => {
            let sol = build_model(instance, conflicts, cfg, minimize_ranges)?.solve(budget)?;
            let optimal = Some(sol.fully_optimal());
            SolveRun {
                labeling: sol.labeling,
                optimal,
                degraded: false,
            }
        }
    };
    let degraded = wall.map_or(false, |b| b.time_limit_hit());
    Ok(SolveRun { degraded, ..run })
}

#[derive(Clone, Debug, Default)]
pub struct MatrixOptions {
    pub time_limit: Option<Duration>,
    pub minimize_ranges: bool,
    /// Reference schedule for ratio reporting, conventionally the exact
    /// unlimited-ranges optimum.
    pub baseline: Option<RotationLabeling>,
}

#[derive(Clone, Debug)]
pub struct MatrixRow {
    pub model: ModelConfig,
    pub solver: SolverKind,
    pub metrics: Option<LabelingMetrics>,
    pub ratio_vs_baseline: Option<f64>,
    pub wall_ms: f64,
    pub optimal: Option<bool>,
    pub degraded: bool,
    pub error: Option<String>,
}

/// Activity of `phi` relative to `baseline`; absent when the baseline has
/// no activity to compare against.
pub fn activity_ratio_vs(phi: &RotationLabeling, baseline: &RotationLabeling) -> Option<f64> {
    let base = baseline.total_activity();
    (base > 0.0).then(|| phi.total_activity() / base)
}

/// Runs every (model, solver) cell in the given order. Cell failures are
/// recorded in the row and do not stop the run.
pub fn run_matrix(
    instance: &Instance,
    conflicts: &ConflictStructure,
    models: &[ModelConfig],
    solvers: &[SolverKind],
    opts: &MatrixOptions,
) -> Vec<MatrixRow> {
    let mut rows = Vec::with_capacity(models.len() * solvers.len());
    for &model in models {
        for &solver in solvers {
            let started = Instant::now();
            let outcome = run_solver(
                instance,
                conflicts,
                model,
                solver,
                opts.minimize_ranges,
                opts.time_limit,
            );
            let wall_ms = started.elapsed().as_secs_f64() * 1e3;
            let row = match outcome {
                Ok(run) => MatrixRow {
                    model,
                    solver,
                    metrics: Some(compute_metrics(&run.labeling, instance.len())),
                    ratio_vs_baseline: opts
                        .baseline
                        .as_ref()
                        .and_then(|b| activity_ratio_vs(&run.labeling, b)),
                    wall_ms,
                    optimal: run.optimal,
                    degraded: run.degraded,
                    error: None,
                },
                Err(e) => MatrixRow {
                    model,
                    solver,
                    metrics: None,
                    ratio_vs_baseline: None,
                    wall_ms,
                    optimal: None,
                    degraded: false,
                    error: Some(e.to_string()),
                },
            };
            rows.push(row);
        }
    }
    rows
}

pub fn range_model_code(ranges: RangeModel) -> String {
    match ranges {
        RangeModel::ZeroOne => "01".to_string(),
        RangeModel::Limited(k) => format!("{k}R"),
        RangeModel::Unlimited => "inf".to_string(),
    }
}

pub fn conflict_mode_code(mode: ConflictMode) -> &'static str {
    match mode {
        ConflictMode::Soft => "soft",
        ConflictMode::Hard => "hard",
    }
}

const MATRIX_COLUMNS: [&str; 16] = [
    "instance",
    "model",
    "conflicts",
    "solver",
    "labels",
    "total_activity",
    "activity_ratio",
    "mean_range_len_norm",
    "mean_ranges_per_label",
    "flicker_events",
    "empty_labels",
    "ratio_vs_baseline",
    "wall_ms",
    "optimal",
    "degraded",
    "error",
];

/// Per-instance rows as CSV ('.' decimal separator, UTF-8). Measured values
/// use 12 significant digits; wall times are milliseconds.
pub fn matrix_csv(entries: &[(String, Vec<MatrixRow>)]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(MATRIX_COLUMNS).unwrap();
    for (name, rows) in entries {
        for r in rows {
            let m = r.metrics.as_ref();
            let opt = |v: Option<String>| v.unwrap_or_default();
            w.write_record([
                name.clone(),
                range_model_code(r.model.ranges),
                conflict_mode_code(r.model.conflicts).to_string(),
                r.solver.code().to_string(),
                opt(m.map(|m| m.labels.to_string())),
                opt(m.map(|m| format_sig12(m.total_activity))),
                opt(m.map(|m| format_sig12(m.activity_ratio))),
                opt(m.map(|m| format_sig12(m.mean_range_len_norm))),
                opt(m.map(|m| format_sig12(m.mean_ranges_per_label))),
                opt(m.map(|m| m.flicker_events.to_string())),
                opt(m.map(|m| m.empty_labels.to_string())),
                opt(r.ratio_vs_baseline.map(format_sig12)),
                format!("{:.3}", r.wall_ms),
                opt(r.optimal.map(|b| b.to_string())),
                r.degraded.to_string(),
                r.error.clone().unwrap_or_default(),
            ])
            .unwrap();
        }
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

/// Mean/stddev aggregation over instances, grouped by (model, solver) in
/// first-appearance order. Failed cells are counted but excluded from the
/// statistics; stddev is the sample deviation (0 for a single instance).
pub fn aggregate_csv(entries: &[(String, Vec<MatrixRow>)]) -> String {
    struct Group {
        model: ModelConfig,
        solver: SolverKind,
        activity: Vec<f64>,
        ratio: Vec<f64>,
        wall: Vec<f64>,
        errors: usize,
    }
    let mut groups: Vec<Group> = Vec::new();
    for (_, rows) in entries {
        for r in rows {
            let g = match groups
                .iter_mut()
                .find(|g| g.model == r.model && g.solver == r.solver)
            {
                Some(g) => g,
                None => {
                    groups.push(Group {
                        model: r.model,
                        solver: r.solver,
                        activity: Vec::new(),
                        ratio: Vec::new(),
                        wall: Vec::new(),
                        errors: 0,
                    });
                    groups.last_mut().unwrap()
                }
            };
            match &r.metrics {
                Some(m) => {
                    g.activity.push(m.total_activity);
                    g.ratio.push(m.activity_ratio);
                    g.wall.push(r.wall_ms);
                }
                None => g.errors += 1,
            }
        }
    }
    let mean_std = |v: &[f64]| -> (f64, f64) {
        if v.is_empty() {
            return (0.0, 0.0);
        }
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        if v.len() < 2 {
            return (mean, 0.0);
        }
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        (mean, var.sqrt())
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "model",
        "conflicts",
        "solver",
        "instances",
        "errors",
        "mean_total_activity",
        "std_total_activity",
        "mean_activity_ratio",
        "std_activity_ratio",
        "mean_wall_ms",
        "std_wall_ms",
    ])
    .unwrap();
    for g in &groups {
        let (ma, sa) = mean_std(&g.activity);
        let (mr, sr) = mean_std(&g.ratio);
        let (mw, sw) = mean_std(&g.wall);
        w.write_record([
            range_model_code(g.model.ranges),
            conflict_mode_code(g.model.conflicts).to_string(),
            g.solver.code().to_string(),
            g.activity.len().to_string(),
            g.errors.to_string(),
            format_sig12(ma),
            format_sig12(sa),
            format_sig12(mr),
            format_sig12(sr),
            format!("{:.3}", mw),
            format!("{:.3}", sw),
        ])
        .unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rotlabel_core::angular::TAU;
    use rotlabel_core::model::{AnchorCorner, AnchoredLabel, Point};

    fn unit(id: u64, x: f64, y: f64) -> AnchoredLabel {
        AnchoredLabel::new(id, Point::new(x, y), 1.0, 1.0, AnchorCorner::BottomLeft)
    }

    fn cfg(ranges: RangeModel) -> ModelConfig {
        ModelConfig::new(ranges, ConflictMode::Soft)
    }

    #[test]
    fn lone_label_row_gets_a_full_turn() {
        let inst = Instance::new(vec![unit(0, 0.0, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let rows = run_matrix(
            &inst,
            &cs,
            &[cfg(RangeModel::Limited(1))],
            &[SolverKind::GreedyMax],
            &MatrixOptions::default(),
        );
        assert_eq!(rows.len(), 1);
        let m = rows[0].metrics.as_ref().unwrap();
        assert!((m.total_activity - TAU).abs() < 1e-12);
        assert_eq!(m.flicker_events, 0);
    }

    #[test]
    fn chain_activity_is_monotone_across_range_budgets() {
        let inst =
            Instance::new(vec![unit(0, 0.0, 0.0), unit(1, 1.2, 0.0), unit(2, 2.4, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let models = [
            cfg(RangeModel::Limited(1)),
            cfg(RangeModel::Limited(2)),
            cfg(RangeModel::Unlimited),
        ];
        let rows = run_matrix(&inst, &cs, &models, &[SolverKind::Exact], &MatrixOptions::default());
        let t: Vec<f64> = rows
            .iter()
            .map(|r| r.metrics.as_ref().unwrap().total_activity)
            .collect();
        assert!(t[0] <= t[1] + 1e-12 && t[1] <= t[2] + 1e-12, "{t:?}");
        assert!(rows.iter().all(|r| r.optimal == Some(true)));
    }

    #[test]
    fn failed_cells_are_recorded_and_the_run_continues() {
        let inst = Instance::new(vec![unit(0, 0.0, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let rows = run_matrix(
            &inst,
            &cs,
            &[cfg(RangeModel::ZeroOne)],
            &[SolverKind::GreedyMax, SolverKind::Exact],
            &MatrixOptions::default(),
        );
        assert!(rows[0].error.is_some() && rows[0].metrics.is_none());
        assert!(rows[1].error.is_none() && rows[1].metrics.is_some());
    }

    #[test]
    fn baseline_ratios_match_the_known_pair() {
        // Unit squares 1.2 apart: greedy's one-range schedule reaches
        // (3pi - 2*asin(1/1.2)) / (3pi - 2*(asin - acos)) of the optimum.
        let inst = Instance::new(vec![unit(0, 0.0, 0.0), unit(1, 1.2, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let model = cfg(RangeModel::Limited(1));
        let exact = run_solver(&inst, &cs, model, SolverKind::Exact, false, None).unwrap();
        let opts = MatrixOptions {
            baseline: Some(exact.labeling),
            ..Default::default()
        };
        let rows = run_matrix(&inst, &cs, &[model], &[SolverKind::GreedyMax], &opts);
        let ratio = rows[0].ratio_vs_baseline.unwrap();
        let (c, s) = ((1.0f64 / 1.2).acos(), (1.0f64 / 1.2).asin());
        let expected = (3.0 * std::f64::consts::PI - 2.0 * s)
            / (3.0 * std::f64::consts::PI - 2.0 * (s - c));
        assert!((ratio - expected).abs() < 1e-9, "{ratio} vs {expected}");
        assert!((ratio - 0.8642).abs() < 1e-3);
    }

    #[test]
    fn ratio_against_itself_is_exactly_one() {
        let inst = Instance::new(vec![unit(0, 0.0, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let run = run_solver(
            &inst,
            &cs,
            cfg(RangeModel::Limited(1)),
            SolverKind::GreedyMax,
            false,
            None,
        )
        .unwrap();
        assert_eq!(activity_ratio_vs(&run.labeling, &run.labeling), Some(1.0));
    }

    #[test]
    fn metrics_recompute_identically_and_csv_is_stable() {
        let inst = Instance::new(vec![unit(0, 0.0, 0.0), unit(1, 1.2, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let run = run_solver(
            &inst,
            &cs,
            cfg(RangeModel::Limited(2)),
            SolverKind::GreedyMax,
            false,
            None,
        )
        .unwrap();
        assert_eq!(
            compute_metrics(&run.labeling, inst.len()),
            compute_metrics(&run.labeling, inst.len())
        );
        let rows = run_matrix(
            &inst,
            &cs,
            &[cfg(RangeModel::Limited(2))],
            &[SolverKind::GreedyMax, SolverKind::Qapx],
            &MatrixOptions::default(),
        );
        let entries = vec![("pair".to_string(), rows)];
        let a = matrix_csv(&entries);
        assert_eq!(a.lines().count(), 3);
        assert!(a.starts_with("instance,model,conflicts,solver,"));
        // Everything except the wall-clock column is reproducible.
        let strip = |text: &str| -> Vec<String> {
            text.lines()
                .map(|l| {
                    let mut f: Vec<&str> = l.split(',').collect();
                    f[12] = "-";
                    f.join(",")
                })
                .collect()
        };
        let rows2 = run_matrix(
            &inst,
            &cs,
            &[cfg(RangeModel::Limited(2))],
            &[SolverKind::GreedyMax, SolverKind::Qapx],
            &MatrixOptions::default(),
        );
        let b = matrix_csv(&[("pair".to_string(), rows2)]);
        assert_eq!(strip(&a), strip(&b));
        let agg = aggregate_csv(&entries);
        assert_eq!(agg.lines().count(), 3);
    }
}
