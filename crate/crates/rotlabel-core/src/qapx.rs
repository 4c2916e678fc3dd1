//! Shifting-grid approximation with exact subproblems.
//!
//! Anchors are binned into a square grid whose cell side is twice the
//! largest label diagonal. Keeping only cells of one (column, row) parity
//! leaves selected cells a full cell apart, so labels in different kept
//! cells never conflict and each cell can be solved exactly on its own.
//! Every label belongs to exactly one of the four parities, so the best of
//! the four assembled schedules earns at least a quarter of the optimal
//! activity (when every cell solve ran to proven optimality).
//!
//! Under hard conflicts a kept label must additionally avoid covering the
//! anchors of nearby dropped labels; those covering arcs are folded into the
//! cell model as forbidden angles.
//!
//! The plain decomposition leaves dropped labels empty. The greedy variants
//! reuse the best-of-four cell schedule as a base and let the greedy
//! heuristic spend remaining budget on all labels.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::angular::AngularSet;
use crate::error::CoreError;
use crate::exact::{build_cell_model, SearchBudget};
use crate::geometry::{ConflictStructure, PairConflict};
use crate::model::{
    check_validity, ConflictMode, Instance, LabelId, ModelConfig, RotationLabeling,
};
use crate::greedy::{greedy_solve_with_base, GreedyOptions, GreedyStrategy};

/// Parity order: index `i` keeps cells with column parity `i & 1` and row
/// parity `i >> 1`, i.e. (0,0), (1,0), (0,1), (1,1).
pub const PARITIES: [(i64, i64); 4] = [(0, 0), (1, 0), (0, 1), (1, 1)];

#[derive(Clone, Debug)]
pub struct QapxOutcome {
    pub labeling: RotationLabeling,
    /// Index into [`PARITIES`] of the schedule that won.
    pub chosen_parity: usize,
    pub per_parity_activity: [f64; 4],
    /// Whether every cell of every parity was solved to proven optimality;
    /// only then does the quarter-of-optimum guarantee hold.
    pub all_cells_optimal: bool,
}

/// Grid geometry shared by the four parities.
struct Grid {
    origin: (f64, f64),
    side: f64,
}

impl Grid {
    fn build(instance: &Instance) -> Option<Grid> {
        let mut max_diag = 0.0f64;
        let mut ox = f64::INFINITY;
        let mut oy = f64::INFINITY;
        for l in instance.labels() {
            max_diag = max_diag.max(l.reach());
            ox = ox.min(l.anchor.x);
            oy = oy.min(l.anchor.y);
        }
        if instance.is_empty() {
            return None;
        }
        Some(Grid {
            origin: (ox, oy),
            side: 2.0 * max_diag,
        })
    }

    fn cell_of(&self, x: f64, y: f64) -> (i64, i64) {
        (
            libm::floor((x - self.origin.0) / self.side) as i64,
            libm::floor((y - self.origin.1) / self.side) as i64,
        )
    }
}

/// Solves one parity: every kept cell exactly, dropped labels empty.
fn parity_labeling(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    minimize_ranges: bool,
    grid: &Grid,
    parity: (i64, i64),
    budget: &mut dyn SearchBudget,
) -> Result<(RotationLabeling, bool), CoreError> {
    let mut cells: BTreeMap<(i64, i64), Vec<LabelId>> = BTreeMap::new();
    for l in instance.labels() {
        let (cx, cy) = grid.cell_of(l.anchor.x, l.anchor.y);
        if (cx.rem_euclid(2), cy.rem_euclid(2)) == parity {
            cells.entry((cx, cy)).or_default().push(l.id);
        }
    }
    let mut active: BTreeMap<LabelId, AngularSet> = instance
        .labels()
        .iter()
        .map(|l| (l.id, AngularSet::empty()))
        .collect();
    let mut all_optimal = true;
    for ids in cells.values() {
        let mut cell_pairs: Vec<PairConflict> = Vec::new();
        let mut extra: BTreeMap<LabelId, AngularSet> = BTreeMap::new();
        for &id in ids {
            for &pi in conflicts.incident(id) {
                let p = &conflicts.pairs()[pi];
                let other = p.other(id);
                if ids.contains(&other) {
                    if id < other {
                        cell_pairs.push(p.clone());
                    }
                } else if cfg.conflicts == ConflictMode::Hard {
                    // Buffer: arcs where this label would cover the anchor
                    // of a nearby label outside the cell.
                    let h = p.hard_of(id);
                    if !h.is_empty() {
                        let entry = extra.entry(id).or_insert_with(AngularSet::empty);
                        *entry = entry.union(h);
                    }
                }
            }
        }
        let model = build_cell_model(cfg, minimize_ranges, ids, &cell_pairs, &extra)?;
        let sol = model.solve(budget)?;
        all_optimal &= sol.fully_optimal();
        for (id, set) in sol.labeling.iter() {
            active.insert(*id, set.clone());
        }
    }
    Ok((RotationLabeling::from_active(cfg, active), all_optimal))
}

fn best_of_four(
    candidates: [(RotationLabeling, bool); 4],
) -> (RotationLabeling, usize, [f64; 4], bool) {
    let activities: [f64; 4] = core::array::from_fn(|i| candidates[i].0.total_activity());
    let mut chosen = 0;
    for i in 1..4 {
        if activities[i] > activities[chosen] {
            chosen = i;
        }
    }
    let all_optimal = candidates.iter().all(|(_, opt)| *opt);
    let labeling = candidates.into_iter().nth(chosen).unwrap().0;
    (labeling, chosen, activities, all_optimal)
}

/// Grid decomposition with exact per-cell schedules; dropped labels stay
/// empty. Reaches at least a quarter of the optimal activity when
/// `all_cells_optimal` holds.
pub fn qapx_solve(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    minimize_ranges: bool,
    budget: &mut dyn SearchBudget,
) -> Result<QapxOutcome, CoreError> {
    let Some(grid) = Grid::build(instance) else {
        return Ok(QapxOutcome {
            labeling: RotationLabeling::from_active(cfg, BTreeMap::new()),
            chosen_parity: 0,
            per_parity_activity: [0.0; 4],
            all_cells_optimal: true,
        });
    };
    let mut candidates: Vec<(RotationLabeling, bool)> = Vec::with_capacity(4);
    for &parity in &PARITIES {
        candidates.push(parity_labeling(
            instance,
            conflicts,
            cfg,
            minimize_ranges,
            &grid,
            parity,
            budget,
        )?);
    }
    let (labeling, chosen_parity, per_parity_activity, all_cells_optimal) =
        best_of_four(candidates.try_into().ok().unwrap());
    debug_assert!(check_validity(&labeling, conflicts, cfg).is_valid());
    Ok(QapxOutcome {
        labeling,
        chosen_parity,
        per_parity_activity,
        all_cells_optimal,
    })
}

/// Grid decomposition followed by a greedy pass: each parity's cell schedule
/// seeds `greedy_solve_with_base` over the whole instance, and the best of
/// the four completed schedules wins. Never worse than the plain
/// decomposition.
pub fn qapx_greedy_solve(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    strategy: GreedyStrategy,
    budget: &mut dyn SearchBudget,
) -> Result<QapxOutcome, CoreError> {
    let Some(grid) = Grid::build(instance) else {
        return Ok(QapxOutcome {
            labeling: RotationLabeling::from_active(cfg, BTreeMap::new()),
            chosen_parity: 0,
            per_parity_activity: [0.0; 4],
            all_cells_optimal: true,
        });
    };
    let opts = GreedyOptions::strategy(strategy);
    let mut candidates: Vec<(RotationLabeling, bool)> = Vec::with_capacity(4);
    for &parity in &PARITIES {
        let (base, optimal) =
            parity_labeling(instance, conflicts, cfg, false, &grid, parity, budget)?;
        let filled = greedy_solve_with_base(instance, conflicts, cfg, opts, &base)?;
        candidates.push((filled, optimal));
    }
    let (labeling, chosen_parity, per_parity_activity, all_cells_optimal) =
        best_of_four(candidates.try_into().ok().unwrap());
    Ok(QapxOutcome {
        labeling,
        chosen_parity,
        per_parity_activity,
        all_cells_optimal,
    })
}
