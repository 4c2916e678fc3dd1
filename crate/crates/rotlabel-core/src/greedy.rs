//! Greedy activity schedulers.
//!
//! All strategies share one loop: repeatedly pick a label, commit the longest
//! interval of its admissible set as an active range, then carve that range
//! out of the label itself and (clipped to each pair's soft conflict set) out
//! of its neighbors. Strategies differ only in which label goes next:
//!
//! * [`GreedyStrategy::Max`] — longest candidate interval first.
//! * [`GreedyStrategy::LowCost`] — smallest damage to the neighbors' longest
//!   intervals first; candidate length breaks ties.
//! * [`GreedyStrategy::BestRatio`] — zero-damage candidates first (longest
//!   leading), then best length-to-damage ratio.
//!
//! Two engines implement the loop. [`GreedyEngine::Recompute`] re-derives a
//! label's priority from its admissible set whenever a committed range may
//! have changed it. [`GreedyEngine::IntervalHeaps`] (longest-range strategy
//! only) keeps per-label candidate heaps over the segment structure and a
//! global heap of per-label bests, validating entries lazily. Both engines
//! manipulate identical endpoint values — set operations never invent new
//! floats — and use the same quantized tie rules, so they produce identical
//! labelings, not merely equally good ones.

use alloc::collections::{BTreeMap, BTreeSet, BinaryHeap};
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::angular::{length_key, Angle, AngularSet, CircularInterval, OrdF64, TAU};
use crate::error::CoreError;
use crate::geometry::ConflictStructure;
use crate::model::{ConflictMode, Instance, LabelId, ModelConfig, RangeModel, RotationLabeling};
use crate::{MERGE_EPS, MIN_RANGE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyStrategy {
    Max,
    LowCost,
    BestRatio,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreedyEngine {
    /// Recompute priorities from the admissible sets on every invalidation.
    Recompute,
    /// Lazy candidate heaps over the segment structure; longest-range only.
    IntervalHeaps,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyOptions {
    pub strategy: GreedyStrategy,
    pub engine: GreedyEngine,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        GreedyOptions {
            strategy: GreedyStrategy::Max,
            engine: GreedyEngine::Recompute,
        }
    }
}

impl GreedyOptions {
    pub fn strategy(strategy: GreedyStrategy) -> Self {
        GreedyOptions {
            strategy,
            ..Default::default()
        }
    }
}

/// Runs the greedy scheduler from an empty labeling.
pub fn greedy_solve(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    options: GreedyOptions,
) -> Result<RotationLabeling, CoreError> {
    solve_impl(instance, conflicts, cfg, options, None)
}

/// Runs the greedy scheduler on top of a committed base labeling. Base
/// ranges stay active, count against each label's range budget, and are
/// carved out of every admissible set (own ranges entirely, neighbor ranges
/// clipped to the pair's soft conflict set) before scheduling starts.
pub fn greedy_solve_with_base(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    options: GreedyOptions,
    base: &RotationLabeling,
) -> Result<RotationLabeling, CoreError> {
    solve_impl(instance, conflicts, cfg, options, Some(base))
}

fn solve_impl(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    options: GreedyOptions,
    base: Option<&RotationLabeling>,
) -> Result<RotationLabeling, CoreError> {
    match cfg.ranges {
        RangeModel::ZeroOne => {
            return Err(CoreError::UnsupportedRangeModel(
                "zero-one scheduling is all-or-nothing; greedy range selection needs kR or unlimited ranges",
            ))
        }
        RangeModel::Limited(0) => return Err(CoreError::ZeroRangeBudget),
        _ => {}
    }
    if options.engine == GreedyEngine::IntervalHeaps && options.strategy != GreedyStrategy::Max {
        return Err(CoreError::UnsupportedStrategy(
            "the interval-heap engine implements only the longest-range strategy",
        ));
    }
    let init = initial_state(instance, conflicts, cfg, base);
    let labeling = match options.engine {
        GreedyEngine::Recompute => {
            Recompute::new(conflicts, cfg, options.strategy, init, base).run()
        }
        GreedyEngine::IntervalHeaps => interval_heaps_run(conflicts, cfg, init, base),
    };
    debug_assert!(crate::model::check_validity(&labeling, conflicts, cfg).is_valid());
    Ok(labeling)
}

struct LabelInit {
    id: LabelId,
    admissible: AngularSet,
    used: u32,
}

fn initial_state(
    instance: &Instance,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    base: Option<&RotationLabeling>,
) -> Vec<LabelInit> {
    let mut out = Vec::with_capacity(instance.len());
    let mut ids: Vec<LabelId> = instance.labels().iter().map(|l| l.id).collect();
    ids.sort_unstable();
    for id in ids {
        let mut adm = AngularSet::full();
        if cfg.conflicts == ConflictMode::Hard {
            adm = adm.subtract(&conflicts.hard_cover_set(id));
        }
        let mut used = 0u32;
        if let Some(base) = base {
            if let Some(own) = base.active_opt(id) {
                if !own.is_empty() {
                    adm = adm.subtract(own);
                    used = own.interval_count() as u32;
                }
            }
            for (nb, pair) in conflicts.neighbors(id) {
                if let Some(nb_act) = base.active_opt(nb) {
                    if !nb_act.is_empty() {
                        adm = adm.subtract(&nb_act.intersect(&pair.soft));
                    }
                }
            }
        }
        out.push(LabelInit {
            id,
            admissible: adm,
            used,
        });
    }
    out
}

// ---------------------------------------------------------------------------
// Recompute engine
// ---------------------------------------------------------------------------

/// Priority triple; meaning depends on the strategy but comparison is always
/// lexicographic max-first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Key(i64, i64, OrdF64);

#[derive(Debug, PartialEq, Eq)]
struct Entry {
    key: Key,
    id: LabelId,
    start: OrdF64,
    version: u64,
}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| other.id.cmp(&self.id)) // smaller id wins ties
            .then_with(|| other.start.cmp(&self.start)) // then smaller start
            .then_with(|| self.version.cmp(&other.version))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Recompute<'a> {
    conflicts: &'a ConflictStructure,
    cfg: ModelConfig,
    strategy: GreedyStrategy,
    budget: Option<u32>,
    admissible: BTreeMap<LabelId, AngularSet>,
    active: BTreeMap<LabelId, AngularSet>,
    used: BTreeMap<LabelId, u32>,
    retired: BTreeSet<LabelId>,
    version: BTreeMap<LabelId, u64>,
    heap: BinaryHeap<Entry>,
}

impl<'a> Recompute<'a> {
    fn new(
        conflicts: &'a ConflictStructure,
        cfg: ModelConfig,
        strategy: GreedyStrategy,
        init: Vec<LabelInit>,
        base: Option<&RotationLabeling>,
    ) -> Self {
        let mut state = Recompute {
            conflicts,
            cfg,
            strategy,
            budget: cfg.ranges.budget(),
            admissible: BTreeMap::new(),
            active: BTreeMap::new(),
            used: BTreeMap::new(),
            retired: BTreeSet::new(),
            version: BTreeMap::new(),
            heap: BinaryHeap::new(),
        };
        for li in init {
            let act = base
                .and_then(|b| b.active_opt(li.id).cloned())
                .unwrap_or_else(AngularSet::empty);
            state.active.insert(li.id, act);
            state.admissible.insert(li.id, li.admissible);
            state.used.insert(li.id, li.used);
            state.version.insert(li.id, 0);
        }
        state
    }

    fn alive(&self, id: LabelId) -> bool {
        !self.retired.contains(&id)
    }

    /// Damage a committed `iv` on `id` would do: total shrinkage of the
    /// pending neighbors' longest admissible intervals.
    fn cost_of(&self, id: LabelId, iv: &CircularInterval) -> f64 {
        let cut_base = AngularSet::from_interval(*iv);
        let mut cost = 0.0;
        for (nb, pair) in self.conflicts.neighbors(id) {
            if !self.alive(nb) {
                continue;
            }
            let cut = cut_base.intersect(&pair.soft);
            if cut.is_empty() {
                continue;
            }
            let Some(adm) = self.admissible.get(&nb) else { continue };
            let before = adm.longest_interval().map_or(0.0, |v| v.len());
            let after = adm
                .subtract(&cut)
                .longest_interval()
                .map_or(0.0, |v| v.len());
            cost += before - after;
        }
        cost.max(0.0)
    }

    fn key_for(&self, id: LabelId) -> Option<(Key, OrdF64)> {
        let best = self.admissible.get(&id)?.longest_interval()?;
        if best.len() < MIN_RANGE {
            return None;
        }
        let len_key = length_key(best.len());
        let key = match self.strategy {
            GreedyStrategy::Max => Key(len_key, 0, OrdF64(0.0)),
            GreedyStrategy::LowCost => {
                let cost = self.cost_of(id, &best);
                Key(-length_key(cost), len_key, OrdF64(0.0))
            }
            GreedyStrategy::BestRatio => {
                let cost = self.cost_of(id, &best);
                if length_key(cost) <= 0 {
                    Key(1, len_key, OrdF64(0.0))
                } else {
                    Key(0, 0, OrdF64(best.len() / cost))
                }
            }
        };
        Some((key, OrdF64(best.start().rad())))
    }

    /// Re-prices `id` against the settled state and pushes a fresh heap
    /// entry, or retires the label if it has no usable interval or budget.
    fn refresh(&mut self, id: LabelId) {
        *self.version.get_mut(&id).expect("known label") += 1;
        if !self.alive(id) {
            return;
        }
        if let Some(k) = self.budget {
            if self.used[&id] >= k {
                self.retired.insert(id);
                return;
            }
        }
        match self.key_for(id) {
            Some((key, start)) => self.heap.push(Entry {
                key,
                id,
                start,
                version: self.version[&id],
            }),
            None => {
                self.retired.insert(id);
            }
        }
    }

    fn commit(&mut self, id: LabelId, iv: CircularInterval) {
        let conflicts = self.conflicts;
        let iv_set = AngularSet::from_interval(iv);
        let act = self.active.get_mut(&id).expect("known label");
        *act = act.union(&iv_set);
        let adm = self.admissible.get_mut(&id).expect("known label");
        *adm = adm.subtract(&iv_set);
        *self.used.get_mut(&id).expect("known label") += 1;

        let track_cost = self.strategy != GreedyStrategy::Max;
        let mut affected: BTreeSet<LabelId> = BTreeSet::new();
        affected.insert(id);
        let mut cut_neighbors: Vec<LabelId> = Vec::new();
        for (nb, pair) in conflicts.neighbors(id) {
            if !self.alive(nb) {
                continue;
            }
            if track_cost {
                affected.insert(nb);
            }
            let cut = iv_set.intersect(&pair.soft);
            if cut.is_empty() {
                continue;
            }
            let adm = self.admissible.get_mut(&nb).expect("known label");
            *adm = adm.subtract(&cut);
            affected.insert(nb);
            cut_neighbors.push(nb);
        }
        // Settle retirements before any cost is re-priced, so dead labels
        // stop appearing in the pending sums.
        for &nb in &cut_neighbors {
            let dead = self.admissible[&nb]
                .longest_interval()
                .map_or(true, |v| v.len() < MIN_RANGE);
            if dead {
                self.retired.insert(nb);
            }
        }
        if track_cost {
            for &nb in &cut_neighbors {
                for (two_hop, _) in conflicts.neighbors(nb) {
                    affected.insert(two_hop);
                }
            }
        }
        for aff in affected {
            self.refresh(aff);
        }
    }

    fn run(mut self) -> RotationLabeling {
        let ids: Vec<LabelId> = self.admissible.keys().copied().collect();
        for id in ids {
            self.refresh(id);
        }
        let mut last_max_key: Option<i64> = None;
        while let Some(entry) = self.heap.pop() {
            if !self.alive(entry.id) || self.version[&entry.id] != entry.version {
                continue;
            }
            let iv = self.admissible[&entry.id]
                .longest_interval()
                .expect("fresh entry implies a usable interval");
            debug_assert!(iv.len() >= MIN_RANGE);
            debug_assert_eq!(OrdF64(iv.start().rad()), entry.start);
            if self.strategy == GreedyStrategy::Max {
                // Committed lengths only shrink as sets get carved up.
                let k = length_key(iv.len());
                debug_assert!(last_max_key.map_or(true, |prev| k <= prev));
                last_max_key = Some(k);
            }
            self.commit(entry.id, iv);
        }
        RotationLabeling::from_active(self.cfg, self.active)
    }
}

// ---------------------------------------------------------------------------
// IntervalHeaps engine (longest-range strategy)
// ---------------------------------------------------------------------------

/// Candidate circular interval of one label, keyed by quantized length with
/// smaller start angles winning ties.
#[derive(Debug, PartialEq, Eq)]
struct Cand {
    key: i64,
    start: OrdF64,
    len: OrdF64,
}

impl Ord for Cand {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| other.start.cmp(&self.start))
            .then_with(|| self.len.cmp(&other.len))
    }
}

impl PartialOrd for Cand {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, PartialEq, Eq)]
struct GEntry {
    key: i64,
    id: LabelId,
    start: OrdF64,
    len: OrdF64,
    stamp: u64,
}

impl Ord for GEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key
            .cmp(&other.key)
            .then_with(|| other.id.cmp(&self.id))
            .then_with(|| other.start.cmp(&self.start))
            .then_with(|| self.stamp.cmp(&other.stamp))
            .then_with(|| self.len.cmp(&other.len))
    }
}

impl PartialOrd for GEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

struct Slot {
    /// Canonical linear segments (start -> end), mirroring the admissible
    /// [`AngularSet`] of the recompute engine bit for bit.
    segs: BTreeMap<OrdF64, f64>,
    cands: BinaryHeap<Cand>,
    stamp: u64,
    used: u32,
    retired: bool,
    active: AngularSet,
}

/// Wrapping interval of the segment map, if the coverage crosses zero:
/// (tail start, circular length). Requires at least two segments; a single
/// full segment [0, 2pi) is the full circle, not a wrap.
fn wrap_info(segs: &BTreeMap<OrdF64, f64>) -> Option<(f64, f64)> {
    if segs.len() < 2 {
        return None;
    }
    let (&OrdF64(first_a), &first_b) = segs.iter().next()?;
    let (&OrdF64(last_a), &last_b) = segs.iter().next_back()?;
    if first_a == 0.0 && last_b == TAU {
        Some((last_a, (TAU - last_a) + first_b))
    } else {
        None
    }
}

/// Length of the maximal circular interval beginning exactly at `start`, or
/// `None` if no interval begins there (including the head segment of a wrap,
/// which belongs to the interval starting at the tail).
fn circ_len_at(segs: &BTreeMap<OrdF64, f64>, start: f64) -> Option<f64> {
    let end = *segs.get(&OrdF64(start))?;
    if let Some((tail_start, wrap_len)) = wrap_info(segs) {
        if start == 0.0 {
            return None;
        }
        if start == tail_start && end == TAU {
            return Some(wrap_len);
        }
    }
    Some(end - start)
}

impl Slot {
    fn from_set(set: &AngularSet, used: u32, active: AngularSet) -> Self {
        let segs: BTreeMap<OrdF64, f64> =
            set.segments().iter().map(|&(a, b)| (OrdF64(a), b)).collect();
        let mut slot = Slot {
            segs,
            cands: BinaryHeap::new(),
            stamp: 0,
            used,
            retired: false,
            active,
        };
        let all: Vec<(f64, f64)> = slot.segs.iter().map(|(&OrdF64(a), &b)| (a, b)).collect();
        slot.push_candidates(&all);
        slot
    }

    /// Publishes candidate entries for freshly created pieces plus the
    /// boundary-touching intervals, which wrap handling may have reshaped.
    fn push_candidates(&mut self, pieces: &[(f64, f64)]) {
        match wrap_info(&self.segs) {
            Some((tail_start, wrap_len)) => self.cands.push(Cand {
                key: length_key(wrap_len),
                start: OrdF64(tail_start),
                len: OrdF64(wrap_len),
            }),
            None => {
                if let Some((&OrdF64(a), &b)) = self.segs.iter().next() {
                    if a == 0.0 {
                        self.cands.push(Cand {
                            key: length_key(b - a),
                            start: OrdF64(a),
                            len: OrdF64(b - a),
                        });
                    }
                }
                if let Some((&OrdF64(a), &b)) = self.segs.iter().next_back() {
                    if b == TAU && a != 0.0 {
                        self.cands.push(Cand {
                            key: length_key(b - a),
                            start: OrdF64(a),
                            len: OrdF64(b - a),
                        });
                    }
                }
            }
        }
        for &(a, b) in pieces {
            if a == 0.0 || b == TAU {
                continue;
            }
            self.cands.push(Cand {
                key: length_key(b - a),
                start: OrdF64(a),
                len: OrdF64(b - a),
            });
        }
    }

    /// Discards stale candidates; the surviving top is the current longest
    /// interval (quantized length, then smallest start).
    fn best(&mut self) -> Option<(f64, f64)> {
        while let Some(top) = self.cands.peek() {
            match circ_len_at(&self.segs, top.start.0) {
                Some(cur) if cur == top.len.0 => return Some((top.start.0, top.len.0)),
                _ => {
                    self.cands.pop();
                }
            }
        }
        None
    }

    /// Removes the coverage of each cut segment, keeping remainder pieces
    /// longer than [`MERGE_EPS`] exactly like canonical subtraction does.
    /// Returns whether anything changed (the stamp is bumped if so).
    fn apply_cut(&mut self, cut_segs: &[(f64, f64)]) -> bool {
        let mut pieces: Vec<(f64, f64)> = Vec::new();
        let mut changed = false;
        for &(a, b) in cut_segs {
            let overlapping: Vec<(f64, f64)> = self
                .segs
                .range(..OrdF64(b))
                .rev()
                .take_while(|&(_, &e)| e > a)
                .map(|(&OrdF64(s), &e)| (s, e))
                .collect();
            for (s, e) in overlapping {
                self.segs.remove(&OrdF64(s));
                changed = true;
                if a - s > MERGE_EPS {
                    self.segs.insert(OrdF64(s), a);
                    pieces.push((s, a));
                }
                if e - b > MERGE_EPS {
                    self.segs.insert(OrdF64(b), e);
                    pieces.push((b, e));
                }
            }
        }
        if changed {
            self.stamp += 1;
            self.push_candidates(&pieces);
        }
        changed
    }

    /// Removes the complete maximal interval starting at `start` (the only
    /// thing commits ever remove, so no arithmetic splitting is needed).
    fn remove_interval_at(&mut self, start: f64) {
        let end = *self.segs.get(&OrdF64(start)).expect("committed interval exists");
        let is_wrap = match wrap_info(&self.segs) {
            Some((tail_start, _)) => start == tail_start && end == TAU && start != 0.0,
            None => false,
        };
        self.segs.remove(&OrdF64(start));
        if is_wrap {
            let head = *self.segs.keys().next().expect("wrap has a head segment");
            debug_assert_eq!(head, OrdF64(0.0));
            self.segs.remove(&head);
        }
        self.stamp += 1;
        self.push_candidates(&[]);
    }
}

fn interval_heaps_run(
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
    init: Vec<LabelInit>,
    base: Option<&RotationLabeling>,
) -> RotationLabeling {
    let budget = cfg.ranges.budget();
    let mut slots: BTreeMap<LabelId, Slot> = BTreeMap::new();
    for li in init {
        let act = base
            .and_then(|b| b.active_opt(li.id).cloned())
            .unwrap_or_else(AngularSet::empty);
        slots.insert(li.id, Slot::from_set(&li.admissible, li.used, act));
    }
    let mut heap: BinaryHeap<GEntry> = BinaryHeap::new();
    let refresh = |slot: &mut Slot, id: LabelId, heap: &mut BinaryHeap<GEntry>| {
        if slot.retired {
            return;
        }
        if let Some(k) = budget {
            if slot.used >= k {
                slot.retired = true;
                return;
            }
        }
        match slot.best() {
            Some((start, len)) if len >= MIN_RANGE => heap.push(GEntry {
                key: length_key(len),
                id,
                start: OrdF64(start),
                len: OrdF64(len),
                stamp: slot.stamp,
            }),
            _ => slot.retired = true,
        }
    };
    let ids: Vec<LabelId> = slots.keys().copied().collect();
    for &id in &ids {
        refresh(slots.get_mut(&id).expect("known label"), id, &mut heap);
    }
    let mut last_key: Option<i64> = None;
    while let Some(entry) = heap.pop() {
        let slot = slots.get_mut(&entry.id).expect("known label");
        if slot.retired || slot.stamp != entry.stamp {
            continue;
        }
        debug_assert_eq!(circ_len_at(&slot.segs, entry.start.0), Some(entry.len.0));
        debug_assert!(last_key.map_or(true, |prev| entry.key <= prev));
        last_key = Some(entry.key);

        let iv = CircularInterval::new(Angle::new(entry.start.0), entry.len.0);
        let iv_set = AngularSet::from_interval(iv);
        slot.active = slot.active.union(&iv_set);
        slot.remove_interval_at(entry.start.0);
        slot.used += 1;
        refresh(slot, entry.id, &mut heap);

        for (nb, pair) in conflicts.neighbors(entry.id) {
            let Some(nb_slot) = slots.get_mut(&nb) else { continue };
            if nb_slot.retired {
                continue;
            }
            let cut = iv_set.intersect(&pair.soft);
            if cut.is_empty() {
                continue;
            }
            if nb_slot.apply_cut(cut.segments()) {
                refresh(nb_slot, nb, &mut heap);
            }
        }
    }
    let active: BTreeMap<LabelId, AngularSet> =
        slots.into_iter().map(|(id, s)| (id, s.active)).collect();
    RotationLabeling::from_active(cfg, active)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConflictStructure;
    use crate::model::{
        check_validity, AnchorCorner, AnchoredLabel, Instance, Point,
    };
    use alloc::vec;

    const PI: f64 = core::f64::consts::PI;

    fn unit_bl(id: LabelId, x: f64, y: f64) -> AnchoredLabel {
        AnchoredLabel::new(id, Point::new(x, y), 1.0, 1.0, AnchorCorner::BottomLeft)
    }

    fn pair_instance() -> (Instance, ConflictStructure) {
        let inst = Instance::new(vec![unit_bl(0, 0.0, 0.0), unit_bl(1, 1.2, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        (inst, cs)
    }

    fn solve_max(
        inst: &Instance,
        cs: &ConflictStructure,
        cfg: ModelConfig,
        engine: GreedyEngine,
    ) -> RotationLabeling {
        greedy_solve(
            inst,
            cs,
            cfg,
            GreedyOptions {
                strategy: GreedyStrategy::Max,
                engine,
            },
        )
        .unwrap()
    }

    #[test]
    fn pair_longest_range_schedules() {
        let (inst, cs) = pair_instance();
        let c = libm::acos(1.0 / 1.2);
        let s = libm::asin(1.0 / 1.2);

        // One range each: the first label keeps the full turn, the second is
        // confined to a single conflict-free gap.
        let cfg = ModelConfig::new(RangeModel::Limited(1), ConflictMode::Soft);
        let phi = solve_max(&inst, &cs, cfg, GreedyEngine::Recompute);
        assert!((phi.total_activity() - (3.0 * PI - 2.0 * s)).abs() < 1e-9);
        assert!(phi.active(0).is_full());
        let seg = phi.active(1).segments();
        assert_eq!(seg.len(), 1);
        assert!((seg[0].0 - s).abs() < 1e-9 && (seg[0].1 - (PI - s)).abs() < 1e-9);
        assert!(check_validity(&phi, &cs, cfg).is_valid());

        // Two ranges: the second label picks up the next gap as well.
        let cfg2 = ModelConfig::new(RangeModel::Limited(2), ConflictMode::Soft);
        let phi2 = solve_max(&inst, &cs, cfg2, GreedyEngine::Recompute);
        assert!((phi2.total_activity() - (3.0 * PI - 2.0 * s + 2.0 * c)).abs() < 1e-9);
        assert_eq!(phi2.active(1).interval_count(), 2);
        assert!(check_validity(&phi2, &cs, cfg2).is_valid());

        // Unbounded ranges: the second label collects every gap, reaching the
        // pair's optimum activity.
        let cfg_inf = ModelConfig::new(RangeModel::Unlimited, ConflictMode::Soft);
        let phi_inf = solve_max(&inst, &cs, cfg_inf, GreedyEngine::Recompute);
        assert!((phi_inf.total_activity() - (4.0 * PI - 4.0 * (s - c))).abs() < 1e-9);
        assert!(check_validity(&phi_inf, &cs, cfg_inf).is_valid());
    }

    #[test]
    fn engines_produce_identical_labelings() {
        let (inst, cs) = pair_instance();
        let chain = Instance::new(vec![
            unit_bl(0, 0.0, 0.0),
            unit_bl(1, 1.2, 0.0),
            unit_bl(2, 2.4, 0.0),
        ])
        .unwrap();
        let chain_cs = ConflictStructure::build(&chain).unwrap();
        let mixed = Instance::new(vec![
            AnchoredLabel::new(0, Point::new(0.0, 0.0), 1.0, 0.8, AnchorCorner::BottomLeft),
            AnchoredLabel::new(1, Point::new(1.1, 0.3), 1.2, 0.6, AnchorCorner::TopRight),
            AnchoredLabel::new(2, Point::new(-0.4, 1.0), 0.7, 1.1, AnchorCorner::TopLeft),
            AnchoredLabel::new(3, Point::new(0.9, -0.8), 0.9, 0.9, AnchorCorner::BottomRight),
        ])
        .unwrap();
        let mixed_cs = ConflictStructure::build(&mixed).unwrap();

        for (instance, conflicts) in [(&inst, &cs), (&chain, &chain_cs), (&mixed, &mixed_cs)] {
            for ranges in [
                RangeModel::Limited(1),
                RangeModel::Limited(2),
                RangeModel::Limited(3),
                RangeModel::Unlimited,
            ] {
                for mode in [ConflictMode::Soft, ConflictMode::Hard] {
                    let cfg = ModelConfig::new(ranges, mode);
                    let t1 = solve_max(instance, conflicts, cfg, GreedyEngine::Recompute);
                    let t2 = solve_max(instance, conflicts, cfg, GreedyEngine::IntervalHeaps);
                    assert_eq!(t1, t2, "engines diverged for {ranges:?} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn hard_mode_splits_the_turn() {
        // Anchors inside each other's rectangles: permanent soft conflict,
        // quarter-turn hard arcs. Both modes reach one full turn of total
        // activity with one range per label.
        let inst = Instance::new(vec![unit_bl(0, 0.0, 0.0), unit_bl(1, 0.5, 0.5)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        for mode in [ConflictMode::Soft, ConflictMode::Hard] {
            let cfg = ModelConfig::new(RangeModel::Limited(1), mode);
            let phi = solve_max(&inst, &cs, cfg, GreedyEngine::Recompute);
            assert!(
                (phi.total_activity() - TAU).abs() < 1e-9,
                "{mode:?}: {}",
                phi.total_activity()
            );
            assert!(check_validity(&phi, &cs, cfg).is_valid());
        }
    }

    #[test]
    fn base_ranges_consume_budget() {
        let (inst, cs) = pair_instance();
        let c = libm::acos(1.0 / 1.2);
        let s = libm::asin(1.0 / 1.2);
        let cfg = ModelConfig::new(RangeModel::Limited(2), ConflictMode::Soft);
        let mut base = RotationLabeling::empty(&inst, cfg);
        base.set_active(
            0,
            AngularSet::from_interval(CircularInterval::from_endpoints(
                Angle::new(0.0),
                Angle::new(PI),
            )),
        );
        let phi = greedy_solve_with_base(&inst, &cs, cfg, GreedyOptions::default(), &base).unwrap();
        // Label 0 keeps [0, pi) plus the gap between the far arcs; label 1
        // first wraps around the top of the turn ([pi-c, 2pi+c) as a single
        // range) and then takes the remaining gap. Hand-worked total:
        // (2pi - 2s) + (2pi + 2c - 2s).
        assert!((phi.total_activity() - (4.0 * PI + 2.0 * c - 4.0 * s)).abs() < 1e-9);
        assert_eq!(phi.active(0).interval_count(), 2);
        assert_eq!(phi.active(1).interval_count(), 2);
        assert!(phi.active(0).contains(0.1));
        assert!(check_validity(&phi, &cs, cfg).is_valid());
    }

    #[test]
    fn cost_strategies_agree_on_simple_chain() {
        let chain = Instance::new(vec![
            unit_bl(0, 0.0, 0.0),
            unit_bl(1, 1.2, 0.0),
            unit_bl(2, 2.4, 0.0),
        ])
        .unwrap();
        let cs = ConflictStructure::build(&chain).unwrap();
        let cfg = ModelConfig::new(RangeModel::Limited(1), ConflictMode::Soft);
        let max = greedy_solve(&chain, &cs, cfg, GreedyOptions::default()).unwrap();
        for strategy in [GreedyStrategy::LowCost, GreedyStrategy::BestRatio] {
            let phi = greedy_solve(&chain, &cs, cfg, GreedyOptions::strategy(strategy)).unwrap();
            assert!(check_validity(&phi, &cs, cfg).is_valid());
            // On the symmetric chain all strategies end at the same total.
            assert!((phi.total_activity() - max.total_activity()).abs() < 1e-9);
        }
    }

    #[test]
    fn isolated_label_gets_the_full_turn() {
        let inst = Instance::new(vec![unit_bl(7, 0.0, 0.0)]).unwrap();
        let cs = ConflictStructure::build(&inst).unwrap();
        let cfg = ModelConfig::new(RangeModel::Limited(1), ConflictMode::Soft);
        let phi = solve_max(&inst, &cs, cfg, GreedyEngine::Recompute);
        assert!(phi.active(7).is_full());
        let t2 = solve_max(&inst, &cs, cfg, GreedyEngine::IntervalHeaps);
        assert_eq!(phi, t2);
    }

    #[test]
    fn rejected_configurations() {
        let (inst, cs) = pair_instance();
        let zero_one = ModelConfig::new(RangeModel::ZeroOne, ConflictMode::Soft);
        assert!(matches!(
            greedy_solve(&inst, &cs, zero_one, GreedyOptions::default()),
            Err(CoreError::UnsupportedRangeModel(_))
        ));
        let cfg = ModelConfig::new(RangeModel::Limited(1), ConflictMode::Soft);
        assert!(matches!(
            greedy_solve(
                &inst,
                &cs,
                cfg,
                GreedyOptions {
                    strategy: GreedyStrategy::LowCost,
                    engine: GreedyEngine::IntervalHeaps,
                },
            ),
            Err(CoreError::UnsupportedStrategy(_))
        ));
        assert!(matches!(
            greedy_solve(
                &inst,
                &cs,
                ModelConfig::new(RangeModel::Limited(0), ConflictMode::Soft),
                GreedyOptions::default(),
            ),
            Err(CoreError::ZeroRangeBudget)
        ));
    }
}
