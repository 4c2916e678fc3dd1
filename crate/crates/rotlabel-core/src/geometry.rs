//! Closed-form angular conflict sets for co-rotating anchored labels, and
//! the instance-level conflict structure assembled from them.
//!
//! When the map rotates by `alpha` (labels co-rotate counterclockwise about
//! their anchors), the displacement between two anchors, expressed in the
//! shared label frame, is `(r cos(theta - alpha), r sin(theta - alpha))`
//! where `(r, theta)` is the polar form of the world-space displacement.
//! Rectangle overlap and anchor coverage therefore reduce to box conditions
//! on that vector, and each box condition to at most four circular arcs.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use crate::angular::{Angle, AngularSet, CircularInterval, TAU};
use crate::error::CoreError;
use crate::model::{AnchoredLabel, Instance, LabelId, Point};
use crate::EVENT_EPS;

const PI: f64 = core::f64::consts::PI;

fn arc(a: f64, b: f64) -> AngularSet {
    AngularSet::from_interval(CircularInterval::from_endpoints(Angle::new(a), Angle::new(b)))
}

/// `{beta : cos beta < h}`.
fn cos_below(h: f64) -> AngularSet {
    if h >= 1.0 {
        AngularSet::full()
    } else if h <= -1.0 {
        AngularSet::empty()
    } else {
        let a = libm::acos(h);
        arc(a, TAU - a)
    }
}

/// `{beta : cos beta > l}`.
fn cos_above(l: f64) -> AngularSet {
    if l <= -1.0 {
        AngularSet::full()
    } else if l >= 1.0 {
        AngularSet::empty()
    } else {
        let a = libm::acos(l);
        arc(TAU - a, a)
    }
}

/// `{beta : sin beta < h}`.
fn sin_below(h: f64) -> AngularSet {
    if h >= 1.0 {
        AngularSet::full()
    } else if h <= -1.0 {
        AngularSet::empty()
    } else {
        let a = libm::asin(h);
        arc(PI - a, a)
    }
}

/// `{beta : sin beta > l}`.
fn sin_above(l: f64) -> AngularSet {
    if l <= -1.0 {
        AngularSet::full()
    } else if l >= 1.0 {
        AngularSet::empty()
    } else {
        let a = libm::asin(l);
        arc(a, PI - a)
    }
}

/// `{beta : (r cos beta, r sin beta)` lies in the open box `}`.
fn beta_box_set(r: f64, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> AngularSet {
    cos_above(x_lo / r)
        .intersect(&cos_below(x_hi / r))
        .intersect(&sin_above(y_lo / r))
        .intersect(&sin_below(y_hi / r))
}

fn delta_polar(from: &AnchoredLabel, to: &AnchoredLabel) -> Result<(f64, f64), CoreError> {
    let dx = to.anchor.x - from.anchor.x;
    let dy = to.anchor.y - from.anchor.y;
    let r = libm::hypot(dx, dy);
    if r == 0.0 {
        return Err(CoreError::CoincidentAnchors(from.id, to.id));
    }
    Ok((r, crate::angular::normalize_angle(libm::atan2(dy, dx))))
}

/// Rotation angles at which the two label rectangles overlap in their
/// interiors. Symmetric in its arguments up to rounding.
pub fn soft_conflict_set(l1: &AnchoredLabel, l2: &AnchoredLabel) -> Result<AngularSet, CoreError> {
    let (r, theta) = delta_polar(l1, l2)?;
    let (o1x, o1y) = l1.corner.offset(l1.width, l1.height);
    let (o2x, o2y) = l2.corner.offset(l2.width, l2.height);
    let beta = beta_box_set(
        r,
        o1x - o2x - l2.width,
        o1x - o2x + l1.width,
        o1y - o2y - l2.height,
        o1y - o2y + l1.height,
    );
    Ok(beta.reflect_about(theta))
}

/// Rotation angles at which `coverer`'s rectangle contains `covered`'s
/// anchor point. Constrains `coverer` only.
pub fn hard_conflict_set(
    coverer: &AnchoredLabel,
    covered: &AnchoredLabel,
) -> Result<AngularSet, CoreError> {
    let (r, theta) = delta_polar(coverer, covered)?;
    let (ox, oy) = coverer.corner.offset(coverer.width, coverer.height);
    let beta = beta_box_set(r, ox, ox + coverer.width, oy, oy + coverer.height);
    Ok(beta.reflect_about(theta))
}

/// Rotation angles at which `label`'s rectangle contains the point `p`.
pub fn covers_point_set(label: &AnchoredLabel, p: Point) -> Result<AngularSet, CoreError> {
    let dx = p.x - label.anchor.x;
    let dy = p.y - label.anchor.y;
    let r = libm::hypot(dx, dy);
    if r == 0.0 {
        // The anchor itself is always covered.
        return Ok(AngularSet::full());
    }
    let theta = crate::angular::normalize_angle(libm::atan2(dy, dx));
    let (ox, oy) = label.corner.offset(label.width, label.height);
    let beta = beta_box_set(r, ox, ox + label.width, oy, oy + label.height);
    Ok(beta.reflect_about(theta))
}

/// Conflict data for an unordered label pair, stored with `i < j`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairConflict {
    pub i: LabelId,
    pub j: LabelId,
    /// Angles where the rectangles overlap.
    pub soft: AngularSet,
    /// Angles where `i`'s rectangle covers `j`'s anchor.
    pub hard_i_covers_j: AngularSet,
    /// Angles where `j`'s rectangle covers `i`'s anchor.
    pub hard_j_covers_i: AngularSet,
}

impl PairConflict {
    pub fn other(&self, id: LabelId) -> LabelId {
        if self.i == id {
            self.j
        } else {
            self.i
        }
    }

    pub fn involves(&self, id: LabelId) -> bool {
        self.i == id || self.j == id
    }

    /// Hard set constraining `id`: angles where `id` covers the other anchor.
    pub fn hard_of(&self, id: LabelId) -> &AngularSet {
        if self.i == id {
            &self.hard_i_covers_j
        } else {
            &self.hard_j_covers_i
        }
    }
}

/// Aggregate conflict metrics for an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConflictStats {
    pub labels: usize,
    pub pairs: usize,
    /// Event angles strictly inside (0, 2pi).
    pub interior_events: usize,
    /// Max over labels of the soft conflict range count summed over its pairs.
    pub max_conflict_ranges: usize,
}

/// All pairwise conflict sets of an instance, with per-label adjacency and
/// the sorted event angles that bound its atomic intervals.
#[derive(Clone, Debug)]
pub struct ConflictStructure {
    labels: Vec<LabelId>,
    pairs: Vec<PairConflict>,
    adjacency: BTreeMap<LabelId, Vec<usize>>,
    events: Vec<f64>,
}

impl ConflictStructure {
    /// Computes every conflicting pair of the instance. Pairs whose anchors
    /// are farther apart than the sum of their rectangle diagonals are pruned
    /// by a uniform grid without evaluating any trigonometry.
    pub fn build(instance: &Instance) -> Result<Self, CoreError> {
        let labels = instance.labels();
        let mut ids: Vec<LabelId> = labels.iter().map(|l| l.id).collect();
        ids.sort_unstable();

        let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
        if labels.len() > 1 {
            let rmax = labels.iter().map(AnchoredLabel::reach).fold(0.0_f64, f64::max);
            let cell = 2.0 * rmax;
            let key = |p: &Point| -> (i64, i64) {
                (libm::floor(p.x / cell) as i64, libm::floor(p.y / cell) as i64)
            };
            let mut grid: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
            for (idx, l) in labels.iter().enumerate() {
                grid.entry(key(&l.anchor)).or_default().push(idx);
            }
            for (idx, l) in labels.iter().enumerate() {
                let (cx, cy) = key(&l.anchor);
                for dx in -1i64..=1 {
                    for dy in -1i64..=1 {
                        let cell_key = (cx.saturating_add(dx), cy.saturating_add(dy));
                        let Some(bucket) = grid.get(&cell_key) else { continue };
                        for &other in bucket {
                            if other == idx {
                                continue;
                            }
                            let (a, b) = (idx.min(other), idx.max(other));
                            let dist = labels[a].anchor.distance(&labels[b].anchor);
                            if dist <= labels[a].reach() + labels[b].reach() {
                                candidates.insert((a, b));
                            }
                        }
                    }
                }
            }
        }

        let mut pairs = Vec::new();
        for (a, b) in candidates {
            let (la, lb) = if labels[a].id < labels[b].id {
                (&labels[a], &labels[b])
            } else {
                (&labels[b], &labels[a])
            };
            let soft = soft_conflict_set(la, lb)?;
            let hij = hard_conflict_set(la, lb)?;
            let hji = hard_conflict_set(lb, la)?;
            if !(soft.is_empty() && hij.is_empty() && hji.is_empty()) {
                pairs.push(PairConflict {
                    i: la.id,
                    j: lb.id,
                    soft,
                    hard_i_covers_j: hij,
                    hard_j_covers_i: hji,
                });
            }
        }
        Self::from_pairs(ids, pairs)
    }

    /// Assembles a structure from precomputed pairs, e.g. for a subproblem
    /// restricted to a subset of labels. Pairs with `i > j` are normalized;
    /// ids must belong to `label_ids`.
    pub fn from_pairs(
        mut label_ids: Vec<LabelId>,
        mut pairs: Vec<PairConflict>,
    ) -> Result<Self, CoreError> {
        label_ids.sort_unstable();
        label_ids.dedup();
        for p in &mut pairs {
            if p.i == p.j {
                return Err(CoreError::UnknownLabel(p.i));
            }
            if p.i > p.j {
                core::mem::swap(&mut p.i, &mut p.j);
                core::mem::swap(&mut p.hard_i_covers_j, &mut p.hard_j_covers_i);
            }
        }
        pairs.sort_by(|a, b| (a.i, a.j).cmp(&(b.i, b.j)));
        let mut adjacency: BTreeMap<LabelId, Vec<usize>> =
            label_ids.iter().map(|&id| (id, Vec::new())).collect();
        for (k, p) in pairs.iter().enumerate() {
            for id in [p.i, p.j] {
                adjacency
                    .get_mut(&id)
                    .ok_or(CoreError::UnknownLabel(id))?
                    .push(k);
            }
        }
        let events = collect_event_angles(
            pairs
                .iter()
                .flat_map(|p| [&p.soft, &p.hard_i_covers_j, &p.hard_j_covers_i]),
        );
        Ok(ConflictStructure {
            labels: label_ids,
            pairs,
            adjacency,
            events,
        })
    }

    pub fn labels(&self) -> &[LabelId] {
        &self.labels
    }

    pub fn pairs(&self) -> &[PairConflict] {
        &self.pairs
    }

    /// Sorted event angles, always starting with 0 and ending with 2pi.
    /// Consecutive events bound the atomic intervals on which every conflict
    /// set is constant.
    pub fn events(&self) -> &[f64] {
        &self.events
    }

    /// Indices into `pairs()` involving `id`.
    pub fn incident(&self, id: LabelId) -> &[usize] {
        self.adjacency.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn neighbors(&self, id: LabelId) -> impl Iterator<Item = (LabelId, &PairConflict)> + '_ {
        self.incident(id).iter().map(move |&k| {
            let p = &self.pairs[k];
            (p.other(id), p)
        })
    }

    /// Union of all hard sets constraining `id` (angles where activating
    /// `id` would cover some other anchor).
    pub fn hard_cover_set(&self, id: LabelId) -> AngularSet {
        let mut out = AngularSet::empty();
        for &k in self.incident(id) {
            out = out.union(self.pairs[k].hard_of(id));
        }
        out
    }

    pub fn stats(&self) -> ConflictStats {
        let mut max_ranges = 0;
        for incident in self.adjacency.values() {
            let total: usize = incident
                .iter()
                .map(|&k| self.pairs[k].soft.interval_count())
                .sum();
            max_ranges = max_ranges.max(total);
        }
        ConflictStats {
            labels: self.labels.len(),
            pairs: self.pairs.len(),
            interior_events: self.events.len().saturating_sub(2),
            max_conflict_ranges: max_ranges,
        }
    }
}

/// Gathers segment endpoints of the given sets into a sorted event list over
/// [0, 2pi]. Endpoints closer than [`EVENT_EPS`] collapse to the smallest
/// member of their cluster; 0 and 2pi are always present and absorb anything
/// within [`EVENT_EPS`] of them.
pub fn collect_event_angles<'a>(sets: impl Iterator<Item = &'a AngularSet>) -> Vec<f64> {
    let mut vals: Vec<f64> = Vec::new();
    for set in sets {
        for &(a, b) in set.segments() {
            vals.push(a);
            vals.push(b);
        }
    }
    vals.sort_by(f64::total_cmp);
    let mut events = Vec::with_capacity(vals.len() + 2);
    events.push(0.0);
    let mut rep = f64::NEG_INFINITY;
    for v in vals {
        if v - rep > EVENT_EPS {
            rep = v;
            if v > EVENT_EPS && v < TAU - EVENT_EPS {
                events.push(v);
            }
        }
    }
    events.push(TAU);
    events
}
