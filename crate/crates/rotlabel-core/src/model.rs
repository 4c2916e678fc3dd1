//! Instance and labeling model: anchored rectangular labels, consistency
//! models, rotation labelings and validity checking.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::angular::AngularSet;
#[cfg(test)]
use crate::angular::TAU;
use crate::error::CoreError;
use crate::geometry::ConflictStructure;

pub type LabelId = u64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        libm::hypot(other.x - self.x, other.y - self.y)
    }
}

/// Which corner of the label rectangle sits on the anchor point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum AnchorCorner {
    BottomLeft,
    BottomRight,
    TopLeft,
    TopRight,
}

impl AnchorCorner {
    pub const ALL: [AnchorCorner; 4] = [
        AnchorCorner::BottomLeft,
        AnchorCorner::BottomRight,
        AnchorCorner::TopLeft,
        AnchorCorner::TopRight,
    ];

    /// Offset of the rectangle's bottom-left corner from the anchor, in the
    /// label's own axis-aligned frame.
    pub fn offset(self, width: f64, height: f64) -> (f64, f64) {
        match self {
            AnchorCorner::BottomLeft => (0.0, 0.0),
            AnchorCorner::BottomRight => (-width, 0.0),
            AnchorCorner::TopLeft => (0.0, -height),
            AnchorCorner::TopRight => (-width, -height),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            AnchorCorner::BottomLeft => "BL",
            AnchorCorner::BottomRight => "BR",
            AnchorCorner::TopLeft => "TL",
            AnchorCorner::TopRight => "TR",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "BL" => Some(AnchorCorner::BottomLeft),
            "BR" => Some(AnchorCorner::BottomRight),
            "TL" => Some(AnchorCorner::TopLeft),
            "TR" => Some(AnchorCorner::TopRight),
            _ => None,
        }
    }
}

/// Axis-aligned rectangle, used for the unrotated (alpha = 0) layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    /// Open-interior overlap: shared edges do not count.
    pub fn intersects_interior(&self, other: &Rect) -> bool {
        self.min_x < other.max_x
            && other.min_x < self.max_x
            && self.min_y < other.max_y
            && other.min_y < self.max_y
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        (self.min_x..=self.max_x).contains(&p.x) && (self.min_y..=self.max_y).contains(&p.y)
    }
}

/// A rectangular label of fixed size anchored at one of its corners.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchoredLabel {
    pub id: LabelId,
    pub anchor: Point,
    pub width: f64,
    pub height: f64,
    pub corner: AnchorCorner,
    pub name: Option<alloc::string::String>,
    pub weight: Option<f64>,
}

impl AnchoredLabel {
    pub fn new(id: LabelId, anchor: Point, width: f64, height: f64, corner: AnchorCorner) -> Self {
        AnchoredLabel {
            id,
            anchor,
            width,
            height,
            corner,
            name: None,
            weight: None,
        }
    }

    /// Rectangle at rotation angle zero.
    pub fn rect_at_zero(&self) -> Rect {
        let (ox, oy) = self.corner.offset(self.width, self.height);
        Rect {
            min_x: self.anchor.x + ox,
            min_y: self.anchor.y + oy,
            max_x: self.anchor.x + ox + self.width,
            max_y: self.anchor.y + oy + self.height,
        }
    }

    /// Distance from the anchor to the farthest rectangle point. Since the
    /// anchor is a corner, this is the diagonal.
    pub fn reach(&self) -> f64 {
        libm::hypot(self.width, self.height)
    }
}

/// A statically labeled input map.
///
/// Invariants enforced at construction: ids unique, anchors pairwise
/// distinct, dimensions strictly positive, coordinates finite. Static label
/// overlap does not invalidate an instance; [`Instance::validate_static`]
/// reports it so callers can warn.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    labels: Vec<AnchoredLabel>,
    index: BTreeMap<LabelId, usize>,
}

impl Instance {
    pub fn new(labels: Vec<AnchoredLabel>) -> Result<Self, CoreError> {
        let mut index = BTreeMap::new();
        for (i, l) in labels.iter().enumerate() {
            if !(l.width > 0.0
                && l.height > 0.0
                && l.width.is_finite()
                && l.height.is_finite()
                && l.anchor.x.is_finite()
                && l.anchor.y.is_finite())
            {
                return Err(CoreError::InvalidLabelGeometry(l.id));
            }
            if index.insert(l.id, i).is_some() {
                return Err(CoreError::DuplicateLabelId(l.id));
            }
        }
        for i in 0..labels.len() {
            for j in (i + 1)..labels.len() {
                if labels[i].anchor == labels[j].anchor {
                    return Err(CoreError::CoincidentAnchors(labels[i].id, labels[j].id));
                }
            }
        }
        Ok(Instance { labels, index })
    }

    pub fn labels(&self) -> &[AnchoredLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, id: LabelId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn get(&self, id: LabelId) -> Option<&AnchoredLabel> {
        self.index_of(id).map(|i| &self.labels[i])
    }

    /// Pairs whose rectangles overlap in the unrotated layout, sorted by id.
    pub fn validate_static(&self) -> Vec<(LabelId, LabelId)> {
        let mut bad = Vec::new();
        for i in 0..self.labels.len() {
            let ri = self.labels[i].rect_at_zero();
            for j in (i + 1)..self.labels.len() {
                if ri.intersects_interior(&self.labels[j].rect_at_zero()) {
                    let (a, b) = (self.labels[i].id, self.labels[j].id);
                    bad.push((a.min(b), a.max(b)));
                }
            }
        }
        bad.sort_unstable();
        bad
    }
}

/// How many active ranges a label may use over the full turn.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangeModel {
    /// Active the whole turn or not at all.
    ZeroOne,
    /// At most k active ranges (k >= 1).
    Limited(u32),
    /// Any number of active ranges.
    Unlimited,
}

impl RangeModel {
    /// Per-label range budget; `None` means unbounded.
    pub fn budget(self) -> Option<u32> {
        match self {
            RangeModel::ZeroOne => Some(1),
            RangeModel::Limited(k) => Some(k),
            RangeModel::Unlimited => None,
        }
    }
}

/// Which conflicts a valid labeling must avoid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConflictMode {
    /// No two conflicting labels active at the same angle.
    Soft,
    /// Additionally, a label is never active while covering another anchor.
    Hard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub ranges: RangeModel,
    pub conflicts: ConflictMode,
}

impl ModelConfig {
    pub fn new(ranges: RangeModel, conflicts: ConflictMode) -> Self {
        ModelConfig { ranges, conflicts }
    }
}

/// An activity schedule: per label, the set of rotation angles where it is
/// drawn. Membership is half-open per [`AngularSet`], so ranges that share an
/// endpoint do not overlap.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationLabeling {
    model: ModelConfig,
    active: BTreeMap<LabelId, AngularSet>,
}

impl RotationLabeling {
    /// Empty schedule covering every label of the instance.
    pub fn empty(instance: &Instance, model: ModelConfig) -> Self {
        RotationLabeling {
            model,
            active: instance
                .labels()
                .iter()
                .map(|l| (l.id, AngularSet::empty()))
                .collect(),
        }
    }

    pub fn from_active(model: ModelConfig, active: BTreeMap<LabelId, AngularSet>) -> Self {
        RotationLabeling { model, active }
    }

    pub fn model(&self) -> ModelConfig {
        self.model
    }

    pub fn set_active(&mut self, id: LabelId, set: AngularSet) {
        self.active.insert(id, set);
    }

    /// Activity set of `id`; panics for labels outside the labeling.
    pub fn active(&self, id: LabelId) -> &AngularSet {
        self.active.get(&id).expect("label not in labeling")
    }

    pub fn active_opt(&self, id: LabelId) -> Option<&AngularSet> {
        self.active.get(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LabelId, &AngularSet)> {
        self.active.iter()
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    /// Sum of active range lengths over all labels.
    pub fn total_activity(&self) -> f64 {
        self.active.values().map(AngularSet::length).sum()
    }

    /// Total number of active ranges over all labels.
    pub fn total_ranges(&self) -> usize {
        self.active.values().map(AngularSet::interval_count).sum()
    }
}

/// Sum of active range lengths of a labeling.
pub fn total_activity(labeling: &RotationLabeling) -> f64 {
    labeling.total_activity()
}

#[derive(Clone, Debug, PartialEq)]
pub struct SoftViolation {
    pub i: LabelId,
    pub j: LabelId,
    pub overlap: AngularSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardViolation {
    pub coverer: LabelId,
    pub covered: LabelId,
    pub overlap: AngularSet,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BudgetViolation {
    pub id: LabelId,
    pub ranges: usize,
}

/// Exact (set-level, not sampled) validity report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidityReport {
    pub soft_violations: Vec<SoftViolation>,
    pub hard_violations: Vec<HardViolation>,
    pub budget_violations: Vec<BudgetViolation>,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.soft_violations.is_empty()
            && self.hard_violations.is_empty()
            && self.budget_violations.is_empty()
    }
}

/// Checks a labeling against the conflict structure under `cfg`.
///
/// Soft: for every stored pair, the two activity sets must not overlap inside
/// the pair's soft conflict set. Hard (hard mode only): a label must not be
/// active while its rectangle covers the other anchor. Budget: 0/1 demands
/// empty-or-full activity; Limited(k) caps the circular range count.
pub fn check_validity(
    labeling: &RotationLabeling,
    conflicts: &ConflictStructure,
    cfg: ModelConfig,
) -> ValidityReport {
    let mut report = ValidityReport::default();
    let empty = AngularSet::empty();
    let act = |id: LabelId| labeling.active.get(&id).unwrap_or(&empty);
    for pair in conflicts.pairs() {
        let ai = act(pair.i);
        let aj = act(pair.j);
        let overlap = ai.intersect(aj).intersect(&pair.soft);
        if !overlap.is_empty() {
            report.soft_violations.push(SoftViolation {
                i: pair.i,
                j: pair.j,
                overlap,
            });
        }
        if cfg.conflicts == ConflictMode::Hard {
            let cov_ij = ai.intersect(&pair.hard_i_covers_j);
            if !cov_ij.is_empty() {
                report.hard_violations.push(HardViolation {
                    coverer: pair.i,
                    covered: pair.j,
                    overlap: cov_ij,
                });
            }
            let cov_ji = aj.intersect(&pair.hard_j_covers_i);
            if !cov_ji.is_empty() {
                report.hard_violations.push(HardViolation {
                    coverer: pair.j,
                    covered: pair.i,
                    overlap: cov_ji,
                });
            }
        }
    }
    for (&id, set) in &labeling.active {
        let ranges = set.interval_count();
        let bad = match cfg.ranges {
            RangeModel::ZeroOne => !(set.is_empty() || set.is_full()),
            RangeModel::Limited(k) => ranges > k as usize,
            RangeModel::Unlimited => false,
        };
        if bad {
            report.budget_violations.push(BudgetViolation { id, ranges });
        }
    }
    report
}
