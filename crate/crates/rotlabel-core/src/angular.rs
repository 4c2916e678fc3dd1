//! Circular interval arithmetic on [0, 2pi).
//!
//! [`AngularSet`] is the canonical set type used for conflict ranges and label
//! activity. Internally a set is stored as disjoint, sorted linear segments
//! over the line [0, 2pi]; an interval that crosses the zero angle is split
//! into a tail segment ending at 2pi and a head segment starting at 0. The
//! split keeps every boolean operation a plain linear sweep. Wrap-aware views
//! (circular intervals, gap search) rejoin the two boundary segments.
//!
//! Set operations never invent new endpoint values: union, intersection and
//! complement only select among existing boundaries (plus snapping within
//! [`MERGE_EPS`] of 0 or 2pi). Solvers rely on this to keep range boundaries
//! bit-identical to the conflict events they came from.

use alloc::vec::Vec;

use crate::MERGE_EPS;

/// Full turn in radians.
pub const TAU: f64 = core::f64::consts::TAU;

/// Normalizes an angle in radians into [0, 2pi). Idempotent on normalized
/// input; maps 2pi (and -0.0) to 0.
pub fn normalize_angle(radians: f64) -> f64 {
    let mut r = radians % TAU;
    if r < 0.0 {
        r += TAU;
    }
    if r >= TAU {
        r -= TAU;
    }
    if r == 0.0 {
        0.0 // collapse -0.0
    } else {
        r
    }
}

/// Quantizes a length to the MERGE_EPS grid for comparisons. Mathematically
/// equal lengths computed along different float paths (e.g. pi - 2*asin(x)
/// versus 2*acos(x)) differ by a few ulps; comparing quantized keys keeps the
/// documented smallest-start tie-break deterministic instead of letting
/// rounding noise decide.
pub(crate) fn length_key(len: f64) -> i64 {
    libm::round(len * 1e12) as i64
}

/// Total-order wrapper over finite f64, for heap and map keys.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A rotation angle, kept normalized to [0, 2pi).
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd)]
pub struct Angle(f64);

impl Angle {
    pub fn new(radians: f64) -> Self {
        Angle(normalize_angle(radians))
    }

    /// Value in radians, always within [0, 2pi).
    pub fn rad(self) -> f64 {
        self.0
    }
}

impl From<f64> for Angle {
    fn from(radians: f64) -> Self {
        Angle::new(radians)
    }
}

/// A circular interval [start, start + len) on the unit circle, with
/// 0 <= len <= 2pi. Wraparound is implicit in the length: an interval with
/// start + len > 2pi continues through zero. `len == 2pi` is the designated
/// full-circle element; `len == 0` is empty.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircularInterval {
    start: Angle,
    len: f64,
}

impl CircularInterval {
    pub fn new(start: Angle, len: f64) -> Self {
        assert!(len.is_finite() && (0.0..=TAU + MERGE_EPS).contains(&len));
        CircularInterval {
            start,
            len: len.min(TAU),
        }
    }

    /// Interval from `a` counterclockwise to `b`. When a > b the interval
    /// wraps through zero: [a, 2pi) followed by [0, b). `a == b` yields the
    /// empty interval (use [`CircularInterval::full`] for the whole circle).
    pub fn from_endpoints(a: Angle, b: Angle) -> Self {
        let len = normalize_angle(b.rad() - a.rad());
        CircularInterval { start: a, len }
    }

    pub fn full() -> Self {
        CircularInterval {
            start: Angle::new(0.0),
            len: TAU,
        }
    }

    pub fn empty() -> Self {
        CircularInterval {
            start: Angle::new(0.0),
            len: 0.0,
        }
    }

    pub fn start(&self) -> Angle {
        self.start
    }

    /// End angle, normalized. For the full circle this equals the start.
    pub fn end(&self) -> Angle {
        Angle::new(self.start.rad() + self.len)
    }

    pub fn len(&self) -> f64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0.0
    }

    pub fn is_full(&self) -> bool {
        self.len >= TAU
    }

    /// Membership under half-open [start, start+len) semantics.
    pub fn contains(&self, angle: Angle) -> bool {
        if self.is_full() {
            return true;
        }
        normalize_angle(angle.rad() - self.start.rad()) < self.len
    }
}

/// Canonical set of disjoint circular intervals on [0, 2pi).
///
/// Canonical form: segments sorted by start, each longer than [`MERGE_EPS`],
/// pairwise separated by more than [`MERGE_EPS`] (near-adjacent segments are
/// merged), endpoints within [`MERGE_EPS`] of 0 or 2pi snapped onto the
/// boundary. Two sets are equal iff their canonical segment lists are equal.
/// Membership is half-open: a stored segment [a, b] contains [a, b).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AngularSet {
    /// Disjoint, sorted; each 0 <= a < b <= 2pi.
    segs: Vec<(f64, f64)>,
}

impl AngularSet {
    pub fn empty() -> Self {
        AngularSet { segs: Vec::new() }
    }

    pub fn full() -> Self {
        AngularSet {
            segs: alloc::vec![(0.0, TAU)],
        }
    }

    pub fn from_interval(iv: CircularInterval) -> Self {
        Self::from_intervals(core::iter::once(iv))
    }

    pub fn from_intervals<I: IntoIterator<Item = CircularInterval>>(ivs: I) -> Self {
        let mut segs = Vec::new();
        for iv in ivs {
            push_interval_segs(&mut segs, iv);
        }
        canonicalize(&mut segs);
        AngularSet { segs }
    }

    pub fn is_empty(&self) -> bool {
        self.segs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.segs.len() == 1 && self.segs[0] == (0.0, TAU)
    }

    /// Total angular measure of the set.
    pub fn length(&self) -> f64 {
        self.segs.iter().map(|&(a, b)| b - a).sum()
    }

    /// Half-open membership test; the angle is normalized first.
    pub fn contains(&self, radians: f64) -> bool {
        let x = normalize_angle(radians);
        let i = self.segs.partition_point(|&(a, _)| a <= x);
        i > 0 && x < self.segs[i - 1].1
    }

    pub fn union(&self, other: &AngularSet) -> AngularSet {
        let mut segs = Vec::with_capacity(self.segs.len() + other.segs.len());
        segs.extend_from_slice(&self.segs);
        segs.extend_from_slice(&other.segs);
        canonicalize(&mut segs);
        AngularSet { segs }
    }

    pub fn intersect(&self, other: &AngularSet) -> AngularSet {
        let (mut i, mut j) = (0, 0);
        let mut segs = Vec::new();
        while i < self.segs.len() && j < other.segs.len() {
            let (a1, b1) = self.segs[i];
            let (a2, b2) = other.segs[j];
            let lo = a1.max(a2);
            let hi = b1.min(b2);
            if lo < hi {
                segs.push((lo, hi));
            }
            if b1 <= b2 {
                i += 1;
            } else {
                j += 1;
            }
        }
        canonicalize(&mut segs);
        AngularSet { segs }
    }

    pub fn complement(&self) -> AngularSet {
        let mut segs = Vec::with_capacity(self.segs.len() + 1);
        let mut cursor = 0.0;
        for &(a, b) in &self.segs {
            if a > cursor {
                segs.push((cursor, a));
            }
            cursor = b;
        }
        if cursor < TAU {
            segs.push((cursor, TAU));
        }
        canonicalize(&mut segs);
        AngularSet { segs }
    }

    pub fn subtract(&self, other: &AngularSet) -> AngularSet {
        self.intersect(&other.complement())
    }

    /// Measure of the symmetric difference; the approximate-equality metric.
    pub fn symdiff_length(&self, other: &AngularSet) -> f64 {
        let shared = self.intersect(other).length();
        (self.length() - shared) + (other.length() - shared)
    }

    /// Maximal circular intervals of the set, wrap-merged across zero and
    /// sorted by start angle (a wrapping interval, whose start is numerically
    /// largest, comes last). The full circle yields the single full element.
    pub fn intervals(&self) -> Vec<CircularInterval> {
        if self.is_full() {
            return alloc::vec![CircularInterval::full()];
        }
        let n = self.segs.len();
        if n == 0 {
            return Vec::new();
        }
        let wraps = n >= 2 && self.segs[0].0 == 0.0 && self.segs[n - 1].1 == TAU;
        let mut out = Vec::with_capacity(n);
        // When wrapping, the head segment [0, b0] is reported as part of the
        // wrap interval rather than on its own.
        let body = if wraps { &self.segs[1..n - 1] } else { &self.segs[..] };
        for &(a, b) in body {
            out.push(CircularInterval {
                start: Angle::new(a),
                len: b - a,
            });
        }
        if wraps {
            let (_, head_end) = self.segs[0];
            let (tail_start, _) = self.segs[n - 1];
            out.push(CircularInterval {
                start: Angle::new(tail_start),
                len: (TAU - tail_start) + head_end,
            });
        }
        out
    }

    /// Number of maximal circular intervals (wrap-aware).
    pub fn interval_count(&self) -> usize {
        if self.is_full() {
            return 1;
        }
        let n = self.segs.len();
        if n >= 2 && self.segs[0].0 == 0.0 && self.segs[n - 1].1 == TAU {
            n - 1
        } else {
            n
        }
    }

    /// Longest member interval; ties (within the 1e-12 length grid) go to the
    /// smallest start angle. `None` when empty.
    pub fn longest_interval(&self) -> Option<CircularInterval> {
        let mut best: Option<(i64, CircularInterval)> = None;
        for iv in self.intervals() {
            let key = length_key(iv.len());
            best = match best {
                None => Some((key, iv)),
                Some((bk, biv)) => {
                    if key > bk || (key == bk && iv.start().rad() < biv.start().rad()) {
                        Some((key, iv))
                    } else {
                        Some((bk, biv))
                    }
                }
            };
        }
        best.map(|(_, iv)| iv)
    }

    /// Longest contiguous interval not in the set. Empty set: the full
    /// circle. Full set: the empty interval. Ties go to the smallest start.
    pub fn longest_gap(&self) -> CircularInterval {
        self.complement()
            .longest_interval()
            .unwrap_or_else(CircularInterval::empty)
    }

    /// Rotates the whole set by `delta` radians.
    pub fn shift(&self, delta: f64) -> AngularSet {
        AngularSet::from_intervals(self.intervals().into_iter().map(|iv| {
            CircularInterval::new(Angle::new(iv.start().rad() + delta), iv.len())
        }))
    }

    /// Image of the set under the reflection x -> theta - x. Used to map
    /// relative-bearing conditions back to map rotation angles.
    pub fn reflect_about(&self, theta: f64) -> AngularSet {
        AngularSet::from_intervals(self.intervals().into_iter().map(|iv| {
            let start = theta - (iv.start().rad() + iv.len());
            CircularInterval::new(Angle::new(start), iv.len())
        }))
    }

    /// Linear segments over [0, 2pi] in canonical order.
    pub fn segments(&self) -> &[(f64, f64)] {
        &self.segs
    }

    /// Builds a set directly from canonical-ready linear segments.
    pub(crate) fn from_raw_segments(mut segs: Vec<(f64, f64)>) -> AngularSet {
        canonicalize(&mut segs);
        AngularSet { segs }
    }
}

fn push_interval_segs(segs: &mut Vec<(f64, f64)>, iv: CircularInterval) {
    if iv.is_empty() {
        return;
    }
    if iv.is_full() {
        segs.push((0.0, TAU));
        return;
    }
    let a = iv.start().rad();
    let end = a + iv.len();
    if end <= TAU {
        segs.push((a, end));
    } else {
        segs.push((a, TAU));
        segs.push((0.0, end - TAU));
    }
}

/// Sorts, snaps boundary-adjacent endpoints onto 0/2pi, merges segments whose
/// gap is within MERGE_EPS, and drops degenerate segments.
fn canonicalize(segs: &mut Vec<(f64, f64)>) {
    for seg in segs.iter_mut() {
        let (mut a, mut b) = *seg;
        a = a.clamp(0.0, TAU);
        b = b.clamp(0.0, TAU);
        if a < MERGE_EPS {
            a = 0.0;
        }
        if b > TAU - MERGE_EPS {
            b = TAU;
        }
        *seg = (a, b);
    }
    segs.retain(|&(a, b)| b > a);
    segs.sort_by(|x, y| x.partial_cmp(y).expect("angular endpoints are never NaN"));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(segs.len());
    for &(a, b) in segs.iter() {
        match out.last_mut() {
            Some(last) if a <= last.1 + MERGE_EPS => {
                if b > last.1 {
                    last.1 = b;
                }
            }
            _ => out.push((a, b)),
        }
    }
    out.retain(|&(a, b)| b - a > MERGE_EPS);
    *segs = out;
}

#[cfg(test)]
mod tests {
    use super::*;

    const PI: f64 = core::f64::consts::PI;

    fn set(ivs: &[(f64, f64)]) -> AngularSet {
        AngularSet::from_intervals(
            ivs.iter()
                .map(|&(a, b)| CircularInterval::from_endpoints(Angle::new(a), Angle::new(b))),
        )
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_angle(TAU), 0.0);
        assert_eq!(normalize_angle(-0.0), 0.0);
        assert_eq!(normalize_angle(3.0 * PI), PI);
        let x = normalize_angle(-1.0e-9);
        assert!((0.0..TAU).contains(&x));
        assert_eq!(normalize_angle(x), x);
    }

    #[test]
    fn wraparound_interval_membership_and_length() {
        // [3pi/2, pi/2) wraps through zero.
        let iv = CircularInterval::from_endpoints(Angle::new(1.5 * PI), Angle::new(0.5 * PI));
        assert!((iv.len() - PI).abs() < 1e-15);
        assert!(iv.contains(Angle::new(0.0)));
        assert!(iv.contains(Angle::new(1.75 * PI)));
        assert!(!iv.contains(Angle::new(PI)));
        // half-open: start in, end out
        assert!(iv.contains(Angle::new(1.5 * PI)));
        assert!(!iv.contains(Angle::new(0.5 * PI)));
    }

    #[test]
    fn degenerate_interval_is_empty() {
        let iv = CircularInterval::from_endpoints(Angle::new(1.0), Angle::new(1.0));
        assert!(iv.is_empty());
        assert!(AngularSet::from_interval(iv).is_empty());
    }

    #[test]
    fn full_circle_element() {
        let f = AngularSet::full();
        assert!(f.is_full());
        assert_eq!(f.length(), TAU);
        assert_eq!(f.intervals(), alloc::vec![CircularInterval::full()]);
        assert!(f.contains(0.0) && f.contains(TAU - 1e-9));
        // union of two halves closes to the full element
        let halves = set(&[(0.0, PI), (PI, 0.0)]);
        assert!(halves.is_full());
    }

    #[test]
    fn complement_of_quarter_matches_worked_example() {
        // s = [0, pi/2) -> complement [pi/2, 2pi), length 3pi/2
        let s = set(&[(0.0, 0.5 * PI)]);
        let c = s.complement();
        assert_eq!(c.segments(), &[(0.5 * PI, TAU)]);
        assert!((c.length() - 1.5 * PI).abs() < 1e-15);
        let gap = s.longest_gap();
        assert_eq!(gap.start().rad(), 0.5 * PI);
        assert!((gap.len() - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn empty_and_full_gap_conventions() {
        assert_eq!(AngularSet::empty().longest_gap(), CircularInterval::full());
        assert_eq!(AngularSet::full().longest_gap().len(), 0.0);
    }

    #[test]
    fn near_adjacent_segments_merge() {
        let s = set(&[(0.0, 1.0), (1.0 + 1e-13, 2.0)]);
        assert_eq!(s.segments().len(), 1);
        assert_eq!(s.segments()[0], (0.0, 2.0));
    }

    #[test]
    fn wrap_merge_in_intervals() {
        // [11pi/6, 2pi) and [0, pi/6) are one circular interval.
        let s = set(&[(11.0 * PI / 6.0, PI / 6.0)]);
        assert_eq!(s.segments().len(), 2);
        let ivs = s.intervals();
        assert_eq!(ivs.len(), 1);
        assert_eq!(s.interval_count(), 1);
        assert_eq!(ivs[0].start().rad(), 11.0 * PI / 6.0);
        assert!((ivs[0].len() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn unit_square_pair_gap_structure() {
        // Conflict arcs of two bottom-left-anchored unit squares at anchor
        // distance 1.2: |cos a| < 5/6 and |sin a| < 5/6. Four arcs, four gaps
        // of equal length; the smallest-start tie-break picks the gap at
        // asin(5/6).
        let c = libm::acos(5.0 / 6.0);
        let s = libm::asin(5.0 / 6.0);
        let arcs = set(&[
            (c, s),
            (PI - s, PI - c),
            (PI + c, PI + s),
            (TAU - s, TAU - c),
        ]);
        assert_eq!(arcs.interval_count(), 4);
        let gaps = arcs.complement();
        assert_eq!(gaps.interval_count(), 4);
        for iv in gaps.intervals() {
            assert!((iv.len() - 1.171_371_086_857_4).abs() < 1e-9);
        }
        let g = arcs.longest_gap();
        assert!((g.start().rad() - 0.985_110_783_337_7).abs() < 1e-9);
        assert!((g.len() - (PI - 2.0 * s)).abs() < 1e-12);
    }

    #[test]
    fn boolean_op_identities() {
        let a = set(&[(0.2, 1.0), (3.0, 5.5)]);
        let b = set(&[(0.8, 3.4), (6.0, 0.1)]);
        let u = a.union(&b);
        let i = a.intersect(&b);
        assert!((u.length() + i.length() - a.length() - b.length()).abs() < 1e-12);
        assert_eq!(a.complement().complement(), a);
        assert!((a.complement().length() - (TAU - a.length())).abs() < 1e-12);
        for probe in [0.0, 0.15, 0.5, 0.9, 2.0, 3.2, 5.9, 6.1, 6.28] {
            assert_eq!(u.contains(probe), a.contains(probe) || b.contains(probe));
            assert_eq!(i.contains(probe), a.contains(probe) && b.contains(probe));
            assert_eq!(
                a.subtract(&b).contains(probe),
                a.contains(probe) && !b.contains(probe)
            );
        }
    }

    #[test]
    fn shift_and_reflect() {
        let a = set(&[(0.3, 1.1), (4.0, 5.0)]);
        let sh = a.shift(1.0);
        for probe in [0.0, 0.4, 1.2, 4.5, 5.5] {
            assert_eq!(sh.contains(probe + 1.0), a.contains(probe));
        }
        let rf = a.reflect_about(2.0);
        for probe in [0.31, 0.9, 1.05, 4.2, 4.9] {
            // boundary images are half-open on the other side; probe interiors
            assert!(rf.contains(2.0 - probe) == a.contains(probe));
        }
        assert!((rf.length() - a.length()).abs() < 1e-12);
    }
}
