//! Schedule quality measures.

use crate::angular::TAU;
use crate::model::RotationLabeling;

/// Summary statistics of one labeling. Labels missing from the labeling
/// count as empty, so pass the instance size as `expected_labels`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LabelingMetrics {
    pub labels: usize,
    pub total_activity: f64,
    /// Fraction of the best conceivable activity, `labels` full turns.
    pub activity_ratio: f64,
    /// Mean active range length as a fraction of the full turn
    /// (0 when nothing is active).
    pub mean_range_len_norm: f64,
    pub mean_ranges_per_label: f64,
    /// Appear/disappear transitions over one full rotation; a full-turn
    /// range never flickers, every other range flickers twice.
    pub flicker_events: usize,
    pub empty_labels: usize,
}

pub fn compute_metrics(labeling: &RotationLabeling, expected_labels: usize) -> LabelingMetrics {
    let labels = expected_labels.max(labeling.len());
    let total_activity = labeling.total_activity();
    let mut ranges = 0usize;
    let mut flicker_events = 0usize;
    let mut nonempty = 0usize;
    for (_, set) in labeling.iter() {
        let count = set.interval_count();
        ranges += count;
        if !set.is_empty() {
            nonempty += 1;
        }
        if !set.is_full() {
            flicker_events += 2 * count;
        }
    }
    let div = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    LabelingMetrics {
        labels,
        total_activity,
        activity_ratio: div(total_activity, labels as f64 * TAU),
        mean_range_len_norm: div(div(total_activity, ranges as f64), TAU),
        mean_ranges_per_label: div(ranges as f64, labels as f64),
        flicker_events,
        empty_labels: labels - nonempty,
    }
}
