//! Error type shared by the core modules.

use alloc::string::String;

use crate::model::LabelId;

#[derive(Clone, Debug, PartialEq)]
pub enum CoreError {
    /// Two labels share the same id.
    DuplicateLabelId(LabelId),
    /// Two labels share the same anchor point; relative bearings are
    /// undefined there.
    CoincidentAnchors(LabelId, LabelId),
    /// Label dimensions must be strictly positive and coordinates finite.
    InvalidLabelGeometry(LabelId),
    /// A range budget of zero admits no activity at all.
    ZeroRangeBudget,
    /// The requested operation does not support this range model.
    UnsupportedRangeModel(&'static str),
    /// The improved greedy engine only implements the Max strategy.
    UnsupportedStrategy(&'static str),
    /// minimize_ranges_solve requires a model built with the flag set.
    MinimizeRangesNotSet,
    /// A connected component exceeds the solver's label capacity.
    ComponentTooLarge(usize),
    /// Malformed solver solution file.
    SolutionParse { line: usize, message: String },
    /// The labeling and conflict structure disagree on the label set.
    UnknownLabel(LabelId),
}

impl core::fmt::Display for CoreError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CoreError::DuplicateLabelId(id) => write!(f, "duplicate label id {id}"),
            CoreError::CoincidentAnchors(a, b) => {
                write!(f, "labels {a} and {b} have coincident anchors")
            }
            CoreError::InvalidLabelGeometry(id) => {
                write!(f, "label {id} has non-positive dimensions or non-finite coordinates")
            }
            CoreError::ZeroRangeBudget => write!(f, "range budget k must be at least 1"),
            CoreError::UnsupportedRangeModel(op) => {
                write!(f, "{op} does not support this range model")
            }
            CoreError::UnsupportedStrategy(op) => write!(f, "{op}"),
            CoreError::MinimizeRangesNotSet => {
                write!(f, "model was not built with minimize_ranges set")
            }
            CoreError::ComponentTooLarge(n) => {
                write!(f, "conflict component with {n} labels exceeds solver capacity")
            }
            CoreError::SolutionParse { line, message } => {
                write!(f, "solution file line {line}: {message}")
            }
            CoreError::UnknownLabel(id) => write!(f, "label {id} not present in the instance"),
        }
    }
}

impl core::error::Error for CoreError {}
