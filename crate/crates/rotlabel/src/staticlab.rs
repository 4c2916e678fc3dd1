//! Static 4P placement: pick one anchor corner per point so the unrotated
//! layout is overlap-free, dropping points that cannot be placed.

use rotlabel_core::model::{AnchorCorner, AnchoredLabel, Instance, Point, Rect};

use crate::Error;

/// A point that wants a label, before a corner has been chosen.
#[derive(Clone, Debug)]
pub struct LabelRequest {
    pub name: Option<String>,
    pub anchor: Point,
    pub width: f64,
    pub height: f64,
    pub weight: f64,
}

impl LabelRequest {
    pub fn new(anchor: Point, width: f64, height: f64) -> Self {
        LabelRequest {
            name: None,
            anchor,
            width,
            height,
            weight: 1.0,
        }
    }
}

/// Greedy weighted 4P selection. Candidates are the four corner placements
/// of every request, processed by descending weight (ties: request order,
/// then corner order BL, BR, TL, TR). A candidate is accepted when its point
/// is still unlabeled, its anchor is distinct from every accepted anchor,
/// and its rectangle overlaps no accepted rectangle. Unplaceable points are
/// dropped; label ids are the surviving request indices, so the output's
/// `validate_static` report is always empty.
pub fn prepare_static_labeling(requests: &[LabelRequest]) -> Result<Instance, Error> {
    for (i, r) in requests.iter().enumerate() {
        if !(r.width > 0.0 && r.height > 0.0 && r.width.is_finite() && r.height.is_finite()) {
            return Err(Error::Invalid(format!(
                "request {i}: label dimensions must be positive and finite"
            )));
        }
        if !(r.anchor.x.is_finite() && r.anchor.y.is_finite() && r.weight.is_finite()) {
            return Err(Error::Invalid(format!(
                "request {i}: coordinates and weight must be finite"
            )));
        }
    }
    let mut order: Vec<(usize, usize)> = (0..requests.len())
        .flat_map(|p| (0..4).map(move |c| (p, c)))
        .collect();
    order.sort_by(|&(pa, ca), &(pb, cb)| {
        requests[pb]
            .weight
            .total_cmp(&requests[pa].weight)
            .then(pa.cmp(&pb))
            .then(ca.cmp(&cb))
    });

    let mut accepted: Vec<AnchoredLabel> = Vec::new();
    let mut rects: Vec<Rect> = Vec::new();
    let mut placed = vec![false; requests.len()];
    for (p, c) in order {
        if placed[p] {
            continue;
        }
        let r = &requests[p];
        if accepted.iter().any(|l| l.anchor == r.anchor) {
            continue;
        }
        let corner = AnchorCorner::ALL[c];
        let cand = AnchoredLabel::new(p as u64, r.anchor, r.width, r.height, corner);
        let rect = cand.rect_at_zero();
        if rects.iter().any(|a| a.intersects_interior(&rect)) {
            continue;
        }
        let mut label = cand;
        label.name = r.name.clone();
        label.weight = Some(r.weight);
        placed[p] = true;
        rects.push(rect);
        accepted.push(label);
    }
    accepted.sort_by_key(|l| l.id);
    Ok(Instance::new(accepted)?)
}
