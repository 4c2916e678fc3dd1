//! Seeded synthetic instances: uniform anchors and dimensions, then static
//! 4P placement so the output is always a valid unrotated layout.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rotlabel_core::model::{Instance, Point};

use crate::staticlab::{prepare_static_labeling, LabelRequest};
use crate::Error;

#[derive(Clone, Copy, Debug)]
pub struct GenSpec {
    /// Points drawn; the instance may end up smaller after static placement.
    pub n: usize,
    /// Side of the square anchor region [0, region)^2.
    pub region: f64,
    /// Inclusive width range.
    pub width: (f64, f64),
    /// Inclusive height range.
    pub height: (f64, f64),
    pub seed: u64,
}

impl GenSpec {
    /// Preset used by the approximation-ratio experiments.
    pub fn unit_squares(n: usize, region: f64, seed: u64) -> Self {
        GenSpec {
            n,
            region,
            width: (1.0, 1.0),
            height: (1.0, 1.0),
            seed,
        }
    }
}

/// Draws per point, in fixed order, x, y, width, height; the draw order is
/// part of the format, since fixed seeds must reproduce instances exactly.
pub fn generate_random(spec: &GenSpec) -> Result<Instance, Error> {
    if spec.n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if !(spec.region > 0.0 && spec.region.is_finite()) {
        return Err(Error::Invalid("region side must be positive".into()));
    }
    for (what, (lo, hi)) in [("width", spec.width), ("height", spec.height)] {
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(Error::Invalid(format!(
                "{what} range must satisfy 0 < lo <= hi"
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut requests = Vec::with_capacity(spec.n);
    for _ in 0..spec.n {
        let x = rng.gen_range(0.0..spec.region);
        let y = rng.gen_range(0.0..spec.region);
        let w = rng.gen_range(spec.width.0..=spec.width.1);
        let h = rng.gen_range(spec.height.0..=spec.height.1);
        requests.push(LabelRequest::new(Point::new(x, y), w, h));
    }
    prepare_static_labeling(&requests)
}
