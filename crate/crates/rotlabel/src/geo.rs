//! Geographic ingestion: named points with latitude/longitude/weight,
//! projected to the plane and turned into a statically valid instance.

use serde::{Deserialize, Serialize};

use rotlabel_core::model::{Instance, Point};

use crate::staticlab::{prepare_static_labeling, LabelRequest};
use crate::Error;

/// Spherical approximation of the ellipsoid, in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Latitudes at or beyond this are outside the projection's usable domain.
pub const MAX_ABS_LAT_DEG: f64 = 85.06;

#[derive(Clone, Debug, Deserialize, Serialize, PartialEq)]
pub struct GeoRecord {
    pub name: String,
    pub lat: f64,
    pub lon: f64,
    pub weight: f64,
}

/// Reads a headered CSV with columns name,lat,lon,weight (any order).
pub fn parse_geo_csv(text: &str) -> Result<Vec<GeoRecord>, Error> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.deserialize::<GeoRecord>() {
        out.push(rec?);
    }
    Ok(out)
}

/// Spherical Mercator: x = R*lon*scale, y = R*ln(tan(pi/4 + lat/2))*scale,
/// angles in radians, R in km. Fails on latitudes outside the domain guard.
/// The y term is computed as asinh(tan(lat)) — the same function, but exact
/// at the equator where ln(tan(pi/4)) picks up rounding error.
pub fn mercator_project(recs: &[GeoRecord], scale: f64) -> Result<Vec<Point>, Error> {
    recs.iter()
        .map(|r| {
            if !(r.lat.abs() < MAX_ABS_LAT_DEG) {
                return Err(Error::Invalid(format!(
                    "record {:?}: latitude {} outside (-{MAX_ABS_LAT_DEG}, {MAX_ABS_LAT_DEG})",
                    r.name, r.lat
                )));
            }
            if !(r.lon.abs() <= 180.0) {
                return Err(Error::Invalid(format!(
                    "record {:?}: longitude {} outside [-180, 180]",
                    r.name, r.lon
                )));
            }
            let lam = r.lon.to_radians();
            let phi = r.lat.to_radians();
            Ok(Point::new(
                EARTH_RADIUS_KM * lam * scale,
                EARTH_RADIUS_KM * phi.tan().asinh() * scale,
            ))
        })
        .collect()
}

/// Knobs for deriving label boxes from names. A rendering pipeline would
/// measure the actual text; here width is `char_width * chars + padding`,
/// a declared approximation.
#[derive(Clone, Copy, Debug)]
pub struct IngestOptions {
    /// Multiplies projected km into instance units.
    pub scale: f64,
    /// Width contributed per character of the name.
    pub char_width: f64,
    /// Constant width padding.
    pub padding: f64,
    pub label_height: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            scale: 1.0,
            char_width: 0.6,
            padding: 0.4,
            label_height: 1.0,
        }
    }
}

/// Projects, sizes, and statically places the records. Points that cannot
/// be placed without overlap (or that share a projected anchor) are dropped.
pub fn ingest_instance(recs: &[GeoRecord], opts: &IngestOptions) -> Result<Instance, Error> {
    let points = mercator_project(recs, opts.scale)?;
    let requests: Vec<LabelRequest> = recs
        .iter()
        .zip(points)
        .map(|(r, p)| LabelRequest {
            name: Some(r.name.clone()),
            anchor: p,
            width: opts.char_width * r.name.chars().count() as f64 + opts.padding,
            height: opts.label_height,
            weight: r.weight,
        })
        .collect();
    prepare_static_labeling(&requests)
}
