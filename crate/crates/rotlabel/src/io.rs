//! Line-oriented file formats for instances and labelings.
//!
//! Both formats start with a versioned `#` header and stay diffable: one
//! record per line, `#` comments ignored. Instance coordinates are written
//! with Rust's shortest round-trip float formatting, so `parse(write(x))`
//! reproduces `x` bit for bit; labeling endpoints are written to 12
//! significant digits, which re-emit byte-identically after a parse.

use std::collections::BTreeMap;
use std::path::Path;

use rotlabel_core::angular::{Angle, AngularSet, CircularInterval, TAU};
use rotlabel_core::format_sig12;
use rotlabel_core::model::{AnchorCorner, AnchoredLabel, Instance, ModelConfig, Point, RotationLabeling};

use crate::Error;

pub const INSTANCE_HEADER: &str = "# rotlabel-instance v1";
pub const LABELING_HEADER: &str = "# rotlabel-labeling v1";

/// Slack accepted when clamping parsed angles onto [0, 2pi]; covers the
/// rounding of 12-significant-digit output near the seam.
const CLAMP_EPS: f64 = 1e-6;

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    out.push_str(INSTANCE_HEADER);
    out.push('\n');
    out.push_str("# id,x,y,width,height,corner,name,weight\n");
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    for l in inst.labels() {
        w.write_record([
            l.id.to_string(),
            l.anchor.x.to_string(),
            l.anchor.y.to_string(),
            l.width.to_string(),
            l.height.to_string(),
            l.corner.tag().to_string(),
            l.name.clone().unwrap_or_default(),
            l.weight.map(|v| v.to_string()).unwrap_or_default(),
        ])
        .expect("writing csv to memory cannot fail");
    }
    let records = w.into_inner().expect("writing csv to memory cannot fail");
    out.push_str(&String::from_utf8(records).expect("csv output is utf-8"));
    out
}

pub fn parse_instance(text: &str) -> Result<Instance, Error> {
    let first = text.lines().next().unwrap_or("");
    if first.trim_end() != INSTANCE_HEADER {
        return Err(Error::parse(
            1,
            format!("expected header {INSTANCE_HEADER:?}"),
        ));
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut labels = Vec::new();
    let mut rec = csv::StringRecord::new();
    // The csv position of a record preceded by comment lines points before
    // those comments, so line numbers are derived from where each record
    // ends instead (minus the record's own newlines), counted incrementally.
    let mut scanned = 0usize;
    let mut seen_newlines = 0usize;
    loop {
        if !reader.read_record(&mut rec)? {
            break;
        }
        let end = reader.position().byte() as usize;
        seen_newlines += text.as_bytes()[scanned..end]
            .iter()
            .filter(|&&b| b == b'\n')
            .count();
        scanned = end;
        let inside: usize = rec.iter().map(|f| f.matches('\n').count()).sum();
        let terminated = end > 0 && text.as_bytes()[end - 1] == b'\n';
        let line = seen_newlines - inside - usize::from(terminated) + 1;
        if rec.len() != 8 {
            return Err(Error::parse(
                line,
                format!("expected 8 fields, found {}", rec.len()),
            ));
        }
        let field = |i: usize| rec.get(i).unwrap_or("");
        let id = field(0)
            .parse::<u64>()
            .map_err(|_| Error::parse(line, format!("bad label id {:?}", field(0))))?;
        let num = |i: usize, what: &str| -> Result<f64, Error> {
            let v: f64 = field(i)
                .parse()
                .map_err(|_| Error::parse(line, format!("bad {what} {:?}", field(i))))?;
            if !v.is_finite() {
                return Err(Error::parse(line, format!("{what} must be finite")));
            }
            Ok(v)
        };
        let x = num(1, "x")?;
        let y = num(2, "y")?;
        let width = num(3, "width")?;
        let height = num(4, "height")?;
        let corner = AnchorCorner::from_tag(field(5))
            .ok_or_else(|| Error::parse(line, format!("bad corner tag {:?}", field(5))))?;
        let mut label = AnchoredLabel::new(id, Point::new(x, y), width, height, corner);
        if !field(6).is_empty() {
            label.name = Some(field(6).to_string());
        }
        if !field(7).is_empty() {
            label.weight = Some(num(7, "weight")?);
        }
        labels.push(label);
    }
    Ok(Instance::new(labels)?)
}

pub fn read_instance(path: impl AsRef<Path>) -> Result<Instance, Error> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn save_instance(path: impl AsRef<Path>, inst: &Instance) -> Result<(), Error> {
    Ok(std::fs::write(path, write_instance(inst))?)
}

pub fn write_labeling(phi: &RotationLabeling) -> String {
    let mut out = String::new();
    out.push_str(LABELING_HEADER);
    out.push('\n');
    out.push_str("# id,ranges (space-separated start:end radians to 12 significant digits; 'full'; empty = never active)\n");
    for (id, set) in phi.iter() {
        out.push_str(&id.to_string());
        out.push(',');
        if set.is_full() {
            out.push_str("full");
        } else {
            let mut first = true;
            for iv in set.intervals() {
                if !first {
                    out.push(' ');
                }
                first = false;
                out.push_str(&format_sig12(iv.start().rad()));
                out.push(':');
                out.push_str(&format_sig12(iv.end().rad()));
            }
        }
        out.push('\n');
    }
    out
}

pub fn parse_labeling(text: &str, model: ModelConfig) -> Result<RotationLabeling, Error> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().unwrap_or((0, ""));
    if first.trim_end() != LABELING_HEADER {
        return Err(Error::parse(
            1,
            format!("expected header {LABELING_HEADER:?}"),
        ));
    }
    let mut active: BTreeMap<u64, AngularSet> = BTreeMap::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        if raw.trim().is_empty() || raw.starts_with('#') {
            continue;
        }
        let (id_part, ranges) = raw
            .split_once(',')
            .ok_or_else(|| Error::parse(line, "expected id,ranges"))?;
        let id = id_part
            .trim()
            .parse::<u64>()
            .map_err(|_| Error::parse(line, format!("bad label id {id_part:?}")))?;
        let set = parse_range_tokens(ranges, line)?;
        if active.insert(id, set).is_some() {
            return Err(Error::parse(line, format!("duplicate label id {id}")));
        }
    }
    Ok(RotationLabeling::from_active(model, active))
}

fn parse_range_tokens(ranges: &str, line: usize) -> Result<AngularSet, Error> {
    let tokens: Vec<&str> = ranges.split_whitespace().collect();
    if tokens == ["full"] {
        return Ok(AngularSet::full());
    }
    let mut ivs = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let (a, b) = tok
            .split_once(':')
            .ok_or_else(|| Error::parse(line, format!("expected start:end, found {tok:?}")))?;
        let start = parse_angle(a, line)?;
        let end = parse_angle(b, line)?;
        if Angle::new(start) == Angle::new(end) {
            return Err(Error::parse(
                line,
                format!("range {tok:?} has equal endpoints; use 'full' or drop it"),
            ));
        }
        ivs.push(CircularInterval::from_endpoints(
            Angle::new(start),
            Angle::new(end),
        ));
    }
    Ok(AngularSet::from_intervals(ivs))
}

fn parse_angle(s: &str, line: usize) -> Result<f64, Error> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::parse(line, format!("bad angle {s:?}")))?;
    // Snap 12-digit output that rounded just past the seam back onto it.
    let v = if v > TAU && v < TAU + CLAMP_EPS {
        TAU
    } else if v < 0.0 && v > -CLAMP_EPS {
        0.0
    } else {
        v
    };
    if !(0.0..=TAU).contains(&v) {
        return Err(Error::parse(line, format!("angle {s:?} outside [0, 2pi]")));
    }
    Ok(v)
}

pub fn read_labeling(path: impl AsRef<Path>, model: ModelConfig) -> Result<RotationLabeling, Error> {
    parse_labeling(&std::fs::read_to_string(path)?, model)
}

pub fn save_labeling(path: impl AsRef<Path>, phi: &RotationLabeling) -> Result<(), Error> {
    Ok(std::fs::write(path, write_labeling(phi))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rotlabel_core::model::{ConflictMode, RangeModel};

    const PI: f64 = std::f64::consts::PI;

    fn sample_instance() -> Instance {
        let mut a = AnchoredLabel::new(3, Point::new(0.25, -1.5), 2.0, 0.5, AnchorCorner::TopRight);
        a.name = Some("Springfield, IL".to_string());
        a.weight = Some(116250.0);
        let b = AnchoredLabel::new(7, Point::new(1.0 / 3.0, 0.1), 1.0, 1.0, AnchorCorner::BottomLeft);
        Instance::new(vec![a, b]).unwrap()
    }

    #[test]
    fn instance_round_trip_is_byte_identical_and_exact() {
        let inst = sample_instance();
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back.labels(), inst.labels());
        assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn instance_parser_reports_line_numbers() {
        let text = format!("{INSTANCE_HEADER}\n# c\n0,0,0,1,1,BL,,\n1,2,0,1,1,XX,,\n");
        match parse_instance(&text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("corner"), "{message}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(matches!(
            parse_instance("0,0,0,1,1,BL,,\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        // A record straight after the header comment must not inherit the
        // comment's position.
        let text = format!("{INSTANCE_HEADER}\n0,0,0,oops,1,BL,,\n");
        assert!(matches!(
            parse_instance(&text),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn labeling_round_trip_is_byte_identical() {
        let cfg = ModelConfig::new(RangeModel::Unlimited, ConflictMode::Soft);
        let mut active = BTreeMap::new();
        active.insert(0, AngularSet::full());
        active.insert(1, AngularSet::empty());
        // A wrapping range plus a plain one.
        active.insert(
            2,
            AngularSet::from_intervals([
                CircularInterval::from_endpoints(Angle::new(5.5), Angle::new(0.75)),
                CircularInterval::from_endpoints(Angle::new(2.0), Angle::new(3.0)),
            ]),
        );
        let phi = RotationLabeling::from_active(cfg, active);
        let text = write_labeling(&phi);
        let back = parse_labeling(&text, cfg).unwrap();
        assert_eq!(write_labeling(&back), text);
        assert_eq!(back.active(0), &AngularSet::full());
        assert!(back.active(1).is_empty());
        assert_eq!(back.active(2).interval_count(), 2);
    }

    #[test]
    fn labeling_parser_handles_seam_and_rejects_ambiguity() {
        let cfg = ModelConfig::new(RangeModel::Unlimited, ConflictMode::Soft);
        // 6.28318530718 is the 12-digit rounding of 2pi and lands just past it.
        let text = format!("{LABELING_HEADER}\n0,3.14159265359:6.28318530718\n");
        let phi = parse_labeling(&text, cfg).unwrap();
        assert!((phi.active(0).length() - PI).abs() < 1e-9);
        let bad = format!("{LABELING_HEADER}\n0,1.5:1.5\n");
        assert!(matches!(
            parse_labeling(&bad, cfg),
            Err(Error::Parse { line: 2, .. })
        ));
    }
}
