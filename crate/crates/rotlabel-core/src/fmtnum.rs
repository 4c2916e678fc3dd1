//! Fixed-precision decimal formatting shared by the LP emitter and the
//! labeling file format.

use alloc::string::String;

/// Formats with 12 significant digits in plain decimal notation, trailing
/// zeros trimmed. Deterministic; no exponent form, so any LP/CSV consumer can
/// read it back.
pub fn format_sig12(value: f64) -> String {
    assert!(value.is_finite());
    if value == 0.0 {
        return String::from("0");
    }
    let magnitude = libm::floor(libm::log10(libm::fabs(value))) as i32;
    let decimals = (11 - magnitude).clamp(0, 17) as usize;
    let mut s = alloc::format!("{value:.decimals$}");
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    if s == "-0" {
        s = String::from("0");
    }
    s
}
