//! Shared rendering helpers: stable decimal formatting and human-readable
//! mapping descriptions. Every number that reaches a report or a CSV export
//! goes through [`fmt_sig`] so output is byte-stable across runs.

use crate::general::GeneralMapping;
use crate::model::{Mapping, PlatformSpec};

/// Formats with 12 significant decimal digits, trailing zeros trimmed;
/// magnitudes outside `[1e-4, 1e12)` switch to scientific notation.
pub fn fmt_sig(value: f64) -> String {
    if value == 0.0 {
        return "0".to_string();
    }
    if !value.is_finite() {
        return if value.is_nan() {
            "NaN".to_string()
        } else if value > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }

    let magnitude = |v: f64| v.abs().log10().floor() as i32;
    let mut exp = magnitude(value);
    // Rounding at 12 digits can push the value into the next decade
    // (e.g. 0.99999999999995 -> 1.0); redo once with the bumped exponent.
    for _ in 0..2 {
        if !(-4..12).contains(&exp) {
            let s = format!("{value:.11e}");
            let (mantissa, e) = s.split_once('e').expect("exponent in scientific format");
            let mantissa = trim_zeros(mantissa);
            return format!("{mantissa}e{e}");
        }
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{value:.decimals$}");
        let rounded: f64 = s.parse().expect("formatted float");
        if rounded == 0.0 || magnitude(rounded) == exp {
            return trim_zeros(&s);
        }
        exp = magnitude(rounded);
    }
    unreachable!("rounding can only bump the magnitude once");
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// Renders an interval mapping like `[1-2] on {a, b} | [3-3] on {c}`.
pub fn render_mapping(mapping: &Mapping, platform: &PlatformSpec) -> String {
    mapping
        .intervals
        .iter()
        .map(|iv| {
            let procs = iv
                .procs
                .iter()
                .map(|&u| platform.processors()[u].id.as_str())
                .collect::<Vec<_>>()
                .join(", ");
            format!("[{}-{}] on {{{procs}}}", iv.first, iv.last)
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

/// Renders a general assignment like `S1->a S2->b S3->a`.
pub fn render_general(general: &GeneralMapping, platform: &PlatformSpec) -> String {
    general
        .stage_processor
        .iter()
        .enumerate()
        .map(|(i, &u)| format!("S{}->{}", i + 1, platform.processors()[u].id))
        .collect::<Vec<_>>()
        .join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fmt_sig_plain_numbers() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(22.0), "22");
        assert_eq!(fmt_sig(-3.5), "-3.5");
        assert_eq!(fmt_sig(0.64), "0.64");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(0.19663676416), "0.19663676416");
        assert_eq!(fmt_sig(123456.789), "123456.789");
    }

    #[test]
    fn fmt_sig_keeps_twelve_significant_digits() {
        assert_eq!(fmt_sig(1.0073741824001), "1.0073741824");
        assert_eq!(fmt_sig(987654321098.0), "987654321098");
        assert_eq!(fmt_sig(0.010737418239999), "0.01073741824");
    }

    #[test]
    fn fmt_sig_scientific_for_extremes() {
        assert_eq!(fmt_sig(1e-7), "1e-7");
        assert_eq!(fmt_sig(1.5e15), "1.5e15");
        assert_eq!(fmt_sig(-2.25e-9), "-2.25e-9");
    }

    #[test]
    fn fmt_sig_handles_decade_bump() {
        // 0.99999999999999 rounds to 1 at 12 significant digits.
        assert_eq!(fmt_sig(0.99999999999999), "1");
        assert_eq!(fmt_sig(9.9999999999999e11), "1e12");
    }

    #[test]
    fn fmt_sig_non_finite() {
        assert_eq!(fmt_sig(f64::INFINITY), "inf");
        assert_eq!(fmt_sig(f64::NEG_INFINITY), "-inf");
        assert_eq!(fmt_sig(f64::NAN), "NaN");
    }
}
