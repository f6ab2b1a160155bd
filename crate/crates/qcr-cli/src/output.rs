//! Number formatting and report rendering.
//!
//! Values are computed and stored in bits everywhere; `--nats` rescales the
//! display only.

use qcr_core::{BoundMethod, BoundResult, RelationReport};

/// Display unit for entropic values. Stored values stay in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    Bits,
    Nats,
}

impl Unit {
    pub fn from_flag(nats: bool) -> Self {
        if nats {
            Unit::Nats
        } else {
            Unit::Bits
        }
    }

    pub fn scale(self) -> f64 {
        match self {
            Unit::Bits => 1.0,
            Unit::Nats => std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Unit::Bits => "bits",
            Unit::Nats => "nats",
        }
    }
}

/// Formats with 12 significant digits. Values indistinguishable from zero
/// at that precision print as a plain zero so that -0.0 and 1e-30 do not
/// leak noise digits.
pub fn fmt_sig(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x.abs() < 1e-11 {
        return "0.00000000000".to_string();
    }
    // The exponent must come from the already-rounded value, else numbers
    // just under a power of ten pick up one decimal too many
    // (0.99999999999999 must print as 1.00000000000, not 1.000000000000).
    let sci = format!("{x:.11e}");
    let exp: i32 = sci[sci.find('e').expect("always present") + 1..]
        .parse()
        .expect("exponent is an integer");
    let decimals = (11 - exp).max(0) as usize;
    format!("{x:.decimals$}")
}

/// One entropic value with its unit, e.g. "0.811278124459 bits".
pub fn fmt_entropic(bits: f64, unit: Unit) -> String {
    format!("{} {}", fmt_sig(bits * unit.scale()), unit.suffix())
}

fn fmt_ordering(ordering: &[usize]) -> String {
    ordering
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn print_bound(bound: &BoundResult, unit: Unit) {
    println!("b:           {}", fmt_sig(bound.b));
    println!("-log2(b):    {}", fmt_entropic(bound.neg_log2_b, unit));
    println!("ordering:    [{}]", fmt_ordering(&bound.ordering));
    println!(
        "method:      {}",
        match bound.method {
            BoundMethod::Chain => "chain",
            BoundMethod::BruteForce => "brute_force",
        }
    );
}

/// The common block for every inequality verdict.
pub fn print_report(report: &RelationReport, unit: Unit) {
    println!("relation:    {}", report.relation_id);
    println!("lhs:         {}", fmt_entropic(report.lhs, unit));
    println!("rhs:         {}", fmt_entropic(report.rhs, unit));
    println!("residual:    {}", fmt_entropic(report.residual, unit));
    if let Some(bound) = &report.bound {
        print_bound(bound, unit);
    }
    println!("tolerance:   {:e} bits", report.tolerance);
    println!("holds:       {}", report.holds);
    println!("saturated:   {}", report.saturated);
    println!("inputs:      sha256:{}", report.inputs_digest);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits_across_magnitudes() {
        assert_eq!(fmt_sig(1.0), "1.00000000000");
        assert_eq!(fmt_sig(0.8112781244591328), "0.811278124459");
        assert_eq!(fmt_sig(123.456), "123.456000000");
        assert_eq!(fmt_sig(-2.0), "-2.00000000000");
        assert_eq!(fmt_sig(0.001), "0.00100000000000");
    }

    #[test]
    fn rounding_across_a_power_of_ten_keeps_twelve_digits() {
        assert_eq!(fmt_sig(0.9999999999999998), "1.00000000000");
        assert_eq!(fmt_sig(-0.9999999999999998), "-1.00000000000");
        assert_eq!(fmt_sig(9.99999999999999e2), "1000.00000000");
        assert_eq!(fmt_sig(0.99994), "0.999940000000");
    }

    #[test]
    fn tiny_values_collapse_to_zero() {
        assert_eq!(fmt_sig(0.0), "0.00000000000");
        assert_eq!(fmt_sig(-0.0), "0.00000000000");
        assert_eq!(fmt_sig(1e-30), "0.00000000000");
        assert_eq!(fmt_sig(-3.2e-12), "0.00000000000");
    }

    #[test]
    fn nats_rescale_display_only() {
        assert_eq!(fmt_entropic(1.0, Unit::Bits), "1.00000000000 bits");
        assert_eq!(fmt_entropic(1.0, Unit::Nats), "0.693147180560 nats");
    }
}
