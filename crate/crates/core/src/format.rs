//! Byte-stable number formatting shared by every text output.

/// Formats `x` with 12 significant digits in scientific notation.
///
/// Negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return format!("{:.11e}", 0.0_f64);
    }
    format!("{:.11e}", x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(0.5), "5.00000000000e-1");
        assert_eq!(fmt_num(-0.0), "0.00000000000e0");
        assert_eq!(fmt_num(91.2), "9.12000000000e1");
        assert_eq!(fmt_num(1.0 / 3.0), "3.33333333333e-1");
    }
}
