//! Shared output formatting for CSV exports.

/// Format a float with 6 significant digits, `%g` style: plain decimal for
/// moderate magnitudes, scientific otherwise, trailing zeros trimmed. Used by
/// every CSV writer so golden files are byte-stable.
pub fn format_sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exponent) {
        let s = format!("{x:.5e}");
        let (mantissa, exp) = s
            .split_once('e')
            .expect("scientific format has an exponent");
        let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
        return format!("{mantissa}e{exp}");
    }
    let decimals = (5 - exponent).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_decimals() {
        assert_eq!(format_sig6(0.0), "0");
        assert_eq!(format_sig6(1.0), "1");
        assert_eq!(format_sig6(0.5), "0.5");
        assert_eq!(format_sig6(0.152590), "0.15259");
        assert_eq!(format_sig6(0.048770575), "0.0487706");
        assert_eq!(format_sig6(16.52), "16.52");
        assert_eq!(format_sig6(-0.0117), "-0.0117");
        assert_eq!(format_sig6(123456.0), "123456");
    }

    #[test]
    fn scientific_for_extremes() {
        assert_eq!(format_sig6(6.690447374e-8), "6.69045e-8");
        assert_eq!(format_sig6(1.2e7), "1.2e7");
        assert_eq!(format_sig6(5e-8), "5e-8");
    }

    #[test]
    fn rounding_carries() {
        assert_eq!(format_sig6(0.9999999), "1");
    }
}
