//! Number formatting shared by the Newick writer and the JSON envelope.

/// Rounds `x` to 12 significant digits.
pub fn round_sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.11e}", x).parse().unwrap_or(x)
}

/// Shortest decimal text of `x` after rounding to 12 significant digits.
/// Negative zero prints as `0`.
pub fn sig12(x: f64) -> String {
    let r = round_sig12(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{}", r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trims_float_noise() {
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(123456.7890123456), "123456.789012");
    }
}
