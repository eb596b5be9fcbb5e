//! Fixed-width number formatting shared by every command.

/// Twelve significant digits in scientific notation. Negative zero is
/// printed as zero so identical runs stay byte-identical.
pub fn num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

pub fn csv_row(fields: &[String]) -> String {
    let mut line = fields.join(",");
    line.push('\n');
    line
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(2.0 * (-1.0f64).exp()), "7.35758882343e-1");
        assert_eq!(num(-0.0), "0.00000000000e0");
        assert_eq!(num(1.0), "1.00000000000e0");
    }

    #[test]
    fn row_ends_with_newline() {
        assert_eq!(csv_row(&["a".into(), "".into()]), "a,\n");
    }
}
