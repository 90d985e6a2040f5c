/// Round-trippable float text with 17 significant digits.
pub(crate) fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        // keeps the sign of -0.0 out of the files
        "0".to_string()
    } else {
        format!("{x:.16e}")
    }
}
