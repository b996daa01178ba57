use serde::Serializer;

/// Finite reals as numbers; infinities and NaN as the strings `"inf"`, `"-inf"`, `"nan"`.
pub(crate) fn real_or_tag<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
