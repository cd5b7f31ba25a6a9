//! The level function `g(s) = (2/(1+δ))(1+s)^{(1+δ)/2}` applied to `s = |Du|²`.

use super::BernsteinError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GValues {
    pub g: f64,
    pub dg: f64,
    pub d2g: f64,
}

/// Returns `g`, `g′` and `g″` at `s ≥ 0` for `δ ∈ (0, 1)`.
pub fn g_eval(s: f64, delta: f64) -> Result<GValues, BernsteinError> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(BernsteinError::Domain(format!("g needs finite s ≥ 0, got {s}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(BernsteinError::Domain(format!("δ = {delta} must lie in (0, 1)")));
    }
    Ok(g_unchecked(s, delta))
}

pub(crate) fn g_unchecked(s: f64, delta: f64) -> GValues {
    let base = 1.0 + s;
    let dg = base.powf(0.5 * (delta - 1.0));
    GValues {
        g: 2.0 / (1.0 + delta) * base * dg,
        dg,
        d2g: 0.5 * (delta - 1.0) * dg / base,
    }
}

/// Slack in `g′(s)·√s ≤ (1+s)^{δ/2}` and `g′ + 2s·g″ ≥ δ·g′`.
///
/// Both entries are nonnegative when the inequalities hold. The second equals
/// `(1−δ)(1+s)^{(δ−3)/2}` exactly.
pub fn g_property_slack(s: f64, delta: f64) -> Result<[f64; 2], BernsteinError> {
    let v = g_eval(s, delta)?;
    Ok([
        (1.0 + s).powf(0.5 * delta) - v.dg * s.sqrt(),
        v.dg + 2.0 * s * v.d2g - delta * v.dg,
    ])
}
