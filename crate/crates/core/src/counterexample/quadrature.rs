//! Adaptive Gauss–Kronrod 7-15 quadrature on finite intervals.

use super::CounterexampleError;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub rel_tol: f64,
    /// Bisection depth cap. An interval at this depth is accepted only if its
    /// error estimate already meets the tolerance.
    pub max_depth: u32,
}

impl QuadratureSettings {
    pub const fn new(rel_tol: f64, max_depth: u32) -> Self {
        Self { rel_tol, max_depth }
    }
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self::new(1e-9, 30)
    }
}

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    (kronrod * half, (kronrod - gauss).abs() * half)
}

/// `∫_a^b f` to relative accuracy `rel_tol` by recursive bisection.
///
/// Each panel is accepted once its Kronrod–Gauss difference is below
/// `rel_tol` times the magnitude of the running total over its share of the
/// interval; this keeps the global relative error near `rel_tol`.
pub fn integrate(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    settings: QuadratureSettings,
) -> Result<f64, CounterexampleError> {
    if a == b {
        return Ok(0.0);
    }
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(CounterexampleError::Domain(format!("invalid interval [{a}, {b}]")));
    }
    let (whole, _) = gk15(&f, a, b);
    let mut total = 0.0;
    let mut worst_ratio = 0.0f64;
    let mut stack = vec![(a, b, 0u32)];
    let scale_floor = whole.abs().max(f64::MIN_POSITIVE);
    while let Some((lo, hi, depth)) = stack.pop() {
        let (value, err) = gk15(&f, lo, hi);
        let allowed = settings.rel_tol * scale_floor * (hi - lo) / (b - a);
        if err <= allowed || err <= 4.0 * f64::EPSILON * value.abs() {
            total += value;
        } else if depth >= settings.max_depth {
            total += value;
            worst_ratio = worst_ratio.max(err / allowed);
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    if !total.is_finite() {
        return Err(CounterexampleError::Domain("integrand is not finite".into()));
    }
    if worst_ratio > 1.0 {
        return Err(CounterexampleError::Precision {
            requested: settings.rel_tol,
            achieved: settings.rel_tol * worst_ratio,
        });
    }
    Ok(total)
}

/// Sum of [`integrate`] over consecutive breakpoints.
pub fn integrate_pieces(
    f: impl Fn(f64) -> f64,
    breaks: &[f64],
    settings: QuadratureSettings,
) -> Result<f64, CounterexampleError> {
    let mut total = 0.0;
    for w in breaks.windows(2) {
        total += integrate(&f, w[0], w[1], settings)?;
    }
    Ok(total)
}
