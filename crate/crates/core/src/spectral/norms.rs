use super::{FieldError, ScalarField};

/// Discrete `L^q(Q)` norm by the periodic rectangle rule, summed in node order.
pub fn lq_norm(u: &ScalarField, q: f64) -> Result<f64, FieldError> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(FieldError::Domain(format!("L^q norm needs finite q ≥ 1, got {q}")));
    }
    let sum: f64 = if q == 2.0 {
        u.values().iter().map(|v| v * v).sum()
    } else if q == 1.0 {
        u.values().iter().map(|v| v.abs()).sum()
    } else {
        u.values().iter().map(|v| v.abs().powf(q)).sum()
    };
    Ok((sum * u.grid().cell_volume()).powf(1.0 / q))
}

pub fn linf_norm(u: &ScalarField) -> f64 {
    u.max_abs()
}

/// `|{u > k}|` measured as `h^d` times the count of nodes strictly above `k`.
pub fn superlevel_measure(u: &ScalarField, k: f64) -> f64 {
    let count = u.values().iter().filter(|&&v| v > k).count();
    count as f64 * u.grid().cell_volume()
}
