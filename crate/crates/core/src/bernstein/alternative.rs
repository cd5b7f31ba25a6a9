//! The alternative `Y ≤ Z^−` or `Y ≥ Z^+` forced by `Y^θ ≤ Y + ω`.

use serde::{Deserialize, Serialize};

use super::BernsteinError;

/// `F(Z) = Z^θ − Z` on `[0, 1]` for a power `θ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Alternative {
    pub theta: f64,
    pub z_star: f64,
    pub f_star: f64,
}

impl Alternative {
    pub fn with_power(theta: f64) -> Result<Self, BernsteinError> {
        if !(theta > 0.0 && theta < 1.0) {
            return Err(BernsteinError::Domain(format!("power θ = {theta} must lie in (0, 1)")));
        }
        let z_star = theta.powf(1.0 / (1.0 - theta));
        Ok(Self {
            theta,
            z_star,
            f_star: z_star.powf(theta) - z_star,
        })
    }

    /// `θ = (d−2)/d`, so `Z* = ((d−2)/d)^{d/2}`.
    pub fn for_dimension(d: u32) -> Result<Self, BernsteinError> {
        if d < 3 {
            return Err(BernsteinError::Domain(format!(
                "the Sobolev alternative needs d ≥ 3, got {d}"
            )));
        }
        Self::with_power((d as f64 - 2.0) / d as f64)
    }

    pub fn f(&self, z: f64) -> f64 {
        z.powf(self.theta) - z
    }

    /// The two solutions of `F(Z) = ω`, straddling `Z*`.
    pub fn roots(&self, omega: f64) -> Result<(f64, f64), BernsteinError> {
        if !(omega >= 0.0) {
            return Err(BernsteinError::Domain(format!("ω = {omega} must be ≥ 0")));
        }
        if omega >= self.f_star {
            return Err(BernsteinError::NoRoots {
                omega,
                f_star: self.f_star,
            });
        }
        if omega == 0.0 {
            return Ok((0.0, 1.0));
        }
        let below = bisect(|z| self.f(z) - omega, 0.0, self.z_star);
        let above = bisect(|z| omega - self.f(z), self.z_star, 1.0);
        Ok((below, above))
    }
}

/// Root of an increasing function with `f(lo) < 0 < f(hi)`, bisected until
/// the bracket cannot shrink further.
fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(hi).abs() < f(lo).abs() {
        hi
    } else {
        lo
    }
}

pub fn f_alternative(d: u32) -> Result<(f64, f64), BernsteinError> {
    let alt = Alternative::for_dimension(d)?;
    Ok((alt.z_star, alt.f_star))
}

pub fn alternative_roots(d: u32, omega: f64) -> Result<(f64, f64), BernsteinError> {
    Alternative::for_dimension(d)?.roots(omega)
}

/// `k* = (‖Du‖_{L¹}/t* + 1)^{(1+δ)/2}`.
pub fn k_star(du_l1: f64, t_star: f64, delta: f64) -> Result<f64, BernsteinError> {
    if !(t_star > 0.0) {
        return Err(BernsteinError::Domain(format!("t* = {t_star} must be positive")));
    }
    if !(du_l1 >= 0.0) {
        return Err(BernsteinError::Domain(format!("‖Du‖_L1 = {du_l1} must be ≥ 0")));
    }
    Ok((du_l1 / t_star + 1.0).powf(0.5 * (1.0 + delta)))
}
