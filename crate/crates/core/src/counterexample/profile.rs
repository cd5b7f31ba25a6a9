//! The radial family `v_ε(r) = c ∫_r^{1/2} s^{−1/(γ−1)} χ(s/ε) ds` and its source `f_ε`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadrature::{integrate_pieces, QuadratureSettings};
use super::{CounterexampleError, CutoffProfile};

/// `q = d(γ−1)/γ`, where the estimate stops holding.
pub fn critical_q(gamma: f64, d: u32) -> f64 {
    d as f64 * (gamma - 1.0) / gamma
}

/// Negative root of `|c|^γ = −(d − 1 − 1/(γ−1))·c`.
pub fn c_constant(gamma: f64, d: u32) -> Result<f64, CounterexampleError> {
    if d < 2 {
        return Err(CounterexampleError::Domain(format!("dimension {d} must be at least 2")));
    }
    let threshold = d as f64 / (d as f64 - 1.0);
    if !(gamma > threshold) || !gamma.is_finite() {
        return Err(CounterexampleError::Domain(format!(
            "meaningful only if γ > d/(d−1) = {threshold}, got γ = {gamma}"
        )));
    }
    let a = 1.0 / (gamma - 1.0);
    Ok(-(d as f64 - 1.0 - a).powf(a))
}

/// Surface measure of the unit sphere in `R^d`.
pub fn sphere_area(d: u32) -> Result<f64, CounterexampleError> {
    match d {
        2 => Ok(2.0 * PI),
        3 => Ok(4.0 * PI),
        4 => Ok(2.0 * PI * PI),
        _ => Err(CounterexampleError::Domain(format!("dimension {d} not in {{2, 3, 4}}"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub gamma: f64,
    pub d: u32,
    pub eps: f64,
    pub c: f64,
    pub cutoff: CutoffProfile,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialValues {
    pub v: f64,
    pub dv: f64,
    pub d2v: f64,
    pub f: f64,
}

impl RadialProfile {
    pub fn new(gamma: f64, d: u32, eps: f64, cutoff: CutoffProfile) -> Result<Self, CounterexampleError> {
        sphere_area(d)?;
        if !(eps > 0.0 && eps <= 0.25) {
            return Err(CounterexampleError::Domain(format!("ε = {eps} must lie in (0, 1/4]")));
        }
        let c = c_constant(gamma, d)?;
        Ok(Self { gamma, d, eps, c, cutoff })
    }

    /// `1/(γ−1)`.
    pub fn decay(&self) -> f64 {
        1.0 / (self.gamma - 1.0)
    }

    /// `v′`, `v″` and `f_ε` in closed form; no quadrature.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let a = self.decay();
        let t = r / self.eps;
        let chi = self.cutoff.chi(t);
        let dchi = self.cutoff.chi_derivative(t);
        let ra = r.powf(-a);
        let ra1 = ra / r;
        let dv = -self.c * ra * chi;
        let d2v = self.c * a * ra1 * chi - self.c / self.eps * ra * dchi;
        let f = self.c / self.eps * ra * dchi
            + self.c.abs().powf(self.gamma) * (chi.powf(self.gamma) - chi) * ra1;
        (dv, d2v, f)
    }

    fn check_radius(&self, r: f64) -> Result<(), CounterexampleError> {
        if !(r > 0.0 && r <= 0.5) {
            return Err(CounterexampleError::Domain(format!("radius {r} must lie in (0, 1/2]")));
        }
        Ok(())
    }

    /// Breakpoints of the cutoff's support inside `[lo, 1/2]`.
    pub(crate) fn breaks_from(&self, lo: f64) -> Vec<f64> {
        let mut breaks = vec![lo];
        for knot in [self.eps, 2.0 * self.eps] {
            if knot > lo && knot < 0.5 {
                breaks.push(knot);
            }
        }
        breaks.push(0.5);
        breaks
    }

    pub fn eval(&self, r: f64, quad: QuadratureSettings) -> Result<RadialValues, CounterexampleError> {
        self.check_radius(r)?;
        let a = self.decay();
        let integral = integrate_pieces(
            |s| s.powf(-a) * self.cutoff.chi(s / self.eps),
            &self.breaks_from(r),
            quad,
        )?;
        let (dv, d2v, f) = self.derivatives(r);
        Ok(RadialValues {
            v: self.c * integral,
            dv,
            d2v,
            f,
        })
    }

    /// `−(v″ + (d−1)v′/r) + |v′|^γ − f` and the largest of its terms at `r`.
    pub fn residual_at(&self, r: f64) -> (f64, f64) {
        let (dv, d2v, f) = self.derivatives(r);
        let radial = (self.d as f64 - 1.0) * dv / r;
        let power = dv.abs().powf(self.gamma);
        let residual = -(d2v + radial) + power - f;
        let scale = d2v.abs().max(radial.abs()).max(power).max(f.abs());
        (residual, scale)
    }
}

/// `v`, `v′`, `v″`, `f` at `r` with the default relative tolerance `1e−11`.
pub fn profile_eval(prof: &RadialProfile, r: f64) -> Result<RadialValues, CounterexampleError> {
    prof.eval(r, QuadratureSettings::new(1e-11, 40))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialResidual {
    pub max_abs: f64,
    /// Largest `|residual| / (1 + local scale)`.
    pub max_relative: f64,
}

pub fn radial_residual(prof: &RadialProfile, r_samples: &[f64]) -> RadialResidual {
    let mut out = RadialResidual {
        max_abs: 0.0,
        max_relative: 0.0,
    };
    for &r in r_samples {
        let (res, scale) = prof.residual_at(r);
        out.max_abs = out.max_abs.max(res.abs());
        out.max_relative = out.max_relative.max(res.abs() / (1.0 + scale));
    }
    out
}

/// `count` log-spaced radii in `[lo, hi]`.
pub fn log_radii(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi / lo).ln() / (count.max(2) - 1) as f64;
    (0..count).map(|i| lo * (step * i as f64).exp()).collect()
}
