//! Cutoff `χ` vanishing on `(−∞, 1]` and equal to 1 on `[2, ∞)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffProfile {
    /// `χ(t) = ψ(t − 1)` on `(1, 2)` with `ψ(s) = E(s)/(E(s) + E(1−s))`, `E(s) = e^{−1/s}`.
    #[default]
    Smooth,
    /// Indicator of `[1, ∞)`. Only meaningful for norms of `Dv`: `χ′` is a
    /// point mass and is reported as 0.
    Sharp,
}

fn bump(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

fn bump_derivative(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        bump(s) / (s * s)
    }
}

/// Smooth transition from 0 at `s ≤ 0` to 1 at `s ≥ 1`.
pub fn psi(s: f64) -> f64 {
    let (a, b) = (bump(s), bump(1.0 - s));
    a / (a + b)
}

pub fn psi_derivative(s: f64) -> f64 {
    let (a, b) = (bump(s), bump(1.0 - s));
    let (da, db) = (bump_derivative(s), bump_derivative(1.0 - s));
    let denom = a + b;
    (da * b + a * db) / (denom * denom)
}

impl CutoffProfile {
    pub fn chi(self, t: f64) -> f64 {
        match self {
            Self::Smooth if t <= 1.0 => 0.0,
            Self::Smooth if t >= 2.0 => 1.0,
            Self::Smooth => psi(t - 1.0),
            Self::Sharp if t >= 1.0 => 1.0,
            Self::Sharp => 0.0,
        }
    }

    pub fn chi_derivative(self, t: f64) -> f64 {
        match self {
            Self::Smooth if t > 1.0 && t < 2.0 => psi_derivative(t - 1.0),
            _ => 0.0,
        }
    }
}
