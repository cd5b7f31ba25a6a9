//! The superlevel functional `Y_k` and its companion measures.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{BernsteinError, Exponents};
use crate::solver::ErgodicSolution;
use crate::spectral::{gradient, superlevel_measure, ScalarField, SpectrumWorkspace, VectorField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperlevelCurve {
    pub k_grid: Vec<f64>,
    /// `Y_k = ∫(((1+|Du|²)^{(1+δ)/2} − k)^+)^{qγ/(1+δ)}`.
    pub y: Vec<f64>,
    /// `|{1 + |Du|² > k^{2/(1+δ)}}|`.
    pub omega_arg: Vec<f64>,
    pub exponents: Exponents,
}

impl SuperlevelCurve {
    /// `max(0, Y^θ − Y)` with `θ` from [`Exponents::superlevel_power`].
    pub fn excess(&self) -> Vec<f64> {
        let theta = self.exponents.superlevel_power();
        self.y.iter().map(|&y| (y.powf(theta) - y).max(0.0)).collect()
    }

    /// Columns `k, Y_k, omega_arg, excess`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "k,Y_k,omega_arg,excess")?;
        for (((k, y), w), e) in self
            .k_grid
            .iter()
            .zip(&self.y)
            .zip(&self.omega_arg)
            .zip(self.excess())
        {
            writeln!(out, "{k:.16e},{y:.16e},{w:.16e},{e:.16e}")?;
        }
        Ok(())
    }
}

/// `count` geometric points from `k_min` to `k_max` inclusive.
pub fn geometric_k_grid(k_min: f64, k_max: f64, count: usize) -> Result<Vec<f64>, BernsteinError> {
    if !(k_min >= 1.0 && k_max > k_min && k_max.is_finite()) || count < 2 {
        return Err(BernsteinError::Domain(format!(
            "k grid needs 1 ≤ k_min < k_max and at least 2 points, got [{k_min}, {k_max}] × {count}"
        )));
    }
    let ratio = (k_max / k_min).ln() / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| k_min * (ratio * i as f64).exp()).collect();
    grid[count - 1] = k_max;
    Ok(grid)
}

/// Grid from `k_min` to `k_max_factor · max (1+|Du|²)^{(1+δ)/2}`.
///
/// When the field's maximum level does not exceed `k_min`, the top is
/// `k_max_factor · k_min` instead.
pub fn default_k_grid(
    s_field: &ScalarField,
    delta: f64,
    k_min: f64,
    k_max_factor: f64,
    count: usize,
) -> Result<Vec<f64>, BernsteinError> {
    if !(k_max_factor > 1.0) {
        return Err(BernsteinError::Domain(format!(
            "k_max_factor = {k_max_factor} must exceed 1"
        )));
    }
    let top = (1.0 + s_field.max()).powf(0.5 * (1.0 + delta));
    geometric_k_grid(k_min, k_max_factor * top.max(k_min), count)
}

fn check_k_grid(k_grid: &[f64]) -> Result<(), BernsteinError> {
    if k_grid.is_empty() {
        return Err(BernsteinError::Domain("empty k grid".into()));
    }
    if let Some(&k) = k_grid.iter().find(|&&k| !(k >= 1.0) || !k.is_finite()) {
        return Err(BernsteinError::Domain(format!("level k = {k} must be finite and ≥ 1")));
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BernsteinError::Domain("k grid must be strictly increasing".into()));
    }
    Ok(())
}

/// `Y_k` from the node values of `s = |Du|²`, summed in node order.
pub fn y_functional(s_field: &ScalarField, exps: &Exponents, k: f64) -> f64 {
    let half = 0.5 * (1.0 + exps.delta);
    let power = exps.level_power();
    let mut sum = 0.0;
    for &s in s_field.values() {
        let a = (1.0 + s).powf(half) - k;
        if a > 0.0 {
            sum += a.powf(power);
        }
    }
    sum * s_field.grid().cell_volume()
}

pub fn superlevel_curve_from_gradient(
    grad: &VectorField,
    exps: &Exponents,
    k_grid: &[f64],
) -> Result<SuperlevelCurve, BernsteinError> {
    check_k_grid(k_grid)?;
    let s_field = grad.norm_squared();
    let one_plus_s = s_field.shifted(1.0);
    let level_exp = 2.0 / (1.0 + exps.delta);
    let y = k_grid.iter().map(|&k| y_functional(&s_field, exps, k)).collect();
    let omega_arg = k_grid
        .iter()
        .map(|&k| superlevel_measure(&one_plus_s, k.powf(level_exp)))
        .collect();
    Ok(SuperlevelCurve {
        k_grid: k_grid.to_vec(),
        y,
        omega_arg,
        exponents: exps.clone(),
    })
}

pub fn superlevel_curve(
    sol: &ErgodicSolution,
    exps: &Exponents,
    k_grid: &[f64],
    ws: &SpectrumWorkspace,
) -> Result<SuperlevelCurve, BernsteinError> {
    let grad = gradient(&sol.u, ws)?;
    superlevel_curve_from_gradient(&grad, exps, k_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::derive_exponents;
    use crate::spectral::GridSpec;

    #[test]
    fn zero_gradient_gives_zero_curve() {
        let grid = GridSpec::new(2, 16).unwrap();
        let grad = VectorField::new(vec![ScalarField::zeros(grid); 2]).unwrap();
        let exps = derive_exponents(3.0, 4.0, 2, None).unwrap();
        let k = geometric_k_grid(1.0, 4.0, 5).unwrap();
        let curve = superlevel_curve_from_gradient(&grad, &exps, &k).unwrap();
        assert!(curve.y.iter().all(|&y| y == 0.0));
        assert!(curve.omega_arg.iter().all(|&w| w == 0.0));
        assert!(curve.excess().iter().all(|&e| e == 0.0));
    }

    #[test]
    fn grid_validation() {
        assert!(geometric_k_grid(0.5, 2.0, 4).is_err());
        assert!(geometric_k_grid(1.0, 1.0, 4).is_err());
        let g = geometric_k_grid(1.0, 8.0, 4).unwrap();
        assert!((g[1] - 2.0).abs() < 1e-14 && (g[2] - 4.0).abs() < 1e-14 && g[3] == 8.0);
        assert!(check_k_grid(&[1.0, 1.0]).is_err());
        assert!(check_k_grid(&[0.9, 2.0]).is_err());
    }

    #[test]
    fn csv_header_and_rows() {
        let exps = derive_exponents(3.0, 4.0, 3, None).unwrap();
        let curve = SuperlevelCurve {
            k_grid: vec![1.0, 2.0],
            y: vec![0.125, 0.0],
            omega_arg: vec![0.5, 0.0],
            exponents: exps,
        };
        let mut buf = Vec::new();
        curve.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "k,Y_k,omega_arg,excess");
        assert_eq!(lines.len(), 3);
        // 0.125^{1/3} − 0.125 = 0.375
        assert!(lines[1].ends_with("3.7500000000000000e-1"));
    }
}
