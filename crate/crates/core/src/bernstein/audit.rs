//! Pointwise audit of the algebraic inequalities used in the Bernstein estimate.

use serde::{Deserialize, Serialize};

use super::gfun::g_unchecked;
use super::{BernsteinError, Exponents};
use crate::spectral::{gradient, hessian, ScalarField, SpectrumWorkspace};

/// Absolute part of the audit tolerance.
pub const AUDIT_ABS_TOL: f64 = 1e-12;
/// Relative part of the audit tolerance, multiplied by the size of the larger side.
pub const AUDIT_REL_TOL: f64 = 1e-10;

pub const INEQUALITY_NAMES: [&str; 4] = [
    "g'(s) s^(1/2) <= (1+s)^(delta/2)",
    "g'(s) + 2 s g''(s) >= delta g'(s)",
    "|D2u|^2 >= (Lap u)^2 / d",
    "(1+|Du|^2)^gamma <= 2^(gamma-1) (1+|Du|^(2 gamma))",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    /// Largest `lesser side − greater side` over all nodes. Negative means slack.
    pub max_violation: f64,
    /// Largest violation divided by the node's tolerance. At most 1 to pass.
    pub max_scaled_violation: f64,
    pub worst_node: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub checks: Vec<InequalityCheck>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Signed violation and scale of the two `g` inequalities at `s`.
pub fn g_defects(s: f64, delta: f64) -> [(f64, f64); 2] {
    let g = g_unchecked(s, delta);
    let grad_lhs = g.dg * s.sqrt();
    let grad_rhs = (1.0 + s).powf(0.5 * delta);
    let conv_lhs = delta * g.dg;
    let conv_rhs = g.dg + 2.0 * s * g.d2g;
    [
        (grad_lhs - grad_rhs, grad_lhs.abs().max(grad_rhs.abs())),
        (conv_lhs - conv_rhs, conv_lhs.abs().max(g.dg + 2.0 * s * g.d2g.abs())),
    ]
}

/// Signed violation and scale of each inequality at one node.
///
/// `s = |Du|²`, `lap = Δu`, `hess_sq = |D²u|²`.
pub fn inequality_defects(
    s: f64,
    lap: f64,
    hess_sq: f64,
    d: usize,
    exps: &Exponents,
) -> [(f64, f64); 4] {
    let [grad, conv] = g_defects(s, exps.delta);
    let cs_lhs = lap * lap / d as f64;
    let pow_lhs = (1.0 + s).powf(exps.gamma);
    let pow_rhs = 2f64.powf(exps.gamma - 1.0) * (1.0 + s.powf(exps.gamma));
    [
        grad,
        conv,
        (cs_lhs - hess_sq, cs_lhs.max(hess_sq)),
        (pow_lhs - pow_rhs, pow_lhs.max(pow_rhs)),
    ]
}

/// Per-node violation fields, one per entry of [`INEQUALITY_NAMES`].
pub fn defect_fields(
    u: &ScalarField,
    exps: &Exponents,
    ws: &SpectrumWorkspace,
) -> Result<[ScalarField; 4], BernsteinError> {
    let (defects, _) = node_defects(u, exps, ws)?;
    let grid = *u.grid();
    let mut out = defects.into_iter().map(|v| ScalarField::new(grid, v));
    Ok([
        out.next().unwrap()?,
        out.next().unwrap()?,
        out.next().unwrap()?,
        out.next().unwrap()?,
    ])
}

type NodeDefects = (Vec<Vec<f64>>, Vec<Vec<f64>>);

fn node_defects(
    u: &ScalarField,
    exps: &Exponents,
    ws: &SpectrumWorkspace,
) -> Result<NodeDefects, BernsteinError> {
    let grad = gradient(u, ws)?;
    let hess = hessian(u, ws)?;
    let grid = u.grid();
    let d = grid.dim();
    let s_field = grad.norm_squared();
    let mut violations: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(grid.len())).collect();
    let mut scales: Vec<Vec<f64>> = (0..4).map(|_| Vec::with_capacity(grid.len())).collect();
    let mut full = vec![0.0; d * d];
    for flat in 0..grid.len() {
        hess.at_node(flat, &mut full);
        let lap: f64 = (0..d).map(|i| full[i * d + i]).sum();
        let hess_sq: f64 = full.iter().map(|x| x * x).sum();
        let node = inequality_defects(s_field.values()[flat], lap, hess_sq, d, exps);
        for (j, (v, sc)) in node.into_iter().enumerate() {
            violations[j].push(v);
            scales[j].push(sc);
        }
    }
    Ok((violations, scales))
}

/// Evaluates the four inequalities at every node with `s = |Du|²`.
pub fn pointwise_audit(
    u: &ScalarField,
    exps: &Exponents,
    ws: &SpectrumWorkspace,
) -> Result<AuditReport, BernsteinError> {
    let (violations, scales) = node_defects(u, exps, ws)?;
    let checks = violations
        .iter()
        .zip(&scales)
        .zip(INEQUALITY_NAMES)
        .map(|((viol, scale), name)| summarize(name, viol, scale))
        .collect();
    Ok(AuditReport { checks })
}

/// Audits the two properties of `g` over caller-supplied `(s, δ)` samples.
pub fn audit_g_samples(
    samples: impl IntoIterator<Item = (f64, f64)>,
) -> Result<AuditReport, BernsteinError> {
    let mut viol = [Vec::new(), Vec::new()];
    let mut scale = [Vec::new(), Vec::new()];
    for (s, delta) in samples {
        super::gfun::g_eval(s, delta)?;
        for (j, (v, sc)) in g_defects(s, delta).into_iter().enumerate() {
            viol[j].push(v);
            scale[j].push(sc);
        }
    }
    Ok(AuditReport {
        checks: (0..2)
            .map(|j| summarize(INEQUALITY_NAMES[j], &viol[j], &scale[j]))
            .collect(),
    })
}

fn summarize(name: &str, viol: &[f64], scale: &[f64]) -> InequalityCheck {
    let mut max_violation = f64::NEG_INFINITY;
    let mut max_scaled = f64::NEG_INFINITY;
    let mut worst_node = 0;
    for (i, (&v, &sc)) in viol.iter().zip(scale).enumerate() {
        let scaled = v / (AUDIT_ABS_TOL + AUDIT_REL_TOL * sc);
        if scaled > max_scaled || scaled.is_nan() {
            max_scaled = scaled;
            worst_node = i;
        }
        max_violation = max_violation.max(v);
    }
    InequalityCheck {
        name: name.to_string(),
        max_violation,
        max_scaled_violation: max_scaled,
        worst_node,
        passed: max_scaled <= 1.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::derive_exponents;
    use crate::spectral::GridSpec;

    #[test]
    fn zero_field_has_slack() {
        let grid = GridSpec::new(2, 16).unwrap();
        let ws = SpectrumWorkspace::new(grid);
        let exps = derive_exponents(3.0, 4.0, 2, None).unwrap();
        let report = pointwise_audit(&ScalarField::zeros(grid), &exps, &ws).unwrap();
        assert!(report.passed());
        assert_eq!(report.checks[0].max_violation, -1.0);
        assert!((report.checks[1].max_violation + (1.0 - exps.delta)).abs() < 1e-15);
        assert_eq!(report.checks[2].max_violation, 0.0);
        // (1+0)^γ − 2^{γ−1}(1+0) = 1 − 2^{γ−1}
        assert!((report.checks[3].max_violation - (1.0 - 4.0)).abs() < 1e-15);
    }

    #[test]
    fn g_samples_pass() {
        let samples = (0..200).flat_map(|i| {
            let s = if i == 0 { 0.0 } else { 10f64.powf(-6.0 + 12.0 * i as f64 / 199.0) };
            [0.011, 0.5, 0.989].into_iter().map(move |d| (s, d))
        });
        assert!(audit_g_samples(samples).unwrap().passed());
    }
}
