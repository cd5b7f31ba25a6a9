//! `L^q(B_{1/2})` norms of `f_ε` and `|Dv_ε|^γ`, and the logarithmic growth fit.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::profile::{sphere_area, RadialProfile};
use super::quadrature::{integrate_pieces, QuadratureSettings};
use super::{CounterexampleError, CutoffProfile};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormRow {
    pub eps: f64,
    pub q: f64,
    pub norm_f: f64,
    pub norm_grad_pow: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivergenceFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|y − fit| / |y|` over the rows, with `y = norm_grad_pow^q`.
    pub fit_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormTable {
    pub gamma: f64,
    pub d: u32,
    pub rows: Vec<NormRow>,
    pub rel_tol: f64,
}

/// `(‖f_ε‖_q, ‖|Dv_ε|^γ‖_q)` over the ball of radius 1/2.
pub fn ball_norms(
    prof: &RadialProfile,
    q: f64,
    quad: QuadratureSettings,
) -> Result<(f64, f64), CounterexampleError> {
    if !(q >= 1.0) || !q.is_finite() {
        return Err(CounterexampleError::Domain(format!("q = {q} must be ≥ 1")));
    }
    let sigma = sphere_area(prof.d)?;
    let d1 = prof.d as i32 - 1;
    let breaks = prof.breaks_from(prof.eps);
    let f_int = integrate_pieces(
        |r| prof.derivatives(r).2.abs().powf(q) * r.powi(d1),
        &breaks[..breaks.len().min(3)],
        quad,
    )?;
    let g_int = integrate_pieces(
        |r| prof.derivatives(r).0.abs().powf(prof.gamma * q) * r.powi(d1),
        &breaks,
        quad,
    )?;
    Ok(((sigma * f_int).powf(1.0 / q), (sigma * g_int).powf(1.0 / q)))
}

impl NormTable {
    pub fn compute(
        gamma: f64,
        d: u32,
        q: f64,
        eps_list: &[f64],
        cutoff: CutoffProfile,
        quad: QuadratureSettings,
    ) -> Result<Self, CounterexampleError> {
        let mut rows: Vec<NormRow> = eps_list
            .iter()
            .map(|&eps| {
                let prof = RadialProfile::new(gamma, d, eps, cutoff)?;
                let (norm_f, norm_grad_pow) = ball_norms(&prof, q, quad)?;
                Ok(NormRow {
                    eps,
                    q,
                    norm_f,
                    norm_grad_pow,
                })
            })
            .collect::<Result<_, CounterexampleError>>()?;
        rows.sort_by(|a, b| b.eps.total_cmp(&a.eps));
        Ok(Self {
            gamma,
            d,
            rows,
            rel_tol: quad.rel_tol,
        })
    }

    /// Columns `eps, q, norm_f, norm_grad_pow, quad_tol`, one row per ε in
    /// descending order. The fit and any extra entries follow as `# key=value`
    /// comment lines.
    pub fn write_csv<W: Write>(
        &self,
        mut out: W,
        fit: Option<&DivergenceFit>,
        extra: &[(&str, f64)],
    ) -> std::io::Result<()> {
        writeln!(out, "# gamma={}", self.gamma)?;
        writeln!(out, "# d={}", self.d)?;
        writeln!(out, "eps,q,norm_f,norm_grad_pow,quad_tol")?;
        for row in &self.rows {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                row.eps, row.q, row.norm_f, row.norm_grad_pow, self.rel_tol
            )?;
        }
        if let Some(fit) = fit {
            writeln!(out, "# slope={:.16e}", fit.slope)?;
            writeln!(out, "# intercept={:.16e}", fit.intercept)?;
            writeln!(out, "# fit_residual={:.16e}", fit.fit_residual)?;
        }
        for (key, value) in extra {
            writeln!(out, "# {key}={value:.16e}")?;
        }
        Ok(())
    }
}

/// Least-squares line through `(ln(1/ε), norm_grad_pow^q)`.
pub fn divergence_fit(rows: &[NormRow]) -> Result<DivergenceFit, CounterexampleError> {
    let mut eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    eps.sort_by(f64::total_cmp);
    eps.dedup();
    if eps.len() < 4 {
        return Err(CounterexampleError::Domain(format!(
            "divergence fit needs at least 4 distinct ε, got {}",
            eps.len()
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| (1.0 / r.eps).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.norm_grad_pow.powf(r.q)).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fit_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs() / y.abs())
        .fold(0.0, f64::max);
    Ok(DivergenceFit {
        slope,
        intercept,
        fit_residual,
    })
}
