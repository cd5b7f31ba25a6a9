//! Empirical envelope of the superlevel excess against the superlevel measure.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{BernsteinError, SuperlevelCurve};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaEnvelope {
    /// `(t, e(t))` sorted by `t`; `e` is the running maximum of the excess.
    pub points: Vec<(f64, f64)>,
    pub provenance: Vec<String>,
}

impl OmegaEnvelope {
    /// `e(t)`: the largest pooled excess with superlevel measure at most `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let idx = self.points.partition_point(|&(ti, _)| ti <= t);
        if idx == 0 {
            0.0
        } else {
            self.points[idx - 1].1
        }
    }

    /// Columns `t, excess`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,excess")?;
        for (t, e) in &self.points {
            writeln!(out, "{t:.16e},{e:.16e}")?;
        }
        Ok(())
    }
}

/// Pools `(omega_arg, excess)` from every curve, folding in the given order.
pub fn omega_envelope(curves: &[(&str, &SuperlevelCurve)]) -> Result<OmegaEnvelope, BernsteinError> {
    if curves.is_empty() {
        return Err(BernsteinError::Domain("omega envelope needs at least one curve".into()));
    }
    let mut pooled = Vec::new();
    for (_, curve) in curves {
        pooled.extend(curve.omega_arg.iter().copied().zip(curve.excess()));
    }
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut running = 0.0f64;
    let points = pooled
        .into_iter()
        .map(|(t, e)| {
            running = running.max(e);
            (t, running)
        })
        .collect();
    Ok(OmegaEnvelope {
        points,
        provenance: curves.iter().map(|(label, _)| label.to_string()).collect(),
    })
}
