use serde::{Deserialize, Serialize};

use super::{FieldError, GridSpec, ScalarField, SpectrumWorkspace};

/// Grid on which pointwise nonlinearities are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Oversample {
    /// Evaluate directly at the nodes.
    None,
    /// Zero-pad to a grid with 2n points per axis, evaluate, truncate back.
    #[default]
    Double,
}

impl Oversample {
    pub fn factor(self) -> usize {
        match self {
            Oversample::None => 1,
            Oversample::Double => 2,
        }
    }
}

pub(crate) fn apply_pointwise(
    grid: &GridSpec,
    inputs: &[&[f64]],
    expr: &impl Fn(&[f64]) -> f64,
) -> Result<Vec<f64>, FieldError> {
    let mut args = vec![0.0; inputs.len()];
    let mut out = Vec::with_capacity(grid.len());
    for node in 0..grid.len() {
        for (a, inp) in args.iter_mut().zip(inputs) {
            *a = inp[node];
        }
        let v = expr(&args);
        if !v.is_finite() {
            return Err(FieldError::Evaluation {
                node: grid.unravel(node)[..grid.dim()].to_vec(),
                grid: *grid,
                value: v,
            });
        }
        out.push(v);
    }
    Ok(out)
}

/// Applies `expr` pointwise to the tuple of `inputs`, optionally on the
/// spectrally refined grid to limit aliasing of products and powers.
pub fn nonlinear_eval(
    inputs: &[&ScalarField],
    oversample: Oversample,
    ws: &SpectrumWorkspace,
    expr: impl Fn(&[f64]) -> f64,
) -> Result<ScalarField, FieldError> {
    for inp in inputs {
        ws.check(inp)?;
    }
    match oversample {
        Oversample::None => {
            let cols: Vec<&[f64]> = inputs.iter().map(|f| f.values()).collect();
            let out = apply_pointwise(ws.grid(), &cols, &expr)?;
            Ok(ScalarField::from_raw(*ws.grid(), out))
        }
        Oversample::Double => {
            let fine: Vec<ScalarField> = inputs
                .iter()
                .map(|f| ws.interpolate_fine(f))
                .collect::<Result<_, _>>()?;
            let cols: Vec<&[f64]> = fine.iter().map(|f| f.values()).collect();
            let out = apply_pointwise(&ws.fine_grid(), &cols, &expr)?;
            ws.restrict_from_fine(&ScalarField::from_raw(ws.fine_grid(), out))
        }
    }
}
