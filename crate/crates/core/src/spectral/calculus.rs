//! Spectral derivatives of the trigonometric interpolant.

use num_complex::Complex64;

use super::{FieldError, Hessian, ScalarField, SpectrumWorkspace, VectorField};

impl SpectrumWorkspace {
    fn apply_multiplier(
        &self,
        spec: &[Complex64],
        mult: impl Fn(usize) -> Complex64,
    ) -> ScalarField {
        let scaled: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(flat, &c)| c * mult(flat))
            .collect();
        ScalarField::from_raw(self.grid, self.synthesize(&scaled))
    }

    /// Gradient from a precomputed spectrum.
    pub fn gradient_of_spectrum(&self, spec: &[Complex64]) -> VectorField {
        let comps = (0..self.grid.dim())
            .map(|axis| self.apply_multiplier(spec, |flat| self.gradient_multiplier(flat, axis)))
            .collect();
        VectorField::from_raw(self.grid, comps)
    }

    pub fn laplacian_of_spectrum(&self, spec: &[Complex64]) -> ScalarField {
        self.apply_multiplier(spec, |flat| Complex64::new(self.laplacian_multiplier(flat), 0.0))
    }

    pub fn hessian_of_spectrum(&self, spec: &[Complex64]) -> Hessian {
        let d = self.grid.dim();
        let mut entries = Vec::with_capacity(d * (d + 1) / 2);
        for i in 0..d {
            for j in i..d {
                let field = if i == j {
                    // Keep the Nyquist term so that the trace is exactly the Laplacian.
                    self.apply_multiplier(spec, |flat| {
                        let m = self.grid.mode(flat)[i] as f64;
                        Complex64::new(-4.0 * std::f64::consts::PI.powi(2) * m * m, 0.0)
                    })
                } else {
                    self.apply_multiplier(spec, |flat| {
                        self.gradient_multiplier(flat, i) * self.gradient_multiplier(flat, j)
                    })
                };
                entries.push(field);
            }
        }
        Hessian::from_raw(self.grid, entries)
    }
}

/// Spectral gradient `Du`.
pub fn gradient(u: &ScalarField, ws: &SpectrumWorkspace) -> Result<VectorField, FieldError> {
    ws.check(u)?;
    Ok(ws.gradient_of_spectrum(&ws.analyze(u.values())))
}

/// Spectral Laplacian; the zero mode is annihilated so the result has zero mean.
pub fn laplacian(u: &ScalarField, ws: &SpectrumWorkspace) -> Result<ScalarField, FieldError> {
    ws.check(u)?;
    Ok(ws.laplacian_of_spectrum(&ws.analyze(u.values())))
}

/// Spectral Hessian, `∂_{ij}u` for `i ≤ j`.
pub fn hessian(u: &ScalarField, ws: &SpectrumWorkspace) -> Result<Hessian, FieldError> {
    ws.check(u)?;
    Ok(ws.hessian_of_spectrum(&ws.analyze(u.values())))
}
