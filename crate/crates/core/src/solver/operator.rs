//! Discrete residual map `R(u, λ) = −Δu + P[H(I·Du)] + λ − f` and its exact
//! Jacobian, where `I` pads to the refined grid and `P` truncates back.

use num_complex::Complex64;

use super::{Hamiltonian, SolveError};
use crate::spectral::{apply_pointwise, FieldError, ScalarField, Spectrum, SpectrumWorkspace};

pub struct ResidualMap<'a> {
    ws: &'a SpectrumWorkspace,
    hamiltonian: &'a Hamiltonian,
    f_spec: Spectrum,
}

/// Residual with the pieces the solvers reuse.
pub(crate) struct Evaluation {
    pub residual: Vec<f64>,
    /// `I·Du` on the refined grid, one array per axis.
    pub fine_gradient: Vec<Vec<f64>>,
}

/// `DH(I·Du)` frozen on the refined grid.
pub struct Linearization<'a> {
    ws: &'a SpectrumWorkspace,
    coefficients: Vec<Vec<f64>>,
}

impl<'a> ResidualMap<'a> {
    pub fn new(
        ws: &'a SpectrumWorkspace,
        hamiltonian: &'a Hamiltonian,
        f: &'a ScalarField,
    ) -> Result<Self, SolveError> {
        ws.grid().check_same(f.grid())?;
        Ok(Self {
            ws,
            hamiltonian,
            f_spec: ws.analyze(f.values()),
        })
    }

    pub fn workspace(&self) -> &SpectrumWorkspace {
        self.ws
    }

    pub(crate) fn source_spectrum(&self) -> &Spectrum {
        &self.f_spec
    }

    pub(crate) fn fine_gradient(&self, u_spec: &[Complex64]) -> Vec<Vec<f64>> {
        let d = self.ws.grid().dim();
        (0..d)
            .map(|axis| {
                let comp: Vec<Complex64> = u_spec
                    .iter()
                    .enumerate()
                    .map(|(flat, &c)| c * self.ws.gradient_multiplier(flat, axis))
                    .collect();
                self.ws.synthesize_fine(&self.ws.pad_spectrum(&comp))
            })
            .collect()
    }

    /// Spectrum of the oversampled Hamiltonian term, plus the refined gradient.
    pub(crate) fn hamiltonian_term(
        &self,
        u_spec: &[Complex64],
    ) -> Result<(Spectrum, Vec<Vec<f64>>), FieldError> {
        let fine_grad = self.fine_gradient(u_spec);
        let cols: Vec<&[f64]> = fine_grad.iter().map(|c| c.as_slice()).collect();
        let h = self.hamiltonian;
        let values = apply_pointwise(&self.ws.fine_grid(), &cols, &|p: &[f64]| h.value(p))?;
        let spec = self.ws.truncate_spectrum(&self.ws.analyze_fine(&values));
        Ok((spec, fine_grad))
    }

    pub(crate) fn evaluate_spectrum(
        &self,
        u_spec: &[Complex64],
        lambda: f64,
    ) -> Result<Evaluation, FieldError> {
        let (hamiltonian_spec, fine_gradient) = self.hamiltonian_term(u_spec)?;
        let mut r_spec: Vec<Complex64> = u_spec
            .iter()
            .zip(&hamiltonian_spec)
            .zip(&self.f_spec)
            .enumerate()
            .map(|(flat, ((&u, &h), &f))| -self.ws.laplacian_multiplier(flat) * u + h - f)
            .collect();
        r_spec[0] += lambda;
        Ok(Evaluation {
            residual: self.ws.synthesize(&r_spec),
            fine_gradient,
        })
    }

    pub fn residual(&self, u: &ScalarField, lambda: f64) -> Result<ScalarField, SolveError> {
        self.ws.grid().check_same(u.grid())?;
        let eval = self.evaluate_spectrum(&self.ws.analyze(u.values()), lambda)?;
        Ok(ScalarField::from_raw(*self.ws.grid(), eval.residual))
    }

    pub(crate) fn linearize_from_gradient(&self, fine_gradient: &[Vec<f64>]) -> Linearization<'a> {
        let d = fine_gradient.len();
        let len = self.ws.fine_grid().len();
        let mut coefficients = vec![vec![0.0; len]; d];
        let mut p = [0.0; 3];
        let mut g = [0.0; 3];
        for node in 0..len {
            for axis in 0..d {
                p[axis] = fine_gradient[axis][node];
            }
            self.hamiltonian.gradient(&p[..d], &mut g[..d]);
            for axis in 0..d {
                coefficients[axis][node] = g[axis];
            }
        }
        Linearization {
            ws: self.ws,
            coefficients,
        }
    }

    /// Freezes `DH(I·Du)` at `u`.
    pub fn linearize(&self, u: &ScalarField) -> Result<Linearization<'a>, SolveError> {
        self.ws.grid().check_same(u.grid())?;
        let grad = self.fine_gradient(&self.ws.analyze(u.values()));
        Ok(self.linearize_from_gradient(&grad))
    }
}

impl Linearization<'_> {
    /// Spectrum of `−Δv + P[DH(I·Du)·I·Dv] + μ` from the spectrum of `v`.
    pub(crate) fn apply_spectrum(&self, v_spec: &[Complex64], mu: f64) -> Spectrum {
        let ws = self.ws;
        let fine_len = ws.fine_grid().len();
        let mut transport = vec![0.0; fine_len];
        for (axis, coeff) in self.coefficients.iter().enumerate() {
            let comp: Vec<Complex64> = v_spec
                .iter()
                .enumerate()
                .map(|(flat, &c)| c * ws.gradient_multiplier(flat, axis))
                .collect();
            let fine = ws.synthesize_fine(&ws.pad_spectrum(&comp));
            for ((t, b), dv) in transport.iter_mut().zip(coeff).zip(&fine) {
                *t += b * dv;
            }
        }
        let mut out = ws.truncate_spectrum(&ws.analyze_fine(&transport));
        for (flat, (o, &v)) in out.iter_mut().zip(v_spec).enumerate() {
            *o -= ws.laplacian_multiplier(flat) * v;
        }
        out[0] += mu;
        out
    }

    /// Jacobian action on `(v, μ)`: returns the field part; the constraint part is `mean(v)`.
    pub fn apply(&self, v: &ScalarField, mu: f64) -> ScalarField {
        let spec = self.apply_spectrum(&self.ws.analyze(v.values()), mu);
        ScalarField::from_raw(*self.ws.grid(), self.ws.synthesize(&spec))
    }
}
