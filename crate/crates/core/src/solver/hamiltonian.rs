use std::fmt;
use std::sync::Arc;

use super::SolveError;

type ValueFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type GradFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;

/// Bounded additive perturbation `b(p)` of the power Hamiltonian, with its gradient.
#[derive(Clone)]
pub struct Perturbation {
    label: String,
    bound: f64,
    value: Arc<ValueFn>,
    gradient: Arc<GradFn>,
}

impl fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Perturbation")
            .field("label", &self.label)
            .field("bound", &self.bound)
            .finish_non_exhaustive()
    }
}

impl Perturbation {
    pub fn new(
        label: impl Into<String>,
        bound: f64,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        Self {
            label: label.into(),
            bound,
            value: Arc::new(value),
            gradient: Arc::new(gradient),
        }
    }

    /// `b(p) = a·cos(|p|²)`, bounded by `|a|`.
    pub fn bounded_cosine(amplitude: f64) -> Self {
        Self::new(
            format!("cosine(amplitude={amplitude})"),
            amplitude.abs(),
            move |p| amplitude * p.iter().map(|x| x * x).sum::<f64>().cos(),
            move |p, out| {
                let s: f64 = p.iter().map(|x| x * x).sum();
                let scale = -2.0 * amplitude * s.sin();
                for (o, x) in out.iter_mut().zip(p) {
                    *o = scale * x;
                }
            },
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Largest `|b|` over a deterministic sample of gradients with `|p| ≤ 100`.
    fn sampled_sup(&self, d: usize) -> f64 {
        let mut p = vec![0.0; d];
        let mut sup = 0.0_f64;
        for i in 0..4000u64 {
            // Low-discrepancy directions and radii with a dense core near the origin.
            let r = 100.0 * ((i as f64 + 0.5) / 4000.0).powi(2);
            for (axis, x) in p.iter_mut().enumerate() {
                let phase = (i as f64) * (0.754_877_666 + 0.569_840_29 * axis as f64);
                *x = r * (std::f64::consts::TAU * phase.fract()).cos();
            }
            sup = sup.max((self.value)(&p).abs());
        }
        sup
    }
}

/// `H(p) = c1·|p|^γ + b(p)`.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    gamma: f64,
    c1: f64,
    perturbation: Option<Perturbation>,
}

impl Hamiltonian {
    pub fn power(gamma: f64) -> Result<Self, SolveError> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(SolveError::Config(format!("gamma must exceed 1, got {gamma}")));
        }
        Ok(Self {
            gamma,
            c1: 1.0,
            perturbation: None,
        })
    }

    pub fn with_c1(mut self, c1: f64) -> Result<Self, SolveError> {
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(SolveError::Config(format!("c1 must be positive, got {c1}")));
        }
        self.c1 = c1;
        Ok(self)
    }

    /// Attaches `b`, checking `sup|b| ≤ bound` on sampled gradients in dimension `d`.
    pub fn with_perturbation(mut self, b: Perturbation, d: usize) -> Result<Self, SolveError> {
        let sup = b.sampled_sup(d);
        if sup > b.bound * (1.0 + 1e-12) {
            return Err(SolveError::Config(format!(
                "perturbation {} reaches {sup}, above its declared bound {}",
                b.label, b.bound
            )));
        }
        self.perturbation = Some(b);
        Ok(self)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn c1(&self) -> f64 {
        self.c1
    }

    pub fn perturbation(&self) -> Option<&Perturbation> {
        self.perturbation.as_ref()
    }

    /// True for `|p|^2` exactly, the case linearized by `v = e^{−u}`.
    pub fn is_unit_quadratic(&self) -> bool {
        self.gamma == 2.0 && self.c1 == 1.0 && self.perturbation.is_none()
    }

    #[inline]
    pub fn value(&self, p: &[f64]) -> f64 {
        let s: f64 = p.iter().map(|x| x * x).sum();
        let base = if self.gamma == 2.0 {
            self.c1 * s
        } else {
            self.c1 * s.powf(0.5 * self.gamma)
        };
        match &self.perturbation {
            Some(b) => base + (b.value)(p),
            None => base,
        }
    }

    /// `DH(p) = c1·γ|p|^{γ−2}p + Db(p)`, with the power part set to 0 at `p = 0`.
    #[inline]
    pub fn gradient(&self, p: &[f64], out: &mut [f64]) {
        let s: f64 = p.iter().map(|x| x * x).sum();
        let scale = if s == 0.0 {
            0.0
        } else if self.gamma == 2.0 {
            2.0 * self.c1
        } else {
            self.c1 * self.gamma * s.powf(0.5 * (self.gamma - 2.0))
        };
        for (o, x) in out.iter_mut().zip(p) {
            *o = scale * x;
        }
        if let Some(b) = &self.perturbation {
            let mut extra = [0.0; 3];
            (b.gradient)(p, &mut extra[..p.len()]);
            for (o, e) in out.iter_mut().zip(&extra) {
                *o += e;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_values_and_gradient() {
        let h = Hamiltonian::power(3.0).unwrap();
        let p = [3.0, 4.0];
        assert!((h.value(&p) - 125.0).abs() < 1e-12);
        let mut g = [0.0; 2];
        h.gradient(&p, &mut g);
        // 3·|p|·p
        assert!((g[0] - 45.0).abs() < 1e-12 && (g[1] - 60.0).abs() < 1e-12);
        h.gradient(&[0.0, 0.0], &mut g);
        assert_eq!(g, [0.0, 0.0]);
    }

    #[test]
    fn subquadratic_gradient_is_continuous_at_origin() {
        let h = Hamiltonian::power(1.5).unwrap();
        let mut g = [0.0; 1];
        h.gradient(&[1e-12], &mut g);
        assert!(g[0].abs() < 1e-5);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(Hamiltonian::power(1.0).is_err());
        assert!(Hamiltonian::power(2.0).unwrap().with_c1(0.0).is_err());
        let liar = Perturbation::new("liar", 0.1, |p| p[0], |_, out| out[0] = 1.0);
        assert!(Hamiltonian::power(2.0)
            .unwrap()
            .with_perturbation(liar, 1)
            .is_err());
        let ok = Perturbation::bounded_cosine(0.3);
        let h = Hamiltonian::power(2.0)
            .unwrap()
            .with_perturbation(ok, 2)
            .unwrap();
        assert!(!h.is_unit_quadratic());
    }

    #[test]
    fn perturbation_gradient_matches_finite_differences() {
        let h = Hamiltonian::power(2.5)
            .unwrap()
            .with_perturbation(Perturbation::bounded_cosine(0.5), 2)
            .unwrap();
        let p = [0.7, -1.1];
        let mut g = [0.0; 2];
        h.gradient(&p, &mut g);
        let step = 1e-6;
        for axis in 0..2 {
            let mut a = p;
            let mut b = p;
            a[axis] += step;
            b[axis] -= step;
            let fd = (h.value(&a) - h.value(&b)) / (2.0 * step);
            assert!((fd - g[axis]).abs() < 1e-7, "axis {axis}: {fd} vs {}", g[axis]);
        }
    }
}
