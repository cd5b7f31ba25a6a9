//! Seeded band-limited random fields.

use hjlab_core::spectral::{lq_norm, GridSpec, ScalarField, SpectrumWorkspace};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::LabError;

/// Name of the generator recorded in manifests.
pub const GENERATOR: &str = "ChaCha20 (rand_chacha, seed_from_u64)";

/// Modes `m ∈ [−B, B]^d` with first nonzero component positive, in
/// lexicographic order. The order does not depend on the grid size.
fn half_band(d: usize, band: i64) -> Vec<[i64; 3]> {
    let range = |active: bool| if active { -band..=band } else { 0..=0 };
    let mut modes = Vec::new();
    for m0 in range(true) {
        for m1 in range(d > 1) {
            for m2 in range(d > 2) {
                let m = [m0, m1, m2];
                if m.iter().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                    modes.push(m);
                }
            }
        }
    }
    modes
}

/// Real field `Σ c_m e^{2πi m·x}` over `|m_j| ≤ band_limit` with standard-normal
/// real and imaginary parts, `c_{−m} = conj(c_m)` and `c_0 = 0`.
pub fn unit_band_limited(
    seed: u64,
    band_limit: usize,
    grid: GridSpec,
    ws: &SpectrumWorkspace,
) -> Result<ScalarField, LabError> {
    if band_limit == 0 || 4 * band_limit >= grid.n() {
        return Err(LabError::Config(format!(
            "band_limit = {band_limit} must satisfy 1 ≤ band_limit < n/4 = {}",
            grid.n() as f64 / 4.0
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let d = grid.dim();
    let mut spectrum = vec![Complex64::new(0.0, 0.0); grid.len()];
    for m in half_band(d, band_limit as i64) {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        let c = Complex64::new(re, im);
        let slot = |sign: i64| {
            let idx: Vec<usize> = (0..d).map(|j| grid.slot(sign * m[j])).collect();
            grid.ravel(&idx)
        };
        spectrum[slot(1)] = c;
        spectrum[slot(-1)] = c.conj();
    }
    ScalarField::new(grid, ws.synthesize(&spectrum)).map_err(|e| LabError::Domain(e.to_string()))
}

/// [`unit_band_limited`] rescaled so that `‖f‖_q = m_target`.
pub fn generate_source(
    seed: u64,
    band_limit: usize,
    m_target: f64,
    q: f64,
    grid: GridSpec,
    ws: &SpectrumWorkspace,
) -> Result<ScalarField, LabError> {
    let raw = unit_band_limited(seed, band_limit, grid, ws)?;
    let norm = lq_norm(&raw, q).map_err(|e| LabError::Domain(e.to_string()))?;
    Ok(raw.scaled(m_target / norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_band_counts() {
        assert_eq!(half_band(1, 3).len(), 3);
        assert_eq!(half_band(2, 2).len(), (25 - 1) / 2);
        assert_eq!(half_band(3, 1).len(), (27 - 1) / 2);
    }

    #[test]
    fn rescaled_norm_and_determinism() {
        let grid = GridSpec::new(2, 32).unwrap();
        let ws = SpectrumWorkspace::new(grid);
        let f = generate_source(3, 4, 5.0, 4.0, grid, &ws).unwrap();
        assert!((lq_norm(&f, 4.0).unwrap() - 5.0).abs() < 1e-10);
        assert!(f.mean().abs() < 1e-12);
        let g = generate_source(3, 4, 5.0, 4.0, grid, &ws).unwrap();
        assert_eq!(f, g);
        assert_ne!(f, generate_source(4, 4, 5.0, 4.0, grid, &ws).unwrap());
        assert!(generate_source(3, 8, 5.0, 4.0, grid, &ws).is_err());
    }

    #[test]
    fn same_function_on_finer_grid() {
        let coarse = GridSpec::new(2, 32).unwrap();
        let fine = coarse.refined();
        let a = unit_band_limited(9, 3, coarse, &SpectrumWorkspace::new(coarse)).unwrap();
        let b = unit_band_limited(9, 3, fine, &SpectrumWorkspace::new(fine)).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let x = a.at(&[i, j]);
                let y = b.at(&[2 * i, 2 * j]);
                assert!((x - y).abs() < 1e-12);
            }
        }
    }
}
