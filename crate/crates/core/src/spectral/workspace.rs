use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{FieldError, GridSpec, ScalarField};

/// Normalized Fourier coefficients `c_m = N^{-1} Σ_j u_j e^{-2πi m·j/n}` in FFT slot order.
pub type Spectrum = Vec<Complex64>;

/// Lines per tile in the strided transposes of [`FftN::run`].
const TILE: usize = 16;

/// Separable d-dimensional complex FFT on one grid size.
#[derive(Clone)]
pub(crate) struct FftN {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftN {
    fn new(grid: GridSpec, planner: &mut FftPlanner<f64>) -> Self {
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
        }
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let total = data.len();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..self.grid.dim() {
            let stride = self.grid.stride(axis);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            // Gather `stride` interleaved lines at a time into contiguous rows.
            // The transposes run in tiles of `TILE` lines so that reads stay
            // contiguous and the written rows stay cache resident.
            let block = n * stride;
            let mut lines = vec![Complex64::new(0.0, 0.0); block];
            for start in (0..total).step_by(block) {
                let chunk = &mut data[start..start + block];
                for i0 in (0..stride).step_by(TILE) {
                    let i1 = (i0 + TILE).min(stride);
                    for k in 0..n {
                        for i in i0..i1 {
                            lines[i * n + k] = chunk[k * stride + i];
                        }
                    }
                }
                plan.process_with_scratch(&mut lines, &mut scratch);
                for i0 in (0..stride).step_by(TILE) {
                    let i1 = (i0 + TILE).min(stride);
                    for k in 0..n {
                        for i in i0..i1 {
                            chunk[k * stride + i] = lines[i * n + k];
                        }
                    }
                }
            }
        }
    }

    /// Real samples to normalized spectrum.
    pub(crate) fn analyze(&self, values: &[f64]) -> Spectrum {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.run(&mut data, &self.forward);
        let scale = 1.0 / data.len() as f64;
        for c in data.iter_mut() {
            *c *= scale;
        }
        data
    }

    /// Normalized spectrum to samples; the imaginary residue is discarded.
    pub(crate) fn synthesize(&self, spectrum: &[Complex64]) -> Vec<f64> {
        let mut data = spectrum.to_vec();
        self.run(&mut data, &self.inverse);
        data.into_iter().map(|c| c.re).collect()
    }
}

/// FFT plans and Fourier multipliers for one grid, plus the twice-refined grid
/// used for oversampled nonlinear evaluation. Read-only once built.
#[derive(Clone)]
pub struct SpectrumWorkspace {
    pub(super) grid: GridSpec,
    coarse: FftN,
    fine: FftN,
    /// `m²` summed over axes for each coarse slot.
    mode_norm2: Vec<f64>,
    /// `2π·m_j` per axis and coarse slot, zero on that axis' Nyquist plane.
    gradient_factor: Vec<Vec<f64>>,
    /// `(coarse slot, fine slot, weight)` triples realizing zero-padding.
    pad_map: Vec<(usize, usize, f64)>,
    /// `(fine slot, coarse slot)` pairs of retained modes.
    truncate_map: Vec<(usize, usize)>,
}

impl fmt::Debug for SpectrumWorkspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectrumWorkspace")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl SpectrumWorkspace {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        let coarse = FftN::new(grid, &mut planner);
        let fine = FftN::new(grid.refined(), &mut planner);
        let d = grid.dim();
        let mode_norm2 = (0..grid.len())
            .map(|flat| {
                let m = grid.mode(flat);
                m[..d].iter().map(|&k| (k * k) as f64).sum()
            })
            .collect();
        let n = grid.n();
        let gradient_factor = (0..d)
            .map(|axis| {
                (0..grid.len())
                    .map(|flat| {
                        let idx = grid.unravel(flat)[axis];
                        if idx == n / 2 {
                            0.0
                        } else {
                            2.0 * PI * grid.wavenumber(idx) as f64
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            grid,
            coarse,
            fine,
            mode_norm2,
            gradient_factor,
            pad_map: Self::build_pad_map(grid),
            truncate_map: Self::build_truncate_map(grid),
        }
    }

    /// A Nyquist coefficient is split evenly between `±n/2` so the padded field is
    /// the real trigonometric interpolant.
    fn build_pad_map(grid: GridSpec) -> Vec<(usize, usize, f64)> {
        let d = grid.dim();
        let n = grid.n();
        let fine_grid = grid.refined();
        let mut map = Vec::with_capacity(grid.len());
        let mut target = [0usize; 3];
        for flat in 0..grid.len() {
            let idx = grid.unravel(flat);
            let nyquist: Vec<usize> = (0..d).filter(|&a| idx[a] == n / 2).collect();
            let copies = 1usize << nyquist.len();
            let weight = 1.0 / copies as f64;
            for mask in 0..copies {
                for axis in 0..d {
                    target[axis] = fine_grid.slot(grid.wavenumber(idx[axis]));
                }
                for (bit, &axis) in nyquist.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        target[axis] = fine_grid.slot(n as i64 / 2);
                    }
                }
                map.push((flat, fine_grid.ravel(&target[..d]), weight));
            }
        }
        map
    }

    /// Modes at `±n/2` fold onto the coarse Nyquist slot; higher modes are dropped.
    fn build_truncate_map(grid: GridSpec) -> Vec<(usize, usize)> {
        let d = grid.dim();
        let half = grid.n() as i64 / 2;
        let fine_grid = grid.refined();
        let mut map = Vec::new();
        let mut target = [0usize; 3];
        'modes: for flat in 0..fine_grid.len() {
            let m = fine_grid.mode(flat);
            for axis in 0..d {
                if m[axis].abs() > half {
                    continue 'modes;
                }
                target[axis] = grid.slot(m[axis]);
            }
            map.push((flat, grid.ravel(&target[..d])));
        }
        map
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn fine_grid(&self) -> GridSpec {
        self.grid.refined()
    }

    pub(crate) fn check(&self, u: &ScalarField) -> Result<(), FieldError> {
        self.grid.check_same(u.grid())
    }

    /// Laplacian multiplier `−4π²|m|²` at a flat spectral index.
    #[inline]
    pub fn laplacian_multiplier(&self, flat: usize) -> f64 {
        -4.0 * PI * PI * self.mode_norm2[flat]
    }

    /// `|m|²` at a flat spectral index.
    #[inline]
    pub fn mode_norm2(&self, flat: usize) -> f64 {
        self.mode_norm2[flat]
    }

    /// Gradient multiplier `2πi·m_j` in direction `axis`; zero on the Nyquist plane
    /// of that axis so that derivatives of real fields stay real.
    #[inline]
    pub fn gradient_multiplier(&self, flat: usize, axis: usize) -> Complex64 {
        Complex64::new(0.0, self.gradient_factor[axis][flat])
    }

    pub fn analyze(&self, values: &[f64]) -> Spectrum {
        self.coarse.analyze(values)
    }

    pub fn synthesize(&self, spectrum: &[Complex64]) -> Vec<f64> {
        self.coarse.synthesize(spectrum)
    }

    pub(crate) fn analyze_fine(&self, values: &[f64]) -> Spectrum {
        self.fine.analyze(values)
    }

    pub(crate) fn synthesize_fine(&self, spectrum: &[Complex64]) -> Vec<f64> {
        self.fine.synthesize(spectrum)
    }

    /// Zero-pads a coarse spectrum onto the refined grid.
    pub fn pad_spectrum(&self, coarse: &[Complex64]) -> Spectrum {
        let mut out = vec![Complex64::new(0.0, 0.0); self.fine.grid.len()];
        for &(from, to, weight) in &self.pad_map {
            out[to] += coarse[from] * weight;
        }
        out
    }

    /// Keeps the refined-grid modes representable on the coarse grid.
    pub fn truncate_spectrum(&self, fine: &[Complex64]) -> Spectrum {
        let mut out = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for &(from, to) in &self.truncate_map {
            out[to] += fine[from];
        }
        out
    }

    /// Samples of the trigonometric interpolant of `u` on the refined grid.
    pub fn interpolate_fine(&self, u: &ScalarField) -> Result<ScalarField, FieldError> {
        self.check(u)?;
        let spec = self.analyze(u.values());
        Ok(ScalarField::from_raw(
            self.fine_grid(),
            self.synthesize_fine(&self.pad_spectrum(&spec)),
        ))
    }

    /// Spectral restriction of a refined-grid field back to this grid.
    pub fn restrict_from_fine(&self, u: &ScalarField) -> Result<ScalarField, FieldError> {
        self.fine_grid().check_same(u.grid())?;
        let spec = self.analyze_fine(u.values());
        Ok(ScalarField::from_raw(
            self.grid,
            self.synthesize(&self.truncate_spectrum(&spec)),
        ))
    }
}
