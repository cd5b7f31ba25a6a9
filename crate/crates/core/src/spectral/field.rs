use super::{FieldError, GridSpec};

/// Real grid function on the periodic unit cube.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl ScalarField {
    /// Wraps `values`, rejecting wrong lengths and non-finite entries.
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::Config(format!(
                "expected {} values for {:?}, got {}",
                grid.len(),
                grid,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite {
                node: grid.unravel(pos)[..grid.dim()].to_vec(),
                value: values[pos],
            });
        }
        Ok(Self { grid, values })
    }

    /// Unchecked constructor for values produced by this crate's own kernels.
    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self::from_raw(grid, vec![c; grid.len()])
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::constant(grid, 0.0)
    }

    /// Samples `func` at every node.
    pub fn from_fn(grid: GridSpec, func: impl Fn(&[f64]) -> f64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.coords(i);
                func(&x[..d])
            })
            .collect();
        Self::from_raw(grid, values)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at a (wrapped) multi-index.
    pub fn at(&self, idx: &[usize]) -> f64 {
        self.values[self.grid.ravel(idx)]
    }

    /// Rectangle-rule mean, equal to the integral over the unit cube.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, func: impl Fn(f64) -> f64) -> Self {
        Self::from_raw(self.grid, self.values.iter().map(|&v| func(v)).collect())
    }

    pub fn zip_map(
        &self,
        other: &ScalarField,
        func: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, FieldError> {
        self.grid.check_same(&other.grid)?;
        Ok(Self::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| func(a, b))
                .collect(),
        ))
    }

    /// `self + c`.
    pub fn shifted(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// Same function with the mean removed.
    pub fn centered(&self) -> Self {
        self.shifted(-self.mean())
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v * s)
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> Result<f64, FieldError> {
        self.grid.check_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs())))
    }
}

/// `d` scalar components on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: GridSpec,
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self, FieldError> {
        let grid = *components
            .first()
            .ok_or_else(|| FieldError::Config("vector field needs components".into()))?
            .grid();
        if components.len() != grid.dim() {
            return Err(FieldError::Config(format!(
                "vector field on a {}-d grid needs {} components, got {}",
                grid.dim(),
                grid.dim(),
                components.len()
            )));
        }
        for c in &components {
            grid.check_same(c.grid())?;
        }
        Ok(Self { grid, components })
    }

    pub(crate) fn from_raw(grid: GridSpec, components: Vec<ScalarField>) -> Self {
        Self { grid, components }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }

    /// Pointwise `|v|²`, summing components in axis order.
    pub fn norm_squared(&self) -> ScalarField {
        let mut out = vec![0.0; self.grid.len()];
        for c in &self.components {
            for (o, v) in out.iter_mut().zip(c.values()) {
                *o += v * v;
            }
        }
        ScalarField::from_raw(self.grid, out)
    }

    /// Components at one node.
    pub fn at_node(&self, flat: usize, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.values()[flat];
        }
    }
}

/// Second derivatives `∂_{ij}u` for `i ≤ j`, packed row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct Hessian {
    grid: GridSpec,
    entries: Vec<ScalarField>,
}

impl Hessian {
    pub(crate) fn from_raw(grid: GridSpec, entries: Vec<ScalarField>) -> Self {
        debug_assert_eq!(entries.len(), grid.dim() * (grid.dim() + 1) / 2);
        Self { grid, entries }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Packed position of `(i, j)`; symmetric in its arguments.
    pub fn packed_index(d: usize, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * d - i * (i + 1) / 2 + j
    }

    pub fn entry(&self, i: usize, j: usize) -> &ScalarField {
        &self.entries[Self::packed_index(self.grid.dim(), i, j)]
    }

    pub fn entries(&self) -> &[ScalarField] {
        &self.entries
    }

    /// Pointwise trace, i.e. the Laplacian.
    pub fn trace(&self) -> ScalarField {
        let d = self.grid.dim();
        let mut out = vec![0.0; self.grid.len()];
        for i in 0..d {
            for (o, v) in out.iter_mut().zip(self.entry(i, i).values()) {
                *o += v;
            }
        }
        ScalarField::from_raw(self.grid, out)
    }

    /// Full symmetric matrix at one node, row-major `d×d`.
    pub fn at_node(&self, flat: usize, out: &mut [f64]) {
        let d = self.grid.dim();
        for i in 0..d {
            for j in 0..d {
                out[i * d + j] = self.entry(i, j).values()[flat];
            }
        }
    }
}
