//! Regular-grid sample containers for scatterers and fields.

use crate::{C64, Error, Result};

/// Element types a [`GridField`] can hold: real (`f64`) or complex ([`C64`])
/// samples.
pub trait Scalar: Copy + PartialEq + std::fmt::Debug + 'static {
    fn zero() -> Self;
    fn to_c64(self) -> C64;
    /// Projects a complex value back onto the element type. For `f64` this
    /// drops the imaginary part (callers only do this where it is roundoff).
    fn from_c64(z: C64) -> Self;
    fn abs_sq(self) -> f64;
    fn scale(self, factor: f64) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z.re
    }
    fn abs_sq(self) -> f64 {
        self * self
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
}

impl Scalar for C64 {
    fn zero() -> Self {
        C64::new(0.0, 0.0)
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn from_c64(z: C64) -> Self {
        z
    }
    fn abs_sq(self) -> f64 {
        self.norm_sqr()
    }
    fn scale(self, factor: f64) -> Self {
        self * factor
    }
}

/// Samples of a scatterer or wavefield on a regular grid.
///
/// `values` is stored row-major (last axis fastest). `spacing` and `offset`
/// give the physical coordinates of node `(i_0, …, i_{d-1})` as
/// `offset[ax] + i_ax * spacing[ax]`, in km.
#[derive(Debug, Clone, PartialEq)]
pub struct GridField<T: Scalar = f64> {
    values: Vec<T>,
    shape: Vec<usize>,
    spacing: Vec<f64>,
    offset: Vec<f64>,
}

impl<T: Scalar> GridField<T> {
    pub fn new(values: Vec<T>, shape: Vec<usize>, spacing: Vec<f64>, offset: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() != spacing.len() || shape.len() != offset.len() {
            return Err(Error::Shape(format!(
                "shape/spacing/offset ranks disagree: {} / {} / {}",
                shape.len(),
                spacing.len(),
                offset.len()
            )));
        }
        if spacing.iter().any(|&h| !(h > 0.0)) {
            return Err(Error::Domain("grid spacings must be positive".into()));
        }
        let n: usize = shape.iter().product();
        if n != values.len() {
            return Err(Error::Shape(format!(
                "shape {:?} does not match {} samples",
                shape,
                values.len()
            )));
        }
        Ok(Self { values, shape, spacing, offset })
    }

    pub fn zeros(shape: &[usize], spacing: &[f64], offset: &[f64]) -> Result<Self> {
        let n = shape.iter().product();
        Self::new(vec![T::zero(); n], shape.to_vec(), spacing.to_vec(), offset.to_vec())
    }

    /// Builds a field by evaluating `f` at every node's physical coordinates.
    pub fn from_fn(
        shape: &[usize],
        spacing: &[f64],
        offset: &[f64],
        mut f: impl FnMut(&[f64]) -> T,
    ) -> Result<Self> {
        let mut field = Self::zeros(shape, spacing, offset)?;
        let mut coords = vec![0.0; shape.len()];
        for flat in 0..field.len() {
            field.coords_of(flat, &mut coords);
            field.values[flat] = f(&coords);
        }
        Ok(field)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    /// Volume (length/area/volume) of one grid cell.
    pub fn cell_measure(&self) -> f64 {
        self.spacing.iter().product()
    }

    /// Physical coordinates of the node with flat index `flat`.
    pub fn coords_of(&self, flat: usize, out: &mut [f64]) {
        let mut rem = flat;
        for ax in (0..self.shape.len()).rev() {
            let i = rem % self.shape[ax];
            rem /= self.shape[ax];
            out[ax] = self.offset[ax] + i as f64 * self.spacing[ax];
        }
    }

    /// Multi-index of the node with flat index `flat`.
    pub fn index_of(&self, flat: usize, out: &mut [usize]) {
        let mut rem = flat;
        for ax in (0..self.shape.len()).rev() {
            out[ax] = rem % self.shape[ax];
            rem /= self.shape[ax];
        }
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for ax in 0..self.shape.len() {
            flat = flat * self.shape[ax] + idx[ax];
        }
        flat
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> GridField<U> {
        GridField {
            values: self.values.iter().map(|&v| f(v)).collect(),
            shape: self.shape.clone(),
            spacing: self.spacing.clone(),
            offset: self.offset.clone(),
        }
    }

    /// Checks that the two fields live on the same grid.
    pub fn same_grid<U: Scalar>(&self, other: &GridField<U>) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "grid shapes differ: {:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(())
    }

    /// Discrete `L²` norm with cell-measure weights.
    pub fn l2_norm(&self) -> f64 {
        let w = self.cell_measure();
        (self.values.iter().map(|v| v.abs_sq()).sum::<f64>() * w).sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v.scale(factor))
    }
}

impl GridField<f64> {
    pub fn to_complex(&self) -> GridField<C64> {
        self.map(|v| C64::new(v, 0.0))
    }

    /// Linear combination `self + alpha * other` on a shared grid.
    pub fn axpy(&mut self, alpha: f64, other: &GridField<f64>) {
        debug_assert_eq!(self.shape, other.shape);
        for (a, b) in self.values.iter_mut().zip(other.values.iter()) {
            *a += alpha * b;
        }
    }

    pub fn dot(&self, other: &GridField<f64>) -> f64 {
        debug_assert_eq!(self.shape, other.shape);
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .sum()
    }
}

impl GridField<C64> {
    /// Real part as a real field.
    pub fn real(&self) -> GridField<f64> {
        self.map(|v| v.re)
    }
}
