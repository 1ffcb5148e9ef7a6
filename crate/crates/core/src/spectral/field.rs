use std::sync::Arc;

use super::grid::{Grid, C64};
use crate::error::{Error, Result};

/// Real scalar or vector field stored as Hermitian Fourier coefficients.
/// Components are stored one after another.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<Grid>,
    ncomp: usize,
    data: Vec<C64>,
}

impl SpectralField {
    pub fn zeros(grid: &Arc<Grid>, ncomp: usize) -> Self {
        SpectralField { grid: grid.clone(), ncomp, data: vec![C64::new(0.0, 0.0); ncomp * grid.len()] }
    }

    pub fn scalar_zeros(grid: &Arc<Grid>) -> Self {
        Self::zeros(grid, 1)
    }

    pub fn vector_zeros(grid: &Arc<Grid>) -> Self {
        Self::zeros(grid, grid.dim())
    }

    /// Builds a field from raw coefficients; Hermitian symmetry is enforced.
    pub fn from_coeffs(grid: &Arc<Grid>, ncomp: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != ncomp * grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coefficients, got {}",
                ncomp * grid.len(),
                data.len()
            )));
        }
        let mut f = SpectralField { grid: grid.clone(), ncomp, data };
        f.enforce_hermitian();
        Ok(f)
    }

    pub fn from_physical(grid: &Arc<Grid>, comps: &[Vec<f64>]) -> Result<Self> {
        for c in comps {
            if c.len() != grid.len() {
                return Err(Error::ShapeMismatch(format!(
                    "physical component has {} points, grid has {}",
                    c.len(),
                    grid.len()
                )));
            }
        }
        let refs: Vec<&[f64]> = comps.iter().map(|c| c.as_slice()).collect();
        let spec = grid.to_spectral(&refs);
        let mut data = Vec::with_capacity(comps.len() * grid.len());
        for c in spec {
            data.extend(c);
        }
        Ok(SpectralField { grid: grid.clone(), ncomp: comps.len(), data })
    }

    /// Samples `f(x)` on the grid for each component.
    pub fn from_fn<F>(grid: &Arc<Grid>, ncomp: usize, f: F) -> Self
    where
        F: Fn(usize, [f64; 3]) -> f64,
    {
        let comps: Vec<Vec<f64>> =
            (0..ncomp).map(|c| (0..grid.len()).map(|i| f(c, grid.x(i))).collect()).collect();
        Self::from_physical(grid, &comps).expect("sizes match by construction")
    }

    pub fn to_physical(&self) -> Vec<Vec<f64>> {
        let refs: Vec<&[C64]> = (0..self.ncomp).map(|c| self.comp(c)).collect();
        self.grid.to_physical(&refs)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn ncomp(&self) -> usize {
        self.ncomp
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Mutable access to all coefficients. Callers must restore Hermitian
    /// symmetry with [`SpectralField::enforce_hermitian`] if they break it.
    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn comp(&self, c: usize) -> &[C64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [C64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Component `c` as a standalone scalar field.
    pub fn component(&self, c: usize) -> SpectralField {
        SpectralField { grid: self.grid.clone(), ncomp: 1, data: self.comp(c).to_vec() }
    }

    /// Concatenates scalar fields into one multi-component field.
    pub fn stack(parts: &[&SpectralField]) -> Result<SpectralField> {
        let grid = parts
            .first()
            .ok_or_else(|| Error::ShapeMismatch("nothing to stack".into()))?
            .grid
            .clone();
        let mut data = Vec::new();
        let mut ncomp = 0;
        for p in parts {
            if !Arc::ptr_eq(&p.grid, &grid) {
                return Err(Error::ShapeMismatch("fields live on different grids".into()));
            }
            data.extend_from_slice(&p.data);
            ncomp += p.ncomp;
        }
        Ok(SpectralField { grid, ncomp, data })
    }

    pub fn enforce_hermitian(&mut self) {
        let n = self.grid.len();
        for chunk in self.data.chunks_exact_mut(n) {
            self.grid.symmetrize(chunk);
        }
    }

    pub fn dealias(&mut self) {
        let n = self.grid.len();
        for chunk in self.data.chunks_exact_mut(n) {
            self.grid.dealias(chunk);
        }
    }

    pub fn dealiased(&self) -> SpectralField {
        let mut f = self.clone();
        f.dealias();
        f
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        let n = g.len();
        let mut worst = 0.0f64;
        for c in 0..self.ncomp {
            let d = &self.data[c * n..(c + 1) * n];
            for idx in 0..n {
                worst = worst.max((d[idx] - d[g.neg(idx)].conj()).norm());
            }
        }
        worst
    }

    pub fn zero_mode(&self, c: usize) -> C64 {
        self.comp(c)[0]
    }

    /// Spatial mean of component `c`.
    pub fn mean(&self, c: usize) -> f64 {
        self.zero_mode(c).re
    }

    /// Spatial integral of component `c`.
    pub fn integral(&self, c: usize) -> f64 {
        self.mean(c) * self.grid.volume()
    }

    /// `L²((0,L)^d)` norm over all components, by Parseval.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.volume() * self.data.iter().map(|z| z.norm_sqr()).sum::<f64>()).sqrt()
    }

    /// Maximum absolute physical value over all components.
    pub fn linf_norm(&self) -> f64 {
        self.to_physical()
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
    }

    fn check_same(&self, other: &SpectralField) {
        assert!(Arc::ptr_eq(&self.grid, &other.grid) || self.grid.len() == other.grid.len());
        assert_eq!(self.ncomp, other.ncomp, "component count mismatch");
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SpectralField) {
        self.check_same(other);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * alpha;
        }
    }

    pub fn scale(&mut self, alpha: f64) {
        for a in self.data.iter_mut() {
            *a *= alpha;
        }
    }

    pub fn scaled(&self, alpha: f64) -> SpectralField {
        let mut f = self.clone();
        f.scale(alpha);
        f
    }

    pub fn add(&self, other: &SpectralField) -> SpectralField {
        let mut f = self.clone();
        f.axpy(1.0, other);
        f
    }

    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let mut f = self.clone();
        f.axpy(-1.0, other);
        f
    }

    /// Maximum coefficient difference, for exact-equality style checks.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        self.check_same(other);
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Re-targets the same coefficients on another grid with identical
    /// lattice size; used for dilation by dyadic factors.
    pub fn with_grid(&self, grid: &Arc<Grid>) -> Result<SpectralField> {
        if grid.len() != self.grid.len() || grid.dim() != self.grid.dim() {
            return Err(Error::ShapeMismatch("grids have different lattices".into()));
        }
        Ok(SpectralField { grid: grid.clone(), ncomp: self.ncomp, data: self.data.clone() })
    }
}
