use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Grid, SpectralField};

/// System variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    EulerNs,
    Df,
    Tns,
    DfScaled,
    EulerNsScaled,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::EulerNs => "euler_ns",
            SystemKind::Df => "df",
            SystemKind::Tns => "tns",
            SystemKind::DfScaled => "df_scaled",
            SystemKind::EulerNsScaled => "euler_ns_scaled",
        }
    }

    pub fn layout(self, dim: usize) -> Layout {
        match self {
            SystemKind::EulerNs | SystemKind::EulerNsScaled => {
                Layout { u: Some(1), a: Some(1 + dim), v: 2 + dim, ncomp: 2 + 2 * dim, dim }
            }
            SystemKind::Df | SystemKind::DfScaled => Layout { u: None, a: Some(1), v: 2, ncomp: 2 + dim, dim },
            SystemKind::Tns => Layout { u: None, a: None, v: 1, ncomp: 1 + dim, dim },
        }
    }
}

/// Component offsets inside a packed state. The transported density is
/// always component 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub u: Option<usize>,
    pub a: Option<usize>,
    pub v: usize,
    pub ncomp: usize,
    pub dim: usize,
}

fn check_parts(grid: &Arc<Grid>, parts: &[(&SpectralField, usize, &str)]) -> Result<()> {
    for (f, nc, name) in parts {
        if f.ncomp() != *nc {
            return Err(Error::ShapeMismatch(format!("{name} has {} components, expected {nc}", f.ncomp())));
        }
        if f.grid().len() != grid.len() {
            return Err(Error::ShapeMismatch(format!("{name} lives on another grid")));
        }
    }
    Ok(())
}

fn slice(x: &SpectralField, start: usize, count: usize) -> SpectralField {
    let parts: Vec<SpectralField> = (start..start + count).map(|c| x.component(c)).collect();
    let refs: Vec<&SpectralField> = parts.iter().collect();
    SpectralField::stack(&refs).expect("non-empty slice")
}

/// Unknowns `(ρ, u, a, v)` of the two-velocity system.
#[derive(Clone, Debug)]
pub struct EulerNsState {
    pub rho: SpectralField,
    pub u: SpectralField,
    pub a: SpectralField,
    pub v: SpectralField,
}

impl EulerNsState {
    pub fn pack(&self) -> Result<SpectralField> {
        let g = self.rho.grid().clone();
        let d = g.dim();
        check_parts(&g, &[(&self.rho, 1, "rho"), (&self.u, d, "u"), (&self.a, 1, "a"), (&self.v, d, "v")])?;
        SpectralField::stack(&[&self.rho, &self.u, &self.a, &self.v])
    }

    pub fn unpack(x: &SpectralField) -> Self {
        let d = x.grid().dim();
        EulerNsState { rho: x.component(0), u: slice(x, 1, d), a: x.component(1 + d), v: slice(x, 2 + d, d) }
    }
}

/// Unknowns `(ρ, a, v)` of the drift-flux model.
#[derive(Clone, Debug)]
pub struct DfState {
    pub rho: SpectralField,
    pub a: SpectralField,
    pub v: SpectralField,
}

impl DfState {
    pub fn pack(&self) -> Result<SpectralField> {
        let g = self.rho.grid().clone();
        let d = g.dim();
        check_parts(&g, &[(&self.rho, 1, "rho"), (&self.a, 1, "a"), (&self.v, d, "v")])?;
        SpectralField::stack(&[&self.rho, &self.a, &self.v])
    }

    pub fn unpack(x: &SpectralField) -> Self {
        let d = x.grid().dim();
        DfState { rho: x.component(0), a: x.component(1), v: slice(x, 2, d) }
    }
}

/// Unknowns `(ϱ, w)` of the transport / incompressible Navier-Stokes system.
#[derive(Clone, Debug)]
pub struct TnsState {
    pub varrho: SpectralField,
    pub w: SpectralField,
}

impl TnsState {
    pub fn pack(&self) -> Result<SpectralField> {
        let g = self.varrho.grid().clone();
        check_parts(&g, &[(&self.varrho, 1, "varrho"), (&self.w, g.dim(), "w")])?;
        SpectralField::stack(&[&self.varrho, &self.w])
    }

    pub fn unpack(x: &SpectralField) -> Self {
        let d = x.grid().dim();
        TnsState { varrho: x.component(0), w: slice(x, 1, d) }
    }
}
