//! Spectral simulation and rate verification for the pressureless Euler /
//! compressible Navier-Stokes two-phase system, its drift-flux relaxation
//! limit and its incompressible low-Mach limit.

pub mod error;
pub mod besov;
pub mod linear;
pub mod spectral;
pub mod systems;
pub mod integrator;
pub mod experiments;
pub mod io;

pub use error::{Error, Result};
