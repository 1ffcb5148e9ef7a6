//! Exact linear theory of the two-velocity system: symbol matrices,
//! eigenvalues, closed-form Green's functions with an expm fallback, the
//! relative-velocity kernel and continuum-frequency decay norms.

mod continuum;
pub mod expm;
mod symbol;

pub use continuum::{
    channel, continuum_linear_norms, Channel, ChannelNorms, Profile, RadialInit, CHANNELS, XI_MAX, XI_MIN,
};
pub use symbol::{
    compressible_symbol, eigenvalues, eigenvalues_with, incompressible_symbol, propagator, propagator_expm,
    propagator_with, relative_velocity_kernel, relative_velocity_kernel_with, Branch, EigenSet, LinearCoeffs,
    Propagator, RelativeKernel, DEGENERACY_TOL, RESONANCE_TOL,
};
