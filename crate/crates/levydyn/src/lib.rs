//! Lévy-stable and relativistic semigroup kernels, nonlocal generators,
//! regularized quantum propagators, wave-packet evolution and probability
//! currents on periodic pseudo-spectral grids.

pub mod generators;
pub mod grid;
pub mod kernels;
pub mod quad;
pub mod specfun;
