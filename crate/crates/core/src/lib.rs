//! Computable SD^p test-function spaces and a desk-scale incompressible
//! Navier–Stokes solver whose trajectories are checked against
//! dissipativity, contraction and energy bounds.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function
//! of its inputs; file formats, threading and the command line live in the
//! `sdnse` companion crate.
//!
//! Module map:
//!
//! - [`rational`]: the `N × N → N` pairing and the enumeration of `Qⁿ`.
//! - [`quad`]: Gauss–Legendre and adaptive Gauss–Kronrod quadrature.
//! - [`testfns`]: Jones functions, mollifiers, the `ξ` profiles and the
//!   vector test fields `E_k`.
//! - [`field`]: sampled fields on uniform grids.
//! - [`sdspace`]: the functionals `F_k`, SD^p norms, Alexiewicz norms and
//!   Vitali variation.
//! - [`embeddings`]: verification harness for the embedding theorems.
//! - [`nse`]: pseudo-spectral solver on a periodic box.
//! - [`monitor`]: dissipativity thresholds, contraction and decay monitors.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod embeddings;
mod error;
pub mod fft;
pub mod field;
pub mod monitor;
pub mod nse;
pub mod quad;
pub mod rational;
pub mod rng;
pub mod sdspace;
pub mod testfns;

pub use error::{Error, Result};
pub use num_complex::Complex64;
