//! Pseudo-spectral solver for the projected Navier–Stokes equations on the
//! periodic box `[−L/2, L/2)³`, with optional density transport.
//!
//! The state is the half spectrum of a real velocity field, normalized so
//! `u(x) = Σ_k û(k) e^{ik·x}`. Time stepping multiplies the viscous part
//! exactly (`e^{−ν|k|²dt}`) and treats `−B(u,u) + Pf` with Heun's method:
//!
//! `u* = E(uⁿ + dt·N(uⁿ))`, `uⁿ⁺¹ = E uⁿ + dt/2·(E N(uⁿ) + N(u*))`.
//!
//! With a density the momentum viscosity is `μ/ρ ≥ μ/β`: the `μ/β` part goes
//! through the integrating factor and `P[(μ/ρ − μ/β)Δu]` is explicit. The
//! density is advected semi-Lagrangian with trilinear interpolation, which
//! is a convex combination and keeps `min ρ₀ ≤ ρ ≤ max ρ₀`.

mod field;
mod solver;

pub use field::{Spectral, SpectralField};
pub use solver::{
    density_profile, duhamel_residual, Checkpoint, DensityConfig, Forcing, ForcingProfile, Solver,
    SolverConfig, State, StepRecord, Trajectory,
};
