//! Numerics for the periodic viscous Hamilton–Jacobi equation
//! `−Δu + H(Du) + λ = f` on the unit torus.
//!
//! * [`spectral`]: grids, fields, FFT-based calculus, norms and level-set measures.
//! * [`solver`]: ergodic solutions `(u, λ)` by relaxation plus Newton–Krylov.
//! * [`bernstein`]: exponent bookkeeping, pointwise audits and superlevel functionals
//!   used by the `L^q` regularity estimate.
//! * [`counterexample`]: the radial family showing failure at the critical exponent.

pub mod bernstein;
pub mod counterexample;
pub mod solver;
pub mod spectral;
