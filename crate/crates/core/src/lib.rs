//! Simulation library for a ring-of-emitters quantum battery.
//!
//! A symmetric ring of two-level emitters couples to a central emitter through
//! a non-Hermitian effective model, producing a bright (fast-decaying) and a
//! dark (long-lived) hybridized state. Those two states join a ground state
//! and two auxiliary levels in a five-level battery: a hot reservoir charges
//! the {g, +, -} manifold while a unimodal cavity works the {-, alpha} and
//! {alpha, beta, g} transitions. The crate builds the 5x5 classical rate
//! generator, integrates and solves its population dynamics, evaluates the
//! thermodynamic observables (sector energies, passive counterparts,
//! ergotropy, capacity, flux, work, power), and sweeps ring size and coupling
//! to regenerate figure datasets deterministically.

pub mod config;
pub mod dynamics;
pub mod error;
pub mod levels;
pub mod ring;
pub mod sweep;
pub mod thermo;

pub use error::{Error, Result};
