//! Numerical laboratory for the observability of the harmonic-heat equation
//! `∂_t y − Δy + μ²‖x‖²y = 0` on balls and the Baouendi-Grushin equation
//! obtained by tensorizing it against Dirichlet modes of an interval.
//!
//! The crate provides radial Sturm-Liouville eigensolvers, real spherical
//! harmonics with sub-region quadrature, spectral and Crank-Nicolson
//! evolution, Carleman-weight audits, observation Gramians with cost and
//! minimal-norm control computations, the explicit Lebeau-Robbiano constant
//! calculus, and the hyperbolic/energy estimate utilities backing them.

pub mod bigfloat;
pub mod cache;
pub mod carleman;
pub mod error;
pub mod estimates;
pub mod evolution;
pub mod harmonics;
pub mod lebeau_robbiano;
pub mod linalg;
pub mod observability;
pub mod quadrature;
pub mod radial;

pub use error::GrlbError;
