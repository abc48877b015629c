//! Simulation of linear stochastic Volterra equations of convolution type
//! via resolvent families, with desk-scale verification of the resolvent
//! equation, complete positivity, Yosida approximation, the Itô isometry,
//! the strong-solution identity and the Cauchy-problem reformulation of
//! the stochastic convolution.
//!
//! The state space is a truncated orthonormal eigenbasis of a diagonal
//! generator, so every operator identity is exact per mode and quadrature
//! is the only discretization error source.

pub mod convolution;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod operator;
pub mod resolvent;
pub mod solver;
pub mod special;
pub mod stochastic;
pub mod verify;

pub mod config;
pub mod experiments;

pub use error::{Error, Result};
pub use grid::TimeGrid;
pub use kernel::{check_complete_positivity, Kernel, KernelKind};
pub use operator::{j_scalar, semigroup_scalar, yosida_scalar, HVector, SpectralOperator};
pub use resolvent::ResolventTable;
pub use special::mittag_leffler;
pub use stochastic::{Integrand, WienerBundle};
