//! Models of quantum nondemolition readout of a flux qubit through a driven,
//! damped resonator.
//!
//! The crate is `no_std` (it needs `alloc`) and splits into four layers:
//!
//! * numerical plumbing: [`linalg`], [`fock`], [`state`], [`ode`], [`quad`];
//! * [`analytic`]: closed-form pointer states, outcome probabilities and
//!   measurement-induced dephasing;
//! * [`lindblad`]: a master-equation integrator for the joint
//!   qubit-resonator state, used as an independent oracle for the closed forms;
//! * [`backaction`]: photon-number noise, second-order reduced dynamics and
//!   the qubit transition rates it produces when the coupling is not QND.
//!
//! Units: `hbar = 1` and every frequency, rate or coupling is an angular
//! frequency in ns⁻¹.

#![no_std]

extern crate alloc;

pub mod analytic;
pub mod backaction;
mod error;
pub mod fock;
pub mod lindblad;
pub mod linalg;
pub mod ode;
mod params;
pub mod quad;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use params::{SigmaZ, SystemParams};
