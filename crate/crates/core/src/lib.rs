//! Short-time interface dynamics of u_t − (|u_x|^{p−2}u_x)_x + b u^β = 0
//! with power-law initial data C(−x)₊^α.
//!
//! [`model`] classifies parameter tuples and evaluates the named constants,
//! [`closed_form`] holds exact solutions and barrier functions, [`profile`]
//! solves the self-similar profile equations by shooting, [`pde`] is an
//! explicit finite-difference solver, [`analysis`] turns runs into verdicts and
//! [`cli`] drives experiments from config files.

pub mod analysis;
pub mod cli;
pub mod closed_form;
pub mod model;
pub mod pde;
pub mod profile;
