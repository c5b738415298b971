//! Fine-grained EPR-steering inequalities for two- and three-qubit systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`qcore`]: dense complex matrices, density matrices, Bloch vectors.
//! - [`measure`]: spin projectors and joint/conditional outcome probabilities.
//! - [`statezoo`]: Werner, Schmidt-form pure and tripartite state families.
//! - [`steering`]: the uncertainty game, the steering functional and its
//!   local-hidden-state bounds.
//! - [`criteria`]: CHSH and the linear (Saunders) steering criterion.
//! - [`keyrate`]: monogamy of the functional and one-sided device-independent
//!   key-rate bounds.
//! - [`optimizer`]: deterministic grid search over measurement directions.
//!
//! Every numerical threshold lives in [`tol`].

pub mod criteria;
pub mod error;
pub mod keyrate;
pub mod measure;
pub mod optimizer;
pub mod qcore;
pub mod statezoo;
pub mod steering;
pub mod tol;

pub use error::{Error, Result};
