//! Weak-measurement protection of a qubit against amplitude damping,
//! simulated three ways: closed-form channel algebra, duality-algorithm
//! circuits with one ancilla per non-unitary block, and Sz-Nagy dilations.

pub mod channels;
pub mod circuit;
pub mod dilation;
pub mod duality;
pub mod error;
pub mod experiments;
pub mod qmat;

pub use error::{Error, Result};
