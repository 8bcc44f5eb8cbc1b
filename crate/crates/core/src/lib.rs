//! Lattice objects of the open XXZ spin chain with a non-diagonal right
//! boundary, its boundary non-local charges, and a suite that checks the
//! algebraic identities relating them.

pub mod algebra;
pub mod charges;
pub mod eigen;
pub mod error;
pub mod exec;
pub mod export;
pub mod lattice;
pub mod laurent;
pub mod operator;
pub mod tensor;
pub mod verify;

pub use error::{Error, Result};
