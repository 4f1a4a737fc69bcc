pub mod automaton;
pub mod counting;
pub mod error;
pub mod group;
pub mod linalg;
pub mod metric;
pub mod mobius;
pub mod shift;
pub mod thermo;

pub use error::{Error, Result};
