//! Finite-dimensional toolkit for bipartite vectors, their antilinear
//! s-maps, EPR channels, teleportation and the modular objects of a vector.

pub mod antilinear;
pub mod channel;
pub mod error;
pub mod io;
pub mod linalg;
pub mod modular;
pub mod smap;
pub mod state;
pub mod states;
pub mod teleport;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{c64, ComplexMatrix, ComplexVector};
pub use state::{DensityOperator, PureState};
