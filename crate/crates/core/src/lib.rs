//! Loops on the hypercubic lattice, the loop operations, and the exact
//! string-trajectory expansion of Wilson-loop expectations at large N.

pub mod catalan;
pub mod concat;
pub mod coeff;
pub mod enumerate;
pub mod error;
pub mod fixtures;
pub mod lattice;
pub mod lemmas;
pub mod ops;
pub mod sequence;
pub mod series;
pub mod trajectory;
pub mod weight;
pub mod word;

pub use error::{EnumerateError, LatticeError, OpError, ParseError};
pub use lattice::{Edge, Loop, Path, Plaquette, Vertex};
pub use ops::{apply, operation_catalog, Catalog, CatalogEntry, Family, OpKind, OperationRecord, Sign};
pub use sequence::LoopSequence;
pub use trajectory::{Counts, Trajectory};
pub use weight::{transition_weight, SymbolicWeight};
