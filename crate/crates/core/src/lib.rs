//! Evasion paths in mobile sensor networks.
//!
//! Given sensors that move in a planar domain and a fence of sensors that
//! guard its boundary, decide whether an intruder can move through the
//! domain for the whole time interval without ever being within sensing
//! range. The crate offers three deciders of increasing strength together
//! with a geometric oracle that checks them.

pub mod chain;
pub mod complexes;
pub mod error;
pub mod field;
pub mod fixtures;
pub mod geometry;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod random;
pub mod report;
pub mod rotation;
pub mod simplex;
pub mod stacked;
pub mod stream;
pub mod zigzag;

pub use chain::{CellComplex, Homology};
pub use error::{Error, ErrorClass, Result};
pub use field::PrimeField;
pub use simplex::{Simplex, SimplicialComplex};
pub use stream::{EventBatch, EventOp, SimplicialEventStream, TimeGrid};
pub use zigzag::{decompose, full_length_criterion, Barcode, CriterionVerdict, ZigzagModule};
