//! Primitive sets of boolean matrices, synchronizing automata, and the constructions
//! that translate exponents into (careful) reset thresholds and back.
//!
//! Matrices are at most 64x64 and stored as bitset rows; automata have at most 64
//! states and state sets are bitmasks.

pub mod automata;
pub mod boolmat;
pub mod corpus;
pub mod bounds;
pub mod error;
pub mod partition;
pub mod primitivity;
pub mod reductions;
pub mod verify;

pub use automata::{cerny, PartialAutomaton, Word};
pub use boolmat::{BoolMatrix, MatrixSet};
pub use error::{Error, Result};
pub use partition::Partition;
