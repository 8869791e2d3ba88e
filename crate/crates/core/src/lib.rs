//! Cayley automatic structures over finitely generated groups.
//!
//! The crate covers synchronous multi-tape automata, a handful of concrete
//! group models, catalogued Cayley automatic structures, their Cayley
//! distance functions, corridor fillings of loops, and a small calculus for
//! comparing growth functions up to affine reparametrisation.

pub mod automata;
pub mod error;
pub mod filling;
pub mod group;
pub mod growth;
pub mod profile;
pub mod structures;

pub use error::{Error, Result};
