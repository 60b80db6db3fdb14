//! Set permanents of square tableaux over finite alphabets.
//!
//! A tableau is *Cantorian* when none of its row-words can be read as a
//! permuted diagonal. This crate decides that property exactly (one bipartite
//! perfect-matching test per row), counts Cantorian tableaux, samples random
//! tableaux around the Cantorian/non-Cantorian transition, and runs the greedy
//! diagonal constructions on finite truncations of infinite tableaux.

pub mod asymptotics;
pub mod cantorian;
pub mod diagonal;
pub mod enumerate;
mod error;
pub mod graph;
pub mod permanent;
pub mod rng;
pub mod tableau;

pub use error::{Error, Result};
pub use tableau::{Alphabet, Tableau, Transform, Word};

/// Version tag written into every machine-readable output.
pub const SCHEMA: &str = "cantoria/1";
