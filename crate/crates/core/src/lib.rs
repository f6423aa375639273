//! Toolkit for compiling integers and small machine programs into discrete
//! chemical reaction networks that provably finish, plus the search and
//! simulation machinery to check them at desk scale.

pub mod analysis;
pub mod cli;
pub mod crn;
pub mod dexp;
pub mod encoders;
pub mod machines;
pub mod samples;
pub mod rm_compiler;

pub use crn::{Configuration, Crn, Reaction, SpeciesId};
