//! Synthesis of trace-refinement relations between two program fragments, built on
//! Kleene algebra with tests.

pub mod absint;
pub mod algebra;
pub mod automata;
pub mod cli;
pub mod editdist;
pub mod error;
pub mod kat;
pub mod lang;
pub mod oracle;
pub mod synth;
pub mod translate;

pub use error::{Error, Result};
