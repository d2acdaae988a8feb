//! The C-like mini language of program fragments.

mod ast;
mod instrument;
mod parse;
pub mod print;

pub use ast::*;
pub use instrument::instrument;
pub use parse::{parse_benchmark, parse_program};
