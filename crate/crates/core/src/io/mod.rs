//! Input parsing and tree serialization.

pub mod emit;
pub mod parse;

pub use emit::{emit_tree, read_tree, Format};
pub use parse::{generator_str, parse_ideal, ChartSource, IdealFile};
