//! Concrete and abstract syntax.

mod ast;
mod module;
mod parser;
mod printer;

pub use ast::{erase_markers, expand_plain_let, to_engine, Marker, Name, Path, Term};
pub use module::{Definition, SourceModule};
pub use parser::{parse, parse_formula, parse_term, ParseError};
pub use printer::{print, print_module};
