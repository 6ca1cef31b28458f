//! Formula IR: the map-reduce formula language, legality rules and the
//! def/use structure every schedule has to respect.

mod ast;
mod deps;
mod legality;
mod parse;

pub use ast::*;
pub use deps::{extract_dependencies, DepEdge, DependencyGraph, IndexCycle};
pub use legality::{check_legality, LegalityReport, Violation, ViolationKind, MAX_GROUP_DEPTH};
pub use parse::{parse_spec, ParseError, ParseErrorKind};
