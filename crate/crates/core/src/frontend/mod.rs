//! SMT-LIB front end: terms, parsing, printing, scrambling and subproblem
//! emission for QF_UF and QF_IDL.

pub mod diff;
mod emit;
mod model;
mod parse;
mod print;
mod scramble;
mod sexp;
mod term;

pub use emit::{emit_subproblem, subproblem_file_name, EmitError};
pub use model::{EvalError, FuncInterp, Model, Value};
pub use parse::{parse_script, Declaration, Logic, ParseError, ParseErrorKind, Pos, Script};
pub use print::{print_script, term_to_string};
pub use scramble::{fresh_names, scramble};
pub use term::{Sort, Term};
