//! Model files: lexer, parser and name resolution. Printing lives with the
//! terms (`Display` on `Term`) and produces text this parser accepts.

mod lexer;
mod parser;

pub use lexer::Pos;
pub use parser::{parse, parse_term, parse_term_in};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl ParseError {
    pub(crate) fn at(p: Pos, msg: String) -> ParseError {
        ParseError { line: p.line, col: p.col, msg }
    }
}
