//! MiniC front end: lexing, parsing with type checking, pretty printing,
//! control-flow graphs and dependence analysis.

pub mod ast;
pub mod cfg;
pub mod deps;
pub mod dump;
pub mod index;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod types;

use std::fmt;

pub use ast::{NodeId, Program, Span, Type};
pub use cfg::{build_cfg, BlockKind, Cfg, FunctionCfg};
pub use deps::{compute_control_deps, compute_data_deps, DepGraph};
pub use parser::{check_program, parse_program};
pub use pretty::pretty_print;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    Type,
    DuplicateDeclaration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub kind: DiagnosticKind,
    pub span: Span,
    pub message: String,
}

impl Diagnostic {
    pub fn syntax(span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            kind: DiagnosticKind::Syntax,
            span,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Syntax => "syntax error",
            DiagnosticKind::Type => "type error",
            DiagnosticKind::DuplicateDeclaration => "duplicate declaration",
        };
        write!(f, "{}: {kind}: {}", self.span, self.message)
    }
}

/// All diagnostics produced while parsing one source file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub diagnostics: Vec<Diagnostic>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.diagnostics.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

/// A parsed program with its CFG and dependence graph.
#[derive(Clone, Debug)]
pub struct Analysis {
    pub program: Program,
    pub cfg: Cfg,
    pub deps: DepGraph,
}

impl Analysis {
    pub fn new(program: Program) -> Self {
        let cfg = build_cfg(&program);
        let mut deps = compute_data_deps(&program, &cfg);
        deps.control = compute_control_deps(&program, &cfg).control;
        Analysis { program, cfg, deps }
    }

    pub fn from_source(src: &str) -> Result<Self, ParseError> {
        Ok(Analysis::new(parse_program(src)?))
    }
}
