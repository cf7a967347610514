//! Restricted PDDL frontend: STRIPS with typing, durative actions with
//! static durations, and constant increase/decrease effects on numeric
//! fluents.

mod ground;
mod model;
mod parse;
pub mod sexpr;

use thiserror::Error;

pub use ground::ground;
pub use model::*;
pub use parse::{parse_domain, parse_problem};

use sexpr::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PddlError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unsupported feature `{feature}`")]
    UnsupportedFeature { feature: String, line: usize, col: usize },
    #[error("{line}:{col}: {msg}")]
    Invalid { line: usize, col: usize, msg: String },
    #[error("type error: {0}")]
    Type(String),
    #[error("{0}")]
    Mismatch(String),
}

impl PddlError {
    pub(crate) fn syntax(pos: Pos, msg: impl Into<String>) -> Self {
        PddlError::Syntax {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    pub(crate) fn unsupported(feature: &str, pos: Pos) -> Self {
        PddlError::UnsupportedFeature {
            feature: feature.to_string(),
            line: pos.line,
            col: pos.col,
        }
    }

    pub(crate) fn invalid(pos: Pos, msg: impl Into<String>) -> Self {
        PddlError::Invalid {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    /// Source position, when the error has one.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            PddlError::Syntax { line, col, .. }
            | PddlError::UnsupportedFeature { line, col, .. }
            | PddlError::Invalid { line, col, .. } => Some((*line, *col)),
            PddlError::Type(_) | PddlError::Mismatch(_) => None,
        }
    }

    /// A one-line diagnostic: `ERROR file:line:col message`.
    pub fn diagnostic(&self, file: &str) -> String {
        let (line, col) = self.position().unwrap_or((0, 0));
        let msg = match self {
            PddlError::Syntax { msg, .. } => format!("syntax error: {msg}"),
            PddlError::UnsupportedFeature { feature, .. } => format!("unsupported feature `{feature}`"),
            PddlError::Invalid { msg, .. } => msg.clone(),
            PddlError::Type(m) => format!("type error: {m}"),
            PddlError::Mismatch(m) => m.clone(),
        };
        format!("ERROR {file}:{line}:{col} {msg}")
    }
}

/// Parses a decimal (`2.5`) or fraction (`5/2`) literal.
pub fn parse_rational(s: &str) -> Option<crate::task::Rational> {
    parse::parse_number(s, Pos::default()).ok()
}

/// Parses and grounds a domain/problem pair given as text.
pub fn load(domain: &str, problem: &str) -> Result<crate::task::GroundTask, PddlError> {
    let d = parse_domain(domain)?;
    let p = parse_problem(problem)?;
    ground(&d, &p)
}
