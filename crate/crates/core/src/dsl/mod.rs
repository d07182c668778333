//! Text format for theories and problems (`.obs`).
//!
//! ```text
//! obs 1
//! theory T_sym.
//! sort V.
//! rel E(V, V).
//! axiom sym: [x:V, y:V] E(x, y) |- E(y, x).
//! ```
//!
//! Problems share the grammar and add `points`, `assume` and `goal`:
//!
//! ```text
//! obs 1
//! theory T_sym.
//! points a b c.
//! assume E(a, b), E(b, c).
//! goal E(a, c).
//! ```
//!
//! Without a `[x:S, ...]` annotation an axiom's context is the free variables
//! of its premise in order of first appearance, with sorts inferred from use.

mod elab;
mod lexer;
mod parser;
mod printer;

use std::fmt;
use std::path::PathBuf;

pub use elab::Problem;
pub use printer::{print_formula, print_sequent, print_term, print_theory};

use crate::logic::Theory;

pub const FORMAT_VERSION: u32 = 1;

/// Builtin theory files shipped with the crate.
pub const EUCLID_SOURCE: &str = include_str!("../../theories/euclid.obs");
pub const AG_ALIASES_SOURCE: &str = include_str!("../../theories/ag_aliases.obs");
pub const TSYM_SOURCE: &str = include_str!("../../theories/tsym.obs");
pub const TSYM_TRANS_SOURCE: &str = include_str!("../../theories/tsym_trans.obs");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: Pos,
    pub end: Pos,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}-{}:{}",
            self.start.line, self.start.col, self.end.line, self.end.col
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseDiagnostic {
    pub severity: Severity,
    pub message: String,
    pub span: Span,
}

impl ParseDiagnostic {
    pub fn error(span: Span, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            message: message.into(),
            span,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(
            f,
            "{}:{}: {sev}: {}",
            self.span.start.line, self.span.start.col, self.message
        )
    }
}

/// A loaded source text with a line index.
#[derive(Debug, Clone)]
pub struct SourceFile {
    pub path: Option<PathBuf>,
    pub text: String,
    line_starts: Vec<usize>,
}

impl SourceFile {
    pub fn new(path: Option<PathBuf>, text: impl Into<String>) -> Self {
        let text = text.into();
        let mut line_starts = vec![0];
        line_starts.extend(text.match_indices('\n').map(|(i, _)| i + 1));
        Self {
            path,
            text,
            line_starts,
        }
    }

    pub fn from_str(text: &str) -> Self {
        Self::new(None, text)
    }

    pub fn read(path: impl Into<PathBuf>) -> std::io::Result<Self> {
        let path = path.into();
        let text = std::fs::read_to_string(&path)?;
        Ok(Self::new(Some(path), text))
    }

    /// 1-based line and column (in chars) of a byte offset.
    pub fn pos(&self, offset: usize) -> Pos {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let start = self.line_starts[line];
        let col = self.text[start..offset.min(self.text.len())].chars().count() + 1;
        Pos { line: line + 1, col }
    }

    pub fn span(&self, start: usize, end: usize) -> Span {
        Span {
            start: self.pos(start),
            end: self.pos(end),
        }
    }

    pub fn line_count(&self) -> usize {
        self.line_starts.len()
    }

    /// Stem of the path, used as a theory id when the file declares none.
    fn stem(&self) -> Option<String> {
        self.path
            .as_ref()
            .and_then(|p| p.file_stem())
            .map(|s| s.to_string_lossy().into_owned())
    }

    pub fn display_name(&self) -> String {
        self.path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "<input>".to_string())
    }
}

pub type Diagnostics = Vec<ParseDiagnostic>;

/// Parses a theory file. Any error diagnostic means no theory is returned.
pub fn parse_theory(src: &SourceFile) -> Result<Theory, Diagnostics> {
    let items = parser::parse(src)?;
    elab::theory(src, &items, None)
}

/// Parses declarations that extend `base`: the result has the base's id,
/// signature and axioms followed by the file's own.
pub fn parse_extension(src: &SourceFile, base: &Theory) -> Result<Theory, Diagnostics> {
    let items = parser::parse(src)?;
    elab::theory(src, &items, Some(base))
}

/// Parses a problem against `theory`; declared points become constants of
/// the problem's theory.
pub fn parse_problem(src: &SourceFile, theory: &Theory) -> Result<Problem, Diagnostics> {
    let items = parser::parse(src)?;
    elab::problem(&items, theory)
}

/// The builtin Euclidean starter theory: sort `Point`, relations `B`,
/// `cong`, `apart` and `nB`.
pub fn euclidean_theory() -> Theory {
    parse_theory(&SourceFile::new(Some("euclid.obs".into()), EUCLID_SOURCE))
        .expect("builtin Euclidean theory parses")
}

/// Euclidean theory extended with the AG-style aliases (no extra axioms).
pub fn euclidean_with_aliases() -> Theory {
    parse_extension(
        &SourceFile::new(Some("ag_aliases.obs".into()), AG_ALIASES_SOURCE),
        &euclidean_theory(),
    )
    .expect("builtin alias file parses")
}

/// Symmetric graphs: sort `V`, relation `E`, axiom `sym`.
pub fn tsym_theory() -> Theory {
    parse_theory(&SourceFile::new(Some("tsym.obs".into()), TSYM_SOURCE)).expect("builtin theory parses")
}

/// Symmetric transitive graphs: `sym` plus `trans`.
pub fn tsym_trans_theory() -> Theory {
    parse_theory(&SourceFile::new(Some("tsym_trans.obs".into()), TSYM_TRANS_SOURCE))
        .expect("builtin theory parses")
}

/// Builtin theories by id: `euclid`, `T_sym`, `T_sym_trans`.
pub fn builtin_theory(id: &str) -> Option<Theory> {
    match id {
        "euclid" => Some(euclidean_theory()),
        "T_sym" => Some(tsym_theory()),
        "T_sym_trans" => Some(tsym_trans_theory()),
        _ => None,
    }
}
