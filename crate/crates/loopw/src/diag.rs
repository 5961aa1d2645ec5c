//! Source positions and diagnostics shared by every pipeline stage.

use std::fmt;

/// Byte range into the original source text.
///
/// Spans deliberately compare equal to each other: two syntax trees that
/// differ only in where their nodes sit in the file are the same tree for
/// every purpose we care about (golden tests, round-trip checks, caching).
#[derive(Debug, Clone, Copy, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn join(self, other: Span) -> Span {
        Span {
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl Eq for Span {}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

/// Identity on the actual byte offsets, for the few places (trace keys)
/// where positions must really be distinguished.
pub fn same_position(a: Span, b: Span) -> bool {
    a.start == b.start && a.end == b.end
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Error => write!(f, "error"),
            Severity::Warning => write!(f, "warning"),
        }
    }
}

/// One reported problem. `rule` is a stable machine-readable tag (e.g.
/// "for-entry", "jump-arity"); `message` is the human explanation and
/// carries expected/found details where they exist.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub span: Span,
    pub rule: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn error(span: Span, rule: &'static str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Error,
            span,
            rule,
            message: message.into(),
        }
    }

    pub fn warning(span: Span, rule: &'static str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity: Severity::Warning,
            span,
            rule,
            message: message.into(),
        }
    }
}

/// Maps byte offsets back to 1-based line:column pairs.
#[derive(Debug, Clone)]
pub struct LineMap {
    line_starts: Vec<usize>,
}

impl LineMap {
    pub fn new(src: &str) -> LineMap {
        let mut line_starts = vec![0];
        for (i, b) in src.bytes().enumerate() {
            if b == b'\n' {
                line_starts.push(i + 1);
            }
        }
        LineMap { line_starts }
    }

    pub fn position(&self, offset: usize) -> (usize, usize) {
        let line = match self.line_starts.binary_search(&offset) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        (line + 1, offset - self.line_starts[line] + 1)
    }

    /// Renders a diagnostic as one tab-separated line:
    /// `severity<TAB>line:col<TAB>rule<TAB>message`.
    pub fn render(&self, d: &Diagnostic) -> String {
        let (line, col) = self.position(d.span.start);
        format!("{}\t{}:{}\t{}\t{}", d.severity, line, col, d.rule, d.message)
    }
}
