//! Hand-rolled lexer. `--` starts a comment that runs to end of line.

use crate::diag::{Diagnostic, Span};
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Nat(u64),
    // keywords
    Sig,
    Eq,
    Proc,
    In,
    Out,
    Pre,
    Post,
    Skip,
    Call,
    For,
    Until,
    Invariant,
    Label,
    Jump,
    Claim,
    Unpack,
    Pack,
    NatKw,
    Exists,
    Forall,
    True,
    Succ,
    // punctuation
    Semi,
    Comma,
    Colon,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Slash,
    Assign,
    Equal,
    Arrow,
    AndAnd,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(n) => return write!(f, "identifier `{n}`"),
            Tok::Nat(n) => return write!(f, "number `{n}`"),
            Tok::Sig => "`sig`",
            Tok::Eq => "`eq`",
            Tok::Proc => "`proc`",
            Tok::In => "`in`",
            Tok::Out => "`out`",
            Tok::Pre => "`pre`",
            Tok::Post => "`post`",
            Tok::Skip => "`skip`",
            Tok::Call => "`call`",
            Tok::For => "`for`",
            Tok::Until => "`until`",
            Tok::Invariant => "`invariant`",
            Tok::Label => "`label`",
            Tok::Jump => "`jump`",
            Tok::Claim => "`claim`",
            Tok::Unpack => "`unpack`",
            Tok::Pack => "`pack`",
            Tok::NatKw => "`nat`",
            Tok::Exists => "`exists`",
            Tok::Forall => "`forall`",
            Tok::True => "`true`",
            Tok::Succ => "`s`",
            Tok::Semi => "`;`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::LBrace => "`{`",
            Tok::RBrace => "`}`",
            Tok::Slash => "`/`",
            Tok::Assign => "`:=`",
            Tok::Equal => "`=`",
            Tok::Arrow => "`=>`",
            Tok::AndAnd => "`&&`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "sig" => Tok::Sig,
        "eq" => Tok::Eq,
        "proc" => Tok::Proc,
        "in" => Tok::In,
        "out" => Tok::Out,
        "pre" => Tok::Pre,
        "post" => Tok::Post,
        "skip" => Tok::Skip,
        "call" => Tok::Call,
        "for" => Tok::For,
        "until" => Tok::Until,
        "invariant" => Tok::Invariant,
        "label" => Tok::Label,
        "jump" => Tok::Jump,
        "claim" => Tok::Claim,
        "unpack" => Tok::Unpack,
        "pack" => Tok::Pack,
        "nat" => Tok::NatKw,
        "exists" => Tok::Exists,
        "forall" => Tok::Forall,
        "true" => Tok::True,
        "s" => Tok::Succ,
        _ => return None,
    })
}

pub fn is_keyword(word: &str) -> bool {
    keyword(word).is_some()
}

pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let bytes = src.as_bytes();
    let mut i = 0;
    let mut tokens = Vec::new();
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'-' if bytes.get(i + 1) == Some(&b'-') => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b';' => push(&mut tokens, Tok::Semi, &mut i),
            b',' => push(&mut tokens, Tok::Comma, &mut i),
            b'.' => push(&mut tokens, Tok::Dot, &mut i),
            b'(' => push(&mut tokens, Tok::LParen, &mut i),
            b')' => push(&mut tokens, Tok::RParen, &mut i),
            b'[' => push(&mut tokens, Tok::LBracket, &mut i),
            b']' => push(&mut tokens, Tok::RBracket, &mut i),
            b'{' => push(&mut tokens, Tok::LBrace, &mut i),
            b'}' => push(&mut tokens, Tok::RBrace, &mut i),
            b'/' => push(&mut tokens, Tok::Slash, &mut i),
            b':' => {
                if bytes.get(i + 1) == Some(&b'=') {
                    tokens.push(Token {
                        tok: Tok::Assign,
                        span: Span::new(i, i + 2),
                    });
                    i += 2;
                } else {
                    push(&mut tokens, Tok::Colon, &mut i);
                }
            }
            b'=' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    tokens.push(Token {
                        tok: Tok::Arrow,
                        span: Span::new(i, i + 2),
                    });
                    i += 2;
                } else {
                    push(&mut tokens, Tok::Equal, &mut i);
                }
            }
            b'&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    tokens.push(Token {
                        tok: Tok::AndAnd,
                        span: Span::new(i, i + 2),
                    });
                    i += 2;
                } else {
                    return Err(Diagnostic::error(
                        Span::new(i, i + 1),
                        "syntax",
                        "stray `&`; conjunction is written `&&`",
                    ));
                }
            }
            b'0'..=b'9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let value: u64 = text.parse().map_err(|_| {
                    Diagnostic::error(Span::new(start, i), "syntax", "number literal too large")
                })?;
                tokens.push(Token {
                    tok: Tok::Nat(value),
                    span: Span::new(start, i),
                });
            }
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &src[start..i];
                let tok = keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string()));
                tokens.push(Token {
                    tok,
                    span: Span::new(start, i),
                });
            }
            other => {
                return Err(Diagnostic::error(
                    Span::new(i, i + 1),
                    "syntax",
                    format!("unexpected character `{}`", other as char),
                ));
            }
        }
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(tokens)
}

fn push(tokens: &mut Vec<Token>, tok: Tok, i: &mut usize) {
    tokens.push(Token {
        tok,
        span: Span::new(*i, *i + 1),
    });
    *i += 1;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        lex(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_assignment_and_arrows() {
        assert_eq!(
            toks("x := s(0) = => &&"),
            vec![
                Tok::Ident("x".to_string()),
                Tok::Assign,
                Tok::Succ,
                Tok::LParen,
                Tok::Nat(0),
                Tok::RParen,
                Tok::Equal,
                Tok::Arrow,
                Tok::AndAnd,
                Tok::Eof
            ]
        );
    }

    #[test]
    fn comments_run_to_end_of_line() {
        assert_eq!(
            toks("skip; -- the rest is ignored := =\nskip;"),
            vec![Tok::Skip, Tok::Semi, Tok::Skip, Tok::Semi, Tok::Eof]
        );
    }

    #[test]
    fn s_is_reserved_but_other_names_are_not() {
        assert_eq!(toks("s"), vec![Tok::Succ, Tok::Eof]);
        assert_eq!(
            toks("sum"),
            vec![Tok::Ident("sum".to_string()), Tok::Eof]
        );
    }

    #[test]
    fn rejects_unknown_characters() {
        let err = lex("x @ y").unwrap_err();
        assert_eq!(err.rule, "syntax");
        assert!(err.message.contains('@'));
    }

    #[test]
    fn token_spans_cover_their_text() {
        let tokens = lex("foo :=").unwrap();
        assert_eq!((tokens[0].span.start, tokens[0].span.end), (0, 3));
        assert_eq!((tokens[1].span.start, tokens[1].span.end), (4, 6));
    }
}
