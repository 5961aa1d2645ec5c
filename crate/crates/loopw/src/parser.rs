//! Recursive-descent parser for the loopw surface syntax.
//!
//! ```text
//! program ::= (sig | eq)* proc+
//! sig     ::= "sig" IDENT "/" NAT ";"
//! eq      ::= "eq" term "=" term ";"
//! proc    ::= "proc" IDENT ["[" idents "]"] "(" "in" params? ";" "out" params? ")"
//!             ("pre" formula)? ("post" formula)? block
//! ```
//!
//! Square-bracket groups may be omitted when empty. Parsing also performs
//! two cheap post-passes: equations are validated against the declared
//! signature (shape, arity, right-hand variables), and bare identifiers
//! whose nearest binder is a label are re-tagged as label references.

use crate::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::lexer::{lex, Tok, Token};

pub fn parse_program(src: &str) -> Result<Program, Vec<Diagnostic>> {
    let tokens = lex(src).map_err(|d| vec![d])?;
    let mut parser = Parser { tokens, pos: 0 };
    let mut program = parser.program().map_err(|d| vec![d])?;
    let eq_errors = validate_equations(&program);
    if !eq_errors.is_empty() {
        return Err(eq_errors);
    }
    resolve_labels(&mut program);
    Ok(program)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek2(&self) -> &Tok {
        &self.tokens[(self.pos + 1).min(self.tokens.len() - 1)].tok
    }

    fn here(&self) -> Span {
        self.tokens[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn at(&self, tok: &Tok) -> bool {
        self.peek() == tok
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.at(tok) {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Token> {
        if self.at(&tok) {
            Ok(self.advance())
        } else {
            Err(Diagnostic::error(
                self.here(),
                "syntax",
                format!("expected {}, found {}", tok, self.peek()),
            ))
        }
    }

    fn ident(&mut self) -> PResult<(Name, Span)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.here();
                self.advance();
                Ok((name, span))
            }
            other => Err(Diagnostic::error(
                self.here(),
                "syntax",
                format!("expected identifier, found {other}"),
            )),
        }
    }

    fn program(&mut self) -> PResult<Program> {
        let mut sigs = Vec::new();
        let mut equations = Vec::new();
        loop {
            if self.at(&Tok::Sig) {
                let start = self.here();
                self.advance();
                let (name, _) = self.ident()?;
                self.expect(Tok::Slash)?;
                let arity = match self.peek().clone() {
                    Tok::Nat(n) => {
                        self.advance();
                        n as usize
                    }
                    other => {
                        return Err(Diagnostic::error(
                            self.here(),
                            "syntax",
                            format!("expected arity, found {other}"),
                        ))
                    }
                };
                self.expect(Tok::Semi)?;
                sigs.push(SigDecl {
                    name,
                    arity,
                    span: start.join(self.prev_span()),
                });
            } else if self.at(&Tok::Eq) {
                let start = self.here();
                self.advance();
                let lhs = self.term()?;
                self.expect(Tok::Equal)?;
                let rhs = self.term()?;
                self.expect(Tok::Semi)?;
                equations.push(Equation {
                    lhs,
                    rhs,
                    span: start.join(self.prev_span()),
                });
            } else {
                break;
            }
        }

        let mut procs: Vec<ProcDecl> = Vec::new();
        while self.at(&Tok::Proc) {
            let start = self.here();
            self.advance();
            let (name, name_span) = self.ident()?;
            if procs.iter().any(|p| p.name == name) {
                return Err(Diagnostic::error(
                    name_span,
                    "duplicate",
                    format!("procedure `{name}` is declared twice"),
                ));
            }
            let lit = self.proc_tail()?;
            procs.push(ProcDecl {
                name,
                lit,
                span: start.join(self.prev_span()),
            });
        }
        if procs.is_empty() {
            return Err(Diagnostic::error(
                self.here(),
                "syntax",
                "a program needs at least one procedure",
            ));
        }
        if !self.at(&Tok::Eof) {
            return Err(Diagnostic::error(
                self.here(),
                "syntax",
                format!("expected `proc` or end of input, found {}", self.peek()),
            ));
        }
        let entry = if procs.iter().any(|p| p.name == "main") {
            "main".to_string()
        } else {
            procs.last().unwrap().name.clone()
        };
        Ok(Program {
            sigs,
            equations,
            procs,
            entry,
        })
    }

    /// Everything in a procedure after the `proc` keyword (and optional
    /// name): binder brackets, parameter lists, contracts, body.
    fn proc_tail(&mut self) -> PResult<ProcLit> {
        let binders = self.opt_bracketed_idents()?;
        self.expect(Tok::LParen)?;
        self.expect(Tok::In)?;
        let ins = self.params(&Tok::Semi)?;
        self.expect(Tok::Semi)?;
        self.expect(Tok::Out)?;
        let outs = self.params(&Tok::RParen)?;
        self.expect(Tok::RParen)?;
        let pre = if self.eat(&Tok::Pre) {
            Some(self.formula()?)
        } else {
            None
        };
        let post = if self.eat(&Tok::Post) {
            Some(self.formula()?)
        } else {
            None
        };
        let body = self.block()?;
        Ok(ProcLit {
            binders,
            ins,
            outs,
            pre,
            post,
            body,
        })
    }

    fn opt_bracketed_idents(&mut self) -> PResult<Vec<Name>> {
        if !self.eat(&Tok::LBracket) {
            return Ok(Vec::new());
        }
        let mut names = Vec::new();
        if !self.at(&Tok::RBracket) {
            loop {
                names.push(self.ident()?.0);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(names)
    }

    fn opt_bracketed_terms(&mut self) -> PResult<Vec<IndexTerm>> {
        if !self.eat(&Tok::LBracket) {
            return Ok(Vec::new());
        }
        let mut terms = Vec::new();
        if !self.at(&Tok::RBracket) {
            loop {
                terms.push(self.term()?);
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
        }
        self.expect(Tok::RBracket)?;
        Ok(terms)
    }

    fn params(&mut self, stop: &Tok) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        if self.at(stop) {
            return Ok(params);
        }
        loop {
            let (name, span) = self.ident()?;
            self.expect(Tok::Colon)?;
            let ty = self.ty()?;
            params.push(Param {
                name,
                ty,
                span: span.join(self.prev_span()),
            });
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(params)
    }

    fn term(&mut self) -> PResult<IndexTerm> {
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.advance();
                Ok(IndexTerm::Zero)
            }
            Tok::Nat(_) => Err(Diagnostic::error(
                self.here(),
                "syntax",
                "numbers other than 0 are written with s(...)",
            )),
            Tok::Succ => {
                self.advance();
                self.expect(Tok::LParen)?;
                let inner = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(IndexTerm::succ(inner))
            }
            Tok::Ident(name) => {
                self.advance();
                if self.eat(&Tok::LParen) {
                    let mut args = Vec::new();
                    if !self.at(&Tok::RParen) {
                        loop {
                            args.push(self.term()?);
                            if !self.eat(&Tok::Comma) {
                                break;
                            }
                        }
                    }
                    self.expect(Tok::RParen)?;
                    Ok(IndexTerm::App(name, args))
                } else {
                    Ok(IndexTerm::Var(name))
                }
            }
            other => Err(Diagnostic::error(
                self.here(),
                "syntax",
                format!("expected index term, found {other}"),
            )),
        }
    }

    fn formula(&mut self) -> PResult<IndexFormula> {
        let lhs = self.conjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(IndexFormula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn conjunction(&mut self) -> PResult<IndexFormula> {
        let lhs = self.formula_atom()?;
        if self.eat(&Tok::AndAnd) {
            let rhs = self.conjunction()?;
            Ok(IndexFormula::and(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn formula_atom(&mut self) -> PResult<IndexFormula> {
        match self.peek().clone() {
            Tok::True => {
                self.advance();
                Ok(IndexFormula::Truth)
            }
            Tok::Forall => {
                self.advance();
                let (x, _) = self.ident()?;
                self.expect(Tok::Dot)?;
                let body = self.formula()?;
                Ok(IndexFormula::Forall(x, Box::new(body)))
            }
            Tok::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => {
                let lhs = self.term()?;
                self.expect(Tok::Equal)?;
                let rhs = self.term()?;
                Ok(IndexFormula::Eq(lhs, rhs))
            }
        }
    }

    fn ty(&mut self) -> PResult<Ty> {
        match self.peek().clone() {
            Tok::NatKw => {
                self.advance();
                self.expect(Tok::LParen)?;
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(Ty::Nat(t))
            }
            Tok::Exists => {
                self.advance();
                let binders = self.opt_bracketed_idents()?;
                self.expect(Tok::LParen)?;
                let mut comps = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        comps.push(self.ty()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(Ty::Exists(binders, comps))
            }
            Tok::Proc => {
                self.advance();
                let binders = self.opt_bracketed_idents()?;
                self.expect(Tok::LParen)?;
                self.expect(Tok::In)?;
                let ins = self.ty_list(&Tok::Semi)?;
                self.expect(Tok::Semi)?;
                self.expect(Tok::Out)?;
                let outs = self.ty_list(&Tok::RParen)?;
                self.expect(Tok::RParen)?;
                let pre = if self.eat(&Tok::Pre) {
                    Some(self.formula_atom()?)
                } else {
                    None
                };
                let post = if self.eat(&Tok::Post) {
                    Some(self.formula_atom()?)
                } else {
                    None
                };
                Ok(Ty::Proc(ProcTy {
                    binders,
                    ins,
                    outs,
                    pre,
                    post,
                }))
            }
            _ => {
                let lhs = self.term()?;
                self.expect(Tok::Equal)?;
                let rhs = self.term()?;
                Ok(Ty::EqTy(lhs, rhs))
            }
        }
    }

    fn ty_list(&mut self, stop: &Tok) -> PResult<Vec<Ty>> {
        let mut tys = Vec::new();
        if self.at(stop) {
            return Ok(tys);
        }
        loop {
            tys.push(self.ty()?);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        Ok(tys)
    }

    fn expr(&mut self) -> PResult<Expr> {
        let start = self.here();
        match self.peek().clone() {
            Tok::Nat(0) => {
                self.advance();
                Ok(Expr::new(ExprKind::Zero, start))
            }
            Tok::Nat(_) => Err(Diagnostic::error(
                self.here(),
                "syntax",
                "numbers other than 0 are written with s(...)",
            )),
            Tok::Succ => {
                self.advance();
                self.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::new(
                    ExprKind::Succ(Box::new(inner)),
                    start.join(self.prev_span()),
                ))
            }
            Tok::Ident(name) => {
                self.advance();
                Ok(Expr::new(ExprKind::Var(name), start))
            }
            Tok::Pack => {
                self.advance();
                let indices = self.opt_bracketed_terms()?;
                self.expect(Tok::LParen)?;
                let mut comps = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        comps.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                Ok(Expr::new(
                    ExprKind::Pack { indices, comps },
                    start.join(self.prev_span()),
                ))
            }
            Tok::Proc => {
                self.advance();
                let lit = self.proc_tail()?;
                Ok(Expr::new(
                    ExprKind::ProcLit(Box::new(lit)),
                    start.join(self.prev_span()),
                ))
            }
            other => Err(Diagnostic::error(
                self.here(),
                "syntax",
                format!("expected expression, found {other}"),
            )),
        }
    }

    fn block(&mut self) -> PResult<Seq> {
        self.expect(Tok::LBrace)?;
        let mut stmts = Vec::new();
        while !self.at(&Tok::RBrace) {
            let stmt = self.stmt()?;
            self.expect(Tok::Semi)?;
            stmts.push(stmt);
        }
        self.expect(Tok::RBrace)?;
        Ok(stmts)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.here();
        let kind = match self.peek().clone() {
            Tok::Skip => {
                self.advance();
                StmtKind::Skip
            }
            Tok::Ident(name) => {
                if self.peek2() != &Tok::Assign {
                    return Err(Diagnostic::error(
                        self.here(),
                        "syntax",
                        format!("expected `:=` after `{name}` to form an assignment"),
                    ));
                }
                self.advance();
                self.advance();
                let rhs = self.expr()?;
                StmtKind::Assign(name, rhs)
            }
            Tok::Call => {
                self.advance();
                let target = self.expr()?;
                let indices = self.opt_bracketed_terms()?;
                self.expect(Tok::LParen)?;
                let mut ins = Vec::new();
                if !self.at(&Tok::Semi) {
                    loop {
                        ins.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::Semi)?;
                let mut outs = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        outs.push(self.ident()?.0);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                StmtKind::Call {
                    target,
                    indices,
                    ins,
                    outs,
                }
            }
            Tok::For => {
                self.advance();
                let (var, _) = self.ident()?;
                self.expect(Tok::Assign)?;
                match self.peek() {
                    Tok::Nat(0) => {
                        self.advance();
                    }
                    other => {
                        return Err(Diagnostic::error(
                            self.here(),
                            "syntax",
                            format!("for-loops always start at `0`, found {other}"),
                        ))
                    }
                }
                self.expect(Tok::Until)?;
                let bound = self.expr()?;
                self.expect(Tok::Invariant)?;
                self.expect(Tok::LBracket)?;
                let (inv_binder, _) = self.ident()?;
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                let footprint = self.params(&Tok::RParen)?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::For {
                    var,
                    bound,
                    inv_binder,
                    footprint,
                    body,
                }
            }
            Tok::Label => {
                self.advance();
                let (label, _) = self.ident()?;
                self.expect(Tok::Out)?;
                self.expect(Tok::LParen)?;
                let outs = self.params(&Tok::RParen)?;
                self.expect(Tok::RParen)?;
                let body = self.block()?;
                StmtKind::LabelBlock { label, outs, body }
            }
            Tok::Jump => {
                self.advance();
                let target = self.expr()?;
                self.expect(Tok::LParen)?;
                let mut args = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        args.push(self.expr()?);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                StmtKind::Jump { target, args }
            }
            Tok::Claim => {
                self.advance();
                let f = self.formula()?;
                StmtKind::Claim(f)
            }
            Tok::Unpack => {
                self.advance();
                self.expect(Tok::LBracket)?;
                let mut index_names = Vec::new();
                if !self.at(&Tok::RBracket) {
                    loop {
                        index_names.push(self.ident()?.0);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket)?;
                self.expect(Tok::LParen)?;
                let mut value_names = Vec::new();
                if !self.at(&Tok::RParen) {
                    loop {
                        value_names.push(self.ident()?.0);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen)?;
                self.expect(Tok::Assign)?;
                let rhs = self.expr()?;
                StmtKind::Unpack {
                    index_names,
                    value_names,
                    rhs,
                }
            }
            other => {
                return Err(Diagnostic::error(
                    self.here(),
                    "syntax",
                    format!("expected statement, found {other}"),
                ))
            }
        };
        Ok(Stmt::new(kind, start.join(self.prev_span())))
    }
}

/// Equations must define declared symbols at their declared arity, with
/// constructor patterns (variables, `0`, `s(...)`) on the left and no new
/// variables on the right.
fn validate_equations(p: &Program) -> Vec<Diagnostic> {
    use std::collections::BTreeSet;
    let mut diags = Vec::new();
    for eq in &p.equations {
        let (fname, args) = match &eq.lhs {
            IndexTerm::App(f, args) => (f, args),
            _ => {
                diags.push(Diagnostic::error(
                    eq.span,
                    "equation",
                    "equation left-hand side must apply a declared function symbol",
                ));
                continue;
            }
        };
        match p.sigs.iter().find(|s| &s.name == fname) {
            None => {
                diags.push(Diagnostic::error(
                    eq.span,
                    "sig-arity",
                    format!("function symbol `{fname}` is not declared in the signature"),
                ));
                continue;
            }
            Some(sig) if sig.arity != args.len() => {
                diags.push(Diagnostic::error(
                    eq.span,
                    "sig-arity",
                    format!(
                        "`{fname}` is declared with arity {} but applied to {} arguments",
                        sig.arity,
                        args.len()
                    ),
                ));
                continue;
            }
            Some(_) => {}
        }
        let mut lhs_vars = BTreeSet::new();
        let mut pattern_ok = true;
        for a in args {
            if !collect_pattern_vars(a, &mut lhs_vars) {
                pattern_ok = false;
            }
        }
        if !pattern_ok {
            diags.push(Diagnostic::error(
                eq.span,
                "equation",
                "equation arguments must be constructor patterns over variables, `0` and `s(...)`",
            ));
            continue;
        }
        let mut rhs_vars = BTreeSet::new();
        eq.rhs.free_vars(&mut rhs_vars);
        for v in rhs_vars.difference(&lhs_vars) {
            diags.push(Diagnostic::error(
                eq.span,
                "unbound",
                format!("right-hand side variable `{v}` does not occur in the pattern"),
            ));
        }
        // The right-hand side may only use declared symbols at the right
        // arity; check it the same way types are checked later.
        check_term_arities(&eq.rhs, p, eq.span, &mut diags);
    }
    diags
}

fn collect_pattern_vars(t: &IndexTerm, vars: &mut std::collections::BTreeSet<Name>) -> bool {
    match t {
        IndexTerm::Var(x) => {
            vars.insert(x.clone());
            true
        }
        IndexTerm::Zero => true,
        IndexTerm::Succ(inner) => collect_pattern_vars(inner, vars),
        IndexTerm::App(..) => false,
    }
}

pub(crate) fn check_term_arities(
    t: &IndexTerm,
    p: &Program,
    span: Span,
    diags: &mut Vec<Diagnostic>,
) {
    match t {
        IndexTerm::Var(_) | IndexTerm::Zero => {}
        IndexTerm::Succ(inner) => check_term_arities(inner, p, span, diags),
        IndexTerm::App(f, args) => {
            match p.sigs.iter().find(|s| &s.name == f) {
                None => diags.push(Diagnostic::error(
                    span,
                    "sig-arity",
                    format!("function symbol `{f}` is not declared in the signature"),
                )),
                Some(sig) if sig.arity != args.len() => diags.push(Diagnostic::error(
                    span,
                    "sig-arity",
                    format!(
                        "`{f}` is declared with arity {} but applied to {} arguments",
                        sig.arity,
                        args.len()
                    ),
                )),
                Some(_) => {}
            }
            for a in args {
                check_term_arities(a, p, span, diags);
            }
        }
    }
}

/// Re-tags `Var(x)` as `LabelRef(x)` wherever the nearest binder of `x` is
/// a label. Runs right after parsing so every later stage can tell labels
/// and values apart syntactically.
fn resolve_labels(p: &mut Program) {
    let mut scope: Vec<(Name, bool)> = p.procs.iter().map(|d| (d.name.clone(), false)).collect();
    for decl in &mut p.procs {
        resolve_lit(&mut decl.lit, &mut scope);
    }
}

fn resolve_lit(lit: &mut ProcLit, scope: &mut Vec<(Name, bool)>) {
    let mark = scope.len();
    for b in &lit.binders {
        scope.push((b.clone(), false));
    }
    for param in lit.ins.iter().chain(lit.outs.iter()) {
        scope.push((param.name.clone(), false));
    }
    resolve_seq(&mut lit.body, scope);
    scope.truncate(mark);
}

fn resolve_seq(seq: &mut Seq, scope: &mut Vec<(Name, bool)>) {
    let mark = scope.len();
    for stmt in seq.iter_mut() {
        match &mut stmt.kind {
            StmtKind::Skip | StmtKind::Claim(_) => {}
            StmtKind::Assign(_, e) => resolve_expr(e, scope),
            StmtKind::Call {
                target, ins, outs, ..
            } => {
                resolve_expr(target, scope);
                for e in ins {
                    resolve_expr(e, scope);
                }
                for o in outs.iter() {
                    scope.push((o.clone(), false));
                }
            }
            StmtKind::For {
                var, bound, body, ..
            } => {
                resolve_expr(bound, scope);
                let inner = scope.len();
                scope.push((var.clone(), false));
                resolve_seq(body, scope);
                scope.truncate(inner);
            }
            StmtKind::LabelBlock { label, body, .. } => {
                let inner = scope.len();
                scope.push((label.clone(), true));
                resolve_seq(body, scope);
                scope.truncate(inner);
            }
            StmtKind::Jump { target, args } => {
                resolve_expr(target, scope);
                for e in args {
                    resolve_expr(e, scope);
                }
            }
            StmtKind::Unpack {
                index_names,
                value_names,
                rhs,
            } => {
                resolve_expr(rhs, scope);
                for n in index_names.iter().chain(value_names.iter()) {
                    scope.push((n.clone(), false));
                }
            }
        }
    }
    scope.truncate(mark);
}

fn resolve_expr(e: &mut Expr, scope: &mut Vec<(Name, bool)>) {
    match &mut e.kind {
        ExprKind::Var(x) => {
            if let Some((_, is_label)) = scope.iter().rev().find(|(n, _)| n == x) {
                if *is_label {
                    e.kind = ExprKind::LabelRef(x.clone());
                }
            }
        }
        ExprKind::Zero | ExprKind::LabelRef(_) => {}
        ExprKind::Succ(inner) => resolve_expr(inner, scope),
        ExprKind::Pack { comps, .. } => {
            for c in comps {
                resolve_expr(c, scope);
            }
        }
        ExprKind::ProcLit(lit) => resolve_lit(lit, scope),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::printer::print_program;

    fn parse_ok(src: &str) -> Program {
        match parse_program(src) {
            Ok(p) => p,
            Err(ds) => panic!("parse failed: {ds:?}"),
        }
    }

    #[test]
    fn minimal_program() {
        let p = parse_ok("proc main(in; out){ skip; }");
        assert_eq!(p.procs.len(), 1);
        assert_eq!(p.entry, "main");
        let lit = &p.procs[0].lit;
        assert!(lit.binders.is_empty());
        assert!(lit.ins.is_empty());
        assert!(lit.outs.is_empty());
        assert_eq!(lit.body.len(), 1);
        assert_eq!(lit.body[0].kind, StmtKind::Skip);
    }

    /// The doubling program, spelled out as a tree. This is the frozen
    /// reference shape for the parser: if parsing drifts, this test names
    /// the exact node that moved.
    #[test]
    fn doubling_program_parses_to_reference_tree() {
        let src = "\
sig add/2;
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));
eq add(n, s(m)) = s(add(n, m));

proc double[n](in a : nat(n); out b : nat(add(n, n))) {
  b := 0;
  for y := 0 until a invariant [i] (b : nat(add(i, i))) {
    b := s(s(b));
  };
}
";
        let p = parse_ok(src);
        assert_eq!(p.sigs.len(), 1);
        assert_eq!(p.sigs[0].name, "add");
        assert_eq!(p.sigs[0].arity, 2);
        assert_eq!(p.equations.len(), 3);
        assert_eq!(
            p.equations[1].lhs,
            IndexTerm::app(
                "add",
                vec![IndexTerm::succ(IndexTerm::var("n")), IndexTerm::var("m")]
            )
        );
        assert_eq!(p.entry, "double");

        let d = &p.procs[0];
        assert_eq!(d.name, "double");
        assert_eq!(d.lit.binders, vec!["n".to_string()]);
        assert_eq!(d.lit.ins.len(), 1);
        assert_eq!(d.lit.ins[0].name, "a");
        assert_eq!(d.lit.ins[0].ty, Ty::Nat(IndexTerm::var("n")));
        assert_eq!(d.lit.outs.len(), 1);
        assert_eq!(
            d.lit.outs[0].ty,
            Ty::Nat(IndexTerm::app(
                "add",
                vec![IndexTerm::var("n"), IndexTerm::var("n")]
            ))
        );

        assert_eq!(d.lit.body.len(), 2);
        match &d.lit.body[0].kind {
            StmtKind::Assign(x, e) => {
                assert_eq!(x, "b");
                assert_eq!(e.kind, ExprKind::Zero);
            }
            other => panic!("expected assignment, got {other:?}"),
        }
        match &d.lit.body[1].kind {
            StmtKind::For {
                var,
                bound,
                inv_binder,
                footprint,
                body,
            } => {
                assert_eq!(var, "y");
                assert_eq!(bound.kind, ExprKind::Var("a".to_string()));
                assert_eq!(inv_binder, "i");
                assert_eq!(footprint.len(), 1);
                assert_eq!(footprint[0].name, "b");
                assert_eq!(
                    footprint[0].ty,
                    Ty::Nat(IndexTerm::app(
                        "add",
                        vec![IndexTerm::var("i"), IndexTerm::var("i")]
                    ))
                );
                assert_eq!(body.len(), 1);
                match &body[0].kind {
                    StmtKind::Assign(x, e) => {
                        assert_eq!(x, "b");
                        match &e.kind {
                            ExprKind::Succ(inner) => match &inner.kind {
                                ExprKind::Succ(inner2) => {
                                    assert_eq!(inner2.kind, ExprKind::Var("b".to_string()))
                                }
                                other => panic!("expected s(s(b)), got {other:?}"),
                            },
                            other => panic!("expected s(s(b)), got {other:?}"),
                        }
                    }
                    other => panic!("expected assignment, got {other:?}"),
                }
            }
            other => panic!("expected for-loop, got {other:?}"),
        }
    }

    #[test]
    fn for_loop_statement_shape() {
        let p = parse_ok(
            "proc main(in x : nat(0); out a : nat(0)) { a := 0; for y := 0 until x invariant [i] (a : nat(i)) { skip; }; }",
        );
        match &p.procs[0].lit.body[1].kind {
            StmtKind::For {
                footprint,
                inv_binder,
                ..
            } => {
                assert_eq!(inv_binder, "i");
                assert_eq!(footprint[0].ty, Ty::Nat(IndexTerm::var("i")));
            }
            other => panic!("expected for, got {other:?}"),
        }
    }

    #[test]
    fn undeclared_equation_symbol_is_an_arity_error() {
        let errs = parse_program("eq add(0, m) = m;\nproc main(in; out){ skip; }").unwrap_err();
        assert!(errs.iter().any(|d| d.rule == "sig-arity"), "{errs:?}");
    }

    #[test]
    fn equation_arity_mismatch_is_reported() {
        let errs =
            parse_program("sig add/2;\neq add(0) = 0;\nproc main(in; out){ skip; }").unwrap_err();
        assert!(errs.iter().any(|d| d.rule == "sig-arity"), "{errs:?}");
    }

    #[test]
    fn rhs_variable_must_occur_in_pattern() {
        let errs = parse_program("sig f/1;\neq f(0) = k;\nproc main(in; out){ skip; }").unwrap_err();
        assert!(errs.iter().any(|d| d.rule == "unbound"), "{errs:?}");
    }

    #[test]
    fn defined_symbols_are_not_patterns() {
        let errs = parse_program(
            "sig f/1;\nsig g/1;\neq f(g(n)) = 0;\nproc main(in; out){ skip; }",
        )
        .unwrap_err();
        assert!(errs.iter().any(|d| d.rule == "equation"), "{errs:?}");
    }

    #[test]
    fn jump_is_not_an_expression() {
        let errs = parse_program(
            "proc main(in; out r : nat(0)) { r := pack[0](jump k (0)); }",
        )
        .unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].rule, "syntax");
        assert!(errs[0].message.contains("jump"), "{}", errs[0].message);
    }

    #[test]
    fn label_references_are_resolved() {
        let p = parse_ok(
            "proc main(in; out r : nat(0)) { label k out (r : nat(0)) { jump k (0); }; }",
        );
        match &p.procs[0].lit.body[0].kind {
            StmtKind::LabelBlock { body, .. } => match &body[0].kind {
                StmtKind::Jump { target, .. } => {
                    assert_eq!(target.kind, ExprKind::LabelRef("k".to_string()));
                }
                other => panic!("expected jump, got {other:?}"),
            },
            other => panic!("expected label block, got {other:?}"),
        }
    }

    #[test]
    fn inner_binders_shadow_labels() {
        // The for-loop variable k shadows the label k, so the loop body's
        // k is a plain variable reference.
        let p = parse_ok(
            "proc main(in a : nat(0); out r : nat(0)) { label k out (r : nat(0)) { \
             for k := 0 until a invariant [i] (r : nat(0)) { r := k; }; r := 0; }; }",
        );
        match &p.procs[0].lit.body[0].kind {
            StmtKind::LabelBlock { body, .. } => match &body[0].kind {
                StmtKind::For { body, .. } => match &body[0].kind {
                    StmtKind::Assign(_, e) => {
                        assert_eq!(e.kind, ExprKind::Var("k".to_string()));
                    }
                    other => panic!("expected assign, got {other:?}"),
                },
                other => panic!("expected for, got {other:?}"),
            },
            other => panic!("expected label block, got {other:?}"),
        }
    }

    #[test]
    fn entry_prefers_main_and_falls_back_to_last() {
        let p = parse_ok("proc a(in; out){ skip; }\nproc b(in; out){ skip; }");
        assert_eq!(p.entry, "b");
        let p = parse_ok("proc main(in; out){ skip; }\nproc b(in; out){ skip; }");
        assert_eq!(p.entry, "main");
    }

    #[test]
    fn print_then_parse_is_identity_on_a_rich_program() {
        let src = "\
sig add/2;
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));

proc helper[n](in x : nat(n); out p : exists[i, j](nat(i), nat(j))) pre n = n post true {
  p := pack[n, s(n)](x, s(x));
}

proc main[n](in a : nat(n); out r : nat(s(n))) {
  call helper[n](a; q);
  unpack [u, v] (x1, x2) := q;
  label k out (r : nat(s(n))) {
    jump k (s(a));
    r := 0;
  };
  for y := 0 until a invariant [i] (r : nat(s(n))) { skip; };
  claim forall w. add(w, 0) = add(w, 0) => true;
}
";
        let p1 = parse_ok(src);
        let printed = print_program(&p1);
        let p2 = parse_ok(&printed);
        assert_eq!(p1, p2, "printed form:\n{printed}");
    }
}
