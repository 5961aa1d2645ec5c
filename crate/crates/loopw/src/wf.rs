//! Structural well-formedness: name hygiene and signature arities.
//!
//! These checks run before typechecking and catch everything that does not
//! need the mutable environment: duplicate declarations, malformed binder
//! lists, unknown or wrongly-kinded names inside index terms, and function
//! symbols applied at the wrong arity. Index terms may only mention index
//! variables — referring to a value variable or a label from a term is
//! reported here with a kind-aware message rather than a generic
//! "unknown name".

use crate::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::parser::check_term_arities;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Index,
    Value,
    Label,
}

struct Wf<'a> {
    program: &'a Program,
    scope: Vec<(Name, Kind)>,
    diags: Vec<Diagnostic>,
}

pub fn well_formed(program: &Program) -> Vec<Diagnostic> {
    let mut wf = Wf {
        program,
        scope: Vec::new(),
        diags: Vec::new(),
    };

    let mut seen: Vec<(&str, Span)> = Vec::new();
    for sig in &program.sigs {
        if let Some((_, _first)) = seen.iter().find(|(n, _)| *n == sig.name) {
            wf.diags.push(Diagnostic::error(
                sig.span,
                "duplicate",
                format!("`{}` is declared twice", sig.name),
            ));
        }
        seen.push((&sig.name, sig.span));
    }
    for proc in &program.procs {
        if seen.iter().any(|(n, _)| *n == proc.name) {
            wf.diags.push(Diagnostic::error(
                proc.span,
                "duplicate",
                format!("`{}` is already declared in the signature", proc.name),
            ));
        }
    }

    for decl in &program.procs {
        wf.scope.push((decl.name.clone(), Kind::Value));
        // A procedure may refer to the ones declared before it, so the
        // name goes into scope before its own body is visited... but not
        // to itself: the literal is checked with only earlier names.
        let me = wf.scope.pop().unwrap();
        wf.proc_lit(&decl.lit, decl.span);
        wf.scope.push(me);
    }

    wf.diags
}

impl<'a> Wf<'a> {
    fn lookup(&self, name: &str) -> Option<Kind> {
        self.scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|(_, k)| *k)
    }

    fn duplicate_names<'n>(&mut self, names: impl Iterator<Item = &'n Name>, span: Span, what: &str) {
        let mut seen: Vec<&Name> = Vec::new();
        for n in names {
            if seen.contains(&n) {
                self.diags.push(Diagnostic::error(
                    span,
                    "duplicate",
                    format!("{what} `{n}` appears twice"),
                ));
            }
            seen.push(n);
        }
    }

    fn proc_lit(&mut self, lit: &ProcLit, span: Span) {
        let mark = self.scope.len();
        self.duplicate_names(
            lit.binders
                .iter()
                .chain(lit.ins.iter().map(|p| &p.name))
                .chain(lit.outs.iter().map(|p| &p.name)),
            span,
            "binder or parameter",
        );
        for b in &lit.binders {
            self.scope.push((b.clone(), Kind::Index));
        }
        // Parameter names go into scope before their types are walked: a
        // value variable is never legal inside an index term, and seeing
        // the name lets the walker say so instead of "unknown variable".
        for p in lit.ins.iter().chain(lit.outs.iter()) {
            self.scope.push((p.name.clone(), Kind::Value));
        }
        for p in &lit.ins {
            self.ty(&p.ty, p.span);
        }
        for p in &lit.outs {
            self.ty(&p.ty, p.span);
        }
        if let Some(f) = &lit.pre {
            self.formula(f, span);
        }
        if let Some(f) = &lit.post {
            self.formula(f, span);
        }
        self.seq(&lit.body);
        self.scope.truncate(mark);
    }

    fn seq(&mut self, seq: &Seq) {
        let mark = self.scope.len();
        for stmt in seq {
            self.stmt(stmt);
        }
        self.scope.truncate(mark);
    }

    fn stmt(&mut self, stmt: &Stmt) {
        let span = stmt.span;
        match &stmt.kind {
            StmtKind::Skip => {}
            StmtKind::Assign(_, e) => self.expr(e),
            StmtKind::Call {
                target,
                indices,
                ins,
                outs,
            } => {
                self.expr(target);
                for t in indices {
                    self.term(t, span);
                }
                for e in ins {
                    self.expr(e);
                }
                self.duplicate_names(outs.iter(), span, "output variable");
                for o in outs {
                    self.scope.push((o.clone(), Kind::Value));
                }
            }
            StmtKind::For {
                var,
                bound,
                inv_binder,
                footprint,
                body,
            } => {
                self.expr(bound);
                if var == inv_binder {
                    self.diags.push(Diagnostic::error(
                        span,
                        "duplicate",
                        format!("loop variable and invariant binder are both named `{var}`"),
                    ));
                }
                self.duplicate_names(footprint.iter().map(|p| &p.name), span, "footprint variable");
                if let Some(p) = footprint.iter().find(|p| &p.name == var) {
                    self.diags.push(Diagnostic::error(
                        p.span,
                        "duplicate",
                        format!("loop variable `{var}` cannot also be a footprint variable"),
                    ));
                }
                let mark = self.scope.len();
                self.scope.push((inv_binder.clone(), Kind::Index));
                for p in footprint {
                    self.ty(&p.ty, p.span);
                }
                self.scope.push((var.clone(), Kind::Value));
                self.seq(body);
                self.scope.truncate(mark);
            }
            StmtKind::LabelBlock { label, outs, body } => {
                self.duplicate_names(outs.iter().map(|p| &p.name), span, "output variable");
                for p in outs {
                    self.ty(&p.ty, p.span);
                }
                let mark = self.scope.len();
                self.scope.push((label.clone(), Kind::Label));
                self.seq(body);
                self.scope.truncate(mark);
            }
            StmtKind::Jump { target, args } => {
                self.expr(target);
                for e in args {
                    self.expr(e);
                }
            }
            StmtKind::Claim(f) => self.formula(f, span),
            StmtKind::Unpack {
                index_names,
                value_names,
                rhs,
            } => {
                self.expr(rhs);
                self.duplicate_names(index_names.iter().chain(value_names.iter()), span, "name");
                for n in index_names {
                    self.scope.push((n.clone(), Kind::Index));
                }
                for n in value_names {
                    self.scope.push((n.clone(), Kind::Value));
                }
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Var(_) | ExprKind::Zero | ExprKind::LabelRef(_) => {}
            ExprKind::Succ(inner) => self.expr(inner),
            ExprKind::Pack { indices, comps } => {
                for t in indices {
                    self.term(t, e.span);
                }
                for c in comps {
                    self.expr(c);
                }
            }
            ExprKind::ProcLit(lit) => self.proc_lit(lit, e.span),
        }
    }

    fn ty(&mut self, ty: &Ty, span: Span) {
        match ty {
            Ty::Nat(t) => self.term(t, span),
            Ty::EqTy(a, b) => {
                self.term(a, span);
                self.term(b, span);
            }
            Ty::Exists(binders, comps) => {
                self.duplicate_names(binders.iter(), span, "binder");
                let mark = self.scope.len();
                for b in binders {
                    self.scope.push((b.clone(), Kind::Index));
                }
                for c in comps {
                    self.ty(c, span);
                }
                self.scope.truncate(mark);
            }
            Ty::Proc(pt) => {
                self.duplicate_names(pt.binders.iter(), span, "binder");
                let mark = self.scope.len();
                for b in &pt.binders {
                    self.scope.push((b.clone(), Kind::Index));
                }
                for t in pt.ins.iter().chain(pt.outs.iter()) {
                    self.ty(t, span);
                }
                if let Some(f) = &pt.pre {
                    self.formula(f, span);
                }
                if let Some(f) = &pt.post {
                    self.formula(f, span);
                }
                self.scope.truncate(mark);
            }
        }
    }

    fn formula(&mut self, f: &IndexFormula, span: Span) {
        match f {
            IndexFormula::Truth => {}
            IndexFormula::Eq(a, b) => {
                self.term(a, span);
                self.term(b, span);
            }
            IndexFormula::And(a, b) | IndexFormula::Implies(a, b) => {
                self.formula(a, span);
                self.formula(b, span);
            }
            IndexFormula::Forall(x, body) => {
                let mark = self.scope.len();
                self.scope.push((x.clone(), Kind::Index));
                self.formula(body, span);
                self.scope.truncate(mark);
            }
        }
    }

    fn term(&mut self, t: &IndexTerm, span: Span) {
        check_term_arities(t, self.program, span, &mut self.diags);
        self.term_vars(t, span);
    }

    fn term_vars(&mut self, t: &IndexTerm, span: Span) {
        match t {
            IndexTerm::Zero => {}
            IndexTerm::Succ(inner) => self.term_vars(inner, span),
            IndexTerm::App(_, args) => {
                for a in args {
                    self.term_vars(a, span);
                }
            }
            IndexTerm::Var(x) => match self.lookup(x) {
                Some(Kind::Index) => {}
                Some(Kind::Label) => self.diags.push(Diagnostic::error(
                    span,
                    "scope",
                    format!("label `{x}` cannot appear in an index term"),
                )),
                Some(Kind::Value) => self.diags.push(Diagnostic::error(
                    span,
                    "scope",
                    format!("value variable `{x}` cannot appear in an index term"),
                )),
                None => self.diags.push(Diagnostic::error(
                    span,
                    "scope",
                    format!("unknown index variable `{x}`"),
                )),
            },
        }
    }
}
