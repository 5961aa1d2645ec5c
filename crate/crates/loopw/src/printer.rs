//! Canonical concrete syntax for every AST layer.
//!
//! The printer and parser are inverses: feeding the output of
//! `print_program` back through the parser yields a structurally equal
//! tree. Nothing downstream depends on the exact whitespace, only on that
//! inverse property and on the output being stable.

use crate::ast::*;

pub fn term_to_string(t: &IndexTerm) -> String {
    let mut s = String::new();
    write_term(&mut s, t);
    s
}

pub fn write_term(out: &mut String, t: &IndexTerm) {
    match t {
        IndexTerm::Var(x) => out.push_str(x),
        IndexTerm::Zero => out.push('0'),
        IndexTerm::Succ(inner) => {
            out.push_str("s(");
            write_term(out, inner);
            out.push(')');
        }
        IndexTerm::App(f, args) => {
            out.push_str(f);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(out, a);
            }
            out.push(')');
        }
    }
}

pub fn formula_to_string(f: &IndexFormula) -> String {
    let mut s = String::new();
    write_formula_prec(&mut s, f, 0);
    s
}

/// Precedence: 0 admits implication and quantifiers, 1 admits conjunction,
/// 2 admits only atoms. Both binary connectives associate to the right.
fn write_formula_prec(out: &mut String, f: &IndexFormula, prec: u8) {
    match f {
        IndexFormula::Truth => out.push_str("true"),
        IndexFormula::Eq(a, b) => {
            write_term(out, a);
            out.push_str(" = ");
            write_term(out, b);
        }
        IndexFormula::Forall(x, body) => {
            let wrap = prec > 0;
            if wrap {
                out.push('(');
            }
            out.push_str("forall ");
            out.push_str(x);
            out.push_str(". ");
            write_formula_prec(out, body, 0);
            if wrap {
                out.push(')');
            }
        }
        IndexFormula::Implies(a, b) => {
            let wrap = prec > 0;
            if wrap {
                out.push('(');
            }
            write_formula_prec(out, a, 1);
            out.push_str(" => ");
            write_formula_prec(out, b, 0);
            if wrap {
                out.push(')');
            }
        }
        IndexFormula::And(a, b) => {
            let wrap = prec > 1;
            if wrap {
                out.push('(');
            }
            write_formula_prec(out, a, 2);
            out.push_str(" && ");
            write_formula_prec(out, b, 1);
            if wrap {
                out.push(')');
            }
        }
    }
}

pub fn ty_to_string(t: &Ty) -> String {
    let mut s = String::new();
    write_ty(&mut s, t);
    s
}

pub fn write_ty(out: &mut String, t: &Ty) {
    match t {
        Ty::Nat(idx) => {
            out.push_str("nat(");
            write_term(out, idx);
            out.push(')');
        }
        Ty::EqTy(a, b) => {
            write_term(out, a);
            out.push_str(" = ");
            write_term(out, b);
        }
        Ty::Exists(binders, comps) => {
            out.push_str("exists");
            write_bracketed_names(out, binders);
            out.push('(');
            for (i, c) in comps.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_ty(out, c);
            }
            out.push(')');
        }
        Ty::Proc(p) => {
            out.push_str("proc");
            write_bracketed_names(out, &p.binders);
            out.push_str("(in");
            for (i, ty) in p.ins.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                write_ty(out, ty);
            }
            out.push_str("; out");
            for (i, ty) in p.outs.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                write_ty(out, ty);
            }
            out.push(')');
            if let Some(f) = &p.pre {
                out.push_str(" pre ");
                write_formula_prec(out, f, 2);
            }
            if let Some(f) = &p.post {
                out.push_str(" post ");
                write_formula_prec(out, f, 2);
            }
        }
    }
}

/// `[a, b]`, omitted entirely when the list is empty.
fn write_bracketed_names(out: &mut String, names: &[Name]) {
    if names.is_empty() {
        return;
    }
    out.push('[');
    for (i, n) in names.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(n);
    }
    out.push(']');
}

fn write_bracketed_terms(out: &mut String, terms: &[IndexTerm]) {
    if terms.is_empty() {
        return;
    }
    out.push('[');
    for (i, t) in terms.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_term(out, t);
    }
    out.push(']');
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e, 0);
    s
}

fn write_expr(out: &mut String, e: &Expr, indent: usize) {
    match &e.kind {
        ExprKind::Var(x) | ExprKind::LabelRef(x) => out.push_str(x),
        ExprKind::Zero => out.push('0'),
        ExprKind::Succ(inner) => {
            out.push_str("s(");
            write_expr(out, inner, indent);
            out.push(')');
        }
        ExprKind::Pack { indices, comps } => {
            out.push_str("pack");
            write_bracketed_terms(out, indices);
            out.push('(');
            for (i, c) in comps.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, c, indent);
            }
            out.push(')');
        }
        ExprKind::ProcLit(lit) => write_proc_lit(out, lit, indent),
    }
}

fn write_params(out: &mut String, params: &[Param], keyword: &str) {
    out.push_str(keyword);
    for (i, p) in params.iter().enumerate() {
        out.push_str(if i == 0 { " " } else { ", " });
        out.push_str(&p.name);
        out.push_str(" : ");
        write_ty(out, &p.ty);
    }
}

fn write_proc_lit(out: &mut String, lit: &ProcLit, indent: usize) {
    out.push_str("proc");
    write_bracketed_names(out, &lit.binders);
    out.push('(');
    write_params(out, &lit.ins, "in");
    out.push_str("; ");
    write_params(out, &lit.outs, "out");
    out.push(')');
    if let Some(f) = &lit.pre {
        out.push_str(" pre ");
        write_formula_prec(out, f, 2);
    }
    if let Some(f) = &lit.post {
        out.push_str(" post ");
        write_formula_prec(out, f, 2);
    }
    out.push(' ');
    write_block(out, &lit.body, indent);
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn write_block(out: &mut String, body: &Seq, indent: usize) {
    if body.is_empty() {
        out.push_str("{ }");
        return;
    }
    out.push_str("{\n");
    for stmt in body {
        pad(out, indent + 1);
        write_stmt(out, stmt, indent + 1);
        out.push('\n');
    }
    pad(out, indent);
    out.push('}');
}

fn write_stmt(out: &mut String, stmt: &Stmt, indent: usize) {
    match &stmt.kind {
        StmtKind::Skip => out.push_str("skip"),
        StmtKind::Assign(x, e) => {
            out.push_str(x);
            out.push_str(" := ");
            write_expr(out, e, indent);
        }
        StmtKind::Call {
            target,
            indices,
            ins,
            outs,
        } => {
            out.push_str("call ");
            write_expr(out, target, indent);
            write_bracketed_terms(out, indices);
            out.push('(');
            for (i, e) in ins.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, e, indent);
            }
            out.push(';');
            for (i, name) in outs.iter().enumerate() {
                out.push_str(if i == 0 { " " } else { ", " });
                out.push_str(name);
            }
            out.push(')');
        }
        StmtKind::For {
            var,
            bound,
            inv_binder,
            footprint,
            body,
        } => {
            out.push_str("for ");
            out.push_str(var);
            out.push_str(" := 0 until ");
            write_expr(out, bound, indent);
            out.push_str(" invariant [");
            out.push_str(inv_binder);
            out.push_str("] (");
            for (i, p) in footprint.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&p.name);
                out.push_str(" : ");
                write_ty(out, &p.ty);
            }
            out.push_str(") ");
            write_block(out, body, indent);
        }
        StmtKind::LabelBlock { label, outs, body } => {
            out.push_str("label ");
            out.push_str(label);
            out.push_str(" out (");
            for (i, p) in outs.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&p.name);
                out.push_str(" : ");
                write_ty(out, &p.ty);
            }
            out.push_str(") ");
            write_block(out, body, indent);
        }
        StmtKind::Jump { target, args } => {
            out.push_str("jump ");
            write_expr(out, target, indent);
            out.push_str(" (");
            for (i, e) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, e, indent);
            }
            out.push(')');
        }
        StmtKind::Claim(f) => {
            out.push_str("claim ");
            write_formula_prec(out, f, 0);
        }
        StmtKind::Unpack {
            index_names,
            value_names,
            rhs,
        } => {
            out.push_str("unpack ");
            out.push('[');
            for (i, n) in index_names.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n);
            }
            out.push_str("] (");
            for (i, n) in value_names.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(n);
            }
            out.push_str(") := ");
            write_expr(out, rhs, indent);
        }
    }
    out.push(';');
}

pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for sig in &p.sigs {
        out.push_str(&format!("sig {}/{};\n", sig.name, sig.arity));
    }
    if !p.sigs.is_empty() {
        out.push('\n');
    }
    for eq in &p.equations {
        out.push_str("eq ");
        write_term(&mut out, &eq.lhs);
        out.push_str(" = ");
        write_term(&mut out, &eq.rhs);
        out.push_str(";\n");
    }
    if !p.equations.is_empty() {
        out.push('\n');
    }
    for (i, proc) in p.procs.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str("proc ");
        out.push_str(&proc.name);
        let mut lit = String::new();
        write_proc_lit(&mut lit, &proc.lit, 0);
        // write_proc_lit emits a leading "proc"; splice the name in after it.
        out.push_str(lit.strip_prefix("proc").unwrap_or(&lit));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diag::Span;

    fn sp() -> Span {
        Span::default()
    }

    #[test]
    fn terms_and_formulas_print_canonically() {
        let t = IndexTerm::app(
            "add",
            vec![IndexTerm::succ(IndexTerm::Zero), IndexTerm::var("m")],
        );
        assert_eq!(term_to_string(&t), "add(s(0), m)");

        let f = IndexFormula::implies(
            IndexFormula::and(
                IndexFormula::Eq(IndexTerm::var("n"), IndexTerm::Zero),
                IndexFormula::Truth,
            ),
            IndexFormula::forall("k", IndexFormula::Eq(IndexTerm::var("k"), IndexTerm::var("k"))),
        );
        assert_eq!(formula_to_string(&f), "n = 0 && true => forall k. k = k");
    }

    #[test]
    fn nested_connectives_get_parentheses() {
        let a = IndexFormula::Eq(IndexTerm::Zero, IndexTerm::Zero);
        // (a => a) && a needs parens on the left operand.
        let f = IndexFormula::and(IndexFormula::implies(a.clone(), a.clone()), a.clone());
        assert_eq!(formula_to_string(&f), "(0 = 0 => 0 = 0) && 0 = 0");
        // And(And(a, a), a) is not the right-associated parse, so parens.
        let g = IndexFormula::and(IndexFormula::and(a.clone(), a.clone()), a);
        assert_eq!(formula_to_string(&g), "(0 = 0 && 0 = 0) && 0 = 0");
    }

    #[test]
    fn proc_types_print_with_binders_and_contracts() {
        let ty = Ty::Proc(crate::ast::ProcTy {
            binders: vec!["i".to_string()],
            ins: vec![Ty::Nat(IndexTerm::var("i"))],
            outs: vec![Ty::Nat(IndexTerm::succ(IndexTerm::var("i")))],
            pre: Some(IndexFormula::Truth),
            post: None,
        });
        assert_eq!(
            ty_to_string(&ty),
            "proc[i](in nat(i); out nat(s(i))) pre true"
        );
    }

    #[test]
    fn statements_print_with_terminators() {
        let stmt = Stmt::new(
            StmtKind::Call {
                target: Expr::new(ExprKind::Var("f".to_string()), sp()),
                indices: vec![],
                ins: vec![],
                outs: vec!["r".to_string()],
            },
            sp(),
        );
        let mut s = String::new();
        write_stmt(&mut s, &stmt, 0);
        assert_eq!(s, "call f(; r);");
    }
}
