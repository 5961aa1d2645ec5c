//! Translation into a pure functional core calculus.
//!
//! The target is a tiny lambda calculus with numerals, tuples,
//! projections and a bounded iterator (`NatIter n b s` applies `s` to
//! `b` exactly `n` times). Index information is erased: packages become
//! plain tuples and claims disappear.
//!
//! Procedures become curried functions
//! `λ ins-tuple. λ state-tuple. λ return-continuation. …`: the mutable
//! environment is threaded as a tuple whose layout (one slot per live
//! mutable variable) is tracked during compilation, and control is in
//! continuation-passing style so that non-local jumps translate to
//! ordinary applications:
//!
//! * a `label` block binds a one-argument function for the label; a
//!   `jump` applies it to the tuple of payload values, abandoning the
//!   rest of the block (and any procedure frames in between, since the
//!   abandoned continuations are simply never applied);
//! * a `for` loop builds a continuation transformer with `NatIter`:
//!   the iterated value maps a pair (counter, state) to the final
//!   answer, so the body keeps the ability to escape through a label —
//!   it just never invokes the transformer for the remaining
//!   iterations.
//!
//! Recursive index functions compile to `NatIter` over pairs
//! (counter, accumulator) — the standard primitive-recursion encoding —
//! which is possible exactly when their equations follow structural
//! recursion on one argument: one equation for 0, one for s(_), and
//! recursive calls only on the predecessor with all other arguments
//! unchanged. Equation sets outside that shape are reported rather than
//! guessed at. Additional equations beyond the two structural ones are
//! not needed for evaluation and are ignored here (the checker still
//! uses them for rewriting).

use crate::ast::*;
use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CoreTerm {
    Var(Name),
    Lam(Name, Box<CoreTerm>),
    App(Box<CoreTerm>, Box<CoreTerm>),
    Zero,
    Succ(Box<CoreTerm>),
    /// `NatIter(n, b, s)` is `s` applied `n` times to `b`.
    NatIter(Box<CoreTerm>, Box<CoreTerm>, Box<CoreTerm>),
    Tuple(Vec<CoreTerm>),
    Proj(usize, Box<CoreTerm>),
    /// A package value; evaluates exactly like a tuple (the index
    /// components of the source package are erased).
    Pack(Vec<CoreTerm>),
}

impl CoreTerm {
    pub fn numeral(n: u64) -> CoreTerm {
        let mut t = CoreTerm::Zero;
        for _ in 0..n {
            t = CoreTerm::Succ(Box::new(t));
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoreProgram {
    /// Named definitions in dependency order: the recursive index
    /// functions first (declaration order), then the procedures.
    pub defs: Vec<(Name, CoreTerm)>,
    pub entry: Name,
    pub in_arity: usize,
    pub out_arity: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TranslateError {
    /// The named function's equations are not structural recursion on a
    /// single argument, so no iterator encoding exists for it.
    UntranslatableEquation(Name),
}

impl fmt::Display for TranslateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TranslateError::UntranslatableEquation(name) => write!(
                f,
                "the equations for `{name}` are not structural recursion on one argument and cannot be compiled"
            ),
        }
    }
}

impl std::error::Error for TranslateError {}

/// Compiles a checked program. The input must have passed the type
/// checker; translation of ill-typed programs may panic.
pub fn translate(p: &Program) -> Result<CoreProgram, TranslateError> {
    let mut tr = Translator::new();
    let mut defs = Vec::new();
    for sig in &p.sigs {
        let eqs: Vec<&Equation> = p
            .equations
            .iter()
            .filter(|e| matches!(&e.lhs, IndexTerm::App(f, _) if *f == sig.name))
            .collect();
        if eqs.is_empty() {
            continue;
        }
        let def = tr.function(&sig.name, sig.arity, &eqs)?;
        tr.defined_funs.push(sig.name.clone());
        defs.push((sig.name.clone(), def));
    }
    for decl in &p.procs {
        let def = tr.proc_lit(&decl.lit);
        defs.push((decl.name.clone(), def));
        tr.env
            .push((decl.name.clone(), Ref::Lexical(decl.name.clone())));
    }
    let lit = &p.entry_proc().lit;
    Ok(CoreProgram {
        defs,
        entry: p.entry.clone(),
        in_arity: lit.ins.len(),
        out_arity: lit.outs.len(),
    })
}

/// The closed term that runs `core`'s entry point on the given numeral
/// inputs with the identity return continuation; it evaluates to the
/// tuple of outputs.
pub fn entry_term(core: &CoreProgram, inputs: &[u64]) -> CoreTerm {
    let ins = CoreTerm::Tuple(inputs.iter().map(|&n| CoreTerm::numeral(n)).collect());
    let state = CoreTerm::Tuple(vec![CoreTerm::Zero; core.out_arity]);
    let ret = lam("$r", var("$r"));
    app(app(app(var(&core.entry), ins), state), ret)
}

#[derive(Debug, Clone)]
enum Ref {
    /// The variable lives in the threaded state tuple.
    State,
    /// The variable is an ordinary lambda binding with this core name.
    Lexical(Name),
}

/// What to do when control falls off the end of a statement sequence.
enum Finish {
    /// End of a procedure body: apply the return continuation to the
    /// tuple of output values.
    Return { k: Name, outs: Vec<Name> },
    /// End of a label block: resume the code after the block with the
    /// state trimmed back to the block's outer layout.
    Resume { rest: Name, outer_len: usize },
    /// End of a loop body: hand (counter + 1, trimmed state) to the
    /// transformer for the remaining iterations.
    Iterate {
        rec: Name,
        counter: Name,
        outer_len: usize,
    },
}

struct Translator {
    fresh: u64,
    env: Vec<(Name, Ref)>,
    layout: Vec<Name>,
    defined_funs: Vec<Name>,
}

impl Translator {
    fn new() -> Self {
        Translator {
            fresh: 0,
            env: Vec::new(),
            layout: Vec::new(),
            defined_funs: Vec::new(),
        }
    }

    /// Gensym; `$` cannot begin a source identifier, so these never
    /// collide with preserved source names.
    fn gen(&mut self, base: &str) -> Name {
        let n = self.fresh;
        self.fresh += 1;
        format!("${base}{n}")
    }

    // ------------------------------------------------------------------
    // Recursive index functions.

    fn function(
        &mut self,
        name: &str,
        arity: usize,
        eqs: &[&Equation],
    ) -> Result<CoreTerm, TranslateError> {
        let err = || TranslateError::UntranslatableEquation(name.to_string());
        let args_of = |e: &Equation| match &e.lhs {
            IndexTerm::App(_, args) => args.clone(),
            _ => Vec::new(),
        };
        // A usable equation has plain distinct variables in every
        // argument position except `p`.
        let plain_elsewhere = |args: &[IndexTerm], p: usize| {
            let mut seen = Vec::new();
            for (j, a) in args.iter().enumerate() {
                if j == p {
                    continue;
                }
                match a {
                    IndexTerm::Var(v) if !seen.contains(v) => seen.push(v.clone()),
                    _ => return None,
                }
            }
            Some(seen)
        };
        let mut chosen = None;
        for p in 0..arity {
            let zero: Vec<&&Equation> = eqs
                .iter()
                .filter(|e| {
                    let args = args_of(e);
                    matches!(args.get(p), Some(IndexTerm::Zero))
                        && plain_elsewhere(&args, p).is_some()
                })
                .collect();
            let succ_rules: Vec<&&Equation> = eqs
                .iter()
                .filter(|e| {
                    let args = args_of(e);
                    match args.get(p) {
                        Some(IndexTerm::Succ(inner)) => match inner.as_ref() {
                            IndexTerm::Var(v) => plain_elsewhere(&args, p)
                                .map(|others| !others.contains(v))
                                .unwrap_or(false),
                            _ => false,
                        },
                        _ => false,
                    }
                })
                .collect();
            if zero.len() == 1 && succ_rules.len() == 1 {
                chosen = Some((p, *zero[0], *succ_rules[0]));
                break;
            }
        }
        let Some((p, zrule, srule)) = chosen else {
            return Err(err());
        };

        let binders: Vec<Name> = (0..arity).map(|j| format!("$a{j}")).collect();
        let q = "$q".to_string();

        // Base: the rhs of the zero equation with its variables mapped to
        // the canonical binders by position.
        let zargs = args_of(zrule);
        let mut base_map: Vec<(Name, CoreTerm)> = Vec::new();
        for (j, a) in zargs.iter().enumerate() {
            if j == p {
                continue;
            }
            if let IndexTerm::Var(v) = a {
                base_map.push((v.clone(), var(&binders[j])));
            }
        }
        let base = self.index_term(&zrule.rhs, name, &base_map, None)?;

        // Step: the rhs of the successor equation; the predecessor
        // variable becomes the counter component and the structural
        // recursive call becomes the accumulator component.
        let sargs = args_of(srule);
        let posvar = match sargs.get(p) {
            Some(IndexTerm::Succ(inner)) => match inner.as_ref() {
                IndexTerm::Var(v) => v.clone(),
                _ => return Err(err()),
            },
            _ => return Err(err()),
        };
        let mut step_map: Vec<(Name, CoreTerm)> = vec![(posvar.clone(), proj(0, var(&q)))];
        let mut rec_args: Vec<Option<Name>> = vec![None; arity];
        for (j, a) in sargs.iter().enumerate() {
            if j == p {
                rec_args[j] = Some(posvar.clone());
                continue;
            }
            if let IndexTerm::Var(v) = a {
                step_map.push((v.clone(), var(&binders[j])));
                rec_args[j] = Some(v.clone());
            }
        }
        let rec_shape: Vec<Name> = rec_args.into_iter().map(|a| a.unwrap()).collect();
        let step_body = self.index_term(
            &srule.rhs,
            name,
            &step_map,
            Some((&rec_shape, &q)),
        )?;

        let iter = CoreTerm::NatIter(
            Box::new(var(&binders[p])),
            Box::new(CoreTerm::Tuple(vec![CoreTerm::Zero, base])),
            Box::new(lam(
                &q,
                CoreTerm::Tuple(vec![succ(proj(0, var(&q))), step_body]),
            )),
        );
        let mut def = proj(1, iter);
        for b in binders.iter().rev() {
            def = lam(b, def);
        }
        Ok(def)
    }

    /// Compiles an equation right-hand side. `rec` carries, for the
    /// successor equation, the exact argument spine a structural
    /// recursive call must have together with the pair variable whose
    /// second component holds the recursive result.
    fn index_term(
        &self,
        t: &IndexTerm,
        fname: &str,
        map: &[(Name, CoreTerm)],
        rec: Option<(&[Name], &Name)>,
    ) -> Result<CoreTerm, TranslateError> {
        let err = || TranslateError::UntranslatableEquation(fname.to_string());
        Ok(match t {
            IndexTerm::Zero => CoreTerm::Zero,
            IndexTerm::Succ(inner) => succ(self.index_term(inner, fname, map, rec)?),
            IndexTerm::Var(x) => map
                .iter()
                .find(|(n, _)| n == x)
                .map(|(_, t)| t.clone())
                .ok_or_else(err)?,
            IndexTerm::App(g, args) => {
                if g == fname {
                    let Some((shape, q)) = rec else {
                        return Err(err());
                    };
                    if args.len() != shape.len() {
                        return Err(err());
                    }
                    for (a, want) in args.iter().zip(shape) {
                        match a {
                            IndexTerm::Var(v) if v == want => {}
                            _ => return Err(err()),
                        }
                    }
                    proj(1, var(q))
                } else {
                    if !self.defined_funs.contains(g) {
                        return Err(err());
                    }
                    let mut t = var(g);
                    for a in args {
                        t = app(t, self.index_term(a, fname, map, rec)?);
                    }
                    t
                }
            }
        })
    }

    // ------------------------------------------------------------------
    // Procedures.

    fn proc_lit(&mut self, lit: &ProcLit) -> CoreTerm {
        let env_mark = self.env.len();
        let saved_layout = std::mem::take(&mut self.layout);
        let in_v = self.gen("in");
        let st_v = self.gen("st");
        let k_v = self.gen("k");
        for p in &lit.ins {
            self.env.push((p.name.clone(), Ref::Lexical(p.name.clone())));
        }
        for p in &lit.outs {
            self.env.push((p.name.clone(), Ref::State));
            self.layout.push(p.name.clone());
        }
        let finish = Finish::Return {
            k: k_v.clone(),
            outs: lit.outs.iter().map(|p| p.name.clone()).collect(),
        };
        let mut body = self.seq(&lit.body, &st_v, &finish);
        for (j, p) in lit.ins.iter().enumerate().rev() {
            body = app(lam(&p.name, body), proj(j, var(&in_v)));
        }
        self.layout = saved_layout;
        self.env.truncate(env_mark);
        lam(&in_v, lam(&st_v, lam(&k_v, body)))
    }

    fn pos(&self, x: &str) -> usize {
        self.layout
            .iter()
            .position(|n| n == x)
            .expect("state variable of a checked program")
    }

    /// Where a write to `x` lands: an existing state slot, or a fresh
    /// one appended to the layout.
    fn write_slot(&mut self, x: &str) -> Option<usize> {
        match self.env.iter().rev().find(|(n, _)| n == x) {
            Some((_, Ref::State)) => Some(self.pos(x)),
            Some((_, Ref::Lexical(_))) => {
                unreachable!("write to immutable in a checked program")
            }
            None => None,
        }
    }

    fn finish_term(&self, f: &Finish, st: &str) -> CoreTerm {
        match f {
            Finish::Return { k, outs } => {
                let comps = outs.iter().map(|o| proj(self.pos(o), var(st))).collect();
                app(var(k), CoreTerm::Tuple(comps))
            }
            Finish::Resume { rest, outer_len } => app(var(rest), self.trim(st, *outer_len)),
            Finish::Iterate {
                rec,
                counter,
                outer_len,
            } => app(
                var(rec),
                CoreTerm::Tuple(vec![succ(var(counter)), self.trim(st, *outer_len)]),
            ),
        }
    }

    fn trim(&self, st: &str, len: usize) -> CoreTerm {
        CoreTerm::Tuple((0..len).map(|i| proj(i, var(st))).collect())
    }

    fn seq(&mut self, stmts: &[Stmt], st: &str, finish: &Finish) -> CoreTerm {
        let Some((first, rest)) = stmts.split_first() else {
            return self.finish_term(finish, st);
        };
        match &first.kind {
            StmtKind::Skip | StmtKind::Claim(_) => self.seq(rest, st, finish),
            StmtKind::Assign(x, e) => {
                let e2 = self.expr(e, st);
                let slot = self.pos(x);
                let comps: Vec<CoreTerm> = (0..self.layout.len())
                    .map(|i| if i == slot { e2.clone() } else { proj(i, var(st)) })
                    .collect();
                self.rebind(CoreTerm::Tuple(comps), rest, finish)
            }
            StmtKind::Call {
                target, ins, outs, ..
            } => {
                let t2 = self.expr(target, st);
                let ins2 = CoreTerm::Tuple(ins.iter().map(|e| self.expr(e, st)).collect());
                let zeros = CoreTerm::Tuple(vec![CoreTerm::Zero; outs.len()]);
                let r = self.gen("r");
                let mut comps: Vec<CoreTerm> =
                    (0..self.layout.len()).map(|i| proj(i, var(st))).collect();
                for (j, x) in outs.iter().enumerate() {
                    match self.write_slot(x) {
                        Some(slot) => comps[slot] = proj(j, var(&r)),
                        None => {
                            comps.push(proj(j, var(&r)));
                            self.layout.push(x.clone());
                            self.env.push((x.clone(), Ref::State));
                        }
                    }
                }
                let stn = self.gen("st");
                let restt = self.seq(rest, &stn, finish);
                app(
                    app(app(t2, ins2), zeros),
                    lam(&r, app(lam(&stn, restt), CoreTerm::Tuple(comps))),
                )
            }
            StmtKind::For {
                var: counter,
                bound,
                body,
                ..
            } => {
                let b2 = self.expr(bound, st);
                let outer_len = self.layout.len();
                // Code after the loop, reached when the transformer chain
                // bottoms out.
                let pv = self.gen("p");
                let stn = self.gen("st");
                let restt = self.seq(rest, &stn, finish);
                let base = lam(&pv, app(lam(&stn, restt), proj(1, var(&pv))));
                // One iteration: bind the counter and the state from the
                // pair, run the body, continue with the rest transformer.
                let rec = self.gen("rec");
                let pv2 = self.gen("p");
                let stb = self.gen("st");
                let env_mark = self.env.len();
                self.env
                    .push((counter.clone(), Ref::Lexical(counter.clone())));
                let bfinish = Finish::Iterate {
                    rec: rec.clone(),
                    counter: counter.clone(),
                    outer_len,
                };
                let bodyt = self.seq(body, &stb, &bfinish);
                self.env.truncate(env_mark);
                self.layout.truncate(outer_len);
                let step = lam(
                    &rec,
                    lam(
                        &pv2,
                        app(
                            lam(counter, app(lam(&stb, bodyt), proj(1, var(&pv2)))),
                            proj(0, var(&pv2)),
                        ),
                    ),
                );
                app(
                    CoreTerm::NatIter(Box::new(b2), Box::new(base), Box::new(step)),
                    CoreTerm::Tuple(vec![CoreTerm::Zero, var(st)]),
                )
            }
            StmtKind::LabelBlock { label, outs, body } => {
                let outer_len = self.layout.len();
                let restf = self.gen("rest");
                let klv = self.gen("kl");
                let str_ = self.gen("st");
                let restt = self.seq(rest, &str_, finish);
                let restf_term = lam(&str_, restt);
                // The label value: receive the payload, write it into the
                // block's output slots of the entry state, resume after
                // the block. Slots outside the outputs keep their entry
                // values; the footprint discipline makes that exact.
                let pay = self.gen("pay");
                let mut comps: Vec<CoreTerm> =
                    (0..outer_len).map(|i| proj(i, var(st))).collect();
                for (j, p) in outs.iter().enumerate() {
                    comps[self.pos(&p.name)] = proj(j, var(&pay));
                }
                let kl_term = lam(&pay, app(var(&restf), CoreTerm::Tuple(comps)));
                let env_mark = self.env.len();
                self.env.push((label.clone(), Ref::Lexical(klv.clone())));
                let bfinish = Finish::Resume {
                    rest: restf.clone(),
                    outer_len,
                };
                let bodyt = self.seq(body, st, &bfinish);
                self.env.truncate(env_mark);
                self.layout.truncate(outer_len);
                app(lam(&restf, app(lam(&klv, bodyt), kl_term)), restf_term)
            }
            StmtKind::Jump { target, args } => {
                let t2 = self.expr(target, st);
                let args2 = CoreTerm::Tuple(args.iter().map(|a| self.expr(a, st)).collect());
                // The rest of the sequence is dead code and is not
                // compiled at all.
                app(t2, args2)
            }
            StmtKind::Unpack {
                value_names, rhs, ..
            } => {
                let e2 = self.expr(rhs, st);
                let u = self.gen("u");
                let mut comps: Vec<CoreTerm> =
                    (0..self.layout.len()).map(|i| proj(i, var(st))).collect();
                for (j, x) in value_names.iter().enumerate() {
                    match self.write_slot(x) {
                        Some(slot) => comps[slot] = proj(j, var(&u)),
                        None => {
                            comps.push(proj(j, var(&u)));
                            self.layout.push(x.clone());
                            self.env.push((x.clone(), Ref::State));
                        }
                    }
                }
                let stn = self.gen("st");
                let restt = self.seq(rest, &stn, finish);
                app(
                    lam(&u, app(lam(&stn, restt), CoreTerm::Tuple(comps))),
                    e2,
                )
            }
        }
    }

    fn rebind(&mut self, state: CoreTerm, rest: &[Stmt], finish: &Finish) -> CoreTerm {
        let stn = self.gen("st");
        let restt = self.seq(rest, &stn, finish);
        app(lam(&stn, restt), state)
    }

    fn expr(&mut self, e: &Expr, st: &str) -> CoreTerm {
        match &e.kind {
            ExprKind::Zero => CoreTerm::Zero,
            ExprKind::Succ(inner) => succ(self.expr(inner, st)),
            ExprKind::Var(x) | ExprKind::LabelRef(x) => {
                match self.env.iter().rev().find(|(n, _)| n == x) {
                    Some((_, Ref::State)) => proj(self.pos(x), var(st)),
                    Some((_, Ref::Lexical(n))) => var(n),
                    None => unreachable!("unbound `{x}` in a checked program"),
                }
            }
            ExprKind::Pack { comps, .. } => {
                CoreTerm::Pack(comps.iter().map(|c| self.expr(c, st)).collect())
            }
            ExprKind::ProcLit(lit) => self.proc_lit(lit),
        }
    }
}

fn var(n: &str) -> CoreTerm {
    CoreTerm::Var(n.to_string())
}

fn lam(n: &str, body: CoreTerm) -> CoreTerm {
    CoreTerm::Lam(n.to_string(), Box::new(body))
}

fn app(f: CoreTerm, a: CoreTerm) -> CoreTerm {
    CoreTerm::App(Box::new(f), Box::new(a))
}

fn proj(i: usize, t: CoreTerm) -> CoreTerm {
    CoreTerm::Proj(i, Box::new(t))
}

fn succ(t: CoreTerm) -> CoreTerm {
    CoreTerm::Succ(Box::new(t))
}

impl fmt::Display for CoreTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreTerm::Var(x) => write!(f, "{x}"),
            CoreTerm::Lam(x, b) => write!(f, "(lam {x} {b})"),
            CoreTerm::App(g, a) => write!(f, "(app {g} {a})"),
            CoreTerm::Zero => write!(f, "zero"),
            CoreTerm::Succ(t) => write!(f, "(succ {t})"),
            CoreTerm::NatIter(n, b, s) => write!(f, "(natiter {n} {b} {s})"),
            CoreTerm::Tuple(ts) => {
                write!(f, "(tuple")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
            CoreTerm::Proj(i, t) => write!(f, "(proj {i} {t})"),
            CoreTerm::Pack(ts) => {
                write!(f, "(pack")?;
                for t in ts {
                    write!(f, " {t}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl CoreProgram {
    /// Renders the whole program as one S-expression per definition,
    /// followed by the entry marker.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (name, term) in &self.defs {
            s.push_str(&format!("(def {name} {term})\n"));
        }
        s.push_str(&format!("(entry {})\n", self.entry));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn core_of(src: &str) -> CoreProgram {
        let p = parse_program(src).expect("parse");
        let report = crate::check::check_program(&p, &crate::check::CheckConfig::default());
        assert!(!report.has_errors(), "{:?}", report.diagnostics);
        translate(&p).expect("translate")
    }

    const ADD: &str = "\
sig add/2;
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));
eq add(n, s(m)) = s(add(n, m));
";

    #[test]
    fn addition_compiles_to_the_pair_iterator_encoding() {
        let src = format!("{ADD}\nproc main(in; out r : nat(0)) {{ r := 0; }}\n");
        let core = core_of(&src);
        let (name, def) = &core.defs[0];
        assert_eq!(name, "add");
        let text = def.to_string();
        assert!(text.starts_with("(lam $a0 (lam $a1 (proj 1 (natiter $a0"), "{text}");
        // The extra third equation is sound for rewriting but plays no
        // part in evaluation.
        assert!(text.contains("(tuple zero $a1)"), "{text}");
    }

    #[test]
    fn non_structural_equations_are_rejected_by_name() {
        let src = "\
sig f/1;
eq f(n) = 0;

proc main(in; out r : nat(0)) { r := 0; }
";
        let p = parse_program(src).unwrap();
        assert_eq!(
            translate(&p),
            Err(TranslateError::UntranslatableEquation("f".to_string()))
        );
    }

    #[test]
    fn functions_may_only_use_previously_declared_functions() {
        let src = "\
sig mul/2;
sig add/2;
eq mul(0, m) = 0;
eq mul(s(n), m) = add(m, mul(n, m));
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));

proc main(in; out r : nat(0)) { r := 0; }
";
        let p = parse_program(src).unwrap();
        assert_eq!(
            translate(&p),
            Err(TranslateError::UntranslatableEquation("mul".to_string()))
        );
    }

    #[test]
    fn symbols_without_equations_get_no_definition() {
        let src = "\
sig mystery/1;

proc main(in; out r : nat(0)) { r := 0; }
";
        let core = core_of(src);
        assert!(core.defs.iter().all(|(n, _)| n != "mystery"));
        assert_eq!(core.defs.len(), 1);
    }

    #[test]
    fn input_names_survive_into_the_core() {
        let src = "proc main[n](in alpha : nat(n); out r : nat(s(n))) { r := s(alpha); }";
        let core = core_of(src);
        let text = core.to_text();
        assert!(text.contains("(lam alpha "), "{text}");
    }

    #[test]
    fn loops_become_bounded_iteration_over_pairs() {
        let src = "\
proc main[n](in a : nat(n); out r : nat(0)) {
  r := 0;
  for y := 0 until a invariant [i] (r : nat(0)) { skip; };
}
";
        let core = core_of(src);
        let text = core.to_text();
        assert!(text.contains("(natiter"), "{text}");
        assert!(text.contains("(tuple zero "), "{text}");
    }

    #[test]
    fn jumps_apply_the_label_binding_and_drop_dead_code() {
        let src = "\
proc main[n](in a : nat(n); out r : nat(s(n))) {
  label k out (r : nat(s(n))) {
    jump k (s(a));
    r := s(s(a));
  };
}
";
        let core = core_of(src);
        let text = core.to_text();
        assert!(text.contains("$kl"), "{text}");
        // The statement after the jump is dead and never compiled:
        // nothing in the core builds s(s(a)).
        assert!(!text.contains("(succ (succ a))"), "{text}");
    }

    #[test]
    fn entry_metadata_matches_the_entry_procedure() {
        let src = "\
proc helper(in; out h : nat(0)) { h := 0; }
proc main[n, m](in a : nat(n), b : nat(m); out r : nat(n)) { r := a; }
";
        let core = core_of(src);
        assert_eq!(core.entry, "main");
        assert_eq!(core.in_arity, 2);
        assert_eq!(core.out_arity, 1);
        let t = entry_term(&core, &[3, 4]);
        let text = t.to_string();
        assert!(text.contains("main"), "{text}");
        assert!(text.contains("(succ (succ (succ zero)))"), "{text}");
    }

    #[test]
    fn packages_erase_their_index_components() {
        let src = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  r := pack[s(n)](s(a));
}
";
        let core = core_of(src);
        let text = core.to_text();
        assert!(text.contains("(pack (succ a))"), "{text}");
        // No trace of the index argument s(n) as a runtime value: the
        // only succ applications are on the data component.
        assert!(!text.contains("(succ n)"), "{text}");
    }
}
