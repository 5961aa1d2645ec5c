//! Abstract syntax for loopw programs.
//!
//! Three layers share one term language of natural-number indices:
//! index terms appear inside types (`nat(t)`), inside assertion formulas,
//! and as instantiation arguments at call sites. Program expressions are a
//! separate, pure layer: the only statement forms are the imperative ones,
//! and an expression can never contain a jump or a label block — procedure
//! literal bodies are the one (suspended) exception, and the enum shapes
//! below enforce that by construction.

use crate::diag::Span;
use std::collections::BTreeSet;
use std::fmt;

pub type Name = String;

/// First-order terms over `0`, `s(_)` and declared function symbols.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IndexTerm {
    Var(Name),
    Zero,
    Succ(Box<IndexTerm>),
    App(Name, Vec<IndexTerm>),
}

impl IndexTerm {
    pub fn var(n: &str) -> IndexTerm {
        IndexTerm::Var(n.to_string())
    }

    pub fn succ(t: IndexTerm) -> IndexTerm {
        IndexTerm::Succ(Box::new(t))
    }

    pub fn app(f: &str, args: Vec<IndexTerm>) -> IndexTerm {
        IndexTerm::App(f.to_string(), args)
    }

    /// The canonical closed numeral `s^n(0)`.
    pub fn numeral(n: u64) -> IndexTerm {
        let mut t = IndexTerm::Zero;
        for _ in 0..n {
            t = IndexTerm::succ(t);
        }
        t
    }

    /// Some(n) when the term is literally `s^n(0)`.
    pub fn as_numeral(&self) -> Option<u64> {
        let mut t = self;
        let mut n = 0u64;
        loop {
            match t {
                IndexTerm::Zero => return Some(n),
                IndexTerm::Succ(inner) => {
                    n += 1;
                    t = inner;
                }
                _ => return None,
            }
        }
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            IndexTerm::Var(x) => {
                out.insert(x.clone());
            }
            IndexTerm::Zero => {}
            IndexTerm::Succ(t) => t.free_vars(out),
            IndexTerm::App(_, args) => {
                for a in args {
                    a.free_vars(out);
                }
            }
        }
    }

    pub fn subst(&self, map: &[(Name, IndexTerm)]) -> IndexTerm {
        match self {
            IndexTerm::Var(x) => map
                .iter()
                .rev()
                .find(|(n, _)| n == x)
                .map(|(_, t)| t.clone())
                .unwrap_or_else(|| self.clone()),
            IndexTerm::Zero => IndexTerm::Zero,
            IndexTerm::Succ(t) => IndexTerm::succ(t.subst(map)),
            IndexTerm::App(f, args) => {
                IndexTerm::App(f.clone(), args.iter().map(|a| a.subst(map)).collect())
            }
        }
    }
}

/// Assertion formulas. The whole grammar is deliberately "data mute":
/// equations, conjunction, implication and universal quantification only,
/// so no assertion can carry computational content into a program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IndexFormula {
    Truth,
    Eq(IndexTerm, IndexTerm),
    And(Box<IndexFormula>, Box<IndexFormula>),
    Implies(Box<IndexFormula>, Box<IndexFormula>),
    Forall(Name, Box<IndexFormula>),
}

impl IndexFormula {
    pub fn and(a: IndexFormula, b: IndexFormula) -> IndexFormula {
        IndexFormula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: IndexFormula, b: IndexFormula) -> IndexFormula {
        IndexFormula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: &str, body: IndexFormula) -> IndexFormula {
        IndexFormula::Forall(x.to_string(), Box::new(body))
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            IndexFormula::Truth => {}
            IndexFormula::Eq(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            IndexFormula::And(a, b) | IndexFormula::Implies(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            IndexFormula::Forall(x, body) => {
                let mut inner = BTreeSet::new();
                body.free_vars(&mut inner);
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    pub fn subst(&self, map: &[(Name, IndexTerm)]) -> IndexFormula {
        match self {
            IndexFormula::Truth => IndexFormula::Truth,
            IndexFormula::Eq(a, b) => IndexFormula::Eq(a.subst(map), b.subst(map)),
            IndexFormula::And(a, b) => IndexFormula::and(a.subst(map), b.subst(map)),
            IndexFormula::Implies(a, b) => IndexFormula::implies(a.subst(map), b.subst(map)),
            IndexFormula::Forall(x, body) => {
                let (x2, body2) = rename_binder_formula(x, body, map);
                IndexFormula::Forall(x2, Box::new(body2.subst(&retain(map, x))))
            }
        }
    }
}

/// Drops mappings for a shadowed binder name.
fn retain(map: &[(Name, IndexTerm)], binder: &str) -> Vec<(Name, IndexTerm)> {
    map.iter().filter(|(n, _)| n != binder).cloned().collect()
}

/// Renames `binder` away from the free variables of the substitution range,
/// so a capture like `(forall m. n = m)[n := s(m)]` cannot happen.
fn rename_binder_formula(
    binder: &str,
    body: &IndexFormula,
    map: &[(Name, IndexTerm)],
) -> (Name, IndexFormula) {
    let mut range_vars = BTreeSet::new();
    for (n, t) in map {
        if n != binder {
            t.free_vars(&mut range_vars);
        }
    }
    if !range_vars.contains(binder) {
        return (binder.to_string(), body.clone());
    }
    let mut taken = range_vars;
    body.free_vars(&mut taken);
    let fresh = fresh_name(binder, &taken);
    let renamed = body.subst(&[(binder.to_string(), IndexTerm::var(&fresh))]);
    (fresh, renamed)
}

pub fn fresh_name(base: &str, taken: &BTreeSet<Name>) -> Name {
    if !taken.contains(base) {
        return base.to_string();
    }
    let mut i = 1;
    loop {
        let candidate = format!("{base}{i}");
        if !taken.contains(&candidate) {
            return candidate;
        }
        i += 1;
    }
}

/// Value types. `Nat(t)` is a singleton: its inhabitant is exactly the
/// numeral denoted by `t`. Equality types have no introduction form in the
/// expression language; facts are asserted through `claim` instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ty {
    Nat(IndexTerm),
    Proc(ProcTy),
    Exists(Vec<Name>, Vec<Ty>),
    EqTy(IndexTerm, IndexTerm),
}

impl Ty {
    pub fn nat(t: IndexTerm) -> Ty {
        Ty::Nat(t)
    }

    pub fn free_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Ty::Nat(t) => t.free_vars(out),
            Ty::EqTy(a, b) => {
                a.free_vars(out);
                b.free_vars(out);
            }
            Ty::Exists(binders, comps) => {
                let mut inner = BTreeSet::new();
                for c in comps {
                    c.free_vars(&mut inner);
                }
                for b in binders {
                    inner.remove(b);
                }
                out.extend(inner);
            }
            Ty::Proc(p) => {
                let mut inner = BTreeSet::new();
                for t in p.ins.iter().chain(p.outs.iter()) {
                    t.free_vars(&mut inner);
                }
                if let Some(f) = &p.pre {
                    f.free_vars(&mut inner);
                }
                if let Some(f) = &p.post {
                    f.free_vars(&mut inner);
                }
                for b in &p.binders {
                    inner.remove(b);
                }
                out.extend(inner);
            }
        }
    }

    pub fn subst(&self, map: &[(Name, IndexTerm)]) -> Ty {
        match self {
            Ty::Nat(t) => Ty::Nat(t.subst(map)),
            Ty::EqTy(a, b) => Ty::EqTy(a.subst(map), b.subst(map)),
            Ty::Exists(binders, comps) => {
                let (binders2, comps2) = subst_under_binders(binders, comps, map);
                Ty::Exists(binders2, comps2)
            }
            Ty::Proc(p) => {
                let map2: Vec<_> = map
                    .iter()
                    .filter(|(n, _)| !p.binders.contains(n))
                    .cloned()
                    .collect();
                // Capture by the proc's own binders would require renaming
                // them; detect and rename via the same machinery types use.
                let mut range_vars = BTreeSet::new();
                for (_, t) in &map2 {
                    t.free_vars(&mut range_vars);
                }
                if p.binders.iter().any(|b| range_vars.contains(b)) {
                    let mut taken = range_vars;
                    let mut inner_free = BTreeSet::new();
                    self.free_vars(&mut inner_free);
                    taken.extend(inner_free);
                    let mut renaming = Vec::new();
                    let mut new_binders = Vec::new();
                    for b in &p.binders {
                        if taken.contains(b) {
                            let fresh = fresh_name(b, &taken);
                            taken.insert(fresh.clone());
                            renaming.push((b.clone(), IndexTerm::var(&fresh)));
                            new_binders.push(fresh);
                        } else {
                            new_binders.push(b.clone());
                        }
                    }
                    let renamed = ProcTy {
                        binders: new_binders,
                        ins: p.ins.iter().map(|t| t.subst(&renaming)).collect(),
                        outs: p.outs.iter().map(|t| t.subst(&renaming)).collect(),
                        pre: p.pre.as_ref().map(|f| f.subst(&renaming)),
                        post: p.post.as_ref().map(|f| f.subst(&renaming)),
                    };
                    return Ty::Proc(renamed).subst(&map2);
                }
                Ty::Proc(ProcTy {
                    binders: p.binders.clone(),
                    ins: p.ins.iter().map(|t| t.subst(&map2)).collect(),
                    outs: p.outs.iter().map(|t| t.subst(&map2)).collect(),
                    pre: p.pre.as_ref().map(|f| f.subst(&map2)),
                    post: p.post.as_ref().map(|f| f.subst(&map2)),
                })
            }
        }
    }
}

fn subst_under_binders(
    binders: &[Name],
    comps: &[Ty],
    map: &[(Name, IndexTerm)],
) -> (Vec<Name>, Vec<Ty>) {
    let map2: Vec<_> = map
        .iter()
        .filter(|(n, _)| !binders.contains(n))
        .cloned()
        .collect();
    let mut range_vars = BTreeSet::new();
    for (_, t) in &map2 {
        t.free_vars(&mut range_vars);
    }
    if binders.iter().any(|b| range_vars.contains(b)) {
        let mut taken = range_vars.clone();
        for c in comps {
            c.free_vars(&mut taken);
        }
        taken.extend(binders.iter().cloned());
        let mut renaming = Vec::new();
        let mut new_binders = Vec::new();
        for b in binders {
            if range_vars.contains(b) {
                let fresh = fresh_name(b, &taken);
                taken.insert(fresh.clone());
                renaming.push((b.clone(), IndexTerm::var(&fresh)));
                new_binders.push(fresh);
            } else {
                new_binders.push(b.clone());
            }
        }
        let comps2: Vec<Ty> = comps
            .iter()
            .map(|c| c.subst(&renaming).subst(&map2))
            .collect();
        (new_binders, comps2)
    } else {
        (
            binders.to_vec(),
            comps.iter().map(|c| c.subst(&map2)).collect(),
        )
    }
}

/// Dependent procedure type: `proc[i..](in tys; out tys) pre f post f`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ProcTy {
    pub binders: Vec<Name>,
    pub ins: Vec<Ty>,
    pub outs: Vec<Ty>,
    pub pre: Option<IndexFormula>,
    pub post: Option<IndexFormula>,
}

/// The type of a label: the payload the continuation consumes. A label is
/// not a value type — it can never sit in a mutable variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTy {
    pub payload: Vec<Ty>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind, span: Span) -> Expr {
        Expr { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Var(Name),
    Zero,
    Succ(Box<Expr>),
    Pack {
        indices: Vec<IndexTerm>,
        comps: Vec<Expr>,
    },
    ProcLit(Box<ProcLit>),
    /// A reference to a lexically enclosing label. Produced by the
    /// resolution pass that runs directly after parsing; the surface
    /// syntax writes a bare identifier.
    LabelRef(Name),
}

/// Anonymous procedure. Top-level declarations reuse this shape with a name
/// attached. The body closes over immutable bindings of the enclosing
/// context (including labels) but never over mutable state.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcLit {
    pub binders: Vec<Name>,
    pub ins: Vec<Param>,
    pub outs: Vec<Param>,
    pub pre: Option<IndexFormula>,
    pub post: Option<IndexFormula>,
    pub body: Seq,
}

impl ProcLit {
    pub fn ty(&self) -> ProcTy {
        ProcTy {
            binders: self.binders.clone(),
            ins: self.ins.iter().map(|p| p.ty.clone()).collect(),
            outs: self.outs.iter().map(|p| p.ty.clone()).collect(),
            pre: self.pre.clone(),
            post: self.post.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: Name,
    pub ty: Ty,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub span: Span,
}

impl Stmt {
    pub fn new(kind: StmtKind, span: Span) -> Stmt {
        Stmt { kind, span }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Skip,
    /// `x := e` — pseudo-dynamic: the variable takes the type of `e`.
    Assign(Name, Expr),
    /// `call target[indices](ins; outs)` — copy-in for ins, copy-out for
    /// outs. An out name not yet in scope is introduced by the call.
    Call {
        target: Expr,
        indices: Vec<IndexTerm>,
        ins: Vec<Expr>,
        outs: Vec<Name>,
    },
    /// `for var := 0 until bound invariant [i] (footprint) { body }`.
    /// The body may touch only the footprint variables, whose types are
    /// given as functions of the iteration index `i`.
    For {
        var: Name,
        bound: Expr,
        inv_binder: Name,
        footprint: Vec<Param>,
        body: Seq,
    },
    /// `label k out (footprint) { body }` — binds `k` to the continuation
    /// of the whole block; a jump to `k` supplies the footprint's final
    /// values directly.
    LabelBlock {
        label: Name,
        outs: Vec<Param>,
        body: Seq,
    },
    Jump {
        target: Expr,
        args: Vec<Expr>,
    },
    Claim(IndexFormula),
    /// `unpack [is](xs) := e` — opens an existential package; the index
    /// names enter the immutable context, the value names become (or
    /// update) mutable variables.
    Unpack {
        index_names: Vec<Name>,
        value_names: Vec<Name>,
        rhs: Expr,
    },
}

pub type Seq = Vec<Stmt>;

#[derive(Debug, Clone, PartialEq)]
pub struct SigDecl {
    pub name: Name,
    pub arity: usize,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub lhs: IndexTerm,
    pub rhs: IndexTerm,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcDecl {
    pub name: Name,
    pub lit: ProcLit,
    pub span: Span,
}

/// A whole compilation unit. `entry` names the procedure driven by the
/// command line: `main` when a procedure of that name exists, otherwise the
/// last declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub sigs: Vec<SigDecl>,
    pub equations: Vec<Equation>,
    pub procs: Vec<ProcDecl>,
    pub entry: Name,
}

impl Program {
    pub fn entry_proc(&self) -> &ProcDecl {
        self.procs
            .iter()
            .find(|p| p.name == self.entry)
            .expect("entry always names a declared procedure")
    }
}

impl fmt::Display for IndexTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::printer::term_to_string(self))
    }
}

impl fmt::Display for IndexFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::printer::formula_to_string(self))
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::printer::ty_to_string(self))
    }
}
