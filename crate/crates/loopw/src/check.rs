//! The type checker.
//!
//! Two environments drive checking. The immutable context Γ holds index
//! variables, value bindings (procedure names, input parameters, loop
//! counters) and labels; it grows lexically and entries never change.
//! The mutable environment Ω holds the variables a procedure may write;
//! it is *pseudo-dynamic* — an assignment retypes its target to the type
//! of the right-hand side, and the discipline is enforced at block
//! boundaries instead:
//!
//! * a `for` body starts with Ω restricted to the declared footprint at
//!   the invariant types σ̄[i] and must end at σ̄[s(i)]; the loop exits
//!   at σ̄[n] for bound n, and the entry state must match σ̄[0];
//! * a `label` body starts with Ω restricted to the declared outputs at
//!   their current types and must end (or be jumped out of) at the
//!   declared types;
//! * a procedure body must end with its outputs at their declared types.
//!
//! Variables outside a block's footprint are invisible inside it — both
//! reads and writes are rejected. New mutable variables enter Ω through
//! `call` outputs and `unpack`, and die at the end of their block.
//! After a `jump`, the rest of the sequence is skipped entirely: the
//! jump rule lets the dead continuation take any typing.
//!
//! Index-level equality is always up to the program's equations, via the
//! equation engine; an equality it cannot settle is a type error with a
//! distinguished rule ("type-unproven") rather than a silent pass.
//!
//! Checking also threads the hidden assertion slot (see the hoare
//! module) to collect verification conditions, and records a per-
//! statement snapshot of Ω for the entry procedure, which the test suite
//! compares against interpreter traces.

use crate::ast::*;
use crate::diag::{Diagnostic, Span};
use crate::hoare::{make_obligation, Obligation, Triple, TripleResult};
use crate::index::{is_data_mute, EqSystem, ProofStatus};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckConfig {
    /// Valuation bound for the entailment counterexample search.
    pub bound: u64,
    /// Rewrite step budget per normalization.
    pub step_cap: usize,
    /// When false, obligations are collected but not discharged.
    pub discharge: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            bound: 8,
            step_cap: 10_000,
            discharge: true,
        }
    }
}

/// Snapshot of the visible, initialized mutable variables and their
/// static types immediately after the statement at `span`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceEntry {
    pub span: Span,
    pub vars: Vec<(Name, Ty)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub diagnostics: Vec<Diagnostic>,
    pub obligations: Vec<Obligation>,
    /// Static typing trace of the entry procedure's body.
    pub trace: Vec<TraceEntry>,
}

impl CheckReport {
    pub fn has_errors(&self) -> bool {
        self.diagnostics
            .iter()
            .any(|d| d.severity == crate::diag::Severity::Error)
    }
}

/// Checks well-formedness and types, collecting diagnostics, verification
/// conditions and the entry procedure's typing trace.
pub fn check_program(p: &Program, cfg: &CheckConfig) -> CheckReport {
    let wf = crate::wf::well_formed(p);
    if !wf.is_empty() {
        return CheckReport {
            diagnostics: wf,
            obligations: Vec::new(),
            trace: Vec::new(),
        };
    }
    let mut ck = Checker::new(p, cfg.clone());
    for decl in &p.procs {
        ck.current_proc = decl.name.clone();
        let trace = decl.name == p.entry;
        ck.check_proc_body(&decl.lit, decl.span, trace);
        let ty = Ty::Proc(decl.lit.ty());
        ck.bind_gamma(decl.name.clone(), Binding::Value(Box::new(ty)));
    }
    CheckReport {
        diagnostics: ck.diagnostics,
        obligations: ck.obligations,
        trace: ck.trace,
    }
}

/// Checks `{t.pre} t.seq {t.post}` starting from the given mutable
/// environment (all entries initialized), in the scope of `program`'s
/// procedures. Used by the hoare module.
pub(crate) fn check_triple_seq(
    program: &Program,
    omega: &[(Name, Ty)],
    t: &Triple,
    cfg: &CheckConfig,
) -> TripleResult {
    let mut ck = Checker::new(program, cfg.clone());
    ck.current_proc = "triple".to_string();
    for decl in &program.procs {
        ck.bind_gamma(decl.name.clone(), Binding::Value(Box::new(Ty::Proc(decl.lit.ty()))));
    }
    for (name, ty) in omega {
        ck.introduce(name.clone(), ty.clone());
    }
    ck.exits.push(t.omega_out.clone());
    ck.slot = t.pre.clone();
    let reachable = ck.check_seq_open(&t.seq);
    if reachable {
        for (name, want) in &t.omega_out {
            match ck.omega.iter().find(|v| &v.name == name) {
                None => ck.diagnostics.push(Diagnostic::error(
                    Span::new(0, 0),
                    "type-mismatch",
                    format!("expected outgoing variable `{name}` does not exist"),
                )),
                Some(v) => {
                    let got = v.ty.clone();
                    ck.require_type_eq(&got, want, Span::new(0, 0), "type-mismatch", name);
                }
            }
        }
        let slot = ck.slot.clone();
        ck.emit("post", Span::new(0, 0), vec![slot], t.post.clone());
    }
    TripleResult {
        reachable,
        diagnostics: ck.diagnostics,
        obligations: ck.obligations,
    }
}

#[derive(Debug, Clone)]
enum Binding {
    Index,
    Value(Box<Ty>),
    Label(Vec<Ty>),
}

#[derive(Debug, Clone)]
struct MutableVar {
    name: Name,
    ty: Ty,
    init: bool,
    /// Set when an earlier diagnostic already made this variable's type
    /// unreliable; later exit checks stay quiet instead of cascading.
    poisoned: bool,
    seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum HiddenKind {
    Footprint,
    Literal,
}

struct Checker {
    system: EqSystem,
    cfg: CheckConfig,
    gamma: Vec<(Name, Binding, u64)>,
    omega: Vec<MutableVar>,
    hidden: Vec<(HiddenKind, Vec<MutableVar>)>,
    /// Required exit types of the innermost enclosing block, used to
    /// type package literals written to a variable.
    exits: Vec<Vec<(Name, Ty)>>,
    slot: IndexFormula,
    current_proc: Name,
    tracing: bool,
    next_seq: u64,
    diagnostics: Vec<Diagnostic>,
    obligations: Vec<Obligation>,
    trace: Vec<TraceEntry>,
}

enum Resolved {
    Live(usize),
    HiddenBy(HiddenKind, Box<Ty>),
    Immutable(&'static str),
    Unknown,
}

impl Checker {
    fn new(program: &Program, cfg: CheckConfig) -> Self {
        let system = EqSystem::from_program(program, cfg.step_cap);
        Checker {
            system,
            cfg,
            gamma: Vec::new(),
            omega: Vec::new(),
            hidden: Vec::new(),
            exits: Vec::new(),
            slot: IndexFormula::Truth,
            current_proc: String::new(),
            tracing: false,
            next_seq: 0,
            diagnostics: Vec::new(),
            obligations: Vec::new(),
            trace: Vec::new(),
        }
    }

    fn tick(&mut self) -> u64 {
        self.next_seq += 1;
        self.next_seq
    }

    fn bind_gamma(&mut self, name: Name, b: Binding) {
        let seq = self.tick();
        self.gamma.push((name, b, seq));
    }

    fn introduce(&mut self, name: Name, ty: Ty) {
        let seq = self.tick();
        self.omega.push(MutableVar {
            name,
            ty,
            init: true,
            poisoned: false,
            seq,
        });
    }

    fn error(&mut self, span: Span, rule: &'static str, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic::error(span, rule, message));
    }

    fn emit(&mut self, rule: &'static str, span: Span, hyps: Vec<IndexFormula>, goal: IndexFormula) {
        let mut ob = make_obligation(&self.system, &self.cfg, rule, span, hyps, goal);
        ob.proc = self.current_proc.clone();
        self.obligations.push(ob);
    }

    /// Finds the binding of `name` that was created most recently —
    /// lexically nearest, across the live mutable environment, the
    /// hidden (out-of-footprint) entries, and the immutable context.
    fn resolve(&self, name: &str) -> Resolved {
        let mut best: (u64, Resolved) = (0, Resolved::Unknown);
        if let Some((i, v)) = self
            .omega
            .iter()
            .enumerate()
            .rev()
            .find(|(_, v)| v.name == name)
        {
            best = (v.seq, Resolved::Live(i));
        }
        for (kind, frame) in self.hidden.iter().rev() {
            if let Some(v) = frame.iter().rev().find(|v| v.name == name) {
                if v.seq > best.0 {
                    best = (v.seq, Resolved::HiddenBy(*kind, Box::new(v.ty.clone())));
                }
            }
        }
        if let Some((_, b, seq)) = self.gamma.iter().rev().find(|(n, _, _)| n == name) {
            if *seq > best.0 {
                let what = match b {
                    Binding::Index => "index",
                    Binding::Value(_) => "value",
                    Binding::Label(_) => "label",
                };
                best = (*seq, Resolved::Immutable(what));
            }
        }
        best.1
    }

    fn gamma_value(&self, name: &str) -> Option<Ty> {
        match self.gamma.iter().rev().find(|(n, _, _)| n == name) {
            Some((_, Binding::Value(t), _)) => Some((**t).clone()),
            _ => None,
        }
    }

    fn hidden_message(kind: HiddenKind, name: &str) -> String {
        match kind {
            HiddenKind::Footprint => {
                format!("`{name}` is not in the footprint of the enclosing block")
            }
            HiddenKind::Literal => format!(
                "mutable variable `{name}` from an enclosing scope is not visible inside a procedure literal"
            ),
        }
    }

    /// Resolution for write positions: assignment targets, call outputs,
    /// unpack value names. Returns the live index, introducing a fresh
    /// variable when `introduce` is set and the name is unbound.
    fn write_target(
        &mut self,
        name: &str,
        ty: Ty,
        span: Span,
        may_introduce: bool,
    ) -> Option<usize> {
        match self.resolve(name) {
            Resolved::Live(i) => {
                let seq_keep = self.omega[i].seq;
                self.omega[i] = MutableVar {
                    name: name.to_string(),
                    ty,
                    init: true,
                    poisoned: false,
                    seq: seq_keep,
                };
                Some(i)
            }
            Resolved::HiddenBy(kind, _) => {
                self.error(span, "footprint", Self::hidden_message(kind, name));
                None
            }
            Resolved::Immutable(what) => {
                self.error(
                    span,
                    "immutable",
                    format!("cannot write to `{name}`: it is an immutable {what} binding"),
                );
                None
            }
            Resolved::Unknown => {
                if may_introduce {
                    self.introduce(name.to_string(), ty);
                    Some(self.omega.len() - 1)
                } else {
                    self.error(
                        span,
                        "scope",
                        format!(
                            "unknown variable `{name}`; new variables are introduced by call outputs or unpack"
                        ),
                    );
                    None
                }
            }
        }
    }

    /// The exit type the innermost enclosing block requires for `name`,
    /// if it states one.
    fn exit_ty_of(&self, name: &str) -> Option<Ty> {
        self.exits
            .last()
            .and_then(|m| m.iter().find(|(n, _)| n == name).map(|(_, t)| t.clone()))
    }

    // ------------------------------------------------------------------
    // Type and formula equality, up to the program's equations.

    fn combine(a: ProofStatus, b: ProofStatus) -> ProofStatus {
        match (a, b) {
            (ProofStatus::Refuted, _) | (_, ProofStatus::Refuted) => ProofStatus::Refuted,
            (ProofStatus::Proven, ProofStatus::Proven) => ProofStatus::Proven,
            (ProofStatus::Unproven(r), _) | (_, ProofStatus::Unproven(r)) => {
                ProofStatus::Unproven(r)
            }
        }
    }

    fn types_equal(&self, a: &Ty, b: &Ty) -> ProofStatus {
        match (a, b) {
            (Ty::Nat(s), Ty::Nat(t)) => self.system.terms_equal(s, t),
            (Ty::EqTy(a1, a2), Ty::EqTy(b1, b2)) => Self::combine(
                self.system.terms_equal(a1, b1),
                self.system.terms_equal(a2, b2),
            ),
            (Ty::Exists(xs, cs), Ty::Exists(ys, ds)) => {
                if xs.len() != ys.len() || cs.len() != ds.len() {
                    return ProofStatus::Refuted;
                }
                let (cs2, ds2) = Self::align_binders(xs, cs, ys, ds);
                let mut acc = ProofStatus::Proven;
                for (c, d) in cs2.iter().zip(&ds2) {
                    acc = Self::combine(acc, self.types_equal(c, d));
                }
                acc
            }
            (Ty::Proc(p), Ty::Proc(q)) => {
                if p.binders.len() != q.binders.len()
                    || p.ins.len() != q.ins.len()
                    || p.outs.len() != q.outs.len()
                {
                    return ProofStatus::Refuted;
                }
                let (pins, qins) = Self::align_binders(&p.binders, &p.ins, &q.binders, &q.ins);
                let (pouts, qouts) = Self::align_binders(&p.binders, &p.outs, &q.binders, &q.outs);
                let mut acc = ProofStatus::Proven;
                for (x, y) in pins.iter().zip(&qins).chain(pouts.iter().zip(&qouts)) {
                    acc = Self::combine(acc, self.types_equal(x, y));
                }
                let subst_p = Self::binder_renaming(&p.binders);
                let subst_q = Self::binder_renaming(&q.binders);
                let contracts = [(&p.pre, &q.pre), (&p.post, &q.post)];
                for (f, g) in contracts {
                    let f = f.clone().unwrap_or(IndexFormula::Truth).subst(&subst_p);
                    let g = g.clone().unwrap_or(IndexFormula::Truth).subst(&subst_q);
                    acc = Self::combine(acc, self.formulas_equal(&f, &g));
                }
                acc
            }
            _ => ProofStatus::Refuted,
        }
    }

    fn binder_renaming(binders: &[Name]) -> Vec<(Name, IndexTerm)> {
        binders
            .iter()
            .enumerate()
            .map(|(k, b)| (b.clone(), IndexTerm::var(&format!("_cmp{k}"))))
            .collect()
    }

    /// Renames both binder lists to a shared set of fresh names so the
    /// bodies can be compared positionally.
    fn align_binders(xs: &[Name], cs: &[Ty], ys: &[Name], ds: &[Ty]) -> (Vec<Ty>, Vec<Ty>) {
        let sx = Self::binder_renaming(xs);
        let sy = Self::binder_renaming(ys);
        (
            cs.iter().map(|c| c.subst(&sx)).collect(),
            ds.iter().map(|d| d.subst(&sy)).collect(),
        )
    }

    /// Structural formula comparison with index terms compared up to the
    /// equations. Never reports Refuted: structurally different formulas
    /// may still be logically equivalent, so the honest negative answer
    /// is Unproven.
    fn formulas_equal(&self, f: &IndexFormula, g: &IndexFormula) -> ProofStatus {
        let unproven = || ProofStatus::Unproven("shape".to_string());
        match (f, g) {
            (IndexFormula::Truth, IndexFormula::Truth) => ProofStatus::Proven,
            (IndexFormula::Eq(a1, a2), IndexFormula::Eq(b1, b2)) => {
                match Self::combine(
                    self.system.terms_equal(a1, b1),
                    self.system.terms_equal(a2, b2),
                ) {
                    ProofStatus::Proven => ProofStatus::Proven,
                    _ => unproven(),
                }
            }
            (IndexFormula::And(a1, a2), IndexFormula::And(b1, b2))
            | (IndexFormula::Implies(a1, a2), IndexFormula::Implies(b1, b2)) => {
                match Self::combine(self.formulas_equal(a1, b1), self.formulas_equal(a2, b2)) {
                    ProofStatus::Proven => ProofStatus::Proven,
                    _ => unproven(),
                }
            }
            (IndexFormula::Forall(x, a), IndexFormula::Forall(y, b)) => {
                let fresh = IndexTerm::var("_cmp0");
                let a = a.subst(&[(x.clone(), fresh.clone())]);
                let b = b.subst(&[(y.clone(), fresh)]);
                match self.formulas_equal(&a, &b) {
                    ProofStatus::Proven => ProofStatus::Proven,
                    _ => unproven(),
                }
            }
            _ => unproven(),
        }
    }

    fn require_type_eq(&mut self, got: &Ty, want: &Ty, span: Span, rule: &'static str, what: &str) {
        match self.types_equal(got, want) {
            ProofStatus::Proven => {}
            ProofStatus::Refuted => self.error(
                span,
                rule,
                format!("{what} has type {got} but {want} is required"),
            ),
            ProofStatus::Unproven(_) => {
                let msg =
                    format!("cannot prove that the type {got} of {what} equals {want}");
                self.diagnostics.push(Diagnostic::error(
                    span,
                    if rule == "type-mismatch" { "type-unproven" } else { rule },
                    msg,
                ));
            }
        }
    }

    // ------------------------------------------------------------------
    // Procedure bodies.

    fn check_proc_body(&mut self, lit: &ProcLit, span: Span, trace: bool) {
        let saved_omega = std::mem::take(&mut self.omega);
        let saved_slot = std::mem::replace(&mut self.slot, IndexFormula::Truth);
        let saved_tracing = std::mem::replace(&mut self.tracing, trace);
        let gamma_mark = self.gamma.len();
        self.hidden.push((HiddenKind::Literal, saved_omega));

        for b in &lit.binders {
            self.bind_gamma(b.clone(), Binding::Index);
        }
        for p in &lit.ins {
            self.bind_gamma(p.name.clone(), Binding::Value(Box::new(p.ty.clone())));
        }
        for p in &lit.outs {
            let seq = self.tick();
            self.omega.push(MutableVar {
                name: p.name.clone(),
                ty: p.ty.clone(),
                init: false,
                poisoned: false,
                seq,
            });
        }
        self.exits
            .push(lit.outs.iter().map(|p| (p.name.clone(), p.ty.clone())).collect());
        self.slot = lit.pre.clone().unwrap_or(IndexFormula::Truth);

        let reachable = self.check_seq(&lit.body);
        if reachable {
            for p in &lit.outs {
                let v = self
                    .omega
                    .iter()
                    .find(|v| v.name == p.name)
                    .expect("outputs stay in omega")
                    .clone();
                if !v.init {
                    self.error(
                        p.span,
                        "uninit",
                        format!("output `{}` is not initialized when the procedure returns", p.name),
                    );
                } else if !v.poisoned {
                    self.require_type_eq(
                        &v.ty,
                        &p.ty,
                        p.span,
                        "type-mismatch",
                        &format!("output `{}`", p.name),
                    );
                }
            }
            if let Some(post) = &lit.post {
                let slot = self.slot.clone();
                self.emit("post", span, vec![slot], post.clone());
            }
        }

        self.exits.pop();
        self.gamma.truncate(gamma_mark);
        let (_, restored) = self.hidden.pop().expect("literal frame");
        self.omega = restored;
        self.slot = saved_slot;
        self.tracing = saved_tracing;
    }

    // ------------------------------------------------------------------
    // Sequences and statements.

    fn check_seq(&mut self, seq: &Seq) -> bool {
        let gamma_mark = self.gamma.len();
        let omega_mark = self.omega.len();
        let reachable = self.check_seq_open(seq);
        self.gamma.truncate(gamma_mark);
        self.omega.truncate(omega_mark);
        reachable
    }

    /// Like check_seq, but variables introduced by the sequence stay
    /// visible afterwards. Triples are checked this way so their final
    /// environment can be compared against the expected one.
    fn check_seq_open(&mut self, seq: &Seq) -> bool {
        let mut reachable = true;
        for stmt in seq {
            if !reachable {
                // Everything after a jump succeeds without inspection.
                break;
            }
            reachable = self.check_stmt(stmt);
            if self.tracing {
                let vars = self
                    .omega
                    .iter()
                    .filter(|v| v.init && !v.poisoned)
                    .map(|v| (v.name.clone(), v.ty.clone()))
                    .collect();
                self.trace.push(TraceEntry {
                    span: stmt.span,
                    vars,
                });
            }
        }
        reachable
    }

    fn check_stmt(&mut self, stmt: &Stmt) -> bool {
        let span = stmt.span;
        match &stmt.kind {
            StmtKind::Skip => true,
            StmtKind::Claim(f) => {
                debug_assert!(is_data_mute(f));
                let slot = self.slot.clone();
                self.emit("claim", span, vec![slot], f.clone());
                self.slot = f.clone();
                true
            }
            StmtKind::Assign(x, e) => {
                self.check_assign(x, e, span);
                true
            }
            StmtKind::Call {
                target,
                indices,
                ins,
                outs,
            } => {
                self.check_call(target, indices, ins, outs, span);
                true
            }
            StmtKind::For {
                var,
                bound,
                inv_binder,
                footprint,
                body,
            } => {
                self.check_for(var, bound, inv_binder, footprint, body, span);
                true
            }
            StmtKind::LabelBlock { label, outs, body } => {
                self.check_label_block(label, outs, body, span);
                true
            }
            StmtKind::Jump { target, args } => self.check_jump(target, args, span),
            StmtKind::Unpack {
                index_names,
                value_names,
                rhs,
            } => {
                self.check_unpack(index_names, value_names, rhs, span);
                true
            }
        }
    }

    fn check_assign(&mut self, x: &Name, e: &Expr, span: Span) {
        if matches!(e.kind, ExprKind::Pack { .. }) {
            // Package literals cannot synthesize a type; they are checked
            // against the exit type the innermost block requires for x.
            match self.exit_ty_of(x) {
                Some(want) => {
                    self.check_expr(e, &want);
                    self.write_target(x, want, span, false);
                }
                None => {
                    self.error(
                        span,
                        "type-mismatch",
                        format!(
                            "cannot determine the package type for `{x}` here; only variables with a declared exit type can hold a package literal"
                        ),
                    );
                    // Recover: mark the target initialized if it exists.
                    if let Resolved::Live(i) = self.resolve(x) {
                        self.omega[i].init = true;
                    }
                }
            }
        } else {
            match self.infer_expr(e) {
                Some(t) => {
                    self.write_target(x, t, span, false);
                }
                None => {
                    if let Resolved::Live(i) = self.resolve(x) {
                        self.omega[i].init = true;
                    } else {
                        self.write_target(x, Ty::Nat(IndexTerm::Zero), span, false);
                    }
                }
            }
        }
    }

    fn check_call(
        &mut self,
        target: &Expr,
        indices: &[IndexTerm],
        ins: &[Expr],
        outs: &[Name],
        span: Span,
    ) {
        let pt = match self.infer_expr(target) {
            Some(Ty::Proc(pt)) => Some(pt),
            Some(other) => {
                self.error(
                    span,
                    "type-mismatch",
                    format!("call target has type {other}, which is not a procedure type"),
                );
                None
            }
            None => None,
        };
        let Some(pt) = pt else {
            for x in outs {
                self.write_target(x, Ty::Nat(IndexTerm::Zero), span, true);
            }
            return;
        };
        if indices.len() != pt.binders.len() {
            self.error(
                span,
                "call-arity",
                format!(
                    "procedure binds {} index variable(s) but {} argument(s) are supplied",
                    pt.binders.len(),
                    indices.len()
                ),
            );
        }
        let theta: Vec<(Name, IndexTerm)> = pt
            .binders
            .iter()
            .cloned()
            .zip(indices.iter().cloned())
            .collect();
        if ins.len() != pt.ins.len() {
            self.error(
                span,
                "call-arity",
                format!(
                    "procedure takes {} input(s) but {} are given",
                    pt.ins.len(),
                    ins.len()
                ),
            );
        }
        for (e, want) in ins.iter().zip(&pt.ins) {
            let want = want.subst(&theta);
            self.check_expr(e, &want);
        }
        if let Some(pre) = &pt.pre {
            let slot = self.slot.clone();
            self.emit("call-pre", span, vec![slot], pre.subst(&theta));
        }
        self.slot = pt
            .post
            .as_ref()
            .map(|p| p.subst(&theta))
            .unwrap_or(IndexFormula::Truth);
        if outs.len() != pt.outs.len() {
            self.error(
                span,
                "call-arity",
                format!(
                    "procedure produces {} output(s) but {} name(s) are given",
                    pt.outs.len(),
                    outs.len()
                ),
            );
        }
        for (x, oty) in outs.iter().zip(&pt.outs) {
            let got = oty.subst(&theta);
            self.write_target(x, got, span, true);
        }
    }

    fn check_for(
        &mut self,
        var: &Name,
        bound: &Expr,
        inv_binder: &Name,
        footprint: &[Param],
        body: &Seq,
        span: Span,
    ) {
        let bt = match self.infer_expr(bound) {
            Some(Ty::Nat(t)) => t,
            Some(other) => {
                self.error(
                    span,
                    "type-mismatch",
                    format!("loop bound has type {other} but a nat type is required"),
                );
                IndexTerm::Zero
            }
            None => IndexTerm::Zero,
        };

        // Resolve the footprint against the current environment and check
        // the entry state against the invariant at 0.
        let at_zero = |ty: &Ty, inv: &Name| ty.subst(&[(inv.clone(), IndexTerm::Zero)]);
        let mut carried: Vec<MutableVar> = Vec::new();
        for p in footprint {
            match self.resolve(&p.name) {
                Resolved::Live(i) => {
                    let v = self.omega[i].clone();
                    if !v.init {
                        self.error(
                            p.span,
                            "uninit",
                            format!("footprint variable `{}` must be initialized before the loop", p.name),
                        );
                    }
                    let mut poisoned = v.poisoned;
                    if !poisoned {
                        let want = at_zero(&p.ty, inv_binder);
                        match self.types_equal(&v.ty, &want) {
                            ProofStatus::Proven => {}
                            ProofStatus::Refuted => {
                                self.error(
                                    p.span,
                                    "for-entry",
                                    format!(
                                        "entering the loop, `{}` has type {} but the invariant at 0 requires {}",
                                        p.name, v.ty, want
                                    ),
                                );
                                poisoned = true;
                            }
                            ProofStatus::Unproven(_) => {
                                self.error(
                                    p.span,
                                    "for-entry",
                                    format!(
                                        "cannot prove that the type {} of `{}` matches the invariant at 0, {}",
                                        v.ty, p.name, want
                                    ),
                                );
                                poisoned = true;
                            }
                        }
                    }
                    carried.push(MutableVar {
                        name: p.name.clone(),
                        ty: p.ty.clone(),
                        init: true,
                        poisoned,
                        seq: v.seq,
                    });
                }
                Resolved::HiddenBy(kind, _) => {
                    let msg = Self::hidden_message(kind, &p.name);
                    self.error(p.span, "footprint", msg);
                }
                Resolved::Immutable(what) => {
                    self.error(
                        p.span,
                        "immutable",
                        format!("footprint variable `{}` is an immutable {what} binding", p.name),
                    );
                }
                Resolved::Unknown => {
                    self.error(
                        p.span,
                        "scope",
                        format!("unknown footprint variable `{}`", p.name),
                    );
                }
            }
        }

        // A variable whose entry state already failed the invariant gives
        // us nothing trustworthy to compare against later: the preservation
        // and exit types are instances of the same broken invariant, so
        // checking them would only restate the entry mismatch.
        let entry_poison: Vec<Name> = carried
            .iter()
            .filter(|v| v.poisoned)
            .map(|v| v.name.clone())
            .collect();

        // Body: Ω is exactly the footprint at the invariant types.
        let outer = std::mem::replace(&mut self.omega, carried);
        let outer_rest: Vec<MutableVar> = outer
            .iter()
            .filter(|v| !footprint.iter().any(|p| p.name == v.name))
            .cloned()
            .collect();
        self.hidden.push((HiddenKind::Footprint, outer_rest));
        let gamma_mark = self.gamma.len();
        self.bind_gamma(inv_binder.clone(), Binding::Index);
        self.bind_gamma(
            var.clone(),
            Binding::Value(Box::new(Ty::Nat(IndexTerm::var(inv_binder)))),
        );
        let step = |ty: &Ty, inv: &Name| {
            ty.subst(&[(inv.clone(), IndexTerm::succ(IndexTerm::var(inv)))])
        };
        self.exits.push(
            footprint
                .iter()
                .map(|p| (p.name.clone(), step(&p.ty, inv_binder)))
                .collect(),
        );
        self.slot = IndexFormula::Truth;

        let body_reachable = self.check_seq(body);

        if body_reachable {
            for p in footprint {
                let Some(v) = self.omega.iter().find(|v| v.name == p.name) else {
                    continue;
                };
                let v = v.clone();
                if v.poisoned || entry_poison.contains(&p.name) {
                    continue;
                }
                let want = step(&p.ty, inv_binder);
                match self.types_equal(&v.ty, &want) {
                    ProofStatus::Proven => {}
                    ProofStatus::Refuted => self.error(
                        p.span,
                        "for-preserve",
                        format!(
                            "after the body, `{}` has type {} but the invariant at the next iteration requires {}",
                            p.name, v.ty, want
                        ),
                    ),
                    ProofStatus::Unproven(_) => self.error(
                        p.span,
                        "for-preserve",
                        format!(
                            "cannot prove that the type {} of `{}` matches the invariant at the next iteration, {}",
                            v.ty, p.name, want
                        ),
                    ),
                }
            }
        }

        // Exit: restore the outer environment; the footprint leaves at
        // the invariant instantiated with the loop bound.
        let body_poison: Vec<(Name, bool)> = self
            .omega
            .iter()
            .map(|v| (v.name.clone(), v.poisoned))
            .collect();
        self.exits.pop();
        self.gamma.truncate(gamma_mark);
        self.hidden.pop();
        self.omega = outer;
        for p in footprint {
            if let Some(v) = self.omega.iter_mut().find(|v| v.name == p.name) {
                v.ty = p.ty.subst(&[(inv_binder.clone(), bt.clone())]);
                v.init = true;
                v.poisoned = v.poisoned
                    || entry_poison.contains(&p.name)
                    || body_poison
                        .iter()
                        .any(|(n, pz)| n == &p.name && *pz);
            }
        }
        self.slot = IndexFormula::Truth;
    }

    fn check_label_block(&mut self, label: &Name, outs: &[Param], body: &Seq, span: Span) {
        let _ = span;
        let mut carried: Vec<MutableVar> = Vec::new();
        for p in outs {
            match self.resolve(&p.name) {
                Resolved::Live(i) => carried.push(self.omega[i].clone()),
                Resolved::HiddenBy(kind, _) => {
                    let msg = Self::hidden_message(kind, &p.name);
                    self.error(p.span, "footprint", msg);
                }
                Resolved::Immutable(what) => {
                    self.error(
                        p.span,
                        "immutable",
                        format!("label output `{}` is an immutable {what} binding", p.name),
                    );
                }
                Resolved::Unknown => {
                    self.error(p.span, "scope", format!("unknown label output `{}`", p.name));
                }
            }
        }

        let outer = std::mem::replace(&mut self.omega, carried);
        let outer_rest: Vec<MutableVar> = outer
            .iter()
            .filter(|v| !outs.iter().any(|p| p.name == v.name))
            .cloned()
            .collect();
        self.hidden.push((HiddenKind::Footprint, outer_rest));
        let gamma_mark = self.gamma.len();
        let payload: Vec<Ty> = outs.iter().map(|p| p.ty.clone()).collect();
        self.bind_gamma(label.clone(), Binding::Label(payload));
        self.exits
            .push(outs.iter().map(|p| (p.name.clone(), p.ty.clone())).collect());
        // The assertion slot flows into the block unchanged.

        let body_reachable = self.check_seq(body);

        if body_reachable {
            for p in outs {
                let Some(v) = self.omega.iter().find(|v| v.name == p.name) else {
                    continue;
                };
                let v = v.clone();
                if !v.init {
                    self.error(
                        p.span,
                        "uninit",
                        format!(
                            "label block `{label}` falls through without initializing its output `{}`",
                            p.name
                        ),
                    );
                } else if !v.poisoned {
                    match self.types_equal(&v.ty, &p.ty) {
                        ProofStatus::Proven => {}
                        ProofStatus::Refuted => self.error(
                            p.span,
                            "label-out",
                            format!(
                                "falling through `{label}`, `{}` has type {} but the block declares {}",
                                p.name, v.ty, p.ty
                            ),
                        ),
                        ProofStatus::Unproven(_) => self.error(
                            p.span,
                            "label-out",
                            format!(
                                "cannot prove that the type {} of `{}` matches the declared {}",
                                v.ty, p.name, p.ty
                            ),
                        ),
                    }
                }
            }
        }

        let body_poison: Vec<(Name, bool)> = self
            .omega
            .iter()
            .map(|v| (v.name.clone(), v.poisoned))
            .collect();
        self.exits.pop();
        self.gamma.truncate(gamma_mark);
        self.hidden.pop();
        self.omega = outer;
        for p in outs {
            if let Some(v) = self.omega.iter_mut().find(|v| v.name == p.name) {
                v.ty = p.ty.clone();
                v.init = true;
                v.poisoned = v.poisoned
                    || body_poison
                        .iter()
                        .any(|(n, pz)| n == &p.name && *pz);
            }
        }
        self.slot = IndexFormula::Truth;
    }

    fn check_jump(&mut self, target: &Expr, args: &[Expr], span: Span) -> bool {
        let payload = match &target.kind {
            ExprKind::LabelRef(k) => self
                .gamma
                .iter()
                .rev()
                .find_map(|(n, b, _)| match b {
                    Binding::Label(p) if n == k => Some(p.clone()),
                    _ => None,
                }),
            _ => None,
        };
        let Some(payload) = payload else {
            self.error(
                span,
                "not-a-label",
                "jump target is not a label that is in scope".to_string(),
            );
            return false;
        };
        if args.len() != payload.len() {
            self.error(
                span,
                "jump-arity",
                format!(
                    "label carries {} value(s) but the jump provides {}",
                    payload.len(),
                    args.len()
                ),
            );
        }
        for (a, want) in args.iter().zip(&payload) {
            self.check_expr(a, want);
        }
        false
    }

    fn check_unpack(
        &mut self,
        index_names: &[Name],
        value_names: &[Name],
        rhs: &Expr,
        span: Span,
    ) {
        let rt = self.infer_expr(rhs);
        let (binders, comps) = match rt {
            Some(Ty::Exists(bs, cs)) => (bs, cs),
            Some(other) => {
                self.error(
                    span,
                    "type-mismatch",
                    format!("unpack needs a package type, found {other}"),
                );
                (Vec::new(), Vec::new())
            }
            None => (Vec::new(), Vec::new()),
        };
        if !binders.is_empty() || !comps.is_empty() {
            if index_names.len() != binders.len() {
                self.error(
                    span,
                    "unpack-arity",
                    format!(
                        "package binds {} index variable(s) but {} name(s) are given",
                        binders.len(),
                        index_names.len()
                    ),
                );
            }
            if value_names.len() != comps.len() {
                self.error(
                    span,
                    "unpack-arity",
                    format!(
                        "package has {} component(s) but {} name(s) are given",
                        comps.len(),
                        value_names.len()
                    ),
                );
            }
        }
        for u in index_names {
            self.bind_gamma(u.clone(), Binding::Index);
        }
        let theta: Vec<(Name, IndexTerm)> = binders
            .iter()
            .cloned()
            .zip(index_names.iter().map(|u| IndexTerm::var(u)))
            .collect();
        for (i, x) in value_names.iter().enumerate() {
            let ty = comps
                .get(i)
                .map(|c| c.subst(&theta))
                .unwrap_or(Ty::Nat(IndexTerm::Zero));
            self.write_target(x, ty, span, true);
        }
    }

    // ------------------------------------------------------------------
    // Expressions.

    fn infer_var(&mut self, x: &Name, span: Span) -> Option<Ty> {
        match self.resolve(x) {
            Resolved::Live(i) => {
                if !self.omega[i].init {
                    let msg = format!("`{x}` may be read before it is assigned");
                    self.error(span, "uninit", msg);
                }
                Some(self.omega[i].ty.clone())
            }
            Resolved::HiddenBy(kind, ty) => {
                let msg = Self::hidden_message(kind, x);
                self.error(span, "footprint", msg);
                Some(*ty)
            }
            Resolved::Immutable(what) => match what {
                "value" => self.gamma_value(x),
                "index" => {
                    self.error(
                        span,
                        "type-mismatch",
                        format!("index variable `{x}` cannot be used as a value"),
                    );
                    None
                }
                _ => {
                    self.error(
                        span,
                        "type-mismatch",
                        format!("label `{x}` cannot be used as a value"),
                    );
                    None
                }
            },
            Resolved::Unknown => {
                self.error(span, "scope", format!("unknown variable `{x}`"));
                None
            }
        }
    }

    fn infer_expr(&mut self, e: &Expr) -> Option<Ty> {
        match &e.kind {
            ExprKind::Zero => Some(Ty::Nat(IndexTerm::Zero)),
            ExprKind::Succ(inner) => match self.infer_expr(inner)? {
                Ty::Nat(t) => Some(Ty::Nat(IndexTerm::succ(t))),
                other => {
                    self.error(
                        e.span,
                        "type-mismatch",
                        format!("s(...) needs a nat operand, found {other}"),
                    );
                    None
                }
            },
            ExprKind::Var(x) => self.infer_var(x, e.span),
            ExprKind::LabelRef(k) => {
                self.error(
                    e.span,
                    "type-mismatch",
                    format!("label `{k}` cannot be used as a value"),
                );
                None
            }
            ExprKind::Pack { .. } => {
                self.error(
                    e.span,
                    "type-mismatch",
                    "package literal needs a target type; write it into a variable with a declared exit type or pass it to a typed position".to_string(),
                );
                None
            }
            ExprKind::ProcLit(lit) => {
                self.check_proc_body(lit, e.span, false);
                Some(Ty::Proc(lit.ty()))
            }
        }
    }

    fn check_expr(&mut self, e: &Expr, want: &Ty) {
        if let ExprKind::Pack { indices, comps } = &e.kind {
            match want {
                Ty::Exists(binders, ctys) => {
                    if indices.len() != binders.len() {
                        self.error(
                            e.span,
                            "pack-arity",
                            format!(
                                "package provides {} index term(s) but the type binds {}",
                                indices.len(),
                                binders.len()
                            ),
                        );
                    }
                    if comps.len() != ctys.len() {
                        self.error(
                            e.span,
                            "pack-arity",
                            format!(
                                "package has {} component(s) but the type lists {}",
                                comps.len(),
                                ctys.len()
                            ),
                        );
                    }
                    let theta: Vec<(Name, IndexTerm)> = binders
                        .iter()
                        .cloned()
                        .zip(indices.iter().cloned())
                        .collect();
                    for (c, cty) in comps.iter().zip(ctys) {
                        let want = cty.subst(&theta);
                        self.check_expr(c, &want);
                    }
                }
                other => {
                    self.error(
                        e.span,
                        "type-mismatch",
                        format!("package literal cannot have type {other}"),
                    );
                }
            }
            return;
        }
        if let Some(got) = self.infer_expr(e) {
            self.require_type_eq(&got, want, e.span, "type-mismatch", "expression");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn report(src: &str) -> CheckReport {
        let p = parse_program(src).expect("parse");
        check_program(&p, &CheckConfig::default())
    }

    fn rules(r: &CheckReport) -> Vec<&'static str> {
        r.diagnostics.iter().map(|d| d.rule).collect()
    }

    const DOUBLE: &str = "\
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

    #[test]
    fn doubling_program_is_well_typed() {
        let r = report(DOUBLE);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        assert!(r.obligations.is_empty());
    }

    #[test]
    fn wrong_invariant_base_is_exactly_one_entry_mismatch() {
        let src = DOUBLE.replace("nat(add(i, i))", "nat(add(i, s(i)))");
        let r = report(&src);
        assert_eq!(rules(&r), vec!["for-entry"], "{:?}", r.diagnostics);
    }

    #[test]
    fn broken_preservation_is_reported() {
        let src = "\
proc main[n](in a : nat(n); out b : nat(n)) {
  b := 0;
  for y := 0 until a invariant [i] (b : nat(i)) {
    b := s(s(b));
  };
}
";
        let r = report(src);
        assert_eq!(rules(&r), vec!["for-preserve"], "{:?}", r.diagnostics);
    }

    #[test]
    fn zero_iteration_loops_exit_at_the_invariant_base() {
        let src = "\
proc main(in; out r : nat(0)) {
  r := 0;
  for y := 0 until r invariant [i] (r : nat(i)) {
    r := s(r);
  };
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn framed_variables_survive_loops_unchanged() {
        let src = "\
proc main[m](in a : nat(m); out r : nat(0), w : nat(m)) {
  r := 0;
  w := a;
  for y := 0 until r invariant [i] (r : nat(0)) { skip; };
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        // The post-loop snapshot must still show w at its original type.
        let last = r.trace.last().unwrap();
        assert!(
            last.vars
                .iter()
                .any(|(n, t)| n == "w" && *t == Ty::Nat(IndexTerm::var("m"))),
            "{last:?}"
        );
    }

    const LABEL_PACK: &str = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  label k out (r : exists[m](nat(m))) {
    jump k (pack[s(n)](s(a)));
    r := pack[0](0);
  };
}
";

    #[test]
    fn label_and_jump_with_packed_payload_check() {
        let r = report(LABEL_PACK);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn code_after_a_jump_is_not_checked() {
        // The statement after the jump reads an unknown variable and
        // would normally be an error; being unreachable, it passes.
        let src = LABEL_PACK.replace("r := pack[0](0);", "r := nonsense;");
        let r = report(&src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn jump_arity_mismatch_is_reported() {
        let src = LABEL_PACK.replace(
            "jump k (pack[s(n)](s(a)));",
            "jump k (pack[s(n)](s(a)), 0);",
        );
        let r = report(&src);
        assert_eq!(rules(&r), vec!["jump-arity"], "{:?}", r.diagnostics);
    }

    #[test]
    fn jump_payload_types_are_checked() {
        let src = "\
proc main(in; out r : nat(s(0))) {
  label k out (r : nat(s(0))) {
    jump k (0);
  };
}
";
        let r = report(src);
        assert_eq!(rules(&r), vec!["type-mismatch"], "{:?}", r.diagnostics);
    }

    #[test]
    fn nullary_jump_is_fine() {
        let src = "\
proc main(in; out r : nat(0)) {
  r := 0;
  label k out () {
    jump k ();
  };
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn jumping_to_a_value_is_not_a_label() {
        let src = "\
proc main(in a : nat(0); out r : nat(0)) {
  r := 0;
  label k out (r : nat(0)) {
    jump a (0);
  };
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"not-a-label"), "{:?}", r.diagnostics);
    }

    const PROC_VAR: &str = "\
proc mk_inc(in; out p : proc[i](in nat(i); out nat(s(i)))) {
  p := proc[i](in x : nat(i); out y : nat(s(i))) { y := s(x); };
}

proc main[n](in a : nat(n); out z : nat(s(s(s(n))))) {
  call mk_inc(; p);
  call p[n](a; w);
  p := proc[i](in x : nat(i); out y : nat(s(s(i)))) { y := s(s(x)); };
  call p[s(n)](w; z);
}
";

    #[test]
    fn procedure_variables_can_be_reassigned_at_a_new_type() {
        let r = report(PROC_VAR);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn reading_an_uninitialized_output_is_reported() {
        let r = report("proc main(in; out r : nat(0)) { r := r; }");
        assert!(rules(&r).contains(&"uninit"), "{:?}", r.diagnostics);
    }

    #[test]
    fn missing_final_initialization_is_reported() {
        let r = report("proc main(in; out r : nat(0)) { skip; }");
        assert_eq!(rules(&r), vec!["uninit"], "{:?}", r.diagnostics);
    }

    #[test]
    fn input_parameters_are_immutable() {
        let r = report("proc main(in a : nat(0); out r : nat(0)) { a := 0; r := 0; }");
        assert!(rules(&r).contains(&"immutable"), "{:?}", r.diagnostics);
    }

    #[test]
    fn loop_counter_is_immutable() {
        let src = "\
proc main(in a : nat(0); out r : nat(0)) {
  r := 0;
  for y := 0 until a invariant [i] (r : nat(0)) { y := 0; };
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"immutable"), "{:?}", r.diagnostics);
    }

    #[test]
    fn loops_cannot_touch_variables_outside_their_footprint() {
        let src = "\
proc main(in a : nat(0); out r : nat(0), w : nat(0)) {
  r := 0;
  w := 0;
  for y := 0 until a invariant [i] (r : nat(0)) { w := s(w); };
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"footprint"), "{:?}", r.diagnostics);
    }

    #[test]
    fn literals_cannot_capture_enclosing_mutables() {
        let src = "\
proc main(in; out r : nat(0), p : proc(in; out nat(0))) {
  r := 0;
  p := proc(in; out d : nat(0)) { d := r; };
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"footprint"), "{:?}", r.diagnostics);
    }

    #[test]
    fn literals_can_capture_enclosing_immutables() {
        let src = "\
proc main[n](in a : nat(n); out p : proc(in; out nat(s(n)))) {
  p := proc(in; out d : nat(s(n))) { d := s(a); };
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn call_arity_mismatches_are_reported() {
        let src = "\
proc f[n](in a : nat(n); out b : nat(n)) { b := a; }
proc main(in; out r : nat(0)) {
  r := 0;
  call f[0, 0](r; r);
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"call-arity"), "{:?}", r.diagnostics);
    }

    #[test]
    fn call_input_types_are_checked() {
        let src = "\
proc f(in a : nat(s(0)); out b : nat(s(0))) { b := a; }
proc main(in; out r : nat(s(0))) {
  call f(0; r);
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"type-mismatch"), "{:?}", r.diagnostics);
    }

    #[test]
    fn claims_produce_source_ordered_obligations() {
        let src = "\
sig add/2;
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));
eq add(n, s(m)) = s(add(n, m));

proc main[n](in a : nat(n); out r : nat(n)) {
  claim n = n;
  claim add(0, n) = n;
  claim 0 = s(0);
  r := a;
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let statuses: Vec<&str> = r.obligations.iter().map(|o| o.status.label()).collect();
        assert_eq!(statuses, vec!["PROVEN", "PROVEN", "REFUTED"]);
        assert!(r.obligations.iter().all(|o| o.rule == "claim"));
        let mut spans: Vec<usize> = r.obligations.iter().map(|o| o.span.start).collect();
        let sorted = spans.clone();
        spans.sort_unstable();
        assert_eq!(spans, sorted, "obligations must be in source order");
    }

    #[test]
    fn contracts_flow_through_calls() {
        let src = "\
sig add/2;
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));

proc step[n](in a : nat(n); out r : nat(s(n))) pre n = n post add(0, n) = n {
  r := s(a);
}

proc main[n](in a : nat(n); out r : nat(s(n))) {
  call step[n](a; r);
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
        let summary: Vec<(&str, &str)> = r
            .obligations
            .iter()
            .map(|o| (o.rule, o.status.label()))
            .collect();
        assert_eq!(summary, vec![("post", "PROVEN"), ("call-pre", "PROVEN")]);
        assert_eq!(r.obligations[0].proc, "step");
        assert_eq!(r.obligations[1].proc, "main");
    }

    #[test]
    fn unpack_binds_fresh_indices_and_components() {
        let src = "\
proc wrap2[n](in x : nat(n); out p : exists[i, j](nat(i), nat(j))) {
  p := pack[n, s(n)](x, s(x));
}

proc main[n](in a : nat(n); out r : exists[i, j](nat(j), nat(i))) {
  call wrap2[n](a; q);
  unpack [u, v] (x1, x2) := q;
  r := pack[u, v](x2, x1);
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn pack_arity_is_checked() {
        let src = "\
proc main(in; out r : exists[m](nat(m))) {
  r := pack[0, 0](0);
}
";
        let r = report(src);
        assert!(rules(&r).contains(&"pack-arity"), "{:?}", r.diagnostics);
    }

    #[test]
    fn pseudo_dynamic_retyping_within_a_sequence() {
        let r = report("proc main(in; out r : nat(s(0))) { r := 0; r := s(r); }");
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn literals_may_jump_to_enclosing_labels() {
        let src = "\
proc main[n](in a : nat(n); out r : nat(s(n))) {
  label k out (r : nat(s(n))) {
    call proc(in; out d : nat(0)) { jump k (s(a)); }(; t);
    r := s(a);
  };
}
";
        let r = report(src);
        assert!(r.diagnostics.is_empty(), "{:?}", r.diagnostics);
    }

    #[test]
    fn checking_is_deterministic() {
        let p = parse_program(PROC_VAR).unwrap();
        let a = check_program(&p, &CheckConfig::default());
        let b = check_program(&p, &CheckConfig::default());
        assert_eq!(a, b);
    }

    #[test]
    fn disabling_discharge_changes_statuses_but_not_diagnostics() {
        let src = "proc main(in; out r : nat(0)) { claim 0 = 0; r := 0; }";
        let p = parse_program(src).unwrap();
        let eager = check_program(&p, &CheckConfig::default());
        let lazy = check_program(
            &p,
            &CheckConfig {
                discharge: false,
                ..CheckConfig::default()
            },
        );
        assert_eq!(eager.diagnostics, lazy.diagnostics);
        assert_eq!(eager.trace, lazy.trace);
        assert_eq!(
            lazy.obligations[0].status,
            ProofStatus::Unproven("skipped".to_string())
        );
    }

    #[test]
    fn trace_covers_the_entry_procedure_only() {
        let src = "\
proc helper(in; out h : nat(0)) { h := 0; }
proc main(in; out r : nat(0)) { call helper(; t); r := t; }
";
        let p = parse_program(src).unwrap();
        let r = check_program(&p, &CheckConfig::default());
        assert!(r.diagnostics.is_empty());
        // Two entry statements: the call and the assignment.
        assert_eq!(r.trace.len(), 2);
        assert!(r.trace[0].vars.iter().any(|(n, _)| n == "t"));
        assert!(r.trace[1].vars.iter().any(|(n, _)| n == "r"));
    }
}
