//! The direct interpreter.
//!
//! Values are numerals, procedure closures (capturing the immutable
//! environment only — the checker guarantees bodies never touch
//! enclosing mutables), packages, and label tags. Mutable variables
//! live in an ordered per-frame store; variables introduced inside a
//! block die when the block exits.
//!
//! Labels are one-shot and upward-only: entering a label block pushes a
//! fresh tag on the live stack, and a jump checks its target tag is
//! still live — jumping to a label whose block has already exited is a
//! runtime error (the functional translation, with persistent
//! continuations, deliberately disagrees on such programs; the type
//! system of the source language is what rules them out of the verified
//! fragment). A jump unwinds: every frame between the jump and the
//! label's block propagates the pending jump instead of continuing, and
//! a call that is unwound through skips its output copy-back.
//!
//! Name lookup follows lexical nearest-binder order across both the
//! immutable environment and the store, implemented with global birth
//! stamps on bindings.

use crate::ast::*;
use crate::diag::Span;
use std::collections::HashMap;
use std::fmt;
use std::rc::Rc;

#[derive(Debug, Clone, PartialEq)]
pub enum RtValue {
    Num(u64),
    Proc { env: RtEnv, lit: Rc<ProcLit> },
    Pack(Vec<RtValue>),
    Label { tag: u64, arity: usize },
}

/// Immutable bindings: inputs, loop counters, label tags, procedure
/// names. The number is the binding's birth stamp, used for
/// nearest-binder resolution against the store.
pub type RtEnv = HashMap<Name, (u64, RtValue)>;

#[derive(Debug, Clone, PartialEq)]
struct StoreVar {
    name: Name,
    seq: u64,
    value: RtValue,
}

pub type RtSnapshot = Vec<(Name, RtValue)>;

#[derive(Debug, Clone, PartialEq)]
pub enum RunError {
    /// A jump targeted a label whose block has already exited.
    EscapedLabel,
    /// An entry output was a procedure or label value, which has no
    /// printable form.
    Unprintable,
    /// The program was not in the shape the checker guarantees.
    Stuck(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::EscapedLabel => {
                write!(f, "jump to a label whose block has already finished")
            }
            RunError::Unprintable => {
                write!(f, "entry outputs contain a value with no printable form")
            }
            RunError::Stuck(msg) => write!(f, "runtime error: {msg}"),
        }
    }
}

impl std::error::Error for RunError {}

enum Flow {
    Normal,
    Jump { tag: u64, args: Vec<RtValue> },
}

pub struct RunTrace {
    pub outputs: Vec<u64>,
    /// Store snapshot after each executed statement of the entry
    /// procedure's body (loop bodies appear once per iteration).
    pub steps: Vec<(Span, RtSnapshot)>,
}

/// Runs the entry procedure on numeral inputs and flattens its outputs
/// to decimal values (packages flatten recursively).
pub fn run(p: &Program, inputs: &[u64]) -> Result<Vec<u64>, RunError> {
    Ok(run_traced(p, inputs, false)?.outputs)
}

/// Like `run`, but also records the store after every executed statement
/// of the entry procedure.
pub fn trace_run(p: &Program, inputs: &[u64]) -> Result<RunTrace, RunError> {
    run_traced(p, inputs, true)
}

fn run_traced(p: &Program, inputs: &[u64], tracing: bool) -> Result<RunTrace, RunError> {
    let mut interp = Interp {
        live_tags: Vec::new(),
        next_tag: 0,
        next_seq: 0,
        steps: Vec::new(),
        tracing: false,
    };
    let mut env: RtEnv = HashMap::new();
    for decl in &p.procs {
        let v = RtValue::Proc {
            env: env.clone(),
            lit: Rc::new(decl.lit.clone()),
        };
        let seq = interp.tick();
        env.insert(decl.name.clone(), (seq, v));
    }
    let entry = p.entry_proc();
    if inputs.len() != entry.lit.ins.len() {
        return Err(RunError::Stuck(format!(
            "entry procedure takes {} input(s), {} given",
            entry.lit.ins.len(),
            inputs.len()
        )));
    }
    let pv = env
        .get(&entry.name)
        .map(|(_, v)| v.clone())
        .expect("entry procedure is bound");
    let ins = inputs.iter().map(|&n| RtValue::Num(n)).collect();
    interp.tracing = tracing;
    let outs = match interp.call(&pv, ins)? {
        CallOutcome::Returned(outs) => outs,
        CallOutcome::Jumped { .. } => return Err(RunError::EscapedLabel),
    };
    let mut flat = Vec::new();
    for v in &outs {
        flatten(v, &mut flat)?;
    }
    Ok(RunTrace {
        outputs: flat,
        steps: interp.steps,
    })
}

/// Flattens a value to decimal outputs: numerals print themselves and
/// packages flatten component-wise; procedures and labels are rejected.
pub fn flatten(v: &RtValue, out: &mut Vec<u64>) -> Result<(), RunError> {
    match v {
        RtValue::Num(n) => {
            out.push(*n);
            Ok(())
        }
        RtValue::Pack(vs) => {
            for v in vs {
                flatten(v, out)?;
            }
            Ok(())
        }
        RtValue::Proc { .. } | RtValue::Label { .. } => Err(RunError::Unprintable),
    }
}

enum CallOutcome {
    Returned(Vec<RtValue>),
    Jumped { tag: u64, args: Vec<RtValue> },
}

struct Interp {
    live_tags: Vec<u64>,
    next_tag: u64,
    next_seq: u64,
    steps: Vec<(Span, RtSnapshot)>,
    tracing: bool,
}

impl Interp {
    fn tick(&mut self) -> u64 {
        self.next_seq += 1;
        self.next_seq
    }

    fn call(&mut self, pv: &RtValue, ins: Vec<RtValue>) -> Result<CallOutcome, RunError> {
        let RtValue::Proc { env, lit } = pv else {
            return Err(RunError::Stuck("call target is not a procedure".to_string()));
        };
        if ins.len() != lit.ins.len() {
            return Err(RunError::Stuck("call input arity mismatch".to_string()));
        }
        let mut env2 = env.clone();
        for (p, v) in lit.ins.iter().zip(ins) {
            let seq = self.tick();
            env2.insert(p.name.clone(), (seq, v));
        }
        let mut store: Vec<StoreVar> = Vec::new();
        let flow = self.exec_seq(&lit.body, &env2, &mut store)?;
        match flow {
            Flow::Normal => {
                let mut outs = Vec::with_capacity(lit.outs.len());
                for p in &lit.outs {
                    let v = store
                        .iter()
                        .rev()
                        .find(|s| s.name == p.name)
                        .map(|s| s.value.clone())
                        .ok_or_else(|| {
                            RunError::Stuck(format!("output `{}` was never assigned", p.name))
                        })?;
                    outs.push(v);
                }
                Ok(CallOutcome::Returned(outs))
            }
            Flow::Jump { tag, args } => Ok(CallOutcome::Jumped { tag, args }),
        }
    }

    fn exec_seq(
        &mut self,
        seq: &Seq,
        env: &RtEnv,
        store: &mut Vec<StoreVar>,
    ) -> Result<Flow, RunError> {
        for stmt in seq {
            let flow = self.exec_stmt(stmt, env, store)?;
            if let Flow::Jump { .. } = flow {
                // A statement left by jumping never reaches its sequential
                // continuation, so there is no "after this statement" state
                // to snapshot.
                return Ok(flow);
            }
            if self.tracing {
                let snap = store
                    .iter()
                    .map(|s| (s.name.clone(), s.value.clone()))
                    .collect();
                self.steps.push((stmt.span, snap));
            }
        }
        Ok(Flow::Normal)
    }

    fn store_set(&mut self, store: &mut Vec<StoreVar>, name: &str, value: RtValue) {
        match store.iter_mut().rev().find(|s| s.name == name) {
            Some(slot) => slot.value = value,
            None => {
                let seq = self.tick();
                store.push(StoreVar {
                    name: name.to_string(),
                    seq,
                    value,
                });
            }
        }
    }

    fn exec_stmt(
        &mut self,
        stmt: &Stmt,
        env: &RtEnv,
        store: &mut Vec<StoreVar>,
    ) -> Result<Flow, RunError> {
        match &stmt.kind {
            StmtKind::Skip | StmtKind::Claim(_) => Ok(Flow::Normal),
            StmtKind::Assign(x, e) => {
                let v = self.eval(e, env, store)?;
                self.store_set(store, x, v);
                Ok(Flow::Normal)
            }
            StmtKind::Call {
                target, ins, outs, ..
            } => {
                let pv = self.eval(target, env, store)?;
                let mut in_vals = Vec::with_capacity(ins.len());
                for e in ins {
                    in_vals.push(self.eval(e, env, store)?);
                }
                // Nested frames never write to the caller's trace.
                let saved_tracing = std::mem::replace(&mut self.tracing, false);
                let outcome = self.call(&pv, in_vals);
                self.tracing = saved_tracing;
                match outcome? {
                    CallOutcome::Returned(out_vals) => {
                        if out_vals.len() != outs.len() {
                            return Err(RunError::Stuck(
                                "call output arity mismatch".to_string(),
                            ));
                        }
                        for (x, v) in outs.iter().zip(out_vals) {
                            self.store_set(store, x, v);
                        }
                        Ok(Flow::Normal)
                    }
                    // Unwinding: the copy-back of outputs is skipped.
                    CallOutcome::Jumped { tag, args } => Ok(Flow::Jump { tag, args }),
                }
            }
            StmtKind::For {
                var, bound, body, ..
            } => {
                let n = match self.eval(bound, env, store)? {
                    RtValue::Num(n) => n,
                    _ => {
                        return Err(RunError::Stuck(
                            "loop bound is not a numeral".to_string(),
                        ))
                    }
                };
                for i in 0..n {
                    let mut env_i = env.clone();
                    let seq = self.tick();
                    env_i.insert(var.clone(), (seq, RtValue::Num(i)));
                    let mark = store.len();
                    let flow = self.exec_seq(body, &env_i, store)?;
                    store.truncate(mark);
                    if let Flow::Jump { .. } = flow {
                        return Ok(flow);
                    }
                }
                Ok(Flow::Normal)
            }
            StmtKind::LabelBlock { label, outs, body } => {
                let tag = self.next_tag;
                self.next_tag += 1;
                self.live_tags.push(tag);
                let mut env_b = env.clone();
                let seq = self.tick();
                env_b.insert(
                    label.clone(),
                    (
                        seq,
                        RtValue::Label {
                            tag,
                            arity: outs.len(),
                        },
                    ),
                );
                let mark = store.len();
                let flow = self.exec_seq(body, &env_b, store)?;
                store.truncate(mark);
                self.live_tags.retain(|t| *t != tag);
                match flow {
                    Flow::Normal => Ok(Flow::Normal),
                    Flow::Jump { tag: t, args } if t == tag => {
                        if args.len() != outs.len() {
                            return Err(RunError::Stuck(
                                "jump payload arity mismatch".to_string(),
                            ));
                        }
                        for (p, v) in outs.iter().zip(args) {
                            self.store_set(store, &p.name, v);
                        }
                        Ok(Flow::Normal)
                    }
                    other => Ok(other),
                }
            }
            StmtKind::Jump { target, args } => {
                let (tag, arity) = match self.eval(target, env, store)? {
                    RtValue::Label { tag, arity } => (tag, arity),
                    _ => {
                        return Err(RunError::Stuck(
                            "jump target is not a label".to_string(),
                        ))
                    }
                };
                if !self.live_tags.contains(&tag) {
                    return Err(RunError::EscapedLabel);
                }
                if args.len() != arity {
                    return Err(RunError::Stuck(
                        "jump payload arity mismatch".to_string(),
                    ));
                }
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env, store)?);
                }
                Ok(Flow::Jump { tag, args: vals })
            }
            StmtKind::Unpack {
                value_names, rhs, ..
            } => {
                let vs = match self.eval(rhs, env, store)? {
                    RtValue::Pack(vs) => vs,
                    _ => {
                        return Err(RunError::Stuck(
                            "unpack applied to a non-package".to_string(),
                        ))
                    }
                };
                if vs.len() != value_names.len() {
                    return Err(RunError::Stuck(
                        "unpack component arity mismatch".to_string(),
                    ));
                }
                for (x, v) in value_names.iter().zip(vs) {
                    self.store_set(store, x, v);
                }
                Ok(Flow::Normal)
            }
        }
    }

    fn eval(
        &mut self,
        e: &Expr,
        env: &RtEnv,
        store: &mut Vec<StoreVar>,
    ) -> Result<RtValue, RunError> {
        match &e.kind {
            ExprKind::Zero => Ok(RtValue::Num(0)),
            ExprKind::Succ(inner) => match self.eval(inner, env, store)? {
                RtValue::Num(n) => Ok(RtValue::Num(n + 1)),
                _ => Err(RunError::Stuck("s(...) of a non-numeral".to_string())),
            },
            ExprKind::Var(x) | ExprKind::LabelRef(x) => {
                let from_store = store
                    .iter()
                    .rev()
                    .find(|s| s.name == *x)
                    .map(|s| (s.seq, s.value.clone()));
                let from_env = env.get(x).map(|(seq, v)| (*seq, v.clone()));
                match (from_store, from_env) {
                    (Some((s1, v1)), Some((s2, v2))) => {
                        Ok(if s1 > s2 { v1 } else { v2 })
                    }
                    (Some((_, v)), None) | (None, Some((_, v))) => Ok(v),
                    (None, None) => Err(RunError::Stuck(format!("unbound variable `{x}`"))),
                }
            }
            ExprKind::Pack { comps, .. } => {
                let mut vs = Vec::with_capacity(comps.len());
                for c in comps {
                    vs.push(self.eval(c, env, store)?);
                }
                Ok(RtValue::Pack(vs))
            }
            ExprKind::ProcLit(lit) => Ok(RtValue::Proc {
                env: env.clone(),
                lit: Rc::new((**lit).clone()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;

    fn run_src(src: &str, inputs: &[u64]) -> Result<Vec<u64>, RunError> {
        let p = parse_program(src).expect("parse");
        run(&p, inputs)
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
    fn loops_run_their_bound_many_times() {
        assert_eq!(run_src(DOUBLE, &[0]).unwrap(), vec![0]);
        assert_eq!(run_src(DOUBLE, &[3]).unwrap(), vec![6]);
        assert_eq!(run_src(DOUBLE, &[7]).unwrap(), vec![14]);
    }

    #[test]
    fn jumps_deliver_their_payload_to_the_block_outputs() {
        let src = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  label k out (r : exists[m](nat(m))) {
    jump k (pack[s(n)](s(a)));
    r := pack[0](0);
  };
}
";
        assert_eq!(run_src(src, &[3]).unwrap(), vec![4]);
    }

    #[test]
    fn jumps_unwind_through_procedure_frames() {
        let src = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  label k out (r : exists[m](nat(m))) {
    call proc(in; out d : nat(0)) { jump k (pack[s(n)](s(a))); }(; t);
    r := pack[s(s(n))](s(s(a)));
  };
}
";
        assert_eq!(run_src(src, &[3]).unwrap(), vec![4]);
    }

    #[test]
    fn jumps_escape_loops_immediately() {
        let src = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  r := pack[0](0);
  label k out (r : exists[m](nat(m))) {
    for y := 0 until a invariant [i] (r : exists[m](nat(m))) {
      jump k (pack[s(s(0))](s(s(0))));
    };
    r := pack[s(0)](s(0));
  };
}
";
        // Zero iterations fall through; any iteration jumps.
        assert_eq!(run_src(src, &[0]).unwrap(), vec![1]);
        assert_eq!(run_src(src, &[5]).unwrap(), vec![2]);
    }

    #[test]
    fn procedure_variables_dispatch_to_their_current_body() {
        let src = "\
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
        assert_eq!(run_src(src, &[2]).unwrap(), vec![5]);
    }

    #[test]
    fn packages_unpack_positionally() {
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
        assert_eq!(run_src(src, &[3]).unwrap(), vec![4, 3]);
    }

    #[test]
    fn escaped_labels_are_a_runtime_error() {
        let src = "\
proc mk(in; out p : proc(in; out nat(s(0)))) {
  p := proc(in; out e2 : nat(s(0))) { e2 := s(0); };
  label k out (p : proc(in; out nat(s(0)))) {
    p := proc(in; out e2 : nat(s(0))) {
      jump k (proc(in; out e3 : nat(s(0))) { e3 := s(0); });
    };
  };
}

proc main(in; out r : nat(s(0))) {
  call mk(; q);
  call q(; r);
}
";
        assert_eq!(run_src(src, &[]), Err(RunError::EscapedLabel));
    }

    #[test]
    fn procedure_valued_outputs_cannot_be_printed() {
        let src = "\
proc main(in; out p : proc(in; out nat(0))) {
  p := proc(in; out d : nat(0)) { d := 0; };
}
";
        assert_eq!(run_src(src, &[]), Err(RunError::Unprintable));
    }

    #[test]
    fn loop_counters_shadow_outer_store_variables() {
        // `y` is both a mutable output (holding 1) and, inside the loop,
        // the counter; the counter is the nearer binding, so the jump in
        // the first iteration carries 0, not 1.
        let src = "\
proc main[n](in a : nat(n); out y : nat(s(0)), w : exists[m](nat(m))) {
  y := s(0);
  w := pack[0](0);
  label k out (w : exists[m](nat(m))) {
    for y := 0 until a invariant [i] (w : exists[m](nat(m))) {
      jump k (pack[i](y));
    };
    w := pack[0](0);
  };
}
";
        assert_eq!(run_src(src, &[4]).unwrap(), vec![1, 0]);
    }

    #[test]
    fn trace_snapshots_follow_each_statement() {
        let p = parse_program(DOUBLE).unwrap();
        let t = trace_run(&p, &[2]).unwrap();
        assert_eq!(t.outputs, vec![4]);
        // b := 0, two loop-body iterations, then the loop itself.
        assert_eq!(t.steps.len(), 4);
        let bs: Vec<u64> = t
            .steps
            .iter()
            .map(|(_, snap)| match snap.iter().find(|(n, _)| n == "b") {
                Some((_, RtValue::Num(v))) => *v,
                other => panic!("{other:?}"),
            })
            .collect();
        assert_eq!(bs, vec![0, 2, 4, 4]);
    }
}
