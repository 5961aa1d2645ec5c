//! Call-by-value evaluator for the functional core.
//!
//! Values are numerals, closures, and tuples (package values become
//! tuples during translation). Evaluation is environment-based with a
//! fuel counter; the translation images of checked programs always
//! terminate, so running out of fuel signals either a hand-written
//! diverging term or an astronomically large computation, and both are
//! reported rather than looped on.

use crate::ast::Name;
use crate::translate::{entry_term, CoreProgram, CoreTerm};
use std::fmt;
use std::rc::Rc;

#[derive(Debug, Clone)]
pub enum CoreValue {
    Num(u64),
    Closure(Rc<ClosureData>),
    Tuple(Rc<Vec<CoreValue>>),
}

#[derive(Debug)]
pub struct ClosureData {
    pub param: Name,
    pub body: CoreTerm,
    pub env: Env,
}

/// Persistent environment: a shared linked list, so closure capture is
/// one pointer copy.
#[derive(Debug, Clone)]
pub enum Env {
    Nil,
    Cons(Rc<(Name, CoreValue, Env)>),
}

impl Env {
    pub fn lookup(&self, name: &str) -> Option<&CoreValue> {
        let mut cur = self;
        while let Env::Cons(node) = cur {
            if node.0 == name {
                return Some(&node.1);
            }
            cur = &node.2;
        }
        None
    }

    pub fn extend(&self, name: Name, value: CoreValue) -> Env {
        Env::Cons(Rc::new((name, value, self.clone())))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// The term has no rule to proceed by (unbound variable, projection
    /// from a non-tuple, application of a non-function, ...).
    Stuck(String),
    FuelExceeded,
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::Stuck(msg) => write!(f, "evaluation is stuck: {msg}"),
            CoreError::FuelExceeded => write!(f, "evaluation exceeded its fuel budget"),
        }
    }
}

impl std::error::Error for CoreError {}

pub const DEFAULT_FUEL: u64 = 50_000_000;

pub fn eval(term: &CoreTerm, env: &Env, fuel: &mut u64) -> Result<CoreValue, CoreError> {
    if *fuel == 0 {
        return Err(CoreError::FuelExceeded);
    }
    *fuel -= 1;
    match term {
        CoreTerm::Var(x) => env
            .lookup(x)
            .cloned()
            .ok_or_else(|| CoreError::Stuck(format!("unbound variable `{x}`"))),
        CoreTerm::Lam(x, body) => Ok(CoreValue::Closure(Rc::new(ClosureData {
            param: x.clone(),
            body: (**body).clone(),
            env: env.clone(),
        }))),
        CoreTerm::App(f, a) => {
            let fv = eval(f, env, fuel)?;
            let av = eval(a, env, fuel)?;
            apply(&fv, av, fuel)
        }
        CoreTerm::Zero => Ok(CoreValue::Num(0)),
        CoreTerm::Succ(t) => match eval(t, env, fuel)? {
            CoreValue::Num(n) => Ok(CoreValue::Num(n + 1)),
            other => Err(CoreError::Stuck(format!(
                "succ applied to a non-numeral ({})",
                kind(&other)
            ))),
        },
        CoreTerm::NatIter(n, b, s) => {
            let count = match eval(n, env, fuel)? {
                CoreValue::Num(c) => c,
                other => {
                    return Err(CoreError::Stuck(format!(
                        "iteration count is not a numeral ({})",
                        kind(&other)
                    )))
                }
            };
            let mut acc = eval(b, env, fuel)?;
            let step = eval(s, env, fuel)?;
            for _ in 0..count {
                acc = apply(&step, acc, fuel)?;
            }
            Ok(acc)
        }
        CoreTerm::Tuple(ts) | CoreTerm::Pack(ts) => {
            let mut vs = Vec::with_capacity(ts.len());
            for t in ts {
                vs.push(eval(t, env, fuel)?);
            }
            Ok(CoreValue::Tuple(Rc::new(vs)))
        }
        CoreTerm::Proj(i, t) => match eval(t, env, fuel)? {
            CoreValue::Tuple(vs) => vs.get(*i).cloned().ok_or_else(|| {
                CoreError::Stuck(format!(
                    "projection index {i} out of range for a {}-tuple",
                    vs.len()
                ))
            }),
            other => Err(CoreError::Stuck(format!(
                "projection from a non-tuple ({})",
                kind(&other)
            ))),
        },
    }
}

pub fn apply(f: &CoreValue, arg: CoreValue, fuel: &mut u64) -> Result<CoreValue, CoreError> {
    match f {
        CoreValue::Closure(c) => {
            let env = c.env.extend(c.param.clone(), arg);
            eval(&c.body, &env, fuel)
        }
        other => Err(CoreError::Stuck(format!(
            "application of a non-function ({})",
            kind(other)
        ))),
    }
}

fn kind(v: &CoreValue) -> &'static str {
    match v {
        CoreValue::Num(_) => "numeral",
        CoreValue::Closure(_) => "function",
        CoreValue::Tuple(_) => "tuple",
    }
}

/// Evaluates the definitions in order (each sees the previous ones) and
/// runs the entry procedure on the given inputs. The result is the
/// tuple of entry outputs.
pub fn run_core(core: &CoreProgram, inputs: &[u64], mut fuel: u64) -> Result<CoreValue, CoreError> {
    let mut env = Env::Nil;
    for (name, term) in &core.defs {
        let v = eval(term, &env, &mut fuel)?;
        env = env.extend(name.clone(), v);
    }
    let t = entry_term(core, inputs);
    eval(&t, &env, &mut fuel)
}

/// Flattens a result value to decimal lines: numerals print themselves,
/// tuples flatten left to right, functions have no printable form.
pub fn flatten_value(v: &CoreValue, out: &mut Vec<u64>) -> Result<(), CoreError> {
    match v {
        CoreValue::Num(n) => {
            out.push(*n);
            Ok(())
        }
        CoreValue::Tuple(vs) => {
            for v in vs.iter() {
                flatten_value(v, out)?;
            }
            Ok(())
        }
        CoreValue::Closure(_) => Err(CoreError::Stuck(
            "a function value has no printable output form".to_string(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_program;
    use crate::translate::translate;

    fn run_src(src: &str, inputs: &[u64]) -> Vec<u64> {
        let p = parse_program(src).expect("parse");
        let report = crate::check::check_program(&p, &crate::check::CheckConfig::default());
        assert!(!report.has_errors(), "{:?}", report.diagnostics);
        let core = translate(&p).expect("translate");
        let v = run_core(&core, inputs, DEFAULT_FUEL).expect("run");
        let mut out = Vec::new();
        flatten_value(&v, &mut out).expect("flatten");
        out
    }

    #[test]
    fn numerals_and_projections_evaluate() {
        let mut fuel = 1000;
        let t = CoreTerm::Proj(
            1,
            Box::new(CoreTerm::Tuple(vec![
                CoreTerm::numeral(3),
                CoreTerm::numeral(7),
            ])),
        );
        match eval(&t, &Env::Nil, &mut fuel).unwrap() {
            CoreValue::Num(7) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nat_iter_applies_the_step_count_times() {
        let mut fuel = 1000;
        let t = CoreTerm::NatIter(
            Box::new(CoreTerm::numeral(3)),
            Box::new(CoreTerm::numeral(4)),
            Box::new(CoreTerm::Lam(
                "x".to_string(),
                Box::new(CoreTerm::Succ(Box::new(CoreTerm::Var("x".to_string())))),
            )),
        );
        match eval(&t, &Env::Nil, &mut fuel).unwrap() {
            CoreValue::Num(7) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn self_application_runs_out_of_fuel_instead_of_hanging() {
        let dup = CoreTerm::Lam(
            "x".to_string(),
            Box::new(CoreTerm::App(
                Box::new(CoreTerm::Var("x".to_string())),
                Box::new(CoreTerm::Var("x".to_string())),
            )),
        );
        let omega = CoreTerm::App(Box::new(dup.clone()), Box::new(dup));
        // Each beta step of this term nests another `eval` frame, so keep
        // the budget small enough to fail on fuel before it fails on stack.
        let mut fuel = 600;
        assert!(matches!(
            eval(&omega, &Env::Nil, &mut fuel),
            Err(CoreError::FuelExceeded)
        ));
    }

    #[test]
    fn applying_a_numeral_is_stuck() {
        let t = CoreTerm::App(
            Box::new(CoreTerm::Zero),
            Box::new(CoreTerm::Zero),
        );
        let mut fuel = 100;
        assert!(matches!(
            eval(&t, &Env::Nil, &mut fuel),
            Err(CoreError::Stuck(_))
        ));
    }

    #[test]
    fn compiled_loops_compute_their_source_semantics() {
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
        assert_eq!(run_src(src, &[0]), vec![0]);
        assert_eq!(run_src(src, &[3]), vec![6]);
        assert_eq!(run_src(src, &[5]), vec![10]);
    }

    #[test]
    fn compiled_jumps_escape_loops_and_frames() {
        let src = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  label k out (r : exists[m](nat(m))) {
    call proc(in; out d : nat(0)) { jump k (pack[s(n)](s(a))); }(; t);
    r := pack[s(s(n))](s(s(a)));
  };
}
";
        // The jump crosses the callee frame: the call's continuation
        // (which would compute s(s(a)) = 5) is abandoned in favor of the
        // payload s(a) = 4.
        assert_eq!(run_src(src, &[3]), vec![4]);
    }

    #[test]
    fn compiled_procedure_variables_dispatch_to_their_latest_body() {
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
        assert_eq!(run_src(src, &[2]), vec![5]);
    }

    #[test]
    fn packages_flatten_into_their_components() {
        let src = "\
proc main[n](in a : nat(n); out r : exists[m](nat(m))) {
  label k out (r : exists[m](nat(m))) {
    jump k (pack[s(n)](s(a)));
    r := pack[0](0);
  };
}
";
        assert_eq!(run_src(src, &[3]), vec![4]);
    }
}
