//! Export of verification conditions to SMT-LIB2.
//!
//! Each obligation becomes one `.smt2` file: a `Nat` datatype, one
//! uninterpreted function per declared symbol, the program's equations
//! as universally quantified assertions, the obligation's free index
//! variables as constants, its hypotheses asserted, and its goal
//! negated. The obligation is valid exactly when the script is
//! unsatisfiable, so any SMT solver with datatype support can be used
//! as an external referee for verdicts the built-in engine leaves open.

use crate::ast::{IndexFormula, IndexTerm, Program};
use crate::hoare::Obligation;
use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Writes one SMT-LIB2 file per obligation into `dir` (created if
/// missing) and returns the written paths in obligation order. Files are
/// named `<proc>_<k>.smt2` where `k` counts the obligations of that
/// procedure from 0 in source order.
pub fn emit_smt(
    program: &Program,
    obligations: &[Obligation],
    dir: &Path,
) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let prelude = prelude(program);
    let mut per_proc: Vec<(String, usize)> = Vec::new();
    let mut written = Vec::new();
    for ob in obligations {
        let k = match per_proc.iter_mut().find(|(p, _)| *p == ob.proc) {
            Some((_, k)) => {
                *k += 1;
                *k
            }
            None => {
                per_proc.push((ob.proc.clone(), 0));
                0
            }
        };
        let path = dir.join(format!("{}_{}.smt2", ob.proc, k));
        let mut out = std::fs::File::create(&path)?;
        write!(out, "{}", script(&prelude, ob))?;
        written.push(path);
    }
    Ok(written)
}

/// Renders the script for one obligation (the part after the shared
/// prelude varies per obligation).
pub fn script(prelude: &str, ob: &Obligation) -> String {
    let mut s = String::new();
    s.push_str(&format!("; rule: {}\n", ob.rule));
    s.push_str(&format!(
        "; goal: {}\n",
        crate::printer::formula_to_string(&ob.goal)
    ));
    s.push_str(prelude);
    let mut free = BTreeSet::new();
    for h in &ob.hyps {
        h.free_vars(&mut free);
    }
    ob.goal.free_vars(&mut free);
    for v in &free {
        s.push_str(&format!("(declare-const {} Nat)\n", sym(v)));
    }
    for h in &ob.hyps {
        s.push_str(&format!("(assert {})\n", formula(h)));
    }
    s.push_str(&format!("(assert (not {}))\n", formula(&ob.goal)));
    s.push_str("(check-sat)\n");
    s
}

/// The shared prelude: the Nat datatype, the declared symbols, and the
/// equations as quantified assertions.
pub fn prelude(program: &Program) -> String {
    let mut s = String::new();
    s.push_str("(declare-datatypes ((Nat 0)) (((zero) (succ (pred Nat)))))\n");
    for sig in &program.sigs {
        let args = vec!["Nat"; sig.arity].join(" ");
        s.push_str(&format!("(declare-fun {} ({}) Nat)\n", sym(&sig.name), args));
    }
    for eq in &program.equations {
        let mut vars = BTreeSet::new();
        eq.lhs.free_vars(&mut vars);
        let body = format!("(= {} {})", term(&eq.lhs), term(&eq.rhs));
        if vars.is_empty() {
            s.push_str(&format!("(assert {})\n", body));
        } else {
            let binders: Vec<String> = vars.iter().map(|v| format!("({} Nat)", sym(v))).collect();
            s.push_str(&format!(
                "(assert (forall ({}) {}))\n",
                binders.join(" "),
                body
            ));
        }
    }
    s
}

fn term(t: &IndexTerm) -> String {
    match t {
        IndexTerm::Var(x) => sym(x),
        IndexTerm::Zero => "zero".to_string(),
        IndexTerm::Succ(inner) => format!("(succ {})", term(inner)),
        IndexTerm::App(f, args) => {
            if args.is_empty() {
                sym(f)
            } else {
                let parts: Vec<String> = args.iter().map(term).collect();
                format!("({} {})", sym(f), parts.join(" "))
            }
        }
    }
}

fn formula(f: &IndexFormula) -> String {
    match f {
        IndexFormula::Truth => "true".to_string(),
        IndexFormula::Eq(a, b) => format!("(= {} {})", term(a), term(b)),
        IndexFormula::And(a, b) => format!("(and {} {})", formula(a), formula(b)),
        IndexFormula::Implies(a, b) => format!("(=> {} {})", formula(a), formula(b)),
        IndexFormula::Forall(x, body) => {
            format!("(forall (({} Nat)) {})", sym(x), formula(body))
        }
    }
}

/// User names that collide with SMT-LIB keywords or the Nat datatype
/// vocabulary are emitted as quoted symbols.
fn sym(name: &str) -> String {
    const RESERVED: &[&str] = &[
        "zero", "succ", "pred", "Nat", "true", "false", "and", "or", "not", "forall", "exists",
        "assert", "let", "ite", "distinct", "xor", "par", "as",
    ];
    if RESERVED.contains(&name) {
        format!("|{name}|")
    } else {
        name.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::{check_program, CheckConfig};
    use crate::parser::parse_program;

    fn scratch_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("loopw-smt-{}-{}", std::process::id(), tag));
        let _ = std::fs::remove_dir_all(&dir);
        dir
    }

    const CLAIMS: &str = "\
sig add/2;
eq add(0, m) = m;
eq add(s(n), m) = s(add(n, m));

proc main[n](in a : nat(n); out r : nat(n)) {
  claim add(0, n) = n;
  claim 0 = s(0);
  r := a;
}
";

    #[test]
    fn one_file_per_obligation_indexed_within_each_procedure() {
        let p = parse_program(CLAIMS).unwrap();
        let report = check_program(&p, &CheckConfig::default());
        assert_eq!(report.obligations.len(), 2);
        let dir = scratch_dir("naming");
        let files = emit_smt(&p, &report.obligations, &dir).unwrap();
        let names: Vec<String> = files
            .iter()
            .map(|f| f.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, vec!["main_0.smt2", "main_1.smt2"]);
        assert!(files.iter().all(|f| f.exists()));
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn scripts_negate_the_goal_over_the_axiomatized_equations() {
        let p = parse_program(CLAIMS).unwrap();
        let report = check_program(&p, &CheckConfig::default());
        let text = script(&prelude(&p), &report.obligations[0]);
        assert!(text.contains("(declare-datatypes ((Nat 0)) (((zero) (succ (pred Nat)))))"));
        assert!(text.contains("(declare-fun add (Nat Nat) Nat)"));
        assert!(text.contains("(assert (forall ((m Nat)) (= (add zero m) m)))"));
        assert!(text.contains("(assert (forall ((m Nat) (n Nat)) (= (add (succ n) m) (succ (add n m)))))"));
        assert!(text.contains("(declare-const n Nat)"));
        assert!(text.contains("(assert (not (= (add zero n) n)))"));
        assert!(text.trim_end().ends_with("(check-sat)"));
    }

    #[test]
    fn hypotheses_are_asserted_positively() {
        let p = parse_program(CLAIMS).unwrap();
        let report = check_program(&p, &CheckConfig::default());
        // The second claim's hypothesis slot holds the first claim.
        let text = script(&prelude(&p), &report.obligations[1]);
        assert!(text.contains("(assert (= (add zero n) n))"));
        assert!(text.contains("(assert (not (= zero (succ zero))))"));
    }

    #[test]
    fn reserved_smt_names_are_quoted() {
        let src = "\
sig not/1;
eq not(0) = s(0);
eq not(s(k)) = 0;

proc main(in; out r : nat(0)) {
  claim not(s(0)) = 0;
  r := 0;
}
";
        let p = parse_program(src).unwrap();
        let report = check_program(&p, &CheckConfig::default());
        let text = script(&prelude(&p), &report.obligations[0]);
        assert!(text.contains("(declare-fun |not| (Nat) Nat)"));
        assert!(text.contains("(assert (not (= (|not| (succ zero)) zero)))"));
    }
}
