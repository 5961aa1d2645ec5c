//! The index-level equation engine.
//!
//! Index terms are first-order terms over `0`, `s(...)` and the function
//! symbols declared in the program signature; the program's equations are
//! oriented left-to-right and used as rewrite rules. Everything the
//! checker and verifier know about index equality funnels through this
//! module:
//!
//! * [`EqSystem::normalize`] rewrites a term to normal form with a
//!   leftmost-outermost strategy under a step cap,
//! * [`EqSystem::terms_equal`] compares two terms up to the equations,
//! * [`EqSystem::entails`] decides (partially) whether hypotheses entail a
//!   goal formula, combining substitution of variable-defining hypotheses,
//!   congruence closure and bounded counterexample search.
//!
//! `Proven` and `Refuted` are both sound: `Proven` is only reported when
//! the goal follows in every model of the equations over the naturals, and
//! `Refuted` only when a concrete valuation makes every hypothesis true
//! and the goal false. Everything else is `Unproven` with a reason.

use crate::ast::{fresh_name, IndexFormula, IndexTerm, Name, Program};
use std::collections::BTreeSet;

/// One oriented rewrite rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: IndexTerm,
    pub rhs: IndexTerm,
}

/// A program's equations packaged for rewriting.
#[derive(Debug, Clone)]
pub struct EqSystem {
    pub rules: Vec<Rule>,
    pub step_cap: usize,
}

/// Result of normalization; `capped` is set when the step budget ran out
/// before a normal form was reached, in which case `term` is merely the
/// last term reached (still provably equal to the input).
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub term: IndexTerm,
    pub capped: bool,
}

/// Three-valued verdict for equality and entailment queries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProofStatus {
    Proven,
    Refuted,
    Unproven(String),
}

impl ProofStatus {
    pub fn is_proven(&self) -> bool {
        matches!(self, ProofStatus::Proven)
    }

    pub fn label(&self) -> &'static str {
        match self {
            ProofStatus::Proven => "PROVEN",
            ProofStatus::Refuted => "REFUTED",
            ProofStatus::Unproven(_) => "UNPROVEN",
        }
    }
}

/// How many test valuations the bounded counterexample search will try
/// before giving up with "skipped".
const MAX_VALUATIONS: u64 = 20_000;

impl EqSystem {
    pub fn new(rules: Vec<Rule>, step_cap: usize) -> Self {
        EqSystem { rules, step_cap }
    }

    pub fn from_program(p: &Program, step_cap: usize) -> Self {
        let rules = p
            .equations
            .iter()
            .map(|eq| Rule {
                lhs: eq.lhs.clone(),
                rhs: eq.rhs.clone(),
            })
            .collect();
        EqSystem { rules, step_cap }
    }

    /// Rewrites `t` to normal form, contracting the leftmost-outermost
    /// redex first (root before children, children left to right), for at
    /// most `step_cap` steps.
    pub fn normalize(&self, t: &IndexTerm) -> Normalized {
        let mut current = t.clone();
        for _ in 0..self.step_cap {
            match self.step_outermost(&current) {
                Some(next) => current = next,
                None => {
                    return Normalized {
                        term: current,
                        capped: false,
                    }
                }
            }
        }
        // One more probe: if the term is already normal exactly at the
        // budget boundary, that is still a normal form.
        let capped = self.step_outermost(&current).is_some();
        Normalized {
            term: current,
            capped,
        }
    }

    /// Normalizes with the opposite strategy (children right to left, then
    /// the root). For terminating confluent systems this must agree with
    /// [`EqSystem::normalize`]; the test suites use it as an independent
    /// check on the main strategy.
    pub fn normalize_innermost(&self, t: &IndexTerm) -> Normalized {
        let mut current = t.clone();
        for _ in 0..self.step_cap {
            match self.step_innermost(&current) {
                Some(next) => current = next,
                None => {
                    return Normalized {
                        term: current,
                        capped: false,
                    }
                }
            }
        }
        let capped = self.step_innermost(&current).is_some();
        Normalized {
            term: current,
            capped,
        }
    }

    fn step_outermost(&self, t: &IndexTerm) -> Option<IndexTerm> {
        if let Some(reduced) = self.step_root(t) {
            return Some(reduced);
        }
        match t {
            IndexTerm::Var(_) | IndexTerm::Zero => None,
            IndexTerm::Succ(inner) => self.step_outermost(inner).map(IndexTerm::succ),
            IndexTerm::App(f, args) => {
                for (i, a) in args.iter().enumerate() {
                    if let Some(reduced) = self.step_outermost(a) {
                        let mut args2 = args.clone();
                        args2[i] = reduced;
                        return Some(IndexTerm::App(f.clone(), args2));
                    }
                }
                None
            }
        }
    }

    fn step_innermost(&self, t: &IndexTerm) -> Option<IndexTerm> {
        match t {
            IndexTerm::Var(_) | IndexTerm::Zero => {}
            IndexTerm::Succ(inner) => {
                if let Some(reduced) = self.step_innermost(inner) {
                    return Some(IndexTerm::succ(reduced));
                }
            }
            IndexTerm::App(f, args) => {
                for (i, a) in args.iter().enumerate().rev() {
                    if let Some(reduced) = self.step_innermost(a) {
                        let mut args2 = args.clone();
                        args2[i] = reduced;
                        return Some(IndexTerm::App(f.clone(), args2));
                    }
                }
            }
        }
        self.step_root(t)
    }

    fn step_root(&self, t: &IndexTerm) -> Option<IndexTerm> {
        for rule in &self.rules {
            let mut binds = Vec::new();
            if match_pattern(&rule.lhs, t, &mut binds) {
                return Some(rule.rhs.subst(&binds));
            }
        }
        None
    }

    /// Compares two terms up to the equations. `Proven` for identical
    /// normal forms, `Refuted` when both normalize to distinct closed
    /// numerals, `Unproven` otherwise.
    pub fn terms_equal(&self, a: &IndexTerm, b: &IndexTerm) -> ProofStatus {
        let na = self.normalize(a);
        let nb = self.normalize(b);
        if na.term == nb.term {
            return ProofStatus::Proven;
        }
        if na.capped || nb.capped {
            return ProofStatus::Unproven("cap".to_string());
        }
        match (na.term.as_numeral(), nb.term.as_numeral()) {
            (Some(x), Some(y)) if x != y => ProofStatus::Refuted,
            _ => ProofStatus::Unproven("open".to_string()),
        }
    }

    /// Decides (partially) whether the hypotheses entail the goal, over
    /// the naturals with the equations as axioms. The goal is decomposed
    /// structurally; equational goals are attacked by substituting
    /// variable-defining hypotheses, normalizing, congruence closure, and
    /// finally a counterexample search over valuations `0..=bound`.
    pub fn entails(&self, hyps: &[IndexFormula], goal: &IndexFormula, bound: u64) -> ProofStatus {
        match goal {
            IndexFormula::Truth => ProofStatus::Proven,
            IndexFormula::And(a, b) => {
                let left = self.entails(hyps, a, bound);
                let right = self.entails(hyps, b, bound);
                match (left, right) {
                    (ProofStatus::Refuted, _) | (_, ProofStatus::Refuted) => ProofStatus::Refuted,
                    (ProofStatus::Proven, ProofStatus::Proven) => ProofStatus::Proven,
                    (ProofStatus::Unproven(r), _) | (_, ProofStatus::Unproven(r)) => {
                        ProofStatus::Unproven(r)
                    }
                }
            }
            IndexFormula::Implies(a, b) => {
                let mut extended = hyps.to_vec();
                extended.push((**a).clone());
                self.entails(&extended, b, bound)
            }
            IndexFormula::Forall(x, body) => {
                let mut taken = BTreeSet::new();
                for h in hyps {
                    h.free_vars(&mut taken);
                }
                body.free_vars(&mut taken);
                let fresh = fresh_name(x, &taken);
                let renamed = body.subst(&[(x.clone(), IndexTerm::var(&fresh))]);
                self.entails(hyps, &renamed, bound)
            }
            IndexFormula::Eq(a, b) => self.entails_eq(hyps, a, b, bound),
        }
    }

    fn entails_eq(
        &self,
        hyps: &[IndexFormula],
        a: &IndexTerm,
        b: &IndexTerm,
        bound: u64,
    ) -> ProofStatus {
        let mut hyps = flatten_hyps(hyps);
        let mut goal_a = a.clone();
        let mut goal_b = b.clone();

        // Eliminate hypotheses of the form x = t (or t = x) with x not in
        // t by substituting t for x everywhere, until none remain.
        loop {
            let mut binding = None;
            for (i, h) in hyps.iter().enumerate() {
                if let IndexFormula::Eq(l, r) = h {
                    if let Some((x, t)) = defining_pair(l, r) {
                        binding = Some((i, x, t));
                        break;
                    }
                }
            }
            match binding {
                Some((i, x, t)) => {
                    hyps.remove(i);
                    let s = [(x, t)];
                    for h in hyps.iter_mut() {
                        *h = h.subst(&s);
                    }
                    goal_a = goal_a.subst(&s);
                    goal_b = goal_b.subst(&s);
                }
                None => break,
            }
        }

        let mut cap_hit = false;
        let na = self.normalize(&goal_a);
        let nb = self.normalize(&goal_b);
        cap_hit |= na.capped || nb.capped;
        if na.term == nb.term {
            return ProofStatus::Proven;
        }

        // Congruence closure over the subterms of the (normalized)
        // equational hypotheses and the goal.
        let mut eq_pairs = Vec::new();
        for h in &hyps {
            if let IndexFormula::Eq(l, r) = h {
                let nl = self.normalize(l);
                let nr = self.normalize(r);
                cap_hit |= nl.capped || nr.capped;
                if nl.term != nr.term {
                    eq_pairs.push((nl.term, nr.term));
                }
            }
        }
        if !eq_pairs.is_empty() {
            let mut cc = Congruence::new();
            for (l, r) in &eq_pairs {
                cc.intern(l);
                cc.intern(r);
            }
            let ia = cc.intern(&na.term);
            let ib = cc.intern(&nb.term);
            for (l, r) in &eq_pairs {
                let il = cc.intern(l);
                let ir = cc.intern(r);
                cc.union(il, ir);
            }
            cc.close();
            if cc.inconsistent() || cc.same(ia, ib) {
                return ProofStatus::Proven;
            }
        }

        // Counterexample search: try every valuation of the free
        // variables in 0..=bound. Refutation requires every hypothesis to
        // evaluate definitely true and the goal definitely false.
        let mut vars = BTreeSet::new();
        for h in &hyps {
            h.free_vars(&mut vars);
        }
        na.term.free_vars(&mut vars);
        nb.term.free_vars(&mut vars);
        let vars: Vec<Name> = vars.into_iter().collect();

        let mut total: u64 = 1;
        let mut skipped = false;
        for _ in &vars {
            total = total.saturating_mul(bound + 1);
            if total > MAX_VALUATIONS {
                skipped = true;
                break;
            }
        }
        if !skipped {
            let goal_formula = IndexFormula::Eq(na.term.clone(), nb.term.clone());
            let mut counters = vec![0u64; vars.len()];
            loop {
                let subst: Vec<(Name, IndexTerm)> = vars
                    .iter()
                    .zip(&counters)
                    .map(|(v, k)| (v.clone(), IndexTerm::numeral(*k)))
                    .collect();
                let hyps_true = hyps.iter().all(|h| {
                    self.eval_formula(&h.subst(&subst), bound, &mut cap_hit) == Some(true)
                });
                if hyps_true
                    && self.eval_formula(&goal_formula.subst(&subst), bound, &mut cap_hit)
                        == Some(false)
                {
                    return ProofStatus::Refuted;
                }
                // Advance the odometer; stop after the last valuation.
                let mut i = 0;
                loop {
                    if i == counters.len() {
                        return ProofStatus::Unproven(
                            if cap_hit { "cap" } else { "bounded" }.to_string(),
                        );
                    }
                    if counters[i] < bound {
                        counters[i] += 1;
                        break;
                    }
                    counters[i] = 0;
                    i += 1;
                }
            }
        }
        ProofStatus::Unproven(if cap_hit { "cap" } else { "skipped" }.to_string())
    }

    /// Three-valued evaluation of a closed formula. `Some(b)` means the
    /// formula definitely has truth value `b` over the naturals;
    /// `None` means evaluation was inconclusive (an equation got stuck, a
    /// step cap was hit, or a `forall` held throughout `0..=bound` without
    /// being discharged).
    fn eval_formula(&self, f: &IndexFormula, bound: u64, cap_hit: &mut bool) -> Option<bool> {
        match f {
            IndexFormula::Truth => Some(true),
            IndexFormula::Eq(a, b) => {
                let na = self.normalize(a);
                let nb = self.normalize(b);
                if na.term == nb.term {
                    return Some(true);
                }
                if na.capped || nb.capped {
                    *cap_hit = true;
                    return None;
                }
                match (na.term.as_numeral(), nb.term.as_numeral()) {
                    (Some(x), Some(y)) => Some(x == y),
                    _ => None,
                }
            }
            IndexFormula::And(a, b) => {
                match (
                    self.eval_formula(a, bound, cap_hit),
                    self.eval_formula(b, bound, cap_hit),
                ) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                }
            }
            IndexFormula::Implies(a, b) => {
                match (
                    self.eval_formula(a, bound, cap_hit),
                    self.eval_formula(b, bound, cap_hit),
                ) {
                    (Some(false), _) | (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                }
            }
            IndexFormula::Forall(x, body) => {
                let mut all_known = true;
                for k in 0..=bound {
                    let inst = body.subst(&[(x.clone(), IndexTerm::numeral(k))]);
                    match self.eval_formula(&inst, bound, cap_hit) {
                        Some(false) => return Some(false),
                        Some(true) => {}
                        None => all_known = false,
                    }
                }
                // True on every tested point is not true everywhere.
                let _ = all_known;
                None
            }
        }
    }
}

/// Whether a formula lies in the fragment whose truth is insensitive to
/// the runtime data flowing through a program (it may only speak about
/// index terms). The formula grammar here cannot express anything else,
/// so this is a constant guard point: if richer connectives are ever
/// added, this is where they must be fenced off.
pub fn is_data_mute(_f: &IndexFormula) -> bool {
    true
}

fn match_pattern(pat: &IndexTerm, t: &IndexTerm, binds: &mut Vec<(Name, IndexTerm)>) -> bool {
    match (pat, t) {
        (IndexTerm::Var(x), _) => {
            if let Some((_, prev)) = binds.iter().find(|(n, _)| n == x) {
                prev == t
            } else {
                binds.push((x.clone(), t.clone()));
                true
            }
        }
        (IndexTerm::Zero, IndexTerm::Zero) => true,
        (IndexTerm::Succ(p), IndexTerm::Succ(u)) => match_pattern(p, u, binds),
        (IndexTerm::App(f, ps), IndexTerm::App(g, us)) => {
            f == g && ps.len() == us.len() && ps.iter().zip(us).all(|(p, u)| match_pattern(p, u, binds))
        }
        _ => false,
    }
}

fn flatten_hyps(hyps: &[IndexFormula]) -> Vec<IndexFormula> {
    let mut out = Vec::new();
    fn go(f: &IndexFormula, out: &mut Vec<IndexFormula>) {
        match f {
            IndexFormula::Truth => {}
            IndexFormula::And(a, b) => {
                go(a, out);
                go(b, out);
            }
            other => out.push(other.clone()),
        }
    }
    for h in hyps {
        go(h, &mut out);
    }
    out
}

/// For a hypothesis `l = r`, returns `(x, t)` when one side is a variable
/// that does not occur in the other side.
fn defining_pair(l: &IndexTerm, r: &IndexTerm) -> Option<(Name, IndexTerm)> {
    let occurs = |x: &Name, t: &IndexTerm| {
        let mut vs = BTreeSet::new();
        t.free_vars(&mut vs);
        vs.contains(x)
    };
    if let IndexTerm::Var(x) = l {
        if !occurs(x, r) {
            return Some((x.clone(), r.clone()));
        }
    }
    if let IndexTerm::Var(x) = r {
        if !occurs(x, l) {
            return Some((x.clone(), l.clone()));
        }
    }
    None
}

/// Congruence closure over an interned subterm universe.
struct Congruence {
    terms: Vec<IndexTerm>,
    children: Vec<Vec<usize>>,
    parent: Vec<usize>,
}

impl Congruence {
    fn new() -> Self {
        Congruence {
            terms: Vec::new(),
            children: Vec::new(),
            parent: Vec::new(),
        }
    }

    /// Interns a term and all of its subterms, returning its node id.
    fn intern(&mut self, t: &IndexTerm) -> usize {
        let kids: Vec<usize> = match t {
            IndexTerm::Var(_) | IndexTerm::Zero => Vec::new(),
            IndexTerm::Succ(inner) => vec![self.intern(inner)],
            IndexTerm::App(_, args) => args.iter().map(|a| self.intern(a)).collect(),
        };
        if let Some(i) = self.terms.iter().position(|u| u == t) {
            return i;
        }
        self.terms.push(t.clone());
        self.children.push(kids);
        self.parent.push(self.terms.len() - 1);
        self.terms.len() - 1
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            self.parent[ra] = rb;
        }
    }

    fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Propagates congruence: nodes with the same head symbol whose
    /// children are pairwise equivalent get merged, to a fixpoint.
    fn close(&mut self) {
        loop {
            let mut changed = false;
            for i in 0..self.terms.len() {
                for j in (i + 1)..self.terms.len() {
                    if self.same(i, j) {
                        continue;
                    }
                    if !same_head(&self.terms[i], &self.terms[j]) {
                        continue;
                    }
                    let ci = self.children[i].clone();
                    let cj = self.children[j].clone();
                    if ci.len() == cj.len()
                        && ci.iter().zip(&cj).all(|(&a, &b)| self.same(a, b))
                    {
                        self.union(i, j);
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// True when some equivalence class contains terms that cannot be
    /// equal over the naturals: a zero next to a successor, or two
    /// distinct closed numerals. Inconsistent hypotheses entail anything.
    fn inconsistent(&mut self) -> bool {
        for i in 0..self.terms.len() {
            for j in (i + 1)..self.terms.len() {
                if !self.same(i, j) {
                    continue;
                }
                let (a, b) = (&self.terms[i], &self.terms[j]);
                let clash = matches!(
                    (a, b),
                    (IndexTerm::Zero, IndexTerm::Succ(_)) | (IndexTerm::Succ(_), IndexTerm::Zero)
                );
                let distinct_numerals = match (a.as_numeral(), b.as_numeral()) {
                    (Some(x), Some(y)) => x != y,
                    _ => false,
                };
                if clash || distinct_numerals {
                    return true;
                }
            }
        }
        false
    }
}

fn same_head(a: &IndexTerm, b: &IndexTerm) -> bool {
    match (a, b) {
        (IndexTerm::Zero, IndexTerm::Zero) => true,
        (IndexTerm::Succ(_), IndexTerm::Succ(_)) => true,
        (IndexTerm::App(f, _), IndexTerm::App(g, _)) => f == g,
        (IndexTerm::Var(x), IndexTerm::Var(y)) => x == y,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn add_rules() -> Vec<Rule> {
        vec![
            Rule {
                lhs: IndexTerm::app("add", vec![IndexTerm::Zero, IndexTerm::var("m")]),
                rhs: IndexTerm::var("m"),
            },
            Rule {
                lhs: IndexTerm::app(
                    "add",
                    vec![IndexTerm::succ(IndexTerm::var("n")), IndexTerm::var("m")],
                ),
                rhs: IndexTerm::succ(IndexTerm::app(
                    "add",
                    vec![IndexTerm::var("n"), IndexTerm::var("m")],
                )),
            },
        ]
    }

    fn arith_rules() -> Vec<Rule> {
        let mut rules = add_rules();
        rules.push(Rule {
            lhs: IndexTerm::app(
                "add",
                vec![IndexTerm::var("n"), IndexTerm::succ(IndexTerm::var("m"))],
            ),
            rhs: IndexTerm::succ(IndexTerm::app(
                "add",
                vec![IndexTerm::var("n"), IndexTerm::var("m")],
            )),
        });
        rules.push(Rule {
            lhs: IndexTerm::app("mul", vec![IndexTerm::Zero, IndexTerm::var("m")]),
            rhs: IndexTerm::Zero,
        });
        rules.push(Rule {
            lhs: IndexTerm::app(
                "mul",
                vec![IndexTerm::succ(IndexTerm::var("n")), IndexTerm::var("m")],
            ),
            rhs: IndexTerm::app(
                "add",
                vec![
                    IndexTerm::var("m"),
                    IndexTerm::app("mul", vec![IndexTerm::var("n"), IndexTerm::var("m")]),
                ],
            ),
        });
        rules
    }

    fn sys(rules: Vec<Rule>) -> EqSystem {
        EqSystem::new(rules, 10_000)
    }

    fn add(a: IndexTerm, b: IndexTerm) -> IndexTerm {
        IndexTerm::app("add", vec![a, b])
    }

    fn mul(a: IndexTerm, b: IndexTerm) -> IndexTerm {
        IndexTerm::app("mul", vec![a, b])
    }

    fn num(k: u64) -> IndexTerm {
        IndexTerm::numeral(k)
    }

    #[test]
    fn normalization_computes_sums_and_products() {
        let s = sys(arith_rules());
        // Values computed once by hand and frozen.
        let cases: Vec<(IndexTerm, u64)> = vec![
            (add(num(0), num(0)), 0),
            (add(num(2), num(1)), 3),
            (add(num(3), num(4)), 7),
            (mul(num(2), num(3)), 6),
            (mul(num(3), num(0)), 0),
            (mul(add(num(1), num(1)), num(2)), 4),
            (add(mul(num(2), num(2)), num(1)), 5),
        ];
        for (t, expected) in cases {
            let n = s.normalize(&t);
            assert!(!n.capped);
            assert_eq!(n.term.as_numeral(), Some(expected), "input {t}");
        }
    }

    #[test]
    fn open_terms_normalize_under_matching_rules_only() {
        let s = sys(add_rules());
        // add(0, m) -> m even with m free.
        let n = s.normalize(&add(num(0), IndexTerm::var("m")));
        assert_eq!(n.term, IndexTerm::var("m"));
        // add(m, 0) is stuck: no rule matches an open first argument.
        let stuck = add(IndexTerm::var("m"), num(0));
        let n = s.normalize(&stuck);
        assert_eq!(n.term, stuck);
    }

    #[test]
    fn step_cap_is_reported() {
        let looping = vec![Rule {
            lhs: IndexTerm::app("spin", vec![IndexTerm::var("n")]),
            rhs: IndexTerm::app("spin", vec![IndexTerm::var("n")]),
        }];
        let s = EqSystem::new(looping, 50);
        let n = s.normalize(&IndexTerm::app("spin", vec![num(0)]));
        assert!(n.capped);
    }

    #[test]
    fn innermost_strategy_agrees_on_terminating_systems() {
        let s = sys(arith_rules());
        let samples = vec![
            add(num(2), num(5)),
            mul(num(3), num(3)),
            mul(add(num(1), num(2)), add(num(0), num(2))),
            add(IndexTerm::var("x"), num(0)),
            add(num(0), mul(num(2), IndexTerm::var("x"))),
        ];
        for t in samples {
            assert_eq!(
                s.normalize(&t).term,
                s.normalize_innermost(&t).term,
                "strategies disagree on {t}"
            );
        }
    }

    /// Exhaustive one-step rewriting: every redex at every position.
    fn all_one_steps(s: &EqSystem, t: &IndexTerm) -> Vec<IndexTerm> {
        let mut out = Vec::new();
        for rule in &s.rules {
            let mut binds = Vec::new();
            if match_pattern(&rule.lhs, t, &mut binds) {
                out.push(rule.rhs.subst(&binds));
            }
        }
        match t {
            IndexTerm::Var(_) | IndexTerm::Zero => {}
            IndexTerm::Succ(inner) => {
                for r in all_one_steps(s, inner) {
                    out.push(IndexTerm::succ(r));
                }
            }
            IndexTerm::App(f, args) => {
                for (i, a) in args.iter().enumerate() {
                    for r in all_one_steps(s, a) {
                        let mut args2 = args.clone();
                        args2[i] = r;
                        out.push(IndexTerm::App(f.clone(), args2));
                    }
                }
            }
        }
        out
    }

    /// Breadth-first search of the whole rewrite graph, collecting every
    /// reachable normal form. Used as the ground-truth oracle: for the
    /// arithmetic system every term must have exactly one normal form,
    /// and both strategies must find it.
    fn bfs_normal_forms(s: &EqSystem, t: &IndexTerm) -> BTreeSet<IndexTerm> {
        let mut seen = BTreeSet::new();
        let mut queue = vec![t.clone()];
        let mut nfs = BTreeSet::new();
        while let Some(u) = queue.pop() {
            if !seen.insert(u.clone()) {
                continue;
            }
            let nexts = all_one_steps(s, &u);
            if nexts.is_empty() {
                nfs.insert(u);
            } else {
                queue.extend(nexts);
            }
        }
        nfs
    }

    #[test]
    fn every_strategy_reaches_the_unique_normal_form() {
        let s = sys(arith_rules());
        let samples = vec![
            add(num(1), num(2)),
            mul(num(2), num(2)),
            add(add(num(1), num(1)), num(1)),
            mul(num(1), add(num(1), num(1))),
            add(IndexTerm::var("x"), num(1)),
        ];
        for t in samples {
            let nfs = bfs_normal_forms(&s, &t);
            assert_eq!(nfs.len(), 1, "non-confluent behavior on {t}: {nfs:?}");
            let nf = nfs.into_iter().next().unwrap();
            assert_eq!(s.normalize(&t).term, nf);
            assert_eq!(s.normalize_innermost(&t).term, nf);
        }
    }

    #[test]
    fn terms_equal_distinguishes_the_three_outcomes() {
        let s = sys(add_rules());
        assert_eq!(
            s.terms_equal(&add(num(1), num(1)), &num(2)),
            ProofStatus::Proven
        );
        assert_eq!(s.terms_equal(&num(1), &num(2)), ProofStatus::Refuted);
        assert_eq!(
            s.terms_equal(&add(IndexTerm::var("n"), num(0)), &IndexTerm::var("n")),
            ProofStatus::Unproven("open".to_string())
        );
    }

    #[test]
    fn truth_is_always_entailed() {
        let s = sys(vec![]);
        assert_eq!(s.entails(&[], &IndexFormula::Truth, 8), ProofStatus::Proven);
    }

    #[test]
    fn defining_hypotheses_are_substituted() {
        let s = sys(add_rules());
        let hyp = IndexFormula::Eq(IndexTerm::var("n"), num(1));
        let goal = IndexFormula::Eq(add(IndexTerm::var("n"), IndexTerm::var("n")), num(2));
        assert_eq!(s.entails(&[hyp], &goal, 8), ProofStatus::Proven);
    }

    #[test]
    fn congruence_closure_lifts_hypotheses_through_contexts() {
        let s = sys(add_rules());
        // add(x, 0) is stuck, so only congruence can bridge the gap.
        let hyp = IndexFormula::Eq(add(IndexTerm::var("x"), num(0)), IndexTerm::var("y"));
        let goal = IndexFormula::Eq(
            IndexTerm::succ(add(IndexTerm::var("x"), num(0))),
            IndexTerm::succ(IndexTerm::var("y")),
        );
        assert_eq!(s.entails(&[hyp], &goal, 8), ProofStatus::Proven);
    }

    #[test]
    fn absurd_hypotheses_entail_anything() {
        let s = sys(vec![]);
        let hyp = IndexFormula::Eq(num(0), num(1));
        let goal = IndexFormula::Eq(num(0), num(2));
        assert_eq!(s.entails(&[hyp], &goal, 8), ProofStatus::Proven);
    }

    #[test]
    fn false_closed_goals_are_refuted() {
        let s = sys(add_rules());
        let goal = IndexFormula::Eq(num(0), num(1));
        assert_eq!(s.entails(&[], &goal, 8), ProofStatus::Refuted);
    }

    #[test]
    fn false_open_goals_are_refuted_by_testing() {
        let s = sys(add_rules());
        let goal = IndexFormula::Eq(add(IndexTerm::var("n"), num(0)), num(0));
        assert_eq!(s.entails(&[], &goal, 8), ProofStatus::Refuted);
    }

    #[test]
    fn true_but_stuck_goals_stay_unproven() {
        let s = sys(add_rules());
        // True over the naturals, but add recurses on its first argument
        // only, so neither rewriting nor testing can settle it.
        let goal = IndexFormula::Eq(add(IndexTerm::var("n"), num(0)), IndexTerm::var("n"));
        assert_eq!(
            s.entails(&[], &goal, 8),
            ProofStatus::Unproven("bounded".to_string())
        );
    }

    #[test]
    fn implication_introduces_its_hypothesis() {
        let s = sys(add_rules());
        let goal = IndexFormula::implies(
            IndexFormula::Eq(IndexTerm::var("n"), num(0)),
            IndexFormula::Eq(add(IndexTerm::var("n"), IndexTerm::var("n")), num(0)),
        );
        assert_eq!(s.entails(&[], &goal, 8), ProofStatus::Proven);
    }

    #[test]
    fn forall_goals_are_freshened() {
        let s = sys(add_rules());
        let goal = IndexFormula::forall(
            "k",
            IndexFormula::Eq(add(num(0), IndexTerm::var("k")), IndexTerm::var("k")),
        );
        assert_eq!(s.entails(&[], &goal, 8), ProofStatus::Proven);
        // The bound variable must not be captured by a hypothesis about a
        // variable of the same name.
        let hyp = IndexFormula::Eq(IndexTerm::var("k"), num(1));
        let bad_goal = IndexFormula::forall(
            "k",
            IndexFormula::Eq(IndexTerm::var("k"), num(1)),
        );
        assert_eq!(s.entails(&[hyp], &bad_goal, 8), ProofStatus::Refuted);
    }

    #[test]
    fn conjunction_splits_and_refutation_wins() {
        let s = sys(add_rules());
        let goal = IndexFormula::and(
            IndexFormula::Eq(num(0), num(0)),
            IndexFormula::Eq(num(0), num(1)),
        );
        assert_eq!(s.entails(&[], &goal, 8), ProofStatus::Refuted);
        let goal = IndexFormula::and(
            IndexFormula::Eq(num(0), num(0)),
            IndexFormula::Eq(num(1), num(1)),
        );
        assert_eq!(s.entails(&[], &goal, 8), ProofStatus::Proven);
    }

    #[test]
    fn quantified_hypotheses_do_not_enable_refutation() {
        let s = sys(vec![]);
        // The hypothesis is false (so the entailment is vacuously true),
        // but the prover does not decompose quantified hypotheses; it
        // must answer Unproven rather than guess.
        let hyp = IndexFormula::forall("k", IndexFormula::Eq(IndexTerm::var("k"), num(0)));
        let goal = IndexFormula::Eq(num(0), num(1));
        assert_eq!(
            s.entails(&[hyp], &goal, 8),
            ProofStatus::Unproven("bounded".to_string())
        );
    }

    #[test]
    fn capped_normalization_reports_cap() {
        let looping = vec![Rule {
            lhs: IndexTerm::app("spin", vec![IndexTerm::var("n")]),
            rhs: IndexTerm::app("spin", vec![IndexTerm::succ(IndexTerm::var("n"))]),
        }];
        let s = EqSystem::new(looping, 40);
        let goal = IndexFormula::Eq(IndexTerm::app("spin", vec![num(0)]), num(0));
        assert_eq!(
            s.entails(&[], &goal, 2),
            ProofStatus::Unproven("cap".to_string())
        );
    }

    #[test]
    fn too_many_valuations_are_skipped() {
        let s = sys(vec![]);
        // Seven free variables at bound 8 is 9^7 valuations, over the
        // testing budget.
        let mut lhs = IndexTerm::Zero;
        for v in ["a", "b", "c", "d", "e", "f", "g"] {
            lhs = IndexTerm::app("pair", vec![lhs, IndexTerm::var(v)]);
        }
        let goal = IndexFormula::Eq(lhs, num(0));
        assert_eq!(
            s.entails(&[], &goal, 8),
            ProofStatus::Unproven("skipped".to_string())
        );
    }

    #[test]
    fn every_formula_is_data_mute() {
        assert!(is_data_mute(&IndexFormula::Truth));
        assert!(is_data_mute(&IndexFormula::forall(
            "k",
            IndexFormula::Eq(IndexTerm::var("k"), IndexTerm::Zero)
        )));
    }
}
