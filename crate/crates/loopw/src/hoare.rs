//! The embedded Hoare-Floyd layer.
//!
//! Verification works through a single hidden assertion slot threaded
//! through each procedure body, as if every procedure took an extra
//! logical in/out parameter. `claim φ` emits the obligation
//! `slot ⊢ φ` and then overwrites the slot with φ; a call emits
//! `slot ⊢ pre` for the callee's precondition and loads the callee's
//! postcondition into the slot; a declared `post` becomes the final
//! obligation of the procedure. Obligations never influence checking or
//! evaluation — they are reported with a [`ProofStatus`] and nothing
//! else, so discharging them lazily, eagerly, or not at all yields the
//! same program behavior.

use crate::ast::{IndexFormula, Name, Program, Seq, Ty};
use crate::check::{self, CheckConfig};
use crate::diag::{Diagnostic, Span};
use crate::index::{is_data_mute, EqSystem, ProofStatus};

/// A Hoare triple over a statement sequence, together with the expected
/// outgoing types of the mutable environment.
#[derive(Debug, Clone, PartialEq)]
pub struct Triple {
    pub pre: IndexFormula,
    pub seq: Seq,
    pub omega_out: Vec<(Name, Ty)>,
    pub post: IndexFormula,
}

/// One verification condition: hypotheses ⊢ goal, with its source
/// position, the rule that produced it, and the discharge verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct Obligation {
    pub proc: Name,
    pub span: Span,
    pub rule: &'static str,
    pub hyps: Vec<IndexFormula>,
    pub goal: IndexFormula,
    pub status: ProofStatus,
}

/// Result of checking a triple: whether the end of the sequence is
/// reachable, the type diagnostics, and the collected obligations.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleResult {
    pub reachable: bool,
    pub diagnostics: Vec<Diagnostic>,
    pub obligations: Vec<Obligation>,
}

/// Checks `{pre} seq {post}` in the context of `program`, starting from
/// the given mutable environment (every entry initialized). The final
/// obligation `slot ⊢ post` is always emitted when the sequence can fall
/// through, and the outgoing environment is compared against
/// `t.omega_out`.
pub fn check_triple(program: &Program, omega: &[(Name, Ty)], t: &Triple, cfg: &CheckConfig) -> TripleResult {
    debug_assert!(is_data_mute(&t.pre) && is_data_mute(&t.post));
    check::check_triple_seq(program, omega, t, cfg)
}

/// The consequence rule: from `{pre} seq {post}` derive
/// `{new_pre} seq {new_post}`, at the price of the two obligations
/// `new_pre ⊢ pre` and `post ⊢ new_post`. The widened triple is honest
/// only when both obligations hold; their statuses are returned for the
/// caller to inspect.
pub fn apply_consequence(
    program: &Program,
    t: &Triple,
    new_pre: IndexFormula,
    new_post: IndexFormula,
    cfg: &CheckConfig,
) -> (Triple, [Obligation; 2]) {
    debug_assert!(is_data_mute(&new_pre) && is_data_mute(&new_post));
    let system = EqSystem::from_program(program, cfg.step_cap);
    let span = Span::new(0, 0);
    let strengthen = make_obligation(
        &system,
        cfg,
        "consequence-pre",
        span,
        vec![new_pre.clone()],
        t.pre.clone(),
    );
    let weaken = make_obligation(
        &system,
        cfg,
        "consequence-post",
        span,
        vec![t.post.clone()],
        new_post.clone(),
    );
    let widened = Triple {
        pre: new_pre,
        seq: t.seq.clone(),
        omega_out: t.omega_out.clone(),
        post: new_post,
    };
    (widened, [strengthen, weaken])
}

/// All verification conditions of a program, in source order: claim
/// obligations, callee-precondition obligations, and the final
/// postcondition obligation of every procedure that declares one.
pub fn vcgen(p: &Program, cfg: &CheckConfig) -> Vec<Obligation> {
    check::check_program(p, cfg).obligations
}

pub(crate) fn make_obligation(
    system: &EqSystem,
    cfg: &CheckConfig,
    rule: &'static str,
    span: Span,
    hyps: Vec<IndexFormula>,
    goal: IndexFormula,
) -> Obligation {
    let status = if cfg.discharge {
        system.entails(&hyps, &goal, cfg.bound)
    } else {
        ProofStatus::Unproven("skipped".to_string())
    };
    Obligation {
        proc: String::new(),
        span,
        rule,
        hyps,
        goal,
        status,
    }
}
