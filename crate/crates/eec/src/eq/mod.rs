//! The equational theory as an oriented rewriting normalizer plus a bounded
//! bidirectional equality search with replayable proof traces.
//!
//! `check_eq` runs in phases: normalize both sides (beta, commuting
//! conversions, generalized let-eta elimination, eta contraction), then
//! canonicalize to eta-long form (type-directed expansion, unit collapse,
//! stoup expansion at positive stoup types), compare, and only if the
//! canonical forms differ fall back to a breadth-first search over
//! single-step rule applications in both directions. The engine is sound but
//! deliberately three-valued: `Unknown` is a first-class verdict.

mod engine;
mod search;

pub use engine::{canonicalize, normalize, normalize_subject, NormalizeOutcome};
pub use search::rewrite_candidates;

use crate::check::{check_judgement, TypeError, TypeErrorKind, TypedTerm};
use crate::syntax::Term;
use serde::{Deserialize, Serialize};

/// The 24 axiom schemes of the equational theory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Rule {
    VUnitEta,
    VProdBeta1,
    VProdBeta2,
    VProdEta,
    VFunBeta,
    VFunEta,
    CUnitEta,
    CWithBeta1,
    CWithBeta2,
    CWithEta,
    CArrowBeta,
    CArrowEta,
    IBeta,
    ILetEta,
    BangBeta,
    BangLetEta,
    TensorBeta,
    TensorLetEta,
    ZeroEta,
    PlusBeta1,
    PlusBeta2,
    PlusLetEta,
    LinBeta,
    LinEta,
}

pub const ALL_RULES: [Rule; 24] = [
    Rule::VUnitEta,
    Rule::VProdBeta1,
    Rule::VProdBeta2,
    Rule::VProdEta,
    Rule::VFunBeta,
    Rule::VFunEta,
    Rule::CUnitEta,
    Rule::CWithBeta1,
    Rule::CWithBeta2,
    Rule::CWithEta,
    Rule::CArrowBeta,
    Rule::CArrowEta,
    Rule::IBeta,
    Rule::ILetEta,
    Rule::BangBeta,
    Rule::BangLetEta,
    Rule::TensorBeta,
    Rule::TensorLetEta,
    Rule::ZeroEta,
    Rule::PlusBeta1,
    Rule::PlusBeta2,
    Rule::PlusLetEta,
    Rule::LinBeta,
    Rule::LinEta,
];

impl Rule {
    /// The identifier used in traces and reports.
    pub fn name(&self) -> &'static str {
        match self {
            Rule::VUnitEta => "V-1η",
            Rule::VProdBeta1 => "V-×β1",
            Rule::VProdBeta2 => "V-×β2",
            Rule::VProdEta => "V-×η",
            Rule::VFunBeta => "V-→β",
            Rule::VFunEta => "V-→η",
            Rule::CUnitEta => "C-1̲η",
            Rule::CWithBeta1 => "C-&β1",
            Rule::CWithBeta2 => "C-&β2",
            Rule::CWithEta => "C-&η",
            Rule::CArrowBeta => "C-⇒β",
            Rule::CArrowEta => "C-⇒η",
            Rule::IBeta => "I-β",
            Rule::ILetEta => "I-let-η",
            Rule::BangBeta => "!-β",
            Rule::BangLetEta => "!-let-η",
            Rule::TensorBeta => "⊗-β",
            Rule::TensorLetEta => "⊗-let-η",
            Rule::ZeroEta => "0̲-η",
            Rule::PlusBeta1 => "⊕-β1",
            Rule::PlusBeta2 => "⊕-β2",
            Rule::PlusLetEta => "⊕-let-η",
            Rule::LinBeta => "⊸-β",
            Rule::LinEta => "⊸-η",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Fwd,
    Bwd,
}

impl Dir {
    pub fn flip(&self) -> Dir {
        match self {
            Dir::Fwd => Dir::Bwd,
            Dir::Bwd => Dir::Fwd,
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            Dir::Fwd => "fwd",
            Dir::Bwd => "bwd",
        }
    }
}

/// One step of a proof trace: the rule instance applied at `path`, and the
/// whole subject after the step (recorded so a trace can be replayed and
/// re-checked mechanically).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub dir: Dir,
    pub after: Term,
}

impl TraceStep {
    /// The line-oriented text form: `STEP <path> <rule> <fwd|bwd>`.
    pub fn line(&self) -> String {
        let path = if self.path.is_empty() {
            "ε".to_string()
        } else {
            self.path
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(".")
        };
        format!("STEP {} {} {}", path, self.rule.name(), self.dir.name())
    }
}

pub fn trace_lines(steps: &[TraceStep]) -> String {
    steps.iter().map(|s| s.line() + "\n").collect()
}

/// Step budgets. `rewrite_steps` bounds normalization plus canonicalization
/// per side; `search_nodes` bounds the frontier of the bidirectional search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fuel {
    pub rewrite_steps: usize,
    pub search_nodes: usize,
}

impl Default for Fuel {
    fn default() -> Fuel {
        Fuel {
            rewrite_steps: 10_000,
            search_nodes: 20_000,
        }
    }
}

impl Fuel {
    pub fn rewrite(n: usize) -> Fuel {
        Fuel {
            rewrite_steps: n,
            search_nodes: 2 * n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EqVerdict {
    /// Provably equal, with a replayable step list from the left subject to
    /// the right subject.
    Proved(Vec<TraceStep>),
    /// Both sides normalized within fuel and their eta-long canonical forms
    /// differ. Strong evidence of inequality, not a proof.
    DistinctNormalForms(Term, Term),
    /// Fuel ran out before a decision.
    Unknown { steps_spent: usize },
}

impl EqVerdict {
    pub fn is_proved(&self) -> bool {
        matches!(self, EqVerdict::Proved(_))
    }
}

/// Decide provable equality of two judgements over the same context, stoup
/// and type. A differing judgement is an input error.
pub fn check_eq(a: &TypedTerm, b: &TypedTerm, fuel: Fuel) -> Result<EqVerdict, TypeError> {
    let ja = &a.judgement;
    let jb = &b.judgement;
    let gamma_match = ja.gamma.len() == jb.gamma.len()
        && ja
            .gamma
            .iter()
            .zip(&jb.gamma)
            .all(|((_, x), (_, y))| x == y);
    let stoup_match = match (&ja.stoup, &jb.stoup) {
        (None, None) => true,
        (Some((_, x)), Some((_, y))) => x == y,
        _ => false,
    };
    let ty_match = ja.ty.clone().normalized() == jb.ty.clone().normalized();
    if !gamma_match || !stoup_match || !ty_match {
        return Err(TypeError {
            kind: TypeErrorKind::Mismatch,
            path: vec![],
            expected: Some(crate::print::show_judgement(ja)),
            actual: Some(crate::print::show_judgement(jb)),
        });
    }

    let mut trace_a = Some(Vec::new());
    let na = engine::normalize_and_canon(ja, fuel.rewrite_steps, &mut trace_a);
    let mut trace_b = Some(Vec::new());
    let nb = engine::normalize_and_canon(jb, fuel.rewrite_steps, &mut trace_b);

    let spent = na.steps + nb.steps;
    if na.term.alpha_eq(&nb.term) {
        let steps = join_traces(
            &ja.subject,
            trace_a.unwrap(),
            &jb.subject,
            trace_b.unwrap(),
        );
        return Ok(EqVerdict::Proved(steps));
    }

    // Bounded bidirectional search between the two normal forms.
    if let Some((steps_a, steps_b)) =
        search::bidirectional(ja, &na.term, &nb.term, fuel.search_nodes)
    {
        let mut ta = trace_a.unwrap();
        ta.extend(steps_a);
        let mut tb = trace_b.unwrap();
        tb.extend(steps_b);
        let steps = join_traces(&ja.subject, ta, &jb.subject, tb);
        return Ok(EqVerdict::Proved(steps));
    }

    if na.complete && nb.complete {
        Ok(EqVerdict::DistinctNormalForms(na.term, nb.term))
    } else {
        Ok(EqVerdict::Unknown { steps_spent: spent })
    }
}

/// Join a trace from `a` to a common form with a trace from `b` to the same
/// form: the second half is replayed backwards with flipped directions.
fn join_traces(
    _a0: &Term,
    ta: Vec<TraceStep>,
    b0: &Term,
    tb: Vec<TraceStep>,
) -> Vec<TraceStep> {
    let mut steps = ta;
    // Walk b's trace backwards; each step's `after` becomes the predecessor.
    let mut terms = vec![b0.clone()];
    for s in &tb {
        terms.push(s.after.clone());
    }
    for (i, s) in tb.iter().enumerate().rev() {
        steps.push(TraceStep {
            path: s.path.clone(),
            rule: s.rule,
            dir: s.dir.flip(),
            after: terms[i].clone(),
        });
    }
    steps
}

/// Replay a Proved trace: every intermediate subject must re-check at the
/// same judgement, and the chain must start at `a` and end at `b`.
pub fn verify_trace(
    a: &TypedTerm,
    b: &TypedTerm,
    steps: &[TraceStep],
) -> Result<(), String> {
    let mut current = a.judgement.subject.clone();
    for (i, s) in steps.iter().enumerate() {
        let j = crate::syntax::Judgement {
            gamma: a.judgement.gamma.clone(),
            stoup: a.judgement.stoup.clone(),
            subject: s.after.clone(),
            ty: a.judgement.ty.clone(),
        };
        check_judgement(&j).map_err(|e| format!("step {i} ({}) does not re-check: {e}", s.line()))?;
        if current.alpha_eq(&s.after) {
            return Err(format!("step {i} ({}) is a no-op", s.line()));
        }
        current = s.after.clone();
    }
    if !current.alpha_eq(&b.judgement.subject) {
        return Err("trace does not end at the target subject".into());
    }
    Ok(())
}


