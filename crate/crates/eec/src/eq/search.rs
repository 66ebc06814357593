//! Single-step rule-instance enumeration and the bounded bidirectional
//! breadth-first search used when canonical forms disagree.
//!
//! Forward steps are the oriented rules of the normalizer plus the unit
//! collapses. Backward steps are the enumerable expansions: eta expansion at
//! function/product types, let introduction over a stoup-pluggable subterm
//! (the generalized let-eta laws read right to left), and single-occurrence
//! beta abstraction. The truly non-enumerable backward instances (e.g. V-1η
//! read right to left, which rewrites `*` to an arbitrary term of type `1`)
//! are deliberately absent; search remains sound and bounded.

use super::engine::{
    child, children_ctx, count_stoup, get_at, replace_at, try_beta, try_cc, try_eta,
    try_let_elim, Ctx,
};
use super::{Dir, Rule, TraceStep};
use crate::check::{checks_at, infer_sorted, TypedTerm};
use crate::syntax::*;
use std::collections::{HashMap, VecDeque};

/// One admissible single-step rewrite of a subject term.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub dir: Dir,
    /// The whole subject after the step.
    pub result: Term,
}

/// Exhaustively enumerate single-step rule applications at all paths of a
/// checked term, both directions. Every returned result re-checks at the
/// same judgement.
pub fn rewrite_candidates(tt: &TypedTerm) -> Vec<Candidate> {
    let ctx = Ctx::of_judgement(&tt.judgement);
    let subject = &tt.judgement.subject;
    let mut out = Vec::new();
    collect(&ctx, subject, subject, &mut Vec::new(), &mut out);
    let want = tt.judgement.ty.clone().normalized();
    out.retain(|c| {
        checks_at(
            &ctx.gamma,
            ctx.stoup.as_ref(),
            &c.result,
            &want,
        )
    });
    out
}

pub(crate) fn candidates_raw(ctx: &Ctx, subject: &Term) -> Vec<Candidate> {
    let mut out = Vec::new();
    collect(ctx, subject, subject, &mut Vec::new(), &mut out);
    out
}

fn push(
    out: &mut Vec<Candidate>,
    whole: &Term,
    path: &[usize],
    rule: Rule,
    dir: Dir,
    replacement: Term,
) {
    let result = replace_at(whole, path, replacement);
    out.push(Candidate {
        path: path.to_vec(),
        rule,
        dir,
        result,
    });
}

fn collect(ctx: &Ctx, whole: &Term, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Candidate>) {
    if let Some((rule, rep)) = try_beta(t) {
        push(out, whole, path, rule, Dir::Fwd, rep);
    }
    if let Some((rule, rep)) = try_cc(ctx, t) {
        push(out, whole, path, rule, Dir::Fwd, rep);
    }
    if let Some((rule, rep)) = try_let_elim(ctx, t) {
        push(out, whole, path, rule, Dir::Fwd, rep);
    }
    if let Some((rule, rep)) = try_eta(ctx, t) {
        push(out, whole, path, rule, Dir::Fwd, rep);
    }
    backward_at(ctx, whole, t, path, out);
    for (i, cctx) in children_ctx(ctx, t) {
        path.push(i);
        collect(&cctx, whole, child(t, i).unwrap(), path, out);
        path.pop();
    }
}

/// Backward (right-to-left) instances rooted at `t`.
fn backward_at(ctx: &Ctx, whole: &Term, t: &Term, path: &mut Vec<usize>, out: &mut Vec<Candidate>) {
    let ty = match infer_sorted(&ctx.gamma, ctx.stoup.as_ref(), t) {
        Some(ty) => ty.normalized(),
        None => return,
    };
    // Unit collapses (forward direction of the unit eta laws).
    match &ty {
        SortedType::Value(ValueType::Unit) if !matches!(t, Term::Star) => {
            push(out, whole, path, Rule::VUnitEta, Dir::Fwd, Term::Star);
        }
        SortedType::Comp(CompType::WithUnit) if !matches!(t, Term::CStar) => {
            push(out, whole, path, Rule::CUnitEta, Dir::Fwd, Term::CStar);
        }
        _ => {}
    }
    // Eta expansions.
    match &ty {
        SortedType::Value(ValueType::Prod(_, _)) if !matches!(t, Term::Pair(_, _)) => {
            push(
                out,
                whole,
                path,
                Rule::VProdEta,
                Dir::Bwd,
                pair(fst(t.clone()), snd(t.clone())),
            );
        }
        SortedType::Value(ValueType::Fun(a, _)) if !matches!(t, Term::Lam(_, _, _)) => {
            push(
                out,
                whole,
                path,
                Rule::VFunEta,
                Dir::Bwd,
                lam("x", (**a).clone(), app(t.shift(1), var(0))),
            );
        }
        SortedType::Value(ValueType::Lin(c, _)) if !matches!(t, Term::LinLam(_, _, _)) => {
            push(
                out,
                whole,
                path,
                Rule::LinEta,
                Dir::Bwd,
                linlam("z", (**c).clone(), app(t.clone(), Term::Stoup)),
            );
        }
        SortedType::Comp(CompType::With(_, _)) if !matches!(t, Term::CPair(_, _)) => {
            push(
                out,
                whole,
                path,
                Rule::CWithEta,
                Dir::Bwd,
                cpair(cfst(t.clone()), csnd(t.clone())),
            );
        }
        SortedType::Comp(CompType::Arrow(a, _)) if !matches!(t, Term::CLam(_, _, _)) => {
            push(
                out,
                whole,
                path,
                Rule::CArrowEta,
                Dir::Bwd,
                clam("x", (**a).clone(), app(t.shift(1), var(0))),
            );
        }
        _ => {}
    }
    // Let introductions and beta abstractions over binder-free positions.
    let node_comp = matches!(ty, SortedType::Comp(_));
    let positions = binder_free_positions(t);
    for p in positions {
        if p.is_empty() {
            continue;
        }
        let sub = match get_at(t, &p) {
            Some(s) => s.clone(),
            None => continue,
        };
        let sub_ty = infer_sorted(&ctx.gamma, ctx.stoup.as_ref(), &sub)
            .or_else(|| infer_sorted(&ctx.gamma, None, &sub));
        let Some(sub_ty) = sub_ty.map(|s| s.normalized()) else {
            continue;
        };
        let marked = replace_at(t, &p, Term::Stoup);
        let marker_only_stoup = count_stoup(&marked) == 1;
        if node_comp && marker_only_stoup {
            if let SortedType::Comp(c) = &sub_ty {
                // Generalized let-eta, right to left.
                match c {
                    CompType::TensorUnit => push(
                        out,
                        whole,
                        path,
                        Rule::ILetEta,
                        Dir::Bwd,
                        ilet(sub.clone(), marked.subst_stoup(&Term::Top)),
                    ),
                    CompType::Bang(_) => push(
                        out,
                        whole,
                        path,
                        Rule::BangLetEta,
                        Dir::Bwd,
                        banglet(
                            sub.clone(),
                            "x",
                            marked.shift(1).subst_stoup(&bang(var(0))),
                        ),
                    ),
                    CompType::Copower(_, _) => push(
                        out,
                        whole,
                        path,
                        Rule::TensorLetEta,
                        Dir::Bwd,
                        copowlet(
                            sub.clone(),
                            "x",
                            "y",
                            marked.shift(1).subst_stoup(&copow(var(0), Term::Stoup)),
                        ),
                    ),
                    CompType::Plus(a, b) => push(
                        out,
                        whole,
                        path,
                        Rule::PlusLetEta,
                        Dir::Bwd,
                        case(
                            sub.clone(),
                            "x",
                            marked.subst_stoup(&inl((**b).clone(), Term::Stoup)),
                            "y",
                            marked.subst_stoup(&inr((**a).clone(), Term::Stoup)),
                        ),
                    ),
                    _ => {}
                }
                // Linear beta abstraction.
                push(
                    out,
                    whole,
                    path,
                    Rule::LinBeta,
                    Dir::Bwd,
                    app(linlam("z", c.clone(), marked.clone()), sub.clone()),
                );
            }
        }
        // Value beta abstraction (one occurrence).
        if let SortedType::Value(a) = &sub_ty {
            let body = replace_at(&t.shift(1), &p, var(0));
            if node_comp {
                push(
                    out,
                    whole,
                    path,
                    Rule::CArrowBeta,
                    Dir::Bwd,
                    app(clam("x", a.clone(), body.clone()), sub.clone()),
                );
            } else {
                push(
                    out,
                    whole,
                    path,
                    Rule::VFunBeta,
                    Dir::Bwd,
                    app(lam("x", a.clone(), body), sub.clone()),
                );
            }
        }
    }
}

/// Proper subterm positions reachable without crossing any binder.
fn binder_free_positions(t: &Term) -> Vec<Vec<usize>> {
    fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        let kids: Vec<(usize, &Term)> = match t {
            Term::Pair(a, b)
            | Term::CPair(a, b)
            | Term::ILet(a, b)
            | Term::Copow(a, b)
            | Term::App(a, b) => vec![(0, &**a), (1, &**b)],
            Term::Fst(a)
            | Term::Snd(a)
            | Term::CFst(a)
            | Term::CSnd(a)
            | Term::Bang(a)
            | Term::Absurd(_, a)
            | Term::Inl(_, a)
            | Term::Inr(_, a) => vec![(0, &**a)],
            Term::BangLet(a, _, _) | Term::CopowLet(a, _, _, _) => vec![(0, &**a)],
            Term::Case(s, _, _, _, _) => vec![(0, &**s)],
            _ => vec![],
        };
        for (i, c) in kids {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

fn term_key(t: &Term) -> String {
    fn strip(t: &Term) -> Term {
        match t {
            Term::Lam(_, ty, a) => lam("", ty.clone(), strip(a)),
            Term::CLam(_, ty, a) => clam("", ty.clone(), strip(a)),
            Term::LinLam(_, ty, a) => linlam("", ty.clone(), strip(a)),
            Term::BangLet(a, _, b) => banglet(strip(a), "", strip(b)),
            Term::CopowLet(a, _, _, b) => copowlet(strip(a), "", "", strip(b)),
            Term::Case(s, _, a, _, b) => case(strip(s), "", strip(a), "", strip(b)),
            Term::Pair(a, b) => pair(strip(a), strip(b)),
            Term::CPair(a, b) => cpair(strip(a), strip(b)),
            Term::ILet(a, b) => ilet(strip(a), strip(b)),
            Term::Copow(a, b) => copow(strip(a), strip(b)),
            Term::App(a, b) => app(strip(a), strip(b)),
            Term::Fst(a) => fst(strip(a)),
            Term::Snd(a) => snd(strip(a)),
            Term::CFst(a) => cfst(strip(a)),
            Term::CSnd(a) => csnd(strip(a)),
            Term::Bang(a) => bang(strip(a)),
            Term::Absurd(c, a) => Term::Absurd(c.clone(), Box::new(strip(a))),
            Term::Inl(c, a) => Term::Inl(c.clone(), Box::new(strip(a))),
            Term::Inr(c, a) => Term::Inr(c.clone(), Box::new(strip(a))),
            leaf => leaf.clone(),
        }
    }
    serde_json::to_string(&strip(t)).expect("terms serialize")
}

struct Side {
    parents: HashMap<String, Option<(String, TraceStep)>>,
    queue: VecDeque<(String, Term)>,
}

impl Side {
    fn new(start: &Term) -> Side {
        let key = term_key(start);
        let mut parents = HashMap::new();
        parents.insert(key.clone(), None);
        let mut queue = VecDeque::new();
        queue.push_back((key, start.clone()));
        Side { parents, queue }
    }

    fn chain_to(&self, key: &str) -> Vec<TraceStep> {
        let mut steps = Vec::new();
        let mut cur = key.to_string();
        while let Some(Some((parent, step))) = self.parents.get(&cur) {
            steps.push(step.clone());
            cur = parent.clone();
        }
        steps.reverse();
        steps
    }
}

/// Meet-in-the-middle search between two normal forms of the same judgement.
/// Returns step chains from each input to the common term.
pub(crate) fn bidirectional(
    j: &Judgement,
    a: &Term,
    b: &Term,
    budget: usize,
) -> Option<(Vec<TraceStep>, Vec<TraceStep>)> {
    let ctx = Ctx::of_judgement(j);
    let want = j.ty.clone().normalized();
    let mut sides = [Side::new(a), Side::new(b)];
    if sides[0].parents.contains_key(&term_key(b)) {
        return Some((vec![], vec![]));
    }
    let mut expanded = 0usize;
    let mut meet: Option<String> = None;

    'outer: while expanded < budget
        && (!sides[0].queue.is_empty() || !sides[1].queue.is_empty())
    {
        let i = match (sides[0].queue.len(), sides[1].queue.len()) {
            (0, _) => 1,
            (_, 0) => 0,
            (l, r) => usize::from(l > r),
        };
        let (lo, hi) = sides.split_at_mut(1);
        let (side, other) = if i == 0 {
            (&mut lo[0], &mut hi[0])
        } else {
            (&mut hi[0], &mut lo[0])
        };
        let Some((parent_key, term)) = side.queue.pop_front() else {
            continue;
        };
        expanded += 1;
        for cand in candidates_raw(&ctx, &term) {
            if cand.dir == Dir::Bwd
                && !checks_at(&ctx.gamma, ctx.stoup.as_ref(), &cand.result, &want)
            {
                continue;
            }
            let k = term_key(&cand.result);
            if side.parents.contains_key(&k) {
                continue;
            }
            let step = TraceStep {
                path: cand.path,
                rule: cand.rule,
                dir: cand.dir,
                after: cand.result.clone(),
            };
            side.parents
                .insert(k.clone(), Some((parent_key.clone(), step)));
            let found = other.parents.contains_key(&k);
            side.queue.push_back((k.clone(), cand.result));
            if found {
                meet = Some(k);
                break 'outer;
            }
        }
    }
    let k = meet?;
    Some((sides[0].chain_to(&k), sides[1].chain_to(&k)))
}
