//! The oriented rewrite system and the eta-long canonicalizer.
//!
//! Phase 1 (`normalize`): beta and let-beta contractions, commuting
//! conversions hoisting let-style eliminators out of every stoup-threading
//! one-hole context, deterministic instances of the generalized let-eta laws
//! (a let whose bound data is reintroduced exactly once in stoup position is
//! collapsed), and eta contraction for the lambda and pair forms.
//!
//! Phase 2 (`canonicalize`): type-directed eta-long expansion. Terms of unit
//! type collapse; terms of product/function type are expanded unless already
//! introductions; a positive stoup (`I`, `!A`, `!A (*) B`, `C0`, `C (+) D`)
//! is eliminated at the root of the judgement, which realizes the
//! generalized let-eta laws as expansions. Every step is a recorded rule
//! instance, so traces replay.

use super::{Dir, Rule, TraceStep};
use crate::check::{checks_at, infer_sorted, TypedTerm};
use crate::syntax::*;

#[derive(Debug, Clone)]
pub(crate) struct Ctx {
    pub gamma: Vec<ValueType>,
    pub stoup: Option<CompType>,
}

impl Ctx {
    pub(crate) fn of_judgement(j: &Judgement) -> Ctx {
        Ctx {
            gamma: j.gamma.iter().map(|(_, t)| t.clone()).collect(),
            stoup: j.stoup.as_ref().map(|(_, t)| t.clone()),
        }
    }

    fn push(&self, ty: ValueType) -> Ctx {
        let mut g = self.gamma.clone();
        g.push(ty);
        Ctx {
            gamma: g,
            stoup: self.stoup.clone(),
        }
    }

    fn with_stoup(&self, s: Option<CompType>) -> Ctx {
        Ctx {
            gamma: self.gamma.clone(),
            stoup: s,
        }
    }

    fn infer(&self, t: &Term) -> Option<SortedType> {
        infer_sorted(&self.gamma, self.stoup.as_ref(), t)
    }

    fn infer_no_stoup(&self, t: &Term) -> Option<SortedType> {
        infer_sorted(&self.gamma, None, t)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Step {
    pub path: Vec<usize>,
    pub rule: Rule,
    pub dir: Dir,
    pub replacement: Term,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Mode {
    /// All phase-1 rules.
    Full,
    /// Beta and commuting conversions only; used to clean up after
    /// canonicalization steps without undoing them.
    BetaCc,
}

pub(crate) fn get_at<'a>(t: &'a Term, path: &[usize]) -> Option<&'a Term> {
    let mut cur = t;
    for &i in path {
        cur = child(cur, i)?;
    }
    Some(cur)
}

pub(crate) fn child(t: &Term, i: usize) -> Option<&Term> {
    match (t, i) {
        (Term::Pair(a, _), 0)
        | (Term::CPair(a, _), 0)
        | (Term::ILet(a, _), 0)
        | (Term::Copow(a, _), 0)
        | (Term::App(a, _), 0) => Some(a),
        (Term::Pair(_, b), 1)
        | (Term::CPair(_, b), 1)
        | (Term::ILet(_, b), 1)
        | (Term::Copow(_, b), 1)
        | (Term::App(_, b), 1) => Some(b),
        (Term::Fst(a), 0)
        | (Term::Snd(a), 0)
        | (Term::CFst(a), 0)
        | (Term::CSnd(a), 0)
        | (Term::Bang(a), 0)
        | (Term::Absurd(_, a), 0)
        | (Term::Inl(_, a), 0)
        | (Term::Inr(_, a), 0) => Some(a),
        (Term::Lam(_, _, a), 0) | (Term::CLam(_, _, a), 0) | (Term::LinLam(_, _, a), 0) => Some(a),
        (Term::BangLet(a, _, _), 0) | (Term::CopowLet(a, _, _, _), 0) => Some(a),
        (Term::BangLet(_, _, b), 1) | (Term::CopowLet(_, _, _, b), 1) => Some(b),
        (Term::Case(s, _, _, _, _), 0) => Some(s),
        (Term::Case(_, _, a, _, _), 1) => Some(a),
        (Term::Case(_, _, _, _, b), 2) => Some(b),
        _ => None,
    }
}

pub(crate) fn replace_at(t: &Term, path: &[usize], new: Term) -> Term {
    if path.is_empty() {
        return new;
    }
    let i = path[0];
    let rest = &path[1..];
    let r = |a: &Term| replace_at(a, rest, new.clone());
    match (t, i) {
        (Term::Pair(a, b), 0) => pair(r(a), (**b).clone()),
        (Term::Pair(a, b), 1) => pair((**a).clone(), r(b)),
        (Term::CPair(a, b), 0) => cpair(r(a), (**b).clone()),
        (Term::CPair(a, b), 1) => cpair((**a).clone(), r(b)),
        (Term::ILet(a, b), 0) => ilet(r(a), (**b).clone()),
        (Term::ILet(a, b), 1) => ilet((**a).clone(), r(b)),
        (Term::Copow(a, b), 0) => copow(r(a), (**b).clone()),
        (Term::Copow(a, b), 1) => copow((**a).clone(), r(b)),
        (Term::App(a, b), 0) => app(r(a), (**b).clone()),
        (Term::App(a, b), 1) => app((**a).clone(), r(b)),
        (Term::Fst(a), 0) => fst(r(a)),
        (Term::Snd(a), 0) => snd(r(a)),
        (Term::CFst(a), 0) => cfst(r(a)),
        (Term::CSnd(a), 0) => csnd(r(a)),
        (Term::Bang(a), 0) => bang(r(a)),
        (Term::Absurd(c, a), 0) => Term::Absurd(c.clone(), Box::new(r(a))),
        (Term::Inl(c, a), 0) => Term::Inl(c.clone(), Box::new(r(a))),
        (Term::Inr(c, a), 0) => Term::Inr(c.clone(), Box::new(r(a))),
        (Term::Lam(h, ty, a), 0) => lam(h, ty.clone(), r(a)),
        (Term::CLam(h, ty, a), 0) => clam(h, ty.clone(), r(a)),
        (Term::LinLam(h, ty, a), 0) => linlam(h, ty.clone(), r(a)),
        (Term::BangLet(a, h, b), 0) => banglet(r(a), h, (**b).clone()),
        (Term::BangLet(a, h, b), 1) => banglet((**a).clone(), h, r(b)),
        (Term::CopowLet(a, hx, hy, b), 0) => {
            Term::CopowLet(Box::new(r(a)), hx.clone(), hy.clone(), b.clone())
        }
        (Term::CopowLet(a, hx, hy, b), 1) => {
            Term::CopowLet(a.clone(), hx.clone(), hy.clone(), Box::new(r(b)))
        }
        (Term::Case(s, hx, a, hy, b), 0) => {
            Term::Case(Box::new(r(s)), hx.clone(), a.clone(), hy.clone(), b.clone())
        }
        (Term::Case(s, hx, a, hy, b), 1) => {
            Term::Case(s.clone(), hx.clone(), Box::new(r(a)), hy.clone(), b.clone())
        }
        (Term::Case(s, hx, a, hy, b), 2) => {
            Term::Case(s.clone(), hx.clone(), a.clone(), hy.clone(), Box::new(r(b)))
        }
        _ => panic!("replace_at: path does not exist"),
    }
}

/// Count occurrences of the ambient stoup variable.
pub(crate) fn count_stoup(t: &Term) -> usize {
    match t {
        Term::Stoup => 1,
        Term::Var(_) | Term::Star | Term::CStar | Term::Top => 0,
        Term::Pair(a, b)
        | Term::CPair(a, b)
        | Term::ILet(a, b)
        | Term::Copow(a, b)
        | Term::App(a, b) => count_stoup(a) + count_stoup(b),
        Term::Fst(a)
        | Term::Snd(a)
        | Term::CFst(a)
        | Term::CSnd(a)
        | Term::Bang(a)
        | Term::Absurd(_, a)
        | Term::Inl(_, a)
        | Term::Inr(_, a) => count_stoup(a),
        Term::Lam(_, _, a) | Term::CLam(_, _, a) => count_stoup(a),
        Term::LinLam(_, _, _) => 0,
        Term::BangLet(a, _, b) => count_stoup(a) + count_stoup(b),
        Term::CopowLet(a, _, _, _) => count_stoup(a),
        Term::Case(s, _, _, _, _) => count_stoup(s),
    }
}

/// Positions (path, value-binder depth) satisfying `pred`, in pre-order,
/// skipping the interiors of stoup rebinders (their stoup is not ours).
fn pattern_positions(t: &Term, pred: &impl Fn(&Term, usize) -> bool) -> Vec<Vec<usize>> {
    fn go(
        t: &Term,
        depth: usize,
        path: &mut Vec<usize>,
        pred: &impl Fn(&Term, usize) -> bool,
        out: &mut Vec<Vec<usize>>,
    ) {
        if pred(t, depth) {
            out.push(path.clone());
        }
        let kids: &[(usize, &Term, usize)] = &match t {
            Term::Pair(a, b)
            | Term::CPair(a, b)
            | Term::ILet(a, b)
            | Term::Copow(a, b)
            | Term::App(a, b) => vec![(0, &**a, 0), (1, &**b, 0)],
            Term::Fst(a)
            | Term::Snd(a)
            | Term::CFst(a)
            | Term::CSnd(a)
            | Term::Bang(a)
            | Term::Absurd(_, a)
            | Term::Inl(_, a)
            | Term::Inr(_, a) => vec![(0, &**a, 0)],
            Term::Lam(_, _, a) | Term::CLam(_, _, a) => vec![(0, &**a, 1)],
            Term::BangLet(a, _, b) => vec![(0, &**a, 0), (1, &**b, 1)],
            // Stoup rebinders: only the subject is ours.
            Term::CopowLet(a, _, _, _) => vec![(0, &**a, 0)],
            Term::Case(s, _, _, _, _) => vec![(0, &**s, 0)],
            Term::LinLam(_, _, _) => vec![],
            _ => vec![],
        };
        for (i, c, extra) in kids {
            path.push(*i);
            go(c, depth + extra, path, pred, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(t, 0, &mut Vec::new(), pred, &mut out);
    out
}

// ---- phase 1: oriented rewriting ----

pub(crate) fn try_beta(t: &Term) -> Option<(Rule, Term)> {
    match t {
        Term::App(s, u) => match &**s {
            Term::Lam(_, _, b) => Some((Rule::VFunBeta, b.subst_value(0, u))),
            Term::CLam(_, _, b) => Some((Rule::CArrowBeta, b.subst_value(0, u))),
            Term::LinLam(_, _, b) => Some((Rule::LinBeta, b.subst_stoup(u))),
            _ => None,
        },
        Term::Fst(p) => match &**p {
            Term::Pair(a, _) => Some((Rule::VProdBeta1, (**a).clone())),
            _ => None,
        },
        Term::Snd(p) => match &**p {
            Term::Pair(_, b) => Some((Rule::VProdBeta2, (**b).clone())),
            _ => None,
        },
        Term::CFst(p) => match &**p {
            Term::CPair(a, _) => Some((Rule::CWithBeta1, (**a).clone())),
            _ => None,
        },
        Term::CSnd(p) => match &**p {
            Term::CPair(_, b) => Some((Rule::CWithBeta2, (**b).clone())),
            _ => None,
        },
        Term::ILet(s, u) => match &**s {
            Term::Top => Some((Rule::IBeta, (**u).clone())),
            _ => None,
        },
        Term::BangLet(s, _, u) => match &**s {
            Term::Bang(t1) => Some((Rule::BangBeta, u.subst_value(0, t1))),
            _ => None,
        },
        Term::CopowLet(s, _, _, u) => match &**s {
            Term::Copow(t1, s1) => {
                Some((Rule::TensorBeta, u.subst_value(0, t1).subst_stoup(s1)))
            }
            _ => None,
        },
        Term::Case(s, _, a, _, b) => match &**s {
            Term::Inl(_, t1) => Some((Rule::PlusBeta1, a.subst_stoup(t1))),
            Term::Inr(_, t1) => Some((Rule::PlusBeta2, b.subst_stoup(t1))),
            _ => None,
        },
        _ => None,
    }
}

fn is_hoistable_let(t: &Term) -> bool {
    matches!(
        t,
        Term::ILet(_, _) | Term::BangLet(_, _, _) | Term::CopowLet(_, _, _, _) | Term::Case(_, _, _, _, _)
    )
}

/// Identify `t` as a stoup-threading one-hole context over child `pi`, for
/// commuting-conversion purposes. Returns the rebuild shift policy too.
fn principal_child(ctx: &Ctx, t: &Term) -> Option<usize> {
    match t {
        Term::CFst(_) | Term::CSnd(_) | Term::Absurd(_, _) | Term::Inl(_, _) | Term::Inr(_, _) => {
            Some(0)
        }
        Term::ILet(_, _)
        | Term::BangLet(_, _, _)
        | Term::CopowLet(_, _, _, _)
        | Term::Case(_, _, _, _, _) => Some(0),
        Term::Copow(_, _) => Some(1),
        Term::App(s, a) => {
            // A let-form in function position is necessarily a => application.
            if is_hoistable_let(s) || matches!(**s, Term::Absurd(_, _)) {
                return Some(0);
            }
            if is_hoistable_let(a) || matches!(**a, Term::Absurd(_, _)) {
                // Argument position threads the stoup only for -o application.
                if let Some(SortedType::Value(ValueType::Lin(_, _))) = ctx.infer_no_stoup(s) {
                    return Some(1);
                }
            }
            None
        }
        _ => None,
    }
}

/// Rebuild `t` with child `pi` replaced by `hole` and the other children
/// shifted by `k` (they move under `k` new value binders).
fn refill(t: &Term, pi: usize, hole: Term, k: isize) -> Term {
    let sh = |x: &Term| if k == 0 { x.clone() } else { x.shift(k) };
    match (t, pi) {
        (Term::CFst(_), 0) => cfst(hole),
        (Term::CSnd(_), 0) => csnd(hole),
        (Term::Absurd(c, _), 0) => Term::Absurd(c.clone(), Box::new(hole)),
        (Term::Inl(c, _), 0) => Term::Inl(c.clone(), Box::new(hole)),
        (Term::Inr(c, _), 0) => Term::Inr(c.clone(), Box::new(hole)),
        (Term::ILet(_, u), 0) => ilet(hole, sh(u)),
        (Term::BangLet(_, h, u), 0) => banglet(hole, h, sh(u)),
        (Term::CopowLet(_, hx, hy, u), 0) => {
            Term::CopowLet(Box::new(hole), hx.clone(), hy.clone(), Box::new(sh(u)))
        }
        (Term::Case(_, hx, a, hy, b), 0) => Term::Case(
            Box::new(hole),
            hx.clone(),
            Box::new(sh(a)),
            hy.clone(),
            Box::new(sh(b)),
        ),
        (Term::Copow(v, _), 1) => copow(sh(v), hole),
        (Term::App(_, a), 0) => app(hole, sh(a)),
        (Term::App(s, _), 1) => app(sh(s), hole),
        _ => panic!("refill: not a context node"),
    }
}

/// Commuting conversion: hoist a let-style eliminator out of a
/// stoup-threading context, or absorb the context into an `absurd`.
pub(crate) fn try_cc(ctx: &Ctx, t: &Term) -> Option<(Rule, Term)> {
    let pi = principal_child(ctx, t)?;
    let inner = child(t, pi)?.clone();
    match inner {
        Term::Absurd(_, n) => {
            // The whole context collapses; its result type reannotates.
            let ty = match ctx.infer(t)? {
                SortedType::Comp(c) => c,
                SortedType::Value(ValueType::Embed(c)) => *c,
                _ => return None,
            };
            Some((Rule::ZeroEta, Term::Absurd(Some(ty), n)))
        }
        Term::ILet(s, u) => Some((Rule::ILetEta, ilet((*s).clone(), refill(t, pi, (*u).clone(), 0)))),
        Term::BangLet(s, h, u) => Some((
            Rule::BangLetEta,
            banglet((*s).clone(), &h, refill(t, pi, (*u).clone(), 1)),
        )),
        Term::CopowLet(s, hx, hy, u) => Some((
            Rule::TensorLetEta,
            Term::CopowLet(
                s.clone(),
                hx,
                hy,
                Box::new(refill(t, pi, (*u).clone(), 1)),
            ),
        )),
        Term::Case(s, hx, a, hy, b) => Some((
            Rule::PlusLetEta,
            Term::Case(
                s.clone(),
                hx,
                Box::new(refill(t, pi, (*a).clone(), 0)),
                hy,
                Box::new(refill(t, pi, (*b).clone(), 0)),
            ),
        )),
        _ => None,
    }
}

/// Deterministic instances of the generalized let-eta laws, oriented as let
/// elimination: the eliminated data is reintroduced exactly once, in stoup
/// position, so the let can be collapsed around it.
pub(crate) fn try_let_elim(ctx: &Ctx, t: &Term) -> Option<(Rule, Term)> {
    let node_type = |ctx: &Ctx, t: &Term| -> Option<SortedType> {
        match ctx.infer(t)? {
            SortedType::Comp(c) => Some(SortedType::Comp(c)),
            SortedType::Value(ValueType::Embed(c)) => Some(SortedType::Comp(*c)),
            _ => None,
        }
    };
    match t {
        Term::ILet(s, u) => {
            if matches!(**s, Term::Top) {
                return None; // beta handles it
            }
            let spots = pattern_positions(u, &|n, _| matches!(n, Term::Top));
            if spots.is_empty() {
                return None;
            }
            let want = node_type(ctx, t)?;
            for p in spots {
                let marked = replace_at(u, &p, Term::Stoup);
                if !marked.subst_stoup(&Term::Top).alpha_eq(u) {
                    continue;
                }
                if checks_at(&ctx.gamma, Some(&CompType::TensorUnit), &marked, &want) {
                    return Some((Rule::ILetEta, marked.subst_stoup(s)));
                }
            }
            None
        }
        Term::BangLet(s, _, u) => {
            if matches!(**s, Term::Bang(_)) {
                return None;
            }
            if u.count_free_var(0) != 1 {
                return None;
            }
            let spots = pattern_positions(u, &|n, d| match n {
                Term::Bang(inner) => matches!(**inner, Term::Var(i) if i == d),
                _ => false,
            });
            if spots.is_empty() {
                return None;
            }
            let want = node_type(ctx, t)?;
            let a = match ctx.infer(s)? {
                SortedType::Comp(CompType::Bang(a)) => *a,
                _ => return None,
            };
            for p in spots {
                let marked = replace_at(u, &p, Term::Stoup);
                if marked.count_free_var(0) != 0 {
                    continue;
                }
                let strengthened = marked.subst_value(0, &Term::Star);
                if checks_at(
                    &ctx.gamma,
                    Some(&CompType::bang(a.clone())),
                    &strengthened,
                    &want,
                ) {
                    return Some((Rule::BangLetEta, strengthened.subst_stoup(s)));
                }
            }
            None
        }
        Term::CopowLet(s, _, _, u) => {
            if matches!(**s, Term::Copow(_, _)) {
                return None;
            }
            if u.count_free_var(0) != 1 || count_stoup(u) != 1 {
                return None;
            }
            let spots = pattern_positions(u, &|n, d| match n {
                Term::Copow(x, y) => {
                    matches!(**x, Term::Var(i) if i == d) && matches!(**y, Term::Stoup)
                }
                _ => false,
            });
            if spots.is_empty() {
                return None;
            }
            let want = node_type(ctx, t)?;
            let (a, b) = match ctx.infer(s)? {
                SortedType::Comp(CompType::Copower(a, b)) => (*a, *b),
                _ => return None,
            };
            for p in spots {
                let marked = replace_at(u, &p, Term::Stoup);
                if marked.count_free_var(0) != 0 || count_stoup(&marked) != 1 {
                    continue;
                }
                let strengthened = marked.subst_value(0, &Term::Star);
                if checks_at(
                    &ctx.gamma,
                    Some(&CompType::copower(a.clone(), b.clone())),
                    &strengthened,
                    &want,
                ) {
                    return Some((Rule::TensorLetEta, strengthened.subst_stoup(s)));
                }
            }
            None
        }
        Term::Case(s, _, left, _, right) => {
            if matches!(**s, Term::Inl(_, _) | Term::Inr(_, _)) {
                return None;
            }
            if count_stoup(left) != 1 || count_stoup(right) != 1 {
                return None;
            }
            let spots = pattern_positions(left, &|n, _| {
                matches!(n, Term::Inl(_, inner) if matches!(**inner, Term::Stoup))
            });
            if spots.is_empty() {
                return None;
            }
            let want = node_type(ctx, t)?;
            let (a, b) = match ctx.infer(s)? {
                SortedType::Comp(CompType::Plus(a, b)) => (*a, *b),
                _ => return None,
            };
            for p in spots {
                match get_at(right, &p) {
                    Some(Term::Inr(_, inner)) if matches!(**inner, Term::Stoup) => {}
                    _ => continue,
                }
                let lm = replace_at(left, &p, Term::Stoup);
                let rm = replace_at(right, &p, Term::Stoup);
                if !lm.alpha_eq(&rm) {
                    continue;
                }
                if checks_at(
                    &ctx.gamma,
                    Some(&CompType::plus(a.clone(), b.clone())),
                    &lm,
                    &want,
                ) {
                    return Some((Rule::PlusLetEta, lm.subst_stoup(s)));
                }
            }
            None
        }
        _ => None,
    }
}

pub(crate) fn try_eta(ctx: &Ctx, t: &Term) -> Option<(Rule, Term)> {
    match t {
        Term::Lam(_, a, body) => match &**body {
            Term::App(f, x)
                if matches!(**x, Term::Var(0)) && !f.has_free_var(0) =>
            {
                let inner = ctx.push(a.clone()).with_stoup(None);
                match inner.infer_no_stoup(f) {
                    Some(SortedType::Value(ValueType::Fun(_, _))) => {
                        Some((Rule::VFunEta, f.shift(-1)))
                    }
                    _ => None,
                }
            }
            _ => None,
        },
        Term::CLam(_, a, body) => match &**body {
            Term::App(f, x)
                if matches!(**x, Term::Var(0)) && !f.has_free_var(0) =>
            {
                let inner = ctx.push(a.clone());
                match inner.infer(f) {
                    Some(SortedType::Comp(CompType::Arrow(_, _))) => {
                        Some((Rule::CArrowEta, f.shift(-1)))
                    }
                    _ => None,
                }
            }
            _ => None,
        },
        Term::LinLam(_, _, body) => match &**body {
            Term::App(f, x) if matches!(**x, Term::Stoup) && !f.mentions_stoup() => {
                Some((Rule::LinEta, (**f).clone()))
            }
            _ => None,
        },
        Term::Pair(a, b) => match (&**a, &**b) {
            (Term::Fst(x), Term::Snd(y)) if x.alpha_eq(y) => {
                Some((Rule::VProdEta, (**x).clone()))
            }
            _ => None,
        },
        Term::CPair(a, b) => match (&**a, &**b) {
            (Term::CFst(x), Term::CSnd(y)) if x.alpha_eq(y) => {
                Some((Rule::CWithEta, (**x).clone()))
            }
            _ => None,
        },
        _ => None,
    }
}

/// Children of `t` with their contexts, in path order. Children whose
/// context would require a failed inference are skipped.
pub(crate) fn children_ctx(ctx: &Ctx, t: &Term) -> Vec<(usize, Ctx)> {
    match t {
        Term::Var(_) | Term::Stoup | Term::Star | Term::CStar | Term::Top => vec![],
        Term::Pair(_, _) => {
            let v = ctx.with_stoup(None);
            vec![(0, v.clone()), (1, v)]
        }
        Term::Fst(_) | Term::Snd(_) | Term::Bang(_) => vec![(0, ctx.with_stoup(None))],
        Term::Lam(_, a, _) => vec![(0, ctx.push(a.clone()).with_stoup(None))],
        Term::CPair(_, _) => vec![(0, ctx.clone()), (1, ctx.clone())],
        Term::CFst(_) | Term::CSnd(_) | Term::Absurd(_, _) | Term::Inl(_, _) | Term::Inr(_, _) => {
            vec![(0, ctx.clone())]
        }
        Term::CLam(_, a, _) => vec![(0, ctx.push(a.clone()))],
        Term::ILet(_, _) => vec![(0, ctx.clone()), (1, ctx.with_stoup(None))],
        Term::BangLet(s, _, _) => {
            let mut out = vec![(0, ctx.clone())];
            if let Some(SortedType::Comp(CompType::Bang(a))) = ctx.infer(s) {
                out.push((1, ctx.push(*a).with_stoup(None)));
            }
            out
        }
        Term::Copow(_, _) => vec![(0, ctx.with_stoup(None)), (1, ctx.clone())],
        Term::CopowLet(s, _, _, _) => {
            let mut out = vec![(0, ctx.clone())];
            if let Some(SortedType::Comp(CompType::Copower(a, b))) = ctx.infer(s) {
                out.push((1, ctx.push(*a).with_stoup(Some(*b))));
            }
            out
        }
        Term::Case(s, _, _, _, _) => {
            let mut out = vec![(0, ctx.clone())];
            if let Some(SortedType::Comp(CompType::Plus(a, b))) = ctx.infer(s) {
                out.push((1, ctx.with_stoup(Some(*a))));
                out.push((2, ctx.with_stoup(Some(*b))));
            }
            out
        }
        Term::LinLam(_, c, _) => vec![(0, ctx.with_stoup(Some(c.clone())))],
        Term::App(s, _) => {
            if ctx.stoup.is_none() {
                let v = ctx.with_stoup(None);
                vec![(0, v.clone()), (1, v)]
            } else {
                // Route: => threads the stoup through the function, -o
                // through the argument.
                match infer_sorted(&ctx.gamma, ctx.stoup.as_ref(), s) {
                    Some(SortedType::Comp(CompType::Arrow(_, _))) => {
                        vec![(0, ctx.clone()), (1, ctx.with_stoup(None))]
                    }
                    _ => match ctx.infer_no_stoup(s) {
                        Some(SortedType::Value(ValueType::Lin(_, _))) => {
                            vec![(0, ctx.with_stoup(None)), (1, ctx.clone())]
                        }
                        _ => vec![],
                    },
                }
            }
        }
    }
}

/// Find the first applicable phase-1 step, pre-order, rule families in a
/// fixed priority at each node.
fn find_step(ctx: &Ctx, t: &Term, path: &mut Vec<usize>, mode: Mode) -> Option<Step> {
    let local = try_beta(t)
        .or_else(|| try_cc(ctx, t))
        .or_else(|| {
            if mode == Mode::Full {
                try_let_elim(ctx, t).or_else(|| try_eta(ctx, t))
            } else {
                None
            }
        });
    if let Some((rule, replacement)) = local {
        return Some(Step {
            path: path.clone(),
            rule,
            dir: Dir::Fwd,
            replacement,
        });
    }
    for (i, cctx) in children_ctx(ctx, t) {
        path.push(i);
        if let Some(step) = find_step(&cctx, child(t, i).unwrap(), path, mode) {
            path.pop();
            return Some(step);
        }
        path.pop();
    }
    None
}

#[derive(Debug, Clone)]
pub struct NormalizeOutcome {
    pub term: Term,
    pub complete: bool,
    pub steps: usize,
}

fn run_rewrites(
    ctx: &Ctx,
    term: &mut Term,
    mode: Mode,
    budget: usize,
    steps: &mut usize,
    trace: &mut Option<Vec<TraceStep>>,
) -> bool {
    loop {
        if *steps >= budget {
            return false;
        }
        match find_step(ctx, term, &mut Vec::new(), mode) {
            None => return true,
            Some(step) => {
                *term = replace_at(term, &step.path, step.replacement);
                *steps += 1;
                if let Some(tr) = trace {
                    tr.push(TraceStep {
                        path: step.path,
                        rule: step.rule,
                        dir: step.dir,
                        after: term.clone(),
                    });
                }
            }
        }
    }
}

/// Phase-1 normalization of a checked judgement's subject.
pub fn normalize_subject(j: &Judgement, budget: usize) -> NormalizeOutcome {
    let ctx = Ctx::of_judgement(j);
    let mut term = j.subject.clone();
    let mut steps = 0;
    let complete = run_rewrites(&ctx, &mut term, Mode::Full, budget, &mut steps, &mut None);
    NormalizeOutcome {
        term,
        complete,
        steps,
    }
}

/// Phase-1 normalization of a checked term. No oriented redex remains unless
/// the budget runs out, which is reported, never silent.
pub fn normalize(tt: &TypedTerm, budget: usize) -> NormalizeOutcome {
    normalize_subject(&tt.judgement, budget)
}

// ---- phase 2: eta-long canonicalization ----

fn is_positive(c: &CompType) -> bool {
    matches!(
        c,
        CompType::Const(_)
            | CompType::TensorUnit
            | CompType::Bang(_)
            | CompType::Copower(_, _)
            | CompType::Zero
            | CompType::Plus(_, _)
    )
}

fn find_canon(ctx: &Ctx, t: &Term, ty: &SortedType, path: &mut Vec<usize>) -> Option<Step> {
    let step = |path: &Vec<usize>, rule: Rule, dir: Dir, replacement: Term| {
        Some(Step {
            path: path.clone(),
            rule,
            dir,
            replacement,
        })
    };
    match ty.clone().normalized() {
        SortedType::Value(v) => match v {
            ValueType::Unit => {
                if matches!(t, Term::Star) {
                    None
                } else {
                    step(path, Rule::VUnitEta, Dir::Fwd, Term::Star)
                }
            }
            ValueType::Prod(a, b) => match t {
                Term::Pair(x, y) => {
                    let inner = ctx.with_stoup(None);
                    descend(path, 0, |p| {
                        find_canon(&inner, x, &SortedType::Value((*a).clone()), p)
                    })
                    .or_else(|| {
                        descend(path, 1, |p| {
                            find_canon(&inner, y, &SortedType::Value((*b).clone()), p)
                        })
                    })
                }
                _ => step(
                    path,
                    Rule::VProdEta,
                    Dir::Bwd,
                    pair(fst(t.clone()), snd(t.clone())),
                ),
            },
            ValueType::Fun(a, b) => match t {
                Term::Lam(_, _, body) => {
                    let inner = ctx.push((*a).clone()).with_stoup(None);
                    descend(path, 0, |p| {
                        find_canon(&inner, body, &SortedType::Value((*b).clone()), p)
                    })
                }
                _ => step(
                    path,
                    Rule::VFunEta,
                    Dir::Bwd,
                    lam("x", (*a).clone(), app(t.shift(1), var(0))),
                ),
            },
            ValueType::Lin(c, d) => match t {
                Term::LinLam(_, _, body) => {
                    let inner = ctx.with_stoup(Some((*c).clone()));
                    descend(path, 0, |p| {
                        find_canon(&inner, body, &SortedType::Comp((*d).clone()), p)
                    })
                }
                _ => step(
                    path,
                    Rule::LinEta,
                    Dir::Bwd,
                    linlam("z", (*c).clone(), app(t.clone(), Term::Stoup)),
                ),
            },
            ValueType::Const(_) => find_canon_neutral(ctx, t, path),
            ValueType::Embed(_) => unreachable!("normalized sorted type"),
        },
        SortedType::Comp(c) => find_canon_comp(ctx, t, &c, path),
    }
}

fn find_canon_comp(ctx: &Ctx, t: &Term, c: &CompType, path: &mut Vec<usize>) -> Option<Step> {
    let step = |path: &Vec<usize>, rule: Rule, dir: Dir, replacement: Term| {
        Some(Step {
            path: path.clone(),
            rule,
            dir,
            replacement,
        })
    };
    match c {
        CompType::WithUnit => {
            if matches!(t, Term::CStar) {
                None
            } else {
                step(path, Rule::CUnitEta, Dir::Fwd, Term::CStar)
            }
        }
        CompType::With(a, b) => match t {
            Term::CPair(x, y) => descend(path, 0, |p| find_canon_comp(ctx, x, a, p))
                .or_else(|| descend(path, 1, |p| find_canon_comp(ctx, y, b, p))),
            _ => step(
                path,
                Rule::CWithEta,
                Dir::Bwd,
                cpair(cfst(t.clone()), csnd(t.clone())),
            ),
        },
        CompType::Arrow(a, b) => match t {
            Term::CLam(_, _, body) => {
                let inner = ctx.push((**a).clone());
                descend(path, 0, |p| find_canon_comp(&inner, body, b, p))
            }
            _ => step(
                path,
                Rule::CArrowEta,
                Dir::Bwd,
                clam("x", (**a).clone(), app(t.shift(1), var(0))),
            ),
        },
        // Positive types: eliminate a positive stoup first, then look at the
        // term's own shape.
        _ => {
            if let Some(d) = ctx.stoup.clone().filter(is_positive) {
                match (&d, t) {
                    (CompType::Const(_), _) => { /* constants have no eliminator */ }
                    (CompType::TensorUnit, Term::ILet(s, u))
                        if matches!(**s, Term::Stoup) =>
                    {
                        let inner = ctx.with_stoup(None);
                        return descend(path, 1, |p| find_canon_comp(&inner, u, c, p));
                    }
                    (CompType::TensorUnit, _) => {
                        return step(
                            path,
                            Rule::ILetEta,
                            Dir::Bwd,
                            ilet(Term::Stoup, t.subst_stoup(&Term::Top)),
                        );
                    }
                    (CompType::Bang(a), Term::BangLet(s, _, u))
                        if matches!(**s, Term::Stoup) =>
                    {
                        let inner = ctx.push((**a).clone()).with_stoup(None);
                        return descend(path, 1, |p| find_canon_comp(&inner, u, c, p));
                    }
                    (CompType::Bang(_), _) => {
                        return step(
                            path,
                            Rule::BangLetEta,
                            Dir::Bwd,
                            banglet(
                                Term::Stoup,
                                "x",
                                t.shift(1).subst_stoup(&bang(var(0))),
                            ),
                        );
                    }
                    (CompType::Copower(a, b), Term::CopowLet(s, _, _, u))
                        if matches!(**s, Term::Stoup) =>
                    {
                        let inner = ctx.push((**a).clone()).with_stoup(Some((**b).clone()));
                        return descend(path, 1, |p| find_canon_comp(&inner, u, c, p));
                    }
                    (CompType::Copower(_, _), _) => {
                        return step(
                            path,
                            Rule::TensorLetEta,
                            Dir::Bwd,
                            copowlet(
                                Term::Stoup,
                                "x",
                                "y",
                                t.shift(1).subst_stoup(&copow(var(0), Term::Stoup)),
                            ),
                        );
                    }
                    (CompType::Zero, Term::Absurd(_, s)) if matches!(**s, Term::Stoup) => {
                        return None;
                    }
                    (CompType::Zero, _) => {
                        return step(
                            path,
                            Rule::ZeroEta,
                            Dir::Bwd,
                            absurd(c.clone(), Term::Stoup),
                        );
                    }
                    (CompType::Plus(a, b), Term::Case(s, _, l, _, r))
                        if matches!(**s, Term::Stoup) =>
                    {
                        let li = ctx.with_stoup(Some((**a).clone()));
                        let ri = ctx.with_stoup(Some((**b).clone()));
                        return descend(path, 1, |p| find_canon_comp(&li, l, c, p))
                            .or_else(|| descend(path, 2, |p| find_canon_comp(&ri, r, c, p)));
                    }
                    (CompType::Plus(a, b), _) => {
                        return step(
                            path,
                            Rule::PlusLetEta,
                            Dir::Bwd,
                            case(
                                Term::Stoup,
                                "x",
                                t.subst_stoup(&inl((**b).clone(), Term::Stoup)),
                                "y",
                                t.subst_stoup(&inr((**a).clone(), Term::Stoup)),
                            ),
                        );
                    }
                    (CompType::WithUnit | CompType::With(_, _) | CompType::Arrow(_, _), _) => {
                        unreachable!("filtered by is_positive")
                    }
                }
            }
            // Introductions, spines over neutral subjects, neutrals.
            match (c, t) {
                (CompType::TensorUnit, Term::Top) => None,
                (CompType::Bang(a), Term::Bang(v)) => {
                    let inner = ctx.with_stoup(None);
                    descend(path, 0, |p| {
                        find_canon(&inner, v, &SortedType::Value((**a).clone()), p)
                    })
                }
                (CompType::Copower(a, b), Term::Copow(v, w)) => {
                    let vi = ctx.with_stoup(None);
                    descend(path, 0, |p| {
                        find_canon(&vi, v, &SortedType::Value((**a).clone()), p)
                    })
                    .or_else(|| descend(path, 1, |p| find_canon_comp(ctx, w, b, p)))
                }
                (CompType::Plus(a, _), Term::Inl(_, w)) => {
                    descend(path, 0, |p| find_canon_comp(ctx, w, a, p))
                }
                (CompType::Plus(_, b), Term::Inr(_, w)) => {
                    descend(path, 0, |p| find_canon_comp(ctx, w, b, p))
                }
                (_, Term::ILet(n, u)) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, n, p)).or_else(|| {
                        let inner = ctx.with_stoup(None);
                        descend(path, 1, |p| find_canon_comp(&inner, u, c, p))
                    })
                }
                (_, Term::BangLet(n, _, u)) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, n, p)).or_else(|| {
                        let a = match ctx.infer(n) {
                            Some(SortedType::Comp(CompType::Bang(a))) => *a,
                            _ => return None,
                        };
                        let inner = ctx.push(a).with_stoup(None);
                        descend(path, 1, |p| find_canon_comp(&inner, u, c, p))
                    })
                }
                (_, Term::CopowLet(n, _, _, u)) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, n, p)).or_else(|| {
                        let (a, b) = match ctx.infer(n) {
                            Some(SortedType::Comp(CompType::Copower(a, b))) => (*a, *b),
                            _ => return None,
                        };
                        let inner = ctx.push(a).with_stoup(Some(b));
                        descend(path, 1, |p| find_canon_comp(&inner, u, c, p))
                    })
                }
                (_, Term::Case(n, _, l, _, r)) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, n, p)).or_else(|| {
                        let (a, b) = match ctx.infer(n) {
                            Some(SortedType::Comp(CompType::Plus(a, b))) => (*a, *b),
                            _ => return None,
                        };
                        let li = ctx.with_stoup(Some(a));
                        descend(path, 1, |p| find_canon_comp(&li, l, c, p)).or_else(|| {
                            let ri = ctx.with_stoup(Some(b));
                            descend(path, 2, |p| find_canon_comp(&ri, r, c, p))
                        })
                    })
                }
                (_, Term::Absurd(_, n)) => descend(path, 0, |p| find_canon_neutral(ctx, n, p)),
                _ => find_canon_neutral(ctx, t, path),
            }
        }
    }
}

/// Canonicalize the interiors of a neutral spine (its value and computation
/// arguments); the spine structure itself is left alone.
fn find_canon_neutral(ctx: &Ctx, t: &Term, path: &mut Vec<usize>) -> Option<Step> {
    match t {
        Term::Var(_) | Term::Stoup | Term::Star | Term::CStar | Term::Top => None,
        Term::Fst(n) | Term::Snd(n) | Term::CFst(n) | Term::CSnd(n) => {
            descend(path, 0, |p| find_canon_neutral(ctx, n, p))
        }
        Term::App(s, a) => {
            // Determine the route to type the argument.
            if ctx.stoup.is_some() {
                if let Some(SortedType::Comp(CompType::Arrow(x, _))) =
                    infer_sorted(&ctx.gamma, ctx.stoup.as_ref(), s)
                {
                    let ai = ctx.with_stoup(None);
                    return descend(path, 0, |p| find_canon_neutral(ctx, s, p)).or_else(|| {
                        descend(path, 1, |p| {
                            find_canon(&ai, a, &SortedType::Value((*x).clone()), p)
                        })
                    });
                }
                if let Some(SortedType::Value(ValueType::Lin(x, _))) = ctx.infer_no_stoup(s) {
                    let si = ctx.with_stoup(None);
                    return descend(path, 0, |p| find_canon_neutral(&si, s, p)).or_else(|| {
                        descend(path, 1, |p| find_canon_comp(ctx, a, &x, p))
                    });
                }
                return None;
            }
            match ctx.infer_no_stoup(s) {
                Some(SortedType::Value(ValueType::Fun(x, _))) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, s, p)).or_else(|| {
                        descend(path, 1, |p| {
                            find_canon(ctx, a, &SortedType::Value((*x).clone()), p)
                        })
                    })
                }
                Some(SortedType::Comp(CompType::Arrow(x, _))) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, s, p)).or_else(|| {
                        descend(path, 1, |p| {
                            find_canon(ctx, a, &SortedType::Value((*x).clone()), p)
                        })
                    })
                }
                Some(SortedType::Value(ValueType::Lin(x, _))) => {
                    descend(path, 0, |p| find_canon_neutral(ctx, s, p))
                        .or_else(|| descend(path, 1, |p| find_canon_comp(ctx, a, &x, p)))
                }
                _ => None,
            }
        }
        // A stuck let or intro inside a neutral position keeps its own
        // structure; recurse via the comp canonicalizer when typed.
        other => match ctx.infer(other) {
            Some(SortedType::Comp(c)) => find_canon_comp(ctx, other, &c, path),
            _ => None,
        },
    }
}

fn descend(
    path: &mut Vec<usize>,
    i: usize,
    f: impl FnOnce(&mut Vec<usize>) -> Option<Step>,
) -> Option<Step> {
    path.push(i);
    let r = f(path);
    path.pop();
    r
}

/// Phase 1 followed by phase 2, sharing one step budget.
pub(crate) fn normalize_and_canon(
    j: &Judgement,
    budget: usize,
    trace: &mut Option<Vec<TraceStep>>,
) -> NormalizeOutcome {
    let ctx = Ctx::of_judgement(j);
    let mut term = j.subject.clone();
    let mut steps = 0usize;
    if !run_rewrites(&ctx, &mut term, Mode::Full, budget, &mut steps, trace) {
        return NormalizeOutcome {
            term,
            complete: false,
            steps,
        };
    }
    let ty = j.ty.clone().normalized();
    loop {
        if steps >= budget {
            return NormalizeOutcome {
                term,
                complete: false,
                steps,
            };
        }
        match find_canon(&ctx, &term, &ty, &mut Vec::new()) {
            None => {
                return NormalizeOutcome {
                    term,
                    complete: true,
                    steps,
                }
            }
            Some(step) => {
                term = replace_at(&term, &step.path, step.replacement);
                steps += 1;
                if let Some(tr) = trace {
                    tr.push(TraceStep {
                        path: step.path,
                        rule: step.rule,
                        dir: step.dir,
                        after: term.clone(),
                    });
                }
                if !run_rewrites(&ctx, &mut term, Mode::BetaCc, budget, &mut steps, trace) {
                    return NormalizeOutcome {
                        term,
                        complete: false,
                        steps,
                    };
                }
            }
        }
    }
}

/// Full canonical form (phase 1 + phase 2) of a checked term.
pub fn canonicalize(tt: &TypedTerm, budget: usize) -> NormalizeOutcome {
    normalize_and_canon(&tt.judgement, budget, &mut None)
}

