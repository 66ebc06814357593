//! Two-sorted type grammar and term syntax.
//!
//! Value variables are de Bruijn indices into the value context (0 = the
//! innermost binder). The stoup variable has its own namespace: since at most
//! one linear hypothesis is ever in scope, [`Term::Stoup`] carries no index
//! and always refers to the nearest enclosing stoup binder (a linear lambda,
//! a case branch, a copower-let body) or, absent those, to the judgement's
//! stoup. Binder names are retained as printing hints only; [`alpha_eq`]
//! ignores them.

use serde::{Deserialize, Serialize};

/// Value types `A`. Computation types embed into value types via [`ValueType::Embed`];
/// there is no coercion in the other direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValueType {
    /// Value type constant.
    Const(String),
    /// `1`
    Unit,
    /// `A x B`
    Prod(Box<ValueType>, Box<ValueType>),
    /// `A -> B`
    Fun(Box<ValueType>, Box<ValueType>),
    /// A computation type used as a value type.
    Embed(Box<CompType>),
    /// `C -o D`, the linear function space. Both operands are computation
    /// types; the result is a value type, so `-o` cannot be iterated.
    Lin(Box<CompType>, Box<CompType>),
}

/// Computation types `C`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CompType {
    /// Computation type constant (surface syntax `^name`).
    Const(String),
    /// `C1`, the unit of `&`.
    WithUnit,
    /// `C & D`
    With(Box<CompType>, Box<CompType>),
    /// `A => C`
    Arrow(Box<ValueType>, Box<CompType>),
    /// `I`, the tensor unit.
    TensorUnit,
    /// `!A`
    Bang(Box<ValueType>),
    /// `!A (*) C`, the copower.
    Copower(Box<ValueType>, Box<CompType>),
    /// `C0`
    Zero,
    /// `C (+) D`
    Plus(Box<CompType>, Box<CompType>),
}

/// A type tagged with its judgement sort.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SortedType {
    Value(ValueType),
    Comp(CompType),
}

impl ValueType {
    pub fn prod(a: ValueType, b: ValueType) -> ValueType {
        ValueType::Prod(Box::new(a), Box::new(b))
    }
    pub fn fun(a: ValueType, b: ValueType) -> ValueType {
        ValueType::Fun(Box::new(a), Box::new(b))
    }
    pub fn embed(c: CompType) -> ValueType {
        ValueType::Embed(Box::new(c))
    }
    pub fn lin(c: CompType, d: CompType) -> ValueType {
        ValueType::Lin(Box::new(c), Box::new(d))
    }

    /// Constructor-node count, counting `Embed` coercions as nodes.
    pub fn size(&self) -> usize {
        match self {
            ValueType::Const(_) | ValueType::Unit => 1,
            ValueType::Prod(a, b) | ValueType::Fun(a, b) => 1 + a.size() + b.size(),
            ValueType::Embed(c) => 1 + c.size(),
            ValueType::Lin(c, d) => 1 + c.size() + d.size(),
        }
    }
}

impl CompType {
    pub fn with(a: CompType, b: CompType) -> CompType {
        CompType::With(Box::new(a), Box::new(b))
    }
    pub fn arrow(a: ValueType, b: CompType) -> CompType {
        CompType::Arrow(Box::new(a), Box::new(b))
    }
    pub fn bang(a: ValueType) -> CompType {
        CompType::Bang(Box::new(a))
    }
    pub fn copower(a: ValueType, b: CompType) -> CompType {
        CompType::Copower(Box::new(a), Box::new(b))
    }
    pub fn plus(a: CompType, b: CompType) -> CompType {
        CompType::Plus(Box::new(a), Box::new(b))
    }

    pub fn size(&self) -> usize {
        match self {
            CompType::Const(_)
            | CompType::WithUnit
            | CompType::TensorUnit
            | CompType::Zero => 1,
            CompType::With(a, b) | CompType::Plus(a, b) => 1 + a.size() + b.size(),
            CompType::Arrow(a, b) | CompType::Copower(a, b) => 1 + a.size() + b.size(),
            CompType::Bang(a) => 1 + a.size(),
        }
    }
}

impl SortedType {
    /// Canonical form: an embedded computation type in an empty-stoup
    /// judgement is the same judgement type as the computation type itself.
    pub fn normalized(self) -> SortedType {
        match self {
            SortedType::Value(ValueType::Embed(c)) => SortedType::Comp(*c),
            other => other,
        }
    }

    pub fn as_value(&self) -> ValueType {
        match self {
            SortedType::Value(v) => v.clone(),
            SortedType::Comp(c) => ValueType::embed(c.clone()),
        }
    }
}

/// One term constructor per typing rule, with a single undecorated
/// application node covering `->`, `=>` and `-o` application.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Term {
    /// Value variable (de Bruijn index, 0 = innermost).
    Var(usize),
    /// The stoup variable of the nearest enclosing stoup binder.
    Stoup,
    /// `*`
    Star,
    /// `(t, u)`
    Pair(Box<Term>, Box<Term>),
    Fst(Box<Term>),
    Snd(Box<Term>),
    /// `fun x:A -> t`
    Lam(String, ValueType, Box<Term>),
    /// `cstar`
    CStar,
    /// `<t, u>`
    CPair(Box<Term>, Box<Term>),
    CFst(Box<Term>),
    CSnd(Box<Term>),
    /// `cfun x:A -> t`
    CLam(String, ValueType, Box<Term>),
    /// `top`
    Top,
    /// `let top be t in u`; `u` is a value judgement.
    ILet(Box<Term>, Box<Term>),
    /// `!t`
    Bang(Box<Term>),
    /// `let !x be t in u`; binds the value variable `x` in `u`.
    BangLet(Box<Term>, String, Box<Term>),
    /// `!t (*) u`
    Copow(Box<Term>, Box<Term>),
    /// `let !x (*) y be s in t`; binds the value variable `x` and the stoup
    /// variable `y` in `t`.
    CopowLet(Box<Term>, String, String, Box<Term>),
    /// `absurd[C] t`; the annotation is the result type.
    Absurd(Option<CompType>, Box<Term>),
    /// `inl[C] t`; the annotation is the right summand.
    Inl(Option<CompType>, Box<Term>),
    /// `inr[C] t`; the annotation is the left summand.
    Inr(Option<CompType>, Box<Term>),
    /// `case s of inl x -> t | inr y -> u`; each branch binds its own stoup.
    Case(Box<Term>, String, Box<Term>, String, Box<Term>),
    /// `lfun z:C -> t`; binds the stoup variable in `t`.
    LinLam(String, CompType, Box<Term>),
    /// Juxtaposition application; the typechecker decides which of the three
    /// application rules applies.
    App(Box<Term>, Box<Term>),
}

pub fn var(i: usize) -> Term {
    Term::Var(i)
}
pub fn pair(t: Term, u: Term) -> Term {
    Term::Pair(Box::new(t), Box::new(u))
}
pub fn fst(t: Term) -> Term {
    Term::Fst(Box::new(t))
}
pub fn snd(t: Term) -> Term {
    Term::Snd(Box::new(t))
}
pub fn lam(x: &str, a: ValueType, t: Term) -> Term {
    Term::Lam(x.to_string(), a, Box::new(t))
}
pub fn cpair(t: Term, u: Term) -> Term {
    Term::CPair(Box::new(t), Box::new(u))
}
pub fn cfst(t: Term) -> Term {
    Term::CFst(Box::new(t))
}
pub fn csnd(t: Term) -> Term {
    Term::CSnd(Box::new(t))
}
pub fn clam(x: &str, a: ValueType, t: Term) -> Term {
    Term::CLam(x.to_string(), a, Box::new(t))
}
pub fn ilet(t: Term, u: Term) -> Term {
    Term::ILet(Box::new(t), Box::new(u))
}
pub fn bang(t: Term) -> Term {
    Term::Bang(Box::new(t))
}
pub fn banglet(t: Term, x: &str, u: Term) -> Term {
    Term::BangLet(Box::new(t), x.to_string(), Box::new(u))
}
pub fn copow(t: Term, u: Term) -> Term {
    Term::Copow(Box::new(t), Box::new(u))
}
pub fn copowlet(s: Term, x: &str, y: &str, t: Term) -> Term {
    Term::CopowLet(Box::new(s), x.to_string(), y.to_string(), Box::new(t))
}
pub fn absurd(c: CompType, t: Term) -> Term {
    Term::Absurd(Some(c), Box::new(t))
}
pub fn inl(c: CompType, t: Term) -> Term {
    Term::Inl(Some(c), Box::new(t))
}
pub fn inr(c: CompType, t: Term) -> Term {
    Term::Inr(Some(c), Box::new(t))
}
pub fn case(s: Term, x: &str, t: Term, y: &str, u: Term) -> Term {
    Term::Case(Box::new(s), x.to_string(), Box::new(t), y.to_string(), Box::new(u))
}
pub fn linlam(z: &str, c: CompType, t: Term) -> Term {
    Term::LinLam(z.to_string(), c, Box::new(t))
}
pub fn app(s: Term, t: Term) -> Term {
    Term::App(Box::new(s), Box::new(t))
}

impl Term {
    /// Node count.
    pub fn size(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |_| n += 1);
        n
    }

    fn walk(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        match self {
            Term::Var(_) | Term::Stoup | Term::Star | Term::CStar | Term::Top => {}
            Term::Pair(a, b)
            | Term::CPair(a, b)
            | Term::ILet(a, b)
            | Term::Copow(a, b)
            | Term::App(a, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::Fst(a)
            | Term::Snd(a)
            | Term::CFst(a)
            | Term::CSnd(a)
            | Term::Bang(a)
            | Term::Absurd(_, a)
            | Term::Inl(_, a)
            | Term::Inr(_, a) => a.walk(f),
            Term::Lam(_, _, a) | Term::CLam(_, _, a) | Term::LinLam(_, _, a) => a.walk(f),
            Term::BangLet(a, _, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::CopowLet(a, _, _, b) => {
                a.walk(f);
                b.walk(f);
            }
            Term::Case(s, _, a, _, b) => {
                s.walk(f);
                a.walk(f);
                b.walk(f);
            }
        }
    }

    /// Shift free value-variable indices `>= cutoff` by `d`.
    pub fn shift_from(&self, d: isize, cutoff: usize) -> Term {
        match self {
            Term::Var(i) => {
                if *i >= cutoff {
                    Term::Var((*i as isize + d) as usize)
                } else {
                    Term::Var(*i)
                }
            }
            Term::Stoup => Term::Stoup,
            Term::Star => Term::Star,
            Term::CStar => Term::CStar,
            Term::Top => Term::Top,
            Term::Pair(a, b) => pair(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            Term::CPair(a, b) => cpair(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            Term::ILet(a, b) => ilet(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            Term::Copow(a, b) => copow(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            Term::App(a, b) => app(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            Term::Fst(a) => fst(a.shift_from(d, cutoff)),
            Term::Snd(a) => snd(a.shift_from(d, cutoff)),
            Term::CFst(a) => cfst(a.shift_from(d, cutoff)),
            Term::CSnd(a) => csnd(a.shift_from(d, cutoff)),
            Term::Bang(a) => bang(a.shift_from(d, cutoff)),
            Term::Absurd(c, a) => Term::Absurd(c.clone(), Box::new(a.shift_from(d, cutoff))),
            Term::Inl(c, a) => Term::Inl(c.clone(), Box::new(a.shift_from(d, cutoff))),
            Term::Inr(c, a) => Term::Inr(c.clone(), Box::new(a.shift_from(d, cutoff))),
            Term::Lam(h, ty, a) => lam(h, ty.clone(), a.shift_from(d, cutoff + 1)),
            Term::CLam(h, ty, a) => clam(h, ty.clone(), a.shift_from(d, cutoff + 1)),
            Term::LinLam(h, ty, a) => linlam(h, ty.clone(), a.shift_from(d, cutoff)),
            Term::BangLet(a, h, b) => {
                banglet(a.shift_from(d, cutoff), h, b.shift_from(d, cutoff + 1))
            }
            Term::CopowLet(a, hx, hy, b) => {
                let s = a.shift_from(d, cutoff);
                let t = b.shift_from(d, cutoff + 1);
                Term::CopowLet(Box::new(s), hx.clone(), hy.clone(), Box::new(t))
            }
            Term::Case(s, hx, a, hy, b) => Term::Case(
                Box::new(s.shift_from(d, cutoff)),
                hx.clone(),
                Box::new(a.shift_from(d, cutoff)),
                hy.clone(),
                Box::new(b.shift_from(d, cutoff)),
            ),
        }
    }

    pub fn shift(&self, d: isize) -> Term {
        self.shift_from(d, 0)
    }

    /// True iff `Var(j)` occurs free.
    pub fn has_free_var(&self, j: usize) -> bool {
        self.count_free_var(j) > 0
    }

    pub fn count_free_var(&self, j: usize) -> usize {
        match self {
            Term::Var(i) => usize::from(*i == j),
            Term::Stoup | Term::Star | Term::CStar | Term::Top => 0,
            Term::Pair(a, b)
            | Term::CPair(a, b)
            | Term::ILet(a, b)
            | Term::Copow(a, b)
            | Term::App(a, b) => a.count_free_var(j) + b.count_free_var(j),
            Term::Fst(a)
            | Term::Snd(a)
            | Term::CFst(a)
            | Term::CSnd(a)
            | Term::Bang(a)
            | Term::Absurd(_, a)
            | Term::Inl(_, a)
            | Term::Inr(_, a) => a.count_free_var(j),
            Term::Lam(_, _, a) | Term::CLam(_, _, a) => a.count_free_var(j + 1),
            Term::LinLam(_, _, a) => a.count_free_var(j),
            Term::BangLet(a, _, b) => a.count_free_var(j) + b.count_free_var(j + 1),
            Term::CopowLet(a, _, _, b) => a.count_free_var(j) + b.count_free_var(j + 1),
            Term::Case(s, _, a, _, b) => {
                s.count_free_var(j) + a.count_free_var(j) + b.count_free_var(j)
            }
        }
    }

    /// True iff the ambient stoup variable occurs (occurrences under a stoup
    /// rebinder belong to that binder and do not count).
    pub fn mentions_stoup(&self) -> bool {
        match self {
            Term::Stoup => true,
            Term::Var(_) | Term::Star | Term::CStar | Term::Top => false,
            Term::Pair(a, b)
            | Term::CPair(a, b)
            | Term::ILet(a, b)
            | Term::Copow(a, b)
            | Term::App(a, b) => a.mentions_stoup() || b.mentions_stoup(),
            Term::Fst(a)
            | Term::Snd(a)
            | Term::CFst(a)
            | Term::CSnd(a)
            | Term::Bang(a)
            | Term::Absurd(_, a)
            | Term::Inl(_, a)
            | Term::Inr(_, a) => a.mentions_stoup(),
            Term::Lam(_, _, a) | Term::CLam(_, _, a) => a.mentions_stoup(),
            // The stoup is rebound below.
            Term::LinLam(_, _, _) => false,
            Term::BangLet(a, _, b) => a.mentions_stoup() || b.mentions_stoup(),
            Term::CopowLet(a, _, _, _) => a.mentions_stoup(),
            Term::Case(s, _, _, _, _) => s.mentions_stoup(),
        }
    }

    /// Capture-avoiding substitution of `u` for value variable `j`; variables
    /// above `j` are decremented. `u` must be a value-judgement subject (no
    /// ambient stoup variable free in it).
    pub fn subst_value(&self, j: usize, u: &Term) -> Term {
        match self {
            Term::Var(i) => {
                if *i == j {
                    u.clone()
                } else if *i > j {
                    Term::Var(i - 1)
                } else {
                    Term::Var(*i)
                }
            }
            Term::Stoup => Term::Stoup,
            Term::Star => Term::Star,
            Term::CStar => Term::CStar,
            Term::Top => Term::Top,
            Term::Pair(a, b) => pair(a.subst_value(j, u), b.subst_value(j, u)),
            Term::CPair(a, b) => cpair(a.subst_value(j, u), b.subst_value(j, u)),
            Term::ILet(a, b) => ilet(a.subst_value(j, u), b.subst_value(j, u)),
            Term::Copow(a, b) => copow(a.subst_value(j, u), b.subst_value(j, u)),
            Term::App(a, b) => app(a.subst_value(j, u), b.subst_value(j, u)),
            Term::Fst(a) => fst(a.subst_value(j, u)),
            Term::Snd(a) => snd(a.subst_value(j, u)),
            Term::CFst(a) => cfst(a.subst_value(j, u)),
            Term::CSnd(a) => csnd(a.subst_value(j, u)),
            Term::Bang(a) => bang(a.subst_value(j, u)),
            Term::Absurd(c, a) => Term::Absurd(c.clone(), Box::new(a.subst_value(j, u))),
            Term::Inl(c, a) => Term::Inl(c.clone(), Box::new(a.subst_value(j, u))),
            Term::Inr(c, a) => Term::Inr(c.clone(), Box::new(a.subst_value(j, u))),
            Term::Lam(h, ty, a) => lam(h, ty.clone(), a.subst_value(j + 1, &u.shift(1))),
            Term::CLam(h, ty, a) => clam(h, ty.clone(), a.subst_value(j + 1, &u.shift(1))),
            Term::LinLam(h, ty, a) => linlam(h, ty.clone(), a.subst_value(j, u)),
            Term::BangLet(a, h, b) => {
                banglet(a.subst_value(j, u), h, b.subst_value(j + 1, &u.shift(1)))
            }
            Term::CopowLet(a, hx, hy, b) => Term::CopowLet(
                Box::new(a.subst_value(j, u)),
                hx.clone(),
                hy.clone(),
                Box::new(b.subst_value(j + 1, &u.shift(1))),
            ),
            Term::Case(s, hx, a, hy, b) => Term::Case(
                Box::new(s.subst_value(j, u)),
                hx.clone(),
                Box::new(a.subst_value(j, u)),
                hy.clone(),
                Box::new(b.subst_value(j, u)),
            ),
        }
    }

    /// Substitute `u` for the ambient stoup variable. Occurrences under a
    /// stoup rebinder are left alone; the stoup of `u` (possibly empty)
    /// becomes the stoup of the result.
    pub fn subst_stoup(&self, u: &Term) -> Term {
        self.subst_stoup_at(u, 0)
    }

    fn subst_stoup_at(&self, u: &Term, depth: usize) -> Term {
        match self {
            Term::Stoup => u.shift(depth as isize),
            Term::Var(i) => Term::Var(*i),
            Term::Star => Term::Star,
            Term::CStar => Term::CStar,
            Term::Top => Term::Top,
            Term::Pair(a, b) => pair(a.subst_stoup_at(u, depth), b.subst_stoup_at(u, depth)),
            Term::CPair(a, b) => cpair(a.subst_stoup_at(u, depth), b.subst_stoup_at(u, depth)),
            Term::ILet(a, b) => ilet(a.subst_stoup_at(u, depth), b.subst_stoup_at(u, depth)),
            Term::Copow(a, b) => copow(a.subst_stoup_at(u, depth), b.subst_stoup_at(u, depth)),
            Term::App(a, b) => app(a.subst_stoup_at(u, depth), b.subst_stoup_at(u, depth)),
            Term::Fst(a) => fst(a.subst_stoup_at(u, depth)),
            Term::Snd(a) => snd(a.subst_stoup_at(u, depth)),
            Term::CFst(a) => cfst(a.subst_stoup_at(u, depth)),
            Term::CSnd(a) => csnd(a.subst_stoup_at(u, depth)),
            Term::Bang(a) => bang(a.subst_stoup_at(u, depth)),
            Term::Absurd(c, a) => Term::Absurd(c.clone(), Box::new(a.subst_stoup_at(u, depth))),
            Term::Inl(c, a) => Term::Inl(c.clone(), Box::new(a.subst_stoup_at(u, depth))),
            Term::Inr(c, a) => Term::Inr(c.clone(), Box::new(a.subst_stoup_at(u, depth))),
            Term::Lam(h, ty, a) => lam(h, ty.clone(), a.subst_stoup_at(u, depth + 1)),
            Term::CLam(h, ty, a) => clam(h, ty.clone(), a.subst_stoup_at(u, depth + 1)),
            // Stoup rebinders: the body's stoup is its own.
            Term::LinLam(h, ty, a) => linlam(h, ty.clone(), a.as_ref().clone()),
            Term::BangLet(a, h, b) => {
                banglet(a.subst_stoup_at(u, depth), h, b.subst_stoup_at(u, depth + 1))
            }
            Term::CopowLet(a, hx, hy, b) => Term::CopowLet(
                Box::new(a.subst_stoup_at(u, depth)),
                hx.clone(),
                hy.clone(),
                b.clone(),
            ),
            Term::Case(s, hx, a, hy, b) => Term::Case(
                Box::new(s.subst_stoup_at(u, depth)),
                hx.clone(),
                a.clone(),
                hy.clone(),
                b.clone(),
            ),
        }
    }

    /// Structural equality of nameless forms: printing hints are ignored,
    /// everything else (indices, types, annotations) must coincide.
    pub fn alpha_eq(&self, other: &Term) -> bool {
        use Term::*;
        match (self, other) {
            (Var(i), Var(j)) => i == j,
            (Stoup, Stoup) | (Star, Star) | (CStar, CStar) | (Top, Top) => true,
            (Pair(a, b), Pair(c, d))
            | (CPair(a, b), CPair(c, d))
            | (ILet(a, b), ILet(c, d))
            | (Copow(a, b), Copow(c, d))
            | (App(a, b), App(c, d)) => a.alpha_eq(c) && b.alpha_eq(d),
            (Fst(a), Fst(b))
            | (Snd(a), Snd(b))
            | (CFst(a), CFst(b))
            | (CSnd(a), CSnd(b))
            | (Bang(a), Bang(b)) => a.alpha_eq(b),
            (Absurd(c, a), Absurd(d, b)) | (Inl(c, a), Inl(d, b)) | (Inr(c, a), Inr(d, b)) => {
                c == d && a.alpha_eq(b)
            }
            (Lam(_, t, a), Lam(_, u, b))
            | (CLam(_, t, a), CLam(_, u, b)) => t == u && a.alpha_eq(b),
            (LinLam(_, t, a), LinLam(_, u, b)) => t == u && a.alpha_eq(b),
            (BangLet(a, _, b), BangLet(c, _, d)) => a.alpha_eq(c) && b.alpha_eq(d),
            (CopowLet(a, _, _, b), CopowLet(c, _, _, d)) => a.alpha_eq(c) && b.alpha_eq(d),
            (Case(s, _, a, _, b), Case(t, _, c, _, d)) => {
                s.alpha_eq(t) && a.alpha_eq(c) && b.alpha_eq(d)
            }
            _ => false,
        }
    }
}

/// Spec-facing aliases over the method forms.
pub fn subst_value(t: &Term, u: &Term, x: usize) -> Term {
    t.subst_value(x, u)
}
pub fn subst_stoup(t: &Term, u: &Term) -> Term {
    t.subst_stoup(u)
}
pub fn alpha_eq(t: &Term, u: &Term) -> bool {
    t.alpha_eq(u)
}

/// A typing judgement: `gamma |- subject : ty` or
/// `gamma | stoup |- subject : ty`. If a stoup is present, `ty` is a
/// computation type. The innermost gamma entry is the last one and is
/// addressed by `Var(0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Judgement {
    pub gamma: Vec<(String, ValueType)>,
    pub stoup: Option<(String, CompType)>,
    pub subject: Term,
    pub ty: SortedType,
}

impl Judgement {
    /// Type of `Var(i)` under this judgement's context.
    pub fn gamma_type(&self, i: usize) -> Option<&ValueType> {
        let n = self.gamma.len();
        if i < n {
            Some(&self.gamma[n - 1 - i].1)
        } else {
            None
        }
    }

    pub fn alpha_eq(&self, other: &Judgement) -> bool {
        self.gamma.len() == other.gamma.len()
            && self
                .gamma
                .iter()
                .zip(&other.gamma)
                .all(|((_, a), (_, b))| a == b)
            && match (&self.stoup, &other.stoup) {
                (None, None) => true,
                (Some((_, a)), Some((_, b))) => a == b,
                _ => false,
            }
            && self.ty.clone().normalized() == other.ty.clone().normalized()
            && self.subject.alpha_eq(&other.subject)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> ValueType {
        ValueType::Unit
    }

    #[test]
    fn identity_substitution() {
        // x[u/x] = u
        let u = Term::Star;
        assert_eq!(var(0).subst_value(0, &u), Term::Star);
    }

    #[test]
    fn capture_avoidance_under_unrelated_binder() {
        // (fun y:1 -> x)[*/x] = fun y:1 -> *, binder untouched
        let t = lam("y", unit(), var(1)); // x is Var(1) under the binder
        let r = t.subst_value(0, &Term::Star);
        assert!(r.alpha_eq(&lam("y", unit(), Term::Star)));
    }

    #[test]
    fn bang_substitution() {
        // (!x)[*/x] = !*
        let t = bang(var(0));
        assert!(t.subst_value(0, &Term::Star).alpha_eq(&bang(Term::Star)));
    }

    #[test]
    fn stoup_substitution_identity() {
        // z[u/z] = u
        let u = cfst(Term::Stoup);
        assert!(Term::Stoup.subst_stoup(&u).alpha_eq(&u));
    }

    #[test]
    fn stoup_substitution_one_hole_plug() {
        // (pfst z)[<a,b>/z] = pfst <a,b>
        let t = cfst(Term::Stoup);
        let u = cpair(var(0), var(1));
        assert!(t.subst_stoup(&u).alpha_eq(&cfst(cpair(var(0), var(1)))));
    }

    #[test]
    fn stoup_substitution_under_bang_let() {
        // (let !x be z in !x)[!*/z] = let !x be !* in !x
        let t = banglet(Term::Stoup, "x", bang(var(0)));
        let u = bang(Term::Star);
        let expect = banglet(bang(Term::Star), "x", bang(var(0)));
        assert!(t.subst_stoup(&u).alpha_eq(&expect));
    }

    #[test]
    fn stoup_rebinders_block_substitution() {
        // Occurrences under a linear lambda belong to that binder.
        let t = app(linlam("w", CompType::WithUnit, Term::Stoup), Term::Stoup);
        let r = t.subst_stoup(&Term::CStar);
        let expect = app(linlam("w", CompType::WithUnit, Term::Stoup), Term::CStar);
        assert!(r.alpha_eq(&expect));
    }

    #[test]
    fn alpha_eq_ignores_hints() {
        let a = lam("x", unit(), var(0));
        let b = lam("y", unit(), var(0));
        assert!(a.alpha_eq(&b));
        let c = lam("x", unit(), Term::Star);
        assert!(!a.alpha_eq(&c));
        let d = linlam("z", CompType::Const("a".into()), Term::Stoup);
        let e = linlam("w", CompType::Const("a".into()), Term::Stoup);
        assert!(d.alpha_eq(&e));
    }

    #[test]
    fn shift_respects_binders() {
        let t = lam("x", unit(), pair(var(0), var(1)));
        let s = t.shift(2);
        assert!(s.alpha_eq(&lam("x", unit(), pair(var(0), var(3)))));
    }

    #[test]
    fn substitution_composition() {
        // t[u/x][v/y] = t[v/y][u[v/y]/x] when x not free in v.
        // Contexts: ... y:B, x:A with x = Var(0), y = Var(1).
        let t = pair(var(0), pair(var(1), var(2)));
        let u = pair(var(0), var(1)); // in context [w, y]
        let v = var(0); // in context [w]; does not mention x
        let lhs = t.subst_value(0, &u).subst_value(0, &v);
        // substitute y first: y = Var(1) in t, and v reindexed past x
        let rhs = t
            .subst_value(1, &v.shift(1))
            .subst_value(0, &u.subst_value(0, &v));
        assert!(lhs.alpha_eq(&rhs));
    }
}
