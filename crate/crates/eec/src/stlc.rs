//! Simply-typed lambda-calculus: the source language of the cbv/cbn and
//! linear-use CPS translations. Variables are de Bruijn indices, as in the
//! main calculus.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StlcType {
    Const(String),
    Unit,
    Prod(Box<StlcType>, Box<StlcType>),
    Fun(Box<StlcType>, Box<StlcType>),
}

impl StlcType {
    pub fn prod(a: StlcType, b: StlcType) -> StlcType {
        StlcType::Prod(Box::new(a), Box::new(b))
    }
    pub fn fun(a: StlcType, b: StlcType) -> StlcType {
        StlcType::Fun(Box::new(a), Box::new(b))
    }
    pub fn size(&self) -> usize {
        match self {
            StlcType::Const(_) | StlcType::Unit => 1,
            StlcType::Prod(a, b) | StlcType::Fun(a, b) => 1 + a.size() + b.size(),
        }
    }
    /// Constants occurring in the type.
    pub fn constants(&self, out: &mut Vec<String>) {
        match self {
            StlcType::Const(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            StlcType::Unit => {}
            StlcType::Prod(a, b) | StlcType::Fun(a, b) => {
                a.constants(out);
                b.constants(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StlcTerm {
    Var(usize),
    Star,
    Pair(Box<StlcTerm>, Box<StlcTerm>),
    Fst(Box<StlcTerm>),
    Snd(Box<StlcTerm>),
    Lam(String, StlcType, Box<StlcTerm>),
    App(Box<StlcTerm>, Box<StlcTerm>),
}

pub fn svar(i: usize) -> StlcTerm {
    StlcTerm::Var(i)
}
pub fn spair(a: StlcTerm, b: StlcTerm) -> StlcTerm {
    StlcTerm::Pair(Box::new(a), Box::new(b))
}
pub fn sfst(a: StlcTerm) -> StlcTerm {
    StlcTerm::Fst(Box::new(a))
}
pub fn ssnd(a: StlcTerm) -> StlcTerm {
    StlcTerm::Snd(Box::new(a))
}
pub fn slam(x: &str, t: StlcType, b: StlcTerm) -> StlcTerm {
    StlcTerm::Lam(x.to_string(), t, Box::new(b))
}
pub fn sapp(a: StlcTerm, b: StlcTerm) -> StlcTerm {
    StlcTerm::App(Box::new(a), Box::new(b))
}

impl StlcTerm {
    pub fn size(&self) -> usize {
        match self {
            StlcTerm::Var(_) | StlcTerm::Star => 1,
            StlcTerm::Pair(a, b) | StlcTerm::App(a, b) => 1 + a.size() + b.size(),
            StlcTerm::Fst(a) | StlcTerm::Snd(a) => 1 + a.size(),
            StlcTerm::Lam(_, _, a) => 1 + a.size(),
        }
    }

    pub fn shift_from(&self, d: isize, cutoff: usize) -> StlcTerm {
        match self {
            StlcTerm::Var(i) => {
                if *i >= cutoff {
                    StlcTerm::Var((*i as isize + d) as usize)
                } else {
                    StlcTerm::Var(*i)
                }
            }
            StlcTerm::Star => StlcTerm::Star,
            StlcTerm::Pair(a, b) => spair(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            StlcTerm::App(a, b) => sapp(a.shift_from(d, cutoff), b.shift_from(d, cutoff)),
            StlcTerm::Fst(a) => sfst(a.shift_from(d, cutoff)),
            StlcTerm::Snd(a) => ssnd(a.shift_from(d, cutoff)),
            StlcTerm::Lam(h, t, a) => slam(h, t.clone(), a.shift_from(d, cutoff + 1)),
        }
    }

    pub fn shift(&self, d: isize) -> StlcTerm {
        self.shift_from(d, 0)
    }

    pub fn subst(&self, j: usize, u: &StlcTerm) -> StlcTerm {
        match self {
            StlcTerm::Var(i) => {
                if *i == j {
                    u.clone()
                } else if *i > j {
                    StlcTerm::Var(i - 1)
                } else {
                    StlcTerm::Var(*i)
                }
            }
            StlcTerm::Star => StlcTerm::Star,
            StlcTerm::Pair(a, b) => spair(a.subst(j, u), b.subst(j, u)),
            StlcTerm::App(a, b) => sapp(a.subst(j, u), b.subst(j, u)),
            StlcTerm::Fst(a) => sfst(a.subst(j, u)),
            StlcTerm::Snd(a) => ssnd(a.subst(j, u)),
            StlcTerm::Lam(h, t, a) => slam(h, t.clone(), a.subst(j + 1, &u.shift(1))),
        }
    }

    pub fn alpha_eq(&self, other: &StlcTerm) -> bool {
        use StlcTerm::*;
        match (self, other) {
            (Var(i), Var(j)) => i == j,
            (Star, Star) => true,
            (Pair(a, b), Pair(c, d)) | (App(a, b), App(c, d)) => a.alpha_eq(c) && b.alpha_eq(d),
            (Fst(a), Fst(b)) | (Snd(a), Snd(b)) => a.alpha_eq(b),
            (Lam(_, t, a), Lam(_, u, b)) => t == u && a.alpha_eq(b),
            _ => false,
        }
    }

    /// A value in the call-by-value sense: variables, `*`, lambdas, and
    /// pairs of values.
    pub fn is_value(&self) -> bool {
        match self {
            StlcTerm::Var(_) | StlcTerm::Star | StlcTerm::Lam(_, _, _) => true,
            StlcTerm::Pair(a, b) => a.is_value() && b.is_value(),
            StlcTerm::Fst(_) | StlcTerm::Snd(_) | StlcTerm::App(_, _) => false,
        }
    }

    pub fn has_free_var(&self, j: usize) -> bool {
        match self {
            StlcTerm::Var(i) => *i == j,
            StlcTerm::Star => false,
            StlcTerm::Pair(a, b) | StlcTerm::App(a, b) => {
                a.has_free_var(j) || b.has_free_var(j)
            }
            StlcTerm::Fst(a) | StlcTerm::Snd(a) => a.has_free_var(j),
            StlcTerm::Lam(_, _, a) => a.has_free_var(j + 1),
        }
    }
}

/// An STLC typing context; the innermost entry is last.
pub type StlcCtx = Vec<(String, StlcType)>;

/// The equational theory a generated pair is equal in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StlcTheory {
    /// Beta-value reduction, a sound fragment of the computational
    /// lambda-calculus equality.
    BetaValue,
    /// Full beta-eta equality.
    BetaEta,
}

impl std::fmt::Display for StlcTheory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StlcTheory::BetaValue => write!(f, "bv"),
            StlcTheory::BetaEta => write!(f, "betaeta"),
        }
    }
}
