//! The two-judgement typechecker.
//!
//! Introduction forms check, elimination forms infer; lambda binders carry
//! their annotation, so inference succeeds for every term form except
//! `absurd`/`inl`/`inr` without annotations. A single `App` node covers the
//! three application rules; the checker elaborates each occurrence with the
//! rule that applied.

use crate::print;
use crate::stlc::{StlcCtx, StlcTerm, StlcType};
use crate::syntax::*;
use std::collections::BTreeMap;

/// Which application rule an `App` node was elaborated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum AppRule {
    /// `A -> B` applied to a value.
    Fun,
    /// `A => C` applied to a value; the stoup threads through the function.
    CompArrow,
    /// `C -o D` applied to a computation; the stoup threads through the argument.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum TypeErrorKind {
    UnboundVariable,
    StoupMisuse,
    SortError,
    Mismatch,
    AmbiguousApplication,
}

impl TypeErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            TypeErrorKind::UnboundVariable => "unbound variable",
            TypeErrorKind::StoupMisuse => "stoup misuse",
            TypeErrorKind::SortError => "sort error",
            TypeErrorKind::Mismatch => "mismatch",
            TypeErrorKind::AmbiguousApplication => "ambiguous application",
        }
    }
}

/// A typing error with a path into the AST (child indices from the root).
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{} at path {:?}{}{}", kind.name(), path,
    expected.as_ref().map(|e| format!(", expected {e}")).unwrap_or_default(),
    actual.as_ref().map(|a| format!(", got {a}")).unwrap_or_default())]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub path: Vec<usize>,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl TypeError {
    fn new(kind: TypeErrorKind, path: &[usize]) -> TypeError {
        TypeError {
            kind,
            path: path.to_vec(),
            expected: None,
            actual: None,
        }
    }
    fn expected(mut self, e: impl Into<String>) -> TypeError {
        self.expected = Some(e.into());
        self
    }
    fn actual(mut self, a: impl Into<String>) -> TypeError {
        self.actual = Some(a.into());
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": self.kind.name(),
            "path": self.path,
            "expected": self.expected,
            "actual": self.actual,
        })
    }
}

/// A checked judgement. The subject is the elaborated term: all optional
/// annotations are filled in, and `app_rules` records which application rule
/// fired at each `App` path.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TypedTerm {
    pub judgement: Judgement,
    pub app_rules: BTreeMap<Vec<usize>, AppRule>,
}

/// A type as parsed, before sort classification.
#[derive(Debug, Clone, PartialEq)]
pub enum RawType {
    VConst(String),
    CConst(String),
    Unit,
    WithUnit,
    TensorUnit,
    Zero,
    Prod(Box<RawType>, Box<RawType>),
    Fun(Box<RawType>, Box<RawType>),
    Lin(Box<RawType>, Box<RawType>),
    With(Box<RawType>, Box<RawType>),
    Arrow(Box<RawType>, Box<RawType>),
    Plus(Box<RawType>, Box<RawType>),
    Bang(Box<RawType>),
    Copower(Box<RawType>, Box<RawType>),
}

fn raw_to_comp(raw: &RawType, path: &mut Vec<usize>) -> Result<CompType, TypeError> {
    match raw {
        RawType::CConst(c) => Ok(CompType::Const(c.clone())),
        RawType::WithUnit => Ok(CompType::WithUnit),
        RawType::TensorUnit => Ok(CompType::TensorUnit),
        RawType::Zero => Ok(CompType::Zero),
        RawType::With(a, b) => Ok(CompType::with(
            sub(path, 0, |p| raw_to_comp(a, p))?,
            sub(path, 1, |p| raw_to_comp(b, p))?,
        )),
        RawType::Plus(a, b) => Ok(CompType::plus(
            sub(path, 0, |p| raw_to_comp(a, p))?,
            sub(path, 1, |p| raw_to_comp(b, p))?,
        )),
        RawType::Arrow(a, b) => Ok(CompType::arrow(
            sub(path, 0, |p| raw_to_value(a, p))?,
            sub(path, 1, |p| raw_to_comp(b, p))?,
        )),
        RawType::Bang(a) => Ok(CompType::bang(sub(path, 0, |p| raw_to_value(a, p))?)),
        RawType::Copower(a, b) => Ok(CompType::copower(
            sub(path, 0, |p| raw_to_value(a, p))?,
            sub(path, 1, |p| raw_to_comp(b, p))?,
        )),
        RawType::VConst(_)
        | RawType::Unit
        | RawType::Prod(_, _)
        | RawType::Fun(_, _)
        | RawType::Lin(_, _) => Err(TypeError::new(TypeErrorKind::SortError, path)
            .expected("a computation type")
            .actual("a value type")),
    }
}

fn raw_to_value(raw: &RawType, path: &mut Vec<usize>) -> Result<ValueType, TypeError> {
    match raw {
        RawType::VConst(c) => Ok(ValueType::Const(c.clone())),
        RawType::Unit => Ok(ValueType::Unit),
        RawType::Prod(a, b) => Ok(ValueType::prod(
            sub(path, 0, |p| raw_to_value(a, p))?,
            sub(path, 1, |p| raw_to_value(b, p))?,
        )),
        RawType::Fun(a, b) => Ok(ValueType::fun(
            sub(path, 0, |p| raw_to_value(a, p))?,
            sub(path, 1, |p| raw_to_value(b, p))?,
        )),
        RawType::Lin(a, b) => Ok(ValueType::lin(
            sub(path, 0, |p| raw_to_comp(a, p))?,
            sub(path, 1, |p| raw_to_comp(b, p))?,
        )),
        other => Ok(ValueType::embed(raw_to_comp(other, path)?)),
    }
}

fn sub<T>(
    path: &mut Vec<usize>,
    i: usize,
    f: impl FnOnce(&mut Vec<usize>) -> Result<T, TypeError>,
) -> Result<T, TypeError> {
    path.push(i);
    let r = f(path);
    path.pop();
    r
}

/// Classify a raw type per the two-sorted grammar, rejecting ill-sorted
/// operands (there is no coercion from value types into computation types).
pub fn well_formed_type(raw: &RawType) -> Result<SortedType, TypeError> {
    let mut path = Vec::new();
    match raw {
        RawType::VConst(_)
        | RawType::Unit
        | RawType::Prod(_, _)
        | RawType::Fun(_, _)
        | RawType::Lin(_, _) => Ok(SortedType::Value(raw_to_value(raw, &mut path)?)),
        _ => Ok(SortedType::Comp(raw_to_comp(raw, &mut path)?)),
    }
}

struct Checker {
    gamma: Vec<(String, ValueType)>,
    app_rules: BTreeMap<Vec<usize>, AppRule>,
}

/// Judgement types are compared after normalizing the embedded-computation
/// view away.
fn types_agree(a: &SortedType, b: &SortedType) -> bool {
    a.clone().normalized() == b.clone().normalized()
}

impl Checker {
    fn var_type(&self, i: usize) -> Option<&ValueType> {
        let n = self.gamma.len();
        if i < n {
            Some(&self.gamma[n - 1 - i].1)
        } else {
            None
        }
    }

    fn mismatch(
        &self,
        path: &[usize],
        expected: Option<&SortedType>,
        actual: &SortedType,
    ) -> TypeError {
        let e = TypeError::new(TypeErrorKind::Mismatch, path).actual(print::show_sorted(actual));
        match expected {
            Some(x) => e.expected(print::show_sorted(x)),
            None => e,
        }
    }

    fn finish(
        &self,
        path: &[usize],
        got: SortedType,
        expected: Option<&SortedType>,
        elab: Term,
    ) -> Result<(SortedType, Term), TypeError> {
        let got = got.normalized();
        match expected {
            Some(want) if !types_agree(&got, want) => Err(self.mismatch(path, Some(want), &got)),
            _ => Ok((got, elab)),
        }
    }

    /// Check (or infer) `t` under the current gamma, with ambient stoup type
    /// `stoup`, against `expected` when present. Returns the judgement type
    /// and the elaborated term.
    fn check(
        &mut self,
        path: &mut Vec<usize>,
        t: &Term,
        stoup: Option<&CompType>,
        expected: Option<&SortedType>,
    ) -> Result<(SortedType, Term), TypeError> {
        use SortedType as S;
        let want_comp = |e: Option<&SortedType>| -> Option<CompType> {
            match e.map(|x| x.clone().normalized()) {
                Some(S::Comp(c)) => Some(c),
                _ => None,
            }
        };
        match t {
            Term::Var(i) => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("a variable cannot consume the stoup"));
                }
                let ty = self
                    .var_type(*i)
                    .cloned()
                    .ok_or_else(|| {
                        TypeError::new(TypeErrorKind::UnboundVariable, path)
                            .actual(format!("variable index {i}"))
                    })?;
                self.finish(path, S::Value(ty), expected, t.clone())
            }
            Term::Stoup => match stoup {
                Some(d) => self.finish(path, S::Comp(d.clone()), expected, t.clone()),
                None => Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                    .actual("stoup variable used where the stoup is empty")),
            },
            Term::Star => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("* cannot consume the stoup"));
                }
                self.finish(path, S::Value(ValueType::Unit), expected, t.clone())
            }
            Term::Pair(a, b) => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("a value pair cannot consume the stoup"));
                }
                let (ea, eb) = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Value(ValueType::Prod(x, y))) => {
                        (Some(S::Value(*x)), Some(S::Value(*y)))
                    }
                    Some(other) => {
                        return Err(self.mismatch(
                            path,
                            Some(&other),
                            &S::Value(ValueType::prod(ValueType::Unit, ValueType::Unit)),
                        )
                        .actual("a value pair"))
                    }
                    None => (None, None),
                };
                let (ta, na) = sub(path, 0, |p| self.check(p, a, None, ea.as_ref()))?;
                let (tb, nb) = sub(path, 1, |p| self.check(p, b, None, eb.as_ref()))?;
                let ty = ValueType::prod(ta.as_value(), tb.as_value());
                Ok((S::Value(ty), pair(na, nb)))
            }
            Term::Fst(a) | Term::Snd(a) => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("a value projection cannot consume the stoup"));
                }
                let (ta, na) = sub(path, 0, |p| self.check(p, a, None, None))?;
                match ta {
                    S::Value(ValueType::Prod(x, y)) => {
                        let ty = if matches!(t, Term::Fst(_)) { *x } else { *y };
                        let elab = if matches!(t, Term::Fst(_)) {
                            fst(na)
                        } else {
                            snd(na)
                        };
                        self.finish(path, S::Value(ty), expected, elab)
                    }
                    other => Err(self
                        .mismatch(path, None, &other)
                        .expected("a product type")),
                }
            }
            Term::Lam(h, ann, body) => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("a value lambda cannot consume the stoup"));
                }
                let body_want = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Value(ValueType::Fun(a, b))) => {
                        if *a != *ann {
                            return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                                .expected(print::show_value_type(&a))
                                .actual(print::show_value_type(ann)));
                        }
                        Some(S::Value(*b))
                    }
                    Some(other) => {
                        return Err(self
                            .mismatch(path, Some(&other), &S::Value(ValueType::Unit))
                            .actual("a value lambda"))
                    }
                    None => None,
                };
                self.gamma.push((h.clone(), ann.clone()));
                let r = sub(path, 0, |p| self.check(p, body, None, body_want.as_ref()));
                self.gamma.pop();
                let (tb, nb) = r?;
                let ty = ValueType::fun(ann.clone(), tb.as_value());
                Ok((S::Value(ty), lam(h, ann.clone(), nb)))
            }
            Term::CStar => self.finish(path, S::Comp(CompType::WithUnit), expected, t.clone()),
            Term::CPair(a, b) => {
                let (ea, eb) = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Comp(CompType::With(x, y))) => {
                        (Some(S::Comp(*x)), Some(S::Comp(*y)))
                    }
                    Some(other) => {
                        return Err(self
                            .mismatch(path, Some(&other), &S::Comp(CompType::WithUnit))
                            .actual("a with-pair"))
                    }
                    None => (None, None),
                };
                let (ta, na) = sub(path, 0, |p| self.check(p, a, stoup, ea.as_ref()))?;
                let (tb, nb) = sub(path, 1, |p| self.check(p, b, stoup, eb.as_ref()))?;
                let (ca, cb) = match (ta, tb) {
                    (S::Comp(ca), S::Comp(cb)) => (ca, cb),
                    _ => unreachable!("with-pair components check at computation types"),
                };
                Ok((S::Comp(CompType::with(ca, cb)), cpair(na, nb)))
            }
            Term::CFst(a) | Term::CSnd(a) => {
                let (ta, na) = sub(path, 0, |p| self.check(p, a, stoup, None))?;
                match ta {
                    S::Comp(CompType::With(x, y)) => {
                        let ty = if matches!(t, Term::CFst(_)) { *x } else { *y };
                        let elab = if matches!(t, Term::CFst(_)) {
                            cfst(na)
                        } else {
                            csnd(na)
                        };
                        self.finish(path, S::Comp(ty), expected, elab)
                    }
                    other => Err(self
                        .mismatch(path, None, &other)
                        .expected("a with-product type")),
                }
            }
            Term::CLam(h, ann, body) => {
                let body_want = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Comp(CompType::Arrow(a, b))) => {
                        if *a != *ann {
                            return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                                .expected(print::show_value_type(&a))
                                .actual(print::show_value_type(ann)));
                        }
                        Some(S::Comp(*b))
                    }
                    Some(other) => {
                        return Err(self
                            .mismatch(path, Some(&other), &S::Comp(CompType::WithUnit))
                            .actual("a computation lambda"))
                    }
                    None => None,
                };
                self.gamma.push((h.clone(), ann.clone()));
                let r = sub(path, 0, |p| self.check(p, body, stoup, body_want.as_ref()));
                self.gamma.pop();
                let (tb, nb) = r?;
                let cb = match tb {
                    S::Comp(c) => c,
                    other => return Err(self.mismatch(path, None, &other).expected("a computation type")),
                };
                Ok((
                    S::Comp(CompType::arrow(ann.clone(), cb)),
                    clam(h, ann.clone(), nb),
                ))
            }
            Term::Top => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("top cannot consume the stoup"));
                }
                self.finish(path, S::Comp(CompType::TensorUnit), expected, t.clone())
            }
            Term::ILet(a, b) => {
                let tensor = S::Comp(CompType::TensorUnit);
                let (_, na) = sub(path, 0, |p| self.check(p, a, stoup, Some(&tensor)))?;
                // The continuation is a value judgement of computation type.
                let (tb, nb) = sub(path, 1, |p| self.check(p, b, None, expected))?;
                match tb {
                    S::Comp(_) => Ok((tb, ilet(na, nb))),
                    other => Err(self.mismatch(path, None, &other).expected("a computation type")),
                }
            }
            Term::Bang(a) => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("! introduction has an empty stoup premise"));
                }
                let ea = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Comp(CompType::Bang(x))) => Some(S::Value(*x)),
                    Some(other) => {
                        return Err(self
                            .mismatch(path, Some(&other), &S::Comp(CompType::WithUnit))
                            .actual("a ! introduction"))
                    }
                    None => None,
                };
                let (ta, na) = sub(path, 0, |p| self.check(p, a, None, ea.as_ref()))?;
                Ok((S::Comp(CompType::bang(ta.as_value())), bang(na)))
            }
            Term::BangLet(a, h, b) => {
                let (ta, na) = sub(path, 0, |p| self.check(p, a, stoup, None))?;
                let x_ty = match ta {
                    S::Comp(CompType::Bang(x)) => *x,
                    other => {
                        return Err(self
                            .mismatch(path, None, &other)
                            .expected("a ! type as let-! subject"))
                    }
                };
                self.gamma.push((h.clone(), x_ty));
                let r = sub(path, 1, |p| self.check(p, b, None, expected));
                self.gamma.pop();
                let (tb, nb) = r?;
                match tb {
                    S::Comp(_) => Ok((tb, banglet(na, h, nb))),
                    other => Err(self.mismatch(path, None, &other).expected("a computation type")),
                }
            }
            Term::Copow(a, b) => {
                let (ea, eb) = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Comp(CompType::Copower(x, y))) => {
                        (Some(S::Value(*x)), Some(S::Comp(*y)))
                    }
                    Some(other) => {
                        return Err(self
                            .mismatch(path, Some(&other), &S::Comp(CompType::WithUnit))
                            .actual("a copower introduction"))
                    }
                    None => (None, None),
                };
                let (ta, na) = sub(path, 0, |p| self.check(p, a, None, ea.as_ref()))?;
                let (tb, nb) = sub(path, 1, |p| self.check(p, b, stoup, eb.as_ref()))?;
                let cb = match tb {
                    S::Comp(c) => c,
                    other => return Err(self.mismatch(path, None, &other).expected("a computation type")),
                };
                Ok((
                    S::Comp(CompType::copower(ta.as_value(), cb)),
                    copow(na, nb),
                ))
            }
            Term::CopowLet(s, hx, hy, b) => {
                let (ts, ns) = sub(path, 0, |p| self.check(p, s, stoup, None))?;
                let (x_ty, y_ty) = match ts {
                    S::Comp(CompType::Copower(x, y)) => (*x, *y),
                    other => {
                        return Err(self
                            .mismatch(path, None, &other)
                            .expected("a copower type as let-(*) subject"))
                    }
                };
                self.gamma.push((hx.clone(), x_ty));
                let r = sub(path, 1, |p| self.check(p, b, Some(&y_ty), expected));
                self.gamma.pop();
                let (tb, nb) = r?;
                match tb {
                    S::Comp(_) => Ok((
                        tb,
                        Term::CopowLet(Box::new(ns), hx.clone(), hy.clone(), Box::new(nb)),
                    )),
                    other => Err(self.mismatch(path, None, &other).expected("a computation type")),
                }
            }
            Term::Absurd(ann, a) => {
                let zero = S::Comp(CompType::Zero);
                let (_, na) = sub(path, 0, |p| self.check(p, a, stoup, Some(&zero)))?;
                let result = match (ann, want_comp(expected)) {
                    (Some(c), Some(w)) => {
                        if *c != w {
                            return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                                .expected(print::show_comp_type(&w))
                                .actual(print::show_comp_type(c)));
                        }
                        w
                    }
                    (Some(c), None) => c.clone(),
                    (None, Some(w)) => w,
                    (None, None) => {
                        return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                            .expected("a result-type annotation on absurd")
                            .actual("no annotation and no expected type"))
                    }
                };
                Ok((
                    S::Comp(result.clone()),
                    Term::Absurd(Some(result), Box::new(na)),
                ))
            }
            Term::Inl(ann, a) | Term::Inr(ann, a) => {
                let is_inl = matches!(t, Term::Inl(_, _));
                let (mine, other_ann) = match want_comp(expected) {
                    Some(CompType::Plus(l, r)) => {
                        if is_inl {
                            (Some(*l), Some(*r))
                        } else {
                            (Some(*r), Some(*l))
                        }
                    }
                    Some(w) => {
                        return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                            .expected(print::show_comp_type(&w))
                            .actual("a sum injection"))
                    }
                    None => (None, None),
                };
                if let (Some(a1), Some(a2)) = (ann.as_ref(), other_ann.as_ref()) {
                    if a1 != a2 {
                        return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                            .expected(print::show_comp_type(a2))
                            .actual(print::show_comp_type(a1)));
                    }
                }
                let other_side = match other_ann.or_else(|| ann.clone()) {
                    Some(c) => c,
                    None => {
                        return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                            .expected("a summand annotation on inl/inr")
                            .actual("no annotation and no expected type"))
                    }
                };
                let want_mine = mine.map(S::Comp);
                let (ta, na) = sub(path, 0, |p| self.check(p, a, stoup, want_mine.as_ref()))?;
                let ca = match ta {
                    S::Comp(c) => c,
                    other => return Err(self.mismatch(path, None, &other).expected("a computation type")),
                };
                let (ty, elab) = if is_inl {
                    (
                        CompType::plus(ca, other_side.clone()),
                        Term::Inl(Some(other_side), Box::new(na)),
                    )
                } else {
                    (
                        CompType::plus(other_side.clone(), ca),
                        Term::Inr(Some(other_side), Box::new(na)),
                    )
                };
                Ok((S::Comp(ty), elab))
            }
            Term::Case(s, hx, a, hy, b) => {
                let (ts, ns) = sub(path, 0, |p| self.check(p, s, stoup, None))?;
                let (l, r) = match ts {
                    S::Comp(CompType::Plus(l, r)) => (*l, *r),
                    other => {
                        return Err(self
                            .mismatch(path, None, &other)
                            .expected("a sum type as case subject"))
                    }
                };
                let (ta, na) = sub(path, 1, |p| self.check(p, a, Some(&l), expected))?;
                // Branches agree on the result type.
                let (tb, nb) = sub(path, 2, |p| self.check(p, b, Some(&r), Some(&ta)))?;
                match tb {
                    S::Comp(_) => Ok((
                        tb,
                        Term::Case(
                            Box::new(ns),
                            hx.clone(),
                            Box::new(na),
                            hy.clone(),
                            Box::new(nb),
                        ),
                    )),
                    other => Err(self.mismatch(path, None, &other).expected("a computation type")),
                }
            }
            Term::LinLam(h, ann, body) => {
                if stoup.is_some() {
                    return Err(TypeError::new(TypeErrorKind::StoupMisuse, path)
                        .actual("a linear lambda cannot consume an outer stoup"));
                }
                let body_want = match expected.map(|x| x.clone().normalized()) {
                    Some(S::Value(ValueType::Lin(c, d))) => {
                        if *c != *ann {
                            return Err(TypeError::new(TypeErrorKind::Mismatch, path)
                                .expected(print::show_comp_type(&c))
                                .actual(print::show_comp_type(ann)));
                        }
                        Some(S::Comp(*d))
                    }
                    Some(other) => {
                        return Err(self
                            .mismatch(path, Some(&other), &S::Value(ValueType::Unit))
                            .actual("a linear lambda"))
                    }
                    None => None,
                };
                let (tb, nb) = sub(path, 0, |p| self.check(p, body, Some(ann), body_want.as_ref()))?;
                let cb = match tb {
                    S::Comp(c) => c,
                    other => return Err(self.mismatch(path, None, &other).expected("a computation type")),
                };
                Ok((
                    S::Value(ValueType::lin(ann.clone(), cb)),
                    linlam(h, ann.clone(), nb),
                ))
            }
            Term::App(s, a) => self.check_app(path, s, a, stoup, expected),
        }
    }

    fn check_app(
        &mut self,
        path: &mut Vec<usize>,
        s: &Term,
        a: &Term,
        stoup: Option<&CompType>,
        expected: Option<&SortedType>,
    ) -> Result<(SortedType, Term), TypeError> {
        use SortedType as S;
        if stoup.is_none() {
            let (ts, ns) = sub(path, 0, |p| self.check(p, s, None, None))?;
            let (rule, arg_want, result) = match ts.clone().normalized() {
                S::Value(ValueType::Fun(x, y)) => (AppRule::Fun, S::Value(*x), S::Value(*y)),
                S::Comp(CompType::Arrow(x, y)) => {
                    (AppRule::CompArrow, S::Value(*x), S::Comp(*y))
                }
                S::Value(ValueType::Lin(c, d)) => (AppRule::Linear, S::Comp(*c), S::Comp(*d)),
                other => {
                    return Err(self
                        .mismatch(path, None, &other)
                        .expected("a function type in application position"))
                }
            };
            let (_, na) = sub(path, 1, |p| self.check(p, a, None, Some(&arg_want)))?;
            self.app_rules.insert(path.clone(), rule);
            return self.finish(path, result, expected, app(ns, na));
        }
        // Nonempty stoup: it threads through the function (=> rule) or the
        // argument (-o rule).
        let route1 = {
            let snapshot = self.app_rules.clone();
            let r = sub(path, 0, |p| self.check(p, s, stoup, None));
            match r {
                Ok((S::Comp(CompType::Arrow(x, y)), ns)) => Some((ns, *x, *y)),
                _ => {
                    self.app_rules = snapshot;
                    None
                }
            }
        };
        let route2 = {
            let snapshot = self.app_rules.clone();
            let r = sub(path, 0, |p| self.check(p, s, None, None));
            match r {
                Ok((S::Value(ValueType::Lin(c, d)), ns)) => Some((ns, *c, *d)),
                _ => {
                    self.app_rules = snapshot;
                    None
                }
            }
        };
        match (route1, route2) {
            (Some(_), Some(_)) => Err(TypeError::new(TypeErrorKind::AmbiguousApplication, path)
                .actual("both the => and -o application rules apply")),
            (Some((ns, x, y)), None) => {
                let want = S::Value(x);
                let (_, na) = sub(path, 1, |p| self.check(p, a, None, Some(&want)))?;
                self.app_rules.insert(path.clone(), AppRule::CompArrow);
                self.finish(path, S::Comp(y), expected, app(ns, na))
            }
            (None, Some((ns, c, d))) => {
                let want = S::Comp(c);
                let (_, na) = sub(path, 1, |p| self.check(p, a, stoup, Some(&want)))?;
                self.app_rules.insert(path.clone(), AppRule::Linear);
                self.finish(path, S::Comp(d), expected, app(ns, na))
            }
            (None, None) => {
                // Report the error from the route the stoup most plausibly took.
                let err_path = path.clone();
                if s.mentions_stoup() {
                    match sub(path, 0, |p| self.check(p, s, stoup, None)) {
                        Ok((other, _)) => Err(TypeError::new(TypeErrorKind::Mismatch, &err_path)
                            .expected("a computation function type")
                            .actual(print::show_sorted(&other))),
                        Err(e) => Err(e),
                    }
                } else {
                    match sub(path, 0, |p| self.check(p, s, None, None)) {
                        Ok((other, _)) => Err(TypeError::new(TypeErrorKind::Mismatch, &err_path)
                            .expected("a linear function type")
                            .actual(print::show_sorted(&other))),
                        Err(e) => Err(e),
                    }
                }
            }
        }
    }
}

/// Lean type-only inference for the rewriting engine, which only ever sees
/// well-typed intermediate terms: no elaboration, no paths, no error detail.
/// `gamma` is a scratch stack; entries pushed during recursion are popped.
/// The result is normalized (never `Value(Embed(_))`).
fn fast_infer(
    gamma: &mut Vec<ValueType>,
    stoup: Option<&CompType>,
    t: &Term,
) -> Option<SortedType> {
    use SortedType as S;
    let found = match t {
        Term::Var(i) => {
            if stoup.is_some() || *i >= gamma.len() {
                return None;
            }
            S::Value(gamma[gamma.len() - 1 - i].clone())
        }
        Term::Stoup => S::Comp(stoup?.clone()),
        Term::Star => {
            if stoup.is_some() {
                return None;
            }
            S::Value(ValueType::Unit)
        }
        Term::Pair(a, b) => {
            if stoup.is_some() {
                return None;
            }
            let ta = fast_infer(gamma, None, a)?.as_value();
            let tb = fast_infer(gamma, None, b)?.as_value();
            S::Value(ValueType::prod(ta, tb))
        }
        Term::Fst(a) | Term::Snd(a) => {
            if stoup.is_some() {
                return None;
            }
            match fast_infer(gamma, None, a)? {
                S::Value(ValueType::Prod(x, y)) => {
                    S::Value(if matches!(t, Term::Fst(_)) { *x } else { *y })
                }
                _ => return None,
            }
        }
        Term::Lam(_, ann, b) => {
            if stoup.is_some() {
                return None;
            }
            gamma.push(ann.clone());
            let r = fast_infer(gamma, None, b);
            gamma.pop();
            S::Value(ValueType::fun(ann.clone(), r?.as_value()))
        }
        Term::CStar => S::Comp(CompType::WithUnit),
        Term::CPair(a, b) => {
            let ta = fast_infer(gamma, stoup, a)?;
            let tb = fast_infer(gamma, stoup, b)?;
            match (ta, tb) {
                (S::Comp(x), S::Comp(y)) => S::Comp(CompType::with(x, y)),
                _ => return None,
            }
        }
        Term::CFst(a) | Term::CSnd(a) => match fast_infer(gamma, stoup, a)? {
            S::Comp(CompType::With(x, y)) => {
                S::Comp(if matches!(t, Term::CFst(_)) { *x } else { *y })
            }
            _ => return None,
        },
        Term::CLam(_, ann, b) => {
            gamma.push(ann.clone());
            let r = fast_infer(gamma, stoup, b);
            gamma.pop();
            match r? {
                S::Comp(c) => S::Comp(CompType::arrow(ann.clone(), c)),
                _ => return None,
            }
        }
        Term::Top => {
            if stoup.is_some() {
                return None;
            }
            S::Comp(CompType::TensorUnit)
        }
        Term::ILet(a, b) => {
            match fast_infer(gamma, stoup, a)? {
                S::Comp(CompType::TensorUnit) => {}
                _ => return None,
            }
            match fast_infer(gamma, None, b)? {
                S::Comp(c) => S::Comp(c),
                _ => return None,
            }
        }
        Term::Bang(a) => {
            if stoup.is_some() {
                return None;
            }
            S::Comp(CompType::bang(fast_infer(gamma, None, a)?.as_value()))
        }
        Term::BangLet(a, _, b) => {
            let x_ty = match fast_infer(gamma, stoup, a)? {
                S::Comp(CompType::Bang(x)) => *x,
                _ => return None,
            };
            gamma.push(x_ty);
            let r = fast_infer(gamma, None, b);
            gamma.pop();
            match r? {
                S::Comp(c) => S::Comp(c),
                _ => return None,
            }
        }
        Term::Copow(a, b) => {
            let ta = fast_infer(gamma, None, a)?.as_value();
            match fast_infer(gamma, stoup, b)? {
                S::Comp(c) => S::Comp(CompType::copower(ta, c)),
                _ => return None,
            }
        }
        Term::CopowLet(s, _, _, b) => {
            let (x_ty, y_ty) = match fast_infer(gamma, stoup, s)? {
                S::Comp(CompType::Copower(x, y)) => (*x, *y),
                _ => return None,
            };
            gamma.push(x_ty);
            let r = fast_infer(gamma, Some(&y_ty), b);
            gamma.pop();
            match r? {
                S::Comp(c) => S::Comp(c),
                _ => return None,
            }
        }
        Term::Absurd(ann, a) => {
            match fast_infer(gamma, stoup, a)? {
                S::Comp(CompType::Zero) => {}
                _ => return None,
            }
            S::Comp(ann.clone()?)
        }
        Term::Inl(ann, a) | Term::Inr(ann, a) => {
            let mine = match fast_infer(gamma, stoup, a)? {
                S::Comp(c) => c,
                _ => return None,
            };
            let other = ann.clone()?;
            S::Comp(if matches!(t, Term::Inl(_, _)) {
                CompType::plus(mine, other)
            } else {
                CompType::plus(other, mine)
            })
        }
        Term::Case(s, _, a, _, b) => {
            let (x_ty, y_ty) = match fast_infer(gamma, stoup, s)? {
                S::Comp(CompType::Plus(x, y)) => (*x, *y),
                _ => return None,
            };
            let ta = fast_infer(gamma, Some(&x_ty), a)?;
            let tb = fast_infer(gamma, Some(&y_ty), b)?;
            if ta != tb {
                return None;
            }
            ta
        }
        Term::LinLam(_, ann, b) => {
            if stoup.is_some() {
                return None;
            }
            match fast_infer(gamma, Some(ann), b)? {
                S::Comp(c) => S::Value(ValueType::lin(ann.clone(), c)),
                _ => return None,
            }
        }
        Term::App(s, a) => {
            if stoup.is_none() {
                match fast_infer(gamma, None, s)? {
                    S::Value(ValueType::Fun(x, y)) => {
                        let ta = fast_infer(gamma, None, a)?;
                        if ta != S::Value((*x).clone()).normalized() {
                            return None;
                        }
                        S::Value(*y)
                    }
                    S::Comp(CompType::Arrow(x, y)) => {
                        let ta = fast_infer(gamma, None, a)?;
                        if ta != S::Value((*x).clone()).normalized() {
                            return None;
                        }
                        S::Comp(*y)
                    }
                    S::Value(ValueType::Lin(x, y)) => {
                        let ta = fast_infer(gamma, None, a)?;
                        if ta != S::Comp((*x).clone()) {
                            return None;
                        }
                        S::Comp(*y)
                    }
                    _ => return None,
                }
            } else {
                // => route first (stoup through the function), then -o.
                if let Some(S::Comp(CompType::Arrow(x, y))) = fast_infer(gamma, stoup, s) {
                    let ta = fast_infer(gamma, None, a)?;
                    if ta != S::Value((*x).clone()).normalized() {
                        return None;
                    }
                    S::Comp(*y)
                } else if let Some(S::Value(ValueType::Lin(x, y))) = fast_infer(gamma, None, s)
                {
                    let ta = fast_infer(gamma, stoup, a)?;
                    if ta != S::Comp((*x).clone()) {
                        return None;
                    }
                    S::Comp(*y)
                } else {
                    return None;
                }
            }
        }
    };
    Some(found.normalized())
}

/// Infer the judgement type of `t` under nameless context types; used by the
/// rewriting engine, which only ever sees well-typed intermediate terms.
pub(crate) fn infer_sorted(
    gamma_types: &[ValueType],
    stoup: Option<&CompType>,
    t: &Term,
) -> Option<SortedType> {
    let mut gamma = gamma_types.to_vec();
    fast_infer(&mut gamma, stoup, t)
}

/// Does `t` check at `expected` under the given context and stoup type?
pub(crate) fn checks_at(
    gamma_types: &[ValueType],
    stoup: Option<&CompType>,
    t: &Term,
    expected: &SortedType,
) -> bool {
    let mut gamma = gamma_types.to_vec();
    match fast_infer(&mut gamma, stoup, t) {
        Some(got) => got == expected.clone().normalized(),
        None => false,
    }
}

fn run_check(
    gamma: &[(String, ValueType)],
    stoup: Option<&(String, CompType)>,
    t: &Term,
    expected: Option<&SortedType>,
) -> Result<TypedTerm, TypeError> {
    let mut names: Vec<&str> = Vec::new();
    for (n, _) in gamma {
        if names.contains(&n.as_str()) {
            return Err(TypeError::new(TypeErrorKind::Mismatch, &[])
                .actual(format!("duplicate context name {n}")));
        }
        names.push(n);
    }
    let mut ck = Checker {
        gamma: gamma.to_vec(),
        app_rules: BTreeMap::new(),
    };
    let mut path = Vec::new();
    let expected = expected.map(|e| e.clone().normalized());
    let (ty, elab) = ck.check(&mut path, t, stoup.map(|(_, c)| c), expected.as_ref())?;
    Ok(TypedTerm {
        judgement: Judgement {
            gamma: gamma.to_vec(),
            stoup: stoup.cloned(),
            subject: elab,
            ty,
        },
        app_rules: ck.app_rules,
    })
}

/// Check a value judgement `gamma |- t : A`. On success the judgement has an
/// empty stoup; the type is inferred when `expected` is absent.
pub fn check_value(
    gamma: &[(String, ValueType)],
    t: &Term,
    expected: Option<&ValueType>,
) -> Result<TypedTerm, TypeError> {
    let e = expected.map(|v| SortedType::Value(v.clone()));
    run_check(gamma, None, t, e.as_ref())
}

/// Check a computation judgement `gamma | z:C |- t : D`.
pub fn check_comp(
    gamma: &[(String, ValueType)],
    stoup: &(String, CompType),
    t: &Term,
    expected: Option<&CompType>,
) -> Result<TypedTerm, TypeError> {
    let e = expected.map(|c| SortedType::Comp(c.clone()));
    run_check(gamma, Some(stoup), t, e.as_ref())
}

/// Re-check an arbitrary judgement as given.
pub fn check_judgement(j: &Judgement) -> Result<TypedTerm, TypeError> {
    run_check(
        &j.gamma,
        j.stoup.as_ref(),
        &j.subject,
        Some(&j.ty.clone().normalized()),
    )
}

/// Typing for the simply-typed source calculus.
pub fn check_stlc(theta: &StlcCtx, m: &StlcTerm) -> Result<StlcType, TypeError> {
    fn go(theta: &mut Vec<(String, StlcType)>, m: &StlcTerm, path: &mut Vec<usize>) -> Result<StlcType, TypeError> {
        match m {
            StlcTerm::Var(i) => {
                let n = theta.len();
                if *i < n {
                    Ok(theta[n - 1 - i].1.clone())
                } else {
                    Err(TypeError::new(TypeErrorKind::UnboundVariable, path)
                        .actual(format!("variable index {i}")))
                }
            }
            StlcTerm::Star => Ok(StlcType::Unit),
            StlcTerm::Pair(a, b) => {
                let ta = sub(path, 0, |p| go(theta, a, p))?;
                let tb = sub(path, 1, |p| go(theta, b, p))?;
                Ok(StlcType::prod(ta, tb))
            }
            StlcTerm::Fst(a) | StlcTerm::Snd(a) => {
                let ta = sub(path, 0, |p| go(theta, a, p))?;
                match ta {
                    StlcType::Prod(x, y) => {
                        Ok(if matches!(m, StlcTerm::Fst(_)) { *x } else { *y })
                    }
                    other => Err(TypeError::new(TypeErrorKind::Mismatch, path)
                        .expected("a product type")
                        .actual(print::show_stlc_type(&other))),
                }
            }
            StlcTerm::Lam(h, ann, b) => {
                theta.push((h.clone(), ann.clone()));
                let r = sub(path, 0, |p| go(theta, b, p));
                theta.pop();
                Ok(StlcType::fun(ann.clone(), r?))
            }
            StlcTerm::App(a, b) => {
                let ta = sub(path, 0, |p| go(theta, a, p))?;
                match ta {
                    StlcType::Fun(x, y) => {
                        let tb = sub(path, 1, |p| go(theta, b, p))?;
                        if tb != *x {
                            Err(TypeError::new(TypeErrorKind::Mismatch, path)
                                .expected(print::show_stlc_type(&x))
                                .actual(print::show_stlc_type(&tb)))
                        } else {
                            Ok(*y)
                        }
                    }
                    other => Err(TypeError::new(TypeErrorKind::Mismatch, path)
                        .expected("a function type")
                        .actual(print::show_stlc_type(&other))),
                }
            }
        }
    }
    let mut th = theta.clone();
    go(&mut th, m, &mut Vec::new())
}

/// Move the stoup hypothesis into the value context: from
/// `gamma | z:C |- t : D` to `gamma, z:C |- t : D` with the same subject
/// (up to the representation of the now-bound variable).
pub fn shift_stoup(tt: &TypedTerm) -> Result<TypedTerm, TypeError> {
    let (name, c) = tt
        .judgement
        .stoup
        .clone()
        .ok_or_else(|| TypeError::new(TypeErrorKind::StoupMisuse, &[]).actual("no stoup to shift"))?;
    let subject = tt.judgement.subject.shift(1).subst_stoup(&var(0));
    let mut gamma = tt.judgement.gamma.clone();
    let mut fresh = name.clone();
    while gamma.iter().any(|(n, _)| *n == fresh) {
        fresh.push('\'');
    }
    gamma.push((fresh, ValueType::embed(c)));
    run_check(&gamma, None, &subject, Some(&tt.judgement.ty.clone().normalized()))
}

/// Insert a fresh hypothesis at `pos` (0 = outermost); variable indices are
/// adjusted as needed. Insertion at position 0 leaves the subject unchanged.
pub fn weaken(
    tt: &TypedTerm,
    pos: usize,
    name: &str,
    ty: &ValueType,
) -> Result<TypedTerm, TypeError> {
    let n = tt.judgement.gamma.len();
    assert!(pos <= n, "weakening position out of range");
    // Variables pointing at entries outside the insertion point shift by one.
    let cutoff = n - pos;
    let subject = tt.judgement.subject.shift_from(1, cutoff);
    let mut gamma = tt.judgement.gamma.clone();
    gamma.insert(pos, (name.to_string(), ty.clone()));
    run_check(
        &gamma,
        tt.judgement.stoup.as_ref(),
        &subject,
        Some(&tt.judgement.ty.clone().normalized()),
    )
}

/// Verify that the stoup threads linearly through the derivation: along every
/// additive branch it is consumed exactly once (`cstar` counts as a sink).
pub fn stoup_linear(tt: &TypedTerm) -> bool {
    #[derive(PartialEq, Clone, Copy)]
    enum Use {
        Zero,
        One,
    }
    fn go(
        t: &Term,
        path: &mut Vec<usize>,
        rules: &BTreeMap<Vec<usize>, AppRule>,
        has_stoup: bool,
    ) -> Option<Use> {
        let consumed = |u: Use| -> Option<Use> { Some(u) };
        match t {
            Term::Stoup => {
                if has_stoup {
                    consumed(Use::One)
                } else {
                    None
                }
            }
            Term::CStar => consumed(if has_stoup { Use::One } else { Use::Zero }),
            Term::Var(_) | Term::Star | Term::Top => consumed(Use::Zero),
            Term::Pair(a, b) => {
                let ua = sub_path(path, 0, |p| go(a, p, rules, false))?;
                let ub = sub_path(path, 1, |p| go(b, p, rules, false))?;
                if ua == Use::Zero && ub == Use::Zero {
                    consumed(Use::Zero)
                } else {
                    None
                }
            }
            Term::Fst(a) | Term::Snd(a) | Term::Bang(a) => {
                let u = sub_path(path, 0, |p| go(a, p, rules, false))?;
                if u == Use::Zero {
                    consumed(Use::Zero)
                } else {
                    None
                }
            }
            Term::Lam(_, _, a) => {
                let u = sub_path(path, 0, |p| go(a, p, rules, false))?;
                (u == Use::Zero).then_some(Use::Zero)
            }
            Term::CPair(a, b) => {
                let ua = sub_path(path, 0, |p| go(a, p, rules, has_stoup))?;
                let ub = sub_path(path, 1, |p| go(b, p, rules, has_stoup))?;
                (ua == ub).then_some(ua)
            }
            Term::CFst(a) | Term::CSnd(a) | Term::Absurd(_, a) | Term::Inl(_, a)
            | Term::Inr(_, a) => sub_path(path, 0, |p| go(a, p, rules, has_stoup)),
            Term::CLam(_, _, a) => sub_path(path, 0, |p| go(a, p, rules, has_stoup)),
            Term::ILet(a, b) | Term::BangLet(a, _, b) => {
                let ua = sub_path(path, 0, |p| go(a, p, rules, has_stoup))?;
                let ub = sub_path(path, 1, |p| go(b, p, rules, false))?;
                (ub == Use::Zero).then_some(ua)
            }
            Term::Copow(a, b) => {
                let ua = sub_path(path, 0, |p| go(a, p, rules, false))?;
                let ub = sub_path(path, 1, |p| go(b, p, rules, has_stoup))?;
                (ua == Use::Zero).then_some(ub)
            }
            Term::CopowLet(s, _, _, b) => {
                let us = sub_path(path, 0, |p| go(s, p, rules, has_stoup))?;
                let ub = sub_path(path, 1, |p| go(b, p, rules, true))?;
                (ub == Use::One).then_some(us)
            }
            Term::Case(s, _, a, _, b) => {
                let us = sub_path(path, 0, |p| go(s, p, rules, has_stoup))?;
                let ua = sub_path(path, 1, |p| go(a, p, rules, true))?;
                let ub = sub_path(path, 2, |p| go(b, p, rules, true))?;
                (ua == Use::One && ub == Use::One).then_some(us)
            }
            Term::LinLam(_, _, a) => {
                let u = sub_path(path, 0, |p| go(a, p, rules, true))?;
                (u == Use::One).then_some(Use::Zero)
            }
            Term::App(s, a) => match rules.get(path) {
                Some(AppRule::Fun) => {
                    let us = sub_path(path, 0, |p| go(s, p, rules, false))?;
                    let ua = sub_path(path, 1, |p| go(a, p, rules, false))?;
                    (us == Use::Zero && ua == Use::Zero).then_some(Use::Zero)
                }
                Some(AppRule::CompArrow) => {
                    let us = sub_path(path, 0, |p| go(s, p, rules, has_stoup))?;
                    let ua = sub_path(path, 1, |p| go(a, p, rules, false))?;
                    (ua == Use::Zero).then_some(us)
                }
                Some(AppRule::Linear) => {
                    let us = sub_path(path, 0, |p| go(s, p, rules, false))?;
                    let ua = sub_path(path, 1, |p| go(a, p, rules, has_stoup))?;
                    (us == Use::Zero).then_some(ua)
                }
                None => None,
            },
        }
    }
    fn sub_path<T>(
        path: &mut Vec<usize>,
        i: usize,
        f: impl FnOnce(&mut Vec<usize>) -> Option<T>,
    ) -> Option<T> {
        path.push(i);
        let r = f(path);
        path.pop();
        r
    }
    let has = tt.judgement.stoup.is_some();
    match go(
        &tt.judgement.subject,
        &mut Vec::new(),
        &tt.app_rules,
        has,
    ) {
        Some(u) => (u == Use::One) == has,
        None => false,
    }
}
