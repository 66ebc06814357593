//! The translations: call-by-value and call-by-name into the calculus, the
//! linear-use CPS translations of the simply-typed source language, the
//! generic linear-use CPS self-translation (covariant on value judgements,
//! stoup-swapping on computation judgements), the isomorphism families for
//! the involution property, and the fullness witness construction.
//!
//! Every translation re-checks its output before returning it.

use crate::check::{check_judgement, check_stlc, infer_sorted, TypeError, TypedTerm};
use crate::stlc::{StlcCtx, StlcTerm, StlcType};
use crate::syntax::*;
use std::collections::BTreeMap;

/// The result type parameterizing the CPS translations. `CompConst` and
/// `TensorUnit` are the theorem-grade choices; `Other` permits translation
/// but disables the isomorphism and witness operations.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ResultType {
    CompConst(String),
    TensorUnit,
    Other(CompType),
}

impl ResultType {
    /// Classify an arbitrary computation type as a result type.
    pub fn new(c: CompType) -> ResultType {
        match c {
            CompType::Const(n) => ResultType::CompConst(n),
            CompType::TensorUnit => ResultType::TensorUnit,
            other => ResultType::Other(other),
        }
    }

    pub fn as_comp(&self) -> CompType {
        match self {
            ResultType::CompConst(n) => CompType::Const(n.clone()),
            ResultType::TensorUnit => CompType::TensorUnit,
            ResultType::Other(c) => c.clone(),
        }
    }

    pub fn theorem_grade(&self) -> bool {
        !matches!(self, ResultType::Other(_))
    }

    /// A diagnostic for the non-theorem-grade configuration, if any.
    pub fn warning(&self) -> Option<String> {
        match self {
            ResultType::Other(c) => Some(format!(
                "result type {} is neither a computation constant nor I; translations are \
                 defined but the involution and fullness properties are not claimed",
                crate::print::show_comp_type(c)
            )),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TranslateError {
    #[error("unsupported result type: the operation requires a computation constant or I")]
    UnsupportedResultType,
    #[error("result type collides with the paired computation constant of {0}")]
    ResultInAlphaRange(String),
    #[error("translation input does not check: {0}")]
    Input(TypeError),
    #[error("translated output failed to re-check: {0}")]
    Output(TypeError),
}

/// Pairs each source type constant `a` with a value constant `a` and a
/// computation constant `^a`. The pairing is injective by construction; the
/// namespaces are disjoint because the sorts are.
#[derive(Debug, Clone, Default)]
pub struct ConstantRegistry {
    pairs: BTreeMap<String, String>,
}

impl ConstantRegistry {
    pub fn new() -> ConstantRegistry {
        ConstantRegistry::default()
    }

    /// Override the computation constant paired with `alpha`.
    pub fn pair(&mut self, alpha: &str, comp: &str) -> &mut Self {
        self.pairs.insert(alpha.to_string(), comp.to_string());
        self
    }

    pub fn comp_of(&self, alpha: &str) -> String {
        self.pairs
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| alpha.to_string())
    }

    /// The call-by-name theorems require the result type to differ from
    /// every paired computation constant occurring in `ty`.
    pub fn check_r_disjoint(&self, ty: &StlcType, r: &ResultType) -> Result<(), TranslateError> {
        if let ResultType::CompConst(name) = r {
            let mut cs = Vec::new();
            ty.constants(&mut cs);
            for alpha in cs {
                if self.comp_of(&alpha) == *name {
                    return Err(TranslateError::ResultInAlphaRange(alpha));
                }
            }
        }
        Ok(())
    }
}

// ---- call-by-value and call-by-name ----

pub fn cbv_type(s: &StlcType) -> ValueType {
    match s {
        StlcType::Const(a) => ValueType::Const(a.clone()),
        StlcType::Unit => ValueType::Unit,
        StlcType::Prod(a, b) => ValueType::prod(cbv_type(a), cbv_type(b)),
        StlcType::Fun(a, b) => ValueType::fun(
            cbv_type(a),
            ValueType::embed(CompType::bang(cbv_type(b))),
        ),
    }
}

fn cbv_term_raw(theta: &[StlcType], m: &StlcTerm) -> (Term, StlcType) {
    match m {
        StlcTerm::Var(i) => {
            let ty = theta[theta.len() - 1 - i].clone();
            (bang(var(*i)), ty)
        }
        StlcTerm::Star => (bang(Term::Star), StlcType::Unit),
        StlcTerm::Pair(a, b) => {
            let (ta, sa) = cbv_term_raw(theta, a);
            let (tb, sb) = cbv_term_raw(theta, b);
            let t = banglet(
                ta,
                "x",
                banglet(tb.shift(1), "y", bang(pair(var(1), var(0)))),
            );
            (t, StlcType::prod(sa, sb))
        }
        StlcTerm::Fst(a) | StlcTerm::Snd(a) => {
            let (ta, sa) = cbv_term_raw(theta, a);
            let (proj, ty) = match (m, sa) {
                (StlcTerm::Fst(_), StlcType::Prod(x, _)) => (fst(var(0)), *x),
                (_, StlcType::Prod(_, y)) => (snd(var(0)), *y),
                _ => unreachable!("checked input"),
            };
            (banglet(ta, "z", bang(proj)), ty)
        }
        StlcTerm::Lam(h, ann, b) => {
            let mut th = theta.to_vec();
            th.push(ann.clone());
            let (tb, sb) = cbv_term_raw(&th, b);
            (
                bang(lam(h, cbv_type(ann), tb)),
                StlcType::fun(ann.clone(), sb),
            )
        }
        StlcTerm::App(a, b) => {
            let (ta, sa) = cbv_term_raw(theta, a);
            let (tb, _) = cbv_term_raw(theta, b);
            let ty = match sa {
                StlcType::Fun(_, y) => *y,
                _ => unreachable!("checked input"),
            };
            let t = banglet(ta, "f", banglet(tb.shift(1), "x", app(var(1), var(0))));
            (t, ty)
        }
    }
}

/// Call-by-value: a judgement `Theta |- M : tau` maps to
/// `Theta^v |- M^v : !(tau^v)`.
pub fn cbv_term(theta: &StlcCtx, m: &StlcTerm) -> Result<TypedTerm, TranslateError> {
    check_stlc(theta, m).map_err(TranslateError::Input)?;
    let types: Vec<StlcType> = theta.iter().map(|(_, t)| t.clone()).collect();
    let (subject, tau) = cbv_term_raw(&types, m);
    let j = Judgement {
        gamma: theta
            .iter()
            .map(|(n, t)| (n.clone(), cbv_type(t)))
            .collect(),
        stoup: None,
        subject,
        ty: SortedType::Comp(CompType::bang(cbv_type(&tau))),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

pub fn cbn_type(s: &StlcType, reg: &ConstantRegistry) -> CompType {
    match s {
        StlcType::Const(a) => CompType::Const(reg.comp_of(a)),
        StlcType::Unit => CompType::WithUnit,
        StlcType::Prod(a, b) => CompType::with(cbn_type(a, reg), cbn_type(b, reg)),
        StlcType::Fun(a, b) => CompType::arrow(
            ValueType::embed(cbn_type(a, reg)),
            cbn_type(b, reg),
        ),
    }
}

fn cbn_term_raw(theta: &[StlcType], m: &StlcTerm, reg: &ConstantRegistry) -> Term {
    match m {
        StlcTerm::Var(i) => var(*i),
        StlcTerm::Star => Term::CStar,
        StlcTerm::Pair(a, b) => cpair(cbn_term_raw(theta, a, reg), cbn_term_raw(theta, b, reg)),
        StlcTerm::Fst(a) => cfst(cbn_term_raw(theta, a, reg)),
        StlcTerm::Snd(a) => csnd(cbn_term_raw(theta, a, reg)),
        StlcTerm::Lam(h, ann, b) => {
            let mut th = theta.to_vec();
            th.push(ann.clone());
            clam(
                h,
                ValueType::embed(cbn_type(ann, reg)),
                cbn_term_raw(&th, b, reg),
            )
        }
        StlcTerm::App(a, b) => app(
            cbn_term_raw(theta, a, reg),
            cbn_term_raw(theta, b, reg),
        ),
    }
}

/// Call-by-name: `Theta |- M : tau` maps to `Theta^n |- M^n : tau^n`, with
/// the context holding the embedded computation types.
pub fn cbn_term(
    theta: &StlcCtx,
    m: &StlcTerm,
    reg: &ConstantRegistry,
) -> Result<TypedTerm, TranslateError> {
    let tau = check_stlc(theta, m).map_err(TranslateError::Input)?;
    let types: Vec<StlcType> = theta.iter().map(|(_, t)| t.clone()).collect();
    let subject = cbn_term_raw(&types, m, reg);
    let j = Judgement {
        gamma: theta
            .iter()
            .map(|(n, t)| (n.clone(), ValueType::embed(cbn_type(t, reg))))
            .collect(),
        stoup: None,
        subject,
        ty: SortedType::Comp(cbn_type(&tau, reg)),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

// ---- linear-use CPS translations of the source calculus ----

pub fn lincps_cbv_type(s: &StlcType, r: &ResultType) -> ValueType {
    match s {
        StlcType::Const(a) => ValueType::Const(a.clone()),
        StlcType::Unit => ValueType::Unit,
        StlcType::Prod(a, b) => {
            ValueType::prod(lincps_cbv_type(a, r), lincps_cbv_type(b, r))
        }
        StlcType::Fun(a, b) => ValueType::fun(
            lincps_cbv_type(a, r),
            ValueType::lin(
                CompType::arrow(lincps_cbv_type(b, r), r.as_comp()),
                r.as_comp(),
            ),
        ),
    }
}

/// The continuation type `sigma^cv => R`.
fn cbv_cont(s: &StlcType, r: &ResultType) -> CompType {
    CompType::arrow(lincps_cbv_type(s, r), r.as_comp())
}

fn lincps_cbv_raw(theta: &[StlcType], m: &StlcTerm, r: &ResultType) -> (Term, StlcType) {
    match m {
        StlcTerm::Var(i) => {
            let ty = theta[theta.len() - 1 - i].clone();
            (
                linlam("k", cbv_cont(&ty, r), app(Term::Stoup, var(*i))),
                ty,
            )
        }
        StlcTerm::Star => (
            linlam(
                "k",
                cbv_cont(&StlcType::Unit, r),
                app(Term::Stoup, Term::Star),
            ),
            StlcType::Unit,
        ),
        StlcTerm::Pair(a, b) => {
            let (ta, sa) = lincps_cbv_raw(theta, a, r);
            let (tb, sb) = lincps_cbv_raw(theta, b, r);
            let prod = StlcType::prod(sa.clone(), sb.clone());
            let body = app(
                ta,
                clam(
                    "x",
                    lincps_cbv_type(&sa, r),
                    app(
                        tb.shift(1),
                        clam(
                            "y",
                            lincps_cbv_type(&sb, r),
                            app(Term::Stoup, pair(var(1), var(0))),
                        ),
                    ),
                ),
            );
            (linlam("k", cbv_cont(&prod, r), body), prod)
        }
        StlcTerm::Fst(a) | StlcTerm::Snd(a) => {
            let (ta, sa) = lincps_cbv_raw(theta, a, r);
            let (sx, sy) = match sa.clone() {
                StlcType::Prod(x, y) => (*x, *y),
                _ => unreachable!("checked input"),
            };
            let (mine, proj) = if matches!(m, StlcTerm::Fst(_)) {
                (sx, fst(var(0)))
            } else {
                (sy, snd(var(0)))
            };
            let body = app(
                ta,
                clam("z", lincps_cbv_type(&sa, r), app(Term::Stoup, proj)),
            );
            (linlam("k", cbv_cont(&mine, r), body), mine)
        }
        StlcTerm::Lam(h, ann, b) => {
            let mut th = theta.to_vec();
            th.push(ann.clone());
            let (tb, sb) = lincps_cbv_raw(&th, b, r);
            let fun_ty = StlcType::fun(ann.clone(), sb);
            let body = app(Term::Stoup, lam(h, lincps_cbv_type(ann, r), tb));
            (linlam("k", cbv_cont(&fun_ty, r), body), fun_ty)
        }
        StlcTerm::App(a, b) => {
            let (ta, sa) = lincps_cbv_raw(theta, a, r);
            let (tb, sb) = lincps_cbv_raw(theta, b, r);
            let tau = match sa.clone() {
                StlcType::Fun(_, y) => *y,
                _ => unreachable!("checked input"),
            };
            let body = app(
                ta,
                clam(
                    "f",
                    lincps_cbv_type(&sa, r),
                    app(
                        tb.shift(1),
                        clam(
                            "x",
                            lincps_cbv_type(&sb, r),
                            app(app(var(1), var(0)), Term::Stoup),
                        ),
                    ),
                ),
            );
            (linlam("k", cbv_cont(&tau, r), body), tau)
        }
    }
}

/// Call-by-value linear-use CPS: `Theta |- M : tau` maps to
/// `Theta^cv |- M^cv : (tau^cv => R) -o R`.
pub fn lincps_cbv_term(
    theta: &StlcCtx,
    m: &StlcTerm,
    r: &ResultType,
) -> Result<TypedTerm, TranslateError> {
    check_stlc(theta, m).map_err(TranslateError::Input)?;
    let types: Vec<StlcType> = theta.iter().map(|(_, t)| t.clone()).collect();
    let (subject, tau) = lincps_cbv_raw(&types, m, r);
    let j = Judgement {
        gamma: theta
            .iter()
            .map(|(n, t)| (n.clone(), lincps_cbv_type(t, r)))
            .collect(),
        stoup: None,
        subject,
        ty: SortedType::Value(ValueType::lin(cbv_cont(&tau, r), r.as_comp())),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

pub fn lincps_cbn_type(s: &StlcType, reg: &ConstantRegistry, r: &ResultType) -> CompType {
    match s {
        StlcType::Const(a) => CompType::Const(reg.comp_of(a)),
        StlcType::Unit => CompType::Zero,
        StlcType::Prod(a, b) => CompType::plus(
            lincps_cbn_type(a, reg, r),
            lincps_cbn_type(b, reg, r),
        ),
        StlcType::Fun(a, b) => CompType::copower(
            ValueType::lin(lincps_cbn_type(a, reg, r), r.as_comp()),
            lincps_cbn_type(b, reg, r),
        ),
    }
}

fn lincps_cbn_raw(
    theta: &[StlcType],
    m: &StlcTerm,
    reg: &ConstantRegistry,
    r: &ResultType,
) -> (Term, StlcType) {
    let cn = |s: &StlcType| lincps_cbn_type(s, reg, r);
    match m {
        StlcTerm::Var(i) => (var(*i), theta[theta.len() - 1 - i].clone()),
        StlcTerm::Star => (
            linlam("k", CompType::Zero, absurd(r.as_comp(), Term::Stoup)),
            StlcType::Unit,
        ),
        StlcTerm::Pair(a, b) => {
            let (ta, sa) = lincps_cbn_raw(theta, a, reg, r);
            let (tb, sb) = lincps_cbn_raw(theta, b, reg, r);
            let t = linlam(
                "k",
                CompType::plus(cn(&sa), cn(&sb)),
                case(
                    Term::Stoup,
                    "x",
                    app(ta, Term::Stoup),
                    "y",
                    app(tb, Term::Stoup),
                ),
            );
            (t, StlcType::prod(sa, sb))
        }
        StlcTerm::Fst(a) | StlcTerm::Snd(a) => {
            let (ta, sa) = lincps_cbn_raw(theta, a, reg, r);
            let (sx, sy) = match sa {
                StlcType::Prod(x, y) => (*x, *y),
                _ => unreachable!("checked input"),
            };
            if matches!(m, StlcTerm::Fst(_)) {
                let t = linlam("k", cn(&sx), app(ta, inl(cn(&sy), Term::Stoup)));
                (t, sx)
            } else {
                let t = linlam("k", cn(&sy), app(ta, inr(cn(&sx), Term::Stoup)));
                (t, sy)
            }
        }
        StlcTerm::Lam(h, ann, b) => {
            let mut th = theta.to_vec();
            th.push(ann.clone());
            let (tb, sb) = lincps_cbn_raw(&th, b, reg, r);
            let fun_ty = StlcType::fun(ann.clone(), sb.clone());
            let t = linlam(
                "k",
                CompType::copower(ValueType::lin(cn(ann), r.as_comp()), cn(&sb)),
                copowlet(Term::Stoup, h, "h", app(tb, Term::Stoup)),
            );
            (t, fun_ty)
        }
        StlcTerm::App(a, b) => {
            let (ta, sa) = lincps_cbn_raw(theta, a, reg, r);
            let (tb, _) = lincps_cbn_raw(theta, b, reg, r);
            let tau = match sa {
                StlcType::Fun(_, y) => *y,
                _ => unreachable!("checked input"),
            };
            let t = linlam("k", cn(&tau), app(ta, copow(tb, Term::Stoup)));
            (t, tau)
        }
    }
}

/// Call-by-name linear-use CPS: `Theta |- M : tau` maps to
/// `Theta^cn -o R |- M^cn : tau^cn -o R`.
pub fn lincps_cbn_term(
    theta: &StlcCtx,
    m: &StlcTerm,
    reg: &ConstantRegistry,
    r: &ResultType,
) -> Result<TypedTerm, TranslateError> {
    check_stlc(theta, m).map_err(TranslateError::Input)?;
    let types: Vec<StlcType> = theta.iter().map(|(_, t)| t.clone()).collect();
    let (subject, tau) = lincps_cbn_raw(&types, m, reg, r);
    let j = Judgement {
        gamma: theta
            .iter()
            .map(|(n, t)| {
                (
                    n.clone(),
                    ValueType::lin(lincps_cbn_type(t, reg, r), r.as_comp()),
                )
            })
            .collect(),
        stoup: None,
        subject,
        ty: SortedType::Value(ValueType::lin(
            lincps_cbn_type(&tau, reg, r),
            r.as_comp(),
        )),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

// ---- the generic linear-use CPS self-translation ----

/// `A°`, the value-type translation.
pub fn self_vtype(a: &ValueType, r: &ResultType) -> ValueType {
    match a {
        ValueType::Const(n) => ValueType::Const(n.clone()),
        ValueType::Unit => ValueType::Unit,
        ValueType::Prod(x, y) => ValueType::prod(self_vtype(x, r), self_vtype(y, r)),
        ValueType::Fun(x, y) => ValueType::fun(self_vtype(x, r), self_vtype(y, r)),
        ValueType::Embed(c) => ValueType::lin(self_ctype(c, r), r.as_comp()),
        ValueType::Lin(c, d) => ValueType::lin(self_ctype(d, r), self_ctype(c, r)),
    }
}

/// `C*`, the computation-type translation. When the result type is a
/// computation constant it is translated specially, to `I`.
pub fn self_ctype(c: &CompType, r: &ResultType) -> CompType {
    match c {
        CompType::Const(n) => match r {
            ResultType::CompConst(m) if m == n => CompType::TensorUnit,
            _ => CompType::Const(n.clone()),
        },
        CompType::WithUnit => CompType::Zero,
        CompType::With(x, y) => CompType::plus(self_ctype(x, r), self_ctype(y, r)),
        CompType::Arrow(a, y) => CompType::copower(self_vtype(a, r), self_ctype(y, r)),
        CompType::TensorUnit => r.as_comp(),
        CompType::Bang(a) => CompType::arrow(self_vtype(a, r), r.as_comp()),
        CompType::Copower(a, y) => CompType::arrow(self_vtype(a, r), self_ctype(y, r)),
        CompType::Zero => CompType::WithUnit,
        CompType::Plus(x, y) => CompType::with(self_ctype(x, r), self_ctype(y, r)),
    }
}

struct SelfTranslator<'a> {
    r: &'a ResultType,
}

impl<'a> SelfTranslator<'a> {
    fn rr(&self) -> CompType {
        self.r.as_comp()
    }

    /// Value judgements: `Gamma |- t : A` to `Gamma° |- t° : A°`.
    /// Returns the translated term and the original type.
    fn tv(&self, gamma: &[ValueType], t: &Term) -> (Term, SortedType) {
        let vt = |a: &ValueType| self_vtype(a, self.r);
        let ct = |c: &CompType| self_ctype(c, self.r);
        match t {
            Term::Var(i) => {
                let a = gamma[gamma.len() - 1 - i].clone();
                (var(*i), SortedType::Value(a).normalized())
            }
            Term::Star => (Term::Star, SortedType::Value(ValueType::Unit)),
            Term::Pair(a, b) => {
                let (ta, sa) = self.tv(gamma, a);
                let (tb, sb) = self.tv(gamma, b);
                (
                    pair(ta, tb),
                    SortedType::Value(ValueType::prod(sa.as_value(), sb.as_value())),
                )
            }
            Term::Fst(a) | Term::Snd(a) => {
                let (ta, sa) = self.tv(gamma, a);
                let (x, y) = match sa {
                    SortedType::Value(ValueType::Prod(x, y)) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                if matches!(t, Term::Fst(_)) {
                    (fst(ta), SortedType::Value(x).normalized())
                } else {
                    (snd(ta), SortedType::Value(y).normalized())
                }
            }
            Term::Lam(h, ann, b) => {
                let mut g = gamma.to_vec();
                g.push(ann.clone());
                let (tb, sb) = self.tv(&g, b);
                (
                    lam(h, vt(ann), tb),
                    SortedType::Value(ValueType::fun(ann.clone(), sb.as_value())),
                )
            }
            Term::CStar => (
                linlam("k", CompType::Zero, absurd(self.rr(), Term::Stoup)),
                SortedType::Comp(CompType::WithUnit),
            ),
            Term::CPair(a, b) => {
                let (ta, sa) = self.tv(gamma, a);
                let (tb, sb) = self.tv(gamma, b);
                let (ca, cb) = (comp_of(sa), comp_of(sb));
                let term = linlam(
                    "k",
                    CompType::plus(ct(&ca), ct(&cb)),
                    case(
                        Term::Stoup,
                        "k_x",
                        app(ta, Term::Stoup),
                        "k_y",
                        app(tb, Term::Stoup),
                    ),
                );
                (term, SortedType::Comp(CompType::with(ca, cb)))
            }
            Term::CFst(a) | Term::CSnd(a) => {
                let (ta, sa) = self.tv(gamma, a);
                let (x, y) = match comp_of(sa) {
                    CompType::With(x, y) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                if matches!(t, Term::CFst(_)) {
                    let term = linlam("k", ct(&x), app(ta, inl(ct(&y), Term::Stoup)));
                    (term, SortedType::Comp(x))
                } else {
                    let term = linlam("k", ct(&y), app(ta, inr(ct(&x), Term::Stoup)));
                    (term, SortedType::Comp(y))
                }
            }
            Term::CLam(h, ann, b) => {
                let mut g = gamma.to_vec();
                g.push(ann.clone());
                let (tb, sb) = self.tv(&g, b);
                let cb = comp_of(sb);
                let term = linlam(
                    "k",
                    CompType::copower(vt(ann), ct(&cb)),
                    copowlet(Term::Stoup, h, "h", app(tb, Term::Stoup)),
                );
                (term, SortedType::Comp(CompType::arrow(ann.clone(), cb)))
            }
            Term::Top => (
                linlam("k", self.rr(), Term::Stoup),
                SortedType::Comp(CompType::TensorUnit),
            ),
            Term::ILet(a, b) => {
                let (ta, _) = self.tv(gamma, a);
                let (tb, sb) = self.tv(gamma, b);
                let cb = comp_of(sb);
                let term = linlam("k", ct(&cb), app(ta, app(tb, Term::Stoup)));
                (term, SortedType::Comp(cb))
            }
            Term::Bang(a) => {
                let (ta, sa) = self.tv(gamma, a);
                let a_ty = sa.as_value();
                let term = linlam(
                    "k",
                    CompType::arrow(vt(&a_ty), self.rr()),
                    app(Term::Stoup, ta),
                );
                (term, SortedType::Comp(CompType::bang(a_ty)))
            }
            Term::BangLet(a, h, b) => {
                let (ta, sa) = self.tv(gamma, a);
                let x_ty = match comp_of(sa) {
                    CompType::Bang(x) => *x,
                    _ => unreachable!("checked input"),
                };
                let mut g = gamma.to_vec();
                g.push(x_ty.clone());
                let (tb, sb) = self.tv(&g, b);
                let cb = comp_of(sb);
                let term = linlam(
                    "k",
                    ct(&cb),
                    app(ta, clam(h, vt(&x_ty), app(tb, Term::Stoup))),
                );
                (term, SortedType::Comp(cb))
            }
            Term::Copow(a, b) => {
                let (ta, sa) = self.tv(gamma, a);
                let (tb, sb) = self.tv(gamma, b);
                let (va, cb) = (sa.as_value(), comp_of(sb));
                let term = linlam(
                    "k",
                    CompType::arrow(vt(&va), ct(&cb)),
                    app(tb, app(Term::Stoup, ta)),
                );
                (term, SortedType::Comp(CompType::copower(va, cb)))
            }
            Term::CopowLet(s, hx, _hy, b) => {
                let (ts, ss) = self.tv(gamma, s);
                let (x_ty, y_ty) = match comp_of(ss) {
                    CompType::Copower(x, y) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                let mut g = gamma.to_vec();
                g.push(x_ty.clone());
                let (tb, cb) = self.tc(&g, &y_ty, b);
                let term = linlam("k", ct(&cb), app(ts, clam(hx, vt(&x_ty), tb)));
                (term, SortedType::Comp(cb))
            }
            Term::Absurd(ann, a) => {
                let (ta, _) = self.tv(gamma, a);
                let c = ann.clone().expect("elaborated input");
                let term = linlam("k", ct(&c), app(ta, Term::CStar));
                (term, SortedType::Comp(c))
            }
            Term::Inl(ann, a) | Term::Inr(ann, a) => {
                let (ta, sa) = self.tv(gamma, a);
                let mine = comp_of(sa);
                let other = ann.clone().expect("elaborated input");
                let (l, r2, proj) = if matches!(t, Term::Inl(_, _)) {
                    (mine, other, cfst(Term::Stoup))
                } else {
                    (other, mine, csnd(Term::Stoup))
                };
                let term = linlam("k", CompType::with(ct(&l), ct(&r2)), app(ta, proj));
                (term, SortedType::Comp(CompType::plus(l, r2)))
            }
            Term::Case(s, _hx, a, _hy, b) => {
                let (ts, ss) = self.tv(gamma, s);
                let (x_ty, y_ty) = match comp_of(ss) {
                    CompType::Plus(x, y) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                let (ta, ca) = self.tc(gamma, &x_ty, a);
                let (tb, _) = self.tc(gamma, &y_ty, b);
                let term = linlam("k", ct(&ca), app(ts, cpair(ta, tb)));
                (term, SortedType::Comp(ca))
            }
            Term::LinLam(h, ann, b) => {
                let (tb, cb) = self.tc(gamma, ann, b);
                let term = linlam(&format!("k_{h}"), ct(&cb), tb);
                (term, SortedType::Value(ValueType::lin(ann.clone(), cb)))
            }
            Term::App(s, a) => match infer_sorted(gamma, None, s)
                .expect("checked input")
                .normalized()
            {
                SortedType::Value(ValueType::Fun(_, y)) => {
                    let (ts, _) = self.tv(gamma, s);
                    let (ta, _) = self.tv(gamma, a);
                    (app(ts, ta), SortedType::Value(*y).normalized())
                }
                SortedType::Comp(CompType::Arrow(_, y)) => {
                    // Empty-stoup computation application.
                    let (ts, _) = self.tv(gamma, s);
                    let (ta, _) = self.tv(gamma, a);
                    let term = linlam("k", ct(&y), app(ts, copow(ta, Term::Stoup)));
                    (term, SortedType::Comp(*y))
                }
                SortedType::Value(ValueType::Lin(_, d)) => {
                    let (ts, _) = self.tv(gamma, s);
                    let (ta, _) = self.tv(gamma, a);
                    let term = linlam("k", ct(&d), app(ta, app(ts, Term::Stoup)));
                    (term, SortedType::Comp(*d))
                }
                _ => unreachable!("checked input"),
            },
            Term::Stoup => unreachable!("value judgements have no stoup"),
        }
    }

    /// Computation judgements: `Gamma | z:D |- t : B` to
    /// `Gamma° | k_z:B* |- t* : D*`. Returns the translated term and the
    /// original result type `B`.
    fn tc(&self, gamma: &[ValueType], stoup_ty: &CompType, t: &Term) -> (Term, CompType) {
        let vt = |a: &ValueType| self_vtype(a, self.r);
        let ct = |c: &CompType| self_ctype(c, self.r);
        match t {
            Term::Stoup => (Term::Stoup, stoup_ty.clone()),
            Term::CStar => (absurd(ct(stoup_ty), Term::Stoup), CompType::WithUnit),
            Term::CPair(a, b) => {
                let (ta, ca) = self.tc(gamma, stoup_ty, a);
                let (tb, cb) = self.tc(gamma, stoup_ty, b);
                (
                    case(Term::Stoup, "k_x", ta, "k_y", tb),
                    CompType::with(ca, cb),
                )
            }
            Term::CFst(a) | Term::CSnd(a) => {
                let (ta, ca) = self.tc(gamma, stoup_ty, a);
                let (x, y) = match ca {
                    CompType::With(x, y) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                if matches!(t, Term::CFst(_)) {
                    (ta.subst_stoup(&inl(ct(&y), Term::Stoup)), x)
                } else {
                    (ta.subst_stoup(&inr(ct(&x), Term::Stoup)), y)
                }
            }
            Term::CLam(h, ann, b) => {
                let mut g = gamma.to_vec();
                g.push(ann.clone());
                let (tb, cb) = self.tc(&g, stoup_ty, b);
                (
                    copowlet(Term::Stoup, h, "h", tb),
                    CompType::arrow(ann.clone(), cb),
                )
            }
            Term::ILet(a, b) => {
                let (ta, _) = self.tc(gamma, stoup_ty, a);
                let (tb, sb) = self.tv(gamma, b);
                let cb = comp_of(sb);
                (ta.subst_stoup(&app(tb, Term::Stoup)), cb)
            }
            Term::BangLet(a, h, b) => {
                let (ta, ca) = self.tc(gamma, stoup_ty, a);
                let x_ty = match ca {
                    CompType::Bang(x) => *x,
                    _ => unreachable!("checked input"),
                };
                let mut g = gamma.to_vec();
                g.push(x_ty.clone());
                let (tb, sb) = self.tv(&g, b);
                let cb = comp_of(sb);
                (
                    ta.subst_stoup(&clam(h, vt(&x_ty), app(tb, Term::Stoup))),
                    cb,
                )
            }
            Term::Copow(a, b) => {
                let (ta, sa) = self.tv(gamma, a);
                let (tb, cb) = self.tc(gamma, stoup_ty, b);
                let va = sa.as_value();
                (
                    tb.subst_stoup(&app(Term::Stoup, ta)),
                    CompType::copower(va, cb),
                )
            }
            Term::CopowLet(s, hx, _hy, b) => {
                let (ts, cs) = self.tc(gamma, stoup_ty, s);
                let (x_ty, y_ty) = match cs {
                    CompType::Copower(x, y) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                let mut g = gamma.to_vec();
                g.push(x_ty.clone());
                let (tb, cb) = self.tc(&g, &y_ty, b);
                (ts.subst_stoup(&clam(hx, vt(&x_ty), tb)), cb)
            }
            Term::Absurd(ann, a) => {
                let (ta, _) = self.tc(gamma, stoup_ty, a);
                (
                    ta.subst_stoup(&Term::CStar),
                    ann.clone().expect("elaborated input"),
                )
            }
            Term::Inl(ann, a) | Term::Inr(ann, a) => {
                let (ta, mine) = self.tc(gamma, stoup_ty, a);
                let other = ann.clone().expect("elaborated input");
                if matches!(t, Term::Inl(_, _)) {
                    (
                        ta.subst_stoup(&cfst(Term::Stoup)),
                        CompType::plus(mine, other),
                    )
                } else {
                    (
                        ta.subst_stoup(&csnd(Term::Stoup)),
                        CompType::plus(other, mine),
                    )
                }
            }
            Term::Case(s, _hx, a, _hy, b) => {
                let (ts, cs) = self.tc(gamma, stoup_ty, s);
                let (x_ty, y_ty) = match cs {
                    CompType::Plus(x, y) => (*x, *y),
                    _ => unreachable!("checked input"),
                };
                let (ta, ca) = self.tc(gamma, &x_ty, a);
                let (tb, _) = self.tc(gamma, &y_ty, b);
                (ts.subst_stoup(&cpair(ta, tb)), ca)
            }
            Term::App(s, a) => {
                // Route: => threads the stoup through the function, -o
                // through the argument.
                if let Some(SortedType::Comp(CompType::Arrow(_, y))) =
                    infer_sorted(gamma, Some(stoup_ty), s)
                {
                    let (ts, _) = self.tc(gamma, stoup_ty, s);
                    let (ta, _) = self.tv(gamma, a);
                    return (ts.subst_stoup(&copow(ta, Term::Stoup)), *y);
                }
                match infer_sorted(gamma, None, s).map(|s| s.normalized()) {
                    Some(SortedType::Value(ValueType::Lin(_, d))) => {
                        let (ts, _) = self.tv(gamma, s);
                        let (ta, _) = self.tc(gamma, stoup_ty, a);
                        (ta.subst_stoup(&app(ts, Term::Stoup)), *d)
                    }
                    _ => unreachable!("checked input"),
                }
            }
            _ => unreachable!("form cannot carry a stoup in a checked term"),
        }
    }
}

fn comp_of(s: SortedType) -> CompType {
    match s.normalized() {
        SortedType::Comp(c) => c,
        _ => unreachable!("expected a computation type"),
    }
}

/// Self-translate a value judgement: `Gamma |- t : A` to `Gamma° |- t° : A°`.
pub fn self_vterm(tt: &TypedTerm, r: &ResultType) -> Result<TypedTerm, TranslateError> {
    if tt.judgement.stoup.is_some() {
        return Err(TranslateError::Input(TypeError {
            kind: crate::check::TypeErrorKind::StoupMisuse,
            path: vec![],
            expected: Some("a value judgement".into()),
            actual: Some("a judgement with a stoup".into()),
        }));
    }
    let gamma_tys: Vec<ValueType> = tt.judgement.gamma.iter().map(|(_, t)| t.clone()).collect();
    let tr = SelfTranslator { r };
    let (subject, ty) = tr.tv(&gamma_tys, &tt.judgement.subject);
    let j = Judgement {
        gamma: tt
            .judgement
            .gamma
            .iter()
            .map(|(n, t)| (n.clone(), self_vtype(t, r)))
            .collect(),
        stoup: None,
        subject,
        ty: match ty {
            SortedType::Value(v) => SortedType::Value(self_vtype(&v, r)),
            SortedType::Comp(c) => {
                SortedType::Value(ValueType::lin(self_ctype(&c, r), r.as_comp()))
            }
        },
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

/// Self-translate a computation judgement: `Gamma | z:C |- t : D` to
/// `Gamma° | k_z:D* |- t* : C*` (the contravariant stoup swap).
pub fn self_cterm(tt: &TypedTerm, r: &ResultType) -> Result<TypedTerm, TranslateError> {
    let (z_name, z_ty) = match &tt.judgement.stoup {
        Some(s) => s.clone(),
        None => {
            return Err(TranslateError::Input(TypeError {
                kind: crate::check::TypeErrorKind::StoupMisuse,
                path: vec![],
                expected: Some("a judgement with a stoup".into()),
                actual: Some("a value judgement".into()),
            }))
        }
    };
    let gamma_tys: Vec<ValueType> = tt.judgement.gamma.iter().map(|(_, t)| t.clone()).collect();
    let tr = SelfTranslator { r };
    let (subject, b_ty) = tr.tc(&gamma_tys, &z_ty, &tt.judgement.subject);
    let j = Judgement {
        gamma: tt
            .judgement
            .gamma
            .iter()
            .map(|(n, t)| (n.clone(), self_vtype(t, r)))
            .collect(),
        stoup: Some((format!("k_{z_name}"), self_ctype(&b_ty, r))),
        subject,
        ty: SortedType::Comp(self_ctype(&z_ty, r)),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

// ---- the involution isomorphisms ----

fn require_theorem_grade(r: &ResultType) -> Result<(), TranslateError> {
    if r.theorem_grade() {
        Ok(())
    } else {
        Err(TranslateError::UnsupportedResultType)
    }
}

/// `A°°` as a value type.
pub fn vtt(a: &ValueType, r: &ResultType) -> ValueType {
    self_vtype(&self_vtype(a, r), r)
}

/// `C**` as a computation type.
pub fn ctt(c: &CompType, r: &ResultType) -> CompType {
    self_ctype(&self_ctype(c, r), r)
}

pub(crate) fn phi(a: &ValueType, r: &ResultType) -> Term {
    match a {
        ValueType::Const(_) => lam("x", a.clone(), var(0)),
        ValueType::Unit => lam("x", ValueType::Unit, Term::Star),
        ValueType::Prod(x, y) => lam(
            "z",
            vtt(a, r),
            pair(app(phi(x, r), fst(var(0))), app(phi(y, r), snd(var(0)))),
        ),
        ValueType::Fun(x, y) => lam(
            "f",
            vtt(a, r),
            lam(
                "x",
                (**x).clone(),
                app(phi(y, r), app(var(1), app(phi_inv(x, r), var(0)))),
            ),
        ),
        ValueType::Embed(c) => lam("h", vtt(a, r), app(psi(c, r), app(var(0), Term::Top))),
        ValueType::Lin(c, d) => lam(
            "h",
            vtt(a, r),
            linlam(
                "x",
                (**c).clone(),
                app(psi(d, r), app(var(0), app(psi_inv(c, r), Term::Stoup))),
            ),
        ),
    }
}

pub(crate) fn phi_inv(a: &ValueType, r: &ResultType) -> Term {
    match a {
        ValueType::Const(_) => lam("x", a.clone(), var(0)),
        ValueType::Unit => lam("x", ValueType::Unit, Term::Star),
        ValueType::Prod(x, y) => lam(
            "z",
            a.clone(),
            pair(
                app(phi_inv(x, r), fst(var(0))),
                app(phi_inv(y, r), snd(var(0))),
            ),
        ),
        ValueType::Fun(x, y) => lam(
            "f",
            a.clone(),
            lam(
                "x",
                vtt(x, r),
                app(phi_inv(y, r), app(var(1), app(phi(x, r), var(0)))),
            ),
        ),
        ValueType::Embed(c) => lam(
            "x",
            a.clone(),
            linlam(
                "z",
                CompType::TensorUnit,
                ilet(Term::Stoup, app(psi_inv(c, r), var(0))),
            ),
        ),
        ValueType::Lin(c, d) => lam(
            "h",
            a.clone(),
            linlam(
                "x",
                ctt(c, r),
                app(psi_inv(d, r), app(var(0), app(psi(c, r), Term::Stoup))),
            ),
        ),
    }
}

pub(crate) fn psi(c: &CompType, r: &ResultType) -> Term {
    match c {
        CompType::Const(_) => linlam("z", ctt(c, r), Term::Stoup),
        CompType::WithUnit => linlam("z", ctt(c, r), Term::CStar),
        CompType::With(x, y) => linlam(
            "z",
            ctt(c, r),
            cpair(
                app(psi(x, r), cfst(Term::Stoup)),
                app(psi(y, r), csnd(Term::Stoup)),
            ),
        ),
        CompType::Arrow(a, y) => linlam(
            "f",
            ctt(c, r),
            clam(
                "x",
                (**a).clone(),
                app(psi(y, r), app(Term::Stoup, app(phi_inv(a, r), var(0)))),
            ),
        ),
        CompType::TensorUnit => linlam("z", CompType::TensorUnit, Term::Stoup),
        CompType::Bang(a) => linlam(
            "z",
            ctt(c, r),
            copowlet(
                Term::Stoup,
                "x",
                "y",
                ilet(Term::Stoup, bang(app(phi(a, r), var(0)))),
            ),
        ),
        CompType::Copower(a, y) => linlam(
            "z",
            ctt(c, r),
            copowlet(
                Term::Stoup,
                "x",
                "y",
                copow(app(phi(a, r), var(0)), app(psi(y, r), Term::Stoup)),
            ),
        ),
        CompType::Zero => linlam("z", CompType::Zero, Term::Stoup),
        CompType::Plus(x, y) => linlam(
            "z",
            ctt(c, r),
            case(
                Term::Stoup,
                "x",
                inl((**y).clone(), app(psi(x, r), Term::Stoup)),
                "y",
                inr((**x).clone(), app(psi(y, r), Term::Stoup)),
            ),
        ),
    }
}

pub(crate) fn psi_inv(c: &CompType, r: &ResultType) -> Term {
    match c {
        CompType::Const(_) => linlam("z", c.clone(), Term::Stoup),
        CompType::WithUnit => linlam("z", CompType::WithUnit, Term::CStar),
        CompType::With(x, y) => linlam(
            "z",
            c.clone(),
            cpair(
                app(psi_inv(x, r), cfst(Term::Stoup)),
                app(psi_inv(y, r), csnd(Term::Stoup)),
            ),
        ),
        CompType::Arrow(a, y) => linlam(
            "f",
            c.clone(),
            clam(
                "x",
                vtt(a, r),
                app(psi_inv(y, r), app(Term::Stoup, app(phi(a, r), var(0)))),
            ),
        ),
        CompType::TensorUnit => linlam("z", CompType::TensorUnit, Term::Stoup),
        CompType::Bang(a) => linlam(
            "w",
            c.clone(),
            banglet(
                Term::Stoup,
                "x",
                copow(app(phi_inv(a, r), var(0)), Term::Top),
            ),
        ),
        CompType::Copower(a, y) => linlam(
            "z",
            c.clone(),
            copowlet(
                Term::Stoup,
                "x",
                "y",
                copow(
                    app(phi_inv(a, r), var(0)),
                    app(psi_inv(y, r), Term::Stoup),
                ),
            ),
        ),
        CompType::Zero => linlam("z", CompType::Zero, Term::Stoup),
        CompType::Plus(x, y) => linlam(
            "z",
            c.clone(),
            case(
                Term::Stoup,
                "x",
                inl(ctt(y, r), app(psi_inv(x, r), Term::Stoup)),
                "y",
                inr(ctt(x, r), app(psi_inv(y, r), Term::Stoup)),
            ),
        ),
    }
}

/// The closed isomorphism pair `phi_A : A°° -> A` and its inverse.
pub fn iso_value(
    a: &ValueType,
    r: &ResultType,
) -> Result<(TypedTerm, TypedTerm), TranslateError> {
    require_theorem_grade(r)?;
    let fwd = Judgement {
        gamma: vec![],
        stoup: None,
        subject: phi(a, r),
        ty: SortedType::Value(ValueType::fun(vtt(a, r), a.clone())),
    };
    let bwd = Judgement {
        gamma: vec![],
        stoup: None,
        subject: phi_inv(a, r),
        ty: SortedType::Value(ValueType::fun(a.clone(), vtt(a, r))),
    };
    Ok((
        check_judgement(&fwd).map_err(TranslateError::Output)?,
        check_judgement(&bwd).map_err(TranslateError::Output)?,
    ))
}

/// The closed linear isomorphism pair `psi_C : C** -o C` and its inverse.
pub fn iso_comp(
    c: &CompType,
    r: &ResultType,
) -> Result<(TypedTerm, TypedTerm), TranslateError> {
    require_theorem_grade(r)?;
    let fwd = Judgement {
        gamma: vec![],
        stoup: None,
        subject: psi(c, r),
        ty: SortedType::Value(ValueType::lin(ctt(c, r), c.clone())),
    };
    let bwd = Judgement {
        gamma: vec![],
        stoup: None,
        subject: psi_inv(c, r),
        ty: SortedType::Value(ValueType::lin(c.clone(), ctt(c, r))),
    };
    Ok((
        check_judgement(&fwd).map_err(TranslateError::Output)?,
        check_judgement(&bwd).map_err(TranslateError::Output)?,
    ))
}

/// Replace every free variable `x_i : C_i°°` by `phi_{C_i}^{-1} x_i` with
/// `x_i : C_i`, keeping indices.
fn subst_phi_inv_gamma(t: &Term, gamma: &[ValueType], r: &ResultType) -> Term {
    fn go(t: &Term, depth: usize, gamma: &[ValueType], r: &ResultType) -> Term {
        match t {
            Term::Var(i) if *i >= depth => {
                let outer = *i - depth;
                let c = &gamma[gamma.len() - 1 - outer];
                app(phi_inv(c, r), var(*i))
            }
            Term::Var(_) | Term::Stoup | Term::Star | Term::CStar | Term::Top => t.clone(),
            Term::Pair(a, b) => pair(go(a, depth, gamma, r), go(b, depth, gamma, r)),
            Term::CPair(a, b) => cpair(go(a, depth, gamma, r), go(b, depth, gamma, r)),
            Term::ILet(a, b) => ilet(go(a, depth, gamma, r), go(b, depth, gamma, r)),
            Term::Copow(a, b) => copow(go(a, depth, gamma, r), go(b, depth, gamma, r)),
            Term::App(a, b) => app(go(a, depth, gamma, r), go(b, depth, gamma, r)),
            Term::Fst(a) => fst(go(a, depth, gamma, r)),
            Term::Snd(a) => snd(go(a, depth, gamma, r)),
            Term::CFst(a) => cfst(go(a, depth, gamma, r)),
            Term::CSnd(a) => csnd(go(a, depth, gamma, r)),
            Term::Bang(a) => bang(go(a, depth, gamma, r)),
            Term::Absurd(c, a) => Term::Absurd(c.clone(), Box::new(go(a, depth, gamma, r))),
            Term::Inl(c, a) => Term::Inl(c.clone(), Box::new(go(a, depth, gamma, r))),
            Term::Inr(c, a) => Term::Inr(c.clone(), Box::new(go(a, depth, gamma, r))),
            Term::Lam(h, ty, a) => lam(h, ty.clone(), go(a, depth + 1, gamma, r)),
            Term::CLam(h, ty, a) => clam(h, ty.clone(), go(a, depth + 1, gamma, r)),
            Term::LinLam(h, ty, a) => linlam(h, ty.clone(), go(a, depth, gamma, r)),
            Term::BangLet(a, h, b) => {
                banglet(go(a, depth, gamma, r), h, go(b, depth + 1, gamma, r))
            }
            Term::CopowLet(a, hx, hy, b) => Term::CopowLet(
                Box::new(go(a, depth, gamma, r)),
                hx.clone(),
                hy.clone(),
                Box::new(go(b, depth + 1, gamma, r)),
            ),
            Term::Case(s, hx, a, hy, b) => Term::Case(
                Box::new(go(s, depth, gamma, r)),
                hx.clone(),
                Box::new(go(a, depth, gamma, r)),
                hy.clone(),
                Box::new(go(b, depth, gamma, r)),
            ),
        }
    }
    go(t, 0, gamma, r)
}

/// The fullness witness for a value judgement: given `Gamma° |- t : A°`,
/// produce `Gamma |- u : A` with `u = phi_A (t° [phi^{-1} Gamma])`, so that
/// `u°` is provably equal to `t`.
pub fn fullness_witness_value(
    t: &TypedTerm,
    gamma: &[(String, ValueType)],
    a: &ValueType,
    r: &ResultType,
) -> Result<TypedTerm, TranslateError> {
    require_theorem_grade(r)?;
    let translated = self_vterm(t, r)?;
    let gamma_tys: Vec<ValueType> = gamma.iter().map(|(_, ty)| ty.clone()).collect();
    let substituted = subst_phi_inv_gamma(&translated.judgement.subject, &gamma_tys, r);
    let u = app(phi(a, r), substituted);
    let j = Judgement {
        gamma: gamma.to_vec(),
        stoup: None,
        subject: u,
        ty: SortedType::Value(a.clone()),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}

/// The stoup variant: given `Gamma° | k_z:B* |- t : A*`, produce
/// `Gamma | z:A |- u : B` with
/// `u = (psi_B t*) [psi_A^{-1} z / k_{k_z}] [phi^{-1} Gamma]`.
pub fn fullness_witness_comp(
    t: &TypedTerm,
    gamma: &[(String, ValueType)],
    stoup: &(String, CompType),
    b: &CompType,
    r: &ResultType,
) -> Result<TypedTerm, TranslateError> {
    require_theorem_grade(r)?;
    let translated = self_cterm(t, r)?;
    let gamma_tys: Vec<ValueType> = gamma.iter().map(|(_, ty)| ty.clone()).collect();
    let applied = app(psi(b, r), translated.judgement.subject.clone());
    let plugged = applied.subst_stoup(&app(psi_inv(&stoup.1, r), Term::Stoup));
    let u = subst_phi_inv_gamma(&plugged, &gamma_tys, r);
    let j = Judgement {
        gamma: gamma.to_vec(),
        stoup: Some(stoup.clone()),
        subject: u,
        ty: SortedType::Comp(b.clone()),
    };
    check_judgement(&j).map_err(TranslateError::Output)
}
