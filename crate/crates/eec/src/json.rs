//! JSON AST interchange: every node is `{"node": NAME, "args": [...]}`.
//!
//! Node names: value types `vconst unit prod fun embed lin`; computation
//! types `cconst withunit with arrow tensorunit bang copower zero plus`;
//! terms `var stoup star pair fst snd lam cstar cpair cfst csnd clam top
//! ilet bang_t banglet copow copowlet absurd inl inr case linlam app`;
//! judgements `judgement` with args `[bindings, stoup|null, subject, type]`,
//! each binding `{"node":"bind","args":[name, type]}`. Optional annotations
//! are `null` when absent; binder hints ride along as string args so a
//! round trip reproduces the nameless AST exactly.

use crate::syntax::*;
use serde_json::{json, Value};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("json decode error: {0}")]
pub struct JsonError(pub String);

fn node(name: &str, args: Vec<Value>) -> Value {
    json!({"node": name, "args": args})
}

pub fn value_type_to_json(t: &ValueType) -> Value {
    match t {
        ValueType::Const(c) => node("vconst", vec![json!(c)]),
        ValueType::Unit => node("unit", vec![]),
        ValueType::Prod(a, b) => node("prod", vec![value_type_to_json(a), value_type_to_json(b)]),
        ValueType::Fun(a, b) => node("fun", vec![value_type_to_json(a), value_type_to_json(b)]),
        ValueType::Embed(c) => node("embed", vec![comp_type_to_json(c)]),
        ValueType::Lin(a, b) => node("lin", vec![comp_type_to_json(a), comp_type_to_json(b)]),
    }
}

pub fn comp_type_to_json(t: &CompType) -> Value {
    match t {
        CompType::Const(c) => node("cconst", vec![json!(c)]),
        CompType::WithUnit => node("withunit", vec![]),
        CompType::With(a, b) => node("with", vec![comp_type_to_json(a), comp_type_to_json(b)]),
        CompType::Arrow(a, b) => node("arrow", vec![value_type_to_json(a), comp_type_to_json(b)]),
        CompType::TensorUnit => node("tensorunit", vec![]),
        CompType::Bang(a) => node("bang", vec![value_type_to_json(a)]),
        CompType::Copower(a, b) => {
            node("copower", vec![value_type_to_json(a), comp_type_to_json(b)])
        }
        CompType::Zero => node("zero", vec![]),
        CompType::Plus(a, b) => node("plus", vec![comp_type_to_json(a), comp_type_to_json(b)]),
    }
}

fn opt_ann(c: &Option<CompType>) -> Value {
    match c {
        Some(c) => comp_type_to_json(c),
        None => Value::Null,
    }
}

pub fn term_to_json(t: &Term) -> Value {
    match t {
        Term::Var(i) => node("var", vec![json!(i)]),
        Term::Stoup => node("stoup", vec![]),
        Term::Star => node("star", vec![]),
        Term::Pair(a, b) => node("pair", vec![term_to_json(a), term_to_json(b)]),
        Term::Fst(a) => node("fst", vec![term_to_json(a)]),
        Term::Snd(a) => node("snd", vec![term_to_json(a)]),
        Term::Lam(h, ty, b) => node(
            "lam",
            vec![json!(h), value_type_to_json(ty), term_to_json(b)],
        ),
        Term::CStar => node("cstar", vec![]),
        Term::CPair(a, b) => node("cpair", vec![term_to_json(a), term_to_json(b)]),
        Term::CFst(a) => node("cfst", vec![term_to_json(a)]),
        Term::CSnd(a) => node("csnd", vec![term_to_json(a)]),
        Term::CLam(h, ty, b) => node(
            "clam",
            vec![json!(h), value_type_to_json(ty), term_to_json(b)],
        ),
        Term::Top => node("top", vec![]),
        Term::ILet(a, b) => node("ilet", vec![term_to_json(a), term_to_json(b)]),
        Term::Bang(a) => node("bang_t", vec![term_to_json(a)]),
        Term::BangLet(a, h, b) => node(
            "banglet",
            vec![term_to_json(a), json!(h), term_to_json(b)],
        ),
        Term::Copow(a, b) => node("copow", vec![term_to_json(a), term_to_json(b)]),
        Term::CopowLet(s, hx, hy, b) => node(
            "copowlet",
            vec![term_to_json(s), json!(hx), json!(hy), term_to_json(b)],
        ),
        Term::Absurd(c, a) => node("absurd", vec![opt_ann(c), term_to_json(a)]),
        Term::Inl(c, a) => node("inl", vec![opt_ann(c), term_to_json(a)]),
        Term::Inr(c, a) => node("inr", vec![opt_ann(c), term_to_json(a)]),
        Term::Case(s, hx, a, hy, b) => node(
            "case",
            vec![
                term_to_json(s),
                json!(hx),
                term_to_json(a),
                json!(hy),
                term_to_json(b),
            ],
        ),
        Term::LinLam(h, ty, b) => node(
            "linlam",
            vec![json!(h), comp_type_to_json(ty), term_to_json(b)],
        ),
        Term::App(a, b) => node("app", vec![term_to_json(a), term_to_json(b)]),
    }
}

pub fn judgement_to_json(j: &Judgement) -> Value {
    let binds: Vec<Value> = j
        .gamma
        .iter()
        .map(|(n, t)| node("bind", vec![json!(n), value_type_to_json(t)]))
        .collect();
    let stoup = match &j.stoup {
        Some((n, t)) => node("bind", vec![json!(n), comp_type_to_json(t)]),
        None => Value::Null,
    };
    let ty = match &j.ty {
        SortedType::Value(v) => value_type_to_json(v),
        SortedType::Comp(c) => comp_type_to_json(c),
    };
    node(
        "judgement",
        vec![Value::Array(binds), stoup, term_to_json(&j.subject), ty],
    )
}

fn parts<'a>(v: &'a Value) -> Result<(&'a str, &'a Vec<Value>), JsonError> {
    let obj = v.as_object().ok_or_else(|| JsonError("expected object".into()))?;
    let name = obj
        .get("node")
        .and_then(|n| n.as_str())
        .ok_or_else(|| JsonError("missing node name".into()))?;
    let args = obj
        .get("args")
        .and_then(|a| a.as_array())
        .ok_or_else(|| JsonError("missing args array".into()))?;
    Ok((name, args))
}

fn get_str(v: &Value) -> Result<String, JsonError> {
    v.as_str()
        .map(|s| s.to_string())
        .ok_or_else(|| JsonError("expected string".into()))
}

pub fn value_type_from_json(v: &Value) -> Result<ValueType, JsonError> {
    let (name, args) = parts(v)?;
    let arg = |i: usize| -> Result<&Value, JsonError> {
        args.get(i).ok_or_else(|| JsonError(format!("{name}: missing arg {i}")))
    };
    match name {
        "vconst" => Ok(ValueType::Const(get_str(arg(0)?)?)),
        "unit" => Ok(ValueType::Unit),
        "prod" => Ok(ValueType::prod(
            value_type_from_json(arg(0)?)?,
            value_type_from_json(arg(1)?)?,
        )),
        "fun" => Ok(ValueType::fun(
            value_type_from_json(arg(0)?)?,
            value_type_from_json(arg(1)?)?,
        )),
        "embed" => Ok(ValueType::embed(comp_type_from_json(arg(0)?)?)),
        "lin" => Ok(ValueType::lin(
            comp_type_from_json(arg(0)?)?,
            comp_type_from_json(arg(1)?)?,
        )),
        other => Err(JsonError(format!("unknown value type node {other}"))),
    }
}

pub fn comp_type_from_json(v: &Value) -> Result<CompType, JsonError> {
    let (name, args) = parts(v)?;
    let arg = |i: usize| -> Result<&Value, JsonError> {
        args.get(i).ok_or_else(|| JsonError(format!("{name}: missing arg {i}")))
    };
    match name {
        "cconst" => Ok(CompType::Const(get_str(arg(0)?)?)),
        "withunit" => Ok(CompType::WithUnit),
        "with" => Ok(CompType::with(
            comp_type_from_json(arg(0)?)?,
            comp_type_from_json(arg(1)?)?,
        )),
        "arrow" => Ok(CompType::arrow(
            value_type_from_json(arg(0)?)?,
            comp_type_from_json(arg(1)?)?,
        )),
        "tensorunit" => Ok(CompType::TensorUnit),
        "bang" => Ok(CompType::bang(value_type_from_json(arg(0)?)?)),
        "copower" => Ok(CompType::copower(
            value_type_from_json(arg(0)?)?,
            comp_type_from_json(arg(1)?)?,
        )),
        "zero" => Ok(CompType::Zero),
        "plus" => Ok(CompType::plus(
            comp_type_from_json(arg(0)?)?,
            comp_type_from_json(arg(1)?)?,
        )),
        other => Err(JsonError(format!("unknown computation type node {other}"))),
    }
}

fn ann_from_json(v: &Value) -> Result<Option<CompType>, JsonError> {
    if v.is_null() {
        Ok(None)
    } else {
        Ok(Some(comp_type_from_json(v)?))
    }
}

pub fn term_from_json(v: &Value) -> Result<Term, JsonError> {
    let (name, args) = parts(v)?;
    let arg = |i: usize| -> Result<&Value, JsonError> {
        args.get(i).ok_or_else(|| JsonError(format!("{name}: missing arg {i}")))
    };
    match name {
        "var" => {
            let i = arg(0)?
                .as_u64()
                .ok_or_else(|| JsonError("var: expected index".into()))?;
            Ok(Term::Var(i as usize))
        }
        "stoup" => Ok(Term::Stoup),
        "star" => Ok(Term::Star),
        "pair" => Ok(pair(term_from_json(arg(0)?)?, term_from_json(arg(1)?)?)),
        "fst" => Ok(fst(term_from_json(arg(0)?)?)),
        "snd" => Ok(snd(term_from_json(arg(0)?)?)),
        "lam" => Ok(lam(
            &get_str(arg(0)?)?,
            value_type_from_json(arg(1)?)?,
            term_from_json(arg(2)?)?,
        )),
        "cstar" => Ok(Term::CStar),
        "cpair" => Ok(cpair(term_from_json(arg(0)?)?, term_from_json(arg(1)?)?)),
        "cfst" => Ok(cfst(term_from_json(arg(0)?)?)),
        "csnd" => Ok(csnd(term_from_json(arg(0)?)?)),
        "clam" => Ok(clam(
            &get_str(arg(0)?)?,
            value_type_from_json(arg(1)?)?,
            term_from_json(arg(2)?)?,
        )),
        "top" => Ok(Term::Top),
        "ilet" => Ok(ilet(term_from_json(arg(0)?)?, term_from_json(arg(1)?)?)),
        "bang_t" => Ok(bang(term_from_json(arg(0)?)?)),
        "banglet" => Ok(banglet(
            term_from_json(arg(0)?)?,
            &get_str(arg(1)?)?,
            term_from_json(arg(2)?)?,
        )),
        "copow" => Ok(copow(term_from_json(arg(0)?)?, term_from_json(arg(1)?)?)),
        "copowlet" => Ok(copowlet(
            term_from_json(arg(0)?)?,
            &get_str(arg(1)?)?,
            &get_str(arg(2)?)?,
            term_from_json(arg(3)?)?,
        )),
        "absurd" => Ok(Term::Absurd(
            ann_from_json(arg(0)?)?,
            Box::new(term_from_json(arg(1)?)?),
        )),
        "inl" => Ok(Term::Inl(
            ann_from_json(arg(0)?)?,
            Box::new(term_from_json(arg(1)?)?),
        )),
        "inr" => Ok(Term::Inr(
            ann_from_json(arg(0)?)?,
            Box::new(term_from_json(arg(1)?)?),
        )),
        "case" => Ok(case(
            term_from_json(arg(0)?)?,
            &get_str(arg(1)?)?,
            term_from_json(arg(2)?)?,
            &get_str(arg(3)?)?,
            term_from_json(arg(4)?)?,
        )),
        "linlam" => Ok(linlam(
            &get_str(arg(0)?)?,
            comp_type_from_json(arg(1)?)?,
            term_from_json(arg(2)?)?,
        )),
        "app" => Ok(app(term_from_json(arg(0)?)?, term_from_json(arg(1)?)?)),
        other => Err(JsonError(format!("unknown term node {other}"))),
    }
}

pub fn judgement_from_json(v: &Value) -> Result<Judgement, JsonError> {
    let (name, args) = parts(v)?;
    if name != "judgement" {
        return Err(JsonError(format!("expected judgement node, got {name}")));
    }
    let binds = args
        .first()
        .and_then(|a| a.as_array())
        .ok_or_else(|| JsonError("judgement: missing bindings".into()))?;
    let mut gamma = Vec::new();
    for b in binds {
        let (bn, bargs) = parts(b)?;
        if bn != "bind" || bargs.len() != 2 {
            return Err(JsonError("judgement: malformed binding".into()));
        }
        gamma.push((get_str(&bargs[0])?, value_type_from_json(&bargs[1])?));
    }
    let stoup = match args.get(1) {
        Some(Value::Null) | None => None,
        Some(s) => {
            let (bn, bargs) = parts(s)?;
            if bn != "bind" || bargs.len() != 2 {
                return Err(JsonError("judgement: malformed stoup".into()));
            }
            Some((get_str(&bargs[0])?, comp_type_from_json(&bargs[1])?))
        }
    };
    let subject = term_from_json(
        args.get(2)
            .ok_or_else(|| JsonError("judgement: missing subject".into()))?,
    )?;
    let tyv = args
        .get(3)
        .ok_or_else(|| JsonError("judgement: missing type".into()))?;
    let (tn, _) = parts(tyv)?;
    let ty = match tn {
        "vconst" | "unit" | "prod" | "fun" | "embed" | "lin" => {
            SortedType::Value(value_type_from_json(tyv)?)
        }
        _ => SortedType::Comp(comp_type_from_json(tyv)?),
    };
    Ok(Judgement {
        gamma,
        stoup,
        subject,
        ty: ty.normalized(),
    })
}
