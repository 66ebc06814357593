//! Pretty-printer for the surface grammar. Nameless terms are rendered with
//! their binder hints; a colliding hint gets a numeric tick (`x`, `x1`, `x2`,
//! ...). Output reparses to the same nameless form.

use crate::stlc::{StlcTerm, StlcType};
use crate::syntax::*;

// Type precedence levels: 0 arrows (right assoc), 1 binary products/sums,
// 2 bang prefix, 3 atoms.

fn vty(t: &ValueType, level: u8, out: &mut String) {
    match t {
        ValueType::Const(c) => out.push_str(c),
        ValueType::Unit => out.push('1'),
        ValueType::Prod(a, b) => binty(level, out, |o| {
            vty(a, 2, o);
            o.push_str(" x ");
            vty(b, 2, o);
        }),
        ValueType::Fun(a, b) => arrty(level, out, |o| {
            vty(a, 1, o);
            o.push_str(" -> ");
            vty(b, 0, o);
        }),
        ValueType::Embed(c) => cty(c, level, out),
        ValueType::Lin(a, b) => arrty(level, out, |o| {
            cty(a, 1, o);
            o.push_str(" -o ");
            cty(b, 0, o);
        }),
    }
}

fn cty(t: &CompType, level: u8, out: &mut String) {
    match t {
        CompType::Const(c) => {
            out.push('^');
            out.push_str(c);
        }
        CompType::WithUnit => out.push_str("C1"),
        CompType::TensorUnit => out.push('I'),
        CompType::Zero => out.push_str("C0"),
        CompType::With(a, b) => binty(level, out, |o| {
            cty(a, 2, o);
            o.push_str(" & ");
            cty(b, 2, o);
        }),
        CompType::Plus(a, b) => binty(level, out, |o| {
            cty(a, 2, o);
            o.push_str(" (+) ");
            cty(b, 2, o);
        }),
        CompType::Arrow(a, b) => arrty(level, out, |o| {
            vty(a, 1, o);
            o.push_str(" => ");
            cty(b, 0, o);
        }),
        CompType::Bang(a) => {
            if level > 2 {
                out.push('(');
                out.push('!');
                vty(a, 3, out);
                out.push(')');
            } else {
                out.push('!');
                vty(a, 3, out);
            }
        }
        CompType::Copower(a, b) => binty(level, out, |o| {
            o.push('!');
            vty(a, 3, o);
            o.push_str(" (*) ");
            cty(b, 2, o);
        }),
    }
}

fn binty(level: u8, out: &mut String, f: impl FnOnce(&mut String)) {
    if level > 1 {
        out.push('(');
        f(out);
        out.push(')');
    } else {
        f(out);
    }
}

fn arrty(level: u8, out: &mut String, f: impl FnOnce(&mut String)) {
    if level > 0 {
        out.push('(');
        f(out);
        out.push(')');
    } else {
        f(out);
    }
}

pub fn show_value_type(t: &ValueType) -> String {
    let mut s = String::new();
    vty(t, 0, &mut s);
    s
}

pub fn show_comp_type(t: &CompType) -> String {
    let mut s = String::new();
    cty(t, 0, &mut s);
    s
}

pub fn show_sorted(t: &SortedType) -> String {
    match t {
        SortedType::Value(v) => show_value_type(v),
        SortedType::Comp(c) => show_comp_type(c),
    }
}

pub fn show_stlc_type(t: &StlcType) -> String {
    fn go(t: &StlcType, level: u8, out: &mut String) {
        match t {
            StlcType::Const(c) => out.push_str(c),
            StlcType::Unit => out.push('1'),
            StlcType::Prod(a, b) => binty(level, out, |o| {
                go(a, 2, o);
                o.push_str(" x ");
                go(b, 2, o);
            }),
            StlcType::Fun(a, b) => arrty(level, out, |o| {
                go(a, 1, o);
                o.push_str(" -> ");
                go(b, 0, o);
            }),
        }
    }
    let mut s = String::new();
    go(t, 0, &mut s);
    s
}

pub const KEYWORDS: &[&str] = &[
    "fun", "cfun", "lfun", "let", "top", "be", "in", "case", "of", "inl", "inr", "absurd",
    "cstar", "fst", "snd", "pfst", "psnd", "x",
];

fn is_ident(s: &str) -> bool {
    let mut ch = s.chars();
    match ch.next() {
        Some(c) if c.is_ascii_lowercase() || c == '_' => {}
        _ => return false,
    }
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

/// Pick a printable name for a binder hint, ticking on collision with the
/// names already in scope.
fn freshen(hint: &str, fallback: &str, scope: &[String]) -> String {
    let base = if is_ident(hint) { hint } else { fallback };
    if !scope.iter().any(|n| n == base) {
        return base.to_string();
    }
    let mut k = 1usize;
    loop {
        let cand = format!("{base}{k}");
        if !scope.iter().any(|n| *n == cand) {
            return cand;
        }
        k += 1;
    }
}

// Term precedence levels: 0 binders, 1 copower intro, 2 application,
// 3 prefix forms, 4 atoms.

struct TermPrinter {
    // Value names, outermost first; Var(i) is names[len-1-i].
    names: Vec<String>,
    // Stack of stoup names; the top is the one in scope.
    stoups: Vec<String>,
}

impl TermPrinter {
    fn all_names(&self) -> Vec<String> {
        let mut v = self.names.clone();
        v.extend(self.stoups.iter().cloned());
        v
    }

    fn var_name(&self, i: usize) -> String {
        let n = self.names.len();
        if i < n {
            self.names[n - 1 - i].clone()
        } else {
            format!("?free{}", i - n)
        }
    }

    fn go(&mut self, t: &Term, level: u8, out: &mut String) {
        match t {
            Term::Var(i) => out.push_str(&self.var_name(*i)),
            Term::Stoup => {
                let name = self
                    .stoups
                    .last()
                    .cloned()
                    .unwrap_or_else(|| "?stoup".to_string());
                out.push_str(&name);
            }
            Term::Star => out.push('*'),
            Term::CStar => out.push_str("cstar"),
            Term::Top => out.push_str("top"),
            Term::Pair(a, b) => {
                out.push('(');
                self.go(a, 0, out);
                out.push_str(", ");
                self.go(b, 0, out);
                out.push(')');
            }
            Term::CPair(a, b) => {
                out.push('<');
                self.go(a, 0, out);
                out.push_str(", ");
                self.go(b, 0, out);
                out.push('>');
            }
            Term::Fst(a) => self.prefix("fst", a, level, out),
            Term::Snd(a) => self.prefix("snd", a, level, out),
            Term::CFst(a) => self.prefix("pfst", a, level, out),
            Term::CSnd(a) => self.prefix("psnd", a, level, out),
            Term::Bang(a) => {
                self.wrap(level > 3, out, |p, o| {
                    o.push('!');
                    p.go(a, 4, o);
                });
            }
            Term::Absurd(c, a) => {
                self.wrap(level > 3, out, |p, o| {
                    o.push_str("absurd");
                    if let Some(c) = c {
                        o.push('[');
                        cty(c, 0, o);
                        o.push(']');
                    }
                    o.push(' ');
                    p.go(a, 4, o);
                });
            }
            Term::Inl(c, a) => self.inject("inl", c, a, level, out),
            Term::Inr(c, a) => self.inject("inr", c, a, level, out),
            Term::App(s, a) => {
                self.wrap(level > 2, out, |p, o| {
                    p.go(s, 2, o);
                    o.push(' ');
                    p.go(a, 3, o);
                });
            }
            Term::Copow(a, b) => {
                self.wrap(level > 1, out, |p, o| {
                    o.push('!');
                    p.go(a, 4, o);
                    o.push_str(" (*) ");
                    p.go(b, 1, o);
                });
            }
            Term::Lam(h, ty, b) => self.binder("fun", h, "x", &SortedType::Value(ty.clone()), b, false, level, out),
            Term::CLam(h, ty, b) => self.binder("cfun", h, "x", &SortedType::Value(ty.clone()), b, false, level, out),
            Term::LinLam(h, ty, b) => self.binder("lfun", h, "z", &SortedType::Comp(ty.clone()), b, true, level, out),
            Term::ILet(a, b) => {
                self.wrap(level > 0, out, |p, o| {
                    o.push_str("let top be ");
                    p.go(a, 1, o);
                    o.push_str(" in ");
                    p.go(b, 0, o);
                });
            }
            Term::BangLet(a, h, b) => {
                self.wrap(level > 0, out, |p, o| {
                    let name = freshen(h, "x", &p.all_names());
                    o.push_str("let !");
                    o.push_str(&name);
                    o.push_str(" be ");
                    p.go(a, 1, o);
                    o.push_str(" in ");
                    p.names.push(name);
                    p.go(b, 0, o);
                    p.names.pop();
                });
            }
            Term::CopowLet(s, hx, hy, b) => {
                self.wrap(level > 0, out, |p, o| {
                    let x = freshen(hx, "x", &p.all_names());
                    let mut scope = p.all_names();
                    scope.push(x.clone());
                    let y = freshen(hy, "y", &scope);
                    o.push_str("let !");
                    o.push_str(&x);
                    o.push_str(" (*) ");
                    o.push_str(&y);
                    o.push_str(" be ");
                    p.go(s, 1, o);
                    o.push_str(" in ");
                    p.names.push(x);
                    p.stoups.push(y);
                    p.go(b, 0, o);
                    p.stoups.pop();
                    p.names.pop();
                });
            }
            Term::Case(s, hx, a, hy, b) => {
                self.wrap(level > 0, out, |p, o| {
                    o.push_str("case ");
                    p.go(s, 1, o);
                    o.push_str(" of inl ");
                    let x = freshen(hx, "x", &p.all_names());
                    o.push_str(&x);
                    o.push_str(" -> ");
                    p.stoups.push(x);
                    p.go(a, 0, o);
                    p.stoups.pop();
                    o.push_str(" | inr ");
                    let y = freshen(hy, "y", &p.all_names());
                    o.push_str(&y);
                    o.push_str(" -> ");
                    p.stoups.push(y);
                    p.go(b, 0, o);
                    p.stoups.pop();
                });
            }
        }
    }

    fn wrap(&mut self, parens: bool, out: &mut String, f: impl FnOnce(&mut Self, &mut String)) {
        if parens {
            out.push('(');
            f(self, out);
            out.push(')');
        } else {
            f(self, out);
        }
    }

    fn prefix(&mut self, kw: &str, a: &Term, level: u8, out: &mut String) {
        self.wrap(level > 3, out, |p, o| {
            o.push_str(kw);
            o.push(' ');
            p.go(a, 4, o);
        });
    }

    fn inject(&mut self, kw: &str, c: &Option<CompType>, a: &Term, level: u8, out: &mut String) {
        self.wrap(level > 3, out, |p, o| {
            o.push_str(kw);
            if let Some(c) = c {
                o.push('[');
                cty(c, 0, o);
                o.push(']');
            }
            o.push(' ');
            p.go(a, 4, o);
        });
    }

    #[allow(clippy::too_many_arguments)]
    fn binder(
        &mut self,
        kw: &str,
        hint: &str,
        fallback: &str,
        ty: &SortedType,
        body: &Term,
        binds_stoup: bool,
        level: u8,
        out: &mut String,
    ) {
        self.wrap(level > 0, out, |p, o| {
            let name = freshen(hint, fallback, &p.all_names());
            o.push_str(kw);
            o.push(' ');
            o.push_str(&name);
            o.push(':');
            match ty {
                SortedType::Value(v) => vty(v, 1, o),
                SortedType::Comp(c) => cty(c, 1, o),
            }
            o.push_str(" -> ");
            if binds_stoup {
                p.stoups.push(name);
            } else {
                p.names.push(name);
            }
            p.go(body, 0, o);
            if binds_stoup {
                p.stoups.pop();
            } else {
                p.names.pop();
            }
        });
    }
}

/// Render a term given the in-scope value names (outermost first) and the
/// stoup name, if any.
pub fn show_term(t: &Term, gamma_names: &[String], stoup_name: Option<&str>) -> String {
    let mut p = TermPrinter {
        names: gamma_names.to_vec(),
        stoups: stoup_name.map(|s| vec![s.to_string()]).unwrap_or_default(),
    };
    let mut out = String::new();
    p.go(t, 0, &mut out);
    out
}

/// Render a judgement in file syntax:
/// `x1:A1, x2:A2 | z:C |- t : D` (the stoup segment is optional).
pub fn show_judgement(j: &Judgement) -> String {
    let mut names: Vec<String> = Vec::new();
    let mut out = String::new();
    for (i, (hint, ty)) in j.gamma.iter().enumerate() {
        let name = freshen(hint, "x", &names);
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&name);
        out.push(':');
        vty(ty, 0, &mut out);
        names.push(name);
    }
    let stoup_name = j.stoup.as_ref().map(|(hint, ty)| {
        let name = freshen(hint, "z", &names);
        out.push_str(" | ");
        out.push_str(&name);
        out.push(':');
        cty(ty, 0, &mut out);
        (name, ())
    });
    out.push_str(" |- ");
    let term = show_term(
        &j.subject,
        &names,
        stoup_name.as_ref().map(|(n, _)| n.as_str()),
    );
    out.push_str(&term);
    out.push_str(" : ");
    out.push_str(&show_sorted(&j.ty));
    out.trim_start().to_string()
}

pub fn show_stlc_term(t: &StlcTerm, theta_names: &[String]) -> String {
    fn go(t: &StlcTerm, names: &mut Vec<String>, level: u8, out: &mut String) {
        match t {
            StlcTerm::Var(i) => {
                let n = names.len();
                if *i < n {
                    out.push_str(&names[n - 1 - i].clone());
                } else {
                    out.push_str(&format!("?free{}", i - n));
                }
            }
            StlcTerm::Star => out.push('*'),
            StlcTerm::Pair(a, b) => {
                out.push('(');
                go(a, names, 0, out);
                out.push_str(", ");
                go(b, names, 0, out);
                out.push(')');
            }
            StlcTerm::Fst(a) | StlcTerm::Snd(a) => {
                let parens = level > 3;
                if parens {
                    out.push('(');
                }
                out.push_str(if matches!(t, StlcTerm::Fst(_)) { "fst" } else { "snd" });
                out.push(' ');
                go(a, names, 4, out);
                if parens {
                    out.push(')');
                }
            }
            StlcTerm::Lam(h, ty, b) => {
                let parens = level > 0;
                if parens {
                    out.push('(');
                }
                let name = freshen(h, "x", names);
                out.push_str("fun ");
                out.push_str(&name);
                out.push(':');
                out.push_str(&show_stlc_type(ty));
                out.push_str(" -> ");
                names.push(name);
                go(b, names, 0, out);
                names.pop();
                if parens {
                    out.push(')');
                }
            }
            StlcTerm::App(a, b) => {
                let parens = level > 2;
                if parens {
                    out.push('(');
                }
                go(a, names, 2, out);
                out.push(' ');
                go(b, names, 3, out);
                if parens {
                    out.push(')');
                }
            }
        }
    }
    let mut names = theta_names.to_vec();
    let mut out = String::new();
    go(t, &mut names, 0, &mut out);
    out
}

impl std::fmt::Display for ValueType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&show_value_type(self))
    }
}

impl std::fmt::Display for CompType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&show_comp_type(self))
    }
}

impl std::fmt::Display for Judgement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&show_judgement(self))
    }
}
