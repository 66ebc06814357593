//! Parser for the surface grammar.
//!
//! Types: `1`, `A x B`, `A -> B`, `A -o B`, `C1`, `A & B`, `A => B`, `I`,
//! `!A`, `!A (*) B`, `C0`, `A (+) B`. Binary type operators share one
//! precedence level and associate to the right; arrows sit below them.
//!
//! Terms: `*`, `(t,u)`, `fst t`, `snd t`, `fun x:A -> t`, `cstar`, `<t,u>`,
//! `pfst t`, `psnd t`, `cfun x:A -> t`, `top`, `let top be t in u`, `!t`,
//! `let !x be t in u`, `!t (*) u`, `let !x (*) y be s in t`, `absurd[C] t`,
//! `inl[C] t`, `inr[C] t`, `case s of inl x -> t | inr y -> u`,
//! `lfun z:C -> t`, and juxtaposition application (left-associative).
//!
//! Judgement files: `x1:A1, ..., xn:An | z:C |- t : B` with the stoup
//! segment optional and `#` line comments.

use crate::check::{well_formed_type, RawType};
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("parse error at offset {offset}: {msg}")]
pub struct ParseError {
    pub msg: String,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    CIdent(String),
    One,      // 1
    WithUnit, // C1
    TensorU,  // I
    Zero,     // C0
    Star,
    CStar,
    Top,
    Fun,
    CFun,
    LFun,
    Let,
    Be,
    In,
    Case,
    Of,
    Inl,
    Inr,
    Absurd,
    Fst,
    Snd,
    PFst,
    PSnd,
    LParen,
    RParen,
    LBrack,
    RBrack,
    LAngle,
    RAngle,
    Comma,
    Colon,
    Pipe,
    Turnstile,
    Arrow,  // ->
    Lolli,  // -o
    DArrow, // =>
    Amp,
    Bang,
    CopowOp, // (*)
    PlusOp,  // (+)
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let b: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '#' {
            while i < b.len() && b[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        let tok = match c {
            '(' => {
                if i + 2 < b.len() && b[i + 1] == '*' && b[i + 2] == ')' {
                    i += 3;
                    Tok::CopowOp
                } else if i + 2 < b.len() && b[i + 1] == '+' && b[i + 2] == ')' {
                    i += 3;
                    Tok::PlusOp
                } else {
                    i += 1;
                    Tok::LParen
                }
            }
            ')' => {
                i += 1;
                Tok::RParen
            }
            '[' => {
                i += 1;
                Tok::LBrack
            }
            ']' => {
                i += 1;
                Tok::RBrack
            }
            '<' => {
                i += 1;
                Tok::LAngle
            }
            '>' => {
                i += 1;
                Tok::RAngle
            }
            ',' => {
                i += 1;
                Tok::Comma
            }
            ':' => {
                i += 1;
                Tok::Colon
            }
            '*' => {
                i += 1;
                Tok::Star
            }
            '&' => {
                i += 1;
                Tok::Amp
            }
            '!' => {
                i += 1;
                Tok::Bang
            }
            '|' => {
                if i + 1 < b.len() && b[i + 1] == '-' {
                    i += 2;
                    Tok::Turnstile
                } else {
                    i += 1;
                    Tok::Pipe
                }
            }
            '-' => {
                if i + 1 < b.len() && b[i + 1] == '>' {
                    i += 2;
                    Tok::Arrow
                } else if i + 1 < b.len() && b[i + 1] == 'o' {
                    i += 2;
                    Tok::Lolli
                } else {
                    return Err(ParseError {
                        msg: "stray '-'".into(),
                        offset: i,
                    });
                }
            }
            '=' => {
                if i + 1 < b.len() && b[i + 1] == '>' {
                    i += 2;
                    Tok::DArrow
                } else {
                    return Err(ParseError {
                        msg: "stray '='".into(),
                        offset: i,
                    });
                }
            }
            '^' => {
                i += 1;
                let s = lex_ident(&b, &mut i).ok_or(ParseError {
                    msg: "expected identifier after '^'".into(),
                    offset: i,
                })?;
                Tok::CIdent(s)
            }
            '1' => {
                i += 1;
                Tok::One
            }
            'C' => {
                if i + 1 < b.len() && b[i + 1] == '1' {
                    i += 2;
                    Tok::WithUnit
                } else if i + 1 < b.len() && b[i + 1] == '0' {
                    i += 2;
                    Tok::Zero
                } else {
                    return Err(ParseError {
                        msg: "expected C1 or C0".into(),
                        offset: i,
                    });
                }
            }
            'I' => {
                i += 1;
                Tok::TensorU
            }
            c if c.is_ascii_lowercase() || c == '_' => {
                let s = lex_ident(&b, &mut i).unwrap();
                match s.as_str() {
                    "cstar" => Tok::CStar,
                    "top" => Tok::Top,
                    "fun" => Tok::Fun,
                    "cfun" => Tok::CFun,
                    "lfun" => Tok::LFun,
                    "let" => Tok::Let,
                    "be" => Tok::Be,
                    "in" => Tok::In,
                    "case" => Tok::Case,
                    "of" => Tok::Of,
                    "inl" => Tok::Inl,
                    "inr" => Tok::Inr,
                    "absurd" => Tok::Absurd,
                    "fst" => Tok::Fst,
                    "snd" => Tok::Snd,
                    "pfst" => Tok::PFst,
                    "psnd" => Tok::PSnd,
                    _ => Tok::Ident(s),
                }
            }
            other => {
                return Err(ParseError {
                    msg: format!("unexpected character {other:?}"),
                    offset: i,
                })
            }
        };
        out.push((tok, start));
    }
    Ok(out)
}

fn lex_ident(b: &[char], i: &mut usize) -> Option<String> {
    let start = *i;
    if *i < b.len() && (b[*i].is_ascii_lowercase() || b[*i] == '_') {
        *i += 1;
        while *i < b.len() && (b[*i].is_ascii_alphanumeric() || b[*i] == '_') {
            *i += 1;
        }
        Some(b[start..*i].iter().collect())
    } else {
        None
    }
}

#[derive(Clone)]
enum ScopeEntry {
    Value(String),
    Stoup(String),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    scope: Vec<ScopeEntry>,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(usize::MAX)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            msg: msg.into(),
            offset: self.offset(),
        })
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        match self.next() {
            Some(x) if x == t => Ok(()),
            other => Err(ParseError {
                msg: format!("expected {what}, found {other:?}"),
                offset: self.offset(),
            }),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(s),
            other => Err(ParseError {
                msg: format!("expected {what}, found {other:?}"),
                offset: self.offset(),
            }),
        }
    }

    // ---- types ----

    fn type0(&mut self) -> Result<RawType, ParseError> {
        let lhs = self.type1()?;
        match self.peek() {
            Some(Tok::Arrow) => {
                self.next();
                Ok(RawType::Fun(Box::new(lhs), Box::new(self.type0()?)))
            }
            Some(Tok::Lolli) => {
                self.next();
                Ok(RawType::Lin(Box::new(lhs), Box::new(self.type0()?)))
            }
            Some(Tok::DArrow) => {
                self.next();
                Ok(RawType::Arrow(Box::new(lhs), Box::new(self.type0()?)))
            }
            _ => Ok(lhs),
        }
    }

    fn type1(&mut self) -> Result<RawType, ParseError> {
        let lhs = self.type2()?;
        match self.peek() {
            Some(Tok::Ident(s)) if s == "x" => {
                self.next();
                Ok(RawType::Prod(Box::new(lhs), Box::new(self.type1_operand()?)))
            }
            Some(Tok::Amp) => {
                self.next();
                Ok(RawType::With(Box::new(lhs), Box::new(self.type1_operand()?)))
            }
            Some(Tok::PlusOp) => {
                self.next();
                Ok(RawType::Plus(Box::new(lhs), Box::new(self.type1_operand()?)))
            }
            Some(Tok::CopowOp) => {
                self.next();
                match lhs {
                    RawType::Bang(inner) => {
                        Ok(RawType::Copower(inner, Box::new(self.type1_operand()?)))
                    }
                    _ => self.err("left operand of (*) must be a !-type"),
                }
            }
            _ => Ok(lhs),
        }
    }

    // Right-assoc continuation of a binary chain.
    fn type1_operand(&mut self) -> Result<RawType, ParseError> {
        self.type1()
    }

    fn type2(&mut self) -> Result<RawType, ParseError> {
        if let Some(Tok::Bang) = self.peek() {
            self.next();
            Ok(RawType::Bang(Box::new(self.type3()?)))
        } else {
            self.type3()
        }
    }

    fn type3(&mut self) -> Result<RawType, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => Ok(RawType::VConst(s)),
            Some(Tok::CIdent(s)) => Ok(RawType::CConst(s)),
            Some(Tok::One) => Ok(RawType::Unit),
            Some(Tok::WithUnit) => Ok(RawType::WithUnit),
            Some(Tok::TensorU) => Ok(RawType::TensorUnit),
            Some(Tok::Zero) => Ok(RawType::Zero),
            Some(Tok::LParen) => {
                let t = self.type0()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            other => Err(ParseError {
                msg: format!("expected a type, found {other:?}"),
                offset: self.offset(),
            }),
        }
    }

    /// Parse a type and classify its sort.
    fn sorted_type0(&mut self) -> Result<SortedType, ParseError> {
        let raw = self.type0()?;
        well_formed_type(&raw).map_err(|e| ParseError {
            msg: e.to_string(),
            offset: self.offset(),
        })
    }

    /// Binder annotations exclude bare arrows (the binder's own `->` follows).
    fn sorted_type1(&mut self) -> Result<SortedType, ParseError> {
        let raw = self.type1()?;
        well_formed_type(&raw).map_err(|e| ParseError {
            msg: e.to_string(),
            offset: self.offset(),
        })
    }

    // ---- terms ----

    fn resolve(&self, name: &str) -> Result<Term, ParseError> {
        let mut value_depth = 0usize;
        let mut seen_stoup = false;
        for entry in self.scope.iter().rev() {
            match entry {
                ScopeEntry::Value(n) => {
                    if n == name {
                        return Ok(Term::Var(value_depth));
                    }
                    value_depth += 1;
                }
                ScopeEntry::Stoup(n) => {
                    if n == name {
                        if seen_stoup {
                            return Err(ParseError {
                                msg: format!(
                                    "stoup variable {name} is not in scope here (already consumed)"
                                ),
                                offset: self.offset(),
                            });
                        }
                        return Ok(Term::Stoup);
                    }
                    seen_stoup = true;
                }
            }
        }
        Err(ParseError {
            msg: format!("unbound variable {name}"),
            offset: self.offset(),
        })
    }

    fn term0(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Fun) => {
                self.next();
                let name = self.expect_ident("binder name")?;
                self.expect(Tok::Colon, "':'")?;
                let ty = self.sorted_type1()?;
                self.expect(Tok::Arrow, "'->'")?;
                let vt = ty.as_value();
                self.scope.push(ScopeEntry::Value(name.clone()));
                let body = self.term0();
                self.scope.pop();
                Ok(lam(&name, vt, body?))
            }
            Some(Tok::CFun) => {
                self.next();
                let name = self.expect_ident("binder name")?;
                self.expect(Tok::Colon, "':'")?;
                let ty = self.sorted_type1()?;
                self.expect(Tok::Arrow, "'->'")?;
                let vt = ty.as_value();
                self.scope.push(ScopeEntry::Value(name.clone()));
                let body = self.term0();
                self.scope.pop();
                Ok(clam(&name, vt, body?))
            }
            Some(Tok::LFun) => {
                self.next();
                let name = self.expect_ident("binder name")?;
                self.expect(Tok::Colon, "':'")?;
                let ty = self.sorted_type1()?;
                self.expect(Tok::Arrow, "'->'")?;
                let ct = match ty {
                    SortedType::Comp(c) => c,
                    SortedType::Value(ValueType::Embed(c)) => *c,
                    _ => return self.err("a linear lambda binds a computation-typed stoup"),
                };
                self.scope.push(ScopeEntry::Stoup(name.clone()));
                let body = self.term0();
                self.scope.pop();
                Ok(linlam(&name, ct, body?))
            }
            Some(Tok::Let) => {
                self.next();
                match self.next() {
                    Some(Tok::Top) => {
                        self.expect(Tok::Be, "'be'")?;
                        let subject = self.term0()?;
                        self.expect(Tok::In, "'in'")?;
                        let cont = self.term0()?;
                        Ok(ilet(subject, cont))
                    }
                    Some(Tok::Bang) => {
                        let x = self.expect_ident("binder name")?;
                        match self.next() {
                            Some(Tok::Be) => {
                                let subject = self.term0()?;
                                self.expect(Tok::In, "'in'")?;
                                self.scope.push(ScopeEntry::Value(x.clone()));
                                let cont = self.term0();
                                self.scope.pop();
                                Ok(banglet(subject, &x, cont?))
                            }
                            Some(Tok::CopowOp) => {
                                let y = self.expect_ident("stoup binder name")?;
                                self.expect(Tok::Be, "'be'")?;
                                let subject = self.term0()?;
                                self.expect(Tok::In, "'in'")?;
                                self.scope.push(ScopeEntry::Value(x.clone()));
                                self.scope.push(ScopeEntry::Stoup(y.clone()));
                                let cont = self.term0();
                                self.scope.pop();
                                self.scope.pop();
                                Ok(copowlet(subject, &x, &y, cont?))
                            }
                            other => Err(ParseError {
                                msg: format!("expected 'be' or '(*)', found {other:?}"),
                                offset: self.offset(),
                            }),
                        }
                    }
                    other => Err(ParseError {
                        msg: format!("expected 'top' or '!' after let, found {other:?}"),
                        offset: self.offset(),
                    }),
                }
            }
            Some(Tok::Case) => {
                self.next();
                let subject = self.term0()?;
                self.expect(Tok::Of, "'of'")?;
                self.expect(Tok::Inl, "'inl'")?;
                let x = self.expect_ident("branch binder")?;
                self.expect(Tok::Arrow, "'->'")?;
                self.scope.push(ScopeEntry::Stoup(x.clone()));
                let left = self.term0();
                self.scope.pop();
                let left = left?;
                self.expect(Tok::Pipe, "'|'")?;
                self.expect(Tok::Inr, "'inr'")?;
                let y = self.expect_ident("branch binder")?;
                self.expect(Tok::Arrow, "'->'")?;
                self.scope.push(ScopeEntry::Stoup(y.clone()));
                let right = self.term0();
                self.scope.pop();
                Ok(case(subject, &x, left, &y, right?))
            }
            _ => self.term1(),
        }
    }

    fn term1(&mut self) -> Result<Term, ParseError> {
        let lhs = self.term2()?;
        if let Some(Tok::CopowOp) = self.peek() {
            self.next();
            match lhs {
                Term::Bang(inner) => Ok(Term::Copow(inner, Box::new(self.term1()?))),
                _ => self.err("left operand of (*) must be a !-term"),
            }
        } else {
            Ok(lhs)
        }
    }

    fn starts_operand(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                Tok::Ident(_)
                    | Tok::Star
                    | Tok::CStar
                    | Tok::Top
                    | Tok::LParen
                    | Tok::LAngle
                    | Tok::Bang
                    | Tok::Fst
                    | Tok::Snd
                    | Tok::PFst
                    | Tok::PSnd
                    | Tok::Inl
                    | Tok::Inr
                    | Tok::Absurd
            )
        )
    }

    fn term2(&mut self) -> Result<Term, ParseError> {
        let mut acc = self.term3()?;
        while self.starts_operand() {
            let arg = self.term3()?;
            acc = app(acc, arg);
        }
        Ok(acc)
    }

    fn annotation(&mut self) -> Result<Option<CompType>, ParseError> {
        if let Some(Tok::LBrack) = self.peek() {
            self.next();
            let t = self.sorted_type0()?;
            self.expect(Tok::RBrack, "']'")?;
            match t {
                SortedType::Comp(c) => Ok(Some(c)),
                SortedType::Value(ValueType::Embed(c)) => Ok(Some(*c)),
                _ => self.err("annotation must be a computation type"),
            }
        } else {
            Ok(None)
        }
    }

    fn term3(&mut self) -> Result<Term, ParseError> {
        match self.peek() {
            Some(Tok::Fst) => {
                self.next();
                Ok(fst(self.term4()?))
            }
            Some(Tok::Snd) => {
                self.next();
                Ok(snd(self.term4()?))
            }
            Some(Tok::PFst) => {
                self.next();
                Ok(cfst(self.term4()?))
            }
            Some(Tok::PSnd) => {
                self.next();
                Ok(csnd(self.term4()?))
            }
            Some(Tok::Bang) => {
                self.next();
                Ok(bang(self.term4()?))
            }
            Some(Tok::Inl) => {
                self.next();
                let ann = self.annotation()?;
                Ok(Term::Inl(ann, Box::new(self.term4()?)))
            }
            Some(Tok::Inr) => {
                self.next();
                let ann = self.annotation()?;
                Ok(Term::Inr(ann, Box::new(self.term4()?)))
            }
            Some(Tok::Absurd) => {
                self.next();
                let ann = self.annotation()?;
                Ok(Term::Absurd(ann, Box::new(self.term4()?)))
            }
            _ => self.term4(),
        }
    }

    fn term4(&mut self) -> Result<Term, ParseError> {
        match self.next() {
            Some(Tok::Ident(s)) => self.resolve(&s),
            Some(Tok::Star) => Ok(Term::Star),
            Some(Tok::CStar) => Ok(Term::CStar),
            Some(Tok::Top) => Ok(Term::Top),
            Some(Tok::LParen) => {
                let t = self.term0()?;
                if let Some(Tok::Comma) = self.peek() {
                    self.next();
                    let u = self.term0()?;
                    self.expect(Tok::RParen, "')'")?;
                    Ok(pair(t, u))
                } else {
                    self.expect(Tok::RParen, "')'")?;
                    Ok(t)
                }
            }
            Some(Tok::LAngle) => {
                let t = self.term0()?;
                self.expect(Tok::Comma, "','")?;
                let u = self.term0()?;
                self.expect(Tok::RAngle, "'>'")?;
                Ok(cpair(t, u))
            }
            other => Err(ParseError {
                msg: format!("expected a term, found {other:?}"),
                offset: self.offset(),
            }),
        }
    }
}

fn new_parser(src: &str) -> Result<Parser, ParseError> {
    Ok(Parser {
        toks: lex(src)?,
        pos: 0,
        scope: Vec::new(),
    })
}

/// Parse a type.
pub fn parse_type(src: &str) -> Result<SortedType, ParseError> {
    let mut p = new_parser(src)?;
    let t = p.sorted_type0()?;
    if p.peek().is_some() {
        return p.err("trailing input after type");
    }
    Ok(t)
}

/// Parse a term in a given scope (value names outermost-first, optional
/// stoup name).
pub fn parse_term(
    src: &str,
    gamma_names: &[String],
    stoup_name: Option<&str>,
) -> Result<Term, ParseError> {
    let mut p = new_parser(src)?;
    p.scope = gamma_names
        .iter()
        .map(|n| ScopeEntry::Value(n.clone()))
        .collect();
    if let Some(z) = stoup_name {
        p.scope.push(ScopeEntry::Stoup(z.to_string()));
    }
    let t = p.term0()?;
    if p.peek().is_some() {
        return p.err("trailing input after term");
    }
    Ok(t)
}

/// Parse a judgement file: `x1:A1, ... | z:C |- t : B`, stoup optional.
pub fn parse_judgement(src: &str) -> Result<Judgement, ParseError> {
    let mut p = new_parser(src)?;
    let mut gamma: Vec<(String, ValueType)> = Vec::new();
    // Gamma entries until `|` or `|-`.
    loop {
        match p.peek() {
            Some(Tok::Turnstile) | Some(Tok::Pipe) | None => break,
            Some(Tok::Ident(_)) => {
                let name = p.expect_ident("context variable")?;
                p.expect(Tok::Colon, "':'")?;
                let ty = p.sorted_type0()?;
                if gamma.iter().any(|(n, _)| *n == name) {
                    return p.err(format!("duplicate context name {name}"));
                }
                gamma.push((name, ty.as_value()));
                if let Some(Tok::Comma) = p.peek() {
                    p.next();
                } else {
                    break;
                }
            }
            other => {
                let msg = format!("expected a context entry or '|-', found {other:?}");
                return p.err(msg);
            }
        }
    }
    let stoup = if let Some(Tok::Pipe) = p.peek() {
        p.next();
        let name = p.expect_ident("stoup variable")?;
        p.expect(Tok::Colon, "':'")?;
        let ty = p.sorted_type0()?;
        let ct = match ty {
            SortedType::Comp(c) => c,
            SortedType::Value(ValueType::Embed(c)) => *c,
            _ => return p.err("the stoup carries a computation type"),
        };
        Some((name, ct))
    } else {
        None
    };
    p.expect(Tok::Turnstile, "'|-'")?;
    p.scope = gamma
        .iter()
        .map(|(n, _)| ScopeEntry::Value(n.clone()))
        .collect();
    if let Some((z, _)) = &stoup {
        p.scope.push(ScopeEntry::Stoup(z.clone()));
    }
    let subject = p.term0()?;
    p.expect(Tok::Colon, "':' before the judgement type")?;
    let ty = p.sorted_type0()?;
    if p.peek().is_some() {
        return p.err("trailing input after judgement");
    }
    if stoup.is_some() && !matches!(ty.clone().normalized(), SortedType::Comp(_)) {
        return p.err("a judgement with a stoup has a computation type");
    }
    Ok(Judgement {
        gamma,
        stoup,
        subject,
        ty: ty.normalized(),
    })
}
