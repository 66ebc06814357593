//! Enriched effect calculus: syntax, two-judgement typechecking, the
//! equational theory as a rewriting engine with proof traces, the
//! call-by-value / call-by-name translations of simply-typed lambda-calculus,
//! the linear-use CPS translations, the generic linear-use CPS
//! self-translation with its involution isomorphisms, and suites that
//! machine-check desk-scale instances of the metatheory.

pub mod check;
pub mod eq;
pub mod gen;
pub mod json;
pub mod parse;
pub mod print;
pub mod stlc;
pub mod suite;
pub mod syntax;
pub mod translate;

pub use check::{
    check_comp, check_judgement, check_stlc, check_value, shift_stoup, stoup_linear, weaken,
    well_formed_type, AppRule, RawType, TypeError, TypeErrorKind, TypedTerm,
};
pub use eq::{check_eq, normalize, rewrite_candidates, Dir, EqVerdict, Fuel, Rule, TraceStep};
pub use parse::{parse_judgement, parse_term, parse_type, ParseError};
pub use syntax::{alpha_eq, subst_stoup, subst_value, CompType, Judgement, SortedType, Term, ValueType};
