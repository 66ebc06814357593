//! End-to-end checks of parse -> check -> translate -> equality on the
//! worked instances from the development notes.

use eec::eq::{canonicalize, check_eq, verify_trace, EqVerdict, Fuel};
use eec::parse::{parse_judgement, parse_type};
use eec::print::show_judgement;
use eec::syntax::*;
use eec::translate::*;
use eec::{check_judgement, check_value};

fn judge(src: &str) -> eec::TypedTerm {
    let j = parse_judgement(src).expect("parses");
    check_judgement(&j).expect("checks")
}

#[test]
fn parse_print_round_trip() {
    for src in [
        "|- top : I",
        "|- fun x:1 -> x : 1 -> 1",
        "x:a, y:b |- (x, y) : a x b",
        "| z:^a |- z : ^a",
        "| z:!a |- let !x be z in !x : !a",
        "f:^a -o ^b | z:^a |- f z : ^b",
        "| z:^a (+) ^b |- case z of inl x -> inl[^b] x | inr y -> inr[^a] y : ^a (+) ^b",
        "x:a | z:^b |- !x (*) z : !a (*) ^b",
        "|- lfun z:^a -> z : ^a -o ^a",
        "v:I, w:^a |- let top be v in w : ^a",
        "|- cfun x:1 -> cstar : 1 => C1",
    ] {
        let j = parse_judgement(src).expect(src);
        let tt = check_judgement(&j).expect(src);
        let printed = show_judgement(&tt.judgement);
        let j2 = parse_judgement(&printed).unwrap_or_else(|e| panic!("{printed}: {e}"));
        assert!(j.alpha_eq(&j2), "round trip failed:\n{src}\n{printed}");
    }
}

#[test]
fn iterated_linear_arrow_is_a_sort_error() {
    let err = parse_type("(^a -o ^b) -o ^c").unwrap_err();
    assert!(err.to_string().contains("sort error"), "{err}");
}

#[test]
fn bang_of_stoup_is_stoup_misuse() {
    let j = parse_judgement("| z:^a |- !z : !^a").expect("parses");
    let err = check_judgement(&j).unwrap_err();
    assert_eq!(err.kind, eec::TypeErrorKind::StoupMisuse);
}

#[test]
fn value_lambda_premise_has_empty_stoup() {
    // fun y:1 -> z under stoup z is not formable: the value-lambda premise
    // carries no stoup (and the judgement shape would be wrong anyway).
    let stoup = ("z".to_string(), CompType::Const("a".into()));
    let subject = lam("y", ValueType::Unit, Term::Stoup);
    let err = eec::check_comp(&[], &stoup, &subject, None).unwrap_err();
    assert_eq!(err.kind, eec::TypeErrorKind::StoupMisuse);
}

#[test]
fn normalize_beta_examples() {
    // (fun x:1 -> x) * reduces to *
    let tt = judge("|- (fun x:1 -> x) * : 1");
    let nf = eec::eq::normalize(&tt, 100);
    assert!(nf.complete);
    assert!(nf.term.alpha_eq(&Term::Star));

    // fst (*, fun x:1 -> x) reduces to *
    let tt = judge("|- fst (*, fun x:1 -> x) : 1");
    let nf = eec::eq::normalize(&tt, 100);
    assert!(nf.term.alpha_eq(&Term::Star));

    // let !x be !* in !x reduces to !*
    let tt = judge("|- let !x be !* in !x : !1");
    let nf = eec::eq::normalize(&tt, 100);
    assert!(nf.term.alpha_eq(&bang(Term::Star)));
}

#[test]
fn eta_equality_is_proved() {
    let a = judge("f:a -> b |- fun x:a -> f x : a -> b");
    let b = judge("f:a -> b |- f : a -> b");
    let verdict = check_eq(&a, &b, Fuel::default()).expect("same judgement");
    match &verdict {
        EqVerdict::Proved(steps) => {
            verify_trace(&a, &b, steps).expect("trace replays");
        }
        other => panic!("expected Proved, got {other:?}"),
    }
}

#[test]
fn alpha_variants_are_proved_with_empty_trace() {
    let a = judge("|- fun x:1 -> x : 1 -> 1");
    let b = judge("|- fun y:1 -> y : 1 -> 1");
    let verdict = check_eq(&a, &b, Fuel::default()).unwrap();
    assert!(verdict.is_proved());
}

#[test]
fn top_involution_instance() {
    // ⊤°° with R = ^r, transported through phi_I, is provably equal to ⊤.
    let r = ResultType::CompConst("r".into());
    let top = judge("|- top : I");
    let once = self_vterm(&top, &r).expect("translates");
    // I° = ^r -o ^r: the translation is the linear identity.
    let expect = judge("|- lfun k:^r -> k : ^r -o ^r");
    assert!(once
        .judgement
        .subject
        .alpha_eq(&expect.judgement.subject));
    let twice = self_vterm(&once, &r).expect("translates");
    let (phi_i, _) = iso_value(
        &ValueType::embed(CompType::TensorUnit),
        &r,
    )
    .expect("iso");
    let applied = Judgement {
        gamma: vec![],
        stoup: None,
        subject: app(
            phi_i.judgement.subject.clone(),
            twice.judgement.subject.clone(),
        ),
        ty: SortedType::Comp(CompType::TensorUnit),
    };
    let applied = check_judgement(&applied).expect("checks");
    let verdict = check_eq(&top, &applied, Fuel::default()).unwrap();
    assert!(verdict.is_proved(), "got {verdict:?}");
}

#[test]
fn self_translation_type_clauses() {
    let r = ResultType::CompConst("r".into());
    let rr = CompType::Const("r".into());
    // !A maps to A° => R
    let a = ValueType::Const("a".into());
    assert_eq!(
        self_ctype(&CompType::bang(a.clone()), &r),
        CompType::arrow(a.clone(), rr.clone())
    );
    // R maps to I when R is a constant, and I maps to R.
    assert_eq!(self_ctype(&rr, &r), CompType::TensorUnit);
    assert_eq!(self_ctype(&CompType::TensorUnit, &r), rr);
}

#[test]
fn self_translation_term_clauses() {
    let r = ResultType::CompConst("r".into());
    // z* = k_z
    let z = judge("| z:^a |- z : ^a");
    let tz = self_cterm(&z, &r).expect("translates");
    assert!(tz.judgement.subject.alpha_eq(&Term::Stoup));
    assert_eq!(
        tz.judgement.stoup.as_ref().map(|(n, _)| n.as_str()),
        Some("k_z")
    );
    // (pfst z)* = z*[inl k_z / k_z] = inl k_z
    let f = judge("| z:^a & ^b |- pfst z : ^a");
    let tf = self_cterm(&f, &r).expect("translates");
    assert!(tf
        .judgement
        .subject
        .alpha_eq(&inl(CompType::Const("b".into()), Term::Stoup)));
    // ⊤° = lfun k:^r -> k is covered in top_involution_instance.
}

#[test]
fn iso_examples() {
    let r = ResultType::CompConst("r".into());
    // phi_1 = fun x:1 -> *
    let (phi1, _) = iso_value(&ValueType::Unit, &r).unwrap();
    assert!(phi1
        .judgement
        .subject
        .alpha_eq(&lam("x", ValueType::Unit, Term::Star)));
    // psi_^a = lfun z:^a -> z for ^a different from R
    let (psia, _) = iso_comp(&CompType::Const("a".into()), &r).unwrap();
    assert!(psia
        .judgement
        .subject
        .alpha_eq(&linlam("z", CompType::Const("a".into()), Term::Stoup)));
    // psi_{!a}^{-1} = lfun w:!a -> let !x be w in !(phi_a^{-1} x) (*) top
    let (_, psi_bang_inv) = iso_comp(&CompType::bang(ValueType::Const("a".into())), &r).unwrap();
    let expect = linlam(
        "w",
        CompType::bang(ValueType::Const("a".into())),
        banglet(
            Term::Stoup,
            "x",
            copow(
                app(
                    lam("x", ValueType::Const("a".into()), var(0)),
                    var(0),
                ),
                Term::Top,
            ),
        ),
    );
    assert!(psi_bang_inv.judgement.subject.alpha_eq(&expect));
    // ResultType::Other is an unsupported configuration for isos.
    let other = ResultType::Other(CompType::with(
        CompType::Const("r".into()),
        CompType::Const("r".into()),
    ));
    assert!(matches!(
        iso_comp(&CompType::Zero, &other),
        Err(TranslateError::UnsupportedResultType)
    ));
}

#[test]
fn iso_composites_collapse_under_canonicalization() {
    // psi_C ∘ psi_C^{-1} and the reverse composite prove equal to the
    // identity, for a type that exercises the bang/copower rows.
    let r = ResultType::CompConst("r".into());
    let c = CompType::bang(ValueType::Const("a".into()));
    let (psi_c, psi_c_inv) = iso_comp(&c, &r).unwrap();
    let ctt_c = ctt(&c, &r);

    // lfun z:C** -> psi_inv (psi z)  vs  lfun z:C** -> z
    let composite = Judgement {
        gamma: vec![],
        stoup: None,
        subject: linlam(
            "z",
            ctt_c.clone(),
            app(
                psi_c_inv.judgement.subject.clone(),
                app(psi_c.judgement.subject.clone(), Term::Stoup),
            ),
        ),
        ty: SortedType::Value(ValueType::lin(ctt_c.clone(), ctt_c.clone())),
    };
    let composite = check_judgement(&composite).expect("checks");
    let identity = Judgement {
        gamma: vec![],
        stoup: None,
        subject: linlam("z", ctt_c.clone(), Term::Stoup),
        ty: SortedType::Value(ValueType::lin(ctt_c.clone(), ctt_c)),
    };
    let identity = check_judgement(&identity).expect("checks");
    let verdict = check_eq(&composite, &identity, Fuel::default()).unwrap();
    assert!(verdict.is_proved(), "got {verdict:?}");

    let c2 = c.clone();
    let composite2 = Judgement {
        gamma: vec![],
        stoup: None,
        subject: linlam(
            "w",
            c2.clone(),
            app(
                psi_c.judgement.subject.clone(),
                app(psi_c_inv.judgement.subject.clone(), Term::Stoup),
            ),
        ),
        ty: SortedType::Value(ValueType::lin(c2.clone(), c2.clone())),
    };
    let composite2 = check_judgement(&composite2).expect("checks");
    let identity2 = Judgement {
        gamma: vec![],
        stoup: None,
        subject: linlam("w", c2.clone(), Term::Stoup),
        ty: SortedType::Value(ValueType::lin(c2.clone(), c2)),
    };
    let identity2 = check_judgement(&identity2).expect("checks");
    let verdict2 = check_eq(&composite2, &identity2, Fuel::default()).unwrap();
    assert!(verdict2.is_proved(), "got {verdict2:?}");
}

#[test]
fn counterexample_pair_is_distinct() {
    use eec::stlc::*;
    // f:1->1, g:1->1 |- (fun x:1 -> fun y:1 -> *) (f *) (g *) : 1, and the
    // same with f and g swapped. At R = I their cbv linear-use CPS
    // translations must not be proved equal.
    let unit = StlcType::Unit;
    let f_ty = StlcType::fun(unit.clone(), unit.clone());
    let theta = vec![("f".to_string(), f_ty.clone()), ("g".to_string(), f_ty)];
    let lam2 = slam(
        "x",
        unit.clone(),
        slam("y", unit.clone(), StlcTerm::Star),
    );
    // In the context, f is Var(1) and g is Var(0).
    let m1 = sapp(
        sapp(lam2.clone(), sapp(svar(1), StlcTerm::Star)),
        sapp(svar(0), StlcTerm::Star),
    );
    let m2 = sapp(
        sapp(lam2, sapp(svar(0), StlcTerm::Star)),
        sapp(svar(1), StlcTerm::Star),
    );
    let r = ResultType::TensorUnit;
    let t1 = lincps_cbv_term(&theta, &m1, &r).expect("translates");
    let t2 = lincps_cbv_term(&theta, &m2, &r).expect("translates");
    let verdict = check_eq(&t1, &t2, Fuel::default()).unwrap();
    match verdict {
        EqVerdict::DistinctNormalForms(_, _) => {}
        other => panic!("expected DistinctNormalForms, got {other:?}"),
    }
    // Sanity: each side is equal to itself.
    let same = check_eq(&t1, &t1, Fuel::default()).unwrap();
    assert!(same.is_proved());
}

#[test]
fn canonical_forms_recheck() {
    for src in [
        "|- lfun z:!a (*) I -> z : (!a (*) I) -o (!a (*) I)",
        "x:a |- !x : !a",
        "| z:!1 |- let !x be z in !x : !1",
    ] {
        let tt = judge(src);
        let nf = canonicalize(&tt, 10_000);
        assert!(nf.complete, "{src}");
        let j = Judgement {
            subject: nf.term,
            ..tt.judgement.clone()
        };
        check_judgement(&j).unwrap_or_else(|e| panic!("{src}: {e}"));
    }
}
