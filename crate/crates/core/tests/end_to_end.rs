use iwasawa_core::analyzer::{compare_predictions, gcd_signed_pair, theorem_consistency, Status};
use iwasawa_core::curve::{a_ell, classify_reduction, Curve, ReductionType};
use iwasawa_core::lambda::divrem;
use iwasawa_core::modsym::{compute_table, default_denominator_bound, validate_hecke};
use iwasawa_core::module_model::FactoredIdeal;
use iwasawa_core::signed::{extract_plus_minus, extract_sharp_flat, SignLabel};
use iwasawa_core::theta::{build_thetas, check_compat};
use iwasawa_core::{IwasawaContext, LambdaElement};

fn e37() -> Curve {
    Curve::new("37a1", [0, 0, 1, -1, 0], 37, 1, None, -1, 1).unwrap()
}

fn e53() -> Curve {
    Curve::new("53a1", [1, -1, 1, 0, 0], 53, 1, None, -1, 1).unwrap()
}

#[test]
fn plus_minus_at_seventeen() {
    let c = e37();
    let local = classify_reduction(&c, 17);
    assert_eq!(local.kind, ReductionType::GoodSupersingular);
    assert_eq!(local.a_p, 0);
    let table = compute_table(&c, 17, 3, 30, default_denominator_bound(1, 17, 8)).unwrap();
    assert!(table.symmetry_violations().is_empty());
    for n in 0..3 {
        assert!(validate_hecke(&table, 0, n).unwrap().passed(), "level {n}");
    }
    let thetas = build_thetas(&table, 2, 8).unwrap();
    check_compat(&thetas, 2, 0).unwrap();
    let pair = extract_plus_minus(&thetas, 0).unwrap();
    assert_eq!(pair.labels(), [SignLabel::Plus, SignLabel::Minus]);
    let g = gcd_signed_pair(&pair).unwrap();
    assert!(g.certified);
    assert_eq!(g.to_string(), "X");

    // The generator divides both representatives.
    for s in &pair.series {
        let ctx = s.series.context();
        let d = IwasawaContext::degree(17, ctx.precision(), ctx.len() + 2).unwrap();
        let f = LambdaElement::from_residues(&d, s.series.residues().to_vec());
        assert!(divrem(&f, &g.generator(&d).unwrap()).unwrap().remainder.is_zero());
    }

    let one = FactoredIdeal::parse("1", 17).unwrap();
    assert_eq!(theorem_consistency(&g, 17, &one).overall(), Status::Pass);
    let v = compare_predictions(&g, 17, &c.e_sequence, &one);
    assert_eq!(v.overall(), Status::Pass);
    assert_eq!(v.delta_e, Some(1));
}

#[test]
fn sharp_flat_at_three() {
    let c = e53();
    assert_eq!(a_ell(&c, 3).unwrap(), -3);
    let table = compute_table(&c, 3, 4, 30, default_denominator_bound(1, 3, 8)).unwrap();
    let thetas = build_thetas(&table, 3, 8).unwrap();
    for n in 2..=3 {
        check_compat(&thetas, n, -3).unwrap();
    }
    let pair = extract_sharp_flat(&thetas, -3).unwrap();
    assert_eq!(pair.labels(), [SignLabel::Sharp, SignLabel::Flat]);
    assert_eq!(pair.certified_precision, 1);
    assert_eq!(pair.invariant_multiset(), [(0, 1), (0, 1)]);
    assert!(extract_plus_minus(&thetas, -3).is_err());
    assert_eq!(gcd_signed_pair(&pair).unwrap().to_string(), "X");
}
