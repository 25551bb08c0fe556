use betadiv::chain::{ad_family, build_chain, max_approx, verify_chain};
use betadiv::filter::{divides_tilde, interpolation_check, product_member};
use betadiv::{FilterPresentation, Scheme, SetExpr};

#[test]
fn tree_chain_verifies() {
    for k in [1, 4, 6] {
        let family = ad_family(k, Scheme::Tree).unwrap();
        let chain = build_chain(k, &family).unwrap();
        let report = verify_chain(&chain, 100_000).unwrap();
        assert!(
            report.pass,
            "k={k}: {:?}",
            report.failures().collect::<Vec<_>>()
        );
        assert_eq!(report.pairs.len(), (k + 1) * k);
    }
}

#[test]
fn reversed_family_breaks_nothing_but_order() {
    let mut family = ad_family(5, Scheme::Residue).unwrap();
    family.reverse();
    let chain = build_chain(5, &family).unwrap();
    assert!(verify_chain(&chain, 100_000).unwrap().pass);
}

#[test]
fn max_approximation_is_above_principals() {
    let top = max_approx(6).unwrap();
    assert_eq!(top.core(), &SetExpr::Mult(720));
    for n in [1, 2, 3, 4, 5, 6, 10] {
        let p = FilterPresentation::principal(n).unwrap();
        assert!(divides_tilde(&p, &top, 1000).unwrap().is_proved(), "n={n}");
    }
    assert!(
        divides_tilde(&FilterPresentation::principal(7).unwrap(), &top, 1000)
            .unwrap()
            .is_refuted()
    );
}

#[test]
fn principal_products_are_products() {
    let (f, g) = (
        FilterPresentation::principal(6).unwrap(),
        FilterPresentation::principal(35).unwrap(),
    );
    assert!(product_member(&f, &g, &SetExpr::Lit([210].into()), 100)
        .unwrap()
        .is_proved());
    assert!(product_member(&f, &g, &SetExpr::Lit([211].into()), 100)
        .unwrap()
        .is_refuted());
}

#[test]
fn interpolation_between_principals() {
    let (two, six) = (
        FilterPresentation::principal(2).unwrap(),
        FilterPresentation::principal(6).unwrap(),
    );
    let chain = ad_family(2, Scheme::Residue).unwrap();
    let c = build_chain(2, &chain).unwrap();
    assert!(interpolation_check(&two, &six, 100).unwrap().is_refuted());
    assert!(
        interpolation_check(&c.links[1], &c.links[2], 1000)
            .unwrap()
            .state
            .decided()
            != Some(false)
    );
}
