//! Twisting elements, twisted differentials and cohomology, homotopies of
//! twisting elements and the maps induced by A∞-morphisms.

use std::sync::Arc;

use ainfty_core::ainfty::{AInfinity, AInfMorphism};
use ainfty_core::doc::load;
use ainfty_core::fixtures;
use ainfty_core::graded::Element;
use ainfty_core::random::{self, rng, CeData};
use ainfty_core::twist::*;
use ainfty_core::{Error, Field};
use proptest::prelude::*;
use rand::Rng;

fn named(a: &AInfinity, n: &str) -> Element {
    Element::basis(a.space().field(), a.space().index_of(n).unwrap())
}

#[test]
fn s3u_twisted_by_u_is_acyclic() {
    for f in [Field::Q, Field::Fp(7)] {
        let a = load(&fixtures::s3u(f)).unwrap().algebra;
        let (one, u) = (named(&a, "1"), named(&a, "u"));
        let tw = is_twisting_element(&a, &u, None).unwrap();
        // ∂_u 1 = b_1(1) + b_2(u, 1), read off the operations directly
        let direct = a.d(&one).add(&a.eval(&[&u, &one]));
        assert_eq!(tw.d(&one), direct);
        assert_eq!(direct, u);
        assert!(tw.d(&u).is_zero());
        let d = tw.matrix();
        assert!(d.mul(&d).is_zero());
        assert_eq!(d.rank(), 1);
        assert_eq!(twisted_cohomology(&tw).unwrap().dims(), [0, 0]);
    }
}

#[test]
fn untwisted_cohomology_of_s3u() {
    let a = load(&fixtures::s3u(Field::Q)).unwrap().algebra;
    let tw = is_twisting_element(&a, &Element::zero(), None).unwrap();
    assert_eq!(twisted_cohomology(&tw).unwrap().dims(), [1, 1]);
}

#[test]
fn odd_and_non_closed_elements_are_rejected() {
    let a = load(&fixtures::s3u(Field::Q)).unwrap().algebra;
    assert_eq!(is_twisting_element(&a, &named(&a, "1"), None).unwrap_err(), Error::OddDegree);
    let a = load(&fixtures::heis_z(Field::Q)).unwrap().algebra;
    // ∂_v v = b_1(v) = w ≠ 0
    let v = named(&a, "v");
    assert!(matches!(is_twisting_element(&a, &v, None), Err(Error::NotTwisting(_))));
}

#[test]
fn z2_grading_needs_an_explicit_bound() {
    let mut doc = fixtures::s3u(Field::Q);
    doc.grading = ainfty_core::graded::GradingMode::Z2;
    for b in doc.basis.iter_mut() {
        b.degree = b.degree.rem_euclid(2);
    }
    let a = load(&doc).unwrap().algebra;
    let u = named(&a, "u");
    // a DGA certifies its arity bound, so no explicit bound is needed
    assert!(is_twisting_element(&a, &u, None).is_ok());
    let ops = a.ops().to_vec();
    let not_dga = Arc::new(a.with_ops(ops, false).unwrap());
    assert!(matches!(is_twisting_element(&not_dga, &u, None), Err(Error::NonTerminatingSeries(_))));
    assert!(is_twisting_element(&not_dga, &u, Some(2)).is_ok());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    /// The bar-side twisting identity, the Bianchi identity and the
    /// curvature identity hold for arbitrary even `h`, twisting or not.
    #[test]
    fn identities_hold_for_random_even_elements(seed in 0u64..1_000_000) {
        let mut r = rng(seed);
        let ce = CeData::random(Field::Q, &mut r, 3, 1, true);
        let a = ce.algebra();
        let sp = a.space().clone();
        let h = random::random_even(&sp, &mut r);
        prop_assert!(bianchi_residual(&a, &h, None).unwrap().is_zero());
        for i in 0..sp.dim() {
            let x = Element::basis(Field::Q, i);
            prop_assert!(bar_twist_residual(&a, &h, &x, 4, None).unwrap().is_zero());
            prop_assert!(curvature_residual(&a, &h, &x, None).unwrap().is_zero());
        }
    }
}

#[test]
fn random_even_elements_are_mostly_not_twisting() {
    let mut r = rng(4);
    let mut rejected = 0;
    for _ in 0..10 {
        let ce = CeData::random(Field::Q, &mut r, 3, 1, true);
        let a = ce.algebra();
        let h = random::random_even(a.space(), &mut r);
        let closed = twisted_apply(&a, &h, &h, 2).is_zero();
        match is_twisting_element(&a, &h, None) {
            Ok(_) => assert!(closed),
            Err(Error::NotTwisting(_)) => {
                assert!(!closed);
                rejected += 1;
            }
            Err(e) => panic!("{e}"),
        }
    }
    assert!(rejected > 0);
}

#[test]
fn bar_identity_on_a_transferred_structure() {
    // b̄_3 ≠ 0 here; h of positive degree keeps every series finite
    let a = load(&fixtures::heis_tr(Field::Fp(7))).unwrap().algebra;
    let h = named(&a, "[x1x2y]").scale(&Field::Fp(7).from_i64(3));
    let tw = is_twisting_element(&a, &h, None).unwrap();
    assert_eq!(tw.cap(), a.ops().len());
    for i in 0..a.space().dim() {
        let x = Element::basis(Field::Fp(7), i);
        assert!(bar_twist_residual(&a, &h, &x, 5, None).unwrap().is_zero());
    }
}

fn heis_z_twist(f: Field) -> TwistingElement {
    let l = load(&fixtures::heis_z(f)).unwrap();
    let h = l.element("h").unwrap();
    is_twisting_element(&l.algebra, &h, None).unwrap()
}

#[test]
fn heis_z_twisted_cohomology() {
    for f in [Field::Q, Field::Fp(7)] {
        let tw = heis_z_twist(f);
        let hc = twisted_cohomology(&tw).unwrap();
        assert_eq!(hc.dims(), [3, 2]);
        for k in 0..2 {
            for rep in hc.reps(k) {
                assert!(tw.d(&rep).is_zero());
            }
        }
    }
}

/// A random unital CE algebra with a twisting element `h` of degree 2 and
/// an odd `c` that moves it, together with the endpoint.
fn moving_homotopy(seed: u64) -> Option<(TwistingElement, Element, Element)> {
    let mut r = rng(seed);
    let ce = CeData::random(Field::Q, &mut r, 3, 1, true);
    let a = ce.algebra();
    let h = random::random_closed(&a, &[2], &mut r).ok()?;
    let tw = is_twisting_element(&a, &h, None).unwrap();
    let c = random::random_element_in(a.space(), &[-1, 1], &mut r);
    let h2 = homotopy_endpoint(&tw, &c, 20).ok()?;
    (h2 != h).then_some((tw, c, h2))
}

#[test]
fn homotopies_of_twisting_elements_induce_isomorphisms() {
    let mut done = 0;
    for seed in 0..40 {
        let Some((tw, c, h2)) = moving_homotopy(seed) else { continue };
        let a = tw.algebra().clone();
        let tw2 = is_twisting_element(&a, &h2, None).unwrap();
        let hom = TwistHomotopy::new(tw.clone(), tw2.clone(), c).unwrap();
        let p = psi(&hom).unwrap();
        assert_eq!(twisted_cohomology(&tw2).unwrap().dims(), twisted_cohomology(&tw).unwrap().dims());
        for m in &p.on_cohomology {
            assert_eq!(m.rank(), m.rows());
            assert_eq!(m.rows(), m.cols());
        }
        // chain a second homotopy starting at h′
        let mut r = rng(seed + 1000);
        let c2 = random::random_element_in(a.space(), &[1], &mut r);
        if let Ok(h3) = homotopy_endpoint(&tw2, &c2, 20) {
            let tw3 = is_twisting_element(&a, &h3, None).unwrap();
            let hom2 = TwistHomotopy::new(tw2.clone(), tw3, c2).unwrap();
            let c3 = check_psi_composition(&hom, &hom2).unwrap();
            assert!(psi(&c3).is_ok());
        }
        done += 1;
    }
    assert!(done >= 5, "only {done} non-trivial homotopies");
}

#[test]
fn homotopy_witness_is_validated() {
    let (tw, c, h2) = (0..20).find_map(moving_homotopy).unwrap();
    let a = tw.algebra().clone();
    let even = random::random_even(a.space(), &mut rng(0));
    assert!(matches!(TwistHomotopy::new(tw.clone(), tw.clone(), even), Err(Error::WitnessInvalid(_))));
    let tw2 = is_twisting_element(&a, &h2, None).unwrap();
    assert!(TwistHomotopy::new(tw.clone(), tw2.clone(), c.clone()).is_ok());
    assert!(matches!(TwistHomotopy::new(tw.clone(), tw.clone(), c.clone()), Err(Error::WitnessInvalid(_))));
    assert!(TwistHomotopy::new(tw, tw2, c.scale(&Field::Q.from_i64(2))).is_err());
}

/// Composable strict morphisms `A → B → C` and a twisting element of `A`.
fn chain(seed: u64) -> (AInfMorphism, AInfMorphism, TwistingElement) {
    let mut r = rng(seed);
    let unital = r.gen_bool(0.5);
    let ce = CeData::random(Field::Q, &mut r, 3, 1, unital);
    let (mid, f) = random::random_strict_morphism(&ce, &mut r, 3).unwrap();
    let (_, g) = random::random_strict_morphism(&mid, &mut r, 3).unwrap();
    let a = f.source().clone();
    let h = random::random_closed(&a, &[2], &mut r).unwrap();
    let tw = is_twisting_element(&a, &h, None).unwrap();
    (f, g, tw)
}

#[test]
fn induced_maps_are_functorial() {
    for seed in 0..5 {
        let (f, g, tw) = chain(seed);
        // g was built on a target equal to f's but not the same allocation
        let g = AInfMorphism::new(f.target().clone(), g.target().clone(), g.comps().to_vec()).unwrap();
        check_functoriality(&f, &g, &tw).unwrap();
        let im = induced_map(&f, &tw).unwrap();
        let src = twisted_cohomology(&tw).unwrap();
        let tgt = twisted_cohomology(&im.image).unwrap();
        let on = on_cohomology(&im.matrix, &src, &tgt).unwrap();
        assert_eq!(on[0].cols(), src.dims()[0]);
    }
}

#[test]
fn morphisms_carry_homotopies_and_homotopies_act() {
    let mut r = rng(33);
    for _ in 0..4 {
        let ce = CeData::random(Field::Q, &mut r, 3, 1, true);
        let (_, f) = random::random_strict_morphism(&ce, &mut r, 3).unwrap();
        let a = f.source().clone();
        let h = random::random_closed(&a, &[2], &mut r).unwrap();
        let tw = is_twisting_element(&a, &h, None).unwrap();
        let c = random::random_element_in(a.space(), &[1], &mut r);
        if let Ok(h2) = homotopy_endpoint(&tw, &c, 20) {
            let tw2 = is_twisting_element(&a, &h2, None).unwrap();
            let hom = TwistHomotopy::new(tw.clone(), tw2, c).unwrap();
            morphism_on_twist_homotopy(&f, &hom).unwrap();
        }
        let h1 = random::random_degree_minus_one(a.space(), f.target().space(), &mut r);
        let (_, ahom) = random::homotopic_morphism(&f, h1, 4).unwrap();
        morphism_homotopy_action(&ahom, &tw).unwrap();
    }
}
