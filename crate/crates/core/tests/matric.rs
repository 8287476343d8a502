//! Matric operations against entrywise sums written out by hand, and the
//! lifts of structures, morphisms and homotopies to matrices.

use ainfty_core::ainfty::{check_algebra, check_homotopy, check_morphism, AInfinity};
use ainfty_core::fixtures::{self, loaded};
use ainfty_core::graded::Element;
use ainfty_core::matric::*;
use ainfty_core::par::Exec;
use ainfty_core::random::{self, rng, CeData};
use ainfty_core::transfer::transfer_canonical;
use ainfty_core::{Error, Field};
use proptest::prelude::*;
use rand::Rng;

fn random_strict(a: &AInfinity, m: usize, r: &mut impl Rng) -> MatricElement {
    let mut x = MatricElement::square(m);
    for i in 0..m {
        for j in i + 1..m {
            if r.gen_bool(0.7) {
                let degs = a.space().degrees_present();
                let d = degs[r.gen_range(0..degs.len())];
                x.set(i, j, random::random_element_in(a.space(), &[d], r));
            }
        }
    }
    x
}

/// `Σ_{n≥1} b_n` over every chain `i = k_0 < k_1 < … < k_n = j`.
fn curvature_oracle(a: &AInfinity, x: &MatricElement, i: usize, j: usize) -> Element {
    fn chains(i: usize, j: usize) -> Vec<Vec<usize>> {
        if i == j {
            return vec![vec![j]];
        }
        let mut out = Vec::new();
        for k in i + 1..=j {
            for mut rest in chains(k, j) {
                rest.insert(0, i);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Element::zero();
    for c in chains(i, j) {
        let args: Vec<Element> = c.windows(2).map(|w| x.get(w[0], w[1])).collect();
        if args.len() <= a.ops().len() {
            let refs: Vec<&Element> = args.iter().collect();
            out.add_assign(&a.eval(&refs));
        }
    }
    out
}

#[test]
fn curvature_matches_chain_sums() {
    let mut r = rng(5);
    for doc in [fixtures::heis_tr(Field::Q), fixtures::heis(Field::Q), fixtures::s3u(Field::Q)] {
        let a = loaded(&doc).algebra;
        for _ in 0..10 {
            let x = random_strict(&a, 4, &mut r);
            let c = curvature(a.ops(), &x).unwrap();
            for i in 0..4 {
                for j in i + 1..4 {
                    assert_eq!(c.get(i, j), curvature_oracle(&a, &x, i, j), "entry ({i},{j})");
                }
            }
            assert!(c.is_strict_upper());
        }
    }
}

#[test]
fn binary_matric_operation_is_the_entrywise_product_sum() {
    let a = loaded(&fixtures::heis(Field::Q)).algebra;
    let mut r = rng(6);
    for _ in 0..10 {
        let (x, y) = (random_strict(&a, 3, &mut r), random_strict(&a, 3, &mut r));
        let got = matric_eval(&a.ops()[1], &[&x, &y]).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut want = Element::zero();
                for k in 0..3 {
                    want.add_assign(&a.eval(&[&x.get(i, k), &y.get(k, j)]));
                }
                assert_eq!(got.get(i, j), want);
            }
        }
    }
}

#[test]
fn rectangular_shapes_are_checked() {
    let a = loaded(&fixtures::heis(Field::Q)).algebra;
    let x = MatricElement::square(3);
    let col = MatricElement::zero(2, 1);
    assert!(matches!(matric_eval(&a.ops()[1], &[&x, &col]), Err(Error::SizeMismatch(_))));
}

#[test]
fn lifted_structures_are_ainfty() {
    for (doc, n) in [(fixtures::heis_tr(Field::Fp(7)), 4), (fixtures::heis(Field::Q), 3)] {
        let a = loaded(&doc).algebra;
        for (m, strict) in [(1, false), (2, false), (3, true)] {
            let (_, lifted) = lift_algebra(&a, m, strict).unwrap();
            assert!(check_algebra(&lifted, Some(n)).pass(), "m = {m}");
        }
    }
}

#[test]
fn size_one_lift_is_the_algebra() {
    let a = loaded(&fixtures::heis_tr(Field::Q)).algebra;
    let (_, lifted) = lift_algebra(&a, 1, false).unwrap();
    for (x, y) in a.ops().iter().zip(lifted.ops()) {
        assert_eq!(x.entries(), y.entries());
    }
}

#[test]
fn lifted_morphisms_and_homotopies() {
    let a = loaded(&fixtures::heis(Field::Fp(7))).algebra;
    let (_, t) = transfer_canonical(&a, 3, Exec::Serial).unwrap();
    let src = lift_algebra(&t.algebra, 3, true).unwrap();
    let tgt = lift_algebra(&a, 3, true).unwrap();
    let q = lift_morphism(&t.q, &src, &tgt).unwrap();
    assert!(check_morphism(&q, 3).pass());

    let mut r = rng(8);
    let ce = CeData::random(Field::Q, &mut r, 3, 1, false);
    let (_, f) = random::random_strict_morphism(&ce, &mut r, 3).unwrap();
    let h1 = random::random_degree_minus_one(f.source().space(), f.target().space(), &mut r);
    let (_, hom) = random::homotopic_morphism(&f, h1, 3).unwrap();
    let src = lift_algebra(f.source(), 2, true).unwrap();
    let tgt = lift_algebra(f.target(), 2, true).unwrap();
    let lh = lift_homotopy(&hom, &src, &tgt).unwrap();
    assert!(check_homotopy(&lh, 3).pass());
}

#[test]
fn strict_space_rejects_lower_entries() {
    let a = loaded(&fixtures::heis(Field::Q)).algebra;
    let ms = MatricSpace::new(a.space().clone(), 3, true).unwrap();
    assert_eq!(ms.space().dim(), 3 * a.space().dim());
    let mut x = MatricElement::square(3);
    x.set(2, 1, Element::basis(Field::Q, 0));
    assert!(matches!(ms.to_element(&x), Err(Error::Input(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn matric_space_round_trip(seed in 0u64..1_000_000, m in 1usize..5) {
        let a = loaded(&fixtures::heis(Field::Q)).algebra;
        let mut r = rng(seed);
        let x = random_strict(&a, m, &mut r);
        let ms = MatricSpace::new(a.space().clone(), m, true).unwrap();
        let e = ms.to_element(&x).unwrap();
        prop_assert_eq!(ms.from_element(&e), x);
    }

    /// `∂_ã ã` for `ã = (a x; 0 0)` splits into `∂_a a` and `∂_a x`.
    #[test]
    fn column_action_block_identity(seed in 0u64..1_000_000) {
        let a = loaded(&fixtures::heis_tr(Field::Fp(7))).algebra;
        let mut r = rng(seed);
        let x = random_strict(&a, 3, &mut r);
        let col = MatricElement::column((0..3).map(|_| random::random_element_in(a.space(), &[0, 1], &mut r)).collect());
        check_block_identity(a.ops(), &x, &col).unwrap();
    }
}
