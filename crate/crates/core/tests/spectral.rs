//! Spectral sequences of twisted complexes filtered by degree.
//!
//! Page dimensions are checked against the closed formula
//! `E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1})` with
//! `Z_r^p = F^p ∩ d^{-1} F^{p+r}`, evaluated by plain rank computations.

use std::collections::BTreeMap;

use ainfty_core::ainfty::{check_homotopy, check_morphism};
use ainfty_core::exactla::{kernel_basis, Matrix, SparseVec};
use ainfty_core::fixtures::{self, loaded};
use ainfty_core::graded::Element;
use ainfty_core::par::Exec;
use ainfty_core::random::{self, rng, CeData};
use ainfty_core::spectral::*;
use ainfty_core::transfer::TransferData;
use ainfty_core::twist::{is_twisting_element, TwistingElement};
use ainfty_core::{Error, Field};
use proptest::prelude::*;

/// `Z_r^p` restricted to one parity, as vectors in global coordinates.
fn z(fc: &FilteredComplex, p: i64, r: i64, odd: bool) -> Vec<SparseVec> {
    let dom: Vec<usize> = (0..fc.dim()).filter(|&i| fc.is_odd(i) == odd && fc.weight(i) >= p).collect();
    let rows: Vec<usize> = (0..fc.dim()).filter(|&i| fc.weight(i) < p + r).collect();
    let mut m = Matrix::zero(fc.field(), rows.len(), dom.len());
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in dom.iter().enumerate() {
            m.set(a, b, fc.d().get(i, j));
        }
    }
    kernel_basis(&m).unwrap().iter().map(|v| v.iter().map(|(k, c)| (dom[*k], c.clone())).collect()).collect()
}

fn span_dim(fc: &FilteredComplex, vs: &[SparseVec]) -> usize {
    Matrix::from_columns(fc.field(), fc.dim(), vs).rank()
}

fn oracle_dims(fc: &FilteredComplex, r: usize) -> BTreeMap<(i64, u8), usize> {
    let r = r as i64;
    let mut out = BTreeMap::new();
    let Some((lo, hi)) = fc.weight_range() else { return out };
    for p in lo..=hi {
        for odd in [false, true] {
            let zr = z(fc, p, r, odd);
            let mut sub = z(fc, p + 1, r - 1, odd);
            sub.extend(z(fc, p - r + 1, r - 1, !odd).iter().map(|v| fc.d().mul_vec(v)));
            let n = span_dim(fc, &zr) - span_dim(fc, &sub);
            if n > 0 {
                out.insert((p, qbar(p, odd)), n);
            }
        }
    }
    out
}

fn assert_pages_match_oracle(fc: &FilteredComplex) {
    for r in 0..=fc.stable_r() + 1 {
        let pg = page(fc, r).unwrap();
        let got: BTreeMap<_, _> = pg.dims().into_iter().filter(|(_, n)| *n > 0).collect();
        assert_eq!(got, oracle_dims(fc, r), "page {r}");
    }
}

fn twist_named(doc: &ainfty_core::doc::AlgebraDocument, h: &str) -> TwistingElement {
    let l = loaded(doc);
    let x = l.element(h).unwrap_or_else(|| Element::basis(l.algebra.space().field(), l.algebra.space().index_of(h).unwrap()));
    is_twisting_element(&l.algebra, &x, None).unwrap()
}

fn fixture_twists() -> Vec<(&'static str, TwistingElement)> {
    let mut out = Vec::new();
    for f in [Field::Q, Field::Fp(7)] {
        out.push(("s3u", twist_named(&fixtures::s3u(f), "u")));
        out.push(("heis_z", twist_named(&fixtures::heis_z(f), "h")));
        out.push(("heis", twist_named(&fixtures::heis(f), "x1x2y")));
        out.push(("heis_tr", twist_named(&fixtures::heis_tr(f), "[x1x2y]")));
    }
    out
}

#[test]
fn s3u_pages() {
    for f in [Field::Q, Field::Fp(7)] {
        let tw = twist_named(&fixtures::s3u(f), "u");
        let fc = build_filtered(&tw).unwrap();
        assert_pages_match_oracle(&fc);
        let ps = pages(&fc, 5).unwrap();
        // E_1 = E_2 = E_3 = H(A): [1] at weight -1, [u] at weight 2
        for r in 1..=3 {
            assert_eq!(ps[r].total_dims(), [1, 1], "page {r}");
            assert_eq!(ps[r].dim(-1, qbar(-1, true)), 1);
            assert_eq!(ps[r].dim(2, qbar(2, false)), 1);
        }
        // d_3 [1] = [u]
        let sp = tw.algebra().space();
        let one = Element::basis(f, sp.index_of("1").unwrap());
        let d3 = differential(&fc, &ps[3], -1, qbar(-1, true), one.coeffs()).unwrap();
        let u = Element::basis(f, sp.index_of("u").unwrap());
        let target = ps[3].entry(2, qbar(2, false)).unwrap();
        assert_eq!(d3, target.class_of(u.coeffs()).unwrap());
        assert!(ps[4].is_zero() && ps[5].is_zero());
        let e = einfty_check(&fc).unwrap();
        assert!(e.pass);
        assert_eq!(e.einfty_dims, [0, 0]);
    }
}

#[test]
fn fixture_pages_match_the_closed_formula() {
    for (_, tw) in fixture_twists() {
        let fc = build_filtered(&tw).unwrap();
        assert_pages_match_oracle(&fc);
    }
}

#[test]
fn structural_properties_on_fixtures() {
    for (name, tw) in fixture_twists() {
        let fc = build_filtered(&tw).unwrap();
        let ps = pages(&fc, fc.stable_r() + 1).unwrap();
        for w in ps.windows(2) {
            check_next_page(&w[0], &w[1]).unwrap();
        }
        let lemma = check_lemma(tw.algebra(), &fc, &ps).unwrap();
        assert!(lemma.pass(), "{name}: {lemma:?}");
        assert!(einfty_check(&fc).unwrap().pass, "{name}");
        for pg in &ps {
            let s = specialized_page(&tw, pg.r(), Exec::Serial).unwrap();
            compare_pages(&fc, pg, &s).unwrap();
        }
    }
}

#[test]
fn filtration_needs_positive_degree_and_z_grading() {
    let tw = twist_named(&fixtures::s3u(Field::Q), "u");
    let zero = is_twisting_element(tw.algebra(), &Element::zero(), None).unwrap();
    assert!(build_filtered(&zero).is_ok());
    let l = loaded(&fixtures::heis(Field::Q));
    let x1 = Element::basis(Field::Q, l.algebra.space().index_of("x1").unwrap());
    // x1 is even of degree 0 and twisting since x1·x1 = 0
    let tw0 = is_twisting_element(&l.algebra, &x1, None).unwrap();
    assert_eq!(build_filtered(&tw0).unwrap_err(), Error::PositiveDegreeRequired);
}

#[test]
fn heis_z_higher_differentials_match_massey_products() {
    for f in [Field::Q, Field::Fp(7)] {
        let tw = twist_named(&fixtures::heis_z(f), "h");
        let a = tw.algebra().clone();
        let data = TransferData::canonical(&a).unwrap();
        let fc = build_filtered(&tw).unwrap();
        for m in 1..=2 {
            let mut compared = 0;
            let pg = page(&fc, 2 * m + 1).unwrap();
            for (&(p, q), e) in pg.entries() {
                if q != 0 {
                    continue;
                }
                for rep in e.reps() {
                    let x = fc.graded(rep, p);
                    let Ok(w) = witness_for(&tw, m, &Element::from_vec(x)) else { continue };
                    let mc = massey_comparison(&tw, &data, m, &w, None).unwrap();
                    assert!(mc.agree, "m = {m}, p = {p}");
                    compared += 1;
                }
            }
            assert!(compared > 0, "m = {m}");
        }
    }
}

#[test]
fn s3u_third_differential_is_a_binary_product() {
    let tw = twist_named(&fixtures::s3u(Field::Q), "u");
    let a = tw.algebra().clone();
    let data = TransferData::canonical(&a).unwrap();
    let one = Element::basis(Field::Q, a.space().index_of("1").unwrap());
    let w = witness_for(&tw, 1, &one).unwrap();
    let mc = massey_comparison(&tw, &data, 1, &w, None).unwrap();
    assert!(mc.agree);
    assert_eq!(mc.z, Element::basis(Field::Q, a.space().index_of("u").unwrap()));
    assert!(!mc.via_differential.is_empty());
}

#[test]
fn random_filtered_complexes_match_the_closed_formula() {
    let mut r = rng(5);
    for k in 0..20 {
        let field = if k % 2 == 0 { Field::Fp(5) } else { Field::Q };
        let fc = random::random_filtered_complex(field, &mut r, 12, 4);
        assert_pages_match_oracle(&fc);
        let ps = pages(&fc, fc.stable_r() + 1).unwrap();
        for w in ps.windows(2) {
            check_next_page(&w[0], &w[1]).unwrap();
        }
        assert!(einfty_check(&fc).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn random_twisted_generic_equals_specialized(seed in 0u64..1_000_000, prime: bool) {
        let field = if prime { Field::Fp(7) } else { Field::Q };
        let (_, tw) = random::random_twisted(field, seed).unwrap();
        let fc = build_filtered(&tw).unwrap();
        for r in 0..=fc.stable_r() {
            let g = page(&fc, r).unwrap();
            let s = specialized_page(&tw, r, Exec::Parallel).unwrap();
            prop_assert!(compare_pages(&fc, &g, &s).is_ok(), "page {}", r);
        }
        let g = page_with(&fc, 3, Exec::Parallel).unwrap();
        prop_assert_eq!(g.dims(), page(&fc, 3).unwrap().dims());
        prop_assert!(einfty_check(&fc).unwrap().pass);
    }
}

#[test]
fn naturality_for_strict_and_homotopic_morphisms() {
    let mut r = rng(9);
    for k in 0..5 {
        let unital = k % 2 == 0;
        let ce = CeData::random(Field::Q, &mut r, 3, 1, unital);
        let (_, f) = random::random_strict_morphism(&ce, &mut r, 3).unwrap();
        let a = f.source().clone();
        let h = random::random_closed(&a, &[2], &mut r).unwrap();
        let tw = is_twisting_element(&a, &h, None).unwrap();
        let rep_f = spectral_naturality(&f, &tw, 4).unwrap();
        assert!(rep_f.pass());
        let h1 = random::random_degree_minus_one(a.space(), f.target().space(), &mut r);
        let (g, hom) = random::homotopic_morphism(&f, h1, 4).unwrap();
        assert!(check_morphism(&g, 4).pass() && check_homotopy(&hom, 4).pass());
        let rep_g = spectral_naturality(&g, &tw, 4).unwrap();
        assert!(rep_g.pass());
        // homotopic morphisms agree from the second page on
        for p in 2..=4 {
            assert_eq!(rep_f.maps[p], rep_g.maps[p], "page {p}");
        }
    }
}

#[test]
fn quasi_isomorphism_gives_isomorphic_pages_from_e2() {
    let l = loaded(&fixtures::heis_tr(Field::Q));
    let q = l.morphism.unwrap();
    let top = Element::basis(Field::Q, l.algebra.space().index_of("[x1x2y]").unwrap());
    let tw = is_twisting_element(&l.algebra, &top, None).unwrap();
    let rep = spectral_naturality(&q, &tw, 4).unwrap();
    assert!(rep.pass());
    assert!(rep.isomorphism_from(2));
}

#[test]
fn generic_pages_run_the_same_in_parallel() {
    let mut r = rng(12);
    for _ in 0..5 {
        let fc = random::random_filtered_complex(Field::Fp(5), &mut r, 16, 5);
        for k in 0..=fc.stable_r() {
            let (s, p) = (page_with(&fc, k, Exec::Serial).unwrap(), page_with(&fc, k, Exec::Parallel).unwrap());
            assert_eq!(s.dims(), p.dims());
            compare_pages(&fc, &s, &p).unwrap();
        }
    }
}
