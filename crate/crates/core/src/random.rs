//! Seeded random inputs for property tests and benches: Chevalley–Eilenberg
//! DGAs of 2-step nilpotent Lie algebras, strict morphisms between them,
//! homotopic morphisms, random (twisting) elements and abstract filtered
//! complexes.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ainfty::{AInfHomotopy, AInfMorphism, AInfinity, homotopy_residual};
use crate::doc::AlgebraDocument;
use crate::error::Result;
use crate::exactla::{kernel_basis, Matrix};
use crate::field::{Field, Scalar};
use crate::fixtures::{exterior_dga, loaded, monomials, wedge_sign, DgaBuilder};
use crate::graded::{Element, GradedSpace, MultiMap};
use crate::spectral::FilteredComplex;
use crate::twist::{is_twisting_element, TwistingElement};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A scalar drawn from `-2..=2`.
pub fn small_scalar(field: Field, rng: &mut impl Rng) -> Scalar {
    field.from_i64(rng.gen_range(-2..=2))
}

/// `Λ(x_1..x_a, y_1..y_c)` with all generators of degree 1, `d x_i = 0` and
/// `d y_j` a random combination of the `x_i x_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CeData {
    pub field: Field,
    pub base: usize,
    /// `dy[j]` lists `(i, k, coefficient)` with `i < k < base`.
    pub dy: Vec<Vec<(usize, usize, i64)>>,
    pub unital: bool,
}

impl CeData {
    pub fn random(field: Field, rng: &mut impl Rng, base: usize, central: usize, unital: bool) -> CeData {
        let pairs: Vec<(usize, usize)> = (0..base).flat_map(|i| (i + 1..base).map(move |k| (i, k))).collect();
        let dy = (0..central)
            .map(|_| {
                pairs
                    .iter()
                    .filter_map(|&(i, k)| {
                        let c = rng.gen_range(-2..=2);
                        (c != 0).then_some((i, k, c))
                    })
                    .collect()
            })
            .collect();
        CeData { field, base, dy, unital }
    }

    pub fn generators(&self) -> usize {
        self.base + self.dy.len()
    }

    fn names(&self) -> Vec<String> {
        (0..self.base).map(|i| format!("x{}", i + 1)).chain((0..self.dy.len()).map(|j| format!("y{}", j + 1))).collect()
    }

    pub fn builder(&self) -> DgaBuilder {
        let names = self.names();
        let gens: Vec<(&str, i64)> = names.iter().map(|n| (n.as_str(), 1)).collect();
        let mut dgen: Vec<Vec<(u32, i64)>> = vec![Vec::new(); self.base];
        for d in &self.dy {
            dgen.push(d.iter().map(|&(i, k, c)| ((1u32 << i) | (1u32 << k), c)).collect());
        }
        exterior_dga(self.field, &gens, &dgen, self.unital).expect("generators are odd")
    }

    pub fn document(&self) -> AlgebraDocument {
        self.builder().document()
    }

    pub fn algebra(&self) -> Arc<AInfinity> {
        loaded(&self.document()).algebra
    }

    /// Basis name of a monomial mask.
    fn monomial_name(&self, m: u32) -> String {
        if m == 0 {
            return "1".into();
        }
        let names = self.names();
        (0..self.generators()).filter(|k| m >> k & 1 == 1).map(|k| names[k].clone()).collect()
    }
}

/// Elements of an exterior algebra as `mask ↦ coefficient`.
type Ext = BTreeMap<u32, Scalar>;

fn ext_mul(field: Field, a: &Ext, b: &Ext) -> Ext {
    let mut out: Ext = BTreeMap::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some(odd) = wedge_sign(*ma, *mb) {
                let c = (ca * cb).signed(odd);
                let slot = out.entry(ma | mb).or_insert_with(|| field.zero());
                *slot = &*slot + &c;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// A strict morphism `A → B` induced by a random linear map on the `x`
/// generators. `B` has `target_base` generators `x′` and one `y′_j` per
/// `y_j` with `d y′_j = f(d y_j)`; `f(y_j) = y′_j + ` a random combination
/// of the `x′`.
pub fn random_strict_morphism(src: &CeData, rng: &mut impl Rng, target_base: usize) -> Result<(CeData, AInfMorphism)> {
    let field = src.field;
    let lin: Vec<Vec<i64>> = (0..src.base).map(|_| (0..target_base).map(|_| rng.gen_range(-2..=2)).collect()).collect();
    let image_of_x = |i: usize| -> Ext {
        (0..target_base).filter(|&k| lin[i][k] != 0).map(|k| (1u32 << k, field.from_i64(lin[i][k]))).collect()
    };
    // (Σ L_ia x′_a)(Σ L_kb x′_b) has coefficient L_ia L_kb - L_ib L_ka on x′_a x′_b, a < b
    let mut tgt_dy = Vec::new();
    for d in &src.dy {
        let mut terms = Vec::new();
        for a in 0..target_base {
            for b in a + 1..target_base {
                let c: i64 = d.iter().map(|&(i, k, c)| c * (lin[i][a] * lin[k][b] - lin[i][b] * lin[k][a])).sum();
                if c != 0 {
                    terms.push((a, b, c));
                }
            }
        }
        tgt_dy.push(terms);
    }
    let tgt = CeData { field, base: target_base, dy: tgt_dy, unital: src.unital };
    let central = src.dy.len();
    let mut gen_images: Vec<Ext> = (0..src.base).map(image_of_x).collect();
    for j in 0..central {
        let mut e: Ext = (0..target_base)
            .filter_map(|k| {
                let c = rng.gen_range(-1..=1);
                (c != 0).then(|| (1u32 << k, field.from_i64(c)))
            })
            .collect();
        e.insert(1u32 << (target_base + j), field.one());
        gen_images.push(e);
    }
    let a = src.algebra();
    let b = tgt.algebra();
    let (sa, sb) = (a.space().clone(), b.space().clone());
    let mut f1 = MultiMap::new(sa.clone(), sb.clone(), 1, 0);
    for m in monomials(src.generators(), src.unital) {
        let mut img: Ext = [(0u32, field.one())].into_iter().collect();
        for (g, gi) in gen_images.iter().enumerate() {
            if m >> g & 1 == 1 {
                img = ext_mul(field, &img, gi);
            }
        }
        let mut v = Element::zero();
        for (mask, c) in img {
            if mask == 0 && !tgt.unital {
                continue;
            }
            let idx = sb.index_of(&tgt.monomial_name(mask)).expect("monomial present in target");
            v.add_term(idx, &c);
        }
        let i = sa.index_of(&src.monomial_name(m)).expect("monomial present in source");
        f1.insert(vec![i], v)?;
    }
    Ok((tgt, AInfMorphism::strict(a, b, f1)?))
}

/// A random linear map of degree `-1` between two spaces.
pub fn random_degree_minus_one(src: &Arc<GradedSpace>, tgt: &Arc<GradedSpace>, rng: &mut impl Rng) -> MultiMap {
    let mut h = MultiMap::new(src.clone(), tgt.clone(), 1, -1);
    for j in 0..src.dim() {
        let targets = tgt.basis_in_degree(src.degree(j) - 1);
        let mut v = Element::zero();
        for k in targets {
            v.add_term(k, &small_scalar(src.field(), rng));
        }
        h.insert(vec![j], v).expect("degree -1 by construction");
    }
    h
}

/// The morphism `g` at the other end of the homotopy `{h_1, 0, 0, …}`
/// starting at `f`, up to arity `n_max`, with the homotopy itself.
pub fn homotopic_morphism(f: &AInfMorphism, h1: MultiMap, n_max: usize) -> Result<(AInfMorphism, AInfHomotopy)> {
    let (sa, sb) = (f.source().space().clone(), f.target().space().clone());
    let mut g_comps: Vec<MultiMap> = Vec::new();
    for n in 1..=n_max {
        let mut trial = g_comps.clone();
        trial.push(MultiMap::new(sa.clone(), sb.clone(), n, 0));
        let g = AInfMorphism::new(f.source().clone(), f.target().clone(), trial)?;
        let hom = AInfHomotopy::new(f.clone(), g, vec![h1.clone()])?;
        // with g_n = 0 the residual is -(g_n − f_n − Σ …), so g_n = -residual
        let res = homotopy_residual(&hom, n);
        let mut gn = MultiMap::new(sa.clone(), sb.clone(), n, 0);
        for (k, v) in res.entries() {
            gn.insert(k.clone(), v.neg())?;
        }
        g_comps.push(gn);
    }
    let g = AInfMorphism::new(f.source().clone(), f.target().clone(), g_comps)?;
    let hom = AInfHomotopy::new(f.clone(), g.clone(), vec![h1])?;
    Ok((g, hom))
}

/// Random element with components in the given degrees.
pub fn random_element_in(space: &GradedSpace, degrees: &[i64], rng: &mut impl Rng) -> Element {
    let mut e = Element::zero();
    for &d in degrees {
        for i in space.basis_in_degree(d) {
            e.add_term(i, &small_scalar(space.field(), rng));
        }
    }
    e
}

/// Random even element (any degree), usually not twisting.
pub fn random_even(space: &GradedSpace, rng: &mut impl Rng) -> Element {
    let degrees: Vec<i64> = space.degrees_present().into_iter().filter(|d| d.rem_euclid(2) == 0).collect();
    random_element_in(space, &degrees, rng)
}

/// Random `b_1`-closed element with components in the given degrees.
pub fn random_closed(a: &AInfinity, degrees: &[i64], rng: &mut impl Rng) -> Result<Element> {
    let sp = a.space();
    let mut e = Element::zero();
    for &d in degrees {
        let block = a.differential_block(d);
        let idx = sp.basis_in_degree(d);
        for v in kernel_basis(&block)? {
            let c = small_scalar(sp.field(), rng);
            for (k, x) in v {
                e.add_term(idx[k], &(&x * &c));
            }
        }
    }
    Ok(e)
}

/// A random CE DGA with a twisting element of positive degree whose
/// components lie in degrees 2 and 4. Retries until `h` is nonzero and
/// twisting.
pub fn random_twisted(field: Field, seed: u64) -> Result<(CeData, TwistingElement)> {
    let mut rng = rng(seed);
    loop {
        let base = rng.gen_range(3..=4);
        let central = rng.gen_range(1..=2);
        let unital = rng.gen_bool(0.5);
        let ce = CeData::random(field, &mut rng, base, central, unital);
        let a = ce.algebra();
        let h = random_closed(&a, &[2, 4], &mut rng)?;
        if h.is_zero() {
            continue;
        }
        if let Ok(tw) = is_twisting_element(&a, &h, None) {
            return Ok((ce, tw));
        }
    }
}

/// A random filtered complex `P d_0 P^{-1}`: `d_0` pairs disjoint basis
/// vectors of opposite parity without lowering weights and `P = 1 + N`
/// with `N` strictly raising weights.
pub fn random_filtered_complex(field: Field, rng: &mut impl Rng, dim: usize, max_weight: i64) -> FilteredComplex {
    let weights: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..=max_weight)).collect();
    let odd: Vec<bool> = (0..dim).map(|_| rng.gen_bool(0.5)).collect();
    let mut order: Vec<usize> = (0..dim).collect();
    order.shuffle(rng);
    let mut used = vec![false; dim];
    let mut d0 = Matrix::zero(field, dim, dim);
    for &j in &order {
        if used[j] {
            continue;
        }
        let cands: Vec<usize> =
            (0..dim).filter(|&i| !used[i] && i != j && odd[i] != odd[j] && weights[i] >= weights[j]).collect();
        if let Some(&i) = cands.choose(rng) {
            if rng.gen_bool(0.7) {
                used[i] = true;
                used[j] = true;
                d0.set(i, j, field.one());
            }
        }
    }
    let mut n = Matrix::zero(field, dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            if weights[i] > weights[j] && odd[i] == odd[j] {
                n.set(i, j, small_scalar(field, rng));
            }
        }
    }
    // N is nilpotent: N^k = 0 once k exceeds the number of weights
    let id = Matrix::identity(field, dim);
    let p = id.add(&n);
    let mut p_inv = id.clone();
    let mut term = id;
    for _ in 0..=max_weight {
        term = term.mul(&n).scale(&field.one().signed(true));
        p_inv = p_inv.add(&term);
    }
    let d = p.mul(&d0).mul(&p_inv);
    let names = (0..dim).map(|i| format!("e{i}")).collect();
    FilteredComplex::new(field, names, weights, odd, d).expect("conjugate of a filtered square-zero map")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ainfty::{check_algebra, check_morphism};

    #[test]
    fn random_ce_is_a_dga() {
        let mut r = rng(1);
        for _ in 0..3 {
            let ce = CeData::random(Field::Fp(7), &mut r, 3, 2, false);
            assert!(check_algebra(&ce.algebra(), Some(3)).pass());
        }
    }

    #[test]
    fn random_strict_morphism_commutes() {
        let mut r = rng(2);
        let ce = CeData::random(Field::Q, &mut r, 3, 1, true);
        let (_, f) = random_strict_morphism(&ce, &mut r, 3).unwrap();
        assert!(check_morphism(&f, 3).pass());
    }
}
