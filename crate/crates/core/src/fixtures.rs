//! Reference algebras used by tests, benches and the CLI.
//!
//! Apart from the transferred [`heis_tr`], all are graded-commutative DGAs
//! given in classical grading and loaded through the importer, so each of
//! them is also C∞.

use std::sync::Arc;

use crate::doc::{emit_op, load, AlgebraDocument, BasisDoc, Convention, FieldSpec, Loaded};
use crate::error::Result;
use crate::field::Field;
use crate::graded::{Element, GradedSpace, GradingMode, MultiMap};

/// Classical DGA under construction: basis, differential and product table.
#[derive(Clone, Debug)]
pub struct DgaBuilder {
    space: Arc<GradedSpace>,
    d: MultiMap,
    mul: MultiMap,
}

impl DgaBuilder {
    pub fn new(field: Field, basis: &[(String, i64)]) -> Result<DgaBuilder> {
        let space = Arc::new(GradedSpace::new(field, GradingMode::Z, basis.to_vec())?);
        Ok(DgaBuilder {
            d: MultiMap::new(space.clone(), space.clone(), 1, 1),
            mul: MultiMap::new(space.clone(), space.clone(), 2, 0),
            space,
        })
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    fn elem(&self, terms: &[(&str, i64)]) -> Element {
        let mut e = Element::zero();
        for (n, c) in terms {
            let i = self.space.index_of(n).unwrap_or_else(|| panic!("unknown basis name {n}"));
            e.add_term(i, &self.space.field().from_i64(*c));
        }
        e
    }

    pub fn set_d(&mut self, x: &str, value: &[(&str, i64)]) -> Result<()> {
        let i = self.space.index_of(x).unwrap_or_else(|| panic!("unknown basis name {x}"));
        let v = self.elem(value);
        self.d.insert(vec![i], v)
    }

    pub fn set_mul(&mut self, x: &str, y: &str, value: &[(&str, i64)]) -> Result<()> {
        let i = self.space.index_of(x).unwrap_or_else(|| panic!("unknown basis name {x}"));
        let j = self.space.index_of(y).unwrap_or_else(|| panic!("unknown basis name {y}"));
        let v = self.elem(value);
        self.mul.insert(vec![i, j], v)
    }

    pub fn set_d_elem(&mut self, i: usize, v: Element) -> Result<()> {
        self.d.insert(vec![i], v)
    }

    pub fn set_mul_elem(&mut self, i: usize, j: usize, v: Element) -> Result<()> {
        self.mul.insert(vec![i, j], v)
    }

    /// Document in the `dga` convention, in canonical form.
    pub fn document(&self) -> AlgebraDocument {
        let sp = &self.space;
        let ops = [&self.d, &self.mul].into_iter().filter(|m| !m.is_zero()).map(emit_op).collect();
        AlgebraDocument {
            field: FieldSpec::of(sp.field()),
            grading: GradingMode::Z,
            convention: Convention::Dga,
            dga: false,
            basis: (0..sp.dim()).map(|i| BasisDoc { name: sp.name(i).to_string(), degree: sp.degree(i) }).collect(),
            ops,
            elements: Vec::new(),
            morphism: None,
            homotopy: None,
        }
    }
}

/// Monomials of a free graded-commutative algebra on odd generators, as
/// bitmasks ordered by length and then lexicographically.
pub(crate) fn monomials(n: usize, unital: bool) -> Vec<u32> {
    let mut ms: Vec<u32> = (0..(1u32 << n)).filter(|&m| unital || m != 0).collect();
    ms.sort_by_key(|&m| {
        let idx: Vec<u32> = (0..n as u32).filter(|k| m >> k & 1 == 1).collect();
        (m.count_ones(), idx)
    });
    ms
}

/// Sign of `m1 · m2` for odd generators, `None` if they share a generator.
pub(crate) fn wedge_sign(m1: u32, m2: u32) -> Option<bool> {
    if m1 & m2 != 0 {
        return None;
    }
    let mut odd = false;
    for j in 0..32 {
        if m2 >> j & 1 == 1 {
            // generators of m1 with larger index jump over g_j
            if (m1 >> (j + 1)).count_ones() % 2 == 1 {
                odd = !odd;
            }
        }
    }
    Some(odd)
}

/// Exterior algebra `Λ(g_1..g_n)` on odd-degree generators with a
/// differential given on generators and extended by the Leibniz rule.
///
/// `dgen[k]` lists `(monomial mask, coefficient)` pairs. Monomial names
/// concatenate generator names; the empty monomial is named `1`.
pub fn exterior_dga(
    field: Field,
    gens: &[(&str, i64)],
    dgen: &[Vec<(u32, i64)>],
    unital: bool,
) -> Result<DgaBuilder> {
    let n = gens.len();
    assert!(gens.iter().all(|(_, d)| d.rem_euclid(2) == 1), "generators must be odd");
    let ms = monomials(n, unital);
    let name = |m: u32| -> String {
        if m == 0 {
            "1".to_string()
        } else {
            (0..n).filter(|k| m >> k & 1 == 1).map(|k| gens[k].0).collect()
        }
    };
    let degree = |m: u32| -> i64 { (0..n).filter(|k| m >> k & 1 == 1).map(|k| gens[k].1).sum() };
    let basis: Vec<(String, i64)> = ms.iter().map(|&m| (name(m), degree(m))).collect();
    let pos = |m: u32| ms.iter().position(|&x| x == m);
    let mut b = DgaBuilder::new(field, &basis)?;
    for (i, &m1) in ms.iter().enumerate() {
        for (j, &m2) in ms.iter().enumerate() {
            if let Some(odd) = wedge_sign(m1, m2) {
                if let Some(k) = pos(m1 | m2) {
                    b.set_mul_elem(i, j, Element::basis(field, k).scale(&field.one().signed(odd)))?;
                }
            }
        }
    }
    // d(g_{i1} ... g_{ik}) = Σ_j (-1)^{j-1} g_{i1} .. d(g_{ij}) .. g_{ik}
    for (i, &m) in ms.iter().enumerate() {
        let mut v = Element::zero();
        let idx: Vec<usize> = (0..n).filter(|k| m >> k & 1 == 1).collect();
        for (j, &g) in idx.iter().enumerate() {
            let before: u32 = idx[..j].iter().map(|k| 1u32 << k).sum();
            let after: u32 = idx[j + 1..].iter().map(|k| 1u32 << k).sum();
            for &(dm, c) in &dgen[g] {
                let Some(s1) = wedge_sign(before, dm) else { continue };
                let Some(s2) = wedge_sign(before | dm, after) else { continue };
                if let Some(k) = pos(before | dm | after) {
                    let odd = (j % 2 == 1) ^ s1 ^ s2;
                    v.add_term(k, &field.from_i64(c).signed(odd));
                }
            }
        }
        b.set_d_elem(i, v)?;
    }
    Ok(b)
}

/// `Λ(x1, x2, y)` without unit, `dy = x1 x2`, all generators of degree 1.
pub fn heis_builder(field: Field) -> DgaBuilder {
    exterior_dga(field, &[("x1", 1), ("x2", 1), ("y", 1)], &[vec![], vec![], vec![(0b011, 1)]], false)
        .expect("fixture is well formed")
}

pub fn heis(field: Field) -> AlgebraDocument {
    heis_builder(field).document()
}

/// `Λ(x1, x2, y)` with unit, `dy = x1 x2`. The unit has degree `-1` after
/// the shift, so defining systems of degree-0 classes admit nonzero
/// homotopies.
pub fn heis_unital(field: Field) -> AlgebraDocument {
    exterior_dga(field, &[("x1", 1), ("x2", 1), ("y", 1)], &[vec![], vec![], vec![(0b011, 1)]], true)
        .expect("fixture is well formed")
        .document()
}

/// Unital `Λ(u)` with `u` of degree 3 and zero differential.
pub fn s3u(field: Field) -> AlgebraDocument {
    exterior_dga(field, &[("u", 3)], &[vec![]], true).expect("fixture is well formed").document()
}

/// The zero algebra on the zero space.
pub fn zero(field: Field) -> AlgebraDocument {
    AlgebraDocument {
        field: FieldSpec::of(field),
        grading: GradingMode::Z,
        convention: Convention::Ainfty,
        dga: true,
        basis: Vec::new(),
        ops: Vec::new(),
        elements: Vec::new(),
        morphism: None,
        homotopy: None,
    }
}

/// The Heisenberg algebra extended by a closed generator `z` of degree 3,
/// `w = z x1`, a primitive `v` of `w` and the product `zv`. Every product
/// involving `z, w, v, zv` other than `z x1 = -x1 z = w` and
/// `z v = -v z = zv` is zero.
///
/// Twisting by `z`: `x1` has `d_3[x1] = [w] = 0` and survives to a nonzero
/// `d_5[x1] = ±[zv]`.
pub fn heis_z(field: Field) -> AlgebraDocument {
    let h = heis_builder(field);
    let mut basis: Vec<(String, i64)> =
        (0..h.space().dim()).map(|i| (h.space().name(i).to_string(), h.space().degree(i))).collect();
    basis.extend([("z".to_string(), 3), ("w".to_string(), 4), ("v".to_string(), 3), ("zv".to_string(), 6)]);
    let mut b = DgaBuilder::new(field, &basis).expect("fixture is well formed");
    for (k, v) in h.d.entries() {
        b.set_d_elem(k[0], v.clone()).expect("same indices");
    }
    for (k, v) in h.mul.entries() {
        b.set_mul_elem(k[0], k[1], v.clone()).expect("same indices");
    }
    b.set_d("v", &[("w", 1)]).expect("degrees match");
    b.set_mul("z", "x1", &[("w", 1)]).expect("degrees match");
    b.set_mul("x1", "z", &[("w", -1)]).expect("degrees match");
    b.set_mul("z", "v", &[("zv", 1)]).expect("degrees match");
    b.set_mul("v", "z", &[("zv", -1)]).expect("degrees match");
    let mut doc = b.document();
    doc.elements.push(crate::doc::NamedElementDoc {
        name: "h".into(),
        value: vec![crate::doc::TermDoc { basis: "z".into(), coeff: field.one().to_coeff_string() }],
    });
    doc
}

/// Arity up to which [`heis_tr`] is transferred.
pub const HEIS_TR_ARITY: usize = 4;

/// Cohomology of [`heis`] with the transferred operations up to
/// [`HEIS_TR_ARITY`], carrying the quasi-isomorphism `q` into [`heis`] as
/// its morphism section.
pub fn heis_tr(field: Field) -> AlgebraDocument {
    let l = loaded(&heis(field));
    let (_, t) = crate::transfer::transfer_canonical(&l.algebra, HEIS_TR_ARITY, crate::par::Exec::Serial)
        .expect("HEIS has a contraction");
    let out = Loaded {
        algebra: t.algebra.clone(),
        convention: Convention::Ainfty,
        signs: None,
        elements: Vec::new(),
        morphism: Some(t.q),
        homotopy: None,
    };
    crate::doc::emit(&out)
}

/// Loads a fixture document, panicking on failure.
pub fn loaded(doc: &AlgebraDocument) -> Loaded {
    load(doc).expect("fixture loads")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heis_basis_order() {
        let d = heis(Field::Q);
        let names: Vec<&str> = d.basis.iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["x1", "x2", "y", "x1x2", "x1y", "x2y", "x1x2y"]);
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge_sign(0b01, 0b10), Some(false));
        assert_eq!(wedge_sign(0b10, 0b01), Some(true));
        assert_eq!(wedge_sign(0b11, 0b01), None);
        assert_eq!(wedge_sign(0b100, 0b011), Some(false));
    }
}
