//! Brute-force triple Massey products over a small prime field.
//!
//! Everything here uses only `b_1`, `b_2` of the algebra and dense
//! elimination mod `p`; none of the crate's transfer or search code.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ainfty_core::ainfty::AInfinity;
use ainfty_core::graded::Element;
use ainfty_core::Field;

pub struct Oracle {
    pub p: i64,
    /// Normal forms of `μ` modulo `im b_1`, as dense vectors over the
    /// basis of `A^deg`.
    pub values: BTreeSet<Vec<i64>>,
    /// Number of `(a02, a13)` pairs satisfying the defining equations.
    pub systems: u64,
    /// Number of pairs tried.
    pub tried: u64,
    pub degree: i64,
}

fn to_dense(x: &Element, idx: &[usize], p: i64) -> Vec<i64> {
    let mut v = vec![0; idx.len()];
    for (i, c) in x.iter() {
        let k = idx.iter().position(|j| j == i).expect("element has the expected degree");
        v[k] = c.to_coeff_string().parse::<i64>().unwrap().rem_euclid(p);
    }
    v
}

fn inv(a: i64, p: i64) -> i64 {
    (1..p).find(|b| a * b % p == 1).unwrap()
}

/// Row echelon form of the image of `b_1` in degree `d`, as (pivot, row).
pub fn image_echelon(a: &AInfinity, d: i64, p: i64) -> Vec<(usize, Vec<i64>)> {
    let sp = a.space();
    let idx = sp.basis_in_degree(d);
    let mut rows: Vec<(usize, Vec<i64>)> = Vec::new();
    for j in sp.basis_in_degree(d - 1) {
        let mut v = to_dense(&a.d(&Element::basis(sp.field(), j)), &idx, p);
        reduce(&mut v, &rows, p);
        if let Some(piv) = v.iter().position(|&x| x != 0) {
            let s = inv(v[piv], p);
            v.iter_mut().for_each(|x| *x = *x * s % p);
            rows.push((piv, v));
        }
    }
    rows
}

fn reduce(v: &mut [i64], rows: &[(usize, Vec<i64>)], p: i64) {
    for (piv, r) in rows {
        let f = v[*piv];
        if f != 0 {
            for (x, y) in v.iter_mut().zip(r) {
                *x = (*x - f * y).rem_euclid(p);
            }
        }
    }
}

/// Normal form of a degree-`d` element modulo `im b_1`.
pub fn normal_form(a: &AInfinity, x: &Element, d: i64, p: i64) -> Vec<i64> {
    let idx = a.space().basis_in_degree(d);
    let rows = image_echelon(a, d, p);
    let mut v = to_dense(x, &idx, p);
    reduce(&mut v, &rows, p);
    v
}

/// All elements of `A^d` with coefficients in `0..p`.
fn all_elements(a: &AInfinity, d: i64, p: i64) -> Vec<Element> {
    let field = a.space().field();
    let idx = a.space().basis_in_degree(d);
    let mut out = vec![Element::zero()];
    for &i in &idx {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for e in &out {
            for c in 0..p {
                next.push(e.add(&Element::from_i64(field, &[(i, c)])));
            }
        }
        out = next;
    }
    out
}

/// `⟨x, y, z⟩` for closed `x, y, z` in a DGA over `F_p`: every
/// `a02 ∈ A^{|x|+|y|}`, `a13 ∈ A^{|y|+|z|}` with
/// `b_1(a02) + b_2(x, y) = 0` and `b_1(a13) + b_2(y, z) = 0` gives
/// `μ = b_2(x, a13) + b_2(a02, z)` of degree `|x| + |y| + |z| + 1`.
pub fn triple_massey(a: &AInfinity, x: &Element, y: &Element, z: &Element) -> Oracle {
    let Field::Fp(p) = a.space().field() else { panic!("the oracle enumerates a finite field") };
    let p = p as i64;
    let sp = a.space();
    let deg = |e: &Element| sp.degree(*e.iter().next().expect("nonzero").0);
    let (dx, dy, dz) = (deg(x), deg(y), deg(z));
    let left = all_elements(a, dx + dy, p);
    let right = all_elements(a, dy + dz, p);
    let (bxy, byz) = (a.eval(&[x, y]), a.eval(&[y, z]));
    let good_left: Vec<&Element> = left.iter().filter(|e| a.d(e).add(&bxy).is_zero()).collect();
    let good_right: Vec<&Element> = right.iter().filter(|e| a.d(e).add(&byz).is_zero()).collect();
    // b_2 has degree +1
    let d = dx + dy + dz + 1;
    let (idx, rows) = (sp.basis_in_degree(d), image_echelon(a, d, p));
    let mut values = BTreeSet::new();
    for a02 in &good_left {
        for a13 in &good_right {
            let mu = a.eval(&[x, a13]).add(&a.eval(&[a02, z]));
            assert!(a.d(&mu).is_zero());
            let mut v = to_dense(&mu, &idx, p);
            reduce(&mut v, &rows, p);
            values.insert(v);
        }
    }
    Oracle {
        p,
        values,
        systems: (good_left.len() * good_right.len()) as u64,
        tried: (left.len() * right.len()) as u64,
        degree: d,
    }
}
