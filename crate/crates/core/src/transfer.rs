//! Homotopy transfer of an A∞-structure to cohomology, together with the
//! quasi-isomorphism `q: H(A) → A`.

use std::sync::Arc;

use serde::Serialize;

use crate::ainfty::{compositions, AInfMorphism, AInfinity};
use crate::error::{Error, Result};
use crate::exactla::{echelon_basis, kernel_basis, rref, LinearSolver, Matrix, SparseVec};
use crate::graded::{basis_words, Element, GradedSpace, MultiMap};
use crate::par::{map_slice, Exec};

/// Contraction data `(p1, q1, h1)` with `p1∘q1 = 1`, `b_1∘q1 = 0` and
/// `1 - q1∘p1 = b_1∘h1 + h1∘b_1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferData {
    pub h_space: Arc<GradedSpace>,
    pub p1: MultiMap,
    pub q1: MultiMap,
    pub h1: MultiMap,
}

/// Splitting `A^d = im ⊕ R ⊕ C` used by the canonical contraction.
struct DegreeSplit {
    idx: Vec<usize>,
    im: Vec<SparseVec>,
    reps: Vec<SparseVec>,
    solver: LinearSolver,
}

fn local_to_global(v: &SparseVec, idx: &[usize]) -> Element {
    Element::from_vec(v.iter().map(|(k, x)| (idx[*k], x.clone())).collect())
}

fn split_degree(a: &AInfinity, d: i64) -> Result<DegreeSplit> {
    let sp = a.space();
    let field = sp.field();
    let idx = sp.basis_in_degree(d);
    let n = idx.len();
    let d_out = a.differential_block(d);
    let d_in = a.differential_block(d - 1);
    let ker = kernel_basis(&d_out)?;
    let (im, _) = echelon_basis(field, n, &d_in.columns())?;
    let reps = crate::exactla::subquotient_basis(field, n, &im, &ker)?;
    let (_, pivots) = rref(&d_out)?;
    let mut cols = im.clone();
    cols.extend(reps.iter().cloned());
    cols.extend(pivots.iter().map(|&p| {
        let mut v = SparseVec::new();
        v.insert(p, field.one());
        v
    }));
    debug_assert_eq!(cols.len(), n);
    let solver = LinearSolver::new(&Matrix::from_columns(field, n, &cols))?;
    Ok(DegreeSplit { idx, im, reps, solver })
}

impl TransferData {
    /// Canonical contraction: cohomology representatives from
    /// [`crate::exactla::subquotient_basis`], the complement of `ker b_1`
    /// spanned by pivot coordinates of `b_1`, and `h1` the canonical
    /// preimage on `im b_1`, zero on the representatives and the complement.
    pub fn canonical(a: &AInfinity) -> Result<TransferData> {
        let sp = a.space().clone();
        let field = sp.field();
        let degrees = sp.degrees_present();
        let mut splits = Vec::with_capacity(degrees.len());
        for &d in &degrees {
            splits.push((d, split_degree(a, d)?));
        }
        let mut hbasis = Vec::new();
        for (d, s) in &splits {
            for r in &s.reps {
                let lead = *r.keys().next().expect("representatives are nonzero");
                hbasis.push((format!("[{}]", sp.name(s.idx[lead])), *d));
            }
        }
        let h_space = Arc::new(GradedSpace::new(field, sp.mode(), hbasis)?);
        let mut p1 = MultiMap::new(sp.clone(), h_space.clone(), 1, 0);
        let mut q1 = MultiMap::new(h_space.clone(), sp.clone(), 1, 0);
        let mut h1 = MultiMap::new(sp.clone(), sp.clone(), 1, -1);
        let mut class = 0;
        for (d, s) in &splits {
            let first = class;
            for r in &s.reps {
                q1.insert(vec![class], local_to_global(r, &s.idx))?;
                class += 1;
            }
            let prev_idx = sp.basis_in_degree(d - 1);
            let d_in = LinearSolver::new(&a.differential_block(d - 1))?;
            let (ni, nr) = (s.im.len(), s.reps.len());
            for (j, &g) in s.idx.iter().enumerate() {
                let mut e = SparseVec::new();
                e.insert(j, field.one());
                let coords = s.solver.solve(&e)?;
                let mut p = Element::zero();
                let mut u = SparseVec::new();
                for (k, x) in &coords {
                    if *k < ni {
                        crate::exactla::axpy(&mut u, x, &s.im[*k]);
                    } else if *k < ni + nr {
                        p.add_term(first + k - ni, x);
                    }
                }
                p1.insert(vec![g], p)?;
                if !u.is_empty() {
                    h1.insert(vec![g], local_to_global(&d_in.solve(&u)?, &prev_idx))?;
                }
            }
        }
        let data = TransferData { h_space, p1, q1, h1 };
        data.verify(a)?;
        Ok(data)
    }

    /// Externally supplied contraction, validated against `a`.
    pub fn new(a: &AInfinity, h_space: Arc<GradedSpace>, p1: MultiMap, q1: MultiMap, h1: MultiMap) -> Result<TransferData> {
        let data = TransferData { h_space, p1, q1, h1 };
        data.verify(a)?;
        Ok(data)
    }

    /// Checks the three contraction identities exactly.
    pub fn verify(&self, a: &AInfinity) -> Result<()> {
        let sp = a.space();
        let field = sp.field();
        for c in 0..self.h_space.dim() {
            let x = Element::basis(field, c);
            let qx = self.q1.eval_multilinear(&[&x]);
            if self.p1.eval_multilinear(&[&qx]) != x {
                return Err(Error::CheckFailed(format!("p1 q1 differs from the identity on {}", self.h_space.name(c))));
            }
            if !a.d(&qx).is_zero() {
                return Err(Error::CheckFailed(format!("q1({}) is not closed", self.h_space.name(c))));
            }
        }
        for i in 0..sp.dim() {
            let x = Element::basis(field, i);
            let lhs = x.sub(&self.q1.eval_multilinear(&[&self.p1.eval_multilinear(&[&x])]));
            let rhs = a.d(&self.h(&x)).add(&self.h(&a.d(&x)));
            if lhs != rhs {
                return Err(Error::CheckFailed(format!("contraction identity fails on {}", sp.name(i))));
            }
        }
        Ok(())
    }

    pub fn p(&self, x: &Element) -> Element {
        self.p1.eval_multilinear(&[x])
    }

    pub fn q(&self, x: &Element) -> Element {
        self.q1.eval_multilinear(&[x])
    }

    pub fn h(&self, x: &Element) -> Element {
        self.h1.eval_multilinear(&[x])
    }

    /// Closed representative of a class given by name.
    pub fn representative(&self, class: &str) -> Option<Element> {
        let i = self.h_space.index_of(class)?;
        Some(self.q(&Element::basis(self.h_space.field(), i)))
    }

    /// Class of a closed element as an element of `H(A)`.
    pub fn class_of(&self, x: &Element) -> Element {
        self.p(x)
    }

    /// Whether a closed element is exact.
    pub fn is_exact(&self, x: &Element) -> bool {
        self.p(x).is_zero()
    }
}

/// Which inductive formula to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Recursion {
    /// All arities `r ≥ 2` of the source operations.
    General,
    /// Only `b_2`; valid when the source is a DGA.
    Dga,
}

/// Transferred structure and the quasi-isomorphism.
#[derive(Clone, Debug)]
pub struct Transferred {
    pub algebra: Arc<AInfinity>,
    pub q: AInfMorphism,
    pub recursion: Recursion,
}

/// Runs the inductive transfer up to arity `n_max`:
/// `S_n = Σ_{r≥2} b_r(q_{i_1} ⊗ ... ⊗ q_{i_r})`, `b̄_n = p1 S_n`,
/// `q_n = -h1 S_n`.
///
/// The minus sign makes `q` satisfy the morphism identity given the
/// contraction identity `1 - q1 p1 = b_1 h1 + h1 b_1`.
pub fn transfer(a: &Arc<AInfinity>, data: &TransferData, n_max: usize, recursion: Recursion, exec: Exec) -> Result<Transferred> {
    if n_max < 2 {
        return Err(Error::Input("transfer needs n_max >= 2".into()));
    }
    if recursion == Recursion::Dga && !a.is_dga() {
        return Err(Error::Input("DGA recursion on a structure with higher operations".into()));
    }
    let hs = data.h_space.clone();
    let sp = a.space().clone();
    let mut bbar = vec![MultiMap::new(hs.clone(), hs.clone(), 1, 1)];
    let mut qs = vec![data.q1.clone()];
    for n in 2..=n_max {
        let parts: Vec<Vec<usize>> = compositions(n)
            .into_iter()
            .filter(|p| match recursion {
                Recursion::General => p.len() >= 2,
                Recursion::Dga => p.len() == 2,
            })
            .collect();
        let words = basis_words(hs.dim(), n);
        let values = map_slice(exec, &words, |w| {
            let mut s = Element::zero();
            for p in &parts {
                let Some(b) = a.op(p.len()) else { continue };
                if b.is_zero() {
                    continue;
                }
                let mut pos = 0;
                let mut outs = Vec::with_capacity(p.len());
                for &k in p {
                    outs.push(qs[k - 1].eval_basis(&w[pos..pos + k]));
                    pos += k;
                }
                if outs.iter().any(|e| e.is_zero()) {
                    continue;
                }
                let refs: Vec<&Element> = outs.iter().collect();
                s.add_assign(&b.eval_multilinear(&refs));
            }
            (data.p(&s), data.h(&s).neg())
        });
        let mut bn = MultiMap::new(hs.clone(), hs.clone(), n, 1);
        let mut qn = MultiMap::new(hs.clone(), sp.clone(), n, 0);
        for (w, (pb, qv)) in words.into_iter().zip(values) {
            if !pb.is_zero() {
                bn.insert(w.clone(), pb)?;
            }
            if !qv.is_zero() {
                qn.insert(w, qv)?;
            }
        }
        bbar.push(bn);
        qs.push(qn);
    }
    let algebra = Arc::new(AInfinity::new(hs, bbar, false)?);
    let q = AInfMorphism::new(algebra.clone(), a.clone(), qs)?;
    Ok(Transferred { algebra, q, recursion })
}

/// Transfer with the canonical contraction, choosing the DGA recursion when
/// the source has no operations above arity 2.
pub fn transfer_canonical(a: &Arc<AInfinity>, n_max: usize, exec: Exec) -> Result<(TransferData, Transferred)> {
    let data = TransferData::canonical(a)?;
    let rec = if a.is_dga() { Recursion::Dga } else { Recursion::General };
    let t = transfer(a, &data, n_max, rec, exec)?;
    Ok((data, t))
}
