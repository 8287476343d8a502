//! Twisting elements, twisted differentials and cohomology, the bar map
//! `τ_h`, induced maps of morphisms and homotopies, and the comparison maps
//! `ψ_c` between homotopic twisting elements.
//!
//! Every twisted quantity is a sum over the number of inserted copies of
//! the twisting element. Stored operations are finite, so the sums are
//! finite; [`series_cap`] decides how many arities may be trusted.
//! Linear maps are matrices over the full basis of the underlying space.

use std::sync::Arc;

use crate::ainfty::{compose, AInfHomotopy, AInfMorphism, AInfinity};
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, Matrix, SparseVec, Subquotient};
use crate::field::Field;
use crate::graded::{bar_coderivation, word_cap, BarElement, Element, GradedSpace, GradingMode, MultiMap};

/// One block of arguments in a twisted sum.
#[derive(Clone, Copy, Debug)]
pub enum Block<'a> {
    /// `x^{⊗k}` for every `k ≥ 0`.
    Pow(&'a Element),
    /// A single argument.
    One(&'a Element),
}

/// `Σ maps[n-1](args)` over all repetition counts of the `Pow` blocks with
/// total arity `n` between 1 and `maps.len()`. Arguments stay in place, so
/// no Koszul signs arise.
pub fn series(maps: &[MultiMap], blocks: &[Block]) -> Element {
    fn go<'a>(maps: &[MultiMap], blocks: &[Block<'a>], ones_left: usize, args: &mut Vec<&'a Element>, out: &mut Element) {
        let Some((first, rest)) = blocks.split_first() else {
            let n = args.len();
            if n >= 1 && n <= maps.len() {
                out.add_assign(&maps[n - 1].eval_multilinear(args));
            }
            return;
        };
        match *first {
            Block::One(x) => {
                args.push(x);
                go(maps, rest, ones_left - 1, args, out);
                args.pop();
            }
            Block::Pow(x) => {
                let base = args.len();
                let room = maps.len().saturating_sub(base + ones_left);
                let top = if x.is_zero() { 0 } else { room };
                for k in 0..=top {
                    if k > 0 {
                        args.push(x);
                    }
                    go(maps, rest, ones_left, args, out);
                }
                args.truncate(base);
            }
        }
    }
    let ones = blocks.iter().filter(|b| matches!(b, Block::One(_))).count();
    let mut out = Element::zero();
    if maps.is_empty() || blocks.iter().any(|b| matches!(b, Block::One(x) if x.is_zero())) {
        return out;
    }
    go(maps, blocks, ones, &mut Vec::new(), &mut out);
    out
}

/// Terms of [`series`] of exactly arity `n`.
fn series_exact(maps: &[MultiMap], n: usize, blocks: &[Block]) -> Element {
    let lower = series(&maps[..n - 1], blocks);
    series(&maps[..n], blocks).sub(&lower)
}

/// Matrix of a linear map given by its action on basis vectors.
pub fn matrix_of(field: Field, src_dim: usize, tgt_dim: usize, f: impl Fn(&Element) -> Element) -> Matrix {
    let mut m = Matrix::zero(field, tgt_dim, src_dim);
    for j in 0..src_dim {
        for (i, c) in f(&Element::basis(field, j)).iter() {
            m.set(*i, j, c.clone());
        }
    }
    m
}

fn positive(space: &GradedSpace, h: &Element) -> bool {
    space.mode() == GradingMode::Z && h.iter().all(|(i, _)| space.degree(*i) >= 1)
}

/// Number of arities of `maps` to sum when twisting by `h`.
///
/// * an explicit `bound` always wins;
/// * Z-graded `h` of positive degree: all stored arities (degrees grow);
/// * a certified vanishing arity `certified`;
/// * other Z-graded `h`: all stored arities, provided the top stored term
///   `maps[N-1](h,…,h,e_i)` vanishes on every basis vector;
/// * otherwise (Z2 grading) [`Error::NonTerminatingSeries`].
pub fn series_cap(
    space: &GradedSpace,
    maps: &[MultiMap],
    h: &Element,
    certified: Option<usize>,
    bound: Option<usize>,
) -> Result<usize> {
    let stored = maps.len();
    if let Some(b) = bound {
        return Ok(b.min(stored));
    }
    if positive(space, h) {
        return Ok(stored);
    }
    if let Some(k) = certified {
        return Ok(k.min(stored));
    }
    if space.mode() != GradingMode::Z {
        return Err(Error::NonTerminatingSeries(
            "Z2-graded twisting needs an explicit arity bound".into(),
        ));
    }
    if stored >= 2 {
        for i in 0..space.dim() {
            let e = Element::basis(space.field(), i);
            if !series_exact(maps, stored, &[Block::Pow(h), Block::One(&e)]).is_zero() {
                return Err(Error::NonTerminatingSeries(format!(
                    "top stored arity {stored} still contributes on {}",
                    space.name(i)
                )));
            }
        }
    }
    Ok(stored)
}

/// `∂_h x = Σ_{n≥0} b_{n+1}(h,…,h,x)` using operations of arity at most `cap`.
pub fn twisted_apply(a: &AInfinity, h: &Element, x: &Element, cap: usize) -> Element {
    series(&a.ops()[..cap.min(a.ops().len())], &[Block::Pow(h), Block::One(x)])
}

/// Matrix of `∂_h` on the full basis. Defined for any `h`, twisting or not.
pub fn twisted_differential(a: &AInfinity, h: &Element, bound: Option<usize>) -> Result<Matrix> {
    let sp = a.space();
    let cap = series_cap(sp, a.ops(), h, a.arity_bound(), bound)?;
    Ok(matrix_of(sp.field(), sp.dim(), sp.dim(), |x| twisted_apply(a, h, x, cap)))
}

/// `τ_h(x) = Σ_{n ≤ L-1} h^{⊗n} ⊗ x` in the bar construction.
pub fn tau(h: &Element, x: &Element, cap: usize) -> BarElement {
    let hb = BarElement::from_element(h);
    let mut cur = BarElement::from_element(x);
    let mut total = cur.clone();
    for _ in 1..cap {
        cur = hb.concat(&cur);
        if cur.is_zero() {
            break;
        }
        total = total.add(&cur);
    }
    total
}

/// `τ_h^{-1}(w) = w - h ⊗ w`, truncated to length `cap`.
pub fn tau_inverse(h: &Element, w: &BarElement, cap: usize) -> BarElement {
    w.sub(&BarElement::from_element(h).concat(w)).truncate(cap)
}

/// A certified twisting element: even, with `∂_h h = 0`.
#[derive(Clone, Debug)]
pub struct TwistingElement {
    algebra: Arc<AInfinity>,
    h: Element,
    cap: usize,
    bound: Option<usize>,
}

impl TwistingElement {
    pub fn algebra(&self) -> &Arc<AInfinity> {
        &self.algebra
    }

    pub fn element(&self) -> &Element {
        &self.h
    }

    /// Number of operation arities entering the twisted sums.
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn bound(&self) -> Option<usize> {
        self.bound
    }

    /// `∂_h x`.
    pub fn d(&self, x: &Element) -> Element {
        twisted_apply(&self.algebra, &self.h, x, self.cap)
    }

    pub fn matrix(&self) -> Matrix {
        let sp = self.algebra.space();
        matrix_of(sp.field(), sp.dim(), sp.dim(), |x| self.d(x))
    }
}

/// Word budget for the bar-side confirmation in [`is_twisting_element`].
const BAR_CHECK_WORDS: u128 = 1 << 16;

/// Checks that `h` is even with `∂_h h = 0`, then confirms the bar-side
/// criterion `b(τ_h(h)) = 0` on words short enough to be exact under the
/// word cap and within [`BAR_CHECK_WORDS`].
pub fn is_twisting_element(a: &Arc<AInfinity>, h: &Element, bound: Option<usize>) -> Result<TwistingElement> {
    let sp = a.space();
    if !h.is_even(sp) {
        return Err(Error::OddDegree);
    }
    let cap = series_cap(sp, a.ops(), h, a.arity_bound(), bound)?;
    let res = twisted_apply(a, h, h, cap);
    if !res.is_zero() {
        return Err(Error::NotTwisting(res.display(sp)));
    }
    let ops = &a.ops()[..cap];
    let top = ops.iter().rposition(|m| !m.is_zero()).map_or(1, |k| k + 1);
    // τ_h(h) has |supp h|^k words of length k; stop before the expansion explodes
    let support = h.support().len().max(1) as u128;
    let mut l = top;
    while l < word_cap().max(top) && support.saturating_pow(l as u32 + 1) <= BAR_CHECK_WORDS {
        l += 1;
    }
    let valid = l + 1 - top;
    let lhs = bar_coderivation(ops, &tau(h, h, l)).truncate(valid);
    if !lhs.is_zero() {
        return Err(Error::CheckFailed("b(τ_h(h)) is nonzero although ∂_h h = 0".into()));
    }
    Ok(TwistingElement { algebra: a.clone(), h: h.clone(), cap, bound })
}

/// `b(τ_h x) - τ_h̄(∂_h x) - τ_h̄(∂_h h) ⊗ τ_h(x)` on words of length at most
/// `cap + 1 - top`, where `top` is the highest arity in use. Vanishes for
/// every `h` and `x` on a genuine A∞-structure.
pub fn bar_twist_residual(a: &AInfinity, h: &Element, x: &Element, cap: usize, bound: Option<usize>) -> Result<BarElement> {
    let sp = a.space();
    let n = series_cap(sp, a.ops(), h, a.arity_bound(), bound)?;
    let ops = &a.ops()[..n];
    let top = ops.iter().rposition(|m| !m.is_zero()).map_or(1, |k| k + 1);
    if cap < top {
        return Err(Error::WordCapExceeded { len: top, cap });
    }
    let valid = cap + 1 - top;
    let hb = h.bar(sp);
    let lhs = bar_coderivation(ops, &tau(h, x, cap)).truncate(valid);
    let dx = twisted_apply(a, h, x, n);
    let dh = twisted_apply(a, h, h, n);
    let rhs = tau(&hb, &dx, valid).add(&tau(&hb, &dh, valid).concat(&tau(h, x, valid))).truncate(valid);
    Ok(lhs.sub(&rhs))
}

/// `Σ b_{r+1+t}(h̄^r, ∂_h h, h^t)`; zero for every `h`.
pub fn bianchi_residual(a: &AInfinity, h: &Element, bound: Option<usize>) -> Result<Element> {
    let sp = a.space();
    let n = series_cap(sp, a.ops(), h, a.arity_bound(), bound)?;
    let ops = &a.ops()[..n];
    let hb = h.bar(sp);
    let dh = twisted_apply(a, h, h, n);
    Ok(series(ops, &[Block::Pow(&hb), Block::One(&dh), Block::Pow(h)]))
}

/// `∂_h̄ ∂_h x + Σ b_{r+t+2}(h̄^r, ∂_h h, h^t, x)`; zero for every `h`, `x`.
pub fn curvature_residual(a: &AInfinity, h: &Element, x: &Element, bound: Option<usize>) -> Result<Element> {
    let sp = a.space();
    let n = series_cap(sp, a.ops(), h, a.arity_bound(), bound)?;
    let ops = &a.ops()[..n];
    let hb = h.bar(sp);
    let dh = twisted_apply(a, h, h, n);
    let dd = twisted_apply(a, &hb, &twisted_apply(a, h, x, n), n);
    Ok(dd.add(&series(ops, &[Block::Pow(&hb), Block::One(&dh), Block::Pow(h), Block::One(x)])))
}

/// Z2-graded cohomology of `(A, ∂_h)`.
#[derive(Clone, Debug)]
pub struct TwistedCohomology {
    /// Index 0 for even, 1 for odd.
    parts: [Subquotient; 2],
    space: Arc<GradedSpace>,
}

impl TwistedCohomology {
    pub fn dims(&self) -> [usize; 2] {
        [self.parts[0].dim(), self.parts[1].dim()]
    }

    pub fn part(&self, parity: usize) -> &Subquotient {
        &self.parts[parity]
    }

    /// Canonical representatives of the given parity.
    pub fn reps(&self, parity: usize) -> Vec<Element> {
        self.parts[parity].reps().iter().cloned().map(Element::from_vec).collect()
    }

    /// Coordinates of the class of a closed element of pure parity.
    pub fn class_coords(&self, x: &Element) -> Result<SparseVec> {
        if x.is_zero() {
            return Ok(SparseVec::new());
        }
        let parity = if x.is_even(&self.space) {
            0
        } else if x.is_odd(&self.space) {
            1
        } else {
            return Err(Error::Input("element mixes parities".into()));
        };
        self.parts[parity].class_coords(x.coeffs())
    }
}

/// Kernel and image of a parity-preserving square-zero endomorphism,
/// split by parity.
pub fn parity_cohomology(space: &Arc<GradedSpace>, d: &Matrix) -> Result<TwistedCohomology> {
    let field = space.field();
    let dim = space.dim();
    let idx: [Vec<usize>; 2] = [
        (0..dim).filter(|&i| !space.odd(i)).collect(),
        (0..dim).filter(|&i| space.odd(i)).collect(),
    ];
    let cols = d.columns();
    let mut parts = Vec::with_capacity(2);
    for e in 0..2 {
        let block = Matrix::from_columns(field, dim, &idx[e].iter().map(|&j| cols[j].clone()).collect::<Vec<_>>());
        let ker: Vec<SparseVec> = kernel_basis(&block)?
            .into_iter()
            .map(|v| v.into_iter().map(|(k, x)| (idx[e][k], x)).collect())
            .collect();
        let im: Vec<SparseVec> = idx[1 - e].iter().map(|&j| cols[j].clone()).collect();
        parts.push(Subquotient::new(field, dim, &im, &ker)?);
    }
    let odd = parts.pop().expect("two parts");
    let even = parts.pop().expect("two parts");
    Ok(TwistedCohomology { parts: [even, odd], space: space.clone() })
}

/// Twisted cohomology, after asserting `∂_h² = 0`.
pub fn twisted_cohomology(tw: &TwistingElement) -> Result<TwistedCohomology> {
    let d = tw.matrix();
    if !d.mul(&d).is_zero() {
        return Err(Error::CheckFailed("twisted differential does not square to zero".into()));
    }
    parity_cohomology(tw.algebra.space(), &d)
}

/// Matrix of the map induced on cohomology, one block per parity, in the
/// representative coordinates of `src` and `tgt`.
pub fn on_cohomology(m: &Matrix, src: &TwistedCohomology, tgt: &TwistedCohomology) -> Result<[Matrix; 2]> {
    let field = m.field();
    let mut out = Vec::with_capacity(2);
    for e in 0..2 {
        let cols: Vec<SparseVec> = src
            .reps(e)
            .iter()
            .map(|r| tgt.part(e).class_coords(&m.mul_vec(r.coeffs())))
            .collect::<Result<_>>()?;
        out.push(Matrix::from_columns(field, tgt.part(e).dim(), &cols));
    }
    let odd = out.pop().expect("two parts");
    let even = out.pop().expect("two parts");
    Ok([even, odd])
}

fn is_invertible(m: &[Matrix; 2]) -> bool {
    m.iter().all(|b| b.rows() == b.cols() && b.rank() == b.rows())
}

/// Twisting elements `h → h′` homotopic through an odd `c`:
/// `h′ - h = Σ b_{r+1+t}(h′^r, c, h^t)`.
#[derive(Clone, Debug)]
pub struct TwistHomotopy {
    from: TwistingElement,
    to: TwistingElement,
    c: Element,
}

impl TwistHomotopy {
    pub fn new(from: TwistingElement, to: TwistingElement, c: Element) -> Result<TwistHomotopy> {
        if !Arc::ptr_eq(&from.algebra, &to.algebra) && from.algebra.ops() != to.algebra.ops() {
            return Err(Error::EndpointMismatch("twisting elements live in different algebras".into()));
        }
        let sp = from.algebra.space().clone();
        if !c.is_odd(&sp) {
            return Err(Error::WitnessInvalid("homotopy element must be odd".into()));
        }
        let hom = TwistHomotopy { from, to, c };
        let res = hom.to.h.sub(&hom.from.h).sub(&series(hom.ops(), &[Block::Pow(&hom.to.h), Block::One(&hom.c), Block::Pow(&hom.from.h)]));
        if !res.is_zero() {
            return Err(Error::WitnessInvalid(format!("residual {}", res.display(&sp))));
        }
        Ok(hom)
    }

    pub fn from(&self) -> &TwistingElement {
        &self.from
    }

    pub fn to(&self) -> &TwistingElement {
        &self.to
    }

    pub fn element(&self) -> &Element {
        &self.c
    }

    fn ops(&self) -> &[MultiMap] {
        &self.from.algebra.ops()[..self.from.cap.max(self.to.cap)]
    }
}

/// Solves `h′ = h + Σ b_{r+1+t}(h′^r, c, h^t)` by fixed-point iteration,
/// returning the far endpoint of a homotopy through `c` when the iteration
/// stabilises within `max_iter` steps.
pub fn homotopy_endpoint(tw: &TwistingElement, c: &Element, max_iter: usize) -> Result<Element> {
    let ops = &tw.algebra.ops()[..tw.cap];
    let mut cur = tw.h.clone();
    for _ in 0..max_iter {
        let next = tw.h.add(&series(ops, &[Block::Pow(&cur), Block::One(c), Block::Pow(&tw.h)]));
        if next == cur {
            return Ok(cur);
        }
        cur = next;
    }
    Err(Error::NonTerminatingSeries("homotopy endpoint iteration did not stabilise".into()))
}

/// `ψ_c` with its action on twisted cohomology.
#[derive(Clone, Debug)]
pub struct Psi {
    pub matrix: Matrix,
    /// Induced map `H_h → H_{h′}` per parity; always invertible.
    pub on_cohomology: [Matrix; 2],
}

fn psi_matrix(hom: &TwistHomotopy) -> Matrix {
    let sp = hom.from.algebra.space();
    matrix_of(sp.field(), sp.dim(), sp.dim(), |a| {
        a.add(&series(hom.ops(), &[Block::Pow(&hom.to.h), Block::One(&hom.c), Block::Pow(&hom.from.h), Block::One(a)]))
    })
}

/// `ψ_c(a) = a + Σ b_{r+t+2}(h′^r, c, h^t, a)`, checked to be a cochain map
/// `(A, ∂_h) → (A, ∂_{h′})` inducing an isomorphism on cohomology.
pub fn psi(hom: &TwistHomotopy) -> Result<Psi> {
    let m = psi_matrix(hom);
    let (dh, dh2) = (hom.from.matrix(), hom.to.matrix());
    if m.mul(&dh) != dh2.mul(&m) {
        return Err(Error::CheckFailed("ψ_c is not a cochain map".into()));
    }
    let on = on_cohomology(&m, &twisted_cohomology(&hom.from)?, &twisted_cohomology(&hom.to)?)?;
    if !is_invertible(&on) {
        return Err(Error::CheckFailed("ψ_c does not induce an isomorphism".into()));
    }
    Ok(Psi { matrix: m, on_cohomology: on })
}

fn same_element(x: &TwistingElement, y: &TwistingElement) -> bool {
    x.h == y.h && (Arc::ptr_eq(&x.algebra, &y.algebra) || x.algebra.ops() == y.algebra.ops())
}

/// Homotopy `h → h″` from `c: h → h′` and `c′: h′ → h″`:
/// `c″ = c + c′ + Σ b_{r+s+t+2}(h″^r, c′, h′^s, c, h^t)`.
pub fn compose_twist_homotopies(c: &TwistHomotopy, c2: &TwistHomotopy) -> Result<TwistHomotopy> {
    if !same_element(&c.to, &c2.from) {
        return Err(Error::EndpointMismatch("homotopies do not chain".into()));
    }
    let ops = &c.from.algebra.ops()[..c.ops().len().max(c2.ops().len())];
    let corr = series(
        ops,
        &[Block::Pow(&c2.to.h), Block::One(&c2.c), Block::Pow(&c.to.h), Block::One(&c.c), Block::Pow(&c.from.h)],
    );
    TwistHomotopy::new(c.from.clone(), c2.to.clone(), c.c.add(&c2.c).add(&corr))
}

/// `ψ_{c′,c}(a) = Σ b_{r+s+t+3}(h″^r, c′, h′^s, c, h^t, a)`.
pub fn psi_pair(c: &TwistHomotopy, c2: &TwistHomotopy) -> Result<Matrix> {
    if !same_element(&c.to, &c2.from) {
        return Err(Error::EndpointMismatch("homotopies do not chain".into()));
    }
    let sp = c.from.algebra.space();
    let ops = &c.from.algebra.ops()[..c.ops().len().max(c2.ops().len())];
    Ok(matrix_of(sp.field(), sp.dim(), sp.dim(), |a| {
        series(
            ops,
            &[
                Block::Pow(&c2.to.h),
                Block::One(&c2.c),
                Block::Pow(&c.to.h),
                Block::One(&c.c),
                Block::Pow(&c.from.h),
                Block::One(a),
            ],
        )
    }))
}

/// Checks `ψ_{c′}ψ_c - ψ_{c″} = ∂_{h″} ψ_{c′,c} + ψ_{c′,c} ∂_h` and returns
/// the composite homotopy.
pub fn check_psi_composition(c: &TwistHomotopy, c2: &TwistHomotopy) -> Result<TwistHomotopy> {
    let c3 = compose_twist_homotopies(c, c2)?;
    let p = psi_pair(c, c2)?;
    let lhs = psi_matrix(c2).mul(&psi_matrix(c)).sub(&psi_matrix(&c3));
    let rhs = c2.to.matrix().mul(&p).add(&p.mul(&c.from.matrix()));
    if lhs != rhs {
        return Err(Error::CheckFailed("ψ composition homotopy identity fails".into()));
    }
    Ok(c3)
}

/// `F_h` together with the twisting element `F_h(h)` of the target.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub matrix: Matrix,
    pub image: TwistingElement,
}

fn morphism_cap(f: &AInfMorphism, h: &Element, bound: Option<usize>) -> Result<usize> {
    let certified = f.is_strict().then_some(1);
    series_cap(f.source().space(), f.comps(), h, certified, bound)
}

/// `F_h(a) = Σ f_{n+1}(h^n, a)`. Asserts that `F_h(h)` is twisting and
/// that `F_h ∂_h = ∂_{F_h(h)} F_h`.
pub fn induced_map(f: &AInfMorphism, tw: &TwistingElement) -> Result<InducedMap> {
    let h = &tw.h;
    let n = morphism_cap(f, h, tw.bound)?;
    let comps = &f.comps()[..n];
    let (sa, sb) = (f.source().space(), f.target().space());
    let m = matrix_of(sa.field(), sa.dim(), sb.dim(), |a| series(comps, &[Block::Pow(h), Block::One(a)]));
    let fh = series(comps, &[Block::Pow(h), Block::One(h)]);
    let image = is_twisting_element(f.target(), &fh, tw.bound)
        .map_err(|e| Error::CheckFailed(format!("F_h(h) is not twisting: {e}")))?;
    if m.mul(&tw.matrix()) != image.matrix().mul(&m) {
        return Err(Error::CheckFailed("F_h is not a cochain map".into()));
    }
    Ok(InducedMap { matrix: m, image })
}

/// Checks `(G∘F)_h = G_{F_h(h)} ∘ F_h` on a basis.
pub fn check_functoriality(f: &AInfMorphism, g: &AInfMorphism, tw: &TwistingElement) -> Result<()> {
    let gf = compose(g, f, None)?;
    let fh = induced_map(f, tw)?;
    let gfh = induced_map(&gf, tw)?;
    let g_at = induced_map(g, &fh.image)?;
    if gfh.image.h != g_at.image.h {
        return Err(Error::CheckFailed("(G∘F)_h(h) differs from G(F_h(h))".into()));
    }
    if gfh.matrix != g_at.matrix.mul(&fh.matrix) {
        return Err(Error::CheckFailed("(G∘F)_h differs from G_{F_h(h)} F_h".into()));
    }
    Ok(())
}

/// Image of a homotopy of twisting elements under a morphism.
#[derive(Clone, Debug)]
pub struct MorphismOnHomotopy {
    /// `F_{h′,h}(c)`, a homotopy from `F_h(h)` to `F_{h′}(h′)`.
    pub homotopy: TwistHomotopy,
    /// `a ↦ F_{h′,h}(c, a)`.
    pub map: Matrix,
}

/// `F_{h′,h}(c) = Σ f_{r+1+t}(h̄′^r, c, h^t)` and
/// `F_{h′,h}(c,a) = Σ f_{r+t+2}(h̄′^r, c, h^t, a)`, with the check
/// `F_{h′} ψ^A_c - ψ^B_{F_{h′,h}(c)} F_h = ∂ F_{h′,h}(c,·) + F_{h′,h}(c,·) ∂_h`.
pub fn morphism_on_twist_homotopy(f: &AInfMorphism, hom: &TwistHomotopy) -> Result<MorphismOnHomotopy> {
    let fh = induced_map(f, &hom.from)?;
    let fh2 = induced_map(f, &hom.to)?;
    let (sa, sb) = (f.source().space(), f.target().space());
    let n = morphism_cap(f, &hom.from.h, hom.from.bound)?.max(morphism_cap(f, &hom.to.h, hom.to.bound)?);
    let comps = &f.comps()[..n];
    let h2b = hom.to.h.bar(sa);
    let fc = series(comps, &[Block::Pow(&h2b), Block::One(&hom.c), Block::Pow(&hom.from.h)]);
    let image = TwistHomotopy::new(fh.image.clone(), fh2.image.clone(), fc)
        .map_err(|e| Error::CheckFailed(format!("image homotopy invalid: {e}")))?;
    let map = matrix_of(sa.field(), sa.dim(), sb.dim(), |a| {
        series(comps, &[Block::Pow(&h2b), Block::One(&hom.c), Block::Pow(&hom.from.h), Block::One(a)])
    });
    let lhs = fh2.matrix.mul(&psi_matrix(hom)).sub(&psi_matrix(&image).mul(&fh.matrix));
    let rhs = fh2.image.matrix().mul(&map).add(&map.mul(&hom.from.matrix()));
    if lhs != rhs {
        return Err(Error::CheckFailed("morphism does not commute with ψ up to the stated homotopy".into()));
    }
    Ok(MorphismOnHomotopy { homotopy: image, map })
}

/// Action of an A∞-homotopy `f ⇒ g` on a twisting element.
#[derive(Clone, Debug)]
pub struct HomotopyAction {
    /// `H_h(a) = Σ h_{n+1}(h^n, a)`.
    pub map: Matrix,
    /// `F_h(h) → G_h(h)` through `H_h(h)`.
    pub homotopy: TwistHomotopy,
    pub f: InducedMap,
    pub g: InducedMap,
}

/// Checks `G_h - ψ_{H_h(h)} F_h = ∂_{G_h(h)} H_h + H_h ∂_h`, which makes the
/// triangle `G_* = (ψ_{H_h(h)})_* F_*` commute on cohomology.
pub fn morphism_homotopy_action(hom: &AInfHomotopy, tw: &TwistingElement) -> Result<HomotopyAction> {
    let f = induced_map(hom.from_f(), tw)?;
    let g = induced_map(hom.to_g(), tw)?;
    let h = &tw.h;
    let (sa, sb) = (hom.from_f().source().space(), hom.from_f().target().space());
    let n = series_cap(sa, hom.comps(), h, None, tw.bound)?;
    let comps = &hom.comps()[..n];
    let map = matrix_of(sa.field(), sa.dim(), sb.dim(), |a| series(comps, &[Block::Pow(h), Block::One(a)]));
    let hh = series(comps, &[Block::Pow(h), Block::One(h)]);
    let homotopy = TwistHomotopy::new(f.image.clone(), g.image.clone(), hh)
        .map_err(|e| Error::CheckFailed(format!("F_h(h) and G_h(h) not homotopic through H_h(h): {e}")))?;
    let lhs = g.matrix.sub(&psi_matrix(&homotopy).mul(&f.matrix));
    let rhs = g.image.matrix().mul(&map).add(&map.mul(&tw.matrix()));
    if lhs != rhs {
        return Err(Error::CheckFailed("G_h - ψ F_h is not the stated cochain homotopy".into()));
    }
    Ok(HomotopyAction { map, homotopy, f, g })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::GradedSpace;

    #[test]
    fn series_counts_insertions() {
        // maps[n-1] sends every length-n word of e0 to e0, so the series
        // counts admissible arities.
        let f = Field::Q;
        let sp = GradedSpace::from_basis(f, GradingMode::Z, &[("e", 0)]).unwrap();
        let maps: Vec<MultiMap> = (1..=4)
            .map(|n| {
                let mut m = MultiMap::new(sp.clone(), sp.clone(), n, 0);
                m.insert(vec![0; n], Element::basis(f, 0)).unwrap();
                m
            })
            .collect();
        let e = Element::basis(f, 0);
        assert_eq!(series(&maps, &[Block::Pow(&e), Block::One(&e)]), Element::from_i64(f, &[(0, 4)]));
        // two Pow blocks: arities n ≥ 1 with (r,t) splits, n=1..4 → 1+2+3+4
        assert_eq!(
            series(&maps, &[Block::Pow(&e), Block::One(&e), Block::Pow(&e)]),
            Element::from_i64(f, &[(0, 10)])
        );
    }
}
