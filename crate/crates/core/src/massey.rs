//! Defining systems, higher Massey products and their equivalences,
//! naturality under morphisms, and the relations with the transferred
//! structure on cohomology.
//!
//! A defining system for `α_1..α_m` is a strictly upper triangular
//! `(m+1) × (m+1)` matrix `a` whose curvature `∂_a a` vanishes off the
//! corner `(0,m)`; its value is `μ(a) = (∂_a a)_{0m}`. Classes live in the
//! cohomology space of a [`TransferData`]; entry `(i,j)` of a system has
//! degree `Σ_{i<k≤j} |α_k|`.

use std::collections::HashSet;
use std::sync::Arc;

use serde::Serialize;

use crate::ainfty::{AInfHomotopy, AInfMorphism, AInfinity};
use crate::error::{Error, Result};
use crate::exactla::{echelon_basis, SparseVec};
use crate::field::{Field, Scalar};
use crate::graded::{Element, GradedSpace, MultiMap};
use crate::matric::{curvature, matric_series, MBlock, MatricElement};
use crate::par::{map_range, Exec};
use crate::transfer::{TransferData, Transferred};

/// A cohomology class with an explicit degree, so that zero classes still
/// fix the degree pattern of a defining system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Class {
    pub value: Element,
    pub degree: i64,
}

impl Class {
    /// Class of a nonzero homogeneous element of the cohomology space.
    pub fn new(h_space: &GradedSpace, value: Element) -> Result<Class> {
        let degree = value
            .degree(h_space)
            .ok_or_else(|| Error::Input("class must be nonzero and homogeneous; use Class::zero".into()))?;
        Ok(Class { value, degree })
    }

    pub fn zero(degree: i64) -> Class {
        Class { value: Element::zero(), degree }
    }

    /// Basis class of the cohomology space.
    pub fn basis(h_space: &GradedSpace, i: usize) -> Class {
        Class { value: Element::basis(h_space.field(), i), degree: h_space.degree(i) }
    }

    /// `ᾱ = (-1)^{|α|} α`.
    pub fn bar(&self) -> Class {
        let odd = self.degree.rem_euclid(2) == 1;
        Class { value: if odd { self.value.neg() } else { self.value.clone() }, degree: self.degree }
    }
}

/// A validated defining system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefiningSystem {
    pub classes: Vec<Class>,
    pub matrix: MatricElement,
    /// `μ(a)`, closed.
    pub mu: Element,
}

impl DefiningSystem {
    pub fn m(&self) -> usize {
        self.classes.len()
    }
}

/// Degree forced on entry `(i,j)`.
pub fn entry_degree(space: &GradedSpace, classes: &[Class], i: usize, j: usize) -> i64 {
    space.norm(classes[i..j].iter().map(|c| c.degree).sum())
}

/// `μ(a) = (∂_a a)_{0m}`, asserting `b_1(μ(a)) = 0`.
pub fn mu(a: &AInfinity, sys: &MatricElement) -> Result<Element> {
    let m = sys.rows().checked_sub(1).ok_or_else(|| Error::SizeMismatch("empty system".into()))?;
    let mu = curvature(a.ops(), sys)?.get(0, m);
    if !a.d(&mu).is_zero() {
        return Err(Error::CheckFailed("b_1(μ(a)) is nonzero".into()));
    }
    Ok(mu)
}

/// Checks every defining-system condition and computes `μ`.
pub fn validate(a: &AInfinity, data: &TransferData, classes: &[Class], sys: &MatricElement) -> Result<DefiningSystem> {
    let m = classes.len();
    if m < 2 {
        return Err(Error::Input("Massey products need at least two classes".into()));
    }
    if (sys.rows(), sys.cols()) != (m + 1, m + 1) {
        return Err(Error::SizeMismatch(format!("expected a {0}x{0} system", m + 1)));
    }
    if !sys.is_strict_upper() {
        return Err(Error::InvalidSystem("matrix is not strictly upper triangular".into()));
    }
    let sp = a.space();
    for ((i, j), e) in sys.entries() {
        let want = entry_degree(sp, classes, *i, *j);
        if e.iter().any(|(k, _)| sp.degree(*k) != want) {
            return Err(Error::InvalidSystem(format!("entry ({i},{j}) is not of degree {want}")));
        }
    }
    let curv = curvature(a.ops(), sys)?;
    if let Some(((i, j), _)) = curv.entries().iter().find(|(k, _)| **k != (0, m)) {
        return Err(Error::InvalidSystem(format!("curvature nonzero at ({i},{j})")));
    }
    for (k, c) in classes.iter().enumerate() {
        let rep = sys.get(k, k + 1);
        if data.p(&rep) != c.value {
            return Err(Error::InvalidSystem(format!("entry ({k},{}) does not represent class {}", k + 1, k + 1)));
        }
    }
    let mu = mu(a, sys)?;
    Ok(DefiningSystem { classes: classes.to_vec(), matrix: sys.clone(), mu })
}

/// Offsets enumerated at each free entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Offsets {
    /// Every coefficient of a finite field.
    Exhaustive,
    /// Coefficients drawn from this list.
    Listed(Vec<Scalar>),
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub budget: u128,
    pub offsets: Offsets,
    pub exec: Exec,
}

impl SearchConfig {
    /// Exhaustive over finite fields, the single offset 0 over ℚ.
    pub fn for_field(field: Field) -> SearchConfig {
        let offsets = match field {
            Field::Q => Offsets::Listed(vec![field.zero()]),
            Field::Fp(_) => Offsets::Exhaustive,
        };
        SearchConfig { budget: 1 << 20, offsets, exec: Exec::Parallel }
    }
}

/// Sum over chains `i = k_0 < … < k_r = j`, `r ≥ 2`, of `b_r(a_{k_0k_1},…)`.
fn chain_sum(a: &AInfinity, sys: &MatricElement, i: usize, j: usize) -> Element {
    fn go<'a>(a: &AInfinity, sys: &'a MatricElement, cur: usize, j: usize, acc: &mut Vec<&'a Element>, out: &mut Element) {
        if cur == j {
            if acc.len() >= 2 {
                out.add_assign(&a.eval(acc));
            }
            return;
        }
        if acc.len() >= a.ops().len() {
            return;
        }
        for k in cur + 1..=j {
            if let Some(e) = sys.entry(cur, k) {
                acc.push(e);
                go(a, sys, k, j, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Element::zero();
    go(a, sys, i, j, &mut Vec::new(), &mut out);
    out
}

/// Free entries `(i,j)` with `2 ≤ j-i < m`, filled in order of span, and the
/// representatives `q1(e)` of cohomology basis classes in their degree.
fn free_entries(data: &TransferData, sp: &GradedSpace, classes: &[Class]) -> Vec<((usize, usize), Vec<Element>)> {
    let m = classes.len();
    let hs = &data.h_space;
    let mut out = Vec::new();
    for span in 2..m {
        for i in 0..=m - span {
            let j = i + span;
            let d = entry_degree(sp, classes, i, j);
            let lifts = hs
                .basis_in_degree(d)
                .into_iter()
                .map(|k| data.q(&Element::basis(hs.field(), k)))
                .collect();
            out.push(((i, j), lifts));
        }
    }
    out
}

/// Builds the system selected by one offset tuple. `Err(Obstructed)` when
/// some entry cannot be solved.
fn build_system(
    a: &AInfinity,
    data: &TransferData,
    classes: &[Class],
    free: &[((usize, usize), Vec<Element>)],
    coeffs: &[Scalar],
) -> Result<DefiningSystem> {
    let m = classes.len();
    let mut sys = MatricElement::square(m + 1);
    for (k, c) in classes.iter().enumerate() {
        sys.set(k, k + 1, data.q(&c.value));
    }
    let mut pos = 0;
    for ((i, j), lifts) in free {
        let r = chain_sum(a, &sys, *i, *j);
        let class = data.p(&r);
        if !class.is_zero() {
            return Err(Error::Obstructed {
                i: *i,
                j: *j,
                class: class.iter().map(|(k, c)| format!("{}*{}", c, data.h_space.name(*k))).collect(),
            });
        }
        let mut e = data.h(&r).neg();
        if a.d(&e).add(&r) != Element::zero() {
            return Err(Error::CheckFailed(format!("particular solution at ({i},{j}) is wrong")));
        }
        for l in lifts {
            e.axpy(&coeffs[pos], l);
            pos += 1;
        }
        sys.set(*i, *j, e);
    }
    validate(a, data, classes, &sys)
}

/// Number of offset tuples and the scalars ranged over.
fn search_space(field: Field, cfg: &SearchConfig, slots: usize) -> Result<(Vec<Scalar>, u128)> {
    let values = match &cfg.offsets {
        Offsets::Exhaustive => field
            .elements()
            .ok_or_else(|| Error::Input("exhaustive search needs a finite field".into()))?,
        Offsets::Listed(v) if v.is_empty() => return Err(Error::Input("empty offset list".into())),
        Offsets::Listed(v) => v.clone(),
    };
    let mut needed: u128 = 1;
    for _ in 0..slots {
        needed = needed.saturating_mul(values.len() as u128);
    }
    if needed > cfg.budget {
        return Err(Error::BudgetExceeded { needed, budget: cfg.budget });
    }
    Ok((values, needed))
}

/// Outcome of a search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub systems: Vec<DefiningSystem>,
    pub enumerated: u128,
    /// True when every offset tuple of a finite field was tried.
    pub exhaustive: bool,
}

/// Enumerates defining systems with `a_{0m} = 0`, filling entries by span
/// and ranging over cohomology-lift offsets at every free entry.
pub fn find_defining_systems(a: &AInfinity, data: &TransferData, classes: &[Class], cfg: &SearchConfig) -> Result<SearchOutcome> {
    let m = classes.len();
    if m < 2 {
        return Err(Error::Input("Massey products need at least two classes".into()));
    }
    let sp = a.space();
    for (k, c) in classes.iter().enumerate() {
        if c.value.iter().any(|(i, _)| data.h_space.degree(*i) != sp.norm(c.degree)) {
            return Err(Error::Input(format!("class {} is not of degree {}", k + 1, c.degree)));
        }
    }
    let field = sp.field();
    let free = free_entries(data, sp, classes);
    let slots: usize = free.iter().map(|(_, l)| l.len()).sum();
    let (values, needed) = search_space(field, cfg, slots)?;
    let base = values.len() as u128;
    let results = map_range(cfg.exec, needed as u64, |t| {
        let mut t = t as u128;
        let coeffs: Vec<Scalar> = (0..slots)
            .map(|_| {
                let d = (t % base) as usize;
                t /= base;
                values[d].clone()
            })
            .collect();
        build_system(a, data, classes, &free, &coeffs)
    });
    let mut systems = Vec::new();
    let mut first_err = None;
    for r in results {
        match r {
            Ok(s) => systems.push(s),
            Err(e @ Error::Obstructed { .. }) => {
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    if systems.is_empty() {
        return Err(first_err.unwrap_or(Error::Input("no offsets enumerated".into())));
    }
    let exhaustive = matches!(cfg.offsets, Offsets::Exhaustive);
    Ok(SearchOutcome { systems, enumerated: needed, exhaustive })
}

/// The Massey product set found by a search.
#[derive(Clone, Debug)]
pub struct MasseyResult {
    /// Distinct classes `[μ(a)]`, in order of first appearance.
    pub values: Vec<Element>,
    /// One system per value.
    pub systems: Vec<DefiningSystem>,
    /// Echelon basis of the span of `v - values[0]`.
    pub indeterminacy: Vec<SparseVec>,
    pub enumerated: u128,
    pub exhaustive: bool,
}

pub fn massey_product(a: &AInfinity, data: &TransferData, classes: &[Class], cfg: &SearchConfig) -> Result<MasseyResult> {
    let out = find_defining_systems(a, data, classes, cfg)?;
    let mut seen = HashSet::new();
    let mut values = Vec::new();
    let mut systems = Vec::new();
    for s in out.systems {
        let v = data.p(&s.mu);
        if seen.insert(v.clone()) {
            values.push(v);
            systems.push(s);
        }
    }
    let diffs: Vec<SparseVec> = values.iter().skip(1).map(|v| v.sub(&values[0]).into_vec()).collect();
    let (indeterminacy, _) = echelon_basis(data.h_space.field(), data.h_space.dim(), &diffs)?;
    Ok(MasseyResult { values, systems, indeterminacy, enumerated: out.enumerated, exhaustive: out.exhaustive })
}

/// Strongest relation witnessed between two defining systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Homotopic,
    Approx,
    Equivalent,
    Unrelated,
}

/// `Σ b_{r+1+t}(ā′^r ⊙ c ⊙ a^t)`.
pub fn homotopy_term(ops: &[MultiMap], space: &GradedSpace, a: &MatricElement, a2: &MatricElement, c: &MatricElement) -> Result<MatricElement> {
    let a2b = a2.bar(space);
    matric_series(ops, &[MBlock::Pow(&a2b), MBlock::One(c), MBlock::Pow(a)])
}

/// Classifies `a`, `a′` with witness `c`, asserting the consequence of
/// each relation: equal curvature and `μ` for homotopic systems, equal
/// classes otherwise.
pub fn check_equivalence(
    alg: &AInfinity,
    data: &TransferData,
    a: &DefiningSystem,
    a2: &DefiningSystem,
    c: &MatricElement,
) -> Result<Relation> {
    if a.classes != a2.classes {
        return Err(Error::Input("systems are for different classes".into()));
    }
    if (c.rows(), c.cols()) != (a.matrix.rows(), a.matrix.cols()) || !c.is_strict_upper() {
        return Err(Error::SizeMismatch("witness must be strictly upper triangular of the same size".into()));
    }
    let diff = a2.matrix.sub(&a.matrix);
    let term = homotopy_term(alg.ops(), alg.space(), &a.matrix, &a2.matrix, c)?;
    let same_class = data.p(&a.mu) == data.p(&a2.mu);
    let rel = if diff == term {
        if curvature(alg.ops(), &a.matrix)? != curvature(alg.ops(), &a2.matrix)? || a.mu != a2.mu {
            return Err(Error::CheckFailed("homotopic systems with different curvature".into()));
        }
        Relation::Homotopic
    } else if a.matrix.approx(&a2.matrix) {
        Relation::Approx
    } else if diff.approx(&term) {
        Relation::Equivalent
    } else {
        return Ok(Relation::Unrelated);
    };
    if !same_class {
        return Err(Error::CheckFailed("equivalent systems with different Massey classes".into()));
    }
    Ok(rel)
}

/// The system `a′` homotopic to `a` through `c`, solving
/// `a′ = a + Σ b(ā′^r ⊙ c ⊙ a^t)` by iteration (exact after `m+1` rounds
/// since entries of span `k` only see entries of smaller span of `a′`).
pub fn homotopic_system(alg: &AInfinity, data: &TransferData, a: &DefiningSystem, c: &MatricElement) -> Result<DefiningSystem> {
    let mut cur = a.matrix.clone();
    for _ in 0..=a.matrix.rows() {
        cur = a.matrix.add(&homotopy_term(alg.ops(), alg.space(), &a.matrix, &cur, c)?);
    }
    validate(alg, data, &a.classes, &cur)
}

/// `F_a(a) = Σ_{n≥1} f_n(a^{⊙n})`, a defining system of `(f_1)_* α` with
/// `μ^B(F_a(a)) = f_1(μ^A(a))`.
pub fn pushforward(f: &AInfMorphism, data_b: &TransferData, sys: &DefiningSystem) -> Result<DefiningSystem> {
    let fa = matric_series(f.comps(), &[MBlock::Pow(&sys.matrix), MBlock::One(&sys.matrix)])?;
    let classes: Vec<Class> = sys
        .classes
        .iter()
        .enumerate()
        .map(|(k, c)| Class { value: data_b.p(&f.f1(&sys.matrix.get(k, k + 1))), degree: c.degree })
        .collect();
    let out = validate(f.target(), data_b, &classes, &fa)
        .map_err(|e| Error::CheckFailed(format!("pushforward is not a defining system: {e}")))?;
    if out.mu != f.f1(&sys.mu) {
        return Err(Error::CheckFailed("μ(F_a(a)) differs from f_1(μ(a))".into()));
    }
    Ok(out)
}

/// `F_{a′,a}(c) = Σ f_{r+1+t}(ā′^r ⊙ c ⊙ a^t)`, checked to make the
/// pushforwards homotopic.
pub fn pushforward_homotopy(
    f: &AInfMorphism,
    data_b: &TransferData,
    a: &DefiningSystem,
    a2: &DefiningSystem,
    c: &MatricElement,
) -> Result<MatricElement> {
    let sp = f.source().space();
    let a2b = a2.matrix.bar(sp);
    let fc = matric_series(f.comps(), &[MBlock::Pow(&a2b), MBlock::One(c), MBlock::Pow(&a.matrix)])?;
    let (pa, pa2) = (pushforward(f, data_b, a)?, pushforward(f, data_b, a2)?);
    match check_equivalence(f.target(), data_b, &pa, &pa2, &fc)? {
        Relation::Homotopic => Ok(fc),
        r => Err(Error::CheckFailed(format!("pushforwards related only as {r:?}"))),
    }
}

/// For homotopic morphisms `f ≃ g` through `h`, returns `H_a(a)` after
/// checking that `F_a(a)` and `G_a(a)` are equivalent through it.
pub fn homotopy_pushforward(hom: &AInfHomotopy, data_b: &TransferData, sys: &DefiningSystem) -> Result<(Relation, MatricElement)> {
    let fa = pushforward(hom.from_f(), data_b, sys)?;
    let ga = pushforward(hom.to_g(), data_b, sys)?;
    let ha = matric_series(hom.comps(), &[MBlock::Pow(&sys.matrix), MBlock::One(&sys.matrix)])?;
    let rel = check_equivalence(hom.from_f().target(), data_b, &fa, &ga, &ha)?;
    if rel == Relation::Unrelated {
        return Err(Error::CheckFailed("pushforwards along homotopic morphisms are not equivalent".into()));
    }
    Ok((rel, ha))
}

/// From a system for `α_1..α_m` and a class `γ`, the system for
/// `ᾱ_1, …, ᾱ_{m-1}, b̄_2(α_m, γ)` built from `∂_a (0,…,0,c)ᵀ`, with
/// `μ(b) = -b_2(μ(a), c)` asserted.
pub fn extend_by_class(alg: &AInfinity, data: &TransferData, sys: &DefiningSystem, gamma: &Class) -> Result<DefiningSystem> {
    let m = sys.m();
    let sp = alg.space();
    let c = data.q(&gamma.value);
    let mut col = vec![Element::zero(); m + 1];
    col[m] = c.clone();
    let dc = matric_series(alg.ops(), &[MBlock::Pow(&sys.matrix), MBlock::One(&MatricElement::column(col))])?;
    if !dc.get(m, 0).is_zero() {
        return Err(Error::Input("γ is not closed".into()));
    }
    let a0 = sys.matrix.block(m, m).bar(sp);
    let b = a0.extend_by_column(&dc.block(m, 1))?;
    let mut classes: Vec<Class> = sys.classes[..m - 1].iter().map(Class::bar).collect();
    let last = alg.eval(&[&sys.matrix.get(m - 1, m), &c]);
    classes.push(Class { value: data.p(&last), degree: sys.classes[m - 1].degree + gamma.degree + 1 });
    let out = validate(alg, data, &classes, &b)?;
    if out.mu != alg.eval(&[&sys.mu, &c]).neg() {
        return Err(Error::CheckFailed("μ(b) differs from -b_2(μ(a), c)".into()));
    }
    Ok(out)
}

/// Membership of `b̄_m(α_1..α_m)` in the Massey set, through the system
/// `a_{ij} = q_{j-i}(α_{i+1},…,α_j)`.
#[derive(Clone, Debug)]
pub struct TransferMembership {
    pub value: Element,
    pub system: DefiningSystem,
}

/// Requires `b̄_{j-i}(α_{i+1},…,α_j) = 0` whenever `0 < j-i < m`.
pub fn massey_from_transfer(
    alg: &Arc<AInfinity>,
    data: &TransferData,
    t: &Transferred,
    classes: &[Class],
) -> Result<TransferMembership> {
    let m = classes.len();
    if m < 2 {
        return Err(Error::Input("Massey products need at least two classes".into()));
    }
    if t.algebra.ops().len() < m {
        return Err(Error::Input(format!("transferred structure only reaches arity {}", t.algebra.ops().len())));
    }
    let vals: Vec<&Element> = classes.iter().map(|c| &c.value).collect();
    for span in 2..m {
        for i in 0..=m - span {
            if !t.algebra.eval(&vals[i..i + span]).is_zero() {
                return Err(Error::HypothesisFailed { i, j: i + span });
            }
        }
    }
    let value = t.algebra.eval(&vals);
    let mut alpha = MatricElement::square(m + 1);
    for (k, c) in classes.iter().enumerate() {
        alpha.set(k, k + 1, c.value.clone());
    }
    let sys = matric_series(t.q.comps(), &[MBlock::Pow(&alpha), MBlock::One(&alpha)])?;
    for i in 0..m {
        for j in i + 1..=m {
            if sys.get(i, j) != t.q.eval(&vals[i..j]) {
                return Err(Error::CheckFailed(format!("entry ({i},{j}) is not q_{}(α…)", j - i)));
            }
        }
    }
    let system = validate(alg, data, classes, &sys)?;
    if system.mu != data.q(&value) {
        return Err(Error::CheckFailed("[μ(a)] differs from b̄_m(α)".into()));
    }
    Ok(TransferMembership { value, system })
}

/// The three systems of the triple shuffle relation and the signed sum of
/// their values, which vanishes exactly.
#[derive(Clone, Debug)]
pub struct TripleRelation {
    pub systems: [DefiningSystem; 3],
    pub signs: [bool; 3],
    pub residual: Element,
}

/// For classes with `b̄_2(α_1,α_2) = b̄_2(α_2,α_3) = b̄_2(α_3,α_1) = 0` in a
/// C∞-algebra, builds systems for `(α_1,α_2,α_3)`, `(α_1,α_3,α_2)` and
/// `(α_3,α_1,α_2)` from shared entries and returns
/// `μ_1 + (-1)^{|α_2||α_3|} μ_2 + (-1)^{(|α_1|+|α_2|)|α_3|} μ_3`.
///
/// The middle system uses `a_{02} = -(-1)^{|α_1||α_3|} a′_{21}` and
/// `a_{13} = -(-1)^{|α_2||α_3|} a_{13}`; these are the signs for which it
/// is a defining system under `b_2(x,y) = -(-1)^{|x||y|} b_2(y,x)`.
pub fn cinfty_triple_relation(alg: &AInfinity, data: &TransferData, classes: &[Class; 3]) -> Result<TripleRelation> {
    let report = crate::ainfty::check_cinfty(alg, 3)?;
    if !report.pass {
        return Err(Error::NotCInfty(format!("{:?}", report.witness)));
    }
    let [c1, c2, c3] = classes;
    let (a01, a12, a23) = (data.q(&c1.value), data.q(&c2.value), data.q(&c3.value));
    let solve = |x: &Element, y: &Element, i: usize, j: usize| -> Result<Element> {
        let r = alg.eval(&[x, y]);
        if !data.p(&r).is_zero() {
            return Err(Error::HypothesisFailed { i, j });
        }
        Ok(data.h(&r).neg())
    };
    let a02 = solve(&a01, &a12, 0, 2)?;
    let a13 = solve(&a12, &a23, 1, 3)?;
    let a21 = solve(&a23, &a01, 2, 1)?;
    let odd = |d: i64| d.rem_euclid(2) == 1;
    let (d1, d2, d3) = (c1.degree, c2.degree, c3.degree);
    let sign = |e: &Element, o: bool| if o { e.neg() } else { e.clone() };
    let make = |cl: [&Class; 3], e: [&Element; 5]| -> Result<DefiningSystem> {
        let mut s = MatricElement::square(4);
        s.set(0, 1, e[0].clone());
        s.set(1, 2, e[1].clone());
        s.set(2, 3, e[2].clone());
        s.set(0, 2, e[3].clone());
        s.set(1, 3, e[4].clone());
        validate(alg, data, &[cl[0].clone(), cl[1].clone(), cl[2].clone()], &s)
    };
    let x = sign(&a21, !(odd(d1) && odd(d3)));
    let y = sign(&a13, !(odd(d2) && odd(d3)));
    let s1 = make([c1, c2, c3], [&a01, &a12, &a23, &a02, &a13])?;
    let s2 = make([c1, c3, c2], [&a01, &a23, &a12, &x, &y])?;
    let s3 = make([c3, c1, c2], [&a23, &a01, &a12, &a21, &a02])?;
    let signs = [false, odd(d2) && odd(d3), odd(d1 + d2) && odd(d3)];
    let mut residual = s1.mu.clone();
    residual.add_assign(&sign(&s2.mu, signs[1]));
    residual.add_assign(&sign(&s3.mu, signs[2]));
    Ok(TripleRelation { systems: [s1, s2, s3], signs, residual })
}

/// `(r, m-r)`-shuffles as index orders with their Koszul sign: a letter
/// of the right word passing an unplaced letter of the left word
/// contributes `(-1)^{|x||y|}`.
pub fn shuffles(degrees: &[i64], r: usize) -> Vec<(Vec<usize>, bool)> {
    let m = degrees.len();
    let odd = |k: usize| degrees[k].rem_euclid(2) == 1;
    let mut out = Vec::new();
    for mask in 0u64..(1 << m) {
        if mask.count_ones() as usize != r {
            continue;
        }
        let (mut i, mut j) = (0, r);
        let mut order = Vec::with_capacity(m);
        let mut sign = false;
        for k in 0..m {
            if mask >> k & 1 == 1 {
                order.push(i);
                i += 1;
            } else {
                if odd(j) {
                    sign ^= (i..r).filter(|&x| odd(x)).count() % 2 == 1;
                }
                order.push(j);
                j += 1;
            }
        }
        out.push((order, sign));
    }
    out
}

/// `Σ_{σ ∈ S_{r,m}} ± b̄_m(α_σ)` on the transferred structure, after
/// checking `b̄_{j-i}(α_{σ(i+1)},…,α_{σ(j)}) = 0` for `0 < j-i < m`.
/// Vanishes when the structure is C∞.
pub fn shuffle_relation(t: &Transferred, classes: &[Class], r: usize) -> Result<Element> {
    let m = classes.len();
    if r == 0 || r >= m || m > 20 {
        return Err(Error::Input("need 0 < r < m <= 20".into()));
    }
    if t.algebra.ops().len() < m {
        return Err(Error::Input(format!("transferred structure lacks arity {m}")));
    }
    let degrees: Vec<i64> = classes.iter().map(|c| c.degree).collect();
    let mut total = Element::zero();
    for (order, sign) in shuffles(&degrees, r) {
        let vals: Vec<&Element> = order.iter().map(|&k| &classes[k].value).collect();
        for span in 2..m {
            for i in 0..=m - span {
                if !t.algebra.eval(&vals[i..i + span]).is_zero() {
                    return Err(Error::HypothesisFailed { i, j: i + span });
                }
            }
        }
        let v = t.algebra.eval(&vals);
        total.add_assign(&if sign { v.neg() } else { v });
    }
    Ok(total)
}
