//! A∞-algebras, morphisms and homotopies, with residual checks of their
//! defining identities and composition of morphisms.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::Matrix;
use crate::graded::{
    apply_tensor_maps, apply_tensor_slot, bar_coderivation, basis_words, shuffle, BarElement, Element,
    GradedSpace, GradingMode, MultiMap, Slot, TensorWord,
};

/// All ordered compositions of `n` into positive parts.
pub fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Splits `w` into consecutive blocks of the given lengths.
fn blocks<'a>(w: &'a [usize], parts: &[usize]) -> Vec<&'a [usize]> {
    let mut out = Vec::with_capacity(parts.len());
    let mut pos = 0;
    for &p in parts {
        out.push(&w[pos..pos + p]);
        pos += p;
    }
    out
}

/// A∞-structure `{b_n}` of degree +1 on a graded space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfinity {
    space: Arc<GradedSpace>,
    ops: Vec<MultiMap>,
    dga: bool,
}

impl AInfinity {
    /// `ops[k]` must be `b_{k+1}`: arity `k+1`, degree 1, endomorphism of
    /// `space`. With `dga` set, `b_n` for `n ≥ 3` must vanish.
    pub fn new(space: Arc<GradedSpace>, ops: Vec<MultiMap>, dga: bool) -> Result<AInfinity> {
        for (k, m) in ops.iter().enumerate() {
            if m.arity() != k + 1 {
                return Err(Error::Input(format!("operation {} has arity {}", k + 1, m.arity())));
            }
            if space.norm(m.degree()) != space.norm(1) {
                return Err(Error::DegreeContract(format!("b_{} must have degree 1", k + 1)));
            }
            if **m.src() != *space || **m.tgt() != *space {
                return Err(Error::Input(format!("b_{} acts on a different space", k + 1)));
            }
            if dga && k >= 2 && !m.is_zero() {
                return Err(Error::Input(format!("declared DGA has nonzero b_{}", k + 1)));
            }
        }
        let mut ops = ops;
        if ops.is_empty() {
            ops.push(MultiMap::new(space.clone(), space.clone(), 1, 1));
        }
        Ok(AInfinity { space, ops, dga })
    }

    /// The zero structure with stored arities `1..=n_max`.
    pub fn zero(space: Arc<GradedSpace>, n_max: usize) -> AInfinity {
        let ops = (1..=n_max.max(1)).map(|n| MultiMap::new(space.clone(), space.clone(), n, 1)).collect();
        AInfinity { space, ops, dga: n_max <= 2 }
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn ops(&self) -> &[MultiMap] {
        &self.ops
    }

    /// Highest stored arity.
    pub fn n_max(&self) -> usize {
        self.ops.len()
    }

    /// DGA flag as declared at construction.
    pub fn declared_dga(&self) -> bool {
        self.dga
    }

    /// Declared DGA, or no nonzero operation above arity 2.
    pub fn is_dga(&self) -> bool {
        self.dga || self.ops.iter().skip(2).all(|m| m.is_zero())
    }

    /// Highest arity with a nonzero stored operation (at least 1).
    pub fn top_arity(&self) -> usize {
        self.ops.iter().rposition(|m| !m.is_zero()).map_or(1, |k| k + 1)
    }

    /// `b_n`, or `None` when it is not stored (treated as zero).
    pub fn op(&self, n: usize) -> Option<&MultiMap> {
        if n == 0 {
            return None;
        }
        self.ops.get(n - 1)
    }

    /// Arity `K` with `b_n = 0` certified for all `n > K`, when known:
    /// 2 for declared DGAs, or the degree-forced bound in Z mode when every
    /// degree is at least `d_min ≥ 1`.
    pub fn arity_bound(&self) -> Option<usize> {
        if self.dga {
            return Some(2);
        }
        if self.space.mode() != GradingMode::Z {
            return None;
        }
        let (lo, hi) = (self.space.min_degree()?, self.space.max_degree()?);
        if lo < 1 {
            return None;
        }
        Some(((hi - 1) / lo).max(1) as usize)
    }

    /// Arity beyond which every operation vanishes: the certified bound or
    /// the top nonzero stored arity, whichever is smaller.
    pub fn effective_arity(&self) -> usize {
        match self.arity_bound() {
            Some(k) => k.min(self.top_arity()),
            None => self.top_arity(),
        }
    }

    /// True when a certified arity bound exists.
    pub fn is_complete(&self) -> bool {
        self.arity_bound().is_some()
    }

    /// `b_n(args)` by multilinear extension; zero when not stored.
    pub fn eval(&self, args: &[&Element]) -> Element {
        match self.op(args.len()) {
            Some(m) => m.eval_multilinear(args),
            None => Element::zero(),
        }
    }

    /// Matrix of `b_1` from degree `d` to degree `d+1`, with rows and
    /// columns indexed by position within those degrees.
    pub fn differential_block(&self, d: i64) -> Matrix {
        linear_block(&self.space, &self.space, &self.ops[0], d, d + 1)
    }

    /// `b_1` applied to an element.
    pub fn d(&self, x: &Element) -> Element {
        self.ops[0].eval_multilinear(&[x])
    }

    /// Coderivation on the bar construction.
    pub fn bar(&self, x: &BarElement) -> BarElement {
        bar_coderivation(&self.ops, x)
    }

    /// Same space, new operations.
    pub fn with_ops(&self, ops: Vec<MultiMap>, dga: bool) -> Result<AInfinity> {
        AInfinity::new(self.space.clone(), ops, dga)
    }
}

/// Block of a linear map between the given (normalised) degrees.
pub fn linear_block(src: &GradedSpace, tgt: &GradedSpace, m: &MultiMap, d_src: i64, d_tgt: i64) -> Matrix {
    let cols = src.basis_in_degree(d_src);
    let rows = tgt.basis_in_degree(d_tgt);
    let mut mat = Matrix::zero(src.field(), rows.len(), cols.len());
    for (j, &c) in cols.iter().enumerate() {
        let v = m.eval_basis(&[c]);
        for (i, &r) in rows.iter().enumerate() {
            if let Some(x) = v.coeff(r) {
                mat.set(i, j, x.clone());
            }
        }
    }
    mat
}

/// One arity level of a check.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct LevelResult {
    pub n: usize,
    pub pass: bool,
    /// First failing basis tuple and its residual value.
    pub witness: Option<(Vec<String>, String)>,
}

/// Result of checking an identity for arities `1..=n_max`.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckReport {
    pub n_max: usize,
    /// True when higher arities were not certified to vanish.
    pub truncated: bool,
    pub levels: Vec<LevelResult>,
}

impl CheckReport {
    pub fn pass(&self) -> bool {
        self.levels.iter().all(|l| l.pass)
    }
}

fn level(space: &GradedSpace, n: usize, residual: &MultiMap) -> LevelResult {
    let witness = residual.entries().iter().next().map(|(k, v)| {
        (k.iter().map(|&i| space.name(i).to_string()).collect(), v.display(residual.tgt()))
    });
    LevelResult { n, pass: residual.is_zero(), witness }
}

/// `Σ_{r+s+t=n} b_{r+1+t}(1^{⊗r} ⊗ b_s ⊗ 1^{⊗t})` on all basis words.
///
/// Sparse: a word contributes only if the inner value meets an outer key, so
/// the sum runs over pairs of entries instead of all `dim^n` words.
pub fn stasheff_residual(a: &AInfinity, n: usize) -> MultiMap {
    assert!(n >= 1, "arity must be positive");
    let sp = a.space.clone();
    let mut out = MultiMap::new(sp.clone(), sp.clone(), n, 2);
    for s in 1..=n {
        let (Some(inner), Some(outer)) = (a.op(s), a.op(n - s + 1)) else { continue };
        if inner.is_zero() || outer.is_zero() {
            continue;
        }
        for (okey, oval) in outer.entries() {
            for r in 0..okey.len() {
                let sign_odd = sp.word_odd(&okey[..r]);
                for (ikey, ival) in inner.entries() {
                    let Some(c) = ival.coeff(okey[r]) else { continue };
                    let mut w = okey[..r].to_vec();
                    w.extend_from_slice(ikey);
                    w.extend_from_slice(&okey[r + 1..]);
                    out.accumulate(w, &oval.scale(&c.clone().signed(sign_odd))).expect("residual has degree 2");
                }
            }
        }
    }
    out
}

/// Stasheff identities for `n = 1..=n_max`. The default bound is `2K-1` when
/// an arity bound `K` is certified, else the stored top arity. The report is
/// truncated unless every arity up to `2K'-1` was checked, `K'` being the
/// highest arity carrying a nonzero operation.
pub fn check_algebra(a: &AInfinity, n_max: Option<usize>) -> CheckReport {
    let default = match a.arity_bound() {
        Some(k) => 2 * k - 1,
        None => a.n_max(),
    };
    let n_max = n_max.unwrap_or(default).max(1);
    let truncated = n_max < 2 * a.effective_arity() - 1;
    let levels = (1..=n_max).map(|n| level(&a.space, n, &stasheff_residual(a, n))).collect();
    CheckReport { n_max, truncated, levels }
}

/// First basis word of length `≤ max_len` on which `b∘b ≠ 0`, if any.
pub fn bar_square_failure(a: &AInfinity, max_len: usize) -> Option<(TensorWord, BarElement)> {
    let f = a.space.field();
    for n in 1..=max_len {
        for w in basis_words(a.space.dim(), n) {
            let x = BarElement::word(f, w.clone());
            let bb = a.bar(&a.bar(&x));
            if !bb.is_zero() {
                return Some((w, bb));
            }
        }
    }
    None
}

/// A∞-morphism `{f_n}` (degree 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfMorphism {
    source: Arc<AInfinity>,
    target: Arc<AInfinity>,
    comps: Vec<MultiMap>,
}

fn same(a: &Arc<AInfinity>, b: &Arc<AInfinity>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl AInfMorphism {
    pub fn new(source: Arc<AInfinity>, target: Arc<AInfinity>, comps: Vec<MultiMap>) -> Result<AInfMorphism> {
        for (k, m) in comps.iter().enumerate() {
            if m.arity() != k + 1 || m.degree() != 0 {
                return Err(Error::Input(format!("f_{} must have arity {} and degree 0", k + 1, k + 1)));
            }
            if **m.src() != **source.space() || **m.tgt() != **target.space() {
                return Err(Error::EndpointMismatch(format!("f_{} has wrong spaces", k + 1)));
            }
        }
        let mut comps = comps;
        if comps.is_empty() {
            comps.push(MultiMap::new(source.space().clone(), target.space().clone(), 1, 0));
        }
        Ok(AInfMorphism { source, target, comps })
    }

    pub fn identity(a: Arc<AInfinity>) -> AInfMorphism {
        let sp = a.space().clone();
        let mut f1 = MultiMap::new(sp.clone(), sp.clone(), 1, 0);
        for i in 0..sp.dim() {
            f1.insert(vec![i], Element::basis(sp.field(), i)).expect("identity has degree 0");
        }
        AInfMorphism { source: a.clone(), target: a, comps: vec![f1] }
    }

    /// Morphism with only `f_1`.
    pub fn strict(source: Arc<AInfinity>, target: Arc<AInfinity>, f1: MultiMap) -> Result<AInfMorphism> {
        AInfMorphism::new(source, target, vec![f1])
    }

    pub fn source(&self) -> &Arc<AInfinity> {
        &self.source
    }

    pub fn target(&self) -> &Arc<AInfinity> {
        &self.target
    }

    pub fn comps(&self) -> &[MultiMap] {
        &self.comps
    }

    pub fn comp(&self, n: usize) -> Option<&MultiMap> {
        if n == 0 {
            None
        } else {
            self.comps.get(n - 1)
        }
    }

    pub fn n_max(&self) -> usize {
        self.comps.len()
    }

    pub fn is_strict(&self) -> bool {
        self.comps.iter().skip(1).all(|m| m.is_zero())
    }

    /// `f_n(args)`; zero when not stored.
    pub fn eval(&self, args: &[&Element]) -> Element {
        match self.comp(args.len()) {
            Some(m) => m.eval_multilinear(args),
            None => Element::zero(),
        }
    }

    /// `f_1` applied to an element.
    pub fn f1(&self, x: &Element) -> Element {
        self.comps[0].eval_multilinear(&[x])
    }

    /// Coalgebra lift `F` on a bar element.
    pub fn bar(&self, x: &BarElement) -> BarElement {
        let mut out = BarElement::zero();
        for (w, c) in x.terms() {
            for parts in compositions(w.len()) {
                if parts.iter().any(|&p| p > self.n_max()) {
                    continue;
                }
                let outs: Vec<Element> = blocks(w, &parts)
                    .into_iter()
                    .map(|b| self.comps[b.len() - 1].eval_basis(b))
                    .collect();
                let refs: Vec<&Element> = outs.iter().collect();
                out.axpy(c, &BarElement::tensor(&refs));
            }
        }
        out
    }
}

/// Value of `Σ b^B_r(f_{i_1} ⊗ ... ⊗ f_{i_r})` on a basis word.
fn b_after_f(f: &AInfMorphism, w: &[usize]) -> Element {
    let mut v = Element::zero();
    for parts in compositions(w.len()) {
        if parts.iter().any(|&p| p > f.n_max()) {
            continue;
        }
        let Some(b) = f.target.op(parts.len()) else { continue };
        if b.is_zero() {
            continue;
        }
        let outs: Vec<Element> = blocks(w, &parts).into_iter().map(|s| f.comps[s.len() - 1].eval_basis(s)).collect();
        if outs.iter().any(|e| e.is_zero()) {
            continue;
        }
        let refs: Vec<&Element> = outs.iter().collect();
        v.add_assign(&b.eval_multilinear(&refs));
    }
    v
}

/// Value of `Σ m_{r+1+t}(1^{⊗r} ⊗ b^A_s ⊗ 1^{⊗t})` on a basis word, where
/// `m_k` is supplied by `outer`.
fn maps_after_b<'a>(a: &AInfinity, outer: impl Fn(usize) -> Option<&'a MultiMap>, w: &[usize]) -> Element {
    let n = w.len();
    let mut v = Element::zero();
    for s in 1..=n {
        let Some(inner) = a.op(s) else { continue };
        if inner.is_zero() {
            continue;
        }
        let Some(m) = outer(n - s + 1) else { continue };
        if m.is_zero() {
            continue;
        }
        for r in 0..=n - s {
            let y = apply_tensor_slot(inner, w, r).expect("slot in range");
            v.add_assign(&m.eval_bar(&y));
        }
    }
    v
}

/// Residual `Σ f(1⊗b^A⊗1) - Σ b^B(f⊗...⊗f)` at arity `n`.
pub fn morphism_residual(f: &AInfMorphism, n: usize) -> MultiMap {
    let (sa, sb) = (f.source.space().clone(), f.target.space().clone());
    let mut out = MultiMap::new(sa.clone(), sb, n, 1);
    for w in basis_words(sa.dim(), n) {
        let lhs = maps_after_b(&f.source, |k| f.comp(k), &w);
        let v = lhs.sub(&b_after_f(f, &w));
        if !v.is_zero() {
            out.insert(w, v).expect("residual has degree 1");
        }
    }
    out
}

/// Morphism identities for `n = 1..=n_max`.
pub fn check_morphism(f: &AInfMorphism, n_max: usize) -> CheckReport {
    let levels = (1..=n_max).map(|n| level(f.source.space(), n, &morphism_residual(f, n))).collect();
    let certified = f.source.is_complete() && f.target.is_complete();
    CheckReport { n_max, truncated: !certified, levels }
}

/// First word of length `≤ max_len` where `F∘b^A ≠ b^B∘F`.
pub fn bar_morphism_failure(f: &AInfMorphism, max_len: usize) -> Option<TensorWord> {
    let field = f.source.space().field();
    for n in 1..=max_len {
        for w in basis_words(f.source.space().dim(), n) {
            let x = BarElement::word(field, w.clone());
            let lhs = f.bar(&f.source.bar(&x));
            let rhs = f.target.bar(&f.bar(&x));
            if lhs != rhs {
                return Some(w);
            }
        }
    }
    None
}

/// `(g∘f)_n = Σ g_r(f_{i_1} ⊗ ... ⊗ f_{i_r})` for `n ≤ n_max`.
pub fn compose(g: &AInfMorphism, f: &AInfMorphism, n_max: Option<usize>) -> Result<AInfMorphism> {
    if !same(&f.target, &g.source) {
        return Err(Error::EndpointMismatch("target of f differs from source of g".into()));
    }
    let n_max = n_max.unwrap_or(f.n_max() * g.n_max());
    let (sa, sc) = (f.source.space().clone(), g.target.space().clone());
    let mut comps = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut m = MultiMap::new(sa.clone(), sc.clone(), n, 0);
        for w in basis_words(sa.dim(), n) {
            let mut v = Element::zero();
            for parts in compositions(n) {
                if parts.iter().any(|&p| p > f.n_max()) {
                    continue;
                }
                let Some(gr) = g.comp(parts.len()) else { continue };
                let outs: Vec<Element> =
                    blocks(&w, &parts).into_iter().map(|s| f.comps[s.len() - 1].eval_basis(s)).collect();
                let refs: Vec<&Element> = outs.iter().collect();
                v.add_assign(&gr.eval_multilinear(&refs));
            }
            if !v.is_zero() {
                m.insert(w, v)?;
            }
        }
        comps.push(m);
    }
    AInfMorphism::new(f.source.clone(), g.target.clone(), comps)
}

/// Homotopy `{h_n}` (degree −1) from `f` to `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AInfHomotopy {
    from_f: AInfMorphism,
    to_g: AInfMorphism,
    comps: Vec<MultiMap>,
}

impl AInfHomotopy {
    pub fn new(from_f: AInfMorphism, to_g: AInfMorphism, comps: Vec<MultiMap>) -> Result<AInfHomotopy> {
        if !same(&from_f.source, &to_g.source) || !same(&from_f.target, &to_g.target) {
            return Err(Error::EndpointMismatch("homotopy between morphisms with different endpoints".into()));
        }
        for (k, m) in comps.iter().enumerate() {
            if m.arity() != k + 1 || from_f.source.space().norm(m.degree()) != from_f.source.space().norm(-1) {
                return Err(Error::Input(format!("h_{} must have arity {} and degree -1", k + 1, k + 1)));
            }
        }
        let mut comps = comps;
        if comps.is_empty() {
            comps.push(MultiMap::new(from_f.source.space().clone(), from_f.target.space().clone(), 1, -1));
        }
        Ok(AInfHomotopy { from_f, to_g, comps })
    }

    pub fn from_f(&self) -> &AInfMorphism {
        &self.from_f
    }

    pub fn to_g(&self) -> &AInfMorphism {
        &self.to_g
    }

    pub fn comps(&self) -> &[MultiMap] {
        &self.comps
    }

    pub fn comp(&self, n: usize) -> Option<&MultiMap> {
        if n == 0 {
            None
        } else {
            self.comps.get(n - 1)
        }
    }

    /// `h_n(args)`; zero when not stored.
    pub fn eval(&self, args: &[&Element]) -> Element {
        match self.comp(args.len()) {
            Some(m) => m.eval_multilinear(args),
            None => Element::zero(),
        }
    }
}

/// Residual of `g_n − f_n = Σ b^B(g..⊗h⊗..f) + Σ h(1⊗b^A⊗1)` at arity `n`.
pub fn homotopy_residual(h: &AInfHomotopy, n: usize) -> MultiMap {
    let (f, g) = (&h.from_f, &h.to_g);
    let (sa, sb) = (f.source.space().clone(), f.target.space().clone());
    let mut out = MultiMap::new(sa.clone(), sb, n, 0);
    for w in basis_words(sa.dim(), n) {
        let mut v = g.eval_basis_comp(&w).sub(&f.eval_basis_comp(&w));
        for parts in compositions(n) {
            let k = parts.len();
            let Some(b) = f.target.op(k) else { continue };
            if b.is_zero() {
                continue;
            }
            for pos in 0..k {
                let mut slots = Vec::with_capacity(k);
                let mut ok = true;
                for (j, &p) in parts.iter().enumerate() {
                    let m = match j.cmp(&pos) {
                        std::cmp::Ordering::Less => g.comp(p),
                        std::cmp::Ordering::Equal => h.comp(p),
                        std::cmp::Ordering::Greater => f.comp(p),
                    };
                    match m {
                        Some(m) => slots.push(Slot::Map(m)),
                        None => ok = false,
                    }
                }
                if !ok {
                    continue;
                }
                let y = apply_tensor_maps(&sa, &slots, &w).expect("arities match");
                v = v.sub(&b.eval_bar(&y));
            }
        }
        v = v.sub(&maps_after_b(&f.source, |k| h.comp(k), &w));
        if !v.is_zero() {
            out.insert(w, v).expect("residual has degree 0");
        }
    }
    out
}

impl AInfMorphism {
    fn eval_basis_comp(&self, w: &[usize]) -> Element {
        self.comp(w.len()).map(|m| m.eval_basis(w)).unwrap_or_default()
    }
}

/// Homotopy identities for `n = 1..=n_max`.
pub fn check_homotopy(h: &AInfHomotopy, n_max: usize) -> CheckReport {
    let sp = h.from_f.source.space().clone();
    let levels = (1..=n_max).map(|n| level(&sp, n, &homotopy_residual(h, n))).collect();
    CheckReport { n_max, truncated: true, levels }
}

/// Result of a C∞ check: arities checked and the first failure found.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CInftyReport {
    pub cap: usize,
    pub pass: bool,
    /// `(n, x, y)` for the first shuffle `x⋈y` with `m_n(x⋈y) ≠ 0`.
    pub witness: Option<(usize, Vec<String>, Vec<String>)>,
}

/// Checks `m_n(x⋈y) = 0` for all basis words with `|x|+|y| = n ≤ cap`,
/// `n ≥ 2`, where `maps[k]` is the arity-`k+1` component.
pub fn check_cinfty_maps(space: &GradedSpace, maps: &[MultiMap], cap: usize) -> Result<CInftyReport> {
    let ch = space.field().characteristic();
    if ch != 0 && ch <= cap as u64 {
        return Err(Error::CharTooSmall { char: ch, cap });
    }
    for (k, m) in maps.iter().enumerate() {
        let n = k + 1;
        if n < 2 || n > cap || m.is_zero() {
            continue;
        }
        for r in 1..=n / 2 {
            for x in basis_words(space.dim(), r) {
                for y in basis_words(space.dim(), n - r) {
                    let s = shuffle(space, &x, &y, cap)?;
                    if !m.eval_bar(&s).is_zero() {
                        let names = |w: &[usize]| w.iter().map(|&i| space.name(i).to_string()).collect();
                        return Ok(CInftyReport { cap, pass: false, witness: Some((n, names(&x), names(&y))) });
                    }
                }
            }
        }
    }
    Ok(CInftyReport { cap, pass: true, witness: None })
}

/// C∞ check of an algebra's operations.
pub fn check_cinfty(a: &AInfinity, cap: usize) -> Result<CInftyReport> {
    check_cinfty_maps(a.space(), a.ops(), cap)
}
