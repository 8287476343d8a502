//! Graded spaces, elements, multilinear maps, tensor words and the bar
//! coalgebra.
//!
//! Koszul signs are produced only by [`apply_tensor_maps`] (and its special
//! case [`apply_tensor_slot`]) and by [`shuffle`]; [`MultiMap::eval`] is
//! sign-free.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{axpy, SparseVec};
use crate::field::{Field, Scalar};

/// Default cap on tensor word length.
pub const DEFAULT_WORD_CAP: usize = 6;

/// Word cap from `AINFTY_WORD_CAP`, falling back to [`DEFAULT_WORD_CAP`].
pub fn word_cap() -> usize {
    std::env::var("AINFTY_WORD_CAP")
        .ok()
        .and_then(|s| s.parse().ok())
        .filter(|&n: &usize| n >= 1)
        .unwrap_or(DEFAULT_WORD_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GradingMode {
    Z,
    Z2,
}

/// Finite basis with degrees. Basis order is fixed and drives every
/// deterministic choice downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    field: Field,
    mode: GradingMode,
    names: Vec<String>,
    degrees: Vec<i64>,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    pub fn new(field: Field, mode: GradingMode, basis: Vec<(String, i64)>) -> Result<GradedSpace> {
        let mut index = HashMap::new();
        let mut names = Vec::new();
        let mut degrees = Vec::new();
        for (i, (n, d)) in basis.into_iter().enumerate() {
            if mode == GradingMode::Z2 && !(d == 0 || d == 1) {
                return Err(Error::Input(format!("Z2 degree of {n} must be 0 or 1")));
            }
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::Input(format!("duplicate basis name {n}")));
            }
            names.push(n);
            degrees.push(d);
        }
        Ok(GradedSpace { field, mode, names, degrees, index })
    }

    /// Convenience constructor from string slices.
    pub fn from_basis(field: Field, mode: GradingMode, basis: &[(&str, i64)]) -> Result<Arc<GradedSpace>> {
        Ok(Arc::new(GradedSpace::new(
            field,
            mode,
            basis.iter().map(|(n, d)| (n.to_string(), *d)).collect(),
        )?))
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn mode(&self) -> GradingMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.degrees[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Parity of basis vector `i`.
    pub fn odd(&self, i: usize) -> bool {
        self.degrees[i].rem_euclid(2) == 1
    }

    /// Normalises a degree for this mode (mod 2 in Z2 mode).
    pub fn norm(&self, d: i64) -> i64 {
        match self.mode {
            GradingMode::Z => d,
            GradingMode::Z2 => d.rem_euclid(2),
        }
    }

    /// Basis indices of (normalised) degree `d`, in basis order.
    pub fn basis_in_degree(&self, d: i64) -> Vec<usize> {
        let d = self.norm(d);
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    /// Sorted distinct degrees present.
    pub fn degrees_present(&self) -> Vec<i64> {
        let mut ds: Vec<i64> = self.degrees.clone();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees.iter().copied().min()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.degrees.iter().copied().max()
    }

    /// Total degree of a word of basis indices (normalised).
    pub fn word_degree(&self, w: &[usize]) -> i64 {
        self.norm(w.iter().map(|&i| self.degrees[i]).sum())
    }

    /// Parity of the total degree of a word.
    pub fn word_odd(&self, w: &[usize]) -> bool {
        w.iter().filter(|&&i| self.odd(i)).count() % 2 == 1
    }
}

/// Sparse element of a graded space (the space is passed where needed).
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    coeffs: SparseVec,
}

impl Element {
    pub fn zero() -> Element {
        Element::default()
    }

    pub fn basis(field: Field, i: usize) -> Element {
        let mut coeffs = SparseVec::new();
        coeffs.insert(i, field.one());
        Element { coeffs }
    }

    pub fn from_vec(v: SparseVec) -> Element {
        Element { coeffs: v.into_iter().filter(|(_, x)| !x.is_zero()).collect() }
    }

    /// Builds `Σ c_k e_k` from `(index, small integer)` pairs.
    pub fn from_i64(field: Field, terms: &[(usize, i64)]) -> Element {
        let mut e = Element::zero();
        for (i, c) in terms {
            e.add_term(*i, &field.from_i64(*c));
        }
        e
    }

    pub fn coeffs(&self) -> &SparseVec {
        &self.coeffs
    }

    pub fn into_vec(self) -> SparseVec {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Option<&Scalar> {
        self.coeffs.get(&i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&usize, &Scalar)> {
        self.coeffs.iter()
    }

    pub fn support(&self) -> Vec<usize> {
        self.coeffs.keys().copied().collect()
    }

    pub fn add_term(&mut self, i: usize, c: &Scalar) {
        let mut t = SparseVec::new();
        t.insert(i, c.clone());
        axpy(&mut self.coeffs, &c.field().one(), &t);
    }

    /// `self += a · other`.
    pub fn axpy(&mut self, a: &Scalar, other: &Element) {
        axpy(&mut self.coeffs, a, &other.coeffs);
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut e = self.clone();
        e.add_assign(other);
        e
    }

    pub fn add_assign(&mut self, other: &Element) {
        if let Some(x) = other.coeffs.values().next() {
            axpy(&mut self.coeffs, &x.field().one(), &other.coeffs);
        }
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut e = self.clone();
        if let Some(x) = other.coeffs.values().next() {
            axpy(&mut e.coeffs, &-x.field().one(), &other.coeffs);
        }
        e
    }

    pub fn scale(&self, a: &Scalar) -> Element {
        Element { coeffs: crate::exactla::scale(&self.coeffs, a) }
    }

    pub fn neg(&self) -> Element {
        Element { coeffs: self.coeffs.iter().map(|(k, x)| (*k, -x)).collect() }
    }

    /// Degree when all supporting basis vectors share one; `None` for zero
    /// or inhomogeneous elements.
    pub fn degree(&self, space: &GradedSpace) -> Option<i64> {
        let mut it = self.coeffs.keys().map(|&i| space.degree(i));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Homogeneous (or zero).
    pub fn is_homogeneous(&self, space: &GradedSpace) -> bool {
        self.is_zero() || self.degree(space).is_some()
    }

    /// All components have even degree.
    pub fn is_even(&self, space: &GradedSpace) -> bool {
        self.coeffs.keys().all(|&i| !space.odd(i))
    }

    /// All components have odd degree.
    pub fn is_odd(&self, space: &GradedSpace) -> bool {
        self.coeffs.keys().all(|&i| space.odd(i))
    }

    /// Bar involution `(-1)^{|a|} a`, componentwise.
    pub fn bar(&self, space: &GradedSpace) -> Element {
        Element {
            coeffs: self.coeffs.iter().map(|(k, x)| (*k, x.clone().signed(space.odd(*k)))).collect(),
        }
    }

    /// Component of (normalised) degree `d`.
    pub fn component(&self, space: &GradedSpace, d: i64) -> Element {
        let d = space.norm(d);
        Element {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(k, _)| space.degree(**k) == d)
                .map(|(k, x)| (*k, x.clone()))
                .collect(),
        }
    }

    /// Degrees with a nonzero component.
    pub fn degrees(&self, space: &GradedSpace) -> Vec<i64> {
        let mut ds: Vec<i64> = self.coeffs.keys().map(|&i| space.degree(i)).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// Human-readable rendering such as `2*x1 - y`.
    pub fn display(&self, space: &GradedSpace) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|(k, x)| {
                if x.is_one() {
                    space.name(*k).to_string()
                } else {
                    format!("{}*{}", x, space.name(*k))
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

/// A word `[a_1|...|a_n]` of basis indices.
pub type TensorWord = Vec<usize>;

/// Sparse element of the truncated bar coalgebra.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BarElement {
    terms: BTreeMap<TensorWord, Scalar>,
}

impl BarElement {
    pub fn zero() -> BarElement {
        BarElement::default()
    }

    pub fn word(field: Field, w: TensorWord) -> BarElement {
        let mut b = BarElement::zero();
        b.add_term(w, &field.one());
        b
    }

    /// `[x]` for an element `x`.
    pub fn from_element(x: &Element) -> BarElement {
        let mut b = BarElement::zero();
        for (i, c) in x.iter() {
            b.add_term(vec![*i], c);
        }
        b
    }

    /// Plain tensor product `x_1 ⊗ ... ⊗ x_n`, expanded over basis words.
    pub fn tensor(xs: &[&Element]) -> BarElement {
        let mut acc: Vec<(TensorWord, Scalar)> = Vec::new();
        for (k, x) in xs.iter().enumerate() {
            if x.is_zero() {
                return BarElement::zero();
            }
            if k == 0 {
                acc = x.iter().map(|(i, c)| (vec![*i], c.clone())).collect();
                continue;
            }
            let mut next = Vec::with_capacity(acc.len() * x.coeffs.len());
            for (w, c) in &acc {
                for (i, d) in x.iter() {
                    let mut w2 = w.clone();
                    w2.push(*i);
                    next.push((w2, c * d));
                }
            }
            acc = next;
        }
        let mut b = BarElement::zero();
        for (w, c) in acc {
            b.add_term(w, &c);
        }
        b
    }

    pub fn terms(&self) -> &BTreeMap<TensorWord, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, w: TensorWord, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&w) {
            Some(x) => {
                let s = &*x + c;
                if s.is_zero() {
                    self.terms.remove(&w);
                } else {
                    *x = s;
                }
            }
            None => {
                self.terms.insert(w, c.clone());
            }
        }
    }

    pub fn axpy(&mut self, a: &Scalar, other: &BarElement) {
        for (w, c) in &other.terms {
            self.add_term(w.clone(), &(a * c));
        }
    }

    pub fn add(&self, other: &BarElement) -> BarElement {
        let mut b = self.clone();
        for (w, c) in &other.terms {
            b.add_term(w.clone(), c);
        }
        b
    }

    pub fn sub(&self, other: &BarElement) -> BarElement {
        let mut b = self.clone();
        for (w, c) in &other.terms {
            b.add_term(w.clone(), &-c);
        }
        b
    }

    pub fn scale(&self, a: &Scalar) -> BarElement {
        let mut b = BarElement::zero();
        b.axpy(a, self);
        b
    }

    /// Concatenation product `self ⊗ other` of words.
    pub fn concat(&self, other: &BarElement) -> BarElement {
        let mut b = BarElement::zero();
        for (u, c) in &self.terms {
            for (v, d) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                b.add_term(w, &(c * d));
            }
        }
        b
    }

    /// Length-one part as an element.
    pub fn project_len1(&self) -> Element {
        let mut e = Element::zero();
        for (w, c) in &self.terms {
            if w.len() == 1 {
                e.add_term(w[0], c);
            }
        }
        e
    }

    pub fn max_len(&self) -> usize {
        self.terms.keys().map(|w| w.len()).max().unwrap_or(0)
    }

    /// Drops words longer than `cap`.
    pub fn truncate(&self, cap: usize) -> BarElement {
        BarElement {
            terms: self.terms.iter().filter(|(w, _)| w.len() <= cap).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }
}

/// Homogeneous multilinear map `src^{⊗n} → tgt` given by structure
/// constants on basis tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiMap {
    arity: usize,
    degree: i64,
    src: Arc<GradedSpace>,
    tgt: Arc<GradedSpace>,
    entries: BTreeMap<Vec<usize>, Element>,
}

impl MultiMap {
    pub fn new(src: Arc<GradedSpace>, tgt: Arc<GradedSpace>, arity: usize, degree: i64) -> MultiMap {
        assert!(arity >= 1, "arity must be positive");
        MultiMap { arity, degree, src, tgt, entries: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn src(&self) -> &Arc<GradedSpace> {
        &self.src
    }

    pub fn tgt(&self) -> &Arc<GradedSpace> {
        &self.tgt
    }

    pub fn entries(&self) -> &BTreeMap<Vec<usize>, Element> {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Odd map degree.
    pub fn odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }

    /// Sets the value on a basis tuple, enforcing the degree contract.
    pub fn insert(&mut self, args: Vec<usize>, value: Element) -> Result<()> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        if args.iter().any(|&i| i >= self.src.dim()) || value.coeffs.keys().any(|&i| i >= self.tgt.dim()) {
            return Err(Error::Input("basis index out of range".into()));
        }
        let want = self.tgt.norm(self.src.word_degree(&args) + self.degree);
        for &k in value.coeffs.keys() {
            if self.tgt.degree(k) != want {
                return Err(Error::DegreeContract(format!(
                    "value on ({}) has a component {} of degree {} instead of {}",
                    args.iter().map(|&i| self.src.name(i)).collect::<Vec<_>>().join(","),
                    self.tgt.name(k),
                    self.tgt.degree(k),
                    want
                )));
            }
        }
        if value.is_zero() {
            self.entries.remove(&args);
        } else {
            self.entries.insert(args, value);
        }
        Ok(())
    }

    /// Adds `value` to the entry at `args`.
    pub fn accumulate(&mut self, args: Vec<usize>, value: &Element) -> Result<()> {
        let cur = self.entries.get(&args).cloned().unwrap_or_default();
        self.insert(args, cur.add(value))
    }

    /// Value on a basis tuple.
    pub fn eval_basis(&self, args: &[usize]) -> Element {
        self.entries.get(args).cloned().unwrap_or_default()
    }

    /// Multilinear evaluation with homogeneity and arity checks.
    pub fn eval(&self, args: &[&Element]) -> Result<Element> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, got: args.len() });
        }
        for (k, a) in args.iter().enumerate() {
            if !a.is_homogeneous(&self.src) {
                return Err(Error::Inhomogeneous(k));
            }
        }
        Ok(self.eval_multilinear(args))
    }

    /// Multilinear extension without homogeneity checks.
    pub fn eval_multilinear(&self, args: &[&Element]) -> Element {
        debug_assert_eq!(args.len(), self.arity);
        let mut out = Element::zero();
        if self.entries.is_empty() || args.iter().any(|a| a.is_zero()) {
            return out;
        }
        let combos: usize = args.iter().map(|a| a.coeffs.len()).product();
        if combos > self.entries.len() {
            'entries: for (key, val) in &self.entries {
                let mut c: Option<Scalar> = None;
                for (a, k) in args.iter().zip(key) {
                    match a.coeffs.get(k) {
                        Some(x) => c = Some(match c {
                            None => x.clone(),
                            Some(y) => y * x,
                        }),
                        None => continue 'entries,
                    }
                }
                out.axpy(&c.expect("arity is positive"), val);
            }
            return out;
        }
        let supports: Vec<Vec<(usize, &Scalar)>> =
            args.iter().map(|a| a.coeffs.iter().map(|(k, x)| (*k, x)).collect()).collect();
        let mut idx = vec![0usize; args.len()];
        let mut key = vec![0usize; args.len()];
        loop {
            for (j, s) in supports.iter().enumerate() {
                key[j] = s[idx[j]].0;
            }
            if let Some(val) = self.entries.get(&key[..]) {
                let mut c = supports[0][idx[0]].1.clone();
                for j in 1..args.len() {
                    c = c * supports[j][idx[j]].1;
                }
                out.axpy(&c, val);
            }
            let mut j = args.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < supports[j].len() {
                    break;
                }
                idx[j] = 0;
            }
        }
    }

    /// Applies the map to every word of matching length in `x`.
    pub fn eval_bar(&self, x: &BarElement) -> Element {
        let mut out = Element::zero();
        for (w, c) in x.terms() {
            if w.len() == self.arity {
                if let Some(v) = self.entries.get(w) {
                    out.axpy(c, v);
                }
            }
        }
        out
    }

    /// Removes entries, keeping arity and degree.
    pub fn cleared(&self) -> MultiMap {
        MultiMap::new(self.src.clone(), self.tgt.clone(), self.arity, self.degree)
    }

    /// Entries that differ from `other`, as `(args, self - other)`.
    pub fn difference(&self, other: &MultiMap) -> MultiMap {
        let mut d = self.clone();
        for (k, v) in &other.entries {
            d.accumulate(k.clone(), &v.neg()).expect("same shape");
        }
        d
    }

    /// Linear map matrix (arity 1 only), rows indexed by target basis.
    pub fn to_matrix(&self) -> crate::exactla::Matrix {
        assert_eq!(self.arity, 1, "matrix of a non-linear map");
        let mut m = crate::exactla::Matrix::zero(self.src.field(), self.tgt.dim(), self.src.dim());
        for (k, v) in &self.entries {
            for (i, c) in v.iter() {
                m.set(*i, k[0], c.clone());
            }
        }
        m
    }
}

/// A tensor factor: the identity or a structure map.
#[derive(Clone, Copy, Debug)]
pub enum Slot<'a> {
    Id,
    Map(&'a MultiMap),
}

impl Slot<'_> {
    fn arity(&self) -> usize {
        match self {
            Slot::Id => 1,
            Slot::Map(m) => m.arity,
        }
    }

    fn odd(&self) -> bool {
        match self {
            Slot::Id => false,
            Slot::Map(m) => m.odd(),
        }
    }
}

/// Applies `m_1 ⊗ ... ⊗ m_k` to a basis word with Koszul's rule: factor `j`
/// contributes `(-1)^{|m_j| · (degree of inputs consumed before it)}`.
pub fn apply_tensor_maps(space: &GradedSpace, slots: &[Slot], word: &[usize]) -> Result<BarElement> {
    let total: usize = slots.iter().map(|s| s.arity()).sum();
    if total != word.len() {
        return Err(Error::ArityMismatch { expected: total, got: word.len() });
    }
    let mut odd = false;
    let mut pos = 0;
    let mut before_odd = false;
    let mut outputs: Vec<Element> = Vec::with_capacity(slots.len());
    for s in slots {
        if s.odd() && before_odd {
            odd = !odd;
        }
        let inputs = &word[pos..pos + s.arity()];
        let out = match s {
            Slot::Id => Element::basis(space.field(), inputs[0]),
            Slot::Map(m) => m.eval_basis(inputs),
        };
        if out.is_zero() {
            return Ok(BarElement::zero());
        }
        outputs.push(out);
        before_odd ^= space.word_odd(inputs);
        pos += s.arity();
    }
    let refs: Vec<&Element> = outputs.iter().collect();
    let b = BarElement::tensor(&refs);
    Ok(if odd { b.scale(&-space.field().one()) } else { b })
}

/// `1^{⊗r} ⊗ m ⊗ 1^{⊗t}` applied to a basis word, with sign
/// `(-1)^{|m|(|a_1|+...+|a_r|)}`.
pub fn apply_tensor_slot(m: &MultiMap, word: &[usize], r: usize) -> Result<BarElement> {
    if r + m.arity > word.len() {
        return Err(Error::PositionOutOfRange { position: r, len: word.len() });
    }
    let t = word.len() - r - m.arity;
    let mut slots = vec![Slot::Id; r];
    slots.push(Slot::Map(m));
    slots.extend(std::iter::repeat_n(Slot::Id, t));
    apply_tensor_maps(m.src(), &slots, word)
}

/// Coderivation lift of `ops = [b_1, b_2, ...]` applied to `x`.
pub fn bar_coderivation(ops: &[MultiMap], x: &BarElement) -> BarElement {
    let mut out = BarElement::zero();
    for (w, c) in x.terms() {
        let n = w.len();
        for m in ops {
            let s = m.arity();
            if s > n || m.is_zero() {
                continue;
            }
            for r in 0..=n - s {
                let y = apply_tensor_slot(m, w, r).expect("slot in range");
                out.axpy(c, &y);
            }
        }
    }
    out
}

/// `Δ[a_1..a_n] = Σ_{0<r<n} [a_1..a_r] ⊗ [a_{r+1}..a_n]`.
pub fn comultiply(x: &BarElement) -> BTreeMap<(TensorWord, TensorWord), Scalar> {
    let mut out: BTreeMap<(TensorWord, TensorWord), Scalar> = BTreeMap::new();
    for (w, c) in x.terms() {
        for r in 1..w.len() {
            let key = (w[..r].to_vec(), w[r..].to_vec());
            let v = match out.remove(&key) {
                Some(d) => d + c,
                None => c.clone(),
            };
            if !v.is_zero() {
                out.insert(key, v);
            }
        }
    }
    out
}

/// Signed shuffle product of two words.
pub fn shuffle(space: &GradedSpace, x: &[usize], y: &[usize], cap: usize) -> Result<BarElement> {
    let (r, s) = (x.len(), y.len());
    if r + s > cap {
        return Err(Error::WordCapExceeded { len: r + s, cap });
    }
    let mut out = BarElement::zero();
    let n = r + s;
    // choose the positions of x's letters as an increasing r-subset
    let mut pos: Vec<usize> = (0..r).collect();
    loop {
        let mut word = Vec::with_capacity(n);
        let mut odd = false;
        let (mut i, mut j) = (0, 0);
        for k in 0..n {
            if i < r && pos[i] == k {
                word.push(x[i]);
                i += 1;
            } else {
                // y[j] jumps over the x letters still to come
                if space.odd(y[j]) {
                    for &xi in &x[i..] {
                        if space.odd(xi) {
                            odd = !odd;
                        }
                    }
                }
                word.push(y[j]);
                j += 1;
            }
        }
        out.add_term(word, &space.field().one().signed(odd));
        // next r-subset in lexicographic order
        let mut k = r;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if pos[k] < n - r + k {
                pos[k] += 1;
                for l in k + 1..r {
                    pos[l] = pos[l - 1] + 1;
                }
                break;
            }
        }
        if r == 0 {
            return Ok(out);
        }
    }
}

/// Bilinear extension of [`shuffle`].
pub fn shuffle_bar(space: &GradedSpace, x: &BarElement, y: &BarElement, cap: usize) -> Result<BarElement> {
    let mut out = BarElement::zero();
    for (u, c) in x.terms() {
        for (v, d) in y.terms() {
            out.axpy(&(c * d), &shuffle(space, u, v, cap)?);
        }
    }
    Ok(out)
}

/// All basis words of length `n`.
pub fn basis_words(dim: usize, n: usize) -> Vec<TensorWord> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * dim);
        for w in &out {
            for i in 0..dim {
                let mut w2 = w.clone();
                w2.push(i);
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Arc<GradedSpace> {
        GradedSpace::from_basis(Field::Q, GradingMode::Z, &[("a", 0), ("b", 1), ("c", 1)]).unwrap()
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(GradedSpace::from_basis(Field::Q, GradingMode::Z, &[("a", 0), ("a", 1)]).is_err());
        assert!(GradedSpace::from_basis(Field::Q, GradingMode::Z2, &[("a", 2)]).is_err());
    }

    #[test]
    fn degree_contract_enforced() {
        let s = space();
        let mut m = MultiMap::new(s.clone(), s.clone(), 1, 1);
        assert!(m.insert(vec![0], Element::basis(Field::Q, 1)).is_ok());
        assert!(matches!(m.insert(vec![1], Element::basis(Field::Q, 2)), Err(Error::DegreeContract(_))));
    }

    #[test]
    fn slot_sign_counts_prefix_degree() {
        let s = space();
        let mut m = MultiMap::new(s.clone(), s.clone(), 1, 1);
        m.insert(vec![0], Element::basis(Field::Q, 1)).unwrap();
        let y = apply_tensor_slot(&m, &[0], 0).unwrap();
        assert_eq!(y, BarElement::word(Field::Q, vec![1]));
        let y = apply_tensor_slot(&m, &[1, 0], 1).unwrap();
        assert_eq!(y, BarElement::word(Field::Q, vec![1, 1]).scale(&Field::Q.from_i64(-1)));
        assert!(apply_tensor_slot(&m, &[0], 1).is_err());
    }

    #[test]
    fn comultiply_small_words() {
        let one = Field::Q.one();
        assert!(comultiply(&BarElement::word(Field::Q, vec![0])).is_empty());
        let d = comultiply(&BarElement::word(Field::Q, vec![0, 1]));
        assert_eq!(d.into_iter().collect::<Vec<_>>(), vec![((vec![0], vec![1]), one.clone())]);
        let d = comultiply(&BarElement::word(Field::Q, vec![0, 1, 2]));
        assert_eq!(d.len(), 2);
        assert!(d.contains_key(&(vec![0], vec![1, 2])) && d.contains_key(&(vec![0, 1], vec![2])));
    }

    #[test]
    fn shuffle_two_letters() {
        let s = space();
        let q = Field::Q;
        let ab = shuffle(&s, &[0], &[1], 6).unwrap();
        let want = BarElement::word(q, vec![0, 1]).add(&BarElement::word(q, vec![1, 0]));
        assert_eq!(ab, want);
        let bc = shuffle(&s, &[1], &[2], 6).unwrap();
        let want = BarElement::word(q, vec![1, 2]).sub(&BarElement::word(q, vec![2, 1]));
        assert_eq!(bc, want);
        assert!(matches!(shuffle(&s, &[0, 0, 0], &[1, 1, 1, 1], 6), Err(Error::WordCapExceeded { .. })));
    }

    #[test]
    fn eval_is_multilinear() {
        let s = space();
        let q = Field::Q;
        let mut m = MultiMap::new(s.clone(), s.clone(), 2, 1);
        m.insert(vec![0, 0], Element::from_i64(q, &[(1, 1), (2, 3)])).unwrap();
        let a = Element::basis(q, 0);
        assert!(m.eval(&[&Element::zero(), &a]).unwrap().is_zero());
        let two_a = a.scale(&q.from_i64(2));
        assert_eq!(m.eval(&[&two_a, &a]).unwrap(), m.eval(&[&a, &a]).unwrap().scale(&q.from_i64(2)));
        let mixed = Element::from_i64(q, &[(0, 1), (1, 1)]);
        assert_eq!(m.eval(&[&mixed, &a]), Err(Error::Inhomogeneous(0)));
    }
}
