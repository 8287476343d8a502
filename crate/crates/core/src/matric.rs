//! Matrices with entries in an A∞-algebra, the tensor-matrix product `⊙`
//! and the induced matric operations `b^{(m)}_n(a_1,…,a_n) = b_n(a_1⊙…⊙a_n)`.
//!
//! Matrices may be rectangular, so a column vector is an `m × 1` matrix and
//! the module action on columns is the same code path. Entries may have
//! different degrees; operations act entrywise, with no extra signs.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::ainfty::{AInfHomotopy, AInfMorphism, AInfinity};
use crate::error::{Error, Result};
use crate::graded::{BarElement, Element, GradedSpace, MultiMap};

/// Sparse `rows × cols` matrix over the algebra; zero entries are not stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatricElement {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Element>,
}

impl MatricElement {
    pub fn zero(rows: usize, cols: usize) -> MatricElement {
        MatricElement { rows, cols, entries: BTreeMap::new() }
    }

    pub fn square(m: usize) -> MatricElement {
        MatricElement::zero(m, m)
    }

    pub fn column(entries: Vec<Element>) -> MatricElement {
        let mut x = MatricElement::zero(entries.len(), 1);
        for (i, e) in entries.into_iter().enumerate() {
            x.set(i, 0, e);
        }
        x
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Element> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Option<&Element> {
        self.entries.get(&(i, j))
    }

    /// Entry `(i,j)`, zero when absent.
    pub fn get(&self, i: usize, j: usize) -> Element {
        self.entries.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, e: Element) {
        assert!(i < self.rows && j < self.cols, "entry ({i},{j}) outside {}x{}", self.rows, self.cols);
        if e.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), e);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_strict_upper(&self) -> bool {
        self.entries.keys().all(|(i, j)| i < j)
    }

    fn zip(&self, other: &MatricElement, f: impl Fn(&Element, &Element) -> Element) -> MatricElement {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "matrix shapes differ");
        let mut out = MatricElement::zero(self.rows, self.cols);
        let zero = Element::zero();
        for k in self.entries.keys().chain(other.entries.keys()) {
            if out.entries.contains_key(k) {
                continue;
            }
            let x = self.entries.get(k).unwrap_or(&zero);
            let y = other.entries.get(k).unwrap_or(&zero);
            out.set(k.0, k.1, f(x, y));
        }
        out
    }

    pub fn add(&self, other: &MatricElement) -> MatricElement {
        self.zip(other, |x, y| x.add(y))
    }

    pub fn sub(&self, other: &MatricElement) -> MatricElement {
        self.zip(other, |x, y| x.sub(y))
    }

    pub fn map_entries(&self, f: impl Fn(&Element) -> Element) -> MatricElement {
        let mut out = MatricElement::zero(self.rows, self.cols);
        for ((i, j), e) in &self.entries {
            out.set(*i, *j, f(e));
        }
        out
    }

    /// Entrywise bar involution.
    pub fn bar(&self, space: &GradedSpace) -> MatricElement {
        self.map_entries(|e| e.bar(space))
    }

    /// `≈`: equal in every entry except the top-right corner.
    pub fn approx(&self, other: &MatricElement) -> bool {
        let corner = (0, self.cols.saturating_sub(1));
        (self.rows, self.cols) == (other.rows, other.cols)
            && self.entries.iter().filter(|(k, _)| **k != corner).eq(other.entries.iter().filter(|(k, _)| **k != corner))
    }

    /// Rows `0..r` and columns `0..c`.
    pub fn block(&self, r: usize, c: usize) -> MatricElement {
        let mut out = MatricElement::zero(r, c);
        for ((i, j), e) in &self.entries {
            if *i < r && *j < c {
                out.set(*i, *j, e.clone());
            }
        }
        out
    }

    /// Column `j` as an `rows × 1` matrix.
    pub fn column_of(&self, j: usize) -> MatricElement {
        let mut out = MatricElement::zero(self.rows, 1);
        for ((i, k), e) in &self.entries {
            if *k == j {
                out.set(*i, 0, e.clone());
            }
        }
        out
    }

    /// `(a x; 0 0)` for a square `a` and a column `x`.
    pub fn extend_by_column(&self, x: &MatricElement) -> Result<MatricElement> {
        if self.rows != self.cols || x.rows != self.rows || x.cols != 1 {
            return Err(Error::SizeMismatch("expected a square matrix and a matching column".into()));
        }
        let m = self.rows;
        let mut out = MatricElement::square(m + 1);
        for ((i, j), e) in &self.entries {
            out.set(*i, *j, e.clone());
        }
        for ((i, _), e) in &x.entries {
            out.set(*i, m, e.clone());
        }
        Ok(out)
    }

    /// Entries of row `i`, in column order.
    fn row(&self, i: usize) -> impl Iterator<Item = (usize, &Element)> {
        self.entries.range((i, 0)..(i + 1, 0)).map(|((_, j), e)| (*j, e))
    }

    pub fn display(&self, space: &GradedSpace) -> String {
        self.entries
            .iter()
            .map(|((i, j), e)| format!("({i},{j}): {}", e.display(space)))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

fn check_chain(args: &[&MatricElement]) -> Result<()> {
    for w in args.windows(2) {
        if w[0].cols != w[1].rows {
            return Err(Error::SizeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                w[0].rows, w[0].cols, w[1].rows, w[1].cols
            )));
        }
    }
    Ok(())
}

/// Walks every index path `i_0, …, i_n` through the chain, calling `f` with
/// the endpoints and the entries met on the way.
fn for_each_path<'a>(args: &[&'a MatricElement], mut f: impl FnMut(usize, usize, &[&'a Element])) {
    fn go<'a>(
        args: &[&'a MatricElement],
        start: usize,
        cur: usize,
        acc: &mut Vec<&'a Element>,
        f: &mut impl FnMut(usize, usize, &[&'a Element]),
    ) {
        let p = acc.len();
        if p == args.len() {
            f(start, cur, acc);
            return;
        }
        for (j, e) in args[p].row(cur) {
            acc.push(e);
            go(args, start, j, acc, f);
            acc.pop();
        }
    }
    let Some(first) = args.first() else { return };
    let mut acc = Vec::with_capacity(args.len());
    for i in 0..first.rows {
        go(args, i, i, &mut acc, &mut f);
    }
}

/// `a_1 ⊙ … ⊙ a_n` as a matrix of tensors: `(i,j) ↦ Σ a_{i k_1} ⊗ … ⊗ a_{k_{n-1} j}`.
pub fn odot(args: &[&MatricElement]) -> Result<BTreeMap<(usize, usize), BarElement>> {
    check_chain(args)?;
    let mut out: BTreeMap<(usize, usize), BarElement> = BTreeMap::new();
    for_each_path(args, |i, j, es| {
        let t = BarElement::tensor(es);
        let slot = out.entry((i, j)).or_default();
        *slot = slot.add(&t);
    });
    out.retain(|_, v| !v.is_zero());
    Ok(out)
}

/// `φ(a_1 ⊙ … ⊙ a_n)` with `φ` applied entrywise.
pub fn matric_eval(map: &MultiMap, args: &[&MatricElement]) -> Result<MatricElement> {
    if args.len() != map.arity() {
        return Err(Error::ArityMismatch { expected: map.arity(), got: args.len() });
    }
    check_chain(args)?;
    let (rows, cols) = (args[0].rows, args[args.len() - 1].cols);
    let mut acc: BTreeMap<(usize, usize), Element> = BTreeMap::new();
    for_each_path(args, |i, j, es| {
        let v = map.eval_multilinear(es);
        if !v.is_zero() {
            acc.entry((i, j)).or_default().add_assign(&v);
        }
    });
    let mut out = MatricElement::zero(rows, cols);
    for ((i, j), e) in acc {
        out.set(i, j, e);
    }
    Ok(out)
}

/// One block of matrix arguments in a matric twisted sum.
#[derive(Clone, Copy, Debug)]
pub enum MBlock<'a> {
    /// `x^{⊙k}` for every `k ≥ 0`; square.
    Pow(&'a MatricElement),
    One(&'a MatricElement),
}

/// Matric analogue of [`crate::twist::series`]: `Σ maps[n-1](args)` over
/// all repetition counts. A strictly upper triangular `s × s` power block
/// contributes at most `s - 1` factors.
pub fn matric_series(maps: &[MultiMap], blocks: &[MBlock]) -> Result<MatricElement> {
    fn shape(blocks: &[MBlock]) -> Result<(usize, usize)> {
        let mut dims: Vec<(usize, usize)> = Vec::new();
        for b in blocks {
            let x = match b {
                MBlock::Pow(x) => {
                    if x.rows != x.cols {
                        return Err(Error::SizeMismatch("power block must be square".into()));
                    }
                    x
                }
                MBlock::One(x) => x,
            };
            if let Some(&(_, c)) = dims.last() {
                if c != x.rows {
                    return Err(Error::SizeMismatch("blocks do not chain".into()));
                }
            }
            dims.push((x.rows, x.cols));
        }
        match (dims.first(), dims.last()) {
            (Some(a), Some(b)) => Ok((a.0, b.1)),
            _ => Err(Error::Input("empty block list".into())),
        }
    }
    fn go<'a>(
        maps: &[MultiMap],
        blocks: &[MBlock<'a>],
        ones_left: usize,
        args: &mut Vec<&'a MatricElement>,
        out: &mut MatricElement,
    ) -> Result<()> {
        let Some((first, rest)) = blocks.split_first() else {
            let n = args.len();
            if n >= 1 && n <= maps.len() {
                *out = out.add(&matric_eval(&maps[n - 1], args)?);
            }
            return Ok(());
        };
        match *first {
            MBlock::One(x) => {
                args.push(x);
                go(maps, rest, ones_left - 1, args, out)?;
                args.pop();
            }
            MBlock::Pow(x) => {
                let base = args.len();
                let mut top = maps.len().saturating_sub(base + ones_left);
                if x.is_zero() {
                    top = 0;
                } else if x.is_strict_upper() {
                    top = top.min(x.rows.saturating_sub(1));
                }
                for k in 0..=top {
                    if k > 0 {
                        args.push(x);
                    }
                    go(maps, rest, ones_left, args, out)?;
                }
                args.truncate(base);
            }
        }
        Ok(())
    }
    let (rows, cols) = shape(blocks)?;
    let mut out = MatricElement::zero(rows, cols);
    let ones = blocks.iter().filter(|b| matches!(b, MBlock::One(_))).count();
    go(maps, blocks, ones, &mut Vec::new(), &mut out)?;
    Ok(out)
}

/// `∂_a a = Σ_{n≥1} b_n(a^{⊙n})`.
pub fn curvature(ops: &[MultiMap], a: &MatricElement) -> Result<MatricElement> {
    matric_series(ops, &[MBlock::Pow(a), MBlock::One(a)])
}

/// `∂_a x = Σ_{n≥0} b_{n+1}(a^{⊙n} ⊙ x)` for a column (or any matrix) `x`.
pub fn column_action(ops: &[MultiMap], a: &MatricElement, x: &MatricElement) -> Result<MatricElement> {
    matric_series(ops, &[MBlock::Pow(a), MBlock::One(x)])
}

/// Checks `∂_ã ã = (∂_a a  ∂_a x; 0 0)` for `ã = (a x; 0 0)`.
pub fn check_block_identity(ops: &[MultiMap], a: &MatricElement, x: &MatricElement) -> Result<()> {
    let big = a.extend_by_column(x)?;
    let lhs = curvature(ops, &big)?;
    let rhs = curvature(ops, a)?.extend_by_column(&column_action(ops, a, x)?)?;
    if lhs != rhs {
        return Err(Error::CheckFailed("block identity for the column action fails".into()));
    }
    Ok(())
}

/// The space `M_m(A)` (or its strictly upper part) with one basis vector
/// per matrix cell and basis vector of `A`.
#[derive(Clone, Debug)]
pub struct MatricSpace {
    base: Arc<GradedSpace>,
    space: Arc<GradedSpace>,
    m: usize,
    strict: bool,
    cells: Vec<(usize, usize, usize)>,
    index: BTreeMap<(usize, usize, usize), usize>,
}

impl MatricSpace {
    pub fn new(base: Arc<GradedSpace>, m: usize, strict: bool) -> Result<MatricSpace> {
        let mut cells = Vec::new();
        let mut basis = Vec::new();
        for i in 0..m {
            for j in 0..m {
                if strict && i >= j {
                    continue;
                }
                for k in 0..base.dim() {
                    cells.push((i, j, k));
                    basis.push((format!("{}@{i}{j}", base.name(k)), base.degree(k)));
                }
            }
        }
        let index = cells.iter().enumerate().map(|(n, c)| (*c, n)).collect();
        let space = Arc::new(GradedSpace::new(base.field(), base.mode(), basis)?);
        Ok(MatricSpace { base, space, m, strict, cells, index })
    }

    pub fn base(&self) -> &Arc<GradedSpace> {
        &self.base
    }

    pub fn space(&self) -> &Arc<GradedSpace> {
        &self.space
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    pub fn to_element(&self, a: &MatricElement) -> Result<Element> {
        if (a.rows, a.cols) != (self.m, self.m) {
            return Err(Error::SizeMismatch(format!("expected a {0}x{0} matrix", self.m)));
        }
        let mut out = Element::zero();
        for ((i, j), e) in &a.entries {
            for (k, c) in e.iter() {
                let n = self.index.get(&(*i, *j, *k)).ok_or_else(|| {
                    Error::Input(format!("entry ({i},{j}) outside the strictly upper part"))
                })?;
                out.add_term(*n, c);
            }
        }
        Ok(out)
    }

    pub fn from_element(&self, x: &Element) -> MatricElement {
        let mut acc: BTreeMap<(usize, usize), Element> = BTreeMap::new();
        for (n, c) in x.iter() {
            let (i, j, k) = self.cells[*n];
            acc.entry((i, j)).or_default().add_term(k, c);
        }
        let mut out = MatricElement::square(self.m);
        for ((i, j), e) in acc {
            out.set(i, j, e);
        }
        out
    }

    fn cell_paths(&self, n: usize) -> Vec<Vec<usize>> {
        // index sequences i_0, …, i_n, increasing in the strict case
        let mut paths: Vec<Vec<usize>> = (0..self.m).map(|i| vec![i]).collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for p in &paths {
                let last = *p.last().expect("nonempty");
                let lo = if self.strict { last + 1 } else { 0 };
                for j in lo..self.m {
                    let mut q = p.clone();
                    q.push(j);
                    next.push(q);
                }
            }
            paths = next;
        }
        paths
    }
}

/// Lift `φ ↦ φ^{(m)}` of a multilinear map between matric spaces.
pub fn lift_map(src: &MatricSpace, tgt: &MatricSpace, map: &MultiMap) -> MultiMap {
    assert_eq!(src.m, tgt.m, "matric sizes differ");
    let n = map.arity();
    let mut out = MultiMap::new(src.space.clone(), tgt.space.clone(), n, map.degree());
    if map.is_zero() {
        return out;
    }
    for path in src.cell_paths(n) {
        let (i0, iend) = (path[0], path[n]);
        for (args, v) in map.entries() {
            let key: Vec<usize> = (0..n).map(|p| src.index[&(path[p], path[p + 1], args[p])]).collect();
            let mut val = Element::zero();
            for (k, c) in v.iter() {
                val.add_term(tgt.index[&(i0, iend, *k)], c);
            }
            out.insert(key, val).expect("lifted entries keep degrees");
        }
    }
    out
}

/// `(M_m(A), b^{(m)})`, or `M_m^+(A)` when `strict`.
pub fn lift_algebra(a: &AInfinity, m: usize, strict: bool) -> Result<(MatricSpace, Arc<AInfinity>)> {
    let ms = MatricSpace::new(a.space().clone(), m, strict)?;
    let ops = a.ops().iter().map(|op| lift_map(&ms, &ms, op)).collect();
    let lifted = AInfinity::new(ms.space.clone(), ops, a.declared_dga())?;
    Ok((ms, Arc::new(lifted)))
}

/// `f^{(m)}` between already lifted algebras.
pub fn lift_morphism(
    f: &AInfMorphism,
    src: &(MatricSpace, Arc<AInfinity>),
    tgt: &(MatricSpace, Arc<AInfinity>),
) -> Result<AInfMorphism> {
    let comps = f.comps().iter().map(|c| lift_map(&src.0, &tgt.0, c)).collect();
    AInfMorphism::new(src.1.clone(), tgt.1.clone(), comps)
}

/// `h^{(m)}` between the lifted morphisms.
pub fn lift_homotopy(
    h: &AInfHomotopy,
    src: &(MatricSpace, Arc<AInfinity>),
    tgt: &(MatricSpace, Arc<AInfinity>),
) -> Result<AInfHomotopy> {
    let f = lift_morphism(h.from_f(), src, tgt)?;
    let g = lift_morphism(h.to_g(), src, tgt)?;
    let comps = h.comps().iter().map(|c| lift_map(&src.0, &tgt.0, c)).collect();
    AInfHomotopy::new(f, g, comps)
}
