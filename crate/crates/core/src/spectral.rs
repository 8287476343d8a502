//! Spectral sequence of a filtered cochain complex, and its specialisation
//! to a Z-graded A∞-algebra twisted by an element of positive degree.
//!
//! The generic engine sees a basis carrying a filtration weight and a
//! parity, and a square-zero matrix that never lowers weights. `F^p` is
//! spanned by the basis vectors of weight `≥ p`, so `Gr^p` is spanned by
//! those of weight `p`. Page `r` stores, for every `(p, q̄)`, the spaces
//! `Z_r ⊇ B_r` inside `Gr^p` and a lift in `F^p` for each basis vector of
//! `Z_r`:
//!
//! * `Z_r = { x : some lift x̃ ∈ F^p has d x̃ ∈ F^{p+r} }`,
//! * `B_r = { (d ỹ)_p : ỹ ∈ F^{p-r+1}, d ỹ ∈ F^p }`,
//! * `d_r [x] = [(d x̃)_{p+r}]`.
//!
//! For a twisted algebra the weight is the degree, so `Gr^p = A^p` and only
//! `q̄ = 0` is populated. [`specialized_page`] recomputes the same pages from
//! matric column actions of `h^{(m)}` without using the filtration.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ainfty::{AInfMorphism, AInfinity};
use crate::error::{Error, Result};
use crate::exactla::{coordinates, echelon_basis, kernel_basis, solve, Matrix, SparseVec, Subquotient};
use crate::field::Field;
use crate::graded::{Element, GradingMode};
use crate::massey::{validate, Class, DefiningSystem};
use crate::matric::{column_action, MatricElement};
use crate::par::{map_slice, Exec};
use crate::transfer::TransferData;
use crate::twist::{induced_map, matrix_of, TwistingElement};

/// A finite-dimensional Z2-graded cochain complex with a filtration split
/// by its basis.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    field: Field,
    names: Vec<String>,
    weights: Vec<i64>,
    odd: Vec<bool>,
    d: Matrix,
}

impl FilteredComplex {
    /// Checks that `d` flips parity, never lowers the weight and squares to zero.
    pub fn new(field: Field, names: Vec<String>, weights: Vec<i64>, odd: Vec<bool>, d: Matrix) -> Result<FilteredComplex> {
        let n = weights.len();
        if names.len() != n || odd.len() != n || d.rows() != n || d.cols() != n {
            return Err(Error::SizeMismatch("basis data and differential disagree in size".into()));
        }
        for i in 0..n {
            for j in d.row(i).keys() {
                if weights[i] < weights[*j] {
                    return Err(Error::Input(format!("differential lowers the filtration at {}", names[*j])));
                }
                if odd[i] == odd[*j] {
                    return Err(Error::Input(format!("differential preserves parity at {}", names[*j])));
                }
            }
        }
        if !d.mul(&d).is_zero() {
            return Err(Error::CheckFailed("differential does not square to zero".into()));
        }
        Ok(FilteredComplex { field, names, weights, odd, d })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.weights[i]
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.odd[i]
    }

    pub fn d(&self) -> &Matrix {
        &self.d
    }

    /// Smallest and largest weight present.
    pub fn weight_range(&self) -> Option<(i64, i64)> {
        Some((*self.weights.iter().min()?, *self.weights.iter().max()?))
    }

    /// A page index from which every page equals `E_∞`.
    pub fn stable_r(&self) -> usize {
        self.weight_range().map_or(1, |(lo, hi)| (hi - lo + 1) as usize)
    }

    /// Basis vectors with weight in `[lo, hi)` (`hi = None` for no upper end) and the given parity.
    fn select(&self, lo: i64, hi: Option<i64>, odd: bool) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| self.odd[i] == odd && self.weights[i] >= lo && hi.is_none_or(|h| self.weights[i] < h))
            .collect()
    }

    /// Component of weight `p`.
    pub fn graded(&self, v: &SparseVec, p: i64) -> SparseVec {
        v.iter().filter(|(i, _)| self.weights[**i] == p).map(|(i, c)| (*i, c.clone())).collect()
    }

    /// Lowest weight in the support, `None` for zero.
    pub fn min_weight(&self, v: &SparseVec) -> Option<i64> {
        v.keys().map(|i| self.weights[*i]).min()
    }

    /// Vectors supported on `dom` whose image has no component on `rows`.
    fn constrained_kernel(&self, dom: &[usize], rows: &[usize]) -> Result<Vec<SparseVec>> {
        let unit = |j: usize| -> SparseVec { [(j, self.field.one())].into_iter().collect() };
        if rows.is_empty() {
            return Ok(dom.iter().map(|&j| unit(j)).collect());
        }
        let mut colpos = vec![None; self.dim()];
        for (k, &j) in dom.iter().enumerate() {
            colpos[j] = Some(k);
        }
        let mut sub = Matrix::zero(self.field, rows.len(), dom.len());
        for (ri, &i) in rows.iter().enumerate() {
            for (j, c) in self.d.row(i) {
                if let Some(k) = colpos[*j] {
                    sub.set(ri, k, c.clone());
                }
            }
        }
        Ok(kernel_basis(&sub)?
            .into_iter()
            .map(|v| v.into_iter().map(|(k, c)| (dom[k], c)).collect())
            .collect())
    }

    /// Echelon basis of the weight-`p` parts of `span(vecs)`, each paired
    /// with an element of the span having exactly that weight-`p` part.
    fn split_graded(&self, p: i64, vecs: &[SparseVec]) -> Result<(Vec<SparseVec>, Vec<SparseVec>)> {
        let n = self.dim();
        let order: Vec<usize> =
            (0..n).filter(|&i| self.weights[i] == p).chain((0..n).filter(|&i| self.weights[i] != p)).collect();
        let g = order.iter().take_while(|&&i| self.weights[i] == p).count();
        let mut pos = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            pos[i] = k;
        }
        let permuted: Vec<SparseVec> =
            vecs.iter().map(|v| v.iter().map(|(i, c)| (pos[*i], c.clone())).collect()).collect();
        let (rows, pivots) = echelon_basis(self.field, n, &permuted)?;
        let mut z = Vec::new();
        let mut lifts = Vec::new();
        for (row, piv) in rows.into_iter().zip(pivots) {
            if piv < g {
                let lift: SparseVec = row.into_iter().map(|(k, c)| (order[k], c)).collect();
                z.push(self.graded(&lift, p));
                lifts.push(lift);
            }
        }
        Ok((z, lifts))
    }

    /// `Z_r` in `Gr^p` of the given total parity, with lifts.
    fn z_space(&self, p: i64, odd: bool, r: usize) -> Result<(Vec<SparseVec>, Vec<SparseVec>)> {
        let dom = self.select(p, None, odd);
        let rows = self.select(p, Some(p.saturating_add(r as i64)), !odd);
        let ker = self.constrained_kernel(&dom, &rows)?;
        self.split_graded(p, &ker)
    }

    /// `B_r` in `Gr^p` of the given total parity.
    fn b_space(&self, p: i64, odd: bool, r: usize) -> Result<Vec<SparseVec>> {
        let lo = p.saturating_sub(r as i64).saturating_add(1);
        let dom = self.select(lo, None, !odd);
        let rows = self.select(lo, Some(p), odd);
        let imgs: Vec<SparseVec> = self
            .constrained_kernel(&dom, &rows)?
            .iter()
            .map(|y| self.graded(&self.d.mul_vec(y), p))
            .collect();
        Ok(echelon_basis(self.field, self.dim(), &imgs)?.0)
    }

    /// Basis of the lifts that may be added to a lift in `Z_r^p` without
    /// changing its class: `δ ∈ F^{p+1}` with `d δ ∈ F^{p+r}`.
    pub fn lift_ambiguity(&self, r: usize, p: i64, odd: bool) -> Result<Vec<SparseVec>> {
        let dom = self.select(p + 1, None, odd);
        let rows = self.select(p + 1, Some(p.saturating_add(r as i64)), !odd);
        self.constrained_kernel(&dom, &rows)
    }

    /// Total cohomology dimensions, even then odd.
    pub fn cohomology_dims(&self) -> Result<[usize; 2]> {
        let block = |odd: bool| -> Matrix {
            let cols: Vec<SparseVec> = (0..self.dim()).filter(|&j| self.odd[j] == odd).map(|j| self.d.column(j)).collect();
            Matrix::from_columns(self.field, self.dim(), &cols)
        };
        let (even, odd) = (block(false), block(true));
        let (re, ro) = (even.rank(), odd.rank());
        Ok([even.cols() - re - ro, odd.cols() - ro - re])
    }
}

/// `q̄` of a vector of weight `p` and the given total parity.
pub fn qbar(p: i64, odd: bool) -> u8 {
    (odd as i64 - p).rem_euclid(2) as u8
}

fn total_odd(p: i64, q: u8) -> bool {
    (p + q as i64).rem_euclid(2) == 1
}

/// The filtered complex `(A, ∂_h)` with the filtration by degree.
pub fn build_filtered(tw: &TwistingElement) -> Result<FilteredComplex> {
    let sp = tw.algebra().space();
    if sp.mode() != GradingMode::Z {
        return Err(Error::ZGradingRequired);
    }
    if tw.element().iter().any(|(i, _)| sp.degree(*i) < 1) {
        return Err(Error::PositiveDegreeRequired);
    }
    let n = sp.dim();
    FilteredComplex::new(
        sp.field(),
        sp.names().to_vec(),
        (0..n).map(|i| sp.degree(i)).collect(),
        (0..n).map(|i| sp.odd(i)).collect(),
        tw.matrix(),
    )
}

/// `E_r^{p q̄} = Z_r / B_r` with a lift of every class representative.
#[derive(Clone, Debug)]
pub struct PageEntry {
    z: Vec<SparseVec>,
    z_lifts: Vec<SparseVec>,
    b: Vec<SparseVec>,
    e: Subquotient,
    rep_lifts: Vec<SparseVec>,
}

impl PageEntry {
    fn new(field: Field, dim: usize, z: Vec<SparseVec>, z_lifts: Vec<SparseVec>, b: Vec<SparseVec>) -> Result<PageEntry> {
        let e = Subquotient::new(field, dim, &b, &z).map_err(|err| match err {
            Error::NotContained => Error::CheckFailed("B_r is not contained in Z_r".into()),
            err => err,
        })?;
        let rep_lifts = e
            .reps()
            .iter()
            .map(|rep| {
                let c = coordinates(field, dim, &z, rep).expect("representatives lie in Z_r");
                let mut lift = SparseVec::new();
                for (k, x) in c {
                    crate::exactla::axpy(&mut lift, &x, &z_lifts[k]);
                }
                lift
            })
            .collect();
        Ok(PageEntry { z, z_lifts, b, e, rep_lifts })
    }

    pub fn dim(&self) -> usize {
        self.e.dim()
    }

    /// Echelon basis of `Z_r`.
    pub fn z(&self) -> &[SparseVec] {
        &self.z
    }

    /// Lift in `F^p` of each basis vector of `Z_r`.
    pub fn z_lifts(&self) -> &[SparseVec] {
        &self.z_lifts
    }

    /// Echelon basis of `B_r`.
    pub fn b(&self) -> &[SparseVec] {
        &self.b
    }

    /// Canonical representatives of a basis of `E_r`.
    pub fn reps(&self) -> &[SparseVec] {
        self.e.reps()
    }

    pub fn rep_lifts(&self) -> &[SparseVec] {
        &self.rep_lifts
    }

    /// Coordinates of the class of `x ∈ Z_r`.
    pub fn class_of(&self, x: &SparseVec) -> Result<SparseVec> {
        self.e.class_coords(x).map_err(|err| match err {
            Error::NotContained => Error::NotRepresentative("vector is not in Z_r".into()),
            err => err,
        })
    }

    /// A lift of `x ∈ Z_r` built from the stored lifts.
    pub fn lift(&self, field: Field, dim: usize, x: &SparseVec) -> Result<SparseVec> {
        let c = coordinates(field, dim, &self.z, x).ok_or_else(|| Error::NotRepresentative("vector is not in Z_r".into()))?;
        let mut lift = SparseVec::new();
        for (k, a) in c {
            crate::exactla::axpy(&mut lift, &a, &self.z_lifts[k]);
        }
        Ok(lift)
    }
}

/// Page `r`: an entry for every weight in range and both `q̄`, and `d_r`
/// from each entry in representative coordinates.
#[derive(Clone, Debug)]
pub struct SpectralPage {
    r: usize,
    entries: BTreeMap<(i64, u8), PageEntry>,
    d: BTreeMap<(i64, u8), Matrix>,
}

impl SpectralPage {
    pub fn r(&self) -> usize {
        self.r
    }

    pub fn entries(&self) -> &BTreeMap<(i64, u8), PageEntry> {
        &self.entries
    }

    pub fn entry(&self, p: i64, q: u8) -> Option<&PageEntry> {
        self.entries.get(&(p, q))
    }

    pub fn dim(&self, p: i64, q: u8) -> usize {
        self.entry(p, q).map_or(0, PageEntry::dim)
    }

    /// Nonzero dimensions by `(p, q̄)`.
    pub fn dims(&self) -> BTreeMap<(i64, u8), usize> {
        self.entries.iter().filter(|(_, e)| e.dim() > 0).map(|(k, e)| (*k, e.dim())).collect()
    }

    /// `Σ_p dim E_r^{p q̄}` split by total parity.
    pub fn total_dims(&self) -> [usize; 2] {
        let mut out = [0, 0];
        for ((p, q), e) in &self.entries {
            out[total_odd(*p, *q) as usize] += e.dim();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|e| e.dim() == 0)
    }

    /// `d_r` out of `E_r^{p q̄}`; columns index the source classes.
    pub fn differential_matrix(&self, p: i64, q: u8) -> Option<&Matrix> {
        self.d.get(&(p, q))
    }

    /// Key of the target of `d_r` from `(p, q̄)`.
    pub fn target(&self, p: i64, q: u8) -> (i64, u8) {
        (p + self.r as i64, (q as i64 - self.r as i64 + 1).rem_euclid(2) as u8)
    }
}

/// Class of `(d x̃)_{p+r}` in `E_r^{p+r}` for a lift `x̃` of weight `≥ p`.
pub fn differential_of_lift(fc: &FilteredComplex, page: &SpectralPage, p: i64, lift: &SparseVec) -> Result<SparseVec> {
    if fc.min_weight(lift).is_some_and(|w| w < p) {
        return Err(Error::NotRepresentative(format!("lift is not in F^{p}")));
    }
    let odd = match lift.keys().next() {
        Some(&i) => fc.is_odd(i),
        None => return Ok(SparseVec::new()),
    };
    if lift.keys().any(|&i| fc.is_odd(i) != odd) {
        return Err(Error::Input("lift mixes parities".into()));
    }
    let r = page.r as i64;
    let dx = fc.d.mul_vec(lift);
    if fc.min_weight(&dx).is_some_and(|w| w < p + r) {
        return Err(Error::NotRepresentative(format!("d of the lift is not in F^{}", p + r)));
    }
    let z = fc.graded(&dx, p + r);
    let (tp, tq) = page.target(p, qbar(p, odd));
    match page.entry(tp, tq) {
        Some(t) => t.class_of(&z).map_err(|_| Error::CheckFailed(format!("image of d_{r} is not in Z_{r} at weight {tp}"))),
        None if z.is_empty() => Ok(SparseVec::new()),
        None => Err(Error::CheckFailed(format!("image of d_{r} outside the weight range at {tp}"))),
    }
}

/// `d_r [x]` for `x ∈ Z_r^{p q̄}`, through the stored lifts.
pub fn differential(fc: &FilteredComplex, page: &SpectralPage, p: i64, q: u8, x: &SparseVec) -> Result<SparseVec> {
    let entry = page.entry(p, q).ok_or_else(|| Error::NotRepresentative(format!("no entry at ({p},{q})")))?;
    if fc.min_weight(x).is_some_and(|w| w != p) || fc.graded(x, p) != *x {
        return Err(Error::NotRepresentative(format!("vector is not in Gr^{p}")));
    }
    let lift = entry.lift(fc.field, fc.dim(), x)?;
    differential_of_lift(fc, page, p, &lift)
}

fn page_keys(fc: &FilteredComplex) -> Vec<(i64, u8)> {
    let Some((lo, hi)) = fc.weight_range() else { return Vec::new() };
    (lo..=hi).flat_map(|p| [(p, 0u8), (p, 1u8)]).collect()
}

fn assemble(
    fc: &FilteredComplex,
    r: usize,
    entries: BTreeMap<(i64, u8), PageEntry>,
    exec: Exec,
    d_of: impl Fn(&SpectralPage, i64, &SparseVec) -> Result<SparseVec> + Sync + Send,
) -> Result<SpectralPage> {
    let mut page = SpectralPage { r, entries, d: BTreeMap::new() };
    let keys: Vec<(i64, u8)> = page.entries.keys().copied().collect();
    let page_ref = &page;
    let mats = map_slice(exec, &keys, |&(p, q)| -> Result<Matrix> {
        let src = &page_ref.entries[&(p, q)];
        let (tp, tq) = page_ref.target(p, q);
        let rows = page_ref.dim(tp, tq);
        let cols: Vec<SparseVec> = src.rep_lifts.iter().map(|l| d_of(page_ref, p, l)).collect::<Result<_>>()?;
        Ok(Matrix::from_columns(fc.field, rows, &cols))
    });
    let d = keys.into_iter().zip(mats).map(|(k, m)| m.map(|m| (k, m))).collect::<Result<BTreeMap<_, _>>>()?;
    page.d = d;
    Ok(page)
}

/// Page `r` by the filtered-complex description, one task per `(p, q̄)`.
pub fn page_with(fc: &FilteredComplex, r: usize, exec: Exec) -> Result<SpectralPage> {
    let keys = page_keys(fc);
    let built = map_slice(exec, &keys, |&(p, q)| -> Result<PageEntry> {
        let odd = total_odd(p, q);
        let (z, lifts) = fc.z_space(p, odd, r)?;
        let b = fc.b_space(p, odd, r)?;
        PageEntry::new(fc.field, fc.dim(), z, lifts, b)
    });
    let entries = keys.into_iter().zip(built).map(|(k, e)| e.map(|e| (k, e))).collect::<Result<BTreeMap<_, _>>>()?;
    assemble(fc, r, entries, exec, |page, p, lift| differential_of_lift(fc, page, p, lift))
}

pub fn page(fc: &FilteredComplex, r: usize) -> Result<SpectralPage> {
    page_with(fc, r, Exec::default())
}

/// Pages `0..=r_max`.
pub fn pages(fc: &FilteredComplex, r_max: usize) -> Result<Vec<SpectralPage>> {
    (0..=r_max).map(|r| page(fc, r)).collect()
}

/// `E_∞`, equal to every page from [`FilteredComplex::stable_r`] on.
pub fn einfty(fc: &FilteredComplex) -> Result<SpectralPage> {
    page(fc, fc.stable_r())
}

/// Checks `E_{r+1} = H(E_r, d_r)`: `d_r ∘ d_r = 0`, matching dimensions,
/// `Z_{r+1}` maps into `ker d_r` and `B_{r+1}` into `im d_r`.
pub fn check_next_page(cur: &SpectralPage, next: &SpectralPage) -> Result<()> {
    let r = cur.r;
    let fail = |what: String| Err(Error::CheckFailed(format!("E_{} vs H(E_{r}): {what}", r + 1)));
    for (&(p, q), entry) in &cur.entries {
        let d_out = &cur.d[&(p, q)];
        let (tp, tq) = cur.target(p, q);
        if let Some(d2) = cur.d.get(&(tp, tq)) {
            if !d2.mul(d_out).is_zero() {
                return fail(format!("d_r ∘ d_r is nonzero at ({p},{q})"));
            }
        }
        let source = cur.entries.keys().find(|&&(sp, sq)| cur.target(sp, sq) == (p, q)).copied();
        let d_in = source.map(|k| &cur.d[&k]);
        let rank_in = d_in.map_or(0, Matrix::rank);
        let homology = entry.dim() - d_out.rank() - rank_in;
        let Some(nxt) = next.entry(p, q) else { return fail(format!("missing entry ({p},{q})")) };
        if nxt.dim() != homology {
            return fail(format!("dimension {} vs {homology} at ({p},{q})", nxt.dim()));
        }
        for z in &nxt.z {
            let c = entry.class_of(z)?;
            if !d_out.mul_vec(&c).is_empty() {
                return fail(format!("a vector of Z_(r+1) is not a d_r-cycle at ({p},{q})"));
            }
        }
        for b in &nxt.b {
            let c = entry.class_of(b)?;
            let ok = match d_in {
                Some(m) => solve(m, &c).is_ok(),
                None => c.is_empty(),
            };
            if !ok {
                return fail(format!("a vector of B_(r+1) is not a d_r-boundary at ({p},{q})"));
            }
        }
    }
    Ok(())
}

fn same_span(field: Field, dim: usize, a: &[SparseVec], b: &[SparseVec]) -> Result<bool> {
    Ok(echelon_basis(field, dim, a)?.0 == echelon_basis(field, dim, b)?.0)
}

/// Checks that two pages have the same `Z_r`, `B_r` and `d_r` everywhere.
pub fn compare_pages(fc: &FilteredComplex, a: &SpectralPage, b: &SpectralPage) -> Result<()> {
    let fail = |what: String| Err(Error::CheckFailed(format!("pages E_{} differ: {what}", a.r)));
    if a.r != b.r || a.entries.len() != b.entries.len() {
        return fail("different shapes".into());
    }
    for (k, ea) in &a.entries {
        let Some(eb) = b.entries.get(k) else { return fail(format!("missing entry {k:?}")) };
        if !same_span(fc.field, fc.dim(), &ea.z, &eb.z)? {
            return fail(format!("Z differs at {k:?}"));
        }
        if !same_span(fc.field, fc.dim(), &ea.b, &eb.b)? {
            return fail(format!("B differs at {k:?}"));
        }
        if a.d.get(k) != b.d.get(k) {
            return fail(format!("d differs at {k:?}"));
        }
    }
    Ok(())
}

/// Items of the structure lemma for a positively twisted algebra.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct LemmaReport {
    /// `E_r^{p 1̄} = 0`.
    pub odd_rows_vanish: bool,
    /// `d_r = 0` for even `r`.
    pub even_differentials_vanish: bool,
    /// `E_{2m} = E_{2m+1}` as subquotients.
    pub even_pages_repeat: bool,
    /// `E_2^{p 0̄} = E_3^{p 0̄} = H^p(A)` as subquotients of `A^p`.
    pub second_page_is_cohomology: bool,
}

impl LemmaReport {
    pub fn pass(&self) -> bool {
        self.odd_rows_vanish && self.even_differentials_vanish && self.even_pages_repeat && self.second_page_is_cohomology
    }
}

/// Checks the lemma items on `pages[0..]`, which must start at `E_0` and
/// reach at least `E_3`.
pub fn check_lemma(a: &AInfinity, fc: &FilteredComplex, pages: &[SpectralPage]) -> Result<LemmaReport> {
    if pages.len() < 4 || pages.iter().enumerate().any(|(r, pg)| pg.r != r) {
        return Err(Error::Input("pages E_0 to E_3 are required, in order".into()));
    }
    let (field, dim) = (fc.field, fc.dim());
    let odd_rows_vanish = pages.iter().all(|pg| pg.entries.iter().all(|((_, q), e)| *q == 0 || e.dim() == 0));
    let even_differentials_vanish = pages.iter().filter(|pg| pg.r % 2 == 0).all(|pg| pg.d.values().all(Matrix::is_zero));
    let mut even_pages_repeat = true;
    for m in 1.. {
        let (Some(e), Some(o)) = (pages.get(2 * m), pages.get(2 * m + 1)) else { break };
        for (k, ee) in &e.entries {
            let eo = &o.entries[k];
            even_pages_repeat &= same_span(field, dim, &ee.z, &eo.z)? && same_span(field, dim, &ee.b, &eo.b)?;
        }
    }
    let sp = a.space();
    let b1 = matrix_of(field, dim, dim, |x| a.d(x));
    let mut second_page_is_cohomology = true;
    for ((p, q), _) in pages[2].entries.iter().filter(|((_, q), _)| *q == 0) {
        let in_deg = |d: i64| -> Vec<usize> { sp.basis_in_degree(d) };
        let ker = {
            let cols = in_deg(*p);
            let block = Matrix::from_columns(field, dim, &cols.iter().map(|&j| b1.column(j)).collect::<Vec<_>>());
            kernel_basis(&block)?
                .into_iter()
                .map(|v| v.into_iter().map(|(k, c)| (cols[k], c)).collect())
                .collect::<Vec<SparseVec>>()
        };
        let im: Vec<SparseVec> = in_deg(p - 1).iter().map(|&j| b1.column(j)).collect();
        for pg in &pages[2..4] {
            let e = &pg.entries[&(*p, *q)];
            second_page_is_cohomology &= same_span(field, dim, &e.z, &ker)? && same_span(field, dim, &e.b, &im)?;
        }
    }
    Ok(LemmaReport { odd_rows_vanish, even_differentials_vanish, even_pages_repeat, second_page_is_cohomology })
}

/// `E_∞` against the cohomology of the total complex.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EinftyReport {
    /// Page index used for `E_∞`.
    pub r: usize,
    /// `(p, q̄, dim)` for every nonzero graded piece.
    pub pieces: Vec<(i64, u8, usize)>,
    /// `Σ_p dim E_∞` per total parity.
    pub einfty_dims: [usize; 2],
    /// `dim H` per parity.
    pub cohomology_dims: [usize; 2],
    pub pass: bool,
}

pub fn einfty_check(fc: &FilteredComplex) -> Result<EinftyReport> {
    let pg = einfty(fc)?;
    let pieces = pg.dims().into_iter().map(|((p, q), d)| (p, q, d)).collect();
    let einfty_dims = pg.total_dims();
    let cohomology_dims = fc.cohomology_dims()?;
    Ok(EinftyReport { r: pg.r, pieces, einfty_dims, cohomology_dims, pass: einfty_dims == cohomology_dims })
}

// Specialised computation through matric column actions.

/// `h^{(m)}`: strictly upper `m × m` with `(i,j) ↦ h_{2(j-i)}`.
pub fn h_matrix(tw: &TwistingElement, m: usize) -> MatricElement {
    let sp = tw.algebra().space();
    let mut out = MatricElement::square(m);
    for i in 0..m {
        for j in i + 1..m {
            out.set(i, j, tw.element().component(sp, 2 * (j - i) as i64));
        }
    }
    out
}

/// `x^{(m)}` from `comps = [x_p, x_{p+2}, …]`: row `i` holds `x_{p+2(m-1-i)}`,
/// missing components are zero.
pub fn column_from_components(comps: &[Element], m: usize) -> MatricElement {
    MatricElement::column((0..m).map(|i| comps.get(m - 1 - i).cloned().unwrap_or_default()).collect())
}

/// `[x_p, x_{p+2}, …, x_{p+2(m-1)}]` for an element of `F^p`.
pub fn components(tw: &TwistingElement, x: &Element, p: i64, m: usize) -> Vec<Element> {
    let sp = tw.algebra().space();
    (0..m).map(|i| x.component(sp, p + 2 * i as i64)).collect()
}

/// `∂_{h^{(m)}} x^{(m)}`.
pub fn column_residual(tw: &TwistingElement, m: usize, comps: &[Element]) -> Result<MatricElement> {
    let ops = &tw.algebra().ops()[..tw.cap()];
    column_action(ops, &h_matrix(tw, m), &column_from_components(comps, m))
}

/// Matrix of `y ↦ ∂_{h^{(m)}} y^{(m)}` on `y = Σ y_{lo+2i}`, rows indexed by
/// `row · dim + basis index` and columns by `unknowns`.
fn column_action_matrix(tw: &TwistingElement, m: usize, lo: i64) -> Result<(Matrix, Vec<(usize, usize)>)> {
    let sp = tw.algebra().space();
    let field = sp.field();
    let n = sp.dim();
    let hm = h_matrix(tw, m);
    let ops = &tw.algebra().ops()[..tw.cap()];
    let unknowns: Vec<(usize, usize)> =
        (0..m).flat_map(|i| sp.basis_in_degree(lo + 2 * i as i64).into_iter().map(move |k| (i, k))).collect();
    let mut cols = Vec::with_capacity(unknowns.len());
    for &(i, k) in &unknowns {
        let mut x = MatricElement::zero(m, 1);
        x.set(m - 1 - i, 0, Element::basis(field, k));
        let out = column_action(ops, &hm, &x)?;
        let mut v = SparseVec::new();
        for ((row, _), e) in out.entries() {
            for (idx, c) in e.iter() {
                v.insert(row * n + idx, c.clone());
            }
        }
        cols.push(v);
    }
    Ok((Matrix::from_columns(field, m * n, &cols), unknowns))
}

fn rows_from(m: &Matrix, first: usize) -> Matrix {
    let rows: Vec<SparseVec> = (first..m.rows()).map(|i| m.row(i).clone()).collect();
    Matrix::from_rows(m.field(), m.cols(), rows)
}

fn combine(unknowns: &[(usize, usize)], coeffs: &SparseVec) -> SparseVec {
    coeffs.iter().map(|(u, c)| (unknowns[*u].1, c.clone())).collect()
}

/// Page `r` of a positively twisted algebra from the matric description:
/// with `m = ⌊r/2⌋`, `Z_r^p` collects the `x_p` admitting `x` with
/// `∂_{h^{(m)}} x^{(m)} = 0`, `B_r^p` the top entries of `∂_{h^{(m)}} y^{(m)}`
/// whose other entries vanish, and for odd `r` the differential is the top
/// entry of `∂_{h^{(m+1)}} x̃^{(m+1)}`.
pub fn specialized_page(tw: &TwistingElement, r: usize, exec: Exec) -> Result<SpectralPage> {
    let fc = build_filtered(tw)?;
    let sp = tw.algebra().space().clone();
    let (field, n) = (sp.field(), sp.dim());
    let m = r / 2;
    let keys = page_keys(&fc);
    let built = map_slice(exec, &keys, |&(p, q)| -> Result<PageEntry> {
        if q == 1 {
            return PageEntry::new(field, n, Vec::new(), Vec::new(), Vec::new());
        }
        let (z, lifts) = if m == 0 {
            let units: Vec<SparseVec> = sp.basis_in_degree(p).into_iter().map(|k| [(k, field.one())].into_iter().collect()).collect();
            (units.clone(), units)
        } else {
            let (mat, unknowns) = column_action_matrix(tw, m, p)?;
            let ker: Vec<SparseVec> = kernel_basis(&mat)?.iter().map(|v| combine(&unknowns, v)).collect();
            fc.split_graded(p, &ker)?
        };
        let b = if m == 0 {
            Vec::new()
        } else {
            let lo = p - 2 * m as i64 + 1;
            let (mat, _) = column_action_matrix(tw, m, lo)?;
            let ker = kernel_basis(&rows_from(&mat, n))?;
            let tops: Vec<SparseVec> =
                ker.iter().map(|v| mat.mul_vec(v).into_iter().filter(|(i, _)| *i < n).collect()).collect();
            echelon_basis(field, n, &tops)?.0
        };
        PageEntry::new(field, n, z, lifts, b)
    });
    let entries = keys.into_iter().zip(built).map(|(k, e)| e.map(|e| (k, e))).collect::<Result<BTreeMap<_, _>>>()?;
    let ops = &tw.algebra().ops()[..tw.cap()];
    let h_next = h_matrix(tw, m + 1);
    assemble(&fc, r, entries, exec, |page, p, lift| {
        let (tp, tq) = page.target(p, 0);
        let target = page.entry(tp, tq);
        if r.is_multiple_of(2) {
            return Ok(SparseVec::new());
        }
        let x = Element::from_vec(lift.clone());
        // for m = 0 the free top entry x_{p+2m} is x_p itself
        let comps = components(tw, &x, p, m.max(1));
        let col = column_action(ops, &h_next, &column_from_components(&comps, m + 1))?;
        if col.entries().keys().any(|(i, _)| *i != 0) {
            return Err(Error::CheckFailed("bordered column has nonzero entries below the top".into()));
        }
        let z = col.get(0, 0).into_vec();
        match target {
            Some(t) => t.class_of(&z).map_err(|_| Error::CheckFailed(format!("top entry is not in Z_{r} at weight {tp}"))),
            None if z.is_empty() => Ok(SparseVec::new()),
            None => Err(Error::CheckFailed(format!("top entry outside the weight range at {tp}"))),
        }
    })
}

/// Completes `x_p` to `[x_p, …, x_{p+2(m-1)}]` with `∂_{h^{(m)}} x^{(m)} = 0`.
pub fn witness_for(tw: &TwistingElement, m: usize, x_p: &Element) -> Result<Vec<Element>> {
    let sp = tw.algebra().space();
    let p = x_p.degree(sp).ok_or_else(|| Error::Input("x_p must be nonzero and homogeneous".into()))?;
    if m == 0 {
        return Ok(Vec::new());
    }
    let n = sp.dim();
    let mut rhs = SparseVec::new();
    for ((row, _), e) in column_residual(tw, m, std::slice::from_ref(x_p))?.entries() {
        for (idx, c) in e.iter() {
            rhs.insert(row * n + idx, c.clone().signed(true));
        }
    }
    let (full, unknowns) = column_action_matrix(tw, m, p)?;
    let free: Vec<usize> = (0..unknowns.len()).filter(|&u| unknowns[u].0 >= 1).collect();
    let not_in = || Error::NotRepresentative(format!("x_p is not in Z_{}", 2 * m + 1));
    let mut comps = vec![Element::zero(); m];
    comps[0] = x_p.clone();
    if free.is_empty() {
        return if rhs.is_empty() { Ok(comps) } else { Err(not_in()) };
    }
    let sub = Matrix::from_columns(sp.field(), full.rows(), &free.iter().map(|&u| full.column(u)).collect::<Vec<_>>());
    for (k, c) in solve(&sub, &rhs).map_err(|_| not_in())? {
        let (i, idx) = unknowns[free[k]];
        comps[i].add_term(idx, &c);
    }
    Ok(comps)
}

/// Outcome of comparing `d_{2m+1}` with the Massey product of the bordered system.
#[derive(Clone, Debug)]
pub struct MasseyComparison {
    pub m: usize,
    pub p: i64,
    /// `(h^{(m+1)} x̃^{(m+1)}; 0 0)` as a defining system of `[h_2]^m, [x_p]`.
    pub system: DefiningSystem,
    /// `z_{p+2m+1} = μ(system)`.
    pub z: Element,
    /// Class of `z` in `E_{2m+1}^{p+2m+1}`.
    pub via_massey: SparseVec,
    /// `d_{2m+1}[x_p]` from the filtered-complex engine.
    pub via_differential: SparseVec,
    pub agree: bool,
}

/// Builds the bordered defining system from a witness
/// `[x_p, …, x_{p+2(m-1)}]` and an optional `x_{p+2m}`, and compares its
/// `μ` with `d_{2m+1}[x_p]` computed by the generic engine.
pub fn massey_comparison(
    tw: &TwistingElement,
    data: &TransferData,
    m: usize,
    witness: &[Element],
    top: Option<&Element>,
) -> Result<MasseyComparison> {
    let a = tw.algebra();
    let sp = a.space();
    if m == 0 || witness.len() != m {
        return Err(Error::Input(format!("need m ≥ 1 and exactly m witness components, got m = {m}")));
    }
    let p = witness[0].degree(sp).ok_or_else(|| Error::Input("x_p must be nonzero and homogeneous".into()))?;
    for (i, x) in witness.iter().chain(top).enumerate() {
        if x.iter().any(|(k, _)| sp.degree(*k) != p + 2 * i as i64) {
            return Err(Error::WitnessInvalid(format!("component {i} is not of degree {}", p + 2 * i as i64)));
        }
    }
    let res = column_residual(tw, m, witness)?;
    if !res.is_zero() {
        return Err(Error::WitnessInvalid(format!("∂_h^(m) x^(m) = {}", res.display(sp))));
    }
    let fc = build_filtered(tw)?;
    let r = 2 * m + 1;
    let pg = page(&fc, r)?;
    let mut full: Vec<Element> = witness.to_vec();
    full.push(top.cloned().unwrap_or_default());
    let bordered = h_matrix(tw, m + 1).extend_by_column(&column_from_components(&full, m + 1))?;
    let h2 = tw.element().component(sp, 2);
    let mut classes = vec![Class { value: data.p(&h2), degree: 2 }; m];
    classes.push(Class { value: data.p(&witness[0]), degree: p });
    let system = validate(a, data, &classes, &bordered)?;
    let z = system.mu.clone();
    let direct = column_action(&a.ops()[..tw.cap()], &h_matrix(tw, m + 1), &column_from_components(&full, m + 1))?;
    if direct.get(0, 0) != z {
        return Err(Error::CheckFailed("μ of the bordered system differs from the top column entry".into()));
    }
    let tp = p + r as i64;
    let via_massey = match pg.entry(tp, 0) {
        Some(t) => t.class_of(z.coeffs())?,
        None if z.is_zero() => SparseVec::new(),
        None => return Err(Error::CheckFailed("z lies outside the weight range".into())),
    };
    let via_differential = differential(&fc, &pg, p, 0, witness[0].coeffs())?;
    let agree = via_massey == via_differential;
    Ok(MasseyComparison { m, p, system, z, via_massey, via_differential, agree })
}

/// Turns a witness for `Z_{2m+1}` into one for `Z_{2m+3}` as
/// `x + x_{p+2m} - y′`, where `∂_{h^{(m)}} y′^{(m)}_{p+2} = (z; 0)`.
/// Fails when `x_p` does not survive to `E_{2m+3}`.
pub fn repair_witness(tw: &TwistingElement, m: usize, witness: &[Element], top: Option<&Element>) -> Result<Vec<Element>> {
    let sp = tw.algebra().space();
    if m == 0 || witness.len() != m {
        return Err(Error::Input("need m ≥ 1 and exactly m witness components".into()));
    }
    let p = witness[0].degree(sp).ok_or_else(|| Error::Input("x_p must be nonzero and homogeneous".into()))?;
    if !column_residual(tw, m, witness)?.is_zero() {
        return Err(Error::WitnessInvalid("witness does not satisfy ∂_h^(m) x^(m) = 0".into()));
    }
    let mut full: Vec<Element> = witness.to_vec();
    full.push(top.cloned().unwrap_or_default());
    let z = column_residual(tw, m + 1, &full)?.get(0, 0);
    let (mat, unknowns) = column_action_matrix(tw, m, p + 2)?;
    let mut rhs = SparseVec::new();
    for (idx, c) in z.iter() {
        rhs.insert(*idx, c.clone());
    }
    let sol = solve(&mat, &rhs).map_err(|_| Error::NotRepresentative(format!("class does not survive to E_{}", 2 * m + 3)))?;
    for (u, c) in sol {
        let (i, idx) = unknowns[u];
        full[i + 1].add_term(idx, &c.signed(true));
    }
    if !column_residual(tw, m + 1, &full)?.is_zero() {
        return Err(Error::CheckFailed("repaired witness fails at level m + 1".into()));
    }
    Ok(full)
}

/// Page maps induced by a filtered cochain map `f` (matrix on the bases).
pub fn page_map(
    src: &FilteredComplex,
    tgt: &FilteredComplex,
    f: &Matrix,
    a: &SpectralPage,
    b: &SpectralPage,
) -> Result<BTreeMap<(i64, u8), Matrix>> {
    let mut out = BTreeMap::new();
    for (&(p, q), e) in &a.entries {
        let rows = b.dim(p, q);
        let cols: Vec<SparseVec> = e
            .reps()
            .iter()
            .map(|x| {
                let y = tgt.graded(&f.mul_vec(x), p);
                match b.entry(p, q) {
                    Some(t) => t.class_of(&y),
                    None if y.is_empty() => Ok(SparseVec::new()),
                    None => Err(Error::CheckFailed(format!("image outside the target range at weight {p}"))),
                }
            })
            .collect::<Result<_>>()?;
        out.insert((p, q), Matrix::from_columns(src.field, rows, &cols));
    }
    Ok(out)
}

/// Morphism of spectral sequences induced by `F_h`.
#[derive(Clone, Debug)]
pub struct NaturalityReport {
    /// `F_h` maps `F^p A` into `F^p B`.
    pub filtered: bool,
    /// On `Gr^p` the map is `f_1`.
    pub graded_is_f1: bool,
    /// Page maps for `r = 0..=r_max`.
    pub maps: Vec<BTreeMap<(i64, u8), Matrix>>,
    /// `f_* d_r = d_r f_*` on every checked page.
    pub commutes: bool,
}

impl NaturalityReport {
    pub fn pass(&self) -> bool {
        self.filtered && self.graded_is_f1 && self.commutes
    }

    /// Whether every page map from `r` on is invertible.
    pub fn isomorphism_from(&self, r: usize) -> bool {
        self.maps.iter().skip(r).all(|ms| ms.values().all(|m| m.rows() == m.cols() && m.rank() == m.rows()))
    }
}

pub fn spectral_naturality(f: &AInfMorphism, tw: &TwistingElement, r_max: usize) -> Result<NaturalityReport> {
    let im = induced_map(f, tw)?;
    let fa = build_filtered(tw)?;
    let fb = build_filtered(&im.image)?;
    let mut filtered = true;
    let mut graded_is_f1 = true;
    for j in 0..fa.dim() {
        let col = im.matrix.column(j);
        filtered &= col.keys().all(|&i| fb.weight(i) >= fa.weight(j));
        let f1 = f.f1(&Element::basis(fa.field, j));
        graded_is_f1 &= fb.graded(&col, fa.weight(j)) == *f1.coeffs();
    }
    let mut maps = Vec::new();
    let mut commutes = true;
    for r in 0..=r_max {
        let (pa, pb) = (page(&fa, r)?, page(&fb, r)?);
        let mp = page_map(&fa, &fb, &im.matrix, &pa, &pb)?;
        // missing entries are zero spaces; missing maps and differentials are zero
        let map_at = |k: (i64, u8)| mp.get(&k).cloned().unwrap_or_else(|| Matrix::zero(fa.field, pb.dim(k.0, k.1), pa.dim(k.0, k.1)));
        for &(p, q) in pa.entries.keys().chain(pb.entries.keys()) {
            let t = pa.target(p, q);
            let d_of = |pg: &SpectralPage| {
                pg.differential_matrix(p, q).cloned().unwrap_or_else(|| Matrix::zero(fa.field, pg.dim(t.0, t.1), pg.dim(p, q)))
            };
            let (da, db) = (d_of(&pa), d_of(&pb));
            commutes &= map_at(t).mul(&da) == db.mul(&map_at((p, q)));
        }
        maps.push(mp);
    }
    Ok(NaturalityReport { filtered, graded_is_f1, maps, commutes })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `C = span(a, b)` with `d a = b`, `a` of weight 0, `b` of weight `w`.
    fn two_cell(w: i64) -> FilteredComplex {
        let f = Field::Fp(5);
        let mut d = Matrix::zero(f, 2, 2);
        d.set(1, 0, f.one());
        FilteredComplex::new(f, vec!["a".into(), "b".into()], vec![0, w], vec![false, true], d).unwrap()
    }

    #[test]
    fn two_cell_dies_at_page_w() {
        let fc = two_cell(3);
        for r in 0..=4 {
            let pg = page(&fc, r).unwrap();
            let alive = pg.total_dims();
            if r <= 3 {
                assert_eq!(alive, [1, 1], "r = {r}");
            } else {
                assert_eq!(alive, [0, 0], "r = {r}");
            }
            let nonzero_d = pg.d.values().any(|m| !m.is_zero());
            assert_eq!(nonzero_d, r == 3, "r = {r}");
        }
    }

    #[test]
    fn rejects_filtration_lowering() {
        let f = Field::Fp(5);
        let mut d = Matrix::zero(f, 2, 2);
        d.set(0, 1, f.one());
        assert!(FilteredComplex::new(f, vec!["a".into(), "b".into()], vec![0, 1], vec![false, true], d).is_err());
    }
}
