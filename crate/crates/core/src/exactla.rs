//! Exact linear algebra over [`Field`]s with sparse storage.
//!
//! All routines are deterministic: pivots are chosen leftmost-first and
//! never by magnitude, so every downstream choice of basis, representative
//! or particular solution is reproducible.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Sparse vector: index to nonzero coefficient.
pub type SparseVec = BTreeMap<usize, Scalar>;

/// `dst += a · src`, dropping cancelled entries.
pub fn axpy(dst: &mut SparseVec, a: &Scalar, src: &SparseVec) {
    if a.is_zero() {
        return;
    }
    for (k, v) in src {
        let t = a * v;
        if t.is_zero() {
            continue;
        }
        match dst.get_mut(k) {
            Some(d) => {
                let s = &*d + &t;
                if s.is_zero() {
                    dst.remove(k);
                } else {
                    *d = s;
                }
            }
            None => {
                dst.insert(*k, t);
            }
        }
    }
}

pub fn scale(v: &SparseVec, a: &Scalar) -> SparseVec {
    if a.is_zero() {
        return SparseVec::new();
    }
    v.iter().map(|(k, x)| (*k, a * x)).collect()
}

/// Sparse matrix stored by rows; no zero entries are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    data: Vec<SparseVec>,
}

impl Matrix {
    pub fn zero(field: Field, rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, field, data: vec![SparseVec::new(); rows] }
    }

    pub fn identity(field: Field, n: usize) -> Matrix {
        let mut m = Matrix::zero(field, n, n);
        for i in 0..n {
            m.set(i, i, field.one());
        }
        m
    }

    /// Builds a matrix from small integer rows.
    pub fn from_i64(field: Field, rows: &[Vec<i64>]) -> Matrix {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Matrix::zero(field, rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, field.from_i64(*x));
            }
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(field: Field, rows: usize, cols: &[SparseVec]) -> Matrix {
        let mut m = Matrix::zero(field, rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for (i, x) in c {
                assert!(*i < rows, "column entry out of range");
                m.set(*i, j, x.clone());
            }
        }
        m
    }

    pub fn from_rows(field: Field, cols: usize, rows: Vec<SparseVec>) -> Matrix {
        let rows: Vec<SparseVec> = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(_, x)| !x.is_zero()).collect())
            .collect();
        assert!(rows.iter().all(|r| r.keys().all(|&k| k < cols)), "row entry out of range");
        Matrix { rows: rows.len(), cols, field, data: rows }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn row(&self, i: usize) -> &SparseVec {
        &self.data[i]
    }

    pub fn set(&mut self, i: usize, j: usize, x: Scalar) {
        assert!(i < self.rows && j < self.cols, "index out of range");
        if x.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, x);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i].get(&j).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(|r| r.len()).sum()
    }

    pub fn column(&self, j: usize) -> SparseVec {
        let mut c = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            if let Some(x) = r.get(&j) {
                c.insert(i, x.clone());
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cs = vec![SparseVec::new(); self.cols];
        for (i, r) in self.data.iter().enumerate() {
            for (j, x) in r {
                cs[*j].insert(i, x.clone());
            }
        }
        cs
    }

    pub fn mul_vec(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = self.field.zero();
            for (j, x) in r {
                if let Some(y) = v.get(j) {
                    acc = acc + x * y;
                }
            }
            if !acc.is_zero() {
                out.insert(i, acc);
            }
        }
        out
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut m = Matrix::zero(self.field, self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = SparseVec::new();
            for (k, x) in r {
                axpy(&mut acc, x, &other.data[*k]);
            }
            m.data[i] = acc;
        }
        m
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        let one = self.field.one();
        let mut m = self.clone();
        for (i, r) in other.data.iter().enumerate() {
            axpy(&mut m.data[i], &one, r);
        }
        m
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.scale(&-self.field.one()))
    }

    pub fn scale(&self, a: &Scalar) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            field: self.field,
            data: self.data.iter().map(|r| scale(r, a)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let cols = self.columns();
        Matrix { rows: self.cols, cols: self.rows, field: self.field, data: cols }
    }

    pub fn rank(&self) -> usize {
        rref(self).map(|(_, p)| p.len()).unwrap_or(0)
    }

    /// Dense rendering, mainly for tests and reports.
    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j)).collect()).collect()
    }

    fn check_field(&self) -> Result<()> {
        for r in &self.data {
            for x in r.values() {
                if x.field() != self.field {
                    return Err(Error::FieldMismatch);
                }
            }
        }
        Ok(())
    }
}

/// Row reduces in place, returning pivot columns. Columns at or beyond
/// `stop_col` are carried along but never chosen as pivots.
fn reduce_rows(rows: &mut [SparseVec], cols: usize, stop_col: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols.min(stop_col) {
        if r == rows.len() {
            break;
        }
        let Some(i) = (r..rows.len()).find(|&i| rows[i].contains_key(&c)) else {
            continue;
        };
        rows.swap(r, i);
        let inv = rows[r][&c].inv().expect("stored entries are nonzero");
        if !inv.is_one() {
            rows[r] = scale(&rows[r], &inv);
        }
        let pivot_row = rows[r].clone();
        for (k, row) in rows.iter_mut().enumerate() {
            if k != r {
                if let Some(f) = row.get(&c).cloned() {
                    axpy(row, &(-&f), &pivot_row);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Reduced row echelon form with leftmost pivots.
pub fn rref(m: &Matrix) -> Result<(Matrix, Vec<usize>)> {
    m.check_field()?;
    let mut rows = m.data.clone();
    let pivots = reduce_rows(&mut rows, m.cols, m.cols);
    Ok((Matrix { rows: m.rows, cols: m.cols, field: m.field, data: rows }, pivots))
}

/// Precomputed solver for repeated right-hand sides against one matrix.
///
/// Stores the row transform `T` with `T·A = rref(A)`; a system is
/// consistent iff rows of `T·b` past the rank vanish.
#[derive(Clone, Debug)]
pub struct LinearSolver {
    field: Field,
    rows: usize,
    cols: usize,
    pivots: Vec<usize>,
    transform: Matrix,
}

impl LinearSolver {
    pub fn new(a: &Matrix) -> Result<LinearSolver> {
        a.check_field()?;
        let (n, m) = (a.rows, a.cols);
        let mut rows: Vec<SparseVec> = a
            .data
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.insert(m + i, a.field.one());
                row
            })
            .collect();
        let pivots = reduce_rows(&mut rows, m + n, m);
        let t_rows = rows
            .into_iter()
            .map(|r| r.into_iter().filter(|(k, _)| *k >= m).map(|(k, x)| (k - m, x)).collect())
            .collect();
        Ok(LinearSolver {
            field: a.field,
            rows: n,
            cols: m,
            pivots,
            transform: Matrix::from_rows(a.field, n, t_rows),
        })
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical particular solution (zero in every non-pivot coordinate).
    pub fn solve(&self, b: &SparseVec) -> Result<SparseVec> {
        if b.keys().any(|&k| k >= self.rows) {
            return Err(Error::SizeMismatch("right-hand side too long".into()));
        }
        for x in b.values() {
            if x.field() != self.field {
                return Err(Error::FieldMismatch);
            }
        }
        let c = self.transform.mul_vec(b);
        let r = self.pivots.len();
        if c.keys().any(|&k| k >= r) {
            return Err(Error::Inconsistent);
        }
        Ok(c.into_iter().map(|(i, x)| (self.pivots[i], x)).collect())
    }

    pub fn cols(&self) -> usize {
        self.cols
    }
}

/// Canonical particular solution of `a·x = b` or [`Error::Inconsistent`].
pub fn solve(a: &Matrix, b: &SparseVec) -> Result<SparseVec> {
    LinearSolver::new(a)?.solve(b)
}

/// Null-space basis, one vector per free column in increasing order, each
/// with a 1 in its free column.
pub fn kernel_basis(a: &Matrix) -> Result<Vec<SparseVec>> {
    let (r, pivots) = rref(a)?;
    let mut out = Vec::new();
    let mut pi = 0;
    for f in 0..a.cols {
        if pi < pivots.len() && pivots[pi] == f {
            pi += 1;
            continue;
        }
        let mut v = SparseVec::new();
        v.insert(f, a.field.one());
        for (i, &pc) in pivots.iter().enumerate() {
            if let Some(x) = r.data[i].get(&f) {
                v.insert(pc, -x);
            }
        }
        out.push(v);
    }
    Ok(out)
}

/// Echelon basis (rref rows) of the span of `vecs` in dimension `dim`.
pub fn echelon_basis(field: Field, dim: usize, vecs: &[SparseVec]) -> Result<(Vec<SparseVec>, Vec<usize>)> {
    let m = Matrix::from_rows(field, dim, vecs.to_vec());
    let (r, p) = rref(&m)?;
    let rows = r.data.into_iter().take(p.len()).collect();
    Ok((rows, p))
}

/// Representatives of `ambient / sub`, reduced against the echelon basis of
/// `sub` (zero in every pivot coordinate of `sub`) and monic.
pub fn subquotient_basis(
    field: Field,
    dim: usize,
    sub: &[SparseVec],
    ambient: &[SparseVec],
) -> Result<Vec<SparseVec>> {
    let (_, sub_p) = echelon_basis(field, dim, sub)?;
    let (_, amb_p) = echelon_basis(field, dim, ambient)?;
    let mut both: Vec<SparseVec> = sub.to_vec();
    both.extend_from_slice(ambient);
    let (rows, p) = echelon_basis(field, dim, &both)?;
    if p.len() != amb_p.len() {
        return Err(Error::NotContained);
    }
    Ok(rows
        .into_iter()
        .zip(p)
        .filter(|(_, c)| !sub_p.contains(c))
        .map(|(r, _)| r)
        .collect())
}

/// Quotient `ambient / sub` with canonical representatives and a solver
/// that reads off class coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    sub: Vec<SparseVec>,
    reps: Vec<SparseVec>,
    solver: LinearSolver,
}

impl Subquotient {
    pub fn new(field: Field, dim: usize, sub: &[SparseVec], ambient: &[SparseVec]) -> Result<Subquotient> {
        let (sub, _) = echelon_basis(field, dim, sub)?;
        let reps = subquotient_basis(field, dim, &sub, ambient)?;
        let mut cols = sub.clone();
        cols.extend(reps.iter().cloned());
        let solver = LinearSolver::new(&Matrix::from_columns(field, dim, &cols))?;
        Ok(Subquotient { sub, reps, solver })
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[SparseVec] {
        &self.reps
    }

    /// Echelon basis of the subspace divided out.
    pub fn sub_basis(&self) -> &[SparseVec] {
        &self.sub
    }

    /// Coordinates of the class of `v` in the representatives;
    /// [`Error::NotContained`] when `v` lies outside the ambient space.
    pub fn class_coords(&self, v: &SparseVec) -> Result<SparseVec> {
        let c = self.solver.solve(v).map_err(|e| match e {
            Error::Inconsistent => Error::NotContained,
            e => e,
        })?;
        let k = self.sub.len();
        Ok(c.into_iter().filter(|(i, _)| *i >= k).map(|(i, x)| (i - k, x)).collect())
    }

    /// True when `v` represents the zero class.
    pub fn is_zero_class(&self, v: &SparseVec) -> Result<bool> {
        Ok(self.class_coords(v)?.is_empty())
    }
}

/// Coordinates of `v` in the given independent vectors, if `v` is in their span.
pub fn coordinates(field: Field, dim: usize, basis: &[SparseVec], v: &SparseVec) -> Option<SparseVec> {
    let a = Matrix::from_columns(field, dim, basis);
    solve(&a, v).ok()
}
