//! Dense matrices over F_q, canonical subspaces, and exhaustive enumeration of
//! Grassmannians and general linear groups.
//!
//! Matrices act on column vectors. A subspace `W` is stored by its reduced
//! row-echelon basis; `T` leaves `W` invariant when `T w` lies in `W` for every
//! basis vector `w`.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{Field, FieldElement};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<FieldElement>,
}

/// Row-major lexicographic order on entries (same shape assumed first).
impl Ord for Matrix {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.rows, self.cols, &self.data).cmp(&(other.rows, other.cols, &other.data))
    }
}

impl PartialOrd for Matrix {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix {
            rows,
            cols,
            data: vec![FieldElement::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = FieldElement::ONE;
        }
        m
    }

    pub fn from_elements(rows: usize, cols: usize, data: Vec<FieldElement>) -> Result<Matrix> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from integer rows, reducing each entry into the prime
    /// subfield.
    pub fn from_ints<R: AsRef<[i64]>>(field: &Field, rows: &[R]) -> Result<Matrix> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows".into()));
            }
            data.extend(r.iter().map(|&x| field.from_int(x)));
        }
        Ok(Matrix {
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn diagonal(entries: &[FieldElement]) -> Matrix {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[FieldElement] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul(&self, other: &Matrix, field: &Field) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let cur = out[(i, j)];
                    out[(i, j)] = field.add(cur, field.mul(a, other[(k, j)]));
                }
            }
        }
        Ok(out)
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &[FieldElement], field: &Field) -> Vec<FieldElement> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(FieldElement::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
            })
            .collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// `self - c I`.
    pub fn sub_scalar(&self, c: FieldElement, field: &Field) -> Matrix {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] = field.sub(m[(i, i)], c);
        }
        m
    }

    pub fn rank(&self, field: &Field) -> usize {
        rref(self, field).1
    }

    pub fn is_invertible(&self, field: &Field) -> bool {
        self.is_square() && self.rank(field) == self.rows
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self, field: &Field) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut aug = Matrix::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)];
            }
            aug[(i, n + i)] = FieldElement::ONE;
        }
        let (red, _) = rref_full(&aug, field, n);
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            if red[(i, i)] != FieldElement::ONE {
                return Err(Error::Singular);
            }
            for j in 0..n {
                inv[(i, j)] = red[(i, n + j)];
            }
        }
        Ok(inv)
    }

    /// Row-major base-q integer code, first entry most significant. Panics if
    /// the code does not fit in a u64.
    pub fn code(&self, q: u32) -> u64 {
        self.data.iter().fold(0u64, |acc, e| {
            acc.checked_mul(q as u64)
                .and_then(|x| x.checked_add(e.index() as u64))
                .expect("matrix code overflows u64")
        })
    }

    /// Inverse of [`Matrix::code`].
    pub fn from_code(rows: usize, cols: usize, mut code: u64, field: &Field) -> Matrix {
        let q = field.order() as u64;
        let mut data = vec![FieldElement::ZERO; rows * cols];
        for slot in data.iter_mut().rev() {
            *slot = field.element((code % q) as usize);
            code /= q;
        }
        Matrix { rows, cols, data }
    }

    /// Bracketed row list, e.g. `[[1,0],[0,g]]`.
    pub fn format(&self, field: &Field) -> String {
        let mut s = String::from("[");
        for i in 0..self.rows {
            if i > 0 {
                s.push(',');
            }
            s.push('[');
            for j in 0..self.cols {
                if j > 0 {
                    s.push(',');
                }
                let _ = write!(s, "{}", field.format(self[(i, j)]));
            }
            s.push(']');
        }
        s.push(']');
        s
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = FieldElement;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &FieldElement {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut FieldElement {
        &mut self.data[i * self.cols + j]
    }
}

/// Reduced row-echelon form. Returns the nonzero rows only (a `rank x cols`
/// matrix) together with the rank, so row-equivalent inputs give identical
/// output regardless of how many zero rows they carry.
pub fn rref(m: &Matrix, field: &Field) -> (Matrix, usize) {
    let (mut red, rank) = rref_full(m, field, m.cols);
    red.data.truncate(rank * red.cols);
    red.rows = rank;
    (red, rank)
}

/// In-place Gauss-Jordan elimination pivoting only in the first `pivot_cols`
/// columns; keeps all rows.
fn rref_full(m: &Matrix, field: &Field, pivot_cols: usize) -> (Matrix, usize) {
    let mut a = m.clone();
    let cols = a.cols;
    let mut rank = 0;
    for col in 0..pivot_cols {
        let Some(pr) = (rank..a.rows).find(|&r| !a[(r, col)].is_zero()) else {
            continue;
        };
        if pr != rank {
            for j in 0..cols {
                a.data.swap(pr * cols + j, rank * cols + j);
            }
        }
        let inv = field.inv(a[(rank, col)]).expect("pivot is nonzero");
        for j in col..cols {
            a[(rank, j)] = field.mul(a[(rank, j)], inv);
        }
        for r in 0..a.rows {
            if r == rank {
                continue;
            }
            let factor = a[(r, col)];
            if factor.is_zero() {
                continue;
            }
            for j in col..cols {
                let sub = field.mul(factor, a[(rank, j)]);
                a[(r, j)] = field.sub(a[(r, j)], sub);
            }
        }
        rank += 1;
        if rank == a.rows {
            break;
        }
    }
    (a, rank)
}

/// |GL_n(F_q)| = prod_{i<n} (q^n - q^i).
pub fn gl_order(n: usize, q: u32) -> BigUint {
    let q = BigUint::from(q);
    let qn = q.pow(n as u32);
    (0..n as u32).fold(BigUint::one(), |acc, i| acc * (&qn - q.pow(i)))
}

/// Number of d-dimensional subspaces of F_q^n; zero when d > n.
pub fn gaussian_binomial(n: usize, d: usize, q: u32) -> BigUint {
    if d > n {
        return BigUint::zero();
    }
    let q = BigUint::from(q);
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for i in 0..d as u32 {
        num *= q.pow(n as u32 - i) - 1u32;
        den *= q.pow(i + 1) - 1u32;
    }
    num / den
}

/// A subspace of F_q^n, stored by its canonical RREF basis.
///
/// Subspaces are totally ordered by pivot columns, then by basis entries in
/// row-major order; [`Grassmannian`] yields them in increasing order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient_dim: usize,
    pivots: Vec<usize>,
    basis: Matrix,
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.ambient_dim, self.pivots.len(), &self.pivots, &self.basis.data).cmp(&(
            other.ambient_dim,
            other.pivots.len(),
            &other.pivots,
            &other.basis.data,
        ))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Subspace {
    /// Row space of `generators` (rows are spanning vectors).
    pub fn span(generators: &Matrix, field: &Field) -> Subspace {
        let (basis, _) = rref(generators, field);
        let pivots = pivot_columns(&basis);
        Subspace {
            ambient_dim: generators.cols,
            pivots,
            basis,
        }
    }

    pub fn zero(n: usize) -> Subspace {
        Subspace {
            ambient_dim: n,
            pivots: Vec::new(),
            basis: Matrix::zeros(0, n),
        }
    }

    pub fn full(n: usize) -> Subspace {
        Subspace {
            ambient_dim: n,
            pivots: (0..n).collect(),
            basis: Matrix::identity(n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the RREF basis, or `None` if `v` is not in the
    /// subspace.
    pub fn coordinates(&self, v: &[FieldElement], field: &Field) -> Option<Vec<FieldElement>> {
        let coords: Vec<FieldElement> = self.pivots.iter().map(|&p| v[p]).collect();
        for j in 0..self.ambient_dim {
            let expected = coords
                .iter()
                .enumerate()
                .fold(FieldElement::ZERO, |acc, (i, &c)| {
                    field.add(acc, field.mul(c, self.basis[(i, j)]))
                });
            if expected != v[j] {
                return None;
            }
        }
        Some(coords)
    }

    pub fn contains(&self, v: &[FieldElement], field: &Field) -> bool {
        self.coordinates(v, field).is_some()
    }

    /// `T(W)`.
    pub fn image(&self, t: &Matrix, field: &Field) -> Subspace {
        let mut gens = Matrix::zeros(self.dim(), self.ambient_dim);
        for i in 0..self.dim() {
            let img = t.apply(self.basis.row(i), field);
            gens.data[i * self.ambient_dim..(i + 1) * self.ambient_dim].copy_from_slice(&img);
        }
        Subspace::span(&gens, field)
    }
}

fn pivot_columns(basis: &Matrix) -> Vec<usize> {
    (0..basis.rows)
        .map(|i| {
            (0..basis.cols)
                .find(|&j| !basis[(i, j)].is_zero())
                .expect("RREF rows are nonzero")
        })
        .collect()
}

/// Streams every d-dimensional subspace of F_q^n exactly once, in canonical
/// RREF form and increasing [`Subspace`] order: pivot sets in lexicographic
/// order, then free entries as a base-q counter in row-major position order.
pub struct Grassmannian {
    field: Field,
    n: usize,
    pivots: Option<Vec<usize>>,
    free: Vec<(usize, usize)>,
    counter: Vec<usize>,
}

impl Grassmannian {
    pub fn new(n: usize, d: usize, field: &Field) -> Grassmannian {
        let pivots = (d <= n).then(|| (0..d).collect::<Vec<_>>());
        let mut g = Grassmannian {
            field: field.clone(),
            n,
            pivots,
            free: Vec::new(),
            counter: Vec::new(),
        };
        g.reset_free();
        g
    }

    fn reset_free(&mut self) {
        self.free.clear();
        if let Some(pivots) = &self.pivots {
            for (i, &p) in pivots.iter().enumerate() {
                for j in p + 1..self.n {
                    if !pivots.contains(&j) {
                        self.free.push((i, j));
                    }
                }
            }
        }
        self.counter = vec![0; self.free.len()];
    }

    fn current(&self) -> Subspace {
        let pivots = self.pivots.clone().unwrap();
        let mut basis = Matrix::zeros(pivots.len(), self.n);
        for (i, &p) in pivots.iter().enumerate() {
            basis[(i, p)] = FieldElement::ONE;
        }
        for (&(i, j), &c) in self.free.iter().zip(&self.counter) {
            basis[(i, j)] = self.field.element(c);
        }
        Subspace {
            ambient_dim: self.n,
            pivots,
            basis,
        }
    }

    fn advance(&mut self) {
        let q = self.field.order() as usize;
        for slot in self.counter.iter_mut().rev() {
            *slot += 1;
            if *slot < q {
                return;
            }
            *slot = 0;
        }
        // counter wrapped: next pivot combination
        let pivots = self.pivots.as_mut().unwrap();
        let d = pivots.len();
        let n = self.n;
        match (0..d).rev().find(|&i| pivots[i] < n - d + i) {
            Some(i) => {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                self.reset_free();
            }
            None => self.pivots = None,
        }
    }
}

impl Iterator for Grassmannian {
    type Item = Subspace;

    fn next(&mut self) -> Option<Subspace> {
        self.pivots.as_ref()?;
        let s = self.current();
        self.advance();
        Some(s)
    }
}

pub fn enumerate_grassmannian(n: usize, d: usize, field: &Field) -> Grassmannian {
    Grassmannian::new(n, d, field)
}

pub(crate) fn check_cap(what: impl FnOnce() -> String, required: &BigUint, cap: u64) -> Result<()> {
    if *required > BigUint::from(cap) {
        Err(Error::CapExceeded {
            what: what(),
            required: required.to_string(),
            cap,
        })
    } else {
        Ok(())
    }
}

/// Candidate index space for GL_n(F_q): every n x n matrix, by code.
pub fn gl_candidate_count(n: usize, q: u32) -> u64 {
    (q as u64)
        .checked_pow((n * n) as u32)
        .expect("candidate space overflows u64")
}

/// The matrix with code `index` if it is invertible.
pub fn gl_candidate(n: usize, index: u64, field: &Field) -> Option<Matrix> {
    let m = Matrix::from_code(n, n, index, field);
    m.is_invertible(field).then_some(m)
}

/// Every element of GL_n(F_q) exactly once, in increasing code order.
pub fn enumerate_gl(n: usize, field: &Field, cap: u64) -> Result<impl Iterator<Item = Matrix>> {
    let q = field.order();
    check_cap(|| format!("GL_{n}(F_{q})"), &gl_order(n, q), cap)?;
    let field = field.clone();
    Ok((0..gl_candidate_count(n, q)).filter_map(move |i| gl_candidate(n, i, &field)))
}

/// Parallel counterpart of [`enumerate_gl`]; the candidate range is split
/// into disjoint index blocks.
pub fn par_enumerate_gl(
    n: usize,
    field: &Field,
    cap: u64,
) -> Result<impl ParallelIterator<Item = Matrix>> {
    let q = field.order();
    check_cap(|| format!("GL_{n}(F_{q})"), &gl_order(n, q), cap)?;
    let field = field.clone();
    Ok((0..gl_candidate_count(n, q))
        .into_par_iter()
        .filter_map(move |i| gl_candidate(n, i, &field)))
}

/// Matrix of `T|_W` in the RREF basis `w_1, ..., w_d` of `W`: column `i` holds
/// the coordinates of `T w_i`. Returns `Ok(None)` when `W` is not invariant.
pub fn restrict(t: &Matrix, w: &Subspace, field: &Field) -> Result<Option<Matrix>> {
    if !t.is_square() || t.rows != w.ambient_dim {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} transformation on a subspace of F^{}",
            t.rows, t.cols, w.ambient_dim
        )));
    }
    let d = w.dim();
    let mut s = Matrix::zeros(d, d);
    for i in 0..d {
        let img = t.apply(w.basis.row(i), field);
        let Some(coords) = w.coordinates(&img, field) else {
            return Ok(None);
        };
        for (j, c) in coords.into_iter().enumerate() {
            s[(j, i)] = c;
        }
    }
    Ok(Some(s))
}

/// Uniform element of GL_n(F_q) by rejection: fill entries uniformly and
/// retry until invertible. Also returns the number of draws used.
pub fn random_gl_with_attempts<R: Rng + ?Sized>(
    n: usize,
    field: &Field,
    rng: &mut R,
) -> (Matrix, u64) {
    let q = field.order() as usize;
    let mut attempts = 0;
    loop {
        attempts += 1;
        let data = (0..n * n).map(|_| field.element(rng.random_range(0..q))).collect();
        let m = Matrix { rows: n, cols: n, data };
        if m.is_invertible(field) {
            return (m, attempts);
        }
    }
}

pub fn random_gl<R: Rng + ?Sized>(n: usize, field: &Field, rng: &mut R) -> Matrix {
    random_gl_with_attempts(n, field, rng).0
}

/// [`random_gl`] driven by a ChaCha8 stream seeded from `seed`.
pub fn random_gl_seeded(n: usize, field: &Field, seed: u64) -> Matrix {
    random_gl(n, field, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// prod_{i=1..n} (1 - q^{-i}), the chance a uniform matrix is invertible.
pub fn invertible_fraction(n: usize, q: u32) -> f64 {
    (1..=n as i32).map(|i| 1.0 - (q as f64).powi(-i)).product()
}
