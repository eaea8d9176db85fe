//! Dense matrices and subspace arithmetic over an arbitrary [`Field`].
//!
//! Subspaces are carried as lists of column vectors. All routines use
//! plain Gaussian elimination, which is exact over the rationals.

use std::ops::{Add, Mul, Neg, Sub};

use crate::scalar::Field;

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

pub type Vector<F> = Vec<F>;

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_cols(dim: usize, cols: &[Vector<F>]) -> Self {
        let mut m = Self::zeros(dim, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), dim);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
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

    pub fn row(&self, i: usize) -> Vector<F> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vector<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<F>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &F) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.clone() * s.clone()).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn apply(&self, v: &[F]) -> Vector<F> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = F::zero();
                for j in 0..self.cols {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !v[j].is_zero() {
                        acc = acc + a.clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Sub-block `[r0..r1) x [c0..c1)`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut b = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                b[(i - r0, j - c0)] = self[(i, j)].clone();
            }
        }
        b
    }

    /// Assembles `[[a, b], [c, d]]`.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut m = Self::zeros(a.rows + c.rows, a.cols + b.cols);
        for (blk, r0, c0) in [(a, 0, 0), (b, 0, a.cols), (c, a.rows, 0), (d, a.rows, a.cols)] {
            for i in 0..blk.rows {
                for j in 0..blk.cols {
                    m[(r0 + i, c0 + j)] = blk[(i, j)].clone();
                }
            }
        }
        m
    }

    pub fn is_antisymmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self[(i, j)] == -self[(j, i)].clone()))
    }

    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = F::one() / self[(r, c)].clone();
            for j in c..self.cols {
                self[(r, j)] = self[(r, j)].clone() * inv.clone();
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        if !self[(r, j)].is_zero() {
                            self[(i, j)] = self[(i, j)].clone() - f.clone() * self[(r, j)].clone();
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the kernel, as column vectors.
    pub fn nullspace(&self) -> Vec<Vector<F>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![F::zero(); self.cols];
                v[f] = F::one();
                for (r, &p) in pivots.iter().enumerate() {
                    v[p] = -m[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Self::zeros(0, 0));
        }
        let mut aug = Self::from_blocks(self, &Self::identity(n), &Self::zeros(0, n), &Self::zeros(0, n));
        let pivots = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return None;
        }
        Some(aug.block(0, n, n, 2 * n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::identity(self.rows);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }
}

impl<F> std::ops::Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        &self.data[i * self.cols + j]
    }
}

impl<F> std::ops::IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        &mut self.data[i * self.cols + j]
    }
}

impl<F: Field> Mul for &Matrix<F> {
    type Output = Matrix<F>;
    fn mul(self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out: Matrix<F> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }
}

impl<F: Field> Add for &Matrix<F> {
    type Output = Matrix<F>;
    fn add(self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }
}

impl<F: Field> Sub for &Matrix<F> {
    type Output = Matrix<F>;
    fn sub(self, rhs: &Matrix<F>) -> Matrix<F> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a.clone() - b.clone()).collect(),
        }
    }
}

impl<F: Field> Neg for &Matrix<F> {
    type Output = Matrix<F>;
    fn neg(self) -> Matrix<F> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a.clone()).collect() }
    }
}

// ---------------------------------------------------------------------------
// vectors and subspaces

pub fn dot<F: Field>(a: &[F], b: &[F]) -> F {
    a.iter().zip(b).fold(F::zero(), |acc, (x, y)| {
        if x.is_zero() || y.is_zero() {
            acc
        } else {
            acc + x.clone() * y.clone()
        }
    })
}

pub fn vadd<F: Field>(a: &[F], b: &[F]) -> Vector<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn vsub<F: Field>(a: &[F], b: &[F]) -> Vector<F> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn vscale<F: Field>(a: &[F], s: &F) -> Vector<F> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}

pub fn is_zero_vec<F: Field>(a: &[F]) -> bool {
    a.iter().all(F::is_zero)
}

pub fn unit<F: Field>(dim: usize, i: usize) -> Vector<F> {
    let mut v = vec![F::zero(); dim];
    v[i] = F::one();
    v
}

/// Rank of a family of vectors.
pub fn span_rank<F: Field>(dim: usize, vecs: &[Vector<F>]) -> usize {
    if vecs.is_empty() {
        return 0;
    }
    Matrix::from_cols(dim, vecs).rank()
}

/// A reduced basis (row echelon rows) of the span.
pub fn basis<F: Field>(dim: usize, vecs: &[Vector<F>]) -> Vec<Vector<F>> {
    if vecs.is_empty() {
        return Vec::new();
    }
    let mut m = Matrix::from_cols(dim, vecs).transpose();
    let r = m.rref().len();
    (0..r).map(|i| m.row(i)).collect()
}

/// Extracts a maximal independent subfamily, preserving order.
pub fn independent_subset<F: Field>(dim: usize, vecs: &[Vector<F>]) -> Vec<Vector<F>> {
    let mut out: Vec<Vector<F>> = Vec::new();
    for v in vecs {
        if !in_span(dim, &out, v) {
            out.push(v.clone());
        }
    }
    out
}

pub fn in_span<F: Field>(dim: usize, space: &[Vector<F>], v: &[F]) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    if space.is_empty() {
        return false;
    }
    let mut all = space.to_vec();
    all.push(v.to_vec());
    span_rank(dim, &all) == span_rank(dim, space)
}

pub fn contains<F: Field>(dim: usize, big: &[Vector<F>], small: &[Vector<F>]) -> bool {
    small.iter().all(|v| in_span(dim, big, v))
}

pub fn same_span<F: Field>(dim: usize, a: &[Vector<F>], b: &[Vector<F>]) -> bool {
    span_rank(dim, a) == span_rank(dim, b) && contains(dim, a, b)
}

/// Vectors in `space` failing membership in `big`.
pub fn not_contained<F: Field>(dim: usize, big: &[Vector<F>], space: &[Vector<F>]) -> Option<Vector<F>> {
    space.iter().find(|v| !in_span(dim, big, v)).cloned()
}

/// Basis of the intersection of two spans.
pub fn intersection<F: Field>(dim: usize, a: &[Vector<F>], b: &[Vector<F>]) -> Vec<Vector<F>> {
    let a = independent_subset(dim, a);
    let b = independent_subset(dim, b);
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Solve sum x_i a_i - sum y_j b_j = 0.
    let mut cols = a.clone();
    cols.extend(b.iter().map(|v| v.iter().map(|x| -x.clone()).collect::<Vec<_>>()));
    let m = Matrix::from_cols(dim, &cols);
    let ker = m.nullspace();
    let vecs: Vec<Vector<F>> = ker
        .iter()
        .map(|k| {
            let mut v = vec![F::zero(); dim];
            for (i, ai) in a.iter().enumerate() {
                if !k[i].is_zero() {
                    v = vadd(&v, &vscale(ai, &k[i]));
                }
            }
            v
        })
        .collect();
    independent_subset(dim, &vecs)
}

/// Orthogonal complement `{v : form(v, w) = 0 for all w in space}` for a
/// bilinear form given by its Gram matrix.
pub fn orthogonal_complement<F: Field>(gram: &Matrix<F>, space: &[Vector<F>]) -> Vec<Vector<F>> {
    let dim = gram.rows();
    if space.is_empty() {
        return (0..dim).map(|i| unit(dim, i)).collect();
    }
    let rows: Vec<Vec<F>> = space.iter().map(|w| gram.apply(w)).collect();
    Matrix::from_rows(rows).nullspace()
}

/// Greedily completes `base` by elements of `candidates` to a basis of
/// `base + span(candidates)`, returning only the added vectors.
pub fn complete_basis<F: Field>(dim: usize, base: &[Vector<F>], candidates: &[Vector<F>]) -> Vec<Vector<F>> {
    let mut current = independent_subset(dim, base);
    let mut added = Vec::new();
    for c in candidates {
        if !in_span(dim, &current, c) {
            current.push(c.clone());
            added.push(c.clone());
        }
    }
    added
}

/// Coordinates of `v` in the (independent) family `basis`, if `v` lies
/// in its span.
pub fn coordinates<F: Field>(dim: usize, basis: &[Vector<F>], v: &[F]) -> Option<Vector<F>> {
    let k = basis.len();
    let mut cols = basis.to_vec();
    cols.push(v.to_vec());
    let mut m = Matrix::from_cols(dim, &cols);
    let pivots = m.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![F::zero(); k];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = m[(r, k)].clone();
    }
    Some(x)
}
