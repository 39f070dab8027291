//! Dense linear algebra over F_q.
//!
//! Vectors are columns. Matrices are row-major and carry a handle to their
//! field so products and echelon forms need no extra context.

mod subspace;

pub use subspace::Subspace;

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::gf::{Field, FieldCtx, Fq};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular")]
    Singular,
    #[error("zero vector where a nonzero one is required")]
    ZeroVector,
    #[error("matrix is not square")]
    NotSquare,
}

/// Column vector over F_q.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Vector(pub Vec<Fq>);

impl Vector {
    pub fn zero(len: usize) -> Self {
        Vector(vec![Fq::ZERO; len])
    }

    /// Standard basis vector `e_k` (0-based `k`).
    pub fn unit(len: usize, k: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[k] = Fq::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn leading_index(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_zero())
    }

    /// Scales so the first nonzero coordinate is 1.
    pub fn normalized(&self, field: &FieldCtx) -> Self {
        match self.leading_index() {
            None => self.clone(),
            Some(i) => {
                let s = field.inv(self.0[i]).expect("nonzero lead");
                Vector(self.0.iter().map(|&x| field.mul(s, x)).collect())
            }
        }
    }

    pub fn encodings(&self) -> Vec<u32> {
        self.0.iter().map(|x| x.encoding()).collect()
    }

    pub fn random(field: &FieldCtx, len: usize, rng: &mut impl Rng) -> Self {
        Vector((0..len).map(|_| random_element(field, rng)).collect())
    }

    pub fn dot(&self, other: &Vector, field: &FieldCtx) -> Fq {
        self.0
            .iter()
            .zip(&other.0)
            .fold(Fq::ZERO, |acc, (&a, &b)| field.add(acc, field.mul(a, b)))
    }
}

pub fn random_element(field: &FieldCtx, rng: &mut impl Rng) -> Fq {
    field.element(rng.gen_range(0..field.order())).expect("in range")
}

pub fn random_nonzero(field: &FieldCtx, rng: &mut impl Rng) -> Fq {
    field.element(rng.gen_range(1..field.order())).expect("in range")
}

#[derive(Clone)]
pub struct Matrix {
    field: Field,
    rows: usize,
    cols: usize,
    data: Vec<Fq>,
}

impl PartialEq for Matrix {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data == other.data
            && *self.field == *other.field
    }
}

impl Eq for Matrix {}

impl std::hash::Hash for Matrix {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.rows.hash(state);
        self.cols.hash(state);
        self.data.hash(state);
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Result of [`Matrix::rref`]: `transform * input == reduced`.
#[derive(Clone, Debug)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub transform: Matrix,
    pub pivots: Vec<usize>,
}

impl Matrix {
    pub fn zeros(field: &Field, rows: usize, cols: usize) -> Self {
        Matrix { field: field.clone(), rows, cols, data: vec![Fq::ZERO; rows * cols] }
    }

    pub fn identity(field: &Field, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, Fq::ONE);
        }
        m
    }

    pub fn from_rows(field: &Field, rows: Vec<Vec<Fq>>) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(LinalgError::Dimension("ragged rows".into()));
        }
        Ok(Matrix { field: field.clone(), rows: r, cols: c, data: rows.concat() })
    }

    /// Builds from integer encodings, row-major.
    pub fn from_encodings(field: &Field, rows: usize, cols: usize, enc: &[u64]) -> Result<Self, LinalgError> {
        if enc.len() != rows * cols {
            return Err(LinalgError::Dimension(format!("{} entries for {rows}x{cols}", enc.len())));
        }
        let data = enc
            .iter()
            .map(|&e| field.element(e).map_err(|e| LinalgError::Dimension(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(Matrix { field: field.clone(), rows, cols, data })
    }

    pub fn from_columns(field: &Field, cols: &[Vector]) -> Result<Self, LinalgError> {
        let n = cols.first().map_or(0, |v| v.len());
        if cols.iter().any(|v| v.len() != n) {
            return Err(LinalgError::Dimension("columns of unequal length".into()));
        }
        let mut m = Self::zeros(field, n, cols.len());
        for (j, v) in cols.iter().enumerate() {
            for i in 0..n {
                m.set(i, j, v.0[i]);
            }
        }
        Ok(m)
    }

    pub fn diagonal(field: &Field, diag: &[Fq]) -> Self {
        let mut m = Self::zeros(field, diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    /// Uniform over all `rows x cols` matrices.
    pub fn random(field: &Field, rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        let data = (0..rows * cols).map(|_| random_element(field, rng)).collect();
        Matrix { field: field.clone(), rows, cols, data }
    }

    /// Uniform over GL_n(F_q), by rejection from uniform matrices.
    pub fn random_invertible(field: &Field, n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let m = Self::random(field, n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: Fq) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[Fq] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn entries(&self) -> &[Fq] {
        &self.data
    }

    /// Row-major integer encodings of the entries.
    pub fn encodings(&self) -> Vec<u32> {
        self.data.iter().map(|x| x.encoding()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<(), LinalgError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(LinalgError::Dimension(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        self.check_same_shape(other)?;
        let f = &self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(Matrix { field: f.clone(), rows: self.rows, cols: self.cols, data })
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::Dimension(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let f = &self.field;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * other.cols + j;
                    out.data[idx] = f.add(out.data[idx], f.mul(a, other.get(k, j)));
                }
            }
        }
        Ok(out)
    }

    /// Product; panics on a dimension mismatch.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        self.try_mul(other).expect("matrix dimensions")
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.try_add(other).expect("matrix dimensions")
    }

    pub fn mul_vec(&self, v: &Vector) -> Vector {
        assert_eq!(self.cols, v.len(), "matrix-vector dimensions");
        let f = &self.field;
        Vector(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(&v.0)
                        .fold(Fq::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
                })
                .collect(),
        )
    }

    pub fn scalar_mul(&self, s: Fq) -> Matrix {
        let f = &self.field;
        Matrix {
            field: f.clone(),
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| f.mul(s, a)).collect(),
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(&self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Reduced row-echelon form with the accumulated row operations.
    pub fn rref(&self) -> Rref {
        let f = &self.field;
        let (rows, cols) = (self.rows, self.cols);
        let mut r = self.clone();
        let mut t = Matrix::identity(f, rows);
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..cols {
            if pr == rows {
                break;
            }
            let Some(sel) = (pr..rows).find(|&i| !r.get(i, c).is_zero()) else {
                continue;
            };
            r.swap_rows(pr, sel);
            t.swap_rows(pr, sel);
            let s = f.inv(r.get(pr, c)).expect("pivot nonzero");
            r.scale_row(pr, s);
            t.scale_row(pr, s);
            for i in 0..rows {
                if i != pr {
                    let factor = r.get(i, c);
                    if !factor.is_zero() {
                        r.add_row_multiple(i, pr, f.neg(factor));
                        t.add_row_multiple(i, pr, f.neg(factor));
                    }
                }
            }
            pivots.push(c);
            pr += 1;
        }
        Rref { reduced: r, rank: pr, transform: t, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, i: usize, s: Fq) {
        for j in 0..self.cols {
            let idx = i * self.cols + j;
            self.data[idx] = self.field.mul(s, self.data[idx]);
        }
    }

    /// row[dst] += s * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, s: Fq) {
        for j in 0..self.cols {
            let v = self.field.mul(s, self.get(src, j));
            let idx = dst * self.cols + j;
            self.data[idx] = self.field.add(self.data[idx], v);
        }
    }

    pub fn det(&self) -> Result<Fq, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let f = &self.field;
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Fq::ONE;
        for c in 0..n {
            let Some(sel) = (c..n).find(|&i| !m.get(i, c).is_zero()) else {
                return Ok(Fq::ZERO);
            };
            if sel != c {
                m.swap_rows(c, sel);
                det = f.neg(det);
            }
            let pivot = m.get(c, c);
            det = f.mul(det, pivot);
            let inv = f.inv(pivot).expect("pivot nonzero");
            for i in c + 1..n {
                let factor = f.mul(m.get(i, c), inv);
                if !factor.is_zero() {
                    m.add_row_multiple(i, c, f.neg(factor));
                }
            }
        }
        Ok(det)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    pub fn inverse(&self) -> Result<Matrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        let rr = self.rref();
        if rr.rank < self.rows {
            return Err(LinalgError::Singular);
        }
        Ok(rr.transform)
    }

    /// Right null space `{v : M v = 0}`.
    pub fn kernel(&self) -> Subspace {
        let f = &self.field;
        let rr = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !rr.pivots.contains(c)).collect();
        let basis = free
            .iter()
            .map(|&fc| {
                let mut v = Vector::zero(self.cols);
                v.0[fc] = Fq::ONE;
                for (row, &pc) in rr.pivots.iter().enumerate() {
                    v.0[pc] = f.neg(rr.reduced.get(row, fc));
                }
                v
            })
            .collect();
        Subspace::span(f, self.cols, basis)
    }

    /// `X^{-1} A X`.
    pub fn conjugate_by(&self, x: &Matrix) -> Result<Matrix, LinalgError> {
        let xi = x.inverse()?;
        xi.try_mul(self)?.try_mul(x)
    }

    /// `tr(A)`.
    pub fn trace(&self) -> Result<Fq, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare);
        }
        Ok((0..self.rows).fold(Fq::ZERO, |acc, i| self.field.add(acc, self.get(i, i))))
    }

    /// `sum_ij a_ij b_ij`, which equals `tr(A B^T)`.
    pub fn frobenius_form(&self, other: &Matrix) -> Result<Fq, LinalgError> {
        self.check_same_shape(other)?;
        let f = &self.field;
        Ok(self.data.iter().zip(&other.data).fold(Fq::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }

    /// `diag(self, I_extra)`.
    pub fn block_with_identity(&self, extra: usize) -> Matrix {
        let n = self.rows + extra;
        let mut out = Matrix::identity(&self.field, n);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// Upper-left `k x k` block.
    pub fn leading_block(&self, k: usize) -> Matrix {
        let mut out = Matrix::zeros(&self.field, k, k);
        for i in 0..k {
            for j in 0..k {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_strictly_upper_triangular(&self) -> bool {
        (0..self.rows).all(|i| (0..=i.min(self.cols.saturating_sub(1))).all(|j| self.get(i, j).is_zero()))
    }
}

/// Invertible matrix whose last column is `u`.
///
/// The other columns are `e_1, e_2, ...` in order, skipping `e_i` where `i` is
/// the position of the first nonzero entry of `u`. For `u = e_n` this is `I`.
pub fn complete_to_invertible(field: &Field, u: &Vector) -> Result<Matrix, LinalgError> {
    let n = u.len();
    let lead = u.leading_index().ok_or(LinalgError::ZeroVector)?;
    let mut cols: Vec<Vector> = (0..n).filter(|&i| i != lead).map(|i| Vector::unit(n, i)).collect();
    cols.push(u.clone());
    Matrix::from_columns(field, &cols)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(q: u64) -> Field {
        FieldCtx::of_order(q).unwrap()
    }

    #[test]
    fn identity_and_transpose_laws() {
        let field = f(4);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = Matrix::random(&field, 3, 3, &mut rng);
            let b = Matrix::random(&field, 3, 3, &mut rng);
            let i = Matrix::identity(&field, 3);
            assert_eq!(i.mul(&a), a);
            assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
            let minus_one = field.neg(Fq::ONE);
            assert!(a.add(&a.scalar_mul(minus_one)).is_zero());
        }
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let field = f(2);
        let a = Matrix::zeros(&field, 2, 3);
        assert!(a.try_mul(&a).is_err());
        assert!(a.try_add(&Matrix::zeros(&field, 3, 2)).is_err());
        assert_eq!(a.det(), Err(LinalgError::NotSquare));
    }

    #[test]
    fn rref_examples() {
        let field = f(3);
        let i = Matrix::identity(&field, 3);
        let rr = i.rref();
        assert_eq!((rr.reduced.clone(), rr.rank, rr.transform.clone()), (i.clone(), 3, i.clone()));
        let z = Matrix::zeros(&field, 3, 3);
        let rr = z.rref();
        assert_eq!(rr.rank, 0);
        assert_eq!(rr.transform, i);

        let f2 = f(2);
        let shift = Matrix::from_encodings(&f2, 3, 3, &[0, 1, 0, 0, 0, 1, 0, 0, 0]).unwrap();
        assert_eq!(shift.rank(), 2);
    }

    #[test]
    fn rref_properties_random() {
        let field = f(5);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let rows = rng.gen_range(1..5);
            let cols = rng.gen_range(1..5);
            let m = Matrix::random(&field, rows, cols, &mut rng);
            let rr = m.rref();
            assert_eq!(rr.transform.mul(&m), rr.reduced);
            assert!(rr.transform.is_invertible());
            assert_eq!(rr.reduced.rref().reduced, rr.reduced);
            assert_eq!(m.rank(), m.transpose().rank());
            assert_eq!(m.kernel().dim() + rr.rank, cols);
            for v in m.kernel().basis() {
                assert!(m.mul_vec(v).is_zero());
            }
        }
    }

    #[test]
    fn determinant_and_inverse() {
        let field = f(9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(Matrix::identity(&field, 4).det().unwrap(), Fq::ONE);
        for _ in 0..300 {
            let n = rng.gen_range(1..=4);
            let diag: Vec<Fq> = (0..n).map(|_| random_element(&field, &mut rng)).collect();
            let prod = diag.iter().fold(Fq::ONE, |acc, &d| field.mul(acc, d));
            assert_eq!(Matrix::diagonal(&field, &diag).det().unwrap(), prod);

            let a = Matrix::random(&field, n, n, &mut rng);
            let b = Matrix::random(&field, n, n, &mut rng);
            let lhs = a.mul(&b).det().unwrap();
            assert_eq!(lhs, field.mul(a.det().unwrap(), b.det().unwrap()));
            match a.inverse() {
                Ok(inv) => {
                    assert_eq!(a.mul(&inv), Matrix::identity(&field, n));
                    assert!(!a.det().unwrap().is_zero());
                }
                Err(e) => {
                    assert_eq!(e, LinalgError::Singular);
                    assert!(a.det().unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        let field = f(3);
        assert_eq!(Matrix::identity(&field, 3).kernel().dim(), 0);
        assert_eq!(Matrix::zeros(&field, 3, 3).kernel().dim(), 3);
        // Strictly upper triangular with nonzero superdiagonal; kernel of its
        // transpose is span(e_n).
        let z = Matrix::from_encodings(&field, 3, 3, &[0, 1, 2, 0, 0, 2, 0, 0, 0]).unwrap();
        let ker = z.transpose().kernel();
        assert_eq!(ker, Subspace::span(&field, 3, vec![Vector::unit(3, 2)]));
    }

    #[test]
    fn conjugation_and_traces() {
        let field = f(9);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..300 {
            let n = rng.gen_range(1..=4);
            let a = Matrix::random(&field, n, n, &mut rng);
            let b = Matrix::random(&field, n, n, &mut rng);
            let x = Matrix::random_invertible(&field, n, &mut rng);
            let w = Matrix::random_invertible(&field, n, &mut rng);
            let i = Matrix::identity(&field, n);
            assert_eq!(a.conjugate_by(&i).unwrap(), a);
            assert_eq!(i.conjugate_by(&x).unwrap(), i);
            assert_eq!(
                a.conjugate_by(&w).unwrap().conjugate_by(&x).unwrap(),
                a.conjugate_by(&w.mul(&x)).unwrap()
            );
            let c = a.conjugate_by(&x).unwrap();
            assert_eq!(c.trace().unwrap(), a.trace().unwrap());
            assert_eq!(c.rank(), a.rank());
            assert_eq!(c.det().unwrap(), a.det().unwrap());
            assert_eq!(a.mul(&b).trace().unwrap(), b.mul(&a).trace().unwrap());
            assert_eq!(a.frobenius_form(&b).unwrap(), a.mul(&b.transpose()).trace().unwrap());
            assert_eq!(a.frobenius_form(&b).unwrap(), b.frobenius_form(&a).unwrap());
        }
        let i3 = Matrix::identity(&field, 3);
        assert_eq!(i3.frobenius_form(&i3).unwrap(), field.from_int(3));
        assert!(Matrix::zeros(&field, 2, 2).conjugate_by(&Matrix::zeros(&field, 2, 2)).is_err());
    }

    #[test]
    fn random_invertible_acceptance_rate() {
        let field = f(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 100_000;
        let hits = (0..trials).filter(|_| Matrix::random(&field, 3, 3, &mut rng).is_invertible()).count();
        let p = 21.0 / 64.0;
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((hits as f64 / trials as f64 - p).abs() < 3.0 * sigma);
        for _ in 0..100 {
            assert!(Matrix::random_invertible(&field, 3, &mut rng).is_invertible());
            assert_eq!(Matrix::random_invertible(&field, 1, &mut rng), Matrix::identity(&field, 1));
        }
    }

    #[test]
    fn completion_rule() {
        let field = f(3);
        assert_eq!(complete_to_invertible(&field, &Vector::unit(3, 2)).unwrap(), Matrix::identity(&field, 3));
        let z = complete_to_invertible(&field, &Vector::unit(2, 0)).unwrap();
        assert_eq!(z.encodings(), vec![0, 1, 1, 0]);
        assert_eq!(complete_to_invertible(&field, &Vector::zero(3)), Err(LinalgError::ZeroVector));
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let u = Vector::random(&field, 4, &mut rng);
            if u.is_zero() {
                continue;
            }
            let z = complete_to_invertible(&field, &u).unwrap();
            assert!(!z.det().unwrap().is_zero());
            assert_eq!(z.column(3), u);
        }
    }
}
