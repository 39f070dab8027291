//! Exact outcome law of measuring the Fourier transform of a Borel coset state.
//!
//! For the coset `H B` with `H = X^{-1} L_e X`, the amplitude of outcome `Y` is
//! a character sum over `A` in `L_e` of `omega^{Tr(tr(A M))}` where
//! `M = X B Y^T X^{-1}`. Since `tr(A M) = sum a_ij M_ji` over the lower
//! triangle, the sum splits entry by entry: every free strictly-lower entry
//! contributes `q [M_ji = 0]`, so only lower triangular `M` survive, and the
//! diagonal contributes a sum over the allowed diagonals of `L_e`.
//!
//! For the full group of lower triangular matrices the diagonal factor is
//! `prod_i ((q-1)[M_ii = 0] - [M_ii != 0])`, giving
//!
//! `P(Y) = q^{n(n-1)} (q-1)^{2k} / ((q-1)^n q^{n(n-1)/2 + n^2})`
//!
//! with `k` the number of zero diagonal entries of `M`. Here `L_e` is the group
//! of invertible lower triangular matrices whose determinant is an e-th power;
//! `e = 1` is the GL case. For `gcd(e, q-1) > 1` the diagonal factor is
//! tabulated numerically.
//!
//! Since `Y -> M` is a linear bijection, sampling draws `M` and maps back.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use super::hsp::{vector_from_index, vector_index};
use super::QuantumError;
use crate::gf::{gcd_u64, Field, Fq};
use crate::linalg::{random_element, Matrix, Subspace, Vector};
use crate::scalar::Probability;

/// Largest number of outcomes materialized by dense distributions.
pub const DENSE_OUTCOME_CAP: u64 = 1 << 20;

/// Largest amount of work for tabulating a non-product diagonal law.
pub const DIAGONAL_TABLE_CAP: u64 = 1 << 28;

/// Index of an `n x n` matrix among all `q^{n^2}`: row-major entries as base-q
/// digits, least significant first.
pub fn matrix_index(m: &Matrix) -> usize {
    vector_index(&Vector(m.entries().to_vec()), m.field().order())
}

pub fn matrix_from_index(field: &Field, n: usize, idx: usize) -> Matrix {
    let v = vector_from_index(field, n * n, idx);
    Matrix::from_rows(field, v.0.chunks(n.max(1)).map(|c| c.to_vec()).collect()).expect("square")
}

pub(crate) fn dense_outcome_count(q: u64, n: usize) -> Result<usize, QuantumError> {
    q.checked_pow((n * n) as u32)
        .filter(|&s| s <= DENSE_OUTCOME_CAP)
        .map(|s| s as usize)
        .ok_or_else(|| QuantumError::TooLarge(format!("{q}^{} outcomes", n * n)))
}

/// Probability of every outcome `Y`, indexed by [`matrix_index`].
#[derive(Debug, Clone)]
pub struct OutcomeDistribution<P> {
    field: Field,
    n: usize,
    probs: Vec<P>,
}

impl<P: Probability> OutcomeDistribution<P> {
    pub fn new(field: &Field, n: usize, probs: Vec<P>) -> Result<Self, QuantumError> {
        if probs.len() != dense_outcome_count(field.order(), n)? {
            return Err(QuantumError::Dimension(format!("{} probabilities for n={n}", probs.len())));
        }
        Ok(OutcomeDistribution { field: field.clone(), n, probs })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probabilities(&self) -> &[P] {
        &self.probs
    }

    pub fn probability(&self, y: &Matrix) -> P {
        self.probs[matrix_index(y)].clone()
    }

    pub fn outcome(&self, idx: usize) -> Matrix {
        matrix_from_index(&self.field, self.n, idx)
    }

    /// `(Y, P(Y))` for every outcome.
    pub fn iter(&self) -> impl Iterator<Item = (Matrix, &P)> + '_ {
        self.probs.iter().enumerate().map(|(i, p)| (self.outcome(i), p))
    }

    pub fn total_mass(&self) -> P {
        self.probs.iter().fold(P::zero(), |acc, p| acc + p.clone())
    }

    pub fn mass_where(&self, mut pred: impl FnMut(&Matrix) -> bool) -> P {
        self.iter().filter(|(y, _)| pred(y)).fold(P::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(Probability::to_f64).collect()
    }

    /// Largest pointwise difference, in double precision.
    pub fn max_abs_diff<Q: Probability>(&self, other: &OutcomeDistribution<Q>) -> f64 {
        self.to_f64().iter().zip(other.to_f64()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Total-variation distance to the empirical law of `counts`.
    pub fn total_variation(&self, counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let half: f64 = self
            .to_f64()
            .iter()
            .zip(counts)
            .map(|(p, &c)| (p - c as f64 / total as f64).abs())
            .sum();
        half / 2.0
    }

    /// Draws an outcome by inverting the cumulative distribution.
    pub fn sample(&self, rng: &mut impl Rng) -> Matrix {
        let u: f64 = rng.gen();
        let probs = self.to_f64();
        let total: f64 = probs.iter().sum();
        let target = u * total;
        let mut acc = 0.0;
        for (i, p) in probs.iter().enumerate() {
            acc += p;
            if target < acc {
                return self.outcome(i);
            }
        }
        let last = probs.iter().rposition(|&p| p > 0.0).unwrap_or(probs.len() - 1);
        self.outcome(last)
    }
}

#[derive(Debug, Clone)]
enum DiagonalLaw {
    /// Independent entries: zero with probability `(q-1)/q`, each nonzero value
    /// with probability `1/(q(q-1))`.
    Product,
    /// Probability of each diagonal, indexed by base-q digits.
    Table { probs: Vec<f64>, cdf: Vec<f64> },
}

/// The law of `M` for the coset states of a hidden `L_e`-conjugate.
#[derive(Debug, Clone)]
pub struct CosetLaw {
    field: Field,
    n: usize,
    e: u64,
    d: u64,
    diag: DiagonalLaw,
}

impl CosetLaw {
    /// Law for the full group of invertible lower triangular matrices.
    pub fn gl(field: &Field, n: usize) -> Self {
        CosetLaw { field: field.clone(), n, e: 1, d: 1, diag: DiagonalLaw::Product }
    }

    /// Law for lower triangular matrices with determinant an e-th power.
    pub fn new(field: &Field, n: usize, e: u64) -> Result<Self, QuantumError> {
        if e == 0 {
            return Err(QuantumError::Dimension("determinant exponent must be positive".into()));
        }
        let q = field.order();
        let d = gcd_u64(e, q - 1);
        if d == 1 {
            return Ok(CosetLaw { e, ..Self::gl(field, n) });
        }
        let cells = q.checked_pow(n as u32);
        let work = cells.and_then(|c| c.checked_mul((q - 1).pow(n as u32) / d));
        let cells = match (cells, work) {
            (Some(c), Some(w)) if w <= DIAGONAL_TABLE_CAP => c as usize,
            _ => return Err(QuantumError::TooLarge(format!("diagonal table for q={q}, n={n}"))),
        };
        let tuples = allowed_diagonals(field, n, e);
        let p = field.characteristic() as usize;
        let omega: Vec<num_complex::Complex<f64>> = (0..p as u64).map(|k| field.root_of_unity::<f64>(k)).collect();
        let norm = d as f64 / ((q - 1) as f64).powi(n as i32) / (q as f64).powi(n as i32);
        let probs: Vec<f64> = (0..cells)
            .into_par_iter()
            .map(|idx| {
                let m = vector_from_index(field, n, idx);
                let mut counts = vec![0u64; p];
                for a in &tuples {
                    let s = a.iter().zip(&m.0).fold(Fq::ZERO, |acc, (&x, &y)| field.add(acc, field.mul(x, y)));
                    counts[field.trace(s) as usize] += 1;
                }
                let sum: num_complex::Complex<f64> = counts.iter().zip(&omega).map(|(&c, &w)| w * c as f64).sum();
                sum.norm_sqr() * norm
            })
            .collect();
        let mut cdf = Vec::with_capacity(cells);
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cdf.push(acc);
        }
        Ok(CosetLaw { field: field.clone(), n, e, d, diag: DiagonalLaw::Table { probs, cdf } })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn det_exponent(&self) -> u64 {
        self.e
    }

    /// `gcd(e, q - 1)`, the index of `L_e` in the lower triangular group.
    pub fn index(&self) -> u64 {
        self.d
    }

    /// `M = X B Y^T X^{-1}`.
    pub fn m_matrix(x: &Matrix, x_inv: &Matrix, b: &Matrix, y: &Matrix) -> Matrix {
        x.mul(b).mul(&y.transpose()).mul(x_inv)
    }

    /// `Y = (B^{-1} X^{-1} M X)^T`.
    pub fn outcome_from_m(x: &Matrix, x_inv: &Matrix, b_inv: &Matrix, m: &Matrix) -> Matrix {
        b_inv.mul(x_inv).mul(m).mul(x).transpose()
    }

    /// Probability of a diagonal of `M`.
    pub fn diagonal_probability(&self, diag: &[Fq]) -> f64 {
        let q = self.field.order() as f64;
        match &self.diag {
            DiagonalLaw::Product => diag
                .iter()
                .map(|x| if x.is_zero() { (q - 1.0) / q } else { 1.0 / (q * (q - 1.0)) })
                .product(),
            DiagonalLaw::Table { probs, .. } => probs[vector_index(&Vector(diag.to_vec()), self.field.order())],
        }
    }

    fn sample_diagonal(&self, rng: &mut impl Rng) -> Vec<Fq> {
        let f = &self.field;
        match &self.diag {
            DiagonalLaw::Product => {
                let q = f.order();
                (0..self.n)
                    .map(|_| {
                        // (q-1)^2 of the q(q-1) cells mean zero, one cell per nonzero value
                        let u = rng.gen_range(0..q * (q - 1));
                        if u < (q - 1) * (q - 1) {
                            Fq::ZERO
                        } else {
                            let v = u - (q - 1) * (q - 1);
                            f.element(v + 1).expect("nonzero encoding below q")
                        }
                    })
                    .collect()
            }
            DiagonalLaw::Table { cdf, .. } => {
                let total = *cdf.last().expect("nonempty table");
                let u: f64 = rng.gen::<f64>() * total;
                let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                vector_from_index(f, self.n, idx).0
            }
        }
    }

    /// Draws `M`: strict upper part zero, strict lower part uniform, diagonal
    /// from the diagonal law.
    pub fn sample_m(&self, rng: &mut impl Rng) -> Matrix {
        let f = &self.field;
        let mut m = Matrix::zeros(f, self.n, self.n);
        for (i, x) in self.sample_diagonal(rng).into_iter().enumerate() {
            m.set(i, i, x);
        }
        for i in 0..self.n {
            for j in 0..i {
                m.set(i, j, random_element(f, rng));
            }
        }
        m
    }

    /// Samples a measurement outcome for the coset `X^{-1} L_e X B`.
    pub fn sample_outcome(&self, x: &Matrix, b: &Matrix, rng: &mut impl Rng) -> Result<Matrix, QuantumError> {
        let x_inv = x.inverse()?;
        let b_inv = b.inverse()?;
        Ok(Self::outcome_from_m(x, &x_inv, &b_inv, &self.sample_m(rng)))
    }

    /// `P(Y)` in double precision.
    pub fn probability(&self, x: &Matrix, b: &Matrix, y: &Matrix) -> Result<f64, QuantumError> {
        let m = Self::m_matrix(x, &x.inverse()?, b, y);
        Ok(self.probability_of_m(&m))
    }

    fn probability_of_m(&self, m: &Matrix) -> f64 {
        if !m.is_lower_triangular() {
            return 0.0;
        }
        let diag: Vec<Fq> = (0..self.n).map(|i| m.get(i, i)).collect();
        let free = (self.n * (self.n - 1) / 2) as i32;
        self.diagonal_probability(&diag) / (self.field.order() as f64).powi(free)
    }

    /// Dense law over all outcomes in floating point.
    pub fn float_distribution<T: Probability + num_traits::FromPrimitive>(
        &self,
        x: &Matrix,
        b: &Matrix,
    ) -> Result<OutcomeDistribution<T>, QuantumError> {
        let count = dense_outcome_count(self.field.order(), self.n)?;
        let x_inv = x.inverse()?;
        let probs = (0..count)
            .into_par_iter()
            .map(|idx| {
                let y = matrix_from_index(&self.field, self.n, idx);
                let p = self.probability_of_m(&Self::m_matrix(x, &x_inv, b, &y));
                T::from_f64(p).expect("finite probability")
            })
            .collect();
        OutcomeDistribution::new(&self.field, self.n, probs)
    }

    fn diagonal_mass(&self, mut pred: impl FnMut(&[Fq]) -> f64) -> f64 {
        let f = &self.field;
        let q = f.order();
        let cells = q.pow(self.n as u32) as usize;
        (0..cells)
            .map(|idx| {
                let diag = vector_from_index(f, self.n, idx).0;
                let w = pred(&diag);
                if w == 0.0 {
                    0.0
                } else {
                    w * self.diagonal_probability(&diag)
                }
            })
            .sum()
    }

    /// Mass of the perp stratum, `M` strictly lower triangular.
    pub fn perp_mass(&self) -> f64 {
        match self.diag {
            DiagonalLaw::Product => {
                let q = self.field.order() as f64;
                ((q - 1.0) / q).powi(self.n as i32)
            }
            _ => self.diagonal_mass(|d| if d.iter().all(|x| x.is_zero()) { 1.0 } else { 0.0 }),
        }
    }

    /// Mass of the perp stratum intersected with rank `n-1`.
    pub fn success_mass(&self) -> f64 {
        let q = self.field.order() as f64;
        self.perp_mass() * ((q - 1.0) / q).powi(self.n as i32 - 1)
    }

    /// Probability that `Y` has rank `n-1` with `ker Y^T = X^{-1} V_{n-1}`.
    ///
    /// This holds iff `M_nn = 0` and the first `n-1` columns of `M` are
    /// independent. Scanning columns from the right, a column with nonzero
    /// diagonal entry is always independent of the later ones, and one with a
    /// zero diagonal entry is uniform on a space of dimension one more than
    /// the span of the later columns, so it is independent with probability
    /// `1 - 1/q`.
    pub fn guess_mass(&self) -> f64 {
        let q = self.field.order() as f64;
        let n = self.n;
        self.diagonal_mass(|d| {
            if !d[n - 1].is_zero() {
                return 0.0;
            }
            let zeros = d[..n - 1].iter().filter(|x| x.is_zero()).count();
            (1.0 - 1.0 / q).powi(zeros as i32)
        })
    }
}

/// Diagonals `(a_1..a_n)` of nonzero entries whose product is an e-th power.
fn allowed_diagonals(field: &Field, n: usize, e: u64) -> Vec<Vec<Fq>> {
    let mut out: Vec<(Vec<Fq>, Fq)> = vec![(Vec::new(), Fq::ONE)];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * (field.order() as usize - 1));
        for (a, prod) in &out {
            for x in field.nonzero_elements() {
                let mut b = a.clone();
                b.push(x);
                next.push((b, field.mul(*prod, x)));
            }
        }
        out = next;
    }
    out.into_iter().filter(|(_, p)| field.is_nth_power(*p, e)).map(|(a, _)| a).collect()
}

/// Common denominator `(q-1)^n q^{n(n-1)/2 + n^2}` of the GL law.
pub fn exact_denominator(q: u64, n: usize) -> BigUint {
    let n32 = n as u32;
    BigUint::from(q - 1).pow(n32) * BigUint::from(q).pow(n32 * (n32.saturating_sub(1)) / 2 + n32 * n32)
}

/// Numerator of `P(Y)` over [`exact_denominator`] for the GL law, given `M`.
pub fn exact_numerator(q: u64, m: &Matrix) -> BigUint {
    if !m.is_lower_triangular() {
        return BigUint::zero();
    }
    let n = m.rows() as u32;
    let k = (0..m.rows()).filter(|&i| m.get(i, i).is_zero()).count() as u32;
    BigUint::from(q).pow(n * n.saturating_sub(1)) * BigUint::from(q - 1).pow(2 * k)
}

/// Numerators of every outcome over the common [`exact_denominator`].
pub fn exact_weights(x: &Matrix, b: &Matrix) -> Result<(Vec<BigUint>, BigUint), QuantumError> {
    let f = x.field();
    let n = x.rows();
    let q = f.order();
    let count = dense_outcome_count(q, n)?;
    let x_inv = x.inverse()?;
    b.inverse()?;
    let nums = (0..count)
        .into_par_iter()
        .map(|idx| {
            let y = matrix_from_index(f, n, idx);
            exact_numerator(q, &CosetLaw::m_matrix(x, &x_inv, b, &y))
        })
        .collect();
    Ok((nums, exact_denominator(q, n)))
}

/// Exact GL outcome law for the coset `X^{-1} L X B`.
pub fn exact_distribution<P: Probability>(x: &Matrix, b: &Matrix) -> Result<OutcomeDistribution<P>, QuantumError> {
    let (nums, den) = exact_weights(x, b)?;
    let probs = nums.iter().map(|num| P::from_ratio(num, &den)).collect();
    OutcomeDistribution::new(x.field(), x.rows(), probs)
}

/// `{Y : X^{-T} Y B^T X^T strictly upper triangular}` as a subspace of
/// F_q^{n^2} (row-major coordinates).
pub fn perp_of_coset(x: &Matrix, b: &Matrix) -> Result<Subspace, QuantumError> {
    let f = x.field();
    let n = x.rows();
    let x_inv = x.inverse()?;
    let b_inv = b.inverse()?;
    let mut basis = Vec::new();
    for i in 0..n {
        for j in 0..i {
            let mut m = Matrix::zeros(f, n, n);
            m.set(i, j, Fq::ONE);
            let y = CosetLaw::outcome_from_m(x, &x_inv, &b_inv, &m);
            basis.push(Vector(y.entries().to_vec()));
        }
    }
    Ok(Subspace::span(f, n * n, basis))
}

fn ratio_pow(num: u64, den: u64, k: u32) -> BigRational {
    let r = BigRational::new(num.into(), den.into());
    (0..k).fold(BigRational::one(), |acc, _| acc * r.clone())
}

/// `((q-1)/q)^n`.
pub fn perp_mass_exact(q: u64, n: usize) -> BigRational {
    ratio_pow(q - 1, q, n as u32)
}

/// `((q-1)/q)^{2n-1}`.
pub fn success_mass_exact(q: u64, n: usize) -> BigRational {
    ratio_pow(q - 1, q, (2 * n - 1) as u32)
}

/// `((q-1)/q) ((q^2-q+1)/q^2)^{n-1}`, see [`CosetLaw::guess_mass`].
pub fn guess_mass_exact(q: u64, n: usize) -> BigRational {
    ratio_pow(q - 1, q, 1) * ratio_pow(q * q - q + 1, q * q, (n - 1) as u32)
}

/// Fraction of strictly upper triangular `n x n` matrices of rank `n-1`, by
/// enumeration.
pub fn strictly_upper_rank_fraction(field: &Field, n: usize) -> Result<BigRational, QuantumError> {
    let q = field.order();
    let cells = n * n.saturating_sub(1) / 2;
    let total = q
        .checked_pow(cells as u32)
        .filter(|&t| t <= DENSE_OUTCOME_CAP)
        .ok_or_else(|| QuantumError::TooLarge(format!("{q}^{cells} matrices")))?;
    let positions: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let hits = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let mut m = Matrix::zeros(field, n, n);
            let mut rest = idx;
            for &(i, j) in &positions {
                m.set(i, j, field.element(rest % q).expect("digit"));
                rest /= q;
            }
            m.rank() + 1 == n
        })
        .count();
    Ok(BigRational::new(hits.into(), total.into()))
}
