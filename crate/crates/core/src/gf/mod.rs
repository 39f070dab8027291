//! Arithmetic in F_q = F_{p^r}.
//!
//! Elements are stored by their integer encoding `sum(coeffs[i] * p^i)`, where
//! `coeffs` are the little-endian coefficients of the residue polynomial modulo
//! the field's defining polynomial. The encoding doubles as the wire format and
//! as the enumeration order of the field.
//!
//! The defining polynomial is the smallest monic irreducible polynomial of
//! degree `r` in the order of its encoding, which is the lexicographic order of
//! its coefficient list read from the leading term down.

mod poly;

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use crate::scalar::{real, Real};

/// Largest supported field order.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{r} exceeds the supported cap {MAX_FIELD_ORDER}")]
    TooLarge { p: u64, r: u32 },
    #[error("no irreducible polynomial of degree {r} over F_{p} found")]
    NoIrreducible { p: u64, r: u32 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("n-th root of zero requested")]
    ZeroRoot,
    #[error("root exponent must be positive")]
    ZeroExponent,
    #[error("element encoding {0} out of range")]
    BadEncoding(u64),
}

/// Element of F_q, identified by its integer encoding.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fq(u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    /// Integer encoding `sum(coeffs[i] * p^i)`.
    #[inline]
    pub fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shared handle to a field context.
pub type Field = Arc<FieldCtx>;

/// The field F_{p^r} together with its lookup tables.
///
/// Immutable after construction, so a [`Field`] can be shared freely between
/// threads.
pub struct FieldCtx {
    p: u64,
    r: u32,
    q: u64,
    /// Monic defining polynomial, little-endian, length `r + 1`.
    modulus: Vec<u64>,
    /// Multiplicative generator used for the log/exp tables.
    generator: Fq,
    exp: Vec<u32>,
    log: Vec<u32>,
    /// Absolute trace of the power basis `1, x, ..., x^(r-1)`.
    basis_trace: Vec<u64>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl std::hash::Hash for FieldCtx {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.p.hash(state);
        self.r.hash(state);
        self.modulus.hash(state);
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits a prime power `q` into `(p, r)`.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = poly::prime_factors(q);
    if p.len() != 1 {
        return None;
    }
    let p = p[0];
    let mut r = 0;
    let mut m = q;
    while m > 1 {
        m /= p;
        r += 1;
    }
    Some((p, r))
}

pub(crate) fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl FieldCtx {
    /// Builds F_{p^r} with the deterministic choice of defining polynomial.
    pub fn new(p: u64, r: u32) -> Result<Field, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if r == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u128).checked_pow(r).filter(|&q| q <= MAX_FIELD_ORDER as u128);
        let q = q.ok_or(FieldError::TooLarge { p, r })? as u64;

        let modulus = smallest_irreducible(p, r).ok_or(FieldError::NoIrreducible { p, r })?;
        let mut ctx = FieldCtx {
            p,
            r,
            q,
            modulus,
            generator: Fq::ONE,
            exp: Vec::new(),
            log: Vec::new(),
            basis_trace: Vec::new(),
        };
        ctx.build_tables();
        Ok(Arc::new(ctx))
    }

    /// Prime field F_p.
    pub fn prime(p: u64) -> Result<Field, FieldError> {
        Self::new(p, 1)
    }

    /// Field of order `q` (a prime power).
    pub fn of_order(q: u64) -> Result<Field, FieldError> {
        let (p, r) = prime_power(q).ok_or(FieldError::NotPrime(q))?;
        Self::new(p, r)
    }

    fn build_tables(&mut self) {
        let q = self.q;
        if q == 2 {
            self.generator = Fq::ONE;
            self.exp = vec![1];
            self.log = vec![0, 0];
        } else {
            let order = q - 1;
            let factors = poly::prime_factors(order);
            let generator = (2..q)
                .map(|c| Fq(c as u32))
                .find(|&g| factors.iter().all(|&l| self.pow_reference(g, order / l) != Fq::ONE))
                .expect("F_q^* is cyclic");
            let mut exp = Vec::with_capacity(order as usize);
            let mut log = vec![0u32; q as usize];
            let mut cur = Fq::ONE;
            for k in 0..order {
                exp.push(cur.0);
                log[cur.0 as usize] = k as u32;
                cur = self.mul_reference(cur, generator);
            }
            debug_assert_eq!(cur, Fq::ONE);
            self.generator = generator;
            self.exp = exp;
            self.log = log;
        }
        self.basis_trace = (0..self.r)
            .map(|i| {
                let mut coeffs = vec![0u64; self.r as usize];
                coeffs[i as usize] = 1;
                self.trace_by_frobenius(self.encode_coeffs(&coeffs))
            })
            .collect();
    }

    #[inline]
    pub fn characteristic(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.r
    }

    #[inline]
    pub fn order(&self) -> u64 {
        self.q
    }

    /// Defining polynomial, little-endian with the leading 1 included.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Generator of the multiplicative group.
    pub fn generator(&self) -> Fq {
        self.generator
    }

    pub fn element(&self, encoding: u64) -> Result<Fq, FieldError> {
        if encoding < self.q {
            Ok(Fq(encoding as u32))
        } else {
            Err(FieldError::BadEncoding(encoding))
        }
    }

    /// Image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    /// All q elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (0..self.q as u32).map(Fq)
    }

    /// All nonzero elements in encoding order.
    pub fn nonzero_elements(&self) -> impl Iterator<Item = Fq> + '_ {
        (1..self.q as u32).map(Fq)
    }

    pub fn coeffs(&self, x: Fq) -> Vec<u64> {
        let mut v = x.0 as u64;
        (0..self.r)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    fn encode_coeffs(&self, coeffs: &[u64]) -> Fq {
        let enc = coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c % self.p);
        Fq(enc as u32)
    }

    /// Element with the given little-endian coefficients (reduced modulo the
    /// defining polynomial if longer than `r`).
    pub fn from_coeffs(&self, coeffs: &[u64]) -> Fq {
        let reduced = poly::rem(coeffs, &self.modulus, self.p);
        self.encode_coeffs(&reduced)
    }

    #[inline]
    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.r == 1 {
            return Fq(((a.0 as u64 + b.0 as u64) % self.p) as u32);
        }
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + y) % self.p)
    }

    #[inline]
    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        if self.r == 1 {
            return Fq(((a.0 as u64 + self.p - b.0 as u64) % self.p) as u32);
        }
        if self.p == 2 {
            return Fq(a.0 ^ b.0);
        }
        self.digitwise(a, b, |x, y| (x + self.p - y) % self.p)
    }

    #[inline]
    pub fn neg(&self, a: Fq) -> Fq {
        self.sub(Fq::ZERO, a)
    }

    fn digitwise(&self, a: Fq, b: Fq, op: impl Fn(u64, u64) -> u64) -> Fq {
        let (mut x, mut y) = (a.0 as u64, b.0 as u64);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.r {
            out += op(x % self.p, y % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        Fq(out as u32)
    }

    #[inline]
    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        if self.r == 1 {
            return Fq(((a.0 as u64 * b.0 as u64) % self.p) as u32);
        }
        let n = self.q - 1;
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        Fq(self.exp[k as usize])
    }

    /// Product computed by polynomial multiplication and reduction, bypassing
    /// the lookup tables.
    pub fn mul_reference(&self, a: Fq, b: Fq) -> Fq {
        let prod = poly::mul_mod(&self.coeffs(a), &self.coeffs(b), &self.modulus, self.p);
        self.encode_coeffs(&prod)
    }

    fn pow_reference(&self, a: Fq, mut e: u64) -> Fq {
        let mut acc = Fq::ONE;
        let mut base = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_reference(acc, base);
            }
            base = self.mul_reference(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Fq) -> Result<Fq, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        if self.q == 2 {
            return Ok(Fq::ONE);
        }
        let n = self.q - 1;
        let k = (n - self.log[a.0 as usize] as u64) % n;
        Ok(Fq(self.exp[k as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.is_zero() {
            return Fq::ZERO;
        }
        if self.q == 2 {
            return Fq::ONE;
        }
        let n = self.q - 1;
        let k = (self.log[a.0 as usize] as u64 % n) * (e % n) % n;
        Fq(self.exp[k as usize])
    }

    /// Discrete log base [`Self::generator`]; `None` for zero.
    pub fn log(&self, a: Fq) -> Option<u64> {
        if a.is_zero() {
            None
        } else if self.q == 2 {
            Some(0)
        } else {
            Some(self.log[a.0 as usize] as u64)
        }
    }

    /// Absolute trace to F_p, using F_p-linearity over the power basis.
    pub fn trace(&self, x: Fq) -> u64 {
        if self.r == 1 {
            return x.0 as u64;
        }
        let mut v = x.0 as u64;
        let mut acc = 0u64;
        for t in &self.basis_trace {
            acc += (v % self.p) * t;
            v /= self.p;
        }
        acc % self.p
    }

    /// Absolute trace from its definition `sum_{i<r} x^(p^i)`.
    pub fn trace_by_frobenius(&self, x: Fq) -> u64 {
        let mut acc = Fq::ZERO;
        let mut cur = x;
        for _ in 0..self.r {
            acc = self.add(acc, cur);
            cur = self.pow_reference(cur, self.p);
        }
        let c = self.coeffs(acc);
        debug_assert!(c.iter().skip(1).all(|&d| d == 0), "trace must land in F_p");
        c[0]
    }

    /// `omega^Tr(x*y)` with `omega = exp(2 pi i / p)`.
    pub fn additive_character<T: Real>(&self, x: Fq, y: Fq) -> Complex<T> {
        self.root_of_unity(self.trace(self.mul(x, y)))
    }

    /// `omega^k`.
    pub fn root_of_unity<T: Real>(&self, k: u64) -> Complex<T> {
        let angle = T::TAU() * real::<T>((k % self.p) as f64) / real::<T>(self.p as f64);
        Complex::from_polar(T::one(), angle)
    }

    /// Whether `x` lies in `(F_q^*)^n`.
    pub fn is_nth_power(&self, x: Fq, n: u64) -> bool {
        if x.is_zero() || n == 0 {
            return false;
        }
        let d = gcd_u64(n, self.q - 1);
        self.pow(x, (self.q - 1) / d) == Fq::ONE
    }

    /// Some `z` with `z^n = x`, or `None` when `x` is not an n-th power.
    ///
    /// Linear scan of F_q^* in encoding order, so the smallest root is
    /// returned.
    pub fn nth_root(&self, x: Fq, n: u64) -> Result<Option<Fq>, FieldError> {
        if n == 0 {
            return Err(FieldError::ZeroExponent);
        }
        if x.is_zero() {
            return Err(FieldError::ZeroRoot);
        }
        Ok(self.nonzero_elements().find(|&z| self.pow(z, n) == x))
    }

    /// Every `z` with `z^n = x`.
    pub fn nth_roots(&self, x: Fq, n: u64) -> Vec<Fq> {
        self.nonzero_elements().filter(|&z| self.pow(z, n) == x).collect()
    }

    /// Size of the subgroup `(F_q^*)^n` of n-th powers.
    pub fn nth_power_count(&self, n: u64) -> u64 {
        (self.q - 1) / gcd_u64(n.max(1), self.q - 1)
    }
}

fn smallest_irreducible(p: u64, r: u32) -> Option<Vec<u64>> {
    let count = p.checked_pow(r)?;
    (0..count).find_map(|code| {
        let mut f: Vec<u64> = (0..r).map(|i| (code / p.pow(i)) % p).collect();
        f.push(1);
        poly::is_irreducible(&f, p).then_some(f)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_fields() -> Vec<Field> {
        [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16]
            .iter()
            .map(|&q| FieldCtx::of_order(q).unwrap())
            .collect()
    }

    #[test]
    fn construction_errors() {
        assert_eq!(FieldCtx::new(4, 1).unwrap_err(), FieldError::NotPrime(4));
        assert_eq!(FieldCtx::new(3, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(FieldCtx::new(2, 21), Err(FieldError::TooLarge { .. })));
        assert!(FieldCtx::new(2, 20).is_ok());
    }

    #[test]
    fn modulus_choices() {
        assert_eq!(FieldCtx::new(2, 1).unwrap().modulus(), &[0, 1]);
        assert_eq!(FieldCtx::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        // Monic quadratics over F_3 in encoding order; the irreducible ones are
        // x^2+1, x^2+x+2, x^2+2x+2.
        let brute: Vec<Vec<u64>> = (0..9u64)
            .map(|c| vec![c % 3, c / 3, 1])
            .filter(|f| (0..3u64).all(|a| (f[0] + f[1] * a + a * a) % 3 != 0))
            .collect();
        assert_eq!(brute[0], vec![1, 0, 1]);
        assert_eq!(FieldCtx::new(3, 2).unwrap().modulus(), brute[0].as_slice());
    }

    #[test]
    fn f4_generator_relation() {
        let f = FieldCtx::new(2, 2).unwrap();
        let xi = f.from_coeffs(&[0, 1]);
        assert_eq!(f.mul(xi, xi), f.add(xi, Fq::ONE));
        assert_eq!(f.trace(xi), 1);
    }

    #[test]
    fn field_axioms_exhaustive() {
        for f in small_fields() {
            let els: Vec<Fq> = f.elements().collect();
            for &a in &els {
                assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
                if !a.is_zero() {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
                    assert_eq!(f.pow(a, f.order() - 1), Fq::ONE);
                }
                for &b in &els {
                    assert_eq!(f.mul(a, b), f.mul_reference(a, b));
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.sub(f.add(a, b), b), a);
                    if f.order() <= 9 {
                        for &c in &els {
                            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn inverse_of_zero_fails() {
        let f = FieldCtx::prime(5).unwrap();
        assert_eq!(f.inv(Fq::ZERO), Err(FieldError::ZeroInverse));
        assert_eq!(f.inv(Fq::ONE), Ok(Fq::ONE));
    }

    #[test]
    fn trace_linear_surjective_frobenius_invariant() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 32, 49, 64, 81] {
            let f = FieldCtx::of_order(q).unwrap();
            let mut hit = vec![false; f.characteristic() as usize];
            for a in f.elements() {
                let t = f.trace(a);
                assert_eq!(t, f.trace_by_frobenius(a));
                assert_eq!(f.trace(f.pow(a, f.characteristic())), t);
                hit[t as usize] = true;
                for b in f.elements().step_by(7) {
                    assert_eq!(f.trace(f.add(a, b)), (t + f.trace(b)) % f.characteristic());
                }
            }
            assert!(hit.iter().all(|&h| h), "trace not onto F_p for q={q}");
        }
        assert_eq!(FieldCtx::prime(2).unwrap().trace(Fq::ONE), 1);
    }

    #[test]
    fn character_orthogonality() {
        for f in small_fields() {
            let q = f.order() as f64;
            for m in f.elements() {
                let full: Complex<f64> = f.elements().map(|a| f.additive_character(a, m)).sum();
                let punctured: Complex<f64> =
                    f.nonzero_elements().map(|a| f.additive_character(a, m)).sum();
                let (want_full, want_punct) = if m.is_zero() { (q, q - 1.0) } else { (0.0, -1.0) };
                assert!((full - Complex::new(want_full, 0.0)).norm() < 1e-9);
                assert!((punctured - Complex::new(want_punct, 0.0)).norm() < 1e-9);
                let c: Complex<f64> = f.additive_character(Fq::ZERO, m);
                assert!((c - Complex::new(1.0, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn character_is_additive_in_second_argument() {
        let f = FieldCtx::of_order(9).unwrap();
        for x in f.elements() {
            for y1 in f.elements() {
                for y2 in f.elements() {
                    let lhs: Complex<f64> = f.additive_character(x, f.add(y1, y2));
                    let rhs = f.additive_character::<f64>(x, y1) * f.additive_character::<f64>(x, y2);
                    assert!((lhs - rhs).norm() < 1e-12);
                    assert!((lhs.norm() - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn nth_roots_f5() {
        let f = FieldCtx::prime(5).unwrap();
        let four = f.from_int(4);
        let z = f.nth_root(four, 2).unwrap().unwrap();
        assert!(z == f.from_int(2) || z == f.from_int(3));
        assert_eq!(f.nth_root(f.from_int(2), 2).unwrap(), None);
        assert_eq!(f.nth_root(Fq::ZERO, 2), Err(FieldError::ZeroRoot));
        assert_eq!(f.nth_root(Fq::ONE, 3).unwrap().map(|z| f.pow(z, 3)), Some(Fq::ONE));
    }

    #[test]
    fn nth_root_exists_iff_power_criterion() {
        for f in small_fields() {
            for n in 1..=6u64 {
                for x in f.nonzero_elements() {
                    let root = f.nth_root(x, n).unwrap();
                    let d = gcd_u64(n, f.order() - 1);
                    let criterion = f.pow(x, (f.order() - 1) / d) == Fq::ONE;
                    assert_eq!(root.is_some(), criterion);
                    assert_eq!(f.is_nth_power(x, n), criterion);
                    if let Some(z) = root {
                        assert_eq!(f.pow(z, n), x);
                    }
                }
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(81), Some((3, 4)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
