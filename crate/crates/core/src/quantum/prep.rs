//! Coset-state preparation.
//!
//! The quantum step applies `U_f` to the uniform superposition over all of
//! `Mat_n(F_q)` and measures the function register. Measuring yields value
//! `v` with probability `|f^{-1}(v)| / q^{n^2}` and leaves the uniform
//! superposition over `f^{-1}(v)`. Drawing `A` uniformly and reporting `f(A)`
//! produces each value with the same probability, and the fibre of `f(A)` is
//! then the state that would remain. When `A` is invertible and in the
//! oracle's domain that fibre is the right coset `H A`, so `B = A` is a valid
//! representative; otherwise the round is junk. The classical draw therefore
//! has exactly the distribution of the measurement, and the later Fourier
//! measurement only needs `(H, B)`.

use num_bigint::BigUint;
use num_rational::BigRational;
use rand::Rng;

use crate::gf::gcd_u64;
use crate::linalg::Matrix;
use crate::oracle::{OracleLabel, OracleView};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrepKind {
    Coset,
    Junk,
}

#[derive(Debug, Clone)]
pub struct PrepOutcome {
    pub kind: PrepKind,
    /// The drawn matrix; a coset representative when `kind` is `Coset`.
    pub representative: Matrix,
    /// `None` when the draw fell outside the oracle's domain.
    pub label: Option<OracleLabel>,
}

/// One preparation, costing exactly one oracle query.
pub fn prep_coset_state(view: &OracleView<'_>, rng: &mut impl Rng) -> PrepOutcome {
    let a = Matrix::random(view.field(), view.dim(), view.dim(), rng);
    match view.query(&a) {
        Ok(label) => {
            let kind = if label.is_coset() { PrepKind::Coset } else { PrepKind::Junk };
            PrepOutcome { kind, representative: a, label: Some(label) }
        }
        Err(_) => PrepOutcome { kind: PrepKind::Junk, representative: a, label: None },
    }
}

/// `|GL_n(F_q)| = prod_{j<n} (q^n - q^j)`.
pub fn gl_order(q: u64, n: usize) -> BigUint {
    let qn = BigUint::from(q).pow(n as u32);
    (0..n as u32).fold(BigUint::from(1u32), |acc, j| acc * (&qn - BigUint::from(q).pow(j)))
}

/// Probability that a uniform `A` lies in the domain `{det A an e-th power}`:
/// `|GL_n| / (gcd(e, q-1) q^{n^2})`.
pub fn prep_success_probability(q: u64, n: usize, e: u64) -> BigRational {
    let d = gcd_u64(e, q - 1);
    let den = BigUint::from(q).pow((n * n) as u32) * BigUint::from(d);
    BigRational::new(gl_order(q, n).into(), den.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use crate::oracle::{HidingOracle, Mode};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gl_rates() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert_eq!(prep_success_probability(2, 1, 1), r(1, 2));
        assert_eq!(prep_success_probability(3, 2, 1), r(16, 27));
        assert_eq!(prep_success_probability(2, 3, 1), r(21, 64));
        assert_eq!(gl_order(3, 2), BigUint::from(48u32));
    }

    #[test]
    fn domain_count_matches_enumeration() {
        for q in [3u64, 5] {
            let f = FieldCtx::of_order(q).unwrap();
            let mut hits = 0u64;
            for code in 0..q.pow(4) {
                let enc: Vec<u64> = (0..4).map(|k| (code / q.pow(k)) % q).collect();
                let d = Matrix::from_encodings(&f, 2, 2, &enc).unwrap().det().unwrap();
                if !d.is_zero() && f.is_nth_power(d, 2) {
                    hits += 1;
                }
            }
            assert_eq!(prep_success_probability(q, 2, 2), BigRational::new(hits.into(), q.pow(4).into()));
        }
    }

    #[test]
    fn prep_kind_matches_label() {
        let f = FieldCtx::of_order(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (o, _) = HidingOracle::make_instance(&f, 2, Mode::Gl, &mut rng);
        let view = o.view();
        let mut coset = 0;
        for _ in 0..2000 {
            let out = prep_coset_state(&view, &mut rng);
            let label = out.label.unwrap();
            assert_eq!(out.kind == PrepKind::Coset, label.is_coset());
            assert_eq!(out.kind == PrepKind::Coset, out.representative.is_invertible());
            coset += (out.kind == PrepKind::Coset) as u32;
        }
        assert_eq!(o.query_count(), 2000);
        let rate = coset as f64 / 2000.0;
        assert!((rate - 16.0 / 27.0).abs() < 4.0 * (0.25f64 / 2000.0).sqrt());
    }
}
