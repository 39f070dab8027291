//! Outcome law straight from the definition: one character sum per outcome.

use num_complex::Complex;
use rayon::prelude::*;

use super::law::{dense_outcome_count, matrix_from_index, OutcomeDistribution};
use super::QuantumError;
use crate::borel::lower_triangular_group;
use crate::linalg::Matrix;
use crate::scalar::{real, Probability, Real};

/// Largest `|L_e| * q^{n^2}` for brute-force evaluation.
pub const BRUTE_CAP: u64 = 1 << 28;

struct CosetSum {
    /// `X^{-1} A X B` for every `A` in `L_e`.
    points: Vec<Matrix>,
    scale: f64,
}

fn coset_points(x: &Matrix, b: &Matrix, e: u64) -> Result<CosetSum, QuantumError> {
    let f = x.field();
    let n = x.rows();
    let outcomes = dense_outcome_count(f.order(), n)? as u64;
    let x_inv = x.inverse()?;
    b.inverse()?;
    let group: Vec<Matrix> = lower_triangular_group(f, n)
        .map_err(|err| QuantumError::TooLarge(err.to_string()))?
        .into_iter()
        .filter(|a| f.is_nth_power(a.det().expect("square"), e))
        .collect();
    if (group.len() as u64).saturating_mul(outcomes) > BRUTE_CAP {
        return Err(QuantumError::TooLarge(format!("{} group elements times {outcomes} outcomes", group.len())));
    }
    let scale = 1.0 / ((group.len() as f64) * outcomes as f64).sqrt();
    let points = group.iter().map(|a| x_inv.mul(a).mul(x).mul(b)).collect();
    Ok(CosetSum { points, scale })
}

fn amplitude<T: Real>(sum: &CosetSum, y: &Matrix) -> Complex<T> {
    let f = y.field();
    let p = f.characteristic() as usize;
    let mut counts = vec![0u64; p];
    for c in &sum.points {
        counts[f.trace(c.frobenius_form(y).expect("same shape")) as usize] += 1;
    }
    let total = counts
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (k, &c)| acc + f.root_of_unity::<T>(k as u64) * real::<T>(c as f64));
    total * real::<T>(sum.scale)
}

/// `c_Y = (1/sqrt(|L_e| q^{n^2})) sum_{A in L_e} omega^{Tr(<X^{-1} A X B, Y>)}`.
pub fn brute_force_amplitude<T: Real>(x: &Matrix, b: &Matrix, y: &Matrix, e: u64) -> Result<Complex<T>, QuantumError> {
    Ok(amplitude(&coset_points(x, b, e)?, y))
}

/// `|c_Y|^2` for every outcome.
pub fn brute_force_distribution<T: Real + Probability>(
    x: &Matrix,
    b: &Matrix,
    e: u64,
) -> Result<OutcomeDistribution<T>, QuantumError> {
    let f = x.field();
    let n = x.rows();
    let sum = coset_points(x, b, e)?;
    let count = dense_outcome_count(f.order(), n)?;
    let probs = (0..count)
        .into_par_iter()
        .map(|idx| amplitude::<T>(&sum, &matrix_from_index(f, n, idx)).norm_sqr())
        .collect();
    OutcomeDistribution::new(f, n, probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use crate::quantum::law::{exact_distribution, CosetLaw};
    use num_rational::BigRational;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (n, q) in [(1, 3), (2, 2), (2, 4)] {
            let f = FieldCtx::of_order(q).unwrap();
            for _ in 0..2 {
                let x = Matrix::random_invertible(&f, n, &mut rng);
                let b = Matrix::random_invertible(&f, n, &mut rng);
                let brute = brute_force_distribution::<f64>(&x, &b, 1).unwrap();
                let exact = exact_distribution::<BigRational>(&x, &b).unwrap();
                assert!(brute.max_abs_diff(&exact) < 1e-9);
                assert!((brute.total_mass() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn det_restricted_law_matches_table() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (q, e) in [(3u64, 2u64), (5, 2), (5, 4)] {
            let f = FieldCtx::of_order(q).unwrap();
            let x = Matrix::random_invertible(&f, 2, &mut rng);
            let b = Matrix::random_invertible(&f, 2, &mut rng);
            let brute = brute_force_distribution::<f64>(&x, &b, e).unwrap();
            let law = CosetLaw::new(&f, 2, e).unwrap();
            let table = law.float_distribution::<f64>(&x, &b).unwrap();
            assert!(brute.max_abs_diff(&table) < 1e-9, "q={q} e={e}");
        }
    }

    #[test]
    fn amplitude_has_phase() {
        let f = FieldCtx::of_order(3).unwrap();
        let id = Matrix::identity(&f, 1);
        let b = Matrix::diagonal(&f, &[f.from_int(2)]);
        let c: Complex<f64> = brute_force_amplitude(&id, &b, &Matrix::diagonal(&f, &[f.from_int(1)]), 1).unwrap();
        // sum over a in {1,2} of omega^{2a}, over sqrt(2*3)
        let w = f.root_of_unity::<f64>(2) + f.root_of_unity::<f64>(1);
        assert!((c - w / 6f64.sqrt()).norm() < 1e-12);
    }
}
