//! The abelian measurement step on F_q^m: a coset state `|v0 + W>` is
//! Fourier transformed and measured, giving a uniform element of `W^perp`.

use num_complex::Complex;
use rand::Rng;

use super::qft::QftMatrix;
use super::QuantumError;
use crate::gf::Field;
use crate::linalg::{Subspace, Vector};
use crate::scalar::{real, Real};

/// Largest `q^m` for the state-vector path.
pub const AMPLITUDE_CAP: u64 = 1 << 16;

/// Index of `v` in the tensor basis: `sum_i enc(v_i) q^i`.
pub fn vector_index(v: &Vector, q: u64) -> usize {
    v.0.iter().rev().fold(0u64, |acc, x| acc * q + x.encoding() as u64) as usize
}

pub fn vector_from_index(field: &Field, m: usize, mut idx: usize) -> Vector {
    let q = field.order() as usize;
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        out.push(field.element((idx % q) as u64).expect("digit below q"));
        idx /= q;
    }
    Vector(out)
}

/// Measures the transformed coset state, sampling directly from `W^perp`.
/// The offset only contributes a phase, so it does not affect the result.
pub fn subspace_hsp_measure(w: &Subspace, v0: &Vector, rng: &mut impl Rng) -> Vector {
    assert_eq!(v0.len(), w.ambient_dim(), "offset length must match the ambient space");
    w.perp().random_element(rng)
}

/// Uniform superposition over `v0 + W` as a dense state vector.
pub fn coset_state<T: Real>(w: &Subspace, v0: &Vector) -> Result<Vec<Complex<T>>, QuantumError> {
    let f = w.field();
    let q = f.order();
    let m = w.ambient_dim();
    let size = q.checked_pow(m as u32).filter(|&s| s <= AMPLITUDE_CAP);
    let size = size.ok_or_else(|| QuantumError::TooLarge(format!("state of dimension {q}^{m}")))?;
    let elements = w.elements();
    let amp = real::<T>(elements.len() as f64).sqrt().recip();
    let mut state = vec![Complex::new(T::zero(), T::zero()); size as usize];
    for v in elements {
        let shifted = Vector(v.0.iter().zip(&v0.0).map(|(&a, &b)| f.add(a, b)).collect());
        state[vector_index(&shifted, q)] = Complex::new(amp, T::zero());
    }
    Ok(state)
}

/// Outcome probabilities after transforming `|v0 + W>` with the transform of
/// F_q^m, computed from the full state vector.
pub fn hsp_outcome_distribution<T: Real>(w: &Subspace, v0: &Vector) -> Result<Vec<T>, QuantumError> {
    let state = coset_state::<T>(w, v0)?;
    let qft = QftMatrix::<T>::new(w.field())?;
    Ok(qft.apply_tensor(&state, w.ambient_dim()).into_iter().map(|c| c.norm_sqr()).collect())
}

/// Total probability the amplitude path assigns outside `W^perp`.
pub fn mass_off_perp<T: Real>(w: &Subspace, v0: &Vector) -> Result<T, QuantumError> {
    let f = w.field();
    let perp = w.perp();
    let probs = hsp_outcome_distribution::<T>(w, v0)?;
    Ok(probs
        .iter()
        .enumerate()
        .filter(|(i, _)| !perp.contains(&vector_from_index(f, w.ambient_dim(), *i)))
        .map(|(_, &p)| p)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    #[test]
    fn index_round_trip() {
        let f = FieldCtx::of_order(4).unwrap();
        for i in 0..64 {
            assert_eq!(vector_index(&vector_from_index(&f, 3, i), 4), i);
        }
    }

    #[test]
    fn full_space_measures_zero() {
        let f = FieldCtx::of_order(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = Subspace::full(&f, 3);
        for _ in 0..50 {
            assert!(subspace_hsp_measure(&w, &Vector::random(&f, 3, &mut rng), &mut rng).is_zero());
        }
    }

    #[test]
    fn line_in_f2_squared() {
        let f = FieldCtx::of_order(2).unwrap();
        let w = Subspace::span(&f, 2, vec![Vector::unit(2, 0)]);
        for v0 in [Vector::zero(2), Vector::unit(2, 1)] {
            let probs = hsp_outcome_distribution::<f64>(&w, &v0).unwrap();
            // indices: (0,0)=0, (1,0)=1, (0,1)=2, (1,1)=3
            let want = [0.5, 0.0, 0.5, 0.0];
            for (p, w) in probs.iter().zip(want) {
                assert!((p - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn amplitude_path_is_uniform_on_perp() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for q in [2u64, 3] {
            let f = FieldCtx::of_order(q).unwrap();
            for m in 1..=4 {
                for k in 0..=m {
                    let w = Subspace::span(&f, m, (0..k).map(|_| Vector::random(&f, m, &mut rng)).collect());
                    let v0 = Vector::random(&f, m, &mut rng);
                    let probs = hsp_outcome_distribution::<f64>(&w, &v0).unwrap();
                    let perp = w.perp();
                    let each = 1.0 / (q.pow(perp.dim() as u32) as f64);
                    for (i, p) in probs.iter().enumerate() {
                        let want = if perp.contains(&vector_from_index(&f, m, i)) { each } else { 0.0 };
                        assert!((p - want).abs() < 1e-12);
                    }
                    assert!(mass_off_perp::<f64>(&w, &v0).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sampling_is_uniform_on_perp() {
        let f = FieldCtx::of_order(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = Subspace::span(&f, 3, vec![Vector(vec![f.from_int(1), f.from_int(2), f.from_int(0)])]);
        let v0 = Vector::random(&f, 3, &mut rng);
        let draws = 90_000;
        let mut counts: HashMap<Vec<u32>, usize> = HashMap::new();
        for _ in 0..draws {
            *counts.entry(subspace_hsp_measure(&w, &v0, &mut rng).encodings()).or_default() += 1;
        }
        assert_eq!(counts.len(), 9);
        let expected = draws as f64 / 9.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 8 degrees of freedom, far tail
        assert!(chi2 < 30.0, "chi2={chi2}");
    }
}
