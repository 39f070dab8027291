use num_complex::Complex;

use super::QuantumError;
use crate::gf::{Field, Fq};
use crate::scalar::{real, Real};

/// Largest field order for which the dense `q x q` transform is built.
pub const QFT_DENSE_CAP: u64 = 1 << 12;

/// The Fourier transform of F_q: entry `(x, y)` is `omega^{Tr(xy)} / sqrt(q)`.
///
/// Rows and columns are indexed by element encodings.
#[derive(Debug, Clone)]
pub struct QftMatrix<T> {
    q: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> QftMatrix<T> {
    pub fn new(field: &Field) -> Result<Self, QuantumError> {
        let q = field.order();
        if q > QFT_DENSE_CAP {
            return Err(QuantumError::TooLarge(format!("dense transform of order {q}")));
        }
        let scale = real::<T>(q as f64).sqrt().recip();
        let mut entries = Vec::with_capacity((q * q) as usize);
        for x in field.elements() {
            for y in field.elements() {
                entries.push(field.additive_character::<T>(x, y) * scale);
            }
        }
        Ok(QftMatrix { q: q as usize, entries })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn entry(&self, x: Fq, y: Fq) -> Complex<T> {
        self.entries[x.encoding() as usize * self.q + y.encoding() as usize]
    }

    /// Largest `|<row_i, row_j> - delta_ij|` over all row pairs.
    pub fn unitarity_defect(&self) -> T {
        let q = self.q;
        let mut worst = T::zero();
        for i in 0..q {
            for j in 0..q {
                let mut acc = Complex::new(T::zero(), T::zero());
                for k in 0..q {
                    acc = acc + self.entries[i * q + k] * self.entries[j * q + k].conj();
                }
                if i == j {
                    acc = acc - Complex::new(T::one(), T::zero());
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// Applies the transform to a state on F_q.
    pub fn apply(&self, state: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(state.len(), self.q, "state length must be q");
        (0..self.q)
            .map(|y| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (x, &a) in state.iter().enumerate() {
                    acc = acc + a * self.entries[x * self.q + y];
                }
                acc
            })
            .collect()
    }

    /// Applies the transform of F_q^m, one tensor factor per coordinate.
    ///
    /// Basis states are indexed by `sum_i enc(v_i) q^i`.
    pub fn apply_tensor(&self, state: &[Complex<T>], m: usize) -> Vec<Complex<T>> {
        let q = self.q;
        assert_eq!(state.len(), q.pow(m as u32), "state length must be q^m");
        let mut cur = state.to_vec();
        let mut stride = 1;
        for _ in 0..m {
            let mut next = vec![Complex::new(T::zero(), T::zero()); cur.len()];
            for base in 0..cur.len() {
                if (base / stride) % q != 0 {
                    continue;
                }
                for y in 0..q {
                    let mut acc = Complex::new(T::zero(), T::zero());
                    for x in 0..q {
                        acc = acc + cur[base + x * stride] * self.entries[x * q + y];
                    }
                    next[base + y * stride] = acc;
                }
            }
            cur = next;
            stride *= q;
        }
        cur
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;

    #[test]
    fn f2_is_hadamard() {
        let f = FieldCtx::of_order(2).unwrap();
        let h = QftMatrix::<f64>::new(&f).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let expect = [[s, s], [s, -s]];
        for x in 0..2u64 {
            for y in 0..2u64 {
                let e = h.entry(f.element(x).unwrap(), f.element(y).unwrap());
                assert!((e.re - expect[x as usize][y as usize]).abs() < 1e-15 && e.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn unitary_and_row_zero_uniform() {
        for q in [2, 3, 4, 5, 7, 8, 9] {
            let f = FieldCtx::of_order(q).unwrap();
            let h = QftMatrix::<f64>::new(&f).unwrap();
            assert!(h.unitarity_defect() < 1e-12, "q={q}");
            let u = 1.0 / (q as f64).sqrt();
            for y in f.elements() {
                let e = h.entry(Fq::ZERO, y);
                assert!((e.re - u).abs() < 1e-15 && e.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn double_application_negates() {
        for q in [3, 4, 5, 9] {
            let f = FieldCtx::of_order(q).unwrap();
            let h = QftMatrix::<f64>::new(&f).unwrap();
            for x in f.elements() {
                let mut state = vec![Complex::new(0.0, 0.0); q as usize];
                state[x.encoding() as usize] = Complex::new(1.0, 0.0);
                let out = h.apply(&h.apply(&state));
                let neg = f.neg(x).encoding() as usize;
                for (k, a) in out.iter().enumerate() {
                    let want = if k == neg { 1.0 } else { 0.0 };
                    assert!((a.re - want).abs() < 1e-12 && a.im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn single_precision_is_unitary() {
        let f = FieldCtx::of_order(7).unwrap();
        assert!(QftMatrix::<f32>::new(&f).unwrap().unitarity_defect() < 1e-5);
    }
}
