use std::fmt;

use rand::Rng;

use super::{random_element, Matrix, Vector};
use crate::gf::{Field, Fq};

/// Linear subspace of F_q^n stored by its reduced row-echelon basis.
///
/// The basis is canonical, so two subspaces are equal exactly when their
/// representations are.
#[derive(Clone)]
pub struct Subspace {
    field: Field,
    ambient: usize,
    basis: Vec<Vector>,
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient == other.ambient && self.basis == other.basis && *self.field == *other.field
    }
}

impl Eq for Subspace {}

impl std::hash::Hash for Subspace {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ambient.hash(state);
        self.basis.hash(state);
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<u32>> = self.basis.iter().map(|v| v.encodings()).collect();
        write!(f, "Subspace(n={}, {:?})", self.ambient, rows)
    }
}

impl Subspace {
    /// Span of arbitrary (possibly dependent) vectors of length `ambient`.
    pub fn span(field: &Field, ambient: usize, vectors: Vec<Vector>) -> Self {
        if vectors.is_empty() || ambient == 0 {
            return Self::zero(field, ambient);
        }
        let rows: Vec<Vec<Fq>> = vectors.into_iter().map(|v| v.0).collect();
        let m = Matrix::from_rows(field, rows).expect("equal lengths");
        let rr = m.rref();
        let basis = (0..rr.rank).map(|i| Vector(rr.reduced.row(i).to_vec())).collect();
        Subspace { field: field.clone(), ambient, basis }
    }

    pub fn zero(field: &Field, ambient: usize) -> Self {
        Subspace { field: field.clone(), ambient, basis: Vec::new() }
    }

    pub fn full(field: &Field, ambient: usize) -> Self {
        let basis = (0..ambient).map(|k| Vector::unit(ambient, k)).collect();
        Subspace { field: field.clone(), ambient, basis }
    }

    /// `span(e_{from+1}, ..., e_n)`: vectors whose first `from` entries vanish.
    pub fn coordinate_tail(field: &Field, ambient: usize, from: usize) -> Self {
        let basis = (from..ambient).map(|k| Vector::unit(ambient, k)).collect();
        Subspace { field: field.clone(), ambient, basis }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn contains(&self, v: &Vector) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.clone());
        Subspace::span(&self.field, self.ambient, vs).dim() == self.dim()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.basis.iter().all(|v| other.contains(v))
    }

    pub fn join(&self, other: &Subspace) -> Subspace {
        let mut vs = self.basis.clone();
        vs.extend(other.basis.iter().cloned());
        Subspace::span(&self.field, self.ambient, vs)
    }

    /// Orthogonal complement under the standard dot product.
    pub fn perp(&self) -> Subspace {
        if self.basis.is_empty() {
            return Subspace::full(&self.field, self.ambient);
        }
        let rows = self.basis.iter().map(|v| v.0.clone()).collect();
        Matrix::from_rows(&self.field, rows).expect("rows").kernel()
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        self.perp().join(&other.perp()).perp()
    }

    /// `{A v : v in self}`.
    pub fn image(&self, a: &Matrix) -> Subspace {
        let vs = self.basis.iter().map(|v| a.mul_vec(v)).collect();
        Subspace::span(&self.field, a.rows(), vs)
    }

    /// Embeds into F_q^{n+1} by appending a zero coordinate.
    pub fn embed(&self) -> Subspace {
        let vs = self
            .basis
            .iter()
            .map(|v| {
                let mut w = v.0.clone();
                w.push(Fq::ZERO);
                Vector(w)
            })
            .collect();
        Subspace::span(&self.field, self.ambient + 1, vs)
    }

    /// Drops trailing coordinates, keeping the first `k`; only meaningful when
    /// the subspace lies in `span(e_1, ..., e_k)`.
    pub fn truncate(&self, k: usize) -> Subspace {
        let vs = self.basis.iter().map(|v| Vector(v.0[..k].to_vec())).collect();
        Subspace::span(&self.field, k, vs)
    }

    /// Uniform element, via uniform coefficients on the basis.
    pub fn random_element(&self, rng: &mut impl Rng) -> Vector {
        let f = &self.field;
        let mut out = Vector::zero(self.ambient);
        for b in &self.basis {
            let c = random_element(f, rng);
            for (o, &x) in out.0.iter_mut().zip(&b.0) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }

    /// All `q^dim` elements (small cases only).
    pub fn elements(&self) -> Vec<Vector> {
        let f = &self.field;
        let mut out = vec![Vector::zero(self.ambient)];
        for b in &self.basis {
            let mut next = Vec::with_capacity(out.len() * f.order() as usize);
            for v in &out {
                for c in f.elements() {
                    let w = v.0.iter().zip(&b.0).map(|(&x, &y)| f.add(x, f.mul(c, y))).collect();
                    next.push(Vector(w));
                }
            }
            out = next;
        }
        out
    }

    /// Basis vectors as row-major integer encodings.
    pub fn encodings(&self) -> Vec<Vec<u32>> {
        self.basis.iter().map(|v| v.encodings()).collect()
    }
}
