//! Complete flags and their stabilizers (Borel subgroups).
//!
//! A Borel subgroup is identified with the flag it stabilizes. The standard
//! flag has members `V_k = span(e_{k+1}, ..., e_n)` and is stabilized by the
//! invertible lower triangular matrices; `X^{-1} L X` stabilizes the members
//! `X^{-1} V_k`.

use std::collections::HashSet;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gf::{Field, Fq};
use crate::linalg::{LinalgError, Matrix, Subspace, Vector};

/// Largest number of candidate matrices `enumerate_borel` will walk.
pub const ENUMERATION_CAP: u64 = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlagError {
    #[error("member {index} has dimension {got}, expected {want}")]
    BadDimension { index: usize, got: usize, want: usize },
    #[error("member {0} is not contained in the previous member")]
    NotNested(usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("enumeration of {0} candidates exceeds the cap")]
    TooLarge(u64),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Complete flag `F_q^n > U_1 > ... > U_{n-1} > 0` with `dim U_k = n - k`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Flag {
    field: Field,
    n: usize,
    members: Vec<Subspace>,
}

impl Serialize for Flag {
    /// A list of members, each a list of basis vectors of encoded entries.
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let members: Vec<Vec<Vec<u32>>> = self.members.iter().map(|m| m.encodings()).collect();
        members.serialize(s)
    }
}

impl Flag {
    /// Validates dimensions and strict nesting.
    pub fn new(field: &Field, n: usize, members: Vec<Subspace>) -> Result<Self, FlagError> {
        if members.len() != n.saturating_sub(1) {
            return Err(FlagError::Dimension(format!("{} members for n={n}", members.len())));
        }
        for (k, m) in members.iter().enumerate() {
            let want = n - (k + 1);
            if m.ambient_dim() != n || m.dim() != want {
                return Err(FlagError::BadDimension { index: k + 1, got: m.dim(), want });
            }
            if k > 0 && !m.is_subspace_of(&members[k - 1]) {
                return Err(FlagError::NotNested(k + 1));
            }
        }
        Ok(Flag { field: field.clone(), n, members })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    /// `U_1, ..., U_{n-1}`.
    pub fn members(&self) -> &[Subspace] {
        &self.members
    }

    /// `U_k` for `1 <= k <= n-1`.
    pub fn member(&self, k: usize) -> &Subspace {
        &self.members[k - 1]
    }

    /// Maps every member through `a`.
    pub fn image(&self, a: &Matrix) -> Flag {
        Flag { field: self.field.clone(), n: self.n, members: self.members.iter().map(|m| m.image(a)).collect() }
    }

    /// Matrix `P` whose columns form a basis adapted to the flag:
    /// `P V_k = U_k` for every `k`. Consequently the flag is
    /// `flag_from_conjugator(P^{-1})`.
    pub fn adapted_basis(&self) -> Matrix {
        let n = self.n;
        let f = &self.field;
        // chain: F^n = W_0 > W_1 > ... > W_{n-1} > W_n = 0
        let chain: Vec<Subspace> = std::iter::once(Subspace::full(f, n))
            .chain(self.members.iter().cloned())
            .chain(std::iter::once(Subspace::zero(f, n)))
            .collect();
        let cols: Vec<Vector> = (0..n)
            .map(|k| {
                chain[k]
                    .basis()
                    .iter()
                    .find(|v| !chain[k + 1].contains(v))
                    .cloned()
                    .expect("strictly decreasing chain")
            })
            .collect();
        Matrix::from_columns(f, &cols).expect("square")
    }

    /// Some `X` with `flag_from_conjugator(X) == self`.
    pub fn conjugator(&self) -> Matrix {
        self.adapted_basis().inverse().expect("adapted basis is invertible")
    }
}

/// `V_k = span(e_{k+1}, ..., e_n)` for `k = 1..n-1`.
pub fn standard_flag(field: &Field, n: usize) -> Flag {
    let members = (1..n).map(|k| Subspace::coordinate_tail(field, n, k)).collect();
    Flag { field: field.clone(), n, members }
}

/// Flag stabilized by `X^{-1} L X`: members `X^{-1} V_k`.
pub fn flag_from_conjugator(x: &Matrix) -> Result<Flag, FlagError> {
    let xi = x.inverse()?;
    Ok(standard_flag(x.field(), x.rows()).image(&xi))
}

/// Whether `A U_k` lies in `U_k` for every member.
pub fn stabilizes(a: &Matrix, flag: &Flag) -> bool {
    a.rows() == flag.n
        && a.cols() == flag.n
        && flag.members.iter().all(|m| m.basis().iter().all(|v| m.contains(&a.mul_vec(v))))
}

/// Generators of the stabilizer of `flag`.
///
/// For the standard flag: `I + g E_{i+1,i}` for `i = 1..n-1` and the torus
/// elements `diag(1, .., g, .., 1)`, where `g` generates F_q^*. For other flags
/// the same set conjugated by the adapted basis.
pub fn stabilizer_generators(flag: &Flag) -> Vec<Matrix> {
    let f = &flag.field;
    let n = flag.n;
    let g = f.generator();
    let mut gens = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let mut t = Matrix::identity(f, n);
        t.set(i + 1, i, g);
        gens.push(t);
    }
    if f.order() > 2 {
        for i in 0..n {
            let mut d = Matrix::identity(f, n);
            d.set(i, i, g);
            gens.push(d);
        }
    }
    let p = flag.adapted_basis();
    let pi = p.inverse().expect("invertible");
    gens.into_iter().map(|a| p.mul(&a).mul(&pi)).collect()
}

/// Closure of a generating set under multiplication (small groups only).
pub fn generated_group(field: &Field, n: usize, gens: &[Matrix]) -> HashSet<Matrix> {
    let mut seen: HashSet<Matrix> = HashSet::new();
    let id = Matrix::identity(field, n);
    let mut frontier = vec![id.clone()];
    seen.insert(id);
    while let Some(m) = frontier.pop() {
        for g in gens {
            let next = m.mul(g);
            if seen.insert(next.clone()) {
                frontier.push(next);
            }
        }
    }
    seen
}

/// `(q-1)^n q^(n(n-1)/2)`.
pub fn borel_order(q: u64, n: usize) -> u64 {
    (q - 1).pow(n as u32) * q.pow((n * (n - 1) / 2) as u32)
}

/// All invertible lower triangular `n x n` matrices.
pub fn lower_triangular_group(field: &Field, n: usize) -> Result<Vec<Matrix>, FlagError> {
    let q = field.order();
    let count = borel_order(q, n);
    let cells = (n * (n + 1) / 2) as u32;
    if (q as u128).pow(cells) > ENUMERATION_CAP as u128 {
        return Err(FlagError::TooLarge(count));
    }
    let positions: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let mut out = vec![Matrix::zeros(field, n, n)];
    for &(i, j) in &positions {
        let values: Vec<Fq> = if i == j { field.nonzero_elements().collect() } else { field.elements().collect() };
        let mut next = Vec::with_capacity(out.len() * values.len());
        for m in &out {
            for &v in &values {
                let mut m2 = m.clone();
                m2.set(i, j, v);
                next.push(m2);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Every element of the stabilizer of `flag`.
pub fn enumerate_borel(flag: &Flag) -> Result<Vec<Matrix>, FlagError> {
    let p = flag.adapted_basis();
    let pi = p.inverse()?;
    Ok(lower_triangular_group(&flag.field, flag.n)?.into_iter().map(|l| p.mul(&l).mul(&pi)).collect())
}

/// Lifts a flag of `F_q^{n-1}` to `F_q^n`: embed each member with a zero last
/// coordinate, add `span(e_n)`, append `span(e_n)` itself as the last member,
/// then map everything through `z`.
pub fn lift_flag(sub: &Flag, z: &Matrix) -> Result<Flag, FlagError> {
    let n = sub.n + 1;
    if z.rows() != n || z.cols() != n {
        return Err(FlagError::Dimension(format!("lift of a {}-flag through a {}x{} matrix", sub.n, z.rows(), z.cols())));
    }
    let f = &sub.field;
    let last = Subspace::coordinate_tail(f, n, n - 1);
    let mut members: Vec<Subspace> = sub.members.iter().map(|m| m.embed().join(&last)).collect();
    members.push(last);
    let lifted = Flag::new(f, n, members)?;
    if !z.is_invertible() {
        return Err(FlagError::Linalg(LinalgError::Singular));
    }
    Ok(lifted.image(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldCtx;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn all_invertible(field: &Field, n: usize) -> Vec<Matrix> {
        let q = field.order();
        let total = q.pow((n * n) as u32);
        (0..total)
            .map(|code| {
                let enc: Vec<u64> = (0..n * n).map(|k| (code / q.pow(k as u32)) % q).collect();
                Matrix::from_encodings(field, n, n, &enc).unwrap()
            })
            .filter(|m| m.is_invertible())
            .collect()
    }

    #[test]
    fn standard_flag_shapes() {
        let f = FieldCtx::of_order(3).unwrap();
        let s2 = standard_flag(&f, 2);
        assert_eq!(s2.members(), &[Subspace::span(&f, 2, vec![Vector::unit(2, 1)])]);
        let s3 = standard_flag(&f, 3);
        assert_eq!(s3.member(1), &Subspace::span(&f, 3, vec![Vector::unit(3, 1), Vector::unit(3, 2)]));
        assert_eq!(s3.member(2), &Subspace::span(&f, 3, vec![Vector::unit(3, 2)]));
        assert!(standard_flag(&f, 1).members().is_empty());
    }

    #[test]
    fn lower_triangular_stabilizes_standard_flag() {
        let f = FieldCtx::of_order(3).unwrap();
        let flag = standard_flag(&f, 2);
        for a in all_invertible(&f, 2) {
            assert_eq!(stabilizes(&a, &flag), a.is_lower_triangular());
        }
        let f2 = FieldCtx::of_order(2).unwrap();
        let shift = Matrix::from_encodings(&f2, 2, 2, &[1, 1, 0, 1]).unwrap();
        assert!(!stabilizes(&shift, &standard_flag(&f2, 2)));
    }

    #[test]
    fn conjugator_examples() {
        let f = FieldCtx::of_order(5).unwrap();
        assert_eq!(flag_from_conjugator(&Matrix::identity(&f, 3)).unwrap(), standard_flag(&f, 3));
        let rev = Matrix::from_encodings(&f, 2, 2, &[0, 1, 1, 0]).unwrap();
        let flag = flag_from_conjugator(&rev).unwrap();
        assert_eq!(flag.member(1), &Subspace::span(&f, 2, vec![Vector::unit(2, 0)]));
        assert!(flag_from_conjugator(&Matrix::zeros(&f, 2, 2)).is_err());
    }

    #[test]
    fn flag_depends_only_on_coset() {
        for q in [2u64, 3] {
            let f = FieldCtx::of_order(q).unwrap();
            let gl = all_invertible(&f, 2);
            let lower: Vec<&Matrix> = gl.iter().filter(|m| m.is_lower_triangular()).collect();
            for x in &gl {
                let base = flag_from_conjugator(x).unwrap();
                for l in &lower {
                    assert_eq!(flag_from_conjugator(&l.mul(x)).unwrap(), base);
                }
                assert_eq!(flag_from_conjugator(&base.conjugator()).unwrap(), base);
            }
        }
    }

    #[test]
    fn stabilizer_sizes_exhaustive() {
        for (q, n) in [(2u64, 2usize), (3, 2), (2, 3)] {
            let f = FieldCtx::of_order(q).unwrap();
            let gl = all_invertible(&f, n);
            let mut rng = ChaCha8Rng::seed_from_u64(q + n as u64);
            let x = Matrix::random_invertible(&f, n, &mut rng);
            let flag = flag_from_conjugator(&x).unwrap();
            let stab: HashSet<Matrix> = gl.iter().filter(|a| stabilizes(a, &flag)).cloned().collect();
            assert_eq!(stab.len() as u64, borel_order(q, n));
            let xi = x.inverse().unwrap();
            for a in &stab {
                // X^{-1} L X membership
                assert!(x.mul(a).mul(&xi).is_lower_triangular());
            }
            let enumerated: HashSet<Matrix> = enumerate_borel(&flag).unwrap().into_iter().collect();
            assert_eq!(enumerated, stab);
        }
    }

    #[test]
    fn enumeration_counts() {
        let f3 = FieldCtx::of_order(3).unwrap();
        assert_eq!(enumerate_borel(&standard_flag(&f3, 2)).unwrap().len(), 12);
        let f2 = FieldCtx::of_order(2).unwrap();
        let els = enumerate_borel(&standard_flag(&f2, 3)).unwrap();
        assert_eq!(els.len(), 8);
        assert!(els.iter().all(|a| stabilizes(a, &standard_flag(&f2, 3))));
    }

    #[test]
    fn generators_generate_the_stabilizer() {
        for q in [2u64, 3] {
            let f = FieldCtx::of_order(q).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(q);
            for flag in [standard_flag(&f, 2), flag_from_conjugator(&Matrix::random_invertible(&f, 2, &mut rng)).unwrap()] {
                let gens = stabilizer_generators(&flag);
                assert!(gens.iter().all(|g| stabilizes(g, &flag)));
                let group = generated_group(&f, 2, &gens);
                assert_eq!(group.len() as u64, borel_order(q, 2));
                let expected: HashSet<Matrix> = enumerate_borel(&flag).unwrap().into_iter().collect();
                assert_eq!(group, expected);
            }
        }
        let f = FieldCtx::of_order(2).unwrap();
        let flag = standard_flag(&f, 3);
        assert_eq!(generated_group(&f, 3, &stabilizer_generators(&flag)).len(), 8);
    }

    #[test]
    fn stabilizer_is_conjugation_equivariant() {
        let f = FieldCtx::of_order(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..200 {
            let x = Matrix::random_invertible(&f, 3, &mut rng);
            let w = Matrix::random_invertible(&f, 3, &mut rng);
            let flag = flag_from_conjugator(&x).unwrap();
            let a = if rng.gen_bool(0.5) {
                let gens = stabilizer_generators(&flag);
                gens[rng.gen_range(0..gens.len())].mul(&gens[rng.gen_range(0..gens.len())])
            } else {
                Matrix::random_invertible(&f, 3, &mut rng)
            };
            let wi = w.inverse().unwrap();
            assert_eq!(stabilizes(&a, &flag), stabilizes(&w.mul(&a).mul(&wi), &flag.image(&w)));
            if stabilizes(&a, &flag) {
                assert!(stabilizes(&a.inverse().unwrap(), &flag));
            }
        }
    }

    #[test]
    fn lift_examples() {
        let f = FieldCtx::of_order(3).unwrap();
        let empty = standard_flag(&f, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let z = Matrix::random_invertible(&f, 2, &mut rng);
        let lifted = lift_flag(&empty, &z).unwrap();
        assert_eq!(lifted.member(1), &Subspace::coordinate_tail(&f, 2, 1).image(&z));

        let sub = standard_flag(&f, 2);
        let lifted = lift_flag(&sub, &Matrix::identity(&f, 3)).unwrap();
        assert_eq!(lifted, standard_flag(&f, 3));
        assert!(lift_flag(&sub, &Matrix::identity(&f, 2)).is_err());
    }

    #[test]
    fn flag_validation() {
        let f = FieldCtx::of_order(2).unwrap();
        let bad = vec![Subspace::coordinate_tail(&f, 3, 2), Subspace::coordinate_tail(&f, 3, 1)];
        assert!(Flag::new(&f, 3, bad).is_err());
        let not_nested = vec![
            Subspace::span(&f, 3, vec![Vector::unit(3, 0), Vector::unit(3, 1)]),
            Subspace::span(&f, 3, vec![Vector::unit(3, 2)]),
        ];
        assert_eq!(Flag::new(&f, 3, not_nested), Err(FlagError::NotNested(2)));
    }

    #[test]
    fn flag_json_shape() {
        let f = FieldCtx::of_order(3).unwrap();
        let json = serde_json::to_string(&standard_flag(&f, 3)).unwrap();
        assert_eq!(json, "[[[0,1,0],[0,0,1]],[[0,0,1]]]");
    }
}
