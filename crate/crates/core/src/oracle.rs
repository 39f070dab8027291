//! Black-box hiding functions for Borel subgroups.
//!
//! The hidden subgroup is `H = X^{-1} L X` for a private invertible `X`, and
//! `f(A)` is the canonical form of `XA` under left multiplication by invertible
//! lower triangular matrices. Two invertible inputs get the same label exactly
//! when `A B^{-1}` lies in `H`. Singular inputs are canonicalized the same way
//! and tagged [`LabelTag::Singular`], so they never collide with invertible
//! ones.
//!
//! In SL mode the base function is only defined on `SL_n` and hides
//! `X^{-1} L_0 X` with `L_0` the determinant-one lower triangular matrices.
//! [`HidingOracle::sl_query`] extends it to the group of matrices whose
//! determinant is an n-th power by `f(A) = f(z^{-1} A)` with `z^n = det A`.
//!
//! Solvers talk to an [`OracleView`]: the base function seen through a
//! composed conjugation `A -> W diag(A, I) W^{-1}`, which realizes both the
//! conjugated function `f'(A) = f(Z A Z^{-1})` and the restriction to the
//! upper-left block.

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::borel::{flag_from_conjugator, Flag, FlagError};
use crate::gf::{Field, Fq};
use crate::linalg::{LinalgError, Matrix, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("input is outside the oracle's domain")]
    OutsideDomain,
    #[error("determinant is not an n-th power")]
    NotNthPower,
    #[error("{0} is not an n-th root of the determinant")]
    WrongRoot(u32),
    #[error("operation requires {0} mode")]
    WrongMode(Mode),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("view is not consistent with the hidden flag")]
    Inconsistent,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Flag(#[from] FlagError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Gl,
    Sl,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Gl => "gl",
            Mode::Sl => "sl",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "gl" => Ok(Mode::Gl),
            "sl" => Ok(Mode::Sl),
            other => Err(format!("unknown mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelTag {
    Coset,
    Singular,
}

/// Value of the hiding function: a tag plus the canonical matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OracleLabel {
    pub tag: LabelTag,
    pub payload: Vec<u32>,
}

impl OracleLabel {
    pub fn is_coset(&self) -> bool {
        self.tag == LabelTag::Coset
    }
}

/// Canonical representative of the orbit `{ l M : l invertible lower triangular }`.
///
/// Rows are processed top to bottom. Row `i` has the pivot columns of the
/// earlier rows eliminated using those rows, then is scaled so its leading
/// entry is 1. A row that vanishes stays zero.
pub fn canonical_form(m: &Matrix) -> Matrix {
    let f = m.field().clone();
    let (rows, cols) = (m.rows(), m.cols());
    let mut out: Vec<Vec<Fq>> = Vec::with_capacity(rows);
    let mut pivots: Vec<Option<usize>> = Vec::with_capacity(rows);
    for i in 0..rows {
        let mut v = m.row(i).to_vec();
        for (j, pj) in pivots.iter().enumerate() {
            let Some(pc) = *pj else { continue };
            let c = v[pc];
            if c.is_zero() {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(&out[j]) {
                *x = f.sub(*x, f.mul(c, y));
            }
        }
        let lead = v.iter().position(|x| !x.is_zero());
        if let Some(l) = lead {
            let s = f.inv(v[l]).expect("nonzero lead");
            for x in v.iter_mut() {
                *x = f.mul(s, *x);
            }
        }
        pivots.push(lead);
        out.push(v);
    }
    let _ = cols;
    Matrix::from_rows(&f, out).expect("rectangular")
}

/// Label of a matrix `M = X A` (before any domain checks).
pub fn label_of(m: &Matrix) -> OracleLabel {
    let c = canonical_form(m);
    let singular = (0..c.rows()).any(|i| c.row(i).iter().all(|x| x.is_zero()));
    OracleLabel { tag: if singular { LabelTag::Singular } else { LabelTag::Coset }, payload: c.encodings() }
}

/// Public description of a generated instance.
#[derive(Debug, Clone)]
pub struct BorelDescriptor {
    pub flag: Flag,
    /// The conjugator the instance was generated from.
    pub conjugator: Option<Matrix>,
}

/// Query-counted hiding function for a Borel subgroup.
pub struct HidingOracle {
    field: Field,
    n: usize,
    mode: Mode,
    hidden: Matrix,
    queries: AtomicU64,
}

impl std::fmt::Debug for HidingOracle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HidingOracle")
            .field("n", &self.n)
            .field("mode", &self.mode)
            .field("queries", &self.query_count())
            .finish_non_exhaustive()
    }
}

impl HidingOracle {
    /// Draws `X` uniformly from GL_n(F_q).
    pub fn make_instance(field: &Field, n: usize, mode: Mode, rng: &mut impl Rng) -> (Self, BorelDescriptor) {
        let x = Matrix::random_invertible(field, n, rng);
        let oracle = Self::with_conjugator(x.clone(), mode).expect("invertible by construction");
        let flag = flag_from_conjugator(&x).expect("invertible");
        (oracle, BorelDescriptor { flag, conjugator: Some(x) })
    }

    pub fn with_conjugator(x: Matrix, mode: Mode) -> Result<Self, OracleError> {
        if !x.is_invertible() {
            return Err(OracleError::Linalg(LinalgError::Singular));
        }
        Ok(HidingOracle { field: x.field().clone(), n: x.rows(), mode, hidden: x, queries: AtomicU64::new(0) })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn query_count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    /// Allowed determinants on the solver-facing domain are the e-th powers.
    pub fn det_exponent(&self) -> u64 {
        match self.mode {
            Mode::Gl => 1,
            Mode::Sl => self.n as u64,
        }
    }

    fn check_dim(&self, a: &Matrix) -> Result<(), OracleError> {
        if a.rows() != self.n || a.cols() != self.n {
            return Err(OracleError::Dimension(format!("expected {0}x{0}, got {1}x{2}", self.n, a.rows(), a.cols())));
        }
        Ok(())
    }

    fn tick(&self) {
        self.queries.fetch_add(1, Ordering::Relaxed);
    }

    fn label_uncounted(&self, a: &Matrix) -> OracleLabel {
        label_of(&self.hidden.mul(a))
    }

    /// The base hiding function. In SL mode invertible inputs must have
    /// determinant one.
    pub fn query(&self, a: &Matrix) -> Result<OracleLabel, OracleError> {
        self.tick();
        self.check_dim(a)?;
        if self.mode == Mode::Sl {
            let d = a.det()?;
            if !d.is_zero() && d != Fq::ONE {
                return Err(OracleError::OutsideDomain);
            }
        }
        Ok(self.label_uncounted(a))
    }

    /// Extension of the SL function to matrices whose determinant is an n-th
    /// power: `f(A) = f(z^{-1} A)` with `z` the smallest root of `det A`.
    pub fn sl_query(&self, a: &Matrix) -> Result<OracleLabel, OracleError> {
        self.tick();
        self.check_dim(a)?;
        if self.mode != Mode::Sl {
            return Err(OracleError::WrongMode(Mode::Sl));
        }
        let d = a.det()?;
        if d.is_zero() {
            return Ok(self.label_uncounted(a));
        }
        let n = self.n as u64;
        if !self.field.is_nth_power(d, n) {
            return Err(OracleError::NotNthPower);
        }
        let z = self.field.nth_root(d, n).expect("nonzero").ok_or(OracleError::NotNthPower)?;
        self.label_at_root(a, z)
    }

    /// As [`Self::sl_query`] with a caller-chosen root `z` of `det A`.
    pub fn sl_query_with_root(&self, a: &Matrix, z: Fq) -> Result<OracleLabel, OracleError> {
        self.tick();
        self.check_dim(a)?;
        if self.mode != Mode::Sl {
            return Err(OracleError::WrongMode(Mode::Sl));
        }
        if self.field.pow(z, self.n as u64) != a.det()? || z.is_zero() {
            return Err(OracleError::WrongRoot(z.encoding()));
        }
        self.label_at_root(a, z)
    }

    fn label_at_root(&self, a: &Matrix, z: Fq) -> Result<OracleLabel, OracleError> {
        let zi = self.field.inv(z).expect("nonzero root");
        let scaled = a.scalar_mul(zi);
        debug_assert_eq!(scaled.det()?, Fq::ONE);
        Ok(self.label_uncounted(&scaled))
    }

    /// The solver-facing function: [`Self::query`] in GL mode,
    /// [`Self::sl_query`] in SL mode.
    pub fn query_group(&self, a: &Matrix) -> Result<OracleLabel, OracleError> {
        match self.mode {
            Mode::Gl => self.query(a),
            Mode::Sl => self.sl_query(a),
        }
    }

    /// Whether `a` lies in the subgroup hidden by [`Self::query_group`].
    /// Simulator and test use only.
    pub fn hidden_contains(&self, a: &Matrix) -> bool {
        let Ok(xi) = self.hidden.inverse() else { return false };
        let Ok(d) = a.det() else { return false };
        if d.is_zero() || !self.field.is_nth_power(d, self.det_exponent()) {
            return false;
        }
        self.hidden.mul(a).mul(&xi).is_lower_triangular()
    }

    /// Flag stabilized by the hidden subgroup. Simulator and test use only.
    pub fn hidden_flag(&self) -> Flag {
        flag_from_conjugator(&self.hidden).expect("invertible")
    }

    /// The private conjugator. Simulator and test use only.
    pub fn hidden_conjugator(&self) -> &Matrix {
        &self.hidden
    }

    pub fn view(&self) -> OracleView<'_> {
        let id = Matrix::identity(&self.field, self.n);
        OracleView { base: self, frame: id.clone(), frame_inv: id, dim: self.n }
    }
}

/// The base function seen through `A -> W diag(A, I) W^{-1}` on `GL_dim`.
#[derive(Clone)]
pub struct OracleView<'a> {
    base: &'a HidingOracle,
    frame: Matrix,
    frame_inv: Matrix,
    dim: usize,
}

impl std::fmt::Debug for OracleView<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OracleView").field("dim", &self.dim).finish_non_exhaustive()
    }
}

impl<'a> OracleView<'a> {
    pub fn field(&self) -> &Field {
        self.base.field()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn mode(&self) -> Mode {
        self.base.mode()
    }

    pub fn det_exponent(&self) -> u64 {
        self.base.det_exponent()
    }

    pub fn base(&self) -> &'a HidingOracle {
        self.base
    }

    pub fn query_count(&self) -> u64 {
        self.base.query_count()
    }

    fn lift(&self, a: &Matrix) -> Matrix {
        let big = a.block_with_identity(self.base.n - self.dim);
        self.frame.mul(&big).mul(&self.frame_inv)
    }

    pub fn query(&self, a: &Matrix) -> Result<OracleLabel, OracleError> {
        if a.rows() != self.dim || a.cols() != self.dim {
            self.base.tick();
            return Err(OracleError::Dimension(format!("expected {0}x{0}", self.dim)));
        }
        self.base.query_group(&self.lift(a))
    }

    /// `f'(A) = f(Z A Z^{-1})`, hiding `Z^{-1} H Z`.
    pub fn conjugated(&self, z: &Matrix) -> Result<OracleView<'a>, OracleError> {
        if z.rows() != self.dim || z.cols() != self.dim {
            return Err(OracleError::Dimension("conjugator size".into()));
        }
        let zi = z.inverse()?;
        let extra = self.base.n - self.dim;
        Ok(OracleView {
            base: self.base,
            frame: self.frame.mul(&z.block_with_identity(extra)),
            frame_inv: zi.block_with_identity(extra).mul(&self.frame_inv),
            dim: self.dim,
        })
    }

    /// Restriction to `diag(A', 1)` with `A'` in `GL_{dim-1}`.
    pub fn restricted(&self) -> Result<OracleView<'a>, OracleError> {
        if self.dim < 2 {
            return Err(OracleError::Dimension("cannot restrict below dimension 1".into()));
        }
        Ok(OracleView { base: self.base, frame: self.frame.clone(), frame_inv: self.frame_inv.clone(), dim: self.dim - 1 })
    }

    /// Flag stabilized by the subgroup this view hides. Simulator and test
    /// use only.
    ///
    /// Fails when earlier restrictions were taken without a correct guess,
    /// in which case the view hides no Borel subgroup.
    pub fn hidden_flag(&self) -> Result<Flag, OracleError> {
        let f = self.field();
        let n = self.base.n;
        let m = self.dim;
        let moved = self.base.hidden_flag().image(&self.frame_inv);
        for k in m..n {
            if moved.member(k) != &Subspace::coordinate_tail(f, n, k) {
                return Err(OracleError::Inconsistent);
            }
        }
        let head = Subspace::span(f, n, (0..m).map(|k| crate::linalg::Vector::unit(n, k)).collect());
        let members = (1..m)
            .map(|k| moved.member(k).intersect(&head).truncate(m))
            .collect();
        Ok(Flag::new(f, m, members)?)
    }

    /// Some conjugator for [`Self::hidden_flag`]. Simulator use only.
    pub fn hidden_conjugator(&self) -> Result<Matrix, OracleError> {
        Ok(self.hidden_flag()?.conjugator())
    }
}
