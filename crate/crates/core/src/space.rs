//! Indefinite inner-product spaces and their subspaces.
//!
//! A [`PontryaginSpace`] is `C^n` equipped with `[x, y] = y* J x` for a
//! Hermitian invertible Gram matrix `J`. Subspaces are stored in a canonical
//! Euclidean-orthonormal basis so that two subspaces with the same span compare
//! equal through their orthogonal projectors.

use crate::error::{Error, Result};
use crate::linalg::{
    col_span, fro, hermitian_eigenvalues, hstack, identity, inverse, max_abs, null_space,
    sigma_max, sigma_min, zeros, CMat, CVec, C64,
};
use crate::tolerance::{rank_threshold, zero_tol};

#[derive(Debug, Clone, PartialEq)]
pub struct PontryaginSpace {
    gram: CMat,
    gram_inv: CMat,
    neg_index: usize,
}

/// Counts of positive, negative and isotropic directions of a Hermitian form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature {
    pub pos: usize,
    pub neg: usize,
    pub iso: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.pos + self.neg + self.iso
    }

    /// Signature of a Hermitian matrix with eigenvalues within `tol·max(1, ‖h‖)` counted as zero.
    pub fn of_hermitian(h: &CMat) -> Signature {
        let ev = hermitian_eigenvalues(h);
        let scale = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let thr = rank_threshold(scale);
        let mut sig = Signature {
            pos: 0,
            neg: 0,
            iso: 0,
        };
        for x in ev {
            if x > thr {
                sig.pos += 1;
            } else if x < -thr {
                sig.neg += 1;
            } else {
                sig.iso += 1;
            }
        }
        sig
    }
}

impl PontryaginSpace {
    pub fn new(gram: CMat) -> Result<Self> {
        let (r, c) = gram.shape();
        if r != c {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: c,
            });
        }
        let deviation = max_abs(&(&gram - gram.adjoint()));
        if deviation > zero_tol() * max_abs(&gram).max(1.0) {
            return Err(Error::NonHermitianGram { deviation });
        }
        let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
        let smin = sigma_min(&gram);
        if r > 0 && smin <= rank_threshold(sigma_max(&gram)) {
            return Err(Error::SingularGram { sigma_min: smin });
        }
        let gram_inv = inverse(&gram).ok_or(Error::SingularGram { sigma_min: smin })?;
        let neg_index = hermitian_eigenvalues(&gram)
            .iter()
            .filter(|&&x| x < 0.0)
            .count();
        Ok(Self {
            gram,
            gram_inv,
            neg_index,
        })
    }

    /// Euclidean space `C^n`.
    pub fn hilbert(n: usize) -> Self {
        Self {
            gram: identity(n),
            gram_inv: identity(n),
            neg_index: 0,
        }
    }

    /// Space with diagonal Gram `diag(signs)`; entries must be nonzero.
    pub fn diagonal(signs: &[f64]) -> Result<Self> {
        Self::new(crate::linalg::diag_real(signs))
    }

    pub fn dim(&self) -> usize {
        self.gram.nrows()
    }

    pub fn gram(&self) -> &CMat {
        &self.gram
    }

    pub fn gram_inv(&self) -> &CMat {
        &self.gram_inv
    }

    pub fn neg_index(&self) -> usize {
        self.neg_index
    }

    /// `[x, y] = y* J x`.
    pub fn inner(&self, x: &CVec, y: &CVec) -> Result<C64> {
        self.check_len(x.len())?;
        self.check_len(y.len())?;
        Ok((y.adjoint() * &self.gram * x)[(0, 0)])
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    /// Gram matrix `B* J B` of a family of column vectors.
    pub fn gram_of(&self, basis: &CMat) -> CMat {
        basis.adjoint() * &self.gram * basis
    }

    /// Orthogonal sum with `other` (block-diagonal Gram, `self` first).
    pub fn direct_sum(&self, other: &PontryaginSpace) -> PontryaginSpace {
        PontryaginSpace {
            gram: crate::linalg::block_diag(&self.gram, &other.gram),
            gram_inv: crate::linalg::block_diag(&self.gram_inv, &other.gram_inv),
            neg_index: self.neg_index + other.neg_index,
        }
    }

    pub fn subspace_signature(&self, s: &Subspace) -> Signature {
        Signature::of_hermitian(&self.gram_of(s.basis()))
    }

    /// `S^[⊥] = {y : [x, y] = 0 for all x in S}`.
    pub fn ortho_companion(&self, s: &Subspace) -> Subspace {
        let constraints = (&self.gram * s.basis()).adjoint();
        Subspace::from_basis_unchecked(null_space(&constraints))
    }

    /// `A^[*] = J_from⁻¹ A* J_to` for `A: from → to`.
    pub fn indef_adjoint(a: &CMat, from: &PontryaginSpace, to: &PontryaginSpace) -> Result<CMat> {
        if a.nrows() != to.dim() {
            return Err(Error::DimensionMismatch {
                expected: to.dim(),
                got: a.nrows(),
            });
        }
        if a.ncols() != from.dim() {
            return Err(Error::DimensionMismatch {
                expected: from.dim(),
                got: a.ncols(),
            });
        }
        Ok(&from.gram_inv * a.adjoint() * &to.gram)
    }

    pub fn approx_eq(&self, other: &PontryaginSpace, tol: f64) -> bool {
        self.dim() == other.dim() && max_abs(&(&self.gram - &other.gram)) <= tol
    }
}

/// Linear subspace of `C^n` with a Euclidean-orthonormal basis.
#[derive(Debug, Clone)]
pub struct Subspace {
    basis: CMat,
}

impl Subspace {
    /// Canonical subspace spanned by the columns of `spanning` (`n × k`).
    pub fn span(spanning: &CMat) -> Subspace {
        Subspace {
            basis: col_span(spanning),
        }
    }

    pub fn from_vectors(ambient_dim: usize, vectors: &[CVec]) -> Subspace {
        let mut m = zeros(ambient_dim, vectors.len());
        for (k, v) in vectors.iter().enumerate() {
            m.set_column(k, v);
        }
        Subspace::span(&m)
    }

    pub(crate) fn from_basis_unchecked(basis: CMat) -> Subspace {
        Subspace { basis }
    }

    pub fn zero(ambient_dim: usize) -> Subspace {
        Subspace {
            basis: zeros(ambient_dim, 0),
        }
    }

    pub fn full(ambient_dim: usize) -> Subspace {
        Subspace {
            basis: identity(ambient_dim),
        }
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    pub fn projector(&self) -> CMat {
        &self.basis * self.basis.adjoint()
    }

    /// Largest entrywise difference of the orthogonal projectors.
    pub fn distance(&self, other: &Subspace) -> f64 {
        assert_eq!(self.ambient_dim(), other.ambient_dim());
        max_abs(&(self.projector() - other.projector()))
    }

    pub fn approx_eq(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.distance(other) <= zero_tol()
    }

    /// Norm of the component of `other` outside `self`, relative to `other`'s basis.
    pub fn containment_residual(&self, other: &Subspace) -> f64 {
        if other.dim() == 0 {
            return 0.0;
        }
        let outside = other.basis() - self.projector() * other.basis();
        fro(&outside)
    }

    pub fn contains(&self, other: &Subspace) -> bool {
        self.containment_residual(other) <= zero_tol() * (other.dim() as f64).sqrt().max(1.0)
    }

    pub fn contains_vector(&self, v: &CVec) -> bool {
        let outside = v - self.projector() * v;
        outside.norm() <= zero_tol() * v.norm().max(1.0)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(&hstack(&self.basis, &other.basis))
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        if self.dim() == 0 || other.dim() == 0 {
            return Subspace::zero(self.ambient_dim());
        }
        let stacked = hstack(&self.basis, &(-other.basis.clone()));
        let ns = null_space(&stacked);
        let coeffs = ns.rows(0, self.dim()).into_owned();
        Subspace::span(&(&self.basis * coeffs))
    }

    /// Euclidean orthogonal complement inside `within` (which must contain `self`).
    pub fn complement_in(&self, within: &Subspace) -> Subspace {
        let residual = within.basis() - self.projector() * within.basis();
        Subspace::span(&residual)
    }

    /// Image of the subspace under a linear map.
    pub fn map(&self, a: &CMat) -> Subspace {
        Subspace::span(&(a * &self.basis))
    }
}

impl PartialEq for Subspace {
    fn eq(&self, other: &Self) -> bool {
        self.ambient_dim() == other.ambient_dim() && self.approx_eq(other)
    }
}
