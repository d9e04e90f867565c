//! Linear relations between Pontryagin spaces.
//!
//! A relation `T ⊆ H₁ × H₂` is stored as its graph, a subspace of `C^{n+m}`
//! whose vectors are stacked as `(f; f')`. Everything else (domain, kernel,
//! adjoint, spectrum) is recomputed from the graph on demand.

use crate::error::{Error, Result};
use crate::linalg::{
    eigenvalues, hermitian_eigenvalues, hstack, identity, inverse, max_abs, null_space, rows,
    sort_complex, svd_full, numerical_rank, vstack, zeros, CMat, C64,
};
use crate::space::{PontryaginSpace, Subspace};
use crate::tolerance::rank_threshold;

#[derive(Debug, Clone)]
pub struct LinearRelation {
    from: PontryaginSpace,
    to: PontryaginSpace,
    graph: Subspace,
}

/// Domain, kernel, range and multivalued part.
#[derive(Debug, Clone)]
pub struct Parts {
    pub dom: Subspace,
    pub ker: Subspace,
    pub ran: Subspace,
    pub mul: Subspace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RelationClass {
    pub isometric: bool,
    pub coisometric: bool,
    pub unitary: bool,
    pub contractive: bool,
    pub expansive: bool,
    pub operator: bool,
    pub everywhere_defined: bool,
}

/// Finite spectrum of a relation in one space.
#[derive(Debug, Clone, PartialEq)]
pub struct PencilSpectrum {
    /// Eigenvalues sorted by real, then imaginary part (with multiplicity).
    pub eigenvalues: Vec<C64>,
    /// `mul T ≠ {0}`.
    pub at_infinity: bool,
}

impl LinearRelation {
    /// Relation spanned by the columns of `spanning`, each stacked as `(f; f')`.
    pub fn new(from: PontryaginSpace, to: PontryaginSpace, spanning: &CMat) -> Result<Self> {
        let expected = from.dim() + to.dim();
        if spanning.nrows() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: spanning.nrows(),
            });
        }
        Ok(Self {
            from,
            to,
            graph: Subspace::span(spanning),
        })
    }

    pub fn from_subspace(from: PontryaginSpace, to: PontryaginSpace, graph: Subspace) -> Result<Self> {
        let expected = from.dim() + to.dim();
        if graph.ambient_dim() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: graph.ambient_dim(),
            });
        }
        Ok(Self { from, to, graph })
    }

    /// Relation `{(f, f')}` from separate top and bottom blocks with matching column counts.
    pub fn from_pairs(from: PontryaginSpace, to: PontryaginSpace, top: &CMat, bottom: &CMat) -> Result<Self> {
        if top.ncols() != bottom.ncols() {
            return Err(Error::IncompatibleShapes(format!(
                "{} domain vectors but {} images",
                top.ncols(),
                bottom.ncols()
            )));
        }
        if top.nrows() != from.dim() {
            return Err(Error::DimensionMismatch {
                expected: from.dim(),
                got: top.nrows(),
            });
        }
        if bottom.nrows() != to.dim() {
            return Err(Error::DimensionMismatch {
                expected: to.dim(),
                got: bottom.nrows(),
            });
        }
        Self::new(from, to, &vstack(top, bottom))
    }

    /// Graph of the matrix `a: from → to`.
    pub fn graph_of(a: &CMat, from: PontryaginSpace, to: PontryaginSpace) -> Result<Self> {
        Self::from_pairs(from.clone(), to, &identity(from.dim()), a)
    }

    pub fn identity(space: PontryaginSpace) -> Self {
        let n = space.dim();
        Self::graph_of(&identity(n), space.clone(), space).expect("square identity")
    }

    /// `{(0, 0)}`.
    pub fn trivial(from: PontryaginSpace, to: PontryaginSpace) -> Self {
        let n = from.dim() + to.dim();
        Self {
            from,
            to,
            graph: Subspace::zero(n),
        }
    }

    /// `from × to`.
    pub fn full(from: PontryaginSpace, to: PontryaginSpace) -> Self {
        let n = from.dim() + to.dim();
        Self {
            from,
            to,
            graph: Subspace::full(n),
        }
    }

    pub fn from_space(&self) -> &PontryaginSpace {
        &self.from
    }

    pub fn to_space(&self) -> &PontryaginSpace {
        &self.to
    }

    pub fn graph(&self) -> &Subspace {
        &self.graph
    }

    pub fn dim(&self) -> usize {
        self.graph.dim()
    }

    /// First components of the graph basis (`n × k`).
    pub fn top(&self) -> CMat {
        rows(self.graph.basis(), 0, self.from.dim())
    }

    /// Second components of the graph basis (`m × k`).
    pub fn bottom(&self) -> CMat {
        rows(self.graph.basis(), self.from.dim(), self.to.dim())
    }

    pub fn product_space(&self) -> PontryaginSpace {
        self.from.direct_sum(&self.to)
    }

    pub fn dom(&self) -> Subspace {
        Subspace::span(&self.top())
    }

    pub fn ran(&self) -> Subspace {
        Subspace::span(&self.bottom())
    }

    pub fn ker(&self) -> Subspace {
        let coeffs = null_space(&self.bottom());
        Subspace::span(&(self.top() * coeffs))
    }

    pub fn mul(&self) -> Subspace {
        let coeffs = null_space(&self.top());
        Subspace::span(&(self.bottom() * coeffs))
    }

    pub fn parts(&self) -> Parts {
        Parts {
            dom: self.dom(),
            ker: self.ker(),
            ran: self.ran(),
            mul: self.mul(),
        }
    }

    pub fn is_operator(&self) -> bool {
        self.mul().is_zero()
    }

    pub fn inverse(&self) -> LinearRelation {
        let swapped = vstack(&self.bottom(), &self.top());
        LinearRelation::new(self.to.clone(), self.from.clone(), &swapped).expect("swap keeps shape")
    }

    /// Indefinite adjoint `T^[*]`: all `(g, g')` with `[f', g]₂ = [f, g']₁` for `(f, f') ∈ T`.
    pub fn adjoint(&self) -> LinearRelation {
        let left = (self.to.gram() * self.bottom()).adjoint();
        let right = -(self.from.gram() * self.top()).adjoint();
        let basis = null_space(&hstack(&left, &right));
        LinearRelation::new(self.to.clone(), self.from.clone(), &basis).expect("adjoint shape")
    }

    /// `T^{-[*]}`, the adjoint of the inverse.
    pub fn inverse_adjoint(&self) -> LinearRelation {
        self.inverse().adjoint()
    }

    /// `{(f, g + h) : (f, g) ∈ self, (f, h) ∈ other}`.
    pub fn sum(&self, other: &LinearRelation) -> Result<LinearRelation> {
        self.check_same_spaces(other)?;
        let (t_top, t_bot) = (self.top(), self.bottom());
        let (s_top, s_bot) = (other.top(), other.bottom());
        let coupling = hstack(&t_top, &(-s_top.clone()));
        let ns = null_space(&coupling);
        let a = rows(&ns, 0, self.dim());
        let b = rows(&ns, self.dim(), other.dim());
        let top = &t_top * &a;
        let bottom = &t_bot * &a + &s_bot * &b;
        LinearRelation::from_pairs(self.from.clone(), self.to.clone(), &top, &bottom)
    }

    /// Composition `other ∘ self = {(f, h) : (f, g) ∈ self, (g, h) ∈ other}`.
    pub fn then(&self, other: &LinearRelation) -> Result<LinearRelation> {
        if self.to.dim() != other.from.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.to.dim(),
                got: other.from.dim(),
            });
        }
        let coupling = hstack(&self.bottom(), &(-other.top()));
        let ns = null_space(&coupling);
        let a = rows(&ns, 0, self.dim());
        let b = rows(&ns, self.dim(), other.dim());
        LinearRelation::from_pairs(
            self.from.clone(),
            other.to.clone(),
            &(self.top() * a),
            &(other.bottom() * b),
        )
    }

    /// `{(f, c f')}`.
    pub fn scale(&self, c: C64) -> LinearRelation {
        LinearRelation::from_pairs(
            self.from.clone(),
            self.to.clone(),
            &self.top(),
            &(self.bottom() * c),
        )
        .expect("same shape")
    }

    /// `T − λ = {(f, f' − λf)}` for a relation in one space.
    pub fn shift(&self, lambda: C64) -> Result<LinearRelation> {
        self.check_square()?;
        let top = self.top();
        let bottom = self.bottom() - &top * lambda;
        LinearRelation::from_pairs(self.from.clone(), self.to.clone(), &top, &bottom)
    }

    /// `{(f, f') ∈ T : f ∈ d}`.
    pub fn restrict(&self, d: &Subspace) -> Result<LinearRelation> {
        if d.ambient_dim() != self.from.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.from.dim(),
                got: d.ambient_dim(),
            });
        }
        let outside = d.complement_in(&Subspace::full(self.from.dim()));
        let coeffs = null_space(&(outside.basis().adjoint() * self.top()));
        LinearRelation::new(
            self.from.clone(),
            self.to.clone(),
            &(self.graph.basis() * coeffs),
        )
    }

    /// Orthogonal direct sum `self ⊕ other` acting in the product spaces, `self` first.
    pub fn direct_sum(&self, other: &LinearRelation) -> LinearRelation {
        let (n1, m1) = (self.from.dim(), self.to.dim());
        let (n2, m2) = (other.from.dim(), other.to.dim());
        let (k1, k2) = (self.dim(), other.dim());
        let mut basis = zeros(n1 + n2 + m1 + m2, k1 + k2);
        basis.view_mut((0, 0), (n1, k1)).copy_from(&self.top());
        basis.view_mut((n1, k1), (n2, k2)).copy_from(&other.top());
        basis.view_mut((n1 + n2, 0), (m1, k1)).copy_from(&self.bottom());
        basis
            .view_mut((n1 + n2 + m1, k1), (m2, k2))
            .copy_from(&other.bottom());
        LinearRelation::new(
            self.from.direct_sum(&other.from),
            self.to.direct_sum(&other.to),
            &basis,
        )
        .expect("block shape")
    }

    pub fn contains(&self, other: &LinearRelation) -> bool {
        self.compatible(other) && self.graph.contains(&other.graph)
    }

    pub fn same_as(&self, other: &LinearRelation) -> bool {
        self.compatible(other) && self.graph.approx_eq(&other.graph)
    }

    /// Projector distance between graphs (infinite if the spaces differ).
    pub fn distance(&self, other: &LinearRelation) -> f64 {
        if !self.compatible(other) {
            return f64::INFINITY;
        }
        if self.dim() != other.dim() {
            return self.graph.distance(&other.graph).max(1.0);
        }
        self.graph.distance(&other.graph)
    }

    fn compatible(&self, other: &LinearRelation) -> bool {
        self.from.dim() == other.from.dim() && self.to.dim() == other.to.dim()
    }

    fn check_same_spaces(&self, other: &LinearRelation) -> Result<()> {
        if !self.compatible(other) {
            return Err(Error::IncompatibleShapes(format!(
                "{}→{} vs {}→{}",
                self.from.dim(),
                self.to.dim(),
                other.from.dim(),
                other.to.dim()
            )));
        }
        Ok(())
    }

    fn check_square(&self) -> Result<()> {
        if self.from.dim() != self.to.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.from.dim(),
                got: self.to.dim(),
            });
        }
        Ok(())
    }

    /// `[f', f']₂ − [f, f]₁` as a Hermitian form on graph coordinates.
    pub fn gram_difference(&self) -> CMat {
        let (top, bottom) = (self.top(), self.bottom());
        bottom.adjoint() * self.to.gram() * &bottom - top.adjoint() * self.from.gram() * &top
    }

    pub fn classify(&self) -> RelationClass {
        let d = self.gram_difference();
        let scale = max_abs(self.from.gram()).max(max_abs(self.to.gram()));
        let thr = rank_threshold(scale);
        let ev = hermitian_eigenvalues(&d);
        let isometric = max_abs(&d) <= thr;
        let contractive = ev.iter().all(|&x| x <= thr);
        let expansive = ev.iter().all(|&x| x >= -thr);
        let inv = self.inverse();
        let adj = self.adjoint();
        let coisometric = inv.contains(&adj);
        let unitary = inv.same_as(&adj);
        let operator = self.is_operator();
        let everywhere_defined = self.dom().dim() == self.from.dim();
        RelationClass {
            isometric,
            coisometric,
            unitary,
            contractive,
            expansive,
            operator,
            everywhere_defined,
        }
    }

    /// Points `λ` with `ker(T − λ) ≠ {0}`.
    pub fn pencil_spectrum(&self) -> Result<PencilSpectrum> {
        self.check_square()?;
        let eigenvalues = pencil_eigenvalues(&self.top(), &self.bottom())?;
        Ok(PencilSpectrum {
            eigenvalues,
            at_infinity: !self.mul().is_zero(),
        })
    }

    /// Matrix of `(T − λ)^{-1}` when it is an everywhere defined operator.
    pub fn resolvent(&self, lambda: C64) -> Result<CMat> {
        self.check_square()?;
        let n = self.from.dim();
        if self.dim() != n {
            return Err(Error::NotInvertible { lambda });
        }
        let top = self.top();
        let shifted = self.bottom() - &top * lambda;
        let inv = inverse(&shifted).ok_or(Error::NotInvertible { lambda })?;
        Ok(top * inv)
    }

    /// Matrix of an everywhere defined operator.
    pub fn as_matrix(&self) -> Result<CMat> {
        let n = self.from.dim();
        let mul_dim = self.mul().dim();
        if mul_dim > 0 {
            return Err(Error::NotAnOperator { mul_dim });
        }
        if self.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.dim(),
            });
        }
        let inv = inverse(&self.top()).ok_or(Error::DimensionMismatch {
            expected: n,
            got: self.dom().dim(),
        })?;
        Ok(self.bottom() * inv)
    }
}

impl PartialEq for LinearRelation {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

/// Eigenvalues of the pencil `B − λA` whose stacked columns `(A; B)` are independent.
///
/// Staircase reduction: rows of `B` outside the range of `A` give
/// λ-independent constraints, which shrink the pencil until `A` is square
/// and invertible, or until the pencil is empty or wider than tall.
fn pencil_eigenvalues(a: &CMat, b: &CMat) -> Result<Vec<C64>> {
    let (p, q) = a.shape();
    if q == 0 {
        return Ok(Vec::new());
    }
    if q > p {
        return Err(Error::DegeneratePencil);
    }
    let (sigma, u_thin, v) = svd_full(a);
    let r_a = numerical_rank(&sigma);
    if r_a == p && q == p {
        let inv = inverse(a).ok_or(Error::DegeneratePencil)?;
        let mut ev = eigenvalues(&(inv * b));
        sort_complex(&mut ev);
        return Ok(ev);
    }
    // Complete the left singular basis so that U* splits rows into range(A) and its complement.
    let u_range = crate::linalg::cols(&u_thin, 0, r_a);
    let u_perp = null_space(&u_range.adjoint());
    let bv = b * &v;
    let constraint = u_perp.adjoint() * &bv;
    let n = null_space(&constraint);
    if n.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut sig1 = zeros(r_a, q);
    for i in 0..r_a {
        sig1[(i, i)] = C64::new(sigma[i], 0.0);
    }
    let a_next = sig1 * &n;
    let b_next = u_range.adjoint() * &bv * &n;
    if a_next.nrows() == p {
        // no reduction happened; can only occur when A is square of full rank (handled above)
        return Err(Error::DegeneratePencil);
    }
    pencil_eigenvalues(&a_next, &b_next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cr, from_real_rows, scaled_residual};

    fn h(n: usize) -> PontryaginSpace {
        PontryaginSpace::hilbert(n)
    }

    fn mink() -> PontryaginSpace {
        PontryaginSpace::diagonal(&[1.0, -1.0]).unwrap()
    }

    fn op(rows: &[&[f64]]) -> LinearRelation {
        let a = from_real_rows(rows);
        let n = a.nrows();
        LinearRelation::graph_of(&a, h(n), h(n)).unwrap()
    }

    /// V e₁ = e₂ on span{e₁} in C².
    fn shift2() -> LinearRelation {
        let top = from_real_rows(&[&[1.0], &[0.0]]);
        let bottom = from_real_rows(&[&[0.0], &[1.0]]);
        LinearRelation::from_pairs(h(2), h(2), &top, &bottom).unwrap()
    }

    #[test]
    fn parts_of_identity_and_pure_mul() {
        let id = LinearRelation::identity(h(2));
        let p = id.parts();
        assert_eq!((p.dom.dim(), p.ran.dim(), p.ker.dim(), p.mul.dim()), (2, 2, 0, 0));
        let m = LinearRelation::from_pairs(h(1), h(1), &from_real_rows(&[&[0.0]]), &from_real_rows(&[&[1.0]])).unwrap();
        let p = m.parts();
        assert_eq!((p.dom.dim(), p.mul.dim()), (0, 1));
    }

    #[test]
    fn inverse_swaps_and_is_involutive() {
        let t = op(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let inv = t.inverse();
        assert!(inv.mul().approx_eq(&t.ker()));
        assert!(inv.inverse().same_as(&t));
        let id = LinearRelation::identity(h(2));
        assert!(id.inverse().same_as(&id));
    }

    #[test]
    fn adjoint_of_shift_inverse() {
        // {((a,b),(c,a))}
        let vstar = shift2().inverse_adjoint();
        assert_eq!(vstar.dim(), 3);
        let expected = LinearRelation::new(
            h(2),
            h(2),
            &from_real_rows(&[
                &[1.0, 0.0, 0.0],
                &[0.0, 1.0, 0.0],
                &[0.0, 0.0, 1.0],
                &[1.0, 0.0, 0.0],
            ]),
        )
        .unwrap();
        assert!(vstar.same_as(&expected));
    }

    #[test]
    fn adjoint_of_matrix_graph() {
        let a = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let t = LinearRelation::graph_of(&a, h(2), h(2)).unwrap();
        let expect = LinearRelation::graph_of(&a.adjoint(), h(2), h(2)).unwrap();
        assert!(t.adjoint().same_as(&expect));
        let j = mink();
        let t = LinearRelation::graph_of(&a, j.clone(), j.clone()).unwrap();
        let aj = PontryaginSpace::indef_adjoint(&a, &j, &j).unwrap();
        assert!(t.adjoint().same_as(&LinearRelation::graph_of(&aj, j.clone(), j).unwrap()));
    }

    #[test]
    fn sums() {
        let a = from_real_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = from_real_rows(&[&[0.0, -1.0], &[5.0, 0.5]]);
        let ta = LinearRelation::graph_of(&a, h(2), h(2)).unwrap();
        let tb = LinearRelation::graph_of(&b, h(2), h(2)).unwrap();
        let s = ta.sum(&tb).unwrap();
        assert!(s.same_as(&LinearRelation::graph_of(&(&a + &b), h(2), h(2)).unwrap()));
        let zero = LinearRelation::graph_of(&zeros(2, 2), h(2), h(2)).unwrap();
        assert!(shift2().sum(&zero).unwrap().same_as(&shift2()));
        // τ⁻¹ − M₁(3) with τ = 4 and M₁(3) = 1/9
        let tau = LinearRelation::graph_of(&from_real_rows(&[&[4.0]]), h(1), h(1)).unwrap();
        let m = LinearRelation::graph_of(&from_real_rows(&[&[-1.0 / 9.0]]), h(1), h(1)).unwrap();
        let d = tau.inverse().sum(&m).unwrap().as_matrix().unwrap();
        assert!((d[(0, 0)] - cr(5.0 / 36.0)).norm() < 1e-14);
    }

    #[test]
    fn classification() {
        let j = mink();
        // boost: J-unitary
        let (ch, sh) = (2f64.sqrt(), 1.0);
        let w = from_real_rows(&[&[ch, sh], &[sh, ch]]);
        let cls = LinearRelation::graph_of(&w, j.clone(), j.clone()).unwrap().classify();
        assert!(cls.unitary && cls.isometric && cls.coisometric && cls.operator && cls.everywhere_defined);

        // V(1,1) = (1,1) on the neutral line
        let v = LinearRelation::from_pairs(
            j.clone(),
            j,
            &from_real_rows(&[&[1.0], &[1.0]]),
            &from_real_rows(&[&[1.0], &[1.0]]),
        )
        .unwrap();
        let cls = v.classify();
        assert!(cls.isometric && !cls.unitary && cls.contractive && cls.expansive);

        let half = op(&[&[0.5]]).classify();
        assert!(half.contractive && !half.isometric && !half.expansive);
    }

    #[test]
    fn spectra() {
        let v1 = op(&[&[0.0, 0.0], &[1.0, 0.0]]).pencil_spectrum().unwrap();
        assert_eq!(v1.eigenvalues.len(), 2);
        assert!(v1.eigenvalues.iter().all(|z| z.norm() < 1e-7));
        let vt = op(&[&[0.0, 4.0], &[1.0, 0.0]]).pencil_spectrum().unwrap();
        assert!((vt.eigenvalues[0] - cr(-2.0)).norm() < 1e-12);
        assert!((vt.eigenvalues[1] - cr(2.0)).norm() < 1e-12);
        let id = LinearRelation::identity(h(1)).pencil_spectrum().unwrap();
        assert_eq!(id.eigenvalues.len(), 1);
        assert!((id.eigenvalues[0] - cr(1.0)).norm() < 1e-14);
        // a non-square operator with no eigenvalues
        let s = shift2().pencil_spectrum().unwrap();
        assert!(s.eigenvalues.is_empty() && !s.at_infinity);
    }

    #[test]
    fn spectrum_with_multivalued_part() {
        // {((a,0),(c,a))}: no eigenvalues, mul = span{e₁}
        let v2 = LinearRelation::new(
            h(2),
            h(2),
            &from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]),
        )
        .unwrap();
        let s = v2.pencil_spectrum().unwrap();
        assert!(s.eigenvalues.is_empty());
        assert!(s.at_infinity);
        assert_eq!(v2.mul().dim(), 1);
    }

    #[test]
    fn degenerate_pencil_reported() {
        // ker ∩ mul ≠ 0: every λ is an eigenvalue
        let t = LinearRelation::new(
            h(1),
            h(1),
            &from_real_rows(&[&[1.0, 0.0], &[0.0, 1.0]]),
        )
        .unwrap();
        assert!(matches!(t.pencil_spectrum(), Err(Error::DegeneratePencil)));
    }

    #[test]
    fn resolvents() {
        let vt = op(&[&[0.0, 4.0], &[1.0, 0.0]]);
        let r = vt.resolvent(cr(3.0)).unwrap();
        let expected = from_real_rows(&[&[-3.0, -4.0], &[-1.0, -3.0]]) / cr(5.0);
        assert!(scaled_residual(&r, &expected) < 1e-14);
        let v1 = op(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let r = v1.resolvent(cr(3.0)).unwrap();
        let expected = from_real_rows(&[&[-3.0, 0.0], &[-1.0, -3.0]]) / cr(9.0);
        assert!(scaled_residual(&r, &expected) < 1e-14);
        let id = LinearRelation::identity(h(2)).resolvent(cr(0.0)).unwrap();
        assert!(scaled_residual(&id, &identity(2)) < 1e-15);
        assert!(matches!(vt.resolvent(cr(2.0)), Err(Error::NotInvertible { .. })));
        assert!(matches!(shift2().resolvent(cr(3.0)), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn resolvent_exists_despite_multivalued_part() {
        let v2 = LinearRelation::new(
            h(2),
            h(2),
            &from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0], &[0.0, 1.0], &[1.0, 0.0]]),
        )
        .unwrap();
        // (V₂ − λ)⁻¹ maps (c − λa, a) ↦ (a, 0)
        let r = v2.resolvent(cr(0.5)).unwrap();
        let expected = from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(scaled_residual(&r, &expected) < 1e-14);
    }

    #[test]
    fn composition_and_restriction() {
        let a = op(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = op(&[&[2.0, 0.0], &[0.0, 3.0]]);
        let ab = a.then(&b).unwrap().as_matrix().unwrap();
        let expected = from_real_rows(&[&[0.0, 2.0], &[3.0, 0.0]]);
        assert!(scaled_residual(&ab, &expected) < 1e-14);
        let d = Subspace::span(&from_real_rows(&[&[1.0], &[0.0]]));
        let r = a.restrict(&d).unwrap();
        assert_eq!(r.dim(), 1);
        assert!(r.ran().contains_vector(&nalgebra::dvector![cr(0.0), cr(1.0)]));
    }
}
