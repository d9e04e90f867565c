//! Boundary triplets for isometric operators.
//!
//! For an isometry `V` the ambient relation `V^{-[*]}` carries the boundary form
//! `B(f̂, ĝ) = [f', g'] − [f, g]`, which vanishes on the graph of `V`. A boundary
//! triplet factors `B` through two auxiliary spaces:
//! `B(f̂, ĝ) = [Γ₁f̂, Γ₁ĝ]₁ − [Γ₂f̂, Γ₂ĝ]₂`.
//!
//! `Γ₁`, `Γ₂` are stored as matrices acting on stacked vectors `(f; f') ∈ C^{2n}`;
//! only their restriction to `V^{-[*]}` matters.

use crate::error::{Error, Result};
use crate::linalg::{
    block_diag, diag_real, hermitian_eigen, max_abs, null_space, rank, vstack, zeros, CMat, C64,
};
use crate::relation::{LinearRelation, RelationClass};
use crate::space::{PontryaginSpace, Subspace};
use crate::tolerance::{rank_threshold, zero_tol};

/// An isometric operator `V` in a Pontryagin space.
#[derive(Debug, Clone)]
pub struct IsometryInstance {
    pub space: PontryaginSpace,
    pub v: LinearRelation,
    pub label: String,
}

impl IsometryInstance {
    pub fn new(v: LinearRelation, label: impl Into<String>) -> Result<Self> {
        if v.from_space().dim() != v.to_space().dim()
            || !v.from_space().approx_eq(v.to_space(), zero_tol())
        {
            return Err(Error::IncompatibleShapes(
                "an isometry acts in a single space".into(),
            ));
        }
        let mul_dim = v.mul().dim();
        if mul_dim > 0 {
            return Err(Error::NotAnOperator { mul_dim });
        }
        let norm = max_abs(&v.gram_difference());
        if norm > rank_threshold(max_abs(v.from_space().gram())) {
            return Err(Error::NonIsometric { norm });
        }
        Ok(Self {
            space: v.from_space().clone(),
            v,
            label: label.into(),
        })
    }

    /// `V` given by the images `images` of the domain vectors `domain` (both `n × k`).
    pub fn from_map(
        space: PontryaginSpace,
        domain: &CMat,
        images: &CMat,
        label: impl Into<String>,
    ) -> Result<Self> {
        let v = LinearRelation::from_pairs(space.clone(), space, domain, images)?;
        Self::new(v, label)
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `V^{-[*]}`.
    pub fn vstar(&self) -> LinearRelation {
        self.v.inverse_adjoint()
    }

    /// Gram of the boundary form on the canonical basis of `V^{-[*]}`.
    pub fn boundary_form(&self) -> (CMat, CMat) {
        let w = self.vstar().graph().basis().clone();
        let b = w.adjoint() * self.boundary_gram() * &w;
        (w, b)
    }

    /// `diag(−J, J)`, the boundary form on all of `C^{2n}`.
    pub fn boundary_gram(&self) -> CMat {
        let j = self.space.gram();
        block_diag(&(-j.clone()), j)
    }
}

/// The finite exceptional sets `Λ₁ = σ(V₁) ∩ {|λ| > 1}` and `Λ₂ = σ(V₂) ∩ {|λ| < 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceptionalSets {
    pub lambda1: Vec<C64>,
    pub lambda2: Vec<C64>,
    /// False when a pencil of `V₁` or `V₂` is degenerate (every point is an eigenvalue).
    pub finite: bool,
}

/// Distance below which a point counts as sitting on the unit circle or an exceptional point.
pub const REGION_MARGIN: f64 = 1e-8;

impl ExceptionalSets {
    /// `λ ∈ 𝒟₁`: outside the closed disk and away from `Λ₁`.
    pub fn in_d1(&self, lambda: C64) -> bool {
        self.finite
            && lambda.norm() > 1.0 + REGION_MARGIN
            && self.lambda1.iter().all(|z| (z - lambda).norm() > REGION_MARGIN)
    }

    /// `λ ∈ 𝒟₂`: inside the open disk and away from `Λ₂`.
    pub fn in_d2(&self, lambda: C64) -> bool {
        self.finite
            && lambda.norm() < 1.0 - REGION_MARGIN
            && self.lambda2.iter().all(|z| (z - lambda).norm() > REGION_MARGIN)
    }
}

#[derive(Debug, Clone)]
pub struct BoundaryTriplet {
    pub inst: IsometryInstance,
    pub vstar: LinearRelation,
    pub n1: PontryaginSpace,
    pub n2: PontryaginSpace,
    /// `Γ₁` as an `dim 𝔑₁ × 2n` matrix.
    pub g1: CMat,
    /// `Γ₂` as an `dim 𝔑₂ × 2n` matrix.
    pub g2: CMat,
    pub kappa1: usize,
    pub v1: LinearRelation,
    pub v2: LinearRelation,
    pub exceptional: ExceptionalSets,
}

impl BoundaryTriplet {
    /// Assembles a triplet from given boundary maps without checking Green's identity.
    pub fn from_parts(
        inst: IsometryInstance,
        n1: PontryaginSpace,
        n2: PontryaginSpace,
        g1: CMat,
        g2: CMat,
    ) -> Result<Self> {
        let two_n = 2 * inst.dim();
        for (g, space) in [(&g1, &n1), (&g2, &n2)] {
            if g.ncols() != two_n {
                return Err(Error::DimensionMismatch {
                    expected: two_n,
                    got: g.ncols(),
                });
            }
            if g.nrows() != space.dim() {
                return Err(Error::DimensionMismatch {
                    expected: space.dim(),
                    got: g.nrows(),
                });
            }
        }
        if n1.neg_index() != n2.neg_index() {
            return Err(Error::IncompatibleShapes(format!(
                "boundary spaces have negative indices {} and {}",
                n1.neg_index(),
                n2.neg_index()
            )));
        }
        let vstar = inst.vstar();
        let v1 = kernel_in(&vstar, &g1);
        let v2 = kernel_in(&vstar, &g2);
        let exceptional = exceptional_sets_of(&v1, &v2);
        Ok(Self {
            kappa1: n1.neg_index(),
            inst,
            vstar,
            n1,
            n2,
            g1,
            g2,
            v1,
            v2,
            exceptional,
        })
    }

    pub fn space(&self) -> &PontryaginSpace {
        &self.inst.space
    }

    pub fn dim(&self) -> usize {
        self.inst.dim()
    }

    /// `V_τ = {f̂ ∈ V^{-[*]} : (Γ₂f̂, Γ₁f̂) ∈ τ}` for `τ` from `𝔑₂` to `𝔑₁`.
    pub fn extension(&self, tau: &LinearRelation) -> Result<LinearRelation> {
        let (d2, d1) = (self.n2.dim(), self.n1.dim());
        if tau.from_space().dim() != d2 || tau.to_space().dim() != d1 {
            return Err(Error::IncompatibleShapes(format!(
                "parameter must act from a {d2}-dimensional to a {d1}-dimensional space"
            )));
        }
        let w = self.vstar.graph().basis();
        let boundary_values = vstack(&self.g2, &self.g1) * w;
        let outside = tau.graph().complement_in(&Subspace::full(d1 + d2));
        let coeffs = null_space(&(outside.basis().adjoint() * boundary_values));
        let space = self.space().clone();
        LinearRelation::new(space.clone(), space, &(w * coeffs))
    }

    pub fn kernel_extensions(&self) -> (&LinearRelation, &LinearRelation) {
        (&self.v1, &self.v2)
    }

    /// Boundary values `(Γ₂x, Γ₁x)` of the columns of `x`.
    pub fn boundary_values(&self, x: &CMat) -> (CMat, CMat) {
        (&self.g2 * x, &self.g1 * x)
    }

    pub fn verify(&self) -> TripletReport {
        verify_triplet(self)
    }

    /// Green residual on the canonical basis of `V^{-[*]}`.
    pub fn green_residual(&self) -> f64 {
        let w = self.vstar.graph().basis();
        let lhs = w.adjoint() * self.inst.boundary_gram() * w;
        let a = &self.g1 * w;
        let b = &self.g2 * w;
        let rhs = a.adjoint() * self.n1.gram() * &a - b.adjoint() * self.n2.gram() * &b;
        max_abs(&(lhs - rhs))
    }
}

fn kernel_in(vstar: &LinearRelation, g: &CMat) -> LinearRelation {
    let w = vstar.graph().basis();
    let coeffs = null_space(&(g * w));
    LinearRelation::new(
        vstar.from_space().clone(),
        vstar.to_space().clone(),
        &(w * coeffs),
    )
    .expect("subspace of V^{-[*]}")
}

fn exceptional_sets_of(v1: &LinearRelation, v2: &LinearRelation) -> ExceptionalSets {
    match (v1.pencil_spectrum(), v2.pencil_spectrum()) {
        (Ok(s1), Ok(s2)) => ExceptionalSets {
            lambda1: s1
                .eigenvalues
                .into_iter()
                .filter(|z| z.norm() > 1.0 + REGION_MARGIN)
                .collect(),
            lambda2: s2
                .eigenvalues
                .into_iter()
                .filter(|z| z.norm() < 1.0 - REGION_MARGIN)
                .collect(),
            finite: true,
        },
        _ => ExceptionalSets {
            lambda1: Vec::new(),
            lambda2: Vec::new(),
            finite: false,
        },
    }
}

pub fn exceptional_sets(triplet: &BoundaryTriplet) -> &ExceptionalSets {
    &triplet.exceptional
}

/// Builds a triplet whose boundary spaces have `kappa1` negative squares each.
///
/// The boundary form is diagonalized on the Euclidean complement of `graph V`
/// inside `V^{-[*]}`. Positive directions feed `Γ₁`, negative ones `Γ₂`; for
/// `kappa1 > 0` the first `kappa1` directions of each sign swap sides and land
/// on negative axes of `𝔑₁` and `𝔑₂`.
pub fn construct_triplet(inst: &IsometryInstance, kappa1: usize) -> Result<BoundaryTriplet> {
    let vstar = inst.vstar();
    let complement = inst.v.graph().complement_in(vstar.graph());
    let c = complement.basis();
    let b = c.adjoint() * inst.boundary_gram() * c;
    let (values, vectors) = hermitian_eigen(&b);
    let thr = rank_threshold(max_abs(inst.space.gram()));
    if values.iter().any(|x| x.abs() <= thr) {
        return Err(Error::InfeasibleParameters(
            "boundary form is degenerate on the quotient".into(),
        ));
    }
    let mut dirs = c * vectors;
    for k in 0..dirs.ncols() {
        crate::linalg::normalize_phase(&mut dirs, k);
    }
    // positive directions, largest first; negative directions, most negative first
    let mut pos: Vec<usize> = (0..values.len()).filter(|&i| values[i] > 0.0).collect();
    pos.reverse();
    let neg: Vec<usize> = (0..values.len()).filter(|&i| values[i] < 0.0).collect();
    let (p_pos, p_neg) = (pos.len(), neg.len());
    if kappa1 > p_pos.min(p_neg) {
        return Err(Error::InfeasibleKappa1 {
            kappa1,
            positive: p_pos,
            negative: p_neg,
        });
    }
    let two_n = 2 * inst.dim();
    let mut g1 = zeros(p_pos, two_n);
    let mut g2 = zeros(p_neg, two_n);
    let fill = |g: &mut CMat, k: usize, src: usize| {
        let scale = values[src].abs().sqrt();
        for col in 0..two_n {
            g[(k, col)] = dirs[(col, src)].conj() * scale;
        }
    };
    for k in 0..p_pos {
        fill(&mut g1, k, if k < kappa1 { neg[k] } else { pos[k] });
    }
    for k in 0..p_neg {
        fill(&mut g2, k, if k < kappa1 { pos[k] } else { neg[k] });
    }
    let signs = |d: usize| -> Vec<f64> { (0..d).map(|k| if k < kappa1 { -1.0 } else { 1.0 }).collect() };
    let n1 = PontryaginSpace::new(diag_real(&signs(p_pos)))?;
    let n2 = PontryaginSpace::new(diag_real(&signs(p_neg)))?;
    BoundaryTriplet::from_parts(inst.clone(), n1, n2, g1, g2)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripletReport {
    pub green_residual: f64,
    pub surjectivity_rank: usize,
    pub expected_rank: usize,
    /// Projector distance between `ker Γ₁ ∩ ker Γ₂` (inside `V^{-[*]}`) and `graph V`.
    pub kernel_distance: f64,
    pub pass: bool,
}

pub fn verify_triplet(t: &BoundaryTriplet) -> TripletReport {
    let w = t.vstar.graph().basis();
    let green_residual = t.green_residual();
    let stacked = vstack(&t.g1, &t.g2) * w;
    let surjectivity_rank = rank(&stacked);
    let expected_rank = t.n1.dim() + t.n2.dim();
    let coeffs = null_space(&stacked);
    let kernel = Subspace::span(&(w * coeffs));
    let kernel_distance = if kernel.dim() == t.inst.v.dim() {
        kernel.distance(t.inst.v.graph())
    } else {
        f64::INFINITY
    };
    let tol = zero_tol();
    TripletReport {
        green_residual,
        surjectivity_rank,
        expected_rank,
        kernel_distance,
        pass: green_residual <= tol && surjectivity_rank == expected_rank && kernel_distance <= tol,
    }
}

/// One item of the correspondence between properties of `τ` and of `V_τ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceItem {
    pub item: usize,
    pub name: &'static str,
    pub extension_side: bool,
    pub parameter_side: bool,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrespondenceReport {
    pub items: Vec<CorrespondenceItem>,
    /// Distance between `V_{τ^{-[*]}}` and `(V_τ)^{-[*]}`.
    pub duality_distance: f64,
    pub all_agree: bool,
}

/// Compares properties of `V_τ` with those of `τ`, item by item.
pub fn classify_extension_correspondence(
    t: &BoundaryTriplet,
    tau: &LinearRelation,
) -> Result<CorrespondenceReport> {
    let v_tau = t.extension(tau)?;
    let dual = t.extension(&tau.inverse_adjoint())?;
    let duality_distance = dual.distance(&v_tau.inverse_adjoint());
    let ext: RelationClass = v_tau.classify();
    let par: RelationClass = tau.classify();

    let full = LinearRelation::full(t.n2.clone(), t.n1.clone());
    let trivial = LinearRelation::trivial(t.n2.clone(), t.n1.clone());
    let v_full = t.extension(&full)?;
    let v_trivial = t.extension(&trivial)?;
    let nested_ext = v_trivial.graph().dim() <= v_tau.dim()
        && v_tau.contains(&v_trivial)
        && v_full.contains(&v_tau)
        && v_full.same_as(&t.vstar)
        && v_trivial.same_as(&t.inst.v);
    let nested_par = full.contains(tau) && tau.contains(&trivial);

    let tol = zero_tol();
    let raw = [
        (1, "inclusion", nested_ext, nested_par),
        (2, "duality", duality_distance <= tol, true),
        (3, "unitary", ext.unitary, par.unitary),
        (4, "isometric", ext.isometric, par.isometric),
        (5, "coisometric", ext.coisometric, par.coisometric),
        (6, "contractive", ext.contractive, par.contractive),
        (7, "expansive", ext.expansive, par.expansive),
    ];
    let items: Vec<CorrespondenceItem> = raw
        .iter()
        .map(|&(item, name, e, p)| CorrespondenceItem {
            item,
            name,
            extension_side: e,
            parameter_side: p,
            agree: e == p,
        })
        .collect();
    let all_agree = items.iter().all(|i| i.agree);
    Ok(CorrespondenceReport {
        items,
        duality_distance,
        all_agree,
    })
}

/// Defect subspace at `λ`: `𝔑_λ = {f : (f, λf) ∈ V^{-[*]}}` together with its graph `𝔑̂_λ`.
#[derive(Debug, Clone)]
pub struct DefectSpace {
    pub lambda: C64,
    pub n: Subspace,
    pub nhat: Subspace,
}

pub fn defect_of(vstar: &LinearRelation, lambda: C64) -> DefectSpace {
    let n = vstar.from_space().dim();
    let w = vstar.graph().basis();
    let top = crate::linalg::rows(w, 0, n);
    let bottom = crate::linalg::rows(w, n, n);
    let coeffs = null_space(&(bottom - &top * lambda));
    let hat = w * &coeffs;
    DefectSpace {
        lambda,
        n: Subspace::span(&(top * coeffs)),
        nhat: Subspace::span(&hat),
    }
}

/// Checks `V^{-[*]} = V_j ∔ 𝔑̂_λ`: returns `(dim V_j + dim 𝔑̂_λ − dim V^{-[*]}, dim(V_j ∩ 𝔑̂_λ))`.
pub fn decomposition_defect(t: &BoundaryTriplet, j: usize, lambda: C64) -> (isize, usize) {
    let vj = if j == 1 { &t.v1 } else { &t.v2 };
    let nhat = defect_of(&t.vstar, lambda).nhat;
    let excess = vj.dim() as isize + nhat.dim() as isize - t.vstar.dim() as isize;
    let meet = vj.graph().intersection(&nhat).dim();
    (excess, meet)
}
