//! Krein-type formulas for the resolvents of the extensions `V_τ`.
//!
//! Outside the disk (`λ ∈ 𝒟₁`):
//! `R_λ(V_τ) = R_λ(V₁) − λ⁻¹γ₁(λ)(τ⁻¹ − M₁(λ))⁻¹γ₂^#(λ)`.
//! Inside (`λ ∈ 𝒟₂`):
//! `R_λ(V_τ) = R_λ(V₂) + λ⁻¹γ₂(λ)(τ − M₂(λ))⁻¹γ₁^#(λ)`.

use crate::boundary::BoundaryTriplet;
use crate::error::{Error, Result};
use crate::linalg::{identity, inverse, relative_error, sigma_min, CMat, C64};
use crate::relation::LinearRelation;
use crate::space::{PontryaginSpace, Subspace};
use crate::tolerance::zero_tol;
use crate::weyl::{gamma, gamma_sharp, weyl};

/// A boundary parameter, either as a relation or as `τ = {(K₂h, K₁h)}`.
#[derive(Debug, Clone)]
pub enum TauParam {
    Relation(LinearRelation),
    Pair { k1: CMat, k2: CMat },
}

impl TauParam {
    pub fn to_relation(&self, n2: &PontryaginSpace, n1: &PontryaginSpace) -> Result<LinearRelation> {
        match self {
            TauParam::Relation(r) => Ok(r.clone()),
            TauParam::Pair { k1, k2 } => LinearRelation::from_pairs(n2.clone(), n1.clone(), k2, k1),
        }
    }

    /// `K₁ = ` second and `K₂ = ` first components of the canonical graph basis.
    pub fn pair_of(tau: &LinearRelation) -> TauParam {
        TauParam::Pair {
            k1: tau.bottom(),
            k2: tau.top(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointClass {
    Eigenvalue,
    Regular,
    /// The boundary pencil is too close to singular to call.
    Undecided,
    /// Not an eigenvalue, but `V_τ − λ` is not onto (the parameter has the wrong dimension).
    Deficient,
}

fn check_point(t: &BoundaryTriplet, lambda: C64) -> Result<usize> {
    if lambda.norm() < crate::weyl::ORIGIN_EXCLUSION {
        return Err(Error::RegionViolation {
            lambda,
            region: "nonzero",
        });
    }
    if t.exceptional.in_d1(lambda) {
        Ok(1)
    } else if t.exceptional.in_d2(lambda) {
        Ok(2)
    } else {
        Err(Error::RegionViolation {
            lambda,
            region: "D1 or D2",
        })
    }
}

/// The boundary pencil `τ⁻¹ − M₁(λ)` (on `𝒟₁`) or `τ − M₂(λ)` (on `𝒟₂`).
pub fn boundary_pencil(t: &BoundaryTriplet, tau: &LinearRelation, lambda: C64) -> Result<LinearRelation> {
    match check_point(t, lambda)? {
        1 => {
            let m1 = weyl(t, 1, lambda)?;
            let minus_m = LinearRelation::graph_of(&(-m1), t.n1.clone(), t.n2.clone())?;
            tau.inverse().sum(&minus_m)
        }
        _ => {
            let m2 = weyl(t, 2, lambda)?;
            let minus_m = LinearRelation::graph_of(&(-m2), t.n2.clone(), t.n1.clone())?;
            tau.sum(&minus_m)
        }
    }
}

/// Classifies `λ` for `V_τ` through the boundary pencil alone.
pub fn point_class(t: &BoundaryTriplet, tau: &LinearRelation, lambda: C64) -> Result<PointClass> {
    let pencil = boundary_pencil(t, tau, lambda)?;
    let bottom = pencil.bottom();
    let target = pencil.to_space().dim();
    if bottom.ncols() > target {
        return Ok(PointClass::Eigenvalue);
    }
    let s = sigma_min(&bottom);
    let tol = zero_tol();
    Ok(if s <= tol {
        PointClass::Eigenvalue
    } else if s < 100.0 * tol {
        PointClass::Undecided
    } else if bottom.ncols() == target {
        PointClass::Regular
    } else {
        PointClass::Deficient
    })
}

fn pencil_inverse(pencil: &LinearRelation, lambda: C64) -> Result<CMat> {
    let inv = pencil.inverse();
    if inv.dim() != inv.from_space().dim() || !inv.is_operator() {
        return Err(Error::PencilSingular { lambda });
    }
    inv.as_matrix().map_err(|_| Error::PencilSingular { lambda })
}

/// Resolvent of `V_τ` through the boundary data, with the pencil inverted by relation calculus.
pub fn krein_resolvent(t: &BoundaryTriplet, tau: &LinearRelation, lambda: C64) -> Result<CMat> {
    let region = check_point(t, lambda)?;
    let pencil = boundary_pencil(t, tau, lambda)?;
    let middle = pencil_inverse(&pencil, lambda)?;
    assemble(t, region, lambda, &middle)
}

/// `R_λ(Vⱼ) ∓ λ⁻¹ γⱼ(λ) X γ_k^#(λ)` with the sign and fields of the region.
fn assemble(t: &BoundaryTriplet, region: usize, lambda: C64, middle: &CMat) -> Result<CMat> {
    let inv_l = C64::new(1.0, 0.0) / lambda;
    if region == 1 {
        let r = t.v1.resolvent(lambda)?;
        Ok(r - gamma(t, 1, lambda)? * middle * gamma_sharp(t, 2, lambda)? * inv_l)
    } else {
        let r = t.v2.resolvent(lambda)?;
        Ok(r + gamma(t, 2, lambda)? * middle * gamma_sharp(t, 1, lambda)? * inv_l)
    }
}

/// Pair form: `K₁(K₂ − M₁K₁)⁻¹` on `𝒟₁`, `K₂(K₁ − M₂K₂)⁻¹` on `𝒟₂`.
pub fn krein_resolvent_pair(t: &BoundaryTriplet, k1: &CMat, k2: &CMat, lambda: C64) -> Result<CMat> {
    let region = check_point(t, lambda)?;
    let middle = if region == 1 {
        let inner = k2 - weyl(t, 1, lambda)? * k1;
        k1 * inverse(&inner).ok_or(Error::PencilSingular { lambda })?
    } else {
        let inner = k1 - weyl(t, 2, lambda)? * k2;
        k2 * inverse(&inner).ok_or(Error::PencilSingular { lambda })?
    };
    assemble(t, region, lambda, &middle)
}

/// Unitary-parameter form on `𝒟₁`: `τ = graph U`, middle factor `U(I − M₁U)⁻¹`.
pub fn krein_resolvent_unitary(t: &BoundaryTriplet, u: &CMat, lambda: C64) -> Result<CMat> {
    let region = check_point(t, lambda)?;
    if region != 1 {
        return Err(Error::RegionViolation {
            lambda,
            region: "D1",
        });
    }
    let inner = identity(t.n1.dim()) - weyl(t, 1, lambda)? * u;
    let middle = u * inverse(&inner).ok_or(Error::PencilSingular { lambda })?;
    assemble(t, 1, lambda, &middle)
}

/// Direct resolvent of `V_τ` by relation inversion.
pub fn direct_resolvent(t: &BoundaryTriplet, tau: &LinearRelation, lambda: C64) -> Result<CMat> {
    t.extension(tau)?.resolvent(lambda)
}

/// Computes `R_λ(V_{τ^{-[*]}})` for `λ ∈ 𝒟₂` twice: directly through the
/// inside formula with parameter `τ^{-[*]}`, and from the outside formula for
/// `τ` at `1/λ̄` via `R_λ(V_{τ^{-[*]}}) = −λ⁻²(R_{1/λ̄}(V_τ)^{[*]} + λ)`.
pub fn sharp_consistency(t: &BoundaryTriplet, tau: &LinearRelation, lambda: C64) -> Result<f64> {
    if check_point(t, lambda)? != 2 {
        return Err(Error::RegionViolation {
            lambda,
            region: "D2",
        });
    }
    let dual = tau.inverse_adjoint();
    let inside = krein_resolvent(t, &dual, lambda)?;
    let reflected = C64::new(1.0, 0.0) / lambda.conj();
    let outside = krein_resolvent(t, tau, reflected)?;
    let h = t.space();
    let adj = PontryaginSpace::indef_adjoint(&outside, h, h)?;
    let via_sharp = (adj + identity(t.dim()) * lambda) * (-C64::new(1.0, 0.0) / (lambda * lambda));
    Ok(relative_error(&via_sharp, &inside))
}

/// Distance between `{Γ(f, λf) : f ∈ ker(V_τ − λ)}` and the kernel of the boundary pencil,
/// with `Γ = Γ₁` on `𝒟₁` and `Γ₂` on `𝒟₂`.
pub fn kernel_correspondence(t: &BoundaryTriplet, tau: &LinearRelation, lambda: C64) -> Result<f64> {
    let region = check_point(t, lambda)?;
    let pencil = boundary_pencil(t, tau, lambda)?;
    let eigen = t.extension(tau)?.shift(lambda)?.ker();
    let f = eigen.basis();
    let lifted = crate::linalg::vstack(f, &(f * lambda));
    let g = if region == 1 { &t.g1 } else { &t.g2 };
    let image = Subspace::span(&(g * lifted));
    let ker = pencil.ker();
    if image.dim() != ker.dim() {
        return Ok(f64::INFINITY);
    }
    Ok(image.distance(&ker))
}

/// Points on or next to the unit circle are left out on both sides of the comparison:
/// the pencil degenerates there.
const CIRCLE_GAP: f64 = 1e-6;

fn sampled_region(t: &BoundaryTriplet, z: C64) -> bool {
    (z.norm() - 1.0).abs() > CIRCLE_GAP && check_point(t, z).is_ok()
}

/// Starting points for the root search: 10 radii × 8 angles, off the real axis.
fn root_seeds() -> Vec<C64> {
    let mut out = Vec::new();
    for r in [0.08, 0.25, 0.5, 0.75, 0.92, 1.08, 1.4, 2.5, 5.0, 12.0] {
        for k in 0..8 {
            let theta = std::f64::consts::PI * (2.0 * k as f64 + 0.3) / 8.0;
            out.push(C64::from_polar(r, theta));
        }
    }
    out
}

/// Eigenvalues of `V_τ` in `𝒟₁ ∪ 𝒟₂`, found only from the boundary pencil.
///
/// With `τ = {(K₂h, K₁h)}` the pencil is `K₂ − M₁(λ)K₁` on `𝒟₁` and
/// `K₁ − M₂(λ)K₂` on `𝒟₂`. Newton's method on its determinant (after a fixed
/// projection when the pencil is tall) is started from a grid of seeds; each
/// limit is kept only if the pencil really loses rank there.
pub fn boundary_eigenvalues(t: &BoundaryTriplet, tau: &LinearRelation) -> Result<Vec<C64>> {
    let (k1, k2) = (tau.bottom(), tau.top());
    let k = tau.dim();
    if k > t.n1.dim().min(t.n2.dim()) {
        return Err(Error::DegeneratePencil);
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let pencil = |lambda: C64| -> Option<CMat> {
        match check_point(t, lambda).ok()? {
            1 => Some(&k2 - weyl(t, 1, lambda).ok()? * &k1),
            _ => Some(&k1 - weyl(t, 2, lambda).ok()? * &k2),
        }
    };
    // a fixed isometric projection turns a tall pencil square; extra roots are filtered below
    let squash = |a: CMat| -> CMat {
        let d = a.nrows();
        if d == k {
            return a;
        }
        let q = CMat::from_fn(d, k, |i, j| {
            C64::from_polar(1.0, 0.7 * (i * k + j + 1) as f64 + 0.31 * (i as f64) * (j as f64))
        });
        q.adjoint() * a
    };
    // the Weyl functions have poles at exceptional points; clearing them widens Newton's basins
    let ex = &t.exceptional;
    let poles: Vec<C64> = ex.lambda1.iter().chain(&ex.lambda2).copied().collect();
    let det = |lambda: C64| {
        let inside = lambda.norm() < 1.0;
        pencil(lambda).map(|a| {
            poles
                .iter()
                .filter(|p| (p.norm() < 1.0) == inside)
                .fold(squash(a).determinant(), |f, p| f * (lambda - p))
        })
    };
    let mut roots: Vec<C64> = Vec::new();
    // seeds can miss roots; later passes divide out the known ones and start again
    for _ in 0..4 {
        let found = roots.len();
        for seed in root_seeds() {
            let known = roots.clone();
            let deflated = |z: C64| det(z).map(|f| known.iter().fold(f, |f, r| f / (z - r)));
            let Some(z) = newton(deflated, seed) else { continue };
            if !sampled_region(t, z) {
                continue;
            }
            let Some(a) = pencil(z) else { continue };
            let scale = crate::linalg::sigma_max(&a).max(1.0);
            if sigma_min(&a) > 1e-7 * scale {
                continue;
            }
            if roots.iter().all(|r| (r - z).norm() > 1e-6 * z.norm().max(1.0)) {
                roots.push(z);
            }
        }
        if roots.len() == found {
            break;
        }
    }
    crate::linalg::sort_complex(&mut roots);
    Ok(roots)
}

/// Newton's method with a central-difference derivative and steps capped at half of `|z|`.
/// Gives up when the iterate leaves `[1e-4, 1e4]` in modulus or fails to settle.
fn newton(f: impl Fn(C64) -> Option<C64>, mut z: C64) -> Option<C64> {
    // multiple roots converge only linearly; a small last step is still worth the rank test
    let mut last = f64::INFINITY;
    for _ in 0..40 {
        if !(1e-4..1e4).contains(&z.norm()) {
            return None;
        }
        let h = 1e-6 * z.norm().max(1.0);
        let (v, vp, vm) = (f(z)?, f(z + h)?, f(z - h)?);
        let dv = (vp - vm) / (2.0 * h);
        if dv.norm() == 0.0 || !v.is_finite() {
            return None;
        }
        let step = v / dv;
        let step = if step.norm() > 0.5 * z.norm() {
            step * (0.5 * z.norm() / step.norm())
        } else {
            step
        };
        z -= step;
        last = step.norm() / z.norm().max(1.0);
        if last <= 1e-13 {
            return z.is_finite().then_some(z);
        }
    }
    (last <= 1e-8 && z.is_finite()).then_some(z)
}

/// Eigenvalues of `V_τ` from its own pencil, restricted to `𝒟₁ ∪ 𝒟₂` and without repeats.
pub fn direct_eigenvalues(t: &BoundaryTriplet, tau: &LinearRelation) -> Result<Vec<C64>> {
    let spec = t.extension(tau)?.pencil_spectrum()?;
    let mut out: Vec<C64> = Vec::new();
    for z in spec.eigenvalues {
        if !sampled_region(t, z) {
            continue;
        }
        if out.iter().all(|r| (r - z).norm() > 1e-6 * z.norm().max(1.0)) {
            out.push(z);
        }
    }
    crate::linalg::sort_complex(&mut out);
    Ok(out)
}

/// Matching distance between [`boundary_eigenvalues`] and [`direct_eigenvalues`];
/// infinite when the counts differ. When one side fills a whole region the other must too.
pub fn eigenvalue_agreement(t: &BoundaryTriplet, tau: &LinearRelation) -> Result<f64> {
    match (boundary_eigenvalues(t, tau), direct_eigenvalues(t, tau)) {
        (Ok(a), Ok(b)) => Ok(crate::linalg::match_point_sets(&a, &b).unwrap_or(f64::INFINITY)),
        (Err(Error::DegeneratePencil), Err(Error::DegeneratePencil)) => Ok(0.0),
        (Err(Error::DegeneratePencil), Ok(_)) | (Ok(_), Err(Error::DegeneratePencil)) => Ok(f64::INFINITY),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}
