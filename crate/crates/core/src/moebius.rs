//! The linear-fractional change of variable
//! `V₀ = (1 − |z₀|²)(V − z₀)⁻¹ − z̄₀`, `ζ = (1 − z̄₀λ)/(λ − z₀)`,
//! together with the transported boundary triplet.

use crate::boundary::{BoundaryTriplet, IsometryInstance};
use crate::error::{Error, Result};
use crate::linalg::{identity, inverse, scaled_residual, zeros, CMat, C64};
use crate::relation::LinearRelation;
use crate::weyl::{gamma, weyl};

pub const DEFAULT_Z0: f64 = 2.0;
/// Smallest accepted `|z₀| − 1`.
pub const MIN_EXTERIOR_GAP: f64 = 0.1;

fn check_z0(z0: C64) -> Result<()> {
    if z0.norm() - 1.0 < MIN_EXTERIOR_GAP {
        return Err(Error::SingularShift {
            z0,
            reason: "|z0| must exceed 1 by at least 0.1",
        });
    }
    Ok(())
}

/// `ζ = (1 − z̄₀λ)/(λ − z₀)`.
pub fn param_map(lambda: C64, z0: C64) -> Result<C64> {
    let den = lambda - z0;
    if den.norm() < f64::EPSILON * (1.0 + z0.norm()) {
        return Err(Error::RegionViolation {
            lambda,
            region: "lambda != z0",
        });
    }
    Ok((C64::new(1.0, 0.0) - z0.conj() * lambda) / den)
}

/// `λ = (1 + ζz₀)/(z̄₀ + ζ)`.
pub fn param_map_inverse(zeta: C64, z0: C64) -> Result<C64> {
    let den = z0.conj() + zeta;
    if den.norm() < f64::EPSILON * (1.0 + z0.norm()) {
        return Err(Error::RegionViolation {
            lambda: zeta,
            region: "zeta != -conj(z0)",
        });
    }
    Ok((C64::new(1.0, 0.0) + zeta * z0) / den)
}

/// `(1 − |z₀|²)(T − z₀)⁻¹ − z̄₀` for a relation in one space.
pub fn transform_relation(t: &LinearRelation, z0: C64) -> Result<LinearRelation> {
    let scale = C64::new(1.0 - z0.norm_sqr(), 0.0);
    t.shift(z0)?.inverse().scale(scale).shift(z0.conj())
}

/// `V₀` as an isometry. Fails when `z₀` is an eigenvalue of `V`.
pub fn transform_operator(inst: &IsometryInstance, z0: C64) -> Result<IsometryInstance> {
    check_z0(z0)?;
    if !inst.v.shift(z0)?.ker().is_zero() {
        return Err(Error::SingularShift {
            z0,
            reason: "z0 is an eigenvalue of V",
        });
    }
    let v0 = transform_relation(&inst.v, z0)?;
    IsometryInstance::new(v0, format!("{} transformed at z0={}", inst.label, z0))
}

/// `L⁻¹` for `L(h; h') = (h' − z₀h; h − z̄₀h')`, the map carrying `V^{-[*]}` onto `V₀^{-[*]}`.
fn pairing_inverse(n: usize, z0: C64) -> CMat {
    let s = C64::new(1.0 / (1.0 - z0.norm_sqr()), 0.0);
    let mut m = zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = z0.conj() * s;
        m[(i, n + i)] = s;
        m[(n + i, i)] = s;
        m[(n + i, n + i)] = z0 * s;
    }
    m
}

#[derive(Debug, Clone)]
pub struct MoebiusContext {
    pub z0: C64,
    pub source: BoundaryTriplet,
    pub v0: IsometryInstance,
    pub triplet: BoundaryTriplet,
}

impl MoebiusContext {
    pub fn new(source: &BoundaryTriplet, z0: C64) -> Result<Self> {
        let v0 = transform_operator(&source.inst, z0)?;
        let triplet = transform_triplet(source, &v0, z0)?;
        Ok(Self {
            z0,
            source: source.clone(),
            v0,
            triplet,
        })
    }
}

/// `Γⱼ⁰f̂ = √(|z₀|² − 1) Γⱼĥ` with `f̂ = Lĥ`.
pub fn transform_triplet(source: &BoundaryTriplet, v0: &IsometryInstance, z0: C64) -> Result<BoundaryTriplet> {
    check_z0(z0)?;
    let back = pairing_inverse(source.dim(), z0) * C64::new((z0.norm_sqr() - 1.0).sqrt(), 0.0);
    BoundaryTriplet::from_parts(
        v0.clone(),
        source.n1.clone(),
        source.n2.clone(),
        &source.g1 * &back,
        &source.g2 * &back,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LawResiduals {
    pub lambda: C64,
    pub zeta: C64,
    /// `‖Mⱼ⁰(ζ) − Mⱼ(λ)‖` relative, `j` given by the region of `λ`.
    pub m_law: f64,
    /// `‖γⱼ⁰(ζ) − (λ − z₀)/√(|z₀|² − 1) γⱼ(λ)‖` relative.
    pub gamma_law: f64,
}

/// Residuals of the `M`- and `γ`-laws at `λ`.
pub fn transform_laws(ctx: &MoebiusContext, lambda: C64) -> Result<LawResiduals> {
    let zeta = param_map(lambda, ctx.z0)?;
    let j = if ctx.source.exceptional.in_d1(lambda) && ctx.triplet.exceptional.in_d1(zeta) {
        1
    } else if ctx.source.exceptional.in_d2(lambda) && ctx.triplet.exceptional.in_d2(zeta) {
        2
    } else {
        return Err(Error::RegionViolation {
            lambda,
            region: "same region for both triplets",
        });
    };
    let m_law = scaled_residual(&weyl(&ctx.triplet, j, zeta)?, &weyl(&ctx.source, j, lambda)?);
    let factor = (lambda - ctx.z0) / (ctx.z0.norm_sqr() - 1.0).sqrt();
    let gamma_law = scaled_residual(&gamma(&ctx.triplet, j, zeta)?, &(gamma(&ctx.source, j, lambda)? * factor));
    Ok(LawResiduals {
        lambda,
        zeta,
        m_law,
        gamma_law,
    })
}

/// `Ṽ₀` for an operator `Ṽ` with `z₀ ∈ ρ(Ṽ)`.
pub fn transform_matrix(vt: &CMat, z0: C64) -> Result<CMat> {
    let n = vt.nrows();
    let inv = inverse(&(vt - identity(n) * z0)).ok_or(Error::SingularShift {
        z0,
        reason: "z0 is an eigenvalue of the extension",
    })?;
    Ok(inv * C64::new(1.0 - z0.norm_sqr(), 0.0) - identity(n) * z0.conj())
}

/// Residual of `(Ṽ₀ − ζ)⁻¹ = (λ − z₀)/(|z₀|² − 1) (I + (λ − z₀)(Ṽ − λ)⁻¹)`.
pub fn resolvent_law_residual(vt: &CMat, z0: C64, lambda: C64) -> Result<f64> {
    let n = vt.nrows();
    let zeta = param_map(lambda, z0)?;
    let v0 = transform_matrix(vt, z0)?;
    let lhs = inverse(&(v0 - identity(n) * zeta)).ok_or(Error::NotInvertible { lambda: zeta })?;
    let r = inverse(&(vt - identity(n) * lambda)).ok_or(Error::NotInvertible { lambda })?;
    let d = lambda - z0;
    let rhs = (identity(n) + r * d) * (d / (z0.norm_sqr() - 1.0));
    Ok(scaled_residual(&lhs, &rhs))
}

/// Does `λ ∈ ρ(Ṽ)` agree with `ζ ∈ ρ(Ṽ₀)`? Both sides are read off the relations.
pub fn regular_points_agree(vt: &LinearRelation, z0: C64, lambda: C64) -> Result<bool> {
    let zeta = param_map(lambda, z0)?;
    let v0 = transform_relation(vt, z0)?;
    let regular = |t: &LinearRelation, z: C64| t.resolvent(z).is_ok();
    Ok(regular(vt, lambda) == regular(&v0, zeta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::construct_triplet;
    use crate::linalg::{cr, from_real_rows};
    use crate::space::PontryaginSpace;

    fn shift2() -> BoundaryTriplet {
        let inst = IsometryInstance::from_map(
            PontryaginSpace::hilbert(2),
            &from_real_rows(&[&[1.0], &[0.0]]),
            &from_real_rows(&[&[0.0], &[1.0]]),
            "shift2",
        )
        .unwrap();
        construct_triplet(&inst, 0).unwrap()
    }

    #[test]
    fn parameter_map_round_trip() {
        let z0 = cr(2.0);
        assert!((param_map(cr(3.0), z0).unwrap() - cr(-5.0)).norm() < 1e-14);
        assert!((param_map_inverse(cr(-5.0), z0).unwrap() - cr(3.0)).norm() < 1e-14);
        for k in 0..12 {
            let l = C64::from_polar(1.0, 0.5 * k as f64 + 0.1);
            assert!((param_map(l, z0).unwrap().norm() - 1.0).abs() < 1e-12);
        }
        assert!(param_map(z0, z0).is_err());
    }

    #[test]
    fn scalar_identity_maps_to_identity() {
        let v = LinearRelation::identity(PontryaginSpace::hilbert(1));
        let v0 = transform_relation(&v, cr(2.0)).unwrap().as_matrix().unwrap();
        assert!((v0[(0, 0)] - cr(1.0)).norm() < 1e-12);
    }

    #[test]
    fn shift2_transform() {
        let t = shift2();
        let ctx = MoebiusContext::new(&t, cr(2.0)).unwrap();
        assert_eq!(ctx.v0.v.dom().dim(), 1);
        assert!(ctx.triplet.verify().pass);
        assert_eq!(ctx.triplet.n1.dim(), t.n1.dim());
        let m = weyl(&ctx.triplet, 1, cr(-5.0)).unwrap();
        assert!((m[(0, 0)] - cr(1.0 / 9.0)).norm() < 1e-12);
        let laws = transform_laws(&ctx, cr(3.0)).unwrap();
        assert!(laws.m_law < 1e-10 && laws.gamma_law < 1e-10, "{laws:?}");
        let laws = transform_laws(&ctx, C64::new(0.2, 0.3)).unwrap();
        assert!(laws.m_law < 1e-10 && laws.gamma_law < 1e-10, "{laws:?}");
    }

    #[test]
    fn graph_of_v_has_zero_boundary_values() {
        let t = shift2();
        let ctx = MoebiusContext::new(&t, cr(2.0)).unwrap();
        let g = ctx.v0.v.graph().basis();
        assert!(crate::linalg::max_abs(&(&ctx.triplet.g1 * g)) < 1e-12);
        assert!(crate::linalg::max_abs(&(&ctx.triplet.g2 * g)) < 1e-12);
    }

    #[test]
    fn resolvent_law_on_unitary_extension() {
        let t = shift2();
        let u = LinearRelation::graph_of(&from_real_rows(&[&[1.0]]), t.n2.clone(), t.n1.clone()).unwrap();
        let vt = t.extension(&u).unwrap();
        let m = vt.as_matrix().unwrap();
        assert!(resolvent_law_residual(&m, cr(2.0), cr(3.0)).unwrap() < 1e-10);
        assert!(regular_points_agree(&vt, cr(2.0), cr(3.0)).unwrap());
        // 1 is an eigenvalue of the cyclic shift
        assert!(regular_points_agree(&vt, cr(2.0), cr(1.0)).unwrap());
        assert!(vt.resolvent(cr(1.0)).is_err());
    }

    #[test]
    fn rejects_bad_shift_points() {
        let t = shift2();
        assert!(MoebiusContext::new(&t, cr(1.05)).is_err());
        let inst = IsometryInstance::new(LinearRelation::identity(PontryaginSpace::hilbert(1)), "id").unwrap();
        let scaled = LinearRelation::graph_of(&from_real_rows(&[&[2.0]]), PontryaginSpace::hilbert(1), PontryaginSpace::hilbert(1)).unwrap();
        assert!(IsometryInstance::new(scaled, "x").is_err());
        assert!(transform_operator(&inst, cr(2.0)).is_ok());
    }
}
