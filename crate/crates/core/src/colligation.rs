//! Unitary colligations, their characteristic functions and the generalized
//! resolvents they parametrize through the lifted boundary triplet.
//!
//! The exit space is `ℋ̃ = ℋ^[⊥] [∔] ℋ` with the `ℋ^[⊥]` coordinates first.

use rand::Rng;

use crate::boundary::{BoundaryTriplet, IsometryInstance};
use crate::error::{Error, Result};
use crate::generate::{gram_factor, random_signature_unitary, random_unitary, rng, SeededRng};
use crate::linalg::{
    block_diag, cols, hstack, identity, inverse, max_abs, null_space, rank, rows, scaled_residual,
    zeros, CMat, C64,
};
use crate::relation::LinearRelation;
use crate::space::{PontryaginSpace, Subspace};
use crate::tolerance::zero_tol;
use crate::weyl::{disk_grid, gamma, gamma_sharp, neg_squares_sampled, weyl, NegSquaresEstimate};

/// `Δ = (state, input, output; U)` with `U = [[T, F], [G, H]]` from `state ⊕ input` to `state ⊕ output`.
#[derive(Debug, Clone)]
pub struct UnitaryColligation {
    pub state: PontryaginSpace,
    pub input: PontryaginSpace,
    pub output: PontryaginSpace,
    pub u: CMat,
}

impl UnitaryColligation {
    pub fn new(
        state: PontryaginSpace,
        input: PontryaginSpace,
        output: PontryaginSpace,
        u: CMat,
    ) -> Result<Self> {
        let (p, d2, d1) = (state.dim(), input.dim(), output.dim());
        if u.nrows() != p + d1 || u.ncols() != p + d2 {
            return Err(Error::IncompatibleShapes(format!(
                "connecting operator must be {}x{}, got {}x{}",
                p + d1,
                p + d2,
                u.nrows(),
                u.ncols()
            )));
        }
        Ok(Self {
            state,
            input,
            output,
            u,
        })
    }

    /// Assembles `U` from its four blocks.
    pub fn from_blocks(
        state: PontryaginSpace,
        input: PontryaginSpace,
        output: PontryaginSpace,
        t: &CMat,
        f: &CMat,
        g: &CMat,
        h: &CMat,
    ) -> Result<Self> {
        let u = crate::linalg::vstack(&hstack(t, f), &hstack(g, h));
        Self::new(state, input, output, u)
    }

    pub fn state_dim(&self) -> usize {
        self.state.dim()
    }

    pub fn t(&self) -> CMat {
        let p = self.state_dim();
        self.u.view((0, 0), (p, p)).into_owned()
    }

    pub fn f(&self) -> CMat {
        let p = self.state_dim();
        self.u.view((0, p), (p, self.input.dim())).into_owned()
    }

    pub fn g(&self) -> CMat {
        let p = self.state_dim();
        self.u.view((p, 0), (self.output.dim(), p)).into_owned()
    }

    pub fn h(&self) -> CMat {
        let p = self.state_dim();
        self.u
            .view((p, p), (self.output.dim(), self.input.dim()))
            .into_owned()
    }

    pub fn domain_space(&self) -> PontryaginSpace {
        self.state.direct_sum(&self.input)
    }

    pub fn target_space(&self) -> PontryaginSpace {
        self.state.direct_sum(&self.output)
    }

    /// Appends a state block `w` (unitary in a Hilbert space) that does not touch the channels.
    pub fn with_reducing_block(&self, w: &CMat) -> Result<Self> {
        let q = w.nrows();
        let (t, f, g, h) = (self.t(), self.f(), self.g(), self.h());
        let t2 = block_diag(&t, w);
        let f2 = crate::linalg::vstack(&f, &zeros(q, f.ncols()));
        let g2 = hstack(&g, &zeros(g.nrows(), q));
        Self::from_blocks(
            self.state.direct_sum(&PontryaginSpace::hilbert(q)),
            self.input.clone(),
            self.output.clone(),
            &t2,
            &f2,
            &g2,
            &h,
        )
    }
}

#[derive(Debug, Clone)]
pub struct ColligationReport {
    /// `(name, residual)` for the six block identities.
    pub residuals: Vec<(&'static str, f64)>,
    pub threshold: f64,
    pub pass: bool,
}

impl ColligationReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// Residuals of the block form of `U^[*]U = I` and `UU^[*] = I`.
pub fn verify_colligation(d: &UnitaryColligation) -> Result<ColligationReport> {
    let adj = |a: &CMat, from: &PontryaginSpace, to: &PontryaginSpace| {
        PontryaginSpace::indef_adjoint(a, from, to)
    };
    let (st, inp, out) = (&d.state, &d.input, &d.output);
    let (t, f, g, h) = (d.t(), d.f(), d.g(), d.h());
    let ts = adj(&t, st, st)?;
    let fs = adj(&f, inp, st)?;
    let gs = adj(&g, st, out)?;
    let hs = adj(&h, inp, out)?;
    let (p, d1, d2) = (st.dim(), out.dim(), inp.dim());
    let residuals = vec![
        ("state-isometry", max_abs(&(&ts * &t + &gs * &g - identity(p)))),
        ("input-isometry", max_abs(&(&fs * &f + &hs * &h - identity(d2)))),
        ("isometry-cross", max_abs(&(&ts * &f + &gs * &h))),
        ("state-coisometry", max_abs(&(&t * &ts + &f * &fs - identity(p)))),
        ("output-coisometry", max_abs(&(&g * &gs + &h * &hs - identity(d1)))),
        ("coisometry-cross", max_abs(&(&t * &gs + &f * &hs))),
    ];
    let scale = max_abs(&d.u).max(1.0);
    let threshold = 1e-9 * scale * scale;
    let pass = residuals.iter().all(|r| r.1 <= threshold);
    Ok(ColligationReport {
        residuals,
        threshold,
        pass,
    })
}

/// `Θ(λ) = H + λG(I − λT)⁻¹F`.
pub fn char_function(d: &UnitaryColligation, lambda: C64) -> Result<CMat> {
    let p = d.state_dim();
    let inv = inverse(&(identity(p) - d.t() * lambda)).ok_or(Error::SingularAtLambda { lambda })?;
    Ok(d.h() + d.g() * inv * d.f() * lambda)
}

/// Agreement of `Θ(λ)` with the two compressions of `(I − λUP)⁻¹U` and `U(I − λPU)⁻¹`,
/// and of the full block matrix of `U(I − λPU)⁻¹`.
pub fn char_function_residual(d: &UnitaryColligation, lambda: C64) -> Result<f64> {
    if d.input.dim() != d.output.dim() {
        return Err(Error::IncompatibleShapes(
            "compressed forms need input and output of equal dimension".into(),
        ));
    }
    let theta = char_function(d, lambda)?;
    let p = d.state_dim();
    let m = d.u.nrows();
    let mut proj = zeros(m, m);
    for i in 0..p {
        proj[(i, i)] = C64::new(1.0, 0.0);
    }
    let left = inverse(&(identity(m) - &d.u * &proj * lambda)).ok_or(Error::SingularAtLambda { lambda })?
        * &d.u;
    let right = &d.u
        * inverse(&(identity(m) - &proj * &d.u * lambda)).ok_or(Error::SingularAtLambda { lambda })?;
    let corner = |a: &CMat| a.view((p, p), (m - p, m - p)).into_owned();
    let t = d.t();
    let resolvent = inverse(&(identity(p) - &t * lambda)).ok_or(Error::SingularAtLambda { lambda })?;
    let f = d.f();
    let blocks = crate::linalg::vstack(
        &hstack(&(&t * &resolvent), &(&f + &t * &resolvent * &f * lambda)),
        &hstack(&(d.g() * &resolvent), &theta),
    );
    Ok(scaled_residual(&corner(&left), &theta)
        .max(scaled_residual(&corner(&right), &theta))
        .max(scaled_residual(&right, &blocks)))
}

fn preimage(a: &CMat, s: &Subspace) -> Subspace {
    let outside = s.complement_in(&Subspace::full(s.ambient_dim()));
    if outside.is_zero() {
        return Subspace::full(a.ncols());
    }
    Subspace::span(&null_space(&(outside.basis().adjoint() * a)))
}

/// Largest subspace of `ker G ∩ ker F^[*]` invariant under `T` and `T^[*]`.
pub fn hidden_subspace(d: &UnitaryColligation) -> Result<Subspace> {
    let t = d.t();
    let ts = PontryaginSpace::indef_adjoint(&t, &d.state, &d.state)?;
    let fs = PontryaginSpace::indef_adjoint(&d.f(), &d.input, &d.state)?;
    let ker_g = Subspace::span(&null_space(&d.g()));
    let ker_fs = Subspace::span(&null_space(&fs));
    let mut s = ker_g.intersection(&ker_fs);
    loop {
        let next = s.intersection(&preimage(&t, &s)).intersection(&preimage(&ts, &s));
        if next.dim() == s.dim() {
            return Ok(next);
        }
        s = next;
    }
}

/// No subspace of the state space reduces `U`.
pub fn is_simple_colligation(d: &UnitaryColligation) -> Result<bool> {
    Ok(hidden_subspace(d)?.is_zero())
}

/// Negative squares of the `Θ` kernel on the disk grid.
pub fn char_neg_squares(d: &UnitaryColligation, seed: u64) -> Result<NegSquaresEstimate> {
    neg_squares_sampled(|z| char_function(d, z), &disk_grid(), &d.input, &d.output, seed)
}

/// A random colligation with the given spaces; `U` is a Cayley transform.
pub fn random_colligation(
    r: &mut SeededRng,
    state: &PontryaginSpace,
    input: &PontryaginSpace,
    output: &PontryaginSpace,
) -> Result<UnitaryColligation> {
    if input.dim() != output.dim() || input.neg_index() != output.neg_index() {
        return Err(Error::InfeasibleParameters(
            "input and output need equal dimension and negative index".into(),
        ));
    }
    let (s_in, d) = gram_factor(&block_diag(state.gram(), input.gram()));
    let (s_out, _) = gram_factor(&block_diag(state.gram(), output.gram()));
    let w0 = random_signature_unitary(r, &d);
    let s_out_inv = inverse(&s_out).expect("Gram factor is invertible");
    UnitaryColligation::new(
        state.clone(),
        input.clone(),
        output.clone(),
        s_out_inv * w0 * s_in,
    )
}

/// Resamples [`random_colligation`] until the result is simple.
pub fn random_simple_colligation_between(
    state: &PontryaginSpace,
    input: &PontryaginSpace,
    output: &PontryaginSpace,
    seed: u64,
) -> Result<UnitaryColligation> {
    let mut r = rng(seed);
    for _ in 0..100 {
        let d = random_colligation(&mut r, state, input, output)?;
        if is_simple_colligation(&d)? {
            return Ok(d);
        }
    }
    Err(Error::InfeasibleParameters(
        "no simple colligation found in 100 draws".into(),
    ))
}

/// Simple colligation with a diagonal state Gram (`neg_index` entries −1) and Hilbert channels.
pub fn random_simple_colligation(
    state_dim: usize,
    neg_index: usize,
    n2_dim: usize,
    n1_dim: usize,
    seed: u64,
) -> Result<UnitaryColligation> {
    if neg_index > state_dim || n1_dim != n2_dim {
        return Err(Error::InfeasibleParameters(format!(
            "need neg_index <= state_dim and n1_dim == n2_dim (got {neg_index}, {state_dim}, {n1_dim}, {n2_dim})"
        )));
    }
    let signs: Vec<f64> = (0..state_dim)
        .map(|i| if i < neg_index { -1.0 } else { 1.0 })
        .collect();
    let state = PontryaginSpace::diagonal(&signs)?;
    random_simple_colligation_between(
        &state,
        &PontryaginSpace::hilbert(n2_dim),
        &PontryaginSpace::hilbert(n1_dim),
        seed,
    )
}

/// Random non-simple colligation: a simple one plus an isolated Hilbert block of size `extra`.
pub fn random_reducible_colligation(
    state: &PontryaginSpace,
    input: &PontryaginSpace,
    output: &PontryaginSpace,
    extra: usize,
    seed: u64,
) -> Result<UnitaryColligation> {
    let base = random_simple_colligation_between(state, input, output, seed)?;
    let mut r = rng(seed ^ 0x5eed);
    let w = random_unitary(&mut r, extra);
    base.with_reducing_block(&w)
}

/// `ℋ̃ = ℋ^[⊥] [∔] ℋ`.
#[derive(Debug, Clone)]
pub struct ExitSpace {
    pub hperp: PontryaginSpace,
    pub htilde: PontryaginSpace,
    pub base_dim: usize,
}

impl ExitSpace {
    pub fn new(hperp: PontryaginSpace, base: &PontryaginSpace) -> Self {
        Self {
            htilde: hperp.direct_sum(base),
            base_dim: base.dim(),
            hperp,
        }
    }

    pub fn perp_dim(&self) -> usize {
        self.hperp.dim()
    }

    /// Embedding `ℋ → ℋ̃`.
    pub fn embed(&self) -> CMat {
        crate::linalg::vstack(&zeros(self.perp_dim(), self.base_dim), &identity(self.base_dim))
    }

    /// `P_ℋ A ↾ℋ` for an operator `A` in `ℋ̃`.
    pub fn compress(&self, a: &CMat) -> CMat {
        let p = self.perp_dim();
        a.view((p, p), (self.base_dim, self.base_dim)).into_owned()
    }
}

#[derive(Debug, Clone)]
pub struct LiftedTriplet {
    pub base: BoundaryTriplet,
    pub exit: ExitSpace,
    pub triplet: BoundaryTriplet,
}

/// The triplet for `V` seen in `ℋ̃`: `Γ̃₁ = π₂ ⊕ Γ₁`, `Γ̃₂ = π₁ ⊕ Γ₂`.
pub fn lift_triplet(base: &BoundaryTriplet, hperp: &PontryaginSpace) -> Result<LiftedTriplet> {
    let exit = ExitSpace::new(hperp.clone(), base.space());
    let (p, n) = (hperp.dim(), base.dim());
    let v = &base.inst.v;
    let pad = |m: &CMat| crate::linalg::vstack(&zeros(p, m.ncols()), m);
    let lifted_v = LinearRelation::from_pairs(
        exit.htilde.clone(),
        exit.htilde.clone(),
        &pad(&v.top()),
        &pad(&v.bottom()),
    )?;
    let inst = IsometryInstance::new(lifted_v, format!("{} lifted by {p}", base.inst.label))?;
    // stacked coordinates in ℋ̃²: (m, f, m', f')
    let lift = |g: &CMat, pick_second: bool| -> CMat {
        let d = g.nrows();
        let mut out = zeros(p + d, 2 * (p + n));
        let offset = if pick_second { p + n } else { 0 };
        for i in 0..p {
            out[(i, offset + i)] = C64::new(1.0, 0.0);
        }
        out.view_mut((p, p), (d, n)).copy_from(&cols(g, 0, n));
        out.view_mut((p, 2 * p + n), (d, n)).copy_from(&cols(g, n, n));
        out
    };
    let triplet = BoundaryTriplet::from_parts(
        inst,
        hperp.direct_sum(&base.n1),
        hperp.direct_sum(&base.n2),
        lift(&base.g1, true),
        lift(&base.g2, false),
    )?;
    Ok(LiftedTriplet {
        base: base.clone(),
        exit,
        triplet,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockLawResiduals {
    pub lambda: C64,
    pub region: usize,
    pub gamma: f64,
    pub weyl: f64,
}

/// Recomputes `γ̃ⱼ(λ)` and `M̃ⱼ(λ)` from the lifted maps and compares them with the block forms
/// `γ̃₁ = diag(λ⁻¹, γ₁)`, `M̃₁ = diag(λ⁻¹, M₁)`, `γ̃₂ = diag(I, γ₂)`, `M̃₂ = diag(λ, M₂)`.
pub fn block_law_residuals(l: &LiftedTriplet, lambda: C64) -> Result<BlockLawResiduals> {
    let region = if l.base.exceptional.in_d1(lambda) {
        1
    } else if l.base.exceptional.in_d2(lambda) {
        2
    } else {
        return Err(Error::RegionViolation {
            lambda,
            region: "D1 or D2",
        });
    };
    let p = l.exit.perp_dim();
    let scalar = if region == 1 {
        C64::new(1.0, 0.0) / lambda
    } else {
        lambda
    };
    let gamma_scalar = if region == 1 { scalar } else { C64::new(1.0, 0.0) };
    let expected_gamma = block_diag(&(identity(p) * gamma_scalar), &gamma(&l.base, region, lambda)?);
    let expected_weyl = block_diag(&(identity(p) * scalar), &weyl(&l.base, region, lambda)?);
    Ok(BlockLawResiduals {
        lambda,
        region,
        gamma: scaled_residual(&gamma(&l.triplet, region, lambda)?, &expected_gamma),
        weyl: scaled_residual(&weyl(&l.triplet, region, lambda)?, &expected_weyl),
    })
}

/// Distances of `Ṽ₁`, `Ṽ₂` from `(ℋ^[⊥] ⊕ {0}) ∔ V₁` and `({0} ⊕ ℋ^[⊥]) ∔ V₂`.
pub fn lifted_kernel_distances(l: &LiftedTriplet) -> Result<(f64, f64)> {
    let hp = &l.exit.hperp;
    // (ℋ^[⊥] ⊕ {0}) is {(m, 0)}, ({0} ⊕ ℋ^[⊥]) is {(0, m')}
    let domain_only = LinearRelation::graph_of(&zeros(hp.dim(), hp.dim()), hp.clone(), hp.clone())?;
    let range_only = domain_only.inverse();
    let e1 = domain_only.direct_sum(&l.base.v1);
    let e2 = range_only.direct_sum(&l.base.v2);
    Ok((e1.distance(&l.triplet.v1), e2.distance(&l.triplet.v2)))
}

fn check_compatible(l: &LiftedTriplet, d: &UnitaryColligation) -> Result<()> {
    let tol = zero_tol();
    let ok = d.state.approx_eq(&l.exit.hperp, tol)
        && d.input.approx_eq(&l.base.n2, tol)
        && d.output.approx_eq(&l.base.n1, tol);
    if ok {
        Ok(())
    } else {
        Err(Error::IncompatibleShapes(
            "colligation spaces must be (exit complement, N2, N1)".into(),
        ))
    }
}

/// `Ṽ_τ` in `ℋ̃` for `τ = graph U`.
pub fn exit_extension(l: &LiftedTriplet, d: &UnitaryColligation) -> Result<LinearRelation> {
    check_compatible(l, d)?;
    let tau = LinearRelation::graph_of(&d.u, l.triplet.n2.clone(), l.triplet.n1.clone())?;
    l.triplet.extension(&tau)
}

/// `P_ℋ(Ṽ − λ)⁻¹↾ℋ`.
pub fn compress(vt: &LinearRelation, lambda: C64, exit: &ExitSpace) -> Result<CMat> {
    Ok(exit.compress(&vt.resolvent(lambda)?))
}

/// `P_ℋ(I − λṼ)⁻¹↾ℋ`.
pub fn compress_coresolvent(vt: &LinearRelation, lambda: C64, exit: &ExitSpace) -> Result<CMat> {
    check_nonzero(lambda)?;
    let mu = C64::new(1.0, 0.0) / lambda;
    Ok(compress(vt, mu, exit)? * (-mu))
}

fn check_nonzero(lambda: C64) -> Result<()> {
    if lambda.norm() < crate::weyl::ORIGIN_EXCLUSION {
        Err(Error::RegionViolation {
            lambda,
            region: "nonzero",
        })
    } else {
        Ok(())
    }
}

/// `Θ(λ̄)^[*] = Θ^#(1/λ)`.
fn theta_adjoint(d: &UnitaryColligation, lambda: C64) -> Result<CMat> {
    PontryaginSpace::indef_adjoint(&char_function(d, lambda.conj())?, &d.input, &d.output)
}

/// The generalized resolvent parametrized by `Θ`:
/// `R_λ(V₁) − λ⁻¹γ₁Θ(1/λ)(I − M₁Θ(1/λ))⁻¹γ₂^#` on `𝒟₁` and
/// `R_λ(V₂) + λ⁻¹γ₂Θ(λ̄)^[*](I − M₂Θ(λ̄)^[*])⁻¹γ₁^#` on `𝒟₂`.
pub fn generalized_resolvent(t: &BoundaryTriplet, d: &UnitaryColligation, lambda: C64) -> Result<CMat> {
    check_nonzero(lambda)?;
    let inv_l = C64::new(1.0, 0.0) / lambda;
    if t.exceptional.in_d1(lambda) {
        let theta = char_function(d, inv_l)?;
        let m = weyl(t, 1, lambda)?;
        let inner = identity(t.n1.dim()) - m * &theta;
        let mid = theta * inverse(&inner).ok_or(Error::PencilSingular { lambda })?;
        Ok(t.v1.resolvent(lambda)? - gamma(t, 1, lambda)? * mid * gamma_sharp(t, 2, lambda)? * inv_l)
    } else if t.exceptional.in_d2(lambda) {
        let theta = theta_adjoint(d, lambda)?;
        let m = weyl(t, 2, lambda)?;
        let inner = identity(t.n2.dim()) - m * &theta;
        let mid = theta * inverse(&inner).ok_or(Error::PencilSingular { lambda })?;
        Ok(t.v2.resolvent(lambda)? + gamma(t, 2, lambda)? * mid * gamma_sharp(t, 1, lambda)? * inv_l)
    } else {
        Err(Error::RegionViolation {
            lambda,
            region: "D1 or D2",
        })
    }
}

/// The generalized coresolvent `P_ℋ(I − λṼ)⁻¹↾ℋ` through `Θ`:
/// `(I − λV₁)⁻¹ + γ₁(1/λ)Θ(λ)(I − M₁(1/λ)Θ(λ))⁻¹γ₂(λ̄)^[*]` when `1/λ ∈ 𝒟₁`,
/// `(I − λV₂)⁻¹ − γ₂(1/λ)Θ^#(λ)(I − M₂(1/λ)Θ^#(λ))⁻¹γ₁(λ̄)^[*]` when `1/λ ∈ 𝒟₂`.
pub fn coresolvent(t: &BoundaryTriplet, d: &UnitaryColligation, lambda: C64) -> Result<CMat> {
    check_nonzero(lambda)?;
    let mu = C64::new(1.0, 0.0) / lambda;
    if t.exceptional.in_d1(mu) {
        let theta = char_function(d, lambda)?;
        let inner = identity(t.n1.dim()) - weyl(t, 1, mu)? * &theta;
        let mid = theta * inverse(&inner).ok_or(Error::PencilSingular { lambda })?;
        // (I − λV₁)⁻¹ = −μ R_μ(V₁); γ₂(λ̄)^[*] = γ₂^#(μ)
        Ok(t.v1.resolvent(mu)? * (-mu) + gamma(t, 1, mu)? * mid * gamma_sharp(t, 2, mu)?)
    } else if t.exceptional.in_d2(mu) {
        let theta = theta_adjoint(d, mu)?;
        let inner = identity(t.n2.dim()) - weyl(t, 2, mu)? * &theta;
        let mid = theta * inverse(&inner).ok_or(Error::PencilSingular { lambda })?;
        Ok(t.v2.resolvent(mu)? * (-mu) - gamma(t, 2, mu)? * mid * gamma_sharp(t, 1, mu)?)
    } else {
        Err(Error::RegionViolation {
            lambda,
            region: "1/lambda in D1 or D2",
        })
    }
}

/// Compares the compressed resolvent of `Ṽ₀` at `ζ` with the image of the
/// `Θ`-formula at `λ` under `R ↦ (λ − z₀)/(|z₀|² − 1)(I + (λ − z₀)R)`.
pub fn transformed_generalized_resolvent_residual(
    l: &LiftedTriplet,
    d: &UnitaryColligation,
    z0: C64,
    lambda: C64,
) -> Result<f64> {
    let vt = exit_extension(l, d)?.as_matrix()?;
    let v0 = crate::moebius::transform_matrix(&vt, z0)?;
    let zeta = crate::moebius::param_map(lambda, z0)?;
    let m = v0.nrows();
    let direct = inverse(&(v0 - identity(m) * zeta)).ok_or(Error::NotInvertible { lambda: zeta })?;
    let lhs = l.exit.compress(&direct);
    let r = generalized_resolvent(&l.base, d, lambda)?;
    let k = lambda - z0;
    let rhs = (identity(l.base.dim()) + r * k) * (k / (z0.norm_sqr() - 1.0));
    Ok(scaled_residual(&lhs, &rhs))
}

/// Sample points for the minimality span.
pub fn minimality_points() -> Vec<C64> {
    let r = |x: f64| C64::new(x, 0.0);
    vec![
        r(2.0),
        r(-2.0),
        r(3.0),
        r(-3.0),
        r(0.5),
        r(-0.5),
        r(1.0 / 3.0),
        r(-1.0 / 3.0),
        C64::new(0.0, 2.0),
        C64::new(0.0, 0.5),
    ]
}

/// `ℋ̃ = ℋ_u [∔] ℋ_m`, `Ṽ = Ṽ_u [∔] Ṽ_m`, with the blocks written in Euclidean-orthonormal bases.
#[derive(Debug, Clone)]
pub struct MinimalDecomposition {
    pub hm: Subspace,
    pub hu: Subspace,
    /// `Ṽ_m` in the basis of `hm`.
    pub vm: CMat,
    /// `Ṽ_u` in the basis of `hu`.
    pub vu: CMat,
    pub invariance_residual: f64,
    pub minimal: bool,
    vt: CMat,
    exit: ExitSpace,
}

impl MinimalDecomposition {
    /// `‖P_ℋ(Ṽ − λ)⁻¹↾ℋ − P_ℋ(Ṽ_m − λ)⁻¹↾ℋ‖`, relative.
    pub fn compression_residual(&self, lambda: C64) -> Result<f64> {
        let m = self.vt.nrows();
        let full = inverse(&(&self.vt - identity(m) * lambda)).ok_or(Error::NotInvertible { lambda })?;
        let q = self.hm.basis();
        let k = q.ncols();
        let inner = inverse(&(&self.vm - identity(k) * lambda)).ok_or(Error::NotInvertible { lambda })?;
        let e = self.exit.embed();
        let reduced = rows(&(q * inner * q.adjoint() * &e), self.exit.perp_dim(), self.exit.base_dim);
        Ok(scaled_residual(&reduced, &self.exit.compress(&full)))
    }
}

/// Splits a unitary `Ṽ` into its minimal part and a Hilbert-space remainder.
pub fn minimal_decompose(vt: &LinearRelation, exit: &ExitSpace) -> Result<MinimalDecomposition> {
    let m = vt.as_matrix()?;
    let dim = m.nrows();
    let e = exit.embed();
    let mut stacked = e.clone();
    let add = |z: C64, stacked: &mut CMat| {
        if let Some(inv) = inverse(&(&m - identity(dim) * z)) {
            *stacked = hstack(stacked, &(inv * &e));
        }
    };
    for z in minimality_points() {
        add(z, &mut stacked);
    }
    let mut r = rng(0);
    let mut current = rank(&stacked);
    let mut stable = 0;
    while stable < 2 && current < dim {
        let z = C64::from_polar(r.gen_range(0.1..3.0), r.gen_range(0.0..std::f64::consts::TAU));
        add(z, &mut stacked);
        let next = rank(&stacked);
        if next == current {
            stable += 1;
        } else {
            stable = 0;
            current = next;
        }
    }
    let hm = Subspace::span(&stacked);
    let space = &exit.htilde;
    let hu = space.ortho_companion(&hm);
    let sig = space.subspace_signature(&hu);
    if sig.neg > 0 || sig.iso > 0 || hm.intersection(&hu).dim() > 0 {
        return Err(Error::NotRegular);
    }
    let (qm, qu) = (hm.basis(), hu.basis());
    let vm = qm.adjoint() * &m * qm;
    let vu = qu.adjoint() * &m * qu;
    let invariance_residual = max_abs(&(&m * qm - qm * &vm)).max(max_abs(&(&m * qu - qu * &vu)));
    Ok(MinimalDecomposition {
        minimal: hm.dim() == dim,
        hm,
        hu,
        vm,
        vu,
        invariance_residual,
        vt: m,
        exit: exit.clone(),
    })
}
