//! γ-fields, Weyl functions and the identities tying them together.
//!
//! `γ̂ⱼ(λ) = (Γⱼ↾𝔑̂_λ)⁻¹` lifts boundary data back to the defect graph at `λ`;
//! `γⱼ(λ)` is its first component. `M₁(λ) = Γ₂γ̂₁(λ)` for `λ ∈ 𝒟₁` and
//! `M₂(λ) = Γ₁γ̂₂(λ)` for `λ ∈ 𝒟₂`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::boundary::{defect_of, BoundaryTriplet, DefectSpace, IsometryInstance};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, identity, inverse, rank, rows, scaled_residual, zeros, CMat, C64,
};
use crate::space::PontryaginSpace;
use crate::tolerance::zero_tol;

/// Defect subspace `𝔑_λ(V)`.
pub fn defect(inst: &IsometryInstance, lambda: C64) -> DefectSpace {
    defect_of(&inst.vstar(), lambda)
}

fn region_check(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<()> {
    let ok = match j {
        1 => t.exceptional.in_d1(lambda),
        2 => t.exceptional.in_d2(lambda),
        _ => false,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::RegionViolation {
            lambda,
            region: if j == 1 { "D1" } else { "D2" },
        })
    }
}

fn gamma_map(t: &BoundaryTriplet, j: usize) -> &CMat {
    if j == 1 {
        &t.g1
    } else {
        &t.g2
    }
}

/// `γ̂ⱼ(λ)`: a `2n × dim 𝔑ⱼ` matrix with columns in `𝔑̂_λ` and `Γⱼγ̂ⱼ = I`.
pub fn gamma_hat(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<CMat> {
    region_check(t, j, lambda)?;
    let d = defect_of(&t.vstar, lambda);
    let basis = d.nhat.basis();
    let gb = gamma_map(t, j) * basis;
    if gb.nrows() != gb.ncols() {
        return Err(Error::GammaNotInvertible { j, lambda });
    }
    let inv = inverse(&gb).ok_or(Error::GammaNotInvertible { j, lambda })?;
    Ok(basis * inv)
}

/// `γⱼ(λ): 𝔑ⱼ → ℋ`.
pub fn gamma(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<CMat> {
    Ok(rows(&gamma_hat(t, j, lambda)?, 0, t.dim()))
}

/// `M₁(λ): 𝔑₁ → 𝔑₂` for `j = 1`, `M₂(λ): 𝔑₂ → 𝔑₁` for `j = 2`.
pub fn weyl(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<CMat> {
    let gh = gamma_hat(t, j, lambda)?;
    let other = if j == 1 { &t.g2 } else { &t.g1 };
    Ok(other * gh)
}

/// `F^#(λ) = F(1/λ̄)^{[*]}` for `F(μ): source → target`.
pub fn sharp<F>(f: F, lambda: C64, source: &PontryaginSpace, target: &PontryaginSpace) -> Result<CMat>
where
    F: Fn(C64) -> Result<CMat>,
{
    if lambda.norm() == 0.0 {
        return Err(Error::RegionViolation {
            lambda,
            region: "nonzero",
        });
    }
    let value = f(C64::new(1.0, 0.0) / lambda.conj())?;
    PontryaginSpace::indef_adjoint(&value, source, target)
}

/// `γⱼ^#(λ) = γⱼ(1/λ̄)^{[*]}: ℋ → 𝔑ⱼ`.
pub fn gamma_sharp(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<CMat> {
    let nj = if j == 1 { &t.n1 } else { &t.n2 };
    sharp(|mu| gamma(t, j, mu), lambda, nj, t.space())
}

/// `Mⱼ^#(λ) = Mⱼ(1/λ̄)^{[*]}`.
pub fn weyl_sharp(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<CMat> {
    let (src, dst) = if j == 1 { (&t.n1, &t.n2) } else { (&t.n2, &t.n1) };
    sharp(|mu| weyl(t, j, mu), lambda, src, dst)
}

/// Everything defined at a single point.
#[derive(Debug, Clone)]
pub struct WeylData {
    pub lambda: C64,
    pub in_d1: bool,
    pub in_d2: bool,
    pub gamma1: Option<CMat>,
    pub gamma2: Option<CMat>,
    pub m1: Option<CMat>,
    pub m2: Option<CMat>,
}

pub fn evaluate(t: &BoundaryTriplet, lambda: C64) -> WeylData {
    WeylData {
        lambda,
        in_d1: t.exceptional.in_d1(lambda),
        in_d2: t.exceptional.in_d2(lambda),
        gamma1: gamma(t, 1, lambda).ok(),
        gamma2: gamma(t, 2, lambda).ok(),
        m1: weyl(t, 1, lambda).ok(),
        m2: weyl(t, 2, lambda).ok(),
    }
}

/// Which of the four kernel identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Identity {
    M1,
    M2,
    M3,
    M4,
}

impl Identity {
    pub const ALL: [Identity; 4] = [Identity::M1, Identity::M2, Identity::M3, Identity::M4];

    /// Regions of `(λ, μ)`.
    pub fn regions(self) -> (usize, usize) {
        match self {
            Identity::M1 => (1, 1),
            Identity::M2 => (2, 2),
            Identity::M3 => (2, 1),
            Identity::M4 => (1, 2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Identity::M1 => "M1",
            Identity::M2 => "M2",
            Identity::M3 => "M3",
            Identity::M4 => "M4",
        }
    }
}

/// Residual of one identity at `(λ, μ)`:
///
/// - M1: `−(I − M₁(μ)^[*]M₁(λ))/(1−λμ̄) = γ₁(μ)^[*]γ₁(λ)`
/// - M2: `(I − M₂(μ)^[*]M₂(λ))/(1−λμ̄) = γ₂(μ)^[*]γ₂(λ)`
/// - M3: `(M₁(μ)^[*] − M₂(λ))/(1−λμ̄) = γ₁(μ)^[*]γ₂(λ)`
/// - M4: `(M₁(λ) − M₂(μ)^[*])/(1−λμ̄) = γ₂(μ)^[*]γ₁(λ)`
pub fn identity_residual(t: &BoundaryTriplet, which: Identity, lambda: C64, mu: C64) -> Result<f64> {
    let denom = C64::new(1.0, 0.0) - lambda * mu.conj();
    if denom.norm() < 1e-12 {
        return Err(Error::RegionViolation {
            lambda,
            region: "1 - lambda conj(mu) != 0",
        });
    }
    let h = t.space();
    let (n1, n2) = (&t.n1, &t.n2);
    let adj = PontryaginSpace::indef_adjoint;
    let (lhs, rhs) = match which {
        Identity::M1 => {
            let (ml, mm) = (weyl(t, 1, lambda)?, weyl(t, 1, mu)?);
            let (gl, gm) = (gamma(t, 1, lambda)?, gamma(t, 1, mu)?);
            let i = identity(n1.dim());
            let lhs = -(i - adj(&mm, n1, n2)? * ml) / denom;
            (lhs, adj(&gm, n1, h)? * gl)
        }
        Identity::M2 => {
            let (ml, mm) = (weyl(t, 2, lambda)?, weyl(t, 2, mu)?);
            let (gl, gm) = (gamma(t, 2, lambda)?, gamma(t, 2, mu)?);
            let i = identity(n2.dim());
            let lhs = (i - adj(&mm, n2, n1)? * ml) / denom;
            (lhs, adj(&gm, n2, h)? * gl)
        }
        Identity::M3 => {
            let m2l = weyl(t, 2, lambda)?;
            let m1m = weyl(t, 1, mu)?;
            let lhs = (adj(&m1m, n1, n2)? - m2l) / denom;
            let rhs = adj(&gamma(t, 1, mu)?, n1, h)? * gamma(t, 2, lambda)?;
            (lhs, rhs)
        }
        Identity::M4 => {
            let m1l = weyl(t, 1, lambda)?;
            let m2m = weyl(t, 2, mu)?;
            let lhs = (m1l - adj(&m2m, n2, n1)?) / denom;
            let rhs = adj(&gamma(t, 2, mu)?, n2, h)? * gamma(t, 1, lambda)?;
            (lhs, rhs)
        }
    };
    Ok(scaled_residual(&lhs, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub m1: Option<f64>,
    pub m2: Option<f64>,
    pub m3: Option<f64>,
    pub m4: Option<f64>,
}

/// All identities whose region requirements `(λ, μ)` meet; the others are `None`.
pub fn identity_residuals(t: &BoundaryTriplet, lambda: C64, mu: C64) -> IdentityResiduals {
    let r = |w| identity_residual(t, w, lambda, mu).ok();
    IdentityResiduals {
        m1: r(Identity::M1),
        m2: r(Identity::M2),
        m3: r(Identity::M3),
        m4: r(Identity::M4),
    }
}

/// Residual of `γⱼ(λ) = (I + (λ−μ)(Vⱼ−λ)⁻¹)γⱼ(μ)`.
pub fn propagation_residual(t: &BoundaryTriplet, j: usize, lambda: C64, mu: C64) -> Result<f64> {
    let vj = if j == 1 { &t.v1 } else { &t.v2 };
    let r = vj.resolvent(lambda)?;
    let lhs = gamma(t, j, lambda)?;
    let rhs = (identity(t.dim()) + r * (lambda - mu)) * gamma(t, j, mu)?;
    Ok(scaled_residual(&lhs, &rhs))
}

/// Residual of `M₁(λ) = M₂^#(λ)`.
pub fn duality_residual(t: &BoundaryTriplet, lambda: C64) -> Result<f64> {
    Ok(scaled_residual(&weyl(t, 1, lambda)?, &weyl_sharp(t, 2, lambda)?))
}

/// Residuals of the two resolvent representations of the sharp γ-fields:
/// `Γ₂(R, I+λR)(V₁) = −λ⁻¹γ₂^#(λ)` for `λ ∈ 𝒟₁` and
/// `Γ₁(R, I+λR)(V₂) = λ⁻¹γ₁^#(λ)` for `λ ∈ 𝒟₂`.
pub fn l15_residual(t: &BoundaryTriplet, j: usize, lambda: C64) -> Result<f64> {
    region_check(t, j, lambda)?;
    let n = t.dim();
    let (vj, g, other, sign) = if j == 1 {
        (&t.v1, &t.g2, 2, -1.0)
    } else {
        (&t.v2, &t.g1, 1, 1.0)
    };
    let r = vj.resolvent(lambda)?;
    let lifted = crate::linalg::vstack(&r, &(identity(n) + &r * lambda));
    let lhs = g * lifted;
    let rhs = gamma_sharp(t, other, lambda)? * (C64::new(sign, 0.0) / lambda);
    Ok(scaled_residual(&lhs, &rhs))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L15Residuals {
    pub gamma1: Option<f64>,
    pub gamma2: Option<f64>,
}

pub fn l15_residuals(t: &BoundaryTriplet, lambda: C64) -> L15Residuals {
    L15Residuals {
        gamma1: l15_residual(t, 1, lambda).ok(),
        gamma2: l15_residual(t, 2, lambda).ok(),
    }
}

/// Points where formulas with `1/λ` factors are avoided.
pub const ORIGIN_EXCLUSION: f64 = 1e-6;
/// Distance kept from exceptional points when sampling.
pub const GRID_EXCLUSION: f64 = 1e-3;

/// Base grid in the disk: radii {0.2, 0.5, 0.8} × 8 angles.
pub fn disk_grid() -> Vec<C64> {
    let mut pts = Vec::with_capacity(24);
    for r in [0.2, 0.5, 0.8] {
        for k in 0..8 {
            // offset the angles so the grid avoids the real axis and its own reflections
            let theta = std::f64::consts::PI * (2.0 * k as f64 + 0.5) / 8.0;
            pts.push(C64::from_polar(r, theta));
        }
    }
    pts
}

/// Sample points in `𝒟₂`.
pub fn d2_grid(t: &BoundaryTriplet) -> Vec<C64> {
    disk_grid()
        .into_iter()
        .filter(|z| z.norm() > ORIGIN_EXCLUSION)
        .filter(|z| t.exceptional.lambda2.iter().all(|e| (e - z).norm() > GRID_EXCLUSION))
        .filter(|&z| t.exceptional.in_d2(z))
        .collect()
}

/// Sample points in `𝒟₁`: reflections `1/z̄` of the disk grid.
pub fn d1_grid(t: &BoundaryTriplet) -> Vec<C64> {
    disk_grid()
        .into_iter()
        .map(|z| C64::new(1.0, 0.0) / z.conj())
        .filter(|z| t.exceptional.lambda1.iter().all(|e| (e - z).norm() > GRID_EXCLUSION))
        .filter(|&z| t.exceptional.in_d1(z))
        .collect()
}

/// `count` deterministic `(λ, μ)` pairs admissible for `which`.
pub fn admissible_pairs(t: &BoundaryTriplet, which: Identity, count: usize) -> Vec<(C64, C64)> {
    let grid = |j| if j == 1 { d1_grid(t) } else { d2_grid(t) };
    let (rl, rm) = which.regions();
    let (gl, gm) = (grid(rl), grid(rm));
    let mut out = Vec::new();
    if gl.is_empty() || gm.is_empty() {
        return out;
    }
    let total = gl.len() * gm.len();
    // walk the product grid with a stride coprime to its size to spread the picks
    let stride = (1..total).rev().find(|s| gcd(*s, total) == 1 && *s < total / 2 + 2).unwrap_or(1);
    let mut idx = 0usize;
    for _ in 0..total {
        let (l, m) = (gl[idx / gm.len()], gm[idx % gm.len()]);
        if (C64::new(1.0, 0.0) - l * m.conj()).norm() >= GRID_EXCLUSION {
            out.push((l, m));
            if out.len() == count {
                break;
            }
        }
        idx = (idx + stride) % total;
    }
    out
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone)]
pub struct NegSquaresEstimate {
    pub count: usize,
    pub sample_points: Vec<C64>,
    pub gram: CMat,
}

/// Negative squares of the kernel `(J_in − s(λⱼ)* J_out s(λᵢ))/(1 − λᵢλ̄ⱼ)` on the given samples.
pub fn neg_squares(
    samples: &[(C64, CMat)],
    input: &PontryaginSpace,
    output: &PontryaginSpace,
) -> Result<NegSquaresEstimate> {
    let d = input.dim();
    let k = samples.len();
    let mut gram = zeros(k * d, k * d);
    for (i, (li, si)) in samples.iter().enumerate() {
        if si.nrows() != output.dim() || si.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: output.dim() * d,
                got: si.nrows() * si.ncols(),
            });
        }
        for (j, (lj, sj)) in samples.iter().enumerate() {
            let denom = C64::new(1.0, 0.0) - li * lj.conj();
            if denom.norm() < 1e-12 {
                return Err(Error::RegionViolation {
                    lambda: *li,
                    region: "1 - lambda_i conj(lambda_j) != 0",
                });
            }
            let block = (input.gram() - sj.adjoint() * output.gram() * si) / denom;
            gram.view_mut((j * d, i * d), (d, d)).copy_from(&block);
        }
    }
    let gram = (&gram + gram.adjoint()) * C64::new(0.5, 0.0);
    let ev = hermitian_eigenvalues(&gram);
    let scale = ev.iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let thr = zero_tol() * scale;
    let count = ev.iter().filter(|&&x| x < -thr).count();
    Ok(NegSquaresEstimate {
        count,
        sample_points: samples.iter().map(|s| s.0).collect(),
        gram,
    })
}

/// Number of seeded resamples used by [`neg_squares_sampled`].
pub const RESAMPLES: usize = 5;
/// Largest sample size used by [`neg_squares_sampled`].
pub const MAX_POINTS: usize = 12;

/// Maximum negative-square count over seeded random subsets of `points`.
pub fn neg_squares_sampled<F>(
    f: F,
    points: &[C64],
    input: &PontryaginSpace,
    output: &PontryaginSpace,
    seed: u64,
) -> Result<NegSquaresEstimate>
where
    F: Fn(C64) -> Result<CMat>,
{
    let values: Vec<(C64, CMat)> = points
        .iter()
        .filter_map(|&z| f(z).ok().map(|m| (z, m)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<NegSquaresEstimate> = None;
    for _ in 0..RESAMPLES {
        let mut pick = values.clone();
        pick.shuffle(&mut rng);
        pick.truncate(MAX_POINTS);
        let est = neg_squares(&pick, input, output)?;
        if best.as_ref().is_none_or(|b| est.count > b.count) {
            best = Some(est);
        }
    }
    best.ok_or(Error::InfeasibleParameters("no sample points".into()))
}

/// Negative squares of the `M₂` kernel over the `𝒟₂` grid.
pub fn weyl_neg_squares(t: &BoundaryTriplet, seed: u64) -> Result<NegSquaresEstimate> {
    neg_squares_sampled(|z| weyl(t, 2, z), &d2_grid(t), &t.n2, &t.n1, seed)
}

/// Is `span{𝔑_λ : λ ∈ lambdas}` the whole space?
pub fn is_simple(inst: &IsometryInstance, lambdas: &[C64]) -> bool {
    let vstar = inst.vstar();
    let n = inst.dim();
    let mut stacked = zeros(n, 0);
    for &z in lambdas {
        let d = defect_of(&vstar, z);
        stacked = crate::linalg::hstack(&stacked, d.n.basis());
    }
    rank(&stacked) == n
}

/// Default simplicity sample: both grids of an instance-independent shape.
pub fn simplicity_points() -> Vec<C64> {
    let inner = disk_grid();
    let outer: Vec<C64> = inner.iter().map(|z| C64::new(1.0, 0.0) / z.conj()).collect();
    inner.into_iter().chain(outer).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleReport {
    pub center: C64,
    /// `(radius, max ‖M₁‖)` on circles shrinking around `center`.
    pub circle_maxima: Vec<(f64, f64)>,
    /// Smallest ratio of maxima between consecutive radius decades.
    pub min_growth: f64,
}

/// Samples `‖M₁‖` on circles of radius 1e-2, 1e-3, 1e-4 around `around`.
pub fn pole_check(t: &BoundaryTriplet, around: C64) -> PoleReport {
    let mut circle_maxima = Vec::new();
    for r in [1e-2, 1e-3, 1e-4] {
        let mut best = 0.0f64;
        for k in 0..16 {
            let z = around + C64::from_polar(r, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / 16.0);
            if let Ok(m) = weyl(t, 1, z) {
                best = best.max(crate::linalg::fro(&m));
            }
        }
        circle_maxima.push((r, best));
    }
    let min_growth = circle_maxima
        .windows(2)
        .map(|w| w[1].1 / w[0].1.max(f64::MIN_POSITIVE))
        .fold(f64::INFINITY, f64::min);
    PoleReport {
        center: around,
        circle_maxima,
        min_growth,
    }
}

/// Largest `‖M₁‖` over the `𝒟₁` grid.
pub fn max_on_d1_grid(t: &BoundaryTriplet) -> f64 {
    d1_grid(t)
        .into_iter()
        .filter_map(|z| weyl(t, 1, z).ok())
        .map(|m| crate::linalg::fro(&m))
        .fold(0.0, f64::max)
}

/// Matching distance between `Λ₁` and the reflection `{1/z̄ : z ∈ Λ₂}`.
pub fn reflected_sets_distance(t: &BoundaryTriplet) -> Option<f64> {
    let reflected: Vec<C64> = t
        .exceptional
        .lambda2
        .iter()
        .filter(|z| z.norm() > ORIGIN_EXCLUSION)
        .map(|z| C64::new(1.0, 0.0) / z.conj())
        .collect();
    crate::linalg::match_point_sets(&t.exceptional.lambda1, &reflected)
}
