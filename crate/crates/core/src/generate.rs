//! Seeded random instances: Gram matrices, J-unitaries, isometries and parameters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boundary::IsometryInstance;
use crate::error::{Error, Result};
use crate::linalg::{
    diag_real, hermitian_eigen, hstack, identity, inverse, null_space, zeros, CMat, C64,
};
use crate::relation::LinearRelation;
use crate::space::PontryaginSpace;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries with real and imaginary parts uniform in `[-1, 1]`.
pub fn random_matrix(rng: &mut SeededRng, r: usize, c: usize) -> CMat {
    CMat::from_fn(r, c, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

pub fn random_unitary(rng: &mut SeededRng, n: usize) -> CMat {
    if n == 0 {
        return zeros(0, 0);
    }
    let a = random_matrix(rng, n, n) + identity(n) * C64::new(0.1, 0.0);
    a.qr().q()
}

/// Signature matrix with the `kappa` negative entries first.
pub fn signature_matrix(n: usize, kappa: usize) -> CMat {
    let d: Vec<f64> = (0..n).map(|i| if i < kappa { -1.0 } else { 1.0 }).collect();
    diag_real(&d)
}

/// A well-conditioned Hermitian Gram `J = S* D S` with `kappa` negative squares.
pub fn random_gram(rng: &mut SeededRng, n: usize, kappa: usize) -> CMat {
    let q = random_unitary(rng, n);
    let scales: Vec<f64> = (0..n).map(|_| rng.gen_range(0.7..1.4)).collect();
    let s = diag_real(&scales) * q;
    s.adjoint() * signature_matrix(n, kappa) * s
}

/// Factor `J = S* D S` with `D` a signature matrix, negatives first.
pub fn gram_factor(j: &CMat) -> (CMat, CMat) {
    let (values, vectors) = hermitian_eigen(j);
    // eigenvalues ascend, so the negative ones already lead
    let kappa = values.iter().filter(|&&x| x < 0.0).count();
    let roots: Vec<f64> = values.iter().map(|x| x.abs().sqrt()).collect();
    let s = diag_real(&roots) * vectors.adjoint();
    (s, signature_matrix(j.nrows(), kappa))
}

/// Cayley transform `(I + A)(I − A)⁻¹` of `A = D K` with `K` skew-Hermitian: a `D`-unitary.
pub fn random_signature_unitary(rng: &mut SeededRng, d: &CMat) -> CMat {
    let n = d.nrows();
    if n == 0 {
        return zeros(0, 0);
    }
    loop {
        let m = random_matrix(rng, n, n);
        let k = (&m - m.adjoint()) * C64::new(0.5, 0.0);
        let a = d * k;
        let i = identity(n);
        if let Some(inv) = inverse(&(&i - &a)) {
            return (i + a) * inv;
        }
    }
}

/// A `J`-unitary matrix for the Gram `j`.
pub fn random_j_unitary(rng: &mut SeededRng, j: &CMat) -> CMat {
    let (s, d) = gram_factor(j);
    let w0 = random_signature_unitary(rng, &d);
    let s_inv = inverse(&s).expect("Gram factor is invertible");
    s_inv * w0 * s
}

/// `V = W↾D` for a random `J`-unitary `W` and a random `dom_dim`-dimensional `D`.
///
/// With `degenerate`, `D` contains a `J`-neutral vector orthogonal to all of `D`.
pub fn random_instance(
    dim: usize,
    kappa: usize,
    dom_dim: usize,
    degenerate: bool,
    seed: u64,
) -> Result<IsometryInstance> {
    if dom_dim > dim || kappa > dim {
        return Err(Error::InfeasibleParameters(format!(
            "need dom_dim <= dim and kappa <= dim (dim {dim}, kappa {kappa}, dom_dim {dom_dim})"
        )));
    }
    if degenerate && (kappa == 0 || kappa == dim || dom_dim == 0) {
        return Err(Error::InfeasibleParameters(
            "a degenerate domain needs 1 <= kappa < dim and dom_dim >= 1".into(),
        ));
    }
    let mut rng = rng(seed);
    let j = random_gram(&mut rng, dim, kappa);
    let space = PontryaginSpace::new(j.clone())?;
    let w = random_j_unitary(&mut rng, &j);
    let domain = if degenerate {
        let (s, _) = gram_factor(&j);
        let mut e = zeros(dim, 1);
        e[(0, 0)] = C64::new(1.0, 0.0);
        e[(kappa, 0)] = C64::new(1.0, 0.0);
        let x = inverse(&s).expect("Gram factor is invertible") * e;
        let companion = null_space(&(&j * &x).adjoint());
        let coeffs = random_matrix(&mut rng, companion.ncols(), dom_dim - 1);
        hstack(&x, &(companion * coeffs))
    } else {
        random_matrix(&mut rng, dim, dom_dim)
    };
    let images = &w * &domain;
    let label = format!(
        "random(dim={dim},kappa={kappa},dom={dom_dim},degenerate={degenerate},seed={seed})"
    );
    IsometryInstance::from_map(space, &domain, &images, label)
}

/// Classes of random parameters `τ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauClass {
    Unitary,
    Isometric,
    Coisometric,
    Contractive,
    Expansive,
    Arbitrary,
}

impl TauClass {
    pub const ALL: [TauClass; 6] = [
        TauClass::Unitary,
        TauClass::Isometric,
        TauClass::Coisometric,
        TauClass::Contractive,
        TauClass::Expansive,
        TauClass::Arbitrary,
    ];
}

/// A random relation from `n2` to `n1` of the requested class.
///
/// Both spaces must have signature Grams of equal size for the metric classes;
/// `Arbitrary` works for any shapes.
pub fn random_tau(
    rng: &mut SeededRng,
    n2: &PontryaginSpace,
    n1: &PontryaginSpace,
    class: TauClass,
) -> Result<LinearRelation> {
    let (d2, d1) = (n2.dim(), n1.dim());
    if class == TauClass::Arbitrary {
        let k = rng.gen_range(0..=d1 + d2);
        let basis = random_matrix(rng, d1 + d2, k);
        return LinearRelation::new(n2.clone(), n1.clone(), &basis);
    }
    if d1 != d2 || n1.neg_index() != n2.neg_index() {
        return Err(Error::IncompatibleShapes(
            "metric parameter classes need boundary spaces of equal signature".into(),
        ));
    }
    // maps between the two boundary spaces through their signature forms
    let (s2, d) = gram_factor(n2.gram());
    let (s1, _) = gram_factor(n1.gram());
    let s1_inv = inverse(&s1).expect("Gram factor is invertible");
    let through = |core: &CMat| -> CMat { &s1_inv * core * &s2 };
    let kappa = n1.neg_index();
    let unitary = |rng: &mut SeededRng| random_signature_unitary(rng, &d);
    let rel = |m: CMat| LinearRelation::graph_of(&through(&m), n2.clone(), n1.clone());
    match class {
        TauClass::Unitary => rel(unitary(rng)),
        TauClass::Isometric | TauClass::Coisometric => {
            let full = rel(unitary(rng))?;
            let keep = rng.gen_range(0..d2.max(1));
            let sub = crate::space::Subspace::span(&random_matrix(rng, d2, keep));
            let iso = full.restrict(&sub)?;
            Ok(if class == TauClass::Isometric {
                iso
            } else {
                iso.inverse_adjoint()
            })
        }
        TauClass::Contractive | TauClass::Expansive => {
            let contract = class == TauClass::Contractive;
            let diag: Vec<f64> = (0..d2)
                .map(|i| {
                    let small = rng.gen_range(0.1..0.9);
                    let big = rng.gen_range(1.1..3.0);
                    // negative axes must grow for a contraction, positive ones shrink
                    match (i < kappa, contract) {
                        (true, true) | (false, false) => big,
                        _ => small,
                    }
                })
                .collect();
            let core = unitary(rng) * diag_real(&diag) * unitary(rng);
            rel(core)
        }
        TauClass::Arbitrary => unreachable!(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn j_unitaries_preserve_the_form() {
        let mut r = rng(3);
        let j = random_gram(&mut r, 4, 2);
        let w = random_j_unitary(&mut r, &j);
        assert!(max_abs(&(w.adjoint() * &j * &w - &j)) < 1e-10);
        assert_eq!(PontryaginSpace::new(j).unwrap().neg_index(), 2);
    }

    #[test]
    fn generated_instances() {
        let inst = random_instance(2, 0, 1, false, 1).unwrap();
        assert!(inst.v.classify().isometric);
        let inst = random_instance(4, 1, 2, true, 3).unwrap();
        let sig = inst.space.subspace_signature(&inst.v.dom());
        assert!(sig.iso > 0, "{sig:?}");
        let inst = random_instance(3, 1, 3, false, 5).unwrap();
        assert!(inst.v.classify().unitary);
        assert!(random_instance(2, 0, 1, true, 1).is_err());
        assert!(random_instance(2, 0, 3, false, 1).is_err());
    }

    #[test]
    fn deterministic_per_seed() {
        let a = random_instance(5, 2, 3, false, 11).unwrap();
        let b = random_instance(5, 2, 3, false, 11).unwrap();
        assert!(a.v.same_as(&b.v));
        assert_eq!(a.space.gram(), b.space.gram());
    }

    #[test]
    fn parameter_classes() {
        let mut r = rng(9);
        let n = PontryaginSpace::diagonal(&[-1.0, 1.0, 1.0]).unwrap();
        for class in TauClass::ALL {
            for _ in 0..5 {
                let tau = random_tau(&mut r, &n, &n, class).unwrap();
                let c = tau.classify();
                let ok = match class {
                    TauClass::Unitary => c.unitary,
                    TauClass::Isometric => c.isometric,
                    TauClass::Coisometric => c.coisometric,
                    TauClass::Contractive => c.contractive,
                    TauClass::Expansive => c.expansive,
                    TauClass::Arbitrary => true,
                };
                assert!(ok, "{class:?}: {c:?}");
            }
        }
    }
}
