use proptest::prelude::*;

use pontryagin_triplets::boundary::{construct_triplet, decomposition_defect, verify_triplet, BoundaryTriplet};
use pontryagin_triplets::colligation::{
    char_function_residual, lift_triplet, random_simple_colligation, verify_colligation,
};
use pontryagin_triplets::generate::{random_gram, random_instance, random_matrix, random_tau, rng, TauClass};
use pontryagin_triplets::instance::InstanceFile;
use pontryagin_triplets::linalg::{c, identity, max_abs, relative_error, C64, CMat};
use pontryagin_triplets::moebius::{param_map, param_map_inverse, regular_points_agree, MoebiusContext};
use pontryagin_triplets::relation::LinearRelation;
use pontryagin_triplets::resolvent::{direct_resolvent, krein_resolvent, krein_resolvent_pair, TauParam};
use pontryagin_triplets::space::{PontryaginSpace, Subspace};
use pontryagin_triplets::suite::{run_file, Suite, SuiteOptions};
use pontryagin_triplets::weyl::{d1_grid, d2_grid, duality_residual, gamma_hat, neg_squares, weyl};

fn space(seed: u64, dim: usize, kappa: usize) -> PontryaginSpace {
    PontryaginSpace::new(random_gram(&mut rng(seed), dim, kappa.min(dim))).unwrap()
}

/// A feasible random triplet from loosely chosen parameters.
fn triplet(seed: u64, dim: usize, kappa: usize, degenerate: bool) -> BoundaryTriplet {
    let kappa = kappa.min(dim - 1);
    let dom = 1 + (seed as usize) % (dim - 1);
    let degenerate = degenerate && kappa >= 1;
    construct_triplet(&random_instance(dim, kappa, dom, degenerate, seed).unwrap(), 0).unwrap()
}

fn relation(seed: u64, from: &PontryaginSpace, to: &PontryaginSpace, k: usize) -> LinearRelation {
    let basis = random_matrix(&mut rng(seed), from.dim() + to.dim(), k);
    LinearRelation::new(from.clone(), to.clone(), &basis).unwrap()
}

fn column(m: &CMat, j: usize) -> pontryagin_triplets::linalg::CVec {
    m.column(j).into_owned()
}

fn unitary_tau(t: &BoundaryTriplet, seed: u64) -> Option<LinearRelation> {
    random_tau(&mut rng(seed), &t.n2, &t.n1, TauClass::Unitary).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inner_product_is_conjugate_symmetric(seed in 0u64..10_000, dim in 1usize..7, kappa in 0usize..3) {
        let s = space(seed, dim, kappa);
        let v = random_matrix(&mut rng(seed + 1), dim, 2);
        let (x, y) = (column(&v, 0), column(&v, 1));
        let a = s.inner(&x, &y).unwrap();
        let b = s.inner(&y, &x).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn signature_counts_add_up_and_detect_degeneracy(seed in 0u64..10_000, dim in 2usize..7, kappa in 0usize..3, k in 1usize..4) {
        let s = space(seed, dim, kappa);
        let mut basis = random_matrix(&mut rng(seed + 1), dim, k.min(dim));
        if seed % 2 == 0 && kappa.min(dim) >= 1 && kappa.min(dim) < dim {
            // make the first column neutral and orthogonal to the rest
            let neutral = neutral_vector(&s);
            let rest = s.ortho_companion(&Subspace::span(&neutral));
            let picked = rest.basis() * random_matrix(&mut rng(seed + 2), rest.dim(), k.min(dim) - 1);
            let mut joined = CMat::zeros(dim, k.min(dim));
            joined.set_column(0, &neutral.column(0));
            for j in 1..k.min(dim) {
                joined.set_column(j, &picked.column(j - 1));
            }
            basis = joined;
        }
        let sub = Subspace::span(&basis);
        let sig = s.subspace_signature(&sub);
        prop_assert_eq!(sig.dim(), sub.dim());
        let meets_companion = !sub.intersection(&s.ortho_companion(&sub)).is_zero();
        prop_assert_eq!(sig.iso == 0, !meets_companion);
    }

    #[test]
    fn indefinite_adjoint_is_an_involution(seed in 0u64..10_000, d1 in 1usize..6, d2 in 1usize..6, kappa in 0usize..3) {
        let (a_sp, b_sp) = (space(seed, d1, kappa), space(seed + 1, d2, kappa));
        let a = random_matrix(&mut rng(seed + 2), d2, d1);
        let adj = PontryaginSpace::indef_adjoint(&a, &a_sp, &b_sp).unwrap();
        let back = PontryaginSpace::indef_adjoint(&adj, &b_sp, &a_sp).unwrap();
        prop_assert!(max_abs(&(back - &a)) <= 1e-12 * (1.0 + max_abs(&a)));
    }

    #[test]
    fn companion_dimensions_add_up(seed in 0u64..10_000, dim in 1usize..8, kappa in 0usize..3, k in 0usize..8) {
        let s = space(seed, dim, kappa);
        let sub = Subspace::span(&random_matrix(&mut rng(seed + 1), dim, k.min(dim)));
        prop_assert_eq!(sub.dim() + s.ortho_companion(&sub).dim(), dim);
    }

    #[test]
    fn relation_parts_and_adjoints(seed in 0u64..10_000, d1 in 1usize..5, d2 in 1usize..5, kappa in 0usize..2, k in 0usize..8) {
        let (h1, h2) = (space(seed, d1, kappa), space(seed + 1, d2, kappa));
        let t = relation(seed + 2, &h1, &h2, k.min(d1 + d2));
        let p = t.parts();
        prop_assert_eq!(t.dim(), p.dom.dim() + p.mul.dim());
        prop_assert_eq!(t.dim(), p.ran.dim() + p.ker.dim());
        let adj = t.adjoint();
        prop_assert!(adj.adjoint().distance(&t) <= 1e-9);
        prop_assert!(adj.mul().distance(&h1.ortho_companion(&t.dom())) <= 1e-9);
        prop_assert!(adj.ker().distance(&h2.ortho_companion(&t.ran())) <= 1e-9);
    }

    #[test]
    fn isometric_iff_inverse_inside_adjoint(seed in 0u64..10_000, dim in 2usize..7, kappa in 0usize..3, perturb in any::<bool>()) {
        let t = triplet(seed, dim, kappa, false);
        let mut v = t.inst.v.clone();
        if perturb {
            let bottom = v.bottom() + random_matrix(&mut rng(seed + 9), dim, v.dim()) * c(0.3, 0.0);
            v = LinearRelation::from_pairs(v.from_space().clone(), v.to_space().clone(), &v.top(), &bottom).unwrap();
        }
        prop_assert_eq!(v.classify().isometric, v.adjoint().contains(&v.inverse()));
        prop_assert_eq!(v.classify().isometric, !perturb);
    }

    #[test]
    fn unitary_relations(seed in 0u64..10_000, dim in 2usize..7, kappa in 0usize..3) {
        let t = triplet(seed, dim, kappa, seed % 2 == 0);
        let Some(tau) = unitary_tau(&t, seed) else { return Ok(()) };
        for r in [tau.clone(), t.extension(&tau).unwrap()] {
            let class = r.classify();
            prop_assert!(class.unitary && class.isometric && class.coisometric);
            let (from, to) = (r.from_space().clone(), r.to_space().clone());
            prop_assert!(r.ker().distance(&from.ortho_companion(&r.dom())) <= 1e-9);
            prop_assert!(r.mul().distance(&to.ortho_companion(&r.ran())) <= 1e-9);
            prop_assert_eq!(r.mul().dim(), r.ker().dim());
        }
    }

    #[test]
    fn first_resolvent_identity(seed in 0u64..10_000, dim in 2usize..7, kappa in 0usize..3) {
        let t = triplet(seed, dim, kappa, false);
        let Some(tau) = unitary_tau(&t, seed) else { return Ok(()) };
        let v = t.extension(&tau).unwrap();
        let (l, m) = (c(0.3, 0.4), c(-1.7, 2.1));
        let (Ok(rl), Ok(rm)) = (v.resolvent(l), v.resolvent(m)) else { return Ok(()) };
        let lhs = &rl - &rm;
        let rhs = rl * rm * (l - m);
        prop_assert!(relative_error(&lhs, &rhs) <= 1e-8);
    }

    #[test]
    fn triplets_verify(seed in 0u64..10_000, dim in 2usize..9, kappa in 0usize..3, degenerate in any::<bool>()) {
        let t = triplet(seed, dim, kappa, degenerate);
        let r = verify_triplet(&t);
        prop_assert!(r.pass, "{r:?}");
        prop_assert_eq!(t.n1.dim() + t.n2.dim(), t.vstar.dim() - t.inst.v.dim());
        prop_assert!(t.v1.inverse_adjoint().distance(&t.v2) <= 1e-9);
        for z in d1_grid(&t) {
            prop_assert_eq!(decomposition_defect(&t, 1, z), (0, 0));
        }
        for z in d2_grid(&t) {
            prop_assert_eq!(decomposition_defect(&t, 2, z), (0, 0));
        }
    }

    #[test]
    fn weyl_functions_carry_boundary_values(seed in 0u64..10_000, dim in 2usize..8, kappa in 0usize..3) {
        let t = triplet(seed, dim, kappa, false);
        for (j, grid) in [(1, d1_grid(&t)), (2, d2_grid(&t))] {
            for z in grid.into_iter().take(6) {
                let Ok(gh) = gamma_hat(&t, j, z) else { continue };
                let (own, other) = if j == 1 { (&t.g1, &t.g2) } else { (&t.g2, &t.g1) };
                let m = weyl(&t, j, z).unwrap();
                prop_assert!(max_abs(&(own * &gh - identity(gh.ncols()))) <= 1e-10 * (1.0 + max_abs(&gh)));
                prop_assert!(max_abs(&(&m * own * &gh - other * &gh)) <= 1e-10 * (1.0 + max_abs(&m)));
            }
        }
        for z in d1_grid(&t) {
            if let Ok(r) = duality_residual(&t, z) {
                prop_assert!(r <= 1e-9);
            }
        }
    }

    #[test]
    fn negative_square_counts_are_bounded(seed in 0u64..10_000, points in 1usize..6) {
        let t = triplet(seed, 5, 1, false);
        let samples: Vec<(C64, CMat)> = d2_grid(&t)
            .into_iter()
            .take(points)
            .filter_map(|z| weyl(&t, 2, z).ok().map(|m| (z, m)))
            .collect();
        let est = neg_squares(&samples, &t.n2, &t.n1).unwrap();
        prop_assert!(est.count <= est.gram.nrows());
    }

    #[test]
    fn krein_formulas_match_inversion(seed in 0u64..10_000, dim in 2usize..7, kappa in 0usize..3) {
        let t = triplet(seed, dim, kappa, seed % 3 == 0);
        let Some(tau) = unitary_tau(&t, seed) else { return Ok(()) };
        let TauParam::Pair { k1, k2 } = TauParam::pair_of(&tau) else { unreachable!() };
        for z in d1_grid(&t).into_iter().chain(d2_grid(&t)).step_by(4) {
            let Ok(direct) = direct_resolvent(&t, &tau, z) else { continue };
            let rel = krein_resolvent(&t, &tau, z).unwrap();
            prop_assert!(relative_error(&rel, &direct) <= 1e-8);
            if let Ok(pair) = krein_resolvent_pair(&t, &k1, &k2, z) {
                prop_assert!(relative_error(&pair, &rel) <= 1e-10);
            }
        }
    }

    #[test]
    fn moebius_maps(seed in 0u64..10_000, dim in 2usize..6, re in -0.9f64..0.9, im in -0.9f64..0.9) {
        let z0 = c(2.0, 0.0);
        let lambda = c(re, im) * 3.0;
        if let Ok(zeta) = param_map(lambda, z0) {
            let back = param_map_inverse(zeta, z0).unwrap();
            prop_assert!((back - lambda).norm() <= 1e-12 * (1.0 + lambda.norm()));
        }
        let t = triplet(seed, dim, 1, false);
        if let Ok(ctx) = MoebiusContext::new(&t, z0) {
            let r = verify_triplet(&ctx.triplet);
            prop_assert!(r.green_residual <= 1e-9);
        }
        if let Some(tau) = unitary_tau(&t, seed) {
            let v = t.extension(&tau).unwrap();
            if let Ok(same) = regular_points_agree(&v, z0, lambda) {
                prop_assert!(same);
            }
        }
    }

    #[test]
    fn colligations(seed in 0u64..10_000, excess in 0usize..3, channels in 1usize..3) {
        let d = random_simple_colligation(2 + excess, excess, channels, channels, seed).unwrap();
        let r = verify_colligation(&d).unwrap();
        prop_assert!(r.max_residual() <= 1e-10);
        for z in [c(0.3, 0.2), c(-0.5, 0.1), c(2.0, -1.0)] {
            if let Ok(res) = char_function_residual(&d, z) {
                prop_assert!(res <= 1e-10);
            }
        }
        let t = triplet(seed, 4, 1, false);
        let l = lift_triplet(&t, &d.state).unwrap();
        prop_assert_eq!(l.exit.htilde.neg_index(), d.state.neg_index() + t.space().neg_index());
    }

    #[test]
    fn report_passes_iff_every_check_passes(seed in 0u64..10_000, dim in 2usize..5) {
        let inst = random_instance(dim, 0, 1, false, seed).unwrap();
        let file = InstanceFile::from_instance(&inst, Some(seed));
        // the zero tolerance is process-wide, so other tests would see a changed one
        let opts = SuiteOptions { suite: Suite::Core, ..SuiteOptions::default() };
        let report = run_file(&file, &opts);
        prop_assert_eq!(report.pass, report.checks.iter().all(|ch| ch.pass));
        prop_assert_eq!(report.failed, report.checks.iter().filter(|ch| !ch.pass).count());
    }
}

/// A nonzero `J`-neutral vector, from one positive and one negative eigendirection of the Gram.
fn neutral_vector(s: &PontryaginSpace) -> CMat {
    let (vals, vecs) = pontryagin_triplets::linalg::hermitian_eigen(s.gram());
    let neg = vals.iter().position(|&x| x < 0.0).unwrap();
    let pos = vals.iter().position(|&x| x > 0.0).unwrap();
    let a = vecs.column(neg) / C64::new((-vals[neg]).sqrt(), 0.0);
    let b = vecs.column(pos) / C64::new(vals[pos].sqrt(), 0.0);
    let mut out = CMat::zeros(s.dim(), 1);
    out.set_column(0, &(a + b));
    out
}
