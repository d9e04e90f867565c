//! Small hand-checkable instances.
//!
//! - `shift2`: `C²` Hilbert, `V e₁ = e₂`.
//! - `neutral2`: `J = diag(1, −1)`, `V` fixes the neutral vector `(1, 1)`; non-simple.
//! - `simple_p2`: `J = diag(1, −1)`, `V e₁ = (√2, 1)`; simple with `κ = 1`.

use crate::boundary::{construct_triplet, BoundaryTriplet, IsometryInstance};
use crate::colligation::UnitaryColligation;
use crate::instance::InstanceFile;
use crate::linalg::{from_real_rows, CMat};
use crate::relation::LinearRelation;
use crate::space::PontryaginSpace;

pub const NAMES: [&str; 3] = ["shift2", "neutral2", "simple_p2"];

fn scalar(x: f64) -> CMat {
    from_real_rows(&[&[x]])
}

pub fn shift2_instance() -> IsometryInstance {
    IsometryInstance::from_map(
        PontryaginSpace::hilbert(2),
        &from_real_rows(&[&[1.0], &[0.0]]),
        &from_real_rows(&[&[0.0], &[1.0]]),
        "shift2",
    )
    .expect("shift is isometric")
}

pub fn neutral2_instance() -> IsometryInstance {
    IsometryInstance::from_map(
        PontryaginSpace::diagonal(&[1.0, -1.0]).expect("signature Gram"),
        &from_real_rows(&[&[1.0], &[1.0]]),
        &from_real_rows(&[&[1.0], &[1.0]]),
        "neutral2",
    )
    .expect("identity on a line is isometric")
}

pub fn simple_p2_instance() -> IsometryInstance {
    IsometryInstance::from_map(
        PontryaginSpace::diagonal(&[1.0, -1.0]).expect("signature Gram"),
        &from_real_rows(&[&[1.0], &[0.0]]),
        &from_real_rows(&[&[2f64.sqrt()], &[1.0]]),
        "simple_p2",
    )
    .expect("maps a unit vector to a unit vector")
}

pub fn shift2() -> BoundaryTriplet {
    construct_triplet(&shift2_instance(), 0).expect("feasible")
}

/// In coordinates `(a, b, c, d) = (f; f')`:
/// `Γ₁ = (c − b)/√2`, `Γ₂ = (2a − b − c)/√2`, giving `M₁ ≡ M₂ ≡ −1`.
pub fn neutral2() -> BoundaryTriplet {
    let s = 1.0 / 2f64.sqrt();
    BoundaryTriplet::from_parts(
        neutral2_instance(),
        PontryaginSpace::hilbert(1),
        PontryaginSpace::hilbert(1),
        from_real_rows(&[&[0.0, -s, s, 0.0]]),
        from_real_rows(&[&[2.0 * s, -s, -s, 0.0]]),
    )
    .expect("shapes match")
}

pub fn simple_p2() -> BoundaryTriplet {
    construct_triplet(&simple_p2_instance(), 0).expect("feasible")
}

pub fn triplet(name: &str) -> Option<BoundaryTriplet> {
    match name {
        "shift2" => Some(shift2()),
        "neutral2" => Some(neutral2()),
        "simple_p2" => Some(simple_p2()),
        _ => None,
    }
}

/// `T = 0, F = G = 1, H = 0` on one-dimensional Hilbert spaces.
pub fn flip() -> UnitaryColligation {
    let h1 = PontryaginSpace::hilbert(1);
    UnitaryColligation::from_blocks(
        h1.clone(),
        h1.clone(),
        h1,
        &scalar(0.0),
        &scalar(1.0),
        &scalar(1.0),
        &scalar(0.0),
    )
    .expect("1x1 blocks")
}

/// `T = 1/2, F = G = √3/2, H = −1/2`.
pub fn rotation() -> UnitaryColligation {
    let s = 3f64.sqrt() / 2.0;
    let h1 = PontryaginSpace::hilbert(1);
    UnitaryColligation::from_blocks(
        h1.clone(),
        h1.clone(),
        h1,
        &scalar(0.5),
        &scalar(s),
        &scalar(s),
        &scalar(-0.5),
    )
    .expect("1x1 blocks")
}

fn graph(t: &BoundaryTriplet, x: f64) -> LinearRelation {
    LinearRelation::graph_of(&scalar(x), t.n2.clone(), t.n1.clone()).expect("1x1")
}

/// The registry entry as it is stored on disk.
pub fn file(name: &str) -> Option<InstanceFile> {
    let t = triplet(name)?;
    let base = InstanceFile::from_instance(&t.inst, None);
    Some(match name {
        "shift2" => base
            .with_tau("graph(4)", &graph(&t, 4.0))
            .with_tau("graph(1)", &graph(&t, 1.0))
            .with_tau("graph(-1)", &graph(&t, -1.0))
            .with_colligation(&flip()),
        "neutral2" => base
            .with_triplet(&t)
            .with_tau("graph(2)", &graph(&t, 2.0))
            .with_tau("graph(i)", &LinearRelation::graph_of(
                &CMat::from_element(1, 1, crate::linalg::c(0.0, 1.0)),
                t.n2.clone(),
                t.n1.clone(),
            )
            .expect("1x1"))
            .with_colligation(&flip()),
        _ => base
            .with_tau("graph(1)", &graph(&t, 1.0))
            .with_tau("graph(3)", &graph(&t, 3.0))
            .with_colligation(&rotation()),
    })
}
