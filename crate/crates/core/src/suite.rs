//! Verification suites over instance files, and the reports they produce.
//!
//! Each check evaluates a residual (or a count) against a threshold. Checks
//! run through [`par_map`] and are sorted by name afterwards, so a report
//! depends only on the input, the seed and the tolerance.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::boundary::{decomposition_defect, BoundaryTriplet};
use crate::colligation::{
    block_law_residuals, char_function_residual, char_neg_squares, compress, compress_coresolvent,
    coresolvent, exit_extension, generalized_resolvent, is_simple_colligation, lift_triplet,
    lifted_kernel_distances, minimal_decompose, random_simple_colligation_between,
    transformed_generalized_resolvent_residual, verify_colligation, UnitaryColligation,
};
use crate::error::{Error, Result};
use crate::generate::{random_tau, rng, TauClass};
use crate::instance::{parse_instance, InstanceFile};
use crate::linalg::{relative_error, C64};
use crate::moebius::{resolvent_law_residual, transform_laws, MoebiusContext, DEFAULT_Z0};
use crate::par::{par_map, Execution};
use crate::relation::LinearRelation;
use crate::resolvent::{
    direct_eigenvalues, direct_resolvent, eigenvalue_agreement, kernel_correspondence,
    krein_resolvent, krein_resolvent_pair, krein_resolvent_unitary, sharp_consistency, TauParam,
};
use crate::space::PontryaginSpace;
use crate::tolerance::{set_zero_tol, DEFAULT_ZERO_TOL};
use crate::weyl::{
    admissible_pairs, d1_grid, d2_grid, duality_residual, identity_residual, is_simple,
    l15_residual, propagation_residual, reflected_sets_distance, simplicity_points,
    weyl_neg_squares, Identity,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    Core,
    Weyl,
    Resolvent,
    Gres,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Core => "core",
            Suite::Weyl => "weyl",
            Suite::Resolvent => "resolvent",
            Suite::Gres => "gres",
            Suite::All => "all",
        }
    }

    fn includes(self, part: Suite) -> bool {
        self == Suite::All || self == part
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Suite::Core),
            "weyl" => Ok(Suite::Weyl),
            "resolvent" => Ok(Suite::Resolvent),
            "gres" => Ok(Suite::Gres),
            "all" => Ok(Suite::All),
            other => Err(Error::Schema(format!(
                "unknown suite {other:?} (expected core, weyl, resolvent, gres or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub suite: Suite,
    pub seed: u64,
    pub tol: f64,
    pub timing: bool,
    pub exec: Execution,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            suite: Suite::All,
            seed: 7,
            tol: DEFAULT_ZERO_TOL,
            timing: false,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    /// `None` when the check could not be evaluated (see `note`) or had nothing to sample.
    pub residual: Option<f64>,
    pub threshold: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub millis: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub instance: String,
    pub suite: String,
    pub seed: u64,
    pub tol: f64,
    pub checks: Vec<Check>,
    pub passed: usize,
    pub failed: usize,
    pub pass: bool,
}

/// One report per file of a directory, in file-name order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateReport {
    pub directory: String,
    pub suite: String,
    pub seed: u64,
    pub tol: f64,
    pub instances: usize,
    pub passed_instances: usize,
    pub failed_instances: usize,
    pub total_checks: usize,
    pub failed_checks: Vec<String>,
    pub reports: Vec<Report>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SuiteOutput {
    Single(Report),
    Directory(AggregateReport),
}

impl SuiteOutput {
    pub fn pass(&self) -> bool {
        match self {
            SuiteOutput::Single(r) => r.pass,
            SuiteOutput::Directory(a) => a.pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_text(&self) -> String {
        match self {
            SuiteOutput::Single(r) => r.to_text(),
            SuiteOutput::Directory(a) => a.to_text(),
        }
    }
}

fn fmt_residual(r: Option<f64>) -> String {
    r.map_or_else(|| "-".to_string(), |x| format!("{x:.3e}"))
}

impl Report {
    fn assemble(instance: String, opts: &SuiteOptions, mut checks: Vec<Check>) -> Self {
        checks.sort_by(|a, b| a.name.cmp(&b.name));
        let failed = checks.iter().filter(|c| !c.pass).count();
        Report {
            instance,
            suite: opts.suite.name().to_string(),
            seed: opts.seed,
            tol: opts.tol,
            passed: checks.len() - failed,
            failed,
            pass: failed == 0,
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "instance {}  suite {}  seed {}  tol {:e}",
            self.instance, self.suite, self.seed, self.tol
        );
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        for c in &self.checks {
            let _ = write!(
                out,
                "{}  {:width$}  residual {:>10}  threshold {:.1e}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                fmt_residual(c.residual),
                c.threshold,
            );
            if let Some(ms) = c.millis {
                let _ = write!(out, "  {ms:.2} ms");
            }
            if let Some(note) = &c.note {
                let _ = write!(out, "  ({note})");
            }
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "{}: {} passed, {} failed",
            if self.pass { "PASS" } else { "FAIL" },
            self.passed,
            self.failed
        );
        out
    }
}

impl AggregateReport {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "directory {}  suite {}  seed {}  tol {:e}",
            self.directory, self.suite, self.seed, self.tol
        );
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{}  {}  {}/{} checks",
                if r.pass { "PASS" } else { "FAIL" },
                r.instance,
                r.passed,
                r.checks.len()
            );
        }
        for name in &self.failed_checks {
            let _ = writeln!(out, "failed: {name}");
        }
        let _ = writeln!(
            out,
            "{}: {} of {} instances passed, {} checks",
            if self.pass { "PASS" } else { "FAIL" },
            self.passed_instances,
            self.instances,
            self.total_checks
        );
        out
    }
}

/// Result of evaluating a check body: the worst residual and how many points it covered.
struct Measured {
    residual: f64,
    samples: usize,
    skipped: usize,
}

impl Measured {
    fn single(residual: f64) -> Self {
        Measured {
            residual,
            samples: 1,
            skipped: 0,
        }
    }
}

type Body<'a> = Box<dyn Fn() -> Result<Measured> + Send + Sync + 'a>;

struct Pending<'a> {
    name: String,
    threshold: f64,
    body: Body<'a>,
}

/// Errors that only say a sample point is not admissible for this formula.
fn is_point_error(e: &Error) -> bool {
    matches!(
        e,
        Error::RegionViolation { .. }
            | Error::PencilSingular { .. }
            | Error::NotInvertible { .. }
            | Error::SingularAtLambda { .. }
            | Error::GammaNotInvertible { .. }
    )
}

/// Worst value of `f` over `points`, skipping points the formula does not apply to.
fn worst_over<P: Copy>(points: &[P], f: impl Fn(P) -> Result<f64>) -> Result<Measured> {
    let mut m = Measured {
        residual: 0.0,
        samples: 0,
        skipped: 0,
    };
    let mut first_err = None;
    for &p in points {
        match f(p) {
            Ok(r) => {
                m.residual = if r.is_nan() { f64::INFINITY } else { m.residual.max(r) };
                m.samples += 1;
            }
            Err(e) if is_point_error(&e) => {
                m.skipped += 1;
                first_err.get_or_insert(e);
            }
            Err(e) => return Err(e),
        }
    }
    match first_err {
        Some(e) if m.samples == 0 => Err(e),
        _ => Ok(m),
    }
}

fn run_pending(p: &Pending<'_>, timing: bool) -> Check {
    let start = Instant::now();
    let outcome = (p.body)();
    let millis = timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let (residual, pass, note) = match outcome {
        Ok(m) if m.samples == 0 => (None, true, Some("no admissible sample points".to_string())),
        Ok(m) => {
            let note = (m.skipped > 0).then(|| format!("{} of {} points skipped", m.skipped, m.skipped + m.samples));
            (Some(m.residual), m.residual <= p.threshold, note)
        }
        Err(e) => (None, false, Some(e.to_string())),
    };
    Check {
        name: p.name.clone(),
        residual,
        threshold: p.threshold,
        pass,
        note,
        millis,
    }
}

fn failed_check(name: &str, e: &Error) -> Check {
    Check {
        name: name.to_string(),
        residual: None,
        threshold: 0.0,
        pass: false,
        note: Some(e.to_string()),
        millis: None,
    }
}

fn count(x: usize) -> f64 {
    x as f64
}

/// Taus stored in the file, or two seeded random ones.
fn taus_for(file: &InstanceFile, t: &BoundaryTriplet, seed: u64) -> Result<Vec<(String, LinearRelation)>> {
    let stored = file.taus(t)?;
    if !stored.is_empty() {
        return Ok(stored);
    }
    let mut r = rng(seed);
    let unitary = random_tau(&mut r, &t.n2, &t.n1, TauClass::Unitary)
        .or_else(|_| random_tau(&mut r, &t.n2, &t.n1, TauClass::Arbitrary))?;
    let other = random_tau(&mut r, &t.n2, &t.n1, TauClass::Arbitrary)?;
    Ok(vec![("random-a".into(), unitary), ("random-b".into(), other)])
}

/// The stored colligation, or a seeded simple one with a one-dimensional Hilbert state space.
fn colligation_for(file: &InstanceFile, t: &BoundaryTriplet, seed: u64) -> Result<UnitaryColligation> {
    match file.colligation(t) {
        Some(d) => d,
        None => random_simple_colligation_between(&PontryaginSpace::hilbert(1), &t.n2, &t.n1, seed),
    }
}

/// Pairs `(gᵢ, g_{i+5})` from one grid, for laws relating two points of a region.
fn grid_pairs(grid: &[C64], count: usize) -> Vec<(C64, C64)> {
    let n = grid.len();
    (0..n.min(count)).map(|i| (grid[i], grid[(i + 5) % n])).filter(|(a, b)| a != b).collect()
}

fn both_grids(t: &BoundaryTriplet) -> Vec<C64> {
    let mut pts = d1_grid(t);
    pts.extend(d2_grid(t));
    pts
}

fn reflect(points: &[C64]) -> Vec<C64> {
    points.iter().map(|z| C64::new(1.0, 0.0) / z.conj()).collect()
}

fn push<'a>(out: &mut Vec<Pending<'a>>, name: impl Into<String>, threshold: f64, body: impl Fn() -> Result<Measured> + Send + Sync + 'a) {
    out.push(Pending {
        name: name.into(),
        threshold,
        body: Box::new(body),
    });
}

struct Context {
    t: BoundaryTriplet,
    taus: Vec<(String, LinearRelation)>,
    colligation: Result<UnitaryColligation>,
    d1: Vec<C64>,
    d2: Vec<C64>,
}

fn core_checks<'a>(cx: &'a Context, tol: f64, out: &mut Vec<Pending<'a>>) {
    let t = &cx.t;
    push(out, "green-identity", tol, move || Ok(Measured::single(t.green_residual())));
    push(out, "boundary-surjectivity", 0.0, move || {
        let r = t.verify();
        Ok(Measured::single(count(r.surjectivity_rank.abs_diff(r.expected_rank))))
    });
    push(out, "boundary-kernel", tol, move || Ok(Measured::single(t.verify().kernel_distance)));
    push(out, "kernel-extensions-duality", tol, move || {
        Ok(Measured::single(t.v1.inverse_adjoint().distance(&t.v2)))
    });
    push(out, "exceptional-sets-reflected", 100.0 * tol, move || {
        Ok(Measured::single(reflected_sets_distance(t).unwrap_or(f64::INFINITY)))
    });
    for (name, j, grid) in [("defect-decomposition-outer", 1, &cx.d1), ("defect-decomposition-inner", 2, &cx.d2)] {
        push(out, name, 0.0, move || {
            worst_over(grid, |z| {
                let (excess, meet) = decomposition_defect(t, j, z);
                Ok(count(excess.unsigned_abs() + meet))
            })
        });
    }
    for (label, tau) in &cx.taus {
        push(out, format!("extension-duality[{label}]"), tol, move || {
            let r = crate::boundary::classify_extension_correspondence(t, tau)?;
            Ok(Measured::single(r.duality_distance))
        });
        push(out, format!("extension-correspondence[{label}]"), 0.0, move || {
            let r = crate::boundary::classify_extension_correspondence(t, tau)?;
            Ok(Measured::single(count(r.items.iter().filter(|i| !i.agree).count())))
        });
    }
    if let Ok(d) = &cx.colligation {
        let threshold = verify_colligation(d).map(|r| r.threshold).unwrap_or(tol);
        push(out, "colligation-unitarity", threshold, move || {
            Ok(Measured::single(verify_colligation(d)?.max_residual()))
        });
    }
}

fn weyl_checks<'a>(cx: &'a Context, tol: f64, seed: u64, out: &mut Vec<Pending<'a>>) {
    let t = &cx.t;
    for which in Identity::ALL {
        push(out, format!("weyl-identity-{}", which.name()), 10.0 * tol, move || {
            worst_over(&admissible_pairs(t, which, 20), |(l, m)| identity_residual(t, which, l, m))
        });
    }
    for (name, j, grid) in [("gamma-propagation-outer", 1, &cx.d1), ("gamma-propagation-inner", 2, &cx.d2)] {
        push(out, name, 10.0 * tol, move || {
            worst_over(&grid_pairs(grid, 20), |(l, m)| propagation_residual(t, j, l, m))
        });
    }
    push(out, "weyl-sharp-duality", tol, move || worst_over(&cx.d1, |z| duality_residual(t, z)));
    for (name, j, grid) in [("sharp-gamma-outer", 1, &cx.d1), ("sharp-gamma-inner", 2, &cx.d2)] {
        push(out, name, 10.0 * tol, move || worst_over(grid, |z| l15_residual(t, j, z)));
    }
    let kappa = t.inst.space.neg_index();
    push(out, "weyl-neg-squares-bound", 0.0, move || {
        let n = weyl_neg_squares(t, seed)?.count;
        Ok(Measured::single(count(n.saturating_sub(kappa))))
    });
    if is_simple(&t.inst, &simplicity_points()) {
        push(out, "weyl-neg-squares-simple", 0.0, move || {
            Ok(Measured::single(count(weyl_neg_squares(t, seed)?.count.abs_diff(kappa))))
        });
    }
    let z0 = C64::new(DEFAULT_Z0, 0.0);
    for (name, pick) in [("moebius-weyl-law", 0usize), ("moebius-gamma-law", 1usize)] {
        push(out, name, tol, move || {
            let ctx = MoebiusContext::new(t, z0)?;
            let pts: Vec<C64> = both_grids(t)
                .into_iter()
                .filter(|&z| transform_laws(&ctx, z).is_ok())
                .take(10)
                .collect();
            worst_over(&pts, |z| {
                let r = transform_laws(&ctx, z)?;
                Ok(if pick == 0 { r.m_law } else { r.gamma_law })
            })
        });
    }
}

const SHIFT_POINTS: [(f64, f64); 4] = [(DEFAULT_Z0, 0.0), (0.0, DEFAULT_Z0), (-DEFAULT_Z0, 0.0), (0.0, -DEFAULT_Z0)];

fn resolvent_checks<'a>(cx: &'a Context, tol: f64, out: &mut Vec<Pending<'a>>) {
    let t = &cx.t;
    let pts = both_grids(t);
    let square = t.n1.dim() == t.n2.dim();
    for (label, tau) in &cx.taus {
        // resolvents exist only when dim V_τ = dim ℋ
        let resolvable = t.inst.v.dim() + tau.dim() == t.dim();
        push(out, format!("eigenvalues-from-pencil[{label}]"), 100.0 * tol, move || {
            Ok(Measured::single(eigenvalue_agreement(t, tau)?))
        });
        push(out, format!("kernel-correspondence[{label}]"), 100.0 * tol, move || {
            // away from the spectrum both kernels are trivial; test a regular point too
            let mut at = match direct_eigenvalues(t, tau) {
                Ok(eig) => eig,
                // every point of some region is an eigenvalue: sample both regions
                Err(Error::DegeneratePencil) => cx.d1.iter().chain(&cx.d2).take(8).copied().collect(),
                Err(e) => return Err(e),
            };
            at.extend(cx.d1.first().copied());
            worst_over(&at, |z| kernel_correspondence(t, tau, z))
        });
        if !resolvable {
            continue;
        }
        let pts = pts.clone();
        push(out, format!("krein-resolvent[{label}]"), 10.0 * tol, move || {
            worst_over(&pts, |z| {
                let direct = direct_resolvent(t, tau, z)?;
                Ok(relative_error(&krein_resolvent(t, tau, z)?, &direct))
            })
        });
        if square && tau.dim() == t.n1.dim() {
            let pts = both_grids(t);
            push(out, format!("krein-resolvent-pair[{label}]"), 10.0 * tol, move || {
                let TauParam::Pair { k1, k2 } = TauParam::pair_of(tau) else {
                    unreachable!("pair_of returns a pair")
                };
                worst_over(&pts, |z| {
                    let direct = direct_resolvent(t, tau, z)?;
                    Ok(relative_error(&krein_resolvent_pair(t, &k1, &k2, z)?, &direct))
                })
            });
        }
        if tau.is_operator() && tau.dim() == t.n2.dim() && tau.classify().unitary {
            push(out, format!("krein-resolvent-unitary[{label}]"), 10.0 * tol, move || {
                let u = tau.as_matrix()?;
                worst_over(&cx.d1, |z| {
                    let direct = direct_resolvent(t, tau, z)?;
                    Ok(relative_error(&krein_resolvent_unitary(t, &u, z)?, &direct))
                })
            });
        }
        push(out, format!("sharp-consistency[{label}]"), 10.0 * tol, move || {
            worst_over(&cx.d2, |z| sharp_consistency(t, tau, z))
        });
        let pts = both_grids(t);
        push(out, format!("moebius-resolvent-law[{label}]"), 0.1 * tol, move || {
            let vt = t.extension(tau)?.as_matrix()?;
            // the default shift point may be an eigenvalue of V_τ; move along the circle |z₀| = 2 then
            let z0 = SHIFT_POINTS
                .iter()
                .map(|&(re, im)| C64::new(re, im))
                .find(|&z0| crate::moebius::transform_matrix(&vt, z0).is_ok())
                .ok_or(Error::SingularShift {
                    z0: C64::new(DEFAULT_Z0, 0.0),
                    reason: "every candidate shift point is an eigenvalue",
                })?;
            worst_over(&pts, |z| resolvent_law_residual(&vt, z0, z))
        });
    }
}

fn gres_checks<'a>(cx: &'a Context, tol: f64, seed: u64, out: &mut Vec<Pending<'a>>) {
    let t = &cx.t;
    let d = match &cx.colligation {
        Ok(d) => d,
        Err(e) => {
            let msg = e.to_string();
            push(out, "colligation", 0.0, move || Err(Error::InfeasibleParameters(msg.clone())));
            return;
        }
    };
    let z0 = C64::new(DEFAULT_Z0, 0.0);
    push(out, "colligation-char-forms", 10.0 * tol, move || {
        let mut pts = crate::weyl::disk_grid();
        pts.extend(reflect(&crate::weyl::disk_grid()));
        worst_over(&pts, |z| char_function_residual(d, z))
    });
    let lifted = lift_triplet(t, &d.state);
    let lifted = match lifted {
        Ok(l) => l,
        Err(e) => {
            let msg = e.to_string();
            push(out, "lifted-triplet", 0.0, move || Err(Error::InfeasibleParameters(msg.clone())));
            return;
        }
    };
    let l = std::sync::Arc::new(lifted);
    let vt = exit_extension(&l, d);
    let vt = std::sync::Arc::new(vt);
    for (name, pick) in [("lifted-gamma-law", 0usize), ("lifted-weyl-law", 1usize)] {
        let l = l.clone();
        let pts = both_grids(t);
        push(out, name, tol, move || {
            worst_over(&pts, |z| {
                let r = block_law_residuals(&l, z)?;
                Ok(if pick == 0 { r.gamma } else { r.weyl })
            })
        });
    }
    {
        let l = l.clone();
        push(out, "lifted-kernel-extensions", tol, move || {
            let (a, b) = lifted_kernel_distances(&l)?;
            Ok(Measured::single(a.max(b)))
        });
    }
    for (name, grid) in [("generalized-resolvent-outer", &cx.d1), ("generalized-resolvent-inner", &cx.d2)] {
        let (l, vt) = (l.clone(), vt.clone());
        push(out, name, 10.0 * tol, move || {
            let vt = vt.as_ref().as_ref().map_err(Clone::clone)?;
            worst_over(grid, |z| {
                let oracle = compress(vt, z, &l.exit)?;
                Ok(relative_error(&generalized_resolvent(t, d, z)?, &oracle))
            })
        });
    }
    for (name, grid) in [("coresolvent-outer", &cx.d1), ("coresolvent-inner", &cx.d2)] {
        let (l, vt) = (l.clone(), vt.clone());
        let pts = reflect(grid).into_iter().map(|z| z.conj()).collect::<Vec<_>>();
        push(out, name, 10.0 * tol, move || {
            let vt = vt.as_ref().as_ref().map_err(Clone::clone)?;
            worst_over(&pts, |z| {
                let oracle = compress_coresolvent(vt, z, &l.exit)?;
                Ok(relative_error(&coresolvent(t, d, z)?, &oracle))
            })
        });
    }
    {
        let (l, vt) = (l.clone(), vt.clone());
        push(out, "simple-iff-minimal", 0.0, move || {
            let vt = vt.as_ref().as_ref().map_err(Clone::clone)?;
            let dec = minimal_decompose(vt, &l.exit)?;
            Ok(Measured::single(if dec.minimal == is_simple_colligation(d)? { 0.0 } else { 1.0 }))
        });
    }
    {
        let (l, vt) = (l.clone(), vt.clone());
        let pts = both_grids(t);
        push(out, "minimal-part-compression", tol, move || {
            let vt = vt.as_ref().as_ref().map_err(Clone::clone)?;
            let dec = minimal_decompose(vt, &l.exit)?;
            worst_over(&pts, |z| dec.compression_residual(z))
        });
    }
    if is_simple_colligation(d).unwrap_or(false) {
        let state_neg = d.state.neg_index();
        push(out, "char-neg-squares", 0.0, move || {
            Ok(Measured::single(count(char_neg_squares(d, seed)?.count.abs_diff(state_neg))))
        });
    }
    {
        let l = l.clone();
        let pts = both_grids(t);
        push(out, "moebius-generalized-resolvent", 10.0 * tol, move || {
            worst_over(&pts, |z| transformed_generalized_resolvent_residual(&l, d, z0, z))
        });
    }
}

/// Runs the selected suite on one parsed instance file.
pub fn run_file(file: &InstanceFile, opts: &SuiteOptions) -> Report {
    set_zero_tol(opts.tol);
    let label = file.label.clone();
    let t = match file.triplet() {
        Ok(t) => t,
        Err(e) => return Report::assemble(label, opts, vec![failed_check("triplet", &e)]),
    };
    let taus = match taus_for(file, &t, opts.seed) {
        Ok(x) => x,
        Err(e) => return Report::assemble(label, opts, vec![failed_check("taus", &e)]),
    };
    let colligation = colligation_for(file, &t, opts.seed);
    let cx = Context {
        d1: d1_grid(&t),
        d2: d2_grid(&t),
        t,
        taus,
        colligation,
    };
    let mut pending = Vec::new();
    let tol = opts.tol;
    if opts.suite.includes(Suite::Core) {
        core_checks(&cx, tol, &mut pending);
    }
    if opts.suite.includes(Suite::Weyl) {
        weyl_checks(&cx, tol, opts.seed, &mut pending);
    }
    if opts.suite.includes(Suite::Resolvent) {
        resolvent_checks(&cx, tol, &mut pending);
    }
    if opts.suite.includes(Suite::Gres) {
        gres_checks(&cx, tol, opts.seed, &mut pending);
    }
    let checks = par_map(&pending, opts.exec, |p| run_pending(p, opts.timing));
    Report::assemble(label, opts, checks)
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

/// Runs a suite on an instance file or on every `*.json` file of a directory.
///
/// A single file that does not parse is an error; inside a directory it becomes a failed report.
pub fn run_suite(path: impl AsRef<Path>, opts: &SuiteOptions) -> Result<SuiteOutput> {
    let path = path.as_ref();
    if !path.is_dir() {
        let file = parse_instance(path)?;
        return Ok(SuiteOutput::Single(run_file(&file, opts)));
    }
    let files = json_files(path)?;
    let reports: Vec<Report> = files
        .iter()
        .map(|p| match parse_instance(p) {
            Ok(file) => run_file(&file, opts),
            Err(e) => {
                let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                Report::assemble(name, opts, vec![failed_check("parse", &e)])
            }
        })
        .collect();
    let passed_instances = reports.iter().filter(|r| r.pass).count();
    let failed_checks = reports
        .iter()
        .flat_map(|r| r.checks.iter().filter(|c| !c.pass).map(move |c| format!("{}: {}", r.instance, c.name)))
        .collect();
    Ok(SuiteOutput::Directory(AggregateReport {
        directory: path.display().to_string(),
        suite: opts.suite.name().to_string(),
        seed: opts.seed,
        tol: opts.tol,
        instances: reports.len(),
        passed_instances,
        failed_instances: reports.len() - passed_instances,
        total_checks: reports.iter().map(|r| r.checks.len()).sum(),
        failed_checks,
        pass: passed_instances == reports.len(),
        reports,
    }))
}
