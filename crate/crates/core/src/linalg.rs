//! Dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance::rank_threshold;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> CMat {
    CMat::zeros(r, c)
}

pub fn diag_real(d: &[f64]) -> CMat {
    let mut m = zeros(d.len(), d.len());
    for (i, &x) in d.iter().enumerate() {
        m[(i, i)] = cr(x);
    }
    m
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    CMat::from_fn(r, cols, |i, j| cr(rows[i][j]))
}

pub fn hstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.nrows(), b.nrows(), "hstack row mismatch");
    let mut m = zeros(a.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((0, a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn vstack(a: &CMat, b: &CMat) -> CMat {
    assert_eq!(a.ncols(), b.ncols(), "vstack column mismatch");
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), 0), b.shape()).copy_from(b);
    m
}

pub fn block_diag(a: &CMat, b: &CMat) -> CMat {
    let mut m = zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    m.view_mut((0, 0), a.shape()).copy_from(a);
    m.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    m
}

pub fn rows(a: &CMat, start: usize, count: usize) -> CMat {
    a.rows(start, count).into_owned()
}

pub fn cols(a: &CMat, start: usize, count: usize) -> CMat {
    a.columns(start, count).into_owned()
}

pub fn fro(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `‖a − b‖_F / max(1, ‖a‖_F, ‖b‖_F)`: absolute for O(1) data, relative above.
pub fn scaled_residual(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape(), "residual shape mismatch");
    let scale = fro(a).max(fro(b)).max(1.0);
    fro(&(a - b)) / scale
}

/// `‖a − b‖_F / (1 + ‖b‖_F)` with `b` the reference value.
pub fn relative_error(a: &CMat, reference: &CMat) -> f64 {
    assert_eq!(a.shape(), reference.shape(), "relative error shape mismatch");
    fro(&(a - reference)) / (1.0 + fro(reference))
}

/// Singular values in descending order together with the full right singular basis.
///
/// Returns `(sigma, u, v)` where `u` spans the range (`m × min(m,n)` after padding)
/// and `v` is `n × n` unitary.
pub fn svd_full(a: &CMat) -> (Vec<f64>, CMat, CMat) {
    let (m, n) = a.shape();
    if n == 0 {
        return (Vec::new(), zeros(m, 0), zeros(0, 0));
    }
    if m == 0 {
        return (vec![0.0; n], zeros(0, n), identity(n));
    }
    let svd = to_faer(a).svd().expect("svd did not converge");
    let (fu, fs, fv) = (svd.U(), svd.S().column_vector(), svd.V());
    let k = m.min(n);
    let mut sigma = vec![0.0; n];
    let mut u = zeros(m, n);
    let mut v = zeros(n, n);
    for j in 0..n {
        if j < k {
            sigma[j] = fs[j].re;
            for r in 0..m {
                u[(r, j)] = fu[(r, j)];
            }
        }
        for r in 0..n {
            v[(r, j)] = fv[(r, j)];
        }
    }
    (sigma, u, v)
}

fn to_faer(a: &CMat) -> faer::Mat<C64> {
    faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

pub fn numerical_rank(sigma: &[f64]) -> usize {
    let smax = sigma.first().copied().unwrap_or(0.0);
    let thr = rank_threshold(smax);
    sigma.iter().filter(|&&s| s > thr).count()
}

pub fn rank(a: &CMat) -> usize {
    let (sigma, _, _) = svd_full(a);
    numerical_rank(&sigma)
}

/// Orthonormal basis of `{x : a x = 0}`.
pub fn null_space(a: &CMat) -> CMat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return identity(n);
    }
    let (sigma, _, v) = svd_full(a);
    let r = numerical_rank(&sigma);
    cols(&v, r, n - r)
}

/// Orthonormal basis of the column span of `a`.
pub fn col_span(a: &CMat) -> CMat {
    if a.ncols() == 0 || a.nrows() == 0 {
        return zeros(a.nrows(), 0);
    }
    let (sigma, u, _) = svd_full(a);
    let r = numerical_rank(&sigma);
    let mut basis = cols(&u, 0, r);
    for k in 0..r {
        normalize_phase(&mut basis, k);
    }
    basis
}

/// Smallest of the `ncols` leading singular values (zero if `a` has more columns than rows).
pub fn sigma_min(a: &CMat) -> f64 {
    let (m, n) = a.shape();
    if n == 0 {
        return f64::INFINITY;
    }
    if n > m {
        return 0.0;
    }
    let (sigma, _, _) = svd_full(a);
    sigma.last().copied().unwrap_or(0.0)
}

pub fn sigma_max(a: &CMat) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    let (sigma, _, _) = svd_full(a);
    sigma.first().copied().unwrap_or(0.0)
}

/// Inverse of a square matrix, rejecting numerically singular input.
pub fn inverse(a: &CMat) -> Option<CMat> {
    let (m, n) = a.shape();
    if m != n {
        return None;
    }
    if n == 0 {
        return Some(zeros(0, 0));
    }
    let smax = sigma_max(a);
    if sigma_min(a) <= rank_threshold(smax) {
        return None;
    }
    a.clone().lu().try_inverse()
}

pub fn try_inverse(a: &CMat, lambda: C64) -> Result<CMat> {
    inverse(a).ok_or(Error::NotInvertible { lambda })
}

/// Rotates column `k` so that its largest entry is real and positive.
pub fn normalize_phase(m: &mut CMat, k: usize) {
    let col = m.column(k);
    let mut best = 0;
    let mut best_abs = 0.0;
    for (i, z) in col.iter().enumerate() {
        // prefer the first entry that is within a whisker of the largest
        if z.norm() > best_abs * (1.0 + 1e-8) {
            best_abs = z.norm();
            best = i;
        }
    }
    if best_abs == 0.0 {
        return;
    }
    let phase = col[best].conj() / best_abs;
    for i in 0..m.nrows() {
        m[(i, k)] *= phase;
    }
}

/// Hermitian eigendecomposition with ascending eigenvalues and phase-normalized eigenvectors.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let sym = (h + h.adjoint()) * cr(0.5);
    let eig = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigendecomposition did not converge");
    let (fs, fu) = (eig.S().column_vector(), eig.U());
    let values: Vec<f64> = (0..n).map(|i| fs[i].re).collect();
    let mut vectors = zeros(n, n);
    for k in 0..n {
        for r in 0..n {
            vectors[(r, k)] = fu[(r, k)];
        }
        normalize_phase(&mut vectors, k);
    }
    (values, vectors)
}

pub fn hermitian_eigenvalues(h: &CMat) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// Eigenvalues of a general square complex matrix, sorted by (re, im).
pub fn eigenvalues(a: &CMat) -> Vec<C64> {
    let n = a.nrows();
    if n == 0 {
        return Vec::new();
    }
    let mut ev = to_faer(a).eigenvalues().expect("eigenvalues did not converge");
    sort_complex(&mut ev);
    ev
}

pub fn sort_complex(v: &mut [C64]) {
    v.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.im.partial_cmp(&b.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Greedy matching of two point sets; returns the largest matched distance,
/// or `None` when the sets have different sizes.
pub fn match_point_sets(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.partial_cmp(&q.1).unwrap_or(std::cmp::Ordering::Equal))?;
        used[j] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
