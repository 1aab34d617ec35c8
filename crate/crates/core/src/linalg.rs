//! Small complex linear-algebra helpers.
//!
//! Dense matrices use `nalgebra::DMatrix<Complex64>`. The per-sample hot paths
//! (block determinants, inverse columns) work on tiny row-major buffers held in
//! a `SmallVec` so that a Monte-Carlo pass does not allocate per realization.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use smallvec::SmallVec;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Inline storage for per-sample scratch buffers (up to a 4x4 block).
pub(crate) type Scratch = SmallVec<[C64; 16]>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Largest absolute elementwise deviation between `m` and `m^H`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(m + m^H) / 2`. Exactly Hermitian in floating point.
pub fn symmetrize(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = SymmetricEigen::new(symmetrize(m));
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Real part of `h^H k h`.
#[inline]
pub fn quad_form(k: &CMatrix, h: &[C64]) -> f64 {
    let n = h.len();
    let mut acc = 0.0;
    for j in 0..n {
        let mut col = ZERO;
        for i in 0..n {
            col += h[i].conj() * k[(i, j)];
        }
        acc += (col * h[j]).re;
    }
    acc
}

/// `m * x` for a dense matrix and a slice vector.
#[inline]
pub(crate) fn mat_vec(m: &CMatrix, x: &[C64], out: &mut [C64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = ZERO;
        for (j, xj) in x.iter().enumerate() {
            acc += m[(i, j)] * xj;
        }
        *o = acc;
    }
}

/// `v v^H` scaled by `scale`.
pub fn outer_scaled(v: &CVector, scale: f64) -> CMatrix {
    let n = v.len();
    CMatrix::from_fn(n, n, |i, j| v[i] * v[j].conj() * scale)
}

/// A factor `L` with `L L^H = m` for a Hermitian PSD matrix.
///
/// Cholesky when it succeeds; otherwise the eigen square root
/// `V diag(sqrt(max(lambda, 0)))`, which also covers singular inputs.
pub fn psd_factor(m: &CMatrix) -> CMatrix {
    if m.iter().all(|z| *z == ZERO) {
        return CMatrix::zeros(m.nrows(), m.ncols());
    }
    if let Some(chol) = m.clone().cholesky() {
        let l = chol.l();
        if l.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return l;
        }
    }
    let (values, vectors) = hermitian_eigen(m);
    let n = m.nrows();
    CMatrix::from_fn(n, n, |i, j| vectors[(i, j)] * values[j].max(0.0).sqrt())
}

/// LU factorization with partial pivoting of a row-major `n x n` buffer, in place.
///
/// Returns the row permutation sign, or `None` if a pivot is exactly zero.
pub(crate) fn lu_in_place(a: &mut [C64], n: usize, perm: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for (i, p) in perm.iter_mut().enumerate() {
        *p = i;
    }
    for k in 0..n {
        let mut piv = k;
        let mut best = a[k * n + k].norm();
        for r in (k + 1)..n {
            let v = a[r * n + k].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return None;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            perm.swap(k, piv);
            sign = -sign;
        }
        let pivot = a[k * n + k];
        for r in (k + 1)..n {
            let factor = a[r * n + k] / pivot;
            a[r * n + k] = factor;
            for c in (k + 1)..n {
                let upd = factor * a[k * n + c];
                a[r * n + c] -= upd;
            }
        }
    }
    Some(sign)
}

/// Determinant from an in-place LU result.
pub(crate) fn lu_det(lu: &[C64], n: usize, sign: f64) -> C64 {
    let mut d = C64::new(sign, 0.0);
    for k in 0..n {
        d *= lu[k * n + k];
    }
    d
}

/// Solves `A x = rhs` given the in-place LU of `A`; `rhs` is overwritten with `x`.
pub(crate) fn lu_solve(lu: &[C64], n: usize, perm: &[usize], rhs: &mut [C64]) {
    let mut y: Scratch = perm.iter().map(|&p| rhs[p]).collect();
    for i in 0..n {
        for j in 0..i {
            let upd = lu[i * n + j] * y[j];
            y[i] -= upd;
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            let upd = lu[i * n + j] * y[j];
            y[i] -= upd;
        }
        y[i] /= lu[i * n + i];
    }
    rhs.copy_from_slice(&y);
}

/// Determinant of a dense matrix via the same pivoted LU used in the hot paths.
pub fn det_lu(m: &CMatrix) -> C64 {
    let n = m.nrows();
    let mut buf: Vec<C64> = (0..n * n).map(|k| m[(k / n, k % n)]).collect();
    let mut perm = vec![0usize; n];
    match lu_in_place(&mut buf, n, &mut perm) {
        Some(sign) => lu_det(&buf, n, sign),
        None => ZERO,
    }
}

/// Frobenius norm.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `max |a_ij - b_ij|`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn lu_det_matches_cofactor_3x3() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0, 0.0),
                c(1.0, -1.0),
                c(0.5, 0.2),
                c(0.0, 3.0),
                c(1.0, 0.0),
                c(-1.0, 0.5),
                c(4.0, 1.0),
                c(0.0, 0.0),
                c(2.0, -2.0),
            ],
        );
        let cof = m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]);
        assert!((det_lu(&m) - cof).norm() < 1e-12);
    }

    #[test]
    fn lu_solve_inverts() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(3.0, 0.0), c(1.0, 1.0)]);
        let mut buf: Vec<C64> = vec![m[(0, 0)], m[(0, 1)], m[(1, 0)], m[(1, 1)]];
        let mut perm = [0usize; 2];
        let sign = lu_in_place(&mut buf, 2, &mut perm).unwrap();
        let mut x = [c(1.0, 0.0), c(0.0, -1.0)];
        lu_solve(&buf, 2, &perm, &mut x);
        let back = &m * CVector::from_column_slice(&x);
        assert!((back[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((back[1] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((lu_det(&buf, 2, sign) - (m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)])).norm() < 1e-14);
    }

    #[test]
    fn psd_factor_handles_singular() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)]);
        let l = psd_factor(&m);
        assert!(max_abs_diff(&(&l * l.adjoint()), &m) < 1e-12);
    }
}
