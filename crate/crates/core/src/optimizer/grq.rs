//! Generalized Rayleigh quotient maximization.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, hermitian_eigenvalues, symmetrize, CMatrix, CVector, C64};

/// Smallest admissible eigenvalue of the denominator.
pub const MIN_DENOMINATOR_EIGENVALUE: f64 = 1e-12;

/// Maximize `e^H A e / e^H B e` over unit vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct GrqProblem {
    pub numerator: CMatrix,
    pub denominator: CMatrix,
}

impl GrqProblem {
    pub fn new(numerator: CMatrix, denominator: CMatrix) -> Result<Self> {
        let n = numerator.nrows();
        if numerator.ncols() != n {
            return Err(Error::dims("numerator cols", n, numerator.ncols()));
        }
        if denominator.nrows() != n || denominator.ncols() != n {
            return Err(Error::dims("denominator", n, denominator.nrows()));
        }
        let min = hermitian_eigenvalues(&denominator)[0];
        if !(min >= MIN_DENOMINATOR_EIGENVALUE) {
            return Err(Error::SingularDenominator { min_eigenvalue: min });
        }
        Ok(GrqProblem {
            numerator: symmetrize(&numerator),
            denominator: symmetrize(&denominator),
        })
    }

    pub fn quotient(&self, e: &CVector) -> f64 {
        rayleigh_quotient(&self.numerator, &self.denominator, e)
    }
}

pub fn rayleigh_quotient(a: &CMatrix, b: &CMatrix, e: &CVector) -> f64 {
    let num = (e.adjoint() * a * e)[(0, 0)].re;
    let den = (e.adjoint() * b * e)[(0, 0)].re;
    num / den
}

/// Power of two close to `max |m_ij|`, so rescaling by it is exact.
fn binary_scale(m: &CMatrix) -> f64 {
    let max = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 || !max.is_finite() {
        return 1.0;
    }
    2f64.powi(-(max.log2().round() as i32))
}

/// Rotates `e` so its largest-magnitude entry (first on ties) is real and nonnegative.
pub fn fix_phase(e: &mut CVector) {
    let mut idx = 0;
    let mut best = -1.0;
    for (i, z) in e.iter().enumerate() {
        if z.norm() > best {
            best = z.norm();
            idx = i;
        }
    }
    if best <= 0.0 {
        return;
    }
    let rot = e[idx].conj() / best;
    for z in e.iter_mut() {
        *z *= rot;
    }
    e[idx] = C64::new(best, 0.0);
}

/// Principal generalized eigenvector by whitening: `B = L L^H`, top eigenvector
/// `v` of `L^-1 A L^-H`, `e = L^-H v` normalized. Returns `(e*, lambda*)`.
///
/// When the whitened matrix is a multiple of the identity every direction is
/// optimal and the first basis vector is returned.
pub fn grq_max(p: &GrqProblem) -> Result<(CVector, f64)> {
    let n = p.numerator.nrows();
    let scale = binary_scale(&p.denominator);
    let a = &p.numerator * C64::new(scale, 0.0);
    let b = &p.denominator * C64::new(scale, 0.0);
    let chol = b.cholesky().ok_or(Error::SingularDenominator {
        min_eigenvalue: hermitian_eigenvalues(&p.denominator)[0],
    })?;
    let l = chol.l();
    let la = l
        .solve_lower_triangular(&a)
        .ok_or(Error::SingularDenominator { min_eigenvalue: 0.0 })?;
    let whitened = l
        .solve_lower_triangular(&la.adjoint())
        .ok_or(Error::SingularDenominator { min_eigenvalue: 0.0 })?
        .adjoint();
    let (values, vectors) = hermitian_eigen(&whitened);
    let top = values[n - 1];
    let spread = top - values[0];
    let mut e = if spread <= 1e-12 * top.abs().max(1.0) {
        let mut e = CVector::zeros(n);
        e[0] = C64::new(1.0, 0.0);
        e
    } else {
        let v = vectors.column(n - 1).into_owned();
        l.adjoint()
            .solve_upper_triangular(&v)
            .ok_or(Error::SingularDenominator { min_eigenvalue: 0.0 })?
    };
    let norm = e.norm();
    e /= C64::new(norm, 0.0);
    fix_phase(&mut e);
    let lambda = p.quotient(&e);
    Ok((e, lambda))
}
