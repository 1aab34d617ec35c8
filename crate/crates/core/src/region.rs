//! Secrecy rate formulas.
//!
//! Rates are in bits per channel use. For an encoding order `(pi1, pi2)` the
//! statistical-CSIT bounds are
//!
//! ```text
//! R_pi1 = ( E_pi1[log2(1 + h^H (K1 + K2) h)] - D )^+
//! R_pi2 = ( E_pi2[log2(1 + h^H (K1 + K2) h)] - D )^+
//! D     = E_pi2[log2(1 + h^H K1 h)] + E_pi1[log2 det M(b, h)]
//!
//! M = [ I + b K2 b^H            (T1^H + b K2) h       ]
//!     [ h^H (T1 + K2 b^H)       1 + h^H (K1 + K2) h   ]
//! ```
//!
//! with `K1 = T1 T1^H` the covariance of the first-encoded user and `b` the
//! LA-GPC inflation factor. The same penalty `D` is subtracted from both bounds.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use crate::channel::{ChannelStats, EncodingOrder, InflationFactor, TransmitCovariances, User};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigenvalues, lu_det, lu_in_place, lu_solve, mat_vec, quad_form, CMatrix, Scratch, C64, ONE, ZERO,
};
use crate::sampling::{mc_estimate, mc_estimates, mc_estimates_paired, Estimate, FadingBatch};

/// Imaginary part of `det(M)` tolerated before it is reported as an error.
pub const DET_IMAG_TOL: f64 = 1e-9;

/// Rate-region schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    StatisticalCsit,
    FullCsit,
    TimeSharing,
    InterferenceAsNoise,
    MeanMmseB,
    LowSnr,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::StatisticalCsit,
        Scheme::FullCsit,
        Scheme::TimeSharing,
        Scheme::InterferenceAsNoise,
        Scheme::MeanMmseB,
        Scheme::LowSnr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::StatisticalCsit => "statistical-csit",
            Scheme::FullCsit => "full-csit",
            Scheme::TimeSharing => "time-sharing",
            Scheme::InterferenceAsNoise => "interference-as-noise",
            Scheme::MeanMmseB => "mean-mmse-b",
            Scheme::LowSnr => "low-snr",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::invalid("scheme", format!("unknown scheme `{s}`")))
    }
}

/// Provenance and Monte-Carlo diagnostics of a rate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct RateMeta {
    pub scheme: Scheme,
    /// Power fraction of the first-encoded user (time fraction for time sharing).
    pub alpha: Option<f64>,
    pub order: Option<EncodingOrder>,
    /// Time-sharing power split `beta`.
    pub share: Option<f64>,
    pub r1_stderr: f64,
    pub r2_stderr: f64,
    pub b_iterations: usize,
    pub b_residual: f64,
    pub converged: bool,
}

impl RateMeta {
    pub fn new(scheme: Scheme) -> Self {
        RateMeta {
            scheme,
            alpha: None,
            order: None,
            share: None,
            r1_stderr: 0.0,
            r2_stderr: 0.0,
            b_iterations: 0,
            b_residual: 0.0,
            converged: true,
        }
    }

    pub fn with_inflation(mut self, b: &InflationFactor) -> Self {
        self.b_iterations = b.iterations;
        self.b_residual = b.residual;
        self.converged = b.converged;
        self
    }
}

/// A `(R1, R2)` pair indexed by user label (not by encoding position).
#[derive(Debug, Clone, PartialEq)]
pub struct RatePair {
    pub r1: f64,
    pub r2: f64,
    pub meta: RateMeta,
}

impl RatePair {
    /// Clamps both rates at zero.
    pub fn new(r1: f64, r2: f64, meta: RateMeta) -> Self {
        RatePair {
            r1: r1.max(0.0),
            r2: r2.max(0.0),
            meta,
        }
    }

    pub fn rate(&self, u: User) -> f64 {
        match u {
            User::One => self.r1,
            User::Two => self.r2,
        }
    }

    pub fn stderr(&self, u: User) -> f64 {
        match u {
            User::One => self.meta.r1_stderr,
            User::Two => self.meta.r2_stderr,
        }
    }

    fn from_positions(first: Estimate, second: Estimate, order: EncodingOrder, mut meta: RateMeta) -> Self {
        let (e1, e2) = match order.first() {
            User::One => (first, second),
            User::Two => (second, first),
        };
        meta.order = Some(order);
        meta.r1_stderr = e1.stderr;
        meta.r2_stderr = e2.stderr;
        RatePair::new(e1.mean, e2.mean, meta)
    }
}

/// `log2(1 + q)` with `q` clipped at zero.
#[inline]
pub fn log2_1p(q: f64) -> f64 {
    q.max(0.0).ln_1p() / LN_2
}

fn check_batch(batch: &FadingBatch, n_t: usize) -> Result<()> {
    if batch.n_t() != n_t {
        return Err(Error::dims(format!("batch `{}` n_t", batch.stats_label), n_t, batch.n_t()));
    }
    Ok(())
}

/// `E[log2(1 + h^H k h)]` over the batch.
pub fn expect_log_quadratic(k: &CMatrix, batch: &FadingBatch) -> Result<Estimate> {
    if k.nrows() != batch.n_t() || k.ncols() != batch.n_t() {
        return Err(Error::dims("k", batch.n_t(), k.nrows()));
    }
    mc_estimate(batch, |h| log2_1p(quad_form(k, h)))
}

/// The `(N+1) x (N+1)` block matrix whose log-determinant enters the penalty.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrixM {
    pub matrix: CMatrix,
    pub rank_n: usize,
}

impl BlockMatrixM {
    /// `det(M)` via pivoted LU; the imaginary residue must stay below [`DET_IMAG_TOL`].
    pub fn det(&self) -> Result<f64> {
        let d = crate::linalg::det_lu(&self.matrix);
        real_det(d)
    }

    pub fn top_left(&self) -> CMatrix {
        self.matrix.view((0, 0), (self.rank_n, self.rank_n)).into_owned()
    }

    pub fn bottom_right(&self) -> C64 {
        self.matrix[(self.rank_n, self.rank_n)]
    }
}

fn real_det(d: C64) -> Result<f64> {
    if d.im.abs() > DET_IMAG_TOL * d.re.abs().max(1.0) {
        return Err(Error::NumericalConsistency(format!(
            "det(M) has imaginary part {:.3e}",
            d.im
        )));
    }
    if !(d.re > 0.0) {
        return Err(Error::NumericalConsistency(format!("det(M) = {} is not positive", d.re)));
    }
    Ok(d.re)
}

/// Sample-independent parts of `M` for fixed `(tc, b)`.
#[derive(Debug, Clone)]
pub(crate) struct BlockKernel {
    n: usize,
    n_t: usize,
    /// `I + b K2 b^H`, row-major `N x N`.
    top_left: Vec<C64>,
    /// `T1^H + b K2`, `N x n_T`.
    coupling: CMatrix,
    total: CMatrix,
    second_is_zero: bool,
}

impl BlockKernel {
    pub(crate) fn new(tc: &TransmitCovariances, b: &CMatrix) -> Result<Self> {
        let n = tc.rank_n;
        let n_t = tc.n_t();
        if b.nrows() != n || b.ncols() != n_t {
            return Err(Error::DimensionMismatch {
                field: format!("b ({}x{})", b.nrows(), b.ncols()),
                expected: n * n_t,
                found: b.nrows() * b.ncols(),
            });
        }
        let bk2 = b * &tc.k_u2;
        let tl = CMatrix::identity(n, n) + &bk2 * b.adjoint();
        let top_left = (0..n * n).map(|k| tl[(k / n, k % n)]).collect();
        Ok(BlockKernel {
            n,
            n_t,
            top_left,
            coupling: tc.t1.adjoint() + bk2,
            total: tc.total(),
            second_is_zero: tc.second_is_zero(),
        })
    }

    /// Writes `M(h)` row-major into `out` (length `(N+1)^2`).
    pub(crate) fn fill(&self, h: &[C64], out: &mut [C64]) {
        let n = self.n;
        let m = n + 1;
        for r in 0..n {
            out[r * m..r * m + n].copy_from_slice(&self.top_left[r * n..(r + 1) * n]);
        }
        let mut c: Scratch = smallvec::smallvec![ZERO; n];
        mat_vec(&self.coupling, h, &mut c);
        for r in 0..n {
            out[r * m + n] = c[r];
            out[n * m + r] = c[r].conj();
        }
        out[n * m + n] = ONE + C64::new(quad_form(&self.total, h), 0.0);
    }

    /// `log2 det M(h)`. Exactly zero when the second covariance vanishes,
    /// since then `M`'s Schur complement is identically one.
    pub(crate) fn log2_det(&self, h: &[C64]) -> Result<f64> {
        if self.second_is_zero {
            return Ok(0.0);
        }
        let m = self.n + 1;
        let mut buf: Scratch = smallvec::smallvec![ZERO; m * m];
        self.fill(h, &mut buf);
        let mut perm: smallvec::SmallVec<[usize; 4]> = smallvec::smallvec![0; m];
        let sign = lu_in_place(&mut buf, m, &mut perm)
            .ok_or_else(|| Error::NumericalConsistency("M is singular".into()))?;
        Ok(real_det(lu_det(&buf, m, sign))?.log2())
    }

    /// `log2 det M(h)` plus the per-sample contributions `A1^H` (`N x N`, row-major)
    /// and `A2^H h^H` (`N x n_T`, row-major), where `[A1; A2] = M^{-1} [I; 0]`.
    pub(crate) fn inverse_terms(&self, h: &[C64], a1h: &mut [C64], a2hh: &mut [C64]) -> Result<f64> {
        let n = self.n;
        let m = n + 1;
        let mut buf: Scratch = smallvec::smallvec![ZERO; m * m];
        self.fill(h, &mut buf);
        let mut perm: smallvec::SmallVec<[usize; 4]> = smallvec::smallvec![0; m];
        let sign = lu_in_place(&mut buf, m, &mut perm)
            .ok_or_else(|| Error::NumericalConsistency("M is singular".into()))?;
        let logdet = real_det(lu_det(&buf, m, sign))?.log2();
        let mut col: Scratch = smallvec::smallvec![ZERO; m];
        for j in 0..n {
            col.iter_mut().for_each(|z| *z = ZERO);
            col[j] = ONE;
            lu_solve(&buf, m, &perm, &mut col);
            // column j of [A1; A2]; conjugate-transpose into row j of A1^H.
            for i in 0..n {
                a1h[j * n + i] = col[i].conj();
            }
            let a2 = col[n].conj();
            for k in 0..self.n_t {
                a2hh[j * self.n_t + k] = a2 * h[k].conj();
            }
        }
        Ok(logdet)
    }
}

/// Assembles `M` for one channel realization `h` of the first-encoded user.
pub fn assemble_block_matrix(tc: &TransmitCovariances, b: &InflationFactor, h: &[C64]) -> Result<BlockMatrixM> {
    if h.len() != tc.n_t() {
        return Err(Error::dims("h", tc.n_t(), h.len()));
    }
    let kernel = BlockKernel::new(tc, &b.b)?;
    let m = tc.rank_n + 1;
    let mut buf = vec![ZERO; m * m];
    kernel.fill(h, &mut buf);
    Ok(BlockMatrixM {
        matrix: CMatrix::from_row_slice(m, m, &buf),
        rank_n: tc.rank_n,
    })
}

/// `(E_pi2[log2(1 + h^H (K1+K2) h) - log2(1 + h^H K1 h)], E_pi2[log2(1 + h^H K1 h)])`.
pub(crate) fn base_terms(tc: &TransmitCovariances, batch_pi2: &FadingBatch) -> Result<(Estimate, Estimate)> {
    let total = tc.total();
    let est = mc_estimates(batch_pi2, 2, |h, out| {
        let leak = log2_1p(quad_form(&tc.k_u1, h));
        out[0] = log2_1p(quad_form(&total, h)) - leak;
        out[1] = leak;
        Ok(())
    })?;
    Ok((est[0], est[1]))
}

/// Penalty `D` subtracted from both bounds.
pub fn secrecy_penalty(
    tc: &TransmitCovariances,
    b: &InflationFactor,
    batch_pi1: &FadingBatch,
    batch_pi2: &FadingBatch,
) -> Result<Estimate> {
    check_batch(batch_pi1, tc.n_t())?;
    check_batch(batch_pi2, tc.n_t())?;
    let leak = expect_log_quadratic(&tc.k_u1, batch_pi2)?;
    let kernel = BlockKernel::new(tc, &b.b)?;
    let det_term = mc_estimates(batch_pi1, 1, |h, out| {
        out[0] = kernel.log2_det(h)?;
        Ok(())
    })?[0];
    Ok(leak.plus(det_term))
}

/// Pre-clamp bounds `(R_pi1, R_pi2)` with standard errors, by encoding position.
pub(crate) fn positional_bounds(
    tc: &TransmitCovariances,
    b: &CMatrix,
    batch_pi1: &FadingBatch,
    batch_pi2: &FadingBatch,
) -> Result<(Estimate, Estimate)> {
    check_batch(batch_pi1, tc.n_t())?;
    check_batch(batch_pi2, tc.n_t())?;
    let kernel = BlockKernel::new(tc, b)?;
    let total = tc.total();
    // [log2(1 + h^H (K1+K2) h) - log2 det M, log2 det M] over pi1
    let first = mc_estimates(batch_pi1, 2, |h, out| {
        let d = kernel.log2_det(h)?;
        out[0] = log2_1p(quad_form(&total, h)) - d;
        out[1] = d;
        Ok(())
    })?;
    let (second_net, second_leak) = base_terms(tc, batch_pi2)?;
    // A silent first user has det M >= 1 + h^H K2 h, so its bound is <= 0.
    // Returning the exact zero avoids rounding residue between the two logs.
    let r_first = if tc.first_is_zero() {
        Estimate::exact(0.0)
    } else {
        first[0].minus(second_leak)
    };
    let r_second = second_net.minus(first[1]);
    Ok((r_first, r_second))
}

/// Statistical-CSIT secrecy rates for covariances `tc` and inflation factor `b`.
///
/// `batch1`/`batch2` are user 1 and user 2 realizations; `order` says which
/// user `tc.k_u1` belongs to.
pub fn secrecy_rates(
    tc: &TransmitCovariances,
    b: &InflationFactor,
    batch1: &FadingBatch,
    batch2: &FadingBatch,
    order: EncodingOrder,
    scheme: Scheme,
) -> Result<RatePair> {
    let (b_pi1, b_pi2) = positional(batch1, batch2, order);
    let (first, second) = positional_bounds(tc, &b.b, b_pi1, b_pi2)?;
    let mut meta = RateMeta::new(scheme).with_inflation(b);
    meta.alpha = Some(tc.alpha);
    Ok(RatePair::from_positions(first, second, order, meta))
}

pub(crate) fn positional<'a>(
    batch1: &'a FadingBatch,
    batch2: &'a FadingBatch,
    order: EncodingOrder,
) -> (&'a FadingBatch, &'a FadingBatch) {
    match order.first() {
        User::One => (batch1, batch2),
        User::Two => (batch2, batch1),
    }
}

/// Costa's MMSE inflation factor for a known channel `h` of the first-encoded user,
/// `T1^H h h^H / (1 + h^H K1 h)`.
pub fn mmse_inflation_factor(tc: &TransmitCovariances, h: &[C64]) -> Result<InflationFactor> {
    if h.len() != tc.n_t() {
        return Err(Error::dims("h", tc.n_t(), h.len()));
    }
    let denom = 1.0 + quad_form(&tc.k_u1, h);
    let mut g: Scratch = smallvec::smallvec![ZERO; tc.rank_n];
    let t1h = tc.t1.adjoint();
    mat_vec(&t1h, h, &mut g);
    let b = CMatrix::from_fn(tc.rank_n, tc.n_t(), |i, k| g[i] * h[k].conj() / denom);
    Ok(InflationFactor::fixed(b))
}

/// Full-CSIT baseline: per-realization MMSE inflation factor, positive part inside
/// the expectation. Samples of the two batches are paired by index.
///
/// With the MMSE factor the per-realization log-determinant collapses to
/// `log2((1 + s) / (1 + s1))`, so the bounds reduce to the closed-form ratios
/// `(1+s1)/(1+t1)` and `(1+t)(1+s1) / ((1+s)(1+t1))` evaluated here.
pub fn full_csit_rates(
    tc: &TransmitCovariances,
    batch1: &FadingBatch,
    batch2: &FadingBatch,
    order: EncodingOrder,
) -> Result<RatePair> {
    check_batch(batch1, tc.n_t())?;
    check_batch(batch2, tc.n_t())?;
    let (b_pi1, b_pi2) = positional(batch1, batch2, order);
    let total = tc.total();
    let est = mc_estimates_paired(b_pi1, b_pi2, 2, |h1, h2, out| {
        let s1 = log2_1p(quad_form(&tc.k_u1, h1));
        let s = log2_1p(quad_form(&total, h1));
        let t1 = log2_1p(quad_form(&tc.k_u1, h2));
        let t = log2_1p(quad_form(&total, h2));
        out[0] = (s1 - t1).max(0.0);
        out[1] = ((t - t1) - (s - s1)).max(0.0);
        Ok(())
    })?;
    let mut meta = RateMeta::new(Scheme::FullCsit);
    meta.alpha = Some(tc.alpha);
    Ok(RatePair::from_positions(est[0], est[1], order, meta))
}

/// `(lambda_max(K_H1 - K_H2), lambda_max(K_H2 - K_H1))`, snapped to zero within rounding.
pub fn difference_extremes(user1: &ChannelStats, user2: &ChannelStats) -> Result<(f64, f64)> {
    if user1.n_t() != user2.n_t() {
        return Err(Error::dims("user2 n_t", user1.n_t(), user2.n_t()));
    }
    let diff = &user1.cov - &user2.cov;
    let values = hermitian_eigenvalues(&diff);
    let scale = crate::linalg::frobenius(&user1.cov) + crate::linalg::frobenius(&user2.cov);
    let snap = |x: f64| if x.abs() <= 1e-12 * scale.max(1e-300) { 0.0 } else { x };
    let max = snap(*values.last().expect("n_t >= 1"));
    let min = snap(values[0]);
    Ok((max, if min == 0.0 { 0.0 } else { -min }))
}

/// Low-SNR linear asymptote of the region at power split `alpha` (user 1 gets `alpha`).
pub fn low_snr_region(user1: &ChannelStats, user2: &ChannelStats, p_t: f64, alpha: f64) -> Result<RatePair> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid("alpha", "must lie in [0, 1]"));
    }
    let (up, down) = difference_extremes(user1, user2)?;
    let mut meta = RateMeta::new(Scheme::LowSnr);
    meta.alpha = Some(alpha);
    Ok(RatePair::new(
        alpha * p_t / LN_2 * up,
        (1.0 - alpha) * p_t / LN_2 * down,
        meta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{outer_scaled, CVector};
    use crate::sampling::sample_channel;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn vec2(a: C64, b: C64) -> CVector {
        CVector::from_column_slice(&[a, b])
    }

    fn rank_one(alpha: f64, p: f64) -> TransmitCovariances {
        let e1 = vec2(c(0.6, 0.0), c(0.0, 0.8));
        let e2 = vec2(c(0.0, 1.0), c(0.0, 0.0));
        TransmitCovariances::unit_rank(&e1, &e2, alpha, p).unwrap()
    }

    #[test]
    fn expect_log_quadratic_zero_and_deterministic() {
        let mu = vec2(c(0.5, 0.5), c(-1.0, 0.2));
        let stats = ChannelStats::new("d", mu.clone(), CMatrix::zeros(2, 2)).unwrap();
        let batch = sample_channel(&stats, 100, 1).unwrap();
        let zero = expect_log_quadratic(&CMatrix::zeros(2, 2), &batch).unwrap();
        assert_eq!(zero.mean, 0.0);
        let k = rank_one(0.4, 3.0).total();
        let e = expect_log_quadratic(&k, &batch).unwrap();
        assert_eq!(e.mean, log2_1p(quad_form(&k, mu.as_slice())));
    }

    #[test]
    fn block_matrix_blocks() {
        let tc = rank_one(0.5, 4.0);
        let b = InflationFactor::fixed(CMatrix::from_row_slice(1, 2, &[c(0.1, -0.3), c(0.7, 0.2)]));
        let h = [c(0.3, 0.1), c(-0.4, 0.9)];
        let m = assemble_block_matrix(&tc, &b, &h).unwrap();
        let tl = CMatrix::identity(1, 1) + &b.b * &tc.k_u2 * b.b.adjoint();
        assert!((m.top_left() - tl).norm() < 1e-14);
        let hv = CVector::from_column_slice(&h);
        let tr = (tc.t1.adjoint() + &b.b * &tc.k_u2) * &hv;
        let bl = hv.adjoint() * (&tc.t1 + &tc.k_u2 * b.b.adjoint());
        assert!((m.matrix[(0, 1)] - tr[0]).norm() < 1e-14);
        assert!((m.matrix[(1, 0)] - bl[(0, 0)]).norm() < 1e-14);
        let br = 1.0 + quad_form(&tc.total(), &h);
        assert!((m.bottom_right().re - br).abs() < 1e-14);
        assert!(m.det().unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn det_is_one_without_second_user() {
        let tc = rank_one(1.0, 5.0);
        let b = InflationFactor::for_covariances(&tc);
        let m = assemble_block_matrix(&tc, &b, &[c(0.9, -0.2), c(0.1, 0.4)]).unwrap();
        assert!((m.det().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn det_without_first_user_is_quadratic() {
        let tc = rank_one(0.0, 5.0);
        let b = InflationFactor::for_covariances(&tc);
        let h = [c(0.9, -0.2), c(0.1, 0.4)];
        let m = assemble_block_matrix(&tc, &b, &h).unwrap();
        assert!((m.det().unwrap() - (1.0 + quad_form(&tc.k_u2, &h))).abs() < 1e-12);
    }

    #[test]
    fn bad_b_shape_is_rejected() {
        let tc = rank_one(0.5, 1.0);
        let b = InflationFactor::fixed(CMatrix::zeros(2, 1));
        assert!(matches!(
            assemble_block_matrix(&tc, &b, &[ZERO, ZERO]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mmse_examples() {
        let e1 = vec2(c(1.0, 0.0), c(0.0, 0.0));
        let tc = TransmitCovariances::unit_rank(&e1, &e1, 1.0, 1.0).unwrap();
        let b = mmse_inflation_factor(&tc, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        // 1 + h^H K1 h = 2, T1^H h = 1, h^H = [1, 1]
        assert!((b.b[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((b.b[(0, 1)] - c(0.5, 0.0)).norm() < 1e-15);
        let zero_h = mmse_inflation_factor(&tc, &[ZERO, ZERO]).unwrap();
        assert!(zero_h.b.iter().all(|z| *z == ZERO));
        let silent = rank_one(0.0, 1.0);
        let zero_t = mmse_inflation_factor(&silent, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(zero_t.b.iter().all(|z| *z == ZERO));
    }

    #[test]
    fn full_csit_deterministic() {
        let h1 = vec2(c(1.0, 0.0), c(0.2, 0.1));
        let h2 = vec2(c(0.3, 0.0), c(0.8, -0.5));
        let s1 = ChannelStats::new("a", h1.clone(), CMatrix::zeros(2, 2)).unwrap();
        let s2 = ChannelStats::new("b", h2.clone(), CMatrix::zeros(2, 2)).unwrap();
        let b1 = sample_channel(&s1, 10, 0).unwrap();
        let b2 = sample_channel(&s2, 10, 1).unwrap();
        let tc = rank_one(0.3, 6.0);
        let r = full_csit_rates(&tc, &b1, &b2, EncodingOrder::ONE_FIRST).unwrap();
        let q = |k: &CMatrix, h: &CVector| 1.0 + quad_form(k, h.as_slice());
        let k1 = &tc.k_u1;
        let kt = tc.total();
        let expect1 = (q(k1, &h1) / q(k1, &h2)).log2().max(0.0);
        let expect2 = ((q(&kt, &h2) * q(k1, &h1)) / (q(&kt, &h1) * q(k1, &h2))).log2().max(0.0);
        assert!((r.r1 - expect1).abs() < 1e-12);
        assert!((r.r2 - expect2).abs() < 1e-12);

        let same = full_csit_rates(&tc, &b1, &b1, EncodingOrder::ONE_FIRST).unwrap();
        assert_eq!((same.r1, same.r2), (0.0, 0.0));

        let silent = rank_one(0.0, 6.0);
        let r = full_csit_rates(&silent, &b1, &b2, EncodingOrder::ONE_FIRST).unwrap();
        assert_eq!(r.r1, 0.0);
    }

    #[test]
    fn zero_power_gives_zero_rates() {
        let stats = ChannelStats::iid("u", 2, 1.0).unwrap();
        let b1 = sample_channel(&stats, 2000, 1).unwrap();
        let b2 = sample_channel(&stats, 2000, 2).unwrap();
        let tc = rank_one(0.5, 0.0);
        let r = secrecy_rates(
            &tc,
            &InflationFactor::for_covariances(&tc),
            &b1,
            &b2,
            EncodingOrder::ONE_FIRST,
            Scheme::InterferenceAsNoise,
        )
        .unwrap();
        assert_eq!((r.r1, r.r2), (0.0, 0.0));
    }

    #[test]
    fn low_snr_examples() {
        let a = ChannelStats::real("a", &[0.0, 0.0], &[2.0, 0.0, 0.0, 1.0]).unwrap();
        let b = ChannelStats::real("b", &[0.0, 0.0], &[1.0, 0.0, 0.0, 2.0]).unwrap();
        let r = low_snr_region(&a, &b, 3.0, 0.25).unwrap();
        assert!((r.r1 - 0.75 / LN_2).abs() < 1e-12);
        assert!((r.r2 - 2.25 / LN_2).abs() < 1e-12);
        let same = low_snr_region(&a, &a, 3.0, 0.25).unwrap();
        assert_eq!((same.r1, same.r2), (0.0, 0.0));
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL {
            assert_eq!(s.as_str().parse::<Scheme>().unwrap(), s);
        }
        assert!("bogus".parse::<Scheme>().is_err());
    }

    #[test]
    fn outer_product_helper() {
        let v = vec2(c(1.0, 1.0), c(0.0, 2.0));
        let m = outer_scaled(&v, 0.5);
        assert!((m[(0, 1)] - v[0] * v[1].conj() * 0.5).norm() < 1e-15);
    }
}
