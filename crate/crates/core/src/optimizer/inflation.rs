//! Fixed-point solver for the LA-GPC inflation factor under statistical CSIT.
//!
//! Stationarity of the first user's bound in `b` gives
//!
//! ```text
//! b = f(b) = -(E[A1^H])^-1 E[A2^H h^H],      [A1; A2] = M(b, h)^-1 [I; 0]
//! ```
//!
//! with expectations over the first-encoded user's channel. Starting from
//! `b = 0` the solver iterates `b <- (1 - g) b + g f(b)`, halving the step
//! `g` (down to 1/16) whenever the bounds get worse.

use nalgebra::SVD;

use crate::channel::{EncodingOrder, InflationFactor, Scenario, StopRule, TransmitCovariances};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, quad_form, CMatrix, C64};
use crate::region::{base_terms, log2_1p, positional, BlockKernel};
use crate::sampling::{mc_estimate, mc_mean_complex, FadingBatch};

/// Condition number beyond which `E[A1^H]` is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;
/// Smallest damping factor.
pub const MIN_STEP: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    pub epsilon: f64,
    pub max_iters: usize,
    pub stop_rule: StopRule,
}

impl From<&Scenario> for SolverSettings {
    fn from(s: &Scenario) -> Self {
        SolverSettings {
            epsilon: s.epsilon,
            max_iters: s.max_iters,
            stop_rule: s.stop_rule,
        }
    }
}

/// One evaluation of the map at `b`.
struct Evaluation {
    /// `E_pi1[log2 det M(b, h)]`
    log_det: f64,
    /// `f(b)`
    update: CMatrix,
}

fn evaluate(tc: &TransmitCovariances, b: &CMatrix, batch_pi1: &FadingBatch) -> Result<Evaluation> {
    let kernel = BlockKernel::new(tc, b)?;
    let n = tc.rank_n;
    let n_t = tc.n_t();
    let dim = n * n + n * n_t + 1;
    let means = mc_mean_complex(batch_pi1, dim, |h, out| {
        let (a1h, rest) = out.split_at_mut(n * n);
        let (a2hh, last) = rest.split_at_mut(n * n_t);
        last[0] = C64::new(kernel.inverse_terms(h, a1h, a2hh)?, 0.0);
        Ok(())
    })?;
    let e_a1h = CMatrix::from_row_slice(n, n, &means[..n * n]);
    let e_a2hh = CMatrix::from_row_slice(n, n_t, &means[n * n..n * n + n * n_t]);
    let sv = SVD::new(e_a1h.clone(), false, false).singular_values;
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= MAX_CONDITION) {
        return Err(Error::SingularExpectation { condition });
    }
    let update = -e_a1h
        .lu()
        .solve(&e_a2hh)
        .ok_or(Error::SingularExpectation { condition })?;
    Ok(Evaluation {
        log_det: means[dim - 1].re,
        update,
    })
}

/// Denominator of the relative stop rule; absolute below 1e-9 bits.
fn relative_base(rate: f64) -> f64 {
    rate.abs().max(1e-9)
}

/// The map `f(b)` over the first-encoded user's batch.
pub fn inflation_update(tc: &TransmitCovariances, b: &CMatrix, batch_pi1: &FadingBatch) -> Result<CMatrix> {
    Ok(evaluate(tc, b, batch_pi1)?.update)
}

/// Solves for the inflation factor of covariances `tc` under `order`.
///
/// `batch1`/`batch2` are user 1 and user 2 realizations. Convergence requires
/// both the rate stop rule and a small fixed-point residual
/// `||b - f(b)||_F < 1e-2 (1 + ||b||_F)`. Without convergence the iterate with
/// the best rates is returned and flagged.
pub fn solve_inflation_factor(
    tc: &TransmitCovariances,
    batch1: &FadingBatch,
    batch2: &FadingBatch,
    order: EncodingOrder,
    settings: SolverSettings,
) -> Result<InflationFactor> {
    let (batch_pi1, batch_pi2) = positional(batch1, batch2, order);
    let n = tc.rank_n;
    let n_t = tc.n_t();
    if tc.second_is_zero() {
        // Without a second signal b drops out of M: any b is stationary.
        return Ok(InflationFactor {
            b: CMatrix::zeros(n, n_t),
            iterations: 1,
            residual: 0.0,
            converged: true,
        });
    }

    let total = tc.total();
    let first_total = mc_estimate(batch_pi1, |h| log2_1p(quad_form(&total, h)))?.mean;
    let (second_net, second_leak) = base_terms(tc, batch_pi2)?;
    let rates = |log_det: f64| {
        (
            first_total - second_leak.mean - log_det,
            second_net.mean - log_det,
        )
    };
    let change = |now: (f64, f64), before: (f64, f64)| {
        let d1 = (now.0 - before.0).abs();
        let d2 = (now.1 - before.1).abs();
        match settings.stop_rule {
            StopRule::Absolute => d1.max(d2),
            StopRule::Relative => (d1 / relative_base(before.0)).max(d2 / relative_base(before.1)),
        }
    };

    let mut b = CMatrix::zeros(n, n_t);
    let mut current = evaluate(tc, &b, batch_pi1)?;
    let mut best = (b.clone(), current.log_det, frobenius(&(&b - &current.update)));
    let mut step = 1.0;

    for iteration in 1..=settings.max_iters {
        let target = current.update.clone();
        let (candidate, next) = loop {
            let candidate = &b * C64::new(1.0 - step, 0.0) + &target * C64::new(step, 0.0);
            let next = evaluate(tc, &candidate, batch_pi1)?;
            let worse = next.log_det > current.log_det + 1e-12 * current.log_det.abs().max(1.0);
            if !worse || step <= MIN_STEP {
                break (candidate, next);
            }
            step /= 2.0;
        };
        let delta = change(rates(next.log_det), rates(current.log_det));
        let residual = frobenius(&(&candidate - &next.update));
        if next.log_det < best.1 {
            best = (candidate.clone(), next.log_det, residual);
        }
        let settled = residual < 1e-2 * (1.0 + frobenius(&candidate));
        b = candidate;
        current = next;
        if delta < settings.epsilon && settled {
            return Ok(InflationFactor {
                b,
                iterations: iteration,
                residual,
                converged: true,
            });
        }
    }
    Ok(InflationFactor {
        b: best.0,
        iterations: settings.max_iters,
        residual: best.2,
        converged: false,
    })
}
