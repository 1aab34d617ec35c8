//! Unit-rank transmit covariance selection.

use crate::channel::{ChannelStats, EncodingOrder, Scenario, TransmitCovariances, User};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix, CVector, C64};

use super::grq::{grq_max, GrqProblem};

/// Directions and covariances for power split `alpha` (fraction of the first-encoded user).
pub fn select_covariances(scenario: &Scenario, alpha: f64, order: EncodingOrder) -> Result<TransmitCovariances> {
    select_covariances_for(&scenario.user1, &scenario.user2, scenario.total_power, alpha, order)
}

/// Same as [`select_covariances`] with explicit statistics and power.
///
/// With `Q_k = K_Hk + mu_k mu_k^H` and `a = alpha P`:
///
/// ```text
/// e1 = argmax  e^H (I + a Q_pi1) e / e^H (I + a Q_pi2) e
/// e2 = argmax  e^H (I + (1-alpha) P Q_pi2 / c2) e / e^H (I + (1-alpha) P Q_pi1 / c1) e
/// c_k = 1 + a e1^H Q_k e1
/// ```
pub fn select_covariances_for(
    user1: &ChannelStats,
    user2: &ChannelStats,
    total_power: f64,
    alpha: f64,
    order: EncodingOrder,
) -> Result<TransmitCovariances> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid("alpha", "must lie in [0, 1]"));
    }
    if user1.n_t() != user2.n_t() {
        return Err(Error::dims("user2 n_t", user1.n_t(), user2.n_t()));
    }
    let pick = |u: User| match u {
        User::One => user1,
        User::Two => user2,
    };
    let q_first = pick(order.first()).second_moment();
    let q_second = pick(order.second()).second_moment();
    let n = user1.n_t();
    let eye = CMatrix::identity(n, n);
    let a = alpha * total_power;
    let rest = (1.0 - alpha) * total_power;

    let scaled = |m: &CMatrix, s: f64| m * C64::new(s, 0.0);
    let first = GrqProblem::new(&eye + scaled(&q_first, a), &eye + scaled(&q_second, a))?;
    let (e1, _) = grq_max(&first)?;

    let load = |q: &CMatrix| 1.0 + a * (e1.adjoint() * q * &e1)[(0, 0)].re;
    let second = GrqProblem::new(
        &eye + scaled(&q_second, rest / load(&q_second)),
        &eye + scaled(&q_first, rest / load(&q_first)),
    )?;
    let (e2, _) = grq_max(&second)?;
    TransmitCovariances::unit_rank(&e1, &e2, alpha, total_power)
}

/// Low-SNR aligned selection with user 1 encoded first: `e1` is the top
/// eigenvector of `K_H1 - K_H2`, `e2` the top eigenvector of `K_H2 - K_H1`.
pub fn aligned_covariances(
    user1: &ChannelStats,
    user2: &ChannelStats,
    total_power: f64,
    alpha: f64,
) -> Result<TransmitCovariances> {
    if user1.n_t() != user2.n_t() {
        return Err(Error::dims("user2 n_t", user1.n_t(), user2.n_t()));
    }
    let diff = &user1.cov - &user2.cov;
    let (_, vectors) = hermitian_eigen(&diff);
    let n = user1.n_t();
    let e1: CVector = vectors.column(n - 1).into_owned();
    let e2: CVector = vectors.column(0).into_owned();
    TransmitCovariances::unit_rank(&e1, &e2, alpha, total_power)
}
