//! Degradedness screening from channel statistics.
//!
//! The rules are sufficient conditions for one receiver to be (stochastically)
//! degraded with respect to the other, in which case its secrecy rate is zero
//! and the problem collapses to a wiretap channel. When none fires, the sign
//! structure of `K_H1 - K_H2` decides non-triviality at low SNR.

use std::fmt;

use crate::channel::{rician_k_factor, ChannelStats, User};
use crate::error::{Error, Result};
use crate::linalg::{frobenius, max_abs_diff, CMatrix, C64};
use crate::region::difference_extremes;

/// Relative tolerance of the scaling and K-factor comparisons.
pub const RATIO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Both users can have positive secrecy rate (at least at low SNR).
    NonTrivial,
    DegradedUser1Silent,
    DegradedUser2Silent,
    /// Statistically identical receivers: neither can keep a secret.
    DegradedBothSilent,
    Inconclusive,
}

impl Verdict {
    fn silent(users: Silent) -> Verdict {
        match users {
            Silent::One => Verdict::DegradedUser1Silent,
            Silent::Two => Verdict::DegradedUser2Silent,
            Silent::Both => Verdict::DegradedBothSilent,
        }
    }

    /// Users whose secrecy rate is forced to zero.
    pub fn silent_users(self) -> Vec<User> {
        match self {
            Verdict::DegradedUser1Silent => vec![User::One],
            Verdict::DegradedUser2Silent => vec![User::Two],
            Verdict::DegradedBothSilent => vec![User::One, User::Two],
            Verdict::NonTrivial | Verdict::Inconclusive => Vec::new(),
        }
    }

    /// The verdict with the user labels exchanged.
    pub fn mirrored(self) -> Verdict {
        match self {
            Verdict::DegradedUser1Silent => Verdict::DegradedUser2Silent,
            Verdict::DegradedUser2Silent => Verdict::DegradedUser1Silent,
            v => v,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::NonTrivial => "non-trivial",
            Verdict::DegradedUser1Silent => "degraded: user 1 silent",
            Verdict::DegradedUser2Silent => "degraded: user 2 silent",
            Verdict::DegradedBothSilent => "degraded: both users silent",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Sign structure of `K_H1 - K_H2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LowSnrDefiniteness {
    /// Eigenvalues of both signs: both users have positive low-SNR slope.
    Indefinite,
    /// One-signed and nonzero: only one user has positive slope.
    Semidefinite,
    /// The difference vanishes.
    Vanishing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Silent {
    One,
    Two,
    Both,
}

impl Silent {
    /// The user with the smaller figure of merit is silent; both on a tie.
    fn weaker(f1: f64, f2: f64) -> Silent {
        if (f1 - f2).abs() <= RATIO_TOL * f1.abs().max(f2.abs()) {
            Silent::Both
        } else if f1 < f2 {
            Silent::One
        } else {
            Silent::Two
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Same mean and covariance.
    IdenticalStatistics,
    /// Zero-mean `sigma^2 I` channels: the larger variance is a degraded copy away.
    IsotropicOrdering,
    /// Zero-mean with `K_H2 = c K_H1`.
    ScaledCovariance,
    /// Single antenna, zero mean.
    ScalarRayleigh,
    /// Single antenna, equal Rician K-factor.
    ScalarRicianEqualK,
    /// `K_H1 - K_H2` indefinite.
    LowSnrIndefinite,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::IdenticalStatistics => "identical-statistics",
            Rule::IsotropicOrdering => "isotropic-ordering",
            Rule::ScaledCovariance => "scaled-covariance",
            Rule::ScalarRayleigh => "scalar-rayleigh",
            Rule::ScalarRicianEqualK => "scalar-rician-equal-k",
            Rule::LowSnrIndefinite => "low-snr-indefinite",
        })
    }
}

/// A rule that fired, with its outcome and a short explanation.
#[derive(Debug, Clone, PartialEq)]
pub struct Reason {
    pub rule: Rule,
    pub verdict: Verdict,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub verdict: Verdict,
    /// Every rule that fired, in evaluation order; the first decides the verdict.
    pub reasons: Vec<Reason>,
    pub low_snr_indefinite: LowSnrDefiniteness,
    /// `(lambda_max(K_H1 - K_H2), lambda_max(K_H2 - K_H1))`.
    pub difference_extremes: (f64, f64),
}

fn close(a: &CMatrix, b: &CMatrix) -> bool {
    max_abs_diff(a, b) <= RATIO_TOL * frobenius(a).max(frobenius(b)).max(f64::MIN_POSITIVE)
}

fn is_scaled_identity(k: &CMatrix) -> Option<f64> {
    let n = k.nrows();
    let sigma2 = k.trace().re / n as f64;
    let target = CMatrix::identity(n, n) * C64::new(sigma2, 0.0);
    (max_abs_diff(k, &target) <= RATIO_TOL * sigma2.abs().max(f64::MIN_POSITIVE)).then_some(sigma2)
}

/// `c` with `k2 = c k1`, compared after Frobenius normalization. A zero matrix
/// is a zero multiple of anything.
fn scale_factor(k1: &CMatrix, k2: &CMatrix) -> Option<f64> {
    let (n1, n2) = (frobenius(k1), frobenius(k2));
    match (n1 == 0.0, n2 == 0.0) {
        (true, true) => Some(1.0),
        (true, false) => Some(f64::INFINITY),
        (false, true) => Some(0.0),
        (false, false) => {
            let u1 = k1 * C64::new(1.0 / n1, 0.0);
            let u2 = k2 * C64::new(1.0 / n2, 0.0);
            (max_abs_diff(&u1, &u2) <= RATIO_TOL).then_some(n2 / n1)
        }
    }
}

pub fn classify(user1: &ChannelStats, user2: &ChannelStats) -> Result<Classification> {
    if user1.n_t() != user2.n_t() {
        return Err(Error::dims("user2 n_t", user1.n_t(), user2.n_t()));
    }
    let n_t = user1.n_t();
    let zero_mean = user1.is_zero_mean() && user2.is_zero_mean();
    let mut reasons = Vec::new();
    let mut fire = |rule: Rule, silent: Silent, detail: String| {
        reasons.push(Reason {
            rule,
            verdict: Verdict::silent(silent),
            detail,
        });
    };

    let mean_gap = (&user1.mean - &user2.mean).norm();
    let mean_scale = user1.mean.norm().max(user2.mean.norm());
    if mean_gap <= RATIO_TOL * mean_scale && close(&user1.cov, &user2.cov) {
        fire(
            Rule::IdenticalStatistics,
            Silent::Both,
            "both receivers see the same channel distribution".into(),
        );
    }

    if zero_mean {
        if let (Some(s1), Some(s2)) = (is_scaled_identity(&user1.cov), is_scaled_identity(&user2.cov)) {
            fire(
                Rule::IsotropicOrdering,
                Silent::weaker(s1, s2),
                format!("i.i.d. channels with variances {s1} and {s2}"),
            );
        }
        if let Some(c) = scale_factor(&user1.cov, &user2.cov) {
            let silent = if (c - 1.0).abs() <= RATIO_TOL {
                Silent::Both
            } else if c < 1.0 {
                Silent::Two
            } else {
                Silent::One
            };
            fire(Rule::ScaledCovariance, silent, format!("K_H2 = {c} K_H1"));
        }
        if n_t == 1 {
            let (v1, v2) = (user1.cov[(0, 0)].re, user2.cov[(0, 0)].re);
            fire(
                Rule::ScalarRayleigh,
                Silent::weaker(v1, v2),
                format!("single-antenna Rayleigh with variances {v1} and {v2}"),
            );
        }
    }

    if n_t == 1 && !zero_mean {
        if let (Some(k1), Some(k2)) = (rician_k_factor(user1), rician_k_factor(user2)) {
            if k1.is_finite() && k2.is_finite() && (k1 - k2).abs() <= RATIO_TOL * k1.abs().max(k2.abs()) {
                let power = |u: &ChannelStats| u.mean[0].norm_sqr() + u.cov[(0, 0)].re;
                fire(
                    Rule::ScalarRicianEqualK,
                    Silent::weaker(power(user1), power(user2)),
                    format!("single-antenna Rician with common K-factor {k1}"),
                );
            }
        }
    }

    let extremes = difference_extremes(user1, user2)?;
    let low_snr_indefinite = match extremes {
        (up, down) if up > 0.0 && down > 0.0 => LowSnrDefiniteness::Indefinite,
        (up, down) if up == 0.0 && down == 0.0 => LowSnrDefiniteness::Vanishing,
        _ => LowSnrDefiniteness::Semidefinite,
    };
    if low_snr_indefinite == LowSnrDefiniteness::Indefinite {
        reasons.push(Reason {
            rule: Rule::LowSnrIndefinite,
            verdict: Verdict::NonTrivial,
            detail: format!(
                "K_H1 - K_H2 has eigenvalues {} and {}",
                extremes.0, -extremes.1
            ),
        });
    }

    let verdict = reasons.first().map_or(Verdict::Inconclusive, |r| r.verdict);
    Ok(Classification {
        verdict,
        reasons,
        low_snr_indefinite,
        difference_extremes: extremes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rayleigh_pair() -> (ChannelStats, ChannelStats) {
        (
            ChannelStats::real("1", &[0.0, 0.0], &[0.2, 0.0, 0.0, 0.04]).unwrap(),
            ChannelStats::real("2", &[0.0, 0.0], &[0.1, 0.08, 0.08, 0.1]).unwrap(),
        )
    }

    #[test]
    fn isotropic_pair() {
        let strong = ChannelStats::iid("1", 2, 2.0).unwrap();
        let weak = ChannelStats::iid("2", 2, 1.0).unwrap();
        let c = classify(&strong, &weak).unwrap();
        assert_eq!(c.verdict, Verdict::DegradedUser2Silent);
        assert_eq!(c.reasons[0].rule, Rule::IsotropicOrdering);
        assert_eq!(c.low_snr_indefinite, LowSnrDefiniteness::Semidefinite);
    }

    #[test]
    fn correlated_rayleigh_is_non_trivial() {
        let (u1, u2) = rayleigh_pair();
        let c = classify(&u1, &u2).unwrap();
        assert_eq!(c.verdict, Verdict::NonTrivial);
        assert_eq!(c.low_snr_indefinite, LowSnrDefiniteness::Indefinite);
        assert!((c.difference_extremes.0 - 0.1331).abs() < 1e-4);
        assert!((c.difference_extremes.1 - 0.0931).abs() < 1e-4);
    }

    #[test]
    fn scalar_rician_equal_k() {
        let u1 = ChannelStats::real("1", &[0.5], &[0.1]).unwrap();
        let u2 = ChannelStats::real("2", &[1.0], &[0.4]).unwrap();
        let c = classify(&u1, &u2).unwrap();
        assert_eq!(c.verdict, Verdict::DegradedUser1Silent);
        assert_eq!(c.reasons[0].rule, Rule::ScalarRicianEqualK);
    }

    #[test]
    fn scaled_covariance() {
        let (u1, _) = rayleigh_pair();
        let u2 = ChannelStats::real("2", &[0.0, 0.0], &[0.6, 0.0, 0.0, 0.12]).unwrap();
        let c = classify(&u1, &u2).unwrap();
        assert_eq!(c.verdict, Verdict::DegradedUser1Silent);
        assert_eq!(c.reasons[0].rule, Rule::ScaledCovariance);
    }

    #[test]
    fn identical_users_are_both_silent() {
        let (u1, _) = rayleigh_pair();
        let c = classify(&u1, &u1).unwrap();
        assert_eq!(c.verdict, Verdict::DegradedBothSilent);
        assert_eq!(c.low_snr_indefinite, LowSnrDefiniteness::Vanishing);
    }

    #[test]
    fn definite_with_means_is_inconclusive() {
        let u1 = ChannelStats::real("1", &[0.7, 0.1], &[0.3, 0.0, 0.0, 0.3]).unwrap();
        let u2 = ChannelStats::real("2", &[0.1, 0.6], &[0.1, 0.0, 0.0, 0.1]).unwrap();
        let c = classify(&u1, &u2).unwrap();
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.reasons.is_empty());
    }

    #[test]
    fn mirrored_under_swap() {
        let (u1, u2) = rayleigh_pair();
        let strong = ChannelStats::iid("s", 2, 2.0).unwrap();
        for (a, b) in [(&u1, &u2), (&strong, &u2), (&u1, &strong)] {
            let fwd = classify(a, b).unwrap();
            let back = classify(b, a).unwrap();
            assert_eq!(fwd.verdict.mirrored(), back.verdict);
            assert_eq!(fwd.low_snr_indefinite, back.low_snr_indefinite);
        }
    }
}
