//! Channel statistics, scenarios and transmit covariances.
//!
//! Each receiver sees `y = h^H x + n` with unit-variance circularly-symmetric
//! noise; the transmitter only knows the law `h ~ CN(mean, cov)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, hermitian_deviation, hermitian_eigen, hermitian_eigenvalues, max_abs_diff,
    outer_scaled, symmetrize, CMatrix, CVector, C64,
};

/// Maximum elementwise deviation from `cov == cov^H` accepted by validation.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Most negative eigenvalue still treated as PSD (and clipped to zero).
pub const PSD_FLOOR: f64 = -1e-10;

/// Receiver identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum User {
    One,
    Two,
}

impl User {
    pub fn other(self) -> User {
        match self {
            User::One => User::Two,
            User::Two => User::One,
        }
    }

    pub fn index(self) -> usize {
        match self {
            User::One => 1,
            User::Two => 2,
        }
    }
}

impl fmt::Display for User {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Which user's message is encoded first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EncodingOrder {
    first: User,
    second: User,
}

impl EncodingOrder {
    pub const ONE_FIRST: EncodingOrder = EncodingOrder {
        first: User::One,
        second: User::Two,
    };
    pub const TWO_FIRST: EncodingOrder = EncodingOrder {
        first: User::Two,
        second: User::One,
    };

    pub fn new(first: User, second: User) -> Result<Self> {
        if first == second {
            return Err(Error::invalid("order", "first and second user must differ"));
        }
        Ok(EncodingOrder { first, second })
    }

    pub fn first(self) -> User {
        self.first
    }

    pub fn second(self) -> User {
        self.second
    }

    pub fn swapped(self) -> EncodingOrder {
        EncodingOrder {
            first: self.second,
            second: self.first,
        }
    }

    pub fn both() -> [EncodingOrder; 2] {
        [EncodingOrder::ONE_FIRST, EncodingOrder::TWO_FIRST]
    }
}

impl fmt::Display for EncodingOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.first, self.second)
    }
}

/// Mean and covariance of one user's fading vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStats {
    pub mean: CVector,
    pub cov: CMatrix,
    pub label: String,
}

impl ChannelStats {
    /// Builds and validates.
    pub fn new(label: impl Into<String>, mean: CVector, cov: CMatrix) -> Result<Self> {
        validate_stats(ChannelStats {
            mean,
            cov,
            label: label.into(),
        })
    }

    /// Zero-mean `CN(0, sigma2 * I)`.
    pub fn iid(label: impl Into<String>, n_t: usize, sigma2: f64) -> Result<Self> {
        Self::new(
            label,
            CVector::zeros(n_t),
            CMatrix::identity(n_t, n_t) * C64::new(sigma2, 0.0),
        )
    }

    /// Real mean and real symmetric covariance given row-major.
    pub fn real(label: impl Into<String>, mean: &[f64], cov_row_major: &[f64]) -> Result<Self> {
        let n = mean.len();
        if cov_row_major.len() != n * n {
            return Err(Error::dims("cov", n * n, cov_row_major.len()));
        }
        let mean = CVector::from_iterator(n, mean.iter().map(|&x| C64::new(x, 0.0)));
        let cov = CMatrix::from_fn(n, n, |i, j| C64::new(cov_row_major[i * n + j], 0.0));
        Self::new(label, mean, cov)
    }

    pub fn n_t(&self) -> usize {
        self.mean.len()
    }

    /// `cov + mean mean^H`, the second moment `E[h h^H]`.
    pub fn second_moment(&self) -> CMatrix {
        &self.cov + outer_scaled(&self.mean, 1.0)
    }

    pub fn is_zero_mean(&self) -> bool {
        self.mean.iter().all(|z| *z == C64::new(0.0, 0.0))
    }
}

/// Checks the Hermitian/PSD/shape invariants of `stats`.
///
/// Inputs within the tolerances are symmetrized and, when an eigenvalue lies
/// in `[PSD_FLOOR, 0)`, clipped back onto the PSD cone.
pub fn validate_stats(stats: ChannelStats) -> Result<ChannelStats> {
    let n = stats.mean.len();
    if n == 0 {
        return Err(Error::dims(format!("{}.mean", stats.label), 1, 0));
    }
    if stats.cov.nrows() != n {
        return Err(Error::dims(format!("{}.cov rows", stats.label), n, stats.cov.nrows()));
    }
    if stats.cov.ncols() != n {
        return Err(Error::dims(format!("{}.cov cols", stats.label), n, stats.cov.ncols()));
    }
    let finite = |z: &C64| z.re.is_finite() && z.im.is_finite();
    if !stats.mean.iter().all(finite) {
        return Err(Error::invalid(format!("{}.mean", stats.label), "non-finite entry"));
    }
    if !stats.cov.iter().all(finite) {
        return Err(Error::invalid(format!("{}.cov", stats.label), "non-finite entry"));
    }
    let deviation = hermitian_deviation(&stats.cov);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NonHermitian {
            field: format!("{}.cov", stats.label),
            deviation,
        });
    }
    let mut cov = symmetrize(&stats.cov);
    let (values, vectors) = hermitian_eigen(&cov);
    let min = values[0];
    if min < PSD_FLOOR {
        return Err(Error::NotPsd {
            field: format!("{}.cov", stats.label),
            min_eigenvalue: min,
        });
    }
    // Values within rounding of zero are left alone so validation is idempotent.
    let scale = frobenius(&cov).max(1.0);
    if min < -1e-14 * scale {
        let clipped = CMatrix::from_fn(n, n, |i, j| {
            (0..n)
                .map(|k| vectors[(i, k)] * vectors[(j, k)].conj() * values[k].max(0.0))
                .sum()
        });
        cov = symmetrize(&clipped);
    }
    Ok(ChannelStats {
        mean: stats.mean,
        cov,
        label: stats.label,
    })
}

/// Line-of-sight to scattered power ratio `|mean|^2 / tr(cov)`; `None` when `tr(cov) = 0`.
pub fn rician_k_factor(stats: &ChannelStats) -> Option<f64> {
    let scattered = stats.cov.trace().re;
    if scattered <= 0.0 {
        return None;
    }
    Some(stats.mean.norm_squared() / scattered)
}

/// Stop rule for the inflation-factor iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StopRule {
    /// `max |R^(i) - R^(i-1)| < epsilon`.
    #[default]
    Absolute,
    /// Same, divided by `|R^(i-1)|` (falls back to absolute near zero).
    Relative,
}

pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_ALPHA_GRID: usize = 41;
pub const DEFAULT_EPSILON: f64 = 1e-3;
pub const DEFAULT_MAX_ITERS: usize = 200;
pub const DEFAULT_SEED: u64 = 42;

/// Two users, a power budget and the numerical settings of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub user1: ChannelStats,
    pub user2: ChannelStats,
    pub total_power: f64,
    pub mc_samples: usize,
    pub seed: u64,
    pub epsilon: f64,
    pub alpha_grid: usize,
    pub max_iters: usize,
    pub stop_rule: StopRule,
}

impl Scenario {
    /// Scenario with default numerical settings.
    pub fn new(user1: ChannelStats, user2: ChannelStats, total_power: f64) -> Result<Self> {
        let s = Scenario {
            user1,
            user2,
            total_power,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
            epsilon: DEFAULT_EPSILON,
            alpha_grid: DEFAULT_ALPHA_GRID,
            max_iters: DEFAULT_MAX_ITERS,
            stop_rule: StopRule::Absolute,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.user1.n_t() != self.user2.n_t() {
            return Err(Error::dims("user2 n_t", self.user1.n_t(), self.user2.n_t()));
        }
        if !(self.total_power >= 0.0) || !self.total_power.is_finite() {
            return Err(Error::invalid("p_t", "must be finite and >= 0"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::invalid("epsilon", "must be > 0"));
        }
        if self.mc_samples == 0 {
            return Err(Error::BadCount(0));
        }
        if self.alpha_grid == 0 {
            return Err(Error::invalid("alpha_grid", "must be >= 1"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_t(&self) -> usize {
        self.user1.n_t()
    }

    pub fn user(&self, u: User) -> &ChannelStats {
        match u {
            User::One => &self.user1,
            User::Two => &self.user2,
        }
    }

    /// Uniform grid on `[0, 1]`; a single point grid is `{1}`.
    pub fn alphas(&self) -> Vec<f64> {
        alpha_grid(self.alpha_grid)
    }

    pub fn with_power(&self, total_power: f64) -> Scenario {
        Scenario {
            total_power,
            ..self.clone()
        }
    }

    /// The same scenario with the user labels exchanged.
    pub fn swapped(&self) -> Scenario {
        Scenario {
            user1: self.user2.clone(),
            user2: self.user1.clone(),
            ..self.clone()
        }
    }
}

pub fn alpha_grid(points: usize) -> Vec<f64> {
    if points <= 1 {
        return vec![1.0];
    }
    let last = (points - 1) as f64;
    (0..points).map(|k| k as f64 / last).collect()
}

/// Input covariances of the first- and second-encoded users.
///
/// `k_u1` belongs to the user encoded first and `k_u2` to the user encoded
/// second; `t1` is an `n_T x N` factor with `k_u1 = t1 t1^H`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitCovariances {
    pub k_u1: CMatrix,
    pub k_u2: CMatrix,
    pub alpha: f64,
    pub t1: CMatrix,
    pub rank_n: usize,
}

impl TransmitCovariances {
    /// Builds from the first user's factor and the second user's covariance.
    pub fn from_factor(t1: CMatrix, k_u2: CMatrix, alpha: f64) -> Result<Self> {
        let n_t = t1.nrows();
        if t1.ncols() == 0 {
            return Err(Error::dims("t1 columns", 1, 0));
        }
        if k_u2.nrows() != n_t || k_u2.ncols() != n_t {
            return Err(Error::dims("k_u2", n_t, k_u2.nrows()));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::invalid("alpha", "must lie in [0, 1]"));
        }
        let k_u1 = symmetrize(&(&t1 * t1.adjoint()));
        let rank_n = t1.ncols();
        Ok(TransmitCovariances {
            k_u1,
            k_u2,
            alpha,
            t1,
            rank_n,
        })
    }

    /// `k_u1 = alpha p e1 e1^H`, `k_u2 = (1 - alpha) p e2 e2^H` for unit vectors `e1`, `e2`.
    pub fn unit_rank(e1: &CVector, e2: &CVector, alpha: f64, total_power: f64) -> Result<Self> {
        if e1.len() != e2.len() {
            return Err(Error::dims("e2", e1.len(), e2.len()));
        }
        let p1 = alpha * total_power;
        let p2 = (1.0 - alpha) * total_power;
        let t1 = CMatrix::from_column_slice(e1.len(), 1, (e1 * C64::new(p1.sqrt(), 0.0)).as_slice());
        Self::from_factor(t1, outer_scaled(e2, p2), alpha)
    }

    pub fn n_t(&self) -> usize {
        self.t1.nrows()
    }

    pub fn total(&self) -> CMatrix {
        &self.k_u1 + &self.k_u2
    }

    pub fn first_is_zero(&self) -> bool {
        self.t1.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    pub fn second_is_zero(&self) -> bool {
        self.k_u2.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    /// Power budget and factorization checks.
    pub fn check(&self, total_power: f64) -> Result<()> {
        let used = self.k_u1.trace().re + self.k_u2.trace().re;
        if used > total_power + 1e-9 {
            return Err(Error::invalid(
                "transmit covariances",
                format!("trace {used} exceeds power {total_power}"),
            ));
        }
        let recon = &self.t1 * self.t1.adjoint();
        if max_abs_diff(&recon, &self.k_u1) > 1e-10 {
            return Err(Error::NumericalConsistency("t1 t1^H does not reproduce k_u1".into()));
        }
        for (name, k) in [("k_u1", &self.k_u1), ("k_u2", &self.k_u2)] {
            if hermitian_deviation(k) > HERMITIAN_TOL {
                return Err(Error::NonHermitian {
                    field: name.into(),
                    deviation: hermitian_deviation(k),
                });
            }
            let min = hermitian_eigenvalues(k)[0];
            if min < PSD_FLOOR * frobenius(k).max(1.0) {
                return Err(Error::NotPsd {
                    field: name.into(),
                    min_eigenvalue: min,
                });
            }
        }
        Ok(())
    }
}

/// Linear inflation factor of the secret LA-GPC, `N x n_T`, plus solver diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct InflationFactor {
    pub b: CMatrix,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl InflationFactor {
    pub fn zeros(rank_n: usize, n_t: usize) -> Self {
        Self::fixed(CMatrix::zeros(rank_n, n_t))
    }

    /// A closed-form factor (no iteration).
    pub fn fixed(b: CMatrix) -> Self {
        InflationFactor {
            b,
            iterations: 0,
            residual: 0.0,
            converged: true,
        }
    }

    pub fn for_covariances(tc: &TransmitCovariances) -> Self {
        Self::zeros(tc.rank_n, tc.n_t())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_is_valid() {
        let s = ChannelStats::new("u", CVector::zeros(2), CMatrix::identity(2, 2)).unwrap();
        assert_eq!(s.cov, CMatrix::identity(2, 2));
    }

    #[test]
    fn example_covariance_is_valid() {
        let s = ChannelStats::real("u1", &[0.0, 0.0], &[0.2, 0.0, 0.0, 0.04]).unwrap();
        assert_eq!(s.cov[(0, 0)], c(0.2));
        assert_eq!(s.cov[(1, 1)], c(0.04));
    }

    #[test]
    fn asymmetric_is_rejected() {
        let err = ChannelStats::real("u", &[0.0, 0.0], &[1.0, 2.0, 0.0, 1.0]).unwrap_err();
        match err {
            Error::NonHermitian { field, .. } => assert_eq!(field, "u.cov"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indefinite_is_rejected() {
        let err = ChannelStats::real("u", &[0.0, 0.0], &[1.0, 2.0, 2.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NotPsd { .. }));
    }

    #[test]
    fn near_psd_is_clipped() {
        let s = ChannelStats::real("u", &[0.0, 0.0], &[1.0, 1.0, 1.0, 1.0 - 1e-11]).unwrap();
        assert!(hermitian_eigenvalues(&s.cov)[0] >= -1e-14);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let err = ChannelStats::new("u", CVector::zeros(3), CMatrix::identity(2, 2)).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }

    #[test]
    fn k_factor_examples() {
        let zero = ChannelStats::iid("a", 2, 1.0).unwrap();
        assert_eq!(rician_k_factor(&zero), Some(0.0));
        let unit = ChannelStats::real("b", &[1.0, 0.0], &[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert_eq!(rician_k_factor(&unit), Some(1.0));
        let rice = ChannelStats::real("c", &[0.7, 0.1], &[0.2, 0.0, 0.0, 0.04]).unwrap();
        assert!((rician_k_factor(&rice).unwrap() - 0.5 / 0.24).abs() < 1e-12);
        let det = ChannelStats::real("d", &[1.0, 0.0], &[0.0; 4]).unwrap();
        assert_eq!(rician_k_factor(&det), None);
    }

    #[test]
    fn order_rejects_equal_users() {
        assert!(EncodingOrder::new(User::One, User::One).is_err());
        assert_eq!(EncodingOrder::ONE_FIRST.swapped(), EncodingOrder::TWO_FIRST);
    }

    #[test]
    fn unit_rank_passes_checks() {
        let e1 = CVector::from_column_slice(&[c(0.6), C64::new(0.0, 0.8)]);
        let e2 = CVector::from_column_slice(&[c(1.0), c(0.0)]);
        let tc = TransmitCovariances::unit_rank(&e1, &e2, 0.3, 10.0).unwrap();
        tc.check(10.0).unwrap();
        assert!((tc.k_u1.trace().re - 3.0).abs() < 1e-12);
        assert!((tc.k_u2.trace().re - 7.0).abs() < 1e-12);
    }

    #[test]
    fn scenario_validation() {
        let a = ChannelStats::iid("a", 2, 1.0).unwrap();
        let b = ChannelStats::iid("b", 3, 1.0).unwrap();
        assert!(Scenario::new(a.clone(), b, 1.0).is_err());
        assert!(Scenario::new(a.clone(), a.clone(), -1.0).is_err());
        let s = Scenario::new(a.clone(), a, 10.0).unwrap();
        assert_eq!(s.alphas().len(), 41);
        assert_eq!(s.epsilon, 1e-3);
    }
}
