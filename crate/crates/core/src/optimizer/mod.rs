//! Covariance selection, the inflation-factor solver and region assembly.

mod covariance;
mod frontier;
mod grq;
mod inflation;

pub use covariance::{aligned_covariances, select_covariances, select_covariances_for};
pub use frontier::{dominance_violation, dominates, frontier_r2_at, max_stderr, upper_right_hull};
pub use grq::{fix_phase, grq_max, rayleigh_quotient, GrqProblem, MIN_DENOMINATOR_EIGENVALUE};
pub use inflation::{inflation_update, solve_inflation_factor, SolverSettings, MAX_CONDITION, MIN_STEP};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::channel::{EncodingOrder, InflationFactor, Scenario, User};
use crate::error::Result;
use crate::linalg::CMatrix;
use crate::region::{full_csit_rates, low_snr_region, mmse_inflation_factor, secrecy_rates, RateMeta, RatePair, Scheme};
use crate::sampling::ScenarioBatches;

/// Grid resolution of the time-sharing `(t, beta)` sweep.
pub const TIME_SHARING_GRID: usize = 21;

/// Frontier plus every evaluated point of one scheme.
#[derive(Debug, Clone)]
pub struct RegionResult {
    pub frontier: Vec<RatePair>,
    pub raw_points: Vec<RatePair>,
    pub scenario_echo: Scenario,
    pub scheme: Scheme,
}

impl RegionResult {
    fn from_points(scenario: &Scenario, scheme: Scheme, raw_points: Vec<RatePair>) -> Self {
        RegionResult {
            frontier: upper_right_hull(&raw_points, scheme),
            raw_points,
            scenario_echo: scenario.clone(),
            scheme,
        }
    }

    /// Largest standard error over the raw points.
    pub fn max_stderr(&self) -> f64 {
        max_stderr(&self.raw_points)
    }
}

/// Draws the common-random-number batches of a scenario.
pub fn draw_batches(scenario: &Scenario) -> Result<ScenarioBatches> {
    ScenarioBatches::draw(&scenario.user1, &scenario.user2, scenario.mc_samples, scenario.seed)
}

/// Builds the region of `scheme`, drawing fresh batches from the scenario seed.
pub fn build_region(scenario: &Scenario, scheme: Scheme) -> Result<RegionResult> {
    scenario.validate()?;
    let batches = draw_batches(scenario)?;
    build_region_with(scenario, scheme, &batches)
}

/// Builds the region of `scheme` over pre-drawn batches.
pub fn build_region_with(scenario: &Scenario, scheme: Scheme, batches: &ScenarioBatches) -> Result<RegionResult> {
    scenario.validate()?;
    let points = match scheme {
        Scheme::TimeSharing => time_sharing_points(scenario, batches)?,
        Scheme::LowSnr => scenario
            .alphas()
            .into_iter()
            .map(|a| low_snr_region(&scenario.user1, &scenario.user2, scenario.total_power, a))
            .collect::<Result<Vec<_>>>()?,
        _ => {
            let items: Vec<(f64, EncodingOrder)> = scenario
                .alphas()
                .into_iter()
                .flat_map(|a| EncodingOrder::both().map(|o| (a, o)))
                .collect();
            items
                .par_iter()
                .map(|&(alpha, order)| sweep_point(scenario, scheme, batches, alpha, order))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(RegionResult::from_points(scenario, scheme, points))
}

/// One `(alpha, order)` evaluation of a sweep scheme; this is what each CSV row records.
pub fn sweep_point(
    scenario: &Scenario,
    scheme: Scheme,
    batches: &ScenarioBatches,
    alpha: f64,
    order: EncodingOrder,
) -> Result<RatePair> {
    let tc = select_covariances(scenario, alpha, order)?;
    let (b1, b2) = (&batches.user1, &batches.user2);
    match scheme {
        Scheme::StatisticalCsit => {
            let b = solve_inflation_factor(&tc, b1, b2, order, SolverSettings::from(scenario))?;
            secrecy_rates(&tc, &b, b1, b2, order, scheme)
        }
        Scheme::InterferenceAsNoise => {
            secrecy_rates(&tc, &InflationFactor::for_covariances(&tc), b1, b2, order, scheme)
        }
        Scheme::MeanMmseB => {
            let b = mmse_inflation_factor(&tc, scenario.user(order.first()).mean.as_slice())?;
            secrecy_rates(&tc, &b, b1, b2, order, scheme)
        }
        Scheme::FullCsit => full_csit_rates(&tc, b1, b2, order),
        Scheme::TimeSharing | Scheme::LowSnr => Err(crate::error::Error::invalid(
            "scheme",
            format!("{scheme} is not an (alpha, order) sweep"),
        )),
    }
}

/// Single-user wiretap rate of `user` with all of `power` (the other user silent).
pub fn wiretap_rate(scenario: &Scenario, user: User, power: f64, batches: &ScenarioBatches) -> Result<RatePair> {
    let order = EncodingOrder::new(user, user.other())?;
    let tc = select_covariances_for(&scenario.user1, &scenario.user2, power, 1.0, order)?;
    let zero = InflationFactor::fixed(CMatrix::zeros(tc.rank_n, tc.n_t()));
    secrecy_rates(&tc, &zero, &batches.user1, &batches.user2, order, Scheme::TimeSharing)
}

/// Points `(t R1(P1), (1 - t) R2(P2))` with `P1 = beta P / t`, `P2 = (1 - beta) P / (1 - t)`.
fn time_sharing_points(scenario: &Scenario, batches: &ScenarioBatches) -> Result<Vec<RatePair>> {
    let p = scenario.total_power;
    let last = (TIME_SHARING_GRID - 1) as f64;
    let grid: Vec<f64> = (0..TIME_SHARING_GRID).map(|k| k as f64 / last).collect();

    let mut cells = Vec::new();
    for &t in &grid {
        for &beta in &grid {
            let (p1, p2) = if t == 0.0 {
                if beta != 0.0 {
                    continue;
                }
                (0.0, p)
            } else if t == 1.0 {
                if beta != 1.0 {
                    continue;
                }
                (p, 0.0)
            } else {
                (beta * p / t, (1.0 - beta) * p / (1.0 - t))
            };
            cells.push((t, beta, p1, p2));
        }
    }

    // each distinct (user, power) is evaluated once
    let mut needed: BTreeMap<(User, u64), f64> = BTreeMap::new();
    for &(_, _, p1, p2) in &cells {
        needed.insert((User::One, p1.to_bits()), p1);
        needed.insert((User::Two, p2.to_bits()), p2);
    }
    let keys: Vec<((User, u64), f64)> = needed.into_iter().collect();
    let rates: Vec<RatePair> = keys
        .par_iter()
        .map(|&((u, _), power)| wiretap_rate(scenario, u, power, batches))
        .collect::<Result<Vec<_>>>()?;
    let lookup: BTreeMap<(User, u64), &RatePair> = keys.iter().map(|k| k.0).zip(rates.iter()).collect();

    Ok(cells
        .into_iter()
        .map(|(t, beta, p1, p2)| {
            let w1 = lookup[&(User::One, p1.to_bits())];
            let w2 = lookup[&(User::Two, p2.to_bits())];
            let mut meta = RateMeta::new(Scheme::TimeSharing);
            meta.alpha = Some(t);
            meta.share = Some(beta);
            meta.r1_stderr = t * w1.meta.r1_stderr;
            meta.r2_stderr = (1.0 - t) * w2.meta.r2_stderr;
            RatePair::new(t * w1.r1, (1.0 - t) * w2.r2, meta)
        })
        .collect())
}

/// Time-sharing point for an explicit `(t, beta)`; the CSV rows of the
/// time-sharing scheme are reproducible through this function.
pub fn time_sharing_point(scenario: &Scenario, batches: &ScenarioBatches, t: f64, beta: f64) -> Result<RatePair> {
    let p = scenario.total_power;
    let p1 = if t > 0.0 { beta * p / t } else { 0.0 };
    let p2 = if t < 1.0 { (1.0 - beta) * p / (1.0 - t) } else { 0.0 };
    let w1 = wiretap_rate(scenario, User::One, p1, batches)?;
    let w2 = wiretap_rate(scenario, User::Two, p2, batches)?;
    let mut meta = RateMeta::new(Scheme::TimeSharing);
    meta.alpha = Some(t);
    meta.share = Some(beta);
    meta.r1_stderr = t * w1.meta.r1_stderr;
    meta.r2_stderr = (1.0 - t) * w2.meta.r2_stderr;
    Ok(RatePair::new(t * w1.r1, (1.0 - t) * w2.r2, meta))
}
