//! Shared scenarios and independent oracles for the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use secrecy_region::{ChannelStats, Scenario};

pub type CMatrix = DMatrix<C64>;

pub const RAYLEIGH_COV1: [f64; 4] = [0.2, 0.0, 0.0, 0.04];
pub const RAYLEIGH_COV2: [f64; 4] = [0.1, 0.08, 0.08, 0.1];
pub const RICIAN_MEAN1: [f64; 2] = [0.7, 0.1];
pub const RICIAN_MEAN2: [f64; 2] = [0.1, 0.6];

pub fn rayleigh_pair() -> (ChannelStats, ChannelStats) {
    (
        ChannelStats::real("rayleigh-1", &[0.0, 0.0], &RAYLEIGH_COV1).unwrap(),
        ChannelStats::real("rayleigh-2", &[0.0, 0.0], &RAYLEIGH_COV2).unwrap(),
    )
}

pub fn rician_pair() -> (ChannelStats, ChannelStats) {
    (
        ChannelStats::real("rician-1", &RICIAN_MEAN1, &RAYLEIGH_COV1).unwrap(),
        ChannelStats::real("rician-2", &RICIAN_MEAN2, &RAYLEIGH_COV2).unwrap(),
    )
}

pub fn scenario(pair: (ChannelStats, ChannelStats), p_t: f64) -> Scenario {
    Scenario::new(pair.0, pair.1, p_t).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng) * scale)
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = random_matrix(rng, n, n, 1.0);
    (&g + g.adjoint()) * C64::new(0.5, 0.0)
}

pub fn random_positive_definite(rng: &mut ChaCha8Rng, n: usize, floor: f64) -> CMatrix {
    let g = random_matrix(rng, n, n, 1.0);
    &g * g.adjoint() + CMatrix::identity(n, n) * C64::new(floor, 0.0)
}

/// Exponential integral `E1(x)` for `0 < x <= 1` from its convergent series.
pub fn exp_integral_e1(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..200 {
        term *= -x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add.abs() < 1e-18 {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

/// `E[log2(1 + rho |h|^2)]` for `h ~ CN(0, 1)`.
pub fn ergodic_rate_oracle(rho: f64) -> f64 {
    let x = 1.0 / rho;
    x.exp() * exp_integral_e1(x) / std::f64::consts::LN_2
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(m: &CMatrix) -> C64 {
    let n = m.nrows();
    match n {
        0 => C64::new(1.0, 0.0),
        1 => m[(0, 0)],
        _ => {
            let mut det = C64::new(0.0, 0.0);
            for j in 0..n {
                let minor = m.clone().remove_row(0).remove_column(j);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                det += m[(0, j)] * cofactor_det(&minor) * sign;
            }
            det
        }
    }
}

/// The block matrix written out entry group by entry group.
pub fn block_matrix_oracle(t1: &CMatrix, k2: &CMatrix, b: &CMatrix, h: &[C64]) -> CMatrix {
    let n = t1.ncols();
    let h = nalgebra::DVector::from_column_slice(h);
    let k1 = t1 * t1.adjoint();
    let tl = CMatrix::identity(n, n) + b * k2 * b.adjoint();
    let tr = (t1.adjoint() + b * k2) * &h;
    let bl = h.adjoint() * (t1 + k2 * b.adjoint());
    let br = C64::new(1.0, 0.0) + (h.adjoint() * (&k1 + k2) * &h)[(0, 0)];
    CMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => tl[(i, j)],
        (true, false) => tr[(i, 0)],
        (false, true) => bl[(0, j)],
        (false, false) => br,
    })
}

pub fn quotient(a: &CMatrix, b: &CMatrix, e: &[C64]) -> f64 {
    let v = nalgebra::DVector::from_column_slice(e);
    (v.adjoint() * a * &v)[(0, 0)].re / (v.adjoint() * b * &v)[(0, 0)].re
}

/// Maximum of `e^H A e / e^H B e` by random sphere sampling followed by
/// compass search over the real and imaginary coordinates.
pub fn brute_force_grq(a: &CMatrix, b: &CMatrix, rng: &mut ChaCha8Rng, samples: usize) -> f64 {
    let n = a.nrows();
    let mut best: Vec<C64> = vec![C64::new(1.0, 0.0); n];
    let mut best_q = quotient(a, b, &best);
    for _ in 0..samples {
        let e: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        let q = quotient(a, b, &e);
        if q > best_q {
            best_q = q;
            best = e;
        }
    }
    let norm = best.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    best.iter_mut().for_each(|z| *z /= norm);

    let mut step = 0.25;
    while step > 1e-11 {
        let mut improved = false;
        for k in 0..2 * n {
            for sign in [1.0, -1.0] {
                let mut trial = best.clone();
                let delta = if k % 2 == 0 {
                    C64::new(sign * step, 0.0)
                } else {
                    C64::new(0.0, sign * step)
                };
                trial[k / 2] += delta;
                let q = quotient(a, b, &trial);
                if q > best_q {
                    best_q = q;
                    best = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step /= 2.0;
        }
    }
    best_q
}
