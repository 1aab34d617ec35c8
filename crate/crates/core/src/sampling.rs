//! Seeded fading samples and Monte-Carlo expectations.
//!
//! Every expectation is reduced in fixed chunks of [`CHUNK`] samples. Chunks
//! may be processed on any number of rayon workers, but the partial results
//! are always combined by the same pairwise tree, so the outcome is
//! bit-identical for any thread count.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::channel::ChannelStats;
use crate::error::{Error, Result};
use crate::linalg::{psd_factor, C64, ZERO};

/// Reduction chunk size.
pub const CHUNK: usize = 1024;

/// Realizations of one user's channel vector, stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingBatch {
    data: Vec<C64>,
    n_t: usize,
    pub source_seed: u64,
    pub stats_label: String,
}

impl FadingBatch {
    /// Wraps explicit samples; all must have the same length.
    pub fn from_samples(samples: &[Vec<C64>], label: impl Into<String>) -> Result<Self> {
        let n_t = samples.first().map(Vec::len).ok_or(Error::BadCount(0))?;
        if n_t == 0 {
            return Err(Error::dims("sample length", 1, 0));
        }
        let mut data = Vec::with_capacity(n_t * samples.len());
        for s in samples {
            if s.len() != n_t {
                return Err(Error::dims("sample length", n_t, s.len()));
            }
            data.extend_from_slice(s);
        }
        Ok(FadingBatch {
            data,
            n_t,
            source_seed: 0,
            stats_label: label.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.n_t
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn n_t(&self) -> usize {
        self.n_t
    }

    pub fn sample(&self, i: usize) -> &[C64] {
        &self.data[i * self.n_t..(i + 1) * self.n_t]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[C64]> {
        self.data.chunks_exact(self.n_t)
    }
}

/// Draws `count` realizations of `CN(mean, cov)` as `mean + L z`.
///
/// `z` has independent real and imaginary parts of variance 1/2, drawn from a
/// ChaCha8 stream seeded with `seed`.
pub fn sample_channel(stats: &ChannelStats, count: usize, seed: u64) -> Result<FadingBatch> {
    if count == 0 {
        return Err(Error::BadCount(count));
    }
    let n = stats.n_t();
    let factor = psd_factor(&stats.cov);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let mut data = Vec::with_capacity(count * n);
    let mut z = vec![ZERO; n];
    for _ in 0..count {
        for zi in z.iter_mut() {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            *zi = C64::new(re * scale, im * scale);
        }
        for i in 0..n {
            let mut h = stats.mean[i];
            for (j, zj) in z.iter().enumerate() {
                h += factor[(i, j)] * zj;
            }
            data.push(h);
        }
    }
    Ok(FadingBatch {
        data,
        n_t: n,
        source_seed: seed,
        stats_label: stats.label.clone(),
    })
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
}

impl Estimate {
    pub fn exact(mean: f64) -> Self {
        Estimate { mean, stderr: 0.0 }
    }

    /// Difference of two estimates from independent batches.
    pub fn minus(self, other: Estimate) -> Estimate {
        Estimate {
            mean: self.mean - other.mean,
            stderr: self.stderr.hypot(other.stderr),
        }
    }

    pub fn plus(self, other: Estimate) -> Estimate {
        Estimate {
            mean: self.mean + other.mean,
            stderr: self.stderr.hypot(other.stderr),
        }
    }
}

/// Running moments of several outputs (Chan et al. pairwise merge).
#[derive(Debug, Clone)]
struct Moments {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(k: usize) -> Self {
        Moments {
            n: 0,
            mean: vec![0.0; k],
            m2: vec![0.0; k],
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += d * (v - *m);
        }
    }

    fn merge(mut self, other: Moments) -> Moments {
        if other.n == 0 {
            return self;
        }
        if self.n == 0 {
            return other;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * (nb / n);
            self.m2[i] += other.m2[i] + d * d * (na * nb / n);
        }
        self.n += other.n;
        self
    }

    fn estimates(&self) -> Vec<Estimate> {
        let n = self.n as f64;
        self.mean
            .iter()
            .zip(&self.m2)
            .map(|(&mean, &m2)| {
                let stderr = if self.n > 1 {
                    (m2 / (n - 1.0) / n).max(0.0).sqrt()
                } else {
                    0.0
                };
                Estimate { mean, stderr }
            })
            .collect()
    }
}

/// Fixed-order pairwise reduction of per-chunk results.
fn tree_reduce<A>(mut parts: Vec<A>, merge: impl Fn(A, A) -> A) -> Option<A> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.into_iter().next()
}

/// Maps fixed chunks of `0..n` (possibly in parallel) and tree-reduces them.
pub(crate) fn chunked_reduce<A, F, G>(n: usize, chunk: F, merge: G) -> Option<A>
where
    A: Send,
    F: Fn(Range<usize>) -> A + Sync,
    G: Fn(A, A) -> A,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<A> = (0..chunks)
        .into_par_iter()
        .map(|c| chunk(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect();
    tree_reduce(parts, merge)
}

fn first_error<T>(a: Result<T>, b: Result<T>, merge: impl FnOnce(T, T) -> T) -> Result<T> {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(merge(x, y)),
        (Err(e), _) => Err(e),
        (Ok(_), Err(e)) => Err(e),
    }
}

/// Estimates of `k` per-sample outputs over `n` indices; `f(i, out)` fills `out`.
pub(crate) fn estimate_indexed<F>(n: usize, k: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync,
{
    if n == 0 {
        return Err(Error::BadCount(0));
    }
    let reduced = chunked_reduce(
        n,
        |range| -> Result<Moments> {
            let mut m = Moments::new(k);
            let mut out = vec![0.0; k];
            for i in range {
                f(i, &mut out)?;
                if out.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Evaluation { index: i });
                }
                m.push(&out);
            }
            Ok(m)
        },
        |a, b| first_error(a, b, Moments::merge),
    );
    Ok(reduced.expect("n > 0")?.estimates())
}

/// Arithmetic mean of `f` over the batch.
pub fn mc_expect<F>(batch: &FadingBatch, f: F) -> Result<f64>
where
    F: Fn(&[C64]) -> f64 + Sync,
{
    Ok(mc_estimate(batch, f)?.mean)
}

/// Mean and standard error of `f` over the batch.
pub fn mc_estimate<F>(batch: &FadingBatch, f: F) -> Result<Estimate>
where
    F: Fn(&[C64]) -> f64 + Sync,
{
    let est = estimate_indexed(batch.len(), 1, |i, out| {
        out[0] = f(batch.sample(i));
        Ok(())
    })?;
    Ok(est[0])
}

/// Several outputs per sample in one pass; `f(h, out)` fills `out` of length `k`.
pub fn mc_estimates<F>(batch: &FadingBatch, k: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(&[C64], &mut [f64]) -> Result<()> + Sync,
{
    estimate_indexed(batch.len(), k, |i, out| f(batch.sample(i), out))
}

/// Joint realizations `(a_i, b_i)` paired by index.
pub fn mc_estimates_paired<F>(a: &FadingBatch, b: &FadingBatch, k: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(&[C64], &[C64], &mut [f64]) -> Result<()> + Sync,
{
    if a.len() != b.len() {
        return Err(Error::dims("paired batch length", a.len(), b.len()));
    }
    estimate_indexed(a.len(), k, |i, out| f(a.sample(i), b.sample(i), out))
}

/// Componentwise mean of a complex-valued per-sample function of size `dim`.
pub fn mc_mean_complex<F>(batch: &FadingBatch, dim: usize, f: F) -> Result<Vec<C64>>
where
    F: Fn(&[C64], &mut [C64]) -> Result<()> + Sync,
{
    let n = batch.len();
    if n == 0 {
        return Err(Error::BadCount(0));
    }
    let reduced = chunked_reduce(
        n,
        |range| -> Result<Vec<C64>> {
            let mut acc = vec![ZERO; dim];
            let mut out = vec![ZERO; dim];
            for i in range {
                f(batch.sample(i), &mut out)?;
                if out.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                    return Err(Error::Evaluation { index: i });
                }
                for (a, o) in acc.iter_mut().zip(&out) {
                    *a += o;
                }
            }
            Ok(acc)
        },
        |a, b| {
            first_error(a, b, |mut x, y| {
                for (p, q) in x.iter_mut().zip(y) {
                    *p += q;
                }
                x
            })
        },
    );
    let total = reduced.expect("n > 0")?;
    Ok(total.into_iter().map(|z| z / n as f64).collect())
}

/// Independent batches for both users of a scenario, sharing one base seed.
#[derive(Debug, Clone)]
pub struct ScenarioBatches {
    pub user1: FadingBatch,
    pub user2: FadingBatch,
}

impl ScenarioBatches {
    /// User 1 draws from `seed`, user 2 from `seed + 1`.
    pub fn draw(user1: &ChannelStats, user2: &ChannelStats, count: usize, seed: u64) -> Result<Self> {
        Ok(ScenarioBatches {
            user1: sample_channel(user1, count, seed)?,
            user2: sample_channel(user2, count, seed.wrapping_add(1))?,
        })
    }

    pub fn for_user(&self, u: crate::channel::User) -> &FadingBatch {
        match u {
            crate::channel::User::One => &self.user1,
            crate::channel::User::Two => &self.user2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{CMatrix, CVector};

    #[test]
    fn deterministic_channel_repeats_mean() {
        let mu = CVector::from_column_slice(&[C64::new(0.3, -0.2), C64::new(1.0, 0.0)]);
        let stats = ChannelStats::new("d", mu.clone(), CMatrix::zeros(2, 2)).unwrap();
        let batch = sample_channel(&stats, 17, 3).unwrap();
        for h in batch.iter() {
            assert_eq!(h, mu.as_slice());
        }
    }

    #[test]
    fn same_seed_same_batch() {
        let stats = ChannelStats::iid("u", 2, 1.0).unwrap();
        assert_eq!(sample_channel(&stats, 100, 9).unwrap(), sample_channel(&stats, 100, 9).unwrap());
        assert_ne!(sample_channel(&stats, 100, 9).unwrap(), sample_channel(&stats, 100, 10).unwrap());
    }

    #[test]
    fn zero_count_rejected() {
        let stats = ChannelStats::iid("u", 2, 1.0).unwrap();
        assert_eq!(sample_channel(&stats, 0, 1).unwrap_err(), Error::BadCount(0));
    }

    #[test]
    fn constant_function_is_exact() {
        let stats = ChannelStats::iid("u", 2, 1.0).unwrap();
        let batch = sample_channel(&stats, 5000, 1).unwrap();
        assert_eq!(mc_expect(&batch, |_| 0.1).unwrap(), 0.1);
        assert_eq!(mc_expect(&batch, |_| -7.25).unwrap(), -7.25);
    }

    #[test]
    fn nan_reports_index() {
        let stats = ChannelStats::iid("u", 1, 1.0).unwrap();
        let batch = sample_channel(&stats, 3000, 1).unwrap();
        let err = mc_expect(&batch, |h| if h == batch.sample(2100) { f64::NAN } else { 0.0 }).unwrap_err();
        assert_eq!(err, Error::Evaluation { index: 2100 });
    }

    #[test]
    fn unit_normal_moments() {
        let stats = ChannelStats::iid("u", 2, 1.0).unwrap();
        let batch = sample_channel(&stats, 100_000, 5).unwrap();
        let n = batch.len() as f64;
        for i in 0..2 {
            let m: C64 = batch.iter().map(|h| h[i]).sum::<C64>() / n;
            assert!(m.norm() < 0.02, "mean {m}");
            for j in 0..2 {
                let c: C64 = batch.iter().map(|h| h[i] * h[j].conj()).sum::<C64>() / n;
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((c - C64::new(target, 0.0)).norm() < 0.05, "cov[{i}{j}] = {c}");
            }
        }
    }

    #[test]
    fn tree_reduce_handles_odd_counts() {
        let parts: Vec<u32> = (1..=7).collect();
        assert_eq!(tree_reduce(parts, |a, b| a + b), Some(28));
    }
}
