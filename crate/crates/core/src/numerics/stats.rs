//! Kolmogorov–Smirnov distances and path-level bootstrap resampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Two-sample KS distance; both inputs are sorted in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        // advance past ties on both sides before comparing the CDFs
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// KS distance of a sample against an explicit CDF; sorts in place.
pub fn ks_against_cdf<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let c = cdf(x);
        d = d.max((c - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Bootstrap mean and standard error of a statistic of the data.
pub fn bootstrap<F: Fn(&[f64]) -> f64>(
    data: &[f64],
    resamples: usize,
    seed: u64,
    stat: F,
) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = vec![0.0; data.len()];
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..resamples {
        for slot in buf.iter_mut() {
            *slot = data[rng.random_range(0..data.len())];
        }
        let v = stat(&buf);
        sum += v;
        sum_sq += v * v;
    }
    let mean = sum / resamples as f64;
    let var = (sum_sq / resamples as f64 - mean * mean).max(0.0);
    (mean, var.sqrt())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean.
pub fn stderr_of_mean(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let var = xs.iter().map(|&x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0);
    (var / xs.len() as f64).sqrt()
}
