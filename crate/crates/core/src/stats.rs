//! Small statistics helpers shared by the harnesses: order-insensitive
//! summation, sample moments, and a one-sample Kolmogorov-Smirnov statistic
//! against the standard normal.

/// Pairwise (cascade) summation. Order-insensitive to worker count as long
/// as the input slice itself is ordered, and much tighter error growth than
/// a running sum for the path counts used here.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (n - 1) as f64
}

/// Standard error of the sample mean.
pub fn standard_error(xs: &[f64]) -> f64 {
    (sample_variance(xs) / xs.len() as f64).sqrt()
}

/// Sample skewness (biased, adequate for diagnostics at n >= 1e3).
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    let m3: Vec<f64> = xs.iter().map(|x| (x - m).powi(3)).collect();
    let v = pairwise_sum(&m2) / n;
    pairwise_sum(&m3) / n / v.powf(1.5)
}

/// Sample excess kurtosis.
pub fn excess_kurtosis(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2: Vec<f64> = xs.iter().map(|x| (x - m).powi(2)).collect();
    let m4: Vec<f64> = xs.iter().map(|x| (x - m).powi(4)).collect();
    let v = pairwise_sum(&m2) / n;
    pairwise_sum(&m4) / n / (v * v) - 3.0
}

/// Error function, Abramowitz-Stegun 7.1.26 (|err| < 1.5e-7), sufficient for
/// the diagnostic CDF comparisons done here.
pub fn erf(x: f64) -> f64 {
    let sign = if x < 0.0 { -1.0 } else { 1.0 };
    let x = x.abs();
    let t = 1.0 / (1.0 + 0.3275911 * x);
    let y = 1.0
        - (((((1.061405429 * t - 1.453152027) * t) + 1.421413741) * t - 0.284496736) * t
            + 0.254829592)
            * t
            * (-x * x).exp();
    sign * y
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * (1.0 + erf(x / std::f64::consts::SQRT_2))
}

/// One-sample KS statistic of `xs` against N(0,1).
pub fn ks_statistic_normal(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, x) in sorted.iter().enumerate() {
        let cdf = normal_cdf(*x);
        let lo = (cdf - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - cdf).abs();
        d = d.max(lo).max(hi);
    }
    d
}

/// Mean and standard error of per-batch statistics: `stat` is evaluated on
/// `batches` contiguous blocks and the spread across blocks estimates the
/// error of the full-sample statistic.
pub fn batch_se(xs: &[f64], batches: usize, stat: impl Fn(&[f64]) -> f64) -> f64 {
    assert!(batches >= 2 && xs.len() >= batches);
    let bs = xs.len() / batches;
    let vals: Vec<f64> = (0..batches).map(|b| stat(&xs[b * bs..(b + 1) * bs])).collect();
    (sample_variance(&vals) / batches as f64).sqrt()
}
