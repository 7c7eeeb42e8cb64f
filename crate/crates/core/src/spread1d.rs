//! Univariate location/spread pairs, the `p = 1` versions of the scatter
//! estimators. PP takes the ratio of two of these on a projection.
//!
//! Every `spread` is on the variance scale: `spread(c·x + b) = c²·spread(x)`.
//! For the lshorth that means the interval length is squared.

use crate::error::{IcsError, Result};
use crate::{half_size, Location};

const T2_NU: f64 = 2.0;
pub(crate) const T2_MAX_ITER: usize = 500;
pub(crate) const T2_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpreadMethod {
    Var,
    Kmat,
    T2,
    /// Squared lshorth.
    Lshorth2,
    TruncVar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpreadEstimate {
    pub location: f64,
    pub spread: f64,
    pub method: SpreadMethod,
    /// `true` when the location was fixed by the caller.
    pub constrained: bool,
    /// Indices (ascending) of the qualifying half-sample, for lshorth and
    /// truncated variance.
    pub support: Option<Vec<usize>>,
}

impl SpreadEstimate {
    fn new(location: f64, spread: f64, method: SpreadMethod, constrained: bool) -> Self {
        Self { location, spread, method, constrained, support: None }
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    if x.is_empty() {
        return Err(IcsError::EmptyInput);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(IcsError::NonFinite);
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

/// Indices sorted by value, ties by index.
fn argsort(x: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(a.cmp(&b)));
    idx
}

/// The `h` points nearest `mu`; equal distances prefer the smaller value.
fn nearest_to(x: &[f64], mu: f64, h: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| {
        (x[a] - mu)
            .abs()
            .total_cmp(&(x[b] - mu).abs())
            .then(x[a].total_cmp(&x[b]))
            .then(a.cmp(&b))
    });
    idx.truncate(h);
    idx
}

fn sorted_support(mut idx: Vec<usize>) -> Option<Vec<usize>> {
    idx.sort_unstable();
    Some(idx)
}

/// Variance with divisor `1/n`; with a fixed `μ` the spread is
/// `S + (μ − x̄)²`, i.e. the second moment about `μ`.
pub fn var1d(x: &[f64], loc: Location<f64>) -> Result<SpreadEstimate> {
    check_finite(x)?;
    let m = mean(x);
    let s = x.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / x.len() as f64;
    Ok(match loc {
        Location::Free => SpreadEstimate::new(m, s, SpreadMethod::Var, false),
        Location::Fixed(mu) => SpreadEstimate::new(mu, s + (mu - m) * (mu - m), SpreadMethod::Var, true),
    })
}

/// Kurtosis-based spread `m₄ / m₂` (central moments about the location).
///
/// Returns the estimate together with the excess kurtosis `m₄/m₂² − 3`, so
/// `spread / m₂ = kurtosis + 3`.
pub fn kurt_spread(x: &[f64], loc: Location<f64>) -> Result<(SpreadEstimate, f64)> {
    check_finite(x)?;
    let (centre, constrained) = match loc {
        Location::Free => {
            if x.len() < 2 {
                return Err(IcsError::TooFewObservations { needed: 2, got: x.len() });
            }
            (mean(x), false)
        }
        Location::Fixed(mu) => (mu, true),
    };
    let n = x.len() as f64;
    let (m2, m4) = x.iter().fold((0.0, 0.0), |(a, b), v| {
        let d2 = (v - centre) * (v - centre);
        (a + d2, b + d2 * d2)
    });
    let (m2, m4) = (m2 / n, m4 / n);
    if m2 <= 0.0 {
        return Err(IcsError::ZeroVariance);
    }
    let est = SpreadEstimate::new(centre, m4 / m2, SpreadMethod::Kmat, constrained);
    Ok((est, m4 / (m2 * m2) - 3.0))
}

/// M-estimate of scale from the `t₂` likelihood.
///
/// Fixed point of `σ² = (1/n) Σ wᵢ (xᵢ − μ)²` with `wᵢ = 3 / (2 + (xᵢ − μ)²/σ²)`;
/// for a free location `μ = Σ wᵢ xᵢ / Σ wᵢ` is updated jointly. Starts from
/// the median and the `1/n` variance.
pub fn t2_spread1d(x: &[f64], loc: Location<f64>) -> Result<SpreadEstimate> {
    check_finite(x)?;
    let n = x.len();
    let free = !loc.is_fixed();
    if free && n < 2 {
        return Err(IcsError::TooFewObservations { needed: 2, got: n });
    }
    let mut mu = match loc {
        Location::Free => median(x),
        Location::Fixed(mu) => mu,
    };
    let centre0 = if free { mean(x) } else { mu };
    let mut s2 = x.iter().map(|v| (v - centre0) * (v - centre0)).sum::<f64>() / n as f64;
    if !(s2 > 0.0) {
        return Err(IcsError::Degenerate("zero initial scale".into()));
    }
    let p_nu = 1.0 + T2_NU;
    for _ in 0..T2_MAX_ITER {
        let weights: Vec<f64> = x.iter().map(|v| p_nu / (T2_NU + (v - mu) * (v - mu) / s2)).collect();
        let new_mu = if free {
            let sw: f64 = weights.iter().sum();
            x.iter().zip(&weights).map(|(v, w)| v * w).sum::<f64>() / sw
        } else {
            mu
        };
        let new_s2 = x
            .iter()
            .zip(&weights)
            .map(|(v, w)| w * (v - new_mu) * (v - new_mu))
            .sum::<f64>()
            / n as f64;
        if !(new_s2 > 0.0) || !new_s2.is_finite() {
            return Err(IcsError::Degenerate("scale collapsed to zero".into()));
        }
        let ds = (new_s2 - s2).abs() / s2;
        let dm = (new_mu - mu).abs() / new_s2.sqrt();
        mu = new_mu;
        s2 = new_s2;
        if ds < T2_TOL && dm < T2_TOL {
            return Ok(SpreadEstimate::new(mu, s2, SpreadMethod::T2, !free));
        }
    }
    Err(IcsError::NonConvergence { iterations: T2_MAX_ITER })
}

/// Shortest interval holding at least `h = ⌈n/2⌉` points.
///
/// Free: the shortest window of `h` consecutive order statistics (leftmost on
/// ties); `location` is its midpoint. Fixed `μ`: the interval `[μ − r, μ + r]`
/// with the smallest `r` covering `h` points. `spread` is the squared length.
pub fn lshorth(x: &[f64], loc: Location<f64>) -> Result<SpreadEstimate> {
    check_finite(x)?;
    let n = x.len();
    let h = half_size(n);
    match loc {
        Location::Free => {
            let order = argsort(x);
            let (mut best, mut best_len) = (0, f64::INFINITY);
            for i in 0..=(n - h) {
                let len = x[order[i + h - 1]] - x[order[i]];
                if len < best_len {
                    best = i;
                    best_len = len;
                }
            }
            let mid = 0.5 * (x[order[best]] + x[order[best + h - 1]]);
            let mut est = SpreadEstimate::new(mid, best_len * best_len, SpreadMethod::Lshorth2, false);
            est.support = sorted_support(order[best..best + h].to_vec());
            Ok(est)
        }
        Location::Fixed(mu) => {
            let near = nearest_to(x, mu, h);
            let r = (x[*near.last().expect("h >= 1")] - mu).abs();
            let len = 2.0 * r;
            let mut est = SpreadEstimate::new(mu, len * len, SpreadMethod::Lshorth2, true);
            est.support = sorted_support(near);
            Ok(est)
        }
    }
}

/// Smallest variance of a half-sample (`h = ⌈n/2⌉`, divisor `1/h`).
///
/// Free: the optimal half-sample is always a run of consecutive order
/// statistics, so windows are scanned (leftmost on ties) and `location` is
/// the window mean. Fixed `μ`: the `h` points nearest `μ` and their second
/// moment about `μ`.
pub fn trunc_var(x: &[f64], loc: Location<f64>) -> Result<SpreadEstimate> {
    check_finite(x)?;
    let n = x.len();
    if n < 2 {
        return Err(IcsError::TooFewObservations { needed: 2, got: n });
    }
    let h = half_size(n);
    match loc {
        Location::Free => {
            let order = argsort(x);
            let sorted: Vec<f64> = order.iter().map(|&i| x[i]).collect();
            let (mut best, mut best_var, mut best_mean) = (0, f64::INFINITY, 0.0);
            for (i, w) in sorted.windows(h).enumerate() {
                let m = w.iter().sum::<f64>() / h as f64;
                let v = w.iter().map(|t| (t - m) * (t - m)).sum::<f64>() / h as f64;
                if v < best_var {
                    best = i;
                    best_var = v;
                    best_mean = m;
                }
            }
            let mut est = SpreadEstimate::new(best_mean, best_var, SpreadMethod::TruncVar, false);
            est.support = sorted_support(order[best..best + h].to_vec());
            Ok(est)
        }
        Location::Fixed(mu) => {
            let near = nearest_to(x, mu, h);
            let v = near.iter().map(|&i| (x[i] - mu) * (x[i] - mu)).sum::<f64>() / h as f64;
            let mut est = SpreadEstimate::new(mu, v, SpreadMethod::TruncVar, true);
            est.support = sorted_support(near);
            Ok(est)
        }
    }
}
