//! The two-group normal mixture
//! `f(x) = q φ_p(x; α e₁, I) + (1 − q) φ_p(x; −α e₁, I)`
//! and its two standardizations.
//!
//! Sampling uses the stochastic representation `x = α s e₁ + ε` with
//! `P(s = 1) = q` and `ε ~ N_p(0, I)`. In "total" coordinates the first axis
//! is divided by `c₁ = √(1 + 4q(1−q)α²)` so the overall covariance is `I_p`,
//! giving `y = δ s e₁ + η`.
//!
//! A dataset is drawn from one ChaCha8 stream seeded with the caller's seed;
//! each row consumes one uniform (for `s`) followed by `p` standard normals.
//! Replicated experiments give each replicate its own seed through
//! [`crate::seed::derive_indexed`].

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::error::{IcsError, Result};
use crate::linalg::{column_means, inv_sqrt_spd, scatter_about};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureParams {
    p: usize,
    q: f64,
    alpha: f64,
}

impl MixtureParams {
    pub fn new(p: usize, q: f64, alpha: f64) -> Result<Self> {
        if p < 1 {
            return Err(IcsError::InvalidParameter("dimension p must be at least 1".into()));
        }
        if !(q > 0.0 && q < 1.0) {
            return Err(IcsError::InvalidParameter(format!("mixing proportion q={q} not in (0,1)")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(IcsError::InvalidParameter(format!("separation alpha={alpha} must be finite and >= 0")));
        }
        Ok(Self { p, q, alpha })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `var(s) = 4q(1−q)`.
    pub fn sigma2(&self) -> f64 {
        4.0 * self.q * (1.0 - self.q)
    }

    /// Scale of the first axis, `c₁ = √(1 + 4q(1−q)α²)`.
    pub fn c1(&self) -> f64 {
        (1.0 + self.sigma2() * self.alpha * self.alpha).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandardizedParams {
    /// Group half-separation in total coordinates.
    pub delta: f64,
    /// Within-group variance of the first total coordinate.
    pub sigma_eta2: f64,
    /// `c₂ / c₁ = 1 / c₁`.
    pub c: f64,
    /// `E(s) = 2q − 1`.
    pub m: f64,
    /// `var(s) = 4q(1 − q)`.
    pub sigma2: f64,
}

/// Which coordinate system [`sample_mixture`] returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coords {
    /// `x = α s e₁ + ε`.
    Raw,
    /// `y = C⁻¹ x`, overall covariance `I_p`.
    Total,
}

/// An `n × p` data matrix, optionally carrying the drawn group labels.
///
/// Labels are for evaluation only; no estimator reads them.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: DMatrix<f64>,
    labels: Option<Vec<i8>>,
}

impl DataMatrix {
    pub fn new(values: DMatrix<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(IcsError::NonFinite);
        }
        Ok(Self { values, labels: None })
    }

    pub fn with_labels(values: DMatrix<f64>, labels: Vec<i8>) -> Result<Self> {
        if labels.len() != values.nrows() {
            return Err(IcsError::DimensionMismatch { expected: values.nrows(), got: labels.len() });
        }
        if labels.iter().any(|&s| s != 1 && s != -1) {
            return Err(IcsError::InvalidParameter("labels must be +1 or -1".into()));
        }
        let mut d = Self::new(values)?;
        d.labels = Some(labels);
        Ok(d)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(IcsError::EmptyInput);
        }
        let p = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != p) {
            return Err(IcsError::DimensionMismatch { expected: p, got: bad.len() });
        }
        Self::new(DMatrix::from_fn(n, p, |i, j| rows[i][j]))
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn labels(&self) -> Option<&[i8]> {
        self.labels.as_deref()
    }

    pub fn into_values(self) -> DMatrix<f64> {
        self.values
    }

    /// `X a` as a plain vector.
    pub fn project(&self, a: &DVector<f64>) -> Vec<f64> {
        (&self.values * a).iter().copied().collect()
    }
}

pub fn derive_standardized(params: &MixtureParams) -> StandardizedParams {
    let sigma2 = params.sigma2();
    let a2 = params.alpha * params.alpha;
    let c1 = params.c1();
    let delta = params.alpha / c1;
    let eta_from_alpha = 1.0 / (1.0 + sigma2 * a2);
    let eta_from_delta = 1.0 - sigma2 * delta * delta;
    debug_assert!(
        (eta_from_alpha - eta_from_delta).abs() <= 1e-12 * eta_from_alpha.max(1e-300) + 1e-15,
        "σ²_η formulas disagree: {eta_from_alpha} vs {eta_from_delta}"
    );
    StandardizedParams {
        delta,
        sigma_eta2: eta_from_alpha,
        c: 1.0 / c1,
        m: 2.0 * params.q - 1.0,
        sigma2,
    }
}

/// Population mean `(2q−1)α e₁` and covariance `4q(1−q)α² e₁e₁ᵀ + I_p`.
pub fn population_moments(params: &MixtureParams) -> (DVector<f64>, DMatrix<f64>) {
    let p = params.p;
    let mut mu = DVector::zeros(p);
    mu[0] = (2.0 * params.q - 1.0) * params.alpha;
    let mut sigma = DMatrix::identity(p, p);
    sigma[(0, 0)] += params.sigma2() * params.alpha * params.alpha;
    (mu, sigma)
}

pub fn sample_mixture(params: &MixtureParams, n: usize, seed: u64, coords: Coords) -> Result<DataMatrix> {
    if n == 0 {
        return Err(IcsError::EmptyInput);
    }
    let p = params.p;
    let scale1 = match coords {
        Coords::Raw => 1.0,
        Coords::Total => 1.0 / params.c1(),
    };
    let mut rng = seed::rng(seed);
    let mut values = DMatrix::<f64>::zeros(n, p);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let u: f64 = rng.random();
        let s: i8 = if u < params.q { 1 } else { -1 };
        labels.push(s);
        for j in 0..p {
            let e: f64 = rng.sample(StandardNormal);
            values[(i, j)] = e;
        }
        values[(i, 0)] = (values[(i, 0)] + params.alpha * f64::from(s)) * scale1;
    }
    DataMatrix::with_labels(values, labels)
}

/// Whiten to sample mean 0 and sample covariance `I` with the symmetric
/// inverse square root `W = S^{-1/2}`: `Z = (X − 1x̄ᵀ) W`.
///
/// A direction `b` found on `Z` corresponds to `W b` on `X`.
pub fn standardize_data(x: &DataMatrix) -> Result<(DataMatrix, DVector<f64>, DMatrix<f64>)> {
    let values = x.values();
    let (n, p) = values.shape();
    if n == 0 {
        return Err(IcsError::EmptyInput);
    }
    let mean = column_means(values);
    let rows: Vec<usize> = (0..n).collect();
    let cov = scatter_about(values, &rows, &mean);
    let w = inv_sqrt_spd(&cov, 1e-12)?;
    let mut centred = values.clone();
    for j in 0..p {
        centred.column_mut(j).add_scalar_mut(-mean[j]);
    }
    let z = centred * &w;
    let out = DataMatrix { values: z, labels: x.labels.clone() };
    Ok((out, mean, w))
}
