//! Multivariate scatter estimators.
//!
//! | name | estimator | implicit location |
//! |------|-----------|-------------------|
//! | var  | sample covariance, divisor `1/n` | sample mean |
//! | kmat | fourth-moment weighted covariance | sample mean |
//! | t2   | `t₂` maximum-likelihood scatter | `t₂` MLE of location |
//! | mve  | minimum volume ellipsoid over half the data | ellipsoid centre |
//! | mcd  | minimum covariance determinant half-sample | half-sample mean |
//!
//! With [`Location::Fixed`] every estimator measures scatter about the given
//! centre instead: the covariance becomes the second moment about `μ`, the
//! mve ellipsoids are centred at `μ`, and the mcd half-sample covariance is
//! taken about `μ`.
//!
//! mve and mcd are approximated by random `(p+1)`-point starts. Shapes carry
//! no consistency factor; ICS directions do not depend on scalar rescaling.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::error::{IcsError, Result};
use crate::linalg::{column_means, scatter_about, spd_cholesky, symmetrize};
use crate::Location;

mod mcd;
mod mve;
mod t2;

pub use mcd::{concentrate, mcd_scatter, Concentration};
pub use mve::mve_scatter;
pub use t2::t2_scatter;

/// Default number of random starts for mve and mcd.
pub const DEFAULT_TRIALS: usize = 500;

/// Rank tolerance for candidate and input covariances.
pub(crate) const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScatterKind {
    Var,
    Kmat,
    T2,
    Mve,
    Mcd,
}

impl ScatterKind {
    pub const ALL: [ScatterKind; 5] = [Self::Var, Self::Kmat, Self::T2, Self::Mve, Self::Mcd];

    pub fn name(self) -> &'static str {
        match self {
            Self::Var => "var",
            Self::Kmat => "kmat",
            Self::T2 => "t2",
            Self::Mve => "mve",
            Self::Mcd => "mcd",
        }
    }

    /// Whether the estimator needs a subset search (and hence a seed).
    pub fn is_randomized(self) -> bool {
        matches!(self, Self::Mve | Self::Mcd)
    }
}

impl fmt::Display for ScatterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScatterKind {
    type Err = IcsError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| IcsError::InvalidParameter(format!("unknown scatter estimator `{s}`")))
    }
}

/// How mve and mcd pick their `(p+1)`-point starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Search {
    /// `trials` random starts; trial `k` draws from the substream
    /// `derive_indexed(seed, "trial", k)`.
    Random { trials: usize, seed: u64 },
    /// Every `(p+1)`-subset in lexicographic order. Only sensible for tiny n.
    Exhaustive,
}

impl Search {
    pub fn random(seed: u64) -> Self {
        Search::Random { trials: DEFAULT_TRIALS, seed }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScatterEstimate {
    pub location: DVector<f64>,
    pub shape: DMatrix<f64>,
    pub method: ScatterKind,
    /// `true` when the location was fixed by the caller.
    pub constrained: bool,
    /// Ascending indices of the qualifying half-sample (mve, mcd).
    pub support: Option<Vec<usize>>,
}

impl ScatterEstimate {
    pub fn p(&self) -> usize {
        self.shape.nrows()
    }

    pub fn det(&self) -> f64 {
        self.shape.determinant()
    }
}

/// Dispatch by name. `search` is only consulted by mve and mcd.
pub fn estimate(
    kind: ScatterKind,
    x: &DMatrix<f64>,
    loc: &Location<DVector<f64>>,
    search: Search,
) -> Result<ScatterEstimate> {
    match kind {
        ScatterKind::Var => cov(x, loc),
        ScatterKind::Kmat => kmat(x, loc),
        ScatterKind::T2 => t2_scatter(x, loc),
        ScatterKind::Mve => mve_scatter(x, loc, search),
        ScatterKind::Mcd => mcd_scatter(x, loc, search),
    }
}

pub(crate) fn check_input(x: &DMatrix<f64>, loc: &Location<DVector<f64>>, min_n: usize) -> Result<()> {
    if x.nrows() == 0 || x.ncols() == 0 {
        return Err(IcsError::EmptyInput);
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(IcsError::NonFinite);
    }
    if x.nrows() < min_n {
        return Err(IcsError::TooFewObservations { needed: min_n, got: x.nrows() });
    }
    if let Location::Fixed(mu) = loc {
        if mu.len() != x.ncols() {
            return Err(IcsError::DimensionMismatch { expected: x.ncols(), got: mu.len() });
        }
        if mu.iter().any(|v| !v.is_finite()) {
            return Err(IcsError::NonFinite);
        }
    }
    Ok(())
}

fn all_rows(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Sample covariance (`1/n`), or the second moment `S + (μ − x̄)(μ − x̄)ᵀ`
/// about a fixed `μ`.
pub fn cov(x: &DMatrix<f64>, loc: &Location<DVector<f64>>) -> Result<ScatterEstimate> {
    check_input(x, loc, 1)?;
    let mean = column_means(x);
    let s = scatter_about(x, &all_rows(x.nrows()), &mean);
    Ok(match loc {
        Location::Free => ScatterEstimate {
            location: mean,
            shape: s,
            method: ScatterKind::Var,
            constrained: false,
            support: None,
        },
        Location::Fixed(mu) => {
            let d = mu - &mean;
            let mut shape = s + &d * d.transpose();
            symmetrize(&mut shape);
            ScatterEstimate { location: mu.clone(), shape, method: ScatterKind::Var, constrained: true, support: None }
        }
    })
}

/// `K = (1/n) Σ dᵢ² (xᵢ − c)(xᵢ − c)ᵀ`, `dᵢ² = (xᵢ − c)ᵀ S_c⁻¹ (xᵢ − c)`,
/// where `c` is the mean (free) or `μ` (fixed) and `S_c` the matching
/// second-moment matrix.
pub fn kmat(x: &DMatrix<f64>, loc: &Location<DVector<f64>>) -> Result<ScatterEstimate> {
    check_input(x, loc, 1)?;
    let (n, p) = x.shape();
    let base = cov(x, loc)?;
    if !loc.is_fixed() && n < p + 1 {
        return Err(IcsError::TooFewObservations { needed: p + 1, got: n });
    }
    let chol = spd_cholesky(&base.shape, RANK_TOL).ok_or(IcsError::SingularCovariance)?;
    let centre = &base.location;
    let mut k = DMatrix::<f64>::zeros(p, p);
    let mut d = DVector::<f64>::zeros(p);
    for i in 0..n {
        for j in 0..p {
            d[j] = x[(i, j)] - centre[j];
        }
        let w = chol.solve(&d).dot(&d);
        k.ger(w, &d, &d, 1.0);
    }
    k /= n as f64;
    symmetrize(&mut k);
    Ok(ScatterEstimate {
        location: base.location,
        shape: k,
        method: ScatterKind::Kmat,
        constrained: loc.is_fixed(),
        support: None,
    })
}

/// A point repeated at least `h` times verbatim, with the first `h` of its
/// row indices. With a free centre and several such points, the
/// lexicographically smallest wins (the multivariate form of the leftmost
/// window rule).
pub(crate) fn exact_fit(x: &DMatrix<f64>, h: usize, centre: Option<&DVector<f64>>) -> Option<(DVector<f64>, Vec<usize>)> {
    let (n, p) = x.shape();
    let cmp_rows = |a: usize, b: usize| {
        (0..p)
            .map(|j| x[(a, j)].total_cmp(&x[(b, j)]))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    match centre {
        Some(mu) => {
            let hits: Vec<usize> = (0..n)
                .filter(|&i| (0..p).all(|j| x[(i, j)].total_cmp(&mu[j]).is_eq()))
                .collect();
            (hits.len() >= h).then(|| (mu.clone(), hits[..h].to_vec()))
        }
        None => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| cmp_rows(a, b).then(a.cmp(&b)));
            let mut start = 0;
            while start < n {
                let mut end = start + 1;
                while end < n && cmp_rows(order[start], order[end]).is_eq() {
                    end += 1;
                }
                if end - start >= h {
                    let mut idx = order[start..end].to_vec();
                    idx.sort_unstable();
                    idx.truncate(h);
                    let loc = DVector::from_iterator(p, (0..p).map(|j| x[(idx[0], j)]));
                    return Some((loc, idx));
                }
                start = end;
            }
            None
        }
    }
}

/// Lexicographic enumeration of all `k`-subsets of `0..n`.
pub(crate) fn all_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The `(p+1)`-point starts for a search, in trial order.
pub(crate) fn starts(n: usize, p: usize, search: Search) -> Vec<Vec<usize>> {
    use crate::seed::{derive_indexed, rng};
    match search {
        Search::Exhaustive => all_subsets(n, p + 1),
        Search::Random { trials, seed } => (0..trials)
            .map(|t| {
                let mut r = rng(derive_indexed(seed, "trial", t as u64));
                let mut idx = rand::seq::index::sample(&mut r, n, p + 1).into_vec();
                idx.sort_unstable();
                idx
            })
            .collect(),
    }
}
