use nalgebra::{DMatrix, DVector};

use super::{check_input, cov, ScatterEstimate, ScatterKind, RANK_TOL};
use crate::error::{IcsError, Result};
use crate::linalg::{spd_cholesky, symmetrize};
use crate::spread1d::{T2_MAX_ITER, T2_TOL};
use crate::Location;

const NU: f64 = 2.0;

fn coordinate_medians(x: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_iterator(
        x.ncols(),
        x.column_iter().map(|c| {
            let mut v: Vec<f64> = c.iter().copied().collect();
            v.sort_by(f64::total_cmp);
            let n = v.len();
            if n % 2 == 1 {
                v[n / 2]
            } else {
                0.5 * (v[n / 2 - 1] + v[n / 2])
            }
        }),
    )
}

/// Maximum-likelihood scatter of the multivariate `t₂` distribution.
///
/// Iterates `wᵢ = (p + 2) / (2 + dᵢ²)`, `μ ← Σ wᵢ xᵢ / Σ wᵢ` (free location
/// only) and `Σ ← (1/n) Σ wᵢ (xᵢ − μ)(xᵢ − μ)ᵀ` until the relative change in
/// `Σ` (Frobenius) drops below `1e-10`. The free-location start is the
/// coordinatewise median with the sample covariance.
pub fn t2_scatter(x: &DMatrix<f64>, loc: &Location<DVector<f64>>) -> Result<ScatterEstimate> {
    let (n, p) = x.shape();
    let free = !loc.is_fixed();
    check_input(x, loc, if free { p + 1 } else { 1 })?;

    let mut sigma = cov(x, loc)?.shape;
    let mut mu = match loc {
        Location::Free => coordinate_medians(x),
        Location::Fixed(mu) => mu.clone(),
    };
    let p_nu = p as f64 + NU;
    let mut d = DVector::<f64>::zeros(p);

    for _ in 0..T2_MAX_ITER {
        let chol = spd_cholesky(&sigma, RANK_TOL)
            .ok_or_else(|| IcsError::Degenerate("t2 scatter became singular".into()))?;
        let weights: Vec<f64> = (0..n)
            .map(|i| {
                for j in 0..p {
                    d[j] = x[(i, j)] - mu[j];
                }
                p_nu / (NU + chol.solve(&d).dot(&d))
            })
            .collect();

        let new_mu = if free {
            let sw: f64 = weights.iter().sum();
            let mut m = DVector::<f64>::zeros(p);
            for (i, w) in weights.iter().enumerate() {
                for j in 0..p {
                    m[j] += w * x[(i, j)];
                }
            }
            m / sw
        } else {
            mu.clone()
        };

        let mut new_sigma = DMatrix::<f64>::zeros(p, p);
        for (i, w) in weights.iter().enumerate() {
            for j in 0..p {
                d[j] = x[(i, j)] - new_mu[j];
            }
            new_sigma.ger(*w, &d, &d, 1.0);
        }
        new_sigma /= n as f64;
        symmetrize(&mut new_sigma);
        if new_sigma.iter().any(|v| !v.is_finite()) {
            return Err(IcsError::Degenerate("non-finite t2 iterate".into()));
        }

        let scale = new_sigma.norm();
        let ds = (&new_sigma - &sigma).norm() / scale;
        let dm = (&new_mu - &mu).norm() / (scale / p as f64).sqrt();
        sigma = new_sigma;
        mu = new_mu;
        if ds < T2_TOL && dm < T2_TOL {
            return Ok(ScatterEstimate {
                location: mu,
                shape: sigma,
                method: ScatterKind::T2,
                constrained: !free,
                support: None,
            });
        }
    }
    Err(IcsError::NonConvergence { iterations: T2_MAX_ITER })
}
