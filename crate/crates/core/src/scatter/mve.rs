use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{check_input, exact_fit, starts, ScatterEstimate, ScatterKind, Search, RANK_TOL};
use crate::error::{IcsError, Result};
use crate::half_size;
use crate::linalg::{chol_det, mahalanobis_sq, mean_of_rows, scatter_about, smallest_indices, spd_cholesky};
use crate::Location;

struct Candidate {
    trial: usize,
    det: f64,
    centre: DVector<f64>,
    shape: DMatrix<f64>,
    dist: Vec<f64>,
}

fn by_det_then_trial(a: &Candidate, b: &Candidate) -> Ordering {
    a.det.total_cmp(&b.det).then(a.trial.cmp(&b.trial))
}

/// Approximate minimum volume ellipsoid covering `h = ⌈n/2⌉` points.
///
/// Each start of `p + 1` points gives a centre (their mean, or the fixed
/// `μ`) and a shape (their second moment about that centre). The shape is
/// inflated by the `h`-th smallest squared Mahalanobis distance so the
/// ellipsoid `(x − c)ᵀ shape⁻¹ (x − c) ≤ 1` covers exactly `h` points, and
/// the candidate with the smallest determinant wins (lower trial index on
/// ties). Starts whose shape is singular are skipped.
pub fn mve_scatter(x: &DMatrix<f64>, loc: &Location<DVector<f64>>, search: Search) -> Result<ScatterEstimate> {
    let (n, p) = x.shape();
    check_input(x, loc, p + 1)?;
    if let Search::Random { trials: 0, .. } = search {
        return Err(IcsError::InvalidParameter("trials must be at least 1".into()));
    }
    let h = half_size(n);
    let fixed = match loc {
        Location::Fixed(mu) => Some(mu),
        Location::Free => None,
    };

    if let Some((centre, support)) = exact_fit(x, h, fixed) {
        return Ok(ScatterEstimate {
            location: centre,
            shape: DMatrix::zeros(p, p),
            method: ScatterKind::Mve,
            constrained: fixed.is_some(),
            support: Some(support),
        });
    }

    let best = starts(n, p, search)
        .into_par_iter()
        .enumerate()
        .filter_map(|(trial, idx)| {
            let centre = fixed.cloned().unwrap_or_else(|| mean_of_rows(x, &idx));
            let c = scatter_about(x, &idx, &centre);
            let chol = spd_cholesky(&c, RANK_TOL)?;
            let inv = chol.inverse();
            let dist = mahalanobis_sq(x, &centre, &inv);
            let mut sorted = dist.clone();
            let (_, kth, _) = sorted.select_nth_unstable_by(h - 1, f64::total_cmp);
            let k = *kth;
            let det = chol_det(&chol) * k.powi(p as i32);
            Some(Candidate { trial, det, centre, shape: c * k, dist })
        })
        .min_by(by_det_then_trial)
        .ok_or(IcsError::AllCandidatesDegenerate)?;

    let mut support = smallest_indices(&best.dist, h);
    support.sort_unstable();
    Ok(ScatterEstimate {
        location: best.centre,
        shape: best.shape,
        method: ScatterKind::Mve,
        constrained: fixed.is_some(),
        support: Some(support),
    })
}
