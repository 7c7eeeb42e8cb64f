use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::{check_input, exact_fit, starts, ScatterEstimate, ScatterKind, Search, RANK_TOL};
use crate::error::{IcsError, Result};
use crate::half_size;
use crate::linalg::{mahalanobis_sq, mean_of_rows, scatter_about, smallest_indices, spd_cholesky};
use crate::Location;

const MAX_STEPS: usize = 100;
const REL_IMPROVEMENT: f64 = 1e-12;

/// Outcome of running concentration steps from one start.
#[derive(Debug, Clone, PartialEq)]
pub struct Concentration {
    pub centre: DVector<f64>,
    pub shape: DMatrix<f64>,
    /// Ascending indices of the final half-sample.
    pub support: Vec<usize>,
    pub det: f64,
    /// Determinant after every concentration step, including the last,
    /// non-improving one.
    pub det_path: Vec<f64>,
}

/// Concentration steps from the `p + 1` rows in `start`.
///
/// Each step keeps the `h` points closest to the current centre in the
/// current metric and recomputes their mean (or keeps the fixed `μ`) and
/// their covariance about that centre. Stops when the determinant improves
/// by less than `1e-12` relative, the half-sample repeats, or after 100
/// steps. Returns `None` if the start itself is singular.
pub fn concentrate(x: &DMatrix<f64>, loc: &Location<DVector<f64>>, start: &[usize]) -> Option<Concentration> {
    let h = half_size(x.nrows());
    let fixed = match loc {
        Location::Fixed(mu) => Some(mu),
        Location::Free => None,
    };
    let centre_of = |rows: &[usize]| fixed.cloned().unwrap_or_else(|| mean_of_rows(x, rows));

    let mut centre = centre_of(start);
    let mut shape = scatter_about(x, start, &centre);
    spd_cholesky(&shape, RANK_TOL)?;

    let mut det = f64::INFINITY;
    let mut support: Vec<usize> = Vec::new();
    let mut det_path = Vec::new();
    for _ in 0..MAX_STEPS {
        let Some(chol) = spd_cholesky(&shape, 0.0) else { break };
        let dist = mahalanobis_sq(x, &centre, &chol.inverse());
        let mut next = smallest_indices(&dist, h);
        next.sort_unstable();
        if next == support {
            break;
        }
        let next_centre = centre_of(&next);
        let next_shape = scatter_about(x, &next, &next_centre);
        let next_det = next_shape.determinant().max(0.0);
        det_path.push(next_det);
        if next_det >= det {
            break;
        }
        let improvement = if det.is_finite() { (det - next_det) / det } else { f64::INFINITY };
        centre = next_centre;
        shape = next_shape;
        support = next;
        det = next_det;
        if next_det == 0.0 || improvement < REL_IMPROVEMENT {
            break;
        }
    }
    Some(Concentration { centre, shape, support, det, det_path })
}

/// Approximate minimum covariance determinant over half-samples of size
/// `h = ⌈n/2⌉`: concentration steps from every start, best determinant wins
/// (lower trial index on ties).
pub fn mcd_scatter(x: &DMatrix<f64>, loc: &Location<DVector<f64>>, search: Search) -> Result<ScatterEstimate> {
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
            method: ScatterKind::Mcd,
            constrained: fixed.is_some(),
            support: Some(support),
        });
    }

    let cmp = |a: &(usize, Concentration), b: &(usize, Concentration)| -> Ordering {
        a.1.det.total_cmp(&b.1.det).then(a.0.cmp(&b.0))
    };
    let (_, best) = starts(n, p, search)
        .into_par_iter()
        .enumerate()
        .filter_map(|(trial, idx)| concentrate(x, loc, &idx).filter(|c| !c.support.is_empty()).map(|c| (trial, c)))
        .min_by(cmp)
        .ok_or(IcsError::AllCandidatesDegenerate)?;

    Ok(ScatterEstimate {
        location: best.centre,
        shape: best.shape,
        method: ScatterKind::Mcd,
        constrained: fixed.is_some(),
        support: Some(best.support),
    })
}
