use nalgebra::{Cholesky, DMatrix, DVector, Dyn, SymmetricEigen};

use crate::error::{IcsError, Result};

pub(crate) fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in (i + 1)..p {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

pub(crate) fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

/// `(1/|rows|) Σ (xᵢ − c)(xᵢ − c)ᵀ` over the given rows.
pub(crate) fn scatter_about(x: &DMatrix<f64>, rows: &[usize], centre: &DVector<f64>) -> DMatrix<f64> {
    let p = x.ncols();
    let mut s = DMatrix::<f64>::zeros(p, p);
    let mut d = DVector::<f64>::zeros(p);
    for &i in rows {
        for j in 0..p {
            d[j] = x[(i, j)] - centre[j];
        }
        s.ger(1.0, &d, &d, 1.0);
    }
    s /= rows.len() as f64;
    symmetrize(&mut s);
    s
}

pub(crate) fn mean_of_rows(x: &DMatrix<f64>, rows: &[usize]) -> DVector<f64> {
    let p = x.ncols();
    let mut m = DVector::<f64>::zeros(p);
    for &i in rows {
        for j in 0..p {
            m[j] += x[(i, j)];
        }
    }
    m / rows.len() as f64
}

/// Cholesky factor of a matrix that must be numerically positive definite:
/// the smallest pivot must exceed `rel_tol` times the mean diagonal.
pub(crate) fn spd_cholesky(m: &DMatrix<f64>, rel_tol: f64) -> Option<Cholesky<f64, Dyn>> {
    let p = m.nrows();
    let scale = m.trace() / p as f64;
    if !(scale.is_finite() && scale > 0.0) {
        return None;
    }
    let chol = Cholesky::new(m.clone())?;
    let l = chol.l_dirty();
    let min_pivot = (0..p).map(|i| l[(i, i)] * l[(i, i)]).fold(f64::INFINITY, f64::min);
    (min_pivot > rel_tol * scale).then_some(chol)
}

pub(crate) fn chol_det(chol: &Cholesky<f64, Dyn>) -> f64 {
    let l = chol.l_dirty();
    (0..l.nrows()).map(|i| l[(i, i)] * l[(i, i)]).product()
}

/// Squared Mahalanobis distances of all rows from `centre` under `inv`.
pub(crate) fn mahalanobis_sq(x: &DMatrix<f64>, centre: &DVector<f64>, inv: &DMatrix<f64>) -> Vec<f64> {
    let p = x.ncols();
    let mut d = vec![0.0; p];
    (0..x.nrows())
        .map(|i| {
            for j in 0..p {
                d[j] = x[(i, j)] - centre[j];
            }
            let mut acc = 0.0;
            for j in 0..p {
                let mut row = 0.0;
                for k in 0..p {
                    row += inv[(j, k)] * d[k];
                }
                acc += d[j] * row;
            }
            acc
        })
        .collect()
}

/// Indices of the `h` smallest values; ties go to the lower index.
pub(crate) fn smallest_indices(values: &[f64], h: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    idx.truncate(h);
    idx
}

/// Symmetric inverse square root of an SPD matrix.
pub(crate) fn inv_sqrt_spd(m: &DMatrix<f64>, rel_tol: f64) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    if !(max > 0.0) || min <= rel_tol * max {
        return Err(IcsError::SingularCovariance);
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let mut w = &eig.eigenvectors * d * eig.eigenvectors.transpose();
    symmetrize(&mut w);
    Ok(w)
}

/// Flip `v` so that its largest-magnitude component (first on ties) is positive.
pub(crate) fn canonical_sign(v: &mut DVector<f64>) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.neg_mut();
    }
}
