//! ICS and PP criteria.
//!
//! `κ_ICS(a) = aᵀS₁a / aᵀS₂a` is optimized in closed form by the generalized
//! eigenvectors of `(S₁, S₂)`. `κ_PP(a) = s₁(Xa) / s₂(Xa)` uses the
//! univariate versions of the same estimators on the projection and is
//! optimized numerically: an angle grid in two dimensions, or a local
//! Nelder–Mead search on the sphere started from the ICS direction.
//!
//! A method is written `ICS:scat1:scat2` or `PP:scat1:scat2`, with a trailing
//! `:mean` when both estimators are forced to use the sample mean as their
//! location.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::error::{IcsError, Result};
use crate::linalg::{canonical_sign, column_means, spd_cholesky, symmetrize};
use crate::scatter::{self, ScatterEstimate, Search, DEFAULT_TRIALS};
use crate::seed::derive_seed;
use crate::spread1d::{self, SpreadEstimate};
use crate::Location;

pub use crate::scatter::ScatterKind;

/// Default number of angles in a sweep over `[−π/2, π/2]` (0.25° steps).
pub const DEFAULT_GRID: usize = 721;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocationPolicy {
    /// Each estimator uses its own implicit location.
    Free,
    /// Both estimators use the overall sample mean.
    CommonMean,
}

impl LocationPolicy {
    pub fn name(self) -> &'static str {
        match self {
            Self::Free => "free",
            Self::CommonMean => "mean",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Ics,
    Pp,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Ics => "ICS",
            Self::Pp => "PP",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MethodSpec {
    pub mode: Mode,
    pub scat1: ScatterKind,
    pub scat2: ScatterKind,
    pub location_policy: LocationPolicy,
}

impl MethodSpec {
    pub fn new(mode: Mode, scat1: ScatterKind, scat2: ScatterKind, location_policy: LocationPolicy) -> Self {
        Self { mode, scat1, scat2, location_policy }
    }

    pub fn ics(scat1: ScatterKind, scat2: ScatterKind, location_policy: LocationPolicy) -> Self {
        Self::new(Mode::Ics, scat1, scat2, location_policy)
    }

    pub fn pp(scat1: ScatterKind, scat2: ScatterKind, location_policy: LocationPolicy) -> Self {
        Self::new(Mode::Pp, scat1, scat2, location_policy)
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        Self { mode, ..self }
    }

    /// `scat1:scat2`, without mode or location suffix.
    pub fn pair_name(&self) -> String {
        format!("{}:{}", self.scat1, self.scat2)
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.mode.name(), self.scat1, self.scat2)?;
        if self.location_policy == LocationPolicy::CommonMean {
            f.write_str(":mean")?;
        }
        Ok(())
    }
}

impl FromStr for MethodSpec {
    type Err = IcsError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || IcsError::InvalidParameter(format!("cannot parse method `{s}`"));
        let parts: Vec<&str> = s.split(':').collect();
        let (mode, rest) = match parts.first() {
            Some(&"ICS") => (Mode::Ics, &parts[1..]),
            Some(&"PP") => (Mode::Pp, &parts[1..]),
            _ => return Err(bad()),
        };
        let location_policy = match rest {
            [_, _] => LocationPolicy::Free,
            [_, _, "mean"] => LocationPolicy::CommonMean,
            _ => return Err(bad()),
        };
        Ok(Self { mode, scat1: rest[0].parse()?, scat2: rest[1].parse()?, location_policy })
    }
}

/// Subset-search budget for randomized scatters (mve, mcd).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub trials: usize,
    pub seed: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self { trials: DEFAULT_TRIALS, seed: 0 }
    }
}

impl Budget {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self { trials, seed }
    }

    /// Search for the estimator in `slot` ("scat1" or "scat2").
    pub fn search(&self, slot: &str) -> Search {
        Search::Random { trials: self.trials, seed: derive_seed(self.seed, slot) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IcsResult {
    /// Descending.
    pub eigenvalues: Vec<f64>,
    /// Unit vectors matching `eigenvalues`, largest-magnitude entry positive.
    pub eigenvectors: Vec<DVector<f64>>,
    pub kappa_min_direction: DVector<f64>,
    pub s1: ScatterEstimate,
    pub s2: ScatterEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionCurve {
    /// Angles φ in radians, uniform over `[−π/2, π/2]`.
    pub angles: Vec<f64>,
    pub values: Vec<f64>,
    pub argmin: f64,
    pub argmax: f64,
    pub method: MethodSpec,
}

impl CriterionCurve {
    fn new(angles: Vec<f64>, values: Vec<f64>, method: MethodSpec) -> Self {
        let pick = |better: fn(f64, f64) -> bool| {
            let mut k = 0;
            for i in 1..values.len() {
                if better(values[i], values[k]) {
                    k = i;
                }
            }
            angles[k]
        };
        let argmin = pick(|a, b| a < b);
        let argmax = pick(|a, b| a > b);
        Self { angles, values, argmin, argmax, method }
    }
}

/// `φ_k = −π/2 + kπ/(m−1)`, `k = 0..m`.
pub fn angle_grid(grid_size: usize) -> Vec<f64> {
    let step = 2.0 * FRAC_PI_2 / (grid_size - 1) as f64;
    (0..grid_size).map(|k| -FRAC_PI_2 + k as f64 * step).collect()
}

/// Unit vector `(cos φ, sin φ)`.
pub fn direction(phi: f64) -> DVector<f64> {
    DVector::from_vec(vec![phi.cos(), phi.sin()])
}

/// Angle in degrees between the axes spanned by `a` and `b` (0..=90).
pub fn axis_angle_deg(a: &DVector<f64>, b: &DVector<f64>) -> f64 {
    let c = (a.dot(b).abs() / (a.norm() * b.norm())).min(1.0);
    c.acos().to_degrees()
}

pub fn kappa_ics(a: &DVector<f64>, s1: &DMatrix<f64>, s2: &DMatrix<f64>) -> Result<f64> {
    if a.len() != s1.nrows() || a.len() != s2.nrows() {
        return Err(IcsError::DimensionMismatch { expected: s1.nrows(), got: a.len() });
    }
    if a.iter().all(|v| *v == 0.0) {
        return Err(IcsError::ZeroVector);
    }
    let num = (s1 * a).dot(a);
    let den = (s2 * a).dot(a);
    if !(den > 0.0) {
        return Err(IcsError::ZeroDenominator);
    }
    Ok(num / den)
}

/// Generalized symmetric eigenproblem `S₁ v = λ S₂ v` by whitening with the
/// Cholesky factor of `S₂`. Eigenvalues descending, vectors unit length with
/// the largest-magnitude entry positive.
pub fn ics_eigen(s1: &DMatrix<f64>, s2: &DMatrix<f64>) -> Result<(Vec<f64>, Vec<DVector<f64>>)> {
    let p = s1.nrows();
    if s2.nrows() != p {
        return Err(IcsError::DimensionMismatch { expected: p, got: s2.nrows() });
    }
    spd_cholesky(s1, 1e-14).ok_or(IcsError::NotPositiveDefinite)?;
    let chol = spd_cholesky(s2, 1e-14).ok_or(IcsError::NotPositiveDefinite)?;
    let l = chol.l();
    let l_inv = l.clone().try_inverse().ok_or(IcsError::NotPositiveDefinite)?;
    let mut a = &l_inv * s1 * l_inv.transpose();
    symmetrize(&mut a);
    let eig = SymmetricEigen::new(a);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let back = l_inv.transpose();
    let mut values = Vec::with_capacity(p);
    let mut vectors = Vec::with_capacity(p);
    for k in order {
        let mut v = &back * eig.eigenvectors.column(k);
        v /= v.norm();
        canonical_sign(&mut v);
        values.push(eig.eigenvalues[k]);
        vectors.push(v);
    }
    Ok((values, vectors))
}

pub fn ics_decompose(s1: ScatterEstimate, s2: ScatterEstimate) -> Result<IcsResult> {
    let (eigenvalues, eigenvectors) = ics_eigen(&s1.shape, &s2.shape)?;
    let kappa_min_direction = eigenvectors.last().cloned().expect("p >= 1");
    Ok(IcsResult { eigenvalues, eigenvectors, kappa_min_direction, s1, s2 })
}

fn common_location(x: &DMatrix<f64>, policy: LocationPolicy) -> Location<DVector<f64>> {
    match policy {
        LocationPolicy::Free => Location::Free,
        LocationPolicy::CommonMean => Location::Fixed(column_means(x)),
    }
}

/// The two scatter matrices of an ICS method. Randomized estimators draw
/// from `budget.search("scat1")` and `budget.search("scat2")`.
pub fn ics_scatters(x: &DMatrix<f64>, spec: &MethodSpec, budget: Budget) -> Result<(ScatterEstimate, ScatterEstimate)> {
    let loc = common_location(x, spec.location_policy);
    let s1 = scatter::estimate(spec.scat1, x, &loc, budget.search("scat1"))?;
    let s2 = scatter::estimate(spec.scat2, x, &loc, budget.search("scat2"))?;
    Ok((s1, s2))
}

/// Univariate counterpart of a scatter estimator. mve maps to the squared
/// lshorth and mcd to the truncated variance.
pub fn univariate_spread(kind: ScatterKind, z: &[f64], loc: Location<f64>) -> Result<SpreadEstimate> {
    match kind {
        ScatterKind::Var => spread1d::var1d(z, loc),
        ScatterKind::Kmat => spread1d::kurt_spread(z, loc).map(|(e, _)| e),
        ScatterKind::T2 => spread1d::t2_spread1d(z, loc),
        ScatterKind::Mve => spread1d::lshorth(z, loc),
        ScatterKind::Mcd => spread1d::trunc_var(z, loc),
    }
}

fn unit_axis(a: &DVector<f64>) -> Result<DVector<f64>> {
    let norm = a.norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(IcsError::ZeroVector);
    }
    let mut u = a / norm;
    canonical_sign(&mut u);
    Ok(u)
}

/// `s₁(Xa) / s₂(Xa)`. `a` is normalized and sign-canonicalized first, so the
/// value depends only on the axis of `a`. With the common-mean policy both
/// spreads are taken about `aᵀx̄`.
pub fn kappa_pp(x: &DMatrix<f64>, a: &DVector<f64>, spec: &MethodSpec) -> Result<f64> {
    if spec.mode != Mode::Pp {
        return Err(IcsError::InvalidParameter(format!("{spec} is not a PP method")));
    }
    if a.len() != x.ncols() {
        return Err(IcsError::DimensionMismatch { expected: x.ncols(), got: a.len() });
    }
    let u = unit_axis(a)?;
    let z: Vec<f64> = (x * &u).iter().copied().collect();
    let loc = match spec.location_policy {
        LocationPolicy::Free => Location::Free,
        LocationPolicy::CommonMean => Location::Fixed(column_means(x).dot(&u)),
    };
    let s1 = univariate_spread(spec.scat1, &z, loc.clone())?;
    let s2 = univariate_spread(spec.scat2, &z, loc)?;
    if !(s2.spread > 0.0) {
        return Err(IcsError::ZeroDenominator);
    }
    Ok(s1.spread / s2.spread)
}

/// Criterion over the angle grid for `p = 2`. ICS scatters are estimated
/// once; PP spreads are recomputed on every projection.
pub fn pp_sweep2d(x: &DMatrix<f64>, spec: &MethodSpec, grid_size: usize, budget: Budget) -> Result<CriterionCurve> {
    if x.ncols() != 2 {
        return Err(IcsError::DimensionMismatch { expected: 2, got: x.ncols() });
    }
    if grid_size < 3 {
        return Err(IcsError::InvalidParameter("grid needs at least 3 angles".into()));
    }
    let angles = angle_grid(grid_size);
    let values: Vec<f64> = match spec.mode {
        Mode::Ics => {
            let (s1, s2) = ics_scatters(x, spec, budget)?;
            angles
                .iter()
                .map(|&phi| kappa_ics(&direction(phi), &s1.shape, &s2.shape))
                .collect::<Result<_>>()?
        }
        Mode::Pp => angles
            .par_iter()
            .map(|&phi| kappa_pp(x, &direction(phi), spec))
            .collect::<Result<_>>()?,
    };
    Ok(CriterionCurve::new(angles, values, *spec))
}

/// Orthonormal basis of the complement of unit `a`.
fn tangent_basis(a: &DVector<f64>) -> DMatrix<f64> {
    let p = a.len();
    let skip = a.iamax();
    let mut basis: Vec<DVector<f64>> = vec![a.clone()];
    for k in (0..p).filter(|&k| k != skip) {
        let mut v = DVector::<f64>::zeros(p);
        v[k] = 1.0;
        for b in &basis {
            let c = b.dot(&v);
            v.axpy(-c, b, 1.0);
        }
        v /= v.norm();
        basis.push(v);
    }
    DMatrix::from_columns(&basis[1..])
}

const NM_INITIAL_STEP: f64 = 0.1;
const NM_MAX_EVALS: usize = 4000;
const NM_XTOL: f64 = 1e-9;
const NM_FTOL: f64 = 1e-13;

/// Local minimization of `κ_PP` over the unit sphere from `a0`.
///
/// Nelder–Mead runs in the tangent chart `t ↦ (a0 + B t)/‖a0 + B t‖`, with
/// `B` an orthonormal basis of `a0⊥`. The start is a simplex vertex, so the
/// result never has a larger criterion than `a0`. Points where the criterion
/// cannot be evaluated count as `+∞`; an error at `a0` itself is returned.
pub fn pp_refine(x: &DMatrix<f64>, spec: &MethodSpec, a0: &DVector<f64>) -> Result<DVector<f64>> {
    let a0 = unit_axis(a0)?;
    let p = a0.len();
    let f0 = kappa_pp(x, &a0, spec)?;
    if p == 1 {
        return Ok(a0);
    }
    let basis = tangent_basis(&a0);
    let point = |t: &DVector<f64>| -> DVector<f64> {
        let v = &a0 + &basis * t;
        let norm = v.norm();
        v / norm
    };
    let eval = |t: &DVector<f64>| kappa_pp(x, &point(t), spec).unwrap_or(f64::INFINITY);

    let m = p - 1;
    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(m + 1);
    simplex.push((DVector::zeros(m), f0));
    for i in 0..m {
        let mut t = DVector::zeros(m);
        t[i] = NM_INITIAL_STEP;
        let f = eval(&t);
        simplex.push((t, f));
    }
    let mut evals = m;
    while evals < NM_MAX_EVALS {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[m].1;
        let diameter = simplex.iter().skip(1).map(|(t, _)| (t - &simplex[0].0).amax()).fold(0.0, f64::max);
        if diameter < NM_XTOL && (worst - best).abs() <= NM_FTOL * (1.0 + best.abs()) {
            break;
        }
        let centroid = simplex[..m].iter().fold(DVector::zeros(m), |acc, (t, _)| acc + t) / m as f64;
        let toward = |coef: f64| &centroid + (&centroid - &simplex[m].0) * coef;

        let xr = toward(1.0);
        let fr = eval(&xr);
        evals += 1;
        if fr < simplex[0].1 {
            let xe = toward(2.0);
            let fe = eval(&xe);
            evals += 1;
            simplex[m] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[m - 1].1 {
            simplex[m] = (xr, fr);
        } else {
            let (xc, fc) = if fr < simplex[m].1 {
                let xc = toward(0.5);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = toward(-0.5);
                let fc = eval(&xc);
                (xc, fc)
            };
            evals += 1;
            if fc < simplex[m].1.min(fr) {
                simplex[m] = (xc, fc);
            } else {
                let x0 = simplex[0].0.clone();
                for v in simplex.iter_mut().skip(1) {
                    let t = &x0 + (&v.0 - &x0) * 0.5;
                    let f = eval(&t);
                    *v = (t, f);
                }
                evals += m;
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut out = point(&simplex[0].0);
    canonical_sign(&mut out);
    Ok(out)
}

/// Estimated clustering direction: the minimum-eigenvalue ICS eigenvector,
/// or the PP minimizer (angle grid for `p = 2`, refinement from the ICS
/// direction of the same pair otherwise).
pub fn clustering_direction(x: &DMatrix<f64>, spec: &MethodSpec, budget: Budget) -> Result<DVector<f64>> {
    match spec.mode {
        Mode::Ics => {
            let (s1, s2) = ics_scatters(x, spec, budget)?;
            Ok(ics_decompose(s1, s2)?.kappa_min_direction)
        }
        Mode::Pp if x.ncols() == 2 => {
            let curve = pp_sweep2d(x, spec, DEFAULT_GRID, budget)?;
            let mut a = direction(curve.argmin);
            canonical_sign(&mut a);
            Ok(a)
        }
        Mode::Pp => {
            let start = clustering_direction(x, &spec.with_mode(Mode::Ics), budget)?;
            pp_refine(x, spec, &start)
        }
    }
}
