//! Population (infinite-sample) criteria for the mixture, and the limiting
//! constrained MVE with an independent numeric check.
//!
//! Raw-coordinate directions are written `a = (cos θ, sin θ)`; the same axis
//! in total coordinates has angle `φ` with `tan φ = c tan θ`, `c = 1/c₁`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Matrix2, Vector2};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{IcsError, Result};
use crate::icspp::angle_grid;
use crate::model::MixtureParams;

/// `kurt(s) = −6 + 4/σ²` with `σ² = 4q(1−q)`: the excess kurtosis of the
/// centred, scaled group indicator. Negative iff `q(1−q) > 1/6`.
pub fn kurt_indicator(q: f64) -> f64 {
    -6.0 + 4.0 / (4.0 * q * (1.0 - q))
}

/// Excess kurtosis of `aᵀx` for a unit `a` with `a₁² = a1sq`:
/// `a₁⁴α⁴σ⁴ kurt(s) / (α²a₁²σ² + 1)²`.
pub fn pop_proj_kurt(a1sq: f64, alpha: f64, q: f64) -> f64 {
    let s2 = 4.0 * q * (1.0 - q);
    let b = alpha * alpha * a1sq * s2;
    b * b * kurt_indicator(q) / ((b + 1.0) * (b + 1.0))
}

/// Eigenvalues of `Σ⁻¹K` for the mixture (`K` the kmat scatter), in
/// coordinate order: `p + 2 + kurt(s)·α⁴σ⁴/(1 + α²σ²)²` for the first axis
/// and `p + 2` for the rest.
pub fn pop_ics_kmat_var(alpha: f64, q: f64, p: usize) -> Vec<f64> {
    let base = p as f64 + 2.0;
    let mut out = vec![base; p];
    out[0] = base + pop_proj_kurt(1.0, alpha, q);
    out
}

/// `φ = arctan(c tan θ)`, continuous at `θ = ±π/2`.
pub fn theta_to_phi(theta: f64, c: f64) -> f64 {
    (c * theta.sin()).atan2(theta.cos())
}

/// Inverse of [`theta_to_phi`].
pub fn phi_to_theta(phi: f64, c: f64) -> f64 {
    phi.sin().atan2(c * phi.cos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleCoords {
    /// Raw-coordinate angle θ.
    Theta,
    /// Total-coordinate angle φ.
    Phi,
}

impl AngleCoords {
    pub fn name(self) -> &'static str {
        match self {
            Self::Theta => "theta",
            Self::Phi => "phi",
        }
    }
}

/// Population `κ_ICS` (kmat:var) and `κ_PP` (kmat:var) over a uniform grid
/// of angles in `[−π/2, π/2]` (radians).
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationCurve {
    pub angles: Vec<f64>,
    pub kappa_ics: Vec<f64>,
    pub kappa_pp: Vec<f64>,
    pub coords: AngleCoords,
}

/// Population curves for `p = 2`. `κ_ICS(θ) = aᵀKa / aᵀΣa` uses the full
/// diagonal matrices `Σ = diag(1 + α²σ², 1)` and `K = Σ·diag(λ₁, 4)`, so
/// off-axis values are exact; `κ_PP(θ) = 3 + kurt(aᵀx)`.
pub fn pop_curves(alpha: f64, q: f64, grid: usize, coords: AngleCoords) -> Result<PopulationCurve> {
    let params = MixtureParams::new(2, q, alpha)?;
    if grid < 3 {
        return Err(IcsError::InvalidParameter("grid needs at least 3 angles".into()));
    }
    let sigma11 = 1.0 + params.sigma2() * alpha * alpha;
    let lambda = pop_ics_kmat_var(alpha, q, 2);
    let (k11, k22) = (sigma11 * lambda[0], lambda[1]);
    let c = 1.0 / params.c1();

    let angles = angle_grid(grid);
    let mut kappa_ics = Vec::with_capacity(grid);
    let mut kappa_pp = Vec::with_capacity(grid);
    for &angle in &angles {
        let theta = match coords {
            AngleCoords::Theta => angle,
            AngleCoords::Phi => phi_to_theta(angle, c),
        };
        let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
        kappa_ics.push((k11 * c2 + k22 * s2) / (sigma11 * c2 + s2));
        kappa_pp.push(3.0 + pop_proj_kurt(c2, alpha, q));
    }
    Ok(PopulationCurve { angles, kappa_ics, kappa_pp, coords })
}

/// Half-width of the dip around the minimum at half depth, in the curve's
/// angle units, by linear interpolation between grid points.
pub fn half_depth_width(angles: &[f64], values: &[f64]) -> f64 {
    let (kmin, vmin) = values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty curve");
    let vmax = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let level = 0.5 * (vmin + vmax);
    let mut k = kmin;
    while k + 1 < values.len() && values[k + 1] < level {
        k += 1;
    }
    if k + 1 == values.len() {
        return FRAC_PI_2 * 2.0;
    }
    let f = (level - values[k]) / (values[k + 1] - values[k]);
    angles[k] + f * (angles[k + 1] - angles[k]) - angles[kmin]
}

/// Unconstrained population MVE at `q = 1/2` in total coordinates: the
/// within-group covariance of either group, centred at `±δe₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnconstrainedMve {
    pub shape: Matrix2<f64>,
    pub centres: [Vector2<f64>; 2],
}

pub fn pop_mve_unconstrained(delta: f64) -> Result<UnconstrainedMve> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(IcsError::InvalidParameter(format!("delta={delta} not in [0,1]")));
    }
    Ok(UnconstrainedMve {
        shape: Matrix2::new(1.0 - delta * delta, 0.0, 0.0, 1.0),
        centres: [Vector2::new(delta, 0.0), Vector2::new(-delta, 0.0)],
    })
}

/// Constrained (centre at the origin) MVE of the limiting mixture with point
/// masses on `x₁ = ±1` and `x₂ ~ N(0, 1)`.
///
/// The ellipse `yᵀΩy = 1` cuts the line `x₁ = 1` at `u₁ < u₂` and, by
/// symmetry, `x₁ = −1` at `−u₂ < −u₁`. Covering half the mass means
/// `Φ(u₂) = Φ(u₁) + ½`. With `M = (u₁+u₂)/2`, `P = u₁u₂` and
/// `Q = M² − P`, the largest `det Ω` through those points is `1/(4Q)`, at
/// `ω₂₂ = 1/(2Q)`, `ω₁₂ = −Mω₂₂`, `ω₁₁ = 1 + Pω₂₂`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstrainedMveSolution {
    /// `Φ(u₁)`.
    pub t: f64,
    pub u1: f64,
    pub u2: f64,
    pub m: f64,
    pub p: f64,
    pub q: f64,
    pub omega: Matrix2<f64>,
    pub sigma: Matrix2<f64>,
}

impl ConstrainedMveSolution {
    fn from_roots(t: f64, u1: f64, u2: f64) -> Self {
        let m = 0.5 * (u1 + u2);
        let p = u1 * u2;
        let q = 0.25 * (u1 - u2) * (u1 - u2);
        let w22 = 1.0 / (2.0 * q);
        let omega = Matrix2::new(1.0 + p * w22, -m * w22, -m * w22, w22);
        let sigma = omega.try_inverse().expect("det Ω = 1/(4Q) > 0");
        Self { t, u1, u2, m, p, q, omega, sigma }
    }
}

fn std_normal() -> Normal {
    Normal::standard()
}

/// `d = Φ⁻¹(3/4)`.
pub fn quartile_d() -> f64 {
    std_normal().inverse_cdf(0.75)
}

/// Closed form: `u₁ = −d`, `u₂ = d`, `Σ = diag(2, 2d²)`.
pub fn limiting_constrained_mve() -> ConstrainedMveSolution {
    let d = quartile_d();
    ConstrainedMveSolution::from_roots(0.25, -d, d)
}

/// `Q(t) = (Φ⁻¹(t) − Φ⁻¹(t + ½))² / 4` for `t ∈ (0, ½)`.
pub fn appendix_q(t: f64) -> f64 {
    let n = std_normal();
    let du = n.inverse_cdf(t) - n.inverse_cdf(t + 0.5);
    0.25 * du * du
}

const ORACLE_GRID: usize = 999;
const GOLDEN_TOL: f64 = 1e-12;
const FD_STEP: f64 = 1e-4;

/// Numeric minimization of [`appendix_q`] (dense grid, then golden section)
/// followed by reconstruction of `Ω` from the roots. Uses nothing from the
/// closed form.
pub fn appendix_oracle() -> ConstrainedMveSolution {
    let step = 0.5 / (ORACLE_GRID + 1) as f64;
    let grid: Vec<f64> = (1..=ORACLE_GRID).map(|k| k as f64 * step).collect();
    let kbest = (0..grid.len())
        .min_by(|&i, &j| appendix_q(grid[i]).total_cmp(&appendix_q(grid[j])))
        .expect("non-empty grid");
    let lo = if kbest == 0 { step * 0.5 } else { grid[kbest - 1] };
    let hi = if kbest + 1 == grid.len() { 0.5 - step * 0.5 } else { grid[kbest + 1] };
    let t = golden_section(appendix_q, lo, hi, GOLDEN_TOL);
    let n = std_normal();
    ConstrainedMveSolution::from_roots(t, n.inverse_cdf(t), n.inverse_cdf(t + 0.5))
}

/// Central-difference `Q′(t)`.
pub fn appendix_q_prime(t: f64) -> f64 {
    (appendix_q(t + FD_STEP) - appendix_q(t - FD_STEP)) / (2.0 * FD_STEP)
}

/// Central-difference `Q″(t)`.
pub fn appendix_q_second(t: f64) -> f64 {
    (appendix_q(t + FD_STEP) - 2.0 * appendix_q(t) + appendix_q(t - FD_STEP)) / (FD_STEP * FD_STEP)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}
