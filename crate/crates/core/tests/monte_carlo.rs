//! Large-sample checks of estimators and population formulas.

use icslab::icspp::{axis_angle_deg, direction, ics_eigen, kappa_ics, Budget};
use icslab::nalgebra::{DMatrix, DVector};
use icslab::population::{pop_curves, AngleCoords};
use icslab::scatter::{cov, kmat, t2_scatter};
use icslab::spread1d::{kurt_spread, t2_spread1d};
use icslab::{
    clustering_direction, population_moments, sample_mixture, Coords, Location, LocationPolicy, MethodSpec,
    MixtureParams, ScatterKind,
};

const N: usize = 1_000_000;

fn draws(p: usize, q: f64, alpha: f64, seed: u64, coords: Coords) -> DMatrix<f64> {
    let params = MixtureParams::new(p, q, alpha).unwrap();
    sample_mixture(&params, N, seed, coords).unwrap().into_values()
}

fn within_rel(got: &DMatrix<f64>, want: &DMatrix<f64>, tol: f64) -> bool {
    let scale = want.amax();
    got.iter().zip(want.iter()).all(|(g, w)| {
        if *w == 0.0 {
            (g / scale).abs() <= tol
        } else {
            (g / w - 1.0).abs() <= tol
        }
    })
}

/// Composite Simpson rule.
fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, m: usize) -> f64 {
    let h = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for k in 1..m {
        s += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// σ² solving `E[3x²/(2σ² + x²)] = 1` for `x ~ N(0, 1)`.
fn t2_normal_constant_1d() -> f64 {
    let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let g = |s2: f64| simpson(|x| 3.0 * x * x / (2.0 * s2 + x * x) * phi(x), -12.0, 12.0, 20_000) - 1.0;
    bisect(g, 0.05, 5.0)
}

/// `c` with `Σ = cI` solving `E[2R/(2c + R)] = 1`, `R ~ χ²₂`.
fn t2_normal_constant_2d() -> f64 {
    let dens = |r: f64| 0.5 * (-0.5 * r).exp();
    let g = |c: f64| simpson(|r| 2.0 * r / (2.0 * c + r) * dens(r), 0.0, 120.0, 40_000) - 1.0;
    bisect(g, 0.05, 5.0)
}

#[test]
fn quadrature_constants() {
    let c1 = t2_normal_constant_1d();
    let c2 = t2_normal_constant_2d();
    // both constants lie below the normal variance: t₂ weights shrink tails
    assert!(c1 > 0.5 && c1 < 1.0, "{c1}");
    assert!(c2 > 0.5 && c2 < 1.0, "{c2}");
    println!("t2 normal constants: p=1 {c1:.6}, p=2 {c2:.6}");
}

#[test]
fn raw_moments_match_population() {
    for (q, alpha, seed) in [(0.5, 3.0, 1u64), (0.7, 1.0, 2)] {
        let params = MixtureParams::new(2, q, alpha).unwrap();
        let (mu, sigma) = population_moments(&params);
        let x = draws(2, q, alpha, seed, Coords::Raw);
        let est = cov(&x, &Location::Free).unwrap();
        assert!(within_rel(&est.shape, &sigma, 0.01), "{}", est.shape);
        assert!((est.location.clone() - mu).amax() < 0.01, "{}", est.location);
    }
    let x = draws(2, 0.5, 0.0, 3, Coords::Raw);
    assert!(cov(&x, &Location::Free).unwrap().location.amax() < 0.01);
}

#[test]
fn total_coordinates_have_identity_covariance() {
    let x = draws(3, 0.5, 3.0, 4, Coords::Total);
    let est = cov(&x, &Location::Free).unwrap();
    assert!(within_rel(&est.shape, &DMatrix::identity(3, 3), 0.01), "{}", est.shape);
}

#[test]
fn normal_kurtosis_spread() {
    let x = draws(1, 0.5, 0.0, 5, Coords::Raw);
    let z: Vec<f64> = x.column(0).iter().copied().collect();
    let (e, kurt) = kurt_spread(&z, Location::Free).unwrap();
    let s2 = z.iter().map(|v| v * v).sum::<f64>() / N as f64;
    assert!((kurt + 3.0 - 3.0).abs() <= 0.02, "{kurt}");
    assert!((e.spread / s2 - 3.0).abs() <= 0.03);
}

#[test]
fn normal_t2_spread_matches_quadrature() {
    let c = t2_normal_constant_1d();
    let x = draws(1, 0.5, 0.0, 6, Coords::Raw);
    let z: Vec<f64> = x.column(0).iter().copied().collect();
    let e = t2_spread1d(&z, Location::Free).unwrap();
    assert!((e.spread / c - 1.0).abs() <= 0.02, "{} vs {c}", e.spread);
}

#[test]
fn normal_t2_scatter_is_proportional_to_identity() {
    let c = t2_normal_constant_2d();
    let x = draws(2, 0.5, 0.0, 7, Coords::Raw);
    let e = t2_scatter(&x, &Location::Free).unwrap();
    assert!(within_rel(&e.shape, &(DMatrix::identity(2, 2) * c), 0.02), "{} vs {c}", e.shape);
}

#[test]
fn normal_kmat_is_four_times_covariance() {
    let x = draws(2, 0.5, 0.0, 8, Coords::Raw);
    let s = cov(&x, &Location::Free).unwrap().shape;
    let k = kmat(&x, &Location::Free).unwrap().shape;
    let m = s.try_inverse().unwrap() * k;
    assert!(within_rel(&m, &(DMatrix::identity(2, 2) * 4.0), 0.02), "{m}");
}

#[test]
fn sample_kmat_var_curve_matches_population() {
    let x = draws(2, 0.5, 3.0, 9, Coords::Raw);
    let s = cov(&x, &Location::Free).unwrap().shape;
    let k = kmat(&x, &Location::Free).unwrap().shape;
    let pop = pop_curves(3.0, 0.5, 181, AngleCoords::Theta).unwrap();
    for (theta, want) in pop.angles.iter().zip(&pop.kappa_ics) {
        let got = kappa_ics(&direction(*theta), &k, &s).unwrap();
        assert!((got / want - 1.0).abs() <= 0.02, "θ={theta}: {got} vs {want}");
    }
    let (vals, _) = ics_eigen(&k, &s).unwrap();
    assert!((vals[0] / 4.0 - 1.0).abs() <= 0.02 && (vals[1] / 2.38 - 1.0).abs() <= 0.02, "{vals:?}");
}

#[test]
fn ics_kmat_var_finds_clustering_axis() {
    let x = draws(2, 0.5, 3.0, 10, Coords::Total);
    let spec = MethodSpec::ics(ScatterKind::Kmat, ScatterKind::Var, LocationPolicy::Free);
    let a = clustering_direction(&x, &spec, Budget::default()).unwrap();
    let e1 = DVector::from_vec(vec![1.0, 0.0]);
    assert!(axis_angle_deg(&a, &e1) < 1.0, "{a}");
}
