//! Behaviour of the half-sample estimators on the two-group mixture, over
//! repeated seeds.

use icslab::icspp::axis_angle_deg;
use icslab::nalgebra::{DMatrix, DVector};
use icslab::scatter::{mcd_scatter, mve_scatter};
use icslab::seed::derive_indexed;
use icslab::{sample_mixture, standardize_data, Coords, Location, MixtureParams, ScatterEstimate, Search};

const SEEDS: u64 = 20;

fn data(q: f64, n: usize, seed: u64) -> DMatrix<f64> {
    let params = MixtureParams::new(2, q, 3.0).unwrap();
    let y = sample_mixture(&params, n, seed, Coords::Total).unwrap();
    standardize_data(&y).unwrap().0.into_values()
}

fn seed(r: u64) -> u64 {
    derive_indexed(7_001, "stochastic", r)
}

fn search(r: u64) -> Search {
    Search::Random { trials: 500, seed: derive_indexed(7_002, "search", r) }
}

fn sample_mean(x: &DMatrix<f64>) -> Location<DVector<f64>> {
    Location::Fixed(DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.mean())))
}

fn dominant_axis(e: &ScatterEstimate) -> DVector<f64> {
    let eig = e.shape.clone().symmetric_eigen();
    eig.eigenvectors.column(eig.eigenvalues.imax()).into_owned()
}

fn axis_tilt_deg(e: &ScatterEstimate) -> f64 {
    let a = dominant_axis(e);
    let t = axis_angle_deg(&a, &DVector::from_vec(vec![1.0, 0.0]));
    t.min(90.0 - t)
}

fn count(f: impl Fn(u64) -> bool) -> usize {
    (0..SEEDS).filter(|&r| f(r)).count()
}

#[test]
fn free_mcd_captures_one_group() {
    let hits = count(|r| {
        let e = mcd_scatter(&data(0.5, 500, seed(r)), &Location::Free, search(r)).unwrap();
        e.location[0].abs() > 0.5 && e.shape[(0, 0)] / e.shape[(1, 1)] < 0.2 && axis_tilt_deg(&e) < 15.0
    });
    assert!(hits >= 18, "{hits}/20");
}

#[test]
fn mean_centred_mcd_aligns_with_clustering_axis() {
    let e1 = DVector::from_vec(vec![1.0, 0.0]);
    let hits = count(|r| {
        let x = data(0.5, 500, seed(r));
        let e = mcd_scatter(&x, &sample_mean(&x), search(r)).unwrap();
        axis_angle_deg(&dominant_axis(&e), &e1) <= 10.0
    });
    assert!(hits > 10, "{hits}/20");
}

#[test]
fn mean_centred_mve_aligns_with_clustering_axis() {
    let e1 = DVector::from_vec(vec![1.0, 0.0]);
    let hits = count(|r| {
        let x = data(0.5, 500, seed(r));
        let e = mve_scatter(&x, &sample_mean(&x), search(r)).unwrap();
        axis_angle_deg(&dominant_axis(&e), &e1) <= 10.0
    });
    assert!(hits > 10, "{hits}/20");
}

/// With equal group sizes neither group alone holds half the points, so the
/// smallest covering ellipse is a band through both group cores, elongated
/// along the clustering axis — not a single group.
#[test]
fn free_mve_with_equal_groups_is_a_centred_band() {
    let hits = count(|r| {
        let e = mve_scatter(&data(0.5, 500, seed(r)), &Location::Free, search(r)).unwrap();
        e.location[0].abs() < 0.3 && e.shape[(0, 0)] > e.shape[(1, 1)]
    });
    assert!(hits >= 18, "{hits}/20");
    let e = mve_scatter(&data(0.5, 10_000, seed(99)), &Location::Free, search(99)).unwrap();
    assert!(e.shape[(0, 0)] / e.shape[(1, 1)] > 1.0, "{}", e.shape);
}

/// With unequal groups the larger one holds more than half the points and
/// the free MVE homes in on it.
#[test]
fn free_mve_with_unequal_groups_homes_in_on_larger_group() {
    let params = MixtureParams::new(2, 0.7, 3.0).unwrap();
    // centre of the larger group after centring and rescaling the first axis
    let centre = (3.0 - (2.0 * 0.7 - 1.0) * 3.0) / params.c1();
    let hits = count(|r| {
        let e = mve_scatter(&data(0.7, 500, seed(r)), &Location::Free, search(r)).unwrap();
        (e.location[0] - centre).abs() < 0.15 && e.shape[(0, 0)] / e.shape[(1, 1)] < 0.3 && axis_tilt_deg(&e) < 15.0
    });
    assert!(hits >= 18, "{hits}/20");
}
