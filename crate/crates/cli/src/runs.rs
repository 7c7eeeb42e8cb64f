use std::f64::consts::PI;
use std::path::PathBuf;

use icslab::icspp::{angle_grid, direction, ics_scatters, kappa_ics, kappa_pp};
use icslab::nalgebra::{DMatrix, DVector, Vector2};
use icslab::population::{pop_curves, AngleCoords};
use icslab::scatter::mcd_scatter;
use icslab::seed::derive_seed;
use icslab::spread1d::trunc_var;
use icslab::{
    half_size, sample_mixture, standardize_data, Budget, Coords, IcsError, Location, LocationPolicy, MethodSpec,
    MixtureParams, Mode, Search,
};
use rayon::prelude::*;

use crate::format::{fmt_num, CsvOut};
use crate::{CliError, ExperimentConfig};

/// Files written by a run and the number of estimator failures recorded in
/// them (rows with an empty value and a note).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOutcome {
    pub files: Vec<PathBuf>,
    pub failures: usize,
}

fn prepare(config: &ExperimentConfig) -> Result<(), CliError> {
    config.validate()?;
    std::fs::create_dir_all(&config.outdir).map_err(|source| CliError::Io { path: config.outdir.clone(), source })
}

/// The study dataset: `n` draws in total coordinates, standardized to
/// sample mean 0 and covariance `I`.
pub fn study_data(config: &ExperimentConfig) -> Result<DMatrix<f64>, CliError> {
    let params = MixtureParams::new(2, config.q, config.alpha)?;
    let y = sample_mixture(&params, config.n, derive_seed(config.seed, "data"), Coords::Total)?;
    Ok(standardize_data(&y)?.0.into_values())
}

const POLICIES: [LocationPolicy; 2] = [LocationPolicy::Free, LocationPolicy::CommonMean];

/// Population kmat:var curves in raw (θ) and total (φ) angles. Angles are in
/// degrees; κ values are raw (κ_ICS equals `p + 2 = 4` off the clustering
/// axis, κ_PP equals 3 for a normal projection).
pub fn run_popcurves(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    prepare(config)?;
    let mut files = Vec::new();
    for coords in [AngleCoords::Theta, AngleCoords::Phi] {
        let curve = pop_curves(config.alpha, config.q, config.grid_size, coords)?;
        let path = config.outdir.join(format!("popcurves_{}.csv", coords.name()));
        let mut out = CsvOut::create(&path, &["angle", "kappa_ics", "kappa_pp"])?;
        for k in 0..curve.angles.len() {
            out.row([
                fmt_num(curve.angles[k].to_degrees()),
                fmt_num(curve.kappa_ics[k]),
                fmt_num(curve.kappa_pp[k]),
            ])?;
        }
        files.push(out.finish()?);
    }
    Ok(RunOutcome { files, failures: 0 })
}

fn scatter_seed(config: &ExperimentConfig, spec: &MethodSpec) -> u64 {
    derive_seed(config.seed, &format!("sweep/{spec}"))
}

fn sweep_block(x: &DMatrix<f64>, spec: &MethodSpec, angles: &[f64], budget: Budget) -> Vec<Result<f64, IcsError>> {
    match spec.mode {
        Mode::Ics => match ics_scatters(x, spec, budget) {
            Ok((s1, s2)) => angles.iter().map(|&phi| kappa_ics(&direction(phi), &s1.shape, &s2.shape)).collect(),
            Err(e) => vec![Err(e); angles.len()],
        },
        Mode::Pp => angles.par_iter().map(|&phi| kappa_pp(x, &direction(phi), spec)).collect(),
    }
}

/// Criterion curves of every configured pair × {free, mean} × {ICS, PP} on
/// one dataset. Row order is canonical: pair order as configured, then
/// policy, then mode, then angle. The per-(pair, policy) subset-search seed
/// is written to `sweep_seeds.csv`.
pub fn run_sweep(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    prepare(config)?;
    let x = study_data(config)?;
    let angles = angle_grid(config.grid_size);

    let mut specs = Vec::new();
    for pair in &config.methods {
        for policy in POLICIES {
            for mode in [Mode::Ics, Mode::Pp] {
                specs.push(MethodSpec::new(mode, pair.scat1, pair.scat2, policy));
            }
        }
    }
    let blocks: Vec<Vec<Result<f64, IcsError>>> = specs
        .par_iter()
        .map(|spec| {
            let budget = Budget::new(config.trials, scatter_seed(config, &spec.with_mode(Mode::Ics)));
            sweep_block(&x, spec, &angles, budget)
        })
        .collect();

    let path = config.outdir.join("sweep.csv");
    let mut out = CsvOut::create(&path, &["method", "location_policy", "mode", "phi_deg", "kappa", "note"])?;
    let mut failures = 0;
    for (spec, block) in specs.iter().zip(&blocks) {
        for (phi, value) in angles.iter().zip(block) {
            let (kappa, note) = match value {
                Ok(v) => (fmt_num(*v), String::new()),
                Err(e) => {
                    failures += 1;
                    (String::new(), e.to_string())
                }
            };
            out.row([
                spec.pair_name(),
                spec.location_policy.name().to_string(),
                spec.mode.name().to_string(),
                fmt_num(phi.to_degrees()),
                kappa,
                note,
            ])?;
        }
    }
    let mut files = vec![out.finish()?];

    let path = config.outdir.join("sweep_seeds.csv");
    let mut out = CsvOut::create(&path, &["method", "location_policy", "scatter1_seed", "scatter2_seed"])?;
    for spec in specs.iter().filter(|s| s.mode == Mode::Ics) {
        let budget = Budget::new(config.trials, scatter_seed(config, spec));
        let seed_of = |slot: &str| match budget.search(slot) {
            Search::Random { seed, .. } => seed.to_string(),
            Search::Exhaustive => String::new(),
        };
        out.row([spec.pair_name(), spec.location_policy.name().into(), seed_of("scat1"), seed_of("scat2")])?;
    }
    files.push(out.finish()?);
    Ok(RunOutcome { files, failures })
}

fn angle_label(deg: f64) -> String {
    fmt_num(deg)
}

/// Projections of the study dataset onto `(cos φ, sin φ)` for each angle (in
/// degrees) and their truncated variance, free and about the projected
/// sample mean. Each file lists one `point` row per observation (value and
/// half-sample membership) and a final `summary` row.
pub fn run_histproj(config: &ExperimentConfig, angles_deg: &[f64]) -> Result<RunOutcome, CliError> {
    prepare(config)?;
    if angles_deg.is_empty() || angles_deg.iter().any(|a| !a.is_finite()) {
        return Err(CliError::Config("angles must be a non-empty list of finite degrees".into()));
    }
    let x = study_data(config)?;
    let mean = DVector::from_iterator(2, x.column_iter().map(|c| c.mean()));
    let mut files = Vec::new();
    for &deg in angles_deg {
        let a = direction(deg.to_radians());
        let z: Vec<f64> = (&x * &a).iter().copied().collect();
        for policy in POLICIES {
            let loc = match policy {
                LocationPolicy::Free => Location::Free,
                LocationPolicy::CommonMean => Location::Fixed(mean.dot(&a)),
            };
            let est = trunc_var(&z, loc)?;
            let mut in_support = vec![false; z.len()];
            for &i in est.support.as_deref().unwrap_or_default() {
                in_support[i] = true;
            }
            let path = config.outdir.join(format!("histproj_{}_{}.csv", angle_label(deg), policy.name()));
            let mut out = CsvOut::create(&path, &["kind", "value", "in_support", "v_trunc", "location"])?;
            for (v, s) in z.iter().zip(&in_support) {
                out.row(["point".into(), fmt_num(*v), u8::from(*s).to_string(), String::new(), String::new()])?;
            }
            out.row([
                "summary".into(),
                String::new(),
                String::new(),
                fmt_num(est.spread),
                fmt_num(est.location),
            ])?;
            files.push(out.finish()?);
        }
    }
    Ok(RunOutcome { files, failures: 0 })
}

pub const ELLIPSE_POINTS: usize = 360;

/// MCD of the study dataset, free and about the sample mean. The boundary is
/// `{x : (x − loc)ᵀ shape⁻¹ (x − loc) = χ}` with `χ` the `h`-th smallest
/// squared distance, so exactly the `h` nearest points lie inside or on it.
pub fn run_ellipse(config: &ExperimentConfig) -> Result<RunOutcome, CliError> {
    prepare(config)?;
    let x = study_data(config)?;
    let n = x.nrows();
    let h = half_size(n);
    let mut files = Vec::new();
    for policy in POLICIES {
        let loc = match policy {
            LocationPolicy::Free => Location::Free,
            LocationPolicy::CommonMean => Location::Fixed(DVector::from_iterator(2, x.column_iter().map(|c| c.mean()))),
        };
        let search = Search::Random { trials: config.trials, seed: derive_seed(config.seed, &format!("ellipse/{}", policy.name())) };
        let est = mcd_scatter(&x, &loc, search)?;
        let chol = est.shape.clone().cholesky().ok_or(IcsError::NotPositiveDefinite)?;
        let mut dist: Vec<f64> = x
            .row_iter()
            .map(|r| {
                let d = r.transpose() - &est.location;
                chol.solve(&d).dot(&d)
            })
            .collect();
        dist.sort_by(f64::total_cmp);
        let chi = dist[h - 1];
        let l = chol.l();

        let mut in_support = vec![false; n];
        for &i in est.support.as_deref().unwrap_or_default() {
            in_support[i] = true;
        }
        let path = config.outdir.join(format!("ellipse_{}.csv", policy.name()));
        let mut out = CsvOut::create(&path, &["kind", "x1", "x2", "in_support"])?;
        for k in 0..ELLIPSE_POINTS {
            let t = 2.0 * PI * k as f64 / ELLIPSE_POINTS as f64;
            let u = Vector2::new(t.cos(), t.sin()) * chi.sqrt();
            let b = &l * DVector::from_column_slice(u.as_slice()) + &est.location;
            out.row(["boundary".into(), fmt_num(b[0]), fmt_num(b[1]), String::new()])?;
        }
        for i in 0..n {
            out.row([
                "point".into(),
                fmt_num(x[(i, 0)]),
                fmt_num(x[(i, 1)]),
                u8::from(in_support[i]).to_string(),
            ])?;
        }
        files.push(out.finish()?);
    }
    Ok(RunOutcome { files, failures: 0 })
}
