//! The scenario registry: named experiments composing the core operations,
//! run as deterministic parallel trials.
//!
//! Trial t of a scenario draws from the substream keyed by (seed, domain,
//! t); rayon only changes the evaluation order, never the values, so output
//! bytes are identical at any concurrency level.

use std::time::Instant;

use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::CliError;
use crate::matfile;
use crate::output::{NamedValue, ScenarioResult, StatSeries};

use nalgebra::DMatrix;
use permcast_core::estimator::{self, FieldKind};
use permcast_core::matrix::{
    gen_flat, gen_rank_one, gen_sparse_column, gen_uniform, DenseMatrix, EntryBounds,
    SparseColumnSpec,
};
use permcast_core::rng::substream;
use permcast_core::spectrum::{self, CutoffParams};
use permcast_core::stats;
use permcast_core::{exact, flat, laguerre, special};
use rand_distr::{Distribution, StandardNormal, Uniform};

/// Separate draw domains for scenario-owned randomness (matrix ensembles,
/// auxiliary Gaussians), distinct from the core operation domains.
mod scen_domain {
    pub const RANK_ONE: u64 = 0x101;
    pub const IDENTITIES: u64 = 0x102;
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    config.validate()?;
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.effective_concurrency())
        .build()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))?;
    let mut result = pool.install(|| dispatch(config))?;
    result.duration_seconds = started.elapsed().as_secs_f64();
    Ok(result)
}

fn dispatch(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    match config.scenario.as_str() {
        "unbiasedness" => unbiasedness(config),
        "concentration" => concentration(config),
        "upper_tail" => upper_tail(config),
        "cutoff_concentration" => cutoff_concentration(config),
        "tail_statistic" => tail_statistic(config),
        "flat_distribution" => flat_distribution(config),
        "yn_coverage" => yn_coverage(config),
        "gamma_constant" => gamma_constant(config),
        "laguerre_density" => laguerre_density(config),
        "identities" => identities(config),
        other => Err(CliError::validation(format!("unknown scenario '{other}'"))),
    }
}

fn par_trials<F>(trials: usize, f: F) -> Result<Vec<f64>, CliError>
where
    F: Fn(u64) -> Result<f64, CliError> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(f).collect()
}

fn shape_or(config: &ScenarioConfig, n: usize, m: usize) -> (usize, usize) {
    config.shape.map(|[a, b]| (a, b)).unwrap_or((n, m))
}

fn fresh_result(config: &ScenarioConfig) -> ScenarioResult {
    ScenarioResult::new(config, Instant::now())
}

fn extra_num(result: &mut ScenarioResult, key: &str, v: f64) {
    result.extra.insert(key.to_string(), serde_json::json!(v));
}

// Monte Carlo mean of det Z against the exact permanent.
fn unbiasedness(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let a = match &config.matrix_file {
        Some(path) => matfile::read_matrix(path)?,
        None => {
            let (n, m) = shape_or(config, 5, 3);
            let (lo, hi) = config.bounds_or(0.5, 2.0);
            gen_uniform(n, m, &EntryBounds::new(lo, hi)?, config.seed)?
        }
    };
    if a.n() > 24 {
        return Err(CliError::validation(
            "unbiasedness needs n <= 24 so the exact oracle can run",
        ));
    }
    let field = config.field_kind()?;
    let per = exact::perm_rect(&a)?
        .value
        .ok_or_else(|| CliError::validation("exact permanent too large for direct comparison"))?;
    let dets = par_trials(config.trials, |t| {
        Ok(
            estimator::log_det_estimate_trial(&a, field, config.seed, t)?
                .log_det
                .exp(),
        )
    })?;
    let (mean, se) = stats::mean_se(&dets);
    let mut result = fresh_result(config);
    result.series.push(StatSeries::new("det", dets));
    result.bounds.push(NamedValue::new("exact_permanent", per));
    result.bounds.push(NamedValue::new(
        "z_score",
        if se > 0.0 { (mean - per) / se } else { 0.0 },
    ));
    Ok(result)
}

fn rank_one_vectors(seed: u64, n: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    // entries of u v' land in [1, 2]
    let mut rng = substream(seed, scen_domain::RANK_ONE, (n * 31 + m) as u64);
    let dist = Uniform::new_inclusive(1.0, core::f64::consts::SQRT_2).expect("valid range");
    let u: Vec<f64> = (0..n).map(|_| dist.sample(&mut rng)).collect();
    let v: Vec<f64> = (0..m).map(|_| dist.sample(&mut rng)).collect();
    (u, v)
}

// Distribution of (1/n)|ln det Z - ln per| for families with closed-form
// permanents, swept over n.
fn concentration(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let sweep = config
        .sweep
        .clone()
        .unwrap_or_else(|| vec![[50, 50], [100, 100], [200, 200]]);
    let threshold = config.delta.unwrap_or(0.1);
    let field = config.field_kind()?;
    let mut result = fresh_result(config);
    for [n, m] in sweep {
        if m == 0 || m > n {
            return Err(CliError::validation(format!(
                "invalid sweep shape ({n}, {m})"
            )));
        }
        let flat_matrix = gen_flat(n, m)?;
        let log_per_flat = exact::perm_flat(n, m)?.log_value;
        let devs = par_trials(config.trials, |t| {
            let ld =
                estimator::log_det_estimate_trial(&flat_matrix, field, config.seed, t)?.log_det;
            Ok((ld - log_per_flat).abs() / n as f64)
        })?;
        result
            .series
            .push(StatSeries::new(format!("dev_flat_n{n}"), devs).with_tails(&[threshold]));

        let (u, v) = rank_one_vectors(config.seed, n, m);
        let rank_one = gen_rank_one(&u, &v)?;
        let log_per_r1 = exact::perm_rank_one(&u, &v)?.log_value;
        let devs = par_trials(config.trials, |t| {
            let ld = estimator::log_det_estimate_trial(&rank_one, field, config.seed ^ 0x7261, t)?
                .log_det;
            Ok((ld - log_per_r1).abs() / n as f64)
        })?;
        result
            .series
            .push(StatSeries::new(format!("dev_rank_one_n{n}"), devs).with_tails(&[threshold]));
    }
    Ok(result)
}

// One-sided Markov tail of the log ratio for the flat case.
fn upper_tail(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let (n, m) = shape_or(config, 100, 100);
    let delta = config.delta.unwrap_or(0.05);
    let s = config.s.unwrap_or(n as f64);
    let j = gen_flat(n, m)?;
    let log_per = exact::perm_flat(n, m)?.log_value;
    let field = config.field_kind()?;
    let vals = par_trials(config.trials, |t| {
        let ld = estimator::log_det_estimate_trial(&j, field, config.seed, t)?.log_det;
        Ok((ld - log_per) / s)
    })?;
    let mut result = fresh_result(config);
    result
        .series
        .push(StatSeries::new("normalized_log_ratio", vals).with_tails(&[2.0 * delta]));
    result
        .bounds
        .push(NamedValue::new("markov_bound", (-2.0 * delta * s).exp()));
    Ok(result)
}

// Spread of the cutoff log determinant across draws, per n.
fn cutoff_concentration(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let sweep = config
        .sweep
        .clone()
        .unwrap_or_else(|| vec![[20, 10], [40, 20], [80, 40]]);
    let (lo, hi) = config.bounds_or(0.5, 2.0);
    let eps = config.epsilon.unwrap_or(0.05);
    let delta = config.delta.unwrap_or(0.1);
    let field = config.field_kind()?;
    let bounds = EntryBounds::new(lo, hi)?;
    let mut result = fresh_result(config);
    for [n, m] in sweep {
        // one fixed matrix per size; the trials vary the Gaussian draw only
        let a = gen_uniform(n, m, &bounds, config.seed ^ (n as u64))?;
        let cutoff = CutoffParams::new(eps, n as f64)?;
        let vals = par_trials(config.trials, |t| {
            let rep = spectrum::eigenvalues_of_z_trial(&a, field, config.seed, t, cutoff)?;
            Ok(spectrum::log_det_cutoff(&rep) / (n + m) as f64)
        })?;
        let sd = stats::sample_sd(&vals);
        result
            .series
            .push(StatSeries::new(format!("cutoff_logdet_rate_n{n}"), vals));
        extra_num(&mut result, &format!("sd_n{n}"), sd);
        let nm = (n + m) as f64;
        result.bounds.push(NamedValue::new(
            format!("concentration_tail_bound_n{n}"),
            2.0 * (-nm * nm * eps * eps * delta * delta / (8.0 * hi * hi)).exp(),
        ));
    }
    Ok(result)
}

// Monte Carlo mean of the small-eigenvalue tail statistic vs its
// closed-form bound; sparse-column variant when gamma/theta are given.
fn tail_statistic(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let field = config.field_kind()?;
    let mut result = fresh_result(config);
    match (config.gamma, config.theta) {
        (Some(gamma), Some(theta)) => {
            let eps = config.epsilon.unwrap_or(0.05);
            let (lo, hi) = config.bounds_or(1.0, 2.0);
            let spec = SparseColumnSpec::new(gamma, theta, EntryBounds::new(lo, hi)?)?;
            let ns: Vec<usize> = config
                .sweep
                .clone()
                .map(|s| s.iter().map(|[n, _]| *n).collect())
                .unwrap_or_else(|| vec![40, 60, 80]);
            let scale = eps * eps.ln().abs();
            for n in ns {
                let cutoff = CutoffParams::new(eps, n as f64)?;
                let vals = par_trials(config.trials, |t| {
                    let a = gen_sparse_column(n, &spec, config.seed ^ (t << 17) ^ n as u64)?;
                    let rep = spectrum::eigenvalues_of_z_trial(&a, field, config.seed, t, cutoff)?;
                    Ok(spectrum::tail_statistic(&rep)?.value)
                })?;
                let (mean, _) = stats::mean_se(&vals);
                extra_num(&mut result, &format!("c_fitted_n{n}"), mean / scale);
                result
                    .series
                    .push(StatSeries::new(format!("tail_stat_n{n}"), vals));
            }
            result
                .bounds
                .push(NamedValue::new("c_epsilon_budget", 10.0 * scale));
        }
        (None, None) => {
            let (n, m) = shape_or(config, 12, 6);
            let eps = config.epsilon.unwrap_or(0.01);
            let (lo, hi) = config.bounds_or(1.0, 2.0);
            let bounds = EntryBounds::new(lo, hi)?;
            let cutoff = CutoffParams::new(eps, config.s.unwrap_or(n as f64))?;
            let vals = par_trials(config.trials, |t| {
                let a = gen_uniform(n, m, &bounds, config.seed ^ (t << 17))?;
                let rep = spectrum::eigenvalues_of_z_trial(&a, field, config.seed, t, cutoff)?;
                Ok(spectrum::tail_statistic(&rep)?.value)
            })?;
            result.series.push(StatSeries::new("tail_stat", vals));
            result.bounds.push(NamedValue::new(
                "prop31_rhs",
                spectrum::prop31_rhs(n, m, lo, eps)?,
            ));
            result.bounds.push(NamedValue::new(
                "prop31_rhs_corrected",
                spectrum::prop31_rhs_corrected(n, m, lo, eps)?,
            ));
        }
        _ => {
            return Err(CliError::validation(
                "sparse variant needs both gamma and theta",
            ));
        }
    }
    Ok(result)
}

// KS comparison of the estimator's flat-case law against the exact
// chi-square product, with a shifted-degree sensitivity control.
fn flat_distribution(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let (n, m) = shape_or(config, 6, 4);
    if config.trials < 1000 {
        return Err(CliError::validation(
            "flat_distribution needs trials >= 1000",
        ));
    }
    let j = gen_flat(n, m)?;
    let est = par_trials(config.trials, |t| {
        Ok(estimator::log_det_estimate_trial(&j, FieldKind::Real, config.seed, t)?.log_det)
    })?;
    let chi = par_trials(config.trials, |t| {
        Ok(flat::chi2_product_sample_shifted_trial(
            n,
            m,
            0,
            config.seed ^ 0x5bd1_e995,
            t,
        )?)
    })?;
    let shifted = par_trials(config.trials, |t| {
        Ok(flat::chi2_product_sample_shifted_trial(
            n,
            m,
            1,
            config.seed ^ 0x1234_5678,
            t,
        )?)
    })?;
    let ks = stats::ks_two_sample(&est, &chi);
    let control = stats::ks_two_sample(&est, &shifted);
    let mut result = fresh_result(config);
    result
        .series
        .push(StatSeries::new("log_det_estimator", est));
    result.series.push(StatSeries::new("log_chi2_product", chi));
    result
        .series
        .push(StatSeries::new("log_chi2_product_shifted", shifted));
    result
        .bounds
        .push(NamedValue::new("ks_statistic", ks.statistic));
    result
        .bounds
        .push(NamedValue::new("ks_p_value", ks.p_value));
    result
        .bounds
        .push(NamedValue::new("control_p_value", control.p_value));
    Ok(result)
}

// Coverage of the averaged estimator vs its Chebyshev guarantee.
fn yn_coverage(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let (n, m) = shape_or(config, 6, 4);
    let delta = config.delta.unwrap_or(0.3);
    let budget = config.budget.unwrap_or(1_000_000);
    let replications = config.trials;
    let n_per = match config.samples_per_estimate {
        Some(explicit) => explicit,
        None => {
            let scheduled = flat::yn_schedule(n, config.rho.unwrap_or(1.0));
            scheduled
                .min((budget / replications.max(1) as u64) as usize)
                .max(1)
        }
    };
    let cov = flat::yn_coverage(n, m, n_per, delta, replications, budget, config.seed)?;
    let mut result = fresh_result(config);
    result.series.push(StatSeries::new(
        "y_normalized",
        cov.normalized_estimates.clone(),
    ));
    result
        .bounds
        .push(NamedValue::new("empirical_coverage", cov.coverage));
    result
        .bounds
        .push(NamedValue::new("chebyshev_failure_bound", cov.bound));
    result.bounds.push(NamedValue::new(
        "samples_per_estimate",
        cov.samples_per_estimate as f64,
    ));
    Ok(result)
}

// Identity-matrix worst case: the log-rate constants for both fields.
fn gamma_constant(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let (n, _) = shape_or(config, 400, 400);
    let a = DenseMatrix::identity(n);
    let rate_real = par_trials(config.trials, |t| {
        Ok(
            estimator::log_det_estimate_trial(&a, FieldKind::Real, config.seed, t)?.log_det
                / n as f64,
        )
    })?;
    let rate_complex = par_trials(config.trials, |t| {
        Ok(
            estimator::log_det_estimate_trial(&a, FieldKind::Complex, config.seed ^ 0x636f, t)?
                .log_det
                / n as f64,
        )
    })?;
    let mut result = fresh_result(config);
    result.series.push(StatSeries::new("rate_real", rate_real));
    result
        .series
        .push(StatSeries::new("rate_complex", rate_complex));
    result.bounds.push(NamedValue::new(
        "target_real",
        special::digamma(0.5) + core::f64::consts::LN_2,
    ));
    result
        .bounds
        .push(NamedValue::new("target_complex", special::digamma(1.0)));
    Ok(result)
}

// Density-form equality, normalization, the empirical hard-edge histogram,
// and the singular-integral scan.
fn laguerre_density(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let (n, _) = shape_or(config, 50, 50);
    let alpha = config.alpha.unwrap_or(0.25);
    let ctx = laguerre::LaguerreContext::new(n)?;

    // eigenvalue draws (full spectra pooled for the histogram)
    let spectra: Vec<Vec<f64>> = (0..config.trials as u64)
        .into_par_iter()
        .map(|t| laguerre::complex_wishart_eigs_trial(n, config.seed, t).map_err(CliError::from))
        .collect::<Result<_, _>>()?;
    let lambda_min: Vec<f64> = spectra.iter().map(|s| s[0]).collect();
    let pooled: Vec<f64> = spectra.into_iter().flatten().collect();

    // form equality on a 200-point log grid (CD form needs n >= 2)
    let gap_n = n.clamp(2, 30);
    let gap_ctx = laguerre::LaguerreContext::new(gap_n)?;
    let mut max_gap = 0.0f64;
    for i in 0..200 {
        let x = 1e-6 * (10.0f64 / 1e-6).powf(i as f64 / 199.0);
        let e = laguerre::density_eval(&gap_ctx, x)?;
        max_gap = max_gap.max((e.sum_form - e.cd_form).abs() / e.sum_form.max(1.0));
    }

    let quad = permcast_core::quad::AdaptiveQuad::new(1e-9);
    let cap = |x: f64| {
        if x <= 0.0 {
            f64::INFINITY
        } else {
            (0.25 * core::f64::consts::PI * x.sqrt() / n as f64).max(1e-7)
        }
    };
    let mass = quad.integrate_capped(|x| laguerre::density_sum_form(&ctx, x), 0.0, 25.0, cap);

    // empirical histogram vs per-bin quadrature, 40 bins on [0, 5]
    let counts = stats::histogram(&pooled, 0.0, 5.0, 40);
    let total = pooled.len() as f64;
    let mut l1 = 0.0f64;
    for (b, &c) in counts.iter().enumerate() {
        let lo = 5.0 * b as f64 / 40.0;
        let hi = 5.0 * (b + 1) as f64 / 40.0;
        let th = quad.integrate_capped(|x| laguerre::density_sum_form(&ctx, x), lo, hi, cap);
        l1 += (c as f64 / total - th.value).abs();
    }

    let mut result = fresh_result(config);
    result
        .series
        .push(StatSeries::new("lambda_min", lambda_min));
    extra_num(&mut result, "form_gap_max", max_gap);
    extra_num(&mut result, "normalization_mass", mass.value);
    extra_num(&mut result, "histogram_l1", l1);

    // eps scan of the singular integral at the configured alpha
    let eps_grid = [0.1, 0.05, 0.01, 0.005];
    let scan_vals: Result<Vec<f64>, CliError> = eps_grid
        .iter()
        .map(|&e| laguerre::integral_a2(&ctx, e, alpha).map_err(CliError::from))
        .collect();
    let scan_vals = scan_vals?;
    result.extra.insert(
        "integral_eps_scan".into(),
        serde_json::json!({
            "alpha": alpha,
            "eps": eps_grid,
            "values": scan_vals,
        }),
    );
    if alpha < 0.5 {
        let n_list = [n.max(2) / 2, n];
        let scan = laguerre::prop_a1_scan(&n_list, &eps_grid, alpha)?;
        result.extra.insert(
            "prop_a1_scan".into(),
            serde_json::json!({
                "n": scan.n_values,
                "eps": scan.eps_values,
                "values": scan.values,
                "corner_value": scan.corner_value(),
            }),
        );
    }
    Ok(result)
}

// Randomized batches of the linear-algebra identities.
fn identities(config: &ScenarioConfig) -> Result<ScenarioResult, CliError> {
    let seed = config.seed;
    let gaps = par_trials(config.trials, |t| {
        let mut rng = substream(seed, scen_domain::IDENTITIES, t);
        let v = DMatrix::from_fn(8, 5, |_, _| StandardNormal.sample(&mut rng));
        let mut worst = 0.0f64;
        for k in 0..5 {
            worst = worst.max(spectrum::factorization_identity_gap(&v, k)?);
        }
        Ok(worst)
    })?;
    let fan_ok = par_trials(config.trials, |t| {
        let mut rng = substream(seed, scen_domain::IDENTITIES, t ^ 0x8000_0000_0000_0000);
        let dim = 2 + (t as usize % 7);
        let g1 = DMatrix::from_fn(dim + 2, dim, |_, _| StandardNormal.sample(&mut rng));
        let g2 = DMatrix::from_fn(dim + 2, dim, |_, _| StandardNormal.sample(&mut rng));
        let m1 = g1.transpose() * &g1;
        let m2 = g2.transpose() * &g2;
        for i in 0..dim {
            for j in 0..dim {
                if i + j + 1 <= dim && !spectrum::fan_inequality_check(&m1, &m2, i, j)? {
                    return Ok(0.0);
                }
            }
        }
        Ok(1.0)
    })?;
    let bounds_i = EntryBounds::new(0.5, 2.0)?;
    let interlace_ok = par_trials(config.trials, |t| {
        let a = gen_uniform(7, 4, &bounds_i, seed ^ (t << 21))?;
        for k in 0..4 {
            if !spectrum::interlacing_check(&a, k, FieldKind::Real, seed ^ t)? {
                return Ok(0.0);
            }
        }
        Ok(1.0)
    })?;
    let bounds_s = EntryBounds::new(1.0, 2.0)?;
    let sandwich_ok = par_trials(config.trials, |t| {
        let a = gen_uniform(6, 3, &bounds_s, seed ^ (t << 13))?;
        let ok =
            spectrum::quadratic_form_bounds_check(&a, (t % 3) as usize, FieldKind::Real, seed ^ t)?;
        Ok(if ok { 1.0 } else { 0.0 })
    })?;

    let mut result = fresh_result(config);
    let gap_max = gaps.iter().cloned().fold(0.0f64, f64::max);
    result
        .series
        .push(StatSeries::new("factorization_gap", gaps));
    result.series.push(StatSeries::new("fan_ok", fan_ok));
    result
        .series
        .push(StatSeries::new("interlacing_ok", interlace_ok));
    result
        .series
        .push(StatSeries::new("sandwich_ok", sandwich_ok));
    result
        .bounds
        .push(NamedValue::new("factorization_gap_max", gap_max));
    Ok(result)
}
