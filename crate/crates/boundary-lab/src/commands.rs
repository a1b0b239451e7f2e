//! Scenario commands behind the CLI: each one builds its objects from a
//! [`RunConfig`], runs the probes, writes artifacts into the output
//! directory, and reports a pass/fail verdict.
//!
//! Exit-code contract: verdict failure is a clean `Ok(false)` (exit 1);
//! configuration and usage problems are `Err` (exit 2).

use crate::boundary_sets::{complement_samples, measure_upper_bound, test_points, BoundarySet};
use crate::comb_geometry::{gamma_polyline, split_check_stable, CombDomain, CombError, Point, PolyArc};
use crate::config::{CombConfig, ConfigError, RunConfig};
use crate::function_factory::{
    blaschke_eval, blaschke_times, corollary1_pipeline, lusin_function, AnalyticFunctionRep,
    FactoryError, TRANSFORM_BOUND, TRANSFORM_FLOOR,
};
use crate::radial_probe::{
    classify, partial_product_l2_gap, radial_sample, summarize, uniform_grid, ProbeError,
    RadialTrace, TraceKind, TraceVerdict,
};
use crate::report::{
    fmt_f64, split_report_value, stats_value, write_json, write_trace_csv, write_verdicts_json,
};
use crate::complex_core::DiskPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};
use std::f64::consts::TAU;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("probe failed: {0}")]
    Probe(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ProbeError> for CommandError {
    fn from(e: ProbeError) -> Self {
        CommandError::Probe(e.to_string())
    }
}

impl From<FactoryError> for CommandError {
    fn from(e: FactoryError) -> Self {
        CommandError::Probe(e.to_string())
    }
}

impl From<crate::boundary_sets::SetError> for CommandError {
    fn from(e: crate::boundary_sets::SetError) -> Self {
        CommandError::Config(ConfigError::Invalid(e.to_string()))
    }
}

fn probe_points(
    rep: &AnalyticFunctionRep,
    thetas: &[f64],
    cfg: &RunConfig,
) -> Result<Vec<(RadialTrace, TraceVerdict)>, CommandError> {
    let schedule = cfg.probe.schedule();
    let pairs: Vec<(RadialTrace, TraceVerdict)> = thetas
        .par_iter()
        .map(|&theta| {
            let trace = radial_sample(rep, theta, &schedule)?;
            let verdict = classify(&trace, cfg.probe.conv_tol, cfg.probe.osc_tol, cfg.probe.window)?;
            Ok::<_, ProbeError>((trace, verdict))
        })
        .collect::<Result<_, _>>()?;
    Ok(pairs)
}

fn count_kind(pairs: &[(RadialTrace, TraceVerdict)], want_oscillating: bool) -> usize {
    pairs
        .iter()
        .filter(|(_, v)| match v.kind {
            TraceKind::Oscillating { .. } => want_oscillating,
            TraceKind::Converged { .. } => !want_oscillating,
            TraceKind::Inconclusive => false,
        })
        .count()
}

fn required_set(cfg: &RunConfig) -> Result<BoundarySet, CommandError> {
    cfg.boundary_set
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing boundary set".into()))?
        .build()
        .map_err(CommandError::Config)
}

struct BoundaryProbe {
    e_pairs: Vec<(RadialTrace, TraceVerdict)>,
    complement_pairs: Vec<(RadialTrace, TraceVerdict)>,
    e_oscillating: usize,
    complement_converged: usize,
    complement_fraction: f64,
    pass: bool,
}

/// Shared body of the lusin/transform/corollary1 scenarios: probe the
/// boundary-set points and complement samples, demand oscillation on E
/// and convergence (>= 95%) off E.
fn boundary_probe(
    rep: &AnalyticFunctionRep,
    set: &BoundarySet,
    cfg: &RunConfig,
    out: &Path,
) -> Result<BoundaryProbe, CommandError> {
    let e_points: Vec<f64> = test_points(set, cfg.probe.e_points)?
        .iter()
        .map(|p| p.theta())
        .collect();
    if e_points.is_empty() {
        return Err(ConfigError::Invalid("empty boundary set".into()).into());
    }
    let complement: Vec<f64> = complement_samples(set, cfg.probe.complement_points, cfg.probe.seed)?
        .iter()
        .map(|p| p.theta())
        .collect();

    let e_pairs = probe_points(rep, &e_points, cfg)?;
    let complement_pairs = probe_points(rep, &complement, cfg)?;

    let e_oscillating = count_kind(&e_pairs, true);
    let complement_converged = count_kind(&complement_pairs, false);
    let complement_fraction = if complement_pairs.is_empty() {
        1.0
    } else {
        complement_converged as f64 / complement_pairs.len() as f64
    };
    let pass = e_oscillating == e_pairs.len() && complement_fraction >= 0.95;

    let traces: Vec<RadialTrace> = e_pairs.iter().map(|(t, _)| t.clone()).collect();
    write_trace_csv(&out.join("e_traces.csv"), &traces)?;
    let traces: Vec<RadialTrace> = complement_pairs.iter().map(|(t, _)| t.clone()).collect();
    write_trace_csv(&out.join("complement_traces.csv"), &traces)?;
    let verdicts: Vec<TraceVerdict> = e_pairs
        .iter()
        .chain(complement_pairs.iter())
        .map(|(_, v)| v.clone())
        .collect();
    write_verdicts_json(&out.join("verdicts.json"), &verdicts)?;

    Ok(BoundaryProbe {
        e_pairs,
        complement_pairs,
        e_oscillating,
        complement_converged,
        complement_fraction,
        pass,
    })
}

/// Lusin scenario: the transform of the singular inner function on E
/// oscillates on every probed E point and converges off E.
pub fn cmd_lusin(cfg: &RunConfig, out: &Path) -> Result<bool, CommandError> {
    let set = required_set(cfg)?;
    let rep = lusin_function(&set)?;
    let probe = boundary_probe(&rep, &set, cfg, out)?;
    let summary = json!({
        "scenario": "lusin",
        "measure_bound": measure_upper_bound(&set),
        "function_bound": rep.bound(),
        "e_total": probe.e_pairs.len(),
        "e_oscillating": probe.e_oscillating,
        "complement_total": probe.complement_pairs.len(),
        "complement_converged": probe.complement_converged,
        "complement_fraction": probe.complement_fraction,
        "pass": probe.pass,
    });
    write_json(&out.join("summary.json"), &summary)?;
    Ok(probe.pass)
}

fn modulus_window(pairs: &[(RadialTrace, TraceVerdict)]) -> (f64, f64, bool) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (t, _) in pairs {
        for v in &t.values {
            let m = v.norm();
            lo = lo.min(m);
            hi = hi.max(m);
        }
    }
    let ok = lo > TRANSFORM_FLOOR && hi < TRANSFORM_BOUND;
    (lo, hi, ok)
}

/// Build the transform rep from the configured function spec: an explicit
/// transform spec is taken as-is, an inner spec with explicit log is
/// wrapped; anything with Blaschke factors is a usage error pointing to
/// the corollary1 scenario.
fn transform_rep(cfg: &RunConfig) -> Result<AnalyticFunctionRep, CommandError> {
    let spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing function spec".into()))?;
    let rep = spec.build()?;
    match rep {
        AnalyticFunctionRep::Transformed(_) => Ok(rep),
        inner if inner.has_explicit_log() => {
            Ok(AnalyticFunctionRep::Transformed(Box::new(inner)))
        }
        _ => Err(ConfigError::Invalid(
            "function has no explicit log (Blaschke factors present); use the corollary1 scenario to factor them out".into(),
        )
        .into()),
    }
}

fn transform_probe(
    rep: &AnalyticFunctionRep,
    scenario: &str,
    cfg: &RunConfig,
    out: &Path,
    extra: Value,
    extra_gate: bool,
) -> Result<bool, CommandError> {
    let set = required_set(cfg)?;
    let probe = boundary_probe(rep, &set, cfg, out)?;
    let all_pairs: Vec<(RadialTrace, TraceVerdict)> = probe
        .e_pairs
        .iter()
        .chain(probe.complement_pairs.iter())
        .cloned()
        .collect();
    let (lo, hi, window_ok) = modulus_window(&all_pairs);
    let pass = probe.pass && window_ok && extra_gate;
    let mut summary = json!({
        "scenario": scenario,
        "e_total": probe.e_pairs.len(),
        "e_oscillating": probe.e_oscillating,
        "complement_total": probe.complement_pairs.len(),
        "complement_converged": probe.complement_converged,
        "complement_fraction": probe.complement_fraction,
        "modulus_min": lo,
        "modulus_max": hi,
        "modulus_window": [TRANSFORM_FLOOR, TRANSFORM_BOUND],
        "modulus_window_ok": window_ok,
        "pass": pass,
    });
    if let Value::Object(extra) = extra {
        summary.as_object_mut().unwrap().extend(extra);
    }
    write_json(&out.join("summary.json"), &summary)?;
    Ok(pass)
}

/// Transform scenario: probe `g = e^{-i log h}` on E and off E and check
/// the modulus window `(e^{pi/2}, e^{3pi/2})` on every written sample.
pub fn cmd_transform(cfg: &RunConfig, out: &Path) -> Result<bool, CommandError> {
    let rep = transform_rep(cfg)?;
    transform_probe(&rep, "transform", cfg, out, json!({}), true)
}

/// Corollary-1 scenario: divide the Blaschke factor out symbolically,
/// probe the transform of the zero-free part, and spot-check that the
/// represented product `B * f1` matches factor-wise evaluation.
pub fn cmd_corollary1(cfg: &RunConfig, out: &Path) -> Result<bool, CommandError> {
    let zeros = if cfg.zeros.is_some() {
        cfg.blaschke_zeros()?
    } else {
        return Err(ConfigError::Invalid("missing Blaschke zero list".into()).into());
    };
    let f1_spec = cfg
        .function
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing zero-free factor spec".into()))?;
    let f1 = f1_spec.build()?;
    if !f1.has_explicit_log() {
        return Err(ConfigError::Invalid(
            "the zero-free factor f1 must not contain Blaschke zeros".into(),
        )
        .into());
    }
    let g = corollary1_pipeline(&zeros, &f1)?;

    // factor-wise consistency of the represented product at random points
    let product = blaschke_times(&zeros, &f1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.probe.seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..100 {
        let z = DiskPoint::new(rng.gen_range(0.0..TAU), rng.gen_range(1e-6..1.0))
            .expect("eps in range");
        let a = product.evaluate(z)?;
        let b = blaschke_eval(&zeros, z) * f1.evaluate(z)?;
        max_dev = max_dev.max((a - b).norm());
    }
    let consistent = max_dev <= 1e-12;

    transform_probe(
        &g,
        "corollary1",
        cfg,
        out,
        json!({
            "blaschke_zero_count": zeros.len(),
            "product_consistency_max_dev": max_dev,
            "product_consistent": consistent,
        }),
        consistent,
    )
}

/// Dyadic ladder 1, 2, 4, ... capped by `n`, always ending at `n`.
fn dyadic_ladder(n: usize) -> Vec<usize> {
    let mut ladder = Vec::new();
    let mut k = 1usize;
    while k < n {
        ladder.push(k);
        k *= 2;
    }
    if n > 0 {
        ladder.push(n);
    }
    ladder
}

const GAP_EPS: f64 = 0.01;
const GAP_GRID: usize = 512;
const GAP_TOL: f64 = 1e-9;
const HISTOGRAM_BINS: usize = 20;

/// Riesz scenario: a.e. unimodular radial limits of a Blaschke product,
/// plus the mean-square convergence of its partial products.
pub fn cmd_riesz(cfg: &RunConfig, out: &Path) -> Result<bool, CommandError> {
    let zeros = cfg.blaschke_zeros()?;
    let rep = AnalyticFunctionRep::Blaschke(zeros.clone());
    let thetas = uniform_grid(cfg.probe.theta_grid);
    let pairs = probe_points(&rep, &thetas, cfg)?;
    let verdicts: Vec<TraceVerdict> = pairs.iter().map(|(_, v)| v.clone()).collect();
    let stats = summarize(&verdicts, cfg.probe.conv_tol);
    write_verdicts_json(&out.join("verdicts.json"), &verdicts)?;

    // modulus histogram over converged limits
    let moduli: Vec<f64> = verdicts
        .iter()
        .filter_map(|v| match &v.kind {
            TraceKind::Converged { limit } => Some(limit.norm()),
            _ => None,
        })
        .collect();
    let mut csv = String::from("bin_lo,bin_hi,count\n");
    for b in 0..HISTOGRAM_BINS {
        let lo = b as f64 / HISTOGRAM_BINS as f64;
        let hi = (b + 1) as f64 / HISTOGRAM_BINS as f64;
        let count = moduli
            .iter()
            .filter(|&&m| m >= lo && (m < hi || (b == HISTOGRAM_BINS - 1 && m <= hi + 1.0)))
            .count();
        csv.push_str(&format!("{},{},{}\n", fmt_f64(lo), fmt_f64(hi), count));
    }
    std::fs::create_dir_all(out)?;
    std::fs::write(out.join("modulus_histogram.csv"), csv)?;

    // partial-product mean-square gap ladder
    let ladder = dyadic_ladder(zeros.len());
    let mut gaps = Vec::with_capacity(ladder.len());
    let mut csv = String::from("n,gap\n");
    for &n in &ladder {
        let gap = partial_product_l2_gap(&zeros, n, GAP_EPS, GAP_GRID)?;
        csv.push_str(&format!("{},{}\n", n, fmt_f64(gap)));
        gaps.push(gap);
    }
    std::fs::write(out.join("partial_product_gaps.csv"), csv)?;
    let nonincreasing = gaps.windows(2).all(|w| w[1] <= w[0] + GAP_TOL);

    let median_ok = !stats.median_modulus.is_nan() && stats.median_modulus >= cfg.median_threshold;
    let pass = median_ok && nonincreasing;
    let summary = json!({
        "scenario": "riesz",
        "zero_count": zeros.len(),
        "blaschke_condition": crate::function_factory::blaschke_condition(&zeros),
        "stats": stats_value(&stats),
        "median_threshold": cfg.median_threshold,
        "gap_ladder": ladder,
        "gaps": gaps,
        "gaps_nonincreasing": nonincreasing,
        "pass": pass,
    });
    write_json(&out.join("summary.json"), &summary)?;
    Ok(pass)
}

/// Comb scenario: verify the two-component split at the configured grid
/// and its doubling.
pub fn cmd_comb(cfg: &RunConfig, out: &Path) -> Result<bool, CommandError> {
    let comb: &CombConfig = cfg
        .comb
        .as_ref()
        .ok_or_else(|| ConfigError::Invalid("missing comb config".into()))?;
    let domain =
        CombDomain::new(comb.n_slits).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let gamma = gamma_polyline(&domain, comb.k_max)
        .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let gamma1 = PolyArc::new(
        &domain,
        vec![gamma.first(), Point::new(1.0, gamma.first().v)],
    )
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;

    match split_check_stable(&domain, &gamma, &gamma1, comb.grid) {
        Ok((base, doubled, stable)) => {
            write_json(&out.join("split_report.json"), &split_report_value(&base, stable))?;
            write_json(
                &out.join("split_report_doubled.json"),
                &split_report_value(&doubled, stable),
            )?;
            let pass = stable;
            let summary = json!({
                "scenario": "comb",
                "n_slits": comb.n_slits,
                "k_max": comb.k_max,
                "grids": [comb.grid, comb.grid * 2],
                "components": [base.components, doubled.components],
                "stable": stable,
                "pass": pass,
            });
            write_json(&out.join("summary.json"), &summary)?;
            Ok(pass)
        }
        Err(CombError::DegenerateRaster(a, b)) => {
            let summary = json!({
                "scenario": "comb",
                "n_slits": comb.n_slits,
                "k_max": comb.k_max,
                "grids": [comb.grid, comb.grid * 2],
                "components": [a, b],
                "degenerate_raster": true,
                "stable": false,
                "pass": false,
            });
            write_json(&out.join("summary.json"), &summary)?;
            Ok(false)
        }
        Err(e) => Err(ConfigError::Invalid(e.to_string()).into()),
    }
}

/// Dispatch on the scenario name; returns the process exit code.
pub fn run_scenario(cfg: &RunConfig, out: &Path) -> i32 {
    let result = match cfg.scenario.as_str() {
        "lusin" => cmd_lusin(cfg, out),
        "riesz" => cmd_riesz(cfg, out),
        "transform" => cmd_transform(cfg, out),
        "corollary1" => cmd_corollary1(cfg, out),
        "comb" => cmd_comb(cfg, out),
        other => Err(ConfigError::Invalid(format!("unknown scenario '{}'", other)).into()),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("verdict: FAIL (see summary.json in {})", out.display());
            1
        }
        Err(e) => {
            eprintln!("error: {}", e);
            2
        }
    }
}
