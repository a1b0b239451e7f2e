//! Radial sampling and trace classification.
//!
//! A function is probed along the radius at angle `theta` on a strictly
//! decreasing `eps` schedule; the tail of the trace is classified as
//! converged or oscillating by its diameter (max pairwise distance), the
//! same notion of oscillation used in the write-ups this lab checks.

use crate::complex_core::DiskPoint;
use crate::function_factory::{blaschke_eval, AnalyticFunctionRep, BlaschkeZeros, FactoryError};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ProbeError {
    #[error("eps schedule is empty or not strictly decreasing positive")]
    InvalidSchedule,
    #[error("window {window} exceeds trace length {len}")]
    WindowTooLarge { window: usize, len: usize },
    #[error("conv_tol {conv_tol} must be positive and below osc_tol {osc_tol}")]
    BadTolerances { conv_tol: f64, osc_tol: f64 },
    #[error("partial product index {n} exceeds zero count {len}")]
    PrefixTooLong { n: usize, len: usize },
    #[error("theta grid must be nonempty and grid >= 64 for mean-square gaps, got {0}")]
    GridTooCoarse(usize),
    #[error(transparent)]
    Factory(#[from] FactoryError),
}

/// Default dyadic schedule `eps = 2^-k`, `k = 3..=45`.
pub fn default_schedule() -> Vec<f64> {
    dyadic_schedule(3, 45)
}

/// The dyadic schedule `eps = 2^-k` for `k` in `k_min..=k_max`.
pub fn dyadic_schedule(k_min: u32, k_max: u32) -> Vec<f64> {
    (k_min..=k_max).map(|k| 2.0f64.powi(-(k as i32))).collect()
}

pub const DEFAULT_WINDOW: usize = 12;
pub const DEFAULT_CONV_TOL: f64 = 1e-6;
pub const DEFAULT_OSC_TOL: f64 = 1.0;

fn check_schedule(schedule: &[f64]) -> Result<(), ProbeError> {
    if schedule.is_empty() {
        return Err(ProbeError::InvalidSchedule);
    }
    for (i, &e) in schedule.iter().enumerate() {
        if !(e > 0.0 && e <= 1.0) || (i > 0 && e >= schedule[i - 1]) {
            return Err(ProbeError::InvalidSchedule);
        }
    }
    Ok(())
}

/// Samples of a function along one radius, one value per schedule entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialTrace {
    pub theta: f64,
    pub schedule: Vec<f64>,
    pub values: Vec<Complex64>,
}

/// Sample `rep` along the radius at `theta` over the given `eps` schedule.
pub fn radial_sample(
    rep: &AnalyticFunctionRep,
    theta: f64,
    schedule: &[f64],
) -> Result<RadialTrace, ProbeError> {
    check_schedule(schedule)?;
    let mut values = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let z = DiskPoint::new(theta, eps).map_err(FactoryError::Core)?;
        values.push(rep.evaluate(z)?);
    }
    Ok(RadialTrace {
        theta,
        schedule: schedule.to_vec(),
        values,
    })
}

/// Verdict for one radial trace.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceKind {
    Converged { limit: Complex64 },
    Oscillating { tail_diameter: f64 },
    Inconclusive,
}

impl TraceKind {
    pub fn label(&self) -> &'static str {
        match self {
            TraceKind::Converged { .. } => "converged",
            TraceKind::Oscillating { .. } => "oscillating",
            TraceKind::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceVerdict {
    pub theta: f64,
    pub kind: TraceKind,
    pub tail_diameter: f64,
    pub window: usize,
}

fn diameter(points: &[Complex64]) -> f64 {
    let mut d = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            d = d.max((a - b).norm());
        }
    }
    d
}

/// Classify a trace by the diameter of its last `window` values:
/// `Converged` (limit = last value) below `conv_tol`, `Oscillating` above
/// `osc_tol`, `Inconclusive` between. The tolerance gap `conv_tol <
/// osc_tol` makes the two positive verdicts mutually exclusive.
pub fn classify(
    trace: &RadialTrace,
    conv_tol: f64,
    osc_tol: f64,
    window: usize,
) -> Result<TraceVerdict, ProbeError> {
    if !(conv_tol > 0.0 && conv_tol < osc_tol) {
        return Err(ProbeError::BadTolerances { conv_tol, osc_tol });
    }
    if window == 0 || window > trace.values.len() {
        return Err(ProbeError::WindowTooLarge {
            window,
            len: trace.values.len(),
        });
    }
    let tail = &trace.values[trace.values.len() - window..];
    let d = diameter(tail);
    let kind = if d < conv_tol {
        TraceKind::Converged {
            limit: *trace.values.last().unwrap(),
        }
    } else if d > osc_tol {
        TraceKind::Oscillating { tail_diameter: d }
    } else {
        TraceKind::Inconclusive
    };
    Ok(TraceVerdict {
        theta: trace.theta,
        kind,
        tail_diameter: d,
        window,
    })
}

/// Max pairwise distance among `values[tail_start..]`.
pub fn oscillation_diameter(trace: &RadialTrace, tail_start: usize) -> Result<f64, ProbeError> {
    if tail_start >= trace.values.len() {
        return Err(ProbeError::WindowTooLarge {
            window: trace.values.len() - tail_start.min(trace.values.len()),
            len: trace.values.len(),
        });
    }
    Ok(diameter(&trace.values[tail_start..]))
}

/// Aggregate verdict statistics over a theta grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AeStatistics {
    pub total: usize,
    pub converged: usize,
    pub oscillating: usize,
    pub inconclusive: usize,
    /// Min of `|limit|` over converged traces, NaN if none.
    pub min_modulus: f64,
    /// Median of `|limit|` over converged traces, NaN if none.
    pub median_modulus: f64,
    /// Fraction of converged traces with `|limit| > 1 - 10 * conv_tol`.
    pub unimodular_fraction: f64,
}

/// Probe every angle of the grid in parallel and aggregate the verdicts.
///
/// Traces at distinct angles are independent; the per-angle work runs on
/// the rayon pool with an order-preserving collect, and the aggregation is
/// computed after full collection, so the result is identical regardless
/// of execution order.
pub fn ae_statistics(
    rep: &AnalyticFunctionRep,
    thetas: &[f64],
    schedule: &[f64],
    conv_tol: f64,
    osc_tol: f64,
    window: usize,
) -> Result<(Vec<TraceVerdict>, AeStatistics), ProbeError> {
    check_schedule(schedule)?;
    let verdicts: Vec<TraceVerdict> = thetas
        .par_iter()
        .map(|&theta| {
            let trace = radial_sample(rep, theta, schedule)?;
            classify(&trace, conv_tol, osc_tol, window)
        })
        .collect::<Result<_, _>>()?;
    let stats = summarize(&verdicts, conv_tol);
    Ok((verdicts, stats))
}

/// Reduce a verdict list to counts and the converged-modulus distribution.
pub fn summarize(verdicts: &[TraceVerdict], conv_tol: f64) -> AeStatistics {
    let mut moduli: Vec<f64> = Vec::new();
    let mut converged = 0usize;
    let mut oscillating = 0usize;
    let mut inconclusive = 0usize;
    for v in verdicts {
        match &v.kind {
            TraceKind::Converged { limit } => {
                converged += 1;
                moduli.push(limit.norm());
            }
            TraceKind::Oscillating { .. } => oscillating += 1,
            TraceKind::Inconclusive => inconclusive += 1,
        }
    }
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let min_modulus = moduli.first().copied().unwrap_or(f64::NAN);
    let median_modulus = if moduli.is_empty() {
        f64::NAN
    } else if moduli.len() % 2 == 1 {
        moduli[moduli.len() / 2]
    } else {
        0.5 * (moduli[moduli.len() / 2 - 1] + moduli[moduli.len() / 2])
    };
    let near_one = moduli
        .iter()
        .filter(|&&m| m > 1.0 - 10.0 * conv_tol)
        .count();
    let unimodular_fraction = if moduli.is_empty() {
        f64::NAN
    } else {
        near_one as f64 / moduli.len() as f64
    };
    AeStatistics {
        total: verdicts.len(),
        converged,
        oscillating,
        inconclusive,
        min_modulus,
        median_modulus,
        unimodular_fraction,
    }
}

/// The uniform theta grid `2 pi j / n`, `j = 0..n`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

/// Discrete mean-square gap `(1/grid) sum_j |B(z_j) - B_n(z_j)|^2` between
/// the full Blaschke product and its `n`-term partial product on the
/// circle of radius `1 - eps`. Nonincreasing in `n` up to quadrature noise.
pub fn partial_product_l2_gap(
    zeros: &BlaschkeZeros,
    n: usize,
    eps: f64,
    grid: usize,
) -> Result<f64, ProbeError> {
    if n > zeros.len() {
        return Err(ProbeError::PrefixTooLong {
            n,
            len: zeros.len(),
        });
    }
    if grid < 64 {
        return Err(ProbeError::GridTooCoarse(grid));
    }
    let prefix = zeros.prefix(n);
    let total: f64 = (0..grid)
        .into_par_iter()
        .map(|j| {
            let z = DiskPoint::new(TAU * j as f64 / grid as f64, eps)
                .expect("eps validated by caller schedule");
            (blaschke_eval(zeros, z) - blaschke_eval(&prefix, z)).norm_sqr()
        })
        .sum();
    Ok(total / grid as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_sets::{BoundarySet, SingularMeasure};
    use crate::complex_core::LeftHalfPlaneValue;
    use crate::function_factory::{lusin_function, transform_g, TRANSFORM_FLOOR};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn const_trace(values: Vec<Complex64>) -> RadialTrace {
        let schedule = dyadic_schedule(3, 2 + values.len() as u32);
        RadialTrace {
            theta: 0.0,
            schedule,
            values,
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(check_schedule(&[]).is_err());
        assert!(check_schedule(&[0.5, 0.5]).is_err());
        assert!(check_schedule(&[0.25, 0.5]).is_err());
        assert!(check_schedule(&[0.5, 0.25, 0.125]).is_ok());
        let d = default_schedule();
        assert_eq!(d.len(), 43);
        assert_eq!(d[0], 0.125);
        assert_eq!(*d.last().unwrap(), 2.0f64.powi(-45));
        assert!(check_schedule(&d).is_ok());
    }

    #[test]
    fn classify_examples() {
        let t = const_trace(vec![c(0.7, 0.0); 20]);
        let v = classify(&t, 1e-6, 1.0, 12).unwrap();
        assert_eq!(v.tail_diameter, 0.0);
        assert!(matches!(v.kind, TraceKind::Converged { limit } if limit == c(0.7, 0.0)));

        // alternating tail of diameter 2 e^pi
        let e_pi = std::f64::consts::PI.exp();
        let vals: Vec<Complex64> = (0..20)
            .map(|i| if i % 2 == 0 { c(e_pi, 0.0) } else { c(-e_pi, 0.0) })
            .collect();
        let t = const_trace(vals);
        let v = classify(&t, 1e-6, 1.0, 12).unwrap();
        match v.kind {
            TraceKind::Oscillating { tail_diameter } => {
                assert!((tail_diameter - 2.0 * e_pi).abs() < 1e-12)
            }
            _ => panic!("expected oscillating"),
        }

        // diameter in the gap -> inconclusive
        let vals: Vec<Complex64> = (0..20)
            .map(|i| if i % 2 == 0 { c(0.0, 0.0) } else { c(0.5, 0.0) })
            .collect();
        let v = classify(&const_trace(vals), 1e-6, 1.0, 12).unwrap();
        assert!(matches!(v.kind, TraceKind::Inconclusive));

        // verdict gap: boundary diameters are never both verdicts
        let vals: Vec<Complex64> = (0..20)
            .map(|i| if i % 2 == 0 { c(0.0, 0.0) } else { c(1e-6, 0.0) })
            .collect();
        let v = classify(&const_trace(vals), 1e-6, 1.0, 12).unwrap();
        assert!(matches!(v.kind, TraceKind::Inconclusive));
    }

    #[test]
    fn classify_rejects_bad_inputs() {
        let t = const_trace(vec![c(1.0, 0.0); 5]);
        assert!(matches!(
            classify(&t, 1e-6, 1.0, 6),
            Err(ProbeError::WindowTooLarge { window: 6, len: 5 })
        ));
        assert!(matches!(
            classify(&t, 1.0, 1.0, 3),
            Err(ProbeError::BadTolerances { .. })
        ));
    }

    #[test]
    fn oscillation_diameter_examples() {
        let t = const_trace(vec![c(2.0, 0.0); 8]);
        assert_eq!(oscillation_diameter(&t, 0).unwrap(), 0.0);

        let e_pi = std::f64::consts::PI.exp();
        let t = const_trace(vec![c(e_pi, 0.0), c(-e_pi, 0.0)]);
        assert!((oscillation_diameter(&t, 0).unwrap() - 2.0 * e_pi).abs() < 1e-12);
    }

    #[test]
    fn lusin_atom_trace_oscillates_beyond_floor() {
        // probe the transform at the atom; cross-check every sample against
        // the closed form g(eps) = transform_g(-(2 - eps)/eps)
        let g = lusin_function(&BoundarySet::atoms(vec![0.0])).unwrap();
        let schedule = dyadic_schedule(3, 45);
        let trace = radial_sample(&g, 0.0, &schedule).unwrap();
        for (i, &eps) in schedule.iter().enumerate() {
            let oracle =
                transform_g(LeftHalfPlaneValue::new(c(-(2.0 - eps) / eps, 0.0)).unwrap());
            assert!(
                (trace.values[i] - oracle).norm() < 1e-10,
                "closed-form mismatch at eps={}",
                eps
            );
        }
        // tail from eps = 2^-20 (k = 3 at index 0 -> k = 20 at index 17)
        let d = oscillation_diameter(&trace, 17).unwrap();
        assert!(d > TRANSFORM_FLOOR, "diameter {} too small", d);

        let v = classify(&trace, 1e-6, 1.0, 12).unwrap();
        assert!(matches!(v.kind, TraceKind::Oscillating { .. }));
    }

    #[test]
    fn schedule_extension_never_unflips_oscillation() {
        let g = lusin_function(&BoundarySet::atoms(vec![0.0])).unwrap();
        let mut prev = 0.0;
        for k_max in [20u32, 30, 40, 45] {
            let trace = radial_sample(&g, 0.0, &dyadic_schedule(3, k_max)).unwrap();
            let d = oscillation_diameter(&trace, 14).unwrap();
            assert!(d >= prev - 1e-12, "diameter shrank when extending schedule");
            prev = d;
        }
    }

    #[test]
    fn ae_statistics_examples() {
        // Blaschke with the single zero 0: f(z) = z, every trace converges
        // with |limit| = 1 - 2^-45
        let rep = AnalyticFunctionRep::Blaschke(
            BlaschkeZeros::new(vec![c(0.0, 0.0)]).unwrap(),
        );
        let thetas = uniform_grid(100);
        let (verdicts, stats) = ae_statistics(
            &rep,
            &thetas,
            &default_schedule(),
            1e-6,
            1.0,
            12,
        )
        .unwrap();
        assert_eq!(verdicts.len(), 100);
        assert_eq!(stats.total, 100);
        assert_eq!(stats.converged, 100);
        assert_eq!(stats.oscillating, 0);
        assert!((stats.min_modulus - 1.0).abs() < 1e-6);
        assert!((stats.median_modulus - 1.0).abs() < 1e-6);
        assert_eq!(stats.unimodular_fraction, 1.0);

        // permutation invariance of the aggregate
        let mut shuffled = thetas.clone();
        shuffled.reverse();
        shuffled.swap(3, 47);
        let (_, stats2) = ae_statistics(
            &rep,
            &shuffled,
            &default_schedule(),
            1e-6,
            1.0,
            12,
        )
        .unwrap();
        assert_eq!(stats, stats2);
    }

    #[test]
    fn ae_statistics_constant_rep() {
        // a singular inner function probed far inside: use an atom measure
        // and a schedule of moderate radii where it is smooth; here we just
        // check the aggregation arithmetic on handmade verdicts
        let verdicts: Vec<TraceVerdict> = (0..5)
            .map(|i| TraceVerdict {
                theta: i as f64,
                kind: TraceKind::Converged {
                    limit: c(0.5, 0.0),
                },
                tail_diameter: 0.0,
                window: 12,
            })
            .collect();
        let stats = summarize(&verdicts, 1e-6);
        assert_eq!(stats.converged, 5);
        assert_eq!(stats.min_modulus, 0.5);
        assert_eq!(stats.median_modulus, 0.5);
        assert_eq!(stats.unimodular_fraction, 0.0);
    }

    #[test]
    fn partial_product_gap_examples() {
        let zeros = BlaschkeZeros::new(vec![c(0.0, 0.0)]).unwrap();
        // n = 0: empty product is 1; mean of |1 - z|^2 over the circle of
        // radius 1/2 is 1 + (1/2)^2 = 1.25
        let gap = partial_product_l2_gap(&zeros, 0, 0.5, 256).unwrap();
        assert!((gap - 1.25).abs() < 1e-12);
        // direct-summation oracle
        let direct: f64 = (0..256)
            .map(|j| {
                let z = Complex64::from_polar(0.5, TAU * j as f64 / 256.0);
                (Complex64::new(1.0, 0.0) - z).norm_sqr()
            })
            .sum::<f64>()
            / 256.0;
        assert!((gap - direct).abs() < 1e-12);

        let gap_full = partial_product_l2_gap(&zeros, 1, 0.5, 256).unwrap();
        assert_eq!(gap_full, 0.0);

        assert!(partial_product_l2_gap(&zeros, 2, 0.5, 256).is_err());
        assert!(partial_product_l2_gap(&zeros, 0, 0.5, 32).is_err());
    }

    #[test]
    fn partial_product_gap_nonincreasing_for_family() {
        let zeros = (1..=30)
            .map(|n| Complex64::from_polar(1.0 - 2.0f64.powi(-n), 2.39996 * n as f64))
            .collect::<Vec<_>>();
        let fam = BlaschkeZeros::new(zeros).unwrap();
        for &eps in &[0.5, 0.01, 0.001] {
            let mut prev = f64::INFINITY;
            for &n in &[1usize, 2, 4, 8, 16, 30] {
                let gap = partial_product_l2_gap(&fam, n, eps, 512).unwrap();
                assert!(
                    gap <= prev + 1e-9,
                    "gap increased at n={} eps={}: {} > {}",
                    n,
                    eps,
                    gap,
                    prev
                );
                prev = gap;
            }
        }
    }

    #[test]
    fn riesz_family_median_modulus() {
        let zeros = (1..=30)
            .map(|n| Complex64::from_polar(1.0 - 2.0f64.powi(-n), 2.39996 * n as f64))
            .collect::<Vec<_>>();
        let fam = BlaschkeZeros::new(zeros).unwrap();
        let rep = AnalyticFunctionRep::Blaschke(fam.clone());
        // direct-evaluation oracle at eps = 1e-6 over a 200-point grid
        // (the full 2000-point acceptance run lives in the acceptance suite)
        let thetas = uniform_grid(200);
        let mut moduli: Vec<f64> = thetas
            .iter()
            .map(|&t| blaschke_eval(&fam, DiskPoint::new(t, 1e-6).unwrap()).norm())
            .collect();
        moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = 0.5 * (moduli[99] + moduli[100]);
        assert!(median >= 0.9, "median {}", median);
        drop(rep);
    }

    #[test]
    fn singular_inner_complement_traces_converge() {
        // the inner function for an atom at pi converges along theta = 0
        let rep = AnalyticFunctionRep::singular_inner(SingularMeasure::unit_atom(std::f64::consts::PI), 1e-10);
        let trace = radial_sample(&rep, 0.0, &default_schedule()).unwrap();
        let v = classify(&trace, 1e-6, 1.0, 12).unwrap();
        match v.kind {
            TraceKind::Converged { limit } => {
                // radial limit has modulus 1 away from the support
                assert!((limit.norm() - 1.0).abs() < 1e-9);
            }
            other => panic!("expected convergence, got {:?}", other),
        }
    }
}
