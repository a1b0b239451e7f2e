//! Run configuration: JSON schemas for boundary sets, measures, function
//! specifications, and probe parameters, plus validation and conversion
//! into the evaluable in-memory types.

use crate::boundary_sets::{BoundarySet, CantorSystem, CircleArc, SingularMeasure};
use crate::complex_core::UnitCirclePoint;
use crate::function_factory::{AnalyticFunctionRep, BlaschkeZeros, FactoryError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("config read error: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl From<FactoryError> for ConfigError {
    fn from(e: FactoryError) -> Self {
        ConfigError::Invalid(e.to_string())
    }
}

/// Boundary set specification.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundarySetSpec {
    Atoms { thetas: Vec<f64> },
    Arcs { arcs: Vec<(f64, f64)> },
    Cantor { rho: f64, depth: u32, base: (f64, f64) },
}

impl BoundarySetSpec {
    pub fn build(&self) -> Result<BoundarySet, ConfigError> {
        match self {
            BoundarySetSpec::Atoms { thetas } => {
                if thetas.is_empty() {
                    return Err(ConfigError::Invalid("empty boundary set".into()));
                }
                Ok(BoundarySet::atoms(thetas.clone()))
            }
            BoundarySetSpec::Arcs { arcs } => {
                if arcs.is_empty() {
                    return Err(ConfigError::Invalid("empty boundary set".into()));
                }
                Ok(BoundarySet::ArcUnion(
                    arcs.iter().map(|&(s, l)| CircleArc::new(s, l)).collect(),
                ))
            }
            BoundarySetSpec::Cantor { rho, depth, base } => {
                let (start, end) = *base;
                if !(end > start) {
                    return Err(ConfigError::Invalid(format!(
                        "cantor base [{}, {}] is empty",
                        start, end
                    )));
                }
                let sys = CantorSystem::new(CircleArc::new(start, end - start), *rho, *depth)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Ok(BoundarySet::Cantor(sys))
            }
        }
    }
}

/// Singular measure specification.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum MeasureSpec {
    Atoms { atoms: Vec<(f64, f64)> },
    Cantor { rho: f64, depth: u32, base: (f64, f64) },
}

impl MeasureSpec {
    pub fn build(&self) -> Result<SingularMeasure, ConfigError> {
        match self {
            MeasureSpec::Atoms { atoms } => {
                if atoms.is_empty() {
                    return Err(ConfigError::Invalid("empty atom measure".into()));
                }
                if atoms.iter().any(|&(_, w)| !(w > 0.0)) {
                    return Err(ConfigError::Invalid("atom weights must be positive".into()));
                }
                Ok(SingularMeasure::Atoms(
                    atoms
                        .iter()
                        .map(|&(t, w)| (UnitCirclePoint::new(t), w))
                        .collect(),
                ))
            }
            MeasureSpec::Cantor { rho, depth, base } => {
                let (start, end) = *base;
                if !(end > start) {
                    return Err(ConfigError::Invalid("cantor base is empty".into()));
                }
                let sys = CantorSystem::new(CircleArc::new(start, end - start), *rho, *depth)
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
                Ok(SingularMeasure::Cantor(sys))
            }
        }
    }
}

/// Function specification, mirroring the evaluable representation.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum FunctionSpec {
    Blaschke {
        zeros: Vec<(f64, f64)>,
    },
    SingularInner {
        measure: MeasureSpec,
        #[serde(default = "default_tol")]
        tol: f64,
    },
    Product {
        factors: Vec<FunctionSpec>,
    },
    Transform {
        inner: Box<FunctionSpec>,
    },
    Mobius {
        inner: Box<FunctionSpec>,
        xi: f64,
    },
}

fn default_tol() -> f64 {
    1e-10
}

impl FunctionSpec {
    pub fn build(&self) -> Result<AnalyticFunctionRep, ConfigError> {
        match self {
            FunctionSpec::Blaschke { zeros } => {
                let zs = zeros.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
                Ok(AnalyticFunctionRep::Blaschke(BlaschkeZeros::new(zs)?))
            }
            FunctionSpec::SingularInner { measure, tol } => {
                if !(*tol > 0.0) {
                    return Err(ConfigError::Invalid(format!(
                        "quadrature tol must be positive, got {}",
                        tol
                    )));
                }
                Ok(AnalyticFunctionRep::singular_inner(measure.build()?, *tol))
            }
            FunctionSpec::Product { factors } => Ok(AnalyticFunctionRep::Product(
                factors
                    .iter()
                    .map(|f| f.build())
                    .collect::<Result<_, _>>()?,
            )),
            FunctionSpec::Transform { inner } => {
                let rep = inner.build()?;
                if !rep.has_explicit_log() {
                    return Err(ConfigError::Invalid(
                        "transform inner function has no explicit log; factor Blaschke zeros out first".into(),
                    ));
                }
                Ok(AnalyticFunctionRep::Transformed(Box::new(rep)))
            }
            FunctionSpec::Mobius { inner, xi } => {
                let rep = inner.build()?;
                if !rep.has_explicit_log() {
                    return Err(ConfigError::Invalid(
                        "mobius inner function has no explicit log".into(),
                    ));
                }
                Ok(AnalyticFunctionRep::MobiusComposed {
                    inner: Box::new(rep),
                    xi: UnitCirclePoint::new(*xi),
                })
            }
        }
    }
}

/// Radial-probe parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ProbeConfig {
    #[serde(default = "default_k_min")]
    pub k_min: u32,
    #[serde(default = "default_k_max")]
    pub k_max: u32,
    #[serde(default = "default_conv_tol")]
    pub conv_tol: f64,
    #[serde(default = "default_osc_tol")]
    pub osc_tol: f64,
    #[serde(default = "default_window")]
    pub window: usize,
    /// Size of the uniform theta grid for a.e. statistics.
    #[serde(default = "default_theta_grid")]
    pub theta_grid: usize,
    #[serde(default)]
    pub seed: u64,
    /// Number of boundary-set test points to probe.
    #[serde(default = "default_e_points")]
    pub e_points: usize,
    /// Number of complement samples to probe.
    #[serde(default = "default_complement_points")]
    pub complement_points: usize,
}

fn default_k_min() -> u32 {
    3
}
fn default_k_max() -> u32 {
    45
}
fn default_conv_tol() -> f64 {
    1e-6
}
fn default_osc_tol() -> f64 {
    1.0
}
fn default_window() -> usize {
    12
}
fn default_theta_grid() -> usize {
    100
}
fn default_e_points() -> usize {
    64
}
fn default_complement_points() -> usize {
    100
}

impl Default for ProbeConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl ProbeConfig {
    pub fn schedule(&self) -> Vec<f64> {
        crate::radial_probe::dyadic_schedule(self.k_min, self.k_max)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.conv_tol > 0.0 && self.osc_tol > 0.0) {
            return Err(ConfigError::Invalid("tolerances must be positive".into()));
        }
        if self.conv_tol >= self.osc_tol {
            return Err(ConfigError::Invalid(format!(
                "conv_tol {} must be below osc_tol {}",
                self.conv_tol, self.osc_tol
            )));
        }
        if self.k_min < 1 || self.k_max > 52 || self.k_min >= self.k_max {
            return Err(ConfigError::Invalid(format!(
                "schedule exponents [{}, {}] must be increasing within [1, 52]",
                self.k_min, self.k_max
            )));
        }
        if self.window == 0 || self.window > (self.k_max - self.k_min + 1) as usize {
            return Err(ConfigError::Invalid(format!(
                "window {} exceeds schedule length",
                self.window
            )));
        }
        Ok(())
    }
}

/// Comb-scenario parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CombConfig {
    pub n_slits: usize,
    pub k_max: usize,
    #[serde(default = "default_grid")]
    pub grid: usize,
}

fn default_grid() -> usize {
    1024
}

/// Top-level run configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub scenario: String,
    #[serde(default)]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub boundary_set: Option<BoundarySetSpec>,
    /// Blaschke zero list for the riesz and corollary1 scenarios.
    #[serde(default)]
    pub zeros: Option<Vec<(f64, f64)>>,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub comb: Option<CombConfig>,
    /// Median converged-modulus threshold for the riesz scenario.
    #[serde(default = "default_median_threshold")]
    pub median_threshold: f64,
    #[serde(default)]
    pub out_dir: Option<String>,
}

fn default_median_threshold() -> f64 {
    0.9
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.probe.validate()?;
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.probe.validate()?;
        Ok(cfg)
    }

    pub fn blaschke_zeros(&self) -> Result<BlaschkeZeros, ConfigError> {
        let zeros = self
            .zeros
            .as_ref()
            .ok_or_else(|| ConfigError::Invalid("missing Blaschke zero list".into()))?;
        Ok(BlaschkeZeros::new(
            zeros.iter().map(|&(re, im)| Complex64::new(re, im)).collect(),
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn parses_cantor_boundary_set() {
        let cfg = RunConfig::from_json(
            r#"{
                "scenario": "lusin",
                "boundary_set": {"type": "cantor", "rho": 0.3333333333333333, "depth": 8, "base": [0.0, 6.283185307179586]},
                "probe": {"k_min": 3, "k_max": 45, "seed": 7}
            }"#,
        )
        .unwrap();
        let set = cfg.boundary_set.unwrap().build().unwrap();
        match set {
            BoundarySet::Cantor(sys) => {
                assert_eq!(sys.depth, 8);
                assert!((sys.base.length - TAU).abs() < 1e-12);
            }
            other => panic!("wrong set {:?}", other),
        }
    }

    #[test]
    fn parses_function_specs() {
        let spec: FunctionSpec = serde_json::from_str(
            r#"{"type":"transform","inner":{"type":"singular_inner","measure":{"type":"atoms","atoms":[[0.0,1.0]]},"tol":1e-10}}"#,
        )
        .unwrap();
        let rep = spec.build().unwrap();
        assert!(matches!(rep, AnalyticFunctionRep::Transformed(_)));

        let spec: FunctionSpec =
            serde_json::from_str(r#"{"type":"blaschke","zeros":[[0.0,0.0],[0.5,0.0]]}"#).unwrap();
        let rep = spec.build().unwrap();
        assert!(matches!(rep, AnalyticFunctionRep::Blaschke(_)));

        let spec: FunctionSpec = serde_json::from_str(
            r#"{"type":"mobius","inner":{"type":"singular_inner","measure":{"type":"atoms","atoms":[[0.0,1.0]]},"tol":1e-10},"xi":0.0}"#,
        )
        .unwrap();
        assert!(spec.build().is_ok());
    }

    #[test]
    fn rejects_transform_of_blaschke() {
        let spec: FunctionSpec = serde_json::from_str(
            r#"{"type":"transform","inner":{"type":"blaschke","zeros":[[0.0,0.0]]}}"#,
        )
        .unwrap();
        assert!(spec.build().is_err());
    }

    #[test]
    fn rejects_bad_probe_parameters() {
        for bad in [
            r#"{"scenario":"lusin","probe":{"conv_tol":2.0,"osc_tol":1.0}}"#,
            r#"{"scenario":"lusin","probe":{"k_min":0}}"#,
            r#"{"scenario":"lusin","probe":{"k_max":53}}"#,
            r#"{"scenario":"lusin","probe":{"window":0}}"#,
            r#"{"scenario":"lusin","probe":{"window":100}}"#,
        ] {
            assert!(RunConfig::from_json(bad).is_err(), "accepted: {}", bad);
        }
    }

    #[test]
    fn defaults_match_contract() {
        let p = ProbeConfig::default();
        assert_eq!(p.k_min, 3);
        assert_eq!(p.k_max, 45);
        assert_eq!(p.conv_tol, 1e-6);
        assert_eq!(p.osc_tol, 1.0);
        assert_eq!(p.window, 12);
        assert!(p.validate().is_ok());
        assert_eq!(p.schedule().len(), 43);
    }

    #[test]
    fn rejects_boundary_zero_in_config() {
        let cfg = RunConfig::from_json(
            r#"{"scenario":"riesz","zeros":[[1.0,0.0]]}"#,
        )
        .unwrap();
        assert!(cfg.blaschke_zeros().is_err());
    }
}
