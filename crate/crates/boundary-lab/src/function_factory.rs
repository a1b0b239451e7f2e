//! Evaluable representations of the functions under study: Blaschke
//! products, singular inner functions, their products, the transform
//! `g = e^{-i log h}`, and the Mobius composition `psi . h`.

use crate::boundary_sets::{BoundarySet, CantorSystem, SingularMeasure};
use crate::complex_core::{
    herglotz_kernel, left_arg, left_log, mobius_lhp_to_disk, CoreError, DiskPoint, LhpInput,
    LeftHalfPlaneValue, UnitCirclePoint,
};
use num_complex::Complex64;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FactoryError {
    #[error("representation has no explicit logarithm (contains Blaschke factors); factor them out first")]
    NoExplicitLog,
    #[error("quadrature refinement exceeded the {0}-node budget")]
    QuadratureBudgetExceeded(u64),
    #[error("Blaschke zero {0} is not inside the open disk")]
    ZeroOutsideDisk(Complex64),
    #[error("boundary set is empty")]
    EmptyBoundarySet,
    #[error(transparent)]
    Core(#[from] CoreError),
}

/// Bound on the transform `g = e^{-i log h}`: `|g| = e^{arg h} < e^{3pi/2}`.
pub const TRANSFORM_BOUND: f64 = 111.317_778_489_856_21; // e^{3 pi / 2}

/// Strict lower bound for `|g|`: `e^{pi/2}`.
pub const TRANSFORM_FLOOR: f64 = 4.810_477_380_965_351; // e^{pi / 2}

/// A Blaschke zero list with multiplicities (repeat a zero to raise its
/// multiplicity). All zeros lie in the open disk.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeZeros {
    zeros: Vec<Complex64>,
}

impl BlaschkeZeros {
    pub fn new(zeros: Vec<Complex64>) -> Result<Self, FactoryError> {
        for &a in &zeros {
            if a.norm() >= 1.0 {
                return Err(FactoryError::ZeroOutsideDisk(a));
            }
        }
        Ok(Self { zeros })
    }

    pub fn empty() -> Self {
        Self { zeros: Vec::new() }
    }

    pub fn zeros(&self) -> &[Complex64] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// The first `n` zeros, for partial products.
    pub fn prefix(&self, n: usize) -> Self {
        Self {
            zeros: self.zeros[..n.min(self.zeros.len())].to_vec(),
        }
    }
}

/// Evaluate the Blaschke product with the convergence-friendly
/// normalization `(|a|/a)(a - z)/(1 - conj(a) z)`; the factor for `a = 0`
/// is `z` itself.
pub fn blaschke_eval(zeros: &BlaschkeZeros, z: DiskPoint) -> Complex64 {
    let zc = z.to_complex();
    let mut acc = Complex64::new(1.0, 0.0);
    for &a in zeros.zeros() {
        if a.re == 0.0 && a.im == 0.0 {
            acc *= zc;
        } else {
            acc *= (a.norm() / a) * (a - zc) / (1.0 - a.conj() * zc);
        }
    }
    acc
}

/// The Blaschke admissibility sum `sum (1 - |a_n|)`.
pub fn blaschke_condition(zeros: &BlaschkeZeros) -> f64 {
    zeros.zeros().iter().map(|a| 1.0 - a.norm()).sum()
}

const QUADRATURE_NODE_BUDGET: u64 = 1 << 24;
const QUADRATURE_DEPTH_CAP: u32 = 24;

/// The Herglotz integral `int (e^{it} + z)/(e^{it} - z) dmu(t)`.
///
/// Atom measures are summed exactly. The Cantor measure is evaluated as an
/// adaptive self-similar summation over its generation tree with the
/// endpoint-atom discretization at the stored depth as exact semantics: a
/// generation arc far from the probe angle is collapsed to its midpoint
/// kernel value once the first-order error bound drops below `tol`,
/// otherwise it is split.
pub fn herglotz_integral(
    mu: &SingularMeasure,
    z: DiskPoint,
    tol: f64,
) -> Result<Complex64, FactoryError> {
    match mu {
        SingularMeasure::Atoms(atoms) => Ok(atoms
            .iter()
            .map(|&(t, w)| w * herglotz_kernel(z, t))
            .sum()),
        SingularMeasure::Cantor(sys) => {
            let mut nodes = 0u64;
            cantor_node(sys, z, tol, sys.base.start, sys.base.length, 0, 1.0, &mut nodes)
        }
    }
}

fn circular_arc_distance(theta: f64, start: f64, length: f64) -> f64 {
    // angular distance from theta to the closed arc [start, start+length]
    let rel = (theta - start).rem_euclid(TAU);
    if rel <= length {
        0.0
    } else {
        let past_end = rel - length;
        let before_start = TAU - rel;
        past_end.min(before_start)
    }
}

#[allow(clippy::too_many_arguments)]
fn cantor_node(
    sys: &CantorSystem,
    z: DiskPoint,
    tol: f64,
    start: f64,
    length: f64,
    depth: u32,
    mass: f64,
    nodes: &mut u64,
) -> Result<Complex64, FactoryError> {
    *nodes += 1;
    if *nodes > QUADRATURE_NODE_BUDGET {
        return Err(FactoryError::QuadratureBudgetExceeded(QUADRATURE_NODE_BUDGET));
    }
    if depth >= sys.depth || depth >= QUADRATURE_DEPTH_CAP {
        if depth >= sys.depth {
            // generation floor: the two endpoint atoms of this arc, exact
            let half = 0.5 * mass;
            let end = start + length;
            let end = if end >= TAU { f64::from_bits(TAU.to_bits() - 1) } else { end };
            return Ok(half * herglotz_kernel(z, UnitCirclePoint::new(start))
                + half * herglotz_kernel(z, UnitCirclePoint::new(end)));
        }
        // hard depth cap for very deep systems: midpoint collapse
        let mid = UnitCirclePoint::new(start + 0.5 * length);
        return Ok(mass * herglotz_kernel(z, mid));
    }
    let dist = circular_arc_distance(z.theta(), start, length);
    if dist > 0.0 && length < 0.1 * dist {
        // |d/dt K| <= 2|z| / |e^{it} - z|^2 on the arc; collapse once the
        // first-order bound over the arc is below the mass-weighted budget
        let eps = z.eps();
        let r = 1.0 - eps;
        let den_sq = eps * eps + 2.0 * r * (1.0 - dist.cos());
        let err_bound = 2.0 * r * length / den_sq;
        if err_bound <= tol {
            let mid = UnitCirclePoint::new(start + 0.5 * length);
            return Ok(mass * herglotz_kernel(z, mid));
        }
    }
    let child_len = sys.rho * length;
    let left = cantor_node(sys, z, tol, start, child_len, depth + 1, 0.5 * mass, nodes)?;
    let right = cantor_node(
        sys,
        z,
        tol,
        start + length - child_len,
        child_len,
        depth + 1,
        0.5 * mass,
        nodes,
    )?;
    Ok(left + right)
}

/// Evaluate the singular inner function `exp(-int kernel dmu)`.
///
/// The result has modulus below 1 and is zero-free: the exponential of a
/// finite left-half-plane value never vanishes (deep inside the blow-up
/// region the modulus can underflow f64; use [`analytic_log`] for
/// log-domain work there).
pub fn singular_inner_eval(
    mu: &SingularMeasure,
    z: DiskPoint,
    tol: f64,
) -> Result<Complex64, FactoryError> {
    Ok((-herglotz_integral(mu, z, tol)?).exp())
}

/// The transform `g = e^{-i log h}` on the branch `arg h` in `(pi/2, 3pi/2)`.
///
/// `|g| = e^{arg h}`, strictly between `e^{pi/2}` and `e^{3pi/2}`.
pub fn transform_g(h: LeftHalfPlaneValue) -> Complex64 {
    let l = left_log(h);
    // e^{-i l} = e^{l.im - i l.re}
    Complex64::new(l.im, -l.re).exp()
}

/// The trigonometric closed form
/// `e^{arg h} (cos log|h| - i sin log|h|)`, kept as an independent route
/// for agreement checks against [`transform_g`].
pub fn transform_g_trig(h: LeftHalfPlaneValue) -> Complex64 {
    let arg = left_arg(h);
    let lm = h.value().norm().ln();
    arg.exp() * Complex64::new(lm.cos(), -lm.sin())
}

/// An evaluable representation of a bounded analytic function on the disk.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticFunctionRep {
    Blaschke(BlaschkeZeros),
    SingularInner { measure: SingularMeasure, tol: f64 },
    Product(Vec<AnalyticFunctionRep>),
    /// The transform `g = e^{-i log h}` of the analytic log of the inner rep.
    Transformed(Box<AnalyticFunctionRep>),
    /// `z -> psi(h(z))` with `psi` the Mobius map sending infinity to `xi`.
    MobiusComposed {
        inner: Box<AnalyticFunctionRep>,
        xi: UnitCirclePoint,
    },
}

impl AnalyticFunctionRep {
    pub fn singular_inner(measure: SingularMeasure, tol: f64) -> Self {
        AnalyticFunctionRep::SingularInner { measure, tol }
    }

    /// True iff the rep is zero-free by construction and carries an
    /// explicit analytic logarithm with `Re <= 0` (singular inner
    /// functions and products of such).
    pub fn has_explicit_log(&self) -> bool {
        match self {
            AnalyticFunctionRep::SingularInner { .. } => true,
            AnalyticFunctionRep::Product(factors) => {
                factors.iter().all(|f| f.has_explicit_log())
            }
            _ => false,
        }
    }

    /// A certified sup-norm bound on the disk.
    pub fn bound(&self) -> f64 {
        match self {
            AnalyticFunctionRep::Blaschke(_) | AnalyticFunctionRep::SingularInner { .. } => 1.0,
            AnalyticFunctionRep::Product(factors) => factors.iter().map(|f| f.bound()).product(),
            AnalyticFunctionRep::Transformed(_) => TRANSFORM_BOUND,
            AnalyticFunctionRep::MobiusComposed { .. } => 1.0,
        }
    }

    pub fn evaluate(&self, z: DiskPoint) -> Result<Complex64, FactoryError> {
        match self {
            AnalyticFunctionRep::Blaschke(zeros) => Ok(blaschke_eval(zeros, z)),
            AnalyticFunctionRep::SingularInner { measure, tol } => {
                singular_inner_eval(measure, z, *tol)
            }
            AnalyticFunctionRep::Product(factors) => {
                let mut acc = Complex64::new(1.0, 0.0);
                for f in factors {
                    acc *= f.evaluate(z)?;
                }
                Ok(acc)
            }
            AnalyticFunctionRep::Transformed(inner) => {
                Ok(transform_g(analytic_log(inner, z)?))
            }
            AnalyticFunctionRep::MobiusComposed { inner, xi } => {
                let h = analytic_log(inner, z)?;
                Ok(mobius_lhp_to_disk(*xi, LhpInput::from(h))?)
            }
        }
    }
}

/// The analytic logarithm `h(z) = -int kernel dmu` of a zero-free inner
/// rep, with `Re h < 0` and `exp(h(z)) = evaluate(z)`.
pub fn analytic_log(
    rep: &AnalyticFunctionRep,
    z: DiskPoint,
) -> Result<LeftHalfPlaneValue, FactoryError> {
    match rep {
        AnalyticFunctionRep::SingularInner { measure, tol } => {
            let h = -herglotz_integral(measure, z, *tol)?;
            Ok(LeftHalfPlaneValue::new(h)?)
        }
        AnalyticFunctionRep::Product(factors) => {
            if !rep.has_explicit_log() {
                return Err(FactoryError::NoExplicitLog);
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for f in factors {
                acc += analytic_log(f, z)?.value();
            }
            Ok(LeftHalfPlaneValue::new(acc)?)
        }
        _ => Err(FactoryError::NoExplicitLog),
    }
}

/// The quadrature tolerance used by the scenario constructors.
pub const DEFAULT_QUADRATURE_TOL: f64 = 1e-10;

/// Discretize a boundary set into a unit-mass atom measure whose atoms sit
/// exactly at the `test_points` probe angles.
pub fn discretized_measure(set: &BoundarySet) -> Result<SingularMeasure, FactoryError> {
    let atoms = match set {
        BoundarySet::AtomList(pts) => {
            if pts.is_empty() {
                return Err(FactoryError::EmptyBoundarySet);
            }
            let w = 1.0 / pts.len() as f64;
            pts.iter().map(|&p| (p, w)).collect()
        }
        BoundarySet::ArcUnion(arcs) => {
            if arcs.is_empty() {
                return Err(FactoryError::EmptyBoundarySet);
            }
            let pts = crate::boundary_sets::arc_endpoints(arcs);
            let w = 1.0 / pts.len() as f64;
            pts.into_iter().map(|t| (UnitCirclePoint::new(t), w)).collect()
        }
        BoundarySet::Cantor(sys) => SingularMeasure::discretize_cantor(sys),
    };
    Ok(SingularMeasure::Atoms(atoms))
}

/// The Lusin construction: the transform of the singular inner function of
/// a discretized measure on `E`. Loses its radial limits exactly on `E`
/// while staying bounded by `e^{3pi/2}`.
pub fn lusin_function(set: &BoundarySet) -> Result<AnalyticFunctionRep, FactoryError> {
    let mu = discretized_measure(set)?;
    Ok(AnalyticFunctionRep::Transformed(Box::new(
        AnalyticFunctionRep::singular_inner(mu, DEFAULT_QUADRATURE_TOL),
    )))
}

/// The factorization pipeline for functions with zeros: given the zero
/// list of the Blaschke factor `B` and the zero-free part `f1` of
/// `f = B * f1`, return the transform of `f1`. The Blaschke factor is
/// divided out symbolically, so the result does not depend on the zeros.
pub fn corollary1_pipeline(
    _zeros: &BlaschkeZeros,
    f1: &AnalyticFunctionRep,
) -> Result<AnalyticFunctionRep, FactoryError> {
    if !f1.has_explicit_log() {
        return Err(FactoryError::NoExplicitLog);
    }
    Ok(AnalyticFunctionRep::Transformed(Box::new(f1.clone())))
}

/// The represented original function `f = B * f1` of the factorization.
pub fn blaschke_times(zeros: &BlaschkeZeros, f1: &AnalyticFunctionRep) -> AnalyticFunctionRep {
    AnalyticFunctionRep::Product(vec![
        AnalyticFunctionRep::Blaschke(zeros.clone()),
        f1.clone(),
    ])
}

/// Compose the Mobius map with the analytic log: `z -> psi(h(z))`, mapping
/// into the disk with radial limit `xi` wherever `h` blows up.
pub fn psi_compose(
    h_rep: &AnalyticFunctionRep,
    xi: UnitCirclePoint,
) -> Result<AnalyticFunctionRep, FactoryError> {
    if !h_rep.has_explicit_log() {
        return Err(FactoryError::NoExplicitLog);
    }
    Ok(AnalyticFunctionRep::MobiusComposed {
        inner: Box::new(h_rep.clone()),
        xi,
    })
}
