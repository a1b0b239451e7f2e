//! Boundary sets `E` on the circle and singular measures supported on them.
//!
//! A set is held at finite generation depth together with the closed-form
//! measure bound; "measure zero" is certified by the bound `(2 rho)^d`, not
//! by a symbolic limit object. The Cantor measure used for quadrature is
//! discretized as endpoint atoms so that the Poisson blow-up at probe
//! points is exact in double precision.

use crate::complex_core::{normalize_angle, UnitCirclePoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SetError {
    #[error("contraction ratio {0} outside (0, 1/2)")]
    InvalidRatio(f64),
    #[error("boundary set has no points")]
    EmptySet,
    #[error("rejection sampling failed {0} times in a row; set covers the base")]
    SetCoversBase(u64),
}

/// A closed arc `[start, start + length]` in angle coordinates.
///
/// `start` is normalized to `[0, 2pi)`; `length` may reach `2pi` (full
/// circle). Arcs that wrap past `2pi` are split at `0` by the callers that
/// need canonical non-wrapping lists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleArc {
    pub start: f64,
    pub length: f64,
}

impl CircleArc {
    pub fn new(start: f64, length: f64) -> Self {
        assert!(length >= 0.0 && length <= TAU + 1e-12);
        Self {
            start: normalize_angle(start),
            length,
        }
    }

    pub fn full_circle() -> Self {
        Self { start: 0.0, length: TAU }
    }

    pub fn end(&self) -> f64 {
        self.start + self.length
    }

    /// Containment in absolute angle coordinates, treating the arc as the
    /// linear interval `[start, start + length]` and testing `t` modulo
    /// `2pi` against it.
    pub fn contains(&self, t: f64) -> bool {
        let t = normalize_angle(t);
        (t >= self.start && t <= self.end())
            || (self.end() > TAU && t + TAU <= self.end() + 1e-18 && t + TAU >= self.start)
    }
}

/// A Cantor-type generation system: a base arc, a contraction ratio in
/// `(0, 1/2)`, and a generation depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CantorSystem {
    pub base: CircleArc,
    pub rho: f64,
    pub depth: u32,
}

impl CantorSystem {
    pub fn new(base: CircleArc, rho: f64, depth: u32) -> Result<Self, SetError> {
        if !(rho > 0.0 && rho < 0.5) {
            return Err(SetError::InvalidRatio(rho));
        }
        Ok(Self { base, rho, depth })
    }

    /// The `2^depth` closed generation arcs, sorted left to right.
    pub fn arcs(&self) -> Vec<CircleArc> {
        cantor_arcs_unchecked(self.base, self.rho, self.depth)
    }

    /// Generation arcs at an arbitrary depth, independent of `self.depth`.
    pub fn arcs_at_depth(&self, depth: u32) -> Vec<CircleArc> {
        cantor_arcs_unchecked(self.base, self.rho, depth)
    }
}

/// A subset `E` of the circle, held at finite resolution.
#[derive(Debug, Clone, PartialEq)]
pub enum BoundarySet {
    /// A finite list of points, sorted by angle.
    AtomList(Vec<UnitCirclePoint>),
    /// A finite union of disjoint closed arcs, sorted by left endpoint.
    ArcUnion(Vec<CircleArc>),
    /// A Cantor-type set at its stored generation depth.
    Cantor(CantorSystem),
}

impl BoundarySet {
    pub fn atoms(mut thetas: Vec<f64>) -> Self {
        thetas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        BoundarySet::AtomList(thetas.into_iter().map(UnitCirclePoint::new).collect())
    }
}

/// Middle-removal construction: each generation replaces an arc of length
/// `L` by its two end sub-arcs of length `rho * L`.
pub fn cantor_arcs(base: CircleArc, rho: f64, depth: u32) -> Result<Vec<CircleArc>, SetError> {
    if !(rho > 0.0 && rho < 0.5) {
        return Err(SetError::InvalidRatio(rho));
    }
    Ok(cantor_arcs_unchecked(base, rho, depth))
}

fn cantor_arcs_unchecked(base: CircleArc, rho: f64, depth: u32) -> Vec<CircleArc> {
    let mut arcs = vec![(base.start, base.length)];
    for _ in 0..depth {
        let mut next = Vec::with_capacity(arcs.len() * 2);
        for &(s, len) in &arcs {
            let l = rho * len;
            next.push((s, l));
            next.push((s + len - l, l));
        }
        arcs = next;
    }
    arcs
        .into_iter()
        .map(|(s, l)| CircleArc { start: s, length: l })
        .collect()
}

/// An upper bound for the Lebesgue measure of the set at its stored depth.
///
/// For a Cantor system this is the closed form `(base length) * (2 rho)^d`,
/// nonincreasing in `d`; the limit set has measure zero.
pub fn measure_upper_bound(set: &BoundarySet) -> f64 {
    match set {
        BoundarySet::AtomList(_) => 0.0,
        BoundarySet::ArcUnion(arcs) => arcs.iter().map(|a| a.length).sum(),
        BoundarySet::Cantor(sys) => sys.base.length * (2.0 * sys.rho).powi(sys.depth as i32),
    }
}

/// The devil's-staircase CDF of the Cantor measure, with infinite-depth
/// semantics: `F` is nondecreasing, `F(left end) = 0`, `F(right end) = 1`,
/// constant on removed gaps, and self-similar with factor 1/2 on each
/// retained half. Evaluated by iterating the inverse self-similarity down
/// to `2^-53`.
pub fn cantor_cdf(system: &CantorSystem, t: f64) -> f64 {
    let base = system.base;
    // Clamp into the closure of the base arc, working in the arc's linear
    // coordinates.
    let mut x = {
        let t = normalize_angle(t);
        let rel = if t >= base.start {
            t - base.start
        } else {
            t + TAU - base.start
        };
        (rel / base.length).clamp(0.0, 1.0)
    };
    let rho = system.rho;
    let mut value = 0.0;
    let mut weight = 1.0;
    while weight > 2.0f64.powi(-53) {
        if x <= rho {
            x /= rho;
            weight *= 0.5;
        } else if x >= 1.0 - rho {
            value += weight * 0.5;
            // written as 1 - (1-x)/rho so the right endpoint stays exact
            x = 1.0 - (1.0 - x) / rho;
            weight *= 0.5;
        } else {
            // inside a removed gap: F is constant at value + weight/2
            return value + weight * 0.5;
        }
        if x >= 1.0 {
            return value + weight;
        }
        if x <= 0.0 {
            return value;
        }
    }
    value + weight * 0.5
}

/// Points guaranteed to lie in `E` at every depth.
///
/// For a Cantor system these are the generation-arc endpoints in
/// left-to-right order (endpoints persist in the limit set); for atoms the
/// atoms themselves; for arc unions the arc endpoints. When the base is
/// the full circle the right endpoint `2pi` coincides with `0`; it is
/// returned as the largest representable angle below `2pi` so callers see
/// distinct probe angles.
pub fn test_points(set: &BoundarySet, k: usize) -> Result<Vec<UnitCirclePoint>, SetError> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let endpoints = match set {
        BoundarySet::AtomList(atoms) => {
            if atoms.is_empty() {
                return Err(SetError::EmptySet);
            }
            return Ok(atoms.iter().take(k).copied().collect());
        }
        BoundarySet::ArcUnion(arcs) => {
            if arcs.is_empty() {
                return Err(SetError::EmptySet);
            }
            arc_endpoints(arcs)
        }
        BoundarySet::Cantor(sys) => arc_endpoints(&sys.arcs()),
    };
    Ok(endpoints.into_iter().take(k).map(UnitCirclePoint::new).collect())
}

/// Sorted, deduplicated endpoint angles of a sorted arc list. An endpoint
/// that lands exactly on `2pi` is pulled to the previous float so it stays
/// distinct from `0`.
pub fn arc_endpoints(arcs: &[CircleArc]) -> Vec<f64> {
    let mut pts = Vec::with_capacity(arcs.len() * 2);
    for a in arcs {
        pts.push(a.start);
        let e = a.end();
        pts.push(if e >= TAU { prev_below_tau() } else { e });
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts.dedup();
    pts
}

fn prev_below_tau() -> f64 {
    // largest f64 strictly below 2*pi
    f64::from_bits(TAU.to_bits() - 1)
}

/// Uniform pseudo-random points of the complement of `E` at its current
/// depth; deterministic given the seed.
pub fn complement_samples(
    set: &BoundarySet,
    n: usize,
    seed: u64,
) -> Result<Vec<UnitCirclePoint>, SetError> {
    const MAX_REJECTS: u64 = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    let mut consecutive_rejects = 0u64;
    while out.len() < n {
        let t: f64 = rng.gen_range(0.0..TAU);
        let inside = match set {
            BoundarySet::AtomList(atoms) => atoms.iter().any(|a| a.theta() == t),
            BoundarySet::ArcUnion(arcs) => arcs.iter().any(|a| a.contains(t)),
            BoundarySet::Cantor(sys) => sys.arcs().iter().any(|a| a.contains(t)),
        };
        if inside {
            consecutive_rejects += 1;
            if consecutive_rejects >= MAX_REJECTS {
                return Err(SetError::SetCoversBase(consecutive_rejects));
            }
        } else {
            consecutive_rejects = 0;
            out.push(UnitCirclePoint::new(t));
        }
    }
    Ok(out)
}

/// A positive singular measure on the circle.
#[derive(Debug, Clone, PartialEq)]
pub enum SingularMeasure {
    /// Finite atoms `(position, weight)`, weights positive.
    Atoms(Vec<(UnitCirclePoint, f64)>),
    /// The Cantor measure of a generation system, total mass 1, split
    /// equally among generation arcs (mass `2^-k` per depth-`k` arc).
    Cantor(CantorSystem),
}

impl SingularMeasure {
    pub fn total_mass(&self) -> f64 {
        match self {
            SingularMeasure::Atoms(atoms) => atoms.iter().map(|(_, w)| w).sum(),
            SingularMeasure::Cantor(_) => 1.0,
        }
    }

    pub fn unit_atom(theta: f64) -> Self {
        SingularMeasure::Atoms(vec![(UnitCirclePoint::new(theta), 1.0)])
    }

    /// The endpoint-atom discretization used for quadrature: both endpoints
    /// of each depth-`d` arc carry mass `2^-(d+1)`, so every generation-`k`
    /// arc receives exactly `2^-k` and every `test_points` probe angle
    /// carries an atom.
    pub fn discretize_cantor(sys: &CantorSystem) -> Vec<(UnitCirclePoint, f64)> {
        let arcs = sys.arcs();
        let w = 0.5 / arcs.len() as f64;
        let mut atoms = Vec::with_capacity(arcs.len() * 2);
        for a in &arcs {
            atoms.push((UnitCirclePoint::new(a.start), w));
            let e = a.end();
            let e = if e >= TAU { prev_below_tau() } else { e };
            atoms.push((UnitCirclePoint::new(e), w));
        }
        atoms
    }
}
