//! Branch-aware complex primitives.
//!
//! Everything here is written against the eps-parametrization: a point of
//! the disk is `(1 - eps) e^{i theta}` and `eps` is carried explicitly, so
//! that radii like `eps = 2^-45` keep full precision in kernel denominators.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("value has non-negative real part: {0}")]
    NonNegativeRealPart(Complex64),
    #[error("Mobius input lies in the right half-plane: {0}")]
    RightHalfPlaneInput(Complex64),
    #[error("zero value at index {0} in argument unwrapping")]
    ZeroValue(usize),
    #[error("principal-argument jump of {gap} at index {index} reaches pi; refine the sampling")]
    JumpTooLarge { index: usize, gap: f64 },
    #[error("eps {0} outside (0, 1]")]
    InvalidEps(f64),
}

/// Normalize an angle into `[0, 2pi)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can return TAU when theta is a tiny negative number
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// A point `e^{i theta}` of the unit circle, `theta` in `[0, 2pi)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitCirclePoint {
    theta: f64,
}

impl UnitCirclePoint {
    pub fn new(theta: f64) -> Self {
        Self {
            theta: normalize_angle(theta),
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// A point of the disk in the eps-parametrization: `z = (1 - eps) e^{i theta}`.
///
/// `eps = 1` is the origin. `eps` must be positive, so the represented point
/// is always strictly inside the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    theta: f64,
    eps: f64,
}

impl DiskPoint {
    pub fn new(theta: f64, eps: f64) -> Result<Self, CoreError> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(CoreError::InvalidEps(eps));
        }
        Ok(Self {
            theta: normalize_angle(theta),
            eps,
        })
    }

    pub fn origin() -> Self {
        Self { theta: 0.0, eps: 1.0 }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn radius(&self) -> f64 {
        1.0 - self.eps
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0 - self.eps, self.theta)
    }
}

/// A complex value with strictly negative real part.
///
/// Construction fails on `Re >= 0`; there is no silent clamping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeftHalfPlaneValue {
    value: Complex64,
}

impl LeftHalfPlaneValue {
    pub fn new(value: Complex64) -> Result<Self, CoreError> {
        if !(value.re < 0.0) {
            return Err(CoreError::NonNegativeRealPart(value));
        }
        Ok(Self { value })
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }
}

/// Argument of a left-half-plane value on the branch `(pi/2, 3pi/2)`.
///
/// `atan2` puts the argument of a value with negative real part in
/// `(pi/2, pi] U [-pi, -pi/2)`; shifting the lower arc by `2pi` lands the
/// whole range in `(pi/2, 3pi/2)` with no unwrapping state.
pub fn left_arg(h: LeftHalfPlaneValue) -> f64 {
    let a = h.value().arg();
    if a < PI / 2.0 {
        a + TAU
    } else {
        a
    }
}

/// Logarithm on the left half-plane: `log|h| + i arg h`, `arg h` in `(pi/2, 3pi/2)`.
pub fn left_log(h: LeftHalfPlaneValue) -> Complex64 {
    Complex64::new(h.value().norm().ln(), left_arg(h))
}

/// Finite left-half-plane input to the Mobius map, or the point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LhpInput {
    Finite(Complex64),
    Infinity,
}

impl From<LeftHalfPlaneValue> for LhpInput {
    fn from(h: LeftHalfPlaneValue) -> Self {
        LhpInput::Finite(h.value())
    }
}

/// The Mobius map `psi(zeta) = -xi (1 + zeta) / (1 - zeta)`.
///
/// Maps the open left half-plane into the open disk, the imaginary axis onto
/// the circle, and infinity to `xi`.
pub fn mobius_lhp_to_disk(xi: UnitCirclePoint, zeta: LhpInput) -> Result<Complex64, CoreError> {
    let xi_c = xi.to_complex();
    match zeta {
        LhpInput::Infinity => Ok(xi_c),
        LhpInput::Finite(z) => {
            if z.re > 0.0 {
                return Err(CoreError::RightHalfPlaneInput(z));
            }
            // For huge |zeta| the direct quotient (1+z)/(1-z) is fine in f64,
            // but dividing through by z avoids overflow at |z| near f64::MAX.
            let q = if z.norm_sqr() > 1e300 {
                (1.0 / z + 1.0) / (1.0 / z - 1.0)
            } else {
                (1.0 + z) / (1.0 - z)
            };
            Ok(-xi_c * q)
        }
    }
}

/// The Herglotz kernel `(e^{it} + z) / (e^{it} - z)` at `z = (1-eps) e^{i theta}`.
///
/// The denominator is assembled as `e^{it} - e^{i theta} + eps e^{i theta}`,
/// with the unit-vector difference written as `2i sin((t-theta)/2) e^{i(t+theta)/2}`,
/// so the near-diagonal case `t ~ theta` keeps full relative precision and
/// `t = theta` evaluates to exactly `(2 - eps) / eps`.
pub fn herglotz_kernel(z: DiskPoint, t: UnitCirclePoint) -> Complex64 {
    let theta = z.theta();
    let eps = z.eps();
    let eitheta = Complex64::from_polar(1.0, theta);
    let half = 0.5 * (t.theta() - theta);
    // e^{it} - e^{i theta} = 2i sin(half) e^{i (t + theta)/2}
    let diff = Complex64::new(0.0, 2.0 * half.sin()) * Complex64::from_polar(1.0, half) * eitheta;
    let den = diff + eps * eitheta;
    let num = t.to_complex() + z.to_complex();
    num / den
}

/// Wrap a real number into `(-pi, pi]`.
fn wrap_to_pi(x: f64) -> f64 {
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

/// Continuous argument along an ordered sequence of nonzero values.
///
/// The first entry is the principal argument of the first value; each step
/// adds the principal-value increment. A step whose principal gap reaches
/// `pi` in magnitude signals under-sampling and is an error.
pub fn unwrap_argument(values: &[Complex64]) -> Result<Vec<f64>, CoreError> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev_principal = 0.0;
    let mut running = 0.0;
    for (i, v) in values.iter().enumerate() {
        if v.re == 0.0 && v.im == 0.0 {
            return Err(CoreError::ZeroValue(i));
        }
        let p = v.arg();
        if i == 0 {
            running = p;
        } else {
            let gap = wrap_to_pi(p - prev_principal);
            if gap.abs() >= PI {
                return Err(CoreError::JumpTooLarge { index: i, gap });
            }
            running += gap;
        }
        prev_principal = p;
        out.push(running);
    }
    Ok(out)
}

/// Best-effort continuous argument: like [`unwrap_argument`] but never
/// rejects a large gap (the wrapped increment is used as-is). Used for
/// trace CSV emission where a column must always be produced.
pub fn unwrap_argument_lossy(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut prev = 0.0;
    let mut running = 0.0;
    for (i, v) in values.iter().enumerate() {
        let p = v.arg();
        if i == 0 {
            running = p;
        } else {
            running += wrap_to_pi(p - prev);
        }
        prev = p;
        out.push(running);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lhp(re: f64, im: f64) -> LeftHalfPlaneValue {
        LeftHalfPlaneValue::new(c(re, im)).unwrap()
    }

    #[test]
    fn left_log_examples() {
        let l = left_log(lhp(-1.0, 0.0));
        assert!((l - c(0.0, PI)).norm() < 1e-15);

        let l = left_log(lhp(-std::f64::consts::E, 0.0));
        assert!((l - c(1.0, PI)).norm() < 1e-15);

        let l = left_log(lhp(-1.0, 1.0));
        assert!((l - c(0.5 * 2.0f64.ln(), 3.0 * PI / 4.0)).norm() < 1e-15);
    }

    #[test]
    fn left_log_rejects_right_half_plane() {
        assert!(LeftHalfPlaneValue::new(c(0.0, 1.0)).is_err());
        assert!(LeftHalfPlaneValue::new(c(1.0, 0.0)).is_err());
    }

    #[test]
    fn mobius_examples() {
        let xi = UnitCirclePoint::new(0.0);
        let w = mobius_lhp_to_disk(xi, LhpInput::Finite(c(-1.0, 0.0))).unwrap();
        assert!(w.norm() < 1e-15);

        let w = mobius_lhp_to_disk(xi, LhpInput::Finite(c(0.0, 0.0))).unwrap();
        assert!((w - c(-1.0, 0.0)).norm() < 1e-15);

        let w = mobius_lhp_to_disk(xi, LhpInput::Infinity).unwrap();
        assert!((w - c(1.0, 0.0)).norm() < 1e-15);

        assert!(mobius_lhp_to_disk(xi, LhpInput::Finite(c(0.5, 0.0))).is_err());
    }

    #[test]
    fn herglotz_examples() {
        let t = UnitCirclePoint::new(1.3);
        let k = herglotz_kernel(DiskPoint::origin(), t);
        assert!((k - c(1.0, 0.0)).norm() < 1e-15);

        let k = herglotz_kernel(DiskPoint::new(0.0, 0.5).unwrap(), UnitCirclePoint::new(0.0));
        assert!((k - c(3.0, 0.0)).norm() < 1e-15);

        let k = herglotz_kernel(DiskPoint::new(0.0, 0.5).unwrap(), UnitCirclePoint::new(PI));
        assert!((k - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn herglotz_diagonal_is_exact_at_tiny_eps() {
        let eps = 2.0f64.powi(-45);
        let z = DiskPoint::new(2.1, eps).unwrap();
        let k = herglotz_kernel(z, UnitCirclePoint::new(2.1));
        let expect = (2.0 - eps) / eps;
        assert!((k.re - expect).abs() / expect < 1e-14);
        assert!(k.im.abs() / expect < 1e-14);
    }

    #[test]
    fn unwrap_examples() {
        let vals = vec![c(1.0, 0.0); 3];
        assert_eq!(unwrap_argument(&vals).unwrap(), vec![0.0; 3]);

        let vals = vec![c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)];
        let args = unwrap_argument(&vals).unwrap();
        assert!((args[0]).abs() < 1e-15);
        assert!((args[1] - PI / 2.0).abs() < 1e-15);
        assert!((args[2] - PI).abs() < 1e-15);
    }

    #[test]
    fn unwrap_full_circle() {
        // 128 points around the circle, then back to 1: cumulative sum of
        // principal increments on a known circle gives 2pi at the end.
        let mut vals: Vec<Complex64> = (0..128)
            .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / 128.0))
            .collect();
        vals.push(c(1.0, 0.0));
        let args = unwrap_argument(&vals).unwrap();
        assert!((args.last().unwrap() - TAU).abs() < 1e-12);
    }

    #[test]
    fn unwrap_rejects_zero_and_large_jump() {
        assert_eq!(
            unwrap_argument(&[c(1.0, 0.0), c(0.0, 0.0)]),
            Err(CoreError::ZeroValue(1))
        );
        let r = unwrap_argument(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(r, Err(CoreError::JumpTooLarge { index: 1, .. })));
    }

    proptest! {
        #[test]
        fn exp_of_left_log_roundtrips(re in -1e6f64..-1e-6, im in -1e6f64..1e6) {
            let h = lhp(re, im);
            let l = left_log(h);
            prop_assert!(l.im > PI / 2.0 && l.im < 3.0 * PI / 2.0);
            let back = l.exp();
            prop_assert!((back - h.value()).norm() <= 1e-12 * h.value().norm());
        }

        #[test]
        fn mobius_maps_imaginary_axis_to_circle(im in -1e6f64..1e6, xi_theta in 0.0..TAU) {
            let xi = UnitCirclePoint::new(xi_theta);
            let w = mobius_lhp_to_disk(xi, LhpInput::Finite(c(0.0, im))).unwrap();
            prop_assert!((w.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn herglotz_real_part_positive(theta in 0.0..TAU, t in 0.0..TAU, eps in 1e-12f64..1.0) {
            let z = DiskPoint::new(theta, eps).unwrap();
            let k = herglotz_kernel(z, UnitCirclePoint::new(t));
            prop_assert!(k.re > 0.0);
        }

        #[test]
        fn unwrap_conjugate_negates(seq in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 2..50)) {
            let vals: Vec<Complex64> = seq.iter().map(|&(re, im)| c(re, im)).collect();
            prop_assume!(vals.iter().all(|v| v.norm() > 1e-9));
            let conj: Vec<Complex64> = vals.iter().map(|v| v.conj()).collect();
            if let (Ok(a), Ok(b)) = (unwrap_argument(&vals), unwrap_argument(&conj)) {
                for (x, y) in a.iter().zip(b.iter()) {
                    prop_assert!((x + y).abs() < 1e-9);
                }
            }
        }
    }
}
