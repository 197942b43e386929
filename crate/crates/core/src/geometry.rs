//! Geometry of the circle `S^1` and the spheres `S^m`, `m >= 2`.
//!
//! Circle points are angles in `[-π, π)`; sphere points are unit vectors in
//! `R^{m+1}`. Tangent vectors are expressed in normal coordinates with
//! respect to a fixed orthonormal frame of the tangent space (see
//! [`tangent_basis`]).

use crate::error::{FssError, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const TAU: f64 = 2.0 * PI;

/// Allowed deviation of `|x|` from one for sphere points.
pub const UNIT_TOLERANCE: f64 = 1e-12;

/// Distance from `π` below which a point counts as antipodal.
pub const CUT_LOCUS_TOLERANCE: f64 = 1e-12;

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle(x: f64) -> f64 {
    if (-PI..PI).contains(&x) {
        return x;
    }
    let mut y = x - TAU * ((x + PI) / TAU).floor();
    if y >= PI {
        y -= TAU;
    }
    if y < -PI {
        y = -PI;
    }
    y
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpherePoint {
    /// Angle in `[-π, π)`.
    Circle(f64),
    /// Unit vector of length `m + 1`, `m >= 2`.
    Sphere(Vec<f64>),
}

impl SpherePoint {
    pub fn angle(a: f64) -> Self {
        SpherePoint::Circle(wrap_angle(a))
    }

    /// Validates a unit vector of length at least 3.
    pub fn unit(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return Err(FssError::InvalidPoint(format!(
                "sphere points need at least 3 coordinates, got {}",
                coords.len()
            )));
        }
        let n = norm(&coords);
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(FssError::InvalidPoint(format!("norm {n} is not 1")));
        }
        Ok(SpherePoint::Sphere(coords))
    }

    /// Normalizes a nonzero vector onto the sphere.
    pub fn normalized(mut coords: Vec<f64>) -> Result<Self> {
        let n = norm(&coords);
        if !(n > 0.0 && n.is_finite()) {
            return Err(FssError::InvalidPoint("zero or non-finite vector".into()));
        }
        coords.iter_mut().for_each(|c| *c /= n);
        Self::unit(coords)
    }

    /// `μ` of the built-in distributions: angle 0, or `(1, 0, …, 0)`.
    pub fn north_pole(m: usize) -> Self {
        if m == 1 {
            SpherePoint::Circle(0.0)
        } else {
            let mut v = vec![0.0; m + 1];
            v[0] = 1.0;
            SpherePoint::Sphere(v)
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SpherePoint::Circle(_) => 1,
            SpherePoint::Sphere(v) => v.len() - 1,
        }
    }

    pub fn as_angle(&self) -> Option<f64> {
        match self {
            SpherePoint::Circle(a) => Some(*a),
            SpherePoint::Sphere(_) => None,
        }
    }

    pub fn as_slice(&self) -> Option<&[f64]> {
        match self {
            SpherePoint::Circle(_) => None,
            SpherePoint::Sphere(v) => Some(v),
        }
    }

    /// Point in the ambient space; circle angles map to `(cos a, sin a)`.
    pub fn embed(&self) -> Vec<f64> {
        match self {
            SpherePoint::Circle(a) => vec![a.cos(), a.sin()],
            SpherePoint::Sphere(v) => v.clone(),
        }
    }

    pub fn antipode(&self) -> Self {
        match self {
            SpherePoint::Circle(a) => SpherePoint::angle(a + PI),
            SpherePoint::Sphere(v) => SpherePoint::Sphere(v.iter().map(|x| -x).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: SpherePoint,
    /// Normal coordinates, length `m`.
    pub coords: Vec<f64>,
}

impl TangentVector {
    pub fn norm(&self) -> f64 {
        norm(&self.coords)
    }
}

/// `(θ, q)` with `p = (cos θ, sin θ q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarPoint {
    pub theta: f64,
    pub direction: Vec<f64>,
    /// Set when `θ ∈ {0, π}` and `direction` is the canonical placeholder.
    pub degenerate: bool,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Shortest arc between two angles.
#[inline]
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (y - x).abs() % TAU;
    d.min(TAU - d)
}

/// Great-circle distance between unit vectors.
///
/// Evaluated through chord lengths rather than `acos(x·y)` so that nearby
/// and nearly antipodal pairs keep full precision.
#[inline]
pub fn sphere_distance(x: &[f64], y: &[f64]) -> f64 {
    let mut minus = 0.0;
    let mut plus = 0.0;
    for (a, b) in x.iter().zip(y) {
        minus += (a - b) * (a - b);
        plus += (a + b) * (a + b);
    }
    if minus <= plus {
        2.0 * (0.5 * minus.sqrt()).min(1.0).asin()
    } else {
        PI - 2.0 * (0.5 * plus.sqrt()).min(1.0).asin()
    }
}

/// Great-circle distance by `acos` of the clamped inner product.
pub fn sphere_distance_acos(x: &[f64], y: &[f64]) -> f64 {
    dot(x, y).clamp(-1.0, 1.0).acos()
}

fn check_dims(x: &SpherePoint, y: &SpherePoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(FssError::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(())
}

pub fn geodesic_distance(x: &SpherePoint, y: &SpherePoint) -> Result<f64> {
    check_dims(x, y)?;
    Ok(match (x, y) {
        (SpherePoint::Circle(a), SpherePoint::Circle(b)) => circle_distance(*a, *b),
        (SpherePoint::Sphere(a), SpherePoint::Sphere(b)) => sphere_distance(a, b),
        _ => unreachable!("dimensions checked"),
    })
}

/// Signed circle log map: the representative of `x - base` in `[-π, π)`.
#[inline]
pub fn circle_log(base: f64, x: f64) -> Result<f64> {
    let d = wrap_angle(x - base);
    if d.abs() > PI - CUT_LOCUS_TOLERANCE {
        return Err(FssError::CutLocus);
    }
    Ok(d)
}

/// Ambient log map on the sphere, written into `out` (orthogonal to `base`).
#[inline]
pub fn sphere_log_ambient(base: &[f64], x: &[f64], out: &mut [f64]) -> Result<f64> {
    let theta = sphere_distance(base, x);
    if theta > PI - CUT_LOCUS_TOLERANCE {
        return Err(FssError::CutLocus);
    }
    let c = dot(base, x);
    let mut un = 0.0;
    for ((o, b), xi) in out.iter_mut().zip(base).zip(x) {
        *o = xi - c * b;
        un += *o * *o;
    }
    let un = un.sqrt();
    if un == 0.0 || theta == 0.0 {
        out.iter_mut().for_each(|o| *o = 0.0);
    } else {
        let s = theta / un;
        out.iter_mut().for_each(|o| *o *= s);
    }
    Ok(theta)
}

/// Ambient exponential map on the sphere, normalized on output.
#[inline]
pub fn sphere_exp_ambient(base: &[f64], v: &[f64], out: &mut [f64]) {
    let n = norm(v);
    if n == 0.0 {
        out.copy_from_slice(base);
        return;
    }
    let (s, c) = n.sin_cos();
    let k = s / n;
    for ((o, b), vi) in out.iter_mut().zip(base).zip(v) {
        *o = c * b + k * vi;
    }
    let r = norm(out);
    out.iter_mut().for_each(|o| *o /= r);
}

/// Orthonormal frame of the tangent space at `p`.
///
/// Gram–Schmidt over the canonical axes, skipping the axis along which `p`
/// has its largest component. At `(1, 0, …, 0)` this is `e_1, …, e_m`.
pub fn tangent_basis(p: &[f64]) -> Vec<Vec<f64>> {
    let d = p.len();
    let skip = p
        .iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, v)| if v.abs() > best.1 { (i, v.abs()) } else { best })
        .0;
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for i in (0..d).filter(|&i| i != skip) {
        let mut w: Vec<f64> = p.iter().map(|pj| -p[i] * pj).collect();
        w[i] += 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(wj, bj)| *wj -= c * bj);
            }
            let c = dot(&w, p);
            w.iter_mut().zip(p).for_each(|(wj, pj)| *wj -= c * pj);
        }
        let n = norm(&w);
        w.iter_mut().for_each(|x| *x /= n);
        basis.push(w);
    }
    basis
}

/// Coordinates of an ambient tangent vector in `basis`.
pub fn to_coords(basis: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    basis.iter().map(|b| dot(b, v)).collect()
}

pub fn from_coords(basis: &[Vec<f64>], coords: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; basis[0].len()];
    for (b, c) in basis.iter().zip(coords) {
        v.iter_mut().zip(b).for_each(|(vi, bi)| *vi += c * bi);
    }
    v
}

pub fn log_map(base: &SpherePoint, x: &SpherePoint) -> Result<TangentVector> {
    check_dims(base, x)?;
    let coords = match (base, x) {
        (SpherePoint::Circle(b), SpherePoint::Circle(a)) => vec![circle_log(*b, *a)?],
        (SpherePoint::Sphere(b), SpherePoint::Sphere(a)) => {
            let mut amb = vec![0.0; b.len()];
            sphere_log_ambient(b, a, &mut amb)?;
            to_coords(&tangent_basis(b), &amb)
        }
        _ => unreachable!("dimensions checked"),
    };
    Ok(TangentVector {
        base: base.clone(),
        coords,
    })
}

pub fn exp_map(v: &TangentVector) -> Result<SpherePoint> {
    let n = v.norm();
    if n > PI {
        return Err(FssError::TangentTooLong(n));
    }
    if v.coords.len() != v.base.dim() {
        return Err(FssError::DimensionMismatch {
            expected: v.base.dim(),
            found: v.coords.len(),
        });
    }
    Ok(match &v.base {
        SpherePoint::Circle(b) => SpherePoint::angle(b + v.coords[0]),
        SpherePoint::Sphere(b) => {
            let amb = from_coords(&tangent_basis(b), &v.coords);
            let mut out = vec![0.0; b.len()];
            sphere_exp_ambient(b, &amb, &mut out);
            SpherePoint::Sphere(out)
        }
    })
}

/// Polar angle from the north pole and direction in `S^{m-1}`.
pub fn polar_decompose(x: &SpherePoint) -> PolarPoint {
    match x {
        SpherePoint::Circle(a) => PolarPoint {
            theta: a.abs(),
            direction: vec![if *a < 0.0 { -1.0 } else { 1.0 }],
            degenerate: *a == 0.0 || *a == -PI,
        },
        SpherePoint::Sphere(v) => {
            let north = SpherePoint::north_pole(v.len() - 1);
            let theta = sphere_distance(north.as_slice().unwrap(), v);
            let rest = &v[1..];
            let r = norm(rest);
            if r < 1e-15 {
                let mut direction = vec![0.0; rest.len()];
                direction[0] = 1.0;
                PolarPoint {
                    theta: if v[0] > 0.0 { 0.0 } else { PI },
                    direction,
                    degenerate: true,
                }
            } else {
                PolarPoint {
                    theta,
                    direction: rest.iter().map(|c| c / r).collect(),
                    degenerate: false,
                }
            }
        }
    }
}

/// Inverse of [`polar_decompose`]; `m` is the sphere dimension.
pub fn polar_compose(p: &PolarPoint, m: usize) -> Result<SpherePoint> {
    if p.direction.len() != m {
        return Err(FssError::DimensionMismatch {
            expected: m,
            found: p.direction.len(),
        });
    }
    if !(0.0..=PI).contains(&p.theta) {
        return Err(FssError::InvalidPoint(format!("polar angle {} outside [0, π]", p.theta)));
    }
    if m == 1 {
        return Ok(SpherePoint::angle(p.theta * p.direction[0].signum()));
    }
    let (s, c) = p.theta.sin_cos();
    let mut v = Vec::with_capacity(m + 1);
    v.push(c);
    v.extend(p.direction.iter().map(|q| s * q));
    let n = norm(&v);
    v.iter_mut().for_each(|x| *x /= n);
    Ok(SpherePoint::Sphere(v))
}
