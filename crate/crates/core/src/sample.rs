use crate::error::{FssError, Result};
use crate::geometry::{norm, wrap_angle, SpherePoint, UNIT_TOLERANCE};

/// An ordered collection of points on one sphere.
///
/// Circle samples store angles; sphere samples store unit vectors
/// row-major, `dim + 1` coordinates per point.
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Circle(Vec<f64>),
    Sphere { dim: usize, coords: Vec<f64> },
}

impl Sample {
    /// Angles are wrapped into `[-π, π)`.
    pub fn circle(angles: Vec<f64>) -> Self {
        Sample::Circle(angles.into_iter().map(wrap_angle).collect())
    }

    /// Validates `coords` as unit vectors of length `dim + 1`.
    pub fn sphere(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(FssError::InvalidPoint(format!("sphere dimension {dim} < 2")));
        }
        if !coords.len().is_multiple_of(dim + 1) {
            return Err(FssError::DimensionMismatch {
                expected: dim + 1,
                found: coords.len() % (dim + 1),
            });
        }
        for (i, row) in coords.chunks_exact(dim + 1).enumerate() {
            let n = norm(row);
            if (n - 1.0).abs() > UNIT_TOLERANCE {
                return Err(FssError::InvalidPoint(format!("point {i} has norm {n}")));
            }
        }
        Ok(Sample::Sphere { dim, coords })
    }

    pub fn from_points(points: &[SpherePoint]) -> Result<Self> {
        let first = points.first().ok_or(FssError::EmptySample)?;
        let dim = first.dim();
        if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
            return Err(FssError::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        Ok(match first {
            SpherePoint::Circle(_) => {
                Sample::Circle(points.iter().map(|p| p.as_angle().unwrap()).collect())
            }
            SpherePoint::Sphere(_) => Sample::Sphere {
                dim,
                coords: points
                    .iter()
                    .flat_map(|p| p.as_slice().unwrap().iter().copied())
                    .collect(),
            },
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Sample::Circle(_) => 1,
            Sample::Sphere { dim, .. } => *dim,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Sample::Circle(a) => a.len(),
            Sample::Sphere { dim, coords } => coords.len() / (dim + 1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> SpherePoint {
        match self {
            Sample::Circle(a) => SpherePoint::Circle(a[i]),
            Sample::Sphere { dim, coords } => {
                SpherePoint::Sphere(coords[i * (dim + 1)..(i + 1) * (dim + 1)].to_vec())
            }
        }
    }

    pub fn points(&self) -> Vec<SpherePoint> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    /// Sample containing the points at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Sample {
        match self {
            Sample::Circle(a) => Sample::Circle(indices.iter().map(|&i| a[i]).collect()),
            Sample::Sphere { dim, coords } => {
                let d = dim + 1;
                let mut out = Vec::with_capacity(indices.len() * d);
                for &i in indices {
                    out.extend_from_slice(&coords[i * d..(i + 1) * d]);
                }
                Sample::Sphere { dim: *dim, coords: out }
            }
        }
    }

    pub fn concat(&self, other: &Sample) -> Result<Sample> {
        if self.dim() != other.dim() {
            return Err(FssError::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(match (self, other) {
            (Sample::Circle(a), Sample::Circle(b)) => {
                Sample::Circle(a.iter().chain(b).copied().collect())
            }
            (Sample::Sphere { dim, coords: a }, Sample::Sphere { coords: b, .. }) => Sample::Sphere {
                dim: *dim,
                coords: a.iter().chain(b).copied().collect(),
            },
            _ => unreachable!(),
        })
    }

    /// Rotation by `angle` in the plane of the first two ambient axes.
    pub fn rotate_plane(&self, angle: f64) -> Sample {
        match self {
            Sample::Circle(a) => Sample::circle(a.iter().map(|x| x + angle).collect()),
            Sample::Sphere { dim, coords } => {
                let (s, c) = angle.sin_cos();
                let mut out = coords.clone();
                for row in out.chunks_exact_mut(dim + 1) {
                    let (x, y) = (row[0], row[1]);
                    row[0] = c * x - s * y;
                    row[1] = s * x + c * y;
                }
                Sample::Sphere { dim: *dim, coords: out }
            }
        }
    }
}

/// Same rotation as [`Sample::rotate_plane`], applied to one point.
pub fn rotate_point_plane(p: &SpherePoint, angle: f64) -> SpherePoint {
    match p {
        SpherePoint::Circle(a) => SpherePoint::angle(a + angle),
        SpherePoint::Sphere(v) => {
            let (s, c) = angle.sin_cos();
            let mut out = v.clone();
            out[0] = c * v[0] - s * v[1];
            out[1] = s * v[0] + c * v[1];
            SpherePoint::Sphere(out)
        }
    }
}
