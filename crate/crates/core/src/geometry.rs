//! Rigid transforms, pinhole projection, and 2D box math shared by the
//! composer, renderer, annotator, and evaluator.
//!
//! Image coordinates are right-handed with y down (KITTI convention); pixel
//! `(i, j)` owns the unit square `[i, i+1) x [j, j+1)` with its center at
//! `(i + 0.5, j + 0.5)`. Box coordinates are continuous (sub-pixel).

use nalgebra::{Matrix3, Point3, Rotation3, Vector3};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("point is behind the camera (z = {0})")]
    BehindCamera(f64),
    #[error("invalid bbox ({x1}, {y1}, {x2}, {y2}): {detail}")]
    InvalidBBox {
        x1: f64,
        y1: f64,
        x2: f64,
        y2: f64,
        detail: &'static str,
    },
    #[error("rotation matrix is not orthonormal (residual {0:.3e})")]
    NotOrthonormal(f64),
}

/// Rigid transform: `apply(p) = R p + t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub rotation: Rotation3<f64>,
    pub translation: Vector3<f64>,
}

impl Pose {
    pub fn identity() -> Self {
        Self {
            rotation: Rotation3::identity(),
            translation: Vector3::zeros(),
        }
    }

    /// Build from a raw matrix, verifying orthonormality and det = +1
    /// to within 1e-9.
    pub fn from_matrix(m: Matrix3<f64>, translation: Vector3<f64>) -> Result<Self, GeometryError> {
        let residual = (m.transpose() * m - Matrix3::identity()).norm();
        let det_err = (m.determinant() - 1.0).abs();
        if residual > 1e-9 || det_err > 1e-9 {
            return Err(GeometryError::NotOrthonormal(residual.max(det_err)));
        }
        Ok(Self {
            rotation: Rotation3::from_matrix_unchecked(m),
            translation,
        })
    }

    /// Pure translation.
    pub fn translate(t: Vector3<f64>) -> Self {
        Self {
            rotation: Rotation3::identity(),
            translation: t,
        }
    }

    /// Rotation about the world y axis by `angle` radians, then translation.
    pub fn yaw_then_translate(angle: f64, t: Vector3<f64>) -> Self {
        Self {
            rotation: Rotation3::from_axis_angle(&Vector3::y_axis(), angle),
            translation: t,
        }
    }

    pub fn apply(&self, p: &Point3<f64>) -> Point3<f64> {
        self.rotation * p + self.translation
    }

    pub fn apply_vector(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * v
    }

    /// `self` after `other` (apply `other` first).
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    pub fn inverse(&self) -> Pose {
        let rinv = self.rotation.inverse();
        Pose {
            rotation: rinv,
            translation: -(rinv * self.translation),
        }
    }
}

/// Pinhole camera: intrinsics in pixels plus the world-to-camera pose.
///
/// The camera looks down its local +z; x is right and y is down in the image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Camera {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: u32,
    pub height: u32,
    /// world -> camera
    pub pose: Pose,
}

impl Camera {
    /// Camera at `eye` looking at `target`, upright with respect to world +y.
    ///
    /// Falls back to world +x as the up hint when the view direction is
    /// (anti)parallel to +y.
    pub fn look_at(
        eye: Point3<f64>,
        target: Point3<f64>,
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        width: u32,
        height: u32,
    ) -> Self {
        let forward = (target - eye).normalize();
        let up_hint = if forward.cross(&Vector3::y()).norm() < 1e-9 {
            Vector3::x()
        } else {
            Vector3::y()
        };
        let right = forward.cross(&up_hint).normalize();
        let down = forward.cross(&right);
        // rows of R map world vectors onto (right, down, forward)
        let r = Matrix3::from_rows(&[right.transpose(), down.transpose(), forward.transpose()]);
        let rotation = Rotation3::from_matrix_unchecked(r);
        let translation = -(rotation * eye.coords);
        Camera {
            fx,
            fy,
            cx,
            cy,
            width,
            height,
            pose: Pose {
                rotation,
                translation,
            },
        }
    }

    /// Camera center in world coordinates.
    pub fn position(&self) -> Point3<f64> {
        Point3::from(self.pose.inverse().translation)
    }

    /// Same camera on a canvas enlarged `factor`x in each direction with the
    /// original frame centered; used as the truncation oracle's film.
    pub fn extended(&self, factor: u32) -> Camera {
        assert!(factor % 2 == 1, "extension factor must be odd");
        let pad = (factor - 1) / 2;
        Camera {
            cx: self.cx + f64::from(pad * self.width),
            cy: self.cy + f64::from(pad * self.height),
            width: self.width * factor,
            height: self.height * factor,
            ..self.clone()
        }
    }
}

/// Project a world point: returns continuous pixel coordinates and the depth
/// (camera-space z) in meters. Points at or behind the camera are errors.
pub fn project(camera: &Camera, point: &Point3<f64>) -> Result<(f64, f64, f64), GeometryError> {
    let p = camera.pose.apply(point);
    if p.z <= 1e-6 {
        return Err(GeometryError::BehindCamera(p.z));
    }
    let u = camera.fx * p.x / p.z + camera.cx;
    let v = camera.fy * p.y / p.z + camera.cy;
    Ok((u, v, p.z))
}

/// Axis-aligned 2D box in continuous pixel coordinates, `x1 < x2, y1 < y2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox2D {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox2D {
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self, GeometryError> {
        let b = Self { x1, y1, x2, y2 };
        if ![x1, y1, x2, y2].iter().all(|c| c.is_finite()) {
            return Err(GeometryError::InvalidBBox {
                x1,
                y1,
                x2,
                y2,
                detail: "non-finite coordinate",
            });
        }
        if x1 >= x2 || y1 >= y2 {
            return Err(GeometryError::InvalidBBox {
                x1,
                y1,
                x2,
                y2,
                detail: "empty or inverted extent",
            });
        }
        Ok(b)
    }

    pub fn area(&self) -> f64 {
        (self.x2 - self.x1) * (self.y2 - self.y1)
    }

    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    pub fn translated(&self, dx: f64, dy: f64) -> BBox2D {
        BBox2D {
            x1: self.x1 + dx,
            y1: self.y1 + dy,
            x2: self.x2 + dx,
            y2: self.y2 + dy,
        }
    }

    /// Corners as `[x1, y1, x2, y2]`.
    pub fn corners(&self) -> [f64; 4] {
        [self.x1, self.y1, self.x2, self.y2]
    }

    /// True if the point lies inside under half-open `[x1, x2)` semantics
    /// (a cell center on the right/bottom edge is outside).
    pub fn contains_half_open(&self, x: f64, y: f64) -> bool {
        self.x1 <= x && x < self.x2 && self.y1 <= y && y < self.y2
    }
}

/// Intersection-over-union of two boxes; 0 when disjoint.
pub fn iou(a: &BBox2D, b: &BBox2D) -> f64 {
    let ix = (a.x2.min(b.x2) - a.x1.max(b.x1)).max(0.0);
    let iy = (a.y2.min(b.y2) - a.y1.max(b.y1)).max(0.0);
    let inter = ix * iy;
    if inter == 0.0 {
        return 0.0;
    }
    inter / (a.area() + b.area() - inter)
}
