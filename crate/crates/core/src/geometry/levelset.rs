//! Implicit cutout geometry. The level set is positive in the material and
//! negative inside the cutout.

use nalgebra::Point2;

use super::mesh::Mesh;
use crate::error::{Error, Result};

/// Level-set value used at every node when there is no cutout.
pub const NO_CUTOUT_LEVEL: f64 = 1.0e30;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Cutout {
    #[default]
    None,
    Circle {
        center: Point2<f64>,
        radius: f64,
    },
    /// Ellipse with semi-axis `d` along the direction `angle_deg` (from x,
    /// counter-clockwise) and semi-axis `e` across it.
    Ellipse {
        center: Point2<f64>,
        d: f64,
        e: f64,
        angle_deg: f64,
    },
}

impl Cutout {
    /// Checks positivity of the size parameters and that the cutout lies
    /// strictly inside `[0, a] x [0, b]`.
    pub fn validate(&self, a: f64, b: f64) -> Result<()> {
        let (center, extent_x, extent_y) = match *self {
            Cutout::None => return Ok(()),
            Cutout::Circle { center, radius } => {
                if !(radius > 0.0) {
                    return Err(Error::InvalidGeometry(format!(
                        "cutout radius must be positive, got {radius}"
                    )));
                }
                (center, radius, radius)
            }
            Cutout::Ellipse {
                center,
                d,
                e,
                angle_deg,
            } => {
                if !(d > 0.0 && e > 0.0) {
                    return Err(Error::InvalidGeometry(format!(
                        "ellipse semi-axes must be positive, got d = {d}, e = {e}"
                    )));
                }
                let (s, c) = angle_deg.to_radians().sin_cos();
                (
                    center,
                    ((d * c).powi(2) + (e * s).powi(2)).sqrt(),
                    ((d * s).powi(2) + (e * c).powi(2)).sqrt(),
                )
            }
        };
        if center.x - extent_x <= 0.0
            || center.x + extent_x >= a
            || center.y - extent_y <= 0.0
            || center.y + extent_y >= b
        {
            return Err(Error::InvalidGeometry(
                "cutout must lie strictly inside the plate".into(),
            ));
        }
        Ok(())
    }

    /// Exact area of the cutout.
    pub fn area(&self) -> f64 {
        match *self {
            Cutout::None => 0.0,
            Cutout::Circle { radius, .. } => std::f64::consts::PI * radius * radius,
            Cutout::Ellipse { d, e, .. } => std::f64::consts::PI * d * e,
        }
    }

    pub fn level_set(&self, mesh: &Mesh) -> LevelSetField {
        match *self {
            Cutout::None => LevelSetField {
                phi: vec![NO_CUTOUT_LEVEL; mesh.node_count()],
            },
            Cutout::Circle { center, radius } => circle_level_set(mesh, center, radius),
            Cutout::Ellipse {
                center,
                d,
                e,
                angle_deg,
            } => ellipse_level_set(mesh, center, d, e, angle_deg),
        }
    }
}

/// Nodal level-set values; interpolated with the bilinear shape functions.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSetField {
    pub phi: Vec<f64>,
}

impl LevelSetField {
    /// Element nodal values with exact zeros nudged to `+1e-10 h`.
    pub fn element_values(&self, mesh: &Mesh, e: usize, h: f64) -> [f64; 4] {
        mesh.elements[e].map(|n| nudge(self.phi[n], h))
    }
}

pub(crate) fn nudge(phi: f64, h: f64) -> f64 {
    if phi == 0.0 {
        1e-10 * h
    } else {
        phi
    }
}

/// Signed distance to the circle boundary.
pub fn circle_level_set(mesh: &Mesh, center: Point2<f64>, radius: f64) -> LevelSetField {
    LevelSetField {
        phi: mesh
            .nodes
            .iter()
            .map(|p| (p - center).norm() - radius)
            .collect(),
    }
}

/// Normalized ellipse level set `sqrt(a1 dx^2 + a2 dx dy + a3 dy^2) - 1`.
pub fn ellipse_level_set(
    mesh: &Mesh,
    center: Point2<f64>,
    d: f64,
    e: f64,
    angle_deg: f64,
) -> LevelSetField {
    let (s, c) = angle_deg.to_radians().sin_cos();
    let a1 = (c / d).powi(2) + (s / e).powi(2);
    let a2 = 2.0 * c * s * (1.0 / (d * d) - 1.0 / (e * e));
    let a3 = (s / d).powi(2) + (c / e).powi(2);
    LevelSetField {
        phi: mesh
            .nodes
            .iter()
            .map(|p| {
                let (dx, dy) = (p.x - center.x, p.y - center.y);
                (a1 * dx * dx + a2 * dx * dy + a3 * dy * dy).sqrt() - 1.0
            })
            .collect(),
    }
}
