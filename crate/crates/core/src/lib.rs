//! Vibration and buckling of laminated composite plates with mesh-independent
//! cutouts under uniform moisture and temperature preload.
//!
//! The plate is modelled with first-order shear deformation kinematics and
//! discretized with a four-node assumed-strain element. Cutouts are described
//! by a nodal level set; cut elements are integrated over their material
//! subtriangles only.

pub mod driver;
pub mod element;
pub mod error;
pub mod geometry;
pub mod material;
pub mod solver;

pub use error::{Error, Result};
