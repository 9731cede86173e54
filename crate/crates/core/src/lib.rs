//! Hausdorff dimension of limit sets of Möbius groups through Bowen's
//! equation, with the pressure metric and its relatives on deformation
//! families of surface groups.

pub mod circle;
pub mod cli;
pub mod coding;
pub mod error;
pub mod groups;
pub mod metrics;
pub mod mobius;
pub mod numerics;
pub mod thermo;

pub use error::{Error, Result};
pub use mobius::{MoebiusMap, RiemannPoint, C64};
