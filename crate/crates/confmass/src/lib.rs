//! Numerical checks for conformal deformations of initial data: curvature
//! and constraint transformation laws, decay admissibility, and the mass
//! integrals of asymptotically flat and asymptotically hyperbolic ends.
//!
//! The crate evaluates geometry analytically on explicit charts (no grids,
//! no discretized PDE solves): metrics carry their own first and second
//! derivatives, curvature is assembled exactly at points, surface integrals
//! use tensor-product Gauss rules on coordinate spheres, and limits at
//! infinity are extrapolated from a schedule of radii with a fitted decay
//! model. Everything downstream is a comparison of two independently
//! computed numbers: a pointwise identity against its direct evaluation, a
//! flux against a closed form, a deformed mass against a combination of
//! undeformed ones.
//!
//! Entry points:
//! - [`families`]: the model geometries, extrinsic curvature seeds, and
//!   conformal factor profiles everything else is exercised on.
//! - [`conformal`]: transformation laws under g -> e^{2 beta f} g.
//! - [`adm`]: asymptotically flat data, decay validation, energy-momentum.
//! - [`hyperbolic`]: model frame, Killing data, hyperbolic mass vector.
//! - [`suites`]: named check suites behind the command-line interface.

pub mod adm;
pub mod chart;
pub mod config;
pub mod conformal;
pub mod curvature;
pub mod error;
pub mod families;
pub mod fd;
pub mod field;
pub mod fit;
pub mod hyperbolic;
pub mod numeric;
pub mod quad;
pub mod report;
pub mod suites;
pub mod tensor;

pub use error::{Error, Result};
