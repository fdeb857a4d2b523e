//! Coordinate charts on which every field in this crate is evaluated.
//!
//! Two chart kinds cover all supported geometries:
//!
//! * `CartesianEnd`: coordinates x in R^n with |x| >= r_min, the exterior
//!   region of an asymptotically flat end.
//! * `PolarHyperbolic`: coordinates (rho, angles) with rho >= rho_min, the
//!   product presentation (rho_min, inf) x S^{n-1} used for asymptotically
//!   hyperbolic metrics. Angles are the round-sphere coordinates: (theta,
//!   phi) for n = 3 and (chi, theta, phi) for n = 4, with the polar angles
//!   in (0, pi) and the azimuth periodic.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChartKind {
    CartesianEnd,
    PolarHyperbolic,
}

#[derive(Clone, Debug)]
pub struct Chart {
    kind: ChartKind,
    dim: usize,
    inner_radius: f64,
}

impl Chart {
    pub fn cartesian_end(dim: usize, r_min: f64) -> Result<Self> {
        if dim < 3 {
            return Err(Error::InvalidParameter {
                name: "dimension".into(),
                reason: format!("cartesian end needs n >= 3, got {dim}"),
            });
        }
        if !(r_min > 0.0) {
            return Err(Error::InvalidParameter {
                name: "r_min".into(),
                reason: format!("must be positive, got {r_min}"),
            });
        }
        Ok(Chart { kind: ChartKind::CartesianEnd, dim, inner_radius: r_min })
    }

    pub fn polar_hyperbolic(dim: usize, rho_min: f64) -> Result<Self> {
        if !(dim == 3 || dim == 4) {
            return Err(Error::UnsupportedDimension { quantity: "polar hyperbolic chart", found: dim });
        }
        if !(rho_min > 0.0) {
            return Err(Error::InvalidParameter {
                name: "rho_min".into(),
                reason: format!("must be positive, got {rho_min}"),
            });
        }
        Ok(Chart { kind: ChartKind::PolarHyperbolic, dim, inner_radius: rho_min })
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Inner radius r_min (cartesian) or rho_min (polar).
    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    /// Euclidean radius or first coordinate, whichever plays the role of the
    /// radial variable on this chart.
    pub fn radial(&self, x: &[f64]) -> f64 {
        match self.kind {
            ChartKind::CartesianEnd => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            ChartKind::PolarHyperbolic => x[0],
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match self.kind {
            // a tiny slack keeps boundary points (isotropic horizon spheres) usable
            ChartKind::CartesianEnd => self.radial(x) >= self.inner_radius * (1.0 - 1e-12),
            ChartKind::PolarHyperbolic => {
                if x[0] < self.inner_radius * (1.0 - 1e-12) {
                    return false;
                }
                // polar angles must stay strictly inside (0, pi); azimuth is free
                x[1..self.dim - 1].iter().all(|&a| a > 0.0 && a < std::f64::consts::PI)
            }
        }
    }

    pub fn check_contains(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: x.len() });
        }
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain { point: x.to_vec() })
        }
    }

    /// Distance from x to the chart boundary, the quantity a finite-difference
    /// stencil of half-width 2h must stay below.
    pub fn boundary_distance(&self, x: &[f64]) -> f64 {
        match self.kind {
            ChartKind::CartesianEnd => self.radial(x) - self.inner_radius,
            ChartKind::PolarHyperbolic => {
                let mut d = x[0] - self.inner_radius;
                for &a in &x[1..self.dim - 1] {
                    d = d.min(a).min(std::f64::consts::PI - a);
                }
                d
            }
        }
    }

    /// Default finite-difference step: 1e-3 times the coordinate scale on a
    /// cartesian end, a flat 1e-3 in polar coordinates.
    pub fn fd_step(&self, x: &[f64]) -> f64 {
        match self.kind {
            ChartKind::CartesianEnd => 1e-3 * 1.0_f64.max(self.radial(x)),
            ChartKind::PolarHyperbolic => 1e-3,
        }
    }
}
