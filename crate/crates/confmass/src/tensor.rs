//! Pointwise tensor values and the index algebra a metric induces on them.
//!
//! Everything here is a plain value at a single point. Fields (functions of
//! position with derivative oracles) live in `field`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variance {
    Covariant,
    Contravariant,
    Mixed,
}

impl Variance {
    pub fn label(self) -> &'static str {
        match self {
            Variance::Covariant => "covariant",
            Variance::Contravariant => "contravariant",
            Variance::Mixed => "mixed",
        }
    }
}

/// Symmetric rank-2 tensor value at a point.
#[derive(Clone, Debug)]
pub struct SymTensor2 {
    pub components: DMatrix<f64>,
    pub variance: Variance,
}

impl SymTensor2 {
    pub fn new(components: DMatrix<f64>, variance: Variance) -> Self {
        debug_assert!(components.is_square());
        SymTensor2 { components, variance }
    }

    pub fn dim(&self) -> usize {
        self.components.nrows()
    }
}

/// Tangent or cotangent vector value at a point.
#[derive(Clone, Debug)]
pub struct TangentVector {
    pub components: DVector<f64>,
    pub variance: Variance,
}

impl TangentVector {
    pub fn new(components: DVector<f64>, variance: Variance) -> Self {
        TangentVector { components, variance }
    }
}

/// Dense rank-3 array indexed (k, i, j); stores derivative stacks such as
/// d_k g_ij and Christoffel symbols Gamma^k_ij.
#[derive(Clone, Debug)]
pub struct Tensor3 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(n: usize) -> Self {
        Tensor3 { n, data: vec![0.0; n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    #[inline]
    pub fn add(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] += v;
    }

    /// Matrix slice at fixed leading index.
    pub fn slice(&self, k: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(k, i, j))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Dense rank-4 array indexed (l, k, i, j); stores d_l d_k g_ij and
/// Christoffel derivative stacks d_l Gamma^k_ij.
#[derive(Clone, Debug)]
pub struct Tensor4 {
    n: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn zeros(n: usize) -> Self {
        Tensor4 { n, data: vec![0.0; n * n * n * n] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        self.data[((l * self.n + k) * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, l: usize, k: usize, i: usize, j: usize, v: f64) {
        self.data[((l * self.n + k) * self.n + i) * self.n + j] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Metric value at a point together with its Cholesky inverse. Construction
/// fails on a non-positive-definite matrix; there is deliberately no
/// pseudo-inverse fallback.
#[derive(Clone, Debug)]
pub struct MetricPoint {
    pub components: DMatrix<f64>,
    pub inverse: DMatrix<f64>,
    pub sqrt_det: f64,
}

impl MetricPoint {
    pub fn new(components: DMatrix<f64>, point: &[f64]) -> Result<Self> {
        let chol: Cholesky<f64, Dyn> = Cholesky::new(components.clone())
            .ok_or_else(|| Error::DegenerateMetric { point: point.to_vec() })?;
        let sqrt_det = chol.l_dirty().diagonal().iter().product::<f64>();
        let inverse = chol.inverse();
        Ok(MetricPoint { components, inverse, sqrt_det })
    }

    pub fn dim(&self) -> usize {
        self.components.nrows()
    }

    pub fn raise_vector(&self, v: &TangentVector) -> Result<TangentVector> {
        match v.variance {
            Variance::Covariant => Ok(TangentVector::new(&self.inverse * &v.components, Variance::Contravariant)),
            other => Err(Error::IncompatibleIndex {
                action: "raise",
                expected: "covariant",
                found: other.label(),
            }),
        }
    }

    pub fn lower_vector(&self, v: &TangentVector) -> Result<TangentVector> {
        match v.variance {
            Variance::Contravariant => Ok(TangentVector::new(&self.components * &v.components, Variance::Covariant)),
            other => Err(Error::IncompatibleIndex {
                action: "lower",
                expected: "contravariant",
                found: other.label(),
            }),
        }
    }

    pub fn raise_tensor(&self, t: &SymTensor2) -> Result<SymTensor2> {
        match t.variance {
            Variance::Covariant => Ok(SymTensor2::new(
                &self.inverse * &t.components * &self.inverse,
                Variance::Contravariant,
            )),
            other => Err(Error::IncompatibleIndex {
                action: "raise",
                expected: "covariant",
                found: other.label(),
            }),
        }
    }

    pub fn lower_tensor(&self, t: &SymTensor2) -> Result<SymTensor2> {
        match t.variance {
            Variance::Contravariant => Ok(SymTensor2::new(
                &self.components * &t.components * &self.components,
                Variance::Covariant,
            )),
            other => Err(Error::IncompatibleIndex {
                action: "lower",
                expected: "contravariant",
                found: other.label(),
            }),
        }
    }

    /// Metric trace: g^{ij} T_ij, g_ij T^{ij}, or T^i_i depending on variance.
    pub fn trace(&self, t: &SymTensor2) -> f64 {
        match t.variance {
            Variance::Covariant => (&self.inverse * &t.components).trace(),
            Variance::Contravariant => (&self.components * &t.components).trace(),
            Variance::Mixed => t.components.trace(),
        }
    }

    /// Metric norm sqrt(T_ij T_kl g^{ik} g^{jl}) and its variance analogues.
    pub fn norm_tensor(&self, t: &SymTensor2) -> Result<f64> {
        let sq = match t.variance {
            Variance::Covariant => {
                let up = &self.inverse * &t.components * &self.inverse;
                (up.component_mul(&t.components)).sum()
            }
            Variance::Contravariant => {
                let down = &self.components * &t.components * &self.components;
                (down.component_mul(&t.components)).sum()
            }
            Variance::Mixed => {
                return Err(Error::IncompatibleIndex {
                    action: "norm",
                    expected: "covariant or contravariant",
                    found: "mixed",
                })
            }
        };
        // clip tiny negative roundoff before the square root
        Ok(sq.max(0.0).sqrt())
    }

    pub fn norm_vector(&self, v: &TangentVector) -> Result<f64> {
        let sq = match v.variance {
            Variance::Covariant => (&self.inverse * &v.components).dot(&v.components),
            Variance::Contravariant => (&self.components * &v.components).dot(&v.components),
            Variance::Mixed => {
                return Err(Error::IncompatibleIndex {
                    action: "norm",
                    expected: "covariant or contravariant",
                    found: "mixed",
                })
            }
        };
        Ok(sq.max(0.0).sqrt())
    }

    /// Inner product of two vectors of equal variance.
    pub fn inner_vector(&self, a: &TangentVector, b: &TangentVector) -> Result<f64> {
        if a.variance != b.variance {
            return Err(Error::IncompatibleIndex {
                action: "inner product",
                expected: "matching variance",
                found: "mixed pair",
            });
        }
        match a.variance {
            Variance::Covariant => Ok((&self.inverse * &a.components).dot(&b.components)),
            Variance::Contravariant => Ok((&self.components * &a.components).dot(&b.components)),
            Variance::Mixed => Err(Error::IncompatibleIndex {
                action: "inner product",
                expected: "covariant or contravariant",
                found: "mixed",
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn scaled_flat(n: usize, c: f64) -> MetricPoint {
        MetricPoint::new(DMatrix::identity(n, n) * c, &[0.0; 3]).unwrap()
    }

    #[test]
    fn norm_of_identity_under_scaled_flat_metric() {
        // g = 4 delta, T_ij = delta: |T|_g = sqrt(3)/4
        let g = scaled_flat(3, 4.0);
        let t = SymTensor2::new(DMatrix::identity(3, 3), Variance::Covariant);
        assert_relative_eq!(g.norm_tensor(&t).unwrap(), 3.0_f64.sqrt() / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn raise_then_lower_is_identity() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, 0.0, 0.1, 0.0, 1.2]);
        let g = MetricPoint::new(m, &[0.0; 3]).unwrap();
        let t = SymTensor2::new(
            DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.0, 0.2, -0.5, 0.4, 0.0, 0.4, 2.0]),
            Variance::Covariant,
        );
        let back = g.lower_tensor(&g.raise_tensor(&t).unwrap()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((back.components[(i, j)] - t.components[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn degenerate_metric_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]); // indefinite
        assert!(matches!(
            MetricPoint::new(m, &[1.0, 2.0]),
            Err(Error::DegenerateMetric { .. })
        ));
    }

    #[test]
    fn mixed_variance_norm_is_a_usage_error() {
        let g = scaled_flat(3, 1.0);
        let t = SymTensor2::new(DMatrix::identity(3, 3), Variance::Mixed);
        assert!(g.norm_tensor(&t).is_err());
    }

    #[test]
    fn sqrt_det_matches_determinant() {
        let m = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.5, 0.0, 0.1, 0.0, 1.2]);
        let det = m.determinant();
        let g = MetricPoint::new(m, &[0.0; 3]).unwrap();
        assert_relative_eq!(g.sqrt_det, det.sqrt(), max_relative = 1e-12);
    }
}
