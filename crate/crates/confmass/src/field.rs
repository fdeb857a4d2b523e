//! Field traits: positions in, components and coordinate derivatives out.
//!
//! Every geometric quantity in the crate is consumed through one of three
//! traits. Implementations are pure functions of (field, point); built-in
//! families carry closed-form derivatives, and the `Fd*` adapters wrap a
//! value-only oracle in fourth-order stencils for everything else.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::fd;
use crate::tensor::{Tensor3, Tensor4};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    FiniteDifference,
}

impl Provenance {
    pub fn combine(self, other: Provenance) -> Provenance {
        if self == Provenance::Analytic && other == Provenance::Analytic {
            Provenance::Analytic
        } else {
            Provenance::FiniteDifference
        }
    }
}

pub trait ScalarField: Send + Sync {
    fn value(&self, x: &[f64]) -> f64;
    /// Coordinate partials d_i f.
    fn gradient(&self, x: &[f64]) -> DVector<f64>;
    /// Coordinate second partials d_i d_j f (not the covariant Hessian).
    fn hessian(&self, x: &[f64]) -> DMatrix<f64>;
    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
}

pub trait MetricField: Send + Sync {
    fn chart(&self) -> &Chart;
    fn components(&self, x: &[f64]) -> DMatrix<f64>;
    /// (k, i, j) = d_k g_ij.
    fn first_derivatives(&self, x: &[f64]) -> Tensor3;
    /// (l, k, i, j) = d_l d_k g_ij.
    fn second_derivatives(&self, x: &[f64]) -> Tensor4;
    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
}

/// Symmetric rank-2 tensor field with a first-derivative oracle; the
/// variance is fixed per field (extrinsic curvatures are covariant, the
/// momentum combination K^{ij} - tr K g^{ij} is contravariant).
pub trait SymTensor2Field: Send + Sync {
    fn components(&self, x: &[f64]) -> DMatrix<f64>;
    fn first_derivatives(&self, x: &[f64]) -> Tensor3;
    fn variance(&self) -> crate::tensor::Variance;
    fn provenance(&self) -> Provenance {
        Provenance::Analytic
    }
}

pub type MetricRef = Arc<dyn MetricField>;
pub type ScalarRef = Arc<dyn ScalarField>;
pub type SymTensorRef = Arc<dyn SymTensor2Field>;

/// Identically zero symmetric tensor field, the stand-in for absent
/// extrinsic curvature (time-symmetric data).
pub struct ZeroSymTensor2 {
    pub dim: usize,
}

impl SymTensor2Field for ZeroSymTensor2 {
    fn components(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(self.dim, self.dim)
    }

    fn first_derivatives(&self, _x: &[f64]) -> Tensor3 {
        Tensor3::zeros(self.dim)
    }

    fn variance(&self) -> crate::tensor::Variance {
        crate::tensor::Variance::Covariant
    }
}

/// Scalar field rescaled by a constant, used to fold the exponent weight
/// beta into a conformal factor without re-deriving anything.
pub struct ScaledScalar {
    pub base: ScalarRef,
    pub scale: f64,
}

impl ScalarField for ScaledScalar {
    fn value(&self, x: &[f64]) -> f64 {
        self.scale * self.base.value(x)
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        self.base.gradient(x) * self.scale
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        self.base.hessian(x) * self.scale
    }

    fn provenance(&self) -> Provenance {
        self.base.provenance()
    }
}

/// Identically zero scalar field.
pub struct ZeroScalar;

impl ScalarField for ZeroScalar {
    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        DVector::zeros(x.len())
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), x.len())
    }
}

/// Value-only scalar oracle wrapped in finite-difference derivatives.
pub struct FdScalar<F: Fn(&[f64]) -> f64 + Send + Sync> {
    pub chart: Chart,
    pub f: F,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> ScalarField for FdScalar<F> {
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let h = self.chart.fd_step(x);
        fd::gradient(&self.chart, &self.f, x, h).expect("fd gradient stencil outside domain")
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let h = self.chart.fd_step(x);
        fd::hessian(&self.chart, &self.f, x, h).expect("fd hessian stencil outside domain")
    }

    fn provenance(&self) -> Provenance {
        Provenance::FiniteDifference
    }
}

/// Value-only metric oracle wrapped in finite-difference derivatives.
pub struct FdMetric<F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync> {
    pub chart: Chart,
    pub f: F,
}

impl<F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync> MetricField for FdMetric<F> {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        (self.f)(x)
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let h = self.chart.fd_step(x);
        fd::matrix_partials(&self.chart, &self.f, x, h).expect("fd metric stencil outside domain")
    }

    fn second_derivatives(&self, x: &[f64]) -> Tensor4 {
        let h = self.chart.fd_step(x);
        fd::matrix_second_partials(&self.chart, &self.f, x, h)
            .expect("fd metric stencil outside domain")
    }

    fn provenance(&self) -> Provenance {
        Provenance::FiniteDifference
    }
}

/// Value-only symmetric tensor oracle wrapped in finite differences. The
/// contracted-divergence consistency checks build these around curvature
/// output.
pub struct FdSymTensor2<F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync> {
    pub chart: Chart,
    pub f: F,
    pub variance: crate::tensor::Variance,
}

impl<F: Fn(&[f64]) -> DMatrix<f64> + Send + Sync> SymTensor2Field for FdSymTensor2<F> {
    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        (self.f)(x)
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let h = self.chart.fd_step(x);
        fd::matrix_partials(&self.chart, &self.f, x, h).expect("fd tensor stencil outside domain")
    }

    fn variance(&self) -> crate::tensor::Variance {
        self.variance
    }

    fn provenance(&self) -> Provenance {
        Provenance::FiniteDifference
    }
}

/// Pullback of a metric under a rigid rotation of cartesian end coordinates:
/// g'(x) = R^T g(Rx) R. Energy integrals must not notice.
pub struct RotatedMetric {
    pub base: MetricRef,
    pub rotation: DMatrix<f64>,
}

impl RotatedMetric {
    fn map(&self, x: &[f64]) -> Vec<f64> {
        let v = &self.rotation * DVector::from_column_slice(x);
        v.iter().copied().collect()
    }
}

impl MetricField for RotatedMetric {
    fn chart(&self) -> &Chart {
        self.base.chart()
    }

    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        let y = self.map(x);
        self.rotation.transpose() * self.base.components(&y) * &self.rotation
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let y = self.map(x);
        let d = self.base.first_derivatives(&y);
        let n = d.dim();
        let r = &self.rotation;
        let mut out = Tensor3::zeros(n);
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for p in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                acc += r[(p, m)] * d.get(p, k, l) * r[(k, i)] * r[(l, j)];
                            }
                        }
                    }
                    out.set(m, i, j, acc);
                }
            }
        }
        out
    }

    fn second_derivatives(&self, x: &[f64]) -> Tensor4 {
        let y = self.map(x);
        let dd = self.base.second_derivatives(&y);
        let n = dd.dim();
        let r = &self.rotation;
        let mut out = Tensor4::zeros(n);
        for a in 0..n {
            for b in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = 0.0;
                        for p in 0..n {
                            for q in 0..n {
                                for k in 0..n {
                                    for l in 0..n {
                                        acc += r[(p, a)] * r[(q, b)] * dd.get(p, q, k, l) * r[(k, i)] * r[(l, j)];
                                    }
                                }
                            }
                        }
                        out.set(a, b, i, j, acc);
                    }
                }
            }
        }
        out
    }

    fn provenance(&self) -> Provenance {
        self.base.provenance()
    }
}

/// Same pullback for a covariant symmetric tensor field.
pub struct RotatedSymTensor2 {
    pub base: SymTensorRef,
    pub rotation: DMatrix<f64>,
}

impl SymTensor2Field for RotatedSymTensor2 {
    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        let y = &self.rotation * DVector::from_column_slice(x);
        let y: Vec<f64> = y.iter().copied().collect();
        self.rotation.transpose() * self.base.components(&y) * &self.rotation
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let y = &self.rotation * DVector::from_column_slice(x);
        let y: Vec<f64> = y.iter().copied().collect();
        let d = self.base.first_derivatives(&y);
        let n = d.dim();
        let r = &self.rotation;
        let mut out = Tensor3::zeros(n);
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for p in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                acc += r[(p, m)] * d.get(p, k, l) * r[(k, i)] * r[(l, j)];
                            }
                        }
                    }
                    out.set(m, i, j, acc);
                }
            }
        }
        out
    }

    fn variance(&self) -> crate::tensor::Variance {
        self.base.variance()
    }

    fn provenance(&self) -> Provenance {
        self.base.provenance()
    }
}
