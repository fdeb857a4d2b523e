//! Conformal deformations g -> e^{2 beta f} g and the transformation laws
//! they induce on connection coefficients, curvature, constraint densities,
//! and boundary mean curvature. Each law here is an independent evaluator:
//! the verification suites compare it against direct recomputation on the
//! deformed metric.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::curvature::{self, CurvatureData};
use crate::error::{Error, Result};
use crate::field::{
    MetricField, MetricRef, Provenance, ScalarField, ScalarRef, ScaledScalar, SymTensor2Field,
    SymTensorRef,
};
use crate::tensor::{Tensor3, Tensor4};

/// e^{2 psi} g for a scalar exponent field psi, with derivatives by the
/// chain rule on E = e^{2 psi}:
///   d_k E = 2 psi_k E,   d_l d_k E = (2 psi_lk + 4 psi_l psi_k) E.
pub struct ScaledMetric {
    pub base: MetricRef,
    pub psi: ScalarRef,
}

impl MetricField for ScaledMetric {
    fn chart(&self) -> &crate::chart::Chart {
        self.base.chart()
    }

    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        let e = (2.0 * self.psi.value(x)).exp();
        self.base.components(x) * e
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let n = self.base.chart().dim();
        let e = (2.0 * self.psi.value(x)).exp();
        let grad = self.psi.gradient(x);
        let g = self.base.components(x);
        let dg = self.base.first_derivatives(x);
        let mut out = Tensor3::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.set(k, i, j, e * (2.0 * grad[k] * g[(i, j)] + dg.get(k, i, j)));
                }
            }
        }
        out
    }

    fn second_derivatives(&self, x: &[f64]) -> Tensor4 {
        let n = self.base.chart().dim();
        let e = (2.0 * self.psi.value(x)).exp();
        let grad = self.psi.gradient(x);
        let hess = self.psi.hessian(x);
        let g = self.base.components(x);
        let dg = self.base.first_derivatives(x);
        let ddg = self.base.second_derivatives(x);
        let mut out = Tensor4::zeros(n);
        for l in 0..n {
            for k in 0..n {
                let ee = 2.0 * hess[(l, k)] + 4.0 * grad[l] * grad[k];
                for i in 0..n {
                    for j in 0..n {
                        let v = ee * g[(i, j)]
                            + 2.0 * grad[k] * dg.get(l, i, j)
                            + 2.0 * grad[l] * dg.get(k, i, j)
                            + ddg.get(l, k, i, j);
                        out.set(l, k, i, j, e * v);
                    }
                }
            }
        }
        out
    }

    fn provenance(&self) -> Provenance {
        self.base.provenance().combine(self.psi.provenance())
    }
}

/// e^{psi} K for a covariant symmetric tensor K.
pub struct ScaledSymTensor2 {
    pub base: SymTensorRef,
    pub psi: ScalarRef,
}

impl SymTensor2Field for ScaledSymTensor2 {
    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        self.base.components(x) * self.psi.value(x).exp()
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let n = self.base.components(x).nrows();
        let e = self.psi.value(x).exp();
        let grad = self.psi.gradient(x);
        let k = self.base.components(x);
        let dk = self.base.first_derivatives(x);
        let mut out = Tensor3::zeros(n);
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out.set(m, i, j, e * (grad[m] * k[(i, j)] + dk.get(m, i, j)));
                }
            }
        }
        out
    }

    fn variance(&self) -> crate::tensor::Variance {
        self.base.variance()
    }

    fn provenance(&self) -> Provenance {
        self.base.provenance().combine(self.psi.provenance())
    }
}

/// A conformal deformation with exponent weight beta in (0, 1]:
/// the deformed metric is e^{2 beta f} g and the comparison metric at full
/// weight is e^{2 f} g.
pub struct Deformation {
    pub base: MetricRef,
    pub factor: ScalarRef,
    pub beta: f64,
}

impl Deformation {
    pub fn new(base: MetricRef, factor: ScalarRef, beta: f64) -> Result<Self> {
        if !(beta > 0.0 && beta <= 1.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                name: "conformal.beta".into(),
                reason: format!("must lie in (0, 1], got {beta}"),
            });
        }
        Ok(Deformation { base, factor, beta })
    }

    fn scaled_factor(&self, scale: f64) -> ScalarRef {
        Arc::new(ScaledScalar {
            base: self.factor.clone(),
            scale,
        })
    }

    /// e^{2 beta f} g
    pub fn deformed_metric(&self) -> MetricRef {
        Arc::new(ScaledMetric {
            base: self.base.clone(),
            psi: self.scaled_factor(self.beta),
        })
    }

    /// e^{2 f} g
    pub fn unit_metric(&self) -> MetricRef {
        Arc::new(ScaledMetric {
            base: self.base.clone(),
            psi: self.scaled_factor(1.0),
        })
    }

    /// e^{beta f} K
    pub fn deformed_extrinsic(&self, k: &SymTensorRef) -> SymTensorRef {
        Arc::new(ScaledSymTensor2 {
            base: k.clone(),
            psi: self.scaled_factor(self.beta),
        })
    }

    /// e^{f} K
    pub fn unit_extrinsic(&self, k: &SymTensorRef) -> SymTensorRef {
        Arc::new(ScaledSymTensor2 {
            base: k.clone(),
            psi: self.scaled_factor(1.0),
        })
    }
}

/// Everything the transformation laws need about the factor at one point,
/// measured against the base metric.
pub struct FactorData {
    pub value: f64,
    /// Coordinate partials f_i.
    pub grad: DVector<f64>,
    /// Covariant Hessian f_;ij in the base metric.
    pub cov_hess: DMatrix<f64>,
    pub laplacian: f64,
    /// |df|^2 in the base metric.
    pub grad_norm2: f64,
}

pub fn factor_data(base: &CurvatureData, f: &dyn ScalarField, x: &[f64]) -> FactorData {
    let grad = f.gradient(x);
    let hess = f.hessian(x);
    let (cov_hess, laplacian) =
        curvature::hessian_laplacian(&base.point, &base.gamma, &grad, &hess);
    let up = &base.point.inverse * &grad;
    let grad_norm2 = grad.dot(&up);
    FactorData {
        value: f.value(x),
        grad,
        cov_hess,
        laplacian,
        grad_norm2,
    }
}

/// Connection coefficients of e^{2 beta f} g from those of g:
/// Gamma^k_ij picks up beta (f_j d^k_i + f_i d^k_j - f_l g^kl g_ij).
pub fn christoffel_deformed(base: &CurvatureData, fd: &FactorData, beta: f64) -> Tensor3 {
    let n = base.point.dim();
    let g = &base.point.components;
    let grad_up = &base.point.inverse * &fd.grad;
    let mut out = base.gamma.clone();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut shift = -grad_up[k] * g[(i, j)];
                if k == i {
                    shift += fd.grad[j];
                }
                if k == j {
                    shift += fd.grad[i];
                }
                out.add(k, i, j, beta * shift);
            }
        }
    }
    out
}

/// Ricci tensor of e^{2 beta f} g from base data:
/// Ric - g Lap(bf) + (2-n) Hess(bf) + (2-n)|d(bf)|^2 g + (n-2) d(bf) x d(bf),
/// with bf = beta f and all pieces in the base metric.
pub fn ricci_deformed(base: &CurvatureData, fd: &FactorData, beta: f64) -> DMatrix<f64> {
    let n = base.point.dim();
    let nf = n as f64;
    let g = &base.point.components;
    let mut out = base.ricci.clone();
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] += -g[(i, j)] * beta * fd.laplacian
                + (2.0 - nf) * beta * fd.cov_hess[(i, j)]
                + (2.0 - nf) * beta * beta * fd.grad_norm2 * g[(i, j)]
                + (nf - 2.0) * beta * beta * fd.grad[i] * fd.grad[j];
        }
    }
    out
}

/// Scalar curvature of e^{2 beta f} g:
/// e^{-2 beta f} (S - 2(n-1) beta Lap f - (n-1)(n-2) beta^2 |df|^2).
pub fn scalar_deformed(base: &CurvatureData, fd: &FactorData, beta: f64) -> f64 {
    let nf = base.point.dim() as f64;
    (-2.0 * beta * fd.value).exp()
        * (base.scalar
            - 2.0 * (nf - 1.0) * beta * fd.laplacian
            - (nf - 1.0) * (nf - 2.0) * beta * beta * fd.grad_norm2)
}

/// Scalar curvature of the deformed metric as a convex mix of the endpoint
/// scalars, eliminating Lap f:
/// e^{2 beta f} S_bar = (1-b) S + b e^{2f} S_tilde + b(1-b)(n-1)(n-2)|df|^2.
pub fn scalar_convex_mix(
    scalar_base: f64,
    scalar_unit: f64,
    fd: &FactorData,
    beta: f64,
    n: usize,
) -> f64 {
    let nf = n as f64;
    (-2.0 * beta * fd.value).exp()
        * ((1.0 - beta) * scalar_base
            + beta * (2.0 * fd.value).exp() * scalar_unit
            + beta * (1.0 - beta) * (nf - 1.0) * (nf - 2.0) * fd.grad_norm2)
}

/// Energy density of the deformed data (e^{2 beta f} g, e^{beta f} K):
/// 2 mu_bar = e^{-2 beta f} (2 mu - 2(n-1) beta Lap f - (n-1)(n-2) beta^2 |df|^2).
pub fn mu_deformed(mu: f64, fd: &FactorData, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    0.5 * (-2.0 * beta * fd.value).exp()
        * (2.0 * mu
            - 2.0 * (nf - 1.0) * beta * fd.laplacian
            - (nf - 1.0) * (nf - 2.0) * beta * beta * fd.grad_norm2)
}

/// Momentum density of the deformed data:
/// J_bar^i = e^{-3 beta f} (J^i + beta (n-1) f_j K^ij),
/// with K^ij the contravariant base extrinsic curvature.
pub fn j_deformed(
    j: &DVector<f64>,
    k_up: &DMatrix<f64>,
    fd: &FactorData,
    beta: f64,
    n: usize,
) -> DVector<f64> {
    let nf = n as f64;
    let scale = (-3.0 * beta * fd.value).exp();
    (j + k_up * &fd.grad * (beta * (nf - 1.0))) * scale
}

/// Energy density as a convex mix of the endpoint densities:
/// mu_bar = e^{-2bf} ((1-b) mu + b e^{2f} mu_tilde
///          + (b(1-b)/2)(n-1)(n-2)|df|^2).
pub fn mu_convex_mix(mu: f64, mu_unit: f64, fd: &FactorData, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    (-2.0 * beta * fd.value).exp()
        * ((1.0 - beta) * mu
            + beta * (2.0 * fd.value).exp() * mu_unit
            + 0.5 * beta * (1.0 - beta) * (nf - 1.0) * (nf - 2.0) * fd.grad_norm2)
}

/// Momentum density as a convex mix:
/// e^{3bf} J_bar^i = (1-b) J^i + b e^{3f} J_tilde^i.
pub fn j_convex_mix(
    j: &DVector<f64>,
    j_unit: &DVector<f64>,
    fd: &FactorData,
    beta: f64,
) -> DVector<f64> {
    let scale = (-3.0 * beta * fd.value).exp();
    (j * (1.0 - beta) + j_unit * (beta * (3.0 * fd.value).exp())) * scale
}

/// G = Ric - (S + (n-1)(n-2)) g / 2, the Einstein-type tensor whose decay
/// controls the hyperbolic mass.
pub fn einstein_tensor(data: &CurvatureData) -> DMatrix<f64> {
    let n = data.point.dim();
    let nf = n as f64;
    let g = &data.point.components;
    let mut out = data.ricci.clone();
    let c = 0.5 * (data.scalar + (nf - 1.0) * (nf - 2.0));
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] -= c * g[(i, j)];
        }
    }
    out
}

/// The deformed Einstein-type tensor as a mix of the endpoint tensors plus
/// explicit correction terms in the base metric:
///
/// G_bar = (1-b) G + b G_tilde
///       + [(1-b) + b e^{2f} - e^{2bf}] (n-1)(n-2) g / 2
///       + b(b-1)(n-2)(n-3) |df|^2 g / 2
///       + b(b-1)(n-2) df x df.
pub fn einstein_mix(
    g: &DMatrix<f64>,
    einstein_base: &DMatrix<f64>,
    einstein_unit: &DMatrix<f64>,
    fd: &FactorData,
    beta: f64,
    n: usize,
) -> DMatrix<f64> {
    let nf = n as f64;
    let b = beta;
    let c_metric = 0.5
        * ((1.0 - b) + b * (2.0 * fd.value).exp() - (2.0 * b * fd.value).exp())
        * (nf - 1.0)
        * (nf - 2.0)
        + 0.5 * b * (b - 1.0) * (nf - 2.0) * (nf - 3.0) * fd.grad_norm2;
    let c_grad = b * (b - 1.0) * (nf - 2.0);
    let mut out = einstein_base * (1.0 - b) + einstein_unit * b;
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] += c_metric * g[(i, j)] + c_grad * fd.grad[i] * fd.grad[j];
        }
    }
    out
}

/// Mean curvature of a fixed hypersurface under deformation:
/// H_bar = e^{-beta f} (H + beta (n-1) f_nu), f_nu the normal derivative
/// in the base metric with the matching orientation.
pub fn mean_curvature_deformed(h: f64, f_value: f64, f_nu: f64, beta: f64, n: usize) -> f64 {
    let nf = n as f64;
    (-beta * f_value).exp() * (h + beta * (nf - 1.0) * f_nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::curvature::{constraint_densities, curvature_at};
    use crate::field::{FdSymTensor2, MetricField, ScalarField};
    use crate::tensor::Variance;
    use approx::assert_abs_diff_eq;
    use nalgebra::{DMatrix, DVector};
    use std::sync::Arc;

    struct FlatMetric3;

    impl MetricField for FlatMetric3 {
        fn chart(&self) -> &Chart {
            use std::sync::OnceLock;
            static CHART: OnceLock<Chart> = OnceLock::new();
            CHART.get_or_init(|| Chart::cartesian_end(3, 0.2).unwrap())
        }
        fn components(&self, _x: &[f64]) -> DMatrix<f64> {
            DMatrix::identity(3, 3)
        }
        fn first_derivatives(&self, _x: &[f64]) -> Tensor3 {
            Tensor3::zeros(3)
        }
        fn second_derivatives(&self, _x: &[f64]) -> Tensor4 {
            Tensor4::zeros(3)
        }
    }

    /// f = a / r with closed-form derivatives.
    struct InverseRadius {
        a: f64,
    }

    impl ScalarField for InverseRadius {
        fn value(&self, x: &[f64]) -> f64 {
            self.a / norm(x)
        }
        fn gradient(&self, x: &[f64]) -> DVector<f64> {
            let r = norm(x);
            DVector::from_iterator(x.len(), x.iter().map(|&xi| -self.a * xi / (r * r * r)))
        }
        fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
            let n = x.len();
            let r = norm(x);
            let mut h = DMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    let mut v = 3.0 * self.a * x[i] * x[j] / r.powi(5);
                    if i == j {
                        v -= self.a / (r * r * r);
                    }
                    h[(i, j)] = v;
                }
            }
            h
        }
    }

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    #[test]
    fn inverse_radius_factor_is_harmonic() {
        let base = curvature_at(&FlatMetric3, &[1.0, 2.0, 2.0]).unwrap();
        let f = InverseRadius { a: 0.7 };
        let fd = factor_data(&base, &f, &[1.0, 2.0, 2.0]);
        assert_abs_diff_eq!(fd.laplacian, 0.0, epsilon = 1e-12);
        // |df|^2 = a^2 / r^4 at r = 3
        assert_abs_diff_eq!(fd.grad_norm2, 0.49 / 81.0, epsilon = 1e-12);
    }

    #[test]
    fn scalar_curvature_of_conformally_flat_metric() {
        // e^{2 a / r} delta has S = -2 e^{-2a/r} a^2 / r^4 in dimension 3
        let a = 0.4;
        let x = [0.5, -1.0, 1.2];
        let r = norm(&x);
        let base = curvature_at(&FlatMetric3, &x).unwrap();
        let f = InverseRadius { a };
        let fd = factor_data(&base, &f, &x);
        let expect = -2.0 * (-2.0 * a / r).exp() * a * a / r.powi(4);
        assert_abs_diff_eq!(scalar_deformed(&base, &fd, 1.0), expect, epsilon = 1e-12);

        // and the direct recomputation on the scaled metric agrees
        let scaled = ScaledMetric {
            base: Arc::new(FlatMetric3),
            psi: Arc::new(InverseRadius { a }),
        };
        let direct = curvature_at(&scaled, &x).unwrap();
        assert_abs_diff_eq!(direct.scalar, expect, epsilon = 1e-10);
    }

    #[test]
    fn ricci_formula_matches_direct_computation() {
        let x = [0.8, 0.3, -1.1];
        let beta = 0.6;
        let f = Arc::new(InverseRadius { a: 0.25 });
        let deform = Deformation::new(Arc::new(FlatMetric3), f.clone(), beta).unwrap();
        let base = curvature_at(&FlatMetric3, &x).unwrap();
        let fd = factor_data(&base, f.as_ref(), &x);

        let formula = ricci_deformed(&base, &fd, beta);
        let direct = curvature_at(deform.deformed_metric().as_ref(), &x).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(direct.ricci[(i, j)], formula[(i, j)], epsilon = 1e-9);
            }
        }

        let gamma_formula = christoffel_deformed(&base, &fd, beta);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    assert_abs_diff_eq!(
                        direct.gamma.get(k, i, j),
                        gamma_formula.get(k, i, j),
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn constraint_transform_matches_direct_computation() {
        // polynomial extrinsic curvature: fourth-order stencils are exact
        let chart = Chart::cartesian_end(3, 0.2).unwrap();
        let k: SymTensorRef = Arc::new(FdSymTensor2 {
            chart: chart.clone(),
            f: |x: &[f64]| {
                let mut m = DMatrix::zeros(3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] = x[i] * x[j];
                    }
                    m[(i, i)] += 1.0;
                }
                m
            },
            variance: Variance::Covariant,
        });
        let f: ScalarRef = Arc::new(InverseRadius { a: 0.3 });
        let beta = 0.75;
        let x = [1.1, -0.4, 0.9];

        let deform = Deformation::new(Arc::new(FlatMetric3), f.clone(), beta).unwrap();
        let base = curvature_at(&FlatMetric3, &x).unwrap();
        let fd = factor_data(&base, f.as_ref(), &x);
        let cd = constraint_densities(&base, k.as_ref(), &x).unwrap();

        // formula side
        let k_mat = k.components(&x);
        let k_up = &base.point.inverse * &k_mat * &base.point.inverse;
        let mu_formula = mu_deformed(cd.mu, &fd, beta, 3);
        let j_formula = j_deformed(&cd.j, &k_up, &fd, beta, 3);

        // direct side
        let gbar = deform.deformed_metric();
        let kbar = deform.deformed_extrinsic(&k);
        let dbar = curvature_at(gbar.as_ref(), &x).unwrap();
        let cbar = constraint_densities(&dbar, kbar.as_ref(), &x).unwrap();

        assert_abs_diff_eq!(cbar.mu, mu_formula, epsilon = 1e-9);
        for i in 0..3 {
            assert_abs_diff_eq!(cbar.j[i], j_formula[i], epsilon = 1e-9);
        }
    }

    #[test]
    fn convex_mixes_agree_with_weighted_endpoints() {
        let k: SymTensorRef = Arc::new(FdSymTensor2 {
            chart: Chart::cartesian_end(3, 0.2).unwrap(),
            f: |x: &[f64]| {
                let mut m = DMatrix::zeros(3, 3);
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] = 0.5 * x[i] * x[j];
                    }
                }
                m
            },
            variance: Variance::Covariant,
        });
        let f: ScalarRef = Arc::new(InverseRadius { a: 0.5 });
        let beta = 0.25;
        let x = [0.9, 1.4, -0.3];

        let deform = Deformation::new(Arc::new(FlatMetric3), f.clone(), beta).unwrap();
        let base = curvature_at(&FlatMetric3, &x).unwrap();
        let fd = factor_data(&base, f.as_ref(), &x);
        let cd = constraint_densities(&base, k.as_ref(), &x).unwrap();

        let unit = deform.unit_metric();
        let kunit = deform.unit_extrinsic(&k);
        let dunit = curvature_at(unit.as_ref(), &x).unwrap();
        let cunit = constraint_densities(&dunit, kunit.as_ref(), &x).unwrap();

        let gbar = deform.deformed_metric();
        let kbar = deform.deformed_extrinsic(&k);
        let dbar = curvature_at(gbar.as_ref(), &x).unwrap();
        let cbar = constraint_densities(&dbar, kbar.as_ref(), &x).unwrap();

        let mu_mix = mu_convex_mix(cd.mu, cunit.mu, &fd, beta, 3);
        assert_abs_diff_eq!(cbar.mu, mu_mix, epsilon = 1e-9);

        let j_mix = j_convex_mix(&cd.j, &cunit.j, &fd, beta);
        for i in 0..3 {
            assert_abs_diff_eq!(cbar.j[i], j_mix[i], epsilon = 1e-9);
        }

        let s_mix = scalar_convex_mix(base.scalar, dunit.scalar, &fd, beta, 3);
        assert_abs_diff_eq!(dbar.scalar, s_mix, epsilon = 1e-9);
    }
}
