//! Randomized structural checks: index round trips, rotation equivariance,
//! finite-difference adapters against closed-form derivatives, quadrature
//! exactness, and the algebra of stacked conformal deformations.

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use std::sync::Arc;

use confmass::chart::Chart;
use confmass::conformal::{self, Deformation};
use confmass::curvature::curvature_at;
use confmass::families;
use confmass::field::{
    FdMetric, FdScalar, MetricField, RotatedMetric, RotatedSymTensor2, ScalarField,
    SymTensor2Field,
};
use confmass::numeric::scaled_residual;
use confmass::quad::{gauss_legendre, sphere_area, SphereRule};
use confmass::tensor::{MetricPoint, SymTensor2, TangentVector, Variance};

/// A point on a cartesian end, radius in [2, 18], direction bounded away
/// from degenerate by rejection.
fn end_point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    let dirs = prop::collection::vec(-1.0f64..1.0, dim);
    (2.0f64..18.0, dirs).prop_filter_map("direction too short", |(r, d)| {
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 0.3 {
            return None;
        }
        Some(d.iter().map(|v| r * v / norm).collect())
    })
}

/// Proper rotation assembled from Givens rotations in every coordinate
/// plane; orthogonal with determinant one in any dimension.
fn rotation(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
    let pairs = dim * (dim - 1) / 2;
    prop::collection::vec(0.0f64..std::f64::consts::TAU, pairs).prop_map(move |angles| {
        let mut r = DMatrix::identity(dim, dim);
        let mut t = angles.into_iter();
        for i in 0..dim {
            for j in (i + 1)..dim {
                let a = t.next().unwrap();
                let mut g = DMatrix::identity(dim, dim);
                g[(i, i)] = a.cos();
                g[(j, j)] = a.cos();
                g[(i, j)] = -a.sin();
                g[(j, i)] = a.sin();
                r = g * r;
            }
        }
        r
    })
}

fn symmetric(dim: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-2.0f64..2.0, dim * dim).prop_map(move |v| {
        let m = DMatrix::from_vec(dim, dim, v);
        (&m + m.transpose()) / 2.0
    })
}

fn matrix_residual(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| scaled_residual(*x, *y))
        .fold(0.0, f64::max)
}

proptest! {
    /// Raising and lowering with the same metric point is the identity on
    /// tensors and vectors, and leaves the metric trace unchanged.
    #[test]
    fn raise_then_lower_round_trips(x in end_point(3), sym in symmetric(3)) {
        let g = families::make_geometry("schwarzschild_isotropic", &[1.0], 3).unwrap();
        let mp = MetricPoint::new(g.metric.components(&x), &x).unwrap();

        let t = SymTensor2::new(sym.clone(), Variance::Covariant);
        let up = mp.raise_tensor(&t).unwrap();
        let back = mp.lower_tensor(&up).unwrap();
        prop_assert!(matrix_residual(&back.components, &t.components) < 1e-11);
        prop_assert!(scaled_residual(mp.trace(&up), mp.trace(&t)) < 1e-11);
        prop_assert!(
            scaled_residual(mp.norm_tensor(&up).unwrap(), mp.norm_tensor(&t).unwrap()) < 1e-11
        );

        let v = TangentVector::new(DVector::from_column_slice(&x), Variance::Contravariant);
        let down = mp.lower_vector(&v).unwrap();
        let vb = mp.raise_vector(&down).unwrap();
        for i in 0..3 {
            prop_assert!(scaled_residual(vb.components[i], v.components[i]) < 1e-11);
        }
        prop_assert!(
            scaled_residual(mp.norm_vector(&down).unwrap(), mp.norm_vector(&v).unwrap()) < 1e-11
        );
    }

    /// Pulling a metric back by a rigid rotation moves curvature by the same
    /// rotation: scalars transport, the Ricci tensor conjugates.
    #[test]
    fn curvature_is_rotation_equivariant(x in end_point(3), r in rotation(3)) {
        let g = families::make_geometry("conformally_flat", &[0.3, 1.0], 3).unwrap();
        let rotated = RotatedMetric { base: g.metric.clone(), rotation: r.clone() };

        let y: Vec<f64> = (&r * DVector::from_column_slice(&x)).iter().copied().collect();
        let here = curvature_at(&rotated, &x).unwrap();
        let there = curvature_at(g.metric.as_ref(), &y).unwrap();

        prop_assert!(scaled_residual(here.scalar, there.scalar) < 1e-9);
        let conjugated = r.transpose() * &there.ricci * &r;
        prop_assert!(matrix_residual(&here.ricci, &conjugated) < 1e-9);
    }

    /// Metric norms of extrinsic curvature are chart-independent: rotating
    /// the whole configuration leaves |K|_g and tr_g K alone.
    #[test]
    fn tensor_invariants_ignore_rotation(x in end_point(3), r in rotation(3)) {
        let (g, k) = families::momentum_seed([0.1, -0.2, 0.3]).unwrap();
        let rg = RotatedMetric { base: g.clone(), rotation: r.clone() };
        let rk = RotatedSymTensor2 { base: k.clone(), rotation: r.clone() };

        let y: Vec<f64> = (&r * DVector::from_column_slice(&x)).iter().copied().collect();
        let mp = MetricPoint::new(g.components(&y), &y).unwrap();
        let rmp = MetricPoint::new(rg.components(&x), &x).unwrap();
        let t = SymTensor2::new(k.components(&y), k.variance());
        let rt = SymTensor2::new(rk.components(&x), rk.variance());

        prop_assert!(
            scaled_residual(rmp.norm_tensor(&rt).unwrap(), mp.norm_tensor(&t).unwrap()) < 1e-11
        );
        prop_assert!(scaled_residual(rmp.trace(&rt), mp.trace(&t)) < 1e-11);
    }

    /// The finite-difference adapters reproduce closed-form derivatives of
    /// the analytic families well inside stencil accuracy.
    #[test]
    fn fd_adapters_match_closed_forms(x in end_point(3)) {
        let chart = Chart::cartesian_end(3, 0.05).unwrap();
        let (f, _) = families::make_factor("af_factor", &[0.2, 1.0], 3).unwrap();
        let fc = f.clone();
        let wrapped = FdScalar { chart: chart.clone(), f: move |p: &[f64]| fc.value(p) };
        let grad = wrapped.gradient(&x);
        let hess = wrapped.hessian(&x);
        let (eg, eh) = (f.gradient(&x), f.hessian(&x));
        for i in 0..3 {
            prop_assert!(scaled_residual(grad[i], eg[i]) < 1e-8);
        }
        prop_assert!(matrix_residual(&hess, &eh) < 1e-8);

        let g = families::make_geometry("schwarzschild_isotropic", &[1.0], 3).unwrap();
        let gm = g.metric.clone();
        let wrapped = FdMetric { chart, f: move |p: &[f64]| gm.components(p) };
        let dg = wrapped.first_derivatives(&x);
        let ddg = wrapped.second_derivatives(&x);
        let (edg, eddg) = (g.metric.first_derivatives(&x), g.metric.second_derivatives(&x));
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!(scaled_residual(dg.get(k, i, j), edg.get(k, i, j)) < 1e-8);
                    for m in 0..3 {
                        prop_assert!(
                            scaled_residual(ddg.get(m, k, i, j), eddg.get(m, k, i, j)) < 1e-7
                        );
                    }
                }
            }
        }
    }

    /// Two stacked deformations by the same profile multiply out to a single
    /// one with the exponents added, including all derivative stacks.
    #[test]
    fn deformations_compose_by_adding_exponents(
        x in end_point(3),
        b1 in 0.05f64..0.5,
        b2 in 0.05f64..0.5,
    ) {
        let g = families::make_geometry("flat", &[], 3).unwrap();
        let (f, _) = families::make_factor("af_factor", &[0.2, 1.0], 3).unwrap();
        let first = Deformation::new(g.metric.clone(), f.clone(), b1).unwrap();
        let second = Deformation::new(first.deformed_metric(), f.clone(), b2).unwrap();
        let direct = Deformation::new(g.metric, f, b1 + b2).unwrap();

        let (a, b) = (second.deformed_metric(), direct.deformed_metric());
        prop_assert!(matrix_residual(&a.components(&x), &b.components(&x)) < 1e-12);
        let (da, db) = (a.first_derivatives(&x), b.first_derivatives(&x));
        let (dda, ddb) = (a.second_derivatives(&x), b.second_derivatives(&x));
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert!(scaled_residual(da.get(k, i, j), db.get(k, i, j)) < 1e-12);
                    for m in 0..3 {
                        prop_assert!(
                            scaled_residual(dda.get(m, k, i, j), ddb.get(m, k, i, j)) < 1e-12
                        );
                    }
                }
            }
        }
    }

    /// Exponent zero deforms nothing: the transformed Christoffel symbols
    /// and curvatures coincide with the base ones identically.
    #[test]
    fn zero_exponent_is_the_identity_deformation(x in end_point(3)) {
        let g = families::make_geometry("conformally_flat", &[0.5, 1.0], 3).unwrap();
        let (f, _) = families::make_factor("af_factor", &[0.2, 1.0], 3).unwrap();
        let base = curvature_at(g.metric.as_ref(), &x).unwrap();
        let fd = conformal::factor_data(&base, f.as_ref(), &x);

        prop_assert_eq!(conformal::scalar_deformed(&base, &fd, 0.0), base.scalar);
        let gamma = conformal::christoffel_deformed(&base, &fd, 0.0);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    prop_assert_eq!(gamma.get(k, i, j), base.gamma.get(k, i, j));
                }
            }
        }
        let ricci = conformal::ricci_deformed(&base, &fd, 0.0);
        prop_assert!(matrix_residual(&ricci, &base.ricci) < 1e-15);
    }

    /// An order-n Gauss-Legendre rule integrates every polynomial of degree
    /// at most 2n - 1 exactly on [-1, 1].
    #[test]
    fn gauss_rule_is_exact_on_low_degrees(
        order in 2usize..12,
        coeffs in prop::collection::vec(-3.0f64..3.0, 24),
    ) {
        let (nodes, weights) = gauss_legendre(order);
        let degree = 2 * order - 1;
        let quad: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| {
                w * coeffs[..=degree]
                    .iter()
                    .rev()
                    .fold(0.0, |acc, c| acc * x + c)
            })
            .sum();
        let exact: f64 = coeffs[..=degree]
            .iter()
            .enumerate()
            .filter(|(k, _)| k % 2 == 0)
            .map(|(k, c)| 2.0 * c / (k as f64 + 1.0))
            .sum();
        prop_assert!(scaled_residual(quad, exact) < 1e-12);
    }

    /// Coordinate-sphere area in the flat metric matches the closed form
    /// in both supported dimensions.
    #[test]
    fn flat_sphere_areas_match_closed_forms(radius in 0.5f64..6.0, dim in 3usize..=4) {
        let rule = SphereRule::new(dim, 16).unwrap();
        let g = families::make_geometry("flat", &[], dim).unwrap();
        let area = sphere_area(&rule, g.metric.as_ref(), radius).unwrap();
        let unit = match dim {
            3 => 4.0 * std::f64::consts::PI,
            _ => 2.0 * std::f64::consts::PI * std::f64::consts::PI,
        };
        prop_assert!(scaled_residual(area, unit * radius.powi(dim as i32 - 1)) < 1e-10);
    }
}

/// Rotating Bowen-York data leaves the energy alone and rotates the linear
/// momentum vector; checked on one fixed rotation to keep the run short.
#[test]
fn rotated_momentum_transforms_as_a_vector() {
    use confmass::adm::{adm_flux, InitialData};

    let p = [0.1, -0.2, 0.3];
    let (g, k) = families::momentum_seed(p).unwrap();
    let angle = 0.7f64;
    let mut r = DMatrix::identity(3, 3);
    r[(0, 0)] = angle.cos();
    r[(1, 1)] = angle.cos();
    r[(0, 1)] = -angle.sin();
    r[(1, 0)] = angle.sin();

    let base = InitialData::new(
        "seed".into(),
        g.clone(),
        Some(k.clone()),
        Some(1.0),
        InitialData::DEFAULT_EPSILON,
    )
    .unwrap();
    let rotated = InitialData::new(
        "rotated seed".into(),
        Arc::new(RotatedMetric { base: g, rotation: r.clone() }),
        Some(Arc::new(RotatedSymTensor2 { base: k, rotation: r.clone() })),
        Some(1.0),
        InitialData::DEFAULT_EPSILON,
    )
    .unwrap();

    let rule = SphereRule::new(3, 24).unwrap();
    let f0 = adm_flux(&base, &rule, 8.0).unwrap();
    let f1 = adm_flux(&rotated, &rule, 8.0).unwrap();
    assert!(scaled_residual(f1.energy, f0.energy) < 1e-10);

    // momentum components measured in the rotated chart are R^T p
    let expect = r.transpose() * &f0.momentum;
    for i in 0..3 {
        assert!(scaled_residual(f1.momentum[i], expect[i]) < 1e-10);
    }
}
