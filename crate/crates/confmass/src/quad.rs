//! Quadrature over coordinate spheres.
//!
//! Rules are tensor products: Gauss-Legendre in cos(theta), Gauss-Chebyshev
//! (second kind) in the extra polar angle when the ambient dimension is 4,
//! and midpoint-uniform in the azimuth, which is spectrally accurate for
//! periodic smooth integrands. Node weights carry the round unit-sphere
//! measure, so a g-flux only needs the ratio of the induced area element to
//! the round one at each node.

use nalgebra::{DMatrix, DVector};

use crate::chart::ChartKind;
use crate::error::{Error, Result};
use crate::field::MetricField;
use crate::numeric::compensated_sum;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // evaluate P_n(x) and P_n'(x)
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[n - 1 - i] = x.abs();
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[derive(Clone, Debug)]
pub struct SphereNode {
    /// Quadrature weight, including the round unit-sphere measure.
    pub weight: f64,
    /// Round measure density sqrt(det h0) in this rule's angular coordinates.
    pub round_density: f64,
    /// Angular coordinates: (theta, phi) when dim = 3, (chi, theta, phi)
    /// when dim = 4, with polar angles in (0, pi).
    pub angles: Vec<f64>,
}

pub struct SphereRule {
    pub dim: usize,
    pub order: usize,
    pub nodes: Vec<SphereNode>,
}

impl SphereRule {
    pub fn new(dim: usize, order: usize) -> Result<Self> {
        if dim != 3 && dim != 4 {
            return Err(Error::UnsupportedDimension {
                quantity: "sphere quadrature",
                found: dim,
            });
        }
        if !(2..=256).contains(&order) {
            return Err(Error::InvalidParameter {
                name: "quadrature.order".into(),
                reason: format!("must be between 2 and 256, got {order}"),
            });
        }
        let (gl_nodes, gl_weights) = gauss_legendre(order);
        let m = 2 * order;
        let dphi = 2.0 * std::f64::consts::PI / m as f64;
        let phis: Vec<f64> = (0..m).map(|j| (j as f64 + 0.5) * dphi).collect();

        let mut nodes = Vec::new();
        match dim {
            3 => {
                for (u, wu) in gl_nodes.iter().zip(&gl_weights) {
                    let theta = u.acos();
                    for phi in &phis {
                        nodes.push(SphereNode {
                            weight: wu * dphi,
                            round_density: theta.sin(),
                            angles: vec![theta, *phi],
                        });
                    }
                }
            }
            4 => {
                // chi: Gauss-Chebyshev second kind absorbs the sin^2 weight
                let nc = order;
                for k in 1..=nc {
                    let t = k as f64 * std::f64::consts::PI / (nc as f64 + 1.0);
                    let chi = t;
                    let wc = std::f64::consts::PI / (nc as f64 + 1.0) * t.sin() * t.sin();
                    for (u, wu) in gl_nodes.iter().zip(&gl_weights) {
                        let theta = u.acos();
                        for phi in &phis {
                            nodes.push(SphereNode {
                                weight: wc * wu * dphi,
                                round_density: chi.sin() * chi.sin() * theta.sin(),
                                angles: vec![chi, theta, *phi],
                            });
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok(SphereRule { dim, order, nodes })
    }

    /// Chart coordinates of a node on the coordinate sphere at `radius`.
    pub fn chart_point(&self, kind: ChartKind, radius: f64, node: &SphereNode) -> Vec<f64> {
        match kind {
            ChartKind::PolarHyperbolic => {
                let mut x = Vec::with_capacity(self.dim);
                x.push(radius);
                x.extend_from_slice(&node.angles);
                x
            }
            ChartKind::CartesianEnd => match self.dim {
                3 => {
                    let (theta, phi) = (node.angles[0], node.angles[1]);
                    vec![
                        radius * theta.sin() * phi.cos(),
                        radius * theta.sin() * phi.sin(),
                        radius * theta.cos(),
                    ]
                }
                4 => {
                    let (chi, theta, phi) = (node.angles[0], node.angles[1], node.angles[2]);
                    vec![
                        radius * chi.sin() * theta.sin() * phi.cos(),
                        radius * chi.sin() * theta.sin() * phi.sin(),
                        radius * chi.sin() * theta.cos(),
                        radius * chi.cos(),
                    ]
                }
                _ => unreachable!(),
            },
        }
    }

    /// Tangent vectors d(chart point)/d(angle), one column per angle.
    pub fn tangents(&self, kind: ChartKind, radius: f64, node: &SphereNode) -> DMatrix<f64> {
        let n = self.dim;
        match kind {
            ChartKind::PolarHyperbolic => {
                let mut t = DMatrix::zeros(n, n - 1);
                for a in 0..n - 1 {
                    t[(a + 1, a)] = 1.0;
                }
                t
            }
            ChartKind::CartesianEnd => match n {
                3 => {
                    let (theta, phi) = (node.angles[0], node.angles[1]);
                    let (st, ct) = (theta.sin(), theta.cos());
                    let (sp, cp) = (phi.sin(), phi.cos());
                    DMatrix::from_columns(&[
                        DVector::from_vec(vec![radius * ct * cp, radius * ct * sp, -radius * st]),
                        DVector::from_vec(vec![-radius * st * sp, radius * st * cp, 0.0]),
                    ])
                }
                4 => {
                    let (chi, theta, phi) = (node.angles[0], node.angles[1], node.angles[2]);
                    let (sc, cc) = (chi.sin(), chi.cos());
                    let (st, ct) = (theta.sin(), theta.cos());
                    let (sp, cp) = (phi.sin(), phi.cos());
                    DMatrix::from_columns(&[
                        DVector::from_vec(vec![
                            radius * cc * st * cp,
                            radius * cc * st * sp,
                            radius * cc * ct,
                            -radius * sc,
                        ]),
                        DVector::from_vec(vec![
                            radius * sc * ct * cp,
                            radius * sc * ct * sp,
                            -radius * sc * st,
                            0.0,
                        ]),
                        DVector::from_vec(vec![
                            -radius * sc * st * sp,
                            radius * sc * st * cp,
                            0.0,
                            0.0,
                        ]),
                    ])
                }
                _ => unreachable!(),
            },
        }
    }

    /// Integrate against the round unit-sphere measure only.
    pub fn integrate_round(&self, mut f: impl FnMut(&SphereNode) -> Result<f64>) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            terms.push(node.weight * f(node)?);
        }
        Ok(compensated_sum(&terms))
    }
}

/// Integrate F dsigma_g over the coordinate sphere at `radius`: the induced
/// area element comes from the metric restricted to the node tangents, and
/// `f` supplies the pointwise scalar F at each chart point.
pub fn flux_integral(
    rule: &SphereRule,
    metric: &dyn MetricField,
    radius: f64,
    mut f: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<f64> {
    let chart = metric.chart();
    if chart.dim() != rule.dim {
        return Err(Error::DimensionMismatch {
            expected: chart.dim(),
            found: rule.dim,
        });
    }
    let mut terms = Vec::with_capacity(rule.nodes.len());
    for node in &rule.nodes {
        let x = rule.chart_point(chart.kind(), radius, node);
        chart.check_contains(&x)?;
        let t = rule.tangents(chart.kind(), radius, node);
        let g = metric.components(&x);
        let g_ang = t.transpose() * &g * &t;
        let det = g_ang.determinant();
        if !(det > 0.0) {
            return Err(Error::DegenerateMetric { point: x.clone() });
        }
        let ratio = det.sqrt() / node.round_density;
        terms.push(node.weight * ratio * f(&x)?);
    }
    Ok(compensated_sum(&terms))
}

/// g-area of the coordinate sphere at `radius`.
pub fn sphere_area(rule: &SphereRule, metric: &dyn MetricField, radius: f64) -> Result<f64> {
    flux_integral(rule, metric, radius, |_| Ok(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::field::FdMetric;
    use crate::numeric::unit_sphere_area;
    use approx::assert_abs_diff_eq;
    use nalgebra::DMatrix;

    #[test]
    fn gauss_legendre_exactness() {
        let (x, w) = gauss_legendre(5);
        // degree 8 < 2 * 5
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert_abs_diff_eq!(int, 2.0 / 9.0, epsilon = 1e-14);
        let total: f64 = w.iter().sum();
        assert_abs_diff_eq!(total, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn round_measure_totals() {
        for dim in [3usize, 4] {
            let rule = SphereRule::new(dim, 10).unwrap();
            let total = rule.integrate_round(|_| Ok(1.0)).unwrap();
            assert_abs_diff_eq!(total, unit_sphere_area(dim), epsilon = 1e-12);
        }
    }

    #[test]
    fn round_second_moments() {
        // integral of n_i n_j over S^2 is (4 pi / 3) delta_ij
        let rule = SphereRule::new(3, 8).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v = rule
                    .integrate_round(|node| {
                        let x = rule.chart_point(ChartKind::CartesianEnd, 1.0, node);
                        Ok(x[i] * x[j])
                    })
                    .unwrap();
                let expect = if i == j {
                    4.0 * std::f64::consts::PI / 3.0
                } else {
                    0.0
                };
                assert_abs_diff_eq!(v, expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn smooth_exponential_moment() {
        // integral of e^{x3} over the unit 2-sphere is 4 pi sinh 1
        let rule = SphereRule::new(3, 14).unwrap();
        let v = rule
            .integrate_round(|node| {
                let x = rule.chart_point(ChartKind::CartesianEnd, 1.0, node);
                Ok(x[2].exp())
            })
            .unwrap();
        assert_abs_diff_eq!(v, 4.0 * std::f64::consts::PI * 1.0_f64.sinh(), epsilon = 1e-12);
    }

    #[test]
    fn flat_sphere_areas() {
        let g3 = FdMetric {
            chart: Chart::cartesian_end(3, 0.5).unwrap(),
            f: |_x: &[f64]| DMatrix::identity(3, 3),
        };
        let rule = SphereRule::new(3, 8).unwrap();
        let a = sphere_area(&rule, &g3, 2.5).unwrap();
        assert_abs_diff_eq!(a, 4.0 * std::f64::consts::PI * 2.5 * 2.5, epsilon = 1e-10);

        let g4 = FdMetric {
            chart: Chart::cartesian_end(4, 0.5).unwrap(),
            f: |_x: &[f64]| DMatrix::identity(4, 4),
        };
        let rule = SphereRule::new(4, 8).unwrap();
        let a = sphere_area(&rule, &g4, 1.5).unwrap();
        assert_abs_diff_eq!(
            a,
            unit_sphere_area(4) * 1.5_f64.powi(3),
            epsilon = 1e-10
        );
    }

    #[test]
    fn hyperbolic_sphere_area() {
        let g = FdMetric {
            chart: Chart::polar_hyperbolic(3, 0.2).unwrap(),
            f: |x: &[f64]| {
                let sh = x[0].sinh();
                let st = x[1].sin();
                DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                    1.0,
                    sh * sh,
                    sh * sh * st * st,
                ]))
            },
        };
        let rule = SphereRule::new(3, 8).unwrap();
        let rho = 1.7;
        let a = sphere_area(&rule, &g, rho).unwrap();
        let sh = rho.sinh();
        assert_abs_diff_eq!(a, 4.0 * std::f64::consts::PI * sh * sh, epsilon = 1e-9);
    }
}
