//! Built-in geometry families. Every family carries closed-form coordinate
//! derivatives; nothing here falls back to finite differences, so the
//! verification suites can hold formula and direct computation to tight
//! tolerances.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::chart::Chart;
use crate::conformal::ScaledMetric;
use crate::error::{Error, Result};
use crate::field::{
    MetricField, MetricRef, ScalarField, ScalarRef, SymTensor2Field, SymTensorRef,
};
use crate::quad::gauss_legendre;
use crate::tensor::{Tensor3, Tensor4, Variance};

/// Which kind of end the data approaches.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EndKind {
    AsymptoticallyFlat,
    AsymptoticallyHyperbolic,
}

pub struct GeometryBundle {
    pub label: String,
    pub metric: MetricRef,
    pub extrinsic: Option<SymTensorRef>,
    pub end: EndKind,
    /// Nominal decay rate of the deviation from the model end, when the
    /// family is not exactly the model.
    pub decay: Option<f64>,
}

// ---------------------------------------------------------------------------
// exact model metrics

/// Euclidean metric on a cartesian end.
pub struct FlatMetric {
    pub chart: Chart,
}

impl MetricField for FlatMetric {
    fn chart(&self) -> &Chart {
        &self.chart
    }
    fn components(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.chart.dim(), self.chart.dim())
    }
    fn first_derivatives(&self, _x: &[f64]) -> Tensor3 {
        Tensor3::zeros(self.chart.dim())
    }
    fn second_derivatives(&self, _x: &[f64]) -> Tensor4 {
        Tensor4::zeros(self.chart.dim())
    }
}

/// Radial warp of the round sphere: g = d rho^2 + w(rho) h0 in polar
/// coordinates, with h0 the unit round metric. Covers the hyperbolic model
/// (w = sinh^2) and the ads-schwarzschild slice (w = r(rho)^2).
pub struct PolarWarpedMetric {
    chart: Chart,
    warp: Warp,
}

enum Warp {
    Sinh2,
    Ads(AdsProfile),
}

impl Warp {
    /// (w, w', w'') at rho.
    fn eval(&self, rho: f64) -> Result<(f64, f64, f64)> {
        match self {
            Warp::Sinh2 => {
                let s = rho.sinh();
                let c = rho.cosh();
                Ok((s * s, 2.0 * s * c, 2.0 * (c * c + s * s)))
            }
            Warp::Ads(profile) => {
                let r = profile.radius_from_rho(rho)?;
                let v = profile.potential(r);
                let dr = v.sqrt();
                let ddr = 0.5 * profile.potential_slope(r);
                Ok((r * r, 2.0 * r * dr, 2.0 * (dr * dr + r * ddr)))
            }
        }
    }
}

/// Product of sin^2 over the polar angles with index in 1..i: the squared
/// scale factor of the i-th coordinate of the unit round sphere in these
/// charts. Shared with the orthonormal-frame machinery on polar charts.
pub(crate) fn angle_product(x: &[f64], i: usize) -> f64 {
    (1..i).map(|a| x[a].sin() * x[a].sin()).product()
}

/// d/d x_b of the product above (zero when b is outside 1..i).
pub(crate) fn angle_product_d(x: &[f64], i: usize, b: usize) -> f64 {
    if b == 0 || b >= i {
        return 0.0;
    }
    (2.0 * x[b]).sin()
        * (1..i)
            .filter(|&a| a != b)
            .map(|a| x[a].sin() * x[a].sin())
            .product::<f64>()
}

pub(crate) fn angle_product_dd(x: &[f64], i: usize, b: usize, c: usize) -> f64 {
    if b == 0 || b >= i || c == 0 || c >= i {
        return 0.0;
    }
    if b == c {
        2.0 * (2.0 * x[b]).cos()
            * (1..i)
                .filter(|&a| a != b)
                .map(|a| x[a].sin() * x[a].sin())
                .product::<f64>()
    } else {
        (2.0 * x[b]).sin()
            * (2.0 * x[c]).sin()
            * (1..i)
                .filter(|&a| a != b && a != c)
                .map(|a| x[a].sin() * x[a].sin())
                .product::<f64>()
    }
}

impl MetricField for PolarWarpedMetric {
    fn chart(&self) -> &Chart {
        &self.chart
    }

    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.chart.dim();
        let (w, _, _) = self.warp.eval(x[0]).expect("warp evaluation inside chart");
        let mut g = DMatrix::zeros(n, n);
        g[(0, 0)] = 1.0;
        for i in 1..n {
            g[(i, i)] = w * angle_product(x, i);
        }
        g
    }

    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        let n = self.chart.dim();
        let (w, dw, _) = self.warp.eval(x[0]).expect("warp evaluation inside chart");
        let mut out = Tensor3::zeros(n);
        for i in 1..n {
            out.set(0, i, i, dw * angle_product(x, i));
            for b in 1..i {
                out.set(b, i, i, w * angle_product_d(x, i, b));
            }
        }
        out
    }

    fn second_derivatives(&self, x: &[f64]) -> Tensor4 {
        let n = self.chart.dim();
        let (w, dw, ddw) = self.warp.eval(x[0]).expect("warp evaluation inside chart");
        let mut out = Tensor4::zeros(n);
        for i in 1..n {
            out.set(0, 0, i, i, ddw * angle_product(x, i));
            for b in 1..i {
                let v = dw * angle_product_d(x, i, b);
                out.set(0, b, i, i, v);
                out.set(b, 0, i, i, v);
                for c in 1..i {
                    out.set(b, c, i, i, w * angle_product_dd(x, i, b, c));
                }
            }
        }
        out
    }
}

/// Geodesic radial profile of the ads-schwarzschild slice with potential
/// V(r) = 1 + r^2 - 2 m r^(2-n). The rho coordinate is normalized so that
/// rho(r) = arsinh(r) - int_r^inf (V_m^{-1/2} - V_0^{-1/2}) ds, which pins
/// the same conformal boundary as the hyperbolic model.
pub struct AdsProfile {
    pub m: f64,
    pub n: usize,
    pub r_plus: f64,
    gl: Vec<(f64, f64)>,
}

impl AdsProfile {
    pub fn new(m: f64, n: usize) -> Result<Self> {
        if !(m >= 0.0) || !m.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mass".into(),
                reason: format!("must be a finite nonnegative number, got {m}"),
            });
        }
        if n != 3 && n != 4 {
            return Err(Error::UnsupportedDimension {
                quantity: "ads-schwarzschild family",
                found: n,
            });
        }
        let r_plus = if m == 0.0 {
            0.0
        } else {
            // V is increasing from -inf with a single positive root
            let mut lo = 1e-12;
            let mut hi = 1.0 + 2.0 * m;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let v = 1.0 + mid * mid - 2.0 * m * mid.powf(2.0 - n as f64);
                if v < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let (nodes, weights) = gauss_legendre(48);
        let gl = nodes
            .iter()
            .zip(&weights)
            .map(|(t, w)| (0.5 * (t + 1.0), 0.5 * w))
            .collect();
        Ok(AdsProfile { m, n, r_plus, gl })
    }

    pub fn potential(&self, r: f64) -> f64 {
        1.0 + r * r - 2.0 * self.m * r.powf(2.0 - self.n as f64)
    }

    pub fn potential_slope(&self, r: f64) -> f64 {
        2.0 * r + 2.0 * self.m * (self.n as f64 - 2.0) * r.powf(1.0 - self.n as f64)
    }

    /// rho(r), via the tail integral substituted with s = r / t. The
    /// integrand difference is rewritten to avoid cancellation:
    /// V_m^{-1/2} - V_0^{-1/2} = 2 m s^(2-n) / (sqrt(Vm) sqrt(V0) (sqrt(Vm)+sqrt(V0))).
    pub fn rho_of_r(&self, r: f64) -> f64 {
        if self.m == 0.0 {
            return r.asinh();
        }
        let mut tail = 0.0;
        for &(t, w) in &self.gl {
            let s = r / t;
            let vm = self.potential(s).sqrt();
            let v0 = (1.0 + s * s).sqrt();
            let diff = 2.0 * self.m * s.powf(2.0 - self.n as f64) / (vm * v0 * (vm + v0));
            tail += w * diff * r / (t * t);
        }
        r.asinh() - tail
    }

    /// Safeguarded Newton inversion of rho(r).
    pub fn radius_from_rho(&self, rho: f64) -> Result<f64> {
        if self.m == 0.0 {
            return Ok(rho.sinh());
        }
        let mut lo = 1.001 * self.r_plus;
        let mut hi = rho.sinh().max(2.0 * lo).max(1.0);
        let mut grow = 0;
        while self.rho_of_r(hi) < rho {
            hi *= 2.0;
            grow += 1;
            if grow > 60 {
                return Err(Error::RootSolve {
                    quantity: "ads-schwarzschild radial profile",
                    residual: f64::INFINITY,
                });
            }
        }
        let mut r = rho.sinh().clamp(lo * 1.5, hi);
        let mut residual = f64::INFINITY;
        for _ in 0..100 {
            let f = self.rho_of_r(r) - rho;
            residual = f.abs();
            if residual < 1e-13 {
                return Ok(r);
            }
            if f > 0.0 {
                hi = r;
            } else {
                lo = r;
            }
            let step = f * self.potential(r).sqrt();
            let next = r - step;
            r = if next <= lo || next >= hi {
                0.5 * (lo + hi)
            } else {
                next
            };
        }
        Err(Error::RootSolve {
            quantity: "ads-schwarzschild radial profile",
            residual,
        })
    }
}

// ---------------------------------------------------------------------------
// scalar fields with closed-form derivatives

/// Sum of terms c * x_0^k * r^(-s) on a cartesian end, k in {0, 1}.
pub struct RadialPolyScalar {
    pub terms: Vec<RadialTerm>,
}

#[derive(Clone, Copy, Debug)]
pub struct RadialTerm {
    pub coeff: f64,
    /// Degree in x_0: 0 for a pure radial power, 1 for the dipole term.
    pub axial_degree: u8,
    pub radial_power: f64,
}

impl ScalarField for RadialPolyScalar {
    fn value(&self, x: &[f64]) -> f64 {
        let r = norm(x);
        self.terms
            .iter()
            .map(|t| {
                let axial = if t.axial_degree == 1 { x[0] } else { 1.0 };
                t.coeff * axial * r.powf(-t.radial_power)
            })
            .sum()
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let n = x.len();
        let r = norm(x);
        let mut g = DVector::zeros(n);
        for t in &self.terms {
            let s = t.radial_power;
            let c = t.coeff;
            if t.axial_degree == 0 {
                let k = -c * s * r.powf(-s - 2.0);
                for i in 0..n {
                    g[i] += k * x[i];
                }
            } else {
                let k = -c * s * x[0] * r.powf(-s - 2.0);
                g[0] += c * r.powf(-s);
                for i in 0..n {
                    g[i] += k * x[i];
                }
            }
        }
        g
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let r = norm(x);
        let mut h = DMatrix::zeros(n, n);
        for t in &self.terms {
            let s = t.radial_power;
            let c = t.coeff;
            if t.axial_degree == 0 {
                let k1 = c * s * (s + 2.0) * r.powf(-s - 4.0);
                let k2 = -c * s * r.powf(-s - 2.0);
                for i in 0..n {
                    for j in 0..n {
                        h[(i, j)] += k1 * x[i] * x[j];
                        if i == j {
                            h[(i, j)] += k2;
                        }
                    }
                }
            } else {
                let k1 = -c * s * r.powf(-s - 2.0);
                let k2 = c * s * (s + 2.0) * x[0] * r.powf(-s - 4.0);
                for i in 0..n {
                    for j in 0..n {
                        let mut v = k2 * x[i] * x[j];
                        if i == 0 {
                            v += k1 * x[j];
                        }
                        if j == 0 {
                            v += k1 * x[i];
                        }
                        if i == j {
                            v += k1 * x[0];
                        }
                        h[(i, j)] += v;
                    }
                }
            }
        }
        h
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// psi = (2 / (n-2)) ln(1 + (m/2) r^(2-n)); e^{2 psi} delta is the
/// isotropic slice of mass m.
pub struct IsotropicLogScalar {
    pub m: f64,
    pub n: usize,
}

impl IsotropicLogScalar {
    fn u(&self, r: f64) -> f64 {
        1.0 + 0.5 * self.m * r.powf(2.0 - self.n as f64)
    }
}

impl ScalarField for IsotropicLogScalar {
    fn value(&self, x: &[f64]) -> f64 {
        let nf = self.n as f64;
        2.0 / (nf - 2.0) * self.u(norm(x)).ln()
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let n = x.len();
        let nf = self.n as f64;
        let r = norm(x);
        let u = self.u(r);
        let k = -0.5 * self.m * (nf - 2.0) * r.powf(-nf);
        let c = 2.0 / (nf - 2.0) / u;
        DVector::from_fn(n, |i, _| c * k * x[i])
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let nf = self.n as f64;
        let r = norm(x);
        let u = self.u(r);
        let k = -0.5 * self.m * (nf - 2.0);
        let c = 2.0 / (nf - 2.0);
        let mut h = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let ui = k * r.powf(-nf) * x[i];
                let uj = k * r.powf(-nf) * x[j];
                let mut uij = -k * nf * r.powf(-nf - 2.0) * x[i] * x[j];
                if i == j {
                    uij += k * r.powf(-nf);
                }
                h[(i, j)] = c * (uij / u - ui * uj / (u * u));
            }
        }
        h
    }
}

/// f = a e^(-tau rho) (1 + cos(x_1)/2 when anisotropic) on a polar chart.
pub struct PolarExpScalar {
    pub a: f64,
    pub tau: f64,
    pub anisotropic: bool,
}

impl PolarExpScalar {
    fn angular(&self, x: &[f64]) -> (f64, f64, f64) {
        if self.anisotropic {
            (
                1.0 + 0.5 * x[1].cos(),
                -0.5 * x[1].sin(),
                -0.5 * x[1].cos(),
            )
        } else {
            (1.0, 0.0, 0.0)
        }
    }
}

impl ScalarField for PolarExpScalar {
    fn value(&self, x: &[f64]) -> f64 {
        let (a0, _, _) = self.angular(x);
        self.a * (-self.tau * x[0]).exp() * a0
    }

    fn gradient(&self, x: &[f64]) -> DVector<f64> {
        let n = x.len();
        let e = self.a * (-self.tau * x[0]).exp();
        let (a0, a1, _) = self.angular(x);
        let mut g = DVector::zeros(n);
        g[0] = -self.tau * e * a0;
        g[1] = e * a1;
        g
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let e = self.a * (-self.tau * x[0]).exp();
        let (a0, a1, a2) = self.angular(x);
        let mut h = DMatrix::zeros(n, n);
        h[(0, 0)] = self.tau * self.tau * e * a0;
        h[(0, 1)] = -self.tau * e * a1;
        h[(1, 0)] = h[(0, 1)];
        h[(1, 1)] = e * a2;
        h
    }
}

// ---------------------------------------------------------------------------
// extrinsic curvature families

/// Momentum-carrying transverse-traceless extrinsic curvature on flat data:
///
///   K_ij = 3/(2 r^2) (p_i n_j + p_j n_i - (delta_ij - n_i n_j) (p.n)),
///
/// trace-free, divergence-free away from the origin, with total momentum p
/// on every coordinate sphere.
pub struct MomentumSeedExtrinsic {
    pub p: [f64; 3],
}

impl MomentumSeedExtrinsic {
    fn assemble(&self, x: &[f64]) -> (DMatrix<f64>, Tensor3) {
        let n = 3;
        let r = norm(x);
        let nv: Vec<f64> = x.iter().map(|v| v / r).collect();
        let pn: f64 = self.p.iter().zip(&nv).map(|(p, n)| p * n).sum();
        let pref = 1.5 / (r * r);

        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut v = self.p[i] * nv[j] + self.p[j] * nv[i];
                v -= (delta(i, j) - nv[i] * nv[j]) * pn;
                a[(i, j)] = v;
            }
        }

        let mut da = Tensor3::zeros(n);
        for k in 0..n {
            let dpn = (self.p[k] - pn * nv[k]) / r;
            for i in 0..n {
                for j in 0..n {
                    let dni = (delta(i, k) - nv[i] * nv[k]) / r;
                    let dnj = (delta(j, k) - nv[j] * nv[k]) / r;
                    let mut v = self.p[i] * dnj + self.p[j] * dni;
                    v -= (delta(i, j) - nv[i] * nv[j]) * dpn;
                    v += pn * (dni * nv[j] + nv[i] * dnj);
                    da.set(k, i, j, v);
                }
            }
        }

        let mut kk = DMatrix::zeros(n, n);
        let mut dk = Tensor3::zeros(n);
        for i in 0..n {
            for j in 0..n {
                kk[(i, j)] = pref * a[(i, j)];
                for k in 0..n {
                    dk.set(
                        k,
                        i,
                        j,
                        pref * (da.get(k, i, j) - 2.0 * nv[k] / r * a[(i, j)]),
                    );
                }
            }
        }
        (kk, dk)
    }
}

fn delta(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

impl SymTensor2Field for MomentumSeedExtrinsic {
    fn components(&self, x: &[f64]) -> DMatrix<f64> {
        self.assemble(x).0
    }
    fn first_derivatives(&self, x: &[f64]) -> Tensor3 {
        self.assemble(x).1
    }
    fn variance(&self) -> Variance {
        Variance::Covariant
    }
}

// ---------------------------------------------------------------------------
// constructors

pub fn flat(dim: usize) -> Result<MetricRef> {
    Ok(Arc::new(FlatMetric {
        chart: Chart::cartesian_end(dim, 0.05)?,
    }))
}

/// Isotropic constant-time slice with energy m: e^{2 psi} delta with
/// psi = (2/(n-2)) ln(1 + m / (2 r^(n-2))). The chart reaches down to the
/// minimal sphere at r = (m/2)^(1/(n-2)).
pub fn schwarzschild_isotropic(m: f64, dim: usize) -> Result<MetricRef> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mass".into(),
            reason: format!("must be positive, got {m}"),
        });
    }
    let r_min = (0.5 * m).powf(1.0 / (dim as f64 - 2.0));
    Ok(Arc::new(ScaledMetric {
        base: flat_with_inner(dim, r_min)?,
        psi: Arc::new(IsotropicLogScalar { m, n: dim }),
    }))
}

fn flat_with_inner(dim: usize, r_min: f64) -> Result<MetricRef> {
    Ok(Arc::new(FlatMetric {
        chart: Chart::cartesian_end(dim, r_min)?,
    }))
}

/// e^{2 a r^(-p)} delta.
pub fn conformally_flat(a: f64, p: f64, dim: usize) -> Result<MetricRef> {
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "decay power".into(),
            reason: format!("must be positive, got {p}"),
        });
    }
    Ok(Arc::new(ScaledMetric {
        base: flat(dim)?,
        psi: Arc::new(RadialPolyScalar {
            terms: vec![RadialTerm {
                coeff: a,
                axial_degree: 0,
                radial_power: p,
            }],
        }),
    }))
}

/// Flat metric paired with the momentum-seed extrinsic curvature.
pub fn momentum_seed(p: [f64; 3]) -> Result<(MetricRef, SymTensorRef)> {
    Ok((flat(3)?, Arc::new(MomentumSeedExtrinsic { p })))
}

/// The hyperbolic model b = d rho^2 + sinh^2(rho) h0.
pub fn hyperbolic(dim: usize) -> Result<MetricRef> {
    Ok(Arc::new(PolarWarpedMetric {
        chart: Chart::polar_hyperbolic(dim, 0.05)?,
        warp: Warp::Sinh2,
    }))
}

/// Constant-time slice of ads-schwarzschild with mass parameter m, in
/// geodesic polar coordinates sharing the hyperbolic conformal boundary.
pub fn ads_schwarzschild(m: f64, dim: usize) -> Result<MetricRef> {
    let profile = AdsProfile::new(m, dim)?;
    let rho_min = if m == 0.0 {
        0.05
    } else {
        (profile.rho_of_r(1.02 * profile.r_plus) + 0.02).max(0.05)
    };
    Ok(Arc::new(PolarWarpedMetric {
        chart: Chart::polar_hyperbolic(dim, rho_min)?,
        warp: Warp::Ads(profile),
    }))
}

/// e^{2 a exp(-tau rho)} b.
pub fn ah_conformal(a: f64, tau: f64, dim: usize) -> Result<MetricRef> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "decay rate".into(),
            reason: format!("must be positive, got {tau}"),
        });
    }
    Ok(Arc::new(ScaledMetric {
        base: hyperbolic(dim)?,
        psi: Arc::new(PolarExpScalar {
            a,
            tau,
            anisotropic: false,
        }),
    }))
}

/// Deformation direction on a cartesian end:
/// f = a r^(-tau) + (a/2) x_0 r^(-tau-2), decaying like r^(-tau) with a
/// dipole part so the checks see genuine angular dependence. The dipole
/// sits two orders down because the admissibility checks also bound the
/// Laplacian of f by r^(-2 tau - 2): a non-harmonic term at the leading
/// order has Lap f of order r^(-tau-2), which violates that bound for
/// every positive tau. At tau = n - 2 both terms here are exactly
/// harmonic in the flat background (x_0 r^(-n) is the decaying dipole
/// solution), so the Laplacian row measures only the curvature of the
/// base metric.
pub fn af_factor(a: f64, tau: f64) -> Result<ScalarRef> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "decay rate".into(),
            reason: format!("must be positive, got {tau}"),
        });
    }
    Ok(Arc::new(RadialPolyScalar {
        terms: vec![
            RadialTerm {
                coeff: a,
                axial_degree: 0,
                radial_power: tau,
            },
            RadialTerm {
                coeff: 0.5 * a,
                axial_degree: 1,
                radial_power: tau + 2.0,
            },
        ],
    }))
}

/// The log factor whose unit deformation of the flat metric is exactly the
/// isotropic slice of energy m: f = (2/(n-2)) ln(1 + m/(2 r^(n-2))). The
/// deformed scalar curvature then vanishes identically, which makes this
/// the marginal case of the energy condition: zero slack everywhere and
/// the deformed energy exactly beta m. Decays like r^(2-n).
pub fn mass_log_factor(m: f64, dim: usize) -> Result<ScalarRef> {
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::InvalidParameter {
            name: "mass".into(),
            reason: format!("must be positive, got {m}"),
        });
    }
    if dim != 3 && dim != 4 {
        return Err(Error::UnsupportedDimension {
            quantity: "mass log factor",
            found: dim,
        });
    }
    Ok(Arc::new(IsotropicLogScalar { m, n: dim }))
}

/// Deformation direction on a polar chart:
/// f = a e^(-tau rho) (1 + cos(theta)/2).
pub fn ah_factor(a: f64, tau: f64) -> Result<ScalarRef> {
    if !(tau > 0.0) {
        return Err(Error::InvalidParameter {
            name: "decay rate".into(),
            reason: format!("must be positive, got {tau}"),
        });
    }
    Ok(Arc::new(PolarExpScalar {
        a,
        tau,
        anisotropic: true,
    }))
}

/// Construct a named metric family. Parameter conventions:
///   flat: []
///   schwarzschild_isotropic: [m]
///   conformally_flat: [a, p]
///   bowen_york: [p1, p2, p3]
///   hyperbolic: []
///   ads_schwarzschild: [m]
///   ah_conformal: [a, tau]
pub fn make_geometry(name: &str, params: &[f64], dim: usize) -> Result<GeometryBundle> {
    if dim != 3 && dim != 4 {
        return Err(Error::UnsupportedDimension {
            quantity: "geometry family",
            found: dim,
        });
    }
    let label = if params.is_empty() {
        name.to_string()
    } else {
        let joined: Vec<String> = params.iter().map(|p| format!("{p}")).collect();
        format!("{}({})", name, joined.join(","))
    };
    let want = |k: usize| -> Result<()> {
        if params.len() != k {
            Err(Error::InvalidParameter {
                name: format!("family {name}"),
                reason: format!("expects {k} parameters, got {}", params.len()),
            })
        } else {
            Ok(())
        }
    };
    let bundle = match name {
        "flat" => {
            want(0)?;
            GeometryBundle {
                label,
                metric: flat(dim)?,
                extrinsic: None,
                end: EndKind::AsymptoticallyFlat,
                decay: None,
            }
        }
        "schwarzschild_isotropic" => {
            want(1)?;
            GeometryBundle {
                label,
                metric: schwarzschild_isotropic(params[0], dim)?,
                extrinsic: None,
                end: EndKind::AsymptoticallyFlat,
                decay: Some(dim as f64 - 2.0),
            }
        }
        "conformally_flat" => {
            want(2)?;
            GeometryBundle {
                label,
                metric: conformally_flat(params[0], params[1], dim)?,
                extrinsic: None,
                end: EndKind::AsymptoticallyFlat,
                decay: Some(params[1]),
            }
        }
        "bowen_york" => {
            want(3)?;
            if dim != 3 {
                return Err(Error::UnsupportedDimension {
                    quantity: "bowen_york family",
                    found: dim,
                });
            }
            let (metric, extrinsic) = momentum_seed([params[0], params[1], params[2]])?;
            GeometryBundle {
                label,
                metric,
                extrinsic: Some(extrinsic),
                end: EndKind::AsymptoticallyFlat,
                decay: Some(1.0),
            }
        }
        "hyperbolic" => {
            want(0)?;
            GeometryBundle {
                label,
                metric: hyperbolic(dim)?,
                extrinsic: None,
                end: EndKind::AsymptoticallyHyperbolic,
                decay: None,
            }
        }
        "ads_schwarzschild" => {
            want(1)?;
            GeometryBundle {
                label,
                metric: ads_schwarzschild(params[0], dim)?,
                extrinsic: None,
                end: EndKind::AsymptoticallyHyperbolic,
                decay: Some(dim as f64),
            }
        }
        "ah_conformal" => {
            want(2)?;
            GeometryBundle {
                label,
                metric: ah_conformal(params[0], params[1], dim)?,
                extrinsic: None,
                end: EndKind::AsymptoticallyHyperbolic,
                decay: Some(params[1]),
            }
        }
        other => {
            return Err(Error::Config(format!(
                "unknown family {other:?}; known families: flat, schwarzschild_isotropic, \
                 conformally_flat, bowen_york, hyperbolic, ads_schwarzschild, ah_conformal"
            )))
        }
    };
    Ok(bundle)
}

/// Construct a named extrinsic curvature seed on its own, for attaching
/// to any compatible metric: bowen_york [px, py, pz].
pub fn make_extrinsic(name: &str, params: &[f64], dim: usize) -> Result<SymTensorRef> {
    match name {
        "bowen_york" => {
            if params.len() != 3 {
                return Err(Error::InvalidParameter {
                    name: "extrinsic family bowen_york".into(),
                    reason: format!("expects 3 parameters, got {}", params.len()),
                });
            }
            if dim != 3 {
                return Err(Error::UnsupportedDimension {
                    quantity: "bowen_york family",
                    found: dim,
                });
            }
            let (_, extrinsic) = momentum_seed([params[0], params[1], params[2]])?;
            Ok(extrinsic)
        }
        other => Err(Error::Config(format!(
            "unknown extrinsic family {other:?}; known: bowen_york"
        ))),
    }
}

/// Construct a named conformal factor family: af_factor [a, tau] on
/// cartesian ends, ah_factor [a, tau] on polar charts.
pub fn make_factor(name: &str, params: &[f64], dim: usize) -> Result<(ScalarRef, f64)> {
    let want = |k: usize| -> Result<()> {
        if params.len() != k {
            Err(Error::InvalidParameter {
                name: format!("conformal family {name}"),
                reason: format!("expects {k} parameters, got {}", params.len()),
            })
        } else {
            Ok(())
        }
    };
    match name {
        "af_factor" => {
            want(2)?;
            Ok((af_factor(params[0], params[1])?, params[1]))
        }
        "ah_factor" => {
            want(2)?;
            Ok((ah_factor(params[0], params[1])?, params[1]))
        }
        "mass_log" => {
            want(1)?;
            Ok((mass_log_factor(params[0], dim)?, dim as f64 - 2.0))
        }
        other => Err(Error::Config(format!(
            "unknown conformal family {other:?}; known: af_factor, ah_factor, mass_log"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{constraint_densities, curvature_at, mean_curvature};
    use crate::fd;
    use approx::assert_abs_diff_eq;

    #[test]
    fn schwarzschild_scalar_flat_and_horizon_geometry() {
        let m = 1.3;
        let g = schwarzschild_isotropic(m, 3).unwrap();
        for x in [[2.0, 0.3, -1.0], [0.9, 0.2, 0.1], [5.0, -4.0, 3.0]] {
            let d = curvature_at(g.as_ref(), &x).unwrap();
            assert!(d.scalar.abs() < 1e-10, "S = {} at {:?}", d.scalar, x);
        }
        // minimal sphere at r = m/2
        let h0 = mean_curvature(g.as_ref(), &[0.5 * m, 0.0, 0.0], true).unwrap();
        assert_abs_diff_eq!(h0, 0.0, epsilon = 1e-10);
        // H(2m) = 48 / (125 m) for the outward normal
        let h = mean_curvature(g.as_ref(), &[0.0, 2.0 * m, 0.0], true).unwrap();
        assert_abs_diff_eq!(h, 48.0 / (125.0 * m), epsilon = 1e-10);
    }

    #[test]
    fn schwarzschild_dimension_four_is_scalar_flat() {
        let g = schwarzschild_isotropic(0.8, 4).unwrap();
        let d = curvature_at(g.as_ref(), &[1.5, -0.7, 0.4, 1.1]).unwrap();
        assert!(d.scalar.abs() < 1e-10, "S = {}", d.scalar);
    }

    #[test]
    fn hyperbolic_model_is_einstein() {
        for dim in [3usize, 4] {
            let g = hyperbolic(dim).unwrap();
            let x: Vec<f64> = match dim {
                3 => vec![1.2, 0.9, 0.4],
                _ => vec![1.2, 0.9, 1.7, 0.4],
            };
            let d = curvature_at(g.as_ref(), &x).unwrap();
            let gm = g.components(&x);
            let nf = dim as f64;
            for i in 0..dim {
                for j in 0..dim {
                    assert_abs_diff_eq!(
                        d.ricci[(i, j)],
                        -(nf - 1.0) * gm[(i, j)],
                        epsilon = 1e-11
                    );
                }
            }
            assert_abs_diff_eq!(d.scalar, -nf * (nf - 1.0), epsilon = 1e-11);
        }
    }

    #[test]
    fn momentum_seed_is_trace_and_divergence_free() {
        let (g, k) = momentum_seed([0.3, -0.2, 0.5]).unwrap();
        let p2 = 0.3f64 * 0.3 + 0.2 * 0.2 + 0.5 * 0.5;
        for x in [[1.0, 2.0, -1.0], [0.4, 0.1, 0.2], [3.0, -2.0, 6.0]] {
            let d = curvature_at(g.as_ref(), &x).unwrap();
            let c = constraint_densities(&d, k.as_ref(), &x).unwrap();
            assert!(c.k_trace.abs() < 1e-12, "tr K = {}", c.k_trace);
            assert!(c.j.amax() < 1e-11, "|J| = {}", c.j.amax());
            // |K|^2 = 9/(2 r^4) (|p|^2 + 2 (p.n)^2)
            let r = norm(&x);
            let pn = (0.3 * x[0] - 0.2 * x[1] + 0.5 * x[2]) / r;
            let expect = 4.5 / r.powi(4) * (p2 + 2.0 * pn * pn);
            assert_abs_diff_eq!(c.k_norm2, expect, epsilon = 1e-11);
            assert_abs_diff_eq!(c.mu, -0.5 * expect, epsilon = 1e-11);
        }
    }

    #[test]
    fn ads_profile_reduces_to_hyperbolic_at_zero_mass() {
        let g0 = ads_schwarzschild(0.0, 3).unwrap();
        let gb = hyperbolic(3).unwrap();
        let x = [1.4, 1.0, 0.6];
        let a = g0.components(&x);
        let b = gb.components(&x);
        for i in 0..3 {
            for j in 0..3 {
                assert_abs_diff_eq!(a[(i, j)], b[(i, j)], epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn ads_profile_roundtrip_and_horizon() {
        let profile = AdsProfile::new(0.5, 3).unwrap();
        assert_abs_diff_eq!(profile.r_plus, 0.682_327_803_828_019_3, epsilon = 1e-12);
        assert_abs_diff_eq!(profile.potential(profile.r_plus), 0.0, epsilon = 1e-12);
        for rho in [0.8, 1.5, 3.0, 5.0] {
            let r = profile.radius_from_rho(rho).unwrap();
            assert_abs_diff_eq!(profile.rho_of_r(r), rho, epsilon = 1e-12);
        }
        // normalization pins r(rho) to sinh(rho) up to the mass tail
        let r5 = profile.radius_from_rho(5.0).unwrap();
        assert!((r5 / 5.0f64.sinh() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn ads_slice_has_model_scalar_curvature() {
        for (m, dim) in [(0.5, 3usize), (0.25, 4)] {
            let g = ads_schwarzschild(m, dim).unwrap();
            let x: Vec<f64> = match dim {
                3 => vec![1.6, 1.1, 0.7],
                _ => vec![1.6, 1.1, 0.8, 0.7],
            };
            let d = curvature_at(g.as_ref(), &x).unwrap();
            let nf = dim as f64;
            assert_abs_diff_eq!(d.scalar, -nf * (nf - 1.0), epsilon = 1e-9);
        }
    }

    #[test]
    fn factor_derivatives_match_stencils() {
        let f = af_factor(0.4, 1.0).unwrap();
        let chart = Chart::cartesian_end(3, 0.05).unwrap();
        let x = [1.1, -0.6, 0.9];
        let h = chart.fd_step(&x);
        let fd_grad = fd::gradient(&chart, &|y: &[f64]| f.value(y), &x, h).unwrap();
        let fd_hess = fd::hessian(&chart, &|y: &[f64]| f.value(y), &x, h).unwrap();
        let grad = f.gradient(&x);
        let hess = f.hessian(&x);
        for i in 0..3 {
            assert_abs_diff_eq!(grad[i], fd_grad[i], epsilon = 1e-9);
            for j in 0..3 {
                assert_abs_diff_eq!(hess[(i, j)], fd_hess[(i, j)], epsilon = 1e-7);
            }
        }

        let f = ah_factor(0.2, 3.0).unwrap();
        let chart = Chart::polar_hyperbolic(3, 0.05).unwrap();
        let x = [1.5, 1.2, 0.3];
        let h = chart.fd_step(&x);
        let fd_grad = fd::gradient(&chart, &|y: &[f64]| f.value(y), &x, h).unwrap();
        let fd_hess = fd::hessian(&chart, &|y: &[f64]| f.value(y), &x, h).unwrap();
        let grad = f.gradient(&x);
        let hess = f.hessian(&x);
        for i in 0..3 {
            assert_abs_diff_eq!(grad[i], fd_grad[i], epsilon = 1e-9);
            for j in 0..3 {
                assert_abs_diff_eq!(hess[(i, j)], fd_hess[(i, j)], epsilon = 1e-7);
            }
        }
    }

    #[test]
    fn polar_metric_derivatives_match_stencils() {
        for dim in [3usize, 4] {
            let g = hyperbolic(dim).unwrap();
            let x: Vec<f64> = match dim {
                3 => vec![1.3, 1.0, 0.5],
                _ => vec![1.3, 1.0, 1.9, 0.5],
            };
            let h = g.chart().fd_step(&x);
            let fd1 = fd::matrix_partials(g.chart(), &|y: &[f64]| g.components(y), &x, h).unwrap();
            let an1 = g.first_derivatives(&x);
            let fd2 =
                fd::matrix_second_partials(g.chart(), &|y: &[f64]| g.components(y), &x, h).unwrap();
            let an2 = g.second_derivatives(&x);
            for k in 0..dim {
                for i in 0..dim {
                    for j in 0..dim {
                        assert_abs_diff_eq!(
                            an1.get(k, i, j),
                            fd1.get(k, i, j),
                            epsilon = 1e-8
                        );
                        for l in 0..dim {
                            assert_abs_diff_eq!(
                                an2.get(l, k, i, j),
                                fd2.get(l, k, i, j),
                                epsilon = 1e-6
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn family_dispatch_validates() {
        assert!(make_geometry("flat", &[], 3).is_ok());
        assert!(make_geometry("flat", &[1.0], 3).is_err());
        assert!(make_geometry("nonsense", &[], 3).is_err());
        assert!(make_geometry("bowen_york", &[0.1, 0.2, 0.3], 4).is_err());
        assert!(make_geometry("schwarzschild_isotropic", &[-1.0], 3).is_err());
        assert!(make_factor("af_factor", &[0.1, 1.0], 3).is_ok());
        assert!(make_factor("af_factor", &[0.1], 3).is_err());
    }
}
