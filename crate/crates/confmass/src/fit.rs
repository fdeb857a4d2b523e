//! Fits for radial convergence data: extract the limit of a flux sequence
//! against a power-law or exponential tail model, and straight-line slopes
//! for decay-rate validation.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailModel {
    /// F(r) = limit + c * r^(-rate)
    Power,
    /// F(rho) = limit + c * exp(-rate * rho)
    Exponential,
}

#[derive(Clone, Debug)]
pub struct TailFit {
    pub limit: f64,
    pub coefficient: f64,
    pub rate: f64,
    /// Standard error of the fitted limit; the extrapolation residual.
    pub stderr: f64,
    pub rss: f64,
    /// Samples were constant to machine precision; rate is meaningless.
    pub constant: bool,
}

fn basis(model: TailModel, x: f64, rate: f64) -> f64 {
    match model {
        TailModel::Power => x.powf(-rate),
        TailModel::Exponential => (-rate * x).exp(),
    }
}

/// Least squares of y on [1, basis(x; rate)] for a fixed rate.
/// Returns (limit, coefficient, rss, inv00) with inv00 the (limit, limit)
/// entry of the inverse normal matrix.
fn solve_fixed_rate(model: TailModel, xs: &[f64], ys: &[f64], rate: f64) -> (f64, f64, f64, f64) {
    let m = xs.len() as f64;
    let mut sb = 0.0;
    let mut sbb = 0.0;
    let mut sy = 0.0;
    let mut sby = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let b = basis(model, x, rate);
        sb += b;
        sbb += b * b;
        sy += y;
        sby += b * y;
    }
    let det = m * sbb - sb * sb;
    if det.abs() < 1e-300 {
        return (sy / m, 0.0, f64::INFINITY, f64::INFINITY);
    }
    let limit = (sbb * sy - sb * sby) / det;
    let coeff = (m * sby - sb * sy) / det;
    let mut rss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - limit - coeff * basis(model, x, rate);
        rss += r * r;
    }
    (limit, coeff, rss, sbb / det)
}

/// Fit samples to the tail model, profiling the nonlinear rate over a grid
/// refined by golden-section search.
pub fn fit_tail(model: TailModel, xs: &[f64], ys: &[f64]) -> Result<TailFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 4 {
        return Err(Error::ScheduleTooShort {
            need: 4,
            got: xs.len(),
        });
    }
    if ys.iter().any(|y| !y.is_finite()) || xs.iter().any(|x| !x.is_finite()) {
        return Err(Error::PreconditionFailed {
            subject: "tail fit".into(),
            detail: "non-finite sample".into(),
        });
    }

    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let spread = ys
        .iter()
        .map(|y| (y - mean).abs())
        .fold(0.0_f64, f64::max);
    if spread <= 1e-13 * mean.abs().max(1.0) {
        return Ok(TailFit {
            limit: mean,
            coefficient: 0.0,
            rate: 0.0,
            stderr: 0.0,
            rss: 0.0,
            constant: true,
        });
    }

    let (lo, hi) = match model {
        TailModel::Power => (0.5, 8.0),
        TailModel::Exponential => (0.1, 12.0),
    };
    let steps = 60;
    let mut best_rate = lo;
    let mut best_rss = f64::INFINITY;
    for i in 0..=steps {
        let rate = lo + (hi - lo) * i as f64 / steps as f64;
        let (_, _, rss, _) = solve_fixed_rate(model, xs, ys, rate);
        if rss < best_rss {
            best_rss = rss;
            best_rate = rate;
        }
    }
    let h = (hi - lo) / steps as f64;
    let mut a = (best_rate - h).max(lo);
    let mut b = (best_rate + h).min(hi);
    // golden-section refinement of the rss profile
    let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = solve_fixed_rate(model, xs, ys, c).2;
    let mut fd = solve_fixed_rate(model, xs, ys, d).2;
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = solve_fixed_rate(model, xs, ys, c).2;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = solve_fixed_rate(model, xs, ys, d).2;
        }
        if (b - a).abs() < 1e-12 {
            break;
        }
    }
    let rate = 0.5 * (a + b);
    let (limit, coefficient, rss, inv00) = solve_fixed_rate(model, xs, ys, rate);
    // three effective parameters: limit, coefficient, rate
    let dof = (xs.len() as f64 - 3.0).max(1.0);
    let stderr = (rss / dof * inv00).sqrt();
    Ok(TailFit {
        limit,
        coefficient,
        rate,
        stderr,
        rss,
        constant: false,
    })
}

#[derive(Clone, Debug)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
}

/// Ordinary least squares line through (xs, ys).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFit> {
    if xs.len() != ys.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            found: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::ScheduleTooShort {
            need: 2,
            got: xs.len(),
        });
    }
    let m = xs.len() as f64;
    let xbar = xs.iter().sum::<f64>() / m;
    let ybar = ys.iter().sum::<f64>() / m;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - xbar) * (x - xbar);
        sxy += (x - xbar) * (y - ybar);
    }
    if sxx <= 0.0 {
        return Err(Error::PreconditionFailed {
            subject: "linear fit".into(),
            detail: "abscissas are all equal".into(),
        });
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let mut rss = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let r = y - intercept - slope * x;
        rss += r * r;
    }
    let dof = (m - 2.0).max(1.0);
    let slope_stderr = (rss / dof / sxx).sqrt();
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
    })
}

/// Evaluation radii for flux extrapolation: geometric on cartesian ends,
/// arithmetic in rho on polar charts.
#[derive(Clone, Debug, PartialEq)]
pub enum Schedule {
    /// r_k = start * ratio^k, k = 0..count
    Geometric { start: f64, ratio: f64, count: usize },
    /// r_k = start + step * k, k = 0..count
    Arithmetic { start: f64, step: f64, count: usize },
}

impl Schedule {
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(start > 0.0) || !start.is_finite() {
            return Err(Error::InvalidParameter {
                name: "schedule.start".into(),
                reason: format!("must be positive, got {start}"),
            });
        }
        if !(ratio > 1.0) || !ratio.is_finite() {
            return Err(Error::InvalidParameter {
                name: "schedule.ratio".into(),
                reason: format!("must exceed 1, got {ratio}"),
            });
        }
        if count < 4 {
            return Err(Error::ScheduleTooShort { need: 4, got: count });
        }
        Ok(Schedule::Geometric { start, ratio, count })
    }

    pub fn arithmetic(start: f64, step: f64, count: usize) -> Result<Self> {
        if !(start > 0.0) || !start.is_finite() {
            return Err(Error::InvalidParameter {
                name: "schedule.start".into(),
                reason: format!("must be positive, got {start}"),
            });
        }
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidParameter {
                name: "schedule.step".into(),
                reason: format!("must be positive, got {step}"),
            });
        }
        if count < 4 {
            return Err(Error::ScheduleTooShort { need: 4, got: count });
        }
        Ok(Schedule::Arithmetic { start, step, count })
    }

    /// Default radii for cartesian flux integrals: 32 * 2^k, five values.
    pub fn cartesian_default() -> Self {
        Schedule::Geometric {
            start: 32.0,
            ratio: 2.0,
            count: 5,
        }
    }

    /// Default rho values for polar flux integrals: 3.0 + 0.5 k, six values.
    pub fn polar_default() -> Self {
        Schedule::Arithmetic {
            start: 3.0,
            step: 0.5,
            count: 6,
        }
    }

    pub fn count(&self) -> usize {
        match *self {
            Schedule::Geometric { count, .. } | Schedule::Arithmetic { count, .. } => count,
        }
    }

    pub fn points(&self) -> Vec<f64> {
        match *self {
            Schedule::Geometric { start, ratio, count } => {
                (0..count).map(|k| start * ratio.powi(k as i32)).collect()
            }
            Schedule::Arithmetic { start, step, count } => {
                (0..count).map(|k| start + step * k as f64).collect()
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            Schedule::Geometric { start, ratio, count } => {
                format!("geometric start={start} ratio={ratio} count={count}")
            }
            Schedule::Arithmetic { start, step, count } => {
                format!("arithmetic start={start} step={step} count={count}")
            }
        }
    }
}

/// Decay samples below this magnitude are treated as identically zero.
pub const DECAY_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug)]
pub enum DecaySlope {
    Slope(LinearFit),
    /// Every usable sample sat below the floor; nothing to fit.
    BelowFloor,
}

/// Slope of log(values) against the given abscissas, ignoring samples at or
/// below the floor. Used with abscissa = log r for power decay and
/// abscissa = rho for exponential decay.
pub fn decay_slope(abscissas: &[f64], values: &[f64]) -> Result<DecaySlope> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&a, &v) in abscissas.iter().zip(values) {
        if v.abs() > DECAY_FLOOR {
            xs.push(a);
            ys.push(v.abs().ln());
        }
    }
    if xs.len() < 2 {
        return Ok(DecaySlope::BelowFloor);
    }
    Ok(DecaySlope::Slope(linear_fit(&xs, &ys)?))
}

/// One fitted decay rate with the slope it must not exceed.
#[derive(Clone, Debug)]
pub struct DecayRow {
    pub quantity: String,
    /// Greatest acceptable slope of log(value) against the abscissa.
    pub threshold: f64,
    /// Fitted slope; None when every sample sat at or below the floor.
    pub fitted: Option<f64>,
    pub stderr: Option<f64>,
    pub samples: Vec<f64>,
    pub pass: bool,
}

/// Decay-rate admissibility report: one row per controlled quantity, all
/// fitted against the same abscissas (log r on cartesian ends, rho on
/// polar charts).
#[derive(Clone, Debug)]
pub struct DecayReport {
    pub abscissas: Vec<f64>,
    pub rows: Vec<DecayRow>,
    pub pass: bool,
}

impl DecayReport {
    pub fn new(abscissas: Vec<f64>, rows: Vec<DecayRow>) -> Self {
        let pass = rows.iter().all(|r| r.pass);
        DecayReport { abscissas, rows, pass }
    }
}

/// Fit one decay row: samples identically below the floor pass vacuously,
/// otherwise the fitted slope must not exceed the threshold.
pub fn decay_row(
    quantity: &str,
    threshold: f64,
    abscissas: &[f64],
    samples: Vec<f64>,
) -> Result<DecayRow> {
    match decay_slope(abscissas, &samples)? {
        DecaySlope::BelowFloor => Ok(DecayRow {
            quantity: quantity.to_owned(),
            threshold,
            fitted: None,
            stderr: None,
            samples,
            pass: true,
        }),
        DecaySlope::Slope(fit) => Ok(DecayRow {
            quantity: quantity.to_owned(),
            threshold,
            fitted: Some(fit.slope),
            stderr: Some(fit.slope_stderr),
            samples,
            pass: fit.slope <= threshold,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_power_tail() {
        let xs: Vec<f64> = vec![4.0, 8.0, 16.0, 32.0, 64.0];
        let ys: Vec<f64> = xs.iter().map(|r| 3.0 + 2.0 * r.powf(-2.0)).collect();
        let fit = fit_tail(TailModel::Power, &xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.limit, 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.rate, 2.0, epsilon = 1e-4);
        assert!(!fit.constant);
        assert!(fit.stderr < 1e-8, "stderr = {}", fit.stderr);
    }

    #[test]
    fn exact_exponential_tail() {
        let xs: Vec<f64> = vec![2.0, 3.0, 4.0, 5.0, 6.0];
        let ys: Vec<f64> = xs.iter().map(|r| -1.0 + 0.5 * (-1.5 * r).exp()).collect();
        let fit = fit_tail(TailModel::Exponential, &xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.limit, -1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(fit.rate, 1.5, epsilon = 1e-4);
    }

    #[test]
    fn constant_samples_short_circuit() {
        let xs = vec![4.0, 8.0, 16.0, 32.0];
        let ys = vec![7.0; 4];
        let fit = fit_tail(TailModel::Power, &xs, &ys).unwrap();
        assert!(fit.constant);
        assert_abs_diff_eq!(fit.limit, 7.0, epsilon = 1e-14);
        assert_eq!(fit.stderr, 0.0);
    }

    #[test]
    fn subleading_contamination_stays_small() {
        let xs: Vec<f64> = vec![8.0, 16.0, 32.0, 64.0, 128.0];
        let ys: Vec<f64> = xs
            .iter()
            .map(|r| 1.0 + r.powf(-1.0) + 1e-6 * r.powf(-3.0))
            .collect();
        let fit = fit_tail(TailModel::Power, &xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.limit, 1.0, epsilon = 1e-7);
    }

    #[test]
    fn exact_line() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * x).collect();
        let fit = linear_fit(&xs, &ys).unwrap();
        assert_abs_diff_eq!(fit.slope, -3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.intercept, 2.0, epsilon = 1e-12);
        assert!(fit.slope_stderr < 1e-12);
    }

    #[test]
    fn floor_drops_zero_rows() {
        let xs = vec![1.0, 2.0, 3.0, 4.0];
        let ys = vec![0.0, 1e-16, 0.0, 1e-15];
        match decay_slope(&xs, &ys).unwrap() {
            DecaySlope::BelowFloor => {}
            DecaySlope::Slope(_) => panic!("expected floor"),
        }
    }

    #[test]
    fn schedule_points() {
        let s = Schedule::geometric(32.0, 2.0, 5).unwrap();
        assert_eq!(s.points(), vec![32.0, 64.0, 128.0, 256.0, 512.0]);
        let a = Schedule::arithmetic(3.0, 0.5, 6).unwrap();
        assert_eq!(a.points(), vec![3.0, 3.5, 4.0, 4.5, 5.0, 5.5]);
        assert!(Schedule::geometric(32.0, 1.0, 5).is_err());
        assert!(Schedule::arithmetic(3.0, 0.5, 3).is_err());
        assert!(Schedule::geometric(-1.0, 2.0, 5).is_err());
    }

    #[test]
    fn decay_row_thresholds() {
        let rs = [4.0_f64, 8.0, 16.0, 32.0];
        let xs: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
        let vals: Vec<f64> = rs.iter().map(|r| 2.0 * r.powf(-1.5)).collect();
        let row = decay_row("test quantity", -0.9, &xs, vals.clone()).unwrap();
        assert!(row.pass);
        assert_abs_diff_eq!(row.fitted.unwrap(), -1.5, epsilon = 1e-10);
        let row = decay_row("test quantity", -2.0, &xs, vals).unwrap();
        assert!(!row.pass);
        let row = decay_row("zero", -0.9, &xs, vec![0.0; 4]).unwrap();
        assert!(row.pass);
        assert!(row.fitted.is_none());
    }

    #[test]
    fn power_decay_slope() {
        let rs = [4.0, 8.0, 16.0, 32.0];
        let xs: Vec<f64> = rs.iter().map(|r: &f64| r.ln()).collect();
        let vals: Vec<f64> = rs.iter().map(|r| 5.0 * r.powf(-2.5)).collect();
        match decay_slope(&xs, &vals).unwrap() {
            DecaySlope::Slope(fit) => assert_abs_diff_eq!(fit.slope, -2.5, epsilon = 1e-10),
            DecaySlope::BelowFloor => panic!("expected slope"),
        }
    }
}
