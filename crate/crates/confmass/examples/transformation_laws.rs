//! Pointwise transformation laws under g -> e^{2 beta f} g.
//!
//! Every law has two independent evaluations: the closed-form expression in
//! base-metric quantities, and direct curvature assembly on the deformed
//! metric field. The printed residuals are the worst scaled differences
//! over a small sample of points.

use confmass::conformal::{self, Deformation};
use confmass::curvature::curvature_at;
use confmass::families;
use confmass::numeric::scaled_residual;

fn main() -> confmass::Result<()> {
    let g = families::make_geometry("schwarzschild_isotropic", &[1.0], 3)?;
    let (f, _) = families::make_factor("af_factor", &[0.2, 1.0], 3)?;
    let beta = 0.75;

    let deformation = Deformation::new(g.metric.clone(), f.clone(), beta)?;
    let deformed = deformation.deformed_metric();

    let points = [
        vec![3.0, 1.0, -0.5],
        vec![-2.0, 4.0, 1.5],
        vec![0.5, -6.0, 2.0],
        vec![7.0, 7.0, -7.0],
    ];

    let mut worst_gamma = 0.0f64;
    let mut worst_ricci = 0.0f64;
    let mut worst_scalar = 0.0f64;
    for x in &points {
        let base = curvature_at(g.metric.as_ref(), x)?;
        let direct = curvature_at(deformed.as_ref(), x)?;
        let fd = conformal::factor_data(&base, f.as_ref(), x);

        let gamma = conformal::christoffel_deformed(&base, &fd, beta);
        let ricci = conformal::ricci_deformed(&base, &fd, beta);
        let scalar = conformal::scalar_deformed(&base, &fd, beta);

        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    worst_gamma = worst_gamma
                        .max(scaled_residual(gamma.get(k, i, j), direct.gamma.get(k, i, j)));
                }
            }
        }
        worst_ricci = ricci
            .iter()
            .zip(direct.ricci.iter())
            .map(|(a, b)| scaled_residual(*a, *b))
            .fold(worst_ricci, f64::max);
        worst_scalar = worst_scalar.max(scaled_residual(scalar, direct.scalar));
    }

    println!("transformation laws on {} with beta = {beta}", g.label);
    println!("  Christoffel symbols   worst residual {worst_gamma:.3e}");
    println!("  Ricci tensor          worst residual {worst_ricci:.3e}");
    println!("  scalar curvature      worst residual {worst_scalar:.3e}");

    // constraint densities transform the same way: formula vs direct
    let (metric, k) = families::momentum_seed([0.1, -0.2, 0.3])?;
    let data = confmass::adm::InitialData::new(
        "momentum seed".into(),
        metric,
        Some(k),
        Some(1.0),
        confmass::adm::InitialData::DEFAULT_EPSILON,
    )?;
    let deformed_data = data.deformed(&f, beta, Some(1.0))?;
    let mut worst_mu = 0.0f64;
    let mut worst_j = 0.0f64;
    for x in &points {
        let base = curvature_at(data.metric.as_ref(), x)?;
        let fd = conformal::factor_data(&base, f.as_ref(), x);
        let c = data.constraints_at(x)?;
        let direct = deformed_data.constraints_at(x)?;

        let mu = conformal::mu_deformed(c.mu, &fd, beta, 3);
        worst_mu = worst_mu.max(scaled_residual(mu, direct.mu));

        // momentum density: raise K, apply the closed form componentwise
        let k_down = data.k_field().components(x);
        let k_up = &base.point.inverse * k_down * &base.point.inverse;
        let j = conformal::j_deformed(&c.j, &k_up, &fd, beta, 3);
        for i in 0..3 {
            worst_j = worst_j.max(scaled_residual(j[i], direct.j[i]));
        }
    }
    println!("  energy density mu     worst residual {worst_mu:.3e}");
    println!("  momentum density J    worst residual {worst_j:.3e}");
    Ok(())
}
