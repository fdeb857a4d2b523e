//! Energy and linear momentum of a flat end, read off coordinate spheres.
//!
//! The flux integrals are evaluated on a doubling schedule of radii and the
//! limit at infinity is extrapolated with a fitted tail model. Schwarzschild
//! in isotropic coordinates recovers the mass parameter; seeded momentum
//! data recovers its momentum vector at every radius.

use confmass::adm::{adm_energy_momentum, adm_flux, InitialData, DEFAULT_RESIDUAL_TOL};
use confmass::families;
use confmass::fit::Schedule;
use confmass::quad::SphereRule;

fn main() -> confmass::Result<()> {
    let rule = SphereRule::new(3, 24)?;
    let schedule = Schedule::geometric(32.0, 2.0, 5)?;

    for m in [0.5, 1.0, 2.0] {
        let data = InitialData::from_bundle(
            families::make_geometry("schwarzschild_isotropic", &[m], 3)?,
            InitialData::DEFAULT_EPSILON,
        )?;
        let result = adm_energy_momentum(&data, &rule, &schedule, DEFAULT_RESIDUAL_TOL)?;
        println!("{}", data.label);
        for (r, e) in result.radii.iter().zip(&result.energy_samples) {
            println!("  r = {r:>6}   energy flux = {e:.10}");
        }
        println!(
            "  extrapolated energy = {:.10}  (mass parameter {m}, stderr {:.2e}, converged: {})",
            result.energy.limit, result.energy.stderr, result.converged
        );
        println!();
    }

    // momentum data: exactly flat metric, transverse-traceless extrinsic
    // curvature seeded with momentum p; the flux is p at every radius
    let p = [0.1, -0.2, 0.3];
    let (metric, k) = families::momentum_seed(p)?;
    let data = InitialData::new(
        format!("momentum seed p = {p:?}"),
        metric,
        Some(k),
        Some(1.0),
        InitialData::DEFAULT_EPSILON,
    )?;
    println!("{}", data.label);
    for r in [4.0, 16.0, 64.0] {
        let flux = adm_flux(&data, &rule, r)?;
        println!(
            "  r = {r:>4}   momentum flux = [{:+.10}, {:+.10}, {:+.10}]",
            flux.momentum[0], flux.momentum[1], flux.momentum[2]
        );
    }
    Ok(())
}
