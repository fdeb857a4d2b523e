// Convex interpolation of the hyperbolic mass vector under conformal
// deformation, component by component.

use confmass::families;
use confmass::fit::Schedule;
use confmass::hyperbolic::{check_ah_linearity, AhData, KillingData, DEFAULT_CAUSAL_BAND};
use confmass::quad::SphereRule;

fn main() -> confmass::Result<()> {
    let dim = 3;
    let rule = SphereRule::new(dim, 24)?;
    let schedule = Schedule::arithmetic(3.0, 0.5, 6)?;
    let killing = KillingData::new(dim)?;
    // decay rate n keeps the deformed scalar defect integrable against the
    // e^rho shell weight
    let (f, f_decay) = families::make_factor("ah_factor", &[0.05, dim as f64], dim)?;

    let data = AhData::from_bundle(families::make_geometry("ads_schwarzschild", &[0.5], dim)?)?;
    println!("mass-vector interpolation on {}", data.label);
    for beta in [0.25, 0.5, 0.75] {
        let report = check_ah_linearity(
            &data,
            &f,
            f_decay,
            beta,
            &killing,
            &rule,
            &schedule,
            1e-3,
            DEFAULT_CAUSAL_BAND,
        )?;
        let base = report.base.limits();
        let unit = report.unit.limits();
        let deformed = report.deformed.limits();
        println!("  beta = {beta}");
        for i in 0..killing.count() {
            let mix = (1.0 - beta) * base[i] + beta * unit[i];
            println!(
                "    m{i}: base {:+.6e}  unit {:+.6e}  deformed {:+.6e}  mix {:+.6e}",
                base[i], unit[i], deformed[i], mix
            );
        }
        println!(
            "    worst component residual {:.2e} (fit-error bound {:.2e})",
            report.component_residual, report.residual_bound
        );
        assert!(report.component_residual < 1e-3_f64.max(report.residual_bound));
    }
    Ok(())
}
