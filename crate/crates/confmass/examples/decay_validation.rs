//! Admissibility tables: fitted decay exponents of every quantity that the
//! mass integrals depend on, compared against the rate each end requires.
//!
//! A row passes when the fitted slope is at least as steep as the claim
//! (within fit error) or the quantity is already at the noise floor.

use confmass::adm::{validate_af, InitialData};
use confmass::families;
use confmass::fit::{DecayReport, Schedule};
use confmass::hyperbolic::{validate_ah, AhData};
use confmass::quad::SphereRule;

fn print_report(title: &str, report: &DecayReport) {
    println!("{title}");
    for row in &report.rows {
        let fitted = row
            .fitted
            .map(|s| format!("{s:+.4}"))
            .unwrap_or_else(|| "constant".into());
        println!(
            "  {:4}  {:<28} threshold {:+.3}  fitted {}",
            if row.pass { "ok" } else { "FAIL" },
            row.quantity,
            row.threshold,
            fitted,
        );
    }
    println!();
}

fn main() -> confmass::Result<()> {
    let rule = SphereRule::new(3, 24)?;
    let af_schedule = Schedule::geometric(32.0, 2.0, 5)?;
    let ah_schedule = Schedule::arithmetic(3.0, 0.5, 6)?;

    let (f, f_decay) = families::make_factor("af_factor", &[0.2, 1.0], 3)?;
    let data = InitialData::from_bundle(
        families::make_geometry("schwarzschild_isotropic", &[1.0], 3)?,
        InitialData::DEFAULT_EPSILON,
    )?;
    let report = validate_af(&data, Some((&f, f_decay)), &rule, &af_schedule)?;
    print_report("flat end, schwarzschild_isotropic(1) + af_factor(0.2,1)", &report);
    assert!(report.pass);

    let data = AhData::from_bundle(families::make_geometry("ah_conformal", &[0.1, 3.0], 3)?)?;
    let report = validate_ah(&data, None, &rule, &ah_schedule)?;
    print_report("hyperbolic end, ah_conformal(0.1,3)", &report);
    assert!(report.pass);

    // decay rate 1 undershoots what the mass integral needs; the table
    // catches it instead of silently producing a divergent extrapolation
    let slow = AhData::from_bundle(families::make_geometry("ah_conformal", &[0.1, 1.0], 3)?)?;
    let report = validate_ah(&slow, None, &rule, &ah_schedule)?;
    print_report("hyperbolic end, ah_conformal(0.1,1) [inadmissible]", &report);
    assert!(!report.pass);
    Ok(())
}
