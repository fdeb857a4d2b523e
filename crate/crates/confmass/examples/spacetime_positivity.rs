//! The deformed dominant-energy hypothesis and its mass conclusion on a
//! flat end, with one data set that satisfies it exactly and one negative
//! control that cannot.
//!
//! The hypothesis is sampled pointwise; the conclusion combines the two
//! endpoint energies. A "violation" would need the hypothesis to clearly
//! hold while the conclusion clearly fails, and never appears.

use confmass::adm::{check_theorem_spacetime, InitialData, DEFAULT_THEOREM_BAND};
use confmass::families;
use confmass::fit::Schedule;
use confmass::quad::SphereRule;

fn sample_points() -> Vec<Vec<f64>> {
    // deterministic ring of points between the sphere radii
    (0..40)
        .map(|i| {
            let t = i as f64 / 40.0;
            let r = 4.0 + 16.0 * t;
            let a = std::f64::consts::TAU * (0.618_033_988_749_894_8 * i as f64).fract();
            vec![0.8 * r * a.cos(), 0.8 * r * a.sin(), 0.6 * r]
        })
        .collect()
}

fn main() -> confmass::Result<()> {
    let rule = SphereRule::new(3, 24)?;
    let schedule = Schedule::geometric(32.0, 2.0, 5)?;
    let points = sample_points();

    // the logarithmic factor built from the Schwarzschild mass profile
    // turns flat data into an exact vacuum slice: hypothesis marginal,
    // conclusion energy beta * m > 0
    let flat = InitialData::from_bundle(
        families::make_geometry("flat", &[], 3)?,
        InitialData::DEFAULT_EPSILON,
    )?;
    let (f, f_decay) = families::make_factor("mass_log", &[1.0], 3)?;
    for beta in [0.25, 0.5, 1.0] {
        let report = check_theorem_spacetime(
            &flat, &f, f_decay, beta, &points, &rule, &schedule, 1e-3, DEFAULT_THEOREM_BAND,
        )?;
        println!(
            "flat + mass_log(1), beta = {beta:4}: hypothesis {} (min slack {:+.2e}), \
             energy combination {:+.8}, conclusion {}, violation {}",
            report.hypothesis_satisfied,
            report.hypothesis_min_slack,
            report.energy_combination,
            report.conclusion_holds,
            report.violation,
        );
        assert!(report.hypothesis_satisfied && report.conclusion_holds && !report.violation);
    }

    // negative control: a harmonic factor on flat data makes the deformed
    // energy density strictly negative, so the hypothesis must fail
    let (g, g_decay) = families::make_factor("af_factor", &[0.2, 1.0], 3)?;
    let report = check_theorem_spacetime(
        &flat, &g, g_decay, 0.5, &points, &rule, &schedule, 1e-3, DEFAULT_THEOREM_BAND,
    )?;
    println!(
        "flat + af_factor(0.2,1), beta = 0.5: hypothesis {} (min slack {:+.2e}), violation {}",
        report.hypothesis_satisfied, report.hypothesis_min_slack, report.violation,
    );
    assert!(!report.hypothesis_satisfied && !report.violation);
    Ok(())
}
