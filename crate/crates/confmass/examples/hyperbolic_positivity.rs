// Scalar-curvature hypothesis and causal mass conclusion on a hyperbolic
// end, with and without an inner boundary sphere. The boundary report
// records which orientation of the mean curvature meets the Yamabe-type
// bound.

use confmass::families;
use confmass::fit::Schedule;
use confmass::hyperbolic::{
    check_theorem_ah, AhData, BoundarySpec, KillingData, DEFAULT_CAUSAL_BAND,
};
use confmass::quad::SphereRule;

fn sample_points() -> Vec<Vec<f64>> {
    (0..40)
        .map(|i| {
            let t = i as f64 / 40.0;
            let rho = 1.05 + 1.45 * t;
            let theta = 0.4 + 2.3 * (0.618_033_988_749_894_8 * i as f64).fract();
            let phi = std::f64::consts::TAU * (0.414_213_562_373_095_1 * i as f64).fract();
            vec![rho, theta, phi]
        })
        .collect()
}

fn main() -> confmass::Result<()> {
    let dim = 3;
    let rule = SphereRule::new(dim, 24)?;
    let schedule = Schedule::arithmetic(3.0, 0.5, 6)?;
    let killing = KillingData::new(dim)?;
    let (f, _) = families::make_factor("ah_factor", &[0.05, dim as f64], dim)?;
    let points = sample_points();

    let data = AhData::from_bundle(families::make_geometry("hyperbolic", &[], dim)?)?;
    for beta in [0.25, 0.75] {
        let report = check_theorem_ah(
            &data,
            &f,
            beta,
            &points,
            Some(BoundarySpec::round(dim, 1.0)),
            &killing,
            &rule,
            &schedule,
            1e-3,
            DEFAULT_CAUSAL_BAND,
        )?;
        println!("hyperbolic + ah_factor, beta = {beta}");
        println!(
            "  hypothesis {} (min slack {:+.3e}), causal class {}, conclusion {}, violation {}",
            report.hypothesis_satisfied,
            report.scalar_min_slack,
            report.causal.label(),
            report.conclusion_holds,
            report.violation,
        );
        let b = report.boundary.as_ref().unwrap();
        println!(
            "  boundary rho = {}: bound {:.6}, H(away) = {:.6}, H(toward) = {:.6}, satisfied: {:?}",
            b.rho, b.bound, b.h_away_from_infinity, b.h_toward_infinity, b.satisfied_orientation,
        );
        assert!(report.hypothesis_satisfied && report.conclusion_holds && !report.violation);
        assert!(b.satisfied_orientation.is_some());
    }

    let ads = AhData::from_bundle(families::make_geometry("ads_schwarzschild", &[0.5], dim)?)?;
    let report = check_theorem_ah(
        &ads,
        &f,
        0.5,
        &points,
        None,
        &killing,
        &rule,
        &schedule,
        1e-3,
        DEFAULT_CAUSAL_BAND,
    )?;
    println!("{} + ah_factor, beta = 0.5", ads.label);
    println!(
        "  combined mass vector {:?}, causal class {}, violation {}",
        report.combined,
        report.causal.label(),
        report.violation,
    );
    assert!(!report.violation && report.converged);
    Ok(())
}
