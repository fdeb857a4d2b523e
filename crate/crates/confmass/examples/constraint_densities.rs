//! Hamiltonian and momentum constraint densities of seeded data, before
//! and after a conformal deformation.

use confmass::adm::InitialData;
use confmass::families;

fn main() -> confmass::Result<()> {
    let (metric, k) = families::momentum_seed([0.1, -0.2, 0.3])?;
    let data = InitialData::new(
        "momentum seed".into(),
        metric,
        Some(k),
        Some(1.0),
        InitialData::DEFAULT_EPSILON,
    )?;

    let points = [
        vec![3.0, 0.5, 1.0],
        vec![-4.0, 2.0, -1.0],
        vec![6.0, -3.0, 2.0],
        vec![-8.0, 1.0, 5.0],
    ];

    println!("{:>22}  {:>13}  {:>12}  {:>12}  {:>12}", "point", "mu", "|J|", "tr K", "|K|^2");
    for x in &points {
        let c = data.constraints_at(x)?;
        let j_norm = c.j.norm();
        println!(
            "{:>22}  {:>13.6e}  {:>12.6e}  {:>12.6e}  {:>12.6e}",
            format!("{x:?}"),
            c.mu,
            j_norm,
            c.k_trace,
            c.k_norm2
        );
        // transverse-traceless seed: vacuum momentum constraint, mu < 0
        assert!(c.mu < 0.0 && j_norm < 1e-10 && c.k_trace.abs() < 1e-12);
    }

    // deforming with a non-harmonic profile shifts mu by the Laplacian and
    // gradient terms of the factor
    let (f, f_decay) = families::make_factor("mass_log", &[1.0], 3)?;
    let deformed = data.deformed(&f, 0.5, Some(f_decay))?;
    println!("\nafter deformation by mass_log(1) at beta = 0.5:");
    for x in &points {
        let c = deformed.constraints_at(x)?;
        println!(
            "{:>22}  mu = {:+.6e}   |J| = {:.6e}",
            format!("{x:?}"),
            c.mu,
            c.j.norm()
        );
    }
    Ok(())
}
