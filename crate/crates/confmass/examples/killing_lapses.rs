// The n+1 model lapse functions on hyperbolic space: each one satisfies
// the conformal Killing-type Hessian identity Hess V = V g, its gradient
// field has divergence n V, and the asymptotic frame they are measured in
// is orthonormal to rounding at any radius.

use confmass::families;
use confmass::hyperbolic::{
    conformal_killing_residual, frame_metric_data, killing_divergence, KillingData,
};
use confmass::numeric::scaled_residual;

fn main() -> confmass::Result<()> {
    for dim in [3usize, 4] {
        let killing = KillingData::new(dim)?;
        let g = families::make_geometry("hyperbolic", &[], dim)?;

        // chart layout: rho, then dim-2 polar angles in (0, pi), then azimuth
        let points: Vec<Vec<f64>> = (0..60)
            .map(|i| {
                let t = i as f64 / 60.0;
                let mut x = vec![0.6 + 2.4 * t];
                for k in 0..dim - 2 {
                    x.push(0.5 + 2.0 * (((13 + 7 * k) * i % 60) as f64 / 60.0));
                }
                x.push(0.3 + 5.0 * ((17 * i % 60) as f64 / 60.0));
                x
            })
            .collect();

        let mut worst_killing = 0.0f64;
        let mut worst_div = 0.0f64;
        let mut worst_frame = 0.0f64;
        for x in &points {
            for i in 0..killing.count() {
                let residual = conformal_killing_residual(g.metric.as_ref(), &killing, i, x)?;
                worst_killing = worst_killing.max(residual.amax());

                let div = killing_divergence(g.metric.as_ref(), &killing, i, x)?;
                let expected = dim as f64 * killing.lapse(i, x);
                worst_div = worst_div.max(scaled_residual(div, expected));
            }
            let frame = frame_metric_data(g.metric.as_ref(), x)?;
            let mut gf = frame.gf.clone();
            for d in 0..dim {
                gf[(d, d)] -= 1.0;
            }
            worst_frame = worst_frame.max(gf.amax());
        }

        println!("dimension {dim}: {} model lapses", killing.count());
        println!("  worst Hess V - V g entry      {worst_killing:.3e}");
        println!("  worst div(grad V) - n V       {worst_div:.3e}");
        println!("  worst frame orthonormality    {worst_frame:.3e}");
        assert!(worst_killing < 1e-10 && worst_div < 1e-10 && worst_frame < 1e-10);
    }
    Ok(())
}
