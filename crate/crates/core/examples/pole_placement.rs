//! Observer gain placement with real and complex poles.

use lti_canon::{design_observer, poly_from_roots, Root, System};

fn main() -> lti_canon::Result<()> {
    let sys = System::from_parts(
        &[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-2.0, 1.5, 0.4]],
        None,
        &[1.0, 0.5, 0.0],
    )?;
    let cases = [
        (
            "real",
            vec![Root::real(-1.0), Root::real(-2.0), Root::real(-3.0)],
        ),
        (
            "complex pair",
            vec![
                Root::real(-4.0),
                Root::complex(-2.0, 3.0),
                Root::complex(-2.0, -3.0),
            ],
        ),
    ];
    for (label, roots) in cases {
        let desired = poly_from_roots(&roots)?;
        let d = design_observer(&sys, &desired)?;
        println!("{label} poles, desired coefficients {:?}", desired.coeffs());
        println!("  plant coefficients    {:?}", d.plant.coeffs());
        println!(
            "  gain (observer basis) {:?}",
            d.gain_observer_coords.as_slice()
        );
        println!(
            "  gain (original basis) {:?}",
            d.gain_original_coords.as_slice()
        );
        println!(
            "  residual {:.1e}, condition estimate {:.1e}",
            d.residual, d.condition_estimate
        );
        if let Some(w) = &d.warning {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
