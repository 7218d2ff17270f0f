//! Plant and observer integrated together; the estimation error decays at
//! the slowest designed pole.

use lti_canon::sim::estimate_decay_rate_default;
use lti_canon::{design_observer, estimate_decay_rate, poly_from_roots, simulate, Root, System};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sys = System::from_parts(&[[1.0, 2.0], [3.0, 4.0]], None, &[1.0, 0.0])?;
    let desired = poly_from_roots(&[Root::real(-1.0), Root::real(-2.0)])?;
    let l = design_observer(&sys, &desired)?.gain_original_coords;

    let traj = simulate(&sys, &l, &[1.0, 0.0], &[0.0, 0.0], 1e-3, 10_000)?;
    for k in (0..traj.len()).step_by(1000) {
        println!(
            "t = {:>4.1}  |e| = {:.6e}",
            traj.times[k], traj.error_norms[k]
        );
    }
    println!(
        "decay rate on [5, 10]: {:.4}",
        estimate_decay_rate(&traj, 5.0, 10.0)?
    );
    println!(
        "decay rate on the last half: {:.4}",
        estimate_decay_rate_default(&traj)?
    );

    let path = std::env::temp_dir().join("lti_canon_trajectory.csv");
    traj.write_csv(std::io::BufWriter::new(std::fs::File::create(&path)?))?;
    println!("trajectory written to {}", path.display());
    Ok(())
}
