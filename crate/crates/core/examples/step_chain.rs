//! The elementary factors P_i applied one at a time.

use lti_canon::realizations::step_form_matrix;
use lti_canon::{build_p, realization_sequence, step_product, MonicPoly, System};

fn main() -> lti_canon::Result<()> {
    // s^4 + 2 s^3 - s^2 + 0.5 s + 3
    let p = MonicPoly::new(vec![3.0, 0.5, -1.0, 2.0])?;
    let sys = System::new(p.companion(), None, lti_canon::Matrix::unit_row(4, 0))?;
    let trace = realization_sequence(&sys)?;

    for step in &trace.steps {
        println!("m = {}", step.m);
        if step.m > 0 {
            println!("P_{}:\n{}", step.m, step.p);
        }
        println!("A_{}:\n{}", step.m, step.a);
        println!(
            "distance to predicted layout: {:.1e}, C_m = {:?}\n",
            step.a.max_abs_diff(&step_form_matrix(&p, step.m)),
            step.c.as_slice()
        );
    }
    let gap = step_product(&p)?
        .matrix()
        .max_abs_diff(build_p(&p)?.matrix());
    println!("|P_3 P_2 P_1 - P| = {gap:.1e}");
    Ok(())
}
