//! Controllability through the dual system, and the controller form
//! obtained by transposing the dual's observer form.

use lti_canon::{controllability_matrix, dualize, is_observable, to_observer_form, System};

fn main() -> lti_canon::Result<()> {
    let sys = System::from_parts(&[[1.0, 2.0], [3.0, 4.0]], Some(&[0.0, 1.0]), &[1.0, 0.0])?;
    let dual = dualize(&sys)?;
    let ctrb = controllability_matrix(sys.a(), sys.b().expect("B was given"))?;
    println!("controllability matrix:\n{ctrb}");
    println!("controllability rank {}", ctrb.rank_with_tolerance(0.0));
    println!(
        "observability rank of the dual {}",
        is_observable(&dual).rank
    );

    let controller = dualize(&to_observer_form(&dual)?.system)?;
    println!("\ncontroller form A:\n{}", controller.a());
    println!(
        "controller form B:\n{}",
        controller.b().expect("dual carries B")
    );
    println!("involution holds: {}", dualize(&dual)? == sys);

    // block triangular with B confined to the first block: uncontrollable
    let blocked = System::from_parts(&[[1.0, 1.0], [0.0, 2.0]], Some(&[1.0, 0.0]), &[1.0, 1.0])?;
    let rank = controllability_matrix(blocked.a(), blocked.b().unwrap())?.rank_with_tolerance(0.0);
    println!(
        "\nblock triangular system: controllability rank {rank}, dual observable: {}",
        is_observable(&dualize(&blocked)?).observable
    );
    Ok(())
}
