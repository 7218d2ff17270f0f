//! The 2x2 system taken from observability to observer form.

use lti_canon::{to_observer_form, System};

fn main() -> lti_canon::Result<()> {
    let sys = System::from_parts(&[[1.0, 2.0], [3.0, 4.0]], Some(&[0.0, 1.0]), &[1.0, 0.0])?;
    let r = to_observer_form(&sys)?;
    let (obsv, o) = &r.observability;

    println!(
        "characteristic coefficients (a0, a1): {:?}",
        r.charpoly().coeffs()
    );
    println!("\nobservability matrix O:\n{}", o.matrix());
    println!("A in observability form:\n{}", obsv.a());
    println!("Toeplitz P:\n{}", r.toeplitz.matrix());
    println!("P^-1 from the Fibonacci values:\n{}", r.toeplitz.inverse());
    println!("A in observer form:\n{}", r.system.a());
    println!("T = P O:\n{}", r.transform.matrix());
    println!(
        "B in observer form:\n{}",
        r.system.b().expect("B was given")
    );
    Ok(())
}
