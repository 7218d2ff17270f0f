//! The inverse of the Toeplitz transform from generalized Fibonacci values,
//! checked against an LU inverse.

use lti_canon::{build_p, fibonacci_sequence, MonicPoly};

fn main() -> lti_canon::Result<()> {
    let p = MonicPoly::new(vec![0.7, -1.3, 0.2, 1.8, -0.6, 1.1])?;
    let fib = fibonacci_sequence(&p);
    println!("coefficients a0..a5: {:?}", p.coeffs());
    println!("F_0..F_5: {:?}", fib.values());

    let t = build_p(&p)?;
    let lu = t.matrix().inverse()?;
    println!("\nP:\n{}", t.matrix());
    println!("P^-1 (Fibonacci):\n{}", t.inverse());
    println!("|P^-1 - inv(P)| = {:.2e}", t.inverse().max_abs_diff(&lu));
    Ok(())
}
