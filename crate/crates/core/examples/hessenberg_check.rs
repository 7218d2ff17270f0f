//! Determinants of the lower Hessenberg matrices against F_k, and the sign
//! convention that reconciles them.

use lti_canon::{consistent_convention, hessenberg_det_check, hessenberg_matrix, MonicPoly};

fn main() -> lti_canon::Result<()> {
    let p = MonicPoly::new(vec![1.0, 2.0, 3.0, -1.5, 0.5])?;
    let n = p.degree();
    let mut checks = Vec::new();
    for k in 1..n {
        let check = hessenberg_det_check(&p, k)?;
        println!("H_{k}:\n{}", hessenberg_matrix(&p, k)?);
        println!(
            "det = {:>10.4}  F_{k} = {:>10.4}  |det| = |F|: {:<5}  conventions: {:?}\n",
            check.det,
            check.fib,
            check.matches_fk,
            check
                .conventions
                .iter()
                .map(|c| c.name())
                .collect::<Vec<_>>()
        );
        checks.push(check);
    }
    match consistent_convention(&checks) {
        Some(c) => println!("consistent convention: {}", c.name()),
        None => println!("no single convention fits every k"),
    }
    Ok(())
}
