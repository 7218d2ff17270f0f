#![allow(dead_code)]

use lti_canon::{is_observable, Matrix, MonicPoly, System};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const ENTRY_RANGE: f64 = 2.0;
pub const MAX_CONDITION: f64 = 1e4;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..=hi)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::new(
        rows,
        cols,
        uniform_vec(rng, rows * cols, -ENTRY_RANGE, ENTRY_RANGE),
    )
    .unwrap()
}

pub fn random_system(rng: &mut ChaCha8Rng, n: usize) -> System {
    let a = random_matrix(rng, n, n);
    let b = random_matrix(rng, n, 1);
    let c = random_matrix(rng, 1, n);
    System::new(a, Some(b), c).unwrap()
}

pub struct Corpus {
    pub systems: Vec<System>,
    pub rejected: usize,
}

/// Observable systems with `n` drawn from `dims`, redrawn while the
/// observability matrix is worse conditioned than `MAX_CONDITION`.
pub fn observable_corpus(
    rng: &mut ChaCha8Rng,
    count: usize,
    dims: std::ops::RangeInclusive<usize>,
) -> Corpus {
    let mut systems = Vec::with_capacity(count);
    let mut rejected = 0;
    while systems.len() < count {
        let n = rng.gen_range(dims.clone());
        loop {
            let sys = random_system(rng, n);
            let report = is_observable(&sys);
            if report.observable && report.condition_estimate <= MAX_CONDITION {
                systems.push(sys);
                break;
            }
            rejected += 1;
        }
    }
    Corpus { systems, rejected }
}

pub fn random_poly(rng: &mut ChaCha8Rng, n: usize) -> MonicPoly {
    MonicPoly::new(uniform_vec(rng, n, -ENTRY_RANGE, ENTRY_RANGE)).unwrap()
}

pub fn e1(n: usize) -> Matrix {
    Matrix::unit_row(n, 0)
}
