mod common;

use lti_canon::realizations::{
    observability_form_deviation, observer_form_deviation, step_form_matrix, CompanionLayout,
};
use lti_canon::{
    build_p, build_p_step, canonicalize, char_poly, closed_loop, controllability_matrix,
    design_observer, dualize, fibonacci_sequence, is_observable, observability_matrix,
    observer_form_matrices, poly_from_roots, realization_sequence, simulate, step_product,
    to_observability_form, to_observer_form, verify_gain, Matrix, MonicPoly, Root, System,
    Transform,
};
use proptest::prelude::*;

use common::e1;

fn square(n: usize, range: f64) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-range..=range, n * n).prop_map(move |d| Matrix::new(n, n, d).unwrap())
}

/// Diagonally dominant, so comfortably invertible.
fn well_conditioned(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Matrix> {
    dims.prop_flat_map(|n| {
        (square(n, 1.0), prop::collection::vec(prop::bool::ANY, n)).prop_map(move |(m, signs)| {
            let mut rows = m.to_rows();
            for (i, neg) in signs.into_iter().enumerate() {
                rows[i][i] += if neg { -(n as f64) } else { n as f64 };
            }
            Matrix::from_rows(&rows).unwrap()
        })
    })
}

fn poly(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = MonicPoly> {
    dims.prop_flat_map(|n| prop::collection::vec(-2.0..=2.0f64, n))
        .prop_map(|c| MonicPoly::new(c).unwrap())
}

/// Observable systems with a reasonably conditioned observability matrix.
fn observable_system(dims: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = System> {
    dims.prop_flat_map(|n| {
        (
            square(n, 2.0),
            prop::collection::vec(-2.0..=2.0f64, n),
            prop::collection::vec(-2.0..=2.0f64, n),
        )
    })
    .prop_map(|(a, b, c)| {
        System::new(
            a,
            Some(Matrix::column_vector(&b).unwrap()),
            Matrix::row_vector(&c).unwrap(),
        )
        .unwrap()
    })
    .prop_filter("observable, cond(O) <= 1e4", |sys| {
        let r = is_observable(sys);
        r.observable && r.condition_estimate <= common::MAX_CONDITION
    })
}

fn real_roots(n: usize) -> impl Strategy<Value = Vec<Root>> {
    prop::collection::vec((-5.0..=-0.5f64).prop_map(Root::real), n)
}

fn rel_close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn inverse_residual_is_small(a in well_conditioned(1..=8)) {
        let inv = a.inverse().unwrap();
        let n = a.rows();
        prop_assert!(a.matmul(&inv).unwrap().max_abs_diff(&Matrix::identity(n)) < 1e-9);
        prop_assert!(inv.matmul(&a).unwrap().max_abs_diff(&Matrix::identity(n)) < 1e-9);
    }

    #[test]
    fn determinant_is_multiplicative((a, b) in (1usize..=6).prop_flat_map(|n| (square(n, 2.0), square(n, 2.0)))) {
        let lhs = a.matmul(&b).unwrap().determinant().unwrap();
        let rhs = a.determinant().unwrap() * b.determinant().unwrap();
        let scale = (a.max_abs() * b.max_abs() * a.rows() as f64).powi(a.rows() as i32);
        prop_assert!((lhs - rhs).abs() <= 1e-8 * lhs.abs().max(rhs.abs()) || (lhs - rhs).abs() <= 1e-12 * scale,
            "det(AB) = {lhs}, det(A)det(B) = {rhs}");
    }

    #[test]
    fn rank_ignores_row_order(
        (left, right, perm) in (2usize..=6, 1usize..=5).prop_flat_map(|(n, r)| {
            let r = r.min(n);
            (
                prop::collection::vec(-3i32..=3, n * r),
                prop::collection::vec(-3i32..=3, r * n),
                Just((0..n).collect::<Vec<_>>()).prop_shuffle(),
            )
        })
    ) {
        let n = perm.len();
        let r = left.len() / n;
        let l = Matrix::new(n, r, left.iter().map(|v| *v as f64).collect()).unwrap();
        let rt = Matrix::new(r, n, right.iter().map(|v| *v as f64).collect()).unwrap();
        let m = l.matmul(&rt).unwrap();
        let rows = m.to_rows();
        let permuted = Matrix::from_rows(&perm.iter().map(|&i| rows[i].clone()).collect::<Vec<_>>()).unwrap();
        let rank = m.rank_with_tolerance(0.0);
        prop_assert!(rank <= r);
        prop_assert_eq!(rank, permuted.rank_with_tolerance(0.0));
        prop_assert_eq!(rank, m.transpose().rank_with_tolerance(0.0));
    }

    #[test]
    fn char_poly_is_similarity_invariant((a, t) in (1usize..=8).prop_flat_map(|n| (square(n, 2.0), well_conditioned(n..=n)))) {
        let t_inv = t.inverse().unwrap();
        prop_assume!(t.max_abs() * t_inv.max_abs() * (t.rows() as f64) < 1e4);
        let similar = t.matmul(&a).unwrap().matmul(&t_inv).unwrap();
        let p = char_poly(&a).unwrap();
        prop_assert!(char_poly(&similar).unwrap().max_abs_diff(&p) < 1e-7);
    }

    #[test]
    fn char_poly_of_companion_is_exact(p in poly(1..=10)) {
        prop_assert_eq!(char_poly(&p.companion()).unwrap(), p.clone());
        prop_assert_eq!(char_poly(&observer_form_matrices(&p).0).unwrap(), p);
    }

    #[test]
    fn char_poly_matches_root_expansion(roots in (1usize..=6).prop_flat_map(real_roots), t in well_conditioned(1..=1)) {
        // upper triangular with the roots on the diagonal
        let n = roots.len();
        let mut rows = vec![vec![0.0; n]; n];
        for i in 0..n {
            rows[i][i] = roots[i].re;
            for (j, cell) in rows[i].iter_mut().enumerate().skip(i + 1) {
                *cell = t.get(0, 0) * (i + j) as f64 / n as f64;
            }
        }
        let a = Matrix::from_rows(&rows).unwrap();
        let want = poly_from_roots(&roots).unwrap();
        let got = char_poly(&a).unwrap();
        for k in 0..n {
            prop_assert!(rel_close(got.coeff(k), want.coeff(k), 1e-12));
        }
    }

    #[test]
    fn fibonacci_satisfies_recursion(p in poly(1..=12)) {
        let n = p.degree();
        let f = fibonacci_sequence(&p);
        prop_assert_eq!(f.values().len(), n);
        prop_assert_eq!(f.get(0), 1.0);
        for k in 1..n {
            let mut terms: Vec<f64> = (1..=k).map(|i| -p.coeff(n - i) * f.get(k - i)).collect();
            terms.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
            let direct: f64 = terms.iter().sum();
            let scale: f64 = (1..=k).map(|i| (p.coeff(n - i) * f.get(k - i)).abs()).sum();
            prop_assert!((f.get(k) - direct).abs() <= 1e-13 * scale.max(1.0));
        }
    }

    #[test]
    fn toeplitz_inverse_is_exact(p in poly(1..=10)) {
        let t = build_p(&p).unwrap();
        let n = p.degree();
        prop_assert!(t.matrix().matmul(t.inverse()).unwrap().max_abs_diff(&Matrix::identity(n)) < 1e-9);
        for i in 0..n {
            prop_assert_eq!(t.matrix().get(i, i), 1.0);
            for j in i + 1..n {
                prop_assert_eq!(t.matrix().get(i, j), 0.0);
                prop_assert_eq!(t.inverse().get(i, j), 0.0);
            }
        }
    }

    #[test]
    fn sylvester_identities_hold(p in poly(1..=8)) {
        let t = build_p(&p).unwrap();
        let (a_obsv, c_obsv) = (p.companion(), e1(p.degree()));
        let (a_obs, c_obs) = observer_form_matrices(&p);
        let lhs = a_obs.matmul(t.matrix()).unwrap();
        let rhs = t.matrix().matmul(&a_obsv).unwrap();
        let scale = t.matrix().max_abs().max(1.0) * 4.0;
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-13 * scale);
        prop_assert_eq!(c_obs.matmul(t.matrix()).unwrap(), c_obsv);
    }

    #[test]
    fn step_factors_compose_to_p(p in poly(1..=8)) {
        let n = p.degree();
        let product = step_product(&p).unwrap();
        prop_assert!(product.matrix().max_abs_diff(build_p(&p).unwrap().matrix()) < 1e-9);
        prop_assert!(product.inverse().max_abs_diff(build_p(&p).unwrap().inverse()) < 1e-9);
        for i in 1..n {
            let step = build_p_step(&p, i).unwrap();
            prop_assert_eq!(step.matrix().matmul(step.inverse()).unwrap(), Matrix::identity(n));
        }
    }

    #[test]
    fn trace_follows_the_step_layout(p in poly(1..=8)) {
        let sys = System::new(p.companion(), None, e1(p.degree())).unwrap();
        let trace = realization_sequence(&sys).unwrap();
        prop_assert_eq!(trace.steps.len(), p.degree());
        let scale = build_p(&p).unwrap().matrix().max_abs().powi(2).max(1.0);
        for (m, step) in trace.steps.iter().enumerate() {
            prop_assert_eq!(step.m, m);
            prop_assert!(step.a.max_abs_diff(&step_form_matrix(&p, m)) <= 1e-13 * scale);
            prop_assert_eq!(&step.c, &e1(p.degree()));
            prop_assert!(char_poly(&step.a).unwrap().max_abs_diff(&p) < 1e-7);
        }
    }

    #[test]
    fn realizations_preserve_input_and_output_maps(sys in observable_system(1..=6)) {
        let r = to_observer_form(&sys).unwrap();
        let t = &r.transform;
        let b_chain = t.matrix().matmul(sys.b().unwrap()).unwrap();
        prop_assert!(r.system.b().unwrap().max_abs_diff(&b_chain) <= 1e-12 * b_chain.max_abs().max(1.0));
        let c_back = r.system.c().matmul(t.matrix()).unwrap();
        prop_assert!(c_back.max_abs_diff(sys.c()) < 1e-12);
        prop_assert!(r.system.c().max_abs_diff(&e1(sys.n())) < 1e-12);

        // obsv basis then P agrees with the composed basis change
        let (obsv, o) = &r.observability;
        prop_assert!(observability_form_deviation(obsv.a()) < 1e-8);
        let composed = r.toeplitz.matrix().matmul(o.matrix()).unwrap();
        prop_assert!(composed.max_abs_diff(t.matrix()) <= 1e-12 * composed.max_abs());
        prop_assert!(observer_form_deviation(r.system.a()) < 1e-7);
    }

    #[test]
    fn input_output_behaviour_is_invariant(sys in observable_system(1..=6)) {
        // Markov parameters C A^k B survive every basis change
        let r = to_observer_form(&sys).unwrap();
        let markov = |s: &System| -> Vec<f64> {
            let mut col = s.b().unwrap().clone();
            (0..2 * s.n()).map(|_| {
                let v = s.c().matmul(&col).unwrap().get(0, 0);
                col = s.a().matmul(&col).unwrap();
                v
            }).collect()
        };
        for (x, y) in markov(&sys).iter().zip(markov(&r.system)) {
            prop_assert!(rel_close(*x, y, 1e-7));
        }
    }

    #[test]
    fn observability_form_is_observable_and_idempotent(sys in observable_system(1..=6)) {
        let (obsv, _) = to_observability_form(&sys).unwrap();
        let again = to_observability_form(&obsv).unwrap().0;
        prop_assert!(again.a().max_abs_diff(obsv.a()) <= 1e-8 * obsv.a().max_abs().max(1.0));
        let snapped = canonicalize(&obsv, CompanionLayout::Observability).unwrap();
        prop_assert_eq!(observability_form_deviation(snapped.a()), 0.0);
        prop_assert_eq!(canonicalize(&snapped, CompanionLayout::Observability).unwrap(), snapped);
    }

    #[test]
    fn closed_loop_places_poles_in_any_basis(
        (sys, roots) in observable_system(1..=6).prop_flat_map(|s| { let n = s.n(); (Just(s), real_roots(n)) })
    ) {
        let desired = poly_from_roots(&roots).unwrap();
        let design = design_observer(&sys, &desired).unwrap();
        prop_assert!(design.residual < 1e-6);

        // in observer coordinates the closed loop is exactly the desired companion
        let r = to_observer_form(&sys).unwrap();
        let closed = closed_loop(&r.system, &design.gain_observer_coords).unwrap();
        let want = observer_form_matrices(&desired).0;
        prop_assert!(closed.max_abs_diff(&want) <= 1e-7 * want.max_abs().max(1.0));
        // and the original-coordinate gain maps back onto it
        let back = r.transform.matrix().matmul(&design.gain_original_coords).unwrap();
        prop_assert!(back.max_abs_diff(&design.gain_observer_coords) <= 1e-7 * design.gain_observer_coords.max_abs().max(1.0));
    }

    #[test]
    fn plant_polynomial_needs_no_gain(sys in observable_system(1..=6)) {
        let plant = char_poly(sys.a()).unwrap();
        let design = design_observer(&sys, &plant).unwrap();
        prop_assert!(design.gain_observer_coords.max_abs() < 1e-9 * plant.coeffs().iter().fold(1.0f64, |m, v| m.max(v.abs())));
        prop_assert!(verify_gain(&sys, &Matrix::zeros(sys.n(), 1), &plant).unwrap() < 1e-9);
    }

    #[test]
    fn controllability_is_dual_observability(sys in observable_system(1..=6)) {
        let dual = dualize(&sys).unwrap();
        prop_assert_eq!(&dualize(&dual).unwrap(), &sys);
        let ctrb = controllability_matrix(sys.a(), sys.b().unwrap()).unwrap();
        prop_assert_eq!(ctrb.transpose(), observability_matrix(&dual));
        prop_assert_eq!(ctrb.rank_with_tolerance(0.0), is_observable(&dual).rank);
    }

    #[test]
    fn transforms_compose_and_invert((a, b) in (1usize..=6).prop_flat_map(|n| (well_conditioned(n..=n), well_conditioned(n..=n)))) {
        let ta = Transform::new(a.clone(), a.inverse().unwrap(), lti_canon::Provenance::Composed).unwrap();
        let tb = Transform::new(b.clone(), b.inverse().unwrap(), lti_canon::Provenance::Composed).unwrap();
        let both = tb.after(&ta).unwrap();
        let n = a.rows();
        prop_assert!(both.matrix().matmul(both.inverse()).unwrap().max_abs_diff(&Matrix::identity(n)) < 1e-9);
    }
}

/// `A` shifted left of the imaginary axis by its Gershgorin radius.
fn stable_system(a: Matrix, c: Vec<f64>) -> System {
    let n = a.rows();
    let radius = (0..n)
        .map(|i| a.row(i).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let shifted = a.sub(&Matrix::identity(n).scale(radius + 0.5)).unwrap();
    System::new(shifted, None, Matrix::row_vector(&c).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn error_dynamics_are_autonomous_for_stable_plants(
        (a, c, l, x0, xhat0) in (1usize..=4).prop_flat_map(|n| (
            square(n, 2.0),
            prop::collection::vec(-2.0..=2.0f64, n),
            prop::collection::vec(-1.0..=1.0f64, n),
            prop::collection::vec(-2.0..=2.0f64, n),
            prop::collection::vec(-2.0..=2.0f64, n),
        ))
    ) {
        let sys = stable_system(a, c);
        let gain = Matrix::column_vector(&l).unwrap();
        let closed = closed_loop(&sys, &gain).unwrap();
        let traj = simulate(&sys, &gain, &x0, &xhat0, 1e-2, 500).unwrap();
        prop_assert_eq!(traj.len(), 501);
        let mut e: Vec<f64> = x0.iter().zip(&xhat0).map(|(a, b)| a - b).collect();
        for k in 0..traj.len() {
            if k > 0 {
                e = lti_canon::sim::rk4_step(&closed, &e, 1e-2);
            }
            let diff: Vec<f64> = traj.states[k].iter().zip(&traj.estimates[k]).map(|(x, h)| x - h).collect();
            for (d, want) in diff.iter().zip(&e) {
                prop_assert!((d - want).abs() < 1e-9, "step {k}: {d} vs {want}");
            }
            let norm = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            prop_assert!((norm - traj.error_norms[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn rk4_converges_at_fourth_order(x0 in prop::collection::vec(-2.0..=2.0f64, 2), xhat0 in prop::collection::vec(-2.0..=2.0f64, 2)) {
        let sys = System::from_parts(&[[1.0, 2.0], [3.0, 4.0]], None, &[1.0, 0.0]).unwrap();
        let gain = Matrix::column_vector(&[8.0, 18.0]).unwrap();
        prop_assume!(x0.iter().zip(&xhat0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) > 0.1);
        let final_error = |dt: f64| {
            let steps = (2.0 / dt).round() as usize;
            *simulate(&sys, &gain, &x0, &xhat0, dt, steps).unwrap().error_norms.last().unwrap()
        };
        let (e1, e2, e3) = (final_error(0.1), final_error(0.05), final_error(0.025));
        let ratio = (e1 - e2).abs() / (e2 - e3).abs();
        prop_assert!((8.0..=32.0).contains(&ratio), "ratio {ratio}");
    }
}
