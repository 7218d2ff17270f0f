//! Canonical realizations of single-output LTI systems.
//!
//! Starting from `x' = A x + B u`, `y = C x`, the crate builds the
//! observability companion realization through the observability matrix,
//! then the observer companion realization through a unit lower-triangular
//! Toeplitz transform `P` whose inverse has a closed form in generalized
//! Fibonacci numbers. The same `P` is also assembled as a product of
//! elementary factors, one per column, and every intermediate realization
//! can be inspected. On top of that sit Luenberger gain design by pole
//! placement and a fixed-step RK4 simulator for the plant/observer pair.
//!
//! ```
//! use lti_canon::{design_observer, poly_from_roots, Root, System};
//!
//! let sys = System::from_parts(&[[1.0, 2.0], [3.0, 4.0]], None, &[1.0, 0.0]).unwrap();
//! let desired = poly_from_roots(&[Root::real(-1.0), Root::real(-2.0)]).unwrap();
//! let design = design_observer(&sys, &desired).unwrap();
//! let l = design.gain_original_coords.as_slice();
//! assert!((l[0] - 8.0).abs() < 1e-12 && (l[1] - 18.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charpoly;
pub mod cli;
pub mod densemat;
pub mod error;
pub mod numfmt;
pub mod observer;
pub mod realizations;
pub mod sim;

pub use charpoly::{
    char_poly, consistent_convention, faddeev_leverrier, fibonacci_sequence, hessenberg_det_check,
    hessenberg_matrix, poly_from_roots, FibSequence, HessenbergCheck, MonicPoly, Root,
    SignConvention,
};
pub use densemat::{LuFactors, Matrix};
pub use error::{Error, Result};
pub use observer::{
    closed_loop, design_gain_observer_coords, design_observer, verify_gain, ObserverDesign,
};
pub use realizations::{
    build_p, build_p_step, canonicalize, controllability_matrix, dualize, is_observable,
    observability_matrix, observer_form_matrices, realization_sequence, step_product,
    to_observability_form, to_observer_form, CompanionLayout, ObservabilityReport,
    ObserverRealization, Provenance, RealizationTrace, System, TraceStep, Transform,
};
pub use sim::{estimate_decay_rate, simulate, Trajectory};
