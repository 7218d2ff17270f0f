//! Luenberger observer gains by pole placement.
//!
//! In observer coordinates the closed loop `A_obs - L_obs C_obs` keeps the
//! companion layout with first column `-a_k - l_k`, so each gain entry moves
//! exactly one characteristic coefficient: `l_k = d_k - a_k`. The gain is
//! then pulled back to the original coordinates through `T = P O`.

use crate::charpoly::{char_poly, MonicPoly};
use crate::densemat::Matrix;
use crate::error::{Error, Result};
use crate::realizations::{to_observer_form_with_tol, ObserverRealization, System};

/// Designs whose basis change exceeds this condition estimate carry a warning.
pub const CONDITION_WARNING: f64 = 1e8;

/// Closed-loop polynomial residual above which a design carries a warning.
pub const RESIDUAL_WARNING: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ObserverDesign {
    pub desired: MonicPoly,
    pub plant: MonicPoly,
    /// `(l_{n-1}, ..., l_0)^T`, top to bottom.
    pub gain_observer_coords: Matrix,
    pub gain_original_coords: Matrix,
    /// `max |char_poly(A - L C) - desired|` over the coefficients.
    pub residual: f64,
    /// `max|T| * max|T^-1| * n` for `T = P O`.
    pub condition_estimate: f64,
    pub warning: Option<String>,
}

/// Gain column in observer coordinates, `l_k = d_k - a_k`, ordered
/// `l_{n-1}` first.
pub fn design_gain_observer_coords(plant: &MonicPoly, desired: &MonicPoly) -> Result<Matrix> {
    let n = plant.degree();
    if desired.degree() != n {
        return Err(Error::Dimension(format!(
            "plant has degree {n}, desired polynomial has degree {}",
            desired.degree()
        )));
    }
    let gains: Vec<f64> = (0..n)
        .rev()
        .map(|k| desired.coeff(k) - plant.coeff(k))
        .collect();
    Matrix::column_vector(&gains)
}

pub fn design_observer(sys: &System, desired: &MonicPoly) -> Result<ObserverDesign> {
    design_observer_with_tol(sys, desired, 0.0)
}

pub fn design_observer_with_tol(
    sys: &System,
    desired: &MonicPoly,
    tol: f64,
) -> Result<ObserverDesign> {
    if desired.degree() != sys.n() {
        return Err(Error::Dimension(format!(
            "system has {} states, desired polynomial has degree {}",
            sys.n(),
            desired.degree()
        )));
    }
    let realization = to_observer_form_with_tol(sys, tol)?;
    design_from_realization(sys, &realization, desired)
}

/// Same as [`design_observer`] for a caller that already holds the
/// observer realization of `sys`.
pub fn design_from_realization(
    sys: &System,
    realization: &ObserverRealization,
    desired: &MonicPoly,
) -> Result<ObserverDesign> {
    let plant = realization.charpoly().clone();
    let gain_observer_coords = design_gain_observer_coords(&plant, desired)?;
    let t = &realization.transform;
    let gain_original_coords = t.inverse().matmul(&gain_observer_coords)?;
    let residual = verify_gain(sys, &gain_original_coords, desired)?;
    let condition_estimate = t.matrix().max_abs() * t.inverse().max_abs() * sys.n() as f64;

    let mut notes = Vec::new();
    if condition_estimate > CONDITION_WARNING {
        notes.push(format!(
            "ill-conditioned basis change (estimate {condition_estimate:.3e})"
        ));
    }
    if !(residual < RESIDUAL_WARNING) {
        notes.push(format!(
            "closed-loop residual {residual:.3e} exceeds {RESIDUAL_WARNING:e}"
        ));
    }

    Ok(ObserverDesign {
        desired: desired.clone(),
        plant,
        gain_observer_coords,
        gain_original_coords,
        residual,
        condition_estimate,
        warning: (!notes.is_empty()).then(|| notes.join("; ")),
    })
}

/// `A - L C`.
pub fn closed_loop(sys: &System, gain: &Matrix) -> Result<Matrix> {
    if gain.shape() != (sys.n(), 1) {
        return Err(Error::Shape {
            op: "closed_loop",
            expected: format!("{}x1 gain", sys.n()),
            got: format!("{}x{}", gain.rows(), gain.cols()),
        });
    }
    sys.a().sub(&gain.matmul(sys.c())?)
}

/// Coefficient-wise distance between `char_poly(A - L C)` and `desired`.
pub fn verify_gain(sys: &System, gain: &Matrix, desired: &MonicPoly) -> Result<f64> {
    if desired.degree() != sys.n() {
        return Err(Error::Dimension(format!(
            "system has {} states, desired polynomial has degree {}",
            sys.n(),
            desired.degree()
        )));
    }
    let achieved = char_poly(&closed_loop(sys, gain)?)?;
    Ok(achieved.max_abs_diff(desired))
}
