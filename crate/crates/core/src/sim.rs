//! Fixed-step simulation of a plant and its Luenberger observer.
//!
//! The coupled system `x' = A x`, `xhat' = (A - L C) xhat + L C x` is
//! integrated with classical RK4 under a null input. RK4 commutes with
//! linear changes of variables, so the step is taken in `(x, e)`
//! coordinates with `e = x - xhat` and `e' = (A - L C) e`; the estimate is
//! recovered as `x - e`. This keeps the error accurate when the plant
//! itself grows.

use std::io::{self, Write};

use crate::densemat::Matrix;
use crate::error::{Error, Result};
use crate::numfmt::sig17;
use crate::observer::closed_loop;
use crate::realizations::System;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub estimates: Vec<Vec<f64>>,
    /// Estimation error `x - xhat` as integrated.
    pub errors: Vec<Vec<f64>>,
    pub error_norms: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().unwrap_or(&0.0)
    }

    /// Header `t,err_norm,x_1..x_n,xhat_1..xhat_n`, one row per sample.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let n = self.states.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string(), "err_norm".to_string()];
        header.extend((1..=n).map(|i| format!("x_{i}")));
        header.extend((1..=n).map(|i| format!("xhat_{i}")));
        writeln!(out, "{}", header.join(","))?;
        for k in 0..self.len() {
            let mut row = vec![sig17(self.times[k]), sig17(self.error_norms[k])];
            row.extend(self.states[k].iter().map(|v| sig17(*v)));
            row.extend(self.estimates[k].iter().map(|v| sig17(*v)));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn mat_vec(m: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|i| m.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

fn axpy(y: &[f64], a: f64, x: &[f64]) -> Vec<f64> {
    y.iter().zip(x).map(|(yi, xi)| yi + a * xi).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// One classical RK4 step of `v' = m v`.
pub fn rk4_step(m: &Matrix, v: &[f64], dt: f64) -> Vec<f64> {
    let k1 = mat_vec(m, v);
    let k2 = mat_vec(m, &axpy(v, dt / 2.0, &k1));
    let k3 = mat_vec(m, &axpy(v, dt / 2.0, &k2));
    let k4 = mat_vec(m, &axpy(v, dt, &k3));
    (0..v.len())
        .map(|i| v[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

pub fn simulate(
    sys: &System,
    gain: &Matrix,
    x0: &[f64],
    xhat0: &[f64],
    dt: f64,
    steps: usize,
) -> Result<Trajectory> {
    let n = sys.n();
    if x0.len() != n || xhat0.len() != n {
        return Err(Error::Dimension(format!(
            "initial states must have {n} entries (got {} and {})",
            x0.len(),
            xhat0.len()
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Dimension(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if steps == 0 {
        return Err(Error::Dimension("at least one step is required".into()));
    }
    let error_dynamics = closed_loop(sys, gain)?;

    let mut traj = Trajectory {
        dt,
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
        estimates: Vec::with_capacity(steps + 1),
        errors: Vec::with_capacity(steps + 1),
        error_norms: Vec::with_capacity(steps + 1),
    };
    let mut x = x0.to_vec();
    let mut e: Vec<f64> = x0.iter().zip(xhat0).map(|(a, b)| a - b).collect();
    for k in 0..=steps {
        if k > 0 {
            x = rk4_step(sys.a(), &x, dt);
            e = rk4_step(&error_dynamics, &e, dt);
            if !x.iter().chain(&e).all(|v| v.is_finite()) {
                return Err(Error::Divergence { step: k });
            }
        }
        traj.times.push(k as f64 * dt);
        traj.estimates.push(if k == 0 {
            xhat0.to_vec()
        } else {
            axpy(&x, -1.0, &e)
        });
        traj.error_norms.push(norm(&e));
        traj.states.push(x.clone());
        traj.errors.push(e.clone());
    }
    Ok(traj)
}

/// Least-squares slope of `ln |e|` against time over `[t_start, t_end]`.
pub fn estimate_decay_rate(traj: &Trajectory, t_start: f64, t_end: f64) -> Result<f64> {
    if !(t_start < t_end) {
        return Err(Error::UndefinedRate(format!(
            "empty window [{t_start}, {t_end}]"
        )));
    }
    let span_end = traj.final_time() + traj.dt * 1e-9;
    if t_start < -traj.dt * 1e-9 || t_end > span_end {
        return Err(Error::UndefinedRate(format!(
            "window [{t_start}, {t_end}] outside trajectory span [0, {}]",
            traj.final_time()
        )));
    }
    let slack = traj.dt * 1e-9;
    let mut pts = Vec::new();
    for (t, e) in traj.times.iter().zip(&traj.error_norms) {
        if *t >= t_start - slack && *t <= t_end + slack {
            if !(*e > 0.0) {
                return Err(Error::UndefinedRate(format!("zero error at t = {t}")));
            }
            pts.push((*t, e.ln()));
        }
    }
    if pts.len() < 2 {
        return Err(Error::UndefinedRate(
            "fewer than two samples in window".into(),
        ));
    }
    let count = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / count;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / count;
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(sxy, sxx), (t, y)| {
        (
            sxy + (t - mean_t) * (y - mean_y),
            sxx + (t - mean_t) * (t - mean_t),
        )
    });
    Ok(sxy / sxx)
}

/// Decay rate over the last half of the trajectory.
pub fn estimate_decay_rate_default(traj: &Trajectory) -> Result<f64> {
    let end = traj.final_time();
    estimate_decay_rate(traj, end / 2.0, end)
}
