//! Canonical realizations of single-output systems.
//!
//! Two companion layouts appear throughout:
//!
//! * observability form: unit superdiagonal, `(-a_0, ..., -a_{n-1})` on the
//!   last row, output map `(1, 0, ..., 0)`; reached from any observable
//!   `(A, C)` through the observability matrix `O`, `x~ = O x`.
//! * observer form: unit superdiagonal, `(-a_{n-1}, ..., -a_0)` down the
//!   first column, same output map; reached from observability form by the
//!   unit lower-triangular Toeplitz matrix `P`, `x- = P x~`.
//!
//! `P` is also produced as a chain of elementary factors `P_1 .. P_{n-1}`,
//! each touching a single column, with `P = P_{n-1} ... P_1`. Both routes
//! are kept so they can be checked against each other.
//!
//! Index convention: factor `P_i` (1-based `i`) modifies 0-based column
//! `n - 1 - i`.

use crate::charpoly::{fibonacci_sequence, MonicPoly};
use crate::densemat::Matrix;
use crate::error::{Error, Result};

/// Entries within this distance of the companion pattern count as structural.
pub const STRUCTURE_TOL: f64 = 1e-8;

/// Maximum `|T Tinv - I|` accepted when a [`Transform`] is built.
pub const TRANSFORM_TOL: f64 = 1e-8;

/// Dense state-space triple `(A, B, C)` with a single output.
#[derive(Debug, Clone, PartialEq)]
pub struct System {
    a: Matrix,
    b: Option<Matrix>,
    c: Matrix,
}

impl System {
    pub fn new(a: Matrix, b: Option<Matrix>, c: Matrix) -> Result<Self> {
        a.require_square("System::new (A)")?;
        let n = a.rows();
        if c.shape() != (1, n) {
            return Err(Error::Shape {
                op: "System::new (C)",
                expected: format!("1x{n}"),
                got: format!("{}x{}", c.rows(), c.cols()),
            });
        }
        if let Some(b) = &b {
            if b.shape() != (n, 1) {
                return Err(Error::Shape {
                    op: "System::new (B)",
                    expected: format!("{n}x1"),
                    got: format!("{}x{}", b.rows(), b.cols()),
                });
            }
        }
        Ok(Self { a, b, c })
    }

    /// Convenience constructor from nested rows and plain vectors.
    pub fn from_parts<R: AsRef<[f64]>>(a: &[R], b: Option<&[f64]>, c: &[f64]) -> Result<Self> {
        let b = b.map(Matrix::column_vector).transpose()?;
        Self::new(Matrix::from_rows(a)?, b, Matrix::row_vector(c)?)
    }

    pub fn n(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn b(&self) -> Option<&Matrix> {
        self.b.as_ref()
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    /// `(T A T^-1, T B, C T^-1)`.
    pub fn transformed(&self, t: &Transform) -> Result<System> {
        let a = t.t.matmul(&self.a)?.matmul(&t.t_inv)?;
        let b = self.b.as_ref().map(|b| t.t.matmul(b)).transpose()?;
        let c = self.c.matmul(&t.t_inv)?;
        System::new(a, b, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Closed-form Toeplitz `P` with Fibonacci inverse.
    DirectToeplitz,
    /// A single elementary factor `P_i`.
    ElementaryStep(usize),
    /// Ordered product of elementary factors.
    StepProduct,
    /// The observability matrix `O`.
    ObservabilityBasis,
    /// Product of two or more of the above.
    Composed,
}

impl Provenance {
    pub fn name(&self) -> String {
        match self {
            Provenance::DirectToeplitz => "direct-toeplitz".into(),
            Provenance::ElementaryStep(i) => format!("elementary-step-{i}"),
            Provenance::StepProduct => "step-product".into(),
            Provenance::ObservabilityBasis => "observability-basis".into(),
            Provenance::Composed => "composed".into(),
        }
    }
}

/// Invertible change of basis `x' = T x` with its inverse cached.
#[derive(Debug, Clone, PartialEq)]
pub struct Transform {
    t: Matrix,
    t_inv: Matrix,
    provenance: Provenance,
}

impl Transform {
    /// Pairs `t` with `t_inv`; fails when `|t t_inv - I| >= TRANSFORM_TOL`.
    pub fn new(t: Matrix, t_inv: Matrix, provenance: Provenance) -> Result<Self> {
        t.require_square("Transform::new")?;
        let residual = t.matmul(&t_inv)?.max_abs_diff(&Matrix::identity(t.rows()));
        if !(residual < TRANSFORM_TOL) {
            return Err(Error::Inconsistent {
                what: "transform inverse",
                residual,
            });
        }
        Ok(Self {
            t,
            t_inv,
            provenance,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            t: Matrix::identity(n),
            t_inv: Matrix::identity(n),
            provenance: Provenance::Composed,
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.t
    }

    pub fn inverse(&self) -> &Matrix {
        &self.t_inv
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// `self` applied after `first`: `T = self.T * first.T`.
    pub fn after(&self, first: &Transform) -> Result<Transform> {
        let t = self.t.matmul(&first.t)?;
        let t_inv = first.t_inv.matmul(&self.t_inv)?;
        Transform::new(t, t_inv, Provenance::Composed)
    }
}

/// Rows `C, CA, ..., CA^{n-1}`.
pub fn observability_matrix(sys: &System) -> Matrix {
    let n = sys.n();
    let mut data = Vec::with_capacity(n * n);
    let mut row = sys.c.clone();
    for k in 0..n {
        data.extend_from_slice(row.as_slice());
        if k + 1 < n {
            row = product_or_saturate(&row, &sys.a);
        }
    }
    Matrix::new(n, n, data).unwrap_or_else(|_| Matrix::zeros(n, n))
}

/// Columns `B, AB, ..., A^{n-1}B`.
pub fn controllability_matrix(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if b.shape() != (n, 1) {
        return Err(Error::Shape {
            op: "controllability_matrix",
            expected: format!("{n}x1"),
            got: format!("{}x{}", b.rows(), b.cols()),
        });
    }
    let mut cols = Vec::with_capacity(n);
    let mut col = b.clone();
    for k in 0..n {
        cols.push(col.as_slice().to_vec());
        if k + 1 < n {
            col = a.matmul(&col)?;
        }
    }
    Ok(Matrix::from_rows(&cols)?.transpose())
}

fn product_or_saturate(row: &Matrix, a: &Matrix) -> Matrix {
    // overflowing powers make O useless anyway; zeros surface as rank loss
    row.matmul(a)
        .unwrap_or_else(|_| Matrix::zeros(row.rows(), a.cols()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ObservabilityReport {
    pub observable: bool,
    pub rank: usize,
    /// `max|O| * max|O^-1| * n`, infinite when `O` is singular.
    pub condition_estimate: f64,
}

pub fn is_observable(sys: &System) -> ObservabilityReport {
    is_observable_with_tol(sys, 0.0)
}

/// Rank test on `O`; `tol == 0` uses the default scale-aware threshold.
pub fn is_observable_with_tol(sys: &System, tol: f64) -> ObservabilityReport {
    let o = observability_matrix(sys);
    let n = sys.n();
    let rank = o.rank_with_tolerance(tol);
    let observable = rank == n;
    let condition_estimate = if observable {
        o.inverse()
            .map(|inv| o.max_abs() * inv.max_abs() * n as f64)
            .unwrap_or(f64::INFINITY)
    } else {
        f64::INFINITY
    };
    ObservabilityReport {
        observable,
        rank,
        condition_estimate,
    }
}

/// Observability realization `(O A O^-1, O B, C O^-1)` and the basis `O`.
pub fn to_observability_form(sys: &System) -> Result<(System, Transform)> {
    to_observability_form_with_tol(sys, 0.0)
}

pub fn to_observability_form_with_tol(sys: &System, tol: f64) -> Result<(System, Transform)> {
    let report = is_observable_with_tol(sys, tol);
    if !report.observable {
        return Err(Error::NotObservable {
            rank: report.rank,
            n: sys.n(),
        });
    }
    let o = observability_matrix(sys);
    let o_inv = match o.inverse() {
        Ok(inv) => inv,
        Err(Error::Singular { .. }) => {
            return Err(Error::NotObservable {
                rank: sys.n() - 1,
                n: sys.n(),
            })
        }
        Err(e) => return Err(e),
    };
    let t = Transform::new(o, o_inv, Provenance::ObservabilityBasis)?;
    Ok((sys.transformed(&t)?, t))
}

/// Observer companion form of `p` and its output map `(1, 0, ..., 0)`.
pub fn observer_form_matrices(p: &MonicPoly) -> (Matrix, Matrix) {
    let n = p.degree();
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        a.set(i, 0, -p.coeff(n - 1 - i));
        if i + 1 < n {
            a.set(i, i + 1, 1.0);
        }
    }
    (a, Matrix::unit_row(n, 0))
}

/// Observability companion form of `p` and its output map `(1, 0, ..., 0)`.
pub fn observability_form_matrices(p: &MonicPoly) -> (Matrix, Matrix) {
    (p.companion(), Matrix::unit_row(p.degree(), 0))
}

fn lower_toeplitz(first_column: &[f64]) -> Matrix {
    let n = first_column.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            m.set(i, j, first_column[i - j]);
        }
    }
    m
}

/// Unit lower-triangular Toeplitz `P` with first column
/// `(1, a_{n-1}, ..., a_1)` and its inverse built from the generalized
/// Fibonacci values `(1, F_1, ..., F_{n-1})`.
pub fn build_p(p: &MonicPoly) -> Result<Transform> {
    let n = p.degree();
    let mut col = Vec::with_capacity(n);
    col.push(1.0);
    col.extend((1..n).map(|k| p.coeff(n - k)));
    let t = lower_toeplitz(&col);
    let t_inv = lower_toeplitz(fibonacci_sequence(p).values());
    Transform::new(t, t_inv, Provenance::DirectToeplitz)
}

/// Elementary factor `P_i`, `1 <= i <= n-1`.
///
/// Identity except below the diagonal of 0-based column `c = n-1-i`, where
/// rows `c+1 ..= n-1` hold `a_{n-1}, ..., a_{n-i}`. The inverse negates
/// those entries. With this sign, `A_i = P_i A_{i-1} P_i^-1` moves one more
/// coefficient into the first-column pattern and `P_{n-1} ... P_1 = P`.
pub fn build_p_step(p: &MonicPoly, i: usize) -> Result<Transform> {
    let n = p.degree();
    if i < 1 || i + 1 > n {
        return Err(Error::IndexOutOfRange {
            what: "elementary factor",
            index: i,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    let col = n - 1 - i;
    let mut t = Matrix::identity(n);
    let mut t_inv = Matrix::identity(n);
    for j in 1..=i {
        let v = p.coeff(n - j);
        t.set(col + j, col, v);
        t_inv.set(col + j, col, -v);
    }
    Transform::new(t, t_inv, Provenance::ElementaryStep(i))
}

/// `P_{n-1} ... P_1` and `P_1^-1 ... P_{n-1}^-1`.
pub fn step_product(p: &MonicPoly) -> Result<Transform> {
    let n = p.degree();
    let mut t = Matrix::identity(n);
    let mut t_inv = Matrix::identity(n);
    for i in 1..n {
        let step = build_p_step(p, i)?;
        t = step.matrix().matmul(&t)?;
        t_inv = t_inv.matmul(step.inverse())?;
    }
    Transform::new(t, t_inv, Provenance::StepProduct)
}

/// One realization in the chain from observability to observer form.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub m: usize,
    pub a: Matrix,
    /// `P_m`; the identity for `m = 0`.
    pub p: Matrix,
    pub c: Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationTrace {
    pub steps: Vec<TraceStep>,
    pub charpoly: MonicPoly,
}

impl RealizationTrace {
    pub fn last(&self) -> &TraceStep {
        self.steps.last().expect("trace always holds A_0")
    }
}

/// Entries of `a` (and `c`) that break the observability companion pattern
/// by more than `tol`. The last row of `a` is free.
pub fn observability_form_violations(a: &Matrix, c: &Matrix, tol: f64) -> Vec<(usize, usize, f64)> {
    let n = a.rows();
    let mut bad = Vec::new();
    for i in 0..n.saturating_sub(1) {
        for j in 0..n {
            let want = if j == i + 1 { 1.0 } else { 0.0 };
            let got = a.get(i, j);
            if !((got - want).abs() <= tol) {
                bad.push((i, j, got));
            }
        }
    }
    for j in 0..c.cols() {
        let want = if j == 0 { 1.0 } else { 0.0 };
        let got = c.get(0, j);
        if !((got - want).abs() <= tol) {
            // output-map entries are reported on a virtual row n
            bad.push((n, j, got));
        }
    }
    bad
}

/// Largest deviation of `a` from the observer companion pattern (first
/// column free).
pub fn observer_form_deviation(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 1..n {
            let want = if j == i + 1 { 1.0 } else { 0.0 };
            worst = worst.max((a.get(i, j) - want).abs());
        }
    }
    worst
}

/// Largest deviation of `a` from the observability companion pattern
/// (last row free).
pub fn observability_form_deviation(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut worst: f64 = 0.0;
    for i in 0..n - 1 {
        for j in 0..n {
            let want = if j == i + 1 { 1.0 } else { 0.0 };
            worst = worst.max((a.get(i, j) - want).abs());
        }
    }
    worst
}

/// Coefficients stored in the last row of an observability-form matrix.
pub fn observability_form_poly(a: &Matrix) -> Result<MonicPoly> {
    MonicPoly::new(a.row(a.rows() - 1).iter().map(|v| -v).collect())
}

/// Expected `A_m` after `m` elementary steps, built directly from `p`.
///
/// Column `c = n-1-m` holds `-a_{n-1}, -a_{n-2}, ...` from row `c` down, the
/// last row holds `-a_0, ..., -a_{c-1}` left of it, and the superdiagonal
/// right of column `c` is one. `m = 0` is the observability form and
/// `m = n-1` the observer form.
pub fn step_form_matrix(p: &MonicPoly, m: usize) -> Matrix {
    let n = p.degree();
    assert!(m < n, "step index {m} out of range for degree {n}");
    let c = n - 1 - m;
    let mut a = Matrix::zeros(n, n);
    for i in 0..n - 1 {
        a.set(i, i + 1, 1.0);
    }
    for r in c..n {
        a.set(r, c, -p.coeff(n - 1 - (r - c)));
    }
    for j in 0..c {
        a.set(n - 1, j, -p.coeff(j));
    }
    a
}

/// Whether entry `(i, j)` of `A_m` carries a coefficient rather than a
/// structural zero or one.
pub fn step_form_is_free(n: usize, m: usize, i: usize, j: usize) -> bool {
    let c = n - 1 - m;
    (j == c && i >= c) || (i == n - 1 && j < c)
}

/// Snaps the structural entries of `A_m` to exact zeros and ones.
pub fn snap_step_matrix(a: &Matrix, m: usize) -> Matrix {
    let n = a.rows();
    let mut out = a.clone();
    for i in 0..n {
        for j in 0..n {
            if !step_form_is_free(n, m, i, j) {
                out.set(i, j, if j == i + 1 { 1.0 } else { 0.0 });
            }
        }
    }
    out
}

/// Walks `A_m = P_m A_{m-1} P_m^-1`, `C_m = C_{m-1} P_m^-1` from the
/// observability realization to the observer realization.
pub fn realization_sequence(sys_obsv: &System) -> Result<RealizationTrace> {
    let offending = observability_form_violations(sys_obsv.a(), sys_obsv.c(), STRUCTURE_TOL);
    if !offending.is_empty() {
        return Err(Error::NotCompanionForm { offending });
    }
    let n = sys_obsv.n();
    let charpoly = observability_form_poly(sys_obsv.a())?;
    let mut steps = Vec::with_capacity(n);
    steps.push(TraceStep {
        m: 0,
        a: sys_obsv.a().clone(),
        p: Matrix::identity(n),
        c: sys_obsv.c().clone(),
    });
    for m in 1..n {
        let step = build_p_step(&charpoly, m)?;
        let prev = steps.last().expect("seeded with A_0");
        let a = step.matrix().matmul(&prev.a)?.matmul(step.inverse())?;
        let c = prev.c.matmul(step.inverse())?;
        steps.push(TraceStep {
            m,
            a,
            p: step.matrix().clone(),
            c,
        });
    }
    Ok(RealizationTrace { steps, charpoly })
}

/// Everything produced on the way to the observer realization.
#[derive(Debug, Clone)]
pub struct ObserverRealization {
    pub system: System,
    /// `T = P O`, so that `x- = T x`.
    pub transform: Transform,
    pub observability: (System, Transform),
    pub toeplitz: Transform,
    pub trace: RealizationTrace,
}

impl ObserverRealization {
    pub fn charpoly(&self) -> &MonicPoly {
        &self.trace.charpoly
    }
}

pub fn to_observer_form(sys: &System) -> Result<ObserverRealization> {
    to_observer_form_with_tol(sys, 0.0)
}

pub fn to_observer_form_with_tol(sys: &System, tol: f64) -> Result<ObserverRealization> {
    let (sys_obsv, o) = to_observability_form_with_tol(sys, tol)?;
    let trace = realization_sequence(&sys_obsv)?;
    let p = build_p(&trace.charpoly)?;
    let system = sys_obsv.transformed(&p)?;
    let transform = p.after(&o)?;
    Ok(ObserverRealization {
        system,
        transform,
        observability: (sys_obsv, o),
        toeplitz: p,
        trace,
    })
}

/// `(A^T, C^T, B^T)`: observability of the dual is controllability of the
/// original, and the observer form of the dual transposes back into the
/// controller form.
pub fn dualize(sys: &System) -> Result<System> {
    let b = sys.b().ok_or(Error::MissingInputMatrix)?;
    System::new(
        sys.a().transpose(),
        Some(sys.c().transpose()),
        b.transpose(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompanionLayout {
    Observability,
    Observer,
}

/// Snaps the structural entries of a companion-form system to exact zeros
/// and ones. The coefficient row or column is left untouched.
pub fn canonicalize(sys: &System, layout: CompanionLayout) -> Result<System> {
    let n = sys.n();
    let m = match layout {
        CompanionLayout::Observability => 0,
        CompanionLayout::Observer => n - 1,
    };
    System::new(
        snap_step_matrix(sys.a(), m),
        sys.b().cloned(),
        Matrix::unit_row(n, 0),
    )
}
