//! Characteristic polynomials and the generalized Fibonacci sequence.
//!
//! A [`MonicPoly`] of degree `n` stores `(a_0, a_1, ..., a_{n-1})` of
//! `s^n + a_{n-1} s^{n-1} + ... + a_1 s + a_0`, ascending powers, so that
//! `coeffs()[k]` is `a_k`. The leading one is implicit.

use twofloat::TwoFloat;

use crate::densemat::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct MonicPoly {
    coeffs: Vec<f64>,
}

impl MonicPoly {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Dimension(
                "a monic polynomial needs degree >= 1".into(),
            ));
        }
        if !coeffs.iter().all(|c| c.is_finite()) {
            return Err(Error::NumericOverflow {
                op: "MonicPoly::new",
            });
        }
        Ok(Self { coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `(a_0, ..., a_{n-1})`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `a_k`.
    pub fn coeff(&self, k: usize) -> f64 {
        self.coeffs[k]
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, s: f64) -> f64 {
        self.coeffs.iter().rev().fold(1.0, |acc, c| acc * s + c)
    }

    /// Largest absolute coefficient difference; panics on degree mismatch.
    pub fn max_abs_diff(&self, other: &MonicPoly) -> f64 {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// Companion matrix with unit superdiagonal and `(-a_0, ..., -a_{n-1})`
    /// along the last row.
    pub fn companion(&self) -> Matrix {
        let n = self.degree();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n - 1 {
            m.set(i, i + 1, 1.0);
        }
        for (j, a) in self.coeffs.iter().enumerate() {
            m.set(n - 1, j, -a);
        }
        m
    }
}

/// Coefficients of `det(sI - a)`.
///
/// Matrices that are exactly in a companion layout (unit superdiagonal
/// with the coefficients along the last row or down the first column,
/// zeros elsewhere) are read off directly; everything else goes through
/// the Faddeev-LeVerrier recurrence.
pub fn char_poly(a: &Matrix) -> Result<MonicPoly> {
    a.require_square("char_poly")?;
    if let Some(p) = read_companion(a) {
        return Ok(p);
    }
    faddeev_leverrier(a)
}

/// Faddeev-LeVerrier: `M_k = A M_{k-1} + c_{n-k+1} I`, `c_{n-k} = -tr(A M_k) / k`.
///
/// The recurrence amplifies rounding roughly like `|A|^n`, so it is carried
/// out in double-double arithmetic and only the coefficients are rounded
/// back to `f64`.
pub fn faddeev_leverrier(a: &Matrix) -> Result<MonicPoly> {
    a.require_square("faddeev_leverrier")?;
    let n = a.rows();
    let mut coeffs = vec![0.0; n];
    let mut m: Vec<TwoFloat> = (0..n * n)
        .map(|idx| TwoFloat::from(if idx % (n + 1) == 0 { 1.0 } else { 0.0 }))
        .collect();
    for k in 1..=n {
        let mut am = vec![TwoFloat::from(0.0); n * n];
        for i in 0..n {
            for j in 0..n {
                am[i * n + j] = (0..n).fold(TwoFloat::from(0.0), |acc, l| {
                    acc + m[l * n + j] * a.get(i, l)
                });
            }
        }
        let trace = (0..n).fold(TwoFloat::from(0.0), |acc, i| acc + am[i * n + i]);
        let c = -trace / k as f64;
        let rounded: f64 = c.into();
        if !rounded.is_finite() || !c.is_valid() {
            return Err(Error::NumericOverflow { op: "char_poly" });
        }
        coeffs[n - k] = rounded;
        for i in 0..n {
            am[i * n + i] += c;
        }
        m = am;
    }
    MonicPoly::new(coeffs)
}

fn read_companion(a: &Matrix) -> Option<MonicPoly> {
    let n = a.rows();
    let superdiag_ok = |i: usize, j: usize| j == i + 1 && a.get(i, j) == 1.0;

    let bottom_row = (0..n).all(|i| {
        (0..n).all(|j| i == n - 1 || superdiag_ok(i, j) || (j != i + 1 && a.get(i, j) == 0.0))
    });
    if bottom_row {
        return MonicPoly::new(a.row(n - 1).iter().map(|v| -v).collect()).ok();
    }

    let first_col = (0..n).all(|i| {
        (0..n).all(|j| j == 0 || superdiag_ok(i, j) || (j != i + 1 && a.get(i, j) == 0.0))
    });
    if first_col {
        // first column top to bottom is (-a_{n-1}, ..., -a_0)
        return MonicPoly::new((0..n).rev().map(|i| -a.get(i, 0)).collect()).ok();
    }
    None
}

/// A root of a desired polynomial; complex roots must come in conjugate pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub re: f64,
    pub im: f64,
}

impl Root {
    pub fn real(re: f64) -> Self {
        Self { re, im: 0.0 }
    }

    pub fn complex(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

/// Expands `prod (s - r_i)` into a real monic polynomial.
pub fn poly_from_roots(roots: &[Root]) -> Result<MonicPoly> {
    if roots.is_empty() {
        return Err(Error::Dimension("at least one root is required".into()));
    }
    // full ascending coefficient vector including the leading one
    let mut full = vec![1.0];
    let mut used = vec![false; roots.len()];
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let r = roots[i];
        if r.is_real() {
            full = mul_full(&full, &[-r.re, 1.0]);
            continue;
        }
        let partner = (i + 1..roots.len()).find(|&j| !used[j] && is_conjugate(r, roots[j]));
        match partner {
            Some(j) => {
                used[j] = true;
                let quad = [r.re * r.re + r.im * r.im, -2.0 * r.re, 1.0];
                full = mul_full(&full, &quad);
            }
            None => return Err(Error::Conjugacy { re: r.re, im: r.im }),
        }
    }
    full.pop();
    MonicPoly::new(full)
}

fn is_conjugate(a: Root, b: Root) -> bool {
    let scale = a.re.abs().max(a.im.abs()).max(1.0);
    (a.re - b.re).abs() <= 1e-12 * scale && (a.im + b.im).abs() <= 1e-12 * scale
}

fn mul_full(p: &[f64], q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Generalized Fibonacci values `(F_0, ..., F_{n-1})` of a monic polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct FibSequence {
    values: Vec<f64>,
    source: MonicPoly,
}

impl FibSequence {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn source(&self) -> &MonicPoly {
        &self.source
    }
}

/// `F_0 = 1`, `F_k = sum_{i=1..k} (-a_{n-i}) F_{k-i}` for `k = 1..n-1`.
pub fn fibonacci_sequence(p: &MonicPoly) -> FibSequence {
    let n = p.degree();
    let a = p.coeffs();
    let mut values = Vec::with_capacity(n);
    values.push(1.0);
    for k in 1..n {
        let f = (1..=k).map(|i| -a[n - i] * values[k - i]).sum();
        values.push(f);
    }
    FibSequence {
        values,
        source: p.clone(),
    }
}

/// Recursion evaluated on `|a_i|`; bounds the rounding scale of `F_k`.
fn fibonacci_magnitude_bound(p: &MonicPoly, k: usize) -> f64 {
    let n = p.degree();
    let a = p.coeffs();
    let mut values = vec![1.0];
    for m in 1..=k {
        let f = (1..=m).map(|i| a[n - i].abs() * values[m - i]).sum();
        values.push(f);
    }
    values[k]
}

/// The `k x k` lower Hessenberg matrix
///
/// ```text
/// [ a_{n-1}    -1        0     ...  0       ]
/// [ a_{n-2}    a_{n-1}  -1     ...  0       ]
/// [   ...                                   ]
/// [ a_{n-k}    a_{n-k+1}  a_{n-k+2} ... a_{n-1} ]
/// ```
///
/// Entry `(r, c)` with `c <= r` is `a_{n-1-(r-c)}`; the superdiagonal is -1.
pub fn hessenberg_matrix(p: &MonicPoly, k: usize) -> Result<Matrix> {
    let n = p.degree();
    if k < 1 || k + 1 > n {
        return Err(Error::IndexOutOfRange {
            what: "Hessenberg order",
            index: k,
            lo: 1,
            hi: n.saturating_sub(1),
        });
    }
    let a = p.coeffs();
    let mut h = Matrix::zeros(k, k);
    for r in 0..k {
        for c in 0..=r {
            h.set(r, c, a[n - 1 - (r - c)]);
        }
        if r + 1 < k {
            h.set(r, r + 1, -1.0);
        }
    }
    Ok(h)
}

/// Ways of reading `det(H_k)` as `F_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignConvention {
    /// `F_k = det(H_k)`.
    AsPrinted,
    /// `F_k = (-1)^k det(H_k)`.
    AlternatingSign,
    /// `F_k = det(H_k)` with every coefficient entry of `H_k` negated
    /// (superdiagonal kept at -1).
    NegatedCoefficients,
}

impl SignConvention {
    pub const ALL: [SignConvention; 3] = [
        SignConvention::AsPrinted,
        SignConvention::AlternatingSign,
        SignConvention::NegatedCoefficients,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SignConvention::AsPrinted => "as-printed",
            SignConvention::AlternatingSign => "alternating-sign",
            SignConvention::NegatedCoefficients => "negated-coefficients",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HessenbergCheck {
    pub k: usize,
    /// `det(H_k)` of the matrix from [`hessenberg_matrix`].
    pub det: f64,
    /// `F_k` from the recursion (normative).
    pub fib: f64,
    /// `|det| == |F_k|` within tolerance.
    pub matches_fk: bool,
    /// `s` with `s * det == F_k`, when the magnitudes agree.
    pub sign: Option<f64>,
    /// Every convention under which the determinant reproduces `F_k`.
    pub conventions: Vec<SignConvention>,
}

/// Cross-checks `F_k` from the recursion against Hessenberg determinants.
pub fn hessenberg_det_check(p: &MonicPoly, k: usize) -> Result<HessenbergCheck> {
    let h = hessenberg_matrix(p, k)?;
    let det = h.determinant()?;
    let fib = fibonacci_sequence(p).get(k);
    let bound = fibonacci_magnitude_bound(p, k);
    let agrees = |x: f64| {
        let diff = (x - fib).abs();
        diff <= 1e-9 * x.abs().max(fib.abs()) || diff <= 64.0 * f64::EPSILON * bound
    };

    let sign = if agrees(det) {
        Some(1.0)
    } else if agrees(-det) {
        Some(-1.0)
    } else {
        None
    };

    let mut negated = h.scale(-1.0);
    for r in 0..k.saturating_sub(1) {
        negated.set(r, r + 1, -1.0);
    }
    let negated_det = negated.determinant()?;
    let alternating = if k.is_multiple_of(2) { det } else { -det };

    let conventions = SignConvention::ALL
        .into_iter()
        .filter(|c| match c {
            SignConvention::AsPrinted => agrees(det),
            SignConvention::AlternatingSign => agrees(alternating),
            SignConvention::NegatedCoefficients => agrees(negated_det),
        })
        .collect();

    Ok(HessenbergCheck {
        k,
        det,
        fib,
        matches_fk: sign.is_some(),
        sign,
        conventions,
    })
}

/// The first convention, in [`SignConvention::ALL`] order, that every
/// check supports.
pub fn consistent_convention<'a, I>(checks: I) -> Option<SignConvention>
where
    I: IntoIterator<Item = &'a HessenbergCheck>,
{
    let mut alive = SignConvention::ALL.to_vec();
    for check in checks {
        alive.retain(|c| check.conventions.contains(c));
    }
    alive.first().copied()
}
