//! Perron data of nonnegative irreducible matrices and stochasticization
//! `stoch(M) = ρ⁻¹ D⁻¹ M D`, `D = diag(r)` for the right Perron vector `r`.

use num::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{kernel, Matrix};
use crate::markov_measure::StochasticMatrix;
use crate::rational::{approximate, from_f64, Rational};
use crate::shift_space::is_strongly_connected;

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 1_000_000;

/// Environment variable overriding the float tolerance.
pub const TOLERANCE_ENV: &str = "SOFICLAB_TOL";

/// `SOFICLAB_TOL` if set to a positive number, else `DEFAULT_TOLERANCE`.
pub fn tolerance() -> f64 {
    std::env::var(TOLERANCE_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<f64>().ok())
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or(DEFAULT_TOLERANCE)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerronData {
    pub rho: f64,
    /// Right eigenvector, scaled to maximum entry 1.
    pub vector: Vec<f64>,
    pub iterations: usize,
}

/// Power iteration on `M + I`, which is primitive when `M` is irreducible,
/// stopped when the Collatz–Wielandt bounds on `ρ` meet within `tol` (relative).
pub fn perron(m: &[Vec<f64>], tol: f64) -> Result<PerronData> {
    let n = m.len();
    if n == 0 || m.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid(
            "Perron data needs a nonempty square matrix".into(),
        ));
    }
    if m.iter().flatten().any(|&x| x < 0.0 || !x.is_finite()) {
        return Err(Error::Invalid(
            "Perron data needs finite nonnegative entries".into(),
        ));
    }
    let support: Vec<Vec<bool>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x > 0.0).collect())
        .collect();
    if !is_strongly_connected(&support) {
        return Err(Error::AmbiguousPerron);
    }
    let mut r = vec![1.0; n];
    for it in 1..=MAX_ITERATIONS {
        let mr: Vec<f64> = m
            .iter()
            .map(|row| row.iter().zip(&r).map(|(a, b)| a * b).sum())
            .collect();
        let ratios = mr.iter().zip(&r).map(|(a, b)| a / b);
        let lo = ratios.clone().fold(f64::INFINITY, f64::min);
        let hi = ratios.fold(0.0, f64::max);
        let next: Vec<f64> = mr.iter().zip(&r).map(|(a, b)| a + b).collect();
        let top = next.iter().cloned().fold(0.0, f64::max);
        r = next.into_iter().map(|x| x / top).collect();
        if hi - lo <= tol * hi.max(f64::MIN_POSITIVE) {
            return Ok(PerronData {
                rho: 0.5 * (lo + hi),
                vector: r,
                iterations: it,
            });
        }
    }
    Err(Error::Defect("power iteration did not converge".into()))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Stochasticized {
    pub matrix: StochasticMatrix,
    pub rho: f64,
    /// Whether `ρ` and `r` were found exactly.
    pub exact: bool,
}

/// Positive rational eigenvector for the eigenvalue `rho`, if one exists.
fn exact_eigenvector(m: &Matrix, rho: &Rational) -> Option<Vec<Rational>> {
    let n = m.rows();
    let ker = kernel(&m.sub(&Matrix::identity(n).scale(rho)));
    if ker.len() != 1 {
        return None;
    }
    let v = &ker[0];
    if v.iter().all(Signed::is_positive) {
        Some(v.clone())
    } else if v.iter().all(Signed::is_negative) {
        Some(v.iter().map(|x| -x).collect())
    } else {
        None
    }
}

fn conjugate(m: &Matrix, rho: &Rational, r: &[Rational]) -> Matrix {
    Matrix::from_fn(m.rows(), m.cols(), |i, j| {
        m.get(i, j) * &r[j] / (rho * &r[i])
    })
}

/// Rows of a float stochastic matrix made exactly stochastic.
fn renormalize(rows: &[Vec<f64>]) -> Result<StochasticMatrix> {
    let n = rows.len();
    let mut m = Matrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let exact: Vec<Rational> = row.iter().map(|&x| from_f64(x)).collect();
        let s: Rational = exact.iter().sum();
        if s.is_zero() {
            return Err(Error::Defect(
                "row of a stochasticized matrix vanished".into(),
            ));
        }
        for (j, x) in exact.into_iter().enumerate() {
            m.set(i, j, x / &s);
        }
    }
    StochasticMatrix::new(m)
}

/// `stoch(M)` for a nonnegative irreducible rational matrix. Exact when `ρ`
/// is a small-denominator rational with a rational Perron vector (always the
/// case for `ρ = 1` with rational data).
pub fn stochasticize(m: &Matrix) -> Result<Stochasticized> {
    if !m.is_square() || !m.is_nonnegative() {
        return Err(Error::Invalid(
            "stochasticization needs a square nonnegative matrix".into(),
        ));
    }
    let data = perron(&m.to_f64(), tolerance())?;
    let guess = approximate(data.rho, 1_000_000);
    if (crate::rational::to_f64(&guess) - data.rho).abs() <= 1e-9 * data.rho.max(1.0)
        && guess.is_positive()
    {
        if let Some(r) = exact_eigenvector(m, &guess) {
            let p = StochasticMatrix::new(conjugate(m, &guess, &r))?;
            return Ok(Stochasticized {
                matrix: p,
                rho: crate::rational::to_f64(&guess),
                exact: true,
            });
        }
    }
    let f = m.to_f64();
    let rows: Vec<Vec<f64>> = (0..f.len())
        .map(|i| {
            (0..f.len())
                .map(|j| f[i][j] * data.vector[j] / (data.rho * data.vector[i]))
                .collect()
        })
        .collect();
    Ok(Stochasticized {
        matrix: renormalize(&rows)?,
        rho: data.rho,
        exact: false,
    })
}

/// `stoch(M)` for a float matrix; never exact.
pub fn stochasticize_f64(m: &[Vec<f64>]) -> Result<Stochasticized> {
    let data = perron(m, tolerance())?;
    let rows: Vec<Vec<f64>> = (0..m.len())
        .map(|i| {
            (0..m.len())
                .map(|j| m[i][j] * data.vector[j] / (data.rho * data.vector[i]))
                .collect()
        })
        .collect();
    Ok(Stochasticized {
        matrix: renormalize(&rows)?,
        rho: data.rho,
        exact: false,
    })
}

/// Whether every row of `m` sums to exactly one.
pub fn is_row_stochastic(m: &Matrix) -> bool {
    (0..m.rows()).all(|i| m.row(i).iter().sum::<Rational>().is_one())
}
