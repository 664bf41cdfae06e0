//! Dense least-squares kernels shared by the solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Condition number of the Gram matrix above which a ridge term is added.
const GRAM_CONDITION_LIMIT: f64 = 1e13;
const RIDGE: f64 = 1e-13;

#[derive(Clone, Debug)]
pub(crate) struct ComplexSolve {
    pub coeffs: Vec<Complex64>,
    pub ridged: bool,
}

/// Minimizes `Σ_i w_i |f_i − Σ_k c_k B_ik|²` through the normal equations,
/// factored by QR. `basis` is row-major, one row per sample.
pub(crate) fn weighted_complex_lstsq(
    basis: &DMatrix<Complex64>,
    rhs: &[Complex64],
    weights: &[f64],
) -> Result<ComplexSolve> {
    let (m, n) = basis.shape();
    let mut gram = DMatrix::<Complex64>::zeros(n, n);
    let mut proj = DVector::<Complex64>::zeros(n);
    for i in 0..m {
        let w = weights[i];
        if w == 0.0 {
            continue;
        }
        for k in 0..n {
            let bk = basis[(i, k)].conj() * w;
            proj[k] += bk * rhs[i];
            for l in k..n {
                gram[(k, l)] += bk * basis[(i, l)];
            }
        }
    }
    for k in 0..n {
        for l in 0..k {
            gram[(k, l)] = gram[(l, k)].conj();
        }
    }
    let sv = gram.clone().singular_values();
    let smax = sv.max();
    let smin = sv.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let ridged = !(condition < GRAM_CONDITION_LIMIT);
    if ridged {
        let shift = RIDGE * gram.diagonal().iter().map(|d| d.re).sum::<f64>() / n as f64;
        for k in 0..n {
            gram[(k, k)] += shift;
        }
    }
    let coeffs = gram
        .qr()
        .solve(&proj)
        .ok_or_else(|| Error::Numerical("singular normal equations".into()))?;
    if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::Numerical("non-finite least-squares solution".into()));
    }
    Ok(ComplexSolve {
        coeffs: coeffs.iter().cloned().collect(),
        ridged,
    })
}

#[derive(Clone, Debug)]
pub(crate) struct RealSolve {
    pub x: DVector<f64>,
    pub singular_values: Vec<f64>,
}

impl RealSolve {
    pub fn condition(&self) -> f64 {
        let max = self.singular_values.iter().cloned().fold(0.0, f64::max);
        let min = self.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        max / min
    }
}

/// Overdetermined `A x ≈ b` by Householder QR on column-equilibrated `A`.
/// Fails when the scaled matrix is numerically rank deficient.
pub(crate) fn real_lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<RealSolve> {
    let (m, n) = a.shape();
    if m < n {
        return Err(Error::InvalidInput(format!(
            "least squares needs at least as many rows ({m}) as unknowns ({n})"
        )));
    }
    let norms: Vec<f64> = (0..n).map(|k| a.column(k).norm().max(f64::MIN_POSITIVE)).collect();
    let mut scaled = a.clone();
    for (k, s) in norms.iter().enumerate() {
        scaled.column_mut(k).unscale_mut(*s);
    }
    let qr = scaled.qr();
    let r = qr.r();
    let singular_values: Vec<f64> = r.clone().singular_values().iter().cloned().collect();
    let smax = singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    if !(smin > 1e-14 * smax) {
        return Err(Error::Numerical(format!(
            "rank-deficient least-squares system (σ_min/σ_max = {:.3e})",
            smin / smax
        )));
    }
    let qtb = qr.q().transpose() * b;
    let mut x = r
        .solve_upper_triangular(&qtb)
        .ok_or_else(|| Error::Numerical("singular triangular factor".into()))?;
    for (k, s) in norms.iter().enumerate() {
        x[k] /= s;
    }
    Ok(RealSolve {
        x,
        singular_values,
    })
}
