//! Truncated power series `Σ_{k<N} c_k (z − z0)^k` over `Complex64`.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const DEFAULT_ORDER: usize = 48;

#[derive(Clone, Debug, PartialEq)]
pub struct Series {
    pub coeffs: Vec<Complex64>,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Series {
    /// Pads or truncates to exactly `order` coefficients.
    pub fn new(mut coeffs: Vec<Complex64>, order: usize) -> Self {
        coeffs.resize(order, zero());
        Series { coeffs }
    }

    pub fn from_real(coeffs: &[f64], order: usize) -> Self {
        Series::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect(), order)
    }

    pub fn zero(order: usize) -> Self {
        Series::new(Vec::new(), order)
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        Series::new(vec![c], order)
    }

    /// The series of `z − z0` itself.
    pub fn identity(order: usize) -> Self {
        Series::new(vec![zero(), Complex64::new(1.0, 0.0)], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> Complex64 {
        self.coeffs.get(k).copied().unwrap_or_else(zero)
    }

    /// Index of the first coefficient above `tol` in modulus.
    pub fn valuation(&self, tol: f64) -> Option<usize> {
        self.coeffs.iter().position(|c| c.norm() > tol)
    }

    pub fn eval(&self, h: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(zero(), |acc, c| acc * h + c)
    }

    pub fn add(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        Series::new((0..n).map(|k| self.coeffs[k] + other.coeffs[k]).collect(), n)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, k: Complex64) -> Series {
        Series {
            coeffs: self.coeffs.iter().map(|c| c * k).collect(),
        }
    }

    pub fn mul(&self, other: &Series) -> Series {
        let n = self.order().min(other.order());
        let mut out = vec![zero(); n];
        for (i, a) in self.coeffs.iter().take(n).enumerate() {
            if *a == zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Series { coeffs: out }
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn inverse(&self) -> Result<Series> {
        let n = self.order();
        let c0 = self.coeff(0);
        if c0.norm() == 0.0 {
            return Err(Error::InvalidInput("series inverse needs a nonzero constant term".into()));
        }
        let mut out = vec![zero(); n];
        out[0] = 1.0 / c0;
        for k in 1..n {
            let s: Complex64 = (1..=k).map(|j| self.coeffs[j] * out[k - j]).sum();
            out[k] = -s / c0;
        }
        Ok(Series { coeffs: out })
    }

    pub fn div(&self, other: &Series) -> Result<Series> {
        Ok(self.mul(&other.inverse()?))
    }

    /// Derivative; the top coefficient is lost so the order drops by one.
    pub fn derivative(&self) -> Series {
        let n = self.order();
        Series::new(
            (1..n).map(|k| self.coeffs[k] * k as f64).collect(),
            n.saturating_sub(1),
        )
    }

    /// Antiderivative vanishing at the centre, truncated to the same order.
    pub fn integral(&self) -> Series {
        let n = self.order();
        let mut out = vec![zero(); n];
        for k in 1..n {
            out[k] = self.coeffs[k - 1] / k as f64;
        }
        Series { coeffs: out }
    }

    /// Principal-branch square root; needs a nonzero constant term.
    pub fn sqrt(&self) -> Result<Series> {
        let n = self.order();
        let c0 = self.coeff(0);
        if c0.norm() == 0.0 {
            return Err(Error::InvalidInput("series sqrt needs a nonzero constant term".into()));
        }
        let mut out = vec![zero(); n];
        out[0] = c0.sqrt();
        for k in 1..n {
            let s: Complex64 = (1..k).map(|j| out[j] * out[k - j]).sum();
            out[k] = (self.coeffs[k] - s) / (2.0 * out[0]);
        }
        Ok(Series { coeffs: out })
    }

    /// Principal-branch logarithm; needs a nonzero constant term.
    pub fn log(&self) -> Result<Series> {
        let c0 = self.coeff(0);
        if c0.norm() == 0.0 {
            return Err(Error::InvalidInput("series log needs a nonzero constant term".into()));
        }
        let d = self.derivative().div(&Series::new(self.coeffs.clone(), self.order() - 1))?;
        let mut out = Series::new(d.coeffs, self.order()).integral();
        out.coeffs[0] = c0.ln();
        Ok(out)
    }

    pub fn exp(&self) -> Series {
        let n = self.order();
        let mut out = vec![zero(); n];
        if n == 0 {
            return Series { coeffs: out };
        }
        out[0] = self.coeffs[0].exp();
        // k e_k = Σ_{j=1}^{k} j a_j e_{k−j}
        for k in 1..n {
            let s: Complex64 = (1..=k).map(|j| self.coeffs[j] * j as f64 * out[k - j]).sum();
            out[k] = s / k as f64;
        }
        Series { coeffs: out }
    }

    /// `self ∘ inner`; `inner` must vanish at the centre.
    pub fn compose(&self, inner: &Series) -> Result<Series> {
        if inner.coeff(0).norm() > 1e-14 {
            return Err(Error::InvalidInput("composition needs inner(0) = 0".into()));
        }
        let n = self.order().min(inner.order());
        let inner = Series::new(inner.coeffs.clone(), n);
        let mut out = Series::zero(n);
        for c in self.coeffs.iter().take(n).rev() {
            out = out.mul(&inner);
            out.coeffs[0] += c;
        }
        Ok(out)
    }

    /// Compositional inverse `g` with `self(g(w)) = w`; needs `self(0) = 0`
    /// and `self′(0) ≠ 0`.
    pub fn reversion(&self) -> Result<Series> {
        let n = self.order();
        let a1 = self.coeff(1);
        if self.coeff(0).norm() > 1e-14 || a1.norm() == 0.0 {
            return Err(Error::InvalidInput(
                "reversion needs f(0) = 0 and f′(0) ≠ 0".into(),
            ));
        }
        // Fixed point g ← g − (f∘g − w)/a1 gains one correct coefficient per pass.
        let mut g = Series::new(vec![zero(), 1.0 / a1], n);
        let w = Series::identity(n);
        for _ in 0..n {
            let defect = self.compose(&g)?.sub(&w);
            if defect.coeffs.iter().all(|c| c.norm() < 1e-300) {
                break;
            }
            g = g.sub(&defect.scale(1.0 / a1));
        }
        Ok(g)
    }

    /// Largest `|c_k|` over `k ≥ from`.
    pub fn tail_norm(&self, from: usize) -> f64 {
        self.coeffs.iter().skip(from).map(|c| c.norm()).fold(0.0, f64::max)
    }
}
