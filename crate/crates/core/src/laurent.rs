//! Finite Laurent sums `Σ c_k ((z − a_k)/ρ_k)^{p_k}`.
//!
//! This is the common currency for analytic functions on a domain: the
//! minimax approximant `φ`, its derivative `φ′`, quadrature test functions and
//! the quadratic differentials handed to the Stokes-graph tools.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `((z − center)/scale)^power`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerTerm {
    pub center: Complex64,
    pub scale: f64,
    pub power: i32,
}

impl PowerTerm {
    pub fn new(center: Complex64, scale: f64, power: i32) -> Self {
        PowerTerm {
            center,
            scale,
            power,
        }
    }

    /// Plain monomial `z^power`.
    pub fn monomial(power: i32) -> Self {
        Self::new(Complex64::new(0.0, 0.0), 1.0, power)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z - self.center) / self.scale).powi(self.power)
    }

    /// Pole location, if the power is negative.
    pub fn pole(&self) -> Option<Complex64> {
        (self.power < 0).then_some(self.center)
    }

    pub fn label(&self) -> String {
        // Components that print as zero are dropped, so `-0.0000` never shows.
        let tidy = |x: f64| if x.abs() < 5e-5 { 0.0 } else { x };
        let (re, im) = (tidy(self.center.re), tidy(self.center.im));
        let base = if re == 0.0 && im == 0.0 {
            "z".to_string()
        } else {
            format!("(z-({re:.4}{im:+.4}i))")
        };
        let base = if self.scale == 1.0 {
            base
        } else {
            format!("{base}/{:.4}", self.scale)
        };
        format!("[{base}]^{}", self.power)
    }
}

/// A finite sum of [`PowerTerm`]s with complex coefficients.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LaurentSum {
    terms: Vec<(Complex64, PowerTerm)>,
}

impl LaurentSum {
    pub fn new(terms: Vec<(Complex64, PowerTerm)>) -> Self {
        LaurentSum { terms }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![(c, PowerTerm::monomial(0))])
    }

    /// `Σ_j coeffs[j] z^j`.
    pub fn polynomial(coeffs: &[Complex64]) -> Self {
        Self::new(
            coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| (c, PowerTerm::monomial(j as i32)))
                .collect(),
        )
    }

    /// `c · (z − center)^power`.
    pub fn single(c: Complex64, center: Complex64, power: i32) -> Self {
        Self::new(vec![(c, PowerTerm::new(center, 1.0, power))])
    }

    pub fn terms(&self) -> &[(Complex64, PowerTerm)] {
        &self.terms
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms.iter().map(|(c, t)| c * t.eval(z)).sum()
    }

    pub fn derivative(&self) -> LaurentSum {
        LaurentSum::new(
            self.terms
                .iter()
                .filter(|(_, t)| t.power != 0)
                .map(|(c, t)| {
                    (
                        c * t.power as f64 / t.scale,
                        PowerTerm::new(t.center, t.scale, t.power - 1),
                    )
                })
                .collect(),
        )
    }

    pub fn scaled(&self, k: Complex64) -> LaurentSum {
        LaurentSum::new(self.terms.iter().map(|(c, t)| (c * k, *t)).collect())
    }

    pub fn plus(&self, other: &LaurentSum) -> LaurentSum {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        LaurentSum::new(terms)
    }

    /// Distinct pole locations with their (largest) orders.
    pub fn poles(&self) -> Vec<(Complex64, u32)> {
        let mut poles: Vec<(Complex64, u32)> = Vec::new();
        for (c, t) in &self.terms {
            if *c == Complex64::new(0.0, 0.0) {
                continue;
            }
            if let Some(p) = t.pole() {
                let order = t.power.unsigned_abs();
                match poles.iter_mut().find(|(q, _)| (q - p).norm() < 1e-14) {
                    Some(entry) => entry.1 = entry.1.max(order),
                    None => poles.push((p, order)),
                }
            }
        }
        poles
    }

    pub fn to_file(&self) -> LaurentFile {
        LaurentFile {
            terms: self
                .terms
                .iter()
                .map(|(c, t)| TermFile {
                    coeff: [c.re, c.im],
                    center: [t.center.re, t.center.im],
                    scale: t.scale,
                    power: t.power,
                })
                .collect(),
        }
    }
}

/// Serialized Laurent sum, e.g. `{"terms": [{"coeff": [1,0], "power": 1}]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct LaurentFile {
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermFile {
    pub coeff: [f64; 2],
    #[serde(default)]
    pub center: [f64; 2],
    #[serde(default = "unit_scale")]
    pub scale: f64,
    pub power: i32,
}

fn unit_scale() -> f64 {
    1.0
}

impl LaurentFile {
    pub fn into_sum(&self) -> Result<LaurentSum> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if !(t.scale > 0.0) {
                return Err(Error::InvalidInput(format!("term scale {} must be positive", t.scale)));
            }
            terms.push((
                Complex64::new(t.coeff[0], t.coeff[1]),
                PowerTerm::new(Complex64::new(t.center[0], t.center[1]), t.scale, t.power),
            ));
        }
        Ok(LaurentSum::new(terms))
    }
}
