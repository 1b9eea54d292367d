use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::roots::{horner_noise, ratio, NewtonCorrection, NewtonRatio};
use crate::error::{Error, Result};

/// Univariate polynomial with complex coefficients in ascending order.
///
/// The coefficient vector is always trimmed so that the last entry is
/// nonzero; the zero polynomial has no coefficients and `degree() == None`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DensePolynomial {
    coeffs: Vec<Complex64>,
}

impl DensePolynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(vec![c])
    }

    /// The identity polynomial `z`.
    pub fn identity() -> Self {
        Self::from_real(&[0.0, 1.0])
    }

    /// `∏ (z - r)` over the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        roots.iter().fold(Self::constant(Complex64::new(1.0, 0.0)), |p, &r| {
            &p * &Self::new(vec![-r, Complex64::new(1.0, 0.0)])
        })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<Complex64> {
        self.coeffs.last().copied()
    }

    /// Sum of coefficient moduli.
    pub fn norm1(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by a single Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| c * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Composition `self ∘ inner`, evaluated by Horner's scheme in the
    /// polynomial ring. Fails if the resulting degree would exceed `cap`.
    pub fn compose(&self, inner: &DensePolynomial, cap: usize) -> Result<DensePolynomial> {
        let degree = self.degree().unwrap_or(0) * inner.degree().unwrap_or(0);
        if degree > cap {
            return Err(Error::Capacity { degree, cap });
        }
        let mut acc = DensePolynomial::zero();
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &DensePolynomial::constant(c);
        }
        Ok(acc)
    }

    /// Cauchy upper bound on the moduli of the roots.
    pub fn root_bound(&self) -> f64 {
        match self.leading() {
            Some(lead) if self.coeffs.len() > 1 => {
                let ln = lead.norm();
                1.0 + self.coeffs[..self.coeffs.len() - 1]
                    .iter()
                    .map(|c| c.norm() / ln)
                    .fold(0.0, f64::max)
            }
            _ => 0.0,
        }
    }
}

impl NewtonRatio for DensePolynomial {
    fn degree(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    fn correction(&self, z: Complex64) -> NewtonCorrection {
        let (p, dp) = self.eval_with_derivative(z);
        let r = z.norm();
        let magnitude = self.coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
        NewtonCorrection {
            ratio: ratio(p, dp),
            residual: p.norm(),
            noise: horner_noise(self.coeffs.len(), magnitude),
            slope: dp.norm(),
        }
    }
}

impl Add for &DensePolynomial {
    type Output = DensePolynomial;

    fn add(self, rhs: &DensePolynomial) -> DensePolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = Complex64::new(0.0, 0.0);
        DensePolynomial::new(
            (0..n)
                .map(|i| {
                    self.coeffs.get(i).copied().unwrap_or(zero)
                        + rhs.coeffs.get(i).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl Neg for &DensePolynomial {
    type Output = DensePolynomial;

    fn neg(self) -> DensePolynomial {
        DensePolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &DensePolynomial {
    type Output = DensePolynomial;

    fn sub(self, rhs: &DensePolynomial) -> DensePolynomial {
        self + &(-rhs)
    }
}

impl Mul for &DensePolynomial {
    type Output = DensePolynomial;

    fn mul(self, rhs: &DensePolynomial) -> DensePolynomial {
        if self.is_zero() || rhs.is_zero() {
            return DensePolynomial::zero();
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        DensePolynomial::new(out)
    }
}
