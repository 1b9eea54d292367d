use num_complex::Complex64;

use super::jet::{Jet, Partials};
use crate::error::{Error, Result};

/// A member `f_λ` of a family with all coefficients instantiated.
#[derive(Debug, Clone)]
pub struct MapInstance {
    lambda: Vec<Complex64>,
    coeffs: Vec<Complex64>,
    /// `[param][power]`
    dcoeffs: Vec<Vec<Complex64>>,
    critical: Vec<Complex64>,
    /// `[critical][param]`
    dcritical: Vec<Vec<Complex64>>,
    escape_radius: f64,
}

impl MapInstance {
    pub(crate) fn new(
        lambda: Vec<Complex64>,
        coeffs: Vec<Complex64>,
        dcoeffs: Vec<Vec<Complex64>>,
        critical: Vec<Complex64>,
        dcritical: Vec<Vec<Complex64>>,
    ) -> Self {
        let d = coeffs.len() - 1;
        let lead = coeffs[d].norm();
        let rel_sum: f64 = coeffs.iter().map(|c| c.norm()).sum::<f64>() / lead;
        let escape_radius = (2.0 * rel_sum.max(1.0)).max((2.0 / lead).powf(1.0 / (d as f64 - 1.0)));
        Self {
            lambda,
            coeffs,
            dcoeffs,
            critical,
            dcritical,
            escape_radius,
        }
    }

    pub fn lambda(&self) -> &[Complex64] {
        &self.lambda
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs[self.degree()]
    }

    pub fn critical_points(&self) -> &[Complex64] {
        &self.critical
    }

    /// Bail-out radius `2·max(1, Σ|a_i|/|a_d|)`: beyond it every orbit
    /// escapes monotonically and `|log|1+ε|| ≤ 2 S/|z|` in `f = a_d z^d (1+ε)`.
    pub fn escape_radius(&self) -> f64 {
        self.escape_radius
    }

    /// Smallest `r` with `|f(z)| > |z|` for all `|z| > r`; every periodic
    /// point lies in the closed disk of this radius.
    pub fn growth_radius(&self) -> f64 {
        growth_radius(&self.coeffs)
    }

    /// `Σ_{i<d} |a_i| / |a_d|`, the constant of the tail bounds.
    pub fn lower_order_sum(&self) -> f64 {
        let d = self.degree();
        self.coeffs[..d].iter().map(|c| c.norm()).sum::<f64>() / self.coeffs[d].norm()
    }

    /// Centroid of every fibre `f^{-1}(w)`, `-a_{d-1} / (d a_d)`.
    pub fn barycenter(&self) -> Complex64 {
        let d = self.degree();
        -self.coeffs[d - 1] / (self.coeffs[d] * d as f64)
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `(f(z), f'(z))`.
    #[inline]
    pub fn eval_dz(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// `∂f/∂λ_i (z)` for every parameter coordinate.
    pub fn eval_dlambda(&self, z: Complex64) -> Partials {
        self.dcoeffs
            .iter()
            .map(|row| row.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c))
            .collect()
    }

    /// `f_λ(z(λ))` with the chain rule `∂f/∂z · ∂z/∂λ + ∂f/∂λ`.
    pub fn eval_jet(&self, z: &Jet) -> Jet {
        let (f, df) = self.eval_dz(z.value);
        let dl = self.eval_dlambda(z.value);
        Jet {
            value: f,
            partials: z.partials.iter().zip(&dl).map(|(w, d)| df * w + d).collect(),
        }
    }

    /// Jet of the marked critical point `c_j` at this parameter.
    pub fn critical_jet(&self, j: usize) -> Jet {
        Jet::new(self.critical[j], self.dcritical[j].iter().copied())
    }

    /// Jet of `f_λ^n(c_j(λ))`. Fails with the first non-finite iterate.
    pub fn orbit_jet(&self, j: usize, n: usize) -> Result<Jet> {
        let mut z = self.critical_jet(j);
        for k in 1..=n {
            z = self.eval_jet(&z);
            if !z.is_finite() {
                return Err(Error::Overflow { iterate: k });
            }
        }
        Ok(z)
    }

    /// Jets `f^k(c_j)` for `k = 0..=n`.
    pub fn orbit_jets(&self, j: usize, n: usize) -> Result<Vec<Jet>> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.critical_jet(j));
        for k in 1..=n {
            let next = self.eval_jet(&out[k - 1]);
            if !next.is_finite() {
                return Err(Error::Overflow { iterate: k });
            }
            out.push(next);
        }
        Ok(out)
    }

    /// `f^m(z)` and `(f^m)'(z)`.
    pub fn iterate_dz(&self, z: Complex64, m: usize) -> (Complex64, Complex64) {
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        for _ in 0..m {
            let (f, df) = self.eval_dz(w);
            dw *= df;
            w = f;
        }
        (w, dw)
    }

    pub fn iterate(&self, z: Complex64, m: usize) -> Complex64 {
        (0..m).fold(z, |w, _| self.eval(w))
    }

    /// Jet of `f^m(z)` in the parameter with `z` held fixed, i.e. the
    /// partials are `∂_λ f^m (z)`; also returns `(f^m)'(z)`.
    pub fn iterate_parameter_jet(&self, z: Complex64, m: usize) -> (Jet, Complex64) {
        let mut w = Jet::constant(z, self.dim());
        let mut dz = Complex64::new(1.0, 0.0);
        for _ in 0..m {
            let (_, df) = self.eval_dz(w.value);
            dz *= df;
            w = self.eval_jet(&w);
        }
        (w, dz)
    }
}

/// Positive root of `|a_d| r^d = Σ_{i<d} |a_i| r^i + r` by bisection.
fn growth_radius(coeffs: &[Complex64]) -> f64 {
    let d = coeffs.len() - 1;
    let lead = coeffs[d].norm();
    let g = |r: f64| {
        let lower: f64 = coeffs[..d]
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm() * r.powi(i as i32))
            .sum();
        lead * r.powi(d as i32) - lower - r
    };
    let mut hi = 1.0;
    while g(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use crate::family::FamilySpec;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn growth_radius_of_chebyshev_like_map() {
        let map = FamilySpec::quadratic().at(&[c(-3.0, 0.0)]).unwrap();
        let expect = (1.0 + 13f64.sqrt()) / 2.0;
        assert!((map.growth_radius() - expect).abs() < 1e-12);
        assert_eq!(map.escape_radius(), 8.0);
    }

    #[test]
    fn parameter_jet_of_iterate() {
        let map = FamilySpec::quadratic().at(&[c(-2.0, 0.0)]).unwrap();
        // f^1(z) = z^2 + c, ∂_c = 1; (f^1)'(2) = 4
        let (w, dz) = map.iterate_parameter_jet(c(2.0, 0.0), 1);
        assert_eq!(w.value, c(2.0, 0.0));
        assert_eq!(w.partials[0], c(1.0, 0.0));
        assert_eq!(dz, c(4.0, 0.0));
    }
}
