use std::sync::Arc;

use num_complex::Complex64;

use super::map::MapInstance;
use super::param_poly::ParamPolynomial;
use crate::error::{precondition, Result};

/// A holomorphic family of polynomials `f_λ(z) = Σ a_i(λ) z^i` of constant
/// degree, together with marked critical points `c_j(λ)`.
///
/// Coefficients and critical points are polynomial maps of the parameter;
/// their parameter derivatives are differentiated formally once here.
#[derive(Debug, Clone)]
pub struct FamilySpec {
    name: String,
    degree: usize,
    dim: usize,
    coeffs: Vec<ParamPolynomial>,
    /// `[param][power]`
    coeff_partials: Vec<Vec<ParamPolynomial>>,
    critical: Vec<ParamPolynomial>,
    /// `[critical][param]`
    critical_partials: Vec<Vec<ParamPolynomial>>,
    parameter_disk: Option<(Complex64, f64)>,
}

impl FamilySpec {
    /// `coeffs[i]` is the coefficient of `z^i`. The leading coefficient must
    /// be a nonzero constant so the degree cannot drop anywhere.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        coeffs: Vec<ParamPolynomial>,
        critical: Vec<ParamPolynomial>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(precondition("parameter dimension must be at least 1"));
        }
        if coeffs.len() < 3 {
            return Err(precondition("degree must be at least 2"));
        }
        if coeffs.iter().chain(&critical).any(|p| p.dim() != dim) {
            return Err(precondition("coefficient arity differs from the parameter dimension"));
        }
        match coeffs.last().and_then(|p| p.as_constant()) {
            Some(c) if c != Complex64::new(0.0, 0.0) => {}
            _ => return Err(precondition("leading coefficient must be a nonzero constant")),
        }
        if critical.is_empty() {
            return Err(precondition("at least one marked critical point is required"));
        }
        let coeff_partials = (0..dim)
            .map(|i| coeffs.iter().map(|c| c.partial(i)).collect())
            .collect();
        let critical_partials = critical
            .iter()
            .map(|c| (0..dim).map(|i| c.partial(i)).collect())
            .collect();
        Ok(Self {
            name: name.into(),
            degree: coeffs.len() - 1,
            dim,
            coeffs,
            coeff_partials,
            critical,
            critical_partials,
            parameter_disk: None,
        })
    }

    /// Unicritical family `z^d + λ` with the critical point `0` marked.
    pub fn unicritical(d: usize) -> Self {
        assert!(d >= 2, "unicritical degree must be at least 2");
        let mut coeffs = vec![ParamPolynomial::zero(1); d + 1];
        coeffs[0] = ParamPolynomial::variable(1, 0);
        coeffs[d] = ParamPolynomial::constant(1, Complex64::new(1.0, 0.0));
        let critical = vec![ParamPolynomial::zero(1)];
        let disk = if d == 2 {
            (Complex64::new(-0.5, 0.0), 1.5)
        } else {
            (Complex64::new(0.0, 0.0), 2f64.powf(1.0 / (d as f64 - 1.0)))
        };
        Self::new(format!("unicritical{d}"), 1, coeffs, critical)
            .expect("unicritical family is well formed")
            .with_parameter_disk(disk.0, disk.1)
    }

    /// The quadratic family `z^2 + c`.
    pub fn quadratic() -> Self {
        Self::unicritical(2)
    }

    /// Cubic family `z^3 - 3a^2 z + b` with critical points `±a`,
    /// parameters `(a, b)`.
    pub fn cubic_pm() -> Self {
        let a = ParamPolynomial::variable(2, 0);
        let b = ParamPolynomial::variable(2, 1);
        let coeffs = vec![
            b,
            a.mul(&a).scale(Complex64::new(-3.0, 0.0)),
            ParamPolynomial::zero(2),
            ParamPolynomial::constant(2, Complex64::new(1.0, 0.0)),
        ];
        let critical = vec![a.clone(), a.scale(Complex64::new(-1.0, 0.0))];
        Self::new("cubic_pm", 2, coeffs, critical).expect("cubic family is well formed")
    }

    /// Disk known to contain every parameter with bounded marked critical
    /// orbit (one-parameter families only); seeds parameter-space root finding.
    pub fn with_parameter_disk(mut self, center: Complex64, radius: f64) -> Self {
        self.parameter_disk = Some((center, radius));
        self
    }

    pub fn parameter_disk(&self) -> Option<(Complex64, f64)> {
        self.parameter_disk
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_critical(&self) -> usize {
        self.critical.len()
    }

    pub fn coeffs(&self) -> &[ParamPolynomial] {
        &self.coeffs
    }

    pub fn critical(&self) -> &[ParamPolynomial] {
        &self.critical
    }

    /// Instantiates coefficients, critical points and their parameter
    /// derivatives at `λ`.
    pub fn at(&self, lambda: &[Complex64]) -> Result<MapInstance> {
        if lambda.len() != self.dim {
            return Err(precondition(format!(
                "parameter has {} coordinates, family {} expects {}",
                lambda.len(),
                self.name,
                self.dim
            )));
        }
        if lambda.iter().any(|l| !l.is_finite()) {
            return Err(precondition("parameter is not finite"));
        }
        let coeffs: Vec<Complex64> = self.coeffs.iter().map(|c| c.eval(lambda)).collect();
        let dcoeffs = self
            .coeff_partials
            .iter()
            .map(|row| row.iter().map(|c| c.eval(lambda)).collect())
            .collect();
        let critical = self.critical.iter().map(|c| c.eval(lambda)).collect();
        let dcritical = self
            .critical_partials
            .iter()
            .map(|row| row.iter().map(|c| c.eval(lambda)).collect())
            .collect();
        Ok(MapInstance::new(lambda.to_vec(), coeffs, dcoeffs, critical, dcritical))
    }

    pub fn shared(self) -> Arc<Self> {
        Arc::new(self)
    }
}
