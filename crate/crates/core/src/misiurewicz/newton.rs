use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{max_norm, system, PreperiodicSpec};
use crate::error::{precondition, Error, Result};
use crate::family::FamilySpec;

/// Condition estimate above which the Jacobian counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonOutcome {
    pub lambda: Vec<Complex64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Newton's method on `F_j(λ) = f^{n_j+m_j}(c_j) - f^{n_j}(c_j)`.
///
/// Succeeds once a step shorter than `tol` lands on `‖F‖∞ ≤ tol`.
pub fn newton_solve(
    family: &FamilySpec,
    spec: &PreperiodicSpec,
    lambda0: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<NewtonOutcome> {
    spec.validate(family)?;
    if lambda0.len() != family.dim() {
        return Err(precondition("starting point has the wrong dimension"));
    }
    if lambda0.iter().any(|z| !z.is_finite()) {
        return Err(precondition("starting point is not finite"));
    }
    if !(tol > 0.0) {
        return Err(precondition("tolerance must be positive"));
    }
    let mut lambda = lambda0.to_vec();
    let mut residual = f64::INFINITY;
    for iter in 1..=max_iter {
        let (values, jac) = system(&family.at(&lambda)?, spec)?;
        residual = max_norm(&values);
        let lu = jac.lu();
        let condition = lu.condition();
        if !(condition <= MAX_CONDITION) {
            return Err(Error::Singular { condition });
        }
        let rhs: Vec<Complex64> = values.iter().map(|v| -v).collect();
        let step = lu.solve(&rhs).ok_or(Error::Singular { condition })?;
        for (l, s) in lambda.iter_mut().zip(&step) {
            *l += s;
        }
        if max_norm(&step) < tol {
            let (after, _) = system(&family.at(&lambda)?, spec)?;
            residual = max_norm(&after);
            if residual <= tol {
                return Ok(NewtonOutcome {
                    lambda,
                    residual,
                    iterations: iter,
                });
            }
        }
    }
    Err(Error::Divergence {
        iterations: max_iter,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn converges_to_chebyshev_parameter() {
        let q = FamilySpec::quadratic();
        let out = newton_solve(&q, &PreperiodicSpec::single(2, 1), &[c(-1.8)], 1e-12, 100).unwrap();
        assert!((out.lambda[0] - c(-2.0)).norm() <= 1e-12);
        assert!(out.residual < 1e-12);
    }

    #[test]
    fn double_root_converges_linearly() {
        let q = FamilySpec::quadratic();
        let out = newton_solve(&q, &PreperiodicSpec::single(1, 1), &[c(0.1)], 1e-12, 100).unwrap();
        assert!(out.lambda[0].norm() <= 1e-11);
    }

    #[test]
    fn preconditions() {
        let q = FamilySpec::quadratic();
        let long = PreperiodicSpec::new(vec![(2, 1), (1, 1)]);
        assert!(matches!(newton_solve(&q, &long, &[c(0.0)], 1e-12, 10), Err(Error::Precondition(_))));
        let nan = [Complex64::new(f64::NAN, 0.0)];
        assert!(newton_solve(&q, &PreperiodicSpec::single(2, 1), &nan, 1e-12, 10).is_err());
    }

    #[test]
    fn singular_jacobian_is_reported() {
        // F = c^2 for (1,1), so F'(0) = 0
        let q = FamilySpec::quadratic();
        let r = newton_solve(&q, &PreperiodicSpec::single(1, 1), &[c(0.0)], 1e-12, 10);
        assert!(matches!(r, Err(Error::Singular { .. })));
    }

    #[test]
    fn two_parameter_system() {
        let cubic = FamilySpec::cubic_pm();
        let spec = PreperiodicSpec::new(vec![(2, 1), (2, 1)]);
        let seed = crate::calculus::seeds::halton_in_polydisk(7, &[Complex64::new(0.0, 0.0); 2], 1.5);
        let out = newton_solve(&cubic, &spec, &seed, 1e-12, 100).unwrap();
        let (values, _) = system(&cubic.at(&out.lambda).unwrap(), &spec).unwrap();
        assert!(max_norm(&values) <= 1e-12);
        assert!((out.lambda[0] - Complex64::new(-0.8377606872049098, -0.15177306265340204)).norm() <= 1e-9);
        assert!(out.lambda[1].norm() <= 1e-9);
    }
}
