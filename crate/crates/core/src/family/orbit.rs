use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::jet::Jet;
use super::map::MapInstance;
use super::spec::FamilySpec;
use crate::calculus::roots::{horner_noise, ratio};
use crate::calculus::{all_roots, NewtonCorrection, NewtonRatio, RootConfig};
use crate::error::{precondition, Error, Result};

/// Largest iterate degree `d^m` accepted by [`periodic_points`].
pub const DEFAULT_DEGREE_CAP: usize = 1 << 14;

/// Beyond this modulus iterates are followed through their logarithmic
/// derivative only.
const HUGE: f64 = 1e150;

/// `f_λ(z)` by Horner's scheme.
pub fn eval_map(family: &FamilySpec, lambda: &[Complex64], z: Complex64) -> Result<Complex64> {
    if !z.is_finite() {
        return Err(Error::Overflow { iterate: 0 });
    }
    let w = family.at(lambda)?.eval(z);
    if w.is_finite() {
        Ok(w)
    } else {
        Err(Error::Overflow { iterate: 1 })
    }
}

/// `f_λ^n(c_j(λ))` with its parameter derivatives.
pub fn orbit_jet(family: &FamilySpec, lambda: &[Complex64], j: usize, n: usize) -> Result<Jet> {
    if j >= family.n_critical() {
        return Err(precondition(format!(
            "critical index {j} out of range ({} marked points)",
            family.n_critical()
        )));
    }
    family.at(lambda)?.orbit_jet(j, n)
}

/// Residual tolerance accepted by [`cycle_multiplier`].
pub fn cycle_tolerance(p: Complex64) -> f64 {
    1e-8 * p.norm().max(1.0)
}

/// Product of `f'` along the `m`-orbit of `p`.
pub fn cycle_multiplier(map: &MapInstance, p: Complex64, m: usize) -> Result<Complex64> {
    if m == 0 {
        return Err(precondition("period must be at least 1"));
    }
    let (w, dw) = map.iterate_dz(p, m);
    let residual = (w - p).norm();
    if !(residual <= cycle_tolerance(p)) {
        return Err(Error::NotACycle { residual });
    }
    Ok(dw)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodicPoint {
    pub point: Complex64,
    pub multiplier: Complex64,
    pub multiplicity: usize,
}

/// `f^m(z) - z` evaluated by iterating the map.
pub struct PeriodicEquation<'a> {
    pub map: &'a MapInstance,
    pub period: usize,
}

impl NewtonRatio for PeriodicEquation<'_> {
    fn degree(&self) -> usize {
        self.map.degree().pow(self.period as u32)
    }

    fn correction(&self, z: Complex64) -> NewtonCorrection {
        let d = self.map.degree() as f64;
        let mut w = z;
        let mut dw = Complex64::new(1.0, 0.0);
        // Running bound on the rounding error of w.
        let mut err = 0.0;
        for k in 0..self.period {
            if w.norm() > HUGE {
                // f^j ~ a_d w^d: the log-derivative multiplies by d each step
                // and z is negligible next to f^m(z).
                let mut log_deriv = dw / w;
                for _ in k..self.period {
                    log_deriv *= d;
                }
                return NewtonCorrection {
                    ratio: log_deriv.inv(),
                    residual: f64::INFINITY,
                    noise: 0.0,
                    slope: f64::INFINITY,
                };
            }
            let (f, df) = self.map.eval_dz(w);
            let r = w.norm();
            let magnitude = self.map.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm());
            err = df.norm() * err + horner_noise(self.map.coeffs().len(), magnitude);
            dw *= df;
            w = f;
        }
        let value = w - z;
        let slope = dw - 1.0;
        NewtonCorrection {
            ratio: ratio(value, slope),
            residual: value.norm(),
            noise: err + f64::EPSILON * z.norm(),
            slope: slope.norm(),
        }
    }
}

/// All solutions of `f^m(z) = z` with multiplicity and multiplier.
pub fn periodic_points(map: &MapInstance, m: usize, cap: usize) -> Result<Vec<PeriodicPoint>> {
    if m == 0 {
        return Err(precondition("period must be at least 1"));
    }
    let degree = map
        .degree()
        .checked_pow(m as u32)
        .filter(|&n| n <= cap)
        .ok_or(Error::Capacity {
            degree: map.degree().saturating_pow(m as u32),
            cap,
        })?;
    let equation = PeriodicEquation { map, period: m };
    debug_assert_eq!(equation.degree(), degree);
    let config = RootConfig {
        start: Some((Complex64::new(0.0, 0.0), map.growth_radius() * 1.05)),
        ..RootConfig::default()
    };
    let roots = all_roots(&equation, &config);
    if !roots.converged {
        return Err(Error::Divergence {
            iterations: roots.iterations,
            residual: roots.roots.iter().map(|r| r.radius).fold(0.0, f64::max),
        });
    }
    Ok(roots
        .roots
        .into_iter()
        .map(|r| PeriodicPoint {
            point: r.value,
            multiplier: map.iterate_dz(r.value, m).1,
            multiplicity: r.multiplicity,
        })
        .collect())
}
