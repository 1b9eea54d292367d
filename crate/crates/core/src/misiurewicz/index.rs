use std::f64::consts::TAU;

use num_complex::Complex64;

use super::{max_norm, system, PreperiodicSpec};
use crate::calculus::linalg::Matrix;
use crate::calculus::seeds::halton_in_polydisk;
use crate::error::{precondition, Error, Result};
use crate::family::FamilySpec;

/// Contour samples of the first winding-number pass.
pub const MIN_SAMPLES: usize = 256;
/// Largest distance of a winding number or probe average from an integer.
pub const MAX_DRIFT: f64 = 0.1;

const REFINED_SAMPLES: usize = 1024;
const PROBES: usize = 3;
const PROBE_SEEDS: u64 = 64;

/// `(1/2πi) ∮ F'/F` over the circle `|λ - center| = radius` by the
/// trapezoidal rule; `f` returns `(F, F')`.
pub fn winding_number(
    f: impl Fn(Complex64) -> Result<(Complex64, Complex64)>,
    center: Complex64,
    radius: f64,
) -> Result<u32> {
    if !(radius > 0.0) {
        return Err(precondition("radius must be positive"));
    }
    let integrate = |n: usize| -> Result<f64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let e = Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
            let (v, dv) = f(center + e * radius)?;
            if v == Complex64::new(0.0, 0.0) {
                return Err(Error::Inconclusive { drift: f64::INFINITY });
            }
            // dλ = i r e dθ, so F'/F dλ / 2πi = F'/F r e dθ / 2π
            acc += dv / v * e * radius;
        }
        Ok(acc.re / n as f64)
    };
    let mut w = integrate(MIN_SAMPLES)?;
    if (w - w.round()).abs() >= MAX_DRIFT / 10.0 {
        w = integrate(REFINED_SAMPLES)?;
    }
    let drift = (w - w.round()).abs();
    if !(drift < MAX_DRIFT) || w.round() < 0.0 {
        return Err(Error::Inconclusive { drift });
    }
    Ok(w.round() as u32)
}

/// Local intersection index of the graphs of `C` and `P` at `lambda`.
///
/// One parameter: winding number of `F` on the circle of `radius`, which
/// must agree with the one on twice the radius (no further zeros nearby).
/// Two parameters: the number of solutions of `F = ε` in the polydisk of
/// `radius`, averaged over three probes `ε` of size `1e-2 min_∂ ‖F‖`.
pub fn local_intersection_index(
    family: &FamilySpec,
    lambda: &[Complex64],
    spec: &PreperiodicSpec,
    radius: f64,
) -> Result<u32> {
    spec.validate(family)?;
    if !(radius > 0.0) {
        return Err(precondition("radius must be positive"));
    }
    match family.dim() {
        1 => {
            let f = |l: Complex64| -> Result<(Complex64, Complex64)> {
                let (v, j) = system(&family.at(&[l])?, spec)?;
                Ok((v[0], j.get(0, 0)))
            };
            let inner = winding_number(f, lambda[0], radius)?;
            let outer = winding_number(f, lambda[0], 2.0 * radius)?;
            if inner != outer {
                return Err(precondition(format!(
                    "another solution lies within twice the radius ({inner} inside, {outer} within 2r)"
                )));
            }
            if inner == 0 {
                return Err(precondition("no solution inside the contour"));
            }
            Ok(inner)
        }
        2 => probe_count(family, lambda, spec, radius),
        d => Err(precondition(format!("intersection index not implemented for dimension {d}"))),
    }
}

fn probe_count(family: &FamilySpec, lambda: &[Complex64], spec: &PreperiodicSpec, radius: f64) -> Result<u32> {
    let eval = |l: &[Complex64]| -> Result<(Vec<Complex64>, Matrix)> { system(&family.at(l)?, spec) };
    // minimum of ‖F‖ over the topological boundary of the polydisk
    let mut fmin = f64::INFINITY;
    const ANGLES: usize = 24;
    for a in 0..ANGLES {
        for b in 0..ANGLES {
            for s in [0.0, 0.5, 1.0] {
                let u = Complex64::from_polar(radius, TAU * a as f64 / ANGLES as f64);
                let v = Complex64::from_polar(s * radius, TAU * b as f64 / ANGLES as f64);
                for point in [[lambda[0] + u, lambda[1] + v], [lambda[0] + v, lambda[1] + u]] {
                    fmin = fmin.min(max_norm(&eval(&point)?.0));
                }
            }
        }
    }
    if !(fmin > 0.0) {
        return Err(Error::Inconclusive { drift: f64::INFINITY });
    }
    let mut total = 0usize;
    for probe in 0..PROBES {
        let dir = halton_in_polydisk(probe as u64 + 1, &[Complex64::new(0.0, 0.0); 2], 1.0);
        let scale = 1e-2 * fmin / max_norm(&dir).max(1e-3);
        let eps: Vec<Complex64> = dir.iter().map(|d| d * scale).collect();
        let mut found: Vec<Vec<Complex64>> = Vec::new();
        for i in 1..=PROBE_SEEDS {
            let seed = halton_in_polydisk(i, lambda, radius);
            if let Some(sol) = shifted_newton(&eval, &seed, &eps, radius) {
                let inside = sol.iter().zip(lambda).all(|(s, l)| (s - l).norm() < radius);
                let fresh = found
                    .iter()
                    .all(|f| f.iter().zip(&sol).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) > 1e-9 * radius);
                if inside && fresh {
                    found.push(sol);
                }
            }
        }
        total += found.len();
    }
    let mean = total as f64 / PROBES as f64;
    let drift = (mean - mean.round()).abs();
    if drift >= MAX_DRIFT || mean.round() < 1.0 {
        return Err(Error::Inconclusive { drift });
    }
    Ok(mean.round() as u32)
}

fn shifted_newton(
    eval: &impl Fn(&[Complex64]) -> Result<(Vec<Complex64>, Matrix)>,
    seed: &[Complex64],
    eps: &[Complex64],
    radius: f64,
) -> Option<Vec<Complex64>> {
    let mut l = seed.to_vec();
    for _ in 0..60 {
        let (v, j) = eval(&l).ok()?;
        let rhs: Vec<Complex64> = v.iter().zip(eps).map(|(a, e)| e - a).collect();
        let step = j.lu().solve(&rhs)?;
        for (x, s) in l.iter_mut().zip(&step) {
            *x += s;
        }
        if max_norm(&step) <= 1e-10 * radius {
            return Some(l);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_function_has_index_one() {
        let p = c(0.3, -0.2);
        for r in [1e-6, 0.1, 10.0] {
            assert_eq!(winding_number(|l| Ok((l - p, c(1.0, 0.0))), p + c(r / 3.0, 0.0), r).unwrap(), 1);
        }
    }

    #[test]
    fn quadratic_examples() {
        let q = FamilySpec::quadratic();
        let spec = PreperiodicSpec::single(2, 1);
        assert_eq!(local_intersection_index(&q, &[c(-2.0, 0.0)], &spec, 0.1).unwrap(), 1);
        assert_eq!(local_intersection_index(&q, &[c(0.0, 0.0)], &spec, 0.1).unwrap(), 3);
    }

    #[test]
    fn nearby_zero_is_detected() {
        let q = FamilySpec::quadratic();
        let spec = PreperiodicSpec::single(2, 1);
        // twice the radius encloses -2
        assert!(local_intersection_index(&q, &[c(0.0, 0.0)], &spec, 1.5).is_err());
        // a zero on the contour, between two samples of the refined pass
        let z = Complex64::from_polar(0.1, TAU / 2048.0);
        let r = winding_number(|l| Ok((l - z, c(1.0, 0.0))), c(0.0, 0.0), 0.1);
        assert!(matches!(r, Err(Error::Inconclusive { .. })), "{r:?}");
    }
}
