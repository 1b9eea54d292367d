use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{local_intersection_index, matrix_norm, orbit_failure, system, MisiurewiczCertificate, PreperiodicSpec, Rejection};
use crate::calculus::linalg::Matrix;
use crate::error::{precondition, Result};
use crate::family::FamilySpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyConfig {
    pub tol_residual: f64,
    pub delta_rep: f64,
    pub delta_strict: f64,
    pub delta_trans: f64,
    /// Contour radius of the index computation; `None` picks
    /// `min(0.1, 0.05/‖DF‖)`.
    pub index_radius: Option<f64>,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            tol_residual: 1e-10,
            delta_rep: 1e-6,
            delta_strict: 1e-6,
            delta_trans: 1e-8,
            index_radius: None,
        }
    }
}

/// Outcome of [`certify`] on a well-formed input.
pub type Verdict = std::result::Result<MisiurewiczCertificate, Rejection>;

/// Runs every check in a fixed order: residual, repelling, strictness,
/// minimality, intersection index against `det D(C - P)`.
pub fn certify(family: &FamilySpec, lambda: &[Complex64], spec: &PreperiodicSpec, config: &CertifyConfig) -> Result<Verdict> {
    spec.validate(family)?;
    if lambda.len() != family.dim() || lambda.iter().any(|z| !z.is_finite()) {
        return Err(precondition("parameter has the wrong dimension or is not finite"));
    }
    Ok(run_checks(family, lambda, spec, config))
}

fn run_checks(family: &FamilySpec, lambda: &[Complex64], spec: &PreperiodicSpec, config: &CertifyConfig) -> Verdict {
    let map = family.at(lambda).map_err(orbit_failure)?;
    let (values, jac) = system(&map, spec).map_err(orbit_failure)?;
    let residuals: Vec<f64> = values.iter().map(|v| v.norm()).collect();
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if !(worst <= config.tol_residual) {
        return Err(Rejection::ResidualAboveTolerance {
            residual: worst,
            tol: config.tol_residual,
        });
    }
    let k = spec.len();
    let mut cycle_points = Vec::with_capacity(k);
    let mut multipliers = Vec::with_capacity(k);
    let mut strictness = Vec::with_capacity(k);
    let mut dcp = Matrix::zeros(k);
    for (j, &(n, m)) in spec.entries.iter().enumerate() {
        let orbit = map.orbit_jets(j, n + m).map_err(orbit_failure)?;
        let p = orbit[n].value;
        let (pjet, mu) = map.iterate_parameter_jet(p, m);
        if !(mu.norm() > 1.0 + config.delta_rep) {
            return Err(Rejection::NotRepelling {
                critical: j,
                modulus: mu.norm(),
            });
        }
        let before = orbit[n - 1].value;
        let distance = (0..m)
            .map(|i| (map.iterate(p, i) - before).norm())
            .fold(f64::INFINITY, f64::min);
        if !(distance > config.delta_strict) {
            return Err(Rejection::NotStrict { critical: j, distance });
        }
        let earlier = (orbit[n - 1 + m].value - before).norm();
        if earlier <= config.tol_residual {
            return Err(Rejection::NotMinimal {
                critical: j,
                residual: earlier,
            });
        }
        // continued cycle point: Dp = ∂_λ f^m(p) / (1 - μ)
        for i in 0..k {
            let dp = pjet.partials[i] / (1.0 - mu);
            dcp.set(j, i, orbit[n].partials[i] - dp);
        }
        cycle_points.push(p);
        multipliers.push(mu);
        strictness.push(distance);
    }
    let transversality_det = dcp.det();
    let jacobian_det = jac.det();
    let (index, radius) = index_with_shrinking_radius(family, lambda, spec, config.index_radius, &jac)?;
    let transverse = transversality_det.norm() > config.delta_trans;
    if transverse != (index == 1) {
        return Err(Rejection::IndexMismatch {
            det: transversality_det.norm(),
            index,
        });
    }
    if !transverse {
        return Err(Rejection::NotTransverse {
            det: transversality_det.norm(),
            index,
        });
    }
    Ok(MisiurewiczCertificate {
        family: family.name().to_string(),
        lambda: lambda.to_vec(),
        spec: spec.clone(),
        residuals,
        cycle_points,
        multipliers,
        strictness,
        transversality_det,
        jacobian_det,
        index,
        index_radius: radius,
        iterations: 0,
        seed: None,
    })
}

/// Index on the requested contour, or on `min(0.1, 0.05/‖DF‖)` shrunk by
/// quarters while another zero spoils the winding number.
fn index_with_shrinking_radius(
    family: &FamilySpec,
    lambda: &[Complex64],
    spec: &PreperiodicSpec,
    fixed: Option<f64>,
    jac: &Matrix,
) -> std::result::Result<(u32, f64), Rejection> {
    let inconclusive = |e: crate::Error| Rejection::IndexInconclusive { reason: e.to_string() };
    if let Some(r) = fixed {
        return local_intersection_index(family, lambda, spec, r).map(|i| (i, r)).map_err(inconclusive);
    }
    let mut radius = (0.05 / matrix_norm(jac).max(1e-300)).min(0.1);
    let mut last = None;
    for _ in 0..SHRINK_STEPS {
        match local_intersection_index(family, lambda, spec, radius) {
            Ok(i) => return Ok((i, radius)),
            Err(e) => last = Some(e),
        }
        radius /= 4.0;
    }
    Err(inconclusive(last.expect("at least one attempt")))
}

const SHRINK_STEPS: usize = 6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::misiurewicz::enumerate_1d;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn verdict(family: &FamilySpec, lambda: &[Complex64], spec: PreperiodicSpec) -> Verdict {
        certify(family, lambda, &spec, &CertifyConfig::default()).unwrap()
    }

    #[test]
    fn chebyshev_certificate() {
        let q = FamilySpec::quadratic();
        let cert = verdict(&q, &[c(-2.0, 0.0)], PreperiodicSpec::single(2, 1)).unwrap();
        assert!((cert.cycle_points[0] - c(2.0, 0.0)).norm() <= 1e-12);
        assert!((cert.multipliers[0] - c(4.0, 0.0)).norm() <= 1e-12);
        assert!((cert.jacobian_det - c(-8.0, 0.0)).norm() <= 1e-12);
        assert!((cert.transversality_det - c(-8.0 / 3.0, 0.0)).norm() <= 1e-12);
        assert_eq!(cert.index, 1);
        assert_eq!(cert.residuals, vec![0.0]);
    }

    #[test]
    fn jacobian_factorises() {
        let q = FamilySpec::quadratic();
        let e = enumerate_1d(&q, 3, 2, None, 1 << 14, &CertifyConfig::default()).unwrap();
        assert!(!e.certificates.is_empty());
        for cert in &e.certificates {
            let product = (cert.multipliers[0] - 1.0) * cert.transversality_det;
            assert!((product - cert.jacobian_det).norm() <= 1e-8 * cert.jacobian_det.norm());
        }
    }

    #[test]
    fn two_parameter_certificate() {
        let cubic = FamilySpec::cubic_pm();
        let spec = PreperiodicSpec::new(vec![(2, 1), (2, 1)]);
        let lambda = [c(-0.8377606872049098, -0.15177306265340204), c(0.0, 0.0)];
        let out = crate::misiurewicz::newton_solve(&cubic, &spec, &lambda, 1e-13, 50).unwrap();
        let cert = verdict(&cubic, &out.lambda, spec).unwrap();
        assert_eq!(cert.index, 1);
        assert!(cert.transversality_det.norm() > 1e-8);
        let product = (cert.multipliers[0] - 1.0) * (cert.multipliers[1] - 1.0) * cert.transversality_det;
        assert!((product - cert.jacobian_det).norm() <= 1e-8 * cert.jacobian_det.norm());
    }

    #[test]
    fn continued_cycle_matches_finite_differences() {
        // fixed point of z^2 + c near 2 at c = -2: p(c) = (1 + sqrt(1 - 4c)) / 2
        let q = FamilySpec::quadratic();
        let map = q.at(&[c(-2.0, 0.0)]).unwrap();
        let (pjet, mu) = map.iterate_parameter_jet(c(2.0, 0.0), 1);
        let dp = pjet.partials[0] / (1.0 - mu);
        let h = 1e-5;
        let p = |x: f64| (1.0 + (1.0 - 4.0 * x).sqrt()) / 2.0;
        let fd = (p(-2.0 + h) - p(-2.0 - h)) / (2.0 * h);
        assert!((dp.re - fd).abs() <= 1e-5 * fd.abs());
    }

    #[test]
    fn rejections() {
        let q = FamilySpec::quadratic();
        match verdict(&q, &[c(0.0, 0.0)], PreperiodicSpec::single(1, 1)) {
            Err(Rejection::NotRepelling { modulus, .. }) => assert_eq!(modulus, 0.0),
            other => panic!("{other:?}"),
        }
        let off = verdict(&q, &[c(-2.0 + 1e-4, 0.0)], PreperiodicSpec::single(2, 1));
        assert!(matches!(off, Err(Rejection::ResidualAboveTolerance { .. })));
        // -2 also satisfies (3,1), but f^2(0) is already the fixed point
        let deeper = verdict(&q, &[c(-2.0, 0.0)], PreperiodicSpec::single(3, 1));
        assert!(matches!(deeper, Err(Rejection::NotStrict { distance, .. }) if distance == 0.0));
        // the parameter where 0 has period 2 is periodic, not preperiodic
        let periodic = verdict(&q, &[c(-1.0, 0.0)], PreperiodicSpec::single(1, 2));
        assert!(matches!(periodic, Err(Rejection::NotRepelling { .. }) | Err(Rejection::NotStrict { .. })));
    }

    #[test]
    fn rejection_messages_name_the_check() {
        let r = Rejection::NotRepelling { critical: 0, modulus: 0.0 };
        assert!(r.to_string().contains("not repelling"));
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"check\":\"NotRepelling\""));
    }
}
