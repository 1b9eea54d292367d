use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{certify, local_intersection_index, CertifyConfig, MisiurewiczCertificate, PreperiodicSpec, Rejection};
use crate::calculus::roots::{horner_noise, ratio};
use crate::calculus::{all_roots, DensePolynomial, NewtonCorrection, NewtonRatio, Region, RootConfig};
use crate::error::{precondition, Error, Result};
use crate::family::param_poly::ParamPolynomial;
use crate::family::{FamilySpec, MapInstance};

/// Largest degree of `F` enumerated by default.
pub const DEFAULT_DEGREE_CAP: usize = 1 << 14;

/// Iterates larger than this are followed through their log-derivative.
const HUGE: f64 = 1e150;

type Leading = Option<(usize, Complex64)>;

fn univariate(p: &ParamPolynomial) -> Leading {
    p.univariate_leading().map(|(d, c)| (d as usize, c))
}

/// Degrees and leading coefficients of `f^k(c_j)` for `k = 0..=total`.
fn leading_history(family: &FamilySpec, j: usize, total: usize, cap: usize) -> Result<Vec<Leading>> {
    if family.dim() != 1 {
        return Err(precondition("degree bookkeeping needs a one-parameter family"));
    }
    if j >= family.n_critical() {
        return Err(precondition(format!("critical index {j} out of range")));
    }
    let coeffs: Vec<Leading> = family.coeffs().iter().map(univariate).collect();
    let mut z = univariate(&family.critical()[j]);
    let mut history = vec![z];
    for k in 1..=total {
        let mut best: Leading = None;
        for (i, a) in coeffs.iter().enumerate() {
            let Some((da, la)) = *a else { continue };
            let term = match z {
                None if i > 0 => continue,
                None => (da, la),
                Some((dz, lz)) => {
                    let deg = dz
                        .checked_mul(i)
                        .and_then(|x| x.checked_add(da))
                        .filter(|&x| x <= cap)
                        .ok_or(Error::Capacity { degree: usize::MAX, cap })?;
                    (deg, la * lz.powu(i as u32))
                }
            };
            best = match best {
                Some((db, lb)) if db > term.0 => Some((db, lb)),
                Some((db, lb)) if db == term.0 => Some((db, lb + term.1)),
                _ => Some(term),
            };
        }
        if let Some((_, lead)) = best {
            if lead == Complex64::new(0.0, 0.0) || !lead.is_finite() {
                return Err(Error::DegreeAmbiguous { iterate: k });
            }
        }
        z = best;
        history.push(z);
    }
    Ok(history)
}

/// Exact degree in `λ` of `F = f^{n+m}(c_j) - f^n(c_j)` for a one-parameter
/// family, from degrees and leading coefficients of the iterates.
pub fn iterate_degree(family: &FamilySpec, j: usize, n: usize, m: usize, cap: usize) -> Result<usize> {
    let history = leading_history(family, j, n + m, cap)?;
    match (history[n + m], history[n]) {
        (Some((a, la)), Some((b, lb))) if a == b => {
            if la == lb {
                Err(Error::DegreeAmbiguous { iterate: n + m })
            } else {
                Ok(a)
            }
        }
        (Some((a, _)), Some((b, _))) => Ok(a.max(b)),
        (Some((a, _)), None) | (None, Some((a, _))) => Ok(a),
        (None, None) => Err(Error::DegreeAmbiguous { iterate: n + m }),
    }
}

/// Exact degree in `λ` of `f^n(c_j)`; zero for a constant orbit point.
pub fn orbit_degree(family: &FamilySpec, j: usize, n: usize, cap: usize) -> Result<usize> {
    Ok(leading_history(family, j, n, cap)?[n].map_or(0, |(d, _)| d))
}

fn to_dense(p: &ParamPolynomial) -> DensePolynomial {
    let degree = p.univariate_leading().map(|(d, _)| d as usize).unwrap_or(0);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
    for t in p.terms() {
        coeffs[t.powers[0] as usize] += t.coeff;
    }
    DensePolynomial::new(coeffs)
}

/// `f^k(c_j)` for `k = 0..=total` as explicit polynomials in `λ`.
pub fn orbit_polynomials(family: &FamilySpec, j: usize, total: usize, cap: usize) -> Result<Vec<DensePolynomial>> {
    leading_history(family, j, total, cap)?;
    let coeffs: Vec<DensePolynomial> = family.coeffs().iter().map(to_dense).collect();
    let mut z = to_dense(&family.critical()[j]);
    let mut out = vec![z.clone()];
    for _ in 1..=total {
        let mut acc = coeffs[coeffs.len() - 1].clone();
        for a in coeffs[..coeffs.len() - 1].iter().rev() {
            acc = &(&acc * &z) + a;
        }
        z = acc;
        out.push(z.clone());
    }
    Ok(out)
}

/// `F` as explicit coefficients, by iterated composition in the polynomial ring.
pub fn explicit_polynomial(family: &FamilySpec, j: usize, n: usize, m: usize, cap: usize) -> Result<DensePolynomial> {
    let degree = iterate_degree(family, j, n, m, cap)?;
    let orbit = orbit_polynomials(family, j, n + m, cap)?;
    let f = &orbit[n + m] - &orbit[n];
    debug_assert_eq!(f.degree(), Some(degree));
    Ok(f)
}

/// `F(λ)` evaluated through the orbit recurrence, with a running bound on
/// its rounding error.
pub struct ParameterEquation<'a> {
    pub family: &'a FamilySpec,
    pub critical: usize,
    pub n: usize,
    pub m: usize,
    pub degree: usize,
}

fn divergent() -> NewtonCorrection {
    NewtonCorrection {
        ratio: Complex64::new(f64::NAN, f64::NAN),
        residual: f64::INFINITY,
        noise: 0.0,
        slope: 0.0,
    }
}

/// What `f^total(c_j)` is compared with.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Baseline {
    Iterate(usize),
    Constant(Complex64),
}

/// Newton correction of `f^total(c_j(λ)) - baseline(λ)` through the orbit
/// recurrence, with a running rounding-error bound.
pub(crate) fn orbit_correction(
    family: &FamilySpec,
    critical: usize,
    total: usize,
    baseline: Baseline,
    lambda: Complex64,
) -> NewtonCorrection {
    let Ok(map) = family.at(&[lambda]) else {
        return divergent();
    };
    let d = map.degree() as f64;
    let mut z = map.critical_jet(critical);
    let (mut w, mut dw) = (z.value, z.partials[0]);
    let mut err = 0.0;
    let (mut wn, mut dwn, mut errn) = match baseline {
        Baseline::Constant(a) => (a, Complex64::new(0.0, 0.0), 0.0),
        Baseline::Iterate(_) => (w, dw, err),
    };
    for k in 0..total {
        if let Baseline::Iterate(n) = baseline {
            if k == n {
                (wn, dwn, errn) = (w, dw, err);
            }
        }
        if w.norm() > HUGE {
            // f ~ a_d w^d with a_d constant: the log-derivative in λ
            // picks up a factor d per step and dominates the baseline.
            let mut log_deriv = ratio(dw, w);
            for _ in k..total {
                log_deriv *= d;
            }
            return NewtonCorrection {
                ratio: log_deriv.inv(),
                residual: f64::INFINITY,
                noise: 0.0,
                slope: f64::INFINITY,
            };
        }
        let (_, df) = map.eval_dz(w);
        err = df.norm() * err + horner_noise(map.coeffs().len(), magnitude(&map, w.norm()));
        z = map.eval_jet(&z);
        (w, dw) = (z.value, z.partials[0]);
    }
    if matches!(baseline, Baseline::Iterate(n) if n == total) {
        (wn, dwn, errn) = (w, dw, err);
    }
    let value = w - wn;
    let slope = dw - dwn;
    NewtonCorrection {
        ratio: ratio(value, slope),
        residual: value.norm(),
        noise: err + errn,
        slope: slope.norm(),
    }
}

impl NewtonRatio for ParameterEquation<'_> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn correction(&self, lambda: Complex64) -> NewtonCorrection {
        orbit_correction(self.family, self.critical, self.n + self.m, Baseline::Iterate(self.n), lambda)
    }
}

fn magnitude(map: &MapInstance, r: f64) -> f64 {
    map.coeffs().iter().rev().fold(0.0, |acc, c| acc * r + c.norm())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub value: Complex64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectedRoot {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Intersection index when it could be computed.
    pub index: Option<u32>,
    pub reason: Rejection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Enumeration {
    pub spec: PreperiodicSpec,
    pub degree: usize,
    /// Every root of `F` with multiplicity, inside or outside the region.
    pub roots: Vec<RootRecord>,
    pub certificates: Vec<MisiurewiczCertificate>,
    pub rejected: Vec<RejectedRoot>,
}

/// All parameters of a one-parameter family where `c_0` satisfies `(n, m)`;
/// roots inside `region` are certified or entered in the rejection ledger.
pub fn enumerate_1d(
    family: &FamilySpec,
    n: usize,
    m: usize,
    region: Option<&Region>,
    cap: usize,
    config: &CertifyConfig,
) -> Result<Enumeration> {
    let spec = PreperiodicSpec::single(n, m);
    spec.validate(family)?;
    let degree = iterate_degree(family, 0, n, m, cap)?;
    let (center, radius) = family
        .parameter_disk()
        .ok_or_else(|| precondition("enumeration needs a parameter disk for the family"))?;
    let equation = ParameterEquation {
        family,
        critical: 0,
        n,
        m,
        degree,
    };
    let roots = all_roots(
        &equation,
        &RootConfig {
            start: Some((center, 1.05 * radius)),
            ..RootConfig::default()
        },
    );
    if !roots.converged || roots.count_with_multiplicity() != degree {
        return Err(Error::Divergence {
            iterations: roots.iterations,
            residual: roots.roots.iter().map(|r| r.radius).fold(0.0, f64::max),
        });
    }
    let values: Vec<Complex64> = roots.roots.iter().map(|r| r.value).collect();
    let mut certificates = Vec::new();
    let mut rejected = Vec::new();
    for (i, root) in roots.roots.iter().enumerate() {
        if region.is_some_and(|r| !r.contains(root.value)) {
            continue;
        }
        let gap = values
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, v)| (v - root.value).norm())
            .fold(f64::INFINITY, f64::min);
        let index_radius = (0.4 * gap).min(0.1);
        let local = CertifyConfig {
            index_radius: Some(index_radius),
            ..config.clone()
        };
        match certify(family, &[root.value], &spec, &local)? {
            Ok(cert) => certificates.push(cert),
            Err(reason) => rejected.push(RejectedRoot {
                value: root.value,
                multiplicity: root.multiplicity,
                index: local_intersection_index(family, &[root.value], &spec, index_radius).ok(),
                reason,
            }),
        }
    }
    Ok(Enumeration {
        spec,
        degree,
        roots: roots
            .roots
            .iter()
            .map(|r| RootRecord {
                value: r.value,
                multiplicity: r.multiplicity,
            })
            .collect(),
        certificates,
        rejected,
    })
}
