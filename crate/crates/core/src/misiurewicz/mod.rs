//! Parameters where marked critical points fall strictly and transversely
//! onto repelling cycles: Newton solving, certification, complete
//! enumeration in one-parameter families and budgeted local search.

pub mod certify;
pub mod enumerate;
pub mod index;
pub mod newton;
pub mod search;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::calculus::linalg::Matrix;
use crate::error::{precondition, Error, Result};
use crate::family::{FamilySpec, MapInstance};

pub use certify::{certify, CertifyConfig};
pub use enumerate::{enumerate_1d, iterate_degree, Enumeration, ParameterEquation};
pub use index::local_intersection_index;
pub use newton::{newton_solve, NewtonOutcome};
pub use search::{search_near, SearchConfig, SearchResult};

/// Preperiod `n_j` and period `m_j` for every marked critical point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PreperiodicSpec {
    pub entries: Vec<(usize, usize)>,
}

impl PreperiodicSpec {
    pub fn new(entries: Vec<(usize, usize)>) -> Self {
        Self { entries }
    }

    pub fn single(n: usize, m: usize) -> Self {
        Self::new(vec![(n, m)])
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|(n, m)| n + m).sum()
    }

    /// Checks arity against the family and `n_j, m_j ≥ 1`.
    pub fn validate(&self, family: &FamilySpec) -> Result<()> {
        if self.entries.len() != family.dim() {
            return Err(precondition(format!(
                "spec has {} entries but the parameter dimension is {}",
                self.entries.len(),
                family.dim()
            )));
        }
        if self.entries.len() > family.n_critical() {
            return Err(precondition("more equations than marked critical points"));
        }
        if self.entries.iter().any(|&(n, m)| n == 0 || m == 0) {
            return Err(precondition("preperiods and periods must be at least 1"));
        }
        Ok(())
    }
}

/// A certified parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisiurewiczCertificate {
    pub family: String,
    pub lambda: Vec<Complex64>,
    pub spec: PreperiodicSpec,
    /// `|f^{n_j+m_j}(c_j) - f^{n_j}(c_j)|` per equation.
    pub residuals: Vec<f64>,
    /// `p_j = f^{n_j}(c_j)`, the cycle point hit by `c_j`.
    pub cycle_points: Vec<Complex64>,
    pub multipliers: Vec<Complex64>,
    /// Distance of `f^{n_j - 1}(c_j)` to the cycle of `p_j`.
    pub strictness: Vec<f64>,
    /// `det D(C - P)` with `P` the continued cycle points.
    pub transversality_det: Complex64,
    /// `det DF` of the solved system, `Π (μ_j - 1) · det D(C - P)`.
    pub jacobian_det: Complex64,
    pub index: u32,
    pub index_radius: f64,
    pub iterations: usize,
    pub seed: Option<u64>,
}

/// Why a candidate parameter was not certified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check")]
pub enum Rejection {
    ResidualAboveTolerance { residual: f64, tol: f64 },
    NotRepelling { critical: usize, modulus: f64 },
    NotStrict { critical: usize, distance: f64 },
    NotMinimal { critical: usize, residual: f64 },
    NotTransverse { det: f64, index: u32 },
    IndexMismatch { det: f64, index: u32 },
    IndexInconclusive { reason: String },
    Orbit { reason: String },
}

impl Rejection {
    pub fn kind(&self) -> &'static str {
        match self {
            Rejection::ResidualAboveTolerance { .. } => "ResidualAboveTolerance",
            Rejection::NotRepelling { .. } => "NotRepelling",
            Rejection::NotStrict { .. } => "NotStrict",
            Rejection::NotMinimal { .. } => "NotMinimal",
            Rejection::NotTransverse { .. } => "NotTransverse",
            Rejection::IndexMismatch { .. } => "IndexMismatch",
            Rejection::IndexInconclusive { .. } => "IndexInconclusive",
            Rejection::Orbit { .. } => "Orbit",
        }
    }
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rejection::ResidualAboveTolerance { residual, tol } => {
                write!(f, "residual above tolerance: {residual:e} > {tol:e}")
            }
            Rejection::NotRepelling { critical, modulus } => {
                write!(f, "cycle not repelling for critical point {critical}, |mu|={modulus}")
            }
            Rejection::NotStrict { critical, distance } => {
                write!(f, "critical point {critical} already lies on the cycle (distance {distance:e})")
            }
            Rejection::NotMinimal { critical, residual } => {
                write!(f, "preperiod of critical point {critical} is not minimal (residual {residual:e})")
            }
            Rejection::NotTransverse { det, index } => {
                write!(f, "not transverse: |det D(C-P)|={det:e}, index {index}")
            }
            Rejection::IndexMismatch { det, index } => {
                write!(f, "determinant and intersection index disagree: |det|={det:e}, index {index}")
            }
            Rejection::IndexInconclusive { reason } => write!(f, "intersection index inconclusive: {reason}"),
            Rejection::Orbit { reason } => write!(f, "orbit evaluation failed: {reason}"),
        }
    }
}

/// `F_j(λ) = f^{n_j+m_j}(c_j) - f^{n_j}(c_j)` and its Jacobian.
pub fn system(map: &MapInstance, spec: &PreperiodicSpec) -> Result<(Vec<Complex64>, Matrix)> {
    let k = spec.len();
    let mut values = Vec::with_capacity(k);
    let mut jac = Matrix::zeros(k);
    for (j, &(n, m)) in spec.entries.iter().enumerate() {
        let jets = map.orbit_jets(j, n + m)?;
        let (hi, lo) = (&jets[n + m], &jets[n]);
        values.push(hi.value - lo.value);
        for i in 0..k {
            jac.set(j, i, hi.partials[i] - lo.partials[i]);
        }
    }
    Ok((values, jac))
}

pub(crate) fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Row-sum norm of a matrix.
pub(crate) fn matrix_norm(m: &Matrix) -> f64 {
    (0..m.dim())
        .map(|i| (0..m.dim()).map(|j| m.get(i, j).norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub(crate) fn orbit_failure(e: Error) -> Rejection {
    Rejection::Orbit { reason: e.to_string() }
}

/// One JSON object per line.
pub fn write_certificates<W: std::io::Write>(out: W, certificates: &[MisiurewiczCertificate]) -> Result<()> {
    crate::io::write_jsonl(out, certificates)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certificates_serialise_as_json_lines() {
        let q = FamilySpec::quadratic();
        let cert = certify(&q, &[Complex64::new(-2.0, 0.0)], &PreperiodicSpec::single(2, 1), &CertifyConfig::default())
            .unwrap()
            .unwrap();
        let mut buf = Vec::new();
        write_certificates(&mut buf, &[cert.clone(), cert.clone()]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        let value: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(value["lambda"][0], serde_json::json!([-2.0, 0.0]));
        assert_eq!(value["index"], 1);
        let back: MisiurewiczCertificate = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(back, cert);
    }
}
