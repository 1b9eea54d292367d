use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{certify, newton_solve, CertifyConfig, MisiurewiczCertificate, PreperiodicSpec};
use crate::calculus::seeds::halton_in_polydisk;
use crate::error::{precondition, Result};
use crate::family::FamilySpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SearchConfig {
    /// Largest total `Σ (n_j + m_j)` swept.
    pub n_cap: usize,
    /// Newton runs allowed overall.
    pub budget: usize,
    pub max_period: usize,
    pub seeds_per_spec: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub dedup_distance: f64,
    pub certify: CertifyConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            n_cap: 128,
            budget: 10_000,
            max_period: 4,
            seeds_per_spec: 25,
            newton_tol: 1e-12,
            newton_max_iter: 100,
            dedup_distance: 1e-9,
            certify: CertifyConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub certificates: Vec<MisiurewiczCertificate>,
    pub runs: usize,
    pub converged: usize,
    pub rejected: usize,
    /// Rejected candidates per failed check.
    pub rejections: BTreeMap<String, usize>,
    /// Largest total swept.
    pub reached_total: usize,
    pub diagnostic: Option<String>,
}

/// Specs `((n_j, m_j))_j` with `Σ (n_j + m_j) = total`, `n_j ≥ 1` and
/// `1 ≤ m_j ≤ max_period`, in lexicographic order.
pub fn specs_with_total(dim: usize, total: usize, max_period: usize) -> Vec<PreperiodicSpec> {
    fn rec(dim: usize, left: usize, max_period: usize, prefix: &mut Vec<(usize, usize)>, out: &mut Vec<PreperiodicSpec>) {
        if dim == 0 {
            if left == 0 {
                out.push(PreperiodicSpec::new(prefix.clone()));
            }
            return;
        }
        for m in 1..=max_period {
            // every remaining entry needs at least 2
            for n in 1..=left.saturating_sub(m + 2 * (dim - 1)) {
                prefix.push((n, m));
                rec(dim - 1, left - n - m, max_period, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(dim, total, max_period, &mut Vec::new(), &mut out);
    out
}

fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Budgeted Newton search for certified parameters in the polydisk of
/// `radius` around `lambda0`, sweeping specs by increasing total.
///
/// Seeds are consecutive points of one Halton sequence across all specs;
/// the `seed` field of a certificate is its Halton index.
pub fn search_near(family: &FamilySpec, lambda0: &[Complex64], radius: f64, config: &SearchConfig) -> Result<SearchResult> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(precondition("search radius must be positive"));
    }
    if lambda0.len() != family.dim() || lambda0.iter().any(|z| !z.is_finite()) {
        return Err(precondition("centre has the wrong dimension or is not finite"));
    }
    let dim = family.dim();
    let mut certificates: Vec<MisiurewiczCertificate> = Vec::new();
    let (mut runs, mut converged, mut rejected) = (0usize, 0usize, 0usize);
    let mut reached_total = 0;
    let mut rejections = BTreeMap::new();
    let mut halton_index = 0u64;
    'sweep: for total in 2 * dim..=config.n_cap {
        for spec in specs_with_total(dim, total, config.max_period) {
            let count = config.seeds_per_spec.min(config.budget - runs);
            if count == 0 {
                break 'sweep;
            }
            reached_total = total;
            let first = halton_index + 1;
            halton_index += count as u64;
            runs += count;
            let solved: Vec<(u64, Vec<Complex64>, usize)> = (first..first + count as u64)
                .into_par_iter()
                .filter_map(|i| {
                    let seed = halton_in_polydisk(i, lambda0, radius);
                    newton_solve(family, &spec, &seed, config.newton_tol, config.newton_max_iter)
                        .ok()
                        .map(|out| (i, out.lambda, out.iterations))
                })
                .collect();
            for (index, lambda, iterations) in solved {
                converged += 1;
                if distance(&lambda, lambda0) > radius
                    || certificates.iter().any(|c| distance(&c.lambda, &lambda) <= config.dedup_distance)
                {
                    continue;
                }
                match certify(family, &lambda, &spec, &config.certify)? {
                    Ok(mut cert) => {
                        cert.iterations = iterations;
                        cert.seed = Some(index);
                        certificates.push(cert);
                    }
                    Err(reason) => {
                        rejected += 1;
                        *rejections.entry(reason.kind().to_string()).or_insert(0) += 1;
                    }
                }
            }
        }
    }
    let diagnostic = certificates.is_empty().then(|| {
        format!(
            "no certificate within radius {radius} after {runs} Newton runs ({converged} converged, {rejected} rejected), totals swept up to {reached_total}"
        )
    });
    Ok(SearchResult {
        certificates,
        runs,
        converged,
        rejected,
        rejections,
        reached_total,
        diagnostic,
    })
}
