//! Solution clouds of `f^n(c_j(λ)) = z_j`, weighted by `d^{-nk}`, and
//! their dyadic discrepancy against computed bifurcation measures.

use std::collections::HashMap;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::boxes::ProductBox;
use crate::calculus::linalg::Matrix;
use crate::calculus::rng::{substream, uniform_in_disk};
use crate::calculus::roots::all_roots_dense;
use crate::calculus::{all_roots, NewtonCorrection, NewtonRatio, Rect, RootConfig};
use crate::error::{precondition, Error, Result};
use crate::family::FamilySpec;
use crate::hyperset::PointMeasure;
use crate::io::{fmt_g17, CsvWriter};
use crate::misiurewicz::enumerate::{orbit_correction, orbit_degree, orbit_polynomials, Baseline};
use crate::potential::DensityField;

/// Distance below which a target is flagged as possibly exceptional.
pub const EXCEPTIONAL_DISTANCE: f64 = 1e-6;
/// Iterates `f^k(c)`, `k ≤` this, whose critical values are screened.
pub const EXCEPTIONAL_DEPTH: usize = 3;
/// Largest `n` solved in two-parameter families.
pub const MAX_N_2D: usize = 6;
/// Largest unresolved cell fraction of a two-parameter solve of full quality.
pub const MAX_UNRESOLVED: f64 = 0.2;
/// Largest residual `‖C_n(λ) - a‖` of a returned solution.
pub const MAX_RESIDUAL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    User,
    Pseudorandom { seed: u64 },
}

/// Target values `(z_1, ..., z_k)`, one per marked critical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetTuple {
    pub values: Vec<Complex64>,
    pub provenance: Provenance,
}

impl TargetTuple {
    pub fn user(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() || values.iter().any(|z| !z.is_finite()) {
            return Err(precondition("targets must be finite and non-empty"));
        }
        Ok(Self {
            values,
            provenance: Provenance::User,
        })
    }

    /// `k` targets uniform in the disk of `radius` around 0, entry `j` from
    /// sub-stream `j` of `seed`.
    pub fn pseudorandom(k: usize, seed: u64, radius: f64) -> Self {
        let values = (0..k)
            .map(|j| uniform_in_disk(&mut substream(seed, j as u64), Complex64::new(0.0, 0.0), radius))
            .collect();
        Self {
            values,
            provenance: Provenance::Pseudorandom { seed },
        }
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// Warnings for targets within [`EXCEPTIONAL_DISTANCE`] of a critical
    /// value of `λ ↦ f^k(c(λ))`, `k ≤ EXCEPTIONAL_DEPTH`. Only one-parameter
    /// families are screened.
    pub fn exceptional_flags(&self, family: &FamilySpec) -> Result<Vec<String>> {
        if family.dim() != 1 {
            return Ok(Vec::new());
        }
        let z = self.values[0];
        let orbit = orbit_polynomials(family, 0, EXCEPTIONAL_DEPTH, usize::MAX)?;
        let mut flags = Vec::new();
        for (k, p) in orbit.iter().enumerate().skip(1) {
            let dp = p.derivative();
            if dp.degree().unwrap_or(0) == 0 {
                continue;
            }
            for root in all_roots_dense(&dp, &RootConfig::default()).roots {
                let v = p.eval(root.value);
                if (v - z).norm() < EXCEPTIONAL_DISTANCE {
                    flags.push(format!(
                        "target {} is within {EXCEPTIONAL_DISTANCE:e} of the critical value {} of iterate {k}",
                        fmt_complex(z),
                        fmt_complex(v)
                    ));
                }
            }
        }
        Ok(flags)
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", fmt_g17(z.re), z.im)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    /// Largest polynomial degree solved in one-parameter families.
    pub cap: usize,
    /// Search box of two-parameter solves.
    pub search_box: Option<ProductBox>,
    /// Subdivision cells per real axis of the search box.
    pub cells_per_axis: usize,
    pub newton_max_iter: usize,
    /// Solutions closer than this are merged.
    pub cluster_radius: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            cap: 4096,
            search_box: None,
            cells_per_axis: 6,
            newton_max_iter: 60,
            cluster_radius: 1e-7,
        }
    }
}

/// The measure `d^{-nk} Σ δ_λ` over solutions of `C_n(λ) = a`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolutionCloud {
    pub n: usize,
    pub target: TargetTuple,
    pub measure: PointMeasure,
    pub multiplicities: Vec<usize>,
    /// Solutions counted with multiplicity.
    pub count: usize,
    /// Number of solutions expected: the polynomial degree for one
    /// parameter, `d^{nk}` otherwise.
    pub expected: usize,
    pub max_residual: f64,
    /// Fraction of subdivision cells whose Newton run found a solution in
    /// the box (two-parameter solves only).
    pub resolved_fraction: Option<f64>,
    pub degraded: bool,
    pub flags: Vec<String>,
}

impl SolutionCloud {
    /// CSV `re, im, weight` (one pair of columns per parameter).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = CsvWriter::new(out);
        w.comment(&format!("solutions of f^{}(c(lambda)) = target", self.n))?;
        let targets: Vec<String> = self.target.values.iter().map(|z| fmt_complex(*z)).collect();
        w.comment(&format!("target: {}", targets.join(" ")))?;
        if let Provenance::Pseudorandom { seed } = self.target.provenance {
            w.comment(&format!("seed: {seed}"))?;
        }
        w.comment(&format!("count: {} expected: {}", self.count, self.expected))?;
        if let Some(f) = self.resolved_fraction {
            w.comment(&format!("resolved cells: {}", fmt_g17(f)))?;
        }
        for flag in &self.flags {
            w.comment(&format!("flag: {flag}"))?;
        }
        let k = self.target.k();
        let mut header = Vec::new();
        for j in 0..k {
            if k == 1 {
                header.extend(["re".to_string(), "im".to_string()]);
            } else {
                header.extend([format!("re{j}"), format!("im{j}")]);
            }
        }
        header.push("weight".into());
        w.header(&header.iter().map(String::as_str).collect::<Vec<_>>())?;
        for (p, weight) in self.measure.points.iter().zip(&self.measure.weights) {
            let mut row: Vec<f64> = p.iter().flat_map(|z| [z.re, z.im]).collect();
            row.push(*weight);
            w.numbers(&row)?;
        }
        w.into_inner()?;
        Ok(())
    }
}

struct TargetEquation<'a> {
    family: &'a FamilySpec,
    n: usize,
    target: Complex64,
    degree: usize,
}

impl NewtonRatio for TargetEquation<'_> {
    fn degree(&self) -> usize {
        self.degree
    }

    fn correction(&self, lambda: Complex64) -> NewtonCorrection {
        orbit_correction(self.family, 0, self.n, Baseline::Constant(self.target), lambda)
    }
}

/// `C_n(λ) - a` and its Jacobian.
fn target_system(family: &FamilySpec, lambda: &[Complex64], n: usize, a: &[Complex64]) -> Result<(Vec<Complex64>, Matrix)> {
    let map = family.at(lambda)?;
    let k = a.len();
    let mut values = Vec::with_capacity(k);
    let mut jac = Matrix::zeros(k);
    for (j, z) in a.iter().enumerate() {
        let jet = map.orbit_jet(j, n)?;
        values.push(jet.value - z);
        for i in 0..k {
            jac.set(j, i, jet.partials[i]);
        }
    }
    Ok((values, jac))
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// All solutions of `f^n(c_j(λ)) = z_j`, `j = 1..k`, each of weight `d^{-nk}`.
///
/// One parameter: every root of the degree-`D` polynomial `C_n(λ) - z_1`,
/// found simultaneously, with multiplicities from root clusters. Two
/// parameters: Newton from the centres of a subdivision of the search box,
/// deduplicated; the result is flagged degraded when more than
/// [`MAX_UNRESOLVED`] of the cells found nothing.
pub fn solve_targets(family: &FamilySpec, a: &TargetTuple, n: usize, config: &SolveConfig) -> Result<SolutionCloud> {
    let k = family.dim();
    if a.k() != k {
        return Err(precondition(format!("{} targets for a {k}-parameter family", a.k())));
    }
    if k > family.n_critical() {
        return Err(precondition("more targets than marked critical points"));
    }
    if n == 0 {
        return Err(precondition("n must be at least 1"));
    }
    let flags = a.exceptional_flags(family)?;
    match k {
        1 => solve_1d(family, a, n, config, flags),
        2 => solve_2d(family, a, n, config, flags),
        _ => Err(precondition(format!("solving is not implemented for dimension {k}"))),
    }
}

fn solve_1d(family: &FamilySpec, a: &TargetTuple, n: usize, config: &SolveConfig, flags: Vec<String>) -> Result<SolutionCloud> {
    let degree = orbit_degree(family, 0, n, config.cap)?;
    if degree == 0 {
        return Err(precondition("the marked critical orbit does not depend on the parameter"));
    }
    if degree > config.cap {
        return Err(Error::Capacity { degree, cap: config.cap });
    }
    let (center, radius) = family
        .parameter_disk()
        .ok_or_else(|| precondition("solving needs a parameter disk for the family"))?;
    let equation = TargetEquation {
        family,
        n,
        target: a.values[0],
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
    let merged = merge_clusters(
        roots.roots.iter().map(|r| (vec![r.value], r.multiplicity)).collect(),
        config.cluster_radius,
    );
    let weight = (family.degree() as f64).powi(-(n as i32));
    let mut max_residual: f64 = 0.0;
    for (p, mult) in &merged {
        if *mult == 1 {
            let c = equation.correction(p[0]);
            max_residual = max_residual.max(c.residual);
        }
    }
    let multiplicities: Vec<usize> = merged.iter().map(|(_, m)| *m).collect();
    let weights = multiplicities.iter().map(|&m| m as f64 * weight).collect();
    let points = merged.into_iter().map(|(p, _)| p).collect();
    Ok(SolutionCloud {
        n,
        target: a.clone(),
        measure: PointMeasure::new(points, weights)?,
        count: multiplicities.iter().sum(),
        multiplicities,
        expected: degree,
        max_residual,
        resolved_fraction: None,
        degraded: false,
        flags,
    })
}

/// Merges points closer than `radius`, adding multiplicities; the
/// representative is the first point of its cluster in input order.
fn merge_clusters(points: Vec<(Vec<Complex64>, usize)>, radius: f64) -> Vec<(Vec<Complex64>, usize)> {
    let mut out: Vec<(Vec<Complex64>, usize)> = Vec::new();
    for (p, m) in points {
        let near = out
            .iter_mut()
            .find(|(q, _)| q.iter().zip(&p).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) <= radius);
        match near {
            Some((_, count)) => *count += m,
            None => out.push((p, m)),
        }
    }
    out
}

fn solve_2d(family: &FamilySpec, a: &TargetTuple, n: usize, config: &SolveConfig, flags: Vec<String>) -> Result<SolutionCloud> {
    if n > MAX_N_2D {
        return Err(precondition(format!("two-parameter solves support n ≤ {MAX_N_2D}")));
    }
    let search = config
        .search_box
        .as_ref()
        .ok_or_else(|| precondition("two-parameter solves need a search box"))?;
    if search.factors.len() != 2 {
        return Err(precondition("search box must have one rectangle per parameter"));
    }
    let g = config.cells_per_axis;
    if g == 0 {
        return Err(precondition("need at least one cell per axis"));
    }
    let cells = g.pow(4);
    let centre = |flat: usize| -> Vec<Complex64> {
        let mut t = [0.0; 4];
        let mut rest = flat;
        for x in t.iter_mut() {
            *x = ((rest % g) as f64 + 0.5) / g as f64;
            rest /= g;
        }
        search
            .factors
            .iter()
            .enumerate()
            .map(|(i, r)| Complex64::new(r.re0 + t[2 * i] * (r.re1 - r.re0), r.im0 + t[2 * i + 1] * (r.im1 - r.im0)))
            .collect()
    };
    let found: Vec<Option<(Vec<Complex64>, f64)>> = (0..cells)
        .into_par_iter()
        .map(|flat| newton_2d(family, &centre(flat), n, &a.values, config.newton_max_iter))
        .map(|r| r.filter(|(p, _)| search.contains(p)))
        .collect();
    let resolved = found.iter().filter(|f| f.is_some()).count();
    let mut max_residual: f64 = 0.0;
    let mut candidates = Vec::new();
    for (p, residual) in found.into_iter().flatten() {
        max_residual = max_residual.max(residual);
        candidates.push((p, 1));
    }
    let merged = merge_clusters(candidates, config.cluster_radius);
    let fraction = resolved as f64 / cells as f64;
    let d = family.degree();
    let expected = d.checked_pow(2 * n as u32).ok_or(Error::Capacity {
        degree: usize::MAX,
        cap: usize::MAX,
    })?;
    let weight = 1.0 / expected as f64;
    let points: Vec<Vec<Complex64>> = merged.into_iter().map(|(p, _)| p).collect();
    let count = points.len();
    Ok(SolutionCloud {
        n,
        target: a.clone(),
        measure: PointMeasure::new(points, vec![weight; count])?,
        multiplicities: vec![1; count],
        count,
        expected,
        max_residual,
        resolved_fraction: Some(fraction),
        degraded: 1.0 - fraction > MAX_UNRESOLVED,
        flags,
    })
}

fn newton_2d(
    family: &FamilySpec,
    seed: &[Complex64],
    n: usize,
    a: &[Complex64],
    max_iter: usize,
) -> Option<(Vec<Complex64>, f64)> {
    let mut l = seed.to_vec();
    for _ in 0..max_iter {
        let (v, j) = target_system(family, &l, n, a).ok()?;
        let step = j.lu().solve(&v.iter().map(|x| -x).collect::<Vec<_>>())?;
        for (x, s) in l.iter_mut().zip(&step) {
            *x += s;
        }
        let scale = 1.0 + max_norm(&l);
        if !(max_norm(&step) <= 1e3 * scale) {
            return None;
        }
        if max_norm(&step) <= 1e-13 * scale {
            let residual = max_norm(&target_system(family, &l, n, a).ok()?.0);
            return (residual <= MAX_RESIDUAL).then_some((l, residual));
        }
    }
    None
}

/// A measure to compare against: weighted points or grid cell masses
/// (clamped) placed at the cell centres.
#[derive(Debug, Clone, Copy)]
pub enum Reference<'a> {
    Points(&'a PointMeasure),
    Density(&'a DensityField),
}

impl Reference<'_> {
    fn for_each(&self, mut f: impl FnMut(&[Complex64], f64)) {
        match self {
            Reference::Points(m) => {
                for (p, w) in m.points.iter().zip(&m.weights) {
                    f(p, *w);
                }
            }
            Reference::Density(d) => {
                for i in 0..d.raw.len() {
                    let m = d.mass(i);
                    if m > 0.0 {
                        f(&d.centre(i), m);
                    }
                }
            }
        }
    }
}

/// Box covered by a density grid; every parameter must vary on the grid.
pub fn grid_box(density: &DensityField) -> Result<ProductBox> {
    let grid = &density.grid;
    if grid.axes.len() != grid.base.len() || grid.axes.iter().enumerate().any(|(i, &a)| i != a) {
        return Err(precondition("the reference grid must vary every parameter in order"));
    }
    Ok(ProductBox::new(grid.bounds.clone()))
}

fn binned(measure: &Reference<'_>, bbox: &ProductBox, levels: u32) -> (f64, Vec<HashMap<usize, f64>>) {
    let mut total = 0.0;
    let mut bins = vec![HashMap::new(); levels as usize + 1];
    measure.for_each(|p, w| {
        if !bbox.contains(p) {
            return;
        }
        total += w;
        for (level, map) in bins.iter_mut().enumerate() {
            let i = bbox.dyadic_index(p, level as u32).expect("point is inside the box");
            *map.entry(i).or_insert(0.0) += w;
        }
    });
    (total, bins)
}

/// `max |μ(B) - ν(B)|` over dyadic sub-boxes `B` of `bbox` at each level
/// `0..=levels`, after restricting both measures to `bbox` and scaling the
/// heavier one to the lighter total. Entry `ℓ` is the maximum over levels
/// `0..=ℓ`. If one restriction is empty every entry is the other's mass.
pub fn discrepancy_levels(mu: Reference<'_>, nu: Reference<'_>, bbox: &ProductBox, levels: u32) -> Result<Vec<f64>> {
    let dim = bbox.factors.len();
    if bbox.factors.iter().any(Rect::is_degenerate) {
        return Err(precondition("discrepancy box is degenerate"));
    }
    let dims_ok = |r: &Reference<'_>| match r {
        Reference::Points(m) => m.points.iter().all(|p| p.len() == dim),
        Reference::Density(d) => d.grid.axes.len() == dim,
    };
    if !dims_ok(&mu) || !dims_ok(&nu) {
        return Err(precondition("measures and box have different dimensions"));
    }
    let (tm, bm) = binned(&mu, bbox, levels);
    let (tn, bn) = binned(&nu, bbox, levels);
    if !(tm > 0.0 && tn > 0.0) {
        return Ok(vec![(tm - tn).abs(); levels as usize + 1]);
    }
    let target = tm.min(tn);
    let (sm, sn) = (target / tm, target / tn);
    let mut out = Vec::with_capacity(levels as usize + 1);
    let mut running: f64 = 0.0;
    for (a, b) in bm.iter().zip(&bn) {
        for (i, x) in a {
            running = running.max((sm * x - sn * b.get(i).copied().unwrap_or(0.0)).abs());
        }
        for (i, y) in b {
            if !a.contains_key(i) {
                running = running.max(sn * y);
            }
        }
        out.push(running);
    }
    Ok(out)
}

/// Discrepancy up to level `levels`, see [`discrepancy_levels`].
pub fn discrepancy(mu: Reference<'_>, nu: Reference<'_>, bbox: &ProductBox, levels: u32) -> Result<f64> {
    Ok(*discrepancy_levels(mu, nu, bbox, levels)?.last().expect("at least level 0"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub n: usize,
    pub target: usize,
    pub count: usize,
    pub mass: f64,
    /// Discrepancy against the reference up to each level `0..=L`.
    pub discrepancy: Vec<f64>,
    pub max_residual: f64,
    pub degraded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MutualRow {
    pub n: usize,
    pub targets: (usize, usize),
    pub discrepancy: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub family: String,
    pub levels: u32,
    pub reference_mass: f64,
    pub targets: Vec<TargetTuple>,
    pub rows: Vec<ReportRow>,
    pub mutual: Vec<MutualRow>,
    /// Per target, the fraction of consecutive `n` where the top-level
    /// discrepancy against the reference decreased.
    pub trend: Vec<f64>,
    #[serde(skip)]
    pub clouds: Vec<SolutionCloud>,
}

impl ConvergenceReport {
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        serde_json::to_writer_pretty(out, self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn row(&self, n: usize, target: usize) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.n == n && r.target == target)
    }

    pub fn mutual_at(&self, n: usize, i: usize, j: usize) -> Option<&MutualRow> {
        self.mutual.iter().find(|r| r.n == n && r.targets == (i, j))
    }
}

/// Solution clouds for every target and `n`, their discrepancies against
/// `reference` on the reference grid box and against each other.
pub fn convergence_report(
    family: &FamilySpec,
    targets: &[TargetTuple],
    ns: &[usize],
    reference: &DensityField,
    levels: u32,
    config: &SolveConfig,
) -> Result<ConvergenceReport> {
    if targets.len() < 2 {
        return Err(precondition("a convergence report needs at least two targets"));
    }
    let bbox = grid_box(reference)?;
    let jobs: Vec<(usize, usize)> = ns.iter().flat_map(|&n| (0..targets.len()).map(move |t| (n, t))).collect();
    let clouds: Vec<SolutionCloud> = jobs
        .par_iter()
        .map(|&(n, t)| solve_targets(family, &targets[t], n, config))
        .collect::<Result<_>>()?;
    let by_job = |n: usize, t: usize| &clouds[jobs.iter().position(|&j| j == (n, t)).expect("job exists")];
    let rows: Vec<ReportRow> = jobs
        .par_iter()
        .zip(&clouds)
        .map(|(&(n, t), c)| {
            Ok(ReportRow {
                n,
                target: t,
                count: c.count,
                mass: c.measure.total,
                discrepancy: discrepancy_levels(Reference::Points(&c.measure), Reference::Density(reference), &bbox, levels)?,
                max_residual: c.max_residual,
                degraded: c.degraded,
            })
        })
        .collect::<Result<_>>()?;
    let mut mutual = Vec::new();
    for &n in ns {
        for i in 0..targets.len() {
            for j in i + 1..targets.len() {
                let (a, b) = (by_job(n, i), by_job(n, j));
                mutual.push(MutualRow {
                    n,
                    targets: (i, j),
                    discrepancy: discrepancy_levels(Reference::Points(&a.measure), Reference::Points(&b.measure), &bbox, levels)?,
                });
            }
        }
    }
    let trend = (0..targets.len())
        .map(|t| {
            let series: Vec<f64> = ns
                .iter()
                .map(|&n| *rows.iter().find(|r| r.n == n && r.target == t).unwrap().discrepancy.last().unwrap())
                .collect();
            decrease_fraction(&series)
        })
        .collect();
    let reference_mass = {
        let mut total = 0.0;
        Reference::Density(reference).for_each(|p, w| {
            if bbox.contains(p) {
                total += w;
            }
        });
        total
    };
    Ok(ConvergenceReport {
        family: family.name().to_string(),
        levels,
        reference_mass,
        targets: targets.to_vec(),
        rows,
        mutual,
        trend,
        clouds,
    })
}

/// Fraction of consecutive pairs with `x[i+1] < x[i]`.
pub fn decrease_fraction(series: &[f64]) -> f64 {
    if series.len() < 2 {
        return 0.0;
    }
    let down = series.windows(2).filter(|w| w[1] < w[0]).count();
    down as f64 / (series.len() - 1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{activity_potential_grid, ddc_mass, GridSpec};
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sorted(cloud: &SolutionCloud) -> Vec<(Complex64, f64)> {
        let mut v: Vec<(Complex64, f64)> = cloud
            .measure
            .points
            .iter()
            .zip(&cloud.measure.weights)
            .map(|(p, w)| (p[0], *w))
            .collect();
        v.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        v
    }

    #[test]
    fn quadratic_examples() {
        let q = FamilySpec::quadratic();
        let zero = TargetTuple::user(vec![c(0.0, 0.0)]).unwrap();
        let two = solve_targets(&q, &zero, 2, &SolveConfig::default()).unwrap();
        let pts = sorted(&two);
        assert_eq!(pts.len(), 2);
        assert!((pts[0].0 - c(-1.0, 0.0)).norm() <= 1e-12);
        assert!(pts[1].0.norm() <= 1e-12);
        assert!(pts.iter().all(|(_, w)| *w == 0.25));
        assert_eq!(two.measure.total, 0.5);
        let one = solve_targets(&q, &zero, 1, &SolveConfig::default()).unwrap();
        assert_eq!(one.count, 1);
        assert!(one.measure.points[0][0].norm() <= 1e-14);
        assert_eq!(one.measure.total, 0.5);
    }

    #[test]
    fn critical_value_targets_are_flagged() {
        let q = FamilySpec::quadratic();
        // c^2 + c has the critical value -1/4 at c = -1/2
        let t = TargetTuple::user(vec![c(-0.25, 0.0)]).unwrap();
        assert_eq!(t.exceptional_flags(&q).unwrap().len(), 1);
        let cloud = solve_targets(&q, &t, 2, &SolveConfig::default()).unwrap();
        assert_eq!(cloud.multiplicities, vec![2]);
        assert!(!cloud.flags.is_empty());
        let generic = TargetTuple::pseudorandom(1, 3, 1.0);
        assert!(generic.exceptional_flags(&q).unwrap().is_empty());
    }

    #[test]
    fn pseudorandom_targets_are_reproducible() {
        let a = TargetTuple::pseudorandom(2, 11, 1.0);
        assert_eq!(a, TargetTuple::pseudorandom(2, 11, 1.0));
        assert_ne!(a.values[0], a.values[1]);
        assert!(a.values.iter().all(|z| z.norm() <= 1.0));
        assert_eq!(a.provenance, Provenance::Pseudorandom { seed: 11 });
        assert!(TargetTuple::user(vec![c(f64::NAN, 0.0)]).is_err());
    }

    #[test]
    fn degree_cap_is_enforced() {
        let q = FamilySpec::quadratic();
        let t = TargetTuple::pseudorandom(1, 1, 1.0);
        assert!(matches!(solve_targets(&q, &t, 14, &SolveConfig::default()), Err(Error::Capacity { .. })));
        assert!(solve_targets(&q, &TargetTuple::pseudorandom(2, 1, 1.0), 3, &SolveConfig::default()).is_err());
    }

    #[test]
    fn real_targets_give_conjugation_symmetric_clouds() {
        let q = FamilySpec::quadratic();
        let cloud = solve_targets(&q, &TargetTuple::user(vec![c(0.3, 0.0)]).unwrap(), 7, &SolveConfig::default()).unwrap();
        assert_eq!(cloud.count, 64);
        for p in &cloud.measure.points {
            let conj = p[0].conj();
            let d = cloud.measure.points.iter().map(|q| (q[0] - conj).norm()).fold(f64::INFINITY, f64::min);
            assert!(d <= 1e-8, "{p:?}");
        }
    }

    #[test]
    fn cubic_solutions_at_first_iterate() {
        // b - 2a^3 = z1 and b + 2a^3 = z2: three solutions
        let f = FamilySpec::cubic_pm();
        let (z1, z2) = (c(0.2, 0.1), c(-0.3, 0.4));
        let t = TargetTuple::user(vec![z1, z2]).unwrap();
        let config = SolveConfig {
            search_box: Some(ProductBox::new(vec![Rect::new(-1.0, 1.0, -1.0, 1.0), Rect::new(-1.0, 1.0, -1.0, 1.0)])),
            ..SolveConfig::default()
        };
        let cloud = solve_targets(&f, &t, 1, &config).unwrap();
        assert_eq!(cloud.count, 3);
        assert_eq!(cloud.expected, 9);
        assert!((cloud.measure.total - 3.0 / 9.0).abs() <= 1e-15);
        assert!(cloud.max_residual <= MAX_RESIDUAL);
        for p in &cloud.measure.points {
            assert!((p[1] - (z1 + z2) / 2.0).norm() <= 1e-10);
            assert!((4.0 * p[0].powu(3) - (z2 - z1)).norm() <= 1e-10);
        }
        assert!(cloud.resolved_fraction.unwrap() > 0.8 && !cloud.degraded);
        let far = SolveConfig {
            search_box: Some(ProductBox::new(vec![Rect::new(5.0, 6.0, 5.0, 6.0), Rect::new(5.0, 6.0, 5.0, 6.0)])),
            ..config.clone()
        };
        let empty = solve_targets(&f, &t, 1, &far).unwrap();
        assert_eq!(empty.count, 0);
        assert!(empty.degraded);
        assert!(solve_targets(&f, &t, 7, &config).is_err());
    }

    fn unit_box() -> ProductBox {
        ProductBox::new(vec![Rect::new(0.0, 1.0, 0.0, 1.0)])
    }

    #[test]
    fn discrepancy_examples() {
        let b = unit_box();
        let corner = PointMeasure::new(vec![vec![c(0.0, 0.0)]], vec![1.0]).unwrap();
        let grid = GridSpec::plane(Rect::new(0.0, 1.0, 0.0, 1.0), 8, 8).unwrap();
        let uniform = DensityField::new(grid.clone(), vec![1.0 / 64.0; 64], vec![true; 64]);
        let d = discrepancy_levels(Reference::Points(&corner), Reference::Density(&uniform), &b, 1).unwrap();
        assert_eq!(d[0], 0.0);
        assert!((d[1] - 0.75).abs() <= 1e-15);
        assert_eq!(discrepancy(Reference::Points(&corner), Reference::Points(&corner), &b, 5).unwrap(), 0.0);
        let far = PointMeasure::new(vec![vec![c(3.0, 3.0)]], vec![0.7]).unwrap();
        assert_eq!(discrepancy(Reference::Points(&corner), Reference::Points(&far), &b, 2).unwrap(), 1.0);
    }

    #[test]
    fn convergence_report_shape() {
        let q = FamilySpec::quadratic().with_parameter_disk(c(-0.5, 0.0), 1.5);
        let grid = GridSpec::plane(Rect::new(-2.5, 1.5, -2.0, 2.0), 128, 128).unwrap();
        let reference = ddc_mass(&activity_potential_grid(&q, &grid, 0, 1e-8).unwrap()).unwrap();
        let t = TargetTuple::pseudorandom(1, 5, 1.0);
        let ns = [4, 5, 6, 7, 8];
        let report = convergence_report(&q, &[t.clone(), t], &ns, &reference, 3, &SolveConfig::default()).unwrap();
        assert_eq!(report.rows.len(), 10);
        for m in &report.mutual {
            assert!(m.discrepancy.iter().all(|&x| x == 0.0));
        }
        for row in &report.rows {
            assert_eq!(row.count, 1 << (row.n - 1));
            assert_eq!(row.mass, 0.5);
            assert!(row.max_residual <= MAX_RESIDUAL);
            assert!(row.discrepancy.windows(2).all(|w| w[0] <= w[1]));
        }
        // non-increasing up to a 10% allowance
        let top: Vec<f64> = ns.iter().map(|&n| *report.row(n, 0).unwrap().discrepancy.last().unwrap()).collect();
        for w in top.windows(2) {
            assert!(w[1] <= 1.1 * w[0], "{top:?}");
        }
        assert!(report.trend[0] >= 0.5);
        let mut json = Vec::new();
        report.write_json(&mut json).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&json).unwrap();
        assert_eq!(value["rows"][0]["n"], 4);
        assert!(convergence_report(&q, &report.targets[..1], &ns, &reference, 3, &SolveConfig::default()).is_err());
    }

    #[test]
    fn csv_has_one_line_per_solution() {
        let q = FamilySpec::quadratic();
        let cloud = solve_targets(&q, &TargetTuple::pseudorandom(1, 2, 1.0), 5, &SolveConfig::default()).unwrap();
        let mut buf = Vec::new();
        cloud.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data[0], "re,im,weight");
        assert_eq!(data.len(), 17);
        assert!(text.contains("# seed: 2"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn mass_is_degree_over_d_to_the_n(n in 1usize..9, seed in 0u64..1000) {
            let q = FamilySpec::quadratic();
            let cloud = solve_targets(&q, &TargetTuple::pseudorandom(1, seed, 1.5), n, &SolveConfig::default()).unwrap();
            prop_assert_eq!(cloud.count, 1 << (n - 1));
            prop_assert_eq!(cloud.measure.total, 0.5);
            prop_assert!(cloud.max_residual <= MAX_RESIDUAL);
        }

        #[test]
        fn discrepancy_is_scale_invariant(
            pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.1f64..2.0), 1..20),
            scale in 0.1f64..10.0,
        ) {
            let points: Vec<Vec<Complex64>> = pts.iter().map(|&(x, y, _)| vec![c(x, y)]).collect();
            let w: Vec<f64> = pts.iter().map(|p| p.2).collect();
            let mu = PointMeasure::new(points.clone(), w.clone()).unwrap();
            let nu = PointMeasure::new(points, w.iter().map(|x| x * scale).collect()).unwrap();
            let d = discrepancy(Reference::Points(&mu), Reference::Points(&nu), &unit_box(), 4).unwrap();
            prop_assert!(d <= 1e-12 * mu.total.max(nu.total));
        }
    }
}
