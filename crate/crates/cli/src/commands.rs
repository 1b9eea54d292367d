//! One options pair per subcommand: `*Flags` as parsed from the command
//! line (every field optional) and the resolved configuration it layers
//! onto, followed by the pipeline that produces the artifacts.

use bifurlab::calculus::boxes::ProductBox;
use bifurlab::calculus::{Rect, Region};
use bifurlab::equidist::{convergence_report, solve_targets, SolveConfig, TargetTuple};
use bifurlab::family::FamilySpec;
use bifurlab::hyperset::{
    build_branch_system, continue_motion, repelling_targets, sample_balanced, write_targets_csv, BranchSearch,
};
use bifurlab::io::{fmt_g17, write_jsonl, CsvWriter};
use bifurlab::misiurewicz::enumerate::DEFAULT_DEGREE_CAP;
use bifurlab::misiurewicz::{
    certify, enumerate_1d, newton_solve, search_near, write_certificates, CertifyConfig, PreperiodicSpec,
    SearchConfig,
};
use bifurlab::potential::{activity_potential_grid, ddc_mass, wedge_mass_2d, GridSpec};
use bifurlab::Complex64;
use clap::Args;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::output::RunDir;
use crate::CliError;

/// `quadratic`, `cubic_pm` or `unicriticalD` (also `unicritical:D`).
pub fn family(name: &str) -> Result<FamilySpec, CliError> {
    match name {
        "quadratic" => return Ok(FamilySpec::quadratic()),
        "cubic_pm" => return Ok(FamilySpec::cubic_pm()),
        _ => {}
    }
    let degree = name
        .strip_prefix("unicritical")
        .map(|s| s.trim_start_matches(':'))
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&d| (2..=64).contains(&d));
    match degree {
        Some(d) => Ok(FamilySpec::unicritical(d)),
        None => Err(CliError::Usage(format!(
            "unknown family `{name}` (expected quadratic, cubic_pm or unicriticalD)"
        ))),
    }
}

/// Parameters from `re,im` pairs, or from real parts alone when exactly
/// one number per parameter is given.
fn parameters(values: &[f64], dim: usize, what: &str) -> Result<Vec<Complex64>, CliError> {
    if values.len() == 2 * dim {
        Ok(values.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
    } else if values.len() == dim {
        Ok(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    } else {
        Err(CliError::Usage(format!(
            "{what}: expected {dim} real or {} re,im numbers, got {}",
            2 * dim,
            values.len()
        )))
    }
}

fn rect(values: &[f64], what: &str) -> Result<Rect, CliError> {
    match values {
        [a, b, c, d] if a < b && c < d => Ok(Rect::new(*a, *b, *c, *d)),
        _ => Err(CliError::Usage(format!("{what}: expected re0,re1,im0,im1 with re0<re1, im0<im1"))),
    }
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (n, m) = s.split_once(':').ok_or_else(|| format!("`{s}` is not of the form n:m"))?;
    Ok((
        n.trim().parse().map_err(|e| format!("{n}: {e}"))?,
        m.trim().parse().map_err(|e| format!("{m}: {e}"))?,
    ))
}

fn summary_json(dir: &mut RunDir, value: serde_json::Value) -> Result<(), CliError> {
    dir.write_json("summary.json", &value)
}

// ---------------------------------------------------------------- potential

#[derive(Debug, Args, Serialize)]
pub struct PotentialFlags {
    #[arg(long)]
    family: Option<String>,
    /// re0,re1,im0,im1 of the varying coordinate.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bounds: Option<Vec<f64>>,
    /// Samples per real axis.
    #[arg(long)]
    res: Option<usize>,
    /// Samples along the imaginary axis, if different.
    #[arg(long)]
    res_im: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Marked critical point.
    #[arg(long)]
    critical: Option<usize>,
    /// Varying parameter index.
    #[arg(long)]
    axis: Option<usize>,
    /// Values of all parameters (re,im pairs); the varying one is ignored.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    base: Option<Vec<f64>>,
    /// Also write the dd^c mass density.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    mass: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    family: String,
    bounds: Vec<f64>,
    res: usize,
    res_im: Option<usize>,
    tol: f64,
    critical: usize,
    axis: usize,
    base: Vec<f64>,
    mass: bool,
}

impl Default for Potential {
    fn default() -> Self {
        Self {
            family: "quadratic".into(),
            bounds: vec![-2.5, 1.5, -1.5, 1.5],
            res: 512,
            res_im: None,
            tol: 1e-8,
            critical: 0,
            axis: 0,
            base: Vec::new(),
            mass: false,
        }
    }
}

impl Potential {
    pub fn run(&self, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        let base = if self.base.is_empty() {
            vec![Complex64::new(0.0, 0.0); f.dim()]
        } else {
            parameters(&self.base, f.dim(), "base")?
        };
        let grid = GridSpec::new(
            base,
            vec![self.axis],
            vec![rect(&self.bounds, "bounds")?],
            vec![self.res, self.res_im.unwrap_or(self.res)],
        )?;
        let field = activity_potential_grid(&f, &grid, self.critical, self.tol)?;
        dir.write("potential.csv", |b| field.write_csv(b))?;
        dir.write("potential.pgm", |b| field.write_pgm(b))?;
        let mut summary = json!({
            "samples": field.len(),
            "max_error": field.max_error(),
            "possibly_bounded": field.possibly_bounded.iter().filter(|&&p| p).count(),
            "max_iterates": field.n_used.iter().max(),
        });
        if self.mass {
            let density = ddc_mass(&field)?;
            dir.write("density.csv", |b| density.write_csv(b))?;
            dir.write("density.pgm", |b| density.write_pgm(b))?;
            summary["total_mass"] = json!(density.total());
            summary["raw_mass"] = json!(density.raw_total());
            summary["clamped_mass"] = json!(density.clamped_total());
            summary["clamped_fraction"] = json!(density.clamped_fraction());
        }
        summary_json(dir, summary)
    }
}

// -------------------------------------------------------------------- wedge

#[derive(Debug, Args, Serialize)]
pub struct WedgeFlags {
    #[arg(long)]
    family: Option<String>,
    /// re0,re1,im0,im1 of the first parameter.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bounds0: Option<Vec<f64>>,
    /// re0,re1,im0,im1 of the second parameter.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    bounds1: Option<Vec<f64>>,
    /// Samples per real axis.
    #[arg(long)]
    res: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Smoothing width; twice the largest grid step by default.
    #[arg(long)]
    sigma: Option<f64>,
    /// The two marked critical points, e.g. 0,1.
    #[arg(long, value_delimiter = ',')]
    critical: Option<Vec<usize>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Wedge {
    family: String,
    bounds0: Vec<f64>,
    bounds1: Vec<f64>,
    res: usize,
    tol: f64,
    sigma: Option<f64>,
    critical: Vec<usize>,
}

impl Default for Wedge {
    fn default() -> Self {
        Self {
            family: "cubic_pm".into(),
            bounds0: vec![-1.2, 1.2, -1.2, 1.2],
            bounds1: vec![-1.7, 1.7, -1.7, 1.7],
            res: 32,
            tol: 1e-8,
            sigma: None,
            critical: vec![0, 1],
        }
    }
}

impl Wedge {
    pub fn run(&self, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        let [i, j] = self.critical[..] else {
            return Err(CliError::Usage("critical: expected two indices".into()));
        };
        let grid = GridSpec::product(rect(&self.bounds0, "bounds0")?, rect(&self.bounds1, "bounds1")?, self.res)?;
        let sigma = self.sigma.unwrap_or(2.0 * grid.max_step());
        let u = activity_potential_grid(&f, &grid, i, self.tol)?;
        let v = if i == j { u.clone() } else { activity_potential_grid(&f, &grid, j, self.tol)? };
        let density = wedge_mass_2d(&u, &v, sigma)?;
        dir.write("wedge.csv", |b| density.write_csv(b))?;
        summary_json(
            dir,
            json!({
                "sigma": sigma,
                "total_mass": density.total(),
                "raw_mass": density.raw_total(),
                "clamped_mass": density.clamped_total(),
                "boundary_cells": density.boundary_cells(),
            }),
        )
    }
}

// -------------------------------------------------------------- misiurewicz

#[derive(Debug, Args, Serialize)]
pub struct MisiurewiczFlags {
    #[arg(long)]
    family: Option<String>,
    /// Newton start (reals or re,im pairs).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    /// Preperiod and period per critical point, e.g. 2:1 or 2:1,2:1.
    #[arg(long, value_delimiter = ',', value_parser = parse_pair)]
    spec: Option<Vec<(usize, usize)>>,
    #[arg(long)]
    newton_tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Misiurewicz {
    family: String,
    lambda: Vec<f64>,
    spec: Vec<(usize, usize)>,
    newton_tol: f64,
    max_iter: usize,
    certify: CertifyConfig,
}

impl Default for Misiurewicz {
    fn default() -> Self {
        Self {
            family: "quadratic".into(),
            lambda: vec![-1.8],
            spec: vec![(2, 1)],
            newton_tol: 1e-12,
            max_iter: 100,
            certify: CertifyConfig::default(),
        }
    }
}

impl Misiurewicz {
    pub fn run(&self, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        let lambda0 = parameters(&self.lambda, f.dim(), "lambda")?;
        let spec = PreperiodicSpec::new(self.spec.clone());
        let solved = newton_solve(&f, &spec, &lambda0, self.newton_tol, self.max_iter)?;
        let verdict = certify(&f, &solved.lambda, &spec, &self.certify)?;
        let certificates: Vec<_> = verdict.iter().cloned().collect();
        dir.write("certificates.jsonl", |b| write_certificates(b, &certificates))?;
        let outcome = match &verdict {
            Ok(_) => json!({"certified": true}),
            Err(r) => json!({"certified": false, "rejection": r, "reason": r.to_string()}),
        };
        summary_json(
            dir,
            json!({
                "newton": {"lambda": solved.lambda, "residual": solved.residual, "iterations": solved.iterations},
                "outcome": outcome,
            }),
        )
    }
}

// ---------------------------------------------------------------- enumerate

#[derive(Debug, Args, Serialize)]
pub struct EnumerateFlags {
    #[arg(long)]
    family: Option<String>,
    /// Preperiod.
    #[arg(long)]
    n: Option<usize>,
    /// Period.
    #[arg(long)]
    m: Option<usize>,
    /// Half-width of the square around 0 whose roots are certified.
    #[arg(long = "box")]
    #[serde(rename = "box")]
    half_width: Option<f64>,
    /// Largest polynomial degree.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Enumerate {
    family: String,
    n: usize,
    m: usize,
    #[serde(rename = "box")]
    half_width: Option<f64>,
    cap: usize,
    certify: CertifyConfig,
}

impl Default for Enumerate {
    fn default() -> Self {
        Self {
            family: "quadratic".into(),
            n: 2,
            m: 1,
            half_width: None,
            cap: DEFAULT_DEGREE_CAP,
            certify: CertifyConfig::default(),
        }
    }
}

impl Enumerate {
    pub fn run(&self, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        let region = self
            .half_width
            .map(|w| Region::Rect(Rect::square(Complex64::new(0.0, 0.0), w)));
        let e = enumerate_1d(&f, self.n, self.m, region.as_ref(), self.cap, &self.certify)?;
        dir.write("certificates.jsonl", |b| write_certificates(b, &e.certificates))?;
        dir.write("rejected.jsonl", |b| write_jsonl(b, &e.rejected))?;
        dir.write("roots.csv", |b| {
            let mut w = CsvWriter::new(b);
            w.comment(&format!("roots of the ({}, {}) equation, degree {}", self.n, self.m, e.degree))?;
            w.header(&["re", "im", "multiplicity"])?;
            for r in &e.roots {
                w.row(&[fmt_g17(r.value.re), fmt_g17(r.value.im), r.multiplicity.to_string()])?;
            }
            w.into_inner()?;
            Ok(())
        })?;
        summary_json(
            dir,
            json!({
                "degree": e.degree,
                "distinct_roots": e.roots.len(),
                "certificates": e.certificates.len(),
                "rejected": e.rejected.len(),
            }),
        )
    }
}

// ----------------------------------------------------------------- hyperset

#[derive(Debug, Args, Serialize)]
pub struct HypersetFlags {
    #[arg(long)]
    family: Option<String>,
    /// Base parameter (reals or re,im pairs).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    /// Largest iterate tried for the branch system.
    #[arg(long)]
    m_cap: Option<usize>,
    /// Code length of balanced samples.
    #[arg(long)]
    depth: Option<usize>,
    /// Number of balanced samples.
    #[arg(long)]
    samples: Option<usize>,
    /// Largest period of the listed repelling targets.
    #[arg(long)]
    q_cap: Option<usize>,
    /// End of the holomorphic motion path (reals or re,im pairs).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    motion_to: Option<Vec<f64>>,
    #[arg(long)]
    motion_steps: Option<usize>,
    /// Balanced samples followed along the motion.
    #[arg(long)]
    motion_points: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hyperset {
    family: String,
    lambda: Vec<f64>,
    m_cap: usize,
    depth: usize,
    samples: usize,
    q_cap: usize,
    motion_to: Option<Vec<f64>>,
    motion_steps: usize,
    motion_points: usize,
}

impl Default for Hyperset {
    fn default() -> Self {
        Self {
            family: "quadratic".into(),
            lambda: vec![-3.0],
            m_cap: 4,
            depth: 20,
            samples: 1000,
            q_cap: 8,
            motion_to: None,
            motion_steps: 20,
            motion_points: 100,
        }
    }
}

impl Hyperset {
    pub fn run(&self, seed: u64, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        let lambda0 = parameters(&self.lambda, f.dim(), "lambda")?;
        let search = BranchSearch {
            m_cap: self.m_cap,
            ..BranchSearch::default()
        };
        let system = build_branch_system(&f, &lambda0, &search)?;
        dir.write_json("branch_system.json", &system.report())?;
        let sample = sample_balanced(&system, self.depth, self.samples, seed)?;
        dir.write("balanced.csv", |b| sample.write_csv(b))?;
        let targets = repelling_targets(&system, self.q_cap)?;
        dir.write("targets.csv", |b| write_targets_csv(b, &targets))?;
        let mut summary = json!({"system": system.report(), "samples": sample.points.len(), "targets": targets.len()});
        if let Some(to) = &self.motion_to {
            let lambda1 = parameters(to, f.dim(), "motion_to")?;
            let tracked = &sample.points[..self.motion_points.min(sample.points.len())];
            let motion = continue_motion(&f, &system, tracked, &lambda1, self.motion_steps)?;
            dir.write("motion.csv", |b| {
                let mut w = CsvWriter::new(b);
                w.comment("holomorphic motion of balanced samples; empty coordinates mark lost points")?;
                w.header(&["step", "point", "lambda_re", "lambda_im", "re", "im"])?;
                for (s, step) in motion.path.iter().enumerate() {
                    for (k, p) in step.points.iter().enumerate() {
                        let (re, im) = p.map_or((String::new(), String::new()), |z| (fmt_g17(z.re), fmt_g17(z.im)));
                        w.row(&[
                            s.to_string(),
                            k.to_string(),
                            fmt_g17(step.lambda[0].re),
                            fmt_g17(step.lambda[0].im),
                            re,
                            im,
                        ])?;
                    }
                }
                w.into_inner()?;
                Ok(())
            })?;
            summary["motion"] = json!({
                "steps_completed": motion.path.len() - 1,
                "breakdown": motion.breakdown,
            });
        }
        summary_json(dir, summary)
    }
}

// ----------------------------------------------------------------- equidist

#[derive(Debug, Args, Serialize)]
pub struct EquidistFlags {
    #[arg(long)]
    family: Option<String>,
    /// Number of pseudorandom target tuples; tuple t uses seed + t.
    #[arg(long)]
    targets: Option<usize>,
    /// Targets are drawn uniformly from the disk of this radius.
    #[arg(long)]
    target_radius: Option<f64>,
    #[arg(long)]
    nmin: Option<usize>,
    #[arg(long)]
    nmax: Option<usize>,
    /// Finest dyadic level of the discrepancy.
    #[arg(long)]
    levels: Option<u32>,
    /// Reference grid re0,re1,im0,im1 (one-parameter families).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    reference_bounds: Option<Vec<f64>>,
    #[arg(long)]
    reference_res: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    /// Search box of two-parameter solves: eight numbers, two rectangles.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    search_box: Option<Vec<f64>>,
    #[arg(long)]
    cells_per_axis: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Equidist {
    family: String,
    targets: usize,
    target_radius: f64,
    nmin: usize,
    nmax: usize,
    levels: u32,
    reference_bounds: Vec<f64>,
    reference_res: usize,
    tol: f64,
    search_box: Option<Vec<f64>>,
    cells_per_axis: usize,
    cap: usize,
}

impl Default for Equidist {
    fn default() -> Self {
        Self {
            family: "quadratic".into(),
            targets: 2,
            target_radius: 1.0,
            nmin: 8,
            nmax: 13,
            levels: 4,
            reference_bounds: vec![-4.0, 4.0, -4.0, 4.0],
            reference_res: 1024,
            tol: 1e-8,
            search_box: None,
            cells_per_axis: SolveConfig::default().cells_per_axis,
            cap: SolveConfig::default().cap,
        }
    }
}

impl Equidist {
    pub fn run(&self, seed: u64, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        if self.nmin == 0 || self.nmin > self.nmax {
            return Err(CliError::Usage("need 1 ≤ nmin ≤ nmax".into()));
        }
        let targets: Vec<TargetTuple> = (0..self.targets as u64)
            .map(|t| TargetTuple::pseudorandom(f.dim(), seed.wrapping_add(t), self.target_radius))
            .collect();
        let ns: Vec<usize> = (self.nmin..=self.nmax).collect();
        let search_box = match &self.search_box {
            Some(v) if v.len() == 8 => Some(ProductBox::new(vec![rect(&v[..4], "search_box")?, rect(&v[4..], "search_box")?])),
            Some(_) => return Err(CliError::Usage("search_box: expected eight numbers".into())),
            None => None,
        };
        let config = SolveConfig {
            cap: self.cap,
            search_box,
            cells_per_axis: self.cells_per_axis,
            ..SolveConfig::default()
        };
        let clouds = if f.dim() == 1 {
            let grid = GridSpec::plane(rect(&self.reference_bounds, "reference_bounds")?, self.reference_res, self.reference_res)?;
            let reference = ddc_mass(&activity_potential_grid(&f, &grid, 0, self.tol)?)?;
            let report = convergence_report(&f, &targets, &ns, &reference, self.levels, &config)?;
            dir.write("report.json", |b| {
                report.write_json(&mut *b)?;
                b.push(b'\n');
                Ok(())
            })?;
            report.clouds
        } else {
            let mut clouds = Vec::new();
            for &n in &ns {
                for t in &targets {
                    clouds.push(solve_targets(&f, t, n, &config)?);
                }
            }
            let rows: Vec<_> = clouds
                .iter()
                .map(|c| {
                    json!({"n": c.n, "count": c.count, "mass": c.measure.total,
                        "resolved_fraction": c.resolved_fraction, "degraded": c.degraded})
                })
                .collect();
            summary_json(dir, json!({"rows": rows}))?;
            clouds
        };
        for (i, cloud) in clouds.iter().enumerate() {
            let t = i % targets.len();
            dir.write(&format!("clouds/n{:02}_t{t}.csv", cloud.n), |b| cloud.write_csv(b))?;
        }
        Ok(())
    }
}

// -------------------------------------------------------------- search-near

#[derive(Debug, Args, Serialize)]
pub struct SearchNearFlags {
    #[arg(long)]
    family: Option<String>,
    /// Centre of the search (reals or re,im pairs).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    lambda: Option<Vec<f64>>,
    #[arg(long)]
    radius: Option<f64>,
    /// Largest total of preperiods and periods swept.
    #[arg(long)]
    n_cap: Option<usize>,
    /// Newton runs allowed.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    max_period: Option<usize>,
    #[arg(long)]
    seeds_per_spec: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchNear {
    family: String,
    lambda: Vec<f64>,
    radius: f64,
    n_cap: usize,
    budget: usize,
    max_period: usize,
    seeds_per_spec: usize,
    newton_tol: f64,
    newton_max_iter: usize,
    dedup_distance: f64,
    certify: CertifyConfig,
}

impl Default for SearchNear {
    fn default() -> Self {
        let s = SearchConfig::default();
        Self {
            family: "quadratic".into(),
            lambda: vec![-0.75],
            radius: 0.1,
            n_cap: s.n_cap,
            budget: s.budget,
            max_period: s.max_period,
            seeds_per_spec: s.seeds_per_spec,
            newton_tol: s.newton_tol,
            newton_max_iter: s.newton_max_iter,
            dedup_distance: s.dedup_distance,
            certify: s.certify,
        }
    }
}

impl SearchNear {
    pub fn run(&self, dir: &mut RunDir) -> Result<(), CliError> {
        let f = family(&self.family)?;
        let lambda0 = parameters(&self.lambda, f.dim(), "lambda")?;
        let config = SearchConfig {
            n_cap: self.n_cap,
            budget: self.budget,
            max_period: self.max_period,
            seeds_per_spec: self.seeds_per_spec,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
            dedup_distance: self.dedup_distance,
            certify: self.certify.clone(),
        };
        let result = search_near(&f, &lambda0, self.radius, &config)?;
        dir.write("certificates.jsonl", |b| write_certificates(b, &result.certificates))?;
        summary_json(
            dir,
            json!({
                "certificates": result.certificates.len(),
                "runs": result.runs,
                "converged": result.converged,
                "rejected": result.rejected,
                "rejections": result.rejections,
                "reached_total": result.reached_total,
                "diagnostic": result.diagnostic,
            }),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_names() {
        assert_eq!(family("quadratic").unwrap().degree(), 2);
        assert_eq!(family("unicritical3").unwrap().degree(), 3);
        assert_eq!(family("unicritical:4").unwrap().degree(), 4);
        assert_eq!(family("cubic_pm").unwrap().dim(), 2);
        assert!(family("unicritical1").is_err());
        assert!(family("logistic").is_err());
    }

    #[test]
    fn parameter_lists() {
        assert_eq!(parameters(&[-0.75], 1, "l").unwrap(), vec![Complex64::new(-0.75, 0.0)]);
        assert_eq!(parameters(&[1.0, 2.0], 1, "l").unwrap(), vec![Complex64::new(1.0, 2.0)]);
        assert_eq!(parameters(&[1.0, 2.0], 2, "l").unwrap().len(), 2);
        assert!(parameters(&[1.0, 2.0, 3.0], 1, "l").is_err());
        assert_eq!(parse_pair("2:1").unwrap(), (2, 1));
        assert!(parse_pair("2").is_err());
    }
}
