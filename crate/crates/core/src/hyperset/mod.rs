//! Two-branch hyperbolic Cantor sets: verified inverse branches of `f^m` on
//! a ball, the coding by one-sided itineraries, the balanced measure and
//! the holomorphic motion of coded points.

pub mod coding;
pub mod motion;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{roots::all_roots_dense, DensePolynomial, RootConfig};
use crate::error::{precondition, Error, Result};
use crate::family::{periodic_points, FamilySpec, MapInstance};

pub use coding::{point_of, repelling_targets, sample_balanced, write_targets_csv, BalancedSample, CantorPoint, Itinerary, PointMeasure, Target};
pub use motion::{continue_motion, Motion, MotionStep};

/// Safety factor applied to sampled margins, separations and derivative bounds.
pub const SAFETY: f64 = 1.2;

/// Samples of the ball boundary used in every verification.
pub const BOUNDARY_SAMPLES: usize = 64;

/// Lower bound on `|(f^m)'|` along the branch images.
const DERIVATIVE_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BranchSearch {
    pub m_cap: usize,
    /// Largest period of the repelling cycles used as ball centres.
    pub period_cap: usize,
    /// Rungs of the radius ladder `D, D/2, D/4, …`.
    pub ladder_steps: usize,
    /// Fixed ball centres instead of the barycentre and repelling points.
    pub centers: Option<Vec<Complex64>>,
    /// Fixed radii instead of the ladder.
    pub radii: Option<Vec<f64>>,
    /// Largest number of (centre, radius, m) candidates examined.
    pub max_candidates: usize,
}

impl Default for BranchSearch {
    fn default() -> Self {
        Self {
            m_cap: 4,
            period_cap: 3,
            ladder_steps: 6,
            centers: None,
            radii: None,
            max_candidates: 10_000,
        }
    }
}

/// Two univalent inverse branches of `f^m` on the disk `B`, with images
/// compactly inside `B` and disjoint.
#[derive(Debug, Clone)]
pub struct BranchSystem {
    pub map: MapInstance,
    pub m: usize,
    pub center: Complex64,
    pub radius: f64,
    /// `f^m(anchor_i) = center`; branch `i` maps the centre to `anchor_i`.
    pub anchors: [Complex64; 2],
    /// Distance from the branch images to `∂B`, divided by the safety factor.
    pub margin: f64,
    /// Distance between the two images, divided by the safety factor.
    pub separation: f64,
    /// Safety factor times the largest `|g_i'|` on `B`.
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchSystemReport {
    pub lambda: Vec<Complex64>,
    pub m: usize,
    pub center: Complex64,
    pub radius: f64,
    pub anchors: [Complex64; 2],
    pub margin: f64,
    pub separation: f64,
    pub kappa: f64,
}

/// Measurements of one inverse branch along the sampled boundary.
#[derive(Debug, Clone)]
struct BranchProbe {
    anchor: Complex64,
    boundary_images: Vec<Complex64>,
    max_offset: f64,
    max_inverse_derivative: f64,
}

impl BranchSystem {
    pub fn report(&self) -> BranchSystemReport {
        BranchSystemReport {
            lambda: self.map.lambda().to_vec(),
            m: self.m,
            center: self.center,
            radius: self.radius,
            anchors: self.anchors,
            margin: self.margin,
            separation: self.separation,
            kappa: self.kappa,
        }
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    /// Branch `symbol ∈ {1, 2}` applied to `w ∈ B`.
    pub fn invert(&self, symbol: u8, w: Complex64) -> Result<Complex64> {
        let anchor = self.anchors[usize::from(symbol == 2)];
        continue_preimage(&self.map, self.m, self.center, anchor, w, self.radius).ok_or_else(|| {
            Error::InternalConsistency(format!("inverse branch {symbol} failed at {w}"))
        })
    }

    /// Symbol of the branch image containing `z`, if any.
    pub fn symbol_of(&self, z: Complex64) -> Option<u8> {
        let w = self.map.iterate(z, self.m);
        if (w - self.center).norm() >= self.radius {
            return None;
        }
        let tol = 1e-8 * self.radius;
        [1u8, 2].into_iter().find(|&s| self.invert(s, w).is_ok_and(|g| (g - z).norm() <= tol))
    }
}

/// Newton on `f^m(z) = w` from `z0`, converging when the step falls below
/// `1e-14 · max(1, |z|)`.
fn newton_preimage(map: &MapInstance, m: usize, w: Complex64, z0: Complex64) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..50 {
        let (v, dv) = map.iterate_dz(z, m);
        if dv == Complex64::new(0.0, 0.0) || !v.is_finite() {
            return None;
        }
        let step = (v - w) / dv;
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// Follows the preimage `z0` of `w0` along the segment to `w`.
fn continue_preimage(map: &MapInstance, m: usize, w0: Complex64, z0: Complex64, w: Complex64, scale: f64) -> Option<Complex64> {
    let steps = ((w - w0).norm() / (0.2 * scale)).ceil().max(1.0) as usize;
    let mut z = z0;
    for k in 1..=steps {
        let target = w0 + (w - w0) * (k as f64 / steps as f64);
        z = newton_preimage(map, m, target, z)?;
    }
    Some(z)
}

/// All `d^m` preimages of `w` with multiplicity one.
fn preimages(map: &MapInstance, m: usize, w: Complex64) -> Vec<Complex64> {
    let mut level = vec![w];
    for _ in 0..m {
        let mut next = Vec::with_capacity(level.len() * map.degree());
        for &t in &level {
            let mut coeffs = map.coeffs().to_vec();
            coeffs[0] -= t;
            let roots = all_roots_dense(&DensePolynomial::new(coeffs), &RootConfig::default());
            next.extend(roots.roots.iter().filter(|r| r.multiplicity == 1).map(|r| r.value));
        }
        level = next;
    }
    level
        .into_iter()
        .filter_map(|z| newton_preimage(map, m, w, z))
        .collect()
}

/// Continues the branch at `anchor` around the sampled boundary of `B`.
/// `None` when Newton fails, the continuation does not close up (a critical
/// value of `f^m` inside `B`) or `|(f^m)'|` drops below the floor.
fn probe_branch(map: &MapInstance, m: usize, center: Complex64, radius: f64, anchor: Complex64) -> Option<BranchProbe> {
    let boundary: Vec<Complex64> = (0..=BOUNDARY_SAMPLES)
        .map(|k| center + Complex64::from_polar(radius, std::f64::consts::TAU * k as f64 / BOUNDARY_SAMPLES as f64))
        .collect();
    let mut z = continue_preimage(map, m, center, anchor, boundary[0], radius)?;
    let mut images = vec![z];
    for k in 1..boundary.len() {
        z = continue_preimage(map, m, boundary[k - 1], z, boundary[k], radius)?;
        images.push(z);
    }
    let closing = (images[BOUNDARY_SAMPLES] - images[0]).norm();
    if closing > 1e-8 * radius.max(1.0) {
        return None;
    }
    images.pop();
    let mut max_inverse_derivative: f64 = 0.0;
    for &g in &images {
        let d = map.iterate_dz(g, m).1.norm();
        if d < DERIVATIVE_FLOOR {
            return None;
        }
        max_inverse_derivative = max_inverse_derivative.max(1.0 / d);
    }
    let max_offset = images.iter().map(|g| (g - center).norm()).fold(0.0, f64::max);
    Some(BranchProbe {
        anchor,
        boundary_images: images,
        max_offset,
        max_inverse_derivative,
    })
}

fn curve_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min)
}

/// Why a candidate ball was not accepted.
fn verify_candidate(map: &MapInstance, m: usize, center: Complex64, radius: f64) -> std::result::Result<BranchSystem, String> {
    let anchors: Vec<Complex64> = preimages(map, m, center)
        .into_iter()
        .filter(|a| (a - center).norm() < radius)
        .collect();
    if anchors.len() < 2 {
        return Err(format!("{} preimage(s) of the centre inside B", anchors.len()));
    }
    let probes: Vec<BranchProbe> = anchors
        .par_iter()
        .filter_map(|&a| probe_branch(map, m, center, radius, a))
        .filter(|p| p.max_offset < radius)
        .collect();
    if probes.len() < 2 {
        return Err(format!(
            "{} of {} branches univalent with image inside B",
            probes.len(),
            anchors.len()
        ));
    }
    let mut best: Option<(f64, f64, usize, usize)> = None;
    for i in 0..probes.len() {
        for j in i + 1..probes.len() {
            let separation = curve_distance(&probes[i].boundary_images, &probes[j].boundary_images);
            // nested images would mean the branches are not distinct
            let nested = (probes[i].anchor - probes[j].anchor).norm() <= 1e-9 * radius;
            if separation <= 0.0 || nested {
                continue;
            }
            let margin = radius - probes[i].max_offset.max(probes[j].max_offset);
            if best.is_none_or(|(bm, bs, _, _)| (margin, separation) > (bm, bs)) {
                best = Some((margin, separation, i, j));
            }
        }
    }
    let (margin, separation, i, j) = best.ok_or("no pair of branches with separated images")?;
    let kappa = SAFETY * probes[i].max_inverse_derivative.max(probes[j].max_inverse_derivative);
    if !(kappa < 1.0) {
        return Err(format!("contraction bound {kappa:.3} is not below 1"));
    }
    // symbols follow the real parts of the anchors for a stable labelling
    let (a, b) = (probes[i].anchor, probes[j].anchor);
    let anchors = if (a.re, a.im) <= (b.re, b.im) { [a, b] } else { [b, a] };
    Ok(BranchSystem {
        map: map.clone(),
        m,
        center,
        radius,
        anchors,
        margin: margin / SAFETY,
        separation: separation / SAFETY,
        kappa,
    })
}

/// Ball radii `D·2^{-k}`, with `D` twice the growth radius rounded up to
/// one significant digit.
fn radius_ladder(map: &MapInstance, steps: usize) -> Vec<f64> {
    let diameter = 2.0 * map.growth_radius();
    let magnitude = 10f64.powf(diameter.log10().floor());
    let top = (diameter / magnitude).ceil() * magnitude;
    (0..steps).map(|k| top / 2f64.powi(k as i32)).collect()
}

fn candidate_centers(map: &MapInstance, period_cap: usize) -> Vec<Complex64> {
    let mut centers = vec![map.barycenter()];
    for p in 1..=period_cap {
        if let Ok(points) = periodic_points(map, p, crate::family::orbit::DEFAULT_DEGREE_CAP) {
            let mut repelling: Vec<Complex64> = points
                .iter()
                .filter(|q| q.multiplicity == 1 && q.multiplier.norm() > 1.0)
                .map(|q| q.point)
                .collect();
            repelling.sort_by(|a, b| (a.re, a.im).partial_cmp(&(b.re, b.im)).unwrap_or(std::cmp::Ordering::Equal));
            for q in repelling {
                if centers.iter().all(|c| (c - q).norm() > 1e-9) {
                    centers.push(q);
                }
            }
        }
    }
    centers
}

/// Searches `m = 1..=m_cap` for a verified two-branch system; within the
/// smallest successful `m` the largest margin wins.
pub fn build_branch_system(family: &FamilySpec, lambda0: &[Complex64], search: &BranchSearch) -> Result<BranchSystem> {
    if lambda0.len() != family.dim() || lambda0.iter().any(|z| !z.is_finite()) {
        return Err(precondition("parameter has the wrong dimension or is not finite"));
    }
    let map = family.at(lambda0)?;
    let centers = search.centers.clone().unwrap_or_else(|| candidate_centers(&map, search.period_cap));
    let radii = search.radii.clone().unwrap_or_else(|| radius_ladder(&map, search.ladder_steps));
    let mut diagnostics = Vec::new();
    let mut examined = 0usize;
    for m in 1..=search.m_cap {
        let mut best: Option<BranchSystem> = None;
        for &center in &centers {
            for &radius in &radii {
                if examined >= search.max_candidates {
                    break;
                }
                examined += 1;
                match verify_candidate(&map, m, center, radius) {
                    Ok(system) => {
                        if best.as_ref().is_none_or(|b| system.margin > b.margin) {
                            best = Some(system);
                        }
                    }
                    Err(why) => diagnostics.push(format!("m={m} centre={center} radius={radius}: {why}")),
                }
            }
        }
        if let Some(system) = best {
            return Ok(system);
        }
    }
    if examined == 0 {
        diagnostics.push("no candidates examined".into());
    }
    Err(Error::NoBranchSystem(diagnostics.join("; ")))
}

/// Re-verifies the ball of `system` at another parameter, following each
/// anchor by Newton.
pub fn reanchor(system: &BranchSystem, map: MapInstance) -> std::result::Result<BranchSystem, String> {
    let mut anchors = [Complex64::new(0.0, 0.0); 2];
    for (k, &a) in system.anchors.iter().enumerate() {
        anchors[k] = newton_preimage(&map, system.m, system.center, a).ok_or("anchor continuation failed")?;
    }
    let (center, radius, m) = (system.center, system.radius, system.m);
    let probes: Vec<BranchProbe> = anchors
        .iter()
        .map(|&a| probe_branch(&map, m, center, radius, a).ok_or("branch no longer univalent on B"))
        .collect::<std::result::Result<_, _>>()?;
    let margin = radius - probes[0].max_offset.max(probes[1].max_offset);
    let separation = curve_distance(&probes[0].boundary_images, &probes[1].boundary_images);
    let kappa = SAFETY * probes[0].max_inverse_derivative.max(probes[1].max_inverse_derivative);
    if !(margin > 0.0 && separation > 0.0 && kappa < 1.0) {
        return Err(format!("verification failed: margin {margin:e}, separation {separation:e}, kappa {kappa}"));
    }
    Ok(BranchSystem {
        map,
        m,
        center,
        radius,
        anchors,
        margin: margin / SAFETY,
        separation: separation / SAFETY,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basilica_exterior_example() {
        let q = FamilySpec::quadratic();
        let s = build_branch_system(&q, &[c(-3.0, 0.0)], &BranchSearch::default()).unwrap();
        assert_eq!(s.m, 1);
        assert!(s.center.norm() <= 1e-12);
        assert_eq!(s.radius, 2.5);
        assert!(s.margin >= 0.1, "margin {}", s.margin);
        // closed form: images are ±sqrt(w + 3), reaching |sqrt(5.5)|
        assert!((2.5 - 5.5f64.sqrt() - SAFETY * s.margin).abs() <= 1e-3);
        assert!(s.kappa < 1.0);
        let (a, b) = (s.anchors[0], s.anchors[1]);
        assert!((a - c(-3f64.sqrt(), 0.0)).norm() <= 1e-12 && (b - c(3f64.sqrt(), 0.0)).norm() <= 1e-12);
        let w = c(0.7, -1.1);
        for (sym, sign) in [(1u8, -1.0), (2, 1.0)] {
            let g = s.invert(sym, w).unwrap();
            assert!((g - (w + 3.0).sqrt() * sign).norm() <= 1e-12);
        }
    }

    #[test]
    fn one_preimage_near_a_fixed_point_is_not_enough() {
        let q = FamilySpec::quadratic();
        let search = BranchSearch {
            m_cap: 1,
            centers: Some(vec![c(1.0, 0.0)]),
            radii: Some(vec![0.5, 0.25, 0.1]),
            ..BranchSearch::default()
        };
        match build_branch_system(&q, &[c(0.0, 0.0)], &search) {
            Err(Error::NoBranchSystem(msg)) => assert!(msg.contains("1 preimage")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_budget_fails() {
        let q = FamilySpec::quadratic();
        let search = BranchSearch {
            max_candidates: 0,
            ..BranchSearch::default()
        };
        assert!(matches!(build_branch_system(&q, &[c(-3.0, 0.0)], &search), Err(Error::NoBranchSystem(_))));
    }

    #[test]
    fn critical_value_inside_the_ball_is_rejected() {
        let q = FamilySpec::quadratic();
        let map = q.at(&[c(-3.0, 0.0)]).unwrap();
        assert!(verify_candidate(&map, 1, c(0.0, 0.0), 5.0).is_err());
    }

    #[test]
    fn symbols_identify_branch_images() {
        let q = FamilySpec::quadratic();
        let s = build_branch_system(&q, &[c(-3.0, 0.0)], &BranchSearch::default()).unwrap();
        let w = c(0.3, 0.4);
        assert_eq!(s.symbol_of(s.invert(1, w).unwrap()), Some(1));
        assert_eq!(s.symbol_of(s.invert(2, w).unwrap()), Some(2));
        assert_eq!(s.symbol_of(c(0.0, 2.4)), None);
    }

    #[test]
    fn cubic_system_at_escaping_parameters() {
        let cubic = FamilySpec::cubic_pm();
        let s = build_branch_system(&cubic, &[c(0.3, 0.0), c(3.0, 0.0)], &BranchSearch::default()).unwrap();
        assert!(s.kappa < 1.0 && s.margin > 0.0 && s.separation > 0.0);
    }

    #[test]
    fn ladder_rounds_up() {
        let q = FamilySpec::quadratic();
        let map = q.at(&[c(-3.0, 0.0)]).unwrap();
        assert_eq!(radius_ladder(&map, 3), vec![5.0, 2.5, 1.25]);
    }
}
