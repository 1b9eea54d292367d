use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::coding::polish_periodic;
use super::{point_of, reanchor, BranchSystem, CantorPoint};
use crate::error::{precondition, Result};
use crate::family::FamilySpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotionStep {
    pub lambda: Vec<Complex64>,
    /// Position of every tracked point, `None` once it was lost.
    pub points: Vec<Option<Complex64>>,
}

#[derive(Debug, Clone)]
pub struct Motion {
    /// Starting configuration first, then one entry per completed step.
    pub path: Vec<MotionStep>,
    /// Branch system at the last good parameter.
    pub system: BranchSystem,
    pub breakdown: Option<String>,
}

impl Motion {
    pub fn complete(&self) -> bool {
        self.breakdown.is_none()
    }

    pub fn last(&self) -> &MotionStep {
        self.path.last().expect("path holds the starting configuration")
    }
}

/// Moves coded points along the segment from the base parameter of
/// `system` to `lambda1`, re-anchoring the branch system at every step.
/// Periodic codes follow their periodicity equation; finite codes are
/// recomposed through the continued branches.
pub fn continue_motion(
    family: &FamilySpec,
    system: &BranchSystem,
    points: &[CantorPoint],
    lambda1: &[Complex64],
    steps: usize,
) -> Result<Motion> {
    if steps == 0 {
        return Err(precondition("need at least one step"));
    }
    if lambda1.len() != family.dim() || lambda1.iter().any(|z| !z.is_finite()) {
        return Err(precondition("target parameter has the wrong dimension or is not finite"));
    }
    let lambda0 = system.map.lambda().to_vec();
    let mut current = system.clone();
    let mut positions: Vec<Option<Complex64>> = points.iter().map(|p| Some(p.point)).collect();
    let mut path = vec![MotionStep {
        lambda: lambda0.clone(),
        points: positions.clone(),
    }];
    for k in 1..=steps {
        let t = k as f64 / steps as f64;
        let lambda: Vec<Complex64> = lambda0.iter().zip(lambda1).map(|(a, b)| a + (b - a) * t).collect();
        let next = family
            .at(&lambda)
            .map_err(|e| e.to_string())
            .and_then(|map| reanchor(&current, map));
        let next = match next {
            Ok(s) => s,
            Err(why) => {
                return Ok(Motion {
                    path,
                    system: current,
                    breakdown: Some(format!("step {k}: {why}")),
                });
            }
        };
        positions = points
            .par_iter()
            .zip(positions.par_iter())
            .map(|(p, &prev)| {
                let prev = prev?;
                let moved = if p.code.periodic {
                    polish_periodic(&next, prev, next.m * p.code.symbols.len())?
                } else {
                    point_of(&next, &p.code, p.depth).ok()?.point
                };
                ((moved - next.center).norm() < next.radius).then_some(moved)
            })
            .collect();
        path.push(MotionStep {
            lambda,
            points: positions.clone(),
        });
        current = next;
    }
    Ok(Motion {
        path,
        system: current,
        breakdown: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperset::coding::{primitive_words, Itinerary};
    use crate::hyperset::{build_branch_system, sample_balanced, BranchSearch};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn setup() -> (FamilySpec, BranchSystem) {
        let q = FamilySpec::quadratic();
        let s = build_branch_system(&q, &[c(-3.0, 0.0)], &BranchSearch::default()).unwrap();
        (q, s)
    }

    #[test]
    fn static_motion_is_identity() {
        let (q, s) = setup();
        let pts = sample_balanced(&s, 10, 20, 1).unwrap().points;
        let m = continue_motion(&q, &s, &pts, &[c(-3.0, 0.0)], 3).unwrap();
        for (p, moved) in pts.iter().zip(&m.last().points) {
            assert!((p.point - moved.unwrap()).norm() <= 1e-12);
        }
    }

    #[test]
    fn periodic_points_stay_periodic_and_repelling() {
        let (q, s) = setup();
        let pts: Vec<CantorPoint> = (1..=3)
            .flat_map(primitive_words)
            .map(|w| point_of(&s, &Itinerary::periodic(w), 40).unwrap())
            .collect();
        let target = c(-3.0, 0.2);
        let m = continue_motion(&q, &s, &pts, &[target], 20).unwrap();
        assert!(m.complete());
        let map = q.at(&[target]).unwrap();
        for (p, moved) in pts.iter().zip(&m.last().points) {
            let z = moved.unwrap();
            let (w, mu) = map.iterate_dz(z, p.code.symbols.len());
            assert!((w - z).norm() < 1e-10);
            assert!(mu.norm() > 1.0);
        }
    }

    #[test]
    fn motion_conjugates_the_dynamics() {
        let (q, s) = setup();
        let depth = 16;
        let pts = sample_balanced(&s, depth, 100, 2).unwrap().points;
        let shifted: Vec<CantorPoint> = pts.iter().map(|p| point_of(&s, &p.code.shift(), depth - 1).unwrap()).collect();
        let target = [c(-3.0, 0.2)];
        let a = continue_motion(&q, &s, &pts, &target, 20).unwrap();
        let b = continue_motion(&q, &s, &shifted, &target, 20).unwrap();
        let map = q.at(&target).unwrap();
        for (z, w) in a.last().points.iter().zip(&b.last().points) {
            assert!((map.iterate(z.unwrap(), 1) - w.unwrap()).norm() < 1e-8);
        }
    }

    #[test]
    fn motion_stays_injective() {
        let (q, s) = setup();
        let pts = sample_balanced(&s, 14, 50, 9).unwrap().points;
        let m = continue_motion(&q, &s, &pts, &[c(-3.0, 0.2)], 20).unwrap();
        let min_dist = |zs: &[Option<Complex64>]| {
            let zs: Vec<Complex64> = zs.iter().map(|z| z.unwrap()).collect();
            let mut best = f64::INFINITY;
            for i in 0..zs.len() {
                for j in i + 1..zs.len() {
                    if pts[i].code != pts[j].code {
                        best = best.min((zs[i] - zs[j]).norm());
                    }
                }
            }
            best
        };
        let initial = min_dist(&m.path[0].points);
        for step in &m.path {
            assert!(min_dist(&step.points) >= 0.1 * initial);
        }
    }

    #[test]
    fn breakdown_is_partial() {
        let (q, s) = setup();
        let pts = sample_balanced(&s, 8, 5, 4).unwrap().points;
        // c = -1 lies in the connectedness locus; the Cantor set cannot survive
        let m = continue_motion(&q, &s, &pts, &[c(-1.0, 0.0)], 40).unwrap();
        assert!(!m.complete());
        // the contraction bound passes 1 between -2.9 and -2.85
        assert_eq!(m.path.len(), 3, "{:?}", m.breakdown);
        assert_eq!(m.system.map.lambda()[0], c(-2.9, 0.0));
        assert!(continue_motion(&q, &s, &pts, &[c(-1.0, 0.0)], 0).is_err());
    }
}
