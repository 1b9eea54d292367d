//! Simultaneous root finding by the Aberth–Ehrlich iteration.
//!
//! The iteration only needs the Newton correction `p(z)/p'(z)` and the
//! degree, so polynomials that are far better evaluated by a recurrence
//! than by their monomial coefficients (iterates of a map, in particular)
//! plug in through [`NewtonRatio`].
//!
//! Multiplicities are detected after convergence: every approximation `z`
//! carries the inclusion disk of radius `deg · |p(z)/p'(z)|`, which always
//! contains a root, and approximations whose disks overlap are merged into
//! one cluster. The cluster centroid is reported as the root. An `m`-fold
//! root is only resolved to about `eps^(1/m)` by each approximation, but the
//! centroid of the `m` approximations is accurate to near machine precision.

use num_complex::Complex64;
use rayon::prelude::*;

/// Newton correction of a polynomial at a point.
#[derive(Debug, Clone, Copy)]
pub struct NewtonCorrection {
    /// `p(z) / p'(z)`.
    pub ratio: Complex64,
    /// `|p(z)|`, or infinity when the value is only known through its
    /// logarithmic derivative.
    pub residual: f64,
    /// Bound on the rounding error of the computed `p(z)`.
    pub noise: f64,
    /// `|p'(z)|` (infinite in the logarithmic regime).
    pub slope: f64,
}

impl NewtonCorrection {
    /// True when `|p(z)|` is indistinguishable from zero.
    pub fn in_noise(&self) -> bool {
        self.residual <= NOISE_FACTOR * self.noise
    }

    /// Radius of a disk around `z` containing a zero of every polynomial
    /// within the rounding error of `p`, for degree `n`.
    pub fn inclusion_radius(&self, n: usize) -> f64 {
        if self.residual.is_finite() && self.slope > 0.0 {
            n as f64 * (self.residual + self.noise) / self.slope
        } else {
            n as f64 * self.ratio.norm()
        }
    }
}

const NOISE_FACTOR: f64 = 4.0;

/// `a / b` without the intermediate overflow of `|b|^2`.
pub fn ratio(a: Complex64, b: Complex64) -> Complex64 {
    let s = b.re.abs().max(b.im.abs());
    if s == 0.0 || !s.is_finite() {
        return a / b;
    }
    (a / s) / (b / s)
}

/// Rounding error bound of Horner's scheme with `len` coefficients where
/// `magnitude = Σ |a_k| |z|^k`.
pub fn horner_noise(len: usize, magnitude: f64) -> f64 {
    2.0 * len as f64 * f64::EPSILON * magnitude
}

/// Anything the simultaneous iteration can solve.
pub trait NewtonRatio: Sync {
    fn degree(&self) -> usize;
    fn correction(&self, z: Complex64) -> NewtonCorrection;
}

#[derive(Debug, Clone)]
pub struct RootConfig {
    /// Relative step size below which an approximation is frozen.
    pub tol: f64,
    pub max_iter: usize,
    /// Initial circle. `None` lets [`all_roots_dense`] pick it from the
    /// coefficients; recurrence-based evaluators must provide it.
    pub start: Option<(Complex64, f64)>,
    pub polish_steps: usize,
}

impl Default for RootConfig {
    fn default() -> Self {
        Self {
            tol: 1e-14,
            max_iter: 2000,
            start: None,
            polish_steps: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Radius of a disk around `value` known to contain `multiplicity` roots
    /// (heuristically for clusters).
    pub radius: f64,
}

#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Root>,
    /// False when some isolated approximation did not settle within the
    /// iteration cap; the result is then partial.
    pub converged: bool,
    pub iterations: usize,
}

impl RootSet {
    pub fn count_with_multiplicity(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Root values repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat(r.value).take(r.multiplicity))
            .collect()
    }
}

/// Roots of a dense polynomial, choosing the initial circle from the
/// coefficients when the configuration does not fix one.
pub fn all_roots_dense(p: &super::DensePolynomial, config: &RootConfig) -> RootSet {
    let mut config = config.clone();
    if config.start.is_none() {
        config.start = Some(dense_start(p));
    }
    all_roots(p, &config)
}

fn dense_start(p: &super::DensePolynomial) -> (Complex64, f64) {
    let c = p.coeffs();
    let n = c.len() - 1;
    if n == 0 {
        return (Complex64::new(0.0, 0.0), 1.0);
    }
    let lead = c[n];
    let centroid = -c[n - 1] / (lead * n as f64);
    // Fujiwara bound on the root moduli.
    let mut bound: f64 = 0.0;
    for k in 1..=n {
        let mut r = (c[n - k] / lead).norm().powf(1.0 / k as f64);
        if k == n {
            r *= 0.5f64.powf(1.0 / n as f64);
        }
        bound = bound.max(2.0 * r);
    }
    let radius = bound + centroid.norm();
    (centroid, radius.max(1e-3))
}

/// Aberth–Ehrlich iteration from a perturbed circle, followed by inclusion
/// disk clustering and Newton polishing of isolated roots.
pub fn all_roots<P: NewtonRatio + ?Sized>(p: &P, config: &RootConfig) -> RootSet {
    let n = p.degree();
    if n == 0 {
        return RootSet {
            roots: Vec::new(),
            converged: true,
            iterations: 0,
        };
    }
    let (center, radius) = config
        .start
        .expect("recurrence-evaluated polynomials need an explicit start circle");
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(radius, theta)
        })
        .collect();
    let mut active = vec![true; n];
    let mut iterations = 0;

    for iter in 0..config.max_iter {
        iterations = iter + 1;
        let snapshot = &z;
        let steps: Vec<Option<(Complex64, bool)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                if !active[i] {
                    return None;
                }
                Some(aberth_step(p, snapshot, i))
            })
            .collect();
        for (i, step) in steps.into_iter().enumerate() {
            let Some((w, noisy)) = step else { continue };
            z[i] -= w;
            let rel = w.norm() / z[i].norm().max(1.0);
            if noisy || rel <= config.tol {
                active[i] = false;
            }
        }
        if active.iter().all(|&a| !a) {
            break;
        }
    }

    let corrections: Vec<NewtonCorrection> = z.par_iter().map(|&zi| p.correction(zi)).collect();
    let radii: Vec<f64> = corrections
        .iter()
        .zip(&z)
        .map(|(c, zi)| {
            let r = c.inclusion_radius(n);
            if r.is_finite() {
                r.max(4.0 * f64::EPSILON * zi.norm())
            } else {
                0.0
            }
        })
        .collect();
    let clusters = cluster_by_inclusion(&z, &radii);

    let mut converged = true;
    let mut roots = Vec::with_capacity(clusters.len());
    for members in clusters {
        if members.len() == 1 {
            let i = members[0];
            let (value, ok) = polish(p, z[i], config.polish_steps, config.tol);
            converged &= ok;
            let radius = p.correction(value).inclusion_radius(n);
            roots.push(Root {
                value,
                multiplicity: 1,
                radius: if radius.is_finite() { radius } else { radii[i] },
            });
        } else {
            let m = members.len() as f64;
            let value = members.iter().map(|&i| z[i]).sum::<Complex64>() / m;
            let spread = members
                .iter()
                .map(|&i| (z[i] - value).norm())
                .fold(0.0, f64::max);
            // An m-fold root is resolved to roughly eps^(1/m); anything much
            // wider is a set of unconverged approximations.
            converged &= spread <= 1e-2 * value.norm().max(1.0);
            roots.push(Root {
                value,
                multiplicity: members.len(),
                radius: spread,
            });
        }
    }
    roots.sort_by(|a, b| {
        (a.value.re, a.value.im)
            .partial_cmp(&(b.value.re, b.value.im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    RootSet {
        roots,
        converged,
        iterations,
    }
}

/// Aberth correction for approximation `i`, flagged when `p(z_i)` is
/// already at rounding level.
fn aberth_step<P: NewtonRatio + ?Sized>(p: &P, z: &[Complex64], i: usize) -> (Complex64, bool) {
    let zi = z[i];
    let nc = p.correction(zi);
    if nc.in_noise() {
        return (Complex64::new(0.0, 0.0), true);
    }
    let ratio = nc.ratio;
    if !ratio.is_finite() {
        // p' vanished away from a root; nudge off the critical point.
        return (Complex64::new(1e-8 * zi.norm().max(1.0), 1e-8), false);
    }
    let (mut sr, mut si) = (0.0, 0.0);
    for (j, &zj) in z.iter().enumerate() {
        if j == i {
            continue;
        }
        let dx = zi.re - zj.re;
        let dy = zi.im - zj.im;
        let d2 = dx * dx + dy * dy;
        if d2 > 0.0 {
            let inv = 1.0 / d2;
            sr += dx * inv;
            si -= dy * inv;
        }
    }
    let s = Complex64::new(sr, si);
    let denom = Complex64::new(1.0, 0.0) - ratio * s;
    let w = ratio / denom;
    (if w.is_finite() { w } else { ratio }, false)
}

fn polish<P: NewtonRatio + ?Sized>(p: &P, mut z: Complex64, steps: usize, tol: f64) -> (Complex64, bool) {
    let mut last = p.correction(z);
    for _ in 0..steps {
        if last.residual == 0.0 || !last.ratio.is_finite() {
            break;
        }
        let candidate = z - last.ratio;
        let next = p.correction(candidate);
        if !(next.ratio.norm() < last.ratio.norm()) {
            break;
        }
        z = candidate;
        last = next;
        if last.ratio.norm() <= f64::EPSILON * z.norm().max(1.0) {
            break;
        }
    }
    let ok = last.in_noise()
        || (last.ratio.is_finite() && last.ratio.norm() <= 1e3 * tol.max(f64::EPSILON) * z.norm().max(1.0));
    (z, ok)
}

/// Union-find over pairs whose inclusion disks overlap.
fn cluster_by_inclusion(z: &[Complex64], radii: &[f64]) -> Vec<Vec<usize>> {
    let n = z.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    // Sort by real part so that only nearby candidates are compared.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| z[a].re.partial_cmp(&z[b].re).unwrap_or(std::cmp::Ordering::Equal));
    let max_r = radii.iter().copied().fold(0.0, f64::max);
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[pos + 1..] {
            if z[j].re - z[i].re > radii[i] + max_r {
                break;
            }
            if (z[i] - z[j]).norm() <= radii[i] + radii[j] {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}
