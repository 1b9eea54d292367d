use std::io::Write;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::BranchSystem;
use crate::calculus::rng::substream;
use crate::error::{precondition, Error, Result};
use crate::io::{complex_fields, fmt_g17, CsvWriter};

/// A one-sided code over `{1, 2}`: a finite prefix, or the infinite
/// repetition of `symbols` when `periodic`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Itinerary {
    pub symbols: Vec<u8>,
    pub periodic: bool,
}

impl Itinerary {
    pub fn finite(symbols: Vec<u8>) -> Self {
        Self { symbols, periodic: false }
    }

    pub fn periodic(block: Vec<u8>) -> Self {
        Self {
            symbols: block,
            periodic: true,
        }
    }

    /// Symbol `k`, or `None` past the end of a finite code.
    pub fn symbol(&self, k: usize) -> Option<u8> {
        if self.periodic {
            self.symbols.get(k % self.symbols.len()).copied()
        } else {
            self.symbols.get(k).copied()
        }
    }

    pub fn prefix(&self, depth: usize) -> Vec<u8> {
        (0..depth).filter_map(|k| self.symbol(k)).collect()
    }

    /// The code with its first symbol removed.
    pub fn shift(&self) -> Self {
        if self.periodic {
            let mut s = self.symbols.clone();
            s.rotate_left(1);
            Self::periodic(s)
        } else {
            Self::finite(self.symbols[1.min(self.symbols.len())..].to_vec())
        }
    }

    fn validate(&self) -> Result<()> {
        if self.symbols.iter().any(|&s| s != 1 && s != 2) {
            return Err(precondition("itinerary symbols must be 1 or 2"));
        }
        if self.periodic && self.symbols.is_empty() {
            return Err(precondition("periodic itinerary needs a non-empty block"));
        }
        Ok(())
    }
}

pub fn code_string(symbols: &[u8]) -> String {
    symbols.iter().map(|s| char::from(b'0' + s)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CantorPoint {
    pub code: Itinerary,
    pub point: Complex64,
    pub depth: usize,
    /// `κ^depth · diam(B)`.
    pub residual_bound: f64,
}

/// `g_{s_0} ∘ … ∘ g_{s_{depth-1}}` applied to the ball centre; periodic codes
/// are then polished to a true periodic point of `f^{mq}`.
pub fn point_of(system: &BranchSystem, code: &Itinerary, depth: usize) -> Result<CantorPoint> {
    code.validate()?;
    if !code.periodic && depth > code.symbols.len() {
        return Err(precondition("depth exceeds the length of a finite code"));
    }
    let mut z = system.center;
    for k in (0..depth).rev() {
        z = system.invert(code.symbol(k).expect("within code"), z)?;
    }
    let residual_bound = system.kappa.powi(depth as i32) * system.diameter();
    if code.periodic {
        let period = system.m * code.symbols.len();
        let polished = polish_periodic(system, z, period)
            .filter(|p| (p - z).norm() <= residual_bound + 1e-10)
            .ok_or_else(|| Error::InternalConsistency(format!("periodic point of code {} did not polish", code_string(&code.symbols))))?;
        z = polished;
    }
    Ok(CantorPoint {
        code: code.clone(),
        point: z,
        depth,
        residual_bound,
    })
}

pub(crate) fn polish_periodic(system: &BranchSystem, z0: Complex64, period: usize) -> Option<Complex64> {
    let mut z = z0;
    for _ in 0..50 {
        let (v, dv) = system.map.iterate_dz(z, period);
        let slope = dv - 1.0;
        if slope == Complex64::new(0.0, 0.0) || !v.is_finite() {
            return None;
        }
        let step = (v - z) / slope;
        z -= step;
        if step.norm() <= 1e-14 * z.norm().max(1.0) {
            return Some(z);
        }
    }
    None
}

/// Depth at which `κ^depth · diam(B)` falls below `target`.
pub fn depth_for(system: &BranchSystem, target: f64) -> usize {
    ((target / system.diameter()).ln() / system.kappa.ln()).ceil().max(1.0) as usize
}

/// Weighted points in `C^k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMeasure {
    pub points: Vec<Vec<Complex64>>,
    pub weights: Vec<f64>,
    pub total: f64,
}

impl PointMeasure {
    pub fn new(points: Vec<Vec<Complex64>>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(precondition("one weight per point"));
        }
        if weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(precondition("weights must be non-negative"));
        }
        let total = weights.iter().sum();
        Ok(Self { points, weights, total })
    }

    /// Equal weights `1/N`.
    pub fn uniform(points: Vec<Vec<Complex64>>) -> Self {
        let n = points.len();
        let weights = vec![1.0 / n as f64; n];
        Self::new(points, weights).expect("uniform weights are valid")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalancedSample {
    pub points: Vec<CantorPoint>,
    pub measure: PointMeasure,
}

impl BalancedSample {
    /// CSV with columns `code,re,im,weight`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = CsvWriter::new(out);
        w.comment("balanced measure sample")?;
        w.header(&["code", "re", "im", "weight"])?;
        for (p, weight) in self.points.iter().zip(&self.measure.weights) {
            let [re, im] = complex_fields(p.point);
            w.row(&[code_string(&p.code.symbols), re, im, fmt_g17(*weight)])?;
        }
        w.into_inner()?;
        Ok(())
    }
}

/// `n` independent uniform codes of length `depth`, mapped by [`point_of`],
/// each of weight `1/n`. Codes are drawn sequentially from the seeded stream.
pub fn sample_balanced(system: &BranchSystem, depth: usize, n: usize, seed: u64) -> Result<BalancedSample> {
    if n == 0 {
        return Err(precondition("need at least one sample"));
    }
    let mut rng = substream(seed, 0);
    let codes: Vec<Itinerary> = (0..n)
        .map(|_| Itinerary::finite((0..depth).map(|_| if rng.gen::<bool>() { 2 } else { 1 }).collect()))
        .collect();
    let points: Vec<CantorPoint> = codes
        .par_iter()
        .map(|code| point_of(system, code, depth))
        .collect::<Result<_>>()?;
    let measure = PointMeasure::uniform(points.iter().map(|p| vec![p.point]).collect());
    Ok(BalancedSample { points, measure })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub point: Complex64,
    pub code: Vec<u8>,
    pub multiplier: Complex64,
}

/// Words over `{1, 2}` of length `q` that are not powers of shorter words.
pub fn primitive_words(q: usize) -> Vec<Vec<u8>> {
    (0..1u64 << q)
        .map(|bits| (0..q).map(|k| if bits >> (q - 1 - k) & 1 == 1 { 2 } else { 1 }).collect::<Vec<u8>>())
        .filter(|w| (1..q).filter(|p| q % p == 0).all(|p| (p..q).any(|k| w[k] != w[k - p])))
        .collect()
}

/// Polished periodic points for every primitive code of period `≤ q_cap`
/// with the multiplier of `f^{mq}`.
pub fn repelling_targets(system: &BranchSystem, q_cap: usize) -> Result<Vec<Target>> {
    if q_cap == 0 || q_cap > 20 {
        return Err(precondition("period cap must lie in 1..=20"));
    }
    let depth_min = depth_for(system, 1e-6);
    let words: Vec<Vec<u8>> = (1..=q_cap).flat_map(primitive_words).collect();
    words
        .par_iter()
        .map(|w| {
            let q = w.len();
            let depth = q * depth_min.div_ceil(q);
            let p = point_of(system, &Itinerary::periodic(w.clone()), depth)?;
            let multiplier = system.map.iterate_dz(p.point, system.m * q).1;
            Ok(Target {
                point: p.point,
                code: w.clone(),
                multiplier,
            })
        })
        .collect()
}

/// CSV with columns `code,re,im,multiplier_re,multiplier_im,multiplier_abs`.
pub fn write_targets_csv<W: Write>(out: W, targets: &[Target]) -> Result<()> {
    let mut w = CsvWriter::new(out);
    w.comment("repelling periodic points of the branch system")?;
    w.header(&["code", "re", "im", "multiplier_re", "multiplier_im", "multiplier_abs"])?;
    for t in targets {
        let [re, im] = complex_fields(t.point);
        let [mre, mim] = complex_fields(t.multiplier);
        w.row(&[code_string(&t.code), re, im, mre, mim, fmt_g17(t.multiplier.norm())])?;
    }
    w.into_inner()?;
    Ok(())
}

/// Itinerary of `z` over `len` symbols, following `f^m` forward.
pub fn itinerary_of(system: &BranchSystem, z: Complex64, len: usize) -> Option<Vec<u8>> {
    let mut out = Vec::with_capacity(len);
    let mut w = z;
    for _ in 0..len {
        out.push(system.symbol_of(w)?);
        w = system.map.iterate(w, system.m);
    }
    Some(out)
}
