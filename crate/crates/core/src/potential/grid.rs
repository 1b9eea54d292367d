use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::calculus::Rect;
use crate::error::{precondition, Result};

pub type Index = SmallVec<[usize; 4]>;

/// Cell-centred sampling grid on a slice of parameter space.
///
/// One or two complex coordinates (`axes`) vary over rectangles; all other
/// coordinates keep their value in `base`. Real axes are ordered
/// `re_0, im_0, re_1, im_1` and flattened with `re_0` fastest. Sample `i`
/// along a real axis sits at `min + (i + 1/2) h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub base: Vec<Complex64>,
    pub axes: Vec<usize>,
    pub bounds: Vec<Rect>,
    /// Samples per real axis.
    pub res: Vec<usize>,
}

pub const MIN_RESOLUTION: usize = 8;

impl GridSpec {
    pub fn new(base: Vec<Complex64>, axes: Vec<usize>, bounds: Vec<Rect>, res: Vec<usize>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(precondition("a grid varies one or two complex coordinates"));
        }
        if bounds.len() != axes.len() || res.len() != 2 * axes.len() {
            return Err(precondition("need one rectangle per varying coordinate and a resolution per real axis"));
        }
        if axes.iter().any(|&a| a >= base.len()) || (axes.len() == 2 && axes[0] == axes[1]) {
            return Err(precondition("varying coordinates must be distinct parameter indices"));
        }
        if res.iter().any(|&r| r < MIN_RESOLUTION) {
            return Err(precondition(format!("resolution must be at least {MIN_RESOLUTION} per axis")));
        }
        if bounds.iter().any(Rect::is_degenerate) {
            return Err(precondition("grid bounds are degenerate"));
        }
        Ok(Self { base, axes, bounds, res })
    }

    /// Whole parameter plane of a one-parameter family.
    pub fn plane(bounds: Rect, res_re: usize, res_im: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0)], vec![0], vec![bounds], vec![res_re, res_im])
    }

    /// Both coordinates of a two-parameter family, same resolution on all
    /// four real axes.
    pub fn product(b0: Rect, b1: Rect, res: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); 2], vec![0, 1], vec![b0, b1], vec![res; 4])
    }

    pub fn real_dim(&self) -> usize {
        self.res.len()
    }

    pub fn len(&self) -> usize {
        self.res.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lo_hi(&self, axis: usize) -> (f64, f64) {
        let r = &self.bounds[axis / 2];
        if axis % 2 == 0 {
            (r.re0, r.re1)
        } else {
            (r.im0, r.im1)
        }
    }

    pub fn step(&self, axis: usize) -> f64 {
        let (lo, hi) = self.lo_hi(axis);
        (hi - lo) / self.res[axis] as f64
    }

    pub fn max_step(&self) -> f64 {
        (0..self.real_dim()).map(|a| self.step(a)).fold(0.0, f64::max)
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let (lo, _) = self.lo_hi(axis);
        lo + (i as f64 + 0.5) * self.step(axis)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.real_dim()).map(|a| self.step(a)).product()
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.res[..axis].iter().product()
    }

    pub fn unravel(&self, mut flat: usize) -> Index {
        let mut idx = Index::new();
        for &r in &self.res {
            idx.push(flat % r);
            flat /= r;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.res).rev().fold(0, |acc, (&i, &r)| acc * r + i)
    }

    /// Values of the varying coordinates at a multi-index.
    pub fn varying_at(&self, idx: &[usize]) -> SmallVec<[Complex64; 2]> {
        (0..self.axes.len())
            .map(|k| Complex64::new(self.coord(2 * k, idx[2 * k]), self.coord(2 * k + 1, idx[2 * k + 1])))
            .collect()
    }

    /// Full parameter point of sample `flat`.
    pub fn point(&self, flat: usize) -> Vec<Complex64> {
        let idx = self.unravel(flat);
        let mut lambda = self.base.clone();
        for (k, z) in self.varying_at(&idx).into_iter().enumerate() {
            lambda[self.axes[k]] = z;
        }
        lambda
    }

    /// Distance in cells from the nearest face of the grid.
    pub fn depth(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.res)
            .map(|(&i, &r)| i.min(r - 1 - i))
            .min()
            .unwrap_or(0)
    }

    /// Human-readable axis description for file headers.
    pub fn describe(&self) -> String {
        let names = ["re", "im"];
        (0..self.real_dim())
            .map(|a| {
                let (lo, hi) = self.lo_hi(a);
                format!(
                    "{}(lambda_{})=[{},{}]x{}",
                    names[a % 2],
                    self.axes[a / 2],
                    crate::io::fmt_g17(lo),
                    crate::io::fmt_g17(hi),
                    self.res[a]
                )
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ravel_round_trip_and_centres() {
        let g = GridSpec::product(Rect::new(-1.0, 1.0, -1.0, 1.0), Rect::new(0.0, 2.0, 0.0, 4.0), 8).unwrap();
        assert_eq!(g.len(), 8 * 8 * 8 * 8);
        for flat in [0, 1, 77, 4095] {
            assert_eq!(g.ravel(&g.unravel(flat)), flat);
        }
        assert_eq!(g.unravel(1).as_slice(), &[1, 0, 0, 0]);
        assert_eq!(g.coord(0, 0), -0.875);
        assert_eq!(g.step(3), 0.5);
        let p = g.point(g.ravel(&[0, 7, 3, 2]));
        assert_eq!(p, vec![Complex64::new(-0.875, 0.875), Complex64::new(0.875, 1.25)]);
    }

    #[test]
    fn rejects_coarse_or_degenerate_grids() {
        assert!(GridSpec::plane(Rect::new(0.0, 1.0, 0.0, 1.0), 4, 8).is_err());
        assert!(GridSpec::plane(Rect::new(1.0, 1.0, 0.0, 1.0), 8, 8).is_err());
        assert!(GridSpec::new(vec![Complex64::new(0.0, 0.0)], vec![1], vec![Rect::new(0.0, 1.0, 0.0, 1.0)], vec![8, 8]).is_err());
    }
}
