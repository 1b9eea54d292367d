use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Axis-aligned rectangle in the complex plane, `[re0, re1] × [im0, im1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re0: f64,
    pub re1: f64,
    pub im0: f64,
    pub im1: f64,
}

impl Rect {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Self {
        Self { re0, re1, im0, im1 }
    }

    pub fn square(center: Complex64, half_width: f64) -> Self {
        Self::new(
            center.re - half_width,
            center.re + half_width,
            center.im - half_width,
            center.im + half_width,
        )
    }

    pub fn width(&self) -> f64 {
        self.re1 - self.re0
    }

    pub fn height(&self) -> f64 {
        self.im1 - self.im0
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.re1 > self.re0 && self.im1 > self.im0)
            || !(self.re0.is_finite() && self.re1.is_finite() && self.im0.is_finite() && self.im1.is_finite())
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.re0 && z.re <= self.re1 && z.im >= self.im0 && z.im <= self.im1
    }
}

/// Region used to integrate masses and filter solutions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Region {
    Rect(Rect),
    Disk { center: Complex64, radius: f64 },
    /// Everything.
    Plane,
}

impl Region {
    pub fn disk(center: Complex64, radius: f64) -> Self {
        Region::Disk { center, radius }
    }

    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            Region::Rect(r) => r.contains(z),
            Region::Disk { center, radius } => (z - center).norm() <= *radius,
            Region::Plane => true,
        }
    }
}

/// Product of rectangles, one per complex coordinate, viewed as a box in
/// `R^(2k)` with real axes ordered `re_0, im_0, re_1, im_1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductBox {
    pub factors: Vec<Rect>,
}

impl ProductBox {
    pub fn new(factors: Vec<Rect>) -> Self {
        Self { factors }
    }

    pub fn real_dim(&self) -> usize {
        2 * self.factors.len()
    }

    fn lo_hi(&self, axis: usize) -> (f64, f64) {
        let r = &self.factors[axis / 2];
        if axis % 2 == 0 {
            (r.re0, r.re1)
        } else {
            (r.im0, r.im1)
        }
    }

    pub fn contains(&self, point: &[Complex64]) -> bool {
        point.len() == self.factors.len() && self.factors.iter().zip(point).all(|(r, z)| r.contains(*z))
    }

    /// Index of the level-`level` dyadic sub-box containing `point`, with a
    /// half-open convention except on the upper faces of the whole box.
    /// `None` if the point is outside.
    pub fn dyadic_index(&self, point: &[Complex64], level: u32) -> Option<usize> {
        if !self.contains(point) {
            return None;
        }
        let cells = 1usize << level;
        let mut index = 0usize;
        for axis in (0..self.real_dim()).rev() {
            let (lo, hi) = self.lo_hi(axis);
            let z = point[axis / 2];
            let x = if axis % 2 == 0 { z.re } else { z.im };
            let t = ((x - lo) / (hi - lo) * cells as f64).floor();
            let k = (t.max(0.0) as usize).min(cells - 1);
            index = index * cells + k;
        }
        Some(index)
    }

    pub fn dyadic_count(&self, level: u32) -> usize {
        1usize << (level as usize * self.real_dim())
    }
}
