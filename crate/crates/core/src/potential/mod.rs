//! Green functions, activity potentials and discrete `dd^c` masses.
//!
//! `dd^c` is normalised so that `dd^c log|λ - λ0|` is a unit point mass;
//! all masses are in that unit.

pub mod ddc;
pub mod green;
pub mod grid;
pub mod wedge;

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::family::FamilySpec;
use crate::io::{fmt_g17, write_pgm16, AffineMap, CsvWriter};

pub use ddc::{box_mass, ddc_mass, DensityField};
pub use green::{green_at, green_sequence, GreenValue};
pub use grid::GridSpec;
pub use wedge::{smooth, wedge_mass_2d};

/// A potential sampled on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarField {
    pub grid: GridSpec,
    pub values: Vec<f64>,
    /// Per-sample bound on the error of `values`.
    pub errors: Vec<f64>,
    /// Iterates used per sample (zero for synthetic fields).
    pub n_used: Vec<u32>,
    pub possibly_bounded: Vec<bool>,
    pub tol: f64,
}

impl ScalarField {
    /// Samples an explicit function of the varying coordinates.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[num_complex::Complex64]) -> f64 + Sync) -> Self {
        let values: Vec<f64> = (0..grid.len())
            .into_par_iter()
            .map(|i| f(&grid.varying_at(&grid.unravel(i))))
            .collect();
        let n = values.len();
        Self {
            grid,
            values,
            errors: vec![0.0; n],
            n_used: vec![0; n],
            possibly_bounded: vec![false; n],
            tol: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_error(&self) -> f64 {
        self.errors.iter().copied().fold(0.0, f64::max)
    }

    /// Pointwise linear combination on the same grid.
    pub fn combine(&self, other: &Self, a: f64, b: f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(crate::Error::Shape("fields live on different grids".into()));
        }
        let mut out = self.clone();
        for (i, v) in out.values.iter_mut().enumerate() {
            *v = a * self.values[i] + b * other.values[i];
            out.errors[i] = a.abs() * self.errors[i] + b.abs() * other.errors[i];
        }
        Ok(out)
    }

    /// CSV: header comments, then one line per grid row (the fastest axis).
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = CsvWriter::new(out);
        w.comment("scalar field")?;
        w.comment(&format!("axes: {}", self.grid.describe()))?;
        let steps: Vec<String> = (0..self.grid.real_dim()).map(|a| fmt_g17(self.grid.step(a))).collect();
        w.comment(&format!("h: {}", steps.join(" ")))?;
        let n_max = self.n_used.iter().copied().max().unwrap_or(0);
        w.comment(&format!("n: max {n_max}"))?;
        w.comment(&format!("tol: {}", fmt_g17(self.tol)))?;
        w.comment(&format!(
            "possibly bounded samples: {}",
            self.possibly_bounded.iter().filter(|&&b| b).count()
        ))?;
        for row in self.values.chunks(self.grid.res[0]) {
            w.numbers(row)?;
        }
        w.into_inner()?;
        Ok(())
    }

    /// 16-bit PGM of a one-coordinate field, top row at maximal imaginary part.
    pub fn write_pgm<W: Write>(&self, out: W) -> Result<()> {
        write_plane_pgm(&self.grid, &self.values, out)
    }
}

pub(crate) fn write_plane_pgm<W: Write>(grid: &GridSpec, values: &[f64], out: W) -> Result<()> {
    if grid.real_dim() != 2 {
        return Err(precondition("PGM output needs a grid over one complex coordinate"));
    }
    let (w, h) = (grid.res[0], grid.res[1]);
    let rows: Vec<Vec<f64>> = (0..h).rev().map(|j| values[j * w..(j + 1) * w].to_vec()).collect();
    write_pgm16(out, w, &rows, AffineMap::fit(values))
}

/// `u_j(λ) = G_λ(c_j(λ))` on every grid sample.
pub fn activity_potential_grid(family: &FamilySpec, grid: &GridSpec, j: usize, tol: f64) -> Result<ScalarField> {
    if grid.base.len() != family.dim() {
        return Err(precondition(format!(
            "grid has {} parameter coordinates, family {} has {}",
            grid.base.len(),
            family.name(),
            family.dim()
        )));
    }
    if j >= family.n_critical() {
        return Err(precondition(format!("critical index {j} out of range")));
    }
    if !(tol > 0.0) {
        return Err(precondition("tolerance must be positive"));
    }
    let samples: Vec<GreenValue> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let map = family.at(&grid.point(i))?;
            green_at(&map, map.critical_points()[j], tol)
        })
        .collect::<Result<_>>()?;
    Ok(ScalarField {
        grid: grid.clone(),
        values: samples.iter().map(|s| s.value).collect(),
        errors: samples.iter().map(|s| s.error_bound).collect(),
        n_used: samples.iter().map(|s| s.n_used as u32).collect(),
        possibly_bounded: samples.iter().map(|s| s.possibly_bounded).collect(),
        tol,
    })
}
