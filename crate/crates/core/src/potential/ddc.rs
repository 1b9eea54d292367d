use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, ScalarField};
use crate::calculus::Region;
use crate::error::{precondition, Error, Result};
use crate::io::{fmt_g17, CsvWriter};

/// Largest clamped fraction of the total mass a run may tolerate.
pub const MAX_CLAMPED_FRACTION: f64 = 0.05;

/// Discrete masses per grid cell.
///
/// `raw` keeps the signed values of the stencil; [`DensityField::mass`]
/// clamps negative values to zero. Cells too close to the grid boundary
/// for the stencil carry no mass and are flagged in `interior`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub grid: GridSpec,
    pub raw: Vec<f64>,
    pub interior: Vec<bool>,
}

impl DensityField {
    pub fn new(grid: GridSpec, raw: Vec<f64>, interior: Vec<bool>) -> Self {
        Self { grid, raw, interior }
    }

    pub fn mass(&self, i: usize) -> f64 {
        self.raw[i].max(0.0)
    }

    /// Total of clamped masses.
    pub fn total(&self) -> f64 {
        self.raw.iter().map(|m| m.max(0.0)).sum()
    }

    /// Total of signed masses.
    pub fn raw_total(&self) -> f64 {
        self.raw.iter().sum()
    }

    /// Mass removed by clamping negative cells.
    pub fn clamped_total(&self) -> f64 {
        self.raw.iter().map(|m| (-m).max(0.0)).sum()
    }

    pub fn clamped_fraction(&self) -> f64 {
        let total = self.total();
        if total > 0.0 {
            self.clamped_total() / total
        } else if self.clamped_total() > 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    /// Fails when clamping removed more than the allowed share of mass.
    pub fn check_clamping(&self, max_fraction: f64) -> Result<()> {
        let fraction = self.clamped_fraction();
        if fraction > max_fraction {
            return Err(Error::ExcessClamping {
                clamped: self.clamped_total(),
                total: self.total(),
                fraction,
            });
        }
        Ok(())
    }

    pub fn boundary_cells(&self) -> usize {
        self.interior.iter().filter(|&&i| !i).count()
    }

    /// Cell centre of index `i` (varying coordinates only).
    pub fn centre(&self, i: usize) -> smallvec::SmallVec<[Complex64; 2]> {
        self.grid.varying_at(&self.grid.unravel(i))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = CsvWriter::new(out);
        w.comment("density field (clamped cell masses; boundary cells are 0)")?;
        w.comment(&format!("axes: {}", self.grid.describe()))?;
        let steps: Vec<String> = (0..self.grid.real_dim()).map(|a| fmt_g17(self.grid.step(a))).collect();
        w.comment(&format!("h: {}", steps.join(" ")))?;
        w.comment(&format!("total: {}", fmt_g17(self.total())))?;
        w.comment(&format!("clamped: {}", fmt_g17(self.clamped_total())))?;
        w.comment(&format!("boundary cells: {}", self.boundary_cells()))?;
        let masses: Vec<f64> = (0..self.raw.len()).map(|i| self.mass(i)).collect();
        for row in masses.chunks(self.grid.res[0]) {
            w.numbers(row)?;
        }
        w.into_inner()?;
        Ok(())
    }

    pub fn write_pgm<W: Write>(&self, out: W) -> Result<()> {
        let masses: Vec<f64> = (0..self.raw.len()).map(|i| self.mass(i)).collect();
        super::write_plane_pgm(&self.grid, &masses, out)
    }
}

/// Five-point `dd^c` of a field over one complex coordinate. The cell mass
/// is the integral of `Δu / 2π` over the cell,
/// `[(u_E + u_W - 2u) h_y/h_x + (u_N + u_S - 2u) h_x/h_y] / 2π`,
/// which reduces to `(u_E + u_W + u_N + u_S - 4u) / 2π` on square cells.
pub fn ddc_mass(field: &ScalarField) -> Result<DensityField> {
    let grid = &field.grid;
    if grid.real_dim() != 2 {
        return Err(precondition("ddc_mass needs a grid over one complex coordinate"));
    }
    let (nx, ny) = (grid.res[0], grid.res[1]);
    let (hx, hy) = (grid.step(0), grid.step(1));
    let (wx, wy) = (hy / hx / (2.0 * PI), hx / hy / (2.0 * PI));
    let u = &field.values;
    let mut raw = vec![0.0; u.len()];
    let mut interior = vec![false; u.len()];
    for j in 1..ny - 1 {
        for i in 1..nx - 1 {
            let k = j * nx + i;
            let c = 2.0 * u[k];
            raw[k] = wx * (u[k + 1] + u[k - 1] - c) + wy * (u[k + nx] + u[k - nx] - c);
            interior[k] = true;
        }
    }
    Ok(DensityField::new(grid.clone(), raw, interior))
}

/// Clamped mass of the cells whose centres lie in the product of `regions`
/// (one region per varying coordinate).
pub fn box_mass(density: &DensityField, regions: &[Region]) -> Result<f64> {
    let grid = &density.grid;
    if regions.len() != grid.axes.len() {
        return Err(precondition("need one region per varying coordinate"));
    }
    for (k, region) in regions.iter().enumerate() {
        if let Region::Rect(r) = region {
            let b = &grid.bounds[k];
            let inside = r.re0 >= b.re0 && r.re1 <= b.re1 && r.im0 >= b.im0 && r.im1 <= b.im1;
            if !inside {
                return Err(precondition("box extends beyond the grid bounds"));
            }
        }
    }
    Ok((0..density.raw.len())
        .filter(|&i| regions.iter().zip(density.centre(i)).all(|(r, z)| r.contains(z)))
        .map(|i| density.mass(i))
        .sum())
}
