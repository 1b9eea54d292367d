use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{DensityField, GridSpec, ScalarField};
use crate::error::{precondition, Error, Result};

/// Truncation of the Gaussian kernel, in standard deviations.
const KERNEL_WIDTH: f64 = 3.0;

fn kernel(sigma: f64, h: f64) -> Vec<f64> {
    let radius = (KERNEL_WIDTH * sigma / h).ceil() as isize;
    (-radius..=radius)
        .map(|k| {
            let x = k as f64 * h / sigma;
            (-0.5 * x * x).exp()
        })
        .collect()
}

fn kernel_radius(grid: &GridSpec, sigma: f64) -> usize {
    (0..grid.real_dim())
        .map(|a| (KERNEL_WIDTH * sigma / grid.step(a)).ceil() as usize)
        .max()
        .unwrap_or(0)
}

/// Separable Gaussian smoothing of width `sigma` (parameter units). Near
/// the boundary the truncated kernel is renormalised to unit weight.
pub fn smooth(grid: &GridSpec, values: &[f64], sigma: f64) -> Vec<f64> {
    let mut cur = values.to_vec();
    let mut next = vec![0.0; cur.len()];
    for axis in 0..grid.real_dim() {
        let k = kernel(sigma, grid.step(axis));
        let r = (k.len() / 2) as isize;
        let n = grid.res[axis] as isize;
        let stride = grid.stride(axis);
        let src = &cur;
        next.par_iter_mut().enumerate().for_each(|(flat, out)| {
            let i = ((flat / stride) % n as usize) as isize;
            let lo = (-r).max(-i);
            let hi = r.min(n - 1 - i);
            let (mut acc, mut wsum) = (0.0, 0.0);
            for off in lo..=hi {
                let w = k[(off + r) as usize];
                acc += w * src[(flat as isize + off * stride as isize) as usize];
                wsum += w;
            }
            *out = acc / wsum;
        });
        std::mem::swap(&mut cur, &mut next);
    }
    cur
}

/// Complex Hessian `(w_11̄, w_22̄, w_12̄)` by central differences at an
/// interior cell of a grid over two complex coordinates.
fn complex_hessian(grid: &GridSpec, w: &[f64], flat: usize) -> (f64, f64, Complex64) {
    let s: [usize; 4] = [grid.stride(0), grid.stride(1), grid.stride(2), grid.stride(3)];
    let h: [f64; 4] = [grid.step(0), grid.step(1), grid.step(2), grid.step(3)];
    let second = |a: usize| (w[flat + s[a]] + w[flat - s[a]] - 2.0 * w[flat]) / (h[a] * h[a]);
    let mixed = |a: usize, b: usize| {
        (w[flat + s[a] + s[b]] - w[flat + s[a] - s[b]] - w[flat - s[a] + s[b]] + w[flat - s[a] - s[b]])
            / (4.0 * h[a] * h[b])
    };
    let w11 = 0.25 * (second(0) + second(1));
    let w22 = 0.25 * (second(2) + second(3));
    let w12 = Complex64::new(0.25 * (mixed(0, 2) + mixed(1, 3)), 0.25 * (mixed(0, 3) - mixed(1, 2)));
    (w11, w22, w12)
}

/// Density of `dd^c u ∧ dd^c v` over two complex coordinates.
///
/// Both fields are smoothed at width `sigma`, and the mixed product comes
/// from polarisation `[(dd^c(u+v))^2 - (dd^c(u-v))^2] / 4` with
/// `(dd^c w)^2 = (8/π^2) det(w_jk̄) dV`. The constant makes
/// `dd^c log|λ1 - p| ∧ dd^c log|λ2 - q|` a unit mass. Cells within the
/// kernel radius plus one of the boundary carry no mass.
pub fn wedge_mass_2d(u: &ScalarField, v: &ScalarField, sigma: f64) -> Result<DensityField> {
    let grid = &u.grid;
    if *grid != v.grid {
        return Err(Error::Shape("wedge_mass_2d needs both fields on the same grid".into()));
    }
    if grid.real_dim() != 4 {
        return Err(Error::Shape("wedge_mass_2d needs a grid over two complex coordinates".into()));
    }
    if !(sigma >= 2.0 * grid.max_step()) {
        return Err(precondition(format!(
            "smoothing width {sigma} is below twice the grid step {}",
            grid.max_step()
        )));
    }
    let su = smooth(grid, &u.values, sigma);
    let sv = smooth(grid, &v.values, sigma);
    let margin = kernel_radius(grid, sigma) + 1;
    let scale = 8.0 / (PI * PI) * grid.cell_volume();
    let mut raw = vec![0.0; su.len()];
    let mut interior = vec![false; su.len()];
    raw.par_iter_mut()
        .zip(interior.par_iter_mut())
        .enumerate()
        .for_each(|(flat, (m, inside))| {
            if grid.depth(&grid.unravel(flat)) < margin {
                return;
            }
            *inside = true;
            let (a11, a22, a12) = complex_hessian(grid, &su, flat);
            let (b11, b22, b12) = complex_hessian(grid, &sv, flat);
            let det = |w11: f64, w22: f64, w12: Complex64| w11 * w22 - w12.norm_sqr();
            let plus = det(a11 + b11, a22 + b22, a12 + b12);
            let minus = det(a11 - b11, a22 - b22, a12 - b12);
            *m = 0.25 * scale * (plus - minus);
        });
    Ok(DensityField::new(grid.clone(), raw, interior))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::Rect;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(res: usize) -> GridSpec {
        GridSpec::product(Rect::new(-1.0, 1.0, -1.0, 1.0), Rect::new(-1.0, 1.0, -1.0, 1.0), res).unwrap()
    }

    #[test]
    fn smoothing_preserves_constants_and_linear_functions() {
        let g = GridSpec::plane(Rect::new(-1.0, 1.0, -1.0, 1.0), 16, 16).unwrap();
        let ones = vec![1.0; g.len()];
        assert!(smooth(&g, &ones, 0.3).iter().all(|v| (v - 1.0).abs() < 1e-14));
        let lin: Vec<f64> = (0..g.len()).map(|i| g.varying_at(&g.unravel(i))[0].re).collect();
        let s = smooth(&g, &lin, 0.2);
        let centre = g.ravel(&[8, 8]);
        assert!((s[centre] - lin[centre]).abs() < 1e-14);
    }

    #[test]
    fn product_of_point_masses_is_unit() {
        let g = grid(32);
        let (p, q) = (c(0.05, -0.02), c(-0.03, 0.04));
        let u = ScalarField::from_fn(g.clone(), |z| (z[0] - p).norm().ln());
        let v = ScalarField::from_fn(g.clone(), |z| (z[1] - q).norm().ln());
        let sigma = 2.0 * g.max_step();
        let d = wedge_mass_2d(&u, &v, sigma).unwrap();
        assert!((d.raw_total() - 1.0).abs() <= 0.05, "total {}", d.raw_total());
        let near: f64 = (0..d.raw.len())
            .filter(|&i| {
                let z = d.centre(i);
                (z[0] - p).norm() <= 4.0 * sigma && (z[1] - q).norm() <= 4.0 * sigma
            })
            .map(|i| d.raw[i])
            .sum();
        assert!(near >= 0.95 * d.raw_total());
    }

    #[test]
    fn harmonic_fields_give_nothing() {
        let g = grid(16);
        let u = ScalarField::from_fn(g.clone(), |z| (z[0] * z[1]).re + z[0].re);
        let v = ScalarField::from_fn(g.clone(), |z| (z[0] * z[0] - z[1]).im);
        let d = wedge_mass_2d(&u, &v, 2.0 * g.max_step()).unwrap();
        assert!(d.raw.iter().map(|m| m.abs()).sum::<f64>() <= 1e-6);
    }

    #[test]
    fn symmetric_in_its_arguments() {
        let g = grid(16);
        let u = ScalarField::from_fn(g.clone(), |z| (z[0] + z[1] * 0.5).norm().ln().max(-2.0));
        let v = ScalarField::from_fn(g.clone(), |z| (z[0] - z[1] + 0.3).norm().max(0.2).ln());
        let sigma = 2.5 * g.max_step();
        let a = wedge_mass_2d(&u, &v, sigma).unwrap();
        let b = wedge_mass_2d(&v, &u, sigma).unwrap();
        for (x, y) in a.raw.iter().zip(&b.raw) {
            assert!((x - y).abs() <= 1e-10);
        }
    }

    #[test]
    fn preconditions() {
        let g = grid(16);
        let u = ScalarField::from_fn(g.clone(), |z| z[0].re);
        assert!(wedge_mass_2d(&u, &u, g.max_step()).is_err());
        let other = ScalarField::from_fn(grid(8), |z| z[0].re);
        assert!(matches!(wedge_mass_2d(&u, &other, 1.0), Err(Error::Shape(_))));
    }
}
