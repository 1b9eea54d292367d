//! Low-discrepancy seed points (Halton sequences).

use num_complex::Complex64;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `index` in the given base.
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while index > 0 {
        r += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    r
}

/// `index`-th Halton point in `[0,1)^dim`; `index` starts at 1 so the
/// origin is skipped.
pub fn halton(index: u64, dim: usize) -> Vec<f64> {
    assert!(dim <= PRIMES.len(), "halton dimension too large");
    (0..dim).map(|k| radical_inverse(index, PRIMES[k])).collect()
}

/// Halton point mapped into the polydisk of the given radius around
/// `center` (each complex coordinate uniform in its disk).
pub fn halton_in_polydisk(index: u64, center: &[Complex64], radius: f64) -> Vec<Complex64> {
    let u = halton(index, 2 * center.len());
    center
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let r = radius * u[2 * k].sqrt();
            let theta = std::f64::consts::TAU * u[2 * k + 1];
            c + Complex64::from_polar(r, theta)
        })
        .collect()
}
