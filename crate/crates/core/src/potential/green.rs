use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::family::MapInstance;

/// Modulus beyond which orbits are followed through `log|z|` only.
const LOG_DOMAIN: f64 = 1e100;

/// Hard cap on iterations regardless of the tolerance.
const MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreenValue {
    pub value: f64,
    pub n_used: usize,
    /// Proven bound on `|value - G(z)|`.
    pub error_bound: f64,
    /// The orbit stayed inside the escape radius for all `n_used` steps.
    pub possibly_bounded: bool,
}

/// Escape-rate Green function `G(z) = lim d^-n log|f^n(z)|` to absolute
/// accuracy `tol`.
///
/// With `f(z) = a z^d (1 + e(z))` and `S = Σ_{i<d} |a_i|/|a|`, every
/// `|z| ≥ R` has `|e(z)| ≤ S/|z| < 1/2`, so after escape at step `n`
///
/// `G(z) = d^-n (log|z_n| + log|a|/(d-1)) ± d^-n 2S / ((d-1)|z_n|)`.
///
/// An orbit still inside the disk of radius `R` after `N` steps has
/// `0 ≤ G(z) ≤ d^-N (log R + (log⁺|a| + log 1.5)/(d-1))`; `N` is chosen so
/// that this is below `tol`, which makes the reported zero `tol`-accurate.
pub fn green_at(map: &MapInstance, z: Complex64, tol: f64) -> Result<GreenValue> {
    if !(tol > 0.0) {
        return Err(precondition("tolerance must be positive"));
    }
    if !z.is_finite() {
        return Err(precondition("point is not finite"));
    }
    let d = map.degree() as f64;
    let r_esc = map.escape_radius();
    let s = map.lower_order_sum();
    let log_lead = map.leading().norm().ln() / (d - 1.0);
    let bounded_const = r_esc.ln() + (log_lead.max(0.0) + 1.5f64.ln() / (d - 1.0));
    let n_cap = ((bounded_const / tol).ln() / d.ln()).ceil().max(1.0) as usize;
    let n_cap = n_cap.min(MAX_ITER);

    let mut w = z;
    let mut scale = 1.0; // d^-n
    for n in 0..=n_cap {
        let modulus = w.norm();
        if modulus > r_esc {
            let tail = scale * 2.0 * s / ((d - 1.0) * modulus);
            if tail <= tol || modulus > LOG_DOMAIN {
                let value = scale * (modulus.ln() + log_lead);
                return Ok(GreenValue {
                    value: value.max(0.0),
                    n_used: n,
                    error_bound: tail,
                    possibly_bounded: false,
                });
            }
        }
        if n == n_cap {
            break;
        }
        w = map.eval(w);
        scale /= d;
    }
    Ok(GreenValue {
        value: 0.0,
        n_used: n_cap,
        error_bound: scale * bounded_const,
        possibly_bounded: true,
    })
}

/// The approximants `g_n = d^-n log⁺|f^n(z)|` for `n = 0..=n_max`, with
/// the orbit continued through `log|z|` once it is astronomically large.
pub fn green_sequence(map: &MapInstance, z: Complex64, n_max: usize) -> Vec<f64> {
    let d = map.degree() as f64;
    let log_a = map.leading().norm().ln();
    let mut out = Vec::with_capacity(n_max + 1);
    let mut w = z;
    let mut log_w: Option<f64> = None;
    let mut scale = 1.0;
    for n in 0..=n_max {
        let lw = match log_w {
            Some(l) => l,
            None => w.norm().ln(),
        };
        out.push(scale * lw.max(0.0));
        if n == n_max {
            break;
        }
        match log_w {
            Some(l) => log_w = Some(log_a + d * l),
            None => {
                w = map.eval(w);
                if w.norm() > LOG_DOMAIN {
                    log_w = Some(w.norm().ln());
                }
            }
        }
        scale /= d;
    }
    out
}
