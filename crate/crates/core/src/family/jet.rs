use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use smallvec::SmallVec;

pub type Partials = SmallVec<[Complex64; 2]>;

/// A complex value together with its first derivatives with respect to
/// every parameter coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: Complex64,
    pub partials: Partials,
}

impl Jet {
    pub fn constant(value: Complex64, dim: usize) -> Self {
        Self {
            value,
            partials: SmallVec::from_elem(Complex64::new(0.0, 0.0), dim),
        }
    }

    /// The coordinate `λ_i` evaluated at `value`.
    pub fn variable(value: Complex64, i: usize, dim: usize) -> Self {
        let mut j = Self::constant(value, dim);
        j.partials[i] = Complex64::new(1.0, 0.0);
        j
    }

    pub fn new(value: Complex64, partials: impl IntoIterator<Item = Complex64>) -> Self {
        Self {
            value,
            partials: partials.into_iter().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.partials.len()
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.partials.iter().all(|p| p.is_finite())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            value: self.value * s,
            partials: self.partials.iter().map(|p| p * s).collect(),
        }
    }

    /// Chain rule for a holomorphic scalar function with value `f` and
    /// derivative `df` at `self.value`.
    pub fn apply(&self, f: Complex64, df: Complex64) -> Self {
        Self {
            value: f,
            partials: self.partials.iter().map(|p| p * df).collect(),
        }
    }

    pub fn powu(&self, n: u32) -> Self {
        if n == 0 {
            return Self::constant(Complex64::new(1.0, 0.0), self.dim());
        }
        let f = self.value.powu(n);
        let df = self.value.powu(n - 1) * n as f64;
        self.apply(f, df)
    }
}

impl Add for &Jet {
    type Output = Jet;

    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value + rhs.value,
            partials: self.partials.iter().zip(&rhs.partials).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;

    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value - rhs.value,
            partials: self.partials.iter().zip(&rhs.partials).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;

    fn neg(self) -> Jet {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul for &Jet {
    type Output = Jet;

    fn mul(self, rhs: &Jet) -> Jet {
        Jet {
            value: self.value * rhs.value,
            partials: self
                .partials
                .iter()
                .zip(&rhs.partials)
                .map(|(a, b)| a * rhs.value + self.value * b)
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// g(λ1, λ2) = (λ1 λ2 + 3)^3 - λ1 built from jet arithmetic.
    fn g_jet(l: [Complex64; 2]) -> Jet {
        let x = Jet::variable(l[0], 0, 2);
        let y = Jet::variable(l[1], 1, 2);
        let three = Jet::constant(c(3.0, 0.0), 2);
        let inner = &(&x * &y) + &three;
        &inner.powu(3) - &x
    }

    fn g(l: [Complex64; 2]) -> Complex64 {
        (l[0] * l[1] + 3.0).powu(3) - l[0]
    }

    proptest! {
        #[test]
        fn leibniz_and_chain_match_central_differences(
            a in -1.5f64..1.5, b in -1.5f64..1.5, e in -1.5f64..1.5, f in -1.5f64..1.5
        ) {
            let l = [c(a, b), c(e, f)];
            let jet = g_jet(l);
            prop_assert!((jet.value - g(l)).norm() <= 1e-12 * (1.0 + jet.value.norm()));
            let h = 1e-6;
            for i in 0..2 {
                let mut lp = l;
                let mut lm = l;
                lp[i] += h;
                lm[i] -= h;
                let fd = (g(lp) - g(lm)) / (2.0 * h);
                let scale = jet.partials[i].norm().max(1.0);
                prop_assert!((fd - jet.partials[i]).norm() <= 1e-5 * scale,
                    "i={} jet={} fd={}", i, jet.partials[i], fd);
            }
        }
    }
}
