use num_complex::Complex64;

/// One monomial `coeff · λ_1^p_1 ⋯ λ_D^p_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub powers: Vec<u32>,
}

/// Polynomial map from parameter space `C^D` to `C`, stored as a list of
/// monomials. Only evaluation and formal differentiation are needed, so
/// there is no canonical ordering or term merging beyond construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

impl ParamPolynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        Self::from_terms(dim, vec![Term { coeff: c, powers: vec![0; dim] }])
    }

    /// The coordinate function `λ_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut powers = vec![0; dim];
        powers[i] = 1;
        Self::from_terms(dim, vec![Term { coeff: Complex64::new(1.0, 0.0), powers }])
    }

    pub fn monomial(dim: usize, coeff: Complex64, powers: Vec<u32>) -> Self {
        Self::from_terms(dim, vec![Term { coeff, powers }])
    }

    /// Builds from terms, merging equal exponents and dropping zeros.
    pub fn from_terms(dim: usize, terms: Vec<Term>) -> Self {
        let mut merged: Vec<Term> = Vec::new();
        for t in terms {
            assert_eq!(t.powers.len(), dim, "monomial arity must match the parameter dimension");
            match merged.iter_mut().find(|m| m.powers == t.powers) {
                Some(m) => m.coeff += t.coeff,
                None => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != Complex64::new(0.0, 0.0));
        Self { dim, terms: merged }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Some(c)` if the polynomial is the constant `c`.
    pub fn as_constant(&self) -> Option<Complex64> {
        match self.terms.as_slice() {
            [] => Some(Complex64::new(0.0, 0.0)),
            [t] if t.powers.iter().all(|&p| p == 0) => Some(t.coeff),
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.iter().map(|t| t.powers.iter().sum()).max()
    }

    /// Degree and leading coefficient of a univariate polynomial
    /// (`None` for the zero polynomial).
    pub fn univariate_leading(&self) -> Option<(u32, Complex64)> {
        assert_eq!(self.dim, 1, "univariate_leading needs a one-parameter polynomial");
        self.terms
            .iter()
            .max_by_key(|t| t.powers[0])
            .map(|t| (t.powers[0], t.coeff))
    }

    pub fn eval(&self, lambda: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| {
                t.powers
                    .iter()
                    .zip(lambda)
                    .fold(t.coeff, |acc, (&p, &x)| acc * x.powu(p))
            })
            .sum()
    }

    /// Formal partial derivative with respect to `λ_i`.
    pub fn partial(&self, i: usize) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.powers[i] > 0)
            .map(|t| {
                let mut powers = t.powers.clone();
                powers[i] -= 1;
                Term {
                    coeff: t.coeff * t.powers[i] as f64,
                    powers,
                }
            })
            .collect();
        Self::from_terms(self.dim, terms)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_terms(self.dim, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(Term {
                    coeff: a.coeff * b.coeff,
                    powers: a.powers.iter().zip(&b.powers).map(|(x, y)| x + y).collect(),
                });
            }
        }
        Self::from_terms(self.dim, terms)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_terms(
            self.dim,
            self.terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * s,
                    powers: t.powers.clone(),
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn eval_and_partial_of_cubic_coefficient() {
        // -3 a^2 in parameters (a, b)
        let a = ParamPolynomial::variable(2, 0);
        let p = a.mul(&a).scale(c(-3.0, 0.0));
        let lam = [c(1.0, 2.0), c(5.0, 0.0)];
        assert_eq!(p.eval(&lam), c(-3.0, 0.0) * lam[0] * lam[0]);
        let da = p.partial(0);
        assert_eq!(da.eval(&lam), c(-6.0, 0.0) * lam[0]);
        assert!(p.partial(1).is_zero());
        assert_eq!(p.total_degree(), Some(2));
    }

    #[test]
    fn merging_cancels_terms() {
        let x = ParamPolynomial::variable(1, 0);
        let z = x.add(&x.scale(c(-1.0, 0.0)));
        assert!(z.is_zero());
        assert_eq!(z.as_constant(), Some(c(0.0, 0.0)));
        assert_eq!(x.univariate_leading(), Some((1, c(1.0, 0.0))));
    }
}
