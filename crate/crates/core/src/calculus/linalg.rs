//! Dense complex linear algebra for the small Jacobians of Newton solves.

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.n + j] = v;
    }

    fn norm1(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// LU factorisation with partial pivoting.
    pub fn lu(&self) -> Lu {
        let n = self.n;
        let mut a = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, pivot) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let akk = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / akk;
                a[i * n + k] = f;
                for j in k + 1..n {
                    let t = a[k * n + j];
                    a[i * n + j] -= f * t;
                }
            }
        }
        Lu {
            n,
            a,
            perm,
            sign,
            singular,
            norm1: self.norm1(),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.lu().det()
    }
}

#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    a: Vec<Complex64>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
    norm1: f64,
}

impl Lu {
    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        (0..self.n).fold(Complex64::new(self.sign, 0.0), |acc, k| acc * self.a[k * self.n + k])
    }

    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        if self.singular {
            return None;
        }
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                let t = self.a[i * n + j] * x[j];
                x[i] -= t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let t = self.a[i * n + j] * x[j];
                x[i] -= t;
            }
            x[i] /= self.a[i * n + i];
        }
        Some(x)
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, infinite for an exactly singular matrix.
    pub fn condition(&self) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.n;
        let mut inv_norm: f64 = 0.0;
        for j in 0..n {
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.solve(&e).expect("non-singular");
            inv_norm = inv_norm.max(col.iter().map(|c| c.norm()).sum());
        }
        self.norm1 * inv_norm
    }
}
