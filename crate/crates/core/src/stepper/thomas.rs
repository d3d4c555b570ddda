//! Complex tridiagonal systems.

use crate::{Error, Result, C64};

/// Pivots smaller than this fraction of the row scale are rejected.
pub const PIVOT_TOL: f64 = 1e-30;

/// Bands of a tridiagonal matrix. `lower[0]` and `upper[n-1]` are unused.
#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<C64>,
    pub diag: Vec<C64>,
    pub upper: Vec<C64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        let z = vec![C64::new(0.0, 0.0); n];
        Self {
            lower: z.clone(),
            diag: z.clone(),
            upper: z,
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// `y = self * x`.
    pub fn mul_vec(&self, x: &[C64], y: &mut [C64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.lower[i] * x[i - 1];
            }
            if i + 1 < n {
                s += self.upper[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    /// Dense copy, row-major.
    pub fn to_dense(&self) -> Vec<Vec<C64>> {
        let n = self.len();
        let mut a = vec![vec![C64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            a[i][i] = self.diag[i];
            if i > 0 {
                a[i][i - 1] = self.lower[i];
            }
            if i + 1 < n {
                a[i][i + 1] = self.upper[i];
            }
        }
        a
    }

    fn row_scale(&self, i: usize) -> f64 {
        let mut s = self.diag[i].norm();
        if i > 0 {
            s = s.max(self.lower[i].norm());
        }
        if i + 1 < self.len() {
            s = s.max(self.upper[i].norm());
        }
        s
    }
}

/// Elimination factors of a tridiagonal matrix, reusable across right-hand
/// sides.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalLu {
    lower: Vec<C64>,
    /// Modified super-diagonal `c'_i = upper_i / pivot_i`.
    upper: Vec<C64>,
    inv_pivot: Vec<C64>,
}

impl TridiagonalLu {
    pub fn factor(a: &Tridiagonal) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.lower.len() != n || a.upper.len() != n {
            return Err(Error::Shape(format!(
                "inconsistent tridiagonal bands of order {n}"
            )));
        }
        let mut upper = vec![C64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![C64::new(0.0, 0.0); n];
        for i in 0..n {
            let pivot = if i == 0 {
                a.diag[0]
            } else {
                a.diag[i] - a.lower[i] * upper[i - 1]
            };
            let scale = a.row_scale(i);
            if !(pivot.norm() >= PIVOT_TOL * scale) || scale == 0.0 || !pivot.norm().is_finite() {
                return Err(Error::Numerical(format!(
                    "pivot {pivot:.3e} in row {i} below {PIVOT_TOL:e} of row scale {scale:.3e}"
                )));
            }
            inv_pivot[i] = pivot.inv();
            if i + 1 < n {
                upper[i] = a.upper[i] * inv_pivot[i];
            }
        }
        Ok(Self {
            lower: a.lower.clone(),
            upper,
            inv_pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.inv_pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inv_pivot.is_empty()
    }

    /// Overwrite `rhs` with the solution.
    pub fn solve_in_place(&self, rhs: &mut [C64]) {
        let n = self.len();
        rhs[0] *= self.inv_pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i] * rhs[i - 1]) * self.inv_pivot[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.upper[i] * next;
        }
    }
}

/// Solve `a x = rhs` by forward elimination and back substitution.
pub fn thomas_solve(a: &Tridiagonal, rhs: &[C64]) -> Result<Vec<C64>> {
    if rhs.len() != a.len() {
        return Err(Error::Shape(format!(
            "rhs of length {} for order {}",
            rhs.len(),
            a.len()
        )));
    }
    let lu = TridiagonalLu::factor(a)?;
    let mut x = rhs.to_vec();
    lu.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn identity_returns_rhs() {
        let mut a = Tridiagonal::zeros(4);
        a.diag.iter_mut().for_each(|d| *d = c(1.0));
        let b = vec![c(1.0), C64::new(0.0, 2.0), c(-3.0), c(4.0)];
        assert_eq!(thomas_solve(&a, &b).unwrap(), b);
    }

    #[test]
    fn two_by_two() {
        let a = Tridiagonal {
            lower: vec![c(0.0), c(1.0)],
            diag: vec![c(2.0), c(2.0)],
            upper: vec![c(1.0), c(0.0)],
        };
        let x = thomas_solve(&a, &[c(3.0), c(3.0)]).unwrap();
        assert!((x[0] - 1.0).norm() < 1e-15 && (x[1] - 1.0).norm() < 1e-15);
    }

    #[test]
    fn zero_pivot_is_error() {
        let a = Tridiagonal {
            lower: vec![c(0.0), c(1.0)],
            diag: vec![c(1.0), c(1.0)],
            upper: vec![c(1.0), c(0.0)],
        };
        let err = thomas_solve(&a, &[c(1.0), c(1.0)]).unwrap_err();
        assert!(!err.is_configuration());
    }

    #[test]
    fn matches_dense_oracle() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(17);
        let mut z = || C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for n in [1usize, 2, 5, 40] {
            let mut a = Tridiagonal::zeros(n);
            for i in 0..n {
                a.lower[i] = z();
                a.upper[i] = z();
                a.diag[i] = z() + c(4.0);
            }
            let b: Vec<C64> = (0..n).map(|_| z()).collect();
            let x = thomas_solve(&a, &b).unwrap();
            let y = tdse_oracles::dense_solve(a.to_dense(), b.clone());
            let scale = y.iter().fold(0.0f64, |m, v| m.max(v.norm()));
            for (p, q) in x.iter().zip(&y) {
                assert!((p - q).norm() <= 1e-12 * scale);
            }
            let mut r = vec![C64::new(0.0, 0.0); n];
            a.mul_vec(&x, &mut r);
            for (p, q) in r.iter().zip(&b) {
                assert!((p - q).norm() < 1e-12);
            }
        }
    }
}
