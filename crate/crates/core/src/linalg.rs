//! Symmetric tridiagonal solves used by the flow preconditioner.

use crate::scalar::{Cx, Real};

/// Factorized symmetric tridiagonal matrix (Thomas algorithm).
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal<T> {
    off: Vec<T>,
    cprime: Vec<T>,
    denom: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    /// `diag` has length n, `off` length n−1 (sub- and super-diagonal).
    pub(crate) fn factor(diag: &[T], off: &[T]) -> Self {
        let n = diag.len();
        let mut cprime = vec![T::zero(); n];
        let mut denom = vec![T::zero(); n];
        denom[0] = diag[0];
        if n > 1 {
            cprime[0] = off[0] / denom[0];
        }
        for i in 1..n {
            denom[i] = diag[i] - off[i - 1] * cprime[i - 1];
            if i + 1 < n {
                cprime[i] = off[i] / denom[i];
            }
        }
        Self {
            off: off.to_vec(),
            cprime,
            denom,
        }
    }

    pub(crate) fn solve(&self, rhs: &[Cx<T>]) -> Vec<Cx<T>> {
        let n = rhs.len();
        let mut y = vec![Cx::default(); n];
        if n == 0 {
            return y;
        }
        y[0] = rhs[0] / self.denom[0];
        for i in 1..n {
            y[i] = (rhs[i] - y[i - 1] * self.off[i - 1]) / self.denom[i];
        }
        for i in (0..n - 1).rev() {
            let next = y[i + 1];
            y[i] -= next * self.cprime[i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex;

    #[test]
    fn solves_small_system() {
        let diag = [4.0, 5.0, 6.0];
        let off = [-1.0, -2.0];
        let x = [Complex::new(1.0, 2.0), Complex::new(-1.0, 0.5), Complex::new(3.0, 0.0)];
        let b: Vec<Complex<f64>> = (0..3)
            .map(|i| {
                let mut s = x[i] * diag[i];
                if i > 0 {
                    s += x[i - 1] * off[i - 1];
                }
                if i < 2 {
                    s += x[i + 1] * off[i];
                }
                s
            })
            .collect();
        let y = Tridiagonal::factor(&diag, &off).solve(&b);
        for i in 0..3 {
            assert!((y[i] - x[i]).norm() < 1e-14);
        }
    }
}
