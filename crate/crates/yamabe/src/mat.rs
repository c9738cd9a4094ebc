//! Minimal dense containers for n×n matrices and Γ^k_{ij} symbol tables.
//!
//! Dimensions here are tiny (n ≤ ~8), so flat `Vec<f64>` storage with index
//! arithmetic beats pulling in a linear-algebra dependency.

use std::ops::{Index, IndexMut};

/// Dense square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest |entry|.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Largest |entry| over off-diagonal positions only.
    pub fn max_abs_offdiag(&self) -> f64 {
        let mut a = 0.0f64;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    a = a.max(self[(i, j)].abs());
                }
            }
        }
        a
    }

    /// Largest |A_ij − A_ji|.
    pub fn asymmetry(&self) -> f64 {
        let mut a = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                a = a.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        a
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<(usize, usize)> for SquareMatrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for SquareMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        let n = self.n;
        &mut self.data[i * n + j]
    }
}

/// Christoffel symbols Γ^k_{ij} of an n-dimensional connection.
#[derive(Debug, Clone)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Γ^k_{ij}
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: f64) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    /// Largest |Γ^k_{ij} − Γ^k_{ji}|.
    pub fn lower_asymmetry(&self) -> f64 {
        let mut a = 0.0f64;
        for k in 0..self.n {
            for i in 0..self.n {
                for j in (i + 1)..self.n {
                    a = a.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_indexing_round_trip() {
        let mut m = SquareMatrix::zeros(3);
        m[(1, 2)] = 4.5;
        assert_eq!(m[(1, 2)], 4.5);
        assert_eq!(m[(2, 1)], 0.0);
        assert_eq!(m.asymmetry(), 4.5);
    }

    #[test]
    fn christoffel_indexing() {
        let mut g = Christoffel::zeros(2);
        g.set(0, 1, 1, -0.5);
        assert_eq!(g.get(0, 1, 1), -0.5);
        assert_eq!(g.get(1, 1, 0), 0.0);
    }
}
