//! Linear maps on `d x d` matrices stored as `d² x d²` matrices.
//!
//! Column `i * d + j` holds the row-major vectorization of the image of the
//! matrix unit `E_ij`. Every superoperator in the crate is built by applying
//! its map to each matrix unit, so no vectorization identity is assumed.

use crate::numkernel::{
    self, expm, herm_eigenvalues, hermitian_part, matrix_unit, trace, unvectorize, vectorize,
    ComplexMatrix, C64,
};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Tabulates `map` on the matrix units of dimension `dim`.
    pub fn from_map(dim: usize, map: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let n = dim * dim;
        let mut matrix = numkernel::zeros(n, n);
        for i in 0..dim {
            for j in 0..dim {
                let image = vectorize(&map(&matrix_unit(i, j, dim)));
                matrix.set_column(i * dim + j, &image);
            }
        }
        Self { dim, matrix }
    }

    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (dim * dim, dim * dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator on {dim}x{dim} matrices needs a {0}x{0} matrix, got {1}x{2}",
                dim * dim,
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: numkernel::identity(dim * dim),
        }
    }

    /// System dimension `d` (the matrix is `d² x d²`).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn apply(&self, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        if m.shape() != (self.dim, self.dim) {
            return Err(Error::DimensionMismatch(format!(
                "superoperator acts on {0}x{0} matrices, got {1}x{2}",
                self.dim,
                m.nrows(),
                m.ncols()
            )));
        }
        unvectorize(&(&self.matrix * vectorize(m)), self.dim)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Superoperator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "composing superoperators on dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            matrix: &self.matrix * C64::new(factor, 0.0),
        }
    }

    pub fn sub(&self, other: &Superoperator) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch("superoperator difference".into()));
        }
        Ok(Self {
            dim: self.dim,
            matrix: &self.matrix - &other.matrix,
        })
    }

    /// Frobenius norm of the `d² x d²` matrix.
    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    pub fn distance(&self, other: &Superoperator) -> Result<f64> {
        Ok(self.sub(other)?.norm())
    }

    /// `exp(t * self)`; for a Lindblad generator this is the channel at time `t`.
    pub fn exp(&self, t: f64) -> Result<Self> {
        Ok(Self {
            dim: self.dim,
            matrix: expm(&(&self.matrix * C64::new(t, 0.0)))?,
        })
    }

    /// Choi matrix `sum_ij E_ij ⊗ Φ(E_ij)`.
    pub fn choi(&self) -> ComplexMatrix {
        let d = self.dim;
        let mut choi = numkernel::zeros(d * d, d * d);
        for i in 0..d {
            for j in 0..d {
                let image = unvectorize(&self.matrix.column(i * d + j).into_owned(), d)
                    .expect("column has d² entries");
                choi.view_mut((i * d, j * d), (d, d)).copy_from(&image);
            }
        }
        choi
    }

    /// Smallest eigenvalue of the Hermitian part of the Choi matrix; a map is
    /// completely positive when this is non-negative.
    pub fn choi_min_eigenvalue(&self) -> Result<f64> {
        let values = herm_eigenvalues(&hermitian_part(&self.choi()))?;
        Ok(values.first().copied().unwrap_or(0.0))
    }

    /// Largest `|tr Φ(E_ij) - δ_ij|`: zero for trace-preserving maps.
    pub fn trace_defect(&self) -> f64 {
        self.trace_functional_defect(1.0)
    }

    /// Largest `|tr L(E_ij)|`: zero for generators of trace-preserving
    /// semigroups.
    pub fn generator_trace_defect(&self) -> f64 {
        self.trace_functional_defect(0.0)
    }

    fn trace_functional_defect(&self, diagonal: f64) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let image = unvectorize(&self.matrix.column(i * d + j).into_owned(), d)
                    .expect("column has d² entries");
                let expected = if i == j { diagonal } else { 0.0 };
                worst = worst.max((trace(&image) - C64::new(expected, 0.0)).norm());
            }
        }
        worst
    }

    /// Largest `|Φ(X)* - Φ(X*)|` over matrix units.
    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in 0..d {
                let col = |a: usize, b: usize| {
                    unvectorize(&self.matrix.column(a * d + b).into_owned(), d)
                        .expect("column has d² entries")
                };
                let lhs = col(i, j).adjoint();
                let rhs = col(j, i);
                worst = worst.max(numkernel::max_abs(&(lhs - rhs)));
            }
        }
        worst
    }
}
