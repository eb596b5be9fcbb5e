//! Dense complex matrix primitives.
//!
//! Matrices are `nalgebra` dynamic matrices of `Complex64`. Whenever a matrix
//! is flattened into a vector (superoperators, commutant equations) the
//! row-major matrix-unit ordering is used: entry `(i, j)` of a `d x d` matrix
//! lands at index `i * d + j`.

mod density;
mod expm;

use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::{Error, Result};

pub use density::{trace_distance, DensityMatrix};
pub use expm::{expm, expm_hermitian};

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

/// Tolerance for Hermiticity and unitarity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative rank threshold used by [`nullspace`] callers.
pub const NULLSPACE_TOL: f64 = 1e-9;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn identity(d: usize) -> ComplexMatrix {
    ComplexMatrix::identity(d, d)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(rows, cols)
}

/// Builds a matrix from row-major entries.
pub fn from_row_major(rows: usize, cols: usize, entries: &[C64]) -> Result<ComplexMatrix> {
    if rows * cols != entries.len() {
        return Err(Error::DimensionMismatch(format!(
            "{rows}x{cols} matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    Ok(ComplexMatrix::from_row_slice(rows, cols, entries))
}

/// Real diagonal matrix.
pub fn diag(values: &[f64]) -> ComplexMatrix {
    let d = values.len();
    let mut m = zeros(d, d);
    for (k, v) in values.iter().enumerate() {
        m[(k, k)] = re(*v);
    }
    m
}

/// Kronecker product, dimensions multiply.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Left-to-right Kronecker product of several factors.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    factors
        .iter()
        .fold(identity(1), |acc, f| acc.kronecker(*f))
}

pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b - b * a
}

pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a * b + b * a
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Largest entry modulus.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_deviation(m: &ComplexMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(m - m.adjoint()))
}

/// `(M + M*) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()) * re(0.5)
}

/// Removes the trace part of a square matrix.
pub fn traceless(m: &ComplexMatrix) -> ComplexMatrix {
    let d = m.nrows();
    if d == 0 {
        return m.clone();
    }
    let shift = trace(m) / re(d as f64);
    m - identity(d) * shift
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.is_square() {
        Ok(m.nrows())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

fn hermitian_scale(m: &ComplexMatrix) -> f64 {
    max_abs(m).max(1.0)
}

pub fn ensure_hermitian(m: &ComplexMatrix, tol: f64) -> Result<usize> {
    let d = ensure_square(m)?;
    let deviation = hermitian_deviation(m);
    if deviation > tol * hermitian_scale(m) {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(d)
}

/// Flattens `m` in row-major order.
pub fn vectorize(m: &ComplexMatrix) -> ComplexVector {
    let (rows, cols) = m.shape();
    ComplexVector::from_fn(rows * cols, |k, _| m[(k / cols, k % cols)])
}

/// Inverse of [`vectorize`] for a `d x d` matrix.
pub fn unvectorize(v: &ComplexVector, d: usize) -> Result<ComplexMatrix> {
    if v.len() != d * d {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} cannot be reshaped to {d}x{d}",
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(d, d, |i, j| v[i * d + j]))
}

/// Matrix unit `E_ij` of size `d`.
pub fn matrix_unit(i: usize, j: usize, d: usize) -> ComplexMatrix {
    let mut m = zeros(d, d);
    m[(i, j)] = ONE;
    m
}

/// Traces out every factor not listed in `keep`.
///
/// `dims` gives the factor dimensions in tensor order; the kept factors keep
/// their relative order.
pub fn partial_trace(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let total = ensure_square(m)?;
    let product: usize = dims.iter().product();
    if product != total {
        return Err(Error::DimensionMismatch(format!(
            "factor dimensions {dims:?} multiply to {product}, matrix is {total}x{total}"
        )));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            dim: dims.len(),
        });
    }
    let mut kept = vec![false; dims.len()];
    for &k in keep {
        kept[k] = true;
    }

    let split = |mut index: usize| -> Vec<usize> {
        let mut digits = vec![0; dims.len()];
        for (slot, &d) in digits.iter_mut().zip(dims).rev() {
            *slot = index % d;
            index /= d;
        }
        digits
    };
    let digits: Vec<Vec<usize>> = (0..total).map(split).collect();
    let reduced_index = |ds: &[usize]| -> usize {
        ds.iter()
            .zip(dims)
            .zip(&kept)
            .filter(|(_, &k)| k)
            .fold(0, |acc, ((&x, &d), _)| acc * d + x)
    };
    let reduced_dim: usize = dims
        .iter()
        .zip(&kept)
        .filter(|(_, &k)| k)
        .map(|(&d, _)| d)
        .product();

    let mut out = zeros(reduced_dim, reduced_dim);
    for r in 0..total {
        for s in 0..total {
            let traced_match = digits[r]
                .iter()
                .zip(&digits[s])
                .zip(&kept)
                .all(|((a, b), &k)| k || a == b);
            if traced_match {
                out[(reduced_index(&digits[r]), reduced_index(&digits[s]))] += m[(r, s)];
            }
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermEig {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermEig {
    /// `V f(diag) V*`.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let d = self.values.len();
        let mut scaled = self.vectors.clone();
        for k in 0..d {
            let factor = f(self.values[k]);
            for r in 0..d {
                scaled[(r, k)] *= factor;
            }
        }
        scaled * self.vectors.adjoint()
    }
}

pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    ensure_hermitian(h, HERMITIAN_TOL)?;
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(h.nrows(), h.nrows(), |r, k| {
        eig.eigenvectors[(r, order[k])]
    });
    Ok(HermEig { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn herm_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    ensure_hermitian(h, HERMITIAN_TOL)?;
    let mut values: Vec<f64> = hermitian_part(h).symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Eigenvalues of a general square matrix, read off its complex Schur form.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    ensure_square(a)?;
    if a.is_empty() {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, 100_000)
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))?;
    let values = schur
        .eigenvalues()
        .ok_or_else(|| Error::Numerical("Schur form is not triangular".into()))?;
    Ok(values.iter().copied().collect())
}

/// Spectral norm (largest singular value).
pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

/// Orthonormal basis of the numerical kernel of `a`.
///
/// A right singular vector belongs to the kernel when its singular value is
/// at most `tol * ||a||_2`. A zero matrix has the whole space as kernel.
pub fn nullspace(a: &ComplexMatrix, tol: f64) -> Vec<ComplexVector> {
    let (rows, cols) = a.shape();
    if cols == 0 {
        return Vec::new();
    }
    // Pad with zero rows so the SVD exposes all `cols` right singular vectors.
    let padded = if rows < cols {
        let mut p = zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.expect("SVD computed with V");
    let sigma_max = svd.singular_values.iter().fold(0.0_f64, |acc, s| acc.max(*s));
    let threshold = tol * sigma_max;
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| sigma_max == 0.0 || s <= threshold)
        .map(|(k, _)| v_t.row(k).adjoint())
        .collect()
}

/// Unit-Frobenius-norm copy of `m`.
pub fn normalized(m: &ComplexMatrix) -> ComplexMatrix {
    let n = m.norm();
    if n == 0.0 {
        m.clone()
    } else {
        m / re(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        from_row_major(2, 2, &[ZERO, ONE, ONE, ZERO]).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        diag(&[1.0, -1.0])
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&identity(2), &identity(2)), identity(4));
        assert_eq!(kron(&sigma_z(), &identity(2)), diag(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn kron_lowering_pair_maps_e1e1_to_e0e0() {
        // a^1_0 e_1 = e_0
        let lower = matrix_unit(0, 1, 2);
        let op = kron(&lower, &lower);
        let mut e11 = ComplexVector::zeros(4);
        e11[3] = ONE;
        let out = op * e11;
        let mut e00 = ComplexVector::zeros(4);
        e00[0] = ONE;
        assert_eq!(out, e00);
    }

    #[test]
    fn partial_trace_product_and_mixed() {
        let a = from_row_major(2, 2, &[re(0.7), c(0.1, 0.2), c(0.1, -0.2), re(0.3)]).unwrap();
        let b = diag(&[0.25, 0.75]);
        let rho = kron(&a, &b);
        let ra = partial_trace(&rho, &[2, 2], &[0]).unwrap();
        assert!(max_abs(&(ra - &a)) < 1e-15);
        let rb = partial_trace(&rho, &[2, 2], &[1]).unwrap();
        assert!(max_abs(&(rb - &b)) < 1e-15);

        let mixed = identity(4) * re(0.25);
        let r = partial_trace(&mixed, &[2, 2], &[1]).unwrap();
        assert!(max_abs(&(r - identity(2) * re(0.5))) < 1e-15);
    }

    #[test]
    fn partial_trace_bell_state() {
        let s = 1.0 / 2f64.sqrt();
        let psi = ComplexVector::from_vec(vec![re(s), ZERO, ZERO, re(s)]);
        let proj = &psi * psi.adjoint();
        for keep in [0, 1] {
            let r = partial_trace(&proj, &[2, 2], &[keep]).unwrap();
            assert!(max_abs(&(r - identity(2) * re(0.5))) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_three_factors_keeps_order() {
        let a = diag(&[0.1, 0.9]);
        let b = diag(&[0.2, 0.3, 0.5]);
        let cc = diag(&[0.6, 0.4]);
        let rho = kron_all(&[&a, &b, &cc]);
        let r = partial_trace(&rho, &[2, 3, 2], &[0, 2]).unwrap();
        assert!(max_abs(&(r - kron(&a, &cc))) < 1e-15);
        let r = partial_trace(&rho, &[2, 3, 2], &[1]).unwrap();
        assert!(max_abs(&(r - &b)) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_dims() {
        let m = identity(4);
        assert!(matches!(
            partial_trace(&m, &[2, 3], &[0]),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(partial_trace(&zeros(4, 3), &[2, 2], &[0]).is_err());
    }

    #[test]
    fn herm_eig_pauli() {
        let e = herm_eig(&sigma_z()).unwrap();
        assert_eq!(e.values, vec![-1.0, 1.0]);
        assert!((e.vectors[(1, 0)].norm() - 1.0).abs() < 1e-15);

        let e = herm_eig(&sigma_x()).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        let s = 1.0 / 2f64.sqrt();
        for k in 0..2 {
            assert!((e.vectors[(0, k)].norm() - s).abs() < 1e-14);
            assert!((e.vectors[(1, k)].norm() - s).abs() < 1e-14);
        }
        let rebuilt = e.map(re);
        assert!(max_abs(&(rebuilt - sigma_x())) < 1e-14);

        let e = herm_eig(&identity(3)).unwrap();
        assert!(e.values.iter().all(|v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn herm_eig_rejects_non_hermitian() {
        let m = matrix_unit(0, 1, 2);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn nullspace_examples() {
        assert!(nullspace(&identity(3), NULLSPACE_TOL).is_empty());
        assert_eq!(nullspace(&zeros(3, 4), NULLSPACE_TOL).len(), 4);
        let proj = matrix_unit(0, 0, 2);
        let k = nullspace(&proj, NULLSPACE_TOL);
        assert_eq!(k.len(), 1);
        assert!(k[0][0].norm() < 1e-15);
        assert!((k[0][1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nullspace_wide_matrix() {
        // 1 x 3 row: kernel of dimension 2
        let a = from_row_major(1, 3, &[ONE, ONE, ZERO]).unwrap();
        let k = nullspace(&a, NULLSPACE_TOL);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!((&a * v).norm() < 1e-14);
            assert!((v.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn vectorize_is_row_major() {
        let m = from_row_major(2, 2, &[re(1.0), re(2.0), re(3.0), re(4.0)]).unwrap();
        let v = vectorize(&m);
        assert_eq!(v.as_slice(), &[re(1.0), re(2.0), re(3.0), re(4.0)]);
        assert_eq!(unvectorize(&v, 2).unwrap(), m);
        assert!(unvectorize(&v, 3).is_err());
    }

    #[test]
    fn traceless_removes_identity() {
        let m = diag(&[3.0, 5.0]);
        assert_eq!(traceless(&m), diag(&[-1.0, 1.0]));
    }

    #[test]
    fn general_eigenvalues() {
        let mut values = eigenvalues(&sigma_x()).unwrap();
        values.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((values[0] - re(-1.0)).norm() < 1e-14);
        assert!((values[1] - re(1.0)).norm() < 1e-14);

        // rotation generator: eigenvalues ±i
        let g = from_row_major(3, 3, &[ZERO, -ONE, ZERO, ONE, ZERO, ZERO, ZERO, ZERO, re(2.0)]).unwrap();
        let mut values = eigenvalues(&g).unwrap();
        values.sort_by(|a, b| a.im.total_cmp(&b.im));
        assert!((values[0] + I).norm() < 1e-13);
        assert!((values[1] - re(2.0)).norm() < 1e-13);
        assert!((values[2] - I).norm() < 1e-13);
    }
}
