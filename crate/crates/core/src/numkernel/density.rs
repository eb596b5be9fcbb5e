use super::{
    ensure_square, hermitian_deviation, hermitian_part, herm_eigenvalues, identity, kron, re,
    trace, zeros, ComplexMatrix, ComplexVector, ONE,
};
use crate::{Error, Result};

/// Hermitian, positive semidefinite, unit-trace matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    pub const DEFAULT_TOL: f64 = 1e-9;

    /// Validates `m` as a state: Hermitian, trace one and minimum eigenvalue
    /// at least `-tol`, each within `tol`.
    pub fn new(m: ComplexMatrix, tol: f64) -> Result<Self> {
        Self::check(&m, tol)?;
        Ok(Self(m))
    }

    pub fn check(m: &ComplexMatrix, tol: f64) -> Result<()> {
        ensure_square(m)?;
        let deviation = hermitian_deviation(m);
        if deviation > tol {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {deviation:.3e})"
            )));
        }
        let tr = trace(m);
        if (tr - ONE).norm() > tol {
            return Err(Error::InvalidState(format!(
                "trace {:.12} + {:.3e}i differs from 1",
                tr.re, tr.im
            )));
        }
        let min_eig = herm_eigenvalues(&hermitian_part(m))?
            .first()
            .copied()
            .unwrap_or(0.0);
        if min_eig < -tol {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eig:.3e} is negative"
            )));
        }
        Ok(())
    }

    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    /// `|k><k|` in dimension `dim`.
    pub fn basis_state(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::IndexOutOfRange { index: k, dim });
        }
        let mut m = zeros(dim, dim);
        m[(k, k)] = ONE;
        Ok(Self(m))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self(identity(dim) * re(1.0 / dim as f64))
    }

    /// Projector onto the normalized `psi`.
    pub fn pure(psi: &ComplexVector) -> Result<Self> {
        let n = psi.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let unit = psi / re(n);
        Ok(Self(&unit * unit.adjoint()))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        Self(kron(&self.0, &other.0))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.0
    }

    /// Eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eigenvalues(&hermitian_part(&self.0)).expect("density matrices are Hermitian")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    pub fn populations(&self) -> Vec<f64> {
        self.0.diagonal().iter().map(|z| z.re).collect()
    }
}

impl AsRef<ComplexMatrix> for DensityMatrix {
    fn as_ref(&self) -> &ComplexMatrix {
        &self.0
    }
}

/// Half the trace norm of `rho - sigma`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{} states",
            rho.dim(),
            rho.dim(),
            sigma.dim(),
            sigma.dim()
        )));
    }
    let diff = hermitian_part(&(rho.matrix() - sigma.matrix()));
    Ok(0.5 * herm_eigenvalues(&diff)?.iter().map(|v| v.abs()).sum::<f64>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn trace_distance_examples() {
        let zero = DensityMatrix::basis_state(2, 0).unwrap();
        let one = DensityMatrix::basis_state(2, 1).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_eq!(trace_distance(&zero, &zero).unwrap(), 0.0);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!((trace_distance(&mixed, &zero).unwrap() - 0.5).abs() < 1e-15);
        assert!(trace_distance(&zero, &DensityMatrix::maximally_mixed(3)).is_err());
    }

    #[test]
    fn validation_rejects_bad_matrices() {
        let not_unit = identity(2);
        assert!(DensityMatrix::new(not_unit, 1e-9).is_err());
        let negative = super::super::diag(&[1.5, -0.5]);
        assert!(DensityMatrix::new(negative, 1e-9).is_err());
        let mut skew = identity(2) * re(0.5);
        skew[(0, 1)] = re(0.1);
        assert!(DensityMatrix::new(skew, 1e-9).is_err());
    }

    proptest! {
        #[test]
        fn triangle_inequality_and_symmetry(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let a = random::density(d, &mut rng);
            let b = random::density(d, &mut rng);
            let c = random::density(d, &mut rng);
            let ab = trace_distance(&a, &b).unwrap();
            let ba = trace_distance(&b, &a).unwrap();
            let bc = trace_distance(&b, &c).unwrap();
            let ac = trace_distance(&a, &c).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ac <= ab + bc + 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        }
    }
}
