//! The bipartite repeated-interaction model.
//!
//! The ancilla space is `C^{N+1}` with the fixed orthonormal basis
//! `e_0, ..., e_N` of `H^R` eigenvectors, so `H^R = sum_j λ_j a^j_j` is stored
//! as the list `λ`. Composite operators act on `A ⊗ B ⊗ ancilla` in that
//! tensor order.

use crate::numkernel::{
    self, diag, ensure_hermitian, identity, kron, kron_all, re, ComplexMatrix, DensityMatrix,
    HERMITIAN_TOL,
};
use crate::{Error, Result};

/// Canonical operator `a^i_j`, sending `e_i` to `e_j` and every other basis
/// vector to zero.
pub fn ladder(i: usize, j: usize, dim: usize) -> Result<ComplexMatrix> {
    for index in [i, j] {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
    }
    Ok(numkernel::matrix_unit(j, i, dim))
}

fn ladder_unchecked(i: usize, j: usize, dim: usize) -> ComplexMatrix {
    numkernel::matrix_unit(j, i, dim)
}

/// Which party an interaction stage couples to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelWarning {
    /// `e_0` is treated as the reference ("ground") ancilla level but
    /// `λ_0` is not the smallest eigenvalue.
    GroundNotMinimal { lambda0: f64, min: f64 },
}

impl std::fmt::Display for ModelWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ModelWarning::GroundNotMinimal { lambda0, min } => write!(
                f,
                "ancilla level e_0 has energy {lambda0} but the lowest level has {min}; \
                 Gibbs weights will not concentrate on e_0 at low temperature"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteModel {
    h_a: ComplexMatrix,
    h_b: ComplexMatrix,
    lambda: Vec<f64>,
    v: Vec<ComplexMatrix>,
    w: Vec<ComplexMatrix>,
}

impl BipartiteModel {
    pub fn new(
        h_a: ComplexMatrix,
        h_b: ComplexMatrix,
        lambda: Vec<f64>,
        v: Vec<ComplexMatrix>,
        w: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let dim_a = ensure_hermitian(&h_a, HERMITIAN_TOL)
            .map_err(|e| Error::InvalidModel(format!("H_A: {e}")))?;
        let dim_b = ensure_hermitian(&h_b, HERMITIAN_TOL)
            .map_err(|e| Error::InvalidModel(format!("H_B: {e}")))?;
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::InvalidModel("system dimensions must be positive".into()));
        }
        if lambda.is_empty() {
            return Err(Error::InvalidModel("lambda needs at least one level".into()));
        }
        if let Some(bad) = lambda.iter().find(|l| !l.is_finite()) {
            return Err(Error::InvalidModel(format!("lambda contains {bad}")));
        }
        let channels = lambda.len() - 1;
        if v.len() != channels || w.len() != channels {
            return Err(Error::InvalidModel(format!(
                "ancilla of dimension {} needs {channels} coupling operators per party, got V: {}, W: {}",
                lambda.len(),
                v.len(),
                w.len()
            )));
        }
        for (k, op) in v.iter().enumerate() {
            if op.shape() != (dim_a, dim_a) {
                return Err(Error::InvalidModel(format!(
                    "V[{k}] is {}x{}, expected {dim_a}x{dim_a}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        for (k, op) in w.iter().enumerate() {
            if op.shape() != (dim_b, dim_b) {
                return Err(Error::InvalidModel(format!(
                    "W[{k}] is {}x{}, expected {dim_b}x{dim_b}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        Ok(Self {
            h_a,
            h_b,
            lambda,
            v,
            w,
        })
    }

    /// Spontaneous emission: qubits everywhere, `H^A = H^B = H^R = σ_z`,
    /// `V_1 = W_1 = a^1_0`.
    pub fn emission() -> Self {
        Self::thermal_exchange(1)
    }

    /// Excitation exchange on `C^{N+1}` for all three spaces:
    /// `H^A = H^B = H^R = diag(λ)` with `λ_j = 1 - 2j/N` and
    /// `V_j = W_j = a^j_0`. For `N = 1` this is [`BipartiteModel::emission`].
    pub fn thermal_exchange(channels: usize) -> Self {
        assert!(channels >= 1, "exchange model needs at least one channel");
        let dim = channels + 1;
        let lambda: Vec<f64> = (0..dim)
            .map(|j| 1.0 - 2.0 * j as f64 / channels as f64)
            .collect();
        let h = diag(&lambda);
        let couplings: Vec<ComplexMatrix> = (1..dim).map(|j| ladder_unchecked(j, 0, dim)).collect();
        Self::new(h.clone(), h, lambda, couplings.clone(), couplings)
            .expect("exchange model is valid")
    }

    /// No coupling at all.
    pub fn decoupled(h_a: ComplexMatrix, h_b: ComplexMatrix, lambda: Vec<f64>) -> Result<Self> {
        let channels = lambda.len().saturating_sub(1);
        let (da, db) = (h_a.nrows(), h_b.nrows());
        Self::new(
            h_a,
            h_b,
            lambda,
            vec![numkernel::zeros(da, da); channels],
            vec![numkernel::zeros(db, db); channels],
        )
    }

    pub fn dim_a(&self) -> usize {
        self.h_a.nrows()
    }

    pub fn dim_b(&self) -> usize {
        self.h_b.nrows()
    }

    /// `dim_a * dim_b`.
    pub fn system_dim(&self) -> usize {
        self.dim_a() * self.dim_b()
    }

    /// `N + 1`.
    pub fn ancilla_dim(&self) -> usize {
        self.lambda.len()
    }

    /// `N`.
    pub fn channels(&self) -> usize {
        self.lambda.len() - 1
    }

    pub fn h_a(&self) -> &ComplexMatrix {
        &self.h_a
    }

    pub fn h_b(&self) -> &ComplexMatrix {
        &self.h_b
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn v(&self) -> &[ComplexMatrix] {
        &self.v
    }

    pub fn w(&self) -> &[ComplexMatrix] {
        &self.w
    }

    pub fn warnings(&self) -> Vec<ModelWarning> {
        let min = self.lambda.iter().copied().fold(f64::INFINITY, f64::min);
        let lambda0 = self.lambda[0];
        if lambda0 > min {
            vec![ModelWarning::GroundNotMinimal { lambda0, min }]
        } else {
            Vec::new()
        }
    }

    /// `H^R` as a diagonal matrix.
    pub fn h_r(&self) -> ComplexMatrix {
        diag(&self.lambda)
    }

    /// `H^A ⊗ I + I ⊗ H^B`.
    pub fn free_hamiltonian(&self) -> ComplexMatrix {
        kron(&self.h_a, &identity(self.dim_b())) + kron(&identity(self.dim_a()), &self.h_b)
    }

    /// `V_j ⊗ I`.
    pub fn v_lifted(&self, j: usize) -> ComplexMatrix {
        kron(&self.v[j], &identity(self.dim_b()))
    }

    /// `I ⊗ W_j`.
    pub fn w_lifted(&self, j: usize) -> ComplexMatrix {
        kron(&identity(self.dim_a()), &self.w[j])
    }

    /// Collective jump operators `S_j = V_j ⊗ I + I ⊗ W_j`, `j = 1..N`
    /// (stored zero-based).
    pub fn collective_ops(&self) -> Vec<ComplexMatrix> {
        (0..self.channels())
            .map(|j| self.v_lifted(j) + self.w_lifted(j))
            .collect()
    }

    /// The model with the two parties exchanged (`A ↔ B`, `V ↔ W`).
    pub fn swapped(&self) -> Self {
        Self {
            h_a: self.h_b.clone(),
            h_b: self.h_a.clone(),
            lambda: self.lambda.clone(),
            v: self.w.clone(),
            w: self.v.clone(),
        }
    }

    /// Splits the total Hamiltonian of one interaction stage as
    /// `free + coupling / √h`, both on `A ⊗ B ⊗ ancilla`.
    pub fn stage_parts(&self, party: Party) -> (ComplexMatrix, ComplexMatrix) {
        let (da, db, n) = (self.dim_a(), self.dim_b(), self.ancilla_dim());
        let (ia, ib, ir) = (identity(da), identity(db), identity(n));
        let h_r = self.h_r();
        let reservoir = kron_all(&[&ia, &ib, &h_r]);
        let (free, lift): (ComplexMatrix, Box<dyn Fn(&ComplexMatrix) -> ComplexMatrix>) = match party {
            Party::A => (
                kron_all(&[&self.h_a, &ib, &ir]),
                Box::new(|op: &ComplexMatrix| kron(op, &ib)),
            ),
            Party::B => (
                kron_all(&[&ia, &self.h_b, &ir]),
                Box::new(|op: &ComplexMatrix| kron(&ia, op)),
            ),
        };
        let ops = match party {
            Party::A => &self.v,
            Party::B => &self.w,
        };
        let mut coupling = numkernel::zeros(da * db * n, da * db * n);
        for (k, op) in ops.iter().enumerate() {
            let j = k + 1;
            coupling += kron(&lift(op), &ladder_unchecked(0, j, n));
            coupling += kron(&lift(&op.adjoint()), &ladder_unchecked(j, 0, n));
        }
        (free + reservoir, coupling)
    }
}

fn check_duration(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDuration(h))
    }
}

fn h_tot(m: &BipartiteModel, h: f64, party: Party) -> Result<ComplexMatrix> {
    check_duration(h)?;
    let (free, coupling) = m.stage_parts(party);
    Ok(free + coupling * re(1.0 / h.sqrt()))
}

/// `H^A⊗I⊗I + I⊗I⊗H^R + h^{-1/2} Σ_j (V_j⊗I⊗a^0_j + V_j*⊗I⊗a^j_0)`.
pub fn h_tot_a(m: &BipartiteModel, h: f64) -> Result<ComplexMatrix> {
    h_tot(m, h, Party::A)
}

/// `I⊗H^B⊗I + I⊗I⊗H^R + h^{-1/2} Σ_j (I⊗W_j⊗a^0_j + I⊗W_j*⊗a^j_0)`.
pub fn h_tot_b(m: &BipartiteModel, h: f64) -> Result<ComplexMatrix> {
    h_tot(m, h, Party::B)
}

/// Reference state of each ancilla copy.
#[derive(Debug, Clone, PartialEq)]
pub enum AncillaState {
    /// `|e_0><e_0|`.
    Ground,
    /// `e^{-β H^R} / Z`.
    Gibbs { beta: f64 },
    /// Diagonal weights in the `H^R` eigenbasis.
    Explicit(Vec<f64>),
}

impl AncillaState {
    /// Diagonal weights `β_j` of the ancilla state for energies `lambda`.
    pub fn weights(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        match self {
            AncillaState::Ground => {
                let mut w = vec![0.0; lambda.len()];
                w[0] = 1.0;
                Ok(w)
            }
            AncillaState::Gibbs { beta } => gibbs_weights(lambda, *beta),
            AncillaState::Explicit(w) => {
                if w.len() != lambda.len() {
                    return Err(Error::InvalidWeights(format!(
                        "{} weights for an ancilla of dimension {}",
                        w.len(),
                        lambda.len()
                    )));
                }
                if w.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
                    return Err(Error::InvalidWeights(format!("negative or non-finite weight in {w:?}")));
                }
                let total: f64 = w.iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::InvalidWeights(format!("weights sum to {total}")));
                }
                Ok(w.clone())
            }
        }
    }
}

/// `β_j = e^{-β λ_j} / Z`, evaluated with the exponents shifted so the
/// largest is zero.
pub fn gibbs_weights(lambda: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(beta >= 0.0) {
        return Err(Error::NegativeBeta(beta));
    }
    if beta.is_infinite() {
        return Err(Error::InvalidWeights("infinite β: use the ground state".into()));
    }
    let exponents: Vec<f64> = lambda.iter().map(|l| -beta * l).collect();
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = exponents.iter().map(|e| (e - top).exp()).collect();
    let z: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / z).collect())
}

/// Diagonal ancilla density matrix in the `H^R` eigenbasis.
pub fn ancilla_density(s: &AncillaState, m: &BipartiteModel) -> Result<DensityMatrix> {
    let w = s.weights(m.lambda())?;
    Ok(DensityMatrix::new_unchecked(diag(&w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{max_abs, ComplexVector, ONE};
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn ladder_action() {
        let e0 = ComplexVector::from_vec(vec![ONE, re(0.0)]);
        let e1 = ComplexVector::from_vec(vec![re(0.0), ONE]);
        assert_eq!(ladder(0, 0, 2).unwrap(), numkernel::matrix_unit(0, 0, 2));
        let lower = ladder(1, 0, 2).unwrap();
        assert_eq!(&lower * &e1, e0);
        assert_eq!((&lower * &e0).norm(), 0.0);
        let sum = (0..3).fold(numkernel::zeros(3, 3), |acc, j| acc + ladder(j, j, 3).unwrap());
        assert_eq!(sum, identity(3));
        assert!(matches!(ladder(2, 0, 2), Err(Error::IndexOutOfRange { .. })));
    }

    proptest! {
        #[test]
        fn ladder_adjoint(i in 0usize..5, j in 0usize..5) {
            let dim = 5;
            prop_assert_eq!(ladder(i, j, dim).unwrap().adjoint(), ladder(j, i, dim).unwrap());
        }

        #[test]
        fn total_hamiltonians_are_hermitian(seed in any::<u64>(), h in 1e-4f64..2.0, n in 1usize..3) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let m = random::model(2, 2, n, &mut rng);
            for ham in [h_tot_a(&m, h).unwrap(), h_tot_b(&m, h).unwrap()] {
                prop_assert!(numkernel::hermitian_deviation(&ham) < 1e-12);
            }
        }

        #[test]
        fn gibbs_weights_monotone(beta in 0.01f64..20.0, seed in any::<u64>()) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let lambda: Vec<f64> = (0..4).map(|_| random::normal(&mut rng)).collect();
            let w = gibbs_weights(&lambda, beta).unwrap();
            prop_assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for a in 0..4 {
                prop_assert!(w[a] > 0.0);
                for b in 0..4 {
                    if lambda[a] < lambda[b] {
                        prop_assert!(w[a] >= w[b]);
                    }
                }
            }
        }
    }

    #[test]
    fn decoupled_total_hamiltonian_is_free() {
        let m = BipartiteModel::decoupled(diag(&[1.0, -1.0]), diag(&[0.5, 0.0]), vec![0.3, 0.7]).unwrap();
        let expected = kron_all(&[m.h_a(), &identity(2), &identity(2)])
            + kron_all(&[&identity(2), &identity(2), &m.h_r()]);
        for h in [0.01, 1.0] {
            assert!(max_abs(&(h_tot_a(&m, h).unwrap() - &expected)) < 1e-15);
        }
        let expected_b = kron_all(&[&identity(2), m.h_b(), &identity(2)])
            + kron_all(&[&identity(2), &identity(2), &m.h_r()]);
        let (ha, hb) = (h_tot_a(&m, 0.2).unwrap(), h_tot_b(&m, 0.2).unwrap());
        assert!(max_abs(&(&hb - &expected_b)) < 1e-15);
        assert!(max_abs(&numkernel::commutator(&ha, &hb)) < 1e-15);
    }

    #[test]
    fn emission_block_layout() {
        // Block (r, c) = (I ⊗ <e_r|) H (I ⊗ |e_c>) on the A⊗B space.
        let m = BipartiteModel::emission();
        let h = h_tot_a(&m, 1.0).unwrap();
        let block = |r: usize, c: usize| {
            ComplexMatrix::from_fn(4, 4, |s, t| h[(s * 2 + r, t * 2 + c)])
        };
        let lower = kron(&ladder(1, 0, 2).unwrap(), &identity(2));
        assert!(max_abs(&(block(1, 0) - &lower)) < 1e-15);
        assert!(max_abs(&(block(0, 1) - lower.adjoint())) < 1e-15);
        let sz = diag(&[1.0, -1.0]);
        let d0 = kron(&sz, &identity(2)) + identity(4);
        let d1 = kron(&sz, &identity(2)) - identity(4);
        assert!(max_abs(&(block(0, 0) - d0)) < 1e-15);
        assert!(max_abs(&(block(1, 1) - d1)) < 1e-15);

        let hb = h_tot_b(&m, 1.0).unwrap();
        let block_b = ComplexMatrix::from_fn(4, 4, |s, t| hb[(s * 2 + 1, t * 2)]);
        assert!(max_abs(&(block_b - kron(&identity(2), &ladder(1, 0, 2).unwrap()))) < 1e-15);
    }

    #[test]
    fn excited_ancilla_columns_couple_only_to_e0() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let m = random::model(2, 2, 3, &mut rng);
        let h = h_tot_a(&m, 0.5).unwrap();
        let n = m.ancilla_dim();
        for r in 1..n {
            for c in 1..n {
                if r == c {
                    continue;
                }
                let block = ComplexMatrix::from_fn(4, 4, |s, t| h[(s * n + r, t * n + c)]);
                assert_eq!(max_abs(&block), 0.0, "block ({r},{c})");
            }
        }
    }

    #[test]
    fn duration_must_be_positive() {
        let m = BipartiteModel::emission();
        assert!(matches!(h_tot_a(&m, 0.0), Err(Error::NonPositiveDuration(_))));
        assert!(h_tot_b(&m, -1.0).is_err());
    }

    #[test]
    fn ancilla_density_examples() {
        let m = BipartiteModel::emission();
        let ground = ancilla_density(&AncillaState::Ground, &m).unwrap();
        assert_eq!(ground.matrix(), &diag(&[1.0, 0.0]));
        let hot = ancilla_density(&AncillaState::Gibbs { beta: 0.0 }, &m).unwrap();
        assert!(max_abs(&(hot.matrix() - diag(&[0.5, 0.5]))) < 1e-15);
        let w = gibbs_weights(&[1.0, -1.0], 1.0).unwrap();
        let z = (-1f64).exp() + 1f64.exp();
        assert!((w[0] - (-1f64).exp() / z).abs() < 1e-15);
        assert!((w[1] - 1f64.exp() / z).abs() < 1e-15);
        assert!((w[0] - 0.11920).abs() < 1e-5 && (w[1] - 0.88080).abs() < 1e-5);
        assert!(matches!(
            ancilla_density(&AncillaState::Gibbs { beta: -1.0 }, &m),
            Err(Error::NegativeBeta(_))
        ));
        assert!(ancilla_density(&AncillaState::Explicit(vec![0.3, 0.3]), &m).is_err());
    }

    #[test]
    fn gibbs_weights_stable_at_large_beta() {
        let w = gibbs_weights(&[-1.0, 1.0], 1e4).unwrap();
        assert_eq!(w, vec![1.0, 0.0]);
    }

    #[test]
    fn emission_warns_about_ground_level() {
        assert_eq!(BipartiteModel::emission().warnings().len(), 1);
        let m = BipartiteModel::decoupled(diag(&[1.0]), diag(&[1.0]), vec![-1.0, 1.0]).unwrap();
        assert!(m.warnings().is_empty());
    }

    #[test]
    fn model_validation() {
        let h = diag(&[1.0, -1.0]);
        let v = vec![ladder(1, 0, 2).unwrap()];
        assert!(BipartiteModel::new(h.clone(), h.clone(), vec![1.0], v.clone(), v.clone()).is_err());
        assert!(BipartiteModel::new(h.clone(), h.clone(), vec![1.0, 2.0], v.clone(), vec![identity(3)]).is_err());
        let mut not_herm = h.clone();
        not_herm[(0, 1)] = re(1.0);
        assert!(BipartiteModel::new(not_herm, h.clone(), vec![1.0, 2.0], v.clone(), v).is_err());
    }

    #[test]
    fn exchange_model_n1_is_emission() {
        let m = BipartiteModel::thermal_exchange(1);
        assert_eq!(m.lambda(), &[1.0, -1.0]);
        assert_eq!(m.h_a(), &diag(&[1.0, -1.0]));
        assert_eq!(m.v()[0], ladder(1, 0, 2).unwrap());
        let m3 = BipartiteModel::thermal_exchange(3);
        assert_eq!(m3.ancilla_dim(), 4);
        assert_eq!(m3.v()[2], ladder(3, 0, 4).unwrap());
    }
}
