//! Return-to-equilibrium diagnostics for the thermal generator `L_β`.

use crate::lindblad::{effective_hamiltonian, evolve, generator_thermal, spectrum, Spectrum};
use crate::model::{AncillaState, BipartiteModel};
use crate::numkernel::{
    self, expm_hermitian, herm_eigenvalues, identity, nullspace, re, trace, trace_distance,
    unvectorize, ComplexMatrix, ComplexVector, DensityMatrix, NULLSPACE_TOL,
};
use crate::superop::Superoperator;
use crate::{Error, Result};

/// Distance between subspace projectors below which two commutants are
/// considered equal.
pub const SUBSPACE_TOL: f64 = 1e-8;

/// Minimum eigenvalue an invariant state needs to count as faithful.
pub const FAITHFUL_TOL: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct CommutantReport {
    pub dimension: usize,
    /// Orthonormal (Frobenius) basis.
    pub basis: Vec<ComplexMatrix>,
    /// One-dimensional and spanned by the identity.
    pub is_trivial: bool,
    vectors: Vec<ComplexVector>,
}

impl CommutantReport {
    /// Orthogonal projector onto the commutant inside the `d²`-dimensional
    /// matrix space.
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.vectors.first().map_or(0, |v| v.len());
        self.vectors
            .iter()
            .fold(numkernel::zeros(n, n), |acc, v| acc + v * v.adjoint())
    }

    /// Whether both reports describe the same subspace.
    pub fn same_subspace(&self, other: &CommutantReport) -> bool {
        self.subspace_distance(other) <= SUBSPACE_TOL
    }

    /// Frobenius distance between the two projectors.
    pub fn subspace_distance(&self, other: &CommutantReport) -> f64 {
        if self.dimension == 0 && other.dimension == 0 {
            return 0.0;
        }
        if self.dimension == 0 || other.dimension == 0 {
            return (self.dimension.max(other.dimension) as f64).sqrt();
        }
        (self.projector() - other.projector()).norm()
    }
}

/// `{X : XS = SX for all S in ops}` as the kernel of the stacked maps
/// `X ↦ XS - SX`.
pub fn commutant(ops: &[ComplexMatrix], d: usize) -> Result<CommutantReport> {
    for op in ops {
        if op.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "commutant in dimension {d} given a {}x{} operator",
                op.nrows(),
                op.ncols()
            )));
        }
    }
    let n = d * d;
    let vectors: Vec<ComplexVector> = if ops.is_empty() {
        (0..n)
            .map(|k| {
                let mut v = ComplexVector::zeros(n);
                v[k] = re(1.0);
                v
            })
            .collect()
    } else {
        let mut stacked = numkernel::zeros(n * ops.len(), n);
        for (k, op) in ops.iter().enumerate() {
            let map = Superoperator::from_map(d, |x| x * op - op * x);
            stacked.view_mut((k * n, 0), (n, n)).copy_from(map.matrix());
        }
        if stacked.norm() == 0.0 {
            nullspace(&numkernel::zeros(n, n), NULLSPACE_TOL)
        } else {
            nullspace(&stacked, NULLSPACE_TOL)
        }
    };
    let basis: Vec<ComplexMatrix> = vectors
        .iter()
        .map(|v| unvectorize(v, d))
        .collect::<Result<_>>()?;
    let is_trivial = basis.len() == 1 && {
        let b = &basis[0];
        let scalar = trace(b) / re(d as f64);
        (b - identity(d) * scalar).norm() <= 1e-9 * b.norm()
    };
    Ok(CommutantReport {
        dimension: basis.len(),
        basis,
        is_trivial,
        vectors,
    })
}

/// `e^{-β (H^A⊗I + I⊗H^B)} / Z`.
pub fn invariant_gibbs(m: &BipartiteModel, beta: f64) -> Result<DensityMatrix> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::NegativeBeta(beta));
    }
    let h = m.free_hamiltonian();
    let shift = herm_eigenvalues(&h)?.first().copied().unwrap_or(0.0);
    let shifted = &h - identity(h.nrows()) * re(shift);
    let unnormalized = expm_hermitian(&shifted, re(-beta))?;
    let z = trace(&unnormalized);
    Ok(DensityMatrix::new_unchecked(unnormalized / z))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `{S_k, S_k*}' = {H_eff(β), S_k, S_k*}'`. Faithfulness of an invariant
    /// state, the other hypothesis, is reported on its own.
    Satisfied,
    /// The sufficient condition does not apply; nothing is claimed.
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Satisfied => "criterion satisfied",
            Verdict::Inconclusive => "criterion inconclusive",
        })
    }
}

#[derive(Debug, Clone)]
pub struct EquilibriumReport {
    pub beta: f64,
    /// `{S_k, S_k*}'`.
    pub jump_commutant: CommutantReport,
    /// `{H_eff(β), S_k, S_k*}'`.
    pub full_commutant: CommutantReport,
    pub commutants_equal: bool,
    /// Some invariant state has full rank.
    pub faithful_invariant_state: bool,
    /// Commutant equality alone.
    pub verdict: Verdict,
    pub kernel_dim: usize,
    /// Average of the invariant states found in the kernel.
    pub invariant_state: Option<DensityMatrix>,
    /// Frobenius norm of `L_β(ρ_β)`.
    pub gibbs_residual: f64,
    pub spectral_gap: Option<f64>,
    /// One-dimensional kernel and every other eigenvalue strictly in the
    /// left half-plane: every trajectory converges to the invariant state.
    pub spectral_certificate: bool,
}

impl EquilibriumReport {
    pub fn criterion_satisfied(&self) -> bool {
        self.verdict == Verdict::Satisfied
    }
}

pub fn return_to_equilibrium_check(m: &BipartiteModel, beta: f64) -> Result<EquilibriumReport> {
    let l = generator_thermal(m, beta)?;
    let d = m.system_dim();
    let mut jump_ops = Vec::with_capacity(2 * m.channels());
    for s in m.collective_ops() {
        jump_ops.push(s.adjoint());
        jump_ops.push(s);
    }
    let h = effective_hamiltonian(m, &AncillaState::Gibbs { beta })?;
    let mut full_ops = jump_ops.clone();
    full_ops.push(h.total);
    let jump_commutant = commutant(&jump_ops, d)?;
    let full_commutant = commutant(&full_ops, d)?;
    let commutants_equal = jump_commutant.same_subspace(&full_commutant);

    let spec = spectrum(&l)?;
    let invariant_state = average_state(&spec);
    let faithful_invariant_state = match &invariant_state {
        Some(rho) => rho.min_eigenvalue() > FAITHFUL_TOL,
        None => false,
    };
    let verdict = if commutants_equal {
        Verdict::Satisfied
    } else {
        Verdict::Inconclusive
    };
    let rho_beta = invariant_gibbs(m, beta)?;
    let gibbs_residual = l.apply(rho_beta.matrix())?.norm();
    let spectral_gap = spec.spectral_gap();
    Ok(EquilibriumReport {
        beta,
        jump_commutant,
        full_commutant,
        commutants_equal,
        faithful_invariant_state,
        verdict,
        kernel_dim: spec.kernel_dim,
        invariant_state,
        gibbs_residual,
        spectral_certificate: spec.kernel_dim == 1 && spectral_gap.is_some_and(|g| g > 1e-10),
        spectral_gap,
    })
}

fn average_state(spec: &Spectrum) -> Option<DensityMatrix> {
    let first = spec.invariant_states.first()?;
    let d = first.dim();
    let sum = spec
        .invariant_states
        .iter()
        .fold(numkernel::zeros(d, d), |acc, r| acc + r.matrix());
    Some(DensityMatrix::new_unchecked(sum / re(spec.invariant_states.len() as f64)))
}

/// Distances of a thermal trajectory to the Gibbs state.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayTable {
    pub times: Vec<f64>,
    pub distances: Vec<f64>,
    /// `-max Re λ` over eigenvalues of `L_β` outside its kernel.
    pub spectral_gap: Option<f64>,
    /// Slope of `-ln(distance)` against `t` over the points with distance
    /// in `[1e-8, 1e-2]`.
    pub fitted_rate: Option<f64>,
}

pub fn convergence_study(
    m: &BipartiteModel,
    beta: f64,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<DecayTable> {
    let l = generator_thermal(m, beta)?;
    let rho_beta = invariant_gibbs(m, beta)?;
    let distances = t_grid
        .iter()
        .map(|&t| trace_distance(&evolve(&l, rho0, t)?, &rho_beta))
        .collect::<Result<Vec<f64>>>()?;
    let spectral_gap = spectrum(&l)?.spectral_gap();
    Ok(DecayTable {
        times: t_grid.to_vec(),
        fitted_rate: fit_rate(t_grid, &distances),
        distances,
        spectral_gap,
    })
}

fn fit_rate(times: &[f64], distances: &[f64]) -> Option<f64> {
    let points: Vec<(f64, f64)> = times
        .iter()
        .zip(distances)
        .filter(|(_, &dist)| (1e-8..=1e-2).contains(&dist))
        .map(|(&t, &dist)| (t, dist.ln()))
        .collect();
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_t = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::generator_thermal;
    use crate::numkernel::{diag, max_abs};
    use crate::random;
    use proptest::prelude::*;
    use rand::SeedableRng;

    #[test]
    fn commutant_of_nothing_is_everything() {
        let c = commutant(&[], 3).unwrap();
        assert_eq!(c.dimension, 9);
        assert!(!c.is_trivial);
        let c = commutant(&[identity(3)], 3).unwrap();
        assert_eq!(c.dimension, 9);
    }

    #[test]
    fn commutant_of_generic_pair_is_trivial() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let ops = [random::ginibre(3, &mut rng), random::ginibre(3, &mut rng)];
        let c = commutant(&ops, 3).unwrap();
        assert_eq!(c.dimension, 1);
        assert!(c.is_trivial);
        for b in &c.basis {
            for op in &ops {
                assert!(max_abs(&(b * op - op * b)) < 1e-9);
            }
        }
    }

    #[test]
    fn commutant_of_diagonal_operator() {
        let c = commutant(&[diag(&[1.0, 2.0, 2.0])], 3).unwrap();
        assert_eq!(c.dimension, 5);
    }

    #[test]
    fn exchange_symmetry_in_collective_commutant() {
        // S = a⊗I + I⊗a is symmetric under exchanging the factors, so the
        // swap operator commutes with S and S*.
        let m = BipartiteModel::emission();
        let s = &m.collective_ops()[0];
        let c = commutant(&[s.clone(), s.adjoint()], 4).unwrap();
        assert_eq!(c.dimension, 2);
        assert!(!c.is_trivial);
        let mut swap = numkernel::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            swap[(i, j)] = re(1.0);
        }
        assert!(max_abs(&(&swap * s - s * &swap)) == 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn commutant_dimension_is_unitarily_invariant(seed in any::<u64>()) {
            let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
            let s = BipartiteModel::emission().collective_ops()[0].clone();
            let ops = vec![s.clone(), s.adjoint()];
            let u = random::unitary(4, &mut rng);
            let rotated: Vec<_> = ops.iter().map(|o| &u * o * u.adjoint()).collect();
            let a = commutant(&ops, 4).unwrap();
            let b = commutant(&rotated, 4).unwrap();
            prop_assert_eq!(a.dimension, b.dimension);
            prop_assert!(a.dimension >= 1);
        }
    }

    #[test]
    fn gibbs_examples() {
        let m = BipartiteModel::thermal_exchange(1);
        let rho = invariant_gibbs(&m, 0.0).unwrap();
        assert!(max_abs(&(rho.matrix() - identity(4) * re(0.25))) < 1e-15);
        let rho = invariant_gibbs(&m, 1.0).unwrap();
        let w = [(-2.0f64).exp(), 1.0, 1.0, 2.0f64.exp()];
        let z: f64 = w.iter().sum();
        let expected = diag(&w.map(|x| x / z));
        assert!(max_abs(&(rho.matrix() - expected)) < 1e-15);
        assert!(rho.min_eigenvalue() > 0.0);
        let l = generator_thermal(&m, 1.0).unwrap();
        assert!(l.apply(rho.matrix()).unwrap().norm() < 1e-10);
        assert!(invariant_gibbs(&m, -1.0).is_err());
    }

    #[test]
    fn decoupled_model_is_inconclusive() {
        let m = BipartiteModel::decoupled(diag(&[1.0, -1.0]), diag(&[1.0, -1.0]), vec![1.0, -1.0]).unwrap();
        let r = return_to_equilibrium_check(&m, 1.0).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.jump_commutant.dimension, 16);
        assert!(!r.spectral_certificate);
    }

    #[test]
    fn thermal_exchange_report() {
        let r = return_to_equilibrium_check(&BipartiteModel::thermal_exchange(1), 1.0).unwrap();
        assert!(r.gibbs_residual < 1e-10);
        assert_eq!(r.kernel_dim, 1);
        assert!(r.faithful_invariant_state);
        assert!(r.spectral_certificate);
        assert!(r.full_commutant.is_trivial);
        let rho = r.invariant_state.unwrap();
        let gibbs = invariant_gibbs(&BipartiteModel::thermal_exchange(1), 1.0).unwrap();
        assert!(max_abs(&(rho.matrix() - gibbs.matrix())) < 1e-9);
    }

    #[test]
    fn study_from_equilibrium_stays_put() {
        let m = BipartiteModel::thermal_exchange(1);
        let rho = invariant_gibbs(&m, 1.0).unwrap();
        let table = convergence_study(&m, 1.0, &rho, &[0.0, 1.0, 5.0, 20.0]).unwrap();
        assert!(table.distances.iter().all(|d| *d <= 1e-10));
        assert_eq!(table.fitted_rate, None);
    }

    #[test]
    fn study_decays_at_the_gap() {
        let m = BipartiteModel::thermal_exchange(1);
        let rho0 = DensityMatrix::basis_state(4, 3).unwrap();
        let grid: Vec<f64> = (0..=80).map(|k| k as f64 * 0.5).collect();
        let table = convergence_study(&m, 1.0, &rho0, &grid).unwrap();
        assert!(*table.distances.last().unwrap() < 1e-6);
        let (rate, gap) = (table.fitted_rate.unwrap(), table.spectral_gap.unwrap());
        assert!((rate - gap).abs() <= 0.2 * gap, "rate {rate} gap {gap}");
    }

    #[test]
    fn rate_fit_recovers_exponential() {
        let times: Vec<f64> = (0..40).map(|k| k as f64).collect();
        let d: Vec<f64> = times.iter().map(|t| 0.5 * (-0.7 * t).exp()).collect();
        assert!((fit_rate(&times, &d).unwrap() - 0.7).abs() < 1e-12);
    }
}
