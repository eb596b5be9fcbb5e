//! Continuous-time limit of the repeated interactions.
//!
//! With ancilla weights `β_j` the limiting generator on `A ⊗ B` is
//!
//! ```text
//! L(ρ) = -i[H_eff, ρ] + Σ_j β_0 D[S_j](ρ) + Σ_j β_j D[S_j*](ρ)
//! ```
//!
//! where `S_j = V_j ⊗ I + I ⊗ W_j`, `D[X](ρ) = XρX* - ½{X*X, ρ}` and
//! `H_eff = H^A ⊗ I + I ⊗ H^B + (i/2) Σ_j (β_j - β_0)(V_j ⊗ W_j* - V_j* ⊗ W_j)`.
//! The ground ancilla is `β = (1, 0, ..., 0)`.

use crate::discrete::{self, InteractionOrder, LimitCoefficients, LimitSeries};
use crate::model::{AncillaState, BipartiteModel};
use crate::numkernel::{
    self, eigenvalues, hermitian_part, herm_eigenvalues, identity, kron, kron_all, nullspace, re,
    trace, traceless, unvectorize, vectorize, ComplexMatrix, DensityMatrix, C64, I, NULLSPACE_TOL,
};
use crate::superop::Superoperator;
use crate::{Error, Result};

/// Free Hamiltonian of `A ⊗ B` seen by the limit dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveHamiltonian {
    /// `H^A ⊗ I + I ⊗ H^B + interaction`.
    pub total: ComplexMatrix,
    /// Interaction created by the ancilla chain.
    pub interaction: ComplexMatrix,
}

pub fn effective_hamiltonian(m: &BipartiteModel, ancilla: &AncillaState) -> Result<EffectiveHamiltonian> {
    let weights = ancilla.weights(m.lambda())?;
    Ok(effective_hamiltonian_weighted(m, &weights))
}

/// `interaction = (i/2) Σ_j (β_j - β_0)(V_j ⊗ W_j* - V_j* ⊗ W_j)`.
pub fn effective_hamiltonian_weighted(m: &BipartiteModel, weights: &[f64]) -> EffectiveHamiltonian {
    let d = m.system_dim();
    let mut interaction = numkernel::zeros(d, d);
    for k in 0..m.channels() {
        let (v, w) = (&m.v()[k], &m.w()[k]);
        let coeff = weights[k + 1] - weights[0];
        if coeff != 0.0 {
            interaction += (kron(v, &w.adjoint()) - kron(&v.adjoint(), w)) * (I * re(0.5 * coeff));
        }
    }
    EffectiveHamiltonian {
        total: m.free_hamiltonian() + &interaction,
        interaction,
    }
}

/// Recovers the Hamiltonian part of a ground-ancilla drift `L^0_0 = -iH - ½M`
/// and reports it relative to the free Hamiltonian, identity terms removed.
pub fn effective_hamiltonian_from_limit(m: &BipartiteModel, coeffs: &LimitCoefficients) -> EffectiveHamiltonian {
    let k = &coeffs.drift;
    let h = (k - k.adjoint()) * (I * re(0.5));
    let total = traceless(&h);
    let interaction = &total - traceless(&m.free_hamiltonian());
    EffectiveHamiltonian {
        total: total + trace_part(&m.free_hamiltonian()),
        interaction,
    }
}

fn trace_part(m: &ComplexMatrix) -> ComplexMatrix {
    m - traceless(m)
}

/// `ρ ↦ -i[H, ρ] + Σ_k w_k (L_k ρ L_k* - ½{L_k* L_k, ρ})`.
pub fn lindblad_form(hamiltonian: &ComplexMatrix, jumps: &[(f64, ComplexMatrix)]) -> Superoperator {
    let d = hamiltonian.nrows();
    let h = traceless(hamiltonian);
    let mut damping = numkernel::zeros(d, d);
    let mut sandwiches = Vec::with_capacity(jumps.len());
    for (w, op) in jumps {
        if *w == 0.0 {
            continue;
        }
        damping += op.adjoint() * op * re(0.5 * w);
        sandwiches.push((re(*w), op.clone(), op.adjoint()));
    }
    // ρ ↦ Kρ + ρK* with K = -iH - ½ Σ w L*L
    let k = &h * (-I) - damping;
    let k_adj = k.adjoint();
    Superoperator::from_map(d, |x| {
        let mut out = &k * x + x * &k_adj;
        for (w, op, op_adj) in &sandwiches {
            out += op * x * op_adj * *w;
        }
        out
    })
}

/// Vacuum generator `L` (ground ancilla).
pub fn generator_vacuum(m: &BipartiteModel) -> Superoperator {
    let mut weights = vec![0.0; m.ancilla_dim()];
    weights[0] = 1.0;
    generator_weighted(m, &weights)
}

/// Thermal generator `L_β` (Gibbs ancilla).
pub fn generator_thermal(m: &BipartiteModel, beta: f64) -> Result<Superoperator> {
    generator_for(m, &AncillaState::Gibbs { beta })
}

pub fn generator_for(m: &BipartiteModel, ancilla: &AncillaState) -> Result<Superoperator> {
    Ok(generator_weighted(m, &ancilla.weights(m.lambda())?))
}

/// Generator for arbitrary diagonal ancilla weights.
pub fn generator_weighted(m: &BipartiteModel, weights: &[f64]) -> Superoperator {
    let h = effective_hamiltonian_weighted(m, weights);
    let mut jumps = Vec::with_capacity(2 * m.channels());
    for (k, s) in m.collective_ops().into_iter().enumerate() {
        jumps.push((weights[k + 1], s.adjoint()));
        jumps.push((weights[0], s));
    }
    lindblad_form(&h.total, &jumps)
}

/// `ρ ↦ L^0_0 ρ + ρ (L^0_0)* + Σ_j L^0_j ρ (L^0_j)*`, with the Hamiltonian
/// part of `L^0_0` made traceless first.
pub fn generator_from_limit(coeffs: &LimitCoefficients) -> Superoperator {
    let k = &coeffs.drift;
    let d = k.nrows();
    let h = traceless(&((k - k.adjoint()) * (I * re(0.5))));
    let damping = (k + k.adjoint()) * re(0.5);
    let drift = h * (-I) + damping;
    let drift_adj = drift.adjoint();
    let jumps: Vec<(ComplexMatrix, ComplexMatrix)> =
        coeffs.jumps.iter().map(|l| (l.clone(), l.adjoint())).collect();
    Superoperator::from_map(d, |x| {
        let mut out = &drift * x + x * &drift_adj;
        for (l, l_adj) in &jumps {
            out += l * x * l_adj;
        }
        out
    })
}

/// Generator assembled from the closed-form limit coefficients `L^0_0`,
/// `L^0_j` of the two-stage scheme.
pub fn generator_from_coefficients(m: &BipartiteModel) -> Superoperator {
    generator_from_limit(&discrete::limit_coefficients_closed_form(m))
}

/// `ρ ↦ Σ_k w_k (C^k_k ρ + ρ (C^k_k)* + Σ_{j≠k} B^k_j ρ (B^k_j)*)` where `B`
/// and `C` are the `√h` and `h` blocks of the step series.
pub fn generator_from_series(series: &LimitSeries, weights: &[f64]) -> Result<Superoperator> {
    let n = series.half.ancilla_dim();
    if weights.len() != n {
        return Err(Error::InvalidWeights(format!("{} weights for {n} ancilla levels", weights.len())));
    }
    let d = series.half.system_dim();
    let mut drift = numkernel::zeros(d, d);
    let mut sandwiches = Vec::new();
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        drift += series.one.get(k, k) * re(w);
        for j in (0..n).filter(|&j| j != k) {
            let b = series.half.get(k, j);
            sandwiches.push((re(w), b.clone(), b.adjoint()));
        }
    }
    let h = traceless(&((&drift - drift.adjoint()) * (I * re(0.5))));
    let drift = h * (-I) + (&drift + drift.adjoint()) * re(0.5);
    let drift_adj = drift.adjoint();
    Ok(Superoperator::from_map(d, |x| {
        let mut out = &drift * x + x * &drift_adj;
        for (w, b, b_adj) in &sandwiches {
            out += b * x * b_adj * *w;
        }
        out
    }))
}

/// Generator obtained by expanding the two-stage step unitary in `√h`.
pub fn generator_from_step_series(
    m: &BipartiteModel,
    ancilla: &AncillaState,
    order: InteractionOrder,
) -> Result<Superoperator> {
    generator_from_series(&discrete::limit_series(m, order)?, &ancilla.weights(m.lambda())?)
}

/// Single-stage Hamiltonian of the equivalent usual scheme, split as
/// `free + coupling / √h` with
/// `free = H_0 ⊗ I + 2 I⊗I⊗H^R` and `coupling = Σ_j S_j ⊗ a^0_j + S_j* ⊗ a^j_0`.
pub fn usual_scheme_parts(m: &BipartiteModel) -> (ComplexMatrix, ComplexMatrix) {
    let d = m.system_dim();
    let n = m.ancilla_dim();
    let h0 = effective_hamiltonian_weighted(m, &ground_weights(n)).total;
    let free = kron(&h0, &identity(n)) + kron_all(&[&identity(d), &m.h_r()]) * re(2.0);
    let mut coupling = numkernel::zeros(d * n, d * n);
    for (k, s) in m.collective_ops().iter().enumerate() {
        let j = k + 1;
        coupling += kron(s, &numkernel::matrix_unit(j, 0, n));
        coupling += kron(&s.adjoint(), &numkernel::matrix_unit(0, j, n));
    }
    (free, coupling)
}

/// `H̃_tot = free + coupling / √h` of the usual scheme.
pub fn usual_scheme_hamiltonian(m: &BipartiteModel, h: f64) -> Result<ComplexMatrix> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::NonPositiveDuration(h));
    }
    let (free, coupling) = usual_scheme_parts(m);
    Ok(free + coupling * re(1.0 / h.sqrt()))
}

/// Vacuum generator of the usual single-stage scheme, obtained from the
/// series of `exp(-i h H̃_tot)`.
pub fn generator_usual_scheme(m: &BipartiteModel) -> Result<Superoperator> {
    let (free, coupling) = usual_scheme_parts(m);
    let series = discrete::limit_series_single_stage(&free, &coupling, m.system_dim(), m.ancilla_dim())?;
    generator_from_series(&series, &ground_weights(m.ancilla_dim()))
}

fn ground_weights(n: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[0] = 1.0;
    w
}

/// `e^{tL}(ρ_0)`, validated as a density matrix within `tol`.
pub fn evolve_with_tol(l: &Superoperator, rho0: &DensityMatrix, t: f64, tol: f64) -> Result<DensityMatrix> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::NegativeTime(t));
    }
    if rho0.dim() != l.dim() {
        return Err(Error::DimensionMismatch(format!(
            "state is {0}x{0}, generator acts on {1}x{1}",
            rho0.dim(),
            l.dim()
        )));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let propagator = l.exp(t)?;
    let rho = unvectorize(&(propagator.matrix() * vectorize(rho0.matrix())), l.dim())?;
    DensityMatrix::check(&rho, tol).map_err(|e| Error::Numerical(format!("evolved state at t = {t}: {e}")))?;
    Ok(DensityMatrix::new_unchecked(rho))
}

pub fn evolve(l: &Superoperator, rho0: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
    evolve_with_tol(l, rho0, t, DensityMatrix::DEFAULT_TOL)
}

/// Eigenvalues and kernel of a generator.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// Dimension of the numerical kernel.
    pub kernel_dim: usize,
    /// Kernel elements that normalize to density matrices.
    pub invariant_states: Vec<DensityMatrix>,
    /// Kernel elements that do not.
    pub non_state_kernel: Vec<ComplexMatrix>,
}

impl Spectrum {
    /// `-max Re λ` over the eigenvalues outside the kernel, or `None` when
    /// the kernel is everything.
    pub fn spectral_gap(&self) -> Option<f64> {
        let mut sorted = self.eigenvalues.clone();
        sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
        sorted
            .iter()
            .skip(self.kernel_dim)
            .map(|z| -z.re)
            .min_by(f64::total_cmp)
    }

    /// Largest real part among eigenvalues outside the kernel.
    pub fn max_nonzero_real_part(&self) -> Option<f64> {
        self.spectral_gap().map(|g| -g)
    }
}

pub fn spectrum(l: &Superoperator) -> Result<Spectrum> {
    let eigenvalues = eigenvalues(l.matrix())?;
    let kernel = nullspace(l.matrix(), NULLSPACE_TOL);
    let d = l.dim();
    let mut invariant_states = Vec::new();
    let mut non_state_kernel = Vec::new();
    for v in &kernel {
        let m = unvectorize(v, d)?;
        match kernel_state(&m) {
            Some(rho) => invariant_states.push(rho),
            None => non_state_kernel.push(m),
        }
    }
    Ok(Spectrum {
        eigenvalues,
        kernel_dim: kernel.len(),
        invariant_states,
        non_state_kernel,
    })
}

fn kernel_state(m: &ComplexMatrix) -> Option<DensityMatrix> {
    let tr = trace(m);
    if tr.norm() < 1e-9 * m.norm().max(1.0) {
        return None;
    }
    let rho = hermitian_part(&(m / tr));
    let min = herm_eigenvalues(&rho).ok()?.first().copied()?;
    if min < -1e-9 {
        return None;
    }
    let tr = trace(&rho);
    Some(DensityMatrix::new_unchecked(rho / tr))
}
