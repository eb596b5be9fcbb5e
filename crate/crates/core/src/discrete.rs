//! Exact discrete repeated-interaction dynamics.
//!
//! One step couples a fresh ancilla to `A` for a time `h`, then to `B` for a
//! time `h`: `U = U^B U^A` with `U^X = exp(-i h H^X_tot)`. The step unitary is
//! split into Kraus blocks `U = Σ_{i,j} U^i_j ⊗ a^i_j`, and the reduced
//! channel on `A ⊗ B` is `ρ ↦ Σ_{j,k} β_k U^k_j ρ (U^k_j)*`.

use crate::model::{h_tot_a, h_tot_b, AncillaState, BipartiteModel, Party};
use crate::numkernel::{
    self, expm_hermitian, identity, kron, re, C64, ComplexMatrix, DensityMatrix, I,
};
use crate::superop::Superoperator;
use crate::{Error, Result};

/// Order of the two half-steps within one interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InteractionOrder {
    /// `U = U^B U^A`: the ancilla meets `A` first.
    #[default]
    AThenB,
    /// `U = U^A U^B`.
    BThenA,
}

/// Operator-valued entries of a unitary on `system ⊗ ancilla`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausBlocks {
    system_dim: usize,
    /// `blocks[i][j] = U^i_j = (I ⊗ <e_j|) U (I ⊗ |e_i>)`.
    blocks: Vec<Vec<ComplexMatrix>>,
}

impl KrausBlocks {
    pub fn new(system_dim: usize, blocks: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let n = blocks.len();
        for row in &blocks {
            if row.len() != n {
                return Err(Error::DimensionMismatch("Kraus block array must be square".into()));
            }
            for b in row {
                if b.shape() != (system_dim, system_dim) {
                    return Err(Error::DimensionMismatch(format!(
                        "Kraus block is {}x{}, expected {system_dim}x{system_dim}",
                        b.nrows(),
                        b.ncols()
                    )));
                }
            }
        }
        Ok(Self { system_dim, blocks })
    }

    pub fn system_dim(&self) -> usize {
        self.system_dim
    }

    pub fn ancilla_dim(&self) -> usize {
        self.blocks.len()
    }

    /// `U^i_j`.
    pub fn get(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.blocks[i][j]
    }

    /// `Σ_{i,j} U^i_j ⊗ a^i_j`.
    pub fn reassemble(&self) -> ComplexMatrix {
        let n = self.ancilla_dim();
        let d = self.system_dim;
        let mut out = numkernel::zeros(d * n, d * n);
        for i in 0..n {
            for j in 0..n {
                out += kron(&self.blocks[i][j], &numkernel::matrix_unit(j, i, n));
            }
        }
        out
    }

    /// Largest Frobenius deviation of `Σ_i (U^k_i)* U^k_i` from the identity
    /// over columns `k`.
    pub fn isometry_defect(&self) -> f64 {
        let n = self.ancilla_dim();
        (0..n)
            .map(|k| {
                let sum = (0..n).fold(numkernel::zeros(self.system_dim, self.system_dim), |acc, i| {
                    acc + self.blocks[k][i].adjoint() * &self.blocks[k][i]
                });
                (sum - identity(self.system_dim)).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Frobenius norm of the blockwise difference.
    pub fn distance(&self, other: &KrausBlocks) -> Result<f64> {
        if self.ancilla_dim() != other.ancilla_dim() || self.system_dim != other.system_dim {
            return Err(Error::DimensionMismatch("Kraus block arrays differ in shape".into()));
        }
        let mut sq = 0.0;
        for (ra, rb) in self.blocks.iter().zip(&other.blocks) {
            for (a, b) in ra.iter().zip(rb) {
                sq += (a - b).norm_squared();
            }
        }
        Ok(sq.sqrt())
    }
}

fn check_duration(h: f64) -> Result<()> {
    if h > 0.0 && h.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveDuration(h))
    }
}

/// `U = U^B U^A`.
pub fn step_unitary(m: &BipartiteModel, h: f64) -> Result<ComplexMatrix> {
    step_unitary_ordered(m, h, InteractionOrder::AThenB)
}

pub fn step_unitary_ordered(m: &BipartiteModel, h: f64, order: InteractionOrder) -> Result<ComplexMatrix> {
    check_duration(h)?;
    let factor = C64::new(0.0, -h);
    let u_a = expm_hermitian(&h_tot_a(m, h)?, factor)?;
    let u_b = expm_hermitian(&h_tot_b(m, h)?, factor)?;
    Ok(match order {
        InteractionOrder::AThenB => u_b * u_a,
        InteractionOrder::BThenA => u_a * u_b,
    })
}

/// Splits an operator on `system ⊗ ancilla` into its Kraus blocks.
pub fn kraus_blocks(u: &ComplexMatrix, system_dim: usize, ancilla_dim: usize) -> Result<KrausBlocks> {
    let total = system_dim * ancilla_dim;
    if u.shape() != (total, total) {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {total}x{total} for system {system_dim} and ancilla {ancilla_dim}",
            u.nrows(),
            u.ncols()
        )));
    }
    let n = ancilla_dim;
    let blocks = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ComplexMatrix::from_fn(system_dim, system_dim, |s, t| u[(s * n + j, t * n + i)]))
                .collect()
        })
        .collect();
    KrausBlocks::new(system_dim, blocks)
}

/// Closed-form Kraus blocks of `U^B U^A` up to terms of order `h^{3/2}`.
pub fn asymptotic_kraus(m: &BipartiteModel, h: f64) -> Result<KrausBlocks> {
    check_duration(h)?;
    let d = m.system_dim();
    let n = m.ancilla_dim();
    let id = identity(d);
    let free = m.free_hamiltonian();
    let sqrt_h = re(h.sqrt());
    let hh = re(h);
    let half_h = re(0.5 * h);
    let vs: Vec<ComplexMatrix> = (0..m.channels()).map(|k| m.v_lifted(k)).collect();
    let ws: Vec<ComplexMatrix> = (0..m.channels()).map(|k| m.w_lifted(k)).collect();
    let va = |k: usize| &m.v()[k];
    let wb = |k: usize| &m.w()[k];

    let mut blocks = vec![vec![numkernel::zeros(d, d); n]; n];

    // U^0_0
    let mut dissip = numkernel::zeros(d, d);
    for k in 0..m.channels() {
        dissip += vs[k].adjoint() * &vs[k] + ws[k].adjoint() * &ws[k]
            + kron(va(k), &wb(k).adjoint()) * re(2.0);
    }
    blocks[0][0] = &id - (&free + &id * re(2.0 * m.lambda()[0])) * (I * hh) - dissip * half_h;

    for k in 0..m.channels() {
        let j = k + 1;
        // U^j_0 and U^0_j
        blocks[j][0] = (vs[k].adjoint() + ws[k].adjoint()) * (-I * sqrt_h);
        blocks[0][j] = (&vs[k] + &ws[k]) * (-I * sqrt_h);
        // U^j_j
        let diss = &vs[k] * vs[k].adjoint() + &ws[k] * ws[k].adjoint()
            + kron(&va(k).adjoint(), wb(k)) * re(2.0);
        blocks[j][j] = &id - (&free + &id * re(2.0 * m.lambda()[j])) * (I * hh) - diss * half_h;
        // U^k_j for k != j (here: blocks[col][row] with col = q + 1 ≠ j)
        for q in 0..m.channels() {
            if q == k {
                continue;
            }
            let col = q + 1;
            let cross = &vs[k] * vs[q].adjoint() + &ws[k] * ws[q].adjoint()
                + kron(&va(q).adjoint(), wb(k)) * re(2.0);
            blocks[col][j] = cross * (-half_h);
        }
    }
    KrausBlocks::new(d, blocks)
}

/// Reduced channel `ρ ↦ Σ_{j,k} w_k U^k_j ρ (U^k_j)*`.
pub fn channel_from_blocks(blocks: &KrausBlocks, weights: &[f64]) -> Result<Superoperator> {
    if weights.len() != blocks.ancilla_dim() {
        return Err(Error::InvalidWeights(format!(
            "{} weights for {} ancilla levels",
            weights.len(),
            blocks.ancilla_dim()
        )));
    }
    let mut terms: Vec<(f64, &ComplexMatrix, ComplexMatrix)> = Vec::new();
    for (k, &wk) in weights.iter().enumerate() {
        if wk == 0.0 {
            continue;
        }
        for j in 0..blocks.ancilla_dim() {
            let b = blocks.get(k, j);
            terms.push((wk, b, b.adjoint()));
        }
    }
    Ok(Superoperator::from_map(blocks.system_dim(), |x| {
        terms
            .iter()
            .fold(numkernel::zeros(x.nrows(), x.ncols()), |acc, (wk, b, b_adj)| {
                acc + (*b * x * b_adj) * re(*wk)
            })
    }))
}

/// One-step reduced channel `l(h)` for the given ancilla reference state.
pub fn channel(m: &BipartiteModel, h: f64, ancilla: &AncillaState) -> Result<Superoperator> {
    channel_ordered(m, h, ancilla, InteractionOrder::AThenB)
}

pub fn channel_ordered(
    m: &BipartiteModel,
    h: f64,
    ancilla: &AncillaState,
    order: InteractionOrder,
) -> Result<Superoperator> {
    let weights = ancilla.weights(m.lambda())?;
    let u = step_unitary_ordered(m, h, order)?;
    let blocks = kraus_blocks(&u, m.system_dim(), m.ancilla_dim())?;
    channel_from_blocks(&blocks, &weights)
}

/// `steps` iterations of the one-step channel, returning `steps + 1` states
/// (the initial one first).
///
/// Every iterate is checked against the density-matrix constraints with
/// tolerance `tol`; a violation is reported, never corrected.
pub fn simulate_with_tol(
    m: &BipartiteModel,
    h: f64,
    steps: usize,
    ancilla: &AncillaState,
    rho0: &DensityMatrix,
    tol: f64,
) -> Result<Vec<DensityMatrix>> {
    if rho0.dim() != m.system_dim() {
        return Err(Error::InvalidState(format!(
            "initial state is {0}x{0}, system is {1}x{1}",
            rho0.dim(),
            m.system_dim()
        )));
    }
    DensityMatrix::check(rho0.matrix(), tol)?;
    let step = channel(m, h, ancilla)?;
    let d = m.system_dim();
    let mut states = Vec::with_capacity(steps + 1);
    states.push(rho0.clone());
    let mut current = numkernel::vectorize(rho0.matrix());
    for n in 1..=steps {
        current = step.matrix() * current;
        let rho = numkernel::unvectorize(&current, d)?;
        DensityMatrix::check(&rho, tol).map_err(|e| Error::NumericalDrift {
            step: n,
            reason: e.to_string(),
        })?;
        states.push(DensityMatrix::new_unchecked(rho));
    }
    Ok(states)
}

pub fn simulate(
    m: &BipartiteModel,
    h: f64,
    steps: usize,
    ancilla: &AncillaState,
    rho0: &DensityMatrix,
) -> Result<Vec<DensityMatrix>> {
    simulate_with_tol(m, h, steps, ancilla, rho0, DensityMatrix::DEFAULT_TOL)
}

/// Limits `L^0_0 = lim (U^0_0 - I)/h` and `L^0_j = lim U^0_j / √h`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCoefficients {
    pub drift: ComplexMatrix,
    /// `L^0_j`, `j = 1..N` (zero-based).
    pub jumps: Vec<ComplexMatrix>,
}

/// Expansion `U = I + √h c_half + h c_one + O(h^{3/2})` of a step unitary,
/// split into Kraus blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitSeries {
    pub half: KrausBlocks,
    pub one: KrausBlocks,
}

impl LimitSeries {
    fn from_operators(
        c_half: &ComplexMatrix,
        c_one: &ComplexMatrix,
        system_dim: usize,
        ancilla_dim: usize,
    ) -> Result<Self> {
        Ok(Self {
            half: kraus_blocks(c_half, system_dim, ancilla_dim)?,
            one: kraus_blocks(c_one, system_dim, ancilla_dim)?,
        })
    }

    /// Coefficients driving the ground-ancilla channel.
    pub fn ground_coefficients(&self) -> LimitCoefficients {
        LimitCoefficients {
            drift: self.one.get(0, 0).clone(),
            jumps: (1..self.half.ancilla_dim())
                .map(|j| self.half.get(0, j).clone())
                .collect(),
        }
    }
}

/// Series of `exp(-i h (free + coupling / √h))`.
fn stage(free: &ComplexMatrix, coupling: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    (coupling * (-I), free * (-I) - (coupling * coupling) * re(0.5))
}

/// Series of the two-stage step, obtained by multiplying the truncated
/// series of both stages in the requested order.
pub fn limit_series(m: &BipartiteModel, order: InteractionOrder) -> Result<LimitSeries> {
    let (free_a, coupling_a) = m.stage_parts(Party::A);
    let (free_b, coupling_b) = m.stage_parts(Party::B);
    let a = stage(&free_a, &coupling_a);
    let b = stage(&free_b, &coupling_b);
    let (first, second) = match order {
        InteractionOrder::AThenB => (&a, &b),
        InteractionOrder::BThenA => (&b, &a),
    };
    let c_half = &first.0 + &second.0;
    let c_one = &first.1 + &second.1 + &second.0 * &first.0;
    LimitSeries::from_operators(&c_half, &c_one, m.system_dim(), m.ancilla_dim())
}

/// Series of a single-stage step `exp(-i h (free + coupling / √h))`.
pub fn limit_series_single_stage(
    free: &ComplexMatrix,
    coupling: &ComplexMatrix,
    system_dim: usize,
    ancilla_dim: usize,
) -> Result<LimitSeries> {
    let (c_half, c_one) = stage(free, coupling);
    LimitSeries::from_operators(&c_half, &c_one, system_dim, ancilla_dim)
}

pub fn limit_coefficients(m: &BipartiteModel, order: InteractionOrder) -> Result<LimitCoefficients> {
    Ok(limit_series(m, order)?.ground_coefficients())
}

/// Closed-form limit coefficients of the two-stage scheme:
/// `L^0_0 = -i(H^A⊗I + I⊗H^B + 2λ_0) - ½ Σ_j (V_j*V_j⊗I + I⊗W_j*W_j + 2 V_j⊗W_j*)`,
/// `L^0_j = -i(V_j⊗I + I⊗W_j)`.
pub fn limit_coefficients_closed_form(m: &BipartiteModel) -> LimitCoefficients {
    let d = m.system_dim();
    let id = identity(d);
    let mut drift = (m.free_hamiltonian() + &id * re(2.0 * m.lambda()[0])) * (-I);
    let mut jumps = Vec::with_capacity(m.channels());
    for k in 0..m.channels() {
        let (v, w) = (m.v_lifted(k), m.w_lifted(k));
        drift -= (v.adjoint() * &v + w.adjoint() * &w + kron(&m.v()[k], &m.w()[k].adjoint()) * re(2.0))
            * re(0.5);
        jumps.push((v + w) * (-I));
    }
    LimitCoefficients { drift, jumps }
}
