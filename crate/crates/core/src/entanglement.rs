//! Two-qubit entanglement: X states, Wootters concurrence, entanglement of
//! formation, and closed-form trajectories of the spontaneous-emission model.
//!
//! Matrices are written in the basis `(e0⊗e0, e0⊗e1, e1⊗e0, e1⊗e1)`.

use crate::lindblad::evolve_with_tol;
use crate::numkernel::{self, herm_eig, hermitian_part, re, ComplexMatrix, DensityMatrix, C64};
use crate::superop::Superoperator;
use crate::{Error, Result};

/// Default absolute tolerance on the entries an X state must not have.
pub const X_TOL: f64 = 1e-9;

/// ```text
/// a 0 0 y
/// 0 b x 0
/// 0 x̄ c 0
/// ȳ 0 0 d
/// ```
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XState {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub x: C64,
    pub y: C64,
}

impl XState {
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = numkernel::diag(&[self.a, self.b, self.c, self.d]);
        m[(0, 3)] = self.y;
        m[(3, 0)] = self.y.conj();
        m[(1, 2)] = self.x;
        m[(2, 1)] = self.x.conj();
        m
    }

    /// Checks the state conditions: non-negative populations summing to
    /// one and `|y|² ≤ ad`, `|x|² ≤ bc`.
    pub fn validate(&self) -> Result<()> {
        let pops = [self.a, self.b, self.c, self.d];
        if pops.iter().any(|p| *p < -1e-12 || !p.is_finite()) {
            return Err(Error::InvalidState(format!("negative population in {pops:?}")));
        }
        let total: f64 = pops.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("populations sum to {total}")));
        }
        if self.y.norm_sqr() > self.a * self.d + 1e-12 {
            return Err(Error::InvalidState("|y|² exceeds ad".into()));
        }
        if self.x.norm_sqr() > self.b * self.c + 1e-12 {
            return Err(Error::InvalidState("|x|² exceeds bc".into()));
        }
        Ok(())
    }

    /// `max(|y| - √(bc), |x| - √(ad))`; the state is entangled exactly when
    /// this is positive.
    pub fn witness(&self) -> f64 {
        let bc = (self.b * self.c).max(0.0).sqrt();
        let ad = (self.a * self.d).max(0.0).sqrt();
        (self.y.norm() - bc).max(self.x.norm() - ad)
    }
}

/// Why a matrix was not classified as an X state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NotXState {
    /// Not a 4x4 matrix.
    WrongDimension(usize),
    /// Largest modulus among the entries outside the X pattern.
    Residual(f64),
}

const X_PATTERN: [(usize, usize); 8] = [(0, 0), (1, 1), (2, 2), (3, 3), (0, 3), (3, 0), (1, 2), (2, 1)];

/// Largest modulus of the entries outside the X pattern of a 4x4 matrix.
pub fn x_residual(m: &ComplexMatrix) -> Result<f64> {
    if m.shape() != (4, 4) {
        return Err(Error::DimensionMismatch(format!(
            "X states are 4x4, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let mut worst = 0.0_f64;
    for r in 0..4 {
        for c in 0..4 {
            if !X_PATTERN.contains(&(r, c)) {
                worst = worst.max(m[(r, c)].norm());
            }
        }
    }
    Ok(worst)
}

pub fn as_x_state(rho: &DensityMatrix, tol: f64) -> std::result::Result<XState, NotXState> {
    let m = rho.matrix();
    let residual = x_residual(m).map_err(|_| NotXState::WrongDimension(rho.dim()))?;
    if residual > tol {
        return Err(NotXState::Residual(residual));
    }
    Ok(XState {
        a: m[(0, 0)].re,
        b: m[(1, 1)].re,
        c: m[(2, 2)].re,
        d: m[(3, 3)].re,
        x: (m[(1, 2)] + m[(2, 1)].conj()) * re(0.5),
        y: (m[(0, 3)] + m[(3, 0)].conj()) * re(0.5),
    })
}

/// `C = 2 max(0, |y| - √(bc), |x| - √(ad))`.
pub fn concurrence_x(s: &XState) -> f64 {
    2.0 * s.witness().max(0.0)
}

/// Wootters concurrence `max(0, μ_1 - μ_2 - μ_3 - μ_4)`, with `μ_k` the
/// decreasing square roots of the eigenvalues of `ρ (σ_y⊗σ_y) ρ̄ (σ_y⊗σ_y)`.
///
/// The `μ_k` are computed as the singular values of `√ρ √ρ̃`.
pub fn concurrence_general(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs a two-qubit state, got dimension {}",
            rho.dim()
        )));
    }
    let m = hermitian_part(rho.matrix());
    let yy = numkernel::kron(&sigma_y(), &sigma_y());
    let tilde = &yy * m.map(|z| z.conj()) * &yy;
    let sqrt_psd = |a: &ComplexMatrix| -> Result<ComplexMatrix> {
        Ok(herm_eig(a)?.map(|l| re(l.max(0.0).sqrt())))
    };
    let product = sqrt_psd(&m)? * sqrt_psd(&hermitian_part(&tilde))?;
    let mut mu: Vec<f64> = product.singular_values().iter().copied().collect();
    mu.sort_by(|a, b| b.total_cmp(a));
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

fn sigma_y() -> ComplexMatrix {
    let mut s = numkernel::zeros(2, 2);
    s[(0, 1)] = C64::new(0.0, -1.0);
    s[(1, 0)] = C64::new(0.0, 1.0);
    s
}

/// Concurrence of a two-qubit state: the X-state formula when the state has
/// X form within `tol`, the general construction otherwise.
pub fn concurrence(rho: &DensityMatrix, tol: f64) -> Result<f64> {
    match as_x_state(rho, tol) {
        Ok(s) => Ok(concurrence_x(&s)),
        Err(_) => concurrence_general(rho),
    }
}

/// `h(x) = -x log2 x - (1-x) log2(1-x)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

/// Entanglement of formation `E = h((1 + √(1 - C²)) / 2)`.
pub fn eof(c: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&c) {
        return Err(Error::ConcurrenceOutOfRange(c));
    }
    let c = c.clamp(0.0, 1.0);
    Ok(binary_entropy((1.0 + (1.0 - c * c).sqrt()) / 2.0))
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::NegativeTime(t))
    }
}

fn x_state_density(s: XState) -> DensityMatrix {
    DensityMatrix::new_unchecked(s.to_matrix())
}

/// `e^{tL}(|e0⊗e0><e0⊗e0|)`: the invariant ground state.
pub fn closed_form_rho00(t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    DensityMatrix::basis_state(4, 0)
}

/// `e^{tL}(|e0⊗e1><e0⊗e1|) = diag(1 - e^{-t}, e^{-t}, 0, 0)`.
pub fn closed_form_rho01(t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let e = (-t).exp();
    Ok(x_state_density(XState { a: 1.0 - e, b: e, c: 0.0, d: 0.0, x: re(0.0), y: re(0.0) }))
}

/// `e^{tL}(|e1⊗e0><e1⊗e0|)`: populations `1 - (1+t²)e^{-t}`, `t²e^{-t}`,
/// `e^{-t}`, `0` and coherence `-t e^{-t}`.
pub fn closed_form_rho10(t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let e = (-t).exp();
    Ok(x_state_density(XState {
        a: 1.0 - (1.0 + t * t) * e,
        b: t * t * e,
        c: e,
        d: 0.0,
        x: re(-t * e),
        y: re(0.0),
    }))
}

/// `e^{tL}(|e1⊗e1><e1⊗e1|)`: populations
/// `1 - (t²-4t+6)e^{-t} + 5e^{-2t}`, `(t²-4t+5)e^{-t} - 5e^{-2t}`,
/// `e^{-t} - e^{-2t}`, `e^{-2t}` and real coherence `(2-t)e^{-t} - 2e^{-2t}`
/// in both off-diagonal positions.
pub fn closed_form_rho11(t: f64) -> Result<DensityMatrix> {
    check_time(t)?;
    let e1 = (-t).exp();
    let e2 = (-2.0 * t).exp();
    Ok(x_state_density(XState {
        a: 1.0 - (t * t - 4.0 * t + 6.0) * e1 + 5.0 * e2,
        b: (t * t - 4.0 * t + 5.0) * e1 - 5.0 * e2,
        c: e1 - e2,
        d: e2,
        x: re((2.0 - t) * e1 - 2.0 * e2),
        y: re(0.0),
    }))
}

/// First time in `[lo, hi]` at which `witness` turns positive, located by
/// bisection to within `tol`. Requires `witness(lo) ≤ 0 < witness(hi)`;
/// returns `None` otherwise.
pub fn onset_time(
    mut witness: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<Option<f64>> {
    let (mut lo, mut hi) = (lo, hi);
    if witness(lo)? > 0.0 || witness(hi)? <= 0.0 {
        return Ok(None);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if witness(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(0.5 * (lo + hi)))
}

/// One row of an entanglement curve.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementSample {
    pub t: f64,
    pub concurrence: f64,
    pub eof: f64,
    /// Diagonal of the state in the basis `(e0e0, e0e1, e1e0, e1e1)`.
    pub populations: [f64; 4],
    pub x_residual: f64,
}

/// Entanglement time series of a two-qubit trajectory `e^{tL}(ρ_0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementReport {
    pub samples: Vec<EntanglementSample>,
}

pub fn entanglement_curve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: f64,
) -> Result<EntanglementReport> {
    if l.dim() != 4 {
        return Err(Error::DimensionMismatch(format!(
            "entanglement curves need a two-qubit generator, got dimension {}",
            l.dim()
        )));
    }
    let samples = times
        .iter()
        .map(|&t| {
            let rho = evolve_with_tol(l, rho0, t, tol)?;
            let c = concurrence(&rho, X_TOL)?;
            let p = rho.populations();
            Ok(EntanglementSample {
                t,
                concurrence: c,
                eof: eof(c.min(1.0))?,
                populations: [p[0], p[1], p[2], p[3]],
                x_residual: x_residual(rho.matrix())?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EntanglementReport { samples })
}
