//! Random operators, states and models for property tests and benchmarks.

use rand::Rng;

use crate::entanglement::XState;
use crate::model::BipartiteModel;
use crate::numkernel::{c, re, ComplexMatrix, ComplexVector, DensityMatrix, C64};

/// Standard normal sample (Box-Muller).
pub fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(normal(rng), normal(rng)) / re(2f64.sqrt())
}

/// Matrix with i.i.d. standard complex Gaussian entries.
pub fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| complex_normal(rng))
}

pub fn hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(d, rng);
    (&g + g.adjoint()) * re(0.5)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexMatrix {
    let qr = ginibre(d, rng).qr();
    let (mut q, r) = qr.unpack();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 { diag / re(diag.norm()) } else { re(1.0) };
        for row in 0..d {
            q[(row, k)] *= phase;
        }
    }
    q
}

pub fn pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> ComplexVector {
    let v = ComplexVector::from_fn(d, |_, _| complex_normal(rng));
    let n = v.norm();
    v / re(n)
}

/// Full-rank random state `G G* / tr(G G*)`.
pub fn density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, rng);
    let m = &g * g.adjoint();
    let tr = m.trace();
    DensityMatrix::new_unchecked(m / tr)
}

/// Random valid two-qubit X state.
pub fn x_state<R: Rng + ?Sized>(rng: &mut R) -> XState {
    let raw: Vec<f64> = (0..4).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let [a, b, cc, d] = [raw[0] / total, raw[1] / total, raw[2] / total, raw[3] / total];
    let phase = |rng: &mut R| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * rng.random::<f64>());
    let y = phase(rng) * re((a * d).sqrt() * rng.random::<f64>());
    let x = phase(rng) * re((b * cc).sqrt() * rng.random::<f64>());
    XState { a, b, c: cc, d, x, y }
}

/// Model with Gaussian free Hamiltonians, ancilla energies and couplings.
pub fn model<R: Rng + ?Sized>(
    dim_a: usize,
    dim_b: usize,
    channels: usize,
    rng: &mut R,
) -> BipartiteModel {
    let h_a = hermitian(dim_a, rng);
    let h_b = hermitian(dim_b, rng);
    let lambda: Vec<f64> = (0..=channels).map(|_| normal(rng)).collect();
    let v = (0..channels).map(|_| ginibre(dim_a, rng) * re(0.6)).collect();
    let w = (0..channels).map(|_| ginibre(dim_b, rng) * re(0.6)).collect();
    BipartiteModel::new(h_a, h_b, lambda, v, w).expect("random model is valid")
}
