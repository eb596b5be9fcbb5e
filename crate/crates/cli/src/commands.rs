//! Command bodies. Each returns the full text it would print.

use birqi::discrete::simulate_with_tol;
use birqi::entanglement::entanglement_curve as curve;
use birqi::equilibrium::{convergence_study, invariant_gibbs, return_to_equilibrium_check};
use birqi::lindblad::{self, evolve_with_tol, generator_for};
use birqi::numkernel::{trace_distance, ComplexMatrix};
use birqi::{AncillaState, BipartiteModel, DensityMatrix};
use serde_json::{json, Value};

use crate::format::{csv_row, num};
use crate::CliError;

pub const CURVE_HEADER: &str = "t,concurrence,eof,pop_00,pop_01,pop_10,pop_11,x_residual";
pub const CONVERGENCE_HEADER: &str = "h,steps,trace_distance,observed_order";
pub const THERMAL_HEADER: &str = "t,trace_distance_to_gibbs";

/// Below this the distances are roundoff and their ratios carry no order.
const ORDER_FLOOR: f64 = 1e-14;

fn require_qubits(m: &BipartiteModel) -> Result<(), CliError> {
    if m.dim_a() != 2 || m.dim_b() != 2 {
        return Err(CliError::Config(format!(
            "entanglement commands need a two-qubit system, got dim_A = {}, dim_B = {}",
            m.dim_a(),
            m.dim_b()
        )));
    }
    Ok(())
}

pub fn entanglement_curve(
    m: &BipartiteModel,
    ancilla: &AncillaState,
    rho0: &DensityMatrix,
    times: &[f64],
    tol: f64,
) -> Result<String, CliError> {
    require_qubits(m)?;
    let l = generator_for(m, ancilla)?;
    let report = curve(&l, rho0, times, tol)?;
    let mut out = format!("{CURVE_HEADER}\n");
    for s in &report.samples {
        let mut fields = vec![num(s.t), num(s.concurrence), num(s.eof)];
        fields.extend(s.populations.iter().map(|&p| num(p)));
        fields.push(num(s.x_residual));
        out.push_str(&csv_row(&fields));
    }
    Ok(out)
}

/// Number of steps of size `h` in `t`, which must be a whole number.
fn step_count(t: f64, h: f64) -> Result<usize, CliError> {
    let n = (t / h).round();
    if (n * h - t).abs() > 1e-9 * t.max(1.0) {
        return Err(CliError::Usage(format!("t = {t} is not a multiple of h = {h}")));
    }
    Ok(n as usize)
}

pub fn convergence(
    m: &BipartiteModel,
    ancilla: &AncillaState,
    rho0: &DensityMatrix,
    t: f64,
    hs: &[f64],
    tol: f64,
) -> Result<String, CliError> {
    if hs.is_empty() {
        return Err(CliError::Usage("--h needs at least one step size".into()));
    }
    if let Some(bad) = hs.iter().find(|h| !(**h > 0.0 && h.is_finite())) {
        return Err(CliError::Usage(format!("step sizes must be positive, got {bad}")));
    }
    if hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::Usage("step sizes must be strictly decreasing".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(CliError::Usage(format!("time must be non-negative, got {t}")));
    }
    let l = generator_for(m, ancilla)?;
    let exact = evolve_with_tol(&l, rho0, t, tol)?;
    let mut out = format!("{CONVERGENCE_HEADER}\n");
    let mut previous: Option<(f64, f64)> = None;
    for &h in hs {
        let steps = step_count(t, h)?;
        let states = simulate_with_tol(m, h, steps, ancilla, rho0, tol)?;
        let d = trace_distance(states.last().expect("initial state present"), &exact)?;
        let order = match previous {
            Some((h0, d0)) if d0 > ORDER_FLOOR && d > ORDER_FLOOR => num((d0 / d).ln() / (h0 / h).ln()),
            _ => String::new(),
        };
        out.push_str(&csv_row(&[num(h), steps.to_string(), num(d), order]));
        previous = Some((h, d));
    }
    Ok(out)
}

fn rounded(x: f64) -> f64 {
    num(x).parse().expect("formatted number parses")
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| {
                Value::Array(
                    (0..m.ncols())
                        .map(|j| json!([rounded(m[(i, j)].re), rounded(m[(i, j)].im)]))
                        .collect(),
                )
            })
            .collect(),
    )
}

fn matrix_text(m: &ComplexMatrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("[{}, {}]", num(m[(i, j)].re), num(m[(i, j)].im)))
            .collect();
        out.push_str("  ");
        out.push_str(&row.join("  "));
        out.push('\n');
    }
    out
}

pub fn effective_hamiltonian(m: &BipartiteModel, beta: Option<f64>, as_json: bool) -> Result<String, CliError> {
    let ancilla = match beta {
        Some(beta) => AncillaState::Gibbs { beta },
        None => AncillaState::Ground,
    };
    let weights = ancilla.weights(m.lambda())?;
    let h = lindblad::effective_hamiltonian(m, &ancilla)?;
    if as_json {
        let doc = json!({
            "ancilla": match beta { Some(_) => "gibbs", None => "ground" },
            "beta": beta,
            "weights": weights.iter().map(|&w| rounded(w)).collect::<Vec<_>>(),
            "total": matrix_json(&h.total),
            "interaction": matrix_json(&h.interaction),
        });
        return Ok(format!("{}\n", serde_json::to_string_pretty(&doc).expect("json serializes")));
    }
    let mut out = match beta {
        Some(b) => format!("ancilla: gibbs beta={}\n", num(b)),
        None => "ancilla: ground\n".to_string(),
    };
    let w: Vec<String> = weights.iter().map(|&w| num(w)).collect();
    out.push_str(&format!("weights: {}\n", w.join(" ")));
    out.push_str("H_eff:\n");
    out.push_str(&matrix_text(&h.total));
    out.push_str("interaction:\n");
    out.push_str(&matrix_text(&h.interaction));
    Ok(out)
}

/// CSV of distances to the Gibbs state and the verdict text.
pub struct ThermalOutput {
    pub csv: String,
    pub verdict: String,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn optional(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".into())
}

pub fn thermal(
    m: &BipartiteModel,
    beta: f64,
    rho0: &DensityMatrix,
    times: &[f64],
    as_json: bool,
) -> Result<ThermalOutput, CliError> {
    let report = return_to_equilibrium_check(m, beta)?;
    let table = convergence_study(m, beta, rho0, times)?;
    let mut csv = format!("{THERMAL_HEADER}\n");
    for (t, d) in table.times.iter().zip(&table.distances) {
        csv.push_str(&csv_row(&[num(*t), num(*d)]));
    }
    let verdict = if as_json {
        let gibbs = invariant_gibbs(m, beta)?;
        let unique = report.invariant_state.as_ref().filter(|_| report.kernel_dim == 1);
        let doc = json!({
            "beta": beta,
            "verdict": report.verdict.to_string(),
            "commutants_equal": report.commutants_equal,
            "jump_commutant_dim": report.jump_commutant.dimension,
            "full_commutant_dim": report.full_commutant.dimension,
            "faithful_invariant_state": report.faithful_invariant_state,
            "kernel_dim": report.kernel_dim,
            "spectral_certificate": report.spectral_certificate,
            "gibbs_residual": rounded(report.gibbs_residual),
            "spectral_gap": report.spectral_gap.map(rounded),
            "fitted_rate": table.fitted_rate.map(rounded),
            "gibbs_state": matrix_json(gibbs.matrix()),
            "invariant_state": unique.map(|s| matrix_json(s.matrix())),
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("json serializes"))
    } else {
        format!(
            "verdict: {}; gibbs residual {}; spectral gap {}; fitted rate {}; kernel dim {}; \
             commutants equal {} ({} vs {}); faithful invariant state {}\n",
            report.verdict,
            num(report.gibbs_residual),
            optional(report.spectral_gap),
            optional(table.fitted_rate),
            report.kernel_dim,
            yes_no(report.commutants_equal),
            report.jump_commutant.dimension,
            report.full_commutant.dimension,
            yes_no(report.faithful_invariant_state),
        )
    };
    Ok(ThermalOutput { csv, verdict })
}
