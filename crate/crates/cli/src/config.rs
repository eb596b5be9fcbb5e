//! TOML model description.
//!
//! ```toml
//! dim_A = 2
//! dim_B = 2
//! ancilla_dim = 2
//! H_A = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
//! H_B = [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
//! lambda = [1.0, -1.0]
//! V = [[[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]]
//! W = [[[[0.0, 0.0], [0.0, 0.0]], [[1.0, 0.0], [0.0, 0.0]]]]
//! ```
//!
//! Matrices are row-major nested arrays of `[re, im]` pairs. A document may
//! instead consist of `preset = "emission"` or `preset = "thermal:N"`.

use birqi::numkernel::{c, ComplexMatrix};
use birqi::BipartiteModel;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type RawMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(rename = "dim_A", default, skip_serializing_if = "Option::is_none")]
    pub dim_a: Option<usize>,
    #[serde(rename = "dim_B", default, skip_serializing_if = "Option::is_none")]
    pub dim_b: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ancilla_dim: Option<usize>,
    #[serde(rename = "H_A", default, skip_serializing_if = "Option::is_none")]
    pub h_a: Option<RawMatrix>,
    #[serde(rename = "H_B", default, skip_serializing_if = "Option::is_none")]
    pub h_b: Option<RawMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<RawMatrix>>,
    #[serde(rename = "W", default, skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<RawMatrix>>,
}

impl ModelConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {}", e.message())))
    }

    pub fn from_model(m: &BipartiteModel) -> Self {
        Self {
            preset: None,
            dim_a: Some(m.dim_a()),
            dim_b: Some(m.dim_b()),
            ancilla_dim: Some(m.ancilla_dim()),
            h_a: Some(to_raw(m.h_a())),
            h_b: Some(to_raw(m.h_b())),
            lambda: Some(m.lambda().to_vec()),
            v: Some(m.v().iter().map(to_raw).collect()),
            w: Some(m.w().iter().map(to_raw).collect()),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn build(&self) -> Result<BipartiteModel, CliError> {
        if let Some(name) = &self.preset {
            let explicit = self.dim_a.is_some()
                || self.dim_b.is_some()
                || self.ancilla_dim.is_some()
                || self.h_a.is_some()
                || self.h_b.is_some()
                || self.lambda.is_some()
                || self.v.is_some()
                || self.w.is_some();
            if explicit {
                return Err(field_error("preset", "cannot be combined with explicit model fields"));
            }
            return preset(name);
        }
        let dim_a = required(self.dim_a, "dim_A")?;
        let dim_b = required(self.dim_b, "dim_B")?;
        let ancilla_dim = required(self.ancilla_dim, "ancilla_dim")?;
        for (name, d) in [("dim_A", dim_a), ("dim_B", dim_b), ("ancilla_dim", ancilla_dim)] {
            if d == 0 {
                return Err(field_error(name, "must be positive"));
            }
        }
        let h_a = matrix(required(self.h_a.as_ref(), "H_A")?, dim_a, "H_A")?;
        let h_b = matrix(required(self.h_b.as_ref(), "H_B")?, dim_b, "H_B")?;
        let lambda = required(self.lambda.as_ref(), "lambda")?.clone();
        if lambda.len() != ancilla_dim {
            return Err(field_error(
                "lambda",
                &format!("has {} entries, ancilla_dim is {ancilla_dim}", lambda.len()),
            ));
        }
        let v = operator_list(required(self.v.as_ref(), "V")?, dim_a, ancilla_dim, "V")?;
        let w = operator_list(required(self.w.as_ref(), "W")?, dim_b, ancilla_dim, "W")?;
        BipartiteModel::new(h_a, h_b, lambda, v, w).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// `emission` or `thermal:N`.
pub fn preset(name: &str) -> Result<BipartiteModel, CliError> {
    if name == "emission" {
        return Ok(BipartiteModel::emission());
    }
    if let Some(n) = name.strip_prefix("thermal:") {
        let channels: usize = n
            .parse()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| field_error("preset", &format!("thermal channel count `{n}` is not a positive integer")))?;
        return Ok(BipartiteModel::thermal_exchange(channels));
    }
    Err(field_error(
        "preset",
        &format!("unknown preset `{name}` (expected `emission` or `thermal:N`)"),
    ))
}

pub fn load(path: &std::path::Path) -> Result<BipartiteModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    ModelConfig::parse(&text)?.build()
}

fn field_error(field: &str, msg: &str) -> CliError {
    CliError::Config(format!("field `{field}`: {msg}"))
}

fn required<T>(value: Option<T>, field: &str) -> Result<T, CliError> {
    value.ok_or_else(|| field_error(field, "missing"))
}

pub fn to_raw(m: &ComplexMatrix) -> RawMatrix {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn matrix(raw: &RawMatrix, dim: usize, field: &str) -> Result<ComplexMatrix, CliError> {
    if raw.len() != dim {
        return Err(field_error(field, &format!("has {} rows, expected {dim}", raw.len())));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (i, row) in raw.iter().enumerate() {
        if row.len() != dim {
            return Err(field_error(
                field,
                &format!("row {i} has {} entries, expected {dim}", row.len()),
            ));
        }
        for (j, [x, y]) in row.iter().enumerate() {
            if !(x.is_finite() && y.is_finite()) {
                return Err(field_error(field, &format!("entry ({i}, {j}) is not finite")));
            }
            m[(i, j)] = c(*x, *y);
        }
    }
    Ok(m)
}

fn operator_list(
    raw: &[RawMatrix],
    dim: usize,
    ancilla_dim: usize,
    field: &str,
) -> Result<Vec<ComplexMatrix>, CliError> {
    let expected = ancilla_dim - 1;
    if raw.len() != expected {
        return Err(field_error(
            field,
            &format!("has {} operators, ancilla_dim {ancilla_dim} needs {expected}", raw.len()),
        ));
    }
    raw.iter()
        .enumerate()
        .map(|(k, m)| matrix(m, dim, &format!("{field}[{k}]")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn emission_round_trip() {
        let m = BipartiteModel::emission();
        let text = ModelConfig::from_model(&m).to_toml();
        let back = ModelConfig::parse(&text).unwrap().build().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn thermal_round_trip_keeps_bits() {
        let m = BipartiteModel::thermal_exchange(3);
        let text = ModelConfig::from_model(&m).to_toml();
        let back = ModelConfig::parse(&text).unwrap().build().unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn preset_names() {
        assert_eq!(preset("emission").unwrap(), BipartiteModel::emission());
        assert_eq!(preset("thermal:2").unwrap(), BipartiteModel::thermal_exchange(2));
        assert!(preset("thermal:0").is_err());
        assert!(preset("laser").is_err());
    }

    #[test]
    fn integer_entries_accepted() {
        let text = r#"
            dim_A = 1
            dim_B = 1
            ancilla_dim = 1
            H_A = [[[1, 0]]]
            H_B = [[[0, 0]]]
            lambda = [0]
            V = []
            W = []
        "#;
        let m = ModelConfig::parse(text).unwrap().build().unwrap();
        assert_eq!(m.system_dim(), 1);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let mut cfg = ModelConfig::from_model(&BipartiteModel::emission());
        cfg.lambda = Some(vec![1.0]);
        let err = cfg.build().unwrap_err().to_string();
        assert!(err.contains("lambda"), "{err}");

        let mut cfg = ModelConfig::from_model(&BipartiteModel::emission());
        cfg.v.as_mut().unwrap()[0].pop();
        let err = cfg.build().unwrap_err().to_string();
        assert!(err.contains("V[0]"), "{err}");

        let mut cfg = ModelConfig::from_model(&BipartiteModel::emission());
        cfg.h_b = None;
        let err = cfg.build().unwrap_err().to_string();
        assert!(err.contains("H_B"), "{err}");
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut cfg = ModelConfig::from_model(&BipartiteModel::emission());
        cfg.h_a.as_mut().unwrap()[0][1] = [1.0, 0.0];
        let err = cfg.build().unwrap_err().to_string();
        assert!(err.contains("H_A"), "{err}");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ModelConfig::parse("preset = \"emission\"\ngamma = 1").is_err());
    }

    #[test]
    fn preset_excludes_fields() {
        let cfg = ModelConfig::parse("preset = \"emission\"\ndim_A = 2").unwrap();
        assert!(cfg.build().is_err());
    }
}
