//! The series coefficient file format, its validation, and machine-readable
//! run reports.

use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use odot_core::multiindex::MultiIndex;
use odot_core::scalar::{Field, Scalar};
use odot_core::series::CoefficientMap;

/// CLI failure modes, mapped onto process exit codes: validation errors
/// exit 2, check failures and internal errors exit 1.
#[derive(Debug)]
pub enum CliError {
    Validation(String),
    CheckFailure(String),
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(msg) => write!(f, "{msg}"),
            CliError::CheckFailure(msg) => write!(f, "{msg}"),
            CliError::Internal(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<odot_core::Error> for CliError {
    fn from(e: odot_core::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

/// On-disk schema: dimensions, a field tag, and a sparse term list.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub n: usize,
    pub n_prime: usize,
    pub q_prime: usize,
    pub field: String,
    pub terms: Vec<TermRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub alpha: Vec<u32>,
    pub alpha_prime: Vec<u32>,
    pub re: f64,
    #[serde(default, skip_serializing_if = "im_is_zero")]
    pub im: f64,
}

fn im_is_zero(x: &f64) -> bool {
    *x == 0.0
}

fn parse_field(tag: &str) -> Result<Field, CliError> {
    match tag {
        "real" => Ok(Field::Real),
        "complex" => Ok(Field::Complex),
        other => Err(CliError::Validation(format!(
            "field must be \"real\" or \"complex\", got \"{other}\""
        ))),
    }
}

/// Validate a deserialized file and build the coefficient map.
pub fn coefficients_from_file(file: &SeriesFile) -> Result<CoefficientMap, CliError> {
    let field = parse_field(&file.field)?;
    if file.n == 0 || file.n_prime == 0 {
        return Err(CliError::Validation(
            "n and n_prime must be at least 1".into(),
        ));
    }
    let mut map = CoefficientMap::new(file.n, file.n_prime, file.q_prime, field)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    for (index, term) in file.terms.iter().enumerate() {
        let context = |msg: String| CliError::Validation(format!("term {index}: {msg}"));
        if term.alpha.len() != file.n {
            return Err(context(format!(
                "alpha has length {}, expected n = {}",
                term.alpha.len(),
                file.n
            )));
        }
        if term.alpha_prime.len() != file.n_prime {
            return Err(context(format!(
                "alpha_prime has length {}, expected n_prime = {}",
                term.alpha_prime.len(),
                file.n_prime
            )));
        }
        let degree: usize = term.alpha_prime.iter().map(|&e| e as usize).sum();
        if degree != file.q_prime {
            return Err(context(format!(
                "alpha_prime has degree {degree}, expected q_prime = {}",
                file.q_prime
            )));
        }
        if field == Field::Real && term.im != 0.0 {
            return Err(context("nonzero im in a real-field file".into()));
        }
        let alpha = MultiIndex::new(term.alpha.clone()).map_err(|e| context(e.to_string()))?;
        let alpha_prime =
            MultiIndex::new(term.alpha_prime.clone()).map_err(|e| context(e.to_string()))?;
        let value = match field {
            Field::Real => Scalar::Real(term.re),
            Field::Complex => Scalar::Complex(Complex64::new(term.re, term.im)),
        };
        map.insert(alpha, alpha_prime, value)
            .map_err(|e| context(e.to_string()))?;
    }
    Ok(map)
}

/// Read and validate a series file.
pub fn parse_series_file(path: &Path) -> Result<CoefficientMap, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Validation(format!("cannot read {}: {e}", path.display()))
    })?;
    let file: SeriesFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Validation(format!("{}: {e}", path.display()))
    })?;
    coefficients_from_file(&file)
}

/// Serialize a coefficient map back into the file schema.
pub fn series_to_file(map: &CoefficientMap) -> SeriesFile {
    let terms = map
        .iter()
        .map(|(alpha, alpha_prime, value)| TermRecord {
            alpha: alpha.entries().to_vec(),
            alpha_prime: alpha_prime.entries().to_vec(),
            re: value.re,
            im: value.im,
        })
        .collect();
    SeriesFile {
        n: map.vars(),
        n_prime: map.col_vars(),
        q_prime: map.col_degree(),
        field: map.field().to_string(),
        terms,
    }
}

/// Self-contained record of one run: the command, its effective
/// parameters, and the numbers it printed.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub parameters: serde_json::Value,
    pub results: serde_json::Value,
}

impl RunReport {
    pub fn new(seed: Option<u64>, parameters: serde_json::Value, results: serde_json::Value) -> Self {
        let command = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
        Self {
            command,
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            parameters,
            results,
        }
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Internal(format!("cannot serialize report: {e}")))?;
        std::fs::write(path, text)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
    }
}
