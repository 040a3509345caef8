//! File formats: a matrix container with declared quadrature ordering, and
//! the decomposition result container. Both are JSON objects whose numbers
//! round-trip binary64 bit-exactly.

use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sympdec::mat::RealMatrix;
use sympdec::symp::{CovMatrix, Ordering};

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_truth_lambdas: Option<Vec<f64>>,
}

/// A real symmetric matrix with its quadrature ordering; `data` is row-major
/// with `(2d)^2` entries.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub d: usize,
    pub ordering: String,
    pub data: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl MatrixFile {
    pub fn from_cov(v: &CovMatrix, metadata: Option<Metadata>) -> Self {
        MatrixFile {
            d: v.modes(),
            ordering: v.ordering().as_str().to_string(),
            data: row_major(v.matrix()),
            metadata,
        }
    }

    pub fn to_cov(&self) -> Result<CovMatrix, CliError> {
        let n = 2 * self.d;
        if self.data.len() != n * n {
            return Err(CliError::Parse(format!(
                "matrix data holds {} entries, expected {}",
                self.data.len(),
                n * n
            )));
        }
        let ordering = Ordering::from_str(&self.ordering).map_err(CliError::Parse)?;
        let m = RealMatrix::from_row_slice(n, n, &self.data);
        CovMatrix::new(m, ordering).map_err(CliError::Lib)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Residuals {
    pub symp: f64,
    pub rec: f64,
}

/// Echo of the options a decomposition ran with.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptionsEcho {
    pub kbar: String,
    pub tol: f64,
    pub tol_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    pub reason: String,
    /// Positive symplectic eigenvalue representatives as (re, im) pairs.
    pub lambdas_plus: Vec<[f64; 2]>,
    /// Sign diagnostics as (re, im) pairs.
    pub gimel: Vec<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

/// Result container: either a certified decomposition (`verdict = "ok"`,
/// `s`/`lambdas`/`residuals` present) or a `"not-diagonalizable"` verdict
/// with diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompFile {
    pub verdict: String,
    pub method: String,
    pub d: usize,
    pub ordering: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambdas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    pub options: OptionsEcho,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<Diagnostics>,
}

impl DecompFile {
    pub fn ok(
        w: &sympdec::WilliamsonDecomp,
        method: &str,
        options: OptionsEcho,
    ) -> Self {
        DecompFile {
            verdict: "ok".into(),
            method: method.into(),
            d: w.s.modes(),
            ordering: w.s.ordering().as_str().into(),
            s: Some(row_major(w.s.matrix())),
            lambdas: Some(w.lambdas.clone()),
            residuals: Some(Residuals { symp: w.residual_symp, rec: w.residual_rec }),
            options,
            diagnostics: None,
        }
    }

    pub fn not_diagonalizable(
        nd: &sympdec::indefinite::NotDiagonalizable,
        d: usize,
        ordering: Ordering,
        method: &str,
        options: OptionsEcho,
    ) -> Self {
        DecompFile {
            verdict: "not-diagonalizable".into(),
            method: method.into(),
            d,
            ordering: ordering.as_str().into(),
            s: None,
            lambdas: None,
            residuals: None,
            options,
            diagnostics: Some(Diagnostics {
                reason: nd.reason.clone(),
                lambdas_plus: nd.lambdas_plus.iter().map(|z| [z.re, z.im]).collect(),
                gimel: nd.gimel.iter().map(|z| [z.re, z.im]).collect(),
                residual: nd.residual,
            }),
        }
    }

    pub fn s_matrix(&self) -> Result<RealMatrix, CliError> {
        let data = self
            .s
            .as_ref()
            .ok_or_else(|| CliError::Parse("decomposition file holds no matrix (verdict file?)".into()))?;
        let n = 2 * self.d;
        if data.len() != n * n {
            return Err(CliError::Parse(format!(
                "S data holds {} entries, expected {}",
                data.len(),
                n * n
            )));
        }
        Ok(RealMatrix::from_row_slice(n, n, data))
    }
}

pub fn row_major(m: &RealMatrix) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn read_input(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CliError::Io(format!("stdin: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

pub fn write_output(path: &str, content: &str) -> Result<(), CliError> {
    if path == "-" {
        println!("{content}");
        Ok(())
    } else {
        std::fs::write(path, format!("{content}\n")).map_err(|e| CliError::Io(format!("{path}: {e}")))
    }
}

/// Parse a matrix input: a raw whitespace matrix when an explicit ordering
/// flag accompanies it, a `MatrixFile` JSON object otherwise.
pub fn parse_matrix_input(
    path: &str,
    raw_ordering: Option<Ordering>,
) -> Result<(CovMatrix, Option<Metadata>), CliError> {
    let text = read_input(path)?;
    if let Some(ordering) = raw_ordering {
        let values: Result<Vec<f64>, _> = text.split_whitespace().map(str::parse::<f64>).collect();
        let values = values.map_err(|e| CliError::Parse(format!("raw matrix: {e}")))?;
        let n = (values.len() as f64).sqrt().round() as usize;
        if n * n != values.len() || n == 0 || !n.is_multiple_of(2) {
            return Err(CliError::Parse(format!(
                "raw matrix needs (2d)^2 entries, got {}",
                values.len()
            )));
        }
        let m = RealMatrix::from_row_slice(n, n, &values);
        Ok((CovMatrix::new(m, ordering).map_err(CliError::Lib)?, None))
    } else {
        let mf: MatrixFile =
            serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{path}: {e}")))?;
        let meta = mf.metadata.clone();
        Ok((mf.to_cov()?, meta))
    }
}
