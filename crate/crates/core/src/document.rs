//! JSON documents exchanged with the command-line tool: pairs, dense states,
//! decomposition certificates and spectra.
//!
//! Complex entries are written as `[re, im]`; bare numbers are read as reals.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::construct::ConstructorOutcome;
use crate::error::{Error, Result};
use crate::linalg::{Complex64, ComplexMatrix, ComplexVector};
use crate::pairs::{PairXY, PcpDecomposition};

/// A complex number in document form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Entry(pub Complex64);

impl Serialize for Entry {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.0.re, self.0.im].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Entry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Real(f64),
            Complex([f64; 2]),
        }
        match Raw::deserialize(d) {
            Ok(Raw::Real(re)) => Ok(Entry(Complex64::new(re, 0.0))),
            Ok(Raw::Complex([re, im])) => Ok(Entry(Complex64::new(re, im))),
            Err(_) => Err(serde::de::Error::custom("expected a number or a [re, im] pair")),
        }
    }
}

pub type Rows = Vec<Vec<Entry>>;

fn rows_of(m: &ComplexMatrix) -> Rows {
    (0..m.rows())
        .map(|i| m.row(i).iter().copied().map(Entry).collect())
        .collect()
}

fn vector_of(v: &ComplexVector) -> Vec<Entry> {
    v.iter().copied().map(Entry).collect()
}

fn matrix_from(label: &str, rows: &Rows, n: usize) -> Result<ComplexMatrix> {
    if rows.len() != n {
        return Err(Error::Document(format!(
            "{label} has {} rows, expected {n}",
            rows.len()
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Document(format!(
                "{label} row {} has {} entries, expected {n}",
                i + 1,
                row.len()
            )));
        }
    }
    let data = rows.iter().flatten().map(|e| e.0).collect();
    ComplexMatrix::from_row_major(n, n, data).map_err(|e| Error::Document(format!("{label}: {e}")))
}

fn parse<T: for<'de> Deserialize<'de>>(kind: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(format!("invalid {kind} document: {e}")))
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents always serialize")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDocument {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Rows,
    #[serde(rename = "Y")]
    pub y: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl PairDocument {
    pub fn from_pair(pair: &PairXY) -> Self {
        Self {
            n: pair.n(),
            x: rows_of(pair.x()),
            y: rows_of(pair.y()),
            name: None,
            source: None,
            note: None,
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn to_pair(&self) -> Result<PairXY> {
        let x = matrix_from("X", &self.x, self.n)?;
        let y = matrix_from("Y", &self.y, self.n)?;
        PairXY::new(x, y)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse("pair", text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// A dense `n²×n²` operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDocument {
    pub n: usize,
    pub rho: Rows,
}

impl StateDocument {
    pub fn from_matrix(n: usize, rho: &ComplexMatrix) -> Self {
        Self { n, rho: rows_of(rho) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        matrix_from("rho", &self.rho, self.n * self.n)
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse("state", text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Either input accepted by state-level commands, detected by its keys.
#[derive(Clone, Debug, PartialEq)]
pub enum StateInput {
    Pair(PairDocument),
    Dense(StateDocument),
}

impl StateInput {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = parse("state", text)?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Document("expected a JSON object".into()))?;
        if obj.contains_key("rho") {
            serde_json::from_value(value).map(Self::Dense)
        } else if obj.contains_key("X") || obj.contains_key("Y") {
            serde_json::from_value(value).map(Self::Pair)
        } else {
            return Err(Error::Document("expected either `X`/`Y` or `rho`".into()));
        }
        .map_err(|e| Error::Document(format!("invalid state document: {e}")))
    }
}

/// A decomposition together with how it was found.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub n: usize,
    pub method: String,
    /// `permutation[i]` is the original index placed at position `i` during construction.
    pub permutation: Vec<usize>,
    pub vs: Rows,
    pub ws: Rows,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl CertificateDocument {
    pub fn from_decomposition(dec: &PcpDecomposition, method: &str, permutation: Vec<usize>) -> Self {
        Self {
            n: dec.n(),
            method: method.to_string(),
            permutation,
            vs: dec.vs().iter().map(vector_of).collect(),
            ws: dec.ws().iter().map(vector_of).collect(),
            residual: None,
        }
    }

    /// `None` unless the outcome carries a decomposition.
    pub fn from_outcome(outcome: &ConstructorOutcome) -> Option<Self> {
        let dec = outcome.decomposition.as_ref()?;
        let mut doc = Self::from_decomposition(dec, outcome.method.label(), outcome.permutation.clone());
        doc.residual = outcome.residual;
        Some(doc)
    }

    pub fn to_decomposition(&self) -> Result<PcpDecomposition> {
        if self.vs.len() != self.ws.len() {
            return Err(Error::Document(format!(
                "certificate has {} v vectors but {} w vectors",
                self.vs.len(),
                self.ws.len()
            )));
        }
        let convert = |label: &str, rows: &Rows| -> Result<Vec<ComplexVector>> {
            rows.iter()
                .enumerate()
                .map(|(k, row)| {
                    if row.len() != self.n {
                        return Err(Error::Document(format!(
                            "{label}[{}] has {} entries, expected {}",
                            k + 1,
                            row.len(),
                            self.n
                        )));
                    }
                    ComplexVector::new(row.iter().map(|e| e.0).collect())
                        .map_err(|e| Error::Document(format!("{label}[{}]: {e}", k + 1)))
                })
                .collect()
        };
        PcpDecomposition::new(convert("vs", &self.vs)?, convert("ws", &self.ws)?)
            .map_err(|e| Error::Document(e.to_string()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        parse("certificate", text)
    }

    pub fn to_json(&self) -> String {
        to_json(self)
    }
}

/// Reads a spectrum from a JSON array or from numbers separated by commas
/// and/or whitespace.
pub fn parse_spectrum(text: &str) -> Result<Vec<f64>> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return parse("spectrum", trimmed);
    }
    trimmed
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .enumerate()
        .map(|(i, t)| {
            t.parse::<f64>()
                .map_err(|_| Error::Document(format!("eigenvalue {} (`{t}`) is not a number", i + 1)))
        })
        .collect()
}
