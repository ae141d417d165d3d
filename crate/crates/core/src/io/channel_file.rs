//! JSON channel documents.
//!
//! ```json
//! {
//!   "dims": {"q": 2, "m": 2, "e": 4},
//!   "markov": {
//!     "transition": [[0.9, 0.1], [0.1, 0.9]],
//!     "kraus": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]], [[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]],
//!     "fixed_point_form": true
//!   },
//!   "initial_memory": {"basis": 0}
//! }
//! ```
//!
//! Without `markov` the document gives `unitary` (one matrix repeated at every
//! use) or `unitaries` (one per use) on `Q ⊗ M ⊗ E`. Matrices are row-major
//! nested arrays of `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{
    build_markov_channel, ChannelDims, ChannelSpec, MarkovChannelSpec, StepUnitaries,
};
use crate::linalg::{CMatrix, DensityMatrix, SpaceShape, C64, ONE, ZERO};
use crate::{Error, Result};

/// Row-major matrix of `[re, im]` pairs.
pub type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsDoc {
    pub q: usize,
    pub m: usize,
    pub e: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovDoc {
    pub transition: Vec<Vec<f64>>,
    pub kraus: Vec<MatrixDoc>,
    #[serde(default)]
    pub fixed_point_form: bool,
    /// Uniform when omitted.
    #[serde(default)]
    pub initial_distribution: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub basis: usize,
}

/// A state given either as a basis label or as a full matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateDoc {
    Basis(BasisDoc),
    Matrix(MatrixDoc),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<DimsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitary: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unitaries: Option<Vec<MatrixDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub markov: Option<MarkovDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_memory: Option<StateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub env_reset: Option<BasisDoc>,
}

impl ChannelDocument {
    /// Parses the JSON text; errors carry line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| json_error("channel document", &e))
    }

    /// The Markov constructor, if any, with its matrices decoded.
    pub fn markov_spec(&self) -> Result<Option<MarkovChannelSpec>> {
        let Some(doc) = &self.markov else {
            return Ok(None);
        };
        let kraus = doc
            .kraus
            .iter()
            .enumerate()
            .map(|(k, m)| matrix_from_doc(m, &format!("markov.kraus[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let labels = doc.transition.len();
        let initial = doc
            .initial_distribution
            .clone()
            .unwrap_or_else(|| vec![1.0 / labels.max(1) as f64; labels]);
        MarkovChannelSpec::new(doc.transition.clone(), kraus, initial)
            .map(Some)
            .map_err(|e| context("markov", e))
    }

    /// Validates the document and builds the channel.
    pub fn to_spec(&self) -> Result<ChannelSpec> {
        let spec = match self.markov_spec()? {
            Some(m) => {
                if self.unitary.is_some() || self.unitaries.is_some() {
                    return Err(Error::Parse(
                        "give either markov or unitary/unitaries, not both".into(),
                    ));
                }
                let fixed_point_form = self.markov.as_ref().is_some_and(|d| d.fixed_point_form);
                let spec =
                    build_markov_channel(&m, fixed_point_form).map_err(|e| context("markov", e))?;
                if let Some(d) = self.dims {
                    let got = spec.dims();
                    if (d.q, d.m, d.e) != (got.q, got.m, got.e) {
                        return Err(Error::DimensionMismatch(format!(
                            "dims: declared q={} m={} e={} but the markov constructor gives q={} m={} e={}",
                            d.q, d.m, d.e, got.q, got.m, got.e
                        )));
                    }
                }
                if let Some(env) = self.env_reset {
                    if env.basis != 0 {
                        return Err(Error::InvalidArgument(
                            "env_reset: markov channels prepare the environment in basis state 0"
                                .into(),
                        ));
                    }
                }
                spec
            }
            None => {
                let d = self.dims.ok_or_else(|| {
                    Error::Parse("missing field `dims` (required without `markov`)".into())
                })?;
                let dims = ChannelDims::new(d.q, d.m, d.e).map_err(|e| context("dims", e))?;
                crate::config::check_dimension(dims.total())?;
                let steps = match (&self.unitary, &self.unitaries) {
                    (Some(u), None) => StepUnitaries::Repeated(matrix_from_doc(u, "unitary")?),
                    (None, Some(us)) => StepUnitaries::PerStep(
                        us.iter()
                            .enumerate()
                            .map(|(i, u)| matrix_from_doc(u, &format!("unitaries[{i}]")))
                            .collect::<Result<_>>()?,
                    ),
                    (None, None) => {
                        return Err(Error::Parse(
                            "missing field `unitary` or `unitaries`".into(),
                        ))
                    }
                    (Some(_), Some(_)) => {
                        return Err(Error::Parse(
                            "give either unitary or unitaries, not both".into(),
                        ))
                    }
                };
                let mut spec = ChannelSpec::new(dims, steps)?;
                if let Some(env) = self.env_reset {
                    if env.basis >= dims.e {
                        return Err(Error::InvalidArgument(format!(
                            "env_reset: basis {} out of range for e = {}",
                            env.basis, dims.e
                        )));
                    }
                    let mut v = vec![ZERO; dims.e];
                    v[env.basis] = ONE;
                    spec = spec.with_env_reset(v)?;
                }
                spec
            }
        };
        match &self.initial_memory {
            Some(doc) => {
                let m = spec.dims().m;
                let memory = state_from_doc(doc, m, "initial_memory")?;
                spec.with_initial_memory(memory)
            }
            None => Ok(spec),
        }
    }
}

/// Parses and validates a channel document.
pub fn parse_channel_spec(text: &str) -> Result<ChannelSpec> {
    ChannelDocument::from_json(text)?.to_spec()
}

/// Reads, parses and validates a channel file; errors name the file.
pub fn load_channel_file(path: &Path) -> Result<(ChannelDocument, ChannelSpec)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: cannot read: {e}", path.display())))?;
    let doc =
        ChannelDocument::from_json(&text).map_err(|e| context(&path.display().to_string(), e))?;
    let spec = doc
        .to_spec()
        .map_err(|e| context(&path.display().to_string(), e))?;
    Ok((doc, spec))
}

/// Decodes a `[re, im]` matrix, requiring rectangular rows.
pub fn matrix_from_doc(doc: &MatrixDoc, field: &str) -> Result<CMatrix> {
    let rows = doc.len();
    if rows == 0 {
        return Err(Error::Parse(format!("{field}: empty matrix")));
    }
    let cols = doc[0].len();
    let mut data = Vec::with_capacity(rows * cols);
    for (r, row) in doc.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::Parse(format!(
                "{field}: row {r} has {} entries, expected {cols}",
                row.len()
            )));
        }
        for (c, [re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!(
                    "{field}: entry ({r}, {c}) is not finite"
                )));
            }
            data.push(C64::new(*re, *im));
        }
    }
    CMatrix::new(rows, cols, data)
}

pub fn matrix_to_doc(m: &CMatrix) -> MatrixDoc {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// Decodes a state document on a `dim`-dimensional space.
pub fn state_from_doc(doc: &StateDoc, dim: usize, field: &str) -> Result<DensityMatrix> {
    match doc {
        StateDoc::Basis(b) => {
            if b.basis >= dim {
                return Err(Error::InvalidArgument(format!(
                    "{field}: basis {} out of range for dimension {dim}",
                    b.basis
                )));
            }
            DensityMatrix::basis(b.basis, dim)
        }
        StateDoc::Matrix(m) => {
            let mat = matrix_from_doc(m, field)?;
            if mat.rows() != dim || mat.cols() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "{field}: {}x{} matrix, expected {dim}x{dim}",
                    mat.rows(),
                    mat.cols()
                )));
            }
            DensityMatrix::new(mat, SpaceShape::single(dim)).map_err(|e| context(field, e))
        }
    }
}

/// serde_json messages end with the line and column of the error.
pub(crate) fn json_error(what: &str, e: &serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

/// Prefixes the message of `e` with `field`, keeping the variant.
pub(crate) fn context(field: &str, e: Error) -> Error {
    match e {
        Error::DimensionMismatch(m) => Error::DimensionMismatch(format!("{field}: {m}")),
        Error::InvalidState(m) => Error::InvalidState(format!("{field}: {m}")),
        Error::NotUnitary(m) => Error::NotUnitary(format!("{field}: {m}")),
        Error::InvalidDistribution(m) => Error::InvalidDistribution(format!("{field}: {m}")),
        Error::InvalidArgument(m) => Error::InvalidArgument(format!("{field}: {m}")),
        Error::Parse(m) => Error::Parse(format!("{field}: {m}")),
        other => other,
    }
}
