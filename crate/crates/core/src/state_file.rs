//! JSON state files.
//!
//! ```json
//! {"dims": [2, 2], "kind": "pure", "data": [[0.7071, 0.0], [0, 0], [0, 0], [0.7071, 0.0]]}
//! ```
//!
//! `data` holds `[re, im]` pairs: a flat list for pure states, a row-major
//! list of rows for mixed states.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix, CVector};
use crate::states::{DensityMatrix, PureState};

#[derive(Debug, Clone, PartialEq)]
pub enum StateData {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateData {
    pub fn dims(&self) -> &[usize] {
        match self {
            StateData::Pure(p) => p.dims(),
            StateData::Mixed(m) => m.dims(),
        }
    }

    pub fn to_density(&self) -> DensityMatrix {
        match self {
            StateData::Pure(p) => p.to_density(),
            StateData::Mixed(m) => m.clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&PureState> {
        match self {
            StateData::Pure(p) => Some(p),
            StateData::Mixed(_) => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            StateData::Pure(_) => "pure",
            StateData::Mixed(_) => "mixed",
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Pure,
    Mixed,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPure {
    dims: Vec<usize>,
    kind: Kind,
    data: serde_json::Value,
}

type Pair = [f64; 2];

fn parse_pairs(value: serde_json::Value) -> Result<Vec<Pair>> {
    serde_json::from_value(value).map_err(|e| Error::Format(format!("expected a list of [re, im] pairs: {e}")))
}

fn parse_rows(value: serde_json::Value) -> Result<Vec<Vec<Pair>>> {
    serde_json::from_value(value).map_err(|e| Error::Format(format!("expected rows of [re, im] pairs: {e}")))
}

/// Parses a state document. Malformed documents give [`Error::Format`];
/// well-formed ones that violate the state invariants give [`Error::InvalidState`]
/// or [`Error::InvalidDimension`].
pub fn parse_state(text: &str) -> Result<StateData> {
    let raw: RawPure = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    match raw.kind {
        Kind::Pure => {
            let pairs = parse_pairs(raw.data)?;
            let v = CVector::from_iterator(pairs.len(), pairs.iter().map(|p| c(p[0], p[1])));
            Ok(StateData::Pure(PureState::new(v, raw.dims)?))
        }
        Kind::Mixed => {
            let rows = parse_rows(raw.data)?;
            let n = rows.len();
            if rows.iter().any(|r| r.len() != n) {
                return Err(Error::Format("mixed-state data must be a square matrix".into()));
            }
            let m = CMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1]));
            Ok(StateData::Mixed(DensityMatrix::new(m, raw.dims)?))
        }
    }
}

pub fn to_json(state: &StateData) -> String {
    let raw = match state {
        StateData::Pure(p) => RawPure {
            dims: p.dims().to_vec(),
            kind: Kind::Pure,
            data: serde_json::to_value(p.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Vec<Pair>>())
                .expect("finite floats serialize"),
        },
        StateData::Mixed(m) => {
            let mat = m.matrix();
            let rows: Vec<Vec<Pair>> =
                (0..mat.nrows()).map(|i| (0..mat.ncols()).map(|j| [mat[(i, j)].re, mat[(i, j)].im]).collect()).collect();
            RawPure { dims: m.dims().to_vec(), kind: Kind::Mixed, data: serde_json::to_value(rows).expect("finite floats serialize") }
        }
    };
    serde_json::to_string(&raw).expect("state serializes")
}

pub fn read_state_file(path: &Path) -> Result<StateData> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    parse_state(&text)
}

pub fn write_state_file(path: &Path, state: &StateData) -> Result<()> {
    std::fs::write(path, to_json(state)).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}
