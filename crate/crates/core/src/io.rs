//! Text serialization of states, operators and reports.
//!
//! Every object is one JSON document:
//!
//! ```json
//! {"schema":"eprkit/1","kind":"pure_state","dims":[2,2],
//!  "data":[[0.7071067811865475,0.0],[0.0,0.0],[0.0,0.0],[0.7071067811865475,0.0]],
//!  "meta":{"seed":"7"}}
//! ```
//!
//! Matrices are flattened row-major. Per kind:
//!
//! | kind             | dims                  | data                                          |
//! |------------------|-----------------------|-----------------------------------------------|
//! | `pure_state`     | factor dims           | amplitudes                                    |
//! | `density`        | factor dims           | `d×d` matrix; `meta.subnormalized = "true"` allows trace < 1 |
//! | `operator`       | `[rows, cols]`        | matrix                                        |
//! | `antilinear_map` | `[dst, src]`          | K-matrix of `φ ↦ K conj(φ)`                   |
//! | `channel`        | `[dst, src, n]`       | `n` K-matrices in sequence                    |
//! | `basis`          | `[dA, dB, n]`         | `n` vectors in sequence                       |
//! | `schmidt`        | `[dA, dB, r]`         | `r` weights as `[p, 0]`, then the `dA×dA` and `dB×dB` bases |
//! | `report`         | `[rows, cols]`        | real table entries as `[x, 0]`; `meta.columns` is comma separated |
//!
//! Numbers are written in shortest round-trip form and parsed exactly, so a
//! save/load cycle reproduces every finite double bit for bit.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::antilinear::AntilinearMap;
use crate::channel::ChannelMap;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix, ComplexVector};
use crate::smap::SchmidtDecomposition;
use crate::state::{DensityOperator, PureState};
use crate::teleport::MeasurementBasis;

pub const SCHEMA: &str = "eprkit/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    PureState,
    Density,
    Operator,
    AntilinearMap,
    Channel,
    Basis,
    Schmidt,
    Report,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::PureState,
        Kind::Density,
        Kind::Operator,
        Kind::AntilinearMap,
        Kind::Channel,
        Kind::Basis,
        Kind::Schmidt,
        Kind::Report,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::PureState => "pure_state",
            Kind::Density => "density",
            Kind::Operator => "operator",
            Kind::AntilinearMap => "antilinear_map",
            Kind::Channel => "channel",
            Kind::Basis => "basis",
            Kind::Schmidt => "schmidt",
            Kind::Report => "report",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Kind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown kind {s:?}"))
    }
}

/// The on-disk record, before any invariant is checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SerializedObject {
    pub schema: String,
    pub kind: String,
    pub dims: Vec<usize>,
    pub data: Vec<[f64; 2]>,
    #[serde(default)]
    pub meta: BTreeMap<String, String>,
}

/// Named table of real numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub meta: BTreeMap<String, String>,
}

impl Report {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            meta: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }
}

/// A validated object of any serializable kind.
#[derive(Debug, Clone)]
pub enum Object {
    PureState(PureState),
    Density(DensityOperator),
    Operator(ComplexMatrix),
    AntilinearMap(AntilinearMap),
    Channel(ChannelMap),
    Basis(MeasurementBasis),
    Schmidt(SchmidtDecomposition),
    Report(Report),
}

impl Object {
    pub fn kind(&self) -> Kind {
        match self {
            Object::PureState(_) => Kind::PureState,
            Object::Density(_) => Kind::Density,
            Object::Operator(_) => Kind::Operator,
            Object::AntilinearMap(_) => Kind::AntilinearMap,
            Object::Channel(_) => Kind::Channel,
            Object::Basis(_) => Kind::Basis,
            Object::Schmidt(_) => Kind::Schmidt,
            Object::Report(_) => Kind::Report,
        }
    }
}

fn push_matrix(data: &mut Vec<[f64; 2]>, m: &ComplexMatrix) {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let z = m[(r, c)];
            data.push([z.re, z.im]);
        }
    }
}

fn push_vector(data: &mut Vec<[f64; 2]>, v: &ComplexVector) {
    data.extend(v.iter().map(|z| [z.re, z.im]));
}

impl SerializedObject {
    fn new(kind: Kind, dims: Vec<usize>, data: Vec<[f64; 2]>) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            kind: kind.to_string(),
            dims,
            data,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn from_object(object: &Object) -> Self {
        let mut data = Vec::new();
        match object {
            Object::PureState(psi) => {
                push_vector(&mut data, psi.amplitudes());
                Self::new(Kind::PureState, psi.factor_dims().to_vec(), data)
            }
            Object::Density(rho) => {
                push_matrix(&mut data, rho.matrix());
                let out = Self::new(Kind::Density, rho.factor_dims().to_vec(), data);
                if rho.is_subnormalized() {
                    out.with_meta("subnormalized", "true")
                } else {
                    out
                }
            }
            Object::Operator(m) => {
                push_matrix(&mut data, m);
                Self::new(Kind::Operator, vec![m.nrows(), m.ncols()], data)
            }
            Object::AntilinearMap(s) => {
                push_matrix(&mut data, s.kmatrix());
                Self::new(Kind::AntilinearMap, vec![s.dst_dim(), s.src_dim()], data)
            }
            Object::Channel(ch) => {
                for k in ch.kraus() {
                    push_matrix(&mut data, k.kmatrix());
                }
                Self::new(Kind::Channel, vec![ch.dst_dim(), ch.src_dim(), ch.kraus().len()], data)
            }
            Object::Basis(basis) => {
                for v in basis.vectors() {
                    push_vector(&mut data, v.amplitudes());
                }
                let (da, db) = basis.dims();
                Self::new(Kind::Basis, vec![da, db, basis.len()], data)
            }
            Object::Schmidt(d) => {
                data.extend(d.coefficients.iter().map(|&p| [p, 0.0]));
                push_matrix(&mut data, &d.left);
                push_matrix(&mut data, &d.right);
                let (da, db) = d.dims();
                Self::new(Kind::Schmidt, vec![da, db, d.coefficients.len()], data)
            }
            Object::Report(report) => {
                for row in &report.rows {
                    data.extend(row.iter().map(|&x| [x, 0.0]));
                }
                let mut out = Self::new(Kind::Report, vec![report.rows.len(), report.columns.len()], data);
                out.meta = report.meta.clone();
                out.with_meta("columns", report.columns.join(","))
            }
        }
    }

    /// Validates the record and builds the typed object.
    ///
    /// Invariant failures come back as [`Error::Invariant`] carrying the
    /// violated invariant's name.
    pub fn to_object(&self) -> Result<Object> {
        if self.schema != SCHEMA {
            return Err(Error::SchemaVersion {
                found: self.schema.clone(),
                expected: SCHEMA,
            });
        }
        let kind: Kind = self.kind.parse().map_err(Error::InvalidArgument)?;
        self.build(kind).map_err(name_invariant)
    }

    fn expect_dims(&self, n: usize) -> Result<()> {
        if self.dims.len() != n {
            return Err(Error::dims("serialized dims", format!("{n} entries"), self.dims.len()));
        }
        Ok(())
    }

    fn expect_len(&self, n: usize) -> Result<()> {
        if self.data.len() != n {
            return Err(Error::dims("serialized data", n, self.data.len()));
        }
        Ok(())
    }

    fn entries(&self, range: std::ops::Range<usize>) -> impl Iterator<Item = c64> + '_ {
        self.data[range].iter().map(|&[re, im]| c64::new(re, im))
    }

    fn matrix_at(&self, offset: usize, rows: usize, cols: usize) -> ComplexMatrix {
        let entries: Vec<c64> = self.entries(offset..offset + rows * cols).collect();
        ComplexMatrix::from_row_slice(rows, cols, &entries)
    }

    fn vector_at(&self, offset: usize, len: usize) -> ComplexVector {
        ComplexVector::from_iterator(len, self.entries(offset..offset + len))
    }

    fn build(&self, kind: Kind) -> Result<Object> {
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("serialized data"));
        }
        match kind {
            Kind::PureState => {
                let d: usize = self.dims.iter().product();
                self.expect_len(d)?;
                Ok(Object::PureState(PureState::new(self.dims.clone(), self.vector_at(0, d))?))
            }
            Kind::Density => {
                let d: usize = self.dims.iter().product();
                self.expect_len(d * d)?;
                let m = self.matrix_at(0, d, d);
                let rho = if self.meta.get("subnormalized").map(String::as_str) == Some("true") {
                    DensityOperator::subnormalized(self.dims.clone(), m)?
                } else {
                    DensityOperator::new(self.dims.clone(), m)?
                };
                Ok(Object::Density(rho))
            }
            Kind::Operator => {
                self.expect_dims(2)?;
                let (r, c) = (self.dims[0], self.dims[1]);
                self.expect_len(r * c)?;
                Ok(Object::Operator(self.matrix_at(0, r, c)))
            }
            Kind::AntilinearMap => {
                self.expect_dims(2)?;
                let (dst, src) = (self.dims[0], self.dims[1]);
                self.expect_len(dst * src)?;
                Ok(Object::AntilinearMap(AntilinearMap::from_kmatrix(self.matrix_at(0, dst, src))?))
            }
            Kind::Channel => {
                self.expect_dims(3)?;
                let (dst, src, n) = (self.dims[0], self.dims[1], self.dims[2]);
                self.expect_len(dst * src * n)?;
                let kraus = (0..n)
                    .map(|i| AntilinearMap::from_kmatrix(self.matrix_at(i * dst * src, dst, src)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Object::Channel(ChannelMap::from_kraus(src, dst, kraus)?))
            }
            Kind::Basis => {
                self.expect_dims(3)?;
                let (da, db, n) = (self.dims[0], self.dims[1], self.dims[2]);
                let d = da * db;
                self.expect_len(d * n)?;
                let vectors = (0..n)
                    .map(|i| PureState::new(vec![da, db], self.vector_at(i * d, d)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Object::Basis(MeasurementBasis::new(vectors)?))
            }
            Kind::Schmidt => {
                self.expect_dims(3)?;
                let (da, db, r) = (self.dims[0], self.dims[1], self.dims[2]);
                self.expect_len(r + da * da + db * db)?;
                if r != da.min(db) {
                    return Err(Error::dims("schmidt weights", da.min(db), r));
                }
                let coefficients: Vec<f64> = self.data[..r].iter().map(|x| x[0]).collect();
                let left = self.matrix_at(r, da, da);
                let right = self.matrix_at(r + da * da, db, db);
                Ok(Object::Schmidt(SchmidtDecomposition {
                    coefficients,
                    left,
                    right,
                }))
            }
            Kind::Report => {
                self.expect_dims(2)?;
                let (rows, cols) = (self.dims[0], self.dims[1]);
                self.expect_len(rows * cols)?;
                let columns: Vec<String> = match self.meta.get("columns") {
                    Some(c) if !c.is_empty() => c.split(',').map(str::to_string).collect(),
                    _ => Vec::new(),
                };
                if columns.len() != cols {
                    return Err(Error::dims("report columns", cols, columns.len()));
                }
                let mut meta = self.meta.clone();
                meta.remove("columns");
                Ok(Object::Report(Report {
                    columns,
                    rows: self.data.chunks(cols.max(1)).take(rows).map(|r| r.iter().map(|x| x[0]).collect()).collect(),
                    meta,
                }))
            }
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("plain data serializes")
    }
}

fn name_invariant(err: Error) -> Error {
    match err {
        Error::Invariant { .. } => err,
        other => match other.invariant_name() {
            Some(name) => Error::Invariant {
                name,
                detail: other.to_string(),
            },
            None => other,
        },
    }
}

fn parse_error(err: serde_json::Error) -> Error {
    Error::Parse {
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Parses one record without validating it.
pub fn parse_record(text: &str) -> Result<SerializedObject> {
    serde_json::from_str(text).map_err(parse_error)
}

pub fn from_str(text: &str) -> Result<Object> {
    parse_record(text)?.to_object()
}

/// Parses a JSON Lines stream; blank lines are skipped and parse errors report the line in the stream.
pub fn from_lines(text: &str) -> Result<Vec<Object>> {
    let mut out = Vec::new();
    for (offset, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record = parse_record(line).map_err(|e| match e {
            Error::Parse { column, message, .. } => Error::Parse {
                line: offset + 1,
                column,
                message,
            },
            other => other,
        })?;
        out.push(record.to_object()?);
    }
    Ok(out)
}

/// Loads a file holding either one (possibly pretty-printed) document or JSON Lines.
pub fn load_many(path: impl AsRef<Path>) -> Result<Vec<Object>> {
    let text = std::fs::read_to_string(path)?;
    match from_str(&text) {
        Ok(object) => Ok(vec![object]),
        Err(Error::Parse { .. }) => from_lines(&text),
        Err(e) => Err(e),
    }
}

pub fn to_string(object: &Object) -> String {
    serde_json::to_string_pretty(&SerializedObject::from_object(object)).expect("plain data serializes")
}

pub fn save(path: impl AsRef<Path>, object: &Object) -> Result<()> {
    let mut text = to_string(object);
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<Object> {
    from_str(&std::fs::read_to_string(path)?)
}
