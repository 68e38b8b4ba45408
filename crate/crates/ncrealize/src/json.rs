//! JSON interchange formats, all versioned with `"schema": "ncrealize/1"`.
//!
//! Matrices are serialized row-major as `[re, im]` pairs; series coefficients
//! are emitted in graded-lex word order so identical inputs produce
//! byte-identical output.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::entire::ConstructionCertificate;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};
use crate::matrix::MatrixTuple;
use crate::realization::{DescriptorRealization, FmRealization};
use crate::series::TruncatedSeries;
use crate::spectral::{DensityReport, PoleReport};
use crate::word::Word;

pub const SCHEMA: &str = "ncrealize/1";

fn check_schema(schema: &str) -> Result<()> {
    if schema != SCHEMA {
        return Err(Error::InvalidParameter(format!(
            "unsupported schema {schema:?}, expected {SCHEMA:?}"
        )));
    }
    Ok(())
}

fn default_schema() -> String {
    SCHEMA.to_string()
}

type Pair = [f64; 2];

fn to_pair(v: Complex64) -> Pair {
    [v.re, v.im]
}

fn from_pair(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

fn matrix_to_pairs(m: &CMatrix) -> Vec<Pair> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(to_pair(m[(i, j)]));
        }
    }
    out
}

fn matrix_from_pairs(rows: usize, cols: usize, data: &[Pair]) -> Result<CMatrix> {
    if data.len() != rows * cols {
        return Err(Error::ShapeMismatch(format!(
            "matrix payload holds {} entries, expected {}x{}",
            data.len(),
            rows,
            cols
        )));
    }
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        from_pair(data[i * cols + j])
    }))
}

fn vector_to_pairs(v: &CVector) -> Vec<Pair> {
    v.iter().map(|x| to_pair(*x)).collect()
}

fn vector_from_pairs(data: &[Pair]) -> CVector {
    CVector::from_iterator(data.len(), data.iter().map(|p| from_pair(*p)))
}

/// Series format: `{"d", "degree_bound", "coeffs": [{"word", "re", "im"}]}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct SeriesJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub d: usize,
    pub degree_bound: usize,
    pub coeffs: Vec<CoeffJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CoeffJson {
    pub word: Vec<u32>,
    pub re: f64,
    pub im: f64,
}

impl SeriesJson {
    pub fn from_series(s: &TruncatedSeries) -> Self {
        SeriesJson {
            schema: SCHEMA.to_string(),
            d: s.d(),
            degree_bound: s.degree_bound(),
            // BTreeMap iteration is already graded-lex
            coeffs: s
                .iter()
                .map(|(w, v)| CoeffJson {
                    word: w.letters().to_vec(),
                    re: v.re,
                    im: v.im,
                })
                .collect(),
        }
    }

    pub fn into_series(self) -> Result<TruncatedSeries> {
        check_schema(&self.schema)?;
        TruncatedSeries::from_coeffs(
            self.d,
            self.degree_bound,
            self.coeffs
                .into_iter()
                .map(|c| (Word::new(c.word), Complex64::new(c.re, c.im))),
        )
    }
}

/// Matrix tuple format: `{"d", "n", "X": [matrix...]}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct TupleJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub d: usize,
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<Vec<Pair>>,
}

impl TupleJson {
    pub fn from_tuple(t: &MatrixTuple) -> Self {
        TupleJson {
            schema: SCHEMA.to_string(),
            d: t.d(),
            n: t.level(),
            x: t.components().iter().map(matrix_to_pairs).collect(),
        }
    }

    pub fn into_tuple(self) -> Result<MatrixTuple> {
        check_schema(&self.schema)?;
        if self.x.len() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "tuple holds {} components, expected d = {}",
                self.x.len(),
                self.d
            )));
        }
        let mats = self
            .x
            .iter()
            .map(|m| matrix_from_pairs(self.n, self.n, m))
            .collect::<Result<Vec<_>>>()?;
        MatrixTuple::new(mats)
    }
}

/// Realization format, both kinds:
/// `{"kind": "descriptor"|"fm", "d", "dim", "A", "b"/"B", "c"/"C", "D"}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct RealizationJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub kind: String,
    pub d: usize,
    pub dim: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<Pair>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Pair>>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b_inputs: Option<Vec<Vec<Pair>>>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c_row: Option<Vec<Pair>>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d_scalar: Option<Pair>,
    /// Attached by `entire-construct`; ignored on input.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct CertificateJson {
    pub block_count: usize,
    pub dim: usize,
    pub nilpotency_index: usize,
    pub row_norm: f64,
    pub predicted_row_norm: f64,
}

impl CertificateJson {
    pub fn from_certificate(c: &ConstructionCertificate) -> Self {
        CertificateJson {
            block_count: c.block_count,
            dim: c.dim,
            nilpotency_index: c.nilpotency_index,
            row_norm: c.row_norm,
            predicted_row_norm: c.predicted_row_norm,
        }
    }
}

/// Either kind of realization, as read from JSON.
#[derive(Debug, Clone)]
pub enum AnyRealization {
    Descriptor(DescriptorRealization),
    Fm(FmRealization),
}

impl AnyRealization {
    pub fn series(&self, degree: usize) -> TruncatedSeries {
        match self {
            AnyRealization::Descriptor(r) => r.series(degree),
            AnyRealization::Fm(r) => r.series(degree),
        }
    }

    pub fn d(&self) -> usize {
        match self {
            AnyRealization::Descriptor(r) => r.d(),
            AnyRealization::Fm(r) => r.d_vars(),
        }
    }

    pub fn state_matrices(&self) -> &[CMatrix] {
        match self {
            AnyRealization::Descriptor(r) => r.a(),
            AnyRealization::Fm(r) => r.a(),
        }
    }

    pub fn into_descriptor(self) -> DescriptorRealization {
        match self {
            AnyRealization::Descriptor(r) => r,
            AnyRealization::Fm(r) => crate::realization::descriptor_from_fm(&r),
        }
    }
}

impl RealizationJson {
    pub fn from_descriptor(r: &DescriptorRealization) -> Self {
        RealizationJson {
            schema: SCHEMA.to_string(),
            kind: "descriptor".into(),
            d: r.d(),
            dim: r.dim(),
            a: r.a().iter().map(matrix_to_pairs).collect(),
            b: Some(vector_to_pairs(r.b())),
            c: Some(vector_to_pairs(r.c())),
            b_inputs: None,
            c_row: None,
            d_scalar: None,
            certificate: None,
        }
    }

    pub fn from_fm(r: &FmRealization) -> Self {
        RealizationJson {
            schema: SCHEMA.to_string(),
            kind: "fm".into(),
            d: r.d_vars(),
            dim: r.dim(),
            a: r.a().iter().map(matrix_to_pairs).collect(),
            b: None,
            c: None,
            b_inputs: Some(r.b().iter().map(vector_to_pairs).collect()),
            c_row: Some(matrix_to_pairs(r.c())),
            d_scalar: Some(to_pair(r.d_scalar())),
            certificate: None,
        }
    }

    pub fn with_certificate(mut self, cert: &ConstructionCertificate) -> Self {
        self.certificate = Some(CertificateJson::from_certificate(cert));
        self
    }

    pub fn into_realization(self) -> Result<AnyRealization> {
        check_schema(&self.schema)?;
        if self.a.len() != self.d {
            return Err(Error::ShapeMismatch(format!(
                "realization holds {} state matrices, expected d = {}",
                self.a.len(),
                self.d
            )));
        }
        let a = self
            .a
            .iter()
            .map(|m| matrix_from_pairs(self.dim, self.dim, m))
            .collect::<Result<Vec<_>>>()?;
        match self.kind.as_str() {
            "descriptor" => {
                let b = self
                    .b
                    .as_deref()
                    .ok_or_else(|| Error::ShapeMismatch("descriptor needs \"b\"".into()))?;
                let c = self
                    .c
                    .as_deref()
                    .ok_or_else(|| Error::ShapeMismatch("descriptor needs \"c\"".into()))?;
                if self.dim == 0 {
                    return Ok(AnyRealization::Descriptor(DescriptorRealization::trivial(
                        self.d,
                    )));
                }
                Ok(AnyRealization::Descriptor(DescriptorRealization::new(
                    a,
                    vector_from_pairs(b),
                    vector_from_pairs(c),
                )?))
            }
            "fm" => {
                let b = self
                    .b_inputs
                    .as_deref()
                    .ok_or_else(|| Error::ShapeMismatch("fm needs \"B\"".into()))?;
                let c = self
                    .c_row
                    .as_deref()
                    .ok_or_else(|| Error::ShapeMismatch("fm needs \"C\"".into()))?;
                let d_scalar = from_pair(
                    self.d_scalar
                        .ok_or_else(|| Error::ShapeMismatch("fm needs \"D\"".into()))?,
                );
                if self.dim == 0 {
                    return Ok(AnyRealization::Fm(FmRealization::constant(
                        self.d, d_scalar,
                    )));
                }
                Ok(AnyRealization::Fm(FmRealization::new(
                    a,
                    b.iter().map(|v| vector_from_pairs(v)).collect(),
                    matrix_from_pairs(1, self.dim, c)?,
                    d_scalar,
                )?))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown realization kind {other:?}"
            ))),
        }
    }
}

/// Matrix-centre realization: the source FM data plus the centre and the
/// cached pencil inverse `P = L_A(Y)^{-1}`.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MatCentreJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub kind: String,
    pub d: usize,
    /// Centre level m.
    pub m: usize,
    /// Source FM state dimension.
    pub dim: usize,
    pub centre: TupleJson,
    pub fm: RealizationJson,
    #[serde(rename = "P")]
    pub pencil_inverse: Vec<Pair>,
    /// `f(Y)`, m x m.
    pub value_at_centre: Vec<Pair>,
}

impl MatCentreJson {
    pub fn build(fm: &FmRealization, y: &MatrixTuple) -> Result<Self> {
        let mc = crate::matcentre::matcentre_from_fm(fm, y)?;
        let pencil = crate::realization::pencil_apply(fm.a(), y);
        let solver = crate::linalg::LuSolver::new(&pencil);
        let p = solver
            .solve(&CMatrix::identity(pencil.nrows(), pencil.ncols()))
            .ok_or(Error::SingularPencil {
                rcond: solver.rcond(),
            })?;
        Ok(MatCentreJson {
            schema: SCHEMA.to_string(),
            kind: "matcentre".into(),
            d: fm.d_vars(),
            m: y.level(),
            dim: fm.dim(),
            centre: TupleJson::from_tuple(y),
            fm: RealizationJson::from_fm(fm),
            pencil_inverse: matrix_to_pairs(&p),
            value_at_centre: matrix_to_pairs(mc.value_at_centre()),
        })
    }

    /// Reconstructs the structured realization (recomputing the cached maps
    /// from the stored FM data and centre).
    pub fn into_matcentre(
        self,
    ) -> Result<(crate::matcentre::MatrixCentreRealization, FmRealization)> {
        check_schema(&self.schema)?;
        if self.kind != "matcentre" {
            return Err(Error::InvalidParameter(format!(
                "unknown kind {:?} for a matrix-centre payload",
                self.kind
            )));
        }
        let y = self.centre.into_tuple()?;
        let fm = match self.fm.into_realization()? {
            AnyRealization::Fm(fm) => fm,
            AnyRealization::Descriptor(_) => {
                return Err(Error::InvalidParameter(
                    "matrix-centre payload must embed an fm realization".into(),
                ))
            }
        };
        let mc = crate::matcentre::matcentre_from_fm(&fm, &y)?;
        Ok((mc, fm))
    }
}

/// Pole report JSON.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct PoleReportJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub matrix_norm: f64,
    pub eigen_floor: f64,
    pub candidates: Vec<PoleCandidateJson>,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct PoleCandidateJson {
    pub lambda: Pair,
    pub z: Pair,
    pub algebraic_multiplicity: usize,
    pub geometric_multiplicity: usize,
    pub order_bound: usize,
}

impl PoleReportJson {
    pub fn from_report(r: &PoleReport) -> Self {
        PoleReportJson {
            schema: SCHEMA.to_string(),
            matrix_norm: r.matrix_norm,
            eigen_floor: r.eigen_floor,
            candidates: r
                .candidates
                .iter()
                .map(|c| PoleCandidateJson {
                    lambda: to_pair(c.lambda),
                    z: to_pair(c.z),
                    algebraic_multiplicity: c.algebraic_multiplicity,
                    geometric_multiplicity: c.geometric_multiplicity,
                    order_bound: c.order_bound,
                })
                .collect(),
        }
    }
}

/// Density report JSON for the Zariski probe.
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct DensityReportJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub level: usize,
    pub trials: usize,
    pub invertible_count: usize,
    pub fraction: f64,
    pub line_singular_params: Vec<Pair>,
}

impl DensityReportJson {
    pub fn from_report(r: &DensityReport) -> Self {
        DensityReportJson {
            schema: SCHEMA.to_string(),
            level: r.level,
            trials: r.trials,
            invertible_count: r.invertible_count,
            fraction: r.fraction,
            line_singular_params: r.line_singular_params.iter().map(|z| to_pair(*z)).collect(),
        }
    }
}

/// Plain matrix payload (for `schatten` and `eval` outputs).
#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct MatrixJson {
    #[serde(default = "default_schema")]
    pub schema: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Pair>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        MatrixJson {
            schema: SCHEMA.to_string(),
            rows: m.nrows(),
            cols: m.ncols(),
            entries: matrix_to_pairs(m),
        }
    }

    pub fn into_matrix(self) -> Result<CMatrix> {
        check_schema(&self.schema)?;
        matrix_from_pairs(self.rows, self.cols, &self.entries)
    }
}
