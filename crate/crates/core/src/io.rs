//! JSON documents for operators, functions, representations and reports.
//!
//! Complex numbers are always two-element `[re, im]` arrays. Subsets are
//! strictly increasing lists of 1-based dimensions. Every list follows the
//! canonical orders of [`crate::indexing`]: terms and blocks by subset
//! (cardinality, then bitmask), coefficients `rank(i)`-major then `rank(m)`,
//! block entries row-major.

use serde::{Deserialize, Serialize};

use crate::approx::{SampledFunction, SampledKernel};
use crate::error::{Error, Result};
use crate::indexing::{enumerate_subsets, DimSubset, MultiIndex};
use crate::linalg::{CMatrix, C64};
use crate::operator::{StepFunction, StepOperator};
use crate::oracle::{InvertibilityCheck, SpectrumCheck};
use crate::representation::{BlockKey, Representation};
use crate::spectral::{Invertibility, SpectrumReport, TraceDetTuple};

pub type Complex = [f64; 2];

fn to_pair(z: C64) -> Complex {
    [z.re, z.im]
}

fn from_pair(z: &Complex) -> C64 {
    C64::new(z[0], z[1])
}

fn pairs(zs: &[C64]) -> Vec<Complex> {
    zs.iter().copied().map(to_pair).collect()
}

fn complexes(zs: &[Complex]) -> Vec<C64> {
    zs.iter().map(from_pair).collect()
}

fn check_kind(kind: &Option<String>, want: &str) -> Result<()> {
    match kind {
        Some(k) if k != want => Err(Error::Malformed(format!(
            "field `kind`: expected \"{want}\", found \"{k}\""
        ))),
        _ => Ok(()),
    }
}

/// Parses a strictly increasing 1-based dimension list.
fn parse_alpha(alpha: &[usize], n_dims: usize, field: &str) -> Result<DimSubset> {
    if alpha.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Malformed(format!(
            "field `{field}`: dimension list {alpha:?} is not strictly increasing"
        )));
    }
    DimSubset::from_dims(alpha, n_dims)
        .map_err(|e| Error::Malformed(format!("field `{field}`: {e}")))
}

fn malformed(field: String) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::SizeGuard(_) | Error::Malformed(_) => e,
        other => Error::Malformed(format!("field `{field}`: {other}")),
    }
}

/// Parses a JSON document; serde's message carries line and column.
pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))
}

/// Pretty JSON with a trailing newline.
pub fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDocument {
    pub alpha: Vec<usize>,
    pub coeffs: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatorDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n_dims: usize,
    pub p: usize,
    pub terms: Vec<TermDocument>,
}

impl OperatorDocument {
    pub fn from_operator(a: &StepOperator) -> Self {
        Self {
            kind: Some("operator".into()),
            n_dims: a.n_dims(),
            p: a.p(),
            terms: a
                .terms()
                .map(|(alpha, c)| TermDocument {
                    alpha: alpha.dims(),
                    coeffs: pairs(c),
                })
                .collect(),
        }
    }

    pub fn to_operator(&self) -> Result<StepOperator> {
        check_kind(&self.kind, "operator")?;
        let mut op = StepOperator::zero(self.n_dims, self.p)?;
        let mut seen = Vec::new();
        for (k, term) in self.terms.iter().enumerate() {
            let alpha = parse_alpha(&term.alpha, self.n_dims, &format!("terms[{k}].alpha"))?;
            if seen.contains(&alpha) {
                return Err(Error::Malformed(format!(
                    "field `terms[{k}].alpha`: duplicate subset {:?}",
                    term.alpha
                )));
            }
            seen.push(alpha);
            op.set_term(alpha, complexes(&term.coeffs))
                .map_err(malformed(format!("terms[{k}].coeffs")))?;
        }
        Ok(op)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n_dims: usize,
    pub p: usize,
    #[serde(default = "one")]
    pub q: usize,
    pub values: Vec<Complex>,
}

fn one() -> usize {
    1
}

impl FunctionDocument {
    pub fn from_function(u: &StepFunction) -> Self {
        Self {
            kind: Some("function".into()),
            n_dims: u.n_dims(),
            p: u.p(),
            q: u.q(),
            values: pairs(u.values()),
        }
    }

    pub fn to_function(&self) -> Result<StepFunction> {
        check_kind(&self.kind, "function")?;
        StepFunction::new(self.n_dims, self.p, self.q, complexes(&self.values))
            .map_err(malformed("values".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockDocument {
    pub alpha: Vec<usize>,
    /// Entries of `i` over the complement of `alpha`.
    pub index: Vec<usize>,
    pub dim: usize,
    pub entries: Vec<Complex>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepresentationDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n_dims: usize,
    pub p: usize,
    pub blocks: Vec<BlockDocument>,
}

impl RepresentationDocument {
    pub fn from_representation(r: &Representation) -> Self {
        Self {
            kind: Some("representation".into()),
            n_dims: r.n_dims(),
            p: r.p(),
            blocks: r
                .blocks()
                .map(|(key, b)| BlockDocument {
                    alpha: key.subset.dims(),
                    index: key.multi_index(r.n_dims(), r.p()).entries().to_vec(),
                    dim: b.dim(),
                    entries: pairs(b.as_slice()),
                })
                .collect(),
        }
    }

    pub fn to_representation(&self) -> Result<Representation> {
        check_kind(&self.kind, "representation")?;
        crate::indexing::check_sizes(self.n_dims, self.p)?;
        let mut keyed = Vec::with_capacity(self.blocks.len());
        for (k, b) in self.blocks.iter().enumerate() {
            let subset = parse_alpha(&b.alpha, self.n_dims, &format!("blocks[{k}].alpha"))?;
            let rest = subset.complement(self.n_dims);
            let index = MultiIndex::new(self.p, rest, b.index.clone())
                .map_err(malformed(format!("blocks[{k}].index")))?;
            let matrix = CMatrix::from_row_major(b.dim, complexes(&b.entries))
                .map_err(malformed(format!("blocks[{k}].entries")))?;
            keyed.push((
                BlockKey {
                    subset,
                    index: index.rank(),
                },
                matrix,
            ));
        }
        Representation::from_keyed(self.n_dims, self.p, keyed).map_err(malformed("blocks".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntryDocument {
    pub value: Complex,
    pub alpha: Vec<usize>,
    pub index: Vec<usize>,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumDocument {
    pub kind: String,
    pub n_dims: usize,
    pub p: usize,
    pub entries: Vec<SpectrumEntryDocument>,
}

impl SpectrumDocument {
    pub fn from_report(s: &SpectrumReport) -> Self {
        Self {
            kind: "spectrum".into(),
            n_dims: s.n_dims(),
            p: s.p(),
            entries: s
                .entries()
                .iter()
                .map(|e| SpectrumEntryDocument {
                    value: to_pair(e.value),
                    alpha: e.source.subset.dims(),
                    index: e.source.multi_index(s.n_dims(), s.p()).entries().to_vec(),
                    label: e.label.as_str().into(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentDocument {
    pub alpha: Vec<usize>,
    pub index: Vec<usize>,
    pub value: Complex,
}

/// Trace or determinant tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TupleDocument {
    pub kind: String,
    pub n_dims: usize,
    pub p: usize,
    pub components: Vec<ComponentDocument>,
}

impl TupleDocument {
    pub fn from_tuple(kind: &str, t: &TraceDetTuple) -> Self {
        Self {
            kind: kind.into(),
            n_dims: t.n_dims(),
            p: t.p(),
            components: t
                .iter()
                .map(|(key, v)| ComponentDocument {
                    alpha: key.subset.dims(),
                    index: key.multi_index(t.n_dims(), t.p()).entries().to_vec(),
                    value: to_pair(v),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledTermDocument {
    pub alpha: Vec<usize>,
    pub values: Vec<Complex>,
}

/// Kernel samples at cell midpoints of a `resolution`-grid, optionally with a
/// sampled right-hand side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledKernelDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n_dims: usize,
    pub resolution: usize,
    pub terms: Vec<SampledTermDocument>,
}

impl SampledKernelDocument {
    pub fn from_kernel(k: &SampledKernel) -> Self {
        Self {
            kind: Some("sampled-kernel".into()),
            n_dims: k.n_dims(),
            resolution: k.resolution(),
            terms: k
                .terms()
                .map(|(alpha, v)| SampledTermDocument {
                    alpha: alpha.dims(),
                    values: pairs(v),
                })
                .collect(),
        }
    }

    pub fn to_kernel(&self) -> Result<SampledKernel> {
        check_kind(&self.kind, "sampled-kernel")?;
        let mut k = SampledKernel::new(self.n_dims, self.resolution)?;
        for (idx, t) in self.terms.iter().enumerate() {
            let alpha = parse_alpha(&t.alpha, self.n_dims, &format!("terms[{idx}].alpha"))?;
            if k.terms().any(|(a, _)| a == alpha) {
                return Err(Error::Malformed(format!(
                    "field `terms[{idx}].alpha`: duplicate subset {:?}",
                    t.alpha
                )));
            }
            k.set_term(alpha, complexes(&t.values))
                .map_err(malformed(format!("terms[{idx}].values")))?;
        }
        Ok(k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledFunctionDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    pub n_dims: usize,
    pub resolution: usize,
    pub values: Vec<Complex>,
}

impl SampledFunctionDocument {
    pub fn to_function(&self) -> Result<SampledFunction> {
        check_kind(&self.kind, "sampled-function")?;
        SampledFunction::new(self.n_dims, self.resolution, complexes(&self.values))
            .map_err(malformed("values".into()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvertibilityDocument {
    pub invertible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smallest_eigenvalue: Option<Complex>,
}

impl InvertibilityDocument {
    pub fn from_verdict(v: &Invertibility) -> Self {
        match v {
            Invertibility::Invertible => Self {
                invertible: true,
                alpha: None,
                index: None,
                smallest_eigenvalue: None,
            },
            Invertibility::Singular {
                block,
                index,
                smallest_eigenvalue,
            } => Self {
                invertible: false,
                alpha: Some(block.subset.dims()),
                index: Some(index.clone()),
                smallest_eigenvalue: smallest_eigenvalue.map(to_pair),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleCaseDocument {
    pub case: usize,
    pub q: usize,
    pub spectrum_passed: bool,
    pub oracle_eigenvalues: usize,
    pub predicted_eigenvalues: usize,
    pub max_distance: f64,
    pub unmatched_oracle: Vec<Complex>,
    pub unmatched_predicted: Vec<Complex>,
    pub invertible_blocks: bool,
    pub invertible_determinants: bool,
    pub invertible_dense: bool,
    pub invertibility_agree: bool,
}

impl OracleCaseDocument {
    pub fn new(case: usize, spectrum: &SpectrumCheck, inv: &InvertibilityCheck) -> Self {
        Self {
            case,
            q: spectrum.q,
            spectrum_passed: spectrum.passed(),
            oracle_eigenvalues: spectrum.oracle.len(),
            predicted_eigenvalues: spectrum.predicted.len(),
            max_distance: spectrum.matching.max_distance,
            unmatched_oracle: pairs(&spectrum.matching.unmatched_left),
            unmatched_predicted: pairs(&spectrum.matching.unmatched_right),
            invertible_blocks: inv.blocks,
            invertible_determinants: inv.determinants,
            invertible_dense: inv.dense,
            invertibility_agree: inv.agree(),
        }
    }

    pub fn passed(&self) -> bool {
        self.spectrum_passed && self.invertibility_agree
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReportDocument {
    pub kind: String,
    pub tolerance: f64,
    pub all_passed: bool,
    pub cases: Vec<OracleCaseDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub kind: String,
    pub error: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<Vec<usize>>,
}

impl ErrorDocument {
    pub fn from_error(e: &Error) -> Self {
        let (error, alpha, index) = match e {
            Error::SingularBlock { subset, index } => {
                ("singular-block", Some(subset.clone()), Some(index.clone()))
            }
            Error::Malformed(_) => ("malformed-input", None, None),
            Error::SizeGuard(_) => ("size-guard", None, None),
            _ => ("failure", None, None),
        };
        Self {
            kind: "error".into(),
            error: error.into(),
            message: e.to_string(),
            alpha,
            index,
        }
    }
}

/// All subsets of `{1..n_dims}` as dimension lists, in canonical order.
pub fn canonical_alpha_lists(n_dims: usize) -> Vec<Vec<usize>> {
    enumerate_subsets(n_dims)
        .into_iter()
        .map(|s| s.dims())
        .collect()
}
