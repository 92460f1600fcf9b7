//! JSON interchange documents: `{"kind": ..., "dims": [...], "entries": [[re, im], ...]}`
//! with row-major entries, plus certificates, product operators and family specs.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dnorm::{Method, NormCertificate};
use crate::error::{shape_err, Error, Result};
use crate::factorize::ProductOperator;
use crate::states::FamilySpec;
use crate::tensor::{Ket, MultipartiteOperator, ProductKet, SpaceShape};
use crate::C64;

/// A complex number as `[re, im]`.
pub type Pair = [f64; 2];

fn pairs(z: &[C64]) -> Vec<Pair> {
    z.iter().map(|c| [c.re, c.im]).collect()
}

fn complex(p: &[Pair]) -> Vec<C64> {
    p.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

/// One square factor of a product operator, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorDoc {
    pub dim: usize,
    pub entries: Vec<Pair>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    Operator {
        dims: Vec<usize>,
        entries: Vec<Pair>,
    },
    Ket {
        dims: Vec<usize>,
        entries: Vec<Pair>,
    },
    Certificate {
        value: f64,
        method: Method,
        sweeps_used: usize,
        restarts_used: usize,
        converged: bool,
        left: Vec<Vec<Pair>>,
        right: Vec<Vec<Pair>>,
    },
    ProductOperator {
        factors: Vec<FactorDoc>,
        scale: Pair,
        source_trace: Pair,
    },
    Family(FamilySpec),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Operator { .. } => "operator",
            Document::Ket { .. } => "ket",
            Document::Certificate { .. } => "certificate",
            Document::ProductOperator { .. } => "product_operator",
            Document::Family(_) => "family",
        }
    }

    pub fn from_operator(a: &MultipartiteOperator) -> Self {
        Document::Operator {
            dims: a.shape().dims().to_vec(),
            entries: pairs(&a.row_major()),
        }
    }

    pub fn from_ket(psi: &Ket) -> Self {
        Document::Ket {
            dims: psi.shape().dims().to_vec(),
            entries: pairs(psi.amplitudes()),
        }
    }

    pub fn from_certificate(c: &NormCertificate) -> Self {
        let factors = |f: &ProductKet| f.factors().iter().map(|v| pairs(v)).collect();
        Document::Certificate {
            value: c.value,
            method: c.method,
            sweeps_used: c.sweeps_used,
            restarts_used: c.restarts_used,
            converged: c.converged,
            left: factors(&c.left),
            right: factors(&c.right),
        }
    }

    pub fn from_product_operator(p: &ProductOperator) -> Self {
        let row_major = |m: &DMatrix<C64>| pairs(&m.transpose().iter().copied().collect::<Vec<_>>());
        Document::ProductOperator {
            factors: p
                .factors()
                .iter()
                .map(|m| FactorDoc { dim: m.nrows(), entries: row_major(m) })
                .collect(),
            scale: [p.scale().re, p.scale().im],
            source_trace: [p.source_trace().re, p.source_trace().im],
        }
    }

    /// The operator, for operator, ket (as its projector) and product-operator documents.
    pub fn to_operator(&self) -> Result<MultipartiteOperator> {
        match self {
            Document::Operator { dims, entries } => {
                let shape = SpaceShape::new(dims.clone())?;
                let d = shape.total_dim();
                if entries.len() != d * d {
                    return Err(shape_err!("operator on dims {dims:?} needs {} entries, got {}", d * d, entries.len()));
                }
                MultipartiteOperator::from_row_major(shape, &complex(entries))
            }
            Document::Ket { .. } => Ok(MultipartiteOperator::projector(&self.to_ket()?)),
            Document::ProductOperator { .. } => self.to_product_operator()?.assemble(),
            other => Err(Error::Parse(format!("a {} document is not an operator", other.kind()))),
        }
    }

    pub fn to_ket(&self) -> Result<Ket> {
        match self {
            Document::Ket { dims, entries } => {
                let shape = SpaceShape::new(dims.clone())?;
                if entries.len() != shape.total_dim() {
                    return Err(shape_err!("ket on dims {dims:?} needs {} entries, got {}", shape.total_dim(), entries.len()));
                }
                Ket::new(shape, complex(entries))
            }
            other => Err(Error::Parse(format!("a {} document is not a ket", other.kind()))),
        }
    }

    pub fn to_product_operator(&self) -> Result<ProductOperator> {
        match self {
            Document::ProductOperator { factors, scale, source_trace } => {
                let mats = factors
                    .iter()
                    .map(|f| {
                        if f.entries.len() != f.dim * f.dim {
                            return Err(shape_err!("factor of dim {} needs {} entries, got {}", f.dim, f.dim * f.dim, f.entries.len()));
                        }
                        Ok(DMatrix::from_row_slice(f.dim, f.dim, &complex(&f.entries)))
                    })
                    .collect::<Result<Vec<_>>>()?;
                ProductOperator::new(mats, C64::new(scale[0], scale[1]), C64::new(source_trace[0], source_trace[1]))
            }
            other => Err(Error::Parse(format!("a {} document is not a product operator", other.kind()))),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("interchange document: {e}")))
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}
