//! The verification suites. Each returns tables whose rows are ordered by
//! trial index, independent of scheduling.

pub mod compare;
pub mod diffuse;
pub mod f2;
pub mod growth;
pub mod norms;
pub mod pushforward;

use wbar::{Exponent, GroupModel, ModelKind};

use crate::error::HarnessError;
use crate::report::Table;

/// Tables and extra files produced by one suite.
#[derive(Clone, Debug, Default)]
pub struct SuiteOutput {
    pub tables: Vec<Table>,
    pub files: Vec<(String, Vec<u8>)>,
    pub notes: Vec<String>,
}

impl SuiteOutput {
    pub fn trials(&self) -> usize {
        self.tables.iter().map(|t| t.rows.len()).sum()
    }

    pub fn violations(&self) -> usize {
        self.tables.iter().map(|t| t.violations).sum()
    }

    /// Merges `other` into `self`, table by table name.
    pub fn absorb(&mut self, other: SuiteOutput) {
        for t in other.tables {
            match self.tables.iter_mut().find(|s| s.name == t.name) {
                Some(s) => s.append(t),
                None => self.tables.push(t),
            }
        }
        self.files.extend(other.files);
        self.notes.extend(other.notes);
    }
}

pub(crate) fn pairs(p: &[Exponent], q: &[Exponent]) -> Result<Vec<(Exponent, Exponent)>, HarnessError> {
    if p.len() != q.len() {
        return Err(HarnessError::Config(format!("{} values of p but {} of q", p.len(), q.len())));
    }
    Ok(p.iter().copied().zip(q.iter().copied()).collect())
}

/// The polynomial growth degree of a model, if it has one.
pub fn polynomial_growth_degree(model: &GroupModel) -> Option<u32> {
    match model.kind() {
        ModelKind::Free { rank: 1 } => Some(1),
        ModelKind::Free { .. } => None,
        ModelKind::FreeAbelian { rank } => Some(*rank as u32),
        ModelKind::Cyclic { .. } => Some(0),
        ModelKind::Product(factors) => factors.iter().map(polynomial_growth_degree).sum(),
    }
}

pub(crate) fn ok_str(b: bool) -> String {
    b.to_string()
}
