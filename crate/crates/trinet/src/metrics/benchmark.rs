//! Published screening benchmarks used for side-by-side reporting.
//!
//! Fixed constants: the trained-model targets for this pipeline, physician
//! diagnosis from history and physical exam alone, and two earlier
//! pneumonia screening tools.

use serde::{Deserialize, Serialize};

use crate::data::Condition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    TriNet,
    Physician,
    Khalil2007,
    Jones2012,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::TriNet => write!(f, "trinet"),
            Method::Physician => write!(f, "physician"),
            Method::Khalil2007 => write!(f, "khalil2007"),
            Method::Jones2012 => write!(f, "jones2012"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub condition: Condition,
    pub method: Method,
    pub ppv: Option<f64>,
    pub tnr: Option<f64>,
    pub tpr: Option<f64>,
}

const fn row(
    condition: Condition,
    method: Method,
    ppv: Option<f64>,
    tnr: Option<f64>,
    tpr: Option<f64>,
) -> BenchmarkRow {
    BenchmarkRow {
        condition,
        method,
        ppv,
        tnr,
        tpr,
    }
}

const TABLE: [BenchmarkRow; 6] = [
    row(Condition::Pneumonia, Method::TriNet, Some(0.86), Some(0.97), Some(0.13)),
    row(Condition::Pneumonia, Method::Physician, Some(0.27), Some(0.84), Some(0.74)),
    row(Condition::Pneumonia, Method::Khalil2007, Some(0.30), Some(0.76), Some(0.90)),
    row(Condition::Pneumonia, Method::Jones2012, Some(0.51), None, Some(0.74)),
    row(Condition::Uti, Method::TriNet, Some(0.93), Some(0.97), Some(0.25)),
    row(Condition::Uti, Method::Physician, Some(0.77), Some(0.69), Some(0.65)),
];

pub fn benchmark_table() -> &'static [BenchmarkRow] {
    &TABLE
}

pub fn benchmark_lookup(condition: Condition, method: Method) -> Option<&'static BenchmarkRow> {
    TABLE
        .iter()
        .find(|r| r.condition == condition && r.method == method)
}
