//! JSON report shapes. Field order here is the order on the wire.

use std::collections::BTreeMap;

use serde::Serialize;
use warrant_core::blind::ComparisonReport;
use warrant_core::{Classification, EnclosureOutcome, Interval, Rational, RewriteClass, Sample, Token, TokenEnv};

#[derive(Serialize)]
pub struct EvalReport {
    pub command: &'static str,
    pub expr: String,
    pub env: TokenEnv,
    pub value: Rational,
    pub consistent: bool,
    /// Absent when some token's declarations do not intersect.
    pub effective_intervals: Option<BTreeMap<Token, Interval>>,
    pub infeasible_token: Option<Token>,
}

#[derive(Serialize)]
pub struct Overflow {
    pub required: u128,
    pub budget: usize,
}

#[derive(Serialize)]
pub struct EnclosureReport {
    pub command: &'static str,
    pub expr: String,
    pub grid: usize,
    pub budget: usize,
    pub enclosure: EnclosureOutcome,
    pub witnesses: Vec<Sample>,
    pub budget_exceeded: Option<Overflow>,
}

#[derive(Serialize)]
pub struct ClassifyReport {
    pub command: &'static str,
    pub source: String,
    pub target: String,
    #[serde(flatten)]
    pub classification: Classification,
}

#[derive(Serialize)]
pub struct BlindReport {
    pub command: &'static str,
    pub left: String,
    pub right: String,
    pub target: Option<String>,
    pub left_erased: String,
    pub right_erased: String,
    pub blind: ComparisonReport,
}

#[derive(Serialize)]
pub struct DemoReport {
    pub command: &'static str,
    pub family: String,
    pub mode: String,
    pub source: String,
    pub target: String,
    pub counterpart: String,
    pub expected: RewriteClass,
    pub computed: RewriteClass,
    pub matches: bool,
    pub classification: Classification,
    pub blind: ComparisonReport,
}

#[derive(Serialize)]
pub struct OracleReport {
    pub command: &'static str,
    pub expr: String,
    pub grid: usize,
    pub budget: usize,
    pub required: u128,
    pub complete: bool,
    pub rows: Vec<Sample>,
}
