use serde::Serialize;

use baselab::{BasisSpec, Stats, Strategy};

/// The machine-readable report printed under `--json`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub query: Query,
    pub config: Option<ConfigReport>,
    pub verdict: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<CompareRow>>,
    pub stats: StatsReport,
}

#[derive(Debug, Default, Serialize)]
pub struct Query {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub hypotheses: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct ConfigReport {
    pub basis: String,
    pub vocab: Vec<String>,
    pub fresh: usize,
    pub max_premises: usize,
    pub max_discharge: usize,
    pub max_rules: Option<usize>,
    pub strategy: String,
    pub paranoid: bool,
}

impl ConfigReport {
    pub fn new(spec: &BasisSpec, fresh: usize, strategy: Strategy, paranoid: bool) -> Self {
        ConfigReport {
            basis: spec.level.to_string(),
            vocab: spec.vocab.iter().map(|a| a.to_string()).collect(),
            fresh,
            max_premises: spec.max_premises,
            max_discharge: spec.effective_max_discharge(),
            max_rules: spec.max_rules,
            strategy: strategy.to_string(),
            paranoid,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CompareRow {
    pub formula: String,
    pub support_valid: bool,
    pub oracle: String,
    pub oracle_valid: bool,
    pub agree: bool,
    pub fresh: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<String>,
}

#[derive(Debug, Default, Serialize)]
pub struct StatsReport {
    pub bases_enumerated: u64,
    pub cache_hits: u64,
    pub wall_ms: u64,
}

impl StatsReport {
    pub fn add(&mut self, s: Stats) {
        self.bases_enumerated += s.bases_enumerated;
        self.cache_hits += s.cache_hits;
    }
}
