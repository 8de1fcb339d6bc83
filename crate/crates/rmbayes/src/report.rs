//! JSON report documents. Each carries a `schema` tag matching a file under
//! `schemas/` and an embedded [`RunManifest`].

use serde::Serialize;

use rmbayes_core::{
    AnovaTable, CellResult, Choice, DesignSpec, EvidenceResult, FiveNumber, GridReport, GridSpec,
    Relation, ReportedStat, SimulationConfig,
};

use crate::manifest::RunManifest;

pub const EVIDENCE_SCHEMA: &str = "rmbayes/evidence/v1";
pub const ANOVA_SCHEMA: &str = "rmbayes/anova/v1";
pub const PARSE_SCHEMA: &str = "rmbayes/parse/v1";
pub const GRID_SCHEMA: &str = "rmbayes/grid/v1";

#[derive(Debug, Clone, Serialize)]
pub struct EvidenceJson {
    #[serde(flatten)]
    pub result: EvidenceResult,
    pub choice: Choice,
}

impl From<EvidenceResult> for EvidenceJson {
    fn from(result: EvidenceResult) -> Self {
        Self {
            choice: result.choice(),
            result,
        }
    }
}

/// Output of `bf` and `bf-ss`.
#[derive(Debug, Clone, Serialize)]
pub struct EvidenceDoc {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub design: DesignSpec,
    pub evidence: EvidenceJson,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnovaEvidence {
    pub minimal_rm: EvidenceJson,
    pub nathoo_masson: Option<EvidenceJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nathoo_masson_error: Option<String>,
}

/// Output of `anova`.
#[derive(Debug, Clone, Serialize)]
pub struct AnovaDoc {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub conditions: Vec<String>,
    pub table: AnovaTable,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<AnovaEvidence>,
}

/// One report found by `parse`, with its inferred design and evidence when
/// inference succeeded.
#[derive(Debug, Clone, Serialize)]
pub struct ParsedReport {
    pub f_value: f64,
    pub f_upper_bound: bool,
    pub df1: f64,
    pub df2: f64,
    pub p_reported: Option<f64>,
    pub p_relation: Option<Relation>,
    pub span: [usize; 2],
    pub design: Option<DesignSpec>,
    pub evidence: Option<EvidenceJson>,
    /// True when F was reported as an upper bound, making BF01 a lower bound.
    pub bf01_is_lower_bound: bool,
    pub reason: Option<String>,
}

impl ParsedReport {
    pub fn new(stat: &ReportedStat) -> Self {
        Self {
            f_value: stat.f_value,
            f_upper_bound: stat.is_upper_bound(),
            df1: stat.df1,
            df2: stat.df2,
            p_reported: stat.p_reported,
            p_relation: stat.p_relation,
            span: [stat.span.start, stat.span.end],
            design: None,
            evidence: None,
            bf01_is_lower_bound: false,
            reason: None,
        }
    }
}

/// Output of `parse`.
#[derive(Debug, Clone, Serialize)]
pub struct ParseDoc {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub reports: Vec<ParsedReport>,
}

/// Cell metrics without the per-replication records.
#[derive(Debug, Clone, Serialize)]
pub struct CellSummary {
    pub id: String,
    pub config: SimulationConfig,
    pub true_model: Choice,
    pub accuracy_min: f64,
    pub accuracy_nm: f64,
    pub consistency: f64,
    pub posterior_correlation: Option<f64>,
    pub posterior_quantiles_min: FiveNumber,
    pub posterior_quantiles_nm: FiveNumber,
    pub median_posterior_difference: f64,
}

impl From<&CellResult> for CellSummary {
    fn from(c: &CellResult) -> Self {
        Self {
            id: c.config.label(),
            config: c.config,
            true_model: c.true_model(),
            accuracy_min: c.accuracy_min,
            accuracy_nm: c.accuracy_nm,
            consistency: c.consistency,
            posterior_correlation: c.posterior_correlation,
            posterior_quantiles_min: c.posterior_quantiles_min,
            posterior_quantiles_nm: c.posterior_quantiles_nm,
            median_posterior_difference: c.median_posterior_difference,
        }
    }
}

/// Output of `simulate` (`grid_report.json`).
#[derive(Debug, Clone, Serialize)]
pub struct GridDoc {
    pub schema: &'static str,
    pub manifest: RunManifest,
    pub spec: GridSpec,
    pub cells: Vec<CellSummary>,
}

impl GridDoc {
    pub fn new(manifest: RunManifest, report: &GridReport) -> Self {
        Self {
            schema: GRID_SCHEMA,
            manifest,
            spec: report.spec.clone(),
            cells: report.cells.iter().map(CellSummary::from).collect(),
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report types serialize infallibly");
    s.push('\n');
    s
}
