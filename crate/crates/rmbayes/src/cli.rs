//! Command-line interface.
//!
//! Exit codes: 0 success, 1 simulation failure, 2 invalid arguments or
//! input data, 3 I/O failure.

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use rmbayes_core::{
    bf01_between, bf01_minimal_rm, delta_bic_nathoo, infer_rm_design, parse_reports, rm_anova,
    DesignSpec, Error as CoreError, EvidenceResult, GridSpec, Spacing, SummaryStats,
};

use crate::input::{read_wide_csv_path, InputError};
use crate::manifest::RunManifest;
use crate::report::{
    self, AnovaDoc, AnovaEvidence, EvidenceDoc, EvidenceJson, GridDoc, ParseDoc, ParsedReport,
};
use crate::{grid, render, tables, OUT_DIR_ENV};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Simulation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Io(_) => 3,
            CliError::Simulation(_) => 1,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

fn io_err(context: impl std::fmt::Display) -> impl FnOnce(io::Error) -> CliError {
    move |e| CliError::Io(format!("{context}: {e}"))
}

#[derive(Debug, Parser)]
#[command(
    name = "rmbayes",
    version,
    about = "Bayes factors for repeated-measures ANOVA from summary statistics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal BIC Bayes factor from F, n subjects and k conditions
    Bf(BfArgs),
    /// Nathoo-Masson Bayes factor from SST, SSA and SSB
    BfSs(BfSsArgs),
    /// Between-subjects BIC Bayes factor from F, its dfs and the observation count
    BfBetween(BfBetweenArgs),
    /// Repeated-measures ANOVA table from a wide CSV (one row per subject)
    Anova(AnovaArgs),
    /// Monte Carlo comparison of the two repeated-measures methods
    Simulate(SimulateArgs),
    /// Scan text for APA-style F reports and compute Bayes factors
    Parse(ParseArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct CommonOut {
    /// Prior probability of H0
    #[arg(long = "prior-h0", default_value_t = 0.5)]
    pub prior_h0: f64,
    /// Emit JSON instead of text
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct BfArgs {
    #[arg(long = "f", allow_negative_numbers = true)]
    pub f: f64,
    /// Number of subjects
    #[arg(long)]
    pub n: u32,
    /// Number of repeated conditions
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: CommonOut,
}

#[derive(Debug, Args, Serialize)]
pub struct BfSsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub sst: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub ssa: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub ssb: f64,
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub k: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: CommonOut,
}

#[derive(Debug, Args, Serialize)]
pub struct BfBetweenArgs {
    #[arg(long = "f", allow_negative_numbers = true)]
    pub f: f64,
    #[arg(long)]
    pub df1: u64,
    #[arg(long)]
    pub df2: u64,
    /// Total number of independent observations N
    #[arg(long = "n-obs")]
    pub n_obs: u64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: CommonOut,
}

#[derive(Debug, Args, Serialize)]
pub struct AnovaArgs {
    /// Wide CSV: header row, then one row per subject, one column per condition
    pub csv_path: PathBuf,
    /// Append minimal and Nathoo-Masson Bayes factors
    #[arg(long)]
    pub bf: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: CommonOut,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacingArg {
    Equal,
    UniformInterior,
}

impl From<SpacingArg> for Spacing {
    fn from(s: SpacingArg) -> Self {
        match s {
            SpacingArg::Equal => Spacing::Equal,
            SpacingArg::UniformInterior => Spacing::UniformInterior,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long = "n-list", value_delimiter = ',', default_values_t = [20u32, 50, 80])]
    pub n_list: Vec<u32>,
    #[arg(long = "rho-list", value_delimiter = ',', default_values_t = [0.2f64, 0.8])]
    pub rho_list: Vec<f64>,
    #[arg(long = "delta-list", value_delimiter = ',', default_values_t = [0.0f64, 0.2, 0.5])]
    pub delta_list: Vec<f64>,
    #[arg(long, default_value_t = 3)]
    pub k: u32,
    #[arg(long, default_value_t = 1000)]
    pub reps: u32,
    /// Master seed, decimal or 0x-prefixed hex
    #[arg(long, value_parser = parse_seed, default_value = "0x5eed")]
    pub seed: u64,
    /// Placement of the interior condition means
    #[arg(long, value_enum, default_value_t = SpacingArg::UniformInterior)]
    pub spacing: SpacingArg,
    /// Output directory [default: $RMBAYES_OUT_DIR or ./rmbayes-out]
    #[arg(long = "out-dir")]
    pub out_dir: Option<PathBuf>,
    /// Also write per_rep.csv
    #[arg(long = "emit-per-rep")]
    pub emit_per_rep: bool,
    /// Worker threads (default: all cores)
    #[arg(long)]
    #[serde(skip)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct ParseArgs {
    /// Text file to scan; omit or use '-' for standard input
    pub text_path: Option<PathBuf>,
    /// Treat every report as a one-factor repeated-measures result without the caveat note
    #[arg(long = "assume-rm")]
    pub assume_rm: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: CommonOut,
}

/// Parses a seed given in decimal or `0x` hex.
pub fn parse_seed(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => s.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

fn params<T: Serialize>(args: &T) -> serde_json::Value {
    serde_json::to_value(args).unwrap_or(serde_json::Value::Null)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(io_err("writing output"))
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Bf(a) => cmd_bf(&a, out),
        Command::BfSs(a) => cmd_bf_ss(&a, out),
        Command::BfBetween(a) => cmd_bf_between(&a, out),
        Command::Anova(a) => cmd_anova(&a, out),
        Command::Simulate(a) => cmd_simulate(&a, out),
        Command::Parse(a) => cmd_parse(&a, io::stdin().lock(), out),
    }
}

fn evidence_out(
    out: &mut dyn Write,
    subcommand: &str,
    parameters: serde_json::Value,
    design: DesignSpec,
    result: EvidenceResult,
    notes: Vec<String>,
    json: bool,
) -> Result<(), CliError> {
    if json {
        let doc = EvidenceDoc {
            schema: report::EVIDENCE_SCHEMA,
            manifest: RunManifest::new(subcommand, parameters, None),
            design,
            evidence: result.into(),
            notes,
        };
        emit(out, &report::to_json(&doc))
    } else {
        emit(out, &render::evidence(&design, &result, &notes))
    }
}

pub fn cmd_bf(a: &BfArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let design = DesignSpec::new(a.n, a.k)?;
    let result = bf01_minimal_rm(a.f, design)?.with_prior(a.out.prior_h0)?;
    evidence_out(out, "bf", params(a), design, result, Vec::new(), a.out.json)
}

pub fn cmd_bf_ss(a: &BfSsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let design = DesignSpec::new(a.n, a.k)?;
    let stats = SummaryStats::new(a.sst, a.ssa, a.ssb, design)?;
    let result = delta_bic_nathoo(&stats)?.with_prior(a.out.prior_h0)?;
    let mut notes = Vec::new();
    if a.ssa == 0.0 {
        notes.push("SSA = 0: the treatment explains none of the variance".to_owned());
    }
    evidence_out(out, "bf-ss", params(a), design, result, notes, a.out.json)
}

pub fn cmd_bf_between(a: &BfBetweenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let result = bf01_between(a.f, a.df1, a.df2, a.n_obs)?.with_prior(a.out.prior_h0)?;
    let design = DesignSpec {
        n: u32::try_from(a.n_obs).unwrap_or(u32::MAX),
        k: u32::try_from(a.df1 + 1).unwrap_or(u32::MAX),
    };
    let notes = vec![format!(
        "between-subjects design: n is the total observation count N = {}",
        a.n_obs
    )];
    evidence_out(out, "bf-between", params(a), design, result, notes, a.out.json)
}

pub fn cmd_anova(a: &AnovaArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let wide = read_wide_csv_path(&a.csv_path)?;
    let table = rm_anova(&wide.data)?;
    let evidence = if a.bf {
        let minimal = bf01_minimal_rm(table.f_stat, table.design)?.with_prior(a.out.prior_h0)?;
        let nm = SummaryStats::from_anova(&table)
            .and_then(|s| delta_bic_nathoo(&s))
            .and_then(|r| r.with_prior(a.out.prior_h0));
        Some((minimal, nm))
    } else {
        None
    };

    if a.out.json {
        let doc = AnovaDoc {
            schema: report::ANOVA_SCHEMA,
            manifest: RunManifest::new("anova", params(a), None),
            conditions: wide.conditions,
            table,
            evidence: evidence.map(|(minimal, nm)| AnovaEvidence {
                minimal_rm: minimal.into(),
                nathoo_masson_error: nm.as_ref().err().map(ToString::to_string),
                nathoo_masson: nm.ok().map(EvidenceJson::from),
            }),
        };
        return emit(out, &report::to_json(&doc));
    }

    let mut text = render::anova(&table);
    if let Some((minimal, nm)) = evidence {
        text.push('\n');
        text.push_str(&render::anova_evidence("minimal", &minimal));
        text.push('\n');
        match nm {
            Ok(nm) => text.push_str(&render::anova_evidence("nathoo-masson", &nm)),
            Err(e) => text.push_str(&format!("[nathoo-masson] unavailable: {e}\n")),
        }
    }
    emit(out, &text)
}

fn resolve_out_dir(a: &SimulateArgs) -> PathBuf {
    a.out_dir
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("rmbayes-out"))
}

fn write_file(
    dir: &Path,
    name: &str,
    f: impl FnOnce(&mut BufWriter<fs::File>) -> Result<(), CliError>,
) -> Result<(), CliError> {
    let path = dir.join(name);
    let file = fs::File::create(&path).map_err(io_err(path.display()))?;
    let mut w = BufWriter::new(file);
    f(&mut w)?;
    w.flush().map_err(io_err(path.display()))
}

fn csv_io(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

pub fn cmd_simulate(a: &SimulateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = GridSpec {
        n_values: a.n_list.clone(),
        rho_values: a.rho_list.clone(),
        delta_values: a.delta_list.clone(),
        k: a.k,
        reps: a.reps,
        master_seed: a.seed,
        spacing: a.spacing.into(),
    };
    spec.validate()?;
    let dir = resolve_out_dir(a);
    fs::create_dir_all(&dir).map_err(io_err(dir.display()))?;

    let run = || grid::run_grid_parallel(&spec);
    let result = match a.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::Validation(e.to_string()))?
            .install(run),
        None => run(),
    };
    let report = result.map_err(|e| CliError::Simulation(e.to_string()))?;

    let mut parameters = params(a);
    if let Some(obj) = parameters.as_object_mut() {
        obj.insert("out_dir".into(), serde_json::Value::Null);
    }
    let doc = GridDoc::new(RunManifest::new("simulate", parameters, Some(a.seed)), &report);
    write_file(&dir, "grid_report.json", |w| {
        w.write_all(report::to_json(&doc).as_bytes())
            .map_err(io_err("grid_report.json"))
    })?;
    write_file(&dir, tables::TABLE2, |w| {
        tables::write_accuracy(&report, w).map_err(csv_io)
    })?;
    write_file(&dir, tables::TABLE3, |w| {
        tables::write_consistency(&report, w).map_err(csv_io)
    })?;
    write_file(&dir, tables::TABLE4, |w| {
        tables::write_correlation(&report, w).map_err(csv_io)
    })?;
    write_file(&dir, tables::BOXPLOT, |w| {
        tables::write_boxplot(&report, w).map_err(csv_io)
    })?;
    write_file(&dir, tables::SCATTER, |w| {
        tables::write_scatter(&report, w).map_err(csv_io)
    })?;
    if a.emit_per_rep {
        write_file(&dir, tables::PER_REP, |w| {
            tables::write_per_rep(&report, w).map_err(csv_io)
        })?;
    }

    let mut text = render::grid_summary(&report);
    text.push_str(&format!("wrote reports to {}\n", dir.display()));
    emit(out, &text)
}

pub fn cmd_parse<R: Read>(a: &ParseArgs, stdin: R, out: &mut dyn Write) -> Result<(), CliError> {
    let bytes = match a.text_path.as_deref() {
        Some(p) if p != Path::new("-") => fs::read(p).map_err(io_err(p.display()))?,
        _ => {
            let mut buf = Vec::new();
            let mut stdin = stdin;
            stdin.read_to_end(&mut buf).map_err(io_err("stdin"))?;
            buf
        }
    };
    let text = String::from_utf8_lossy(&bytes);
    check_prior(a.out.prior_h0)?;

    let reports: Vec<ParsedReport> = parse_reports(&text)
        .iter()
        .map(|stat| {
            let mut r = ParsedReport::new(stat);
            match infer_rm_design(stat) {
                Ok(design) => {
                    match bf01_minimal_rm(stat.f_value, design)
                        .and_then(|e| e.with_prior(a.out.prior_h0))
                    {
                        Ok(e) => {
                            r.design = Some(design);
                            r.evidence = Some(e.into());
                            r.bf01_is_lower_bound = stat.is_upper_bound();
                        }
                        Err(e) => r.reason = Some(e.to_string()),
                    }
                }
                Err(e) => r.reason = Some(e.to_string()),
            }
            r
        })
        .collect();

    if a.out.json {
        let doc = ParseDoc {
            schema: report::PARSE_SCHEMA,
            manifest: RunManifest::new("parse", params(a), None),
            reports,
        };
        emit(out, &report::to_json(&doc))
    } else {
        emit(out, &render::parsed(&reports, !a.assume_rm))
    }
}

fn check_prior(p: f64) -> Result<(), CliError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "prior p(H0) must lie strictly between 0 and 1 (got {p})"
        )))
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
