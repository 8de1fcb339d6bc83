//! Monte Carlo comparison of the minimal and sums-of-squares Bayes factors.
//!
//! Data come from the mixed model `y_ij = mu + alpha_j + pi_i + e_ij` with
//! `pi_i ~ N(0, rho)` and `e_ij ~ N(0, 1 - rho)`, so the marginal variance is
//! fixed at one and `rho` is the intraclass correlation. Effect size `delta`
//! is the range of the condition means in marginal standard deviations.
//!
//! Every replication draws from its own ChaCha8 stream seeded by mixing
//! `(master_seed, cell key, rep index, purpose)` through splitmix64, so
//! results do not depend on the order or parallelism of execution. The cell
//! key is derived from the cell's parameters, not its position in a grid.
//! Normal deviates use the ziggurat sampler from `rand_distr`.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::anova::{rm_anova, DataMatrix, DesignSpec};
use crate::bayes::{bf01_minimal_rm, delta_bic_nathoo, Choice, EvidenceResult, SummaryStats};
use crate::error::{domain, Error};

/// How the intermediate condition means are placed between the two extremes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Spacing {
    /// Fixed, equally spaced means.
    Equal,
    /// Lowest and highest condition pinned `delta` apart; the `k - 2` interior
    /// means drawn uniformly between them, afresh for each replication.
    #[default]
    UniformInterior,
}

impl Spacing {
    pub fn as_str(&self) -> &'static str {
        match self {
            Spacing::Equal => "equal",
            Spacing::UniformInterior => "uniform_interior",
        }
    }
}

/// Parameters of one simulation cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimulationConfig {
    pub n: u32,
    pub k: u32,
    pub rho: f64,
    pub delta: f64,
    pub reps: u32,
    pub master_seed: u64,
    pub grand_mean: f64,
    pub spacing: Spacing,
}

impl SimulationConfig {
    /// Cell with the default `k = 3`, 1000 replications and `mu = 0`.
    pub fn new(n: u32, rho: f64, delta: f64, master_seed: u64) -> Self {
        Self {
            n,
            k: 3,
            rho,
            delta,
            reps: 1000,
            master_seed,
            grand_mean: 0.0,
            spacing: Spacing::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        DesignSpec::new(self.n, self.k)?;
        if !(0.0..1.0).contains(&self.rho) {
            return Err(domain("rho must lie in [0, 1)", self.rho));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(domain("delta must be finite and non-negative", self.delta));
        }
        if self.reps < 1 {
            return Err(domain("reps must be at least 1", 0.0));
        }
        if !self.grand_mean.is_finite() {
            return Err(domain("grand mean must be finite", self.grand_mean));
        }
        Ok(())
    }

    pub fn design(&self) -> DesignSpec {
        DesignSpec {
            n: self.n,
            k: self.k,
        }
    }

    pub fn subject_variance(&self) -> f64 {
        self.rho
    }

    pub fn error_variance(&self) -> f64 {
        1.0 - self.rho
    }

    /// Short label such as `d0.2_r0.8_n50_k3`.
    pub fn label(&self) -> String {
        format!("d{}_r{}_n{}_k{}", self.delta, self.rho, self.n, self.k)
    }

    /// Stable key identifying the cell's generating parameters.
    pub fn cell_key(&self) -> u64 {
        let mut h = splitmix64(u64::from(self.n) ^ (u64::from(self.k) << 32));
        for word in [
            self.rho.to_bits(),
            self.delta.to_bits(),
            self.grand_mean.to_bits(),
            self.spacing as u64,
        ] {
            h = splitmix64(h ^ word);
        }
        h
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy)]
#[repr(u64)]
enum Stream {
    Data = 1,
    Profile = 2,
}

fn substream(config: &SimulationConfig, rep: u32, purpose: Stream) -> ChaCha8Rng {
    let mut s = splitmix64(config.master_seed);
    s = splitmix64(s ^ config.cell_key());
    s = splitmix64(s ^ u64::from(rep));
    s = splitmix64(s ^ purpose as u64);
    ChaCha8Rng::seed_from_u64(s)
}

/// Treatment effects `alpha_j` for one dataset.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TreatmentProfile {
    pub alphas: Vec<f64>,
}

impl TreatmentProfile {
    /// Places conditions at `delta * positions`, then centres them.
    /// `positions` must span exactly `[0, 1]`.
    fn from_positions(delta: f64, positions: &[f64]) -> Self {
        let mean = positions.iter().sum::<f64>() / positions.len() as f64;
        Self {
            alphas: positions.iter().map(|p| delta * (p - mean)).collect(),
        }
    }

    pub fn range(&self) -> f64 {
        let max = self.alphas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = self.alphas.iter().copied().fold(f64::INFINITY, f64::min);
        max - min
    }

    /// `sum_j alpha_j^2`, which together with `n / sigma_e^2` sets the
    /// noncentrality of F.
    pub fn sum_of_squares(&self) -> f64 {
        self.alphas.iter().map(|a| a * a).sum()
    }
}

/// Equally spaced, zero-sum effects whose range is `delta` (the marginal
/// standard deviation being one).
pub fn make_profile(config: &SimulationConfig) -> TreatmentProfile {
    let k = config.k.max(2) as usize;
    let last = (k - 1) as f64;
    let positions: Vec<f64> = (0..k).map(|j| j as f64 / last).collect();
    TreatmentProfile::from_positions(config.delta, &positions)
}

/// Effects used for replication `rep` under the configured spacing.
pub fn profile_for_rep(config: &SimulationConfig, rep: u32) -> TreatmentProfile {
    match config.spacing {
        Spacing::Equal => make_profile(config),
        Spacing::UniformInterior => {
            let k = config.k.max(2) as usize;
            let mut rng = substream(config, rep, Stream::Profile);
            let mut positions = Vec::with_capacity(k);
            positions.push(0.0);
            positions.extend((0..k - 2).map(|_| rng.random::<f64>()));
            positions.push(1.0);
            TreatmentProfile::from_positions(config.delta, &positions)
        }
    }
}

/// Draws the `n x k` dataset for replication `rep`.
///
/// Subject effects are drawn first, then errors row by row, all from the
/// replication's data stream.
pub fn generate_dataset(
    config: &SimulationConfig,
    profile: &TreatmentProfile,
    rep: u32,
) -> Result<DataMatrix, Error> {
    config.validate()?;
    if profile.alphas.len() != config.k as usize {
        return Err(Error::Shape {
            expected: config.k as usize,
            found: profile.alphas.len(),
        });
    }
    let n = config.n as usize;
    let k = config.k as usize;
    let sd_subject = libm::sqrt(config.subject_variance());
    let sd_error = libm::sqrt(config.error_variance());
    let mut rng = substream(config, rep, Stream::Data);

    let subject: Vec<f64> = (0..n)
        .map(|_| sd_subject * rng.sample::<f64, _>(StandardNormal))
        .collect();
    let mut values = Vec::with_capacity(n * k);
    for pi in &subject {
        for alpha in &profile.alphas {
            let e: f64 = rng.sample(StandardNormal);
            values.push(config.grand_mean + alpha + pi + sd_error * e);
        }
    }
    DataMatrix::new(n, k, values)
}

/// Outcome of one replication.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RepRecord {
    pub rep: u32,
    pub f_stat: f64,
    pub log_bf01_min: f64,
    pub log_bf01_nm: f64,
    pub posterior_min: f64,
    pub posterior_nm: f64,
    pub choice_min: Choice,
    pub choice_nm: Choice,
}

impl RepRecord {
    pub fn bf01_min(&self) -> f64 {
        libm::exp(self.log_bf01_min)
    }

    pub fn bf01_nm(&self) -> f64 {
        libm::exp(self.log_bf01_nm)
    }
}

/// Tukey five-number summary (min, lower hinge, median, upper hinge, max).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FiveNumber {
    pub min: f64,
    pub lower_hinge: f64,
    pub median: f64,
    pub upper_hinge: f64,
    pub max: f64,
}

impl FiveNumber {
    /// Returns `None` for an empty or NaN-containing sample.
    pub fn from_sample(values: &[f64]) -> Option<Self> {
        if values.is_empty() || values.iter().any(|v| v.is_nan()) {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let m = v.len();
        // Hinges are medians of the lower and upper halves, each including
        // the median when m is odd.
        let half = m.div_ceil(2);
        Some(Self {
            min: v[0],
            lower_hinge: sorted_median(&v[..half]),
            median: sorted_median(&v),
            upper_hinge: sorted_median(&v[m - half..]),
            max: v[m - 1],
        })
    }
}

fn sorted_median(v: &[f64]) -> f64 {
    let m = v.len();
    if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    }
}

/// Pearson correlation; `None` with fewer than two points or zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let m = xs.len();
    if m < 2 || ys.len() != m {
        return None;
    }
    let mx = crate::sum::sum(xs.iter().copied()) / m as f64;
    let my = crate::sum::sum(ys.iter().copied()) / m as f64;
    let sxy = crate::sum::sum(xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)));
    let sxx = crate::sum::sum(xs.iter().map(|x| (x - mx) * (x - mx)));
    let syy = crate::sum::sum(ys.iter().map(|y| (y - my) * (y - my)));
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    Some((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

/// Aggregated metrics for one cell.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CellResult {
    pub config: SimulationConfig,
    /// Proportion of replications where the minimal method picked the true
    /// model (`H0` iff `delta == 0`).
    pub accuracy_min: f64,
    pub accuracy_nm: f64,
    /// Proportion of replications where both methods agreed.
    pub consistency: f64,
    /// Pearson correlation of the two `p(H0|y)` series.
    pub posterior_correlation: Option<f64>,
    pub posterior_quantiles_min: FiveNumber,
    pub posterior_quantiles_nm: FiveNumber,
    /// Median over replications of `posterior_min - posterior_nm`.
    pub median_posterior_difference: f64,
    pub records: Vec<RepRecord>,
}

impl CellResult {
    pub fn true_model(&self) -> Choice {
        true_model(&self.config)
    }
}

fn true_model(config: &SimulationConfig) -> Choice {
    if config.delta == 0.0 {
        Choice::H0
    } else {
        Choice::H1
    }
}

/// Runs a single replication: generate, decompose, and score both methods.
pub fn run_rep(config: &SimulationConfig, rep: u32) -> Result<RepRecord, Error> {
    let profile = profile_for_rep(config, rep);
    let data = generate_dataset(config, &profile, rep)?;
    let table = rm_anova(&data)?;
    let minimal = bf01_minimal_rm(table.f_stat, config.design())?;
    let nm = delta_bic_nathoo(&SummaryStats::from_anova(&table)?)?;
    Ok(record(rep, table.f_stat, &minimal, &nm))
}

fn record(rep: u32, f_stat: f64, minimal: &EvidenceResult, nm: &EvidenceResult) -> RepRecord {
    RepRecord {
        rep,
        f_stat,
        log_bf01_min: minimal.log_bf01,
        log_bf01_nm: nm.log_bf01,
        posterior_min: minimal.posterior_h0,
        posterior_nm: nm.posterior_h0,
        choice_min: minimal.choice(),
        choice_nm: nm.choice(),
    }
}

/// Aggregates replication records (sorted by rep index) into a cell result.
pub fn summarize_cell(config: SimulationConfig, mut records: Vec<RepRecord>) -> Result<CellResult, Error> {
    if records.is_empty() {
        return Err(domain("a cell needs at least one replication", 0.0));
    }
    records.sort_by_key(|r| r.rep);
    let reps = records.len() as f64;
    let truth = true_model(&config);
    let count = |pred: &dyn Fn(&RepRecord) -> bool| records.iter().filter(|r| pred(r)).count() as f64;

    let accuracy_min = count(&|r| r.choice_min == truth) / reps;
    let accuracy_nm = count(&|r| r.choice_nm == truth) / reps;
    let consistency = count(&|r| r.choice_min == r.choice_nm) / reps;

    let post_min: Vec<f64> = records.iter().map(|r| r.posterior_min).collect();
    let post_nm: Vec<f64> = records.iter().map(|r| r.posterior_nm).collect();
    let diffs: Vec<f64> = records
        .iter()
        .map(|r| r.posterior_min - r.posterior_nm)
        .collect();
    let nan = || domain("non-finite posterior probability", f64::NAN);

    Ok(CellResult {
        config,
        accuracy_min,
        accuracy_nm,
        consistency,
        posterior_correlation: pearson(&post_min, &post_nm),
        posterior_quantiles_min: FiveNumber::from_sample(&post_min).ok_or_else(nan)?,
        posterior_quantiles_nm: FiveNumber::from_sample(&post_nm).ok_or_else(nan)?,
        median_posterior_difference: FiveNumber::from_sample(&diffs).ok_or_else(nan)?.median,
        records,
    })
}

fn cell_error(config: &SimulationConfig, e: Error) -> Error {
    Error::Cell {
        label: config.label(),
        source: Box::new(e),
    }
}

/// Runs every replication of `config` sequentially.
pub fn run_cell(config: &SimulationConfig) -> Result<CellResult, Error> {
    config.validate().map_err(|e| cell_error(config, e))?;
    let records = (0..config.reps)
        .map(|rep| run_rep(config, rep))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| cell_error(config, e))?;
    summarize_cell(*config, records).map_err(|e| cell_error(config, e))
}

/// Full factorial grid of cells.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridSpec {
    pub n_values: Vec<u32>,
    pub rho_values: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub k: u32,
    pub reps: u32,
    pub master_seed: u64,
    pub spacing: Spacing,
}

impl GridSpec {
    /// n in {20, 50, 80}, rho in {0.2, 0.8}, delta in {0, 0.2, 0.5}, k = 3,
    /// 1000 replications.
    pub fn standard(master_seed: u64) -> Self {
        Self {
            n_values: [20, 50, 80].into(),
            rho_values: [0.2, 0.8].into(),
            delta_values: [0.0, 0.2, 0.5].into(),
            k: 3,
            reps: 1000,
            master_seed,
            spacing: Spacing::default(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.n_values.is_empty() || self.rho_values.is_empty() || self.delta_values.is_empty() {
            return Err(domain("grid value lists must be non-empty", 0.0));
        }
        for c in self.cells() {
            c.validate().map_err(|e| cell_error(&c, e))?;
        }
        Ok(())
    }

    /// Cell configurations ordered by delta, then rho, then n.
    pub fn cells(&self) -> Vec<SimulationConfig> {
        let mut out = Vec::with_capacity(
            self.n_values.len() * self.rho_values.len() * self.delta_values.len(),
        );
        for &delta in &self.delta_values {
            for &rho in &self.rho_values {
                for &n in &self.n_values {
                    out.push(SimulationConfig {
                        n,
                        k: self.k,
                        rho,
                        delta,
                        reps: self.reps,
                        master_seed: self.master_seed,
                        grand_mean: 0.0,
                        spacing: self.spacing,
                    });
                }
            }
        }
        out
    }
}

/// Results for every cell of a grid, in [`GridSpec::cells`] order.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GridReport {
    pub spec: GridSpec,
    pub cells: Vec<CellResult>,
}

impl GridReport {
    pub fn cell(&self, n: u32, rho: f64, delta: f64) -> Option<&CellResult> {
        self.cells
            .iter()
            .find(|c| c.config.n == n && c.config.rho == rho && c.config.delta == delta)
    }
}

/// Runs every cell sequentially.
pub fn run_grid(spec: &GridSpec) -> Result<GridReport, Error> {
    spec.validate()?;
    let cells = spec
        .cells()
        .iter()
        .map(run_cell)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GridReport {
        spec: spec.clone(),
        cells,
    })
}
