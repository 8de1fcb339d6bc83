//! BIC-approximated Bayes factors and posterior model probabilities.
//!
//! Every route computes `ln BF01 = ΔBIC10 / 2` first; the linear Bayes
//! factors are derived from it and saturate instead of overflowing.

use crate::anova::{AnovaTable, DesignSpec};
use crate::error::{domain, Error};

/// Which formula produced an [`EvidenceResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Method {
    /// Repeated-measures BF from `F`, `n` and `k` only.
    MinimalRm,
    /// Independent-groups BF from `F`, its dfs and the observation count.
    BetweenSubjects,
    /// Repeated-measures BF from SST, SSA and SSB with the effective-sample
    /// correction for correlated measurements.
    NathooMasson,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::MinimalRm => "minimal_rm",
            Method::BetweenSubjects => "between_subjects",
            Method::NathooMasson => "nathoo_masson",
        }
    }
}

/// Hypothesis selected by a Bayes factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Choice {
    H0,
    H1,
}

impl Choice {
    pub fn as_str(&self) -> &'static str {
        match self {
            Choice::H0 => "H0",
            Choice::H1 => "H1",
        }
    }
}

/// Bayes factors and posterior probabilities for one comparison of
/// `H0: all alpha_j = 0` against `H1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EvidenceResult {
    pub method: Method,
    /// Natural log of `bf01`; the authoritative value.
    pub log_bf01: f64,
    pub bf01: f64,
    pub bf10: f64,
    pub delta_bic10: f64,
    pub posterior_h0: f64,
    pub posterior_h1: f64,
    pub prior_h0: f64,
    /// Set when `bf01` or `bf10` was clamped to the finite positive range.
    pub saturated: bool,
}

impl EvidenceResult {
    /// Builds a result from `ln BF01` under prior `p(H0) = prior_h0`.
    pub fn from_log_bf01(method: Method, log_bf01: f64, prior_h0: f64) -> Result<Self, Error> {
        if !log_bf01.is_finite() {
            return Err(domain("log Bayes factor must be finite", log_bf01));
        }
        check_prior(prior_h0)?;
        let (bf01, clamp01) = saturating_exp(log_bf01);
        let (bf10, clamp10) = saturating_exp(-log_bf01);
        let (posterior_h0, posterior_h1) = posterior_from_log(log_bf01, prior_h0);
        Ok(Self {
            method,
            log_bf01,
            bf01,
            bf10,
            delta_bic10: 2.0 * log_bf01,
            posterior_h0,
            posterior_h1,
            prior_h0,
            saturated: clamp01 || clamp10,
        })
    }

    /// Same evidence re-expressed under a different prior.
    pub fn with_prior(self, prior_h0: f64) -> Result<Self, Error> {
        Self::from_log_bf01(self.method, self.log_bf01, prior_h0)
    }

    pub fn choice(&self) -> Choice {
        choose_model(self)
    }
}

fn check_prior(prior_h0: f64) -> Result<(), Error> {
    if prior_h0 > 0.0 && prior_h0 < 1.0 {
        Ok(())
    } else {
        Err(domain("prior p(H0) must lie strictly between 0 and 1", prior_h0))
    }
}

fn saturating_exp(x: f64) -> (f64, bool) {
    let v = libm::exp(x);
    if v.is_infinite() {
        (f64::MAX, true)
    } else if v == 0.0 {
        (f64::MIN_POSITIVE, true)
    } else {
        (v, false)
    }
}

/// Logistic transform of the posterior log-odds; both tails are computed
/// directly so neither probability suffers cancellation.
fn posterior_from_log(log_bf01: f64, prior_h0: f64) -> (f64, f64) {
    let log_odds = log_bf01 + libm::log(prior_h0) - libm::log1p(-prior_h0);
    let h0 = 1.0 / (1.0 + libm::exp(-log_odds));
    let h1 = 1.0 / (1.0 + libm::exp(log_odds));
    (h0, h1)
}

/// Posterior `(p(H0|y), p(H1|y))` from `BF01` and the prior `p(H0)`.
pub fn posterior_probs(bf01: f64, prior_h0: f64) -> Result<(f64, f64), Error> {
    if !(bf01 > 0.0) || !bf01.is_finite() {
        return Err(domain("BF01 must be positive and finite", bf01));
    }
    check_prior(prior_h0)?;
    Ok(posterior_from_log(libm::log(bf01), prior_h0))
}

fn check_f(f_stat: f64) -> Result<(), Error> {
    if f_stat >= 0.0 && f_stat.is_finite() {
        Ok(())
    } else {
        Err(domain("F must be finite and non-negative", f_stat))
    }
}

/// Repeated-measures Bayes factor from `F`, `n` and `k`:
///
/// `BF01 = sqrt((nk - n)^(k-1) * (1 + F/(n-1))^(n - nk))`.
///
/// Evaluated as `ln BF01 = ((k-1) ln(nk - n) + (n - nk) ln(1 + F/(n-1))) / 2`.
pub fn bf01_minimal_rm(f_stat: f64, design: DesignSpec) -> Result<EvidenceResult, Error> {
    check_f(f_stat)?;
    design.validate()?;
    let n = f64::from(design.n);
    let k = f64::from(design.k);
    let indep = n * (k - 1.0);
    let log_bf01 =
        0.5 * ((k - 1.0) * libm::log(indep) - indep * libm::log1p(f_stat / (n - 1.0)));
    EvidenceResult::from_log_bf01(Method::MinimalRm, log_bf01, 0.5)
}

/// Independent-groups Bayes factor under a unit-information prior:
///
/// `BF01 = sqrt(N^df1 * (1 + F df1/df2)^(-N))`.
pub fn bf01_between(f_stat: f64, df1: u64, df2: u64, n_obs: u64) -> Result<EvidenceResult, Error> {
    check_f(f_stat)?;
    if df1 < 1 {
        return Err(domain("numerator df must be at least 1", df1 as f64));
    }
    if df2 < 1 {
        return Err(domain("denominator df must be at least 1", df2 as f64));
    }
    if n_obs < 2 {
        return Err(domain("observation count N must be at least 2", n_obs as f64));
    }
    let (d1, d2, big_n) = (df1 as f64, df2 as f64, n_obs as f64);
    let log_bf01 = 0.5 * (d1 * libm::log(big_n) - big_n * libm::log1p(f_stat * d1 / d2));
    EvidenceResult::from_log_bf01(Method::BetweenSubjects, log_bf01, 0.5)
}

/// SST, SSA and SSB of a repeated-measures design, for when raw data are
/// unavailable.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SummaryStats {
    ss_total: f64,
    ss_treatment: f64,
    ss_subjects: f64,
    design: DesignSpec,
}

impl SummaryStats {
    /// Requires `SSA >= 0`, `SSB > 0` and `SST - SSA - SSB > 0`.
    pub fn new(
        ss_total: f64,
        ss_treatment: f64,
        ss_subjects: f64,
        design: DesignSpec,
    ) -> Result<Self, Error> {
        design.validate()?;
        for v in [ss_total, ss_treatment, ss_subjects] {
            if !v.is_finite() {
                return Err(domain("sums of squares must be finite", v));
            }
        }
        if ss_treatment < 0.0 {
            return Err(domain("SSA must be non-negative", ss_treatment));
        }
        if !(ss_subjects > 0.0) {
            return Err(domain("SSB must be positive", ss_subjects));
        }
        let residual = ss_total - ss_treatment - ss_subjects;
        if !(residual > 0.0) {
            return Err(domain("SST - SSA - SSB must be positive", residual));
        }
        Ok(Self {
            ss_total,
            ss_treatment,
            ss_subjects,
            design,
        })
    }

    pub fn from_anova(table: &AnovaTable) -> Result<Self, Error> {
        Self::new(
            table.ss_total,
            table.ss_treatment,
            table.ss_subjects,
            table.design,
        )
    }

    pub fn ss_total(&self) -> f64 {
        self.ss_total
    }

    pub fn ss_treatment(&self) -> f64 {
        self.ss_treatment
    }

    pub fn ss_subjects(&self) -> f64 {
        self.ss_subjects
    }

    pub fn design(&self) -> DesignSpec {
        self.design
    }

    /// `(SST - SSA - SSB) / (SST - SSB)`, i.e. `SSR / (SSA + SSR)`.
    pub fn unexplained_ratio(&self) -> f64 {
        (self.ss_total - self.ss_treatment - self.ss_subjects) / (self.ss_total - self.ss_subjects)
    }
}

/// Sums-of-squares Bayes factor accounting for correlated measurements:
///
/// ```text
/// ΔBIC10 = n(k-1) ln((SST-SSA-SSB)/(SST-SSB))
///        + (k+2) ln(n(SST-SSA)/SSB)
///        - 3 ln(n SST/SSB)
/// ```
pub fn delta_bic_nathoo(stats: &SummaryStats) -> Result<EvidenceResult, Error> {
    let n = f64::from(stats.design.n);
    let k = f64::from(stats.design.k);
    let sst = stats.ss_total;
    let ssa = stats.ss_treatment;
    let ssb = stats.ss_subjects;

    let explained = sst - ssb;
    let after_treatment = n * (sst - ssa) / ssb;
    let total = n * sst / ssb;
    if !(explained > 0.0) || !(after_treatment > 0.0) || !(total > 0.0) {
        return Err(domain(
            "degenerate sums of squares: log argument is not positive",
            explained.min(after_treatment).min(total),
        ));
    }
    // ln(1 - SSA/(SST-SSB)) keeps precision when SSA is small.
    let first = n * (k - 1.0) * libm::log1p(-ssa / explained);
    let delta = first + (k + 2.0) * libm::log(after_treatment) - 3.0 * libm::log(total);
    EvidenceResult::from_log_bf01(Method::NathooMasson, 0.5 * delta, 0.5)
}

/// `nk / (1 + rho (k - 1))`; informational only.
pub fn effective_sample_size(design: DesignSpec, rho: f64) -> Result<f64, Error> {
    design.validate()?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(domain("intraclass correlation must lie in [0, 1]", rho));
    }
    Ok(design.n_total() as f64 / (1.0 + rho * f64::from(design.k - 1)))
}

/// `H0` when `BF01 >= 1`, else `H1`. An exact tie goes to `H0`.
pub fn choose_model(result: &EvidenceResult) -> Choice {
    if result.log_bf01 >= 0.0 {
        Choice::H0
    } else {
        Choice::H1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(n: u32, k: u32) -> DesignSpec {
        DesignSpec::new(n, k).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn minimal_worked_example() {
        let r = bf01_minimal_rm(1.336, d(23, 2)).unwrap();
        assert!(close(r.bf01, 2.435, 0.001), "{}", r.bf01);
        assert!(close(r.posterior_h0, 0.709, 0.001), "{}", r.posterior_h0);
        assert_eq!(r.method, Method::MinimalRm);
        assert_eq!(r.choice(), Choice::H0);
    }

    #[test]
    fn minimal_at_zero_f_is_root_of_independent_count() {
        let r = bf01_minimal_rm(0.0, d(23, 2)).unwrap();
        assert!(close(r.bf01, libm::sqrt(23.0), 1e-12));
        assert!(close(r.bf01, 4.796, 0.0005));
        let r = bf01_minimal_rm(0.0, d(10, 4)).unwrap();
        assert!(close(r.log_bf01, 1.5 * libm::log(30.0), 1e-12));
    }

    #[test]
    fn minimal_equals_between_with_independent_count() {
        let a = bf01_minimal_rm(1.336, d(23, 2)).unwrap();
        let b = bf01_between(1.336, 1, 22, 23).unwrap();
        assert!(close(a.log_bf01, b.log_bf01, 1e-12 * a.log_bf01.abs()));
    }

    #[test]
    fn between_worked_example() {
        let r = bf01_between(2.76, 3, 96, 100).unwrap();
        assert!(close(r.bf01, 15.98, 0.02), "{}", r.bf01);
        assert!(close(r.posterior_h0, 15.98 / 16.98, 0.001));
        assert!(close(r.posterior_h0, 0.941, 0.0005));
    }

    #[test]
    fn between_at_zero_f() {
        let r = bf01_between(0.0, 3, 96, 100).unwrap();
        assert!(close(r.bf01, 1000.0, 1e-9));
    }

    #[test]
    fn between_domain_errors() {
        assert!(bf01_between(-1.0, 1, 1, 10).is_err());
        assert!(bf01_between(1.0, 0, 1, 10).is_err());
        assert!(bf01_between(1.0, 1, 0, 10).is_err());
        assert!(bf01_between(1.0, 1, 1, 1).is_err());
        assert!(bf01_between(f64::NAN, 1, 1, 10).is_err());
    }

    #[test]
    fn nathoo_worked_example() {
        let s = SummaryStats::new(116399.0, 739.0, 103984.0, d(23, 2)).unwrap();
        let r = delta_bic_nathoo(&s).unwrap();
        assert!(close(r.delta_bic10, 1.812, 0.002), "{}", r.delta_bic10);
        assert!(close(r.bf01, 2.474, 0.002), "{}", r.bf01);
        assert!(close(r.posterior_h0, 0.712, 0.001), "{}", r.posterior_h0);
        assert_eq!(r.method, Method::NathooMasson);
    }

    #[test]
    fn nathoo_without_treatment_effect() {
        let s = SummaryStats::new(500.0, 0.0, 300.0, d(12, 3)).unwrap();
        let r = delta_bic_nathoo(&s).unwrap();
        let expected = 2.0 * libm::log(12.0 * 500.0 / 300.0);
        assert!(close(r.delta_bic10, expected, 1e-12));
        assert!(r.bf01 > 1.0);
    }

    #[test]
    fn summary_stats_validation() {
        assert!(SummaryStats::new(100.0, 10.0, 0.0, d(5, 2)).is_err());
        assert!(SummaryStats::new(100.0, 50.0, 50.0, d(5, 2)).is_err());
        assert!(SummaryStats::new(100.0, -1.0, 50.0, d(5, 2)).is_err());
        assert!(SummaryStats::new(f64::NAN, 1.0, 50.0, d(5, 2)).is_err());
    }

    #[test]
    fn posterior_examples() {
        let (h0, h1) = posterior_probs(2.435, 0.5).unwrap();
        assert!(close(h0, 0.709, 0.001));
        assert!(close(h0 + h1, 1.0, 1e-12));
        let (h0, h1) = posterior_probs(1.0, 0.5).unwrap();
        assert!(close(h0, 0.5, 1e-15) && close(h1, 0.5, 1e-15));
        let (h0, _) = posterior_probs(2.435, 0.25).unwrap();
        let direct = 2.435 * 0.25 / (2.435 * 0.25 + 0.75);
        assert!(close(h0, direct, 1e-12));
        assert!(close(h0, 0.448, 0.0005));
        assert!(posterior_probs(0.0, 0.5).is_err());
        assert!(posterior_probs(1.0, 0.0).is_err());
        assert!(posterior_probs(1.0, 1.0).is_err());
    }

    #[test]
    fn effective_sample_size_bounds() {
        assert_eq!(effective_sample_size(d(20, 3), 0.0).unwrap(), 60.0);
        assert_eq!(effective_sample_size(d(20, 3), 1.0).unwrap(), 20.0);
        assert_eq!(effective_sample_size(d(20, 3), 0.5).unwrap(), 30.0);
        assert!(effective_sample_size(d(20, 3), 1.1).is_err());
        assert!(effective_sample_size(d(20, 3), -0.1).is_err());
    }

    #[test]
    fn choice_rule() {
        let r = |b: f64| EvidenceResult::from_log_bf01(Method::MinimalRm, libm::log(b), 0.5).unwrap();
        assert_eq!(choose_model(&r(2.435)), Choice::H0);
        assert_eq!(choose_model(&r(1.0)), Choice::H0);
        assert_eq!(choose_model(&r(0.2)), Choice::H1);
    }

    #[test]
    fn saturation_is_flagged() {
        let r = EvidenceResult::from_log_bf01(Method::MinimalRm, 800.0, 0.5).unwrap();
        assert!(r.saturated);
        assert_eq!(r.bf01, f64::MAX);
        assert!(r.bf10 > 0.0);
        let r = EvidenceResult::from_log_bf01(Method::MinimalRm, -800.0, 0.5).unwrap();
        assert!(r.saturated && r.bf01 > 0.0);
        assert_eq!(r.posterior_h1, 1.0);
    }

    #[test]
    fn no_overflow_for_large_designs() {
        let r = bf01_minimal_rm(1e4, d(1_000_000, 5)).unwrap();
        assert!(r.log_bf01.is_finite());
        assert!(r.saturated);
        assert!(!r.bf01.is_nan() && !r.bf10.is_nan());
        assert!(!r.posterior_h0.is_nan());
    }

    proptest! {
        #[test]
        fn reduction_identity(f in 0.0f64..1e4, n in 2u32..5000, k in 2u32..12) {
            let a = bf01_minimal_rm(f, d(n, k)).unwrap();
            let df1 = u64::from(k - 1);
            let b = bf01_between(f, df1, u64::from(n - 1) * df1, u64::from(n) * df1).unwrap();
            prop_assert!((a.log_bf01 - b.log_bf01).abs() <= 1e-12 * a.log_bf01.abs().max(1e-300));
        }

        #[test]
        fn monotone_decreasing_in_f(f in 0.0f64..1e3, df in 1e-6f64..10.0, n in 2u32..500, k in 2u32..8) {
            let lo = bf01_minimal_rm(f, d(n, k)).unwrap();
            let hi = bf01_minimal_rm(f + df, d(n, k)).unwrap();
            prop_assert!(hi.log_bf01 < lo.log_bf01);
        }

        #[test]
        fn reciprocity_and_sums(log_bf in -600.0f64..600.0, prior in 0.01f64..0.99) {
            let r = EvidenceResult::from_log_bf01(Method::NathooMasson, log_bf, prior).unwrap();
            prop_assert!((r.bf01 * r.bf10 - 1.0).abs() < 1e-12);
            prop_assert!((r.posterior_h0 + r.posterior_h1 - 1.0).abs() < 1e-12);
            prop_assert!((r.delta_bic10 - 2.0 * r.log_bf01).abs() == 0.0);
            prop_assert!((libm::exp(r.log_bf01) - r.bf01).abs() <= 1e-15 * r.bf01);
        }

        #[test]
        fn finite_over_wide_range(f in 0.0f64..1e4, n in 2u32..1_000_000, k in 2u32..10) {
            let r = bf01_minimal_rm(f, d(n, k)).unwrap();
            prop_assert!(r.log_bf01.is_finite());
            prop_assert!(r.bf01.is_finite() && r.bf01 > 0.0);
            prop_assert!(r.bf10.is_finite() && r.bf10 > 0.0);
        }
    }
}
