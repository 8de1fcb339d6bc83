//! Human-readable output. Numbers use three decimals, switching to
//! scientific notation outside `[1e-3, 1e6)`.

use std::fmt::Write;

use rmbayes_core::{AnovaTable, DesignSpec, EvidenceResult, GridReport};

use crate::report::ParsedReport;

pub fn fmt3(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-3..1e6).contains(&a) || !x.is_finite() {
        format!("{x:.3}")
    } else {
        format!("{x:.3e}")
    }
}

fn method_title(r: &EvidenceResult) -> &'static str {
    match r.method {
        rmbayes_core::Method::MinimalRm => "minimal BIC (repeated measures, from F)",
        rmbayes_core::Method::BetweenSubjects => "BIC (between subjects, from F)",
        rmbayes_core::Method::NathooMasson => "Nathoo-Masson (repeated measures, from SS)",
    }
}

pub fn evidence(design: &DesignSpec, r: &EvidenceResult, notes: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "method        {}", method_title(r));
    let _ = writeln!(s, "design        n = {}, k = {}", design.n, design.k);
    evidence_lines(&mut s, r);
    for note in notes {
        let _ = writeln!(s, "note: {note}");
    }
    s
}

fn evidence_lines(s: &mut String, r: &EvidenceResult) {
    let _ = writeln!(s, "dBIC10        = {}", fmt3(r.delta_bic10));
    let _ = writeln!(s, "BF01          = {}", fmt3(r.bf01));
    let _ = writeln!(s, "BF10          = {}", fmt3(r.bf10));
    let _ = writeln!(s, "p(H0)         = {}", fmt3(r.prior_h0));
    let _ = writeln!(s, "p(H0|y)       = {}", fmt3(r.posterior_h0));
    let _ = writeln!(s, "p(H1|y)       = {}", fmt3(r.posterior_h1));
    let _ = writeln!(s, "choice        {}", r.choice().as_str());
    if r.saturated {
        let _ = writeln!(s, "note: a Bayes factor exceeded the floating-point range and was clamped; use dBIC10");
    }
}

pub fn anova(t: &AnovaTable) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>14} {:>6} {:>12} {:>8} {:>7}",
        "Source", "SS", "df", "MS", "F", "p"
    );
    let _ = writeln!(
        s,
        "{:<10} {:>14} {:>6} {:>12}",
        "Subjects",
        fmt3(t.ss_subjects),
        t.df_subjects,
        fmt3(t.ms_subjects)
    );
    let _ = writeln!(
        s,
        "{:<10} {:>14} {:>6} {:>12} {:>8} {:>7}",
        "Treatment",
        fmt3(t.ss_treatment),
        t.df_treatment,
        fmt3(t.ms_treatment),
        fmt3(t.f_stat),
        fmt3(t.p_value)
    );
    let _ = writeln!(
        s,
        "{:<10} {:>14} {:>6} {:>12}",
        "Residual",
        fmt3(t.ss_residual),
        t.df_residual,
        fmt3(t.ms_residual)
    );
    let _ = writeln!(
        s,
        "{:<10} {:>14} {:>6}",
        "Total",
        fmt3(t.ss_total),
        t.design.n_total() - 1
    );
    s
}

pub fn anova_evidence(label: &str, r: &EvidenceResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "[{label}] {}", method_title(r));
    evidence_lines(&mut s, r);
    s
}

pub fn parsed(reports: &[ParsedReport], caveat: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<28} {:>8} {:>8} {:>6} {:>4} {:>10} {:>8}",
        "report", "df1", "df2", "n", "k", "BF01", "p(H0|y)"
    );
    for r in reports {
        let stat = format!(
            "F({}, {}) {} {}",
            r.df1,
            r.df2,
            if r.f_upper_bound { "<" } else { "=" },
            r.f_value
        );
        match (&r.design, &r.evidence) {
            (Some(d), Some(e)) => {
                let bf = if r.bf01_is_lower_bound {
                    format!(">={}", fmt3(e.result.bf01))
                } else {
                    fmt3(e.result.bf01)
                };
                let _ = writeln!(
                    s,
                    "{:<28} {:>8} {:>8} {:>6} {:>4} {:>10} {:>8}",
                    stat,
                    r.df1,
                    r.df2,
                    d.n,
                    d.k,
                    bf,
                    fmt3(e.result.posterior_h0)
                );
            }
            _ => {
                let _ = writeln!(
                    s,
                    "{:<28} {:>8} {:>8}  uninferable: {}",
                    stat,
                    r.df1,
                    r.df2,
                    r.reason.as_deref().unwrap_or("unknown")
                );
            }
        }
    }
    if caveat && !reports.is_empty() {
        let _ = writeln!(
            s,
            "note: n and k were inferred assuming each F comes from a one-factor repeated-measures ANOVA; check the source design (--assume-rm hides this note)"
        );
    }
    s
}

pub fn grid_summary(report: &GridReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<20} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "cell", "acc_min", "acc_nm", "consist", "corr", "med_diff"
    );
    for c in &report.cells {
        let _ = writeln!(
            s,
            "{:<20} {:>9} {:>9} {:>9} {:>9} {:>9}",
            c.config.label(),
            fmt3(c.accuracy_min),
            fmt3(c.accuracy_nm),
            fmt3(c.consistency),
            c.posterior_correlation.map_or_else(|| "-".into(), fmt3),
            fmt3(c.median_posterior_difference)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_decimals() {
        assert_eq!(fmt3(2.43512), "2.435");
        assert_eq!(fmt3(0.0), "0.000");
        assert_eq!(fmt3(1.5e9), "1.500e9");
        assert_eq!(fmt3(2.0e-7), "2.000e-7");
    }
}
