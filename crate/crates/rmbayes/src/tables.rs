//! CSV tables derived from a [`GridReport`]: accuracy, consistency and
//! correlation tables, boxplot quantiles and posterior scatter pairs.
//!
//! Floats are written with Rust's shortest round-trip formatting.

use std::io::Write;

use rmbayes_core::{CellResult, GridReport};

pub const TABLE2: &str = "table2.csv";
pub const TABLE3: &str = "table3.csv";
pub const TABLE4: &str = "table4.csv";
pub const BOXPLOT: &str = "boxplot_data.csv";
pub const SCATTER: &str = "scatter_data.csv";
pub const PER_REP: &str = "per_rep.csv";

fn effect_name(delta: f64) -> String {
    if delta == 0.0 {
        "null".into()
    } else if delta == 0.2 {
        "small".into()
    } else if delta == 0.5 {
        "medium".into()
    } else {
        format!("delta={delta}")
    }
}

fn cell_prefix(c: &CellResult) -> [String; 5] {
    [
        c.config.label(),
        effect_name(c.config.delta),
        c.config.delta.to_string(),
        c.config.rho.to_string(),
        c.config.n.to_string(),
    ]
}

const PREFIX: [&str; 5] = ["cell_id", "effect", "delta", "rho", "n"];

fn writer<W: Write>(out: W, extra: &[&str]) -> csv::Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<&str> = PREFIX.iter().chain(extra).copied().collect();
    w.write_record(&header)?;
    Ok(w)
}

/// Model-choice accuracy per cell.
pub fn write_accuracy<W: Write>(report: &GridReport, out: W) -> csv::Result<()> {
    let mut w = writer(out, &["accuracy_min", "accuracy_nm"])?;
    for c in &report.cells {
        let mut row = cell_prefix(c).to_vec();
        row.push(c.accuracy_min.to_string());
        row.push(c.accuracy_nm.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Proportion of replications where both methods chose the same model.
pub fn write_consistency<W: Write>(report: &GridReport, out: W) -> csv::Result<()> {
    let mut w = writer(out, &["consistency"])?;
    for c in &report.cells {
        let mut row = cell_prefix(c).to_vec();
        row.push(c.consistency.to_string());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Posterior correlation per cell; empty when undefined.
pub fn write_correlation<W: Write>(report: &GridReport, out: W) -> csv::Result<()> {
    let mut w = writer(out, &["correlation"])?;
    for c in &report.cells {
        let mut row = cell_prefix(c).to_vec();
        row.push(c.posterior_correlation.map_or_else(String::new, |r| r.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Five-number summaries of p(H0|y) for each method.
pub fn write_boxplot<W: Write>(report: &GridReport, out: W) -> csv::Result<()> {
    let mut w = writer(
        out,
        &["method", "min", "lower_hinge", "median", "upper_hinge", "max"],
    )?;
    for c in &report.cells {
        for (method, q) in [
            ("minimal_rm", c.posterior_quantiles_min),
            ("nathoo_masson", c.posterior_quantiles_nm),
        ] {
            let mut row = cell_prefix(c).to_vec();
            row.push(method.into());
            for v in [q.min, q.lower_hinge, q.median, q.upper_hinge, q.max] {
                row.push(v.to_string());
            }
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Paired p(H0|y) values for every replication.
pub fn write_scatter<W: Write>(report: &GridReport, out: W) -> csv::Result<()> {
    let mut w = writer(out, &["rep", "post_min", "post_nm"])?;
    for c in &report.cells {
        let prefix = cell_prefix(c);
        for r in &c.records {
            let mut row = prefix.to_vec();
            row.push(r.rep.to_string());
            row.push(r.posterior_min.to_string());
            row.push(r.posterior_nm.to_string());
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Full per-replication detail.
pub fn write_per_rep<W: Write>(report: &GridReport, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "cell_id",
        "rep",
        "F",
        "bf01_min",
        "bf01_nm",
        "post_min",
        "post_nm",
        "choice_min",
        "choice_nm",
    ])?;
    for c in &report.cells {
        let id = c.config.label();
        for r in &c.records {
            w.write_record([
                id.clone(),
                r.rep.to_string(),
                r.f_stat.to_string(),
                r.bf01_min().to_string(),
                r.bf01_nm().to_string(),
                r.posterior_min.to_string(),
                r.posterior_nm.to_string(),
                r.choice_min.as_str().to_owned(),
                r.choice_nm.as_str().to_owned(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rmbayes_core::{run_grid, GridSpec};

    #[test]
    fn tables_have_one_row_per_cell() {
        let spec = GridSpec {
            reps: 3,
            ..GridSpec::standard(1)
        };
        let report = run_grid(&spec).unwrap();
        let mut buf = Vec::new();
        write_accuracy(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 19);
        assert!(text.starts_with("cell_id,effect,delta,rho,n,accuracy_min,accuracy_nm\n"));
        assert!(text.contains("d0.5_r0.8_n80_k3,medium,0.5,0.8,80,"));

        let mut buf = Vec::new();
        write_scatter(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 18 * 3);

        let mut buf = Vec::new();
        write_boxplot(&report, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 1 + 36);
    }

    #[test]
    fn shortest_float_repr_round_trips() {
        let x = 0.1 + 0.2;
        assert_eq!(x.to_string().parse::<f64>().unwrap(), x);
    }
}
