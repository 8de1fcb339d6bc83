//! One-factor repeated-measures ANOVA.
//!
//! For `n` subjects measured under `k` conditions the total sum of squares
//! splits into treatment (SSA), subject (SSB) and residual (SSR) parts:
//!
//! ```text
//! SSA = n * sum_j (ybar_.j - ybar_..)^2
//! SSB = k * sum_i (ybar_i. - ybar_..)^2
//! SST = sum_ij (y_ij - ybar_..)^2
//! SSR = SST - SSA - SSB
//! F   = (SSA / SSR) * (n - 1)
//! ```

use alloc::vec::Vec;

use crate::error::{domain, Error};
use crate::special::f_sf;
use crate::sum::{sum, Compensated};

/// Number of subjects `n` and repeated conditions `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignSpec {
    pub n: u32,
    pub k: u32,
}

impl DesignSpec {
    pub fn new(n: u32, k: u32) -> Result<Self, Error> {
        if n < 2 || k < 2 {
            return Err(Error::Dimension {
                subjects: n as usize,
                conditions: k as usize,
            });
        }
        Ok(Self { n, k })
    }

    /// `nk`, the total number of observations.
    pub fn n_total(&self) -> u64 {
        u64::from(self.n) * u64::from(self.k)
    }

    /// `n(k - 1)`, the number of independent observations.
    pub fn n_independent(&self) -> u64 {
        u64::from(self.n) * u64::from(self.k - 1)
    }

    pub fn df_treatment(&self) -> u64 {
        u64::from(self.k - 1)
    }

    pub fn df_subjects(&self) -> u64 {
        u64::from(self.n - 1)
    }

    pub fn df_residual(&self) -> u64 {
        u64::from(self.n - 1) * u64::from(self.k - 1)
    }

    pub(crate) fn validate(&self) -> Result<(), Error> {
        Self::new(self.n, self.k).map(|_| ())
    }
}

/// Subjects-by-conditions matrix of measurements, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    subjects: usize,
    conditions: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(subjects: usize, conditions: usize, values: Vec<f64>) -> Result<Self, Error> {
        if subjects < 2 || conditions < 2 {
            return Err(Error::Dimension {
                subjects,
                conditions,
            });
        }
        let expected = subjects * conditions;
        if values.len() != expected {
            return Err(Error::Shape {
                expected,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / conditions,
                col: pos % conditions,
            });
        }
        Ok(Self {
            subjects,
            conditions,
            values,
        })
    }

    /// Builds a matrix from equally long rows, one per subject.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, Error> {
        let conditions = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * conditions);
        for row in rows {
            let row = row.as_ref();
            if row.len() != conditions {
                return Err(Error::Shape {
                    expected: conditions,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), conditions, values)
    }

    pub fn subjects(&self) -> usize {
        self.subjects
    }

    pub fn conditions(&self) -> usize {
        self.conditions
    }

    pub fn get(&self, subject: usize, condition: usize) -> f64 {
        self.values[subject * self.conditions + condition]
    }

    pub fn row(&self, subject: usize) -> &[f64] {
        let start = subject * self.conditions;
        &self.values[start..start + self.conditions]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.conditions)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn design(&self) -> DesignSpec {
        DesignSpec {
            n: self.subjects as u32,
            k: self.conditions as u32,
        }
    }

    /// Applies `f` to every cell.
    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Result<Self, Error> {
        Self::new(
            self.subjects,
            self.conditions,
            self.values.iter().map(|&v| f(v)).collect(),
        )
    }
}

/// Repeated-measures ANOVA summary.
///
/// `ss_residual` is the error left by the alternative model (SSE1) and
/// `ss_treatment + ss_residual` is the error left by the null (SSE0).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AnovaTable {
    pub design: DesignSpec,
    pub ss_treatment: f64,
    pub ss_subjects: f64,
    pub ss_residual: f64,
    pub ss_total: f64,
    pub df_treatment: u64,
    pub df_subjects: u64,
    pub df_residual: u64,
    pub ms_treatment: f64,
    pub ms_subjects: f64,
    pub ms_residual: f64,
    pub f_stat: f64,
    pub p_value: f64,
}

impl AnovaTable {
    /// Builds the table from sums of squares.
    ///
    /// A residual below `1e-13 * SST` counts as zero: with no treatment effect
    /// either, `F = 0` and `p = 1`; otherwise the data are degenerate.
    pub fn from_sums(
        design: DesignSpec,
        ss_treatment: f64,
        ss_subjects: f64,
        ss_residual: f64,
    ) -> Result<Self, Error> {
        design.validate()?;
        for (what, v) in [
            ("SSA must be finite and non-negative", ss_treatment),
            ("SSB must be finite and non-negative", ss_subjects),
            ("SSR must be finite and non-negative", ss_residual),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(domain(what, v));
            }
        }
        let ss_total = ss_treatment + ss_subjects + ss_residual;
        let df_treatment = design.df_treatment();
        let df_subjects = design.df_subjects();
        let df_residual = design.df_residual();

        let negligible = 1e-13 * ss_total;
        let (f_stat, p_value) = if ss_residual <= negligible {
            if ss_treatment <= negligible {
                (0.0, 1.0)
            } else {
                return Err(Error::DegenerateResidual);
            }
        } else {
            let f = ss_treatment / ss_residual * f64::from(design.n - 1);
            (f, f_sf(f, df_treatment as f64, df_residual as f64)?)
        };

        Ok(Self {
            design,
            ss_treatment,
            ss_subjects,
            ss_residual,
            ss_total,
            df_treatment,
            df_subjects,
            df_residual,
            ms_treatment: ss_treatment / df_treatment as f64,
            ms_subjects: ss_subjects / df_subjects as f64,
            ms_residual: ss_residual / df_residual as f64,
            f_stat,
            p_value,
        })
    }

    pub fn sse_alternative(&self) -> f64 {
        self.ss_residual
    }

    pub fn sse_null(&self) -> f64 {
        self.ss_treatment + self.ss_residual
    }
}

/// Runs the one-factor repeated-measures decomposition on `data`.
///
/// SSR is accumulated directly from the interaction residuals
/// `y_ij - ybar_i. - ybar_.j + ybar_..`, which equals `SST - SSA - SSB` but
/// does not cancel when subject variance dominates.
pub fn rm_anova(data: &DataMatrix) -> Result<AnovaTable, Error> {
    let n = data.subjects();
    let k = data.conditions();
    let design = data.design();
    design.validate()?;

    let grand = sum(data.as_slice().iter().copied()) / (n * k) as f64;
    let row_means: Vec<f64> = data
        .rows()
        .map(|r| sum(r.iter().copied()) / k as f64)
        .collect();
    let col_means: Vec<f64> = (0..k)
        .map(|j| sum((0..n).map(|i| data.get(i, j))) / n as f64)
        .collect();

    let ss_treatment = n as f64 * sum(col_means.iter().map(|m| (m - grand) * (m - grand)));
    let ss_subjects = k as f64 * sum(row_means.iter().map(|m| (m - grand) * (m - grand)));

    let mut residual = Compensated::default();
    for (row, &rm) in data.rows().zip(&row_means) {
        for (&y, &cm) in row.iter().zip(&col_means) {
            let e = y - rm - cm + grand;
            residual.add(e * e);
        }
    }

    AnovaTable::from_sums(design, ss_treatment, ss_subjects, residual.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Straight evaluation of the definitional double sums, with SSR taken
    /// by subtraction. Independent of the compensated path above.
    fn brute_force(rows: &[Vec<f64>]) -> (f64, f64, f64, f64) {
        let n = rows.len();
        let k = rows[0].len();
        let mut grand = 0.0;
        for r in rows {
            for &y in r {
                grand += y;
            }
        }
        grand /= (n * k) as f64;
        let mut ssa = 0.0;
        for j in 0..k {
            let mut m = 0.0;
            for r in rows {
                m += r[j];
            }
            m /= n as f64;
            ssa += (m - grand) * (m - grand);
        }
        ssa *= n as f64;
        let mut ssb = 0.0;
        for r in rows {
            let m = r.iter().sum::<f64>() / k as f64;
            ssb += (m - grand) * (m - grand);
        }
        ssb *= k as f64;
        let mut sst = 0.0;
        for r in rows {
            for &y in r {
                sst += (y - grand) * (y - grand);
            }
        }
        (ssa, ssb, sst - ssa - ssb, sst)
    }

    #[test]
    fn three_by_two_matches_hand_computation() {
        let rows = vec![vec![1.0, 2.0], vec![2.0, 4.0], vec![3.0, 3.0]];
        // Hand evaluation: grand mean 2.5, column means (2, 3), row means
        // (1.5, 3, 3).
        let (ssa, ssb, ssr, sst) = brute_force(&rows);
        assert_eq!((ssa, ssb, ssr, sst), (1.5, 3.0, 1.0, 5.5));

        let t = rm_anova(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
        assert!((t.ss_treatment - 1.5).abs() < 1e-10);
        assert!((t.ss_subjects - 3.0).abs() < 1e-10);
        assert!((t.ss_residual - 1.0).abs() < 1e-10);
        assert!((t.ss_total - 5.5).abs() < 1e-10);
        assert!((t.f_stat - 3.0).abs() < 1e-10);
        assert_eq!((t.df_treatment, t.df_subjects, t.df_residual), (1, 2, 2));
        // F(1, 2) tail from t_2: 1 - sqrt(3)/sqrt(5).
        assert!((t.p_value - (1.0 - libm::sqrt(3.0 / 5.0))).abs() < 1e-12);
    }

    #[test]
    fn constant_subject_rows_give_zero_f() {
        let rows = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let t = rm_anova(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
        assert_eq!(t.ss_treatment, 0.0);
        assert_eq!(t.f_stat, 0.0);
        assert_eq!(t.p_value, 1.0);

        let rows = vec![vec![5.0, 5.0, 5.0], vec![2.0, 2.0, 2.0], vec![7.0, 7.0, 7.0]];
        let t = rm_anova(&DataMatrix::from_rows(&rows).unwrap()).unwrap();
        assert_eq!(t.f_stat, 0.0);
    }

    #[test]
    fn additive_data_with_treatment_effect_is_degenerate() {
        let rows = vec![vec![0.0, 1.0], vec![3.0, 4.0], vec![-2.0, -1.0]];
        let err = rm_anova(&DataMatrix::from_rows(&rows).unwrap()).unwrap_err();
        assert_eq!(err, Error::DegenerateResidual);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            DataMatrix::from_rows(&[vec![1.0, 2.0]]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            DataMatrix::from_rows(&[vec![1.0], vec![2.0]]),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            DataMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0]]),
            Err(Error::Shape { .. })
        ));
        assert_eq!(
            DataMatrix::from_rows(&[vec![1.0, 2.0], vec![f64::NAN, 2.0]]),
            Err(Error::NonFinite { row: 1, col: 0 })
        );
        assert!(DesignSpec::new(1, 3).is_err());
        assert!(DesignSpec::new(3, 1).is_err());
    }

    #[test]
    fn design_counts() {
        let d = DesignSpec::new(23, 2).unwrap();
        assert_eq!(d.n_total(), 46);
        assert_eq!(d.n_independent(), 23);
        assert_eq!(d.df_treatment() + d.df_subjects() + d.df_residual(), d.n_total() - 1);
    }

    #[test]
    fn exhaustive_small_integer_matrices_match_brute_force() {
        // Every 2x2 matrix over {0,1,2} plus a sweep of larger shapes with
        // entries from a fixed small-integer pattern.
        let mut checked = 0;
        for code in 0..81u32 {
            let mut c = code;
            let mut cell = || {
                let v = f64::from(c % 3);
                c /= 3;
                v
            };
            let rows = vec![vec![cell(), cell()], vec![cell(), cell()]];
            compare(&rows);
            checked += 1;
        }
        for n in 2..=4usize {
            for k in 2..=4usize {
                for seed in 0..200u64 {
                    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (n * 31 + k) as u64;
                    let rows: Vec<Vec<f64>> = (0..n)
                        .map(|_| {
                            (0..k)
                                .map(|_| {
                                    s ^= s << 13;
                                    s ^= s >> 7;
                                    s ^= s << 17;
                                    (s % 7) as f64 - 3.0
                                })
                                .collect()
                        })
                        .collect();
                    compare(&rows);
                    checked += 1;
                }
            }
        }
        assert!(checked > 1800);
    }

    fn compare(rows: &[Vec<f64>]) {
        let (ssa, ssb, ssr, sst) = brute_force(rows);
        match rm_anova(&DataMatrix::from_rows(rows).unwrap()) {
            Ok(t) => {
                let tol = 1e-12 * (1.0 + sst);
                assert!((t.ss_treatment - ssa).abs() < tol, "{rows:?}");
                assert!((t.ss_subjects - ssb).abs() < tol, "{rows:?}");
                assert!((t.ss_residual - ssr).abs() < tol, "{rows:?}");
                assert!((t.ss_total - sst).abs() < tol, "{rows:?}");
                if ssr.abs() > tol {
                    let f = ssa / ssr * (rows.len() - 1) as f64;
                    assert!((t.f_stat - f).abs() < 1e-9 * (1.0 + f), "{rows:?}");
                }
            }
            Err(Error::DegenerateResidual) => {
                assert!(ssr.abs() < 1e-9 && ssa > 0.0, "{rows:?}");
            }
            Err(e) => panic!("{e:?}"),
        }
    }
}
