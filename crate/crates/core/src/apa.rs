//! Scanner for APA-style F reports such as `F(1, 22) = 1.336, p = .26`.
//!
//! Grammar (whitespace optional between tokens, `F`/`p` case-insensitive):
//!
//! ```text
//! report := F "(" num "," num ")" rel num [ "," p rel num ]
//! rel    := "=" | "<"
//! num    := digits ["." digits] | "." digits
//! ```

use alloc::vec::Vec;
use core::ops::Range;

use crate::anova::DesignSpec;
use crate::error::InferenceError;

/// Relation between a reported statistic and the printed number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Relation {
    Equal,
    /// The printed number is an upper bound (`F < 1`, `p < .001`).
    LessThan,
}

/// One `F(df1, df2) = x` report found in text.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReportedStat {
    pub f_value: f64,
    /// `LessThan` means `f_value` is only an upper bound on F, so a BF01
    /// computed from it is a lower bound.
    pub f_relation: Relation,
    pub df1: f64,
    pub df2: f64,
    pub p_reported: Option<f64>,
    pub p_relation: Option<Relation>,
    /// Byte offsets of the match in the scanned text.
    pub span: Range<usize>,
}

impl ReportedStat {
    pub fn is_upper_bound(&self) -> bool {
        self.f_relation == Relation::LessThan
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|b| b.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, want: u8) -> Option<()> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Some(())
        } else {
            None
        }
    }

    fn eat_ci(&mut self, want: u8) -> Option<()> {
        if self.peek().map(|b| b.to_ascii_lowercase()) == Some(want) {
            self.pos += 1;
            Some(())
        } else {
            None
        }
    }

    fn relation(&mut self) -> Option<Relation> {
        match self.peek()? {
            b'=' => {
                self.pos += 1;
                Some(Relation::Equal)
            }
            b'<' => {
                self.pos += 1;
                Some(Relation::LessThan)
            }
            _ => None,
        }
    }

    fn number(&mut self) -> Option<f64> {
        let start = self.pos;
        let mut int_digits = 0;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
            int_digits += 1;
        }
        let mut frac_digits = 0;
        if self.peek() == Some(b'.') {
            let dot = self.pos;
            self.pos += 1;
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
                frac_digits += 1;
            }
            if frac_digits == 0 {
                // A sentence-ending period, not part of the number.
                self.pos = dot;
            }
        }
        if int_digits == 0 && frac_digits == 0 {
            self.pos = start;
            return None;
        }
        self.text[start..self.pos].parse().ok()
    }
}

fn match_at(text: &str, start: usize) -> Option<ReportedStat> {
    let mut c = Cursor {
        bytes: text.as_bytes(),
        text,
        pos: start,
    };
    c.eat_ci(b'f')?;
    c.skip_ws();
    c.eat(b'(')?;
    c.skip_ws();
    let df1 = c.number()?;
    c.skip_ws();
    c.eat(b',')?;
    c.skip_ws();
    let df2 = c.number()?;
    c.skip_ws();
    c.eat(b')')?;
    c.skip_ws();
    let f_relation = c.relation()?;
    c.skip_ws();
    let f_value = c.number()?;
    let mut end = c.pos;

    let mut p_reported = None;
    let mut p_relation = None;
    let p_clause = (|| {
        c.skip_ws();
        c.eat(b',')?;
        c.skip_ws();
        c.eat_ci(b'p')?;
        c.skip_ws();
        let rel = c.relation()?;
        c.skip_ws();
        let p = c.number()?;
        Some((rel, p))
    })();
    if let Some((rel, p)) = p_clause {
        p_reported = Some(p);
        p_relation = Some(rel);
        end = c.pos;
    }

    Some(ReportedStat {
        f_value,
        f_relation,
        df1,
        df2,
        p_reported,
        p_relation,
        span: start..end,
    })
}

/// Returns every non-overlapping F report in `text`, in order of appearance.
///
/// Never fails; text without reports yields an empty list.
pub fn parse_reports(text: &str) -> Vec<ReportedStat> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if matches!(bytes[i], b'F' | b'f') {
            if let Some(stat) = match_at(text, i) {
                i = stat.span.end;
                out.push(stat);
                continue;
            }
        }
        i += 1;
    }
    out
}

/// Recovers `(n, k)` from `df1 = k - 1` and `df2 = (n - 1)(k - 1)`.
pub fn infer_rm_design(stat: &ReportedStat) -> Result<DesignSpec, InferenceError> {
    let (df1, df2) = (stat.df1, stat.df2);
    if !(df1 >= 1.0) || !(df2 >= 1.0) {
        return Err(InferenceError::NonPositiveDf { df1, df2 });
    }
    if libm::trunc(df1) != df1 || libm::trunc(df2) != df2 || df1 > u32::MAX as f64 || df2 > u64::MAX as f64 {
        return Err(InferenceError::NonIntegerDf { df1, df2 });
    }
    let (d1, d2) = (df1 as u64, df2 as u64);
    if d2 % d1 != 0 {
        return Err(InferenceError::NotDivisible { df1: d1, df2: d2 });
    }
    let n = d2 / d1 + 1;
    let k = d1 + 1;
    match (u32::try_from(n), u32::try_from(k)) {
        (Ok(n), Ok(k)) => Ok(DesignSpec { n, k }),
        _ => Err(InferenceError::NonIntegerDf { df1, df2 }),
    }
}
