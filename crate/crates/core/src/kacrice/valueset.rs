//! Finite unions of intervals of ℝ, written `lo:hi,lo:hi` with `inf`/`-inf`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ValueSet {
    intervals: Vec<(f64, f64)>,
}

impl ValueSet {
    pub fn real() -> Self {
        ValueSet { intervals: vec![(f64::NEG_INFINITY, f64::INFINITY)] }
    }

    pub fn empty() -> Self {
        ValueSet { intervals: vec![] }
    }

    /// [u0, ∞)
    pub fn at_least(u0: f64) -> Self {
        Self::new(vec![(u0, f64::INFINITY)]).expect("valid interval")
    }

    /// Sorted, merged union. Endpoints are immaterial (the law of the value is continuous).
    pub fn new(mut v: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, b) in &v {
            if a.is_nan() || b.is_nan() || a > b {
                return Err(Error::InvalidRequest(format!("bad interval {a}:{b}")));
            }
        }
        v.retain(|&(a, b)| b > a);
        v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (a, b) in v {
            match out.last_mut() {
                Some(last) if a <= last.1 => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        Ok(ValueSet { intervals: out })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_real(&self) -> bool {
        self.intervals.len() == 1
            && self.intervals[0].0 == f64::NEG_INFINITY
            && self.intervals[0].1 == f64::INFINITY
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|&(a, b)| x > a && x <= b)
    }
}

fn fmt_end(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

fn parse_end(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" | "+inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| Error::InvalidRequest(format!("cannot parse interval end '{t}'"))),
    }
}

impl fmt::Display for ValueSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.intervals.iter().map(|&(a, b)| format!("{}:{}", fmt_end(a), fmt_end(b))).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ValueSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "empty" {
            return Ok(Self::empty());
        }
        if s == "R" || s == "real" {
            return Ok(Self::real());
        }
        let mut v = Vec::new();
        for part in s.split(',') {
            let (a, b) = part
                .split_once(':')
                .ok_or_else(|| Error::InvalidRequest(format!("interval '{part}' is not lo:hi")))?;
            v.push((parse_end(a)?, parse_end(b)?));
        }
        Self::new(v)
    }
}

impl TryFrom<String> for ValueSet {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ValueSet> for String {
    fn from(v: ValueSet) -> String {
        v.to_string()
    }
}
