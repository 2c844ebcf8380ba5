//! Argument value types: sweep grids, order ranges and λ modes.

use std::ops::RangeInclusive;
use std::str::FromStr;

/// `start:stop:count` grid, spaced linearly or logarithmically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(format!("expected start:stop:count, got `{s}`"));
        };
        let num = |v: &str| {
            v.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("invalid grid bound `{v}`"))
        };
        let count = count
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| format!("invalid grid count `{count}`"))?;
        Ok(Grid {
            start: num(start)?,
            stop: num(stop)?,
            count,
        })
    }
}

impl Grid {
    pub fn values(&self, log: bool) -> Result<Vec<f64>, String> {
        if log && !(self.start > 0.0 && self.stop > 0.0) {
            return Err("log grids need positive bounds".into());
        }
        if self.count == 1 {
            return Ok(vec![self.start]);
        }
        let last = (self.count - 1) as f64;
        Ok((0..self.count)
            .map(|i| {
                let t = i as f64 / last;
                if log {
                    (self.start.ln() + t * (self.stop.ln() - self.start.ln())).exp()
                } else {
                    self.start + t * (self.stop - self.start)
                }
            })
            .collect())
    }
}

/// Inclusive order range `a..b`, or a single order.
#[derive(Debug, Clone, PartialEq)]
pub struct Orders(pub RangeInclusive<usize>);

impl FromStr for Orders {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| format!("invalid order `{v}`"))
        };
        let range = match s.split_once("..") {
            Some((a, b)) => num(a)?..=num(b.trim_start_matches('='))?,
            None => {
                let n = num(s)?;
                n..=n
            }
        };
        if range.is_empty() {
            return Err(format!("empty order range `{s}`"));
        }
        Ok(Orders(range))
    }
}

/// How the interpolation parameter is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMode {
    AutoPms,
    /// Fixed `λ`; a trailing `i` marks it imaginary. Stored as `s = λ²`.
    Fixed(f64),
    Scan,
}

impl FromStr for LambdaMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "auto-pms" => Ok(LambdaMode::AutoPms),
            "scan" => Ok(LambdaMode::Scan),
            other => {
                let value = other.strip_prefix("fixed:").ok_or_else(|| {
                    format!("expected auto-pms, fixed:<lambda> or scan, got `{other}`")
                })?;
                let (digits, imaginary) = match value.strip_suffix('i') {
                    Some(d) => (d, true),
                    None => (value, false),
                };
                let l: f64 = digits
                    .parse()
                    .ok()
                    .filter(|x: &f64| x.is_finite())
                    .ok_or_else(|| format!("invalid lambda `{value}`"))?;
                Ok(LambdaMode::Fixed(if imaginary { -l * l } else { l * l }))
            }
        }
    }
}
