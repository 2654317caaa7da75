use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "polymoments",
    version,
    about = "Distance statistics of regular polygons"
)]
pub struct Cli {
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments E[Δ^m] of the distance between two uniform points.
    Moments(MomentsArgs),
    /// One moment (or the variance) across a range of polygons, plus the disc.
    Table(TableArgs),
    /// Sampled chord length distribution or distance density.
    Curve(CurveArgs),
    /// Run the cross-checking suite; exits with 1 if any check fails.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// Orders, e.g. `2`, `-1..10` or `1,2,4`; `var` for the variance.
    #[arg(long, allow_hyphen_values = true)]
    pub m: OrderSpec,
    /// Add quadrature and Monte Carlo columns.
    #[arg(long)]
    pub verify: bool,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Side counts, e.g. `3..30`.
    #[arg(long)]
    pub n: IntRange,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, allow_hyphen_values = true, default_value = "1")]
    pub m: OrderSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CurveKind {
    Cdf,
    Pdf,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[arg(value_enum)]
    pub kind: CurveKind,
    #[arg(long)]
    pub n: u32,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Add the disc of the same circumradius as a reference column.
    #[arg(long)]
    pub circle: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value = "3..12")]
    pub n: IntRange,
    #[arg(long, allow_hyphen_values = true, default_value = "-1..4")]
    pub m: IntRange,
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    #[arg(long, default_value_t = 10_000)]
    pub grid_points: usize,
    /// Wall-clock budget in seconds; exceeding it fails the run.
    #[arg(long)]
    pub budget: Option<f64>,
    #[command(flatten)]
    pub mc: McArgs,
}

#[derive(Debug, Args)]
pub struct McArgs {
    /// Monte Carlo sample count; accepts `1e6`.
    #[arg(long, value_parser = parse_count)]
    pub mc_samples: Option<u64>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 2f64.powi(63) => Ok(v as u64),
        _ => Err(format!("`{s}` is not a nonnegative integer count")),
    }
}

/// An inclusive integer range written `a..b`, or a single integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntRange(pub RangeInclusive<i64>);

impl IntRange {
    pub fn values<T: TryFrom<i64>>(&self) -> Result<Vec<T>, String> {
        self.0
            .clone()
            .map(|v| T::try_from(v).map_err(|_| format!("{v} is out of range")))
            .collect()
    }
}

impl FromStr for IntRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| format!("`{t}` is not an integer"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let v = parse(s)?;
                (v, v)
            }
        };
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        Ok(IntRange(lo..=hi))
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.0.start(), self.0.end())
    }
}

/// Moment orders: a range, a comma list, or `var`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrderSpec {
    Orders(Vec<i32>),
    Variance,
}

impl FromStr for OrderSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("var") {
            return Ok(OrderSpec::Variance);
        }
        let mut orders = Vec::new();
        for part in s.split(',') {
            orders.extend(part.parse::<IntRange>()?.values::<i32>()?);
        }
        Ok(OrderSpec::Orders(orders))
    }
}

impl fmt::Display for OrderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderSpec::Variance => f.write_str("var"),
            OrderSpec::Orders(v) => {
                let parts: Vec<String> = v.iter().map(i32::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}
