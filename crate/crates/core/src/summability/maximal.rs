use serde::{Deserialize, Serialize};

use super::MeanScan;
use crate::error::{Error, Result};
use crate::group::GroupStructure;
use crate::transform::{DiscreteFunction, Spectrum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MaximalFamily {
    Sigma,
    Riesz,
}

/// Normalization of `|mean_n f|` inside a maximal operator. Each printed
/// variant is kept separate; `divisor(n)` is what `|mean_n f|` is divided by.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MaximalWeight {
    /// `sup |mean_n f|`.
    None,
    /// `sup |mean_n f| / log(n+1)`.
    Log,
    /// `sup |mean_n f| / (n+1)^{1/p-2}`.
    Power { p: f64 },
    /// `sup log(n+1) |mean_n f| / (n+1)^{1/p-2}`.
    LogOverPower { p: f64 },
    /// `sup |mean_n f| / ((n+1)^{1/p-2} log^{2[1/2+p]}(n+1))`.
    PowerLogSquared { p: f64 },
    /// `sup log(n+1) |mean_n f| / ((n+1)^{1/p-2} log^{2[1/2+p]}(n+1))`.
    LogOverPowerLogSquared { p: f64 },
}

impl MaximalWeight {
    fn exponent(&self) -> Option<f64> {
        match *self {
            MaximalWeight::None | MaximalWeight::Log => None,
            MaximalWeight::Power { p }
            | MaximalWeight::LogOverPower { p }
            | MaximalWeight::PowerLogSquared { p }
            | MaximalWeight::LogOverPowerLogSquared { p } => Some(p),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.exponent() {
            Some(p) if !(p > 0.0 && p <= 0.5) => Err(Error::Parameter(format!(
                "maximal weight exponent p = {p} outside (0, 1/2]"
            ))),
            _ => Ok(()),
        }
    }

    pub fn divisor(&self, n: usize) -> f64 {
        let n1 = (n + 1) as f64;
        let power = |p: f64| n1.powf(1.0 / p - 2.0);
        // [1/2 + p] is 1 only at p = 1/2 on (0, 1/2].
        let log_sq = |p: f64| n1.ln().powi(2 * (0.5 + p).floor() as i32);
        match *self {
            MaximalWeight::None => 1.0,
            MaximalWeight::Log => n1.ln(),
            MaximalWeight::Power { p } => power(p),
            MaximalWeight::LogOverPower { p } => power(p) / n1.ln(),
            MaximalWeight::PowerLogSquared { p } => power(p) * log_sq(p),
            MaximalWeight::LogOverPowerLogSquared { p } => power(p) * log_sq(p) / n1.ln(),
        }
    }
}

/// Pointwise `sup_{1 <= n <= n_max} |mean_n f| / weight(n)`.
pub fn maximal_operator(
    gs: &GroupStructure,
    s: &Spectrum,
    family: MaximalFamily,
    weight: MaximalWeight,
    n_max: usize,
) -> Result<DiscreteFunction> {
    weight.validate()?;
    super::check_order(gs, n_max)?;
    let mut scan = MeanScan::new(gs, s)?;
    let mut best = vec![0.0f64; scan.cells()];
    let mut buf = Vec::new();
    for n in 1..=n_max {
        scan.advance();
        match family {
            MaximalFamily::Sigma => scan.fejer_into(&mut buf),
            MaximalFamily::Riesz => scan.riesz_into(&mut buf),
        }
        let w = weight.divisor(n);
        for (b, v) in best.iter_mut().zip(&buf) {
            *b = b.max(v.norm() / w);
        }
    }
    let cells: Vec<_> = best
        .into_iter()
        .map(|v| num_complex::Complex64::new(v, 0.0))
        .collect();
    Ok(scan.expand(gs, &cells))
}
