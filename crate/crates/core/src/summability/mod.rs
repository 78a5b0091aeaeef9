//! Dirichlet, Fejér and Riesz logarithmic kernels and means.
//!
//! With `S_0 f = 0` and `D_0 = 0`, every mean is a spectral multiplier:
//!
//! | mean        | multiplier at frequency `k`        |
//! |-------------|------------------------------------|
//! | `S_n f`     | `[k < n]`                          |
//! | `σ_n f`     | `(n - 1 - k) / n` for `k < n`      |
//! | `R_n f`     | `(l_n - l_k) / l_n` for `k < n`    |
//!
//! where `l_n` is the `n`-th harmonic number. The kernels are the synthesis
//! of the same multipliers.

mod kernels;
mod maximal;
mod means;
mod scan;

pub use kernels::{
    dirichlet_kernel, dirichlet_kernel_closed_form, fejer_kernel, riesz_kernel,
    riesz_kernel_abel, KernelCache, KernelSweep,
};
pub use maximal::{maximal_operator, MaximalFamily, MaximalWeight};
pub use means::{convolve, fejer_mean, mean, partial_sum, riesz_mean};
pub use scan::MeanScan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::GroupStructure;
use crate::transform::DiscreteFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Dirichlet,
    Fejer,
    Riesz,
}

/// Which summation method a mean uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeanFamily {
    Partial,
    Fejer,
    Riesz,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelFunction {
    pub kind: KernelKind,
    pub n: usize,
    pub samples: DiscreteFunction,
}

/// Harmonic numbers `l_0 = 0, l_n = Σ_{k=1}^n 1/k`, accumulated left to
/// right so every caller sees bit-identical values.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicWeights {
    l: Vec<f64>,
}

impl HarmonicWeights {
    pub fn up_to(n: usize) -> Self {
        let mut l = Vec::with_capacity(n + 1);
        l.push(0.0);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += 1.0 / k as f64;
            l.push(acc);
        }
        Self { l }
    }

    /// `l_n`.
    pub fn get(&self, n: usize) -> f64 {
        self.l[n]
    }

    pub fn max_index(&self) -> usize {
        self.l.len() - 1
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.l
    }
}

/// Multiplier of frequency `k` in the `n`-th mean of `family`.
pub fn multiplier(family: MeanFamily, n: usize, k: usize, harmonic: &HarmonicWeights) -> f64 {
    if k >= n {
        return 0.0;
    }
    match family {
        MeanFamily::Partial => 1.0,
        MeanFamily::Fejer => (n - 1 - k) as f64 / n as f64,
        MeanFamily::Riesz => (harmonic.get(n) - harmonic.get(k)) / harmonic.get(n),
    }
}

pub(crate) fn check_order(gs: &GroupStructure, n: usize) -> Result<()> {
    if n == 0 || n > gs.size() {
        return Err(Error::Resolution(format!(
            "mean order {n} outside 1..={}",
            gs.size()
        )));
    }
    Ok(())
}
