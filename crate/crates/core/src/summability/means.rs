use num_complex::Complex64;

use super::{check_order, multiplier, HarmonicWeights, KernelFunction, MeanFamily};
use crate::error::{Error, Result};
use crate::group::GroupStructure;
use crate::transform::{inverse_transform, DiscreteFunction, Spectrum};

/// The `n`-th mean of the series with coefficients `s`, by spectral
/// multiplication and one inverse transform.
pub fn mean(gs: &GroupStructure, s: &Spectrum, family: MeanFamily, n: usize) -> Result<DiscreteFunction> {
    check_order(gs, n)?;
    if s.depth != gs.depth() {
        return Err(Error::Resolution("spectrum depth mismatch".into()));
    }
    let harmonic = HarmonicWeights::up_to(n);
    let coeffs = s
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            if k < n {
                c * multiplier(family, n, k, &harmonic)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    inverse_transform(gs, &Spectrum { depth: gs.depth(), coeffs })
}

/// `S_n f = Σ_{k<n} f^(k) ψ_k`.
pub fn partial_sum(gs: &GroupStructure, s: &Spectrum, n: usize) -> Result<DiscreteFunction> {
    mean(gs, s, MeanFamily::Partial, n)
}

/// `σ_n f = (1/n) Σ_{k<n} S_k f`.
pub fn fejer_mean(gs: &GroupStructure, s: &Spectrum, n: usize) -> Result<DiscreteFunction> {
    mean(gs, s, MeanFamily::Fejer, n)
}

/// `R_n f = (1/l_n) Σ_{k=1}^n S_k f / k`.
pub fn riesz_mean(gs: &GroupStructure, s: &Spectrum, n: usize) -> Result<DiscreteFunction> {
    mean(gs, s, MeanFamily::Riesz, n)
}

/// `(f * K)(x) = ∫ f(t) K(x - t) dμ(t)` with group subtraction, by direct
/// `O(M²)` summation.
pub fn convolve(gs: &GroupStructure, f: &DiscreteFunction, kernel: &KernelFunction) -> Result<DiscreteFunction> {
    if f.depth != gs.depth() || kernel.samples.depth != gs.depth() {
        return Err(Error::Resolution("convolution depth mismatch".into()));
    }
    let size = gs.size();
    let k = &kernel.samples.values;
    let values = (0..size)
        .map(|x| {
            let acc: Complex64 = (0..size).map(|t| f.values[t] * k[gs.sub_index(x, t)]).sum();
            acc / size as f64
        })
        .collect();
    Ok(DiscreteFunction {
        depth: gs.depth(),
        values,
    })
}
