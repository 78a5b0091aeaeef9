use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::GroupStructure;
use crate::transform::{character_samples, DiscreteFunction, Spectrum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Walks `n = 1, 2, ...` keeping `S_n f`, `σ_n f` and `R_n f` up to date.
///
/// Every mean of `f` lies in the span of the characters below `M_d`, where
/// `d` is the spectrum's effective depth, so the scan stores one value per
/// depth-`d` coset. Each step costs `O(M_d)`; integrals over the scan cells
/// are exact integrals over the group.
#[derive(Debug, Clone)]
pub struct MeanScan {
    group: GroupStructure,
    coeffs: Vec<Complex64>,
    n: usize,
    partial_sum: Vec<Complex64>,
    sum_of_partials: Vec<Complex64>,
    log_sum: Vec<Complex64>,
    harmonic: f64,
}

impl MeanScan {
    pub fn new(gs: &GroupStructure, s: &Spectrum) -> Result<Self> {
        if s.depth != gs.depth() || s.coeffs.len() != gs.size() {
            return Err(Error::Resolution("spectrum depth mismatch".into()));
        }
        let depth = s.effective_depth(gs);
        let group = gs.truncate(depth);
        let cells = group.size();
        Ok(Self {
            coeffs: s.coeffs[..cells].to_vec(),
            group,
            n: 0,
            partial_sum: vec![ZERO; cells],
            sum_of_partials: vec![ZERO; cells],
            log_sum: vec![ZERO; cells],
            harmonic: 0.0,
        })
    }

    /// The truncation the scan works on.
    pub fn group(&self) -> &GroupStructure {
        &self.group
    }

    pub fn cells(&self) -> usize {
        self.partial_sum.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `l_n` accumulated so far.
    pub fn harmonic(&self) -> f64 {
        self.harmonic
    }

    pub fn advance(&mut self) {
        let n = self.n;
        for (acc, s) in self.sum_of_partials.iter_mut().zip(&self.partial_sum) {
            *acc += s;
        }
        if n < self.coeffs.len() && self.coeffs[n] != ZERO {
            let c = self.coeffs[n];
            for (s, psi) in self.partial_sum.iter_mut().zip(character_samples(&self.group, n)) {
                *s += c * psi;
            }
        }
        let next = (n + 1) as f64;
        for (acc, s) in self.log_sum.iter_mut().zip(&self.partial_sum) {
            *acc += s / next;
        }
        self.harmonic += 1.0 / next;
        self.n = n + 1;
    }

    /// `S_n f` on the scan cells.
    pub fn partial_sum(&self) -> &[Complex64] {
        &self.partial_sum
    }

    /// Writes `σ_n f` into `out`.
    pub fn fejer_into(&self, out: &mut Vec<Complex64>) {
        let n = self.n.max(1) as f64;
        out.clear();
        out.extend(self.sum_of_partials.iter().map(|v| v / n));
    }

    /// Writes `R_n f` into `out`.
    pub fn riesz_into(&self, out: &mut Vec<Complex64>) {
        out.clear();
        if self.n == 0 {
            out.resize(self.cells(), ZERO);
            return;
        }
        out.extend(self.log_sum.iter().map(|v| v / self.harmonic));
    }

    /// Lifts scan-cell values to a depth-`L` function of `gs`.
    pub fn expand(&self, gs: &GroupStructure, cells: &[Complex64]) -> DiscreteFunction {
        let m = cells.len();
        DiscreteFunction::from_fn(gs, |x| cells[x % m])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summability::{fejer_mean, partial_sum, riesz_mean};
    use crate::transform::forward_transform;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn scan_matches_spectral_means() {
        let gs = GroupStructure::new(&[2, 3, 2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = DiscreteFunction::from_fn(&gs, |_| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let s = forward_transform(&gs, &f).unwrap();
        let mut scan = MeanScan::new(&gs, &s).unwrap();
        let mut buf = Vec::new();
        for n in 1..=gs.size() {
            scan.advance();
            assert_eq!(scan.n(), n);
            let sn = scan.expand(&gs, scan.partial_sum());
            assert!(sn.max_abs_diff(&partial_sum(&gs, &s, n).unwrap()) < 1e-12);
            scan.fejer_into(&mut buf);
            assert!(scan.expand(&gs, &buf).max_abs_diff(&fejer_mean(&gs, &s, n).unwrap()) < 1e-12);
            scan.riesz_into(&mut buf);
            assert!(scan.expand(&gs, &buf).max_abs_diff(&riesz_mean(&gs, &s, n).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn coarse_spectrum_scans_few_cells() {
        let gs = GroupStructure::walsh(8).unwrap();
        let s = Spectrum::unit(&gs, 5).unwrap();
        let scan = MeanScan::new(&gs, &s).unwrap();
        assert_eq!(scan.cells(), 8);
    }
}
