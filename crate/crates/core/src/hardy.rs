//! Martingales, maximal functions, `L_p` / weak-`L_p` / `H_p` quasi-norms
//! and p-atoms.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Coset, GroupStructure};
use crate::transform::DiscreteFunction;

/// Tolerance on `∫_I a dμ = 0` for atom validation.
pub const ATOM_MEAN_TOLERANCE: f64 = 1e-12;
/// Relative slack on `‖a‖_∞ <= μ(I)^{-1/p}`.
pub const ATOM_SUP_SLACK: f64 = 1e-12;

/// `|v|^p`, with exact square-root paths for `p = 1/2` and `p = 1/4`.
#[inline]
pub fn abs_pow(v: f64, p: f64) -> f64 {
    let a = v.abs();
    if p == 0.5 {
        a.sqrt()
    } else if p == 0.25 {
        a.sqrt().sqrt()
    } else if p == 1.0 {
        a
    } else {
        a.powf(p)
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::Parameter(format!("exponent p = {p} must be positive")));
    }
    Ok(())
}

/// The coset-averaging martingale `f^(n) = S_{M_n} f`, `n = 0..=L`.
///
/// Level `n` is stored as one value per depth-`n` coset, indexed by the
/// residue of a point modulo `M_n`.
#[derive(Debug, Clone)]
pub struct Martingale {
    powers: Vec<usize>,
    levels: Vec<Vec<Complex64>>,
    star: OnceLock<Vec<f64>>,
}

/// Builds `f^(L) = f` and averages down one level at a time.
pub fn martingale_from_function(gs: &GroupStructure, f: &DiscreteFunction) -> Result<Martingale> {
    if f.depth != gs.depth() || f.values.len() != gs.size() {
        return Err(Error::Resolution("function depth mismatch".into()));
    }
    let depth = gs.depth();
    let mut levels = vec![Vec::new(); depth + 1];
    levels[depth] = f.values.clone();
    for n in (0..depth).rev() {
        let m = gs.modulus(n);
        let stride = gs.power(n);
        let upper = &levels[n + 1];
        let level: Vec<Complex64> = (0..stride)
            .map(|r| {
                let sum: Complex64 = (0..m).map(|j| upper[r + j * stride]).sum();
                sum / m as f64
            })
            .collect();
        levels[n] = level;
    }
    Ok(Martingale {
        powers: gs.powers().to_vec(),
        levels,
        star: OnceLock::new(),
    })
}

impl Martingale {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// Values of `f^(n)` per depth-`n` coset.
    pub fn level_cells(&self, n: usize) -> &[Complex64] {
        &self.levels[n]
    }

    /// `f^(n)` as a depth-`L` function.
    pub fn level(&self, n: usize) -> DiscreteFunction {
        let cells = &self.levels[n];
        let size = *self.powers.last().unwrap();
        DiscreteFunction {
            depth: self.depth(),
            values: (0..size).map(|x| cells[x % cells.len()]).collect(),
        }
    }

    /// `f* = max_{0<=n<=L} |f^(n)|`, computed on first use.
    pub fn star_values(&self) -> &[f64] {
        self.star.get_or_init(|| {
            let mut star: Vec<f64> = vec![self.levels[0][0].norm()];
            for level in &self.levels[1..] {
                let parent = star.len();
                star = level
                    .iter()
                    .enumerate()
                    .map(|(r, v)| star[r % parent].max(v.norm()))
                    .collect();
            }
            star
        })
    }

    pub fn star(&self) -> DiscreteFunction {
        DiscreteFunction {
            depth: self.depth(),
            values: self
                .star_values()
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect(),
        }
    }
}

/// `∫ |f|^p dμ` over values sampled on equal-measure cells.
pub fn lp_integral(values: &[Complex64], p: f64) -> f64 {
    values.iter().map(|v| abs_pow(v.norm(), p)).sum::<f64>() / values.len() as f64
}

/// `‖f‖_p = (∫ |f|^p dμ)^{1/p}`.
pub fn lp_quasinorm(f: &DiscreteFunction, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(lp_integral(&f.values, p).powf(1.0 / p))
}

/// Weak-`L_p` quantities of a function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeakLp {
    /// `sup_λ λ^p μ(|f| > λ)`.
    pub pth_power: f64,
    /// `pth_power^{1/p}`.
    pub quasinorm: f64,
}

/// Exact `sup_{λ>0} λ^p μ(|f| > λ)` for a step function: on
/// `[v_{i+1}, v_i)` the measure is `μ(|f| >= v_i)`, so the supremum is the
/// largest `v_i^p μ(|f| >= v_i)` over the distinct values `v_i`.
pub fn weak_lp_quasinorm(f: &DiscreteFunction, p: f64) -> Result<WeakLp> {
    check_exponent(p)?;
    let mut mags: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
    mags.sort_by(|a, b| b.total_cmp(a));
    let total = mags.len() as f64;
    let mut best = 0.0f64;
    let mut i = 0;
    while i < mags.len() {
        let v = mags[i];
        let mut j = i;
        while j < mags.len() && mags[j] == v {
            j += 1;
        }
        if v > 0.0 {
            best = best.max(abs_pow(v, p) * j as f64 / total);
        }
        i = j;
    }
    Ok(WeakLp {
        pth_power: best,
        quasinorm: best.powf(1.0 / p),
    })
}

/// `‖f‖_{H_p} = ‖f*‖_p`.
pub fn hardy_quasinorm(m: &Martingale, p: f64) -> Result<f64> {
    check_exponent(p)?;
    Ok(hardy_pth_power(m, p).powf(1.0 / p))
}

/// `‖f‖_{H_p}^p`.
pub fn hardy_pth_power(m: &Martingale, p: f64) -> f64 {
    let star = m.star_values();
    star.iter().map(|&v| abs_pow(v, p)).sum::<f64>() / star.len() as f64
}

/// A p-atom: mean zero on `support`, vanishing off it, and bounded by
/// `μ(support)^{-1/p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub samples: DiscreteFunction,
    pub p: f64,
    pub support: Coset,
}

/// Outcome of [`validate_atom`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum AtomValidity {
    Valid,
    MeanNonzero { mean: f64 },
    SupExceeded { sup: f64, bound: f64 },
    OutsideSupport { point: usize },
    BadExponent,
    Resolution,
}

impl AtomValidity {
    pub fn is_valid(&self) -> bool {
        matches!(self, AtomValidity::Valid)
    }

    pub fn reason(&self) -> &'static str {
        match self {
            AtomValidity::Valid => "valid",
            AtomValidity::MeanNonzero { .. } => "mean-nonzero",
            AtomValidity::SupExceeded { .. } => "sup-exceeded",
            AtomValidity::OutsideSupport { .. } => "outside-support",
            AtomValidity::BadExponent => "bad-exponent",
            AtomValidity::Resolution => "resolution",
        }
    }
}

/// `μ(I)^{-1/p}` for a coset of the given depth.
pub fn atom_bound(gs: &GroupStructure, depth: usize, p: f64) -> f64 {
    (gs.power(depth) as f64).powf(1.0 / p)
}

/// Checks the three p-atom conditions for `a` against the coset `support`.
pub fn validate_atom(gs: &GroupStructure, a: &DiscreteFunction, p: f64, support: &Coset) -> AtomValidity {
    if !(p > 0.0 && p <= 1.0) {
        return AtomValidity::BadExponent;
    }
    if a.depth != gs.depth() || a.values.len() != gs.size() || support.depth > gs.depth() {
        return AtomValidity::Resolution;
    }
    let bound = atom_bound(gs, support.depth, p);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sup = 0.0f64;
    for (x, v) in a.values.iter().enumerate() {
        if support.contains(gs, x) {
            sum += v;
            sup = sup.max(v.norm());
        } else if v.norm() > ATOM_MEAN_TOLERANCE {
            return AtomValidity::OutsideSupport { point: x };
        }
    }
    let mean = (sum / gs.size() as f64).norm();
    if mean > ATOM_MEAN_TOLERANCE {
        return AtomValidity::MeanNonzero { mean };
    }
    if sup > bound * (1.0 + ATOM_SUP_SLACK) {
        return AtomValidity::SupExceeded { sup, bound };
    }
    AtomValidity::Valid
}

/// Largest float `<= x` whose mantissa ends in `zeros` zero bits, so that
/// sums of up to `2^zeros` half-integer multiples of it are exact.
fn coarsen(x: f64, zeros: u32) -> f64 {
    let mask = !((1u64 << zeros) - 1);
    f64::from_bits(x.to_bits() & mask)
}

/// Random p-atom on `I_N` with values resolved at depth `L`.
pub fn random_atom(gs: &GroupStructure, p: f64, n: usize, seed: u64) -> Result<Atom> {
    random_atom_at_resolution(gs, p, n, gs.depth(), seed)
}

/// Random p-atom on `I_N`, constant on depth-`resolution` cosets.
///
/// The cells of `I_N` receive random-sign values `±s` in cancelling pairs
/// (plus one `(s, -s/2, -s/2)` triple when the cell count is odd), where `s`
/// is `μ(I_N)^{-1/p}` rounded down to a float with spare low mantissa bits.
/// All partial sums of these values are exact, so `∫ a = 0` holds exactly
/// and every coefficient below `M_N` of the transform is an exact zero. The
/// draw depends only on `(seed, p, N, resolution)`, not on `L`.
pub fn random_atom_at_resolution(
    gs: &GroupStructure,
    p: f64,
    n: usize,
    resolution: usize,
    seed: u64,
) -> Result<Atom> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Parameter(format!("atom exponent p = {p} outside (0, 1]")));
    }
    if n > resolution || resolution > gs.depth() {
        return Err(Error::Resolution(format!(
            "atom on I_{n} resolved at depth {resolution} needs N <= resolution <= {}",
            gs.depth()
        )));
    }
    let headroom = (usize::BITS - gs.size().leading_zeros()) + 2;
    let amplitude = coarsen(atom_bound(gs, n, p), headroom.min(40));
    let cells = gs.power(resolution) / gs.power(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(cells);
    if cells >= 2 {
        if cells % 2 == 1 {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            values.extend([sign * amplitude, -sign * amplitude / 2.0, -sign * amplitude / 2.0]);
        }
        while values.len() < cells {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            values.extend([sign * amplitude, -sign * amplitude]);
        }
        values.shuffle(&mut rng);
    } else {
        values.push(0.0);
    }
    let step = gs.power(n);
    let res = gs.power(resolution);
    let samples = DiscreteFunction::from_fn(gs, |x| {
        if x % step != 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(values[(x % res) / step], 0.0)
        }
    });
    Ok(Atom {
        samples,
        p,
        support: Coset::origin(gs, n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::summability::partial_sum;
    use crate::transform::{character_samples, forward_transform};

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    fn random_function(gs: &GroupStructure, seed: u64) -> DiscreteFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DiscreteFunction::from_fn(gs, |_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn constant_martingale() {
        let gs = GroupStructure::new(&[2, 3, 2]).unwrap();
        let f = DiscreteFunction::constant(&gs, c(-1.5));
        let m = martingale_from_function(&gs, &f).unwrap();
        for n in 0..=3 {
            assert!(m.level(n).values.iter().all(|&v| v == c(-1.5)));
        }
        assert!(m.star_values().iter().all(|&v| v == 1.5));
        assert!((hardy_quasinorm(&m, 0.5).unwrap() - 1.5).abs() < 1e-14);
    }

    #[test]
    fn walsh_rademacher_martingale() {
        let gs = GroupStructure::walsh(4).unwrap();
        let w1 = DiscreteFunction::new(&gs, character_samples(&gs, 1)).unwrap();
        let m = martingale_from_function(&gs, &w1).unwrap();
        assert!(m.level(0).values.iter().all(|v| v.norm() == 0.0));
        for n in 1..=4 {
            assert_eq!(m.level(n), w1);
        }
    }

    #[test]
    fn averaging_matches_spectral_projection() {
        let gs = GroupStructure::periodic(&[2, 3], 6).unwrap();
        let f = random_function(&gs, 4);
        let s = forward_transform(&gs, &f).unwrap();
        let m = martingale_from_function(&gs, &f).unwrap();
        for n in 0..=gs.depth() {
            let proj = partial_sum(&gs, &s, gs.power(n)).unwrap();
            assert!(m.level(n).max_abs_diff(&proj) < 1e-10);
        }
    }

    #[test]
    fn tower_property() {
        let gs = GroupStructure::new(&[3, 2, 4]).unwrap();
        let m = martingale_from_function(&gs, &random_function(&gs, 8)).unwrap();
        for n in 0..3 {
            let upper = m.level_cells(n + 1);
            for (r, v) in m.level_cells(n).iter().enumerate() {
                let avg: Complex64 = (0..gs.modulus(n)).map(|j| upper[r + j * gs.power(n)]).sum::<Complex64>()
                    / gs.modulus(n) as f64;
                assert!((avg - v).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn norms_of_constant_and_indicator() {
        let gs = GroupStructure::walsh(6).unwrap();
        let f = DiscreteFunction::constant(&gs, c(3.0));
        for p in [0.25, 0.5, 1.0, 2.0] {
            assert!((lp_quasinorm(&f, p).unwrap() - 3.0).abs() < 1e-12);
            let weak = weak_lp_quasinorm(&f, p).unwrap();
            assert!((weak.pth_power - 3f64.powf(p)).abs() < 1e-12);
        }
        // f = M_N 1_{I_N}
        for n in 0..=6 {
            let mn = gs.power(n) as f64;
            let f = DiscreteFunction::from_fn(&gs, |x| c(if x % gs.power(n) == 0 { mn } else { 0.0 }));
            for p in [1.0 / 3.0, 0.5] {
                let got = lp_quasinorm(&f, p).unwrap();
                let want = mn.powf(1.0 - 1.0 / p);
                assert!((got - want).abs() <= 1e-12 * want.max(1.0));
            }
        }
        assert!(matches!(lp_quasinorm(&f, 0.0), Err(Error::Parameter(_))));
        assert!(matches!(weak_lp_quasinorm(&f, -1.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn weak_lp_matches_dense_grid_and_chebyshev() {
        let gs = GroupStructure::walsh(7).unwrap();
        let f = random_function(&gs, 12);
        let p = 1.0 / 3.0;
        let weak = weak_lp_quasinorm(&f, p).unwrap();
        let mags: Vec<f64> = f.values.iter().map(|v| v.norm()).collect();
        let top = mags.iter().cloned().fold(0.0, f64::max);
        let grid = 20_000;
        let mut dense = 0.0f64;
        for i in 1..=grid {
            let lambda = top * i as f64 / grid as f64;
            let mu = mags.iter().filter(|&&m| m > lambda).count() as f64 / mags.len() as f64;
            dense = dense.max(lambda.powf(p) * mu);
        }
        assert!(dense <= weak.pth_power + 1e-12);
        assert!(weak.pth_power - dense < 1e-3);
        assert!(weak.pth_power <= lp_integral(&f.values, p) + 1e-12);
    }

    #[test]
    fn hardy_dominates_lp() {
        let gs = GroupStructure::periodic(&[2, 3, 4], 6).unwrap();
        let f = random_function(&gs, 2);
        let m = martingale_from_function(&gs, &f).unwrap();
        for p in [0.25, 0.5, 1.0] {
            assert!(hardy_quasinorm(&m, p).unwrap() >= lp_quasinorm(&f, p).unwrap() - 1e-12);
        }
    }

    #[test]
    fn atom_validation_reasons() {
        let gs = GroupStructure::walsh(5).unwrap();
        let support = Coset::origin(&gs, 2);
        let zero = DiscreteFunction::zero(&gs);
        assert!(validate_atom(&gs, &zero, 0.5, &support).is_valid());

        // Constant 0.1 * 32 / 8 on I_2 integrates to 0.1.
        let bumped = DiscreteFunction::from_fn(&gs, |x| c(if x % 4 == 0 { 0.4 } else { 0.0 }));
        let v = validate_atom(&gs, &bumped, 0.5, &support);
        assert_eq!(v.reason(), "mean-nonzero");

        let outside = DiscreteFunction::from_fn(&gs, |x| c(if x == 1 { 1.0 } else { 0.0 }));
        assert_eq!(validate_atom(&gs, &outside, 0.5, &support).reason(), "outside-support");

        // ±17 on I_2 with bound 4^2 = 16.
        let tall = DiscreteFunction::from_fn(&gs, |x| {
            c(if x % 4 != 0 { 0.0 } else if x % 8 == 0 { 17.0 } else { -17.0 })
        });
        assert_eq!(validate_atom(&gs, &tall, 0.5, &support).reason(), "sup-exceeded");
    }

    #[test]
    fn random_atoms_are_valid_and_deterministic() {
        for gs in [GroupStructure::walsh(8).unwrap(), GroupStructure::periodic(&[2, 3, 3], 6).unwrap()] {
            for n in 0..gs.depth() {
                for p in [0.25, 1.0 / 3.0, 0.5, 1.0] {
                    let a = random_atom(&gs, p, n, 99).unwrap();
                    let v = validate_atom(&gs, &a.samples, p, &a.support);
                    assert!(v.is_valid(), "{v:?} at N = {n}, p = {p}");
                    let sum: Complex64 = a.samples.values.iter().sum();
                    assert_eq!(sum, c(0.0));
                    let bound = atom_bound(&gs, n, p);
                    assert!((a.samples.sup_norm() - bound).abs() <= 1e-9 * bound);
                    assert_eq!(a, random_atom(&gs, p, n, 99).unwrap());
                }
            }
        }
    }

    #[test]
    fn atom_draw_is_independent_of_depth() {
        let small = GroupStructure::walsh(8).unwrap();
        let large = GroupStructure::walsh(10).unwrap();
        let a = random_atom_at_resolution(&small, 1.0 / 3.0, 3, 6, 5).unwrap();
        let b = random_atom_at_resolution(&large, 1.0 / 3.0, 3, 6, 5).unwrap();
        for x in 0..large.size() {
            assert_eq!(b.samples.values[x], a.samples.values[x % small.size()]);
        }
    }
}
