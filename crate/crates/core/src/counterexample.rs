//! Walsh martingale whose Riesz means make the weighted strong series
//! diverge for any weight `Φ → ∞`.
//!
//! The construction picks block exponents `α_0 < α_1 < …`, places the
//! constant coefficient `2^{2α_k(1/p-1)} / Φ^{1/(2p)}(2^{2α_k})` on each
//! dyadic block `[2^{2α_k}, 2^{2α_k+1})`, and evaluates `R_j f` exactly for
//! the test indices `j ≡ 5 (mod 8)` inside each block.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Coset, GroupStructure};
use crate::hardy::{abs_pow, Atom};
use crate::par;
use crate::transform::{DiscreteFunction, Spectrum};

/// Relative slack used when checking the selection inequalities.
pub const CONDITION_SLACK: f64 = 1e-12;

/// Nondecreasing weight `Φ: ℕ → [1, ∞)` with a printable name.
#[derive(Clone)]
pub struct Phi {
    name: String,
    eval: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    at_least_linear: bool,
}

impl fmt::Debug for Phi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Phi")
            .field("name", &self.name)
            .field("at_least_linear", &self.at_least_linear)
            .finish()
    }
}

fn bit_length(n: u64) -> u32 {
    u64::BITS - n.leading_zeros()
}

impl Phi {
    /// `at_least_linear` marks weights with `Φ(n) >= cn`, for which the
    /// series diverges term by term and no construction is needed.
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(u64) -> f64 + Send + Sync + 'static,
        at_least_linear: bool,
    ) -> Self {
        Self {
            name: name.into(),
            eval: Arc::new(eval),
            at_least_linear,
        }
    }

    /// `Φ(n) = 1 + ⌊log₂(n+1)⌋`.
    pub fn log() -> Self {
        Self::new("log", |n| bit_length(n.saturating_add(1)) as f64, false)
    }

    /// `Φ(n) = 1 + ⌊log₂(1 + ⌊log₂(n+1)⌋)⌋`.
    pub fn iterated_log() -> Self {
        Self::new(
            "iterated-log",
            |n| bit_length(bit_length(n.saturating_add(1)) as u64) as f64,
            false,
        )
    }

    /// `Φ(n) = max(1, n^q)`.
    pub fn power(q: f64) -> Self {
        Self::new(format!("power:{q}"), move |n| (n as f64).powf(q).max(1.0), q >= 1.0)
    }

    /// `Φ(n) = max(1, n)`.
    pub fn linear() -> Self {
        Self::new("linear", |n| (n as f64).max(1.0), true)
    }

    /// Parses `log`, `iterated-log`, `power` (exponent 1/4), `power:<q>` or
    /// `linear`.
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "log" => Ok(Self::log()),
            "iterated-log" | "loglog" => Ok(Self::iterated_log()),
            "power" => Ok(Self::power(0.25)),
            "linear" => Ok(Self::linear()),
            other => match other.strip_prefix("power:").map(str::parse::<f64>) {
                Some(Ok(q)) if q > 0.0 && q.is_finite() => Ok(Self::power(q)),
                _ => Err(Error::Parameter(format!(
                    "unknown weight {other:?}; expected log, iterated-log, power, power:<q> or linear"
                ))),
            },
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, n: u64) -> f64 {
        (self.eval)(n)
    }

    pub fn is_at_least_linear(&self) -> bool {
        self.at_least_linear
    }
}

/// Knobs of the greedy exponent search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionOptions {
    pub alpha0: u32,
    /// Largest exponent tried; blocks must fit in 64-bit indices.
    pub ceiling: u32,
    /// Each new term `Φ^{-1/2}(2^{2α_k})` must be below the previous one
    /// divided by this ratio (and strictly below it).
    pub decrease_ratio: f64,
    /// Bound on the partial sums of `Φ^{-1/2}(2^{2α_k})`.
    pub budget: f64,
}

impl Default for SelectionOptions {
    fn default() -> Self {
        Self {
            alpha0: 2,
            ceiling: 31,
            decrease_ratio: 1.0,
            budget: 2.0,
        }
    }
}

/// `log₂(2^{2α/p} / Φ^{1/(2p)}(2^{2α}))`.
fn log2_mass(phi: &Phi, p: f64, alpha: u32) -> f64 {
    2.0 * alpha as f64 / p - phi.eval(1u64 << (2 * alpha)).log2() / (2.0 * p)
}

/// `log₂((1/(128α)) 2^{2α(1/p-2)} / Φ^{1/(2p)}(2^{2α}))`.
fn log2_pointwise(phi: &Phi, p: f64, alpha: u32) -> f64 {
    -(128.0 * alpha as f64).log2() + 2.0 * alpha as f64 * (1.0 / p - 2.0)
        - phi.eval(1u64 << (2 * alpha)).log2() / (2.0 * p)
}

fn summability_term(phi: &Phi, alpha: u32) -> f64 {
    phi.eval(1u64 << (2 * alpha)).powf(-0.5)
}

fn log2_sum(logs: &[f64]) -> f64 {
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + logs.iter().map(|l| (l - top).exp2()).sum::<f64>().log2()
}

fn at_most(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + CONDITION_SLACK * rhs.abs().max(1.0)
}

/// Mass condition: `Σ_{η<k} 2^{2α_η/p}/Φ^{1/(2p)} <= 2·2^{2α_{k-1}/p}/Φ^{1/(2p)}`.
fn mass_condition(phi: &Phi, p: f64, alphas: &[u32], k: usize) -> bool {
    let logs: Vec<f64> = alphas[..k].iter().map(|&a| log2_mass(phi, p, a)).collect();
    at_most(log2_sum(&logs), 1.0 + logs[k - 1])
}

/// Separation condition between consecutive blocks.
fn separation_condition(phi: &Phi, p: f64, prev: u32, alpha: u32) -> bool {
    at_most(1.0 + log2_mass(phi, p, prev), log2_pointwise(phi, p, alpha))
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::Parameter(format!("exponent p = {p} outside (0, 1/2)")));
    }
    Ok(())
}

/// Greedy minimal exponents `α_0 < … < α_{K-1}` satisfying the summability,
/// mass and separation conditions.
pub fn select_alphas(phi: &Phi, p: f64, levels: usize, opts: &SelectionOptions) -> Result<Vec<u32>> {
    check_exponent(p)?;
    if levels == 0 {
        return Err(Error::Parameter("at least one construction level is required".into()));
    }
    if phi.is_at_least_linear() {
        return Err(Error::DirectDivergence(format!(
            "Φ = {} grows at least linearly; the weights alone dominate c n^(2p-1) log^p(n), which is not summable",
            phi.name()
        )));
    }
    let ceiling = opts.ceiling.min(31);
    if opts.alpha0 < 2 || opts.alpha0 > ceiling {
        return Err(Error::Parameter(format!("alpha0 = {} outside [2, {ceiling}]", opts.alpha0)));
    }
    if phi.eval(1u64 << (2 * opts.alpha0)) < 1.0 {
        return Err(Error::Parameter(format!("Φ = {} drops below 1", phi.name())));
    }
    let mut alphas = vec![opts.alpha0];
    let mut partial = summability_term(phi, opts.alpha0);
    if partial > opts.budget * (1.0 + CONDITION_SLACK) {
        return Err(Error::ConstructionInfeasible {
            level: 0,
            condition: "summability",
            ceiling,
        });
    }
    for level in 1..levels {
        if !mass_condition(phi, p, &alphas, level) {
            return Err(Error::ConstructionInfeasible {
                level,
                condition: "mass",
                ceiling,
            });
        }
        let prev = alphas[level - 1];
        let prev_term = summability_term(phi, prev);
        let mut failed = "separation";
        let mut found = None;
        for alpha in prev + 1..=ceiling {
            if !separation_condition(phi, p, prev, alpha) {
                failed = "separation";
                continue;
            }
            let term = summability_term(phi, alpha);
            if !(term < prev_term && term * opts.decrease_ratio <= prev_term)
                || partial + term > opts.budget * (1.0 + CONDITION_SLACK)
            {
                failed = "summability";
                continue;
            }
            found = Some((alpha, term));
            break;
        }
        match found {
            Some((alpha, term)) => {
                alphas.push(alpha);
                partial += term;
            }
            None => {
                return Err(Error::ConstructionInfeasible {
                    level,
                    condition: failed,
                    ceiling,
                })
            }
        }
    }
    Ok(alphas)
}

/// Exponents, weights and derived constants of one construction.
#[derive(Debug, Clone)]
pub struct CounterexampleSpec {
    pub p: f64,
    pub phi: Phi,
    pub alphas: Vec<u32>,
    /// `λ_k = Φ^{-1/(2p)}(2^{2α_k})`.
    pub lambdas: Vec<f64>,
}

impl CounterexampleSpec {
    /// Selects `levels` exponents greedily.
    pub fn new(phi: Phi, p: f64, levels: usize, opts: &SelectionOptions) -> Result<Self> {
        let alphas = select_alphas(&phi, p, levels, opts)?;
        Self::from_alphas(phi, p, alphas)
    }

    /// Uses caller-chosen exponents; conditions are not enforced here, see
    /// [`check_conditions`].
    pub fn from_alphas(phi: Phi, p: f64, alphas: Vec<u32>) -> Result<Self> {
        check_exponent(p)?;
        if alphas.is_empty() || alphas[0] < 2 || alphas.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "exponents must be strictly increasing and start at 2 or above".into(),
            ));
        }
        if *alphas.last().unwrap() > 31 {
            return Err(Error::Parameter("exponents above 31 overflow block indices".into()));
        }
        let lambdas = alphas
            .iter()
            .map(|&a| phi.eval(1u64 << (2 * a)).powf(-1.0 / (2.0 * p)))
            .collect();
        Ok(Self {
            p,
            phi,
            alphas,
            lambdas,
        })
    }

    pub fn levels(&self) -> usize {
        self.alphas.len()
    }

    /// `[2^{2α_k}, 2^{2α_k+1})`.
    pub fn block_range(&self, k: usize) -> (usize, usize) {
        let a = self.alphas[k];
        (1usize << (2 * a), 1usize << (2 * a + 1))
    }

    /// Coefficient on block `k`: `2^{2α_k(1/p-1)} λ_k`.
    pub fn coefficient(&self, k: usize) -> f64 {
        (2.0 * self.alphas[k] as f64 * (1.0 / self.p - 1.0)).exp2() * self.lambdas[k]
    }

    /// Proven lower bound for `|R_j f|` on `I_2(e_0 + e_1)`, `j` in block `k`.
    pub fn pointwise_bound(&self, k: usize) -> f64 {
        log2_pointwise(&self.phi, self.p, self.alphas[k]).exp2()
    }

    /// Proven lower bound for `‖R_j f‖_{weak-L_p}^p`, `j` in block `k`.
    pub fn weak_bound(&self, k: usize) -> f64 {
        let a = self.alphas[k] as f64;
        (2.0 * a * (1.0 - 2.0 * self.p)).exp2()
            / (516.0 * a.powf(self.p))
            / self.phi.eval(1u64 << (2 * self.alphas[k])).sqrt()
    }

    /// Smallest depth holding every block.
    pub fn required_depth(&self) -> usize {
        2 * *self.alphas.last().unwrap() as usize + 1
    }

    pub fn blocks(&self) -> Vec<SpectralBlock> {
        (0..self.levels())
            .map(|k| {
                let (start, end) = self.block_range(k);
                SpectralBlock {
                    start,
                    end,
                    coeff: self.coefficient(k),
                }
            })
            .collect()
    }
}

/// Which selection conditions hold on a given exponent sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    /// `Φ^{-1/2}(2^{2α_k})`.
    pub summability_terms: Vec<f64>,
    pub summability_partial_sum: f64,
    pub summability_decreasing: bool,
    pub within_budget: bool,
    /// Mass condition for `k = 1..K`.
    pub mass: Vec<bool>,
    /// Separation condition for `k = 1..K`.
    pub separation: Vec<bool>,
}

impl ConditionCheck {
    pub fn all_hold(&self) -> bool {
        self.summability_decreasing
            && self.within_budget
            && self.mass.iter().all(|&b| b)
            && self.separation.iter().all(|&b| b)
    }
}

pub fn check_conditions(spec: &CounterexampleSpec, opts: &SelectionOptions) -> ConditionCheck {
    let terms: Vec<f64> = spec.alphas.iter().map(|&a| summability_term(&spec.phi, a)).collect();
    let sum: f64 = terms.iter().sum();
    let levels = spec.levels();
    ConditionCheck {
        summability_decreasing: terms
            .windows(2)
            .all(|w| w[1] < w[0] && w[1] * opts.decrease_ratio <= w[0]),
        within_budget: sum <= opts.budget * (1.0 + CONDITION_SLACK),
        summability_partial_sum: sum,
        summability_terms: terms,
        mass: (1..levels)
            .map(|k| mass_condition(&spec.phi, spec.p, &spec.alphas, k))
            .collect(),
        separation: (1..levels)
            .map(|k| separation_condition(&spec.phi, spec.p, spec.alphas[k - 1], spec.alphas[k]))
            .collect(),
    }
}

fn require_walsh(gs: &GroupStructure) -> Result<()> {
    if !gs.is_dyadic() {
        return Err(Error::UnsupportedGroup(
            "the counterexample is constructed for the Walsh group only".into(),
        ));
    }
    Ok(())
}

/// Spectrum of the construction: the block coefficient on every block,
/// zero elsewhere.
pub fn build_counterexample(gs: &GroupStructure, spec: &CounterexampleSpec) -> Result<Spectrum> {
    require_walsh(gs)?;
    if spec.required_depth() > gs.depth() {
        return Err(Error::Resolution(format!(
            "the highest block needs depth {}, group has {}",
            spec.required_depth(),
            gs.depth()
        )));
    }
    let mut coeffs = vec![Complex64::new(0.0, 0.0); gs.size()];
    for block in spec.blocks() {
        for c in &mut coeffs[block.start..block.end] {
            *c = Complex64::new(block.coeff, 0.0);
        }
    }
    Spectrum::new(gs, coeffs)
}

/// `2^{2α(1/p-1)} (D_{2^{2α+1}} - D_{2^{2α}})`, a p-atom on `I_{2α}`.
pub fn block_atom(gs: &GroupStructure, p: f64, alpha: u32) -> Result<Atom> {
    require_walsh(gs)?;
    let a = 2 * alpha as usize;
    if a + 1 > gs.depth() {
        return Err(Error::Resolution(format!("block atom needs depth {}", a + 1)));
    }
    let scale = (a as f64 * (1.0 / p - 1.0)).exp2();
    let dyadic = |m: usize, x: usize| if x % (1usize << m) == 0 { (1usize << m) as f64 } else { 0.0 };
    let samples =
        DiscreteFunction::from_fn(gs, |x| Complex64::new(scale * (dyadic(a + 1, x) - dyadic(a, x)), 0.0));
    Ok(Atom {
        samples,
        p,
        support: Coset::origin(gs, a),
    })
}

/// Indices with binary digits `1, 0, 1` in positions 0, 1, 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexSetA02 {
    pub members: Vec<usize>,
}

pub fn is_a02(n: usize) -> bool {
    n & 7 == 5
}

pub fn enumerate_a02(lo: usize, hi: usize) -> IndexSetA02 {
    let first = lo + (5 + 8 - lo % 8) % 8;
    IndexSetA02 {
        members: (first..=hi).step_by(8).collect(),
    }
}

/// Constant coefficient `coeff` on the indices `start..end`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralBlock {
    pub start: usize,
    pub end: usize,
    pub coeff: f64,
}

/// An index `j` at which `R_j f` is evaluated, with the level used for the
/// distribution count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeTarget {
    pub j: usize,
    pub threshold: f64,
}

/// Exact statistics of `R_j f` over the whole group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RieszProbe {
    pub j: usize,
    /// `‖R_j f‖_p^p`.
    pub lp_pth_power: f64,
    /// `μ(|R_j f| >= threshold)`.
    pub measure_above: f64,
    /// `min |R_j f|` over the probe coset.
    pub probe_min: f64,
}

const SCAN_CHUNK: usize = 1 << 11;

#[inline]
fn parity_sign(v: usize) -> f64 {
    if v.count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

#[derive(Clone, Copy)]
struct ChunkStat {
    pow_sum: f64,
    above: usize,
    probe_min: f64,
}

/// Evaluates `R_j f` at every target for a Walsh spectrum that is constant
/// on the given blocks and zero elsewhere.
///
/// The scan keeps `S_k f` and `Σ_{n<=k} S_n f / n` on the coarsest depth
/// that resolves the relevant coefficients, jumps over zero runs in one
/// step, and inside a block updates the characters through
/// `w_k(x) = w_{k_lo}(x_lo) w_{k_hi}(x_hi)`. Cells are processed in fixed
/// chunks and reduced in chunk order, so results do not depend on the
/// execution mode.
pub fn walsh_riesz_probes(
    gs: &GroupStructure,
    blocks: &[SpectralBlock],
    targets: &[ProbeTarget],
    p: f64,
    probe: &Coset,
) -> Result<Vec<RieszProbe>> {
    require_walsh(gs)?;
    crate::hardy::check_exponent(p)?;
    if blocks.iter().any(|b| b.start >= b.end || b.end > gs.size())
        || blocks.windows(2).any(|w| w[0].end > w[1].start)
    {
        return Err(Error::Parameter("blocks must be nonempty, ordered, disjoint and within M_L".into()));
    }
    if targets.windows(2).any(|w| w[0].j >= w[1].j) || targets.iter().any(|t| t.j == 0 || t.j > gs.size()) {
        return Err(Error::Resolution("targets must be strictly increasing within 1..=M_L".into()));
    }
    if probe.depth > gs.depth() {
        return Err(Error::Resolution("probe coset deeper than the group".into()));
    }
    let Some(j_max) = targets.last().map(|t| t.j) else {
        return Ok(Vec::new());
    };
    let reach = blocks
        .iter()
        .filter(|b| b.start < j_max)
        .map(|b| b.end.min(j_max))
        .max()
        .unwrap_or(1);
    let mut depth = probe.depth;
    while (1usize << depth) < reach {
        depth += 1;
    }
    let cells = 1usize << depth;
    let chunk = cells.min(SCAN_CHUNK);
    let bits = chunk.trailing_zeros() as usize;
    let probe_mask = (1usize << probe.depth) - 1;
    let probe_residue = probe.residue(gs);

    let mut harmonic = vec![0.0f64; j_max + 1];
    for n in 1..=j_max {
        harmonic[n] = harmonic[n - 1] + 1.0 / n as f64;
    }
    let patterns: Vec<Vec<f64>> = (0..bits)
        .map(|q| (0..chunk).map(|i| parity_sign(((2usize << q) - 1) & i)).collect())
        .collect();

    let run_chunk = |ci: usize| -> Vec<ChunkStat> {
        let c0 = ci * chunk;
        let hi = c0 >> bits;
        let mut s = vec![0.0f64; chunk];
        let mut t = vec![0.0f64; chunk];
        let mut w = vec![0.0f64; chunk];
        let mut w_index = usize::MAX;
        let mut stats = Vec::with_capacity(targets.len());
        let mut k = 0usize;
        let mut bi = 0usize;
        for target in targets {
            let j = target.j;
            while k < j {
                while bi < blocks.len() && blocks[bi].end <= k {
                    bi += 1;
                }
                match blocks.get(bi) {
                    Some(block) if block.start <= k => {
                        let stop = block.end.min(j);
                        while k < stop {
                            let lo = k & (chunk - 1);
                            if lo != 0 && w_index == k - 1 {
                                let pat = &patterns[(k - 1).trailing_ones() as usize];
                                for (wv, pv) in w.iter_mut().zip(pat) {
                                    *wv *= pv;
                                }
                            } else {
                                for (i, wv) in w.iter_mut().enumerate() {
                                    *wv = parity_sign(lo & i);
                                }
                            }
                            w_index = k;
                            let cs = block.coeff * parity_sign((k >> bits) & hi);
                            let inv = 1.0 / (k + 1) as f64;
                            for ((sv, tv), wv) in s.iter_mut().zip(t.iter_mut()).zip(&w) {
                                *sv += cs * wv;
                                *tv += *sv * inv;
                            }
                            k += 1;
                        }
                    }
                    next => {
                        let stop = next.map_or(j, |b| b.start.min(j));
                        let weight = harmonic[stop] - harmonic[k];
                        for (sv, tv) in s.iter().zip(t.iter_mut()) {
                            *tv += sv * weight;
                        }
                        k = stop;
                    }
                }
            }
            let l = harmonic[j];
            let mut stat = ChunkStat {
                pow_sum: 0.0,
                above: 0,
                probe_min: f64::INFINITY,
            };
            for (i, tv) in t.iter().enumerate() {
                let r = (tv / l).abs();
                stat.pow_sum += abs_pow(r, p);
                if r >= target.threshold {
                    stat.above += 1;
                }
                if (c0 + i) & probe_mask == probe_residue && r < stat.probe_min {
                    stat.probe_min = r;
                }
            }
            stats.push(stat);
        }
        stats
    };

    let per_chunk = par::map_range(gs.execution(), cells / chunk, run_chunk);
    Ok(targets
        .iter()
        .enumerate()
        .map(|(ti, target)| {
            let mut pow_sum = 0.0;
            let mut above = 0usize;
            let mut probe_min = f64::INFINITY;
            for stats in &per_chunk {
                pow_sum += stats[ti].pow_sum;
                above += stats[ti].above;
                probe_min = probe_min.min(stats[ti].probe_min);
            }
            RieszProbe {
                j: target.j,
                lp_pth_power: pow_sum / cells as f64,
                measure_above: above as f64 / cells as f64,
                probe_min,
            }
        })
        .collect())
}

/// One evaluated term of the weighted series at a test index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub j: usize,
    pub block: usize,
    /// `‖R_j f‖_p^p`.
    pub lp_pth_power: f64,
    /// `log^p(j) ‖R_j f‖_p^p Φ(j) / j^{2-2p}`.
    pub term: f64,
    /// `min |R_j f|` on `I_2(e_0 + e_1)`.
    pub pointwise_min: f64,
    pub pointwise_bound: f64,
    /// `λ^p μ(|R_j f| >= λ)` at the pointwise bound `λ`, a lower estimate of
    /// `‖R_j f‖_{weak-L_p}^p`.
    pub weak_witness: f64,
    pub weak_bound: f64,
    /// The term with `‖R_j f‖_p^p` replaced by `weak_bound`.
    pub term_lower_bound: f64,
}

impl SeriesTerm {
    pub fn pointwise_holds(&self) -> bool {
        self.pointwise_min >= self.pointwise_bound
    }

    pub fn weak_holds(&self) -> bool {
        self.weak_witness >= self.weak_bound && self.lp_pth_power >= self.weak_witness
    }
}

/// `log^p(j) Φ(j) / j^{2-2p}`.
pub fn series_weight(phi: &Phi, p: f64, j: usize) -> f64 {
    let jf = j as f64;
    jf.ln().powf(p) * phi.eval(j as u64) / jf.powf(2.0 - 2.0 * p)
}

/// Terms of the weighted series at every `j ≡ 5 (mod 8)` with
/// `2^{2α_k} < j <= min(2^{2α_k+1} - 1, j_max)`.
pub fn divergence_series_terms(
    gs: &GroupStructure,
    spec: &CounterexampleSpec,
    j_max: usize,
) -> Result<Vec<SeriesTerm>> {
    require_walsh(gs)?;
    if j_max > gs.size() {
        return Err(Error::Resolution(format!("j_max = {j_max} exceeds M_L = {}", gs.size())));
    }
    let mut targets = Vec::new();
    let mut owners = Vec::new();
    for k in 0..spec.levels() {
        let (start, end) = spec.block_range(k);
        if start + 1 > j_max {
            break;
        }
        if end > gs.size() {
            return Err(Error::Resolution(format!("block {k} needs depth {}", 2 * spec.alphas[k] + 1)));
        }
        for j in enumerate_a02(start + 1, (end - 1).min(j_max)).members {
            targets.push(ProbeTarget {
                j,
                threshold: spec.pointwise_bound(k),
            });
            owners.push(k);
        }
    }
    let blocks = spec.blocks();
    let blocks: Vec<SpectralBlock> = blocks.into_iter().filter(|b| b.end <= gs.size()).collect();
    let probe = Coset::new(2, crate::group::GroupElement { coords: vec![1, 1] });
    let probes = walsh_riesz_probes(gs, &blocks, &targets, spec.p, &probe)?;
    Ok(probes
        .iter()
        .zip(&owners)
        .zip(&targets)
        .map(|((probe, &k), target)| {
            let weight = series_weight(&spec.phi, spec.p, probe.j);
            SeriesTerm {
                j: probe.j,
                block: k,
                lp_pth_power: probe.lp_pth_power,
                term: weight * probe.lp_pth_power,
                pointwise_min: probe.probe_min,
                pointwise_bound: target.threshold,
                weak_witness: abs_pow(target.threshold, spec.p) * probe.measure_above,
                weak_bound: spec.weak_bound(k),
                term_lower_bound: weight * spec.weak_bound(k),
            }
        })
        .collect())
}
