use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Record};
use crate::error::{Error, Result};
use crate::group::GroupStructure;
use crate::hardy::{abs_pow, hardy_pth_power, lp_integral, martingale_from_function, random_atom_at_resolution};
use crate::par;
use crate::summability::MeanScan;
use crate::transform::{forward_transform, DiscreteFunction};

/// Allowed growth of the normalized atom sums per depth step.
pub const DEPTH_GROWTH_TOLERANCE: f64 = 0.10;

/// Largest support depth of the random atoms.
pub const MAX_ATOM_SUPPORT: usize = 5;

/// The atom noise is resolved at most this many levels below its support.
pub const MAX_ATOM_REFINEMENT: usize = 3;

/// `log^p(n) / n^{2-2p}` with natural logarithm.
pub fn strong_weight(p: f64, n: usize) -> f64 {
    let nf = n as f64;
    abs_pow(nf.ln(), p) / nf.powf(2.0 - 2.0 * p)
}

fn check_exponent(p: f64, hi: f64, closed: bool) -> Result<()> {
    let ok = p > 0.0 && (p < hi || (closed && p == hi));
    if !ok {
        return Err(Error::Parameter(format!(
            "exponent p = {p} outside (0, 1/2{}",
            if closed { "]" } else { ")" }
        )));
    }
    Ok(())
}

/// Weighted sums for one atom supported on `I_N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomSeries {
    pub support_depth: usize,
    /// `Σ log^p(n) ∫_{Ī_N} |R_n a|^p / n^{2-2p}`.
    pub proof_level: f64,
    /// `Σ log^p(n) ‖R_n a‖_p^p / n^{2-2p}`.
    pub statement_level: f64,
    /// `Σ log^p(n) ‖R_n a‖_{H_p}^p / n^{2-2p}`.
    pub hardy_level: f64,
    /// `‖a‖_{H_p}^p`, the normalization applied to the three sums.
    pub atom_hardy: f64,
    /// `R_n a` is exactly zero for every `n <= M_N`.
    pub localized: bool,
    /// The statement-level summand dominates the proof-level one at every `n`.
    pub dominated: bool,
}

/// The three weighted sums over `n = 1..=M_L` for an atom on `I_N`,
/// each divided by `‖a‖_{H_p}^p`.
pub fn atom_series(gs: &GroupStructure, a: &DiscreteFunction, support_depth: usize, p: f64) -> Result<AtomSeries> {
    if support_depth > gs.depth() {
        return Err(Error::Resolution("support deeper than the group".into()));
    }
    let atom_hardy = hardy_pth_power(&martingale_from_function(gs, a)?, p);
    let spectrum = forward_transform(gs, a)?;
    let mut scan = MeanScan::new(gs, &spectrum)?;
    let cell_group = scan.group().clone();
    let cells = scan.cells();
    let m_n = gs.power(support_depth);
    let mut out = AtomSeries {
        support_depth,
        proof_level: 0.0,
        statement_level: 0.0,
        hardy_level: 0.0,
        atom_hardy,
        localized: true,
        dominated: true,
    };
    let mut buf = Vec::new();
    for n in 1..=gs.size() {
        scan.advance();
        scan.riesz_into(&mut buf);
        if n <= m_n {
            out.localized &= buf.iter().all(|v| v.re == 0.0 && v.im == 0.0);
            continue;
        }
        let (mut inside, mut outside) = (0.0f64, 0.0f64);
        for (x, v) in buf.iter().enumerate() {
            let t = abs_pow(v.norm(), p);
            if cells >= m_n {
                if x % m_n == 0 {
                    inside += t;
                } else {
                    outside += t;
                }
            } else if x == 0 {
                // The cell holding I_N is larger than it.
                let share = cells as f64 / m_n as f64;
                inside += t * share;
                outside += t * (1.0 - share);
            } else {
                outside += t;
            }
        }
        let proof = outside / cells as f64;
        let statement = (inside + outside) / cells as f64;
        out.dominated &= statement >= proof;
        let f = DiscreteFunction {
            depth: cell_group.depth(),
            values: buf.clone(),
        };
        let hardy = hardy_pth_power(&martingale_from_function(&cell_group, &f)?, p);
        let w = strong_weight(p, n);
        out.proof_level += w * proof;
        out.statement_level += w * statement;
        out.hardy_level += w * hardy;
    }
    if atom_hardy > 0.0 {
        out.proof_level /= atom_hardy;
        out.statement_level /= atom_hardy;
        out.hardy_level /= atom_hardy;
    }
    Ok(out)
}

/// Support depth, noise resolution and atom seed for one trial. The draw
/// depends on `(seed, trial)` and on `L` only through clamping when
/// `L <= MAX_ATOM_SUPPORT + MAX_ATOM_REFINEMENT`.
pub fn trial_parameters(depth: usize, seed: u64, trial: u64) -> (usize, usize, u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    let support = rng.gen_range(1..=MAX_ATOM_SUPPORT);
    let refinement = rng.gen_range(1..=MAX_ATOM_REFINEMENT);
    let atom_seed = rng.gen::<u64>();
    let support = support.min(depth.saturating_sub(1)).max(1);
    let resolution = (support + refinement).min(depth);
    (support, resolution, atom_seed)
}

/// Random p-atoms against the weighted Riesz series, reported side by side
/// at proof level (`∫_{Ī_N}`), statement level (`‖·‖_p`) and Hardy level
/// (`‖·‖_{H_p}`), all normalized by `‖a‖_{H_p}^p`.
pub fn theorem1_ratio(gs: &GroupStructure, p: f64, trials: usize, seed: u64) -> Result<ExperimentReport> {
    check_exponent(p, 0.5, false)?;
    if gs.depth() < 2 {
        return Err(Error::Resolution("at least two levels are needed".into()));
    }
    let results = par::map_range(gs.execution(), trials, |t| -> Result<AtomSeries> {
        let (support, resolution, atom_seed) = trial_parameters(gs.depth(), seed, t as u64);
        let atom = random_atom_at_resolution(gs, p, support, resolution, atom_seed)?;
        atom_series(gs, &atom.samples, support, p)
    });
    let results: Vec<AtomSeries> = results.into_iter().collect::<Result<_>>()?;
    let mut report = ExperimentReport::new("theorem1");
    report
        .param("moduli", gs.moduli())
        .param("L", gs.depth())
        .param("p", p)
        .param("trials", trials)
        .param("seed", seed);
    let mut max = [0.0f64; 3];
    for (t, r) in results.iter().enumerate() {
        let values = [r.statement_level, r.proof_level, r.hardy_level];
        for (i, series) in ["statement", "proof", "hardy"].iter().enumerate() {
            report.push(Record::info(series, t as u64, values[i]));
            report.plot_point(t as f64, series, values[i]);
            max[i] = max[i].max(values[i]);
        }
    }
    report.value("max_statement", max[0]);
    report.value("max_proof", max[1]);
    report.value("max_hardy", max[2]);
    let m_l = gs.size() as f64;
    report.value("tail_estimate", m_l.powf(2.0 * p - 1.0) / (1.0 - 2.0 * p));
    report.summary.fitted_constant = Some(max[0]);
    let unlocalized = results.iter().filter(|r| !r.localized).count();
    report.check(
        "localization",
        unlocalized == 0,
        format!("{unlocalized} atoms with R_n a != 0 for some n <= M_N"),
    );
    let undominated = results.iter().filter(|r| !r.dominated).count();
    report.check(
        "statement-dominates-proof",
        undominated == 0,
        format!("{undominated} atoms where a complement integral exceeded the full integral"),
    );
    report.finalize();
    Ok(report)
}

/// Runs [`theorem1_ratio`] on `pattern` cycled to each depth and requires the
/// maximal statement-level sum to grow by at most
/// [`DEPTH_GROWTH_TOLERANCE`] per step.
pub fn theorem1_depths(pattern: &[usize], depths: &[usize], p: f64, trials: usize, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("theorem1-depths");
    report
        .param("pattern", pattern)
        .param("L", depths)
        .param("p", p)
        .param("trials", trials)
        .param("seed", seed);
    let mut maxima = Vec::new();
    for &depth in depths {
        let gs = GroupStructure::periodic(pattern, depth)?;
        let sub = theorem1_ratio(&gs, p, trials, seed)?;
        for c in &sub.summary.checks {
            report.check(&format!("{}-L{depth}", c.name), c.passed, c.detail.clone());
        }
        for key in ["max_statement", "max_proof", "max_hardy", "tail_estimate"] {
            report.value(&format!("{key}_L{depth}"), sub.summary.values[key]);
        }
        let m = sub.summary.values["max_statement"];
        report.push(Record::info("max-statement", depth as u64, m));
        report.push(Record::info("max-proof", depth as u64, sub.summary.values["max_proof"]));
        report.push(Record::info("max-hardy", depth as u64, sub.summary.values["max_hardy"]));
        report.plot_point(depth as f64, "max-statement", m);
        maxima.push((depth, m));
    }
    for w in maxima.windows(2) {
        let ((d0, m0), (d1, m1)) = (w[0], w[1]);
        report.check(
            &format!("growth-L{d0}-L{d1}"),
            m1 <= m0 * (1.0 + DEPTH_GROWTH_TOLERANCE),
            format!("max statement-level sum {m0} at L = {d0}, {m1} at L = {d1}, ratio {:.4}", m1 / m0),
        );
    }
    report.summary.monotone = Some(report.summary.checks.iter().all(|c| c.passed));
    report.finalize();
    Ok(report)
}

/// Partial sums of the strong-convergence series of one function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongSums {
    pub n: usize,
    /// `(1/log^{[1/2+p]} n) Σ_{k<=n} ‖σ_k f‖_p^p / k^{2-2p}`.
    pub fejer: f64,
    /// `Σ_{k<=n} log^p(k) ‖R_k f‖_p^p / k^{2-2p}`.
    pub riesz: f64,
    /// `(1/log n) Σ_{k<=n} ‖R_k f‖_{1/2}^{1/2} / k`.
    pub riesz_half: f64,
}

/// All partial sums for `n = 1..=n_max` in one pass over the means.
pub fn strong_sum_curves(gs: &GroupStructure, f: &DiscreteFunction, p: f64, n_max: usize) -> Result<Vec<StrongSums>> {
    check_exponent(p, 0.5, true)?;
    crate::summability::check_order(gs, n_max)?;
    let spectrum = forward_transform(gs, f)?;
    let mut scan = MeanScan::new(gs, &spectrum)?;
    let mut buf: Vec<Complex64> = Vec::new();
    let (mut fejer, mut riesz, mut half) = (0.0f64, 0.0f64, 0.0f64);
    let log_power = (0.5 + p).floor() as i32;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        scan.advance();
        let nf = n as f64;
        scan.fejer_into(&mut buf);
        fejer += lp_integral(&buf, p) / nf.powf(2.0 - 2.0 * p);
        scan.riesz_into(&mut buf);
        riesz += strong_weight(p, n) * lp_integral(&buf, p);
        half += lp_integral(&buf, 0.5) / nf;
        let ln = nf.ln();
        out.push(StrongSums {
            n,
            fejer: if n >= 2 { fejer / ln.powi(log_power) } else { f64::NAN },
            riesz,
            riesz_half: if n >= 2 { half / ln } else { f64::NAN },
        });
    }
    Ok(out)
}

fn at_order(gs: &GroupStructure, f: &DiscreteFunction, p: f64, n: usize) -> Result<StrongSums> {
    if n < 2 {
        return Err(Error::Parameter("the normalized sums need n >= 2".into()));
    }
    Ok(*strong_sum_curves(gs, f, p, n)?.last().unwrap())
}

/// `(1/log^{[1/2+p]} n) Σ_{k=1}^n ‖σ_k f‖_p^p / k^{2-2p}`.
pub fn fejer_strong_sum(gs: &GroupStructure, p: f64, f: &DiscreteFunction, n: usize) -> Result<f64> {
    Ok(at_order(gs, f, p, n)?.fejer)
}

/// `(1/log n) Σ_{k=1}^n ‖R_k f‖_{1/2}^{1/2} / k`.
pub fn remark1_sum(gs: &GroupStructure, f: &DiscreteFunction, n: usize) -> Result<f64> {
    Ok(at_order(gs, f, 0.5, n)?.riesz_half)
}

/// Curves of the Fejér and Riesz strong sums for `f`, normalized by
/// `‖f‖_{H_p}^p`. Reported only.
pub fn fejer_comparison(gs: &GroupStructure, f: &DiscreteFunction, p: f64, label: &str) -> Result<ExperimentReport> {
    let hp = hardy_pth_power(&martingale_from_function(gs, f)?, p);
    let curves = strong_sum_curves(gs, f, p, gs.size())?;
    let mut report = ExperimentReport::new("fejer2cc");
    report
        .param("moduli", gs.moduli())
        .param("L", gs.depth())
        .param("p", p)
        .param("function", label);
    report.value("hardy_pth_power", hp);
    for s in curves.iter().skip(1) {
        report.push(Record::info("fejer", s.n as u64, s.fejer));
        report.plot_point(s.n as f64, "fejer", s.fejer);
        report.plot_point(s.n as f64, "riesz", s.riesz);
        if hp > 0.0 {
            report.plot_point(s.n as f64, "fejer-normalized", s.fejer / hp);
        }
    }
    if let Some(last) = curves.last().filter(|_| curves.len() >= 2) {
        report.value("fejer_final", last.fejer);
        report.value("riesz_final", last.riesz);
        if hp > 0.0 {
            report.summary.fitted_constant = Some(last.fejer / hp);
        }
    }
    report.finalize();
    Ok(report)
}

/// Trend of `(1/log n) Σ ‖R_k f‖_{1/2}^{1/2}/k` against `‖f‖_{H_{1/2}}^{1/2}`.
/// Exploratory: no verdict is attached.
pub fn remark1_report(gs: &GroupStructure, f: &DiscreteFunction, label: &str) -> Result<ExperimentReport> {
    let hp = hardy_pth_power(&martingale_from_function(gs, f)?, 0.5);
    let curves = strong_sum_curves(gs, f, 0.5, gs.size())?;
    let mut report = ExperimentReport::new("remark1");
    report
        .param("moduli", gs.moduli())
        .param("L", gs.depth())
        .param("function", label);
    report.value("hardy_half_power", hp);
    for s in curves.iter().skip(1) {
        report.push(Record::info("riesz-half", s.n as u64, s.riesz_half));
        report.plot_point(s.n as f64, "riesz-half", s.riesz_half);
        if hp > 0.0 {
            report.plot_point(s.n as f64, "riesz-half-normalized", s.riesz_half / hp);
        }
    }
    if let Some(last) = curves.last().filter(|_| curves.len() >= 2) {
        report.value("final", last.riesz_half);
    }
    report.finalize();
    Ok(report)
}
