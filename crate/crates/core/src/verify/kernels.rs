use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{ExperimentReport, Record, Relation};
use crate::error::Result;
use crate::group::GroupStructure;
use crate::summability::{check_order, KernelSweep};
use crate::transform::{character_samples, forward_transform, inverse_transform, DiscreteFunction};

/// Largest group on which the self-test also runs the `O(M²)` definition.
pub const DIRECT_TRANSFORM_LIMIT: usize = 4096;

/// Relative plateau tolerance for the running supremum of kernel norms.
pub const PLATEAU_TOLERANCE: f64 = 0.05;

fn group_params(report: &mut ExperimentReport, gs: &GroupStructure) {
    report.param("moduli", gs.moduli()).param("L", gs.depth());
}

/// Fast transform against the definition, roundtrip and Parseval on a
/// seeded random function.
pub fn transform_selftest(gs: &GroupStructure, seed: u64) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("transform");
    group_params(&mut report, gs);
    report.param("seed", seed);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = DiscreteFunction::from_fn(gs, |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let s = forward_transform(gs, &f)?;
    if gs.size() <= DIRECT_TRANSFORM_LIMIT {
        let size = gs.size() as f64;
        let mut err = 0.0f64;
        for (k, c) in s.coeffs.iter().enumerate() {
            let direct: Complex64 = character_samples(gs, k)
                .iter()
                .zip(&f.values)
                .map(|(psi, v)| v * psi.conj())
                .sum::<Complex64>()
                / size;
            err = err.max((direct - c).norm());
        }
        report.push(Record::new("forward-vs-definition", 0, err, Some(1e-12), Relation::AtMost));
    }
    let back = inverse_transform(gs, &s)?;
    report.push(Record::new(
        "roundtrip",
        0,
        back.max_abs_diff(&f),
        Some(1e-12),
        Relation::AtMost,
    ));
    let energy = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / gs.size() as f64;
    report.push(Record::new(
        "parseval",
        0,
        (s.energy() - energy).abs(),
        Some(1e-10),
        Relation::AtMost,
    ));
    report.finalize();
    Ok(report)
}

/// `∫|K_n|` and `∫|L_n|` for `n <= n_max`, with the running suprema.
///
/// Kernels are integrated on the coarsest truncation that resolves them,
/// where the cell average is the exact integral.
pub fn check_kernel_l1_bounds(gs: &GroupStructure, n_max: usize) -> Result<ExperimentReport> {
    check_order(gs, n_max)?;
    let mut report = ExperimentReport::new("kernels");
    group_params(&mut report, gs);
    report.param("n_max", n_max);
    let mut sweep = KernelSweep::new(gs, n_max)?;
    let cells = sweep.group().size() as f64;
    let (mut sup_k, mut sup_l) = (0.0f64, 0.0f64);
    let (mut half_k, mut half_l) = (0.0f64, 0.0f64);
    for n in 1..=n_max {
        sweep.advance();
        let k1 = sweep.fejer().iter().map(|v| v.norm()).sum::<f64>() / cells;
        let l1 = sweep.riesz_definition().iter().map(|v| v.norm()).sum::<f64>() / cells;
        sup_k = sup_k.max(k1);
        sup_l = sup_l.max(l1);
        if n <= n_max / 2 {
            half_k = sup_k;
            half_l = sup_l;
        }
        report.push(Record::info("fejer-l1", n as u64, k1));
        report.push(Record::new("riesz-l1", n as u64, l1, Some(1.0), Relation::AtLeast));
        report.plot_point(n as f64, "fejer-l1", k1);
        report.plot_point(n as f64, "riesz-l1", l1);
        report.plot_point(n as f64, "fejer-running-sup", sup_k);
        report.plot_point(n as f64, "riesz-running-sup", sup_l);
    }
    report.value("fejer_sup", sup_k);
    report.value("riesz_sup", sup_l);
    report.value("fejer_sup_half", half_k);
    report.value("riesz_sup_half", half_l);
    report.summary.fitted_constant = Some(sup_k);
    if n_max >= 256 {
        for (name, full, half) in [("fejer-plateau", sup_k, half_k), ("riesz-plateau", sup_l, half_l)] {
            report.check(
                name,
                full <= half * (1.0 + PLATEAU_TOLERANCE),
                format!("sup up to n_max = {full}, up to n_max/2 = {half}"),
            );
        }
    }
    report.finalize();
    Ok(report)
}
