use super::report::{ExperimentReport, Record, Relation};
use crate::counterexample::{
    check_conditions, divergence_series_terms, series_weight, CounterexampleSpec, Phi, SelectionOptions,
};
use crate::error::{Error, Result};
use crate::group::GroupStructure;

/// Evaluates the construction at every test index of every block and
/// checks the pointwise, weak-type and growth claims.
///
/// Block `k` contributes `Σ_j log^p(j) ‖R_j f‖_p^p Φ(j) / j^{2-2p}` over its
/// test indices. The constant `c` is fitted on block 0 as
/// `contribution_0 / Φ^{1/2}(2^{2α_0})` and every later block must reach
/// `c Φ^{1/2}(2^{2α_k})`; contributions must also increase strictly.
pub fn theorem2_growth(gs: &GroupStructure, spec: &CounterexampleSpec, opts: &SelectionOptions) -> Result<ExperimentReport> {
    if gs.depth() < spec.required_depth() {
        return Err(Error::Resolution(format!(
            "block {} needs depth {}, group has {}",
            spec.levels() - 1,
            spec.required_depth(),
            gs.depth()
        )));
    }
    let mut report = ExperimentReport::new("theorem2");
    report
        .param("L", gs.depth())
        .param("p", spec.p)
        .param("phi", spec.phi.name())
        .param("alphas", &spec.alphas)
        .param("K", spec.levels());
    let conditions = check_conditions(spec, opts);
    report.check(
        "selection-conditions",
        conditions.all_hold(),
        serde_json::to_string(&conditions)?,
    );
    let terms = divergence_series_terms(gs, spec, gs.size())?;
    let mut contributions = vec![0.0f64; spec.levels()];
    for t in &terms {
        let j = t.j as u64;
        report.push(Record::new("pointwise", j, t.pointwise_min, Some(t.pointwise_bound), Relation::AtLeast));
        report.push(Record::new("weak", j, t.weak_witness, Some(t.weak_bound), Relation::AtLeast));
        report.push(Record::new("term", j, t.term, Some(t.term_lower_bound), Relation::AtLeast));
        report.plot_point(t.j as f64, "term", t.term);
        report.plot_point(t.j as f64, "pointwise-margin", t.pointwise_min / t.pointwise_bound);
        contributions[t.block] += t.term;
    }
    let lp_below_weak = terms.iter().filter(|t| t.lp_pth_power < t.weak_witness).count();
    report.check(
        "lp-dominates-weak",
        lp_below_weak == 0,
        format!("{lp_below_weak} indices with ‖R_j f‖_p^p below the weak-type witness"),
    );
    let root_phi: Vec<f64> = spec
        .alphas
        .iter()
        .map(|&a| spec.phi.eval(1u64 << (2 * a)).sqrt())
        .collect();
    let c = contributions[0] / root_phi[0];
    report.summary.fitted_constant = Some(c);
    let mut partial = 0.0;
    for (k, &contrib) in contributions.iter().enumerate() {
        partial += contrib;
        report.value(&format!("block_{k}_contribution"), contrib);
        report.value(&format!("partial_sum_{k}"), partial);
        report.push(Record::new("block", k as u64, contrib, Some(c * root_phi[k]), Relation::AtLeast));
        report.plot_point(k as f64, "block", contrib);
        report.plot_point(k as f64, "partial-sum", partial);
    }
    let increasing = contributions.windows(2).all(|w| w[1] > w[0]);
    report.summary.monotone = Some(increasing);
    report.check(
        "blocks-strictly-increasing",
        increasing,
        format!("block contributions {contributions:?}"),
    );
    report.finalize();
    Ok(report)
}

/// For weights growing at least linearly the weights alone make the series
/// diverge: `log^p(n) Φ(n) / n^{2-2p} >= c n^{2p-1} log^p n`, which is not
/// summable. Records the dyadic block sums `Σ_{2^i < n <= 2^{i+1}}` of the
/// weights and checks that they increase.
pub fn direct_divergence_report(phi: &Phi, p: f64, n_max: usize) -> ExperimentReport {
    let mut report = ExperimentReport::new("theorem2");
    report.param("p", p).param("phi", phi.name()).param("branch", "direct-divergence");
    let mut previous: Option<f64> = None;
    let mut increasing = true;
    let mut partial = 0.0;
    let mut lo = 2usize;
    while 2 * lo <= n_max.max(4) {
        let block: f64 = (lo + 1..=2 * lo).map(|n| series_weight(phi, p, n)).sum();
        partial += block;
        increasing &= previous.is_none_or(|b| block > b);
        let i = lo.trailing_zeros() as u64;
        match previous {
            Some(b) => report.push(Record::new("block-weight", i, block, Some(b), Relation::AtLeast)),
            None => report.push(Record::info("block-weight", i, block)),
        }
        report.plot_point(i as f64, "block-weight", block);
        report.plot_point(i as f64, "partial-sum", partial);
        previous = Some(block);
        lo *= 2;
    }
    report.value("partial_sum", partial);
    report.summary.monotone = Some(increasing);
    report.check("dyadic-blocks-increasing", increasing, "weight sums over (2^i, 2^(i+1)]");
    report.finalize();
    report
}
