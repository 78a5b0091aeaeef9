//! Acceptance suite. Runs every criterion at full size, prints one verdict
//! line per criterion and exits non-zero if any criterion fails.
//!
//! Reference values come from oracles written here: digit-by-digit
//! characters, direct summation, and explicit coset membership.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vilenkin::counterexample::{CounterexampleSpec, Phi, SelectionOptions};
use vilenkin::summability::{dirichlet_kernel, dirichlet_kernel_closed_form, KernelSweep};
use vilenkin::verify::{
    check_kernel_l1_bounds, lemma_constants, remark1_report, theorem1_depths, theorem1_ratio, theorem2_growth,
    transform_selftest, ExperimentReport, OutputFormat,
};
use vilenkin::{
    enumerate_complement_partition, forward_transform, inverse_transform, DiscreteFunction, Execution,
    GroupStructure,
};

/// Plateau of `sup_{n <= 4096} ∫|K_n|` on the Walsh group of depth 13.
const FEJER_PLATEAU: f64 = 1.1322185526135204;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

/// Moduli cycling through `pattern`, as long as the product stays within `max_size`.
fn cycled(pattern: &[usize], max_size: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut size = 1;
    for &m in pattern.iter().cycle() {
        if size * m > max_size {
            break;
        }
        size *= m;
        out.push(m);
    }
    out
}

fn digits(moduli: &[usize], mut v: usize) -> Vec<usize> {
    moduli
        .iter()
        .map(|&m| {
            let d = v % m;
            v /= m;
            d
        })
        .collect()
}

/// `ψ_k(x) = exp(2πi Σ_j k_j x_j / m_j)`.
fn oracle_character(moduli: &[usize], k: usize, x: usize) -> Complex64 {
    let (kd, xd) = (digits(moduli, k), digits(moduli, x));
    let turns: f64 = moduli
        .iter()
        .enumerate()
        .map(|(j, &m)| ((kd[j] * xd[j]) % m) as f64 / m as f64)
        .sum();
    let theta = std::f64::consts::TAU * turns.fract();
    Complex64::new(theta.cos(), theta.sin())
}

fn oracle_table(moduli: &[usize], k: usize) -> Vec<Complex64> {
    let size: usize = moduli.iter().product();
    (0..size).map(|x| oracle_character(moduli, k, x)).collect()
}

fn random_function(gs: &GroupStructure, seed: u64) -> DiscreteFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DiscreteFunction::from_fn(gs, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn transform_correctness() -> Outcome {
    let mut groups: Vec<Vec<usize>> = (1..=12).map(|l| vec![2; l]).collect();
    let mixed = cycled(&[2, 3], 4096);
    groups.extend((1..=mixed.len()).map(|l| mixed[..l].to_vec()));
    let mut worst_forward = 0.0f64;
    let mut worst_inverse = 0.0f64;
    for moduli in &groups {
        let gs = GroupStructure::new(moduli).unwrap();
        let f = random_function(&gs, moduli.len() as u64);
        let s = forward_transform(&gs, &f).unwrap();
        let size = gs.size();
        let mut synth = vec![Complex64::new(0.0, 0.0); size];
        for k in 0..size {
            let psi = oracle_table(moduli, k);
            let direct: Complex64 =
                psi.iter().zip(&f.values).map(|(p, v)| v * p.conj()).sum::<Complex64>() / size as f64;
            worst_forward = worst_forward.max((direct - s.coeffs[k]).norm());
            for (acc, p) in synth.iter_mut().zip(&psi) {
                *acc += s.coeffs[k] * p;
            }
        }
        let back = inverse_transform(&gs, &s).unwrap();
        worst_inverse = worst_inverse.max(max_diff(&back.values, &synth));
    }
    let mut worst_roundtrip = 0.0f64;
    for moduli in [vec![2; 20], cycled(&[2, 3], 1 << 20)] {
        let gs = GroupStructure::new(&moduli).unwrap();
        let f = random_function(&gs, 99);
        let back = inverse_transform(&gs, &forward_transform(&gs, &f).unwrap()).unwrap();
        worst_roundtrip = worst_roundtrip.max(back.max_abs_diff(&f));
    }
    outcome(
        worst_forward <= 1e-12 && worst_inverse <= 1e-12 && worst_roundtrip <= 1e-12,
        format!(
            "forward {worst_forward:.2e}, inverse {worst_inverse:.2e} vs direct sums; roundtrip {worst_roundtrip:.2e} at M_L <= 2^20"
        ),
    )
}

fn parseval_orthonormality() -> Outcome {
    let mut worst_parseval = 0.0f64;
    let mut worst_ortho = 0.0f64;
    for moduli in [vec![2; 12], cycled(&[2, 3], 4096)] {
        let gs = GroupStructure::new(&moduli).unwrap();
        let size = gs.size();
        for seed in 0..4 {
            let f = random_function(&gs, seed);
            let s = forward_transform(&gs, &f).unwrap();
            let energy = f.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / size as f64;
            let spectral = s.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>();
            worst_parseval = worst_parseval.max((energy - spectral).abs());
        }
        // The transform of ψ_l holds the inner products <ψ_l, ψ_k>.
        for l in 0..size {
            let psi = DiscreteFunction {
                depth: gs.depth(),
                values: oracle_table(&moduli, l),
            };
            let s = forward_transform(&gs, &psi).unwrap();
            for (k, c) in s.coeffs.iter().enumerate() {
                let expected = if k == l { 1.0 } else { 0.0 };
                worst_ortho = worst_ortho.max((c - Complex64::new(expected, 0.0)).norm());
            }
        }
    }
    outcome(
        worst_parseval <= 1e-10 && worst_ortho <= 1e-10,
        format!("Parseval {worst_parseval:.2e}, orthonormality {worst_ortho:.2e}"),
    )
}

fn walsh_dirichlet_closed_forms() -> Outcome {
    let gs = GroupStructure::walsh(10).unwrap();
    let size = gs.size();
    let mut direct = vec![0.0f64; size];
    let mut worst_closed = 0.0f64;
    let mut worst_sum = 0.0f64;
    for n in 1..size {
        // D_n = Σ_{k<n} w_k with w_k(x) = (-1)^{popcount(k & x)}.
        let k = n - 1;
        for (x, d) in direct.iter_mut().enumerate() {
            *d += if (k & x).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        }
        let closed = dirichlet_kernel_closed_form(&gs, n).unwrap();
        let summed = dirichlet_kernel(&gs, n).unwrap();
        for x in 0..size {
            worst_closed = worst_closed.max((closed.samples.values[x].re - direct[x]).abs());
            worst_sum = worst_sum.max((summed.samples.values[x].re - direct[x]).abs());
        }
    }
    outcome(
        worst_closed <= 1e-11 && worst_sum <= 1e-11,
        format!("closed forms {worst_closed:.2e}, term-by-term {worst_sum:.2e} for n < 1024"),
    )
}

fn abel_identity() -> Outcome {
    let n_max = 512;
    let mut worst_paths = 0.0f64;
    let mut worst_oracle = 0.0f64;
    for moduli in [vec![2; 9], cycled(&[2, 3], 1296)] {
        let gs = GroupStructure::new(&moduli).unwrap();
        let size = gs.size();
        let mut sweep = KernelSweep::on_group(gs.clone());
        let mut dirichlet = vec![Complex64::new(0.0, 0.0); size];
        let mut weighted = vec![Complex64::new(0.0, 0.0); size];
        let mut harmonic = 0.0;
        for n in 1..=n_max {
            sweep.advance();
            let psi = oracle_table(&moduli, n - 1);
            for (d, p) in dirichlet.iter_mut().zip(&psi) {
                *d += p;
            }
            for (w, d) in weighted.iter_mut().zip(&dirichlet) {
                *w += d / n as f64;
            }
            harmonic += 1.0 / n as f64;
            let definition = sweep.riesz_definition();
            let abel = sweep.riesz_abel();
            worst_paths = worst_paths.max(max_diff(&definition, &abel));
            let oracle: Vec<Complex64> = weighted.iter().map(|w| w / harmonic).collect();
            worst_oracle = worst_oracle.max(max_diff(&abel, &oracle));
        }
    }
    outcome(
        worst_paths <= 1e-10 && worst_oracle <= 1e-10,
        format!("definition vs Abel {worst_paths:.2e}, Abel vs direct {worst_oracle:.2e}, n <= {n_max}"),
    )
}

fn complement_partition() -> Outcome {
    let moduli = [2, 3, 4, 2, 3, 4];
    let gs = GroupStructure::new(&moduli).unwrap();
    let size = gs.size();
    let mut bad = 0usize;
    for n in 1..=6 {
        let cosets = enumerate_complement_partition(&gs, n).unwrap();
        let m_n: usize = moduli[..n].iter().product();
        for x in 0..size {
            let xd = digits(&moduli, x);
            let hits = cosets
                .iter()
                .filter(|c| (0..c.depth).all(|j| xd[j] == c.anchor.coords[j]))
                .count();
            let expected = usize::from(x % m_n != 0);
            if hits != expected {
                bad += 1;
            }
        }
    }
    outcome(bad == 0, format!("{bad} points covered the wrong number of times, N = 1..=6"))
}

fn kernel_plateau() -> Outcome {
    let r = check_kernel_l1_bounds(&GroupStructure::walsh(13).unwrap(), 4096).unwrap();
    let full = r.summary.values["fejer_sup"];
    let half = r.summary.values["fejer_sup_half"];
    let plateau = full <= half * 1.05;
    let golden = (full - FEJER_PLATEAU).abs() <= 1e-12 * FEJER_PLATEAU;
    outcome(
        plateau && golden,
        format!("sup {full} over n <= 4096, {half} over n <= 2048; golden {FEJER_PLATEAU}"),
    )
}

fn lemma_stability() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (label, gs) in [
        ("Walsh", GroupStructure::walsh(8).unwrap()),
        ("(2,3,...)", GroupStructure::periodic(&[2, 3], 8).unwrap()),
    ] {
        let r = lemma_constants(&gs, &[3, 4], 3).unwrap();
        passed &= r.passed();
        let v = &r.summary.values;
        for lemma in ["lemma1", "lemma2"] {
            let (c3, c4) = (v[&format!("{lemma}_N3")], v[&format!("{lemma}_N4")]);
            parts.push(format!("{label} {lemma} {c3:.4} -> {c4:.4} ({:+.1}%)", 100.0 * (c4 / c3 - 1.0)));
        }
    }
    outcome(passed, parts.join("; "))
}

fn theorem1_growth() -> Outcome {
    let r = theorem1_depths(&[2], &[8, 10, 12], 1.0 / 3.0, 100, 7).unwrap();
    let v = &r.summary.values;
    let detail = format!(
        "max sums {:.4} / {:.4} / {:.4} at L = 8 / 10 / 12; {}",
        v["max_statement_L8"],
        v["max_statement_L10"],
        v["max_statement_L12"],
        r.summary
            .checks
            .iter()
            .map(|c| format!("{} {}", c.name, if c.passed { "ok" } else { "FAIL" }))
            .collect::<Vec<_>>()
            .join(", ")
    );
    outcome(r.passed(), detail)
}

/// `1 + floor(log2(n + 1))`.
fn oracle_phi(n: u64) -> f64 {
    (64 - (n + 1).leading_zeros()) as f64
}

fn theorem2_construction() -> Outcome {
    let p = 0.25;
    let spec = CounterexampleSpec::new(Phi::log(), p, 2, &SelectionOptions::default()).unwrap();
    // Exponents from plain floating-point evaluation of the three conditions.
    let mass = |a: u32| (2.0 * a as f64 / p).exp2() / oracle_phi(1 << (2 * a)).powf(1.0 / (2.0 * p));
    let pointwise = |a: u32| {
        (2.0 * a as f64 * (1.0 / p - 2.0)).exp2()
            / (128.0 * a as f64)
            / oracle_phi(1 << (2 * a)).powf(1.0 / (2.0 * p))
    };
    let root = |a: u32| oracle_phi(1 << (2 * a)).powf(-0.5);
    let next = (3..=31u32)
        .find(|&a| 2.0 * mass(2) <= pointwise(a) && root(a) < root(2) && root(2) + root(a) <= 2.0)
        .unwrap();
    let expected = vec![2, next];
    let gs = GroupStructure::walsh(spec.required_depth()).unwrap();
    let r = theorem2_growth(&gs, &spec, &SelectionOptions::default()).unwrap();
    let pointwise_records: Vec<_> = r.records.iter().filter(|x| x.series == "pointwise").collect();
    let indices_ok = pointwise_records.iter().all(|x| x.index % 8 == 5);
    let bound_ok = pointwise_records.iter().all(|x| {
        let k = spec.alphas.iter().rposition(|&a| x.index >= 1 << (2 * a)).unwrap();
        let b = pointwise(spec.alphas[k]);
        (x.bound.unwrap() - b).abs() <= 1e-12 * b
    });
    let per_block: Vec<usize> = spec
        .alphas
        .iter()
        .map(|&a| {
            pointwise_records
                .iter()
                .filter(|x| x.index >= 1 << (2 * a) && x.index < 1 << (2 * a + 1))
                .count()
        })
        .collect();
    let check = |name: &str| r.summary.checks.iter().any(|c| c.name == name && c.passed);
    let pointwise_ok = pointwise_records.iter().all(|x| x.pass == Some(true));
    let blocks_ok = r.records.iter().filter(|x| x.series == "block").all(|x| x.pass == Some(true));
    let v = &r.summary.values;
    outcome(
        spec.alphas == expected
            && check("selection-conditions")
            && indices_ok
            && bound_ok
            && per_block.iter().all(|&c| c > 0)
            && pointwise_ok
            && check("blocks-strictly-increasing")
            && blocks_ok,
        format!(
            "alphas {:?} (oracle {expected:?}), depth L = {} (the second block needs 2α+1 levels), \
             {:?} tested indices per block, all pointwise bounds hold: {pointwise_ok}, \
             block contributions {:.5} < {:.5}",
            spec.alphas,
            gs.depth(),
            per_block,
            v["block_0_contribution"],
            v["block_1_contribution"]
        ),
    )
}

fn serialized(r: &ExperimentReport) -> (String, String, String) {
    (r.to_json().unwrap(), r.records_csv().unwrap(), r.plot_csv().unwrap())
}

fn determinism() -> Outcome {
    type Run = Box<dyn Fn(Execution) -> ExperimentReport>;
    let runs: Vec<(&str, Run)> = vec![
        ("transform", Box::new(|e| transform_selftest(&GroupStructure::new(&[2, 3, 4, 5]).unwrap().with_execution(e), 3).unwrap())),
        ("kernels", Box::new(|e| check_kernel_l1_bounds(&GroupStructure::walsh(9).unwrap().with_execution(e), 256).unwrap())),
        ("lemmas", Box::new(|e| lemma_constants(&GroupStructure::periodic(&[2, 3], 6).unwrap().with_execution(e), &[2, 3], 2).unwrap())),
        ("theorem1", Box::new(|e| theorem1_ratio(&GroupStructure::walsh(8).unwrap().with_execution(e), 1.0 / 3.0, 20, 11).unwrap())),
        ("theorem2", Box::new(|e| {
            let spec = CounterexampleSpec::from_alphas(Phi::log(), 0.25, vec![2, 3]).unwrap();
            theorem2_growth(&GroupStructure::walsh(7).unwrap().with_execution(e), &spec, &SelectionOptions::default()).unwrap()
        })),
        ("remark1", Box::new(|e| {
            let gs = GroupStructure::walsh(8).unwrap().with_execution(e);
            remark1_report(&gs, &random_function(&gs, 5), "random").unwrap()
        })),
    ];
    let root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("determinism");
    let mut differing = Vec::new();
    for (name, run) in &runs {
        let a = run(Execution::Parallel);
        let b = run(Execution::Parallel);
        let c = run(Execution::Sequential);
        if serialized(&a) != serialized(&b) || serialized(&a) != serialized(&c) {
            differing.push(name.to_string());
            continue;
        }
        let files: Vec<Vec<Vec<u8>>> = [&a, &b]
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let dir = root.join(format!("{name}-{i}"));
                std::fs::create_dir_all(&dir).unwrap();
                r.write(&dir, OutputFormat::Both)
                    .unwrap()
                    .iter()
                    .map(|p| std::fs::read(p).unwrap())
                    .collect()
            })
            .collect();
        if files[0] != files[1] || files[0].len() != 3 {
            differing.push(format!("{name} (files)"));
        }
    }
    outcome(
        differing.is_empty(),
        if differing.is_empty() {
            format!("{} experiments byte-identical across reruns and sequential/parallel execution", runs.len())
        } else {
            format!("output differs for {}", differing.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(u32, &str, Duration, fn() -> Outcome)> = vec![
        (1, "transform correctness", Duration::from_secs(10), transform_correctness),
        (2, "Parseval and orthonormality", Duration::MAX, parseval_orthonormality),
        (3, "Walsh Dirichlet closed forms", Duration::from_secs(5), walsh_dirichlet_closed_forms),
        (4, "Riesz kernel Abel form", Duration::from_secs(30), abel_identity),
        (5, "complement partition", Duration::MAX, complement_partition),
        (6, "Fejér kernel L1 plateau", Duration::from_secs(60), kernel_plateau),
        (7, "kernel estimate constants", Duration::from_secs(120), lemma_stability),
        (8, "strong Riesz sums over atoms", Duration::from_secs(300), theorem1_growth),
        (9, "counterexample construction", Duration::from_secs(300), theorem2_construction),
        (10, "determinism", Duration::MAX, determinism),
    ];
    let mut failures = 0;
    for (id, name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= limit;
        let passed = o.passed && in_time;
        if !passed {
            failures += 1;
        }
        let budget = if limit == Duration::MAX {
            String::new()
        } else {
            format!(" of {} s", limit.as_secs())
        };
        println!(
            "criterion {id:>2} {} {name}: {} [{:.2} s{budget}]",
            if passed { "PASS" } else { "FAIL" },
            o.detail,
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failures} criteria failed");
        ExitCode::FAILURE
    }
}
