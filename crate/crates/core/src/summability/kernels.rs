use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;

use super::{check_order, KernelFunction, KernelKind};
use crate::error::{Error, Result};
use crate::group::GroupStructure;
use crate::transform::{character_samples, DiscreteFunction};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `D_n = Σ_{k<n} ψ_k`, summed term by term.
pub fn dirichlet_kernel(gs: &GroupStructure, n: usize) -> Result<KernelFunction> {
    check_order(gs, n)?;
    let mut acc = vec![ZERO; gs.size()];
    for k in 0..n {
        for (a, v) in acc.iter_mut().zip(character_samples(gs, k)) {
            *a += v;
        }
    }
    Ok(KernelFunction {
        kind: KernelKind::Dirichlet,
        n,
        samples: DiscreteFunction {
            depth: gs.depth(),
            values: acc,
        },
    })
}

/// Walsh Dirichlet kernel from the closed forms
/// `D_{2^k} = 2^k 1_{I_k}` and `D_n = w_n Σ_k n_k (D_{2^{k+1}} - D_{2^k})`.
pub fn dirichlet_kernel_closed_form(gs: &GroupStructure, n: usize) -> Result<KernelFunction> {
    if !gs.is_dyadic() {
        return Err(Error::UnsupportedGroup(
            "closed-form Dirichlet kernels are Walsh only".into(),
        ));
    }
    check_order(gs, n)?;
    let depth = gs.depth();
    // D_{2^k}(x)
    let dyadic = |k: usize, x: usize| -> f64 {
        if x & ((1usize << k) - 1) == 0 {
            (1usize << k) as f64
        } else {
            0.0
        }
    };
    let values = (0..gs.size())
        .map(|x| {
            let v = if n == gs.size() {
                dyadic(depth, x)
            } else {
                let sum: f64 = (0..depth)
                    .filter(|&k| (n >> k) & 1 == 1)
                    .map(|k| dyadic(k + 1, x) - dyadic(k, x))
                    .sum();
                crate::transform::walsh_sign(n, x) * sum
            };
            Complex64::new(v, 0.0)
        })
        .collect();
    Ok(KernelFunction {
        kind: KernelKind::Dirichlet,
        n,
        samples: DiscreteFunction { depth, values },
    })
}

/// `K_n = (1/n) Σ_{k=0}^{n-1} D_k` with `D_0 = 0`.
pub fn fejer_kernel(gs: &GroupStructure, n: usize) -> Result<KernelFunction> {
    check_order(gs, n)?;
    let mut sweep = KernelSweep::on_group(gs.clone());
    while sweep.n() < n {
        sweep.advance();
    }
    Ok(KernelFunction {
        kind: KernelKind::Fejer,
        n,
        samples: DiscreteFunction {
            depth: gs.depth(),
            values: sweep.fejer().to_vec(),
        },
    })
}

/// `L_n = (1/l_n) Σ_{k=1}^n D_k / k`, evaluated from the definition.
pub fn riesz_kernel(gs: &GroupStructure, n: usize) -> Result<KernelFunction> {
    check_order(gs, n)?;
    let mut sweep = KernelSweep::on_group(gs.clone());
    while sweep.n() < n {
        sweep.advance();
    }
    Ok(KernelFunction {
        kind: KernelKind::Riesz,
        n,
        samples: DiscreteFunction {
            depth: gs.depth(),
            values: sweep.riesz_definition(),
        },
    })
}

/// `L_n` through the Abel rearrangement
/// `L_n = (1/l_n) Σ_{j=1}^{n-1} C_j/(j+1) + C_n/l_n`, where
/// `C_j = (1/j) Σ_{k=1}^j D_k = (j+1) K_{j+1} / j` is the Fejér kernel
/// averaged from `D_1`. The rearrangement holds for `C_j`; with the `D_0`
/// averaged form `K_j` it does not.
pub fn riesz_kernel_abel(gs: &GroupStructure, n: usize) -> Result<KernelFunction> {
    check_order(gs, n)?;
    let mut sweep = KernelSweep::on_group(gs.clone());
    while sweep.n() < n {
        sweep.advance();
    }
    Ok(KernelFunction {
        kind: KernelKind::Riesz,
        n,
        samples: DiscreteFunction {
            depth: gs.depth(),
            values: sweep.riesz_abel(),
        },
    })
}

/// Incremental sweep producing `D_n`, `K_n` and both forms of `L_n` for
/// `n = 1, 2, ...` at `O(M)` cost per step.
///
/// [`KernelSweep::new`] works on the shallowest truncation that resolves
/// every kernel up to `n_max`; values there are exact restrictions, and a
/// deeper point `x` reads cell `x mod M_d`.
#[derive(Debug, Clone)]
pub struct KernelSweep {
    group: GroupStructure,
    n: usize,
    dirichlet: Vec<Complex64>,
    dirichlet_sum: Vec<Complex64>,
    fejer: Vec<Complex64>,
    riesz_def: Vec<Complex64>,
    abel: Vec<Complex64>,
    harmonic: f64,
}

impl KernelSweep {
    /// Sweep on the coarsest truncation of `gs` holding all `D_n`, `n <= n_max`.
    pub fn new(gs: &GroupStructure, n_max: usize) -> Result<Self> {
        check_order(gs, n_max)?;
        let depth = (0..=gs.depth())
            .find(|&d| gs.power(d) >= n_max)
            .unwrap_or(gs.depth());
        Ok(Self::on_group(gs.truncate(depth)))
    }

    pub fn on_group(group: GroupStructure) -> Self {
        let size = group.size();
        Self {
            group,
            n: 0,
            dirichlet: vec![ZERO; size],
            dirichlet_sum: vec![ZERO; size],
            fejer: vec![ZERO; size],
            riesz_def: vec![ZERO; size],
            abel: vec![ZERO; size],
            harmonic: 0.0,
        }
    }

    /// Working group (a truncation of the one passed to [`KernelSweep::new`]).
    pub fn group(&self) -> &GroupStructure {
        &self.group
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Moves from `n` to `n + 1`.
    pub fn advance(&mut self) {
        let n = self.n;
        assert!(n < self.group.size(), "kernel sweep past resolution");
        let next = (n + 1) as f64;
        let psi = character_samples(&self.group, n);
        let prev = n.max(1) as f64;
        for i in 0..psi.len() {
            if n >= 1 {
                self.abel[i] += (self.dirichlet_sum[i] + self.dirichlet[i]) / (prev * next);
            }
            self.dirichlet_sum[i] += self.dirichlet[i];
            self.dirichlet[i] += psi[i];
            self.fejer[i] = self.dirichlet_sum[i] / next;
            self.riesz_def[i] += self.dirichlet[i] / next;
        }
        self.harmonic += 1.0 / next;
        self.n = n + 1;
    }

    pub fn harmonic(&self) -> f64 {
        self.harmonic
    }

    pub fn dirichlet(&self) -> &[Complex64] {
        &self.dirichlet
    }

    pub fn fejer(&self) -> &[Complex64] {
        &self.fejer
    }

    pub fn riesz_definition(&self) -> Vec<Complex64> {
        self.riesz_def.iter().map(|v| v / self.harmonic).collect()
    }

    /// `C_n = (1/n) Σ_{k=1}^n D_k`.
    pub fn cesaro(&self) -> Vec<Complex64> {
        let n = self.n.max(1) as f64;
        self.dirichlet_sum
            .iter()
            .zip(&self.dirichlet)
            .map(|(s, d)| (s + d) / n)
            .collect()
    }

    pub fn riesz_abel(&self) -> Vec<Complex64> {
        self.abel
            .iter()
            .zip(self.cesaro())
            .map(|(a, c)| (a + c) / self.harmonic)
            .collect()
    }
}

/// Memoized kernels for one group.
#[derive(Debug)]
pub struct KernelCache {
    group: GroupStructure,
    entries: Mutex<HashMap<(KernelKind, usize), Arc<KernelFunction>>>,
}

impl KernelCache {
    pub fn new(group: GroupStructure) -> Self {
        Self {
            group,
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn group(&self) -> &GroupStructure {
        &self.group
    }

    pub fn get(&self, kind: KernelKind, n: usize) -> Result<Arc<KernelFunction>> {
        if let Some(k) = self.entries.lock().unwrap().get(&(kind, n)) {
            return Ok(Arc::clone(k));
        }
        let kernel = Arc::new(match kind {
            KernelKind::Dirichlet => dirichlet_kernel(&self.group, n)?,
            KernelKind::Fejer => fejer_kernel(&self.group, n)?,
            KernelKind::Riesz => riesz_kernel(&self.group, n)?,
        });
        let mut entries = self.entries.lock().unwrap();
        Ok(Arc::clone(entries.entry((kind, n)).or_insert(kernel)))
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
