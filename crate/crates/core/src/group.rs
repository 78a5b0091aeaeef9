//! Finite model of a bounded Vilenkin group.
//!
//! A [`GroupStructure`] truncates the generating sequence `m` at depth `L`.
//! Functions on the group are modelled as constant on the `M_L` depth-`L`
//! cosets, which are enumerated by the mixed-radix value `sum_k x_k M_k` of
//! their anchors. Coordinate `x_0` is therefore the least significant digit,
//! and a depth-`n` coset `I_n(x)` is the set of indices congruent to
//! `x mod M_n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;

/// Default cap on `M_L`.
pub const DEFAULT_CAPACITY: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupStructure {
    moduli: Vec<usize>,
    powers: Vec<usize>,
    execution: Execution,
}

/// Builds the depth-`depth` truncation of the group generated by `moduli`.
///
/// `moduli` must supply at least `depth` entries; extra entries are ignored.
pub fn build_group(moduli: &[usize], depth: usize) -> Result<GroupStructure> {
    if moduli.len() < depth {
        return Err(Error::Parameter(format!(
            "generating sequence has {} entries, depth {} requested",
            moduli.len(),
            depth
        )));
    }
    GroupStructure::with_capacity(&moduli[..depth], DEFAULT_CAPACITY)
}

impl GroupStructure {
    /// Group with one level per modulus, capped at [`DEFAULT_CAPACITY`].
    pub fn new(moduli: &[usize]) -> Result<Self> {
        Self::with_capacity(moduli, DEFAULT_CAPACITY)
    }

    pub fn with_capacity(moduli: &[usize], capacity: usize) -> Result<Self> {
        if moduli.is_empty() {
            return Err(Error::Parameter("depth must be at least 1".into()));
        }
        if let Some((index, &modulus)) = moduli.iter().enumerate().find(|(_, &m)| m < 2) {
            return Err(Error::InvalidGeneratingSequence { index, modulus });
        }
        let mut powers = Vec::with_capacity(moduli.len() + 1);
        let mut acc: u128 = 1;
        powers.push(1usize);
        for &m in moduli {
            acc *= m as u128;
            if acc > capacity as u128 {
                return Err(Error::Capacity {
                    requested: acc,
                    limit: capacity,
                });
            }
            powers.push(acc as usize);
        }
        Ok(Self {
            moduli: moduli.to_vec(),
            powers,
            execution: Execution::default(),
        })
    }

    /// Dyadic (Walsh) group of the given depth.
    pub fn walsh(depth: usize) -> Result<Self> {
        Self::new(&vec![2; depth])
    }

    /// Repeats `pattern` until `depth` moduli are collected.
    pub fn periodic(pattern: &[usize], depth: usize) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::Parameter("empty modulus pattern".into()));
        }
        let moduli: Vec<usize> = pattern.iter().copied().cycle().take(depth).collect();
        Self::new(&moduli)
    }

    /// Same group, with loops run according to `execution`.
    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }

    pub fn execution(&self) -> Execution {
        self.execution
    }

    pub fn depth(&self) -> usize {
        self.moduli.len()
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn modulus(&self, k: usize) -> usize {
        self.moduli[k]
    }

    /// Generalized numbers `M_0..=M_L`.
    pub fn powers(&self) -> &[usize] {
        &self.powers
    }

    /// `M_k`.
    pub fn power(&self, k: usize) -> usize {
        self.powers[k]
    }

    /// Number of depth-`L` cosets, `M_L`.
    pub fn size(&self) -> usize {
        *self.powers.last().unwrap()
    }

    pub fn is_dyadic(&self) -> bool {
        self.moduli.iter().all(|&m| m == 2)
    }

    /// Largest modulus (the group is bounded by construction).
    pub fn bound(&self) -> usize {
        self.moduli.iter().copied().max().unwrap_or(2)
    }

    /// The first `depth` levels of this group. `depth == 0` gives the
    /// trivial one-point model.
    pub fn truncate(&self, depth: usize) -> GroupStructure {
        let depth = depth.min(self.depth());
        GroupStructure {
            moduli: self.moduli[..depth].to_vec(),
            powers: self.powers[..=depth].to_vec(),
            execution: self.execution,
        }
    }

    /// Digit expansion of `value` in the `M_k` number system.
    pub fn index(&self, value: usize) -> Result<MixedRadixIndex> {
        if value >= self.size() {
            return Err(Error::Resolution(format!(
                "index {value} needs more than {} levels",
                self.depth()
            )));
        }
        let digits = (0..self.depth()).map(|k| self.digit(value, k)).collect();
        Ok(MixedRadixIndex { value, digits })
    }

    /// Digit `k` of a point or frequency index.
    #[inline]
    pub fn digit(&self, value: usize, k: usize) -> usize {
        (value / self.powers[k]) % self.moduli[k]
    }

    pub fn element(&self, index: usize) -> Result<GroupElement> {
        let idx = self.index(index)?;
        Ok(GroupElement { coords: idx.digits })
    }

    pub fn element_index(&self, x: &GroupElement) -> Result<usize> {
        self.check_element(x)?;
        Ok(x.coords
            .iter()
            .zip(&self.powers)
            .map(|(&c, &p)| c * p)
            .sum())
    }

    fn check_element(&self, x: &GroupElement) -> Result<()> {
        if x.coords.len() != self.depth() {
            return Err(Error::Resolution(format!(
                "element has {} coordinates, group depth is {}",
                x.coords.len(),
                self.depth()
            )));
        }
        if let Some(k) = (0..self.depth()).find(|&k| x.coords[k] >= self.moduli[k]) {
            return Err(Error::Parameter(format!(
                "coordinate {k} = {} out of range for modulus {}",
                x.coords[k], self.moduli[k]
            )));
        }
        Ok(())
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let coords = (0..self.depth())
            .map(|k| (x.coords[k] + y.coords[k]) % self.moduli[k])
            .collect();
        GroupElement { coords }
    }

    pub fn sub(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        let coords = (0..self.depth())
            .map(|k| (x.coords[k] + self.moduli[k] - y.coords[k]) % self.moduli[k])
            .collect();
        GroupElement { coords }
    }

    /// Group subtraction on point indices.
    pub fn sub_index(&self, x: usize, y: usize) -> usize {
        if self.is_dyadic() {
            return x ^ y;
        }
        (0..self.depth())
            .map(|k| {
                let m = self.moduli[k];
                ((self.digit(x, k) + m - self.digit(y, k)) % m) * self.powers[k]
            })
            .sum()
    }

    /// Index of the first nonzero coordinate of point `x`, or `None` for 0.
    pub fn first_nonzero(&self, x: usize) -> Option<usize> {
        (0..self.depth()).find(|&k| self.digit(x, k) != 0)
    }

    /// Basis element `e_k`.
    pub fn basis(&self, k: usize) -> GroupElement {
        let mut coords = vec![0; self.depth()];
        coords[k] = 1;
        GroupElement { coords }
    }
}

/// A point `x = (x_0, ..., x_{L-1})` of the truncated group.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupElement {
    pub coords: Vec<usize>,
}

impl GroupElement {
    pub fn zero(depth: usize) -> Self {
        GroupElement {
            coords: vec![0; depth],
        }
    }
}

/// Integer `n` with its digits `n_j` in the `M_k` number system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedRadixIndex {
    pub value: usize,
    pub digits: Vec<usize>,
}

impl MixedRadixIndex {
    pub fn from_digits(gs: &GroupStructure, digits: &[usize]) -> Result<Self> {
        let x = GroupElement {
            coords: digits.to_vec(),
        };
        let value = gs.element_index(&x)?;
        Ok(Self {
            value,
            digits: digits.to_vec(),
        })
    }

    /// `|n| = max { j : n_j != 0 }`; `None` for `n = 0`.
    pub fn order(&self) -> Option<usize> {
        self.digits.iter().rposition(|&d| d != 0)
    }
}

/// The coset `I_n(x)`; only the first `depth` anchor coordinates matter.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coset {
    pub depth: usize,
    pub anchor: GroupElement,
}

impl Coset {
    /// `I_n(x)` with coordinates past `depth` cleared.
    pub fn new(depth: usize, mut anchor: GroupElement) -> Self {
        for c in anchor.coords.iter_mut().skip(depth) {
            *c = 0;
        }
        Coset { depth, anchor }
    }

    /// `I_n = I_n(0)`.
    pub fn origin(gs: &GroupStructure, depth: usize) -> Self {
        Coset::new(depth, GroupElement::zero(gs.depth()))
    }

    pub fn measure(&self, gs: &GroupStructure) -> f64 {
        1.0 / gs.power(self.depth) as f64
    }

    /// Residue of the anchor modulo `M_depth`; a point lies in the coset iff
    /// its index has the same residue.
    pub fn residue(&self, gs: &GroupStructure) -> usize {
        (0..self.depth)
            .map(|k| self.anchor.coords[k] * gs.power(k))
            .sum()
    }

    pub fn contains(&self, gs: &GroupStructure, point: usize) -> bool {
        point % gs.power(self.depth) == self.residue(gs)
    }

    /// Indices of the depth-`L` points in this coset, ascending.
    pub fn points(&self, gs: &GroupStructure) -> impl Iterator<Item = usize> {
        let step = gs.power(self.depth);
        let r = self.residue(gs);
        (0..gs.size() / step).map(move |q| q * step + r)
    }
}

/// Cosets tiling the complement of `I_n`, grouped as in the standard
/// decomposition: `I_{l+1}(x_k e_k + x_l e_l)` for `k < l < n` with
/// `x_k, x_l != 0`, and `I_n(x_k e_k)` for `k < n`.
pub fn enumerate_complement_partition(gs: &GroupStructure, n: usize) -> Result<Vec<Coset>> {
    if n == 0 || n > gs.depth() {
        return Err(Error::Resolution(format!(
            "partition depth {n} outside 1..={}",
            gs.depth()
        )));
    }
    let depth = gs.depth();
    let mut out = Vec::new();
    for k in 0..n.saturating_sub(1) {
        for xk in 1..gs.modulus(k) {
            for l in k + 1..n {
                for xl in 1..gs.modulus(l) {
                    let mut anchor = GroupElement::zero(depth);
                    anchor.coords[k] = xk;
                    anchor.coords[l] = xl;
                    out.push(Coset::new(l + 1, anchor));
                }
            }
        }
    }
    for k in 0..n {
        for xk in 1..gs.modulus(k) {
            let mut anchor = GroupElement::zero(depth);
            anchor.coords[k] = xk;
            out.push(Coset::new(n, anchor));
        }
    }
    Ok(out)
}

/// Which piece of the complement decomposition a depth-`n` coset falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComplementClass {
    /// `I_n(x_k e_k + x_l e_l + ...)`: first two nonzero coordinates `k < l`.
    Pair { k: usize, l: usize },
    /// `I_n(x_k e_k)`: a single nonzero coordinate below `n`.
    Single { k: usize },
}

/// Classifies the depth-`n` coset with residue `r` (`0 < r < M_n`).
pub fn classify_complement(gs: &GroupStructure, n: usize, r: usize) -> Option<ComplementClass> {
    let mut nonzero = (0..n).filter(|&j| gs.digit(r, j) != 0);
    let k = nonzero.next()?;
    Some(match nonzero.next() {
        Some(l) => ComplementClass::Pair { k, l },
        None => ComplementClass::Single { k },
    })
}
