//! Functions on the truncated group, their Vilenkin spectra, and the fast
//! mixed-radix transform between the two.
//!
//! Point indices and frequency indices share the same mixed-radix layout, so
//! the character table factors as a tensor product over the `L` axes and the
//! transform is one length-`m_k` DFT per axis (a Hadamard butterfly when
//! `m_k = 2`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupStructure, MixedRadixIndex};
use crate::par::{self, Execution};

/// Values of a function on the `M_L` depth-`L` cosets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFunction {
    pub depth: usize,
    pub values: Vec<Complex64>,
}

/// Vilenkin-Fourier coefficients `f^(0..M_L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub depth: usize,
    pub coeffs: Vec<Complex64>,
}

impl DiscreteFunction {
    pub fn new(gs: &GroupStructure, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != gs.size() {
            return Err(Error::Resolution(format!(
                "{} samples supplied for {} cosets",
                values.len(),
                gs.size()
            )));
        }
        Ok(Self {
            depth: gs.depth(),
            values,
        })
    }

    pub fn from_real(gs: &GroupStructure, values: &[f64]) -> Result<Self> {
        Self::new(gs, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(gs: &GroupStructure, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            depth: gs.depth(),
            values: (0..gs.size()).map(f).collect(),
        }
    }

    pub fn constant(gs: &GroupStructure, c: Complex64) -> Self {
        Self {
            depth: gs.depth(),
            values: vec![c; gs.size()],
        }
    }

    pub fn zero(gs: &GroupStructure) -> Self {
        Self::constant(gs, Complex64::new(0.0, 0.0))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `∫ f dμ` under the normalized Haar measure.
    pub fn integral(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.values.len() as f64
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DiscreteFunction) -> f64 {
        max_abs_diff(&self.values, &other.values)
    }
}

impl Spectrum {
    pub fn new(gs: &GroupStructure, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != gs.size() {
            return Err(Error::Resolution(format!(
                "{} coefficients supplied for {} frequencies",
                coeffs.len(),
                gs.size()
            )));
        }
        Ok(Self {
            depth: gs.depth(),
            coeffs,
        })
    }

    pub fn unit(gs: &GroupStructure, k: usize) -> Result<Self> {
        let idx = gs.index(k)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); gs.size()];
        coeffs[idx.value] = Complex64::new(1.0, 0.0);
        Ok(Self {
            depth: gs.depth(),
            coeffs,
        })
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Smallest `d` such that every coefficient with index `>= M_d` is
    /// exactly zero. All means of the function are then constant on
    /// depth-`d` cosets.
    pub fn effective_depth(&self, gs: &GroupStructure) -> usize {
        let zero = Complex64::new(0.0, 0.0);
        match self.coeffs.iter().rposition(|&c| c != zero) {
            None => 0,
            Some(last) => (0..=gs.depth())
                .find(|&d| gs.power(d) > last)
                .unwrap_or(gs.depth()),
        }
    }
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `exp(2πi·num/den)`, exact at multiples of a quarter turn.
pub fn unit_root(num: i64, den: usize) -> Complex64 {
    let den_i = den as i64;
    let num = num.rem_euclid(den_i);
    if (4 * num) % den_i == 0 {
        return match 4 * num / den_i {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let theta = std::f64::consts::TAU * num as f64 / den as f64;
    Complex64::new(theta.cos(), theta.sin())
}

/// `ψ_n(x) = Π_k exp(2πi n_k x_k / m_k)`.
pub fn character(gs: &GroupStructure, n: &MixedRadixIndex, x: &GroupElement) -> Result<Complex64> {
    if n.value >= gs.size() || n.digits.iter().skip(gs.depth()).any(|&d| d != 0) {
        return Err(Error::Resolution(format!(
            "character index {} has order beyond depth {}",
            n.value,
            gs.depth()
        )));
    }
    if x.coords.len() != gs.depth() {
        return Err(Error::Resolution("element depth mismatch".into()));
    }
    let mut acc = Complex64::new(1.0, 0.0);
    for k in 0..gs.depth() {
        let m = gs.modulus(k);
        let e = (n.digits.get(k).copied().unwrap_or(0) * x.coords[k]) % m;
        if e != 0 {
            acc *= unit_root(e as i64, m);
        }
    }
    Ok(acc)
}

/// Samples of `ψ_k` at every depth-`L` point, built as a tensor product of
/// per-axis root-of-unity vectors in `O(M_L)`.
pub fn character_samples(gs: &GroupStructure, k: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(gs.size());
    out.push(Complex64::new(1.0, 0.0));
    for axis in 0..gs.depth() {
        let m = gs.modulus(axis);
        let kd = gs.digit(k, axis);
        let len = out.len();
        for x in 1..m {
            let u = unit_root(((kd * x) % m) as i64, m);
            for i in 0..len {
                let v = if kd == 0 { out[i] } else { out[i] * u };
                out.push(v);
            }
        }
    }
    out
}

/// Real samples of the Walsh function `w_k` on a dyadic group of depth `L`.
pub fn walsh_samples(depth: usize, k: usize) -> Vec<f64> {
    (0..1usize << depth)
        .map(|x| walsh_sign(k, x))
        .collect()
}

/// `w_k(x) = (-1)^{popcount(k & x)}`.
#[inline]
pub fn walsh_sign(k: usize, x: usize) -> f64 {
    if (k & x).count_ones() & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `f^(k) = (1/M_L) Σ_x f(x) conj(ψ_k(x))`.
pub fn forward_transform(gs: &GroupStructure, f: &DiscreteFunction) -> Result<Spectrum> {
    if f.depth != gs.depth() || f.values.len() != gs.size() {
        return Err(Error::Resolution(format!(
            "function of depth {} passed to a depth-{} transform",
            f.depth,
            gs.depth()
        )));
    }
    let mut data = f.values.clone();
    apply_axes(gs, &mut data, -1);
    let scale = 1.0 / gs.size() as f64;
    par::for_each_chunk_mut(gs.execution(), &mut data, PAR_GRAIN, |_, c| {
        for v in c {
            *v *= scale;
        }
    });
    Ok(Spectrum {
        depth: gs.depth(),
        coeffs: data,
    })
}

/// `f(x) = Σ_k f^(k) ψ_k(x)`.
pub fn inverse_transform(gs: &GroupStructure, s: &Spectrum) -> Result<DiscreteFunction> {
    if s.depth != gs.depth() || s.coeffs.len() != gs.size() {
        return Err(Error::Resolution(format!(
            "spectrum of depth {} passed to a depth-{} transform",
            s.depth,
            gs.depth()
        )));
    }
    let mut data = s.coeffs.clone();
    apply_axes(gs, &mut data, 1);
    Ok(DiscreteFunction {
        depth: gs.depth(),
        values: data,
    })
}

const PAR_GRAIN: usize = 4096;

fn apply_axes(gs: &GroupStructure, data: &mut [Complex64], sign: i64) {
    let exec = gs.execution();
    for axis in 0..gs.depth() {
        let m = gs.modulus(axis);
        let stride = gs.power(axis);
        let block = gs.power(axis + 1);
        let twiddles: Vec<Complex64> = (0..m).map(|j| unit_root(sign * j as i64, m)).collect();
        if stride >= PAR_GRAIN && exec.is_parallel() {
            for blk in data.chunks_mut(block) {
                axis_block_segmented(exec, blk, stride, m, &twiddles);
            }
        } else {
            let per_chunk = block * PAR_GRAIN.div_ceil(block);
            par::for_each_chunk_mut(exec, data, per_chunk, |_, chunk| {
                let mut buf = vec![Complex64::new(0.0, 0.0); m];
                for blk in chunk.chunks_mut(block) {
                    for r in 0..stride {
                        butterfly(blk, r, stride, m, &twiddles, &mut buf);
                    }
                }
            });
        }
    }
}

#[inline]
fn butterfly(
    blk: &mut [Complex64],
    r: usize,
    stride: usize,
    m: usize,
    twiddles: &[Complex64],
    buf: &mut [Complex64],
) {
    if m == 2 {
        let a = blk[r];
        let b = blk[r + stride];
        blk[r] = a + b;
        blk[r + stride] = a - b;
        return;
    }
    for (j, slot) in buf.iter_mut().enumerate() {
        *slot = blk[r + j * stride];
    }
    for u in 0..m {
        let mut acc = buf[0];
        for (j, &v) in buf.iter().enumerate().skip(1) {
            acc += v * twiddles[(u * j) % m];
        }
        blk[r + u * stride] = acc;
    }
}

// Splits one block into its `m` stride-length segments and processes
// aligned pieces of all segments in parallel.
fn axis_block_segmented(
    exec: Execution,
    blk: &mut [Complex64],
    stride: usize,
    m: usize,
    twiddles: &[Complex64],
) {
    let mut pieces: Vec<Vec<&mut [Complex64]>> = Vec::new();
    for seg in blk.chunks_mut(stride) {
        for (g, piece) in seg.chunks_mut(PAR_GRAIN).enumerate() {
            if pieces.len() <= g {
                pieces.push(Vec::with_capacity(m));
            }
            pieces[g].push(piece);
        }
    }
    par::for_each_owned(exec, pieces, |mut group| {
        let len = group[0].len();
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        for i in 0..len {
            if m == 2 {
                let a = group[0][i];
                let b = group[1][i];
                group[0][i] = a + b;
                group[1][i] = a - b;
                continue;
            }
            for j in 0..m {
                buf[j] = group[j][i];
            }
            for u in 0..m {
                let mut acc = buf[0];
                for j in 1..m {
                    acc += buf[j] * twiddles[(u * j) % m];
                }
                group[u][i] = acc;
            }
        }
    });
}

/// Unnormalized in-place Walsh-Hadamard transform of real data (length a
/// power of two). Applying it twice multiplies by the length.
pub fn fwht_real(exec: Execution, data: &mut [f64]) {
    let n = data.len();
    assert!(n.is_power_of_two(), "fwht length must be a power of two");
    let mut h = 1;
    while h < n {
        if h >= PAR_GRAIN && exec.is_parallel() {
            for blk in data.chunks_mut(2 * h) {
                let (lo, hi) = blk.split_at_mut(h);
                let pairs: Vec<(&mut [f64], &mut [f64])> = lo
                    .chunks_mut(PAR_GRAIN)
                    .zip(hi.chunks_mut(PAR_GRAIN))
                    .collect();
                par::for_each_owned(exec, pairs, |(a, b)| {
                    for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                        let (s, d) = (*x + *y, *x - *y);
                        *x = s;
                        *y = d;
                    }
                });
            }
        } else {
            let per_chunk = (2 * h) * PAR_GRAIN.div_ceil(2 * h);
            par::for_each_chunk_mut(exec, data, per_chunk, |_, chunk| {
                for blk in chunk.chunks_mut(2 * h) {
                    let (lo, hi) = blk.split_at_mut(h);
                    for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                        let (s, d) = (*x + *y, *x - *y);
                        *x = s;
                        *y = d;
                    }
                }
            });
        }
        h *= 2;
    }
}

/// Real Walsh coefficients `(1/M_L) Σ_x f(x) w_k(x)` on a dyadic group.
pub fn walsh_forward_real(gs: &GroupStructure, values: &[f64]) -> Result<Vec<f64>> {
    if !gs.is_dyadic() {
        return Err(Error::UnsupportedGroup(
            "real Walsh path needs all moduli equal to 2".into(),
        ));
    }
    if values.len() != gs.size() {
        return Err(Error::Resolution("sample count mismatch".into()));
    }
    let mut data = values.to_vec();
    fwht_real(gs.execution(), &mut data);
    let scale = 1.0 / gs.size() as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    Ok(data)
}

/// Real synthesis `Σ_k c_k w_k(x)` on a dyadic group.
pub fn walsh_inverse_real(gs: &GroupStructure, coeffs: &[f64]) -> Result<Vec<f64>> {
    if !gs.is_dyadic() {
        return Err(Error::UnsupportedGroup(
            "real Walsh path needs all moduli equal to 2".into(),
        ));
    }
    if coeffs.len() != gs.size() {
        return Err(Error::Resolution("coefficient count mismatch".into()));
    }
    let mut data = coeffs.to_vec();
    fwht_real(gs.execution(), &mut data);
    Ok(data)
}
