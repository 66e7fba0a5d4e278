//! Exact DFT/FFT references and the two multiplication-free transforms.
//!
//! * [`ndft`]: the DFT matrix-vector product with every element product
//!   replaced by complex `⊗`, unity entries included. `N²` complex `⊗`.
//! * [`nfft`]: the radix-2 decimation-in-time flow graph with every twiddle
//!   product replaced by complex `⊗`. Both outputs of a butterfly apply `⊗`
//!   (`W^k` and `W^{k+N/2}` alike) and the bottom stage is the literal
//!   2-point NDFT (four `⊗`, unity entries included), so that `nfft` and
//!   `ndft` coincide at `N = 2`.
//!   The cost is [`nfft_mf_count`] `= N·log₂N + N` complex `⊗`.
//!
//! Additions that combine butterfly branches stay ordinary additions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{mf_complex_tallied, NoTally, OpCountReport, OpCounter, OpTally};
use crate::signal::ComplexSignal;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformKind {
    DftExact,
    FftExact,
    Ndft,
    Nfft,
}

impl TransformKind {
    pub fn needs_power_of_two(self) -> bool {
        matches!(self, TransformKind::FftExact | TransformKind::Nfft)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub kind: TransformKind,
    pub op_counts: OpCountReport,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.bins.iter().map(|b| b.norm()).collect()
    }

    /// Bin with the largest magnitude; ties go to the smallest index.
    pub fn peak_index(&self) -> usize {
        peak_index(&self.bins)
    }
}

/// `argmax_k |bins[k]|`, smallest `k` on ties, `0` for an empty slice.
pub fn peak_index(bins: &[Complex64]) -> usize {
    let mut best = 0;
    let mut best_mag = f64::NEG_INFINITY;
    for (k, b) in bins.iter().enumerate() {
        let mag = b.norm_sqr();
        if mag > best_mag {
            best = k;
            best_mag = mag;
        }
    }
    best
}

/// `W_N^m = e^{−j2πm/N}` for `m = 0..N`.
///
/// Entries come from the closed form on the first quadrant and exact
/// quarter-turn symmetries elsewhere, so `W^0`, `W^{N/4}`, `W^{N/2}` and
/// `W^{3N/4}` have exact zero components and `W^{m+N/2} = −W^m` bit-for-bit.
/// A stray `1e−16` imaginary part would flip `⊗` sign decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct TwiddleTable {
    entries: Vec<Complex64>,
}

impl TwiddleTable {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Empty("twiddle table size"));
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); n];
        if n.is_multiple_of(4) {
            let q = n / 4;
            for m in 0..q {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                let (c, s) = if m == 0 { (1.0, 0.0) } else { (theta.cos(), -theta.sin()) };
                entries[m] = Complex64::new(c, s);
                entries[m + q] = Complex64::new(s, -c);
                entries[m + 2 * q] = Complex64::new(-c, -s);
                entries[m + 3 * q] = Complex64::new(-s, c);
            }
        } else if n.is_multiple_of(2) {
            let h = n / 2;
            for m in 0..h {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                let w = if m == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(theta.cos(), -theta.sin()) };
                entries[m] = w;
                entries[m + h] = -w;
            }
        } else {
            for (m, e) in entries.iter_mut().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / n as f64;
                *e = if m == 0 { Complex64::new(1.0, 0.0) } else { Complex64::new(theta.cos(), -theta.sin()) };
            }
        }
        Ok(Self { entries })
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// `W_N^m` for any `m`, reduced mod `N`.
    #[inline]
    pub fn get(&self, m: usize) -> Complex64 {
        self.entries[m % self.entries.len()]
    }
}

fn require_power_of_two(n: usize) -> Result<()> {
    if n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::NotPowerOfTwo(n))
    }
}

/// Analytic complex `⊗` count of [`ndft`].
pub fn ndft_mf_count(n: usize) -> u64 {
    (n as u64) * (n as u64)
}

/// Analytic complex `⊗` count of [`nfft`]: `(N/2)·log₂N` butterflies, four
/// `⊗` each in the bottom 2-point stage and two in every later stage, i.e.
/// `2N + N(log₂N − 1) = N·log₂N + N`. `N = 1` is a single `1 ⊗ x`.
pub fn nfft_mf_count(n: usize) -> u64 {
    let n = n as u64;
    n * (n.trailing_zeros() as u64) + n
}

pub fn fft_butterfly_count(n: usize) -> u64 {
    (n as u64 / 2) * n.trailing_zeros() as u64
}

pub fn dft_exact(x: &ComplexSignal) -> Spectrum {
    let n = x.len();
    let tw = TwiddleTable::new(n).expect("signal is non-empty");
    let mut counter = OpCounter::new();
    let bins = dft_exact_with(x.samples(), &tw, &mut counter);
    Spectrum { bins, kind: TransformKind::DftExact, op_counts: counter.into_report() }
}

pub(crate) fn dft_exact_with(x: &[Complex64], tw: &TwiddleTable, tally: &mut impl OpTally) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                tally.complex_mul();
                acc += v * tw.get(k * i);
            }
            tally.adds(2 * (n as u64 - 1));
            acc
        })
        .collect()
}

pub fn fft_exact(x: &ComplexSignal) -> Result<Spectrum> {
    let n = x.len();
    require_power_of_two(n)?;
    let tw = TwiddleTable::new(n)?;
    let mut counter = OpCounter::new();
    let mut bins = x.samples().to_vec();
    fft_in_place(&mut bins, &tw, &mut counter);
    Ok(Spectrum { bins, kind: TransformKind::FftExact, op_counts: counter.into_report() })
}

pub fn ndft(x: &ComplexSignal) -> Spectrum {
    let tw = TwiddleTable::new(x.len()).expect("signal is non-empty");
    let mut counter = OpCounter::new();
    let bins = ndft_with(x.samples(), &tw, &mut counter);
    Spectrum { bins, kind: TransformKind::Ndft, op_counts: counter.into_report() }
}

/// `X[k] = Σ_n W^{kn} ⊗ x[n]` by direct double loop.
pub(crate) fn ndft_with(x: &[Complex64], tw: &TwiddleTable, tally: &mut impl OpTally) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, &v) in x.iter().enumerate() {
                acc += mf_complex_tallied(tw.get(k * i), v, tally);
            }
            tally.adds(2 * (n as u64 - 1));
            acc
        })
        .collect()
}

/// The explicit `N×N` matrix `[W^{kn}]` of the DFT, row-major.
pub fn dft_matrix(n: usize) -> Result<Vec<Vec<Complex64>>> {
    let tw = TwiddleTable::new(n)?;
    Ok((0..n).map(|k| (0..n).map(|i| tw.get(k * i)).collect()).collect())
}

/// `M ⊙ x`: each output is the complex vector product of a matrix row with `x`.
pub fn mf_matvec(matrix: &[Vec<Complex64>], x: &[Complex64], tally: &mut impl OpTally) -> Result<Vec<Complex64>> {
    matrix
        .iter()
        .map(|row| {
            if row.len() != x.len() {
                return Err(Error::LengthMismatch { left: row.len(), right: x.len() });
            }
            let mut acc = Complex64::new(0.0, 0.0);
            for (&w, &v) in row.iter().zip(x) {
                acc += mf_complex_tallied(w, v, tally);
            }
            tally.adds(2 * (x.len() as u64).saturating_sub(1));
            Ok(acc)
        })
        .collect()
}

pub fn nfft(x: &ComplexSignal) -> Result<Spectrum> {
    let n = x.len();
    require_power_of_two(n)?;
    let tw = TwiddleTable::new(n)?;
    let mut counter = OpCounter::new();
    let mut bins = x.samples().to_vec();
    nfft_in_place(&mut bins, &tw, &mut counter);
    Ok(Spectrum { bins, kind: TransformKind::Nfft, op_counts: counter.into_report() })
}

fn bit_reverse_permute(data: &mut [Complex64]) {
    let n = data.len();
    let bits = n.trailing_zeros();
    if bits == 0 {
        return;
    }
    for i in 0..n {
        let j = i.reverse_bits() >> (usize::BITS - bits);
        if j > i {
            data.swap(i, j);
        }
    }
}

/// Iterative radix-2 DIT. `data.len()` must be a power of two equal to the
/// table size.
pub(crate) fn fft_in_place(data: &mut [Complex64], tw: &TwiddleTable, tally: &mut impl OpTally) {
    let n = data.len();
    debug_assert_eq!(n, tw.size());
    bit_reverse_permute(data);
    let mut size = 2;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for block in data.chunks_exact_mut(size) {
            let (lo, hi) = block.split_at_mut(half);
            for k in 0..half {
                tally.complex_mul();
                let t = tw.get(k * stride) * hi[k];
                let e = lo[k];
                lo[k] = e + t;
                hi[k] = e - t;
            }
            tally.adds(4 * half as u64);
        }
        size *= 2;
    }
}

/// Same flow graph as [`fft_in_place`] with every twiddle product through
/// `⊗`.
pub(crate) fn nfft_in_place(data: &mut [Complex64], tw: &TwiddleTable, tally: &mut impl OpTally) {
    let n = data.len();
    debug_assert_eq!(n, tw.size());
    bit_reverse_permute(data);
    let one = tw.get(0);
    if n == 1 {
        data[0] = mf_complex_tallied(one, data[0], tally);
        return;
    }
    // Bottom stage: the literal 2-point NDFT, four `⊗` per pair.
    let minus_one = tw.get(n / 2);
    for pair in data.chunks_exact_mut(2) {
        let (a, b) = (pair[0], pair[1]);
        pair[0] = mf_complex_tallied(one, a, tally) + mf_complex_tallied(one, b, tally);
        pair[1] = mf_complex_tallied(one, a, tally) + mf_complex_tallied(minus_one, b, tally);
    }
    tally.adds(2 * n as u64);
    let mut size = 4;
    while size <= n {
        let half = size / 2;
        let stride = n / size;
        for block in data.chunks_exact_mut(size) {
            let (lo, hi) = block.split_at_mut(half);
            for k in 0..half {
                let e = lo[k];
                let o = hi[k];
                lo[k] = e + mf_complex_tallied(tw.get(k * stride), o, tally);
                hi[k] = e + mf_complex_tallied(tw.get((k + half) * stride), o, tally);
            }
            tally.adds(4 * half as u64);
        }
        size *= 2;
    }
}


pub fn transform(kind: TransformKind, x: &ComplexSignal) -> Result<Spectrum> {
    match kind {
        TransformKind::DftExact => Ok(dft_exact(x)),
        TransformKind::FftExact => fft_exact(x),
        TransformKind::Ndft => Ok(ndft(x)),
        TransformKind::Nfft => nfft(x),
    }
}

#[allow(dead_code)]
pub(crate) fn nfft_uncounted(x: &[Complex64]) -> Vec<Complex64> {
    let tw = TwiddleTable::new(x.len()).expect("non-empty");
    let mut data = x.to_vec();
    nfft_in_place(&mut data, &tw, &mut NoTally);
    data
}
