//! Range-Doppler ambiguity surfaces.
//!
//! Every variant is "lag product, then transform over the CPI":
//!
//! | variant | lag product          | transform  |
//! |---------|----------------------|------------|
//! | `Eq11`  | `s_surv · conj(ref)` | exact FFT  |
//! | `Eq12a` | `s_surv ⊗ conj(ref)` | NFFT       |
//! | `Eq12b` | `s_surv ⊗ conj(ref)` | exact FFT  |
//! | `Eq12c` | `s_surv · conj(ref)` | NFFT       |
//!
//! Reference samples before the start of the capture are zero. Rows are
//! independent and computed in parallel when the `parallel` feature is on.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{mf_complex_tallied, OpCountReport, OpCounter, OpTally};
use crate::signal::ComplexSignal;
use crate::transforms::{fft_in_place, nfft_in_place, TransformKind, TwiddleTable};

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Eq11,
    Eq12a,
    Eq12b,
    Eq12c,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Eq11, Variant::Eq12a, Variant::Eq12b, Variant::Eq12c];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Eq11 => "eq11",
            Variant::Eq12a => "eq12a",
            Variant::Eq12b => "eq12b",
            Variant::Eq12c => "eq12c",
        }
    }

    pub fn mf_lag(self) -> bool {
        matches!(self, Variant::Eq12a | Variant::Eq12b)
    }

    pub fn transform(self) -> TransformKind {
        match self {
            Variant::Eq11 | Variant::Eq12b => TransformKind::FftExact,
            Variant::Eq12a | Variant::Eq12c => TransformKind::Nfft,
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Contract(format!("unknown variant `{s}` (expected eq11, eq12a, eq12b or eq12c)")))
    }
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmbiguityConfig {
    /// Number of range bins `L`, lags `0..L`.
    pub l_bins: usize,
    /// CPI length `N`, a power of two.
    pub n: usize,
    /// Conjugate the reference in the lag product.
    pub conjugate_ref: bool,
    /// Gain applied to the lag product ahead of an NFFT stage.
    pub transform_input_gain: f64,
}

impl AmbiguityConfig {
    pub fn new(l_bins: usize, n: usize) -> Self {
        Self { l_bins, n, conjugate_ref: true, transform_input_gain: 1.0 }
    }
}

/// Operation counts split by processing stage, summed over rows.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageCounts {
    pub lag: OpCountReport,
    pub transform: OpCountReport,
}

impl StageCounts {
    pub fn total(&self) -> OpCountReport {
        let mut t = self.lag;
        t += self.transform;
        t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguitySurface {
    /// `values[l][p]`.
    pub values: Vec<Vec<Complex64>>,
    pub range_bin_m: f64,
    pub doppler_bin_hz: f64,
    pub variant: Variant,
    pub op_counts: StageCounts,
}

impl AmbiguitySurface {
    pub fn l_bins(&self) -> usize {
        self.values.len()
    }

    pub fn n(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn magnitude(&self, l: usize, p: usize) -> f64 {
        self.values[l][p].norm()
    }

    pub fn magnitudes(&self) -> Vec<Vec<f64>> {
        self.values.iter().map(|row| row.iter().map(|v| v.norm()).collect()).collect()
    }

    /// `(l, p)` of the largest magnitude, first in row-major order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = (0, 0);
        let mut best_mag = f64::NEG_INFINITY;
        for (l, row) in self.values.iter().enumerate() {
            for (p, v) in row.iter().enumerate() {
                let m = v.norm_sqr();
                if m > best_mag {
                    best_mag = m;
                    best = (l, p);
                }
            }
        }
        best
    }

    pub fn max_magnitude(&self) -> f64 {
        let (l, p) = self.argmax();
        self.values.get(l).and_then(|r| r.get(p)).map_or(0.0, |v| v.norm())
    }

    /// Max over Doppler for each range bin.
    pub fn range_cut(&self) -> Vec<f64> {
        self.values
            .iter()
            .map(|row| row.iter().map(|v| v.norm()).fold(0.0, f64::max))
            .collect()
    }

    /// Max over range for each Doppler bin, in internal order `0..N`.
    pub fn doppler_cut(&self) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|p| self.values.iter().map(|row| row[p].norm()).fold(0.0, f64::max))
            .collect()
    }

    /// Doppler cut on the centered axis `(−f_s/2, f_s/2]` as
    /// `(signed bin, Hz, magnitude)`.
    pub fn doppler_cut_centered(&self) -> Vec<(i64, f64, f64)> {
        let n = self.n() as i64;
        let cut = self.doppler_cut();
        (-(n / 2) + 1..=n / 2)
            .map(|p| {
                let idx = p.rem_euclid(n) as usize;
                (p, p as f64 * self.doppler_bin_hz, cut[idx])
            })
            .collect()
    }

    /// Scales every value by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.values {
            for v in row {
                *v *= factor;
            }
        }
        out
    }
}

fn check_lag_inputs(s_surv: &ComplexSignal, s_ref: &ComplexSignal, n: usize, l: usize) -> Result<()> {
    if s_surv.len() < n || s_ref.len() < n {
        return Err(Error::Contract(format!(
            "signals of length {} / {} are shorter than the CPI length {n}",
            s_surv.len(),
            s_ref.len()
        )));
    }
    if l >= s_ref.len() {
        return Err(Error::Contract(format!("lag {l} is not shorter than the reference length {}", s_ref.len())));
    }
    Ok(())
}

#[inline]
fn ref_at(s_ref: &[Complex64], i: usize, l: usize, conjugate: bool) -> Complex64 {
    if i < l {
        Complex64::new(0.0, 0.0)
    } else if conjugate {
        s_ref[i - l].conj()
    } else {
        s_ref[i - l]
    }
}

fn lag_row(surv: &[Complex64], reference: &[Complex64], l: usize, n: usize, mf: bool, conjugate: bool, tally: &mut impl OpTally) -> Vec<Complex64> {
    (0..n)
        .map(|i| {
            let r = ref_at(reference, i, l, conjugate);
            if mf {
                mf_complex_tallied(surv[i], r, tally)
            } else {
                tally.complex_mul();
                surv[i] * r
            }
        })
        .collect()
}

/// `y_l[i] = s_surv[i] · conj(s_ref[i − l])` for `i = 0..n`.
pub fn lag_product_exact(s_surv: &ComplexSignal, s_ref: &ComplexSignal, l: usize, n: usize) -> Result<ComplexSignal> {
    check_lag_inputs(s_surv, s_ref, n, l)?;
    let row = lag_row(s_surv.samples(), s_ref.samples(), l, n, false, true, &mut crate::operator::NoTally);
    ComplexSignal::new(row, s_surv.sample_rate_hz())
}

/// `y_l[i] = s_surv[i] ⊗ conj(s_ref[i − l])` for `i = 0..n`.
pub fn lag_product_mf(s_surv: &ComplexSignal, s_ref: &ComplexSignal, l: usize, n: usize) -> Result<ComplexSignal> {
    check_lag_inputs(s_surv, s_ref, n, l)?;
    let row = lag_row(s_surv.samples(), s_ref.samples(), l, n, true, true, &mut crate::operator::NoTally);
    ComplexSignal::new(row, s_surv.sample_rate_hz())
}

fn compute_row(
    surv: &[Complex64],
    reference: &[Complex64],
    l: usize,
    variant: Variant,
    cfg: &AmbiguityConfig,
    tw: &TwiddleTable,
) -> (Vec<Complex64>, StageCounts) {
    let mut lag_counter = OpCounter::new();
    let mut row = lag_row(surv, reference, l, cfg.n, variant.mf_lag(), cfg.conjugate_ref, &mut lag_counter);
    let mut tf_counter = OpCounter::new();
    match variant.transform() {
        TransformKind::Nfft => {
            if cfg.transform_input_gain != 1.0 {
                for v in &mut row {
                    *v *= cfg.transform_input_gain;
                }
            }
            nfft_in_place(&mut row, tw, &mut tf_counter);
        }
        _ => fft_in_place(&mut row, tw, &mut tf_counter),
    }
    (row, StageCounts { lag: lag_counter.into_report(), transform: tf_counter.into_report() })
}

/// Computes the `L × N` surface of the chosen variant.
pub fn ambiguity(s_surv: &ComplexSignal, s_ref: &ComplexSignal, variant: Variant, cfg: &AmbiguityConfig) -> Result<AmbiguitySurface> {
    if !cfg.n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(cfg.n));
    }
    if cfg.l_bins == 0 {
        return Err(Error::Contract("at least one range bin is required".into()));
    }
    if !(cfg.transform_input_gain.is_finite() && cfg.transform_input_gain > 0.0) {
        return Err(Error::Contract(format!("transform input gain must be positive, got {}", cfg.transform_input_gain)));
    }
    check_lag_inputs(s_surv, s_ref, cfg.n, cfg.l_bins - 1)?;
    let tw = TwiddleTable::new(cfg.n)?;
    let surv = s_surv.samples();
    let reference = s_ref.samples();

    let compute = |l: usize| compute_row(surv, reference, l, variant, cfg, &tw);
    #[cfg(feature = "parallel")]
    let rows: Vec<(Vec<Complex64>, StageCounts)> = {
        use rayon::prelude::*;
        (0..cfg.l_bins).into_par_iter().map(compute).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<(Vec<Complex64>, StageCounts)> = (0..cfg.l_bins).map(compute).collect();

    let mut op_counts = StageCounts::default();
    let mut values = Vec::with_capacity(rows.len());
    for (row, counts) in rows {
        op_counts.lag += counts.lag;
        op_counts.transform += counts.transform;
        values.push(row);
    }
    let fs = s_surv.sample_rate_hz();
    Ok(AmbiguitySurface {
        values,
        range_bin_m: SPEED_OF_LIGHT_M_S / fs,
        doppler_bin_hz: fs / cfg.n as f64,
        variant,
        op_counts,
    })
}

pub fn ambiguity_eq11(s_surv: &ComplexSignal, s_ref: &ComplexSignal, cfg: &AmbiguityConfig) -> Result<AmbiguitySurface> {
    ambiguity(s_surv, s_ref, Variant::Eq11, cfg)
}

pub fn ambiguity_eq12a(s_surv: &ComplexSignal, s_ref: &ComplexSignal, cfg: &AmbiguityConfig) -> Result<AmbiguitySurface> {
    ambiguity(s_surv, s_ref, Variant::Eq12a, cfg)
}

pub fn ambiguity_eq12b(s_surv: &ComplexSignal, s_ref: &ComplexSignal, cfg: &AmbiguityConfig) -> Result<AmbiguitySurface> {
    ambiguity(s_surv, s_ref, Variant::Eq12b, cfg)
}

pub fn ambiguity_eq12c(s_surv: &ComplexSignal, s_ref: &ComplexSignal, cfg: &AmbiguityConfig) -> Result<AmbiguitySurface> {
    ambiguity(s_surv, s_ref, Variant::Eq12c, cfg)
}

/// Computes rows in reverse order on one thread; used to check that row
/// scheduling does not change results.
#[doc(hidden)]
pub fn ambiguity_rows_reversed(s_surv: &ComplexSignal, s_ref: &ComplexSignal, variant: Variant, cfg: &AmbiguityConfig) -> Result<Vec<Vec<Complex64>>> {
    let tw = TwiddleTable::new(cfg.n)?;
    check_lag_inputs(s_surv, s_ref, cfg.n, cfg.l_bins - 1)?;
    let mut rows = vec![Vec::new(); cfg.l_bins];
    for l in (0..cfg.l_bins).rev() {
        rows[l] = compute_row(s_surv.samples(), s_ref.samples(), l, variant, cfg, &tw).0;
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unit_phasors(len: usize, seed: u64) -> ComplexSignal {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s = (0..len).map(|_| Complex64::from_polar(1.0, rng.random_range(-3.0..3.0))).collect();
        ComplexSignal::new(s, 1000.0).unwrap()
    }

    fn delayed(x: &ComplexSignal, d: usize) -> ComplexSignal {
        let s = (0..x.len()).map(|i| if i >= d { x.samples()[i - d] } else { c(0.0, 0.0) }).collect();
        ComplexSignal::new(s, x.sample_rate_hz()).unwrap()
    }

    #[test]
    fn lag_exact_examples() {
        let r = unit_phasors(40, 1);
        let y = lag_product_exact(&r, &r, 0, 32).unwrap();
        assert!(y.samples().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-12));

        let zero = ComplexSignal::new(vec![c(0.0, 0.0); 40], 1000.0).unwrap();
        assert!(lag_product_exact(&zero, &r, 3, 32).unwrap().samples().iter().all(|v| v.norm() == 0.0));

        let surv = delayed(&r, 5);
        let y = lag_product_exact(&surv, &r, 5, 32).unwrap();
        for (i, v) in y.samples().iter().enumerate() {
            let want = if i >= 5 { c(1.0, 0.0) } else { c(0.0, 0.0) };
            assert!((v - want).norm() < 1e-12);
        }
        assert!(lag_product_exact(&r, &r, 40, 32).is_err());
    }

    #[test]
    fn lag_mf_examples() {
        let r = unit_phasors(16, 2);
        let zero = ComplexSignal::new(vec![c(0.0, 0.0); 16], 1000.0).unwrap();
        assert!(lag_product_mf(&zero, &r, 0, 16).unwrap().samples().iter().all(|v| v.norm() == 0.0));

        let ones = ComplexSignal::new(vec![c(1.0, 0.0); 8], 1.0).unwrap();
        assert!(lag_product_mf(&ones, &ones, 0, 8).unwrap().samples().iter().all(|v| *v == c(2.0, 0.0)));

        let surv = ComplexSignal::new(vec![c(1.0, 2.0); 4], 1.0).unwrap();
        let reference = ComplexSignal::new(vec![c(3.0, 1.0); 4], 1.0).unwrap();
        let y = lag_product_mf(&surv, &reference, 1, 4).unwrap();
        assert_eq!(y.samples()[0], c(0.0, 0.0));
        assert_eq!(y.samples()[3], c(7.0, 3.0));
    }

    #[test]
    fn zero_surveillance_gives_zero_surface() {
        let r = unit_phasors(80, 3);
        let zero = ComplexSignal::new(vec![c(0.0, 0.0); 80], 1000.0).unwrap();
        for v in Variant::ALL {
            let s = ambiguity(&zero, &r, v, &AmbiguityConfig::new(8, 64)).unwrap();
            assert!(s.values.iter().flatten().all(|x| x.norm() == 0.0), "{v}");
        }
    }

    #[test]
    fn metadata_and_errors() {
        let r = unit_phasors(80, 4);
        let s = ambiguity_eq11(&r, &r, &AmbiguityConfig::new(8, 64)).unwrap();
        assert_eq!((s.l_bins(), s.n()), (8, 64));
        assert_eq!(s.doppler_bin_hz, 1000.0 / 64.0);
        assert!((s.range_bin_m - SPEED_OF_LIGHT_M_S / 1000.0).abs() < 1e-6);
        assert_eq!(ambiguity_eq11(&r, &r, &AmbiguityConfig::new(8, 48)).unwrap_err(), Error::NotPowerOfTwo(48));
        assert!(ambiguity_eq11(&r, &r, &AmbiguityConfig::new(0, 64)).is_err());
        assert!(ambiguity_eq11(&r, &r, &AmbiguityConfig::new(8, 128)).is_err());
    }

    #[test]
    fn stationary_echo_peaks_at_zero_doppler() {
        let r = unit_phasors(80, 5);
        let surv = delayed(&r, 6);
        let s = ambiguity_eq11(&surv, &r, &AmbiguityConfig::new(12, 64)).unwrap();
        assert_eq!(s.argmax(), (6, 0));
    }

    #[test]
    fn eq12c_matched_row_peaks_at_dc() {
        let r = unit_phasors(80, 6);
        let s = ambiguity_eq12c(&r, &r, &AmbiguityConfig::new(1, 64)).unwrap();
        let row = &s.values[0];
        assert_eq!(crate::transforms::peak_index(row), 0);
    }

    #[test]
    fn stage_counts() {
        let r = unit_phasors(80, 7);
        let cfg = AmbiguityConfig::new(4, 64);
        let a = ambiguity_eq12a(&r, &r, &cfg).unwrap().op_counts;
        assert_eq!(a.total().complex_mul_ops, 0);
        assert_eq!(a.lag.complex_mf_ops, 4 * 64);
        assert_eq!(a.transform.complex_mf_ops, 4 * crate::transforms::nfft_mf_count(64));
        let b = ambiguity_eq12b(&r, &r, &cfg).unwrap().op_counts;
        assert_eq!(b.lag.complex_mul_ops, 0);
        assert_eq!(b.lag.complex_mf_ops, 4 * 64);
        assert_eq!(b.transform.complex_mf_ops, 0);
        let c = ambiguity_eq12c(&r, &r, &cfg).unwrap().op_counts;
        assert_eq!(c.transform.complex_mul_ops, 0);
        assert_eq!(c.lag.complex_mul_ops, 4 * 64);
    }

    #[test]
    fn rows_are_schedule_independent() {
        let r = unit_phasors(100, 8);
        let surv = delayed(&r, 3);
        let cfg = AmbiguityConfig { transform_input_gain: 16.0, ..AmbiguityConfig::new(16, 64) };
        for v in Variant::ALL {
            let s = ambiguity(&surv, &r, v, &cfg).unwrap();
            assert_eq!(s.values, ambiguity_rows_reversed(&surv, &r, v, &cfg).unwrap());
        }
    }

    #[test]
    fn centered_doppler_axis() {
        let r = unit_phasors(80, 9);
        let s = ambiguity_eq11(&r, &r, &AmbiguityConfig::new(2, 8)).unwrap();
        let cut = s.doppler_cut_centered();
        let bins: Vec<i64> = cut.iter().map(|t| t.0).collect();
        assert_eq!(bins, vec![-3, -2, -1, 0, 1, 2, 3, 4]);
        assert_eq!(cut[3].2, s.doppler_cut()[0]);
        assert_eq!(cut[0].2, s.doppler_cut()[5]);
    }

    #[test]
    fn variant_parse() {
        assert_eq!("eq12a".parse::<Variant>().unwrap(), Variant::Eq12a);
        assert!("eq13".parse::<Variant>().is_err());
    }
}
