//! Passive bistatic radar scene synthesis: a stereo FM illuminator, point
//! obstacles with integer-sample bistatic delays, and additive noise.
//!
//! The serde types mirror the scenario JSON document; every physical unit
//! is spelled out in the key name.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::ambiguity::{AmbiguityConfig, SPEED_OF_LIGHT_M_S};
use crate::error::{Error, Result};
use crate::signal::ComplexSignal;

pub const PILOT_HZ: f64 = 19_000.0;

fn default_fs() -> f64 {
    200_000.0
}
fn default_kf() -> f64 {
    0.25
}
fn default_n() -> usize {
    4096
}
fn default_l_bins() -> usize {
    64
}
fn default_surv_gain() -> f64 {
    64.0
}
fn default_transform_gain() -> f64 {
    16.0
}
fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StereoFmConfig {
    #[serde(default = "default_fs")]
    pub fs_hz: f64,
    /// Defaults to `n + l_bins` of the enclosing scenario.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_samples: Option<usize>,
    #[serde(default = "default_kf")]
    pub kf: f64,
    pub seed: u64,
}

impl StereoFmConfig {
    pub fn new(duration_samples: usize, seed: u64) -> Self {
        Self { fs_hz: default_fs(), duration_samples: Some(duration_samples), kf: default_kf(), seed }
    }
}

/// Stereo multiplex message and unit-modulus baseband FM.
///
/// `m = 0.9(x₁+x₂) + 0.5(x₁−x₂)cos(2π·2f_p t) + 0.25cos(2π·3f_p t) + 0.1cos(2π f_p t)`
/// with `x₁, x₂` i.i.d. uniform on `(−1, 1)` per sample, and
/// `s = cos(2πk_f m) + j sin(2πk_f m)`.
pub fn gen_stereo_fm(cfg: &StereoFmConfig, len: usize) -> Result<ComplexSignal> {
    // Highest message tone is the 3·f_p component; it must sit below Nyquist.
    if !(cfg.fs_hz.is_finite() && cfg.fs_hz > 2.0 * 3.0 * PILOT_HZ) {
        return Err(Error::Contract(format!("fm.fs_hz = {} must exceed {} Hz", cfg.fs_hz, 6.0 * PILOT_HZ)));
    }
    if !cfg.kf.is_finite() {
        return Err(Error::NonFinite { what: "fm.kf", value: cfg.kf });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let tau = 2.0 * std::f64::consts::PI;
    let samples = (0..len)
        .map(|i| {
            let t = i as f64 / cfg.fs_hz;
            let x1: f64 = rng.random_range(-1.0..1.0);
            let x2: f64 = rng.random_range(-1.0..1.0);
            let m = 0.9 * (x1 + x2)
                + 0.5 * (x1 - x2) * (tau * 2.0 * PILOT_HZ * t).cos()
                + 0.25 * (tau * 3.0 * PILOT_HZ * t).cos()
                + 0.1 * (tau * PILOT_HZ * t).cos();
            let phase = tau * cfg.kf * m;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect();
    ComplexSignal::new(samples, cfg.fs_hz)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub x_km: f64,
    pub y_km: f64,
    /// Zero for clutter.
    pub doppler_hz: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude_re: f64,
    #[serde(default)]
    pub amplitude_im: f64,
}

impl Obstacle {
    pub fn target(x_km: f64, y_km: f64, doppler_hz: f64) -> Self {
        Self { x_km, y_km, doppler_hz, amplitude_re: 1.0, amplitude_im: 0.0 }
    }

    pub fn clutter(x_km: f64, y_km: f64) -> Self {
        Self::target(x_km, y_km, 0.0)
    }

    pub fn is_clutter(&self) -> bool {
        self.doppler_hz == 0.0
    }

    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.amplitude_re, self.amplitude_im)
    }
}

/// Transmitter → obstacle → receiver path length in metres.
pub fn bistatic_path_m(tx_km: [f64; 2], rx_km: [f64; 2], obstacle: &Obstacle) -> f64 {
    let d = |a: [f64; 2]| ((a[0] - obstacle.x_km).powi(2) + (a[1] - obstacle.y_km).powi(2)).sqrt();
    (d(tx_km) + d(rx_km)) * 1000.0
}

/// `round(path / c · f_s)`.
pub fn bistatic_delay_bins(tx_km: [f64; 2], rx_km: [f64; 2], obstacle: &Obstacle, fs_hz: f64) -> usize {
    (bistatic_path_m(tx_km, rx_km, obstacle) / SPEED_OF_LIGHT_M_S * fs_hz).round() as usize
}

/// `round(f_d · N / f_s) mod N`.
pub fn doppler_bin(doppler_hz: f64, n: usize, fs_hz: f64) -> usize {
    ((doppler_hz * n as f64 / fs_hz).round() as i64).rem_euclid(n as i64) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    Awgn,
    EpsContaminated,
}

/// Noise block of the scenario document. Which optional keys are required
/// depends on `kind`; see [`NoiseModel::validate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub snr_db: Option<f64>,
    /// Weight of the narrow `sigma1` component.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, snr_db: None, eps: None, sigma1: None, sigma2: None, seed: 0 }
    }

    pub fn awgn(snr_db: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::Awgn, snr_db: Some(snr_db), ..Self::none() }.with_seed(seed)
    }

    pub fn contaminated(eps: f64, sigma1: f64, sigma2: f64, seed: u64) -> Self {
        Self { kind: NoiseKind::EpsContaminated, eps: Some(eps), sigma1: Some(sigma1), sigma2: Some(sigma2), ..Self::none() }
            .with_seed(seed)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let need = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| Error::Contract(format!("noise.{key} is required for this noise kind")))
        };
        match self.kind {
            NoiseKind::None => Ok(()),
            NoiseKind::Awgn => {
                let snr = need(self.snr_db, "snr_db")?;
                if snr.is_nan() {
                    return Err(Error::Contract("noise.snr_db must be a number".into()));
                }
                Ok(())
            }
            NoiseKind::EpsContaminated => {
                let eps = need(self.eps, "eps")?;
                let s1 = need(self.sigma1, "sigma1")?;
                let s2 = need(self.sigma2, "sigma2")?;
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::Contract(format!("noise.eps = {eps} must lie in [0, 1]")));
                }
                for (v, key) in [(s1, "sigma1"), (s2, "sigma2")] {
                    if !(v.is_finite() && v > 0.0) {
                        return Err(Error::Contract(format!("noise.{key} = {v} must be positive")));
                    }
                }
                Ok(())
            }
        }
    }

    /// Short label used in table rows, e.g. `awgn 3 dB`.
    pub fn label(&self) -> String {
        match self.kind {
            NoiseKind::None => "none".into(),
            NoiseKind::Awgn => format!("awgn {} dB", self.snr_db.unwrap_or(f64::INFINITY)),
            NoiseKind::EpsContaminated => format!(
                "eps. cont. eps={} sigma1={} sigma2={}",
                self.eps.unwrap_or(0.0),
                self.sigma1.unwrap_or(0.0),
                self.sigma2.unwrap_or(0.0)
            ),
        }
    }

    pub fn apply(&self, x: &ComplexSignal) -> Result<ComplexSignal> {
        self.validate()?;
        match self.kind {
            NoiseKind::None => Ok(x.clone()),
            NoiseKind::Awgn => add_awgn(x, self.snr_db.unwrap_or(f64::INFINITY), self.seed),
            NoiseKind::EpsContaminated => add_contaminated(
                x,
                self.eps.unwrap_or(1.0),
                self.sigma1.unwrap_or(1.0),
                self.sigma2.unwrap_or(1.0),
                self.seed,
            ),
        }
    }
}

pub fn mean_power(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>() / x.len().max(1) as f64
}

/// Circular complex Gaussian noise at the requested SNR against the
/// empirical power of `x`. `+∞` leaves `x` untouched.
pub fn add_awgn(x: &ComplexSignal, snr_db: f64, seed: u64) -> Result<ComplexSignal> {
    if snr_db == f64::INFINITY {
        return Ok(x.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::Contract(format!("snr_db = {snr_db} is not usable")));
    }
    let power = mean_power(x.samples());
    if power == 0.0 {
        return Err(Error::Contract("cannot set an SNR against a zero-power signal".into()));
    }
    let noise_power = power / 10f64.powf(snr_db / 10.0);
    let normal = Normal::new(0.0, (noise_power / 2.0).sqrt()).expect("finite std");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = x
        .samples()
        .iter()
        .map(|&v| {
            let re = normal.sample(&mut rng);
            let im = normal.sample(&mut rng);
            v + Complex64::new(re, im)
        })
        .collect();
    ComplexSignal::new(samples, x.sample_rate_hz())
}

/// Two-component Gaussian mixture, drawn independently for the real and
/// imaginary parts: `N(0, σ₁²)` with probability `eps`, else `N(0, σ₂²)`.
pub fn add_contaminated(x: &ComplexSignal, eps: f64, sigma1: f64, sigma2: f64, seed: u64) -> Result<ComplexSignal> {
    NoiseModel::contaminated(eps, sigma1, sigma2, seed).validate()?;
    let narrow = Normal::new(0.0, sigma1).expect("validated");
    let wide = Normal::new(0.0, sigma2).expect("validated");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        if u < eps {
            narrow.sample(rng)
        } else {
            wide.sample(rng)
        }
    };
    let samples = x
        .samples()
        .iter()
        .map(|&v| {
            let re = draw(&mut rng);
            let im = draw(&mut rng);
            v + Complex64::new(re, im)
        })
        .collect();
    ComplexSignal::new(samples, x.sample_rate_hz())
}

/// Complete scene description; serializes to the scenario JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub fm: StereoFmConfig,
    pub tx_km: [f64; 2],
    pub rx_km: [f64; 2],
    pub obstacles: Vec<Obstacle>,
    pub noise: NoiseModel,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_l_bins")]
    pub l_bins: usize,
    #[serde(default = "default_surv_gain")]
    pub surv_gain: f64,
    #[serde(default = "default_transform_gain")]
    pub transform_input_gain: f64,
}

/// True location of one obstacle on the surface grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrueBin {
    pub l: usize,
    pub p: usize,
    pub is_clutter: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedPair {
    pub reference: ComplexSignal,
    pub surveillance: ComplexSignal,
}

/// Mixes a trial seed into an independent stream seed (splitmix64).
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Scenario {
    /// The two-target, one-clutter scene with transmitter at (0, 10) km and
    /// receiver at the origin.
    pub fn two_targets_one_clutter(noise: NoiseModel, seed: u64) -> Self {
        Self {
            fm: StereoFmConfig { duration_samples: None, ..StereoFmConfig::new(0, seed) },
            tx_km: [0.0, 10.0],
            rx_km: [0.0, 0.0],
            obstacles: vec![Obstacle::target(10.0, 0.0, 200.0), Obstacle::target(20.0, 0.0, 157.0), Obstacle::clutter(28.0, 33.0)],
            noise,
            n: default_n(),
            l_bins: default_l_bins(),
            surv_gain: default_surv_gain(),
            transform_input_gain: default_transform_gain(),
        }
    }

    /// Four targets and two clutters around the same transmitter/receiver
    /// pair. Objects sit more than the default guard apart on the grid.
    pub fn four_targets_two_clutters(noise: NoiseModel, seed: u64) -> Self {
        Self {
            obstacles: vec![
                Obstacle::target(10.0, 0.0, 200.0),
                Obstacle::target(20.0, 0.0, 157.0),
                Obstacle::target(15.0, 6.0, -120.0),
                Obstacle::target(6.0, 18.0, 300.0),
                Obstacle::clutter(28.0, 33.0),
                Obstacle::clutter(12.0, -8.0),
            ],
            ..Self::two_targets_one_clutter(noise, seed)
        }
    }

    pub fn one_target_three_clutters(noise: NoiseModel, seed: u64) -> Self {
        Self {
            obstacles: vec![
                Obstacle::target(10.0, 0.0, 200.0),
                Obstacle::clutter(28.0, 33.0),
                Obstacle::clutter(20.0, 0.0),
                Obstacle::clutter(-14.0, 6.0),
            ],
            ..Self::two_targets_one_clutter(noise, seed)
        }
    }

    pub fn duration_samples(&self) -> usize {
        self.fm.duration_samples.unwrap_or(self.n + self.l_bins)
    }

    pub fn n_targets(&self) -> usize {
        self.obstacles.iter().filter(|o| !o.is_clutter()).count()
    }

    pub fn n_clutters(&self) -> usize {
        self.obstacles.len() - self.n_targets()
    }

    pub fn max_delay_bins(&self) -> usize {
        self.obstacles
            .iter()
            .map(|o| bistatic_delay_bins(self.tx_km, self.rx_km, o, self.fm.fs_hz))
            .max()
            .unwrap_or(0)
    }

    pub fn true_bins(&self) -> Vec<TrueBin> {
        self.obstacles
            .iter()
            .map(|o| TrueBin {
                l: bistatic_delay_bins(self.tx_km, self.rx_km, o, self.fm.fs_hz),
                p: doppler_bin(o.doppler_hz, self.n, self.fm.fs_hz),
                is_clutter: o.is_clutter(),
            })
            .collect()
    }

    pub fn ambiguity_config(&self, conjugate_ref: bool) -> AmbiguityConfig {
        AmbiguityConfig { l_bins: self.l_bins, n: self.n, conjugate_ref, transform_input_gain: self.transform_input_gain }
    }

    /// Returns a copy reseeded for one trial: the FM message and the noise
    /// get independent streams derived from `seed`.
    pub fn with_trial_seed(&self, seed: u64) -> Self {
        let mut s = self.clone();
        s.fm.seed = derive_seed(seed, 1);
        s.noise.seed = derive_seed(seed, 2);
        s
    }

    pub fn validate(&self) -> Result<()> {
        if self.obstacles.is_empty() {
            return Err(Error::Contract("obstacles: at least one obstacle is required".into()));
        }
        if !self.n.is_power_of_two() {
            return Err(Error::Contract(format!("n = {} must be a power of two", self.n)));
        }
        if self.l_bins == 0 {
            return Err(Error::Contract("l_bins must be at least 1".into()));
        }
        for (v, key) in [(self.surv_gain, "surv_gain"), (self.transform_input_gain, "transform_input_gain")] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Contract(format!("{key} = {v} must be positive")));
            }
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            for (v, key) in [(o.x_km, "x_km"), (o.y_km, "y_km"), (o.doppler_hz, "doppler_hz"), (o.amplitude_re, "amplitude_re"), (o.amplitude_im, "amplitude_im")] {
                if !v.is_finite() {
                    return Err(Error::Contract(format!("obstacles[{i}].{key} must be finite")));
                }
            }
        }
        let needed = self.n + self.max_delay_bins();
        if self.duration_samples() < needed {
            return Err(Error::Contract(format!(
                "fm.duration_samples = {} is shorter than n + max delay = {needed}",
                self.duration_samples()
            )));
        }
        self.noise.validate()
    }

    /// Noise-free reference plus noisy, amplified surveillance.
    pub fn simulate(&self) -> Result<SimulatedPair> {
        self.validate()?;
        let reference = gen_stereo_fm(&self.fm, self.duration_samples())?;
        let surveillance = synth_surveillance(self, &reference)?;
        Ok(SimulatedPair { reference, surveillance })
    }
}

/// Noise-free echo sum `Σ a_m s_ref[i − l_m] e^{j2π f_dm i / f_s}`.
pub fn echo_sum(scn: &Scenario, s_ref: &ComplexSignal) -> Result<ComplexSignal> {
    let len = s_ref.len();
    if len < scn.n + scn.max_delay_bins() {
        return Err(Error::Contract(format!(
            "reference of length {len} is shorter than n + max delay = {}",
            scn.n + scn.max_delay_bins()
        )));
    }
    let fs = s_ref.sample_rate_hz();
    let r = s_ref.samples();
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for o in &scn.obstacles {
        let delay = bistatic_delay_bins(scn.tx_km, scn.rx_km, o, fs);
        let a = o.amplitude();
        for (i, slot) in out.iter_mut().enumerate().skip(delay) {
            let echo = a * r[i - delay];
            *slot += if o.doppler_hz == 0.0 {
                echo
            } else {
                echo * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * o.doppler_hz * i as f64 / fs)
            };
        }
    }
    ComplexSignal::new(out, fs)
}

/// Echo sum, then noise, then `surv_gain`.
pub fn synth_surveillance(scn: &Scenario, s_ref: &ComplexSignal) -> Result<ComplexSignal> {
    let clean = echo_sum(scn, s_ref)?;
    let noisy = scn.noise.apply(&clean)?;
    if scn.surv_gain == 1.0 {
        Ok(noisy)
    } else {
        noisy.scaled(scn.surv_gain)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table3() -> Scenario {
        Scenario::two_targets_one_clutter(NoiseModel::none(), 7)
    }

    #[test]
    fn fm_is_unit_modulus_and_deterministic() {
        let cfg = StereoFmConfig::new(2000, 11);
        let a = gen_stereo_fm(&cfg, 2000).unwrap();
        assert!(a.samples().iter().all(|s| (s.norm() - 1.0).abs() < 1e-12));
        assert_eq!(a, gen_stereo_fm(&cfg, 2000).unwrap());
        let other = gen_stereo_fm(&StereoFmConfig::new(2000, 12), 2000).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn fm_zero_deviation_is_constant() {
        let cfg = StereoFmConfig { kf: 0.0, ..StereoFmConfig::new(100, 3) };
        let s = gen_stereo_fm(&cfg, 100).unwrap();
        assert!(s.samples().iter().all(|v| *v == Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn fm_rejects_undersampled_rate() {
        let cfg = StereoFmConfig { fs_hz: 100_000.0, ..StereoFmConfig::new(100, 3) };
        assert!(gen_stereo_fm(&cfg, 100).is_err());
    }

    #[test]
    fn geometry_oracle_bins() {
        // Path lengths: √200 + 10, √500 + 20, √1313 + √1873 km.
        let scn = table3();
        let paths: Vec<f64> = scn.obstacles.iter().map(|o| bistatic_path_m(scn.tx_km, scn.rx_km, o)).collect();
        let want = [200f64.sqrt() + 10.0, 500f64.sqrt() + 20.0, 1313f64.sqrt() + 1873f64.sqrt()];
        for (p, w) in paths.iter().zip(want) {
            assert!((p / 1000.0 - w).abs() < 1e-9);
        }
        assert!((paths[0] - 24_142.0).abs() < 1.0);
        assert!((paths[1] - 42_361.0).abs() < 1.0);
        assert!((paths[2] - 79_513.0).abs() < 1.0);
        let bins: Vec<(usize, usize)> = scn.true_bins().iter().map(|b| (b.l, b.p)).collect();
        assert_eq!(bins, vec![(16, 4), (28, 3), (53, 0)]);
    }

    #[test]
    fn invented_environments_are_separated() {
        for scn in [
            Scenario::four_targets_two_clutters(NoiseModel::none(), 0),
            Scenario::one_target_three_clutters(NoiseModel::none(), 0),
        ] {
            let bins = scn.true_bins();
            for (i, a) in bins.iter().enumerate() {
                assert!(a.l < scn.l_bins);
                for b in &bins[i + 1..] {
                    let dp = a.p.abs_diff(b.p).min(scn.n - a.p.abs_diff(b.p));
                    assert!(a.l.abs_diff(b.l) > 2 || dp > 2, "{a:?} {b:?}");
                }
            }
        }
    }

    #[test]
    fn negative_doppler_wraps() {
        assert_eq!(doppler_bin(-200.0, 4096, 200_000.0), 4092);
    }

    #[test]
    fn single_clutter_is_pure_delay() {
        let mut scn = table3();
        scn.obstacles = vec![Obstacle::clutter(10.0, 0.0)];
        scn.surv_gain = 1.0;
        let pair = scn.simulate().unwrap();
        let l = scn.true_bins()[0].l;
        for i in 0..pair.reference.len() {
            let want = if i >= l { pair.reference.samples()[i - l] } else { Complex64::new(0.0, 0.0) };
            assert_eq!(pair.surveillance.samples()[i], want);
        }
    }

    #[test]
    fn zero_amplitude_scene_is_pure_noise() {
        let mut scn = table3();
        for o in &mut scn.obstacles {
            o.amplitude_re = 0.0;
        }
        scn.noise = NoiseModel::contaminated(1.0, 0.5, 1.0, 4);
        scn.surv_gain = 1.0;
        let pair = scn.simulate().unwrap();
        let clean = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); pair.reference.len()], 200_000.0).unwrap();
        let noise_only = add_contaminated(&clean, 1.0, 0.5, 1.0, scn.noise.seed).unwrap();
        assert_eq!(pair.surveillance, noise_only);
    }

    #[test]
    fn synthesis_is_linear_in_amplitudes() {
        let mut scn = table3();
        scn.surv_gain = 1.0;
        let base = scn.simulate().unwrap();
        for o in &mut scn.obstacles {
            o.amplitude_re *= 2.0;
        }
        let doubled = scn.simulate().unwrap();
        assert_eq!(base.reference, doubled.reference);
        for (a, b) in base.surveillance.samples().iter().zip(doubled.surveillance.samples()) {
            assert_eq!(a * 2.0, *b);
        }
    }

    #[test]
    fn reference_is_never_perturbed() {
        let clean = table3().simulate().unwrap();
        let noisy = Scenario::two_targets_one_clutter(NoiseModel::contaminated(0.9, 0.25, 10.0, 1), 7).simulate().unwrap();
        assert_eq!(clean.reference, noisy.reference);
        assert!(clean.reference.samples().iter().all(|s| (s.norm() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn awgn_hits_target_snr() {
        let x = gen_stereo_fm(&StereoFmConfig::new(100_000, 5), 100_000).unwrap();
        for snr in [3.0, 6.0, -2.0] {
            let y = add_awgn(&x, snr, 9).unwrap();
            let noise: Vec<Complex64> = y.samples().iter().zip(x.samples()).map(|(a, b)| a - b).collect();
            let measured = 10.0 * (mean_power(x.samples()) / mean_power(&noise)).log10();
            assert!((measured - snr).abs() <= 0.3, "snr {snr}: measured {measured}");
        }
        assert_eq!(add_awgn(&x, 3.0, 1).unwrap(), add_awgn(&x, 3.0, 1).unwrap());
        assert_eq!(add_awgn(&x, f64::INFINITY, 1).unwrap(), x);
        let zero = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); 4], 1.0).unwrap();
        assert!(add_awgn(&zero, 3.0, 1).is_err());
    }

    #[test]
    fn contaminated_mixture_variance() {
        let n = 1_000_000;
        let zero = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); n], 1.0).unwrap();
        let y = add_contaminated(&zero, 0.9, 0.25, 10.0, 21).unwrap();
        let oracle = 0.9 * 0.25f64.powi(2) + 0.1 * 10.0f64.powi(2);
        assert!((oracle - 10.05625).abs() < 1e-12);
        let var_re = y.samples().iter().map(|v| v.re * v.re).sum::<f64>() / n as f64;
        let var_im = y.samples().iter().map(|v| v.im * v.im).sum::<f64>() / n as f64;
        assert!((var_re / oracle - 1.0).abs() < 0.05, "{var_re}");
        assert!((var_im / oracle - 1.0).abs() < 0.05, "{var_im}");
        assert_eq!(y, add_contaminated(&zero, 0.9, 0.25, 10.0, 21).unwrap());
    }

    #[test]
    fn contaminated_eps_one_is_plain_gaussian() {
        let n = 200_000;
        let zero = ComplexSignal::new(vec![Complex64::new(0.0, 0.0); n], 1.0).unwrap();
        let y = add_contaminated(&zero, 1.0, 0.5, 10.0, 3).unwrap();
        let var = y.samples().iter().map(|v| v.re * v.re).sum::<f64>() / n as f64;
        assert!((var / 0.25 - 1.0).abs() < 0.02);
        let kurt = y.samples().iter().map(|v| v.re.powi(4)).sum::<f64>() / n as f64 / (var * var);
        assert!((kurt - 3.0).abs() < 0.1);
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel { eps: None, ..NoiseModel::contaminated(0.9, 1.0, 1.0, 0) }.validate().is_err());
        assert!(NoiseModel::contaminated(1.5, 1.0, 1.0, 0).validate().is_err());
        assert!(NoiseModel::contaminated(0.5, 0.0, 1.0, 0).validate().is_err());
        assert!(NoiseModel { snr_db: None, ..NoiseModel::awgn(3.0, 0) }.validate().is_err());
    }

    #[test]
    fn scenario_validation() {
        let mut s = table3();
        s.fm.duration_samples = Some(100);
        assert!(s.simulate().is_err());
        let mut s = table3();
        s.obstacles.clear();
        assert!(s.validate().is_err());
        let mut s = table3();
        s.n = 1000;
        assert!(s.validate().is_err());
    }

    #[test]
    fn trial_seeds_are_deterministic_and_distinct() {
        let s = table3();
        assert_eq!(s.with_trial_seed(3), s.with_trial_seed(3));
        assert_ne!(s.with_trial_seed(3).fm.seed, s.with_trial_seed(4).fm.seed);
        assert_ne!(s.with_trial_seed(3).fm.seed, s.with_trial_seed(3).noise.seed);
    }
}
