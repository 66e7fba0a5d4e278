//! wasm-bindgen exports for the demo page in `www/`.
//!
//! The `*_impl` functions hold the logic and are plain Rust so they can be
//! tested natively; the exported wrappers only convert errors.

use mfdft::ambiguity::{ambiguity, Variant};
use mfdft::detection::{classify, find_peaks, Guard};
use mfdft::radar_sim::{NoiseModel, Scenario};
use mfdft::transforms::{ndft_mf_count, nfft_mf_count, transform, TransformKind};
use mfdft::ComplexSignal;
use wasm_bindgen::prelude::*;

fn kind_from(name: &str) -> Result<TransformKind, String> {
    match name {
        "dft" => Ok(TransformKind::DftExact),
        "fft" => Ok(TransformKind::FftExact),
        "ndft" => Ok(TransformKind::Ndft),
        "nfft" => Ok(TransformKind::Nfft),
        other => Err(format!("unknown transform `{other}`")),
    }
}

fn noise_from(name: &str) -> Result<NoiseModel, String> {
    match name {
        "none" => Ok(NoiseModel::none()),
        "awgn3" => Ok(NoiseModel::awgn(3.0, 0)),
        "awgn6" => Ok(NoiseModel::awgn(6.0, 0)),
        "cont1" => Ok(NoiseModel::contaminated(0.9, 0.25, 10.0, 0)),
        "cont2" => Ok(NoiseModel::contaminated(0.8, 0.5, 20.0, 0)),
        other => Err(format!("unknown noise case `{other}`")),
    }
}

/// Magnitude spectrum of `e^{j2π k0 n / N}`.
pub fn tone_spectrum_impl(kind: &str, n: usize, k0: usize) -> Result<Vec<f64>, String> {
    let kind = kind_from(kind)?;
    if n == 0 || (kind.needs_power_of_two() && !n.is_power_of_two()) {
        return Err(format!("N = {n} is not valid for this transform"));
    }
    let x = ComplexSignal::tone(n, k0).map_err(|e| e.to_string())?;
    let s = transform(kind, &x).map_err(|e| e.to_string())?;
    Ok(s.magnitudes())
}

/// Range and Doppler cuts of the two-target, one-clutter scene.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Cuts {
    range_db: Vec<f64>,
    doppler_hz: Vec<f64>,
    doppler_db: Vec<f64>,
    peaks: Vec<u32>,
    summary: String,
}

#[wasm_bindgen]
impl Cuts {
    /// dB relative to the surface maximum, one value per range bin.
    #[wasm_bindgen(getter)]
    pub fn range_db(&self) -> Vec<f64> {
        self.range_db.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn doppler_hz(&self) -> Vec<f64> {
        self.doppler_hz.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn doppler_db(&self) -> Vec<f64> {
        self.doppler_db.clone()
    }

    /// Flattened `(l, p)` pairs of the strongest local maxima.
    #[wasm_bindgen(getter)]
    pub fn peaks(&self) -> Vec<u32> {
        self.peaks.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn summary(&self) -> String {
        self.summary.clone()
    }
}

fn db(v: f64, peak: f64) -> f64 {
    if v <= 0.0 || peak <= 0.0 {
        mfdft::detection::DB_FLOOR_CAP
    } else {
        (20.0 * (v / peak).log10()).max(mfdft::detection::DB_FLOOR_CAP)
    }
}

pub fn ambiguity_cuts_impl(variant: &str, noise: &str, seed: u64) -> Result<Cuts, String> {
    let variant: Variant = variant.parse().map_err(|e: mfdft::Error| e.to_string())?;
    let scn = Scenario::two_targets_one_clutter(noise_from(noise)?, 0).with_trial_seed(seed);
    let pair = scn.simulate().map_err(|e| e.to_string())?;
    let surface = ambiguity(&pair.surveillance, &pair.reference, variant, &scn.ambiguity_config(true))
        .map_err(|e| e.to_string())?;
    let peak = surface.max_magnitude();
    let doppler = surface.doppler_cut_centered();
    let report = classify(&surface, &scn, Guard::default()).map_err(|e| e.to_string())?;
    let peaks = find_peaks(&surface, scn.obstacles.len())
        .iter()
        .flat_map(|p| [p.l as u32, p.p as u32])
        .collect();
    Ok(Cuts {
        range_db: surface.range_cut().iter().map(|&m| db(m, peak)).collect(),
        doppler_hz: doppler.iter().map(|d| d.1).collect(),
        doppler_db: doppler.iter().map(|d| db(d.2, peak)).collect(),
        peaks,
        summary: format!("{}, side-lobe floor {:.2} dB", report.overall.label(), report.sidelobe_floor_db),
    })
}

/// `[ndft measured, ndft analytic, nfft measured, nfft analytic]` complex
/// `⊗` counts for a power-of-two `n`.
pub fn op_counts_impl(n: usize) -> Result<Vec<f64>, String> {
    if !n.is_power_of_two() {
        return Err(format!("N = {n} is not a power of two"));
    }
    let x = ComplexSignal::tone(n, 1 % n).map_err(|e| e.to_string())?;
    let d = transform(TransformKind::Ndft, &x).map_err(|e| e.to_string())?.op_counts;
    let f = transform(TransformKind::Nfft, &x).map_err(|e| e.to_string())?.op_counts;
    Ok(vec![
        d.complex_mf_ops as f64,
        ndft_mf_count(n) as f64,
        f.complex_mf_ops as f64,
        nfft_mf_count(n) as f64,
    ])
}

#[wasm_bindgen]
pub fn tone_spectrum(kind: &str, n: usize, k0: usize) -> Result<Vec<f64>, JsError> {
    tone_spectrum_impl(kind, n, k0).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn ambiguity_cuts(variant: &str, noise: &str, seed: u32) -> Result<Cuts, JsError> {
    ambiguity_cuts_impl(variant, noise, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn op_counts(n: usize) -> Result<Vec<f64>, JsError> {
    op_counts_impl(n).map_err(|e| JsError::new(&e))
}
