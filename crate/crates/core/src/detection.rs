//! Peak extraction, detection classification and side-lobe floor, and the
//! seeded Monte Carlo aggregation that produces detection-table rows.

use serde::{Deserialize, Serialize};

use crate::ambiguity::{ambiguity, AmbiguitySurface, Variant};
use crate::error::{Error, Result};
use crate::radar_sim::{NoiseModel, Scenario, TrueBin};

/// dB value reported when the side-lobe region is identically zero.
pub const DB_FLOOR_CAP: f64 = -300.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub l: usize,
    pub p: usize,
    pub magnitude: f64,
}

/// Half-widths of the guard window around each true bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guard {
    pub range_bins: usize,
    pub doppler_bins: usize,
}

impl Default for Guard {
    fn default() -> Self {
        Self { range_bins: 2, doppler_bins: 2 }
    }
}

fn circular_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b) % n;
    d.min(n - d)
}

impl Guard {
    pub fn contains(&self, bin: &TrueBin, l: usize, p: usize, n: usize) -> bool {
        bin.l.abs_diff(l) <= self.range_bins && circular_distance(bin.p, p, n) <= self.doppler_bins
    }
}

/// Local maxima of `|values|`, largest first, at most `k` of them.
///
/// A cell qualifies when it is strictly greater than the neighbours that
/// precede it in row-major order and at least as large as those that follow,
/// so a plateau yields its first cell only. The Doppler axis wraps; the
/// range axis does not. Zero cells never qualify.
pub fn find_peaks(surface: &AmbiguitySurface, k: usize) -> Vec<Peak> {
    let mags = surface.magnitudes();
    let rows = mags.len();
    let n = surface.n();
    let mut peaks = Vec::new();
    for l in 0..rows {
        for p in 0..n {
            let m = mags[l][p];
            if m <= 0.0 {
                continue;
            }
            let mut is_peak = true;
            'nb: for dl in [-1i64, 0, 1] {
                let ll = l as i64 + dl;
                if ll < 0 || ll >= rows as i64 {
                    continue;
                }
                for dp in [-1i64, 0, 1] {
                    if dl == 0 && dp == 0 {
                        continue;
                    }
                    let pp = (p as i64 + dp).rem_euclid(n as i64) as usize;
                    let ll = ll as usize;
                    if ll == l && pp == p {
                        continue;
                    }
                    let other = mags[ll][pp];
                    let precedes = (ll, pp) < (l, p);
                    if other > m || (precedes && other == m) {
                        is_peak = false;
                        break 'nb;
                    }
                }
            }
            if is_peak {
                peaks.push(Peak { l, p, magnitude: m });
            }
        }
    }
    // Stable sort keeps row-major order among equal magnitudes.
    peaks.sort_by(|a, b| b.magnitude.total_cmp(&a.magnitude));
    peaks.truncate(k);
    peaks
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectStatus {
    Detected,
    Masked,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Detected,
    Partial,
    NoDetection,
}

impl Overall {
    pub fn label(self) -> &'static str {
        match self {
            Overall::Detected => "detected",
            Overall::Partial => "partial",
            Overall::NoDetection => "no detection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    pub statuses: Vec<ObjectStatus>,
    pub is_clutter: Vec<bool>,
    pub overall: Overall,
    pub sidelobe_floor_db: f64,
    pub peaks: Vec<Peak>,
    pub variant: Variant,
    pub noise: String,
    pub seed: u64,
}

impl DetectionReport {
    pub fn detected_count(&self) -> usize {
        self.statuses.iter().filter(|s| **s == ObjectStatus::Detected).count()
    }
}

fn overall_from(statuses: &[ObjectStatus]) -> Overall {
    let hits = statuses.iter().filter(|s| **s == ObjectStatus::Detected).count();
    if hits == statuses.len() {
        Overall::Detected
    } else if hits == 0 {
        Overall::NoDetection
    } else {
        Overall::Partial
    }
}

/// Detected iff one of the top-(targets + clutters) peaks falls inside the
/// object's guard window.
pub fn classify_bins(surface: &AmbiguitySurface, truth: &[TrueBin], guard: Guard) -> Result<(Vec<ObjectStatus>, Vec<Peak>)> {
    if guard.range_bins < 1 || guard.doppler_bins < 1 {
        return Err(Error::Contract("guard must be at least one bin on each axis".into()));
    }
    let n = surface.n();
    let peaks = find_peaks(surface, truth.len());
    let statuses = truth
        .iter()
        .map(|b| {
            if peaks.iter().any(|pk| guard.contains(b, pk.l, pk.p, n)) {
                ObjectStatus::Detected
            } else {
                ObjectStatus::Masked
            }
        })
        .collect();
    Ok((statuses, peaks))
}

pub fn classify(surface: &AmbiguitySurface, scenario: &Scenario, guard: Guard) -> Result<DetectionReport> {
    let truth = scenario.true_bins();
    let (statuses, peaks) = classify_bins(surface, &truth, guard)?;
    let sidelobe_floor_db = sidelobe_floor_bins(surface, &truth, guard)?;
    Ok(DetectionReport {
        overall: overall_from(&statuses),
        statuses,
        is_clutter: truth.iter().map(|b| b.is_clutter).collect(),
        sidelobe_floor_db,
        peaks,
        variant: surface.variant,
        noise: scenario.noise.label(),
        seed: scenario.noise.seed,
    })
}

/// Peak side-lobe level: largest magnitude outside every guard window over
/// the global maximum, in dB, capped at [`DB_FLOOR_CAP`].
pub fn sidelobe_floor_bins(surface: &AmbiguitySurface, truth: &[TrueBin], guard: Guard) -> Result<f64> {
    let n = surface.n();
    let mut outside = None::<f64>;
    let mut global = 0.0f64;
    for (l, row) in surface.values.iter().enumerate() {
        for (p, v) in row.iter().enumerate() {
            let m = v.norm();
            global = global.max(m);
            if !truth.iter().any(|b| guard.contains(b, l, p, n)) {
                outside = Some(outside.map_or(m, |o| o.max(m)));
            }
        }
    }
    let outside = outside.ok_or_else(|| Error::Contract("every surface cell lies inside a guard window".into()))?;
    if outside == 0.0 || global == 0.0 {
        return Ok(DB_FLOOR_CAP);
    }
    Ok((20.0 * (outside / global).log10()).max(DB_FLOOR_CAP))
}

pub fn sidelobe_floor_db(surface: &AmbiguitySurface, scenario: &Scenario, guard: Guard) -> Result<f64> {
    sidelobe_floor_bins(surface, &scenario.true_bins(), guard)
}

/// Simulates one trial of a scenario and classifies the chosen variant.
pub fn run_trial(scenario: &Scenario, variant: Variant, seed: u64, guard: Guard, conjugate_ref: bool) -> Result<DetectionReport> {
    let trial = scenario.with_trial_seed(seed);
    let pair = trial.simulate()?;
    let surface = ambiguity(&pair.surveillance, &pair.reference, variant, &trial.ambiguity_config(conjugate_ref))?;
    let mut report = classify(&surface, &trial, guard)?;
    report.seed = seed;
    Ok(report)
}

/// One environment × noise × variant entry of a detection table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSpec {
    pub environment: String,
    pub scenario: Scenario,
    pub variant: Variant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub environment: String,
    pub variant: Variant,
    pub noise: String,
    /// Majority outcome over trials.
    pub overall: Overall,
    /// Text built from per-object majority status, e.g. `1 target masked`.
    pub performance: String,
    pub sidelobe_floor_db: f64,
    pub trials: usize,
    pub seeds: Vec<u64>,
    pub detected_trials: usize,
    pub partial_trials: usize,
    pub no_detection_trials: usize,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    if values.len() % 2 == 1 {
        values[m]
    } else {
        0.5 * (values[m - 1] + values[m])
    }
}

fn plural(count: usize, word: &str) -> String {
    match (count, word) {
        (1, _) => format!("1 {word}"),
        (c, "clutter") => format!("{c} clutters"),
        (c, w) => format!("{c} {w}s"),
    }
}

fn performance_text(masked_targets: usize, masked_clutters: usize, total: usize) -> String {
    if masked_targets + masked_clutters == 0 {
        "detected".into()
    } else if masked_targets + masked_clutters == total {
        "no detection".into()
    } else {
        let mut parts = Vec::new();
        if masked_targets > 0 {
            parts.push(plural(masked_targets, "target"));
        }
        if masked_clutters > 0 {
            parts.push(plural(masked_clutters, "clutter"));
        }
        format!("{} masked", parts.join(" "))
    }
}

/// Aggregates per-trial reports into a table row: majority outcome,
/// per-object majority status and median side-lobe floor.
pub fn aggregate(environment: &str, reports: &[DetectionReport]) -> Result<TableRow> {
    let first = reports.first().ok_or(Error::Empty("trial reports"))?;
    let trials = reports.len();
    let count = |o: Overall| reports.iter().filter(|r| r.overall == o).count();
    let (d, p, nd) = (count(Overall::Detected), count(Overall::Partial), count(Overall::NoDetection));
    // Ties resolve toward the earlier (better) outcome.
    let overall = [(Overall::Detected, d), (Overall::Partial, p), (Overall::NoDetection, nd)]
        .into_iter()
        .fold((Overall::Detected, 0), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;

    let objects = first.statuses.len();
    let mut masked_targets = 0;
    let mut masked_clutters = 0;
    for i in 0..objects {
        let masked = reports.iter().filter(|r| r.statuses[i] == ObjectStatus::Masked).count();
        if 2 * masked > trials {
            if first.is_clutter[i] {
                masked_clutters += 1;
            } else {
                masked_targets += 1;
            }
        }
    }
    let mut floors: Vec<f64> = reports.iter().map(|r| r.sidelobe_floor_db).collect();
    Ok(TableRow {
        environment: environment.to_string(),
        variant: first.variant,
        noise: first.noise.clone(),
        overall,
        performance: performance_text(masked_targets, masked_clutters, objects),
        sidelobe_floor_db: median(&mut floors),
        trials,
        seeds: reports.iter().map(|r| r.seed).collect(),
        detected_trials: d,
        partial_trials: p,
        no_detection_trials: nd,
    })
}

/// Runs every spec for every seed. Deterministic in the seed list.
pub fn run_table(specs: &[TableSpec], seeds: &[u64], guard: Guard, conjugate_ref: bool) -> Result<Vec<TableRow>> {
    if seeds.is_empty() {
        return Err(Error::Empty("seed list"));
    }
    specs
        .iter()
        .map(|spec| {
            let reports = seeds
                .iter()
                .map(|&s| run_trial(&spec.scenario, spec.variant, s, guard, conjugate_ref))
                .collect::<Result<Vec<_>>>()?;
            aggregate(&spec.environment, &reports)
        })
        .collect()
}

/// The noise cases of the detection tables, in row order.
pub fn table_noise_cases() -> Vec<NoiseModel> {
    vec![
        NoiseModel::awgn(3.0, 0),
        NoiseModel::awgn(6.0, 0),
        NoiseModel::contaminated(0.9, 0.25, 10.0, 0),
        NoiseModel::contaminated(0.8, 0.5, 20.0, 0),
    ]
}

/// Builds a scenario from its noise model and seed.
pub type ScenarioBuilder = fn(NoiseModel, u64) -> Scenario;

/// Named environments of the detection tables.
pub fn table_environments() -> Vec<(&'static str, ScenarioBuilder)> {
    vec![
        ("2 targets 1 clutter", Scenario::two_targets_one_clutter),
        ("4 targets 2 clutters", Scenario::four_targets_two_clutters),
        ("1 target 3 clutters", Scenario::one_target_three_clutters),
    ]
}

/// 3 environments × 4 noise cases × {eq12a, eq11}: 24 rows, nonlinear
/// variant first.
pub fn default_table_specs() -> Vec<TableSpec> {
    let mut specs = Vec::new();
    for variant in [Variant::Eq12a, Variant::Eq11] {
        for (name, build) in table_environments() {
            for noise in table_noise_cases() {
                specs.push(TableSpec { environment: name.to_string(), scenario: build(noise, 0), variant });
            }
        }
    }
    specs
}

/// The default seed list: `1..=10`.
pub fn default_seeds() -> Vec<u64> {
    (1..=10).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambiguity::StageCounts;
    use num_complex::Complex64;

    fn surface(values: Vec<Vec<f64>>) -> AmbiguitySurface {
        AmbiguitySurface {
            values: values.into_iter().map(|r| r.into_iter().map(|v| Complex64::new(v, 0.0)).collect()).collect(),
            range_bin_m: 1.0,
            doppler_bin_hz: 1.0,
            variant: Variant::Eq11,
            op_counts: StageCounts::default(),
        }
    }

    fn grid(l: usize, n: usize, cells: &[(usize, usize, f64)]) -> AmbiguitySurface {
        let mut v = vec![vec![0.0; n]; l];
        for &(a, b, m) in cells {
            v[a][b] = m;
        }
        surface(v)
    }

    fn bin(l: usize, p: usize) -> TrueBin {
        TrueBin { l, p, is_clutter: p == 0 }
    }

    #[test]
    fn peaks_on_flat_and_simple_surfaces() {
        assert!(find_peaks(&grid(8, 8, &[]), 3).is_empty());
        let s = grid(8, 16, &[(2, 3, 5.0), (6, 10, 7.0), (2, 4, 1.0)]);
        let peaks = find_peaks(&s, 3);
        assert_eq!(peaks.iter().map(|p| (p.l, p.p)).collect::<Vec<_>>(), vec![(6, 10), (2, 3)]);
        assert_eq!(find_peaks(&s, 1).len(), 1);
    }

    #[test]
    fn plateau_yields_first_cell() {
        let s = grid(4, 8, &[(1, 2, 3.0), (1, 3, 3.0)]);
        let peaks = find_peaks(&s, 5);
        assert_eq!(peaks.len(), 1);
        assert_eq!((peaks[0].l, peaks[0].p), (1, 2));
    }

    #[test]
    fn doppler_axis_wraps_for_neighbours() {
        let s = grid(4, 8, &[(1, 0, 2.0), (1, 7, 3.0)]);
        let peaks = find_peaks(&s, 5);
        assert_eq!(peaks.len(), 1);
        assert_eq!(peaks[0].p, 7);
    }

    #[test]
    fn classify_and_floor() {
        let s = grid(16, 16, &[(4, 1, 10.0), (9, 0, 8.0), (13, 8, 5.0)]);
        let truth = [bin(4, 1), bin(9, 15), bin(2, 5)];
        let (st, _) = classify_bins(&s, &truth, Guard::default()).unwrap();
        assert_eq!(st, vec![ObjectStatus::Detected, ObjectStatus::Detected, ObjectStatus::Masked]);
        assert_eq!(overall_from(&st), Overall::Partial);
        let floor = sidelobe_floor_bins(&s, &truth, Guard::default()).unwrap();
        assert!((floor - 20.0 * 0.5f64.log10()).abs() < 1e-12);
        assert!(classify_bins(&s, &truth, Guard { range_bins: 0, doppler_bins: 1 }).is_err());
    }

    #[test]
    fn floor_cap_and_all_guarded() {
        let s = grid(8, 8, &[(3, 3, 1.0)]);
        assert_eq!(sidelobe_floor_bins(&s, &[bin(3, 3)], Guard::default()).unwrap(), DB_FLOOR_CAP);
        let tiny = grid(2, 2, &[(0, 0, 1.0)]);
        assert!(sidelobe_floor_bins(&tiny, &[bin(0, 0)], Guard::default()).is_err());
    }

    #[test]
    fn scale_invariance() {
        let s = grid(16, 16, &[(4, 1, 10.0), (9, 0, 8.0), (13, 8, 5.0), (1, 1, 0.3)]);
        let truth = [bin(4, 1), bin(9, 0), bin(2, 5)];
        let a = classify_bins(&s, &truth, Guard::default()).unwrap().0;
        let fa = sidelobe_floor_bins(&s, &truth, Guard::default()).unwrap();
        for c in [1e-6, 0.37, 64.0, 1e9] {
            let sc = s.scaled(c);
            assert_eq!(classify_bins(&sc, &truth, Guard::default()).unwrap().0, a);
            assert!((sidelobe_floor_bins(&sc, &truth, Guard::default()).unwrap() - fa).abs() < 1e-9);
        }
    }

    #[test]
    fn performance_strings() {
        assert_eq!(performance_text(0, 0, 3), "detected");
        assert_eq!(performance_text(1, 0, 6), "1 target masked");
        assert_eq!(performance_text(1, 1, 6), "1 target 1 clutter masked");
        assert_eq!(performance_text(0, 2, 6), "2 clutters masked");
        assert_eq!(performance_text(2, 1, 3), "no detection");
    }

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
