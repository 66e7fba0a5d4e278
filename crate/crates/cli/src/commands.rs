use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use mfdft::ambiguity::{ambiguity, Variant};
use mfdft::detection::{classify, find_peaks, run_table, Guard, TableRow};
use mfdft::operator::OpCountReport;
use mfdft::transforms::{ndft_mf_count, nfft_mf_count, transform, TransformKind};
use mfdft::{Complex64, ComplexSignal};

use crate::output::{prefixed, sha256_hex, to_db, Csv, OutputSet, RunManifest};
use crate::setfile::{load_scenario, load_set, ScenarioSet};
use crate::svg::line_plot;
use crate::{Kind, VariantArg};

impl From<Kind> for TransformKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Dft => TransformKind::DftExact,
            Kind::Fft => TransformKind::FftExact,
            Kind::Ndft => TransformKind::Ndft,
            Kind::Nfft => TransformKind::Nfft,
        }
    }
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Eq11 => Variant::Eq11,
            VariantArg::Eq12a => Variant::Eq12a,
            VariantArg::Eq12b => Variant::Eq12b,
            VariantArg::Eq12c => Variant::Eq12c,
        }
    }
}

/// Reads `re,im` rows; a non-numeric first line is taken as a header.
fn read_signal(path: &Path) -> Result<Vec<Complex64>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(',').map(str::trim);
        let (re, im) = (parts.next().unwrap_or(""), parts.next().unwrap_or("0"));
        match (re.parse::<f64>(), im.parse::<f64>()) {
            (Ok(re), Ok(im)) => out.push(Complex64::new(re, im)),
            _ if i == 0 => continue,
            _ => bail!("{}:{}: expected `re,im`, got `{line}`", path.display(), i + 1),
        }
    }
    Ok(out)
}

pub fn transform_cmd(
    tone: Option<usize>,
    input: Option<&Path>,
    kind: Kind,
    n: Option<usize>,
    out: &str,
    svg: bool,
) -> Result<()> {
    let mut manifest = RunManifest::new("transform");
    let signal = match (tone, input) {
        (Some(k0), None) => {
            let n = n.ok_or_else(|| anyhow!("--tone needs --n"))?;
            if n == 0 {
                bail!("bad N: transform size must be positive");
            }
            ComplexSignal::tone(n, k0)?
        }
        (None, Some(path)) => {
            let samples = read_signal(path)?;
            manifest.scenario_hash = Some(sha256_hex(&std::fs::read(path)?));
            if let Some(n) = n {
                if n != samples.len() {
                    bail!("bad N: --n {n} but {} has {} samples", path.display(), samples.len());
                }
            }
            ComplexSignal::from_samples(samples)?
        }
        _ => bail!("give exactly one of --tone or --input"),
    };
    let kind: TransformKind = kind.into();
    if kind.needs_power_of_two() && !signal.len().is_power_of_two() {
        bail!("bad N: {} is not a power of two, required by {kind:?}", signal.len());
    }
    let spectrum = transform(kind, &signal)?;

    let mut csv = Csv::new(&["k", "re", "im", "magnitude"]);
    for (k, b) in spectrum.bins.iter().enumerate() {
        csv.row([k.to_string(), b.re.to_string(), b.im.to_string(), b.norm().to_string()]);
    }
    let mut set = OutputSet::new();
    set.stage(prefixed(out, "spectrum.csv"), &csv.into_bytes())?;
    if svg {
        let pts: Vec<(f64, f64)> = spectrum.magnitudes().iter().enumerate().map(|(k, &m)| (k as f64, m)).collect();
        let title = format!("{kind:?} magnitude, N = {}", signal.len());
        set.stage(prefixed(out, "spectrum.svg"), line_plot(&title, "k", "|X[k]|", &pts).as_bytes())?;
    }
    manifest.op_counts = Some(spectrum.op_counts);
    manifest.finish(&mut set, out)?;
    set.commit()?;
    println!("argmax k = {}", spectrum.peak_index());
    Ok(())
}

pub fn ambiguity_cmd(scenario_path: &Path, variant: VariantArg, out: &str, svg: bool, conjugate_ref: bool) -> Result<()> {
    let mut manifest = RunManifest::new("ambiguity");
    let scenario = load_scenario(scenario_path)?;
    let variant: Variant = variant.into();
    manifest.scenario_hash = Some(sha256_hex(&std::fs::read(scenario_path)?));
    manifest.seeds = vec![scenario.fm.seed, scenario.noise.seed];
    manifest.variant = Some(variant.name().to_string());
    manifest.kf = Some(scenario.fm.kf);

    let pair = scenario.simulate()?;
    let surface = ambiguity(&pair.surveillance, &pair.reference, variant, &scenario.ambiguity_config(conjugate_ref))?;
    let peak = surface.max_magnitude();

    let mut surf_csv = Csv::new(&["l", "p", "magnitude_db"]);
    for (l, row) in surface.values.iter().enumerate() {
        for (p, v) in row.iter().enumerate() {
            surf_csv.row([l.to_string(), p.to_string(), format!("{:.4}", to_db(v.norm(), peak))]);
        }
    }
    let range_cut = surface.range_cut();
    let mut range_csv = Csv::new(&["l", "range_m", "magnitude_db"]);
    let mut range_pts = Vec::new();
    for (l, &m) in range_cut.iter().enumerate() {
        let r = l as f64 * surface.range_bin_m;
        let db = to_db(m, peak);
        range_csv.row([l.to_string(), format!("{r:.3}"), format!("{db:.4}")]);
        range_pts.push((l as f64, db));
    }
    let mut doppler_csv = Csv::new(&["p", "doppler_hz", "magnitude_db"]);
    let mut doppler_pts = Vec::new();
    for (p, hz, m) in surface.doppler_cut_centered() {
        let db = to_db(m, peak);
        doppler_csv.row([p.to_string(), format!("{hz:.6}"), format!("{db:.4}")]);
        doppler_pts.push((hz, db));
    }

    let report = classify(&surface, &scenario, Guard::default())?;
    let k = scenario.n_targets() + scenario.n_clutters();
    let mut peaks_csv = Csv::new(&["rank", "l", "p", "magnitude_db"]);
    for (i, pk) in find_peaks(&surface, k.max(1)).iter().enumerate() {
        peaks_csv.row([(i + 1).to_string(), pk.l.to_string(), pk.p.to_string(), format!("{:.4}", to_db(pk.magnitude, peak))]);
    }

    let mut set = OutputSet::new();
    set.stage(prefixed(out, "surface.csv"), &surf_csv.into_bytes())?;
    set.stage(prefixed(out, "range_cut.csv"), &range_csv.into_bytes())?;
    set.stage(prefixed(out, "doppler_cut.csv"), &doppler_csv.into_bytes())?;
    set.stage(prefixed(out, "peaks.csv"), &peaks_csv.into_bytes())?;
    if svg {
        let title = format!("Range cut, {}", variant.name());
        set.stage(prefixed(out, "range_cut.svg"), line_plot(&title, "range bin l", "dB", &range_pts).as_bytes())?;
        let title = format!("Doppler cut, {}", variant.name());
        set.stage(prefixed(out, "doppler_cut.svg"), line_plot(&title, "Doppler (Hz)", "dB", &doppler_pts).as_bytes())?;
    }
    manifest.op_counts = Some(surface.op_counts.total());
    manifest.finish(&mut set, out)?;
    set.commit()?;

    let (l, p) = surface.argmax();
    println!("variant {}: argmax (l, p) = ({l}, {p}); {}", variant.name(), report.overall.label());
    println!("side-lobe floor {:.2} dB", report.sidelobe_floor_db);
    Ok(())
}

fn seeds_field(row: &TableRow) -> String {
    row.seeds.iter().map(u64::to_string).collect::<Vec<_>>().join(";")
}

pub fn table_cmd(
    set_path: Option<&Path>,
    variant: Option<VariantArg>,
    trials: Option<usize>,
    seeds: Option<Vec<u64>>,
    out: &str,
    conjugate_ref: bool,
) -> Result<()> {
    let mut manifest = RunManifest::new("table");
    let mut set = match set_path {
        Some(p) => {
            manifest.scenario_hash = Some(sha256_hex(&std::fs::read(p)?));
            load_set(p)?
        }
        None => ScenarioSet::builtin(),
    };
    if let Some(v) = variant {
        set.variants = vec![v.into()];
    }
    let seeds = match (seeds, trials) {
        (Some(s), None) => s,
        (Some(s), Some(t)) if t <= s.len() => s[..t].to_vec(),
        (Some(s), Some(t)) => bail!("--trials {t} exceeds the {} seeds given", s.len()),
        (None, t) => (1..=t.unwrap_or(10) as u64).collect(),
    };
    if seeds.is_empty() {
        bail!("no trials to run");
    }
    let specs = set.specs()?;
    let rows = run_table(&specs, &seeds, Guard::default(), conjugate_ref)?;

    let mut csv = Csv::new(&[
        "environment",
        "variant",
        "noise",
        "performance",
        "sidelobe_floor_db",
        "trials",
        "seeds",
        "overall",
        "detected_trials",
        "partial_trials",
        "no_detection_trials",
    ]);
    for r in &rows {
        csv.row([
            r.environment.clone(),
            r.variant.name().to_string(),
            r.noise.clone(),
            r.performance.clone(),
            format!("{:.2}", r.sidelobe_floor_db),
            r.trials.to_string(),
            seeds_field(r),
            r.overall.label().to_string(),
            r.detected_trials.to_string(),
            r.partial_trials.to_string(),
            r.no_detection_trials.to_string(),
        ]);
    }
    print!("{}", csv.as_str());
    let mut outputs = OutputSet::new();
    outputs.stage(prefixed(out, "table.csv"), &csv.into_bytes())?;
    manifest.seeds = seeds;
    manifest.finish(&mut outputs, out)?;
    outputs.commit()?;
    Ok(())
}

struct CountRow {
    n: usize,
    kind: &'static str,
    measured: OpCountReport,
    analytic_mf: u64,
}

impl CountRow {
    fn matches(&self) -> bool {
        let m = &self.measured;
        m.complex_mf_ops == self.analytic_mf
            && m.sign_ops == 4 * self.analytic_mf
            && m.abs_ops == 8 * self.analytic_mf
            && m.add_ops == 6 * self.analytic_mf
            && m.complex_mul_ops == 0
    }
}

pub fn opcount_cmd(ns: &[usize], out: &str) -> Result<()> {
    let mut manifest = RunManifest::new("opcount");
    if ns.is_empty() {
        bail!("empty N list");
    }
    let mut rows = Vec::new();
    for &n in ns {
        if !n.is_power_of_two() {
            bail!("bad N: {n} is not a power of two");
        }
        let x = ComplexSignal::tone(n, 1 % n)?;
        for (kind, name, analytic) in [
            (TransformKind::Ndft, "ndft", ndft_mf_count(n)),
            (TransformKind::Nfft, "nfft", nfft_mf_count(n)),
        ] {
            let spectrum = transform(kind, &x)?;
            rows.push(CountRow { n, kind: name, measured: spectrum.op_counts, analytic_mf: analytic });
        }
    }

    let mut csv = Csv::new(&[
        "n",
        "transform",
        "complex_mf_ops",
        "complex_mf_analytic",
        "sign_ops",
        "sign_analytic",
        "abs_ops",
        "abs_analytic",
        "add_ops",
        "add_analytic",
        "complex_mul_ops",
        "accumulate_adds",
        "match",
    ]);
    let mut total = OpCountReport::default();
    for r in &rows {
        let m = &r.measured;
        let a = r.analytic_mf;
        csv.row([
            r.n.to_string(),
            r.kind.to_string(),
            m.complex_mf_ops.to_string(),
            a.to_string(),
            m.sign_ops.to_string(),
            (4 * a).to_string(),
            m.abs_ops.to_string(),
            (8 * a).to_string(),
            m.add_ops.to_string(),
            (6 * a).to_string(),
            m.complex_mul_ops.to_string(),
            m.accumulate_adds.to_string(),
            r.matches().to_string(),
        ]);
        total += *m;
    }
    print!("{}", csv.as_str());
    let mut set = OutputSet::new();
    set.stage(prefixed(out, "opcount.csv"), &csv.into_bytes())?;
    manifest.op_counts = Some(total);
    manifest.finish(&mut set, out)?;
    set.commit()?;

    let bad: Vec<String> = rows.iter().filter(|r| !r.matches()).map(|r| format!("{} N={}", r.kind, r.n)).collect();
    if !bad.is_empty() {
        bail!("measured counts differ from the analytic formulas: {}", bad.join(", "));
    }
    Ok(())
}
