use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use gcarma::filters::StationaryAutocorr;
use gcarma::statistics::{increment_autocorr_theory, tuples, MIN_CHARFN_TUPLES, MIN_WHITENESS_LENGTH};
use gcarma::*;

use crate::config::RunConfig;
use crate::output::{num, CsvOut};

const SPECTRUM_POINTS: usize = 513;
const DEFAULT_LENGTH: usize = 1000;
const DEFAULT_GRID_STEP: f64 = 0.01;
const DEFAULT_MAXLAG: usize = 10;
const REPORT_HEADER: [&str; 8] = ["check", "estimate", "std_error", "theory", "abs_diff", "z", "threshold", "pass"];

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_complex_rows(out: &mut CsvOut, first: i64, values: &[C64]) -> Result<()> {
    for (i, v) in values.iter().enumerate() {
        out.row([(first + i as i64).to_string(), num(v.re), num(v.im)])?;
    }
    Ok(())
}

fn write_report(out: Option<&Path>, cfg: &RunConfig, report: &StatReport) -> Result<()> {
    let mut csv = CsvOut::create(out, &cfg.sha256(), cfg.seed, &REPORT_HEADER)?;
    for c in &report.checks {
        csv.row([
            c.name.clone(),
            num(c.estimate),
            num(c.std_error),
            opt(c.theory),
            opt(c.abs_diff),
            opt(c.z),
            num(c.threshold),
            c.pass.to_string(),
        ])?;
    }
    csv.finish()
}

/// Variance of the innovation when it has one, for spectra.
fn spectrum_variance(cfg: &RunConfig) -> f64 {
    cfg.innovation.as_ref().and_then(|i| i.build().ok()).and_then(|s| s.variance().ok()).unwrap_or(1.0)
}

pub fn bspline(cfg: &RunConfig, out: Option<&Path>) -> Result<()> {
    let sys = cfg.system()?;
    let h = cfg.grid_step.unwrap_or(DEFAULT_GRID_STEP);
    if !(h > 0.0 && h.is_finite()) {
        bail!("InvalidParameter: grid step must be positive, got {h}");
    }
    let beta = bspline_l(&sys);
    let acf = bspline_autocorr(&sys);
    let n = sys.order() as f64;
    let count = (2.0 * n / h).round() as usize;
    let mut csv = CsvOut::create(out, &cfg.sha256(), cfg.seed, &["t", "beta_re", "beta_im", "autocorr_re", "autocorr_im"])?;
    for i in 0..=count {
        let t = -n + i as f64 * h;
        let (b, a) = (beta.eval(t), acf.eval(t));
        csv.row([num(t), num(b.re), num(b.im), num(a.re), num(a.im)])?;
    }
    csv.finish()
}

pub fn filters(cfg: &RunConfig, out: &Path) -> Result<()> {
    let sys = rescale_system(&cfg.system()?, cfg.system()?.step())?;
    let d = localization_coeffs(sys.poles());
    let bl = discrete_bspline_filter(&sys)?;
    let bplus = spectral_factorize(&bl)?;
    let mut named = vec![("d_alpha", d), ("b_l", bl), ("b_plus", bplus)];
    if sys.is_stationary() {
        named.push(("q_alpha", q_alpha(&sys, filters::DEFAULT_Q_TOLERANCE)?));
    }
    let hash = cfg.sha256();
    let mut csv = CsvOut::create(Some(out), &hash, cfg.seed, &["filter", "k", "re", "im"])?;
    for (name, f) in &named {
        for (i, t) in f.taps().iter().enumerate() {
            csv.row([name.to_string(), (f.offset() + i as i64).to_string(), num(t.re), num(t.im)])?;
        }
    }
    csv.finish()?;

    let var0 = spectrum_variance(cfg);
    let mut spec = CsvOut::create(Some(&sibling(out, ".spectrum.csv")), &hash, cfg.seed, &["omega", "increment", "process"])?;
    for i in 0..SPECTRUM_POINTS {
        let w = PI * i as f64 / (SPECTRUM_POINTS - 1) as f64;
        let p = power_spectrum(&sys, var0, w)?;
        spec.row([num(w), num(p.increment), opt(p.process)])?;
    }
    spec.finish()
}

fn method_for(cfg: &RunConfig, spec: &InnovationSpec) -> Result<Method> {
    let m = cfg.oversample.unwrap_or(generators::DEFAULT_OVERSAMPLING);
    let heavy = matches!(spec, InnovationSpec::SymmetricStable { alpha, .. } if *alpha < 2.0);
    Ok(if cfg.force_oversampling()? || heavy { Method::Oversampled { m } } else { Method::Auto })
}

fn realize(cfg: &RunConfig) -> Result<RealizationF64> {
    let Some(seed) = cfg.seed else {
        bail!("InvalidParameter: generation needs a seed (--seed or \"seed\" in the config)");
    };
    let n = cfg.length.unwrap_or(DEFAULT_LENGTH);
    if cfg.components.is_empty() {
        let spec = cfg.innovation()?;
        Ok(generate(&cfg.system()?, &spec, method_for(cfg, &spec)?, n, seed)?)
    } else {
        let comps = cfg
            .components
            .iter()
            .map(|c| {
                let innovation = c.innovation.build()?;
                let method = method_for(cfg, &innovation)?;
                Ok(MixedComponent { system: c.system.build()?, innovation, method })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(generate_mixed(&comps, n, seed)?)
    }
}

pub fn generate_cmd(cfg: &RunConfig, out: Option<&Path>, knots: Option<&Path>, increments: Option<&Path>) -> Result<()> {
    let r = realize(cfg)?;
    let hash = cfg.sha256();
    let mut csv = CsvOut::create(out, &hash, cfg.seed, &["k", "re", "im"])?;
    write_complex_rows(&mut csv, 0, &r.samples)?;
    csv.finish()?;
    if let Some(kn) = &r.knots {
        let path = knots.map(Path::to_path_buf).or_else(|| out.map(|o| sibling(o, ".knots.csv")));
        if let Some(path) = path {
            let mut csv = CsvOut::create(Some(&path), &hash, cfg.seed, &["t", "amplitude"])?;
            for (t, a) in kn.times.iter().zip(&kn.amplitudes) {
                csv.row([num(*t), num(*a)])?;
            }
            csv.finish()?;
        }
    }
    if let Some(path) = increments {
        let Some(u) = &r.increments else {
            bail!("Unsupported: increments are undefined for mixtures of systems with different poles");
        };
        let mut csv = CsvOut::create(Some(path), &hash, cfg.seed, &["k", "re", "im"])?;
        write_complex_rows(&mut csv, 0, u)?;
        csv.finish()?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SeriesKind {
    Process,
    Increments,
}

/// Reads `k,re,im` rows, skipping `#` comment lines and the header.
pub fn read_series(path: &Path) -> Result<Vec<C64>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            let s = rec.get(i).with_context(|| format!("row {} has no column {i}", values.len()))?;
            s.trim().parse::<f64>().with_context(|| format!("bad number {s:?}"))
        };
        values.push(C64::new(field(1)?, field(2)?));
    }
    Ok(values)
}

/// Theoretical autocovariance at lags `0..=maxlag`, when the config pins one down.
fn autocov_theory(cfg: &RunConfig, kind: SeriesKind, maxlag: usize) -> Result<Option<Vec<f64>>> {
    let (sys, spec) = match (&cfg.system, &cfg.innovation) {
        (Some(s), Some(i)) if cfg.components.is_empty() => (s.build()?, i.build()?),
        _ => return Ok(None),
    };
    let Ok(var0) = spec.rescale(sys.step())?.variance() else { return Ok(None) };
    let unit = rescale_system(&sys, sys.step())?;
    Ok(match kind {
        SeriesKind::Increments => Some(increment_autocorr_theory(&unit, var0, maxlag).iter().map(|v| v.re).collect()),
        SeriesKind::Process if unit.is_stationary() => {
            let r = StationaryAutocorr::new(&unit, var0)?;
            Some((0..=maxlag).map(|k| r.eval(k as f64).re).collect())
        }
        SeriesKind::Process => None,
    })
}

pub fn stats(cfg: &RunConfig, input: &Path, kind: SeriesKind, out: Option<&Path>) -> Result<()> {
    let x = read_series(input)?;
    let maxlag = cfg.maxlag.unwrap_or(DEFAULT_MAXLAG);
    let theory = autocov_theory(cfg, kind, maxlag)?;
    let report = empirical_autocorr(&x, maxlag, theory.as_deref())?;
    write_report(out, cfg, &report)
}

fn scaled_bound(name: &str, value: f64, tol: f64) -> StatCheck {
    StatCheck::upper_bound(name, value, tol)
}

/// Systems and innovations of the process, one pair per component.
fn parts(cfg: &RunConfig) -> Result<Vec<(PoleZeroSystemF64, InnovationSpec)>> {
    if cfg.components.is_empty() {
        Ok(vec![(cfg.system()?, cfg.innovation()?)])
    } else {
        cfg.components.iter().map(|c| Ok((c.system.build()?, c.innovation.build()?))).collect()
    }
}

/// Generates a realization and checks it against the model. Returns whether every check passed.
pub fn validate(cfg: &RunConfig, out: Option<&Path>) -> Result<bool> {
    let r = realize(cfg)?;
    let parts = parts(cfg)?;
    let step = parts[0].0.step();
    let units = parts
        .iter()
        .map(|(s, i)| Ok((rescale_system(s, s.step())?, i.rescale(step)?)))
        .collect::<Result<Vec<_>>>()?;
    let sys = &units[0].0;
    let scale = r.samples.iter().fold(1.0f64, |m, v| m.max(v.norm()));
    let mut report = StatReport::default();

    if let Some(u) = &r.increments {
        let recovered = apply_localization(sys, &r.as_signal())?;
        let err = recovered.samples.iter().zip(&u[sys.order()..]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        report.checks.push(scaled_bound("increment recovery", err, 1e-9 * scale));
    }
    report.checks.push(scaled_bound("boundary residuals", r.boundary.max_abs(), 1e-12 * scale));
    for (i, (s, _)) in units.iter().enumerate() {
        let bl = discrete_bspline_filter(s)?;
        let f = spectral_factorize_detailed(&bl)?;
        let bscale = bl.taps().iter().fold(1.0f64, |m, t| m.max(t.norm()));
        report.checks.push(scaled_bound(&format!("factorization residual {i}"), f.residual, 1e-9 * bscale));
    }

    let Some(u) = &r.increments else {
        write_report(out, cfg, &report)?;
        return Ok(report.all_pass());
    };
    let n = sys.order();
    let variances: Option<Vec<f64>> = units.iter().map(|(_, i)| i.variance().ok()).collect();
    if let Some(vars) = variances {
        let maxlag = n + 2;
        let mut theory = vec![0.0; maxlag + 1];
        for ((s, _), v) in units.iter().zip(&vars) {
            for (t, x) in theory.iter_mut().zip(increment_autocorr_theory(s, *v, maxlag)) {
                *t += x.re;
            }
        }
        report.extend(empirical_autocorr(u, maxlag, Some(&theory))?);
    }
    let gaussian = units.iter().all(|(_, i)| {
        matches!(i, InnovationSpec::Gaussian { .. }) || matches!(i, InnovationSpec::SymmetricStable { alpha, .. } if *alpha == 2.0)
    });
    if gaussian && units.len() == 1 && u.len() >= MIN_WHITENESS_LENGTH {
        let e = whiten_increments(sys, &Signal::new(0, u.clone()))?;
        // Drop the start-up transient of the causal recursion.
        let skip = (64 * (n + 1)).min(u.len() - MIN_WHITENESS_LENGTH);
        report.extend(whiteness_check(&e.samples[skip..])?);
    }
    let t = tuples(u, 1, n + 1);
    if t.len() >= MIN_CHARFN_TUPLES {
        // Frequencies scaled to the typical size of a nonzero increment.
        let nonzero: Vec<f64> = t.iter().map(|v| v[0].abs()).filter(|&a| a > 0.0).collect();
        let spread = if nonzero.is_empty() { 1.0 } else { nonzero.iter().sum::<f64>() / nonzero.len() as f64 };
        let omegas: Vec<Vec<f64>> = (1..=10).map(|j| vec![0.3 * j as f64 / spread]).collect();
        let theory = omegas
            .iter()
            .map(|w| units.iter().try_fold(C64::new(1.0, 0.0), |acc, (s, i)| Ok::<_, Error>(acc * charfn_increment(i, s, w)?)))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        report.extend(empirical_charfn(&t, &omegas, Some(&theory), r.seed ^ 0x5eed)?);
    }
    write_report(out, cfg, &report)?;
    Ok(report.all_pass())
}
