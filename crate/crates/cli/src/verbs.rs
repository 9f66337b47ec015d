use std::fmt::Write as _;

use bpdirac::basis::{Basis, BasisKind, BasisSpec, NuclearModel};
use bpdirac::dirac::{exact_energy, AngularKappa, DiracSpectrum};
use bpdirac::twophoton::{required_kappas, total_rate, MultipoleChannel, RateResult, Restriction, SpectrumSet};
use bpdirac::units::speed_of_light;
use bpdirac::{BigReal, PrecisionCtx};
use serde_json::json;

use crate::cache::Cache;
use crate::config::{Format, RunConfig};
use crate::CliError;

/// Significant digits in human-readable tables.
const TABLE_DIGITS: usize = 11;

fn kappa(k: i32) -> AngularKappa {
    AngularKappa::new(k).expect("validated")
}

fn describe(spec: &BasisSpec) -> String {
    match spec.kind {
        BasisKind::BPolynomial => format!("B-poly degree {}, R = {}", spec.order, spec.radius),
        BasisKind::BSpline => format!("B-spline k = {}, N = {}, R = {}", spec.order, spec.count, spec.radius),
    }
}

/// Spectrum warnings go to stderr; under `strict` they abort the run.
fn check_warnings(cfg: &RunConfig, s: &DiracSpectrum) -> Result<(), CliError> {
    for w in &s.warnings {
        eprintln!("warning: Z={} kappa={}: {w}", s.nuc.z, s.kappa.value());
    }
    if cfg.output.strict && !s.warnings.is_empty() {
        return Err(CliError::Strict(format!(
            "Z={} kappa={}: {}",
            s.nuc.z,
            s.kappa.value(),
            s.warnings.join("; ")
        )));
    }
    Ok(())
}

fn rel_diff(a: &BigReal, exact: &BigReal) -> BigReal {
    ((exact - a) / exact).abs()
}

pub fn spectrum(cfg: &RunConfig, cache: &Cache) -> Result<String, CliError> {
    let ctx = cfg.ctx()?;
    let c = speed_of_light(ctx);
    let digits = ctx.digits() as usize;
    let mut rows = Vec::new();
    for &z in &cfg.z {
        let basis = Basis::new(&cfg.basis_for(z)?, ctx)?;
        let nuc = cfg.nuclear.model(z);
        for &k in &cfg.kappas {
            let k = kappa(k);
            let s = cache.spectrum(&basis, &nuc, k, &c)?;
            check_warnings(cfg, &s)?;
            for n in k.min_n()..=cfg.max_n {
                let e = &s.bound(n)?.energy;
                let exact = exact_energy(n, k, z, &c)?;
                rows.push((z, k, n, e.clone(), rel_diff(e, &exact), exact));
            }
        }
    }
    Ok(match cfg.output.format {
        Format::Csv => {
            let mut out = String::from("Z,kappa,state,n,energy,exact,rel_diff\n");
            for (z, k, n, e, d, x) in &rows {
                let _ = writeln!(
                    out,
                    "{z},{},{},{n},{},{},{}",
                    k.value(),
                    k.label(*n),
                    e.to_sci(digits),
                    x.to_sci(digits),
                    d.to_sci(3)
                );
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|(z, k, n, e, d, x)| {
                    json!({
                        "z": z, "kappa": k.value(), "state": k.label(*n), "n": n,
                        "energy": e.to_sci(digits), "exact": x.to_sci(digits), "rel_diff": d.to_sci(3),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Table => {
            let mut out = format!("{:>5} {:>8} {:>19} {:>19} {:>10}\n", "Z", "state", "energy", "exact", "rel diff");
            for (z, k, n, e, d, x) in &rows {
                let _ = writeln!(
                    out,
                    "{z:>5} {:>8} {:>19} {:>19} {:>10}",
                    k.label(*n),
                    e.to_sci(TABLE_DIGITS),
                    x.to_sci(TABLE_DIGITS),
                    d.to_sci(2)
                );
            }
            out
        }
    })
}

/// Spectra for every κ the channels need, drawn from the cache.
fn spectrum_set(
    cfg: &RunConfig,
    cache: &Cache,
    spec: &BasisSpec,
    ctx: PrecisionCtx,
    nuc: &NuclearModel,
    channels: &[MultipoleChannel],
) -> Result<SpectrumSet, CliError> {
    let c = speed_of_light(ctx);
    let kappas = required_kappas(channels, kappa(cfg.initial.kappa), kappa(cfg.final_level.kappa))?;
    let mut set = SpectrumSet::new(Basis::new(spec, ctx)?, &c);
    let spectra = kappas
        .into_iter()
        .map(|k| cache.spectrum(set.basis(), nuc, k, &c))
        .collect::<Result<Vec<_>, _>>()?;
    for s in spectra {
        check_warnings(cfg, &s)?;
        set.insert(s)?;
    }
    Ok(set)
}

fn rates_in(
    cfg: &RunConfig,
    set: &SpectrumSet,
    z: f64,
    channels: &[MultipoleChannel],
) -> Result<Vec<RateResult>, CliError> {
    let i = set.get(kappa(cfg.initial.kappa))?.bound(cfg.initial.n)?;
    let f = set.get(kappa(cfg.final_level.kappa))?.bound(cfg.final_level.n)?;
    channels
        .iter()
        .map(|&ch| Ok(total_rate(ch, set, i, f, cfg.quad_points, z)?))
        .collect()
}

fn channel_sum(results: &[RateResult], r: Restriction) -> Option<BigReal> {
    bpdirac::specfun::sum(results.iter().map(|x| x.reported().get(r)))
}

pub fn rate(cfg: &RunConfig, cache: &Cache) -> Result<String, CliError> {
    let ctx = cfg.ctx()?;
    let digits = ctx.digits() as usize;
    let restrictions = cfg.restrictions();
    let mut runs = Vec::new();
    for &z in &cfg.z {
        let spec = cfg.basis_for(z)?;
        let set = spectrum_set(cfg, cache, &spec, ctx, &cfg.nuclear.model(z), &cfg.channels)?;
        runs.push((z, spec, rates_in(cfg, &set, z, &cfg.channels)?));
    }
    Ok(match cfg.output.format {
        Format::Csv => {
            let mut out = String::from("Z,channel,restriction,gauge,rate,delta_lv\n");
            for (z, _, results) in &runs {
                for r in results {
                    let csv = r.to_csv(digits, false);
                    for line in csv.lines() {
                        let label = line.split(',').nth(2).unwrap_or_default();
                        if restrictions.iter().any(|x| x.label() == label) {
                            out.push_str(line);
                            out.push('\n');
                        }
                    }
                }
                for &res in &restrictions {
                    if let Some(s) = channel_sum(results, res) {
                        let _ = writeln!(out, "{z},sum,{},reported,{},", res.label(), s.to_sci(digits));
                    }
                }
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = runs
                .iter()
                .map(|(z, spec, results)| {
                    json!({
                        "z": z,
                        "basis": spec,
                        "digits": digits,
                        "results": results.iter().map(|r| r.to_json(digits)).collect::<Vec<_>>(),
                        "sum": channel_sum(results, Restriction::All).map(|s| s.to_sci(digits)),
                    })
                })
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
        Format::Table => {
            let mut out = String::new();
            for (z, spec, results) in &runs {
                let _ = writeln!(out, "Z = {z}, {}, {digits} digits", describe(spec));
                let mut head = format!("{:<8} {:<9}", "channel", "gauge");
                for r in &restrictions {
                    let _ = write!(head, " {:>18}", format!("W {}", r.label()));
                }
                let _ = writeln!(out, "{head} {:>10}", "delta_lv");
                for res in results {
                    let gauges = [("length", res.length.as_ref()), ("velocity", Some(&res.velocity))];
                    for (g, split) in gauges.into_iter().filter_map(|(g, s)| s.map(|s| (g, s))) {
                        let g = if res.length.is_none() { "none" } else { g };
                        let mut line = format!("{:<8} {:<9}", res.channel.to_string(), g);
                        for &r in &restrictions {
                            let _ = write!(line, " {:>18}", split.get(r).to_sci(TABLE_DIGITS));
                        }
                        let delta = res.delta_lv.as_ref().map(|d| d.to_sci(2)).unwrap_or_default();
                        let _ = writeln!(out, "{line} {delta:>10}");
                    }
                }
                let mut line = format!("{:<8} {:<9}", "sum", "");
                for &r in &restrictions {
                    let s = channel_sum(results, r).map(|s| s.to_sci(TABLE_DIGITS)).unwrap_or_default();
                    let _ = write!(line, " {s:>18}");
                }
                let _ = writeln!(out, "{}\n", line.trim_end());
            }
            out
        }
    })
}

struct ScanRow {
    z: f64,
    spec: BasisSpec,
    digits: u32,
    delta_omega: Option<BigReal>,
    delta_lv: Option<BigReal>,
    status: String,
}

fn status_of(e: &CliError) -> String {
    match e {
        CliError::Numeric(err) => {
            let s = format!("{err:?}");
            let name = s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("error");
            name.chars().fold(String::new(), |mut acc, c| {
                if c.is_uppercase() && !acc.is_empty() {
                    acc.push('_');
                }
                acc.push(c.to_ascii_lowercase());
                acc
            })
        }
        _ => "error".into(),
    }
}

/// Sweeps basis size, cavity radius and precision; each point reports the
/// transition-energy error and the gauge difference of the first channel.
pub fn scan(cfg: &RunConfig, cache: &Cache) -> Result<String, CliError> {
    let channel = cfg.channels[0];
    let ki = kappa(cfg.initial.kappa);
    let kf = kappa(cfg.final_level.kappa);
    let sizes = if cfg.scan.sizes.is_empty() { vec![cfg.size()] } else { cfg.scan.sizes.clone() };
    let digit_list = if cfg.scan.digits.is_empty() { vec![cfg.digits] } else { cfg.scan.digits.clone() };
    let mut rows = Vec::new();
    for &z in &cfg.z {
        let radii = if cfg.scan.radii.is_empty() { vec![cfg.radius_for(z)] } else { cfg.scan.radii.clone() };
        let nuc = cfg.nuclear.model(z);
        for &radius in &radii {
            for &size in &sizes {
                let spec = cfg.basis_with(size, radius)?;
                for &digits in &digit_list {
                    let ctx = PrecisionCtx::new(digits)?;
                    let c = speed_of_light(ctx);
                    let point = spectrum_set(cfg, cache, &spec, ctx, &nuc, &[channel]).and_then(|set| {
                        let r = rates_in(cfg, &set, z, &[channel])?.remove(0);
                        let exact = exact_energy(cfg.initial.n, ki, z, &c)? - exact_energy(cfg.final_level.n, kf, z, &c)?;
                        Ok((rel_diff(&r.omega_t, &exact), r.delta_lv))
                    });
                    let (delta_omega, delta_lv, status) = match point {
                        Ok((dw, dlv)) => (Some(dw), dlv, "ok".to_string()),
                        Err(e @ (CliError::Numeric(_) | CliError::Strict(_))) => (None, None, status_of(&e)),
                        Err(e) => return Err(e),
                    };
                    rows.push(ScanRow {
                        z,
                        spec: spec.clone(),
                        digits,
                        delta_omega,
                        delta_lv,
                        status,
                    });
                }
            }
        }
    }
    let cell = |v: &Option<BigReal>| v.as_ref().map(|x| x.to_sci(6)).unwrap_or_default();
    Ok(match cfg.output.format {
        Format::Csv | Format::Table => {
            let mut out = String::from("Z,basis,n_basis,radius,digits,delta_omega_t,delta_lv,status\n");
            for r in &rows {
                let kind = match r.spec.kind {
                    BasisKind::BPolynomial => "bpoly",
                    BasisKind::BSpline => "bspline",
                };
                let _ = writeln!(
                    out,
                    "{},{kind},{},{},{},{},{},{}",
                    r.z,
                    r.spec.count,
                    r.spec.radius,
                    r.digits,
                    cell(&r.delta_omega),
                    cell(&r.delta_lv),
                    r.status
                );
            }
            out
        }
        Format::Json => {
            let v: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "z": r.z, "basis": r.spec, "digits": r.digits,
                        "delta_omega_t": r.delta_omega.as_ref().map(|x| x.to_sci(6)),
                        "delta_lv": r.delta_lv.as_ref().map(|x| x.to_sci(6)),
                        "status": r.status,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&v).expect("json") + "\n"
        }
    })
}

pub fn cache_list(cache: &Cache) -> Result<String, CliError> {
    let mut out = String::from("hash,Z,kappa,basis,order,count,radius,digits,bytes\n");
    for e in cache.entries()? {
        match &e.key {
            Some(k) => {
                let kind = match k.basis.kind {
                    BasisKind::BPolynomial => "bpoly",
                    BasisKind::BSpline => "bspline",
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{kind},{},{},{},{},{}",
                    e.hash,
                    k.z,
                    k.kappa.value(),
                    k.basis.order,
                    k.basis.count,
                    k.basis.radius,
                    k.digits,
                    e.bytes
                );
            }
            None => {
                let _ = writeln!(out, "{},,,unreadable,,,,,{}", e.hash, e.bytes);
            }
        }
    }
    Ok(out)
}
