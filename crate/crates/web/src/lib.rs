//! WebAssembly bindings for the demo page in `www/`. Each export takes plain
//! numbers and returns a JSON string; the `*_json` functions carry the logic
//! so they can be tested natively.

use bpdirac::basis::{Basis, BasisSpec, NuclearModel};
use bpdirac::dirac::{exact_energy, AngularKappa, DiracSpectrum, SolveOptions};
use bpdirac::twophoton::{differential_rate, required_kappas, total_rate, Gauge, MultipoleChannel, SpectrumSet};
use bpdirac::units::speed_of_light;
use bpdirac::PrecisionCtx;
use serde_json::json;
use wasm_bindgen::prelude::*;

fn spec(kind: &str, order: usize, count: usize, radius: f64) -> Result<BasisSpec, String> {
    match kind {
        "bpoly" => BasisSpec::bpoly(order, radius),
        "bspline" => BasisSpec::bspline(order, count, radius),
        other => return Err(format!("unknown basis {other:?}")),
    }
    .map_err(|e| e.to_string())
}

/// Every basis function sampled on `points` equally spaced radii.
pub fn basis_curves_json(kind: &str, order: usize, count: usize, radius: f64, points: usize) -> Result<String, String> {
    let ctx = PrecisionCtx::DOUBLE;
    let basis = Basis::new(&spec(kind, order, count, radius)?, ctx).map_err(|e| e.to_string())?;
    let n = points.max(2);
    let r: Vec<f64> = (0..n).map(|i| radius * i as f64 / (n - 1) as f64).collect();
    let mut curves = vec![Vec::with_capacity(n); basis.len()];
    for &x in &r {
        let v = basis.eval_all(&ctx.real(x)).map_err(|e| e.to_string())?;
        for (curve, y) in curves.iter_mut().zip(v) {
            curve.push(y.to_f64());
        }
    }
    Ok(json!({ "r": r, "curves": curves }).to_string())
}

/// Bound levels of one κ against the closed-form energies.
pub fn spectrum_json(z: f64, kappa: i32, order: usize, radius: f64, digits: u32, max_n: u32) -> Result<String, String> {
    let err = |e: bpdirac::Error| e.to_string();
    let ctx = PrecisionCtx::new(digits).map_err(err)?;
    let c = speed_of_light(ctx);
    let k = AngularKappa::new(kappa).map_err(err)?;
    let basis = Basis::new(&spec("bpoly", order, 0, radius)?, ctx).map_err(err)?;
    let s = DiracSpectrum::compute(&basis, &NuclearModel::point(z), k, &c, SolveOptions::default()).map_err(err)?;
    let mut levels = Vec::new();
    for (i, o) in s.bound_states().enumerate() {
        let n = k.min_n() + i as u32;
        if n > max_n {
            break;
        }
        let exact = exact_energy(n, k, z, &c).map_err(err)?;
        let rel = ((&exact - &o.energy) / &exact).abs();
        levels.push(json!({
            "state": k.label(n),
            "energy": o.energy.to_sci(16),
            "exact": exact.to_sci(16),
            "rel_diff": rel.to_f64(),
        }));
    }
    Ok(json!({ "levels": levels, "warnings": s.warnings }).to_string())
}

/// 2E1 2s → 1s photon spectrum in both gauges, plus the integrated totals.
pub fn two_photon_json(z: f64, order: usize, radius: f64, digits: u32, points: usize) -> Result<String, String> {
    let err = |e: bpdirac::Error| e.to_string();
    let ctx = PrecisionCtx::new(digits).map_err(err)?;
    let channel: MultipoleChannel = "2E1".parse().map_err(err)?;
    let s = AngularKappa::new(-1).map_err(err)?;
    let basis = Basis::new(&spec("bpoly", order, 0, radius)?, ctx).map_err(err)?;
    let mut set = SpectrumSet::new(basis, &speed_of_light(ctx));
    let nuc = NuclearModel::point(z);
    set.ensure(&nuc, &required_kappas(&[channel], s, s).map_err(err)?, SolveOptions::default())
        .map_err(err)?;
    let sp = set.get(s).map_err(err)?;
    let (i, f) = (sp.bound(2).map_err(err)?, sp.bound(1).map_err(err)?);
    let omega_t = &i.energy - &f.energy;
    let n = points.max(3);
    let (mut y, mut vel, mut len) = (vec![], vec![], vec![]);
    for j in 1..n {
        let w = &omega_t * j as i64 / n as i64;
        y.push(j as f64 / n as f64);
        vel.push(differential_rate(channel, Gauge::Velocity, &set, i, f, &w).map_err(err)?.to_f64());
        len.push(differential_rate(channel, Gauge::Length, &set, i, f, &w).map_err(err)?.to_f64());
    }
    let total = total_rate(channel, &set, i, f, 15, z).map_err(err)?;
    let length = total.length.as_ref().expect("electric channel has a length gauge");
    Ok(json!({
        "omega_t": omega_t.to_f64(),
        "y": y,
        "velocity": vel,
        "length": len,
        "total_velocity": total.velocity.total.to_sci(12),
        "total_length": length.total.to_sci(12),
        "negative_length": length.negative.to_sci(6),
        "negative_velocity": total.velocity.negative.to_sci(6),
        "delta_lv": total.delta_lv.map(|d| d.to_f64()),
    })
    .to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn basis_curves(kind: &str, order: usize, count: usize, radius: f64, points: usize) -> Result<String, JsError> {
    js(basis_curves_json(kind, order, count, radius, points))
}

#[wasm_bindgen]
pub fn spectrum(z: f64, kappa: i32, order: usize, radius: f64, digits: u32, max_n: u32) -> Result<String, JsError> {
    js(spectrum_json(z, kappa, order, radius, digits, max_n))
}

#[wasm_bindgen]
pub fn two_photon(z: f64, order: usize, radius: f64, digits: u32, points: usize) -> Result<String, JsError> {
    js(two_photon_json(z, order, radius, digits, points))
}
