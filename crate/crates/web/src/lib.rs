//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export wraps a plain Rust function of the same name with an
//! `_impl` suffix, so the logic can be tested natively.

use bosent::fock::GeneratorSpec;
use bosent::witnesses::{
    csi_ratio, integrated_g2m, number_squeezing_direct, qfi_many, spin_squeezing, twin_fock_csi_approx,
    twin_fock_csi_exact,
};
use bosent::{CoherentSpinState, FockVector, TwoModeState};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `N` the page may request; keeps each call well under a frame.
pub const MAX_N: usize = 100_000;

/// `[2m, exact, approx]` triples for `2m = 2, 4, ..., max_order`, flattened.
#[wasm_bindgen]
pub fn fig1_curve(n: usize, max_order: usize) -> Result<Vec<f64>, JsError> {
    fig1_curve_impl(n, max_order).map_err(|e| JsError::new(&e))
}

pub fn fig1_curve_impl(n: usize, max_order: usize) -> Result<Vec<f64>, String> {
    if n % 2 != 0 || !(4..=MAX_N).contains(&n) {
        return Err(format!("N must be even and between 4 and {MAX_N}"));
    }
    let top = max_order.min(n / 2) / 2;
    let mut out = Vec::with_capacity(3 * top);
    for m in 1..=top {
        out.push((2 * m) as f64);
        out.push(twin_fock_csi_exact(n, m).map_err(|e| e.to_string())?);
        out.push(twin_fock_csi_approx(n, m).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct SplitReport {
    n: usize,
    z: f64,
    phi: f64,
    g_aa: f64,
    g_bb: f64,
    g_ab: f64,
    csi: Option<f64>,
    eta2: Option<f64>,
    xi2: Option<f64>,
    /// `F_Q` for `J_x`, `J_y`, `J_z`.
    qfi: [f64; 3],
    qfi_bound: f64,
}

/// Witnesses of the coherent spin state `|z, phi; N>`, as JSON.
#[wasm_bindgen]
pub fn coherent_split_report(z: f64, phi: f64, n: usize) -> Result<String, JsError> {
    coherent_split_report_impl(z, phi, n).map_err(|e| JsError::new(&e))
}

pub fn coherent_split_report_impl(z: f64, phi: f64, n: usize) -> Result<String, String> {
    if n == 0 || n > 2000 {
        return Err("N must be between 1 and 2000".into());
    }
    let psi = CoherentSpinState::new(z, phi, n).map_err(|e| e.to_string())?.to_fock();
    let c = integrated_g2m(&psi, 1).map_err(|e| e.to_string())?;
    let q = qfi_many(&psi, &[GeneratorSpec::x(), GeneratorSpec::y(), GeneratorSpec::z()]).map_err(|e| e.to_string())?;
    let report = SplitReport {
        n,
        z,
        phi,
        g_aa: c.g_aa,
        g_bb: c.g_bb,
        g_ab: c.g_ab,
        csi: csi_ratio(&c).ok(),
        eta2: number_squeezing_direct(&psi).ok(),
        xi2: spin_squeezing(&psi).ok(),
        qfi: [q[0], q[1], q[2]],
        qfi_bound: n as f64,
    };
    serde_json::to_string(&report).map_err(|e| e.to_string())
}

/// `F_Q` of a state for `J_n`, `n = (sin t, 0, cos t)`, at `steps + 1`
/// angles `t` in `[0, pi]`. `kind` is `"twin_fock"` or `"coherent"`.
#[wasm_bindgen]
pub fn qfi_direction_sweep(kind: &str, n: usize, z: f64, steps: usize) -> Result<Vec<f64>, JsError> {
    qfi_direction_sweep_impl(kind, n, z, steps).map_err(|e| JsError::new(&e))
}

pub fn qfi_direction_sweep_impl(kind: &str, n: usize, z: f64, steps: usize) -> Result<Vec<f64>, String> {
    if n == 0 || n > 2000 || steps == 0 || steps > 2000 {
        return Err("N and steps must be between 1 and 2000".into());
    }
    let psi = match kind {
        "twin_fock" => FockVector::twin_fock(n),
        "coherent" => CoherentSpinState::new(z, 0.0, n).map(|s| s.to_fock()),
        other => return Err(format!("unknown state kind {other:?}")),
    }
    .map_err(|e| e.to_string())?;
    Ok((0..=steps)
        .map(|i| {
            let t = std::f64::consts::PI * i as f64 / steps as f64;
            let g = GeneratorSpec::from_angles(t, 0.0);
            4.0 * psi.angular_moments(&g).1
        })
        .collect())
}
