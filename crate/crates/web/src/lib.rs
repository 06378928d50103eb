//! Browser bindings: per-λ margin over a rectangle of the λ-plane, the boundary
//! norm curve of a finite-spectrum system, and the full operator report.

use delay_margin::stability::{hinf_boundary_norm, operator_margin};
use delay_margin::walton_marshall::{first_crossing, h0_rhp_count};
use delay_margin::{
    Complex64, DelaySystem, Error, GridConfig, MarginConfig, Polynomial, SpectrumDescriptor,
    DEFAULT_TOL,
};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Field value for a `λ` already unstable at `h = 0`.
pub const UNSTABLE_AT_ZERO: f64 = -1.0;

fn check(p: &[f64], q: &[f64]) -> Result<(Polynomial, Polynomial), Error> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::InvalidInput(
            "coefficient arrays must be nonempty".into(),
        ));
    }
    let (p, q) = (Polynomial::from_real(p), Polynomial::from_real(q));
    delay_margin::walton_marshall::check_retarded(&p, &q)?;
    Ok((p, q))
}

/// Scalar margin of `P + λQe^{-sh}` at one `λ`: `-1` when unstable at
/// `h = 0`, `+∞` when stable for every delay.
pub fn lambda_margin(p: &Polynomial, q: &Polynomial, lambda: Complex64) -> Result<f64, Error> {
    if h0_rhp_count(p, q, lambda, DEFAULT_TOL)?.count > 0 {
        return Ok(UNSTABLE_AT_ZERO);
    }
    Ok(first_crossing(p, q, lambda, DEFAULT_TOL)?.map_or(f64::INFINITY, |(h, _)| h))
}

/// Row-major `ny × nx` grid of [`lambda_margin`] over
/// `[re_min, re_max] × [im_min, im_max]`, top row at `im_max`.
pub fn margin_field_native(
    p: &[f64],
    q: &[f64],
    bounds: [f64; 4],
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, Error> {
    let (p, q) = check(p, q)?;
    let [re_min, re_max, im_min, im_max] = bounds;
    let step = |lo: f64, hi: f64, n: usize, k: usize| {
        if n > 1 {
            lo + (hi - lo) * k as f64 / (n - 1) as f64
        } else {
            lo
        }
    };
    let mut out = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        let im = step(im_max, im_min, ny, j);
        for i in 0..nx {
            let lambda = Complex64::new(step(re_min, re_max, nx, i), im);
            // isolated failures (e.g. a root finder stall) show as NaN
            out.push(lambda_margin(&p, &q, lambda).unwrap_or(f64::NAN));
        }
    }
    Ok(out)
}

fn points(flat: &[f64]) -> Result<Vec<Complex64>, Error> {
    if flat.is_empty() || flat.len() % 2 != 0 {
        return Err(Error::InvalidInput(
            "spectrum must be a nonempty list of re, im pairs".into(),
        ));
    }
    Ok(flat.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect())
}

/// Boundary norm curve at delay `h` as JSON; a singular axis point is
/// reported as `{"singular_omega": ω}`.
pub fn boundary_norm_native(
    p: &[f64],
    q: &[f64],
    spectrum: &[f64],
    h: f64,
    points_n: usize,
) -> Result<Value, Error> {
    let (p, q) = check(p, q)?;
    let sys = DelaySystem::new(p, q, SpectrumDescriptor::points(points(spectrum)?))?;
    let cfg = GridConfig {
        points: points_n.max(3),
        max_levels: 2,
        ..GridConfig::default()
    };
    match hinf_boundary_norm(&sys, h, &cfg) {
        Ok(c) => Ok(json!({
            "grid": c.grid,
            "sup": c.sup_estimate,
            "argmax_omega": c.argmax_omega,
            "rhp_zeros": c.rhp_zero_count,
        })),
        Err(Error::SingularOnGrid { omega }) => Ok(json!({ "singular_omega": omega })),
        Err(e) => Err(e),
    }
}

/// Full operator report for `{"p", "q", "spectrum", "h_max"}` (spectrum as a
/// tagged descriptor).
pub fn operator_report_native(problem: &str) -> Result<Value, String> {
    let v: Value = serde_json::from_str(problem).map_err(|e| e.to_string())?;
    let field = |k: &str| {
        v.get(k)
            .cloned()
            .ok_or_else(|| format!("missing field `{k}`"))
    };
    let p: Vec<f64> = serde_json::from_value(field("p")?).map_err(|e| format!("p: {e}"))?;
    let q: Vec<f64> = serde_json::from_value(field("q")?).map_err(|e| format!("q: {e}"))?;
    let spectrum: SpectrumDescriptor =
        serde_json::from_value(field("spectrum")?).map_err(|e| format!("spectrum: {e}"))?;
    let h_max = field("h_max")?.as_f64().ok_or("h_max: expected a number")?;
    let (p, q) = check(&p, &q).map_err(|e| e.to_string())?;
    let sys = DelaySystem::new(p, q, spectrum).map_err(|e| e.to_string())?;
    let report =
        operator_margin(&sys, h_max, &MarginConfig::default()).map_err(|e| e.to_string())?;
    serde_json::to_value(&report).map_err(|e| e.to_string())
}

fn js_err(e: impl ToString) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn margin_field(
    p: Vec<f64>,
    q: Vec<f64>,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    nx: usize,
    ny: usize,
) -> Result<Vec<f64>, JsError> {
    margin_field_native(&p, &q, [re_min, re_max, im_min, im_max], nx, ny).map_err(js_err)
}

#[wasm_bindgen]
pub fn boundary_norm(
    p: Vec<f64>,
    q: Vec<f64>,
    spectrum: Vec<f64>,
    h: f64,
    points: usize,
) -> Result<String, JsError> {
    boundary_norm_native(&p, &q, &spectrum, h, points)
        .map(|v| v.to_string())
        .map_err(js_err)
}

#[wasm_bindgen]
pub fn operator_report(problem: &str) -> Result<String, JsError> {
    operator_report_native(problem)
        .map(|v| v.to_string())
        .map_err(js_err)
}
