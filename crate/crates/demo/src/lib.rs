//! Browser demo: three small computations exposed to JavaScript.
//!
//! The numerical work lives in [`curves`], which returns flat `Vec<f64>`
//! arrays and plain string errors so it also runs in native tests. The
//! `#[wasm_bindgen]` exports only convert errors.

pub mod curves;

use wasm_bindgen::prelude::*;

fn to_js<T>(r: Result<T, String>) -> Result<T, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// `[theta_1, value_1, ...]`: normalized log-likelihood of the flip family
/// on data simulated at `theta0`.
#[wasm_bindgen(js_name = likelihoodCurve)]
pub fn likelihood_curve(theta0: f64, std: f64, n: usize, seed: u64, resolution: usize) -> Result<Vec<f64>, JsError> {
    to_js(curves::likelihood_curve(theta0, std, n, seed, resolution))
}

/// `[a_1, I(a_1), ...]`: large deviations rate of the symbol frequency
/// under i.i.d. Bernoulli(`p`).
#[wasm_bindgen(js_name = rateCurve)]
pub fn rate_curve(p: f64, points: usize) -> Result<Vec<f64>, JsError> {
    to_js(curves::rate_curve(p, points))
}

/// `[ell_1, L_1, ...]`: psi-mixing constants of the flip chain.
#[wasm_bindgen(js_name = mixingProfile)]
pub fn mixing_profile(q: f64, max_ell: usize) -> Result<Vec<f64>, JsError> {
    to_js(curves::mixing_profile(q, max_ell))
}
