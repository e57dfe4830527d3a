//! WebAssembly bindings for the browser demo in `www/`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::json;
use wasm_bindgen::prelude::*;

use julia_rays::harness::{render, RenderSpec, Window};
use julia_rays::raytrace::{landing_estimate, trace_ray, trail_document, EPS_LAND, TAIL_FRACTION};
use julia_rays::{Angle, ContinuedFraction, QuadraticMap, TraceConfig};

fn parse_angles(list: &str) -> Result<Vec<Angle>, String> {
    list.split(|ch: char| ch == ',' || ch.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Angle>().map_err(|e| e.to_string()))
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn render_pixels(
    c_re: f64,
    c_im: f64,
    width: usize,
    height: usize,
    window: [f64; 4],
    rays: &str,
    orbit: usize,
    max_iter: usize,
) -> Result<Vec<u8>, String> {
    let map = QuadraticMap::from_c(Complex64::new(c_re, c_im)).map_err(|e| e.to_string())?;
    let window = Window::new(window[0], window[1], window[2], window[3]).map_err(|e| e.to_string())?;
    let spec = RenderSpec {
        rays: parse_angles(rays)?,
        critical_orbit: orbit,
        max_iter,
        trace: TraceConfig::with_depth(48, 4),
        ..RenderSpec::new(width, height, window)
    };
    Ok(render(&map, &spec).map_err(|e| e.to_string())?.image.to_rgba())
}

pub fn trace_document(c_re: f64, c_im: f64, angle: &str, depth: usize, substeps: usize) -> Result<String, String> {
    let map = QuadraticMap::from_c(Complex64::new(c_re, c_im)).map_err(|e| e.to_string())?;
    let t: Angle = angle.parse().map_err(|e: julia_rays::Error| e.to_string())?;
    let trail = trace_ray(&map, &t, &TraceConfig::with_depth(depth, substeps)).map_err(|e| e.to_string())?;
    let landing = landing_estimate(&trail, EPS_LAND, TAIL_FRACTION).ok();
    Ok(trail_document(&trail, landing.as_ref()).to_string())
}

pub fn rotation_document(theta_cf: &str, err_bits: u32) -> Result<String, String> {
    let cf: ContinuedFraction = theta_cf.parse().map_err(|e: julia_rays::Error| e.to_string())?;
    let classes = cf.classify(40).map_err(|e| e.to_string())?;
    let err = BigRational::new(BigInt::from(1), BigInt::from(1) << err_bits);
    let t = cf.critical_angle(&err).map_err(|e| e.to_string())?;
    let map = QuadraticMap::from_rotation(&cf).map_err(|e| e.to_string())?;
    Ok(json!({
        "classification": classes,
        "critical_angle": t.value,
        "critical_angle_f64": t.value.to_f64(),
        "error_bits": err_bits,
        "c": [map.c.re, map.c.im],
    })
    .to_string())
}

/// RGBA pixels of the filled Julia set with ray and critical-orbit overlays.
#[wasm_bindgen(js_name = renderRgba)]
#[allow(clippy::too_many_arguments)]
pub fn render_rgba(
    c_re: f64,
    c_im: f64,
    width: usize,
    height: usize,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    rays: &str,
    orbit: usize,
    max_iter: usize,
) -> Result<Vec<u8>, JsError> {
    render_pixels(c_re, c_im, width, height, [re_min, re_max, im_min, im_max], rays, orbit, max_iter)
        .map_err(|e| JsError::new(&e))
}

/// The JSON trail document of one ray.
#[wasm_bindgen(js_name = traceRay)]
pub fn trace_ray_json(c_re: f64, c_im: f64, angle: &str, depth: usize, substeps: usize) -> Result<String, JsError> {
    trace_document(c_re, c_im, angle, depth, substeps).map_err(|e| JsError::new(&e))
}

/// Classification, critical angle and parameter `c` for a rotation number.
#[wasm_bindgen(js_name = rotationInfo)]
pub fn rotation_info(theta_cf: &str, err_bits: u32) -> Result<String, JsError> {
    rotation_document(theta_cf, err_bits).map_err(|e| JsError::new(&e))
}
