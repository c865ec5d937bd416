//! WebAssembly bindings for the demo page. Every export returns a JSON string.

pub mod demo;

use serde::Serialize;
use wasm_bindgen::prelude::*;

fn to_json<T: Serialize>(r: mdpd::Result<T>) -> Result<String, JsValue> {
    let value = r.map_err(|e| JsValue::from_str(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsValue::from_str(&e.to_string()))
}

/// Grid fields and their joint contour labels.
#[wasm_bindgen]
pub fn jcn(size: usize, seed: u32, levels: u32) -> Result<String, JsValue> {
    to_json(demo::jcn_view(size, seed as u64, levels))
}

/// Persistence diagram of the first field's Reeb graph.
#[wasm_bindgen]
pub fn diagram(size: usize, seed: u32, levels: u32) -> Result<String, JsValue> {
    to_json(demo::diagram_view(size, seed as u64, levels))
}

/// Distance between the multi-fields generated from two seeds.
#[wasm_bindgen]
pub fn distance(
    size: usize,
    seed_a: u32,
    seed_b: u32,
    levels: u32,
    q: f64,
) -> Result<String, JsValue> {
    to_json(demo::distance_view(
        size,
        seed_a as u64,
        seed_b as u64,
        levels,
        q,
    ))
}
