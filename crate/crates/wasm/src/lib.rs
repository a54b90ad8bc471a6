//! wasm-bindgen surface for the browser demo in `www/`.
//!
//! Each export is a thin wrapper over [`ops`]; errors become JS exceptions
//! carrying the message string.

use wasm_bindgen::prelude::*;

pub mod ops;

use ops::Model;

fn model(name: &str) -> Result<Model, JsError> {
    Model::parse(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Curve(ops::Curve);

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn modulus(&self) -> f64 {
        self.0.modulus
    }
    #[wasm_bindgen(getter)]
    pub fn offset_c(&self) -> f64 {
        self.0.offset_c
    }
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.0.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.0.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn dx(&self) -> Vec<f64> {
        self.0.dx.clone()
    }
}

/// The closed-form solution sampled over one period `[0, 2]`.
#[wasm_bindgen]
pub fn sample_solution(model_name: &str, r: f64, samples: usize) -> Result<Curve, JsError> {
    ops::sample_curve(model(model_name)?, r, samples)
        .map(Curve)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Portrait(ops::Portrait);

#[wasm_bindgen]
impl Portrait {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.0.x.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.0.y.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn starts(&self) -> Vec<u32> {
        self.0.starts.iter().map(|&i| i as u32).collect()
    }
    #[wasm_bindgen(getter)]
    pub fn periods(&self) -> Vec<f64> {
        self.0.periods.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn highlight(&self) -> usize {
        self.0.highlight
    }
}

/// Phase-plane orbits around the period-2 one.
#[wasm_bindgen]
pub fn phase_portrait(model_name: &str, r: f64, orbits: usize) -> Result<Portrait, JsError> {
    ops::phase_portrait(model(model_name)?, r, orbits)
        .map(Portrait)
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub struct Run(ops::Run);

#[wasm_bindgen]
impl Run {
    #[wasm_bindgen(getter)]
    pub fn t(&self) -> Vec<f64> {
        self.0.t.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn x_sim(&self) -> Vec<f64> {
        self.0.x_sim.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn x_closed(&self) -> Vec<f64> {
        self.0.x_closed.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn stopped(&self) -> Option<String> {
        self.0.stopped.clone()
    }
}

/// Integrates the delay equation from the closed form plus `eps·sin(πt)`.
#[wasm_bindgen]
pub fn perturbed_run(model_name: &str, r: f64, eps: f64, horizon: f64, intervals: usize) -> Result<Run, JsError> {
    ops::perturbed_run(model(model_name)?, r, eps, horizon, intervals)
        .map(Run)
        .map_err(|e| JsError::new(&e))
}
