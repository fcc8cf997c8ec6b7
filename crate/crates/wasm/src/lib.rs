//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export takes a family spec as JSON (the same shape the CLI uses,
//! e.g. `{"kind": "cycle", "n": 12}`) and returns a JSON string with the
//! graph, a 2D layout and the computed result.

use std::collections::VecDeque;

use coarsegeo::families::{detour_path, generate, FamilySpec, SplitMix64};
use coarsegeo::hyperbolicity::{delta_four_point, delta_slim, HyperbolicityReport};
use coarsegeo::quasigeodesic::{fit_c, tame, tame_bound, verify_qg, MorseEstimate, ParamPath, QgVerdict};
use coarsegeo::rational::{self, int};
use coarsegeo::subspaces::triangle_experiment;
use coarsegeo::{GeodesicSpace, QGParams, TriangleExperimentRecord};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest graph the demo will build.
pub const MAX_VERTICES: usize = 400;
const SLIM_MAX_N: usize = 60;

#[derive(Serialize)]
pub struct View {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    /// Positions in the unit square.
    pub layout: Vec<(f64, f64)>,
}

fn build(spec_json: &str) -> Result<(FamilySpec, GeodesicSpace, View), String> {
    let spec: FamilySpec = serde_json::from_str(spec_json).map_err(|e| format!("bad family spec: {e}"))?;
    let g = generate(&spec).map_err(|e| e.to_string())?;
    if g.n() > MAX_VERTICES {
        return Err(format!("{} vertices is more than the demo's {MAX_VERTICES}", g.n()));
    }
    let view = View {
        n: g.n(),
        edges: g.edges().iter().map(|e| (e.u, e.v)).collect(),
        layout: layout(&spec, &g),
    };
    let space = GeodesicSpace::new(g).map_err(|e| e.to_string())?;
    Ok((spec, space, view))
}

/// Circle for cycles, lattice for grids, BFS layers from vertex 0 otherwise.
pub fn layout(spec: &FamilySpec, g: &coarsegeo::Graph) -> Vec<(f64, f64)> {
    let n = g.n();
    match *spec {
        FamilySpec::Cycle { .. } => (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                (0.5 + 0.45 * a.cos(), 0.5 + 0.45 * a.sin())
            })
            .collect(),
        FamilySpec::Grid { k } => {
            let step = if k > 1 { 0.9 / (k - 1) as f64 } else { 0.0 };
            (0..n)
                .map(|v| (0.05 + step * (v % k) as f64, 0.05 + step * (v / k) as f64))
                .collect()
        }
        _ => {
            let mut depth = vec![usize::MAX; n];
            let mut layers: Vec<Vec<usize>> = Vec::new();
            depth[0] = 0;
            let mut queue = VecDeque::from([0]);
            while let Some(u) = queue.pop_front() {
                if layers.len() <= depth[u] {
                    layers.push(Vec::new());
                }
                layers[depth[u]].push(u);
                for &(v, _) in g.neighbors(u) {
                    if depth[v] == usize::MAX {
                        depth[v] = depth[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            let mut pos = vec![(0.5, 0.5); n];
            let rows = layers.len().max(2) - 1;
            for (d, layer) in layers.iter().enumerate() {
                for (j, &v) in layer.iter().enumerate() {
                    pos[v] = (
                        (j as f64 + 0.5) / layer.len() as f64,
                        0.05 + 0.9 * d as f64 / rows as f64,
                    );
                }
            }
            pos
        }
    }
}

#[derive(Serialize)]
struct DeltaOut {
    graph: View,
    four_point: HyperbolicityReport,
    slim: Option<HyperbolicityReport>,
}

pub fn family_delta_json(spec_json: &str) -> Result<String, String> {
    let (_, space, view) = build(spec_json)?;
    let out = DeltaOut {
        four_point: delta_four_point(space.metric()),
        slim: (space.n() <= SLIM_MAX_N).then(|| delta_slim(&space, 16)),
        graph: view,
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

#[derive(Serialize)]
struct TameOut {
    graph: View,
    input: ParamPath,
    #[serde(with = "rational::serde_str")]
    input_c: rational::Rational,
    tamed: ParamPath,
    morse: MorseEstimate,
    #[serde(with = "rational::serde_str")]
    bound: rational::Rational,
    verdict: QgVerdict,
}

pub fn tame_detour_json(spec_json: &str, a: usize, b: usize, detours: usize, seed: u64) -> Result<String, String> {
    let (_, space, view) = build(spec_json)?;
    let n = space.n();
    if a >= n || b >= n {
        return Err(format!("endpoints must be below {n}"));
    }
    let err = |e: coarsegeo::Error| e.to_string();
    let input = detour_path(&space, &mut SplitMix64::new(seed), a, b, detours, 16).map_err(err)?;
    let (tamed, morse) = tame(&space, &input, 64).map_err(err)?;
    let bound = tame_bound(morse.r, space.max_weight());
    let verdict = verify_qg(space.metric(), &tamed, &QGParams::new(int(1), bound).map_err(err)?).map_err(err)?;
    let out = TameOut {
        graph: view,
        input_c: fit_c(space.metric(), &input, int(1)).map_err(err)?,
        input,
        tamed,
        morse,
        bound,
        verdict,
    };
    Ok(serde_json::to_string(&out).expect("serializable"))
}

#[derive(Serialize)]
struct TriangleOut {
    graph: View,
    run: TriangleExperimentRecord,
}

pub fn triangle_json(spec_json: &str, corners: [usize; 3], lambda: &str, c: &str) -> Result<String, String> {
    let (_, space, view) = build(spec_json)?;
    let q = QGParams::new(rational::parse(lambda)?, rational::parse(c)?).map_err(|e| e.to_string())?;
    let [a, b, c] = corners;
    let run = triangle_experiment(&space, a, b, c, &q, 20_000, 8).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&TriangleOut { graph: view, run }).expect("serializable"))
}

#[wasm_bindgen]
pub fn family_delta(spec_json: &str) -> Result<String, JsValue> {
    family_delta_json(spec_json).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn tame_detour(spec_json: &str, a: usize, b: usize, detours: usize, seed: u32) -> Result<String, JsValue> {
    tame_detour_json(spec_json, a, b, detours, seed as u64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn triangle(spec_json: &str, a: usize, b: usize, c: usize, lambda: &str, c_const: &str) -> Result<String, JsValue> {
    triangle_json(spec_json, [a, b, c], lambda, c_const).map_err(|e| JsValue::from_str(&e))
}
