//! Browser bindings: three small operations over the shipped scenarios,
//! each returning a JSON string (`{"error": ...}` on failure).

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use nrgit_core::builtin::builtin;
use nrgit_core::hull::hull_vertices;
use nrgit_core::point::ProjPoint;
use nrgit_core::rep::Character;
use nrgit_core::scenario::{load, Overrides, Scenario};
use nrgit_core::stability::{adapted_window, kirwan_beta, torus_classify};
use nrgit_core::{Rat, Result};

fn scenario(name: &str, scale: Option<i64>) -> Result<Scenario> {
    let text = builtin(name).ok_or_else(|| nrgit_core::Error::Validation(format!("unknown scenario {name}")))?;
    load(text, &Overrides { scale, ..Overrides::default() })
}

fn finish(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

fn named_point<'a>(sc: &'a Scenario, name: &str) -> Result<&'a ProjPoint> {
    sc.point(name)
}

/// The 27 torus weights of the two-points-and-a-line example, their hull
/// vertices and the named points a user can pick.
#[wasm_bindgen]
pub fn hexagon() -> String {
    finish((|| {
        let sc = scenario("6.1", None)?;
        let pts: Vec<Vec<Rat>> = sc.rep.weights().iter().map(|w| w.iter().map(|&a| Rat::from_int(a)).collect()).collect();
        let hull = hull_vertices(&pts)?;
        Ok(json!({
            "weights": sc.rep.weights(),
            "hull": hull,
            "points": sc.points.keys().collect::<Vec<_>>(),
            "chi0": sc.chi0,
        }))
    })())
}

/// Hilbert–Mumford verdict of a named point of the two-points-and-a-line
/// example at the character `chi` (comma-separated rationals).
#[wasm_bindgen]
pub fn classify(point: &str, chi: &str) -> String {
    finish((|| {
        let sc = scenario("6.1", None)?;
        let x = named_point(&sc, point)?;
        let chi = Character::parse_csv(chi)?;
        let v = torus_classify(x, &sc.rep, &chi)?;
        Ok(serde_json::to_value(v).expect("serialisable"))
    })())
}

/// Kirwan index β of a named point of the same example at `chi`.
#[wasm_bindgen]
pub fn beta(point: &str, chi: &str) -> String {
    finish((|| {
        let sc = scenario("6.1", None)?;
        let x = named_point(&sc, point)?;
        let chi = Character::parse_csv(chi)?;
        let b = kirwan_beta(x, &sc.rep, &chi, &sc.inner)?;
        Ok(json!({ "beta": b.beta, "norm_sq": b.norm_sq, "zero": b.is_zero() }))
    })())
}

/// Weight ladder and adapted window of a shipped scenario under L^{⊗scale}.
#[wasm_bindgen]
pub fn ladder_window(name: &str, scale: u32) -> String {
    finish((|| {
        let sc = scenario(name, Some(i64::from(scale)))?;
        let w = adapted_window(&sc.rep, Some(&sc.chi0))?;
        Ok(json!({
            "ladder": sc.rep.weight_ladder().values,
            "low": w.low,
            "high": w.high,
            "well_adapted_high": w.well_adapted_high,
        }))
    })())
}
