//! Browser bindings. Each export takes plain strings and numbers and returns
//! a JSON string; errors come back as JS exceptions carrying the message.

use fewrel::config::ExperimentConfig;
use fewrel::experiments::sweep;
use fewrel::groups::{GroupSpec, MarkedFiniteGroup};
use fewrel::walk::WalkChain;
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest `|G| · 2n` state space the page will iterate.
const MAX_STATES: usize = 200_000;

#[derive(Serialize)]
struct WalkReport {
    order: usize,
    marks: Vec<usize>,
    irreducible: bool,
    generated: Vec<usize>,
    period: Option<usize>,
    subgroup: Option<Vec<usize>>,
    tv: Vec<f64>,
}

fn marked(spec: &str, marks: &str) -> Result<MarkedFiniteGroup, String> {
    let spec: GroupSpec = spec.parse().map_err(|e: fewrel::Error| e.to_string())?;
    let marks = marks
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad mark {t:?}")))
        .collect::<Result<Vec<_>, _>>()?;
    let group = spec.build().map_err(|e| e.to_string())?;
    group.mark(marks).map_err(|e| e.to_string())
}

fn chain(spec: &str, marks: &str) -> Result<WalkChain, String> {
    let g = marked(spec, marks)?;
    if g.order() * 2 * g.rank() > MAX_STATES {
        return Err(format!(
            "state space too large for the page (limit {MAX_STATES})"
        ));
    }
    WalkChain::build(g, None).map_err(|e| e.to_string())
}

pub fn walk_profile_json(spec: &str, marks: &str, max_l: usize) -> Result<String, String> {
    let chain = chain(spec, marks)?;
    let g = chain.group();
    let irreducible = chain.is_irreducible();
    let (period, subgroup, tv) = if irreducible {
        let period = chain.period().map_err(|e| e.to_string())?;
        let subgroup = chain.index2_subgroup().ok().map(|h| h.members().to_vec());
        let tv = chain
            .tv_profile(max_l)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|p| p.tv)
            .collect();
        (Some(period), subgroup, tv)
    } else {
        (None, None, Vec::new())
    };
    let report = WalkReport {
        order: g.order(),
        marks: g.marks().to_vec(),
        irreducible,
        generated: g.generated().members().to_vec(),
        period,
        subgroup,
        tv,
    };
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

pub fn summed_distribution_json(spec: &str, marks: &str, l: usize) -> Result<String, String> {
    let d = chain(spec, marks)?
        .summed_distribution(l)
        .map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&d).expect("floats serialize"))
}

#[allow(clippy::too_many_arguments)]
pub fn surjection_sweep_json(
    j: &str,
    f: &str,
    q: u32,
    rho: usize,
    lengths: &str,
    trials: usize,
    seed: u64,
) -> Result<String, String> {
    let n = f.split_whitespace().count();
    let text = format!("n = {n}\nl = {lengths}\nrho = {rho}\nj = {j}\nf = {f}\nq = {q}\ntrials = {trials}\nseed = {seed}\n");
    let cfg = ExperimentConfig::parse(&text).map_err(|e| e.to_string())?;
    let report = sweep(&cfg).map_err(|e| e.to_string())?;
    Ok(serde_json::to_string(&report).expect("report serializes"))
}

/// Irreducibility, period, index-2 subgroup and TV-to-target for `l = 1..=max_l`.
#[wasm_bindgen(js_name = walkProfile)]
pub fn walk_profile(spec: &str, marks: &str, max_l: usize) -> Result<String, JsError> {
    walk_profile_json(spec, marks, max_l).map_err(|e| JsError::new(&e))
}

/// Law of the image of a uniform reduced word of length `l`.
#[wasm_bindgen(js_name = summedDistribution)]
pub fn summed_distribution(spec: &str, marks: &str, l: usize) -> Result<String, JsError> {
    summed_distribution_json(spec, marks, l).map_err(|e| JsError::new(&e))
}

/// Surjection-probability sweep; `f` is a space-separated list of images.
#[wasm_bindgen(js_name = surjectionSweep)]
pub fn surjection_sweep(
    j: &str,
    f: &str,
    q: u32,
    rho: usize,
    lengths: &str,
    trials: usize,
    seed: u64,
) -> Result<String, JsError> {
    surjection_sweep_json(j, f, q, rho, lengths, trials, seed).map_err(|e| JsError::new(&e))
}
