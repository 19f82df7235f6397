//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Every export returns flat `f64` arrays so the page can draw them directly.
//! The plain Rust functions underneath are what the native tests exercise.

use drsplit::analysis::rate_table;
use drsplit::experiment::{build_instance, ista_reference, ExperimentSpec};
use drsplit::solver::run;
use drsplit::{FirmPenalty, SolverConfig, Variant};
use wasm_bindgen::prelude::*;

/// Samples of the firm penalty and its threshold on `[-range, range]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurves {
    pub t: Vec<f64>,
    pub penalty: Vec<f64>,
    pub threshold: Vec<f64>,
    /// `2·threshold(t) - t`, the reflection used by the splitting.
    pub reflected: Vec<f64>,
}

pub fn threshold_curves(tau: f64, rho: f64, alpha: f64, range: f64, points: usize) -> Result<ThresholdCurves, String> {
    let p = FirmPenalty::new(tau, rho).map_err(|e| e.to_string())?;
    if points < 2 || range.is_nan() || range <= 0.0 {
        return Err("need at least two points and a positive range".into());
    }
    let t: Vec<f64> = (0..points)
        .map(|k| -range + 2.0 * range * k as f64 / (points - 1) as f64)
        .collect();
    let threshold = t
        .iter()
        .map(|&v| p.threshold(v, alpha))
        .collect::<drsplit::Result<Vec<f64>>>()
        .map_err(|e| e.to_string())?;
    Ok(ThresholdCurves {
        penalty: t.iter().map(|&v| p.eval(v)).collect(),
        reflected: threshold.iter().zip(&t).map(|(x, v)| 2.0 * x - v).collect(),
        threshold,
        t,
    })
}

/// Bounds over `points` steps up to `alpha_max`, column by column; missing
/// entries are NaN.
pub fn rate_columns(rho: f64, s: f64, sigma: f64, alpha_max: f64, points: usize) -> Result<[Vec<f64>; 5], String> {
    let rows = rate_table(rho, s, sigma, alpha_max, points).map_err(|e| e.to_string())?;
    let nan = |v: Option<f64>| v.unwrap_or(f64::NAN);
    Ok([
        rows.iter().map(|r| r.alpha).collect(),
        rows.iter().map(|r| r.bound_uf).collect(),
        rows.iter().map(|r| nan(r.bound_ug)).collect(),
        rows.iter().map(|r| nan(r.rate_t)).collect(),
        rows.iter().map(|r| nan(r.rate_v)).collect(),
    ])
}

/// Distance to the ISTA reference per iteration for the three solvers the
/// experiments compare.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTraces {
    pub ratio: f64,
    pub main_fg: Vec<f64>,
    pub shift_fg: Vec<f64>,
    pub ista: Vec<f64>,
}

pub fn convergence_traces(
    experiment: &str,
    seed_index: usize,
    iters: usize,
    alpha_fraction: f64,
    lambda: f64,
) -> Result<ConvergenceTraces, String> {
    let spec = match experiment {
        "exp1" => ExperimentSpec::exp1(),
        "exp2" => ExperimentSpec::exp2(),
        other => return Err(format!("unknown experiment {other:?}")),
    };
    let err = |e: drsplit::Error| e.to_string();
    let inst = build_instance(&spec, spec.instance_seed(seed_index)).map_err(err)?;
    let (s, sigma) = inst.gram_extremes();
    let problem = inst.problem().map_err(err)?;
    let reference = ista_reference(&problem, spec.reference_iters).map_err(err)?.primal;

    let trace_for = |variant: Variant| -> Result<Vec<f64>, String> {
        let mut cfg = SolverConfig::for_problem(&problem, variant, iters)
            .map_err(err)?
            .with_reference(reference.clone());
        if variant != Variant::Ista {
            cfg.alpha = problem.default_alpha(variant, alpha_fraction).map_err(err)?;
            cfg.lambda = lambda;
        }
        let trace = run(&problem, &cfg).map_err(err)?;
        Ok(trace.rows.iter().map(|r| r.dist_to_ref.unwrap_or(f64::NAN)).collect())
    };
    Ok(ConvergenceTraces {
        ratio: sigma / s,
        main_fg: trace_for(Variant::MainFg)?,
        shift_fg: trace_for(Variant::ShiftFg)?,
        ista: trace_for(Variant::Ista)?,
    })
}

/// Flattened `[t, penalty, threshold, reflected]`, each of length `points`.
#[wasm_bindgen(js_name = thresholdCurves)]
pub fn threshold_curves_js(tau: f64, rho: f64, alpha: f64, range: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let c = threshold_curves(tau, rho, alpha, range, points).map_err(|e| JsError::new(&e))?;
    Ok([c.t, c.penalty, c.threshold, c.reflected].concat())
}

/// Flattened `[alpha, bound_uf, bound_ug, rate_t, rate_v]`, each of length `points`.
#[wasm_bindgen(js_name = rateCurves)]
pub fn rate_curves_js(rho: f64, s: f64, sigma: f64, alpha_max: f64, points: usize) -> Result<Vec<f64>, JsError> {
    Ok(rate_columns(rho, s, sigma, alpha_max, points)
        .map_err(|e| JsError::new(&e))?
        .concat())
}

/// Flattened `[ratio, n_main, n_shift, n_ista, main_fg…, shift_fg…, ista…]`.
/// A run stops early only if its iterate stops moving, so the lengths may differ.
#[wasm_bindgen(js_name = convergenceTraces)]
pub fn convergence_traces_js(
    experiment: &str,
    seed_index: usize,
    iters: usize,
    alpha_fraction: f64,
    lambda: f64,
) -> Result<Vec<f64>, JsError> {
    let c = convergence_traces(experiment, seed_index, iters, alpha_fraction, lambda).map_err(|e| JsError::new(&e))?;
    let header = vec![
        c.ratio,
        c.main_fg.len() as f64,
        c.shift_fg.len() as f64,
        c.ista.len() as f64,
    ];
    Ok([header, c.main_fg, c.shift_fg, c.ista].concat())
}
