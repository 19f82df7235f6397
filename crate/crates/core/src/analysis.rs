//! Closed-form Lipschitz and contraction bounds for the reflection operators,
//! and a sampling estimator to check them against the actual operators.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::solver::format_float;

// Relative slack when checking step preconditions against computed bounds,
// so that `alpha = 1/sqrt(sigma*s)` evaluated in floating point still qualifies.
const STEP_SLACK: f64 = 1e-12;

/// Problem constants entering the contraction rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub alpha: f64,
    /// Weak-convexity modulus of `g`.
    pub rho: f64,
    /// Strong-convexity modulus of `f`.
    pub s: f64,
    /// Lipschitz constant of `∇f`.
    pub sigma: f64,
}

impl RateInputs {
    pub fn new(alpha: f64, rho: f64, s: f64, sigma: f64) -> Result<Self> {
        let r = Self { alpha, rho, s, sigma };
        if !(alpha > 0.0) || !(rho >= 0.0) || !(rho <= s) || !(s > 0.0) || !(s <= sigma) {
            return Err(Error::BoundInapplicable(format!(
                "need alpha > 0 and 0 <= rho <= s <= sigma, got {r:?}"
            )));
        }
        Ok(r)
    }

    /// `s/σ`
    pub fn gamma(&self) -> f64 {
        self.s / self.sigma
    }

    /// `ρ/σ`
    pub fn eta(&self) -> f64 {
        self.rho / self.sigma
    }
}

/// Lipschitz constant of `2J_{αf} - I` when `f - (ρ/2)|·|²` is convex and `∇f`
/// is `σ`-Lipschitz.
pub fn bound_uf(alpha: f64, rho: f64, sigma: f64) -> f64 {
    let a = (1.0 - alpha * sigma).abs() / (1.0 + alpha * sigma);
    let b = (1.0 - alpha * rho).abs() / (1.0 + alpha * rho);
    a.max(b)
}

/// Lipschitz constant of `2J_{αg} - I` for `ρ`-weakly convex `g`.
pub fn bound_ug(alpha: f64, rho: f64) -> Result<f64> {
    if alpha * rho >= 1.0 {
        return Err(Error::StepTooLarge { alpha, rho });
    }
    Ok((1.0 + alpha * rho) / (1.0 - alpha * rho))
}

/// `(1 - α(s-ρ)) / (1 + α(s-ρ))`
pub fn shifted_reflection_rate(alpha: f64, s: f64, rho: f64) -> f64 {
    let d = alpha * (s - rho);
    (1.0 - d) / (1.0 + d)
}

/// Contraction rate of the unshifted double reflection `T_α`; needs `α ≤ 1/√(σs)`.
pub fn rate_t(r: &RateInputs) -> Result<f64> {
    let bound = 1.0 / (r.sigma * r.s).sqrt();
    if r.alpha > bound * (1.0 + STEP_SLACK) {
        return Err(Error::BoundInapplicable(format!(
            "rate of T needs alpha <= 1/sqrt(sigma*s) = {bound}, got {}",
            r.alpha
        )));
    }
    let a = r.alpha;
    let base = 1.0 - a * a * r.s * r.rho;
    let d = a * (r.s - r.rho);
    Ok((base - d) / (base + d))
}

/// Contraction rate of the shifted double reflection `V_α`; needs `α ≤ 1/s`.
pub fn rate_v(r: &RateInputs) -> Result<f64> {
    if r.alpha > (1.0 / r.s) * (1.0 + STEP_SLACK) {
        return Err(Error::BoundInapplicable(format!(
            "rate of V needs alpha <= 1/s = {}, got {}",
            1.0 / r.s,
            r.alpha
        )));
    }
    let d = r.alpha * (r.sigma - r.rho);
    let first = (1.0 - d).abs() / (1.0 + d);
    Ok(first.max(shifted_reflection_rate(r.alpha, r.s, r.rho)))
}

/// Rate of `T_α` at its largest step `α = 1/√(σs)`, in terms of `γ = s/σ`, `η = ρ/σ`.
pub fn mu_t(gamma: f64, eta: f64) -> Result<f64> {
    if !(0.0 <= eta && eta < gamma && gamma <= 1.0) {
        return Err(Error::BoundInapplicable(format!(
            "mu_T needs 0 <= eta < gamma <= 1, got gamma = {gamma}, eta = {eta}"
        )));
    }
    let a = (1.0 - eta) * gamma.sqrt();
    let b = gamma - eta;
    Ok((a - b) / (a + b))
}

/// `η/(2-η)`, a floor on the rate of `V_α` at `α = 1/s`.
pub fn v_lower_bound(eta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::BoundInapplicable(format!("eta must lie in [0, 1], got {eta}")));
    }
    Ok(eta / (2.0 - eta))
}

/// Largest `|Op(x) - Op(y)| / |x - y|` over `n_pairs` sampled pairs.
///
/// Pairs closer than 1e-12 are skipped; if every pair is skipped the sampler
/// is reported as degenerate.
pub fn empirical_lipschitz<Op, S>(mut op: Op, mut sampler: S, n_pairs: usize, seed: u64) -> Result<f64>
where
    Op: FnMut(&DenseVector) -> Result<DenseVector>,
    S: FnMut(&mut ChaCha8Rng) -> (DenseVector, DenseVector),
{
    if n_pairs == 0 {
        return Err(Error::InvalidArgument("need at least one pair".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<f64> = None;
    for _ in 0..n_pairs {
        let (x, y) = sampler(&mut rng);
        let d = x.distance(&y);
        if d < 1e-12 {
            continue;
        }
        let ratio = op(&x)?.distance(&op(&y)?) / d;
        best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
    }
    best.ok_or(Error::DegenerateSampler)
}

/// Independent Gaussian pairs, each point scaled by a random factor in
/// `(0.05, 1]·radius/2` so that coordinates range from near zero out to about
/// `radius`.
pub fn gaussian_pairs(dim: usize, radius: f64) -> impl FnMut(&mut ChaCha8Rng) -> (DenseVector, DenseVector) {
    move |rng| (gaussian_point(rng, dim, radius), gaussian_point(rng, dim, radius))
}

/// Pairs that differ in a single random coordinate by a small offset, which
/// probes the local slope of a separable operator.
pub fn axis_pairs(dim: usize, radius: f64) -> impl FnMut(&mut ChaCha8Rng) -> (DenseVector, DenseVector) {
    move |rng| {
        let x = gaussian_point(rng, dim, radius);
        let mut y = x.clone();
        let i = rng.random_range(0..dim);
        y.as_mut_slice()[i] += 1e-4 * radius * rng.random_range(-1.0..1.0);
        (x, y)
    }
}

fn gaussian_point(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> DenseVector {
    let scale = 0.5 * radius * rng.random_range(0.05..=1.0);
    DenseVector::from_fn(dim, |_| scale * rng.sample::<f64, _>(StandardNormal))
}

/// One line of a rate table; `None` where a bound does not apply at that step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub alpha: f64,
    pub bound_uf: f64,
    pub bound_ug: Option<f64>,
    pub rate_t: Option<f64>,
    pub rate_v: Option<f64>,
}

/// Bounds on a uniform grid of `points` steps in `(0, alpha_max]`.
pub fn rate_table(rho: f64, s: f64, sigma: f64, alpha_max: f64, points: usize) -> Result<Vec<RateRow>> {
    if points == 0 || !(alpha_max > 0.0) {
        return Err(Error::InvalidArgument(
            "rate table needs a positive step range and at least one point".into(),
        ));
    }
    (1..=points)
        .map(|k| {
            let alpha = alpha_max * k as f64 / points as f64;
            let inputs = RateInputs::new(alpha, rho, s, sigma)?;
            Ok(RateRow {
                alpha,
                bound_uf: bound_uf(alpha, s, sigma),
                bound_ug: bound_ug(alpha, rho).ok(),
                rate_t: rate_t(&inputs).ok(),
                rate_v: rate_v(&inputs).ok(),
            })
        })
        .collect()
}

pub fn write_rate_csv<W: Write>(rows: &[RateRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["alpha", "bound_uf", "bound_ug", "rate_t", "rate_v"])?;
    for r in rows {
        let opt = |v: Option<f64>| v.map(format_float).unwrap_or_default();
        w.write_record([
            format_float(r.alpha),
            format_float(r.bound_uf),
            opt(r.bound_ug),
            opt(r.rate_t),
            opt(r.rate_v),
        ])?;
    }
    w.flush()?;
    Ok(())
}
