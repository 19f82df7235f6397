//! Douglas-Rachford iterations for `f + g` with `f` strongly convex and `g`
//! weakly convex, plus the ISTA baseline.
//!
//! Four DR variants are provided. The `main` pair applies the plain proximity
//! operators of `f` and `g` and needs `α ≤ 1/√(σρ)`. The `shift` pair moves
//! `(ρ/2)|x|²` from `f` to `g` so both halves are convex, which only needs
//! `αρ < 1` and does not use `∇f`. The suffix gives the order of the
//! reflections: `fg` applies the `g` reflection first.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::penalty::Penalty;
use crate::smooth::DataTerm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variant {
    #[serde(rename = "dr-main-fg")]
    MainFg,
    #[serde(rename = "dr-main-gf")]
    MainGf,
    #[serde(rename = "dr-shift-fg")]
    ShiftFg,
    #[serde(rename = "dr-shift-gf")]
    ShiftGf,
    #[serde(rename = "ista")]
    Ista,
}

impl Variant {
    pub const ALL: [Variant; 5] = [
        Variant::MainFg,
        Variant::MainGf,
        Variant::ShiftFg,
        Variant::ShiftGf,
        Variant::Ista,
    ];

    pub const DOUGLAS_RACHFORD: [Variant; 4] = [Variant::MainFg, Variant::MainGf, Variant::ShiftFg, Variant::ShiftGf];

    pub fn name(self) -> &'static str {
        match self {
            Variant::MainFg => "dr-main-fg",
            Variant::MainGf => "dr-main-gf",
            Variant::ShiftFg => "dr-shift-fg",
            Variant::ShiftGf => "dr-shift-gf",
            Variant::Ista => "ista",
        }
    }

    pub fn is_shifted(self) -> bool {
        matches!(self, Variant::ShiftFg | Variant::ShiftGf)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown variant `{s}`")))
    }
}

/// Outcome of a step-size check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepGate {
    pub bound: f64,
    /// Whether `alpha == bound` is admissible.
    pub inclusive: bool,
    pub passed: bool,
}

impl StepGate {
    fn check(alpha: f64, bound: f64, inclusive: bool) -> Self {
        let passed = alpha > 0.0 && alpha.is_finite() && if inclusive { alpha <= bound } else { alpha < bound };
        Self {
            bound,
            inclusive,
            passed,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        self.bound == f64::INFINITY
    }
}

/// `α ≤ 1/√(σρ)`, unbounded when `ρ = 0`.
pub fn validate_step_main(alpha: f64, sigma: f64, rho: f64) -> StepGate {
    let bound = if rho == 0.0 {
        f64::INFINITY
    } else {
        1.0 / (sigma * rho).sqrt()
    };
    StepGate::check(alpha, bound, true)
}

/// `α < 1/ρ`, unbounded when `ρ = 0`.
pub fn validate_step_shift(alpha: f64, rho: f64) -> StepGate {
    let bound = if rho == 0.0 { f64::INFINITY } else { 1.0 / rho };
    StepGate::check(alpha, bound, false)
}

/// `α ≤ 1/σ`.
pub fn validate_step_ista(alpha: f64, sigma: f64) -> StepGate {
    StepGate::check(alpha, 1.0 / sigma, true)
}

/// `2·prox(z) - z`
pub fn reflect<P>(prox: P, z: &DenseVector) -> Result<DenseVector>
where
    P: FnOnce(&DenseVector) -> Result<DenseVector>,
{
    Ok(prox(z)?.lincomb(2.0, z, -1.0))
}

/// The objective `h = f + g`.
#[derive(Debug, Clone)]
pub struct Problem<F> {
    pub f: F,
    pub g: Penalty,
}

impl<F: DataTerm> Problem<F> {
    pub fn new(f: F, g: Penalty) -> Self {
        Self { f, g }
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn rho(&self) -> f64 {
        self.g.modulus()
    }

    pub fn cost(&self, x: &DenseVector) -> Result<f64> {
        Ok(self.f.eval(x)? + self.g.eval(x))
    }

    /// `|x - J_{αg}(x - α∇f(x))|` at `α = 1/σ`; zero exactly at minimizers of `h`.
    ///
    /// `None` when `f` is not smooth or `ρ ≥ σ`.
    pub fn fixed_point_residual(&self, x: &DenseVector) -> Result<Option<f64>> {
        let Some(sigma) = self.f.gradient_lipschitz() else {
            return Ok(None);
        };
        let alpha = 1.0 / sigma;
        if alpha * self.rho() >= 1.0 {
            return Ok(None);
        }
        let forward = x.lincomb(1.0, &self.f.gradient(x)?, -alpha);
        Ok(Some(self.g.prox(&forward, alpha)?.distance(x)))
    }

    /// Largest admissible step for `variant`, and whether it is itself admissible.
    pub fn step_bound(&self, variant: Variant) -> Result<(f64, bool)> {
        let rho = self.rho();
        match variant {
            Variant::MainFg | Variant::MainGf => {
                let sigma = self.lipschitz(variant)?;
                Ok((validate_step_main(1.0, sigma, rho).bound, true))
            }
            Variant::ShiftFg | Variant::ShiftGf => Ok((validate_step_shift(1.0, rho).bound, false)),
            Variant::Ista => Ok((1.0 / self.lipschitz(variant)?, true)),
        }
    }

    /// `fraction` times the variant's step bound. For unbounded gates the
    /// step falls back to `fraction / s`.
    pub fn default_alpha(&self, variant: Variant, fraction: f64) -> Result<f64> {
        let (bound, _) = self.step_bound(variant)?;
        if bound.is_finite() {
            Ok(fraction * bound)
        } else {
            Ok(fraction / self.f.strong_convexity())
        }
    }

    fn lipschitz(&self, variant: Variant) -> Result<f64> {
        self.f.gradient_lipschitz().ok_or(Error::NotSmooth {
            variant: variant.name(),
        })
    }
}

/// One DR variant at a fixed step, exposing the raw double reflection `U` and
/// the primal extraction.
#[derive(Debug)]
pub struct DouglasRachford<'a, F> {
    problem: &'a Problem<F>,
    variant: Variant,
    alpha: f64,
}

impl<'a, F: DataTerm> DouglasRachford<'a, F> {
    /// Validates the step against the variant's gate.
    pub fn new(problem: &'a Problem<F>, variant: Variant, alpha: f64) -> Result<Self> {
        let rho = problem.rho();
        let s = problem.f.strong_convexity();
        let gate = match variant {
            Variant::MainFg | Variant::MainGf => {
                let sigma = problem.lipschitz(variant)?;
                validate_step_main(alpha, sigma, rho)
            }
            Variant::ShiftFg | Variant::ShiftGf => validate_step_shift(alpha, rho),
            Variant::Ista => return Err(Error::InvalidArgument("ista is not a Douglas-Rachford variant".into())),
        };
        if !gate.passed {
            return Err(Error::InvalidStep {
                variant: variant.name(),
                alpha,
                bound: gate.bound,
            });
        }
        if rho > s {
            return Err(Error::ShiftedTermNonconvex { rho, s });
        }
        Ok(Self {
            problem,
            variant,
            alpha,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn prox_f(&self, z: &DenseVector) -> Result<DenseVector> {
        if self.variant.is_shifted() {
            self.problem.f.shifted_prox(z, self.alpha, self.problem.rho())
        } else {
            self.problem.f.prox(z, self.alpha)
        }
    }

    fn prox_g(&self, z: &DenseVector) -> Result<DenseVector> {
        if self.variant.is_shifted() {
            self.problem.g.shifted_prox(z, self.alpha)
        } else {
            self.problem.g.prox(z, self.alpha)
        }
    }

    /// The undamped double reflection (Peaceman-Rachford operator).
    pub fn double_reflection(&self, z: &DenseVector) -> Result<DenseVector> {
        match self.variant {
            Variant::MainFg | Variant::ShiftFg => {
                let r = reflect(|v| self.prox_g(v), z)?;
                reflect(|v| self.prox_f(v), &r)
            }
            _ => {
                let r = reflect(|v| self.prox_f(v), z)?;
                reflect(|v| self.prox_g(v), &r)
            }
        }
    }

    /// `(1-λ)z + λ·U(z)`
    pub fn step(&self, z: &DenseVector, lambda: f64) -> Result<DenseVector> {
        let u = self.double_reflection(z)?;
        Ok(z.lincomb(1.0 - lambda, &u, lambda))
    }

    /// Point whose image minimizes `h` once `z` is a fixed point.
    pub fn primal(&self, z: &DenseVector) -> Result<DenseVector> {
        match self.variant {
            Variant::MainFg | Variant::ShiftFg => self.prox_g(z),
            _ => self.prox_f(z),
        }
    }
}

/// `prox_g(x - α∇f(x), α)`
pub fn ista_step<F: DataTerm>(problem: &Problem<F>, x: &DenseVector, alpha: f64) -> Result<DenseVector> {
    let sigma = problem.lipschitz(Variant::Ista)?;
    let gate = validate_step_ista(alpha, sigma);
    if !gate.passed {
        return Err(Error::InvalidStep {
            variant: Variant::Ista.name(),
            alpha,
            bound: gate.bound,
        });
    }
    let forward = x.lincomb(1.0, &problem.f.gradient(x)?, -alpha);
    problem.g.prox(&forward, alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub variant: Variant,
    pub alpha: f64,
    /// Relaxation, strictly inside (0, 1) for DR variants; ignored by ISTA.
    pub lambda: f64,
    pub max_iters: usize,
    /// Stop once `|z⁺ - z| ≤ tol`.
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reference: Option<DenseVector>,
}

impl SolverConfig {
    pub const DEFAULT_LAMBDA: f64 = 0.5;
    pub const DEFAULT_ALPHA_FRACTION: f64 = 0.99;

    /// λ = 0.5, α at 0.99 of the variant's bound (`1/σ` for ISTA), tol 0.
    pub fn for_problem<F: DataTerm>(problem: &Problem<F>, variant: Variant, max_iters: usize) -> Result<Self> {
        let fraction = if variant == Variant::Ista {
            1.0
        } else {
            Self::DEFAULT_ALPHA_FRACTION
        };
        Ok(Self {
            variant,
            alpha: problem.default_alpha(variant, fraction)?,
            lambda: Self::DEFAULT_LAMBDA,
            max_iters,
            tol: 0.0,
            reference: None,
        })
    }

    pub fn with_reference(mut self, reference: DenseVector) -> Self {
        self.reference = Some(reference);
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.variant != Variant::Ista && !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "relaxation must lie in (0, 1), got {}",
                self.lambda
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be nonnegative, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    /// `h` at the primal extraction; `+∞` if outside the domain of `f`.
    pub cost: f64,
    /// `None` on the initial row.
    pub step_norm: Option<f64>,
    pub fp_residual: Option<f64>,
    pub dist_to_ref: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub config: SolverConfig,
    pub rows: Vec<TraceRow>,
    /// Final primal extraction `x*`.
    pub primal: DenseVector,
    /// Final driver iterate `z*` (equal to `x*` for ISTA).
    pub driver: DenseVector,
    pub converged: bool,
}

/// JSON summary: config echo plus the final point.
#[derive(Debug, Clone, Serialize)]
pub struct TraceSummary<'a> {
    pub config: &'a SolverConfig,
    pub iterations: usize,
    pub converged: bool,
    pub final_cost: f64,
    pub final_fp_residual: Option<f64>,
    pub primal: &'a DenseVector,
    pub driver: &'a DenseVector,
}

impl IterationTrace {
    pub const CSV_HEADER: [&'static str; 5] = ["iter", "cost", "step_norm", "fp_residual", "dist_to_ref"];

    pub fn iterations(&self) -> usize {
        self.rows.last().map_or(0, |r| r.iter)
    }

    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("trace always holds the initial row")
    }

    /// First iteration whose distance to the reference is at most `threshold`.
    pub fn iterations_to_distance(&self, threshold: f64) -> Option<usize> {
        self.rows
            .iter()
            .find(|r| r.dist_to_ref.is_some_and(|d| d <= threshold))
            .map(|r| r.iter)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(Self::CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                r.iter.to_string(),
                format_float(r.cost),
                r.step_norm.map(format_float).unwrap_or_default(),
                r.fp_residual.map(format_float).unwrap_or_default(),
                r.dist_to_ref.map(format_float).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn summary(&self) -> TraceSummary<'_> {
        TraceSummary {
            config: &self.config,
            iterations: self.iterations(),
            converged: self.converged,
            final_cost: self.last().cost,
            final_fp_residual: self.last().fp_residual,
            primal: &self.primal,
            driver: &self.driver,
        }
    }
}

/// 17 significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

/// Runs from `z⁰ = 0`.
pub fn run<F: DataTerm>(problem: &Problem<F>, config: &SolverConfig) -> Result<IterationTrace> {
    run_from(problem, config, DenseVector::zeros(problem.dim()), |_, _| {})
}

/// Runs from `z0`, calling `observe(n, zⁿ)` on every driver iterate including the first.
pub fn run_from<F: DataTerm>(
    problem: &Problem<F>,
    config: &SolverConfig,
    z0: DenseVector,
    mut observe: impl FnMut(usize, &DenseVector),
) -> Result<IterationTrace> {
    config.validate()?;
    z0.check_len(problem.dim())?;
    if let Some(r) = &config.reference {
        r.check_len(problem.dim())?;
    }

    enum Engine<'p, F> {
        Dr(DouglasRachford<'p, F>),
        Ista,
    }
    let engine = match config.variant {
        Variant::Ista => {
            // surface gate violations before the first iteration
            ista_step(problem, &z0, config.alpha)?;
            Engine::Ista
        }
        v => Engine::Dr(DouglasRachford::new(problem, v, config.alpha)?),
    };
    let advance = |z: &DenseVector| match &engine {
        Engine::Dr(dr) => dr.step(z, config.lambda),
        Engine::Ista => ista_step(problem, z, config.alpha),
    };
    let extract = |z: &DenseVector| match &engine {
        Engine::Dr(dr) => dr.primal(z),
        Engine::Ista => Ok(z.clone()),
    };
    let record = |iter: usize, x: &DenseVector, step_norm: Option<f64>| -> Result<TraceRow> {
        Ok(TraceRow {
            iter,
            cost: problem.cost(x)?,
            step_norm,
            fp_residual: problem.fixed_point_residual(x)?,
            dist_to_ref: config.reference.as_ref().map(|r| x.distance(r)),
        })
    };

    let mut z = z0;
    let mut x = extract(&z)?;
    observe(0, &z);
    let mut rows = Vec::with_capacity(config.max_iters.min(100_000) + 1);
    rows.push(record(0, &x, None)?);
    let mut converged = false;

    for iter in 1..=config.max_iters {
        let next = advance(&z)?;
        if !next.is_finite() {
            return Err(Error::Divergence { iter });
        }
        let step_norm = next.distance(&z);
        z = next;
        x = extract(&z)?;
        if !x.is_finite() {
            return Err(Error::Divergence { iter });
        }
        observe(iter, &z);
        rows.push(record(iter, &x, Some(step_norm))?);
        if step_norm <= config.tol {
            converged = true;
            break;
        }
    }

    Ok(IterationTrace {
        config: config.clone(),
        rows,
        primal: x,
        driver: z,
        converged,
    })
}
