//! Sparse deconvolution experiments: instance generation and solver comparisons.
//!
//! An instance is `y = Hx + u` where `H` is the tall full-convolution matrix of
//! a geometric filter tuned to a target condition ratio `σ/s` of `HᵀH`, `x` is
//! sparse and `u` is white Gaussian noise at a fixed SNR. The penalty is the
//! firm penalty with `ρ` a fraction of `s` and `τ = 3ρ·std(u)`.

use std::fs;
use std::path::Path;

use log::warn;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{convolution_matrix, gram_extreme_eigenvalues, DenseVector, LinearMap};
use crate::penalty::{FirmPenalty, Penalty};
use crate::smooth::QuadraticTerm;
use crate::solver::{run, IterationTrace, Problem, SolverConfig, Variant};

pub const SIGNAL_LEN: usize = 90;
pub const FILTER_LEN: usize = 31;
pub const SNR_DB: f64 = 10.0;
pub const SPARSITY: usize = 9;
pub const REFERENCE_ITERS: usize = 10_000;
pub const DISTANCE_THRESHOLD: f64 = 1e-6;

// Upper end of the filter decay parameter searched by the design bisection.
const MAX_DECAY: f64 = 0.95;

/// `k` nonzeros at uniformly chosen positions, magnitudes uniform in `[1, 2]`
/// with random signs.
pub fn generate_sparse_signal(n: usize, k: usize, rng: &mut impl Rng) -> Result<DenseVector> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "sparsity {k} exceeds signal length {n}"
        )));
    }
    let mut x = DenseVector::zeros(n);
    for i in index::sample(rng, n, k) {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        x.as_mut_slice()[i] = sign * rng.random_range(1.0..=2.0);
    }
    Ok(x)
}

/// Adds white Gaussian noise at `snr_db` relative to the mean power of `clean`.
///
/// Returns the noisy signal and the generating standard deviation.
pub fn add_noise_snr(clean: &DenseVector, snr_db: f64, rng: &mut impl Rng) -> Result<(DenseVector, f64)> {
    let power = clean.mean_square();
    if power == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let std = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let y = clean
        .iter()
        .map(|&v| v + std * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok((y, std))
}

/// `(1, a, a², …, a^{L-1})`
pub fn geometric_filter(decay: f64, length: usize) -> Vec<f64> {
    (0..length).map(|k| decay.powi(k as i32)).collect()
}

/// `σ/s` of `HᵀH` for the convolution matrix of `filter` on `signal_len` samples.
pub fn condition_ratio(filter: &[f64], signal_len: usize) -> Result<f64> {
    let map = LinearMap::new(convolution_matrix(filter, signal_len)?);
    let (s, sigma) = gram_extreme_eigenvalues(&map)?;
    Ok(sigma / s)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterDesign {
    pub taps: Vec<f64>,
    pub decay: f64,
    pub ratio: f64,
}

/// Picks the geometric filter whose condition ratio matches `target_ratio`
/// within relative tolerance `tol`, by bisection on the decay parameter.
pub fn design_filter(target_ratio: f64, length: usize, signal_len: usize, tol: f64) -> Result<FilterDesign> {
    if !(target_ratio > 1.0) || length == 0 || !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "filter design needs target > 1, length > 0 and tol > 0 (target {target_ratio}, length {length}, tol {tol})"
        )));
    }
    let ratio_at = |a: f64| condition_ratio(&geometric_filter(a, length), signal_len);
    let max_ratio = ratio_at(MAX_DECAY)?;
    if target_ratio > max_ratio || length == 1 {
        return Err(Error::DesignFailure {
            target: target_ratio,
            min: 1.0,
            max: if length == 1 { 1.0 } else { max_ratio },
        });
    }
    let (mut lo, mut hi) = (0.0, MAX_DECAY);
    let mut best = (MAX_DECAY, max_ratio);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let r = ratio_at(mid)?;
        if (r - target_ratio).abs() < (best.1 - target_ratio).abs() {
            best = (mid, r);
        }
        if (r / target_ratio - 1.0).abs() <= 1e-3 * tol {
            break;
        }
        if r < target_ratio {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (decay, ratio) = best;
    if (ratio / target_ratio - 1.0).abs() > tol {
        return Err(Error::DesignFailure {
            target: target_ratio,
            min: 1.0,
            max: max_ratio,
        });
    }
    Ok(FilterDesign {
        taps: geometric_filter(decay, length),
        decay,
        ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    /// Target `σ/s`.
    pub target_ratio: f64,
    /// `ρ` as a fraction of `s`.
    pub rho_fraction: f64,
    pub sparsity: usize,
    pub n_seeds: usize,
    pub master_seed: u64,
    pub signal_len: usize,
    pub filter_len: usize,
    pub snr_db: f64,
    /// Relative tolerance on the achieved condition ratio.
    pub ratio_tol: f64,
    /// Step as a fraction of each variant's bound (ISTA always runs at `1/σ`).
    pub alpha_fraction: f64,
    pub lambda: f64,
    pub max_iters: usize,
    pub reference_iters: usize,
    pub distance_threshold: f64,
    pub variants: Vec<Variant>,
}

impl ExperimentSpec {
    fn base(name: &str, target_ratio: f64, rho_fraction: f64) -> Self {
        Self {
            name: name.to_string(),
            target_ratio,
            rho_fraction,
            sparsity: SPARSITY,
            n_seeds: 20,
            master_seed: 2016,
            signal_len: SIGNAL_LEN,
            filter_len: FILTER_LEN,
            snr_db: SNR_DB,
            ratio_tol: 0.02,
            alpha_fraction: SolverConfig::DEFAULT_ALPHA_FRACTION,
            lambda: SolverConfig::DEFAULT_LAMBDA,
            max_iters: 5000,
            reference_iters: REFERENCE_ITERS,
            distance_threshold: DISTANCE_THRESHOLD,
            variants: vec![Variant::MainFg, Variant::ShiftFg, Variant::Ista],
        }
    }

    /// `σ/s = 15.96`, `ρ = s`.
    pub fn exp1() -> Self {
        Self::base("exp1", 15.96, 1.0)
    }

    /// `σ/s = 5.44`, `ρ = s/2`.
    pub fn exp2() -> Self {
        Self::base("exp2", 5.44, 0.5)
    }

    pub fn design(&self) -> Result<FilterDesign> {
        design_filter(self.target_ratio, self.filter_len, self.signal_len, self.ratio_tol)
    }

    /// Seed of the `index`-th instance, derived from the master seed.
    pub fn instance_seed(&self, index: usize) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(index as u64 + 1);
        rng.random()
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho_fraction > 0.0 && self.rho_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "rho fraction must lie in (0, 1], got {}",
                self.rho_fraction
            )));
        }
        if !(self.alpha_fraction > 0.0 && self.alpha_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha fraction must lie in (0, 1], got {}",
                self.alpha_fraction
            )));
        }
        if !(self.lambda > 0.0 && self.lambda < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "relaxation must lie in (0, 1), got {}",
                self.lambda
            )));
        }
        if self.sparsity == 0 || self.sparsity > self.signal_len {
            return Err(Error::InvalidArgument(format!(
                "sparsity must lie in 1..={}, got {}",
                self.signal_len, self.sparsity
            )));
        }
        Ok(())
    }
}

/// One generated deconvolution problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub filter: Vec<f64>,
    pub map: LinearMap,
    pub y: DenseVector,
    pub penalty: FirmPenalty,
    pub noise_std: f64,
    pub ground_truth: DenseVector,
    pub seed: u64,
}

/// On-disk form of a [`ProblemInstance`]; `H` is rebuilt from the filter and
/// the signal length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub filter: Vec<f64>,
    pub signal: DenseVector,
    pub noise_std: f64,
    pub seed: u64,
    pub penalty: FirmPenalty,
    pub y: DenseVector,
}

impl ProblemInstance {
    /// Draws an instance from `seed` with the given filter and penalty rule.
    pub fn generate(spec: &ExperimentSpec, filter: &[f64], seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let map = LinearMap::with_gram_extremes(convolution_matrix(filter, spec.signal_len)?)?;
        let (s, _) = map.gram_extremes()?;
        let x = generate_sparse_signal(spec.signal_len, spec.sparsity, &mut rng)?;
        let clean = map.apply(&x)?;
        let (y, noise_std) = add_noise_snr(&clean, spec.snr_db, &mut rng)?;
        let rho = spec.rho_fraction * s;
        let penalty = FirmPenalty::new(3.0 * rho * noise_std, rho)?;
        Ok(Self {
            filter: filter.to_vec(),
            map,
            y,
            penalty,
            noise_std,
            ground_truth: x,
            seed,
        })
    }

    pub fn gram_extremes(&self) -> (f64, f64) {
        self.map
            .cached_gram_extremes()
            .expect("instances are built with cached Gram extremes")
    }

    pub fn problem(&self) -> Result<Problem<QuadraticTerm>> {
        Ok(Problem::new(
            QuadraticTerm::new(self.map.clone(), self.y.clone())?,
            Penalty::Firm(self.penalty),
        ))
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            filter: self.filter.clone(),
            signal: self.ground_truth.clone(),
            noise_std: self.noise_std,
            seed: self.seed,
            penalty: self.penalty,
            y: self.y.clone(),
        }
    }

    pub fn from_file(file: InstanceFile) -> Result<Self> {
        let map = LinearMap::with_gram_extremes(convolution_matrix(&file.filter, file.signal.len())?)?;
        file.y.check_len(map.range_dim())?;
        let penalty = FirmPenalty::new(file.penalty.tau(), file.penalty.rho())?;
        Ok(Self {
            filter: file.filter,
            map,
            y: file.y,
            penalty,
            noise_std: file.noise_std,
            ground_truth: file.signal,
            seed: file.seed,
        })
    }

    pub fn save_json(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(&self.to_file())?)?;
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(&fs::read_to_string(path)?)?;
        Self::from_file(file)
    }
}

/// Designs the filter and draws the instance for `seed`.
pub fn build_instance(spec: &ExperimentSpec, seed: u64) -> Result<ProblemInstance> {
    ProblemInstance::generate(spec, &spec.design()?.taps, seed)
}

/// Minimizer estimate from `iters` ISTA iterations at `α = 1/σ`.
pub fn ista_reference(problem: &Problem<QuadraticTerm>, iters: usize) -> Result<IterationTrace> {
    let cfg = SolverConfig::for_problem(problem, Variant::Ista, iters)?;
    run(problem, &cfg)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantRun {
    pub variant: Variant,
    pub alpha: f64,
    pub iterations_to_threshold: Option<usize>,
    pub final_cost: f64,
    pub final_distance: f64,
    pub final_fp_residual: Option<f64>,
    #[serde(skip)]
    pub trace: Option<IterationTrace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeedReport {
    pub index: usize,
    pub seed: u64,
    pub s: f64,
    pub sigma: f64,
    pub tau: f64,
    pub rho: f64,
    pub noise_std: f64,
    pub reference_cost: f64,
    pub reference_fp_residual: Option<f64>,
    pub runs: Vec<VariantRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub instance: Option<ProblemInstance>,
}

impl SeedReport {
    pub fn run(&self, variant: Variant) -> Option<&VariantRun> {
        self.runs.iter().find(|r| r.variant == variant)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub seeds_reaching_threshold: usize,
    /// Median over seeds; runs that never reach the threshold count as `max_iters + 1`.
    pub median_iterations: Option<f64>,
}

/// How often `first` reached the threshold strictly sooner than `second`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseComparison {
    pub first: Variant,
    pub second: Variant,
    pub first_faster: usize,
    pub second_faster: usize,
    pub ties: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub spec: ExperimentSpec,
    pub filter: FilterDesign,
    pub seeds: Vec<SeedReport>,
    pub summaries: Vec<VariantSummary>,
    pub comparisons: Vec<PairwiseComparison>,
}

impl ExperimentReport {
    pub fn comparison(&self, first: Variant, second: Variant) -> Option<&PairwiseComparison> {
        self.comparisons.iter().find(|c| c.first == first && c.second == second)
    }

    /// Writes `report.json` plus per-seed instance JSON and trace CSV files.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(self)?)?;
        for seed in &self.seeds {
            if let Some(inst) = &seed.instance {
                inst.save_json(dir.join(format!("seed{:03}_instance.json", seed.index)))?;
            }
            for run in &seed.runs {
                if let Some(trace) = &run.trace {
                    let path = dir.join(format!("seed{:03}_{}.csv", seed.index, run.variant));
                    trace.write_csv(fs::File::create(path)?)?;
                }
            }
        }
        Ok(())
    }
}

fn run_seed(spec: &ExperimentSpec, design: &FilterDesign, index: usize) -> Result<SeedReport> {
    let seed = spec.instance_seed(index);
    let instance = ProblemInstance::generate(spec, &design.taps, seed)?;
    let problem = instance.problem()?;
    let (s, sigma) = instance.gram_extremes();
    let reference = ista_reference(&problem, spec.reference_iters)?;

    let mut runs = Vec::with_capacity(spec.variants.len());
    for &variant in &spec.variants {
        let alpha = match variant {
            Variant::Ista => 1.0 / sigma,
            v => problem.default_alpha(v, spec.alpha_fraction)?,
        };
        let cfg = SolverConfig {
            variant,
            alpha,
            lambda: spec.lambda,
            max_iters: spec.max_iters,
            tol: 0.0,
            reference: Some(reference.primal.clone()),
        };
        let trace = run(&problem, &cfg)?;
        let last = *trace.last();
        runs.push(VariantRun {
            variant,
            alpha,
            iterations_to_threshold: trace.iterations_to_distance(spec.distance_threshold),
            final_cost: last.cost,
            final_distance: last.dist_to_ref.unwrap_or(f64::NAN),
            final_fp_residual: last.fp_residual,
            trace: Some(trace),
        });
    }

    Ok(SeedReport {
        index,
        seed,
        s,
        sigma,
        tau: instance.penalty.tau(),
        rho: instance.penalty.rho(),
        noise_std: instance.noise_std,
        reference_cost: reference.last().cost,
        reference_fp_residual: reference.last().fp_residual,
        runs,
        error: None,
        instance: Some(instance),
    })
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    })
}

/// Runs every seed of `spec` and aggregates iterations-to-threshold.
///
/// A seed whose solver fails is kept in the report with its error message
/// and excluded from the aggregates.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    spec.validate()?;
    let design = spec.design()?;

    // seeds draw from their own RNG streams, so running them on separate
    // threads leaves the report unchanged
    let results: Vec<Result<SeedReport>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..spec.n_seeds)
            .map(|index| {
                let design = &design;
                scope.spawn(move || run_seed(spec, design, index))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("seed worker panicked"))
            .collect()
    });
    let seeds: Vec<SeedReport> = results
        .into_iter()
        .enumerate()
        .map(|(index, result)| {
            result.unwrap_or_else(|e| {
                warn!("{}: seed {index} aborted: {e}", spec.name);
                SeedReport {
                    index,
                    seed: spec.instance_seed(index),
                    s: f64::NAN,
                    sigma: f64::NAN,
                    tau: f64::NAN,
                    rho: f64::NAN,
                    noise_std: f64::NAN,
                    reference_cost: f64::NAN,
                    reference_fp_residual: None,
                    runs: Vec::new(),
                    error: Some(e.to_string()),
                    instance: None,
                }
            })
        })
        .collect();

    let ok: Vec<&SeedReport> = seeds.iter().filter(|s| s.error.is_none()).collect();
    let iters = |seed: &SeedReport, v: Variant| {
        seed.run(v)
            .map(|r| r.iterations_to_threshold.unwrap_or(spec.max_iters + 1))
    };

    let summaries = spec
        .variants
        .iter()
        .map(|&variant| VariantSummary {
            variant,
            seeds_reaching_threshold: ok
                .iter()
                .filter(|s| s.run(variant).is_some_and(|r| r.iterations_to_threshold.is_some()))
                .count(),
            median_iterations: median(ok.iter().filter_map(|s| iters(s, variant).map(|n| n as f64)).collect()),
        })
        .collect();

    let mut comparisons = Vec::new();
    for (i, &first) in spec.variants.iter().enumerate() {
        for &second in &spec.variants[i + 1..] {
            let mut c = PairwiseComparison {
                first,
                second,
                first_faster: 0,
                second_faster: 0,
                ties: 0,
            };
            for seed in &ok {
                if let (Some(a), Some(b)) = (iters(seed, first), iters(seed, second)) {
                    match a.cmp(&b) {
                        std::cmp::Ordering::Less => c.first_faster += 1,
                        std::cmp::Ordering::Greater => c.second_faster += 1,
                        std::cmp::Ordering::Equal => c.ties += 1,
                    }
                }
            }
            comparisons.push(c);
        }
    }

    Ok(ExperimentReport {
        spec: spec.clone(),
        filter: design,
        seeds,
        summaries,
        comparisons,
    })
}
