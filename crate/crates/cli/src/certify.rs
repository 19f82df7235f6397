//! Empirical Lipschitz checks on the first instance of an experiment.

use anyhow::Result;
use drsplit::analysis::{axis_pairs, bound_ug, empirical_lipschitz, gaussian_pairs, rate_t, rate_v, RateInputs};
use drsplit::experiment::{build_instance, ExperimentSpec};
use drsplit::solver::DouglasRachford;
use drsplit::{DenseVector, Variant};

struct Check {
    name: String,
    measured: f64,
    bound: f64,
}

/// Prints one line per check and returns whether all of them held.
pub fn run(spec: &ExperimentSpec, pairs: usize, seed: u64) -> Result<bool> {
    let inst = build_instance(spec, spec.instance_seed(0))?;
    let problem = inst.problem()?;
    let (s, sigma) = inst.gram_extremes();
    let rho = problem.rho();
    let dim = problem.dim();
    let radius = 3.0 * inst.penalty.knee();
    let mut checks = Vec::new();

    let alpha_main = 1.0 / (sigma * rho).sqrt();
    let ug = |z: &DenseVector| Ok(problem.g.prox(z, alpha_main)?.lincomb(2.0, z, -1.0));
    checks.push(Check {
        name: format!("U_g at alpha {alpha_main:.6}"),
        measured: empirical_lipschitz(ug, axis_pairs(dim, radius), pairs, seed)?,
        bound: bound_ug(alpha_main, rho)?,
    });

    for variant in [Variant::MainFg, Variant::MainGf] {
        let dr = DouglasRachford::new(&problem, variant, alpha_main)?;
        checks.push(Check {
            name: format!("{variant} double reflection at alpha {alpha_main:.6}"),
            measured: empirical_lipschitz(|z| dr.double_reflection(z), gaussian_pairs(dim, radius), pairs, seed)?,
            bound: 1.0,
        });
    }

    let alpha_t = 1.0 / (sigma * s).sqrt();
    let t = DouglasRachford::new(&problem, Variant::MainFg, alpha_t)?;
    checks.push(Check {
        name: format!("T at alpha {alpha_t:.6}"),
        measured: empirical_lipschitz(|z| t.double_reflection(z), gaussian_pairs(dim, radius), pairs, seed)?,
        bound: rate_t(&RateInputs::new(alpha_t, rho, s, sigma)?)?,
    });

    // with ρ = s the strict shift gate excludes α = 1/s itself
    let alpha_v = if rho < s { 1.0 / s } else { 0.99 / rho };
    let v = DouglasRachford::new(&problem, Variant::ShiftFg, alpha_v)?;
    checks.push(Check {
        name: format!("V at alpha {alpha_v:.6}"),
        measured: empirical_lipschitz(|z| v.double_reflection(z), gaussian_pairs(dim, radius), pairs, seed)?,
        bound: rate_v(&RateInputs::new(alpha_v, rho, s, sigma)?)?,
    });

    let mut ok = true;
    for c in &checks {
        let held = c.measured <= c.bound + 1e-9;
        ok &= held;
        println!(
            "{} {}: {}: empirical {:.9} bound {:.9}",
            if held { "ok" } else { "VIOLATION" },
            spec.name,
            c.name,
            c.measured,
            c.bound
        );
    }
    Ok(ok)
}
