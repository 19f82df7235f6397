use drsplit::analysis::{empirical_lipschitz, gaussian_pairs};
use drsplit::experiment::{build_instance, ista_reference, ExperimentSpec};
use drsplit::solver::{run, run_from, DouglasRachford};
use drsplit::{DenseVector, IterationTrace, SolverConfig, Variant};

fn exp1_problem() -> (
    drsplit::experiment::ProblemInstance,
    drsplit::Problem<drsplit::QuadraticTerm>,
) {
    let spec = ExperimentSpec::exp1();
    let inst = build_instance(&spec, spec.instance_seed(3)).unwrap();
    let problem = inst.problem().unwrap();
    (inst, problem)
}

#[test]
fn relaxed_iterates_are_fejer_monotone() {
    let (_, problem) = exp1_problem();
    for variant in Variant::DOUGLAS_RACHFORD {
        let cfg = SolverConfig::for_problem(&problem, variant, 3000).unwrap();
        let fixed = run(&problem, &cfg).unwrap().driver;
        let mut dists = Vec::new();
        run_from(&problem, &cfg, DenseVector::zeros(problem.dim()), |_, z| {
            dists.push(z.distance(&fixed))
        })
        .unwrap();
        for w in dists.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "{variant}: {} > {}", w[1], w[0]);
        }
    }
}

#[test]
fn step_norms_never_increase() {
    let (_, problem) = exp1_problem();
    for variant in Variant::DOUGLAS_RACHFORD {
        let cfg = SolverConfig::for_problem(&problem, variant, 400).unwrap();
        let trace = run(&problem, &cfg).unwrap();
        let steps: Vec<f64> = trace.rows.iter().filter_map(|r| r.step_norm).collect();
        for w in steps.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-14, "{variant}");
        }
    }
}

#[test]
fn final_costs_do_not_beat_reference_by_much() {
    let (_, problem) = exp1_problem();
    let reference = ista_reference(&problem, 10_000).unwrap();
    let ref_cost = reference.last().cost;
    for variant in Variant::DOUGLAS_RACHFORD {
        let cfg = SolverConfig::for_problem(&problem, variant, 2000).unwrap();
        let trace = run(&problem, &cfg).unwrap();
        let cost = trace.last().cost;
        assert!(
            cost <= ref_cost + 1e-6 * (1.0 + ref_cost.abs()),
            "{variant}: {cost} vs {ref_cost}"
        );
        assert!(trace.primal.distance(&reference.primal) < 1e-6);
    }
}

#[test]
fn identical_configs_give_identical_traces() {
    let (_, problem) = exp1_problem();
    let cfg = SolverConfig::for_problem(&problem, Variant::ShiftGf, 200).unwrap();
    let csv = |t: &IterationTrace| {
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        buf
    };
    let a = run(&problem, &cfg).unwrap();
    let b = run(&problem, &cfg).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(csv(&a), csv(&b));
}

#[test]
fn shifted_operators_are_nonexpansive_at_default_step() {
    let (inst, problem) = exp1_problem();
    let radius = 3.0 * inst.penalty.knee();
    for variant in [Variant::ShiftFg, Variant::ShiftGf] {
        let alpha = problem.default_alpha(variant, 0.99).unwrap();
        let dr = DouglasRachford::new(&problem, variant, alpha).unwrap();
        let lip = empirical_lipschitz(
            |z| dr.double_reflection(z),
            gaussian_pairs(problem.dim(), radius),
            1000,
            5,
        )
        .unwrap();
        assert!(lip <= 1.0 + 1e-12, "{variant}: {lip}");
    }
}

#[test]
fn zero_iterations_record_only_the_start() {
    let (_, problem) = exp1_problem();
    let cfg = SolverConfig::for_problem(&problem, Variant::MainFg, 0).unwrap();
    let trace = run(&problem, &cfg).unwrap();
    assert_eq!(trace.rows.len(), 1);
    assert_eq!(trace.driver, DenseVector::zeros(problem.dim()));
    assert!(trace.rows[0].step_norm.is_none());
}

#[test]
fn steps_past_the_gate_are_rejected() {
    let (_, problem) = exp1_problem();
    let (bound, _) = problem.step_bound(Variant::MainFg).unwrap();
    assert!(DouglasRachford::new(&problem, Variant::MainFg, bound).is_ok());
    assert!(DouglasRachford::new(&problem, Variant::MainFg, bound * (1.0 + 1e-9)).is_err());
    let (shift_bound, inclusive) = problem.step_bound(Variant::ShiftFg).unwrap();
    assert!(!inclusive);
    assert!(DouglasRachford::new(&problem, Variant::ShiftFg, shift_bound).is_err());
}
