use drsplit_web::{convergence_traces, rate_columns, threshold_curves};

#[test]
fn threshold_curve_regions() {
    let c = threshold_curves(2.0, 1.0, 0.5, 5.0, 201).unwrap();
    assert_eq!(c.t.len(), 201);
    for (i, &t) in c.t.iter().enumerate() {
        let expect = if t.abs() < 1.0 {
            0.0
        } else if t.abs() < 2.0 {
            t.signum() * (t.abs() - 1.0) / 0.5
        } else {
            t
        };
        assert!((c.threshold[i] - expect).abs() < 1e-12, "t = {t}");
        assert!((c.reflected[i] - (2.0 * expect - t)).abs() < 1e-12);
        assert!(c.penalty[i] <= 2.0 + 1e-12);
    }
    assert!(threshold_curves(2.0, 1.0, 1.0, 5.0, 11).is_err());
    assert!(threshold_curves(2.0, 1.0, 0.5, 5.0, 1).is_err());
}

#[test]
fn rate_columns_mark_inapplicable_steps() {
    let [alpha, uf, ug, rt, rv] = rate_columns(1.0, 2.0, 4.0, 1.0, 4).unwrap();
    assert_eq!(alpha, vec![0.25, 0.5, 0.75, 1.0]);
    assert!(uf.iter().all(|v| (0.0..=1.0).contains(v)));
    // αρ = 1 at the last step
    assert!(ug[3].is_nan() && ug[2].is_finite());
    // 1/√(σs) ≈ 0.354 and 1/s = 0.5
    assert!(rt[0].is_finite() && rt[1].is_nan());
    assert!((rv[1] - 1.0 / 3.0).abs() < 1e-15 && rv[2].is_nan());
}

#[test]
fn convergence_traces_reach_the_reference() {
    let c = convergence_traces("exp2", 0, 150, 0.99, 0.5).unwrap();
    assert!((c.ratio / 5.44 - 1.0).abs() < 0.02);
    for trace in [&c.main_fg, &c.shift_fg, &c.ista] {
        assert_eq!(trace.len(), 151);
        assert!(*trace.last().unwrap() < 1e-6);
    }
    assert!(convergence_traces("exp3", 0, 10, 0.99, 0.5).is_err());
}
