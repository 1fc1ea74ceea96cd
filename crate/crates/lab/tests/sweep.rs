use transduce_lab::{run, Cell, Command, Config, Report};

fn floats(report: &Report, name: &str) -> Vec<f64> {
    report
        .column(name)
        .unwrap()
        .into_iter()
        .map(|c| match c {
            Cell::Float(x) => x,
            Cell::Int(n) => n as f64,
            Cell::Missing => f64::NAN,
        })
        .collect()
}

fn small() -> Config {
    Config {
        p_grid: vec![0.2, 0.7],
        eps_grid: vec![0.3, 0.1],
        ell_grid: vec![1, 3],
        delta_grid: vec![0.25],
        depth: 32,
        k: 50,
        d_w: 1,
        samples: 4,
        ..Config::default()
    }
}

#[test]
fn purify_action_error_within_bound() {
    let r = run(Command::Purify, &small()).unwrap();
    assert_eq!(r.rows.len(), 2);
    let (l, w) = (floats(&r, "L"), floats(&r, "W"));
    let (err, bound) = (floats(&r, "measured_action_error"), floats(&r, "bound_2sqrtWK"));
    for (i, p) in [0.2f64, 0.7].into_iter().enumerate() {
        let delta = (0.5 - p).abs();
        assert!((l[i] - 1.0 / (2.0 * delta)).abs() < 1e-6, "L = {}", l[i]);
        assert!((bound[i] - 2.0 * (w[i] / 50.0).sqrt()).abs() < 1e-12);
        assert!(err[i] <= bound[i]);
    }
}

#[test]
fn qsp_meets_eps_under_the_promise() {
    let cfg = Config { delta: 0.2, ..small() };
    let r = run(Command::Qsp, &cfg).unwrap();
    assert_eq!(r.rows.len(), 4);
    let (eps, err, promise) = (floats(&r, "eps"), floats(&r, "final_error"), floats(&r, "promise"));
    for i in 0..4 {
        assert_eq!(promise[i], 1.0);
        assert!(err[i] <= eps[i], "row {i}: {} > {}", err[i], eps[i]);
    }
    let degree = floats(&r, "degree");
    assert!(degree[2] > degree[0]);
}

#[test]
fn majority_simulation_matches_tail() {
    let r = run(Command::Majority, &small()).unwrap();
    let (exact, sim, hoeff) =
        (floats(&r, "imprecision_exact"), floats(&r, "imprecision_simulated"), floats(&r, "hoeffding_bound"));
    for i in 0..r.rows.len() {
        assert!((exact[i] - sim[i]).abs() < 1e-10);
        assert!(exact[i] <= hoeff[i]);
    }
    // l = 1 at p = 0.2: sqrt(2 * 0.2).
    assert!((exact[0] - 0.4f64.sqrt()).abs() < 1e-12);
}

#[test]
fn majority_skips_simulation_past_the_cap() {
    let cfg = Config { ell_grid: vec![25], p_grid: vec![0.1], ..small() };
    let r = run(Command::Majority, &cfg).unwrap();
    assert_eq!(r.column("imprecision_simulated").unwrap(), vec![Cell::Missing]);
    assert_eq!(r.column("qubits_used").unwrap(), vec![Cell::Int(25 + 5 + 1)]);
}

#[test]
fn compare_leaves_over_cap_qsp_empty() {
    let cfg = Config { delta_grid: vec![0.05], eps_grid: vec![0.01], ..small() };
    let r = run(Command::Compare, &cfg).unwrap();
    assert_eq!(r.column("qsp_queries").unwrap(), vec![Cell::Missing]);
    let ell = floats(&r, "majority_ell")[0];
    assert_eq!(floats(&r, "majority_queries")[0], 2.0 * ell);
}

#[test]
fn rows_follow_grid_order() {
    let cfg = Config { p_grid: vec![0.9, 0.1, 0.3], ell_grid: vec![3, 1], ..small() };
    let r = run(Command::Majority, &cfg).unwrap();
    let ells = floats(&r, "ell");
    let ps = floats(&r, "p");
    let expect: Vec<(f64, f64)> = [3.0, 1.0].iter().flat_map(|&l| [0.9, 0.1, 0.3].map(|p| (l, p))).collect();
    assert_eq!(ells.into_iter().zip(ps).collect::<Vec<_>>(), expect);
}
