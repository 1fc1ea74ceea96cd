//! One function per subcommand. Cells run on the rayon pool; rows come back
//! in grid order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use transduce_core::adversary::purifier_tightness;
use transduce_core::linalg::random::random_state;
use transduce_core::linalg::{norm, StateVector, C64};
use transduce_core::majority::{copies_for, hoeffding_bound, imprecision_exact, qubit_count, Majority};
use transduce_core::oracles::{general_reflecting_oracle, random_complement_action, simple_oracle, OracleSpec};
use transduce_core::purifier::{build_simple, gamma_truncation_bound, verify_transduction};
use transduce_core::qsp::{qsp_error_reduction, ErrorReducer};
use transduce_core::transducer::implement_action;
use transduce_core::Error;

use crate::config::Config;
use crate::report::{Cell, Report};
use crate::LabError;

pub const PURIFY_COLUMNS: &[&str] = &["p", "L", "W", "tau_error", "bound_2sqrtWK", "measured_action_error"];
pub const QSP_COLUMNS: &[&str] = &["delta", "eps", "p", "promise", "degree", "final_error", "target_eps"];
pub const MAJORITY_COLUMNS: &[&str] =
    &["ell", "p", "delta", "queries", "imprecision_exact", "imprecision_simulated", "hoeffding_bound", "qubits_used"];
pub const ADVERSARY_COLUMNS: &[&str] = &["delta", "lower_bound", "purifier_objective", "max_residual", "gap"];
pub const COMPARE_COLUMNS: &[&str] =
    &["delta", "eps", "purifier_L", "purifier_W", "qsp_queries", "majority_ell", "majority_queries"];

/// Generator for cell `index`: one ChaCha stream per cell, so results do not
/// depend on scheduling.
fn cell_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Solver tolerance for the depth-`d` simple purifier on `O_p`: for `p > 1/2`
/// the truncated walk has no exact fixed point, only one perturbed by up to
/// `2 gamma^{-(D-1)}`.
fn admitted_tol(cfg: &Config, p: f64) -> Result<f64, LabError> {
    Ok(cfg.tol.max(gamma_truncation_bound(p, cfg.depth)? * (1.0 + 1e-9)))
}

fn grid2<A: Copy + Sync, B: Copy + Sync>(a: &[A], b: &[B]) -> Vec<(usize, A, B)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).enumerate().map(|(i, (x, y))| (i, x, y)).collect()
}

fn collect(report: &mut Report, rows: Vec<Result<Vec<Cell>, LabError>>) -> Result<(), LabError> {
    for row in rows {
        report.rows.push(row?);
    }
    Ok(())
}

/// Simple purifier on `O_p`: transducer complexities from the analytic
/// catalyst and the `K`-copy action error against `2 sqrt(W / K)`.
pub fn purify(cfg: &Config) -> Result<Report, LabError> {
    let mut report = Report::new("purify", PURIFY_COLUMNS);
    let t = build_simple(cfg.depth)?;
    let xi = StateVector::from_real(&[1.0]);
    let rows = cfg
        .p_grid
        .par_iter()
        .map(|&p| {
            let tol = admitted_tol(cfg, p)?;
            let rep = verify_transduction(p, cfg.depth, tol)?;
            let act = implement_action(&t, Some(&simple_oracle(p)?), &xi, cfg.k, tol)?;
            Ok(vec![
                p.into(),
                rep.l.into(),
                act.w.into(),
                rep.tau_error.into(),
                act.bound.into(),
                act.action_error.into(),
            ])
        })
        .collect();
    collect(&mut report, rows)?;
    Ok(report)
}

fn reducers(delta: f64, eps_grid: &[f64]) -> Vec<Result<ErrorReducer, Error>> {
    eps_grid.par_iter().map(|&eps| ErrorReducer::new(delta, eps)).collect()
}

/// Worst `||U(p) phi - (-1)^r phi||` over random oracles and random `phi`
/// in the answer span. `promise` is 1 when `|p - 1/2| >= delta`, the only
/// case where `final_error <= eps` is guaranteed.
pub fn qsp(cfg: &Config) -> Result<Report, LabError> {
    let mut report = Report::new("qsp", QSP_COLUMNS);
    let reds = reducers(cfg.delta, &cfg.eps_grid).into_iter().collect::<Result<Vec<_>, _>>()?;
    let cells = grid2(&(0..reds.len()).collect::<Vec<_>>(), &cfg.p_grid);
    let rows = cells
        .par_iter()
        .map(|&(i, e, p)| {
            let red = &reds[e];
            let mut rng = cell_rng(cfg.seed, i);
            let spec = OracleSpec::random(&mut rng, p, cfg.d_w)?;
            let comp = random_complement_action(&mut rng, &spec)?;
            let o = general_reflecting_oracle(&spec, Some(&comp))?;
            let u = qsp_error_reduction(&o, cfg.d_w, red)?;
            let sign = if p < 0.5 { 1.0 } else { -1.0 };
            let mut worst: f64 = 0.0;
            for _ in 0..cfg.samples {
                let ab = random_state(&mut rng, 2);
                let phi = spec.span_vector(ab.amps()[0], ab.amps()[1]);
                let out = u.apply_amps(&phi)?;
                let diff: Vec<C64> = out.iter().zip(&phi).map(|(a, b)| a - b * sign).collect();
                worst = worst.max(norm(&diff));
            }
            let promise = usize::from((p - 0.5).abs() >= cfg.delta - 1e-12);
            Ok(vec![
                cfg.delta.into(),
                red.eps.into(),
                p.into(),
                promise.into(),
                red.degree().into(),
                worst.into(),
                red.eps.into(),
            ])
        })
        .collect();
    collect(&mut report, rows)?;
    Ok(report)
}

/// Exact and simulated imprecision of majority voting. The simulation is
/// skipped (empty cell) when the circuit exceeds the dense size cap.
pub fn majority(cfg: &Config) -> Result<Report, LabError> {
    let mut report = Report::new("majority", MAJORITY_COLUMNS);
    let cells = grid2(&cfg.ell_grid, &cfg.p_grid);
    let rows = cells
        .par_iter()
        .map(|&(i, ell, p)| {
            let delta = (p - 0.5).abs();
            let exact = imprecision_exact(ell, p)?;
            let simulated = match Majority::build(ell, cfg.d_w) {
                Ok(m) => {
                    let spec = OracleSpec::random(&mut cell_rng(cfg.seed, i), p, cfg.d_w)?;
                    Some(m.simulated_imprecision(&spec)?)
                }
                Err(Error::Parameter(_)) => None,
                Err(e) => return Err(e.into()),
            };
            Ok(vec![
                ell.into(),
                p.into(),
                delta.into(),
                (2 * ell).into(),
                exact.into(),
                simulated.into(),
                hoeffding_bound(ell, delta).into(),
                qubit_count(ell, cfg.d_w).into(),
            ])
        })
        .collect();
    collect(&mut report, rows)?;
    Ok(report)
}

/// Two-oracle lower bound against the simple purifier's adversary candidate.
pub fn adversary(cfg: &Config) -> Result<Report, LabError> {
    let mut report = Report::new("adversary", ADVERSARY_COLUMNS);
    let rows = cfg
        .delta_grid
        .par_iter()
        .map(|&delta| {
            let t = purifier_tightness(delta, cfg.depth, admitted_tol(cfg, 0.5 + delta)?)?;
            Ok(vec![delta.into(), t.lower_bound.into(), t.objective.into(), t.max_residual.into(), t.gap.into()])
        })
        .collect();
    collect(&mut report, rows)?;
    Ok(report)
}

/// Query counts at matched `(delta, eps)`: purifier `L` at `p = 1/2 - delta`,
/// QSP degree, and `2 l` for majority voting. A QSP polynomial over the
/// degree cap leaves its cell empty.
pub fn compare(cfg: &Config) -> Result<Report, LabError> {
    let mut report = Report::new("compare", COMPARE_COLUMNS);
    let cells = grid2(&cfg.delta_grid, &cfg.eps_grid);
    let rows = cells
        .par_iter()
        .map(|&(_, delta, eps)| {
            let pur = verify_transduction(0.5 - delta, cfg.depth, cfg.tol)?;
            let qsp = match ErrorReducer::new(delta, eps) {
                Ok(r) => Some(r.degree()),
                Err(Error::DegreeCap { .. }) => None,
                Err(e) => return Err(e.into()),
            };
            let ell = copies_for(delta, eps)?;
            Ok(vec![delta.into(), eps.into(), pur.l.into(), pur.w.into(), qsp.into(), ell.into(), (2 * ell).into()])
        })
        .collect();
    collect(&mut report, rows)?;
    Ok(report)
}
