use proptest::prelude::*;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use transduce_core::adversary::{check_feasible, transducer_to_candidate, StateConversionProblem};
use transduce_core::linalg::random::{gaussian_vector, random_state, random_unitary, uniform_range};
use transduce_core::linalg::{
    c64, decrement_mod, direct_sum, increment_mod, inner, norm, reflection_about, tensor, Matrix, Operator,
    StateVector, C64,
};
use transduce_core::majority::{imprecision_exact, Majority};
use transduce_core::nonboolean::{lifted_block, lifted_oracle, off_block_mass, NonBooleanSpec};
use transduce_core::oracles::{
    general_reflecting_oracle, random_complement_action, reflecting_from_generator, reflection_defects,
    state_generating_oracle, OracleSpec,
};
use transduce_core::purifier::{general_truncation_defect, verify_transduction};
use transduce_core::qsp::{phase_factors, reassembly_residual, PhaseSequence, CONDITION_GRID, REASSEMBLY_GRID};
use transduce_core::query::{run, trace, QueryAlgorithm};
use transduce_core::transducer::{complexities, transduce, Transducer};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unitary(r: &mut ChaCha8Rng, n: usize) -> Operator {
    Operator::from_matrix(random_unitary(r, n)).unwrap()
}

fn diff(a: &[C64], b: &[C64]) -> f64 {
    norm(&a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<_>>())
}

fn self_inverse_defect(o: &Operator) -> f64 {
    let sq = o.matrix().matmul(o.matrix()).unwrap();
    sq.sub(&Matrix::identity(o.dim())).unwrap().max_abs()
}

/// Random algorithm with `sections` unitaries, as a transducer with a
/// `h`-dimensional public space embedded at the front of the open space.
fn random_transducer(r: &mut ChaCha8Rng, h: usize, open: usize, up: usize, m: usize) -> Transducer {
    let n = open + up * m;
    let ops = (0..3).map(|_| unitary(r, n)).collect();
    let alg = QueryAlgorithm::from_operators(open, up, m, ops).unwrap();
    Transducer::from_algorithm(alg, h, (0..n).collect()).unwrap()
}

fn spec_in_span(r: &mut ChaCha8Rng, p: f64, d_w: usize) -> OracleSpec {
    let phi0 = random_state(r, d_w).into_amps();
    let phi1 = random_state(r, d_w).into_amps();
    OracleSpec::new(p, phi0, phi1).unwrap()
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn direct_sum_and_tensor_stay_unitary(seed in any::<u64>(), a in 1usize..6, b in 1usize..6) {
        let mut r = rng(seed);
        let (u, v) = (unitary(&mut r, a), unitary(&mut r, b));
        prop_assert!(direct_sum(&[&u, &v]).unitarity_defect() <= 1e-10);
        prop_assert!(tensor(&[&u, &v]).unitarity_defect() <= 1e-10);
    }

    #[test]
    fn reflection_squares_to_identity(seed in any::<u64>(), n in 1usize..9) {
        let psi = random_state(&mut rng(seed), n);
        let refl = reflection_about(&psi).unwrap();
        prop_assert!(refl.unitarity_defect() <= 1e-10);
        prop_assert!(self_inverse_defect(&refl) <= 1e-10);
    }

    #[test]
    fn increment_undoes_decrement(d in 1usize..40) {
        let prod = increment_mod(d).unwrap().compose(&decrement_mod(d).unwrap()).unwrap();
        prop_assert_eq!(prod.matrix().sub(&Matrix::identity(d)).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn general_oracle_reflects_on_the_answer_span(seed in any::<u64>(), p in 0.0f64..1.0, d_w in 1usize..5) {
        let mut r = rng(seed);
        let spec = spec_in_span(&mut r, p, d_w);
        let comp = random_complement_action(&mut r, &spec).unwrap();
        for c in [None, Some(&comp)] {
            let o = general_reflecting_oracle(&spec, c).unwrap();
            prop_assert!(o.unitarity_defect() <= 1e-10);
            let (fix, neg) = reflection_defects(&o, &spec).unwrap();
            prop_assert!(fix <= 1e-12 && neg <= 1e-12, "defects {fix:e} {neg:e}");
        }
    }

    #[test]
    fn generator_reflection_is_an_involution(seed in any::<u64>(), p in 0.0f64..1.0, d_w in 1usize..5) {
        let spec = spec_in_span(&mut rng(seed), p, d_w);
        let gen = state_generating_oracle(&spec).unwrap();
        prop_assert!(diff(&gen.matrix().column(0), &spec.target()) <= 1e-12);
        let refl = reflecting_from_generator(&gen).unwrap();
        prop_assert!(self_inverse_defect(&refl) <= 1e-10);
        // Hermitian and unitary, so the spectrum is in {+1, -1}.
        prop_assert!(refl.matrix().sub(&refl.matrix().adjoint()).unwrap().max_abs() <= 1e-10);
    }

    #[test]
    fn runs_preserve_norm_and_bound_query_weight(
        seed in any::<u64>(), open in 1usize..5, up in 1usize..3, m in 1usize..4, scale in 0.1f64..3.0,
    ) {
        let mut r = rng(seed);
        let n = open + up * m;
        let ops = (0..4).map(|_| unitary(&mut r, n)).collect();
        let alg = QueryAlgorithm::from_operators(open, up, m, ops).unwrap();
        let o = unitary(&mut r, m);
        let xi = StateVector::from_amps(random_state(&mut r, n).amps().iter().map(|a| a * scale).collect());
        let out = run(&alg, &o, &xi).unwrap();
        prop_assert!((out.norm() - xi.norm()).abs() <= 1e-10 * (1.0 + scale));
        let unit = xi.normalized().unwrap();
        let l = trace(&alg, &o, &unit).unwrap().las_vegas();
        prop_assert!(l <= alg.query_count() as f64 + 1e-10);
    }

    #[test]
    fn transduction_is_linear_and_isometric(
        seed in any::<u64>(), h in 1usize..4, open in 3usize..7, up in 1usize..3, m in 2usize..5,
        are in -1.0f64..1.0, aim in -1.0f64..1.0, bre in -1.0f64..1.0, bim in -1.0f64..1.0,
    ) {
        let mut r = rng(seed);
        let t = random_transducer(&mut r, h, open, up, m);
        let o = unitary(&mut r, m);
        let x1 = random_state(&mut r, h);
        // Orthonormal partner for the isometry check.
        let raw = gaussian_vector(&mut r, h);
        let ov = inner(x1.amps(), &raw);
        let perp: Vec<C64> = raw.iter().zip(x1.amps()).map(|(b, a)| b - a * ov).collect();
        let x2 = if norm(&perp) > 1e-6 {
            StateVector::from_amps(perp).normalized().unwrap()
        } else {
            random_state(&mut r, h)
        };
        let (a, b) = (c64(are, aim), c64(bre, bim));
        let lin = |u: &[C64], v: &[C64]| u.iter().zip(v).map(|(p, q)| a * p + b * q).collect::<Vec<_>>();
        let mix = StateVector::from_amps(lin(x1.amps(), x2.amps()));
        let c1 = complexities(&t, Some(&o), &x1, 1e-8).unwrap();
        let c2 = complexities(&t, Some(&o), &x2, 1e-8).unwrap();
        let cm = complexities(&t, Some(&o), &mix, 1e-8).unwrap();
        for c in [&c1, &c2, &cm] {
            prop_assert!(c.result.residual <= 1e-8);
        }
        prop_assert!(diff(cm.result.tau.amps(), &lin(c1.result.tau.amps(), c2.result.tau.amps())) <= 1e-8);
        prop_assert!(diff(cm.result.catalyst.amps(), &lin(c1.result.catalyst.amps(), c2.result.catalyst.amps())) <= 1e-8);
        prop_assert!(diff(&cm.q, &lin(&c1.q, &c2.q)) <= 1e-8);
        let gram = inner(c1.result.tau.amps(), c2.result.tau.amps()) - inner(x1.amps(), x2.amps());
        prop_assert!(gram.norm() <= 1e-8);
        prop_assert!((c1.result.tau.norm() - 1.0).abs() <= 1e-8);
    }

    #[test]
    fn exact_transducers_give_feasible_candidates(
        seed in any::<u64>(), labels in 1usize..5, h in 1usize..3, open in 3usize..6, m in 2usize..4,
    ) {
        let mut r = rng(seed);
        let t = random_transducer(&mut r, h, open, 1, m);
        let oracles: Vec<Operator> = (0..labels).map(|_| unitary(&mut r, m)).collect();
        let xi: Vec<Vec<C64>> = (0..labels).map(|_| random_state(&mut r, h).into_amps()).collect();
        let mut tau = Vec::new();
        for (o, x) in oracles.iter().zip(&xi) {
            let res = transduce(&t, Some(o), &StateVector::from_amps(x.clone()), 1e-10).unwrap();
            prop_assume!(res.residual <= 1e-10);
            tau.push(res.tau.into_amps());
        }
        let problem = StateConversionProblem::new(oracles, xi, tau).unwrap();
        let cand = transducer_to_candidate(&t, &problem, 1e-10, false).unwrap();
        let f = check_feasible(&problem, &cand, 1e-6).unwrap();
        prop_assert!(f.feasible, "residual {:e}", f.max_residual);
    }

    #[test]
    fn qsp_phases_round_trip(seed in any::<u64>(), k in 0usize..12) {
        let mut r = rng(seed);
        let alphas: Vec<C64> = (0..=k)
            .map(|_| {
                let t = uniform_range(&mut r, 0.0, core::f64::consts::TAU);
                c64(t.cos(), t.sin())
            })
            .collect();
        let seq = PhaseSequence::new(alphas).unwrap();
        let pq = seq.polynomials();
        prop_assert!(pq.condition_residual(CONDITION_GRID) <= 1e-8);
        prop_assert!(reassembly_residual(&seq, &pq, REASSEMBLY_GRID).unwrap() <= 1e-8);
        let back = phase_factors(&pq).unwrap();
        prop_assert_eq!(back.k(), k);
        prop_assert!(reassembly_residual(&back, &pq, REASSEMBLY_GRID).unwrap() <= 1e-8);
    }

    #[test]
    fn lifted_oracle_is_block_diagonal(
        seed in any::<u64>(), m in 1usize..3, d_w in 1usize..3, p_r in 0.55f64..0.95,
    ) {
        let mut r = rng(seed);
        let n = 1usize << m;
        let answer = (seed as usize) % n;
        let mut rest: Vec<f64> = (0..n).map(|_| uniform_range(&mut r, 0.01, 1.0)).collect();
        rest[answer] = 0.0;
        let total: f64 = rest.iter().sum();
        let probs: Vec<f64> =
            (0..n).map(|a| if a == answer { p_r } else { (1.0 - p_r) * rest[a] / total }).collect();
        let states = (0..n).map(|_| random_state(&mut r, d_w).into_amps()).collect();
        let spec = NonBooleanSpec::new(m, probs, states).unwrap();
        let op = lifted_oracle(&spec.reflecting_oracle().unwrap(), m).unwrap();
        prop_assert!(off_block_mass(&op, m) <= 1e-12);
        for b in 0..n {
            let (fix, neg) = reflection_defects(&lifted_block(&op, m, b).unwrap(), &spec.prime_spec(b).unwrap()).unwrap();
            prop_assert!(fix <= 1e-10 && neg <= 1e-10, "b = {b}: {fix:e} {neg:e}");
        }
    }
}

proptest! {
    #![proptest_config(config(12))]

    #[test]
    fn majority_imprecision_matches_the_binomial_tail(ell in 1usize..6, p in 0.02f64..0.98) {
        prop_assume!((p - 0.5).abs() > 0.02);
        let maj = Majority::build(ell, 1).unwrap();
        let spec = OracleSpec::simple(p).unwrap();
        let sim = maj.simulated_imprecision(&spec).unwrap();
        prop_assert!((sim - imprecision_exact(ell, p).unwrap()).abs() <= 1e-10);
    }

    #[test]
    fn truncated_purifier_defect_within_bound(p in 0.05f64..0.95, log_d in 2u32..7) {
        prop_assume!((p - 0.5).abs() > 0.02);
        let d = 1usize << log_d;
        let rep = verify_transduction(p, d, 1e-10).unwrap();
        let slack = 1e-12 * rep.gamma_bound + 1e-14;
        if p < 0.5 {
            prop_assert!(rep.tau_error <= 1e-12);
        } else {
            prop_assert!(rep.tau_error <= rep.gamma_bound + slack);
        }
    }

    #[test]
    fn general_defect_within_bound(seed in any::<u64>(), p in 0.05f64..0.95, d in 4usize..20, d_w in 1usize..3) {
        prop_assume!((p - 0.5).abs() > 0.02);
        let mut r = rng(seed);
        let spec = spec_in_span(&mut r, p, d_w);
        let t = uniform_range(&mut r, 0.0, core::f64::consts::FRAC_PI_2);
        let (alpha, beta) = (c64(t.cos(), 0.0), c64(0.0, t.sin()));
        let rep = general_truncation_defect(&spec, alpha, beta, d).unwrap();
        if p < 0.5 {
            prop_assert!(rep.defect <= 1e-12);
        } else {
            prop_assert!(rep.defect <= rep.gamma_bound * (1.0 + 1e-12) + 1e-14);
        }
    }
}
