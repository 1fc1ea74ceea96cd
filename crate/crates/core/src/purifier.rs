//! Truncated purifiers: the simple walk `S = R2 R1` on a depth-`D` counter
//! and the general walk `S' = R2' R1'` on `J (x) A (x) W`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{c64, norm, Layout, Operator, Permutation, Register, StateVector, C64, ONE, ZERO};
use crate::oracles::{
    answer_bit, bidirectional, gamma, general_reflecting_oracle, reflecting_from_generator, state_generating_oracle,
    OracleSpec,
};
use crate::query::{Gate, QueryAlgorithm, Section};
use crate::transducer::{self, complexities, functional_accounting, implement_action, InnerComplexity, Transducer};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

pub const DEFAULT_DEPTH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    Simple,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PurifierConfig {
    pub depth: usize,
    pub flavor: Flavor,
    pub d_w: usize,
}

impl PurifierConfig {
    pub fn new(depth: usize, flavor: Flavor, d_w: usize) -> Result<Self> {
        check_depth(depth)?;
        if d_w == 0 {
            return Err(Error::Parameter("workspace dimension must be >= 1".into()));
        }
        Ok(PurifierConfig { depth, flavor, d_w })
    }

    pub fn build(&self) -> Result<Transducer> {
        match self.flavor {
            Flavor::Simple => build_simple(self.depth),
            Flavor::General => build_general(self.depth, self.d_w),
        }
    }
}

/// Depth must be a power of two and at least 4.
pub fn check_depth(d: usize) -> Result<()> {
    if d < 4 || !d.is_power_of_two() {
        return Err(Error::Parameter(alloc::format!("truncation depth {d} must be a power of two >= 4")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<u8> {
    answer_bit(p)
}

/// What a gate is conditioned on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Always,
    /// The counter (without the answer bit) is non-zero.
    CounterNonzero,
    Answer(u8),
}

/// Elementary steps of a reflection, in application order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Increment(Control),
    Decrement(Control),
    Query(Control),
    /// Multiplies by `-1`.
    Phase(Control),
}

/// Gate counts of one reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GateAudit {
    pub increments: usize,
    pub decrements: usize,
    pub queries: usize,
    pub phases: usize,
}

impl GateAudit {
    pub fn of(steps: &[Step]) -> Self {
        let mut a = GateAudit::default();
        for s in steps {
            match s {
                Step::Increment(_) => a.increments += 1,
                Step::Decrement(_) => a.decrements += 1,
                Step::Query(_) => a.queries += 1,
                Step::Phase(_) => a.phases += 1,
            }
        }
        a
    }

    pub fn plus(self, o: GateAudit) -> GateAudit {
        GateAudit {
            increments: self.increments + o.increments,
            decrements: self.decrements + o.decrements,
            queries: self.queries + o.queries,
            phases: self.phases + o.phases,
        }
    }
}

/// `[R1, R2]` as step lists.
pub fn reflection_steps(flavor: Flavor) -> [Vec<Step>; 2] {
    match flavor {
        Flavor::Simple => [
            vec![Step::Query(Control::Always)],
            vec![
                Step::Increment(Control::Always),
                Step::Query(Control::CounterNonzero),
                Step::Decrement(Control::Always),
            ],
        ],
        Flavor::General => [
            vec![
                Step::Increment(Control::Answer(0)),
                Step::Query(Control::CounterNonzero),
                Step::Decrement(Control::Answer(0)),
            ],
            vec![
                Step::Increment(Control::Answer(1)),
                Step::Query(Control::CounterNonzero),
                Step::Phase(Control::CounterNonzero),
                Step::Decrement(Control::Answer(1)),
            ],
        ],
    }
}

/// Gate counts of `[R1, R2]`.
pub fn gate_audit(flavor: Flavor) -> [GateAudit; 2] {
    let [a, b] = reflection_steps(flavor);
    [GateAudit::of(&a), GateAudit::of(&b)]
}

fn compose_perm(first: &Permutation, then: &Permutation) -> Permutation {
    Permutation::from_fn(first.dim(), |i| then.image()[first.image()[i]]).expect("composition of permutations")
}

/// Simple purifier as a two-query algorithm on `park (+) (K (x) A)`.
///
/// The controlled query of `R2` is realised by swapping the `K = 0` block
/// into the two-dimensional park, where the query does not act. Counter
/// index `n` lives at algorithm index `2 + n`.
pub fn simple_algorithm(d: usize) -> Result<QueryAlgorithm> {
    check_depth(d)?;
    let n = d + 2;
    let steps = reflection_steps(Flavor::Simple);
    let inc = Permutation::from_fn(n, |i| if i < 2 { i } else { 2 + (i - 2 + 1) % d })?;
    let dec = inc.inverse();
    let swap = Permutation::from_fn(n, |i| match i {
        0 | 1 => i + 2,
        2 | 3 => i - 2,
        _ => i,
    })?;
    let mut sections: Vec<Vec<Gate>> = vec![Vec::new()];
    for step in steps.iter().flatten() {
        let cur = sections.last_mut().expect("non-empty");
        match step {
            Step::Increment(Control::Always) => cur.push(Gate::Perm(inc.clone())),
            Step::Decrement(Control::Always) => cur.push(Gate::Perm(dec.clone())),
            Step::Query(Control::Always) => sections.push(Vec::new()),
            Step::Query(Control::CounterNonzero) => {
                cur.push(Gate::Perm(swap.clone()));
                sections.push(vec![Gate::Perm(swap.clone())]);
            }
            other => return Err(Error::Structure(alloc::format!("step {other:?} has no simple-purifier gate"))),
        }
    }
    // Merge adjacent permutations so each section is a single gate.
    let sections = sections
        .into_iter()
        .map(|gates| {
            let merged = gates.into_iter().fold(None::<Permutation>, |acc, g| match (acc, g) {
                (None, Gate::Perm(p)) => Some(p),
                (Some(a), Gate::Perm(p)) => Some(compose_perm(&a, &p)),
                _ => unreachable!("only permutations here"),
            });
            Section::Circuit(merged.map(|p| vec![Gate::Perm(p)]).unwrap_or_default())
        })
        .collect();
    QueryAlgorithm::new(2, d / 2, 2, Some(Layout::flat(n)), sections)
}

/// Truncated simple purifier with public space `|0>` and private space
/// `|1> .. |D-1>`.
pub fn build_simple(d: usize) -> Result<Transducer> {
    let alg = simple_algorithm(d)?;
    Transducer::from_algorithm(alg, 1, (0..d).map(|j| j + 2).collect())
}

/// `(R1, R2)` as dense operators on `C^D` for a single-qubit oracle.
pub fn simple_reflections(d: usize, oracle: &Operator) -> Result<(Operator, Operator)> {
    check_depth(d)?;
    crate::error::check_dim(2, oracle.dim())?;
    let o = oracle.matrix();
    let mut r1 = crate::linalg::Matrix::zeros(d, d);
    let mut mid = crate::linalg::Matrix::identity(d);
    for k in 0..d / 2 {
        for a in 0..2 {
            for b in 0..2 {
                r1[(2 * k + a, 2 * k + b)] = o[(a, b)];
                if k != 0 {
                    mid[(2 * k + a, 2 * k + b)] = o[(a, b)];
                }
            }
        }
    }
    let inc = crate::linalg::increment_mod(d)?;
    let dec = crate::linalg::decrement_mod(d)?;
    let r2 = Operator::product(&[&dec, &Operator::from_matrix(mid)?, &inc])?;
    Ok((Operator::from_matrix(r1)?, r2))
}

/// Default oracle-space layout `A (x) W` with the answer bit first.
pub fn answer_workspace_layout(d_w: usize) -> Layout {
    Layout::new(vec![Register::bit("A"), Register::workspace("W", d_w)])
}

/// General purifier over the default `A (x) W` oracle space.
pub fn build_general(d: usize, d_w: usize) -> Result<Transducer> {
    if d_w == 0 {
        return Err(Error::Parameter("workspace dimension must be >= 1".into()));
    }
    build_general_on(d, &answer_workspace_layout(d_w), 0)
}

fn general_layout(d: usize, m_layout: &Layout) -> Layout {
    Layout::new(vec![Register::counter("J", d)]).tensor(m_layout)
}

/// General purifier over an arbitrary oracle-space layout; register
/// `answer` of `m_layout` is the two-valued answer bit that steers the walk.
///
/// Wires are `J (x) m_layout` with `J` most significant, so the `J = 0`
/// block is both the public space and the open block of the algorithm.
pub fn build_general_on(d: usize, m_layout: &Layout, answer: usize) -> Result<Transducer> {
    let alg = general_algorithm_on(d, m_layout, answer)?;
    let m = m_layout.dim();
    let n = alg.dim();
    Transducer::from_algorithm(alg, m, (0..n).collect())
}

/// The counter `J` is a separate register here, so any depth `D >= 4` works;
/// `PurifierConfig` still insists on powers of two.
pub fn general_algorithm_on(d: usize, m_layout: &Layout, answer: usize) -> Result<QueryAlgorithm> {
    if d < 4 {
        return Err(Error::Parameter(alloc::format!("truncation depth {d} must be >= 4")));
    }
    match m_layout.registers().get(answer) {
        Some(r) if r.dim == 2 => {}
        _ => return Err(Error::Structure("answer register must be a qubit of the oracle layout".into())),
    }
    let m = m_layout.dim();
    let n = d * m;
    let ans_of: Vec<u8> = (0..m).map(|k| m_layout.digits_of(k)[answer] as u8).collect();
    let shift = |delta: usize, a: u8| {
        Permutation::from_fn(n, |i| {
            let (j, k) = (i / m, i % m);
            if ans_of[k] == a {
                ((j + delta) % d) * m + k
            } else {
                i
            }
        })
        .expect("counter shift is a permutation")
    };
    let phase: Vec<C64> = (0..n).map(|i| if i < m { ONE } else { -ONE }).collect();
    let mut sections: Vec<Vec<Gate>> = vec![Vec::new()];
    for step in reflection_steps(Flavor::General).iter().flatten() {
        let cur = sections.last_mut().expect("non-empty");
        match *step {
            Step::Increment(Control::Answer(a)) => cur.push(Gate::Perm(shift(1, a))),
            Step::Decrement(Control::Answer(a)) => cur.push(Gate::Perm(shift(d - 1, a))),
            Step::Query(Control::CounterNonzero) => sections.push(Vec::new()),
            Step::Phase(Control::CounterNonzero) => cur.push(Gate::Diag(phase.clone())),
            other => return Err(Error::Structure(alloc::format!("step {other:?} has no general-purifier gate"))),
        }
    }
    let wires = general_layout(d, m_layout);
    QueryAlgorithm::new(m, d - 1, m, Some(wires), sections.into_iter().map(Section::Circuit).collect())
}

/// `(R1', R2')` as dense operators on `J (x) A (x) W`.
pub fn general_reflections(d: usize, d_w: usize, oracle: &Operator) -> Result<(Operator, Operator)> {
    let alg = general_algorithm_on(d, &answer_workspace_layout(d_w), 0)?;
    let s = alg.sections();
    let m = 2 * d_w;
    let r1 = QueryAlgorithm::new(m, d - 1, m, alg.wires().cloned(), vec![s[0].clone(), undo_tail(&s[1], 1)])?;
    let r2 = QueryAlgorithm::new(m, d - 1, m, alg.wires().cloned(), vec![keep_tail(&s[1], 1), s[2].clone()])?;
    Ok((r1.to_operator(oracle)?, r2.to_operator(oracle)?))
}

fn undo_tail(s: &Section, keep: usize) -> Section {
    match s {
        Section::Circuit(g) => Section::Circuit(g[..keep].to_vec()),
        Section::Dense(_) => unreachable!("general purifier uses circuits"),
    }
}

fn keep_tail(s: &Section, from: usize) -> Section {
    match s {
        Section::Circuit(g) => Section::Circuit(g[from..].to_vec()),
        Section::Dense(_) => unreachable!("general purifier uses circuits"),
    }
}

/// Coefficient of `|j>` in the infinite-depth catalyst.
fn catalyst_coefficient(p: f64, j: usize) -> f64 {
    if p < 0.5 {
        gamma(p).powi(j as i32)
    } else if p >= 1.0 {
        0.0
    } else {
        (-1.0 / gamma(p)).powi(j as i32)
    }
}

/// `sum_{j=1}^{D-1} gamma^j |j>` for `p < 1/2`, `sum (-gamma)^{-j} |j>` for
/// `p > 1/2`, on the private space.
pub fn analytic_catalyst(p: f64, d: usize) -> Result<StateVector> {
    check_p(p)?;
    if d < 2 {
        return Err(Error::Parameter("depth must be at least 2".into()));
    }
    let amps = (1..d).map(|j| c64(catalyst_coefficient(p, j), 0.0)).collect();
    Ok(StateVector::from_amps(amps))
}

/// The orthonormal ray vectors `|N_sector j>` for `j < D` in `J (x) A (x) W`.
pub fn sector_basis(spec: &OracleSpec, d: usize, sector: u8) -> Vec<Vec<C64>> {
    let m = 2 * spec.d_w();
    (0..d)
        .map(|j| {
            let (branch, sign) = match (sector, j % 4) {
                (0, 0) => (0, 1.0),
                (0, 1) => (1, 1.0),
                (0, 2) => (0, -1.0),
                (0, _) => (1, -1.0),
                (_, 0) => (1, 1.0),
                (_, 1) => (0, -1.0),
                (_, 2) => (1, -1.0),
                (_, _) => (0, 1.0),
            };
            let mut v = vec![ZERO; d * m];
            for (k, a) in spec.branch(branch).iter().enumerate() {
                v[j * m + k] = a * sign;
            }
            v
        })
        .collect()
}

/// Catalyst of the general purifier for the public input
/// `alpha |0>|phi0> + beta |1>|phi1>`, on the private space.
pub fn general_catalyst(spec: &OracleSpec, alpha: C64, beta: C64, d: usize) -> Result<StateVector> {
    check_p(spec.p())?;
    let m = 2 * spec.d_w();
    let mut v = vec![ZERO; d * m];
    // The walk acts on the second ray with its reflections in swapped order,
    // which flips the catalyst's sign on the p > 1/2 branch.
    let flip = if spec.p() > 0.5 { -1.0 } else { 1.0 };
    for (sector, coef) in [(0u8, alpha), (1u8, beta * flip)] {
        for (j, bv) in sector_basis(spec, d, sector).iter().enumerate().skip(1) {
            let c = coef * catalyst_coefficient(spec.p(), j);
            for (x, y) in v.iter_mut().zip(bv) {
                *x += c * y;
            }
        }
    }
    Ok(StateVector::from_amps(v[m..].to_vec()))
}

/// `2 gamma^{-(D-1)}` for `p > 1/2`, zero for `p < 1/2`.
pub fn gamma_truncation_bound(p: f64, d: usize) -> Result<f64> {
    Ok(if check_p(p)? == 0 { 0.0 } else { 2.0 * gamma(p).powi(-(d as i32 - 1)) })
}

/// `2 (1 - delta)^{D-1}`.
pub fn delta_truncation_bound(p: f64, d: usize) -> Result<f64> {
    check_p(p)?;
    Ok(2.0 * (1.0 - (0.5 - p).abs()).powi(d as i32 - 1))
}

/// Fixed point of the truncated operator found by the catalyst solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolve {
    /// `||tau - (-1)^r |0>||`.
    pub tau_error: f64,
    pub l: f64,
    pub w: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransductionReport {
    /// `||S(|0> (+) v) - ((-1)^r |0> (+) v)||` for the analytic catalyst `v`.
    pub tau_error: f64,
    /// Query complexity on the analytic coupling.
    pub l: f64,
    /// `||v||^2` of the analytic catalyst.
    pub w: f64,
    pub gamma_bound: f64,
    pub delta_bound: f64,
    /// The solver's fixed point, or the solver error message.
    pub exact: core::result::Result<ExactSolve, Error>,
}

/// Transduces `|0>` through the truncated simple purifier on `O_p`.
///
/// For `p > 1/2` the truncated walk is only a perturbed transducer, so the
/// headline figures use the analytic catalyst; the exact fixed point of the
/// truncated operator is reported alongside.
pub fn verify_transduction(p: f64, d: usize, tol: f64) -> Result<TransductionReport> {
    let r = check_p(p)?;
    let t = build_simple(d)?;
    let o = crate::oracles::simple_oracle(p)?;
    let sign = if r == 0 { 1.0 } else { -1.0 };
    let xi = [ONE];
    let v = analytic_catalyst(p, d)?;
    let tau_error = transducer::coupling_defect(&t, Some(&o), &xi, v.amps(), &[c64(sign, 0.0)])?;
    let l = norm(&transducer::coupling_query_state(&t, Some(&o), &xi, v.amps())?).powi(2);
    let exact = complexities(&t, Some(&o), &StateVector::from_real(&[1.0]), tol).map(|c| ExactSolve {
        tau_error: (c.result.tau.amps()[0] - c64(sign, 0.0)).norm(),
        l: c.l,
        w: c.w,
        residual: c.result.residual,
    });
    Ok(TransductionReport {
        tau_error,
        l,
        w: v.norm_sqr(),
        gamma_bound: gamma_truncation_bound(p, d)?,
        delta_bound: delta_truncation_bound(p, d)?,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneralReport {
    /// `||tau - (-1)^r phi||`.
    pub tau_error: f64,
    pub l: f64,
    pub w: f64,
    pub residual: f64,
}

/// Transduces `phi = alpha|0>|phi0> + beta|1>|phi1>` through the general
/// purifier on the reflecting oracle of `spec`.
pub fn verify_general(
    spec: &OracleSpec,
    complement: Option<&Operator>,
    alpha: C64,
    beta: C64,
    d: usize,
    tol: f64,
) -> Result<GeneralReport> {
    let r = check_p(spec.p())?;
    let t = build_general(d, spec.d_w())?;
    let o = general_reflecting_oracle(spec, complement)?;
    let phi = spec.span_vector(alpha, beta);
    let c = complexities(&t, Some(&o), &StateVector::from_amps(phi.clone()), tol)?;
    let sign = if r == 0 { 1.0 } else { -1.0 };
    let diff: Vec<C64> = c.result.tau.amps().iter().zip(&phi).map(|(a, b)| a - b * sign).collect();
    Ok(GeneralReport { tau_error: norm(&diff), l: c.l, w: c.w, residual: c.result.residual })
}

/// Defect of the analytic catalyst in the truncated general walk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationDefect {
    /// `||S'(phi (+) v) - ((-1)^r phi (+) v)||`.
    pub defect: f64,
    pub gamma_bound: f64,
    pub delta_bound: f64,
}

/// Couples `phi = alpha|0>|phi0> + beta|1>|phi1>` with the analytic catalyst
/// in the depth-`d` general walk and measures how far it is from a fixed point.
pub fn general_truncation_defect(spec: &OracleSpec, alpha: C64, beta: C64, d: usize) -> Result<TruncationDefect> {
    let r = check_p(spec.p())?;
    let t = build_general_on(d, &answer_workspace_layout(spec.d_w()), 0)?;
    let o = general_reflecting_oracle(spec, None)?;
    let phi = spec.span_vector(alpha, beta);
    let v = general_catalyst(spec, alpha, beta, d)?;
    let sign = if r == 0 { 1.0 } else { -1.0 };
    let tau: Vec<C64> = phi.iter().map(|a| a * sign).collect();
    Ok(TruncationDefect {
        defect: transducer::coupling_defect(&t, Some(&o), &phi, v.amps(), &tau)?,
        gamma_bound: gamma_truncation_bound(spec.p(), d)?,
        delta_bound: delta_truncation_bound(spec.p(), d)?,
    })
}

/// Runs the `K`-copy implementation at two depths and returns the distance
/// between the public outputs. Requires `d_big > d_small > 2K`.
pub fn prop_trunc_difference(p: f64, k: usize, d_small: usize, d_big: usize, tol: f64) -> Result<f64> {
    check_p(p)?;
    if d_small <= 2 * k || d_big <= d_small {
        return Err(Error::Parameter(alloc::format!(
            "need D_big > D_small > 2K, got K={k}, D_small={d_small}, D_big={d_big}"
        )));
    }
    let o = crate::oracles::simple_oracle(p)?;
    let xi = StateVector::from_real(&[1.0]);
    let a = implement_action(&build_simple(d_small)?, Some(&o), &xi, k, tol)?;
    let b = implement_action(&build_simple(d_big)?, Some(&o), &xi, k, tol)?;
    a.output.distance(&b.output)
}

/// Whether the two depths give the same output to `1e-12`.
pub fn prop_trunc1_check(p: f64, k: usize, d_small: usize, d_big: usize) -> Result<bool> {
    Ok(prop_trunc_difference(p, k, d_small, d_big, 1e-6)? <= 1e-12)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateGeneratingReport {
    /// `L` from the composition accounting.
    pub l: f64,
    pub w: f64,
    /// `1 + 1/(2 delta)`.
    pub l_expected: f64,
    pub r: u8,
    /// Distance of the simulated final state from `|r>|0>|0>`, garbage included.
    pub error: f64,
    /// `|<r,0,0|out>|^2` on the public registers.
    pub fidelity: f64,
    /// `2 sqrt(W / K)` of the inner transduction.
    pub bound: f64,
}

/// State-generating purifier: the accounting of its query complexity and a
/// direct simulation with the inner walk implemented by `K` couplings.
pub fn state_generating(spec: &OracleSpec, d: usize, k: usize, tol: f64) -> Result<StateGeneratingReport> {
    let r = check_p(spec.p())?;
    let o = state_generating_oracle(spec)?;
    let o_ref = reflecting_from_generator(&o)?;
    let t = build_general(d, spec.d_w())?;
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let sign = if r == 0 { 1.0 } else { -1.0 };
    let phi = spec.target();
    let q_inner: Vec<C64> = phi.iter().map(|a| a * (sign * h)).collect();
    // Two calls to O (+) O* on amplitude 1/sqrt(2) each.
    let q_direct = [c64(h, 0.0), c64(h, 0.0)];
    let acc = functional_accounting(&q_direct, &q_inner, 0.0, |q| {
        let c = complexities(&t, Some(&o_ref), &StateVector::from_amps(q.to_vec()), tol)?;
        Ok(InnerComplexity { l: 2.0 * c.l, w: c.w })
    })?;

    // |0>|00> -> H -> controlled O -> controlled U' -> controlled O* -> H.
    let m = 2 * spec.d_w();
    let branch = StateVector::from_amps(phi.iter().map(|a| a * h).collect());
    let rep = implement_action(&t, Some(&o_ref), &branch, k, tol)?;
    let back = o.adjoint().apply_amps(rep.output.amps())?;
    let mut zero_m = vec![ZERO; m];
    zero_m[0] = c64(h, 0.0);
    let mut out = vec![ZERO; 2 * m];
    for i in 0..m {
        out[i] = (zero_m[i] + back[i]) * h;
        out[m + i] = (zero_m[i] - back[i]) * h;
    }
    let mut ideal = vec![ZERO; 2 * m];
    ideal[r as usize * m] = ONE;
    let diff: Vec<C64> = out.iter().zip(&ideal).map(|(a, b)| a - b).collect();
    let error = norm(&diff).hypot(rep.garbage);
    let fidelity = out[r as usize * m].norm_sqr();
    let delta = spec.delta();
    Ok(StateGeneratingReport {
        l: acc.l_total,
        w: acc.w_total,
        l_expected: 1.0 + 1.0 / (2.0 * delta),
        r,
        error,
        fidelity,
        bound: rep.bound,
    })
}

/// `O (+) O*` for the state-generating oracle of `spec`.
pub fn bidirectional_access(spec: &OracleSpec) -> Result<Operator> {
    Ok(bidirectional(&state_generating_oracle(spec)?))
}

/// Query states `q(S, O, xi)` of the truncated simple purifier on `|0>`.
pub fn simple_query_state(p: f64, d: usize, tol: f64) -> Result<Vec<C64>> {
    let t = build_simple(d)?;
    let o = crate::oracles::simple_oracle(p)?;
    Ok(transducer::complexities(&t, Some(&o), &StateVector::from_real(&[1.0]), tol)?.q)
}
