//! Dual adversary feasibility for state conversion problems, and the
//! two-oracle lower bound that certifies the purifier's `1/(2 delta)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{c64, inner, norm, Matrix, Operator, StateVector, C64, ONE, ZERO};
use crate::oracles::simple_oracle;
use crate::transducer::{complexities, isometry_extension, span_restriction, Transducer};
// Test builds link std, which makes the inherent float methods visible.
#[allow(unused_imports)]
use num_traits::Float;

/// Labels `x`, oracles `O_x` on `M` and pairs `xi_x -> tau_x` in `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateConversionProblem {
    oracles: Vec<Operator>,
    xi: Vec<Vec<C64>>,
    tau: Vec<Vec<C64>>,
    dim_h: usize,
    dim_m: usize,
}

impl StateConversionProblem {
    pub fn new(oracles: Vec<Operator>, xi: Vec<Vec<C64>>, tau: Vec<Vec<C64>>) -> Result<Self> {
        check_dim(oracles.len(), xi.len())?;
        check_dim(oracles.len(), tau.len())?;
        let dim_h = xi.first().map_or(0, Vec::len);
        let dim_m = oracles.first().map_or(0, Operator::dim);
        for o in &oracles {
            check_dim(dim_m, o.dim())?;
            let d = o.unitarity_defect();
            if d > 1e-9 {
                return Err(Error::NotUnitary { defect: d });
            }
        }
        for v in xi.iter().chain(&tau) {
            check_dim(dim_h, v.len())?;
        }
        Ok(StateConversionProblem { oracles, xi, tau, dim_h, dim_m })
    }

    /// No labels at all.
    pub fn empty() -> Self {
        StateConversionProblem { oracles: Vec::new(), xi: Vec::new(), tau: Vec::new(), dim_h: 0, dim_m: 0 }
    }

    pub fn len(&self) -> usize {
        self.oracles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.oracles.is_empty()
    }

    pub fn oracle(&self, x: usize) -> &Operator {
        &self.oracles[x]
    }

    pub fn xi(&self, x: usize) -> &[C64] {
        &self.xi[x]
    }

    pub fn tau(&self, x: usize) -> &[C64] {
        &self.tau[x]
    }

    pub fn dim_h(&self) -> usize {
        self.dim_h
    }

    pub fn dim_m(&self) -> usize {
        self.dim_m
    }
}

/// `phi_0`, `phi_1` with amplitudes `sqrt(1/2 +- delta)` swapped between them.
pub fn two_oracle_states(delta: f64) -> Result<(Vec<C64>, Vec<C64>)> {
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(Error::Parameter("need 0 < delta <= 1/2".into()));
    }
    let (a, b) = ((0.5 + delta).sqrt(), (0.5 - delta).max(0.0).sqrt());
    Ok((vec![c64(a, 0.0), c64(b, 0.0)], vec![c64(b, 0.0), c64(a, 0.0)]))
}

/// Oracles `O_{1/2 - delta}`, `O_{1/2 + delta}`; `xi_0 = xi_1 = tau_0 = |0>`
/// and `tau_1 = -|0>`.
pub fn two_oracle_problem(delta: f64) -> Result<StateConversionProblem> {
    two_oracle_states(delta)?;
    let oracles = vec![simple_oracle(0.5 - delta)?, simple_oracle(0.5 + delta)?];
    StateConversionProblem::new(oracles, vec![vec![ONE], vec![ONE]], vec![vec![ONE], vec![-ONE]])
}

/// `1 / ||phi_0 phi_0* - phi_1 phi_1*||`, after confirming the norm is `2 delta`.
pub fn two_oracle_bound(delta: f64) -> Result<f64> {
    let (p0, p1) = two_oracle_states(delta)?;
    let diff = Matrix::from_fn(2, 2, |r, c| p0[r] * p0[c].conj() - p1[r] * p1[c].conj());
    let n = diff.spectral_norm();
    if (n - 2.0 * delta).abs() > 1e-12 {
        return Err(Error::Contract(alloc::format!("||phi0 phi0* - phi1 phi1*|| = {n}, expected {}", 2.0 * delta)));
    }
    Ok(1.0 / n)
}

/// Vectors `v_x` in `H_up (x) M`, all of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversaryCandidate {
    vectors: Vec<Vec<C64>>,
    dim_m: usize,
}

impl AdversaryCandidate {
    /// Shorter vectors are zero-padded to the longest one.
    pub fn new(mut vectors: Vec<Vec<C64>>, dim_m: usize) -> Result<Self> {
        let len = vectors.iter().map(Vec::len).max().unwrap_or(0);
        if dim_m == 0 && len > 0 || dim_m > 0 && len % dim_m != 0 {
            return Err(Error::DimensionMismatch { expected: dim_m, found: len });
        }
        for v in &mut vectors {
            if v.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
                return Err(Error::Parameter("candidate vectors must be finite".into()));
            }
            v.resize(len, ZERO);
        }
        Ok(AdversaryCandidate { vectors, dim_m })
    }

    pub fn vectors(&self) -> &[Vec<C64>] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Dimension of `H_up`.
    pub fn up_dim(&self) -> usize {
        if self.dim_m == 0 {
            0
        } else {
            self.vectors.first().map_or(0, |v| v.len() / self.dim_m)
        }
    }

    /// Every vector multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        let vectors = self.vectors.iter().map(|v| v.iter().map(|a| a * s).collect()).collect();
        AdversaryCandidate { vectors, dim_m: self.dim_m }
    }

    /// The same Gram data on the smallest `H_up`: the `H_up` slices
    /// `v_x[., m]` are expressed in an orthonormal basis of their span.
    pub fn restricted(&self) -> Self {
        let (m, up) = (self.dim_m, self.up_dim());
        if up == 0 {
            return self.clone();
        }
        let slices: Vec<Vec<C64>> =
            self.vectors.iter().flat_map(|v| (0..m).map(move |j| (0..up).map(|u| v[u * m + j]).collect())).collect();
        let basis = span_restriction(&slices);
        let vectors = self
            .vectors
            .iter()
            .map(|v| {
                let mut out = vec![ZERO; basis.len() * m];
                for (i, b) in basis.iter().enumerate() {
                    for j in 0..m {
                        out[i * m + j] = (0..up).map(|u| b[u].conj() * v[u * m + j]).sum();
                    }
                }
                out
            })
            .collect();
        AdversaryCandidate { vectors, dim_m: m }
    }
}

/// `(I (x) O) v` for `v` in `H_up (x) M`.
pub fn apply_blockwise(o: &Operator, v: &[C64]) -> Vec<C64> {
    let m = o.dim();
    v.chunks(m).flat_map(|c| o.matrix().mul_vec(c).expect("block has oracle dimension")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Feasibility {
    pub feasible: bool,
    pub max_residual: f64,
    /// `max_x ||v_x||^2`.
    pub objective: f64,
}

/// Residual of `<xi_x, xi_y> - <tau_x, tau_y> = <v_x, v_y> - <O_x v_x, O_y v_y>`
/// over all pairs.
pub fn check_feasible(problem: &StateConversionProblem, cand: &AdversaryCandidate, tol: f64) -> Result<Feasibility> {
    check_dim(problem.len(), cand.len())?;
    if !problem.is_empty() && cand.up_dim() > 0 {
        check_dim(problem.dim_m, cand.dim_m)?;
    }
    let n = problem.len();
    let queried: Vec<Vec<C64>> = (0..n)
        .map(|x| if cand.up_dim() == 0 { Vec::new() } else { apply_blockwise(&problem.oracles[x], &cand.vectors[x]) })
        .collect();
    let mut max_residual: f64 = 0.0;
    for x in 0..n {
        for y in x..n {
            let lhs = inner(&problem.xi[x], &problem.xi[y]) - inner(&problem.tau[x], &problem.tau[y]);
            let rhs = inner(&cand.vectors[x], &cand.vectors[y]) - inner(&queried[x], &queried[y]);
            max_residual = max_residual.max((lhs - rhs).norm());
        }
    }
    let objective = cand.vectors.iter().map(|v| norm(v).powi(2)).fold(0.0, f64::max);
    Ok(Feasibility { feasible: max_residual <= tol, max_residual, objective })
}

/// Total query states of `t` on every label, as an adversary candidate.
/// Fails if `t` does not transduce `xi_x` to `tau_x` within `tol`.
pub fn transducer_to_candidate(
    t: &Transducer,
    problem: &StateConversionProblem,
    tol: f64,
    restrict: bool,
) -> Result<AdversaryCandidate> {
    if problem.is_empty() {
        return AdversaryCandidate::new(Vec::new(), 0);
    }
    check_dim(t.dim_h(), problem.dim_h)?;
    let mut vectors = Vec::with_capacity(problem.len());
    for x in 0..problem.len() {
        let c = complexities(t, Some(&problem.oracles[x]), &StateVector::from_amps(problem.xi[x].clone()), tol)?;
        let miss = norm(&c.result.tau.amps().iter().zip(&problem.tau[x]).map(|(a, b)| a - b).collect::<Vec<_>>());
        if miss > tol.max(1e-10) {
            return Err(Error::Contract(alloc::format!("label {x}: transducer output misses tau by {miss:e}")));
        }
        vectors.push(c.q);
    }
    let cand = AdversaryCandidate::new(vectors, problem.dim_m)?;
    Ok(if restrict { cand.restricted() } else { cand })
}

/// Canonical transducer whose work unitary maps
/// `xi_x (+) (I (x) O_x) v_x` to `tau_x (+) v_x`; returns it with the worst
/// mismatch of that map.
pub fn candidate_to_canonical(
    problem: &StateConversionProblem,
    cand: &AdversaryCandidate,
) -> Result<(Transducer, f64)> {
    check_dim(problem.len(), cand.len())?;
    let (h, m, up) = (problem.dim_h, problem.dim_m, cand.up_dim());
    let dim = h + up * m;
    let mut inputs = Vec::with_capacity(problem.len());
    let mut outputs = Vec::with_capacity(problem.len());
    for x in 0..problem.len() {
        let mut a = problem.xi[x].clone();
        let mut b = problem.tau[x].clone();
        if up > 0 {
            a.extend(apply_blockwise(&problem.oracles[x], &cand.vectors[x]));
            b.extend_from_slice(&cand.vectors[x]);
        }
        inputs.push(a);
        outputs.push(b);
    }
    let (u, mismatch) = isometry_extension(&inputs, &outputs, dim)?;
    let t = Transducer::canonical(Operator::from_matrix(u)?, h, 0, up, m.max(usize::from(up == 0)))?;
    Ok((t, mismatch))
}

/// Both sides of `|<xi_0,xi_1> - <tau_0,tau_1>| <= ||v_0|| ||v_1|| ||O_0 - O_1||`.
pub fn saturation(problem: &StateConversionProblem, cand: &AdversaryCandidate) -> Result<(f64, f64)> {
    if problem.len() != 2 || cand.len() != 2 {
        return Err(Error::Parameter("saturation compares exactly two labels".into()));
    }
    let lhs = (inner(&problem.xi[0], &problem.xi[1]) - inner(&problem.tau[0], &problem.tau[1])).norm();
    let diff = problem.oracles[0].matrix().sub(problem.oracles[1].matrix())?;
    let rhs = norm(&cand.vectors[0]) * norm(&cand.vectors[1]) * diff.spectral_norm();
    Ok((lhs, rhs))
}

/// Lower bound, candidate objective and gap for the depth-`d` simple purifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TightnessReport {
    pub lower_bound: f64,
    pub objective: f64,
    pub max_residual: f64,
    pub gap: f64,
}

pub fn purifier_tightness(delta: f64, d: usize, tol: f64) -> Result<TightnessReport> {
    let lower_bound = two_oracle_bound(delta)?;
    let problem = two_oracle_problem(delta)?;
    let t = crate::purifier::build_simple(d)?;
    let cand = transducer_to_candidate(&t, &problem, tol, false)?;
    let f = check_feasible(&problem, &cand, tol)?;
    Ok(TightnessReport {
        lower_bound,
        objective: f.objective,
        max_residual: f.max_residual,
        gap: f.objective - lower_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{QueryAlgorithm, Section};

    #[test]
    fn trivial_problem_is_feasible() {
        let o = simple_oracle(0.3).unwrap();
        let s = vec![c64(0.6, 0.0), c64(0.0, 0.8)];
        let p =
            StateConversionProblem::new(vec![o.clone(), o], vec![s.clone(), s.clone()], vec![s.clone(), s]).unwrap();
        let c = AdversaryCandidate::new(vec![vec![], vec![]], 2).unwrap();
        let f = check_feasible(&p, &c, 1e-12).unwrap();
        assert!(f.feasible);
        assert_eq!(f.objective, 0.0);
    }

    #[test]
    fn bound_examples() {
        assert!((two_oracle_bound(0.25).unwrap() - 2.0).abs() < 1e-12);
        assert!((two_oracle_bound(0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!((two_oracle_bound(0.05).unwrap() - 10.0).abs() < 1e-9);
    }

    #[test]
    fn empty_problem() {
        let p = StateConversionProblem::empty();
        let t = crate::purifier::build_simple(8).unwrap();
        let c = transducer_to_candidate(&t, &p, 1e-10, false).unwrap();
        assert!(c.is_empty());
        assert!(check_feasible(&p, &c, 1e-12).unwrap().feasible);
    }

    #[test]
    fn one_query_algorithm() {
        let z = Operator::from_matrix(Matrix::diag(&[ONE, -ONE])).unwrap();
        let id = Operator::from_matrix(Matrix::identity(2)).unwrap();
        let plus = vec![c64(core::f64::consts::FRAC_1_SQRT_2, 0.0); 2];
        let minus = vec![plus[0], -plus[1]];
        let p = StateConversionProblem::new(vec![id.clone(), z], vec![plus.clone(), plus.clone()], vec![plus, minus])
            .unwrap();
        let alg = QueryAlgorithm::new(0, 1, 2, None, vec![Section::Dense(id.clone()), Section::Dense(id)]).unwrap();
        let t = Transducer::from_plain_algorithm(alg);
        let c = transducer_to_candidate(&t, &p, 1e-10, false).unwrap();
        let f = check_feasible(&p, &c, 1e-10).unwrap();
        assert!(f.feasible);
        assert!((f.objective - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purifier_certifies_its_own_optimality() {
        let p = two_oracle_problem(0.25).unwrap();
        let t = crate::purifier::build_simple(64).unwrap();
        let c = transducer_to_candidate(&t, &p, 1e-10, false).unwrap();
        let f = check_feasible(&p, &c, 1e-6).unwrap();
        assert!(f.feasible, "{f:?}");
        assert!((f.objective - 2.0).abs() < 1e-6);
        assert!(!check_feasible(&p, &c.scaled(0.9), 1e-6).unwrap().feasible);
        let r = c.restricted();
        assert!(r.up_dim() <= c.up_dim());
        assert!(check_feasible(&p, &r, 1e-6).unwrap().feasible);
        let (lhs, rhs) = saturation(&p, &c).unwrap();
        assert!((lhs - 2.0).abs() < 1e-12 && lhs <= rhs + 1e-9 && rhs - lhs < 1e-6);
        let (can, mismatch) = candidate_to_canonical(&p, &r).unwrap();
        assert!(mismatch < 1e-8);
        assert!(crate::transducer::canonical_check(&can).unwrap());
    }
}
