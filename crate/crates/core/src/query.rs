//! Query algorithms `U_Q O~ U_{Q-1} ... O~ U_0` with the fixed query
//! operator `O~ = I (+) (I (x) O)` on `H = H_open (+) (H_up (x) M)`.
//!
//! Flat indices of `H` start with the `H_open` block; the bullet block
//! follows with `H_up` as the more significant factor.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_dim, Error, Result};
use crate::linalg::{norm, Layout, LocalGate, Matrix, Operator, Permutation, Space, StateVector, C64, ZERO};

/// Tolerance for accepting a section or oracle as unitary.
pub const SECTION_TOL: f64 = 1e-9;

/// An elementary step of a circuit section acting on the whole algorithm space.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Local(LocalGate),
    Perm(Permutation),
    /// Unimodular diagonal.
    Diag(Vec<C64>),
}

/// A fixed unitary between two queries.
#[derive(Debug, Clone, PartialEq)]
pub enum Section {
    Dense(Operator),
    /// Gates applied in order over the algorithm's wire layout.
    Circuit(Vec<Gate>),
}

impl Section {
    pub fn identity() -> Self {
        Section::Circuit(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryAlgorithm {
    open_dim: usize,
    up_dim: usize,
    oracle_dim: usize,
    wires: Option<Layout>,
    sections: Vec<Section>,
}

impl QueryAlgorithm {
    /// `sections` holds `U_0 .. U_Q`; circuit sections need `wires`.
    pub fn new(
        open_dim: usize,
        up_dim: usize,
        oracle_dim: usize,
        wires: Option<Layout>,
        sections: Vec<Section>,
    ) -> Result<Self> {
        if sections.is_empty() {
            return Err(Error::Structure("a query algorithm needs at least U_0".into()));
        }
        let dim = open_dim + up_dim * oracle_dim;
        if let Some(w) = &wires {
            check_dim(dim, w.dim())?;
        }
        for s in &sections {
            match s {
                Section::Dense(op) => {
                    check_dim(dim, op.dim())?;
                    let d = op.unitarity_defect();
                    if d > SECTION_TOL {
                        return Err(Error::NotUnitary { defect: d });
                    }
                }
                Section::Circuit(gates) => {
                    if wires.is_none() && !gates.is_empty() {
                        return Err(Error::Structure("circuit section without a wire layout".into()));
                    }
                    for g in gates {
                        match g {
                            Gate::Local(l) => {
                                let d = l.op.unitarity_defect();
                                if d > SECTION_TOL {
                                    return Err(Error::NotUnitary { defect: d });
                                }
                            }
                            Gate::Perm(p) => check_dim(dim, p.dim())?,
                            Gate::Diag(v) => {
                                check_dim(dim, v.len())?;
                                if let Some(a) = v.iter().find(|a| (a.norm() - 1.0).abs() > SECTION_TOL) {
                                    return Err(Error::NotUnitary { defect: (a.norm() - 1.0).abs() });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(QueryAlgorithm { open_dim, up_dim, oracle_dim, wires, sections })
    }

    /// Dense sections only.
    pub fn from_operators(open_dim: usize, up_dim: usize, oracle_dim: usize, ops: Vec<Operator>) -> Result<Self> {
        Self::new(open_dim, up_dim, oracle_dim, None, ops.into_iter().map(Section::Dense).collect())
    }

    pub fn dim(&self) -> usize {
        self.open_dim + self.up_dim * self.oracle_dim
    }

    pub fn open_dim(&self) -> usize {
        self.open_dim
    }

    pub fn up_dim(&self) -> usize {
        self.up_dim
    }

    pub fn oracle_dim(&self) -> usize {
        self.oracle_dim
    }

    pub fn query_count(&self) -> usize {
        self.sections.len() - 1
    }

    pub fn wires(&self) -> Option<&Layout> {
        self.wires.as_ref()
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn space(&self) -> Space {
        Space::Sum(vec![Space::flat(self.open_dim), Space::flat(self.up_dim * self.oracle_dim)])
    }

    fn check_oracle(&self, oracle: &Operator) -> Result<()> {
        check_dim(self.oracle_dim, oracle.dim())?;
        let d = oracle.unitarity_defect();
        if d > SECTION_TOL {
            return Err(Error::NotUnitary { defect: d });
        }
        Ok(())
    }

    pub fn apply_section(&self, t: usize, v: &[C64]) -> Vec<C64> {
        match &self.sections[t] {
            Section::Dense(op) => op.matrix().mul_vec(v).expect("dimension checked"),
            Section::Circuit(gates) => {
                let wires = self.wires.as_ref();
                let mut cur = v.to_vec();
                for g in gates {
                    cur = match g {
                        Gate::Local(l) => l.apply(wires.expect("checked in new"), &cur),
                        Gate::Perm(p) => p.apply(&cur),
                        Gate::Diag(d) => cur.iter().zip(d).map(|(a, b)| a * b).collect(),
                    };
                }
                cur
            }
        }
    }

    /// Applies `O~` in place.
    pub fn apply_query(&self, oracle: &Matrix, v: &mut [C64]) {
        let m = self.oracle_dim;
        let mut buf = vec![ZERO; m];
        for u in 0..self.up_dim {
            let off = self.open_dim + u * m;
            let block = &mut v[off..off + m];
            for (r, slot) in buf.iter_mut().enumerate() {
                *slot = oracle.row(r).iter().zip(block.iter()).map(|(a, b)| a * b).sum();
            }
            block.copy_from_slice(&buf);
        }
    }

    /// Bullet component `psi_t` of a state of `H`.
    pub fn bullet<'a>(&self, v: &'a [C64]) -> &'a [C64] {
        &v[self.open_dim..]
    }

    /// `A(O) xi` on raw amplitudes.
    pub fn run_amps(&self, oracle: &Operator, xi: &[C64]) -> Result<Vec<C64>> {
        self.check_oracle(oracle)?;
        check_dim(self.dim(), xi.len())?;
        let mut cur = self.apply_section(0, xi);
        for t in 1..self.sections.len() {
            self.apply_query(oracle.matrix(), &mut cur);
            cur = self.apply_section(t, &cur);
        }
        Ok(cur)
    }

    /// Dense matrix of `A(O)`; intended for small dimensions.
    pub fn to_operator(&self, oracle: &Operator) -> Result<Operator> {
        let n = self.dim();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = C64::new(1.0, 0.0);
            cols.push(self.run_amps(oracle, &e)?);
        }
        Operator::new(self.space(), Matrix::from_columns(n, &cols))
    }
}

/// Per-query bullet states and the derived complexities.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryTrace {
    pub bullet_states: Vec<Vec<C64>>,
    pub final_state: StateVector,
}

impl QueryTrace {
    /// `q = psi_1 (+) ... (+) psi_Q`.
    pub fn total_query_state(&self) -> Vec<C64> {
        self.bullet_states.iter().flat_map(|v| v.iter().copied()).collect()
    }

    /// `L = sum_t ||psi_t||^2`.
    pub fn las_vegas(&self) -> f64 {
        self.bullet_states.iter().map(|v| v.iter().map(|a| a.norm_sqr()).sum::<f64>()).sum()
    }
}

/// Magnitudes of injected perturbations.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerturbationLog {
    pub magnitudes: Vec<f64>,
}

impl PerturbationLog {
    pub fn total(&self) -> f64 {
        self.magnitudes.iter().sum()
    }
}

fn check_xi(alg: &QueryAlgorithm, xi: &StateVector) -> Result<()> {
    check_dim(alg.dim(), xi.dim())
}

/// `U_Q O~ U_{Q-1} ... O~ U_0 xi`.
pub fn run(alg: &QueryAlgorithm, oracle: &Operator, xi: &StateVector) -> Result<StateVector> {
    check_xi(alg, xi)?;
    StateVector::new(xi.space().clone(), alg.run_amps(oracle, xi.amps())?)
}

/// Runs the algorithm recording the bullet part of the state before each query.
pub fn trace(alg: &QueryAlgorithm, oracle: &Operator, xi: &StateVector) -> Result<QueryTrace> {
    check_xi(alg, xi)?;
    alg.check_oracle(oracle)?;
    let mut cur = alg.apply_section(0, xi.amps());
    let mut bullets = Vec::with_capacity(alg.query_count());
    for t in 1..=alg.query_count() {
        bullets.push(alg.bullet(&cur).to_vec());
        alg.apply_query(oracle.matrix(), &mut cur);
        cur = alg.apply_section(t, &cur);
    }
    Ok(QueryTrace { bullet_states: bullets, final_state: StateVector::new(xi.space().clone(), cur)? })
}

/// Runs the algorithm adding `delta` to the state right after section
/// `step` (`0..=Q`). By unitarity the output moves by at most the sum of
/// the delta norms.
pub fn run_perturbed(
    alg: &QueryAlgorithm,
    oracle: &Operator,
    xi: &StateVector,
    injected: &[(usize, Vec<C64>)],
) -> Result<(StateVector, PerturbationLog)> {
    check_xi(alg, xi)?;
    alg.check_oracle(oracle)?;
    let q = alg.query_count();
    for (step, d) in injected {
        if *step > q {
            return Err(Error::Parameter(alloc::format!("perturbation step {step} > Q = {q}")));
        }
        check_dim(alg.dim(), d.len())?;
    }
    let mut log = PerturbationLog::default();
    let mut cur = alg.apply_section(0, xi.amps());
    for t in 0..=q {
        if t > 0 {
            alg.apply_query(oracle.matrix(), &mut cur);
            cur = alg.apply_section(t, &cur);
        }
        for (_, d) in injected.iter().filter(|(s, _)| *s == t) {
            for (c, x) in cur.iter_mut().zip(d) {
                *c += x;
            }
            log.magnitudes.push(norm(d));
        }
    }
    Ok((StateVector::new(xi.space().clone(), cur)?, log))
}

/// Checks `q(a xi1 + b xi2) = a q(xi1) + b q(xi2)` to `tol`.
pub fn linearity_check(
    alg: &QueryAlgorithm,
    oracle: &Operator,
    xi1: &StateVector,
    xi2: &StateVector,
    a: C64,
    b: C64,
    tol: f64,
) -> Result<bool> {
    let q1 = trace(alg, oracle, xi1)?.total_query_state();
    let q2 = trace(alg, oracle, xi2)?.total_query_state();
    let mix = xi1.scale(a).add(&xi2.scale(b))?;
    let q = trace(alg, oracle, &mix)?.total_query_state();
    let worst = q.iter().zip(q1.iter().zip(&q2)).map(|(x, (y, z))| (x - (a * y + b * z)).norm()).fold(0.0, f64::max);
    Ok(worst <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c64, random::random_unitary, Register, ONE};
    use crate::oracles::simple_oracle;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_alg(rng: &mut ChaCha8Rng, open: usize, up: usize, m: usize, q: usize) -> QueryAlgorithm {
        let n = open + up * m;
        let ops = (0..=q).map(|_| Operator::from_matrix(random_unitary(rng, n)).unwrap()).collect();
        QueryAlgorithm::from_operators(open, up, m, ops).unwrap()
    }

    #[test]
    fn zero_queries_identity() {
        let alg = QueryAlgorithm::from_operators(3, 0, 2, vec![Operator::identity(Space::flat(3))]).unwrap();
        let xi = StateVector::from_real(&[0.6, 0.0, 0.8]);
        let out = run(&alg, &simple_oracle(0.3).unwrap(), &xi).unwrap();
        assert_eq!(out.amps(), xi.amps());
        assert_eq!(trace(&alg, &simple_oracle(0.3).unwrap(), &xi).unwrap().las_vegas(), 0.0);
    }

    #[test]
    fn bare_query() {
        let id = Operator::identity(Space::flat(2));
        let alg = QueryAlgorithm::from_operators(0, 1, 2, vec![id.clone(), id]).unwrap();
        let o = simple_oracle(0.25).unwrap();
        let xi = StateVector::from_real(&[1.0, 0.0]);
        let out = run(&alg, &o, &xi).unwrap();
        assert!((out.amps()[0] - c64(0.5, 0.0)).norm() < 1e-15);
        assert!((out.amps()[1] - c64(0.75f64.sqrt(), 0.0)).norm() < 1e-15);
        let tr = trace(&alg, &o, &xi).unwrap();
        assert!((tr.las_vegas() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn open_part_is_never_queried() {
        let id = Operator::identity(Space::flat(4));
        let alg = QueryAlgorithm::from_operators(2, 1, 2, vec![id.clone(), id.clone(), id]).unwrap();
        let xi = StateVector::from_real(&[0.6, 0.8, 0.0, 0.0]);
        let tr = trace(&alg, &simple_oracle(0.4).unwrap(), &xi).unwrap();
        assert_eq!(tr.las_vegas(), 0.0);
    }

    #[test]
    fn trace_matches_run_and_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let alg = random_alg(&mut rng, 2, 3, 2, 4);
        let o = simple_oracle(0.3).unwrap();
        let xi = crate::linalg::random::random_state(&mut rng, alg.dim());
        let tr = trace(&alg, &o, &xi).unwrap();
        let out = run(&alg, &o, &xi).unwrap();
        assert!(out.distance(&tr.final_state).unwrap() < 1e-14);
        assert!((out.norm() - 1.0).abs() < 1e-10);
        assert!(tr.las_vegas() <= 4.0 + 1e-12);
        let q = tr.total_query_state();
        assert!((norm(&q).powi(2) - tr.las_vegas()).abs() < 1e-12);
    }

    #[test]
    fn perturbations_obey_triangle_inequality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let alg = random_alg(&mut rng, 1, 2, 2, 3);
        let o = simple_oracle(0.2).unwrap();
        let xi = crate::linalg::random::random_state(&mut rng, alg.dim());
        let base = run(&alg, &o, &xi).unwrap();
        let (same, log) = run_perturbed(&alg, &o, &xi, &[]).unwrap();
        assert!(same.distance(&base).unwrap() < 1e-15);
        assert_eq!(log.total(), 0.0);
        let d = |s: f64, rng: &mut ChaCha8Rng| {
            crate::linalg::random::random_state(rng, alg.dim()).scale(c64(s, 0.0)).into_amps()
        };
        for step in 0..=3 {
            let (out, _) = run_perturbed(&alg, &o, &xi, &[(step, d(0.1, &mut rng))]).unwrap();
            assert!(out.distance(&base).unwrap() <= 0.1 + 1e-12);
        }
        let (out, log) = run_perturbed(&alg, &o, &xi, &[(0, d(0.05, &mut rng)), (2, d(0.07, &mut rng))]).unwrap();
        assert!((log.total() - 0.12).abs() < 1e-12);
        assert!(out.distance(&base).unwrap() <= 0.12 + 1e-12);
        assert!(run_perturbed(&alg, &o, &xi, &[(4, d(0.1, &mut rng))]).is_err());
    }

    #[test]
    fn linearity_and_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let alg = random_alg(&mut rng, 2, 2, 2, 3);
        let o = simple_oracle(0.35).unwrap();
        let e0 = StateVector::basis(alg.space(), 0).unwrap();
        let e3 = StateVector::basis(alg.space(), 3).unwrap();
        let h = c64(core::f64::consts::FRAC_1_SQRT_2, 0.0);
        assert!(linearity_check(&alg, &o, &e0, &e3, ONE, ZERO, 1e-10).unwrap());
        assert!(linearity_check(&alg, &o, &e0, &e3, h, h, 1e-10).unwrap());
        let l1 = trace(&alg, &o, &e0).unwrap().las_vegas();
        let l2 = trace(&alg, &o, &e0.scale(c64(2.0, 0.0))).unwrap().las_vegas();
        assert!((l2 - 4.0 * l1).abs() < 1e-12);
    }

    #[test]
    fn circuit_sections_match_dense() {
        let wires = Layout::new(vec![Register::bit("c"), Register::bit("a")]);
        let x = crate::linalg::operator::pauli_x();
        let cx = LocalGate::new(
            &wires,
            vec![1],
            x.matrix().clone(),
            crate::linalg::Predicate::when(0, crate::linalg::Cond::Eq(1)),
        )
        .unwrap();
        let circ = QueryAlgorithm::new(
            0,
            2,
            2,
            Some(wires.clone()),
            vec![Section::Circuit(vec![Gate::Local(cx.clone())]), Section::identity()],
        )
        .unwrap();
        let dense =
            QueryAlgorithm::from_operators(0, 2, 2, vec![cx.to_operator(&wires), Operator::identity(Space::flat(4))])
                .unwrap();
        let o = simple_oracle(0.1).unwrap();
        let a = circ.to_operator(&o).unwrap();
        let b = dense.to_operator(&o).unwrap();
        assert!(a.distance_max(&b).unwrap() < 1e-15);
    }

    #[test]
    fn rejects_wrong_oracle_dimension() {
        let id = Operator::identity(Space::flat(4));
        let alg = QueryAlgorithm::from_operators(0, 1, 4, vec![id.clone(), id]).unwrap();
        let xi = StateVector::basis(Space::flat(4), 0).unwrap();
        assert!(matches!(run(&alg, &simple_oracle(0.1).unwrap(), &xi), Err(Error::DimensionMismatch { .. })));
    }
}
